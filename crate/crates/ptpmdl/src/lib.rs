//! Threaded execution, file formats and the experiment harness for
//! [`ptpmdl_core`].

pub mod config;
pub mod exec;
pub mod experiment;
pub mod measure;

pub use config::{load_source, parse_source, ExperimentSpec};
pub use exec::Threads;
pub use experiment::{run_experiment, summarize, write_csv, Row, Summary};
pub use measure::{measure, Measurement};
