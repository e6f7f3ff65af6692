//! Coding-length sweep over modes and block counts.
//!
//! CSV columns, one row per (mode, blocks, rep):
//!
//! | column | meaning |
//! |---|---|
//! | `mode` | `ptp-mdl`, `naive`, `markov` or `naive-markov` |
//! | `blocks` | B |
//! | `rep` | repetition, 0-based |
//! | `seed` | generator seed (`spec.seed + rep`) |
//! | `analytic_bits` | `l_phase1 + l_phase2` |
//! | `actual_bits` | coded bits, excluding container framing |
//! | `container_bits` | full container size |
//! | `states` | estimated states (largest per-block model in naive modes) |
//! | `ml_entropy` | ML entropy of the coded symbols under the estimated structure |
//! | `redundancy` | `actual_bits - ml_entropy` |
//! | `theorem1_bound` | redundancy bound for the mode |
//! | `phase1_ms`, `phase2_ms`, `decode_ms` | wall-clock times |

use std::io::Write;

use anyhow::Result;
use ptpmdl_core::{EncodeConfig, Executor, Mode, Sequential, TreeSource};
use serde::Serialize;

use crate::config::ExperimentSpec;
use crate::measure::measure;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    #[serde(serialize_with = "mode_name")]
    pub mode: Mode,
    pub blocks: u32,
    pub rep: u32,
    pub seed: u64,
    pub analytic_bits: f64,
    pub actual_bits: u64,
    pub container_bits: u64,
    pub states: usize,
    pub ml_entropy: f64,
    pub redundancy: f64,
    pub theorem1_bound: f64,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub decode_ms: f64,
}

fn mode_name<S: serde::Serializer>(mode: &Mode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(mode.name())
}

/// Runs every (mode, B, rep) cell. Repetitions are spread over `exec`; each
/// encode runs sequentially inside its task. Rows come back ordered by mode
/// (as listed in the spec), then B, then rep.
pub fn run_experiment<E: Executor>(spec: &ExperimentSpec, source: &TreeSource, exec: &E) -> Result<Vec<Row>> {
    spec.validate()?;
    let modes = spec.modes()?;
    let reps = spec.repetitions as usize;
    let sequences: Vec<Vec<u8>> = exec.run(reps, |r| source.generate_default(spec.n, spec.seed + r as u64));
    let cells: Vec<(Mode, u32, usize)> = modes
        .iter()
        .flat_map(|&m| spec.blocks.iter().flat_map(move |&b| (0..reps).map(move |r| (m, b, r))))
        .collect();
    let rows = exec.run(cells.len(), |i| {
        let (mode, blocks, rep) = cells[i];
        let m = measure(
            &sequences[rep],
            EncodeConfig::new(blocks, spec.depth, mode),
            &Sequential,
        )?;
        Ok(Row {
            mode,
            blocks,
            rep: rep as u32,
            seed: spec.seed + rep as u64,
            analytic_bits: m.analytic_bits(),
            actual_bits: m.actual_bits,
            container_bits: m.container_bits,
            states: m.states,
            ml_entropy: m.report.ml_entropy,
            redundancy: m.redundancy(),
            theorem1_bound: m.report.theorem1_bound,
            phase1_ms: m.phase1.as_secs_f64() * 1e3,
            phase2_ms: m.phase2.as_secs_f64() * 1e3,
            decode_ms: m.decode.as_secs_f64() * 1e3,
        })
    });
    rows.into_iter().collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Means over the repetitions of one (mode, B) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mode: Mode,
    pub blocks: u32,
    pub runs: usize,
    pub analytic_bits: f64,
    pub actual_bits: f64,
    pub states: f64,
    pub redundancy: f64,
    pub theorem1_bound: f64,
}

pub fn summarize(rows: &[Row]) -> Vec<Summary> {
    let mut out: Vec<Summary> = Vec::new();
    for row in rows {
        let idx = match out.iter().position(|s| s.mode == row.mode && s.blocks == row.blocks) {
            Some(i) => i,
            None => {
                out.push(Summary {
                    mode: row.mode,
                    blocks: row.blocks,
                    runs: 0,
                    analytic_bits: 0.0,
                    actual_bits: 0.0,
                    states: 0.0,
                    redundancy: 0.0,
                    theorem1_bound: 0.0,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.runs += 1;
        s.analytic_bits += row.analytic_bits;
        s.actual_bits += row.actual_bits as f64;
        s.states += row.states as f64;
        s.redundancy += row.redundancy;
        s.theorem1_bound += row.theorem1_bound;
    }
    for s in &mut out {
        let n = s.runs as f64;
        s.analytic_bits /= n;
        s.actual_bits /= n;
        s.states /= n;
        s.redundancy /= n;
        s.theorem1_bound /= n;
    }
    out
}

impl Summary {
    pub fn lookup(summaries: &[Summary], mode: Mode, blocks: u32) -> Option<&Summary> {
        summaries.iter().find(|s| s.mode == mode && s.blocks == blocks)
    }
}
