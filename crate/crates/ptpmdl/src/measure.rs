use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use ptpmdl_core::codec::{assemble, code_blocks, count_blocks, decode, estimate, Encoded, Plan};
use ptpmdl_core::{EncodeConfig, Executor, LengthReport};

/// One instrumented encode/decode run.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub encoded: Encoded,
    pub report: LengthReport,
    /// Coded bits (model sections, raw contexts, payloads), excluding framing.
    pub actual_bits: u64,
    /// Full serialized container size in bits.
    pub container_bits: u64,
    pub states: usize,
    pub phase1: Duration,
    pub phase2: Duration,
    pub decode: Duration,
}

impl Measurement {
    /// `l_phase1 + l_phase2`.
    pub fn analytic_bits(&self) -> f64 {
        self.report.l_phase1 + self.report.l_phase2
    }

    /// Measured redundancy: actual coded bits minus the ML entropy.
    pub fn redundancy(&self) -> f64 {
        self.actual_bits as f64 - self.report.ml_entropy
    }
}

/// Encodes `x`, decodes the result and checks it round-trips, timing each
/// phase. Phase I covers counting, aggregation and pruning; Phase II covers
/// coding and container assembly.
pub fn measure<E: Executor>(x: &[u8], cfg: EncodeConfig, exec: &E) -> Result<Measurement> {
    ensure!(x.iter().all(|&s| s <= 1), "input symbols must be 0 or 1");
    let t0 = Instant::now();
    let plan = Plan::new(x.len(), cfg)?;
    let counts = count_blocks(x, &plan, exec)?;
    let est = estimate(&plan, &counts, exec)?;
    let t1 = Instant::now();
    let phase2 = code_blocks(x, &plan, &est, exec)?;
    let encoded = assemble(&plan, &counts, est, phase2)?;
    let t2 = Instant::now();
    let back = decode(&encoded.container, exec)?;
    let t3 = Instant::now();
    ensure!(back == x, "decoded output differs from the input");

    Ok(Measurement {
        report: encoded.report,
        actual_bits: encoded.container.coded_bits(),
        container_bits: encoded.container.to_bytes().len() as u64 * 8,
        states: encoded.states(),
        encoded,
        phase1: t1 - t0,
        phase2: t2 - t1,
        decode: t3 - t2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ptpmdl_core::{Mode, Sequential, TreeSource};

    #[test]
    fn accounting_identities() {
        let x = TreeSource::example_four_state().generate_default(10_000, 3);
        for blocks in [1, 5, 16] {
            let m = measure(&x, EncodeConfig::new(blocks, 5, Mode::PtpMdl), &Sequential).unwrap();
            assert!(m.actual_bits as f64 >= m.analytic_bits() - 2.0 * blocks as f64);
            assert!(m.container_bits > m.actual_bits);
            assert!(m.redundancy() > 0.0);
        }
    }
}
