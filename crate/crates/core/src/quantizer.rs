//! Parameter quantizer matched to Jeffreys' prior.
//!
//! Jeffreys' prior on a Bernoulli parameter has density proportional to
//! `1/sqrt(θ(1-θ))`, whose CDF is the arcsine compander
//! `u(θ) = (2/π) asin(sqrt(θ))`. At `K = Θ(sqrt(N))` levels the Lloyd-Max
//! quantizer for this prior is uniform in the companded domain, so the grid
//! has closed form: edges `sin²(πk / 2K)` and levels at the `u`-midpoints
//! `sin²(π(k + ½) / 2K)`. All math goes through `libm` so every platform
//! derives the same grid from the same `N`.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

/// Number of representation levels for a sequence of length `n`:
/// `ceil(sqrt(2π² ln2 (1/2 - 3/(16 ln2)) n))`, roughly `ceil(1.772 sqrt(n))`.
pub fn grid_size(n: u64) -> u32 {
    let n = n.max(1) as f64;
    let radicand = 2.0 * PI * PI * LN_2 * (0.5 - 3.0 / (16.0 * LN_2)) * n;
    libm::ceil(libm::sqrt(radicand)) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerGrid {
    edges: Vec<f64>,
    levels: Vec<f64>,
}

/// Bin index and representation level of a quantized parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedParam {
    pub k: u32,
    pub r: f64,
}

impl QuantizerGrid {
    /// The grid for a sequence of length `n`.
    pub fn for_length(n: u64) -> Self {
        Self::with_levels(grid_size(n))
    }

    /// A grid with `k` levels (`k >= 1`).
    pub fn with_levels(k: u32) -> Self {
        let k = k.max(1);
        let kf = f64::from(k);
        let sin2 = |x: f64| {
            let s = libm::sin(x);
            s * s
        };
        let mut edges: Vec<f64> = (0..=k).map(|i| sin2(PI * f64::from(i) / (2.0 * kf))).collect();
        edges[0] = 0.0;
        edges[k as usize] = 1.0;
        let levels = (0..k).map(|i| sin2(PI * (f64::from(i) + 0.5) / (2.0 * kf))).collect();
        Self { edges, levels }
    }

    pub fn len(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, k: u32) -> f64 {
        self.levels[k as usize]
    }

    /// `log2(K)`: the Part I cost of one parameter index.
    pub fn index_bits(&self) -> f64 {
        libm::log2(f64::from(self.len()))
    }

    /// Maps `theta` to the bin `[edges[k], edges[k+1])` containing it;
    /// `theta = 1` falls in the top bin.
    pub fn quantize(&self, theta: f64) -> QuantizedParam {
        debug_assert!((0.0..=1.0).contains(&theta));
        let last = self.len() - 1;
        let k = (self.edges.partition_point(|&e| e <= theta) as u32)
            .saturating_sub(1)
            .min(last);
        QuantizedParam {
            k,
            r: self.levels[k as usize],
        }
    }
}
