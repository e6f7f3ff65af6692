//! Context-tree pruning.
//!
//! For each node `s` of the full depth-`D` tree the two-part cost
//! `l_s = log2 K - n_s^0 log2(1 - r_s) - n_s^1 log2 r_s` is compared with the
//! best cost of its two subtrees. Nodes shallower than `D` pay one bit of
//! natural code whichever way the decision goes:
//!
//! ```text
//! MDL_s = l_s                                   if |s| = D
//! MDL_s = 1 + min(MDL_0s + MDL_1s, l_s)         otherwise
//! ```
//!
//! Ties prune, so the canonical answer is the smaller model.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quantizer::{QuantizedParam, QuantizerGrid};
use crate::source::{State, TreeStructure};
use crate::stats::{node_slot, CountsTree};

/// `log2(1.772) + 2`: the constant used for the `O(1)` term of the
/// redundancy bound (parameter-index overhead plus coder flush).
pub const BOUND_CONSTANT: f64 = 2.825_378_603_892_931_4;

/// ML estimate `n1 / (n0 + n1)`, or ½ for an unvisited state.
pub fn ml_theta(n0: u64, n1: u64) -> f64 {
    if n0 + n1 == 0 {
        0.5
    } else {
        n1 as f64 / (n0 + n1) as f64
    }
}

/// `-n0 log2(1 - r) - n1 log2(r)`, with `0 log 0 = 0`.
pub fn data_bits(n0: u64, n1: u64, r: f64) -> f64 {
    let mut bits = 0.0;
    if n0 > 0 {
        bits -= n0 as f64 * libm::log2(1.0 - r);
    }
    if n1 > 0 {
        bits -= n1 as f64 * libm::log2(r);
    }
    bits
}

/// Two-part cost of describing a state's symbols with a quantized parameter.
pub fn leaf_cost(n0: u64, n1: u64, grid: &QuantizerGrid) -> (f64, QuantizedParam) {
    let param = grid.quantize(ml_theta(n0, n1));
    (grid.index_bits() + data_bits(n0, n1, param.r), param)
}

/// An estimated tree source: structure plus one quantized parameter per leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedModel {
    pub structure: TreeStructure,
    /// One entry per leaf, in leaf order.
    pub params: Vec<QuantizedParam>,
    /// `MDL_ε` in bits (for a full-depth model: the same sum with no pruning).
    pub mdl_root: f64,
    /// Depth of the context tree the model was fitted in.
    pub depth: u32,
    /// Number of representation levels used for the parameters.
    pub levels: u32,
    /// Length of the transmitted structure description (0 when implied).
    pub model_bits: u64,
}

impl PrunedModel {
    pub fn num_states(&self) -> usize {
        self.structure.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.params.iter().map(|p| p.k)
    }

    /// Rebuilds a model from a structure and transmitted bin indices.
    pub fn from_indices(
        structure: TreeStructure,
        indices: &[u32],
        grid: &QuantizerGrid,
        depth: u32,
        model_bits: u64,
    ) -> Result<Self> {
        if indices.len() != structure.len() {
            return Err(Error::Malformed("parameter count does not match the structure"));
        }
        let params = indices
            .iter()
            .map(|&k| {
                if k >= grid.len() {
                    Err(Error::Malformed("parameter index outside the grid"))
                } else {
                    Ok(QuantizedParam { k, r: grid.level(k) })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            structure,
            params,
            mdl_root: f64::NAN,
            depth,
            levels: grid.len(),
            model_bits,
        })
    }
}

/// Runs the pruning dynamic program over `counts`.
pub fn prune(counts: &CountsTree, grid: &QuantizerGrid) -> Result<PrunedModel> {
    counts.check_consistency()?;
    let depth = counts.depth();
    let total_nodes = (1usize << (depth + 1)) - 1;
    let mut mdl = vec![0.0f64; total_nodes];
    let mut split = vec![false; total_nodes];
    let mut params = vec![QuantizedParam { k: 0, r: 0.5 }; total_nodes];

    for len in (0..=depth).rev() {
        for v in 0..1u64 << len {
            let slot = node_slot(len, v);
            let [n0, n1] = counts.node(len, v);
            let (l_s, param) = leaf_cost(n0, n1, grid);
            params[slot] = param;
            if len == depth {
                mdl[slot] = l_s;
            } else {
                let children = mdl[node_slot(len + 1, v << 1)] + mdl[node_slot(len + 1, (v << 1) | 1)];
                let keep = children < l_s;
                split[slot] = keep;
                mdl[slot] = 1.0 + if keep { children } else { l_s };
            }
        }
    }

    let mut leaves = Vec::new();
    let mut leaf_params = Vec::new();
    let mut stack = vec![State::ROOT];
    while let Some(node) = stack.pop() {
        let slot = node_slot(node.len(), node.value());
        if split[slot] {
            stack.push(node.child(1));
            stack.push(node.child(0));
        } else {
            leaves.push(node);
            leaf_params.push(params[slot]);
        }
    }
    let structure = TreeStructure::new(leaves)?;
    let model_bits = structure.natural_encode(depth)?.len() as u64;
    Ok(PrunedModel {
        structure,
        params: leaf_params,
        mdl_root: mdl[0],
        depth,
        levels: grid.len(),
        model_bits,
    })
}

/// Fits parameters for the full depth-`D` tree without pruning. The
/// structure is implied by `D`, so no structure bits are charged.
pub fn full_depth_model(counts: &CountsTree, grid: &QuantizerGrid) -> Result<PrunedModel> {
    counts.check_consistency()?;
    let depth = counts.depth();
    let structure = TreeStructure::full(depth)?;
    let mut cost = 0.0;
    let params = counts
        .leaf_rows()
        .iter()
        .map(|&[n0, n1]| {
            let (l, p) = leaf_cost(n0, n1, grid);
            cost += l;
            p
        })
        .collect();
    Ok(PrunedModel {
        structure,
        params,
        mdl_root: cost,
        depth,
        levels: grid.len(),
        model_bits: 0,
    })
}

/// Cost of an arbitrary structure under the pruning objective: one bit per
/// node shallower than `D` plus `l_s` per leaf.
pub fn structure_cost(structure: &TreeStructure, counts: &CountsTree, grid: &QuantizerGrid) -> f64 {
    let natural = structure.natural_encode(counts.depth()).map(|c| c.len()).unwrap_or(0) as f64;
    natural
        + structure
            .leaves()
            .iter()
            .map(|s| {
                let [n0, n1] = counts.get(s);
                leaf_cost(n0, n1, grid).0
            })
            .sum::<f64>()
}

/// Analytic coding lengths and redundancy accounting, all in bits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LengthReport {
    /// Structure plus parameter description.
    pub l_phase1: f64,
    /// Raw context bits, coder budget and data bits of all blocks.
    pub l_phase2: f64,
    pub model_bits: f64,
    pub param_bits: f64,
    /// `-sum_s [n_s^1 log2 r_s + n_s^0 log2 (1 - r_s)]`.
    pub data_bits: f64,
    /// Bits spent on the uncoded first `D` symbols of every block.
    pub raw_bits: f64,
    /// ML entropy of the coded symbols with respect to the estimated structure.
    pub ml_entropy: f64,
    pub redundancy: f64,
    pub theorem1_bound: f64,
    pub states: usize,
}

/// `B [log2(N/B) + 2] + (S/2) [log2 N + c]` with `c` = [`BOUND_CONSTANT`].
pub fn redundancy_bound(n: u64, blocks: usize, states: usize) -> f64 {
    let n = (n as f64).max(1.0);
    let b = blocks.max(1) as f64;
    b * (libm::log2(n / b) + 2.0) + states as f64 / 2.0 * (libm::log2(n) + BOUND_CONSTANT)
}

/// Computes the analytic lengths of coding blocks of the given lengths with
/// `model` fitted on `counts`.
pub fn report_lengths(model: &PrunedModel, counts: &CountsTree, block_lengths: &[usize]) -> LengthReport {
    let n: u64 = block_lengths.iter().map(|&l| l as u64).sum();
    let b = block_lengths.len();
    let d = model.depth as usize;
    let k_bits = libm::log2(f64::from(model.levels.max(1)));
    let model_bits = model.model_bits as f64;
    let param_bits = model.num_states() as f64 * k_bits;
    let mut data = 0.0;
    let mut ml = 0.0;
    for (leaf, param) in model.structure.leaves().iter().zip(&model.params) {
        let [n0, n1] = counts.get(leaf);
        data += data_bits(n0, n1, param.r);
        ml += data_bits(n0, n1, ml_theta(n0, n1));
    }
    let raw: f64 = block_lengths.iter().map(|&l| l.min(d) as f64).sum();
    let l_phase1 = model_bits + param_bits;
    let l_phase2 = raw + 2.0 * b as f64 + data;
    LengthReport {
        l_phase1,
        l_phase2,
        model_bits,
        param_bits,
        data_bits: data,
        raw_bits: raw,
        ml_entropy: ml,
        redundancy: l_phase1 + l_phase2 - ml,
        theorem1_bound: redundancy_bound(n, b, model.num_states()),
        states: model.num_states(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_state_costs_only_its_index() {
        let g = QuantizerGrid::with_levels(178);
        let (l, _) = leaf_cost(0, 0, &g);
        assert_eq!(l, libm::log2(178.0));
    }

    #[test]
    fn two_level_grid_cost() {
        let g = QuantizerGrid::with_levels(2);
        let (l, p) = leaf_cost(0, 10, &g);
        assert_eq!(p.k, 1);
        assert!((l - 3.284_466_968).abs() < 1e-6, "{l}");
    }

    #[test]
    fn nonempty_state_costs_more_than_index() {
        let g = QuantizerGrid::with_levels(50);
        for (n0, n1) in [(1, 0), (0, 1), (5, 5), (100, 1)] {
            assert!(leaf_cost(n0, n1, &g).0 > g.index_bits());
        }
    }

    #[test]
    fn bound_constant_matches_definition() {
        assert!((BOUND_CONSTANT - (libm::log2(1.772) + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn depth_zero_prunes_to_root_without_natural_bits() {
        let counts = CountsTree::from_leaf_counts(0, &[[3, 4]]).unwrap();
        let g = QuantizerGrid::with_levels(4);
        let m = prune(&counts, &g).unwrap();
        assert_eq!(m.structure, TreeStructure::root());
        assert_eq!(m.model_bits, 0);
        assert_eq!(m.mdl_root, leaf_cost(3, 4, &g).0);
    }

    #[test]
    fn prune_rejects_inconsistent_counts() {
        let bad = CountsTree::from_raw_nodes(1, alloc::vec![[1, 1], [0, 0], [0, 0]]).unwrap();
        assert_eq!(
            prune(&bad, &QuantizerGrid::with_levels(2)),
            Err(Error::InconsistentCounts)
        );
    }

    #[test]
    fn root_only_report() {
        let counts = CountsTree::from_leaf_counts(3, &[[0, 0]; 8]).unwrap();
        let g = QuantizerGrid::for_length(100);
        let m = prune(&counts, &g).unwrap();
        assert_eq!(m.num_states(), 1);
        let r = report_lengths(&m, &counts, &[0]);
        assert!((r.l_phase1 - (1.0 + g.index_bits())).abs() < 1e-12);
    }
}
