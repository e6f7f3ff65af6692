//! Per-block context statistics and the aggregated counts tree.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ConfigError, Error, Result};
use crate::source::{State, MAX_DEPTH};

/// Binary number spelled by a depth-`D` context, oldest symbol in the least
/// significant bit: `c = sum_j 2^j * x_{i-D+j}`.
pub type ContextIndex = u64;

/// Index of `context` (oldest symbol first); its length is the depth.
pub fn context_index(context: &[u8]) -> ContextIndex {
    context
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &x)| acc | (u64::from(x & 1) << j))
}

/// Slides the context one symbol forward: `entering` becomes the most recent
/// symbol and `leaving` (the oldest, i.e. the low bit of `c`) drops out.
/// Integer form of `c/2 + 2^(D-1) x_i - x_{i-D}/2`.
#[inline]
pub fn advance_index(c: ContextIndex, entering: u8, leaving: u8, depth: u32) -> ContextIndex {
    if depth == 0 {
        return 0;
    }
    debug_assert_eq!(c & 1, u64::from(leaving));
    ((c - u64::from(leaving)) >> 1) | (u64::from(entering) << (depth - 1))
}

/// Symbol counts `n_s^a(b)` for every depth-`D` context of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCounts {
    depth: u32,
    block_len: usize,
    counts: Vec<[u64; 2]>,
    visits: u64,
}

impl BlockCounts {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Row `c` holds `[n^0, n^1]` for the context with index `c`.
    pub fn table(&self) -> &[[u64; 2]] {
        &self.counts
    }

    pub fn get(&self, c: ContextIndex) -> [u64; 2] {
        self.counts[c as usize]
    }

    /// Symbols visited by the counting pass.
    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|r| r[0] + r[1]).sum()
    }
}

/// Counts every symbol of `block` after the first `depth`, keyed by its
/// preceding `depth` symbols within the block. A block shorter than the
/// depth contributes nothing.
pub fn count_block(block: &[u8], depth: u32) -> Result<BlockCounts> {
    if depth > MAX_DEPTH {
        return Err(ConfigError::DepthUnsupported(depth).into());
    }
    let d = depth as usize;
    let mut counts = vec![[0u64; 2]; 1usize << depth];
    let mut visits = 0u64;
    if block.len() > d {
        let mut c = context_index(&block[..d]);
        for i in d..block.len() {
            let x = block[i];
            counts[c as usize][x as usize] += 1;
            visits += 1;
            let leaving = if d > 0 { block[i - d] } else { 0 };
            c = advance_index(c, x, leaving, depth);
        }
    }
    Ok(BlockCounts {
        depth,
        block_len: block.len(),
        counts,
        visits,
    })
}

/// Counts `n_s^0, n_s^1` for every node of the full depth-`D` tree.
///
/// Nodes are stored level by level: the node with length `L` and value `v`
/// sits at `2^L - 1 + v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsTree {
    depth: u32,
    nodes: Vec<[u64; 2]>,
}

#[inline]
pub(crate) fn node_slot(len: u32, value: u64) -> usize {
    ((1usize << len) - 1) + value as usize
}

impl CountsTree {
    /// Builds the tree from the `2^depth` leaf rows, filling internal nodes
    /// bottom-up with `n_s = n_{0s} + n_{1s}`.
    pub fn from_leaf_counts(depth: u32, leaves: &[[u64; 2]]) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(ConfigError::DepthUnsupported(depth).into());
        }
        if leaves.len() != 1usize << depth {
            return Err(Error::InconsistentCounts);
        }
        let mut nodes = vec![[0u64; 2]; (1usize << (depth + 1)) - 1];
        let base = node_slot(depth, 0);
        nodes[base..].copy_from_slice(leaves);
        for len in (0..depth).rev() {
            for v in 0..1u64 << len {
                let a = nodes[node_slot(len + 1, v << 1)];
                let b = nodes[node_slot(len + 1, (v << 1) | 1)];
                nodes[node_slot(len, v)] = [a[0] + b[0], a[1] + b[1]];
            }
        }
        Ok(Self { depth, nodes })
    }

    /// Builds a tree from arbitrary per-node rows without filling anything in.
    /// Used to feed deliberately inconsistent trees to consumers.
    pub fn from_raw_nodes(depth: u32, nodes: Vec<[u64; 2]>) -> Result<Self> {
        if depth > MAX_DEPTH || nodes.len() != (1usize << (depth + 1)) - 1 {
            return Err(Error::InconsistentCounts);
        }
        Ok(Self { depth, nodes })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn get(&self, state: &State) -> [u64; 2] {
        assert!(state.len() <= self.depth);
        self.nodes[node_slot(state.len(), state.value())]
    }

    pub(crate) fn node(&self, len: u32, value: u64) -> [u64; 2] {
        self.nodes[node_slot(len, value)]
    }

    pub fn root(&self) -> [u64; 2] {
        self.nodes[0]
    }

    /// The depth-`D` rows in context-index order.
    pub fn leaf_rows(&self) -> &[[u64; 2]] {
        &self.nodes[node_slot(self.depth, 0)..]
    }

    /// Checks the child-sum rule at every internal node.
    pub fn check_consistency(&self) -> Result<()> {
        for len in 0..self.depth {
            for v in 0..1u64 << len {
                let p = self.node(len, v);
                let a = self.node(len + 1, v << 1);
                let b = self.node(len + 1, (v << 1) | 1);
                if p[0] != a[0] + b[0] || p[1] != a[1] + b[1] {
                    return Err(Error::InconsistentCounts);
                }
            }
        }
        Ok(())
    }
}

/// Sums block tables elementwise and derives every internal node.
/// The result does not depend on the order of `blocks`.
pub fn aggregate(blocks: &[BlockCounts], depth: u32) -> Result<CountsTree> {
    if depth > MAX_DEPTH {
        return Err(ConfigError::DepthUnsupported(depth).into());
    }
    let mut leaves = vec![[0u64; 2]; 1usize << depth];
    for block in blocks {
        if block.depth != depth {
            return Err(ConfigError::DepthMismatch {
                expected: depth,
                found: block.depth,
            }
            .into());
        }
        for (acc, row) in leaves.iter_mut().zip(&block.counts) {
            acc[0] += row[0];
            acc[1] += row[1];
        }
    }
    CountsTree::from_leaf_counts(depth, &leaves)
}
