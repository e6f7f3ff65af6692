//! Binary context tree sources.
//!
//! A state is a binary string written oldest symbol first, so a state `s`
//! generates `x_i` exactly when `x_{i-|s|} .. x_{i-1}` spells `s`. The tree
//! is entered at the root and the branch taken at depth `d` is `x_{i-d-1}`:
//! the children of `s` are `0s` and `1s`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::stats::{advance_index, context_index};

/// Largest supported maximum context depth. Dense per-context tables have
/// `2^depth` rows.
pub const MAX_DEPTH: u32 = 30;

/// A node of the binary context tree.
///
/// `value` holds the string as `sum_j 2^j * s[j]` with `s[0]` the oldest
/// symbol. For a depth-`D` context this is exactly its context index, and a
/// state of length `L` is a suffix of a depth-`D` context `c` iff
/// `c >> (D - L) == value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    len: u8,
    value: u64,
}

impl State {
    pub const ROOT: State = State { len: 0, value: 0 };

    pub fn new(len: u32, value: u64) -> Self {
        debug_assert!(len <= 63 && (len == 0 || value >> len == 0));
        Self { len: len as u8, value }
    }

    /// Builds a state from symbols in temporal order (oldest first).
    pub fn from_symbols(symbols: &[u8]) -> Self {
        let value = symbols
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &s)| acc | (u64::from(s & 1) << j));
        Self::new(symbols.len() as u32, value)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        u32::from(self.len)
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Symbol `j` in temporal order (0 = oldest).
    pub fn symbol(&self, j: u32) -> u8 {
        ((self.value >> j) & 1) as u8
    }

    /// The child `bit s`: one symbol further into the past.
    pub fn child(&self, bit: u8) -> Self {
        Self::new(self.len() + 1, (self.value << 1) | u64::from(bit & 1))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return f.write_str("ε");
        }
        for j in 0..self.len() {
            f.write_str(if self.symbol(j) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for State {
    type Err = Error;

    /// Accepts `""` or `"ε"` for the root, otherwise a string of `0`/`1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(State::ROOT);
        }
        if s.len() > MAX_DEPTH as usize {
            return Err(Error::InvalidStructure("state longer than the maximum depth"));
        }
        let mut symbols = Vec::with_capacity(s.len());
        for ch in s.chars() {
            symbols.push(match ch {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::InvalidStructure("state strings may only contain 0 and 1")),
            });
        }
        Ok(State::from_symbols(&symbols))
    }
}

/// A complete and proper set of states.
///
/// Leaves are kept in depth-first order, 0-branch first; that order is used
/// everywhere a per-leaf list is serialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStructure {
    leaves: Vec<State>,
    members: BTreeSet<State>,
    depth: u32,
}

impl TreeStructure {
    pub fn new(leaves: impl IntoIterator<Item = State>) -> Result<Self> {
        let members: BTreeSet<State> = leaves.into_iter().collect();
        if members.is_empty() {
            return Err(Error::InvalidStructure("no states"));
        }
        let depth = members.iter().map(State::len).max().unwrap_or(0);
        if depth > MAX_DEPTH {
            return Err(Error::InvalidStructure("depth exceeds the supported maximum"));
        }
        let mut ordered = Vec::with_capacity(members.len());
        collect_leaves(&members, State::ROOT, depth, &mut ordered)?;
        if ordered.len() != members.len() {
            return Err(Error::InvalidStructure("a state is a suffix of another state"));
        }
        Ok(Self {
            leaves: ordered,
            members,
            depth,
        })
    }

    /// The memoryless structure `{ε}`.
    pub fn root() -> Self {
        Self::new([State::ROOT]).unwrap()
    }

    /// All `2^depth` contexts of length `depth`.
    pub fn full(depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::InvalidStructure("depth exceeds the supported maximum"));
        }
        Self::new((0..1u64 << depth).map(|c| State::new(depth, c)))
    }

    pub fn leaves(&self) -> &[State] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn contains(&self, state: &State) -> bool {
        self.members.contains(state)
    }

    /// Position of `state` in depth-first leaf order.
    pub fn leaf_index(&self, state: &State) -> Option<usize> {
        self.leaves.iter().position(|s| s == state)
    }

    /// The generator state for the next symbol given the symbols so far
    /// (oldest first). `past` must hold at least `depth()` symbols.
    pub fn lookup_state(&self, past: &[u8]) -> State {
        assert!(past.len() >= self.depth as usize, "past shorter than the tree depth");
        let mut node = State::ROOT;
        let mut recent = past.iter().rev();
        while !self.members.contains(&node) {
            node = node.child(*recent.next().expect("complete tree"));
        }
        node
    }

    /// Maps every depth-`depth` context index to the position (in leaf order)
    /// of its generator state. Each leaf of length `L` covers the contiguous
    /// index range `[v << (depth - L), (v + 1) << (depth - L))`.
    pub fn generator_table(&self, depth: u32) -> Result<Vec<u32>> {
        if depth < self.depth {
            return Err(Error::InvalidStructure("table depth below the tree depth"));
        }
        if depth > MAX_DEPTH {
            return Err(Error::InvalidStructure("depth exceeds the supported maximum"));
        }
        let mut table = alloc::vec![0u32; 1usize << depth];
        for (idx, leaf) in self.leaves.iter().enumerate() {
            let shift = depth - leaf.len();
            let lo = (leaf.value() as usize) << shift;
            let hi = (leaf.value() as usize + 1) << shift;
            table[lo..hi].fill(idx as u32);
        }
        Ok(table)
    }

    /// Natural code of the structure relative to the full depth-`depth` tree:
    /// pre-order, 0-branch first, `1` for a split node and `0` for a leaf,
    /// with nothing emitted for nodes at depth `depth`.
    pub fn natural_encode(&self, depth: u32) -> Result<NaturalCode> {
        if depth < self.depth {
            return Err(Error::InvalidStructure("natural code depth below the tree depth"));
        }
        let mut bits = Vec::new();
        self.natural_walk(State::ROOT, depth, &mut bits);
        Ok(NaturalCode { bits })
    }

    fn natural_walk(&self, node: State, depth: u32, out: &mut Vec<bool>) {
        if node.len() == depth {
            return;
        }
        if self.members.contains(&node) {
            out.push(false);
        } else {
            out.push(true);
            self.natural_walk(node.child(0), depth, out);
            self.natural_walk(node.child(1), depth, out);
        }
    }

    /// Inverse of [`natural_encode`](Self::natural_encode), reading from any
    /// bit source. Returns the structure and the number of bits consumed.
    pub fn natural_decode<I: Iterator<Item = bool>>(bits: &mut I, depth: u32) -> Result<(Self, usize)> {
        if depth > MAX_DEPTH {
            return Err(Error::Malformed("natural code depth exceeds the supported maximum"));
        }
        let mut leaves = Vec::new();
        let mut consumed = 0usize;
        decode_walk(bits, State::ROOT, depth, &mut leaves, &mut consumed)?;
        let structure = Self::new(leaves).map_err(|_| Error::Malformed("natural code"))?;
        Ok((structure, consumed))
    }
}

fn collect_leaves(members: &BTreeSet<State>, node: State, depth: u32, out: &mut Vec<State>) -> Result<()> {
    if members.contains(&node) {
        out.push(node);
        return Ok(());
    }
    if node.len() >= depth {
        return Err(Error::InvalidStructure("state set is not complete"));
    }
    collect_leaves(members, node.child(0), depth, out)?;
    collect_leaves(members, node.child(1), depth, out)
}

fn decode_walk<I: Iterator<Item = bool>>(
    bits: &mut I,
    node: State,
    depth: u32,
    leaves: &mut Vec<State>,
    consumed: &mut usize,
) -> Result<()> {
    if node.len() == depth {
        leaves.push(node);
        return Ok(());
    }
    let split = bits.next().ok_or(Error::Truncated)?;
    *consumed += 1;
    if split {
        decode_walk(bits, node.child(0), depth, leaves, consumed)?;
        decode_walk(bits, node.child(1), depth, leaves, consumed)
    } else {
        leaves.push(node);
        Ok(())
    }
}

/// Natural-code description of a tree structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalCode {
    pub bits: Vec<bool>,
}

impl NaturalCode {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Decodes the structure; see [`TreeStructure::natural_decode`].
    pub fn decode(&self, depth: u32) -> Result<(TreeStructure, usize)> {
        TreeStructure::natural_decode(&mut self.bits.iter().copied(), depth)
    }
}

/// A tree structure with a conditional probability `p(1|s)` per state.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSource {
    structure: TreeStructure,
    theta: Vec<f64>,
}

impl TreeSource {
    pub fn new(pairs: impl IntoIterator<Item = (State, f64)>) -> Result<Self> {
        let pairs: Vec<(State, f64)> = pairs.into_iter().collect();
        if pairs.iter().any(|(_, p)| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidStructure("probabilities must lie in [0, 1]"));
        }
        let structure = TreeStructure::new(pairs.iter().map(|(s, _)| *s))?;
        if structure.len() != pairs.len() {
            return Err(Error::InvalidStructure("duplicate state"));
        }
        let theta = structure
            .leaves()
            .iter()
            .map(|leaf| pairs.iter().find(|(s, _)| s == leaf).unwrap().1)
            .collect();
        Ok(Self { structure, theta })
    }

    /// The four-state example source `{0, 11, 001, 101}`.
    pub fn example_four_state() -> Self {
        let s = |x: &str| x.parse::<State>().unwrap();
        Self::new([(s("0"), 0.03), (s("11"), 0.98), (s("001"), 0.95), (s("101"), 0.97)]).unwrap()
    }

    pub fn structure(&self) -> &TreeStructure {
        &self.structure
    }

    /// `p(1|s)` per leaf, in leaf order.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn p1(&self, state: &State) -> Option<f64> {
        self.structure.leaf_index(state).map(|i| self.theta[i])
    }

    /// Draws `n` symbols. `initial_context` supplies the `depth()` symbols
    /// preceding `x_1` (oldest first); output is fully determined by `seed`.
    pub fn generate(&self, n: usize, seed: u64, initial_context: &[u8]) -> Result<Vec<u8>> {
        let depth = self.structure.depth();
        if initial_context.len() != depth as usize {
            return Err(Error::InvalidStructure("initial context length must equal the depth"));
        }
        let table = self.structure.generator_table(depth)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ctx = context_index(initial_context);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let p = self.theta[table[ctx as usize] as usize];
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let x = u8::from(u < p);
            ctx = advance_index(ctx, x, (ctx & 1) as u8, depth);
            out.push(x);
        }
        Ok(out)
    }

    /// [`generate`](Self::generate) with an all-zeros initial context.
    pub fn generate_default(&self, n: usize, seed: u64) -> Vec<u8> {
        let zeros = alloc::vec![0u8; self.structure.depth() as usize];
        self.generate(n, seed, &zeros).expect("context length matches depth")
    }
}
