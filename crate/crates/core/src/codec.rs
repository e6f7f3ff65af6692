//! The two-pass parallel codec and its container format.
//!
//! Encoding splits the input into `B` contiguous blocks. Phase I counts
//! every block independently, the coordinator aggregates the counts, prunes
//! the context tree and quantizes the parameters. Phase II codes every block
//! independently against the shared model. Each block's first `D` symbols
//! are stored raw, so blocks decode independently once the model is known.
//!
//! The naive baselines fit a separate model to every block, and the Markov
//! modes skip pruning and use the full depth-`D` tree.
//!
//! # Container layout (version 1)
//!
//! All integers are little-endian.
//!
//! ```text
//! offset  size   field
//! 0       4      magic "PTPM"
//! 4       1      version (1)
//! 5       1      mode: 0 ptp-mdl, 1 naive, 2 markov, 3 naive-markov
//! 6       1      depth D
//! 7       1      reserved (0)
//! 8       8      N, number of symbols
//! 16      4      B, number of blocks
//! 20      8*B    block lengths
//! ...            shared model section (ptp-mdl, markov)
//! ...            B block records; in naive modes each is preceded by the
//!                block's own model section
//!
//! model section:  u64 bit length, then the bits: natural code of the
//!                 structure (omitted in Markov modes) followed by the
//!                 arithmetic-coded parameter indices, in leaf order
//! block record:   ceil(D/8) bytes of raw context (first D symbols, MSB first),
//!                 u32 CRC-32 of the block symbols (one byte per symbol),
//!                 u64 payload bit length, payload bytes
//! ```
//!
//! Bit strings are packed MSB first into `ceil(bits/8)` bytes and the unused
//! bits of the final byte must be zero.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::arith::{self, CodedPayload, Decoder, Encoder, ProbabilityAssignment};
use crate::bits::{BitReader, BitWriter};
use crate::ctp::{self, LengthReport, PrunedModel, BOUND_CONSTANT};
use crate::error::{ConfigError, Error, Result};
use crate::quantizer::QuantizerGrid;
use crate::source::{TreeStructure, MAX_DEPTH};
use crate::stats::{advance_index, aggregate, context_index, count_block, BlockCounts, CountsTree};

pub const MAGIC: [u8; 4] = *b"PTPM";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Shared pruned (MDL) model.
    PtpMdl,
    /// Independent pruned model per block.
    Naive,
    /// Shared full depth-`D` model.
    Markov,
    /// Independent full depth-`D` model per block.
    NaiveMarkov,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::PtpMdl, Mode::Naive, Mode::Markov, Mode::NaiveMarkov];

    pub fn is_naive(self) -> bool {
        matches!(self, Mode::Naive | Mode::NaiveMarkov)
    }

    pub fn prunes(self) -> bool {
        matches!(self, Mode::PtpMdl | Mode::Naive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::PtpMdl => "ptp",
            Mode::Naive => "naive",
            Mode::Markov => "markov",
            Mode::NaiveMarkov => "naive-markov",
        }
    }

    fn to_byte(self) -> u8 {
        match self {
            Mode::PtpMdl => 0,
            Mode::Naive => 1,
            Mode::Markov => 2,
            Mode::NaiveMarkov => 3,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0 => Mode::PtpMdl,
            1 => Mode::Naive,
            2 => Mode::Markov,
            3 => Mode::NaiveMarkov,
            _ => return Err(Error::Malformed("unknown mode")),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ptp" | "ptp-mdl" => Ok(Mode::PtpMdl),
            "naive" | "naive-mdl" => Ok(Mode::Naive),
            "markov" | "ptp-markov" => Ok(Mode::Markov),
            "naive-markov" => Ok(Mode::NaiveMarkov),
            _ => Err(Error::Malformed("unknown mode name")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeConfig {
    pub blocks: u32,
    pub depth: u32,
    pub mode: Mode,
}

impl EncodeConfig {
    pub fn new(blocks: u32, depth: u32, mode: Mode) -> Self {
        Self { blocks, depth, mode }
    }

    /// Checks the block count and `D <= log2(floor(n / B))` (any `n` when `D = 0`).
    pub fn validate(&self, n: u64) -> Result<(), ConfigError> {
        if self.blocks == 0 {
            return Err(ConfigError::ZeroBlocks);
        }
        if self.depth > MAX_DEPTH {
            return Err(ConfigError::DepthUnsupported(self.depth));
        }
        let per_block = n / u64::from(self.blocks);
        if self.depth > 0 && per_block >> self.depth == 0 {
            return Err(ConfigError::DepthTooLarge {
                depth: self.depth,
                n,
                blocks: self.blocks,
            });
        }
        Ok(())
    }
}

/// Splits `n` symbols into `blocks` contiguous ranges of `floor(n / B)`
/// symbols, the last range taking the remainder.
pub fn partition(n: usize, blocks: usize) -> Vec<Range<usize>> {
    let base = n / blocks.max(1);
    (0..blocks)
        .map(|b| {
            let start = b * base;
            let end = if b + 1 == blocks { n } else { start + base };
            start..end
        })
        .collect()
}

/// Runs independent per-block tasks. Implementations may run tasks in any
/// order or concurrently but must return results in task order.
pub trait Executor {
    fn run<T, F>(&self, tasks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every task on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run<T, F>(&self, tasks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..tasks).map(f).collect()
    }
}

impl<E: Executor> Executor for &E {
    fn run<T, F>(&self, tasks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (**self).run(tasks, f)
    }
}

/// Generator state (as a leaf position) for every depth-`D` context index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorStateTable {
    depth: u32,
    leaf_of: Vec<u32>,
}

impl GeneratorStateTable {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaf(&self, c: u64) -> usize {
        self.leaf_of[c as usize] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.leaf_of
    }
}

pub fn build_generator_table(structure: &TreeStructure, depth: u32) -> Result<GeneratorStateTable> {
    Ok(GeneratorStateTable {
        depth,
        leaf_of: structure.generator_table(depth)?,
    })
}

/// Block partition and configuration of one encode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub cfg: EncodeConfig,
    pub n: usize,
    pub ranges: Vec<Range<usize>>,
}

impl Plan {
    pub fn new(n: usize, cfg: EncodeConfig) -> Result<Self> {
        cfg.validate(n as u64)?;
        Ok(Self {
            cfg,
            n,
            ranges: partition(n, cfg.blocks as usize),
        })
    }

    pub fn block_lengths(&self) -> Vec<usize> {
        self.ranges.iter().map(|r| r.len()).collect()
    }
}

/// Phase I, parallel part: block symbol counts from every unit.
pub fn count_blocks<E: Executor>(x: &[u8], plan: &Plan, exec: &E) -> Result<Vec<BlockCounts>> {
    let depth = plan.cfg.depth;
    exec.run(plan.ranges.len(), |b| count_block(&x[plan.ranges[b].clone()], depth))
        .into_iter()
        .collect()
}

/// Models estimated by the coordinator (one shared model, or one per block in
/// the naive modes) with their counts trees.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub models: Vec<PrunedModel>,
    pub trees: Vec<CountsTree>,
}

impl Estimate {
    pub fn model_for(&self, block: usize) -> &PrunedModel {
        if self.models.len() == 1 {
            &self.models[0]
        } else {
            &self.models[block]
        }
    }
}

fn fit(mode: Mode, tree: &CountsTree, grid: &QuantizerGrid) -> Result<PrunedModel> {
    if mode.prunes() {
        ctp::prune(tree, grid)
    } else {
        ctp::full_depth_model(tree, grid)
    }
}

/// Phase I, coordinator part: aggregate, build the grid and fit the model.
pub fn estimate<E: Executor>(plan: &Plan, counts: &[BlockCounts], exec: &E) -> Result<Estimate> {
    let mode = plan.cfg.mode;
    let depth = plan.cfg.depth;
    if mode.is_naive() {
        let fitted: Vec<Result<(PrunedModel, CountsTree)>> = exec.run(counts.len(), |b| {
            let tree = aggregate(core::slice::from_ref(&counts[b]), depth)?;
            let grid = QuantizerGrid::for_length(plan.ranges[b].len() as u64);
            Ok((fit(mode, &tree, &grid)?, tree))
        });
        let mut models = Vec::with_capacity(counts.len());
        let mut trees = Vec::with_capacity(counts.len());
        for r in fitted {
            let (m, t) = r?;
            models.push(m);
            trees.push(t);
        }
        Ok(Estimate { models, trees })
    } else {
        let tree = aggregate(counts, depth)?;
        let grid = QuantizerGrid::for_length(plan.n as u64);
        Ok(Estimate {
            models: vec![fit(mode, &tree, &grid)?],
            trees: vec![tree],
        })
    }
}

/// Integer probability per leaf, derived from `(k_s, grid)` only.
fn leaf_probabilities(model: &PrunedModel) -> Vec<ProbabilityAssignment> {
    model
        .params
        .iter()
        .map(|p| ProbabilityAssignment::from_probability(p.r))
        .collect()
}

/// A coded block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRecord {
    /// First `min(D, len)` symbols, packed MSB first.
    pub raw: Vec<u8>,
    pub crc: u32,
    pub payload: CodedPayload,
}

/// Phase II output with per-unit instrumentation.
#[derive(Debug, Clone)]
pub struct Phase2 {
    pub records: Vec<BlockRecord>,
    /// Symbols coded by each unit.
    pub visits: Vec<u64>,
}

fn code_block(
    block: &[u8],
    depth: u32,
    table: &GeneratorStateTable,
    probs: &[ProbabilityAssignment],
) -> (BlockRecord, u64) {
    let d = (depth as usize).min(block.len());
    let mut raw = BitWriter::new();
    for &s in &block[..d] {
        raw.push(s == 1);
    }
    let mut enc = Encoder::new();
    let mut visits = 0;
    if block.len() > d {
        let mut c = context_index(&block[..d]);
        for i in d..block.len() {
            let x = block[i];
            enc.encode_bit(x, probs[table.leaf(c)]);
            visits += 1;
            let leaving = if d > 0 { block[i - d] } else { 0 };
            c = advance_index(c, x, leaving, depth);
        }
    }
    let mut raw = raw.into_parts().0;
    raw.resize((depth as usize).div_ceil(8), 0);
    let record = BlockRecord {
        raw,
        crc: crc32fast::hash(block),
        payload: enc.finish(),
    };
    (record, visits)
}

/// Phase II: code every block against its model.
pub fn code_blocks<E: Executor>(x: &[u8], plan: &Plan, est: &Estimate, exec: &E) -> Result<Phase2> {
    let depth = plan.cfg.depth;
    let mut tables = Vec::with_capacity(est.models.len());
    let mut probs = Vec::with_capacity(est.models.len());
    for m in &est.models {
        tables.push(build_generator_table(&m.structure, depth)?);
        probs.push(leaf_probabilities(m));
    }
    let shared = est.models.len() == 1;
    let coded = exec.run(plan.ranges.len(), |b| {
        let m = if shared { 0 } else { b };
        code_block(&x[plan.ranges[b].clone()], depth, &tables[m], &probs[m])
    });
    let (records, visits) = coded.into_iter().unzip();
    Ok(Phase2 { records, visits })
}

/// Bits of a model section: structure (when transmitted) then indices.
fn model_section(model: &PrunedModel, mode: Mode) -> Result<CodedPayload> {
    let mut w = BitWriter::new();
    if mode.prunes() {
        for b in model.structure.natural_encode(model.depth)?.bits {
            w.push(b);
        }
    }
    let indices: Vec<u32> = model.indices().collect();
    let payload = arith::encode_uniform(&indices, model.levels)?;
    w.extend_from_reader(&payload.bytes, payload.bit_length);
    let (bytes, bit_length) = w.into_parts();
    Ok(CodedPayload { bytes, bit_length })
}

/// Parsed (or freshly built) container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub mode: Mode,
    pub depth: u32,
    pub n: u64,
    pub block_lengths: Vec<u64>,
    /// One section for shared-model modes, one per block in naive modes.
    pub model_sections: Vec<CodedPayload>,
    pub blocks: Vec<BlockRecord>,
}

impl Container {
    pub fn num_blocks(&self) -> usize {
        self.block_lengths.len()
    }

    /// Bits that carry information: model sections, raw contexts and payloads.
    pub fn coded_bits(&self) -> u64 {
        let model: u64 = self.model_sections.iter().map(|s| s.bit_length).sum();
        let blocks: u64 = self
            .blocks
            .iter()
            .zip(&self.block_lengths)
            .map(|(r, &len)| len.min(u64::from(self.depth)) + r.payload.bit_length)
            .sum();
        model + blocks
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.mode.to_byte());
        out.push(self.depth as u8);
        out.push(0);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&(self.block_lengths.len() as u32).to_le_bytes());
        for len in &self.block_lengths {
            out.extend_from_slice(&len.to_le_bytes());
        }
        let put_bits = |out: &mut Vec<u8>, p: &CodedPayload| {
            out.extend_from_slice(&p.bit_length.to_le_bytes());
            out.extend_from_slice(&p.bytes);
        };
        let naive = self.mode.is_naive();
        if !naive {
            put_bits(&mut out, &self.model_sections[0]);
        }
        for (b, rec) in self.blocks.iter().enumerate() {
            if naive {
                put_bits(&mut out, &self.model_sections[b]);
            }
            out.extend_from_slice(&rec.raw);
            out.extend_from_slice(&rec.crc.to_le_bytes());
            put_bits(&mut out, &rec.payload);
        }
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = cur.u8()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let mode = Mode::from_byte(cur.u8()?)?;
        let depth = u32::from(cur.u8()?);
        if cur.u8()? != 0 {
            return Err(Error::Malformed("reserved byte is not zero"));
        }
        let n = cur.u64()?;
        let blocks = cur.u32()?;
        let cfg = EncodeConfig::new(blocks, depth, mode);
        cfg.validate(n)
            .map_err(|_| Error::Malformed("header violates the depth/block constraints"))?;
        if u64::from(blocks) > (bytes.len() as u64) / 8 {
            return Err(Error::Truncated);
        }
        let mut block_lengths = Vec::with_capacity(blocks as usize);
        for _ in 0..blocks {
            block_lengths.push(cur.u64()?);
        }
        let n_usize = usize::try_from(n).map_err(|_| Error::Malformed("length does not fit in memory"))?;
        let expected = partition(n_usize, blocks as usize);
        if block_lengths
            .iter()
            .zip(&expected)
            .any(|(&len, r)| len != r.len() as u64)
        {
            return Err(Error::Malformed("block lengths do not match the partition of N"));
        }
        let raw_len = (depth as usize).div_ceil(8);
        let mut model_sections = Vec::new();
        if !mode.is_naive() {
            model_sections.push(cur.bits()?);
        }
        let mut records = Vec::with_capacity(blocks as usize);
        for &len in &block_lengths {
            if mode.is_naive() {
                model_sections.push(cur.bits()?);
            }
            let raw = cur.take(raw_len)?.to_vec();
            let used = len.min(u64::from(depth));
            check_padding(&raw, used)?;
            let crc = cur.u32()?;
            let payload = cur.bits()?;
            records.push(BlockRecord { raw, crc, payload });
        }
        if cur.pos != bytes.len() {
            return Err(Error::Malformed("trailing bytes after the last block"));
        }
        Ok(Self {
            mode,
            depth,
            n,
            block_lengths,
            model_sections,
            blocks: records,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).ok_or(Error::Truncated)?;
        let slice = self.bytes.get(self.pos..end).ok_or(Error::Truncated)?;
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn bits(&mut self) -> Result<CodedPayload> {
        let bit_length = self.u64()?;
        let len = usize::try_from(bit_length.div_ceil(8)).map_err(|_| Error::Truncated)?;
        let bytes = self.take(len)?.to_vec();
        check_padding(&bytes, bit_length)?;
        Ok(CodedPayload { bytes, bit_length })
    }
}

fn check_padding(bytes: &[u8], bit_length: u64) -> Result<()> {
    let full = (bit_length / 8) as usize;
    let used = (bit_length % 8) as u32;
    let mut tail = bytes.get(full..).unwrap_or(&[]);
    if used != 0 {
        if let Some((&last, rest)) = tail.split_first() {
            if last & (0xffu8 >> used) != 0 {
                return Err(Error::Malformed("non-zero padding bits"));
            }
            tail = rest;
        }
    }
    if tail.iter().any(|&b| b != 0) {
        return Err(Error::Malformed("non-zero padding bits"));
    }
    Ok(())
}

/// Work counters per unit: symbols visited in Phase I and coded in Phase II.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkCounters {
    pub phase1: Vec<u64>,
    pub phase2: Vec<u64>,
}

/// Result of an encode: the container and its accounting.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub container: Container,
    pub report: LengthReport,
    pub estimate: Estimate,
    pub work: WorkCounters,
}

impl Encoded {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.container.to_bytes()
    }

    /// Largest number of states over the fitted models.
    pub fn states(&self) -> usize {
        self.estimate
            .models
            .iter()
            .map(PrunedModel::num_states)
            .max()
            .unwrap_or(0)
    }
}

/// Combines the per-model reports into a report for the whole input.
pub fn length_report(plan: &Plan, est: &Estimate) -> LengthReport {
    let lengths = plan.block_lengths();
    if !plan.cfg.mode.is_naive() {
        return ctp::report_lengths(&est.models[0], &est.trees[0], &lengths);
    }
    let mut total = LengthReport::default();
    for (b, &len) in lengths.iter().enumerate() {
        let r = ctp::report_lengths(&est.models[b], &est.trees[b], &[len]);
        total.l_phase1 += r.l_phase1;
        total.l_phase2 += r.l_phase2;
        total.model_bits += r.model_bits;
        total.param_bits += r.param_bits;
        total.data_bits += r.data_bits;
        total.raw_bits += r.raw_bits;
        total.ml_entropy += r.ml_entropy;
        total.redundancy += r.redundancy;
        total.states = total.states.max(r.states);
    }
    total.theorem1_bound = naive_bound(plan.n as u64, lengths.len(), total.states);
    total
}

/// `B [log2(N/B) + 2 + (S_n/2)(log2 N + c)]`, the naive-parallel counterpart
/// of the redundancy bound.
pub fn naive_bound(n: u64, blocks: usize, states: usize) -> f64 {
    let nf = (n as f64).max(1.0);
    let b = blocks.max(1) as f64;
    b * (libm::log2(nf / b) + 2.0 + states as f64 / 2.0 * (libm::log2(nf) + BOUND_CONSTANT))
}

/// Puts the phases together into a container.
pub fn assemble(plan: &Plan, counts: &[BlockCounts], est: Estimate, phase2: Phase2) -> Result<Encoded> {
    let mode = plan.cfg.mode;
    let model_sections = est
        .models
        .iter()
        .map(|m| model_section(m, mode))
        .collect::<Result<Vec<_>>>()?;
    let container = Container {
        mode,
        depth: plan.cfg.depth,
        n: plan.n as u64,
        block_lengths: plan.ranges.iter().map(|r| r.len() as u64).collect(),
        model_sections,
        blocks: phase2.records,
    };
    let report = length_report(plan, &est);
    Ok(Encoded {
        container,
        report,
        estimate: est,
        work: WorkCounters {
            phase1: counts.iter().map(BlockCounts::visits).collect(),
            phase2: phase2.visits,
        },
    })
}

/// Encodes a sequence of 0/1 symbols.
pub fn encode<E: Executor>(x: &[u8], cfg: EncodeConfig, exec: &E) -> Result<Encoded> {
    if x.iter().any(|&s| s > 1) {
        return Err(Error::Malformed("input symbols must be 0 or 1"));
    }
    let plan = Plan::new(x.len(), cfg)?;
    let counts = count_blocks(x, &plan, exec)?;
    let est = estimate(&plan, &counts, exec)?;
    let phase2 = code_blocks(x, &plan, &est, exec)?;
    assemble(&plan, &counts, est, phase2)
}

/// Recovers the model transmitted in one section.
fn read_model(section: &CodedPayload, mode: Mode, depth: u32, grid: &QuantizerGrid) -> Result<PrunedModel> {
    let mut reader = BitReader::new(&section.bytes, section.bit_length);
    let (structure, model_bits) = if mode.prunes() {
        let (s, used) = TreeStructure::natural_decode(&mut reader, depth)?;
        (s, used as u64)
    } else {
        (TreeStructure::full(depth)?, 0)
    };
    let mut rest = BitWriter::new();
    while let Some(b) = reader.read() {
        rest.push(b);
    }
    let (bytes, bit_length) = rest.into_parts();
    let indices = arith::decode_uniform(&CodedPayload { bytes, bit_length }, grid.len(), structure.len())?;
    PrunedModel::from_indices(structure, &indices, grid, depth, model_bits)
}

fn decode_block(
    rec: &BlockRecord,
    len: usize,
    depth: u32,
    table: &GeneratorStateTable,
    probs: &[ProbabilityAssignment],
) -> Result<Vec<u8>> {
    let d = (depth as usize).min(len);
    let mut out = Vec::with_capacity(len);
    let mut raw = BitReader::new(&rec.raw, d as u64);
    while let Some(b) = raw.read() {
        out.push(u8::from(b));
    }
    if out.len() != d {
        return Err(Error::Truncated);
    }
    let mut dec = Decoder::from_payload(&rec.payload)?;
    let mut c = context_index(&out);
    for i in d..len {
        let x = dec.decode_bit(probs[table.leaf(c)])?;
        let leaving = if d > 0 { out[i - d] } else { 0 };
        c = advance_index(c, x, leaving, depth);
        out.push(x);
    }
    dec.finish()?;
    Ok(out)
}

/// Decodes a parsed container, one task per block.
pub fn decode<E: Executor>(c: &Container, exec: &E) -> Result<Vec<u8>> {
    let blocks = c.num_blocks();
    if c.blocks.len() != blocks || c.model_sections.len() != if c.mode.is_naive() { blocks } else { 1 } {
        return Err(Error::Malformed("section count does not match the header"));
    }
    let grid_for = |b: usize| {
        if c.mode.is_naive() {
            QuantizerGrid::for_length(c.block_lengths[b])
        } else {
            QuantizerGrid::for_length(c.n)
        }
    };
    let models: Vec<Result<(GeneratorStateTable, Vec<ProbabilityAssignment>)>> =
        exec.run(c.model_sections.len(), |m| {
            let model = read_model(&c.model_sections[m], c.mode, c.depth, &grid_for(m))?;
            Ok((
                build_generator_table(&model.structure, c.depth)?,
                leaf_probabilities(&model),
            ))
        });
    let models = models.into_iter().collect::<Result<Vec<_>>>()?;
    let shared = models.len() == 1 && !c.mode.is_naive();
    let decoded = exec.run(blocks, |b| {
        let (table, probs) = &models[if shared { 0 } else { b }];
        let out = decode_block(&c.blocks[b], c.block_lengths[b] as usize, c.depth, table, probs)?;
        if crc32fast::hash(&out) != c.blocks[b].crc {
            return Err(Error::ChecksumMismatch { block: b });
        }
        Ok(out)
    });
    let mut x = Vec::with_capacity(c.n as usize);
    for block in decoded {
        x.extend_from_slice(&block?);
    }
    Ok(x)
}

/// Parses and decodes container bytes.
pub fn decode_bytes<E: Executor>(bytes: &[u8], exec: &E) -> Result<Vec<u8>> {
    decode(&Container::parse(bytes)?, exec)
}
