//! Integer arithmetic coder.
//!
//! 32-bit `low`/`high` registers with deferred (pending) carry bits.
//! Probabilities live on a 30-bit integer scale, so every subinterval is
//! non-empty while the range stays above a quarter of the register. The
//! stream ends with a two-bit flush; the decoder is told how many symbols to
//! read and pads past the end with zeros.
//!
//! An intact payload always leaves the decoder exactly `PRECISION - 2` bits
//! past its end, which is checked by [`Decoder::finish`].
//!
//! Length contract: for `n` binary symbols the payload exceeds their
//! information content under the scaled probabilities by between 0 and
//! `2 + n 2^-30 log2(e) + 1` bits.

use alloc::vec::Vec;

use crate::bits::{BitReader, BitWriter};
use crate::error::{ConfigError, Error, Result};

pub const PRECISION: u32 = 32;
/// Bits of the probability scale (`PRECISION - 2`).
pub const PROB_BITS: u32 = PRECISION - 2;
pub const PROB_ONE: u32 = 1 << PROB_BITS;

const TOP: u64 = (1 << PRECISION) - 1;
const HALF: u64 = 1 << (PRECISION - 1);
const QUARTER: u64 = 1 << (PRECISION - 2);

/// Probability of a `1` on the `2^30` integer scale, never 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProbabilityAssignment(u32);

impl ProbabilityAssignment {
    pub const HALF: Self = Self(PROB_ONE / 2);

    /// Clamps `p1` into `[1, 2^30 - 1]`.
    pub fn from_scaled(p1: u32) -> Self {
        Self(p1.clamp(1, PROB_ONE - 1))
    }

    /// Rounds `p1 * 2^30` half-up, then clamps.
    pub fn from_probability(p1: f64) -> Self {
        let scaled = libm::floor(p1 * f64::from(PROB_ONE) + 0.5);
        Self::from_scaled(scaled.clamp(0.0, f64::from(PROB_ONE)) as u32)
    }

    pub fn scaled(self) -> u32 {
        self.0
    }

    pub fn p1(self) -> f64 {
        f64::from(self.0) / f64::from(PROB_ONE)
    }

    /// Information content of `symbol` under this assignment.
    pub fn bits(self, symbol: u8) -> f64 {
        let p = if symbol == 1 { self.0 } else { PROB_ONE - self.0 };
        f64::from(PROB_BITS) - libm::log2(f64::from(p))
    }

    /// Cumulative interval of `symbol`: `0` takes the bottom of the scale.
    fn interval(self, symbol: u8) -> (u64, u64) {
        let split = u64::from(PROB_ONE - self.0);
        if symbol == 0 {
            (0, split)
        } else {
            (split, u64::from(PROB_ONE))
        }
    }
}

/// Arithmetic-coded bits, MSB first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodedPayload {
    pub bytes: Vec<u8>,
    pub bit_length: u64,
}

#[derive(Debug, Clone)]
pub struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            high: TOP,
            pending: 0,
            out: BitWriter::new(),
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        self.out.push_repeated(!bit, self.pending);
        self.pending = 0;
    }

    fn narrow(&mut self, cum_lo: u64, cum_hi: u64, total: u64) {
        let range = self.high - self.low + 1;
        self.high = self.low + range * cum_hi / total - 1;
        self.low += range * cum_lo / total;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < 3 * QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    pub fn encode_bit(&mut self, symbol: u8, p: ProbabilityAssignment) {
        let (lo, hi) = p.interval(symbol);
        self.narrow(lo, hi, u64::from(PROB_ONE));
    }

    /// Codes `value` uniformly over `0..alphabet` (`1 <= alphabet <= 2^30`).
    pub fn encode_uniform(&mut self, value: u32, alphabet: u32) -> Result<()> {
        check_alphabet(alphabet)?;
        if value >= alphabet {
            return Err(ConfigError::ValueOutOfRange { value, alphabet }.into());
        }
        self.narrow(u64::from(value), u64::from(value) + 1, u64::from(alphabet));
        Ok(())
    }

    /// Bits emitted so far, not counting deferred ones.
    pub fn bits_written(&self) -> u64 {
        self.out.bit_len()
    }

    pub fn finish(mut self) -> CodedPayload {
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        let (bytes, bit_length) = self.out.into_parts();
        CodedPayload { bytes, bit_length }
    }
}

fn check_alphabet(alphabet: u32) -> Result<()> {
    if alphabet == 0 || alphabet > PROB_ONE {
        return Err(ConfigError::ValueOutOfRange {
            value: alphabet,
            alphabet: PROB_ONE,
        }
        .into());
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    reader: BitReader<'a>,
    phantom: u64,
}

impl<'a> Decoder<'a> {
    pub fn new(bytes: &'a [u8], bit_length: u64) -> Result<Self> {
        if bit_length > bytes.len() as u64 * 8 {
            return Err(Error::Truncated);
        }
        let mut d = Self {
            low: 0,
            high: TOP,
            value: 0,
            reader: BitReader::new(bytes, bit_length),
            phantom: 0,
        };
        for _ in 0..PRECISION {
            let b = d.next_bit()?;
            d.value = (d.value << 1) | b;
        }
        Ok(d)
    }

    pub fn from_payload(payload: &'a CodedPayload) -> Result<Self> {
        Self::new(&payload.bytes, payload.bit_length)
    }

    fn next_bit(&mut self) -> Result<u64> {
        match self.reader.read() {
            Some(b) => Ok(u64::from(b)),
            None => {
                self.phantom += 1;
                if self.phantom > u64::from(PRECISION - 2) {
                    Err(Error::Truncated)
                } else {
                    Ok(0)
                }
            }
        }
    }

    fn target(&self, total: u64) -> u64 {
        let range = self.high - self.low + 1;
        ((self.value - self.low + 1) * total - 1) / range
    }

    fn narrow(&mut self, cum_lo: u64, cum_hi: u64, total: u64) -> Result<()> {
        let range = self.high - self.low + 1;
        self.high = self.low + range * cum_hi / total - 1;
        self.low += range * cum_lo / total;
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.value -= HALF;
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < 3 * QUARTER {
                self.value -= QUARTER;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            let b = self.next_bit()?;
            self.value = (self.value << 1) | b;
        }
        Ok(())
    }

    pub fn decode_bit(&mut self, p: ProbabilityAssignment) -> Result<u8> {
        let t = self.target(u64::from(PROB_ONE));
        let symbol = u8::from(t >= u64::from(PROB_ONE - p.0));
        let (lo, hi) = p.interval(symbol);
        self.narrow(lo, hi, u64::from(PROB_ONE))?;
        Ok(symbol)
    }

    pub fn decode_uniform(&mut self, alphabet: u32) -> Result<u32> {
        check_alphabet(alphabet)?;
        let v = self.target(u64::from(alphabet));
        if v >= u64::from(alphabet) {
            return Err(Error::Malformed("arithmetic decoder left its interval"));
        }
        self.narrow(v, v + 1, u64::from(alphabet))?;
        Ok(v as u32)
    }

    /// Verifies that the payload was consumed exactly.
    pub fn finish(self) -> Result<()> {
        match self.phantom.cmp(&u64::from(PRECISION - 2)) {
            core::cmp::Ordering::Equal => Ok(()),
            core::cmp::Ordering::Greater => Err(Error::Truncated),
            core::cmp::Ordering::Less => Err(Error::Malformed("trailing bits after arithmetic payload")),
        }
    }
}

/// Codes `symbols` with one probability assignment per symbol.
pub fn encode_binary(symbols: &[u8], probs: &[ProbabilityAssignment]) -> CodedPayload {
    assert_eq!(symbols.len(), probs.len());
    let mut enc = Encoder::new();
    for (&x, &p) in symbols.iter().zip(probs) {
        enc.encode_bit(x, p);
    }
    enc.finish()
}

/// Decodes `count` symbols; `probs(i)` must reproduce the encoder's assignment
/// for symbol `i` given the symbols decoded so far.
pub fn decode_binary<F>(payload: &CodedPayload, count: usize, mut probs: F) -> Result<Vec<u8>>
where
    F: FnMut(usize, &[u8]) -> ProbabilityAssignment,
{
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let mut dec = Decoder::from_payload(payload)?;
    for i in 0..count {
        let p = probs(i, &out);
        out.push(dec.decode_bit(p)?);
    }
    dec.finish()?;
    Ok(out)
}

pub fn encode_uniform(values: &[u32], alphabet: u32) -> Result<CodedPayload> {
    let mut enc = Encoder::new();
    for &v in values {
        enc.encode_uniform(v, alphabet)?;
    }
    Ok(enc.finish())
}

pub fn decode_uniform(payload: &CodedPayload, alphabet: u32, count: usize) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let mut dec = Decoder::from_payload(payload)?;
    for _ in 0..count {
        out.push(dec.decode_uniform(alphabet)?);
    }
    dec.finish()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn empty_stream_is_flush_only() {
        let p = encode_binary(&[], &[]);
        assert!(p.bit_length <= 2);
        assert_eq!(decode_binary(&p, 0, |_, _| ProbabilityAssignment::HALF).unwrap(), []);
    }

    #[test]
    fn fair_bits_are_incompressible() {
        let symbols: Vec<u8> = (0..1000u32).map(|i| ((i * 7919) >> 3 & 1) as u8).collect();
        let probs = vec![ProbabilityAssignment::HALF; symbols.len()];
        let p = encode_binary(&symbols, &probs);
        assert!(p.bit_length >= 1000 && p.bit_length <= 1002, "{}", p.bit_length);
        let back = decode_binary(&p, symbols.len(), |i, _| probs[i]).unwrap();
        assert_eq!(back, symbols);
    }

    #[test]
    fn uniform_binary_matches_fair_bits() {
        let bits = [1u8, 0, 0, 1, 1, 1, 0];
        let a = encode_binary(&bits, &[ProbabilityAssignment::HALF; 7]);
        let vals: Vec<u32> = bits.iter().map(|&b| u32::from(b)).collect();
        let b = encode_uniform(&vals, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_indices_share_fractional_bits() {
        let p = encode_uniform(&[3, 177, 0, 90], 178).unwrap();
        let bound = 4.0 * libm::log2(178.0) + 2.0 + 1.0;
        assert!((p.bit_length as f64) <= bound, "{}", p.bit_length);
        assert_eq!(decode_uniform(&p, 178, 4).unwrap(), [3, 177, 0, 90]);
    }

    #[test]
    fn uniform_rejects_out_of_range() {
        assert!(encode_uniform(&[5], 5).is_err());
        assert!(encode_uniform(&[0], 0).is_err());
    }

    #[test]
    fn probability_scaling_rounds_and_clamps() {
        assert_eq!(ProbabilityAssignment::from_probability(0.0).scaled(), 1);
        assert_eq!(ProbabilityAssignment::from_probability(1.0).scaled(), PROB_ONE - 1);
        assert_eq!(
            ProbabilityAssignment::from_probability(0.5),
            ProbabilityAssignment::HALF
        );
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let symbols: Vec<u8> = (0..200u32).map(|i| (i % 3 == 0) as u8).collect();
        let probs = vec![ProbabilityAssignment::from_probability(0.3); symbols.len()];
        let mut p = encode_binary(&symbols, &probs);
        p.bit_length -= 1;
        assert!(decode_binary(&p, symbols.len(), |i, _| probs[i]).is_err());
        p.bit_length = p.bytes.len() as u64 * 8 + 1;
        assert_eq!(decode_binary(&p, symbols.len(), |i, _| probs[i]), Err(Error::Truncated));
    }
}
