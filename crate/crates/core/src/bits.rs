//! MSB-first bit strings.
//!
//! Every bit string in the container is packed most significant bit first;
//! unused bits of the final byte are zero.

use alloc::vec::Vec;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        let offset = (self.len % 8) as u8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len += 1;
    }

    pub fn push_repeated(&mut self, bit: bool, count: u64) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    pub fn extend_from_reader(&mut self, bits: &[u8], bit_len: u64) {
        let mut r = BitReader::new(bits, bit_len);
        while let Some(b) = r.read() {
            self.push(b);
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.len
    }

    pub fn into_parts(self) -> (Vec<u8>, u64) {
        (self.bytes, self.len)
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: u64,
    pos: u64,
}

impl<'a> BitReader<'a> {
    /// `len` is clamped to the number of bits actually present in `bytes`.
    pub fn new(bytes: &'a [u8], len: u64) -> Self {
        let len = len.min(bytes.len() as u64 * 8);
        Self { bytes, len, pos: 0 }
    }

    pub fn read(&mut self) -> Option<bool> {
        if self.pos >= self.len {
            return None;
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Some(bit)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.len - self.pos
    }
}

impl Iterator for BitReader<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        self.read()
    }
}

/// Packs 0/1 symbols into bytes, MSB first.
pub fn pack_symbols(symbols: &[u8]) -> Vec<u8> {
    symbols
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &s)| acc | ((s & 1) << (7 - i)))
        })
        .collect()
}

/// Unpacks bytes into 0/1 symbols, MSB first.
pub fn unpack_symbols(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for i in (0..8).rev() {
            out.push((b >> i) & 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writer_packs_msb_first() {
        let mut w = BitWriter::new();
        for b in [true, false, true, true, false, false, false, false, true] {
            w.push(b);
        }
        let (bytes, len) = w.into_parts();
        assert_eq!(len, 9);
        assert_eq!(bytes, [0b1011_0000, 0b1000_0000]);
    }

    #[test]
    fn reader_stops_at_len() {
        let mut r = BitReader::new(&[0xff], 3);
        assert_eq!(r.read(), Some(true));
        assert_eq!(r.read(), Some(true));
        assert_eq!(r.read(), Some(true));
        assert_eq!(r.read(), None);
        assert_eq!(r.position(), 3);
    }

    #[test]
    fn reader_clamps_overlong_len() {
        let r = BitReader::new(&[0], 100);
        assert_eq!(r.remaining(), 8);
    }

    #[test]
    fn symbols_pack_and_unpack() {
        let bytes = [0xa5, 0x00, 0xff];
        let syms = unpack_symbols(&bytes);
        assert_eq!(&syms[..8], &[1, 0, 1, 0, 0, 1, 0, 1]);
        assert_eq!(pack_symbols(&syms), bytes);
        assert_eq!(pack_symbols(&[1, 1, 1]), [0xe0]);
    }
}
