//! MSB-first bit buffers shared by every block codec.

use crate::error::{Error, Result};

/// Growable bit sequence. Bits are packed most-significant-bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Number of valid bits.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes; the final byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push_bit(&mut self, bit: bool) {
        let offset = self.len % 8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> offset;
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, high bit first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for shift in (0..width).rev() {
            self.push_bit((value >> shift) & 1 == 1);
        }
    }

    pub fn push_u32(&mut self, value: u32) {
        self.push_bits(u64::from(value), 32);
    }

    /// Appends zero bits until `len` bits are stored.
    pub fn pad_to(&mut self, len: usize) {
        while self.len < len {
            self.push_bit(false);
        }
    }

    pub fn extend(&mut self, other: &BitBuf) {
        let mut reader = other.reader();
        while let Ok(bit) = reader.read_bit() {
            self.push_bit(bit);
        }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(&self.bytes, self.len)
    }
}

/// Cursor over an MSB-first bit sequence.
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], len: usize) -> Self {
        debug_assert!(len <= bytes.len() * 8);
        Self { bytes, len, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.len {
            return Err(Error::Corrupt("payload exhausted".into()));
        }
        let bit = (self.bytes[self.pos / 8] >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        if self.remaining() < width as usize {
            return Err(Error::Corrupt("payload exhausted".into()));
        }
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | u64::from(self.read_bit()?);
        }
        Ok(value)
    }

    pub fn read_u32(&mut self) -> Result<u32> {
        Ok(self.read_bits(32)? as u32)
    }

    /// Skips to the next byte boundary.
    pub fn align(&mut self) {
        self.pos = self.pos.div_ceil(8) * 8;
        self.pos = self.pos.min(self.len);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_packing() {
        let mut buf = BitBuf::new();
        buf.push_bits(0b101, 3);
        buf.push_bits(0b11111, 5);
        buf.push_bit(true);
        assert_eq!(buf.len(), 9);
        assert_eq!(buf.as_bytes(), &[0b1011_1111, 0b1000_0000]);
    }

    #[test]
    fn read_back_and_exhaust() {
        let mut buf = BitBuf::new();
        buf.push_bits(0xABCD, 16);
        buf.push_u32(0xDEAD_BEEF);
        let mut r = buf.reader();
        assert_eq!(r.read_bits(16).unwrap(), 0xABCD);
        assert_eq!(r.read_u32().unwrap(), 0xDEAD_BEEF);
        assert!(r.read_bit().is_err());
    }

    #[test]
    fn zero_width_is_noop() {
        let mut buf = BitBuf::new();
        buf.push_bits(7, 0);
        assert!(buf.is_empty());
        assert_eq!(buf.reader().read_bits(0).unwrap(), 0);
    }
}
