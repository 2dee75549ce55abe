//! Common Colors Dictionary (color -> code) and its inverse.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Frequency-ranked palette. Index 0 is the most frequent color.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ccd {
    colors: Vec<u32>,
    index: HashMap<u32, u16>,
}

/// Largest power of two `<= n`, or 0.
pub fn pow2_floor(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - n.leading_zeros())
    }
}

impl Ccd {
    /// Takes the top `size` ranked colors. When fewer are available the
    /// palette shrinks to the largest power of two that fits; an empty
    /// palette disables compression.
    pub fn build(ranked: &[(u32, u64)], size: usize) -> Result<Self> {
        if size != 0 && !size.is_power_of_two() {
            return Err(Error::Config(format!(
                "CCD size {size} is not a power of two"
            )));
        }
        let size = size.min(pow2_floor(ranked.len()));
        Ok(Self::from_colors(
            ranked[..size].iter().map(|&(c, _)| c).collect(),
        ))
    }

    /// Wraps an explicit color list. The list length need not be a power of
    /// two (container decoding, Huffman alphabets).
    pub fn from_colors(colors: Vec<u32>) -> Self {
        let index = colors
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u16))
            .collect();
        Self { colors, index }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Bits per code for fixed-width coding: log2(size).
    pub fn code_bits(&self) -> u32 {
        if self.colors.len() <= 1 {
            0
        } else {
            (self.colors.len() as u32)
                .next_power_of_two()
                .trailing_zeros()
        }
    }

    pub fn encode(&self, color: u32) -> Option<u16> {
        self.index.get(&color).copied()
    }

    pub fn rccd(&self) -> Rccd {
        Rccd(self.colors.clone())
    }
}

/// Direct-mapped code -> color table attached to a compressed frame.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rccd(Vec<u32>);

impl Rccd {
    pub fn new(colors: Vec<u32>) -> Self {
        Self(colors)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colors(&self) -> &[u32] {
        &self.0
    }

    pub fn decode(&self, index: u64) -> Result<u32> {
        self.0.get(index as usize).copied().ok_or_else(|| {
            Error::Corrupt(format!(
                "code {index} outside a {}-entry rCCD",
                self.0.len()
            ))
        })
    }

    /// Serialized size: 16-bit count plus one 32-bit color per entry.
    pub fn serialized_len(&self) -> usize {
        2 + 4 * self.0.len()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.0.len() as u16).to_le_bytes());
        for c in &self.0 {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }

    /// Parses a serialized rCCD, returning it and the bytes consumed.
    pub fn read_from(bytes: &[u8]) -> Result<(Self, usize)> {
        let short = || Error::Corrupt("truncated rCCD".into());
        let count =
            u16::from_le_bytes(bytes.get(..2).ok_or_else(short)?.try_into().unwrap()) as usize;
        let body = bytes.get(2..2 + 4 * count).ok_or_else(short)?;
        let colors = body
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((Self(colors), 2 + 4 * count))
    }
}
