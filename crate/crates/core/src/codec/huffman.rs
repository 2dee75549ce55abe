//! Huffman-coded palette (HuffDCP).
//!
//! Code lengths come from a Huffman tree over the collector's frequencies;
//! codes are then assigned canonically in (length, rank) order. A sub-block
//! is coded when all four pixels are in the alphabet and the four codes fit
//! in fewer bits than the raw sub-block; otherwise it is stored raw.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{push_raw, CompressedBlock, Scheme};
use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::palette::{Ccd, Rccd};
use crate::surface::{sub_block_indices, Block, PIXELS_PER_BLOCK, SUB_BLOCKS_PER_BLOCK};

const RAW_SUB_BLOCK_BITS: u32 = 128;

/// Canonical prefix code indexed by palette rank.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HuffmanCode {
    lengths: Vec<u8>,
    codes: Vec<u64>,
    decode: HashMap<(u8, u64), u16>,
}

impl HuffmanCode {
    /// Builds a code over `ranked` frequencies (index = rank).
    pub fn build(ranked: &[(u32, u64)]) -> Self {
        let weights: Vec<u64> = ranked.iter().map(|&(_, f)| f.max(1)).collect();
        Self::from_lengths(code_lengths(&weights))
    }

    /// Canonical code for explicit lengths (used when decoding a container).
    pub fn from_lengths(lengths: Vec<u8>) -> Self {
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.sort_by_key(|&i| (lengths[i], i));
        let mut codes = vec![0u64; lengths.len()];
        let mut code = 0u64;
        let mut prev_len = 0u8;
        for (n, &i) in order.iter().enumerate() {
            let len = lengths[i];
            if n > 0 {
                code += 1;
            }
            code <<= len - prev_len;
            prev_len = len;
            codes[i] = code;
        }
        let decode = (0..lengths.len())
            .map(|i| ((lengths[i], codes[i]), i as u16))
            .collect();
        Self {
            lengths,
            codes,
            decode,
        }
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn code(&self, symbol: usize) -> (u64, u32) {
        (self.codes[symbol], u32::from(self.lengths[symbol]))
    }

    fn read_symbol(&self, r: &mut BitReader<'_>) -> Result<u16> {
        let max = self.lengths.iter().copied().max().unwrap_or(0);
        let mut code = 0u64;
        for len in 1..=max {
            code = (code << 1) | u64::from(r.read_bit()?);
            if let Some(&sym) = self.decode.get(&(len, code)) {
                return Ok(sym);
            }
        }
        Err(Error::Corrupt("invalid Huffman code".into()))
    }
}

/// Huffman code lengths for `weights`. Ties merge lower indices first, so
/// the result is deterministic. A lone symbol gets a 1-bit code.
pub fn code_lengths(weights: &[u64]) -> Vec<u8> {
    match weights.len() {
        0 => return Vec::new(),
        1 => return vec![1],
        _ => {}
    }
    let n = weights.len();
    // parent links for leaves and internal nodes
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Reverse((w, i)))
        .collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((wa + wb, next)));
        next += 1;
    }
    (0..n)
        .map(|leaf| {
            let mut depth = 0u8;
            let mut node = leaf;
            while parent[node] != usize::MAX {
                node = parent[node];
                depth += 1;
            }
            depth
        })
        .collect()
}

pub fn compress_block(block: &Block, ccd: &Ccd, code: &HuffmanCode) -> CompressedBlock {
    let mut csb = [0u8; SUB_BLOCKS_PER_BLOCK];
    let mut payload = BitBuf::with_capacity(PIXELS_PER_BLOCK * 32);
    for (s, sb) in block.sub_blocks().iter().enumerate() {
        let symbols = sb.map(|c| ccd.encode(c).filter(|&i| (i as usize) < code.len()));
        let coded = symbols
            .iter()
            .all(Option::is_some)
            .then(|| symbols.map(|s| code.code(s.unwrap() as usize)));
        match coded {
            Some(codes) if codes.iter().map(|c| c.1).sum::<u32>() < RAW_SUB_BLOCK_BITS => {
                csb[s] = 1;
                for (bits, len) in codes {
                    payload.push_bits(bits, len);
                }
            }
            _ => push_raw(&mut payload, sb),
        }
    }
    CompressedBlock {
        scheme: Scheme::HuffDcp,
        csb,
        payload,
    }
}

pub fn decompress_block(
    cb: &CompressedBlock,
    rccd: &Rccd,
    code: &HuffmanCode,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let mut r = cb.payload.reader();
    let out = decode_from(&cb.csb, &mut r, rccd, code)?;
    if r.remaining() != 0 {
        return Err(Error::Corrupt(format!(
            "{} trailing payload bits",
            r.remaining()
        )));
    }
    Ok(out)
}

pub(crate) fn decode_from(
    csb: &[u8; SUB_BLOCKS_PER_BLOCK],
    r: &mut BitReader<'_>,
    rccd: &Rccd,
    code: &HuffmanCode,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let mut out = [0u32; PIXELS_PER_BLOCK];
    for (s, &status) in csb.iter().enumerate() {
        for i in sub_block_indices(s) {
            out[i] = match status {
                0 => r.read_u32()?,
                1 => rccd.decode(u64::from(code.read_symbol(r)?))?,
                other => return Err(Error::Corrupt(format!("CSB value {other} in HuffDCP"))),
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn skewed_four_symbol_lengths() {
        // 49.5 / 49.5 / 0.5 / 0.5
        let mut lengths = code_lengths(&[495, 495, 5, 5]);
        lengths.sort();
        assert_eq!(lengths, vec![1, 2, 3, 3]);
        let bits: f64 = [495.0, 495.0, 5.0, 5.0]
            .iter()
            .zip(code_lengths(&[495, 495, 5, 5]))
            .map(|(w, l)| w * f64::from(l))
            .sum::<f64>()
            / 1000.0;
        assert!((bits - 1.515).abs() < 1e-12);
    }

    #[test]
    fn two_equal_symbols() {
        assert_eq!(code_lengths(&[7, 7]), vec![1, 1]);
        assert_eq!(code_lengths(&[3]), vec![1]);
    }

    #[test]
    fn canonical_codes_are_prefix_free() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            let n = 2 + rng.below(63) as usize;
            let weights: Vec<u64> = (0..n).map(|_| 1 + rng.below(10_000)).collect();
            let code = HuffmanCode::from_lengths(code_lengths(&weights));
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let (ca, la) = code.code(a);
                    let (cb, lb) = code.code(b);
                    if la <= lb {
                        assert_ne!(cb >> (lb - la), ca, "code {a} prefixes {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn average_length_within_entropy_bound() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..200 {
            let n = 2 + rng.below(40) as usize;
            let weights: Vec<u64> = (0..n).map(|_| 1 + rng.below(1000)).collect();
            let total: u64 = weights.iter().sum();
            let lengths = code_lengths(&weights);
            let (mut avg, mut h) = (0.0, 0.0);
            for (&w, &l) in weights.iter().zip(&lengths) {
                let p = w as f64 / total as f64;
                avg += p * f64::from(l);
                h -= p * p.log2();
            }
            assert!(avg >= h - 1e-9 && avg < h + 1.0, "avg {avg} entropy {h}");
        }
    }

    #[test]
    fn block_round_trip_and_raw_fallback() {
        let ranked: Vec<_> = (0..8u32).map(|i| (0x50 + i, 1 << (8 - i))).collect();
        let ccd = Ccd::from_colors(ranked.iter().map(|r| r.0).collect());
        let code = HuffmanCode::build(&ranked);
        let mut block = Block::uniform(0x50);
        block.pixels[20] = 0x57;
        block.pixels[40] = 0x999;
        let cb = compress_block(&block, &ccd, &code);
        assert_eq!(cb.csb.iter().filter(|&&c| c == 0).count(), 1);
        assert_eq!(
            decompress_block(&cb, &ccd.rccd(), &code).unwrap(),
            block.pixels
        );
    }
}
