//! Neighbor-prediction residual codec with Golomb-Rice entropy coding.
//!
//! Channels are coded separately (R, G, B, A). Within a block, the first
//! pixel of each channel is an 8-bit anchor; the rest of the first row is
//! predicted from the left neighbor, the rest of the first column from the
//! pixel above, and interior pixels by the median edge detector. Residuals
//! are zigzag mapped and Golomb-Rice coded with the per-channel k in 0..=6
//! that minimizes the channel's bits; k = 7 stores the channel raw. Each
//! channel carries a 3-bit k header. The block is charged at the smallest
//! of 1/4, 1/2 or 3/4 of its raw size that holds the stream, or raw.
//!
//! Blocks never read pixels outside themselves.

use super::golomb::{self, zigzag};
use super::{CompressedBlock, Scheme};
use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::surface::{Block, BLOCK_BITS, PIXELS_PER_BLOCK, SUB_BLOCKS_PER_BLOCK};

/// Charged block sizes by status: 1/4, 1/2, 3/4 and raw.
pub const SIZE_CLASSES: [u32; 4] = [
    BLOCK_BITS / 4,
    BLOCK_BITS / 2,
    3 * BLOCK_BITS / 4,
    BLOCK_BITS,
];
pub const RAW_CLASS: u8 = 3;
const RAW_K: u32 = 7;
const K_BITS: u32 = 3;
const ANCHOR_BITS: u32 = 8;
const CHANNEL_RAW_BITS: u32 = PIXELS_PER_BLOCK as u32 * 8;

/// Median edge detector over left `a`, above `b` and above-left `c`.
pub fn med(a: i32, b: i32, c: i32) -> i32 {
    if c >= a.max(b) {
        a.min(b)
    } else if c <= a.min(b) {
        a.max(b)
    } else {
        a + b - c
    }
}

/// Prediction for position `i` of an 8x8 channel plane; `None` for the anchor.
fn predict(plane: &[u8; PIXELS_PER_BLOCK], i: usize) -> Option<i32> {
    let (x, y) = (i % 8, i / 8);
    let at = |x: usize, y: usize| i32::from(plane[y * 8 + x]);
    match (x, y) {
        (0, 0) => None,
        (_, 0) => Some(at(x - 1, 0)),
        (0, _) => Some(at(0, y - 1)),
        _ => Some(med(at(x - 1, y), at(x, y - 1), at(x - 1, y - 1))),
    }
}

fn planes(block: &Block) -> [[u8; PIXELS_PER_BLOCK]; 4] {
    let mut planes = [[0u8; PIXELS_PER_BLOCK]; 4];
    for (i, p) in block.pixels.iter().enumerate() {
        for (c, byte) in p.to_le_bytes().into_iter().enumerate() {
            planes[c][i] = byte;
        }
    }
    planes
}

fn residuals(plane: &[u8; PIXELS_PER_BLOCK]) -> Vec<u32> {
    (1..PIXELS_PER_BLOCK)
        .map(|i| zigzag(i32::from(plane[i]) - predict(plane, i).unwrap()))
        .collect()
}

/// Best k for a channel and the channel's bits excluding the k header.
fn choose_k(res: &[u32]) -> (u32, u32) {
    let mut best = (RAW_K, CHANNEL_RAW_BITS);
    for k in 0..=6 {
        let bits = ANCHOR_BITS + res.iter().map(|&r| golomb::encoded_len(r, k)).sum::<u32>();
        if bits < best.1 {
            best = (k, bits);
        }
    }
    best
}

/// Size class holding `bits`, or the raw class.
pub fn size_class(bits: u32) -> u8 {
    SIZE_CLASSES[..3]
        .iter()
        .position(|&s| bits <= s)
        .map_or(RAW_CLASS, |c| c as u8)
}

/// Unquantized stream length: per-channel k headers plus channel data.
pub fn stream_bits(block: &Block) -> u32 {
    planes(block)
        .iter()
        .map(|p| K_BITS + choose_k(&residuals(p)).1)
        .sum()
}

pub fn compress_block(block: &Block) -> CompressedBlock {
    let (class, payload) = encode(block);
    CompressedBlock {
        scheme: Scheme::Ras,
        csb: [class; SUB_BLOCKS_PER_BLOCK],
        payload,
    }
}

/// Status class and payload padded to the class size.
pub(crate) fn encode(block: &Block) -> (u8, BitBuf) {
    let planes = planes(block);
    let coded: Vec<_> = planes
        .iter()
        .map(|p| {
            let res = residuals(p);
            let (k, bits) = choose_k(&res);
            (k, bits, res)
        })
        .collect();
    let total: u32 = coded.iter().map(|c| K_BITS + c.1).sum();
    let class = size_class(total);
    let mut payload = BitBuf::with_capacity(SIZE_CLASSES[class as usize] as usize);
    if class == RAW_CLASS {
        for &p in &block.pixels {
            payload.push_u32(p);
        }
        return (class, payload);
    }
    for (plane, (k, _, res)) in planes.iter().zip(&coded) {
        payload.push_bits(u64::from(*k), K_BITS);
        if *k == RAW_K {
            for &v in plane {
                payload.push_bits(u64::from(v), 8);
            }
        } else {
            payload.push_bits(u64::from(plane[0]), ANCHOR_BITS);
            for &r in res {
                golomb::encode(r, *k, &mut payload);
            }
        }
    }
    debug_assert!(payload.len() as u32 == total);
    payload.pad_to(SIZE_CLASSES[class as usize] as usize);
    (class, payload)
}

pub fn decompress_block(cb: &CompressedBlock) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let class = cb.csb[0];
    if cb.csb.iter().any(|&c| c != class) {
        return Err(Error::Corrupt("inconsistent RAS block status".into()));
    }
    decode(class, &mut cb.payload.reader())
}

pub(crate) fn decode(class: u8, r: &mut BitReader<'_>) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let size = *SIZE_CLASSES
        .get(class as usize)
        .ok_or_else(|| Error::Corrupt(format!("RAS size class {class}")))? as usize;
    if r.remaining() < size {
        return Err(Error::Corrupt(
            "RAS payload shorter than its size class".into(),
        ));
    }
    let start = r.position();
    let mut out = [0u32; PIXELS_PER_BLOCK];
    if class == RAW_CLASS {
        for p in out.iter_mut() {
            *p = r.read_u32()?;
        }
        return Ok(out);
    }
    let mut planes = [[0u8; PIXELS_PER_BLOCK]; 4];
    for plane in planes.iter_mut() {
        let k = r.read_bits(K_BITS)? as u32;
        if k == RAW_K {
            for v in plane.iter_mut() {
                *v = r.read_bits(8)? as u8;
            }
            continue;
        }
        plane[0] = r.read_bits(ANCHOR_BITS)? as u8;
        for i in 1..PIXELS_PER_BLOCK {
            let residual = golomb::unzigzag(golomb::decode(r, k, golomb::MAX_UNARY)?);
            let value = predict(plane, i).unwrap() + residual;
            plane[i] =
                u8::try_from(value).map_err(|_| Error::Corrupt(format!("RAS sample {value}")))?;
        }
    }
    let used = r.position() - start;
    if used > size {
        return Err(Error::Corrupt("RAS stream overruns its size class".into()));
    }
    // class padding
    for _ in used..size {
        r.read_bit()?;
    }
    for (i, p) in out.iter_mut().enumerate() {
        *p = u32::from_le_bytes([planes[0][i], planes[1][i], planes[2][i], planes[3][i]]);
    }
    Ok(out)
}
