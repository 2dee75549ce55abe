//! Uniform-region codec: 1:8 when every 4x2 region is a single color, 1:4
//! when every 2x2 region is, otherwise raw.

use super::{CompressedBlock, Scheme};
use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::surface::{sub_block_indices, Block, PIXELS_PER_BLOCK, SUB_BLOCKS_PER_BLOCK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RedClass {
    /// All eight 4x2 regions uniform: eight colors, 256 bits.
    C8 = 0,
    /// All sixteen 2x2 regions uniform: sixteen colors, 512 bits.
    C4 = 1,
    Raw = 2,
}

impl RedClass {
    pub fn charged_bits(self) -> u32 {
        match self {
            RedClass::C8 => 8 * 32,
            RedClass::C4 => 16 * 32,
            RedClass::Raw => 64 * 32,
        }
    }

    fn from_status(status: u8) -> Result<Self> {
        match status {
            0 => Ok(RedClass::C8),
            1 => Ok(RedClass::C4),
            2 => Ok(RedClass::Raw),
            other => Err(Error::Corrupt(format!("RED status {other}"))),
        }
    }
}

/// Block-relative indices of 4x2 region `r` (two columns of regions, four
/// rows, raster order).
fn region_indices(r: usize) -> [usize; 8] {
    let base = (r / 2) * 16 + (r % 2) * 4;
    std::array::from_fn(|i| base + (i / 4) * 8 + i % 4)
}

fn uniform(block: &Block, indices: &[usize]) -> bool {
    indices
        .iter()
        .all(|&i| block.pixels[i] == block.pixels[indices[0]])
}

pub fn classify(block: &Block) -> RedClass {
    if (0..8).all(|r| uniform(block, &region_indices(r))) {
        RedClass::C8
    } else if (0..SUB_BLOCKS_PER_BLOCK).all(|s| uniform(block, &sub_block_indices(s))) {
        RedClass::C4
    } else {
        RedClass::Raw
    }
}

pub fn compress_block(block: &Block) -> CompressedBlock {
    let class = classify(block);
    let mut payload = BitBuf::with_capacity(class.charged_bits() as usize);
    match class {
        RedClass::C8 => (0..8).for_each(|r| payload.push_u32(block.pixels[region_indices(r)[0]])),
        RedClass::C4 => {
            (0..16).for_each(|s| payload.push_u32(block.pixels[sub_block_indices(s)[0]]))
        }
        RedClass::Raw => block.pixels.iter().for_each(|&p| payload.push_u32(p)),
    }
    CompressedBlock {
        scheme: Scheme::Red,
        csb: [class as u8; SUB_BLOCKS_PER_BLOCK],
        payload,
    }
}

pub fn decompress_block(cb: &CompressedBlock) -> Result<[u32; PIXELS_PER_BLOCK]> {
    if cb.csb.iter().any(|&c| c != cb.csb[0]) {
        return Err(Error::Corrupt("inconsistent RED block status".into()));
    }
    let mut r = cb.payload.reader();
    let out = decode(cb.csb[0], &mut r)?;
    super::dcp::expect_consumed(&r)?;
    Ok(out)
}

pub(crate) fn decode(status: u8, r: &mut BitReader<'_>) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let class = RedClass::from_status(status)?;
    let mut out = [0u32; PIXELS_PER_BLOCK];
    match class {
        RedClass::C8 => {
            for region in 0..8 {
                let c = r.read_u32()?;
                region_indices(region).iter().for_each(|&i| out[i] = c);
            }
        }
        RedClass::C4 => {
            for s in 0..16 {
                let c = r.read_u32()?;
                sub_block_indices(s).iter().for_each(|&i| out[i] = c);
            }
        }
        RedClass::Raw => {
            for p in out.iter_mut() {
                *p = r.read_u32()?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_partition_block() {
        let mut seen = [0; 64];
        for r in 0..8 {
            for i in region_indices(r) {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        assert_eq!(region_indices(1), [4, 5, 6, 7, 12, 13, 14, 15]);
    }

    #[test]
    fn uniform_is_c8() {
        let cb = compress_block(&Block::uniform(3));
        assert_eq!(classify(&Block::uniform(3)), RedClass::C8);
        assert_eq!(cb.payload_bits(), 256);
        assert_eq!(decompress_block(&cb).unwrap(), [3; 64]);
    }

    #[test]
    fn quad_checkerboard_is_c4() {
        let mut block = Block::uniform(0);
        for s in 0..16 {
            let color = if (s % 4 + s / 4) % 2 == 0 { 0xAA } else { 0xBB };
            block.set_sub_block(s, [color; 4]);
        }
        assert_eq!(classify(&block), RedClass::C4);
        let cb = compress_block(&block);
        assert_eq!(cb.payload_bits(), 512);
        assert_eq!(decompress_block(&cb).unwrap(), block.pixels);
    }

    #[test]
    fn distinct_colors_are_raw() {
        let block = Block::from_pixels(std::array::from_fn(|i| i as u32));
        assert_eq!(classify(&block), RedClass::Raw);
        let cb = compress_block(&block);
        assert_eq!(cb.payload_bits(), 2048);
        assert_eq!(decompress_block(&cb).unwrap(), block.pixels);
    }

    #[test]
    fn class_sizes_ordered() {
        assert!(RedClass::C8.charged_bits() <= RedClass::C4.charged_bits());
        assert!(RedClass::C4.charged_bits() <= RedClass::Raw.charged_bits());
    }
}
