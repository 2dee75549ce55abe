//! Fixed-width (DCP/ADCP) and variable-width (VDCP) palette coding.

use super::{push_raw, CompressedBlock, Scheme};
use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::palette::{Ccd, Rccd};
use crate::surface::{sub_block_indices, Block, PIXELS_PER_BLOCK, SUB_BLOCKS_PER_BLOCK};

/// VDCP status marking an uncompressed sub-block.
pub const VDCP_RAW: u8 = 7;
/// Largest palette a 3-bit VDCP status can address (v <= 6).
pub const VDCP_MAX_CCD: usize = 64;

/// Fixed-width code width for an rCCD/CCD of `len` entries.
fn fixed_width(len: usize) -> u32 {
    if len <= 1 {
        0
    } else {
        (len as u32).next_power_of_two().trailing_zeros()
    }
}

/// Bits needed for zero-based palette index `m`: ceil(log2(m + 1)).
pub fn vdcp_width(m: u16) -> u32 {
    u16::BITS - m.leading_zeros()
}

/// A sub-block compresses when all four pixels hit the palette; its codes
/// are `log2(|ccd|)` bits each. Otherwise it is stored raw. CSB: 1/0.
pub fn compress_fixed(block: &Block, ccd: &Ccd, scheme: Scheme) -> CompressedBlock {
    let width = ccd.code_bits();
    let mut csb = [0u8; SUB_BLOCKS_PER_BLOCK];
    let mut payload = BitBuf::with_capacity(PIXELS_PER_BLOCK * 32);
    for (s, sb) in block.sub_blocks().iter().enumerate() {
        let codes = sb.map(|c| ccd.encode(c));
        if !ccd.is_empty() && codes.iter().all(Option::is_some) {
            csb[s] = 1;
            for code in codes.into_iter().flatten() {
                payload.push_bits(u64::from(code), width);
            }
        } else {
            push_raw(&mut payload, sb);
        }
    }
    CompressedBlock {
        scheme,
        csb,
        payload,
    }
}

pub fn decompress_fixed(cb: &CompressedBlock, rccd: &Rccd) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let mut r = cb.payload.reader();
    let out = decode_fixed_from(&cb.csb, &mut r, rccd)?;
    expect_consumed(&r)?;
    Ok(out)
}

pub(crate) fn decode_fixed_from(
    csb: &[u8; SUB_BLOCKS_PER_BLOCK],
    r: &mut BitReader<'_>,
    rccd: &Rccd,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let width = fixed_width(rccd.len());
    let mut out = [0u32; PIXELS_PER_BLOCK];
    for (s, &status) in csb.iter().enumerate() {
        for i in sub_block_indices(s) {
            out[i] = match status {
                0 => r.read_u32()?,
                1 => rccd.decode(r.read_bits(width)?)?,
                other => {
                    return Err(Error::Corrupt(format!(
                        "CSB value {other} in a 1-bit scheme"
                    )))
                }
            };
        }
    }
    Ok(out)
}

/// Per sub-block: status v means the four codes index the top 2^v palette
/// entries at v bits each; 7 means raw.
pub fn compress_variable(block: &Block, ccd: &Ccd) -> CompressedBlock {
    debug_assert!(ccd.len() <= VDCP_MAX_CCD);
    let mut csb = [0u8; SUB_BLOCKS_PER_BLOCK];
    let mut payload = BitBuf::with_capacity(PIXELS_PER_BLOCK * 32);
    encode_variable_into(block, ccd, &mut csb, &mut payload);
    CompressedBlock {
        scheme: Scheme::Vdcp,
        csb,
        payload,
    }
}

pub(crate) fn encode_variable_into(
    block: &Block,
    ccd: &Ccd,
    csb: &mut [u8; SUB_BLOCKS_PER_BLOCK],
    payload: &mut BitBuf,
) {
    for (s, sb) in block.sub_blocks().iter().enumerate() {
        let codes = sb.map(|c| ccd.encode(c));
        if codes.iter().all(Option::is_some) {
            let codes = codes.map(Option::unwrap);
            let v = vdcp_width(codes.iter().copied().max().unwrap_or(0));
            csb[s] = v as u8;
            for code in codes {
                payload.push_bits(u64::from(code), v);
            }
        } else {
            csb[s] = VDCP_RAW;
            push_raw(payload, sb);
        }
    }
}

pub fn decompress_variable(cb: &CompressedBlock, rccd: &Rccd) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let mut r = cb.payload.reader();
    let out = decode_variable_from(&cb.csb, &mut r, rccd)?;
    expect_consumed(&r)?;
    Ok(out)
}

pub(crate) fn decode_variable_from(
    csb: &[u8; SUB_BLOCKS_PER_BLOCK],
    r: &mut BitReader<'_>,
    rccd: &Rccd,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let mut out = [0u32; PIXELS_PER_BLOCK];
    for (s, &status) in csb.iter().enumerate() {
        for i in sub_block_indices(s) {
            out[i] = match status {
                VDCP_RAW => r.read_u32()?,
                v @ 0..=6 => rccd.decode(r.read_bits(u32::from(v))?)?,
                other => return Err(Error::Corrupt(format!("VDCP status {other}"))),
            };
        }
    }
    Ok(out)
}

pub(crate) fn expect_consumed(r: &BitReader<'_>) -> Result<()> {
    if r.remaining() != 0 {
        return Err(Error::Corrupt(format!(
            "{} trailing payload bits",
            r.remaining()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn ccd_of(n: u32) -> Ccd {
        let ranked: Vec<_> = (0..n).map(|i| (0x100 + i, 1000 - u64::from(i))).collect();
        Ccd::build(&ranked, n as usize).unwrap()
    }

    #[test]
    fn uniform_block_in_64_palette() {
        let ccd = ccd_of(64);
        let cb = compress_fixed(&Block::uniform(0x100 + 5), &ccd, Scheme::Dcp);
        assert_eq!(cb.payload_bits(), 16 * 4 * 6);
        assert!(cb.csb.iter().all(|&c| c == 1));
        assert_eq!(decompress_fixed(&cb, &ccd.rccd()).unwrap(), [0x105; 64]);
    }

    #[test]
    fn one_miss_makes_one_raw_sub_block() {
        let ccd = ccd_of(64);
        let mut block = Block::uniform(0x100);
        block.pixels[9] = 0xDEAD;
        let cb = compress_fixed(&block, &ccd, Scheme::Dcp);
        assert_eq!(cb.csb[0], 0);
        assert_eq!(cb.csb[1..].iter().filter(|&&c| c == 1).count(), 15);
        assert_eq!(cb.payload_bits(), 128 + 15 * 24);
        assert_eq!(decompress_fixed(&cb, &ccd.rccd()).unwrap(), block.pixels);
    }

    #[test]
    fn empty_palette_is_raw() {
        let cb = compress_fixed(&Block::uniform(1), &Ccd::default(), Scheme::Dcp);
        assert_eq!(cb.payload_bits(), 2048);
        assert!(cb.csb.iter().all(|&c| c == 0));
        let cb = compress_variable(&Block::uniform(1), &Ccd::default());
        assert_eq!(cb.payload_bits(), 2048);
    }

    #[test]
    fn single_entry_palette_has_zero_payload() {
        let ccd = ccd_of(1);
        let cb = compress_fixed(&Block::uniform(0x100), &ccd, Scheme::Adcp);
        assert_eq!(cb.payload_bits(), 0);
        assert_eq!(decompress_fixed(&cb, &ccd.rccd()).unwrap(), [0x100; 64]);
    }

    #[test]
    fn vdcp_width_rule() {
        // index 0 -> 0 bits, 1 -> 1, 2..3 -> 2, 4..7 -> 3, 63 -> 6
        let expected = [
            (0, 0),
            (1, 1),
            (2, 2),
            (3, 2),
            (4, 3),
            (7, 3),
            (8, 4),
            (63, 6),
        ];
        for (m, v) in expected {
            assert_eq!(vdcp_width(m), v, "index {m}");
        }
    }

    #[test]
    fn vdcp_status_examples() {
        let ccd = ccd_of(8);
        let c = |i: u32| 0x100 + i;
        let mut block = Block::uniform(c(0));
        // sub-block 0: {C2, C3}; sub-block 1: {C0, C1}; sub-block 2: C0 only
        block.set_sub_block(0, [c(2), c(3), c(2), c(3)]);
        block.set_sub_block(1, [c(0), c(1), c(1), c(0)]);
        block.set_sub_block(3, [c(7), 0xBAD, c(0), c(0)]);
        let cb = compress_variable(&block, &ccd);
        assert_eq!(cb.csb[0], 0b010);
        assert_eq!(cb.csb[1], 0b001);
        assert_eq!(cb.csb[2], 0b000);
        assert_eq!(cb.csb[3], VDCP_RAW);
        assert_eq!(cb.payload_bits(), 8 + 4 + 128);
        assert_eq!(decompress_variable(&cb, &ccd.rccd()).unwrap(), block.pixels);
    }

    #[test]
    fn vdcp_zero_status_expands_to_first_entry() {
        let ccd = ccd_of(4);
        let cb = CompressedBlock {
            scheme: Scheme::Vdcp,
            csb: [0; 16],
            payload: BitBuf::new(),
        };
        assert_eq!(decompress_variable(&cb, &ccd.rccd()).unwrap(), [0x100; 64]);
    }

    #[test]
    fn corrupt_payloads_rejected() {
        let ccd = ccd_of(4);
        let mut cb = compress_fixed(&Block::uniform(0x101), &ccd, Scheme::Dcp);
        cb.payload = BitBuf::new();
        assert!(decompress_fixed(&cb, &ccd.rccd()).is_err());
        // code 3 against a 3-entry rCCD is out of range
        let cb = compress_fixed(&Block::uniform(0x103), &ccd, Scheme::Dcp);
        let short = Rccd::new(ccd.colors()[..3].to_vec());
        assert!(matches!(
            decompress_fixed(&cb, &short),
            Err(Error::Corrupt(_))
        ));
    }

    #[test]
    fn vdcp_payload_never_exceeds_dcp() {
        let mut rng = SplitMix64::new(77);
        for size in [1u32, 2, 16, 64] {
            let ccd = ccd_of(size);
            for _ in 0..200 {
                let mut block = Block::uniform(0);
                for p in block.pixels.iter_mut() {
                    *p = if rng.chance(9, 10) {
                        0x100 + rng.below(u64::from(size)) as u32
                    } else {
                        7
                    };
                }
                let d = compress_fixed(&block, &ccd, Scheme::Dcp);
                let v = compress_variable(&block, &ccd);
                assert!(v.payload_bits() <= d.payload_bits());
            }
        }
    }
}
