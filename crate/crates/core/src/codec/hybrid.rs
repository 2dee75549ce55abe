//! HDCP: per block, the cheaper (in bursts) of VDCP and RAS; ties go to VDCP.
//!
//! 5-bit CSB values 0..=7 are VDCP sub-block statuses; 8..=11 mark a RAS
//! block and carry its size class, replicated into all sixteen slots.

use super::dcp::{decode_variable_from, encode_variable_into};
use super::{ras, CompressedBlock, Scheme};
use crate::bandwidth::charge_block;
use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::palette::{Ccd, Rccd};
use crate::surface::{Block, PIXELS_PER_BLOCK, SUB_BLOCKS_PER_BLOCK};

pub const RAS_STATUS_BASE: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HybridChoice {
    Vdcp,
    Ras,
}

pub fn compress_block(block: &Block, ccd: &Ccd) -> (CompressedBlock, HybridChoice) {
    let mut csb = [0u8; SUB_BLOCKS_PER_BLOCK];
    let mut vdcp = BitBuf::with_capacity(PIXELS_PER_BLOCK * 32);
    encode_variable_into(block, ccd, &mut csb, &mut vdcp);
    let (class, ras_payload) = ras::encode(block);
    let vdcp_bursts = charge_block(vdcp.len() as u32).charged_bursts;
    let ras_bursts = charge_block(ras_payload.len() as u32).charged_bursts;
    if ras_bursts < vdcp_bursts {
        let cb = CompressedBlock {
            scheme: Scheme::Hdcp,
            csb: [RAS_STATUS_BASE + class; SUB_BLOCKS_PER_BLOCK],
            payload: ras_payload,
        };
        (cb, HybridChoice::Ras)
    } else {
        let cb = CompressedBlock {
            scheme: Scheme::Hdcp,
            csb,
            payload: vdcp,
        };
        (cb, HybridChoice::Vdcp)
    }
}

pub fn choice(cb: &CompressedBlock) -> HybridChoice {
    if cb.csb[0] >= RAS_STATUS_BASE {
        HybridChoice::Ras
    } else {
        HybridChoice::Vdcp
    }
}

pub fn decompress_block(cb: &CompressedBlock, rccd: &Rccd) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let mut r = cb.payload.reader();
    let out = decode_from(&cb.csb, &mut r, rccd)?;
    super::dcp::expect_consumed(&r)?;
    Ok(out)
}

pub(crate) fn decode_from(
    csb: &[u8; SUB_BLOCKS_PER_BLOCK],
    r: &mut BitReader<'_>,
    rccd: &Rccd,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let status = csb[0];
    if status < RAS_STATUS_BASE {
        return decode_variable_from(csb, r, rccd);
    }
    if csb.iter().any(|&c| c != status) || status > RAS_STATUS_BASE + ras::RAW_CLASS {
        return Err(Error::Corrupt(format!("HDCP status {status}")));
    }
    ras::decode(status - RAS_STATUS_BASE, r)
}
