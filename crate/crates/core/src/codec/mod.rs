//! Block codecs.
//!
//! Every codec consumes one 8x8 [`Block`] and produces a [`CompressedBlock`]:
//! a per-sub-block status array (the CSB) plus an MSB-first payload. The
//! palette codecs (DCP, ADCP, VDCP, HuffDCP) need the frame's palette; RAS
//! and RED are self-contained; HDCP picks VDCP or RAS per block.

pub mod adcp;
pub mod dcp;
pub mod golomb;
pub mod huffman;
pub mod hybrid;
pub mod ras;
pub mod red;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::palette::{Ccd, Rccd};
use crate::surface::{Block, PIXELS_PER_BLOCK, SUB_BLOCKS_PER_BLOCK};

pub use huffman::HuffmanCode;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Dcp,
    Adcp,
    #[default]
    Vdcp,
    #[serde(rename = "huffdcp")]
    HuffDcp,
    Ras,
    Red,
    Hdcp,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::Dcp,
        Scheme::Adcp,
        Scheme::Vdcp,
        Scheme::HuffDcp,
        Scheme::Ras,
        Scheme::Red,
        Scheme::Hdcp,
    ];

    /// Whether the scheme compresses with a palette learned from earlier frames.
    pub fn uses_palette(self) -> bool {
        !matches!(self, Scheme::Ras | Scheme::Red)
    }

    /// Status bits per 2x2 sub-block, or `None` for block-level schemes.
    pub fn csb_bits_per_sub_block(self) -> Option<u32> {
        match self {
            Scheme::Dcp | Scheme::Adcp | Scheme::HuffDcp => Some(1),
            Scheme::Vdcp => Some(3),
            Scheme::Hdcp => Some(5),
            Scheme::Ras | Scheme::Red => None,
        }
    }

    /// Status bits charged for one fully in-frame block.
    pub fn metadata_bits_per_block(self) -> u32 {
        match self.csb_bits_per_sub_block() {
            Some(w) => w * SUB_BLOCKS_PER_BLOCK as u32,
            None => BLOCK_STATUS_BITS,
        }
    }

    /// Metadata bits for a block with `real_sub_blocks` in-frame sub-blocks.
    pub fn metadata_bits(self, real_sub_blocks: u32) -> u32 {
        match self.csb_bits_per_sub_block() {
            Some(w) => w * real_sub_blocks,
            None => BLOCK_STATUS_BITS,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Scheme::Dcp => 0,
            Scheme::Adcp => 1,
            Scheme::Vdcp => 2,
            Scheme::HuffDcp => 3,
            Scheme::Ras => 4,
            Scheme::Red => 5,
            Scheme::Hdcp => 6,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Scheme::ALL
            .get(tag as usize)
            .copied()
            .ok_or_else(|| Error::Corrupt(format!("unknown scheme tag {tag}")))
    }
}

/// RAS and RED record one 2-bit status per 8x8 block.
pub const BLOCK_STATUS_BITS: u32 = 2;

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Dcp => "dcp",
            Scheme::Adcp => "adcp",
            Scheme::Vdcp => "vdcp",
            Scheme::HuffDcp => "huffdcp",
            Scheme::Ras => "ras",
            Scheme::Red => "red",
            Scheme::Hdcp => "hdcp",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dcp" => Ok(Scheme::Dcp),
            "adcp" => Ok(Scheme::Adcp),
            "vdcp" => Ok(Scheme::Vdcp),
            "huffdcp" | "hdcp-huff" => Ok(Scheme::HuffDcp),
            "ras" => Ok(Scheme::Ras),
            "red" => Ok(Scheme::Red),
            "hdcp" | "hybrid" => Ok(Scheme::Hdcp),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Encoded 8x8 block. For block-level schemes every CSB slot holds the
/// block's status; the payload length is the charged size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedBlock {
    pub scheme: Scheme,
    pub csb: [u8; SUB_BLOCKS_PER_BLOCK],
    pub payload: BitBuf,
}

impl CompressedBlock {
    pub fn payload_bits(&self) -> u32 {
        self.payload.len() as u32
    }
}

/// Everything a frame's blocks need to be compressed or decompressed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FramePalette {
    pub ccd: Ccd,
    pub rccd: Rccd,
    pub huffman: Option<HuffmanCode>,
}

impl FramePalette {
    pub fn new(ccd: Ccd) -> Self {
        let rccd = ccd.rccd();
        Self {
            ccd,
            rccd,
            huffman: None,
        }
    }

    pub fn with_huffman(ccd: Ccd, huffman: HuffmanCode) -> Self {
        Self {
            huffman: Some(huffman),
            ..Self::new(ccd)
        }
    }

    /// Palette that compresses nothing.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.ccd.is_empty()
    }
}

pub fn compress_block(scheme: Scheme, block: &Block, palette: &FramePalette) -> CompressedBlock {
    match scheme {
        Scheme::Dcp | Scheme::Adcp => dcp::compress_fixed(block, &palette.ccd, scheme),
        Scheme::Vdcp => dcp::compress_variable(block, &palette.ccd),
        Scheme::HuffDcp => match &palette.huffman {
            Some(code) => huffman::compress_block(block, &palette.ccd, code),
            None => huffman::compress_block(block, &Ccd::default(), &HuffmanCode::default()),
        },
        Scheme::Ras => ras::compress_block(block),
        Scheme::Red => red::compress_block(block),
        Scheme::Hdcp => hybrid::compress_block(block, &palette.ccd).0,
    }
}

pub fn decompress_block(
    cb: &CompressedBlock,
    palette: &FramePalette,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    match cb.scheme {
        Scheme::Dcp | Scheme::Adcp => dcp::decompress_fixed(cb, &palette.rccd),
        Scheme::Vdcp => dcp::decompress_variable(cb, &palette.rccd),
        Scheme::HuffDcp => {
            let empty = HuffmanCode::default();
            huffman::decompress_block(
                cb,
                &palette.rccd,
                palette.huffman.as_ref().unwrap_or(&empty),
            )
        }
        Scheme::Ras => ras::decompress_block(cb),
        Scheme::Red => red::decompress_block(cb),
        Scheme::Hdcp => hybrid::decompress_block(cb, &palette.rccd),
    }
}

/// Decodes one block whose payload starts at the reader's position, leaving
/// the reader just past it.
pub fn decode_from(
    scheme: Scheme,
    csb: &[u8; SUB_BLOCKS_PER_BLOCK],
    r: &mut BitReader<'_>,
    palette: &FramePalette,
) -> Result<[u32; PIXELS_PER_BLOCK]> {
    let uniform_status = || {
        if csb.iter().any(|&c| c != csb[0]) {
            return Err(Error::Corrupt(format!(
                "inconsistent {scheme} block status"
            )));
        }
        Ok(csb[0])
    };
    match scheme {
        Scheme::Dcp | Scheme::Adcp => dcp::decode_fixed_from(csb, r, &palette.rccd),
        Scheme::Vdcp => dcp::decode_variable_from(csb, r, &palette.rccd),
        Scheme::HuffDcp => {
            let empty = HuffmanCode::default();
            huffman::decode_from(
                csb,
                r,
                &palette.rccd,
                palette.huffman.as_ref().unwrap_or(&empty),
            )
        }
        Scheme::Ras => ras::decode(uniform_status()?, r),
        Scheme::Red => red::decode(uniform_status()?, r),
        Scheme::Hdcp => hybrid::decode_from(csb, r, &palette.rccd),
    }
}

/// Appends the four pixels of a sub-block uncompressed.
fn push_raw(payload: &mut BitBuf, values: &[u32]) {
    for &v in values {
        payload.push_u32(v);
    }
}
