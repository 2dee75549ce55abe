//! Self-describing compressed-frame container.
//!
//! ```text
//! "DCPF" | version u8 | scheme tag u8 | width u32 | height u32 | ccd size u16
//! rCCD (u16 count, u32 colors)
//! HuffDCP only: u16 count, one code length byte per symbol
//! CSB byte length u32 | CSB bits
//! block payloads, raster order, each starting on a byte boundary
//! ```
//!
//! Integers are little-endian. CSB entries are packed MSB-first over the
//! padded sub-block grid in frame raster order, one status per sub-block;
//! RAS and RED store one 2-bit status per block in block raster order.
//! Bandwidth is modeled separately; this format exists for round-trip and
//! size checks.

use crate::bits::{BitBuf, BitReader};
use crate::codec::{self, FramePalette, HuffmanCode, Scheme, BLOCK_STATUS_BITS};
use crate::engine::compress_frame;
use crate::error::{Error, Result};
use crate::palette::{Ccd, Rccd};
use crate::surface::{blocks, Frame, BLOCK_DIM, SUB_BLOCKS_PER_BLOCK, SUB_BLOCK_DIM};

pub const MAGIC: &[u8; 4] = b"DCPF";
pub const VERSION: u8 = 1;

const SUBS_PER_ROW: u32 = BLOCK_DIM / SUB_BLOCK_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub scheme: Scheme,
    pub width: u32,
    pub height: u32,
    pub ccd_size: u16,
}

/// Block index and in-block sub-block index of every CSB slot, in storage order.
fn csb_order(scheme: Scheme, blocks_wide: u32, blocks_high: u32) -> Vec<(usize, usize)> {
    if scheme.csb_bits_per_sub_block().is_none() {
        return (0..(blocks_wide * blocks_high) as usize)
            .map(|b| (b, 0))
            .collect();
    }
    let (gw, gh) = (blocks_wide * SUBS_PER_ROW, blocks_high * SUBS_PER_ROW);
    (0..gh)
        .flat_map(|sy| (0..gw).map(move |sx| (sx, sy)))
        .map(|(sx, sy)| {
            let block = (sy / SUBS_PER_ROW) * blocks_wide + sx / SUBS_PER_ROW;
            let sub = (sy % SUBS_PER_ROW) * SUBS_PER_ROW + sx % SUBS_PER_ROW;
            (block as usize, sub as usize)
        })
        .collect()
}

fn csb_width(scheme: Scheme) -> u32 {
    scheme.csb_bits_per_sub_block().unwrap_or(BLOCK_STATUS_BITS)
}

pub fn encode_frame(frame: &Frame, scheme: Scheme, palette: &FramePalette) -> Vec<u8> {
    let coded = compress_frame(frame, scheme, palette, false);
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(scheme.tag());
    out.extend_from_slice(&frame.width().to_le_bytes());
    out.extend_from_slice(&frame.height().to_le_bytes());
    out.extend_from_slice(&(palette.rccd.len() as u16).to_le_bytes());
    palette.rccd.write_to(&mut out);
    if scheme == Scheme::HuffDcp {
        let lengths = palette
            .huffman
            .as_ref()
            .map(HuffmanCode::lengths)
            .unwrap_or(&[]);
        out.extend_from_slice(&(lengths.len() as u16).to_le_bytes());
        out.extend_from_slice(lengths);
    }

    let width = csb_width(scheme);
    let mut csb = BitBuf::new();
    for (b, s) in csb_order(scheme, frame.blocks_wide(), frame.blocks_high()) {
        csb.push_bits(u64::from(coded[b].1.csb[s]), width);
    }
    out.extend_from_slice(&(csb.as_bytes().len() as u32).to_le_bytes());
    out.extend_from_slice(csb.as_bytes());

    for (_, cb) in &coded {
        out.extend_from_slice(cb.payload.as_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Corrupt("container truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

pub fn read_header(bytes: &[u8]) -> Result<Header> {
    let mut c = Cursor { bytes, pos: 0 };
    parse_header(&mut c)
}

fn parse_header(c: &mut Cursor<'_>) -> Result<Header> {
    if c.take(4)? != MAGIC {
        return Err(Error::Corrupt("not a compressed frame".into()));
    }
    let version = c.u8()?;
    if version != VERSION {
        return Err(Error::Corrupt(format!("container version {version}")));
    }
    let scheme = Scheme::from_tag(c.u8()?)?;
    let (width, height) = (c.u32()?, c.u32()?);
    if width == 0 || height == 0 {
        return Err(Error::Corrupt(format!("frame size {width}x{height}")));
    }
    Ok(Header {
        scheme,
        width,
        height,
        ccd_size: c.u16()?,
    })
}

pub fn decode_frame(bytes: &[u8]) -> Result<Frame> {
    let mut c = Cursor { bytes, pos: 0 };
    let header = parse_header(&mut c)?;
    let (rccd, used) = Rccd::read_from(&bytes[c.pos..])?;
    c.pos += used;
    if rccd.len() != usize::from(header.ccd_size) {
        return Err(Error::Corrupt("CCD size disagrees with the rCCD".into()));
    }
    let mut palette = FramePalette::new(Ccd::from_colors(rccd.colors().to_vec()));
    if header.scheme == Scheme::HuffDcp {
        let n = usize::from(c.u16()?);
        let lengths = c.take(n)?.to_vec();
        if lengths.iter().any(|&l| l == 0 || l > 64) {
            return Err(Error::Corrupt("Huffman code length out of range".into()));
        }
        palette.huffman = Some(HuffmanCode::from_lengths(lengths));
    }

    let mut frame = Frame::filled(header.width, header.height, 0)?;
    let order = csb_order(header.scheme, frame.blocks_wide(), frame.blocks_high());
    let width = csb_width(header.scheme);
    let csb_len = c.u32()? as usize;
    let csb_bytes = c.take(csb_len)?;
    if csb_len * 8 < order.len() * width as usize {
        return Err(Error::Corrupt("CSB region too short".into()));
    }
    let mut csb = vec![[0u8; SUB_BLOCKS_PER_BLOCK]; frame.block_count()];
    let mut r = BitReader::new(csb_bytes, csb_len * 8);
    for (b, s) in order {
        let v = r.read_bits(width)? as u8;
        if header.scheme.csb_bits_per_sub_block().is_some() {
            csb[b][s] = v;
        } else {
            csb[b] = [v; SUB_BLOCKS_PER_BLOCK];
        }
    }

    let payload = &bytes[c.pos..];
    let mut r = BitReader::new(payload, payload.len() * 8);
    let refs: Vec<_> = blocks(&frame).collect();
    for (i, at) in refs.into_iter().enumerate() {
        let pixels = codec::decode_from(header.scheme, &csb[i], &mut r, &palette)?;
        r.align();
        let mut block = frame.block(at);
        block.pixels = pixels;
        frame.put_block(&block);
    }
    if r.remaining() != 0 {
        return Err(Error::Corrupt("trailing bytes after the last block".into()));
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{next_palette, CodecConfig};
    use crate::fvc::{Fvc, FvcConfig};
    use crate::rng::SplitMix64;

    fn sample_frame(w: u32, h: u32, seed: u64) -> Frame {
        let mut rng = SplitMix64::new(seed);
        let px = (0..w * h)
            .map(|i| {
                if rng.chance(1, 20) {
                    rng.next_u32()
                } else {
                    0xFF00_0000 | (((i % w) / 3 % 6) * 0x10101)
                }
            })
            .collect();
        Frame::new(w, h, px).unwrap()
    }

    #[test]
    fn round_trip_every_scheme() {
        for (w, h) in [(16, 16), (21, 13), (8, 1)] {
            let frame = sample_frame(w, h, u64::from(w * h));
            let mut fvc = Fvc::new(FvcConfig::default()).unwrap();
            fvc.observe_frame(&frame);
            for scheme in Scheme::ALL {
                let cfg = CodecConfig::for_scheme(scheme);
                let palette =
                    next_palette(&cfg, &fvc.ranked_values(), frame.pixel_count() as u64).unwrap();
                let bytes = encode_frame(&frame, scheme, &palette);
                let header = read_header(&bytes).unwrap();
                assert_eq!((header.scheme, header.width, header.height), (scheme, w, h));
                assert_eq!(decode_frame(&bytes).unwrap(), frame, "{scheme} {w}x{h}");
            }
        }
    }

    #[test]
    fn csb_order_is_frame_raster() {
        let order = csb_order(Scheme::Dcp, 2, 1);
        assert_eq!(order.len(), 32);
        assert_eq!(
            &order[..6],
            &[(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1)]
        );
        assert_eq!(order[8], (0, 4));
    }

    #[test]
    fn damaged_containers_rejected() {
        let frame = sample_frame(16, 8, 3);
        let bytes = encode_frame(&frame, Scheme::Ras, &FramePalette::empty());
        assert!(decode_frame(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_frame(&bytes[1..]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_frame(&extra).is_err());
    }
}
