//! DRAM burst accounting and compression-rate aggregation.
//!
//! A block occupies a fixed slot of 16 bursts (2048 bits); its compressed
//! payload is fetched in whole 128-bit bursts. CSB metadata is charged once
//! per frame, rounded up to bursts as one contiguous region.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::Scheme;
use crate::error::{Error, Result};
use crate::surface::{BLOCK_BITS, PIXEL_BITS};

pub const BURST_BITS: u32 = 128;
pub const BLOCK_BURSTS: u32 = BLOCK_BITS / BURST_BITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockCost {
    pub payload_bits: u32,
    pub charged_bursts: u32,
    pub uncompressed_bursts: u32,
}

impl BlockCost {
    pub fn effective_rate(&self) -> f64 {
        f64::from(self.uncompressed_bursts) / f64::from(self.charged_bursts)
    }
}

/// Bursts needed to fetch `payload_bits`; a block never costs more than raw.
pub fn charge_block(payload_bits: u32) -> BlockCost {
    BlockCost {
        payload_bits,
        charged_bursts: payload_bits.div_ceil(BURST_BITS).min(BLOCK_BURSTS),
        uncompressed_bursts: BLOCK_BURSTS,
    }
}

/// Like [`charge_block`] for an edge block holding only `real_pixels`
/// in-frame pixels: both the raw reference and the cap shrink to them.
pub fn charge_partial_block(payload_bits: u32, real_pixels: u32) -> BlockCost {
    let raw_bits = real_pixels * PIXEL_BITS;
    let uncompressed = raw_bits.div_ceil(BURST_BITS);
    BlockCost {
        payload_bits: payload_bits.min(raw_bits),
        charged_bursts: payload_bits.div_ceil(BURST_BITS).min(uncompressed),
        uncompressed_bursts: uncompressed,
    }
}

pub fn bits_to_bursts(bits: u64) -> u64 {
    bits.div_ceil(u64::from(BURST_BITS))
}

/// Metadata bits for a whole `width` x `height` frame under `scheme`.
pub fn csb_bits(width: u32, height: u32, scheme: Scheme) -> u64 {
    let frame_sub_blocks = |w: u32, h: u32| u64::from(w.div_ceil(2)) * u64::from(h.div_ceil(2));
    match scheme.csb_bits_per_sub_block() {
        Some(bits) => frame_sub_blocks(width, height) * u64::from(bits),
        None => {
            let blocks = u64::from(width.div_ceil(8)) * u64::from(height.div_ceil(8));
            blocks * u64::from(scheme.metadata_bits_per_block())
        }
    }
}

/// CSB bursts for one frame.
pub fn csb_overhead(width: u32, height: u32, scheme: Scheme) -> u64 {
    bits_to_bursts(csb_bits(width, height, scheme))
}

/// How compressed sizes turn into a rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Accounting {
    /// Raw bits over payload bits; no metadata, no burst rounding.
    #[serde(rename = "payload")]
    Payload,
    /// Raw bits over payload plus CSB bits; no burst rounding.
    #[serde(rename = "payload+csb")]
    PayloadCsb,
    /// Raw bursts over burst-rounded payload plus per-frame CSB bursts.
    #[default]
    #[serde(rename = "full")]
    Full,
}

impl fmt::Display for Accounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Accounting::Payload => "payload",
            Accounting::PayloadCsb => "payload+csb",
            Accounting::Full => "full",
        })
    }
}

impl FromStr for Accounting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "payload" => Ok(Accounting::Payload),
            "payload+csb" | "payload-csb" | "csb" => Ok(Accounting::PayloadCsb),
            "full" | "burst" => Ok(Accounting::Full),
            other => Err(Error::Config(format!("unknown accounting mode {other:?}"))),
        }
    }
}

/// Traffic totals for a frame or a run of frames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Traffic {
    pub uncompressed_bits: u64,
    pub payload_bits: u64,
    pub csb_bits: u64,
    pub uncompressed_bursts: u64,
    pub charged_bursts: u64,
    pub csb_bursts: u64,
}

impl Traffic {
    pub fn add_block(&mut self, cost: BlockCost, real_pixels: u32) {
        self.uncompressed_bits += u64::from(real_pixels * PIXEL_BITS);
        self.payload_bits += u64::from(cost.payload_bits);
        self.uncompressed_bursts += u64::from(cost.uncompressed_bursts);
        self.charged_bursts += u64::from(cost.charged_bursts);
    }

    /// Adds the frame's metadata bits, rounded to bursts once.
    pub fn add_frame_csb(&mut self, bits: u64) {
        self.csb_bits += bits;
        self.csb_bursts += bits_to_bursts(bits);
    }

    pub fn merge(&mut self, other: &Traffic) {
        self.uncompressed_bits += other.uncompressed_bits;
        self.payload_bits += other.payload_bits;
        self.csb_bits += other.csb_bits;
        self.uncompressed_bursts += other.uncompressed_bursts;
        self.charged_bursts += other.charged_bursts;
        self.csb_bursts += other.csb_bursts;
    }

    /// Compression rate under `mode`; infinite when nothing is charged.
    pub fn rate(&self, mode: Accounting) -> f64 {
        let (num, den) = match mode {
            Accounting::Payload => (self.uncompressed_bits, self.payload_bits),
            Accounting::PayloadCsb => (self.uncompressed_bits, self.payload_bits + self.csb_bits),
            Accounting::Full => (
                self.uncompressed_bursts,
                self.charged_bursts + self.csb_bursts,
            ),
        };
        num as f64 / den as f64
    }
}

/// Per-frame record.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    pub frame: usize,
    pub traffic: Traffic,
    /// Coverage of the collector that produced this frame's palette.
    pub coverage: Option<f64>,
    /// Collector mass relative to the frame's exact top colors.
    pub relative_coverage: Option<f64>,
    pub ccd_size: usize,
    pub compression_enabled: bool,
    pub vdcp_blocks: u64,
    pub ras_blocks: u64,
    /// Serialized palette bytes attached to this frame (not charged).
    pub rccd_bytes: u64,
}

/// Totals over the measured frames of one workload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadStats {
    pub name: String,
    pub category: String,
    pub frames: usize,
    pub traffic: Traffic,
    pub accounting: Accounting,
    pub rate: f64,
    pub vdcp_blocks: u64,
    pub ras_blocks: u64,
    pub rccd_bytes: u64,
}

/// Sums measured frames (callers pass frames 1.. only).
pub fn aggregate(
    name: &str,
    category: &str,
    frames: &[FrameStats],
    mode: Accounting,
) -> Result<WorkloadStats> {
    if frames.is_empty() {
        return Err(Error::Empty("no measured frames"));
    }
    let mut traffic = Traffic::default();
    let (mut vdcp, mut ras, mut rccd) = (0, 0, 0);
    for f in frames {
        traffic.merge(&f.traffic);
        vdcp += f.vdcp_blocks;
        ras += f.ras_blocks;
        rccd += f.rccd_bytes;
    }
    Ok(WorkloadStats {
        name: name.to_string(),
        category: category.to_string(),
        frames: frames.len(),
        traffic,
        accounting: mode,
        rate: traffic.rate(mode),
        vdcp_blocks: vdcp,
        ras_blocks: ras,
        rccd_bytes: rccd,
    })
}

pub fn harmonic_mean(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::Empty("no rates to average"));
    }
    Ok(rates.len() as f64 / rates.iter().map(|r| 1.0 / r).sum::<f64>())
}

/// Harmonic mean of workload rates per category, in first-seen order.
pub fn category_summary(workloads: &[WorkloadStats]) -> Result<Vec<(String, f64)>> {
    let mut order: Vec<String> = Vec::new();
    for w in workloads {
        if !order.contains(&w.category) {
            order.push(w.category.clone());
        }
    }
    order
        .into_iter()
        .map(|cat| {
            let rates: Vec<f64> = workloads
                .iter()
                .filter(|w| w.category == cat)
                .map(|w| w.rate)
                .collect();
            Ok((cat, harmonic_mean(&rates)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burst_fixtures() {
        let cases = [
            (0, 0),
            (1, 1),
            (128, 1),
            (129, 2),
            (130, 2),
            (384, 3),
            (2048, 16),
            (2049, 16),
        ];
        for (bits, bursts) in cases {
            assert_eq!(charge_block(bits).charged_bursts, bursts, "{bits} bits");
        }
        assert!((charge_block(384).effective_rate() - 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn csb_region_sizes() {
        assert_eq!(csb_bits(720, 1280, Scheme::Dcp), 230_400);
        assert_eq!(csb_overhead(720, 1280, Scheme::Dcp), 1800);
        // one CSB bit per 128 bits of surface
        assert_eq!(csb_bits(720, 1280, Scheme::Dcp), 720 * 1280 * 32 / 128);
        assert_eq!(csb_overhead(720, 1280, Scheme::Vdcp), 5400);
        assert_eq!(csb_overhead(8, 8, Scheme::Dcp), 1);
        assert_eq!(csb_bits(16, 8, Scheme::Ras), 4);
    }

    #[test]
    fn partial_block_never_exceeds_its_pixels() {
        let c = charge_partial_block(2048, 8);
        assert_eq!(c.uncompressed_bursts, 2);
        assert_eq!(c.charged_bursts, 2);
        assert_eq!(c.payload_bits, 256);
    }

    #[test]
    fn raw_workload_rates() {
        let mut t = Traffic::default();
        for _ in 0..10 {
            t.add_block(charge_block(2048), 64);
        }
        t.add_frame_csb(160);
        assert_eq!(t.rate(Accounting::Payload), 1.0);
        assert!(t.rate(Accounting::PayloadCsb) < 1.0);
        assert!(t.rate(Accounting::Full) < 1.0);
    }

    #[test]
    fn harmonic() {
        assert!((harmonic_mean(&[2.0, 4.0]).unwrap() - 8.0 / 3.0).abs() < 1e-12);
        assert!(harmonic_mean(&[]).is_err());
    }

    #[test]
    fn aggregate_requires_frames() {
        assert!(aggregate("x", "UI", &[], Accounting::Full).is_err());
    }

    #[test]
    fn modes_parse() {
        for m in [
            Accounting::Payload,
            Accounting::PayloadCsb,
            Accounting::Full,
        ] {
            assert_eq!(m.to_string().parse::<Accounting>().unwrap(), m);
        }
    }
}
