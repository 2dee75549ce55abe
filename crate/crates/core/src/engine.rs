//! Runs a scheme over a frame trace.
//!
//! Frame 0 only trains the collector. From frame 1 on, every frame is
//! compressed with the palette learned from the previous sampling period,
//! then fed to the collector for the next one.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::{
    self, charge_block, charge_partial_block, Accounting, FrameStats, Traffic, WorkloadStats,
};
use crate::codec::adcp::{optimal_ccd_size, scale_sampled};
use crate::codec::dcp::VDCP_MAX_CCD;
use crate::codec::hybrid::{self, HybridChoice};
use crate::codec::{self, CompressedBlock, FramePalette, HuffmanCode, Scheme};
use crate::error::{Error, Result};
use crate::fvc::{relative_coverage, Fvc, FvcConfig};
use crate::palette::{pow2_floor, Ccd};
use crate::rng::mix;
use crate::surface::{blocks, Block, Frame, PIXEL_BITS};
use crate::trace::SurfaceTrace;

/// How VDCP and HDCP pick their palette size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VdcpSizing {
    /// The configured CCD size (capped at 64).
    #[default]
    Full,
    /// The size ADCP would choose for the same period.
    Adaptive,
}

impl fmt::Display for VdcpSizing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VdcpSizing::Full => "full",
            VdcpSizing::Adaptive => "adaptive",
        })
    }
}

impl FromStr for VdcpSizing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(VdcpSizing::Full),
            "adaptive" => Ok(VdcpSizing::Adaptive),
            other => Err(Error::Config(format!("unknown VDCP sizing {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodecConfig {
    pub scheme: Scheme,
    pub fvc: FvcConfig,
    /// Palette size; `None` picks the scheme default.
    pub ccd_size: Option<usize>,
    /// Frames that share one palette.
    pub frame_sampling: u32,
    /// Disable compression for a period when coverage falls below this.
    pub coverage_threshold: Option<f64>,
    pub vdcp_sizing: VdcpSizing,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::default(),
            fvc: FvcConfig::default(),
            ccd_size: None,
            frame_sampling: 1,
            coverage_threshold: None,
            vdcp_sizing: VdcpSizing::default(),
        }
    }
}

impl CodecConfig {
    pub fn for_scheme(scheme: Scheme) -> Self {
        Self {
            scheme,
            ..Self::default()
        }
    }

    /// Palette size in effect: the explicit size, else the FVC size (capped
    /// at 64 for the 3-bit VDCP statuses).
    pub fn effective_ccd_size(&self) -> usize {
        self.ccd_size.unwrap_or(match self.scheme {
            Scheme::Vdcp | Scheme::Hdcp => self.fvc.entry_count.min(VDCP_MAX_CCD),
            _ => self.fvc.entry_count,
        })
    }

    pub fn check(&self) -> Result<()> {
        self.fvc.check()?;
        if self.frame_sampling == 0 {
            return Err(Error::Config("frame sampling period must be >= 1".into()));
        }
        let size = self.effective_ccd_size();
        if self.scheme.uses_palette() {
            if size == 0 || !size.is_power_of_two() {
                return Err(Error::Config(format!(
                    "CCD size {size} is not a power of two"
                )));
            }
            if size > self.fvc.entry_count {
                return Err(Error::Config(format!(
                    "CCD size {size} exceeds the {}-entry FVC",
                    self.fvc.entry_count
                )));
            }
            if matches!(self.scheme, Scheme::Vdcp | Scheme::Hdcp) && size > VDCP_MAX_CCD {
                return Err(Error::Config(format!(
                    "{} addresses at most {VDCP_MAX_CCD} CCD entries, got {size}",
                    self.scheme
                )));
            }
        }
        if let Some(ct) = self.coverage_threshold {
            if !(0.0..=1.0).contains(&ct) {
                return Err(Error::Config(format!(
                    "coverage threshold {ct} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Palette for the next period from a finished collector's ranking.
/// `period_pixels` is the pixel count the collector sampled from.
pub fn next_palette(
    config: &CodecConfig,
    ranked: &[(u32, u64)],
    period_pixels: u64,
) -> Result<FramePalette> {
    let size = config.effective_ccd_size();
    let adaptive = || {
        let scaled = scale_sampled(ranked, config.fvc.pixel_sampling, period_pixels);
        let max = size.min(pow2_floor(ranked.len()));
        optimal_ccd_size(&scaled, period_pixels, u64::from(PIXEL_BITS), max)
    };
    let palette = match config.scheme {
        Scheme::Ras | Scheme::Red => FramePalette::empty(),
        Scheme::Dcp => FramePalette::new(Ccd::build(ranked, size)?),
        Scheme::Adcp => FramePalette::new(Ccd::build(ranked, adaptive())?),
        Scheme::Vdcp | Scheme::Hdcp => {
            let size = match config.vdcp_sizing {
                VdcpSizing::Full => size,
                VdcpSizing::Adaptive => adaptive(),
            };
            FramePalette::new(Ccd::build(ranked, size)?)
        }
        Scheme::HuffDcp => {
            let top = &ranked[..size.min(ranked.len())];
            if top.is_empty() {
                FramePalette::empty()
            } else {
                let ccd = Ccd::from_colors(top.iter().map(|&(c, _)| c).collect());
                FramePalette::with_huffman(ccd, HuffmanCode::build(top))
            }
        }
    };
    Ok(palette)
}

/// Per-trace codec state: the palette in use and the collector training
/// the next one.
#[derive(Clone, Debug)]
pub struct CodecState {
    config: CodecConfig,
    fvc: Option<Fvc>,
    palette: FramePalette,
    enabled: bool,
    coverage: Option<f64>,
    frames_into_period: u32,
    period_pixels: u64,
    fresh_palette: bool,
}

impl CodecState {
    pub fn new(config: CodecConfig) -> Result<Self> {
        config.check()?;
        let fvc = if config.scheme.uses_palette() {
            Some(Fvc::new(config.fvc)?)
        } else {
            None
        };
        Ok(Self {
            config,
            fvc,
            palette: FramePalette::empty(),
            enabled: true,
            coverage: None,
            frames_into_period: 0,
            period_pixels: 0,
            fresh_palette: false,
        })
    }

    pub fn config(&self) -> &CodecConfig {
        &self.config
    }

    /// Palette for the current frame; empty while compression is gated off.
    pub fn palette(&self) -> &FramePalette {
        &self.palette
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    /// Coverage of the collector that produced the current palette.
    pub fn coverage(&self) -> Option<f64> {
        self.coverage
    }

    pub fn fvc(&self) -> Option<&Fvc> {
        self.fvc.as_ref()
    }

    /// Feeds a finished frame to the collector.
    pub fn observe(&mut self, frame: &Frame) {
        if let Some(fvc) = self.fvc.as_mut() {
            fvc.observe_frame(frame);
        }
        self.frames_into_period += 1;
        self.period_pixels += frame.pixel_count() as u64;
    }

    /// Closes frame `index`; swaps in a new palette at period boundaries.
    pub fn end_frame(&mut self, index: usize) -> Result<()> {
        self.fresh_palette = false;
        if index == 0 || self.frames_into_period >= self.config.frame_sampling {
            self.advance()?;
        }
        Ok(())
    }

    /// Builds the next period's palette from the collector and resets it.
    pub fn advance(&mut self) -> Result<()> {
        if let Some(fvc) = self.fvc.as_mut() {
            let coverage = fvc.coverage().ok();
            self.coverage = coverage;
            self.enabled = match (self.config.coverage_threshold, coverage) {
                (Some(ct), Some(c)) => c >= ct,
                (Some(_), None) => false,
                (None, _) => true,
            };
            self.palette = if self.enabled {
                next_palette(&self.config, &fvc.ranked_values(), self.period_pixels)?
            } else {
                FramePalette::empty()
            };
            fvc.reset();
            self.fresh_palette = true;
        }
        self.frames_into_period = 0;
        self.period_pixels = 0;
        Ok(())
    }

    /// Whether the current palette was installed at the last boundary.
    pub fn palette_is_fresh(&self) -> bool {
        self.fresh_palette
    }
}

/// Compresses every block of `frame` in raster order.
pub fn compress_frame(
    frame: &Frame,
    scheme: Scheme,
    palette: &FramePalette,
    parallel: bool,
) -> Vec<(Block, CompressedBlock)> {
    let refs: Vec<_> = blocks(frame).collect();
    let one = |&at| {
        let block = frame.block(at);
        let cb = codec::compress_block(scheme, &block, palette);
        (block, cb)
    };
    if parallel {
        refs.par_iter().map(one).collect()
    } else {
        refs.iter().map(one).collect()
    }
}

/// Bandwidth charged for one compressed block.
pub fn block_cost(block: &Block, cb: &CompressedBlock) -> bandwidth::BlockCost {
    if block.is_padded() {
        charge_partial_block(cb.payload_bits(), block.real_pixels())
    } else {
        charge_block(cb.payload_bits())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verify {
    Off,
    /// Checks roughly this fraction of blocks, chosen by a seeded hash.
    Sample(f64),
    Full,
}

impl Default for Verify {
    fn default() -> Self {
        Verify::Sample(0.01)
    }
}

impl Verify {
    fn selects(self, seed: u64, frame: usize, block: usize) -> bool {
        match self {
            Verify::Off => false,
            Verify::Full => true,
            Verify::Sample(p) => {
                let h = mix(seed ^ mix(frame as u64) ^ (block as u64).rotate_left(32));
                ((h >> 11) as f64 / (1u64 << 53) as f64) < p
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub codec: CodecConfig,
    pub accounting: Accounting,
    pub verify: Verify,
    pub seed: u64,
    pub parallel: bool,
    /// Also measure the collector against each frame's exact histogram.
    pub relative_coverage: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            codec: CodecConfig::default(),
            accounting: Accounting::default(),
            verify: Verify::default(),
            seed: 0,
            parallel: true,
            relative_coverage: false,
        }
    }
}

impl RunConfig {
    pub fn for_scheme(scheme: Scheme) -> Self {
        Self {
            codec: CodecConfig::for_scheme(scheme),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Measured frames (1..).
    pub frames: Vec<FrameStats>,
    pub summary: WorkloadStats,
}

fn verify_frame(
    frame_index: usize,
    coded: &[(Block, CompressedBlock)],
    palette: &FramePalette,
    cfg: &RunConfig,
) -> Result<()> {
    let check = |(i, (block, cb)): (usize, &(Block, CompressedBlock))| {
        if !cfg.verify.selects(cfg.seed, frame_index, i) {
            return Ok(());
        }
        match codec::decompress_block(cb, palette) {
            Ok(px) if px == block.pixels => Ok(()),
            _ => Err(Error::Verification {
                frame: frame_index,
                x: block.origin.x0,
                y: block.origin.y0,
            }),
        }
    };
    if cfg.parallel {
        coded.par_iter().enumerate().try_for_each(check)
    } else {
        coded.iter().enumerate().try_for_each(check)
    }
}

/// Compresses one frame with the state's palette and accounts for it.
pub fn measure_frame(
    index: usize,
    frame: &Frame,
    state: &CodecState,
    cfg: &RunConfig,
) -> Result<FrameStats> {
    let scheme = cfg.codec.scheme;
    let palette = state.palette();
    let coded = compress_frame(frame, scheme, palette, cfg.parallel);
    verify_frame(index, &coded, palette, cfg)?;
    let mut traffic = Traffic::default();
    let (mut vdcp, mut ras) = (0, 0);
    for (block, cb) in &coded {
        traffic.add_block(block_cost(block, cb), block.real_pixels());
        if scheme == Scheme::Hdcp {
            match hybrid::choice(cb) {
                HybridChoice::Vdcp => vdcp += 1,
                HybridChoice::Ras => ras += 1,
            }
        }
    }
    traffic.add_frame_csb(bandwidth::csb_bits(frame.width(), frame.height(), scheme));
    let rccd_bytes = if state.palette_is_fresh() && !palette.is_empty() {
        palette.rccd.serialized_len() as u64
    } else {
        0
    };
    Ok(FrameStats {
        frame: index,
        traffic,
        coverage: state.coverage(),
        relative_coverage: None,
        ccd_size: palette.ccd.len(),
        compression_enabled: state.enabled(),
        vdcp_blocks: vdcp,
        ras_blocks: ras,
        rccd_bytes,
    })
}

pub fn run_trace(trace: &SurfaceTrace, cfg: &RunConfig) -> Result<RunResult> {
    let mut state = CodecState::new(cfg.codec)?;
    let mut frames = Vec::with_capacity(trace.len().saturating_sub(1));
    for (index, frame) in trace.frames().iter().enumerate() {
        let mut stats = if index > 0 {
            Some(measure_frame(index, frame, &state, cfg)?)
        } else {
            None
        };
        state.observe(frame);
        if let (Some(stats), true, Some(fvc)) = (stats.as_mut(), cfg.relative_coverage, state.fvc())
        {
            stats.relative_coverage = Some(relative_coverage(&fvc.ranked_values(), frame)?);
        }
        state.end_frame(index)?;
        frames.extend(stats);
    }
    let summary = bandwidth::aggregate(
        &trace.name,
        &trace.category.to_string(),
        &frames,
        cfg.accounting,
    )?;
    Ok(RunResult { frames, summary })
}

/// Runs every trace, in parallel when enabled; results keep input order.
pub fn run_traces(traces: &[SurfaceTrace], cfg: &RunConfig) -> Result<Vec<RunResult>> {
    if cfg.parallel {
        traces.par_iter().map(|t| run_trace(t, cfg)).collect()
    } else {
        traces.iter().map(|t| run_trace(t, cfg)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::Category;

    fn static_trace(frame: Frame, n: usize) -> SurfaceTrace {
        SurfaceTrace::new("static", Category::Synthetic, vec![frame; n]).unwrap()
    }

    fn stripes(w: u32, h: u32, colors: u32) -> Frame {
        let px = (0..w * h)
            .map(|i| 0xFF00_0000 | ((i % w) / 4 % colors))
            .collect();
        Frame::new(w, h, px).unwrap()
    }

    #[test]
    fn static_white_vdcp_is_csb_bound() {
        let trace = static_trace(Frame::filled(64, 32, 0xFFFF_FFFF).unwrap(), 3);
        let r = run_trace(&trace, &RunConfig::for_scheme(Scheme::Vdcp)).unwrap();
        assert_eq!(r.frames.len(), 2);
        let blocks = 8 * 4;
        for f in &r.frames {
            assert_eq!(f.traffic.payload_bits, 0);
            assert_eq!(f.traffic.charged_bursts, 0);
            assert_eq!(f.traffic.csb_bursts, (64 * 32 / 4 * 3_u64).div_ceil(128));
        }
        let expected = (16 * blocks * 2) as f64 / (2 * r.frames[0].traffic.csb_bursts) as f64;
        assert!((r.summary.rate - expected).abs() < 1e-9);
    }

    #[test]
    fn frame_zero_only_trains() {
        let mut frames = vec![stripes(32, 16, 4); 3];
        // same histogram, different layout
        frames[0].pixels_mut().reverse();
        let a = run_trace(
            &SurfaceTrace::new("a", Category::Synthetic, frames.clone()).unwrap(),
            &RunConfig::for_scheme(Scheme::Dcp),
        )
        .unwrap();
        frames[0] = stripes(32, 16, 4);
        let b = run_trace(
            &SurfaceTrace::new("b", Category::Synthetic, frames).unwrap(),
            &RunConfig::for_scheme(Scheme::Dcp),
        )
        .unwrap();
        assert_eq!(a.frames, b.frames);
    }

    #[test]
    fn coverage_gate() {
        let noise: Vec<u32> = (0..64 * 64).map(|i| mix(i) as u32).collect();
        let trace = static_trace(Frame::new(64, 64, noise).unwrap(), 3);
        let mut cfg = RunConfig::for_scheme(Scheme::Dcp);
        cfg.codec.coverage_threshold = Some(0.7);
        let r = run_trace(&trace, &cfg).unwrap();
        assert!(r
            .frames
            .iter()
            .all(|f| !f.compression_enabled && f.ccd_size == 0));
        assert!(r.frames.iter().all(|f| f.coverage.unwrap() < 0.7));
        assert_eq!(
            r.summary.traffic.payload_bits,
            r.summary.traffic.uncompressed_bits
        );
    }

    #[test]
    fn frame_sampling_static_matches_baseline() {
        let trace = static_trace(stripes(40, 24, 8), 7);
        for scheme in [
            Scheme::Dcp,
            Scheme::Adcp,
            Scheme::Vdcp,
            Scheme::HuffDcp,
            Scheme::Hdcp,
        ] {
            let base = run_trace(&trace, &RunConfig::for_scheme(scheme)).unwrap();
            let mut cfg = RunConfig::for_scheme(scheme);
            cfg.codec.frame_sampling = 2;
            let sampled = run_trace(&trace, &cfg).unwrap();
            assert_eq!(base.summary.traffic, sampled.summary.traffic, "{scheme}");
        }
    }

    #[test]
    fn rccd_attached_once_per_period() {
        let trace = static_trace(stripes(16, 16, 4), 7);
        let mut cfg = RunConfig::for_scheme(Scheme::Dcp);
        cfg.codec.frame_sampling = 3;
        let r = run_trace(&trace, &cfg).unwrap();
        let attached: Vec<_> = r.frames.iter().map(|f| f.rccd_bytes > 0).collect();
        assert_eq!(attached, [true, false, false, true, false, false]);
    }

    #[test]
    fn vdcp_rejects_large_palette() {
        let mut cfg = CodecConfig::for_scheme(Scheme::Vdcp);
        cfg.fvc = FvcConfig::with_entries(128);
        assert_eq!(cfg.effective_ccd_size(), 64);
        cfg.check().unwrap();
        cfg.ccd_size = Some(128);
        assert!(cfg.check().is_err());
    }

    #[test]
    fn parallel_matches_serial() {
        let trace = SurfaceTrace::new(
            "p",
            Category::Synthetic,
            vec![stripes(72, 40, 9), stripes(72, 40, 11), stripes(72, 40, 7)],
        )
        .unwrap();
        for scheme in Scheme::ALL {
            let mut cfg = RunConfig::for_scheme(scheme);
            cfg.verify = Verify::Full;
            let par = run_trace(&trace, &cfg).unwrap();
            cfg.parallel = false;
            assert_eq!(par, run_trace(&trace, &cfg).unwrap(), "{scheme}");
        }
    }
}
