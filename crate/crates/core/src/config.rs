//! Experiment configuration: defaults, TOML files and validation.
//!
//! A config file may set any subset of [`ConfigOverrides`]; command-line
//! flags use the same type and are layered on top.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bandwidth::Accounting;
use crate::codec::Scheme;
use crate::engine::{CodecConfig, RunConfig, VdcpSizing, Verify};
use crate::error::{Error, Result};
use crate::fvc::{Associativity, FvcConfig, Policy};

pub const FVC_SIZE_RANGE: (usize, usize) = (16, 512);
pub const PIXEL_SAMPLING_RANGE: (u32, u32) = (1, 16384);
pub const FRAME_SAMPLING_RANGE: (u32, u32) = (1, 60);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub fvc_size: usize,
    pub policy: Policy,
    pub assoc: Associativity,
    pub pixel_sampling: u32,
    pub frame_sampling: u32,
    pub ccd_size: Option<usize>,
    pub vdcp_sizing: VdcpSizing,
    pub ct: Option<f64>,
    pub accounting: Accounting,
    pub seed: u64,
    pub verify_full: bool,
    pub verify_fraction: f64,
    pub parallel: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Vdcp,
            fvc_size: 64,
            policy: Policy::Lfc,
            assoc: Associativity::Full,
            pixel_sampling: 1,
            frame_sampling: 1,
            ccd_size: None,
            vdcp_sizing: VdcpSizing::Full,
            ct: None,
            accounting: Accounting::Full,
            seed: 0,
            verify_full: false,
            verify_fraction: 0.01,
            parallel: true,
            out: PathBuf::from("dcp-out"),
        }
    }
}

/// Optional settings from a file or the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigOverrides {
    pub scheme: Option<Scheme>,
    pub fvc_size: Option<usize>,
    pub policy: Option<Policy>,
    pub assoc: Option<Associativity>,
    pub pixel_sampling: Option<u32>,
    pub frame_sampling: Option<u32>,
    pub ccd_size: Option<usize>,
    pub vdcp_sizing: Option<VdcpSizing>,
    pub ct: Option<f64>,
    pub accounting: Option<Accounting>,
    pub seed: Option<u64>,
    pub verify_full: Option<bool>,
    pub verify_fraction: Option<f64>,
    pub parallel: Option<bool>,
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fields set in `other` win.
    pub fn layer(self, other: ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigOverrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            scheme,
            fvc_size,
            policy,
            assoc,
            pixel_sampling,
            frame_sampling,
            ccd_size,
            vdcp_sizing,
            ct,
            accounting,
            seed,
            verify_full,
            verify_fraction,
            parallel,
            out
        )
    }

    pub fn apply(self, base: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            scheme: self.scheme.unwrap_or(base.scheme),
            fvc_size: self.fvc_size.unwrap_or(base.fvc_size),
            policy: self.policy.unwrap_or(base.policy),
            assoc: self.assoc.unwrap_or(base.assoc),
            pixel_sampling: self.pixel_sampling.unwrap_or(base.pixel_sampling),
            frame_sampling: self.frame_sampling.unwrap_or(base.frame_sampling),
            ccd_size: self.ccd_size.or(base.ccd_size),
            vdcp_sizing: self.vdcp_sizing.unwrap_or(base.vdcp_sizing),
            ct: self.ct.or(base.ct),
            accounting: self.accounting.unwrap_or(base.accounting),
            seed: self.seed.unwrap_or(base.seed),
            verify_full: self.verify_full.unwrap_or(base.verify_full),
            verify_fraction: self.verify_fraction.unwrap_or(base.verify_fraction),
            parallel: self.parallel.unwrap_or(base.parallel),
            out: self.out.unwrap_or(base.out),
        }
    }
}

fn in_range<T: PartialOrd + std::fmt::Display + Copy>(
    name: &str,
    v: T,
    (lo, hi): (T, T),
) -> Result<()> {
    if v < lo || v > hi {
        return Err(Error::Config(format!("{name} {v} outside {lo}..={hi}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        in_range("FVC size", self.fvc_size, FVC_SIZE_RANGE)?;
        in_range("pixel sampling", self.pixel_sampling, PIXEL_SAMPLING_RANGE)?;
        in_range("frame sampling", self.frame_sampling, FRAME_SAMPLING_RANGE)?;
        if !self.pixel_sampling.is_power_of_two() {
            return Err(Error::Config(format!(
                "pixel sampling {} is not a power of two",
                self.pixel_sampling
            )));
        }
        if !(0.0..=1.0).contains(&self.verify_fraction) {
            return Err(Error::Config(format!(
                "verify fraction {} outside [0, 1]",
                self.verify_fraction
            )));
        }
        self.codec().check()
    }

    pub fn codec(&self) -> CodecConfig {
        CodecConfig {
            scheme: self.scheme,
            fvc: FvcConfig {
                entry_count: self.fvc_size,
                associativity: self.assoc,
                policy: self.policy,
                pixel_sampling: self.pixel_sampling,
                rng_seed: self.seed,
            },
            ccd_size: self.ccd_size,
            frame_sampling: self.frame_sampling,
            coverage_threshold: self.ct,
            vdcp_sizing: self.vdcp_sizing,
        }
    }

    pub fn run(&self) -> Result<RunConfig> {
        self.validate()?;
        Ok(RunConfig {
            codec: self.codec(),
            accounting: self.accounting,
            verify: if self.verify_full {
                Verify::Full
            } else {
                Verify::Sample(self.verify_fraction)
            },
            seed: self.seed,
            parallel: self.parallel,
            relative_coverage: false,
        })
    }
}
