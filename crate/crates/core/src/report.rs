//! CSV and JSON reports.
//!
//! Per-frame CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `workload` | trace name |
//! | `category` | trace category |
//! | `scheme` | codec |
//! | `accounting` | rate mode (`payload`, `payload+csb`, `full`) |
//! | `seed` | run seed |
//! | `frame` | frame index (frame 0 is warm-up and never listed) |
//! | `uncompressed_bits`, `payload_bits`, `csb_bits` | bit totals |
//! | `uncompressed_bursts`, `charged_bursts`, `csb_bursts` | 128-bit burst totals |
//! | `rate` | frame compression rate under `accounting` |
//! | `coverage` | coverage of the collector behind this frame's palette |
//! | `relative_coverage` | collector mass over the exact top-N mass (sweeps only) |
//! | `ccd_size` | palette entries in use |
//! | `compression_enabled` | false when coverage gating disabled the palette |
//! | `vdcp_blocks`, `ras_blocks` | hybrid block shares (HDCP only) |
//! | `rccd_bytes` | palette bytes attached to the frame, not charged |
//!
//! Nothing in the CSV depends on wall-clock time; the JSON summary carries
//! the only timestamp.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::bandwidth::{category_summary, WorkloadStats};
use crate::coherence::{color_cdf_points, color_change, entropy, histogram, pixel_change};
use crate::config::ExperimentConfig;
use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::trace::SurfaceTrace;

/// Top-k points reported by `analyze`.
pub const CDF_POINTS: [usize; 5] = [1, 8, 64, 100, 256];

fn opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("CSV: {other:?}")),
    }
}

#[derive(Serialize)]
struct FrameRow<'a> {
    workload: &'a str,
    category: &'a str,
    scheme: String,
    accounting: String,
    seed: u64,
    frame: usize,
    uncompressed_bits: u64,
    payload_bits: u64,
    csb_bits: u64,
    uncompressed_bursts: u64,
    charged_bursts: u64,
    csb_bursts: u64,
    rate: String,
    coverage: String,
    relative_coverage: String,
    ccd_size: usize,
    compression_enabled: bool,
    vdcp_blocks: u64,
    ras_blocks: u64,
    rccd_bytes: u64,
}

pub fn write_frames_csv<W: Write>(
    out: W,
    runs: &[RunResult],
    cfg: &ExperimentConfig,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for run in runs {
        let s = &run.summary;
        for f in &run.frames {
            w.serialize(FrameRow {
                workload: &s.name,
                category: &s.category,
                scheme: cfg.scheme.to_string(),
                accounting: s.accounting.to_string(),
                seed: cfg.seed,
                frame: f.frame,
                uncompressed_bits: f.traffic.uncompressed_bits,
                payload_bits: f.traffic.payload_bits,
                csb_bits: f.traffic.csb_bits,
                uncompressed_bursts: f.traffic.uncompressed_bursts,
                charged_bursts: f.traffic.charged_bursts,
                csb_bursts: f.traffic.csb_bursts,
                rate: format!("{:.6}", f.traffic.rate(s.accounting)),
                coverage: opt(f.coverage),
                relative_coverage: opt(f.relative_coverage),
                ccd_size: f.ccd_size,
                compression_enabled: f.compression_enabled,
                vdcp_blocks: f.vdcp_blocks,
                ras_blocks: f.ras_blocks,
                rccd_bytes: f.rccd_bytes,
            })
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CategoryRate {
    pub category: String,
    pub harmonic_mean_rate: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub generated_at: u64,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub workloads: Vec<&'a WorkloadStats>,
    pub categories: Vec<CategoryRate>,
}

pub fn summary<'a>(runs: &'a [RunResult], cfg: &'a ExperimentConfig) -> Result<Summary<'a>> {
    let workloads: Vec<_> = runs.iter().map(|r| &r.summary).collect();
    let owned: Vec<WorkloadStats> = workloads.iter().map(|&w| w.clone()).collect();
    let categories = category_summary(&owned)?
        .into_iter()
        .map(|(category, harmonic_mean_rate)| CategoryRate {
            category,
            harmonic_mean_rate,
        })
        .collect();
    Ok(Summary {
        tool: "dcpbench",
        version: env!("CARGO_PKG_VERSION"),
        generated_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        seed: cfg.seed,
        config: cfg,
        workloads,
        categories,
    })
}

pub fn write_summary_json<W: Write>(
    mut out: W,
    runs: &[RunResult],
    cfg: &ExperimentConfig,
) -> Result<()> {
    let s = summary(runs, cfg)?;
    serde_json::to_writer_pretty(&mut out, &s).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// One sweep cell: a workload run at one value of the swept dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub dimension: String,
    pub value: String,
    pub workload: String,
    pub category: String,
    pub scheme: String,
    pub accounting: String,
    pub seed: u64,
    pub rate: String,
    /// Rate over the rate at the first swept value.
    pub normalized_rate: String,
    pub mean_coverage: String,
    pub mean_relative_coverage: String,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Builds rows for `runs[value][workload]`.
pub fn sweep_rows(
    dimension: &str,
    values: &[String],
    runs: &[Vec<RunResult>],
    cfg: &ExperimentConfig,
) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for (value, value_runs) in values.iter().zip(runs) {
        for (w, run) in value_runs.iter().enumerate() {
            let base = runs[0][w].summary.rate;
            let s = &run.summary;
            rows.push(SweepRow {
                dimension: dimension.to_string(),
                value: value.clone(),
                workload: s.name.clone(),
                category: s.category.clone(),
                scheme: cfg.scheme.to_string(),
                accounting: s.accounting.to_string(),
                seed: cfg.seed,
                rate: format!("{:.6}", s.rate),
                normalized_rate: format!("{:.6}", s.rate / base),
                mean_coverage: opt(mean(run.frames.iter().map(|f| f.coverage))),
                mean_relative_coverage: opt(mean(run.frames.iter().map(|f| f.relative_coverage))),
            });
        }
    }
    rows
}

pub fn write_rows_csv<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Coherence metrics for one frame; change metrics compare with the
/// previous frame and are empty for frame 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeRow {
    pub workload: String,
    pub frame: usize,
    pub unique_colors: usize,
    pub entropy_bpp: String,
    pub cdf_top1: String,
    pub cdf_top8: String,
    pub cdf_top64: String,
    pub cdf_top100: String,
    pub cdf_top256: String,
    pub pixel_change: String,
    /// Histogram L1 distance over twice the pixel count.
    pub color_change: String,
}

pub fn analyze(trace: &SurfaceTrace) -> Result<Vec<AnalyzeRow>> {
    let frames = trace.frames();
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let cdf = color_cdf_points(f, &CDF_POINTS);
            let (pc, cc) = if i == 0 {
                (None, None)
            } else {
                (
                    Some(pixel_change(&frames[i - 1], f)?),
                    Some(color_change(&frames[i - 1], f)?),
                )
            };
            Ok(AnalyzeRow {
                workload: trace.name.clone(),
                frame: i,
                unique_colors: histogram(f).len(),
                entropy_bpp: format!("{:.6}", entropy(f)),
                cdf_top1: format!("{:.6}", cdf[0]),
                cdf_top8: format!("{:.6}", cdf[1]),
                cdf_top64: format!("{:.6}", cdf[2]),
                cdf_top100: format!("{:.6}", cdf[3]),
                cdf_top256: format!("{:.6}", cdf[4]),
                pixel_change: opt(pc),
                color_change: opt(cc),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Scheme;
    use crate::engine::{run_trace, RunConfig};
    use crate::surface::Frame;
    use crate::trace::Category;

    fn trace() -> SurfaceTrace {
        let f = |c| Frame::filled(16, 8, c).unwrap();
        SurfaceTrace::new("t", Category::Ui, vec![f(1), f(1), f(2)]).unwrap()
    }

    #[test]
    fn frame_csv_has_documented_header() {
        let cfg = ExperimentConfig::default();
        let run = run_trace(&trace(), &RunConfig::for_scheme(Scheme::Vdcp)).unwrap();
        let mut buf = Vec::new();
        write_frames_csv(&mut buf, &[run], &cfg).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "workload,category,scheme,accounting,seed,frame,uncompressed_bits,payload_bits,csb_bits,\
             uncompressed_bursts,charged_bursts,csb_bursts,rate,coverage,relative_coverage,ccd_size,\
             compression_enabled,vdcp_blocks,ras_blocks,rccd_bytes"
        );
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn summary_json_names_seed_and_categories() {
        let cfg = ExperimentConfig {
            seed: 77,
            ..Default::default()
        };
        let run = run_trace(&trace(), &RunConfig::for_scheme(Scheme::Vdcp)).unwrap();
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &[run], &cfg).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["seed"], 77);
        assert_eq!(v["categories"][0]["category"], "UI");
    }

    #[test]
    fn analyze_rows() {
        let rows = analyze(&trace()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].pixel_change, "");
        assert_eq!(rows[1].pixel_change, "0.000000");
        assert_eq!(rows[2].color_change, "1.000000");
    }
}
