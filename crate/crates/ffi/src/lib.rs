//! C interface to the `dcp` compression toolkit.
//!
//! Objects are opaque handles created by `*_new`/`*_load`/`*_generate` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`DcpStatus`]; on failure [`dcp_last_error`] describes the problem for
//! the calling thread. Strings are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use dcp::bandwidth::{charge_block, csb_bits, Traffic};
use dcp::codec::Scheme;
use dcp::config::{ConfigOverrides, ExperimentConfig};
use dcp::engine::{run_trace, RunResult};
use dcp::surface::Frame;
use dcp::synth::{generate, Generator, SynthParams};
use dcp::trace::{load_trace, Category, SurfaceTrace};
use dcp::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Io = 4,
    Data = 5,
    Corrupt = 6,
    Verification = 7,
    Panic = 8,
}

/// Experiment settings. Starts at the baseline configuration.
pub struct DcpConfig(ExperimentConfig);

/// A loaded or generated frame trace.
pub struct DcpTrace(SurfaceTrace);

/// Per-frame and summary results of one run.
pub struct DcpResult(RunResult);

/// Traffic totals, in bits and 128-bit bursts.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DcpTraffic {
    pub uncompressed_bits: u64,
    pub payload_bits: u64,
    pub csb_bits: u64,
    pub uncompressed_bursts: u64,
    pub charged_bursts: u64,
    pub csb_bursts: u64,
}

/// One measured frame. `coverage` is negative when undefined.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DcpFrameStats {
    pub frame: u64,
    pub traffic: DcpTraffic,
    pub rate: f64,
    pub coverage: f64,
    pub ccd_size: u32,
    pub compression_enabled: bool,
    pub vdcp_blocks: u64,
    pub ras_blocks: u64,
    pub rccd_bytes: u64,
}

impl From<Traffic> for DcpTraffic {
    fn from(t: Traffic) -> Self {
        Self {
            uncompressed_bits: t.uncompressed_bits,
            payload_bits: t.payload_bits,
            csb_bits: t.csb_bits,
            uncompressed_bursts: t.uncompressed_bursts,
            charged_bursts: t.charged_bursts,
            csb_bursts: t.csb_bursts,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> DcpStatus {
    match e {
        Error::Config(_) => DcpStatus::Config,
        Error::Io(_) | Error::MissingManifest(_) => DcpStatus::Io,
        Error::Corrupt(_) => DcpStatus::Corrupt,
        Error::Verification { .. } => DcpStatus::Verification,
        _ => DcpStatus::Data,
    }
}

struct Failure(DcpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn fail(status: DcpStatus, msg: impl Into<String>) -> FfiResult<()> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> DcpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DcpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DcpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(DcpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DcpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(DcpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Failure(DcpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return fail(DcpStatus::NullPointer, "output pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn dcp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn dcp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Bursts charged for a block with `payload_bits` of compressed data.
#[no_mangle]
pub extern "C" fn dcp_charge_block(payload_bits: u32) -> u32 {
    charge_block(payload_bits).charged_bursts
}

/// # Safety
/// `scheme` must be a valid C string and `out_bits` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_csb_bits(
    width: u32,
    height: u32,
    scheme: *const c_char,
    out_bits: *mut u64,
) -> DcpStatus {
    guard(|| {
        let scheme: Scheme = str_arg(scheme, "scheme")?.parse()?;
        let out = handle_mut(out_bits, "out_bits")?;
        *out = csb_bits(width, height, scheme);
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_config_new(out: *mut *mut DcpConfig) -> DcpStatus {
    guard(|| put(out, DcpConfig(ExperimentConfig::default())))
}

/// # Safety
/// `config` must come from [`dcp_config_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn dcp_config_free(config: *mut DcpConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Applies settings from a TOML file on top of the current ones.
///
/// # Safety
/// `config` must be a live handle and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn dcp_config_load(config: *mut DcpConfig, path: *const c_char) -> DcpStatus {
    guard(|| {
        let cfg = handle_mut(config, "config")?;
        let file = ConfigOverrides::load(str_arg(path, "path")?)?;
        let next = file.apply(cfg.0.clone());
        next.validate()?;
        cfg.0 = next;
        Ok(())
    })
}

/// Sets one option by its command-line name (without dashes), e.g.
/// `scheme`, `fvc-size`, `policy`, `assoc`, `pixel-sampling`,
/// `frame-sampling`, `ccd-size`, `vdcp-sizing`, `ct`, `accounting`, `seed`,
/// `verify-full`, `verify-fraction`, `parallel`. The whole configuration is
/// revalidated; on failure it is left unchanged.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` valid C strings.
#[no_mangle]
pub unsafe extern "C" fn dcp_config_set(
    config: *mut DcpConfig,
    key: *const c_char,
    value: *const c_char,
) -> DcpStatus {
    guard(|| {
        let cfg = handle_mut(config, "config")?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        let quoted = match key {
            "scheme" | "policy" | "assoc" | "accounting" | "vdcp-sizing" => format!("{value:?}"),
            _ => value.to_string(),
        };
        let overrides = ConfigOverrides::from_toml(&format!("{key} = {quoted}"))
            .map_err(|e| Failure(DcpStatus::InvalidArgument, e.to_string()))?;
        let next = overrides.apply(cfg.0.clone());
        next.validate()?;
        cfg.0 = next;
        Ok(())
    })
}

/// Loads a trace directory.
///
/// # Safety
/// `path` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_trace_load(path: *const c_char, out: *mut *mut DcpTrace) -> DcpStatus {
    guard(|| {
        let trace = load_trace(Path::new(str_arg(path, "path")?))?;
        put(out, DcpTrace(trace))
    })
}

/// Builds a trace from `frame_count` packed RGBA8888 frames stored back to
/// back in `rgba` (`len` bytes).
///
/// # Safety
/// `name` must be a valid C string, `rgba` readable for `len` bytes, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_trace_from_rgba(
    name: *const c_char,
    width: u32,
    height: u32,
    frame_count: u32,
    rgba: *const u8,
    len: usize,
    out: *mut *mut DcpTrace,
) -> DcpStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        if rgba.is_null() {
            return fail(DcpStatus::NullPointer, "rgba is null");
        }
        let frame_bytes = width as usize * height as usize * 4;
        if frame_bytes == 0 || frame_bytes.checked_mul(frame_count as usize) != Some(len) {
            return fail(
                DcpStatus::InvalidArgument,
                format!("{len} bytes do not hold {frame_count} {width}x{height} RGBA frames"),
            );
        }
        let bytes = std::slice::from_raw_parts(rgba, len);
        let frames = bytes
            .chunks_exact(frame_bytes)
            .map(|f| {
                let px = f
                    .chunks_exact(4)
                    .map(|p| u32::from_le_bytes([p[0], p[1], p[2], p[3]]))
                    .collect();
                Frame::new(width, height, px)
            })
            .collect::<dcp::Result<Vec<_>>>()?;
        put(
            out,
            DcpTrace(SurfaceTrace::new(name, Category::Unknown, frames)?),
        )
    })
}

/// Generates a synthetic trace (`ui-like`, `2d-like`, `noise`, `gradient`).
///
/// # Safety
/// `generator` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_trace_generate(
    generator: *const c_char,
    width: u32,
    height: u32,
    frame_count: u32,
    seed: u64,
    out: *mut *mut DcpTrace,
) -> DcpStatus {
    guard(|| {
        let generator: Generator = str_arg(generator, "generator")?.parse()?;
        let params = SynthParams::new(generator, width, height, frame_count as usize, seed);
        put(out, DcpTrace(generate(&params)?))
    })
}

/// # Safety
/// `trace` must come from a `dcp_trace_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn dcp_trace_free(trace: *mut DcpTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Frame count, or 0 for a null handle.
///
/// # Safety
/// `trace` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dcp_trace_frame_count(trace: *const DcpTrace) -> u32 {
    trace.as_ref().map_or(0, |t| t.0.len() as u32)
}

/// Runs the configured scheme over `trace`.
///
/// # Safety
/// `trace` and `config` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_run(
    trace: *const DcpTrace,
    config: *const DcpConfig,
    out: *mut *mut DcpResult,
) -> DcpStatus {
    guard(|| {
        let trace = handle(trace, "trace")?;
        let config = handle(config, "config")?;
        let result = run_trace(&trace.0, &config.0.run()?)?;
        put(out, DcpResult(result))
    })
}

/// # Safety
/// `result` must come from [`dcp_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn dcp_result_free(result: *mut DcpResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Workload compression rate, or NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dcp_result_rate(result: *const DcpResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.summary.rate)
}

/// Number of measured frames (the warm-up frame is not included).
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dcp_result_frame_count(result: *const DcpResult) -> u32 {
    result.as_ref().map_or(0, |r| r.0.frames.len() as u32)
}

/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_result_totals(
    result: *const DcpResult,
    out: *mut DcpTraffic,
) -> DcpStatus {
    guard(|| {
        let r = handle(result, "result")?;
        *handle_mut(out, "out")? = r.0.summary.traffic.into();
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_result_frame(
    result: *const DcpResult,
    index: u32,
    out: *mut DcpFrameStats,
) -> DcpStatus {
    guard(|| {
        let r = handle(result, "result")?;
        let Some(f) = r.0.frames.get(index as usize) else {
            return fail(
                DcpStatus::InvalidArgument,
                format!("frame {index} out of range ({} measured)", r.0.frames.len()),
            );
        };
        *handle_mut(out, "out")? = DcpFrameStats {
            frame: f.frame as u64,
            traffic: f.traffic.into(),
            rate: f.traffic.rate(r.0.summary.accounting),
            coverage: f.coverage.unwrap_or(-1.0),
            ccd_size: f.ccd_size as u32,
            compression_enabled: f.compression_enabled,
            vdcp_blocks: f.vdcp_blocks,
            ras_blocks: f.ras_blocks,
            rccd_bytes: f.rccd_bytes,
        };
        Ok(())
    })
}
