use std::ffi::{CStr, CString};
use std::ptr;

use dcp_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dcp_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn generated(gen: &str, seed: u64) -> *mut DcpTrace {
    let mut t = ptr::null_mut();
    let st = unsafe { dcp_trace_generate(c(gen).as_ptr(), 64, 48, 4, seed, &mut t) };
    assert_eq!(st, DcpStatus::Ok, "{}", last_error());
    t
}

#[test]
fn full_lifecycle() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(dcp_config_new(&mut cfg), DcpStatus::Ok);
        assert_eq!(
            dcp_config_set(cfg, c("scheme").as_ptr(), c("hdcp").as_ptr()),
            DcpStatus::Ok
        );
        assert_eq!(
            dcp_config_set(cfg, c("fvc-size").as_ptr(), c("128").as_ptr()),
            DcpStatus::Ok
        );
        assert_eq!(
            dcp_config_set(cfg, c("parallel").as_ptr(), c("false").as_ptr()),
            DcpStatus::Ok
        );
        assert_eq!(last_error(), "");

        let trace = generated("ui-like", 5);
        assert_eq!(dcp_trace_frame_count(trace), 4);

        let mut res = ptr::null_mut();
        assert_eq!(
            dcp_run(trace, cfg, &mut res),
            DcpStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(dcp_result_frame_count(res), 3);
        assert!(dcp_result_rate(res) > 1.0);

        let mut totals = std::mem::zeroed::<DcpTraffic>();
        assert_eq!(dcp_result_totals(res, &mut totals), DcpStatus::Ok);
        assert_eq!(totals.uncompressed_bursts, 3 * 48 * 16);

        let mut sum = 0;
        for i in 0..3 {
            let mut f = std::mem::zeroed::<DcpFrameStats>();
            assert_eq!(dcp_result_frame(res, i, &mut f), DcpStatus::Ok);
            assert_eq!(f.frame, u64::from(i) + 1);
            assert_eq!(f.vdcp_blocks + f.ras_blocks, 48);
            sum += f.traffic.charged_bursts;
        }
        assert_eq!(sum, totals.charged_bursts);

        let mut f = std::mem::zeroed::<DcpFrameStats>();
        assert_eq!(dcp_result_frame(res, 3, &mut f), DcpStatus::InvalidArgument);

        dcp_result_free(res);
        dcp_trace_free(trace);
        dcp_config_free(cfg);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(dcp_config_new(ptr::null_mut()), DcpStatus::NullPointer);
        assert!(last_error().contains("out"));
        let mut res = ptr::null_mut();
        assert_eq!(
            dcp_run(ptr::null(), ptr::null(), &mut res),
            DcpStatus::NullPointer
        );
        assert!(res.is_null());
        assert_eq!(dcp_trace_frame_count(ptr::null()), 0);
        assert!(dcp_result_rate(ptr::null()).is_nan());
        dcp_config_free(ptr::null_mut());
        dcp_trace_free(ptr::null_mut());
        dcp_result_free(ptr::null_mut());
    }
}

#[test]
fn bad_settings_leave_config_unchanged() {
    unsafe {
        let mut cfg = ptr::null_mut();
        dcp_config_new(&mut cfg);
        assert_eq!(
            dcp_config_set(cfg, c("colour").as_ptr(), c("1").as_ptr()),
            DcpStatus::InvalidArgument
        );
        assert!(!last_error().is_empty());
        assert_eq!(
            dcp_config_set(cfg, c("scheme").as_ptr(), c("zip").as_ptr()),
            DcpStatus::InvalidArgument
        );
        assert_eq!(
            dcp_config_set(cfg, c("fvc-size").as_ptr(), c("8").as_ptr()),
            DcpStatus::Config
        );
        assert!(last_error().contains("FVC size"));
        assert_eq!(
            dcp_config_set(cfg, c("fvc-size").as_ptr(), c("32").as_ptr()),
            DcpStatus::Ok
        );
        assert_eq!(last_error(), "");
        dcp_config_free(cfg);
    }
}

#[test]
fn config_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "scheme = \"ras\"\nseed = 9\n").unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        dcp_config_new(&mut cfg);
        let p = c(path.to_str().unwrap());
        assert_eq!(dcp_config_load(cfg, p.as_ptr()), DcpStatus::Ok);
        assert_eq!(
            dcp_config_load(cfg, c("/nonexistent/x.toml").as_ptr()),
            DcpStatus::Config
        );
        dcp_config_free(cfg);
    }
}

#[test]
fn rgba_length_must_match() {
    let frame = vec![0xffu8; 8 * 8 * 4 * 2];
    unsafe {
        let mut t = ptr::null_mut();
        let st = dcp_trace_from_rgba(
            c("w").as_ptr(),
            8,
            8,
            2,
            frame.as_ptr(),
            frame.len() - 4,
            &mut t,
        );
        assert_eq!(st, DcpStatus::InvalidArgument);
        assert!(t.is_null());
        let st = dcp_trace_from_rgba(
            c("w").as_ptr(),
            8,
            8,
            2,
            frame.as_ptr(),
            frame.len(),
            &mut t,
        );
        assert_eq!(st, DcpStatus::Ok, "{}", last_error());
        assert_eq!(dcp_trace_frame_count(t), 2);
        dcp_trace_free(t);
    }
}

#[test]
fn burst_helpers() {
    for (bits, bursts) in [(0, 0), (1, 1), (128, 1), (129, 2), (2048, 16), (4000, 16)] {
        assert_eq!(dcp_charge_block(bits), bursts);
    }
    let mut bits = 0;
    unsafe {
        assert_eq!(
            dcp_csb_bits(720, 1280, c("vdcp").as_ptr(), &mut bits),
            DcpStatus::Ok
        );
        assert_eq!(bits, 360 * 640 * 3);
        assert_eq!(
            dcp_csb_bits(720, 1280, c("ras").as_ptr(), &mut bits),
            DcpStatus::Ok
        );
        assert_eq!(bits, 90 * 160 * 2);
        assert_eq!(
            dcp_csb_bits(8, 8, c("nope").as_ptr(), &mut bits),
            DcpStatus::Config
        );
    }
}

#[test]
fn version_is_a_string() {
    let v = unsafe { CStr::from_ptr(dcp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
