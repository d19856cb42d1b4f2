//! C ABI for h2potential.
//!
//! Every fallible function returns an `H2pStatus`; on failure the message is
//! available from `h2p_last_error` on the same thread. Handles are opaque and
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;

use h2potential::config::Overrides;
use h2potential::geodata::{distance_to_feature, load_raster_auto, Mask, RasterGrid};
use h2potential::h2opt::h2_potential_from_generation_twh;
use h2potential::pipeline::{write_fixture, Pipeline, Stage};
use h2potential::res_sim::{lcoe, TechnoEconomics};
use h2potential::water::{desal_transport_cost, sustainable_yield_value, DesalParams};
use h2potential::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H2pStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Input = 4,
    Io = 5,
    Stage = 6,
    Infeasible = 7,
    OutOfRange = 8,
    Panic = 9,
    Other = 10,
}

/// A completed or in-progress pipeline run.
pub struct H2pPipeline {
    inner: Pipeline,
}

/// A raster grid held by the library.
pub struct H2pRaster {
    inner: RasterGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> H2pStatus {
    match e {
        Error::Config(_) => H2pStatus::Config,
        Error::Io { .. } => H2pStatus::Io,
        Error::Stage { .. } => H2pStatus::Stage,
        Error::Infeasible { .. } => H2pStatus::Infeasible,
        Error::Input(_) | Error::Parse { .. } | Error::Structural(_) | Error::Alignment(_) | Error::Geometry { .. } => {
            H2pStatus::Input
        }
        _ => H2pStatus::Other,
    }
}

fn fail(e: Error) -> H2pStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Runs `f`, turning panics into `H2pStatus::Panic`.
fn guard(f: impl FnOnce() -> H2pStatus) -> H2pStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            H2pStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, H2pStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(H2pStatus::NullArgument);
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error(format!("{what} is not valid UTF-8"));
            Err(H2pStatus::InvalidUtf8)
        }
    }
}

macro_rules! out_ptr {
    ($p:expr, $what:expr) => {
        if $p.is_null() {
            set_error(concat!($what, " is null"));
            return H2pStatus::NullArgument;
        }
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failure on this thread; empty if none. Valid until the next call.
#[no_mangle]
pub extern "C" fn h2p_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn h2p_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------- pipeline

/// Opens a run from a TOML configuration. `out_dir` may be null to use the configured one.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_pipeline_open(
    config_path: *const c_char,
    out_dir: *const c_char,
    out: *mut *mut H2pPipeline,
) -> H2pStatus {
    guard(|| {
        out_ptr!(out, "out");
        let cfg = try_status!(path_arg(config_path, "config_path"));
        let overrides = Overrides {
            output_dir: if out_dir.is_null() { None } else { Some(try_status!(path_arg(out_dir, "out_dir"))) },
            ..Default::default()
        };
        match Pipeline::new(&cfg, &overrides) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(H2pPipeline { inner: p }));
                H2pStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of stages; valid indices for `h2p_pipeline_run_through` are `0..count`.
#[no_mangle]
pub extern "C" fn h2p_stage_count() -> u32 {
    Stage::ALL.len() as u32
}

/// Directory name of stage `index`, or null when out of range.
#[no_mangle]
pub extern "C" fn h2p_stage_name(index: u32) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| Stage::ALL.iter().map(|s| CString::new(s.dir_name()).unwrap()).collect());
    names.get(index as usize).map_or(std::ptr::null(), |s| s.as_ptr())
}

/// Runs stage `index` and everything upstream of it that is not current.
///
/// # Safety
/// `p` must come from `h2p_pipeline_open` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn h2p_pipeline_run_through(p: *mut H2pPipeline, index: u32) -> H2pStatus {
    guard(|| {
        out_ptr!(p, "pipeline");
        let Some(&stage) = Stage::ALL.get(index as usize) else {
            set_error(format!("stage index {index} out of range"));
            return H2pStatus::OutOfRange;
        };
        match (*p).inner.run_through(stage) {
            Ok(()) => H2pStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Runs every stage and writes the manifest and report.
///
/// # Safety
/// `p` must come from `h2p_pipeline_open` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn h2p_pipeline_run_all(p: *mut H2pPipeline) -> H2pStatus {
    guard(|| {
        out_ptr!(p, "pipeline");
        let inner = &mut (*p).inner;
        match inner.run_all().and_then(|_| inner.write_report()) {
            Ok(_) => H2pStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// 1 if the stage output is current, 0 otherwise (including a bad index).
///
/// # Safety
/// `p` must come from `h2p_pipeline_open` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn h2p_pipeline_is_current(p: *const H2pPipeline, index: u32) -> i32 {
    if p.is_null() {
        return 0;
    }
    Stage::ALL.get(index as usize).map_or(0, |&s| i32::from((*p).inner.is_current(s)))
}

/// # Safety
/// `p` must be null or come from `h2p_pipeline_open`; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn h2p_pipeline_free(p: *mut H2pPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the synthetic 12-region study area into `out_dir`, with `config.toml` inside.
///
/// # Safety
/// `out_dir` must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn h2p_fixture_write(seed: u64, out_dir: *const c_char) -> H2pStatus {
    guard(|| {
        let dir = try_status!(path_arg(out_dir, "out_dir"));
        match write_fixture(seed, &dir) {
            Ok(_) => H2pStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

// ---------------------------------------------------------------- rasters

/// Loads an ESRI ASCII (`.asc`) or flat binary raster.
///
/// # Safety
/// `path` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_raster_load(path: *const c_char, out: *mut *mut H2pRaster) -> H2pStatus {
    guard(|| {
        out_ptr!(out, "out");
        let path = try_status!(path_arg(path, "path"));
        match load_raster_auto(&path) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(H2pRaster { inner: g }));
                H2pStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds a raster from `cols * rows` row-major values, row 0 north.
///
/// # Safety
/// `values` must point to `cols * rows` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_raster_new(
    cols: usize,
    rows: usize,
    origin_lon: f64,
    origin_lat: f64,
    cell_size: f64,
    nodata: f64,
    values: *const f64,
    out: *mut *mut H2pRaster,
) -> H2pStatus {
    guard(|| {
        out_ptr!(out, "out");
        out_ptr!(values, "values");
        let spec = match h2potential::geodata::GridSpec::new(cols, rows, origin_lon, origin_lat, cell_size) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let cells = std::slice::from_raw_parts(values, cols * rows).to_vec();
        match RasterGrid::new(spec, nodata, cells) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(H2pRaster { inner: g }));
                H2pStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes columns and rows of `r`.
///
/// # Safety
/// `r` must be a live raster handle; `cols` and `rows` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_raster_dims(r: *const H2pRaster, cols: *mut usize, rows: *mut usize) -> H2pStatus {
    out_ptr!(r, "raster");
    out_ptr!(cols, "cols");
    out_ptr!(rows, "rows");
    *cols = (*r).inner.spec.n_cols;
    *rows = (*r).inner.spec.n_rows;
    H2pStatus::Ok
}

/// Copies all cells, row-major, into `buf` of length `len`.
///
/// # Safety
/// `r` must be a live raster handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn h2p_raster_copy(r: *const H2pRaster, buf: *mut f64, len: usize) -> H2pStatus {
    out_ptr!(r, "raster");
    out_ptr!(buf, "buf");
    let cells = &(*r).inner.cells;
    if len < cells.len() {
        set_error(format!("buffer holds {len} values, raster has {}", cells.len()));
        return H2pStatus::OutOfRange;
    }
    std::ptr::copy_nonoverlapping(cells.as_ptr(), buf, cells.len());
    H2pStatus::Ok
}

/// Distance in meters from every cell to the nearest non-zero cell of `features`.
///
/// # Safety
/// `features` must be a live raster handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_distance_to_feature(features: *const H2pRaster, out: *mut *mut H2pRaster) -> H2pStatus {
    guard(|| {
        out_ptr!(features, "features");
        out_ptr!(out, "out");
        let d = distance_to_feature(&Mask::from_raster(&(*features).inner));
        *out = Box::into_raw(Box::new(H2pRaster { inner: d }));
        H2pStatus::Ok
    })
}

/// # Safety
/// `r` must be null or a raster handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn h2p_raster_free(r: *mut H2pRaster) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

// ---------------------------------------------------------------- formulas

/// Levelized cost of electricity in EUR/kWh.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_lcoe(
    capex_eur_per_kw: f64,
    opex_share_per_year: f64,
    lifetime_years: u32,
    wacc: f64,
    aep_kwh_per_kw: f64,
    out: *mut f64,
) -> H2pStatus {
    out_ptr!(out, "out");
    let te = TechnoEconomics::new("ffi", 0, capex_eur_per_kw, opex_share_per_year, lifetime_years, wacc);
    match lcoe(&te, aep_kwh_per_kw) {
        Ok(v) => {
            *out = v;
            H2pStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Groundwater left for supplementary use, mm/a.
#[no_mangle]
pub extern "C" fn h2p_sustainable_yield(share: f64, recharge_mm: f64, consumption_mm: f64) -> f64 {
    sustainable_yield_value(share, recharge_mm, consumption_mm)
}

/// Delivered cost of desalinated water in EUR/m³ with default plant and pipeline parameters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn h2p_desal_cost(
    distance_to_coast_km: f64,
    elevation_gain_m: f64,
    electricity_eur_per_kwh: f64,
    out: *mut f64,
) -> H2pStatus {
    out_ptr!(out, "out");
    match desal_transport_cost(distance_to_coast_km, elevation_gain_m, electricity_eur_per_kwh, &DesalParams::default()) {
        Ok(v) => {
            *out = v;
            H2pStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Hydrogen (TWh, lower heating value) from converting `generation_twh` of electricity.
#[no_mangle]
pub extern "C" fn h2p_h2_potential_twh(generation_twh: f64, efficiency_kwh_per_kg: f64) -> f64 {
    h2_potential_from_generation_twh(generation_twh, efficiency_kwh_per_kg)
}
