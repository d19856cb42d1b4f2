//! ESRI ASCII grids and the flat binary "H2AR" container.
//!
//! flat_binary layout (little endian): magic `H2AR`, u32 n_cols, u32 n_rows,
//! f64 origin_lon, f64 origin_lat, f64 cell_size, then n_rows * n_cols f64
//! values row-major from the north edge. Missing cells are stored as NaN.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, RasterGrid, DEFAULT_NODATA};
use crate::error::{Error, Result};

pub const FLAT_MAGIC: &[u8; 4] = b"H2AR";
pub const FLAT_HEADER_LEN: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterFormat {
    EsriAscii,
    FlatBinary,
}

impl RasterFormat {
    /// `.asc` is ESRI ASCII, anything else is flat binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("asc") => RasterFormat::EsriAscii,
            _ => RasterFormat::FlatBinary,
        }
    }
}

pub fn load_raster(path: impl AsRef<Path>, format: RasterFormat) -> Result<RasterGrid> {
    let path = path.as_ref();
    match format {
        RasterFormat::EsriAscii => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_esri_ascii(&text, &path.display().to_string())
        }
        RasterFormat::FlatBinary => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_flat(&bytes, &path.display().to_string())
        }
    }
}

pub fn save_raster(grid: &RasterGrid, path: impl AsRef<Path>, format: RasterFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        RasterFormat::EsriAscii => format_esri_ascii(grid).into_bytes(),
        RasterFormat::FlatBinary => encode_flat(grid),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads with the format implied by the file extension.
pub fn load_raster_auto(path: impl AsRef<Path>) -> Result<RasterGrid> {
    let path = path.as_ref();
    load_raster(path, RasterFormat::from_path(path))
}

pub fn save_raster_auto(grid: &RasterGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_raster(grid, path, RasterFormat::from_path(path))
}

#[derive(Default)]
struct EsriHeader {
    ncols: Option<usize>,
    nrows: Option<usize>,
    x: Option<(f64, bool)>,
    y: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

pub fn parse_esri_ascii(text: &str, context: &str) -> Result<RasterGrid> {
    let mut header = EsriHeader::default();
    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(idx, line)) = lines.peek() {
        let lineno = idx + 1;
        let mut parts = line.split_whitespace();
        let Some(key) = parts.next() else {
            lines.next();
            continue;
        };
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        let raw = parts
            .next()
            .ok_or_else(|| Error::parse(context, lineno, format!("header key '{key}' has no value")))?;
        if parts.next().is_some() {
            return Err(Error::parse(context, lineno, format!("trailing tokens after '{key}'")));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::parse(context, lineno, format!("'{key}' value '{s}' is not a number")))
        };
        let count = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::parse(context, lineno, format!("'{key}' value '{s}' is not a count")))
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => header.ncols = Some(count(raw)?),
            "nrows" => header.nrows = Some(count(raw)?),
            "xllcorner" => header.x = Some((num(raw)?, false)),
            "xllcenter" => header.x = Some((num(raw)?, true)),
            "yllcorner" => header.y = Some((num(raw)?, false)),
            "yllcenter" => header.y = Some((num(raw)?, true)),
            "cellsize" => header.cellsize = Some(num(raw)?),
            "nodata_value" => header.nodata = Some(num(raw)?),
            _ => return Err(Error::parse(context, lineno, format!("unknown header key '{key}'"))),
        }
        lines.next();
    }

    let header_line = lines.peek().map(|&(i, _)| i + 1).unwrap_or(text.lines().count() + 1);
    let missing = |k: &str| Error::parse(context, header_line, format!("header is missing '{k}'"));
    let ncols = header.ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = header.nrows.ok_or_else(|| missing("nrows"))?;
    let cellsize = header.cellsize.ok_or_else(|| missing("cellsize"))?;
    let (x, x_center) = header.x.ok_or_else(|| missing("xllcorner"))?;
    let (y, y_center) = header.y.ok_or_else(|| missing("yllcorner"))?;
    let nodata = header.nodata.unwrap_or(DEFAULT_NODATA);
    let origin_lon = if x_center { x - 0.5 * cellsize } else { x };
    let origin_lat = if y_center { y - 0.5 * cellsize } else { y };
    let spec = GridSpec::new(ncols, nrows, origin_lon, origin_lat, cellsize)?;

    let mut cells = Vec::with_capacity(spec.len());
    for (idx, line) in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(context, idx + 1, format!("cell value '{tok}' is not a number")))?;
            cells.push(v);
        }
    }
    RasterGrid::new(spec, nodata, cells)
}

pub fn format_esri_ascii(grid: &RasterGrid) -> String {
    let s = &grid.spec;
    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", s.n_cols);
    let _ = writeln!(out, "nrows {}", s.n_rows);
    let _ = writeln!(out, "xllcorner {:?}", s.origin_lon);
    let _ = writeln!(out, "yllcorner {:?}", s.origin_lat);
    let _ = writeln!(out, "cellsize {:?}", s.cell_size);
    let _ = writeln!(out, "NODATA_value {:?}", grid.nodata);
    for row in grid.cells.chunks(s.n_cols) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v:?}");
        }
        out.push('\n');
    }
    out
}

pub fn encode_flat(grid: &RasterGrid) -> Vec<u8> {
    let s = &grid.spec;
    let mut out = Vec::with_capacity(FLAT_HEADER_LEN + 8 * grid.cells.len());
    out.extend_from_slice(FLAT_MAGIC);
    out.extend_from_slice(&(s.n_cols as u32).to_le_bytes());
    out.extend_from_slice(&(s.n_rows as u32).to_le_bytes());
    out.extend_from_slice(&s.origin_lon.to_le_bytes());
    out.extend_from_slice(&s.origin_lat.to_le_bytes());
    out.extend_from_slice(&s.cell_size.to_le_bytes());
    for &v in &grid.cells {
        let v = if grid.is_nodata(v) { f64::NAN } else { v };
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_flat(bytes: &[u8], context: &str) -> Result<RasterGrid> {
    if bytes.len() < FLAT_HEADER_LEN {
        return Err(Error::Structural(format!(
            "{context}: {} bytes is shorter than the {FLAT_HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != FLAT_MAGIC {
        return Err(Error::Structural(format!("{context}: bad magic, expected H2AR")));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let spec = GridSpec::new(u32_at(4), u32_at(8), f64_at(12), f64_at(20), f64_at(28))?;
    let payload = &bytes[FLAT_HEADER_LEN..];
    if payload.len() != 8 * spec.len() {
        return Err(Error::Structural(format!(
            "{context}: payload holds {} bytes, header implies {}",
            payload.len(),
            8 * spec.len()
        )));
    }
    let cells = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    RasterGrid::new(spec, f64::NAN, cells)
}
