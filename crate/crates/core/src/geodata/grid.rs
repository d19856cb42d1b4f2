use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel used when a format carries no nodata value of its own.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// Local-meter metric on a lon/lat grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct CellAreaModel;

impl CellAreaModel {
    pub const METERS_PER_DEGREE_LAT: f64 = 110_540.0;
    pub const METERS_PER_DEGREE_LON_EQUATOR: f64 = 111_320.0;

    pub fn meters_per_degree_lon_at(lat_deg: f64) -> f64 {
        Self::METERS_PER_DEGREE_LON_EQUATOR * lat_deg.to_radians().cos()
    }

    pub fn cell_area_m2(lat_center_deg: f64, cell_size_deg: f64) -> f64 {
        (Self::meters_per_degree_lon_at(lat_center_deg) * cell_size_deg)
            * (Self::METERS_PER_DEGREE_LAT * cell_size_deg)
    }
}

/// Geometry of a regular lon/lat grid. Row 0 is the northernmost row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_cols: usize,
    pub n_rows: usize,
    /// Lower-left corner.
    pub origin_lon: f64,
    pub origin_lat: f64,
    pub cell_size: f64,
}

impl GridSpec {
    pub fn new(
        n_cols: usize,
        n_rows: usize,
        origin_lon: f64,
        origin_lat: f64,
        cell_size: f64,
    ) -> Result<Self> {
        let spec = GridSpec {
            n_cols,
            n_rows,
            origin_lon,
            origin_lat,
            cell_size,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cols == 0 || self.n_rows == 0 {
            return Err(Error::Structural(format!(
                "grid must have at least one row and column, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(Error::Structural(format!(
                "cell_size must be positive, got {}",
                self.cell_size
            )));
        }
        if !self.origin_lon.is_finite() || !self.origin_lat.is_finite() {
            return Err(Error::Structural("grid origin must be finite".into()));
        }
        let top = self.origin_lat + self.n_rows as f64 * self.cell_size;
        if self.origin_lat < -90.0 || top > 90.0 {
            return Err(Error::Structural(format!(
                "grid latitude span [{}, {}] leaves [-90, 90]",
                self.origin_lat, top
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_cols * self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n_cols + col
    }

    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.n_cols, index % self.n_cols)
    }

    pub fn row_center_lat(&self, row: usize) -> f64 {
        self.origin_lat + ((self.n_rows - row) as f64 - 0.5) * self.cell_size
    }

    pub fn col_center_lon(&self, col: usize) -> f64 {
        self.origin_lon + (col as f64 + 0.5) * self.cell_size
    }

    pub fn cell_center(&self, index: usize) -> (f64, f64) {
        let (r, c) = self.row_col(index);
        (self.col_center_lon(c), self.row_center_lat(r))
    }

    pub fn cell_area_m2(&self, row: usize) -> f64 {
        CellAreaModel::cell_area_m2(self.row_center_lat(row), self.cell_size)
    }

    pub fn cell_area_km2(&self, row: usize) -> f64 {
        self.cell_area_m2(row) * 1e-6
    }

    /// Area in km² of the cell with flat index `index`.
    pub fn area_km2_at(&self, index: usize) -> f64 {
        self.cell_area_km2(index / self.n_cols)
    }

    /// Cell-center distance in meters between rows `r1`, `r2` that are `dcol` columns apart.
    /// The longitude scale uses the mean latitude of the two centers.
    pub fn center_distance_m(&self, r1: usize, r2: usize, dcol: usize) -> f64 {
        let mean_lat = 0.5 * (self.row_center_lat(r1) + self.row_center_lat(r2));
        let dx = dcol as f64 * self.cell_size * CellAreaModel::meters_per_degree_lon_at(mean_lat);
        let dy = r1.abs_diff(r2) as f64 * self.cell_size * CellAreaModel::METERS_PER_DEGREE_LAT;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn check_aligned(&self, other: &GridSpec, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::Alignment(format!(
                "{what}: grid {}x{} @ ({}, {}) / {} does not match reference {}x{} @ ({}, {}) / {}",
                other.n_rows,
                other.n_cols,
                other.origin_lon,
                other.origin_lat,
                other.cell_size,
                self.n_rows,
                self.n_cols,
                self.origin_lon,
                self.origin_lat,
                self.cell_size
            )));
        }
        Ok(())
    }
}

/// Scalar raster. Cells equal to `nodata` are missing; all others are finite,
/// except distance fields which may hold `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    pub spec: GridSpec,
    pub nodata: f64,
    pub cells: Vec<f64>,
}

impl RasterGrid {
    pub fn new(spec: GridSpec, nodata: f64, cells: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if cells.len() != spec.len() {
            return Err(Error::Structural(format!(
                "expected {} cells ({} x {}), found {}",
                spec.len(),
                spec.n_rows,
                spec.n_cols,
                cells.len()
            )));
        }
        let grid = RasterGrid {
            spec,
            nodata,
            cells,
        };
        if let Some(i) = grid
            .cells
            .iter()
            .position(|&v| !grid.is_nodata(v) && !v.is_finite())
        {
            return Err(Error::Structural(format!(
                "cell {i} holds a non-finite value that is not nodata"
            )));
        }
        Ok(grid)
    }

    /// Grid with every cell set to `value`.
    pub fn filled(spec: GridSpec, value: f64) -> Self {
        RasterGrid {
            spec,
            nodata: DEFAULT_NODATA,
            cells: vec![value; spec.len()],
        }
    }

    pub(crate) fn from_parts_unchecked(spec: GridSpec, nodata: f64, cells: Vec<f64>) -> Self {
        debug_assert_eq!(cells.len(), spec.len());
        RasterGrid {
            spec,
            nodata,
            cells,
        }
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata || (self.nodata.is_nan() && v.is_nan())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[self.spec.index(row, col)]
    }

    /// Value at `index`, `None` when missing.
    pub fn value(&self, index: usize) -> Option<f64> {
        let v = self.cells[index];
        (!self.is_nodata(v)).then_some(v)
    }

    pub fn nodata_count(&self) -> usize {
        self.cells.iter().filter(|&&v| self.is_nodata(v)).count()
    }

    /// Cell-wise map; nodata stays nodata.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> RasterGrid {
        let cells = self
            .cells
            .iter()
            .map(|&v| if self.is_nodata(v) { self.nodata } else { f(v) })
            .collect();
        RasterGrid::from_parts_unchecked(self.spec, self.nodata, cells)
    }

    /// Cell-wise combination of two aligned grids; nodata in either input yields nodata.
    pub fn zip_with(
        &self,
        other: &RasterGrid,
        what: &str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<RasterGrid> {
        self.spec.check_aligned(&other.spec, what)?;
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(&a, &b)| {
                if self.is_nodata(a) || other.is_nodata(b) {
                    self.nodata
                } else {
                    f(a, b)
                }
            })
            .collect();
        Ok(RasterGrid::from_parts_unchecked(self.spec, self.nodata, cells))
    }
}

/// Boolean raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub spec: GridSpec,
    pub cells: Vec<bool>,
}

impl Mask {
    pub fn new(spec: GridSpec, cells: Vec<bool>) -> Result<Self> {
        spec.validate()?;
        if cells.len() != spec.len() {
            return Err(Error::Structural(format!(
                "expected {} mask cells, found {}",
                spec.len(),
                cells.len()
            )));
        }
        Ok(Mask { spec, cells })
    }

    pub fn empty(spec: GridSpec) -> Self {
        Mask {
            spec,
            cells: vec![false; spec.len()],
        }
    }

    pub fn from_indices(spec: GridSpec, indices: &[usize]) -> Self {
        let mut m = Mask::empty(spec);
        for &i in indices {
            m.cells[i] = true;
        }
        m
    }

    /// True where the raster holds a non-zero value. Nodata cells are false.
    pub fn from_raster(grid: &RasterGrid) -> Self {
        Mask {
            spec: grid.spec,
            cells: grid
                .cells
                .iter()
                .map(|&v| !grid.is_nodata(v) && v != 0.0)
                .collect(),
        }
    }

    /// True where the raster is nodata.
    pub fn nodata_of(grid: &RasterGrid) -> Self {
        Mask {
            spec: grid.spec,
            cells: grid.cells.iter().map(|&v| grid.is_nodata(v)).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn to_raster(&self) -> RasterGrid {
        RasterGrid::from_parts_unchecked(
            self.spec,
            DEFAULT_NODATA,
            self.cells.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equator_cell_area_matches_closed_form() {
        let spec = GridSpec::new(1, 1, 10.0, -0.005, 0.01).unwrap();
        let expected = 111_320.0 * 110_540.0 * 1e-4;
        let got = spec.cell_area_m2(0);
        assert!(((got - expected) / expected).abs() < 1e-9);
    }

    #[test]
    fn cell_area_decreases_with_latitude() {
        let spec = GridSpec::new(1, 80, 0.0, 0.0, 1.0).unwrap();
        // row 0 is the northernmost, so areas increase with row index here
        for r in 1..80 {
            assert!(spec.cell_area_m2(r) > spec.cell_area_m2(r - 1));
        }
    }

    #[test]
    fn one_column_apart_at_equator() {
        let spec = GridSpec::new(3, 1, 0.0, -0.005, 0.01).unwrap();
        assert_eq!(spec.row_center_lat(0), 0.0);
        let d = spec.center_distance_m(0, 0, 1);
        assert!((d - 1113.2).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(GridSpec::new(0, 3, 0.0, 0.0, 1.0).is_err());
        assert!(GridSpec::new(3, 3, 0.0, 0.0, 0.0).is_err());
        assert!(GridSpec::new(3, 3, 0.0, 89.0, 1.0).is_err());
        let spec = GridSpec::new(2, 2, 0.0, 0.0, 1.0).unwrap();
        assert!(RasterGrid::new(spec, -9999.0, vec![1.0; 3]).is_err());
        assert!(RasterGrid::new(spec, -9999.0, vec![1.0, f64::NAN, 1.0, 1.0]).is_err());
        assert!(RasterGrid::new(spec, -9999.0, vec![1.0, -9999.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn nodata_propagates_through_zip() {
        let spec = GridSpec::new(2, 1, 0.0, 0.0, 1.0).unwrap();
        let a = RasterGrid::new(spec, -9999.0, vec![1.0, -9999.0]).unwrap();
        let b = RasterGrid::new(spec, -9999.0, vec![2.0, 3.0]).unwrap();
        let c = a.zip_with(&b, "test", |x, y| x + y).unwrap();
        assert_eq!(c.cells, vec![3.0, -9999.0]);
    }
}
