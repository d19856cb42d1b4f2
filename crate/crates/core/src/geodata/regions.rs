//! Region boundaries (GeoJSON) and their rasterization by cell-center containment.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde_json::Value;

use super::grid::{CellAreaModel, GridSpec};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// A closed ring of (lon, lat) positions, first == last.
pub type Ring = Vec<(f64, f64)>;

/// Exterior ring followed by holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub rings: Vec<Ring>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary {
    pub id: String,
    pub country: String,
    pub polygons: Vec<Polygon>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: String,
    pub country_code: String,
    /// Sorted flat cell indices on the reference grid.
    pub mask: Vec<usize>,
    pub area_km2: f64,
}

impl Region {
    /// Region whose area is the summed cell area of `mask`.
    pub fn from_mask(id: &str, country: &str, mut mask: Vec<usize>, spec: &GridSpec) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::Contract(format!("region '{id}' has an empty mask")));
        }
        mask.sort_unstable();
        mask.dedup();
        if let Some(&i) = mask.last() {
            if i >= spec.len() {
                return Err(Error::Structural(format!(
                    "region '{id}' references cell {i} outside a grid of {} cells",
                    spec.len()
                )));
            }
        }
        let area_km2 = mask_area_km2(&mask, spec);
        Ok(Region {
            id: id.to_string(),
            country_code: country.to_string(),
            mask,
            area_km2,
        })
    }
}

pub fn mask_area_km2(mask: &[usize], spec: &GridSpec) -> f64 {
    let mut acc = CompensatedSum::new();
    for &i in mask {
        acc.add(spec.area_km2_at(i));
    }
    acc.value()
}

#[derive(Debug, Clone)]
pub struct RegionAssignment {
    /// For each grid cell, the index into `regions` of its owner.
    pub assignment: Vec<Option<usize>>,
    pub regions: Vec<Region>,
    pub warnings: Vec<String>,
}

impl RegionAssignment {
    pub fn region_of(&self, cell: usize) -> Option<&Region> {
        self.assignment[cell].map(|i| &self.regions[i])
    }
}

pub fn load_boundaries(path: impl AsRef<Path>) -> Result<Vec<RegionBoundary>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_boundaries(&text)
}

/// Parses a GeoJSON FeatureCollection whose features carry `gid` and `country` properties.
pub fn parse_boundaries(text: &str) -> Result<Vec<RegionBoundary>> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse("GeoJSON", e.line(), e.to_string()))?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::Structural("GeoJSON root must be a FeatureCollection".into()));
    }
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Structural("FeatureCollection has no 'features' array".into()))?;

    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(features.len());
    for (k, f) in features.iter().enumerate() {
        let props = f.get("properties");
        let prop = |name: &str| -> Result<String> {
            props
                .and_then(|p| p.get(name))
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| Error::Structural(format!("feature {k} lacks string property '{name}'")))
        };
        let id = prop("gid")?;
        let country = prop("country")?;
        if !seen.insert(id.clone()) {
            return Err(Error::Structural(format!("duplicate region id '{id}'")));
        }
        let geom = f
            .get("geometry")
            .ok_or_else(|| Error::Geometry { polygon: id.clone(), message: "missing geometry".into() })?;
        let polygons = parse_geometry(geom, &id)?;
        out.push(RegionBoundary { id, country, polygons });
    }
    Ok(out)
}

fn parse_geometry(geom: &Value, id: &str) -> Result<Vec<Polygon>> {
    let gerr = |m: &str| Error::Geometry { polygon: id.to_string(), message: m.to_string() };
    let kind = geom.get("type").and_then(Value::as_str).ok_or_else(|| gerr("geometry has no type"))?;
    let coords = geom.get("coordinates").ok_or_else(|| gerr("geometry has no coordinates"))?;
    let polys: Vec<&Value> = match kind {
        "Polygon" => vec![coords],
        "MultiPolygon" => coords
            .as_array()
            .ok_or_else(|| gerr("MultiPolygon coordinates must be an array"))?
            .iter()
            .collect(),
        other => return Err(gerr(&format!("unsupported geometry type '{other}'"))),
    };
    polys
        .into_iter()
        .map(|p| {
            let rings = p
                .as_array()
                .ok_or_else(|| gerr("polygon coordinates must be an array of rings"))?
                .iter()
                .map(|r| parse_ring(r, id))
                .collect::<Result<Vec<_>>>()?;
            if rings.is_empty() {
                return Err(gerr("polygon has no rings"));
            }
            Ok(Polygon { rings })
        })
        .collect()
}

fn parse_ring(v: &Value, id: &str) -> Result<Ring> {
    let gerr = |m: String| Error::Geometry { polygon: id.to_string(), message: m };
    let pts = v.as_array().ok_or_else(|| gerr("ring must be an array of positions".into()))?;
    let mut ring: Ring = Vec::with_capacity(pts.len());
    for p in pts {
        let xy = p.as_array().filter(|a| a.len() >= 2).ok_or_else(|| gerr("position needs two numbers".into()))?;
        let x = xy[0].as_f64().ok_or_else(|| gerr("longitude is not a number".into()))?;
        let y = xy[1].as_f64().ok_or_else(|| gerr("latitude is not a number".into()))?;
        ring.push((x, y));
    }
    clean_ring(ring, id)
}

/// Drops repeated consecutive vertices, then checks closure, size and simplicity.
pub fn clean_ring(mut ring: Ring, id: &str) -> Result<Ring> {
    let gerr = |m: String| Error::Geometry { polygon: id.to_string(), message: m };
    if ring.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(gerr("ring has non-finite coordinates".into()));
    }
    ring.dedup();
    if ring.len() < 4 {
        return Err(gerr(format!("ring has {} distinct positions, need at least 4", ring.len())));
    }
    if ring.first() != ring.last() {
        return Err(gerr("ring is not closed".into()));
    }
    if let Some((a, b)) = first_self_intersection(&ring) {
        return Err(gerr(format!("ring self-intersects between edges {a} and {b}")));
    }
    Ok(ring)
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn first_self_intersection(ring: &Ring) -> Option<(usize, usize)> {
    let n = ring.len() - 1;
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Even-odd containment over all rings of one polygon.
pub fn polygon_contains(poly: &Polygon, x: f64, y: f64) -> bool {
    let mut inside = false;
    for ring in &poly.rings {
        for w in ring.windows(2) {
            let (x1, y1) = w[0];
            let (x2, y2) = w[1];
            if (y1 > y) != (y2 > y) {
                let xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
                if x < xc {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

pub fn boundary_contains(b: &RegionBoundary, x: f64, y: f64) -> bool {
    b.polygons.iter().any(|p| polygon_contains(p, x, y))
}

/// Planar area of the boundary in km² using the local-meter metric at each ring's mean latitude.
pub fn boundary_area_km2(b: &RegionBoundary) -> f64 {
    let mut total = CompensatedSum::new();
    for poly in &b.polygons {
        for (k, ring) in poly.rings.iter().enumerate() {
            let lat0 = ring.iter().map(|p| p.1).sum::<f64>() / ring.len() as f64;
            let kx = CellAreaModel::meters_per_degree_lon_at(lat0);
            let ky = CellAreaModel::METERS_PER_DEGREE_LAT;
            let mut twice = 0.0;
            for w in ring.windows(2) {
                twice += (w[0].0 * kx) * (w[1].1 * ky) - (w[1].0 * kx) * (w[0].1 * ky);
            }
            let a = 0.5 * twice.abs() * 1e-6;
            total.add(if k == 0 { a } else { -a });
        }
    }
    total.value().max(0.0)
}

fn bbox(b: &RegionBoundary) -> (f64, f64, f64, f64) {
    let mut bb = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &b.polygons {
        for &(x, y) in &p.rings[0] {
            bb.0 = bb.0.min(x);
            bb.1 = bb.1.min(y);
            bb.2 = bb.2.max(x);
            bb.3 = bb.3.max(y);
        }
    }
    bb
}

/// Assigns each cell to the first boundary (in input order) containing its center.
/// Boundaries that capture no cell center are kept with an empty mask, their polygon
/// area, and a warning.
pub fn rasterize_regions(boundaries: &[RegionBoundary], spec: &GridSpec) -> RegionAssignment {
    let mut assignment = vec![None; spec.len()];
    let mut regions = Vec::with_capacity(boundaries.len());
    let mut warnings = Vec::new();
    for (k, b) in boundaries.iter().enumerate() {
        let (x0, y0, x1, y1) = bbox(b);
        let c0 = (((x0 - spec.origin_lon) / spec.cell_size).floor().max(0.0)) as usize;
        let c1 = (((x1 - spec.origin_lon) / spec.cell_size).ceil().max(0.0) as usize).min(spec.n_cols);
        let top = spec.origin_lat + spec.n_rows as f64 * spec.cell_size;
        let r0 = (((top - y1) / spec.cell_size).floor().max(0.0)) as usize;
        let r1 = (((top - y0) / spec.cell_size).ceil().max(0.0) as usize).min(spec.n_rows);
        let mut mask = Vec::new();
        for r in r0..r1 {
            let y = spec.row_center_lat(r);
            for c in c0..c1 {
                let i = spec.index(r, c);
                if assignment[i].is_some() {
                    continue;
                }
                if boundary_contains(b, spec.col_center_lon(c), y) {
                    assignment[i] = Some(k);
                    mask.push(i);
                }
            }
        }
        let area_km2 = if mask.is_empty() {
            warnings.push(format!("region '{}' covers no cell center; keeping polygon area", b.id));
            boundary_area_km2(b)
        } else {
            mask_area_km2(&mask, spec)
        };
        regions.push(Region {
            id: b.id.clone(),
            country_code: b.country.clone(),
            mask,
            area_km2,
        });
    }
    RegionAssignment {
        assignment,
        regions,
        warnings,
    }
}

/// Serializes boundaries back to a FeatureCollection, merging extra properties per region.
pub fn boundaries_to_geojson(
    boundaries: &[RegionBoundary],
    extra: impl Fn(&RegionBoundary) -> serde_json::Map<String, Value>,
) -> Value {
    let features: Vec<Value> = boundaries
        .iter()
        .map(|b| {
            let mut props = serde_json::Map::new();
            props.insert("gid".into(), Value::from(b.id.clone()));
            props.insert("country".into(), Value::from(b.country.clone()));
            props.extend(extra(b));
            let polys: Vec<Value> = b
                .polygons
                .iter()
                .map(|p| {
                    Value::from(
                        p.rings
                            .iter()
                            .map(|r| Value::from(r.iter().map(|&(x, y)| Value::from(vec![x, y])).collect::<Vec<_>>()))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            serde_json::json!({
                "type": "Feature",
                "properties": props,
                "geometry": { "type": "MultiPolygon", "coordinates": polys },
            })
        })
        .collect();
    serde_json::json!({ "type": "FeatureCollection", "features": features })
}
