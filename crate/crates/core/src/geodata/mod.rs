//! Raster and region primitives shared by every stage.

mod distance;
mod grid;
mod io;
mod regions;

pub use distance::distance_to_feature;
pub use grid::{CellAreaModel, GridSpec, Mask, RasterGrid, DEFAULT_NODATA};
pub use io::{
    decode_flat, encode_flat, format_esri_ascii, load_raster, load_raster_auto, parse_esri_ascii,
    save_raster, save_raster_auto, RasterFormat, FLAT_HEADER_LEN, FLAT_MAGIC,
};
pub use regions::{
    boundaries_to_geojson, boundary_area_km2, boundary_contains, clean_ring, load_boundaries,
    mask_area_km2, parse_boundaries, polygon_contains, rasterize_regions, Polygon, Region,
    RegionAssignment, RegionBoundary, Ring,
};
