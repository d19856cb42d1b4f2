use rayon::prelude::*;

use super::grid::{GridSpec, Mask, RasterGrid, DEFAULT_NODATA};

/// Exact distance in meters from every cell center to the nearest true cell center.
///
/// Within one source row the nearest feature is the one with the fewest columns
/// between, so a 1-D sweep per row reduces the search to one candidate per row.
/// Rows are then visited outward from the target until the pure north-south
/// separation alone exceeds the best distance found. All-false masks give `+inf`.
pub fn distance_to_feature(mask: &Mask) -> RasterGrid {
    let spec = mask.spec;
    let nearest = nearest_columns(mask);
    let mut cells = vec![f64::INFINITY; spec.len()];
    cells
        .par_chunks_mut(spec.n_cols)
        .enumerate()
        .for_each(|(r, out)| {
            for (c, cell) in out.iter_mut().enumerate() {
                *cell = nearest_for_cell(&spec, &nearest, r, c);
            }
        });
    RasterGrid::from_parts_unchecked(spec, DEFAULT_NODATA, cells)
}

/// Per row, the column distance to the nearest true cell (`None` for rows without features).
fn nearest_columns(mask: &Mask) -> Vec<Option<Vec<usize>>> {
    let n = mask.spec.n_cols;
    mask.cells
        .chunks(n)
        .map(|row| {
            if !row.iter().any(|&b| b) {
                return None;
            }
            let mut d = vec![usize::MAX; n];
            let mut last: Option<usize> = None;
            for c in 0..n {
                if row[c] {
                    last = Some(c);
                }
                if let Some(l) = last {
                    d[c] = c - l;
                }
            }
            last = None;
            for c in (0..n).rev() {
                if row[c] {
                    last = Some(c);
                }
                if let Some(l) = last {
                    d[c] = d[c].min(l - c);
                }
            }
            Some(d)
        })
        .collect()
}

fn nearest_for_cell(spec: &GridSpec, nearest: &[Option<Vec<usize>>], r: usize, c: usize) -> f64 {
    let mut best = f64::INFINITY;
    let mut up_open = true;
    let mut down_open = true;
    let mut k = 0usize;
    while up_open || down_open {
        if up_open {
            if k > r {
                up_open = false;
            } else {
                let rr = r - k;
                if spec.center_distance_m(r, rr, 0) > best {
                    up_open = false;
                } else if let Some(d) = &nearest[rr] {
                    best = best.min(spec.center_distance_m(r, rr, d[c]));
                }
            }
        }
        if down_open && k > 0 {
            let rr = r + k;
            if rr >= spec.n_rows {
                down_open = false;
            } else if spec.center_distance_m(r, rr, 0) > best {
                down_open = false;
            } else if let Some(d) = &nearest[rr] {
                best = best.min(spec.center_distance_m(r, rr, d[c]));
            }
        }
        k += 1;
    }
    best
}
