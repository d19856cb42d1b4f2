use crate::numeric::CompensatedSum;

/// Smallest electrolyzer size `E` with `Σ min(gen_t, E) = target`, or `None` if the
/// generation cannot cover the target.
///
/// With no storage, running the electrolyzer at `min(gen, E)` every hour is optimal,
/// so this is the exact electrolyzer requirement of a fixed generation mix.
pub fn min_electrolyzer_mw(generation_mw: &[f64], target_mwh: f64) -> Option<f64> {
    if target_mwh <= 0.0 {
        return Some(0.0);
    }
    let mut g: Vec<f64> = generation_mw.iter().map(|v| v.max(0.0)).collect();
    g.sort_by(|a, b| b.total_cmp(a));
    let n = g.len();
    // tail[k] = Σ_{j>=k} g_j
    let mut tail = vec![0.0; n + 1];
    let mut acc = CompensatedSum::new();
    for k in (0..n).rev() {
        acc.add(g[k]);
        tail[k] = acc.value();
    }
    if target_mwh > tail[0] * (1.0 + 1e-12) {
        return None;
    }
    // With the k largest hours clipped at E: f(E) = k·E + tail[k], valid on [g_k, g_{k-1}].
    for k in 1..=n {
        let e = (target_mwh - tail[k]) / k as f64;
        let lo = if k < n { g[k] } else { 0.0 };
        if e >= lo && e <= g[k - 1] * (1.0 + 1e-12) {
            return Some(e.max(0.0));
        }
    }
    Some(g[0])
}

/// Total generation series of fixed capacities; dispatchable units run at availability.
pub fn generation_series(capacities_mw: &[f64], profiles: &[&[f64]]) -> Vec<f64> {
    let hours = profiles.first().map(|p| p.len()).unwrap_or(0);
    (0..hours)
        .map(|t| {
            let mut s = CompensatedSum::new();
            for (c, p) in capacities_mw.iter().zip(profiles) {
                s.add(c * p[t]);
            }
            s.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delivered(g: &[f64], e: f64) -> f64 {
        g.iter().map(|v| v.min(e)).sum()
    }

    #[test]
    fn flat_generation_needs_the_average() {
        let g = vec![10.0; 100];
        let e = min_electrolyzer_mw(&g, 500.0).unwrap();
        assert!((e - 5.0).abs() < 1e-12);
    }

    #[test]
    fn clipping_matches_target() {
        let g = [0.0, 1.0, 5.0, 3.0, 8.0, 2.0];
        for t in [0.5, 3.0, 10.0, 18.9, 19.0] {
            let e = min_electrolyzer_mw(&g, t).unwrap();
            assert!((delivered(&g, e) - t).abs() < 1e-9, "t={t} e={e}");
        }
        assert!(min_electrolyzer_mw(&g, 19.5).is_none());
    }

    #[test]
    fn series_sums_capacity_times_profile() {
        let a = [0.5, 1.0];
        let b = [0.0, 0.25];
        let s = generation_series(&[2.0, 4.0], &[&a, &b]);
        assert_eq!(s, vec![1.0, 3.0]);
    }
}
