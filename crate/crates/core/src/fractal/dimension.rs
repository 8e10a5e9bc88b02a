//! Box-counting dimension of polylines.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fractal::curve::PolyCurve;

/// Minimum depth for which a dimension estimate is meaningful.
pub const MIN_ESTIMATION_DEPTH: u32 = 5;

/// Number of grid cells of side `scale` touched by the polyline. The grid is
/// anchored at the curve's lower-left bound and covers its bounding box;
/// points on the far edge of the box fall into the last cell.
pub fn box_count(curve: &PolyCurve, scale: f64) -> usize {
    let (ox, oy, mx, my) = curve.bounds();
    let limit = (
        (((mx - ox) / scale).ceil() as i64 - 1).max(0),
        (((my - oy) / scale).ceil() as i64 - 1).max(0),
    );
    let mut cells = HashSet::new();
    for w in curve.points.windows(2) {
        let a = ((w[0].x - ox) / scale, (w[0].y - oy) / scale);
        let b = ((w[1].x - ox) / scale, (w[1].y - oy) / scale);
        visit_cells(a, b, limit, &mut cells);
    }
    if curve.points.len() == 1 {
        cells.insert((0, 0));
    }
    cells.len()
}

// Grid traversal: walks every cell the segment passes through, one axis
// crossing at a time.
fn visit_cells(a: (f64, f64), b: (f64, f64), limit: (i64, i64), cells: &mut HashSet<(i64, i64)>) {
    let cell = |u: f64, max: i64| (u.floor() as i64).clamp(0, max);
    let (mut cx, mut cy) = (cell(a.0, limit.0), cell(a.1, limit.1));
    let (ex, ey) = (cell(b.0, limit.0), cell(b.1, limit.1));
    cells.insert((cx, cy));
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let step_x = if dx > 0.0 { 1 } else { -1 };
    let step_y = if dy > 0.0 { 1 } else { -1 };
    let delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let mut next_x = if dx > 0.0 {
        ((cx + 1) as f64 - a.0) / dx
    } else if dx < 0.0 {
        (cx as f64 - a.0) / dx
    } else {
        f64::INFINITY
    };
    let mut next_y = if dy > 0.0 {
        ((cy + 1) as f64 - a.1) / dy
    } else if dy < 0.0 {
        (cy as f64 - a.1) / dy
    } else {
        f64::INFINITY
    };
    let steps = (ex - cx).abs() + (ey - cy).abs();
    for _ in 0..steps {
        if next_x < next_y {
            cx += step_x;
            next_x += delta_x;
        } else {
            cy += step_y;
            next_y += delta_y;
        }
        cells.insert((cx, cy));
    }
}

/// `count` scales from `extent / 2^min_exp` down to `extent / 2^max_exp`,
/// geometrically spaced, where `extent` is the larger side of the curve's
/// bounding box.
pub fn dyadic_scales(curve: &PolyCurve, min_exp: f64, max_exp: f64, count: usize) -> Vec<f64> {
    let (x0, y0, x1, y1) = curve.bounds();
    let extent = (x1 - x0).max(y1 - y0);
    if count < 2 {
        return vec![extent / 2f64.powf(min_exp)];
    }
    (0..count)
        .map(|i| {
            let e = min_exp + (max_exp - min_exp) * i as f64 / (count - 1) as f64;
            extent / 2f64.powf(e)
        })
        .collect()
}

/// Least-squares slope of `ln(count)` against `ln(1 / scale)`.
pub fn estimate_fractal_dimension(curve: &PolyCurve, scales: &[f64]) -> Result<f64> {
    if scales.len() < 3 {
        return Err(Error::config("at least 3 grid scales are required"));
    }
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::config("grid scales must be positive and finite"));
    }
    let (lo, hi) = scales
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if hi / lo < 10.0 {
        return Err(Error::config(format!(
            "grid scales span {:.3} decades; at least 1 is required",
            (hi / lo).log10()
        )));
    }
    if curve.depth < MIN_ESTIMATION_DEPTH {
        return Err(Error::config(format!(
            "curve depth {} is below the minimum of {MIN_ESTIMATION_DEPTH}",
            curve.depth
        )));
    }
    let samples: Vec<(f64, f64, usize)> = scales
        .iter()
        .map(|&s| {
            let count = box_count(curve, s);
            ((1.0 / s).ln(), (count as f64).ln(), count)
        })
        .collect();
    if samples.iter().all(|s| s.2 == samples[0].2) {
        return Err(Error::Estimation(format!(
            "every scale yields the same box count ({})",
            samples[0].2
        )));
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mean_x) * (s.1 - mean_y)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}
