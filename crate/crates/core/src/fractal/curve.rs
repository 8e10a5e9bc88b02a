use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on generated point counts unless a caller sets its own.
pub const DEFAULT_MAX_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Deterministic,
    Random,
}

/// Node-insertion rule applied to every segment per iteration.
///
/// Each segment receives `g` new nodes. Node `i` (1-based) sits at
/// along-segment fraction `(i - 1 + t) / g` and is pushed off the segment by
/// `h * |segment|` along the left-hand normal. The deterministic kind uses
/// fixed `t = t_lo = t_hi` and `h = h_lo = h_hi`; the random kind draws
/// `t ~ U(t_lo, t_hi)` and `h ~ U(h_lo, h_hi)` independently per node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub kind: TransformKind,
    pub g: u32,
    pub t_lo: f64,
    pub t_hi: f64,
    pub h_lo: f64,
    pub h_hi: f64,
}

impl TransformParams {
    pub fn deterministic(g: u32, t: f64, h: f64) -> Result<Self> {
        let p = TransformParams {
            kind: TransformKind::Deterministic,
            g,
            t_lo: t,
            t_hi: t,
            h_lo: h,
            h_hi: h,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn random(g: u32, t: (f64, f64), h: (f64, f64)) -> Result<Self> {
        let p = TransformParams {
            kind: TransformKind::Random,
            g,
            t_lo: t.0,
            t_hi: t.1,
            h_lo: h.0,
            h_hi: h.1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0 {
            return Err(Error::config("G must be at least 1"));
        }
        let all_finite = [self.t_lo, self.t_hi, self.h_lo, self.h_hi]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::config("transform bounds must be finite"));
        }
        if !(0.0 < self.t_lo && self.t_lo <= self.t_hi && self.t_hi < 1.0) {
            return Err(Error::config(format!(
                "along-segment bounds must satisfy 0 < t_lo <= t_hi < 1, got [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        if self.h_lo > self.h_hi {
            return Err(Error::config(format!(
                "offset bounds inverted: [{}, {}]",
                self.h_lo, self.h_hi
            )));
        }
        if self.kind == TransformKind::Deterministic && (self.t_lo != self.t_hi || self.h_lo != self.h_hi) {
            return Err(Error::config("deterministic transform needs t_lo = t_hi and h_lo = h_hi"));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self.kind {
            TransformKind::Deterministic => (self.t_lo, self.h_lo),
            TransformKind::Random => {
                let t = self.t_lo + (self.t_hi - self.t_lo) * rng.random::<f64>();
                let h = self.h_lo + (self.h_hi - self.h_lo) * rng.random::<f64>();
                (t, h)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

/// A curve node tagged with the iteration `n` that inserted it and its
/// group order `k` within that iteration. The two base endpoints carry
/// `n = 0` with `k = 0` (start) and `k = 1` (end).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexedPoint {
    pub x: f64,
    pub y: f64,
    pub n: u32,
    pub k: u64,
    pub t_order: f64,
}

impl IndexedPoint {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Topological order as an exact fraction `(numerator, denominator)`.
    pub fn t_fraction(&self, g: u32) -> (u64, u64) {
        if self.n == 0 {
            return (self.k, 1);
        }
        let g = u64::from(g);
        (self.k + (self.k - 1) / g, (g + 1).pow(self.n))
    }
}

/// Position of an inserted node along the curve, in `(0, 1)`:
/// `T(n, k) = (k + floor((k - 1) / G)) / (G + 1)^n`.
pub fn topological_order(n: u32, k: u64, g: u32) -> Result<f64> {
    let bad = || Error::InvalidIndex { n, k, g };
    if n == 0 || g == 0 || k == 0 {
        return Err(bad());
    }
    let base = u64::from(g) + 1;
    let max_k = base
        .checked_pow(n - 1)
        .and_then(|p| p.checked_mul(u64::from(g)))
        .ok_or_else(bad)?;
    if k > max_k {
        return Err(bad());
    }
    let denominator = base.checked_pow(n).ok_or_else(bad)?;
    let numerator = k + (k - 1) / u64::from(g);
    Ok(numerator as f64 / denominator as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    pub points: Vec<IndexedPoint>,
    pub depth: u32,
    pub params: TransformParams,
    pub seed: u64,
}

impl PolyCurve {
    /// Depth-0 curve: the two endpoints of `base`.
    pub fn base(start: Point, end: Point, params: TransformParams, seed: u64) -> Result<Self> {
        params.validate()?;
        if !(start.x.is_finite() && start.y.is_finite() && end.x.is_finite() && end.y.is_finite()) {
            return Err(Error::config("base segment endpoints must be finite"));
        }
        if start == end {
            return Err(Error::config("base segment has zero length"));
        }
        let endpoint = |p: Point, k: u64| IndexedPoint {
            x: p.x,
            y: p.y,
            n: 0,
            k,
            t_order: k as f64,
        };
        Ok(PolyCurve {
            points: vec![endpoint(start, 0), endpoint(end, 1)],
            depth: 0,
            params,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().map(IndexedPoint::position)
    }

    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].position().distance(&w[1].position()))
            .sum()
    }

    /// `(min_x, min_y, max_x, max_y)` of the nodes.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y)),
        )
    }

    pub fn translated(&self, dx: f64, dy: f64) -> PolyCurve {
        let mut out = self.clone();
        for p in &mut out.points {
            p.x += dx;
            p.y += dy;
        }
        out
    }

    /// Point at arc length `s` from the start, clamped to the curve.
    pub fn point_at_arc(&self, s: f64) -> Point {
        let mut remaining = s.max(0.0);
        for w in self.points.windows(2) {
            let (a, b) = (w[0].position(), w[1].position());
            let len = a.distance(&b);
            if remaining <= len && len > 0.0 {
                let f = remaining / len;
                return Point::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y));
            }
            remaining -= len;
        }
        self.points
            .last()
            .map(IndexedPoint::position)
            .unwrap_or(Point::new(0.0, 0.0))
    }
}

/// One iteration: every segment of `curve` receives `params.g` new nodes.
///
/// New nodes get `n = depth + 1` and group orders `k = 1, 2, ...` in traversal
/// order, which keeps the topological order consistent with the polyline.
pub fn apply_transform<R: Rng + ?Sized>(
    curve: &PolyCurve,
    params: &TransformParams,
    rng: &mut R,
) -> Result<PolyCurve> {
    params.validate()?;
    if curve.depth > 0 && curve.params.g != params.g {
        return Err(Error::config(format!(
            "cannot mix G={} into a curve built with G={}",
            params.g, curve.params.g
        )));
    }
    let g = params.g as usize;
    let segments = curve.points.len().saturating_sub(1);
    let new_len = segments
        .checked_mul(g + 1)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::Resource("point count overflows".into()))?;
    let n = curve.depth + 1;
    let denominator = (u64::from(params.g) + 1)
        .checked_pow(n)
        .ok_or_else(|| Error::Resource(format!("topological order denominator overflows at depth {n}")))?;

    let mut points = Vec::with_capacity(new_len);
    for (s, w) in curve.points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        points.push(a);
        for i in 1..=g {
            let (t, h) = params.draw(rng);
            let f = ((i - 1) as f64 + t) / g as f64;
            let k = (s * g + i) as u64;
            points.push(IndexedPoint {
                x: a.x + f * dx - h * dy,
                y: a.y + f * dy + h * dx,
                n,
                k,
                t_order: (k + (k - 1) / u64::from(params.g)) as f64 / denominator as f64,
            });
        }
    }
    if let Some(last) = curve.points.last() {
        points.push(*last);
    }
    Ok(PolyCurve {
        points,
        depth: n,
        params: *params,
        seed: curve.seed,
    })
}

/// Expected node count `(G + 1)^depth + 1`, or `None` on overflow.
pub fn expected_point_count(g: u32, depth: u32) -> Option<usize> {
    (g as usize + 1).checked_pow(depth)?.checked_add(1)
}

/// Applies the transform `depth` times to the base segment with a
/// `ChaCha8Rng` seeded by `seed`.
pub fn generate_curve(params: &TransformParams, depth: u32, seed: u64, start: Point, end: Point) -> Result<PolyCurve> {
    generate_curve_capped(params, depth, seed, start, end, DEFAULT_MAX_POINTS)
}

pub fn generate_curve_capped(
    params: &TransformParams,
    depth: u32,
    seed: u64,
    start: Point,
    end: Point,
    max_points: usize,
) -> Result<PolyCurve> {
    params.validate()?;
    match expected_point_count(params.g, depth) {
        Some(count) if count <= max_points => {}
        _ => {
            return Err(Error::Resource(format!(
                "G={} at depth {depth} exceeds the cap of {max_points} points",
                params.g
            )))
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = PolyCurve::base(start, end, *params, seed)?;
    for _ in 0..depth {
        curve = apply_transform(&curve, params, &mut rng)?;
    }
    Ok(curve)
}

/// Contiguous run of nodes whose topological order lies in `[t_a, t_b]`.
/// Node indices and orders are kept as in the parent curve.
pub fn extract_subcurve(curve: &PolyCurve, t_a: f64, t_b: f64) -> Result<PolyCurve> {
    if !(0.0 <= t_a && t_a < t_b && t_b <= 1.0) {
        return Err(Error::config(format!("window [{t_a}, {t_b}] must satisfy 0 <= t_a < t_b <= 1")));
    }
    let points: Vec<IndexedPoint> = curve
        .points
        .iter()
        .filter(|p| p.t_order >= t_a && p.t_order <= t_b)
        .copied()
        .collect();
    if points.len() < 2 {
        return Err(Error::TooSmallWindow {
            t_a,
            t_b,
            points: points.len(),
        });
    }
    Ok(PolyCurve {
        points,
        depth: curve.depth,
        params: curve.params,
        seed: curve.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> (Point, Point) {
        (Point::new(0.0, 0.0), Point::new(1.0, 0.0))
    }

    #[test]
    fn zero_offset_midpoint() {
        let (a, b) = unit();
        let p = TransformParams::deterministic(1, 0.5, 0.0).unwrap();
        let c = generate_curve(&p, 1, 0, a, b).unwrap();
        assert_eq!(c.points[1].position(), Point::new(0.5, 0.0));
        assert_eq!((c.points[1].n, c.points[1].k, c.points[1].t_order), (1, 1, 0.5));
    }

    #[test]
    fn offset_goes_to_left_normal() {
        let (a, b) = unit();
        let p = TransformParams::deterministic(1, 0.5, 0.5).unwrap();
        let c = generate_curve(&p, 1, 0, a, b).unwrap();
        assert_eq!(c.points[1].position(), Point::new(0.5, 0.5));
    }

    #[test]
    fn random_transform_is_reproducible() {
        let (a, b) = unit();
        let p = TransformParams::random(1, (0.3, 0.7), (-0.3, 0.3)).unwrap();
        let base = PolyCurve::base(a, b, p, 9).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            apply_transform(&base, &p, &mut r1).unwrap(),
            apply_transform(&base, &p, &mut r2).unwrap()
        );
    }

    #[test]
    fn counts_and_determinism() {
        let (a, b) = unit();
        let p = TransformParams::deterministic(1, 0.5, 0.3).unwrap();
        assert_eq!(generate_curve(&p, 0, 0, a, b).unwrap().len(), 2);
        assert_eq!(generate_curve(&p, 3, 0, a, b).unwrap().len(), 9);
        let r = TransformParams::random(2, (0.2, 0.8), (-0.2, 0.2)).unwrap();
        assert_eq!(
            generate_curve(&r, 4, 42, a, b).unwrap(),
            generate_curve(&r, 4, 42, a, b).unwrap()
        );
        assert_ne!(
            generate_curve(&r, 4, 42, a, b).unwrap(),
            generate_curve(&r, 4, 43, a, b).unwrap()
        );
    }

    #[test]
    fn cap_is_enforced() {
        let (a, b) = unit();
        let p = TransformParams::deterministic(3, 0.5, 0.1).unwrap();
        assert!(matches!(
            generate_curve_capped(&p, 6, 0, a, b, 1000),
            Err(Error::Resource(_))
        ));
        assert!(matches!(generate_curve(&p, 64, 0, a, b), Err(Error::Resource(_))));
    }

    #[test]
    fn params_validation() {
        assert!(TransformParams::deterministic(0, 0.5, 0.0).is_err());
        assert!(TransformParams::deterministic(1, 0.0, 0.0).is_err());
        assert!(TransformParams::deterministic(1, 1.0, 0.0).is_err());
        assert!(TransformParams::random(1, (0.6, 0.4), (0.0, 0.0)).is_err());
        assert!(TransformParams::random(1, (0.4, 0.6), (0.2, -0.2)).is_err());
        let mut p = TransformParams::deterministic(1, 0.5, 0.0).unwrap();
        p.t_hi = 0.6;
        assert!(p.validate().is_err());
    }

    #[test]
    fn topological_order_examples() {
        assert_eq!(topological_order(1, 1, 1).unwrap(), 0.5);
        assert_eq!(topological_order(2, 2, 1).unwrap(), 0.75);
        assert!((topological_order(1, 2, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(topological_order(1, 3, 2), Err(Error::InvalidIndex { .. })));
        assert!(topological_order(0, 1, 1).is_err());
        assert!(topological_order(2, 0, 1).is_err());
    }

    #[test]
    fn subcurve_windows() {
        let (a, b) = unit();
        let p = TransformParams::deterministic(1, 0.5, 0.2).unwrap();
        let c = generate_curve(&p, 2, 0, a, b).unwrap();
        assert_eq!(extract_subcurve(&c, 0.0, 1.0).unwrap(), c);
        let half = extract_subcurve(&c, 0.0, 0.5).unwrap();
        let ts: Vec<f64> = half.points.iter().map(|p| p.t_order).collect();
        assert_eq!(ts, vec![0.0, 0.25, 0.5]);

        let c3 = generate_curve(&p, 3, 0, a, b).unwrap();
        assert!(matches!(
            extract_subcurve(&c3, 0.3, 0.30001),
            Err(Error::TooSmallWindow { .. })
        ));
        assert!(matches!(extract_subcurve(&c3, 0.5, 0.2), Err(Error::Config(_))));
    }

    #[test]
    fn arc_sampling() {
        let (a, b) = unit();
        let p = TransformParams::deterministic(1, 0.5, 0.0).unwrap();
        let c = generate_curve(&p, 2, 0, a, b).unwrap();
        assert!((c.arc_length() - 1.0).abs() < 1e-15);
        assert_eq!(c.point_at_arc(0.3), Point::new(0.3, 0.0));
        assert_eq!(c.point_at_arc(5.0), b);
    }
}
