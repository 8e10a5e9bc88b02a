//! Synthetic annotation scenes along fractal curves.
//!
//! Ground truth tiles the curve with square boxes spaced by arc length, the
//! way long cracks are marked with chains of boxes. A simulated detector then
//! derives its boxes from the ground truth with controllable scale change,
//! positional jitter, duplication, drop-out and spurious boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal::curve::PolyCurve;
use crate::geometry::{intersection_area, BBox};
use crate::matching::{Detection, GroundTruth};

/// Class label given to synthesized objects.
pub const CRACK_CLASS: &str = "crack";

// Duplicate detections of one box are spread over this fraction of the stride.
const DUPLICATE_SPREAD: f64 = 0.5;
const FALSE_ALARM_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Detection side as a multiple of the ground-truth side.
    pub scale_jitter: f64,
    /// Uniform centre jitter per axis, as a fraction of the ground-truth side.
    pub position_jitter: f64,
    /// Detections emitted per surviving ground-truth box.
    pub duplication: u32,
    /// Probability that a ground-truth box gets no detection at all.
    pub dropout: f64,
    /// Expected number of spurious boxes per scene.
    pub false_alarms: f64,
    pub confidence_lo: f64,
    pub confidence_hi: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            scale_jitter: 1.0,
            position_jitter: 0.0,
            duplication: 1,
            dropout: 0.0,
            false_alarms: 0.0,
            confidence_lo: 0.5,
            confidence_hi: 1.0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale_jitter.is_finite() && self.scale_jitter > 0.0) {
            return Err(Error::config("scale jitter must be positive"));
        }
        if !(self.position_jitter.is_finite() && self.position_jitter >= 0.0) {
            return Err(Error::config("position jitter must be non-negative"));
        }
        if self.duplication == 0 {
            return Err(Error::config("duplication must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.dropout) {
            return Err(Error::config("dropout must lie in [0, 1]"));
        }
        if !(self.false_alarms.is_finite() && self.false_alarms >= 0.0) {
            return Err(Error::config("false-alarm rate must be non-negative"));
        }
        if !(0.0 <= self.confidence_lo && self.confidence_lo <= self.confidence_hi && self.confidence_hi <= 1.0) {
            return Err(Error::config("confidence bounds must satisfy 0 <= lo <= hi <= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScene {
    pub image_id: String,
    pub width: f64,
    pub height: f64,
    pub box_size: f64,
    pub stride: f64,
    pub noise: NoiseModel,
    pub seed: u64,
    pub curve: PolyCurve,
    pub ground_truths: Vec<GroundTruth>,
    pub detections: Vec<Detection>,
}

/// Tiles `curve` with ground-truth boxes and simulates a detector.
///
/// Draws come from a `ChaCha8Rng` seeded with `seed` on stream 1, so a scene
/// can share its seed with the curve that produced it without correlation.
pub fn synthesize_annotations(
    curve: &PolyCurve,
    image_id: &str,
    box_size: f64,
    stride: f64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<SyntheticScene> {
    if !(box_size.is_finite() && box_size > 0.0 && stride.is_finite() && stride > 0.0) {
        return Err(Error::config("box size and stride must be positive"));
    }
    noise.validate()?;
    let length = curve.arc_length();
    if stride > length {
        return Err(Error::EmptyScene(format!(
            "stride {stride} exceeds curve length {length}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let tiles = (length / stride).floor() as usize + 1;
    let mut ground_truths = Vec::with_capacity(tiles);
    let mut arcs = Vec::with_capacity(tiles);
    for i in 0..tiles {
        let s = i as f64 * stride;
        let c = curve.point_at_arc(s);
        ground_truths.push(GroundTruth::new(image_id, CRACK_CLASS, BBox::centered(c.x, c.y, box_size)?));
        arcs.push(s);
    }

    let det_side = box_size * noise.scale_jitter;
    let dup = noise.duplication as f64;
    let mut detections = Vec::new();
    for &s in &arcs {
        if rng.random::<f64>() < noise.dropout {
            continue;
        }
        for j in 0..noise.duplication {
            let shift = ((j as f64 + 0.5) / dup - 0.5) * stride * DUPLICATE_SPREAD;
            let c = curve.point_at_arc((s + shift).clamp(0.0, length));
            let jx = (2.0 * rng.random::<f64>() - 1.0) * noise.position_jitter * box_size;
            let jy = (2.0 * rng.random::<f64>() - 1.0) * noise.position_jitter * box_size;
            let confidence = draw_confidence(&mut rng, noise);
            detections.push(Detection::new(
                image_id,
                CRACK_CLASS,
                BBox::centered(c.x + jx, c.y + jy, det_side)?,
                confidence,
            )?);
        }
    }

    let (width, height) = extent(curve, &ground_truths, &detections, box_size);

    let whole = noise.false_alarms.floor() as usize;
    let extra = usize::from(rng.random::<f64>() < noise.false_alarms.fract());
    for _ in 0..whole + extra {
        for _ in 0..FALSE_ALARM_ATTEMPTS {
            let x = rng.random::<f64>() * (width - box_size).max(0.0);
            let y = rng.random::<f64>() * (height - box_size).max(0.0);
            let candidate = BBox::new(x, y, x + box_size, y + box_size)?;
            let clear = ground_truths
                .iter()
                .all(|g| intersection_area(&g.bbox, &candidate) == 0.0);
            if clear {
                let confidence = draw_confidence(&mut rng, noise);
                detections.push(Detection::new(image_id, CRACK_CLASS, candidate, confidence)?);
                break;
            }
        }
    }

    Ok(SyntheticScene {
        image_id: image_id.to_string(),
        width,
        height,
        box_size,
        stride,
        noise: *noise,
        seed,
        curve: curve.clone(),
        ground_truths,
        detections,
    })
}

fn draw_confidence(rng: &mut ChaCha8Rng, noise: &NoiseModel) -> f64 {
    noise.confidence_lo + (noise.confidence_hi - noise.confidence_lo) * rng.random::<f64>()
}

fn extent(curve: &PolyCurve, gts: &[GroundTruth], dets: &[Detection], margin: f64) -> (f64, f64) {
    let (_, _, mut x, mut y) = curve.bounds();
    for b in gts.iter().map(|g| &g.bbox).chain(dets.iter().map(|d| &d.bbox)) {
        x = x.max(b.x2());
        y = y.max(b.y2());
    }
    ((x + margin).ceil(), (y + margin).ceil())
}
