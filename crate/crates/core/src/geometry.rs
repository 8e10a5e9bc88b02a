//! Axis-aligned boxes and the two overlap measures used by the evaluators.
//!
//! Coordinates are continuous reals; a box spanning `x1..x2` has width
//! `x2 - x1` with no pixel-inclusive `+1` adjustment.
//!
//! * [`iou`] divides the intersection by the union of both boxes.
//! * [`car`] (cover area rate) divides the intersection by the smaller of the
//!   two areas, so a box fully inside another always scores 1 regardless of
//!   the size ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle with `x1 < x2` and `y1 < y2`.
///
/// The invariant is enforced at construction, so every overlap function
/// downstream can assume a strictly positive area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox", into = "RawBox")]
pub struct BBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

impl TryFrom<RawBox> for BBox {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        BBox::new(raw.x1, raw.y1, raw.x2, raw.y2)
    }
}

impl From<BBox> for RawBox {
    fn from(b: BBox) -> Self {
        RawBox {
            x1: b.x1,
            y1: b.y1,
            x2: b.x2,
            y2: b.y2,
        }
    }
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        let finite = x1.is_finite() && y1.is_finite() && x2.is_finite() && y2.is_finite();
        if !finite || x1 >= x2 || y1 >= y2 {
            return Err(Error::InvalidBox { x1, y1, x2, y2 });
        }
        Ok(BBox { x1, y1, x2, y2 })
    }

    /// Square box of side `side` centred on `(cx, cy)`.
    pub fn centered(cx: f64, cy: f64, side: f64) -> Result<Self> {
        let half = side / 2.0;
        BBox::new(cx - half, cy - half, cx + half, cy + half)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn area(&self) -> f64 {
        box_area(self)
    }

    /// True when `other` lies inside `self` (shared edges allowed).
    pub fn contains(&self, other: &BBox) -> bool {
        self.x1 <= other.x1 && self.y1 <= other.y1 && other.x2 <= self.x2 && other.y2 <= self.y2
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }
}

pub fn box_area(b: &BBox) -> f64 {
    (b.x2 - b.x1) * (b.y2 - b.y1)
}

/// Overlap area of two boxes.
///
/// Disjoint boxes are rejected up front; otherwise the four x and four y
/// coordinates are sorted and the overlap is the product of the two middle
/// spans. Boxes that only share an edge produce a zero-width middle span.
pub fn intersection_area(a: &BBox, b: &BBox) -> f64 {
    if a.x1 > b.x2 || a.y1 > b.y2 || b.x1 > a.x2 || b.y1 > a.y2 {
        return 0.0;
    }
    let mut xs = [a.x1, a.x2, b.x1, b.x2];
    let mut ys = [a.y1, a.y2, b.y1, b.y2];
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    (xs[2] - xs[1]) * (ys[2] - ys[1])
}

/// Intersection over union.
pub fn iou(g: &BBox, d: &BBox) -> f64 {
    let inter = intersection_area(g, d);
    if inter == 0.0 {
        return 0.0;
    }
    let union = g.area() + d.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Cover area rate: intersection over the smaller box's area.
pub fn car(g: &BBox, d: &BBox) -> f64 {
    let inter = intersection_area(g, d);
    if inter == 0.0 {
        return 0.0;
    }
    (inter / g.area().min(d.area())).clamp(0.0, 1.0)
}
