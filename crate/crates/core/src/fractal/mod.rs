//! Fractal and random-fractal curves, their topological indexing, box-counting
//! statistics, and synthetic annotation scenes built on top of them.
//!
//! Random draws use `ChaCha8Rng` (from `rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, which yields the same stream on every
//! platform. Uniform samples are `lo + (hi - lo) * u` with `u` the generator's
//! standard `f64` draw.

mod curve;
mod dimension;
mod scene;

pub use curve::{
    apply_transform, expected_point_count, extract_subcurve, generate_curve, generate_curve_capped,
    topological_order, IndexedPoint, Point, PolyCurve, TransformKind, TransformParams,
    DEFAULT_MAX_POINTS,
};
pub use dimension::{box_count, dyadic_scales, estimate_fractal_dimension, MIN_ESTIMATION_DEPTH};
pub use scene::{synthesize_annotations, NoiseModel, SyntheticScene, CRACK_CLASS};
