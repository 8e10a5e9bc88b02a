//! Detection evaluation for objects that are marked with chains of boxes,
//! such as cracks.
//!
//! Two standards are provided side by side:
//!
//! * the ranked, one-to-one IoU standard ([`matching::greedy_one_to_one_match`],
//!   [`matching::image_precision_map`]) averaged into AP and mAP;
//! * the covering standard: the cover area rate [`geometry::car`], free
//!   multi-matching over a [`matching::CarMatrix`], extended precision and
//!   recall, and the extended F-score [`metrics::f_ext_mu`].
//!
//! The [`fractal`] module generates fractal and random-fractal polylines and
//! synthetic annotation scenes along them, which is enough to show where the
//! two standards disagree without any trained detector.
//!
//! ```
//! use coveval::geometry::{car, iou, BBox};
//!
//! let crack = BBox::new(0.0, 0.0, 100.0, 10.0)?;
//! let part = BBox::new(20.0, 0.0, 30.0, 10.0)?;
//! assert_eq!(car(&crack, &part), 1.0);
//! assert!(iou(&crack, &part) < 0.55);
//! # Ok::<(), coveval::Error>(())
//! ```

pub mod cli;
pub mod datasets;
pub mod error;
pub mod evaluate;
pub mod fractal;
pub mod geometry;
pub mod matching;
pub mod metrics;

pub use error::{Error, Result};
pub use evaluate::{evaluate, EvalConfig, EvalSet, ImageInfo, Standard};
pub use geometry::BBox;
pub use matching::{Detection, GroundTruth};
pub use metrics::{f_ext_mu, EvalReport};
