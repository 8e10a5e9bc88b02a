//! End-to-end evaluation of a detection set under either or both standards.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{
    build_car_matrix, check_threshold, greedy_one_to_one_match, image_precision_map, multi_match,
    sort_by_confidence, Detection, GroundTruth,
};
use crate::metrics::{aggregate_all, aggregate_class, image_scores, EvalReport, ImageScore};

pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.55;
pub const DEFAULT_CONFIDENCE_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MU_LIST: [f64; 2] = [0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Standard {
    Map,
    Coveval,
    Both,
}

impl Standard {
    pub fn runs_map(self) -> bool {
        matches!(self, Standard::Map | Standard::Both)
    }

    pub fn runs_coveval(self) -> bool {
        matches!(self, Standard::Coveval | Standard::Both)
    }
}

impl fmt::Display for Standard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Standard::Map => "map",
            Standard::Coveval => "coveval",
            Standard::Both => "both",
        })
    }
}

impl FromStr for Standard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(Standard::Map),
            "coveval" => Ok(Standard::Coveval),
            "both" => Ok(Standard::Both),
            other => Err(Error::config(format!(
                "unknown standard '{other}'; expected map, coveval or both"
            ))),
        }
    }
}

/// Effective evaluation settings, echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Shared by the IoU test of the ranked standard and the cover-rate test.
    pub overlap_threshold: f64,
    /// Applied to the covering standard only.
    pub confidence_threshold: f64,
    pub mu_list: Vec<f64>,
    pub standard: Standard,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            confidence_threshold: DEFAULT_CONFIDENCE_THRESHOLD,
            mu_list: DEFAULT_MU_LIST.to_vec(),
            standard: Standard::Both,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        check_threshold("overlap threshold", self.overlap_threshold)?;
        check_threshold("confidence threshold", self.confidence_threshold)?;
        if self.mu_list.is_empty() {
            return Err(Error::config("mu list is empty"));
        }
        for &mu in &self.mu_list {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::config(format!("mu {mu} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub image_id: String,
    pub width: Option<f64>,
    pub height: Option<f64>,
}

/// Everything needed for one evaluation run.
#[derive(Debug, Clone, Default)]
pub struct EvalSet {
    pub images: Vec<ImageInfo>,
    pub classes: Vec<String>,
    pub ground_truths: Vec<GroundTruth>,
    pub detections: Vec<Detection>,
}

type GroupKey<'a> = (&'a str, &'a str);

/// Scores one image/class group. `dets` are in confidence order.
pub fn score_image(
    image_id: &str,
    class_id: &str,
    dets: &[Detection],
    gts: &[GroundTruth],
    config: &EvalConfig,
) -> Result<ImageScore> {
    let mut score = ImageScore {
        image_id: image_id.to_string(),
        class_id: class_id.to_string(),
        xp: None,
        xr: None,
        p_map: None,
    };
    if config.standard.runs_map() {
        let matched = greedy_one_to_one_match(dets, gts, config.overlap_threshold)?;
        score.p_map = image_precision_map(&matched, gts.len());
    }
    if config.standard.runs_coveval() {
        let kept: Vec<Detection> = dets
            .iter()
            .filter(|d| d.confidence >= config.confidence_threshold)
            .cloned()
            .collect();
        let matrix = build_car_matrix(&kept, gts)?;
        let result = multi_match(&matrix, config.overlap_threshold)?;
        (score.xp, score.xr) = image_scores(&result);
    }
    Ok(score)
}

/// Runs the configured standard(s) over every (class, image) pair.
///
/// `threads == 0` uses the global rayon pool. Per-image jobs are independent
/// and their results are collected in (class, image) order before any
/// reduction, so the report does not depend on the worker count.
pub fn evaluate(set: &EvalSet, config: &EvalConfig, threads: usize) -> Result<EvalReport> {
    config.validate()?;
    if set.images.is_empty() {
        return Err(Error::EmptyEvaluation("no images".into()));
    }
    if set.classes.is_empty() {
        return Err(Error::EmptyEvaluation("no classes".into()));
    }

    let mut groups: HashMap<GroupKey<'_>, (Vec<Detection>, Vec<GroundTruth>)> = HashMap::new();
    for d in &set.detections {
        groups
            .entry((d.image_id.as_str(), d.class_id.as_str()))
            .or_default()
            .0
            .push(d.clone());
    }
    for g in &set.ground_truths {
        groups
            .entry((g.image_id.as_str(), g.class_id.as_str()))
            .or_default()
            .1
            .push(g.clone());
    }
    for (dets, _) in groups.values_mut() {
        sort_by_confidence(dets);
    }

    let jobs: Vec<GroupKey<'_>> = set
        .classes
        .iter()
        .flat_map(|c| set.images.iter().map(move |i| (i.image_id.as_str(), c.as_str())))
        .collect();
    let empty = (Vec::new(), Vec::new());
    let run = || -> Result<Vec<ImageScore>> {
        jobs.par_iter()
            .map(|&(image, class)| {
                let (dets, gts) = groups.get(&(image, class)).unwrap_or(&empty);
                score_image(image, class, dets, gts, config)
            })
            .collect()
    };
    let images = if threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(run)?
    };

    let per_image = set.images.len();
    let per_class = set
        .classes
        .iter()
        .zip(images.chunks(per_image))
        .map(|(class, scores)| aggregate_class(class, scores, &config.mu_list))
        .collect::<Result<Vec<_>>>()?;
    let mut report = aggregate_all(per_class, config.clone())?;
    report.images = images;
    Ok(report)
}
