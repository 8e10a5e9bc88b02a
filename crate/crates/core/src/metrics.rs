//! Per-image scores, class and dataset aggregation, and the extended F-score.
//!
//! Undefined ratios (recall with no ground truth, precision with no
//! detections) are carried as `None` and skipped when averaging. A class whose
//! images are all undefined for a statistic reports `None` rather than 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::EvalConfig;
use crate::matching::MultiMatchResult;

/// Version tag written into every report document.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub image_id: String,
    pub class_id: String,
    pub xp: Option<f64>,
    pub xr: Option<f64>,
    pub p_map: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuScore {
    pub mu: f64,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub class_id: String,
    pub axr: Option<f64>,
    pub axp: Option<f64>,
    pub ap: Option<f64>,
    pub f_ext: Vec<MuScore>,
}

impl ClassScore {
    pub fn f_ext_at(&self, mu: f64) -> Option<f64> {
        lookup_mu(&self.f_ext, mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub config: EvalConfig,
    pub per_class: Vec<ClassScore>,
    pub map: Option<f64>,
    pub maxr: Option<f64>,
    pub maxp: Option<f64>,
    pub mf_ext: Vec<MuScore>,
    pub images: Vec<ImageScore>,
}

impl EvalReport {
    pub fn mf_ext_at(&self, mu: f64) -> Option<f64> {
        lookup_mu(&self.mf_ext, mu)
    }

    pub fn class(&self, class_id: &str) -> Option<&ClassScore> {
        self.per_class.iter().find(|c| c.class_id == class_id)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::config("report is missing \"schema_version\""))?;
        if found != u64::from(REPORT_SCHEMA_VERSION) {
            return Err(Error::SchemaVersion {
                found: found.min(u64::from(u32::MAX)) as u32,
                expected: REPORT_SCHEMA_VERSION,
            });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn lookup_mu(scores: &[MuScore], mu: f64) -> Option<f64> {
    scores.iter().find(|s| s.mu == mu).and_then(|s| s.value)
}

/// Extended precision and recall of one image: `k_p / m` and `k_r / n`.
///
/// Precision is undefined only when the image has ground truth but no
/// detections; detections on an image without ground truth are all false
/// alarms and give 0. Recall is undefined when `n == 0`.
pub fn image_scores(result: &MultiMatchResult) -> (Option<f64>, Option<f64>) {
    let xp = match (result.m, result.n) {
        (0, _) => None,
        (m, _) => Some(result.k_p as f64 / m as f64),
    };
    let xr = match result.n {
        0 => None,
        n => Some(result.k_r as f64 / n as f64),
    };
    (xp, xr)
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, count) = values
        .flatten()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn f_ext_list(axp: Option<f64>, axr: Option<f64>, mu_list: &[f64]) -> Result<Vec<MuScore>> {
    mu_list
        .iter()
        .map(|&mu| {
            let value = match (axp, axr) {
                (Some(p), Some(r)) => Some(f_ext_mu(p, r, mu)?.value),
                _ => None,
            };
            Ok(MuScore { mu, value })
        })
        .collect()
}

/// Averages the per-image scores of one class.
pub fn aggregate_class(class_id: &str, scores: &[ImageScore], mu_list: &[f64]) -> Result<ClassScore> {
    if scores.is_empty() {
        return Err(Error::config(format!("class '{class_id}' has no image scores")));
    }
    if let Some(s) = scores.iter().find(|s| s.class_id != class_id) {
        return Err(Error::config(format!(
            "score for class '{}' passed to aggregation of '{class_id}'",
            s.class_id
        )));
    }
    let axp = mean_defined(scores.iter().map(|s| s.xp));
    let axr = mean_defined(scores.iter().map(|s| s.xr));
    let ap = mean_defined(scores.iter().map(|s| s.p_map));
    Ok(ClassScore {
        class_id: class_id.to_string(),
        axr,
        axp,
        ap,
        f_ext: f_ext_list(axp, axr, mu_list)?,
    })
}

/// Unweighted means over classes. The extended F-score is computed per class
/// first and then averaged.
pub fn aggregate_all(classes: Vec<ClassScore>, config: EvalConfig) -> Result<EvalReport> {
    if classes.is_empty() {
        return Err(Error::config("no classes to aggregate"));
    }
    let map = mean_defined(classes.iter().map(|c| c.ap));
    let maxr = mean_defined(classes.iter().map(|c| c.axr));
    let maxp = mean_defined(classes.iter().map(|c| c.axp));
    let mf_ext = config
        .mu_list
        .iter()
        .map(|&mu| MuScore {
            mu,
            value: mean_defined(classes.iter().map(|c| c.f_ext_at(mu))),
        })
        .collect();
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config,
        per_class: classes,
        map,
        maxr,
        maxp,
        mf_ext,
        images: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedF {
    pub value: f64,
    /// Both inputs were 0; the score is defined as 0.
    pub degenerate: bool,
    /// `mu` was exactly 0 or 1, which rewards detectors that mark everything
    /// or nothing.
    pub extreme_mu: bool,
}

/// Extended F-score with trade-off factor `mu`:
///
/// ```text
/// F(mu) = xp^(2(1-mu)) * xr^(2 mu) / ((1-mu) xp + mu xr)
/// ```
///
/// `mu = 0` gives `xp`, `mu = 1` gives `xr` and `mu = 0.5` the harmonic mean.
pub fn f_ext_mu(xp: f64, xr: f64, mu: f64) -> Result<ExtendedF> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::config(format!("mu {mu} outside [0, 1]")));
    }
    for (name, v) in [("xp", xp), ("xr", xr)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::config(format!("{name} {v} outside [0, 1]")));
        }
    }
    let extreme_mu = mu == 0.0 || mu == 1.0;
    if extreme_mu {
        log::warn!("mu = {mu} is deprecated: the score ignores one of precision or recall");
    }
    if xp == 0.0 && xr == 0.0 {
        return Ok(ExtendedF {
            value: 0.0,
            degenerate: true,
            extreme_mu,
        });
    }
    let numerator = xp.powf(2.0 * (1.0 - mu)) * xr.powf(2.0 * mu);
    let denominator = (1.0 - mu) * xp + mu * xr;
    let value = if denominator == 0.0 { 0.0 } else { numerator / denominator };
    Ok(ExtendedF {
        value,
        degenerate: false,
        extreme_mu,
    })
}

/// Suggested trade-off factors for common inspection scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    AvoidFalseAlarm,
    Balanced,
    AvoidMissing,
    StronglyAvoidMissing,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::AvoidFalseAlarm,
        Scenario::Balanced,
        Scenario::AvoidMissing,
        Scenario::StronglyAvoidMissing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::AvoidFalseAlarm => "avoid-false-alarm",
            Scenario::Balanced => "balanced",
            Scenario::AvoidMissing => "avoid-missing",
            Scenario::StronglyAvoidMissing => "strongly-avoid-missing",
        }
    }

    pub fn mu(self) -> f64 {
        match self {
            Scenario::AvoidFalseAlarm => 0.05,
            Scenario::Balanced => 0.5,
            Scenario::AvoidMissing => 0.8,
            Scenario::StronglyAvoidMissing => 0.95,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                Error::config(format!("unknown scenario '{s}'; valid names: {}", valid.join(", ")))
            })
    }
}

pub fn mu_preset(name: &str) -> Result<f64> {
    name.parse::<Scenario>().map(Scenario::mu)
}

/// Percent with one decimal, or `n/a`.
pub fn format_percent(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.1}", v * 100.0),
        None => "n/a".to_string(),
    }
}
