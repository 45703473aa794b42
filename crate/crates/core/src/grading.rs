//! Points and step-by-step feedback from a search result.
//!
//! Point arithmetic is generic over the scalar: `f64` for the CLI, exact
//! rationals for tests that need them.

use std::fmt::{self, Display, Write as _};

use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::{SearchResult, SearchStatus};
use crate::{Cost, Points};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("invalid grading configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no report for a search that ended with status '{0}'")]
    NotFound(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradingConfig<T = Points> {
    max_points: T,
    scale: T,
}

impl<T: Num + PartialOrd + Copy> GradingConfig<T> {
    pub fn new(max_points: T, scale: T) -> Result<Self, GradingError> {
        use std::cmp::Ordering::{Equal, Greater};
        // NaN compares as None and fails both checks.
        if !matches!(max_points.partial_cmp(&T::zero()), Some(Greater | Equal)) {
            return Err(GradingError::InvalidConfig("maxPoints must not be negative"));
        }
        if scale.partial_cmp(&T::zero()) != Some(Greater) {
            return Err(GradingError::InvalidConfig("scale must be positive"));
        }
        Ok(GradingConfig { max_points, scale })
    }

    pub fn max_points(&self) -> T {
        self.max_points
    }

    pub fn scale(&self) -> T {
        self.scale
    }
}

impl Default for GradingConfig<Points> {
    fn default() -> Self {
        GradingConfig {
            max_points: 10.0,
            scale: 1.0,
        }
    }
}

/// `max(max_points - distance * scale, 0)`.
pub fn grade<T>(distance: Cost, cfg: &GradingConfig<T>) -> T
where
    T: Num + PartialOrd + Copy + FromPrimitive,
{
    let d = T::from_u32(distance).expect("every u32 distance is representable");
    let points = cfg.max_points - d * cfg.scale;
    if points > T::zero() {
        points
    } else {
        T::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackStep {
    pub step_index: usize,
    pub edit_name: String,
    pub cost: Cost,
    pub description: String,
    pub resulting_query: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedbackReport<T = Points> {
    pub total_distance: Cost,
    pub points: T,
    /// Ordered from start to destination.
    pub steps: Vec<FeedbackStep>,
}

pub fn build_report<T>(result: &SearchResult, cfg: &GradingConfig<T>) -> Result<FeedbackReport<T>, GradingError>
where
    T: Num + PartialOrd + Copy + FromPrimitive,
{
    let (SearchStatus::Found, Some(distance)) = (result.status, result.distance) else {
        return Err(GradingError::NotFound(result.status.label()));
    };
    let steps = result
        .path
        .iter()
        .enumerate()
        .map(|(i, s)| FeedbackStep {
            step_index: i + 1,
            edit_name: s.edit.clone(),
            cost: s.cost,
            description: s.description.clone(),
            resulting_query: s.to.render_inline(),
        })
        .collect();
    Ok(FeedbackReport {
        total_distance: distance,
        points: grade(distance, cfg),
        steps,
    })
}

impl<T: Display> FeedbackReport<T> {
    /// The plain-text report: distance, points, then one numbered line per
    /// step followed by the query it produces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "distance: {}", self.total_distance).unwrap();
        writeln!(out, "points: {}", self.points).unwrap();
        for s in &self.steps {
            writeln!(out, "{}. {} (cost {}): {}", s.step_index, s.edit_name, s.cost, s.description).unwrap();
            writeln!(out, "   {}", s.resulting_query).unwrap();
        }
        out
    }
}

impl<T: Display> fmt::Display for FeedbackReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
