//! Detection-error evaluation of novelty scores against ground truth.
//!
//! "New" is the target class. A document is predicted new when its score is
//! at or above the threshold. The miss probability is the fraction of truly
//! new documents predicted old; the false-alarm probability is the fraction
//! of truly old documents predicted new.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

mod probit;

pub use probit::{probit, PROBIT_CLAMP};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("ground truth has no {0} documents; error rates are undefined")]
    DegenerateTruth(&'static str),
    #[error("invalid cost parameters: {0}")]
    InvalidCost(String),
    #[error("cannot write DET curve: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    New,
    Old,
}

/// Error-cost weights of the normalized detection cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams<T> {
    pub c_miss: T,
    pub c_fa: T,
    /// Prior probability that a document is a first story.
    pub p_target: T,
}

impl<T: Scalar> CostParams<T> {
    pub fn new(c_miss: T, c_fa: T, p_target: T) -> Result<Self, EvalError> {
        let p = Self {
            c_miss,
            c_fa,
            p_target,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let zero = T::zero();
        if !(self.c_miss > zero && self.c_miss.is_finite()) {
            return Err(EvalError::InvalidCost(format!("c_miss = {}", self.c_miss)));
        }
        if !(self.c_fa > zero && self.c_fa.is_finite()) {
            return Err(EvalError::InvalidCost(format!("c_fa = {}", self.c_fa)));
        }
        if !(self.p_target > zero && self.p_target < T::one()) {
            return Err(EvalError::InvalidCost(format!(
                "p_target must be in (0,1), got {}",
                self.p_target
            )));
        }
        Ok(())
    }

    pub fn p_nontarget(&self) -> T {
        T::one() - self.p_target
    }
}

impl<T: Scalar> Default for CostParams<T> {
    /// `c_miss = 1`, `c_fa = 0.1`, `p_target = 0.02`.
    fn default() -> Self {
        Self {
            c_miss: T::one(),
            c_fa: T::lit(0.1),
            p_target: T::lit(0.02),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates<T> {
    pub p_miss: T,
    pub p_fa: T,
}

fn class_sizes<T>(scores: &[(T, Truth)]) -> Result<(u64, u64), EvalError> {
    let new = scores.iter().filter(|(_, t)| *t == Truth::New).count() as u64;
    let old = scores.len() as u64 - new;
    if new == 0 {
        return Err(EvalError::DegenerateTruth("new"));
    }
    if old == 0 {
        return Err(EvalError::DegenerateTruth("old"));
    }
    Ok((new, old))
}

/// Miss and false-alarm probabilities at one threshold.
pub fn confusion<T: Scalar>(
    scores: &[(T, Truth)],
    threshold: T,
) -> Result<ErrorRates<T>, EvalError> {
    let (n_new, n_old) = class_sizes(scores)?;
    let mut misses = 0u64;
    let mut false_alarms = 0u64;
    for &(s, truth) in scores {
        let predicted_new = s >= threshold;
        match truth {
            Truth::New if !predicted_new => misses += 1,
            Truth::Old if predicted_new => false_alarms += 1,
            _ => {}
        }
    }
    Ok(ErrorRates {
        p_miss: T::from_count(misses) / T::from_count(n_new),
        p_fa: T::from_count(false_alarms) / T::from_count(n_old),
    })
}

/// Normalized detection cost: the weighted error divided by the cost of the
/// better of the two trivial systems (always-new, always-old).
pub fn cost_norm<T: Scalar>(p_miss: T, p_fa: T, params: &CostParams<T>) -> T {
    let miss_weight = params.c_miss * params.p_target;
    let fa_weight = params.c_fa * params.p_nontarget();
    (miss_weight * p_miss + fa_weight * p_fa) / miss_weight.min(fa_weight)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint<T> {
    pub threshold: T,
    pub p_miss: T,
    pub p_fa: T,
    pub cost_norm: T,
}

impl<T: Scalar> DetPoint<T> {
    pub fn probit_miss(&self) -> T {
        probit(self.p_miss)
    }

    pub fn probit_fa(&self) -> T {
        probit(self.p_fa)
    }
}

/// Operating points in ascending threshold order.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve<T> {
    pub points: Vec<DetPoint<T>>,
    /// Index of the lowest-cost point (the lowest threshold among ties).
    pub min_cost: usize,
}

impl<T: Scalar> DetCurve<T> {
    pub fn min_cost_point(&self) -> &DetPoint<T> {
        &self.points[self.min_cost]
    }
}

/// Sweeps the threshold over every observed score.
///
/// The curve starts at the `-inf` sentinel (everything predicted new, point
/// `(0, 1)`) and ends at the `+inf` sentinel (nothing predicted new, point
/// `(1, 0)`). In between there is one point per distinct score, except the
/// smallest: thresholding there predicts everything new, which is the `-inf`
/// point again.
pub fn det_curve<T: Scalar>(
    scores: &[(T, Truth)],
    params: &CostParams<T>,
) -> Result<DetCurve<T>, EvalError> {
    let (n_new, n_old) = class_sizes(scores)?;
    let mut sorted: Vec<(T, Truth)> = scores.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores are not NaN"));

    let (n_new_t, n_old_t) = (T::from_count(n_new), T::from_count(n_old));
    let point = |threshold: T, new_below: u64, old_below: u64| {
        let p_miss = T::from_count(new_below) / n_new_t;
        let p_fa = T::from_count(n_old - old_below) / n_old_t;
        DetPoint {
            threshold,
            p_miss,
            p_fa,
            cost_norm: cost_norm(p_miss, p_fa, params),
        }
    };

    let mut points = vec![point(T::neg_infinity(), 0, 0)];
    let (mut new_below, mut old_below) = (0u64, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        let s = sorted[i].0;
        if i > 0 {
            points.push(point(s, new_below, old_below));
        }
        while i < sorted.len() && sorted[i].0 == s {
            match sorted[i].1 {
                Truth::New => new_below += 1,
                Truth::Old => old_below += 1,
            }
            i += 1;
        }
    }
    points.push(point(T::infinity(), n_new, n_old));

    let min_cost = points.iter().enumerate().fold(0, |best, (i, p)| {
        if p.cost_norm < points[best].cost_norm {
            i
        } else {
            best
        }
    });
    Ok(DetCurve { points, min_cost })
}

pub const DET_CSV_HEADER: [&str; 7] = [
    "threshold",
    "p_miss",
    "p_fa",
    "probit_miss",
    "probit_fa",
    "cost_norm",
    "is_min_cost",
];

/// Writes the curve as CSV, one row per point in ascending threshold order.
pub fn write_det_csv<T: Scalar, W: Write>(curve: &DetCurve<T>, out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DET_CSV_HEADER)?;
    for (i, p) in curve.points.iter().enumerate() {
        w.write_record([
            p.threshold.to_string(),
            p.p_miss.to_string(),
            p.p_fa.to_string(),
            p.probit_miss().to_string(),
            p.probit_fa().to_string(),
            p.cost_norm.to_string(),
            (i == curve.min_cost).to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
