//! One-sample hypothesis tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::{mean, normal_cdf, normal_sf, sample_variance, student_t_cdf, student_t_sf};
use crate::script::Tail;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestError {
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("null proportion {0} must lie strictly inside (0, 1)")]
    InvalidNullProportion(f64),
    #[error("successes {successes} exceed sample size {n}")]
    InvalidTally { successes: usize, n: usize },
    #[error("test statistic undefined: zero sample variance")]
    ZeroVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    RejectH0,
    FailToReject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ProportionZ,
    MeanT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub hypothesis_id: String,
    pub kind: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub tail: Tail,
    pub n: usize,
    /// Sample proportion or sample mean.
    pub estimate: f64,
    pub null_value: f64,
    pub alpha: f64,
    pub decision: Decision,
}

fn decide(p: f64, alpha: f64) -> Decision {
    if p < alpha {
        Decision::RejectH0
    } else {
        Decision::FailToReject
    }
}

/// One-sample z test of a proportion:
/// `z = (p̂ - p0) / sqrt(p0 (1 - p0) / n)`.
pub fn proportion_test(
    hypothesis_id: &str,
    successes: usize,
    n: usize,
    p0: f64,
    tail: Tail,
    alpha: f64,
) -> Result<TestResult, TestError> {
    if n < 1 {
        return Err(TestError::TooFew { needed: 1, got: n });
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(TestError::InvalidNullProportion(p0));
    }
    if successes > n {
        return Err(TestError::InvalidTally { successes, n });
    }
    let p_hat = successes as f64 / n as f64;
    let z = (p_hat - p0) / (p0 * (1.0 - p0) / n as f64).sqrt();
    let p = match tail {
        Tail::Right => normal_sf(z),
        Tail::Left => normal_cdf(z),
        Tail::Two => (2.0 * normal_sf(z.abs())).min(1.0),
    };
    Ok(TestResult {
        hypothesis_id: hypothesis_id.to_string(),
        kind: TestKind::ProportionZ,
        statistic: z,
        p_value: p,
        tail,
        n,
        estimate: p_hat,
        null_value: p0,
        alpha,
        decision: decide(p, alpha),
    })
}

/// One-sample t test of a mean: `t = (x̄ - μ0) / (s / sqrt(n))` with `n - 1`
/// degrees of freedom.
pub fn mean_test(
    hypothesis_id: &str,
    sample: &[f64],
    mu0: f64,
    tail: Tail,
    alpha: f64,
) -> Result<TestResult, TestError> {
    let n = sample.len();
    if n < 2 {
        return Err(TestError::TooFew { needed: 2, got: n });
    }
    let s2 = sample_variance(sample);
    if s2 <= 0.0 {
        return Err(TestError::ZeroVariance);
    }
    let xbar = mean(sample);
    let t = (xbar - mu0) / (s2.sqrt() / (n as f64).sqrt());
    let df = (n - 1) as f64;
    let p = match tail {
        Tail::Right => student_t_sf(t, df),
        Tail::Left => student_t_cdf(t, df),
        Tail::Two => (2.0 * student_t_sf(t.abs(), df)).min(1.0),
    };
    Ok(TestResult {
        hypothesis_id: hypothesis_id.to_string(),
        kind: TestKind::MeanT,
        statistic: t,
        p_value: p,
        tail,
        n,
        estimate: xbar,
        null_value: mu0,
        alpha,
        decision: decide(p, alpha),
    })
}
