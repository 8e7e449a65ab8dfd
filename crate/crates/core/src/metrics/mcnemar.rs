use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{check_unique_ids, LabelMatch, MetricsError, PredictionRecord};

/// Below this many discordant pairs the exact binomial test is used.
pub const EXACT_THRESHOLD: u64 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McNemarMethod {
    Exact,
    ChiSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// A correct, B wrong.
    pub b: u64,
    /// A wrong, B correct.
    pub c: u64,
    pub method: McNemarMethod,
    pub statistic: Option<f64>,
    pub p_value: f64,
}

/// Two-sided exact binomial tail, `min(1, 2 * P(X <= min(b, c)))` with
/// `X ~ Binomial(b + c, 1/2)`. Terms are accumulated in log space so large
/// `n` does not overflow.
fn exact_p(b: u64, c: u64) -> f64 {
    let n = b + c;
    let k_max = b.min(c);
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut ln_choose = 0.0f64;
    let mut total = 0.0f64;
    for k in 0..=k_max {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        total += (ln_choose - ln2n).exp();
    }
    (2.0 * total).min(1.0)
}

pub fn mcnemar_from_counts(b: u64, c: u64) -> McNemarResult {
    let n = b + c;
    if n == 0 {
        return McNemarResult {
            b,
            c,
            method: McNemarMethod::Exact,
            statistic: None,
            p_value: 1.0,
        };
    }
    if n < EXACT_THRESHOLD {
        return McNemarResult {
            b,
            c,
            method: McNemarMethod::Exact,
            statistic: None,
            p_value: exact_p(b, c),
        };
    }
    let diff = (b as f64 - c as f64).abs() - 1.0;
    let diff = diff.max(0.0);
    let statistic = diff * diff / n as f64;
    let chi = ChiSquared::new(1.0).expect("one degree of freedom is valid");
    McNemarResult {
        b,
        c,
        method: McNemarMethod::ChiSquare,
        statistic: Some(statistic),
        p_value: chi.sf(statistic).clamp(0.0, 1.0),
    }
}

/// Paired test between two runs over the same example ids.
pub fn mcnemar(
    run_a: &[PredictionRecord],
    run_b: &[PredictionRecord],
    policy: LabelMatch,
) -> Result<McNemarResult, MetricsError> {
    check_unique_ids(run_a)?;
    check_unique_ids(run_b)?;
    if run_a.len() != run_b.len() {
        return Err(MetricsError::Alignment(format!(
            "runs cover {} and {} examples",
            run_a.len(),
            run_b.len()
        )));
    }
    let by_id: HashMap<&str, &PredictionRecord> = run_b.iter().map(|r| (r.example_id.as_str(), r)).collect();
    let (mut b, mut c) = (0u64, 0u64);
    for ra in run_a {
        let rb = by_id
            .get(ra.example_id.as_str())
            .ok_or_else(|| MetricsError::Alignment(format!("{} is missing from the second run", ra.example_id)))?;
        match (ra.is_correct(policy), rb.is_correct(policy)) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok(mcnemar_from_counts(b, c))
}
