//! Hypothesis tests used to compare Monte Carlo runs.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square_p(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    dist.sf(statistic)
}

/// Pearson goodness-of-fit of observed counts against bin probabilities.
///
/// `expected_probs` is renormalized to sum to one. Bins with zero expected
/// probability must have zero observed counts.
pub fn chi_square_goodness_of_fit(observed: &[u64], expected_probs: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected_probs.len() || observed.len() < 2 {
        return Err(Error::invalid("goodness-of-fit needs matching bins (at least 2)"));
    }
    let total: f64 = expected_probs.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::invalid("expected probabilities sum to zero"));
    }
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = n * p / total;
        if e > 0.0 {
            let diff = o as f64 - e;
            statistic += diff * diff / e;
            used += 1;
        } else if o > 0 {
            statistic = f64::INFINITY;
        }
    }
    let dof = used.saturating_sub(1);
    Ok(ChiSquareResult { statistic, dof, p_value: chi_square_p(statistic, dof) })
}

/// Two-sample chi-square test on binned counts with possibly unequal totals.
///
/// Uses `sum (K1 r_i - K2 s_i)^2 / (r_i + s_i)` with `K1 = sqrt(S/R)`,
/// `K2 = sqrt(R/S)`, skipping bins empty in both samples. Degrees of freedom
/// are `bins - 1` when the totals agree and `bins` otherwise.
pub fn chi_square_two_sample(r: &[u64], s: &[u64]) -> Result<ChiSquareResult> {
    if r.len() != s.len() {
        return Err(Error::invalid("two-sample chi-square needs equal bin counts"));
    }
    let rt: u64 = r.iter().sum();
    let st: u64 = s.iter().sum();
    if rt == 0 || st == 0 {
        return Err(Error::invalid("two-sample chi-square needs non-empty samples"));
    }
    let (rt, st_f) = (rt as f64, st as f64);
    let k1 = (st_f / rt).sqrt();
    let k2 = (rt / st_f).sqrt();
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (&a, &b) in r.iter().zip(s) {
        if a + b == 0 {
            continue;
        }
        let diff = k1 * a as f64 - k2 * b as f64;
        statistic += diff * diff / (a + b) as f64;
        used += 1;
    }
    let dof = if rt == st_f { used.saturating_sub(1) } else { used };
    Ok(ChiSquareResult { statistic, dof, p_value: chi_square_p(statistic, dof) })
}

/// Two-sided pooled z-test for equality of two binomial proportions.
///
/// Returns `None` when either sample is empty.
pub fn two_proportion_p_value(x1: u64, n1: u64, x2: u64, n2: u64) -> Option<f64> {
    if n1 == 0 || n2 == 0 {
        return None;
    }
    let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64);
    if var <= 0.0 {
        return Some(if p1 == p2 { 1.0 } else { 0.0 });
    }
    let z = (p1 - p2).abs() / var.sqrt();
    let normal = Normal::standard();
    Some((2.0 * normal.sf(z)).min(1.0))
}

/// Exact two-sided binomial test, doubling the smaller tail.
pub fn binomial_two_sided_p_value(successes: u64, trials: u64, p: f64) -> Result<f64> {
    if successes > trials {
        return Err(Error::invalid("successes exceed trials"));
    }
    let dist = Binomial::new(p, trials).map_err(|e| Error::invalid(e.to_string()))?;
    let lower = dist.cdf(successes);
    let upper = if successes == 0 { 1.0 } else { dist.sf(successes - 1) };
    Ok((2.0 * lower.min(upper)).min(1.0))
}

/// Kolmogorov-Smirnov distance between sorted-on-demand samples and a CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
