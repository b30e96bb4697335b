//! Small statistical helpers: Poisson pmf, total variation distance to a
//! Poisson law, sample means with standard errors.

use alloc::collections::BTreeMap;
use alloc::format;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// `e^{−m} m^k / k!`
pub fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (k * mean.ln() - mean - libm::lgamma(k + 1.0)).exp()
}

/// `(1/2) Σ_k |h(k) − Poisson(mean)(k)|`, where the Poisson mass beyond the
/// largest key of `histogram` enters the sum in full.
pub fn tv_distance(histogram: &BTreeMap<usize, f64>, mean: f64) -> Result<f64> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!("Poisson mean {mean} must be finite and nonnegative")));
    }
    let top = histogram.keys().next_back().copied().unwrap_or(0);
    let mut sum = 0.0;
    let mut covered = 0.0;
    for k in 0..=top {
        let q = poisson_pmf(k, mean);
        covered += q;
        sum += (histogram.get(&k).copied().unwrap_or(0.0) - q).abs();
    }
    sum += (1.0 - covered).max(0.0);
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Sample mean and its standard error (`s/√m`, with `s` the unbiased
/// sample standard deviation).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}
