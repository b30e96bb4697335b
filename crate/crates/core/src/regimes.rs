//! Radii achieving a prescribed limit `α` for the expected number of
//! isolated vertices in `d = 2`, in each of the five `(n, p)` regimes, and
//! the Gupta–Kumar style prediction for comparison.
//!
//! Every formula gives a target for `n·I(φ)`; with `φ` of the form
//! `p·ψ(|x|/r)` we have `n·I(φ) = n·p·r²·J2`, which is then inverted for `r`.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::connection::ShapeDescriptor;
use crate::{Error, Result};

/// Classification cutoffs on `u = p·log n` and `v = p·n^{1/3}·log n`.
pub const RATIO_HIGH: f64 = 3.0;
pub const RATIO_LOW: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Isolated vertices in the bulk dominate.
    Core,
    Side,
    CoreSideBoundary,
    /// Isolated vertices near the corners dominate.
    Corner,
    SideCornerBoundary,
}

impl Regime {
    pub const ALL: [Regime; 5] =
        [Regime::Core, Regime::Side, Regime::CoreSideBoundary, Regime::Corner, Regime::SideCornerBoundary];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Core => "core",
            Regime::Side => "side",
            Regime::CoreSideBoundary => "core_side_boundary",
            Regime::Corner => "corner",
            Regime::SideCornerBoundary => "side_corner_boundary",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_").to_ascii_lowercase();
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown regime {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub regime: Regime,
    pub n: f64,
    pub p: f64,
    pub alpha: f64,
    #[serde(rename = "J1")]
    pub j1: f64,
    #[serde(rename = "J2")]
    pub j2: f64,
}

impl RegimeSpec {
    pub fn new(regime: Regime, n: f64, p: f64, alpha: f64, shape: &ShapeDescriptor) -> Self {
        Self { regime, n, p, alpha, j1: shape.j1, j2: shape.j2 }
    }

    /// Shape pair of a Step function: `J1 = 1`, `J2 = π`.
    pub fn step(regime: Regime, n: f64, p: f64, alpha: f64) -> Self {
        Self { regime, n, p, alpha, j1: 1.0, j2: core::f64::consts::PI }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v} out of range")));
        if !(self.n > 1.0 && self.n.is_finite()) {
            return bad("n", self.n);
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad("p", self.p);
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha", self.alpha);
        }
        if !(self.j1 > 0.0 && self.j1.is_finite()) {
            return bad("J1", self.j1);
        }
        if !(self.j2 > 0.0 && self.j2.is_finite()) {
            return bad("J2", self.j2);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSolution {
    pub r: f64,
    #[serde(rename = "nI_target")]
    pub n_i_target: f64,
    /// `γ` (core/side boundary) or `β` (side/corner boundary).
    pub aux_root: Option<f64>,
}

/// `log x − log log x`, requiring `log x > 1`.
fn log_minus_loglog(x: f64, term: &'static str) -> Result<f64> {
    let l = x.ln();
    if !(l > 1.0) {
        return Err(Error::DegenerateTarget { term, value: l });
    }
    Ok(l - l.ln())
}

fn corner_base(spec: &RegimeSpec) -> Result<f64> {
    Ok(log_minus_loglog(1.0 / spec.p, "log(1/p)")? + (spec.j2 / (spec.j1 * spec.j1)).ln())
}

fn side_base(spec: &RegimeSpec) -> Result<f64> {
    Ok(log_minus_loglog(spec.n / spec.p, "log(n/p)")? + (4.0 * spec.j2 / (spec.j1 * spec.j1)).ln())
}

/// Coefficient `c` of `c·β² + β = α`.
fn beta_coefficient(n: f64, p: f64, j1: f64, j2: f64) -> f64 {
    (3.0 * j2).powf(-1.5) * j1.powi(3) * (n.cbrt() * p * n.ln()).powf(1.5)
}

/// Positive root of `γ² + 2γ(√J2/J1)(p log n)^{-1/2} = α`.
pub fn gamma_solve(p: f64, n: f64, alpha: f64, j1: f64, j2: f64) -> Result<f64> {
    let u = p * n.ln();
    if !(u > 0.0) {
        return Err(Error::InvalidParameter(format!("p·log n = {u} must be positive")));
    }
    let b = 2.0 * j2.sqrt() / j1 / u.sqrt();
    // 2α / (b + √(b² + 4α)) avoids cancellation when b² ≫ α
    Ok(2.0 * alpha / (b + (b * b + 4.0 * alpha).sqrt()))
}

/// Positive root of `(3J2)^{-3/2} J1³ (n^{1/3} p log n)^{3/2} β² + β = α`.
pub fn beta_solve(n: f64, p: f64, alpha: f64, j1: f64, j2: f64) -> Result<f64> {
    let c = beta_coefficient(n, p, j1, j2);
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("quadratic coefficient {c} not finite and nonnegative")));
    }
    Ok(2.0 * alpha / (1.0 + (1.0 + 4.0 * c * alpha).sqrt()))
}

/// Target `n·I(φ)` for the regime (asymptotically vanishing terms dropped)
/// and the radius achieving it.
pub fn solve_r(spec: &RegimeSpec) -> Result<RegimeSolution> {
    spec.validate()?;
    let RegimeSpec { n, p, alpha, j1, j2, .. } = *spec;
    let (target, aux_root, term) = match spec.regime {
        Regime::Core => (n.ln() - alpha.ln(), None, "log n − log α"),
        Regime::Side => (side_base(spec)? - 2.0 * alpha.ln(), None, "side target"),
        Regime::Corner => (4.0 * (corner_base(spec)? - alpha.ln()), None, "corner target"),
        Regime::CoreSideBoundary => {
            let gamma = gamma_solve(p, n, alpha, j1, j2)?;
            (n.ln() - 2.0 * gamma.ln(), Some(gamma), "log n − 2 log γ")
        }
        Regime::SideCornerBoundary => {
            let beta = beta_solve(n, p, alpha, j1, j2)?;
            (4.0 * (corner_base(spec)? - beta.ln()), Some(beta), "side/corner target")
        }
    };
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::DegenerateTarget { term, value: target });
    }
    Ok(RegimeSolution { r: (target / (n * p * j2)).sqrt(), n_i_target: target, aux_root })
}

/// Inverse of [`solve_r`]: the `α` whose regime target equals `n_i_target`.
pub fn alpha_from_target(spec: &RegimeSpec, n_i_target: f64) -> Result<f64> {
    spec.validate()?;
    let RegimeSpec { n, p, j1, j2, .. } = *spec;
    Ok(match spec.regime {
        Regime::Core => (n.ln() - n_i_target).exp(),
        Regime::Side => ((side_base(spec)? - n_i_target) / 2.0).exp(),
        Regime::Corner => (corner_base(spec)? - n_i_target / 4.0).exp(),
        Regime::CoreSideBoundary => {
            let gamma = ((n.ln() - n_i_target) / 2.0).exp();
            gamma * gamma + 2.0 * gamma * j2.sqrt() / j1 / (p * n.ln()).sqrt()
        }
        Regime::SideCornerBoundary => {
            let beta = (corner_base(spec)? - n_i_target / 4.0).exp();
            beta_coefficient(n, p, j1, j2) * beta * beta + beta
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    /// `p·log n`
    pub u: f64,
    /// `p·n^{1/3}·log n`
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub regime: Regime,
    pub ratios: Ratios,
    pub rationale: String,
}

/// Advisory regime for finite `(n, p)`: core iff `u ≥ 3`; corner iff
/// `u ≤ 1/3` and `v ≤ 1/3`; side iff `u ≤ 1/3` and `v ≥ 3`; the gaps are
/// the boundary regimes.
pub fn classify_regime(n: f64, p: f64) -> Classification {
    let u = p * n.ln();
    let v = u * n.cbrt();
    let (regime, rationale) = if u >= RATIO_HIGH {
        (Regime::Core, format!("u = {u:.4} ≥ 3"))
    } else if u > RATIO_LOW {
        (Regime::CoreSideBoundary, format!("1/3 < u = {u:.4} < 3"))
    } else if v >= RATIO_HIGH {
        (Regime::Side, format!("u = {u:.4} ≤ 1/3 and v = {v:.4} ≥ 3"))
    } else if v <= RATIO_LOW {
        (Regime::Corner, format!("u = {u:.4} ≤ 1/3 and v = {v:.4} ≤ 1/3"))
    } else {
        (Regime::SideCornerBoundary, format!("u = {u:.4} ≤ 1/3 and 1/3 < v = {v:.4} < 3"))
    };
    Classification { regime, ratios: Ratios { u, v }, rationale }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkPrediction {
    /// `nπr²p − log n`
    pub beta: f64,
    /// `exp(−e^{−β})`
    pub predicted_limit: f64,
    /// Set when `(n, p)` lies outside the core regime, where the boundary
    /// terms make this prediction unreliable.
    pub conjecture_flag: bool,
}

/// Gupta–Kumar prediction for a Step function with parameters `(r, p)`.
pub fn gk_predict(n: f64, p: f64, r: f64) -> GkPrediction {
    let beta = n * core::f64::consts::PI * r * r * p - n.ln();
    GkPrediction {
        beta,
        predicted_limit: (-(-beta).exp()).exp(),
        conjecture_flag: classify_regime(n, p).regime != Regime::Core,
    }
}
