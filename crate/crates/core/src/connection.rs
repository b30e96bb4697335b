//! Connection functions: radial edge-probability profiles, their scale and
//! shape descriptors, and membership tests for the exponential-decay classes.
//!
//! A connection function `φ` assigns to a displacement `x ∈ R^d` the
//! probability that two points at that displacement are joined. All built-in
//! kinds are radial and nonincreasing in `|x|`.
//!
//! Descriptors:
//! - `μ(φ)`: maximum value,
//! - `ρ_η(φ)`: first radius where `φ` drops strictly below `η·μ(φ)`,
//! - `ρ_0(φ)`: support radius (possibly infinite),
//! - `I(φ)`: integral over `R^d`,
//! - `J1`, `J2`: line and plane integrals of the profile at unit scale.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::quadrature::rules::integrate_1d;
use crate::{Error, Result};

/// Relative level below which the profile is treated as negligible.
pub const TAIL_LEVEL: f64 = 1e-14;

const RADIAL_REL_TOL: f64 = 1e-13;
const RADIAL_MAX_INTERVALS: usize = 20_000;

/// Piecewise-linear radial profile given as `(radius, value)` knots.
///
/// The first knot must sit at radius 0 and radii must increase strictly. The
/// profile is zero beyond the last knot. A raw table is not required to be
/// monotone; [`ConnectionKind::CustomRadial`] additionally requires it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct RadialTable {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialTable {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidProfile("empty table".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::InvalidProfile("first knot must be at radius 0".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) || !w[1].0.is_finite() {
                return Err(Error::InvalidProfile(format!("radii must increase strictly (at {})", w[1].0)));
            }
        }
        if let Some(&(r, v)) = knots.iter().find(|(_, v)| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidProfile(format!("value {v} at radius {r} is not a probability")));
        }
        Ok(Self {
            radii: knots.iter().map(|k| k.0).collect(),
            values: knots.iter().map(|k| k.1).collect(),
        })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radii.iter().copied().zip(self.values.iter().copied())
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn value(&self, t: f64) -> f64 {
        let last = self.radii.len() - 1;
        if t > self.radii[last] {
            return 0.0;
        }
        // index of the segment containing t
        let k = self.radii.partition_point(|&r| r <= t);
        if k == 0 {
            return self.values[0];
        }
        let i = k - 1;
        if i == last {
            return self.values[last];
        }
        let (r0, r1) = (self.radii[i], self.radii[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        v0 + (v1 - v0) * (t - r0) / (r1 - r0)
    }

    fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `inf {t : φ(t) < c}`.
    fn first_below(&self, c: f64) -> f64 {
        for i in 0..self.radii.len() {
            let v0 = self.values[i];
            if v0 < c {
                return self.radii[i];
            }
            if let Some(&v1) = self.values.get(i + 1) {
                if v1 < c {
                    let (r0, r1) = (self.radii[i], self.radii[i + 1]);
                    return r0 + (v0 - c) / (v0 - v1) * (r1 - r0);
                }
            }
        }
        *self.radii.last().unwrap()
    }

    fn support(&self) -> f64 {
        let n = self.values.len();
        if self.values[n - 1] > 0.0 {
            return self.radii[n - 1];
        }
        match self.values.iter().rposition(|&v| v > 0.0) {
            Some(i) => self.radii[i + 1],
            None => 0.0,
        }
    }
}

impl TryFrom<Vec<(f64, f64)>> for RadialTable {
    type Error = Error;
    fn try_from(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(&knots)
    }
}

impl From<RadialTable> for Vec<(f64, f64)> {
    fn from(t: RadialTable) -> Self {
        t.knots().collect()
    }
}

/// The family a connection function belongs to, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ConnectionKind {
    /// `p·1{|x| ≤ r}`.
    Step { r: f64, p: f64 },
    /// `exp(−β (|x|/ρ)^γ)`.
    Rayleigh { beta: f64, gamma: f64, rho: f64 },
    /// Piecewise-linear nonincreasing profile.
    CustomRadial { profile: RadialTable },
}

/// A radial connection function on `R^d` together with its level parameter `η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConnection", into = "RawConnection")]
pub struct ConnectionFunction {
    kind: ConnectionKind,
    d: usize,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawConnection {
    #[serde(flatten)]
    kind: ConnectionKind,
    d: usize,
    eta: f64,
}

impl TryFrom<RawConnection> for ConnectionFunction {
    type Error = Error;
    fn try_from(raw: RawConnection) -> Result<Self> {
        Self::new(raw.kind, raw.d, raw.eta)
    }
}

impl From<ConnectionFunction> for RawConnection {
    fn from(f: ConnectionFunction) -> Self {
        RawConnection { kind: f.kind, d: f.d, eta: f.eta }
    }
}

/// Scale and shape descriptors of a connection function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    pub mu: f64,
    pub rho_eta: f64,
    /// `None` when the support is unbounded.
    pub rho_zero: Option<f64>,
    #[serde(rename = "I")]
    pub integral: f64,
    #[serde(rename = "J1")]
    pub j1: f64,
    #[serde(rename = "J2")]
    pub j2: f64,
}

/// Surface area of the unit sphere in `R^d`, for `d ∈ {1, 2, 3}`.
pub(crate) fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let h = d as f64 / 2.0;
            2.0 * PI.powf(h) / libm::tgamma(h)
        }
    }
}

impl ConnectionFunction {
    pub fn new(kind: ConnectionKind, d: usize, eta: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta {eta} not in (0, 1]")));
        }
        match &kind {
            ConnectionKind::Step { r, p } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidParameter(format!("step radius {r} must be positive")));
                }
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(Error::InvalidParameter(format!("step probability {p} not in (0, 1]")));
                }
            }
            ConnectionKind::Rayleigh { beta, gamma, rho } => {
                for (name, v) in [("beta", beta), ("gamma", gamma), ("rho", rho)] {
                    if !(*v > 0.0 && v.is_finite()) {
                        return Err(Error::InvalidParameter(format!("rayleigh {name} = {v} must be positive")));
                    }
                }
            }
            ConnectionKind::CustomRadial { profile } => {
                if !profile.is_nonincreasing() {
                    return Err(Error::InvalidProfile("custom profile must be nonincreasing in radius".into()));
                }
                if profile.max_value() <= 0.0 {
                    return Err(Error::DegenerateProfile);
                }
            }
        }
        Ok(Self { kind, d, eta })
    }

    pub fn step(r: f64, p: f64, d: usize) -> Result<Self> {
        Self::new(ConnectionKind::Step { r, p }, d, 1.0)
    }

    pub fn rayleigh(beta: f64, gamma: f64, rho: f64, d: usize, eta: f64) -> Result<Self> {
        Self::new(ConnectionKind::Rayleigh { beta, gamma, rho }, d, eta)
    }

    pub fn custom(knots: &[(f64, f64)], d: usize, eta: f64) -> Result<Self> {
        Self::new(ConnectionKind::CustomRadial { profile: RadialTable::new(knots)? }, d, eta)
    }

    /// Same profile with a different level parameter.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.kind.clone(), self.d, eta)
    }

    pub fn kind(&self) -> &ConnectionKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Retention probability of a step function.
    pub fn step_probability(&self) -> Option<f64> {
        match self.kind {
            ConnectionKind::Step { p, .. } => Some(p),
            _ => None,
        }
    }

    /// `φ` as a function of the distance `|x|`.
    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        match &self.kind {
            ConnectionKind::Step { r, p } => {
                if t <= *r {
                    *p
                } else {
                    0.0
                }
            }
            ConnectionKind::Rayleigh { beta, gamma, rho } => (-beta * (t / rho).powf(*gamma)).exp(),
            ConnectionKind::CustomRadial { profile } => profile.value(t),
        }
    }

    /// `φ(x)` for a displacement `x`.
    pub fn eval(&self, displacement: &[f64]) -> f64 {
        let t = displacement.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.value_at(t)
    }

    pub fn mu(&self) -> f64 {
        match &self.kind {
            ConnectionKind::Step { p, .. } => *p,
            ConnectionKind::Rayleigh { .. } => 1.0,
            ConnectionKind::CustomRadial { profile } => profile.values[0],
        }
    }

    /// `ρ_level(φ) = inf {|x| : φ(x) < level·μ(φ)}`.
    pub fn rho_level(&self, level: f64) -> Result<f64> {
        if !(level > 0.0 && level <= 1.0) {
            return Err(Error::InvalidParameter(format!("level {level} not in (0, 1]")));
        }
        Ok(match &self.kind {
            ConnectionKind::Step { r, .. } => *r,
            ConnectionKind::Rayleigh { beta, gamma, rho } => rho * ((1.0 / level).ln() / beta).powf(1.0 / gamma),
            ConnectionKind::CustomRadial { profile } => profile.first_below(level * self.mu()),
        })
    }

    pub fn rho_eta(&self) -> f64 {
        self.rho_level(self.eta).expect("eta validated at construction")
    }

    /// Support radius, `None` when unbounded.
    pub fn rho_zero(&self) -> Option<f64> {
        match &self.kind {
            ConnectionKind::Step { r, .. } => Some(*r),
            ConnectionKind::Rayleigh { .. } => None,
            ConnectionKind::CustomRadial { profile } => Some(profile.support()),
        }
    }

    /// Radius beyond which `φ < TAIL_LEVEL·μ` (the support radius when bounded).
    pub fn tail_radius(&self) -> f64 {
        match self.rho_zero() {
            Some(r) => r,
            None => self.rho_level(TAIL_LEVEL).expect("valid level"),
        }
    }

    /// Radii where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ConnectionKind::Step { r, .. } => alloc::vec![*r],
            ConnectionKind::Rayleigh { .. } => Vec::new(),
            ConnectionKind::CustomRadial { profile } => profile.radii.clone(),
        }
    }

    /// `I(φ) = ∫_{R^d} φ(x) dx` by radial quadrature.
    pub fn integral(&self) -> f64 {
        let tail = self.tail_radius();
        let d = self.d as i32;
        let q = integrate_1d(
            |t| self.value_at(t) * t.powi(d - 1),
            0.0,
            tail,
            &self.breakpoints(),
            RADIAL_REL_TOL,
            0.0,
            RADIAL_MAX_INTERVALS,
        );
        sphere_area(self.d) * q.value
    }

    /// Full descriptor: `μ`, `ρ_η`, `ρ_0`, `I`, `J1`, `J2`.
    ///
    /// `J1` and `J2` are integrated in the unit-scale variable `t = |x|/ρ_η`.
    pub fn shape(&self) -> Result<ShapeDescriptor> {
        let mu = self.mu();
        if mu <= 0.0 {
            return Err(Error::DegenerateProfile);
        }
        let rho = self.rho_eta();
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rho_eta = {rho} at eta = {}; shape integrals need a positive finite scale",
                self.eta
            )));
        }
        let upper = self.tail_radius() / rho;
        let breaks: Vec<f64> = self.breakpoints().iter().map(|b| b / rho).collect();
        let j1 = integrate_1d(|t| self.value_at(rho * t), 0.0, upper, &breaks, RADIAL_REL_TOL, 0.0, RADIAL_MAX_INTERVALS);
        let j2 = integrate_1d(
            |t| self.value_at(rho * t) * 2.0 * PI * t,
            0.0,
            upper,
            &breaks,
            RADIAL_REL_TOL,
            0.0,
            RADIAL_MAX_INTERVALS,
        );
        Ok(ShapeDescriptor {
            mu,
            rho_eta: rho,
            rho_zero: self.rho_zero(),
            integral: self.integral(),
            j1: j1.value / mu,
            j2: j2.value / mu,
        })
    }

    /// Largest `η` in `{1, 1/2, 1/4, ..., 2^-12}` for which this profile lies in `Φ_{d,η}`.
    pub fn largest_grid_eta(&self) -> Option<f64> {
        (0..=12).map(|k| 0.5f64.powi(k)).find(|&eta| validate_class(self, eta).in_phi)
    }
}

/// A radial profile that can be checked against the connection-function classes.
pub trait RadialProfile {
    fn value_at(&self, t: f64) -> f64;
    fn mu(&self) -> f64;
    /// `inf {t : φ(t) < c}` for `c > 0`.
    fn first_below(&self, c: f64) -> f64;
    fn support(&self) -> Option<f64>;
    fn tail_radius(&self) -> f64;
    fn breakpoints(&self) -> Vec<f64>;
    fn is_nonincreasing(&self) -> bool;
}

impl RadialProfile for ConnectionFunction {
    fn value_at(&self, t: f64) -> f64 {
        ConnectionFunction::value_at(self, t)
    }
    fn mu(&self) -> f64 {
        ConnectionFunction::mu(self)
    }
    fn first_below(&self, c: f64) -> f64 {
        self.rho_level((c / self.mu()).min(1.0)).unwrap_or(0.0)
    }
    fn support(&self) -> Option<f64> {
        self.rho_zero()
    }
    fn tail_radius(&self) -> f64 {
        ConnectionFunction::tail_radius(self)
    }
    fn breakpoints(&self) -> Vec<f64> {
        ConnectionFunction::breakpoints(self)
    }
    fn is_nonincreasing(&self) -> bool {
        true
    }
}

impl RadialProfile for RadialTable {
    fn value_at(&self, t: f64) -> f64 {
        self.value(t)
    }
    fn mu(&self) -> f64 {
        self.max_value()
    }
    fn first_below(&self, c: f64) -> f64 {
        RadialTable::first_below(self, c)
    }
    fn support(&self) -> Option<f64> {
        Some(RadialTable::support(self))
    }
    fn tail_radius(&self) -> f64 {
        RadialTable::support(self)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.radii.clone()
    }
    fn is_nonincreasing(&self) -> bool {
        RadialTable::is_nonincreasing(self)
    }
}

/// First radius at which a class condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub radius: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub eta: f64,
    pub rho_eta: f64,
    pub in_psi: bool,
    pub in_phi: bool,
    pub in_phi0: bool,
    pub witness: Option<Witness>,
}

/// Checks membership of a radial profile in `Ψ_d`, `Φ_{d,η}` and `Φ⁰_{d,η}`.
///
/// The envelope `φ(t) ≤ 3η⁻¹ μ exp(−η (t/ρ_η)^η)` is checked on a geometric
/// radius grid (plus the profile's breakpoints and their neighbours) from
/// `10⁻⁶ ρ_η` out to the tail radius.
pub fn validate_class<P: RadialProfile + ?Sized>(profile: &P, eta: f64) -> ClassReport {
    let mu = profile.mu();
    let mut report = ClassReport {
        eta,
        rho_eta: 0.0,
        in_psi: profile.is_nonincreasing(),
        in_phi: false,
        in_phi0: false,
        witness: None,
    };
    if !(eta > 0.0 && eta <= 1.0) || mu <= 0.0 {
        return report;
    }
    let rho = profile.first_below(eta * mu);
    report.rho_eta = rho;
    if !(rho > 0.0 && rho.is_finite()) {
        return report;
    }

    let envelope = |t: f64| 3.0 / eta * mu * (-eta * (t / rho).powf(eta)).exp();
    let tail = profile.tail_radius().max(rho);
    let mut radii: Vec<f64> = Vec::new();
    radii.push(0.0);
    let mut t = 1e-6 * rho;
    while t <= tail {
        radii.push(t);
        t *= 1.0 + 1.0 / 64.0;
    }
    radii.push(tail);
    radii.push(rho);
    for b in profile.breakpoints() {
        radii.extend([b, b * (1.0 - 1e-12), b * (1.0 + 1e-12)]);
    }
    radii.retain(|&r| r >= 0.0 && r <= tail);
    radii.sort_unstable_by(f64::total_cmp);
    radii.dedup();

    let violation = radii.iter().find_map(|&r| {
        let (v, b) = (profile.value_at(r), envelope(r));
        (v > b * (1.0 + 1e-12)).then_some(Witness { radius: r, value: v, bound: b })
    });
    report.in_phi = violation.is_none();
    report.witness = violation;
    if report.in_phi {
        match profile.support() {
            Some(r0) if r0 <= rho / eta * (1.0 + 1e-12) => report.in_phi0 = true,
            Some(r0) => {
                report.witness = Some(Witness { radius: r0, value: profile.value_at(r0), bound: rho / eta });
            }
            None => {}
        }
    }
    report
}

/// `K(η) = ∫_{R^d} 3η⁻¹ exp(−η|x|^η) dx`, by quadrature in `s = |x|^η`.
pub fn k_eta(eta: f64, d: usize) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("eta {eta} not in (0, 1]")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension 0".into()));
    }
    // ∫_0^∞ t^{d-1} e^{-η t^η} dt = η⁻¹ ∫_0^∞ s^{d/η - 1} e^{-η s} ds
    let power = d as f64 / eta - 1.0;
    let integrand = |s: f64| if s == 0.0 { if power == 0.0 { 1.0 } else { 0.0 } } else { (power * s.ln() - eta * s).exp() };
    let mode = power / eta;
    let peak = integrand(mode.max(0.0));
    let mut upper = mode.max(1.0) * 2.0;
    while integrand(upper) > 1e-18 * peak {
        upper *= 1.5;
    }
    let q = integrate_1d(integrand, 0.0, upper, &[mode], 1e-14, 0.0, 10_000);
    Ok(3.0 / eta * sphere_area(d) * q.value / eta)
}
