//! Experiment configuration (a JSON file, see `docs/schema.md`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use softrgg_core::connection::ConnectionFunction;
use softrgg_core::regimes::{solve_r, Regime, RegimeSolution, RegimeSpec};
use softrgg_core::softgraph::SamplerMode;
use softrgg_core::ShapeDescriptor;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointModel {
    /// `n` uniform points.
    Binomial { n: usize },
    /// Poisson process of intensity `lambda` on the box.
    Poisson { lambda: f64 },
}

impl PointModel {
    /// `n` or `λ`.
    pub fn intensity(&self) -> f64 {
        match *self {
            PointModel::Binomial { n } => n as f64,
            PointModel::Poisson { lambda } => lambda,
        }
    }
}

/// Radial profile used with a regime solution; the solved `r` becomes
/// `ρ_η` of the resulting connection function and `p` its maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RegimeShape {
    #[default]
    Step,
    /// `exp(−β t^γ)`; requires `p = 1`.
    Rayleigh { beta: f64, gamma: f64, eta: Option<f64> },
    /// Piecewise-linear nonincreasing profile, rescaled to height `p`.
    CustomRadial { profile: Vec<(f64, f64)>, eta: Option<f64> },
}

impl RegimeShape {
    /// The profile at unit scale (`ρ = 1` for Rayleigh; knots as given).
    fn base(&self) -> Result<ConnectionFunction> {
        Ok(match self {
            RegimeShape::Step => ConnectionFunction::step(1.0, 1.0, 2)?,
            RegimeShape::Rayleigh { beta, gamma, eta } => {
                let f = ConnectionFunction::rayleigh(*beta, *gamma, 1.0, 2, 0.5)?;
                with_eta_or_grid(f, *eta)?
            }
            RegimeShape::CustomRadial { profile, eta } => {
                let f = ConnectionFunction::custom(profile, 2, 1.0)?;
                with_eta_or_grid(f, *eta)?
            }
        })
    }

    pub fn descriptor(&self) -> Result<ShapeDescriptor> {
        Ok(self.base()?.shape()?)
    }

    /// Connection function with `μ = p` and `ρ_η = r`.
    pub fn connection(&self, r: f64, p: f64) -> Result<ConnectionFunction> {
        let base = self.base()?;
        Ok(match self {
            RegimeShape::Step => ConnectionFunction::step(r, p, 2)?,
            RegimeShape::Rayleigh { beta, gamma, .. } => {
                if p != 1.0 {
                    return Err(HarnessError::Config("rayleigh regime shapes need p = 1".into()));
                }
                let scale = r / base.rho_eta();
                ConnectionFunction::rayleigh(*beta, *gamma, scale, 2, base.eta())?
            }
            RegimeShape::CustomRadial { profile, .. } => {
                let (dr, dv) = (r / base.rho_eta(), p / base.mu());
                let knots: Vec<(f64, f64)> = profile.iter().map(|&(t, v)| (t * dr, v * dv)).collect();
                ConnectionFunction::custom(&knots, 2, base.eta())?
            }
        })
    }
}

fn with_eta_or_grid(f: ConnectionFunction, eta: Option<f64>) -> Result<ConnectionFunction> {
    let eta = match eta {
        Some(e) => e,
        None => f
            .largest_grid_eta()
            .ok_or_else(|| HarnessError::Config("no η on the grid puts this profile in its class".into()))?,
    };
    Ok(f.with_eta(eta)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeModel {
    pub regime: Regime,
    pub p: f64,
    pub alpha: f64,
    #[serde(default)]
    pub shape: RegimeShape,
}

impl RegimeModel {
    /// Solves for `r` at intensity `n` and builds the connection function.
    pub fn resolve(&self, n: f64) -> Result<(ConnectionFunction, RegimeSolution)> {
        let spec = RegimeSpec::new(self.regime, n, self.p, self.alpha, &self.shape.descriptor()?);
        let sol = solve_r(&spec)?;
        Ok((self.shape.connection(sol.r, self.p)?, sol))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    Connection(ConnectionFunction),
    Regime(RegimeModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    N0Histogram,
    Connectivity,
    L2,
    Thresholds,
    SmallComponents,
}

fn default_k_max() -> usize {
    5
}

fn default_rel_tol() -> f64 {
    1e-8
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub points: PointModel,
    pub graph: GraphModel,
    pub trials: usize,
    /// Trials use streams `first_trial .. first_trial + trials`.
    #[serde(default)]
    pub first_trial: u64,
    pub master_seed: u64,
    pub statistics: BTreeSet<Statistic>,
    #[serde(default)]
    pub sampler: SamplerMode,
    /// Worker threads; `None` uses all cores. Does not affect results.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Largest component order tracked by `small_components`.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Compute the quadrature reference `I_n`.
    #[serde(default = "default_true")]
    pub reference: bool,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl ExperimentConfig {
    pub fn new(points: PointModel, graph: GraphModel, trials: usize, master_seed: u64) -> Self {
        Self {
            points,
            graph,
            trials,
            first_trial: 0,
            master_seed,
            statistics: [Statistic::N0Histogram, Statistic::Connectivity, Statistic::L2].into(),
            sampler: SamplerMode::default(),
            threads: None,
            k_max: default_k_max(),
            reference: true,
            rel_tol: default_rel_tol(),
        }
    }

    pub fn with_statistics(mut self, stats: &[Statistic]) -> Self {
        self.statistics = stats.iter().copied().collect();
        self
    }

    pub fn wants(&self, s: Statistic) -> bool {
        self.statistics.contains(&s)
    }
}
