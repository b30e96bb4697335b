//! Component statistics of sampled graphs and the isolation/connectivity
//! thresholds of a coupled edge process.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::points::PointSet;
use crate::rng::SeedSpec;
use crate::softgraph::{coupled_process, CoupledEdgeProcess, SoftGraph};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    /// Isolated vertices.
    pub n0: usize,
    /// Largest component order.
    pub l1: usize,
    /// Second-largest component order, 0 when connected.
    pub l2: usize,
    pub n_components: usize,
    pub connected: bool,
    pub min_degree: usize,
    /// Number of components of each order.
    pub t_k: BTreeMap<usize, usize>,
}

fn components_of(g: &SoftGraph) -> UnionFind {
    let mut uf = UnionFind::new(g.n_vertices());
    for e in g.edges() {
        uf.union(e.i, e.j);
    }
    uf
}

pub fn component_summary(g: &SoftGraph) -> ComponentSummary {
    let mut sizes = components_of(g).component_sizes();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut t_k = BTreeMap::new();
    for &s in &sizes {
        *t_k.entry(s).or_insert(0) += 1;
    }
    ComponentSummary {
        n0: t_k.get(&1).copied().unwrap_or(0),
        l1: sizes.first().copied().unwrap_or(0),
        l2: sizes.get(1).copied().unwrap_or(0),
        n_components: sizes.len(),
        connected: sizes.len() <= 1,
        min_degree: g.degrees().iter().copied().min().unwrap_or(0),
        t_k,
    }
}

/// `T_k` for `1 ≤ k ≤ k_max`; orders with no component are omitted.
pub fn small_component_counts(g: &SoftGraph, k_max: usize) -> Result<BTreeMap<usize, usize>> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let mut counts = BTreeMap::new();
    for s in components_of(g).component_sizes() {
        if s <= k_max {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// `σ`: smallest radius without isolated vertices; `τ`: smallest radius at
/// which the retained graph is connected. `f64::INFINITY` when the property
/// is never reached among the materialised pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    pub sigma: f64,
    pub tau: f64,
    pub equal: bool,
}

impl ThresholdPair {
    fn new(sigma: f64, tau: f64) -> Self {
        Self { sigma, tau, equal: sigma == tau }
    }
}

fn check_vertices(cp: &CoupledEdgeProcess) -> Result<()> {
    if cp.n_vertices() < 2 {
        return Err(Error::InvalidParameter(format!(
            "thresholds need at least 2 vertices, got {}",
            cp.n_vertices()
        )));
    }
    Ok(())
}

/// Thresholds by one pass over the retained pairs in `(length, i, j)` order.
pub fn thresholds(cp: &CoupledEdgeProcess) -> Result<ThresholdPair> {
    check_vertices(cp)?;
    let n = cp.n_vertices();
    let mut nearest = alloc::vec![f64::INFINITY; n];
    let mut uf = UnionFind::new(n);
    let mut tau = f64::INFINITY;
    for pr in cp.pairs().iter().filter(|pr| pr.retained) {
        nearest[pr.i] = nearest[pr.i].min(pr.length);
        nearest[pr.j] = nearest[pr.j].min(pr.length);
        if uf.union(pr.i, pr.j) && uf.components() == 1 {
            tau = pr.length;
            break;
        }
    }
    // every vertex has a retained edge of length ≤ τ once connected
    let sigma = nearest.iter().copied().fold(0.0, f64::max);
    Ok(ThresholdPair::new(sigma, tau))
}

/// Thresholds by bisection over slice radii. Slower than [`thresholds`];
/// kept as an independent check.
pub fn thresholds_by_bisection(cp: &CoupledEdgeProcess) -> Result<ThresholdPair> {
    check_vertices(cp)?;
    let lengths: Vec<f64> = cp.pairs().iter().map(|pr| pr.length).collect();
    let first_true = |pred: &dyn Fn(&ComponentSummary) -> bool| -> f64 {
        // smallest index k such that slicing at lengths[k] satisfies pred
        let (mut lo, mut hi) = (0usize, lengths.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(&component_summary(&cp.slice(lengths[mid]))) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lengths.get(lo).copied().unwrap_or(f64::INFINITY)
    };
    let sigma = first_true(&|s| s.n0 == 0);
    let tau = first_true(&|s| s.connected);
    Ok(ThresholdPair::new(sigma, tau))
}

/// Thresholds of the coupled process on `points` without materialising all
/// pairs: starts from a length cap around the expected connectivity scale
/// and doubles it until the capped process is connected (or the cap reaches
/// the box diameter). Marks do not depend on the cap, so the result equals
/// `thresholds` of the uncapped process.
pub fn thresholds_for_points(points: &PointSet, p: f64, seed: SeedSpec, initial_cap: Option<f64>) -> Result<ThresholdPair> {
    let d = points.dimension();
    let n = points.len() as f64;
    let diameter = (d as f64).sqrt();
    let ball = if d == 2 { core::f64::consts::PI } else { 4.0 * core::f64::consts::PI / 3.0 };
    let mut cap = initial_cap.unwrap_or_else(|| (2.0 * n.max(2.0).ln() / (n * p * ball)).powf(1.0 / d as f64));
    if !(cap > 0.0) {
        return Err(Error::InvalidParameter(format!("initial cap {cap} must be positive")));
    }
    loop {
        cap = cap.min(diameter);
        let t = thresholds(&coupled_process(points, p, seed, Some(cap))?)?;
        if t.tau.is_finite() || cap >= diameter {
            return Ok(t);
        }
        cap *= 2.0;
    }
}
