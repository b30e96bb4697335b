//! Soft random geometric graphs: each pair `{x, y}` is joined independently
//! with probability `φ(x − y)`.
//!
//! The Bernoulli mark of pair `(i, j)` is drawn from a counter-based source
//! keyed by the sampling seed, so the sampled graph does not depend on the
//! order in which candidate pairs are enumerated. In particular the exact
//! all-pairs sampler and the cell-list sampler return identical graphs for
//! compactly supported `φ`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::connection::ConnectionFunction;
use crate::points::PointSet;
use crate::rng::SeedSpec;
use crate::unionfind::UnionFind;
use crate::{Error, Result};

/// Default probability floor for the cell-list sampler.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

/// Largest vertex set for which [`h_value`] enumerates exactly.
pub const H_MAX_VERTICES: usize = 12;

/// Largest vertex set for [`h_value_by_edge_subsets`] (21 potential edges).
pub const H_ENUM_MAX_VERTICES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SamplerMode {
    /// Every pair is tested.
    Exact,
    /// Only pairs within the radius where `φ ≥ tail_eps·μ(φ)` are tested.
    CellList { tail_eps: f64 },
}

impl Default for SamplerMode {
    fn default() -> Self {
        SamplerMode::CellList { tail_eps: DEFAULT_TAIL_EPS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftGraph {
    n_vertices: usize,
    edges: Vec<Edge>,
    degrees: Vec<usize>,
}

impl SoftGraph {
    /// Builds a graph from an edge list; endpoints are normalised to `i < j`
    /// and the list is sorted. Self-loops and duplicate pairs are rejected.
    pub fn from_edges(n_vertices: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list: Vec<Edge> = edges
            .into_iter()
            .map(|e| if e.i <= e.j { e } else { Edge { i: e.j, j: e.i, length: e.length } })
            .collect();
        list.sort_unstable_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        for e in &list {
            if e.i == e.j {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {}", e.i)));
            }
            if e.j >= n_vertices {
                return Err(Error::InvalidParameter(format!("vertex {} out of range ({n_vertices} vertices)", e.j)));
            }
        }
        if let Some(w) = list.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", w[0].i, w[0].j)));
        }
        Ok(Self::from_sorted(n_vertices, list))
    }

    fn from_sorted(n_vertices: usize, edges: Vec<Edge>) -> Self {
        let mut degrees = alloc::vec![0; n_vertices];
        for e in &edges {
            degrees[e.i] += 1;
            degrees[e.j] += 1;
        }
        Self { n_vertices, edges, degrees }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }
}

/// Uniform grid over `[0,1]^d` with cells at least `reach` wide, bucketing
/// point indices in CSR form.
struct CellGrid {
    d: usize,
    k: usize,
    start: Vec<usize>,
    items: Vec<usize>,
}

impl CellGrid {
    fn new(points: &PointSet, reach: f64) -> Self {
        let d = points.dimension();
        let n = points.len();
        let by_reach = if reach > 0.0 { (1.0 / reach).floor() } else { f64::INFINITY };
        // keep the number of cells proportional to the number of points
        let by_count = (2.0 * (n.max(1) as f64).powf(1.0 / d as f64)).ceil();
        let k = by_reach.min(by_count).max(1.0) as usize;
        let n_cells = k.pow(d as u32);
        let cell_of = |p: &[f64]| {
            p.iter().rev().fold(0, |acc, &c| acc * k + ((c * k as f64) as usize).min(k - 1))
        };
        let mut start = alloc::vec![0usize; n_cells + 1];
        for p in points.iter() {
            start[cell_of(p) + 1] += 1;
        }
        for c in 0..n_cells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut items = alloc::vec![0; n];
        for (i, p) in points.iter().enumerate() {
            let c = cell_of(p);
            items[fill[c]] = i;
            fill[c] += 1;
        }
        Self { d, k, start, items }
    }

    fn cell(&self, c: usize) -> &[usize] {
        &self.items[self.start[c]..self.start[c + 1]]
    }

    /// Calls `visit(i, j)` once for every pair in the same or adjacent cells.
    fn for_each_candidate<F: FnMut(usize, usize)>(&self, mut visit: F) {
        let k = self.k as isize;
        let n_cells = self.k.pow(self.d as u32);
        let n_offsets = 3usize.pow(self.d as u32);
        let mut idx = [0isize; 3];
        for c in 0..n_cells {
            let mut rest = c;
            for a in 0..self.d {
                idx[a] = (rest % self.k) as isize;
                rest /= self.k;
            }
            let here = self.cell(c);
            for (a, &i) in here.iter().enumerate() {
                for &j in &here[a + 1..] {
                    visit(i, j);
                }
            }
            'offsets: for o in 0..n_offsets {
                let mut rest = o;
                let mut other = 0isize;
                let mut stride = 1isize;
                for a in 0..self.d {
                    let shift = (rest % 3) as isize - 1;
                    rest /= 3;
                    let q = idx[a] + shift;
                    if q < 0 || q >= k {
                        continue 'offsets;
                    }
                    other += q * stride;
                    stride *= k;
                }
                let other = other as usize;
                if other <= c {
                    continue;
                }
                for &i in here {
                    for &j in self.cell(other) {
                        visit(i, j);
                    }
                }
            }
        }
    }
}

/// Calls `visit(i, j, distance)` for every pair at distance at most `reach`.
pub fn for_each_pair_within<F: FnMut(usize, usize, f64)>(points: &PointSet, reach: f64, mut visit: F) {
    let diameter = (points.dimension() as f64).sqrt();
    if reach >= diameter {
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                visit(i, j, points.distance(i, j));
            }
        }
        return;
    }
    let grid = CellGrid::new(points, reach);
    grid.for_each_candidate(|i, j| {
        let dist = points.distance(i, j);
        if dist <= reach {
            visit(i, j, dist);
        }
    });
}

/// Samples `G_φ(points)`.
pub fn sample_graph(points: &PointSet, f: &ConnectionFunction, seed: SeedSpec, mode: SamplerMode) -> Result<SoftGraph> {
    if points.dimension() != f.dimension() {
        return Err(Error::DimensionMismatch { expected: f.dimension(), found: points.dimension() });
    }
    let key = seed.pair_key();
    let n = points.len();
    let mut edges = Vec::new();
    match mode {
        SamplerMode::Exact => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let length = points.distance(i, j);
                    if key.uniform(i, j) < f.value_at(length) {
                        edges.push(Edge { i, j, length });
                    }
                }
            }
        }
        SamplerMode::CellList { tail_eps } => {
            if !(tail_eps > 0.0 && tail_eps < 1.0) {
                return Err(Error::InvalidParameter(format!("tail_eps {tail_eps} not in (0, 1)")));
            }
            let reach = cutoff_radius(f, tail_eps)?;
            for_each_pair_within(points, reach, |i, j, length| {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                if key.uniform(i, j) < f.value_at(length) {
                    edges.push(Edge { i, j, length });
                }
            });
            edges.sort_unstable_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        }
    }
    Ok(SoftGraph::from_sorted(n, edges))
}

/// Radius of the region where `φ ≥ tail_eps·μ(φ)`.
pub fn cutoff_radius(f: &ConnectionFunction, tail_eps: f64) -> Result<f64> {
    f.rho_level(tail_eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    pub i: usize,
    pub j: usize,
    pub length: f64,
    pub retained: bool,
}

/// All pairs up to a length cap, each carrying an independent Bernoulli(p)
/// retention mark. Slicing at radius `r` gives `G_{r,p}`; slices are nested
/// in `r` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledEdgeProcess {
    n_vertices: usize,
    p: f64,
    cap: f64,
    /// Sorted by `(length, i, j)`.
    pairs: Vec<CoupledPair>,
}

impl CoupledEdgeProcess {
    /// Builds a process from explicit pairs (replay); sorts them by `(length, i, j)`.
    pub fn from_pairs(n_vertices: usize, p: f64, cap: f64, pairs: Vec<CoupledPair>) -> Result<Self> {
        if let Some(pr) = pairs.iter().find(|pr| pr.i == pr.j || pr.i.max(pr.j) >= n_vertices || !(pr.length >= 0.0)) {
            return Err(Error::InvalidParameter(format!("invalid pair ({}, {}, {})", pr.i, pr.j, pr.length)));
        }
        let mut pairs: Vec<CoupledPair> = pairs
            .into_iter()
            .map(|pr| if pr.i < pr.j { pr } else { CoupledPair { i: pr.j, j: pr.i, ..pr } })
            .collect();
        sort_pairs(&mut pairs);
        Ok(Self { n_vertices, p, cap, pairs })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Pairs longer than this were not materialised.
    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn pairs(&self) -> &[CoupledPair] {
        &self.pairs
    }

    /// `G_{r,p}`: retained pairs of length at most `r`.
    pub fn slice(&self, r: f64) -> SoftGraph {
        let end = self.pairs.partition_point(|pr| pr.length <= r);
        let mut edges: Vec<Edge> = self.pairs[..end]
            .iter()
            .filter(|pr| pr.retained)
            .map(|pr| Edge { i: pr.i, j: pr.j, length: pr.length })
            .collect();
        edges.sort_unstable_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        SoftGraph::from_sorted(self.n_vertices, edges)
    }
}

fn sort_pairs(pairs: &mut [CoupledPair]) {
    pairs.sort_unstable_by(|a, b| a.length.total_cmp(&b.length).then((a.i, a.j).cmp(&(b.i, b.j))));
}

/// Coupled process for retention probability `p`, materialising pairs up to
/// `cap` (default: the box diameter `√d`).
pub fn coupled_process(points: &PointSet, p: f64, seed: SeedSpec, cap: Option<f64>) -> Result<CoupledEdgeProcess> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("retention probability {p} not in (0, 1]")));
    }
    let diameter = (points.dimension() as f64).sqrt();
    let cap = cap.unwrap_or(diameter).min(diameter);
    if !(cap >= 0.0) {
        return Err(Error::InvalidParameter(format!("length cap {cap} must be nonnegative")));
    }
    let key = seed.pair_key();
    let mut pairs = Vec::new();
    for_each_pair_within(points, cap, |i, j, length| {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        pairs.push(CoupledPair { i, j, length, retained: key.uniform(i, j) < p });
    });
    sort_pairs(&mut pairs);
    Ok(CoupledEdgeProcess { n_vertices: points.len(), p, cap, pairs })
}

/// `g_φ(y, A) = 1 − ∏_{x∈A} (1 − φ(y − x))`: probability that `y` is joined
/// to at least one point of `A`.
pub fn g_value(y: &[f64], a: &PointSet, f: &ConnectionFunction) -> f64 {
    let mut miss = 1.0;
    let mut diff = [0.0; 3];
    for x in a.iter() {
        for (k, (yc, xc)) in y.iter().zip(x).enumerate() {
            diff[k] = yc - xc;
        }
        miss *= 1.0 - f.eval(&diff[..x.len()]);
    }
    1.0 - miss
}

fn pair_probabilities(a: &PointSet, f: &ConnectionFunction) -> Vec<Vec<f64>> {
    let m = a.len();
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { 0.0 } else { f.value_at(a.distance(i, j)) }).collect())
        .collect()
}

/// `h_φ(A)`: probability that `G_φ(A)` is connected.
///
/// Uses the recursion over vertex subsets
/// `C(S) = 1 − Σ_{v ∈ T ⊊ S} C(T) ∏_{i∈T, j∈S∖T} (1 − q_ij)`,
/// with `v` the lowest vertex of `S`.
pub fn h_value(a: &PointSet, f: &ConnectionFunction) -> Result<f64> {
    let m = a.len();
    if m > H_MAX_VERTICES {
        return Err(Error::TooLarge { size: m, max: H_MAX_VERTICES });
    }
    Ok(connectivity_probability(&pair_probabilities(a, f)))
}

/// Connection probability of a random graph with independent edge
/// probabilities `q[i][j]`, by recursion over vertex subsets.
pub fn connectivity_probability(q: &[Vec<f64>]) -> f64 {
    let m = q.len();
    if m <= 1 {
        return 1.0;
    }
    let full = (1usize << m) - 1;
    // miss[i][mask] = ∏_{j ∈ mask} (1 − q_ij)
    let mut miss = alloc::vec![alloc::vec![1.0; 1 << m]; m];
    for (i, row) in miss.iter_mut().enumerate() {
        for mask in 1..=full {
            let j = mask.trailing_zeros() as usize;
            row[mask] = row[mask & (mask - 1)] * (1.0 - q[i][j]);
        }
    }
    let mut conn = alloc::vec![0.0; 1 << m];
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        if s == low {
            conn[s] = 1.0;
            continue;
        }
        let rest = s ^ low;
        let mut total = 0.0;
        // proper subsets T of s that contain the lowest vertex
        let mut sub = rest;
        loop {
            let t = sub | low;
            if t != s {
                let outside = s ^ t;
                let mut cross = 1.0;
                let mut bits = t;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    cross *= miss[i][outside];
                    bits &= bits - 1;
                }
                total += conn[t] * cross;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        conn[s] = 1.0 - total;
    }
    conn[full]
}

/// `h_φ(A)` by summing the probabilities of all connected edge subsets.
pub fn h_value_by_edge_subsets(a: &PointSet, f: &ConnectionFunction) -> Result<f64> {
    let m = a.len();
    if m > H_ENUM_MAX_VERTICES {
        return Err(Error::TooLarge { size: m, max: H_ENUM_MAX_VERTICES });
    }
    let q = pair_probabilities(a, f);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
    let mut total = 0.0;
    for subset in 0u32..(1u32 << pairs.len()) {
        let mut prob = 1.0;
        let mut uf = UnionFind::new(m);
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if subset & (1 << b) != 0 {
                prob *= q[i][j];
                uf.union(i, j);
            } else {
                prob *= 1.0 - q[i][j];
            }
        }
        if m == 0 || uf.components() == 1 {
            total += prob;
        }
    }
    Ok(total)
}
