//! Expected number of isolated vertices by boundary-aware quadrature.
//!
//! For a Poisson process of intensity `λ` on `Γ = [0,1]^d` the expected number
//! of isolated vertices is `λ ∫_Γ exp(−λ V(x)) dx` with
//! `V(x) = ∫_Γ φ(y − x) dy`; for `n` uniform points it is
//! `n ∫_Γ (1 − V(x))^{n−1} dx`. The outer integral exploits the symmetry of
//! the cube: on `[0, 1/2]^d` every coordinate is either within the tail radius
//! `L` of the nearest face ("near") or not ("far"), and `V` depends only on the
//! near coordinates. The integral splits into an interior term, face strips,
//! edges and corners, each integrated on a mesh graded towards the boundary.

pub mod geometry;
pub mod rules;

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::connection::{ConnectionFunction, ConnectionKind};
use crate::{Error, Result};
pub use geometry::{disk_rect_area, vol_ball_cube, vol_disk_box};
use rules::{graded_edges, integrate_1d, integrate_box, Quad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `λ exp(−λ V)`, for the Poisson process `P_λ`.
    Poisson,
    /// `n (1 − V)^{n−1}`, for `n` uniform points.
    Binomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub kernel: Kernel,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Base cells along each axis of a one-dimensional strip.
    pub base_cells: usize,
    /// Base cells per axis for two-dimensional edge/corner regions.
    pub base_cells_multi: usize,
    /// Base cells per axis for three-dimensional corner regions.
    pub base_cells_cube: usize,
    pub max_cells: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, base_cells: 64, base_cells_multi: 8, base_cells_cube: 2, max_cells: 1_000_000 }
    }
}

const INNER_REL_TOL: f64 = 1e-11;

/// `V(x) = ∫_Γ φ(y − x) dy`, the probability that a uniform point in `Γ`
/// connects to `x`.
///
/// Step functions use the exact disk∩square area (numerical ball∩cube slices
/// for `d = 3`). Other profiles use the layer-cake form
/// `μ ∫_0^1 |B(x; ρ_u) ∩ Γ| du` with breakpoints where `ρ_u` crosses a face
/// or corner distance of `x`.
pub fn connection_volume(x: &[f64], f: &ConnectionFunction) -> f64 {
    let d = f.dimension();
    debug_assert_eq!(x.len(), d);
    let ball = |r: f64| -> f64 {
        match d {
            2 => vol_disk_box([x[0], x[1]], r),
            3 => vol_ball_cube([x[0], x[1], x[2]], r),
            _ => unimplemented!("box volumes are provided for d = 2, 3"),
        }
    };
    if let ConnectionKind::Step { r, p } = f.kind() {
        return p * ball(*r);
    }

    let mu = f.mu();
    // distances at which |B(x; s) ∩ Γ| changes smoothness
    let mut crit: Vec<f64> = Vec::with_capacity(2 * d + (1 << d));
    for &c in x {
        crit.push(c);
        crit.push(1.0 - c);
    }
    let mut far2 = 0.0;
    for &c in x {
        let m = c.max(1.0 - c);
        far2 += m * m;
    }
    let far = far2.sqrt();
    for mask in 0..(1usize << d) {
        let s2: f64 = x
            .iter()
            .enumerate()
            .map(|(k, &c)| if mask & (1 << k) == 0 { c * c } else { (1.0 - c) * (1.0 - c) })
            .sum();
        crit.push(s2.sqrt());
    }
    let saturate = f.value_at(far) / mu;
    let mut breaks: Vec<f64> = crit.iter().map(|&s| f.value_at(s) / mu).collect();
    breaks.extend(f.breakpoints().iter().map(|&b| f.value_at(b) / mu));
    let q = integrate_1d(
        |u| ball(f.rho_level(u.max(f64::MIN_POSITIVE)).unwrap_or(0.0)),
        saturate,
        1.0,
        &breaks,
        INNER_REL_TOL,
        1e-300,
        4_000,
    );
    mu * (saturate + q.value)
}

/// `intensity · V(x)`: the expected degree of a vertex at `x`.
pub fn local_mean_measure(x: &[f64], f: &ConnectionFunction, intensity: f64) -> f64 {
    intensity * connection_volume(x, f)
}

fn kernel_value(kernel: Kernel, intensity: f64, v: f64) -> f64 {
    match kernel {
        Kernel::Poisson => intensity * (-intensity * v).exp(),
        Kernel::Binomial => {
            if v >= 1.0 {
                if intensity <= 1.0 { intensity } else { 0.0 }
            } else {
                intensity * ((intensity - 1.0) * (-v).ln_1p()).exp()
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn mesh(len: f64, cells: usize, extra: &[f64]) -> Vec<f64> {
    let mut e = graded_edges(len, cells);
    e.extend(extra.iter().copied().filter(|&b| b > 0.0 && b < len));
    e.sort_unstable_by(f64::total_cmp);
    e.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * len);
    e
}

/// Expected number of isolated vertices, `I_n(φ)` or its binomial analogue.
pub fn expected_isolated(intensity: f64, f: &ConnectionFunction, kernel: Kernel) -> Result<IntegralResult> {
    expected_isolated_with(intensity, f, kernel, &QuadratureOptions::default())
}

pub fn expected_isolated_with(
    intensity: f64,
    f: &ConnectionFunction,
    kernel: Kernel,
    opts: &QuadratureOptions,
) -> Result<IntegralResult> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("intensity {intensity} must be positive")));
    }
    let d = f.dimension();
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidParameter(alloc::format!("quadrature supports d = 2, 3 (got {d})")));
    }
    let diameter = (d as f64).sqrt();

    // Covering case: φ = μ on the whole box, so V ≡ μ.
    if f.rho_level(1.0)? >= diameter {
        let value = kernel_value(kernel, intensity, f.mu());
        return Ok(IntegralResult { value, error_estimate: 0.0, kernel, cells: 1 });
    }

    let tail = f.tail_radius();
    let near = tail.min(0.5);
    let far_len = 0.5 - near;
    let mut crit: Vec<f64> = f.breakpoints();
    crit.extend(f.breakpoints().iter().map(|b| 1.0 - b));
    if near < 0.5 {
        crit.push(near);
    }
    // Diagonal distances where the ball starts reaching a second face.
    crit.extend(f.breakpoints().iter().map(|b| b / SQRT_2));

    let integrand = |near_coords: &[f64]| {
        let mut x = [0.5; 3];
        x[..near_coords.len()].copy_from_slice(near_coords);
        kernel_value(kernel, intensity, connection_volume(&x[..d], f))
    };

    let symmetry = (1u32 << d) as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut cells = 0;
    let mut converged = true;
    for m in 0..=d {
        let weight = binomial(d, m) * far_len.powi((d - m) as i32) * symmetry;
        if weight == 0.0 {
            continue;
        }
        let q: Quad = match m {
            0 => Quad { value: integrand(&[]), error: 0.0, cells: 1, converged: true },
            1 => {
                let e = [mesh(near, opts.base_cells, &crit)];
                integrate_box::<1, _>(|p| integrand(&p), &e, opts.rel_tol, 0.0, opts.max_cells)
            }
            2 => {
                let axis = mesh(near, opts.base_cells_multi, &crit);
                let e = [axis.clone(), axis];
                integrate_box::<2, _>(|p| integrand(&p), &e, opts.rel_tol, 0.0, opts.max_cells)
            }
            _ => {
                let axis = mesh(near, opts.base_cells_cube, &crit);
                let e = [axis.clone(), axis.clone(), axis];
                integrate_box::<3, _>(|p| integrand(&p), &e, opts.rel_tol, 0.0, opts.max_cells)
            }
        };
        value += weight * q.value;
        error += weight * q.error;
        cells += q.cells;
        converged &= q.converged;
    }
    if !converged {
        return Err(Error::ToleranceNotReached { value, error_estimate: error, cells });
    }
    Ok(IntegralResult { value, error_estimate: error, kernel, cells })
}

/// Asymptotic interior / side / corner split of `E N_0` in `d = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDecomposition {
    pub interior: f64,
    pub side: f64,
    pub corner: f64,
    pub a_n: f64,
    pub n: f64,
    #[serde(rename = "nI")]
    pub n_i: f64,
    pub p: f64,
    #[serde(rename = "J1")]
    pub j1: f64,
}

impl BoundaryDecomposition {
    pub fn total(&self) -> f64 {
        self.interior + self.side + self.corner
    }
}

/// Interior, side and corner contributions from the shape descriptor alone:
/// `n e^{−nI}`, `(2/J1) (n/(a_n p))^{1/2} e^{−nI/2}` and
/// `4 e^{−nI/4} / (a_n p J1²)` with `a_n = n ρ_η² μ`.
pub fn boundary_decomposition(n: f64, f: &ConnectionFunction) -> Result<BoundaryDecomposition> {
    if f.dimension() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: f.dimension() });
    }
    let shape = f.shape()?;
    decomposition_from_parts(n, shape.mu, shape.rho_eta, shape.integral, shape.j1)
}

pub fn decomposition_from_parts(n: f64, p: f64, r: f64, integral: f64, j1: f64) -> Result<BoundaryDecomposition> {
    let a_n = n * r * r * p;
    if !(a_n > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("a_n = {a_n} must be positive")));
    }
    let n_i = n * integral;
    Ok(BoundaryDecomposition {
        interior: n * (-n_i).exp(),
        side: 2.0 / j1 * (n / (a_n * p)).sqrt() * (-n_i / 2.0).exp(),
        corner: 4.0 * (-n_i / 4.0).exp() / (a_n * p * j1 * j1),
        a_n,
        n,
        n_i,
        p,
        j1,
    })
}
