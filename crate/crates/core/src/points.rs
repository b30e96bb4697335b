//! Vertex sets on the unit box: `n` uniform points, or a Poisson process of
//! intensity `λ` restricted to `[0,1]^d`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::rng::SeedSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointOrigin {
    Binomial { n: usize },
    Poisson { lambda: f64 },
    /// Supplied directly (replay files, hand-built configurations).
    Explicit,
}

/// Points of `[0,1]^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
    origin: PointOrigin,
    seed: Option<SeedSpec>,
}

fn check_dimension(d: usize) -> Result<()> {
    if (2..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension {d} not in {{2, 3}}")))
    }
}

impl PointSet {
    /// Wraps explicit coordinates; every coordinate must lie in `[0, 1]`.
    pub fn from_coords(d: usize, coords: Vec<f64>) -> Result<Self> {
        check_dimension(d)?;
        if coords.len() % d != 0 {
            return Err(Error::InvalidParameter(format!("{} coordinates do not split into {d}-vectors", coords.len())));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::InvalidParameter(format!("coordinate {c} outside [0, 1]")));
        }
        Ok(Self { d, coords, origin: PointOrigin::Explicit, seed: None })
    }

    pub fn from_points(d: usize, points: &[&[f64]]) -> Result<Self> {
        Self::from_coords(d, points.iter().flat_map(|p| p.iter().copied()).collect())
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn origin(&self) -> PointOrigin {
        self.origin
    }

    pub fn seed(&self) -> Option<SeedSpec> {
        self.seed
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.point(i), self.point(j));
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }
}

fn uniform_coords<R: Rng>(rng: &mut R, count: usize, d: usize) -> Vec<f64> {
    (0..count * d).map(|_| rng.random::<f64>()).collect()
}

/// `n` independent uniform points of `[0,1]^d`.
pub fn sample_binomial(n: usize, d: usize, seed: SeedSpec) -> Result<PointSet> {
    check_dimension(d)?;
    let mut rng = seed.rng();
    Ok(PointSet {
        d,
        coords: uniform_coords(&mut rng, n, d),
        origin: PointOrigin::Binomial { n },
        seed: Some(seed),
    })
}

/// Poisson process of intensity `lambda` on `[0,1]^d`: a Poisson(`lambda`)
/// count of independent uniform points.
pub fn sample_poisson(lambda: f64, d: usize, seed: SeedSpec) -> Result<PointSet> {
    check_dimension(d)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("intensity {lambda} must be finite and nonnegative")));
    }
    let mut rng = seed.rng();
    let count = if lambda == 0.0 {
        0
    } else {
        let dist = Poisson::new(lambda).map_err(|e| Error::InvalidParameter(format!("{e}")))?;
        let k: f64 = dist.sample(&mut rng);
        k as usize
    };
    Ok(PointSet {
        d,
        coords: uniform_coords(&mut rng, count, d),
        origin: PointOrigin::Poisson { lambda },
        seed: Some(seed),
    })
}
