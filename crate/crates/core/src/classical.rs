//! Classical Lissajous orbits and Ehrenfest centroids of Glauber products.
//!
//! With `w = 1` the oscillator frequencies are `w_x = q`, `w_y = p` and every
//! orbit closes after `T = 2 pi`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{gcd, GlauberProduct, LcsState};

/// `x(t) = a_x cos(q t + delta_x)`, `y(t) = a_y cos(p t + delta_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LissajousParams {
    pub a_x: f64,
    pub a_y: f64,
    pub p: usize,
    pub q: usize,
    pub delta_x: f64,
    pub delta_y: f64,
}

impl LissajousParams {
    pub fn position(&self, t: f64) -> (f64, f64) {
        (
            self.a_x * (self.q as f64 * t + self.delta_x).cos(),
            self.a_y * (self.p as f64 * t + self.delta_y).cos(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrajectory {
    times: Vec<f64>,
    samples: Vec<(f64, f64)>,
    period: f64,
    params: LissajousParams,
}

impl ClassicalTrajectory {
    fn sample(params: LissajousParams, n_samples: usize) -> Result<Self> {
        if params.p == 0 || params.q == 0 || gcd(params.p, params.q) != 1 {
            return Err(Error::invalid(format!(
                "Lissajous frequencies p={}, q={} must be positive and coprime",
                params.p, params.q
            )));
        }
        let min = 16 * params.p.max(params.q);
        if n_samples < min {
            return Err(Error::invalid(format!("need at least {min} samples per period, got {n_samples}")));
        }
        let period = 2.0 * PI;
        let times: Vec<f64> = (0..=n_samples).map(|k| period * k as f64 / n_samples as f64).collect();
        let samples = times.iter().map(|&t| params.position(t)).collect();
        Ok(Self {
            times,
            samples,
            period,
            params,
        })
    }

    /// `n_samples + 1` points; the last repeats the first.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn params(&self) -> LissajousParams {
        self.params
    }
}

/// `x = a_x cos(q t + delta)`, `y = a_y cos(p t)` over one period.
pub fn lissajous(a_x: f64, a_y: f64, p: usize, q: usize, delta: f64, n_samples: usize) -> Result<ClassicalTrajectory> {
    ClassicalTrajectory::sample(
        LissajousParams {
            a_x,
            a_y,
            p,
            q,
            delta_x: delta,
            delta_y: 0.0,
        },
        n_samples,
    )
}

/// Expectation values `<x>(t) = sqrt(2/q) |alpha| cos(q t - theta_alpha)` and
/// `<y>(t) = sqrt(2/p) |beta| cos(p t - theta_beta)` of the evolving product.
pub fn ehrenfest_centroid(g: GlauberProduct, p: usize, q: usize, n_samples: usize) -> Result<ClassicalTrajectory> {
    let (ra, ta) = g.alpha.to_polar();
    let (rb, tb) = g.beta.to_polar();
    ClassicalTrajectory::sample(
        LissajousParams {
            a_x: 2f64.sqrt() * ra / (q as f64).sqrt(),
            a_y: 2f64.sqrt() * rb / (p as f64).sqrt(),
            p,
            q,
            delta_x: -ta,
            delta_y: -tb,
        },
        n_samples,
    )
}

/// Classical orbit whose per-axis energy matches the state:
/// `a_x = sqrt(2<n_x> + 1)/sqrt(q)`, `a_y = sqrt(2<n_y> + 1)/sqrt(p)`, relative
/// phase `delta = -theta/p` (the orbit of a Glauber product with
/// `theta_beta = 0`, `theta_alpha = theta/p`).
pub fn energy_matched(state: &LcsState, n_samples: usize) -> Result<ClassicalTrajectory> {
    let sub = state.subspace();
    let (nx, ny) = state.mean_occupations();
    lissajous(
        (2.0 * nx + 1.0).sqrt() / (sub.q() as f64).sqrt(),
        (2.0 * ny + 1.0).sqrt() / (sub.p() as f64).sqrt(),
        sub.p(),
        sub.q(),
        -state.zeta().phase() / sub.p() as f64,
        n_samples,
    )
}
