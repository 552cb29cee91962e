//! Gauss–Legendre and Gauss–Laguerre rules by Newton iteration on the
//! three-term recurrences.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

const MAX_NEWTON: usize = 100;

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("Gauss-Legendre rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..MAX_NEWTON {
            let (p, d) = legendre_with_deriv(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_deriv(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_deriv(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Laguerre rule for `∫_0^∞ e^{-u} f(u) du`, exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_laguerre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("Gauss-Laguerre rule needs at least one node"));
    }
    let nf = n as f64;
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z = 0.0_f64;
    for i in 0..n {
        // Starting guesses for the i-th root (Stroud & Secrest).
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
            }
        };
        let mut deriv = 0.0;
        let mut lower = 0.0;
        for _ in 0..MAX_NEWTON {
            let (p, d, pm1) = laguerre_eval(n, z);
            deriv = d;
            lower = pm1;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 3e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d, pm1) = laguerre_eval(n, z);
        if d.is_finite() && d != 0.0 {
            deriv = d;
            lower = pm1;
        }
        nodes.push(z);
        weights.push(-1.0 / (deriv * nf * lower));
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Returns `(L_n(z), L_n'(z), L_{n-1}(z))`.
fn laguerre_eval(n: usize, z: f64) -> (f64, f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
    }
    let nf = n as f64;
    let d = (nf * p1 - nf * p2) / z;
    (p1, d, p2)
}

/// Nodes `2 pi k / m`, `k = 0..m`, of the uniform trapezoid rule on a period.
pub fn periodic_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect()
}
