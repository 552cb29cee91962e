//! Normalized harmonic-oscillator eigenfunctions and log-factorials.
//!
//! All eigenfunctions are produced by the three-term recurrence on the
//! *normalized* functions
//!
//! ```text
//! psi_{n+1}(u) = sqrt(2/(n+1)) u psi_n(u) - sqrt(n/(n+1)) psi_{n-1}(u)
//! ```
//!
//! seeded with `psi_0(u) = pi^{-1/4} exp(-u^2/2)`. Hermite polynomials are
//! never formed, so orders in the hundreds stay finite. The Gaussian factor
//! is carried as a separate log-scale during the recurrence, which keeps the
//! mantissa away from underflow far outside the classically allowed region.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest eigenfunction order accepted by the public evaluators.
pub const MAX_ORDER: usize = 512;

/// Largest argument of the shared ln-factorial table.
pub const MAX_FACTORIAL: usize = 1024;

const RESCALE_ABOVE: f64 = 1e150;

/// Inverse oscillator length `sqrt(m w / hbar)` along one axis.
///
/// In natural units this is `sqrt(q)` for x (frequency `q w`) and `sqrt(p)`
/// for y (frequency `p w`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorScale(f64);

impl OscillatorScale {
    pub fn new(length_scale_inv: f64) -> Result<Self> {
        if length_scale_inv.is_finite() && length_scale_inv > 0.0 {
            Ok(Self(length_scale_inv))
        } else {
            Err(Error::invalid(format!(
                "oscillator scale must be positive and finite, got {length_scale_inv}"
            )))
        }
    }

    /// Scale for an oscillator of frequency `multiplier * w` with `m = w = hbar = 1`.
    pub fn for_frequency(multiplier: usize) -> Result<Self> {
        Self::new((multiplier as f64).sqrt())
    }

    pub fn unit() -> Self {
        Self(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Table of `ln(n!)` for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct LogFactorialTable {
    values: Vec<f64>,
}

impl LogFactorialTable {
    pub fn new(n_max: usize) -> Self {
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(0.0);
        let mut acc = 0.0_f64;
        for n in 1..=n_max {
            acc += (n as f64).ln();
            values.push(acc);
        }
        Self { values }
    }

    /// The process-wide table up to [`MAX_FACTORIAL`].
    pub fn shared() -> &'static LogFactorialTable {
        static TABLE: OnceLock<LogFactorialTable> = OnceLock::new();
        TABLE.get_or_init(|| LogFactorialTable::new(MAX_FACTORIAL))
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn ln_factorial(&self, n: usize) -> Result<f64> {
        self.values.get(n).copied().ok_or(Error::Capacity {
            what: "factorial argument",
            requested: n,
            limit: self.n_max(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `ln[(qn)! / ((pk)! (qn_minus_qk)!)]`.
///
/// The two lower arguments need not sum to the upper one; for `p != q` the
/// ratio is not a binomial coefficient.
pub fn log_binomial_ratio(qn: usize, pk: usize, qn_minus_qk: usize) -> Result<f64> {
    let table = LogFactorialTable::shared();
    Ok(table.ln_factorial(qn)? - table.ln_factorial(pk)? - table.ln_factorial(qn_minus_qk)?)
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::Capacity {
            what: "eigenfunction order",
            requested: n,
            limit: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Runs the normalized recurrence up to order `n_max` and hands each
/// `(order, mantissa, log_scale)` to `sink`; the value is `mantissa * exp(log_scale)`.
fn recurrence(n_max: usize, u: f64, mut sink: impl FnMut(usize, f64, f64)) {
    let mut log_scale = -0.5 * u * u - 0.25 * PI.ln();
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    sink(0, cur, log_scale);
    for n in 0..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * u * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
        sink(n + 1, cur, log_scale);
    }
}

#[inline]
fn rescale(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        0.0
    } else {
        let s = mantissa.signum();
        s * (mantissa.abs().ln() + log_scale).exp()
    }
}

/// Normalized eigenfunction `psi_n(u)` at unit scale.
pub fn hermite_fn(n: usize, u: f64) -> Result<f64> {
    check_order(n)?;
    let mut out = 0.0;
    recurrence(n, u, |k, m, s| {
        if k == n {
            out = rescale(m, s);
        }
    });
    Ok(out)
}

/// `d psi_n / du = sqrt(2n) psi_{n-1}(u) - u psi_n(u)` at unit scale.
pub fn hermite_fn_deriv(n: usize, u: f64) -> Result<f64> {
    check_order(n)?;
    let mut values = vec![0.0; n + 1];
    fill_table(u, &mut values);
    let lower = if n == 0 { 0.0 } else { values[n - 1] };
    Ok((2.0 * n as f64).sqrt() * lower - u * values[n])
}

fn fill_table(u: f64, out: &mut [f64]) {
    let n_max = out.len() - 1;
    recurrence(n_max, u, |k, m, s| out[k] = rescale(m, s));
}

/// `psi_0(u) ..= psi_{n_max}(u)` at unit scale.
pub fn hermite_fns(n_max: usize, u: f64) -> Result<Vec<f64>> {
    check_order(n_max)?;
    let mut out = vec![0.0; n_max + 1];
    fill_table(u, &mut out);
    Ok(out)
}

/// Values and first derivatives of `psi_0 ..= psi_{n_max}` at physical
/// coordinate `coord` for the given scale, including the `sqrt(s)` prefactor
/// and the chain-rule factor `s` on derivatives.
pub fn scaled_eigenfunctions_with_deriv(
    n_max: usize,
    coord: f64,
    scale: OscillatorScale,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_order(n_max)?;
    let s = scale.value();
    let u = s * coord;
    let mut values = vec![0.0; n_max + 1];
    fill_table(u, &mut values);
    let amp = s.sqrt();
    let mut derivs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let lower = if n == 0 { 0.0 } else { values[n - 1] };
        derivs.push(amp * s * ((2.0 * n as f64).sqrt() * lower - u * values[n]));
    }
    for v in values.iter_mut() {
        *v *= amp;
    }
    Ok((values, derivs))
}

/// `sqrt(s) psi_n(s * coord)`, normalized in the physical coordinate.
pub fn scaled_eigenfunction(n: usize, coord: f64, scale: OscillatorScale) -> Result<f64> {
    let s = scale.value();
    Ok(s.sqrt() * hermite_fn(n, s * coord)?)
}
