//! Wavefunction, density, current and phase on rectangular grids.
//!
//! `Psi(x, y) = sum_K C_K psi_{pK}(x; sqrt q) psi_{q(N-K)}(y; sqrt p)` is
//! separable term by term, so 1D tables of eigenfunctions and their analytic
//! derivatives are built once per grid line and combined per point.
//! Array layout is `[[i, j]]` with `i` along x and `j` along y.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::ClassicalTrajectory;
use crate::error::{Error, Result};
use crate::specfun::{scaled_eigenfunctions_with_deriv, OscillatorScale};
use crate::states::LcsState;

/// Phase is flagged undefined below this fraction of the peak density.
pub const DEFAULT_RHO_FLOOR_REL: f64 = 1e-12;

/// Rectangular lattice with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_max <= x_min || y_max <= y_min {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy min < max, got x [{x_min}, {x_max}], y [{y_min}, {y_max}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::invalid(format!("grid needs at least 2x2 points, got {nx}x{ny}")));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    /// `[-half, half]^2` with `n` points per side.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny - 1 {
            self.y_max
        } else {
            self.y_min + j as f64 * self.hy()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Same extent with half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            ..*self
        }
    }

    /// Same spacing, translated by `(dx, dy)`.
    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        Self {
            x_min: self.x_min + dx,
            x_max: self.x_max + dx,
            y_min: self.y_min + dy,
            y_max: self.y_max + dy,
            ..*self
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Trapezoid weight of point `(i, j)`.
    pub fn trapezoid_weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == self.ny - 1 { 0.5 } else { 1.0 };
        wx * wy * self.hx() * self.hy()
    }
}

/// Pointwise evaluator of `Psi` and its gradient for one state.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    state: LcsState,
    x_scale: OscillatorScale,
    y_scale: OscillatorScale,
}

/// 1D eigenfunction values and derivatives for the orders used by a state.
struct AxisTable {
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl WaveFunction {
    pub fn new(state: &LcsState) -> Result<Self> {
        let sub = state.subspace();
        Ok(Self {
            state: state.clone(),
            x_scale: OscillatorScale::for_frequency(sub.q())?,
            y_scale: OscillatorScale::for_frequency(sub.p())?,
        })
    }

    pub fn state(&self) -> &LcsState {
        &self.state
    }

    /// Picks out orders `pK` (x) for `K = 0..=N`.
    fn x_table(&self, x: f64) -> Result<AxisTable> {
        let sub = self.state.subspace();
        let (v, d) = scaled_eigenfunctions_with_deriv(sub.p() * sub.n(), x, self.x_scale)?;
        Ok(AxisTable {
            values: (0..=sub.n()).map(|k| v[sub.levels(k).0]).collect(),
            derivs: (0..=sub.n()).map(|k| d[sub.levels(k).0]).collect(),
        })
    }

    /// Picks out orders `q(N-K)` (y) for `K = 0..=N`.
    fn y_table(&self, y: f64) -> Result<AxisTable> {
        let sub = self.state.subspace();
        let (v, d) = scaled_eigenfunctions_with_deriv(sub.q() * sub.n(), y, self.y_scale)?;
        Ok(AxisTable {
            values: (0..=sub.n()).map(|k| v[sub.levels(k).1]).collect(),
            derivs: (0..=sub.n()).map(|k| d[sub.levels(k).1]).collect(),
        })
    }

    fn combine(&self, xt: &AxisTable, yt: &AxisTable) -> (Complex64, [Complex64; 2]) {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dx = Complex64::new(0.0, 0.0);
        let mut dy = Complex64::new(0.0, 0.0);
        for (k, c) in self.state.coeffs().iter().enumerate() {
            psi += c * (xt.values[k] * yt.values[k]);
            dx += c * (xt.derivs[k] * yt.values[k]);
            dy += c * (xt.values[k] * yt.derivs[k]);
        }
        (psi, [dx, dy])
    }

    /// `(Psi, [dPsi/dx, dPsi/dy])` at one point.
    pub fn eval(&self, x: f64, y: f64) -> Result<(Complex64, [Complex64; 2])> {
        Ok(self.combine(&self.x_table(x)?, &self.y_table(y)?))
    }

    pub fn psi(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(self.eval(x, y)?.0)
    }

    pub fn density(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.psi(x, y)?.norm_sqr())
    }

    /// Evaluates on every grid point; rows along x are processed in parallel.
    pub fn on_grid(&self, grid: &Grid2D) -> Result<WaveField> {
        let xt: Vec<AxisTable> = grid.xs().into_iter().map(|x| self.x_table(x)).collect::<Result<_>>()?;
        let yt: Vec<AxisTable> = grid.ys().into_iter().map(|y| self.y_table(y)).collect::<Result<_>>()?;
        let rows: Vec<Vec<(Complex64, [Complex64; 2])>> = xt
            .par_iter()
            .map(|xr| yt.iter().map(|yr| self.combine(xr, yr)).collect())
            .collect();
        let mut psi = Array2::from_elem((grid.nx, grid.ny), Complex64::new(0.0, 0.0));
        let mut grad = Array2::from_elem((grid.nx, grid.ny), [Complex64::new(0.0, 0.0); 2]);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, (v, g)) in row.into_iter().enumerate() {
                psi[[i, j]] = v;
                grad[[i, j]] = g;
            }
        }
        Ok(WaveField {
            grid: *grid,
            psi,
            grad,
            source: self.clone(),
        })
    }
}

/// `Psi` and its analytic gradient sampled on a grid.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: Grid2D,
    pub psi: Array2<Complex64>,
    pub grad: Array2<[Complex64; 2]>,
    source: WaveFunction,
}

impl WaveField {
    /// The evaluator that produced this field, for off-grid samples.
    pub fn evaluator(&self) -> &WaveFunction {
        &self.source
    }

    pub fn peak_density(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
    }

    /// `DEFAULT_RHO_FLOOR_REL` times the peak density on the grid.
    pub fn default_rho_floor(&self) -> f64 {
        DEFAULT_RHO_FLOOR_REL * self.peak_density()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    /// NaN marks an undefined value (phase below the density floor).
    pub values: Array2<f64>,
}

impl ScalarField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().filter(|v| !v.is_nan()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoid integral over the grid, skipping undefined points.
    pub fn trapezoid_integral(&self) -> f64 {
        let mut total = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            if !v.is_nan() {
                total += v * self.grid.trapezoid_weight(i, j);
            }
        }
        total
    }

    /// Max of `|value|` over points at least `margin` rows from every edge.
    pub fn interior_max_abs(&self, margin: usize) -> f64 {
        let mut m = 0.0_f64;
        for ((i, j), v) in self.values.indexed_iter() {
            let inside = i >= margin && j >= margin && i + margin < self.grid.nx && j + margin < self.grid.ny;
            if inside && !v.is_nan() {
                m = m.max(v.abs());
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid2D,
    pub values: Array2<[f64; 2]>,
}

impl VectorField {
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
    }

    pub fn magnitude(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.mapv(|v| v[0].hypot(v[1])),
        }
    }
}

pub fn eval_wavefunction(state: &LcsState, grid: &Grid2D) -> Result<WaveField> {
    WaveFunction::new(state)?.on_grid(grid)
}

/// `rho = |Psi|^2`.
pub fn probability_density(wf: &WaveField) -> ScalarField {
    ScalarField {
        grid: wf.grid,
        values: wf.psi.mapv(|v| v.norm_sqr()),
    }
}

#[inline]
fn current_at(psi: Complex64, grad: [Complex64; 2]) -> [f64; 2] {
    [(psi.conj() * grad[0]).im, (psi.conj() * grad[1]).im]
}

/// `J = Im(Psi* grad Psi)` from the analytic gradient.
pub fn current_density(wf: &WaveField) -> VectorField {
    let mut values = Array2::from_elem((wf.grid.nx, wf.grid.ny), [0.0; 2]);
    ndarray::Zip::from(&mut values)
        .and(&wf.psi)
        .and(&wf.grad)
        .for_each(|out, &psi, &grad| *out = current_at(psi, grad));
    VectorField { grid: wf.grid, values }
}

/// `atan2(Im Psi, Re Psi)` mapped into `(-pi, pi]`.
pub fn phase_of(psi: Complex64) -> f64 {
    let chi = psi.im.atan2(psi.re);
    if chi <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        chi
    }
}

/// Phase `chi` in `(-pi, pi]`, NaN where `rho < rho_floor`.
pub fn phase_field(wf: &WaveField, rho_floor: f64) -> ScalarField {
    ScalarField {
        grid: wf.grid,
        values: wf.psi.mapv(|v| if v.norm_sqr() < rho_floor { f64::NAN } else { phase_of(v) }),
    }
}

/// `d/dx` along axis 0 (`axis = 0`) or 1 of a sampled function: central in
/// the interior, second-order one-sided on the boundary.
fn partial(values: &Array2<f64>, axis: usize, h: f64) -> Array2<f64> {
    let (nx, ny) = values.dim();
    let n = if axis == 0 { nx } else { ny };
    let at = |i: usize, j: usize, k: usize| -> f64 {
        if axis == 0 {
            values[[k, j]]
        } else {
            values[[i, k]]
        }
    };
    Array2::from_shape_fn((nx, ny), |(i, j)| {
        let k = if axis == 0 { i } else { j };
        if n == 2 {
            (at(i, j, 1) - at(i, j, 0)) / h
        } else if k == 0 {
            (-3.0 * at(i, j, 0) + 4.0 * at(i, j, 1) - at(i, j, 2)) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * at(i, j, n - 1) - 4.0 * at(i, j, n - 2) + at(i, j, n - 3)) / (2.0 * h)
        } else {
            (at(i, j, k + 1) - at(i, j, k - 1)) / (2.0 * h)
        }
    })
}

/// Finite-difference `div J`.
pub fn divergence(j: &VectorField) -> ScalarField {
    let jx = j.values.mapv(|v| v[0]);
    let jy = j.values.mapv(|v| v[1]);
    let values = partial(&jx, 0, j.grid.hx()) + partial(&jy, 1, j.grid.hy());
    ScalarField { grid: j.grid, values }
}

/// `max |div J| / max |J|` over the interior (boundary rows excluded).
pub fn divergence_residual(j: &VectorField) -> f64 {
    let jmax = j.max_norm();
    if jmax == 0.0 {
        return 0.0;
    }
    divergence(j).interior_max_abs(1) / jmax
}

/// Net number of `2 pi` turns of the phase around a circle, counterclockwise.
///
/// Samples are taken off-grid from the exact wavefunction. Every sample must
/// have `rho >= rho_floor` (the field's default floor, `1e-12` of the peak).
pub fn winding_number(wf: &WaveField, center: (f64, f64), radius: f64, n_samples: usize) -> Result<i64> {
    winding_number_with_floor(wf, center, radius, n_samples, wf.default_rho_floor())
}

pub fn winding_number_with_floor(
    wf: &WaveField,
    center: (f64, f64),
    radius: f64,
    n_samples: usize,
    rho_floor: f64,
) -> Result<i64> {
    if n_samples < 3 || radius.is_nan() || radius <= 0.0 {
        return Err(Error::invalid("winding circle needs radius > 0 and at least 3 samples"));
    }
    let g = &wf.grid;
    let (cx, cy) = center;
    if cx - radius < g.x_min || cx + radius > g.x_max || cy - radius < g.y_min || cy + radius > g.y_max {
        return Err(Error::invalid("winding circle leaves the grid domain"));
    }
    let mut phases = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = 2.0 * std::f64::consts::PI * k as f64 / n_samples as f64;
        let (x, y) = (cx + radius * t.cos(), cy + radius * t.sin());
        let psi = wf.evaluator().psi(x, y)?;
        let rho = psi.norm_sqr();
        if rho < rho_floor {
            return Err(Error::NodalCrossing {
                x,
                y,
                rho,
                floor: rho_floor,
            });
        }
        phases.push(phase_of(psi));
    }
    let total: f64 = (0..n_samples)
        .map(|k| crate::states::wrap_angle(phases[(k + 1) % n_samples] - phases[k]))
        .sum();
    let turns = total / (2.0 * std::f64::consts::PI);
    let nearest = turns.round();
    if (turns - nearest).abs() > 1e-6 {
        return Err(Error::NonIntegralWinding { turns });
    }
    Ok(nearest as i64)
}

/// Central-difference phase gradient at each grid point, using a step
/// `delta` that is independent of the grid spacing. The phase is sampled on
/// four grids shifted by `±delta`; each edge difference is unwrapped to its
/// minimal representative.
pub fn phase_gradient(wf: &WaveField, delta: f64) -> Result<VectorField> {
    let eval = wf.evaluator();
    let g = wf.grid;
    let shifted = |dx: f64, dy: f64| -> Result<Array2<f64>> {
        Ok(eval.on_grid(&g.shifted(dx, dy))?.psi.mapv(phase_of))
    };
    let xp = shifted(delta, 0.0)?;
    let xm = shifted(-delta, 0.0)?;
    let yp = shifted(0.0, delta)?;
    let ym = shifted(0.0, -delta)?;
    let mut values = Array2::from_elem((g.nx, g.ny), [0.0; 2]);
    for ((i, j), out) in values.indexed_iter_mut() {
        let dx = crate::states::wrap_angle(xp[[i, j]] - xm[[i, j]]) / (2.0 * delta);
        let dy = crate::states::wrap_angle(yp[[i, j]] - ym[[i, j]]) / (2.0 * delta);
        *out = [dx, dy];
    }
    Ok(VectorField { grid: g, values })
}

/// `max |J - rho grad chi| / max |J|` over points with `rho >= rho_min`.
pub fn two_form_residual(wf: &WaveField, rho_min: f64, delta: f64) -> Result<f64> {
    let j = current_density(wf);
    let jmax = j.max_norm();
    if jmax == 0.0 {
        return Ok(0.0);
    }
    let grad_chi = phase_gradient(wf, delta)?;
    let mut worst = 0.0_f64;
    for ((i, jj), psi) in wf.psi.indexed_iter() {
        let rho = psi.norm_sqr();
        if rho < rho_min {
            continue;
        }
        let a = j.values[[i, jj]];
        let b = grad_chi.values[[i, jj]];
        let d = (a[0] - rho * b[0]).hypot(a[1] - rho * b[1]);
        worst = worst.max(d);
    }
    Ok(worst / jmax)
}

/// Fringe visibility of the density profile along one direction.
///
/// For every interior local minimum `m` of the profile flanked by local
/// maxima `l` and `r`, the local contrast is `(M - m) / (M + m)` with
/// `M = min(l, r)`; it is weighted by `M / max(profile)` so that fringes in
/// regions of negligible density do not register. The result is the
/// largest weighted contrast, or 0 for a profile without interior minima.
pub fn fringe_visibility(profile: &[f64]) -> f64 {
    let peak = profile.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 || profile.len() < 3 {
        return 0.0;
    }
    // Collapse plateaus and record alternating extrema.
    let mut extrema: Vec<(bool, f64)> = Vec::new();
    let mut rising: Option<bool> = None;
    for w in profile.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        let up = d > 0.0;
        if let Some(prev) = rising {
            if prev != up {
                // w[0] is a maximum if we were rising, a minimum otherwise.
                extrema.push((prev, w[0]));
            }
        }
        rising = Some(up);
    }
    let mut best = 0.0_f64;
    for (idx, &(is_max, m)) in extrema.iter().enumerate() {
        if is_max {
            continue;
        }
        let left = extrema[..idx].iter().rev().find(|e| e.0).map(|e| e.1);
        let right = extrema[idx + 1..].iter().find(|e| e.0).map(|e| e.1);
        if let (Some(l), Some(r)) = (left, right) {
            let big = l.min(r);
            let contrast = (big - m) / (big + m);
            best = best.max(contrast * big / peak);
        }
    }
    best
}

/// Fringe-visibility proxy for the overlap of the two counter-flowing
/// branches of the state.
///
/// The density is sampled along the line through the origin in direction
/// `axis` (for `|zeta| = 1` and `p = q = 1` the major axis of the Lissajous
/// ellipse is `(1, 1)/sqrt 2`), across the full grid extent, at a quarter of
/// the grid spacing, and [`fringe_visibility`] is applied to each half-line
/// from the origin outward. The grid must hold the whole state.
pub fn branch_overlap(state: &LcsState, grid: &Grid2D, axis: (f64, f64)) -> Result<f64> {
    let wf = eval_wavefunction(state, grid)?;
    let mass = probability_density(&wf).trapezoid_integral();
    if mass < 1.0 - 1e-6 {
        return Err(Error::MassDeficit {
            mass,
            required: 1.0 - 1e-6,
        });
    }
    let len = axis.0.hypot(axis.1);
    if len.is_nan() || len <= 0.0 {
        return Err(Error::invalid("overlap axis must be nonzero"));
    }
    let (ux, uy) = (axis.0 / len, axis.1 / len);
    let step = 0.25 * grid.hx().min(grid.hy());
    let eval = wf.evaluator();
    let mut best = 0.0_f64;
    for sign in [1.0, -1.0] {
        let mut profile = Vec::new();
        let mut s = 0.0;
        loop {
            let (x, y) = (sign * s * ux, sign * s * uy);
            if !grid.contains(x, y) {
                break;
            }
            profile.push(eval.density(x, y)?);
            s += step;
        }
        best = best.max(fringe_visibility(&profile));
    }
    Ok(best)
}

/// Fraction of the trapezoid mass of `rho` lying within `tube_width` of the
/// sampled classical curve (distance to the polyline through the samples).
pub fn localization_mass(rho: &ScalarField, traj: &ClassicalTrajectory, tube_width: f64) -> f64 {
    let g = rho.grid;
    let total = rho.trapezoid_integral();
    if total == 0.0 {
        return 0.0;
    }
    let mut inside = Array2::from_elem((g.nx, g.ny), false);
    let pts = traj.samples();
    let segments: Vec<((f64, f64), (f64, f64))> = if pts.len() == 1 {
        vec![(pts[0], pts[0])]
    } else {
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let w2 = tube_width * tube_width;
    for &((ax, ay), (bx, by)) in &segments {
        let lo_x = ax.min(bx) - tube_width;
        let hi_x = ax.max(bx) + tube_width;
        let lo_y = ay.min(by) - tube_width;
        let hi_y = ay.max(by) + tube_width;
        let i0 = (((lo_x - g.x_min) / g.hx()).floor().max(0.0)) as usize;
        let i1 = (((hi_x - g.x_min) / g.hx()).ceil().max(0.0) as usize).min(g.nx - 1);
        let j0 = (((lo_y - g.y_min) / g.hy()).floor().max(0.0)) as usize;
        let j1 = (((hi_y - g.y_min) / g.hy()).ceil().max(0.0) as usize).min(g.ny - 1);
        if i0 > i1 || j0 > j1 {
            continue;
        }
        let (dx, dy) = (bx - ax, by - ay);
        let len2 = dx * dx + dy * dy;
        for i in i0..=i1 {
            let x = g.x(i);
            for j in j0..=j1 {
                if inside[[i, j]] {
                    continue;
                }
                let y = g.y(j);
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0)
                };
                let (px, py) = (ax + t * dx - x, ay + t * dy - y);
                if px * px + py * py <= w2 {
                    inside[[i, j]] = true;
                }
            }
        }
    }
    let mut tube = 0.0;
    for ((i, j), v) in rho.values.indexed_iter() {
        if inside[[i, j]] {
            tube += v * g.trapezoid_weight(i, j);
        }
    }
    tube / total
}
