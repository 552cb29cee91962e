//! Resolutions of unity by quadrature and the aggregated invariant report.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::energy_matched;
use crate::error::{Error, Result};
use crate::fields::{
    current_density, divergence_residual, eval_wavefunction, probability_density, two_form_residual,
    winding_number, localization_mass, Grid2D,
};
use crate::quadrature::{gauss_laguerre, gauss_legendre, periodic_nodes};
use crate::specfun::LogFactorialTable;
use crate::states::{
    apply_weighted_number, build_by_projection, build_by_recurrence, build_from_zeta, classify,
    ladder_residual, ComplexAmplitude, DegenerateSubspace, GlauberProduct, LcsState, StateTag,
    DEFAULT_CLASSIFY_TOL,
};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    fn get_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }

    /// `max |M - I|` over entries.
    pub fn identity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((self.get(r, c) - target).norm());
            }
        }
        worst
    }

    /// `max |M - M^dagger|`.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Laguerre nodes per radial variable (Gauss–Legendre nodes in
    /// `cos theta` for the sphere measure).
    pub radial_nodes: usize,
    /// Uniform trapezoid nodes per angular variable.
    pub angular_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 128,
            angular_nodes: 256,
        }
    }
}

/// `sum_k e^{i m phi_k} (2 pi / M)` for the uniform rule, as `(cos, sin)` sums.
fn angular_moment(nodes: &[f64], m: i64) -> Complex64 {
    let w = 2.0 * PI / nodes.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for &phi in nodes {
        let a = m as f64 * phi;
        re += a.cos();
        im += a.sin();
    }
    Complex64::new(re * w, im * w)
}

/// `∫ d^2 a / pi e^{-|a|^2} a^m conj(a)^{m'} / sqrt(m! m'!)` by Gauss–Laguerre
/// in `u = |a|^2` and the uniform rule in `arg a`.
fn coherent_moment(radial: &crate::quadrature::QuadratureRule, angular: &[f64], m: usize, mp: usize) -> Complex64 {
    let lf = LogFactorialTable::shared();
    let half_log_fact = 0.5 * (lf.values()[m] + lf.values()[mp]);
    let power = 0.5 * (m + mp) as f64;
    let r: f64 = radial
        .nodes
        .iter()
        .zip(&radial.weights)
        .map(|(&u, &w)| w * (power * u.ln() - half_log_fact).exp())
        .sum();
    // d^2 a = (1/2) du dphi; the 1/pi of the measure leaves 1/(2 pi).
    angular_moment(angular, m as i64 - mp as i64) * (r / (2.0 * PI))
}

/// Matrix of `∫∫ d^2a d^2b / pi^2 Pi |a,b><a,b| Pi` in the degenerate basis.
///
/// The integrand factorizes into an `alpha` and a `beta` part, each done as a
/// Gauss–Laguerre radial rule times a uniform angular rule. The angular rule
/// must have more than `2 max(p, q) N` nodes so no phase integral aliases.
pub fn completeness_general(sub: DegenerateSubspace, spec: QuadratureSpec) -> Result<CMatrix> {
    let n = sub.n();
    let need = 2 * sub.p().max(sub.q()) * n;
    if spec.angular_nodes <= need {
        return Err(Error::invalid(format!(
            "angular nodes {} must exceed 2 max(p,q) N = {need}",
            spec.angular_nodes
        )));
    }
    let radial = gauss_laguerre(spec.radial_nodes)?;
    let angular = periodic_nodes(spec.angular_nodes);
    let mut out = CMatrix::zeros(sub.dim());
    for k in 0..=n {
        for kp in 0..=n {
            let (mx, my) = sub.levels(k);
            let (mxp, myp) = sub.levels(kp);
            *out.get_mut(k, kp) =
                coherent_moment(&radial, &angular, mx, mxp) * coherent_moment(&radial, &angular, my, myp);
        }
    }
    Ok(out)
}

/// The same matrix written with normalized projected states,
/// `∫∫ d^2a d^2b / pi^2 e^{-(|a|^2+|b|^2)} / Nrm(a,b)^2 |a,b,N,p,q><a,b,N,p,q|`,
/// integrated as a full four-dimensional product rule. Intended as a
/// cross-check at small sizes.
pub fn completeness_general_normalized(sub: DegenerateSubspace, spec: QuadratureSpec) -> Result<CMatrix> {
    let need = 2 * sub.p().max(sub.q()) * sub.n();
    if spec.angular_nodes <= need {
        return Err(Error::invalid(format!(
            "angular nodes {} must exceed 2 max(p,q) N = {need}",
            spec.angular_nodes
        )));
    }
    let radial = gauss_laguerre(spec.radial_nodes)?;
    let angular = periodic_nodes(spec.angular_nodes);
    let lf = LogFactorialTable::shared().values();
    let (p, q, n) = (sub.p(), sub.q(), sub.n());
    let dphi = 2.0 * PI / angular.len() as f64;
    let mut out = CMatrix::zeros(sub.dim());
    for (&ua, &wa) in radial.nodes.iter().zip(&radial.weights) {
        for (&ub, &wb) in radial.nodes.iter().zip(&radial.weights) {
            // 1/Nrm^2 = sum_K |a|^{2pK} |b|^{2q(N-K)} / ((pK)! (qN-qK)!), in logs.
            let terms: Vec<f64> = (0..=n)
                .map(|k| (p * k) as f64 * ua.ln() + (q * (n - k)) as f64 * ub.ln() - lf[p * k] - lf[q * (n - k)])
                .collect();
            let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let inv_norm_sq = peak.exp() * terms.iter().map(|t| (t - peak).exp()).sum::<f64>();
            // e^{-u} is carried by the Laguerre weights; measure factor (1/2)^2 / pi^2.
            let weight = wa * wb * inv_norm_sq * 0.25 / (PI * PI) * dphi * dphi;
            for &pa in &angular {
                for &pb in &angular {
                    let g = GlauberProduct::new(Complex64::from_polar(ua.sqrt(), pa), Complex64::from_polar(ub.sqrt(), pb));
                    let state = build_by_projection(sub, g)?;
                    let c = state.coeffs();
                    for k in 0..=n {
                        for kp in 0..=n {
                            *out.get_mut(k, kp) += c[k] * c[kp].conj() * weight;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `(N+1)/pi ∫ d^2 zeta / (1+|zeta|^2)^2 |zeta,N><zeta,N|` on the sphere.
///
/// With `zeta = tan(theta/2) e^{-i phi}` the measure becomes
/// `(N+1)/(4 pi) d(cos theta) d phi`; `cos theta` is integrated by
/// Gauss–Legendre (`spec.radial_nodes` nodes, at least `N + 1`) and `phi` by
/// the uniform rule (more than `2N` nodes).
pub fn completeness_su2(n: usize, spec: QuadratureSpec) -> Result<CMatrix> {
    if spec.angular_nodes <= 2 * n {
        return Err(Error::invalid(format!(
            "angular nodes {} must exceed 2N = {}",
            spec.angular_nodes,
            2 * n
        )));
    }
    if spec.radial_nodes < n + 1 {
        return Err(Error::invalid(format!(
            "Gauss-Legendre nodes {} must be at least N+1 = {}",
            spec.radial_nodes,
            n + 1
        )));
    }
    let sub = DegenerateSubspace::new(n, 1, 1)?;
    let polar = gauss_legendre(spec.radial_nodes)?;
    let angular = periodic_nodes(spec.angular_nodes);
    let prefactor = (n + 1) as f64 / (4.0 * PI) * (2.0 * PI / angular.len() as f64);
    let mut out = CMatrix::zeros(sub.dim());
    for (&c, &w) in polar.nodes.iter().zip(&polar.weights) {
        // tan(theta/2) = sqrt((1 - c)/(1 + c))
        let modulus = ((1.0 - c) / (1.0 + c)).sqrt();
        for &phi in &angular {
            let state = build_from_zeta(sub, ComplexAmplitude::new(modulus, -phi)?)?;
            let coeffs = state.coeffs();
            for k in 0..=n {
                for kp in 0..=n {
                    *out.get_mut(k, kp) += coeffs[k] * coeffs[kp].conj() * (w * prefactor);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Comparison {
    /// `measured <= tolerance`
    AtMost,
    /// `measured >= tolerance`
    AtLeast,
    /// `|measured - target| <= tolerance * |target|`
    Near { target: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub parameters: String,
}

impl Check {
    pub fn new(name: &str, parameters: &str, measured: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::AtMost => measured <= tolerance,
            Comparison::AtLeast => measured >= tolerance,
            Comparison::Near { target } => (measured - target).abs() <= tolerance * target.abs(),
        };
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            comparison,
            pass,
            parameters: parameters.to_string(),
        }
    }

    fn failed(name: &str, parameters: &str, reason: &str) -> Self {
        Self {
            name: name.to_string(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            comparison: Comparison::AtMost,
            pass: false,
            parameters: format!("{parameters} error=\"{reason}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

/// Fixed 17-significant-digit scientific notation; `nan` for NaN.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == 0.0 {
        format!("{:.16e}", 0.0)
    } else {
        format!("{v:.16e}")
    }
}

impl VerificationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let overall = checks.iter().all(|c| c.pass);
        Self { checks, overall }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One `key=value` line per check, then the overall flag.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let cmp = match c.comparison {
                Comparison::AtMost => "at_most".to_string(),
                Comparison::AtLeast => "at_least".to_string(),
                Comparison::Near { target } => format!("near:{}", format_float(target)),
            };
            out.push_str(&format!(
                "check={} pass={} measured={} tolerance={} comparison={} {}\n",
                c.name,
                c.pass,
                format_float(c.measured),
                format_float(c.tolerance),
                cmp,
                c.parameters
            ));
        }
        out.push_str(&format!("overall={}\n", self.overall));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Norms, construction equivalence, eigenvalue, standing-wave current.
    pub algebraic: f64,
    /// Max-entry distance of completeness matrices from the identity.
    pub completeness: f64,
    /// `max|div J| h / max|J|` on the given grid.
    pub continuity: f64,
    /// Allowed relative deviation of the divergence refinement ratio from 4.
    pub convergence_order: f64,
    /// `max |J - rho grad chi| / max|J|`.
    pub two_form: f64,
    /// Minimum tube mass around the energy-matched classical orbit.
    pub localization: f64,
    pub tube_width: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-12,
            completeness: 1e-9,
            continuity: 1e-3,
            convergence_order: 0.2,
            two_form: 1e-6,
            localization: 0.9,
            tube_width: 1.5,
        }
    }
}

/// Density threshold for the two-form comparison.
pub const TWO_FORM_RHO_MIN: f64 = 1e-8;
/// Off-grid central-difference step for the phase gradient.
pub const PHASE_GRADIENT_STEP: f64 = 1e-6;

/// Glauber amplitudes with `alpha^p / beta^q = zeta`: `beta = 1` and `alpha`
/// the principal `p`-th root (`beta = 0` for infinite `zeta`).
pub fn glauber_for_zeta(zeta: ComplexAmplitude, p: usize) -> GlauberProduct {
    if zeta.is_infinite() {
        return GlauberProduct::new(Complex64::from_polar(1.0, zeta.phase() / p as f64), Complex64::new(0.0, 0.0));
    }
    let alpha = Complex64::from_polar(zeta.modulus().powf(1.0 / p as f64), zeta.phase() / p as f64);
    GlauberProduct::new(alpha, Complex64::new(1.0, 0.0))
}

/// Largest componentwise distance after aligning the global phase on the
/// largest-magnitude coefficient of `b`.
pub fn aligned_distance(a: &LcsState, b: &LcsState) -> f64 {
    let (ca, cb) = (a.coeffs(), b.coeffs());
    let anchor = (0..cb.len())
        .max_by(|&i, &j| cb[i].norm().total_cmp(&cb[j].norm()))
        .unwrap_or(0);
    let rot = if ca[anchor].norm() > 0.0 && cb[anchor].norm() > 0.0 {
        let r = cb[anchor] / ca[anchor];
        r / r.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    ca.iter().zip(cb).map(|(x, y)| (x * rot - y).norm()).fold(0.0, f64::max)
}

fn label(sub: DegenerateSubspace, zeta: ComplexAmplitude) -> String {
    format!(
        "N={} p={} q={} zeta_mod={} zeta_arg={}",
        sub.n(),
        sub.p(),
        sub.q(),
        format_float(zeta.modulus()),
        format_float(zeta.phase())
    )
}

/// Canonical completeness configurations checked in every report.
pub const GENERAL_COMPLETENESS_CASES: [(usize, usize, usize); 3] = [(3, 2, 3), (10, 1, 2), (20, 1, 1)];
pub const SU2_COMPLETENESS_CASES: [usize; 3] = [1, 5, 20];

fn completeness_checks(subs: &[DegenerateSubspace], spec: QuadratureSpec, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut general: Vec<DegenerateSubspace> = GENERAL_COMPLETENESS_CASES
        .iter()
        .map(|&(n, p, q)| DegenerateSubspace::new(n, p, q))
        .collect::<Result<_>>()?;
    for s in subs {
        if !general.contains(s) {
            general.push(*s);
        }
    }
    for sub in general {
        let params = format!("N={} p={} q={} radial={} angular={}", sub.n(), sub.p(), sub.q(), spec.radial_nodes, spec.angular_nodes);
        match completeness_general(sub, spec) {
            Ok(m) => {
                checks.push(Check::new("completeness_general", &params, m.identity_residual(), tol.completeness, Comparison::AtMost));
                checks.push(Check::new("completeness_general_hermitian", &params, m.hermitian_residual(), 1e-13, Comparison::AtMost));
            }
            Err(e) => checks.push(Check::failed("completeness_general", &params, &e.to_string())),
        }
    }
    for n in SU2_COMPLETENESS_CASES {
        let params = format!("N={n} radial={} angular={}", spec.radial_nodes, spec.angular_nodes);
        match completeness_su2(n, spec) {
            Ok(m) => {
                checks.push(Check::new("completeness_su2", &params, m.identity_residual(), tol.completeness.min(1e-11), Comparison::AtMost));
                checks.push(Check::new(
                    "completeness_su2_trace",
                    &params,
                    (m.trace() - (n + 1) as f64).norm(),
                    tol.completeness.min(1e-11),
                    Comparison::AtMost,
                ));
            }
            Err(e) => checks.push(Check::failed("completeness_su2", &params, &e.to_string())),
        }
    }
    Ok(checks)
}

/// Invariant checks for one already-built state on `grid`.
///
/// Check failures are recorded; capacity errors and a grid that truncates
/// the state (trapezoid mass below `1 - 1e-6`) abort.
pub fn check_state(state: &LcsState, grid: &Grid2D, tol: &Tolerances) -> Result<Vec<Check>> {
    let sub = state.subspace();
    let zeta = state.zeta();
    let params = label(sub, zeta);
    let mut checks = Vec::new();

    checks.push(Check::new("norm", &params, (state.norm_sqr() - 1.0).abs(), tol.algebraic, Comparison::AtMost));

    let by_projection = build_by_projection(sub, glauber_for_zeta(zeta, sub.p()))?;
    let by_recurrence = build_by_recurrence(sub, zeta)?;
    checks.push(Check::new(
        "construction_equivalence",
        &params,
        aligned_distance(&by_projection, &by_recurrence).max(aligned_distance(state, &by_recurrence)),
        tol.algebraic,
        Comparison::AtMost,
    ));

    // Weighted-number eigenvalue together with the ladder relation that
    // pins the coefficient ratios; either deviating marks the state inconsistent.
    let eigen = match apply_weighted_number(state) {
        Ok(v) => (v - sub.weighted_number() as f64).abs() / (sub.weighted_number().max(1) as f64),
        Err(_) => f64::INFINITY,
    };
    checks.push(Check::new(
        "eigenvalue_consistency",
        &format!("{params} eigenvalue_residual={} ladder_residual={}", format_float(eigen), format_float(ladder_residual(state))),
        eigen.max(ladder_residual(state)),
        tol.algebraic,
        Comparison::AtMost,
    ));

    let wf = eval_wavefunction(state, grid)?;
    let rho = probability_density(&wf);
    let mass = rho.trapezoid_integral();
    if !(1.0 - 1e-6..=1.0 + 1e-6).contains(&mass) {
        return Err(Error::MassDeficit {
            mass,
            required: 1.0 - 1e-6,
        });
    }
    checks.push(Check::new("grid_mass", &params, (mass - 1.0).abs(), 1e-6, Comparison::AtMost));

    let j = current_density(&wf);
    let class = classify(state, DEFAULT_CLASSIFY_TOL);
    let peak_rho = wf.peak_density();
    if class.tag == StateTag::StandingWave {
        checks.push(Check::new("standing_wave_current", &params, j.max_norm() / peak_rho, tol.algebraic, Comparison::AtMost));
    } else {
        let coarse = divergence_residual(&j);
        checks.push(Check::new("divergence", &params, coarse * grid.hx(), tol.continuity, Comparison::AtMost));
        let fine_grid = grid.refined();
        let fine = divergence_residual(&current_density(&eval_wavefunction(state, &fine_grid)?));
        checks.push(Check::new(
            "divergence_order",
            &format!("{params} coarse={} fine={}", format_float(coarse), format_float(fine)),
            coarse / fine,
            tol.convergence_order,
            Comparison::Near { target: 4.0 },
        ));
        checks.push(Check::new(
            "two_form_current",
            &params,
            two_form_residual(&wf, TWO_FORM_RHO_MIN, PHASE_GRADIENT_STEP)?,
            tol.two_form,
            Comparison::AtMost,
        ));
        if sub.p() == 1 && sub.q() == 1 {
            let radius = (sub.n() as f64).sqrt();
            let winding_params = format!("{params} radius={}", format_float(radius));
            match winding_number(&wf, (0.0, 0.0), radius, 64 * sub.n().max(1)) {
                Ok(w) if class.tag == StateTag::VortexLimit => {
                    let expected = class.circulation as i64 * sub.n() as i64;
                    checks.push(Check::new(
                        "winding_number",
                        &format!("{winding_params} winding={w} expected={expected}"),
                        (w - expected).abs() as f64,
                        0.0,
                        Comparison::AtMost,
                    ));
                }
                Ok(w) => checks.push(Check::new("winding_number", &format!("{winding_params} winding={w}"), 0.0, 0.0, Comparison::AtMost)),
                Err(e) => checks.push(Check::failed("winding_number", &winding_params, &e.to_string())),
            }
        }
    }

    let orbit = energy_matched(state, 64 * sub.p().max(sub.q()) * 64)?;
    checks.push(Check::new(
        "localization",
        &format!("{params} tube_width={}", format_float(tol.tube_width)),
        localization_mass(&rho, &orbit, tol.tube_width),
        tol.localization,
        Comparison::AtLeast,
    ));
    Ok(checks)
}

/// Runs the completeness checks and, for each `(subspace, zeta)`, the state
/// invariants of [`check_state`].
pub fn run_suite(
    params: &[(DegenerateSubspace, ComplexAmplitude)],
    grid: &Grid2D,
    spec: QuadratureSpec,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let subs: Vec<DegenerateSubspace> = params.iter().map(|p| p.0).collect();
    let mut checks = completeness_checks(&subs, spec, tol)?;
    for &(sub, zeta) in params {
        let state = build_from_zeta(sub, zeta)?;
        checks.extend(check_state(&state, grid, tol)?);
    }
    Ok(VerificationReport::from_checks(checks))
}

/// Parameter set used when no explicit states are requested: the isotropic
/// vortex limit and intermediate states at `N = 20`, plus anisotropic
/// standing-wave and vortex states.
pub fn default_suite_params() -> Vec<(DegenerateSubspace, ComplexAmplitude)> {
    let mk = |n, p, q, theta: f64| {
        (
            DegenerateSubspace::new(n, p, q).expect("valid default subspace"),
            ComplexAmplitude::new(1.0, theta).expect("valid default amplitude"),
        )
    };
    vec![
        mk(20, 1, 1, FRAC_PI_2),
        mk(20, 1, 1, PI / 4.0),
        mk(20, 1, 2, 0.0),
        mk(20, 1, 2, FRAC_PI_2),
        mk(20, 2, 3, PI / 4.0),
    ]
}
