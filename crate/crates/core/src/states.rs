//! Lissajous coherent states as coefficient vectors over a degenerate subspace.
//!
//! A state lives on the `N + 1` Fock products `|pK>_x |q(N-K)>_y`, all
//! eigenvectors of `q n_x + p n_y` with eigenvalue `N p q`. Two independent
//! builders are provided: the closed-form projection of a Glauber product and
//! the ladder-operator recurrence `C_{K+1} = zeta C_K sqrt(...)`. Both work in
//! log-magnitude plus phase so factorial ratios never overflow.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{log_binomial_ratio, LogFactorialTable, MAX_FACTORIAL, MAX_ORDER};

/// Default tolerance (radians) for phase-condition classification.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// The triple `(N, p, q)` with `gcd(p, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegenerateSubspace {
    n: usize,
    p: usize,
    q: usize,
}

impl DegenerateSubspace {
    pub fn new(n: usize, p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::invalid(format!("p and q must be positive, got p={p}, q={q}")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::invalid(format!("p={p} and q={q} are not coprime")));
        }
        let top = p.max(q) * n;
        if top > MAX_ORDER {
            return Err(Error::Capacity {
                what: "Fock level max(p,q)*N",
                requested: top,
                limit: MAX_ORDER,
            });
        }
        Ok(Self { n, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Fock levels `(n_x, n_y) = (pK, q(N-K))` of basis element `k`.
    pub fn levels(&self, k: usize) -> (usize, usize) {
        (self.p * k, self.q * (self.n - k))
    }

    /// Eigenvalue `N p q` of `q n_x + p n_y` on this subspace.
    pub fn weighted_number(&self) -> usize {
        self.n * self.p * self.q
    }

    /// `ln` of the squared coefficient weight `(qN)! / ((pK)! (qN-qK)!)`.
    fn log_weight(&self, k: usize) -> Result<f64> {
        let qn = self.q * self.n;
        log_binomial_ratio(qn, self.p * k, qn - self.q * k)
    }
}

/// `zeta = |zeta| e^{i theta}` with the phase kept in `(-pi, pi]`.
///
/// An infinite modulus represents the `beta -> 0` limit of the projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    modulus: f64,
    phase: f64,
}

impl ComplexAmplitude {
    pub fn new(modulus: f64, phase: f64) -> Result<Self> {
        if modulus.is_nan() || modulus < 0.0 || !phase.is_finite() {
            return Err(Error::invalid(format!(
                "amplitude needs modulus >= 0 and finite phase, got ({modulus}, {phase})"
            )));
        }
        Ok(Self {
            modulus,
            phase: wrap_angle(phase),
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.norm(), if z == Complex64::new(0.0, 0.0) { 0.0 } else { z.arg() })
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_infinite(&self) -> bool {
        self.modulus.is_infinite()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }

    pub fn conj(&self) -> Self {
        Self {
            modulus: self.modulus,
            phase: wrap_angle(-self.phase),
        }
    }
}

/// Amplitudes of the product `|alpha>_x |beta>_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlauberProduct {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl GlauberProduct {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    /// `zeta = alpha^p / beta^q`, formed in polar form.
    ///
    /// Returns `None` when both amplitudes vanish.
    pub fn zeta(&self, p: usize, q: usize) -> Option<ComplexAmplitude> {
        let (ra, ta) = self.alpha.to_polar();
        let (rb, tb) = self.beta.to_polar();
        let phase = p as f64 * ta - q as f64 * tb;
        match (ra == 0.0, rb == 0.0) {
            (true, true) => None,
            (true, false) => ComplexAmplitude::new(0.0, 0.0).ok(),
            (false, true) => ComplexAmplitude::new(f64::INFINITY, phase).ok(),
            (false, false) => {
                let log_mod = p as f64 * ra.ln() - q as f64 * rb.ln();
                ComplexAmplitude::new(log_mod.exp(), phase).ok()
            }
        }
    }
}

/// Evolves a Glauber product under `H = wx n_x + wy n_y`, dropping the global phase.
pub fn evolve_glauber(g: GlauberProduct, omega_x: f64, omega_y: f64, t: f64) -> GlauberProduct {
    GlauberProduct {
        alpha: g.alpha * Complex64::from_polar(1.0, -omega_x * t),
        beta: g.beta * Complex64::from_polar(1.0, -omega_y * t),
    }
}

/// Normalized coefficient vector `C_K` over the degenerate basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcsState {
    subspace: DegenerateSubspace,
    zeta: ComplexAmplitude,
    coeffs: Vec<Complex64>,
}

impl LcsState {
    /// Wraps an externally supplied coefficient vector without enforcing the
    /// ratio structure. Used for states read back from files and for negative
    /// controls in the verification suite.
    pub fn from_coefficients(
        subspace: DegenerateSubspace,
        zeta: ComplexAmplitude,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if coeffs.len() != subspace.dim() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                subspace.dim(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(Self {
            subspace,
            zeta,
            coeffs,
        })
    }

    pub fn subspace(&self) -> DegenerateSubspace {
        self.subspace
    }

    pub fn zeta(&self) -> ComplexAmplitude {
        self.zeta
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `(<n_x>, <n_y>)` in this state.
    pub fn mean_occupations(&self) -> (f64, f64) {
        let norm = self.norm_sqr();
        let mut nx = 0.0;
        let mut ny = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let (lx, ly) = self.subspace.levels(k);
            nx += c.norm_sqr() * lx as f64;
            ny += c.norm_sqr() * ly as f64;
        }
        (nx / norm, ny / norm)
    }

    /// Complex-conjugate state, i.e. the state built from `zeta*`.
    pub fn conj(&self) -> Self {
        Self {
            subspace: self.subspace,
            zeta: self.zeta.conj(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Sparse Fock representation `(n_x, n_y, amplitude)`.
    pub fn to_fock(&self) -> FockVector {
        FockVector {
            entries: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let (nx, ny) = self.subspace.levels(k);
                    (nx, ny, c)
                })
                .collect(),
        }
    }
}

/// Normalizes log-magnitudes with phases into unit-norm coefficients.
fn assemble(log_mags: &[f64], phases: &[f64]) -> Vec<Complex64> {
    let peak = log_mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_mags.iter().map(|&l| (2.0 * (l - peak)).exp()).sum();
    let log_norm = peak + 0.5 * sum.ln();
    log_mags
        .iter()
        .zip(phases)
        .map(|(&l, &ph)| Complex64::from_polar((l - log_norm).exp(), ph))
        .collect()
}

fn check_factorial_range(sub: &DegenerateSubspace) -> Result<()> {
    let top = sub.p.max(sub.q) * sub.n;
    if top > MAX_FACTORIAL {
        return Err(Error::Capacity {
            what: "factorial argument",
            requested: top,
            limit: MAX_FACTORIAL,
        });
    }
    Ok(())
}

fn basis_state(sub: DegenerateSubspace, zeta: ComplexAmplitude, k: usize) -> LcsState {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); sub.dim()];
    coeffs[k] = Complex64::new(1.0, 0.0);
    LcsState {
        subspace: sub,
        zeta,
        coeffs,
    }
}

/// Closed-form state `C_K ∝ zeta^K sqrt((qN)!/((pK)!(qN-qK)!))` for a given `zeta`.
pub fn build_from_zeta(sub: DegenerateSubspace, zeta: ComplexAmplitude) -> Result<LcsState> {
    check_factorial_range(&sub)?;
    if zeta.modulus() == 0.0 {
        return Ok(basis_state(sub, zeta, 0));
    }
    if zeta.is_infinite() {
        return Ok(basis_state(sub, zeta, sub.n));
    }
    let ln_mod = zeta.modulus().ln();
    let mut log_mags = Vec::with_capacity(sub.dim());
    let mut phases = Vec::with_capacity(sub.dim());
    for k in 0..=sub.n {
        log_mags.push(k as f64 * ln_mod + 0.5 * sub.log_weight(k)?);
        phases.push(k as f64 * zeta.phase());
    }
    Ok(LcsState {
        subspace: sub,
        zeta,
        coeffs: assemble(&log_mags, &phases),
    })
}

/// Projects `|alpha>_x |beta>_y` onto the subspace and normalizes.
///
/// The result depends on the amplitudes only through `zeta = alpha^p / beta^q`.
/// `beta = 0` with `alpha != 0` yields the basis element `K = N`; the vacuum
/// (`alpha = beta = 0`) only survives for `N = 0`.
pub fn build_by_projection(sub: DegenerateSubspace, g: GlauberProduct) -> Result<LcsState> {
    match g.zeta(sub.p, sub.q) {
        Some(zeta) => build_from_zeta(sub, zeta),
        None if sub.n == 0 => {
            check_factorial_range(&sub)?;
            Ok(basis_state(sub, ComplexAmplitude::new(0.0, 0.0)?, 0))
        }
        None => Err(Error::ZeroProjection {
            n: sub.n,
            p: sub.p,
            q: sub.q,
        }),
    }
}

/// Builds the state by iterating the ladder recurrence
/// `C_{K+1} = zeta C_K sqrt[(qN-qK)! (pK)! / ((qN-qK-q)! (pK+p)!)]`.
///
/// Each step's factorial ratio is a product of `p + q` integers, accumulated
/// as a sum of logarithms; no factorial table is consulted.
pub fn build_by_recurrence(sub: DegenerateSubspace, zeta: ComplexAmplitude) -> Result<LcsState> {
    check_factorial_range(&sub)?;
    if zeta.is_infinite() {
        return Ok(basis_state(sub, zeta, sub.n));
    }
    let (p, q, n) = (sub.p, sub.q, sub.n);
    let ln_mod = zeta.modulus().ln();
    let mut log_mags = Vec::with_capacity(sub.dim());
    let mut phases = Vec::with_capacity(sub.dim());
    let mut log_c = 0.0_f64;
    let mut phase = 0.0_f64;
    log_mags.push(log_c);
    phases.push(phase);
    for k in 0..n {
        let remaining = q * (n - k);
        let lowered: f64 = (0..q).map(|j| ((remaining - j) as f64).ln()).sum();
        let raised: f64 = (1..=p).map(|j| ((p * k + j) as f64).ln()).sum();
        log_c += ln_mod + 0.5 * (lowered - raised);
        phase += zeta.phase();
        log_mags.push(log_c);
        phases.push(phase);
    }
    Ok(LcsState {
        subspace: sub,
        zeta,
        coeffs: assemble(&log_mags, &phases),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateTag {
    StandingWave,
    VortexLimit,
    Intermediate,
}

impl std::fmt::Display for StateTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StateTag::StandingWave => "StandingWave",
            StateTag::VortexLimit => "VortexLimit",
            StateTag::Intermediate => "Intermediate",
        };
        f.write_str(s)
    }
}

/// Phase-condition class of a state.
///
/// `circulation` is `+1` for counterclockwise probability flow (positive
/// angular momentum in the isotropic case), `-1` for clockwise and `0` for
/// standing waves. Counterclockwise flow corresponds to `sin(theta) < 0`:
/// `zeta = -i` at `p = q = 1` is the circular state `(x + iy)^N e^{-r^2/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateClass {
    pub tag: StateTag,
    pub circulation: i8,
}

/// Classifies by the distance of `theta` from multiples of `pi` (standing
/// wave) or odd multiples of `pi/2` (vortex limit). `tol` is expected in
/// `(0, pi/8]`.
///
/// States with `zeta = 0` or `zeta = inf` are single real basis elements and
/// are always standing waves.
pub fn classify(state: &LcsState, tol: f64) -> StateClass {
    classify_zeta(state.zeta(), tol)
}

pub fn classify_zeta(zeta: ComplexAmplitude, tol: f64) -> StateClass {
    let standing = StateClass {
        tag: StateTag::StandingWave,
        circulation: 0,
    };
    if zeta.modulus() == 0.0 || zeta.is_infinite() {
        return standing;
    }
    let theta = zeta.phase();
    let from_real = (theta - PI * (theta / PI).round()).abs();
    if from_real <= tol {
        return standing;
    }
    let shifted = theta - FRAC_PI_2;
    let from_imag = (shifted - PI * (shifted / PI).round()).abs();
    let circulation = if theta.sin() < 0.0 { 1 } else { -1 };
    let tag = if from_imag <= tol {
        StateTag::VortexLimit
    } else {
        StateTag::Intermediate
    };
    StateClass { tag, circulation }
}

/// A state written out on Fock products `|n_x>|n_y>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub entries: Vec<(usize, usize, Complex64)>,
}

/// Applies `q n_x + p n_y` and returns the common eigenvalue.
///
/// Every component with non-negligible amplitude must scale by the same
/// factor; otherwise the vector is not an eigenvector.
pub fn apply_weighted_number_fock(v: &FockVector, p: usize, q: usize) -> Result<f64> {
    let peak = v.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Consistency("zero vector has no eigenvalue".into()));
    }
    let mut eigen: Option<f64> = None;
    for &(nx, ny, c) in &v.entries {
        if c.norm() <= 1e-300 {
            continue;
        }
        // Fock products are exact eigenvectors; the factor is an integer.
        let ratio = (q * nx + p * ny) as f64;
        match eigen {
            None => eigen = Some(ratio),
            Some(e) if (ratio - e).abs() > 1e-12 * e.abs().max(1.0) => {
                return Err(Error::Consistency(format!(
                    "component ({nx}, {ny}) scales by {ratio}, expected {e}"
                )));
            }
            Some(_) => {}
        }
    }
    Ok(eigen.unwrap_or(0.0))
}

/// `(q n_x + p n_y)` eigenvalue of the state; equals `N p q`.
pub fn apply_weighted_number(state: &LcsState) -> Result<f64> {
    let sub = state.subspace();
    apply_weighted_number_fock(&state.to_fock(), sub.p, sub.q)
}

/// Relative residual of the defining ladder relation
/// `(a_x^p - zeta a_y^q) |psi> = 0`.
///
/// For `|zeta| > 1` the equivalent relation `(zeta^{-1} a_x^p - a_y^q)|psi> = 0`
/// is used so the limit `zeta -> inf` stays finite. The residual norm is
/// divided by the norm of the larger of the two terms.
pub fn ladder_residual(state: &LcsState) -> f64 {
    let sub = state.subspace();
    let (p, q, n) = (sub.p, sub.q, sub.n);
    let table = LogFactorialTable::shared();
    let lf = |m: usize| table.values()[m];
    let zeta = state.zeta();
    let (wx, wy) = if zeta.modulus() <= 1.0 {
        (Complex64::new(1.0, 0.0), zeta.to_complex())
    } else if zeta.is_infinite() {
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    } else {
        (zeta.to_complex().inv(), Complex64::new(1.0, 0.0))
    };
    let c = state.coeffs();
    let mut res = 0.0;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    // Both terms land on |pK>|q(N-K-1)> for K = 0..N-1.
    for k in 0..n {
        let down_x = c[k + 1] * (0.5 * (lf(p * k + p) - lf(p * k))).exp() * wx;
        let down_y = c[k] * (0.5 * (lf(q * (n - k)) - lf(q * (n - k) - q))).exp() * wy;
        res += (down_x - down_y).norm_sqr();
        lhs += down_x.norm_sqr();
        rhs += down_y.norm_sqr();
    }
    let scale = lhs.max(rhs).sqrt();
    if scale == 0.0 {
        0.0
    } else {
        res.sqrt() / scale
    }
}
