use std::io::Write;
use std::path::PathBuf;

use lissajous_core::classical::{ehrenfest_centroid, energy_matched, lissajous, ClassicalTrajectory};
use lissajous_core::fields::{current_density, eval_wavefunction, phase_field, probability_density, Grid2D};
use lissajous_core::states::{
    build_by_projection, build_from_zeta, classify, evolve_glauber, ComplexAmplitude, DegenerateSubspace,
    GlauberProduct, LcsState, DEFAULT_CLASSIFY_TOL,
};
use lissajous_core::verify::{default_suite_params, glauber_for_zeta, run_suite, QuadratureSpec, Tolerances};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{ClassicalCmd, EvolveCmd, FieldCmd, GridArgs, StateArgs, StateCmd, VerifyCmd};
use crate::error::CliError;
use crate::output::{num, write_sidecar, ChecksummedWriter};

/// Largest accepted points per grid side.
pub const MAX_GRID_SIDE: usize = 8193;
/// Largest accepted total grid points.
pub const MAX_GRID_POINTS: usize = 1 << 24;
pub const MAX_SAMPLES: usize = 1 << 22;
const CURRENT_ZERO: f64 = 1e-15;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub enum Amplitudes {
    Zeta(ComplexAmplitude),
    Glauber { alpha: ComplexAmplitude, beta: ComplexAmplitude },
}

impl Amplitudes {
    fn glauber(&self, p: usize) -> GlauberProduct {
        match *self {
            Amplitudes::Zeta(z) => glauber_for_zeta(z, p),
            Amplitudes::Glauber { alpha, beta } => GlauberProduct::new(alpha.to_complex(), beta.to_complex()),
        }
    }
}

fn nonneg(flag: &str, v: f64) -> Result<f64, CliError> {
    if v.is_nan() || v < 0.0 {
        return Err(usage(format!("--{flag} must be a nonnegative number, got {v}")));
    }
    Ok(v)
}

fn finite(flag: &str, v: f64) -> Result<f64, CliError> {
    if !v.is_finite() {
        return Err(usage(format!("--{flag} must be finite, got {v}")));
    }
    Ok(v)
}

/// Exactly one of `zeta` or `(alpha, beta)`; `None` when neither is given.
fn resolve_amplitudes(s: &StateArgs) -> Result<Option<Amplitudes>, CliError> {
    let zeta_given = s.zeta_mod.is_some() || s.zeta_arg.is_some();
    let glauber_given = s.alpha_mod.is_some() || s.alpha_arg.is_some() || s.beta_mod.is_some() || s.beta_arg.is_some();
    match (zeta_given, glauber_given) {
        (true, true) => Err(usage("give either --zeta-mod/--zeta-arg or --alpha-*/--beta-*, not both")),
        (false, false) => Ok(None),
        (true, false) => {
            let m = nonneg("zeta-mod", s.zeta_mod.ok_or_else(|| usage("--zeta-arg requires --zeta-mod"))?)?;
            let a = finite("zeta-arg", s.zeta_arg.unwrap_or(0.0))?;
            Ok(Some(Amplitudes::Zeta(ComplexAmplitude::new(m, a)?)))
        }
        (false, true) => {
            let am = nonneg("alpha-mod", s.alpha_mod.ok_or_else(|| usage("--alpha-mod is required with alpha/beta amplitudes"))?)?;
            let bm = nonneg("beta-mod", s.beta_mod.ok_or_else(|| usage("--beta-mod is required with alpha/beta amplitudes"))?)?;
            let am = finite("alpha-mod", am)?;
            let bm = finite("beta-mod", bm)?;
            let aa = finite("alpha-arg", s.alpha_arg.unwrap_or(0.0))?;
            let ba = finite("beta-arg", s.beta_arg.unwrap_or(0.0))?;
            Ok(Some(Amplitudes::Glauber {
                alpha: ComplexAmplitude::new(am, aa)?,
                beta: ComplexAmplitude::new(bm, ba)?,
            }))
        }
    }
}

fn resolve_pq(s: &StateArgs) -> Result<(usize, usize), CliError> {
    let p = s.p.ok_or_else(|| usage("--p is required"))?;
    let q = s.q.ok_or_else(|| usage("--q is required"))?;
    DegenerateSubspace::new(0, p, q)?;
    Ok((p, q))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolvedState {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub amplitudes: Amplitudes,
}

impl ResolvedState {
    fn from_args(s: &StateArgs) -> Result<Self, CliError> {
        let n = s.n.ok_or_else(|| usage("--N is required"))?;
        let (p, q) = resolve_pq(s)?;
        let amplitudes = resolve_amplitudes(s)?.ok_or_else(|| usage("give --zeta-mod/--zeta-arg or --alpha-*/--beta-*"))?;
        DegenerateSubspace::new(n, p, q)?;
        Ok(Self { n, p, q, amplitudes })
    }

    fn subspace(&self) -> DegenerateSubspace {
        DegenerateSubspace::new(self.n, self.p, self.q).expect("validated on construction")
    }

    fn build(&self) -> Result<LcsState, CliError> {
        let sub = self.subspace();
        Ok(match self.amplitudes {
            Amplitudes::Zeta(z) => build_from_zeta(sub, z)?,
            Amplitudes::Glauber { .. } => build_by_projection(sub, self.amplitudes.glauber(self.p))?,
        })
    }
}

fn resolve_grid(g: &GridArgs, half: f64, n: usize) -> Result<Grid2D, CliError> {
    let nx = g.nx.unwrap_or(n);
    let ny = g.ny.unwrap_or(n);
    for (flag, v) in [("nx", nx), ("ny", ny)] {
        if v > MAX_GRID_SIDE {
            return Err(lissajous_core::Error::Capacity {
                what: if flag == "nx" { "grid points in x" } else { "grid points in y" },
                requested: v,
                limit: MAX_GRID_SIDE,
            }
            .into());
        }
    }
    if nx.saturating_mul(ny) > MAX_GRID_POINTS {
        return Err(lissajous_core::Error::Capacity {
            what: "grid points",
            requested: nx.saturating_mul(ny),
            limit: MAX_GRID_POINTS,
        }
        .into());
    }
    Ok(Grid2D::new(
        g.xmin.unwrap_or(-half),
        g.xmax.unwrap_or(half),
        g.ymin.unwrap_or(-half),
        g.ymax.unwrap_or(half),
        nx,
        ny,
    )?)
}

fn check_samples(samples: usize) -> Result<(), CliError> {
    if samples > MAX_SAMPLES {
        return Err(lissajous_core::Error::Capacity {
            what: "samples",
            requested: samples,
            limit: MAX_SAMPLES,
        }
        .into());
    }
    Ok(())
}

pub fn cmd_state(cmd: &StateCmd) -> Result<(), CliError> {
    let resolved = ResolvedState::from_args(&cmd.state)?;
    let state = resolved.build()?;
    let sub = state.subspace();
    let mut lines = vec!["K,nx,ny,re_c,im_c,prob".to_string()];
    for (k, c) in state.coeffs().iter().enumerate() {
        let (nx, ny) = sub.levels(k);
        lines.push(format!("{k},{nx},{ny},{},{},{}", num(c.re), num(c.im), num(c.norm_sqr())));
    }
    let class = classify(&state, DEFAULT_CLASSIFY_TOL);
    lines.push(format!("# class={} circulation={}", class.tag, class.circulation));
    match &cmd.out {
        Some(path) => {
            let mut w = ChecksummedWriter::create(path)?;
            for l in &lines {
                w.line(l)?;
            }
            let crc = w.finish()?;
            write_sidecar::<_, ()>(path, &Config::<()>::new("state", &resolved, None, cmd.out.clone()), crc, None)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for l in &lines {
                writeln!(stdout, "{l}").map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Config<'a, T: Serialize> {
    command: &'static str,
    state: Option<&'a ResolvedState>,
    settings: Option<T>,
    out: Option<PathBuf>,
}

impl<'a, T: Serialize> Config<'a, T> {
    fn new(command: &'static str, state: &'a ResolvedState, settings: Option<T>, out: Option<PathBuf>) -> Self {
        Self {
            command,
            state: Some(state),
            settings,
            out,
        }
    }
}

pub fn cmd_field(cmd: &FieldCmd) -> Result<(), CliError> {
    let resolved = ResolvedState::from_args(&cmd.state)?;
    let grid = resolve_grid(&cmd.grid, 8.0, 201)?;
    let state = resolved.build()?;
    let wf = eval_wavefunction(&state, &grid)?;
    let rho = probability_density(&wf);
    let j = current_density(&wf);
    let chi = phase_field(&wf, wf.default_rho_floor());
    let clip = |v: f64| if v.abs() < CURRENT_ZERO { 0.0 } else { v };

    let mut w = ChecksummedWriter::create(&cmd.out)?;
    w.line("x,y,re_psi,im_psi,rho,jx,jy,chi")?;
    for k in 0..grid.ny {
        for i in 0..grid.nx {
            let psi = wf.psi[[i, k]];
            let [jx, jy] = j.values[[i, k]];
            w.line(&format!(
                "{},{},{},{},{},{},{},{}",
                num(grid.x(i)),
                num(grid.y(k)),
                num(psi.re),
                num(psi.im),
                num(rho.values[[i, k]]),
                num(clip(jx)),
                num(clip(jy)),
                num(chi.values[[i, k]]),
            ))?;
        }
    }
    let crc = w.finish()?;
    write_sidecar::<_, ()>(&cmd.out, &Config::new("field", &resolved, Some(grid), Some(cmd.out.clone())), crc, None)
}

#[derive(Serialize)]
struct ClassicalSettings {
    samples: usize,
    mode: &'static str,
    amp_x: f64,
    amp_y: f64,
    delta_x: f64,
    delta_y: f64,
}

fn write_trajectory(path: &std::path::Path, traj: &ClassicalTrajectory) -> Result<String, CliError> {
    let mut w = ChecksummedWriter::create(path)?;
    w.line("t,x,y")?;
    for (&t, &(x, y)) in traj.times().iter().zip(traj.samples()) {
        w.line(&format!("{},{},{}", num(t), num(x), num(y)))?;
    }
    w.finish()
}

pub fn cmd_classical(cmd: &ClassicalCmd) -> Result<(), CliError> {
    check_samples(cmd.samples)?;
    let explicit = cmd.amp_x.is_some() || cmd.amp_y.is_some() || cmd.delta.is_some();
    let (traj, mode, resolved) = if explicit {
        if cmd.state.n.is_some() || resolve_amplitudes(&cmd.state)?.is_some() {
            return Err(usage("--amp-x/--amp-y/--delta cannot be combined with state amplitudes"));
        }
        let (p, q) = resolve_pq(&cmd.state)?;
        let ax = finite("amp-x", cmd.amp_x.ok_or_else(|| usage("--amp-x is required"))?)?;
        let ay = finite("amp-y", cmd.amp_y.ok_or_else(|| usage("--amp-y is required"))?)?;
        let delta = finite("delta", cmd.delta.unwrap_or(0.0))?;
        (lissajous(ax, ay, p, q, delta, cmd.samples)?, "explicit", None)
    } else {
        let amplitudes = resolve_amplitudes(&cmd.state)?;
        match amplitudes {
            Some(Amplitudes::Glauber { .. }) if cmd.state.n.is_none() => {
                let (p, q) = resolve_pq(&cmd.state)?;
                let g = amplitudes.expect("matched").glauber(p);
                (ehrenfest_centroid(g, p, q, cmd.samples)?, "centroid", None)
            }
            _ => {
                let resolved = ResolvedState::from_args(&cmd.state)?;
                let state = resolved.build()?;
                (energy_matched(&state, cmd.samples)?, "energy_matched", Some(resolved))
            }
        }
    };
    let params = traj.params();
    let settings = ClassicalSettings {
        samples: cmd.samples,
        mode,
        amp_x: params.a_x,
        amp_y: params.a_y,
        delta_x: params.delta_x,
        delta_y: params.delta_y,
    };
    let crc = write_trajectory(&cmd.out, &traj)?;
    let config = Config {
        command: "classical",
        state: resolved.as_ref(),
        settings: Some((params.p, params.q, settings)),
        out: Some(cmd.out.clone()),
    };
    write_sidecar::<_, ()>(&cmd.out, &config, crc, None)
}

#[derive(Serialize)]
struct EvolveSettings {
    p: usize,
    q: usize,
    amplitudes: Amplitudes,
    samples: usize,
}

pub fn cmd_evolve(cmd: &EvolveCmd) -> Result<(), CliError> {
    check_samples(cmd.samples)?;
    let (p, q) = resolve_pq(&cmd.state)?;
    if cmd.samples < 16 * p.max(q) {
        return Err(usage(format!("--samples must be at least {}", 16 * p.max(q))));
    }
    let amplitudes = resolve_amplitudes(&cmd.state)?.ok_or_else(|| usage("give --alpha-*/--beta-* or --zeta-mod/--zeta-arg"))?;
    let g = amplitudes.glauber(p);
    let path = ehrenfest_centroid(g, p, q, cmd.samples)?;
    let mut w = ChecksummedWriter::create(&cmd.out)?;
    w.line("t,x,y,zeta_re,zeta_im")?;
    for (&t, &(x, y)) in path.times().iter().zip(path.samples()) {
        let zeta = evolve_glauber(g, q as f64, p as f64, t).zeta(p, q);
        let z = match zeta {
            Some(z) if z.is_infinite() => Complex64::new(f64::INFINITY, f64::NAN),
            Some(z) => z.to_complex(),
            None => Complex64::new(f64::NAN, f64::NAN),
        };
        w.line(&format!("{},{},{},{},{}", num(t), num(x), num(y), num(z.re), num(z.im)))?;
    }
    let crc = w.finish()?;
    let config = Config::<EvolveSettings> {
        command: "evolve",
        state: None,
        settings: Some(EvolveSettings {
            p,
            q,
            amplitudes,
            samples: cmd.samples,
        }),
        out: Some(cmd.out.clone()),
    };
    write_sidecar::<_, ()>(&cmd.out, &config, crc, None)
}

#[derive(Serialize)]
struct VerifySettings {
    params: Vec<(DegenerateSubspace, ComplexAmplitude)>,
    grid: Grid2D,
    quadrature: QuadratureSpec,
    tolerances: Tolerances,
}

pub fn cmd_verify(cmd: &VerifyCmd) -> Result<(), CliError> {
    let params = if cmd.state.any_given() {
        let resolved = ResolvedState::from_args(&cmd.state)?;
        let zeta = match resolved.amplitudes {
            Amplitudes::Zeta(z) => z,
            Amplitudes::Glauber { .. } => resolved
                .amplitudes
                .glauber(resolved.p)
                .zeta(resolved.p, resolved.q)
                .ok_or(lissajous_core::Error::ZeroProjection {
                    n: resolved.n,
                    p: resolved.p,
                    q: resolved.q,
                })?,
        };
        vec![(resolved.subspace(), zeta)]
    } else {
        default_suite_params()
    };
    let grid = resolve_grid(&cmd.grid, 8.0, 801)?;
    let defaults = QuadratureSpec::default();
    let quadrature = QuadratureSpec {
        radial_nodes: cmd.radial_nodes.unwrap_or(defaults.radial_nodes),
        angular_nodes: cmd.angular_nodes.unwrap_or(defaults.angular_nodes),
    };
    for (flag, v) in [("radial-nodes", quadrature.radial_nodes), ("angular-nodes", quadrature.angular_nodes)] {
        if v == 0 {
            return Err(usage(format!("--{flag} must be positive")));
        }
        if v > 4096 {
            return Err(lissajous_core::Error::Capacity {
                what: "quadrature nodes",
                requested: v,
                limit: 4096,
            }
            .into());
        }
    }
    let mut tolerances = Tolerances::default();
    for (flag, given, slot) in [
        ("tolerance-completeness", cmd.tolerance_completeness, &mut tolerances.completeness),
        ("tolerance-algebraic", cmd.tolerance_algebraic, &mut tolerances.algebraic),
        ("tolerance-continuity", cmd.tolerance_continuity, &mut tolerances.continuity),
    ] {
        if let Some(v) = given {
            if !(v.is_finite() && v >= 0.0) {
                return Err(usage(format!("--{flag} must be a nonnegative finite number, got {v}")));
            }
            *slot = v;
        }
    }

    let report = run_suite(&params, &grid, quadrature, &tolerances)?;
    let text = report.to_text();
    match &cmd.report {
        Some(path) => {
            let mut w = ChecksummedWriter::create(path)?;
            for l in text.lines() {
                w.line(l)?;
            }
            let crc = w.finish()?;
            let config = Config::<VerifySettings> {
                command: "verify",
                state: None,
                settings: Some(VerifySettings {
                    params,
                    grid,
                    quadrature,
                    tolerances,
                }),
                out: Some(path.clone()),
            };
            write_sidecar(path, &config, crc, Some(&report))?;
        }
        None => print!("{text}"),
    }
    if report.overall {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(report.failures().count()))
    }
}
