//! Scenario runner behind the `tvdecay` binary.
//!
//! Each command reads a [`Scenario`] and writes some of
//! `constants.json`, `curves.csv` and `summary.json` into the output
//! directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{BetaSpec, EnvelopeRequest, FSpec, InitialShape, PhiSpec, Scenario};
use crate::envelopes::{self as env, phi_moment, DecayEnvelope, Phi};
use crate::error::{Error, Result};
use crate::inequalities::{
    bakry_emery, capacity_condition_check, discrete_poincare_constant, muckenhoupt_poincare,
    rayleigh_bracket_check, BakryEmery, BetaFunction, CapacityReport, InequalityReport,
    MuckenhouptReport, RayleighCheck,
};
use crate::measure::{
    build_measure, functionals, integrate, Functionals, GridFunction, PotentialSpec,
    ProbabilityMeasure1D,
};
use crate::numerics::{linear_fit, log_space, ScalarFn};
use crate::psi::{pinsker_constant, PsiProfile};
use crate::sim::{evolve, initial, DiagnosticsSeries};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Bounds,
    Simulate,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Bounds => "bounds",
            Command::Simulate => "simulate",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub config: PathBuf,
    pub out: PathBuf,
    pub t_grid: Option<usize>,
    pub seed: u64,
}

/// An error together with the operation that produced it.
#[derive(Debug)]
pub struct Failure {
    pub op: &'static str,
    pub error: Error,
}

impl Failure {
    /// 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self.error {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} failed: {}", self.op, self.error)
    }
}

trait Op<T> {
    fn op(self, op: &'static str) -> std::result::Result<T, Failure>;
}

impl<T> Op<T> for Result<T> {
    fn op(self, op: &'static str) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure { op, error })
    }
}

/// Caps the global rayon pool at `TVDECAY_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("TVDECAY_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Everything derived from a scenario before any envelope is built.
pub struct Context {
    pub scenario: Scenario,
    pub mu: ProbabilityMeasure1D,
    pub h0: GridFunction,
    pub psi: PsiProfile,
    pub muckenhoupt: MuckenhouptReport,
    pub spectral_c_p: f64,
    pub bakry_emery: BakryEmery,
    pub c_p: f64,
    pub c_ls: Option<f64>,
    pub initial: Functionals,
    pub capacity: Option<CapacityReport>,
}

pub fn build_context(scenario: Scenario) -> std::result::Result<Context, Failure> {
    let mu = build_measure(&scenario.potential, scenario.n_points, scenario.tail_tol).op("build_measure")?;
    let h0 = initial_density(&mu, &scenario.initial).op("initial_density")?;
    let psi = scenario.psi.build().op("build_psi")?;
    let muckenhoupt = muckenhoupt_poincare(&mu).op("muckenhoupt_poincare")?;
    let spectral_c_p = discrete_poincare_constant(&mu).c_p;
    let be = bakry_emery(&scenario.potential, scenario.w_osc, &mu.grid).op("bakry_emery")?;
    let c_p = scenario.constants.c_p.unwrap_or(muckenhoupt.c_p_interval[1]) * scenario.constants.c_p_scale;
    let c_ls = scenario.constants.c_ls.or(be.c_ls);
    let init = functionals(&mu, &h0, Some(&psi)).op("functionals")?;
    let capacity = match &scenario.capacity {
        None => None,
        Some(req) => {
            let eta = req.eta.to_eta();
            let f = match req.f {
                FSpec::Constant { c } => ScalarFn::constant(c),
                FSpec::Log => ScalarFn::new(|u: f64| u.ln()),
            };
            let a = req.a.unwrap_or(2.1f64.max(eta.b + 0.1));
            Some(capacity_condition_check(&mu, &f, &eta, a, req.rho).op("capacity_condition_check")?)
        }
    };
    Ok(Context {
        scenario,
        mu,
        h0,
        psi,
        muckenhoupt,
        spectral_c_p,
        bakry_emery: be,
        c_p,
        c_ls,
        initial: init,
        capacity,
    })
}

pub fn initial_density(mu: &ProbabilityMeasure1D, shape: &InitialShape) -> Result<GridFunction> {
    match shape {
        InitialShape::Constant => Ok(GridFunction::constant(mu, 1.0)),
        InitialShape::EigenPerturbation { epsilon } => initial::eigen_perturbation(mu, *epsilon),
        InitialShape::Step => initial::step(mu),
        InitialShape::ShiftedGaussian { shift } => initial::shifted(mu, *shift),
        InitialShape::TailRatio { p, cap } => initial::tail_ratio(mu, *p, *cap),
        InitialShape::Tabulated { values } => {
            if values.len() != mu.len() {
                return Err(Error::GridMismatch {
                    expected: mu.len(),
                    got: values.len(),
                });
            }
            GridFunction::new(values.clone()).normalized(mu)
        }
    }
}

/// `4B` for the measure `(1 + h₀)/2·μ`.
pub fn lifted_poincare_constant(mu: &ProbabilityMeasure1D, h0: &GridFunction) -> Result<f64> {
    let v: Vec<f64> = mu
        .grid
        .iter()
        .zip(&h0.values)
        .map(|(&x, &h)| mu.spec.v(x) - 0.5 * (0.5 * (1.0 + h)).ln())
        .collect();
    let spec = PotentialSpec::tabulated(mu.grid.clone(), v);
    let lifted = build_measure(&spec, mu.len(), 1e-10)?;
    Ok(muckenhoupt_poincare(&lifted)?.c_p_interval[1])
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("{what} is unavailable for this scenario; set it in the config"))
}

fn phi_of(req: &EnvelopeRequest, default: PhiSpec) -> Phi {
    req.phi().unwrap_or(default).to_phi()
}

fn beta_of(req: &EnvelopeRequest, ctx: &Context, default: BetaFunction) -> Result<BetaFunction> {
    match req.beta() {
        None => Ok(default),
        Some(BetaSpec::LiftedPoincare) => Ok(BetaFunction::constant(lifted_poincare_constant(&ctx.mu, &ctx.h0)?)),
        Some(spec) => Ok(spec.to_beta()?.expect("non-lifted β")),
    }
}

/// Builds the requested envelope from the scenario context.
pub fn build_envelope(req: &EnvelopeRequest, ctx: &Context) -> Result<DecayEnvelope> {
    let c_p = ctx.c_p;
    let c_ls = || ctx.c_ls.ok_or_else(|| missing("C_LS (constants.c_ls)"));
    let moment = |phi: &Phi| phi_moment(&ctx.mu, &ctx.h0, phi);
    let name = req.name.as_str();
    let e = match name {
        "poincare_l2" => env::envelope_poincare_l2(c_p, ctx.initial.variance.sqrt())?,
        "truncation_poincare" => {
            let phi = phi_of(req, PhiSpec::Power { q: 1.5 });
            env::envelope_truncation_poincare(c_p, &phi, moment(&phi)?)?
        }
        "truncation_poincare_closed" => {
            let q = req.num("q").unwrap_or(1.5);
            env::envelope_truncation_poincare_closed(c_p, q, moment(&Phi::power(q))?)?
        }
        "truncation_poincare_kopt" => {
            let phi = phi_of(req, PhiSpec::Power { q: 1.5 });
            env::envelope_truncation_poincare_kopt(c_p, &phi, moment(&phi)?)?
        }
        "weak_poincare" => {
            let phi = phi_of(req, PhiSpec::Power { q: 1.5 });
            let beta = beta_of(req, ctx, BetaFunction::constant(c_p))?;
            env::envelope_weak_poincare(&beta, &phi, moment(&phi)?)?
        }
        "orlicz" => {
            let phi = phi_of(req, PhiSpec::Power { q: 3.0 });
            let beta = beta_of(req, ctx, BetaFunction::constant(c_p))?;
            env::envelope_orlicz(&beta, &phi, moment(&phi)?, req.num("c").unwrap_or(1.0))?
        }
        "logsob" => env::envelope_logsob(c_ls()?, ctx.initial.entropy)?,
        "truncation_logsob" => {
            let phi = phi_of(req, PhiSpec::Log { beta: 1.0 });
            env::envelope_truncation_logsob(c_ls()?, &phi, moment(&phi)?)?
        }
        "truncation_logsob_kopt" => {
            let phi = phi_of(req, PhiSpec::Log { beta: 1.0 });
            env::envelope_truncation_logsob_kopt(c_ls()?, &phi, moment(&phi)?)?
        }
        "weak_logsob" => {
            let phi = phi_of(req, PhiSpec::Power { q: 1.5 });
            let beta = beta_of(req, ctx, BetaFunction::constant(c_ls()?))?;
            let eps = req.num("eps").unwrap_or((-1.0f64).exp());
            env::envelope_weak_logsob(&beta, &phi, moment(&phi)?, eps)?
        }
        "restricted_logsob" => {
            let phi = phi_of(req, PhiSpec::Power { q: 1.5 });
            let beta = beta_of(req, ctx, BetaFunction::power(c_ls()?, 1.0))?;
            env::envelope_restricted_logsob(c_p, &beta, &phi, moment(&phi)?, req.num("c").unwrap_or(1.0))?
        }
        "ipsi" => {
            let c_eta = match req.num("c_eta") {
                Some(c) => c,
                None => ctx
                    .capacity
                    .as_ref()
                    .map(|c| c.c_eta_bound)
                    .ok_or_else(|| missing("C_η (envelope.ipsi.c_eta or a capacity section)"))?,
            };
            let eta = ctx
                .scenario
                .capacity
                .as_ref()
                .map(|c| c.eta.to_eta())
                .or_else(|| ctx.psi.eta().cloned())
                .ok_or_else(|| missing("η (capacity.eta)"))?;
            let em = integrate(&ctx.mu, &ctx.h0.map(|v| eta.eta.eval(v)))?;
            env::envelope_ipsi(c_eta, req.num("m").unwrap_or(1.0), em)?
        }
        "ipsi_tv" => {
            let c_psi = req.num("c_psi").ok_or_else(|| missing("C_ψ (envelope.ipsi_tv.c_psi)"))?;
            let m = match req.num("m") {
                Some(m) => m,
                None => pinsker_constant(&ctx.psi)?,
            };
            let i0 = ctx.initial.i_psi.ok_or_else(|| missing("I_ψ(h₀)"))?;
            env::envelope_ipsi_tv(c_psi, m, i0)?
        }
        "hellinger" => {
            let phi = phi_of(req, PhiSpec::Power { q: 1.5 });
            let beta = beta_of(req, ctx, BetaFunction::constant(c_p))?;
            env::envelope_hellinger(&beta, &phi, moment(&phi)?)?
        }
        "curvature" => {
            let rho = req.num("rho").unwrap_or(ctx.bakry_emery.rho.max(0.0));
            let lifted = matches!(req.beta(), None | Some(BetaSpec::LiftedPoincare));
            let beta = match req.beta() {
                None | Some(BetaSpec::LiftedPoincare) => {
                    BetaFunction::constant(lifted_poincare_constant(&ctx.mu, &ctx.h0)?)
                }
                Some(spec) => spec.to_beta()?.expect("non-lifted β"),
            };
            let e = env::envelope_curvature(rho, &beta)?;
            // TV(h) = 2 TV((1 + h)/2) for the lifted density
            if lifted {
                e.scaled(2.0)
            } else {
                e
            }
        }
        "curvature_sp" => {
            let rho = req.num("rho").unwrap_or(ctx.bakry_emery.rho.max(0.0));
            let beta = beta_of(req, ctx, BetaFunction::constant(c_p))?;
            env::envelope_curvature_sp(rho, &beta)?
        }
        "curvature_closed" => {
            let rho = req.num("rho").unwrap_or(ctx.bakry_emery.rho.max(0.0));
            let beta = beta_of(req, ctx, BetaFunction::power(1.0, 1.0))?;
            env::envelope_curvature_closed(rho, &beta, req.num("c").unwrap_or(1.0))?
        }
        other => return Err(Error::InvalidParameter(format!("unknown envelope '{other}'"))),
    };
    Ok(e)
}

fn build_envelopes(ctx: &Context) -> std::result::Result<Vec<DecayEnvelope>, Failure> {
    ctx.scenario
        .envelopes
        .iter()
        .map(|r| build_envelope(r, ctx).op("build_envelope"))
        .collect()
}

#[derive(Debug, Serialize)]
struct GridMeta {
    n_points: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
}

#[derive(Debug, Serialize)]
struct Provenance {
    tool_version: &'static str,
    command: &'static str,
    seed: u64,
    config: String,
    grid: GridMeta,
}

fn provenance(ctx: &Context, cmd: Command, seed: u64) -> Provenance {
    let n = ctx.mu.len();
    Provenance {
        tool_version: TOOL_VERSION,
        command: cmd.name(),
        seed,
        config: ctx.scenario.to_config_text(),
        grid: GridMeta {
            n_points: n,
            x_min: ctx.mu.grid[0],
            x_max: ctx.mu.grid[n - 1],
            dx: ctx.mu.dx(),
        },
    }
}

#[derive(Debug, Serialize)]
struct ConstantsFile<'a> {
    provenance: Provenance,
    potential: &'a PotentialSpec,
    inequalities: InequalityReport,
    muckenhoupt: MuckenhouptReport,
    rayleigh: Option<RayleighCheck>,
    bakry_emery: BakryEmery,
    c_p_used: f64,
    c_ls_used: Option<f64>,
    psi: serde_json::Value,
    initial: Functionals,
    envelopes: Vec<&'a DecayEnvelope>,
}

fn constants_json(
    ctx: &Context,
    cmd: Command,
    seed: u64,
    envelopes: &[DecayEnvelope],
) -> std::result::Result<String, Failure> {
    let rayleigh = match cmd {
        Command::Analyze => Some(rayleigh_bracket_check(&ctx.mu, ctx.muckenhoupt.b, 50, seed).op("rayleigh_bracket_check")?),
        _ => None,
    };
    let c_pinsker = pinsker_constant(&ctx.psi).ok();
    let file = ConstantsFile {
        provenance: provenance(ctx, cmd, seed),
        potential: &ctx.scenario.potential,
        inequalities: InequalityReport {
            poincare_b: ctx.muckenhoupt.b,
            b_plus: ctx.muckenhoupt.b_plus,
            b_minus: ctx.muckenhoupt.b_minus,
            c_p_interval: ctx.muckenhoupt.c_p_interval,
            spectral_c_p: ctx.spectral_c_p,
            bakry_emery_rho: Some(ctx.bakry_emery.rho),
            c_ls: ctx.bakry_emery.c_ls,
            beta_wp: None,
            beta_wls: None,
            capacity_checks: ctx.capacity.iter().cloned().collect(),
        },
        muckenhoupt: ctx.muckenhoupt,
        rayleigh,
        bakry_emery: ctx.bakry_emery,
        c_p_used: ctx.c_p,
        c_ls_used: ctx.c_ls,
        psi: json!({ "name": ctx.psi.name, "c_pinsker": c_pinsker }),
        initial: ctx.initial,
        envelopes: envelopes.iter().collect(),
    };
    serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Io(e.to_string()))
        .op("write_constants")
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(header: &[String], columns: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let n = columns.first().map(|c| c.len()).unwrap_or(0);
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|c| fmt_num(c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn eval_parallel(envs: &[DecayEnvelope], ts: &[f64]) -> Vec<Vec<f64>> {
    envs.par_iter()
        .map(|e| ts.par_iter().map(|&t| e.eval(t)).collect())
        .collect()
}

/// Simulation columns: the reversed functionals are those of `(1 + h_t)/2`.
fn simulation_columns(series: &DiagnosticsSeries) -> (Vec<String>, Vec<Vec<f64>>) {
    let header = ["t", "tv", "hellinger", "variance", "entropy", "i_psi", "v_reverse", "e_reverse"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let r = &series.records;
    let l = &series.lifted;
    let cols = vec![
        series.times.clone(),
        r.iter().map(|f| f.tv).collect(),
        r.iter().map(|f| f.hellinger).collect(),
        r.iter().map(|f| f.variance).collect(),
        r.iter().map(|f| f.entropy).collect(),
        r.iter().map(|f| f.i_psi.unwrap_or(0.0)).collect(),
        l.iter().map(|f| f.v_reverse.unwrap_or(0.0)).collect(),
        l.iter().map(|f| f.e_reverse.unwrap_or(0.0)).collect(),
    ];
    (header, cols)
}

fn monotone(xs: &[f64], slack: f64) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + slack)
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    oscillation_warning: bool,
    negative_mass_fraction: f64,
    max_mass_drift: f64,
    non_increasing: std::collections::BTreeMap<String, bool>,
}

fn simulation_summary(series: &DiagnosticsSeries) -> SimulationSummary {
    let (header, cols) = simulation_columns(series);
    let non_increasing = header
        .iter()
        .zip(&cols)
        .skip(1)
        .map(|(h, c)| (h.clone(), monotone(c, 1e-6)))
        .collect();
    SimulationSummary {
        oscillation_warning: series.oscillation_warning,
        negative_mass_fraction: series.negative_mass_fraction,
        max_mass_drift: series.mass.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max),
        non_increasing,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeComparison {
    pub name: String,
    pub domination_fraction: f64,
    pub flagged: bool,
    pub bound_log_slope: Option<f64>,
    pub measured_log_slope: Option<f64>,
    pub free_constant: bool,
    pub scale: f64,
    pub valid_from: f64,
}

/// Domination fraction and late-time log-slopes of one envelope against the
/// measured TV curve.
pub fn compare_envelope(e: &DecayEnvelope, bounds: &[f64], times: &[f64], tv: &[f64]) -> EnvelopeComparison {
    let dominated = bounds
        .iter()
        .zip(tv)
        .filter(|(b, m)| **b >= **m * (1.0 - 1e-12))
        .count();
    let frac = dominated as f64 / times.len().max(1) as f64;
    let t_end = times.last().copied().unwrap_or(0.0);
    let fit = |ys: &[f64]| -> Option<f64> {
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(ys)
            .filter(|(t, y)| **t >= 0.25 * t_end && **y > 1e-13 && **y < 2.0)
            .map(|(t, y)| (*t, y.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let (xs, ls): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        Some(linear_fit(&xs, &ls).0)
    };
    EnvelopeComparison {
        name: e.name.clone(),
        domination_fraction: frac,
        flagged: frac < 1.0,
        bound_log_slope: fit(bounds),
        measured_log_slope: fit(tv),
        free_constant: e.free_constant,
        scale: e.scale,
        valid_from: e.valid_from,
    }
}

/// Files produced by one command, keyed by file name.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, String)>,
}

/// Runs a command fully in memory.
pub fn execute(
    command: Command,
    scenario: Scenario,
    t_grid: Option<usize>,
    seed: u64,
) -> std::result::Result<Outputs, Failure> {
    let ctx = build_context(scenario)?;
    let mut out = Outputs::default();
    match command {
        Command::Analyze => {
            out.files.push(("constants.json".into(), constants_json(&ctx, command, seed, &[])?));
        }
        Command::Bounds => {
            let envs = build_envelopes(&ctx)?;
            let b = ctx.scenario.bounds;
            let ts = log_space(b.t_min, b.t_max, t_grid.unwrap_or(b.n).max(2));
            let mut header = vec!["t".to_string()];
            header.extend(envs.iter().map(|e| format!("bound_{}", e.name)));
            let mut cols = vec![ts.clone()];
            cols.extend(eval_parallel(&envs, &ts));
            out.files.push(("constants.json".into(), constants_json(&ctx, command, seed, &envs)?));
            out.files.push(("curves.csv".into(), write_csv(&header, &cols)));
        }
        Command::Simulate => {
            let series = evolve(&ctx.mu, &ctx.h0, &ctx.scenario.sim, Some(&ctx.psi)).op("evolve")?;
            let (header, cols) = simulation_columns(&series);
            out.files.push(("curves.csv".into(), write_csv(&header, &cols)));
            let summary = json!({
                "provenance": provenance(&ctx, command, seed),
                "simulation": simulation_summary(&series),
            });
            out.files.push(("summary.json".into(), pretty(&summary)?));
        }
        Command::Compare => {
            let series = evolve(&ctx.mu, &ctx.h0, &ctx.scenario.sim, Some(&ctx.psi)).op("evolve")?;
            let tv0 = ctx.initial.tv;
            let envs: Vec<DecayEnvelope> = build_envelopes(&ctx)?
                .into_iter()
                .map(|e| e.calibrate(tv0))
                .collect();
            let (mut header, mut cols) = simulation_columns(&series);
            let ts = series.times.clone();
            let bounds = eval_parallel(&envs, &ts);
            let tv = cols[1].clone();
            let comparisons: Vec<EnvelopeComparison> = envs
                .iter()
                .zip(&bounds)
                .map(|(e, b)| compare_envelope(e, b, &ts, &tv))
                .collect();
            header.extend(envs.iter().map(|e| format!("bound_{}", e.name)));
            cols.extend(bounds);
            out.files.push(("constants.json".into(), constants_json(&ctx, command, seed, &envs)?));
            out.files.push(("curves.csv".into(), write_csv(&header, &cols)));
            let summary = json!({
                "provenance": provenance(&ctx, command, seed),
                "c_p_used": ctx.c_p,
                "c_ls_used": ctx.c_ls,
                "envelopes": comparisons,
                "all_dominated": comparisons.iter().all(|c| !c.flagged),
                "simulation": simulation_summary(&series),
            });
            out.files.push(("summary.json".into(), pretty(&summary)?));
        }
    }
    Ok(out)
}

fn pretty(v: &serde_json::Value) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map_err(|e| Error::Io(e.to_string()))
        .op("write_summary")
}

/// Reads the config, runs the command and writes its files into `opts.out`.
pub fn run(opts: &RunOptions) -> std::result::Result<Vec<PathBuf>, Failure> {
    configure_threads();
    let scenario = Scenario::from_file(&opts.config).op("read_config")?;
    let outputs = execute(opts.command, scenario, opts.t_grid, opts.seed)?;
    write_outputs(&opts.out, &outputs).op("write_outputs")
}

pub fn write_outputs(dir: &Path, outputs: &Outputs) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, body) in &outputs.files {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
    }
    Ok(written)
}

/// One-line human summary of a compare run, used by the binary.
pub fn describe(outputs: &Outputs) -> String {
    let mut s = String::new();
    for (name, body) in &outputs.files {
        let _ = writeln!(s, "{name}: {} bytes", body.len());
    }
    s
}
