//! Finite-difference Fokker–Planck flow `∂_t h = ½h″ − V′h′` for densities
//! with respect to `μ`, the exact Ornstein–Uhlenbeck oracle, and the
//! diagnostics recorded along a run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    check_density, functionals_unchecked, Functionals, GridFunction, PotentialFamily,
    ProbabilityMeasure1D,
};
use crate::numerics::solve_tridiagonal;
use crate::psi::PsiProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub save_every: usize,
    pub positivity_floor: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            t_end: 5.0,
            scheme: Scheme::ImplicitEuler,
            save_every: 10,
            positivity_floor: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} must be >= dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.save_every == 0 {
            return Err(Error::InvalidParameter("save_every must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Divergence-form discretisation of `L` on the nodes of `μ`:
/// `(Lh)_i = (a₊(h_{i+1} − h_i) − a₋(h_i − h_{i−1})) / (2 w_i dx)`,
/// where `a` are harmonic means of the pdf on faces and `w` the trapezoid
/// weights. Constants are annihilated exactly and `Σ w_i (Lh)_i = 0`.
#[derive(Debug, Clone)]
pub struct DiffusionOperator {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// face weights `a_{i+1/2}`, length `n − 1`
    pub faces: Vec<f64>,
    pub weights: Vec<f64>,
    pub dx: f64,
}

impl DiffusionOperator {
    pub fn new(mu: &ProbabilityMeasure1D) -> Self {
        let n = mu.len();
        let dx = mu.dx();
        let faces: Vec<f64> = mu
            .pdf
            .windows(2)
            .map(|p| 2.0 * p[0] * p[1] / (p[0] + p[1]))
            .collect();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let scale = 1.0 / (2.0 * mu.weights[i] * dx);
            if i > 0 {
                lower[i] = faces[i - 1] * scale;
            }
            if i + 1 < n {
                upper[i] = faces[i] * scale;
            }
        }
        DiffusionOperator {
            lower,
            upper,
            faces,
            weights: mu.weights.clone(),
            dx,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = 0.0;
                if i > 0 {
                    v += self.lower[i] * (h[i - 1] - h[i]);
                }
                if i + 1 < n {
                    v += self.upper[i] * (h[i + 1] - h[i]);
                }
                v
            })
            .collect()
    }

    /// Solves `(I − τL) x = rhs`.
    pub fn solve_resolvent(&self, tau: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let sub: Vec<f64> = self.lower.iter().map(|l| -tau * l).collect();
        let sup: Vec<f64> = self.upper.iter().map(|u| -tau * u).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| 1.0 + tau * (self.lower[i] + self.upper[i]))
            .collect();
        solve_tridiagonal(&sub, &diag, &sup, rhs)
    }

    /// `Σ_faces a (Δf)²/dx`, the discrete `∫ |f′|² dμ`.
    pub fn energy(&self, f: &[f64]) -> f64 {
        self.faces
            .iter()
            .zip(f.windows(2))
            .map(|(a, w)| a * (w[1] - w[0]) * (w[1] - w[0]))
            .sum::<f64>()
            / self.dx
    }

    /// `½ Σ_faces ψ″(face mean)·a·(Δh)²/dx`, the discrete `½∫ψ″(h)Γ(h)dμ`.
    pub fn psi_dissipation(&self, h: &[f64], psi: &PsiProfile) -> f64 {
        0.5 * self
            .faces
            .iter()
            .zip(h.windows(2))
            .map(|(a, w)| {
                let d = w[1] - w[0];
                a * psi.psi_second(0.5 * (w[0] + w[1])) * d * d
            })
            .sum::<f64>()
            / self.dx
    }

    /// Weighted mean `Σ w f`.
    pub fn mean(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

/// Time stepper for one run. Crank–Nicolson starts with four implicit Euler
/// half steps to damp the high modes of rough initial data.
#[derive(Debug, Clone)]
pub struct Propagator {
    op: DiffusionOperator,
    dt: f64,
    scheme: Scheme,
    steps_done: usize,
}

impl Propagator {
    pub fn new(mu: &ProbabilityMeasure1D, dt: f64, scheme: Scheme) -> Self {
        Propagator {
            op: DiffusionOperator::new(mu),
            dt,
            scheme,
            steps_done: 0,
        }
    }

    pub fn operator(&self) -> &DiffusionOperator {
        &self.op
    }

    pub fn step(&mut self, h: &mut Vec<f64>) {
        match self.scheme {
            Scheme::ImplicitEuler => {
                *h = self.op.solve_resolvent(self.dt, h);
            }
            Scheme::CrankNicolson if self.steps_done < 2 => {
                for _ in 0..2 {
                    *h = self.op.solve_resolvent(0.5 * self.dt, h);
                }
            }
            Scheme::CrankNicolson => {
                let lh = self.op.apply(h);
                let rhs: Vec<f64> = h
                    .iter()
                    .zip(&lh)
                    .map(|(v, l)| v + 0.5 * self.dt * l)
                    .collect();
                *h = self.op.solve_resolvent(0.5 * self.dt, &rhs);
            }
        }
        self.steps_done += 1;
    }

    /// Advances `h` by `n` steps.
    pub fn advance(&mut self, h: &mut Vec<f64>, n: usize) {
        for _ in 0..n {
            self.step(h);
        }
    }
}

/// Evolves `h0` to time `t` and returns the final state.
pub fn propagate(
    mu: &ProbabilityMeasure1D,
    h0: &GridFunction,
    t: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<GridFunction> {
    check_density(mu, h0)?;
    let mut p = Propagator::new(mu, dt, scheme);
    let mut h = h0.values.clone();
    p.advance(&mut h, (t / dt).round() as usize);
    Ok(GridFunction::new(h))
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub records: Vec<Functionals>,
    /// functionals of `(1 + h_t)/2`, for which the reversed quantities exist
    pub lifted: Vec<Functionals>,
    pub min_h: Vec<f64>,
    pub mass: Vec<f64>,
    /// centred difference of `I_ψ`, `None` at the first and last saves
    pub dissipation_lhs: Vec<Option<f64>>,
    /// `½∫ψ″(h)Γ(h)dμ`
    pub dissipation_rhs: Vec<Option<f64>>,
    /// largest fraction of negative mass produced by a step (Crank–Nicolson only)
    pub negative_mass_fraction: f64,
    pub oscillation_warning: bool,
    #[serde(skip)]
    pub final_state: GridFunction,
}

impl DiagnosticsSeries {
    pub fn column(&self, f: impl Fn(&Functionals) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}

/// Runs the flow and records every functional every `save_every` steps.
pub fn evolve(
    mu: &ProbabilityMeasure1D,
    h0: &GridFunction,
    config: &SimConfig,
    psi: Option<&PsiProfile>,
) -> Result<DiagnosticsSeries> {
    config.validate()?;
    check_density(mu, h0)?;
    let mut prop = Propagator::new(mu, config.dt, config.scheme);
    let mut h = h0.values.clone();
    let n_steps = config.n_steps();
    let mut series = DiagnosticsSeries {
        times: Vec::new(),
        records: Vec::new(),
        lifted: Vec::new(),
        min_h: Vec::new(),
        mass: Vec::new(),
        dissipation_lhs: Vec::new(),
        dissipation_rhs: Vec::new(),
        negative_mass_fraction: 0.0,
        oscillation_warning: false,
        final_state: GridFunction::new(Vec::new()),
    };
    let record = |series: &mut DiagnosticsSeries, t: f64, h: &[f64], op: &DiffusionOperator| {
        let g = GridFunction::new(h.to_vec());
        series.times.push(t);
        series.records.push(functionals_unchecked(mu, &g, psi));
        let lifted = g.map(|v| 0.5 * (1.0 + v));
        series.lifted.push(functionals_unchecked(mu, &lifted, None));
        series.min_h.push(h.iter().cloned().fold(f64::INFINITY, f64::min));
        series.mass.push(op.mean(h));
        series
            .dissipation_rhs
            .push(psi.map(|p| op.psi_dissipation(h, p)));
    };
    record(&mut series, 0.0, &h, &prop.op);
    for step in 1..=n_steps {
        prop.step(&mut h);
        if config.scheme == Scheme::CrankNicolson {
            let neg: f64 = prop
                .op
                .weights
                .iter()
                .zip(&h)
                .filter(|(_, v)| **v < 0.0)
                .map(|(w, v)| -w * v)
                .sum();
            series.negative_mass_fraction = series.negative_mass_fraction.max(neg);
        }
        if config.positivity_floor > 0.0 {
            for v in h.iter_mut() {
                if *v < config.positivity_floor {
                    *v = config.positivity_floor;
                }
            }
        }
        if step % config.save_every == 0 || step == n_steps {
            record(&mut series, step as f64 * config.dt, &h, &prop.op);
        }
    }
    series.oscillation_warning = series.negative_mass_fraction > 1e-6;
    let n = series.times.len();
    series.dissipation_lhs = (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                return None;
            }
            let a = series.records[i - 1].i_psi?;
            let b = series.records[i + 1].i_psi?;
            Some((b - a) / (series.times[i + 1] - series.times[i - 1]))
        })
        .collect();
    series.final_state = GridFunction::new(h);
    Ok(series)
}

/// `true` when `μ` is the Gaussian `V(x) = x²/2`.
pub fn is_standard_gaussian(mu: &ProbabilityMeasure1D) -> bool {
    let f = mu.spec.factor;
    match mu.spec.family {
        PotentialFamily::Gaussian { variance } => (variance / f - 0.5).abs() < 1e-12,
        PotentialFamily::Power { alpha, scale } => alpha == 2.0 && (scale * f - 0.5).abs() < 1e-12,
        _ => false,
    }
}

/// Exact Ornstein–Uhlenbeck evolution through the Mehler kernel
/// `p_t(x, y) = (π(1 − e^{−2t}))^{−1/2} exp(−(y − x e^{−t})²/(1 − e^{−2t}))`,
/// integrated against `h0` by the trapezoid rule.
pub fn ou_exact_evolve(mu: &ProbabilityMeasure1D, h0: &GridFunction, t: f64) -> Result<GridFunction> {
    if !is_standard_gaussian(mu) {
        return Err(Error::WrongMeasure(format!("{:?}", mu.spec.family)));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    if h0.len() != mu.len() {
        return Err(Error::GridMismatch {
            expected: mu.len(),
            got: h0.len(),
        });
    }
    let n = mu.len();
    let dx = mu.dx();
    let e = (-t).exp();
    let var2 = -(-2.0 * t).exp_m1();
    let norm = 1.0 / (std::f64::consts::PI * var2).sqrt();
    let cutoff = (40.0 * var2).sqrt();
    let xs = &mu.grid;
    let values: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let c = x * e;
            let lo = xs.partition_point(|&y| y < c - cutoff);
            let hi = xs.partition_point(|&y| y <= c + cutoff);
            let mut acc = 0.0;
            for j in lo..hi {
                let d = xs[j] - c;
                let w = if j == 0 || j == n - 1 { 0.5 * dx } else { dx };
                acc += w * (-d * d / var2).exp() * h0.values[j];
            }
            norm * acc
        })
        .collect();
    Ok(GridFunction::new(values))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReverseReport {
    pub times: Vec<f64>,
    pub v: Vec<f64>,
    pub e: Vec<f64>,
    pub v_monotone: bool,
    pub e_monotone: bool,
    /// `TV ≤ √V(t)` at every save
    pub tv_below_sqrt_v: bool,
    /// `TV ≤ √(2E(t))` at every save
    pub tv_below_sqrt_2e: bool,
}

/// Reversed functionals `V(t) = ∫1/h_t dμ − 1` and `E(t) = −∫log h_t dμ`
/// along a run started from a density bounded below by 1/2.
pub fn reverse_diagnostics(series: &DiagnosticsSeries, slack: f64) -> Result<ReverseReport> {
    let mut v = Vec::with_capacity(series.times.len());
    let mut e = Vec::with_capacity(series.times.len());
    for (rec, &m) in series.records.iter().zip(&series.min_h) {
        if m < 0.5 - 1e-9 {
            return Err(Error::LowerBoundViolated(m));
        }
        v.push(rec.v_reverse.ok_or(Error::LowerBoundViolated(m))?);
        e.push(rec.e_reverse.ok_or(Error::LowerBoundViolated(m))?);
    }
    let mono = |xs: &[f64]| xs.windows(2).all(|w| w[1] <= w[0] + slack);
    let tvs: Vec<f64> = series.records.iter().map(|r| r.tv).collect();
    Ok(ReverseReport {
        times: series.times.clone(),
        v_monotone: mono(&v),
        e_monotone: mono(&e),
        tv_below_sqrt_v: tvs.iter().zip(&v).all(|(tv, v)| *tv <= v.max(0.0).sqrt() + 1e-9),
        tv_below_sqrt_2e: tvs.iter().zip(&e).all(|(tv, e)| *tv <= (2.0 * e.max(0.0)).sqrt() + 1e-9),
        v,
        e,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub violations: usize,
}

/// Runs two densities side by side and counts saves where `∫|h_t − g_t|dμ`
/// increases by more than `1e-8`.
pub fn contraction_check(
    mu: &ProbabilityMeasure1D,
    h0: &GridFunction,
    g0: &GridFunction,
    config: &SimConfig,
) -> Result<ContractionReport> {
    config.validate()?;
    check_density(mu, h0)?;
    check_density(mu, g0)?;
    let mut ph = Propagator::new(mu, config.dt, config.scheme);
    let mut pg = ph.clone();
    let mut h = h0.values.clone();
    let mut g = g0.values.clone();
    let dist = |h: &[f64], g: &[f64]| -> f64 {
        mu.weights
            .iter()
            .zip(h.iter().zip(g))
            .map(|(w, (a, b))| w * (a - b).abs())
            .sum()
    };
    let mut times = vec![0.0];
    let mut distances = vec![dist(&h, &g)];
    let n_steps = config.n_steps();
    for step in 1..=n_steps {
        ph.step(&mut h);
        pg.step(&mut g);
        if step % config.save_every == 0 || step == n_steps {
            times.push(step as f64 * config.dt);
            distances.push(dist(&h, &g));
        }
    }
    let violations = distances.windows(2).filter(|w| w[1] > w[0] + 1e-8).count();
    Ok(ContractionReport {
        times,
        distances,
        violations,
    })
}

/// Standard initial densities, all normalised to unit `μ`-mass.
pub mod initial {
    use super::*;

    /// `(1 + ε (x − m)/σ)₊` with `m`, `σ²` the mean and variance of `μ`.
    pub fn eigen_perturbation(mu: &ProbabilityMeasure1D, eps: f64) -> Result<GridFunction> {
        let x = GridFunction::from_fn(mu, |x| x);
        let m = crate::measure::integrate(mu, &x)?;
        let var = crate::measure::integrate(mu, &x.map(|v| (v - m) * (v - m)))?;
        let sd = var.sqrt();
        GridFunction::from_fn(mu, |x| (1.0 + eps * (x - m) / sd).max(0.0)).normalized(mu)
    }

    /// `2·1_{x > median}`, with the value 1 on a node equal to the median.
    pub fn step(mu: &ProbabilityMeasure1D) -> Result<GridFunction> {
        let m = mu.median;
        let tol = 1e-12 * mu.dx();
        GridFunction::from_fn(mu, |x| {
            if (x - m).abs() <= tol {
                1.0
            } else if x > m {
                2.0
            } else {
                0.0
            }
        })
        .normalized(mu)
    }

    /// Ratio of the translate `μ(· − shift)` to `μ`.
    pub fn shifted(mu: &ProbabilityMeasure1D, shift: f64) -> Result<GridFunction> {
        let spec = &mu.spec;
        GridFunction::from_fn(mu, |x| (-2.0 * (spec.v(x - shift) - spec.v(x))).exp()).normalized(mu)
    }

    /// `min(g/pdf, cap)` for the Lebesgue density `g ∝ (1 + |x|)^{−(1+p)}`.
    pub fn tail_ratio(mu: &ProbabilityMeasure1D, p: f64, cap: f64) -> Result<GridFunction> {
        if !(p > 0.0) || !(cap > 1.0) {
            return Err(Error::InvalidParameter(format!("tail_ratio needs p>0, cap>1 (p={p}, cap={cap})")));
        }
        let g: Vec<f64> = mu.grid.iter().map(|x| (1.0 + x.abs()).powf(-(1.0 + p))).collect();
        let dx = mu.dx();
        let n = g.len();
        let z = dx * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[n - 1]));
        let values = g
            .iter()
            .zip(&mu.pdf)
            .map(|(gi, pi)| (gi / z / pi).min(cap))
            .collect();
        GridFunction::new(values).normalized(mu)
    }

    /// `(1 + h)/2`, bounded below by 1/2.
    pub fn lift(h: &GridFunction) -> GridFunction {
        h.map(|v| 0.5 * (1.0 + v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_measure, PotentialSpec};

    #[test]
    fn constants_are_stationary() {
        let mu = build_measure(&PotentialSpec::standard_gaussian(), 401, 1e-16).unwrap();
        let op = DiffusionOperator::new(&mu);
        let l1 = op.apply(&vec![1.0; mu.len()]);
        assert!(l1.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn mass_is_conserved() {
        let mu = build_measure(&PotentialSpec::standard_gaussian(), 801, 1e-16).unwrap();
        let h0 = initial::step(&mu).unwrap();
        let h = propagate(&mu, &h0, 1.0, 1e-2, Scheme::ImplicitEuler).unwrap();
        let m = crate::measure::integrate(&mu, &h).unwrap();
        assert!((m - 1.0).abs() < 1e-10);
        assert!(h.values.iter().all(|v| *v >= 0.0));
    }
}
