//! Constants and β-functions of Poincaré, log-Sobolev, weak and
//! capacity-type inequalities for one-dimensional measures.
//!
//! Convention throughout: `Var_μ(f) ≤ C_P ∫|f′|² dμ` and
//! `Ent_μ(f²) ≤ C_LS ∫|f′|² dμ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{GridFunction, PotentialSpec, ProbabilityMeasure1D};
use crate::numerics::{cumulative_gl, gauss_legendre5, log_space, minimize_scan, ScalarFn};
use crate::psi::EtaProfile;
use crate::sim::DiffusionOperator;

/// Non-increasing positive function on `(0, s_max]`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BetaFunction {
    /// `c·s^{−q}`
    Power { c: f64, q: f64 },
    /// `d·log(s₀/s)^r`
    LogPower { d: f64, r: f64, s0: f64 },
    /// log-log interpolation of a table, monotonised from the right
    Tabulated {
        s: Vec<f64>,
        beta: Vec<f64>,
        violations: usize,
    },
    Constant { c: f64 },
    Custom {
        name: String,
        #[serde(skip)]
        f: ScalarFn,
    },
}

impl BetaFunction {
    pub fn power(c: f64, q: f64) -> Self {
        BetaFunction::Power { c, q }
    }

    pub fn constant(c: f64) -> Self {
        BetaFunction::Constant { c }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        BetaFunction::Custom {
            name: name.into(),
            f: ScalarFn::new(f),
        }
    }

    /// Builds a tabulated β, replacing each value by the running maximum
    /// from the right.
    pub fn tabulated(s: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if s.len() != beta.len() || s.len() < 2 {
            return Err(Error::InvalidParameter("tabulated β needs two equal-length columns".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) || s[0] <= 0.0 {
            return Err(Error::InvalidParameter("β abscissae must be positive and increasing".into()));
        }
        if beta.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter("β values must be positive and finite".into()));
        }
        let mut mono = beta.clone();
        let mut violations = 0;
        for i in (0..mono.len() - 1).rev() {
            if mono[i] < mono[i + 1] {
                violations += 1;
                mono[i] = mono[i + 1];
            }
        }
        Ok(BetaFunction::Tabulated {
            s,
            beta: mono,
            violations,
        })
    }

    pub fn name(&self) -> String {
        match self {
            BetaFunction::Power { c, q } => format!("power(c={c}, q={q})"),
            BetaFunction::LogPower { d, r, s0 } => format!("logpower(d={d}, r={r}, s0={s0})"),
            BetaFunction::Tabulated { s, .. } => format!("tabulated({} points)", s.len()),
            BetaFunction::Constant { c } => format!("constant({c})"),
            BetaFunction::Custom { name, .. } => name.clone(),
        }
    }

    /// Right end of the domain.
    pub fn s_max(&self) -> f64 {
        match self {
            BetaFunction::LogPower { s0, .. } => *s0,
            _ => f64::INFINITY,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            BetaFunction::Constant { .. } => true,
            BetaFunction::Power { q, .. } => *q == 0.0,
            BetaFunction::LogPower { r, .. } => *r == 0.0,
            _ => false,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            BetaFunction::Power { c, q } => c * s.powf(-q),
            BetaFunction::LogPower { d, r, s0 } => {
                if *r == 0.0 {
                    *d
                } else {
                    d * (s0 / s).ln().max(0.0).powf(*r)
                }
            }
            BetaFunction::Constant { c } => *c,
            BetaFunction::Custom { f, .. } => f.eval(s),
            BetaFunction::Tabulated { s: xs, beta, .. } => {
                let n = xs.len();
                let seg = |i: usize| {
                    let (x0, x1) = (xs[i].ln(), xs[i + 1].ln());
                    let (y0, y1) = (beta[i].ln(), beta[i + 1].ln());
                    let t = (s.ln() - x0) / (x1 - x0);
                    (y0 + t * (y1 - y0)).exp()
                };
                if s >= xs[n - 1] {
                    beta[n - 1]
                } else if s <= xs[0] {
                    seg(0)
                } else {
                    let i = xs.partition_point(|&x| x <= s) - 1;
                    seg(i.min(n - 2))
                }
            }
        }
    }

    /// Counts strict increases over `pairs` log-uniform sample pairs in
    /// `[lo, hi]`.
    pub fn monotonicity_violations(&self, lo: f64, hi: f64, pairs: usize) -> usize {
        let hi = hi.min(self.s_max());
        let xs = log_space(lo, hi, pairs + 1);
        xs.windows(2)
            .filter(|w| self.eval(w[1]) > self.eval(w[0]) * (1.0 + 1e-12))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuckenhouptReport {
    pub b_plus: f64,
    pub b_minus: f64,
    pub b: f64,
    /// maximisers of the two sups
    pub x_plus: f64,
    pub x_minus: f64,
    pub c_p_interval: [f64; 2],
}

/// Tail integrals of `μ` computed with Gauss–Legendre on the grid cells and
/// an asymptotic correction for the mass outside the grid.
struct TailData {
    /// `μ([x_i, ∞))`
    right: Vec<f64>,
    /// `μ((−∞, x_i])`
    left: Vec<f64>,
    /// `∫_m^{x_i} 1/p`, signed so that it is non-negative on both sides
    inv_pdf: Vec<f64>,
}

fn tail_data(mu: &ProbabilityMeasure1D) -> Result<TailData> {
    let spec = &mu.spec;
    let n = mu.len();
    let lz = mu.log_partition;
    let pdf = |x: f64| (-2.0 * spec.v(x) - lz).exp();
    let inv = |x: f64| (2.0 * spec.v(x) + lz).exp();
    for (i, &p) in mu.pdf.iter().enumerate().take(n - 1).skip(1) {
        let q = pdf(mu.grid[i]);
        if !(p > 0.0) || !(q > 1e-300) || !inv(mu.grid[i]).is_finite() {
            return Err(Error::VanishingDensity(mu.grid[i]));
        }
    }
    let cum = cumulative_gl(pdf, &mu.grid);
    let total = cum[n - 1];
    let beyond = |x: f64, sign: f64| {
        let d = sign * spec.dv(x);
        if d > 0.0 {
            pdf(x) / (2.0 * d)
        } else {
            0.0
        }
    };
    let (xl, xr) = (mu.grid[0], mu.grid[n - 1]);
    let extra_r = beyond(xr, 1.0);
    let extra_l = beyond(xl, -1.0);
    let right: Vec<f64> = cum.iter().map(|c| total - c + extra_r).collect();
    let left: Vec<f64> = cum.iter().map(|c| c + extra_l).collect();

    let m = mu.median;
    let k = mu.grid.partition_point(|&x| x < m);
    let mut inv_pdf = vec![0.0; n];
    // right of the median
    if k < n {
        inv_pdf[k] = gauss_legendre5(inv, m, mu.grid[k]);
        for i in k + 1..n {
            inv_pdf[i] = inv_pdf[i - 1] + gauss_legendre5(inv, mu.grid[i - 1], mu.grid[i]);
        }
    }
    if k > 0 {
        inv_pdf[k - 1] = gauss_legendre5(inv, mu.grid[k - 1], m);
        for i in (0..k - 1).rev() {
            inv_pdf[i] = inv_pdf[i + 1] + gauss_legendre5(inv, mu.grid[i], mu.grid[i + 1]);
        }
    }
    Ok(TailData {
        right,
        left,
        inv_pdf,
    })
}

/// Argmax of `vals` with a parabolic correction through the neighbours.
fn refined_sup(xs: &[f64], vals: &[f64]) -> (f64, f64) {
    let (i, &v) = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap_or((0, &0.0));
    if i == 0 || i + 1 >= vals.len() {
        return (xs[i], v);
    }
    let (a, b, c) = (vals[i - 1], v, vals[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return (xs[i], v);
    }
    let off = 0.5 * (a - c) / denom;
    let h = xs[i + 1] - xs[i];
    (xs[i] + off * h, b - 0.25 * (a - c) * off)
}

/// Two-sided Muckenhoupt criterion: `B_± = sup μ(tail)·∫_m^x 1/p` over both
/// sides of the median, with `B ≤ C_P ≤ 4B`.
pub fn muckenhoupt_poincare(mu: &ProbabilityMeasure1D) -> Result<MuckenhouptReport> {
    hardy_sups(mu, &|_| 1.0).map(|(bp, xp, bm, xm)| {
        let b = bp.max(bm);
        MuckenhouptReport {
            b_plus: bp,
            b_minus: bm,
            b,
            x_plus: xp,
            x_minus: xm,
            c_p_interval: [b, 4.0 * b],
        }
    })
}

/// `sup_{x>m} μ([x,∞))F(1/μ([x,∞)))∫_m^x 1/p` and its mirror image.
fn hardy_sups(mu: &ProbabilityMeasure1D, f: &dyn Fn(f64) -> f64) -> Result<(f64, f64, f64, f64)> {
    let td = tail_data(mu)?;
    let m = mu.median;
    let n = mu.len();
    let mut right = vec![f64::NEG_INFINITY; n];
    let mut left = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        let x = mu.grid[i];
        if x > m {
            let t = td.right[i];
            right[i] = t * f(1.0 / t) * td.inv_pdf[i];
        } else if x < m {
            let t = td.left[i];
            left[i] = t * f(1.0 / t) * td.inv_pdf[i];
        }
    }
    let (xp, bp) = refined_sup(&mu.grid, &right);
    let (xm, bm) = refined_sup(&mu.grid, &left);
    Ok((bp, xp, bm, xm))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralGap {
    /// smallest non-zero eigenvalue of `−L` on the grid
    pub lambda1: f64,
    /// `1/(2λ₁)`
    pub c_p: f64,
    #[serde(skip)]
    pub eigenfunction: GridFunction,
    pub iterations: usize,
}

/// Discrete Poincaré constant from inverse iteration on `(I − τL)`
/// restricted to mean-zero functions.
pub fn discrete_poincare_constant(mu: &ProbabilityMeasure1D) -> SpectralGap {
    let op = DiffusionOperator::new(mu);
    let tau = 1e3;
    let project = |f: &mut Vec<f64>| {
        let m = op.mean(f);
        let mut norm = 0.0;
        for v in f.iter_mut() {
            *v -= m;
        }
        for (w, v) in op.weights.iter().zip(f.iter()) {
            norm += w * v * v;
        }
        let s = 1.0 / norm.sqrt();
        for v in f.iter_mut() {
            *v *= s;
        }
    };
    let mut f: Vec<f64> = mu.grid.iter().map(|x| x + 0.1 * x * x).collect();
    project(&mut f);
    let rq = |f: &[f64]| 0.5 * op.energy(f);
    let mut lambda = rq(&f);
    let mut iterations = 0;
    for it in 0..500 {
        f = op.solve_resolvent(tau, &f);
        project(&mut f);
        let l = rq(&f);
        iterations = it + 1;
        let done = (l - lambda).abs() <= 1e-14 * l;
        lambda = l;
        if done {
            break;
        }
    }
    SpectralGap {
        lambda1: lambda,
        c_p: 1.0 / (2.0 * lambda),
        eigenfunction: GridFunction::new(f),
        iterations,
    }
}

/// `Var_μ(f) / ∫|f′|²dμ`, a certified lower bound for `C_P`.
pub fn poincare_ratio(mu: &ProbabilityMeasure1D, f: &GridFunction) -> Result<f64> {
    if f.len() != mu.len() {
        return Err(Error::GridMismatch {
            expected: mu.len(),
            got: f.len(),
        });
    }
    let op = DiffusionOperator::new(mu);
    let m = op.mean(&f.values);
    let var: f64 = op
        .weights
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * (v - m) * (v - m))
        .sum();
    let energy = op.energy(&f.values);
    if energy <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(var / energy)
}

#[derive(Debug, Clone, Serialize)]
pub struct RayleighCheck {
    pub n_functions: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// no trial function exceeds `4B`
    pub upper_consistent: bool,
    /// some trial function reaches `0.9·B`
    pub lower_certified: bool,
}

/// Evaluates `Var/∫|f′|²` on `n_random` random piecewise-linear functions
/// plus the discrete first eigenfunction and compares with `[B, 4B]`.
pub fn rayleigh_bracket_check(
    mu: &ProbabilityMeasure1D,
    b: f64,
    n_random: usize,
    seed: u64,
) -> Result<RayleighCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = quantile(mu, 0.005);
    let hi = quantile(mu, 0.995);
    let mut ratios = Vec::with_capacity(n_random + 1);
    for _ in 0..n_random {
        let k = rng.gen_range(3..10);
        let knots = crate::numerics::linspace(lo, hi, k);
        let vals: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = GridFunction::from_fn(mu, |x| piecewise_linear(&knots, &vals, x));
        if let Ok(r) = poincare_ratio(mu, &f) {
            ratios.push(r);
        }
    }
    let gap = discrete_poincare_constant(mu);
    ratios.push(poincare_ratio(mu, &gap.eigenfunction)?);
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RayleighCheck {
        n_functions: ratios.len(),
        max_ratio,
        min_ratio,
        upper_consistent: max_ratio <= 4.0 * b * (1.0 + 1e-9),
        lower_certified: max_ratio >= 0.9 * b,
    })
}

fn quantile(mu: &ProbabilityMeasure1D, q: f64) -> f64 {
    let total = mu.cdf[mu.len() - 1];
    let i = mu.cdf.partition_point(|&c| c < q * total).min(mu.len() - 1);
    mu.grid[i]
}

fn piecewise_linear(knots: &[f64], vals: &[f64], x: f64) -> f64 {
    if x <= knots[0] {
        return vals[0];
    }
    let n = knots.len();
    if x >= knots[n - 1] {
        return vals[n - 1];
    }
    let i = knots.partition_point(|&k| k <= x) - 1;
    let t = (x - knots[i]) / (knots[i + 1] - knots[i]);
    vals[i] + t * (vals[i + 1] - vals[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BakryEmery {
    pub rho: f64,
    pub c_ls: Option<f64>,
}

/// `ρ = inf v″` over `grid` and `C_LS = e^{osc(w)}/ρ` when `ρ > 0`.
pub fn bakry_emery(v: &PotentialSpec, w_osc: f64, grid: &[f64]) -> Result<BakryEmery> {
    v.validate()?;
    if !(w_osc >= 0.0) {
        return Err(Error::InvalidParameter(format!("osc(w) = {w_osc} must be >= 0")));
    }
    let h = if grid.len() > 1 { (grid[1] - grid[0]).abs() * 0.5 } else { 1e-4 };
    let rho = grid
        .iter()
        .map(|&x| v.d2v(x, h))
        .fold(f64::INFINITY, f64::min);
    Ok(BakryEmery {
        rho,
        c_ls: (rho > 0.0).then(|| w_osc.exp() / rho),
    })
}

/// `β(s) = d·log(2/s)^{2p/(1+p)}` for drifts with `x·b(x) ≤ −r|x|^{1−p}`.
pub fn drift_tail_beta(p: f64, d: f64) -> Result<BetaFunction> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BadExponent(format!("p = {p} must lie in (0, 1)")));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("d = {d} must be positive")));
    }
    Ok(BetaFunction::LogPower {
        d,
        r: 2.0 * p / (1.0 + p),
        s0: 2.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TailBetaReport {
    pub b_small: f64,
    pub b_large: f64,
    pub accepted: bool,
    /// admissible range of the constant `C` in `β_WP = C·β`
    pub c_range: [f64; 2],
    pub argmax_small: f64,
    pub argmax_large: f64,
}

/// Weak Poincaré data for `ν ∝ g dx` with symmetric `g`: the sups
/// `b = sup ν([x,∞))/β(ν([x,∞))/4)·∫₀ˣ 1/g` and
/// `B = sup ν([x,∞))/β(ν([x,∞)))·∫₀ˣ 1/g`.
pub fn weak_poincare_beta_from_tails(x: &[f64], g: &[f64], beta: &BetaFunction) -> Result<TailBetaReport> {
    let n = x.len();
    if n != g.len() || n < 21 {
        return Err(Error::InvalidParameter("need at least 21 matching (x, g) samples".into()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("x must be increasing".into()));
    }
    if g.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("g must be positive and finite".into()));
    }
    for i in 0..n {
        let j = n - 1 - i;
        let scale = x[i].abs().max(x[j].abs()).max(1.0);
        let gs = g[i].abs().max(g[j].abs());
        if (x[i] + x[j]).abs() > 1e-9 * scale || (g[i] - g[j]).abs() > 1e-9 * gs {
            return Err(Error::AsymmetricInput(format!("mismatch at x = {}", x[i])));
        }
    }
    // right half, starting at 0
    let k = x.partition_point(|&v| v < 0.0);
    let xr: Vec<f64> = x[k..].to_vec();
    let gr: Vec<f64> = g[k..].to_vec();
    if xr[0].abs() > 1e-12 {
        return Err(Error::InvalidParameter("the grid must contain x = 0".into()));
    }
    let m = xr.len();
    let mut tail = vec![0.0; m];
    for i in (0..m - 1).rev() {
        tail[i] = tail[i + 1] + 0.5 * (xr[i + 1] - xr[i]) * (gr[i] + gr[i + 1]);
    }
    // mass beyond the grid: ∫_x^∞ g ≈ g·w/(1 − w′) with w = −1/(log g)′,
    // exact for power tails and first-order exact for stretched exponentials
    let k = (m / 20).max(1);
    let (i0, i1, i2) = (m - 1 - 2 * k, m - 1 - k, m - 1);
    let kappa = |a: usize, b: usize| -(gr[b].ln() - gr[a].ln()) / (xr[b] - xr[a]);
    let (ka, kb) = (kappa(i1, i2), kappa(i0, i1));
    if !(ka > 0.0 && kb > 0.0) {
        return Err(Error::DivergentSup("g is not decaying at the end of the grid".into()));
    }
    let (xa, xb) = (0.5 * (xr[i1] + xr[i2]), 0.5 * (xr[i0] + xr[i1]));
    let dw = (1.0 / ka - 1.0 / kb) / (xa - xb);
    if !(dw < 1.0) {
        return Err(Error::DivergentSup(format!(
            "(1/κ)′ = {dw:.3} ≥ 1 at the end of the grid, ν has no finite mass"
        )));
    }
    let w_end = 1.0 / ka + dw * (xr[m - 1] - xa);
    let extra = gr[m - 1] * w_end / (1.0 - dw);
    for t in tail.iter_mut() {
        *t += extra;
    }
    let total = 2.0 * tail[0];
    for t in tail.iter_mut() {
        *t /= total;
    }
    let mut inv = vec![0.0; m];
    for i in 1..m {
        inv[i] = inv[i - 1] + 0.5 * (xr[i] - xr[i - 1]) * (1.0 / gr[i] + 1.0 / gr[i - 1]);
    }
    // the normalising constant of ν enters ∫1/g as well
    for v in inv.iter_mut() {
        *v *= total;
    }
    let ratio = |div: f64| -> Vec<f64> {
        (0..m)
            .map(|i| {
                if i == 0 {
                    return 0.0;
                }
                let t = tail[i];
                t / beta.eval(t / div) * inv[i]
            })
            .collect()
    };
    let small = ratio(4.0);
    let large = ratio(1.0);
    for vals in [&small, &large] {
        check_sup_converges(&xr, vals)?;
    }
    let (xs, bs) = refined_sup(&xr, &small);
    let (xl, bl) = refined_sup(&xr, &large);
    Ok(TailBetaReport {
        b_small: bs,
        b_large: bl,
        accepted: bs.is_finite() && bl.is_finite(),
        c_range: [0.25 * bs, 12.0 * bl],
        argmax_small: xs,
        argmax_large: xl,
    })
}

/// A sup that is still growing at the end of the grid is declared divergent.
fn check_sup_converges(xs: &[f64], vals: &[f64]) -> Result<()> {
    let m = vals.len();
    let sup_upto = |k: usize| vals[..k].iter().cloned().fold(0.0, f64::max);
    let full = sup_upto(m);
    let half = sup_upto(m / 2);
    let quarter = sup_upto(m / 4);
    let (i_max, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap_or((0, &0.0));
    if !full.is_finite() {
        return Err(Error::DivergentSup("non-finite ratio".into()));
    }
    let growing = full > 1.05 * half && half > 1.0 * quarter;
    if i_max + m / 50 >= m && growing {
        return Err(Error::DivergentSup(format!(
            "sup still increasing at x = {} ({quarter:.4e} → {half:.4e} → {full:.4e})",
            xs[m - 1]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    pub hprime_f_sup_right: f64,
    pub hprime_f_sup_left: f64,
    pub c_cap: f64,
    pub c_cap_argmax: f64,
    pub c_eta_bound: f64,
    pub c_p_upper: f64,
    /// smallest `C_c` with `η″(1/μ(A))/(μ(A)η(ρ/μ(A))) ≤ C_c·Cap(A)` over tail sets
    pub alt_remark34: f64,
}

/// Capacity-measure checks for an η-profile and a non-decreasing `F`.
pub fn capacity_condition_check(
    mu: &ProbabilityMeasure1D,
    f: &ScalarFn,
    eta: &EtaProfile,
    a: f64,
    rho: f64,
) -> Result<CapacityReport> {
    if !(rho > 1.0) {
        return Err(Error::InvalidParameter(format!("ρ = {rho} must exceed 1")));
    }
    if !(a > 2.0_f64.max(eta.b)) {
        return Err(Error::BadSplice { a, bound: 2.0_f64.max(eta.b) });
    }
    let probe = log_space(a, 1e8, 2000);
    if probe.windows(2).any(|w| f.eval(w[1]) < f.eval(w[0]) * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter("F must be non-decreasing".into()));
    }
    let fun = |u: f64| eta.eta.eval(rho * u) / (u * u * eta.eta_second.eval(u) * f.eval(u));
    let vals: Vec<f64> = probe.iter().map(|&u| fun(u)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::DivergentCcap("non-finite ratio on the probe grid".into()));
    }
    let (u_arg, c_cap) = refined_sup(&probe, &vals);
    let last_decade = probe.partition_point(|&u| u < 1e7);
    let prev = vals[..last_decade].iter().cloned().fold(0.0, f64::max);
    if u_arg >= 1e7 && c_cap > 1.01 * prev {
        return Err(Error::DivergentCcap(format!(
            "sup still growing at u = {u_arg:.3e}"
        )));
    }
    let mk = muckenhoupt_poincare(mu).map_err(|e| Error::MissingPoincare(e.to_string()))?;
    let c_p_upper = mk.c_p_interval[1];
    let e2 = |u: f64| eta.eta_second.eval(u);
    let c_eta_bound = (e2(a) * (1.0 + (rho - 1.0).powi(2)) * c_p_upper / e2(rho * a))
        .max(rho * rho * c_cap / ((rho - 1.0) * (rho - 1.0)));
    let (hp, _, hm, _) = hardy_sups(mu, &|u| f.eval(u))?;

    let td = tail_data(mu)?;
    let mut alt: f64 = 0.0;
    for i in 0..mu.len() {
        if mu.grid[i] <= mu.median {
            continue;
        }
        let m = td.right[i];
        if !(m > 0.0) {
            continue;
        }
        let ratio = eta.eta_second.eval(1.0 / m) / (m * eta.eta.eval(rho / m));
        let cap = 1.0 / td.inv_pdf[i];
        let c = ratio / cap;
        if c.is_finite() {
            alt = alt.max(c);
        }
    }
    Ok(CapacityReport {
        hprime_f_sup_right: hp,
        hprime_f_sup_left: hm,
        c_cap,
        c_cap_argmax: u_arg,
        c_eta_bound,
        c_p_upper,
        alt_remark34: alt,
    })
}

/// Transforms between the β-functions of the different inequality families.
#[derive(Debug, Clone)]
pub enum BetaTransformKind {
    /// `6β(¼ζ̄(s/2))` with `ζ̄(u) = 1/γ*(1/u)`, `γ(u) = ζ(√u)`
    Orlicz { zeta: ScalarFn },
    /// `v ↦ √v·β_H(k√v)/k`, `k = (√2 − 1)/(2√2)`
    HellingerForward,
    /// `s ↦ 24γ(s²)/s`
    HellingerConverse,
    /// `s ↦ 12√s·β_H(k√s)`
    HellingerToWp,
    /// `(1 − e^{−ρt})/ρ + e^{−ρt}β(s)` at a fixed `t`
    CurvaturePropagated { rho: f64, t: f64 },
    /// same formula for a super-Poincaré β
    SpPropagated { rho: f64, t: f64 },
    /// `c/F(s)`; the input β is ignored
    SpFromF { c: f64, f: ScalarFn },
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaTransform {
    pub beta: BetaFunction,
    /// `γ` failed the convexity probe (Orlicz kind only)
    pub non_young: bool,
    pub monotone_violations: usize,
}

pub const HELLINGER_K: f64 = (std::f64::consts::SQRT_2 - 1.0) / (2.0 * std::f64::consts::SQRT_2);

/// Legendre conjugate `γ*(y) = sup_u (uy − γ(u))`, maximised in `ln u`.
pub fn legendre_conjugate(gamma: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    let obj = |l: f64| {
        let u = l.exp();
        let v = u * y - gamma(u);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let (_, v) = minimize_scan(obj, -60.0, 60.0, 481, 1e-12);
    (-v).max(0.0)
}

fn tabulate_transform(f: impl Fn(f64) -> f64, s_max: f64) -> Result<(BetaFunction, usize)> {
    let hi = if s_max.is_finite() { s_max * (1.0 - 1e-9) } else { 1e6 };
    let s = log_space(1e-12, hi, 600);
    let vals: Vec<f64> = s.iter().map(|&x| f(x)).collect();
    if vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("transformed β is not positive and finite".into()));
    }
    let beta = BetaFunction::tabulated(s, vals)?;
    let v = match &beta {
        BetaFunction::Tabulated { violations, .. } => *violations,
        _ => 0,
    };
    Ok((beta, v))
}

pub fn beta_transforms(beta: &BetaFunction, kind: &BetaTransformKind) -> Result<BetaTransform> {
    let b = beta.clone();
    let k = HELLINGER_K;
    let out = match kind {
        BetaTransformKind::Orlicz { zeta } => {
            let z = zeta.clone();
            let gamma = move |u: f64| z.eval(u.sqrt());
            let grid = log_space(1e-8, 1e8, 2000);
            let gv: Vec<f64> = grid.iter().map(|&u| gamma(u)).collect();
            let non_young = grid.windows(3).zip(gv.windows(3)).any(|(x, g)| {
                let s1 = (g[1] - g[0]) / (x[1] - x[0]);
                let s2 = (g[2] - g[1]) / (x[2] - x[1]);
                s2 < s1 * (1.0 - 1e-9) - 1e-300
            });
            let zeta_bar = move |u: f64| 1.0 / legendre_conjugate(&gamma, 1.0 / u);
            let (beta, v) = tabulate_transform(|s| 6.0 * b.eval(0.25 * zeta_bar(0.5 * s)), f64::INFINITY)?;
            BetaTransform {
                beta,
                non_young,
                monotone_violations: v,
            }
        }
        BetaTransformKind::HellingerForward => {
            let (beta, v) = tabulate_transform(|s| s.sqrt() * b.eval(k * s.sqrt()) / k, f64::INFINITY)?;
            BetaTransform { beta, non_young: false, monotone_violations: v }
        }
        BetaTransformKind::HellingerConverse => {
            let (beta, v) = tabulate_transform(|s| 24.0 * b.eval(s * s) / s, f64::INFINITY)?;
            BetaTransform { beta, non_young: false, monotone_violations: v }
        }
        BetaTransformKind::HellingerToWp => {
            let (beta, v) = tabulate_transform(|s| 12.0 * s.sqrt() * b.eval(k * s.sqrt()), f64::INFINITY)?;
            BetaTransform { beta, non_young: false, monotone_violations: v }
        }
        BetaTransformKind::CurvaturePropagated { rho, t } | BetaTransformKind::SpPropagated { rho, t } => {
            let (rho, t) = (*rho, *t);
            let a = if rho == 0.0 { t } else { -(-rho * t).exp_m1() / rho };
            let e = (-rho * t).exp();
            let name = format!("propagated[{}](rho={rho}, t={t})", b.name());
            BetaTransform {
                beta: BetaFunction::custom(name, move |s| a + e * b.eval(s)),
                non_young: false,
                monotone_violations: 0,
            }
        }
        BetaTransformKind::SpFromF { c, f } => {
            let (c, f) = (*c, f.clone());
            BetaTransform {
                beta: BetaFunction::custom(format!("sp_from_F(c={c})"), move |s| c / f.eval(s)),
                non_young: false,
                monotone_violations: 0,
            }
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub poincare_b: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub c_p_interval: [f64; 2],
    pub spectral_c_p: f64,
    pub bakry_emery_rho: Option<f64>,
    pub c_ls: Option<f64>,
    pub beta_wp: Option<BetaFunction>,
    pub beta_wls: Option<BetaFunction>,
    pub capacity_checks: Vec<CapacityReport>,
}

/// Runs the Muckenhoupt bracket, the spectral oracle and Bakry–Émery.
pub fn analyze_measure(mu: &ProbabilityMeasure1D, w_osc: f64) -> Result<InequalityReport> {
    let mk = muckenhoupt_poincare(mu)?;
    let gap = discrete_poincare_constant(mu);
    let be = bakry_emery(&mu.spec, w_osc, &mu.grid)?;
    Ok(InequalityReport {
        poincare_b: mk.b,
        b_plus: mk.b_plus,
        b_minus: mk.b_minus,
        c_p_interval: mk.c_p_interval,
        spectral_c_p: gap.c_p,
        bakry_emery_rho: Some(be.rho),
        c_ls: be.c_ls,
        beta_wp: None,
        beta_wls: None,
        capacity_checks: Vec::new(),
    })
}
