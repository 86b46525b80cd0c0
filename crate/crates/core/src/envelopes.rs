//! Theoretical total-variation decay bounds as functions of time.
//!
//! Every envelope is a [`DecayEnvelope`]: a raw bound `t ↦ raw(t)`, a
//! multiplicative scale (1 unless calibrated) and a clip at 2, the largest
//! possible value of `∫|h − 1|dμ`. Inverse maps (`φ̃⁻¹`, `θ⁻¹`, `γ⁻¹`, ...) are
//! solved by bisection in `ln u`, which keeps them accurate over hundreds of
//! decades.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequalities::{beta_transforms, BetaFunction, BetaTransformKind};
use crate::measure::{integrate, GridFunction, ProbabilityMeasure1D};
use crate::numerics::{linear_fit, minimize_scan, ScalarFn};

/// Largest TV distance between probability measures in the `∫|h−1|` normalisation.
pub const TV_MAX: f64 = 2.0;

const LU_MAX: f64 = 700.0;

/// Growth profile `φ` used by truncation envelopes.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    /// `u^{q−1}`
    Power { q: f64 },
    /// `log₊(u)^β`
    LogPlus { beta: f64 },
    /// `log₊(log₊ u)`
    LogLog,
    Custom {
        name: String,
        #[serde(skip)]
        f: ScalarFn,
    },
}

impl Phi {
    pub fn power(q: f64) -> Self {
        Phi::Power { q }
    }

    pub fn log_plus(beta: f64) -> Self {
        Phi::LogPlus { beta }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Phi::Power { q } => u.powf(q - 1.0),
            Phi::LogPlus { beta } => u.ln().max(0.0).powf(*beta),
            Phi::LogLog => u.ln().max(0.0).ln().max(0.0),
            Phi::Custom { f, .. } => f.eval(u),
        }
    }

    /// `ln φ(e^{lu})`, `−∞` where `φ` vanishes.
    pub fn ln_phi_ln(&self, lu: f64) -> f64 {
        match self {
            Phi::Power { q } => (q - 1.0) * lu,
            Phi::LogPlus { beta } => {
                if lu > 0.0 {
                    beta * lu.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Phi::LogLog => {
                if lu > 1.0 {
                    let l = lu.ln();
                    if l > 0.0 {
                        l.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    f64::NEG_INFINITY
                }
            }
            Phi::Custom { f, .. } => f.eval(lu.exp()).ln(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Phi::Power { q } => format!("u^{}", q - 1.0),
            Phi::LogPlus { beta } => format!("log+^{beta}"),
            Phi::LogLog => "log+log+".into(),
            Phi::Custom { name, .. } => name.clone(),
        }
    }
}

/// `∫ hφ(h) dμ`.
pub fn phi_moment(mu: &ProbabilityMeasure1D, h: &GridFunction, phi: &Phi) -> Result<f64> {
    let g = h.map(|v| if v > 0.0 { v * phi.eval(v) } else { 0.0 });
    let m = integrate(mu, &g)?;
    if !m.is_finite() || m < 0.0 {
        return Err(Error::MomentMissing(format!("∫hφ(h)dμ = {m}")));
    }
    Ok(m)
}

/// Solves `g(lu) = target` for a non-decreasing `g` and returns the lower
/// end of the final bracket. The bracket grows geometrically from `[−1, 1]`,
/// down to `lu = −700` and up to `lu = 1e300`; targets outside that range
/// give the corresponding end point.
pub fn inverse_ln(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    inverse_ln_within(g, target, -LU_MAX, 1e300)
}

fn inverse_ln_within(g: impl Fn(f64) -> f64, target: f64, floor: f64, ceil: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0f64.min(ceil), 1.0f64.min(ceil));
    while g(hi) < target {
        if hi >= ceil {
            return ceil;
        }
        lo = hi;
        hi = (hi * 2.0).min(ceil);
    }
    while g(lo) >= target {
        if lo <= floor {
            return floor;
        }
        hi = lo;
        lo = (lo * 2.0).max(floor);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * mid.abs().max(1.0) {
            break;
        }
        if g(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn ln_phi_bar(phi: &Phi, lu: f64) -> f64 {
    if lu <= 0.0 {
        f64::NEG_INFINITY
    } else {
        phi.ln_phi_ln(lu) + 0.5 * lu.ln()
    }
}

/// `ln φ̃⁻¹(y)` with `φ̃(u) = √u φ(u)`.
pub fn phi_tilde_inverse_ln(phi: &Phi, y: f64) -> f64 {
    inverse_ln(|lu| 0.5 * lu + phi.ln_phi_ln(lu), y.ln())
}

/// `ln θ⁻¹(y)` with `θ(u) = uφ(u)`.
pub fn theta_inverse_ln(phi: &Phi, y: f64) -> f64 {
    inverse_ln(|lu| lu + phi.ln_phi_ln(lu), y.ln())
}

/// `ln η̃⁻¹(y)` with `η̃(u) = u^{1/4}φ(u)`.
pub fn eta_tilde_inverse_ln(phi: &Phi, y: f64) -> f64 {
    inverse_ln(|lu| 0.25 * lu + phi.ln_phi_ln(lu), y.ln())
}

/// `ln φ̄⁻¹(y)` with `φ̄(u) = φ(u)√(log u)`. For logarithmic `φ` the result
/// is far beyond `ln f64::MAX` already for moderate `y`.
pub fn phi_bar_inverse_ln(phi: &Phi, y: f64) -> f64 {
    inverse_ln(|lu| ln_phi_bar(phi, lu), y.ln())
}

pub fn phi_tilde_inverse(phi: &Phi, y: f64) -> f64 {
    phi_tilde_inverse_ln(phi, y).exp()
}

pub fn theta_inverse(phi: &Phi, y: f64) -> f64 {
    theta_inverse_ln(phi, y).exp()
}

pub fn eta_tilde_inverse(phi: &Phi, y: f64) -> f64 {
    eta_tilde_inverse_ln(phi, y).exp()
}

pub fn phi_bar_inverse(phi: &Phi, y: f64) -> f64 {
    phi_bar_inverse_ln(phi, y).exp()
}

/// `γ⁻¹(v)` for `γ(s) = β(s)/s`, which must be strictly decreasing.
pub fn gamma_wls_inverse(beta: &BetaFunction, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::GammaNotInvertible(format!("target {v} must be positive")));
    }
    let ln_gamma = |ls: f64| {
        let s = ls.exp();
        beta.eval(s).ln() - ls
    };
    let ls = inverse_ln_within(|ls| -ln_gamma(ls), -v.ln(), -LU_MAX, LU_MAX);
    if ls <= -LU_MAX || ls >= LU_MAX {
        return Err(Error::GammaNotInvertible(format!("γ never reaches {v:e}")));
    }
    Ok(ls.exp())
}

/// Checks that `γ(s) = β(s)/s` is strictly decreasing on `[1e-12, 1e6]`.
pub fn gamma_wls_check(beta: &BetaFunction) -> Result<()> {
    let s = crate::numerics::log_space(1e-12, beta.s_max().min(1e6), 400);
    let g: Vec<f64> = s.iter().map(|&x| beta.eval(x) / x).collect();
    if g.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::GammaNotInvertible("β(s)/s is not strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiStatus {
    Converged,
    /// the condition already holds at the smallest admissible `s`
    BelowFloor,
    /// the condition fails on the whole domain
    Unreachable,
}

/// `ξ(t) = inf{s : β(s)·log(c/s) ≤ k·t}`.
#[derive(Debug, Clone, Serialize)]
pub struct XiSpec {
    pub beta: BetaFunction,
    pub log_numerator: f64,
    pub t_scale: f64,
    pub s_floor: f64,
}

impl XiSpec {
    pub fn new(beta: BetaFunction, log_numerator: f64, t_scale: f64) -> Self {
        XiSpec {
            beta,
            log_numerator,
            t_scale,
            s_floor: 1e-16,
        }
    }

    /// `β_WP(s)·log(1/s) ≤ t`
    pub fn weak_poincare(beta: BetaFunction) -> Self {
        Self::new(beta, 1.0, 1.0)
    }

    /// `β_WLS(s)·log(ε/s) ≤ 2t`
    pub fn weak_logsob(beta: BetaFunction, eps: f64) -> Self {
        Self::new(beta, eps, 2.0)
    }

    /// `β_H(s)·log(1/s) ≤ 4t`
    pub fn hellinger(beta: BetaFunction) -> Self {
        Self::new(beta, 1.0, 4.0)
    }

    /// `2β(s)·log(1/s) ≤ t`, used for the weak `I_ψ` and Moser–Trudinger clocks.
    pub fn half_clock(beta: BetaFunction) -> Self {
        Self::new(beta, 1.0, 0.5)
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.s_floor = floor;
        self
    }

    pub fn lhs(&self, s: f64) -> f64 {
        self.beta.eval(s) * (self.log_numerator / s).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiValue {
    pub value: f64,
    pub status: XiStatus,
}

pub fn xi(spec: &XiSpec, t: f64) -> Result<XiValue> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("ξ needs t >= 0, got {t}")));
    }
    let target = spec.t_scale * t;
    let hi_s = spec.log_numerator.min(1.0).min(spec.beta.s_max()) - 1e-12;
    let lo_s = spec.s_floor;
    if spec.lhs(hi_s) > target {
        return Ok(XiValue {
            value: hi_s,
            status: XiStatus::Unreachable,
        });
    }
    if spec.lhs(lo_s) <= target {
        return Ok(XiValue {
            value: lo_s,
            status: XiStatus::BelowFloor,
        });
    }
    let (mut a, mut b) = (lo_s.ln(), hi_s.ln());
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-15 * m.abs().max(1.0) {
            break;
        }
        if spec.lhs(m.exp()) <= target {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(XiValue {
        value: b.exp(),
        status: XiStatus::Converged,
    })
}

fn xi_value(spec: &XiSpec, t: f64) -> f64 {
    xi(spec, t.max(0.0)).map(|v| v.value).unwrap_or(f64::NAN)
}

type RawFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A named decay bound.
#[derive(Clone, Serialize)]
pub struct DecayEnvelope {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub scale: f64,
    pub valid_from: f64,
    /// the bound contains an unspecified universal constant
    pub free_constant: bool,
    pub flags: Vec<String>,
    #[serde(skip)]
    raw: RawFn,
}

impl fmt::Debug for DecayEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecayEnvelope")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("scale", &self.scale)
            .field("valid_from", &self.valid_from)
            .finish()
    }
}

impl DecayEnvelope {
    pub fn new(
        name: impl Into<String>,
        params: &[(&str, f64)],
        raw: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut e = DecayEnvelope {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            scale: 1.0,
            valid_from: 0.0,
            free_constant: false,
            flags: Vec::new(),
            raw: Arc::new(raw),
        };
        e.valid_from = e.find_valid_from();
        e
    }

    fn free(mut self) -> Self {
        self.free_constant = true;
        self
    }

    fn flag(mut self, f: impl Into<String>) -> Self {
        self.flags.push(f.into());
        self
    }

    pub fn raw(&self, t: f64) -> f64 {
        (self.raw)(t)
    }

    /// Bound at `t`, clipped at 2.
    pub fn eval(&self, t: f64) -> f64 {
        let v = self.scale * self.raw(t);
        if v.is_nan() {
            TV_MAX
        } else {
            v.clamp(0.0, TV_MAX)
        }
    }

    pub fn eval_many(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    /// Multiplies the raw bound by `k`.
    pub fn scaled(mut self, k: f64) -> Self {
        self.scale *= k;
        self.valid_from = self.find_valid_from();
        self
    }

    /// Rescales a bound with a free constant so that it equals
    /// `min(2, measured_t0)` at `t = 0` (or at `valid_from` when the raw
    /// bound is infinite at 0). Bounds without a free constant are returned
    /// unchanged.
    pub fn calibrate(mut self, measured_t0: f64) -> Self {
        if !self.free_constant {
            return self;
        }
        let t_ref = if self.raw(0.0).is_finite() && self.raw(0.0) > 0.0 {
            0.0
        } else {
            self.valid_from
        };
        let r = self.raw(t_ref);
        if r.is_finite() && r > 0.0 {
            self.scale = measured_t0.min(TV_MAX) / r;
            self.valid_from = self.find_valid_from();
        }
        self
    }

    fn find_valid_from(&self) -> f64 {
        let ok = |t: f64| {
            let v = self.scale * self.raw(t);
            v.is_finite() && v <= TV_MAX
        };
        if ok(0.0) {
            return 0.0;
        }
        let mut hi = 1e-3;
        while !ok(hi) {
            hi *= 2.0;
            if hi > 1e7 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if ok(m) {
                hi = m;
            } else {
                lo = m;
            }
        }
        hi
    }

    /// Least-squares slope of `ln raw(t)` on `n` uniform points of `[a, b]`.
    pub fn log_slope(&self, a: f64, b: f64, n: usize) -> f64 {
        let ts = crate::numerics::linspace(a, b, n);
        let ys: Vec<f64> = ts.iter().map(|&t| self.raw(t).ln()).collect();
        linear_fit(&ts, &ys).0
    }
}

/// `e^{−t/2C_P}‖h − 1‖₂`.
pub fn envelope_poincare_l2(c_p: f64, l2_norm: f64) -> Result<DecayEnvelope> {
    positive("C_P", c_p)?;
    Ok(DecayEnvelope::new(
        "poincare_l2",
        &[("c_p", c_p), ("l2_norm", l2_norm)],
        move |t| (-t / (2.0 * c_p)).exp() * l2_norm,
    ))
}

/// `4M/φ(φ̃⁻¹(2M e^{t/2C_P}))` with `M = ∫hφ(h)dμ`.
pub fn envelope_truncation_poincare(c_p: f64, phi: &Phi, moment: f64) -> Result<DecayEnvelope> {
    positive("C_P", c_p)?;
    moment_ok(moment)?;
    let phi = phi.clone();
    let m = moment;
    Ok(DecayEnvelope::new(
        "truncation_poincare",
        &[("c_p", c_p), ("moment", m)],
        move |t| {
            let ln_y = (2.0 * m).ln() + t / (2.0 * c_p);
            let lu = inverse_ln(|lu| 0.5 * lu + phi.ln_phi_ln(lu), ln_y);
            4.0 * m * (-phi.ln_phi_ln(lu)).exp()
        },
    ))
}

/// Closed form for `φ(u) = u^{q−1}`:
/// `4^{q/(2q−1)} M^{1/(2q−1)} e^{−(q−1)t/((2q−1)C_P)}`.
pub fn envelope_truncation_poincare_closed(c_p: f64, q: f64, moment: f64) -> Result<DecayEnvelope> {
    positive("C_P", c_p)?;
    moment_ok(moment)?;
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must exceed 1")));
    }
    let d = 2.0 * q - 1.0;
    let pre = 4f64.powf(q / d) * moment.powf(1.0 / d);
    Ok(DecayEnvelope::new(
        "truncation_poincare_closed",
        &[("c_p", c_p), ("q", q), ("moment", moment)],
        move |t| pre * (-(q - 1.0) * t / (d * c_p)).exp(),
    ))
}

/// `inf_K [√K e^{−t/2C_P} + 2M/φ(K)]` over `log K ∈ [log 2, 700]`.
pub fn envelope_truncation_poincare_kopt(c_p: f64, phi: &Phi, moment: f64) -> Result<DecayEnvelope> {
    positive("C_P", c_p)?;
    moment_ok(moment)?;
    let phi = phi.clone();
    let m = moment;
    Ok(DecayEnvelope::new(
        "truncation_poincare_kopt",
        &[("c_p", c_p), ("moment", m)],
        move |t| {
            let f = |lk: f64| (0.5 * lk - t / (2.0 * c_p)).exp() + 2.0 * m * (-phi.ln_phi_ln(lk)).exp();
            minimize_scan(f, 2f64.ln(), LU_MAX, 400, 1e-10).1
        },
    ))
}

/// `4M/φ(θ⁻¹(√2 M/√ξ_WP(t)))` with `θ(u) = uφ(u)`.
pub fn envelope_weak_poincare(beta: &BetaFunction, phi: &Phi, moment: f64) -> Result<DecayEnvelope> {
    moment_ok(moment)?;
    let spec = XiSpec::weak_poincare(beta.clone()).with_floor(1e-300);
    let phi = phi.clone();
    let m = moment;
    Ok(DecayEnvelope::new("weak_poincare", &[("moment", m)], move |t| {
        let x = xi_value(&spec, t);
        let ln_y = (std::f64::consts::SQRT_2 * m).ln() - 0.5 * x.ln();
        let lu = inverse_ln(|lu| lu + phi.ln_phi_ln(lu), ln_y);
        4.0 * m * (-phi.ln_phi_ln(lu)).exp()
    }))
}

/// `C·√ξ_ζ(t)·M` where `ξ_ζ` is the clock of the Orlicz-transformed β.
pub fn envelope_orlicz(beta: &BetaFunction, phi: &Phi, moment: f64, c: f64) -> Result<DecayEnvelope> {
    moment_ok(moment)?;
    let p = phi.clone();
    let zeta = ScalarFn::new(move |u| u * p.eval(u));
    let tr = beta_transforms(beta, &BetaTransformKind::Orlicz { zeta })?;
    let spec = XiSpec::weak_poincare(tr.beta).with_floor(1e-300);
    let m = moment;
    let mut env = DecayEnvelope::new("orlicz", &[("moment", m), ("c", c)], move |t| {
        c * xi_value(&spec, t).sqrt() * m
    })
    .free();
    if tr.non_young {
        env = env.flag("non_young");
    }
    Ok(env)
}

/// `e^{−t/C_LS}√(2 Ent(h))`.
pub fn envelope_logsob(c_ls: f64, entropy: f64) -> Result<DecayEnvelope> {
    positive("C_LS", c_ls)?;
    let e = entropy.max(0.0);
    Ok(DecayEnvelope::new(
        "logsob",
        &[("c_ls", c_ls), ("entropy", e)],
        move |t| (-t / c_ls).exp() * (2.0 * e).sqrt(),
    ))
}

/// `4M/φ(φ̄⁻¹(M e^{t/C_LS}))` with `φ̄(u) = φ(u)√(log u)`.
pub fn envelope_truncation_logsob(c_ls: f64, phi: &Phi, moment: f64) -> Result<DecayEnvelope> {
    positive("C_LS", c_ls)?;
    moment_ok(moment)?;
    let phi = phi.clone();
    let m = moment;
    Ok(DecayEnvelope::new(
        "truncation_logsob",
        &[("c_ls", c_ls), ("moment", m)],
        move |t| {
            let ln_y = m.ln() + t / c_ls;
            let lu = inverse_ln(|lu| ln_phi_bar(&phi, lu), ln_y);
            4.0 * m * (-phi.ln_phi_ln(lu)).exp()
        },
    ))
}

/// `inf_K [√(2(log K + 1/e)) e^{−t/C_LS} + 2M/φ(K)]`.
pub fn envelope_truncation_logsob_kopt(c_ls: f64, phi: &Phi, moment: f64) -> Result<DecayEnvelope> {
    positive("C_LS", c_ls)?;
    moment_ok(moment)?;
    let phi = phi.clone();
    let m = moment;
    Ok(DecayEnvelope::new(
        "truncation_logsob_kopt",
        &[("c_ls", c_ls), ("moment", m)],
        move |t| {
            // scanned in ln ln K: the optimal log K grows exponentially in t
            let f = |llk: f64| {
                let lk = llk.exp();
                (2.0 * (lk + (-1.0f64).exp())).sqrt() * (-t / c_ls).exp()
                    + 2.0 * m * (-phi.ln_phi_ln(lk)).exp()
            };
            minimize_scan(f, 2f64.ln().ln(), 600.0, 1200, 1e-10).1
        },
    ))
}

/// `4M/φ(φ̃⁻¹(√2 M/((1/e + ε)√ξ_WLS(ε, t))))`.
pub fn envelope_weak_logsob(beta: &BetaFunction, phi: &Phi, moment: f64, eps: f64) -> Result<DecayEnvelope> {
    moment_ok(moment)?;
    positive("ε", eps)?;
    let spec = XiSpec::weak_logsob(beta.clone(), eps).with_floor(1e-300);
    let phi = phi.clone();
    let m = moment;
    let k = (-1.0f64).exp() + eps;
    Ok(DecayEnvelope::new(
        "weak_logsob",
        &[("moment", m), ("eps", eps)],
        move |t| {
            let x = xi_value(&spec, t);
            let ln_y = (std::f64::consts::SQRT_2 * m / k).ln() - 0.5 * x.ln();
            let lu = inverse_ln(|lu| 0.5 * lu + phi.ln_phi_ln(lu), ln_y);
            4.0 * m * (-phi.ln_phi_ln(lu)).exp()
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictedBranch {
    /// `φ` grows at least like `log`
    Zeta,
    /// `φ ≪ log`
    Theta,
}

/// Chooses the branch by comparing `φ(u)/log u` at `u = 1e4` and `1e8`.
pub fn restricted_branch(phi: &Phi) -> RestrictedBranch {
    let r = |u: f64| phi.eval(u) / u.ln();
    if r(1e8) >= 0.999 * r(1e4) {
        RestrictedBranch::Zeta
    } else {
        RestrictedBranch::Theta
    }
}

/// Restricted log-Sobolev envelope `c·M/φ(ζ⁻¹(t))` (or `θ⁻¹`), with the
/// truncation level `u` entering through `C_R(u) = β(γ⁻¹(√(3C_P)·u))`.
pub fn envelope_restricted_logsob(
    c_p: f64,
    beta_wls: &BetaFunction,
    phi: &Phi,
    moment: f64,
    c_phi: f64,
) -> Result<DecayEnvelope> {
    positive("C_P", c_p)?;
    moment_ok(moment)?;
    gamma_wls_check(beta_wls)?;
    let branch = restricted_branch(phi);
    let beta = beta_wls.clone();
    let phi = phi.clone();
    let k = (3.0 * c_p).sqrt();
    let m = moment;
    let tag = match branch {
        RestrictedBranch::Zeta => "branch_zeta",
        RestrictedBranch::Theta => "branch_theta",
    };
    let env = DecayEnvelope::new(
        "restricted_logsob",
        &[("c_p", c_p), ("moment", m), ("c_phi", c_phi)],
        move |t: f64| {
            let lu = restricted_clock_inverse(&beta, &phi, branch, k, t);
            (c_phi * m * (-phi.ln_phi_ln(lu)).exp()).min(c_phi * m)
        },
    );
    Ok(env.free().flag(tag))
}

/// `ln` of the truncation level where the restricted log-Sobolev clock
/// `2 log(φ(u)) C_R(u)` (or `2 log(φ(u) log u) C_R(u)`) reaches `t`.
pub fn restricted_clock_inverse(beta: &BetaFunction, phi: &Phi, branch: RestrictedBranch, k: f64, t: f64) -> f64 {
    let clock = |lu: f64| -> f64 {
        let l = match branch {
            RestrictedBranch::Zeta => phi.ln_phi_ln(lu),
            RestrictedBranch::Theta if lu > 0.0 => phi.ln_phi_ln(lu) + lu.ln(),
            RestrictedBranch::Theta => f64::NEG_INFINITY,
        };
        if !(l > 0.0) {
            return if l.is_nan() { f64::NEG_INFINITY } else { l.min(0.0) };
        }
        let c_r = gamma_wls_inverse(beta, k * lu.exp())
            .map(|s| beta.eval(s))
            .unwrap_or(f64::INFINITY);
        2.0 * l * c_r
    };
    inverse_ln(clock, t)
}

/// `M_η(1 + ∫η(h)dμ) e^{−t/4C_η}`.
pub fn envelope_ipsi(c_eta: f64, m_eta: f64, eta_moment: f64) -> Result<DecayEnvelope> {
    positive("C_η", c_eta)?;
    moment_ok(eta_moment)?;
    Ok(DecayEnvelope::new(
        "ipsi",
        &[("c_eta", c_eta), ("m_eta", m_eta), ("eta_moment", eta_moment)],
        move |t| m_eta * (1.0 + eta_moment) * (-t / (4.0 * c_eta)).exp(),
    )
    .free())
}

/// TV form of the `I_ψ` decay: `M_ψ e^{−t/4C_ψ}√I_ψ(h)`.
pub fn envelope_ipsi_tv(c_psi: f64, m_psi: f64, i_psi0: f64) -> Result<DecayEnvelope> {
    positive("C_ψ", c_psi)?;
    let i0 = i_psi0.max(0.0);
    Ok(DecayEnvelope::new(
        "ipsi_tv",
        &[("c_psi", c_psi), ("m_psi", m_psi), ("i_psi0", i0)],
        move |t| m_psi * (-t / (4.0 * c_psi)).exp() * i0.sqrt(),
    )
    .free())
}

/// `e^{−t/2C_ψ} I_ψ(h)`, a bound on `I_ψ(P_t h)` itself.
pub fn ipsi_functional_bound(c_psi: f64, i_psi0: f64, t: f64) -> f64 {
    (-t / (2.0 * c_psi)).exp() * i_psi0
}

/// `4M/φ(η̃⁻¹(2M/√(3ξ_H(t))))` with `η̃(u) = u^{1/4}φ(u)`.
pub fn envelope_hellinger(beta_h: &BetaFunction, phi: &Phi, moment: f64) -> Result<DecayEnvelope> {
    moment_ok(moment)?;
    let spec = XiSpec::hellinger(beta_h.clone()).with_floor(1e-300);
    let phi = phi.clone();
    let m = moment;
    Ok(DecayEnvelope::new("hellinger", &[("moment", m)], move |t| {
        let x = xi_value(&spec, t);
        let ln_y = (2.0 * m).ln() - 0.5 * (3.0 * x).ln();
        let lu = inverse_ln(|lu| 0.25 * lu + phi.ln_phi_ln(lu), ln_y);
        4.0 * m * (-phi.ln_phi_ln(lu)).exp()
    }))
}

/// `3ξ_H(t)√‖h‖∞`, a bound on the Hellinger distance.
pub fn envelope_hellinger_distance(beta_h: &BetaFunction, h_sup: f64) -> Result<DecayEnvelope> {
    positive("‖h‖∞", h_sup)?;
    let spec = XiSpec::hellinger(beta_h.clone()).with_floor(1e-300);
    Ok(DecayEnvelope::new(
        "hellinger_distance",
        &[("h_sup", h_sup)],
        move |t| 3.0 * xi_value(&spec, t) * h_sup.sqrt(),
    ))
}

/// `r(t, s) = log((e^{ρt} + ρβ − 1)/(ρβ))`, or `log(1 + t/β)` at `ρ = 0`.
pub fn curvature_rate(rho: f64, beta_s: f64, t: f64) -> f64 {
    if rho == 0.0 {
        (t / beta_s).ln_1p()
    } else {
        ((rho * t).exp_m1() / (rho * beta_s)).ln_1p()
    }
}

/// `ρβ/(e^{ρt} + ρβ − 1)`, the factor `e^{−r(t,s)}`.
fn curvature_factor(rho: f64, beta_s: f64, t: f64) -> f64 {
    if rho == 0.0 {
        beta_s / (beta_s + t)
    } else {
        1.0 / (1.0 + (rho * t).exp_m1() / (rho * beta_s))
    }
}

/// `√(inf_s [ρβ(s)/(e^{ρt} + ρβ(s) − 1) + 4s])`.
pub fn envelope_curvature(rho: f64, beta_wp: &BetaFunction) -> Result<DecayEnvelope> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("ρ = {rho} must be >= 0")));
    }
    let beta = beta_wp.clone();
    let hi = 0.5f64.min(beta.s_max() * (1.0 - 1e-9)).ln();
    let mut env = DecayEnvelope::new("curvature", &[("rho", rho)], move |t| {
        let f = |ls: f64| {
            let s = ls.exp();
            curvature_factor(rho, beta.eval(s), t) + 4.0 * s
        };
        minimize_scan(f, 1e-12f64.ln(), hi, 200, 1e-10).1.sqrt()
    });
    if rho == 0.0 {
        env = env.flag("rho_zero_limit");
    }
    Ok(env)
}

/// Super-Poincaré variant `√(inf_{s>1} [ρβ(s)/(e^{ρt} + ρβ(s) − 1) + (s − 1)])`.
pub fn envelope_curvature_sp(rho: f64, beta_sp: &BetaFunction) -> Result<DecayEnvelope> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("ρ = {rho} must be >= 0")));
    }
    let beta = beta_sp.clone();
    Ok(DecayEnvelope::new("curvature_sp", &[("rho", rho)], move |t| {
        let f = |ld: f64| {
            let d = ld.exp();
            curvature_factor(rho, beta.eval(1.0 + d), t) + d
        };
        minimize_scan(f, 1e-12f64.ln(), 10f64.ln(), 200, 1e-10).1.sqrt()
    }))
}

/// `θ(u) = inf{s : β(s)/s ≤ 4u/ρ}`.
pub fn theta_curvature(rho: f64, beta: &BetaFunction, u: f64) -> f64 {
    let target = (4.0 * u / rho).ln();
    // β(s)/s is non-increasing, so −ln(β(s)/s) is non-decreasing in ln s
    inverse_ln(|ls| ls - beta.eval(ls.exp()).ln(), -target).exp()
}

/// `C·θ(e^{ρt})^{1/2}`.
pub fn envelope_curvature_closed(rho: f64, beta_wp: &BetaFunction, c: f64) -> Result<DecayEnvelope> {
    positive("ρ", rho)?;
    let beta = beta_wp.clone();
    Ok(DecayEnvelope::new(
        "curvature_closed",
        &[("rho", rho), ("c", c)],
        move |t| {
            let lu = rho * t;
            let target = (4.0 / rho).ln() + lu;
            let ls = inverse_ln(|ls| ls - beta.eval(ls.exp()).ln(), -target);
            c * (0.5 * ls).exp()
        },
    )
    .free())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")))
    }
}

fn moment_ok(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::MomentMissing(format!("moment = {m}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_constant_beta_is_exponential() {
        let spec = XiSpec::weak_poincare(BetaFunction::constant(1.0));
        for t in [0.5, 1.0, 5.0, 20.0] {
            let v = xi(&spec, t).unwrap();
            assert!((v.value / (-t as f64).exp() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn xi_power_example() {
        let spec = XiSpec::weak_poincare(BetaFunction::power(1.0, 1.0));
        let v = xi(&spec, std::f64::consts::E).unwrap().value;
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_generic() {
        let g = envelope_truncation_poincare(0.5, &Phi::power(1.5), 1.3).unwrap();
        let c = envelope_truncation_poincare_closed(0.5, 1.5, 1.3).unwrap();
        for t in [0.0, 1.0, 3.0, 10.0] {
            assert!((g.raw(t) / c.raw(t) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn curvature_at_zero() {
        let e = envelope_curvature(1.0, &BetaFunction::power(1.0, 1.0)).unwrap();
        assert!((e.raw(0.0) - 1.0).abs() < 1e-5);
        assert_eq!(curvature_rate(1.0, 3.0, 0.0), 0.0);
    }
}
