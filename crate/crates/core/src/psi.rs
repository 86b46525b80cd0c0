//! ψ profiles: the spliced construction from an admissible η, the generalized
//! Pinsker constant, and the `H`, `N`, `F̄` calculus built on `ψ″`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{GridFunction, ProbabilityMeasure1D};
use crate::numerics::{
    bisect_log_increasing, gauss_legendre5, linspace, log_space, maximize_on_points,
    MonotoneCubic, ScalarFn,
};

pub const PROBE_MIN: f64 = 1e-6;
pub const PROBE_MAX: f64 = 1e8;
const PROBE_POINTS: usize = 2000;
const H_TABLE_MIN: f64 = 1e-14;
const H_TABLE_POINTS: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdmissibilityFlags {
    pub superlinear: bool,
    pub second_deriv_positive_beyond_b: bool,
    pub nondecreasing_beyond_b: bool,
    pub second_deriv_nonincreasing_beyond_b: bool,
}

impl AdmissibilityFlags {
    pub fn all(&self) -> bool {
        self.superlinear
            && self.second_deriv_positive_beyond_b
            && self.nondecreasing_beyond_b
            && self.second_deriv_nonincreasing_beyond_b
    }
}

/// A moment function η with its first two derivatives.
#[derive(Debug, Clone)]
pub struct EtaProfile {
    pub name: String,
    pub eta: ScalarFn,
    pub eta_prime: ScalarFn,
    pub eta_second: ScalarFn,
    pub b: f64,
    pub flags: AdmissibilityFlags,
}

fn probe_grid() -> Vec<f64> {
    log_space(PROBE_MIN, PROBE_MAX, PROBE_POINTS)
}

impl EtaProfile {
    pub fn new(
        name: impl Into<String>,
        eta: ScalarFn,
        eta_prime: ScalarFn,
        eta_second: ScalarFn,
        b: f64,
    ) -> Self {
        let probe: Vec<f64> = probe_grid().into_iter().filter(|&u| u > b).collect();
        let e: Vec<f64> = probe.iter().map(|&u| eta.eval(u)).collect();
        let e2: Vec<f64> = probe.iter().map(|&u| eta_second.eval(u)).collect();
        let rel = |x: f64| 1e-12 * x.abs().max(1e-300);
        let positive = !e2.is_empty() && e2.iter().all(|&v| v > 0.0 && v.is_finite());
        let nonincreasing = e2.windows(2).all(|w| w[1] <= w[0] + rel(w[0]));
        let nondecreasing = e.windows(2).all(|w| w[1] >= w[0] - rel(w[0]));
        let last_decade: Vec<f64> = probe
            .iter()
            .filter(|&&u| u >= PROBE_MAX / 10.0)
            .map(|&u| eta.eval(u) / u)
            .collect();
        let superlinear = last_decade.len() >= 2
            && last_decade.windows(2).all(|w| w[1] >= w[0])
            && last_decade[last_decade.len() - 1] > last_decade[0] * (1.0 + 1e-6);
        EtaProfile {
            name: name.into(),
            eta,
            eta_prime,
            eta_second,
            b,
            flags: AdmissibilityFlags {
                superlinear,
                second_deriv_positive_beyond_b: positive,
                nondecreasing_beyond_b: nondecreasing,
                second_deriv_nonincreasing_beyond_b: nonincreasing,
            },
        }
    }

    /// `η(u) = u^p`, admissible for `1 < p ≤ 2`.
    pub fn power(p: f64) -> Self {
        EtaProfile::new(
            format!("power({p})"),
            ScalarFn::new(move |u| u.max(0.0).powf(p)),
            ScalarFn::new(move |u| p * u.max(0.0).powf(p - 1.0)),
            ScalarFn::new(move |u| p * (p - 1.0) * u.max(0.0).powf(p - 2.0)),
            0.0,
        )
    }

    /// `η(u) = u log(2 + u)`.
    pub fn entropy() -> Self {
        EtaProfile::new(
            "entropy",
            ScalarFn::new(|u| u * (2.0 + u).ln()),
            ScalarFn::new(|u| (2.0 + u).ln() + u / (2.0 + u)),
            ScalarFn::new(|u| (4.0 + u) / ((2.0 + u) * (2.0 + u))),
            0.0,
        )
    }

    /// `η(u) = u log^β(e + u)`.
    pub fn log_power(beta: f64) -> Self {
        let e = std::f64::consts::E;
        EtaProfile::new(
            format!("log_power({beta})"),
            ScalarFn::new(move |u| u * (e + u).ln().powf(beta)),
            ScalarFn::new(move |u| {
                let l = (e + u).ln();
                l.powf(beta) + beta * u * l.powf(beta - 1.0) / (e + u)
            }),
            ScalarFn::new(move |u| {
                let l = (e + u).ln();
                let s = e + u;
                beta * l.powf(beta - 1.0) / s * (2.0 - u / s)
                    + beta * (beta - 1.0) * u * l.powf(beta - 2.0) / (s * s)
            }),
            1.0,
        )
    }

    /// `η(u) = u² / log(e + u)`.
    pub fn square_over_log() -> Self {
        let e = std::f64::consts::E;
        EtaProfile::new(
            "square_over_log",
            ScalarFn::new(move |u| u * u / (e + u).ln()),
            ScalarFn::new(move |u| {
                let l = (e + u).ln();
                2.0 * u / l - u * u / ((e + u) * l * l)
            }),
            ScalarFn::new(move |u| {
                let l = (e + u).ln();
                let s = e + u;
                2.0 / l - 4.0 * u / (s * l * l) + u * u / (s * s * l * l) + 2.0 * u * u / (s * s * l * l * l)
            }),
            1.0,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiKind {
    Quadratic,
    Entropy,
    RemarkLinear,
    FromEta,
    Custom,
}

#[derive(Debug, Clone)]
enum PsiFns {
    Quadratic,
    Entropy,
    RemarkLinear,
    FromEta {
        eta: EtaProfile,
        a: f64,
        eta_a: f64,
        deta_a: f64,
        d2eta_a: f64,
    },
    Custom {
        psi: ScalarFn,
        dpsi: ScalarFn,
        d2psi: ScalarFn,
    },
}

/// A convex ψ with `ψ(1) = 0`, together with its `H` table and inverse.
#[derive(Debug, Clone)]
pub struct PsiProfile {
    pub name: String,
    pub kind: PsiKind,
    /// splice point of the η construction
    pub a: Option<f64>,
    fns: PsiFns,
    h_table: MonotoneCubic,
    h_inverse: MonotoneCubic,
    h_max_u: f64,
    h_max: f64,
    /// `c_ψ` when ψ admits a generalized Pinsker inequality
    pub c_pinsker: Option<f64>,
}

impl PsiProfile {
    fn from_fns(name: String, kind: PsiKind, a: Option<f64>, fns: PsiFns) -> Self {
        let mut nodes = log_space(H_TABLE_MIN, PROBE_MAX, H_TABLE_POINTS);
        if let Some(a) = a {
            nodes.push(a);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
        }
        let mut p = PsiProfile {
            name,
            kind,
            a,
            fns,
            h_table: MonotoneCubic::new(vec![0.0, 1.0], vec![0.0, 1.0]),
            h_inverse: MonotoneCubic::new(vec![0.0, 1.0], vec![0.0, 1.0]),
            h_max_u: PROBE_MAX,
            h_max: 0.0,
            c_pinsker: None,
        };
        let root = |u: f64| p.psi_second(u).max(0.0).sqrt();
        let mut us = Vec::with_capacity(nodes.len() + 1);
        let mut hs = Vec::with_capacity(nodes.len() + 1);
        us.push(0.0);
        hs.push(0.0);
        let mut acc = gauss_legendre5(root, 0.0, nodes[0]);
        us.push(nodes[0]);
        hs.push(acc);
        for w in nodes.windows(2) {
            acc += gauss_legendre5(root, w[0], w[1]);
            us.push(w[1]);
            hs.push(acc);
        }
        p.h_max = acc;
        p.h_inverse = MonotoneCubic::new(hs.clone(), us.clone());
        p.h_table = MonotoneCubic::new(us, hs);
        p.c_pinsker = pinsker_constant(&p).ok();
        p
    }

    /// `ψ(u) = (u − 1)²`
    pub fn quadratic() -> Self {
        Self::from_fns("quadratic".into(), PsiKind::Quadratic, None, PsiFns::Quadratic)
    }

    /// `ψ(u) = u log u`
    pub fn entropy() -> Self {
        Self::from_fns("entropy".into(), PsiKind::Entropy, None, PsiFns::Entropy)
    }

    /// `ψ(u) = u − 3/2 + 1/(u + 1)`, linear at infinity.
    pub fn remark_linear() -> Self {
        Self::from_fns(
            "remark_linear".into(),
            PsiKind::RemarkLinear,
            None,
            PsiFns::RemarkLinear,
        )
    }

    /// A user-supplied ψ. Convexity and `ψ(1) = 0` are the caller's business.
    pub fn custom(name: impl Into<String>, psi: ScalarFn, dpsi: ScalarFn, d2psi: ScalarFn) -> Self {
        Self::from_fns(
            name.into(),
            PsiKind::Custom,
            None,
            PsiFns::Custom { psi, dpsi, d2psi },
        )
    }

    pub fn psi(&self, u: f64) -> f64 {
        match &self.fns {
            PsiFns::Quadratic => (u - 1.0) * (u - 1.0),
            PsiFns::Entropy => crate::measure::xlogx(u),
            PsiFns::RemarkLinear => u - 1.5 + 1.0 / (u + 1.0),
            PsiFns::FromEta {
                eta,
                a,
                eta_a,
                deta_a,
                d2eta_a,
            } => {
                if u <= *a {
                    0.5 * (u * u - u)
                } else {
                    let bregman = eta.eta.eval(u) - eta_a - deta_a * (u - a);
                    0.5 * (a * a - a) + (a - 0.5) * (u - a) + bregman / d2eta_a
                }
            }
            PsiFns::Custom { psi, .. } => psi.eval(u),
        }
    }

    pub fn psi_prime(&self, u: f64) -> f64 {
        match &self.fns {
            PsiFns::Quadratic => 2.0 * (u - 1.0),
            PsiFns::Entropy => u.ln() + 1.0,
            PsiFns::RemarkLinear => 1.0 - 1.0 / ((u + 1.0) * (u + 1.0)),
            PsiFns::FromEta {
                eta,
                a,
                deta_a,
                d2eta_a,
                ..
            } => {
                if u <= *a {
                    u - 0.5
                } else {
                    a - 0.5 + (eta.eta_prime.eval(u) - deta_a) / d2eta_a
                }
            }
            PsiFns::Custom { dpsi, .. } => dpsi.eval(u),
        }
    }

    pub fn psi_second(&self, u: f64) -> f64 {
        match &self.fns {
            PsiFns::Quadratic => 2.0,
            PsiFns::Entropy => 1.0 / u,
            PsiFns::RemarkLinear => 2.0 / (u + 1.0).powi(3),
            PsiFns::FromEta {
                eta, a, d2eta_a, ..
            } => {
                if u <= *a {
                    1.0
                } else {
                    eta.eta_second.eval(u) / d2eta_a
                }
            }
            PsiFns::Custom { d2psi, .. } => d2psi.eval(u),
        }
    }

    /// `ψ‴` by a central difference of `ψ″` with step `u·1e-4`.
    pub fn psi_third(&self, u: f64) -> f64 {
        let h = u * 1e-4;
        (self.psi_second(u + h) - self.psi_second(u - h)) / (2.0 * h)
    }

    /// `ψ(u) − ψ(1) − ψ′(1)(u − 1)`
    pub fn bregman_at_one(&self, u: f64) -> f64 {
        match &self.fns {
            PsiFns::Quadratic => (u - 1.0) * (u - 1.0),
            PsiFns::FromEta { a, .. } if u <= *a => 0.5 * (u - 1.0) * (u - 1.0),
            _ => self.psi(u) - self.psi(1.0) - self.psi_prime(1.0) * (u - 1.0),
        }
    }

    /// `H(u) = ∫_0^u √ψ″`
    pub fn h(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u <= self.h_max_u {
            return self.h_table.eval(u);
        }
        // beyond the table, integrate on log-spaced subcells
        let pts = log_space(self.h_max_u, u, 65);
        self.h_max
            + pts
                .windows(2)
                .map(|w| gauss_legendre5(|s| self.psi_second(s).max(0.0).sqrt(), w[0], w[1]))
                .sum::<f64>()
    }

    /// Monotone interpolant of the tabulated `H`, linearly extrapolated.
    pub fn h_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        self.h_inverse.eval(y)
    }

    /// Largest tabulated value of `H`.
    pub fn h_table_max(&self) -> (f64, f64) {
        (self.h_max_u, self.h_max)
    }

    /// `true` when `H` keeps growing over the last tabulated decade, i.e.
    /// `H(+∞) = +∞` as far as the probe grid can tell.
    pub fn h_unbounded(&self) -> bool {
        let h7 = self.h(self.h_max_u / 10.0);
        self.h_max - h7 > 1e-2 * h7
    }

    pub fn eta(&self) -> Option<&EtaProfile> {
        match &self.fns {
            PsiFns::FromEta { eta, .. } => Some(eta),
            _ => None,
        }
    }

    /// `H(u) / (u √ψ″(u))`, which tends to 1 when `uψ‴/ψ″ → 0`.
    pub fn dieudonne_ratio(&self, u: f64) -> f64 {
        self.h(u) / (u * self.psi_second(u).sqrt())
    }
}

/// Builds ψ from η: `ψ″ = 1` below the splice point `a` and `η″/η″(a)` above,
/// with `ψ′(1/2) = 0` and `ψ(1) = 0`.
pub fn build_psi_from_eta(eta: &EtaProfile, a: Option<f64>) -> Result<PsiProfile> {
    let f = eta.flags;
    if !f.second_deriv_positive_beyond_b {
        return Err(Error::InadmissibleEta(format!("{}: η″ not positive beyond b", eta.name)));
    }
    if !f.nondecreasing_beyond_b {
        return Err(Error::InadmissibleEta(format!("{}: η decreasing beyond b", eta.name)));
    }
    if !f.second_deriv_nonincreasing_beyond_b {
        return Err(Error::InadmissibleEta(format!("{}: η″ increasing beyond b", eta.name)));
    }
    let bound = 2f64.max(eta.b);
    let a = a.unwrap_or_else(|| 2.1f64.max(eta.b + 0.1));
    if !(a > bound) {
        return Err(Error::BadSplice { a, bound });
    }
    let fns = PsiFns::FromEta {
        eta: eta.clone(),
        a,
        eta_a: eta.eta.eval(a),
        deta_a: eta.eta_prime.eval(a),
        d2eta_a: eta.eta_second.eval(a),
    };
    let psi = PsiProfile::from_fns(format!("from_eta({})", eta.name), PsiKind::FromEta, Some(a), fns);
    if !f.superlinear {
        // almost-linear η: accepted under the liminf condition only
        let d = liminf_slope_gap(&psi);
        if !(d > 0.0) {
            return Err(Error::InadmissibleEta(format!(
                "{}: not superlinear and liminf ψ(u)/u − ψ′(1) = {d} is not positive",
                eta.name
            )));
        }
    }
    Ok(psi)
}

/// Estimate of `liminf ψ(u)/u − ψ′(1)` from the last probe decade.
pub fn liminf_slope_gap(psi: &PsiProfile) -> f64 {
    let d1 = psi.psi_prime(1.0);
    log_space(PROBE_MAX / 10.0, PROBE_MAX, 50)
        .into_iter()
        .map(|u| psi.psi(u) / u - d1)
        .fold(f64::INFINITY, f64::min)
}

/// `c_ψ = √(2c)` with `c = sup_u (u−1)² / ((1+u)(ψ(u) − ψ(1) − ψ′(1)(u−1)))`.
pub fn pinsker_constant(psi: &PsiProfile) -> Result<f64> {
    let ratio = |u: f64| {
        if (u - 1.0).abs() < 1e-4 {
            return 1.0 / psi.psi_second(1.0);
        }
        (u - 1.0) * (u - 1.0) / ((1.0 + u) * psi.bregman_at_one(u))
    };
    let mut pts = vec![0.0];
    pts.extend(log_space(1e-8, PROBE_MAX, 4000));
    pts.extend(linspace(0.5, 2.0, 301));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    for &u in &pts {
        if (u - 1.0).abs() >= 1e-4 && !(psi.bregman_at_one(u) > 0.0) {
            return Err(Error::NotPinskerAdmissible(format!(
                "ψ(u) − ψ′(1)(u−1) = {} at u = {u}",
                psi.bregman_at_one(u)
            )));
        }
    }
    if !(psi.psi_second(1.0) > 0.0) {
        return Err(Error::NotPinskerAdmissible("ψ″(1) is not positive".into()));
    }
    let (_, c) = maximize_on_points(ratio, &pts, 1e-10);
    let r6 = ratio(1e6);
    let r8 = ratio(PROBE_MAX);
    if !c.is_finite() || (r8 > 2.0 * r6 && r8 > 0.5 * c) {
        return Err(Error::NotPinskerAdmissible(format!(
            "ratio keeps growing: {r6} at 1e6, {r8} at 1e8"
        )));
    }
    let gap = liminf_slope_gap(psi);
    if !(gap > 0.0) {
        return Err(Error::NotPinskerAdmissible(format!("liminf ψ(u)/u − ψ′(1) = {gap}")));
    }
    let c = c.max(1.0 / gap);
    Ok((2.0 * c).sqrt())
}

/// `N(f) = inf{λ > 0 : ∫ H⁻¹(f/λ) dμ ≤ 1}`.
pub fn orlicz_gauge_n(f: &GridFunction, mu: &ProbabilityMeasure1D, psi: &PsiProfile) -> Result<f64> {
    if f.len() != mu.len() {
        return Err(Error::GridMismatch {
            expected: mu.len(),
            got: f.len(),
        });
    }
    if f.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter("gauge needs a finite f >= 0".into()));
    }
    let fmax = f.values.iter().cloned().fold(0.0, f64::max);
    if fmax <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    if !psi.h_unbounded() {
        return Err(Error::HCollapse(psi.h_max));
    }
    let g = |lambda: f64| -> f64 {
        mu.weights
            .iter()
            .zip(&f.values)
            .map(|(w, &v)| w * psi.h_inverse(v / lambda))
            .sum()
    };
    // ∫H⁻¹(f/λ) ≤ H⁻¹(fmax/λ) ≤ 1 once λ ≥ fmax / H(1)
    let hi = 1.01 * fmax / psi.h(1.0);
    let mut lo = hi / 2.0;
    while g(lo) <= 1.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(Error::ZeroFunction);
        }
    }
    let br = bisect_log_increasing(|l| 1.0 - g(l), lo, hi, 0.0, 1e-12)
        .ok_or_else(|| Error::InvalidParameter("gauge bracket failed".into()))?;
    Ok(br.hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FBarChecks {
    pub nondecreasing: bool,
    /// some `λ > 4` with `F̄(λu) ≤ λF̄(u)/4` on the probe window
    pub lambda_condition: bool,
    pub over_u_nonincreasing: bool,
}

/// `F̄ = ψ / H²`, with the regularity checks used by the capacity converse.
#[derive(Debug, Clone)]
pub struct FBar {
    pub psi: PsiProfile,
    pub checks: FBarChecks,
}

impl FBar {
    pub fn eval(&self, u: f64) -> f64 {
        let h = self.psi.h(u);
        self.psi.psi(u) / (h * h)
    }

    /// `F̄(u) / (ψ(u)/(u²ψ″(u)))`
    pub fn alleluia_ratio(&self, u: f64) -> f64 {
        let p = &self.psi;
        self.eval(u) * u * u * p.psi_second(u) / p.psi(u)
    }
}

pub fn f_bar(psi: &PsiProfile) -> Result<FBar> {
    if !psi.h_unbounded() {
        return Err(Error::HCollapse(psi.h_max));
    }
    let mut fb = FBar {
        psi: psi.clone(),
        checks: FBarChecks {
            nondecreasing: false,
            lambda_condition: false,
            over_u_nonincreasing: false,
        },
    };
    let us = log_space(PROBE_MAX / 10.0, PROBE_MAX, 200);
    let vals: Vec<f64> = us.iter().map(|&u| fb.eval(u)).collect();
    let tol = |v: f64| 1e-9 * v.abs();
    fb.checks.nondecreasing = vals.windows(2).all(|w| w[1] >= w[0] - tol(w[0]));
    fb.checks.over_u_nonincreasing = us
        .windows(2)
        .zip(vals.windows(2))
        .all(|(u, v)| v[1] / u[1] <= v[0] / u[0] * (1.0 + 1e-9));
    fb.checks.lambda_condition = [4.5, 8.0, 16.0, 64.0, 256.0, 1024.0].iter().any(|&lam| {
        us.iter()
            .zip(&vals)
            .step_by(20)
            .all(|(&u, &v)| fb.eval(lam * u) <= lam * v / 4.0 * (1.0 + 1e-9))
    });
    Ok(fb)
}

/// An almost-linear η built from a rate function `F` by solving
/// `τ′/τ² = 1/(uF(u))`.
#[derive(Debug, Clone)]
pub struct AlmostLinearEta {
    pub eta: EtaProfile,
    pub theta: ScalarFn,
    pub theta_prime: ScalarFn,
    pub inv_tau_a: f64,
    /// `∫_a^∞ du/(uF(u))`, `+∞` when judged divergent
    pub wang_integral: f64,
    pub wang_finite: bool,
    /// `2θ′(a) + θ″(a) < 0`, needed for the linear-at-infinity ψ to be Pinsker admissible
    pub linear_condition: bool,
}

struct Cumulative {
    grid: Vec<f64>,
    values: Vec<f64>,
    f: ScalarFn,
}

impl Cumulative {
    fn new(f: ScalarFn, grid: Vec<f64>) -> Self {
        let mut values = vec![0.0];
        let mut acc = 0.0;
        for w in grid.windows(2) {
            acc += gauss_legendre5(|x| f.eval(x), w[0], w[1]);
            values.push(acc);
        }
        Cumulative { grid, values, f }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        let i = match self.grid.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.values[i],
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 1),
        };
        self.values[i] + gauss_legendre5(|s| self.f.eval(s), self.grid[i], x)
    }
}

/// `1/τ(u) = 1/τ(a) − ∫_a^u ds/(sF(s))`, `θ(u) = −∫_a^u 1/τ`, `η = u + θ`.
/// When the Wang integral converges the default `1/τ(a)` is the integral
/// itself, so that `θ′ → 0`. Otherwise the default keeps `1/τ` positive up
/// to the end of the probe domain.
pub fn build_almost_linear_eta(f: ScalarFn, a: f64, inv_tau_a: Option<f64>) -> Result<AlmostLinearEta> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("a = {a}")));
    }
    let fa = f.eval(a);
    if !(fa > 0.0) {
        return Err(Error::InvalidParameter(format!("F(a) = {fa} must be positive")));
    }
    let g = {
        let f = f.clone();
        ScalarFn::new(move |v: f64| 1.0 / f.eval(v.exp()))
    };
    // ∫_a^u ds/(sF(s)) = ∫_{ln a}^{ln u} dv / F(e^v)
    let la = a.ln();
    let mid = 350.0f64.max(la + 1.0);
    let first: f64 = linspace(la, mid, 4001)
        .windows(2)
        .map(|w| gauss_legendre5(|v| g.eval(v), w[0], w[1]))
        .sum();
    let second: f64 = linspace(mid, 2.0 * mid, 4001)
        .windows(2)
        .map(|w| gauss_legendre5(|v| g.eval(v), w[0], w[1]))
        .sum();
    let wang_finite = second.is_finite() && second <= 0.1 * first;
    let wang_integral = if wang_finite { first + second } else { f64::INFINITY };

    let v_end = (1e12f64).ln().max(la + 1.0);
    let int_v = Cumulative::new(g, linspace(la, v_end, 4001));
    let i_probe = int_v.eval(PROBE_MAX.ln().max(la));
    let inv_tau_a = match inv_tau_a {
        Some(v) => v,
        None if wang_finite => wang_integral,
        None => i_probe * (1.0 + 1e-3) + 1e-3,
    };
    if !(inv_tau_a > 0.0) {
        return Err(Error::InvalidParameter(format!("1/tau(a) = {inv_tau_a}")));
    }
    if !wang_finite && inv_tau_a <= i_probe {
        // 1/τ hits zero inside the probe domain
        let hit = crate::numerics::bisect_increasing(|v| int_v.eval(v), la, PROBE_MAX.ln(), inv_tau_a, 1e-12)
            .map(|b| b.hi.exp())
            .unwrap_or(PROBE_MAX);
        return Err(Error::NonPositiveTau(hit));
    }
    let int_v = std::sync::Arc::new(int_v);
    let inv_tau = {
        let int_v = int_v.clone();
        move |u: f64| inv_tau_a - int_v.eval(u.ln())
    };
    let inv_tau = ScalarFn::new(inv_tau);
    let theta_tab = {
        let inv_tau = inv_tau.clone();
        std::sync::Arc::new(Cumulative::new(
            ScalarFn::new(move |v: f64| inv_tau.eval(v.exp()) * v.exp()),
            linspace(la, v_end, 4001),
        ))
    };
    let theta2_a = 1.0 / (a * fa);
    let theta = {
        let theta_tab = theta_tab.clone();
        ScalarFn::new(move |u: f64| {
            if u >= a {
                -theta_tab.eval(u.ln())
            } else {
                0.5 * theta2_a * (u - a) * (u - a) - inv_tau_a * (u - a)
            }
        })
    };
    let theta_prime = {
        let inv_tau = inv_tau.clone();
        ScalarFn::new(move |u: f64| {
            if u >= a {
                -inv_tau.eval(u)
            } else {
                theta2_a * (u - a) - inv_tau_a
            }
        })
    };
    let theta_second = {
        let f = f.clone();
        ScalarFn::new(move |u: f64| if u >= a { 1.0 / (u * f.eval(u)) } else { theta2_a })
    };
    let eta = {
        let th = theta.clone();
        ScalarFn::new(move |u| u + th.eval(u))
    };
    let eta_prime = {
        let tp = theta_prime.clone();
        ScalarFn::new(move |u| 1.0 + tp.eval(u))
    };
    let profile = EtaProfile::new("almost_linear", eta, eta_prime, theta_second, a);
    Ok(AlmostLinearEta {
        eta: profile,
        theta,
        theta_prime,
        inv_tau_a,
        wang_integral,
        wang_finite,
        linear_condition: -2.0 * inv_tau_a + theta2_a < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_eta_gives_half_square() {
        let psi = build_psi_from_eta(&EtaProfile::power(2.0), None).unwrap();
        for u in [0.0, 0.3, 1.0, 2.0, 5.0, 100.0, 1e5] {
            assert_relative_eq!(psi.psi(u), 0.5 * (u * u - u), max_relative = 1e-12, epsilon = 1e-12);
        }
        assert_eq!(psi.psi(1.0), 0.0);
    }

    #[test]
    fn pinsker_constants() {
        assert_relative_eq!(PsiProfile::quadratic().c_pinsker.unwrap(), 2f64.sqrt(), max_relative = 1e-9);
        let c = PsiProfile::entropy().c_pinsker.unwrap();
        assert!((1.0..=1.5).contains(&c), "{c}");
        assert!(PsiProfile::remark_linear().c_pinsker.unwrap().is_finite());
    }

    #[test]
    fn h_of_half_square_is_identity() {
        let psi = build_psi_from_eta(&EtaProfile::power(2.0), None).unwrap();
        for u in [1e-3, 0.5, 3.0, 1e4] {
            assert_relative_eq!(psi.h(u), u, max_relative = 1e-10);
            assert_relative_eq!(psi.h_inverse(u), u, max_relative = 1e-8);
        }
    }

    #[test]
    fn bad_splice() {
        assert!(matches!(
            build_psi_from_eta(&EtaProfile::power(1.5), Some(1.5)),
            Err(Error::BadSplice { .. })
        ));
    }
}
