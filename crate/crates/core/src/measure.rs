//! Truncated-grid probability measures `μ ∝ e^{-2V}` and static functionals
//! of densities taken with respect to `μ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linspace;
use crate::psi::PsiProfile;

/// Potential families. All of them are read in the `μ ∝ e^{-2V}` convention;
/// `factor` rescales the whole potential (use [`PotentialSpec::from_unit_convention`]
/// for potentials written for `μ ∝ e^{-V}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialFamily {
    /// `V = scale·|x|^alpha`
    Power { alpha: f64, scale: f64 },
    /// `V = x²/(4 variance)`, so that `μ = N(0, variance)`
    Gaussian { variance: f64 },
    /// `V = |x|^alpha + log(1 + |x| sin² x)`
    PowerPlusLogPerturbation { alpha: f64 },
    /// piecewise linear through the given nodes; the domain is the table range
    CustomTabulated { x: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    pub factor: f64,
}

impl PotentialSpec {
    pub fn new(family: PotentialFamily) -> Self {
        PotentialSpec {
            family,
            factor: 1.0,
        }
    }

    /// `V(x) = x²/2`, the measure `N(0, 1/2)`.
    pub fn standard_gaussian() -> Self {
        Self::new(PotentialFamily::Gaussian { variance: 0.5 })
    }

    pub fn gaussian(sigma: f64) -> Self {
        Self::new(PotentialFamily::Gaussian {
            variance: sigma * sigma,
        })
    }

    pub fn power(alpha: f64, scale: f64) -> Self {
        Self::new(PotentialFamily::Power { alpha, scale })
    }

    pub fn perturbed_power(alpha: f64) -> Self {
        Self::new(PotentialFamily::PowerPlusLogPerturbation { alpha })
    }

    pub fn tabulated(x: Vec<f64>, v: Vec<f64>) -> Self {
        Self::new(PotentialFamily::CustomTabulated { x, v })
    }

    /// Converts a potential written for `μ ∝ e^{-V}` (with `Γ = 2f′²`) to the
    /// crate convention by halving it.
    pub fn from_unit_convention(family: PotentialFamily) -> Self {
        PotentialSpec {
            family,
            factor: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.factor.is_finite() && self.factor > 0.0) {
            return Err(Error::InvalidSpec(format!("factor {}", self.factor)));
        }
        match &self.family {
            PotentialFamily::Power { alpha, scale } => {
                if !(*alpha > 0.0 && alpha.is_finite()) || !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidSpec(format!(
                        "power needs alpha>0 and scale>0, got alpha={alpha}, scale={scale}"
                    )));
                }
            }
            PotentialFamily::Gaussian { variance } => {
                if !(*variance > 0.0 && variance.is_finite()) {
                    return Err(Error::InvalidSpec(format!("variance {variance}")));
                }
            }
            PotentialFamily::PowerPlusLogPerturbation { alpha } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidSpec(format!("alpha {alpha}")));
                }
            }
            PotentialFamily::CustomTabulated { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return Err(Error::InvalidSpec("tabulated x and V must match, n >= 2".into()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidSpec("tabulated x must be strictly increasing".into()));
                }
                if x.iter().chain(v).any(|t| !t.is_finite()) {
                    return Err(Error::InvalidSpec("tabulated values must be finite".into()));
                }
            }
        }
        Ok(())
    }

    fn base_v(&self, x: f64) -> f64 {
        match &self.family {
            PotentialFamily::Power { alpha, scale } => scale * x.abs().powf(*alpha),
            PotentialFamily::Gaussian { variance } => x * x / (4.0 * variance),
            PotentialFamily::PowerPlusLogPerturbation { alpha } => {
                let s = x.sin();
                x.abs().powf(*alpha) + (x.abs() * s * s).ln_1p()
            }
            PotentialFamily::CustomTabulated { x: xs, v } => interp_linear(xs, v, x),
        }
    }

    fn base_dv(&self, x: f64) -> f64 {
        match &self.family {
            PotentialFamily::Power { alpha, scale } => {
                if x == 0.0 {
                    return 0.0;
                }
                scale * alpha * x.abs().powf(alpha - 1.0) * x.signum()
            }
            PotentialFamily::Gaussian { variance } => x / (2.0 * variance),
            PotentialFamily::PowerPlusLogPerturbation { alpha } => {
                let (s, c) = x.sin_cos();
                let ax = x.abs();
                let pow = if x == 0.0 {
                    0.0
                } else {
                    alpha * ax.powf(alpha - 1.0) * x.signum()
                };
                pow + (x.signum() * s * s + ax * 2.0 * s * c) / (1.0 + ax * s * s)
            }
            PotentialFamily::CustomTabulated { x: xs, v } => {
                let i = cell_index(xs, x);
                (v[i + 1] - v[i]) / (xs[i + 1] - xs[i])
            }
        }
    }

    /// Potential value `V(x)`.
    pub fn v(&self, x: f64) -> f64 {
        self.factor * self.base_v(x)
    }

    /// First derivative `V′(x)`.
    pub fn dv(&self, x: f64) -> f64 {
        self.factor * self.base_dv(x)
    }

    /// Second derivative `V″(x)`; analytic where available, a central
    /// difference of `V′` with step `h` otherwise.
    pub fn d2v(&self, x: f64, h: f64) -> f64 {
        match &self.family {
            PotentialFamily::Gaussian { variance } => self.factor / (2.0 * variance),
            PotentialFamily::Power { alpha, scale } => {
                if *alpha == 2.0 {
                    return self.factor * 2.0 * scale;
                }
                if *alpha == 1.0 {
                    return 0.0;
                }
                if x == 0.0 {
                    return if *alpha > 2.0 { 0.0 } else { f64::INFINITY };
                }
                self.factor * scale * alpha * (alpha - 1.0) * x.abs().powf(alpha - 2.0)
            }
            _ => (self.dv(x + h) - self.dv(x - h)) / (2.0 * h),
        }
    }

    fn fixed_domain(&self) -> Option<(f64, f64)> {
        match &self.family {
            PotentialFamily::CustomTabulated { x, .. } => Some((x[0], x[x.len() - 1])),
            _ => None,
        }
    }
}

fn cell_index(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => i.min(n - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(n - 2),
    }
}

fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = cell_index(xs, x);
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// A probability measure on a uniform truncated grid.
#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityMeasure1D {
    pub spec: PotentialSpec,
    pub grid: Vec<f64>,
    /// Lebesgue density of `μ`.
    pub pdf: Vec<f64>,
    /// `log ∫ e^{-2V} dx`
    pub log_partition: f64,
    pub cdf: Vec<f64>,
    /// `μ([x_i, x_max])`, accumulated from the right.
    pub tail: Vec<f64>,
    pub median: f64,
    /// trapezoid weights, so that `∫ g dμ = Σ weights[i]·g[i]`
    #[serde(skip)]
    pub weights: Vec<f64>,
}

/// Values of a function on the grid of a [`ProbabilityMeasure1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        GridFunction { values }
    }

    pub fn from_fn(mu: &ProbabilityMeasure1D, f: impl Fn(f64) -> f64) -> Self {
        GridFunction {
            values: mu.grid.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn constant(mu: &ProbabilityMeasure1D, c: f64) -> Self {
        GridFunction {
            values: vec![c; mu.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Rescales to unit `μ`-mass.
    pub fn normalized(&self, mu: &ProbabilityMeasure1D) -> Result<Self> {
        let m = integrate(mu, self)?;
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NotADensity(format!("mass {m}")));
        }
        Ok(self.map(|v| v / m))
    }
}

impl ProbabilityMeasure1D {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// `μ((−∞, x])` with the pdf linear inside each cell.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let n = self.len();
        if x <= self.grid[0] {
            return 0.0;
        }
        if x >= self.grid[n - 1] {
            return self.cdf[n - 1];
        }
        let i = cell_index(&self.grid, x);
        let h = x - self.grid[i];
        let slope = (self.pdf[i + 1] - self.pdf[i]) / self.dx();
        self.cdf[i] + self.pdf[i] * h + 0.5 * slope * h * h
    }

    /// Lebesgue density at `x` by linear interpolation.
    pub fn pdf_at(&self, x: f64) -> f64 {
        interp_linear(&self.grid, &self.pdf, x)
    }

    fn check(&self, g: &GridFunction) -> Result<()> {
        if g.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                got: g.len(),
            });
        }
        Ok(())
    }
}

/// Builds `μ ∝ e^{-2V}` on `n_points` uniform nodes. The symmetric window
/// `[-L, L]` grows by 25% steps from `L = 1` until `e^{-2V} ≤ tail_tol·peak`
/// at both ends; windows beyond `|x| = 200` are rejected.
pub fn build_measure(
    spec: &PotentialSpec,
    n_points: usize,
    tail_tol: f64,
) -> Result<ProbabilityMeasure1D> {
    spec.validate()?;
    if n_points < 101 {
        return Err(Error::InvalidParameter(format!(
            "n_points must be >= 101, got {n_points}"
        )));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tail_tol {tail_tol}")));
    }
    let log_tol = -tail_tol.ln();
    let (lo, hi) = match spec.fixed_domain() {
        Some((lo, hi)) => {
            let probe = linspace(lo, hi, 4001);
            let vmin = min_potential(spec, &probe)?;
            if 2.0 * (spec.v(lo) - vmin) < log_tol || 2.0 * (spec.v(hi) - vmin) < log_tol {
                return Err(Error::NonIntegrablePotential(format!(
                    "tabulated potential does not reach the tail tolerance on [{lo}, {hi}]"
                )));
            }
            (lo, hi)
        }
        None => {
            let mut l: f64 = 1.0;
            loop {
                let probe = linspace(-l, l, 4001);
                let vmin = min_potential(spec, &probe)?;
                if 2.0 * (spec.v(-l) - vmin) >= log_tol && 2.0 * (spec.v(l) - vmin) >= log_tol {
                    break;
                }
                l *= 1.25;
                if l > 200.0 {
                    return Err(Error::NonIntegrablePotential(format!(
                        "e^(-2V) above {tail_tol:e} of its peak at |x| = 200"
                    )));
                }
            }
            (-l, l)
        }
    };
    let grid = linspace(lo, hi, n_points);
    let vs: Vec<f64> = grid.iter().map(|&x| spec.v(x)).collect();
    if let Some(x) = grid.iter().zip(&vs).find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidSpec(format!("V is not finite at x={}", x.0)));
    }
    let vmin = vs.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = vs.iter().map(|v| (-2.0 * (v - vmin)).exp()).collect();
    let dx = grid[1] - grid[0];
    let trap = dx * (w.iter().sum::<f64>() - 0.5 * (w[0] + w[n_points - 1]));
    let pdf: Vec<f64> = w.iter().map(|v| v / trap).collect();
    // Simpson on odd grids for the reported partition function: kinks of V at
    // a node (|x|) keep fourth order there, the trapezoid would not.
    let z_scaled = if n_points % 2 == 1 {
        let mut s = w[0] + w[n_points - 1];
        for (i, v) in w.iter().enumerate().take(n_points - 1).skip(1) {
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * dx / 3.0
    } else {
        trap
    };
    let log_partition = z_scaled.ln() - 2.0 * vmin;

    let mut weights = vec![dx; n_points];
    weights[0] *= 0.5;
    weights[n_points - 1] *= 0.5;
    for (wt, p) in weights.iter_mut().zip(&pdf) {
        *wt *= p;
    }

    let mut cdf = vec![0.0; n_points];
    for i in 1..n_points {
        cdf[i] = cdf[i - 1] + 0.5 * dx * (pdf[i - 1] + pdf[i]);
    }
    let mut tail = vec![0.0; n_points];
    for i in (0..n_points - 1).rev() {
        tail[i] = tail[i + 1] + 0.5 * dx * (pdf[i] + pdf[i + 1]);
    }
    let mut mu = ProbabilityMeasure1D {
        spec: spec.clone(),
        grid,
        pdf,
        log_partition,
        cdf,
        tail,
        median: 0.0,
        weights,
    };
    mu.median = solve_median(&mu);
    Ok(mu)
}

fn min_potential(spec: &PotentialSpec, probe: &[f64]) -> Result<f64> {
    let mut m = f64::INFINITY;
    for &x in probe {
        let v = spec.v(x);
        if !v.is_finite() {
            return Err(Error::InvalidSpec(format!("V is not finite at x={x}")));
        }
        m = m.min(v);
    }
    Ok(m)
}

fn solve_median(mu: &ProbabilityMeasure1D) -> f64 {
    let half = 0.5 * mu.cdf[mu.len() - 1];
    let i = mu.cdf.partition_point(|&c| c < half).clamp(1, mu.len() - 1) - 1;
    // cdf is quadratic inside the cell: c0 + p0 h + s h²/2 = half
    let dx = mu.dx();
    let (c0, p0) = (mu.cdf[i], mu.pdf[i]);
    let s = (mu.pdf[i + 1] - p0) / dx;
    let r = half - c0;
    let h = if s.abs() < 1e-300 {
        r / p0
    } else {
        let disc = (p0 * p0 + 2.0 * s * r).max(0.0);
        2.0 * r / (p0 + disc.sqrt())
    };
    mu.grid[i] + h.clamp(0.0, dx)
}

/// `∫ g dμ` by the trapezoid rule.
pub fn integrate(mu: &ProbabilityMeasure1D, g: &GridFunction) -> Result<f64> {
    mu.check(g)?;
    Ok(mu.weights.iter().zip(&g.values).map(|(w, v)| w * v).sum())
}

/// Checks `h ≥ 0` and `|∫h dμ − 1| ≤ 1e-6`.
pub fn check_density(mu: &ProbabilityMeasure1D, h: &GridFunction) -> Result<()> {
    mu.check(h)?;
    if let Some(v) = h.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::NotADensity(format!("value {v}")));
    }
    let m = integrate(mu, h)?;
    if (m - 1.0).abs() > 1e-6 {
        return Err(Error::NotADensity(format!("mass {m}")));
    }
    Ok(())
}

fn integrate_map(mu: &ProbabilityMeasure1D, h: &GridFunction, f: impl Fn(f64) -> f64) -> f64 {
    mu.weights.iter().zip(&h.values).map(|(w, &v)| w * f(v)).sum()
}

/// `∫|h − 1| dμ`, in `[0, 2]`.
pub fn tv_distance(mu: &ProbabilityMeasure1D, h: &GridFunction) -> Result<f64> {
    check_density(mu, h)?;
    Ok(integrate_map(mu, h, |v| (v - 1.0).abs()))
}

/// `2∫(1 − √h) dμ`.
pub fn hellinger_distance(mu: &ProbabilityMeasure1D, h: &GridFunction) -> Result<f64> {
    check_density(mu, h)?;
    Ok(hellinger_unchecked(mu, h))
}

fn hellinger_unchecked(mu: &ProbabilityMeasure1D, h: &GridFunction) -> f64 {
    // 1 − √h = (1 − h)/(1 + √h) keeps precision near h = 1
    let d = 2.0 * integrate_map(mu, h, |v| (1.0 - v) / (1.0 + v.sqrt()));
    d.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub tv: f64,
    pub hellinger: f64,
    pub variance: f64,
    pub entropy: f64,
    pub i_psi: Option<f64>,
    pub v_reverse: Option<f64>,
    pub e_reverse: Option<f64>,
}

pub fn xlogx(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        u * u.ln()
    }
}

/// Evaluates every static functional of `h`. The reversed functionals are
/// only defined when `h ≥ 1/2`.
pub fn functionals(
    mu: &ProbabilityMeasure1D,
    h: &GridFunction,
    psi: Option<&PsiProfile>,
) -> Result<Functionals> {
    check_density(mu, h)?;
    Ok(functionals_unchecked(mu, h, psi))
}

pub(crate) fn functionals_unchecked(
    mu: &ProbabilityMeasure1D,
    h: &GridFunction,
    psi: Option<&PsiProfile>,
) -> Functionals {
    let min_h = h.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let reversed = min_h >= 0.5 - 1e-12;
    Functionals {
        tv: integrate_map(mu, h, |v| (v - 1.0).abs()),
        hellinger: hellinger_unchecked(mu, h),
        variance: integrate_map(mu, h, |v| (v - 1.0) * (v - 1.0)),
        // u log u − u + 1 ≥ 0 pointwise; same integral for unit mass
        entropy: integrate_map(mu, h, |v| xlogx(v) - v + 1.0).max(0.0),
        i_psi: psi.map(|p| integrate_map(mu, h, |v| p.psi(v))),
        v_reverse: reversed.then(|| integrate_map(mu, h, |v| 1.0 / v) - 1.0),
        e_reverse: reversed.then(|| integrate_map(mu, h, |v| -v.ln())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinskerCheck {
    pub tv: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Tests `tv ≤ c_ψ √I_ψ(h)`.
pub fn pinsker_check(
    mu: &ProbabilityMeasure1D,
    h: &GridFunction,
    psi: &PsiProfile,
    c_psi: f64,
) -> Result<PinskerCheck> {
    check_density(mu, h)?;
    let tv = integrate_map(mu, h, |v| (v - 1.0).abs());
    let ipsi = integrate_map(mu, h, |v| psi.psi(v)).max(0.0);
    let rhs = c_psi * ipsi.sqrt();
    Ok(PinskerCheck {
        tv,
        rhs,
        holds: tv <= rhs + 1e-9,
    })
}

/// Total variation `Σ|p − q|` and `I_ψ(Q|P) = Σ p ψ(q/p)` for discrete laws.
pub fn discrete_tv_and_ipsi(p: &[f64], q: &[f64], psi: &PsiProfile) -> (f64, f64) {
    let mut tv = 0.0;
    let mut ipsi = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        tv += (pi - qi).abs();
        if pi > 0.0 {
            ipsi += pi * psi.psi(qi / pi);
        }
    }
    (tv, ipsi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_partition_and_median() {
        let mu = build_measure(&PotentialSpec::standard_gaussian(), 4001, 1e-16).unwrap();
        assert_relative_eq!(mu.log_partition.exp(), std::f64::consts::PI.sqrt(), max_relative = 1e-10);
        assert!(mu.median.abs() < 1e-9);
        assert!((mu.cdf_at(mu.median) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn double_exponential_partition() {
        let mu = build_measure(&PotentialSpec::power(1.0, 1.0), 4001, 1e-16).unwrap();
        assert_relative_eq!(mu.log_partition.exp(), 1.0, max_relative = 1e-8);
    }

    #[test]
    fn non_integrable_is_rejected() {
        let spec = PotentialSpec::power(0.05, 0.01);
        assert!(matches!(
            build_measure(&spec, 1001, 1e-16),
            Err(Error::NonIntegrablePotential(_))
        ));
    }

    #[test]
    fn grid_mismatch() {
        let mu = build_measure(&PotentialSpec::standard_gaussian(), 101, 1e-16).unwrap();
        let g = GridFunction::new(vec![1.0; 7]);
        assert!(matches!(integrate(&mu, &g), Err(Error::GridMismatch { .. })));
    }
}
