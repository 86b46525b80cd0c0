//! Small numerical kernels shared by the rest of the crate: grids,
//! root bracketing, golden-section search, a tridiagonal solver and a
//! monotone cubic interpolant.

use std::fmt;
use std::sync::Arc;

/// A shareable real function of one real variable.
#[derive(Clone)]
pub struct ScalarFn(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl ScalarFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::new(move |_| c)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarFn(..)")
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Solves a tridiagonal system. `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    debug_assert!(sub.len() == n && sup.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Result of a monotone root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// For a non-decreasing `f`, returns the bracket around
/// `inf { x in [lo, hi] : f(x) >= target }`, bisecting in `ln x`.
/// Returns `None` when `f(hi) < target`.
pub fn bisect_log_increasing(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    rel_tol: f64,
) -> Option<Bracket> {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    if f(hi) < target {
        return None;
    }
    if f(lo) >= target {
        return Some(Bracket { lo, hi: lo });
    }
    for _ in 0..400 {
        if b - a <= rel_tol {
            break;
        }
        let m = 0.5 * (a + b);
        if f(m.exp()) >= target {
            b = m;
        } else {
            a = m;
        }
    }
    Some(Bracket {
        lo: a.exp(),
        hi: b.exp(),
    })
}

/// Same as [`bisect_log_increasing`] but on a linear scale.
pub fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    abs_tol: f64,
) -> Option<Bracket> {
    let (mut a, mut b) = (lo, hi);
    if f(hi) < target {
        return None;
    }
    if f(lo) >= target {
        return Some(Bracket { lo, hi: lo });
    }
    for _ in 0..400 {
        if b - a <= abs_tol {
            break;
        }
        let m = 0.5 * (a + b);
        if f(m) >= target {
            b = m;
        } else {
            a = m;
        }
    }
    Some(Bracket { lo: a, hi: b })
}

/// Golden-section minimisation on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the endpoints of the final bracket may beat the midpoint on flat ends
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Coarse scan on `n_scan` uniform points of `[lo, hi]`, followed by
/// golden-section refinement in the cells around the three best points.
pub fn minimize_scan(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    n_scan: usize,
    tol: f64,
) -> (f64, f64) {
    let xs = linspace(lo, hi, n_scan.max(3));
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| fs[i].total_cmp(&fs[j]));
    let mut best = (xs[order[0]], fs[order[0]]);
    for &i in order.iter().take(3) {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(xs.len() - 1)];
        let cand = golden_section_min(&f, a, b, tol);
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// Maximisation counterpart of [`minimize_scan`] on an explicit grid of
/// candidate points.
pub fn maximize_on_points(f: impl Fn(f64) -> f64, xs: &[f64], tol: f64) -> (f64, f64) {
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut order: Vec<usize> = (0..xs.len()).filter(|&i| fs[i].is_finite()).collect();
    order.sort_by(|&i, &j| fs[j].total_cmp(&fs[i]));
    let Some(&first) = order.first() else {
        return (f64::NAN, f64::NAN);
    };
    let mut best = (xs[first], fs[first]);
    for &i in order.iter().take(3) {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(xs.len() - 1)];
        if b > a {
            let (x, fx) = golden_section_min(|x| -f(x), a, b, tol * (b - a).max(1e-300));
            if -fx > best.1 {
                best = (x, -fx);
            }
        }
    }
    best
}

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Five-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS)
        .map(|(&x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Cumulative integral of `f` over the points of `grid`, using
/// Gauss–Legendre on every cell. `out[0] = 0`.
pub fn cumulative_gl(f: impl Fn(f64) -> f64, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        acc += gauss_legendre5(&f, w[0], w[1]);
        out.push(acc);
    }
    out
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson) with
/// linear extrapolation using the end slopes.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` must be strictly increasing and `ys` monotone.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (secants[i - 1], secants[i]);
            slopes[i] = if d0 * d1 <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                (w0 + w1) / (w0 / d0 + w1 / d1)
            };
        }
        MonotoneCubic { xs, ys, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }
}
