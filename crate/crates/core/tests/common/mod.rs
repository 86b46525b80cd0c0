#![allow(dead_code)]

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// Prints the one-line verdict for an acceptance criterion.
pub fn report(id: &str, ok: bool, detail: &str) {
    println!("{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
}

/// Exact Ornstein–Uhlenbeck semigroup for `V = x²/2` applied to the
/// piecewise-linear interpolant of `h0` (constant beyond the grid):
/// `P_t h(x) = E h0(x e^{−t} + σ Z)` with `σ² = (1 − e^{−2t})/2`.
pub fn ou_oracle(grid: &[f64], h0: &[f64], t: f64) -> Vec<f64> {
    let sigma = ((1.0 - (-2.0 * t).exp()) / 2.0).sqrt();
    let std = Normal::new(0.0, 1.0).unwrap();
    let n = grid.len();
    grid.iter()
        .map(|&x| {
            let m = x * (-t).exp();
            let z = |y: f64| (y - m) / sigma;
            let lo = grid.partition_point(|&y| y < m - 12.0 * sigma).saturating_sub(1);
            let hi = (grid.partition_point(|&y| y <= m + 12.0 * sigma) + 1).min(n - 1);
            let mut acc = 0.0;
            for j in lo..hi {
                let (a, b) = (grid[j], grid[j + 1]);
                let slope = (h0[j + 1] - h0[j]) / (b - a);
                let icpt = h0[j] - slope * a;
                let (za, zb) = (z(a), z(b));
                let mass = std.cdf(zb) - std.cdf(za);
                // ∫ y φ_{m,σ}(y) dy over the cell
                let first = m * mass - sigma * (std.pdf(zb) - std.pdf(za));
                acc += icpt * mass + slope * first;
            }
            acc += h0[0] * std.cdf(z(grid[0])) + h0[n - 1] * (1.0 - std.cdf(z(grid[n - 1])));
            acc
        })
        .collect()
}
