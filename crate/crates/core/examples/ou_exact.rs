//! The Gaussian case has an explicit semigroup; compare the numerical flow
//! with the Mehler kernel.

use tvdecay::measure::build_measure;
use tvdecay::sim::{initial, ou_exact_evolve, propagate, Scheme};
use tvdecay::PotentialSpec;

fn main() -> tvdecay::Result<()> {
    let mu = build_measure(&PotentialSpec::standard_gaussian(), 2001, 1e-16)?;
    let h0 = initial::shifted(&mu, 1.0)?;
    for t in [0.1, 0.5, 1.0, 2.0] {
        let exact = ou_exact_evolve(&mu, &h0, t)?;
        for scheme in [Scheme::ImplicitEuler, Scheme::CrankNicolson] {
            let h = propagate(&mu, &h0, t, 1e-3, scheme)?;
            let err: f64 = mu
                .weights
                .iter()
                .zip(h.values.iter().zip(&exact.values))
                .map(|(w, (a, b))| w * (a - b).abs())
                .sum();
            println!("t = {t:<4} {scheme:?}: L1 error {err:.3e}");
        }
    }
    Ok(())
}
