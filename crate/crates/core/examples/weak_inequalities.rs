//! Weak Poincaré data for heavy tails: β from a drift condition, the tail
//! sups of a symmetric density, and the resulting ξ clock.

use tvdecay::envelopes::{xi, XiSpec};
use tvdecay::inequalities::{drift_tail_beta, weak_poincare_beta_from_tails, BetaFunction};
use tvdecay::numerics::linspace;

fn main() -> tvdecay::Result<()> {
    // ν ∝ e^{-2√|x|}, whose drift satisfies x·b = −½|x|^{1/2}
    let x = linspace(-400.0, 400.0, 8001);
    let g: Vec<f64> = x.iter().map(|x| (-2.0 * x.abs().sqrt()).exp()).collect();

    let candidates = [
        drift_tail_beta(0.5, 1.0)?,
        BetaFunction::LogPower { d: 1.0, r: 2.0, s0: 2.0 },
    ];
    for beta in candidates {
        println!("beta = {}", beta.name());
        match weak_poincare_beta_from_tails(&x, &g, &beta) {
            Ok(r) => println!(
                "  tail sups b = {:.4}, B = {:.4}, C in [{:.4}, {:.4}]",
                r.b_small, r.b_large, r.c_range[0], r.c_range[1]
            ),
            Err(e) => println!("  rejected: {e}"),
        }
        let spec = XiSpec::weak_poincare(beta);
        for t in [1.0, 10.0, 100.0, 1000.0] {
            let v = xi(&spec, t)?;
            println!("  xi({t:>6}) = {:.4e} ({:?})", v.value, v.status);
        }
    }
    Ok(())
}
