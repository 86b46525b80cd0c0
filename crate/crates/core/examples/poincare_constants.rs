//! Muckenhoupt bracket against the discrete spectral gap, plus Bakry–Émery.

use tvdecay::inequalities::{analyze_measure, rayleigh_bracket_check};
use tvdecay::measure::build_measure;
use tvdecay::PotentialSpec;

fn main() -> tvdecay::Result<()> {
    for (name, spec) in [
        ("x^2/2", PotentialSpec::standard_gaussian()),
        ("|x|", PotentialSpec::power(1.0, 1.0)),
        ("|x|^4", PotentialSpec::power(4.0, 1.0)),
        ("|x|^1.5 + log(1+|x|sin^2 x)", PotentialSpec::perturbed_power(1.5)),
    ] {
        let mu = build_measure(&spec, 2001, 1e-16)?;
        let r = analyze_measure(&mu, 0.0)?;
        let rc = rayleigh_bracket_check(&mu, r.poincare_b, 100, 1)?;
        println!("{name}");
        println!("  C_P in [{:.5}, {:.5}], spectral {:.5}", r.c_p_interval[0], r.c_p_interval[1], r.spectral_c_p);
        println!("  trial ratios up to {:.5} (lower certified: {})", rc.max_ratio, rc.lower_certified);
        match r.c_ls {
            Some(c) => println!("  C_LS <= {c:.5} (curvature {:.3})", r.bakry_emery_rho.unwrap_or(0.0)),
            None => println!("  no uniform curvature bound"),
        }
    }
    Ok(())
}
