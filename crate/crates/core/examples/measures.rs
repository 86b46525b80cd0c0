//! Builds a few measures and prints the static functionals of a density.

use tvdecay::measure::{build_measure, functionals};
use tvdecay::psi::PsiProfile;
use tvdecay::sim::initial;
use tvdecay::PotentialSpec;

fn main() -> tvdecay::Result<()> {
    let specs = [
        ("gaussian", PotentialSpec::standard_gaussian()),
        ("double exponential", PotentialSpec::power(1.0, 1.0)),
        ("quartic", PotentialSpec::power(4.0, 1.0)),
        ("perturbed |x|^1.5", PotentialSpec::perturbed_power(1.5)),
    ];
    let psi = PsiProfile::entropy();
    println!("{:<20} {:>9} {:>9} {:>9} {:>9} {:>9}", "measure", "x_max", "tv", "hell", "var", "ent");
    for (name, spec) in specs {
        let mu = build_measure(&spec, 2001, 1e-16)?;
        let h = initial::step(&mu)?;
        let f = functionals(&mu, &h, Some(&psi))?;
        println!(
            "{name:<20} {:>9.3} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            mu.grid[mu.len() - 1],
            f.tv,
            f.hellinger,
            f.variance,
            f.entropy
        );
    }
    Ok(())
}
