//! Evolves a step density under the flow for V = |x| and prints the
//! decay of every functional.

use tvdecay::measure::build_measure;
use tvdecay::psi::PsiProfile;
use tvdecay::sim::{evolve, initial, SimConfig};
use tvdecay::PotentialSpec;

fn main() -> tvdecay::Result<()> {
    let mu = build_measure(&PotentialSpec::power(1.0, 1.0), 2001, 1e-16)?;
    let h0 = initial::step(&mu)?;
    let cfg = SimConfig {
        dt: 2e-3,
        t_end: 6.0,
        save_every: 250,
        ..SimConfig::default()
    };
    let s = evolve(&mu, &h0, &cfg, Some(&PsiProfile::quadratic()))?;
    println!("{:>6} {:>11} {:>11} {:>11} {:>11}", "t", "tv", "hellinger", "variance", "entropy");
    for (t, r) in s.times.iter().zip(&s.records) {
        println!("{t:>6.2} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}", r.tv, r.hellinger, r.variance, r.entropy);
    }
    let n = s.records.len();
    let rate = (s.records[n - 1].variance / s.records[n - 2].variance).ln() / (s.times[n - 1] - s.times[n - 2]);
    println!("late variance rate {rate:.4} (spectral bound -1 for C_P = 1)");
    Ok(())
}
