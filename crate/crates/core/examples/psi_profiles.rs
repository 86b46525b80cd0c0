//! ψ profiles: Pinsker constants, the `H` transform and the Orlicz gauge.

use tvdecay::measure::build_measure;
use tvdecay::psi::{build_psi_from_eta, orlicz_gauge_n, EtaProfile, PsiProfile};
use tvdecay::{GridFunction, PotentialSpec};

fn main() -> tvdecay::Result<()> {
    let mut profiles = vec![PsiProfile::quadratic(), PsiProfile::entropy(), PsiProfile::remark_linear()];
    for eta in [EtaProfile::power(1.5), EtaProfile::log_power(2.0), EtaProfile::square_over_log()] {
        match build_psi_from_eta(&eta, None) {
            Ok(p) => profiles.push(p),
            Err(e) => println!("{}: {e}", eta.name),
        }
    }
    let mu = build_measure(&PotentialSpec::standard_gaussian(), 1001, 1e-16)?;
    let f = GridFunction::from_fn(&mu, |x| x.abs());
    for p in &profiles {
        let gauge = orlicz_gauge_n(&f, &mu, p).map(|n| format!("{n:.5}")).unwrap_or_else(|e| e.to_string());
        println!(
            "{:<28} c_psi = {:<10} H(10) = {:<10.4} N(|x|) = {gauge}",
            p.name,
            p.c_pinsker.map(|c| format!("{c:.5}")).unwrap_or("-".into()),
            p.h(10.0),
        );
    }
    Ok(())
}
