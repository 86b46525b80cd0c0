//! Evaluates the decay envelopes on a log time grid and prints a table.

use tvdecay::envelopes::*;
use tvdecay::inequalities::BetaFunction;
use tvdecay::numerics::log_space;

fn main() -> tvdecay::Result<()> {
    let (c_p, c_ls, m) = (0.5, 1.0, 1.4);
    let beta = BetaFunction::power(0.5, 0.5);
    let envs = [
        envelope_poincare_l2(c_p, 0.6)?,
        envelope_truncation_poincare(c_p, &Phi::power(1.5), m)?,
        envelope_truncation_poincare_kopt(c_p, &Phi::power(1.5), m)?,
        envelope_logsob(c_ls, 0.25)?,
        envelope_truncation_logsob(c_ls, &Phi::log_plus(1.0), m)?,
        envelope_weak_poincare(&beta, &Phi::power(2.0), m)?,
        envelope_hellinger(&beta, &Phi::power(2.0), m)?,
        envelope_curvature(0.5, &beta)?,
    ];
    let ts = log_space(0.1, 100.0, 7);
    print!("{:<28}", "envelope");
    for t in &ts {
        print!("{t:>11.3}");
    }
    println!();
    for e in &envs {
        print!("{:<28}", e.name);
        for v in e.eval_many(&ts) {
            print!("{v:>11.3e}");
        }
        println!();
    }
    Ok(())
}
