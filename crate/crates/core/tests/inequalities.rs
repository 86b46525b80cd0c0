use approx::assert_relative_eq;

use tvdecay::inequalities::{
    bakry_emery, beta_transforms, capacity_condition_check, discrete_poincare_constant,
    drift_tail_beta, legendre_conjugate, muckenhoupt_poincare, poincare_ratio,
    rayleigh_bracket_check, weak_poincare_beta_from_tails, BetaFunction, BetaTransformKind,
    HELLINGER_K,
};
use tvdecay::measure::build_measure;
use tvdecay::numerics::linspace;
use tvdecay::psi::EtaProfile;
use tvdecay::{Error, GridFunction, PotentialSpec, ScalarFn};

#[test]
fn gaussian_spectral_gap_and_bracket() {
    let mu = build_measure(&PotentialSpec::standard_gaussian(), 2001, 1e-16).unwrap();
    let gap = discrete_poincare_constant(&mu);
    // −L has eigenvalue 1 on f = x
    assert_relative_eq!(gap.c_p, 0.5, max_relative = 1e-3);
    let mk = muckenhoupt_poincare(&mu).unwrap();
    assert!(mk.c_p_interval[0] <= gap.c_p && gap.c_p <= mk.c_p_interval[1]);
    assert_relative_eq!(mk.b_plus, mk.b_minus, max_relative = 1e-6);
    // f = x saturates the inequality
    let x = GridFunction::from_fn(&mu, |x| x);
    assert_relative_eq!(poincare_ratio(&mu, &x).unwrap(), 0.5, max_relative = 1e-4);
}

#[test]
fn double_exponential_constant() {
    let mu = build_measure(&PotentialSpec::power(1.0, 1.0), 4001, 1e-16).unwrap();
    let mk = muckenhoupt_poincare(&mu).unwrap();
    assert_relative_eq!(mk.b, 0.25, max_relative = 1e-6);
    let gap = discrete_poincare_constant(&mu);
    assert!(gap.c_p <= 1.0 + 1e-6 && gap.c_p > 0.95, "{}", gap.c_p);
}

#[test]
fn rayleigh_trial_functions_stay_in_bracket() {
    let mu = build_measure(&PotentialSpec::power(4.0, 1.0), 1001, 1e-16).unwrap();
    let mk = muckenhoupt_poincare(&mu).unwrap();
    let rc = rayleigh_bracket_check(&mu, mk.b, 200, 3).unwrap();
    assert!(rc.upper_consistent);
    assert!(rc.lower_certified);
    assert!(rc.max_ratio <= 4.0 * mk.b);
    let again = rayleigh_bracket_check(&mu, mk.b, 200, 3).unwrap();
    assert_eq!(rc.max_ratio, again.max_ratio);
}

#[test]
fn bakry_emery_curvature() {
    let grid = linspace(-5.0, 5.0, 1001);
    let g = bakry_emery(&PotentialSpec::standard_gaussian(), 0.0, &grid).unwrap();
    assert_relative_eq!(g.rho, 1.0, max_relative = 1e-6);
    assert_relative_eq!(g.c_ls.unwrap(), 1.0, max_relative = 1e-6);
    // bounded perturbation inflates the constant by e^{osc}
    let p = bakry_emery(&PotentialSpec::standard_gaussian(), 0.3, &grid).unwrap();
    assert_relative_eq!(p.c_ls.unwrap(), 0.3f64.exp(), max_relative = 1e-6);
    // V = x⁴ is flat at the origin
    let q = bakry_emery(&PotentialSpec::power(4.0, 1.0), 0.0, &grid).unwrap();
    assert!(q.c_ls.is_none());
}

#[test]
fn drift_beta_shape() {
    let b = drift_tail_beta(0.5, 2.0).unwrap();
    // exponent 2p/(1+p) = 2/3
    assert_relative_eq!(b.eval(2e-6), 2.0 * 1e6f64.ln().powf(2.0 / 3.0), max_relative = 1e-12);
    assert_eq!(b.monotonicity_violations(1e-12, 1.0, 500), 0);
    assert!(matches!(drift_tail_beta(1.0, 1.0), Err(Error::BadExponent(_))));
}

#[test]
fn tabulated_beta_is_made_monotone() {
    let b = BetaFunction::tabulated(vec![1e-4, 1e-3, 1e-2, 1e-1], vec![5.0, 3.0, 4.0, 1.0]).unwrap();
    match &b {
        BetaFunction::Tabulated { beta, violations, .. } => {
            assert_eq!(beta, &vec![5.0, 4.0, 4.0, 1.0]);
            assert_eq!(*violations, 1);
        }
        _ => unreachable!(),
    }
    assert_eq!(b.monotonicity_violations(1e-6, 1.0, 400), 0);
    assert!(BetaFunction::tabulated(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
}

#[test]
fn legendre_conjugate_of_square() {
    let g = |u: f64| 0.5 * u * u;
    for y in [0.1, 1.0, 3.0] {
        assert_relative_eq!(legendre_conjugate(&g, y), 0.5 * y * y, max_relative = 1e-8);
    }
}

#[test]
fn hellinger_forward_transform() {
    let k = HELLINGER_K;
    assert_relative_eq!(k, (2f64.sqrt() - 1.0) / (2.0 * 2f64.sqrt()), max_relative = 1e-15);
    // β_H = 3 s^{-2} maps to 3 k^{-3} s^{-1/2}
    let fwd = beta_transforms(&BetaFunction::power(3.0, 2.0), &BetaTransformKind::HellingerForward).unwrap();
    assert_eq!(fwd.monotone_violations, 0);
    for s in [1e-8, 1e-4, 0.3] {
        assert_relative_eq!(fwd.beta.eval(s), 3.0 * k.powi(-3) * s.powf(-0.5), max_relative = 1e-9);
    }
    // a constant β_H gives an increasing transform, which gets flattened
    let flat = beta_transforms(&BetaFunction::constant(2.0), &BetaTransformKind::HellingerForward).unwrap();
    assert!(flat.monotone_violations > 0);
}

#[test]
fn gaussian_tails_accept_constant_beta() {
    let x = linspace(-6.0, 6.0, 1201);
    let g: Vec<f64> = x.iter().map(|x| (-x * x).exp()).collect();
    let r = weak_poincare_beta_from_tails(&x, &g, &BetaFunction::constant(1.0)).unwrap();
    assert!(r.accepted);
    assert!(r.c_range[0] <= r.c_range[1]);
    let short = weak_poincare_beta_from_tails(&x[..10], &g[..10], &BetaFunction::constant(1.0));
    assert!(short.is_err());
}

#[test]
fn capacity_on_gaussian() {
    let mu = build_measure(&PotentialSpec::standard_gaussian(), 1001, 1e-16).unwrap();
    let f = ScalarFn::new(|u: f64| u.ln());
    let r = capacity_condition_check(&mu, &f, &EtaProfile::entropy(), 2.1, 2.0).unwrap();
    assert!(r.c_cap.is_finite() && r.c_cap > 0.0);
    assert!(r.c_p_upper.is_finite());
    assert!(capacity_condition_check(&mu, &f, &EtaProfile::entropy(), 2.1, 1.0).is_err());
}

#[test]
fn stretched_exponential_tail_sups() {
    // ν ∝ e^{-2√|x|}: ν([x,∞)) = (√x + ½)e^{-2√x}, ∫₀ˣ 1/g = (√x − ½)e^{2√x} + ½
    let x = linspace(-400.0, 400.0, 8001);
    let g: Vec<f64> = x.iter().map(|x| (-2.0 * x.abs().sqrt()).exp()).collect();
    let beta = BetaFunction::LogPower { d: 1.0, r: 2.0, s0: 2.0 };
    let r = weak_poincare_beta_from_tails(&x, &g, &beta).unwrap();
    let exact = |div: f64| {
        linspace(0.1, 400.0, 40_000)
            .into_iter()
            .map(|x: f64| {
                let s = x.sqrt();
                let t = (s + 0.5) * (-2.0 * s).exp();
                t * ((s - 0.5) * (2.0 * s).exp() + 0.5) / beta.eval(t / div)
            })
            .fold(0.0, f64::max)
    };
    assert_relative_eq!(r.b_small, exact(4.0), max_relative = 2e-3);
    // this sup sits near the √x cusp at the origin, where the trapezoid rule is coarser
    assert_relative_eq!(r.b_large, exact(1.0), max_relative = 1e-2);
    // the drift exponent 2/3 is too small for this tail
    let weak = drift_tail_beta(0.5, 1.0).unwrap();
    assert!(matches!(weak_poincare_beta_from_tails(&x, &g, &weak), Err(Error::DivergentSup(_))));
}

#[test]
fn non_normalisable_tail_is_rejected() {
    let x = linspace(-100.0, 100.0, 2001);
    let g: Vec<f64> = x.iter().map(|x| 1.0 / (1.0 + x.abs())).collect();
    let r = weak_poincare_beta_from_tails(&x, &g, &BetaFunction::constant(1.0));
    assert!(matches!(r, Err(Error::DivergentSup(_))));
}

#[test]
fn log_tails() {
    let e = std::f64::consts::E;
    let x = linspace(-1e4, 1e4, 200_001);
    let g: Vec<f64> = x
        .iter()
        .map(|x| {
            let y = e + x.abs();
            0.5 / (y * y.ln() * y.ln())
        })
        .collect();
    // β(s) = e^{1/s}/s is enough for a 1/(x log²x) tail, β(s) = e^{2/√s} is not
    let ok = BetaFunction::custom("exp(1/s)/s", |s: f64| (1.0 / s).exp() / s);
    assert!(weak_poincare_beta_from_tails(&x, &g, &ok).unwrap().accepted);
    let thin = BetaFunction::custom("exp(2/sqrt s)", |s: f64| (2.0 / s.sqrt()).exp());
    assert!(matches!(weak_poincare_beta_from_tails(&x, &g, &thin), Err(Error::DivergentSup(_))));
}

#[test]
fn capacity_constant_for_power_eta() {
    // η = u^p with constant F: η(ρu)/(u²η″(u)F) = ρ^p/(p(p−1)F)
    let mu = build_measure(&PotentialSpec::standard_gaussian(), 1001, 1e-16).unwrap();
    let (p, rho, f) = (1.5, 2.0, 3.0 * 0.5);
    let r = capacity_condition_check(&mu, &ScalarFn::constant(f), &EtaProfile::power(p), 2.5, rho).unwrap();
    assert_relative_eq!(r.c_cap, rho.powf(p) / (p * (p - 1.0) * f), max_relative = 1e-9);
}

#[test]
fn hellinger_to_weak_poincare_of_inverse_beta() {
    // β_H = c/s gives 12√s·c/(k√s) = 12c/k, a plain Poincaré constant
    let t = beta_transforms(&BetaFunction::power(0.7, 1.0), &BetaTransformKind::HellingerToWp).unwrap();
    for s in [1e-9, 1e-3, 0.5] {
        assert_relative_eq!(t.beta.eval(s), 12.0 * 0.7 / HELLINGER_K, max_relative = 1e-9);
    }
}
