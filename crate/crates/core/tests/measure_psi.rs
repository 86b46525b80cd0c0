use approx::assert_relative_eq;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use tvdecay::measure::{
    build_measure, functionals, hellinger_distance, integrate, pinsker_check, tv_distance,
};
use tvdecay::psi::{
    build_psi_from_eta, f_bar, orlicz_gauge_n, pinsker_constant, EtaProfile, PsiProfile,
};
use tvdecay::sim::initial;
use tvdecay::{Error, GridFunction, PotentialSpec, ProbabilityMeasure1D};

fn gaussian() -> ProbabilityMeasure1D {
    build_measure(&PotentialSpec::standard_gaussian(), 2001, 1e-16).unwrap()
}

#[test]
fn gaussian_measure_moments() {
    let mu = gaussian();
    let one = GridFunction::constant(&mu, 1.0);
    assert_relative_eq!(integrate(&mu, &one).unwrap(), 1.0, epsilon = 1e-12);
    let x2 = GridFunction::from_fn(&mu, |x| x * x);
    assert_relative_eq!(integrate(&mu, &x2).unwrap(), 0.5, epsilon = 1e-9);
    // ∫ e^{-x²} dx = √π
    assert_relative_eq!(mu.log_partition, 0.5 * std::f64::consts::PI.ln(), epsilon = 1e-9);
    assert!(mu.median.abs() < 1e-9);
}

#[test]
fn double_exponential_partition() {
    let mu = build_measure(&PotentialSpec::power(1.0, 1.0), 4001, 1e-16).unwrap();
    assert_relative_eq!(mu.log_partition, 0.0, epsilon = 1e-5);
    let x2 = GridFunction::from_fn(&mu, |x| x * x);
    // Laplace(0, 1/2) has variance 1/2
    assert_relative_eq!(integrate(&mu, &x2).unwrap(), 0.5, epsilon = 1e-4);
}

#[test]
fn unit_convention_halves_the_potential() {
    use tvdecay::measure::PotentialFamily;
    let spec = PotentialSpec::from_unit_convention(PotentialFamily::Power { alpha: 2.0, scale: 1.0 });
    let mu = build_measure(&spec, 2001, 1e-16).unwrap();
    // μ ∝ e^{-x²} in both conventions
    let x2 = GridFunction::from_fn(&mu, |x| x * x);
    assert_relative_eq!(integrate(&mu, &x2).unwrap(), 0.5, epsilon = 1e-9);
}

#[test]
fn rejects_small_grids_and_bad_densities() {
    assert!(build_measure(&PotentialSpec::standard_gaussian(), 50, 1e-16).is_err());
    let mu = gaussian();
    let neg = GridFunction::from_fn(&mu, |x| 1.0 + x);
    assert!(matches!(functionals(&mu, &neg, None), Err(Error::NotADensity(_))));
    let short = GridFunction::new(vec![1.0; 10]);
    assert!(matches!(tv_distance(&mu, &short), Err(Error::GridMismatch { .. })));
}

#[test]
fn shifted_gaussian_functionals_match_closed_forms() {
    let mu = gaussian();
    let a: f64 = 0.5;
    let h = initial::shifted(&mu, a).unwrap();
    let f = functionals(&mu, &h, Some(&PsiProfile::entropy())).unwrap();
    // N(0, ½) against N(a, ½)
    let sigma = 0.5f64.sqrt();
    let std = Normal::new(0.0, 1.0).unwrap();
    let tv = 2.0 * (2.0 * std.cdf(a / (2.0 * sigma)) - 1.0);
    assert_relative_eq!(f.tv, tv, epsilon = 1e-5);
    assert_relative_eq!(f.entropy, a * a, epsilon = 1e-8);
    assert_relative_eq!(f.variance, (2.0 * a * a).exp() - 1.0, epsilon = 1e-8);
    // 1 − Bhattacharyya coefficient, doubled
    let hell = 2.0 * (1.0 - (-a * a / 4.0).exp());
    assert_relative_eq!(f.hellinger, hell, epsilon = 1e-8);
    assert_relative_eq!(hellinger_distance(&mu, &h).unwrap(), hell, epsilon = 1e-8);
    assert_relative_eq!(f.i_psi.unwrap(), a * a, epsilon = 1e-8);
    assert!(f.v_reverse.is_none());
}

#[test]
fn reversed_functionals_need_lower_bound() {
    let mu = gaussian();
    let h = initial::lift(&initial::step(&mu).unwrap());
    let f = functionals(&mu, &h, None).unwrap();
    // h ∈ {1/2, 3/2} with equal mass
    assert_relative_eq!(f.v_reverse.unwrap(), 0.5 * (2.0 + 2.0 / 3.0) - 1.0, epsilon = 5e-3);
    assert_relative_eq!(f.e_reverse.unwrap(), -0.5 * (0.5f64.ln() + 1.5f64.ln()), epsilon = 5e-3);
}

#[test]
fn classical_pinsker_constants() {
    // dense independent sup of (u−1)²/((1+u)(u log u − u + 1))
    let sup = (1..200_000)
        .map(|i| i as f64 * 1e-4)
        .filter(|u| (u - 1.0).abs() > 1e-3)
        .map(|u| (u - 1.0) * (u - 1.0) / ((1.0 + u) * (u * u.ln() - u + 1.0)))
        .fold(1.0, f64::max);
    assert_relative_eq!(pinsker_constant(&PsiProfile::entropy()).unwrap(), (2.0 * sup).sqrt(), max_relative = 1e-6);
    let q = pinsker_constant(&PsiProfile::quadratic()).unwrap();
    assert!((1.0..=2f64.sqrt() + 1e-9).contains(&q));
    assert!(pinsker_constant(&PsiProfile::remark_linear()).is_ok());
}

#[test]
fn entropy_h_is_two_sqrt_u() {
    let psi = PsiProfile::entropy();
    for u in [0.01, 0.5, 1.0, 4.0, 100.0, 1e6] {
        assert_relative_eq!(psi.h(u), 2.0 * u.sqrt(), max_relative = 1e-6);
        assert_relative_eq!(psi.h_inverse(2.0 * u.sqrt()), u, max_relative = 1e-4);
    }
    assert!(psi.h_unbounded());
}

#[test]
fn quadratic_gauge_is_a_scaled_mean() {
    let mu = gaussian();
    let psi = PsiProfile::quadratic();
    // H(u) = √2 u, so N(f) = ∫f dμ/√2
    let f = GridFunction::from_fn(&mu, |x| 1.0 + x * x);
    let n = orlicz_gauge_n(&f, &mu, &psi).unwrap();
    assert_relative_eq!(n, 1.5 / 2f64.sqrt(), max_relative = 1e-6);
    let zero = GridFunction::constant(&mu, 0.0);
    assert!(matches!(orlicz_gauge_n(&zero, &mu, &psi), Err(Error::ZeroFunction)));
}

#[test]
fn f_bar_quadratic_and_bounded_h() {
    let fb = f_bar(&PsiProfile::quadratic()).unwrap();
    for u in [2.0, 10.0, 1e3] {
        assert_relative_eq!(fb.eval(u), (u - 1.0) * (u - 1.0) / (2.0 * u * u), max_relative = 1e-6);
    }
    // ψ″ = 2/(1+u)³ integrates to a finite H(∞)
    assert!(matches!(f_bar(&PsiProfile::remark_linear()), Err(Error::HCollapse(_))));
}

#[test]
fn eta_profiles_build_admissible_psi() {
    for eta in [EtaProfile::power(1.5), EtaProfile::entropy(), EtaProfile::log_power(1.0)] {
        let psi = build_psi_from_eta(&eta, None).unwrap();
        assert!(psi.psi(1.0).abs() < 1e-9, "{}", psi.name);
        assert!(psi.psi_prime(0.5).abs() < 1e-9, "{}", psi.name);
        assert!(psi.c_pinsker.is_some(), "{}", psi.name);
    }
    assert!(matches!(
        build_psi_from_eta(&EtaProfile::power(1.5), Some(1.5)),
        Err(Error::BadSplice { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinsker_holds_for_random_densities(
        a in 0.0f64..3.0,
        b in -2.0f64..2.0,
        c in 0.0f64..2.0,
    ) {
        let mu = build_measure(&PotentialSpec::standard_gaussian(), 401, 1e-16).unwrap();
        let h = GridFunction::from_fn(&mu, |x| (a + b * x + c * x * x).max(0.0) + 1e-3)
            .normalized(&mu)
            .unwrap();
        for psi in [PsiProfile::quadratic(), PsiProfile::entropy()] {
            let c_psi = psi.c_pinsker.unwrap();
            prop_assert!(pinsker_check(&mu, &h, &psi, c_psi).unwrap().holds);
        }
    }
}
