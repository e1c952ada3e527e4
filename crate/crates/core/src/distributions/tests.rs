use super::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_laws() -> Vec<DistributionSpec> {
    let table = InverseCdfTable::new(vec![0.0, 0.3, 0.8, 1.0], vec![0.05, 0.4, 0.7, 0.95]).unwrap();
    vec![
        DistributionSpec::beta(0.5).unwrap(),
        DistributionSpec::beta(1.0).unwrap(),
        DistributionSpec::beta(2.0).unwrap(),
        DistributionSpec::example_gamma(0.3).unwrap(),
        DistributionSpec::pareto_log(0.5).unwrap(),
        DistributionSpec::pareto_log(1.0).unwrap(),
        DistributionSpec::pareto_log(1.5).unwrap(),
        DistributionSpec::truncated_second_moment(),
        DistributionSpec::table(table),
    ]
}

#[test]
fn uniform_inversion_examples() {
    let beta = DistributionSpec::beta(1.0).unwrap();
    assert_eq!(beta.draw_from_uniform(0.5).w, 0.5);

    let ex = DistributionSpec::example_gamma(0.3).unwrap();
    let w = ex.draw_from_uniform(0.5).w;
    assert!((w - (1.0 - (-1f64).exp())).abs() < 1e-15);
    assert!((w - 0.63212).abs() < 1e-5);
    // The defining survival P{W > x} = 1/(1 + |log(1 - x)|^γ) is one half there.
    let survival = 1.0 / (1.0 + (-(1.0 - w).ln()).powf(0.3));
    assert!((survival - 0.5).abs() < 1e-12);

    let near_one = ex.draw_from_uniform(1.0 - 1e-12).w;
    assert!(near_one < 1e-20 && near_one > 0.0);
}

#[test]
fn survival_examples() {
    let b2 = DistributionSpec::beta(2.0).unwrap();
    assert!((b2.survival_xi(1.0) - (-2f64).exp()).abs() < 1e-15);
    assert!((b2.survival_xi(1.0) - 0.13534).abs() < 1e-5);
    let p = DistributionSpec::pareto_log(0.5).unwrap();
    assert_eq!(p.survival_xi(4.0), 0.5);
    let b1 = DistributionSpec::beta(1.0).unwrap();
    assert!((b1.survival_eta(std::f64::consts::LN_2) - 0.5).abs() < 1e-15);
    for law in all_laws() {
        assert_eq!(law.survival_xi(0.0), 1.0, "{law}");
        assert_eq!(law.survival_eta(0.0), 1.0, "{law}");
    }
}

#[test]
fn beta_xi_is_exponential() {
    for theta in [0.3, 1.0, 4.0] {
        let law = DistributionSpec::beta(theta).unwrap();
        for x in [0.1, 1.0, 7.5] {
            let exact = (-theta * x).exp();
            assert!((law.survival_xi(x) - exact).abs() <= 1e-15 * exact.max(1e-300));
        }
    }
}

#[test]
fn empirical_survival_within_four_standard_errors() {
    const DRAWS: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    for law in all_laws() {
        let draws: Vec<StickDraw> = (0..DRAWS).map(|_| law.draw(&mut rng)).collect();
        for x in [0.05, 0.3, 1.0, 2.5, 6.0, 40.0] {
            for (which, exact) in [("xi", law.survival_xi(x)), ("eta", law.survival_eta(x))] {
                let hits = draws
                    .iter()
                    .filter(|d| if which == "xi" { d.xi > x } else { d.eta > x })
                    .count();
                let freq = hits as f64 / DRAWS as f64;
                let se = (exact * (1.0 - exact) / DRAWS as f64).sqrt().max(1.0 / DRAWS as f64);
                assert!(
                    (freq - exact).abs() <= 4.0 * se,
                    "{law} {which} x={x}: empirical {freq} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn survivals_monotone_on_grid() {
    for law in all_laws() {
        let grid: Vec<f64> = (0..1000).map(|i| 0.05 * i as f64).collect();
        for pair in grid.windows(2) {
            assert!(law.survival_xi(pair[0]) >= law.survival_xi(pair[1]), "{law} xi at {}", pair[0]);
            assert!(law.survival_eta(pair[0]) >= law.survival_eta(pair[1]), "{law} eta at {}", pair[0]);
        }
        assert!(law.survival_xi(1e300) < 1e-100, "{law}");
        assert!(law.survival_eta(1e300) < 1e-80, "{law}");
    }
}

#[test]
fn beta_moments_closed_form_and_quadrature_agree() {
    for theta in [0.5, 1.0, 2.0, 3.7] {
        let law = DistributionSpec::beta(theta).unwrap();
        let closed = law.moments().unwrap();
        let quad = law.moments_by_quadrature().unwrap();
        assert!((closed.mu - 1.0 / theta).abs() < 1e-15);
        assert!((closed.sigma2 - 1.0 / (theta * theta)).abs() < 1e-15);
        for (a, b) in [(closed.mu, quad.mu), (closed.sigma2, quad.sigma2), (closed.nu, quad.nu)] {
            assert!(((a - b) / a).abs() < 1e-8, "θ={theta}: {a} vs {b}");
        }
    }
    let unit = DistributionSpec::beta(1.0).unwrap().moments().unwrap();
    assert!((unit.nu - 1.0).abs() < 1e-12);
}

#[test]
fn heavy_tailed_moments_are_flagged_infinite() {
    let m = DistributionSpec::pareto_log(0.5).unwrap().moments().unwrap();
    assert!(m.mu.is_infinite() && m.sigma2.is_infinite());
    assert!(m.nu.is_finite() && m.nu > 0.0);
    let m = DistributionSpec::pareto_log(1.5).unwrap().moments().unwrap();
    assert!((m.mu - 3.0).abs() < 1e-15 && m.sigma2.is_infinite());
    let m = DistributionSpec::truncated_second_moment().moments().unwrap();
    assert_eq!(m.mu, 2.0);
    assert!(m.sigma2.is_infinite());
    let m = DistributionSpec::example_gamma(0.3).unwrap().moments().unwrap();
    assert!(m.mu.is_finite() && m.sigma2.is_finite() && m.nu.is_infinite());
}

#[test]
fn pareto_nu_matches_expectation_of_coupled_eta() {
    // ν = E complement_log(ξ) computed through the ξ quantile: ∫_0^1 complement_log(u^{-1/α}) du.
    let alpha = 1.5;
    let law = DistributionSpec::pareto_log(alpha).unwrap();
    let direct = quadrature::integrate(
        |u: f64| complement_log(u.powf(-1.0 / alpha)),
        0.0,
        1.0,
        Tolerance::abs(1e-12),
    )
    .unwrap();
    assert!((law.moments().unwrap().nu - direct).abs() < 1e-9);
}

#[test]
fn example_gamma_eta_tail_index() {
    // Regularly varying tail of index γ: x^γ P{η > x} → 1.
    let gamma = 0.3;
    let law = DistributionSpec::example_gamma(gamma).unwrap();
    let ratios: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&x: &f64| law.survival_eta(x) * x.powf(gamma)).collect();
    assert!(ratios.windows(2).all(|p| p[1] > p[0]), "{ratios:?}");
    assert!((ratios[2] - 1.0).abs() < 0.10, "{ratios:?}");
}

#[test]
fn regimes_from_metadata() {
    assert_eq!(DistributionSpec::beta(3.0).unwrap().classify_regime().unwrap(), Regime::A);
    assert_eq!(DistributionSpec::example_gamma(0.2).unwrap().classify_regime().unwrap(), Regime::A);
    assert_eq!(DistributionSpec::pareto_log(1.5).unwrap().classify_regime().unwrap(), Regime::C);
    assert_eq!(DistributionSpec::pareto_log(1.0).unwrap().classify_regime().unwrap(), Regime::D);
    assert_eq!(DistributionSpec::pareto_log(0.5).unwrap().classify_regime().unwrap(), Regime::E);
    assert_eq!(DistributionSpec::pareto_log(2.5).unwrap().classify_regime().unwrap(), Regime::A);
    assert_eq!(DistributionSpec::truncated_second_moment().classify_regime().unwrap(), Regime::B);
    assert!(matches!(
        DistributionSpec::pareto_log(2.0).unwrap().classify_regime(),
        Err(Error::Unclassifiable(_))
    ));
}

#[test]
fn invalid_parameters_rejected() {
    assert!(DistributionSpec::beta(0.0).is_err());
    assert!(DistributionSpec::beta(f64::NAN).is_err());
    assert!(DistributionSpec::example_gamma(0.5).is_err());
    assert!(DistributionSpec::pareto_log(0.0).is_err());
    assert!(DistributionSpec::pareto_log(f64::INFINITY).is_err());
}

#[test]
fn law_strings() {
    for s in ["beta:1", "beta:0.5", "example:0.3", "paretolog:1.5", "tsm2"] {
        let law: DistributionSpec = s.parse().unwrap();
        assert_eq!(law.to_string(), s);
    }
    for s in ["beta", "beta:x", "gamma:1", "tsm2:3", "table:", "paretolog:-1"] {
        assert!(s.parse::<DistributionSpec>().is_err(), "{s}");
    }
}

#[test]
fn table_law_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    use std::io::Write;
    writeln!(f, "u,w\n0,0.2\n1,0.6").unwrap();
    let s = format!("table:{}", f.path().display());
    let law: DistributionSpec = s.parse().unwrap();
    assert_eq!(law.to_string(), s);
    // W uniform on (0.2, 0.6): P{ξ > x} = P{W < e^{-x}}.
    let x: f64 = 1.0;
    let expected = ((-x).exp() - 0.2) / 0.4;
    assert!((law.survival_xi(x) - expected).abs() < 1e-15);
    assert_eq!(law.classify_regime().unwrap(), Regime::A);
    // E ξ = E(-ln W) for W uniform on (a, b).
    let (a, b) = (0.2f64, 0.6f64);
    let mean_neg_log = -((b * b.ln() - b) - (a * a.ln() - a)) / (b - a);
    assert!((law.moments().unwrap().mu - mean_neg_log).abs() < 1e-9);
}

#[test]
fn sample_w_stays_in_open_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for law in all_laws() {
        for _ in 0..2000 {
            let w = law.sample_w(&mut rng);
            assert!(w > 0.0 && w < 1.0);
        }
    }
}

#[test]
fn xi_survival_inverse_matches_closed_forms() {
    let p = DistributionSpec::pareto_log(1.0).unwrap();
    assert_eq!(p.xi_survival_inverse(1.0), 1.0);
    assert!((p.xi_survival_inverse(0.1) - 10.0).abs() < 1e-12);
    // Bisection path against the exponential closed form.
    let t = DistributionSpec::example_gamma(0.3).unwrap();
    for level in [0.6, 0.5, 0.01] {
        let x = t.xi_survival_inverse(level);
        assert!((t.survival_xi(x) - level).abs() < 1e-12, "level {level}");
    }
}

proptest! {
    #[test]
    fn eta_tail_quantile_inverts_survival(s in 1e-6f64..0.999_999, idx in 0usize..9) {
        let law = &all_laws()[idx];
        let y = law.eta_tail_quantile(s);
        prop_assume!(y > 1e-12);
        let back = law.survival_eta(y);
        prop_assert!((back - s).abs() < 1e-8 * s.max(1e-3), "{} s={} y={} back={}", law, s, y, back);
    }

    #[test]
    fn complement_log_is_an_involution(t in 1e-8f64..50.0) {
        let back = complement_log(complement_log(t));
        prop_assert!(((back - t) / t).abs() < 1e-9);
    }
}
