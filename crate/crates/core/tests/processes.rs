use sieve::mc::{ks_two_sample, run_replicates, EmpiricalSample, Welford};
use sieve::processes::{
    conditional_mean_r, simulate_occupancy_fixed, simulate_occupancy_poisson, Mode, WalkPath, DEFAULT_EPS,
};
use sieve::DistributionSpec;

fn beta(theta: f64) -> DistributionSpec {
    DistributionSpec::beta(theta).unwrap()
}

fn harmonic(n: u64, theta: f64) -> f64 {
    (0..n).map(|i| theta / (theta + i as f64)).sum()
}

#[test]
fn ewens_block_count_at_one_hundred() {
    let spec = beta(1.0);
    let ks: Welford = run_replicates(21, 100_000, None, |rng, _| {
        Ok(simulate_occupancy_fixed(&spec, 100, rng)?.occupied as f64)
    })
    .unwrap()
    .into_iter()
    .collect();
    let h = harmonic(100, 1.0);
    assert!((h - 5.18738).abs() < 1e-5);
    assert!((ks.mean() - h).abs() <= 3.0 * ks.standard_error(), "{} vs {h}", ks.mean());
}

#[test]
fn conditional_mean_matches_ewens() {
    let spec = beta(1.0);
    let r: Welford = run_replicates(22, 10_000, None, |rng, _| {
        conditional_mean_r(&spec, Mode::Fixed(100), rng, DEFAULT_EPS)
    })
    .unwrap()
    .into_iter()
    .collect();
    let h = harmonic(100, 1.0);
    assert!((r.mean() - h).abs() <= 3.0 * r.standard_error(), "{} vs {h}", r.mean());
}

#[test]
fn empty_boxes_settle_near_one() {
    let spec = beta(1.0);
    let l: Welford = run_replicates(23, 100_000, None, |rng, _| {
        Ok(simulate_occupancy_fixed(&spec, 1_000_000, rng)?.empty as f64)
    })
    .unwrap()
    .into_iter()
    .collect();
    assert!((0.8..=1.2).contains(&l.mean()), "{}", l.mean());
}

#[test]
fn renewal_function_of_exponential_walk() {
    let spec = beta(1.0);
    let rho: Welford = run_replicates(24, 100_000, None, |rng, _| {
        Ok(WalkPath::generate(&spec, 10.0, 0.0, DEFAULT_EPS, rng)?.rho(10.0) as f64)
    })
    .unwrap()
    .into_iter()
    .collect();
    assert!((rho.mean() - 11.0).abs() <= 3.0 * rho.standard_error(), "{}", rho.mean());
}

#[test]
fn weighted_sum_tracks_rho() {
    let spec = beta(1.0);
    let x = 10.0;
    let ratio: Welford = run_replicates(25, 10_000, None, |rng, _| {
        let path = WalkPath::generate(&spec, x, x.exp(), DEFAULT_EPS, rng)?;
        Ok(path.r_weighted(x.exp()) / path.rho(x) as f64)
    })
    .unwrap()
    .into_iter()
    .collect();
    assert!((0.9..=1.1).contains(&ratio.mean()), "{}", ratio.mean());
}

#[test]
fn poisson_count_matches_conditional_mean() {
    let spec = beta(1.0);
    let t = 1e3;
    let k: Welford = run_replicates(26, 10_000, None, |rng, _| {
        Ok(simulate_occupancy_poisson(&spec, t, rng, DEFAULT_EPS)?.occupied as f64)
    })
    .unwrap()
    .into_iter()
    .collect();
    let r: Welford = run_replicates(27, 10_000, None, |rng, _| {
        conditional_mean_r(&spec, Mode::Poisson(t), rng, DEFAULT_EPS)
    })
    .unwrap()
    .into_iter()
    .collect();
    let se = (k.standard_error().powi(2) + r.standard_error().powi(2)).sqrt();
    assert!((k.mean() - r.mean()).abs() <= 3.0 * se, "{} vs {}", k.mean(), r.mean());
}

#[test]
fn depoissonization() {
    let spec = beta(1.0);
    let n = 10_000u64;
    let fixed = run_replicates(28, 10_000, None, |rng, _| {
        Ok(simulate_occupancy_fixed(&spec, n, rng)?.occupied as f64)
    })
    .unwrap();
    let poisson = run_replicates(29, 10_000, None, |rng, _| {
        Ok(simulate_occupancy_poisson(&spec, n as f64, rng, DEFAULT_EPS)?.occupied as f64)
    })
    .unwrap();
    let d = ks_two_sample(&EmpiricalSample::from_values(fixed), &EmpiricalSample::from_values(poisson)).unwrap();
    assert!(d <= 0.02, "KS {d}");
}

#[test]
fn renewal_increments_are_dominated() {
    let laws = [beta(1.0), DistributionSpec::pareto_log(1.5).unwrap(), DistributionSpec::example_gamma(0.3).unwrap()];
    let grid = [0.5, 2.0, 6.0];
    for (li, spec) in laws.iter().enumerate() {
        for (xi, &x) in grid.iter().enumerate() {
            for (yi, &y) in grid.iter().enumerate() {
                let seed = 100 + (li * 9 + xi * 3 + yi) as u64;
                let reps = 20_000;
                let inc: Welford = run_replicates(seed, reps, None, |rng, _| {
                    let p = WalkPath::generate(spec, x + y, 0.0, DEFAULT_EPS, rng)?;
                    Ok((p.rho(x + y) - p.rho(x)) as f64)
                })
                .unwrap()
                .into_iter()
                .collect();
                let fresh: Welford = run_replicates(seed + 1000, reps, None, |rng, _| {
                    Ok(WalkPath::generate(spec, y, 0.0, DEFAULT_EPS, rng)?.rho(y) as f64)
                })
                .unwrap()
                .into_iter()
                .collect();
                let se = (inc.standard_error().powi(2) + fresh.standard_error().powi(2)).sqrt();
                assert!(inc.mean() <= fresh.mean() + 3.0 * se, "{spec} x={x} y={y}: {} vs {}", inc.mean(), fresh.mean());
            }
        }
    }
}

#[test]
fn perturbed_count_ratio_approaches_one() {
    for spec in [beta(1.0), DistributionSpec::pareto_log(1.5).unwrap()] {
        let gaps: Vec<f64> = [5.0, 20.0, 80.0]
            .iter()
            .map(|&x| {
                let w: Welford = run_replicates(31, 10_000, None, |rng, _| {
                    let p = WalkPath::generate(&spec, x, 0.0, DEFAULT_EPS, rng)?;
                    Ok((p.n_count(x) as f64 / p.rho(x) as f64 - 1.0).abs())
                })
                .unwrap()
                .into_iter()
                .collect();
                w.mean()
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{spec}: {gaps:?}");
    }
}
