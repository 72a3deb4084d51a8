use abcpt::tb::*;
use abcpt::{stream, Model, ParameterVector};
use proptest::prelude::*;

/// Probability that the embedded walk with up-step `p` started at 1 hits
/// `top` before 0, by iterating the first-step equations.
fn reach_probability(p: f64, top: usize) -> f64 {
    let mut h = vec![0.0; top + 1];
    h[top] = 1.0;
    for _ in 0..200_000 {
        let mut change: f64 = 0.0;
        for k in 1..top {
            let v = p * h[k + 1] + (1.0 - p) * h[k - 1];
            change = change.max((v - h[k]).abs());
            h[k] = v;
        }
        if change < 1e-15 {
            break;
        }
    }
    h[1]
}

fn extinction_frequency(params: TbParams, stop: usize, runs: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, 0);
    let extinct = (0..runs)
        .filter(|_| simulate_epidemic(&params, stop, u64::MAX, &mut rng).unwrap().is_extinct())
        .count();
    extinct as f64 / runs as f64
}

#[test]
fn extinction_matches_first_step_analysis() {
    let params = TbParams::new(2.0, 1.0, 0.0);
    let p_up = 2.0 / 3.0;
    let oracle = 1.0 - reach_probability(p_up, 50);
    let gambler = {
        let r: f64 = 0.5;
        1.0 - (1.0 - r) / (1.0 - r.powi(50))
    };
    assert!((oracle - gambler).abs() < 1e-12);
    let runs = 100_000;
    let freq = extinction_frequency(params, 50, runs, 41);
    let se = (oracle * (1.0 - oracle) / runs as f64).sqrt();
    assert!((freq - oracle).abs() < 3.0 * se, "{freq} vs {oracle}");
}

#[test]
fn extinction_probability_is_delta_over_alpha() {
    let runs = 100_000;
    let freq = extinction_frequency(TbParams::new(2.0, 1.0, 0.0), 1000, runs, 42);
    let se = (0.25 / runs as f64).sqrt();
    assert!((freq - 0.5).abs() < 3.0 * se, "{freq}");
}

#[test]
fn mutation_does_not_change_extinction() {
    let runs = 50_000;
    let freq = extinction_frequency(TbParams::new(1.5, 0.5, 0.7), 500, runs, 43);
    let q = 0.5 / 1.5;
    let se = (q * (1.0 - q) / runs as f64).sqrt();
    assert!((freq - q).abs() < 3.0 * se, "{freq}");
}

#[test]
fn subsample_is_hypergeometric() {
    let pop = EpidemicPopulation::from_counts(&[50, 20, 30]).unwrap();
    let mut rng = stream(45, 0);
    let draws = 100_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..draws {
        let counts = subsample_genotype_counts(&pop, 10, &mut rng).unwrap();
        assert_eq!(counts.iter().sum::<u32>(), 10);
        let k = counts[0] as f64;
        sum += k;
        sq += k * k;
    }
    let mean = sum / draws as f64;
    let var = sq / draws as f64 - mean * mean;
    let var_hyper = 10.0 * 0.5 * 0.5 * 90.0 / 99.0;
    assert!((mean - 5.0).abs() < 3.0 * (var_hyper / draws as f64).sqrt(), "{mean}");
    assert!((var - var_hyper).abs() < 0.05, "{var} vs {var_hyper}");
}

#[test]
fn single_genotype_subsample() {
    let pop = EpidemicPopulation::from_counts(&[600]).unwrap();
    let mut rng = stream(46, 0);
    let c = subsample_cases(&pop, 473, &mut rng).unwrap();
    assert_eq!(c.sizes(), &[473]);
    assert_eq!(stat_h(&c), 0.0);
}

#[test]
fn model_simulates_a_sample_or_extinction() {
    let model = TbModel::new();
    let mut rng = stream(47, 0);
    let theta = ParameterVector::new(vec![1.1, 0.5, 0.2]);
    let mut samples = 0;
    for _ in 0..5 {
        match model.simulate(&theta, &mut rng).unwrap() {
            TbDataset::Sample(c) => {
                samples += 1;
                assert_eq!(c.sample_size(), 473);
                let (s, d) = model.discrepancy(&TbDataset::Sample(c));
                let s = s.unwrap();
                assert!((1.0..=473.0).contains(&s[0]));
                assert!(d.is_finite() && d >= 0.0);
            }
            TbDataset::Extinct => {
                assert_eq!(model.discrepancy(&TbDataset::Extinct).1, f64::INFINITY);
            }
        }
    }
    assert!(samples > 0);
}

#[test]
fn proposals_are_tempered() {
    let model = TbModel::new().prepare_temperatures(&[1.0, 2.0]).unwrap();
    let from = ParameterVector::new(vec![1.0, 0.5, 0.2]);
    let mut rng = stream(48, 0);
    let n = 200_000;
    let mut var = [0.0; 2];
    for (k, t) in [1.0, 2.0].into_iter().enumerate() {
        for _ in 0..n {
            let p = model.propose(&from, t, &mut rng);
            var[k] += (p[2] - 0.2).powi(2);
        }
        var[k] /= n as f64;
    }
    assert!((var[0] / 0.000225 - 1.0).abs() < 0.02);
    assert!((var[1] / 0.015 - 1.0).abs() < 0.02);
    let a = ParameterVector::new(vec![1.2, 0.4, 0.25]);
    assert_eq!(model.proposal_log_density(&a, &from, 2.0), model.proposal_log_density(&from, &a, 2.0));
}

proptest! {
    #[test]
    fn statistics_stay_in_range(sizes in prop::collection::vec(1u32..40, 1..120)) {
        let c = ClusterConfiguration::new(sizes.clone()).unwrap();
        let n = c.sample_size() as f64;
        let h = stat_h(&c);
        prop_assert!(h >= 0.0 && h <= 1.0 - 1.0 / n + 1e-15);
        prop_assert!(stat_g(&c) >= 1 && stat_g(&c) as f64 <= n);
        let mut rev = sizes;
        rev.reverse();
        let r = ClusterConfiguration::new(rev).unwrap();
        prop_assert_eq!(stat_h(&r), h);
        prop_assert_eq!(stat_g(&r), stat_g(&c));
    }

    #[test]
    fn distance_is_a_semimetric(g1 in 1.0f64..473.0, h1 in 0.0f64..1.0, g2 in 1.0f64..473.0, h2 in 0.0f64..1.0) {
        let a = abcpt::SummaryValue::new(vec![g1.round(), h1]);
        let b = abcpt::SummaryValue::new(vec![g2.round(), h2]);
        let m = TbModel::new();
        prop_assert_eq!(m.distance(&a, &b), m.distance(&b, &a));
        prop_assert!(m.distance(&a, &b) >= 0.0);
        prop_assert_eq!(m.distance(&a, &a), 0.0);
    }
}
