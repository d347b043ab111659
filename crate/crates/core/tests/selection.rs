mod common;

use common::*;
use dcm_core::{by_fdr_select, p_value, sigma0, test_step, ConditionPair, VariableSet};
use rand::Rng;

#[test]
fn by_selection_matches_definition() {
    let mut rng = rng(301);
    for case in 0..1000 {
        let m = rng.random_range(1..=100);
        let alpha = [0.01, 0.05, 0.1, 0.2][case % 4];
        let signal = rng.random_range(0..=m);
        let mut p: Vec<f64> = (0..m)
            .map(|i| if i < signal { rng.random::<f64>() * 1e-3 } else { rng.random::<f64>() })
            .collect();
        if case % 3 == 0 {
            // Coarse rounding produces ties.
            p.iter_mut().for_each(|v| *v = (*v * 200.0).round() / 200.0);
        }
        let got = by_fdr_select(&p, alpha);
        assert_eq!(got.as_slice(), by_definition(&p, alpha).as_slice(), "case {case}: {p:?}");
    }
}

#[test]
fn by_worked_examples() {
    assert_eq!(by_fdr_select(&[0.001, 0.2, 0.9], 0.05), VariableSet::new([0]));
    assert_eq!(by_fdr_select(&[0.01], 0.05), VariableSet::new([0]));
    assert!(by_fdr_select(&[1.0; 10], 0.05).is_empty());
}

#[test]
fn p_value_reference_points() {
    assert_eq!(p_value(0.0, 1.0), 0.5);
    assert!((p_value(1.6449, 1.0) - 0.05).abs() < 1e-4);
    assert!(p_value(-0.3, 1.0) > 0.5);
    assert!((p_value(2.0, 0.5) - (1.0 - normal_cdf(4.0))).abs() < 1e-15);
    assert!(sigma0(1.0, 100, 0.5, 50) > sigma0(1.0, 101, 0.5, 50));
    assert!(sigma0(1.0, 100, 0.5, 50) > sigma0(1.0, 100, 0.5, 51));
}

#[test]
fn report_is_consistent_with_components() {
    let mut rng = rng(302);
    let d1 = random_matrix(&mut rng, 40, 15, 1.5);
    let d2 = random_matrix(&mut rng, 35, 15, 0.2);
    let pair = ConditionPair::from_data(&d1, &d2).unwrap();
    let set = VariableSet::new([0, 1, 2, 3]);
    let step = test_step(&pair, &set, 0.05).unwrap();
    assert_eq!(step.report.set_tested, set);
    for i in 0..15 {
        let t1 = steiger_tau(&d1, i, set.as_slice()).max(1e-12);
        let t2 = steiger_tau(&d2, i, set.as_slice()).max(1e-12);
        let s = sigma0(t1, 40, t2, 35);
        assert!((step.report.sigma0[i] - s).abs() < 1e-10);
        let delta = delta_direct(&d1, &d2, i, set.as_slice());
        assert!((step.report.delta[i] - delta).abs() < 1e-10);
        assert!((step.report.pvalues[i] - (1.0 - normal_cdf(delta / s))).abs() < 1e-9);
    }
    assert_eq!(step.selected, by_fdr_select(&step.report.pvalues, 0.05));
}

#[test]
fn invalid_alpha_rejected() {
    let mut rng = rng(303);
    let d = random_matrix(&mut rng, 10, 4, 1.0);
    let pair = ConditionPair::from_data(&d, &d).unwrap();
    for alpha in [0.0, 1.0, -0.1, f64::NAN] {
        assert!(test_step(&pair, &VariableSet::new([0, 1]), alpha).is_err());
    }
}
