mod common;

use common::*;
use dcm_core::{standardize, tau_hat, DataMatrix, VariableSet};
use rand::Rng;
use rand_distr::StandardNormal;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn tau_matches_covariance_sum_form() {
    let mut rng = rng(101);
    for fixture in 0..100 {
        let n = rng.random_range(5..=50);
        let p = rng.random_range(2..=24);
        let data = random_matrix(&mut rng, n, p, 1.5);
        let size = rng.random_range(1..=p.min(20));
        let mut set: Vec<usize> = (0..p).collect();
        for j in 0..size {
            let k = rng.random_range(j..p);
            set.swap(j, k);
        }
        set.truncate(size);
        set.sort_unstable();
        let i = rng.random_range(0..p);

        let want = steiger_tau(&data, i, &set);
        let got = tau_hat(&standardize(&data).unwrap(), i, &VariableSet::new(set.iter().copied())).unwrap();
        assert!(close(got, want.max(1e-12), 1e-10), "fixture {fixture}: {got} vs {want}");
    }
}

#[test]
fn tau_matches_five_term_polynomial() {
    let mut rng = rng(102);
    for fixture in 0..100 {
        let n = rng.random_range(5..=50);
        let p = rng.random_range(3..=20);
        let data = random_matrix(&mut rng, n, p, 1.0);
        let set: Vec<usize> = (0..p).filter(|_| rng.random_bool(0.5)).collect();
        if set.is_empty() {
            continue;
        }
        let i = rng.random_range(0..p);
        let want = polynomial_tau(&data, i, &set);
        let got = tau_hat(&standardize(&data).unwrap(), i, &VariableSet::new(set.iter().copied())).unwrap();
        assert!(close(got, want.max(1e-12), 1e-10), "fixture {fixture}: {got} vs {want}");
    }
}

#[test]
fn tau_is_invariant_to_affine_rescaling() {
    let mut rng = rng(103);
    let data = random_matrix(&mut rng, 30, 6, 1.0);
    let set = VariableSet::new([1, 2, 4]);
    let base = tau_hat(&standardize(&data).unwrap(), 0, &set).unwrap();
    let shifted: Vec<f64> = (0..6).flat_map(|j| data.column(j).iter().map(move |v| 7.0 * v - 3.0 * j as f64)).collect();
    let moved = DataMatrix::from_columns(30, data.names().to_vec(), shifted).unwrap();
    let again = tau_hat(&standardize(&moved).unwrap(), 0, &set).unwrap();
    assert!((base - again).abs() < 1e-12);
}

/// Bivariate normal pairs; `tau_hat` of one against the other averaged over
/// replicates approaches the asymptotic variance `(1 − ρ²)²`, and agrees
/// with the Monte Carlo variance of `√n·r`.
#[test]
fn tau_is_consistent_for_bivariate_normal() {
    let (n, reps) = (2000, 200);
    for (rho, seed) in [(0.0, 1u64), (0.5, 2)] {
        let target = (1.0f64 - rho * rho).powi(2);
        let mut rng = rng(seed);
        let mut taus = Vec::with_capacity(reps);
        let mut roots = Vec::with_capacity(reps);
        for _ in 0..reps {
            let mut values = Vec::with_capacity(2 * n);
            let z1: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            values.extend_from_slice(&z1);
            for z in &z1 {
                let e: f64 = rng.sample(StandardNormal);
                values.push(rho * z + (1.0 - rho * rho).sqrt() * e);
            }
            let data = DataMatrix::from_columns(n, vec!["x".into(), "y".into()], values).unwrap();
            let cond = standardize(&data).unwrap();
            taus.push(tau_hat(&cond, 0, &VariableSet::new([1])).unwrap());
            roots.push((n as f64).sqrt() * cond.corr(0, 1));
        }
        let mean_tau = mean(&taus);
        assert!((mean_tau / target - 1.0).abs() < 0.10, "rho {rho}: mean tau {mean_tau}, target {target}");
        let m = mean(&roots);
        let mc_var = roots.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean_tau / mc_var - 1.0).abs() < 0.25, "rho {rho}: tau {mean_tau}, Monte Carlo {mc_var}");
    }
}
