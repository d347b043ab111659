#![allow(clippy::needless_range_loop)]

//! Independent reference implementations used by the integration tests.
//!
//! Everything here works from raw sample values with plain loops and shares
//! no code with the library.

#![allow(dead_code)]

use dcm_core::DataMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n × p` matrix of independent normals plus a shared factor of weight
/// `mix`, so correlations are not all near zero.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize, mix: f64) -> DataMatrix {
    let shared: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..p {
        let w: f64 = rng.random_range(-mix..=mix);
        let scale: f64 = rng.random_range(0.5..3.0);
        let shift: f64 = rng.random_range(-5.0..5.0);
        for s in &shared {
            let e: f64 = rng.sample(StandardNormal);
            values.push(shift + scale * (w * s + e));
        }
    }
    let names = (0..p).map(|j| format!("x{j}")).collect();
    DataMatrix::from_columns(n, names, values).unwrap()
}

/// Column `j` rescaled to mean 0 and population variance 1.
pub fn unit_variance(data: &DataMatrix, j: usize) -> Vec<f64> {
    let x = data.column(j);
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    x.iter().map(|v| (v - mean) / var.sqrt()).collect()
}

/// Textbook Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Steiger's covariance-sum estimator of `Var(√n · mean_j r_ij)`, literally:
/// `(1/|A|²) Σ_{j,k} [ r_iijk + ¼ r_ij r_ik (r_iiii + r_iijj + r_iikk + r_jjkk)
///  − ½ r_ij (r_iiik + r_ijjk) − ½ r_ik (r_iiij + r_ijkk) ]`
/// with `r_abcd` the sample mean of the product of unit-variance columns.
pub fn steiger_tau(data: &DataMatrix, i: usize, set: &[usize]) -> f64 {
    let n = data.n();
    let z: Vec<Vec<f64>> = (0..data.p()).map(|j| unit_variance(data, j)).collect();
    let r = |a: usize, b: usize| pearson(data.column(a), data.column(b));
    let m4 = |a: usize, b: usize, c: usize, d: usize| {
        (0..n).map(|l| z[a][l] * z[b][l] * z[c][l] * z[d][l]).sum::<f64>() / n as f64
    };
    let mut total = 0.0;
    for &j in set {
        for &k in set {
            let (rij, rik) = (r(i, j), r(i, k));
            total += m4(i, i, j, k) + 0.25 * rij * rik * (m4(i, i, i, i) + m4(i, i, j, j) + m4(i, i, k, k) + m4(j, j, k, k))
                - 0.5 * rij * (m4(i, i, i, k) + m4(i, j, j, k))
                - 0.5 * rik * (m4(i, i, i, j) + m4(i, j, k, k));
        }
    }
    total / (set.len() * set.len()) as f64
}

/// The five-term polynomial in `U_i` with centroid `W` and weighted squares `Y`.
pub fn polynomial_tau(data: &DataMatrix, i: usize, set: &[usize]) -> f64 {
    let n = data.n();
    let a = set.len() as f64;
    let z: Vec<Vec<f64>> = (0..data.p()).map(|j| unit_variance(data, j)).collect();
    let r: Vec<f64> = set.iter().map(|&j| pearson(data.column(i), data.column(j))).collect();
    let r_a = r.iter().sum::<f64>() / a;
    let mut acc = 0.0;
    for l in 0..n {
        let w = set.iter().map(|&j| z[j][l]).sum::<f64>() / a;
        let y = set.iter().zip(&r).map(|(&j, rij)| rij * z[j][l] * z[j][l]).sum::<f64>() / a;
        let u = z[i][l];
        acc += r_a * r_a / 4.0 * u.powi(4) - r_a * w * u.powi(3) + (r_a * y / 2.0 + w * w) * u * u - w * y * u
            + y * y / 4.0;
    }
    acc / n as f64
}

/// `(1/|A|) Σ_{j∈A} (r1_ij − r2_ij)` from raw data.
pub fn delta_direct(d1: &DataMatrix, d2: &DataMatrix, i: usize, set: &[usize]) -> f64 {
    set.iter()
        .map(|&j| pearson(d1.column(i), d1.column(j)) - pearson(d2.column(i), d2.column(j)))
        .sum::<f64>()
        / set.len() as f64
}

/// Benjamini–Yekutieli by definition: try every `k` from `m` down, with the
/// harmonic sum recomputed from scratch, then collect by comparison.
pub fn by_definition(pvalues: &[f64], alpha: f64) -> Vec<usize> {
    let m = pvalues.len();
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in (1..=m).rev() {
        let harmonic: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
        if sorted[k - 1] < (k as f64 * alpha / m as f64) / harmonic {
            let cut = sorted[k - 1];
            return (0..m).filter(|&i| pvalues[i] <= cut).collect();
        }
    }
    Vec::new()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// One-sample Kolmogorov–Smirnov test against `N(0, 1)`. Returns
/// `(D, p-value)` using the asymptotic Kolmogorov distribution with the
/// Stephens small-sample adjustment.
pub fn ks_normal(sample: &[f64]) -> (f64, f64) {
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (k, v) in x.iter().enumerate() {
        let f = normal_cdf(*v);
        d = d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n);
    }
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        p += 2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * t * t).exp();
    }
    (d, p.clamp(0.0, 1.0))
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}
