//! Rank-one residualization of a discovered set.
//!
//! The correlation submatrix of the set is modeled as `ΛΛᵀ + Ω`. `Λ` is the
//! leading eigenpair of the submatrix scaled by `√λ₁`. Each member column is
//! then replaced by its residual after regressing out the factor score
//! `f = X̃_A Λ / (ΛᵀΛ)`, and re-standardized. Columns outside the set are
//! untouched.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::data::{center_and_normalize, StandardizedCondition, VariableSet};
use crate::error::{Error, Result};
use crate::math::sqrt;

/// Residual columns with a centered norm below this are treated as fully
/// explained by the factor.
const RESIDUAL_NORM_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    /// One loading per member, in ascending index order.
    pub loadings: Vec<f64>,
    /// Leading eigenvalue of the member correlation submatrix.
    pub eigenvalue: f64,
    /// Share of the submatrix trace carried by the leading eigenvalue.
    pub explained: f64,
}

/// Result of [`residualize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Residualized {
    pub condition: StandardizedCondition,
    /// Members whose residual vanished. Their columns are left as they were;
    /// callers should exclude them from further mining.
    pub dropped: Vec<usize>,
}

/// Estimates the rank-one loadings of `set`. Materializes only the
/// `|A| × |A|` submatrix.
pub fn estimate_loadings(cond: &StandardizedCondition, set: &VariableSet) -> Result<FactorModel> {
    let k = set.len();
    if k < 2 {
        return Err(Error::SetTooSmall { min: 2, got: k });
    }
    set.check(cond.p())?;
    let idx = set.as_slice();
    let sub = DMatrix::from_fn(k, k, |a, b| if a == b { 1.0 } else { cond.corr(idx[a], idx[b]) });
    let eig = sub.symmetric_eigen();

    // Largest eigenvalue; the first index wins ties.
    let mut lead = 0;
    for c in 1..k {
        if eig.eigenvalues[c] > eig.eigenvalues[lead] {
            lead = c;
        }
    }
    let lambda = eig.eigenvalues[lead].max(0.0);
    let v = eig.eigenvectors.column(lead);
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let root = sqrt(lambda);
    let loadings = v.iter().map(|x| (sign * root * x).clamp(-1.0, 1.0)).collect();
    Ok(FactorModel { loadings, eigenvalue: lambda, explained: lambda / k as f64 })
}

/// Regresses the factor score out of every member of `set` and
/// re-standardizes the residual columns.
pub fn residualize(cond: &StandardizedCondition, set: &VariableSet, model: &FactorModel) -> Result<Residualized> {
    set.check(cond.p())?;
    if model.loadings.len() != set.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "model has {} loadings for a set of {}",
            model.loadings.len(),
            set.len()
        )));
    }
    let norm2: f64 = model.loadings.iter().map(|l| l * l).sum();
    let mut out = cond.clone();
    let mut dropped = Vec::new();
    if norm2 <= 0.0 {
        return Ok(Residualized { condition: out, dropped });
    }

    let n = cond.n();
    let mut factor = alloc::vec![0.0; n];
    for (j, &l) in set.iter().zip(&model.loadings) {
        for (f, v) in factor.iter_mut().zip(cond.column(j)) {
            *f += l * v;
        }
    }
    factor.iter_mut().for_each(|f| *f /= norm2);

    let mut buf = alloc::vec![0.0; n];
    for (j, &l) in set.iter().zip(&model.loadings) {
        for ((b, v), f) in buf.iter_mut().zip(cond.column(j)).zip(&factor) {
            *b = v - f * l;
        }
        if center_and_normalize(&mut buf) < RESIDUAL_NORM_FLOOR {
            dropped.push(j);
            continue;
        }
        out.column_mut(j).copy_from_slice(&buf);
    }
    Ok(Residualized { condition: out, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{standardize, DataMatrix};
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;

    fn cond(n: usize, cols: &[Vec<f64>]) -> StandardizedCondition {
        let names: Vec<String> = (0..cols.len()).map(|j| format!("v{j}")).collect();
        let values: Vec<f64> = cols.iter().flatten().copied().collect();
        standardize(&DataMatrix::from_columns(n, names, values).unwrap()).unwrap()
    }

    #[test]
    fn two_by_two_uncorrelated_is_a_tie() {
        let c = cond(4, &[vec![1.0, -1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0, -1.0]]);
        let m = estimate_loadings(&c, &VariableSet::new([0, 1])).unwrap();
        assert!((m.eigenvalue - 1.0).abs() < 1e-12);
        let mut sorted: Vec<f64> = m.loadings.iter().map(|l| l.abs()).collect();
        sorted.sort_by(|a, b| a.total_cmp(b));
        assert!(sorted[0].abs() < 1e-12 && (sorted[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_correlated_closed_form() {
        // Build two columns with sample correlation exactly 0.8.
        let x = vec![1.0, -1.0, 1.0, -1.0];
        let y = vec![1.0, 1.0, -1.0, -1.0];
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.8 * a + 0.6 * b).collect();
        let c = cond(4, &[x, z]);
        assert!((c.corr(0, 1) - 0.8).abs() < 1e-14);
        let m = estimate_loadings(&c, &VariableSet::new([0, 1])).unwrap();
        assert!((m.eigenvalue - 1.8).abs() < 1e-12);
        for l in &m.loadings {
            assert!((l - 0.9f64.sqrt()).abs() < 1e-12); // √1.8 / √2
        }
        assert!((m.explained - 0.9).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pair_stays_uncorrelated_and_locality_holds() {
        let c = cond(
            4,
            &[vec![1.0, -1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0, -1.0], vec![0.3, 2.0, -1.0, 0.5]],
        );
        let set = VariableSet::new([0, 1]);
        let m = estimate_loadings(&c, &set).unwrap();
        let r = residualize(&c, &set, &m).unwrap();
        assert_eq!(r.condition.column(2), c.column(2));
        // The leading loading axis is fully explained; that member is dropped.
        assert_eq!(r.dropped.len(), 1);
        assert!(r.condition.corr(0, 1).abs() < 1e-12);
    }

    #[test]
    fn too_small_set_rejected() {
        let c = cond(4, &[vec![1.0, -1.0, 1.0, -1.0]]);
        assert_eq!(estimate_loadings(&c, &VariableSet::new([0])), Err(Error::SetTooSmall { min: 2, got: 1 }));
    }
}
