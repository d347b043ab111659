//! Raw and standardized condition data, variable sets, and the centroid
//! primitives every other module builds on.
//!
//! A [`StandardizedCondition`] stores each variable as a centered column of
//! unit Euclidean norm, so the inner product of two columns is their Pearson
//! sample correlation. The sample correlation matrix is never formed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{dot, sqrt};

/// Minimum per-condition sample count; `n − 3` must be positive for the
/// Fisher weighting of the initialization score.
pub const MIN_SAMPLES: usize = 4;

/// Below this many samples the variance estimator is known to be
/// anticonservative.
pub const SMALL_SAMPLE_WARNING: usize = 30;

/// One condition's raw measurements, `n` samples by `p` variables.
///
/// Values are stored column-major: variable `j` occupies
/// `values[j * n..(j + 1) * n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    names: Vec<String>,
    n: usize,
    p: usize,
}

impl DataMatrix {
    /// Builds a matrix from column-major values, rejecting non-finite
    /// entries and duplicate names.
    pub fn from_columns(n: usize, names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let p = names.len();
        if values.len() != n * p {
            return Err(Error::Shape { n, p, expected: n * p, got: values.len() });
        }
        if n == 0 {
            return Err(Error::TooFewSamples { n, min: 1 });
        }
        check_unique(&names)?;
        for (j, col) in values.chunks_exact(n).enumerate() {
            if let Some(sample) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { variable: names[j].clone(), sample });
            }
        }
        Ok(Self { values, names, n, p })
    }

    /// Builds a matrix from sample rows.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = names.len();
        let n = rows.len();
        let mut values = alloc::vec![0.0; n * p];
        for (l, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Shape { n, p, expected: p, got: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                values[j * n + l] = v;
            }
        }
        Self::from_columns(n, names, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn value(&self, sample: usize, variable: usize) -> f64 {
        self.values[variable * self.n + sample]
    }

    /// Returns a copy whose columns follow `order` (indices into `self`).
    pub fn select_columns(&self, order: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(order.len() * self.n);
        let mut names = Vec::with_capacity(order.len());
        for &j in order {
            if j >= self.p {
                return Err(Error::IndexOutOfRange { index: j, p: self.p });
            }
            values.extend_from_slice(self.column(j));
            names.push(self.names[j].clone());
        }
        Self::from_columns(self.n, names, values)
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateVariable(name.clone()));
        }
    }
    Ok(())
}

/// One condition with every column centered and scaled to unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedCondition {
    columns: Vec<f64>,
    names: Vec<String>,
    n: usize,
    p: usize,
}

impl StandardizedCondition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Unit-norm column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.n..(j + 1) * self.n]
    }

    /// Sample correlation of variables `i` and `j`.
    #[inline]
    pub fn corr(&self, i: usize, j: usize) -> f64 {
        dot(self.column(i), self.column(j))
    }

    /// Views the standardized columns as raw data.
    pub fn to_data_matrix(&self) -> DataMatrix {
        DataMatrix {
            values: self.columns.clone(),
            names: self.names.clone(),
            n: self.n,
            p: self.p,
        }
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.columns[j * self.n..(j + 1) * self.n]
    }
}

/// Centers `col` and scales it to unit norm in place. Returns the norm of
/// the centered column before scaling.
pub(crate) fn center_and_normalize(col: &mut [f64]) -> f64 {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    for v in col.iter_mut() {
        *v -= mean;
    }
    let norm = sqrt(dot(col, col));
    if norm > 0.0 {
        for v in col.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

/// Centers and unit-normalizes every column.
///
/// A column whose centered norm is zero (up to a relative tolerance of the
/// raw magnitude) is rejected rather than dropped, so both conditions keep
/// the same index space.
pub fn standardize(data: &DataMatrix) -> Result<StandardizedCondition> {
    let mut columns = data.values.clone();
    for (j, col) in columns.chunks_exact_mut(data.n).enumerate() {
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let norm = center_and_normalize(col);
        let floor = 1e-12 * scale.max(f64::MIN_POSITIVE) * sqrt(data.n as f64);
        if norm.is_nan() || norm <= floor || data.n < 2 {
            return Err(Error::ConstantColumn(data.names[j].clone()));
        }
    }
    Ok(StandardizedCondition { columns, names: data.names.clone(), n: data.n, p: data.p })
}

/// Sorted, duplicate-free set of variable indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableSet(Vec<usize>);

impl VariableSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `0..p`.
    pub fn all(p: usize) -> Self {
        Self((0..p).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.iter().filter(|&i| other.contains(i)).count()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Errors unless the set is nonempty and every index is below `p`.
    pub fn check(&self, p: usize) -> Result<()> {
        match self.0.last() {
            None => Err(Error::EmptySet),
            Some(&max) if max >= p => Err(Error::IndexOutOfRange { index: max, p }),
            Some(_) => Ok(()),
        }
    }
}

impl FromIterator<usize> for VariableSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self::new(iter)
    }
}

/// Mean of the standardized columns in `set`; its norm lies in `[0, 1]`.
pub fn centroid(cond: &StandardizedCondition, set: &VariableSet) -> Result<Vec<f64>> {
    set.check(cond.p)?;
    Ok(centroid_unchecked(cond, set))
}

pub(crate) fn centroid_unchecked(cond: &StandardizedCondition, set: &VariableSet) -> Vec<f64> {
    let mut w = alloc::vec![0.0; cond.n];
    for j in set.iter() {
        for (acc, v) in w.iter_mut().zip(cond.column(j)) {
            *acc += v;
        }
    }
    let inv = 1.0 / set.len() as f64;
    for v in w.iter_mut() {
        *v *= inv;
    }
    w
}

/// Average correlation of variable `i` with the members of `set`,
/// computed as `centroid · column_i`.
pub fn avg_corr(cond: &StandardizedCondition, i: usize, set: &VariableSet) -> Result<f64> {
    set.check(cond.p)?;
    if i >= cond.p {
        return Err(Error::IndexOutOfRange { index: i, p: cond.p });
    }
    Ok(dot(&centroid_unchecked(cond, set), cond.column(i)))
}

/// Two standardized conditions over the same variables, plus a mask of
/// variables still eligible for selection.
///
/// Variables become ineligible when residualization leaves nothing of them;
/// their statistics are still reported but they are never selected.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionPair {
    cond1: StandardizedCondition,
    cond2: StandardizedCondition,
    active: Vec<bool>,
}

impl ConditionPair {
    /// Pairs two conditions. Variable names must agree position by position;
    /// align the raw files by name before standardizing.
    pub fn new(cond1: StandardizedCondition, cond2: StandardizedCondition) -> Result<Self> {
        if cond1.p != cond2.p {
            return Err(Error::VariableMismatch(format!(
                "condition 1 has {} variables, condition 2 has {}",
                cond1.p, cond2.p
            )));
        }
        if let Some(j) = (0..cond1.p).find(|&j| cond1.names[j] != cond2.names[j]) {
            return Err(Error::VariableMismatch(format!(
                "position {j}: `{}` vs `{}`",
                cond1.names[j], cond2.names[j]
            )));
        }
        for n in [cond1.n, cond2.n] {
            if n < MIN_SAMPLES {
                return Err(Error::TooFewSamples { n, min: MIN_SAMPLES });
            }
        }
        if cond1.n.min(cond2.n) < SMALL_SAMPLE_WARNING {
            log::warn!(
                "min(n1, n2) = {} < {}: the variance estimate is anticonservative at this sample size",
                cond1.n.min(cond2.n),
                SMALL_SAMPLE_WARNING
            );
        }
        let active = alloc::vec![true; cond1.p];
        Ok(Self { cond1, cond2, active })
    }

    /// Standardizes and pairs two raw matrices.
    pub fn from_data(data1: &DataMatrix, data2: &DataMatrix) -> Result<Self> {
        Self::new(standardize(data1)?, standardize(data2)?)
    }

    pub fn cond1(&self) -> &StandardizedCondition {
        &self.cond1
    }

    pub fn cond2(&self) -> &StandardizedCondition {
        &self.cond2
    }

    pub fn p(&self) -> usize {
        self.cond1.p
    }

    pub fn names(&self) -> &[String] {
        &self.cond1.names
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// The same pair with the conditions exchanged, for mining sets that are
    /// more correlated under condition 2.
    pub fn swapped(&self) -> Self {
        Self { cond1: self.cond2.clone(), cond2: self.cond1.clone(), active: self.active.clone() }
    }

    pub(crate) fn replace(&mut self, cond1: StandardizedCondition, cond2: StandardizedCondition) {
        self.cond1 = cond1;
        self.cond2 = cond2;
    }

    pub(crate) fn deactivate(&mut self, i: usize) {
        self.active[i] = false;
    }
}
