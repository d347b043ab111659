//! FISH comparison baseline: hierarchical clustering of the Fisher-weighted
//! differential correlation matrix.
//!
//! Unlike the core search this materializes `p × p` values and is guarded to
//! `p ≤ MAX_VARIABLES`.

use dcm_core::{fisher_z, ConditionPair, VariableSet};

use crate::error::{Error, Result};

pub const MAX_VARIABLES: usize = 5000;

/// Condensed upper-triangle storage, row-major over `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensed {
    p: usize,
    values: Vec<f64>,
}

impl Condensed {
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.p - i - 1) / 2 + (j - i - 1)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.values[self.offset(i, j)]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j);
        self.values[o] = v;
    }

    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(p * p.saturating_sub(1) / 2);
        for i in 0..p {
            for j in i + 1..p {
                values.push(f(i, j));
            }
        }
        Condensed { p, values }
    }
}

/// One agglomeration step. Cluster ids follow the usual convention: leaves
/// are `0..p`, the cluster formed by merge `m` is `p + m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// `√(n₁−3)·z(r₁) − √(n₂−3)·z(r₂)` for every pair.
pub fn fisher_difference(pair: &ConditionPair) -> Result<Condensed> {
    let p = pair.p();
    if p > MAX_VARIABLES {
        return Err(Error::Validation(format!("FISH needs a p × p matrix; p = {p} exceeds {MAX_VARIABLES}")));
    }
    let (c1, c2) = (pair.cond1(), pair.cond2());
    let w1 = ((c1.n() as f64) - 3.0).sqrt();
    let w2 = ((c2.n() as f64) - 3.0).sqrt();
    Ok(Condensed::from_fn(p, |i, j| w1 * fisher_z(c1.corr(i, j)) - w2 * fisher_z(c2.corr(i, j))))
}

/// Min–max rescaling to `[0, 1]`, largest differences closest. The diagonal
/// is 0 in both matrices and is left out of the range. A constant input maps
/// to all zeros.
pub fn to_dissimilarity(d: &Condensed) -> Condensed {
    let (min, max) = d.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = max - min;
    let values = if range > 0.0 {
        d.values.iter().map(|v| 1.0 - (v - min) / range).collect()
    } else {
        vec![0.0; d.values.len()]
    };
    Condensed { p: d.p, values }
}

/// Average-linkage agglomeration by the nearest-neighbour chain algorithm,
/// `O(p²)` time on the condensed matrix. Merges are returned in
/// nondecreasing height; equal heights keep discovery order.
pub fn average_linkage(dist: &Condensed) -> Vec<Merge> {
    let p = dist.p;
    let mut d = dist.clone();
    let mut size = vec![1usize; p];
    let mut alive = vec![true; p];
    // Slot-level merges; slot `b` absorbs `a` and remains as the new cluster.
    let mut raw: Vec<(usize, usize, f64)> = Vec::with_capacity(p.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::with_capacity(p);

    for _ in 1..p {
        if chain.is_empty() {
            chain.push(alive.iter().position(|&a| a).expect("a live cluster"));
        }
        let (a, b, height) = loop {
            let x = *chain.last().unwrap();
            let prev = if chain.len() >= 2 { Some(chain[chain.len() - 2]) } else { None };
            let mut best = prev;
            let mut best_d = prev.map_or(f64::INFINITY, |y| d.get(x, y));
            for (y, _) in alive.iter().enumerate().filter(|&(y, &a)| a && y != x) {
                let dy = d.get(x, y);
                if dy < best_d {
                    best = Some(y);
                    best_d = dy;
                }
            }
            let y = best.expect("at least two live clusters");
            if Some(y) == prev {
                chain.pop();
                chain.pop();
                break (x, y, best_d);
            }
            chain.push(y);
        };

        let (na, nb) = (size[a] as f64, size[b] as f64);
        for (z, _) in alive.iter().enumerate().filter(|&(z, &live)| live && z != a && z != b) {
            let v = (na * d.get(a, z) + nb * d.get(b, z)) / (na + nb);
            d.set(b, z, v);
        }
        alive[a] = false;
        size[b] += size[a];
        raw.push((a, b, height));
    }

    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&x, &y| raw[x].2.total_cmp(&raw[y].2));

    // Relabel slots to cluster ids through a union-find over the sorted merges.
    let mut parent: Vec<usize> = (0..2 * p).collect();
    let mut count = vec![1usize; 2 * p];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut merges = Vec::with_capacity(raw.len());
    for (m, &r) in order.iter().enumerate() {
        let (a, b, height) = raw[r];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let id = p + m;
        parent[ra] = id;
        parent[rb] = id;
        count[id] = count[ra] + count[rb];
        let (left, right) = if ra < rb { (ra, rb) } else { (rb, ra) };
        merges.push(Merge { left, right, height, size: count[id] });
    }
    merges
}

/// Scans the dendrogram bottom-up and returns the larger child of the first
/// merge that would exceed `target_size` (the lower id on equal sizes). When
/// no merge exceeds it, the root is returned.
pub fn cut_at_size(p: usize, merges: &[Merge], target_size: usize) -> VariableSet {
    let mut members: Vec<Vec<usize>> = (0..p).map(|j| vec![j]).collect();
    members.reserve(merges.len());
    let size_of = |id: usize| if id < p { 1 } else { merges[id - p].size };
    for m in merges {
        if m.size > target_size {
            let (l, r) = (size_of(m.left), size_of(m.right));
            let pick = if r > l { m.right } else { m.left };
            return VariableSet::new(members[pick].iter().copied());
        }
        let mut joined = std::mem::take(&mut members[m.left]);
        joined.append(&mut members[m.right]);
        members.push(joined);
    }
    match members.last() {
        Some(all) if p > 0 => VariableSet::new(all.iter().copied()),
        _ => VariableSet::empty(),
    }
}

/// The FISH baseline: a nonempty cluster of at most `target_size` variables
/// (unless `target_size` is 0), or every variable when `target_size ≥ p`.
pub fn fish_baseline(pair: &ConditionPair, target_size: usize) -> Result<VariableSet> {
    let diff = fisher_difference(pair)?;
    if target_size == 0 {
        return Err(Error::Validation("FISH target size must be positive".into()));
    }
    let merges = average_linkage(&to_dissimilarity(&diff));
    Ok(cut_at_size(pair.p(), &merges, target_size))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_square(rows: &[&[f64]]) -> Condensed {
        Condensed::from_fn(rows.len(), |i, j| rows[i][j])
    }

    #[test]
    fn condensed_indexing() {
        let c = Condensed::from_fn(5, |i, j| (10 * i + j) as f64);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 0.0 } else { (10 * i.min(j) + i.max(j)) as f64 };
                assert_eq!(c.get(i, j), want);
            }
        }
    }

    #[test]
    fn hand_worked_average_linkage() {
        // {0,1} at 1, {2,3} at 2, then the two pairs at mean(4,5,6,7) = 5.5.
        let d = from_square(&[
            &[0.0, 1.0, 4.0, 5.0],
            &[1.0, 0.0, 6.0, 7.0],
            &[4.0, 6.0, 0.0, 2.0],
            &[5.0, 7.0, 2.0, 0.0],
        ]);
        let m = average_linkage(&d);
        assert_eq!(m.len(), 3);
        assert_eq!((m[0].left, m[0].right, m[0].height, m[0].size), (0, 1, 1.0, 2));
        assert_eq!((m[1].left, m[1].right, m[1].height, m[1].size), (2, 3, 2.0, 2));
        assert_eq!((m[2].left, m[2].right, m[2].size), (4, 5, 4));
        assert!((m[2].height - 5.5).abs() < 1e-12);
    }

    #[test]
    fn chaining_case_uses_cluster_averages() {
        // 0-1 at 1; 2 joins at mean(2, 3) = 2.5 rather than single-link 2.
        let d = from_square(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 3.0], &[2.0, 3.0, 0.0]]);
        let m = average_linkage(&d);
        assert_eq!((m[1].left, m[1].right), (2, 3));
        assert!((m[1].height - 2.5).abs() < 1e-12);
    }

    #[test]
    fn cut_rule() {
        let d = from_square(&[
            &[0.0, 1.0, 4.0, 5.0],
            &[1.0, 0.0, 6.0, 7.0],
            &[4.0, 6.0, 0.0, 2.0],
            &[5.0, 7.0, 2.0, 0.0],
        ]);
        let m = average_linkage(&d);
        assert_eq!(cut_at_size(4, &m, 1), VariableSet::new([0]));
        assert_eq!(cut_at_size(4, &m, 2), VariableSet::new([0, 1]));
        assert_eq!(cut_at_size(4, &m, 3), VariableSet::new([0, 1]));
        assert_eq!(cut_at_size(4, &m, 4), VariableSet::all(4));
        assert_eq!(cut_at_size(4, &m, 9), VariableSet::all(4));
    }

    #[test]
    fn constant_difference_maps_to_zero_dissimilarity() {
        let c = Condensed::from_fn(4, |_, _| 0.0);
        assert!(to_dissimilarity(&c).values.iter().all(|&v| v == 0.0));
        let c = Condensed::from_fn(3, |i, j| (i + j) as f64);
        let d = to_dissimilarity(&c);
        assert_eq!(d.get(1, 2), 0.0);
        assert_eq!(d.get(0, 1), 1.0);
    }
}
