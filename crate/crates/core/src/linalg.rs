//! Exact linear algebra over Gaussian rationals.

use std::collections::BTreeMap;

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::CRational;

pub type Matrix = Vec<Vec<CRational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| if i == k { CRational::one() } else { CRational::zero() })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
/// Only the first `cols` columns are eligible as pivots.
fn rref(m: &mut Matrix, cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut work = m.clone();
    rref(&mut work, cols).len()
}

/// Solves `a x = b` for every right-hand side column of `bs`.
/// Free variables are set to zero; an inconsistent system is an error.
pub fn solve_many(a: &Matrix, bs: &[Vec<CRational>]) -> Result<Vec<Vec<CRational>>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let k = bs.len();
    let mut aug: Matrix = (0..rows)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend(bs.iter().map(|b| b[i].clone()));
            row
        })
        .collect();
    let pivots = rref(&mut aug, cols);
    for row in aug.iter().skip(pivots.len()) {
        if row[cols..].iter().any(|x| !x.is_zero()) {
            return Err(Error::Inconsistent(format!(
                "{}x{} system has no solution",
                rows, cols
            )));
        }
    }
    let mut out = vec![vec![CRational::zero(); cols]; k];
    for (r, &c) in pivots.iter().enumerate() {
        for (s, sol) in out.iter_mut().enumerate() {
            sol[c] = aug[r][cols + s].clone();
        }
    }
    Ok(out)
}

pub fn solve(a: &Matrix, b: &[CRational]) -> Result<Vec<CRational>> {
    Ok(solve_many(a, &[b.to_vec()])?.pop().unwrap_or_default())
}

/// Inverse of a nonsingular square matrix.
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| {
            let mut r = row.clone();
            r.extend(id);
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = CRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][c].is_zero() {
                            acc += &(&row[k] * &b[k][c]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn conj_transpose(a: &Matrix) -> Matrix {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    (0..cols)
        .map(|c| (0..rows).map(|r| a[r][c].conj()).collect())
        .collect()
}

pub fn is_hermitian(a: &Matrix) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(k, x)| *x == a[k][i].conj()))
}

/// Sparse vectors in echelon form, keyed by an ordered basis label.
///
/// Every stored row has leading coefficient one at its pivot (its least key)
/// and no other row has a nonzero entry at that pivot.
#[derive(Clone, Debug)]
pub struct SparseEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, CRational>>,
}

impl<K: Ord + Clone> Default for SparseEchelon<K> {
    fn default() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` modulo the stored rows.
    pub fn reduce(&self, mut v: BTreeMap<K, CRational>) -> BTreeMap<K, CRational> {
        for (pivot, row) in &self.rows {
            let Some(f) = v.get(pivot).cloned() else {
                continue;
            };
            for (k, x) in row {
                let entry = v.entry(k.clone()).or_default();
                *entry -= &(&f * x);
                if entry.is_zero() {
                    v.remove(k);
                }
            }
        }
        v
    }

    /// Inserts `v`; returns the new normalized row if it was independent.
    pub fn insert(&mut self, v: BTreeMap<K, CRational>) -> Option<BTreeMap<K, CRational>> {
        let mut v = self.reduce(v);
        let (pivot, lead) = v.iter().next().map(|(k, x)| (k.clone(), x.clone()))?;
        let inv = lead.inv().expect("nonzero lead");
        for x in v.values_mut() {
            *x = &*x * &inv;
        }
        // keep rows fully reduced at the new pivot
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&pivot).cloned() {
                for (k, x) in &v {
                    let entry = row.entry(k.clone()).or_default();
                    *entry -= &(&f * x);
                    if entry.is_zero() {
                        row.remove(k);
                    }
                }
            }
        }
        self.rows.insert(pivot, v.clone());
        Some(v)
    }

    pub fn rows(&self) -> impl Iterator<Item = &BTreeMap<K, CRational>> {
        self.rows.values()
    }

    pub fn contains(&self, v: &BTreeMap<K, CRational>) -> bool {
        self.reduce(v.clone()).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| CRational::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let b = vec![
            CRational::from_int(6),
            CRational::from_int(12),
            CRational::from_int(2),
        ];
        let x = solve(&a, &b).unwrap();
        let ax = mat_mul(&a, &x.iter().map(|v| vec![v.clone()]).collect());
        for (row, bi) in ax.iter().zip(&b) {
            assert_eq!(&row[0], bi);
        }
        let bad = vec![
            CRational::from_int(1),
            CRational::from_int(1),
            CRational::from_int(1),
        ];
        assert!(solve(&a, &bad).is_err());
    }

    #[test]
    fn inverse_complex() {
        let a = vec![
            vec![CRational::from_int(2), CRational::new(rat(1, 2), rat(1, 1))],
            vec![CRational::new(rat(1, 2), rat(-1, 1)), CRational::from_int(3)],
        ];
        assert!(is_hermitian(&a));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 1], &[1, 1]])).is_none());
    }

    #[test]
    fn echelon_tracks_span() {
        let mut e: SparseEchelon<u32> = SparseEchelon::new();
        let v = |xs: &[(u32, i64)]| {
            xs.iter()
                .map(|&(k, x)| (k, CRational::from_int(x)))
                .collect::<BTreeMap<_, _>>()
        };
        assert!(e.insert(v(&[(0, 2), (1, 1)])).is_some());
        assert!(e.insert(v(&[(1, 1), (2, 1)])).is_some());
        assert!(e.insert(v(&[(0, 2), (1, 2), (2, 1)])).is_none());
        assert!(e.contains(&v(&[(0, 4), (1, 3), (2, 1)])));
        assert_eq!(e.rank(), 2);
    }
}
