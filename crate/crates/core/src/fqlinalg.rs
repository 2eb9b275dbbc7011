//! Dense linear algebra over the top field, with matrices stored as rows.

use crate::field::{Fe, FieldTower};

pub type FeMatrix = Vec<Vec<Fe>>;

pub fn identity(n: usize) -> FeMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect())
        .collect()
}

pub fn zeros(rows: usize, cols: usize) -> FeMatrix {
    vec![vec![Fe::ZERO; cols]; rows]
}

pub fn mul(tw: &FieldTower, a: &FeMatrix, b: &FeMatrix) -> FeMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Fe::ZERO, |acc, k| tw.add(acc, tw.mul(row[k], b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(tw: &FieldTower, a: &FeMatrix, v: &[Fe]) -> Vec<Fe> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Fe::ZERO, |acc, (&x, &y)| tw.add(acc, tw.mul(x, y)))
        })
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(tw: &FieldTower, m: &mut FeMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = tw.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = tw.mul(*x, inv);
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c];
                for (x, &pj) in row.iter_mut().zip(&pivot) {
                    *x = tw.sub(*x, tw.mul(f, pj));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(tw: &FieldTower, m: &FeMatrix) -> usize {
    rref(tw, &mut m.clone()).len()
}

pub fn inverse(tw: &FieldTower, m: &FeMatrix) -> Option<FeMatrix> {
    let n = m.len();
    let mut aug: FeMatrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().copied().chain(id).collect())
        .collect();
    let pivots = rref(tw, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Basis of the right null space.
pub fn kernel(tw: &FieldTower, m: &FeMatrix) -> Vec<Vec<Fe>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = m.clone();
    let pivots = rref(tw, &mut r);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Fe::ZERO; cols];
            v[f] = Fe::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = tw.neg(r[i][f]);
            }
            v
        })
        .collect()
}

pub fn transpose(m: &FeMatrix) -> FeMatrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}
