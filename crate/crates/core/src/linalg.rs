//! Dense Gaussian elimination over a finite field.

use crate::gf::{Field, FieldElement};

/// Rank of the matrix whose rows are given. Rows may have any common length.
pub fn rank(field: &Field, mut rows: Vec<Vec<FieldElement>>) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv(rows[rank][col]).expect("pivot is non-zero");
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = field.neg(field.mul(rows[r][col], inv));
            for c in col..width {
                let delta = field.mul(factor, rows[rank][c]);
                rows[r][c] = field.add(rows[r][c], delta);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
