//! The multidegree parity condition for products of projective spaces.

use super::{PolyError, Result};

/// Factor indices `i` with `m_i < n_i` and (`m_i = 0` or `m − 2m_i ≥ n − 2n_i`),
/// where `m_i` counts odd entries of column `i` of the `m × (ν+1)` degree matrix
/// and `n = Σ n_f`.
pub fn parity_condition(n_tuple: &[usize], d_matrix: &[Vec<u32>]) -> Result<Vec<usize>> {
    if n_tuple.is_empty() || n_tuple.contains(&0) {
        return Err(PolyError::BadShape(format!("factor dimensions {n_tuple:?} must be positive")));
    }
    if d_matrix.is_empty() {
        return Err(PolyError::BadShape("degree matrix has no rows".into()));
    }
    for (r, row) in d_matrix.iter().enumerate() {
        if row.len() != n_tuple.len() {
            return Err(PolyError::BadShape(format!(
                "row {r} has {} entries, expected {}",
                row.len(),
                n_tuple.len()
            )));
        }
        if row.contains(&0) {
            return Err(PolyError::BadShape(format!("row {r} has a zero degree")));
        }
    }
    let m = d_matrix.len() as i64;
    let n: i64 = n_tuple.iter().map(|&x| x as i64).sum();
    if m >= n {
        return Err(PolyError::BadShape(format!("need m = {m} < n = {n}")));
    }
    Ok((0..n_tuple.len())
        .filter(|&i| {
            let mi = d_matrix.iter().filter(|row| row[i] % 2 == 1).count() as i64;
            let ni = n_tuple[i] as i64;
            (mi == 0 || m - 2 * mi >= n - 2 * ni) && mi < ni
        })
        .collect())
}
