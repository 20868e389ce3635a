//! JSON layout for dense complex matrices: a list of rows, each row a list
//! of `[re, im]` pairs.

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{NumericsError, Result};

pub type Rows = Vec<Vec<[f64; 2]>>;

pub fn to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

/// Parses rows into a matrix with the expected column count. An empty row
/// list is a `0 x cols` matrix.
pub fn from_rows(rows: &Rows, cols: usize) -> Result<CMatrix> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(NumericsError::MalformedMatrix(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if row.iter().flatten().any(|v| !v.is_finite()) {
            return Err(NumericsError::MalformedMatrix(format!("row {i} has a non-finite entry")));
        }
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
}

/// Parses rows, inferring the column count from the first row.
pub fn from_rows_infer(rows: &Rows) -> Result<CMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    from_rows(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use proptest::prelude::*;

    #[test]
    fn ragged_rows_rejected() {
        let rows: Rows = vec![vec![[1.0, 0.0]], vec![]];
        assert!(from_rows(&rows, 1).is_err());
    }

    #[test]
    fn empty_has_requested_width() {
        let m = from_rows(&Vec::new(), 5).unwrap();
        assert_eq!(m.shape(), (0, 5));
    }

    proptest! {
        #[test]
        fn round_trip(r in 1usize..5, c in 1usize..5, seed in any::<u64>()) {
            let m = CMatrix::from_fn(r, c, |i, j| {
                let s = (seed ^ ((i * 31 + j) as u64)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                c64((s >> 11) as f64 / 1e15, -((s >> 7) as f64) / 3e15)
            });
            let text = serde_json::to_string(&to_rows(&m)).unwrap();
            let back: Rows = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(from_rows(&back, c).unwrap(), m);
        }
    }
}
