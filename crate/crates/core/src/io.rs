//! JSON and CSV encodings shared by the library and the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. Plain JSON numbers are accepted on input as real entries. CSV
//! values are printed with 17 significant digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, Mat2, Mat4, C64};

/// A complex matrix entry as it appears in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Pair([f64; 2]),
    Real(f64),
}

impl From<ComplexEntry> for C64 {
    fn from(e: ComplexEntry) -> Self {
        match e {
            ComplexEntry::Pair([re, im]) => c64(re, im),
            ComplexEntry::Real(re) => c64(re, 0.0),
        }
    }
}

pub type MatrixJson = Vec<Vec<ComplexEntry>>;

pub fn complex_to_json(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn check_shape(rows: &MatrixJson, n: usize) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("expected a {n}x{n} matrix")));
    }
    Ok(())
}

fn check_finite(z: C64) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Parse("matrix entries must be finite".into()))
    }
}

pub fn mat2_from_json(rows: &MatrixJson) -> Result<Mat2> {
    check_shape(rows, 2)?;
    let mut m = Mat2::zeros();
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = check_finite((*e).into())?;
        }
    }
    Ok(m)
}

pub fn mat4_from_json(rows: &MatrixJson) -> Result<Mat4> {
    check_shape(rows, 4)?;
    let mut m = Mat4::zeros();
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = check_finite((*e).into())?;
        }
    }
    Ok(m)
}

pub fn mat2_to_json(m: &Mat2) -> Vec<Vec<[f64; 2]>> {
    (0..2)
        .map(|i| (0..2).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

pub fn mat4_to_json(m: &Mat4) -> Vec<Vec<[f64; 2]>> {
    (0..4)
        .map(|i| (0..4).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

/// Parses a 2×2 complex matrix from JSON text.
pub fn parse_mat2(text: &str) -> Result<Mat2> {
    let rows: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("2x2 matrix: {e}")))?;
    mat2_from_json(&rows)
}

/// Parses a 4×4 complex matrix from JSON text.
pub fn parse_mat4(text: &str) -> Result<Mat4> {
    let rows: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("4x4 matrix: {e}")))?;
    mat4_from_json(&rows)
}

/// Formats a float with 17 significant digits (`d.dddddddddddddddde±x`).
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of the output
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_entries() {
        let m = parse_mat2("[[1, [0, 2]], [[3.5, -1], 0]]").unwrap();
        assert_eq!(m[(0, 0)], c64(1.0, 0.0));
        assert_eq!(m[(0, 1)], c64(0.0, 2.0));
        assert_eq!(m[(1, 0)], c64(3.5, -1.0));
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(matches!(
            parse_mat2("[[1, 2, 3], [4, 5, 6]]"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_mat4("[[1, 2], [3, 4]]"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, -2.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(fmt17(-0.0), fmt17(0.0));
    }
}
