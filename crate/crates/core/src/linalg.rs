//! Small dense matrix support: row-major storage, a partial-pivot solver for
//! the square systems vertex enumeration poses, and a tolerance-based rank.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Index, IndexMut};

/// Dense row-major matrix. Serialized as nested row arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "ragged matrix rows"
        );
        let data = rows.into_iter().flatten().collect();
        Matrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        self.iter_rows().map(|r| dot(r, v)).collect()
    }

    /// `self^T * v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, row) in self.iter_rows().enumerate() {
            let vi = v[i];
            if vi != 0.0 {
                for (o, &a) in out.iter_mut().zip(row) {
                    *o += vi * a;
                }
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(|r| r.to_vec()).collect()
    }

    /// Rank via Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        let mut pivot_col = 0;
        while rank < a.rows && pivot_col < a.cols {
            let (best_row, best_val) = (rank..a.rows)
                .map(|i| (i, a[(i, pivot_col)].abs()))
                .fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_val <= tol {
                pivot_col += 1;
                continue;
            }
            a.swap_rows(rank, best_row);
            let pivot = a[(rank, pivot_col)];
            for i in rank + 1..a.rows {
                let factor = a[(i, pivot_col)] / pivot;
                if factor != 0.0 {
                    for j in pivot_col..a.cols {
                        a[(i, j)] -= factor * a[(rank, j)];
                    }
                }
            }
            rank += 1;
            pivot_col += 1;
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_rows(rows))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Solve the square system `a x = b` with partial pivoting.
/// Returns `None` when the matrix is singular at the given tolerance.
pub fn solve_square(a: &Matrix, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);
    let mut aug = Matrix::zeros(n, n + 1);
    for i in 0..n {
        aug.row_mut(i)[..n].copy_from_slice(a.row(i));
        aug[(i, n)] = b[i];
    }
    for col in 0..n {
        let (best_row, best_val) = (col..n)
            .map(|i| (i, aug[(i, col)].abs()))
            .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            return None;
        }
        aug.swap_rows(col, best_row);
        let pivot = aug[(col, col)];
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = aug[(i, col)] / pivot;
            if factor != 0.0 {
                for j in col..=n {
                    aug[(i, j)] -= factor * aug[(col, j)];
                }
            }
        }
    }
    Some((0..n).map(|i| aug[(i, n)] / aug[(i, i)]).collect())
}
