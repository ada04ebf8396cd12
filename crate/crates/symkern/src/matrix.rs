//! Small dense matrices of expressions.

use std::fmt;

use thiserror::Error;

use crate::expr::Expr;
use crate::poly::simplify;
use crate::zero::{is_identically_zero, ZeroTestConfig, ZeroTestError, ZeroVerdict};

/// Largest supported row or column count.
pub const MAX_DIM: usize = 8;

/// Largest matrix accepted by [`SymMatrix::inverse`].
pub const MAX_INVERSE_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix dimension {rows}x{cols} exceeds the {MAX_DIM}x{MAX_DIM} limit")]
    TooLarge { rows: usize, cols: usize },
    #[error("expected {expected} entries for the given shape, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("ragged rows: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("shape mismatch: {left:?} and {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("inverse supports at most {MAX_INVERSE_DIM}x{MAX_INVERSE_DIM}, got {0}x{0}")]
    InverseTooLarge(usize),
    #[error("matrix is singular: determinant {det} vanishes identically")]
    Singular { det: Expr },
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

/// Row-major matrix of expressions.
#[derive(Clone, PartialEq, Eq)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl SymMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Expr>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(MatrixError::TooLarge { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(MatrixError::EntryCount { expected: rows * cols, got: data.len() });
        }
        Ok(SymMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(MatrixError::Ragged { row: i, len: row.len(), expected: c });
            }
        }
        SymMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Expr) -> Result<Self, MatrixError> {
        let mut f = f;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        SymMatrix::new(rows, cols, data)
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        SymMatrix::from_fn(n, n, |i, j| if i == j { Expr::one() } else { Expr::zero() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, MatrixError> {
        SymMatrix::from_fn(rows, cols, |_, _| Expr::zero())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.data[i * self.cols + j] = e;
    }

    pub fn entries(&self) -> &[Expr] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> SymMatrix {
        SymMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> SymMatrix {
        SymMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone()).expect("same limits")
    }

    fn zip_with(&self, o: &SymMatrix, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<SymMatrix, MatrixError> {
        if self.shape() != o.shape() {
            return Err(MatrixError::ShapeMismatch { left: self.shape(), right: o.shape() });
        }
        Ok(SymMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, o: &SymMatrix) -> Result<SymMatrix, MatrixError> {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &SymMatrix) -> Result<SymMatrix, MatrixError> {
        self.zip_with(o, |a, b| a - b)
    }

    pub fn scale(&self, s: &Expr) -> SymMatrix {
        self.map(|e| s * e)
    }

    pub fn mul(&self, o: &SymMatrix) -> Result<SymMatrix, MatrixError> {
        if self.cols != o.rows {
            return Err(MatrixError::ShapeMismatch { left: self.shape(), right: o.shape() });
        }
        SymMatrix::from_fn(self.rows, o.cols, |i, j| {
            Expr::add_all((0..self.cols).map(|k| self.get(i, k) * o.get(k, j)))
        })
    }

    pub fn simplified(&self) -> SymMatrix {
        self.map(simplify)
    }

    fn require_square(&self) -> Result<usize, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.rows)
    }

    /// Determinant by cofactor expansion, skipping structurally zero entries.
    pub fn det(&self) -> Result<Expr, MatrixError> {
        let n = self.require_square()?;
        let rows: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (0..n).collect();
        Ok(self.minor_det(&rows, &cols))
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Expr {
        match rows.len() {
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                self.get(rows[0], cols[0]) * self.get(rows[1], cols[1])
                    - self.get(rows[0], cols[1]) * self.get(rows[1], cols[0])
            }
            _ => {
                let r = rows[0];
                let rest_rows = &rows[1..];
                let mut terms = Vec::new();
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(r, c);
                    if a.is_zero() {
                        continue;
                    }
                    let rest_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let m = self.minor_det(rest_rows, &rest_cols);
                    let t = a * &m;
                    terms.push(if k % 2 == 0 { t } else { -t });
                }
                Expr::add_all(terms)
            }
        }
    }

    /// Adjugate (transposed cofactor matrix), so that `A·adj(A) = det(A)·I`.
    pub fn adjugate(&self) -> Result<SymMatrix, MatrixError> {
        let n = self.require_square()?;
        if n == 1 {
            return SymMatrix::identity(1);
        }
        SymMatrix::from_fn(n, n, |i, j| {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let m = self.minor_det(&rows, &cols);
            if (i + j) % 2 == 0 {
                m
            } else {
                -m
            }
        })
    }

    /// Inverse by Gauss–Jordan elimination with zero-test certified pivots.
    pub fn inverse(&self, c: &ZeroTestConfig) -> Result<SymMatrix, MatrixError> {
        let n = self.require_square()?;
        if n > MAX_INVERSE_DIM {
            return Err(MatrixError::InverseTooLarge(n));
        }
        let det = self.det()?;
        if is_identically_zero(&det, c)?.is_zero() {
            return Err(MatrixError::Singular { det: simplify(&det) });
        }
        let mut a: Vec<Vec<Expr>> = (0..n)
            .map(|i| {
                let mut row: Vec<Expr> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.extend((0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }));
                row
            })
            .collect();
        for col in 0..n {
            let mut candidates: Vec<usize> = (col..n).filter(|&r| !a[r][col].is_zero()).collect();
            candidates.sort_by_key(|&r| (a[r][col].size(), r));
            let mut pivot = None;
            for r in candidates {
                match is_identically_zero(&a[r][col], c)? {
                    ZeroVerdict::NonZero(_) => {
                        pivot = Some(r);
                        break;
                    }
                    ZeroVerdict::Zero { .. } => a[r][col] = Expr::zero(),
                }
            }
            let Some(p) = pivot else {
                return Err(MatrixError::Singular { det: simplify(&det) });
            };
            a.swap(col, p);
            let inv = simplify(&Expr::recip(a[col][col].clone()));
            a[col] = a[col].iter().map(|e| simplify(&(e * &inv))).collect();
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (j, pe) in pivot_row.iter().enumerate() {
                    if pe.is_zero() {
                        continue;
                    }
                    a[r][j] = simplify(&(&a[r][j] - &(&factor * pe)));
                }
                a[r][col] = Expr::zero();
            }
        }
        SymMatrix::from_fn(n, n, |i, j| a[i][n + j].clone())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn m(rows: &[&[&str]]) -> SymMatrix {
        SymMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse(s).unwrap()).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let c = ZeroTestConfig::default();
        let a = m(&[&["0", "exp(u)"], &["1", "0"]]);
        assert_eq!(a.inverse(&c).unwrap(), m(&[&["0", "1"], &["exp(-u)", "0"]]));
        let v = m(&[&["3*u^2"]]);
        assert_eq!(v.inverse(&c).unwrap(), m(&[&["u^-2/3"]]));
    }

    #[test]
    fn determinant_and_adjugate() {
        let g = m(&[&["2*exp(u)", "w"], &["w", "2"]]);
        assert_eq!(g.det().unwrap(), parse("4*exp(u) - w^2").unwrap());
        let adj = g.adjugate().unwrap();
        assert_eq!(adj, m(&[&["2", "-w"], &["-w", "2*exp(u)"]]));
    }

    #[test]
    fn singular_matrix_reports_det() {
        let c = ZeroTestConfig::default();
        let a = m(&[&["u", "u^2"], &["1", "u"]]);
        match a.inverse(&c) {
            Err(MatrixError::Singular { det }) => assert!(det.is_zero()),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn shape_limits() {
        assert!(SymMatrix::zeros(9, 1).is_err());
        assert!(SymMatrix::zeros(5, 5).unwrap().inverse(&ZeroTestConfig::default()).is_err());
        let a = SymMatrix::zeros(2, 3).unwrap();
        assert!(a.mul(&a).is_err());
        assert_eq!(a.transpose().shape(), (3, 2));
    }
}
