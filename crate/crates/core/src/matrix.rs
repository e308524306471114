//! Dense matrices over either scalar backend, plus the symmetric storage
//! used for quadratic forms.
//!
//! The determinant and adjugate are pivoted Gaussian elimination and cofactor
//! expansion respectively; the characteristic polynomial of a symmetric
//! pencil is computed division-free over the polynomial ring so it stays
//! exact on the rational backend.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Scalar, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::SizeMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<S>]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(Error::SizeMismatch { expected: 1, got: 0 });
        }
        let rows = columns[0].len();
        for c in columns {
            if c.len() != rows {
                return Err(Error::SizeMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
        }
        Ok(Mat::from_fn(rows, cols, |i, j| columns[j][i].clone()))
    }

    pub fn from_rows(rows_in: &[Vec<S>]) -> Result<Self> {
        Ok(Mat::from_columns(rows_in)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn map(&self, mut f: impl FnMut(&S) -> S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| f(v)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Mat<S>) -> Result<Mat<S>> {
        if self.cols != rhs.rows {
            return Err(Error::SizeMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero_elem() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.at(i, j);
                    out.set(i, j, cur + a.clone() * rhs.at(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::SizeMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn sub(&self, rhs: &Mat<S>) -> Result<Mat<S>> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::SizeMismatch {
                expected: self.rows * self.cols,
                got: rhs.rows * rhs.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = a.clone() - b.clone();
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    fn require_square(&self) -> Result<usize> {
        if self.rows != self.cols {
            return Err(Error::SizeMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        Ok(self.rows)
    }

    /// Determinant by Gaussian elimination with backend-appropriate pivoting:
    /// largest magnitude for the floating backend, first nonzero entry for
    /// the exact one.
    pub fn det(&self) -> Result<S> {
        let dim = self.require_square()?;
        if dim == 0 {
            return Ok(S::one());
        }
        let mut work = self.data.clone();
        let at = |w: &[S], i: usize, j: usize| w[i * dim + j].clone();
        let mut acc = S::one();
        let mut negate = false;
        for col in 0..dim {
            let pivot_row = match pick_pivot(&work, dim, col) {
                Some(r) => r,
                None => return Ok(S::zero()),
            };
            if pivot_row != col {
                for j in 0..dim {
                    work.swap(col * dim + j, pivot_row * dim + j);
                }
                negate = !negate;
            }
            let pivot = at(&work, col, col);
            acc = acc * pivot.clone();
            for row in (col + 1)..dim {
                let factor = at(&work, row, col) / pivot.clone();
                if factor.is_zero_elem() {
                    continue;
                }
                for j in col..dim {
                    let updated = at(&work, row, j) - factor.clone() * at(&work, col, j);
                    work[row * dim + j] = updated;
                }
            }
        }
        Ok(if negate { -acc } else { acc })
    }

    /// Solves the square system `self * x = rhs`.
    pub fn solve(&self, rhs: &[S]) -> Result<Vec<S>> {
        let dim = self.require_square()?;
        if rhs.len() != dim {
            return Err(Error::SizeMismatch {
                expected: dim,
                got: rhs.len(),
            });
        }
        let scale = self.max_abs();
        let mut work = self.data.clone();
        let mut b = rhs.to_vec();
        for col in 0..dim {
            let pivot_row = pick_pivot(&work, dim, col).ok_or(Error::RankDeficient)?;
            let pivot = work[pivot_row * dim + col].clone();
            if !S::EXACT && pivot.magnitude() <= 1e-13 * scale.max(1e-300) {
                return Err(Error::RankDeficient);
            }
            if pivot_row != col {
                for j in 0..dim {
                    work.swap(col * dim + j, pivot_row * dim + j);
                }
                b.swap(col, pivot_row);
            }
            for row in (col + 1)..dim {
                let factor = work[row * dim + col].clone() / pivot.clone();
                if factor.is_zero_elem() {
                    continue;
                }
                for j in col..dim {
                    let updated =
                        work[row * dim + j].clone() - factor.clone() * work[col * dim + j].clone();
                    work[row * dim + j] = updated;
                }
                let updated = b[row].clone() - factor.clone() * b[col].clone();
                b[row] = updated;
            }
        }
        let mut x = vec![S::zero(); dim];
        for row in (0..dim).rev() {
            let mut acc = b[row].clone();
            for j in (row + 1)..dim {
                acc = acc - work[row * dim + j].clone() * x[j].clone();
            }
            x[row] = acc / work[row * dim + row].clone();
        }
        Ok(x)
    }

    /// Inverse through repeated solves; errors on singular input.
    pub fn inverse(&self) -> Result<Mat<S>> {
        let dim = self.require_square()?;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut e = vec![S::zero(); dim];
            e[j] = S::one();
            cols.push(self.solve(&e)?);
        }
        Mat::from_columns(&cols)
    }

    /// Classical adjugate via signed cofactors, so it is defined for singular
    /// matrices as well. Satisfies `M * adj(M) = det(M) * I`.
    pub fn adjugate(&self) -> Result<Mat<S>> {
        let dim = self.require_square()?;
        if dim == 0 {
            return Mat::new(0, 0, vec![]);
        }
        if dim == 1 {
            return Mat::new(1, 1, vec![S::one()]);
        }
        let mut out = Mat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let minor = self.minor(i, j);
                let cof = minor.det()?;
                let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                out.set(j, i, signed);
            }
        }
        Ok(out)
    }

    fn minor(&self, drop_row: usize, drop_col: usize) -> Mat<S> {
        let dim = self.rows;
        Mat::from_fn(dim - 1, dim - 1, |i, j| {
            let si = if i < drop_row { i } else { i + 1 };
            let sj = if j < drop_col { j } else { j + 1 };
            self.at(si, sj)
        })
    }
}

fn pick_pivot<S: Scalar>(work: &[S], dim: usize, col: usize) -> Option<usize> {
    if S::EXACT {
        (col..dim).find(|&r| !work[r * dim + col].is_zero_elem())
    } else {
        let (row, best) = (col..dim)
            .map(|r| (r, work[r * dim + col].magnitude()))
            .fold((col, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best <= 0.0 {
            None
        } else {
            Some(row)
        }
    }
}

impl Mat<C64> {
    pub fn conj_transpose(&self) -> Mat<C64> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Plain bilinear dot product (no conjugation).
pub fn bilinear_dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Symmetric matrix with packed upper-triangular storage, so symmetry holds
/// by construction rather than by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<S: Scalar> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymMatrix<S> {
    fn index(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        r * self.dim - r * (r + 1) / 2 + c
    }

    /// Builds from a generator invoked only on the upper triangle `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                data.push(f(i, j));
            }
        }
        SymMatrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix::from_fn(dim, |_, _| S::zero())
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix::from_fn(dim, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_diagonal(values: &[S]) -> Self {
        SymMatrix::from_fn(values.len(), |i, j| {
            if i == j {
                values[i].clone()
            } else {
                S::zero()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[self.index(i, j)].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        let idx = self.index(i, j);
        self.data[idx] = value;
    }

    pub fn to_mat(&self) -> Mat<S> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.at(i, j))
    }

    pub fn neg(&self) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| -v.clone()).collect(),
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|v| v.clone() * factor.clone())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Value of the quadratic form on `v`.
    pub fn quadratic_form(&self, v: &[S]) -> Result<S> {
        if v.len() != self.dim {
            return Err(Error::SizeMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let two = S::from_int(2);
        let mut acc = S::zero();
        for i in 0..self.dim {
            acc = acc + self.at(i, i) * v[i].clone() * v[i].clone();
            for j in (i + 1)..self.dim {
                acc = acc + two.clone() * self.at(i, j) * v[i].clone() * v[j].clone();
            }
        }
        Ok(acc)
    }

    /// Polarized bilinear value `B(v, w)` of the form.
    pub fn bilinear(&self, v: &[S], w: &[S]) -> Result<S> {
        if v.len() != self.dim || w.len() != self.dim {
            return Err(Error::SizeMismatch {
                expected: self.dim,
                got: v.len().max(w.len()),
            });
        }
        let mut acc = S::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + self.at(i, j) * v[i].clone() * w[j].clone();
            }
        }
        Ok(acc)
    }

    /// Congruence transform `gᵀ · self · g`, computed entry-wise on the upper
    /// triangle so the result is symmetric in storage, not merely in value.
    pub fn congruence(&self, g: &Mat<S>) -> Result<SymMatrix<S>> {
        if g.rows() != self.dim {
            return Err(Error::SizeMismatch {
                expected: self.dim,
                got: g.rows(),
            });
        }
        let full = self.to_mat();
        let mapped: Vec<Vec<S>> = (0..g.cols()).map(|b| {
            let col = g.column(b);
            full.mat_vec(&col).expect("dimension already checked")
        }).collect();
        Ok(SymMatrix::from_fn(g.cols(), |a, b| {
            bilinear_dot(&g.column(a), &mapped[b])
        }))
    }

    /// The pencil member `t * self - other` at parameter `t`.
    pub fn pencil_at(&self, other: &SymMatrix<S>, t: &S) -> Result<SymMatrix<S>> {
        if other.dim != self.dim {
            return Err(Error::SizeMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(SymMatrix::from_fn(self.dim, |i, j| {
            t.clone() * self.at(i, j) - other.at(i, j)
        }))
    }
}

/// Determinant of `t * a - b` as a polynomial in `t`.
///
/// Expanded division-free over the polynomial ring by Laplace recursion on
/// column subsets, so the rational backend yields exact coefficients. The
/// degree-`dim` coefficient equals `det(a)`.
pub fn pencil_det_poly<S: Scalar>(a: &SymMatrix<S>, b: &SymMatrix<S>) -> Result<Poly<S>> {
    if a.dim() != b.dim() {
        return Err(Error::SizeMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let dim = a.dim();
    if dim == 0 {
        return Ok(Poly::constant(S::one()));
    }
    if dim > 16 {
        return Err(Error::DomainError(format!(
            "pencil determinant limited to dimension 16, got {dim}"
        )));
    }
    let entry = |i: usize, j: usize| Poly::new(vec![-b.at(i, j), a.at(i, j)]);
    let mut table: Vec<Option<Poly<S>>> = vec![None; 1usize << dim];
    table[0] = Some(Poly::constant(S::one()));
    for mask in 1usize..(1usize << dim) {
        let k = (mask as u32).count_ones() as usize;
        let row = k - 1;
        let mut acc = Poly::zero();
        let mut position = 0usize;
        for col in 0..dim {
            if mask & (1 << col) == 0 {
                continue;
            }
            let sub = table[mask & !(1 << col)]
                .as_ref()
                .expect("subsets are filled in increasing order");
            let term = &entry(row, col) * sub;
            acc = if (row + position) % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
            position += 1;
        }
        table[mask] = Some(acc);
    }
    Ok(table[(1usize << dim) - 1].take().expect("full mask filled"))
}
