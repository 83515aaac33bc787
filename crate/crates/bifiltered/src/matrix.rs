//! Dense matrices over a [`Ring`], acting on row vectors from the right.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ring::{Ring, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} over {}](", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, ")")
    }
}

impl Matrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Matrix {
        Matrix { ring, rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(ring: Ring, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    /// Build from rows of canonical scalars; every row must have `cols` entries.
    pub fn from_rows(ring: Ring, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(alloc::format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.into_iter().map(|x| ring.canon(x)));
        }
        Ok(Matrix { ring, rows: n, cols, data })
    }

    pub fn from_i64(ring: Ring, cols: usize, rows: &[&[i64]]) -> Matrix {
        let rows = rows.iter().map(|r| r.iter().map(|&x| ring.from_int(x)).collect()).collect();
        Matrix::from_rows(ring, cols, rows).expect("consistent rows")
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        let c = self.cols;
        self.data[i * c + j] = self.ring.canon(v);
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(alloc::format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let r = self.ring;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = &out.data[idx] + a * b;
                }
            }
        }
        for x in out.data.iter_mut() {
            *x = r.canon(core::mem::take(x));
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.rows, "vector length");
        let r = self.ring;
        let mut out = vec![Scalar::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if !b.is_zero() {
                    *o = &*o + a * b;
                }
            }
        }
        out.into_iter().map(|x| r.canon(x)).collect()
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.sub(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| self.ring.mul(a, c)).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|a| self.ring.neg(a)).collect();
        Matrix { data, ..self.clone() }
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(alloc::format!(
                "{}x{} vs {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        Ok(())
    }

    /// Stack rows of `self` above rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column count");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { ring: self.ring, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row count");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Matrix { ring: self.ring, rows: self.rows, cols, data }
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.ring, self.rows + other.rows, self.cols + other.cols);
        m.paste(0, 0, self);
        m.paste(self.rows, self.cols, other);
        m
    }

    /// Overwrite the block starting at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j).clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = self.get(r0 + i, c0 + j).clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { ring: self.ring, rows: idx.len(), cols: self.cols, data }
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let r = self.ring;
        let mut m = Matrix::zeros(r, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = r.mul(a, other.get(k, l));
                        m.set(i * other.rows + k, j * other.cols + l, v);
                    }
                }
            }
        }
        m
    }

    /// Same entries viewed over another ring (canonicalized there).
    pub fn change_ring(&self, ring: Ring) -> Result<Matrix> {
        let data = self.data.iter().map(|x| ring.from_ratio(x)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring, rows: self.rows, cols: self.cols, data })
    }

    pub fn from_row_vec(ring: Ring, v: Vec<Scalar>) -> Matrix {
        let n = v.len();
        Matrix::from_rows(ring, n, vec![v]).expect("single row")
    }
}

/// Helpers on row vectors.
pub(crate) mod vecops {
    use super::*;

    pub fn add(r: Ring, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        a.iter().zip(b).map(|(x, y)| r.add(x, y)).collect()
    }

    pub fn scale(r: Ring, c: &Scalar, a: &[Scalar]) -> Vec<Scalar> {
        a.iter().map(|x| r.mul(c, x)).collect()
    }

    /// `a -= c * b`, in place.
    pub fn axpy_sub(r: Ring, a: &mut [Scalar], c: &Scalar, b: &[Scalar]) {
        if c.is_zero() {
            return;
        }
        for (x, y) in a.iter_mut().zip(b) {
            if !y.is_zero() {
                *x = r.canon(&*x - c * y);
            }
        }
    }

    pub fn is_zero(a: &[Scalar]) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    pub fn zeros(n: usize) -> Vec<Scalar> {
        vec![Scalar::zero(); n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_kron() {
        let r = Ring::zmod(2, 2).unwrap();
        let a = Matrix::from_i64(r, 2, &[&[1, 2], &[3, 1]]);
        let b = Matrix::identity(r, 2);
        assert_eq!(a.mul(&b).unwrap(), a);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(2, 0), &r.from_int(3));
        assert_eq!(a.apply(&[r.one(), r.one()]), vec![r.from_int(0), r.from_int(3)]);
    }
}
