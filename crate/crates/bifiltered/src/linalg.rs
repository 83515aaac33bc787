//! Canonical row-space forms and the row-space lattice operations built on them.
//!
//! Fields use reduced row echelon form, `Z` the Hermite form, and `Z/l^n`
//! the Howell form.  All three share the property used everywhere below: the
//! rows whose pivot lies at or after column `k` span the intersection of the
//! row space with `0^k x R^(cols-k)`.

use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::matrix::{vecops, Matrix};
use crate::ring::{int, Family, Ring, Scalar};

#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub ring: Ring,
    pub cols: usize,
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

pub(crate) fn echelon(ring: Ring, mut rows: Vec<Vec<Scalar>>, cols: usize) -> Echelon {
    rows.retain(|r| !vecops::is_zero(r));
    let mut done: Vec<Vec<Scalar>> = Vec::new();
    let mut pivots = Vec::new();
    let family = ring.family();
    for c in 0..cols {
        if rows.is_empty() {
            break;
        }
        match family {
            Family::Field => {
                let Some(p) = rows.iter().position(|r| !r[c].is_zero()) else { continue };
                let mut prow = rows.swap_remove(p);
                let inv = ring.inverse(&prow[c]).expect("field pivot");
                prow = vecops::scale(ring, &inv, &prow);
                for r in rows.iter_mut() {
                    let e = r[c].clone();
                    vecops::axpy_sub(ring, r, &e, &prow);
                }
                done.push(prow);
            }
            Family::Euclid => {
                loop {
                    let best = rows
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| !r[c].is_zero())
                        .min_by(|a, b| a.1[c].abs().cmp(&b.1[c].abs()).then(a.0.cmp(&b.0)))
                        .map(|(i, _)| i);
                    let Some(p) = best else { break };
                    let prow = rows[p].clone();
                    let mut all_zero = true;
                    for (i, r) in rows.iter_mut().enumerate() {
                        if i == p || r[c].is_zero() {
                            continue;
                        }
                        let q = int(r[c].numer().div_floor(prow[c].numer()));
                        vecops::axpy_sub(ring, r, &q, &prow);
                        if !r[c].is_zero() {
                            all_zero = false;
                        }
                    }
                    if all_zero {
                        let mut prow = rows.swap_remove(p);
                        if prow[c].is_negative() {
                            prow = vecops::scale(ring, &ring.from_int(-1), &prow);
                        }
                        done.push(prow);
                        break;
                    }
                }
                rows.retain(|r| !vecops::is_zero(r));
                if done.len() > pivots.len() {
                    pivots.push(c);
                }
                continue;
            }
            Family::Local => {
                let best = rows
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !r[c].is_zero())
                    .min_by_key(|(i, r)| (ring.valuation(&r[c]), *i))
                    .map(|(i, _)| i);
                let Some(p) = best else { continue };
                let prow = rows.swap_remove(p);
                let u = ring.normalizing_unit(&prow[c]);
                let prow = vecops::scale(ring, &u, &prow);
                for r in rows.iter_mut() {
                    if r[c].is_zero() {
                        continue;
                    }
                    let q = ring.divide(&r[c], &prow[c]).expect("minimal valuation pivot divides");
                    vecops::axpy_sub(ring, r, &q, &prow);
                }
                let v = ring.valuation(&prow[c]);
                if v > 0 {
                    let n = ring.exponent().unwrap();
                    let extra = vecops::scale(ring, &ring.l_power(n - v), &prow);
                    if !vecops::is_zero(&extra) {
                        rows.push(extra);
                    }
                }
                done.push(prow);
            }
        }
        rows.retain(|r| !vecops::is_zero(r));
        pivots.push(c);
    }
    debug_assert!(rows.iter().all(|r| vecops::is_zero(r)));
    // reduce entries above each pivot
    for i in 0..done.len() {
        let c = pivots[i];
        let p = done[i][c].clone();
        let prow = done[i].clone();
        for row in done.iter_mut().take(i) {
            if row[c].is_zero() {
                continue;
            }
            let q = match family {
                Family::Field => row[c].clone(),
                Family::Euclid | Family::Local => int(row[c].numer().div_floor(p.numer())),
            };
            vecops::axpy_sub(ring, row, &q, &prow);
        }
    }
    Echelon { ring, cols, rows: done, pivots }
}

impl Echelon {
    /// Reduce `v` by the pivot rows whose pivot column is `< upto`.  Returns
    /// the remainder and the coefficients used (so that
    /// `v = remainder + sum coeffs[i] * rows[i]`).
    pub fn reduce_upto(&self, v: &[Scalar], upto: usize) -> (Vec<Scalar>, Vec<Scalar>) {
        let ring = self.ring;
        let mut v = v.to_vec();
        let mut coeffs = vecops::zeros(self.rows.len());
        for (i, (row, &c)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if c >= upto {
                break;
            }
            if v[c].is_zero() {
                continue;
            }
            let q = match ring.family() {
                Family::Field => v[c].clone(),
                Family::Euclid | Family::Local => int(v[c].numer().div_floor(row[c].numer())),
            };
            vecops::axpy_sub(ring, &mut v, &q, row);
            coeffs[i] = q;
        }
        (v, coeffs)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        vecops::is_zero(&self.reduce_upto(v, self.cols).0)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(self.ring, self.cols, self.rows.clone()).expect("echelon rows")
    }

    /// Rows whose pivot is at or after column `k`, restricted to columns `k..`.
    pub fn tail_rows(&self, k: usize) -> Vec<Vec<Scalar>> {
        self.rows
            .iter()
            .zip(&self.pivots)
            .filter(|(_, &c)| c >= k)
            .map(|(r, _)| r[k..].to_vec())
            .collect()
    }
}

/// Canonical form of the row space of `m` (zero rows removed).
pub fn normal_form(m: &Matrix) -> Matrix {
    echelon(m.ring(), m.row_vecs(), m.cols()).to_matrix()
}

pub(crate) fn nf_rows(ring: Ring, rows: Vec<Vec<Scalar>>, cols: usize) -> Matrix {
    echelon(ring, rows, cols).to_matrix()
}

/// Is `v` in the row space of `m`?
pub fn row_space_contains(m: &Matrix, v: &[Scalar]) -> bool {
    echelon(m.ring(), m.row_vecs(), m.cols()).contains(v)
}

/// Is the row space of `a` contained in that of `b`?
pub fn row_space_le(a: &Matrix, b: &Matrix) -> bool {
    let e = echelon(b.ring(), b.row_vecs(), b.cols());
    (0..a.rows()).all(|i| e.contains(a.row(i)))
}

pub fn row_space_sum(a: &Matrix, b: &Matrix) -> Matrix {
    normal_form(&a.vstack(b))
}

/// `{x : x*m lies in the row space of target}`, as a canonical row space in `R^(m.rows)`.
pub fn preimage_space(m: &Matrix, target: &Matrix) -> Matrix {
    let ring = m.ring();
    let (p, q) = (m.rows(), m.cols());
    assert_eq!(target.cols(), q);
    let top = m.hstack(&Matrix::identity(ring, p));
    let bottom = target.hstack(&Matrix::zeros(ring, target.rows(), p));
    let e = echelon(ring, top.vstack(&bottom).row_vecs(), q + p);
    nf_rows(ring, e.tail_rows(q), p)
}

/// Left kernel `{x : x*m = 0}`.
pub fn left_kernel(m: &Matrix) -> Matrix {
    preimage_space(m, &Matrix::zeros(m.ring(), 0, m.cols()))
}

pub fn row_space_intersect(a: &Matrix, b: &Matrix) -> Matrix {
    let ring = a.ring();
    let n = a.cols();
    let top = a.hstack(a);
    let bottom = b.hstack(&Matrix::zeros(ring, b.rows(), n));
    let e = echelon(ring, top.vstack(&bottom).row_vecs(), 2 * n);
    nf_rows(ring, e.tail_rows(n), n)
}

/// Image of the row space of `a` under `m`.
pub fn row_space_image(a: &Matrix, m: &Matrix) -> Matrix {
    normal_form(&a.mul(m).expect("image shapes"))
}

/// Solves `x * g = v` for the rows of `g` as given (not normalized).
#[derive(Clone, Debug)]
pub struct Solver {
    ech: Echelon,
    n: usize,
    g: usize,
}

impl Solver {
    pub fn new(gens: &Matrix) -> Solver {
        let ring = gens.ring();
        let aug = gens.hstack(&Matrix::identity(ring, gens.rows()));
        let ech = echelon(ring, aug.row_vecs(), gens.cols() + gens.rows());
        Solver { ech, n: gens.cols(), g: gens.rows() }
    }

    pub fn solve(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let ring = self.ech.ring;
        let mut w = v.to_vec();
        w.extend(vecops::zeros(self.g));
        let (rem, _) = self.ech.reduce_upto(&w, self.n);
        if !vecops::is_zero(&rem[..self.n]) {
            return None;
        }
        Some(rem[self.n..].iter().map(|x| ring.neg(x)).collect())
    }
}

pub fn solve(g: &Matrix, v: &[Scalar]) -> Option<Vec<Scalar>> {
    Solver::new(g).solve(v)
}

/// Two-sided inverse of a square matrix, if it exists.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let ring = m.ring();
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let s = Solver::new(m);
    let mut rows = Vec::new();
    for i in 0..n {
        let mut e = vecops::zeros(n);
        e[i] = ring.one();
        rows.push(s.solve(&e)?);
    }
    Matrix::from_rows(ring, n, rows).ok()
}

/// Smith-type diagonal of a relation matrix: returns the diagonal entries
/// (canonical: powers of `l` over local rings, nonnegative over `Z`, 1 over fields)
/// of the module `R^cols / rowspace(m)`, one per column, with `0` for free columns.
pub(crate) fn smith_diagonal(m: &Matrix) -> Vec<Scalar> {
    let ring = m.ring();
    let cols = m.cols();
    let mut a: Vec<Vec<Scalar>> = m.row_vecs();
    a.retain(|r| !vecops::is_zero(r));
    let mut diag = Vec::new();
    let mut active_cols: Vec<usize> = (0..cols).collect();
    match ring.family() {
        Family::Field | Family::Local => {
            loop {
                let mut best: Option<(u32, usize, usize)> = None;
                for (i, r) in a.iter().enumerate() {
                    for &j in &active_cols {
                        if !r[j].is_zero() {
                            let v = ring.valuation(&r[j]);
                            if best.is_none_or(|b| v < b.0) {
                                best = Some((v, i, j));
                            }
                        }
                    }
                }
                let Some((v, pi, pj)) = best else { break };
                let prow = a.swap_remove(pi);
                let pval = prow[pj].clone();
                for r in a.iter_mut() {
                    if !r[pj].is_zero() {
                        let q = ring.divide(&r[pj], &pval).unwrap();
                        vecops::axpy_sub(ring, r, &q, &prow);
                    }
                }
                // column operations only touch the pivot row afterwards, so the
                // remaining rows are already cleared in column pj.
                active_cols.retain(|&j| j != pj);
                a.retain(|r| !vecops::is_zero(r));
                diag.push(if ring.is_field() { ring.one() } else { ring.l_power(v) });
            }
        }
        Family::Euclid => {
            // classical Smith normal form with divisibility repair
            let rows = a.len();
            let mut mat = a;
            let mut t = 0usize;
            let ncols = cols;
            let mut colmap: Vec<usize> = (0..ncols).collect();
            while t < rows.min(ncols) {
                let mut best: Option<(usize, usize)> = None;
                for i in t..rows {
                    for j in t..ncols {
                        let x = &mat[i][colmap[j]];
                        if !x.is_zero()
                            && best.is_none_or(|(bi, bj)| x.abs() < mat[bi][colmap[bj]].abs())
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else { break };
                mat.swap(t, bi);
                colmap.swap(t, bj);
                loop {
                    let p = mat[t][colmap[t]].clone();
                    let mut changed = false;
                    for i in t + 1..rows {
                        let x = mat[i][colmap[t]].clone();
                        if !x.is_zero() {
                            let q = int(x.numer().div_floor(p.numer()));
                            let prow = mat[t].clone();
                            vecops::axpy_sub(ring, &mut mat[i], &q, &prow);
                            if !mat[i][colmap[t]].is_zero() {
                                changed = true;
                            }
                        }
                    }
                    for j in t + 1..ncols {
                        let x = mat[t][colmap[j]].clone();
                        if !x.is_zero() {
                            let q = int(x.numer().div_floor(p.numer()));
                            let (ct, cj) = (colmap[t], colmap[j]);
                            for row in mat.iter_mut() {
                                let v = row[cj].clone() - &q * &row[ct];
                                row[cj] = v;
                            }
                            if !mat[t][colmap[j]].is_zero() {
                                changed = true;
                            }
                        }
                    }
                    if changed {
                        // move the smallest entry of row/column t to the corner
                        let mut best = (t, t);
                        let mut bv = mat[t][colmap[t]].abs();
                        for i in t..rows {
                            let x = mat[i][colmap[t]].abs();
                            if !x.is_zero() && (bv.is_zero() || x < bv) {
                                bv = x;
                                best = (i, t);
                            }
                        }
                        for j in t..ncols {
                            let x = mat[t][colmap[j]].abs();
                            if !x.is_zero() && (bv.is_zero() || x < bv) {
                                bv = x;
                                best = (t, j);
                            }
                        }
                        mat.swap(t, best.0);
                        colmap.swap(t, best.1);
                        continue;
                    }
                    // divisibility repair
                    let p = mat[t][colmap[t]].clone();
                    let mut bad = None;
                    'outer: for i in t + 1..rows {
                        for j in t + 1..ncols {
                            let x = &mat[i][colmap[j]];
                            if !x.is_zero() && !x.numer().is_multiple_of(p.numer()) {
                                bad = Some(i);
                                break 'outer;
                            }
                        }
                    }
                    if let Some(i) = bad {
                        let ri = mat[i].clone();
                        let one = ring.one();
                        let neg = ring.neg(&one);
                        vecops::axpy_sub(ring, &mut mat[t], &neg, &ri);
                        continue;
                    }
                    break;
                }
                diag.push(int(mat[t][colmap[t]].numer().abs()));
                t += 1;
            }
        }
    }
    while diag.len() < cols {
        diag.push(Scalar::zero());
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn howell_example() {
        let r = Ring::zmod(2, 2).unwrap();
        let m = Matrix::from_i64(r, 2, &[&[2, 0], &[0, 0]]);
        assert_eq!(normal_form(&m), Matrix::from_i64(r, 2, &[&[2, 0]]));
        let m = Matrix::from_i64(r, 2, &[&[2, 1]]);
        assert_eq!(normal_form(&m), Matrix::from_i64(r, 2, &[&[2, 1], &[0, 2]]));
    }

    #[test]
    fn hermite_example() {
        let m = Matrix::from_i64(Ring::Integers, 1, &[&[2], &[3]]);
        assert_eq!(normal_form(&m), Matrix::from_i64(Ring::Integers, 1, &[&[1]]));
        let m = Matrix::from_i64(Ring::Integers, 2, &[&[4, 6], &[0, 4]]);
        let h = normal_form(&m);
        assert_eq!(h, Matrix::from_i64(Ring::Integers, 2, &[&[4, 2], &[0, 4]]));
    }

    #[test]
    fn intersection_over_f2() {
        let r = Ring::fp(2).unwrap();
        let a = Matrix::from_i64(r, 2, &[&[1, 0]]);
        let b = Matrix::from_i64(r, 2, &[&[1, 1]]);
        assert_eq!(row_space_intersect(&a, &b).rows(), 0);
    }

    #[test]
    fn solve_and_kernel() {
        let r = Ring::zmod(3, 2).unwrap();
        let g = Matrix::from_i64(r, 3, &[&[3, 0, 1], &[0, 3, 2]]);
        let v = vec![r.from_int(6), r.from_int(3), r.from_int(4)];
        let x = solve(&g, &v).unwrap();
        assert_eq!(g.transpose().transpose().row_vecs().len(), 2);
        let back = Matrix::from_row_vec(r, x).mul(&g).unwrap();
        assert_eq!(back.row(0), &v[..]);
        let k = left_kernel(&Matrix::from_i64(r, 1, &[&[3], &[3]]));
        for i in 0..k.rows() {
            let s = r.add(&r.mul(&k.row(i)[0], &r.from_int(3)), &r.mul(&k.row(i)[1], &r.from_int(3)));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn smith_over_integers() {
        let m = Matrix::from_i64(Ring::Integers, 2, &[&[2, 4], &[6, 8]]);
        let d = smith_diagonal(&m);
        assert_eq!(d, vec![Ring::Integers.from_int(2), Ring::Integers.from_int(4)]);
    }
}
