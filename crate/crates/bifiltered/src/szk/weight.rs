//! The column complex `A` with its two weight filtrations, the operators
//! acting on it, and the checks run against it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::assembly::{assemble_l, explicit_source, ColumnSource, LCell};
use super::nerve::{position, sign, IncidenceData, StratumData};
use crate::complex::{is_quasi_isomorphism, BifilteredComplex, Complex};
use crate::error::{Error, Result};
use crate::filtration::{BifilteredModule, Filtration, Which};
use crate::matrix::Matrix;
use crate::monodromy::{graded_isomorphisms, verify_relative_monodromy, NilpotentOperator, OperatorKind, RelativeFailure};
use crate::ring::Ring;
use crate::spectral::{induced_filtration, spectral_sequence};
use crate::subquotient::{ModMorphism, Subquotient};

/// How the input complex `L` was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Assembled from a nerve and stratum data; no `T` is available.
    Direct { inc: IncidenceData, strat: StratumData, cells: Vec<Vec<LCell>> },
    /// The mapping fiber of `T - 1` on `K`.
    Explicit { k: Complex, t: Vec<Matrix> },
}

/// `A^n = ⊕_j L^{n+1} / τ_j L^{n+1}` with `P` as first and `P^D` as second filtration.
#[derive(Clone, Debug)]
pub struct SzkComplex {
    source: ColumnSource,
    columns: usize,
    a: BifilteredComplex,
    mode: Mode,
}

/// Outcome of comparing `d_1` with the expected edge matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeComparison {
    pub cells_checked: usize,
    /// `Some(±1)` when every `d_1` equals the expected map times this sign.
    pub sign: Option<i64>,
    /// Cells `(p, q)` where neither sign matches.
    pub mismatches: Vec<(i64, i64)>,
}

impl EdgeComparison {
    pub fn agrees(&self) -> bool {
        self.sign.is_some()
    }
}

/// Relative monodromy verdict on `H^q` plus the graded isomorphism table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyWeightReport {
    pub degree: i64,
    pub failure: Option<RelativeFailure>,
    /// `(k, e, iso)`: weight `k` of `W`, power `e` of `N`.
    pub graded: Vec<(i64, i64, bool)>,
}

impl MonodromyWeightReport {
    pub fn passes(&self) -> bool {
        self.failure.is_none() && self.graded.iter().all(|g| g.2)
    }
}

fn place(ring: Ring, blocks: usize, width: usize, j: usize, m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(ring, m.rows(), blocks * width);
    out.paste(0, j * width, m);
    out
}

/// Columns `⊕_j L^{n+1}/τ_j`, the differential `-d` within a column plus `θ`
/// into the next, and both filtrations.
fn build_a(src: &ColumnSource) -> Result<(BifilteredComplex, usize)> {
    let ring = src.ring();
    let l = &src.complex;
    let columns = (l.lo()..=l.hi()).map(|m| src.full_from(m)).max().unwrap_or(0).max(0) as usize;
    let widest_d = (l.lo()..=l.hi())
        .map(|m| {
            let mut k = 0;
            while src.horizontal_at(k, m) != l.term(m) {
                k += 1;
            }
            k
        })
        .max()
        .unwrap_or(0);
    let amb = |m: i64| l.term(m).ambient();
    let lo = l.lo() - 1;
    let hi = l.hi() - 1;
    let mut terms = Vec::new();
    for n in lo..=hi {
        let m = n + 1;
        let whole = l.term(m);
        let parts: Result<Vec<Subquotient>> = (0..columns).map(|j| whole.quotient(&src.tau_at(j as i64, m))).collect();
        let module = Subquotient::direct_sum_all(ring, &parts?);
        let w = amb(m);
        let lift = |pieces: &mut dyn FnMut(i64) -> Result<Subquotient>| -> Result<Subquotient> {
            let mut rows = Matrix::zeros(ring, 0, columns * w);
            for j in 0..columns {
                rows = rows.vstack(&place(ring, columns, w, j, pieces(j as i64)?.gens()));
            }
            module.submodule(&rows)
        };
        let c = columns as i64;
        let p = Filtration::from_fn(-c - 1, c + widest_d + 1, |k| {
            lift(&mut |j| {
                let mut acc = src.tau_at(j, m);
                for kd in 0..=widest_d {
                    acc = acc.sum(&src.tau_at(2 * j + k + 1 - kd, m).intersect(&src.horizontal_at(kd, m))?)?;
                }
                Ok(acc)
            })
        })?;
        let pd = Filtration::from_fn(-1, widest_d, |k| lift(&mut |j| src.tau_at(j, m).sum(&src.horizontal_at(k, m))))?;
        terms.push(BifilteredModule::new(module, p, Some(pd))?);
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let m = n + 1;
        let (w, w2) = (amb(m), amb(m + 1));
        let mut d = Matrix::zeros(ring, columns * w, columns * w2);
        let inner = l.diff(m).neg();
        let theta = src.theta_at(m);
        for j in 0..columns {
            d.paste(j * w, j * w2, &inner);
            if j + 1 < columns {
                d.paste(j * w, (j + 1) * w2, &theta);
            }
        }
        diffs.push(d);
    }
    let a = BifilteredComplex::new(ring, lo, terms, diffs).map_err(|e| match e {
        Error::NotAComplex(s) | Error::NotFiltered(s) => Error::AssemblyIdentityViolated(s),
        other => other,
    })?;
    Ok((a, columns))
}

impl SzkComplex {
    /// Build from a nerve with stratum data.
    pub fn build_direct(inc: &IncidenceData, strat: &StratumData) -> Result<SzkComplex> {
        let (source, cells) = assemble_l(inc, strat)?;
        let (a, columns) = build_a(&source)?;
        let mode = Mode::Direct { inc: inc.clone(), strat: strat.clone(), cells };
        Ok(SzkComplex { source, columns, a, mode })
    }

    /// Build from a complex `K` in degrees `>= 0` and an automorphism `T`
    /// commuting with `d` and acting trivially on `H(K)`.
    pub fn build_explicit(k: &Complex, t: &[Matrix]) -> Result<SzkComplex> {
        let source = explicit_source(k, t)?;
        let (a, columns) = build_a(&source)?;
        let mode = Mode::Explicit { k: k.clone(), t: t.to_vec() };
        Ok(SzkComplex { source, columns, a, mode })
    }

    pub fn complex(&self) -> &BifilteredComplex {
        &self.a
    }

    pub fn source(&self) -> &ColumnSource {
        &self.source
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn ring(&self) -> Ring {
        self.a.ring()
    }

    /// Bound past which `P` is everything (up to quasi-isomorphism) or exact.
    pub fn k0(&self) -> i64 {
        match &self.mode {
            Mode::Direct { inc, .. } => inc.k0(),
            Mode::Explicit { .. } => 2 * self.columns as i64 + 2,
        }
    }

    fn width(&self, n: i64) -> usize {
        self.source.complex.term(n + 1).ambient()
    }

    /// Projection of column `j` onto column `j + 1`.
    pub fn nu_tilde(&self, n: i64) -> Matrix {
        let ring = self.ring();
        let w = self.width(n);
        let mut out = Matrix::zeros(ring, self.columns * w, self.columns * w);
        for j in 0..self.columns.saturating_sub(1) {
            out.paste(j * w, (j + 1) * w, &Matrix::identity(ring, w));
        }
        out
    }

    fn t_minus_one(k: &Complex, t: &[Matrix], m: i64) -> Matrix {
        let ring = k.ring();
        let n = k.term(m).ambient();
        if m < k.lo() || m > k.hi() {
            return Matrix::zeros(ring, n, n);
        }
        t[(m - k.lo()) as usize].sub(&Matrix::identity(ring, n)).expect("square")
    }

    /// `T - 1` acting on every column.
    pub fn nu(&self, n: i64) -> Result<Matrix> {
        let Mode::Explicit { k, t } = &self.mode else {
            return Err(Error::TNotAvailable);
        };
        let ring = self.ring();
        let w = self.width(n);
        let block = Self::t_minus_one(k, t, n + 1).block_diag(&Self::t_minus_one(k, t, n));
        let mut out = Matrix::zeros(ring, self.columns * w, self.columns * w);
        for j in 0..self.columns {
            out.paste(j * w, j * w, &block);
        }
        Ok(out)
    }

    /// `(x, y) ↦ (y, 0)` on every column, `A^n -> A^{n-1}`.
    pub fn sigma(&self, n: i64) -> Result<Matrix> {
        let Mode::Explicit { k, .. } = &self.mode else {
            return Err(Error::TNotAvailable);
        };
        let ring = self.ring();
        let (w, w1) = (self.width(n), self.width(n - 1));
        let x = k.term(n + 1).ambient();
        let y = k.term(n).ambient();
        let mut block = Matrix::zeros(ring, w, w1);
        block.paste(x, 0, &Matrix::identity(ring, y));
        let mut out = Matrix::zeros(ring, self.columns * w, self.columns * w1);
        for j in 0..self.columns {
            out.paste(j * w, j * w1, &block);
        }
        Ok(out)
    }

    /// First degree where `σ d + d σ = ν̃ - ν` fails on `A`, if any.
    pub fn homotopy_failure(&self) -> Result<Option<i64>> {
        for n in self.a.lo()..=self.a.hi() {
            let lhs = self.sigma(n)?.mul(&self.a.diff(n - 1))?.add(&self.a.diff(n).mul(&self.sigma(n + 1)?)?)?;
            let rhs = self.nu_tilde(n).sub(&self.nu(n)?)?;
            let a = self.a.term(n).module().clone();
            if !ModMorphism::new_unchecked(a.clone(), a, lhs.sub(&rhs)?).is_zero() {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Is `K -> A`, `x ↦ (0, x)` in column 0, a quasi-isomorphism?
    pub fn inclusion_is_qis(&self) -> Result<bool> {
        let Mode::Explicit { k, .. } = &self.mode else {
            return Err(Error::TNotAvailable);
        };
        let ring = self.ring();
        let total = self.a.underlying();
        let lo = k.lo().min(total.lo());
        let mut maps = Vec::new();
        for n in lo..=k.hi().max(total.hi()) {
            let x = k.term(n + 1).ambient();
            let y = k.term(n).ambient();
            let mut m = Matrix::zeros(ring, y, total.term(n).ambient());
            if self.columns > 0 && y > 0 {
                m.paste(0, x, &Matrix::identity(ring, y));
            }
            maps.push(m);
        }
        Ok(is_quasi_isomorphism(&k.extend_to(lo, lo), &total, &maps))
    }

    /// `d_1` of the selected spectral sequence written in the cell basis:
    /// restriction and Gysin sums for `P`, the horizontal Gysin sum for `P^D`.
    pub fn expected_edge(&self, which: Which, n: i64) -> Result<Matrix> {
        let Mode::Direct { strat, cells, .. } = &self.mode else {
            return Err(Error::BasisMatchFailed("explicit mode has no cell basis".into()));
        };
        let ring = self.ring();
        let lo = self.source.complex.lo();
        let cells_at = |m: i64| -> &[LCell] {
            if m < lo || m > self.source.complex.hi() {
                &[]
            } else {
                &cells[(m - lo) as usize]
            }
        };
        let (src, tgt) = (cells_at(n + 1), cells_at(n + 2));
        let index: BTreeMap<&LCell, usize> = tgt.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let (w, w2) = (self.width(n), self.width(n + 1));
        let mut out = Matrix::zeros(ring, self.columns * w, self.columns * w2);
        let mut add = |row: usize, col: usize, v: crate::ring::Scalar| {
            let cur = out.get(row, col).clone();
            out.set(row, col, ring.add(&cur, &v));
        };
        for j in 0..self.columns {
            for (i, cell) in src.iter().enumerate().filter(|(_, c)| c.key.x.len() > j) {
                let row = j * w + i;
                for ((s, t, r), m) in strat.gysins() {
                    if *s != cell.key || *r != cell.r {
                        continue;
                    }
                    let coeff = if s.d == t.d {
                        if which == Which::Second {
                            continue;
                        }
                        let pos = s.x.iter().position(|a| !t.x.contains(a)).expect("one less component");
                        sign(ring, pos)
                    } else {
                        let pos = s.d.iter().position(|b| !t.d.contains(b)).expect("one less component");
                        ring.mul(&sign(ring, s.x.len() + cell.r.rem_euclid(2) as usize), &sign(ring, pos))
                    };
                    for c in 0..m.cols() {
                        let target = LCell { key: t.clone(), r: r + 2, idx: c };
                        add(row, j * w2 + index[&target], ring.mul(&coeff, m.get(cell.idx, c)));
                    }
                }
                if which == Which::Second || j + 1 >= self.columns {
                    continue;
                }
                for ((s, t, r), m) in strat.restrictions() {
                    if *s != cell.key || *r != cell.r {
                        continue;
                    }
                    let added = t.x.iter().copied().find(|b| !s.x.contains(b)).expect("one more component");
                    let coeff = sign(ring, position(&s.x, added));
                    for c in 0..m.cols() {
                        let target = LCell { key: t.clone(), r: *r, idx: c };
                        add(row, (j + 1) * w2 + index[&target], ring.mul(&coeff, m.get(cell.idx, c)));
                    }
                }
            }
        }
        Ok(out)
    }

    fn cells_at_level(&self, n: i64, k: i64) -> usize {
        let Mode::Direct { cells, .. } = &self.mode else { return 0 };
        let lo = self.source.complex.lo();
        let m = n + 1;
        if m < lo || m > self.source.complex.hi() {
            return 0;
        }
        let mut count = 0;
        for j in 0..self.columns as i64 {
            count += cells[(m - lo) as usize]
                .iter()
                .filter(|c| c.key.x.len() as i64 > j && c.key.x.len() as i64 - 1 - 2 * j + c.key.d.len() as i64 == k)
                .count();
        }
        count
    }

    /// Compare `d_1` of the `(A, P)` or `(A, P^D)` spectral sequence with
    /// [`SzkComplex::expected_edge`].
    pub fn compare_edge(&self, which: Which) -> Result<EdgeComparison> {
        let ss = spectral_sequence(&self.a, which, 1)?;
        let page = ss.page(1).ok_or_else(|| Error::Invalid("no first page".into()))?;
        if which == Which::First {
            for (&(p, q), cell) in &page.cells {
                let expected = Subquotient::free(self.ring(), self.cells_at_level(p + q, -p)).invariants();
                if cell.invariants() != expected {
                    return Err(Error::BasisMatchFailed(format!("E_1 cell ({p},{q}) is not spanned by its stratum cells")));
                }
            }
        }
        let (mut plus, mut minus) = (true, true);
        let mut mismatches = Vec::new();
        for (&(p, q), d) in &page.diffs {
            let e = self.expected_edge(which, p + q)?;
            let up = ModMorphism::new_unchecked(d.source().clone(), d.target().clone(), e.clone());
            let down = ModMorphism::new_unchecked(d.source().clone(), d.target().clone(), e.neg());
            let (u, v) = (d.equals(&up), d.equals(&down));
            plus &= u;
            minus &= v;
            if !u && !v {
                mismatches.push((p, q));
            }
        }
        let sign = if plus {
            Some(1)
        } else if minus {
            Some(-1)
        } else {
            None
        };
        Ok(EdgeComparison { cells_checked: page.diffs.len(), sign, mismatches })
    }

    /// Is `ν̃` on `H^q` a monodromy operator for the induced `P` relative to
    /// the induced `P^D`? Needs field coefficients.
    pub fn monodromy_weight_check(&self, q: i64) -> Result<MonodromyWeightReport> {
        let m = induced_filtration(&self.a, Which::First)?;
        let w = induced_filtration(&self.a, Which::Second)?;
        let h = m.cohomology.get(&q).cloned().unwrap_or_else(|| Subquotient::zero(self.ring(), 0));
        let op = NilpotentOperator::new(h.clone(), self.nu_tilde(q), OperatorKind::Nu)?;
        let (mf, wf) = match (m.filtration.get(&q), w.filtration.get(&q)) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => (Filtration::constant(&h), Filtration::constant(&h)),
        };
        let failure = verify_relative_monodromy(&op, &wf, &mf)?;
        let graded = graded_isomorphisms(&op, &wf, &mf)?;
        Ok(MonodromyWeightReport { degree: q, failure, graded })
    }
}
