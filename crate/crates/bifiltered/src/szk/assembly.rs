//! Complexes feeding the column construction: the Čech–Gysin complex of a
//! nerve, the mapping fiber of `T - 1`, and the horizontal complex `M_D`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::nerve::{position, sign, IncidenceData, StratumData, StratumKey};
use crate::complex::{induced_on_cohomology, BifilteredComplex, Complex};
use crate::error::{Error, Result};
use crate::filtration::{BifilteredModule, Filtration};
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::{ModMorphism, Subquotient};

/// A complex `L` with an increasing filtration `τ` (indexed by `j`), an
/// optional horizontal filtration, and a degree-one map `θ` anticommuting with `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSource {
    pub complex: Complex,
    /// `tau[i]` filters `L^{lo+i}`.
    pub tau: Vec<Filtration>,
    pub horizontal: Option<Vec<Filtration>>,
    /// `theta[i] : L^{lo+i} -> L^{lo+i+1}` on ambient coordinates.
    pub theta: Vec<Matrix>,
}

impl ColumnSource {
    pub fn new(complex: Complex, tau: Vec<Filtration>, horizontal: Option<Vec<Filtration>>, theta: Vec<Matrix>) -> Result<ColumnSource> {
        let n = complex.terms().len();
        if tau.len() != n || theta.len() != n || horizontal.as_ref().is_some_and(|h| h.len() != n) {
            return Err(Error::ShapeMismatch("column data does not match the complex".into()));
        }
        let src = ColumnSource { complex, tau, horizontal, theta };
        let lo = src.complex.lo();
        for m in lo..=src.complex.hi() {
            let t = src.theta_at(m);
            ModMorphism::new(src.complex.term(m), src.complex.term(m + 1), t.clone())?;
            for j in 0..=src.full_from(m) {
                let img = src.tau_at(j, m).gens().mul(&t)?;
                if !crate::linalg::row_space_le(&img, src.tau_at(j + 1, m + 1).gens()) {
                    return Err(Error::AssemblyIdentityViolated(format!("θ does not shift τ in degree {m}")));
                }
                let img = src.tau_at(j, m).gens().mul(&src.complex.diff(m))?;
                if !crate::linalg::row_space_le(&img, src.tau_at(j, m + 1).gens()) {
                    return Err(Error::AssemblyIdentityViolated(format!("d does not preserve τ in degree {m}")));
                }
            }
        }
        Ok(src)
    }

    pub fn ring(&self) -> Ring {
        self.complex.ring()
    }

    fn idx(&self, m: i64) -> Option<usize> {
        (m >= self.complex.lo() && m <= self.complex.hi()).then(|| (m - self.complex.lo()) as usize)
    }

    pub fn theta_at(&self, m: i64) -> Matrix {
        match (self.idx(m), self.idx(m + 1)) {
            (Some(i), Some(_)) => self.theta[i].clone(),
            _ => Matrix::zeros(self.ring(), self.complex.term(m).ambient(), self.complex.term(m + 1).ambient()),
        }
    }

    pub fn tau_at(&self, j: i64, m: i64) -> Subquotient {
        match self.idx(m) {
            Some(i) => self.tau[i].value(j).clone(),
            None => self.complex.term(m),
        }
    }

    pub fn horizontal_at(&self, k: i64, m: i64) -> Subquotient {
        match (self.idx(m), &self.horizontal) {
            (Some(i), Some(h)) => h[i].value(k).clone(),
            (Some(_), None) if k < 0 => self.complex.term(m).zero_sub(),
            _ => self.complex.term(m),
        }
    }

    /// Smallest `j >= 0` with `τ_j L^m = L^m`.
    pub fn full_from(&self, m: i64) -> i64 {
        let whole = self.complex.term(m);
        let mut j = 0;
        while self.tau_at(j, m) != whole {
            j += 1;
        }
        j
    }
}

/// A basis vector of the Čech–Gysin complex: vector `idx` of `H^r` of a stratum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LCell {
    pub key: StratumKey,
    pub r: i64,
    pub idx: usize,
}

impl LCell {
    /// Degree in `L`: `|A| + |B| + r`.
    pub fn degree(&self) -> i64 {
        (self.key.x.len() + self.key.d.len()) as i64 + self.r
    }
}

fn span_of(ring: Ring, n: usize, idx: impl Iterator<Item = usize>) -> Subquotient {
    let rows: Vec<Vec<_>> = idx
        .map(|i| {
            let mut v = alloc::vec![ring.zero(); n];
            v[i] = ring.one();
            v
        })
        .collect();
    Subquotient::free(ring, n).submodule(&Matrix::from_rows(ring, n, rows).expect("unit rows")).expect("inside free module")
}

fn parity(e: i64) -> usize {
    e.rem_euclid(2) as usize
}

/// Čech–Gysin complex of the nerve with `τ` by `|A|`, the horizontal
/// filtration by `|B|`, and `θ` the alternating restriction.
///
/// Signs: `d = -Σ (-1)^m G_{a_m} + (-1)^{|A|+r+1} Σ (-1)^m G_{b_m}` and
/// `θ = Σ (-1)^{pos(b)} ρ_b`.
pub fn assemble_l(inc: &IncidenceData, strat: &StratumData) -> Result<(ColumnSource, Vec<Vec<LCell>>)> {
    let ring = strat.ring();
    let mut by_degree: BTreeMap<i64, Vec<LCell>> = BTreeMap::new();
    for key in inc.all_keys() {
        if let Some(ranks) = strat.ranks().get(&key) {
            for (&r, &n) in ranks {
                for idx in 0..n {
                    let cell = LCell { key: key.clone(), r, idx };
                    by_degree.entry(cell.degree()).or_default().push(cell);
                }
            }
        }
    }
    let lo = by_degree.keys().next().copied().unwrap_or(1).min(1);
    let hi = by_degree.keys().last().copied().unwrap_or(0).max(lo - 1);
    let mut cells: Vec<Vec<LCell>> = (lo..=hi).map(|m| by_degree.remove(&m).unwrap_or_default()).collect();
    for c in &mut cells {
        c.sort();
    }
    let mut index: BTreeMap<LCell, usize> = BTreeMap::new();
    for c in &cells {
        for (i, cell) in c.iter().enumerate() {
            index.insert(cell.clone(), i);
        }
    }
    let dim = |m: i64| if m < lo || m > hi { 0 } else { cells[(m - lo) as usize].len() };
    let mut diffs: Vec<Matrix> = (lo..hi).map(|m| Matrix::zeros(ring, dim(m), dim(m + 1))).collect();
    let mut theta: Vec<Matrix> = (lo..=hi).map(|m| Matrix::zeros(ring, dim(m), dim(m + 1))).collect();
    let put = |mats: &mut Vec<Matrix>, src: &LCell, tgt_key: &StratumKey, tgt_r: i64, m: &Matrix, s: crate::ring::Scalar| {
        let row0 = index[src];
        let deg = src.degree();
        for j in 0..m.cols() {
            let entry = ring.mul(&s, m.get(src.idx, j));
            let t = LCell { key: tgt_key.clone(), r: tgt_r, idx: j };
            let col = index[&t];
            let slot = (deg - lo) as usize;
            let old = mats[slot].get(row0, col).clone();
            mats[slot].set(row0, col, ring.add(&old, &entry));
        }
    };
    for ((s, t, r), m) in strat.gysins() {
        for i in 0..m.rows() {
            let src = LCell { key: s.clone(), r: *r, idx: i };
            let e = if s.d == t.d {
                let a = s.x.iter().position(|a| !t.x.contains(a)).expect("one component removed");
                ring.neg(&sign(ring, a))
            } else {
                let b = s.d.iter().position(|b| !t.d.contains(b)).expect("one component removed");
                ring.mul(&sign(ring, parity(s.x.len() as i64 + r + 1)), &sign(ring, b))
            };
            put(&mut diffs, &src, t, r + 2, m, e);
        }
    }
    for ((s, t, r), m) in strat.restrictions() {
        let b = t.x.iter().find(|b| !s.x.contains(b)).copied().expect("one component added");
        for i in 0..m.rows() {
            let src = LCell { key: s.clone(), r: *r, idx: i };
            put(&mut theta, &src, t, *r, m, sign(ring, position(&s.x, b)));
        }
    }
    let terms: Vec<Subquotient> = (lo..=hi).map(|m| Subquotient::free(ring, dim(m))).collect();
    let complex = Complex::new(ring, lo, terms.clone(), diffs).map_err(|e| Error::AssemblyIdentityViolated(format!("{e}")))?;
    let max_x = inc.max_x() as i64;
    let max_d = inc.max_d() as i64;
    let mut tau = Vec::new();
    let mut horizontal = Vec::new();
    for (i, cs) in cells.iter().enumerate() {
        let steps = (0..=max_x)
            .map(|j| (j, span_of(ring, cs.len(), (0..cs.len()).filter(|&c| cs[c].key.x.len() as i64 <= j))))
            .collect();
        tau.push(Filtration::chain(&terms[i], steps)?);
        let steps = (0..=max_d)
            .map(|k| (k, span_of(ring, cs.len(), (0..cs.len()).filter(|&c| cs[c].key.d.len() as i64 <= k))))
            .collect();
        horizontal.push(Filtration::chain(&terms[i], steps)?);
    }
    let src = ColumnSource::new(complex, tau, Some(horizontal), theta)?;
    Ok((src, cells))
}

/// `MF(T-1)^m = K^m ⊕ K^{m-1}` with `D(x, y) = (dx, (T-1)x - dy)`.
pub fn mapping_fiber_t(k: &Complex, t: &[Matrix]) -> Result<Complex> {
    let ring = k.ring();
    check_t(k, t)?;
    let lo = k.lo();
    let hi = k.hi() + 1;
    let tm1 = |m: i64| -> Matrix {
        if m < k.lo() || m > k.hi() {
            Matrix::zeros(ring, k.term(m).ambient(), k.term(m).ambient())
        } else {
            let n = k.term(m).ambient();
            t[(m - k.lo()) as usize].sub(&Matrix::identity(ring, n)).expect("square")
        }
    };
    let mut terms = Vec::new();
    for m in lo..=hi {
        terms.push(k.term(m).direct_sum(&k.term(m - 1)));
    }
    let mut diffs = Vec::new();
    for m in lo..hi {
        let (a, b) = (k.term(m).ambient(), k.term(m - 1).ambient());
        let c = k.term(m + 1).ambient();
        let mut d = Matrix::zeros(ring, a + b, c + a);
        d.paste(0, 0, &k.diff(m));
        d.paste(0, c, &tm1(m));
        d.paste(a, c, &k.diff(m - 1).neg());
        diffs.push(d);
    }
    Complex::new(ring, lo, terms, diffs)
}

fn check_t(k: &Complex, t: &[Matrix]) -> Result<()> {
    if t.len() != k.terms().len() {
        return Err(Error::ShapeMismatch("one T matrix per degree is required".into()));
    }
    if k.lo() < 0 {
        return Err(Error::Invalid("the complex must live in degrees >= 0".into()));
    }
    for m in k.lo()..=k.hi() {
        let tm = &t[(m - k.lo()) as usize];
        ModMorphism::new(k.term(m), k.term(m), tm.clone())?;
        if m == k.hi() {
            continue;
        }
        let delta = tm.mul(&k.diff(m))?.sub(&k.diff(m).mul(&t[(m - k.lo() + 1) as usize])?)?;
        if !ModMorphism::new_unchecked(k.term(m), k.term(m + 1), delta).is_zero() {
            return Err(Error::NotChainMap(format!("T does not commute with d in degree {m}")));
        }
    }
    Ok(())
}

/// Canonical truncation of `MF` and `θ(x, y) = (0, x)`, after checking that
/// `T` acts trivially on the cohomology of `K`.
pub fn explicit_source(k: &Complex, t: &[Matrix]) -> Result<ColumnSource> {
    let ring = k.ring();
    let mf = mapping_fiber_t(k, t)?;
    for m in k.lo()..=k.hi() {
        let n = k.term(m).ambient();
        let tm1 = t[(m - k.lo()) as usize].sub(&Matrix::identity(ring, n))?;
        if !induced_on_cohomology(k, k, &tm1, m).is_zero() {
            return Err(Error::Invalid(format!("T acts nontrivially on H^{m}")));
        }
    }
    let mut tau = Vec::new();
    let mut theta = Vec::new();
    for m in mf.lo()..=mf.hi() {
        let whole = mf.term(m);
        tau.push(Filtration::chain(&whole, alloc::vec![(m, mf.cycles(m)), (m + 1, whole.clone())])?);
        let (a, b) = (k.term(m).ambient(), k.term(m - 1).ambient());
        let c = k.term(m + 1).ambient();
        let mut th = Matrix::zeros(ring, a + b, if m < mf.hi() { c + a } else { 0 });
        if m < mf.hi() {
            th.paste(0, c, &Matrix::identity(ring, a));
        }
        theta.push(th);
    }
    ColumnSource::new(mf, tau, None, theta)
}

/// The horizontal complex: the ring once per nonempty `D_B`, in degree `|B|`
/// at level `|B|` of both filtrations, with zero differential.
pub fn build_md(ring: Ring, inc: &IncidenceData) -> Result<BifilteredComplex> {
    let strata = inc.d_strata();
    let top = strata.iter().map(|b| b.len()).max().unwrap_or(0);
    let mut terms = Vec::new();
    for k in 0..=top {
        let n = strata.iter().filter(|b| b.len() == k).count();
        let module = Subquotient::free(ring, n);
        let q = Filtration::trivial(&module, k as i64);
        terms.push(BifilteredModule::new(module, q.clone(), Some(q))?);
    }
    let diffs = (0..top).map(|k| Matrix::zeros(ring, terms[k].module().ambient(), terms[k + 1].module().ambient())).collect();
    BifilteredComplex::new(ring, 0, terms, diffs)
}
