//! Bounded cochain complexes of subquotients, with and without filtrations.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filtration::{self, BifilteredModule, Filtration, Level, Which};
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::{Invariants, ModMorphism, Subquotient};

/// `terms[i]` sits in degree `lo + i`; `diffs[i]` goes from `terms[i]` to `terms[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    ring: Ring,
    lo: i64,
    terms: Vec<Subquotient>,
    diffs: Vec<Matrix>,
}

fn check_diffs(terms: &[Subquotient], diffs: &[Matrix]) -> Result<()> {
    if terms.is_empty() {
        if diffs.is_empty() {
            return Ok(());
        }
        return Err(Error::ShapeMismatch("differentials without terms".into()));
    }
    if diffs.len() + 1 != terms.len() {
        return Err(Error::ShapeMismatch(format!("{} terms but {} differentials", terms.len(), diffs.len())));
    }
    for (i, d) in diffs.iter().enumerate() {
        ModMorphism::new(terms[i].clone(), terms[i + 1].clone(), d.clone())?;
    }
    for i in 0..diffs.len().saturating_sub(1) {
        let dd = diffs[i].mul(&diffs[i + 1])?;
        let img = terms[i].gens().mul(&dd)?;
        if !crate::linalg::row_space_le(&img, terms[i + 2].rels()) {
            return Err(Error::NotAComplex(format!("d∘d != 0 at position {i}")));
        }
    }
    Ok(())
}

impl Complex {
    pub fn new(ring: Ring, lo: i64, terms: Vec<Subquotient>, diffs: Vec<Matrix>) -> Result<Complex> {
        check_diffs(&terms, &diffs)?;
        Ok(Complex { ring, lo, terms, diffs })
    }

    pub(crate) fn new_unchecked(ring: Ring, lo: i64, terms: Vec<Subquotient>, diffs: Vec<Matrix>) -> Complex {
        Complex { ring, lo, terms, diffs }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest degree (one below `lo` when empty).
    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn terms(&self) -> &[Subquotient] {
        &self.terms
    }

    pub fn diffs(&self) -> &[Matrix] {
        &self.diffs
    }

    fn idx(&self, q: i64) -> Option<usize> {
        if q < self.lo || q > self.hi() {
            None
        } else {
            Some((q - self.lo) as usize)
        }
    }

    pub fn term(&self, q: i64) -> Subquotient {
        match self.idx(q) {
            Some(i) => self.terms[i].clone(),
            None => Subquotient::zero(self.ring, 0),
        }
    }

    /// Differential out of degree `q` (zero matrix outside the range).
    pub fn diff(&self, q: i64) -> Matrix {
        match (self.idx(q), self.idx(q + 1)) {
            (Some(i), Some(_)) => self.diffs[i].clone(),
            _ => Matrix::zeros(self.ring, self.term(q).ambient(), self.term(q + 1).ambient()),
        }
    }

    pub fn cycles(&self, q: i64) -> Subquotient {
        ModMorphism::new_unchecked(self.term(q), self.term(q + 1), self.diff(q)).kernel()
    }

    pub fn boundaries(&self, q: i64) -> Subquotient {
        ModMorphism::new_unchecked(self.term(q - 1), self.term(q), self.diff(q - 1)).image()
    }

    pub fn cohomology(&self, q: i64) -> Subquotient {
        let z = self.cycles(q);
        let b = self.boundaries(q);
        z.quotient(&b).expect("boundaries are cycles")
    }

    pub fn is_exact(&self) -> bool {
        (self.lo..=self.hi()).all(|q| self.cohomology(q).is_zero())
    }

    pub fn cohomology_invariants(&self) -> Vec<(i64, Invariants)> {
        (self.lo..=self.hi()).map(|q| (q, self.cohomology(q).invariants())).collect()
    }

    /// Same complex padded with zero terms to cover `lo..=hi`.
    pub fn extend_to(&self, lo: i64, hi: i64) -> Complex {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi());
        let terms: Vec<Subquotient> = (lo..=hi).map(|q| self.term(q)).collect();
        let diffs = (lo..hi).map(|q| self.diff(q)).collect();
        Complex { ring: self.ring, lo, terms, diffs }
    }
}

/// The map induced on `H^q` by a degreewise family of matrices.
pub fn induced_on_cohomology(source: &Complex, target: &Complex, map: &Matrix, q: i64) -> ModMorphism {
    ModMorphism::new_unchecked(source.cohomology(q), target.cohomology(q), map.clone())
}

/// Does a chain map (given degreewise from `source.lo()`) induce isomorphisms on cohomology?
pub fn is_quasi_isomorphism(source: &Complex, target: &Complex, maps: &[Matrix]) -> bool {
    first_non_qis_degree(source, target, maps).is_none()
}

pub fn first_non_qis_degree(source: &Complex, target: &Complex, maps: &[Matrix]) -> Option<i64> {
    let lo = source.lo().min(target.lo());
    let hi = source.hi().max(target.hi());
    for q in lo..=hi {
        let m = match q - source.lo() {
            i if i >= 0 && (i as usize) < maps.len() => maps[i as usize].clone(),
            _ => Matrix::zeros(source.ring, source.term(q).ambient(), target.term(q).ambient()),
        };
        if !induced_on_cohomology(source, target, &m, q).is_isomorphism() {
            return Some(q);
        }
    }
    None
}

/// A bounded complex whose terms carry one or two filtrations respected by `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BifilteredComplex {
    ring: Ring,
    lo: i64,
    terms: Vec<BifilteredModule>,
    diffs: Vec<Matrix>,
}

impl BifilteredComplex {
    pub fn new(ring: Ring, lo: i64, terms: Vec<BifilteredModule>, diffs: Vec<Matrix>) -> Result<BifilteredComplex> {
        let plain: Vec<Subquotient> = terms.iter().map(|t| t.module().clone()).collect();
        check_diffs(&plain, &diffs)?;
        if let Some(first) = terms.first() {
            if terms.iter().any(|t| t.is_bifiltered() != first.is_bifiltered()) {
                return Err(Error::Invalid("terms disagree on the number of filtrations".into()));
            }
        }
        let c = BifilteredComplex { ring, lo, terms, diffs };
        for (i, d) in c.diffs.iter().enumerate() {
            let (s, t) = (&c.terms[i], &c.terms[i + 1]);
            let (s1, s2) = s.jumps();
            let (t1, t2) = t.jumps();
            let bp1 = filtration::with_sentinels(filtration::union_sorted(&[s1, t1]));
            let bp2 = filtration::with_sentinels(filtration::union_sorted(&[s2, t2]));
            for lvl in [Level::First(0), Level::Second(0)].into_iter().chain(filtration::levels(&bp1, &bp2, true)) {
                if matches!(lvl, Level::Both(..)) {
                    continue;
                }
                let img = s.step(lvl).gens().mul(d)?;
                if !crate::linalg::row_space_le(&img, t.step(lvl).gens()) {
                    return Err(Error::NotFiltered(format!("differential out of degree {} at {lvl:?}", lo + i as i64)));
                }
            }
        }
        Ok(c)
    }

    pub(crate) fn new_unchecked(ring: Ring, lo: i64, terms: Vec<BifilteredModule>, diffs: Vec<Matrix>) -> BifilteredComplex {
        BifilteredComplex { ring, lo, terms, diffs }
    }

    /// A single module in degree `q`.
    pub fn concentrated(module: BifilteredModule, q: i64) -> BifilteredComplex {
        BifilteredComplex { ring: module.module().ring(), lo: q, terms: alloc::vec![module], diffs: Vec::new() }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn terms(&self) -> &[BifilteredModule] {
        &self.terms
    }

    pub fn diffs(&self) -> &[Matrix] {
        &self.diffs
    }

    pub fn is_bifiltered(&self) -> bool {
        self.terms.first().is_none_or(|t| t.is_bifiltered())
    }

    fn idx(&self, q: i64) -> Option<usize> {
        if q < self.lo || q > self.hi() {
            None
        } else {
            Some((q - self.lo) as usize)
        }
    }

    pub fn term(&self, q: i64) -> BifilteredModule {
        match self.idx(q) {
            Some(i) => self.terms[i].clone(),
            None => BifilteredModule::zero(self.ring, self.is_bifiltered()),
        }
    }

    pub fn diff(&self, q: i64) -> Matrix {
        match (self.idx(q), self.idx(q + 1)) {
            (Some(i), Some(_)) => self.diffs[i].clone(),
            _ => Matrix::zeros(self.ring, self.term(q).module().ambient(), self.term(q + 1).module().ambient()),
        }
    }

    pub fn extend_to(&self, lo: i64, hi: i64) -> BifilteredComplex {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi());
        BifilteredComplex {
            ring: self.ring,
            lo,
            terms: (lo..=hi).map(|q| self.term(q)).collect(),
            diffs: (lo..hi).map(|q| self.diff(q)).collect(),
        }
    }

    pub fn underlying(&self) -> Complex {
        Complex::new_unchecked(self.ring, self.lo, self.terms.iter().map(|t| t.module().clone()).collect(), self.diffs.clone())
    }

    pub fn level_complex(&self, level: Level) -> Complex {
        Complex::new_unchecked(self.ring, self.lo, self.terms.iter().map(|t| t.step(level)).collect(), self.diffs.clone())
    }

    /// `gr^{P1}_{k1} gr^{P2}_{k2}` as a complex (single `gr` when 1-filtered).
    pub fn gr_complex(&self, k1: i64, k2: i64) -> Complex {
        Complex::new_unchecked(self.ring, self.lo, self.terms.iter().map(|t| t.gr(k1, k2)).collect(), self.diffs.clone())
    }

    pub fn gr_single(&self, which: Which, k: i64) -> Complex {
        Complex::new_unchecked(
            self.ring,
            self.lo,
            self.terms.iter().map(|t| t.gr_single(which, k)).collect(),
            self.diffs.clone(),
        )
    }

    /// Subcomplex `P_k` of one filtration.
    pub fn step_complex(&self, which: Which, k: i64) -> Complex {
        let lvl = match which {
            Which::First => Level::First(k),
            Which::Second => Level::Second(k),
        };
        self.level_complex(lvl)
    }

    pub fn jumps(&self) -> (Vec<i64>, Vec<i64>) {
        let (a, b): (Vec<_>, Vec<_>) = self.terms.iter().map(|t| t.jumps()).unzip();
        (filtration::union_sorted(&a), filtration::union_sorted(&b))
    }

    pub fn breakpoints(&self) -> (Vec<i64>, Vec<i64>) {
        let (a, b) = self.jumps();
        (filtration::with_sentinels(a), filtration::with_sentinels(b))
    }

    pub fn levels(&self) -> Vec<Level> {
        let (a, b) = self.breakpoints();
        filtration::levels(&a, &b, self.is_bifiltered())
    }

    pub fn is_biregular(&self) -> bool {
        self.terms.iter().all(|t| t.is_biregular())
    }

    /// First failing level (`None` for the underlying complex), if any.
    pub fn strict_exactness_failure(&self) -> Option<Option<Level>> {
        if !self.underlying().is_exact() {
            return Some(None);
        }
        self.levels().into_iter().find(|&l| !self.level_complex(l).is_exact()).map(Some)
    }

    pub fn is_strictly_exact(&self) -> bool {
        self.strict_exactness_failure().is_none()
    }

    /// `P1<l1>`, `P2<l2>`.
    pub fn shift_filtration(&self, l1: i64, l2: i64) -> BifilteredComplex {
        BifilteredComplex {
            ring: self.ring,
            lo: self.lo,
            terms: self.terms.iter().map(|t| t.shift(l1, l2)).collect(),
            diffs: self.diffs.clone(),
        }
    }

    /// Keep only one filtration (as the first).
    pub fn single(&self, which: Which) -> BifilteredComplex {
        BifilteredComplex {
            ring: self.ring,
            lo: self.lo,
            terms: self.terms.iter().map(|t| filtration::single(t, which)).collect(),
            diffs: self.diffs.clone(),
        }
    }

    /// Cohomological shift `[n]` (degree `q` of the result is degree `q+n` here),
    /// with differential multiplied by `(-1)^n`.
    pub fn degree_shift(&self, n: i64) -> BifilteredComplex {
        let sign = if n.rem_euclid(2) == 1 { self.ring.from_int(-1) } else { self.ring.one() };
        BifilteredComplex {
            ring: self.ring,
            lo: self.lo - n,
            terms: self.terms.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&sign)).collect(),
        }
    }

    /// Base change of every module, step and differential to `ring` (e.g. `Z -> Q`).
    pub fn change_ring(&self, ring: Ring) -> Result<BifilteredComplex> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let m = t.module().change_ring(ring)?;
            let conv = |p: &Filtration| -> Result<Filtration> {
                let mut steps = Vec::new();
                for (k, v) in p.steps() {
                    steps.push((*k, Subquotient::spanned(v.gens().change_ring(ring)?, m.rels().clone())?));
                }
                Filtration::new(
                    Subquotient::spanned(p.floor().gens().change_ring(ring)?, m.rels().clone())?,
                    steps,
                    Subquotient::spanned(p.ceiling().gens().change_ring(ring)?, m.rels().clone())?,
                )
            };
            let p1 = conv(t.p1())?;
            let p2 = t.p2().map(conv).transpose()?;
            terms.push(BifilteredModule::new(m, p1, p2)?);
        }
        let diffs = self.diffs.iter().map(|d| d.change_ring(ring)).collect::<Result<Vec<_>>>()?;
        BifilteredComplex::new(ring, self.lo, terms, diffs)
    }
}

/// Tensor with `Q`: the "modulo torsion" view of a complex over `Z`.
pub fn rationalize(c: &BifilteredComplex) -> Result<BifilteredComplex> {
    if c.ring() != Ring::Integers {
        return Err(Error::UnsupportedRing("rationalize expects a complex over Z".into()));
    }
    c.change_ring(Ring::Rationals)
}

/// A degreewise map of filtered complexes commuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FilteredMorphism {
    source: BifilteredComplex,
    target: BifilteredComplex,
    maps: Vec<Matrix>,
}

impl FilteredMorphism {
    /// `maps[i]` is the component in degree `lo + i`, where `lo` is the smaller
    /// of the two lower bounds; both complexes are padded to a common range.
    pub fn new(source: &BifilteredComplex, target: &BifilteredComplex, maps: Vec<Matrix>) -> Result<FilteredMorphism> {
        let lo = source.lo().min(target.lo());
        let hi = source.hi().max(target.hi());
        let source = source.extend_to(lo, hi);
        let target = target.extend_to(lo, hi);
        if maps.len() != source.terms.len() {
            return Err(Error::ShapeMismatch(format!("{} components for {} degrees", maps.len(), source.terms.len())));
        }
        for (i, m) in maps.iter().enumerate() {
            let q = lo + i as i64;
            let s = source.term(q);
            let t = target.term(q);
            ModMorphism::new(s.module().clone(), t.module().clone(), m.clone())?;
            let left = source.diff(q).mul(&maps.get(i + 1).cloned().unwrap_or_else(|| {
                Matrix::zeros(source.ring, source.term(q + 1).module().ambient(), target.term(q + 1).module().ambient())
            }))?;
            let right = m.mul(&target.diff(q))?;
            let diff = s.module().gens().mul(&left.sub(&right)?)?;
            if !crate::linalg::row_space_le(&diff, target.term(q + 1).module().rels()) {
                return Err(Error::NotChainMap(format!("degree {q}")));
            }
            let (s1, s2) = s.jumps();
            let (t1, t2) = t.jumps();
            let bp1 = filtration::with_sentinels(filtration::union_sorted(&[s1, t1]));
            let bp2 = filtration::with_sentinels(filtration::union_sorted(&[s2, t2]));
            for lvl in filtration::levels(&bp1, &bp2, source.is_bifiltered() && target.is_bifiltered()) {
                if matches!(lvl, Level::Both(..)) {
                    continue;
                }
                let img = s.step(lvl).gens().mul(m)?;
                if !crate::linalg::row_space_le(&img, t.step(lvl).gens()) {
                    return Err(Error::NotFiltered(format!("degree {q} at {lvl:?}")));
                }
            }
        }
        Ok(FilteredMorphism { source, target, maps })
    }

    pub fn identity(c: &BifilteredComplex) -> FilteredMorphism {
        let maps = c.terms.iter().map(|t| Matrix::identity(c.ring, t.module().ambient())).collect();
        FilteredMorphism { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &BifilteredComplex, target: &BifilteredComplex) -> FilteredMorphism {
        let lo = source.lo().min(target.lo());
        let hi = source.hi().max(target.hi());
        let s = source.extend_to(lo, hi);
        let t = target.extend_to(lo, hi);
        let maps = (lo..=hi)
            .map(|q| Matrix::zeros(s.ring, s.term(q).module().ambient(), t.term(q).module().ambient()))
            .collect();
        FilteredMorphism { source: s, target: t, maps }
    }

    pub fn source(&self) -> &BifilteredComplex {
        &self.source
    }

    pub fn target(&self) -> &BifilteredComplex {
        &self.target
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn lo(&self) -> i64 {
        self.source.lo
    }

    pub fn map(&self, q: i64) -> Matrix {
        let i = q - self.lo();
        if i >= 0 && (i as usize) < self.maps.len() {
            self.maps[i as usize].clone()
        } else {
            Matrix::zeros(self.source.ring, self.source.term(q).module().ambient(), self.target.term(q).module().ambient())
        }
    }

    /// Strictness of the degree-`q` component.
    pub fn is_strict_at(&self, q: i64) -> Result<bool> {
        filtration::is_strict(&self.source.term(q), &self.target.term(q), &self.map(q))
    }

    /// First failing level of the direct quasi-isomorphism test (`None` inside
    /// means the underlying complexes), if any.
    pub fn qis_failure(&self) -> Option<(Option<Level>, i64)> {
        if let Some(q) = first_non_qis_degree(&self.source.underlying(), &self.target.underlying(), &self.maps) {
            return Some((None, q));
        }
        let (s1, s2) = self.source.jumps();
        let (t1, t2) = self.target.jumps();
        let bp1 = filtration::with_sentinels(filtration::union_sorted(&[s1, t1]));
        let bp2 = filtration::with_sentinels(filtration::union_sorted(&[s2, t2]));
        let two = self.source.is_bifiltered() && self.target.is_bifiltered();
        for lvl in filtration::levels(&bp1, &bp2, two) {
            let s = self.source.level_complex(lvl);
            let t = self.target.level_complex(lvl);
            if let Some(q) = first_non_qis_degree(&s, &t, &self.maps) {
                return Some((Some(lvl), q));
            }
        }
        None
    }

    /// Filtered quasi-isomorphism in the direct sense.
    pub fn is_bifiltered_qis(&self) -> bool {
        self.qis_failure().is_none()
    }

    /// The graded criterion: every `gr_{k1} gr_{k2}` (or `gr_k`) of the map is a
    /// quasi-isomorphism. Meaningful for biregular filtrations.
    pub fn is_gr_qis(&self) -> bool {
        let (s1, s2) = self.source.jumps();
        let (t1, t2) = self.target.jumps();
        let j1 = filtration::union_sorted(&[s1, t1]);
        let j2 = filtration::union_sorted(&[s2, t2]);
        let two = self.source.is_bifiltered() && self.target.is_bifiltered();
        if two {
            j1.iter().all(|&a| {
                j2.iter().all(|&b| {
                    is_quasi_isomorphism(&self.source.gr_complex(a, b), &self.target.gr_complex(a, b), &self.maps)
                })
            })
        } else {
            j1.iter().all(|&a| {
                is_quasi_isomorphism(
                    &self.source.gr_single(Which::First, a),
                    &self.target.gr_single(Which::First, a),
                    &self.maps,
                )
            })
        }
    }

    pub fn compose(&self, next: &FilteredMorphism) -> Result<FilteredMorphism> {
        let lo = self.lo().min(next.lo());
        let hi = self.source.hi().max(next.target.hi());
        let maps = (lo..=hi).map(|q| self.map(q).mul(&next.map(q))).collect::<Result<Vec<_>>>()?;
        FilteredMorphism::new(&self.source, &next.target, maps)
    }
}

/// `MC(f)^q = E^{q+1} ⊕ F^q` with `(x, y) ↦ (-d x, d y + f x)`.
pub fn mapping_cone(f: &FilteredMorphism) -> BifilteredComplex {
    let (e, t) = (&f.source, &f.target);
    let ring = e.ring;
    let lo = f.lo() - 1;
    let hi = e.hi().max(t.hi());
    let terms: Vec<BifilteredModule> = (lo..=hi).map(|q| e.term(q + 1).direct_sum(&t.term(q))).collect();
    let diffs = (lo..hi)
        .map(|q| {
            let de = e.diff(q + 1).neg();
            let fx = f.map(q + 1);
            let df = t.diff(q);
            let z = Matrix::zeros(ring, t.term(q).module().ambient(), e.term(q + 2).module().ambient());
            de.hstack(&fx).vstack(&z.hstack(&df))
        })
        .collect();
    BifilteredComplex::new_unchecked(ring, lo, terms, diffs)
}

/// `MF(f)^q = E^q ⊕ F^{q-1}` with `(x, y) ↦ (d x, -d y + f x)`.
pub fn mapping_fiber(f: &FilteredMorphism) -> BifilteredComplex {
    let (e, t) = (&f.source, &f.target);
    let ring = e.ring;
    let lo = f.lo();
    let hi = e.hi().max(t.hi()) + 1;
    let terms: Vec<BifilteredModule> = (lo..=hi).map(|q| e.term(q).direct_sum(&t.term(q - 1))).collect();
    let diffs = (lo..hi)
        .map(|q| {
            let de = e.diff(q);
            let fx = f.map(q);
            let df = t.diff(q - 1).neg();
            let z = Matrix::zeros(ring, t.term(q - 1).module().ambient(), e.term(q + 1).module().ambient());
            de.hstack(&fx).vstack(&z.hstack(&df))
        })
        .collect();
    BifilteredComplex::new_unchecked(ring, lo, terms, diffs)
}
