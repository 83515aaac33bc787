//! Spectral sequences of filtered bounded complexes.
//!
//! The increasing filtration `P` is turned into the decreasing `F^p = P_{-p}`,
//! so a cell `(p, q)` is the filtration level `k = -p` in total degree `p + q`.
//! Pages are computed with the usual `Z_r / B_r` subquotients of each term and
//! `d_r` is the differential itself, checked to be well defined on every cell.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::complex::{BifilteredComplex, FilteredMorphism};
use crate::error::{Error, Result};
use crate::filtration::{Filtration, Which};
use crate::ring::Ring;
use crate::subquotient::{Invariants, ModMorphism, Subquotient};

/// Where the differentials stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneration {
    /// All `d_r` vanish from this page on (every possibly nonzero page was computed).
    At(usize),
    /// The computed pages stop before the last possibly nonzero one; the true page
    /// is at least this.
    AtLeast(usize),
}

impl Degeneration {
    pub fn page(&self) -> usize {
        match self {
            Degeneration::At(r) | Degeneration::AtLeast(r) => *r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Page {
    pub r: usize,
    /// `E_r^{p,q}` as a subquotient of the term in degree `p + q`.
    pub cells: BTreeMap<(i64, i64), Subquotient>,
    /// `d_r^{p,q} : E_r^{p,q} -> E_r^{p+r, q-r+1}`.
    pub diffs: BTreeMap<(i64, i64), ModMorphism>,
}

impl Page {
    pub fn cell(&self, p: i64, q: i64) -> Option<&Subquotient> {
        self.cells.get(&(p, q))
    }

    pub fn is_degenerate(&self) -> bool {
        self.diffs.values().all(|d| d.is_zero())
    }

    pub fn invariants(&self) -> BTreeMap<(i64, i64), Invariants> {
        self.cells.iter().map(|(k, v)| (*k, v.invariants())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub which: Which,
    pub complex: BifilteredComplex,
    /// `pages[i]` is `E_{i+1}`.
    pub pages: Vec<Page>,
    /// `E_∞`, computed directly from cycles and boundaries.
    pub limit: BTreeMap<(i64, i64), Subquotient>,
    pub degeneration: Degeneration,
    p_min: i64,
    p_max: i64,
}

/// Shared access to the filtered terms with the decreasing indexing.
struct Terms<'a> {
    c: &'a BifilteredComplex,
    which: Which,
}

impl Terms<'_> {
    fn filtration(&self, n: i64) -> Filtration {
        let t = self.c.term(n);
        t.filtration(self.which).cloned().unwrap_or_else(|| Filtration::trivial(t.module(), 0))
    }

    fn f(&self, p: i64, n: i64) -> Subquotient {
        self.filtration(n).value(-p).clone()
    }

    fn d(&self, n: i64) -> ModMorphism {
        ModMorphism::new_unchecked(self.c.term(n).module().clone(), self.c.term(n + 1).module().clone(), self.c.diff(n))
    }

    /// `Z_r^{p} = F^p ∩ d^{-1}(F^{p+r})` in degree `n`.
    fn z(&self, r: usize, p: i64, n: i64) -> Subquotient {
        let pre = self.d(n).preimage(&self.f(p + r as i64, n + 1)).expect("same ambient");
        self.f(p, n).intersect(&pre).expect("same ambient")
    }

    /// `Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}` in degree `n`.
    fn b(&self, r: usize, p: i64, n: i64) -> Subquotient {
        let r1 = r - 1;
        let left = self.z(r1, p + 1, n);
        let right = self.d(n - 1).image_of(&self.z(r1, p - r as i64 + 1, n - 1));
        left.sum(&right).expect("same ambient")
    }

    fn e(&self, r: usize, p: i64, n: i64) -> Result<Subquotient> {
        let z = self.z(r, p, n);
        let b = self.b(r, p, n);
        if !b.is_sub(&z) {
            return Err(Error::IllDefinedDifferential(alloc::format!("boundaries escape cycles at p={p}, n={n}")));
        }
        z.quotient(&b)
    }

    fn limit(&self, p: i64, n: i64) -> Result<Subquotient> {
        let cyc = self.d(n).kernel();
        let im = self.d(n - 1).image();
        let z = self.f(p, n).intersect(&cyc)?;
        let b = self.f(p + 1, n).intersect(&cyc)?.sum(&self.f(p, n).intersect(&im)?)?;
        z.quotient(&b)
    }
}

fn p_range(c: &BifilteredComplex, which: Which) -> (i64, i64) {
    let mut ks: Vec<i64> = Vec::new();
    for t in c.terms() {
        if let Some(f) = t.filtration(which) {
            ks.extend(f.jumps());
        }
    }
    match (ks.iter().min(), ks.iter().max()) {
        (Some(&lo), Some(&hi)) => (-hi, -lo),
        _ => (0, 0),
    }
}

fn page(t: &Terms<'_>, r: usize, p_min: i64, p_max: i64) -> Result<Page> {
    let (lo, hi) = (t.c.lo(), t.c.hi());
    let mut cells = BTreeMap::new();
    for n in lo..=hi {
        for p in p_min..=p_max {
            cells.insert((p, n - p), t.e(r, p, n)?);
        }
    }
    let mut diffs = BTreeMap::new();
    for n in lo..=hi {
        for p in p_min..=p_max {
            let src = cells[&(p, n - p)].clone();
            let tp = p + r as i64;
            let tgt = match cells.get(&(tp, n + 1 - tp)) {
                Some(m) => m.clone(),
                None if n < hi => t.e(r, tp, n + 1)?,
                None => Subquotient::zero(t.c.ring(), t.c.term(n + 1).module().ambient()),
            };
            let d = ModMorphism::new(src, tgt, t.c.diff(n))
                .map_err(|e| Error::IllDefinedDifferential(alloc::format!("d_{r} at ({p},{}): {e}", n - p)))?;
            diffs.insert((p, n - p), d);
        }
    }
    Ok(Page { r, cells, diffs })
}

/// Pages `E_1 .. E_{r_max}` and the limit of the spectral sequence of the
/// selected filtration.
pub fn spectral_sequence(c: &BifilteredComplex, which: Which, r_max: usize) -> Result<SpectralSequence> {
    if which == Which::Second && !c.is_bifiltered() {
        return Err(Error::Invalid("complex has no second filtration".into()));
    }
    let t = Terms { c, which };
    let (p_min, p_max) = p_range(c, which);
    let r_max = r_max.max(1);
    let mut pages = Vec::new();
    for r in 1..=r_max {
        pages.push(page(&t, r, p_min, p_max)?);
    }
    let mut limit = BTreeMap::new();
    for n in c.lo()..=c.hi() {
        for p in p_min..=p_max {
            limit.insert((p, n - p), t.limit(p, n)?);
        }
    }
    // d_r can only be nonzero for r <= p_max - p_min
    let last_live = (p_max - p_min).max(0) as usize;
    let last_nonzero = pages.iter().rev().find(|pg| !pg.is_degenerate()).map(|pg| pg.r);
    let first_quiet = last_nonzero.map_or(1, |r| r + 1);
    let degeneration = if r_max >= last_live { Degeneration::At(first_quiet) } else { Degeneration::AtLeast(first_quiet) };
    Ok(SpectralSequence { which, complex: c.clone(), pages, limit, degeneration, p_min, p_max })
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.get(r.checked_sub(1)?)
    }

    pub fn p_range(&self) -> (i64, i64) {
        (self.p_min, self.p_max)
    }

    /// `d_s = 0` for every computed `s >= r`, and every possibly nonzero page was computed.
    pub fn degenerates_at(&self, r: usize) -> bool {
        matches!(self.degeneration, Degeneration::At(d) if d <= r)
    }

    /// The last computed page, or `E_∞` once the differentials are exhausted.
    pub fn stable_page(&self) -> Result<Page> {
        let r = (self.p_max - self.p_min).max(0) as usize + 1;
        page(&Terms { c: &self.complex, which: self.which }, r, self.p_min, self.p_max)
    }

    /// Does `E_{r+1}` agree with the cohomology of `(E_r, d_r)` at every cell?
    pub fn page_recursion_holds(&self) -> bool {
        for w in self.pages.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            let r = cur.r as i64;
            for (&(p, q), cell) in &next.cells {
                let out = &cur.diffs[&(p, q)];
                let kernel = out.kernel();
                let image = match cur.diffs.get(&(p - r, q + r - 1)) {
                    Some(d) => d.image(),
                    None => cur.cells[&(p, q)].zero_sub(),
                };
                let h = match kernel.quotient(&image) {
                    Ok(h) => h,
                    Err(_) => return false,
                };
                if h.invariants() != cell.invariants() {
                    return false;
                }
            }
        }
        true
    }

    /// `E_∞^{p, n-p}` summed over `p`, in total degree `n`.
    pub fn limit_invariants(&self, n: i64) -> Invariants {
        let ring = self.complex.ring();
        let mut acc = Invariants::zero_for(ring);
        for p in self.p_min..=self.p_max {
            if let Some(m) = self.limit.get(&(p, n - p)) {
                acc = acc.plus(&m.invariants());
            }
        }
        acc
    }
}

/// Cohomology of the total complex with the filtration induced by the selected one.
#[derive(Clone, Debug)]
pub struct InducedFiltration {
    pub cohomology: BTreeMap<i64, Subquotient>,
    /// In weights: level `k` of the complex contributes to weight `n + k` on `H^n`.
    pub filtration: BTreeMap<i64, Filtration>,
}

impl InducedFiltration {
    pub fn gr(&self, n: i64, weight: i64) -> Subquotient {
        self.filtration[&n].gr(weight)
    }

    pub fn gr_invariants(&self, ring: Ring, n: i64) -> Invariants {
        let f = &self.filtration[&n];
        let mut acc = Invariants::zero_for(ring);
        let mut prev = f.floor().clone();
        for (_, v) in f.steps() {
            acc = acc.plus(&v.quotient(&prev).expect("monotone").invariants());
            prev = v.clone();
        }
        acc
    }
}

/// Images of `H^n(P_k) -> H^n`, placed at weight `n + k`.
pub fn induced_filtration(c: &BifilteredComplex, which: Which) -> Result<InducedFiltration> {
    let total = c.underlying();
    let mut ks: Vec<i64> = Vec::new();
    for t in c.terms() {
        if let Some(f) = t.filtration(which) {
            ks.extend(f.breakpoints());
        }
    }
    ks.sort_unstable();
    ks.dedup();
    let mut cohomology = BTreeMap::new();
    let mut filtration = BTreeMap::new();
    for n in c.lo()..=c.hi() {
        let h = total.cohomology(n);
        let boundaries = total.boundaries(n);
        let image_at = |k: i64| -> Result<Subquotient> {
            let sub = c.step_complex(which, k);
            let s = sub.cycles(n).sum(&boundaries)?;
            Subquotient::new(s.gens().clone(), boundaries.gens().clone())
        };
        let floor = match ks.first() {
            Some(&k) => image_at(k - 1)?,
            None => h.zero_sub(),
        };
        let mut steps = Vec::new();
        for &k in &ks {
            steps.push((n + k, image_at(k)?));
        }
        let ceiling = match ks.last() {
            Some(&k) => image_at(k + 1)?,
            None => h.clone(),
        };
        filtration.insert(n, Filtration::new(floor, steps, ceiling)?);
        cohomology.insert(n, h);
    }
    Ok(InducedFiltration { cohomology, filtration })
}

/// Cell maps between two pages, keyed by `(p, q)`.
pub type PageMaps = BTreeMap<(i64, i64), ModMorphism>;

/// The maps induced on page `r` by a filtered morphism (`None` if a cell map is ill defined).
pub fn induced_page_maps(f: &FilteredMorphism, which: Which, r: usize) -> Result<(Page, Page, PageMaps)> {
    let (s, t) = (f.source(), f.target());
    let (a1, b1) = p_range(s, which);
    let (a2, b2) = p_range(t, which);
    let (p_min, p_max) = (a1.min(a2), b1.max(b2));
    let ps = page(&Terms { c: s, which }, r, p_min, p_max)?;
    let pt = page(&Terms { c: t, which }, r, p_min, p_max)?;
    let mut maps = BTreeMap::new();
    for (&(p, q), cell) in &ps.cells {
        let tgt = pt.cells[&(p, q)].clone();
        maps.insert((p, q), ModMorphism::new(cell.clone(), tgt, f.map(p + q))?);
    }
    Ok((ps, pt, maps))
}

/// Does the page map commute with `d_r` on every cell?
pub fn page_maps_commute(ps: &Page, pt: &Page, maps: &BTreeMap<(i64, i64), ModMorphism>) -> bool {
    let r = ps.r as i64;
    ps.diffs.iter().all(|(&(p, q), d)| {
        let Some(target_cell) = maps.get(&(p + r, q - r + 1)) else { return true };
        let left = d.compose(target_cell);
        let right = maps[&(p, q)].compose(&pt.diffs[&(p, q)]);
        match (left, right) {
            (Ok(a), Ok(b)) => a.equals(&b),
            _ => false,
        }
    })
}
