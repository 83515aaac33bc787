//! Nilpotent operators, their monodromy filtrations, relative monodromy
//! filtrations and the graded-isomorphism lemma for `Ker g / Im f`.

use alloc::format;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::filtration::{self, Filtration};
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::{ModMorphism, Subquotient};
use crate::twist::TwistTag;

/// Which operator the caller supplied: `ν = (T - 1)` or `N = log T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Nu,
    LogT,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentOperator {
    space: Subquotient,
    map: Matrix,
    twist: TwistTag,
    kind: OperatorKind,
    index: usize,
}

fn power(m: &Matrix, e: usize) -> Matrix {
    let mut acc = Matrix::identity(m.ring(), m.rows());
    for _ in 0..e {
        acc = acc.mul(m).expect("square");
    }
    acc
}

impl NilpotentOperator {
    /// Checks that the ring is a field, that `map` is an endomorphism of
    /// `space`, and that it is nilpotent.
    pub fn new(space: Subquotient, map: Matrix, kind: OperatorKind) -> Result<NilpotentOperator> {
        let ring = space.ring();
        if !ring.is_field() {
            return Err(Error::NotAField);
        }
        ModMorphism::new(space.clone(), space.clone(), map.clone())?;
        let bound = space.ambient() + 1;
        let index = (0..=bound)
            .find(|&e| ModMorphism::new_unchecked(space.clone(), space.clone(), power(&map, e)).is_zero())
            .ok_or_else(|| Error::NilpotencyVerificationFailed(format!("no power up to {bound} vanishes")))?;
        Ok(NilpotentOperator { space, map, twist: TwistTag::new(ring, -1), kind, index })
    }

    pub fn space(&self) -> &Subquotient {
        &self.space
    }

    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn twist(&self) -> &TwistTag {
        &self.twist
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn ring(&self) -> Ring {
        self.space.ring()
    }

    /// Smallest `e` with `N^e = 0`.
    pub fn nilpotency_index(&self) -> usize {
        self.index
    }

    pub fn power(&self, e: usize) -> Matrix {
        power(&self.map, e)
    }

    fn morphism(&self, e: usize) -> ModMorphism {
        ModMorphism::new_unchecked(self.space.clone(), self.space.clone(), self.power(e))
    }

    fn kernel_of_power(&self, s: i64) -> Subquotient {
        if s <= 0 {
            self.space.zero_sub()
        } else {
            self.morphism(s as usize).kernel()
        }
    }

    /// The same operator on `sub / below` (both submodules stable under it).
    pub fn on_subquotient(&self, sub: &Subquotient, below: &Subquotient) -> Result<NilpotentOperator> {
        let s = Subquotient::new(sub.gens().clone(), below.gens().clone())?;
        let mut op = NilpotentOperator::new(s, self.map.clone(), self.kind)?;
        op.twist = self.twist.clone();
        Ok(op)
    }
}

/// First failure of the monodromy-filtration axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomFailure {
    /// `N(M_k)` is not inside `M_{k-2}`.
    Shift(i64),
    /// `N^e : gr_{c+e} -> gr_{c-e}` is not an isomorphism.
    Graded(i64),
}

/// Check both defining properties of a monodromy filtration centered at `center`.
pub fn monodromy_axioms(v: &NilpotentOperator, m: &Filtration, center: i64) -> Option<AxiomFailure> {
    let n = v.morphism(1);
    let mut ks = m.breakpoints();
    ks.extend(m.breakpoints().iter().map(|k| k + 2));
    ks.sort_unstable();
    ks.dedup();
    for &k in &ks {
        if !n.image_of(m.value(k)).is_sub(m.value(k - 2)) {
            return Some(AxiomFailure::Shift(k));
        }
    }
    let reach = m.breakpoints().iter().map(|k| (k - center).abs()).max().unwrap_or(0) + 1;
    for e in 1..=reach {
        let src = m.gr(center + e);
        let tgt = m.gr(center - e);
        let ok = ModMorphism::new(src, tgt, v.power(e as usize)).is_ok_and(|f| f.is_isomorphism());
        if !ok {
            return Some(AxiomFailure::Graded(e));
        }
    }
    None
}

/// `M_{c+l} = Σ_j N^j Ker N^{l+2j+1}`, verified before it is returned.
pub fn monodromy_filtration(v: &NilpotentOperator, center: i64) -> Result<Filtration> {
    let nu = v.nilpotency_index() as i64;
    let value = |l: i64| -> Result<Subquotient> {
        let mut acc = v.space.zero_sub();
        for j in 0..=nu.max(0) {
            let k = v.kernel_of_power(l + 2 * j + 1);
            acc = acc.sum(&v.morphism(j as usize).image_of(&k))?;
        }
        Ok(acc)
    };
    let mut steps = Vec::new();
    for l in -nu..=nu {
        steps.push((center + l, value(l)?));
    }
    let m = Filtration::new(v.space.zero_sub(), steps, v.space.clone())?;
    if let Some(fail) = monodromy_axioms(v, &m, center) {
        return Err(Error::NilpotencyVerificationFailed(format!("constructed filtration fails {fail:?}")));
    }
    Ok(m)
}

/// First failure of the relative monodromy conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativeFailure {
    Shift(i64),
    /// `N` does not preserve `W_k`.
    NotPreservingBase(i64),
    /// On `gr^W_k`, `N^e` fails to be an isomorphism between the induced pieces.
    Graded { k: i64, e: i64 },
}

fn check_exhaustive(v: &NilpotentOperator, w: &Filtration) -> Result<()> {
    if !w.floor().is_zero() || w.ceiling() != v.space() {
        return Err(Error::Invalid("base filtration must be separated and exhaustive".into()));
    }
    Ok(())
}

/// The filtration induced by `m` on `gr^W_k`.
fn induced_on_graded(w: &Filtration, m: &Filtration, k: i64) -> Result<(Subquotient, Filtration)> {
    let top = w.value(k);
    let below = w.value(k - 1);
    let gr = Subquotient::new(top.gens().clone(), below.gens().clone())?;
    let lift = |s: &Subquotient| -> Result<Subquotient> {
        let x = s.intersect(top)?.sum(below)?;
        Subquotient::new(x.gens().clone(), below.gens().clone())
    };
    let mut steps = Vec::new();
    for (j, s) in m.steps() {
        steps.push((*j, lift(s)?));
    }
    let f = Filtration::new(lift(m.floor())?, steps, lift(m.ceiling())?)?;
    Ok((gr, f))
}

/// Is `m` the monodromy filtration of `N` relative to `w`?
pub fn verify_relative_monodromy(v: &NilpotentOperator, w: &Filtration, m: &Filtration) -> Result<Option<RelativeFailure>> {
    check_exhaustive(v, w)?;
    let n = v.morphism(1);
    let mut ks = m.breakpoints();
    ks.extend(m.breakpoints().iter().map(|k| k + 2));
    ks.sort_unstable();
    ks.dedup();
    for &k in &ks {
        if !n.image_of(m.value(k)).is_sub(m.value(k - 2)) {
            return Ok(Some(RelativeFailure::Shift(k)));
        }
    }
    for k in w.breakpoints() {
        if !n.image_of(w.value(k)).is_sub(w.value(k)) {
            return Ok(Some(RelativeFailure::NotPreservingBase(k)));
        }
    }
    for k in w.jumps() {
        let (gr, induced) = induced_on_graded(w, m, k)?;
        let op = v.on_subquotient(&gr, &w.value(k - 1).clone())?;
        if let Some(fail) = monodromy_axioms(&op, &induced, k) {
            let e = match fail {
                AxiomFailure::Shift(_) => 0,
                AxiomFailure::Graded(e) => e,
            };
            return Ok(Some(RelativeFailure::Graded { k, e }));
        }
    }
    Ok(None)
}

/// For each jump `k` of `w` and `e >= 1`: is `N^e : gr^M_{k+e} -> gr^M_{k-e}` an
/// isomorphism on `gr^W_k`?
pub fn graded_isomorphisms(v: &NilpotentOperator, w: &Filtration, m: &Filtration) -> Result<Vec<(i64, i64, bool)>> {
    check_exhaustive(v, w)?;
    let mut out = Vec::new();
    for k in w.jumps() {
        let (gr, induced) = induced_on_graded(w, m, k)?;
        let op = v.on_subquotient(&gr, w.value(k - 1))?;
        let reach = induced.breakpoints().iter().map(|j| (j - k).abs()).max().unwrap_or(0) + 1;
        for e in 1..=reach {
            let ok = ModMorphism::new(induced.gr(k + e), induced.gr(k - e), op.power(e as usize))
                .is_ok_and(|f| f.is_isomorphism());
            out.push((k, e, ok));
        }
    }
    Ok(out)
}

/// Limits for the lattice search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Rounds of closure under `+`, `∩`, `N(·)` and `N^{-1}(·)`.
    pub depth: usize,
    /// Largest lattice allowed before giving up.
    pub max_lattice: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { depth: 2, max_lattice: 400 }
    }
}

fn insert(set: &mut Vec<Subquotient>, s: Subquotient) -> bool {
    if set.contains(&s) {
        false
    } else {
        set.push(s);
        true
    }
}

fn lattice(v: &NilpotentOperator, w: &Filtration, budget: SearchBudget) -> Result<Vec<Subquotient>> {
    let mut set = Vec::new();
    insert(&mut set, v.space.zero_sub());
    insert(&mut set, v.space.clone());
    for k in w.jumps() {
        insert(&mut set, w.value(k).clone());
    }
    for i in 1..v.nilpotency_index() {
        insert(&mut set, v.morphism(i).kernel());
        insert(&mut set, v.morphism(i).image());
    }
    let n = v.morphism(1);
    for _ in 0..budget.depth {
        let current = set.clone();
        let mut grew = false;
        for a in &current {
            grew |= insert(&mut set, n.image_of(a));
            grew |= insert(&mut set, n.preimage(a)?);
            for b in &current {
                grew |= insert(&mut set, a.sum(b)?);
                grew |= insert(&mut set, a.intersect(b)?);
            }
            if set.len() > budget.max_lattice {
                return Err(Error::SearchBudgetExceeded(set.len()));
            }
        }
        if !grew {
            break;
        }
    }
    Ok(set)
}

/// Look for the monodromy filtration of `N` relative to `w` among chains of
/// subspaces in the lattice generated by `w` and the kernels and images of the
/// powers of `N`. `Ok(None)` means none was found within the budget.
pub fn relative_monodromy_search(v: &NilpotentOperator, w: &Filtration, budget: SearchBudget) -> Result<Option<Filtration>> {
    check_exhaustive(v, w)?;
    let nu = v.nilpotency_index() as i64;
    let jumps = w.jumps();
    let n = v.morphism(1);
    if jumps.iter().any(|&k| !n.image_of(w.value(k)).is_sub(w.value(k))) {
        return Ok(None);
    }
    // the filtration induced on each gr^W_a is forced
    let mut targets = Vec::new();
    for &a in &jumps {
        let gr = Subquotient::new(w.value(a).gens().clone(), w.value(a - 1).gens().clone())?;
        let op = v.on_subquotient(&gr, w.value(a - 1))?;
        targets.push((a, monodromy_filtration(&op, a)?));
    }
    let (lo, hi) = match (jumps.first(), jumps.last()) {
        (Some(&a), Some(&b)) => (a - nu, b + nu),
        _ => return Ok(Some(Filtration::constant(v.space()))),
    };
    let lat = lattice(v, w, budget)?;
    let matches = |x: &Subquotient, k: i64| -> Result<bool> {
        for (a, mon) in &targets {
            let top = w.value(*a);
            let below = w.value(*a - 1);
            let lifted = x.intersect(top)?.sum(below)?;
            if lifted.gens() != mon.value(k).gens() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for k in lo..=hi {
        let mut c = Vec::new();
        for (i, x) in lat.iter().enumerate() {
            if matches(x, k)? {
                c.push(i);
            }
        }
        if c.is_empty() {
            return Ok(None);
        }
        candidates.push(c);
    }
    // depth-first over monotone chains with N(M_k) ⊆ M_{k-2}
    let mut found: Vec<Filtration> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    let zero = v.space.zero_sub();
    fn dfs(
        pos: usize,
        chain: &mut Vec<usize>,
        candidates: &[Vec<usize>],
        lat: &[Subquotient],
        zero: &Subquotient,
        n: &ModMorphism,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= 2 {
            return;
        }
        if pos == candidates.len() {
            out.push(chain.clone());
            return;
        }
        for &i in &candidates[pos] {
            let x = &lat[i];
            let prev = chain.last().map_or(zero, |&j| &lat[j]);
            if !prev.is_sub(x) {
                continue;
            }
            let two_below = if pos >= 2 { &lat[chain[pos - 2]] } else { zero };
            if !n.image_of(x).is_sub(two_below) {
                continue;
            }
            chain.push(i);
            dfs(pos + 1, chain, candidates, lat, zero, n, out);
            chain.pop();
        }
    }
    let mut raw = Vec::new();
    dfs(0, &mut chain, &candidates, &lat, &zero, &n, &mut raw);
    for ch in raw {
        let steps: Vec<(i64, Subquotient)> = ch.iter().enumerate().map(|(i, &j)| (lo + i as i64, lat[j].clone())).collect();
        let m = Filtration::new(zero.clone(), steps, v.space.clone())?;
        if verify_relative_monodromy(v, w, &m)?.is_none() && !found.contains(&m) {
            found.push(m);
        }
    }
    match found.len() {
        0 => Ok(None),
        1 => Ok(found.pop()),
        _ => Err(Error::NilpotencyVerificationFailed("two distinct relative monodromy filtrations".into())),
    }
}

/// A module with one filtration and a nilpotent endomorphism lowering it by 2.
#[derive(Clone, Debug)]
pub struct FilteredOperator {
    pub module: Subquotient,
    pub filtration: Filtration,
    pub n: Matrix,
}

/// Which hypotheses of the lemma hold, and whether its conclusion does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyLemmaReport {
    pub source_finite: bool,
    pub first_strict: bool,
    pub second_strict: bool,
    pub graded_iso: [bool; 3],
    pub conclusion: bool,
}

impl KeyLemmaReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.source_finite && self.first_strict && self.second_strict && self.graded_iso.iter().all(|&b| b)
    }
}

fn graded_iso_at_zero(x: &FilteredOperator) -> Result<bool> {
    let op = NilpotentOperator::new(x.module.clone(), x.n.clone(), OperatorKind::LogT)?;
    Ok(match monodromy_axioms(&op, &x.filtration, 0) {
        None => true,
        Some(AxiomFailure::Graded(_)) | Some(AxiomFailure::Shift(_)) => false,
    })
}

fn single_strict(src: &FilteredOperator, tgt: &FilteredOperator, m: &Matrix) -> Result<bool> {
    let a = filtration::BifilteredModule::new(src.module.clone(), src.filtration.clone(), None)?;
    let b = filtration::BifilteredModule::new(tgt.module.clone(), tgt.filtration.clone(), None)?;
    filtration::is_strict(&a, &b, m)
}

/// Check the hypotheses and the conclusion of the lemma for
/// `U --f--> V --g--> W` with `g∘f = 0` and compatible nilpotent operators.
pub fn key_lemma_check(u: &FilteredOperator, v: &FilteredOperator, w: &FilteredOperator, f: &Matrix, g: &Matrix) -> Result<KeyLemmaReport> {
    let fm = ModMorphism::new(u.module.clone(), v.module.clone(), f.clone())?;
    let gm = ModMorphism::new(v.module.clone(), w.module.clone(), g.clone())?;
    if !fm.compose(&gm)?.is_zero() {
        return Err(Error::NotAComplex("g∘f != 0".into()));
    }
    let commutes = |a: &FilteredOperator, b: &FilteredOperator, m: &ModMorphism| -> Result<bool> {
        let left = ModMorphism::new_unchecked(a.module.clone(), b.module.clone(), a.n.mul(m.matrix())?);
        let right = ModMorphism::new_unchecked(a.module.clone(), b.module.clone(), m.matrix().mul(&b.n)?);
        Ok(left.equals(&right))
    };
    if !commutes(u, v, &fm)? || !commutes(v, w, &gm)? {
        return Err(Error::NotChainMap("operators do not commute with the maps".into()));
    }
    for x in [u, v, w] {
        let op = ModMorphism::new(x.module.clone(), x.module.clone(), x.n.clone())?;
        for k in x.filtration.breakpoints() {
            if !op.image_of(x.filtration.value(k)).is_sub(x.filtration.value(k - 2)) {
                return Err(Error::NotFiltered(format!("N does not lower the filtration by 2 at {k}")));
            }
        }
    }
    let source_finite = u.filtration.floor().is_zero() && u.filtration.ceiling() == &u.module;
    let first_strict = single_strict(u, v, f)?;
    let second_strict = single_strict(v, w, g)?;
    let graded_iso = [graded_iso_at_zero(u)?, graded_iso_at_zero(v)?, graded_iso_at_zero(w)?];
    // Ker g / Im f with the filtration induced from V
    let ker = gm.kernel();
    let im = fm.image();
    let h = Subquotient::new(ker.gens().clone(), im.gens().clone())?;
    let induced = v.filtration.map_values(|s| {
        let x = s.intersect(&ker)?.sum(&im)?;
        Subquotient::new(x.gens().clone(), im.gens().clone())
    })?;
    let induced = Filtration::new(induced.floor().clone(), induced.steps().to_vec(), h.clone())?;
    let op = NilpotentOperator::new(h, v.n.clone(), OperatorKind::LogT)?;
    let conclusion = monodromy_axioms(&op, &induced, 0).is_none();
    Ok(KeyLemmaReport { source_finite, first_strict, second_strict, graded_iso, conclusion })
}

/// Is `0 -> gr Ker F -> gr V -> gr V' -> gr Coker F -> 0` exact in every degree?
pub fn strict_iff_gr_exact(
    source: &Subquotient,
    source_filtration: &Filtration,
    target: &Subquotient,
    target_filtration: &Filtration,
    map: &Matrix,
) -> Result<bool> {
    let fm = ModMorphism::new(source.clone(), target.clone(), map.clone())?;
    let ker = fm.kernel();
    let im = fm.image();
    let ring = source.ring();
    let mut ks = filtration::with_sentinels(filtration::union_sorted(&[source_filtration.jumps(), target_filtration.jumps()]));
    ks.dedup();
    for k in ks {
        let gr_ker = {
            let a = source_filtration.value(k).intersect(&ker)?;
            let b = source_filtration.value(k - 1).intersect(&ker)?;
            Subquotient::new(a.gens().clone(), b.gens().clone())?
        };
        let gr_v = source_filtration.gr(k);
        let gr_w = target_filtration.gr(k);
        let gr_coker = {
            let a = target_filtration.value(k).sum(&im)?;
            let b = target_filtration.value(k - 1).sum(&im)?;
            Subquotient::new(a.gens().clone(), b.gens().clone())?
        };
        let n = source.ambient();
        let m = target.ambient();
        let terms = alloc::vec![
            Subquotient::zero(ring, 0),
            gr_ker,
            gr_v,
            gr_w,
            gr_coker,
            Subquotient::zero(ring, 0)
        ];
        let diffs = alloc::vec![
            Matrix::zeros(ring, 0, n),
            Matrix::identity(ring, n),
            map.clone(),
            Matrix::identity(ring, m),
            Matrix::zeros(ring, m, 0)
        ];
        let c = Complex::new(ring, 0, terms, diffs)?;
        if !c.is_exact() {
            return Ok(false);
        }
    }
    Ok(true)
}
