//! Finite increasing filtrations and modules carrying one or two of them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::subquotient::{ModMorphism, Subquotient};

/// An increasing filtration stored by its jumps.
///
/// `value(k)` is `floor` for `k` below the first step, the latest step at or
/// below `k` inside the step range, and `ceiling` above the last step. The
/// stored form is normalized: every step differs from its predecessor and the
/// last step equals the ceiling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filtration {
    floor: Subquotient,
    steps: Vec<(i64, Subquotient)>,
    ceiling: Subquotient,
}

impl Filtration {
    pub fn new(floor: Subquotient, steps: Vec<(i64, Subquotient)>, ceiling: Subquotient) -> Result<Filtration> {
        let same = |a: &Subquotient| {
            a.ring() == floor.ring() && a.ambient() == floor.ambient() && a.rels() == floor.rels()
        };
        let mut prev = &floor;
        let mut last_index: Option<i64> = None;
        for (k, v) in &steps {
            if !same(v) {
                return Err(Error::AmbientMismatch(format!("filtration step {k} lives in another module")));
            }
            if let Some(l) = last_index {
                if *k <= l {
                    return Err(Error::FiltrationNotMonotone(*k));
                }
            }
            if !prev.is_sub(v) {
                return Err(Error::FiltrationNotMonotone(*k));
            }
            prev = v;
            last_index = Some(*k);
        }
        if !same(&ceiling) {
            return Err(Error::AmbientMismatch("filtration ceiling lives in another module".into()));
        }
        if !prev.is_sub(&ceiling) {
            return Err(Error::FiltrationNotMonotone(last_index.map_or(0, |l| l + 1)));
        }
        Ok(Filtration::normalized(floor, steps, ceiling))
    }

    fn normalized(floor: Subquotient, steps: Vec<(i64, Subquotient)>, ceiling: Subquotient) -> Filtration {
        let mut out: Vec<(i64, Subquotient)> = Vec::new();
        let past_end = steps.last().map_or(0, |(k, _)| k + 1);
        for (k, v) in steps {
            let prev = out.last().map(|(_, p)| p).unwrap_or(&floor);
            if *prev != v {
                out.push((k, v));
            }
        }
        let top = out.last().map(|(_, p)| p).unwrap_or(&floor);
        if *top != ceiling {
            out.push((past_end, ceiling.clone()));
        }
        Filtration { floor, steps: out, ceiling }
    }

    /// `0` below `at`, the whole module from `at` on.
    pub fn trivial(module: &Subquotient, at: i64) -> Filtration {
        Filtration::normalized(module.zero_sub(), alloc::vec![(at, module.clone())], module.clone())
    }

    /// The constant filtration (every step is the module).
    pub fn constant(module: &Subquotient) -> Filtration {
        Filtration::normalized(module.clone(), Vec::new(), module.clone())
    }

    /// Separated chain: zero floor, whole module as ceiling.
    pub fn chain(module: &Subquotient, steps: Vec<(i64, Subquotient)>) -> Result<Filtration> {
        Filtration::new(module.zero_sub(), steps, module.clone())
    }

    /// Evaluate `f` on `lo..=hi`; values outside are taken to be the end values.
    pub fn from_fn(lo: i64, hi: i64, mut f: impl FnMut(i64) -> Result<Subquotient>) -> Result<Filtration> {
        let floor = f(lo)?;
        let mut steps = Vec::new();
        for k in lo + 1..=hi {
            steps.push((k, f(k)?));
        }
        let ceiling = steps.last().map(|(_, v)| v.clone()).unwrap_or_else(|| floor.clone());
        Filtration::new(floor, steps, ceiling)
    }

    pub fn floor(&self) -> &Subquotient {
        &self.floor
    }

    pub fn ceiling(&self) -> &Subquotient {
        &self.ceiling
    }

    pub fn steps(&self) -> &[(i64, Subquotient)] {
        &self.steps
    }

    pub fn value(&self, k: i64) -> &Subquotient {
        match self.steps.binary_search_by(|(i, _)| i.cmp(&k)) {
            Ok(pos) => &self.steps[pos].1,
            Err(0) => &self.floor,
            Err(pos) if pos == self.steps.len() => &self.ceiling,
            Err(pos) => &self.steps[pos - 1].1,
        }
    }

    /// Indices where the filtration jumps.
    pub fn jumps(&self) -> Vec<i64> {
        self.steps.iter().map(|(k, _)| *k).collect()
    }

    /// Step indices plus one sentinel below and above.
    pub fn breakpoints(&self) -> Vec<i64> {
        let j = self.jumps();
        match (j.first(), j.last()) {
            (Some(&a), Some(&b)) => {
                let mut out = alloc::vec![a - 1];
                out.extend(j.iter().copied());
                out.push(b + 1);
                out
            }
            _ => alloc::vec![0],
        }
    }

    /// `P<l>_k = P_{l+k}`.
    pub fn shift(&self, l: i64) -> Filtration {
        Filtration {
            floor: self.floor.clone(),
            steps: self.steps.iter().map(|(k, v)| (k - l, v.clone())).collect(),
            ceiling: self.ceiling.clone(),
        }
    }

    /// Zero floor and ceiling equal to `module`.
    pub fn is_biregular(&self, module: &Subquotient) -> bool {
        self.floor.is_zero() && self.ceiling == *module
    }

    /// Termwise direct sum.
    pub fn direct_sum(&self, other: &Filtration) -> Filtration {
        let idx = union_sorted(&[self.jumps(), other.jumps()]);
        let steps = idx.iter().map(|&k| (k, self.value(k).direct_sum(other.value(k)))).collect();
        Filtration::normalized(
            self.floor.direct_sum(&other.floor),
            steps,
            self.ceiling.direct_sum(&other.ceiling),
        )
    }

    /// Apply a value transformation that preserves inclusions.
    pub fn map_values(&self, mut f: impl FnMut(&Subquotient) -> Result<Subquotient>) -> Result<Filtration> {
        let floor = f(&self.floor)?;
        let mut steps = Vec::new();
        for (k, v) in &self.steps {
            steps.push((*k, f(v)?));
        }
        let ceiling = f(&self.ceiling)?;
        Filtration::new(floor, steps, ceiling)
    }

    /// Induced filtration on a submodule `sub` (intersections).
    pub fn restrict_to(&self, sub: &Subquotient) -> Result<Filtration> {
        self.map_values(|v| v.intersect(sub))
    }

    /// Single graded piece `P_k / P_{k-1}`.
    pub fn gr(&self, k: i64) -> Subquotient {
        self.value(k).quotient(self.value(k - 1)).expect("monotone")
    }
}

pub(crate) fn union_sorted(lists: &[Vec<i64>]) -> Vec<i64> {
    let set: BTreeSet<i64> = lists.iter().flatten().copied().collect();
    set.into_iter().collect()
}

/// Breakpoints of a union of index sets with one sentinel on each side.
pub(crate) fn with_sentinels(idx: Vec<i64>) -> Vec<i64> {
    match (idx.first(), idx.last()) {
        (Some(&a), Some(&b)) => {
            let mut out = alloc::vec![a - 1];
            out.extend(idx.iter().copied());
            out.push(b + 1);
            out
        }
        _ => alloc::vec![0],
    }
}

/// Which filtration step (or intersection of steps) to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    First(i64),
    Second(i64),
    Both(i64, i64),
}

/// Selector for one of the two filtrations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    First,
    Second,
}

/// A module with one filtration, or two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BifilteredModule {
    module: Subquotient,
    p1: Filtration,
    p2: Option<Filtration>,
}

impl BifilteredModule {
    pub fn new(module: Subquotient, p1: Filtration, p2: Option<Filtration>) -> Result<BifilteredModule> {
        for p in core::iter::once(&p1).chain(p2.iter()) {
            if !p.ceiling().is_sub(&module) {
                return Err(Error::NotContained("filtration ceiling outside module".into()));
            }
        }
        Ok(BifilteredModule { module, p1, p2 })
    }

    /// Both filtrations trivial, jumping at 0.
    pub fn trivial(module: Subquotient, two: bool) -> BifilteredModule {
        let p = Filtration::trivial(&module, 0);
        BifilteredModule { p2: two.then(|| p.clone()), p1: p, module }
    }

    pub fn zero(ring: crate::ring::Ring, two: bool) -> BifilteredModule {
        BifilteredModule::trivial(Subquotient::zero(ring, 0), two)
    }

    pub fn module(&self) -> &Subquotient {
        &self.module
    }

    pub fn p1(&self) -> &Filtration {
        &self.p1
    }

    pub fn p2(&self) -> Option<&Filtration> {
        self.p2.as_ref()
    }

    pub fn filtration(&self, which: Which) -> Option<&Filtration> {
        match which {
            Which::First => Some(&self.p1),
            Which::Second => self.p2.as_ref(),
        }
    }

    pub fn is_bifiltered(&self) -> bool {
        self.p2.is_some()
    }

    /// `P1_{k1} ∩ P2_{k2}` (just `P1_{k1}` when there is one filtration).
    pub fn intersect_steps(&self, k1: i64, k2: i64) -> Subquotient {
        match &self.p2 {
            None => self.p1.value(k1).clone(),
            Some(p2) => self.p1.value(k1).intersect(p2.value(k2)).expect("same module"),
        }
    }

    pub fn step(&self, level: Level) -> Subquotient {
        match level {
            Level::First(k) => self.p1.value(k).clone(),
            Level::Second(k) => match &self.p2 {
                Some(p2) => p2.value(k).clone(),
                None => self.module.clone(),
            },
            Level::Both(a, b) => self.intersect_steps(a, b),
        }
    }

    /// `E_{k1,k2} / (E_{k1-1,k2} + E_{k1,k2-1})`.
    pub fn gr(&self, k1: i64, k2: i64) -> Subquotient {
        if self.p2.is_none() {
            return self.p1.gr(k1);
        }
        let top = self.intersect_steps(k1, k2);
        let below = self.intersect_steps(k1 - 1, k2).sum(&self.intersect_steps(k1, k2 - 1)).expect("same module");
        top.quotient(&below).expect("graded pieces are nested")
    }

    pub fn gr_single(&self, which: Which, k: i64) -> Subquotient {
        match self.filtration(which) {
            Some(p) => p.gr(k),
            None => self.module.clone(),
        }
    }

    pub fn shift(&self, l1: i64, l2: i64) -> BifilteredModule {
        BifilteredModule {
            module: self.module.clone(),
            p1: self.p1.shift(l1),
            p2: self.p2.as_ref().map(|p| p.shift(l2)),
        }
    }

    pub fn direct_sum(&self, other: &BifilteredModule) -> BifilteredModule {
        BifilteredModule {
            module: self.module.direct_sum(&other.module),
            p1: self.p1.direct_sum(&other.p1),
            p2: match (&self.p2, &other.p2) {
                (Some(a), Some(b)) => Some(a.direct_sum(b)),
                _ => None,
            },
        }
    }

    pub fn is_biregular(&self) -> bool {
        self.p1.is_biregular(&self.module) && self.p2.as_ref().is_none_or(|p| p.is_biregular(&self.module))
    }

    pub fn breakpoints(&self) -> (Vec<i64>, Vec<i64>) {
        (self.p1.breakpoints(), self.p2.as_ref().map(|p| p.breakpoints()).unwrap_or_default())
    }

    pub fn jumps(&self) -> (Vec<i64>, Vec<i64>) {
        (self.p1.jumps(), self.p2.as_ref().map(|p| p.jumps()).unwrap_or_default())
    }
}

/// Every level at which the strictness and exactness conditions have to be tested.
pub fn levels(bp1: &[i64], bp2: &[i64], two: bool) -> Vec<Level> {
    let mut out: Vec<Level> = bp1.iter().map(|&k| Level::First(k)).collect();
    if two {
        out.extend(bp2.iter().map(|&k| Level::Second(k)));
        for &a in bp1 {
            for &b in bp2 {
                out.push(Level::Both(a, b));
            }
        }
    }
    out
}

/// Strictness of a filtered map at one degree.
///
/// Returns the first level where `Im(f) ∩ F_level != f(E_level)`.
pub fn strictness_failure(source: &BifilteredModule, target: &BifilteredModule, matrix: &Matrix) -> Result<Option<Level>> {
    let f = ModMorphism::new(source.module.clone(), target.module.clone(), matrix.clone())?;
    let (s1, s2) = source.jumps();
    let (t1, t2) = target.jumps();
    let bp1 = with_sentinels(union_sorted(&[s1, t1]));
    let bp2 = with_sentinels(union_sorted(&[s2, t2]));
    let two = source.is_bifiltered() && target.is_bifiltered();
    let img = f.image();
    for lvl in levels(&bp1, &bp2, two) {
        let src = source.step(lvl);
        let tgt = target.step(lvl);
        let mapped = f.image_of(&src);
        if !mapped.is_sub(&tgt) {
            return Err(Error::NotFiltered(format!("{lvl:?}")));
        }
        if img.intersect(&tgt)? != mapped {
            return Ok(Some(lvl));
        }
    }
    Ok(None)
}

/// Whether `f` is strict (all single and intersection levels).
pub fn is_strict(source: &BifilteredModule, target: &BifilteredModule, matrix: &Matrix) -> Result<bool> {
    Ok(strictness_failure(source, target, matrix)?.is_none())
}

/// Strictness with respect to one of the filtrations only.
pub fn is_strict_single(
    source: &BifilteredModule,
    target: &BifilteredModule,
    matrix: &Matrix,
    which: Which,
) -> Result<bool> {
    let pick = |m: &BifilteredModule| -> BifilteredModule {
        let p = m.filtration(which).cloned().unwrap_or_else(|| Filtration::trivial(&m.module, 0));
        BifilteredModule { module: m.module.clone(), p1: p, p2: None }
    };
    is_strict(&pick(source), &pick(target), matrix)
}

/// Forget the second filtration, or promote the selected filtration to first place.
pub fn single(m: &BifilteredModule, which: Which) -> BifilteredModule {
    let p = m.filtration(which).cloned().unwrap_or_else(|| Filtration::trivial(&m.module, 0));
    BifilteredModule { module: m.module.clone(), p1: p, p2: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    #[test]
    fn value_semantics() {
        let r = Ring::zmod(2, 2).unwrap();
        let m = Subquotient::free(r, 1);
        let n = m.submodule(&Matrix::from_i64(r, 1, &[&[2]])).unwrap();
        let p = Filtration::chain(&m, alloc::vec![(0, n.clone())]).unwrap();
        assert!(p.value(-1).is_zero());
        assert_eq!(p.value(0), &n);
        assert_eq!(p.value(1), &m);
        assert_eq!(p.jumps(), alloc::vec![0, 1]);
        assert_eq!(p.shift(-2).value(2), &n);
    }

    #[test]
    fn non_monotone_is_rejected() {
        let r = Ring::fp(2).unwrap();
        let m = Subquotient::free(r, 2);
        let a = m.submodule(&Matrix::from_i64(r, 2, &[&[1, 0]])).unwrap();
        let b = m.submodule(&Matrix::from_i64(r, 2, &[&[0, 1]])).unwrap();
        let e = Filtration::chain(&m, alloc::vec![(0, a), (1, b)]);
        assert_eq!(e, Err(Error::FiltrationNotMonotone(1)));
    }
}
