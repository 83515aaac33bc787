//! The special flat module `Σ` and the special injective module `∏`, truncated
//! to finitely many indices.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::filtration::{self, BifilteredModule, Filtration, Which};
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::Subquotient;

/// Index of a summand of `Σ`: which filtrations it belongs to, and at which level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartIndex {
    /// The unfiltered summand `E` (in no filtration step).
    Base,
    First(i64),
    Second(i64),
    Both(i64, i64),
}

impl PartIndex {
    fn level_in(&self, which: Which) -> Option<i64> {
        match (self, which) {
            (PartIndex::First(l), Which::First) | (PartIndex::Second(l), Which::Second) => Some(*l),
            (PartIndex::Both(a, _), Which::First) => Some(*a),
            (PartIndex::Both(_, b), Which::Second) => Some(*b),
            _ => None,
        }
    }
}

/// One summand `E^P_l` of a special flat module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatPart {
    pub index: PartIndex,
    pub module: Subquotient,
}

/// Filtration in which summand `i` enters at level `level(i)` (never if `None`).
fn summand_filtration(whole: &Subquotient, offsets: &[(usize, usize)], level: &[Option<i64>]) -> Result<Filtration> {
    let ring = whole.ring();
    let mut idx: Vec<i64> = level.iter().flatten().copied().collect();
    idx.sort_unstable();
    idx.dedup();
    let span_upto = |bound: Option<i64>| -> Result<Subquotient> {
        let mut rows = Matrix::zeros(ring, 0, whole.ambient());
        for (i, lv) in level.iter().enumerate() {
            let inside = match (lv, bound) {
                (Some(l), Some(b)) => *l <= b,
                (Some(_), None) => true,
                (None, _) => false,
            };
            if inside {
                let (off, len) = offsets[i];
                let mut blk = Matrix::zeros(ring, len, whole.ambient());
                blk.paste(0, off, &Matrix::identity(ring, len));
                rows = rows.vstack(&blk);
            }
        }
        Subquotient::spanned(restrict_rows(whole, &rows), whole.rels().clone())
    };
    let mut steps = Vec::new();
    for &k in &idx {
        steps.push((k, span_upto(Some(k))?));
    }
    Filtration::new(whole.zero_sub(), steps, span_upto(None)?)
}

/// The part of `whole`'s generators supported on the coordinate blocks selected by `rows`
/// (unit rows); `whole` is a direct sum so this is a coordinate projection.
fn restrict_rows(whole: &Subquotient, units: &Matrix) -> Matrix {
    let ring = whole.ring();
    let n = whole.ambient();
    let mut mask = alloc::vec![false; n];
    for i in 0..units.rows() {
        for j in 0..n {
            if !units.get(i, j).is_zero() {
                mask[j] = true;
            }
        }
    }
    let g = whole.gens();
    let mut out = Matrix::zeros(ring, g.rows(), n);
    for i in 0..g.rows() {
        for j in 0..n {
            if mask[j] {
                out.set(i, j, g.get(i, j).clone());
            }
        }
    }
    out
}

/// `Σ(E, {E^P})`: the direct sum of `base` and all parts, where a part indexed by
/// `P` at levels `l` enters `Σ^{(i)}_k` (for `i ∈ P`) once `l_i ≤ k`.
pub fn special_flat(ring: Ring, base: &Subquotient, parts: &[FlatPart], two: bool) -> Result<BifilteredModule> {
    if parts.iter().any(|p| p.module.ring() != ring) || base.ring() != ring {
        return Err(Error::RingMismatch(alloc::format!("{ring}"), "part".into()));
    }
    if !two && parts.iter().any(|p| matches!(p.index, PartIndex::Second(_) | PartIndex::Both(..))) {
        return Err(Error::Invalid("second-filtration parts in a singly filtered Σ".into()));
    }
    let mut whole = base.clone();
    let mut offsets = alloc::vec![(0, base.ambient())];
    for p in parts {
        offsets.push((whole.ambient(), p.module.ambient()));
        whole = whole.direct_sum(&p.module);
    }
    let lv = |w: Which| -> Vec<Option<i64>> {
        core::iter::once(None).chain(parts.iter().map(|p| p.index.level_in(w))).collect()
    };
    let p1 = summand_filtration(&whole, &offsets, &lv(Which::First))?;
    let p2 = if two { Some(summand_filtration(&whole, &offsets, &lv(Which::Second))?) } else { None };
    BifilteredModule::new(whole, p1, p2)
}

/// `∏(F, {F^{(i)}_l})`: the direct sum of `base` and the parts; the step
/// `∏^{(i)}_k` contains `base`, every part of the other filtration, and the
/// parts of filtration `i` with level `≤ k`.
pub fn special_injective(
    ring: Ring,
    base: &Subquotient,
    parts: &[(Which, i64, Subquotient)],
    two: bool,
) -> Result<BifilteredModule> {
    if ring == Ring::Integers {
        return Err(Error::UnsupportedRing("Z has no nonzero finitely generated injectives".into()));
    }
    if !two && parts.iter().any(|p| p.0 == Which::Second) {
        return Err(Error::Invalid("second-filtration parts in a singly filtered ∏".into()));
    }
    let mut whole = base.clone();
    let mut offsets = alloc::vec![(0, base.ambient())];
    for (_, _, m) in parts {
        offsets.push((whole.ambient(), m.ambient()));
        whole = whole.direct_sum(m);
    }
    let build = |w: Which| -> Result<Filtration> {
        let mut idx: Vec<i64> = parts.iter().filter(|p| p.0 == w).map(|p| p.1).collect();
        idx.sort_unstable();
        idx.dedup();
        let value = |bound: Option<i64>| -> Result<Subquotient> {
            let mut sel = alloc::vec![(0usize, base.ambient())];
            for (i, (pw, l, _)) in parts.iter().enumerate() {
                let inside = *pw != w || bound.is_none_or(|b| *l <= b);
                if inside {
                    sel.push(offsets[i + 1]);
                }
            }
            let mut units = Matrix::zeros(ring, 0, whole.ambient());
            for (off, len) in sel {
                let mut blk = Matrix::zeros(ring, len, whole.ambient());
                blk.paste(0, off, &Matrix::identity(ring, len));
                units = units.vstack(&blk);
            }
            Subquotient::spanned(restrict_rows(&whole, &units), whole.rels().clone())
        };
        let floor = value(Some(i64::MIN))?;
        let mut steps = Vec::new();
        for &k in &idx {
            steps.push((k, value(Some(k))?));
        }
        Filtration::new(floor, steps, value(None)?)
    };
    let p1 = build(Which::First)?;
    let p2 = if two { Some(build(Which::Second)?) } else { None };
    BifilteredModule::new(whole, p1, p2)
}

/// A free cover of a filtered module by a special flat module with free parts:
/// returns the cover and the matrix sending its basis onto generators.
///
/// Generators are chosen greedily: a part at some level only receives the
/// generators not already reached by the parts lying in the same filtration step.
pub fn free_cover(v: &BifilteredModule) -> Result<(BifilteredModule, Matrix)> {
    let ring = v.module().ring();
    let two = v.is_bifiltered();
    let p1 = v.p1();
    if !p1.floor().is_zero() || v.p2().is_some_and(|p| !p.floor().is_zero()) {
        return Err(Error::NotSeparated);
    }
    let j1 = p1.jumps();
    let j2 = v.p2().map(|p| p.jumps()).unwrap_or_default();
    let mut parts: Vec<(PartIndex, Vec<Vec<crate::ring::Scalar>>)> = Vec::new();
    let greedy = |target: &Subquotient, covered: Subquotient| -> Vec<Vec<crate::ring::Scalar>> {
        let mut cov = covered;
        let mut chosen = Vec::new();
        for i in 0..target.gens().rows() {
            let row = target.gens().row(i);
            if !cov.contains(row) {
                chosen.push(row.to_vec());
                cov = Subquotient::spanned(cov.gens().vstack(&Matrix::from_row_vec(ring, row.to_vec())), cov.rels().clone())
                    .expect("same module");
            }
        }
        chosen
    };
    if two {
        let p2 = v.p2().unwrap();
        for &a in &j1 {
            for &b in &j2 {
                let t = v.intersect_steps(a, b);
                let c = v.intersect_steps(a - 1, b).sum(&v.intersect_steps(a, b - 1))?;
                parts.push((PartIndex::Both(a, b), greedy(&t, c)));
            }
        }
        for &a in &j1 {
            let t = p1.value(a).clone();
            let c = p1.value(a - 1).sum(&p1.value(a).intersect(p2.ceiling())?)?;
            parts.push((PartIndex::First(a), greedy(&t, c)));
        }
        for &b in &j2 {
            let t = p2.value(b).clone();
            let c = p2.value(b - 1).sum(&p2.value(b).intersect(p1.ceiling())?)?;
            parts.push((PartIndex::Second(b), greedy(&t, c)));
        }
        let c = p1.ceiling().sum(p2.ceiling())?;
        parts.push((PartIndex::Base, greedy(v.module(), c)));
    } else {
        for &a in &j1 {
            parts.push((PartIndex::First(a), greedy(p1.value(a), p1.value(a - 1).clone())));
        }
        parts.push((PartIndex::Base, greedy(v.module(), p1.ceiling().clone())));
    }
    let mut base_rows = Vec::new();
    let mut flat_parts = Vec::new();
    let mut images: Vec<Vec<crate::ring::Scalar>> = Vec::new();
    for (idx, rows) in parts {
        if rows.is_empty() {
            continue;
        }
        if idx == PartIndex::Base {
            base_rows = rows;
            continue;
        }
        flat_parts.push(FlatPart { index: idx, module: Subquotient::free(ring, rows.len()) });
        images.extend(rows);
    }
    let base = Subquotient::free(ring, base_rows.len());
    let mut all = base_rows;
    all.extend(images);
    let sigma = special_flat(ring, &base, &flat_parts, two)?;
    let map = Matrix::from_rows(ring, v.module().ambient(), all)?;
    Ok((sigma, map))
}

/// Whether a filtered module is special flat with free parts, up to the
/// recognition used here: free module whose steps are spanned by unit vectors.
pub fn is_free_special(m: &BifilteredModule) -> bool {
    let n = m.module().ambient();
    if *m.module() != Subquotient::free(m.module().ring(), n) {
        return false;
    }
    let (j1, j2) = m.jumps();
    let unit_spanned = |s: &Subquotient| {
        let g = s.gens();
        (0..g.rows()).all(|i| g.row(i).iter().filter(|x| !x.is_zero()).count() == 1)
    };
    j1.iter().all(|&k| unit_spanned(m.p1().value(k)))
        && m.p2().is_none_or(|p| j2.iter().all(|&k| unit_spanned(p.value(k))))
        && filtration::levels(&j1, &j2, m.is_bifiltered()).iter().all(|&l| unit_spanned(&m.step(l)))
}
