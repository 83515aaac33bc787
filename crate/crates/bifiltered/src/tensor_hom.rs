//! Filtered tensor products and Hom complexes.
//!
//! Both constructions work in generator coordinates: a subquotient with `g`
//! generator rows is viewed as `R^g / K`, so tensor and Hom modules become
//! subquotients of `R^(g*h)` with Kronecker-product relations.

use alloc::vec::Vec;

use crate::complex::BifilteredComplex;
use crate::error::{Error, Result};
use crate::filtration::{BifilteredModule, Filtration, Which};
use crate::linalg;
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::{Coordinates, Subquotient};

fn kron_free(a: &Matrix, b: &Matrix) -> Matrix {
    a.kron(b)
}

/// `R^g/K_E ⊗ R^h/K_F = R^(gh) / (K_E⊗R^h + R^g⊗K_F)`.
fn tensor_module(ce: &Coordinates, cf: &Coordinates) -> Subquotient {
    let ring = ce.module.ring();
    let (g, h) = (ce.rank(), cf.rank());
    let ke = ce.free_form.rels();
    let kf = cf.free_form.rels();
    let rels = kron_free(ke, &Matrix::identity(ring, h)).vstack(&kron_free(&Matrix::identity(ring, g), kf));
    Subquotient::free_quotient(rels)
}

/// Image of `A ⊗ B` for submodules given in coordinates.
fn tensor_sub(module: &Subquotient, a: &Matrix, b: &Matrix) -> Subquotient {
    Subquotient::spanned(kron_free(a, b), module.rels().clone()).expect("inside the tensor module")
}

fn filtration_of(m: &BifilteredModule, which: Which) -> Filtration {
    m.filtration(which).cloned().unwrap_or_else(|| Filtration::trivial(m.module(), 0))
}

fn span_or(j: &[i64]) -> (i64, i64) {
    (*j.first().unwrap_or(&0), *j.last().unwrap_or(&0))
}

/// The image filtration `P_k = Σ_{l+m=k} Im(P_l E ⊗ P_m F)` on `E ⊗ F`.
fn tensor_filtration(
    module: &Subquotient,
    ce: &Coordinates,
    cf: &Coordinates,
    pe: &Filtration,
    pf: &Filtration,
) -> Result<Filtration> {
    let je = pe.jumps();
    let jf = pf.jumps();
    let (e0, e1) = span_or(&je);
    let (f0, f1) = span_or(&jf);
    let coords = |c: &Coordinates, s: &Subquotient| c.sub_coords(s);
    let floor_e = coords(ce, pe.floor())?;
    let ceil_f = coords(cf, pf.ceiling())?;
    let base = tensor_sub(module, &floor_e, &ceil_f);
    let mut e_steps = Vec::new();
    for &l in &je {
        e_steps.push((l, coords(ce, pe.value(l))?));
    }
    Filtration::from_fn(e0 + f0 - 1, e1 + f1, |k| {
        let mut acc = base.clone();
        for (l, a) in &e_steps {
            let b = coords(cf, pf.value(k - l))?;
            let b = &b;
            acc = acc.sum(&tensor_sub(module, a, b))?;
        }
        Ok(acc)
    })
}

/// Filtered tensor product of two filtered modules.
pub fn tensor_modules(e: &BifilteredModule, f: &BifilteredModule) -> Result<BifilteredModule> {
    let ce = e.module().coordinates();
    let cf = f.module().coordinates();
    let module = tensor_module(&ce, &cf);
    let p1 = tensor_filtration(&module, &ce, &cf, &filtration_of(e, Which::First), &filtration_of(f, Which::First))?;
    let p2 = if e.is_bifiltered() && f.is_bifiltered() {
        Some(tensor_filtration(
            &module,
            &ce,
            &cf,
            &filtration_of(e, Which::Second),
            &filtration_of(f, Which::Second),
        )?)
    } else {
        None
    };
    BifilteredModule::new(module, p1, p2)
}

/// Total complex of the termwise filtered tensor product, with
/// `d(x ⊗ y) = dx ⊗ y + (-1)^p x ⊗ dy` for `x` of degree `p`.
pub fn tensor_filtered(e: &BifilteredComplex, f: &BifilteredComplex) -> Result<BifilteredComplex> {
    if e.ring() != f.ring() {
        return Err(Error::RingMismatch(alloc::format!("{}", e.ring()), alloc::format!("{}", f.ring())));
    }
    let ring = e.ring();
    let ec: Vec<Coordinates> = e.terms().iter().map(|t| t.module().coordinates()).collect();
    let fc: Vec<Coordinates> = f.terms().iter().map(|t| t.module().coordinates()).collect();
    let ed: Vec<Matrix> = (0..e.diffs().len()).map(|i| ec[i].morphism_coords(&e.diffs()[i], &ec[i + 1])).collect::<Result<_>>()?;
    let fd: Vec<Matrix> = (0..f.diffs().len()).map(|i| fc[i].morphism_coords(&f.diffs()[i], &fc[i + 1])).collect::<Result<_>>()?;
    let mut pieces = Vec::new();
    for (i, et) in e.terms().iter().enumerate() {
        for (j, ft) in f.terms().iter().enumerate() {
            pieces.push((i, j, tensor_modules(et, ft)?));
        }
    }
    let lo = e.lo() + f.lo();
    let hi = e.hi() + f.hi();
    let mut terms = Vec::new();
    let mut layout: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    for n in lo..=hi {
        let mut m = BifilteredModule::zero(ring, e.is_bifiltered() && f.is_bifiltered());
        let mut lay = Vec::new();
        let mut off = 0;
        for (i, j, t) in &pieces {
            if e.lo() + *i as i64 + f.lo() + *j as i64 == n {
                lay.push((*i, *j, off));
                off += t.module().ambient();
                m = m.direct_sum(t);
            }
        }
        terms.push(m);
        layout.push(lay);
    }
    let mut diffs = Vec::new();
    for idx in 0..terms.len().saturating_sub(1) {
        let mut d = Matrix::zeros(ring, terms[idx].module().ambient(), terms[idx + 1].module().ambient());
        let find = |i: usize, j: usize| layout[idx + 1].iter().find(|(a, b, _)| *a == i && *b == j).map(|x| x.2);
        for &(i, j, off) in &layout[idx] {
            let p = e.lo() + i as i64;
            if i + 1 < e.terms().len() {
                let blk = ed[i].kron(&Matrix::identity(ring, fc[j].rank()));
                d.paste(off, find(i + 1, j).unwrap(), &blk);
            }
            if j + 1 < f.terms().len() {
                let sign = if p.rem_euclid(2) == 1 { ring.from_int(-1) } else { ring.one() };
                let blk = Matrix::identity(ring, ec[i].rank()).kron(&fd[j]).scale(&sign);
                d.paste(off, find(i, j + 1).unwrap(), &blk);
            }
        }
        diffs.push(d);
    }
    Ok(BifilteredComplex::new_unchecked(ring, lo, terms, diffs))
}

/// `{M in R^(g x h) : A M ⊆ B rowwise}` where `A` has `a` rows.
fn maps_into(ring: Ring, a: &Matrix, b: &Matrix, h: usize) -> Matrix {
    let phi = a.transpose().kron(&Matrix::identity(ring, h));
    let mut target = Matrix::zeros(ring, 0, a.rows() * h);
    for i in 0..a.rows() {
        let mut blk = Matrix::zeros(ring, b.rows(), a.rows() * h);
        blk.paste(0, i * h, b);
        target = target.vstack(&blk);
    }
    linalg::preimage_space(&phi, &target)
}

/// The module `Hom(E, F)` as a subquotient of `R^(g*h)` (row-major matrices in
/// generator coordinates), together with the coordinate data used to build it.
pub struct HomModule {
    pub module: Subquotient,
    pub source: Coordinates,
    pub target: Coordinates,
}

impl HomModule {
    pub fn new(e: &Subquotient, f: &Subquotient) -> HomModule {
        let ce = e.coordinates();
        let cf = f.coordinates();
        let ring = e.ring();
        let (g, h) = (ce.rank(), cf.rank());
        let ke = ce.free_form.rels().clone();
        let kf = cf.free_form.rels().clone();
        let gens = maps_into(ring, &ke, &kf, h);
        let rels = Matrix::identity(ring, g).kron(&kf);
        let module = Subquotient::spanned(gens, rels).expect("relations are maps");
        HomModule { module, source: ce, target: cf }
    }

    /// Maps sending `sub_e` into `sub_f`.
    pub fn preserving(&self, sub_e: &Subquotient, sub_f: &Subquotient) -> Result<Subquotient> {
        let ring = self.module.ring();
        let a = self.source.sub_coords(sub_e)?;
        let b = self.target.sub_coords(sub_f)?.vstack(self.target.free_form.rels());
        let m = maps_into(ring, &a, &b, self.target.rank());
        let s = Subquotient::spanned(m, self.module.rels().clone())?;
        s.intersect(&self.module)
    }
}

/// The filtration `Hom_k = {f : f(E_l) ⊆ F_{l+k} for all l}`.
fn hom_filtration(h: &HomModule, pe: &Filtration, pf: &Filtration) -> Result<Filtration> {
    let je = pe.jumps();
    let jf = pf.jumps();
    let (e0, e1) = span_or(&je);
    let (f0, f1) = span_or(&jf);
    let base = h.preserving(pe.floor(), pf.floor())?;
    Filtration::from_fn(f0 - e1 - 1, f1 - e0, |k| {
        let mut acc = base.clone();
        for &l in &je {
            acc = acc.intersect(&h.preserving(pe.value(l), pf.value(l + k))?)?;
        }
        Ok(acc)
    })
}

/// The filtered module of morphisms between two filtered modules.
pub fn hom_modules(e: &BifilteredModule, f: &BifilteredModule) -> Result<(HomModule, BifilteredModule)> {
    let h = HomModule::new(e.module(), f.module());
    let p1 = hom_filtration(&h, &filtration_of(e, Which::First), &filtration_of(f, Which::First))?;
    let p2 = if e.is_bifiltered() && f.is_bifiltered() {
        Some(hom_filtration(&h, &filtration_of(e, Which::Second), &filtration_of(f, Which::Second))?)
    } else {
        None
    };
    let m = BifilteredModule::new(h.module.clone(), p1, p2)?;
    Ok((h, m))
}

/// Hom complex: `Hom^m = ⊕_q Hom(E^q, F^{q+m})` with
/// `(df)_q = f_q d_F + (-1)^{m+1} d_E f_{q+1}`.
pub fn hom_complex(e: &BifilteredComplex, f: &BifilteredComplex) -> Result<BifilteredComplex> {
    if e.ring() != f.ring() {
        return Err(Error::RingMismatch(alloc::format!("{}", e.ring()), alloc::format!("{}", f.ring())));
    }
    let ring = e.ring();
    let two = e.is_bifiltered() && f.is_bifiltered();
    let lo = f.lo() - e.hi();
    let hi = f.hi() - e.lo();
    let ec: Vec<Coordinates> = e.terms().iter().map(|t| t.module().coordinates()).collect();
    let fc: Vec<Coordinates> = f.terms().iter().map(|t| t.module().coordinates()).collect();
    let ed: Vec<Matrix> = (0..e.diffs().len()).map(|i| ec[i].morphism_coords(&e.diffs()[i], &ec[i + 1])).collect::<Result<_>>()?;
    let fd: Vec<Matrix> = (0..f.diffs().len()).map(|i| fc[i].morphism_coords(&f.diffs()[i], &fc[i + 1])).collect::<Result<_>>()?;
    let ne = e.terms().len();
    let nf = f.terms().len();
    let mut terms = Vec::new();
    let mut layout: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    for m in lo..=hi {
        let mut t = BifilteredModule::zero(ring, two);
        let mut lay = Vec::new();
        let mut off = 0;
        for i in 0..ne {
            let q = e.lo() + i as i64;
            let j = q + m - f.lo();
            if j < 0 || j as usize >= nf {
                continue;
            }
            let j = j as usize;
            let (_, hm) = hom_modules(&e.terms()[i], &f.terms()[j])?;
            lay.push((i, j, off));
            off += hm.module().ambient();
            t = t.direct_sum(&hm);
        }
        terms.push(t);
        layout.push(lay);
    }
    let mut diffs = Vec::new();
    for idx in 0..terms.len().saturating_sub(1) {
        let m = lo + idx as i64;
        let sign = if (m + 1).rem_euclid(2) == 1 { ring.from_int(-1) } else { ring.one() };
        let mut d = Matrix::zeros(ring, terms[idx].module().ambient(), terms[idx + 1].module().ambient());
        let find = |i: usize| layout[idx + 1].iter().find(|(a, _, _)| *a == i).map(|x| (x.1, x.2));
        for &(i, j, off) in &layout[idx] {
            // f_q ↦ f_q d_F lands in the component with the same source index q
            if j + 1 < nf {
                if let Some((_, toff)) = find(i) {
                    let blk = Matrix::identity(ring, ec[i].rank()).kron(&fd[j]);
                    d.paste(off, toff, &blk);
                }
            }
            // f_{q} (as the (q-1)-th component's neighbour) ↦ ± d_E f_q lands at source index q-1
            if i >= 1 {
                if let Some((_, toff)) = find(i - 1) {
                    let blk = ed[i - 1].transpose().kron(&Matrix::identity(ring, fc[j].rank())).scale(&sign);
                    d.paste(off, toff, &blk);
                }
            }
        }
        diffs.push(d);
    }
    Ok(BifilteredComplex::new_unchecked(ring, lo, terms, diffs))
}
