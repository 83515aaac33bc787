//! Depth-truncated resolutions by special flat modules with free parts, and the
//! derived filtered tensor product built on them.

use alloc::vec::Vec;

use crate::complex::{BifilteredComplex, FilteredMorphism};
use crate::error::{Error, Result};
use crate::filtration::BifilteredModule;
use crate::matrix::Matrix;
use crate::ring::Scalar;
use crate::special::free_cover;
use crate::subquotient::{ModMorphism, Subquotient};
use crate::tensor_hom::tensor_filtered;

/// A resolution `aug: Q -> C` valid in degrees strictly above `horizon`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: BifilteredComplex,
    pub aug: FilteredMorphism,
    pub horizon: i64,
}

impl Resolution {
    pub fn check_degree(&self, q: i64) -> Result<()> {
        if q <= self.horizon {
            return Err(Error::DepthTooSmall { requested: q, horizon: self.horizon });
        }
        Ok(())
    }
}

/// One degree of the resolution under construction: a special flat module on a
/// basis, the differential rows (into the next degree's basis) and augmentation rows.
struct Stage {
    module: BifilteredModule,
    d: Vec<Vec<Scalar>>,
    aug: Vec<Vec<Scalar>>,
}

fn pad(v: &mut Vec<Scalar>, n: usize) {
    v.resize(n, Scalar::default());
}

/// Resolve `c` by free special flat modules in degrees `[hi - depth, hi]`.
///
/// Works one degree at a time from the top, killing the cocycles of the cone of
/// the augmentation at every filtration level by a free cover.
pub fn specially_flat_resolution(c: &BifilteredComplex, depth: usize) -> Result<Resolution> {
    let ring = c.ring();
    let two = c.is_bifiltered();
    for t in c.terms() {
        if !t.p1().floor().is_zero() || t.p2().is_some_and(|p| !p.floor().is_zero()) {
            return Err(Error::NotSeparated);
        }
    }
    let top = c.hi();
    let bottom = top - depth as i64;
    // stages[i] is degree top - i
    let mut stages: Vec<Stage> = Vec::new();
    for step in 0..=depth {
        let q = top - step as i64;
        let e_q = c.term(q);
        // cone term Q^{q+1} ⊕ C^q and its cocycles
        let (up_mod, up_d, up_aug) = match step {
            0 => (BifilteredModule::zero(ring, two), Matrix::zeros(ring, 0, 0), Matrix::zeros(ring, 0, c.term(q + 1).module().ambient())),
            _ => {
                let up = &stages[step - 1];
                let n_up = up.module.module().ambient();
                let n_upup = if step >= 2 { stages[step - 2].module.module().ambient() } else { 0 };
                let mut d = Vec::new();
                for r in &up.d {
                    let mut r = r.clone();
                    pad(&mut r, n_upup);
                    d.push(r);
                }
                let dm = Matrix::from_rows(ring, n_upup, d)?;
                let am = Matrix::from_rows(ring, c.term(q + 1).module().ambient(), up.aug.clone())?;
                debug_assert_eq!(dm.rows(), n_up);
                (up.module.clone(), dm, am)
            }
        };
        let cone_term = up_mod.direct_sum(&e_q);
        let n_up = up_mod.module().ambient();
        let n_e = e_q.module().ambient();
        let n_upup = up_d.cols();
        let n_e1 = c.term(q + 1).module().ambient();
        // (x, e) ↦ (-dx, aug x + de)
        let mut cone_d = Matrix::zeros(ring, n_up + n_e, n_upup + n_e1);
        cone_d.paste(0, 0, &up_d.neg());
        cone_d.paste(0, n_upup, &up_aug);
        cone_d.paste(n_up, n_upup, &c.diff(q));
        let target = Subquotient::zero(ring, n_upup).direct_sum(c.term(q + 1).module());
        let z = ModMorphism::new_unchecked(cone_term.module().clone(), target, cone_d).kernel();
        let z_mod = BifilteredModule::new(
            z.clone(),
            cone_term.p1().restrict_to(&z)?,
            cone_term.p2().map(|p| p.restrict_to(&z)).transpose()?,
        )?;
        let (cov, map) = free_cover(&z_mod)?;
        let mut d_rows = Vec::new();
        let mut aug_rows = Vec::new();
        for i in 0..cov.module().ambient() {
            let row = map.row(i);
            let x: Vec<Scalar> = row[..n_up].iter().map(|a| ring.neg(a)).collect();
            d_rows.push(x);
            aug_rows.push(row[n_up..].to_vec());
        }
        stages.push(Stage { module: cov, d: d_rows, aug: aug_rows });
    }
    // assemble, lowest degree first
    stages.reverse();
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    let mut augs = Vec::new();
    for (i, st) in stages.iter().enumerate() {
        let q = bottom + i as i64;
        terms.push(st.module.clone());
        augs.push(Matrix::from_rows(ring, c.term(q).module().ambient(), st.aug.clone())?);
        if i + 1 < stages.len() {
            let n_next = stages[i + 1].module.module().ambient();
            let mut rows = st.d.clone();
            for r in rows.iter_mut() {
                pad(r, n_next);
            }
            diffs.push(Matrix::from_rows(ring, n_next, rows)?);
        }
    }
    let complex = BifilteredComplex::new(ring, bottom, terms, diffs)?;
    let lo = bottom.min(c.lo());
    let hi = top.max(c.hi());
    let full_aug: Vec<Matrix> = (lo..=hi)
        .map(|q| {
            if q >= bottom && q <= top {
                augs[(q - bottom) as usize].clone()
            } else {
                Matrix::zeros(ring, complex.term(q).module().ambient(), c.term(q).module().ambient())
            }
        })
        .collect();
    let aug = FilteredMorphism::new(&complex, c, full_aug)?;
    Ok(Resolution { complex, aug, horizon: bottom })
}

/// `e ⊗^L f`, computed as `e ⊗ Q` for a resolution `Q -> f`; valid above `horizon`.
#[derive(Clone, Debug)]
pub struct DerivedTensor {
    pub complex: BifilteredComplex,
    pub horizon: i64,
}

impl DerivedTensor {
    pub fn check_degree(&self, q: i64) -> Result<()> {
        if q <= self.horizon {
            return Err(Error::DepthTooSmall { requested: q, horizon: self.horizon });
        }
        Ok(())
    }

    pub fn cohomology(&self, q: i64) -> Result<Subquotient> {
        self.check_degree(q)?;
        Ok(self.complex.underlying().cohomology(q))
    }
}

pub fn derived_tensor(e: &BifilteredComplex, f: &BifilteredComplex, depth: usize) -> Result<DerivedTensor> {
    let res = specially_flat_resolution(f, depth)?;
    let complex = tensor_filtered(e, &res.complex)?;
    Ok(DerivedTensor { complex, horizon: res.horizon + e.hi() })
}

/// Same, resolving the first factor instead.
pub fn derived_tensor_left(e: &BifilteredComplex, f: &BifilteredComplex, depth: usize) -> Result<DerivedTensor> {
    let res = specially_flat_resolution(e, depth)?;
    let complex = tensor_filtered(&res.complex, f)?;
    Ok(DerivedTensor { complex, horizon: res.horizon + f.hi() })
}
