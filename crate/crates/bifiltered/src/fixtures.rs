//! Small pinned inputs shared by tests, the CLI and the acceptance suite.

use alloc::vec;

use crate::complex::BifilteredComplex;
use crate::error::Result;
use crate::filtration::{BifilteredModule, Filtration};
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::Subquotient;

/// The sum map `M ⊕ M -> M` for `M = Z/4`, `N = 2Z/4`.
///
/// The source carries `N ⊕ 0` and `0 ⊕ N` at level 0, the target carries
/// `0 ⊂ N ⊂ M` twice. Both single filtrations are strict, the pair is not.
pub struct SumMap {
    pub source: BifilteredModule,
    pub target: BifilteredModule,
    pub matrix: Matrix,
}

pub fn sum_map() -> Result<SumMap> {
    let ring = Ring::zmod(2, 2)?;
    let e = Subquotient::free(ring, 2);
    let first = e.submodule(&Matrix::from_i64(ring, 2, &[&[2, 0]]))?;
    let second = e.submodule(&Matrix::from_i64(ring, 2, &[&[0, 2]]))?;
    let source = BifilteredModule::new(
        e.clone(),
        Filtration::chain(&e, vec![(0, first), (1, e.clone())])?,
        Some(Filtration::chain(&e, vec![(0, second), (1, e.clone())])?),
    )?;
    let m = Subquotient::free(ring, 1);
    let n = m.submodule(&Matrix::from_i64(ring, 1, &[&[2]]))?;
    let p = Filtration::chain(&m, vec![(0, n), (1, m.clone())])?;
    let target = BifilteredModule::new(m, p.clone(), Some(p))?;
    let matrix = Matrix::from_i64(ring, 1, &[&[1], &[1]]);
    Ok(SumMap { source, target, matrix })
}

/// `K -> M ⊕ M -> M` in degrees -1, 0, 1 with `K` the kernel of the sum map
/// carrying the induced filtrations.
pub fn sum_sequence() -> Result<BifilteredComplex> {
    let s = sum_map()?;
    let ring = s.matrix.ring();
    let e = s.source.module().clone();
    let k = e.submodule(&Matrix::from_i64(ring, 2, &[&[1, 3]]))?;
    let restrict = |f: &Filtration| f.restrict_to(&k);
    let kernel = BifilteredModule::new(
        k.clone(),
        restrict(s.source.p1())?,
        Some(restrict(s.source.p2().expect("two filtrations"))?),
    )?;
    // K sits inside the same ambient as E; its inclusion is the identity matrix
    BifilteredComplex::new(
        ring,
        -1,
        vec![kernel, s.source.clone(), s.target.clone()],
        vec![Matrix::identity(ring, 2), s.matrix.clone()],
    )
}
