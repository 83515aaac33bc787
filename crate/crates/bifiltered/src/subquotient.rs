//! Finitely generated modules as subquotients `G/R` of a free module, and
//! morphisms between them.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Solver};
use crate::matrix::{vecops, Matrix};
use crate::ring::{Ring, Scalar};

/// `G/R` inside `ring^ambient`, both stored in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subquotient {
    ring: Ring,
    ambient: usize,
    gens: Matrix,
    rels: Matrix,
}

impl fmt::Debug for Subquotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subquotient")
            .field("ambient", &self.ambient)
            .field("gens", &self.gens)
            .field("rels", &self.rels)
            .finish()
    }
}

impl Subquotient {
    pub fn new(gens: Matrix, rels: Matrix) -> Result<Subquotient> {
        if gens.ring() != rels.ring() {
            return Err(Error::RingMismatch(format!("{}", gens.ring()), format!("{}", rels.ring())));
        }
        if gens.cols() != rels.cols() {
            return Err(Error::AmbientMismatch(format!("{} vs {}", gens.cols(), rels.cols())));
        }
        let gens = linalg::normal_form(&gens);
        let rels = linalg::normal_form(&rels);
        if !linalg::row_space_le(&rels, &gens) {
            return Err(Error::RelationsNotContained);
        }
        Ok(Subquotient { ring: gens.ring(), ambient: gens.cols(), gens, rels })
    }

    /// Like [`Subquotient::new`] but the generators are enlarged by the relations.
    pub fn spanned(gens: Matrix, rels: Matrix) -> Result<Subquotient> {
        let g = gens.vstack(&rels);
        Subquotient::new(g, rels)
    }

    pub(crate) fn from_canonical(gens: Matrix, rels: Matrix) -> Subquotient {
        debug_assert_eq!(linalg::normal_form(&gens), gens);
        Subquotient { ring: gens.ring(), ambient: gens.cols(), gens, rels }
    }

    pub fn free(ring: Ring, n: usize) -> Subquotient {
        Subquotient {
            ring,
            ambient: n,
            gens: Matrix::identity(ring, n),
            rels: Matrix::zeros(ring, 0, n),
        }
    }

    pub fn zero(ring: Ring, n: usize) -> Subquotient {
        Subquotient { ring, ambient: n, gens: Matrix::zeros(ring, 0, n), rels: Matrix::zeros(ring, 0, n) }
    }

    /// `ring^n / rowspace(rels)`.
    pub fn free_quotient(rels: Matrix) -> Subquotient {
        let ring = rels.ring();
        let n = rels.cols();
        Subquotient::new(Matrix::identity(ring, n), rels).expect("relations lie in the free module")
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn gens(&self) -> &Matrix {
        &self.gens
    }

    pub fn rels(&self) -> &Matrix {
        &self.rels
    }

    /// Submodule spanned by `vectors` (plus the relations), same relations.
    pub fn submodule(&self, vectors: &Matrix) -> Result<Subquotient> {
        let s = Subquotient::spanned(vectors.clone(), self.rels.clone())?;
        if !linalg::row_space_le(&s.gens, &self.gens) {
            return Err(Error::NotContained("vectors outside the module".into()));
        }
        Ok(s)
    }

    /// The zero submodule (the relations themselves).
    pub fn zero_sub(&self) -> Subquotient {
        Subquotient { ring: self.ring, ambient: self.ambient, gens: self.rels.clone(), rels: self.rels.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.gens == self.rels
    }

    /// Does the class of `v` vanish (i.e. `v` lies in the relations)?
    pub fn is_zero_element(&self, v: &[Scalar]) -> bool {
        linalg::row_space_contains(&self.rels, v)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        linalg::row_space_contains(&self.gens, v)
    }

    fn check_same(&self, other: &Subquotient) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{}", self.ring), format!("{}", other.ring)));
        }
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(format!("{} vs {}", self.ambient, other.ambient)));
        }
        Ok(())
    }

    fn check_same_rels(&self, other: &Subquotient) -> Result<()> {
        self.check_same(other)?;
        if self.rels != other.rels {
            return Err(Error::AmbientMismatch("different relations".into()));
        }
        Ok(())
    }

    /// Is `self` a submodule of `other` (same relations)?
    pub fn is_sub(&self, other: &Subquotient) -> bool {
        self.ring == other.ring
            && self.ambient == other.ambient
            && self.rels == other.rels
            && linalg::row_space_le(&self.gens, &other.gens)
    }

    pub fn intersect(&self, other: &Subquotient) -> Result<Subquotient> {
        self.check_same_rels(other)?;
        let g = linalg::row_space_intersect(&self.gens, &other.gens);
        Ok(Subquotient::from_canonical(g, self.rels.clone()))
    }

    pub fn sum(&self, other: &Subquotient) -> Result<Subquotient> {
        self.check_same_rels(other)?;
        let g = linalg::row_space_sum(&self.gens, &other.gens);
        Ok(Subquotient::from_canonical(g, self.rels.clone()))
    }

    /// `self / sub`, where `sub` is a submodule of `self`.
    pub fn quotient(&self, sub: &Subquotient) -> Result<Subquotient> {
        self.check_same(sub)?;
        if !linalg::row_space_le(&sub.gens, &self.gens) || !linalg::row_space_le(&self.rels, &sub.gens) {
            return Err(Error::NotContained("quotient by a non-submodule".into()));
        }
        Ok(Subquotient::from_canonical(self.gens.clone(), sub.gens.clone()))
    }

    /// The submodule `G` as a subquotient with the ambient's zero relations
    /// replaced by `rels` (used to view a cycle module inside a quotient).
    pub fn with_rels(&self, rels: &Matrix) -> Result<Subquotient> {
        Subquotient::spanned(self.gens.clone(), rels.clone())
    }

    /// Presentation data: a free module `ring^g` (g = number of generator rows)
    /// and the relation module `K = {a : a*G in R}`.
    pub fn presentation(&self) -> Matrix {
        linalg::preimage_space(&self.gens, &self.rels)
    }

    pub fn invariants(&self) -> Invariants {
        Invariants::of_relations(self.ring, &self.presentation())
    }

    /// Number of elements (finite rings only).
    pub fn cardinality(&self) -> Option<BigInt> {
        self.invariants().cardinality()
    }

    pub fn is_isomorphic(&self, other: &Subquotient) -> bool {
        self.ring == other.ring && self.invariants() == other.invariants()
    }

    /// Free-quotient form `ring^g / K` and the coordinate map into it.
    pub fn coordinates(&self) -> Coordinates {
        Coordinates::new(self)
    }

    /// Base change of generators and relations to another ring (entrywise).
    pub fn change_ring(&self, ring: Ring) -> Result<Subquotient> {
        Subquotient::new(self.gens.change_ring(ring)?, self.rels.change_ring(ring)?)
    }

    /// All elements (as canonical ambient vectors modulo nothing: every element of `G`).
    /// Only for finite rings; intended for test oracles.
    pub fn enumerate_gens_span(&self) -> Vec<Vec<Scalar>> {
        enumerate_span(&self.gens)
    }

    /// External direct sum, with ambient coordinates concatenated.
    pub fn direct_sum(&self, other: &Subquotient) -> Subquotient {
        Subquotient::from_canonical(self.gens.block_diag(&other.gens), self.rels.block_diag(&other.rels))
    }

    /// Direct sum of many summands (the empty sum is the zero module of rank 0).
    pub fn direct_sum_all(ring: Ring, parts: &[Subquotient]) -> Subquotient {
        let mut acc = Subquotient::zero(ring, 0);
        for p in parts {
            acc = acc.direct_sum(p);
        }
        acc
    }

    /// `rels` replaced by the relations of `sub`'s own ambient module plus `extra`.
    pub fn enlarge_rels(&self, extra: &Matrix) -> Result<Subquotient> {
        let r = linalg::row_space_sum(&self.rels, extra);
        if !linalg::row_space_le(&r, &self.gens) {
            return Err(Error::RelationsNotContained);
        }
        Ok(Subquotient::from_canonical(self.gens.clone(), r))
    }
}

/// Every vector in the row space of `m` (finite rings only).
pub fn enumerate_span(m: &Matrix) -> Vec<Vec<Scalar>> {
    let ring = m.ring();
    let elems = ring.elements().expect("finite ring");
    let mut out: Vec<Vec<Scalar>> = alloc::vec![vecops::zeros(m.cols())];
    for i in 0..m.rows() {
        let mut next = Vec::new();
        for v in &out {
            for c in &elems {
                let w = vecops::add(ring, v, &vecops::scale(ring, c, m.row(i)));
                next.push(w);
            }
        }
        next.sort();
        next.dedup();
        out = next;
    }
    out
}

/// Coordinates with respect to the generator rows of a subquotient.
#[derive(Clone, Debug)]
pub struct Coordinates {
    pub module: Subquotient,
    /// The presentation as `ring^g / K`.
    pub free_form: Subquotient,
    solver: Solver,
}

impl Coordinates {
    fn new(m: &Subquotient) -> Coordinates {
        let k = m.presentation();
        let free_form = Subquotient::free_quotient(k);
        Coordinates { module: m.clone(), free_form, solver: Solver::new(&m.gens) }
    }

    pub fn rank(&self) -> usize {
        self.module.gens.rows()
    }

    /// Coordinates of an ambient vector lying in `G`.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        self.solver.solve(v)
    }

    /// Ambient vector for coordinates.
    pub fn vector(&self, a: &[Scalar]) -> Vec<Scalar> {
        self.module.gens.apply(a)
    }

    /// Matrix of a submodule's generators in coordinates.
    pub fn sub_coords(&self, sub: &Subquotient) -> Result<Matrix> {
        let ring = sub.ring();
        let mut rows = Vec::new();
        for i in 0..sub.gens.rows() {
            rows.push(
                self.coords(sub.gens.row(i))
                    .ok_or_else(|| Error::NotContained("submodule generator outside module".into()))?,
            );
        }
        Matrix::from_rows(ring, self.rank(), rows)
    }

    /// Submodule of the free form corresponding to `sub`.
    pub fn transport(&self, sub: &Subquotient) -> Result<Subquotient> {
        let m = self.sub_coords(sub)?;
        Subquotient::spanned(m, self.free_form.rels.clone())
    }

    /// Coordinate matrix of a morphism `self.module -> target.module` given on ambient
    /// coordinates.
    pub fn morphism_coords(&self, matrix: &Matrix, target: &Coordinates) -> Result<Matrix> {
        let img = self.module.gens.mul(matrix)?;
        let mut rows = Vec::new();
        for i in 0..img.rows() {
            rows.push(
                target
                    .coords(img.row(i))
                    .ok_or_else(|| Error::NotWellDefined("image outside target generators".into()))?,
            );
        }
        Matrix::from_rows(matrix.ring(), target.rank(), rows)
    }
}

/// Isomorphism invariants of a finitely generated module.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Invariants {
    /// `Z/l^n` or `F_l`: the exponents `e` of the cyclic summands `Z/l^e`, descending.
    Local { prime: u64, exponents: Vec<u32> },
    /// `Z`: free rank and invariant factors `d_1 | d_2 | ...` (all > 1).
    Integral { rank: usize, torsion: Vec<BigInt> },
    /// `Q`: dimension.
    Vector { dim: usize },
}

impl Invariants {
    pub(crate) fn of_relations(ring: Ring, k: &Matrix) -> Invariants {
        let diag = linalg::smith_diagonal(k);
        match ring {
            Ring::Rationals => Invariants::Vector { dim: diag.iter().filter(|d| d.is_zero()).count() },
            Ring::Integers => {
                let rank = diag.iter().filter(|d| d.is_zero()).count();
                let mut torsion: Vec<BigInt> =
                    diag.iter().filter(|d| !d.is_zero() && !d.is_one()).map(|d| d.numer().abs()).collect();
                torsion.sort();
                Invariants::Integral { rank, torsion }
            }
            _ => {
                let n = ring.exponent().unwrap();
                let mut exponents: Vec<u32> = diag
                    .iter()
                    .map(|d| if d.is_zero() { n } else { ring.valuation(d) })
                    .filter(|&e| e > 0)
                    .collect();
                exponents.sort_unstable_by(|a, b| b.cmp(a));
                Invariants::Local { prime: ring.prime().unwrap(), exponents }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Invariants::Local { exponents, .. } => exponents.is_empty(),
            Invariants::Integral { rank, torsion } => *rank == 0 && torsion.is_empty(),
            Invariants::Vector { dim } => *dim == 0,
        }
    }

    /// Composition length over a local ring, dimension over `Q`, free rank over `Z`.
    pub fn length(&self) -> usize {
        match self {
            Invariants::Local { exponents, .. } => exponents.iter().map(|&e| e as usize).sum(),
            Invariants::Integral { rank, .. } => *rank,
            Invariants::Vector { dim } => *dim,
        }
    }

    /// Number of generators in a minimal presentation (dimension over fields).
    pub fn num_summands(&self) -> usize {
        match self {
            Invariants::Local { exponents, .. } => exponents.len(),
            Invariants::Integral { rank, torsion } => rank + torsion.len(),
            Invariants::Vector { dim } => *dim,
        }
    }

    pub fn cardinality(&self) -> Option<BigInt> {
        match self {
            Invariants::Local { prime, exponents } => {
                let e: usize = exponents.iter().map(|&e| e as usize).sum();
                Some(num_traits::pow(BigInt::from(*prime), e))
            }
            _ => None,
        }
    }

    /// Direct sum.
    pub fn plus(&self, other: &Invariants) -> Invariants {
        match (self, other) {
            (Invariants::Local { prime, exponents: a }, Invariants::Local { exponents: b, .. }) => {
                let mut e: Vec<u32> = a.iter().chain(b).copied().collect();
                e.sort_unstable_by(|x, y| y.cmp(x));
                Invariants::Local { prime: *prime, exponents: e }
            }
            (Invariants::Vector { dim: a }, Invariants::Vector { dim: b }) => Invariants::Vector { dim: a + b },
            (Invariants::Integral { rank: r1, torsion: t1 }, Invariants::Integral { rank: r2, torsion: t2 }) => {
                // recompute invariant factors of the direct sum via a diagonal relation matrix
                let ring = Ring::Integers;
                let all: Vec<&BigInt> = t1.iter().chain(t2).collect();
                let mut m = Matrix::zeros(ring, all.len(), all.len());
                for (i, d) in all.iter().enumerate() {
                    m.set(i, i, ring.from_bigint((*d).clone()));
                }
                match Invariants::of_relations(ring, &m) {
                    Invariants::Integral { torsion, .. } => Invariants::Integral { rank: r1 + r2, torsion },
                    _ => unreachable!(),
                }
            }
            _ => panic!("invariants over different rings"),
        }
    }

    pub fn zero_for(ring: Ring) -> Invariants {
        Invariants::of_relations(ring, &Matrix::zeros(ring, 0, 0))
    }

    pub fn to_u64_exponents(&self) -> Vec<u64> {
        match self {
            Invariants::Local { exponents, .. } => exponents.iter().map(|&e| e as u64).collect(),
            Invariants::Integral { rank, torsion } => {
                let mut v = alloc::vec![0u64; *rank];
                v.extend(torsion.iter().map(|t| t.to_u64().unwrap_or(u64::MAX)));
                v
            }
            Invariants::Vector { dim } => alloc::vec![1; *dim],
        }
    }
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariants::Local { prime, exponents } => {
                if exponents.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<_> = exponents.iter().map(|e| format!("Z/{prime}^{e}")).collect();
                write!(f, "{}", parts.join(" + "))
            }
            Invariants::Integral { rank, torsion } => {
                let mut parts: Vec<alloc::string::String> = Vec::new();
                if *rank > 0 {
                    parts.push(format!("Z^{rank}"));
                }
                for t in torsion {
                    parts.push(format!("Z/{t}"));
                }
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", parts.join(" + "))
                }
            }
            Invariants::Vector { dim } => write!(f, "Q^{dim}"),
        }
    }
}

/// A homomorphism between subquotients given on ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMorphism {
    source: Subquotient,
    target: Subquotient,
    matrix: Matrix,
}

impl ModMorphism {
    pub fn new(source: Subquotient, target: Subquotient, matrix: Matrix) -> Result<ModMorphism> {
        if matrix.rows() != source.ambient || matrix.cols() != target.ambient {
            return Err(Error::ShapeMismatch(format!(
                "matrix {}x{} for ambients {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.ambient,
                target.ambient
            )));
        }
        let img_g = source.gens.mul(&matrix)?;
        if !linalg::row_space_le(&img_g, &target.gens) {
            return Err(Error::NotWellDefined("generators map outside target".into()));
        }
        let img_r = source.rels.mul(&matrix)?;
        if !linalg::row_space_le(&img_r, &target.rels) {
            return Err(Error::NotWellDefined("relations do not map into relations".into()));
        }
        Ok(ModMorphism { source, target, matrix })
    }

    pub(crate) fn new_unchecked(source: Subquotient, target: Subquotient, matrix: Matrix) -> ModMorphism {
        ModMorphism { source, target, matrix }
    }

    pub fn identity(m: &Subquotient) -> ModMorphism {
        ModMorphism { source: m.clone(), target: m.clone(), matrix: Matrix::identity(m.ring, m.ambient) }
    }

    pub fn zero(source: &Subquotient, target: &Subquotient) -> ModMorphism {
        ModMorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: Matrix::zeros(source.ring, source.ambient, target.ambient),
        }
    }

    pub fn source(&self) -> &Subquotient {
        &self.source
    }

    pub fn target(&self) -> &Subquotient {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.matrix.apply(v)
    }

    /// Image of a submodule of the source, as a submodule of the target.
    pub fn image_of(&self, sub: &Subquotient) -> Subquotient {
        let g = linalg::row_space_sum(&sub.gens.mul(&self.matrix).unwrap(), &self.target.rels);
        Subquotient::from_canonical(g, self.target.rels.clone())
    }

    pub fn image(&self) -> Subquotient {
        self.image_of(&self.source)
    }

    /// Preimage of a submodule of the target, intersected with the source.
    pub fn preimage(&self, sub: &Subquotient) -> Result<Subquotient> {
        if sub.ambient != self.target.ambient {
            return Err(Error::AmbientMismatch("preimage target".into()));
        }
        let tgt = linalg::row_space_sum(&sub.gens, &self.target.rels);
        let m = self.source.gens.mul(&self.matrix)?;
        let coeffs = linalg::preimage_space(&m, &tgt);
        let g = coeffs.mul(&self.source.gens)?;
        let g = linalg::row_space_sum(&g, &self.source.rels);
        Ok(Subquotient::from_canonical(g, self.source.rels.clone()))
    }

    pub fn kernel(&self) -> Subquotient {
        self.preimage(&self.target.zero_sub()).expect("same ambient")
    }

    pub fn cokernel(&self) -> Subquotient {
        let img = self.image();
        Subquotient::from_canonical(self.target.gens.clone(), img.gens)
    }

    pub fn compose(&self, next: &ModMorphism) -> Result<ModMorphism> {
        if self.target.ambient != next.source.ambient {
            return Err(Error::AmbientMismatch("composition".into()));
        }
        Ok(ModMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            matrix: self.matrix.mul(&next.matrix)?,
        })
    }

    /// Same matrix between other subquotients (checked).
    pub fn restrict(&self, source: &Subquotient, target: &Subquotient) -> Result<ModMorphism> {
        ModMorphism::new(source.clone(), target.clone(), self.matrix.clone())
    }

    /// Is the induced map zero?
    pub fn is_zero(&self) -> bool {
        let img = self.source.gens.mul(&self.matrix).unwrap();
        linalg::row_space_le(&img, &self.target.rels)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_zero()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Equality as maps of subquotients.
    pub fn equals(&self, other: &ModMorphism) -> bool {
        let diff = self.matrix.sub(&other.matrix).unwrap();
        let img = self.source.gens.mul(&diff).unwrap();
        linalg::row_space_le(&img, &self.target.rels)
    }
}
