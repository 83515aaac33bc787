//! Weight twists as bookkeeping tags, optionally carrying a unit scalar.

use alloc::format;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{Ring, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistTag {
    pub weight: i64,
    pub scalar: Scalar,
}

impl TwistTag {
    pub fn new(ring: Ring, weight: i64) -> TwistTag {
        TwistTag { weight, scalar: ring.one() }
    }

    pub fn with_scalar(weight: i64, scalar: Scalar) -> TwistTag {
        TwistTag { weight, scalar }
    }

    /// Weights add, scalars multiply.
    pub fn compose(&self, ring: Ring, other: &TwistTag) -> TwistTag {
        TwistTag { weight: self.weight + other.weight, scalar: ring.mul(&self.scalar, &other.scalar) }
    }

    /// Realize the tag as the scalar `base^weight` (the "Frobenius weight scalar" view).
    pub fn realized(ring: Ring, weight: i64, base: &Scalar) -> Result<TwistTag> {
        Ok(TwistTag { weight, scalar: unit_power(ring, base, weight)? })
    }
}

fn unit_power(ring: Ring, base: &Scalar, e: i64) -> Result<Scalar> {
    if !ring.is_unit(base) {
        return Err(Error::DegreeNotUnit(ring.format_scalar(base)));
    }
    let b = if e < 0 { ring.inverse(base).expect("unit") } else { base.clone() };
    let mut acc = ring.one();
    for _ in 0..e.unsigned_abs() {
        acc = ring.mul(&acc, &b);
    }
    Ok(acc)
}

/// Scale a map by `deg^weight · ∏ e_μ` and return the twist it carries.
pub fn d_twist(map: &Matrix, weight: i64, degree: &Scalar, component_degrees: &[Scalar]) -> Result<(Matrix, TwistTag)> {
    let ring = map.ring();
    let mut s = unit_power(ring, degree, weight)?;
    for e in component_degrees {
        if !ring.is_unit(e) {
            return Err(Error::DegreeNotUnit(format!("component degree {}", ring.format_scalar(e))));
        }
        s = ring.mul(&s, e);
    }
    Ok((map.scale(&s), TwistTag::with_scalar(weight, s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_squared_mod_four() {
        let r = Ring::zmod(2, 2).unwrap();
        let (m, tag) = d_twist(&Matrix::identity(r, 1), 2, &r.from_int(3), &[]).unwrap();
        assert_eq!(m, Matrix::identity(r, 1));
        assert_eq!(tag.scalar, r.one());
    }

    #[test]
    fn even_degree_is_rejected() {
        let r = Ring::zmod(2, 2).unwrap();
        assert!(matches!(d_twist(&Matrix::identity(r, 1), 1, &r.from_int(2), &[]), Err(Error::DegreeNotUnit(_))));
    }
}
