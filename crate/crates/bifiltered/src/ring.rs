//! Coefficient rings and scalar arithmetic.
//!
//! Every scalar is a [`Scalar`] (an exact fraction).  Over the finite rings
//! the canonical representative is an integer in `0..modulus`; over the
//! integers the denominator is always one.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// `Z/l^n`.
    ZmodPrimePower { l: u64, n: u32 },
    /// `F_l`; same arithmetic as `ZmodPrimePower { l, n: 1 }`.
    PrimeField(u64),
    Integers,
    Rationals,
}

/// Which elimination strategy a ring needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Family {
    Field,
    Local,
    Euclid,
}

fn is_prime(l: u64) -> bool {
    if l < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= l {
        if l.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn int(x: BigInt) -> Scalar {
    BigRational::from_integer(x)
}

impl Ring {
    pub fn zmod(l: u64, n: u32) -> Result<Ring> {
        if !is_prime(l) {
            return Err(Error::InvalidRing(format!("{l} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidRing("exponent must be at least 1".into()));
        }
        if (l as f64).powi(n as i32) > 1e15 {
            return Err(Error::InvalidRing(format!("{l}^{n} is too large")));
        }
        Ok(Ring::ZmodPrimePower { l, n })
    }

    pub fn fp(l: u64) -> Result<Ring> {
        if !is_prime(l) {
            return Err(Error::InvalidRing(format!("{l} is not prime")));
        }
        Ok(Ring::PrimeField(l))
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            Ring::ZmodPrimePower { l, .. } | Ring::PrimeField(l) => Some(l),
            _ => None,
        }
    }

    /// The exponent `n` of a finite ring `Z/l^n` (1 for prime fields).
    pub fn exponent(&self) -> Option<u32> {
        match *self {
            Ring::ZmodPrimePower { n, .. } => Some(n),
            Ring::PrimeField(_) => Some(1),
            _ => None,
        }
    }

    pub fn modulus(&self) -> Option<BigInt> {
        let l = self.prime()?;
        Some(num_traits::pow(BigInt::from(l), self.exponent()? as usize))
    }

    pub fn is_field(&self) -> bool {
        match *self {
            Ring::PrimeField(_) | Ring::Rationals => true,
            Ring::ZmodPrimePower { n, .. } => n == 1,
            Ring::Integers => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.prime().is_some()
    }

    pub(crate) fn family(&self) -> Family {
        if self.is_field() {
            Family::Field
        } else if self.is_finite() {
            Family::Local
        } else {
            Family::Euclid
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    /// Canonical image of an integer.
    pub fn from_int(&self, x: i64) -> Scalar {
        self.from_bigint(BigInt::from(x))
    }

    pub fn from_bigint(&self, x: BigInt) -> Scalar {
        match self.modulus() {
            Some(m) => int(x.mod_floor(&m)),
            None => int(x),
        }
    }

    /// Canonical image of a fraction; fails when the denominator is not
    /// invertible.
    pub fn from_ratio(&self, x: &BigRational) -> Result<Scalar> {
        match self {
            Ring::Rationals => Ok(x.clone()),
            Ring::Integers => {
                if x.is_integer() {
                    Ok(x.clone())
                } else {
                    Err(Error::Invalid(format!("{x} is not an integer")))
                }
            }
            _ => {
                let m = self.modulus().unwrap();
                let den = x.denom().mod_floor(&m);
                let inv = mod_inverse(&den, &m)
                    .ok_or_else(|| Error::Invalid(format!("denominator of {x} is not a unit")))?;
                Ok(int((x.numer() * inv).mod_floor(&m)))
            }
        }
    }

    #[inline]
    pub fn canon(&self, x: Scalar) -> Scalar {
        match self.modulus() {
            Some(m) => {
                if x.is_integer() && !x.is_negative() && x.numer() < &m {
                    x
                } else {
                    self.from_ratio(&x).expect("non-unit denominator in finite ring")
                }
            }
            None => x,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.canon(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.canon(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if a.is_zero() || b.is_zero() {
            return Scalar::zero();
        }
        self.canon(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.canon(-a)
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            Ring::Rationals => !a.is_zero(),
            Ring::Integers => a.is_integer() && a.numer().abs().is_one(),
            _ => {
                let l = BigInt::from(self.prime().unwrap());
                !a.numer().mod_floor(&l).is_zero()
            }
        }
    }

    pub fn inverse(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        match self {
            Ring::Rationals | Ring::Integers => Some(a.recip()),
            _ => {
                let m = self.modulus().unwrap();
                mod_inverse(a.numer(), &m).map(int)
            }
        }
    }

    /// The `l`-adic valuation of a scalar in a finite ring; zero has valuation `n`.
    pub fn valuation(&self, a: &Scalar) -> u32 {
        let (l, n) = match (self.prime(), self.exponent()) {
            (Some(l), Some(n)) => (BigInt::from(l), n),
            _ => return if a.is_zero() { u32::MAX } else { 0 },
        };
        if a.is_zero() {
            return n;
        }
        let mut x = a.numer().clone();
        let mut v = 0;
        while v < n && x.mod_floor(&l).is_zero() {
            x /= &l;
            v += 1;
        }
        v
    }

    /// `l^v` in a finite ring.
    pub fn l_power(&self, v: u32) -> Scalar {
        let l = BigInt::from(self.prime().expect("finite ring"));
        self.from_bigint(num_traits::pow(l, v as usize))
    }

    /// For a finite-ring scalar `a` of valuation `v < n`, a unit `u` with `u*a = l^v`.
    pub(crate) fn normalizing_unit(&self, a: &Scalar) -> Scalar {
        let v = self.valuation(a);
        let l = BigInt::from(self.prime().unwrap());
        let m = self.modulus().unwrap();
        let lv = num_traits::pow(l, v as usize);
        let unit_part = a.numer() / &lv;
        int(mod_inverse(&unit_part, &m).expect("unit part"))
    }

    /// `q` with `q*b = a` when `b` divides `a`.
    pub fn divide(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return Some(Scalar::zero());
        }
        if b.is_zero() {
            return None;
        }
        match self.family() {
            Family::Field => Some(self.mul(a, &self.inverse(b)?)),
            Family::Euclid => {
                let (q, r) = a.numer().div_rem(b.numer());
                if r.is_zero() {
                    Some(int(q))
                } else {
                    None
                }
            }
            Family::Local => {
                let (va, vb) = (self.valuation(a), self.valuation(b));
                if va < vb {
                    return None;
                }
                let l = BigInt::from(self.prime().unwrap());
                let lvb = num_traits::pow(l, vb as usize);
                let u = self.normalizing_unit(b);
                let a_shift = a.numer() / &lvb;
                Some(self.mul(&int(a_shift), &u))
            }
        }
    }

    /// All elements of a finite ring, in increasing canonical order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        let m = self.modulus()?.to_u64()?;
        Some((0..m).map(|i| int(BigInt::from(i))).collect())
    }

    /// Number of elements of a finite ring.
    pub fn size(&self) -> Option<u64> {
        self.modulus()?.to_u64()
    }

    /// Parse the document spelling of a scalar ("3", "-1", "2/3").
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let r = if let Some((a, b)) = s.split_once('/') {
            let a = BigInt::from_str(a.trim()).map_err(|_| Error::Invalid(format!("bad scalar {s}")))?;
            let b = BigInt::from_str(b.trim()).map_err(|_| Error::Invalid(format!("bad scalar {s}")))?;
            if b.is_zero() {
                return Err(Error::Invalid(format!("zero denominator in {s}")));
            }
            BigRational::new(a, b)
        } else {
            int(BigInt::from_str(s).map_err(|_| Error::Invalid(format!("bad scalar {s}")))?)
        };
        self.from_ratio(&r)
    }

    pub fn format_scalar(&self, a: &Scalar) -> String {
        a.to_string()
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::ZmodPrimePower { l, n } => write!(f, "zmod:l={l},n={n}"),
            Ring::PrimeField(l) => write!(f, "fp:{l}"),
            Ring::Integers => write!(f, "int"),
            Ring::Rationals => write!(f, "rat"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    /// Accepts `zmod:l=2,n=3`, `fp:3`, `int`, `rat`.
    fn from_str(s: &str) -> Result<Ring> {
        let s = s.trim();
        match s {
            "int" => return Ok(Ring::Integers),
            "rat" => return Ok(Ring::Rationals),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("fp:") {
            let l = rest.trim().parse::<u64>().map_err(|_| Error::InvalidRing(s.to_string()))?;
            return Ring::fp(l);
        }
        if let Some(rest) = s.strip_prefix("zmod:") {
            let mut l = None;
            let mut n = None;
            for part in rest.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| Error::InvalidRing(s.to_string()))?;
                let v = v.trim().parse::<u64>().map_err(|_| Error::InvalidRing(s.to_string()))?;
                match k.trim() {
                    "l" => l = Some(v),
                    "n" => n = Some(v as u32),
                    _ => return Err(Error::InvalidRing(s.to_string())),
                }
            }
            return match (l, n) {
                (Some(l), Some(n)) => Ring::zmod(l, n),
                _ => Err(Error::InvalidRing(s.to_string())),
            };
        }
        Err(Error::InvalidRing(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["zmod:l=2,n=3", "fp:3", "int", "rat"] {
            let r: Ring = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("zmod:l=4,n=1".parse::<Ring>().is_err());
        assert!("fp:1".parse::<Ring>().is_err());
    }

    #[test]
    fn local_arithmetic() {
        let r = Ring::zmod(2, 3).unwrap();
        let six = r.from_int(6);
        assert_eq!(r.valuation(&six), 1);
        let u = r.normalizing_unit(&six);
        assert_eq!(r.mul(&u, &six), r.from_int(2));
        assert_eq!(r.divide(&r.from_int(4), &six), Some(r.from_int(6)));
        assert_eq!(r.from_int(-1), r.from_int(7));
        assert!(r.divide(&r.from_int(2), &r.from_int(4)).is_none());
    }

    #[test]
    fn fraction_into_finite_ring() {
        let r = Ring::fp(5).unwrap();
        assert_eq!(r.parse_scalar("1/2").unwrap(), r.from_int(3));
        assert!(Ring::zmod(2, 2).unwrap().parse_scalar("1/2").is_err());
    }
}
