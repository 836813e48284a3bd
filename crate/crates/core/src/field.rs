//! Exact coefficient fields: the rationals and prime fields `F_p` with `p < 2^31`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Which field the coefficients live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

/// A canonical field element.
///
/// Rationals are stored as reduced fractions with positive denominator, residues as the least
/// non-negative representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldValue {
    Rational(BigRational),
    Residue(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self, AlgebraError> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(AlgebraError::InvalidCharacteristic(p as u64));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> FieldValue {
        match self {
            FieldSpec::Rationals => FieldValue::Rational(BigRational::zero()),
            FieldSpec::Prime(_) => FieldValue::Residue(0),
        }
    }

    pub fn one(&self) -> FieldValue {
        match self {
            FieldSpec::Rationals => FieldValue::Rational(BigRational::one()),
            FieldSpec::Prime(_) => FieldValue::Residue(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> FieldValue {
        match self {
            FieldSpec::Rationals => FieldValue::Rational(BigRational::from_integer(n.into())),
            FieldSpec::Prime(p) => FieldValue::Residue(n.rem_euclid(*p as i64) as u32),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldValue {
        match self {
            FieldSpec::Rationals => FieldValue::Rational(BigRational::from_integer(n.clone())),
            FieldSpec::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(*p));
                FieldValue::Residue(r.to_u32().expect("residue fits u32"))
            }
        }
    }

    /// Maps a rational number into the field; fails when the denominator vanishes mod p.
    pub fn from_rational(&self, q: &BigRational) -> Result<FieldValue, AlgebraError> {
        match self {
            FieldSpec::Rationals => Ok(FieldValue::Rational(q.clone())),
            FieldSpec::Prime(_) => {
                let num = self.from_bigint(q.numer());
                let den = self.from_bigint(q.denom());
                self.div(&num, &den)
            }
        }
    }

    pub fn contains(&self, a: &FieldValue) -> bool {
        match (self, a) {
            (FieldSpec::Rationals, FieldValue::Rational(_)) => true,
            (FieldSpec::Prime(p), FieldValue::Residue(r)) => r < p,
            _ => false,
        }
    }

    /// Checked arithmetic entry point. Division by zero and mixed-field operands are errors.
    pub fn arith(&self, op: FieldOp, a: &FieldValue, b: &FieldValue) -> Result<FieldValue, AlgebraError> {
        if !self.contains(a) || !self.contains(b) {
            return Err(AlgebraError::FieldMismatch);
        }
        Ok(match op {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
            FieldOp::Div => self.div(a, b)?,
        })
    }

    #[inline]
    pub fn add(&self, a: &FieldValue, b: &FieldValue) -> FieldValue {
        match (self, a, b) {
            (FieldSpec::Prime(p), FieldValue::Residue(x), FieldValue::Residue(y)) => {
                let s = *x as u64 + *y as u64;
                FieldValue::Residue((s % *p as u64) as u32)
            }
            (_, FieldValue::Rational(x), FieldValue::Rational(y)) => FieldValue::Rational(x + y),
            _ => panic!("field element does not belong to {self:?}"),
        }
    }

    #[inline]
    pub fn neg(&self, a: &FieldValue) -> FieldValue {
        match (self, a) {
            (FieldSpec::Prime(p), FieldValue::Residue(x)) => {
                FieldValue::Residue(if *x == 0 { 0 } else { p - x })
            }
            (_, FieldValue::Rational(x)) => FieldValue::Rational(-x),
            _ => panic!("field element does not belong to {self:?}"),
        }
    }

    #[inline]
    pub fn sub(&self, a: &FieldValue, b: &FieldValue) -> FieldValue {
        match (self, a, b) {
            (FieldSpec::Prime(p), FieldValue::Residue(x), FieldValue::Residue(y)) => {
                let s = *x as u64 + *p as u64 - *y as u64;
                FieldValue::Residue((s % *p as u64) as u32)
            }
            (_, FieldValue::Rational(x), FieldValue::Rational(y)) => FieldValue::Rational(x - y),
            _ => panic!("field element does not belong to {self:?}"),
        }
    }

    #[inline]
    pub fn mul(&self, a: &FieldValue, b: &FieldValue) -> FieldValue {
        match (self, a, b) {
            (FieldSpec::Prime(p), FieldValue::Residue(x), FieldValue::Residue(y)) => {
                FieldValue::Residue(((*x as u64 * *y as u64) % *p as u64) as u32)
            }
            (_, FieldValue::Rational(x), FieldValue::Rational(y)) => FieldValue::Rational(x * y),
            _ => panic!("field element does not belong to {self:?}"),
        }
    }

    pub fn inverse(&self, a: &FieldValue) -> Result<FieldValue, AlgebraError> {
        if a.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        match (self, a) {
            (FieldSpec::Prime(p), FieldValue::Residue(x)) => {
                Ok(FieldValue::Residue(inverse_mod(*x, *p)))
            }
            (_, FieldValue::Rational(x)) => Ok(FieldValue::Rational(x.recip())),
            _ => Err(AlgebraError::FieldMismatch),
        }
    }

    pub fn div(&self, a: &FieldValue, b: &FieldValue) -> Result<FieldValue, AlgebraError> {
        let inv = self.inverse(b)?;
        Ok(self.mul(a, &inv))
    }

    /// Re-normalizes a value into canonical form. Values built through the field API are
    /// already canonical, so this is idempotent.
    pub fn canonicalize(&self, a: &FieldValue) -> FieldValue {
        match (self, a) {
            (FieldSpec::Prime(p), FieldValue::Residue(x)) => FieldValue::Residue(x % p),
            (FieldSpec::Rationals, FieldValue::Rational(x)) => {
                FieldValue::Rational(BigRational::new(x.numer().clone(), x.denom().clone()))
            }
            _ => panic!("field element does not belong to {self:?}"),
        }
    }
}

/// Extended Euclid over the integers.
fn inverse_mod(a: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i64) as u32
}

impl FieldValue {
    #[inline]
    pub fn is_zero(&self) -> bool {
        match self {
            FieldValue::Residue(x) => *x == 0,
            FieldValue::Rational(x) => x.is_zero(),
        }
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        match self {
            FieldValue::Residue(x) => *x == 1,
            FieldValue::Rational(x) => x.is_one(),
        }
    }

    /// True when the value prints with a leading minus sign (never for residues).
    pub fn is_negative(&self) -> bool {
        match self {
            FieldValue::Residue(_) => false,
            FieldValue::Rational(x) => x.is_negative(),
        }
    }

    pub fn abs(&self) -> FieldValue {
        match self {
            FieldValue::Residue(x) => FieldValue::Residue(*x),
            FieldValue::Rational(x) => FieldValue::Rational(x.abs()),
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Residue(x) => write!(f, "{x}"),
            FieldValue::Rational(x) => {
                if x.is_integer() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::Prime(p) => write!(f, "Fp({p})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> FieldValue {
        FieldValue::Rational(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn rational_sum() {
        let k = FieldSpec::Rationals;
        assert_eq!(k.arith(FieldOp::Add, &q(1, 2), &q(1, 3)).unwrap(), q(5, 6));
    }

    #[test]
    fn residue_product() {
        let k = FieldSpec::prime(7).unwrap();
        assert_eq!(k.mul(&k.from_i64(3), &k.from_i64(5)), FieldValue::Residue(1));
    }

    #[test]
    fn self_division_is_one() {
        let k = FieldSpec::Rationals;
        let a = q(-7, 9);
        assert!(k.arith(FieldOp::Div, &a, &a).unwrap().is_one());
    }

    #[test]
    fn inverses() {
        let k = FieldSpec::Rationals;
        assert_eq!(k.inverse(&q(3, 4)).unwrap(), q(4, 3));
        // 2 * 16002 = 32004 = 1 mod 32003
        let p = FieldSpec::prime(32003).unwrap();
        assert_eq!(p.inverse(&p.from_i64(2)).unwrap(), FieldValue::Residue(16002));
        assert!(p.inverse(&p.one()).unwrap().is_one());
        assert!(k.inverse(&k.one()).unwrap().is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let k = FieldSpec::Rationals;
        assert_eq!(k.arith(FieldOp::Div, &q(1, 1), &k.zero()), Err(AlgebraError::DivisionByZero));
        let p = FieldSpec::prime(5).unwrap();
        assert_eq!(p.inverse(&p.zero()), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn mixed_fields_rejected() {
        let k = FieldSpec::Rationals;
        assert_eq!(
            k.arith(FieldOp::Add, &q(1, 1), &FieldValue::Residue(1)),
            Err(AlgebraError::FieldMismatch)
        );
    }

    #[test]
    fn characteristic_validation() {
        assert!(FieldSpec::prime(32003).is_ok());
        assert!(FieldSpec::prime(32004).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(2147483659).is_err());
    }

    #[test]
    fn rational_into_prime_field() {
        let p = FieldSpec::prime(7).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(p.from_rational(&half).unwrap(), FieldValue::Residue(4));
        let seventh = BigRational::new(1.into(), 7.into());
        assert!(p.from_rational(&seventh).is_err());
    }

    fn arb_q() -> impl Strategy<Value = FieldValue> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn rational_axioms(a in arb_q(), b in arb_q(), c in arb_q()) {
            let k = FieldSpec::Rationals;
            prop_assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            prop_assert_eq!(k.canonicalize(&k.canonicalize(&a)), k.canonicalize(&a));
            prop_assert_eq!(k.canonicalize(&a), a);
        }

        #[test]
        fn residue_axioms(a in 0u32..32003, b in 0u32..32003, c in 0u32..32003) {
            let k = FieldSpec::Prime(32003);
            let (a, b, c) = (FieldValue::Residue(a), FieldValue::Residue(b), FieldValue::Residue(c));
            prop_assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            prop_assert_eq!(k.sub(&k.add(&a, &b), &b), a.clone());
            if !a.is_zero() {
                prop_assert!(k.mul(&a, &k.inverse(&a).unwrap()).is_one());
            }
        }
    }
}
