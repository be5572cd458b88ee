//! Ground fields and exact scalars.
//!
//! Two kinds of field are supported: the rationals, backed by
//! arbitrary-precision fractions, and prime fields GF(p) with residues kept in
//! `[0, p)`. A [`Scalar`] carries its own modulus, so binary operations never
//! need the field passed in; mixing scalars from different fields is a logic
//! error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    /// GF(p), after checking that `p` is prime.
    pub fn prime(p: u64) -> Result<Field> {
        if is_prime(p) && p < (1 << 62) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Residue {
                value: (v as i128).rem_euclid(*p as i128) as u64,
                modulus: *p,
            },
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => Scalar::Residue {
                value: reduce_bigint(v, *p),
                modulus: *p,
            },
        }
    }

    /// `numer / denom` in this field.
    pub fn from_ratio(&self, numer: &BigInt, denom: &BigInt) -> Result<Scalar> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Field::Rationals => Ok(Scalar::Rational(BigRational::new(numer.clone(), denom.clone()))),
            Field::Prime(_) => {
                let d = self.from_bigint(denom);
                let inv = d
                    .inv()
                    .map_err(|_| Error::NonInvertibleDenominator(denom.to_string()))?;
                Ok(&self.from_bigint(numer) * &inv)
            }
        }
    }

    /// Whether `k!` is a unit, i.e. every integer in `1..=k` is invertible.
    pub fn factorial_invertible(&self, k: u64) -> bool {
        match self {
            Field::Rationals => true,
            Field::Prime(p) => k < *p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Residue { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    /// True for rationals below zero; residues are never negative.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Residue { .. } => false,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut exp: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            s => s.clone(),
        }
    }

    pub fn mul_u64(&self, k: u64) -> Scalar {
        self * &self.field().from_bigint(&BigInt::from(k))
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mismatch() -> ! {
    panic!("scalar arithmetic across different fields")
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus: m }, Scalar::Residue { value: b, modulus: n })
                if m == n =>
            {
                Scalar::Residue { value: ((*a as u128 + *b as u128) % *m as u128) as u64, modulus: *m }
            }
            _ => mismatch(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus: m }, Scalar::Residue { value: b, modulus: n })
                if m == n =>
            {
                Scalar::Residue { value: mul_mod(*a, *b, *m), modulus: *m }
            }
            _ => mismatch(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_check() {
        assert!(Field::prime(5).is_ok());
        assert_eq!(Field::prime(4), Err(Error::NotPrime(4)));
        assert_eq!(Field::prime(1), Err(Error::NotPrime(1)));
        assert_eq!(Field::prime(7).unwrap().characteristic(), 7);
        assert_eq!(Field::Rationals.characteristic(), 0);
    }

    #[test]
    fn residues_stay_reduced() {
        let f = Field::Prime(5);
        assert_eq!(f.from_i64(-1), Scalar::Residue { value: 4, modulus: 5 });
        assert_eq!(&f.from_i64(3) + &f.from_i64(4), f.from_i64(2));
        assert_eq!(f.from_i64(3).inv().unwrap(), f.from_i64(2));
        assert!(f.from_i64(10).inv().is_err());
    }

    #[test]
    fn rational_lowest_terms() {
        let q = Field::Rationals;
        let s = q.from_ratio(&BigInt::from(6), &BigInt::from(-4)).unwrap();
        assert_eq!(s.to_string(), "-3/2");
    }

    #[test]
    fn non_invertible_denominator() {
        let f = Field::Prime(5);
        let err = f.from_ratio(&BigInt::from(1), &BigInt::from(5)).unwrap_err();
        assert!(matches!(err, Error::NonInvertibleDenominator(_)));
    }
}
