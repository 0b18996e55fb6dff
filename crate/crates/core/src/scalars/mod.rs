//! Exact scalars: `Q(q)` for generic `q`, or `Q(zeta_N)` when `q` is
//! specialized to a primitive `N`-th root of unity.

mod cyclotomic;
mod parse;
mod poly;
mod ratfunc;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use cyclotomic::{cyclotomic_polynomial, totient, Cyclo};
pub use poly::Poly;
pub use ratfunc::RatFunc;

use crate::error::{Error, Result};

/// Choice of ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum FieldSpec {
    Transcendental,
    Cyclotomic { order: u32 },
}

impl FieldSpec {
    pub fn zero(&self) -> FieldElement {
        match *self {
            FieldSpec::Transcendental => FieldElement::Rat(RatFunc::zero()),
            FieldSpec::Cyclotomic { order } => FieldElement::Cyc(Cyclo::zero(order)),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.integer(1)
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        self.rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(&self, c: BigRational) -> FieldElement {
        match *self {
            FieldSpec::Transcendental => FieldElement::Rat(RatFunc::constant(c)),
            FieldSpec::Cyclotomic { order } => FieldElement::Cyc(Cyclo::constant(order, c)),
        }
    }

    /// `q^e`; in cyclotomic mode `zeta^(e mod N)`.
    pub fn q_power(&self, e: i64) -> FieldElement {
        match *self {
            FieldSpec::Transcendental => FieldElement::Rat(RatFunc::q_power(e)),
            FieldSpec::Cyclotomic { order } => FieldElement::Cyc(Cyclo::zeta_power(order, e)),
        }
    }

    /// `1 + x + ... + x^(t-1)`.
    pub fn gauss_integer(&self, t: u32, x: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        let mut p = self.one();
        for _ in 0..t {
            acc += &p;
            p = &p * x;
        }
        acc
    }

    /// Parse a scalar expression (integers, `q`, `+ - * / ^`, parentheses).
    /// In cyclotomic mode `z`, `zeta` and `q` all denote the root of unity.
    pub fn parse(&self, text: &str) -> Result<FieldElement> {
        parse::parse_scalar(self, text)
    }

    pub fn is_cyclotomic(&self) -> bool {
        matches!(self, FieldSpec::Cyclotomic { .. })
    }
}

/// An exact scalar in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rat(RatFunc),
    Cyc(Cyclo),
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rat(a) => a.is_zero(),
            FieldElement::Cyc(a) => a.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rat(a) => a.is_one(),
            FieldElement::Cyc(a) => a.is_one(),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldElement::Rat(_) => FieldSpec::Transcendental,
            FieldElement::Cyc(c) => FieldSpec::Cyclotomic { order: c.order() },
        }
    }

    pub fn inv(&self) -> Option<FieldElement> {
        match self {
            FieldElement::Rat(a) => a.inv().map(FieldElement::Rat),
            FieldElement::Cyc(a) => a.inv().map(FieldElement::Cyc),
        }
    }

    /// Division; panics on a zero divisor, which callers rule out beforehand.
    pub fn div(&self, other: &FieldElement) -> FieldElement {
        self * &other.inv().expect("division by zero scalar")
    }

    pub fn pow(&self, e: i64) -> FieldElement {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut acc = self.spec().one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Canonical string: `N` or `(N)/(D)` in `q` (transcendental, `D` monic,
    /// coprime), or a reduced polynomial in `z` (cyclotomic).
    pub fn canonical(&self) -> String {
        match self {
            FieldElement::Rat(a) => a.render(),
            FieldElement::Cyc(a) => a.render(),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.canonical())
    }
}

fn mismatch(a: &FieldElement, b: &FieldElement) -> ! {
    panic!("scalar field mismatch: {:?} vs {:?}", a.spec(), b.spec())
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Rat(a), FieldElement::Rat(b)) => FieldElement::Rat(a.add(b)),
            (FieldElement::Cyc(a), FieldElement::Cyc(b)) => FieldElement::Cyc(a.add(b)),
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Rat(a), FieldElement::Rat(b)) => FieldElement::Rat(a.mul(b)),
            (FieldElement::Cyc(a), FieldElement::Cyc(b)) => FieldElement::Cyc(a.mul(b)),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rat(a) => FieldElement::Rat(a.neg()),
            FieldElement::Cyc(a) => FieldElement::Cyc(a.neg()),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        *self = &*self - rhs;
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

/// Parse a canonical scalar string back into the given field.
pub fn parse_scalar(field: &FieldSpec, text: &str) -> Result<FieldElement> {
    field.parse(text)
}

pub(crate) fn parse_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Transcendental;
    const C5: FieldSpec = FieldSpec::Cyclotomic { order: 5 };

    #[test]
    fn q_power_examples() {
        assert!(Q.q_power(0).is_one());
        assert!(C5.q_power(0).is_one());
        let qm2 = Q.q_power(-2);
        assert_eq!(&qm2 * &Q.q_power(2), Q.one());
        assert_eq!(qm2.canonical(), "(1)/(q^2)");
        assert!(C5.q_power(5).is_one());
    }

    #[test]
    fn gauss_integer_examples() {
        let x = Q.q_power(-2);
        assert!(Q.gauss_integer(0, &x).is_zero());
        assert!(Q.gauss_integer(1, &x).is_one());
        // direct summation
        let direct = &(&Q.one() + &Q.q_power(-2)) + &Q.q_power(-4);
        assert_eq!(Q.gauss_integer(3, &x), direct);
    }

    #[test]
    fn is_zero_examples() {
        assert!(Q.zero().is_zero());
        assert!(!(&Q.q_power(2) - &Q.one()).is_zero());
        let mut s = C5.zero();
        for e in 0..5 {
            s += &C5.q_power(e);
        }
        assert!(s.is_zero());
    }

    #[test]
    fn canonical_strings_parse_back() {
        let a = Q.parse("(q^2 + 1)/(2*q^3 - q)").unwrap();
        assert_eq!(Q.parse(&a.canonical()).unwrap(), a);
        let b = C5.parse("z^7 - 1/3").unwrap();
        assert_eq!(C5.parse(&b.canonical()).unwrap(), b);
    }

    #[test]
    fn cyclotomic_reduction_uses_phi() {
        // z^4 = -(1 + z + z^2 + z^3) in Q(zeta_5)
        let a = C5.q_power(4);
        assert_eq!(a.canonical(), "-z^3 - z^2 - z - 1");
    }
}
