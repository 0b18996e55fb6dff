//! Rational functions in one indeterminate over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;

/// `q^shift * num / den` with `num(0) != 0`, `den(0) != 0` and `den` monic.
///
/// Pulling the power of `q` out of both numerator and denominator keeps
/// Laurent polynomials (the overwhelmingly common case) free of gcd work,
/// while the representation stays unique: it is in bijection with the usual
/// coprime fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            shift: 0,
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc {
            shift: 0,
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    /// `q^e`.
    pub fn q_power(e: i64) -> Self {
        RatFunc {
            shift: e,
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    /// Build from an arbitrary fraction `q^shift * num / den` and normalize.
    pub fn from_parts(shift: i64, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let kn = num.low_order();
        let kd = den.low_order();
        let mut num = num.shift_down(kn);
        let mut den = den.shift_down(kd);
        let shift = shift + kn as i64 - kd as i64;
        if !den.is_one() {
            let g = num.gcd(&den);
            if !g.is_one() {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
            let lead = den.leading().cloned().expect("nonzero denominator");
            if !lead.is_one() {
                let inv = lead.recip();
                num = num.scale(&inv);
                den = den.scale(&inv);
            }
        }
        RatFunc { shift, num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc::from_parts(0, p, Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// Coprime numerator and monic denominator with nonnegative exponents.
    pub fn fraction(&self) -> (Poly, Poly) {
        if self.shift >= 0 {
            (self.num.shift_up(self.shift as usize), self.den.clone())
        } else {
            (self.num.clone(), self.den.shift_up((-self.shift) as usize))
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(other.shift);
        let a = self.num.shift_up((self.shift - m) as usize);
        let b = other.num.shift_up((other.shift - m) as usize);
        if self.den.is_one() && other.den.is_one() {
            let sum = a.add(&b);
            if sum.is_zero() {
                return RatFunc::zero();
            }
            let k = sum.low_order();
            return RatFunc {
                shift: m + k as i64,
                num: sum.shift_down(k),
                den: Poly::one(),
            };
        }
        if self.den == other.den {
            return RatFunc::from_parts(m, a.add(&b), self.den.clone());
        }
        let num = a.mul(&other.den).add(&b.mul(&self.den));
        RatFunc::from_parts(m, num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            shift: self.shift,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        let shift = self.shift + other.shift;
        if self.den.is_one() && other.den.is_one() {
            return RatFunc {
                shift,
                num: self.num.mul(&other.num),
                den: Poly::one(),
            };
        }
        // Cross-cancel; the factors are already coprime pairwise.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let (n1, d2) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1), other.den.div_exact(&g1))
        };
        let (n2, d1) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2), self.den.div_exact(&g2))
        };
        let mut num = n1.mul(&n2);
        let mut den = d1.mul(&d2);
        let lead = den.leading().cloned().expect("nonzero denominator");
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { shift, num, den }
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        let lead = self.num.leading().cloned().expect("nonzero");
        let inv = lead.recip();
        Some(RatFunc {
            shift: -self.shift,
            num: self.den.scale(&inv),
            den: self.num.scale(&inv),
        })
    }

    pub fn render(&self) -> String {
        let (n, d) = self.fraction();
        if d.is_one() {
            n.render("q")
        } else {
            format!("({})/({})", n.render("q"), d.render("q"))
        }
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl std::ops::Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        RatFunc::add(&self, &rhs)
    }
}
