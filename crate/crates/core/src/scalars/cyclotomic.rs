//! The cyclotomic field `Q(zeta_N)`, elements reduced modulo `Phi_N`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::poly::Poly;

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<Poly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Poly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `n`-th cyclotomic polynomial, `x^n - 1` divided by all `Phi_d`, `d | n`, `d < n`.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Poly> {
    assert!(n >= 1);
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut p = Poly::monomial(BigRational::one(), n as usize).sub(&Poly::one());
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = p.div_exact(&cyclotomic_polynomial(d));
        }
    }
    let p = Arc::new(p);
    cyclotomic_cache().lock().unwrap().insert(n, p.clone());
    p
}

/// Euler's totient, the degree of `Phi_n`.
pub fn totient(n: u32) -> u32 {
    (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u32
}

/// Polynomial in `zeta` of degree `< phi(N)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyclo {
    order: u32,
    poly: Poly,
}

impl Cyclo {
    pub fn from_poly(order: u32, p: Poly) -> Self {
        let modulus = cyclotomic_polynomial(order);
        let poly = if p.degree() >= modulus.degree() {
            p.div_rem(&modulus).1
        } else {
            p
        };
        Cyclo { order, poly }
    }

    pub fn zero(order: u32) -> Self {
        Cyclo {
            order,
            poly: Poly::zero(),
        }
    }

    pub fn constant(order: u32, c: BigRational) -> Self {
        Cyclo::from_poly(order, Poly::constant(c))
    }

    /// `zeta^(e mod N)`.
    pub fn zeta_power(order: u32, e: i64) -> Self {
        let r = e.rem_euclid(order as i64) as usize;
        Cyclo::from_poly(order, Poly::monomial(BigRational::one(), r))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.poly.is_one()
    }

    fn check(&self, other: &Cyclo) {
        assert_eq!(self.order, other.order, "mixed cyclotomic orders");
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        self.check(other);
        Cyclo {
            order: self.order,
            poly: self.poly.add(&other.poly),
        }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            order: self.order,
            poly: self.poly.neg(),
        }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        self.check(other);
        Cyclo::from_poly(self.order, self.poly.mul(&other.poly))
    }

    /// Inverse via the extended Euclidean algorithm against `Phi_N`.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        let modulus = cyclotomic_polynomial(self.order);
        let (g, s, _) = self.poly.ext_gcd(&modulus);
        debug_assert!(g.is_one(), "Phi_N is irreducible");
        Some(Cyclo::from_poly(self.order, s))
    }

    pub fn render(&self) -> String {
        self.poly.render("z")
    }

    pub fn integer(order: u32, n: i64) -> Cyclo {
        Cyclo::constant(order, BigRational::from_integer(BigInt::from(n)))
    }
}
