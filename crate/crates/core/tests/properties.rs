use std::collections::BTreeMap;

use proptest::prelude::*;
use qboson_core::cartan::samples::*;
use qboson_core::freebraided::{braided_coproduct, e_derivation, FreeElement};
use qboson_core::nichols::Nichols;
use qboson_core::pairing::tau_derivation;
use qboson_core::qboson::{Boson, BosonElement, Letter, Strategy as Order};
use qboson_core::{CartanDatum, FieldElement, FieldSpec, Side, Word};

fn element(field: &FieldSpec, num: &[i64], den: &[i64], shift: i64) -> Option<FieldElement> {
    let poly = |c: &[i64]| {
        c.iter()
            .enumerate()
            .fold(field.zero(), |acc, (i, &x)| &acc + &(&field.integer(x) * &field.q_power(i as i64)))
    };
    let d = poly(den);
    let inv = d.inv()?;
    Some(&(&poly(num) * &inv) * &field.q_power(shift))
}

fn fields() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Transcendental),
        Just(FieldSpec::Cyclotomic { order: 5 }),
        Just(FieldSpec::Cyclotomic { order: 9 }),
    ]
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 1..4)
}

fn datum(k: usize) -> CartanDatum {
    match k % 3 {
        0 => sl2(),
        1 => a2(),
        _ => borcherds(),
    }
}

fn word(d: &CartanDatum, raw: &[u16]) -> Word {
    let g = d.generator_count() as u16;
    Word(raw.iter().map(|x| x % g).collect())
}

fn words() -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(0u16..6, 0..4)
}

/// `(Δ ⊗ id)Δ` and `(id ⊗ Δ)Δ` as coefficient tables on triples.
fn triple_left(d: &CartanDatum, w: &Word) -> BTreeMap<(Word, Word, Word), FieldElement> {
    let mut out: BTreeMap<(Word, Word, Word), FieldElement> = BTreeMap::new();
    for ((a, b), c) in braided_coproduct(d, w).terms {
        for ((x, y), k) in braided_coproduct(d, &a).terms {
            let e = out.entry((x, y, b.clone())).or_insert_with(|| d.field().zero());
            *e += &(&c * &k);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn triple_right(d: &CartanDatum, w: &Word) -> BTreeMap<(Word, Word, Word), FieldElement> {
    let mut out: BTreeMap<(Word, Word, Word), FieldElement> = BTreeMap::new();
    for ((a, b), c) in braided_coproduct(d, w).terms {
        for ((x, y), k) in braided_coproduct(d, &b).terms {
            let e = out.entry((a.clone(), x, y)).or_insert_with(|| d.field().zero());
            *e += &(&c * &k);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in fields(), a in coeffs(), b in coeffs(), c in coeffs(), d in coeffs(), s in -3i64..3, t in -3i64..3) {
        let Some(x) = element(&f, &a, &b, s) else { return Ok(()) };
        let Some(y) = element(&f, &c, &d, t) else { return Ok(()) };
        let z = &x * &y;
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&z, &(&y * &x));
        prop_assert_eq!(&(&x + &y) * &x, &(&x * &x) + &z);
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if let Some(xi) = x.inv() {
            prop_assert!((&x * &xi).is_one());
        } else {
            prop_assert!(x.is_zero());
        }
        prop_assert_eq!(f.parse(&x.canonical()).unwrap(), x.clone());
        prop_assert_eq!(f.parse(&z.canonical()).unwrap(), z);
    }

    #[test]
    fn gauss_recurrence(f in fields(), t in 1u32..10, e in -3i64..3) {
        // [t+1]_x = 1 + x [t]_x
        let x = f.q_power(e);
        let lhs = f.gauss_integer(t + 1, &x);
        let rhs = &f.one() + &(&x * &f.gauss_integer(t, &x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coproduct_is_coassociative(k in 0usize..3, raw in prop::collection::vec(0u16..6, 0..6)) {
        let d = datum(k);
        let w = word(&d, &raw);
        prop_assert_eq!(triple_left(&d, &w), triple_right(&d, &w));
    }

    #[test]
    fn derivation_is_twisted_leibniz(k in 0usize..3, g in 0u16..6, x in words(), y in words()) {
        let d = datum(k);
        let g = g % d.generator_count() as u16;
        let (x, y) = (word(&d, &x), word(&d, &y));
        let one = d.field().one();
        let fx = FreeElement::word(Side::F, x.clone(), one.clone());
        let fy = FreeElement::word(Side::F, y.clone(), one.clone());
        let lhs = e_derivation(&d, g, &fx.concat(&fy).unwrap());
        let twist: i64 = x.letters().iter().map(|&h| d.gen_q_exponent(g, h)).sum();
        let rhs = e_derivation(&d, g, &fx).concat(&fy).unwrap()
            .add(&fx.concat(&e_derivation(&d, g, &fy)).unwrap().scale(&d.field().q_power(twist)))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_is_multiplicative_in_r(k in 0usize..3, r in words(), r2 in words(), s in prop::collection::vec(0u16..6, 0..5)) {
        // τ(r r', s) = Σ β τ(r, s_(2)) τ(r', s_(1)) over Δ(s) = Σ β s_(1) ⊗ s_(2)
        let d = datum(k);
        let (r, r2, s) = (word(&d, &r), word(&d, &r2), word(&d, &s));
        let lhs = tau_derivation(&d, &r.concat(&r2), &s);
        let mut rhs = d.field().zero();
        for ((a, b), beta) in braided_coproduct(&d, &s).terms {
            rhs += &(&(&beta * &tau_derivation(&d, &r, &b)) * &tau_derivation(&d, &r2, &a));
        }
        prop_assert_eq!(lhs, rhs);
    }
}

fn letters() -> impl Strategy<Value = Vec<(bool, u16)>> {
    prop::collection::vec((any::<bool>(), 0u16..6), 0..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn straightening_is_confluent(k in 1usize..3, raw in letters()) {
        let d = datum(k);
        let n = Nichols::new(d.clone(), 6);
        let b = Boson::new(&n);
        let g = d.generator_count() as u16;
        let w: Vec<Letter> = raw.iter().map(|&(f, x)| if f { Letter::F(x % g) } else { Letter::E(x % g) }).collect();
        let a = b.straighten_rewriting(&w, Order::Leftmost).unwrap();
        let c = b.straighten_rewriting(&w, Order::Rightmost).unwrap();
        prop_assert_eq!(&a, &c);
        prop_assert_eq!(b.straighten(&w).unwrap(), a);
    }

    #[test]
    fn rho_is_an_action(k in 0usize..2, x in letters(), y in letters(), r in words()) {
        let d = datum(k);
        let n = Nichols::new(d.clone(), 10);
        let b = Boson::new(&n);
        let g = d.generator_count() as u16;
        let to = |raw: &[(bool, u16)]| -> Vec<Letter> {
            raw.iter().take(3).map(|&(f, x)| if f { Letter::F(x % g) } else { Letter::E(x % g) }).collect()
        };
        let beta = b.straighten(&to(&x)).unwrap();
        let beta2 = b.straighten(&to(&y)).unwrap();
        let r = n.element(Side::F, &word(&d, &r)).unwrap();
        let lhs = b.rho_apply(&b.multiply(&beta, &beta2).unwrap(), &r).unwrap();
        let rhs = b.rho_apply(&beta, &b.rho_apply(&beta2, &r).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn normal_form_is_idempotent(k in 0usize..3, raw in prop::collection::vec(words(), 1..4)) {
        let d = datum(k);
        let n = Nichols::new(d.clone(), 6);
        let mut x = FreeElement::zero(Side::F);
        for (i, w) in raw.iter().enumerate() {
            x.add_term(word(&d, w), d.field().integer(i as i64 + 1));
        }
        let once = n.normal_form(&x).unwrap();
        prop_assert_eq!(n.normal_form(once.lift()).unwrap(), once);
    }
}

#[test]
fn boson_unit_is_neutral() {
    let d = a2();
    let n = Nichols::new(d.clone(), 4);
    let b = Boson::new(&n);
    let x = b.straighten(&[Letter::E(1), Letter::F(0), Letter::F(1)]).unwrap();
    assert_eq!(b.multiply(&x, &BosonElement::one(&d)).unwrap(), x);
    assert_eq!(b.multiply(&BosonElement::one(&d), &x).unwrap(), x);
}
