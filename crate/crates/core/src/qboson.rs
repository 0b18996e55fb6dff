//! The smash product `B = R # S`: normal-form arithmetic, the Verma action
//! on `R`, truncation ideals and truncated extremal projectors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::freebraided::{e_derivation_word, s_action, FreeElement, Multidegree, Side, Word};
use crate::nichols::{Nichols, NicholsElement};
use crate::scalars::FieldElement;

/// Finite sum of `c * (r # s)` with `r`, `s` Nichols basis words.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BosonElement {
    terms: BTreeMap<(Word, Word), FieldElement>,
}

impl BosonElement {
    pub fn zero() -> BosonElement {
        BosonElement::default()
    }

    pub fn one(d: &CartanDatum) -> BosonElement {
        BosonElement::monomial(Word::empty(), Word::empty(), d.field().one())
    }

    pub fn monomial(r: Word, s: Word, c: FieldElement) -> BosonElement {
        let mut out = BosonElement::zero();
        out.add_term(r, s, c);
        out
    }

    /// `x # y` for Nichols elements on the respective sides.
    pub fn smash(x: &NicholsElement, y: &NicholsElement) -> BosonElement {
        let mut out = BosonElement::zero();
        for (a, s) in x.terms() {
            for (b, t) in y.terms() {
                out.add_term(a.clone(), b.clone(), s * t);
            }
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<(Word, Word), FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, r: &Word, s: &Word) -> Option<&FieldElement> {
        self.terms.get(&(r.clone(), s.clone()))
    }

    pub fn add_term(&mut self, r: Word, s: Word, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let key = (r, s);
        match self.terms.get_mut(&key) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &BosonElement) -> BosonElement {
        let mut out = self.clone();
        for ((r, s), c) in &other.terms {
            out.add_term(r.clone(), s.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BosonElement) -> BosonElement {
        let mut out = self.clone();
        for ((r, s), c) in &other.terms {
            out.add_term(r.clone(), s.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> BosonElement {
        let mut out = BosonElement::zero();
        for ((r, s), a) in &self.terms {
            out.add_term(r.clone(), s.clone(), a * c);
        }
        out
    }

    /// Keep only the monomials surviving modulo `m`.
    pub fn reduce(&self, d: &CartanDatum, m: &Modulus) -> BosonElement {
        BosonElement {
            terms: self
                .terms
                .iter()
                .filter(|((_, s), _)| m.keeps(d, s))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drop every monomial containing a letter whose index is outside `support`.
    pub fn restrict_support(&self, d: &CartanDatum, support: &[usize]) -> BosonElement {
        let inside = |w: &Word| w.letters().iter().all(|&g| support.contains(&d.index_of(g)));
        BosonElement {
            terms: self
                .terms
                .iter()
                .filter(|((r, s), _)| inside(r) && inside(s))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest S-degree among the monomials.
    pub fn s_degree(&self) -> usize {
        self.terms.keys().map(|(_, s)| s.len()).max().unwrap_or(0)
    }

    pub fn render_term(d: &CartanDatum, r: &Word, s: &Word, c: &FieldElement) -> String {
        format!("({})*{}#{}", c, render_word(d, r, Side::F), render_word(d, s, Side::E))
    }

    pub fn render(&self, d: &CartanDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((r, s), c)| BosonElement::render_term(d, r, s, c))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_serial(&self, d: &CartanDatum) -> Vec<BosonTerm> {
        self.terms
            .iter()
            .map(|((r, s), c)| BosonTerm {
                r: r.letters().iter().map(|&g| d.generator_name(g)).collect(),
                s: s.letters().iter().map(|&g| d.generator_name(g)).collect(),
                coeff: c.canonical(),
            })
            .collect()
    }

    pub fn from_serial(d: &CartanDatum, terms: &[BosonTerm]) -> Result<BosonElement> {
        let field = d.field();
        let names: BTreeMap<String, u16> = (0..d.generator_count() as u16)
            .map(|g| (d.generator_name(g), g))
            .collect();
        let word = |v: &[String]| -> Result<Word> {
            v.iter()
                .map(|n| {
                    names
                        .get(n)
                        .copied()
                        .ok_or_else(|| Error::Parse(format!("unknown generator `{n}`")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Word)
        };
        let mut out = BosonElement::zero();
        for t in terms {
            out.add_term(word(&t.r)?, word(&t.s)?, field.parse(&t.coeff)?);
        }
        Ok(out)
    }
}

fn render_word(d: &CartanDatum, w: &Word, side: Side) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.render(d, side)
    }
}

/// One monomial in serialized form; generators by `label.k` name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BosonTerm {
    pub r: Vec<String>,
    pub s: Vec<String>,
    pub coeff: String,
}

/// A truncation level `(n, F)`; `support` holds sorted simple-root indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationIndex {
    pub n: usize,
    pub support: Vec<usize>,
}

impl TruncationIndex {
    pub fn new(n: usize, mut support: Vec<usize>) -> TruncationIndex {
        support.sort_unstable();
        support.dedup();
        TruncationIndex { n, support }
    }

    pub fn full(d: &CartanDatum, n: usize) -> TruncationIndex {
        TruncationIndex::new(n, (0..d.rank()).collect())
    }

    /// The directed order: `(n, F) <= (l, G)` iff `n <= l` and `F ⊆ G`.
    pub fn le(&self, other: &TruncationIndex) -> bool {
        self.n <= other.n && self.support.iter().all(|i| other.support.contains(i))
    }

    /// Multidegrees `α` with `|α| <= n` and support inside `F`.
    pub fn degrees(&self, rank: usize) -> Vec<Multidegree> {
        Multidegree::up_to(rank, self.n)
            .into_iter()
            .filter(|a| a.within(&self.support))
            .collect()
    }

    /// The ideal `I_{n,F}` itself, as a modulus.
    pub fn ideal(&self) -> Modulus {
        Modulus {
            below: self.n,
            support: self.support.clone(),
        }
    }

    /// The ideal `I_{n+1,F}`.
    pub fn next_ideal(&self) -> Modulus {
        Modulus {
            below: self.n + 1,
            support: self.support.clone(),
        }
    }
}

impl fmt::Display for TruncationIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
        write!(f, "({}, {{{}}})", self.n, s.join(","))
    }
}

/// Truncation ideal: monomials `r # s` with `|s| >= below` or a letter of
/// `s` outside `support` are zero modulo it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulus {
    pub below: usize,
    pub support: Vec<usize>,
}

impl Modulus {
    pub fn keeps(&self, d: &CartanDatum, s: &Word) -> bool {
        s.len() < self.below && s.letters().iter().all(|&g| self.support.contains(&d.index_of(g)))
    }

    fn passes_letter(&self, d: &CartanDatum, g: u16, s_len_after: usize) -> bool {
        s_len_after < self.below && self.support.contains(&d.index_of(g))
    }
}

/// Letters of a formal product in `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    F(u16),
    E(u16),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Arithmetic in `B` on top of a Nichols engine.
pub struct Boson<'a> {
    n: &'a Nichols,
}

impl<'a> Boson<'a> {
    pub fn new(n: &'a Nichols) -> Boson<'a> {
        Boson { n }
    }

    pub fn nichols(&self) -> &'a Nichols {
        self.n
    }

    pub fn datum(&self) -> &'a CartanDatum {
        self.n.datum()
    }

    pub fn one(&self) -> BosonElement {
        BosonElement::one(self.datum())
    }

    pub fn f(&self, g: u16) -> BosonElement {
        BosonElement::monomial(Word::letter(g), Word::empty(), self.datum().field().one())
    }

    pub fn e(&self, g: u16) -> BosonElement {
        BosonElement::monomial(Word::empty(), Word::letter(g), self.datum().field().one())
    }

    /// Moves the e-word `b` to the right of the R-basis word `c`:
    /// `b · c = Σ r · s` with `r` in normal form and `s` a free e-word.
    /// Letters of `b` are pushed in from the right; each either acts on the
    /// R-part as a skew derivation or passes with a braiding factor.
    fn commute(
        &self,
        b: &Word,
        c: &Word,
        tail: usize,
        m: Option<&Modulus>,
    ) -> Result<BTreeMap<(Word, Word), FieldElement>> {
        let d = self.datum();
        let field = d.field();
        let mut cur: BTreeMap<(Word, Word), FieldElement> = BTreeMap::new();
        cur.insert((c.clone(), Word::empty()), field.one());
        for &g in b.letters().iter().rev() {
            let mut next: BTreeMap<(Word, Word), FieldElement> = BTreeMap::new();
            let mut push = |k: (Word, Word), v: FieldElement| {
                if v.is_zero() {
                    return;
                }
                match next.get_mut(&k) {
                    Some(x) => {
                        *x += &v;
                        if x.is_zero() {
                            next.remove(&k);
                        }
                    }
                    None => {
                        next.insert(k, v);
                    }
                }
            };
            for ((r, s), x) in &cur {
                for (w, e) in e_derivation_word(d, g, r) {
                    let coeff = x * &field.q_power(e);
                    for (v, a) in self.n.element(Side::F, &w)?.terms() {
                        push((v.clone(), s.clone()), &coeff * a);
                    }
                }
                if m.is_none_or(|m| m.passes_letter(d, g, s.len() + 1 + tail)) {
                    let exp: i64 = r.letters().iter().map(|&h| d.gen_q_exponent(g, h)).sum();
                    let mut s2 = Vec::with_capacity(s.len() + 1);
                    s2.push(g);
                    s2.extend_from_slice(s.letters());
                    push((r.clone(), Word(s2)), x * &field.q_power(exp));
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Product in `B`, optionally modulo a truncation ideal.  Pruning during
    /// straightening is exact because normal forms preserve multidegree and
    /// the S-part of every monomial only grows as letters pass.
    pub fn multiply_mod(&self, x: &BosonElement, y: &BosonElement, m: Option<&Modulus>) -> Result<BosonElement> {
        let d = self.datum();
        let mut out = BosonElement::zero();
        for ((c, dd), y_c) in &y.terms {
            if let Some(m) = m {
                if !m.keeps(d, dd) {
                    continue;
                }
            }
            for ((a, b), x_c) in &x.terms {
                let coeff = x_c * y_c;
                for ((r, s), k) in self.commute(b, c, dd.len(), m)? {
                    let left = self.n.normal_form(&FreeElement::word(Side::F, a.concat(&r), field_one(d)))?;
                    if left.is_zero() {
                        continue;
                    }
                    let right = self.n.normal_form(&FreeElement::word(Side::E, s.concat(dd), field_one(d)))?;
                    let ck = &coeff * &k;
                    for (u, p) in left.terms() {
                        for (v, t) in right.terms() {
                            out.add_term(u.clone(), v.clone(), &(&ck * p) * t);
                        }
                    }
                }
            }
        }
        Ok(match m {
            Some(m) => out.reduce(d, m),
            None => out,
        })
    }

    pub fn multiply(&self, x: &BosonElement, y: &BosonElement) -> Result<BosonElement> {
        self.multiply_mod(x, y, None)
    }

    /// Normal form of a formal product of generators.
    pub fn straighten(&self, letters: &[Letter]) -> Result<BosonElement> {
        let mut acc = self.one();
        for l in letters {
            let g = match *l {
                Letter::F(g) => self.f(g),
                Letter::E(g) => self.e(g),
            };
            acc = self.multiply(&acc, &g)?;
        }
        Ok(acc)
    }

    /// Independent straightener: rewrites adjacent `e f` pairs one at a time
    /// using only the generator relation, in the order given by `strategy`,
    /// then normal-forms both sides.
    pub fn straighten_rewriting(&self, letters: &[Letter], strategy: Strategy) -> Result<BosonElement> {
        let d = self.datum();
        let field = d.field();
        let mut done: BTreeMap<Vec<Letter>, FieldElement> = BTreeMap::new();
        let mut todo: Vec<(Vec<Letter>, FieldElement)> = vec![(letters.to_vec(), field.one())];
        while let Some((w, c)) = todo.pop() {
            let inversions: Vec<usize> = (0..w.len().saturating_sub(1))
                .filter(|&p| matches!((w[p], w[p + 1]), (Letter::E(_), Letter::F(_))))
                .collect();
            let pos = match strategy {
                Strategy::Leftmost => inversions.first(),
                Strategy::Rightmost => inversions.last(),
            };
            match pos {
                None => {
                    let e = done.entry(w).or_insert_with(|| field.zero());
                    *e += &c;
                }
                Some(&p) => {
                    let (Letter::E(g), Letter::F(h)) = (w[p], w[p + 1]) else {
                        unreachable!()
                    };
                    let mut swapped = w.clone();
                    swapped.swap(p, p + 1);
                    todo.push((swapped, &c * &field.q_power(d.gen_q_exponent(g, h))));
                    if g == h {
                        let mut cut = w.clone();
                        cut.drain(p..p + 2);
                        todo.push((cut, c));
                    }
                }
            }
        }
        let mut out = BosonElement::zero();
        for (w, c) in done {
            if c.is_zero() {
                continue;
            }
            let fs: Vec<u16> = w.iter().filter_map(|l| if let Letter::F(g) = l { Some(*g) } else { None }).collect();
            let es: Vec<u16> = w.iter().filter_map(|l| if let Letter::E(g) = l { Some(*g) } else { None }).collect();
            let x = self.n.normal_form(&FreeElement::word(Side::F, Word(fs), c))?;
            let y = self.n.element(Side::E, &Word(es))?;
            out = out.add(&BosonElement::smash(&x, &y));
        }
        Ok(out)
    }

    /// The Verma action: `ρ(r0 # s)(r) = r0 · (s ▷ r)`.
    pub fn rho_apply(&self, beta: &BosonElement, r: &NicholsElement) -> Result<NicholsElement> {
        let d = self.datum();
        let mut out = FreeElement::zero(Side::F);
        for ((r0, s), c) in &beta.terms {
            let acted = self.n.normal_form(&s_action(d, s, r.lift()))?;
            if acted.is_zero() {
                continue;
            }
            let left = self.n.element(Side::F, r0)?;
            let prod = self.n.multiply(&left, &acted)?;
            debug_assert!(homogeneous_len(r).is_none_or(|l| prod
                .terms()
                .keys()
                .all(|w| w.len() + s.len() == r0.len() + l)));
            for (w, a) in prod.terms() {
                out.add_term(w.clone(), c * a);
            }
        }
        self.n.normal_form(&out)
    }
}

fn homogeneous_len(r: &NicholsElement) -> Option<usize> {
    let mut lens = r.terms().keys().map(|w| w.len());
    let first = lens.next()?;
    lens.all(|l| l == first).then_some(first)
}

fn field_one(d: &CartanDatum) -> FieldElement {
    d.field().one()
}

/// `γ_{n,F}` together with the dual bases it was assembled from.
#[derive(Clone, Debug)]
pub struct ExtremalProjector {
    pub truncation: TruncationIndex,
    pub element: BosonElement,
    /// `(r_p, s_p)` for every `p` in the truncated index set.
    pub pairs: Vec<(Word, FreeElement)>,
}

pub fn build_projector(n: &Nichols, t: &TruncationIndex) -> Result<ExtremalProjector> {
    let d = n.datum();
    if t.support.iter().any(|&i| i >= d.rank()) {
        return Err(Error::Validation(format!("support index out of range in {t}")));
    }
    let mut element = BosonElement::zero();
    let mut pairs = Vec::new();
    for alpha in t.degrees(d.rank()) {
        let dual = n.dual(&alpha)?;
        for (r, s) in dual.r_basis.iter().zip(&dual.s_basis) {
            let rw = r.terms().keys().next().expect("basis word").clone();
            let sr = n.antipode(&n.element(Side::F, &rw)?)?;
            let se = n.normal_form(s)?;
            element = element.add(&BosonElement::smash(&sr, &se));
            pairs.push((rw, s.clone()));
        }
    }
    Ok(ExtremalProjector {
        truncation: t.clone(),
        element,
        pairs,
    })
}

/// Outcome of one certificate check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: String,
    /// `k` in `I_{k,F}`: the congruence holds modulo this ideal.
    pub modulus: usize,
    pub holds: bool,
    /// True when the modulus is `I_0`, i.e. everything is congruent to zero.
    pub vacuous: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectorCertificates {
    pub truncation: TruncationIndex,
    pub idempotent: Certificate,
    pub left_annihilation: Certificate,
    pub right_annihilation: Certificate,
    pub partition_of_unity: Certificate,
}

impl ProjectorCertificates {
    pub fn all(&self) -> [&Certificate; 4] {
        [
            &self.idempotent,
            &self.left_annihilation,
            &self.right_annihilation,
            &self.partition_of_unity,
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.all().iter().all(|c| c.holds)
    }
}

fn certificate(d: &CartanDatum, property: &str, m: &Modulus, residual: &BosonElement) -> Certificate {
    let residual = residual.reduce(d, m);
    Certificate {
        property: property.to_string(),
        modulus: m.below,
        holds: residual.is_zero(),
        vacuous: m.below == 0,
        counterexample: residual
            .terms()
            .iter()
            .next()
            .map(|((r, s), c)| BosonElement::render_term(d, r, s, c)),
    }
}

/// Checks, modulo `I_{n+1,F}`: `γ² ≡ γ`, `e γ ≡ 0` for generators with index
/// in `F`, and `Σ r_p γ s_p ≡ 1`.  Right multiplication by `f'` lowers the
/// S-degree of the truncation ideal by one, so `γ f' ≡ 0` is checked modulo
/// `I_{n,F}`.
pub fn certify_projector(n: &Nichols, p: &ExtremalProjector) -> Result<ProjectorCertificates> {
    certify_element(n, &p.truncation, &p.element, &p.pairs)
}

pub fn certify_element(
    n: &Nichols,
    t: &TruncationIndex,
    gamma: &BosonElement,
    pairs: &[(Word, FreeElement)],
) -> Result<ProjectorCertificates> {
    let b = Boson::new(n);
    let d = n.datum();
    let m1 = t.next_ideal();
    let m0 = t.ideal();

    let sq = b.multiply_mod(gamma, gamma, Some(&m1))?;
    let idempotent = certificate(d, "idempotent", &m1, &sq.sub(gamma));

    let gens: Vec<u16> = (0..d.generator_count() as u16)
        .filter(|&g| t.support.contains(&d.index_of(g)))
        .collect();
    let mut left_first = None;
    for &g in &gens {
        let r = b.multiply_mod(&b.e(g), gamma, Some(&m1))?;
        if !r.is_zero() {
            left_first = Some(r);
            break;
        }
    }
    let left_annihilation = certificate(d, "left_annihilation", &m1, &left_first.unwrap_or_default());

    let mut right_first = None;
    for &g in &gens {
        let r = b.multiply_mod(gamma, &b.f(g), Some(&m0))?;
        if !r.is_zero() {
            right_first = Some(r);
            break;
        }
    }
    let right_annihilation = certificate(d, "right_annihilation", &m0, &right_first.unwrap_or_default());

    // (r_p # 1) γ (1 # s_p) = r_p a # b s_p termwise, no straightening needed.
    let mut sum = BosonElement::zero();
    for (rp, sp) in pairs {
        for ((a, bb), c) in gamma.terms() {
            if bb.len() + rp.len() >= m1.below {
                continue;
            }
            let left = n.normal_form(&FreeElement::word(Side::F, rp.concat(a), c.clone()))?;
            if left.is_zero() {
                continue;
            }
            let right = n.normal_form(&FreeElement::word(Side::E, bb.clone(), d.field().one()).concat(sp)?)?;
            sum = sum.add(&BosonElement::smash(&left, &right));
        }
    }
    let partition_of_unity = certificate(d, "partition_of_unity", &m1, &sum.sub(&b.one()));

    Ok(ProjectorCertificates {
        truncation: t.clone(),
        idempotent,
        left_annihilation,
        right_annihilation,
        partition_of_unity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::samples::*;

    fn w(v: &[u16]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn generator_relation() {
        let n = Nichols::new(sl2(), 6);
        let b = Boson::new(&n);
        let q = sl2().field();
        let x = b.multiply(&b.e(0), &b.f(0)).unwrap();
        let mut expected = BosonElement::monomial(w(&[0]), w(&[0]), q.q_power(-2));
        expected.add_term(Word::empty(), Word::empty(), q.one());
        assert_eq!(x, expected);
        let fe = BosonElement::monomial(w(&[0]), w(&[0]), q.one());
        let y = b.multiply(&fe, &fe).unwrap();
        let mut expected = BosonElement::monomial(w(&[0, 0]), w(&[0, 0]), q.q_power(-2));
        expected.add_term(w(&[0]), w(&[0]), q.one());
        assert_eq!(y, expected);
        assert_eq!(b.multiply(&b.one(), &fe).unwrap(), fe);
    }

    #[test]
    fn rewriting_agrees_with_structured() {
        let n = Nichols::new(a2(), 6);
        let b = Boson::new(&n);
        let word = [Letter::E(0), Letter::E(1), Letter::F(1), Letter::F(0), Letter::E(0), Letter::F(0)];
        let x = b.straighten(&word).unwrap();
        assert_eq!(x, b.straighten_rewriting(&word, Strategy::Leftmost).unwrap());
        assert_eq!(x, b.straighten_rewriting(&word, Strategy::Rightmost).unwrap());
    }

    #[test]
    fn rho_examples() {
        let n = Nichols::new(sl2(), 8);
        let b = Boson::new(&n);
        let q = sl2().field();
        let one = n.one(Side::F);
        assert!(b.rho_apply(&b.e(0), &one).unwrap().is_zero());
        let f2 = BosonElement::monomial(w(&[0, 0]), Word::empty(), q.one());
        assert_eq!(b.rho_apply(&f2, &one).unwrap(), n.element(Side::F, &w(&[0, 0])).unwrap());
        for k in 1..=5usize {
            let fk = n.element(Side::F, &Word(vec![0; k])).unwrap();
            let got = b.rho_apply(&b.e(0), &fk).unwrap();
            let c = q.gauss_integer(k as u32, &q.q_power(-2));
            assert_eq!(got, n.element(Side::F, &Word(vec![0; k - 1])).unwrap().scale(&c));
        }
    }

    #[test]
    fn sl2_gamma_two() {
        let n = Nichols::new(sl2(), 6);
        let q = sl2().field();
        let p = build_projector(&n, &TruncationIndex::new(2, vec![0])).unwrap();
        let mut expected = BosonElement::one(&sl2());
        expected.add_term(w(&[0]), w(&[0]), -q.one());
        let c = &q.q_power(-2) * &(&q.one() + &q.q_power(-2)).inv().unwrap();
        expected.add_term(w(&[0, 0]), w(&[0, 0]), c);
        assert_eq!(p.element, expected);
        let cert = certify_projector(&n, &p).unwrap();
        assert!(cert.all_hold(), "{cert:?}");
        assert_eq!(cert.idempotent.modulus, 3);
        assert_eq!(cert.right_annihilation.modulus, 2);
    }

    #[test]
    fn degenerate_level() {
        let n = Nichols::new(sl2(), 4);
        let p = build_projector(&n, &TruncationIndex::new(0, vec![0])).unwrap();
        assert_eq!(p.element, BosonElement::one(&sl2()));
        let cert = certify_projector(&n, &p).unwrap();
        assert!(cert.idempotent.holds);
        assert!(cert.right_annihilation.vacuous);
        assert_eq!(cert.left_annihilation.modulus, 1);
    }

    #[test]
    fn right_annihilation_fails_one_level_up() {
        // γ_2 f' has a surviving S-degree-2 term, so the congruence is
        // genuinely only modulo I_2.
        let n = Nichols::new(sl2(), 6);
        let b = Boson::new(&n);
        let p = build_projector(&n, &TruncationIndex::new(2, vec![0])).unwrap();
        let x = b.multiply(&p.element, &b.f(0)).unwrap();
        let m3 = TruncationIndex::new(2, vec![0]).next_ideal();
        assert!(!x.reduce(&sl2(), &m3).is_zero());
    }

    #[test]
    fn a2_gamma_one() {
        let n = Nichols::new(a2(), 4);
        let q = a2().field();
        let p = build_projector(&n, &TruncationIndex::new(1, vec![0, 1])).unwrap();
        let mut expected = BosonElement::one(&a2());
        expected.add_term(w(&[0]), w(&[0]), -q.one());
        expected.add_term(w(&[1]), w(&[1]), -q.one());
        assert_eq!(p.element, expected);
    }

    #[test]
    fn serial_round_trip() {
        let d = a2();
        let n = Nichols::new(d.clone(), 6);
        let p = build_projector(&n, &TruncationIndex::new(2, vec![0, 1])).unwrap();
        let s = p.element.to_serial(&d);
        assert_eq!(BosonElement::from_serial(&d, &s).unwrap(), p.element);
    }

    #[test]
    fn directed_order() {
        let a = TruncationIndex::new(2, vec![0]);
        let b = TruncationIndex::new(3, vec![1, 0]);
        assert!(a.le(&b));
        assert!(!b.le(&a));
    }
}
