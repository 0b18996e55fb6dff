//! The free braided algebras `T(V)` and `T(W)`: words in the generators,
//! concatenation, the braided coproduct, and the skew-derivation action of
//! the `e`-generators on `f`-words.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::scalars::FieldElement;

/// Whether letters denote `f'_{ik}` (R side) or `e_{ik}` (S side).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "f")]
    F,
    #[serde(rename = "e")]
    E,
}

impl Side {
    pub fn letter(self) -> &'static str {
        match self {
            Side::F => "f",
            Side::E => "e",
        }
    }
}

/// A word in flat generator ids.  Ordered by length, then lexicographically
/// in the global generator order.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(g: u16) -> Word {
        Word(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn multidegree(&self, d: &CartanDatum) -> Multidegree {
        let mut m = vec![0u32; d.rank()];
        for &g in &self.0 {
            m[d.index_of(g)] += 1;
        }
        Multidegree(m)
    }

    pub fn render(&self, d: &CartanDatum, side: Side) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&g| format!("{}[{}]", side.letter(), d.generator_name(g)))
            .collect::<Vec<_>>()
            .join("")
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{:?}", self.0)
    }
}

/// Element of `N^I`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(pub Vec<u32>);

impl Multidegree {
    pub fn zero(rank: usize) -> Multidegree {
        Multidegree(vec![0; rank])
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Indices with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i).collect()
    }

    pub fn within(&self, support: &[usize]) -> bool {
        self.support().iter().all(|i| support.contains(i))
    }

    /// All multidegrees of rank `rank` with total degree exactly `n`, in
    /// lexicographically decreasing order of entries.
    pub fn of_total(rank: usize, n: usize) -> Vec<Multidegree> {
        fn rec(rank: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Multidegree>) {
            if cur.len() + 1 == rank {
                cur.push(left as u32);
                out.push(Multidegree(cur.clone()));
                cur.pop();
                return;
            }
            for x in (0..=left).rev() {
                cur.push(x as u32);
                rec(rank, left - x, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if rank == 0 {
            if n == 0 {
                out.push(Multidegree(Vec::new()));
            }
            return out;
        }
        rec(rank, n, &mut Vec::new(), &mut out);
        out
    }

    /// All multidegrees with total degree `<= cap`, grouped by total degree.
    pub fn up_to(rank: usize, cap: usize) -> Vec<Multidegree> {
        (0..=cap).flat_map(|n| Multidegree::of_total(rank, n)).collect()
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All words with the given multidegree, in canonical word order.
pub fn words_of_degree(d: &CartanDatum, alpha: &Multidegree) -> Vec<Word> {
    let n = alpha.total();
    let mut remaining: Vec<u32> = alpha.0.clone();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(d: &CartanDatum, n: usize, remaining: &mut [u32], cur: &mut Vec<u16>, out: &mut Vec<Word>) {
        if cur.len() == n {
            out.push(Word(cur.clone()));
            return;
        }
        for g in 0..d.generator_count() as u16 {
            let i = d.index_of(g);
            if remaining[i] > 0 {
                remaining[i] -= 1;
                cur.push(g);
                rec(d, n, remaining, cur, out);
                cur.pop();
                remaining[i] += 1;
            }
        }
    }
    rec(d, n, &mut remaining, &mut cur, &mut out);
    out
}

/// All words of length `<= max_len` over the datum's generators.
pub fn words_up_to(d: &CartanDatum, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..d.generator_count() as u16 {
                let mut v = w.0.clone();
                v.push(g);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Finite linear combination of words, all on one side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeElement {
    side: Side,
    terms: BTreeMap<Word, FieldElement>,
}

impl FreeElement {
    pub fn zero(side: Side) -> FreeElement {
        FreeElement {
            side,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(side: Side, w: Word, c: FieldElement) -> FreeElement {
        let mut e = FreeElement::zero(side);
        e.add_term(w, c);
        e
    }

    pub fn one(d: &CartanDatum, side: Side) -> FreeElement {
        FreeElement::word(side, Word::empty(), d.field().one())
    }

    pub fn generator(d: &CartanDatum, side: Side, g: u16) -> FreeElement {
        FreeElement::word(side, Word::letter(g), d.field().one())
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn terms(&self) -> &BTreeMap<Word, FieldElement> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, FieldElement> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Option<&FieldElement> {
        self.terms.get(w)
    }

    /// Add `c * w`, dropping the entry if it cancels.
    pub fn add_term(&mut self, w: Word, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &FreeElement) -> Result<FreeElement> {
        if self.side != other.side && !self.is_zero() && !other.is_zero() {
            return Err(Error::SideMismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElement) -> FreeElement {
        let mut out = FreeElement::zero(self.side);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn neg(&self) -> FreeElement {
        FreeElement {
            side: self.side,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    /// Bilinear extension of word concatenation.
    pub fn concat(&self, other: &FreeElement) -> Result<FreeElement> {
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        let mut out = FreeElement::zero(self.side);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.concat(b), x * y);
            }
        }
        Ok(out)
    }

    /// Coefficient of the empty word.
    pub fn counit(&self, d: &CartanDatum) -> FieldElement {
        self.terms
            .get(&Word::empty())
            .cloned()
            .unwrap_or_else(|| d.field().zero())
    }

    pub fn render(&self, d: &CartanDatum) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("({})*{}", c, w.render(d, self.side)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Finite sum of `c * (u ⊗ v)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Tensor {
    pub terms: BTreeMap<(Word, Word), FieldElement>,
}

impl Tensor {
    pub fn add_term(&mut self, u: Word, v: Word, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let key = (u, v);
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Braided coproduct of a word: `sum_A beta(A) w_A ⊗ w_{A^c}` with
/// `beta(A) = prod q_{i_a i_b}` over positions `a < b`, `a ∉ A`, `b ∈ A`.
pub fn braided_coproduct(d: &CartanDatum, w: &Word) -> Tensor {
    let n = w.len();
    assert!(n < 32, "word too long for subset enumeration");
    let letters = w.letters();
    let idx: Vec<usize> = letters.iter().map(|&g| d.index_of(g)).collect();
    let field = d.field();
    let mut out = Tensor::default();
    for mask in 0u32..(1u32 << n) {
        let mut exp = 0i64;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for b in 0..n {
            if mask >> b & 1 == 1 {
                left.push(letters[b]);
                for a in 0..b {
                    if mask >> a & 1 == 0 {
                        exp += d.q_exponent(idx[a], idx[b]);
                    }
                }
            } else {
                right.push(letters[b]);
            }
        }
        out.add_term(Word(left), Word(right), field.q_power(exp));
    }
    out
}

/// Coproduct of a free element, extended linearly.
pub fn braided_coproduct_element(d: &CartanDatum, x: &FreeElement) -> Tensor {
    let mut out = Tensor::default();
    for (w, c) in x.terms() {
        for ((u, v), b) in braided_coproduct(d, w).terms {
            out.add_term(u, v, c * &b);
        }
    }
    out
}

/// `e_g ▷ w` for a single word, as `(word, exponent of q)` pairs: letter
/// `p` equal to `g` is deleted with factor `q_{i j_1} ... q_{i j_{p-1}}`.
pub fn e_derivation_word(d: &CartanDatum, g: u16, w: &Word) -> Vec<(Word, i64)> {
    let i = d.index_of(g);
    let mut out = Vec::new();
    let mut exp = 0i64;
    for (p, &h) in w.letters().iter().enumerate() {
        if h == g {
            let mut v = Vec::with_capacity(w.len() - 1);
            v.extend_from_slice(&w.0[..p]);
            v.extend_from_slice(&w.0[p + 1..]);
            out.push((Word(v), exp));
        }
        exp += d.q_exponent(i, d.index_of(h));
    }
    out
}

/// Linear extension of `e_g ▷` to f-side elements.
pub fn e_derivation(d: &CartanDatum, g: u16, r: &FreeElement) -> FreeElement {
    debug_assert_eq!(r.side(), Side::F);
    let field = d.field();
    let mut out = FreeElement::zero(Side::F);
    for (w, c) in r.terms() {
        for (v, e) in e_derivation_word(d, g, w) {
            out.add_term(v, c * &field.q_power(e));
        }
    }
    out
}

/// `s ▷ r` for an e-word `s = e_{g_1} ... e_{g_t}`: the last letter acts first.
pub fn s_action(d: &CartanDatum, s: &Word, r: &FreeElement) -> FreeElement {
    let mut cur = r.clone();
    for &g in s.letters().iter().rev() {
        if cur.is_zero() {
            break;
        }
        cur = e_derivation(d, g, &cur);
    }
    cur
}
