//! The Nichols algebras `R` (f-side) and `S` (e-side) as Gram quotients of
//! the free algebras: normal forms, product, coproduct, antipode, dimensions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use rayon::prelude::*;

use crate::cache::GramCache;
use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::freebraided::{braided_coproduct, FreeElement, Multidegree, Side, Tensor, Word};
use crate::linalg::{rank_of, SparseVec};
use crate::pairing::{dual_bases, gram, DualBasisPair, GramBlock};
use crate::scalars::FieldElement;

/// Element of `R` or `S`, supported on basis words only.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NicholsElement(FreeElement);

impl NicholsElement {
    pub fn zero(side: Side) -> NicholsElement {
        NicholsElement(FreeElement::zero(side))
    }

    pub fn side(&self) -> Side {
        self.0.side()
    }

    pub fn terms(&self) -> &BTreeMap<Word, FieldElement> {
        self.0.terms()
    }

    pub fn lift(&self) -> &FreeElement {
        &self.0
    }

    pub fn into_lift(self) -> FreeElement {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn coeff(&self, w: &Word) -> Option<&FieldElement> {
        self.0.coeff(w)
    }

    pub fn add(&self, other: &NicholsElement) -> Result<NicholsElement> {
        self.0.add(&other.0).map(NicholsElement)
    }

    pub fn scale(&self, c: &FieldElement) -> NicholsElement {
        NicholsElement(self.0.scale(c))
    }

    pub fn neg(&self) -> NicholsElement {
        NicholsElement(self.0.neg())
    }

    pub fn render(&self, d: &CartanDatum) -> String {
        self.0.render(d)
    }
}

/// Lazily built per-multidegree data for one datum under a hard degree cap.
pub struct Nichols {
    datum: CartanDatum,
    cap: usize,
    cache: Option<GramCache>,
    blocks: RwLock<HashMap<Multidegree, Arc<GramBlock>>>,
    duals: RwLock<HashMap<Multidegree, Arc<DualBasisPair>>>,
    antipodes: Mutex<HashMap<(Side, Word), NicholsElement>>,
}

impl Nichols {
    pub fn new(datum: CartanDatum, cap: usize) -> Nichols {
        Nichols {
            datum,
            cap,
            cache: None,
            blocks: RwLock::new(HashMap::new()),
            duals: RwLock::new(HashMap::new()),
            antipodes: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cache(mut self, cache: Option<GramCache>) -> Nichols {
        self.cache = cache;
        self
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_cap(&self, degree: usize) -> Result<()> {
        if degree > self.cap {
            Err(Error::DegreeCapExceeded { degree, cap: self.cap })
        } else {
            Ok(())
        }
    }

    pub fn block(&self, alpha: &Multidegree) -> Result<Arc<GramBlock>> {
        self.check_cap(alpha.total())?;
        if let Some(b) = self.blocks.read().unwrap().get(alpha) {
            return Ok(b.clone());
        }
        let block = match self.cache.as_ref().and_then(|c| c.load(&self.datum, alpha)) {
            Some(b) => b,
            None => {
                let b = gram(&self.datum, alpha, self.cap)?;
                if let Some(c) = &self.cache {
                    c.store(&self.datum, &b)?;
                }
                b
            }
        };
        let mut map = self.blocks.write().unwrap();
        Ok(map.entry(alpha.clone()).or_insert_with(|| Arc::new(block)).clone())
    }

    pub fn dual(&self, alpha: &Multidegree) -> Result<Arc<DualBasisPair>> {
        if let Some(p) = self.duals.read().unwrap().get(alpha) {
            return Ok(p.clone());
        }
        let block = self.block(alpha)?;
        let pair = dual_bases(&self.datum, &block)?;
        let mut map = self.duals.write().unwrap();
        Ok(map.entry(alpha.clone()).or_insert_with(|| Arc::new(pair)).clone())
    }

    pub fn dim(&self, alpha: &Multidegree) -> Result<usize> {
        Ok(self.block(alpha)?.rank)
    }

    pub fn basis(&self, side: Side, alpha: &Multidegree) -> Result<Vec<Word>> {
        Ok(self.block(alpha)?.basis_words(side))
    }

    /// Basis words of all degrees `<= n`, in word order.
    pub fn basis_up_to(&self, side: Side, n: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for alpha in Multidegree::up_to(self.datum.rank(), n) {
            out.extend(self.basis(side, &alpha)?);
        }
        out.sort();
        Ok(out)
    }

    /// `dim R(α)` for every `|α| <= cap`, blocks computed in parallel.
    pub fn hilbert_data(&self, cap: usize) -> Result<BTreeMap<Multidegree, usize>> {
        self.check_cap(cap)?;
        let alphas = Multidegree::up_to(self.datum.rank(), cap);
        let dims: Vec<Result<usize>> = alphas.par_iter().map(|a| self.dim(a)).collect();
        alphas
            .into_iter()
            .zip(dims)
            .map(|(a, r)| r.map(|n| (a, n)))
            .collect()
    }

    pub fn element(&self, side: Side, w: &Word) -> Result<NicholsElement> {
        self.normal_form(&FreeElement::word(side, w.clone(), self.datum.field().one()))
    }

    pub fn one(&self, side: Side) -> NicholsElement {
        NicholsElement(FreeElement::one(&self.datum, side))
    }

    fn nf_word_into(&self, side: Side, w: &Word, c: &FieldElement, out: &mut FreeElement) -> Result<()> {
        self.check_cap(w.len())?;
        if w.len() <= 1 {
            out.add_term(w.clone(), c.clone());
            return Ok(());
        }
        let block = self.block(&w.multidegree(&self.datum))?;
        if block.is_basis_word(side, w) {
            out.add_term(w.clone(), c.clone());
        } else {
            for (v, a) in block.rewrite(side, w) {
                out.add_term(v, c * &a);
            }
        }
        Ok(())
    }

    /// Projection of a free element onto the basis words, along the radical.
    pub fn normal_form(&self, x: &FreeElement) -> Result<NicholsElement> {
        let mut out = FreeElement::zero(x.side());
        for (w, c) in x.terms() {
            self.nf_word_into(x.side(), w, c, &mut out)?;
        }
        Ok(NicholsElement(out))
    }

    pub fn multiply(&self, x: &NicholsElement, y: &NicholsElement) -> Result<NicholsElement> {
        if x.side() != y.side() {
            return Err(Error::SideMismatch);
        }
        let side = x.side();
        let mut out = FreeElement::zero(side);
        for (a, s) in x.terms() {
            for (b, t) in y.terms() {
                self.nf_word_into(side, &a.concat(b), &(s * t), &mut out)?;
            }
        }
        Ok(NicholsElement(out))
    }

    /// Normal form of both legs of a tensor whose legs are free words.
    pub fn normal_form_tensor(&self, side: Side, t: &Tensor) -> Result<Tensor> {
        let mut out = Tensor::default();
        for ((u, v), c) in &t.terms {
            let nu = self.normal_form(&FreeElement::word(side, u.clone(), c.clone()))?;
            if nu.is_zero() {
                continue;
            }
            let nv = self.element(side, v)?;
            for (a, x) in nu.terms() {
                for (b, y) in nv.terms() {
                    out.add_term(a.clone(), b.clone(), x * y);
                }
            }
        }
        Ok(out)
    }

    /// `Δ(x)` with both legs in basis form.
    pub fn coproduct(&self, x: &NicholsElement) -> Result<Tensor> {
        let mut free = Tensor::default();
        for (w, c) in x.terms() {
            for ((u, v), b) in braided_coproduct(&self.datum, w).terms {
                free.add_term(u, v, c * &b);
            }
        }
        self.normal_form_tensor(x.side(), &free)
    }

    /// Braided antipode on a basis word, by the recursion coming from
    /// `m(S ⊗ id)Δ = ηε`.
    fn antipode_word(&self, side: Side, w: &Word) -> Result<NicholsElement> {
        if w.is_empty() {
            return Ok(self.one(side));
        }
        if let Some(v) = self.antipodes.lock().unwrap().get(&(side, w.clone())) {
            return Ok(v.clone());
        }
        let mut acc = FreeElement::zero(side);
        for ((u, v), beta) in braided_coproduct(&self.datum, w).terms {
            if u.len() == w.len() {
                continue;
            }
            let su = self.antipode(&self.element(side, &u)?)?;
            if su.is_zero() {
                continue;
            }
            let nv = self.element(side, &v)?;
            let prod = self.multiply(&su, &nv)?;
            for (a, c) in prod.terms() {
                acc.add_term(a.clone(), -(&beta * c));
            }
        }
        let out = NicholsElement(acc);
        self.antipodes
            .lock()
            .unwrap()
            .insert((side, w.clone()), out.clone());
        Ok(out)
    }

    pub fn antipode(&self, x: &NicholsElement) -> Result<NicholsElement> {
        let mut out = FreeElement::zero(x.side());
        for (w, c) in x.terms() {
            for (v, a) in self.antipode_word(x.side(), w)?.terms() {
                out.add_term(v.clone(), c * a);
            }
        }
        Ok(NicholsElement(out))
    }

    /// Every radical vector at `alpha`, on both sides, is killed by
    /// multiplication with any generator on either side.
    pub fn verify_ideal(&self, alpha: &Multidegree) -> Result<bool> {
        let block = self.block(alpha)?;
        for side in [Side::F, Side::E] {
            for v in block.kernel(side) {
                for g in 0..self.datum.generator_count() as u16 {
                    let gen = FreeElement::generator(&self.datum, side, g);
                    if !self.normal_form(&gen.concat(v)?)?.is_zero()
                        || !self.normal_form(&v.concat(&gen)?)?.is_zero()
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The coproduct of every radical vector at `alpha` vanishes after
    /// normal-forming both legs.
    pub fn verify_coideal(&self, alpha: &Multidegree) -> Result<bool> {
        let block = self.block(alpha)?;
        for side in [Side::F, Side::E] {
            for v in block.kernel(side) {
                let mut free = Tensor::default();
                for (w, c) in v.terms() {
                    for ((a, b), beta) in braided_coproduct(&self.datum, w).terms {
                        free.add_term(a, b, c * &beta);
                    }
                }
                if !self.normal_form_tensor(side, &free)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Dimension of the space of primitive elements in `R(alpha)` (or `S(alpha)`).
    pub fn primitive_dimension(&self, side: Side, alpha: &Multidegree) -> Result<usize> {
        let basis = self.basis(side, alpha)?;
        if alpha.is_zero() {
            return Ok(0);
        }
        let one = self.datum.field().one();
        let mut keys: BTreeMap<(Word, Word), usize> = BTreeMap::new();
        let mut vectors = Vec::new();
        for w in &basis {
            let mut t = self.coproduct(&self.element(side, w)?)?;
            t.add_term(w.clone(), Word::empty(), -one.clone());
            t.add_term(Word::empty(), w.clone(), -one.clone());
            let mut v = SparseVec::new();
            for (k, c) in t.terms {
                let n = keys.len();
                let i = *keys.entry(k).or_insert(n);
                v.insert(i, c);
            }
            vectors.push(v);
        }
        Ok(basis.len() - rank_of(&vectors))
    }

    /// `m(S ⊗ id)Δ(w) = ε(w) = m(id ⊗ S)Δ(w)` for one basis word.
    pub fn verify_antipode(&self, side: Side, w: &Word) -> Result<bool> {
        let x = self.element(side, w)?;
        let delta = self.coproduct(&x)?;
        let mut left = FreeElement::zero(side);
        let mut right = FreeElement::zero(side);
        for ((u, v), c) in &delta.terms {
            let nu = self.element(side, u)?;
            let nv = self.element(side, v)?;
            let l = self.multiply(&self.antipode(&nu)?, &nv)?;
            let r = self.multiply(&nu, &self.antipode(&nv)?)?;
            for (a, y) in l.terms() {
                left.add_term(a.clone(), c * y);
            }
            for (a, y) in r.terms() {
                right.add_term(a.clone(), c * y);
            }
        }
        let expected = if w.is_empty() {
            FreeElement::one(&self.datum, side)
        } else {
            FreeElement::zero(side)
        };
        Ok(left == expected && right == expected)
    }
}
