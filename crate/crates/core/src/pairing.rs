//! The skew pairing `tau` between f-words and e-words, evaluated two
//! independent ways, and the per-multidegree Gram blocks whose radicals
//! define the Nichols algebras.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::freebraided::{
    braided_coproduct, e_derivation_word, s_action, words_of_degree, FreeElement, Multidegree,
    Side, Word,
};
use crate::linalg::{greedy_basis, invert, sparse_from_dense, SparseVec};
use crate::scalars::FieldElement;

/// `tau(r, s) = ε(s ▷ r)`.
pub fn tau_derivation(d: &CartanDatum, r: &Word, s: &Word) -> FieldElement {
    let x = FreeElement::word(Side::F, r.clone(), d.field().one());
    s_action(d, s, &x).counit(d)
}

/// Pairing of free elements, bilinear extension of [`tau_derivation`].
pub fn tau_elements(d: &CartanDatum, r: &FreeElement, s: &FreeElement) -> FieldElement {
    let mut acc = d.field().zero();
    for (u, a) in r.terms() {
        for (v, b) in s.terms() {
            if u.len() != v.len() {
                continue;
            }
            let t = tau_derivation(d, u, v);
            if !t.is_zero() {
                acc += &(&(a * b) * &t);
            }
        }
    }
    acc
}

/// Evaluates `tau` through `tau(r, s s') = tau(r_(1), s') tau(r_(2), s)`,
/// recursing on the braided coproduct of `r`, with only the generator
/// pairings `tau(f'_{jl}, e_{ik}) = δ` as input.  Shares no code path with
/// the derivation route beyond the coproduct itself.
#[derive(Default)]
pub struct RecursivePairing {
    memo: HashMap<(Word, Word), FieldElement>,
}

impl RecursivePairing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eval(&mut self, d: &CartanDatum, r: &Word, s: &Word) -> FieldElement {
        let field = d.field();
        match s.len() {
            0 => {
                return if r.is_empty() { field.one() } else { field.zero() };
            }
            1 => {
                return if r.len() == 1 && r.0[0] == s.0[0] {
                    field.one()
                } else {
                    field.zero()
                };
            }
            _ => {}
        }
        let key = (r.clone(), s.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mid = s.len() / 2;
        let head = Word(s.0[..mid].to_vec());
        let tail = Word(s.0[mid..].to_vec());
        let mut acc = field.zero();
        for ((u, v), beta) in braided_coproduct(d, r).terms {
            let a = self.eval(d, &u, &tail);
            if a.is_zero() {
                continue;
            }
            let b = self.eval(d, &v, &head);
            if !b.is_zero() {
                acc += &(&(&beta * &a) * &b);
            }
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}

pub fn tau_recursive(d: &CartanDatum, r: &Word, s: &Word) -> FieldElement {
    RecursivePairing::new().eval(d, r, s)
}

/// All values `tau(r, s)` for fixed `r`, keyed by e-word, computed by
/// peeling the letter that acts first.  Memoized across the words of a block.
struct DerivationTable<'a> {
    d: &'a CartanDatum,
    memo: HashMap<Word, Arc<HashMap<Word, FieldElement>>>,
}

impl<'a> DerivationTable<'a> {
    fn new(d: &'a CartanDatum) -> Self {
        DerivationTable {
            d,
            memo: HashMap::new(),
        }
    }

    fn row(&mut self, r: &Word) -> Arc<HashMap<Word, FieldElement>> {
        if let Some(v) = self.memo.get(r) {
            return v.clone();
        }
        let field = self.d.field();
        let mut out: HashMap<Word, FieldElement> = HashMap::new();
        if r.is_empty() {
            out.insert(Word::empty(), field.one());
        } else {
            let mut letters: Vec<u16> = r.0.clone();
            letters.sort_unstable();
            letters.dedup();
            for g in letters {
                for (w, e) in e_derivation_word(self.d, g, r) {
                    let qe = field.q_power(e);
                    let sub = self.row(&w);
                    for (s, val) in sub.iter() {
                        let mut key = s.0.clone();
                        key.push(g);
                        let t = &qe * val;
                        match out.get_mut(&Word(key.clone())) {
                            Some(x) => *x += &t,
                            None => {
                                out.insert(Word(key), t);
                            }
                        }
                    }
                }
            }
            out.retain(|_, v| !v.is_zero());
        }
        let arc = Arc::new(out);
        self.memo.insert(r.clone(), arc.clone());
        arc
    }
}

/// The Gram matrix of `tau` on the words of one multidegree, together with
/// its greedy row/column bases and radicals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBlock {
    pub alpha: Multidegree,
    /// Row words (f-side) and column words (e-side) coincide as letter lists.
    pub words: Vec<Word>,
    pub entries: Vec<Vec<FieldElement>>,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// Left radical: each vector has coefficient 1 on exactly one non-pivot
    /// row word, all other entries on pivot rows.
    pub left_kernel: Vec<FreeElement>,
    /// Right radical, same shape on the column side.
    pub right_kernel: Vec<FreeElement>,
    rewrite_f: HashMap<Word, Vec<(Word, FieldElement)>>,
    rewrite_e: HashMap<Word, Vec<(Word, FieldElement)>>,
    basis_f: HashSet<Word>,
    basis_e: HashSet<Word>,
}

fn rewrite_table(kernel: &[FreeElement], pivots: &[Word]) -> HashMap<Word, Vec<(Word, FieldElement)>> {
    let mut out = HashMap::new();
    for k in kernel {
        let lead: Vec<&Word> = k.terms().keys().filter(|w| !pivots.contains(w)).collect();
        assert_eq!(lead.len(), 1, "kernel vector not in reduced form");
        let lead = lead[0].clone();
        let rhs = k
            .terms()
            .iter()
            .filter(|(w, _)| **w != lead)
            .map(|(w, c)| (w.clone(), -c))
            .collect();
        out.insert(lead, rhs);
    }
    out
}

impl GramBlock {
    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn dim(&self) -> usize {
        self.rank
    }

    pub fn basis_words(&self, side: Side) -> Vec<Word> {
        let idx = match side {
            Side::F => &self.pivot_rows,
            Side::E => &self.pivot_cols,
        };
        idx.iter().map(|&i| self.words[i].clone()).collect()
    }

    pub fn is_basis_word(&self, side: Side, w: &Word) -> bool {
        match side {
            Side::F => self.basis_f.contains(w),
            Side::E => self.basis_e.contains(w),
        }
    }

    /// Expression of a word of this multidegree in basis words modulo the radical.
    pub fn rewrite(&self, side: Side, w: &Word) -> Vec<(Word, FieldElement)> {
        let table = match side {
            Side::F => &self.rewrite_f,
            Side::E => &self.rewrite_e,
        };
        match table.get(w) {
            Some(v) => v.clone(),
            None => {
                debug_assert!(self.is_basis_word(side, w), "word not in this block");
                vec![]
            }
        }
    }

    pub fn kernel(&self, side: Side) -> &[FreeElement] {
        match side {
            Side::F => &self.left_kernel,
            Side::E => &self.right_kernel,
        }
    }

    /// Assemble a block from its matrix, running the greedy eliminations.
    pub fn from_entries(
        d: &CartanDatum,
        alpha: Multidegree,
        words: Vec<Word>,
        entries: Vec<Vec<FieldElement>>,
    ) -> GramBlock {
        let field = d.field();
        let n = words.len();
        let rows: Vec<SparseVec> = entries.iter().map(|r| sparse_from_dense(r)).collect();
        let cols: Vec<SparseVec> = (0..n)
            .map(|j| sparse_from_dense(&entries.iter().map(|r| r[j].clone()).collect::<Vec<_>>()))
            .collect();
        let rb = greedy_basis(&rows, &field);
        let cb = greedy_basis(&cols, &field);
        assert_eq!(rb.pivots.len(), cb.pivots.len(), "row rank differs from column rank");
        let to_elem = |side: Side, rel: &SparseVec| {
            let mut e = FreeElement::zero(side);
            for (&j, c) in rel {
                e.add_term(words[j].clone(), c.clone());
            }
            e
        };
        let left_kernel: Vec<FreeElement> = rb.relations.iter().map(|(_, r)| to_elem(Side::F, r)).collect();
        let right_kernel: Vec<FreeElement> = cb.relations.iter().map(|(_, r)| to_elem(Side::E, r)).collect();
        GramBlock::assemble(alpha, words, entries, rb.pivots, cb.pivots, left_kernel, right_kernel)
    }

    pub(crate) fn assemble(
        alpha: Multidegree,
        words: Vec<Word>,
        entries: Vec<Vec<FieldElement>>,
        pivot_rows: Vec<usize>,
        pivot_cols: Vec<usize>,
        left_kernel: Vec<FreeElement>,
        right_kernel: Vec<FreeElement>,
    ) -> GramBlock {
        let prw: Vec<Word> = pivot_rows.iter().map(|&i| words[i].clone()).collect();
        let pcw: Vec<Word> = pivot_cols.iter().map(|&i| words[i].clone()).collect();
        let rewrite_f = rewrite_table(&left_kernel, &prw);
        let rewrite_e = rewrite_table(&right_kernel, &pcw);
        let basis_f = prw.into_iter().collect();
        let basis_e = pcw.into_iter().collect();
        GramBlock {
            alpha,
            rank: pivot_rows.len(),
            words,
            entries,
            pivot_rows,
            pivot_cols,
            left_kernel,
            right_kernel,
            rewrite_f,
            rewrite_e,
            basis_f,
            basis_e,
        }
    }
}

/// Compute the Gram block at multidegree `alpha` using the given word order.
pub fn gram_with_order(d: &CartanDatum, alpha: &Multidegree, words: Vec<Word>) -> GramBlock {
    let field = d.field();
    let mut table = DerivationTable::new(d);
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let n = words.len();
    let mut entries = vec![vec![field.zero(); n]; n];
    for (u, r) in words.iter().enumerate() {
        let row = table.row(r);
        for (s, v) in row.iter() {
            let j = *index.get(s).expect("derivation preserves multidegree");
            entries[u][j] = v.clone();
        }
    }
    GramBlock::from_entries(d, alpha.clone(), words, entries)
}

/// The Gram block at `alpha`, refusing degrees above `cap`.
pub fn gram(d: &CartanDatum, alpha: &Multidegree, cap: usize) -> Result<GramBlock> {
    if alpha.total() > cap {
        return Err(Error::DegreeCapExceeded {
            degree: alpha.total(),
            cap,
        });
    }
    Ok(gram_with_order(d, alpha, words_of_degree(d, alpha)))
}

/// Mutually dual bases of `R(alpha)` and `S(alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasisPair {
    pub alpha: Multidegree,
    pub r_basis: Vec<FreeElement>,
    pub s_basis: Vec<FreeElement>,
    pub certified: bool,
}

impl DualBasisPair {
    pub fn len(&self) -> usize {
        self.r_basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_basis.is_empty()
    }
}

/// `r_p` are the pivot row words; `s_q` combine pivot column words through
/// the inverse of the pivot submatrix.  `tau(r_p, s_q) = δ_pq` is then
/// re-verified from scratch.
pub fn dual_bases(d: &CartanDatum, block: &GramBlock) -> Result<DualBasisPair> {
    let field = d.field();
    let r = block.rank;
    let sub: Vec<Vec<FieldElement>> = block
        .pivot_rows
        .iter()
        .map(|&i| block.pivot_cols.iter().map(|&j| block.entries[i][j].clone()).collect())
        .collect();
    let inv = invert(&sub, &field).ok_or_else(|| Error::SingularPivot(block.alpha.to_string()))?;
    let r_basis: Vec<FreeElement> = block
        .pivot_rows
        .iter()
        .map(|&i| FreeElement::word(Side::F, block.words[i].clone(), field.one()))
        .collect();
    let s_basis: Vec<FreeElement> = (0..r)
        .map(|q| {
            let mut e = FreeElement::zero(Side::E);
            for (v, &j) in block.pivot_cols.iter().enumerate() {
                e.add_term(block.words[j].clone(), inv[v][q].clone());
            }
            e
        })
        .collect();
    let mut certified = true;
    'outer: for (p, rp) in r_basis.iter().enumerate() {
        for (q, sq) in s_basis.iter().enumerate() {
            let t = tau_elements(d, rp, sq);
            let ok = if p == q { t.is_one() } else { t.is_zero() };
            if !ok {
                certified = false;
                break 'outer;
            }
        }
    }
    if !certified {
        return Err(Error::SingularPivot(block.alpha.to_string()));
    }
    Ok(DualBasisPair {
        alpha: block.alpha.clone(),
        r_basis,
        s_basis,
        certified,
    })
}

/// Serializable form of a Gram block (scalars as canonical strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramRecord {
    pub alpha: Multidegree,
    pub words: Vec<Word>,
    pub entries: Vec<Vec<String>>,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    pub left_kernel: Vec<BTreeMap<usize, String>>,
    pub right_kernel: Vec<BTreeMap<usize, String>>,
}

impl GramRecord {
    pub fn from_block(b: &GramBlock) -> GramRecord {
        let index: HashMap<&Word, usize> = b.words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let kern = |k: &[FreeElement]| -> Vec<BTreeMap<usize, String>> {
            k.iter()
                .map(|e| e.terms().iter().map(|(w, c)| (index[w], c.canonical())).collect())
                .collect()
        };
        GramRecord {
            alpha: b.alpha.clone(),
            words: b.words.clone(),
            entries: b
                .entries
                .iter()
                .map(|row| row.iter().map(|c| c.canonical()).collect())
                .collect(),
            rank: b.rank,
            pivot_rows: b.pivot_rows.clone(),
            pivot_cols: b.pivot_cols.clone(),
            left_kernel: kern(&b.left_kernel),
            right_kernel: kern(&b.right_kernel),
        }
    }

    pub fn into_block(self, d: &CartanDatum) -> Result<GramBlock> {
        let field = d.field();
        let n = self.words.len();
        if self.entries.len() != n || self.entries.iter().any(|r| r.len() != n) {
            return Err(Error::Cache("gram record has inconsistent shape".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let kern = |k: &[BTreeMap<usize, String>], side: Side| -> Result<Vec<FreeElement>> {
            k.iter()
                .map(|m| {
                    let mut e = FreeElement::zero(side);
                    for (&i, s) in m {
                        let w = self
                            .words
                            .get(i)
                            .ok_or_else(|| Error::Cache("kernel index out of range".into()))?;
                        e.add_term(w.clone(), field.parse(s)?);
                    }
                    Ok(e)
                })
                .collect()
        };
        let left = kern(&self.left_kernel, Side::F)?;
        let right = kern(&self.right_kernel, Side::E)?;
        if self.pivot_rows.len() != self.rank || self.pivot_cols.len() != self.rank {
            return Err(Error::Cache("gram record rank mismatch".into()));
        }
        Ok(GramBlock::assemble(
            self.alpha,
            self.words,
            entries,
            self.pivot_rows,
            self.pivot_cols,
            left,
            right,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::samples::*;

    fn w(v: &[u16]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn generator_pairing_is_kronecker() {
        let d = borcherds();
        for a in 0..3u16 {
            for b in 0..3u16 {
                let t = tau_derivation(&d, &w(&[a]), &w(&[b]));
                assert_eq!(t.is_one(), a == b);
                assert_eq!(t.is_zero(), a != b);
            }
        }
    }

    #[test]
    fn sl2_square_pairing() {
        let d = sl2();
        let q = d.field();
        let expected = &q.gauss_integer(1, &q.q_power(-2)) * &q.gauss_integer(2, &q.q_power(-2));
        assert_eq!(tau_derivation(&d, &w(&[0, 0]), &w(&[0, 0])), expected);
        assert_eq!(tau_recursive(&d, &w(&[0, 0]), &w(&[0, 0])), expected);
    }

    #[test]
    fn degree_mismatch_vanishes() {
        let d = a2();
        assert!(tau_derivation(&d, &w(&[0]), &w(&[0, 1])).is_zero());
        assert!(tau_recursive(&d, &w(&[0]), &w(&[0, 1])).is_zero());
    }

    #[test]
    fn recursive_examples() {
        let d = a2();
        let q = d.field();
        assert!(tau_recursive(&d, &Word::empty(), &Word::empty()).is_one());
        assert_eq!(tau_recursive(&d, &w(&[0, 1]), &w(&[0, 1])), q.q_power(1));
        assert_eq!(tau_recursive(&d, &w(&[1, 0]), &w(&[1, 0])), q.q_power(1));
    }

    #[test]
    fn a2_gram_11() {
        let d = a2();
        let q = d.field();
        let b = gram(&d, &Multidegree(vec![1, 1]), 8).unwrap();
        assert_eq!(b.words, vec![w(&[0, 1]), w(&[1, 0])]);
        assert_eq!(b.entries, vec![vec![q.q_power(1), q.one()], vec![q.one(), q.q_power(1)]]);
        assert_eq!(b.rank, 2);
        assert!(b.left_kernel.is_empty());
    }

    #[test]
    fn a2_gram_21_has_serre_kernel() {
        let d = a2();
        let q = d.field();
        let b = gram(&d, &Multidegree(vec![2, 1]), 8).unwrap();
        assert_eq!(b.size(), 3);
        assert_eq!(b.rank, 2);
        assert_eq!(b.left_kernel.len(), 1);
        // f1 f1 f2 - (q + q^-1) f1 f2 f1 + f2 f1 f1, up to normalization
        let k = &b.left_kernel[0];
        let c0 = k.coeff(&w(&[0, 0, 1])).unwrap().clone();
        let c1 = k.coeff(&w(&[0, 1, 0])).unwrap().clone();
        let c2 = k.coeff(&w(&[1, 0, 0])).unwrap().clone();
        assert_eq!(c0, c2);
        let qq = &q.q_power(1) + &q.q_power(-1);
        assert_eq!(c1, -(&qq * &c0));
    }

    #[test]
    fn borcherds_gram_02() {
        let d = borcherds();
        let q = d.field();
        let b = gram(&d, &Multidegree(vec![0, 2]), 8).unwrap();
        assert_eq!(b.size(), 4);
        assert_eq!(b.rank, 3);
        assert_eq!(b.left_kernel.len(), 1);
        let k = &b.left_kernel[0];
        assert_eq!(k.terms().len(), 2);
        // generators 1, 2 are f'_{2,1}, f'_{2,2}
        let a = k.coeff(&w(&[1, 2])).unwrap();
        let c = k.coeff(&w(&[2, 1])).unwrap();
        assert_eq!(a, &-c);
        assert!(!a.is_zero());
        let _ = q;
    }

    #[test]
    fn cap_is_enforced() {
        let d = sl2();
        assert!(matches!(
            gram(&d, &Multidegree(vec![5]), 4),
            Err(Error::DegreeCapExceeded { degree: 5, cap: 4 })
        ));
    }

    #[test]
    fn dual_bases_sl2() {
        let d = sl2();
        let q = d.field();
        for n in 1..=5usize {
            let b = gram(&d, &Multidegree(vec![n as u32]), 8).unwrap();
            let pair = dual_bases(&d, &b).unwrap();
            assert!(pair.certified);
            let mut c = q.one();
            for t in 1..=n as u32 {
                c = &c * &q.gauss_integer(t, &q.q_power(-2));
            }
            let expected = FreeElement::word(Side::E, Word(vec![0; n]), c.inv().unwrap());
            assert_eq!(pair.s_basis[0], expected);
        }
    }

    #[test]
    fn dual_bases_rank_zero_is_empty() {
        let d = sl2_root_of_unity(3);
        let b = gram(&d, &Multidegree(vec![3]), 8).unwrap();
        assert_eq!(b.rank, 0);
        assert!(dual_bases(&d, &b).unwrap().is_empty());
    }

    #[test]
    fn dual_bases_a2_11() {
        let d = a2();
        let b = gram(&d, &Multidegree(vec![1, 1]), 8).unwrap();
        let pair = dual_bases(&d, &b).unwrap();
        assert_eq!(pair.len(), 2);
        for (p, r) in pair.r_basis.iter().enumerate() {
            for (q, s) in pair.s_basis.iter().enumerate() {
                let t = tau_elements(&d, r, s);
                assert_eq!(t.is_one(), p == q);
                assert_eq!(t.is_zero(), p != q);
            }
        }
    }

    #[test]
    fn record_round_trip() {
        let d = a2();
        let b = gram(&d, &Multidegree(vec![2, 2]), 8).unwrap();
        let rec = GramRecord::from_block(&b);
        let json = serde_json::to_string(&rec).unwrap();
        let back: GramRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_block(&d).unwrap(), b);
    }
}
