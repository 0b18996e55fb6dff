//! Finite-dimensional left `B`-modules given by matrices: validation against
//! the defining relations, integrability, highest-weight spaces, the map
//! `κ_M`, constructive decomposition through the extremal projector, and the
//! matrix-algebra certificate at roots of unity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cartan::{CartanDatum, GeneratorIndex};
use crate::error::{Error, Result};
use crate::freebraided::{e_derivation_word, Multidegree, Side, Word};
use crate::linalg::{axpy, rank_of, Echelon, Insert, SparseVec};
use crate::nichols::Nichols;
use crate::qboson::{build_projector, Boson, BosonElement, TruncationIndex};
use crate::scalars::{FieldElement, FieldSpec};

/// Matrix stored by columns: `cols[j]` is the image of basis vector `j`.
pub type Matrix = Vec<SparseVec>;

pub fn apply(m: &Matrix, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (&j, c) in v {
        axpy(&mut out, c, &m[j]);
    }
    out
}

fn add_entry(v: &mut SparseVec, i: usize, c: FieldElement) {
    axpy(v, &c, &unit(i, &c.spec()));
}

fn unit(j: usize, field: &FieldSpec) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(j, field.one());
    v
}

fn dense(v: &SparseVec, n: usize, field: &FieldSpec) -> Vec<String> {
    (0..n)
        .map(|i| v.get(&i).cloned().unwrap_or_else(|| field.zero()).canonical())
        .collect()
}

/// Dense row-major rendering of a column-stored matrix.
pub fn matrix_strings(m: &Matrix, rows: usize, field: &FieldSpec) -> Vec<Vec<String>> {
    (0..rows)
        .map(|i| {
            m.iter()
                .map(|c| c.get(&i).cloned().unwrap_or_else(|| field.zero()).canonical())
                .collect()
        })
        .collect()
}

pub fn parse_matrix(rows: &[Vec<String>], ncols: usize, field: &FieldSpec) -> Result<Matrix> {
    let mut cols = vec![SparseVec::new(); ncols];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Validation(format!("matrix row {i} has {} entries, expected {ncols}", row.len())));
        }
        for (j, s) in row.iter().enumerate() {
            let c = field.parse(s)?;
            if !c.is_zero() {
                cols[j].insert(i, c);
            }
        }
    }
    Ok(cols)
}

/// Grading of a truncated module: degree of every basis vector and the top
/// degree `d`.  A relation containing `a` letters `f'` is only required on
/// vectors of degree `<= d - a`, where the truncated action is faithful.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grading {
    pub degrees: Vec<usize>,
    pub top: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDocument {
    pub side: Side,
    pub index: String,
    #[serde(default = "one_k")]
    pub k: u32,
    pub matrix: Vec<Vec<String>>,
}

fn one_k() -> u32 {
    1
}

/// JSON input document for a module.  Generators without an entry act by zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDocument {
    pub dimension: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    pub actions: Vec<ActionDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Grading>,
}

#[derive(Clone, Debug)]
pub struct ModulePresentation {
    datum: CartanDatum,
    dim: usize,
    labels: Vec<String>,
    f: Vec<Matrix>,
    e: Vec<Matrix>,
    grading: Option<Grading>,
}

/// Which relations were checked at load time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub straightening_pairs: usize,
    pub radical_relations: usize,
    /// Relations of degree `>= bound` hold automatically (all words of that
    /// length act by zero) or were not required.
    pub f_bound: usize,
    pub e_bound: usize,
    pub f_nilpotent: bool,
    pub e_nilpotent: bool,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl ModulePresentation {
    pub fn new(
        datum: &CartanDatum,
        labels: Vec<String>,
        f: Vec<Matrix>,
        e: Vec<Matrix>,
        grading: Option<Grading>,
    ) -> Result<ModulePresentation> {
        let dim = labels.len();
        let g = datum.generator_count();
        if f.len() != g || e.len() != g {
            return Err(invalid("one matrix per generator and side is required"));
        }
        for m in f.iter().chain(&e) {
            if m.len() != dim || m.iter().any(|c| c.keys().any(|&i| i >= dim)) {
                return Err(invalid("matrix shape does not match the module dimension"));
            }
        }
        if let Some(gr) = &grading {
            if gr.degrees.len() != dim {
                return Err(invalid("grading must list one degree per basis vector"));
            }
            if gr.degrees.iter().any(|&x| x > gr.top) {
                return Err(invalid("basis vector degree exceeds the truncation top"));
            }
        }
        Ok(ModulePresentation {
            datum: datum.clone(),
            dim,
            labels,
            f,
            e,
            grading,
        })
    }

    pub fn from_document(datum: &CartanDatum, doc: &ModuleDocument) -> Result<ModulePresentation> {
        let field = datum.field();
        let dim = doc.dimension;
        let labels = if doc.labels.is_empty() {
            (0..dim).map(|i| format!("v{i}")).collect()
        } else if doc.labels.len() == dim {
            doc.labels.clone()
        } else {
            return Err(invalid("labels must match the dimension"));
        };
        let g = datum.generator_count();
        let mut f: Vec<Option<Matrix>> = vec![None; g];
        let mut e: Vec<Option<Matrix>> = vec![None; g];
        for a in &doc.actions {
            let index = datum
                .label_position(&a.index)
                .ok_or_else(|| invalid(format!("unknown index `{}`", a.index)))?;
            let id = datum
                .generator_id(GeneratorIndex { index, k: a.k })
                .ok_or_else(|| invalid(format!("no generator {}.{}", a.index, a.k)))?;
            if a.matrix.len() != dim {
                return Err(invalid(format!("matrix for {}{}.{} must have {dim} rows", a.side.letter(), a.index, a.k)));
            }
            let m = parse_matrix(&a.matrix, dim, &field)?;
            let slot = match a.side {
                Side::F => &mut f[id as usize],
                Side::E => &mut e[id as usize],
            };
            if slot.is_some() {
                return Err(invalid(format!("duplicate action for {}{}.{}", a.side.letter(), a.index, a.k)));
            }
            *slot = Some(m);
        }
        let zero = || vec![SparseVec::new(); dim];
        ModulePresentation::new(
            datum,
            labels,
            f.into_iter().map(|m| m.unwrap_or_else(zero)).collect(),
            e.into_iter().map(|m| m.unwrap_or_else(zero)).collect(),
            doc.truncation.clone(),
        )
    }

    /// Parse and validate; non-modules are rejected.
    pub fn load(n: &Nichols, json: &str) -> Result<ModulePresentation> {
        let doc: ModuleDocument = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        let m = ModulePresentation::from_document(n.datum(), &doc)?;
        m.validate(n)?;
        Ok(m)
    }

    pub fn to_document(&self) -> ModuleDocument {
        let field = self.datum.field();
        let mut actions = Vec::new();
        for (side, mats) in [(Side::F, &self.f), (Side::E, &self.e)] {
            for (g, m) in mats.iter().enumerate() {
                if m.iter().all(|c| c.is_empty()) {
                    continue;
                }
                let gen = self.datum.generators()[g];
                actions.push(ActionDocument {
                    side,
                    index: self.datum.labels()[gen.index].clone(),
                    k: gen.k,
                    matrix: matrix_strings(m, self.dim, &field),
                });
            }
        }
        ModuleDocument {
            dimension: self.dim,
            labels: self.labels.clone(),
            actions,
            truncation: self.grading.clone(),
        }
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    pub fn matrix(&self, side: Side, g: u16) -> &Matrix {
        match side {
            Side::F => &self.f[g as usize],
            Side::E => &self.e[g as usize],
        }
    }

    /// Action of a word; the last letter acts first.
    pub fn apply_word(&self, side: Side, w: &Word, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        for &g in w.letters().iter().rev() {
            if cur.is_empty() {
                break;
            }
            cur = apply(self.matrix(side, g), &cur);
        }
        cur
    }

    pub fn apply_boson(&self, beta: &BosonElement, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        let mut memo: BTreeMap<&Word, SparseVec> = BTreeMap::new();
        for ((r, s), c) in beta.terms() {
            let sv = memo.entry(s).or_insert_with(|| self.apply_word(Side::E, s, v));
            if sv.is_empty() {
                continue;
            }
            let rv = self.apply_word(Side::F, r, sv);
            axpy(&mut out, c, &rv);
        }
        out
    }

    fn basis_allowed(&self, f_count: usize) -> Vec<usize> {
        match &self.grading {
            None => (0..self.dim).collect(),
            Some(g) => (0..self.dim).filter(|&j| g.degrees[j] + f_count <= g.top).collect(),
        }
    }

    /// Smallest `k` with all words of length `k` acting by zero, if any.
    fn nilpotency(&self, side: Side) -> Option<usize> {
        let mut layer: Vec<SparseVec> = (0..self.dim).map(|j| unit(j, &self.datum.field())).collect();
        let mut prev_rank = usize::MAX;
        for k in 0..=self.dim + 1 {
            let rank = rank_of(&layer);
            if rank == 0 {
                return Some(k);
            }
            if rank == prev_rank && k > 0 {
                // the chain of images is nested; a repeat means it has stabilized
                return None;
            }
            prev_rank = rank;
            let mut ech = Echelon::new();
            let mut next = Vec::new();
            for v in &layer {
                for g in 0..self.datum.generator_count() as u16 {
                    let w = apply(self.matrix(side, g), v);
                    if !w.is_empty() && ech.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        None
    }

    fn fallback_bound(&self, cap: usize) -> usize {
        let d = &self.datum;
        let mut b = 2usize;
        for i in 0..d.rank() {
            for j in 0..d.rank() {
                if i != j {
                    b = b.max((2 - d.cartan_entry(i, j)) as usize);
                }
            }
        }
        if let FieldSpec::Cyclotomic { order } = d.field() {
            b = b.max(order as usize);
        }
        b.min(cap)
    }

    /// Checks the generator relation on every pair and the radical relations
    /// of `R` and `S` at every degree below the nilpotency bound.  Graded
    /// (truncated) modules additionally must have homogeneous matrices.
    pub fn validate(&self, n: &Nichols) -> Result<RelationReport> {
        let d = &self.datum;
        let field = d.field();
        let gens = d.generator_count() as u16;
        if let Some(gr) = &self.grading {
            for g in 0..gens {
                for (side, shift) in [(Side::F, 1i64), (Side::E, -1i64)] {
                    for (j, col) in self.matrix(side, g).iter().enumerate() {
                        for &i in col.keys() {
                            if gr.degrees[i] as i64 != gr.degrees[j] as i64 + shift {
                                return Err(invalid(format!(
                                    "{}{} is not homogeneous on `{}`",
                                    side.letter(),
                                    d.generator_name(g),
                                    self.labels[j]
                                )));
                            }
                        }
                    }
                }
            }
        }
        let allowed = self.basis_allowed(1);
        let mut pairs = 0;
        for g in 0..gens {
            for h in 0..gens {
                pairs += 1;
                let qgh = field.q_power(d.gen_q_exponent(g, h));
                for &j in &allowed {
                    let v = unit(j, &field);
                    let mut lhs = apply(&self.e[g as usize], &apply(&self.f[h as usize], &v));
                    let fe = apply(&self.f[h as usize], &apply(&self.e[g as usize], &v));
                    axpy(&mut lhs, &-qgh.clone(), &fe);
                    if g == h {
                        axpy(&mut lhs, &-field.one(), &v);
                    }
                    if !lhs.is_empty() {
                        return Err(invalid(format!(
                            "relation e{} f{} = q f e + δ fails on `{}`",
                            d.generator_name(g),
                            d.generator_name(h),
                            self.labels[j]
                        )));
                    }
                }
            }
        }
        let nil_f = self.nilpotency(Side::F);
        let nil_e = self.nilpotency(Side::E);
        let bound = |nil: Option<usize>| -> Result<usize> {
            match nil {
                Some(k) if k > n.cap() + 1 => Err(Error::DegreeCapExceeded { degree: k - 1, cap: n.cap() }),
                Some(k) => Ok(k.saturating_sub(1)),
                None => Ok(self.fallback_bound(n.cap())),
            }
        };
        let f_bound = bound(nil_f)?;
        let e_bound = bound(nil_e)?;
        let mut radical = 0;
        for (side, b) in [(Side::F, f_bound), (Side::E, e_bound)] {
            for alpha in Multidegree::up_to(d.rank(), b) {
                if alpha.total() < 2 {
                    continue;
                }
                let block = n.block(&alpha)?;
                let f_count = if side == Side::F { alpha.total() } else { 0 };
                let targets = self.basis_allowed(f_count);
                for rel in block.kernel(side) {
                    radical += 1;
                    for &j in &targets {
                        let v = unit(j, &field);
                        let mut acc = SparseVec::new();
                        for (w, c) in rel.terms() {
                            axpy(&mut acc, c, &self.apply_word(side, w, &v));
                        }
                        if !acc.is_empty() {
                            return Err(invalid(format!(
                                "radical relation {} at degree {} fails on `{}`",
                                rel.render(d),
                                alpha,
                                self.labels[j]
                            )));
                        }
                    }
                }
            }
        }
        Ok(RelationReport {
            straightening_pairs: pairs,
            radical_relations: radical,
            f_bound,
            e_bound,
            f_nilpotent: nil_f.is_some(),
            e_nilpotent: nil_e.is_some(),
        })
    }

    pub fn zero(datum: &CartanDatum) -> ModulePresentation {
        let g = datum.generator_count();
        ModulePresentation::new(datum, vec![], vec![vec![]; g], vec![vec![]; g], None).expect("empty module")
    }

    /// `R_{<=d} ⊗ X` with `dim X = copies`; `f'` acts by truncated
    /// multiplication, `e` by skew derivation, both on the first factor.
    pub fn truncated_verma(n: &Nichols, top: usize, copies: usize) -> Result<ModulePresentation> {
        let d = n.datum();
        let field = d.field();
        let words = n.basis_up_to(Side::F, top)?;
        let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let dim = words.len() * copies;
        let mut labels = Vec::with_capacity(dim);
        let mut degrees = Vec::with_capacity(dim);
        for w in &words {
            let base = if w.is_empty() { "1".to_string() } else { w.render(d, Side::F) };
            for x in 0..copies {
                labels.push(if copies == 1 { base.clone() } else { format!("{base}⊗x{}", x + 1) });
                degrees.push(w.len());
            }
        }
        let gens = d.generator_count() as u16;
        let mut f = vec![vec![SparseVec::new(); dim]; gens as usize];
        let mut e = vec![vec![SparseVec::new(); dim]; gens as usize];
        for g in 0..gens {
            for (u, w) in words.iter().enumerate() {
                let mut fcol = SparseVec::new();
                if w.len() < top {
                    let prod = n.element(Side::F, &Word::letter(g).concat(w))?;
                    for (v, c) in prod.terms() {
                        fcol.insert(index[v], c.clone());
                    }
                }
                let mut ecol = SparseVec::new();
                for (v, ex) in e_derivation_word(d, g, w) {
                    let nf = n.element(Side::F, &v)?;
                    let qe = field.q_power(ex);
                    for (b, c) in nf.terms() {
                        add_entry(&mut ecol, index[b], &qe * c);
                    }
                }
                for x in 0..copies {
                    let shift = |col: &SparseVec| -> SparseVec {
                        col.iter().map(|(&i, c)| (i * copies + x, c.clone())).collect()
                    };
                    f[g as usize][u * copies + x] = shift(&fcol);
                    e[g as usize][u * copies + x] = shift(&ecol);
                }
            }
        }
        ModulePresentation::new(d, labels, f, e, Some(Grading { degrees, top }))
    }

    pub fn direct_sum(a: &ModulePresentation, b: &ModulePresentation) -> Result<ModulePresentation> {
        if a.datum != b.datum {
            return Err(invalid("direct sum of modules over different data"));
        }
        let shift = a.dim;
        let join = |x: &Matrix, y: &Matrix| -> Matrix {
            x.iter()
                .cloned()
                .chain(y.iter().map(|c| c.iter().map(|(&i, v)| (i + shift, v.clone())).collect()))
                .collect()
        };
        let labels = a
            .labels
            .iter()
            .map(|l| format!("{l} (1)"))
            .chain(b.labels.iter().map(|l| format!("{l} (2)")))
            .collect();
        let grading = match (&a.grading, &b.grading) {
            (None, None) => None,
            (Some(x), Some(y)) if x.top == y.top => Some(Grading {
                degrees: x.degrees.iter().chain(&y.degrees).copied().collect(),
                top: x.top,
            }),
            _ => return Err(invalid("direct sum needs matching truncations")),
        };
        let f = a.f.iter().zip(&b.f).map(|(x, y)| join(x, y)).collect();
        let e = a.e.iter().zip(&b.e).map(|(x, y)| join(x, y)).collect();
        ModulePresentation::new(&a.datum, labels, f, e, grading)
    }

    /// The left regular module of `B` when `R` is finite dimensional.
    pub fn regular(n: &Nichols) -> Result<ModulePresentation> {
        let fin = finite_basis(n)?;
        let d = n.datum();
        let b = Boson::new(n);
        let mut basis = Vec::new();
        for r in &fin.words {
            for s in &fin.e_words {
                basis.push((r.clone(), s.clone()));
            }
        }
        let index: BTreeMap<&(Word, Word), usize> = basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let one = d.field().one();
        let gens = d.generator_count() as u16;
        let mut f = vec![vec![]; gens as usize];
        let mut e = vec![vec![]; gens as usize];
        for g in 0..gens {
            for (r, s) in &basis {
                let x = BosonElement::monomial(r.clone(), s.clone(), one.clone());
                for (gen, out) in [(b.f(g), &mut f), (b.e(g), &mut e)] {
                    let y = b.multiply(&gen, &x)?;
                    let col: SparseVec = y
                        .terms()
                        .iter()
                        .map(|(k, c)| (index[k], c.clone()))
                        .collect();
                    out[g as usize].push(col);
                }
            }
        }
        let labels = basis
            .iter()
            .map(|(r, s)| BosonElement::render_term(d, r, s, &one).trim_start_matches("(1)*").to_string())
            .collect();
        ModulePresentation::new(d, labels, f, e, None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Integrability {
    pub integrable: bool,
    pub witness: Option<String>,
}

/// Integrability at level `(n, F)`: every e-generator with index
/// outside `F` acts by zero and every product of `n` e-generators from `F`
/// acts by zero.
pub fn check_integrable(m: &ModulePresentation, t: &TruncationIndex) -> Integrability {
    let d = &m.datum;
    let field = d.field();
    for g in 0..d.generator_count() as u16 {
        if !t.support.contains(&d.index_of(g)) {
            if let Some(j) = m.e[g as usize].iter().position(|c| !c.is_empty()) {
                return Integrability {
                    integrable: false,
                    witness: Some(format!("e{} on `{}`", d.generator_name(g), m.labels[j])),
                };
            }
        }
    }
    // spanning vectors of the image of all length-k products, each of the
    // literal form E_w m_j
    let mut layer: Vec<(Vec<u16>, usize, SparseVec)> =
        (0..m.dim).map(|j| (vec![], j, unit(j, &field))).collect();
    for _ in 0..t.n {
        let mut ech = Echelon::new();
        let mut next = Vec::new();
        for (w, j, v) in &layer {
            for g in 0..d.generator_count() as u16 {
                if !t.support.contains(&d.index_of(g)) {
                    continue;
                }
                let x = apply(&m.e[g as usize], v);
                if !x.is_empty() && ech.insert(x.clone()) {
                    let mut w2 = vec![g];
                    w2.extend_from_slice(w);
                    next.push((w2, *j, x));
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    match layer.first() {
        None => Integrability {
            integrable: true,
            witness: None,
        },
        Some((w, j, _)) => Integrability {
            integrable: false,
            witness: Some(format!(
                "{} on `{}`",
                if w.is_empty() { "1".to_string() } else { Word(w.clone()).render(d, Side::E) },
                m.labels[*j]
            )),
        },
    }
}

/// `M_0`: the joint kernel of all e-generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighestWeightSpace {
    pub basis: Vec<SparseVec>,
}

impl HighestWeightSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in the basis, if it lies in the space.
    pub fn coordinates(&self, v: &SparseVec, field: &FieldSpec) -> Option<SparseVec> {
        let mut ech = Echelon::new();
        for (k, b) in self.basis.iter().enumerate() {
            ech.insert_tagged(b.clone(), k, field);
        }
        ech.express(v)
    }
}

pub fn highest_space(m: &ModulePresentation) -> HighestWeightSpace {
    let d = &m.datum;
    let field = d.field();
    let gens = d.generator_count();
    // column j of the stacked matrix [E_1; E_2; ...]
    let cols: Vec<SparseVec> = (0..m.dim)
        .map(|j| {
            let mut c = SparseVec::new();
            for g in 0..gens {
                for (i, x) in &m.e[g][j] {
                    c.insert(g * m.dim + i, x.clone());
                }
            }
            c
        })
        .collect();
    let mut ech = Echelon::new();
    let mut basis = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        if let Insert::Dependent(combo) = ech.insert_tagged(c.clone(), j, &field) {
            basis.push(combo);
        }
    }
    HighestWeightSpace { basis }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kappa {
    /// `(r, k)`: the domain vector `r ⊗ b_k`.
    pub domain: Vec<(Word, usize)>,
    pub matrix: Matrix,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
}

/// `κ_M : R_{<=cap} ⊗ M_0 → M`, `r ⊗ m ↦ r m`.
pub fn kappa(n: &Nichols, m: &ModulePresentation, cap: usize) -> Result<Kappa> {
    let m0 = highest_space(m);
    let words = n.basis_up_to(Side::F, cap)?;
    let mut domain = Vec::new();
    let mut matrix = Vec::new();
    for r in &words {
        for (k, b) in m0.basis.iter().enumerate() {
            domain.push((r.clone(), k));
            matrix.push(m.apply_word(Side::F, r, b));
        }
    }
    let rank = rank_of(&matrix);
    Ok(Kappa {
        injective: rank == domain.len(),
        surjective: rank == m.dim,
        domain,
        matrix,
        rank,
    })
}

/// Output of [`decompose`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub truncation: TruncationIndex,
    pub retried: bool,
    pub m0: HighestWeightSpace,
    /// Coordinates of the iso `M ≅ R ⊗ M_0`: `(r_p, k)` stands for `r_p ⊗ b_k`.
    pub components: Vec<(Word, usize)>,
    /// Column `j`: coordinates of basis vector `m_j` in the components.
    pub forward: Matrix,
    /// Column `c`: the vector `r_p b_k` of `M`.
    pub backward: Matrix,
    pub reconstruction_exact: bool,
    pub bijective: bool,
}

/// The matrix of `γ` acting on `M`.
pub fn projector_matrix(m: &ModulePresentation, gamma: &BosonElement) -> Matrix {
    let field = m.datum.field();
    (0..m.dim).map(|j| m.apply_boson(gamma, &unit(j, &field))).collect()
}

fn attempt(n: &Nichols, m: &ModulePresentation, t: &TruncationIndex) -> Result<std::result::Result<Decomposition, usize>> {
    let field = m.datum.field();
    let m0 = highest_space(m);
    let proj = build_projector(n, t)?;
    let gamma_cols = projector_matrix(m, &proj.element);
    let mut ech = Echelon::new();
    for (k, b) in m0.basis.iter().enumerate() {
        ech.insert_tagged(b.clone(), k, &field);
    }
    let mut comp_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut raw: Vec<BTreeMap<(usize, usize), FieldElement>> = Vec::with_capacity(m.dim);
    for j in 0..m.dim {
        let mj = unit(j, &field);
        let mut recon = SparseVec::new();
        let mut coords = BTreeMap::new();
        for (p, (rp, sp)) in proj.pairs.iter().enumerate() {
            let mut z = SparseVec::new();
            for (w, c) in sp.terms() {
                axpy(&mut z, c, &m.apply_word(Side::E, w, &mj));
            }
            if z.is_empty() {
                continue;
            }
            let y = apply(&gamma_cols, &z);
            if y.is_empty() {
                continue;
            }
            let Some(c) = ech.express(&y) else {
                return Ok(Err(j));
            };
            for (k, x) in c {
                coords.insert((p, k), x);
            }
            axpy(&mut recon, &field.one(), &m.apply_word(Side::F, rp, &y));
        }
        if recon != mj {
            return Ok(Err(j));
        }
        for k in coords.keys() {
            let len = comp_index.len();
            comp_index.entry(*k).or_insert(len);
        }
        raw.push(coords);
    }
    // components in (pair, basis) order
    let mut keys: Vec<(usize, usize)> = comp_index.keys().copied().collect();
    keys.sort_unstable();
    let pos: BTreeMap<(usize, usize), usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let forward: Matrix = raw
        .into_iter()
        .map(|c| c.into_iter().map(|(k, x)| (pos[&k], x)).collect())
        .collect();
    let backward: Matrix = keys
        .iter()
        .map(|&(p, k)| m.apply_word(Side::F, &proj.pairs[p].0, &m0.basis[k]))
        .collect();
    let components: Vec<(Word, usize)> = keys.iter().map(|&(p, k)| (proj.pairs[p].0.clone(), k)).collect();
    let bijective = is_identity(&compose(&backward, &forward), m.dim, &field)
        && is_identity(&compose(&forward, &backward), components.len(), &field);
    Ok(Ok(Decomposition {
        truncation: t.clone(),
        retried: false,
        m0,
        components,
        forward,
        backward,
        reconstruction_exact: true,
        bijective,
    }))
}

/// `a ∘ b` for column-stored matrices.
pub fn compose(a: &Matrix, b: &Matrix) -> Matrix {
    b.iter().map(|c| apply(a, c)).collect()
}

pub fn is_identity(m: &Matrix, n: usize, field: &FieldSpec) -> bool {
    m.len() == n && m.iter().enumerate().all(|(j, c)| *c == unit(j, field))
}

/// Decomposes `M` as `R ⊗ M_0` through `m = Σ_p r_p γ s_p m`.  A failed
/// reconstruction is retried once one level higher before it is reported.
pub fn decompose(n: &Nichols, m: &ModulePresentation, t: &TruncationIndex) -> Result<Decomposition> {
    let integ = check_integrable(m, t);
    if !integ.integrable {
        return Err(Error::NotIntegrable {
            witness: integ.witness.unwrap_or_default(),
        });
    }
    match attempt(n, m, t)? {
        Ok(dec) => Ok(dec),
        Err(_) => {
            let t2 = TruncationIndex::new(t.n + 1, t.support.clone());
            match attempt(n, m, &t2)? {
                Ok(mut dec) => {
                    dec.retried = true;
                    Ok(dec)
                }
                Err(j) => Err(Error::ReconstructionFailure { vector: j }),
            }
        }
    }
}

/// Basis of `R` when it is finite dimensional.
#[derive(Clone, Debug)]
pub struct FiniteBasis {
    pub words: Vec<Word>,
    pub e_words: Vec<Word>,
    pub dims_by_degree: Vec<usize>,
    /// First total degree at which `R` vanishes.
    pub boundary: usize,
}

pub fn finite_basis(n: &Nichols) -> Result<FiniteBasis> {
    let d = n.datum();
    if !d.field().is_cyclotomic() {
        return Err(Error::NotFiniteDimensional("generic q: every degree is nonzero".into()));
    }
    let mut dims = Vec::new();
    for t in 0..=n.cap() {
        let mut total = 0;
        for alpha in Multidegree::of_total(d.rank(), t) {
            total += n.dim(&alpha)?;
        }
        if total == 0 {
            // R is generated in degree one, so a vanishing layer kills all higher ones
            return Ok(FiniteBasis {
                words: n.basis_up_to(Side::F, t)?,
                e_words: n.basis_up_to(Side::E, t)?,
                dims_by_degree: dims,
                boundary: t,
            });
        }
        dims.push(total);
    }
    Err(Error::NotFiniteDimensional(format!("no vanishing degree up to the cap {}", n.cap())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlkCertificate {
    pub order: u32,
    pub dims_by_degree: Vec<usize>,
    pub boundary: usize,
    pub dim_r: usize,
    pub dim_b: usize,
    pub rho_rank: usize,
    pub bijective: bool,
    /// SHA-256 over the canonical strings of all ρ matrices.
    pub structure_digest: String,
    /// `[N]_{q_ii} = 0` for every index with `a_ii > 0`.
    pub scalar_identity: bool,
}

/// `ρ : B → End(R)` on a finite-dimensional `R`, certified bijective by rank.
pub fn flk_certificate(n: &Nichols) -> Result<FlkCertificate> {
    let d = n.datum();
    let fin = finite_basis(n)?;
    let FieldSpec::Cyclotomic { order } = d.field() else {
        unreachable!("finite_basis rejects generic q")
    };
    let field = d.field();
    let b = Boson::new(n);
    let dim_r = fin.words.len();
    let index: BTreeMap<&Word, usize> = fin.words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut hasher = Sha256::new();
    let mut vectors = Vec::new();
    for r in &fin.words {
        for s in &fin.e_words {
            let beta = BosonElement::monomial(r.clone(), s.clone(), field.one());
            let mut flat = SparseVec::new();
            for (u, w) in fin.words.iter().enumerate() {
                let x = n.element(Side::F, w)?;
                let y = b.rho_apply(&beta, &x)?;
                for (v, c) in y.terms() {
                    flat.insert(index[v] * dim_r + u, c.clone());
                }
            }
            for (i, c) in &flat {
                hasher.update(format!("{i}:{};", c.canonical()).as_bytes());
            }
            hasher.update(b"|");
            vectors.push(flat);
        }
    }
    let rho_rank = rank_of(&vectors);
    let scalar_identity = (0..d.rank())
        .filter(|&i| d.cartan_entry(i, i) > 0)
        .all(|i| field.gauss_integer(order, &field.q_power(d.q_exponent(i, i))).is_zero());
    Ok(FlkCertificate {
        order,
        dims_by_degree: fin.dims_by_degree,
        boundary: fin.boundary,
        dim_r,
        dim_b: vectors.len(),
        bijective: rho_rank == dim_r * dim_r && vectors.len() == dim_r * dim_r,
        rho_rank,
        structure_digest: hex::encode(hasher.finalize()),
        scalar_identity,
    })
}

pub fn render_vector(v: &SparseVec, n: usize, field: &FieldSpec) -> Vec<String> {
    dense(v, n, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::samples::*;

    #[test]
    fn zero_module() {
        let d = sl2();
        let n = Nichols::new(d.clone(), 4);
        let m = ModulePresentation::zero(&d);
        m.validate(&n).unwrap();
        assert!(check_integrable(&m, &TruncationIndex::new(0, vec![0])).integrable);
        assert_eq!(highest_space(&m).dim(), 0);
        let k = kappa(&n, &m, 3).unwrap();
        assert!(k.injective && k.surjective);
    }

    #[test]
    fn sl2_truncated_verma() {
        let d = sl2();
        let n = Nichols::new(d.clone(), 8);
        let m = ModulePresentation::truncated_verma(&n, 4, 1).unwrap();
        m.validate(&n).unwrap();
        assert!(!check_integrable(&m, &TruncationIndex::new(4, vec![0])).integrable);
        assert!(check_integrable(&m, &TruncationIndex::new(5, vec![0])).integrable);
        let h = highest_space(&m);
        assert_eq!(h.dim(), 1);
        assert_eq!(h.basis[0], unit(0, &d.field()));
        let k = kappa(&n, &m, 4).unwrap();
        assert!(k.injective && k.surjective);
    }

    #[test]
    fn tensor_with_three_copies() {
        let d = sl2();
        let n = Nichols::new(d.clone(), 8);
        let m = ModulePresentation::truncated_verma(&n, 3, 3).unwrap();
        m.validate(&n).unwrap();
        assert_eq!(highest_space(&m).dim(), 3);
    }

    #[test]
    fn truncation_exemption_is_needed() {
        let d = sl2();
        let n = Nichols::new(d.clone(), 8);
        let mut doc = ModulePresentation::truncated_verma(&n, 2, 1).unwrap().to_document();
        doc.truncation = None;
        let m = ModulePresentation::from_document(&d, &doc).unwrap();
        assert!(matches!(m.validate(&n), Err(Error::Validation(_))));
    }

    #[test]
    fn non_integrable_module() {
        let d = sl2();
        let q = d.field();
        let n = Nichols::new(d.clone(), 6);
        let f = (&q.one() - &q.q_power(-2)).inv().unwrap();
        let doc = ModuleDocument {
            dimension: 1,
            labels: vec!["v".into()],
            actions: vec![
                ActionDocument { side: Side::E, index: "1".into(), k: 1, matrix: vec![vec!["1".into()]] },
                ActionDocument { side: Side::F, index: "1".into(), k: 1, matrix: vec![vec![f.canonical()]] },
            ],
            truncation: None,
        };
        let m = ModulePresentation::load(&n, &serde_json::to_string(&doc).unwrap()).unwrap();
        let t = TruncationIndex::new(3, vec![0]);
        let i = check_integrable(&m, &t);
        assert!(!i.integrable);
        assert!(i.witness.unwrap().contains("e[1.1]e[1.1]e[1.1]"));
        assert!(matches!(decompose(&n, &m, &t), Err(Error::NotIntegrable { .. })));
        let k = kappa(&n, &m, 3).unwrap();
        assert!(k.injective);
    }

    #[test]
    fn direct_sum_decomposes() {
        let d = sl2();
        let n = Nichols::new(d.clone(), 12);
        let v = ModulePresentation::truncated_verma(&n, 4, 1).unwrap();
        let m = ModulePresentation::direct_sum(&v, &v).unwrap();
        m.validate(&n).unwrap();
        let dec = decompose(&n, &m, &TruncationIndex::new(5, vec![0])).unwrap();
        assert_eq!(dec.m0.dim(), 2);
        assert!(dec.reconstruction_exact && dec.bijective && !dec.retried);
    }

    #[test]
    fn projector_acts_as_projection() {
        let d = a2();
        let n = Nichols::new(d.clone(), 8);
        let m = ModulePresentation::truncated_verma(&n, 2, 2).unwrap();
        m.validate(&n).unwrap();
        let p = build_projector(&n, &TruncationIndex::new(3, vec![0, 1])).unwrap();
        let g = projector_matrix(&m, &p.element);
        assert_eq!(compose(&g, &g), g);
        let h = highest_space(&m);
        assert_eq!(rank_of(&g), h.dim());
        for c in &g {
            assert!(c.is_empty() || h.coordinates(c, &d.field()).is_some());
        }
    }

    #[test]
    fn trivial_module_needs_truncation() {
        let d = sl2();
        let n = Nichols::new(d.clone(), 4);
        let mut doc = ModuleDocument { dimension: 1, labels: vec![], actions: vec![], truncation: None };
        assert!(ModulePresentation::load(&n, &serde_json::to_string(&doc).unwrap()).is_err());
        doc.truncation = Some(Grading { degrees: vec![0], top: 0 });
        let m = ModulePresentation::load(&n, &serde_json::to_string(&doc).unwrap()).unwrap();
        let dec = decompose(&n, &m, &TruncationIndex::new(1, vec![0])).unwrap();
        assert_eq!(dec.m0.dim(), 1);
        assert!(is_identity(&dec.forward, 1, &d.field()));
    }

    #[test]
    fn flk_small() {
        let n = Nichols::new(sl2_root_of_unity(3), 8);
        let c = flk_certificate(&n).unwrap();
        assert_eq!((c.dim_r, c.dim_b, c.boundary), (3, 9, 3));
        assert!(c.bijective && c.scalar_identity);
        let t = Nichols::new(sl2(), 6);
        assert!(matches!(flk_certificate(&t), Err(Error::NotFiniteDimensional(_))));
    }
}
