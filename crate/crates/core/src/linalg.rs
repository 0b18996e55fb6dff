//! Exact linear algebra over the scalar field: sparse incremental echelon
//! forms (greedy, order-respecting pivot selection), kernels, inverses.

use std::collections::BTreeMap;

use crate::scalars::{FieldElement, FieldSpec};

pub type SparseVec = BTreeMap<usize, FieldElement>;

pub fn sparse_from_dense(v: &[FieldElement]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// `acc += c * v`, removing cancelled entries.
pub fn axpy(acc: &mut SparseVec, c: &FieldElement, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let t = c * x;
        match acc.get_mut(&i) {
            Some(y) => {
                *y += &t;
                if y.is_zero() {
                    acc.remove(&i);
                }
            }
            None => {
                if !t.is_zero() {
                    acc.insert(i, t);
                }
            }
        }
    }
}

pub fn scale(v: &SparseVec, c: &FieldElement) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

/// Row echelon form built one vector at a time.  Each stored row has pivot
/// entry 1 at its leading column.  Optionally tracks, for every stored row,
/// its expression in the inserted vectors (by insertion tag).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, (SparseVec, SparseVec)>,
}

pub enum Insert {
    /// The vector was independent; it now has this pivot column.
    Independent(usize),
    /// The vector reduced to zero; the tracked combination (including the
    /// vector's own tag) vanishes.
    Dependent(SparseVec),
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Reduce `v` (with tracked combination `combo`) against the stored rows.
    pub fn reduce(&self, mut v: SparseVec, mut combo: SparseVec) -> (SparseVec, SparseVec) {
        let mut cursor = v.keys().next().copied();
        while let Some(c) = cursor {
            if let Some((row, rc)) = self.rows.get(&c) {
                let f = -v[&c].clone();
                axpy(&mut v, &f, row);
                axpy(&mut combo, &f, rc);
            }
            cursor = v.range(c + 1..).next().map(|(&k, _)| k);
        }
        (v, combo)
    }

    pub fn insert_tagged(&mut self, v: SparseVec, tag: usize, field: &FieldSpec) -> Insert {
        let mut combo = SparseVec::new();
        combo.insert(tag, field.one());
        self.insert_with(v, combo)
    }

    pub fn insert_with(&mut self, v: SparseVec, combo: SparseVec) -> Insert {
        let (v, combo) = self.reduce(v, combo);
        match v.keys().next().copied() {
            None => Insert::Dependent(combo),
            Some(c) => {
                let inv = v[&c].inv().expect("nonzero pivot");
                self.rows.insert(c, (scale(&v, &inv), scale(&combo, &inv)));
                Insert::Independent(c)
            }
        }
    }

    pub fn insert(&mut self, v: SparseVec) -> bool {
        matches!(self.insert_with(v, SparseVec::new()), Insert::Independent(_))
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone(), SparseVec::new()).0.is_empty()
    }

    /// Coordinates of `v` in terms of the tracked tags, if `v` lies in the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rest, combo) = self.reduce(v.clone(), SparseVec::new());
        if rest.is_empty() {
            Some(combo.into_iter().map(|(k, c)| (k, -c)).collect())
        } else {
            None
        }
    }
}

/// Greedy selection of independent vectors in input order.
#[derive(Clone, Debug)]
pub struct GreedyBasis {
    /// Indices of the selected (independent) vectors, ascending.
    pub pivots: Vec<usize>,
    /// For every rejected vector `u`: a relation `sum c_j v_j = 0` with
    /// `c_u = 1` and all other `j` among the pivots.
    pub relations: Vec<(usize, SparseVec)>,
}

pub fn greedy_basis(vectors: &[SparseVec], field: &FieldSpec) -> GreedyBasis {
    let mut ech = Echelon::new();
    let mut pivots = Vec::new();
    let mut relations = Vec::new();
    for (u, v) in vectors.iter().enumerate() {
        match ech.insert_tagged(v.clone(), u, field) {
            Insert::Independent(_) => pivots.push(u),
            Insert::Dependent(combo) => relations.push((u, combo)),
        }
    }
    GreedyBasis { pivots, relations }
}

pub fn rank_of(vectors: &[SparseVec]) -> usize {
    let mut ech = Echelon::new();
    vectors.iter().filter(|v| ech.insert((*v).clone())).count()
}

/// Dense inverse by Gauss-Jordan elimination; `None` if singular.
pub fn invert(m: &[Vec<FieldElement>], field: &FieldSpec) -> Option<Vec<Vec<FieldElement>>> {
    let n = m.len();
    let mut a: Vec<Vec<FieldElement>> = m.to_vec();
    let mut inv: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let pinv = a[col][col].inv().expect("nonzero");
        for j in 0..n {
            a[col][j] = &a[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= &t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= &t;
                }
            }
        }
    }
    Some(inv)
}

/// Basis of `{x : sum_j x_j v_j = 0}` for the given vectors `v_j` (i.e. the
/// right kernel of the matrix whose columns are the `v_j`).
pub fn kernel_of_columns(columns: &[SparseVec], field: &FieldSpec) -> Vec<SparseVec> {
    greedy_basis(columns, field).relations.into_iter().map(|(_, c)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Transcendental
    }

    fn v(xs: &[i64]) -> SparseVec {
        let f = q();
        sparse_from_dense(&xs.iter().map(|&x| f.integer(x)).collect::<Vec<_>>())
    }

    #[test]
    fn greedy_picks_first_independent() {
        let vs = vec![v(&[1, 2]), v(&[2, 4]), v(&[0, 1]), v(&[1, 1])];
        let g = greedy_basis(&vs, &q());
        assert_eq!(g.pivots, vec![0, 2]);
        assert_eq!(g.relations.len(), 2);
        for (u, rel) in &g.relations {
            assert!(rel[u].is_one());
            let mut acc = SparseVec::new();
            for (&j, c) in rel {
                axpy(&mut acc, c, &vs[j]);
            }
            assert!(acc.is_empty());
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let f = q();
        let m = vec![
            vec![f.q_power(1), f.one()],
            vec![f.one(), f.q_power(1)],
        ];
        let inv = invert(&m, &f).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = f.zero();
                for k in 0..2 {
                    s += &(&m[i][k] * &inv[k][j]);
                }
                assert_eq!(s.is_one(), i == j);
                assert_eq!(s.is_zero(), i != j);
            }
        }
        assert!(invert(&[vec![f.one(), f.one()], vec![f.one(), f.one()]], &f).is_none());
    }

    #[test]
    fn express_in_span() {
        let f = q();
        let mut e = Echelon::new();
        e.insert_tagged(v(&[1, 1, 0]), 0, &f);
        e.insert_tagged(v(&[0, 1, 1]), 1, &f);
        let c = e.express(&v(&[2, 3, 1])).unwrap();
        assert_eq!(c[&0], f.integer(2));
        assert_eq!(c[&1], f.integer(1));
        assert!(e.express(&v(&[0, 0, 1])).is_none());
    }
}
