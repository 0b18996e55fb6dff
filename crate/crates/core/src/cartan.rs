//! Borcherds-Cartan data, generator rosters and the diagonal braiding.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalars::{FieldElement, FieldSpec};

/// The JSON input document for a datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDocument {
    pub labels: Vec<String>,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizers: Vec<i64>,
    pub multiplicities: Vec<u32>,
    pub field: FieldSpec,
}

/// One generator `f'_{ik}` (or `e_{ik}`): simple index `i` (position in the
/// index set) and copy `k`, `1 <= k <= m_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorIndex {
    pub index: usize,
    pub k: u32,
}

/// A validated symmetrizable Borcherds-Cartan datum with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    doc: DatumDocument,
    generators: Vec<GeneratorIndex>,
    /// `q_exp[i][j] = -s_i a_ij`, so that `q_ij = q^{q_exp[i][j]}`.
    q_exp: Vec<Vec<i64>>,
}

/// Table of the braiding scalars `q_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidingMatrix {
    entries: Vec<Vec<FieldElement>>,
}

impl BraidingMatrix {
    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i][j]
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl CartanDatum {
    /// Parse and validate a JSON datum document.
    pub fn load(source: &str) -> Result<CartanDatum> {
        let doc: DatumDocument =
            serde_json::from_str(source).map_err(|e| Error::Parse(format!("datum document: {e}")))?;
        CartanDatum::from_document(doc)
    }

    pub fn from_document(doc: DatumDocument) -> Result<CartanDatum> {
        let n = doc.labels.len();
        for (i, l) in doc.labels.iter().enumerate() {
            if doc.labels[..i].contains(l) {
                return Err(invalid(format!("duplicate label `{l}`")));
            }
        }
        if doc.cartan.len() != n || doc.cartan.iter().any(|row| row.len() != n) {
            return Err(invalid(format!("cartan matrix must be {n}x{n}")));
        }
        if doc.symmetrizers.len() != n {
            return Err(invalid("symmetrizers length differs from the index set"));
        }
        if doc.multiplicities.len() != n {
            return Err(invalid("multiplicities length differs from the index set"));
        }
        if let Some(s) = doc.symmetrizers.iter().find(|&&s| s <= 0) {
            return Err(invalid(format!("symmetrizer {s} is not positive")));
        }
        if doc.multiplicities.contains(&0) {
            return Err(invalid("multiplicity 0 is not positive"));
        }
        let a = &doc.cartan;
        for i in 0..n {
            if a[i][i] != 2 && a[i][i] > 0 {
                return Err(invalid(format!(
                    "Borcherds-Cartan shape: a_{{{0}{0}}} = {1} must be 2 or <= 0",
                    doc.labels[i], a[i][i]
                )));
            }
            for j in 0..n {
                if i != j && a[i][j] > 0 {
                    return Err(invalid(format!(
                        "Borcherds-Cartan shape: off-diagonal a_{{{}{}}} = {} is positive",
                        doc.labels[i], doc.labels[j], a[i][j]
                    )));
                }
                let (si, sj) = (doc.symmetrizers[i], doc.symmetrizers[j]);
                if si * a[i][j] != sj * a[j][i] {
                    return Err(invalid(format!(
                        "symmetrizability: s_{0} a_{{{0}{1}}} = {2} but s_{1} a_{{{1}{0}}} = {3}",
                        doc.labels[i],
                        doc.labels[j],
                        si * a[i][j],
                        sj * a[j][i]
                    )));
                }
            }
        }
        if let FieldSpec::Cyclotomic { order } = doc.field {
            if order < 2 || order % 2 == 0 {
                return Err(invalid(format!("root of unity order {order} must be odd and >= 3")));
            }
            if order % 3 == 0 && has_g2_component(a) {
                return Err(invalid(format!(
                    "root of unity order {order} is divisible by 3 but the diagram has a G2 component"
                )));
            }
        }
        let mut generators = Vec::new();
        for (i, &m) in doc.multiplicities.iter().enumerate() {
            for k in 1..=m {
                generators.push(GeneratorIndex { index: i, k });
            }
        }
        if generators.len() > u16::MAX as usize {
            return Err(invalid("too many generators"));
        }
        let q_exp = (0..n)
            .map(|i| (0..n).map(|j| -doc.symmetrizers[i] * a[i][j]).collect())
            .collect();
        Ok(CartanDatum {
            doc,
            generators,
            q_exp,
        })
    }

    pub fn document(&self) -> &DatumDocument {
        &self.doc
    }

    pub fn field(&self) -> FieldSpec {
        self.doc.field
    }

    /// Number of simple indices `|I|`.
    pub fn rank(&self) -> usize {
        self.doc.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.doc.labels
    }

    pub fn label_position(&self, label: &str) -> Option<usize> {
        self.doc.labels.iter().position(|l| l == label)
    }

    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        self.doc.cartan[i][j]
    }

    pub fn multiplicity(&self, i: usize) -> u32 {
        self.doc.multiplicities[i]
    }

    /// Generators in the global order: by index, then by copy.
    pub fn generators(&self) -> &[GeneratorIndex] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Simple index of the flat generator id `g`.
    pub fn index_of(&self, g: u16) -> usize {
        self.generators[g as usize].index
    }

    pub fn generator_id(&self, gen: GeneratorIndex) -> Option<u16> {
        self.generators.iter().position(|&x| x == gen).map(|p| p as u16)
    }

    pub fn generator_name(&self, g: u16) -> String {
        let gen = self.generators[g as usize];
        format!("{}.{}", self.doc.labels[gen.index], gen.k)
    }

    /// Exponent `-s_i a_ij` of `q_ij`.
    pub fn q_exponent(&self, i: usize, j: usize) -> i64 {
        self.q_exp[i][j]
    }

    /// Exponent of the braiding scalar between two flat generators.
    pub fn gen_q_exponent(&self, g: u16, h: u16) -> i64 {
        self.q_exp[self.index_of(g)][self.index_of(h)]
    }

    pub fn braiding(&self) -> BraidingMatrix {
        let f = self.field();
        BraidingMatrix {
            entries: self
                .q_exp
                .iter()
                .map(|row| row.iter().map(|&e| f.q_power(e)).collect())
                .collect(),
        }
    }

    /// Sub-datum on the given labels, kept in the original index order.
    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<CartanDatum> {
        let mut keep = Vec::new();
        for s in subset {
            let p = self
                .label_position(s.as_ref())
                .ok_or_else(|| invalid(format!("unknown label `{}`", s.as_ref())))?;
            keep.push(p);
        }
        keep.sort_unstable();
        keep.dedup();
        let d = &self.doc;
        let doc = DatumDocument {
            labels: keep.iter().map(|&i| d.labels[i].clone()).collect(),
            cartan: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| d.cartan[i][j]).collect())
                .collect(),
            symmetrizers: keep.iter().map(|&i| d.symmetrizers[i]).collect(),
            multiplicities: keep.iter().map(|&i| d.multiplicities[i]).collect(),
            field: d.field,
        };
        CartanDatum::from_document(doc)
    }

    /// Hex SHA-256 of the canonical JSON rendering of the document.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(&self.doc).expect("datum serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

impl fmt::Display for CartanDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "datum[{}]", self.doc.labels.join(","))
    }
}

/// A connected component of type G2: exactly two nodes, both with diagonal 2,
/// joined with `a_ij a_ji = 3`.  Larger components containing such a pair
/// are never of finite type and Borcherds rows are exempt.
fn has_g2_component(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    let mut comp = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut stack = vec![start];
        let mut group = Vec::new();
        comp[start] = id;
        while let Some(i) = stack.pop() {
            group.push(i);
            for j in 0..n {
                if j != i && a[i][j] != 0 && comp[j] == usize::MAX {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.push(group);
    }
    members.iter().any(|g| {
        g.len() == 2 && {
            let (i, j) = (g[0], g[1]);
            a[i][i] == 2 && a[j][j] == 2 && a[i][j] * a[j][i] == 3
        }
    })
}

/// Ready-made data used throughout tests, examples and the acceptance suite.
pub mod samples {
    use super::*;

    fn build(labels: &[&str], cartan: Vec<Vec<i64>>, s: Vec<i64>, m: Vec<u32>, field: FieldSpec) -> CartanDatum {
        CartanDatum::from_document(DatumDocument {
            labels: labels.iter().map(|l| l.to_string()).collect(),
            cartan,
            symmetrizers: s,
            multiplicities: m,
            field,
        })
        .expect("sample datum is valid")
    }

    pub fn sl2() -> CartanDatum {
        build(&["1"], vec![vec![2]], vec![1], vec![1], FieldSpec::Transcendental)
    }

    pub fn sl2_root_of_unity(order: u32) -> CartanDatum {
        build(&["1"], vec![vec![2]], vec![1], vec![1], FieldSpec::Cyclotomic { order })
    }

    pub fn a2() -> CartanDatum {
        build(
            &["1", "2"],
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            vec![1, 1],
            FieldSpec::Transcendental,
        )
    }

    /// `A = [[2,-1],[-1,0]]`, `m = (1,2)`.
    pub fn borcherds() -> CartanDatum {
        build(
            &["1", "2"],
            vec![vec![2, -1], vec![-1, 0]],
            vec![1, 1],
            vec![1, 2],
            FieldSpec::Transcendental,
        )
    }

    /// The Borcherds datum extended by an imaginary node: `a_33 = -2`, chain
    /// off-diagonals `-1`, `m = (1,2,1)`.
    pub fn borcherds_chain() -> CartanDatum {
        build(
            &["1", "2", "3"],
            vec![vec![2, -1, 0], vec![-1, 0, -1], vec![0, -1, -2]],
            vec![1, 1, 1],
            vec![1, 2, 1],
            FieldSpec::Transcendental,
        )
    }

    pub fn imaginary_rank_one() -> CartanDatum {
        build(&["1"], vec![vec![-2]], vec![1], vec![1], FieldSpec::Transcendental)
    }

    pub fn empty() -> CartanDatum {
        build(&[], vec![], vec![], vec![], FieldSpec::Transcendental)
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    const SL2: &str = r#"{"labels":["1"],"cartan":[[2]],"symmetrizers":[1],"multiplicities":[1],"field":{"mode":"transcendental"}}"#;

    #[test]
    fn load_sl2_document() {
        let d = CartanDatum::load(SL2).unwrap();
        assert_eq!(d, sl2());
        assert_eq!(d.generator_count(), 1);
    }

    #[test]
    fn load_a2_document() {
        let d = CartanDatum::load(
            r#"{"labels":["1","2"],"cartan":[[2,-1],[-1,2]],"symmetrizers":[1,1],"multiplicities":[1,1],"field":{"mode":"transcendental"}}"#,
        )
        .unwrap();
        assert_eq!(d, a2());
    }

    #[test]
    fn rejects_non_symmetrizable() {
        let err = CartanDatum::load(
            r#"{"labels":["1","2"],"cartan":[[2,-1],[-2,2]],"symmetrizers":[1,1],"multiplicities":[1,1],"field":{"mode":"transcendental"}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("symmetrizab")), "{err}");
    }

    #[test]
    fn rejects_malformed_document() {
        assert!(matches!(CartanDatum::load("{\"labels\": 3}"), Err(Error::Parse(_))));
        assert!(matches!(CartanDatum::load("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_bad_shapes() {
        let bad_diag = r#"{"labels":["1"],"cartan":[[1]],"symmetrizers":[1],"multiplicities":[1],"field":{"mode":"transcendental"}}"#;
        assert!(matches!(CartanDatum::load(bad_diag), Err(Error::Validation(_))));
        let pos_off = r#"{"labels":["1","2"],"cartan":[[2,1],[1,2]],"symmetrizers":[1,1],"multiplicities":[1,1],"field":{"mode":"transcendental"}}"#;
        assert!(matches!(CartanDatum::load(pos_off), Err(Error::Validation(_))));
    }

    #[test]
    fn cyclotomic_order_rules() {
        let doc = |cartan: &str, s: &str, n: u32| {
            format!(
                r#"{{"labels":["1","2"],"cartan":{cartan},"symmetrizers":{s},"multiplicities":[1,1],"field":{{"mode":"cyclotomic","order":{n}}}}}"#
            )
        };
        let g2 = "[[2,-1],[-3,2]]";
        assert!(CartanDatum::load(&doc(g2, "[3,1]", 5)).is_ok());
        assert!(CartanDatum::load(&doc(g2, "[3,1]", 9)).is_err());
        assert!(CartanDatum::load(&doc(g2, "[3,1]", 4)).is_err());
        // A2 at N = 9 is fine: no G2 component
        assert!(CartanDatum::load(&doc("[[2,-1],[-1,2]]", "[1,1]", 9)).is_ok());
    }

    #[test]
    fn braiding_values() {
        let q = FieldSpec::Transcendental;
        assert_eq!(*sl2().braiding().get(0, 0), q.q_power(-2));
        let b = a2().braiding();
        assert_eq!(*b.get(0, 1), q.q_power(1));
        assert_eq!(*b.get(1, 0), q.q_power(1));
        assert_eq!(*b.get(0, 0), q.q_power(-2));
        assert_eq!(*b.get(1, 1), q.q_power(-2));
        assert_eq!(*imaginary_rank_one().braiding().get(0, 0), q.q_power(2));
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(a2().restrict(&["1"]).unwrap(), sl2());
        assert_eq!(a2().restrict(&["1", "2"]).unwrap(), a2());
        let e = a2().restrict::<&str>(&[]).unwrap();
        assert_eq!(e.rank(), 0);
        assert_eq!(e.generator_count(), 0);
    }

    #[test]
    fn restriction_commutes_with_braiding() {
        let d = borcherds_chain();
        let full = d.braiding();
        let sub = d.restrict(&["1", "3"]).unwrap().braiding();
        let keep = [0, 2];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                assert_eq!(sub.get(a, b), full.get(i, j));
            }
        }
    }

    #[test]
    fn braiding_is_symmetric_for_samples() {
        for d in [sl2(), a2(), borcherds(), borcherds_chain(), imaginary_rank_one()] {
            let b = d.braiding();
            for i in 0..b.rank() {
                for j in 0..b.rank() {
                    assert_eq!(b.get(i, j), b.get(j, i));
                }
            }
        }
    }
}
