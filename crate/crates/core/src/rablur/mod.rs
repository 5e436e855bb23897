//! Finite relation algebras given by forbidden triples, blurs, blow-ups and
//! cylindric bases of basic matrices.

mod basis;
mod blur;

pub use basis::{
    basic_matrices, basic_matrices_with, ca_atoms_from_basis, check_cylindric_basis, BasicMatrix, BasisReport,
    BasisWitness, MATRIX_BUDGET,
};
pub use blur::{
    blowup_blur_atoms, check_copy_embedding, check_nblur, BlurCondition, BlurSpec, BlurSpecJson, Blowup,
    EmbeddingReport, IndexBlur, NblurReport,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An atomic relation algebra with finitely many atoms. `comp[a][b]` is the
/// set of atoms below `a;b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRa {
    names: Vec<String>,
    index: HashMap<String, usize>,
    identity: usize,
    converse: Vec<usize>,
    comp: Vec<FixedBitSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaJson {
    pub atoms: Vec<String>,
    pub identity: String,
    #[serde(default)]
    pub converse: BTreeMap<String, String>,
    pub forbidden: Vec<[String; 3]>,
}

/// The six triples obtained from `c ≤ a;b` by rotation and conversion.
fn peirce_orbit(conv: &[usize], [a, b, c]: [usize; 3]) -> [[usize; 3]; 6] {
    let (ca, cb, cc) = (conv[a], conv[b], conv[c]);
    [[a, b, c], [cb, ca, cc], [ca, c, b], [c, cb, a], [b, cc, ca], [cc, a, cb]]
}

impl FiniteRa {
    /// Build from a consistency predicate on diversity triples: `ok(a, b, c)`
    /// says `c ≤ a;b`. The identity laws are imposed here; no closure is
    /// applied, so the result may fail Peircean symmetry.
    pub fn from_table(
        names: Vec<String>,
        identity: usize,
        converse: Vec<usize>,
        ok: impl Fn(usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let k = names.len();
        if identity >= k {
            return Err(Error::Malformed("identity atom out of range".into()));
        }
        if converse.len() != k || converse.iter().enumerate().any(|(a, &b)| b >= k || converse[b] != a) {
            return Err(Error::Malformed("converse must be an involution on the atoms".into()));
        }
        if converse[identity] != identity {
            return Err(Error::Malformed("the identity must be self-converse".into()));
        }
        let mut index = HashMap::with_capacity(k);
        for (a, n) in names.iter().enumerate() {
            if index.insert(n.clone(), a).is_some() {
                return Err(Error::Malformed(format!("duplicate atom `{n}`")));
            }
        }
        let mut comp = vec![FixedBitSet::with_capacity(k); k * k];
        for a in 0..k {
            for b in 0..k {
                let cell = &mut comp[a * k + b];
                for c in 0..k {
                    let holds = if a == identity {
                        b == c
                    } else if b == identity {
                        a == c
                    } else if c == identity {
                        b == converse[a]
                    } else {
                        ok(a, b, c)
                    };
                    cell.set(c, holds);
                }
            }
        }
        Ok(FiniteRa { names, index, identity, converse, comp })
    }

    /// Build from forbidden diversity triples `[a, b, c]` (forbidding `c ≤ a;b`),
    /// closed under the Peircean transformations.
    pub fn from_forbidden(
        names: Vec<String>,
        identity: usize,
        converse: Vec<usize>,
        forbidden: &[[usize; 3]],
    ) -> Result<Self> {
        if converse.len() != names.len() {
            return Err(Error::Malformed("converse must be an involution on the atoms".into()));
        }
        let mut closed = BTreeSet::new();
        for t in forbidden {
            if t.iter().any(|&x| x >= names.len()) {
                return Err(Error::Malformed("forbidden triple out of range".into()));
            }
            if t.contains(&identity) {
                return Err(Error::Malformed("forbidden triples range over diversity atoms".into()));
            }
            closed.extend(peirce_orbit(&converse, *t));
        }
        Self::from_table(names, identity, converse, |a, b, c| !closed.contains(&[a, b, c]))
    }

    pub fn from_json(j: &RaJson) -> Result<Self> {
        let index: HashMap<&str, usize> = j.atoms.iter().enumerate().map(|(a, s)| (s.as_str(), a)).collect();
        let look = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownAtom(s.to_string()));
        let identity = look(&j.identity)?;
        let mut converse: Vec<usize> = (0..j.atoms.len()).collect();
        for (a, b) in &j.converse {
            let (a, b) = (look(a)?, look(b)?);
            converse[a] = b;
            converse[b] = a;
        }
        let forbidden = j
            .forbidden
            .iter()
            .map(|[a, b, c]| Ok([look(a)?, look(b)?, look(c)?]))
            .collect::<Result<Vec<_>>>()?;
        Self::from_forbidden(j.atoms.clone(), identity, converse, &forbidden)
    }

    /// One representative per Peircean orbit of forbidden diversity triples,
    /// the least in atom order. Round-trips when the table is Peirce-closed.
    pub fn to_json(&self) -> RaJson {
        let mut reps = BTreeSet::new();
        for [a, b, c] in self.diversity_triples() {
            if !self.consistent(a, b, c) {
                let rep = *peirce_orbit(&self.converse, [a, b, c]).iter().min().expect("orbit is non-empty");
                reps.insert(rep);
            }
        }
        let converse = (0..self.len())
            .filter(|&a| self.converse[a] > a)
            .map(|a| (self.names[a].clone(), self.names[self.converse[a]].clone()))
            .collect();
        RaJson {
            atoms: self.names.clone(),
            identity: self.names[self.identity].clone(),
            converse,
            forbidden: reps
                .into_iter()
                .map(|[a, b, c]| [self.names[a].clone(), self.names[b].clone(), self.names[c].clone()])
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn atom(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn converse(&self, a: usize) -> usize {
        self.converse[a]
    }

    pub fn diversity(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| a != self.identity).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.converse.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// `c ≤ a;b`.
    pub fn consistent(&self, a: usize, b: usize, c: usize) -> bool {
        self.comp[a * self.len() + b].contains(c)
    }

    /// The atoms below `a;b`.
    pub fn compose_atoms(&self, a: usize, b: usize) -> &FixedBitSet {
        &self.comp[a * self.len() + b]
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn set_of(&self, atoms: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut s = self.empty_set();
        s.extend(atoms);
        s
    }

    /// Composition in the complex algebra.
    pub fn compose(&self, x: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for a in x.ones() {
            for b in y.ones() {
                out.union_with(self.compose_atoms(a, b));
            }
        }
        out
    }

    pub fn converse_set(&self, x: &FixedBitSet) -> FixedBitSet {
        self.set_of(x.ones().map(|a| self.converse[a]))
    }

    pub fn set_names(&self, x: &FixedBitSet) -> Vec<String> {
        x.ones().map(|a| self.names[a].clone()).collect()
    }

    fn diversity_triples(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let d = self.diversity();
        let d2 = d.clone();
        let d3 = d.clone();
        d.into_iter().flat_map(move |a| {
            let d3 = d3.clone();
            d2.clone().into_iter().flat_map(move |b| d3.clone().into_iter().map(move |c| [a, b, c]))
        })
    }

    /// The first atom triple where the consistency predicate is not closed
    /// under the Peircean transformations.
    pub fn peirce_violation(&self) -> Option<[String; 3]> {
        let k = self.len();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    let here = self.consistent(a, b, c);
                    if peirce_orbit(&self.converse, [a, b, c]).iter().any(|&[x, y, z]| self.consistent(x, y, z) != here) {
                        return Some([a, b, c].map(|x| self.names[x].clone()));
                    }
                }
            }
        }
        None
    }

    /// The first atom triple with `(a;b);c ≠ a;(b;c)`. Composition of the
    /// complex algebra is completely additive, so atoms suffice.
    pub fn associativity_violation(&self) -> Option<[String; 3]> {
        let k = self.len();
        for a in 0..k {
            for b in 0..k {
                let ab = self.compose_atoms(a, b);
                for c in 0..k {
                    let mut left = self.empty_set();
                    for x in ab.ones() {
                        left.union_with(self.compose_atoms(x, c));
                    }
                    let mut right = self.empty_set();
                    for y in self.compose_atoms(b, c).ones() {
                        right.union_with(self.compose_atoms(a, y));
                    }
                    if left != right {
                        return Some([a, b, c].map(|x| self.names[x].clone()));
                    }
                }
            }
        }
        None
    }

    pub fn check(&self) -> RaReport {
        RaReport {
            atoms: self.len(),
            symmetric: self.is_symmetric(),
            peirce_violation: self.peirce_violation(),
            associativity_violation: self.associativity_violation(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaReport {
    pub atoms: usize,
    pub symmetric: bool,
    pub peirce_violation: Option<[String; 3]>,
    pub associativity_violation: Option<[String; 3]>,
}

impl RaReport {
    pub fn passed(&self) -> bool {
        self.peirce_violation.is_none() && self.associativity_violation.is_none()
    }
}

/// The symmetric integral algebra on `Id, a1, …, ak` whose only forbidden
/// diversity triangles are the monochromatic ones.
pub fn maddux_ek23(k: usize) -> Result<FiniteRa> {
    if k == 0 {
        return Err(Error::Precondition("E_k(2,3) needs k ≥ 1".into()));
    }
    let mut names = vec!["Id".to_string()];
    names.extend((1..=k).map(|i| format!("a{i}")));
    let forbidden: Vec<[usize; 3]> = (1..=k).map(|a| [a, a, a]).collect();
    FiniteRa::from_forbidden(names, 0, (0..=k).collect(), &forbidden)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_diversity_atom_squares_to_identity() {
        let r = maddux_ek23(1).unwrap();
        let a = r.atom("a1").unwrap();
        assert_eq!(r.compose_atoms(a, a).ones().collect::<Vec<_>>(), vec![r.identity()]);
    }

    #[test]
    fn two_atoms() {
        let r = maddux_ek23(2).unwrap();
        let (a, b) = (r.atom("a1").unwrap(), r.atom("a2").unwrap());
        let ab = r.compose_atoms(a, b);
        assert!(ab.contains(a) && ab.contains(b) && !ab.contains(r.identity()));
        assert_eq!(r.compose_atoms(a, a).ones().collect::<Vec<_>>(), vec![0, b]);
    }

    #[test]
    fn small_maddux_algebras_are_associative() {
        for k in 1..=5 {
            let r = maddux_ek23(k).unwrap();
            assert!(r.check().passed(), "k={k}: {:?}", r.check());
        }
    }

    #[test]
    fn nonsymmetric_closure() {
        // a and its converse b: forbidding a ≤ a;a also forbids b ≤ b;b
        let names = ["Id", "a", "b", "c"].map(String::from).to_vec();
        let r = FiniteRa::from_forbidden(names, 0, vec![0, 2, 1, 3], &[[1, 1, 1]]).unwrap();
        assert!(!r.consistent(2, 2, 2));
        assert!(r.peirce_violation().is_none());
        assert!(r.consistent(1, 2, 0) && !r.consistent(1, 1, 0));
    }

    #[test]
    fn json_round_trip() {
        let r = maddux_ek23(3).unwrap();
        let j = r.to_json();
        assert_eq!(j.forbidden.len(), 3);
        assert_eq!(FiniteRa::from_json(&j).unwrap(), r);
        let text = serde_json::to_string(&j).unwrap();
        let back: RaJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn bad_tables_are_reported() {
        let names = ["Id", "a", "b"].map(String::from).to_vec();
        // c ≤ a;b for every diversity triple except a ≤ a;b: not Peirce-closed
        let r = FiniteRa::from_table(names, 0, vec![0, 1, 2], |a, b, c| !(a == 1 && b == 2 && c == 1)).unwrap();
        assert!(r.peirce_violation().is_some());
        assert!(matches!(
            FiniteRa::from_forbidden(vec!["Id".into(), "a".into()], 0, vec![0, 1], &[[0, 1, 1]]),
            Err(Error::Malformed(_))
        ));
    }
}
