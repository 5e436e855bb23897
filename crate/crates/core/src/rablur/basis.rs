//! Basic matrices over a relation algebra and `n`-dimensional cylindric bases.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::FiniteRa;
use crate::algebra::{AtomStructure, Relation};
use crate::error::{Error, Result};

pub const MATRIX_BUDGET: usize = 1_000_000;

/// `f : n × n → At R`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasicMatrix {
    pub n: usize,
    pub entries: Vec<usize>,
}

impl BasicMatrix {
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.entries[x * self.n + y]
    }

    /// The entries above the diagonal, e.g. `(a1,a2,Id)` for `n = 3`.
    pub fn label(&self, r: &FiniteRa) -> String {
        let mut parts = Vec::new();
        for x in 0..self.n {
            for y in x + 1..self.n {
                parts.push(r.name(self.get(x, y)));
            }
        }
        format!("({})", parts.join(","))
    }

    /// The first `(x, y, z)` with `f(x,y) ≰ f(x,z);f(z,y)`, or a non-identity
    /// diagonal entry as `(x, x, x)`.
    pub fn violation(&self, r: &FiniteRa) -> Option<(usize, usize, usize)> {
        let n = self.n;
        if self.entries.len() != n * n || self.entries.iter().any(|&a| a >= r.len()) {
            return Some((0, 0, 0));
        }
        for x in 0..n {
            if self.get(x, x) != r.identity() {
                return Some((x, x, x));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !r.consistent(self.get(x, z), self.get(z, y), self.get(x, y)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// The entries on pairs avoiding both `x` and `y`.
    fn outside(&self, x: usize, y: usize) -> Vec<usize> {
        let mut key = Vec::new();
        for w in 0..self.n {
            for z in 0..self.n {
                if w != x && w != y && z != x && z != y {
                    key.push(self.get(w, z));
                }
            }
        }
        key
    }
}

pub fn basic_matrices(r: &FiniteRa, n: usize) -> Result<Vec<BasicMatrix>> {
    basic_matrices_with(r, n, MATRIX_BUDGET)
}

/// Every basic matrix of dimension `n`, sorted by entries.
pub fn basic_matrices_with(r: &FiniteRa, n: usize, budget: usize) -> Result<Vec<BasicMatrix>> {
    if !(1..=5).contains(&n) {
        return Err(Error::Bound(format!("basic matrices are enumerated for 1 ≤ n ≤ 5, not {n}")));
    }
    let id = r.identity();
    let mut m = vec![id; n * n];
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|y| (0..y).map(move |x| (x, y))).collect();
    let mut out = Vec::new();
    fill(r, n, &pairs, 0, &mut m, &mut out, budget)?;
    out.sort();
    Ok(out)
}

fn fill(
    r: &FiniteRa,
    n: usize,
    pairs: &[(usize, usize)],
    at: usize,
    m: &mut Vec<usize>,
    out: &mut Vec<BasicMatrix>,
    budget: usize,
) -> Result<()> {
    let Some(&(x, y)) = pairs.get(at) else {
        if out.len() >= budget {
            return Err(Error::Budget(format!("more than {budget} basic matrices")));
        }
        out.push(BasicMatrix { n, entries: m.clone() });
        return Ok(());
    };
    let id = r.identity();
    for a in 0..r.len() {
        m[x * n + y] = a;
        m[y * n + x] = r.converse(a);
        // triangles {z, x, y} with z < x are complete once (x, y) is set
        let ok = (0..x).all(|z| {
            let pts = [x, y, z];
            pts.iter().all(|&p| {
                pts.iter().all(|&q| pts.iter().all(|&s| r.consistent(m[p * n + s], m[s * n + q], m[p * n + q])))
            })
        }) && r.consistent(m[x * n + y], m[y * n + x], id);
        if ok {
            fill(r, n, pairs, at + 1, m, out, budget)?;
        }
    }
    m[x * n + y] = id;
    m[y * n + x] = id;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisWitness {
    /// `a ≤ b;c` but no member has `f(0,1)=a`, `f(0,2)=b`, `f(2,1)=c`.
    Triangle { a: String, b: String, c: String },
    /// `f ≡_xy g` with no `h` such that `f ≡_x h ≡_y g`.
    Patch { f: String, g: String, x: usize, y: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReport {
    pub is_basis: bool,
    pub matrices: usize,
    pub triangle_instances: u64,
    pub patch_instances: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BasisWitness>,
}

/// Check both clauses of the definition of an `n`-dimensional cylindric basis
/// exhaustively. The triangle clause is vacuous for `n < 3`.
pub fn check_cylindric_basis(m: &[BasicMatrix], r: &FiniteRa, n: usize) -> Result<BasisReport> {
    for f in m {
        if f.n != n {
            return Err(Error::Precondition(format!("matrix {} is not {n}-dimensional", f.label(r))));
        }
        if let Some(v) = f.violation(r) {
            return Err(Error::Precondition(format!("{} is not a basic matrix at {v:?}", f.label(r))));
        }
    }
    let mut report =
        BasisReport { is_basis: true, matrices: m.len(), triangle_instances: 0, patch_instances: 0, witness: None };
    if n >= 3 {
        let have: HashSet<(usize, usize, usize)> = m.iter().map(|f| (f.get(0, 1), f.get(0, 2), f.get(2, 1))).collect();
        for a in 0..r.len() {
            for b in 0..r.len() {
                for c in 0..r.len() {
                    if !r.consistent(b, c, a) {
                        continue;
                    }
                    report.triangle_instances += 1;
                    if !have.contains(&(a, b, c)) {
                        report.is_basis = false;
                        report.witness = Some(BasisWitness::Triangle {
                            a: r.name(a).into(),
                            b: r.name(b).into(),
                            c: r.name(c).into(),
                        });
                        return Ok(report);
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let pairs: HashSet<(Vec<usize>, Vec<usize>)> =
                m.iter().map(|h| (h.outside(x, x), h.outside(y, y))).collect();
            let mut groups: HashMap<Vec<usize>, Vec<&BasicMatrix>> = HashMap::new();
            for f in m {
                groups.entry(f.outside(x, y)).or_default().push(f);
            }
            let mut keys: Vec<_> = groups.keys().cloned().collect();
            keys.sort();
            for key in keys {
                let group = &groups[&key];
                for f in group {
                    let fx = f.outside(x, x);
                    for g in group {
                        report.patch_instances += 1;
                        if !pairs.contains(&(fx.clone(), g.outside(y, y))) {
                            report.is_basis = false;
                            report.witness = Some(BasisWitness::Patch { f: f.label(r), g: g.label(r), x, y });
                            return Ok(report);
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The `CA_n` atom structure on a cylindric basis: `f T_i g` iff `f ≡_i g`,
/// and `f ∈ E_ij` iff `f(i,j) = Id`.
pub fn ca_atoms_from_basis(m: &[BasicMatrix], r: &FiniteRa, n: usize) -> Result<AtomStructure> {
    let report = check_cylindric_basis(m, r, n)?;
    if !report.is_basis {
        return Err(Error::Precondition(format!("not a cylindric basis: {:?}", report.witness)));
    }
    if m.is_empty() {
        return Err(Error::Precondition("an empty basis has no atom structure".into()));
    }
    let names: Vec<String> = m.iter().map(|f| f.label(r)).collect();
    let cyl = (0..n)
        .map(|i| {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let class: Vec<usize> = m
                .iter()
                .map(|f| {
                    let next = ids.len();
                    *ids.entry(f.outside(i, i)).or_insert(next)
                })
                .collect();
            Relation::from_classes(&class)
        })
        .collect();
    let diag = |i: usize, j: usize| {
        let mut s = FixedBitSet::with_capacity(m.len());
        s.extend(m.iter().enumerate().filter(|(_, f)| f.get(i, j) == r.identity()).map(|(k, _)| k));
        s
    };
    AtomStructure::new(n, names, diag, cyl, None)
}

#[cfg(test)]
mod tests {
    use super::super::maddux_ek23;
    use super::*;
    use crate::algebra::{check_ca_axioms, complex_algebra};

    /// Every map with identity diagonal, filtered by the two conditions.
    fn naive(r: &FiniteRa, n: usize) -> Vec<BasicMatrix> {
        let cells = n * n;
        let mut out = Vec::new();
        let total = r.len().pow(cells as u32);
        for code in 0..total {
            let mut c = code;
            let entries: Vec<usize> = (0..cells)
                .map(|_| {
                    let a = c % r.len();
                    c /= r.len();
                    a
                })
                .collect();
            let f = BasicMatrix { n, entries };
            if f.violation(r).is_none() {
                out.push(f);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn dimension_two_counts_atoms() {
        for k in 1..=4 {
            let r = maddux_ek23(k).unwrap();
            assert_eq!(basic_matrices(&r, 2).unwrap().len(), r.len());
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        let r = maddux_ek23(2).unwrap();
        assert_eq!(basic_matrices(&r, 3).unwrap(), naive(&r, 3));
        assert_eq!(basic_matrices(&r, 3).unwrap().len(), 13);
    }

    #[test]
    fn forbidden_patterns_never_occur() {
        let r = maddux_ek23(3).unwrap();
        for f in basic_matrices(&r, 3).unwrap() {
            let (a, b, c) = (f.get(0, 1), f.get(0, 2), f.get(1, 2));
            assert!(!(a == b && b == c && a != r.identity()));
        }
    }

    #[test]
    fn maddux_bases() {
        for k in 1..=3 {
            let r = maddux_ek23(k).unwrap();
            let m = basic_matrices(&r, 3).unwrap();
            let rep = check_cylindric_basis(&m, &r, 3).unwrap();
            assert!(rep.is_basis, "k={k}: {rep:?}");
        }
    }

    #[test]
    fn empty_set_misses_a_triangle() {
        let r = maddux_ek23(2).unwrap();
        let rep = check_cylindric_basis(&[], &r, 3).unwrap();
        assert!(matches!(rep.witness, Some(BasisWitness::Triangle { .. })));
    }

    #[test]
    fn every_mat3_member_is_needed_for_a_triangle() {
        let r = maddux_ek23(2).unwrap();
        let full = basic_matrices(&r, 3).unwrap();
        for drop in 0..full.len() {
            let mut m = full.clone();
            m.remove(drop);
            let rep = check_cylindric_basis(&m, &r, 3).unwrap();
            assert!(matches!(rep.witness, Some(BasisWitness::Triangle { .. })));
        }
    }

    #[test]
    fn pruning_mat4_breaks_a_patch() {
        let r = maddux_ek23(2).unwrap();
        let mut m = basic_matrices(&r, 4).unwrap();
        assert!(check_cylindric_basis(&m, &r, 4).unwrap().is_basis);
        m.remove(0);
        let rep = check_cylindric_basis(&m, &r, 4).unwrap();
        let Some(BasisWitness::Patch { f, g, x, y }) = rep.witness else { panic!("{rep:?}") };
        let find = |label: &str| m.iter().find(|h| h.label(&r) == label).unwrap().clone();
        let (f, g) = (find(&f), find(&g));
        let agree = |a: &BasicMatrix, b: &BasicMatrix, skip: &[usize]| {
            (0..4).all(|w| (0..4).all(|z| skip.contains(&w) || skip.contains(&z) || a.get(w, z) == b.get(w, z)))
        };
        assert!(agree(&f, &g, &[x, y]));
        assert!(!m.iter().any(|h| agree(&f, h, &[x]) && agree(h, &g, &[y])));
    }

    #[test]
    fn mat3_gives_a_ca3() {
        let r = maddux_ek23(2).unwrap();
        let m = basic_matrices(&r, 3).unwrap();
        let at = ca_atoms_from_basis(&m, &r, 3).unwrap();
        assert_eq!(at.len(), 13);
        assert!(check_ca_axioms(&complex_algebra(at)).unwrap().passed());
    }

    #[test]
    fn single_matrix_in_dimension_two() {
        let r = maddux_ek23(1).unwrap();
        let m = vec![BasicMatrix { n: 2, entries: vec![0, 1, 1, 0] }];
        let at = ca_atoms_from_basis(&m, &r, 2).unwrap();
        assert_eq!(at.len(), 1);
        assert!(check_ca_axioms(&complex_algebra(at)).unwrap().passed());
    }
}
