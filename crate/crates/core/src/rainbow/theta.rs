use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{Colour, ColouredGraph, RainbowAtoms};
use crate::error::{Error, Result};

/// For each atom of `blown`, the atom of `fine` obtained by erasing the red
/// superscripts.
pub fn copy_map(fine: &RainbowAtoms, blown: &RainbowAtoms) -> Result<Vec<usize>> {
    let (fp, bp) = (&fine.palette, &blown.palette);
    let recolour: Vec<Option<u8>> = bp
        .colours()
        .iter()
        .map(|c| match c {
            Colour::Red { i, j, .. } => fp.id(&Colour::Red { copy: None, i: *i, j: *j }),
            Colour::Rho => None,
            other => fp.id(other),
        })
        .collect();
    blown
        .atoms
        .iter()
        .map(|a| {
            let g = &a.graph;
            let mut h = ColouredGraph::with_nodes(g.dim(), g.capacity(), g.len());
            for x in 0..g.len() {
                for y in 0..g.len() {
                    if x != y {
                        let c = recolour[g.edge(x, y) as usize]
                            .ok_or_else(|| Error::Precondition(format!("no fine colour for {}", bp.colour(g.edge(x, y)))))?;
                        h.set_edge(fp, x, y, c);
                    }
                }
            }
            for t in g.yellow_tuples(bp) {
                let shade = fp.shade_id(bp.shade(g.shade(&t))).ok_or_else(|| Error::Precondition("shade families differ".into()))?;
                h.set_shade(&t, shade);
            }
            let fine_atom = super::RainbowAtom { pattern: a.pattern.clone(), graph: h };
            let name = fine_atom.name(fp);
            fine.index_of(&name).ok_or_else(|| Error::Precondition(format!("copy map: `{name}` is not a fine atom")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaFailure {
    pub kind: String,
    pub instance: String,
    pub atom: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub fine_atoms: usize,
    pub blown_atoms: usize,
    pub injective: bool,
    pub diagonal_instances: usize,
    pub cylindrifier_instances: usize,
    pub failures: Vec<ThetaFailure>,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.injective && self.failures.is_empty()
    }
}

/// Check that `Θ(a) = join of the copies of a` is an injective homomorphism on
/// the complex algebras, atom by atom (both sides are additive).
pub fn theta_check(fine: &RainbowAtoms, blown: &RainbowAtoms, map: &[usize]) -> Result<ThetaReport> {
    let (f, b) = (&fine.structure, &blown.structure);
    if map.len() != b.len() || map.iter().any(|&a| a >= f.len()) {
        return Err(Error::Precondition("copy map is not a partition of the blown atoms".into()));
    }
    if f.n() != b.n() {
        return Err(Error::Precondition("dimensions differ".into()));
    }
    let mut pre = vec![FixedBitSet::with_capacity(b.len()); f.len()];
    for (x, &a) in map.iter().enumerate() {
        pre[a].insert(x);
    }
    let theta = |s: &FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(b.len());
        for a in s.ones() {
            out.union_with(&pre[a]);
        }
        out
    };
    let mut failures = Vec::new();
    let mut injective = true;
    for (a, p) in pre.iter().enumerate() {
        if p.is_clear() {
            injective = false;
            failures.push(ThetaFailure { kind: "injectivity".into(), instance: String::new(), atom: f.name(a).into() });
        }
    }
    let n = f.n();
    let mut diagonal_instances = 0;
    for l in 0..n {
        for k in l + 1..n {
            let image = theta(f.diag(l, k));
            diagonal_instances += 1;
            if &image != b.diag(l, k) {
                let x = image.symmetric_difference(b.diag(l, k)).next().unwrap();
                failures.push(ThetaFailure {
                    kind: "diagonal".into(),
                    instance: format!("l={l},k={k}"),
                    atom: b.name(x).into(),
                });
            }
        }
    }
    let mut cylindrifier_instances = 0;
    for i in 0..n {
        for a in 0..f.len() {
            cylindrifier_instances += 1;
            let lhs = theta(&f.cyl(i).diamond(&f.singleton(a)));
            let rhs = b.cyl(i).diamond(&pre[a]);
            if lhs != rhs {
                failures.push(ThetaFailure {
                    kind: "cylindrifier".into(),
                    instance: format!("i={i}"),
                    atom: f.name(a).into(),
                });
            }
        }
    }
    Ok(ThetaReport {
        fine_atoms: f.len(),
        blown_atoms: b.len(),
        injective,
        diagonal_instances,
        cylindrifier_instances,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{blow_up_reds, build_bf, enumerate_atoms};
    use super::*;

    #[test]
    fn single_copy_is_an_isomorphism() {
        let sig = build_bf(3).unwrap();
        let fine = enumerate_atoms(&sig).unwrap();
        let blown = enumerate_atoms(&blow_up_reds(&sig, 1).unwrap()).unwrap();
        assert_eq!(fine.atoms.len(), blown.atoms.len());
        let map = copy_map(&fine, &blown).unwrap();
        let mut seen = map.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), fine.atoms.len());
        assert!(theta_check(&fine, &blown, &map).unwrap().passed());
    }

    #[test]
    fn merged_atoms_break_injectivity() {
        let sig = build_bf(3).unwrap();
        let fine = enumerate_atoms(&sig).unwrap();
        let blown = enumerate_atoms(&blow_up_reds(&sig, 2).unwrap()).unwrap();
        let mut map = copy_map(&fine, &blown).unwrap();
        let victim = map[map.len() - 1];
        let target = map[0];
        for m in map.iter_mut() {
            if *m == victim {
                *m = target;
            }
        }
        let report = theta_check(&fine, &blown, &map).unwrap();
        assert!(!report.injective);
        assert_eq!(report.failures[0].atom, fine.structure.name(victim));
    }
}
