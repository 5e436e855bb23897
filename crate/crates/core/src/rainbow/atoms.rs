use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::graph::distinct_tuples;
use super::{Colour, ColouredGraph, Palette, RainbowSignature, NONE};
use crate::algebra::{AtomStructure, Relation};
use crate::error::{Error, Result};

/// Default cap on the number of atoms produced by [`enumerate_atoms`].
pub const ATOM_BUDGET: usize = 100_000;

/// A surjection class `[a]`: `pattern[i]` is the node `a(i)`, numbered by first
/// occurrence, so each class has exactly one representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowAtom {
    pub pattern: Vec<u8>,
    pub graph: ColouredGraph,
}

impl RainbowAtom {
    pub fn name(&self, p: &Palette) -> String {
        let pat: String = self.pattern.iter().map(|x| x.to_string()).collect();
        format!("{pat}|{}", self.graph.encode(p))
    }

    /// Key of `a` restricted to `n \ {i}`, which decides `T_i`.
    pub fn restriction_key(&self, i: usize) -> Vec<u8> {
        let mut nodes: Vec<usize> = Vec::new();
        let mut pattern = Vec::with_capacity(self.pattern.len());
        for (j, &x) in self.pattern.iter().enumerate() {
            if j == i {
                continue;
            }
            let x = x as usize;
            let pos = nodes.iter().position(|&y| y == x).unwrap_or_else(|| {
                nodes.push(x);
                nodes.len() - 1
            });
            pattern.push(pos as u8);
        }
        let mut out = pattern;
        out.push(NONE);
        self.graph.key(&nodes, &mut out);
        out
    }
}

pub struct RainbowAtoms {
    pub signature: RainbowSignature,
    pub palette: Palette,
    pub atoms: Vec<RainbowAtom>,
    pub structure: AtomStructure,
}

impl RainbowAtoms {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.structure.atom(name).ok()
    }
}

pub fn enumerate_atoms(sig: &RainbowSignature) -> Result<RainbowAtoms> {
    enumerate_atoms_with(sig, ATOM_BUDGET)
}

pub fn enumerate_atoms_with(sig: &RainbowSignature, budget: usize) -> Result<RainbowAtoms> {
    let palette = sig.palette()?;
    let n = sig.n;
    let mut atoms = Vec::new();
    for k in 1..=n {
        let patterns = growth_strings(n, k);
        let graphs = enumerate_graphs(&palette, k, false, budget.saturating_sub(atoms.len()) / patterns.len().max(1))?;
        for pattern in &patterns {
            for g in &graphs {
                atoms.push(RainbowAtom { pattern: pattern.clone(), graph: g.clone() });
            }
        }
        if atoms.len() > budget {
            return Err(Error::Budget(format!("more than {budget} atoms")));
        }
    }
    let names: Vec<String> = atoms.iter().map(|a| a.name(&palette)).collect();
    let size = atoms.len();
    let diag = |i: usize, j: usize| {
        let mut d = FixedBitSet::with_capacity(size);
        for (a, atom) in atoms.iter().enumerate() {
            d.set(a, atom.pattern[i] == atom.pattern[j]);
        }
        d
    };
    let cyl = (0..n).map(|i| classes(&atoms, i)).collect();
    let structure = AtomStructure::new(n, names, diag, cyl, None)?;
    Ok(RainbowAtoms { signature: sig.clone(), palette, atoms, structure })
}

fn classes(atoms: &[RainbowAtom], i: usize) -> Relation {
    let mut ids: HashMap<Vec<u8>, usize> = HashMap::new();
    let class_of: Vec<usize> = atoms
        .iter()
        .map(|a| {
            let next = ids.len();
            *ids.entry(a.restriction_key(i)).or_insert(next)
        })
        .collect();
    Relation::from_classes(&class_of)
}

/// Restricted growth strings of length `n` with exactly `k` blocks.
pub(crate) fn growth_strings(n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    fn go(n: usize, k: usize, cur: &mut Vec<u8>, max: u8, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            if max as usize + 1 == k {
                out.push(cur.clone());
            }
            return;
        }
        let top = if cur.is_empty() { 0 } else { max + 1 };
        for x in 0..=top {
            if x as usize >= k {
                break;
            }
            cur.push(x);
            go(n, k, cur, max.max(x), out);
            cur.pop();
        }
    }
    go(n, k, &mut Vec::new(), 0, &mut out);
    out
}

/// All consistent coloured graphs on the labelled nodes `0..k` (no `rho` edges).
/// With `full_only`, every yellow tuple gets the full shade.
pub fn enumerate_graphs(p: &Palette, k: usize, full_only: bool, budget: usize) -> Result<Vec<ColouredGraph>> {
    let n = p.n();
    let colours: Vec<u8> = (0..p.len() as u8).filter(|&c| !matches!(p.colour(c), Colour::Rho)).collect();
    let edges: Vec<(usize, usize)> = (1..k).flat_map(|q| (0..q).map(move |x| (x, q))).collect();
    let mut out = Vec::new();
    let mut g = ColouredGraph::with_nodes(n, k.max(1), k);
    let tuples = distinct_tuples(k, n - 1);
    let all_nodes: Vec<usize> = (0..k).collect();
    edge_search(p, &colours, &edges, 0, &mut g, &mut |g| {
        let yellow: Vec<&Vec<usize>> = tuples.iter().filter(|t| g.is_yellow_tuple(p, t)).collect();
        let cone = if k == n { g.cone(p, &all_nodes) } else { None };
        let shade_count = if full_only { 1 } else { p.shades().len() };
        let mut choice = vec![0usize; yellow.len()];
        loop {
            for (t, &s) in yellow.iter().zip(&choice) {
                g.set_shade(t, s as u8);
            }
            let ok = cone.as_ref().is_none_or(|c| p.shade(g.shade(&c.base)).contains(c.tint));
            if ok {
                if out.len() >= budget {
                    return Err(Error::Budget(format!("more than {budget} coloured graphs on {k} nodes")));
                }
                out.push(g.clone());
            }
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    for t in &yellow {
                        g.set_shade(t, NONE);
                    }
                    return Ok(());
                }
                choice[pos] += 1;
                if choice[pos] < shade_count {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    })?;
    Ok(out)
}

fn edge_search(
    p: &Palette,
    colours: &[u8],
    edges: &[(usize, usize)],
    at: usize,
    g: &mut ColouredGraph,
    emit: &mut dyn FnMut(&mut ColouredGraph) -> Result<()>,
) -> Result<()> {
    if at == edges.len() {
        return emit(g);
    }
    let (x, q) = edges[at];
    for &c in colours {
        g.set_edge(p, x, q, c);
        if (0..x).all(|r| !p.forbidden(g.edge(r, x), g.edge(r, q), c)) {
            edge_search(p, colours, edges, at + 1, g, emit)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{build_bf, build_czn, RedMode};
    use super::*;

    #[test]
    fn growth_string_counts() {
        assert_eq!(growth_strings(3, 1), vec![vec![0, 0, 0]]);
        assert_eq!(growth_strings(3, 2).len(), 3);
        assert_eq!(growth_strings(4, 2).len(), 7);
        assert_eq!(growth_strings(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn bf_atoms() {
        let at = enumerate_atoms(&build_bf(3).unwrap()).unwrap();
        assert_eq!(at.atoms.len(), 1050);
        for a in &at.atoms {
            assert_eq!(a.graph.violation(&at.palette), None);
        }
        let s = &at.structure;
        let id = s.atom("000|").unwrap();
        assert!(s.diag(0, 1).contains(id) && s.diag(1, 2).contains(id));
        for i in 0..3 {
            assert!(s.cyl(i).is_equivalence());
        }
    }

    #[test]
    fn tiny_signature() {
        let sig = RainbowSignature {
            n: 2,
            ranked: vec![],
            tints: vec![],
            red_pairs: vec![],
            copies: None,
            red_mode: RedMode::DistinctPairs,
            order_preserving: false,
            yellow_max: 0,
        };
        let at = enumerate_atoms(&sig).unwrap();
        assert_eq!(at.structure.names(), &["00|".to_string(), "01|w0".to_string()]);
    }

    #[test]
    fn czn_with_shades_hits_budget() {
        let sig = build_czn(3, 5).unwrap();
        assert!(matches!(enumerate_atoms(&sig), Err(Error::Budget(_))));
        let mut single = sig.clone();
        single.yellow_max = 0;
        let p = single.palette().unwrap();
        assert_eq!(enumerate_graphs(&p, 3, true, ATOM_BUDGET).unwrap().len(), 68546);
    }
}
