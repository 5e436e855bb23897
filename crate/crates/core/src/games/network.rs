//! Games on arbitrary finite atom structures, played on atomic networks.

use std::collections::HashSet;
use std::sync::Arc;

use serde_json::{json, Value};

use super::graph::permute_groups;
use super::{Arena, Limit};
use crate::algebra::AtomStructure;
use crate::error::{Error, Result};

const UNSET: u32 = u32::MAX;

/// An atomic network: an atom on every `n`-tuple of nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Network {
    n: usize,
    len: usize,
    labels: Vec<u32>,
}

impl Network {
    pub fn new(n: usize, len: usize) -> Network {
        Network { n, len, labels: vec![UNSET; len.pow(n as u32)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.len + x)
    }

    pub fn label(&self, t: &[usize]) -> Option<usize> {
        match self.labels[self.index(t)] {
            UNSET => None,
            a => Some(a as usize),
        }
    }

    pub fn set(&mut self, t: &[usize], a: usize) {
        let i = self.index(t);
        self.labels[i] = a as u32;
    }

    fn unset(&mut self, t: &[usize]) {
        let i = self.index(t);
        self.labels[i] = UNSET;
    }

    /// Every tuple over the nodes, in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        all_tuples(self.len, self.n)
    }

    /// The same network with one more (unlabelled) node.
    fn grown(&self) -> Network {
        let mut g = Network::new(self.n, self.len + 1);
        for t in self.tuples() {
            if let Some(a) = self.label(&t) {
                g.set(&t, a);
            }
        }
        g
    }

    /// The first violated condition, if any.
    pub fn violation(&self, at: &AtomStructure) -> Option<String> {
        for t in self.tuples() {
            let Some(a) = self.label(&t) else { return Some(format!("{t:?} is unlabelled")) };
            if !pattern_ok(at, a, &t) {
                return Some(format!("{} on {t:?} disagrees with the diagonals", at.name(a)));
            }
            for j in 0..self.n {
                let mut u = t.clone();
                for y in 0..self.len {
                    u[j] = y;
                    let b = self.label(&u).unwrap_or(usize::MAX);
                    if b != usize::MAX && !at.cyl(j).holds(a, b) {
                        return Some(format!("{t:?} and {u:?} are not {j}-related"));
                    }
                }
            }
        }
        None
    }
}

pub(crate) fn all_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(k.pow(n as u32));
    let mut t = vec![0; n];
    if k == 0 {
        return out;
    }
    loop {
        out.push(t.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < k {
                break;
            }
            t[i] = 0;
        }
    }
}

/// `a ≤ d_ij` exactly when `t_i = t_j`.
fn pattern_ok(at: &AtomStructure, a: usize, t: &[usize]) -> bool {
    (0..t.len()).all(|i| (i + 1..t.len()).all(|j| at.diag(i, j).contains(a) == (t[i] == t[j])))
}

/// Labels for `todo` (in order) consistent with everything already labelled.
pub(super) fn fill(at: &AtomStructure, net: &mut Network, todo: &[Vec<usize>], first_only: bool, out: &mut Vec<Network>) {
    let Some((t, rest)) = todo.split_first() else {
        out.push(net.clone());
        return;
    };
    let fixed = net.label(t);
    let candidates: Vec<usize> = match fixed {
        Some(a) => vec![a],
        None => (0..at.len()).collect(),
    };
    for a in candidates {
        if !pattern_ok(at, a, t) {
            continue;
        }
        let fits = (0..net.n).all(|j| {
            let mut u = t.clone();
            (0..net.len).all(|y| {
                u[j] = y;
                y == t[j] || net.label(&u).is_none_or(|b| at.cyl(j).holds(a, b))
            })
        });
        if !fits {
            continue;
        }
        net.set(t, a);
        fill(at, net, rest, first_only, out);
        if fixed.is_none() {
            net.unset(t);
        }
        if first_only && !out.is_empty() {
            return;
        }
    }
}

/// Every network on one more node `z` that agrees with `net` and labels
/// `tuple[i/z]` with `atom`.
pub fn legal_extensions(at: &AtomStructure, net: &Network, i: usize, tuple: &[usize], atom: usize) -> Result<Vec<Network>> {
    let n = at.n();
    if net.dim() != n || tuple.len() != n {
        return Err(Error::Precondition(format!("a {n}-dimensional network needs {n}-tuples")));
    }
    if i >= n {
        return Err(Error::Index { index: i, dim: n });
    }
    if atom >= at.len() || tuple.iter().any(|&x| x >= net.len()) {
        return Err(Error::Precondition("tuple or atom out of range".into()));
    }
    let Some(a) = net.label(tuple) else {
        return Err(Error::Precondition(format!("{tuple:?} is unlabelled")));
    };
    if !at.cyl(i).holds(a, atom) {
        return Err(Error::Precondition(format!(
            "{} is not {i}-related to {}",
            at.name(atom),
            at.name(a)
        )));
    }
    let mut g = net.grown();
    let z = net.len();
    let mut target = tuple.to_vec();
    target[i] = z;
    g.set(&target, atom);
    let todo: Vec<Vec<usize>> = g.tuples().into_iter().filter(|t| t.contains(&z)).collect();
    let mut out = Vec::new();
    fill(at, &mut g, &todo, false, &mut out);
    Ok(out)
}

/// ∀ picks `tuple`, an index and an atom `i`-related to the tuple's label; ∃
/// must supply a node for the `i`-th place. With `drop`, the new node takes
/// that node's place.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkDemand {
    pub drop: Option<usize>,
    pub tuple: Vec<usize>,
    pub i: usize,
    pub atom: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetworkMove {
    Initial(usize),
    Demand(NetworkDemand),
}

pub struct NetworkArena {
    at: Arc<AtomStructure>,
    /// Cap on ∃'s alternatives per move; `None` lists them all.
    reply_cap: Option<usize>,
}

impl NetworkArena {
    pub fn new(at: Arc<AtomStructure>) -> NetworkArena {
        NetworkArena { at, reply_cap: None }
    }

    pub fn structure(&self) -> &AtomStructure {
        &self.at
    }

    fn witness(&self, net: &Network, d: &NetworkDemand) -> bool {
        let mut t = d.tuple.clone();
        (0..net.len()).any(|w| {
            t[d.i] = w;
            net.label(&t) == Some(d.atom)
        })
    }

    fn place(&self, net: &Network, d: &NetworkDemand) -> (Network, usize) {
        match d.drop {
            Some(v) => {
                let mut g = net.clone();
                for t in g.tuples() {
                    if t.contains(&v) {
                        g.unset(&t);
                    }
                }
                (g, v)
            }
            None => (net.grown(), net.len()),
        }
    }

    fn canonical(&self, net: &Network) -> Vec<u8> {
        let k = net.len();
        let tuples = net.tuples();
        let mut inv: Vec<(Vec<(u32, u32)>, usize)> = (0..k)
            .map(|x| {
                let mut v: Vec<(u32, u32)> = tuples
                    .iter()
                    .filter(|t| t.contains(&x))
                    .map(|t| {
                        let mask = t.iter().enumerate().filter(|(_, &y)| y == x).fold(0u32, |m, (j, _)| m | 1 << j);
                        (mask, net.label(t).map_or(UNSET, |a| a as u32))
                    })
                    .collect();
                v.sort_unstable();
                (v, x)
            })
            .collect();
        inv.sort();
        let mut order: Vec<usize> = inv.iter().map(|(_, x)| *x).collect();
        let mut groups = Vec::new();
        let mut start = 0;
        for a in 1..=k {
            if a == k || inv[a].0 != inv[start].0 {
                groups.push((start, a));
                start = a;
            }
        }
        let mut best: Option<Vec<u8>> = None;
        permute_groups(&mut order, &groups, 0, &mut |o| {
            let mut key = Vec::with_capacity(tuples.len() * 4 + 1);
            key.push(k as u8);
            for t in &tuples {
                let u: Vec<usize> = t.iter().map(|&a| o[a]).collect();
                key.extend(net.label(&u).map_or(UNSET, |a| a as u32).to_le_bytes());
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap_or_default()
    }
}

impl Arena for NetworkArena {
    type Pos = Network;
    type Move = NetworkMove;

    fn dim(&self) -> usize {
        self.at.n()
    }

    fn initial_moves(&self) -> Result<Vec<NetworkMove>> {
        Ok((0..self.at.len()).map(NetworkMove::Initial).collect())
    }

    /// The atom goes on a tuple whose equalities match its diagonals; the
    /// rest of the network is ∃'s choice.
    fn initial_replies(&self, mv: &NetworkMove) -> Vec<Network> {
        let NetworkMove::Initial(a) = *mv else { return vec![] };
        let n = self.at.n();
        let mut t = vec![0usize; n];
        let mut k = 0;
        for i in 0..n {
            match (0..i).find(|&j| self.at.diag(j, i).contains(a)) {
                Some(j) => t[i] = t[j],
                None => {
                    t[i] = k;
                    k += 1;
                }
            }
        }
        if !pattern_ok(&self.at, a, &t) {
            return vec![];
        }
        let mut net = Network::new(n, k);
        net.set(&t, a);
        let todo = net.tuples();
        let mut out = Vec::new();
        fill(&self.at, &mut net, &todo, false, &mut out);
        if let Some(c) = self.reply_cap {
            out.truncate(c);
        }
        out
    }

    fn demands(&self, net: &Network, limit: Limit) -> Vec<NetworkMove> {
        let k = net.len();
        let full = k >= limit.cap;
        if full && !limit.reuse {
            return vec![];
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for t in net.tuples() {
            let Some(a) = net.label(&t) else { continue };
            for i in 0..self.at.n() {
                for b in self.at.cyl(i).succ(a).ones() {
                    let mut face = t.clone();
                    face[i] = usize::MAX;
                    if !seen.insert((face, i, b)) {
                        continue;
                    }
                    let d = NetworkDemand { drop: None, tuple: t.clone(), i, atom: b };
                    if self.witness(net, &d) {
                        continue;
                    }
                    if full {
                        for v in 0..k {
                            if t.iter().enumerate().all(|(j, &x)| j == i || x != v) {
                                out.push(NetworkMove::Demand(NetworkDemand { drop: Some(v), ..d.clone() }));
                            }
                        }
                    } else {
                        out.push(NetworkMove::Demand(d));
                    }
                }
            }
        }
        out
    }

    fn replies(&self, net: &Network, mv: &NetworkMove, restricted: bool) -> Vec<Network> {
        let NetworkMove::Demand(d) = mv else { return vec![] };
        if self.witness(net, d) {
            return vec![net.clone()];
        }
        let (mut g, z) = self.place(net, d);
        let mut target = d.tuple.clone();
        target[d.i] = z;
        g.set(&target, d.atom);
        let todo: Vec<Vec<usize>> = g.tuples().into_iter().filter(|t| t.contains(&z)).collect();
        let mut out = Vec::new();
        fill(&self.at, &mut g, &todo, restricted, &mut out);
        if let Some(c) = self.reply_cap {
            out.truncate(c);
        }
        out
    }

    fn check_demand(&self, net: &Network, mv: &NetworkMove, limit: Limit) -> std::result::Result<(), String> {
        let NetworkMove::Demand(d) = mv else { return Err("initial move in a later round".into()) };
        let k = net.len();
        if d.tuple.len() != self.at.n() || d.i >= self.at.n() || d.tuple.iter().any(|&x| x >= k) {
            return Err(format!("bad tuple {:?}", d.tuple));
        }
        if d.atom >= self.at.len() {
            return Err("unknown atom".into());
        }
        let a = net.label(&d.tuple).ok_or("unlabelled tuple")?;
        if !self.at.cyl(d.i).holds(a, d.atom) {
            return Err(format!("{} is not {}-related to {}", self.at.name(d.atom), d.i, self.at.name(a)));
        }
        let full = k >= limit.cap;
        match d.drop {
            None if full => Err("node bound reached".into()),
            Some(_) if !full || !limit.reuse => Err("reuse not available".into()),
            Some(v) if v >= k || d.tuple.iter().enumerate().any(|(j, &x)| j != d.i && x == v) => {
                Err(format!("cannot reuse node {v}"))
            }
            _ => Ok(()),
        }
    }

    fn key(&self, net: &Network) -> Vec<u8> {
        self.canonical(net)
    }

    fn nodes(&self, net: &Network) -> usize {
        net.len()
    }

    fn move_json(&self, mv: &NetworkMove) -> Value {
        match mv {
            NetworkMove::Initial(a) => json!({ "atom": self.at.name(*a) }),
            NetworkMove::Demand(d) => json!({
                "drop": d.drop,
                "tuple": d.tuple,
                "i": d.i,
                "atom": self.at.name(d.atom),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Relation;
    use crate::games::{solve_game, GameConfig, Winner};
    use crate::toposet::square_frame;
    use fixedbitset::FixedBitSet;

    /// Every labelling of the new tuples, filtered by the network conditions.
    fn brute(at: &AtomStructure, net: &Network, i: usize, tuple: &[usize], atom: usize) -> Vec<Network> {
        let z = net.len();
        let mut g = net.grown();
        let todo: Vec<Vec<usize>> = g.tuples().into_iter().filter(|t| t.contains(&z)).collect();
        let mut out = Vec::new();
        let total = at.len().pow(todo.len() as u32);
        for mut code in 0..total {
            for t in &todo {
                g.set(t, code % at.len());
                code /= at.len();
            }
            let mut target = tuple.to_vec();
            target[i] = z;
            if g.label(&target) == Some(atom) && g.violation(at).is_none() {
                out.push(g.clone());
            }
        }
        out
    }

    #[test]
    fn extensions_match_brute_force() {
        let at = square_frame(3, 2, None).unwrap();
        let arena = NetworkArena::new(Arc::new(at.clone()));
        for a in 0..at.len() {
            for net in arena.initial_replies(&NetworkMove::Initial(a)) {
                assert_eq!(net.violation(&at), None);
                for t in net.tuples() {
                    let l = net.label(&t).unwrap();
                    for i in 0..2 {
                        for b in at.cyl(i).succ(l).ones() {
                            let mut fast = legal_extensions(&at, &net, i, &t, b).unwrap();
                            let mut slow = brute(&at, &net, i, &t, b);
                            fast.sort_by(|x, y| x.labels.cmp(&y.labels));
                            slow.sort_by(|x, y| x.labels.cmp(&y.labels));
                            assert_eq!(fast, slow);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unrelated_atom_is_rejected() {
        let at = square_frame(2, 2, None).unwrap();
        let arena = NetworkArena::new(Arc::new(at.clone()));
        let net = arena.initial_replies(&NetworkMove::Initial(0)).remove(0);
        let t = vec![0, 0];
        let a = net.label(&t).unwrap();
        let b = (0..at.len()).find(|&b| !at.cyl(0).holds(a, b)).unwrap();
        assert!(matches!(legal_extensions(&at, &net, 0, &t, b), Err(Error::Precondition(_))));
        assert!(matches!(legal_extensions(&at, &net, 0, &[0], a), Err(Error::Precondition(_))));
    }

    #[test]
    fn one_atom_structure() {
        let mut d = FixedBitSet::with_capacity(1);
        d.insert(0);
        let at = AtomStructure::new(3, vec!["a".into()], |_, _| d.clone(), vec![Relation::total(1); 3], None).unwrap();
        let arena = NetworkArena::new(Arc::new(at.clone()));
        let net = arena.initial_replies(&NetworkMove::Initial(0)).remove(0);
        assert_eq!(net.len(), 1);
        // a second node would have to be equal to the first
        assert!(legal_extensions(&at, &net, 0, &[0, 0, 0], 0).unwrap().is_empty());
        assert!(arena.demands(&net, Limit { cap: 8, reuse: false }).is_empty());
        for k in 0..4 {
            assert_eq!(solve_game(&arena, &GameConfig::gk(k)).unwrap().winner, Winner::Exists);
        }
    }

    #[test]
    fn set_frames_are_representable() {
        // square frames come from a representation, so ∃ never loses
        let arena = NetworkArena::new(Arc::new(square_frame(2, 2, None).unwrap()));
        assert_eq!(solve_game(&arena, &GameConfig::gk(4)).unwrap().winner, Winner::Exists);
    }
}
