//! The hypernetwork game `H_k`.
//!
//! A position is the list of hypernetworks played so far. Nodes carry global
//! names, so that two played hypernetworks can share nodes; hyperedges are
//! node sequences of length at most `hyperedge_len_bound`. Nodes are never
//! identified (`x ∼ y` only when `x = y`), so a hyperedge is short exactly
//! when it has at most `n` distinct nodes. Short hyperedges carry `λ₀` and are
//! not stored; every long hyperedge ∃ creates gets a label used nowhere else.
//!
//! ∀ may extend a played hypernetwork by a cylindrifier demand, copy part of
//! one under a renaming of nodes (a transformation move, answered
//! mechanically), or ask for an amalgam of two that agree on their common
//! nodes. Transformations rename all nodes injectively: a non-injective `θ`
//! only duplicates nodes, and the result is `∼`-equivalent to a renaming.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Value};

use super::network::all_tuples;
use super::{position_hash, Arena, Certificate, GameConfig, GraphArena, Limit, Network, NetworkArena, SolveResult, Variant, Winner};
use crate::error::{Error, Result};
use crate::rainbow::graph::distinct_tuples;
use crate::rainbow::{Colour, ColouredGraph, Palette, NONE};

/// Arenas that can also copy, compare and amalgamate positions.
pub trait HyperArena: Arena {
    /// The subposition on `nodes`, renumbered in that order.
    fn restrict(&self, p: &Self::Pos, nodes: &[usize]) -> Self::Pos;
    /// Whether `a` on `pairs[..].0` is the same as `b` on `pairs[..].1`.
    fn agree(&self, a: &Self::Pos, b: &Self::Pos, pairs: &[(usize, usize)]) -> bool;
    /// Positions on the nodes of `a` followed by those of `b` not in `pairs`,
    /// extending both.
    fn amalgams(&self, a: &Self::Pos, b: &Self::Pos, pairs: &[(usize, usize)]) -> Vec<Self::Pos>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperConfig {
    pub rounds: usize,
    pub hyperedge_len_bound: usize,
    pub transformations: bool,
    pub amalgamations: bool,
}

impl HyperConfig {
    pub fn new(rounds: usize, hyperedge_len_bound: usize) -> HyperConfig {
        HyperConfig { rounds, hyperedge_len_bound, transformations: true, amalgamations: true }
    }

    /// Only cylindrifier moves: the game is then `G_k` played on copies.
    pub fn cylindrifier_only(mut self) -> HyperConfig {
        self.transformations = false;
        self.amalgamations = false;
        self
    }

    pub fn from_game(cfg: &GameConfig, n: usize) -> Result<HyperConfig> {
        if cfg.variant != Variant::Hk {
            return Err(Error::Precondition("not an Hk configuration".into()));
        }
        cfg.validate(n)?;
        Ok(HyperConfig::new(cfg.rounds, cfg.hyperedge_len_bound.unwrap_or(n + 1)))
    }
}

#[derive(Clone, Debug)]
struct Hyper<P> {
    pos: P,
    ids: Vec<u32>,
    /// Labels of the long hyperedges, by global node names.
    labels: BTreeMap<Vec<u32>, u32>,
}

#[derive(Clone, Debug)]
struct State<P> {
    played: Vec<Hyper<P>>,
    next_id: u32,
    next_label: u32,
}

#[derive(Clone, Debug)]
enum HyperMove<M> {
    Cylindrifier { source: usize, demand: M },
    Transform { source: usize, map: Vec<(usize, u32)> },
    Amalgamate { left: usize, right: usize },
}

struct Game<'a, A: HyperArena> {
    arena: &'a A,
    cfg: &'a HyperConfig,
    limit: Limit,
    budget: usize,
    explored: usize,
}

impl<A: HyperArena> Game<'_, A> {
    fn long(&self, seq: &[u32]) -> bool {
        seq.iter().collect::<BTreeSet<_>>().len() > self.arena.dim()
    }

    /// Long hyperedges on `ids` that use at least one node of `new`.
    fn fresh_labels(&self, ids: &[u32], new: &[u32], labels: &mut BTreeMap<Vec<u32>, u32>, next: &mut u32) {
        let n = self.arena.dim();
        for len in n + 1..=self.cfg.hyperedge_len_bound {
            for t in all_tuples(ids.len(), len) {
                let seq: Vec<u32> = t.iter().map(|&a| ids[a]).collect();
                if self.long(&seq) && seq.iter().any(|x| new.contains(x)) && !labels.contains_key(&seq) {
                    labels.insert(seq, *next);
                    *next += 1;
                }
            }
        }
    }

    fn charge(&mut self) -> Result<()> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(Error::Budget(format!("hypergame explored more than {} states", self.budget)));
        }
        Ok(())
    }

    fn moves(&self, s: &State<A::Pos>) -> Vec<HyperMove<A::Move>> {
        let mut out = Vec::new();
        for (h, hyp) in s.played.iter().enumerate() {
            for d in self.arena.demands(&hyp.pos, self.limit) {
                out.push(HyperMove::Cylindrifier { source: h, demand: d });
            }
        }
        if self.cfg.transformations {
            let pool: Vec<u32> = (0..s.next_id).collect();
            for (h, hyp) in s.played.iter().enumerate() {
                let nodes: Vec<usize> = (0..hyp.ids.len()).collect();
                name_nodes(&nodes, &pool, s.next_id, &mut Vec::new(), &mut out, h);
            }
        }
        if self.cfg.amalgamations {
            for a in 0..s.played.len() {
                for b in a + 1..s.played.len() {
                    if self.shared(&s.played[a], &s.played[b]).is_some() {
                        out.push(HyperMove::Amalgamate { left: a, right: b });
                    }
                }
            }
        }
        out
    }

    /// Common nodes of two played hypernetworks, when there are some, they
    /// agree there and neither contains the other (the larger one is then an
    /// amalgam already).
    fn shared(&self, a: &Hyper<A::Pos>, b: &Hyper<A::Pos>) -> Option<Vec<(usize, usize)>> {
        let pairs: Vec<(usize, usize)> = a
            .ids
            .iter()
            .enumerate()
            .filter_map(|(x, id)| b.ids.iter().position(|y| y == id).map(|y| (x, y)))
            .collect();
        if pairs.is_empty() || pairs.len() == a.ids.len() || pairs.len() == b.ids.len() {
            return None;
        }
        if !self.arena.agree(&a.pos, &b.pos, &pairs) {
            return None;
        }
        let common: BTreeSet<u32> = pairs.iter().map(|&(x, _)| a.ids[x]).collect();
        let on_common = |seq: &Vec<u32>| seq.iter().all(|x| common.contains(x));
        let la: Vec<_> = a.labels.iter().filter(|(s, _)| on_common(s)).collect();
        let lb: Vec<_> = b.labels.iter().filter(|(s, _)| on_common(s)).collect();
        (la == lb).then_some(pairs)
    }

    /// ∃'s answers; an empty list means she is stuck.
    fn answers(&self, s: &State<A::Pos>, mv: &HyperMove<A::Move>) -> Vec<State<A::Pos>> {
        match mv {
            HyperMove::Cylindrifier { source, demand } => {
                let hyp = &s.played[*source];
                self.arena
                    .replies(&hyp.pos, demand, false)
                    .into_iter()
                    .map(|q| {
                        let mut t = s.clone();
                        let mut ids = hyp.ids.clone();
                        let mut new = Vec::new();
                        while ids.len() < self.arena.nodes(&q) {
                            ids.push(t.next_id);
                            new.push(t.next_id);
                            t.next_id += 1;
                        }
                        let mut labels = hyp.labels.clone();
                        self.fresh_labels(&ids, &new, &mut labels, &mut t.next_label);
                        t.played.push(Hyper { pos: q, ids, labels });
                        t
                    })
                    .collect()
            }
            HyperMove::Transform { source, map } => {
                let hyp = &s.played[*source];
                let nodes: Vec<usize> = map.iter().map(|&(x, _)| x).collect();
                let ids: Vec<u32> = map.iter().map(|&(_, id)| id).collect();
                let rename: BTreeMap<u32, u32> = map.iter().map(|&(x, id)| (hyp.ids[x], id)).collect();
                let labels = hyp
                    .labels
                    .iter()
                    .filter_map(|(seq, &l)| {
                        let t: Option<Vec<u32>> = seq.iter().map(|x| rename.get(x).copied()).collect();
                        t.map(|t| (t, l))
                    })
                    .collect();
                let mut t = s.clone();
                t.next_id = t.next_id.max(ids.iter().max().map_or(0, |m| m + 1));
                t.played.push(Hyper { pos: self.arena.restrict(&hyp.pos, &nodes), ids, labels });
                vec![t]
            }
            HyperMove::Amalgamate { left, right } => {
                let (a, b) = (&s.played[*left], &s.played[*right]);
                let Some(pairs) = self.shared(a, b) else { return vec![] };
                let mut ids = a.ids.clone();
                let new: Vec<u32> = b.ids.iter().copied().filter(|id| !a.ids.contains(id)).collect();
                ids.extend(&new);
                self.arena
                    .amalgams(&a.pos, &b.pos, &pairs)
                    .into_iter()
                    .map(|q| {
                        let mut t = s.clone();
                        let mut labels = a.labels.clone();
                        labels.extend(b.labels.iter().map(|(k, v)| (k.clone(), *v)));
                        // hyperedges mixing both sides are new
                        let only_a: Vec<u32> = a.ids.iter().copied().filter(|id| !b.ids.contains(id)).collect();
                        let mut mixed = BTreeMap::new();
                        self.fresh_labels(&ids, &new, &mut mixed, &mut 0);
                        for seq in mixed.keys() {
                            if seq.iter().any(|x| only_a.contains(x)) && !labels.contains_key(seq) {
                                labels.insert(seq.clone(), t.next_label);
                                t.next_label += 1;
                            }
                        }
                        t.played.push(Hyper { pos: q, ids: ids.clone(), labels });
                        t
                    })
                    .collect()
            }
        }
    }

    fn move_json(&self, s: &State<A::Pos>, mv: &HyperMove<A::Move>) -> Value {
        match mv {
            HyperMove::Cylindrifier { source, demand } => {
                let mut v = self.arena.move_json(demand);
                if let Value::Object(m) = &mut v {
                    m.insert("kind".into(), json!("cylindrifier"));
                    m.insert("on".into(), json!(s.played[*source].ids));
                }
                v
            }
            HyperMove::Transform { source, map } => json!({
                "kind": "transformation",
                "on": s.played[*source].ids,
                "theta": map.iter().map(|&(x, id)| (id, s.played[*source].ids[x])).collect::<Vec<_>>(),
            }),
            HyperMove::Amalgamate { left, right } => json!({
                "kind": "amalgamation",
                "left": s.played[*left].ids,
                "right": s.played[*right].ids,
            }),
        }
    }

    /// ∀'s winning strategy for the remaining `r` rounds, if he has one.
    fn forall(&mut self, s: &State<A::Pos>, r: usize) -> Result<Option<Value>> {
        self.charge()?;
        if r == 0 {
            return Ok(None);
        }
        'mv: for mv in self.moves(s) {
            let answers = self.answers(s, &mv);
            let mut subtrees = Vec::with_capacity(answers.len());
            for t in &answers {
                match self.forall(t, r - 1)? {
                    Some(tree) => subtrees.push(tree),
                    None => continue 'mv,
                }
            }
            let last = &s.played[s.played.len() - 1];
            return Ok(Some(json!({
                "position_hash": position_hash(&self.arena.key(&last.pos)),
                "move": self.move_json(s, &mv),
                "replies": subtrees,
            })));
        }
        Ok(None)
    }
}

fn name_nodes<M>(nodes: &[usize], pool: &[u32], next: u32, map: &mut Vec<(usize, u32)>, out: &mut Vec<HyperMove<M>>, h: usize) {
    let a = map.len();
    if a == nodes.len() {
        out.push(HyperMove::Transform { source: h, map: map.clone() });
        return;
    }
    let fresh = next + map.iter().filter(|&&(_, id)| id >= next).count() as u32;
    let mut choices: Vec<u32> = pool.iter().copied().filter(|id| map.iter().all(|&(_, m)| m != *id)).collect();
    // fresh names are interchangeable: take the least unused one
    choices.push(fresh);
    for id in choices {
        map.push((nodes[a], id));
        name_nodes(nodes, pool, next, map, out, h);
        map.pop();
    }
}

/// Exact winner of `H_k`, searching every move and reply. `budget` caps the
/// number of visited states.
pub fn solve_hypergame<A: HyperArena>(arena: &A, cfg: &HyperConfig, budget: usize) -> Result<SolveResult> {
    let n = arena.dim();
    if cfg.rounds > 20 {
        return Err(Error::Precondition(format!("at most 20 rounds, got {}", cfg.rounds)));
    }
    if cfg.hyperedge_len_bound > n + 3 {
        return Err(Error::Bound(format!("hyperedges longer than {} are not tracked", n + 3)));
    }
    let limit = Limit { cap: cfg.rounds + n, reuse: false };
    if cfg.rounds == 0 {
        return Ok(SolveResult {
            winner: Winner::Exists,
            rounds: 0,
            decided_at: None,
            certificate: Certificate::Trivial { node_cap: limit.cap },
            memo_entries: 0,
        });
    }
    let mut game = Game { arena, cfg, limit, budget, explored: 0 };
    for mv in arena.initial_moves()? {
        let mut subtrees = Vec::new();
        let mut lost = true;
        for p in arena.initial_replies(&mv) {
            let k = arena.nodes(&p) as u32;
            let ids: Vec<u32> = (0..k).collect();
            let mut s = State { played: Vec::new(), next_id: k, next_label: 0 };
            let mut labels = BTreeMap::new();
            game.fresh_labels(&ids, &ids, &mut labels, &mut s.next_label);
            s.played.push(Hyper { pos: p, ids, labels });
            match game.forall(&s, cfg.rounds - 1)? {
                Some(t) => subtrees.push(t),
                None => {
                    lost = false;
                    break;
                }
            }
        }
        if lost {
            return Ok(SolveResult {
                winner: Winner::Forall,
                rounds: cfg.rounds,
                decided_at: None,
                certificate: Certificate::Strategy {
                    tree: json!({ "initial": arena.move_json(&mv), "replies": subtrees }),
                    node_cap: limit.cap,
                },
                memo_entries: game.explored,
            });
        }
    }
    Ok(SolveResult {
        winner: Winner::Exists,
        rounds: cfg.rounds,
        decided_at: None,
        certificate: Certificate::Memo {
            positions: game.explored as u64,
            digest: String::new(),
            node_cap: limit.cap,
            exact_search: true,
        },
        memo_entries: game.explored,
    })
}

impl HyperArena for NetworkArena {
    fn restrict(&self, net: &Network, nodes: &[usize]) -> Network {
        let mut out = Network::new(net.dim(), nodes.len());
        for t in out.tuples() {
            let u: Vec<usize> = t.iter().map(|&a| nodes[a]).collect();
            if let Some(a) = net.label(&u) {
                out.set(&t, a);
            }
        }
        out
    }

    fn agree(&self, a: &Network, b: &Network, pairs: &[(usize, usize)]) -> bool {
        let left: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let right: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        self.restrict(a, &left) == self.restrict(b, &right)
    }

    fn amalgams(&self, a: &Network, b: &Network, pairs: &[(usize, usize)]) -> Vec<Network> {
        let extra: Vec<usize> = (0..b.len()).filter(|y| pairs.iter().all(|p| p.1 != *y)).collect();
        let mut place = vec![0; b.len()];
        for &(x, y) in pairs {
            place[y] = x;
        }
        for (e, &y) in extra.iter().enumerate() {
            place[y] = a.len() + e;
        }
        let mut g = Network::new(a.dim(), a.len() + extra.len());
        for t in a.tuples() {
            if let Some(l) = a.label(&t) {
                g.set(&t, l);
            }
        }
        for t in b.tuples() {
            if let Some(l) = b.label(&t) {
                let u: Vec<usize> = t.iter().map(|&y| place[y]).collect();
                g.set(&u, l);
            }
        }
        let todo: Vec<Vec<usize>> = g.tuples().into_iter().filter(|t| g.label(t).is_none()).collect();
        self.fill_all(&mut g, &todo)
    }
}

impl HyperArena for GraphArena {
    fn restrict(&self, g: &ColouredGraph, nodes: &[usize]) -> ColouredGraph {
        g.induced(nodes).with_capacity(self.capacity())
    }

    fn agree(&self, a: &ColouredGraph, b: &ColouredGraph, pairs: &[(usize, usize)]) -> bool {
        let left: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let right: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let mut ka = Vec::new();
        let mut kb = Vec::new();
        a.key(&left, &mut ka);
        b.key(&right, &mut kb);
        ka == kb
    }

    fn amalgams(&self, a: &ColouredGraph, b: &ColouredGraph, pairs: &[(usize, usize)]) -> Vec<ColouredGraph> {
        let p = self.palette();
        let extra: Vec<usize> = (0..b.len()).filter(|y| pairs.iter().all(|q| q.1 != *y)).collect();
        let total = a.len() + extra.len();
        if total > self.capacity() {
            return vec![];
        }
        let mut place = vec![0; b.len()];
        for &(x, y) in pairs {
            place[y] = x;
        }
        let mut g = a.clone();
        for (e, &y) in extra.iter().enumerate() {
            g.add_node();
            place[y] = a.len() + e;
        }
        for x in 0..b.len() {
            for y in 0..b.len() {
                if x != y {
                    g.set_edge(p, place[x], place[y], b.edge(x, y));
                }
            }
        }
        for t in b.tuples().iter() {
            let u: Vec<usize> = t.iter().map(|&y| place[y]).collect();
            g.set_shade(&u, b.shade(&t));
        }
        let only_a: Vec<usize> = (0..a.len()).filter(|x| pairs.iter().all(|q| q.0 != *x)).collect();
        let only_b: Vec<usize> = extra.iter().map(|&y| place[y]).collect();
        let cross: Vec<(usize, usize)> = only_a.iter().flat_map(|&x| only_b.iter().map(move |&y| (x, y))).collect();
        let colours: Vec<u8> = (0..p.len() as u8).filter(|&c| !matches!(p.colour(c), Colour::Rho)).collect();
        let mut out = Vec::new();
        cross_edges(p, &colours, &mut g, &cross, &only_a, &only_b, &mut out);
        out
    }
}

impl NetworkArena {
    fn fill_all(&self, g: &mut Network, todo: &[Vec<usize>]) -> Vec<Network> {
        let mut out = Vec::new();
        super::network::fill(self.structure(), g, todo, false, &mut out);
        out
    }
}

/// Colour the edges in `cross` one at a time, then shade the mixed tuples
/// minimally and keep the results that are coloured graphs.
fn cross_edges(
    p: &Palette,
    colours: &[u8],
    g: &mut ColouredGraph,
    cross: &[(usize, usize)],
    only_a: &[usize],
    only_b: &[usize],
    out: &mut Vec<ColouredGraph>,
) {
    let Some((&(x, y), rest)) = cross.split_first() else {
        let mut h = g.clone();
        for t in distinct_tuples(h.len(), h.dim() - 1).iter() {
            let mixed = t.iter().any(|v| only_a.contains(v)) && t.iter().any(|v| only_b.contains(v));
            if !mixed {
                continue;
            }
            if h.is_yellow_tuple(p, &t) {
                let tints = h.base_tints(p, &t);
                h.set_shade(&t, p.minimal_shade(&tints));
            } else {
                h.set_shade(&t, NONE);
            }
        }
        if h.violation(p).is_none() {
            out.push(h);
        }
        return;
    };
    for &c in colours {
        let ok = (0..g.len()).all(|w| {
            if w == x || w == y {
                return true;
            }
            let (xw, yw) = (g.edge(x, w), g.edge(y, w));
            xw == NONE || yw == NONE || !p.forbidden(c, xw, yw)
        });
        if ok {
            g.set_edge(p, x, y, c);
            cross_edges(p, colours, g, rest, only_a, only_b, out);
        }
    }
    g.unset_edge(x, y);
}

/// Convenience for a shared structure.
pub fn network_hypergame(at: Arc<crate::algebra::AtomStructure>, cfg: &HyperConfig, budget: usize) -> Result<SolveResult> {
    solve_hypergame(&NetworkArena::new(at), cfg, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AtomStructure, Relation};
    use crate::games::solve_game;
    use crate::rainbow::build_czn;
    use fixedbitset::FixedBitSet;

    fn one_atom() -> Arc<AtomStructure> {
        let mut d = FixedBitSet::with_capacity(1);
        d.insert(0);
        Arc::new(AtomStructure::new(3, vec!["a".into()], |_, _| d.clone(), vec![Relation::total(1); 3], None).unwrap())
    }

    #[test]
    fn zero_rounds() {
        let r = network_hypergame(one_atom(), &HyperConfig::new(0, 4), 1000).unwrap();
        assert_eq!(r.winner, Winner::Exists);
        assert!(matches!(r.certificate, Certificate::Trivial { .. }));
    }

    #[test]
    fn one_atom_three_rounds() {
        let r = network_hypergame(one_atom(), &HyperConfig::new(3, 4), 100_000).unwrap();
        assert_eq!(r.winner, Winner::Exists);
    }

    #[test]
    fn cylindrifier_moves_match_the_graph_game() {
        let mut sig = build_czn(3, 1).unwrap();
        sig.yellow_max = 0;
        let arena = GraphArena::new(&sig, 8).unwrap();
        for k in 1..=2 {
            let h = solve_hypergame(&arena, &HyperConfig::new(k, 4).cylindrifier_only(), 10_000_000).unwrap();
            let g = solve_game(&arena, &GameConfig::gk(k)).unwrap();
            assert_eq!(h.winner, g.winner, "k = {k}");
        }
    }

    #[test]
    fn fresh_names_are_canonical() {
        let mut out: Vec<HyperMove<()>> = Vec::new();
        name_nodes(&[0, 1], &[0], 1, &mut Vec::new(), &mut out, 0);
        let maps: Vec<Vec<(usize, u32)>> = out
            .into_iter()
            .map(|m| match m {
                HyperMove::Transform { map, .. } => map,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(maps, vec![vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)], vec![(0, 1), (1, 2)]]);
    }
}
