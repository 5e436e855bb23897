//! Games on rainbow atom structures, played on coloured graphs.
//!
//! Two dominance facts keep the yellow shades small. ∃ is never constrained by
//! a shade ∀ chose, while ∀ may only cone over a base whose shade contains the
//! tint; so ∀ always labels his new tuples with the full shade, and ∃ labels
//! hers with the least shade of the family that admits the cones already
//! present.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::{solve_game_with, Arena, GameConfig, Limit, SolveResult};
use crate::error::{Error, Result};
use crate::rainbow::graph::{distinct_tuples, subsets};
use crate::rainbow::{enumerate_graphs, Colour, ColouredGraph, Palette, RainbowSignature, ATOM_BUDGET, NONE};

/// ∀ asks for a node `z` with `M(z, face[a]) = colours[a]`, placed in the slot
/// of `drop` when the node bound is reached and reuse is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphDemand {
    pub drop: Option<usize>,
    pub face: Vec<usize>,
    pub colours: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphMove {
    Initial(ColouredGraph),
    Demand(GraphDemand),
}

pub struct GraphArena {
    palette: Palette,
    n: usize,
    cap: usize,
    colours: Vec<u8>,
    whites: Vec<u8>,
    reds: Vec<u8>,
    /// `g_1 .. g_{n-2}`
    ranked: Vec<u8>,
    single_shade: bool,
}

/// Solve a game on the atom structure of a rainbow signature.
pub fn solve_rainbow(sig: &RainbowSignature, cfg: &GameConfig, budget: usize) -> Result<SolveResult> {
    let arena = GraphArena::new(sig, cfg.limit(sig.n).cap)?;
    solve_game_with(&arena, cfg, budget)
}

impl GraphArena {
    pub fn new(sig: &RainbowSignature, cap: usize) -> Result<GraphArena> {
        if cap < sig.n {
            return Err(Error::Precondition(format!("node bound {cap} below dimension {}", sig.n)));
        }
        if cap > 16 {
            return Err(Error::Bound(format!("at most 16 nodes, got {cap}")));
        }
        let palette = sig.palette()?;
        let colours: Vec<u8> = (0..palette.len() as u8).filter(|&c| !matches!(palette.colour(c), Colour::Rho)).collect();
        let whites = colours.iter().copied().filter(|&c| palette.white(c).is_some()).collect();
        let reds = colours.iter().copied().filter(|&c| palette.is_red(c)).collect();
        let single_shade = palette.shades().len() == 1;
        let ranked = (1..sig.n as u32 - 1).map(|j| palette.green_id(j).unwrap_or(NONE)).collect();
        Ok(GraphArena { n: sig.n, cap, palette, colours, whites, reds, ranked, single_shade })
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    fn tri_ok(&self, g: &ColouredGraph, z: usize, y: usize, c: u8, f: usize) -> bool {
        !self.palette.forbidden(c, g.edge(z, f), g.edge(y, f))
    }

    /// A node other than the face already realising the demand.
    fn witness(&self, g: &ColouredGraph, d: &GraphDemand) -> Option<usize> {
        let p = &self.palette;
        (0..g.len()).find(|&w| {
            !d.face.contains(&w)
                && d.face.iter().zip(&d.colours).all(|(&f, &c)| g.edge(w, f) == c)
                && (self.single_shade
                    || self.tuples_with(&d.face, w).iter().all(|t| !g.is_yellow_tuple(p, t) || g.shade(t) == Palette::FULL))
        })
    }

    /// The `(n-1)`-tuples of distinct nodes of `face ∪ {z}` that contain `z`.
    fn tuples_with(&self, face: &[usize], z: usize) -> Vec<Vec<usize>> {
        let mut nodes = face.to_vec();
        nodes.push(z);
        distinct_tuples(nodes.len(), self.n - 1)
            .iter()
            .map(|t| t.iter().map(|&a| nodes[a]).collect::<Vec<_>>())
            .filter(|t| t.contains(&z))
            .collect()
    }

    /// The graph after ∀'s demand, with `z` placed and joined to the face.
    fn place(&self, g: &ColouredGraph, d: &GraphDemand) -> (ColouredGraph, usize) {
        let mut h = g.clone();
        let z = match d.drop {
            Some(v) => {
                h.clear_node(v);
                v
            }
            None => h.add_node(),
        };
        for (&f, &c) in d.face.iter().zip(&d.colours) {
            h.set_edge(&self.palette, z, f, c);
        }
        for t in self.tuples_with(&d.face, z) {
            if h.is_yellow_tuple(&self.palette, &t) {
                h.set_shade(&t, Palette::FULL);
            }
        }
        (h, z)
    }

    /// A cone with apex `z` over the face must respect the base shade; cones
    /// with `z` in the base are fine, since ∀ shades those tuples fully.
    fn face_cones_ok(&self, g: &ColouredGraph, d: &GraphDemand) -> bool {
        let p = &self.palette;
        match self.cone_base(d) {
            Some((base, t)) if g.is_yellow_tuple(p, &base) => {
                let s = g.shade(&base);
                s == NONE || p.shade(s).contains(p.tint(t).unwrap_or_default())
            }
            _ => true,
        }
    }

    fn faces(&self, k: usize) -> Vec<Vec<usize>> {
        (1..self.n).flat_map(|s| subsets(k, s)).collect()
    }

    fn colourings(&self, g: &ColouredGraph, face: &[usize]) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(face.len());
        self.colour_face(g, face, &mut cur, &mut out);
        out
    }

    fn colour_face(&self, g: &ColouredGraph, face: &[usize], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let a = cur.len();
        if a == face.len() {
            out.push(cur.clone());
            return;
        }
        for &c in &self.colours {
            // triangle (z, face[a], face[b]) with M(z,face[a]) = c
            let ok = (0..a).all(|b| !self.palette.forbidden(c, cur[b], g.edge(face[a], face[b])));
            if ok {
                cur.push(c);
                self.colour_face(g, face, cur, out);
                cur.pop();
            }
        }
    }

    /// Completes `h` with colours on `z`'s edges to `others`, calling `emit`
    /// on each consistent completion.
    fn complete(&self, h: &mut ColouredGraph, z: usize, face: &[usize], others: &[usize], restricted: bool, out: &mut Vec<ColouredGraph>) {
        let p = &self.palette;
        let domains: Vec<Vec<u8>> = others
            .iter()
            .map(|&y| {
                let fits = |c: &u8| face.iter().all(|&f| self.tri_ok(h, z, y, *c, f));
                if restricted {
                    if let Some(&w) = self.whites.iter().find(|c| fits(c)) {
                        return vec![w];
                    }
                    self.reds.iter().copied().filter(fits).collect()
                } else {
                    self.colours.iter().copied().filter(fits).collect()
                }
            })
            .collect();
        if domains.iter().any(Vec::is_empty) {
            return;
        }
        let mut pick = vec![0usize; others.len()];
        let mut a = 0;
        // iterative backtracking over `others`
        loop {
            if a == others.len() {
                let mut g = h.clone();
                for (b, &y) in others.iter().enumerate() {
                    g.set_edge(p, z, y, domains[b][pick[b]]);
                }
                if self.finish(&mut g, z, face, restricted) {
                    out.push(g);
                }
                if a == 0 {
                    return;
                }
                a -= 1;
                pick[a] += 1;
                continue;
            }
            if pick[a] >= domains[a].len() {
                if a == 0 {
                    return;
                }
                pick[a] = 0;
                a -= 1;
                pick[a] += 1;
                continue;
            }
            let c = domains[a][pick[a]];
            let y = others[a];
            let ok = (0..a).all(|b| !p.forbidden(c, domains[b][pick[b]], h.edge(y, others[b])));
            if ok {
                a += 1;
            } else {
                pick[a] += 1;
            }
        }
    }

    /// ∃'s shades on her new tuples, then the cone rule where she may have
    /// created cones herself.
    fn finish(&self, g: &mut ColouredGraph, z: usize, face: &[usize], restricted: bool) -> bool {
        let p = &self.palette;
        for t in g.tuples().iter() {
            if !t.contains(&z) || t.iter().all(|x| *x == z || face.contains(x)) {
                continue;
            }
            if g.is_yellow_tuple(p, &t) {
                let tints: BTreeSet<i64> = g.base_tints(p, &t);
                g.set_shade(&t, p.minimal_shade(&tints));
            } else {
                g.set_shade(&t, NONE);
            }
        }
        if restricted {
            return true;
        }
        let rest: Vec<usize> = (0..g.len()).filter(|&x| x != z).collect();
        subsets(rest.len(), self.n - 1).into_iter().all(|s| {
            let mut d: Vec<usize> = s.iter().map(|&a| rest[a]).collect();
            d.push(z);
            match g.cone(p, &d) {
                Some(c) => p.shade(g.shade(&c.base)).contains(c.tint),
                None => true,
            }
        })
    }

    /// Red assignments to `apexes` for a new apex `z` of tint `t` over `base`.
    fn reds_fit(&self, g: &ColouredGraph, base: &[usize], t: u8, apexes: &[usize]) -> bool {
        let p = &self.palette;
        let ranked = &self.ranked;
        // M(z, base[0]) = t, M(z, base[j]) = g_j
        let domains: Vec<Vec<u8>> = apexes
            .iter()
            .map(|&y| {
                self.reds
                    .iter()
                    .copied()
                    .filter(|&r| {
                        !p.forbidden(r, t, g.edge(y, base[0]))
                            && base[1..].iter().zip(ranked).all(|(&x, &gj)| !p.forbidden(r, gj, g.edge(y, x)))
                    })
                    .collect()
            })
            .collect();
        fn go(p: &Palette, g: &ColouredGraph, apexes: &[usize], domains: &[Vec<u8>], cur: &mut Vec<u8>) -> bool {
            let a = cur.len();
            if a == apexes.len() {
                return true;
            }
            for &r in &domains[a] {
                if (0..a).all(|b| !p.forbidden(r, cur[b], g.edge(apexes[a], apexes[b]))) {
                    cur.push(r);
                    if go(p, g, apexes, domains, cur) {
                        return true;
                    }
                    cur.pop();
                }
            }
            false
        }
        go(p, g, apexes, &domains, &mut Vec::new())
    }

    fn apexes(&self, g: &ColouredGraph, base: &[usize]) -> Vec<(usize, i64)> {
        let p = &self.palette;
        (0..g.len())
            .filter(|y| !base.contains(y))
            .filter_map(|y| {
                let t = p.tint(g.edge(base[0], y))?;
                base[1..]
                    .iter()
                    .enumerate()
                    .all(|(j, &x)| p.rank(g.edge(x, y)) == Some(j as u32 + 1))
                    .then_some((y, t))
            })
            .collect()
    }

    /// The ordered base of a cone-shaped demand.
    fn cone_base(&self, d: &GraphDemand) -> Option<(Vec<usize>, u8)> {
        if d.face.len() != self.n - 1 {
            return None;
        }
        let p = &self.palette;
        let mut base = vec![usize::MAX; self.n - 1];
        let mut tint = NONE;
        for (&f, &c) in d.face.iter().zip(&d.colours) {
            let slot = if p.tint(c).is_some() {
                tint = c;
                0
            } else {
                p.rank(c)? as usize
            };
            if slot >= base.len() || base[slot] != usize::MAX {
                return None;
            }
            base[slot] = f;
        }
        Some((base, tint))
    }

    fn canonical(&self, g: &ColouredGraph) -> Vec<u8> {
        let k = g.len();
        let tuples = g.tuples();
        let mut inv: Vec<(Vec<u8>, usize)> = (0..k)
            .map(|x| {
                let mut v: Vec<u8> = (0..k).filter(|&y| y != x).map(|y| g.edge(x, y)).collect();
                v.sort_unstable();
                v.push(NONE);
                let mut s: Vec<u8> = tuples
                    .iter()
                    .filter(|t| t.contains(&x))
                    .map(|t| g.shade(t).wrapping_add(t.iter().position(|&a| a == x).unwrap() as u8 * 64))
                    .collect();
                s.sort_unstable();
                v.extend(s);
                (v, x)
            })
            .collect();
        inv.sort();
        let order: Vec<usize> = inv.iter().map(|(_, x)| *x).collect();
        let mut groups = Vec::new();
        let mut start = 0;
        for a in 1..=k {
            if a == k || inv[a].0 != inv[start].0 {
                groups.push((start, a));
                start = a;
            }
        }
        let mut best: Option<Vec<u8>> = None;
        let mut cur = order.clone();
        permute_groups(&mut cur, &groups, 0, &mut |o| {
            let mut key = Vec::with_capacity(k * k + 8);
            g.key(o, &mut key);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap_or_default()
    }
}

pub(super) fn permute_groups(order: &mut Vec<usize>, groups: &[(usize, usize)], at: usize, f: &mut dyn FnMut(&[usize])) {
    if at == groups.len() {
        f(order);
        return;
    }
    let (s, e) = groups[at];
    if e - s == 1 {
        permute_groups(order, groups, at + 1, f);
        return;
    }
    let mut slice: Vec<usize> = order[s..e].to_vec();
    slice.sort_unstable();
    loop {
        order[s..e].copy_from_slice(&slice);
        permute_groups(order, groups, at + 1, f);
        if !next_permutation(&mut slice) {
            break;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl Arena for GraphArena {
    type Pos = ColouredGraph;
    type Move = GraphMove;

    fn dim(&self) -> usize {
        self.n
    }

    fn initial_moves(&self) -> Result<Vec<GraphMove>> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for k in 1..=self.n {
            for g in enumerate_graphs(&self.palette, k, true, ATOM_BUDGET)? {
                let g = g.with_capacity(self.cap);
                if seen.insert(self.canonical(&g)) {
                    out.push(GraphMove::Initial(g));
                }
            }
        }
        Ok(out)
    }

    fn initial_replies(&self, mv: &GraphMove) -> Vec<ColouredGraph> {
        match mv {
            GraphMove::Initial(g) => vec![g.clone()],
            GraphMove::Demand(_) => vec![],
        }
    }

    fn demands(&self, g: &ColouredGraph, limit: Limit) -> Vec<GraphMove> {
        let k = g.len();
        let full = k >= limit.cap.min(self.cap);
        if full && !limit.reuse {
            return vec![];
        }
        let mut out = Vec::new();
        for face in self.faces(k) {
            for colours in self.colourings(g, &face) {
                let d = GraphDemand { drop: None, face: face.clone(), colours };
                if self.witness(g, &d).is_some() {
                    continue;
                }
                if !self.face_cones_ok(g, &d) {
                    continue;
                }
                if full {
                    for v in (0..k).filter(|v| !face.contains(v)) {
                        out.push(GraphMove::Demand(GraphDemand { drop: Some(v), ..d.clone() }));
                    }
                } else {
                    out.push(GraphMove::Demand(d));
                }
            }
        }
        out
    }

    fn replies(&self, g: &ColouredGraph, mv: &GraphMove, restricted: bool) -> Vec<ColouredGraph> {
        let GraphMove::Demand(d) = mv else { return vec![] };
        if self.witness(g, d).is_some() {
            return vec![g.clone()];
        }
        let (mut h, z) = self.place(g, d);
        let others: Vec<usize> = (0..h.len()).filter(|x| *x != z && !d.face.contains(x)).collect();
        let mut out = Vec::new();
        self.complete(&mut h, z, &d.face, &others, restricted, &mut out);
        out
    }

    fn answerable(&self, g: &ColouredGraph, limit: Limit) -> bool {
        let k = g.len();
        let full = k >= limit.cap.min(self.cap);
        if full && !limit.reuse {
            return true;
        }
        let p = &self.palette;
        for base in g.tuples().iter().filter(|t| g.is_yellow_tuple(p, t)) {
            let apexes = self.apexes(g, base);
            if apexes.is_empty() {
                continue;
            }
            let shade = p.shade(g.shade(&base));
            // ∀ must free a slot; he keeps every apex if some other node can go.
            let drops: Vec<Option<usize>> = if !full {
                vec![None]
            } else if (0..k).any(|v| !base.contains(&v) && apexes.iter().all(|a| a.0 != v)) {
                vec![None]
            } else {
                apexes.iter().map(|a| Some(a.0)).collect()
            };
            for drop in drops {
                let live: Vec<(usize, i64)> = apexes.iter().copied().filter(|a| Some(a.0) != drop).collect();
                let nodes: Vec<usize> = live.iter().map(|a| a.0).collect();
                for &tc in &self.colours {
                    let Some(t) = p.tint(tc) else { continue };
                    if !shade.contains(t) || live.iter().any(|a| a.1 == t) {
                        continue;
                    }
                    if !self.reds_fit(g, &base, tc, &nodes) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn check_demand(&self, g: &ColouredGraph, mv: &GraphMove, limit: Limit) -> std::result::Result<(), String> {
        let GraphMove::Demand(d) = mv else { return Err("initial move in a later round".into()) };
        let k = g.len();
        if d.face.is_empty() || d.face.len() >= self.n || d.face.len() != d.colours.len() {
            return Err(format!("face {:?} has the wrong size", d.face));
        }
        let set: BTreeSet<usize> = d.face.iter().copied().collect();
        if set.len() != d.face.len() || d.face.iter().any(|&f| f >= k) {
            return Err(format!("face {:?} is not a set of nodes", d.face));
        }
        let full = k >= limit.cap.min(self.cap);
        match d.drop {
            None if full => return Err("node bound reached".into()),
            Some(_) if !full || !limit.reuse => return Err("reuse not available".into()),
            Some(v) if v >= k || d.face.contains(&v) => return Err(format!("cannot reuse node {v}")),
            _ => {}
        }
        if d.colours.iter().any(|c| !self.colours.contains(c)) {
            return Err("unknown colour".into());
        }
        for a in 0..d.face.len() {
            for b in 0..a {
                if self.palette.forbidden(d.colours[a], d.colours[b], g.edge(d.face[a], d.face[b])) {
                    return Err(format!("demand has a forbidden triangle on {}, {}", d.face[a], d.face[b]));
                }
            }
        }
        if !self.face_cones_ok(g, d) {
            return Err("cone tint not in the base shade".into());
        }
        Ok(())
    }

    fn key(&self, g: &ColouredGraph) -> Vec<u8> {
        self.canonical(g)
    }

    fn nodes(&self, g: &ColouredGraph) -> usize {
        g.len()
    }

    fn priority(&self, g: &ColouredGraph, mv: &GraphMove) -> i64 {
        match mv {
            GraphMove::Demand(d) => match self.cone_base(d) {
                Some((base, _)) => 1 + self.apexes(g, &base).len() as i64,
                None => 0,
            },
            GraphMove::Initial(_) => 0,
        }
    }

    /// Cones first: they are what ∀ attacks.
    fn initial_priority(&self, mv: &GraphMove) -> i64 {
        match mv {
            GraphMove::Initial(g) if g.len() == self.n => g.cones(&self.palette).len() as i64,
            _ => 0,
        }
    }

    fn move_json(&self, mv: &GraphMove) -> Value {
        let p = &self.palette;
        match mv {
            GraphMove::Initial(g) => json!({ "graph": g.encode(p), "nodes": g.len() }),
            GraphMove::Demand(d) => json!({
                "drop": d.drop,
                "face": d.face,
                "colours": d.colours.iter().map(|&c| p.colour(c).to_string()).collect::<Vec<_>>(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{solve_game, Winner};
    use crate::rainbow::{build_bf, build_czn};

    fn demand(p: &Palette, face: &[usize], colours: &[&str]) -> GraphMove {
        GraphMove::Demand(GraphDemand {
            drop: None,
            face: face.to_vec(),
            colours: colours.iter().map(|c| p.parse(c).unwrap()).collect(),
        })
    }

    #[test]
    fn canonical_key_ignores_node_names() {
        let sig = build_bf(3).unwrap();
        let arena = GraphArena::new(&sig, 5).unwrap();
        let p = arena.palette();
        let mut g = ColouredGraph::new(3, 5);
        for _ in 0..3 {
            g.add_node();
        }
        g.set_edge(p, 0, 1, p.parse("w0").unwrap());
        g.set_edge(p, 0, 2, p.parse("g0^1").unwrap());
        g.set_edge(p, 1, 2, p.parse("g1").unwrap());
        g.set_shade(&[0, 1], Palette::FULL);
        g.set_shade(&[1, 0], Palette::FULL);
        let h = g.induced(&[2, 0, 1]).with_capacity(5);
        assert_eq!(arena.key(&g), arena.key(&h));
        assert_eq!(g.violation(p), None);
        assert_eq!(h.violation(p), None);
    }

    #[test]
    fn cone_replies_are_reds() {
        let sig = build_bf(3).unwrap();
        let arena = GraphArena::new(&sig, 6).unwrap();
        let p = arena.palette();
        let mut g = ColouredGraph::new(3, 6);
        for _ in 0..3 {
            g.add_node();
        }
        g.set_edge(p, 0, 1, p.parse("w0").unwrap());
        g.set_edge(p, 0, 2, p.parse("g0^1").unwrap());
        g.set_edge(p, 1, 2, p.parse("g1").unwrap());
        g.set_shade(&[0, 1], Palette::FULL);
        g.set_shade(&[1, 0], Palette::FULL);
        let d = demand(p, &[0, 1], &["g0^2", "g1"]);
        arena.check_demand(&g, &d, Limit { cap: 6, reuse: false }).unwrap();
        let all = arena.replies(&g, &d, false);
        let restricted = arena.replies(&g, &d, true);
        assert_eq!(all.len(), 3);
        assert_eq!(restricted.len(), 3);
        for h in &all {
            assert!(p.is_red(h.edge(3, 2)));
            assert_eq!(h.violation(p), None);
        }
        // an existing apex with the same tint is a witness
        let same = demand(p, &[0, 1], &["g0^1", "g1"]);
        assert_eq!(arena.replies(&g, &same, false), vec![g.clone()]);
    }

    #[test]
    fn single_atom_games() {
        let sig = build_bf(3).unwrap();
        for k in 0..3 {
            let r = solve_rainbow(&sig, &GameConfig::gk(k), 100_000).unwrap();
            assert_eq!(r.winner, Winner::Exists);
        }
        let arena = GraphArena::new(&build_czn(3, 1).unwrap(), 5).unwrap();
        assert_eq!(solve_game(&arena, &GameConfig::gk(2)).unwrap().winner, Winner::Exists);
    }
}
