use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use super::Palette;

/// Marks an absent edge or shade.
pub const NONE: u8 = u8::MAX;

/// An `i`-cone: `M(base[0], apex) = g0^tint`, `M(base[j], apex) = g_j`, and no
/// other edge among its nodes is green.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub apex: usize,
    pub base: Vec<usize>,
    pub tint: i64,
}

/// A complete coloured graph on nodes `0..len()`, with room for `cap` nodes.
/// Edges are oriented: `edge(x, y)` and `edge(y, x)` are reverses of each other.
/// Shades sit on `(n-1)`-tuples of distinct nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColouredGraph {
    n: usize,
    cap: usize,
    k: usize,
    edges: Vec<u8>,
    yellow: Vec<u8>,
}

impl ColouredGraph {
    pub fn new(n: usize, cap: usize) -> ColouredGraph {
        assert!(n >= 2 && cap >= 1);
        ColouredGraph {
            n,
            cap,
            k: 0,
            edges: vec![NONE; cap * cap],
            yellow: vec![NONE; cap.pow(n as u32 - 1)],
        }
    }

    pub fn with_nodes(n: usize, cap: usize, k: usize) -> ColouredGraph {
        let mut g = ColouredGraph::new(n, cap);
        g.k = k;
        g
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn add_node(&mut self) -> usize {
        assert!(self.k < self.cap, "graph is full");
        self.k += 1;
        self.k - 1
    }

    /// Forget every edge and shade touching `v`, keeping the slot.
    pub fn clear_node(&mut self, v: usize) {
        for x in 0..self.k {
            self.edges[x * self.cap + v] = NONE;
            self.edges[v * self.cap + x] = NONE;
        }
        let n1 = self.n - 1;
        let total = self.cap.pow(n1 as u32);
        for t in 0..total {
            if self.yellow[t] != NONE && self.decode(t).contains(&v) {
                self.yellow[t] = NONE;
            }
        }
    }

    #[inline]
    pub fn edge(&self, x: usize, y: usize) -> u8 {
        self.edges[x * self.cap + y]
    }

    #[inline]
    pub fn set_edge(&mut self, p: &Palette, x: usize, y: usize, c: u8) {
        self.edges[x * self.cap + y] = c;
        self.edges[y * self.cap + x] = p.rev(c);
    }

    pub fn unset_edge(&mut self, x: usize, y: usize) {
        self.edges[x * self.cap + y] = NONE;
        self.edges[y * self.cap + x] = NONE;
    }

    pub fn tuple_index(&self, t: &[usize]) -> usize {
        t.iter().rev().fold(0, |acc, &x| acc * self.cap + x)
    }

    fn decode(&self, mut t: usize) -> Vec<usize> {
        (0..self.n - 1)
            .map(|_| {
                let x = t % self.cap;
                t /= self.cap;
                x
            })
            .collect()
    }

    #[inline]
    pub fn shade(&self, t: &[usize]) -> u8 {
        self.yellow[self.tuple_index(t)]
    }

    #[inline]
    pub fn set_shade(&mut self, t: &[usize], s: u8) {
        let k = self.tuple_index(t);
        self.yellow[k] = s;
    }

    /// Whether the tuple has distinct entries and no green edge among them.
    pub fn is_yellow_tuple(&self, p: &Palette, t: &[usize]) -> bool {
        for (a, &x) in t.iter().enumerate() {
            for &y in &t[a + 1..] {
                if x == y || p.is_green(self.edge(x, y)) {
                    return false;
                }
            }
        }
        true
    }

    /// Ordered `(n-1)`-tuples of distinct nodes, lexicographically.
    pub fn tuples(&self) -> Arc<Vec<Vec<usize>>> {
        distinct_tuples(self.k, self.n - 1)
    }

    pub fn yellow_tuples(&self, p: &Palette) -> Vec<Vec<usize>> {
        self.tuples().iter().filter(|t| self.is_yellow_tuple(p, t)).cloned().collect()
    }

    /// The cone formed by the `n` nodes of `d`, if any.
    pub fn cone(&self, p: &Palette, d: &[usize]) -> Option<Cone> {
        debug_assert_eq!(d.len(), self.n);
        'apex: for (a, &apex) in d.iter().enumerate() {
            let mut base = vec![usize::MAX; self.n - 1];
            let mut tint = None;
            for (b, &x) in d.iter().enumerate() {
                if a == b {
                    continue;
                }
                let c = self.edge(x, apex);
                if let Some(t) = p.tint(c) {
                    if base[0] != usize::MAX {
                        continue 'apex;
                    }
                    base[0] = x;
                    tint = Some(t);
                } else if let Some(r) = p.rank(c) {
                    let r = r as usize;
                    if r == 0 || r >= self.n - 1 || base[r] != usize::MAX {
                        continue 'apex;
                    }
                    base[r] = x;
                } else {
                    continue 'apex;
                }
            }
            for (s, &x) in base.iter().enumerate() {
                for &y in &base[s + 1..] {
                    if p.is_green(self.edge(x, y)) {
                        continue 'apex;
                    }
                }
            }
            return Some(Cone { apex, base, tint: tint? });
        }
        None
    }

    /// All cones among `n`-subsets of the nodes.
    pub fn cones(&self, p: &Palette) -> Vec<Cone> {
        subsets(self.k, self.n).iter().filter_map(|d| self.cone(p, d)).collect()
    }

    /// Tints of the cones whose base is `t`.
    pub fn base_tints(&self, p: &Palette, t: &[usize]) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for apex in 0..self.k {
            if t.contains(&apex) {
                continue;
            }
            let Some(tint) = p.tint(self.edge(t[0], apex)) else { continue };
            if t[1..].iter().enumerate().all(|(j, &x)| p.rank(self.edge(x, apex)) == Some(j as u32 + 1)) {
                out.insert(tint);
            }
        }
        out
    }

    /// `None` when the graph is a consistent coloured graph; otherwise the
    /// first violated rule.
    pub fn violation(&self, p: &Palette) -> Option<String> {
        for x in 0..self.k {
            for y in 0..self.k {
                if x == y {
                    continue;
                }
                let c = self.edge(x, y);
                if c == NONE || c as usize >= p.len() {
                    return Some(format!("edge {x},{y} unlabelled"));
                }
                if self.edge(y, x) != p.rev(c) {
                    return Some(format!("edge {x},{y} not reversed consistently"));
                }
            }
        }
        for x in 0..self.k {
            for y in x + 1..self.k {
                for z in y + 1..self.k {
                    if p.forbidden(self.edge(x, y), self.edge(x, z), self.edge(y, z)) {
                        return Some(format!("forbidden triangle {x},{y},{z}"));
                    }
                }
            }
        }
        for t in self.tuples().iter() {
            let s = self.shade(&t);
            match (self.is_yellow_tuple(p, &t), s == NONE) {
                (true, true) => return Some(format!("tuple {t:?} has no shade")),
                (false, false) => return Some(format!("tuple {t:?} has a green edge but a shade")),
                (true, false) if s as usize >= p.shades().len() => return Some(format!("tuple {t:?} bad shade")),
                _ => {}
            }
        }
        for cone in self.cones(p) {
            if !p.shade(self.shade(&cone.base)).contains(cone.tint) {
                return Some(format!("cone over {:?} with tint {} breaks its shade", cone.base, cone.tint));
            }
        }
        None
    }

    /// The subgraph on `nodes`, renumbered in the given order.
    pub fn induced(&self, nodes: &[usize]) -> ColouredGraph {
        let mut g = ColouredGraph::with_nodes(self.n, nodes.len().max(1), nodes.len());
        for (a, &x) in nodes.iter().enumerate() {
            for (b, &y) in nodes.iter().enumerate() {
                if a != b {
                    g.edges[a * g.cap + b] = self.edge(x, y);
                }
            }
        }
        if nodes.len() >= self.n - 1 {
            for t in g.tuples().iter() {
                let orig: Vec<usize> = t.iter().map(|&a| nodes[a]).collect();
                let s = self.shade(&orig);
                g.set_shade(&t, s);
            }
        }
        g
    }

    /// The same graph with room for `cap` nodes.
    pub fn with_capacity(&self, cap: usize) -> ColouredGraph {
        assert!(cap >= self.k);
        let mut g = ColouredGraph::with_nodes(self.n, cap.max(1), self.k);
        for x in 0..self.k {
            for y in 0..self.k {
                g.edges[x * g.cap + y] = self.edge(x, y);
            }
        }
        for t in self.tuples().iter() {
            g.set_shade(&t, self.shade(&t));
        }
        g
    }

    /// Canonical text for the labelled graph: edges `(0,1),(0,2),(1,2),(0,3)...`,
    /// then shades of the yellow tuples when the family has more than one shade.
    pub fn encode(&self, p: &Palette) -> String {
        let mut edges = Vec::new();
        for q in 1..self.k {
            for x in 0..q {
                edges.push(p.colour(self.edge(x, q)).to_string());
            }
        }
        let mut out = edges.join(",");
        if p.shades().len() > 1 {
            let ys: Vec<String> = self
                .yellow_tuples(p)
                .iter()
                .map(|t| {
                    let name: String = t.iter().map(|x| x.to_string()).collect();
                    format!("{name}:{}", p.shade(self.shade(t)))
                })
                .collect();
            out.push('|');
            out.push_str(&ys.join(","));
        }
        out
    }

    /// Byte key of the labelled graph, independent of capacity.
    pub fn key(&self, order: &[usize], out: &mut Vec<u8>) {
        out.push(order.len() as u8);
        for &x in order {
            for &y in order {
                if x != y {
                    out.push(self.edge(x, y));
                }
            }
        }
        if order.len() >= self.n - 1 {
            for t in distinct_tuples(order.len(), self.n - 1).iter() {
                let orig: Vec<usize> = t.iter().map(|&a| order[a]).collect();
                out.push(self.shade(&orig));
            }
        }
    }
}

type Tuples = Arc<Vec<Vec<usize>>>;

/// Tuples of `len` distinct nodes below `k`, in lexicographic order. Small
/// tables are cached: the games ask for the same few over and over.
pub(crate) fn distinct_tuples(k: usize, len: usize) -> Tuples {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), Tuples>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&(k, len)) {
        return t.clone();
    }
    let t = Arc::new(build_tuples(k, len));
    if t.len() <= 1 << 16 {
        cache.write().unwrap_or_else(|e| e.into_inner()).insert((k, len), t.clone());
    }
    t
}

fn build_tuples(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(k: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..k {
            if !cur.contains(&x) {
                cur.push(x);
                go(k, len, cur, out);
                cur.pop();
            }
        }
    }
    go(k, len, &mut cur, &mut out);
    out
}

pub(crate) fn subsets(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(k: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..k {
            cur.push(x);
            go(k, size, x + 1, cur, out);
            cur.pop();
        }
    }
    go(k, size, 0, &mut Vec::new(), &mut out);
    out
}
