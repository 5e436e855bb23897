//! Bounded search for square and relativized representations, Gaifman
//! hypergraphs, `m`-squareness and clique-guarded evaluation.
//!
//! A representation labels every point of a unit `V ⊆ ^nU` with an atom of
//! the algebra. The search never proves non-representability: a miss only
//! says that nothing exists within the reported bounds.

mod formula;
mod square;

pub use formula::{clique_guarded_eval, parse_formula, Formula};
pub use square::{check_m_square, gaifman_cliques, SquareReport, SquareWitness};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Carrier, Element, FiniteBao, Relation};
use crate::error::{Error, Result};
use crate::toposet::{all_sequences, FiniteTopology, TopologyJson};

/// Default cap on search nodes.
pub const SEARCH_BUDGET: u64 = 20_000_000;

/// Largest `|^nU|` searched; `|^mU|` for Gaifman hypergraphs is capped the same way.
pub const POINT_BOUND: usize = 1 << 20;

/// Units with more closure generators than this are not enumerated.
pub const UNIT_GENERATOR_BOUND: usize = 20;

/// Nested classes of units: every square unit is locally square, and every
/// locally square unit is diagonizable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitKind {
    Square,
    #[serde(rename = "g")]
    LocallySquare,
    #[serde(rename = "d")]
    Diagonizable,
}

impl UnitKind {
    pub fn parse(s: &str) -> Result<UnitKind> {
        match s {
            "square" | "s" => Ok(UnitKind::Square),
            "g" | "locally-square" => Ok(UnitKind::LocallySquare),
            "d" | "diagonizable" => Ok(UnitKind::Diagonizable),
            _ => Err(Error::Parse(format!("unknown unit kind `{s}` (square|d|g)"))),
        }
    }
}

/// A relativized representation: `V` sorted, `label[k]` the atom whose image
/// holds `V[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub n: usize,
    pub base: Vec<String>,
    pub points: Vec<Vec<usize>>,
    pub label: Vec<usize>,
    pub atoms: Vec<String>,
    pub topology: Option<FiniteTopology>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationJson {
    #[serde(rename = "U")]
    pub base: Vec<String>,
    #[serde(rename = "V")]
    pub points: Vec<Vec<String>>,
    pub assign: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub topology: Option<TopologyJson>,
}

impl Representation {
    pub fn point(&self, s: &[usize]) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_slice().cmp(s)).ok()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.point(s).is_some()
    }

    pub fn label_of(&self, s: &[usize]) -> Option<usize> {
        self.point(s).map(|k| self.label[k])
    }

    pub fn is_square(&self) -> bool {
        self.points.len() == self.base.len().pow(self.n as u32)
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        match &self.topology {
            Some(t) => t.leq(a, b),
            None => a == b,
        }
    }

    pub fn to_json(&self) -> RepresentationJson {
        let name = |s: &[usize]| s.iter().map(|&a| self.base[a].clone()).collect::<Vec<_>>();
        let mut assign: BTreeMap<String, Vec<Vec<String>>> =
            self.atoms.iter().map(|a| (a.clone(), Vec::new())).collect();
        for (k, s) in self.points.iter().enumerate() {
            assign.get_mut(&self.atoms[self.label[k]]).expect("label in range").push(name(s));
        }
        RepresentationJson {
            base: self.base.clone(),
            points: self.points.iter().map(|s| name(s)).collect(),
            assign,
            topology: self.topology.as_ref().map(|t| t.to_json()),
        }
    }

    /// Read a representation of `a`; atom names are those of [`atom_names`].
    pub fn from_json(a: &FiniteBao, j: &RepresentationJson) -> Result<Self> {
        let index: HashMap<&str, usize> = j.base.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
        let point = |s: &[String]| {
            s.iter()
                .map(|x| index.get(x.as_str()).copied().ok_or_else(|| Error::UnknownAtom(x.clone())))
                .collect::<Result<Vec<usize>>>()
        };
        let atoms = atom_names(a);
        let mut points: Vec<Vec<usize>> = j.points.iter().map(|s| point(s)).collect::<Result<_>>()?;
        points.sort();
        points.dedup();
        let n = a.dim();
        if points.iter().any(|s| s.len() != n) {
            return Err(Error::Malformed(format!("unit points must have length {n}")));
        }
        let mut label = vec![usize::MAX; points.len()];
        for (name, ss) in &j.assign {
            let atom = atoms.iter().position(|x| x == name).ok_or_else(|| Error::UnknownAtom(name.clone()))?;
            for s in ss {
                let k = points
                    .binary_search(&point(s)?)
                    .map_err(|_| Error::Malformed(format!("assigned point {s:?} is not in V")))?;
                if label[k] != usize::MAX {
                    return Err(Error::Malformed(format!("point {s:?} is assigned twice")));
                }
                label[k] = atom;
            }
        }
        if label.contains(&usize::MAX) {
            return Err(Error::Malformed("some point of V has no atom".into()));
        }
        let topology = j.topology.as_ref().map(FiniteTopology::from_json).transpose()?;
        Ok(Representation { n, base: j.base.clone(), points, label, atoms, topology })
    }
}

/// Names of the algebra's atoms: frame names for full complex algebras,
/// `b0, b1, …` for subalgebras.
pub fn atom_names(a: &FiniteBao) -> Vec<String> {
    match a.carrier() {
        Carrier::Full => a.frame().names().to_vec(),
        Carrier::Blocks(b) => (0..b.len()).map(|k| format!("b{k}")).collect(),
    }
}

/// Operator tables on the algebra's atoms.
pub(crate) struct Tables {
    pub(crate) atoms: usize,
    /// `cyl[i][b]`: the atoms `a` with `b ≤ c_i a`.
    pub(crate) cyl: Vec<Vec<FixedBitSet>>,
    /// `dia[i][b]`: the atoms `a` with `b ≤ −I_i −a`.
    dia: Vec<Vec<FixedBitSet>>,
    /// `dia_zero[i]`: the atoms below `−I_i 1`.
    dia_zero: Vec<FixedBitSet>,
    /// `below[b][i*n+j]`: `b ≤ d_ij`.
    below: Vec<Vec<bool>>,
}

impl Tables {
    pub(crate) fn new(a: &FiniteBao) -> Result<Self> {
        let n = a.dim();
        let atoms = a.atoms();
        let k = atoms.len();
        let idx = |x: &Element| {
            let mut s = FixedBitSet::with_capacity(k);
            for (b, atom) in atoms.iter().enumerate() {
                if atom.is_subset(x) {
                    s.insert(b);
                } else if !atom.is_disjoint(x) {
                    return Err(Error::Precondition("an operator leaves the carrier".into()));
                }
            }
            Ok(s)
        };
        let transpose = |images: Vec<FixedBitSet>| {
            let mut out = vec![FixedBitSet::with_capacity(k); k];
            for (a, img) in images.iter().enumerate() {
                for b in img.ones() {
                    out[b].insert(a);
                }
            }
            out
        };
        let mut cyl = Vec::with_capacity(n);
        let mut dia = Vec::with_capacity(n);
        let mut dia_zero = Vec::with_capacity(n);
        for i in 0..n {
            let imgs = atoms.iter().map(|x| idx(&a.cyl(i, x))).collect::<Result<Vec<_>>>()?;
            cyl.push(transpose(imgs));
            let d = |x: &Element| a.complement(&a.interior(i, &a.complement(x)));
            let imgs = atoms.iter().map(|x| idx(&d(x))).collect::<Result<Vec<_>>>()?;
            dia.push(transpose(imgs));
            dia_zero.push(idx(&d(&a.bottom()))?);
        }
        let mut below = vec![vec![true; n * n]; k];
        for i in 0..n {
            for j in 0..n {
                let d = idx(&a.diag(i, j))?;
                for (b, row) in below.iter_mut().enumerate() {
                    row[i * n + j] = d.contains(b);
                }
            }
        }
        Ok(Tables { atoms: k, cyl, dia, dia_zero, below })
    }
}

/// Check that `rep` is an injective homomorphism on every operation. Returns
/// the first failure. Interior operators are checked against the topology of
/// `rep`; a representation without one represents the `CA_n` reduct.
pub fn verify_representation(a: &FiniteBao, rep: &Representation) -> Result<Option<String>> {
    let t = Tables::new(a)?;
    let n = a.dim();
    if rep.n != n {
        return Ok(Some(format!("representation has dimension {}, algebra {n}", rep.n)));
    }
    if rep.label.len() != rep.points.len() || rep.label.iter().any(|&l| l >= t.atoms) {
        return Ok(Some("labels do not match the points".into()));
    }
    let mut used = vec![false; t.atoms];
    for &l in &rep.label {
        used[l] = true;
    }
    if let Some(b) = used.iter().position(|u| !u) {
        return Ok(Some(format!("atom {} has an empty image", rep.atoms[b])));
    }
    for (k, s) in rep.points.iter().enumerate() {
        let b = rep.label[k];
        for i in 0..n {
            for j in 0..n {
                if t.below[b][i * n + j] != (s[i] == s[j]) {
                    return Ok(Some(format!("d_{i}{j} at {s:?}")));
                }
            }
        }
        for i in 0..n {
            let mut line = FixedBitSet::with_capacity(t.atoms);
            let mut up = FixedBitSet::with_capacity(t.atoms);
            let mut escapes = false;
            for u in 0..rep.base.len() {
                let mut w = s.clone();
                w[i] = u;
                let l = rep.label_of(&w);
                if let Some(l) = l {
                    line.insert(l);
                }
                if rep.leq(s[i], u) {
                    match l {
                        Some(l) => up.insert(l),
                        None => escapes = true,
                    }
                }
            }
            // s ∈ C_i h(x) iff x meets the line; s ∈ h(c_i x) iff b ≤ c_i x
            if line != t.cyl[i][b] {
                return Ok(Some(format!("c_{i} at {s:?}")));
            }
            if rep.topology.is_none() {
                continue;
            }
            // s ∈ D_i h(x) iff x meets the up-fibre or the fibre leaves V;
            // s ∈ h(D_i x) iff b ≤ D_i x, where D_i = −I_i−
            if escapes != t.dia_zero[i].contains(b) || (!escapes && up != t.dia[i][b]) {
                return Ok(Some(format!("I_{i} at {s:?}")));
            }
        }
    }
    if a.has_overrides() {
        // overridden operators need not be additive: compare on every element
        for x in a.elements()? {
            let img = |y: &Element| -> FixedBitSet {
                let atoms = a.atoms();
                let mut out = FixedBitSet::with_capacity(rep.points.len());
                for (k, &l) in rep.label.iter().enumerate() {
                    if atoms[l].is_subset(y) {
                        out.insert(k);
                    }
                }
                out
            };
            let hx = img(&x);
            for i in 0..n {
                let mut cyl = FixedBitSet::with_capacity(rep.points.len());
                let mut int = FixedBitSet::with_capacity(rep.points.len());
                for (k, s) in rep.points.iter().enumerate() {
                    let mut w = s.clone();
                    let mut any = false;
                    let mut all = true;
                    for u in 0..rep.base.len() {
                        w[i] = u;
                        let inside = rep.point(&w).is_some_and(|p| hx.contains(p));
                        any |= inside;
                        if rep.leq(s[i], u) && !inside {
                            all = false;
                        }
                    }
                    cyl.set(k, any);
                    int.set(k, all);
                }
                if img(&a.cyl(i, &x)) != cyl {
                    return Ok(Some(format!("c_{i} on {:?}", a.frame().set_names(&x))));
                }
                if rep.topology.is_some() && img(&a.interior(i, &x)) != int {
                    return Ok(Some(format!("I_{i} on {:?}", a.frame().set_names(&x))));
                }
            }
        }
    }
    Ok(None)
}

/// Bounds of a representation search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSearch {
    pub max_base: usize,
    pub unit: UnitKind,
    /// Search topologies on the base and check the interior operators.
    pub topological: bool,
    /// Tried in addition to the enumerated preorders.
    #[serde(skip)]
    pub extra_topology: Option<FiniteTopology>,
    pub budget: u64,
}

impl RepSearch {
    pub fn new(max_base: usize, unit: UnitKind) -> Self {
        RepSearch { max_base, unit, topological: false, extra_topology: None, budget: SEARCH_BUDGET }
    }

    pub fn topological(mut self) -> Self {
        self.topological = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSummary {
    pub size: usize,
    pub units: usize,
    pub topologies: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_base: usize,
    pub unit: UnitKind,
    pub topological: bool,
    pub bases: Vec<BaseSummary>,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct RepOutcome {
    pub found: Option<Representation>,
    pub bounds: SearchBounds,
}

impl RepOutcome {
    pub fn base_size(&self) -> Option<usize> {
        self.found.as_ref().map(|r| r.base.len())
    }
}

/// Preorders on `0..u` up to isomorphism, fewest pairs first; the discrete
/// order comes first.
pub fn preorders_up_to_iso(u: usize) -> Result<Vec<Relation>> {
    if u > 4 {
        return Err(Error::Bound(format!("preorders are enumerated up to 4 points, not {u}")));
    }
    let off: Vec<(usize, usize)> = (0..u).flat_map(|a| (0..u).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let perms = permutations(u);
    let mut seen = HashSet::new();
    let mut out: Vec<(u32, u32, Relation)> = Vec::new();
    for mask in 0u32..1 << off.len() {
        let has = |a: usize, b: usize| a == b || off.iter().position(|&p| p == (a, b)).is_some_and(|k| mask >> k & 1 == 1);
        let transitive = (0..u).all(|a| (0..u).all(|b| !has(a, b) || (0..u).all(|c| !has(b, c) || has(a, c))));
        if !transitive {
            continue;
        }
        let code = |p: &[usize]| {
            let mut c = 0u32;
            for (k, &(a, b)) in off.iter().enumerate() {
                if has(p[a], p[b]) {
                    c |= 1 << k;
                }
            }
            c
        };
        let canon = perms.iter().map(|p| code(p)).min().unwrap_or(0);
        if seen.insert(canon) {
            let pairs = (0..u).flat_map(|a| (0..u).map(move |b| (a, b))).filter(|&(a, b)| has(a, b));
            out.push((canon.count_ones(), canon, Relation::from_pairs(u, pairs)));
        }
    }
    out.sort_by_key(|(c, m, _)| (*c, *m));
    Ok(out.into_iter().map(|(_, _, r)| r).collect())
}

fn permutations(u: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..u).collect();
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for j in k..p.len() {
            p.swap(k, j);
            go(k + 1, p, out);
            p.swap(k, j);
        }
    }
    go(0, &mut p, &mut out);
    out
}

/// Candidate units over `u` points of the given kind that use every point,
/// most constrained first: the square, then other locally square units, then
/// other diagonizable ones, each group by size (descending) then points.
fn candidate_units(u: usize, n: usize, kind: UnitKind) -> Result<(Vec<Vec<Vec<usize>>>, Option<String>)> {
    let all = all_sequences(u, n);
    let mut units = vec![all.clone()];
    if kind == UnitKind::Square || u == 0 {
        return Ok((units, None));
    }
    let subs = |s: &[usize], taus: &[Vec<usize>]| -> Vec<Vec<usize>> {
        taus.iter().map(|tau| tau.iter().map(|&k| s[k]).collect()).collect()
    };
    let replacements: Vec<Vec<usize>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (0..n).map(|k| if k == i { j } else { k }).collect()))
        .collect();
    let maps = all_sequences(n, n);
    let mut skipped = None;
    let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
    seen.insert(all.clone());
    for k in [UnitKind::LocallySquare, UnitKind::Diagonizable] {
        if k > kind {
            break;
        }
        let taus = if k == UnitKind::LocallySquare { &maps } else { &replacements };
        // closure of each point under the substitutions
        let closure = |s: &Vec<usize>| {
            let mut set: Vec<Vec<usize>> = vec![s.clone()];
            let mut k = 0;
            while k < set.len() {
                for t in subs(&set[k].clone(), taus) {
                    if !set.contains(&t) {
                        set.push(t);
                    }
                }
                k += 1;
            }
            set.sort();
            set
        };
        let mut gens: Vec<Vec<Vec<usize>>> = all.iter().map(closure).collect();
        gens.sort();
        gens.dedup();
        if gens.len() > UNIT_GENERATOR_BOUND {
            skipped = Some(format!("{} closure generators exceed {UNIT_GENERATOR_BOUND}", gens.len()));
            break;
        }
        let mut found: Vec<Vec<Vec<usize>>> = Vec::new();
        for mask in 1u32..1 << gens.len() {
            let mut v: Vec<Vec<usize>> =
                (0..gens.len()).filter(|g| mask >> g & 1 == 1).flat_map(|g| gens[g].iter().cloned()).collect();
            v.sort();
            v.dedup();
            let mut used = vec![false; u];
            for s in &v {
                for &x in s {
                    used[x] = true;
                }
            }
            if used.iter().all(|&b| b) && seen.insert(v.clone()) {
                found.push(v);
            }
        }
        found.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        units.extend(found);
    }
    Ok((units, skipped))
}

/// Search bases `1..=max_base` for a representation, smallest base first.
pub fn brute_force_represent(a: &FiniteBao, q: &RepSearch) -> Result<RepOutcome> {
    let t = Tables::new(a)?;
    let n = a.dim();
    let names = atom_names(a);
    let mut bounds =
        SearchBounds { max_base: q.max_base, unit: q.unit, topological: q.topological, bases: Vec::new(), nodes: 0 };
    let budget = AtomicU64::new(q.budget);
    for u in 1..=q.max_base {
        let total = u.checked_pow(n as u32).filter(|&c| c <= POINT_BOUND);
        let Some(total) = total else {
            bounds.bases.push(BaseSummary { size: u, units: 0, topologies: 0, skipped: Some("too many points".into()) });
            break;
        };
        if total < t.atoms {
            bounds.bases.push(BaseSummary {
                size: u,
                units: 0,
                topologies: 0,
                skipped: Some(format!("{total} points cannot carry {} atoms", t.atoms)),
            });
            continue;
        }
        let (units, skipped) = candidate_units(u, n, q.unit)?;
        let base: Vec<String> = (0..u).map(|x| x.to_string()).collect();
        let topologies: Vec<Option<FiniteTopology>> = if q.topological {
            let mut ts: Vec<Option<FiniteTopology>> = if u <= 4 {
                preorders_up_to_iso(u)?
                    .into_iter()
                    .map(|r| FiniteTopology::new(base.clone(), r).map(Some))
                    .collect::<Result<_>>()?
            } else {
                vec![Some(FiniteTopology::discrete(u))]
            };
            if let Some(x) = q.extra_topology.as_ref().filter(|x| x.size() == u) {
                if !ts.iter().any(|y| y.as_ref() == Some(x)) {
                    ts.push(Some(x.clone()));
                }
            }
            ts
        } else {
            vec![None]
        };
        bounds.bases.push(BaseSummary { size: u, units: units.len(), topologies: topologies.len(), skipped });
        for points in &units {
            if points.len() < t.atoms {
                continue;
            }
            for topo in &topologies {
                let base = match topo {
                    Some(x) => x.names().to_vec(),
                    None => base.clone(),
                };
                let Some(problem) = Problem::new(&t, n, u, points, topo.as_ref(), q.topological) else {
                    continue;
                };
                let (found, nodes) = problem.solve(&budget)?;
                bounds.nodes += nodes;
                if let Some(label) = found {
                    let rep = Representation {
                        n,
                        base,
                        points: points.clone(),
                        label,
                        atoms: names.clone(),
                        topology: topo.clone(),
                    };
                    if let Some(why) = verify_representation(a, &rep)? {
                        return Err(Error::Precondition(format!("search produced an invalid representation: {why}")));
                    }
                    return Ok(RepOutcome { found: Some(rep), bounds });
                }
            }
        }
    }
    Ok(RepOutcome { found: None, bounds })
}

/// One labelling problem: every point of `V` gets an atom so that each
/// constraint group carries exactly the atoms required by its centre.
struct Problem<'a> {
    t: &'a Tables,
    points: usize,
    /// Atoms allowed at each point by the diagonals.
    allowed: Vec<Vec<usize>>,
    /// `(centre, group, op)`; op `< n` is `c_op`, otherwise `I_{op-n}`.
    cons: Vec<(usize, usize, usize)>,
    groups: Vec<Vec<usize>>,
    /// Constraints centred at each point, and constraints whose group holds it.
    centred: Vec<Vec<usize>>,
    member: Vec<Vec<usize>>,
    n: usize,
}

impl<'a> Problem<'a> {
    fn new(
        t: &'a Tables,
        n: usize,
        u: usize,
        points: &[Vec<usize>],
        topo: Option<&FiniteTopology>,
        topological: bool,
    ) -> Option<Self> {
        let index: HashMap<&[usize], usize> = points.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
        let allowed: Vec<Vec<usize>> = points
            .iter()
            .map(|s| {
                (0..t.atoms)
                    .filter(|&b| (0..n).all(|i| (0..n).all(|j| t.below[b][i * n + j] == (s[i] == s[j]))))
                    .collect()
            })
            .collect();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_id: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut cons = Vec::new();
        let mut intern = |g: Vec<usize>| {
            let next = groups.len();
            *group_id.entry(g.clone()).or_insert_with(|| {
                groups.push(g);
                next
            })
        };
        for (k, s) in points.iter().enumerate() {
            for i in 0..n {
                let mut line = Vec::new();
                let mut up = Vec::new();
                for x in 0..u {
                    let mut w = s.clone();
                    w[i] = x;
                    let p = index.get(w.as_slice()).copied();
                    if let Some(p) = p {
                        line.push(p);
                    }
                    if topological && topo.map_or(x == s[i], |tp| tp.leq(s[i], x)) {
                        // an up-fibre leaving V would put s below −I_i 1
                        up.push(p?);
                    }
                }
                cons.push((k, intern(line), i));
                if topological {
                    cons.push((k, intern(up), n + i));
                }
            }
        }
        let mut centred = vec![Vec::new(); points.len()];
        let mut member = vec![Vec::new(); points.len()];
        for (c, &(centre, g, _)) in cons.iter().enumerate() {
            centred[centre].push(c);
            for &p in &groups[g] {
                member[p].push(c);
            }
        }
        Some(Problem { t, points: points.len(), allowed, cons, groups, centred, member, n })
    }

    fn required(&self, op: usize, b: usize) -> &FixedBitSet {
        if op < self.n {
            &self.t.cyl[op][b]
        } else {
            &self.t.dia[op - self.n][b]
        }
    }

    /// The least labelling in point order. Branches on the first point run in
    /// parallel; each counts its own nodes, and only branches up to the winner
    /// are charged, so the result and the count do not depend on scheduling.
    fn solve(&self, budget: &AtomicU64) -> Result<(Option<Vec<usize>>, u64)> {
        if self.points == 0 {
            return Ok((None, 0));
        }
        let results: Vec<Result<(Option<Vec<usize>>, u64)>> = self.allowed[0]
            .par_iter()
            .map(|&b| {
                let mut st = State::new(self);
                let mut nodes = 0u64;
                let found = if st.assign(self, 0, b) {
                    let r = self.dfs(&mut st, 1, &mut nodes, budget);
                    r?
                } else {
                    false
                };
                Ok((found.then(|| st.label.clone()), nodes))
            })
            .collect();
        let mut total = 0;
        for r in results {
            let (found, nodes) = r?;
            total += nodes;
            if found.is_some() {
                return Ok((found, total));
            }
        }
        Ok((None, total))
    }

    fn dfs(&self, st: &mut State, p: usize, nodes: &mut u64, budget: &AtomicU64) -> Result<bool> {
        if p == self.points {
            return Ok(st.unused == 0);
        }
        *nodes += 1;
        if budget.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| b.checked_sub(1)).is_err() {
            return Err(Error::Budget("representation search node budget".into()));
        }
        if self.points - p < st.unused {
            return Ok(false);
        }
        for &b in &self.allowed[p] {
            if st.assign(self, p, b) {
                if self.dfs(st, p + 1, nodes, budget)? {
                    return Ok(true);
                }
            }
            st.unassign(self, p);
        }
        Ok(false)
    }
}

struct State {
    label: Vec<usize>,
    counts: Vec<Vec<u32>>,
    open: Vec<usize>,
    used: Vec<u32>,
    unused: usize,
}

impl State {
    fn new(pr: &Problem) -> Self {
        State {
            label: vec![usize::MAX; pr.points],
            counts: vec![vec![0; pr.t.atoms]; pr.groups.len()],
            open: pr.groups.iter().map(|g| g.len()).collect(),
            used: vec![0; pr.t.atoms],
            unused: pr.t.atoms,
        }
    }

    /// Place `b` at `p` and report whether every constraint can still be met.
    /// The placement is recorded either way; `unassign` undoes it.
    fn assign(&mut self, pr: &Problem, p: usize, b: usize) -> bool {
        self.label[p] = b;
        if self.used[b] == 0 {
            self.unused -= 1;
        }
        self.used[b] += 1;
        let mut touched: Vec<usize> = pr.member[p].iter().map(|&c| pr.cons[c].1).collect();
        touched.sort_unstable();
        touched.dedup();
        for &g in &touched {
            self.counts[g][b] += 1;
            self.open[g] -= 1;
        }
        pr.member[p].iter().chain(&pr.centred[p]).all(|&c| self.feasible(pr, c))
    }

    fn unassign(&mut self, pr: &Problem, p: usize) {
        let b = self.label[p];
        let mut touched: Vec<usize> = pr.member[p].iter().map(|&c| pr.cons[c].1).collect();
        touched.sort_unstable();
        touched.dedup();
        for &g in &touched {
            self.counts[g][b] -= 1;
            self.open[g] += 1;
        }
        self.used[b] -= 1;
        if self.used[b] == 0 {
            self.unused += 1;
        }
        self.label[p] = usize::MAX;
    }

    fn feasible(&self, pr: &Problem, c: usize) -> bool {
        let (centre, g, op) = pr.cons[c];
        let l = self.label[centre];
        if l == usize::MAX {
            return true;
        }
        let req = pr.required(op, l);
        let counts = &self.counts[g];
        let mut missing = 0;
        for (a, &cnt) in counts.iter().enumerate() {
            let want = req.contains(a);
            if cnt > 0 && !want {
                return false;
            }
            if want && cnt == 0 {
                missing += 1;
            }
        }
        missing <= self.open[g]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::complex_algebra;
    use crate::toposet::{full_set_algebra, square_frame};

    #[test]
    fn full_set_algebra_is_its_own_representation() {
        let a = complex_algebra(square_frame(2, 2, None).unwrap());
        let out = brute_force_represent(&a, &RepSearch::new(3, UnitKind::Square)).unwrap();
        let rep = out.found.unwrap();
        assert_eq!(rep.base.len(), 2);
        assert!(verify_representation(&a, &rep).unwrap().is_none());
    }

    #[test]
    fn discrete_topology_keeps_the_base() {
        let a = full_set_algebra(&FiniteTopology::discrete(2), 2).unwrap();
        let out = brute_force_represent(&a, &RepSearch::new(3, UnitKind::Square).topological()).unwrap();
        let rep = out.found.unwrap();
        assert_eq!(rep.base.len(), 2);
        assert!(rep.topology.as_ref().unwrap().is_discrete());
    }

    #[test]
    fn chain_topology_is_recovered() {
        let a = full_set_algebra(&FiniteTopology::chain(2), 2).unwrap();
        let plain = brute_force_represent(&a, &RepSearch::new(2, UnitKind::Square)).unwrap();
        // without topologies the interior operators are not checked
        assert!(plain.found.is_some());
        let out = brute_force_represent(&a, &RepSearch::new(2, UnitKind::Square).topological()).unwrap();
        let rep = out.found.unwrap();
        assert!(!rep.topology.as_ref().unwrap().is_discrete());
        assert!(verify_representation(&a, &rep).unwrap().is_none());
    }

    #[test]
    fn too_many_atoms_for_small_bases() {
        let a = complex_algebra(square_frame(3, 2, None).unwrap());
        let out = brute_force_represent(&a, &RepSearch::new(2, UnitKind::Diagonizable)).unwrap();
        assert!(out.found.is_none());
        assert_eq!(out.bounds.bases.len(), 2);
    }

    #[test]
    fn tampered_labels_fail_verification() {
        let a = complex_algebra(square_frame(2, 2, None).unwrap());
        let mut rep = brute_force_represent(&a, &RepSearch::new(2, UnitKind::Square)).unwrap().found.unwrap();
        rep.label.swap(0, 1);
        assert!(verify_representation(&a, &rep).unwrap().is_some());
    }

    #[test]
    fn json_round_trip() {
        let a = full_set_algebra(&FiniteTopology::chain(2), 2).unwrap();
        let rep = brute_force_represent(&a, &RepSearch::new(2, UnitKind::Square).topological())
            .unwrap()
            .found
            .unwrap();
        let j = rep.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = Representation::from_json(&a, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn preorder_counts() {
        // unlabelled preorders on 1..4 points
        let counts: Vec<usize> = (1..=4).map(|u| preorders_up_to_iso(u).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 3, 9, 33]);
        assert!(preorders_up_to_iso(2).unwrap()[0].is_identity());
    }

    #[test]
    fn relativized_units_are_enumerated() {
        let (units, skipped) = candidate_units(2, 2, UnitKind::Diagonizable).unwrap();
        assert!(skipped.is_none());
        assert_eq!(units[0].len(), 4);
        // the diagonal alone uses both points but is a different unit
        assert!(units.iter().any(|v| v.len() == 2));
    }

    #[test]
    fn subalgebras_use_smaller_bases() {
        // only the diagonal and its complement; two points already suffice
        let a = complex_algebra(square_frame(3, 2, None).unwrap());
        let sub = crate::algebra::generated_subalgebra(&a, &[]).unwrap();
        let out = brute_force_represent(&sub, &RepSearch::new(3, UnitKind::Square)).unwrap();
        assert_eq!(out.base_size(), Some(2));
        let top = brute_force_represent(&sub.discrete(), &RepSearch::new(3, UnitKind::Square).topological()).unwrap();
        assert_eq!(top.base_size(), Some(2));
    }
}
