//! Concrete topological cylindric set algebras over finite bases.
//!
//! A finite topology is an Alexandrov space, stored as its specialization
//! preorder; the open sets are the up-sets. The set algebra with unit
//! `V ⊆ ^nU` is the complex algebra of the frame whose atoms are the points of
//! `V`, with `s T_i t` iff `s` and `t` agree off `i`, and `s R_k t` iff they
//! agree off `k` and `s_k ≤ t_k`. The box over `R_k` is then
//! `I_k X = {s : s_k ∈ int{a : s^k_a ∈ X}}`.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{complex_algebra, AtomStructure, CheckMode, Element, FiniteBao, Relation};
use crate::error::{Error, Result};

/// Largest `|V|` accepted for a set-algebra unit.
pub const SEQUENCE_BOUND: usize = 4096;

/// Largest `|^nU|` for which every subset is enumerated.
pub const SUBSET_BOUND: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopology {
    names: Vec<String>,
    leq: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyJson {
    #[serde(rename = "U")]
    pub base: Vec<String>,
    pub leq: Vec<[String; 2]>,
}

impl FiniteTopology {
    /// `leq` must be a preorder on `0..names.len()`.
    pub fn new(names: Vec<String>, leq: Relation) -> Result<Self> {
        if leq.size() != names.len() {
            return Err(Error::Malformed("order and base differ in size".into()));
        }
        if let Some(a) = leq.first_irreflexive() {
            return Err(Error::Malformed(format!("order is not reflexive at `{}`", names[a])));
        }
        if let Some((a, b, c)) = leq.first_intransitive() {
            return Err(Error::Malformed(format!(
                "order is not transitive: {} ≤ {} ≤ {}",
                names[a], names[b], names[c]
            )));
        }
        Ok(FiniteTopology { names, leq })
    }

    /// The preorder generated by `pairs`.
    pub fn generated(names: Vec<String>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let leq = preorder_closure(Relation::from_pairs(names.len(), pairs));
        FiniteTopology { names, leq }
    }

    pub fn discrete(u: usize) -> Self {
        Self::generated(numbered(u), [])
    }

    pub fn indiscrete(u: usize) -> Self {
        FiniteTopology { names: numbered(u), leq: Relation::total(u) }
    }

    /// `0 ≤ 1 ≤ … ≤ u−1`.
    pub fn chain(u: usize) -> Self {
        Self::generated(numbered(u), (1..u).map(|a| (a - 1, a)))
    }

    /// The preorder generated by a random relation of the given density.
    pub fn random(u: usize, density: f64, rng: &mut impl Rng) -> Self {
        let mut pairs = Vec::new();
        for a in 0..u {
            for b in 0..u {
                if a != b && rng.gen_bool(density) {
                    pairs.push((a, b));
                }
            }
        }
        Self::generated(numbered(u), pairs)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq.holds(a, b)
    }

    pub fn order(&self) -> &Relation {
        &self.leq
    }

    pub fn is_discrete(&self) -> bool {
        self.leq.is_identity()
    }

    /// The largest up-set inside `s`.
    pub fn int(&self, s: &FixedBitSet) -> FixedBitSet {
        self.leq.boxed(s)
    }

    pub fn is_open(&self, s: &FixedBitSet) -> bool {
        self.int(s) == *s
    }

    /// The subspace on `part`, with points renumbered in the given order.
    pub fn subspace(&self, part: &[usize]) -> FiniteTopology {
        let names = part.iter().map(|&a| self.names[a].clone()).collect();
        let mut leq = Relation::empty(part.len());
        for (x, &a) in part.iter().enumerate() {
            for (y, &b) in part.iter().enumerate() {
                if self.leq(a, b) {
                    leq.insert(x, y);
                }
            }
        }
        FiniteTopology { names, leq }
    }

    pub fn to_json(&self) -> TopologyJson {
        TopologyJson {
            base: self.names.clone(),
            leq: self
                .leq
                .pairs()
                .map(|(a, b)| [self.names[a].clone(), self.names[b].clone()])
                .collect(),
        }
    }

    /// Pairs are closed reflexively and transitively.
    pub fn from_json(j: &TopologyJson) -> Result<Self> {
        let index = name_index(&j.base)?;
        let mut pairs = Vec::new();
        for [a, b] in &j.leq {
            pairs.push((lookup(&index, a)?, lookup(&index, b)?));
        }
        Ok(Self::generated(j.base.clone(), pairs))
    }
}

fn numbered(u: usize) -> Vec<String> {
    (0..u).map(|a| a.to_string()).collect()
}

fn name_index(names: &[String]) -> Result<HashMap<&str, usize>> {
    let mut index = HashMap::new();
    for (k, a) in names.iter().enumerate() {
        if index.insert(a.as_str(), k).is_some() {
            return Err(Error::Malformed(format!("duplicate base element `{a}`")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<&str, usize>, name: &str) -> Result<usize> {
    index.get(name).copied().ok_or_else(|| Error::UnknownAtom(name.to_string()))
}

fn preorder_closure(mut r: Relation) -> Relation {
    let size = r.size();
    for a in 0..size {
        r.insert(a, a);
    }
    let mut rows: Vec<FixedBitSet> = (0..size).map(|a| r.succ(a).clone()).collect();
    for k in 0..size {
        for a in 0..size {
            if rows[a].contains(k) {
                let via = rows[k].clone();
                rows[a].union_with(&via);
            }
        }
    }
    Relation::from_pairs(size, rows.iter().enumerate().flat_map(|(a, row)| row.ones().map(move |b| (a, b))))
}

/// A unit `V ⊆ ^nU`, with points kept sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetAlgebraUnit {
    n: usize,
    base: Vec<String>,
    points: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitJson {
    pub n: usize,
    #[serde(rename = "U")]
    pub base: Vec<String>,
    #[serde(rename = "V")]
    pub points: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitClass {
    pub square: bool,
    pub diagonizable: bool,
    pub locally_square: bool,
    pub generalized: bool,
}

impl SetAlgebraUnit {
    pub fn new(n: usize, base: Vec<String>, points: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        let mut points: Vec<Vec<usize>> = points.into_iter().collect();
        for s in &points {
            if s.len() != n || s.iter().any(|&a| a >= base.len()) {
                return Err(Error::Malformed(format!("{s:?} is not a point of ^{n}U")));
            }
        }
        points.sort();
        points.dedup();
        if points.len() > SEQUENCE_BOUND {
            return Err(Error::Bound(format!("{} sequences exceeds {SEQUENCE_BOUND}", points.len())));
        }
        Ok(SetAlgebraUnit { n, base, points })
    }

    /// `^nU` in lexicographic order.
    pub fn square(base: Vec<String>, n: usize) -> Result<Self> {
        let u = base.len();
        let count = u.checked_pow(n as u32).filter(|&c| c <= SEQUENCE_BOUND);
        if count.is_none() {
            return Err(Error::Bound(format!("{u}^{n} sequences exceeds {SEQUENCE_BOUND}")));
        }
        Self::new(n, base, all_sequences(u, n))
    }

    /// `⋃ ^nU_p` over the given disjoint parts of the base.
    pub fn generalized(base: Vec<String>, parts: &[Vec<usize>], n: usize) -> Result<Self> {
        check_partition(base.len(), parts)?;
        let mut points = Vec::new();
        for part in parts {
            for s in all_sequences(part.len(), n) {
                points.push(s.into_iter().map(|x| part[x]).collect());
            }
        }
        Self::new(n, base, points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn points(&self) -> &[Vec<usize>] {
        &self.points
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(s)).is_ok()
    }

    pub fn point_name(&self, s: &[usize]) -> String {
        let parts: Vec<&str> = s.iter().map(|&a| self.base[a].as_str()).collect();
        format!("({})", parts.join(","))
    }

    pub fn to_json(&self) -> UnitJson {
        UnitJson {
            n: self.n,
            base: self.base.clone(),
            points: self
                .points
                .iter()
                .map(|s| s.iter().map(|&a| self.base[a].clone()).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &UnitJson) -> Result<Self> {
        let index = name_index(&j.base)?;
        let mut points = Vec::new();
        for s in &j.points {
            points.push(s.iter().map(|a| lookup(&index, a)).collect::<Result<Vec<_>>>()?);
        }
        Self::new(j.n, j.base.clone(), points)
    }
}

/// Every map `n → u`, lexicographically.
pub fn all_sequences(u: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..u).map(move |a| {
                    let mut t = s.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

fn check_partition(u: usize, parts: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; u];
    for part in parts {
        for &a in part {
            if a >= u || seen[a] {
                return Err(Error::Precondition(format!("bases overlap or leave the universe at {a}")));
            }
            seen[a] = true;
        }
    }
    Ok(())
}

/// Closure flags, by direct test of every substitution and every map `n → n`.
pub fn check_unit_class(v: &SetAlgebraUnit) -> UnitClass {
    let n = v.n;
    let closed_under = |tau: &[usize]| {
        v.points.iter().all(|s| {
            let t: Vec<usize> = tau.iter().map(|&k| s[k]).collect();
            v.contains(&t)
        })
    };
    let mut diagonizable = true;
    for i in 0..n {
        for j in 0..n {
            // s∘[i|j] replaces the i-th entry by the j-th
            let tau: Vec<usize> = (0..n).map(|k| if k == i { j } else { k }).collect();
            diagonizable &= closed_under(&tau);
        }
    }
    let locally_square = diagonizable && all_sequences(n, n).iter().all(|tau| closed_under(tau));
    let u = v.base.len();
    let square = v.points.len() == u.pow(n as u32);
    // link base elements that share a point; V is generalized iff it is the
    // union of the squares over the linked classes of used elements
    let mut parent: Vec<usize> = (0..u).collect();
    fn root(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut used = vec![false; u];
    for s in &v.points {
        for &a in s {
            used[a] = true;
            let (ra, r0) = (root(&mut parent, a), root(&mut parent, s[0]));
            parent[ra] = r0;
        }
    }
    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for a in (0..u).filter(|&a| used[a]) {
        *class_size.entry(root(&mut parent, a)).or_default() += 1;
    }
    let generalized = v.points.len() == class_size.values().map(|&c| c.pow(n as u32)).sum::<usize>();
    UnitClass { square, diagonizable, locally_square, generalized }
}

/// The frame of the set algebra with unit `v`. With a topology, every fibre
/// `{a : s^k_a ∈ V}` must be up-closed so that `I_k` matches the pointwise
/// definition (and `I_k V = V`).
pub fn unit_frame(v: &SetAlgebraUnit, topo: Option<&FiniteTopology>) -> Result<AtomStructure> {
    let n = v.n;
    let size = v.points.len();
    if let Some(t) = topo {
        if t.size() != v.base.len() {
            return Err(Error::Malformed("topology and unit have different bases".into()));
        }
    }
    let index: HashMap<&[usize], usize> = v.points.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
    let names = v.points.iter().map(|s| v.point_name(s)).collect();
    let class_key = |s: &[usize], i: usize| {
        let mut key = s.to_vec();
        key[i] = usize::MAX;
        key
    };
    let mut cyl = Vec::with_capacity(n);
    for i in 0..n {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let classes: Vec<usize> = v
            .points
            .iter()
            .map(|s| {
                let next = ids.len();
                *ids.entry(class_key(s, i)).or_insert(next)
            })
            .collect();
        cyl.push(Relation::from_classes(&classes));
    }
    let interior = match topo {
        Some(t) => {
            let mut rs = Vec::with_capacity(n);
            for k in 0..n {
                let mut r = Relation::empty(size);
                for (a, s) in v.points.iter().enumerate() {
                    for b in 0..t.size() {
                        if !t.leq(s[k], b) {
                            continue;
                        }
                        let mut w = s.clone();
                        w[k] = b;
                        match index.get(w.as_slice()) {
                            Some(&c) => r.insert(a, c),
                            None => {
                                return Err(Error::Precondition(format!(
                                    "fibre of {} along {k} is not up-closed",
                                    v.point_name(s)
                                )))
                            }
                        }
                    }
                }
                rs.push(r);
            }
            Some(rs)
        }
        None => None,
    };
    let diag = |i: usize, j: usize| {
        let mut d = FixedBitSet::with_capacity(size);
        for (a, s) in v.points.iter().enumerate() {
            if s[i] == s[j] {
                d.insert(a);
            }
        }
        d
    };
    AtomStructure::new(n, names, diag, cyl, interior)
}

/// The frame of `^nU` for `U = {0, …, u−1}`, optionally with interior relations.
pub fn square_frame(u: usize, n: usize, topo: Option<&FiniteTopology>) -> Result<AtomStructure> {
    let base = match topo {
        Some(t) if t.size() != u => return Err(Error::Malformed("topology has the wrong base".into())),
        Some(t) => t.names().to_vec(),
        None => numbered(u),
    };
    unit_frame(&SetAlgebraUnit::square(base, n)?, topo)
}

/// The full topological set algebra on `^nU`.
pub fn full_set_algebra(topo: &FiniteTopology, n: usize) -> Result<FiniteBao> {
    if topo.size() == 0 {
        return Err(Error::Precondition("base must be nonempty".into()));
    }
    Ok(complex_algebra(square_frame(topo.size(), n, Some(topo))?))
}

/// Replace every interior operator by the identity.
pub fn discrete_topologize(a: &FiniteBao) -> FiniteBao {
    a.discrete()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxFailure {
    pub k: usize,
    pub clause: String,
    pub x: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxLemmaReport {
    pub n: usize,
    pub m: usize,
    pub subsets: usize,
    pub failures: Vec<BoxFailure>,
}

impl BoxLemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The cylinder lift `f(X) = {s ∈ ^mU : s↾n ∈ X}` between lexicographic squares.
pub fn cylinder_lift(u: usize, n: usize, m: usize, x: &Element) -> Element {
    let stride = u.pow((m - n) as u32);
    let mut out = FixedBitSet::with_capacity(u.pow(m as u32));
    for p in x.ones() {
        out.insert_range(p * stride..(p + 1) * stride);
    }
    out
}

/// Check `I_k X ⊆ X` and `f(I_k X) = I_k f(X)` for every `X ⊆ ^nU`, `k < n`.
pub fn check_box_lemma(topo: &FiniteTopology, n: usize, m: usize) -> Result<BoxLemmaReport> {
    let u = topo.size();
    check_box_lemma_with(topo, n, m, &|x| cylinder_lift(u, n, m, x))
}

/// As [`check_box_lemma`] with an arbitrary lift, for negative controls.
pub fn check_box_lemma_with(
    topo: &FiniteTopology,
    n: usize,
    m: usize,
    lift: &dyn Fn(&Element) -> Element,
) -> Result<BoxLemmaReport> {
    if m <= n {
        return Err(Error::Precondition(format!("need m > n, got m={m}, n={n}")));
    }
    let small = full_set_algebra(topo, n)?;
    let big = full_set_algebra(topo, m)?;
    if small.atom_count() > SUBSET_BOUND {
        return Err(Error::Bound(format!("{} points is too many subsets to enumerate", small.atom_count())));
    }
    let els = small.elements()?;
    let mut failures = Vec::new();
    for x in &els {
        for k in 0..n {
            let ix = small.interior(k, x);
            if !ix.is_subset(x) {
                failures.push(BoxFailure { k, clause: "deflation".into(), x: small.frame().set_names(x) });
            }
            if lift(&ix) != big.interior(k, &lift(x)) {
                failures.push(BoxFailure { k, clause: "commutation".into(), x: small.frame().set_names(x) });
            }
        }
    }
    Ok(BoxLemmaReport { n, m, subsets: els.len(), failures })
}

/// A generalized set algebra split along its disjoint bases.
#[derive(Clone, Debug)]
pub struct Coproduct {
    pub whole: FiniteBao,
    pub components: Vec<FiniteBao>,
    /// For each atom of `whole`, its component and index there.
    pub placement: Vec<(usize, usize)>,
    pub mode: CheckMode,
    pub isomorphism: bool,
    pub witness: Option<String>,
}

impl Coproduct {
    pub fn project(&self, x: &Element) -> Vec<Element> {
        let mut out: Vec<Element> = self.components.iter().map(|c| c.bottom()).collect();
        for a in x.ones() {
            let (c, b) = self.placement[a];
            out[c].insert(b);
        }
        out
    }

    pub fn reassemble(&self, parts: &[Element]) -> Element {
        let mut x = self.whole.bottom();
        for (a, &(c, b)) in self.placement.iter().enumerate() {
            if parts[c].contains(b) {
                x.insert(a);
            }
        }
        x
    }
}

/// Split the algebra with unit `⋃ ^nU_p` (with the topology on `⋃ U_p`) into
/// the full algebras on each `^nU_p`, and verify that `X ↦ (X ∩ ^nU_p)_p`
/// preserves every operation.
pub fn coproduct_decompose(topo: &FiniteTopology, parts: &[Vec<usize>], n: usize) -> Result<Coproduct> {
    check_partition(topo.size(), parts)?;
    let mut part_of = vec![usize::MAX; topo.size()];
    for (p, part) in parts.iter().enumerate() {
        for &a in part {
            part_of[a] = p;
        }
    }
    if let Some((a, b)) = topo
        .order()
        .pairs()
        .find(|&(a, b)| part_of[a] != usize::MAX && part_of[a] != part_of[b])
    {
        return Err(Error::Precondition(format!(
            "{} ≤ {} crosses components; the space is not their coproduct",
            topo.names()[a],
            topo.names()[b]
        )));
    }
    let unit = SetAlgebraUnit::generalized(topo.names().to_vec(), parts, n)?;
    let whole = complex_algebra(unit_frame(&unit, Some(topo))?);
    let components: Vec<FiniteBao> = parts
        .iter()
        .map(|part| full_set_algebra(&topo.subspace(part), n))
        .collect::<Result<_>>()?;
    let mut placement = Vec::with_capacity(whole.atom_count());
    for name in whole.frame().names() {
        let found = components
            .iter()
            .enumerate()
            .find_map(|(c, comp)| comp.frame().atom(name).ok().map(|b| (c, b)));
        placement.push(found.ok_or_else(|| Error::Malformed(format!("point {name} lies in no component")))?);
    }
    let mut out = Coproduct { whole, components, placement, mode: CheckMode::Exhaustive, isomorphism: true, witness: None };
    let total: usize = out.components.iter().map(FiniteBao::atom_count).sum();
    if total != out.whole.atom_count() {
        out.isomorphism = false;
        out.witness = Some(format!("{} points against {total} in the components", out.whole.atom_count()));
        return Ok(out);
    }
    let probes: Vec<Element> = if out.whole.atom_count() <= SUBSET_BOUND {
        out.whole.elements()?
    } else {
        // c_i is additive and I_k is a box; atoms and coatoms determine both
        out.mode = CheckMode::Atomwise;
        let w = &out.whole;
        (0..w.atom_count())
            .flat_map(|a| {
                let s = w.frame().singleton(a);
                [w.complement(&s), s]
            })
            .collect()
    };
    out.witness = first_mismatch(&out, &probes, n);
    out.isomorphism = out.witness.is_none();
    Ok(out)
}

fn first_mismatch(cp: &Coproduct, probes: &[Element], n: usize) -> Option<String> {
    let w = &cp.whole;
    for i in 0..n {
        for j in 0..n {
            let d: Vec<Element> = cp.components.iter().map(|c| c.diag(i, j)).collect();
            if cp.project(&w.diag(i, j)) != d {
                return Some(format!("d_{i}{j}"));
            }
        }
    }
    for x in probes {
        let px = cp.project(x);
        if cp.reassemble(&px) != *x {
            return Some(format!("round trip of {:?}", w.frame().set_names(x)));
        }
        for k in 0..n {
            let c: Vec<Element> = cp.components.iter().zip(&px).map(|(a, y)| a.cyl(k, y)).collect();
            if cp.project(&w.cyl(k, x)) != c {
                return Some(format!("c_{k} at {:?}", w.frame().set_names(x)));
            }
            let c: Vec<Element> = cp.components.iter().zip(&px).map(|(a, y)| a.interior(k, y)).collect();
            if cp.project(&w.interior(k, x)) != c {
                return Some(format!("I_{k} at {:?}", w.frame().set_names(x)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(a: &FiniteBao, s: &str) -> Element {
        a.frame().singleton(a.frame().atom(s).unwrap())
    }

    #[test]
    fn discrete_interior_is_identity() {
        let a = full_set_algebra(&FiniteTopology::discrete(2), 2).unwrap();
        for x in a.elements().unwrap() {
            assert_eq!(a.interior(0, &x), x);
            assert_eq!(a.interior(1, &x), x);
        }
    }

    #[test]
    fn indiscrete_interior_is_universal_over_the_fibre() {
        let a = full_set_algebra(&FiniteTopology::indiscrete(2), 2).unwrap();
        for x in a.elements().unwrap() {
            let ix = a.interior(0, &x);
            for s in 0..4 {
                let fibre = [s % 2, 2 + s % 2];
                assert_eq!(ix.contains(s), fibre.iter().all(|&t| x.contains(t)));
            }
        }
    }

    #[test]
    fn chain_interior_on_one_dimension() {
        let a = full_set_algebra(&FiniteTopology::chain(2), 1).unwrap();
        assert_eq!(a.interior(0, &point(&a, "(1)")), point(&a, "(1)"));
        assert!(a.interior(0, &point(&a, "(0)")).is_clear());
    }

    #[test]
    fn up_set_interior_is_largest_up_set() {
        let t = FiniteTopology::chain(3);
        let mut s = FixedBitSet::with_capacity(3);
        s.insert(0);
        s.insert(2);
        assert_eq!(t.int(&s).ones().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn sequence_bound_enforced() {
        assert!(matches!(full_set_algebra(&FiniteTopology::discrete(5), 6), Err(Error::Bound(_))));
        assert!(full_set_algebra(&FiniteTopology::discrete(4), 6).is_ok());
    }

    #[test]
    fn box_lemma_holds_for_discrete_and_chain() {
        let rep = check_box_lemma(&FiniteTopology::discrete(2), 1, 2).unwrap();
        assert!(rep.passed());
        let rep = check_box_lemma(&FiniteTopology::chain(2), 1, 2).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.subsets, 4);
    }

    #[test]
    fn broken_lift_fails_box_lemma() {
        let t = FiniteTopology::chain(2);
        // the constant lift onto ^mU commutes (I_k fixes the top), so the
        // control complements the true lift instead
        let top = |_: &Element| {
            let mut all = FixedBitSet::with_capacity(4);
            all.insert_range(..);
            all
        };
        assert!(check_box_lemma_with(&t, 1, 2, &top).unwrap().passed());
        let rep = check_box_lemma_with(&t, 1, 2, &|x| {
            let mut y = cylinder_lift(2, 1, 2, x);
            y.toggle_range(..);
            y
        })
        .unwrap();
        assert!(rep.failures.iter().any(|f| f.clause == "commutation"));
    }

    #[test]
    fn unit_classes() {
        let b = || vec!["0".to_string(), "1".to_string()];
        let sq = SetAlgebraUnit::square(b(), 2).unwrap();
        let c = check_unit_class(&sq);
        assert!(c.square && c.diagonizable && c.locally_square && c.generalized);
        let v = SetAlgebraUnit::new(2, b(), [vec![0, 1], vec![0, 0], vec![1, 1]]).unwrap();
        let c = check_unit_class(&v);
        assert!(c.diagonizable && !c.locally_square);
        let v = SetAlgebraUnit::new(2, b(), [vec![0, 1]]).unwrap();
        let c = check_unit_class(&v);
        assert!(!c.diagonizable && !c.locally_square);
    }

    #[test]
    fn generalized_unit_detected() {
        let base: Vec<String> = numbered(3);
        let v = SetAlgebraUnit::generalized(base, &[vec![0, 1], vec![2]], 2).unwrap();
        let c = check_unit_class(&v);
        assert!(c.generalized && c.locally_square && !c.square);
        assert_eq!(v.points().len(), 5);
    }

    #[test]
    fn single_component_decomposition_is_identity() {
        let cp = coproduct_decompose(&FiniteTopology::chain(2), &[vec![0, 1]], 2).unwrap();
        assert!(cp.isomorphism);
        assert_eq!(cp.components.len(), 1);
        assert!(cp.placement.iter().enumerate().all(|(a, &(c, b))| c == 0 && a == b));
    }

    #[test]
    fn two_component_decomposition() {
        let cp = coproduct_decompose(&FiniteTopology::discrete(3), &[vec![0, 1], vec![2]], 2).unwrap();
        assert!(cp.isomorphism, "{:?}", cp.witness);
        assert_eq!(cp.mode, CheckMode::Exhaustive);
        assert_eq!(cp.components[0].atom_count(), 4);
        assert_eq!(cp.components[1].atom_count(), 1);
    }

    #[test]
    fn chain_components_decompose() {
        let t = FiniteTopology::generated(numbered(4), [(0, 1), (2, 3)]);
        let cp = coproduct_decompose(&t, &[vec![0, 1], vec![2, 3]], 2).unwrap();
        assert!(cp.isomorphism, "{:?}", cp.witness);
        for x in cp.whole.elements().unwrap().iter().step_by(37) {
            assert_eq!(cp.reassemble(&cp.project(x)), *x);
        }
    }

    #[test]
    fn overlapping_bases_rejected() {
        assert!(coproduct_decompose(&FiniteTopology::discrete(3), &[vec![0, 1], vec![1, 2]], 2).is_err());
        let t = FiniteTopology::chain(3);
        assert!(coproduct_decompose(&t, &[vec![0, 1], vec![2]], 2).is_err());
    }

    #[test]
    fn random_topologies_are_preorders() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let t = FiniteTopology::random(4, 0.3, &mut rng);
            assert!(t.order().is_preorder());
            let j = t.to_json();
            assert_eq!(FiniteTopology::from_json(&j).unwrap(), t);
        }
    }

    #[test]
    fn topological_set_algebras_satisfy_the_interior_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let t = FiniteTopology::random(3, 0.3, &mut rng);
            let a = full_set_algebra(&t, 2).unwrap();
            let rep = crate::algebra::check_tca_axioms(&a, 0).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures().next());
            assert_eq!(rep.modes(), vec![CheckMode::Exhaustive]);
        }
    }

    #[test]
    fn non_up_closed_fibre_rejected() {
        let v = SetAlgebraUnit::new(1, numbered(2), [vec![0]]).unwrap();
        assert!(unit_frame(&v, Some(&FiniteTopology::chain(2))).is_err());
        assert!(unit_frame(&v, Some(&FiniteTopology::discrete(2))).is_ok());
    }
}
