//! Atom structures and their complex algebras.
//!
//! An element of a [`FiniteBao`] is a set of atoms of the underlying frame. A
//! subalgebra is kept as a partition of the atoms into blocks; its elements are
//! the unions of blocks. Every algebra handled here is finite, so the term
//! algebra and the complex algebra over the same atoms coincide.

mod axioms;
mod json;
mod term;

pub use axioms::{check_ca_axioms, check_tca_axioms, AxiomReport, AxiomResult, CheckMode, Status};
pub use json::AtomStructureJson;
pub use term::{eval_term, Term};

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A set of atoms.
pub type Element = FixedBitSet;

/// Exhaustive enumeration of elements is only attempted below this many atoms.
pub const EXHAUSTIVE_ATOMS: usize = 12;

/// A binary relation on `0..size`, stored as successor and predecessor rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    succ: Vec<FixedBitSet>,
    pred: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(size: usize) -> Self {
        Relation {
            succ: vec![FixedBitSet::with_capacity(size); size],
            pred: vec![FixedBitSet::with_capacity(size); size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut r = Relation::empty(size);
        for a in 0..size {
            r.insert(a, a);
        }
        r
    }

    pub fn total(size: usize) -> Self {
        Relation::from_classes(&vec![0; size])
    }

    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(size);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    /// The equivalence relation whose classes are the fibres of `class_of`.
    pub fn from_classes(class_of: &[usize]) -> Self {
        let size = class_of.len();
        let mut members: HashMap<usize, FixedBitSet> = HashMap::new();
        for (a, &c) in class_of.iter().enumerate() {
            members
                .entry(c)
                .or_insert_with(|| FixedBitSet::with_capacity(size))
                .insert(a);
        }
        let succ: Vec<FixedBitSet> = class_of.iter().map(|c| members[c].clone()).collect();
        Relation { pred: succ.clone(), succ }
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.succ[a].insert(b);
        self.pred[b].insert(a);
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn holds(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    pub fn succ(&self, a: usize) -> &FixedBitSet {
        &self.succ[a]
    }

    pub fn pred(&self, b: usize) -> &FixedBitSet {
        &self.pred[b]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    /// `{a : ∃b ∈ x, a R b}`.
    pub fn diamond(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.size());
        for b in x.ones() {
            out.union_with(&self.pred[b]);
        }
        out
    }

    /// `{a : ∀b (a R b → b ∈ x)}`.
    pub fn boxed(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.size());
        for (a, row) in self.succ.iter().enumerate() {
            if row.is_subset(x) {
                out.insert(a);
            }
        }
        out
    }

    pub fn first_irreflexive(&self) -> Option<usize> {
        (0..self.size()).find(|&a| !self.holds(a, a))
    }

    pub fn first_asymmetric(&self) -> Option<(usize, usize)> {
        self.pairs().find(|&(a, b)| !self.holds(b, a))
    }

    /// A triple `a R b R c` with `¬ a R c`, if any.
    pub fn first_intransitive(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.size() {
            for b in self.succ[a].ones() {
                if !self.succ[b].is_subset(&self.succ[a]) {
                    let c = self.succ[b].difference(&self.succ[a]).next().unwrap();
                    return Some((a, b, c));
                }
            }
        }
        None
    }

    pub fn is_preorder(&self) -> bool {
        self.first_irreflexive().is_none() && self.first_intransitive().is_none()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_preorder() && self.first_asymmetric().is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.succ
            .iter()
            .enumerate()
            .all(|(a, row)| row.count_ones(..) == 1 && row.contains(a))
    }

    /// Relabel atoms: the new relation relates `map[a]` to `map[b]`.
    pub fn permuted(&self, map: &[usize]) -> Relation {
        Relation::from_pairs(self.size(), self.pairs().map(|(a, b)| (map[a], map[b])))
    }
}

/// A finite frame for a `CA_n` or `TCA_n` signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomStructure {
    n: usize,
    names: Vec<String>,
    index: HashMap<String, usize>,
    diag: Vec<FixedBitSet>,
    cyl: Vec<Relation>,
    interior: Option<Vec<Relation>>,
}

impl AtomStructure {
    /// `diag(i, j)` is consulted for `i < j` only; `d_ii` is always the top.
    pub fn new(
        n: usize,
        names: Vec<String>,
        diag: impl Fn(usize, usize) -> FixedBitSet,
        cyl: Vec<Relation>,
        interior: Option<Vec<Relation>>,
    ) -> Result<Self> {
        let size = names.len();
        if n == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        if cyl.len() != n || cyl.iter().any(|r| r.size() != size) {
            return Err(Error::Malformed("need one cylindrifier relation per index".into()));
        }
        let mut index = HashMap::with_capacity(size);
        for (a, name) in names.iter().enumerate() {
            if index.insert(name.clone(), a).is_some() {
                return Err(Error::Malformed(format!("duplicate atom `{name}`")));
            }
        }
        let mut table = vec![FixedBitSet::with_capacity(size); n * n];
        for i in 0..n {
            table[i * n + i].insert_range(..);
            for j in i + 1..n {
                let d = diag(i, j);
                if d.len() != size {
                    return Err(Error::Malformed(format!("diagonal {i},{j} has wrong width")));
                }
                table[i * n + j] = d.clone();
                table[j * n + i] = d;
            }
        }
        let at = AtomStructure { n, names, index, diag: table, cyl, interior: None };
        match interior {
            Some(r) => at.with_interior(r),
            None => Ok(at),
        }
    }

    /// Attach interior accessibility relations; each must be a preorder.
    pub fn with_interior(mut self, rel: Vec<Relation>) -> Result<Self> {
        if rel.len() != self.n || rel.iter().any(|r| r.size() != self.len()) {
            return Err(Error::Malformed("need one interior relation per index".into()));
        }
        for (i, r) in rel.iter().enumerate() {
            if let Some(a) = r.first_irreflexive() {
                return Err(Error::Malformed(format!(
                    "R_{i} is not reflexive at `{}`",
                    self.names[a]
                )));
            }
            if let Some((a, b, c)) = r.first_intransitive() {
                return Err(Error::Malformed(format!(
                    "R_{i} is not transitive: {} R {} R {}",
                    self.names[a], self.names[b], self.names[c]
                )));
            }
        }
        self.interior = Some(rel);
        Ok(self)
    }

    /// Drop interior relations, so that every `I_i` is the identity.
    pub fn without_interior(mut self) -> Self {
        self.interior = None;
        self
    }

    pub fn n(&self) -> usize {
        self.n
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
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn diag(&self, i: usize, j: usize) -> &FixedBitSet {
        &self.diag[i * self.n + j]
    }

    pub fn cyl(&self, i: usize) -> &Relation {
        &self.cyl[i]
    }

    pub fn interior(&self, i: usize) -> Option<&Relation> {
        self.interior.as_ref().map(|r| &r[i])
    }

    pub fn has_interior(&self) -> bool {
        self.interior.is_some()
    }

    pub fn empty_set(&self) -> Element {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> Element {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn singleton(&self, a: usize) -> Element {
        let mut s = self.empty_set();
        s.insert(a);
        s
    }

    pub fn set_from_names<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Element> {
        let mut s = self.empty_set();
        for name in names {
            s.insert(self.atom(name)?);
        }
        Ok(s)
    }

    pub fn set_names(&self, x: &Element) -> Vec<String> {
        x.ones().map(|a| self.names[a].clone()).collect()
    }

    /// Rename and reorder atoms; `order[k]` is the old index of the new atom `k`.
    pub fn reordered(&self, order: &[usize]) -> AtomStructure {
        let mut to_new = vec![0; order.len()];
        for (k, &old) in order.iter().enumerate() {
            to_new[old] = k;
        }
        let map_set = |s: &FixedBitSet| {
            let mut out = FixedBitSet::with_capacity(s.len());
            for a in s.ones() {
                out.insert(to_new[a]);
            }
            out
        };
        let names = order.iter().map(|&a| self.names[a].clone()).collect();
        AtomStructure::new(
            self.n,
            names,
            |i, j| map_set(self.diag(i, j)),
            self.cyl.iter().map(|r| r.permuted(&to_new)).collect(),
            self.interior
                .as_ref()
                .map(|rs| rs.iter().map(|r| r.permuted(&to_new)).collect()),
        )
        .expect("reordering preserves well-formedness")
    }
}

/// How the carrier of a [`FiniteBao`] sits inside the powerset of the atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// Every set of atoms.
    Full,
    /// Unions of the given blocks, which partition the atoms.
    Blocks(Vec<Element>),
}

/// Unary operators that may be overridden on small algebras (negative controls).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Cyl,
    Interior,
}

type OpTable = HashMap<(UnaryOp, usize), Arc<HashMap<Element, Element>>>;

/// A finite Boolean algebra with operators, realised inside the complex
/// algebra of a frame.
#[derive(Clone, Debug)]
pub struct FiniteBao {
    frame: Arc<AtomStructure>,
    dim: usize,
    carrier: Carrier,
    overrides: OpTable,
}

/// The complex algebra `Cm at`.
pub fn complex_algebra(at: AtomStructure) -> FiniteBao {
    FiniteBao { dim: at.n(), frame: Arc::new(at), carrier: Carrier::Full, overrides: HashMap::new() }
}

/// The complex algebra over an already shared frame.
pub fn complex_algebra_shared(at: Arc<AtomStructure>) -> FiniteBao {
    FiniteBao { dim: at.n(), frame: at, carrier: Carrier::Full, overrides: HashMap::new() }
}

impl FiniteBao {
    pub fn frame(&self) -> &Arc<AtomStructure> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn has_overrides(&self) -> bool {
        !self.overrides.is_empty()
    }

    /// Whether the interior operators are anything other than the identity.
    pub fn has_interior(&self) -> bool {
        self.frame.has_interior() || self.overrides.keys().any(|(op, _)| *op == UnaryOp::Interior)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim {
            Ok(())
        } else {
            Err(Error::Index { index: i, dim: self.dim })
        }
    }

    pub fn bottom(&self) -> Element {
        self.frame.empty_set()
    }

    pub fn top(&self) -> Element {
        self.frame.full_set()
    }

    pub fn join(&self, x: &Element, y: &Element) -> Element {
        let mut z = x.clone();
        z.union_with(y);
        z
    }

    pub fn meet(&self, x: &Element, y: &Element) -> Element {
        let mut z = x.clone();
        z.intersect_with(y);
        z
    }

    pub fn complement(&self, x: &Element) -> Element {
        let mut z = x.clone();
        z.toggle_range(..);
        z
    }

    pub fn cyl(&self, i: usize, x: &Element) -> Element {
        if let Some(t) = self.overrides.get(&(UnaryOp::Cyl, i)) {
            return t[x].clone();
        }
        self.frame.cyl(i).diamond(x)
    }

    pub fn diag(&self, i: usize, j: usize) -> Element {
        self.frame.diag(i, j).clone()
    }

    pub fn interior(&self, i: usize, x: &Element) -> Element {
        if let Some(t) = self.overrides.get(&(UnaryOp::Interior, i)) {
            return t[x].clone();
        }
        match self.frame.interior(i) {
            Some(r) => r.boxed(x),
            None => x.clone(),
        }
    }

    /// `q_i x = −c_i −x`.
    pub fn q(&self, i: usize, x: &Element) -> Element {
        self.complement(&self.cyl(i, &self.complement(x)))
    }

    /// `s_i^j x = c_i(d_ij · x)`.
    pub fn subst(&self, i: usize, j: usize, x: &Element) -> Element {
        self.cyl(i, &self.meet(&self.diag(i, j), x))
    }

    pub fn contains(&self, x: &Element) -> bool {
        match &self.carrier {
            Carrier::Full => x.len() == self.frame.len(),
            Carrier::Blocks(blocks) => blocks
                .iter()
                .all(|b| b.is_subset(x) || b.is_disjoint(x)),
        }
    }

    /// The atoms of this algebra as sets of frame atoms.
    pub fn atoms(&self) -> Vec<Element> {
        match &self.carrier {
            Carrier::Full => (0..self.frame.len()).map(|a| self.frame.singleton(a)).collect(),
            Carrier::Blocks(blocks) => blocks.clone(),
        }
    }

    pub fn atom_count(&self) -> usize {
        match &self.carrier {
            Carrier::Full => self.frame.len(),
            Carrier::Blocks(b) => b.len(),
        }
    }

    /// Every carrier element, ordered by cardinality (in atoms of this algebra)
    /// and then by the bitmask over atoms.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let atoms = self.atoms();
        if atoms.len() > 20 {
            return Err(Error::Bound(format!("{} atoms is too many to enumerate", atoms.len())));
        }
        let mut masks: Vec<u32> = (0..1u32 << atoms.len()).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        Ok(masks
            .into_iter()
            .map(|m| {
                let mut x = self.bottom();
                for (k, a) in atoms.iter().enumerate() {
                    if m >> k & 1 == 1 {
                        x.union_with(a);
                    }
                }
                x
            })
            .collect())
    }

    /// Replace a unary operator by an arbitrary function on carrier elements.
    /// Only meaningful for small algebras; used to build negative controls.
    pub fn with_override(mut self, op: UnaryOp, i: usize, f: impl Fn(&Element) -> Element) -> Result<Self> {
        self.check_index(i)?;
        let table = self.elements()?.into_iter().map(|x| {
            let y = f(&x);
            (x, y)
        });
        self.overrides.insert((op, i), Arc::new(table.collect()));
        Ok(self)
    }

    /// Identity interior operators on every index.
    pub fn discrete(&self) -> FiniteBao {
        let frame = (*self.frame).clone().without_interior();
        let mut out = self.clone();
        out.frame = Arc::new(frame);
        out.overrides.retain(|(op, _), _| *op != UnaryOp::Interior);
        out
    }

    /// The atom structure of this algebra: its atoms with the relations they
    /// induce. Overridden operators are not representable this way.
    pub fn atom_structure(&self) -> Result<AtomStructure> {
        if self.has_overrides() {
            return Err(Error::Precondition("overridden operators have no frame".into()));
        }
        if matches!(self.carrier, Carrier::Full) && self.dim == self.frame.n() {
            return Ok((*self.frame).clone());
        }
        let atoms = self.atoms();
        let k = atoms.len();
        let names: Vec<String> = match &self.carrier {
            Carrier::Full => self.frame.names().to_vec(),
            Carrier::Blocks(_) => (0..k).map(|b| format!("b{b}")).collect(),
        };
        let rel = |op: &dyn Fn(&Element) -> Element| {
            let mut r = Relation::empty(k);
            for (b, atom) in atoms.iter().enumerate() {
                let image = op(atom);
                for (a, other) in atoms.iter().enumerate() {
                    if !image.is_disjoint(other) {
                        r.insert(a, b);
                    }
                }
            }
            r
        };
        let cyl = (0..self.dim).map(|i| rel(&|x| self.cyl(i, x))).collect();
        let interior = if self.frame.has_interior() {
            let mut rs = Vec::new();
            for i in 0..self.dim {
                // a R b iff a ∉ I(−b)
                let mut r = Relation::empty(k);
                for (b, atom) in atoms.iter().enumerate() {
                    let inner = self.interior(i, &self.complement(atom));
                    for (a, other) in atoms.iter().enumerate() {
                        if inner.is_disjoint(other) {
                            r.insert(a, b);
                        }
                    }
                }
                rs.push(r);
            }
            Some(rs)
        } else {
            None
        };
        let diag = |i: usize, j: usize| {
            let d = self.frame.diag(i, j);
            let mut s = FixedBitSet::with_capacity(k);
            for (b, atom) in atoms.iter().enumerate() {
                if atom.is_subset(d) {
                    s.insert(b);
                }
            }
            s
        };
        AtomStructure::new(self.dim, names, diag, cyl, interior)
    }
}

/// `Δx = {i < dim : c_i x ≠ x}`.
pub fn dimension_set(a: &FiniteBao, x: &Element) -> Vec<usize> {
    (0..a.dim()).filter(|&i| a.cyl(i, x) != *x).collect()
}

/// `Nr_m B`: the elements whose dimension set lies inside `m`, with the
/// operators of index `≥ m` forgotten.
pub fn neat_reduct(b: &FiniteBao, m: usize) -> Result<FiniteBao> {
    if m > b.dim() {
        return Err(Error::Precondition(format!("cannot take Nr_{m} of a {}-dimensional algebra", b.dim())));
    }
    if m == b.dim() {
        return Ok(b.clone());
    }
    if b.has_overrides() {
        return Err(Error::Precondition("neat reducts of overridden algebras are not supported".into()));
    }
    // The fixed points of every c_k (k ≥ m) are the unions of the classes of the
    // equivalence generated by those T_k, provided each such union is fixed.
    let frame = b.frame();
    let size = frame.len();
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for k in m..b.dim() {
        for (a, c) in frame.cyl(k).pairs() {
            let (ra, rc) = (find(&mut parent, a), find(&mut parent, c));
            if ra != rc {
                parent[ra.max(rc)] = ra.min(rc);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); size];
    for a in 0..size {
        let r = find(&mut parent, a);
        by_root[r].push(a);
    }
    let old_blocks = b.atoms();
    let mut blocks: Vec<Element> = Vec::new();
    for members in by_root.into_iter().filter(|v| !v.is_empty()) {
        let mut s = frame.empty_set();
        for a in members {
            s.insert(a);
        }
        blocks.push(s);
    }
    // Merge with the old carrier: a new block must be a union of old blocks.
    let mut merged: Vec<Element> = Vec::new();
    let mut taken = vec![false; old_blocks.len()];
    for blk in &blocks {
        let mut s = frame.empty_set();
        for (t, ob) in old_blocks.iter().enumerate() {
            if !ob.is_disjoint(blk) && !taken[t] {
                taken[t] = true;
                s.union_with(ob);
            }
        }
        if !s.is_clear() {
            merged.push(s);
        }
    }
    for blk in &merged {
        for k in m..b.dim() {
            if b.cyl(k, blk) != *blk {
                return Err(Error::Precondition(format!(
                    "c_{k} does not fix the generated blocks; frame relations are not equivalences"
                )));
            }
        }
    }
    merged.sort_by_key(|s| s.ones().next());
    Ok(FiniteBao {
        frame: b.frame.clone(),
        dim: m,
        carrier: Carrier::Blocks(merged),
        overrides: HashMap::new(),
    })
}

/// The subalgebra generated by `gens`. Its atoms are the coarsest partition
/// refining the generators and diagonals whose blocks have cylindrifications
/// and closures (duals of interiors) that are unions of blocks.
pub fn generated_subalgebra(a: &FiniteBao, gens: &[Element]) -> Result<FiniteBao> {
    if a.has_overrides() {
        return Err(Error::Precondition("subalgebras of overridden algebras are not supported".into()));
    }
    if let Some(g) = gens.iter().find(|g| !a.contains(g)) {
        return Err(Error::Precondition(format!("generator {:?} is not in the algebra", a.frame.set_names(g))));
    }
    let closure = |i: usize, x: &Element| a.complement(&a.interior(i, &a.complement(x)));
    let mut blocks = vec![a.top()];
    let mut cuts: Vec<Element> = gens.to_vec();
    for i in 0..a.dim() {
        for j in i + 1..a.dim() {
            cuts.push(a.diag(i, j));
        }
    }
    let refine = |blocks: Vec<Element>, cuts: &[Element]| {
        let mut blocks = blocks;
        for cut in cuts {
            blocks = blocks
                .into_iter()
                .flat_map(|b| [a.meet(&b, cut), a.meet(&b, &a.complement(cut))])
                .filter(|x| !x.is_clear())
                .collect();
        }
        blocks
    };
    blocks = refine(blocks, &cuts);
    loop {
        let before = blocks.len();
        let cuts: Vec<Element> =
            blocks.iter().flat_map(|b| (0..a.dim()).flat_map(move |i| [a.cyl(i, b), closure(i, b)])).collect();
        blocks = refine(blocks, &cuts);
        if blocks.len() == before {
            break;
        }
    }
    blocks.sort_by_key(|s| s.ones().next());
    Ok(FiniteBao { frame: a.frame.clone(), dim: a.dim, carrier: Carrier::Blocks(blocks), overrides: HashMap::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_frame(u: usize, n: usize) -> AtomStructure {
        crate::toposet::square_frame(u, n, None).unwrap()
    }

    #[test]
    fn single_atom_structure_is_two_element() {
        let at = AtomStructure::new(2, vec!["a".into()], |_, _| {
            let mut s = FixedBitSet::with_capacity(1);
            s.insert(0);
            s
        }, vec![Relation::total(1), Relation::total(1)], None)
        .unwrap();
        let a = complex_algebra(at);
        assert_eq!(a.elements().unwrap().len(), 2);
        let top = a.top();
        assert_eq!(a.cyl(0, &top), top);
        assert_eq!(a.cyl(1, &a.bottom()), a.bottom());
    }

    #[test]
    fn dimension_set_of_top_is_empty() {
        let a = complex_algebra(square_frame(2, 3));
        assert!(dimension_set(&a, &a.top()).is_empty());
    }

    #[test]
    fn dimension_set_of_diagonal() {
        let a = complex_algebra(square_frame(2, 3));
        assert_eq!(dimension_set(&a, &a.diag(0, 1)), vec![0, 1]);
    }

    #[test]
    fn dimension_set_of_point() {
        let a = complex_algebra(square_frame(2, 2));
        let p = a.frame().singleton(0);
        assert_eq!(dimension_set(&a, &p), vec![0, 1]);
    }

    #[test]
    fn non_preorder_interior_rejected() {
        let at = square_frame(2, 1);
        let bad = Relation::from_pairs(2, [(0, 1)]);
        assert!(at.with_interior(vec![bad]).is_err());
    }

    #[test]
    fn neat_reduct_of_full_dimension_is_identity() {
        let a = complex_algebra(square_frame(2, 2));
        let r = neat_reduct(&a, 2).unwrap();
        assert_eq!(r.carrier(), a.carrier());
    }

    #[test]
    fn neat_reduct_blocks_are_cylinders() {
        let b = complex_algebra(square_frame(2, 3));
        let r = neat_reduct(&b, 2).unwrap();
        assert_eq!(r.atom_count(), 4);
        for blk in r.atoms() {
            assert_eq!(b.cyl(2, &blk), blk);
        }
    }

    #[test]
    fn neat_reduct_is_functorial() {
        let b = complex_algebra(square_frame(2, 3));
        let direct = neat_reduct(&b, 1).unwrap();
        let staged = neat_reduct(&neat_reduct(&b, 2).unwrap(), 1).unwrap();
        assert_eq!(direct.carrier(), staged.carrier());
    }

    #[test]
    fn neat_reduct_of_two_element_algebra() {
        let at = AtomStructure::new(2, vec!["a".into()], |_, _| {
            let mut s = FixedBitSet::with_capacity(1);
            s.insert(0);
            s
        }, vec![Relation::total(1), Relation::total(1)], None)
        .unwrap();
        let r = neat_reduct(&complex_algebra(at), 1).unwrap();
        assert_eq!(r.elements().unwrap().len(), 2);
    }

    #[test]
    fn cylindrifiers_are_additive() {
        let a = complex_algebra(square_frame(2, 2));
        let els = a.elements().unwrap();
        for x in &els {
            for y in &els {
                for i in 0..2 {
                    assert_eq!(a.cyl(i, &a.join(x, y)), a.join(&a.cyl(i, x), &a.cyl(i, y)));
                }
            }
        }
    }

    #[test]
    fn diagonal_generates_a_four_element_algebra() {
        let a = complex_algebra(square_frame(3, 2));
        let sub = generated_subalgebra(&a, &[]).unwrap();
        assert_eq!(sub.atom_count(), 2);
        assert!(axioms::check_ca_axioms(&sub).unwrap().passed());
    }

    #[test]
    fn generated_subalgebras_are_closed() {
        let topo = crate::toposet::FiniteTopology::chain(3);
        let a = crate::toposet::full_set_algebra(&topo, 2).unwrap();
        let mut g = a.bottom();
        g.insert(1);
        g.insert(5);
        let sub = generated_subalgebra(&a, &[g.clone()]).unwrap();
        assert!(sub.contains(&g));
        let els = sub.elements().unwrap();
        for x in &els {
            for i in 0..2 {
                assert!(sub.contains(&a.cyl(i, x)));
                assert!(sub.contains(&a.interior(i, x)));
            }
        }
    }
}
