//! Complex blurs, index blurs and the truncated blow-up `L × At R × J`.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::FiniteRa;
use crate::error::{Error, Result};

/// Which row triples compose like `R` regardless of their blurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexBlur {
    /// Rows `i, j, k` pairwise distinct.
    Distinct,
    /// Every row triple.
    All,
}

impl IndexBlur {
    pub fn holds(self, i: usize, j: usize, k: usize) -> bool {
        match self {
            IndexBlur::Distinct => i != j && j != k && i != k,
            IndexBlur::All => true,
        }
    }
}

/// A family `J` of sets of diversity atoms with an index blur truncated to
/// `rows` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlurSpec {
    pub j: Vec<FixedBitSet>,
    pub e: IndexBlur,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlurSpecJson {
    #[serde(rename = "J")]
    pub j: Vec<Vec<String>>,
    #[serde(rename = "E_preset")]
    pub e_preset: IndexBlur,
    #[serde(rename = "L")]
    pub rows: usize,
}

impl BlurSpec {
    pub fn new(r: &FiniteRa, j: &[Vec<usize>], e: IndexBlur, rows: usize) -> Result<Self> {
        let j = j
            .iter()
            .map(|w| {
                if let Some(&a) = w.iter().find(|&&a| a >= r.len() || a == r.identity()) {
                    return Err(Error::Precondition(format!("blur member holds a non-diversity atom #{a}")));
                }
                Ok(r.set_of(w.iter().copied()))
            })
            .collect::<Result<_>>()?;
        Ok(BlurSpec { j, e, rows })
    }

    /// `J = {I}`.
    pub fn whole(r: &FiniteRa, e: IndexBlur, rows: usize) -> Self {
        BlurSpec { j: vec![r.set_of(r.diversity())], e, rows }
    }

    /// `J = {{a} : a ∈ I}`.
    pub fn singletons(r: &FiniteRa, e: IndexBlur, rows: usize) -> Self {
        BlurSpec { j: r.diversity().into_iter().map(|a| r.set_of([a])).collect(), e, rows }
    }

    pub fn from_json(r: &FiniteRa, j: &BlurSpecJson) -> Result<Self> {
        let members = j
            .j
            .iter()
            .map(|w| w.iter().map(|a| r.atom(a)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(r, &members, j.e_preset, j.rows)
    }

    pub fn to_json(&self, r: &FiniteRa) -> BlurSpecJson {
        BlurSpecJson { j: self.j.iter().map(|w| r.set_names(w)).collect(), e_preset: self.e, rows: self.rows }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlurCondition {
    pub name: String,
    pub instances: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NblurReport {
    pub n: usize,
    pub members: usize,
    pub notes: Vec<String>,
    /// `(J1)` through `(J5)`, in order.
    pub conditions: Vec<BlurCondition>,
    pub strong: BlurCondition,
}

impl NblurReport {
    pub fn condition(&self, name: &str) -> Option<&BlurCondition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn is_blur(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn is_strong(&self) -> bool {
        self.is_blur() && self.strong.passed
    }
}

/// `safe(V, W, T)`: every `t ∈ T` lies below `v;w` for all `v ∈ V`, `w ∈ W`.
fn safe(r: &FiniteRa, v: &FixedBitSet, w: &FixedBitSet, t: &FixedBitSet) -> bool {
    v.ones().all(|a| w.ones().all(|b| t.is_subset(r.compose_atoms(a, b))))
}

struct Tally {
    name: &'static str,
    instances: u64,
    witness: Option<BTreeMap<String, Vec<String>>>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, instances: 0, witness: None }
    }

    fn fail(&mut self, parts: Vec<(&str, Vec<String>)>) {
        if self.witness.is_none() {
            self.witness = Some(parts.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
        }
    }

    fn done(self) -> BlurCondition {
        BlurCondition { name: self.name.into(), instances: self.instances, passed: self.witness.is_none(), witness: self.witness }
    }
}

/// Nondecreasing sequences of length `len` over `0..k`.
fn multisets(k: usize, len: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    fn go(k: usize, len: usize, from: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if acc.len() == len {
            return f(acc);
        }
        for x in from..k {
            acc.push(x);
            let more = go(k, len, x, acc, f);
            acc.pop();
            if !more {
                return false;
            }
        }
        true
    }
    go(k, len, 0, &mut Vec::with_capacity(len), f);
}

/// Evaluate `(J1)`–`(J5)` and the strong condition for `J` as an `n`-blur.
///
/// The conditions quantify over `n − 1` indexed pairs; only the set of pairs
/// matters, so each is swept over multisets of distinct pair behaviours.
pub fn check_nblur(r: &FiniteRa, j: &[FixedBitSet], n: usize) -> Result<NblurReport> {
    if n < 2 {
        return Err(Error::Precondition("blurs need n ≥ 2".into()));
    }
    let div = r.set_of(r.diversity());
    if let Some(w) = j.iter().find(|w| !w.is_subset(&div) || w.len() != r.len()) {
        return Err(Error::Precondition(format!("blur member {:?} is not a set of diversity atoms", r.set_names(w))));
    }
    let names = |x: &FixedBitSet| r.set_names(x);
    let one = |a: usize| vec![r.name(a).to_string()];
    let mut notes = vec![
        "safe(V,W,T) reads: t ≤ v;w for every v∈V, w∈W, t∈T".to_string(),
        "(J5) reads the i-th factor as P_i;Q_i".to_string(),
    ];

    let mut j1 = Tally::new("J1");
    for w in j {
        j1.instances += 1;
        if w.is_clear() {
            j1.fail(vec![("W", vec![])]);
        }
    }

    let mut j2 = Tally::new("J2");
    let mut union = r.empty_set();
    for w in j {
        union.union_with(w);
    }
    j2.instances = div.count_ones(..) as u64;
    let missing: Vec<usize> = div.difference(&union).collect();
    if !missing.is_empty() {
        j2.fail(vec![("missing", missing.iter().map(|&a| r.name(a).to_string()).collect())]);
    }

    let mut j3 = Tally::new("J3");
    for p in div.ones() {
        for w in j {
            j3.instances += 1;
            let pw = r.compose(&r.set_of([p]), w);
            if let Some(a) = div.difference(&pw).next() {
                j3.fail(vec![("P", one(p)), ("W", names(w)), ("missing", one(a))]);
            }
        }
    }

    // (J4): for each pair (V, W), the members T that are safe over it.
    let mut j4 = Tally::new("J4");
    let mut behaviours: Vec<(FixedBitSet, (usize, usize))> = Vec::new();
    for (vi, v) in j.iter().enumerate() {
        for (wi, w) in j.iter().enumerate() {
            let mut ts = FixedBitSet::with_capacity(j.len());
            ts.extend(j.iter().enumerate().filter(|(_, t)| safe(r, v, w, t)).map(|(k, _)| k));
            if !behaviours.iter().any(|(b, _)| *b == ts) {
                behaviours.push((ts, (vi, wi)));
            }
        }
    }
    if !j.is_empty() {
        notes.push(format!("(J4) swept over {} distinct safe-sets of pairs", behaviours.len()));
        multisets(behaviours.len(), n - 1, &mut |pick| {
            j4.instances += 1;
            let mut common = FixedBitSet::with_capacity(j.len());
            common.insert_range(..);
            for &b in pick {
                common.intersect_with(&behaviours[b].0);
            }
            if common.is_clear() {
                let mut vs = Vec::new();
                let mut ws = Vec::new();
                for &b in pick {
                    let (vi, wi) = behaviours[b].1;
                    vs.push(format!("{:?}", names(&j[vi])));
                    ws.push(format!("{:?}", names(&j[wi])));
                }
                j4.fail(vec![("V", vs), ("W", ws)]);
                return false;
            }
            true
        });
    }

    // (J5): composites P;Q restricted to the diversity atoms.
    let mut j5 = Tally::new("J5");
    let mut composites: Vec<(FixedBitSet, (usize, usize))> = Vec::new();
    for p in div.ones() {
        for q in div.ones() {
            let mut pq = r.compose_atoms(p, q).clone();
            pq.intersect_with(&div);
            if !composites.iter().any(|(c, _)| *c == pq) {
                composites.push((pq, (p, q)));
            }
        }
    }
    notes.push(format!("(J5) swept over {} distinct composites P;Q", composites.len()));
    multisets(composites.len(), n - 1, &mut |pick| {
        let mut meet = div.clone();
        for &c in pick {
            meet.intersect_with(&composites[c].0);
        }
        for w in j {
            j5.instances += 1;
            if w.is_disjoint(&meet) {
                let ps = pick.iter().map(|&c| r.name(composites[c].1 .0).to_string()).collect();
                let qs = pick.iter().map(|&c| r.name(composites[c].1 .1).to_string()).collect();
                j5.fail(vec![("P", ps), ("Q", qs), ("W", names(w))]);
                return false;
            }
        }
        true
    });

    let mut strong = Tally::new("strong");
    'outer: for v in j {
        for w in j {
            for t in j {
                strong.instances += 1;
                if !safe(r, v, w, t) {
                    strong.fail(vec![("V", names(v)), ("W", names(w)), ("T", names(t))]);
                    break 'outer;
                }
            }
        }
    }

    Ok(NblurReport {
        n,
        members: j.len(),
        notes,
        conditions: vec![j1.done(), j2.done(), j3.done(), j4.done(), j5.done()],
        strong: strong.done(),
    })
}

/// The truncated blow-up of `R` by `(J, E)` with the copies of each atom of `R`.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub ra: FiniteRa,
    pub preset: IndexBlur,
    pub rows: usize,
    /// For each atom of `R`, the atoms of the blow-up that it splits into.
    pub copies: Vec<FixedBitSet>,
}

/// Atoms `Id` and `(l, a, W)` for `l < L`, `a` a diversity atom, `W ∈ J`.
/// `(k, c, W) ≤ (i, a, S);(j, b, Z)` iff `c ≤ a;b` in `R` and either the rows
/// are `E`-related or `safe(S, Z, W)`.
pub fn blowup_blur_atoms(r: &FiniteRa, spec: &BlurSpec) -> Result<Blowup> {
    if spec.rows < 1 {
        return Err(Error::Precondition("the blow-up needs at least one row".into()));
    }
    let report = check_nblur(r, &spec.j, 2)?;
    for c in &report.conditions[..2] {
        if !c.passed {
            return Err(Error::Precondition(format!("({}) fails for J: {:?}", c.name, c.witness)));
        }
    }
    let div = r.diversity();
    let (nj, nd) = (spec.j.len(), div.len());
    let mut names = vec![r.name(r.identity()).to_string()];
    let mut parts = vec![(0, 0, 0)];
    for l in 0..spec.rows {
        for (ai, &a) in div.iter().enumerate() {
            for w in 0..nj {
                names.push(format!("{}.{l}.J{w}", r.name(a)));
                parts.push((l, ai, w));
            }
        }
    }
    let slot = |l: usize, ai: usize, w: usize| 1 + (l * nd + ai) * nj + w;
    let pos: Vec<usize> = {
        let mut p = vec![usize::MAX; r.len()];
        for (ai, &a) in div.iter().enumerate() {
            p[a] = ai;
        }
        p
    };
    let mut converse = vec![0];
    for &(l, ai, w) in &parts[1..] {
        converse.push(slot(l, pos[r.converse(div[ai])], w));
    }
    let mut safe_table = vec![false; nj * nj * nj];
    for s in 0..nj {
        for z in 0..nj {
            for w in 0..nj {
                safe_table[(s * nj + z) * nj + w] = safe(r, &spec.j[s], &spec.j[z], &spec.j[w]);
            }
        }
    }
    let ra = FiniteRa::from_table(names, 0, converse, |x, y, z| {
        let (i, a, s) = parts[x];
        let (j, b, zz) = parts[y];
        let (k, c, w) = parts[z];
        r.consistent(div[a], div[b], div[c]) && (spec.e.holds(i, j, k) || safe_table[(s * nj + zz) * nj + w])
    })?;
    let mut copies = vec![ra.set_of([0]); r.len()];
    for (ai, &a) in div.iter().enumerate() {
        copies[a] = ra.set_of((0..spec.rows).flat_map(|l| (0..nj).map(move |w| slot(l, ai, w))));
    }
    Ok(Blowup { ra, preset: spec.e, rows: spec.rows, copies })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub preset: IndexBlur,
    pub rows: usize,
    pub instances: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Check that `a ↦ ⋃ copies(a)` is an injective homomorphism of `R` into the
/// complex algebra of the blow-up, on every atom and atom pair.
pub fn check_copy_embedding(r: &FiniteRa, b: &Blowup) -> EmbeddingReport {
    let mut report = EmbeddingReport { preset: b.preset, rows: b.rows, instances: 0, failure: None };
    let h = |x: &FixedBitSet| {
        let mut out = b.ra.empty_set();
        for a in x.ones() {
            out.union_with(&b.copies[a]);
        }
        out
    };
    let mut cover = b.ra.empty_set();
    for a in 0..r.len() {
        report.instances += 1;
        if b.copies[a].is_clear() {
            report.failure = Some(format!("{} has no copies", r.name(a)));
            return report;
        }
        if !cover.is_disjoint(&b.copies[a]) {
            report.failure = Some(format!("copies of {} overlap another atom's", r.name(a)));
            return report;
        }
        cover.union_with(&b.copies[a]);
    }
    report.instances += 1;
    if cover.count_ones(..) != b.ra.len() {
        report.failure = Some("the copies do not cover the blow-up".into());
        return report;
    }
    if b.copies[r.identity()] != b.ra.set_of([b.ra.identity()]) {
        report.failure = Some("the identity is not preserved".into());
        return report;
    }
    for a in 0..r.len() {
        report.instances += 1;
        if h(&r.set_of([r.converse(a)])) != b.ra.converse_set(&b.copies[a]) {
            report.failure = Some(format!("converse of {}", r.name(a)));
            return report;
        }
        for c in 0..r.len() {
            report.instances += 1;
            let want = h(r.compose_atoms(a, c));
            let got = b.ra.compose(&b.copies[a], &b.copies[c]);
            if want != got {
                report.failure = Some(format!(
                    "{};{}: image {:?} but composite of images {:?}",
                    r.name(a),
                    r.name(c),
                    b.ra.set_names(&want),
                    b.ra.set_names(&got)
                ));
                return report;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::maddux_ek23;
    use super::*;

    #[test]
    fn whole_blur_on_e3() {
        let r = maddux_ek23(3).unwrap();
        let spec = BlurSpec::whole(&r, IndexBlur::Distinct, 3);
        let rep = check_nblur(&r, &spec.j, 3).unwrap();
        for name in ["J1", "J2", "J3"] {
            assert!(rep.condition(name).unwrap().passed, "{name}");
        }
        // the only T is I, and a1;a1 misses a1
        assert!(!rep.condition("J4").unwrap().passed);
        assert!(rep.condition("J5").unwrap().passed);
        assert!(!rep.strong.passed);
    }

    #[test]
    fn singleton_blur_fails_j3_at_a_diagonal_pair() {
        let r = maddux_ek23(3).unwrap();
        let spec = BlurSpec::singletons(&r, IndexBlur::Distinct, 3);
        let rep = check_nblur(&r, &spec.j, 3).unwrap();
        let j3 = rep.condition("J3").unwrap();
        assert!(!j3.passed);
        let w = j3.witness.as_ref().unwrap();
        assert_eq!(w["P"], vec!["a1"]);
        assert_eq!(w["W"], vec!["a1"]);
        assert_eq!(w["missing"], vec!["a1"]);
    }

    #[test]
    fn empty_member_fails_j1() {
        let r = maddux_ek23(2).unwrap();
        let spec = BlurSpec::new(&r, &[vec![], vec![1, 2]], IndexBlur::All, 1).unwrap();
        let rep = check_nblur(&r, &spec.j, 3).unwrap();
        assert!(!rep.condition("J1").unwrap().passed);
        assert!(rep.condition("J2").unwrap().passed);
        assert!(blowup_blur_atoms(&r, &spec).is_err());
    }

    #[test]
    fn identity_in_a_member_is_rejected() {
        let r = maddux_ek23(2).unwrap();
        assert!(BlurSpec::new(&r, &[vec![0, 1]], IndexBlur::All, 1).is_err());
    }

    #[test]
    fn one_row_collapses_to_r() {
        let r = maddux_ek23(3).unwrap();
        let spec = BlurSpec::new(&r, &[vec![1, 2], vec![2, 3]], IndexBlur::All, 1).unwrap();
        let b = blowup_blur_atoms(&r, &spec).unwrap();
        assert_eq!(b.ra.len(), 1 + 3 * 2);
        for x in 1..b.ra.len() {
            for y in 1..b.ra.len() {
                for z in 1..b.ra.len() {
                    let base = |v: usize| r.atom(b.ra.name(v).split('.').next().unwrap()).unwrap();
                    assert_eq!(b.ra.consistent(x, y, z), r.consistent(base(x), base(y), base(z)));
                }
            }
        }
    }

    #[test]
    fn three_rows_embed_r() {
        let r = maddux_ek23(3).unwrap();
        let spec = BlurSpec::whole(&r, IndexBlur::Distinct, 3);
        let b = blowup_blur_atoms(&r, &spec).unwrap();
        assert!(b.ra.peirce_violation().is_none());
        let e = check_copy_embedding(&r, &b);
        assert!(e.passed(), "{e:?}");
    }

    #[test]
    fn two_rows_are_too_few_for_distinct_rows() {
        let r = maddux_ek23(3).unwrap();
        let spec = BlurSpec::whole(&r, IndexBlur::Distinct, 2);
        let b = blowup_blur_atoms(&r, &spec).unwrap();
        assert!(!check_copy_embedding(&r, &b).passed());
    }

    #[test]
    fn blur_json_round_trip() {
        let r = maddux_ek23(2).unwrap();
        let spec = BlurSpec::singletons(&r, IndexBlur::All, 2);
        let j = spec.to_json(&r);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"E_preset\":\"all\""));
        let back: BlurSpecJson = serde_json::from_str(&text).unwrap();
        assert_eq!(BlurSpec::from_json(&r, &back).unwrap(), spec);
    }
}
