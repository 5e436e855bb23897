//! Rainbow signatures, their coloured graphs and atom structures.
//!
//! A signature lists the edge colours (ranked greens `g_i`, tinted greens
//! `g0^i`, whites, reds and optionally the split reds with `rho`) together with
//! the forbidden-triple rules. Compiling it gives a [`Palette`]: dense colour
//! ids, a reverse map for oriented reds, and a lookup table of forbidden
//! triangles.

mod atoms;
pub(crate) mod graph;
mod theta;

pub use atoms::{enumerate_atoms, enumerate_atoms_with, enumerate_graphs, RainbowAtom, RainbowAtoms, ATOM_BUDGET};
pub use graph::{Cone, ColouredGraph, NONE};
pub use theta::{copy_map, theta_check, ThetaFailure, ThetaReport};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedMode {
    /// Unordered reds `r_ij`, `i < j`; a red triangle needs three distinct pairs.
    DistinctPairs,
    /// Oriented reds; in a red triangle every node carries one index.
    MatchedIndices,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    Green(u32),
    Tint(i64),
    White(u32),
    Red { copy: Option<u32>, i: u32, j: u32 },
    Rho,
}

impl Colour {
    pub fn is_green(&self) -> bool {
        matches!(self, Colour::Green(_) | Colour::Tint(_))
    }

    pub fn is_red(&self) -> bool {
        matches!(self, Colour::Red { .. })
    }

    pub fn parse(s: &str) -> Result<Colour> {
        let bad = || Error::Parse(format!("bad colour `{s}`"));
        if s == "rho" {
            return Ok(Colour::Rho);
        }
        if let Some(t) = s.strip_prefix("g0^") {
            return t.parse().map(Colour::Tint).map_err(|_| bad());
        }
        if let Some(t) = s.strip_prefix('g') {
            return t.parse().map(Colour::Green).map_err(|_| bad());
        }
        if let Some(t) = s.strip_prefix('w') {
            return t.parse().map(Colour::White).map_err(|_| bad());
        }
        if let Some(t) = s.strip_prefix("r") {
            let (copy, rest) = match t.strip_prefix('^') {
                Some(t) => {
                    let (c, rest) = t.split_once('_').ok_or_else(bad)?;
                    (Some(c.parse().map_err(|_| bad())?), rest)
                }
                None => (None, t.strip_prefix('_').ok_or_else(bad)?),
            };
            let (i, j) = match rest.split_once(',') {
                Some((i, j)) => (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?),
                None if rest.len() == 2 && rest.is_ascii() => {
                    (rest[..1].parse().map_err(|_| bad())?, rest[1..].parse().map_err(|_| bad())?)
                }
                None => return Err(bad()),
            };
            return Ok(Colour::Red { copy, i, j });
        }
        Err(bad())
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colour::Green(i) => write!(f, "g{i}"),
            Colour::Tint(i) => write!(f, "g0^{i}"),
            Colour::White(i) => write!(f, "w{i}"),
            Colour::Rho => write!(f, "rho"),
            Colour::Red { copy, i, j } => {
                f.write_str("r")?;
                if let Some(l) = copy {
                    write!(f, "^{l}")?;
                }
                if *i < 10 && *j < 10 {
                    write!(f, "_{i}{j}")
                } else {
                    write!(f, "_{i},{j}")
                }
            }
        }
    }
}

/// A yellow shade `y_S`; `None` is the full shade standing in for `S = ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shade(pub Option<BTreeSet<i64>>);

impl Shade {
    pub fn contains(&self, tint: i64) -> bool {
        self.0.as_ref().is_none_or(|s| s.contains(&tint))
    }
}

impl fmt::Display for Shade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => f.write_str("yS*"),
            Some(s) => {
                let parts: Vec<String> = s.iter().map(|t| t.to_string()).collect();
                write!(f, "yS{{{}}}", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowSignature {
    pub n: usize,
    /// Ranks `i` of the greens `g_i`, normally `1..=n-2`.
    pub ranked: Vec<u32>,
    /// Superscripts of the tinted greens `g0^i`, ascending.
    pub tints: Vec<i64>,
    pub red_pairs: Vec<(u32, u32)>,
    /// Number of copies per red once split; `rho` is present iff this is set.
    pub copies: Option<u32>,
    pub red_mode: RedMode,
    pub order_preserving: bool,
    /// `0` gives the full shade only; `k > 0` adds every `S` with `|S| <= k`.
    pub yellow_max: usize,
}

/// `t(n) = n(n+1)/2 + 1`, the node bound of the cone attack on `B_f`.
pub fn t_bound(n: usize) -> usize {
    n * (n + 1) / 2 + 1
}

/// The rainbow signature of `B_f`: reds over the complete irreflexive graph on
/// `n`, `g_1..g_{n-2}`, and `n(n-1)/2 + 2` tints so that the cone attack on a
/// common base has room for `t(n) - (n-1)` apexes.
pub fn build_bf(n: usize) -> Result<RainbowSignature> {
    build_bf_with_tints(n, n * (n - 1) / 2 + 2)
}

pub fn build_bf_with_tints(n: usize, tints: usize) -> Result<RainbowSignature> {
    if !(3..8).contains(&n) {
        return Err(Error::Precondition(format!("B_f needs 2 < n < 8, got {n}")));
    }
    let n32 = n as u32;
    let sig = RainbowSignature {
        n,
        ranked: (1..n32 - 1).collect(),
        tints: (1..=tints as i64).collect(),
        red_pairs: (0..n32).flat_map(|i| (i + 1..n32).map(move |j| (i, j))).collect(),
        copies: None,
        red_mode: RedMode::DistinctPairs,
        order_preserving: false,
        yellow_max: 0,
    };
    sig.validate()?;
    Ok(sig)
}

/// Truncated `C_{Z,N}`: tints `-m..=m`, reds `r_ij` for `i, j` in `0..=m`.
pub fn build_czn(n: usize, m: u32) -> Result<RainbowSignature> {
    if m < 1 {
        return Err(Error::Precondition("C_{Z,N} truncation needs m >= 1".into()));
    }
    if n < 2 {
        return Err(Error::Precondition(format!("dimension {n} too small")));
    }
    let sig = RainbowSignature {
        n,
        ranked: (1..n as u32 - 1).collect(),
        tints: (-(m as i64)..=m as i64).collect(),
        red_pairs: (0..=m).flat_map(|i| (0..=m).map(move |j| (i, j))).collect(),
        copies: None,
        red_mode: RedMode::MatchedIndices,
        order_preserving: true,
        yellow_max: n - 1,
    };
    sig.validate()?;
    Ok(sig)
}

/// Split every red into `copies` superscripted copies and add `rho`.
pub fn blow_up_reds(sig: &RainbowSignature, copies: u32) -> Result<RainbowSignature> {
    if sig.copies.is_some() {
        return Err(Error::Precondition("reds are already split".into()));
    }
    if copies == 0 {
        return Err(Error::Precondition("need at least one copy".into()));
    }
    let mut out = sig.clone();
    out.copies = Some(copies);
    out.validate()?;
    Ok(out)
}

/// Forbidden-triple test on labels given as `(M(x,y), M(y,z), M(x,z))`.
pub fn is_forbidden_triple(sig: &RainbowSignature, e1: &Colour, e2: &Colour, e3: &Colour) -> Result<bool> {
    let palette = sig.palette()?;
    let id = |c: &Colour| palette.id(c).ok_or_else(|| Error::Parse(format!("colour `{c}` not in signature")));
    let (xy, yz, xz) = (id(e1)?, id(e2)?, id(e3)?);
    Ok(palette.forbidden(xy, xz, yz))
}

impl RainbowSignature {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Malformed("rainbow dimension must be at least 2".into()));
        }
        if self.tints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("tints must be strictly ascending".into()));
        }
        if self.red_mode == RedMode::DistinctPairs && self.red_pairs.iter().any(|&(i, j)| i >= j) {
            return Err(Error::Malformed("distinct_pairs reds need i < j".into()));
        }
        let set: BTreeSet<_> = self.red_pairs.iter().collect();
        if set.len() != self.red_pairs.len() {
            return Err(Error::Malformed("duplicate red pair".into()));
        }
        Ok(())
    }

    pub fn whites(&self) -> impl Iterator<Item = u32> {
        0..self.n as u32 - 1
    }

    /// Edge colours in palette order.
    pub fn colours(&self) -> Vec<Colour> {
        let mut out: Vec<Colour> = self.ranked.iter().map(|&i| Colour::Green(i)).collect();
        out.extend(self.tints.iter().map(|&i| Colour::Tint(i)));
        out.extend(self.whites().map(Colour::White));
        let copies: Vec<Option<u32>> = match self.copies {
            None => vec![None],
            Some(l) => (0..l).map(Some).collect(),
        };
        for copy in copies {
            out.extend(self.red_pairs.iter().map(|&(i, j)| Colour::Red { copy, i, j }));
        }
        if self.copies.is_some() {
            out.push(Colour::Rho);
        }
        out
    }

    pub fn shades(&self) -> Vec<Shade> {
        let mut out = vec![Shade(None)];
        if self.yellow_max > 0 {
            let k = self.yellow_max.min(self.tints.len());
            let mut subsets: Vec<Vec<i64>> = vec![vec![]];
            for size in 1..=k {
                combinations(&self.tints, size, &mut subsets);
            }
            out.extend(subsets.into_iter().map(|s| Shade(Some(s.into_iter().collect()))));
        }
        out
    }

    pub fn palette(&self) -> Result<Palette> {
        Palette::new(self)
    }

    pub fn to_json(&self) -> SignatureJson {
        SignatureJson {
            n: self.n,
            greens: GreensJson { ranked: self.ranked.clone(), tints: self.tints.clone() },
            reds: RedsJson {
                pairs: self.red_pairs.iter().map(|&(i, j)| [i, j]).collect(),
                copies: self.copies,
                mode: self.red_mode,
            },
            order_preserving: self.order_preserving,
            yellow_max: self.yellow_max,
        }
    }
}

fn combinations(items: &[i64], size: usize, out: &mut Vec<Vec<i64>>) {
    fn go(items: &[i64], size: usize, start: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..items.len() {
            cur.push(items[k]);
            go(items, size, k + 1, cur, out);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::new(), out);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreensJson {
    pub ranked: Vec<u32>,
    #[serde(rename = "super")]
    pub tints: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedsJson {
    pub pairs: Vec<[u32; 2]>,
    pub copies: Option<u32>,
    pub mode: RedMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureJson {
    pub n: usize,
    pub greens: GreensJson,
    pub reds: RedsJson,
    pub order_preserving: bool,
    pub yellow_max: usize,
}

impl SignatureJson {
    pub fn to_signature(&self) -> Result<RainbowSignature> {
        let sig = RainbowSignature {
            n: self.n,
            ranked: self.greens.ranked.clone(),
            tints: self.greens.tints.clone(),
            red_pairs: self.reds.pairs.iter().map(|p| (p[0], p[1])).collect(),
            copies: self.reds.copies,
            red_mode: self.reds.mode,
            order_preserving: self.order_preserving,
            yellow_max: self.yellow_max,
        };
        sig.validate()?;
        Ok(sig)
    }
}

/// Compiled colours of a signature. Colour ids are `u8`.
#[derive(Clone, Debug)]
pub struct Palette {
    n: usize,
    colours: Vec<Colour>,
    index: HashMap<Colour, u8>,
    rev: Vec<u8>,
    green: Vec<bool>,
    red: Vec<bool>,
    tint: Vec<Option<i64>>,
    rank: Vec<Option<u32>>,
    white: Vec<Option<u32>>,
    /// Indexed by `(M(x,y), M(x,z), M(y,z))`.
    table: Vec<bool>,
    shades: Vec<Shade>,
    shade_index: HashMap<Shade, u8>,
    yellow_max: usize,
}

impl Palette {
    pub fn new(sig: &RainbowSignature) -> Result<Palette> {
        let colours = sig.colours();
        let shades = sig.shades();
        if colours.len() >= NONE as usize || shades.len() >= NONE as usize {
            return Err(Error::Bound(format!(
                "{} colours and {} shades exceed the palette limit",
                colours.len(),
                shades.len()
            )));
        }
        let index: HashMap<Colour, u8> = colours.iter().enumerate().map(|(k, c)| (c.clone(), k as u8)).collect();
        let rev = colours
            .iter()
            .enumerate()
            .map(|(k, c)| match (c, sig.red_mode) {
                (Colour::Red { copy, i, j }, RedMode::MatchedIndices) => {
                    index.get(&Colour::Red { copy: *copy, i: *j, j: *i }).copied().unwrap_or(NONE)
                }
                _ => k as u8,
            })
            .collect();
        let size = colours.len();
        let mut p = Palette {
            n: sig.n,
            green: colours.iter().map(Colour::is_green).collect(),
            red: colours.iter().map(Colour::is_red).collect(),
            tint: colours.iter().map(|c| if let Colour::Tint(i) = c { Some(*i) } else { None }).collect(),
            rank: colours.iter().map(|c| if let Colour::Green(i) = c { Some(*i) } else { None }).collect(),
            white: colours.iter().map(|c| if let Colour::White(i) = c { Some(*i) } else { None }).collect(),
            colours,
            index,
            rev,
            table: vec![false; size * size * size],
            shade_index: shades.iter().enumerate().map(|(k, s)| (s.clone(), k as u8)).collect(),
            shades,
            yellow_max: sig.yellow_max,
        };
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    let bad = p.triangle_bad(sig, a as u8, b as u8, c as u8);
                    p.table[(a * size + b) * size + c] = bad;
                }
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn colour(&self, c: u8) -> &Colour {
        &self.colours[c as usize]
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn id(&self, c: &Colour) -> Option<u8> {
        self.index.get(c).copied()
    }

    pub fn parse(&self, s: &str) -> Result<u8> {
        let c = Colour::parse(s)?;
        self.id(&c).ok_or_else(|| Error::Parse(format!("colour `{s}` not in signature")))
    }

    /// Colour of the reversed edge.
    #[inline]
    pub fn rev(&self, c: u8) -> u8 {
        self.rev[c as usize]
    }

    #[inline]
    pub fn is_green(&self, c: u8) -> bool {
        self.green[c as usize]
    }

    #[inline]
    pub fn is_red(&self, c: u8) -> bool {
        self.red[c as usize]
    }

    #[inline]
    pub fn tint(&self, c: u8) -> Option<i64> {
        self.tint[c as usize]
    }

    #[inline]
    pub fn rank(&self, c: u8) -> Option<u32> {
        self.rank[c as usize]
    }

    #[inline]
    pub fn white(&self, c: u8) -> Option<u32> {
        self.white[c as usize]
    }

    pub fn white_id(&self, i: u32) -> Option<u8> {
        self.id(&Colour::White(i))
    }

    pub fn tint_id(&self, i: i64) -> Option<u8> {
        self.id(&Colour::Tint(i))
    }

    pub fn green_id(&self, i: u32) -> Option<u8> {
        self.id(&Colour::Green(i))
    }

    /// Triangle `x, y, z` with `M(x,y) = xy`, `M(x,z) = xz`, `M(y,z) = yz`.
    #[inline]
    pub fn forbidden(&self, xy: u8, xz: u8, yz: u8) -> bool {
        let size = self.colours.len();
        self.table[(xy as usize * size + xz as usize) * size + yz as usize]
    }

    pub fn shades(&self) -> &[Shade] {
        &self.shades
    }

    pub fn shade(&self, s: u8) -> &Shade {
        &self.shades[s as usize]
    }

    pub const FULL: u8 = 0;

    /// The smallest shade of the family containing `tints`.
    pub fn minimal_shade(&self, tints: &BTreeSet<i64>) -> u8 {
        if self.yellow_max == 0 || tints.len() > self.yellow_max {
            return Self::FULL;
        }
        self.shade_index.get(&Shade(Some(tints.clone()))).copied().unwrap_or(Self::FULL)
    }

    pub fn shade_id(&self, s: &Shade) -> Option<u8> {
        self.shade_index.get(s).copied()
    }

    pub fn parse_shade(&self, s: &str) -> Result<u8> {
        let bad = || Error::Parse(format!("bad shade `{s}`"));
        let shade = if s == "yS*" {
            Shade(None)
        } else {
            let body = s.strip_prefix("yS{").and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
            let set: BTreeSet<i64> = if body.is_empty() {
                BTreeSet::new()
            } else {
                body.split(',').map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?
            };
            Shade(Some(set))
        };
        self.shade_id(&shade).ok_or_else(bad)
    }

    fn triangle_bad(&self, sig: &RainbowSignature, xy: u8, xz: u8, yz: u8) -> bool {
        if self.is_green(xy) && self.is_green(xz) && self.is_green(yz) {
            return true;
        }
        let (yx, zx, zy) = (self.rev(xy), self.rev(xz), self.rev(yz));
        // Each vertex with its two incident edges and the opposite edge, oriented
        // from the first neighbour to the second.
        for (a, b, c) in [(xy, xz, yz), (yx, yz, xz), (zx, zy, xy)] {
            if let (Some(i), Some(j), Some(w)) = (self.rank(a), self.rank(b), self.white(c)) {
                if i == j && i == w {
                    return true;
                }
            }
            if let (Some(i), Some(j)) = (self.tint(a), self.tint(b)) {
                if self.white(c) == Some(0) {
                    return true;
                }
                if sig.order_preserving {
                    if let Colour::Red { i: k, j: l, .. } = self.colour(c) {
                        let ok = (i == j && k == l) || (i < j && k < l) || (i > j && k > l);
                        if !ok {
                            return true;
                        }
                    }
                }
            }
        }
        let reds = [xy, xz, yz].map(|c| match self.colour(c) {
            Colour::Red { copy, i, j } => Some((*copy, *i, *j)),
            _ => None,
        });
        if let [Some(a), Some(b), Some(c)] = reds {
            if a.0 != b.0 || b.0 != c.0 {
                return true;
            }
            return match sig.red_mode {
                RedMode::DistinctPairs => {
                    let set: BTreeSet<(u32, u32)> = [a, b, c].iter().map(|r| (r.1, r.2)).collect();
                    set.len() != 3
                }
                // x carries a.1 and b.1, y carries a.2 and c.1, z carries b.2 and c.2.
                RedMode::MatchedIndices => !(a.1 == b.1 && a.2 == c.1 && b.2 == c.2),
            };
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Colour {
        Colour::parse(s).unwrap()
    }

    #[test]
    fn colour_ids_round_trip() {
        for s in ["g1", "g0^2", "g0^-1", "w0", "r_01", "r^1_02", "r_10,3", "rho"] {
            assert_eq!(c(s).to_string(), s);
        }
        assert!(Colour::parse("q1").is_err());
    }

    #[test]
    fn forbidden_examples() {
        let bf = build_bf(3).unwrap();
        assert!(is_forbidden_triple(&bf, &c("g1"), &c("g1"), &c("w1")).unwrap());
        assert!(is_forbidden_triple(&bf, &c("g0^1"), &c("g0^2"), &c("w0")).unwrap());
        assert!(is_forbidden_triple(&bf, &c("g1"), &c("g0^1"), &c("g0^2")).unwrap());
        assert!(!is_forbidden_triple(&bf, &c("r_01"), &c("r_12"), &c("r_02")).unwrap());
        assert!(is_forbidden_triple(&bf, &c("r_01"), &c("r_01"), &c("r_02")).unwrap());
        assert!(is_forbidden_triple(&bf, &c("r_01"), &c("w9"), &c("r_02")).is_err());

        let czn = build_czn(3, 2).unwrap();
        assert!(!is_forbidden_triple(&czn, &c("r_01"), &c("r_12"), &c("r_02")).unwrap());
        assert!(is_forbidden_triple(&czn, &c("r_01"), &c("r_02"), &c("r_02")).unwrap());
        // y is the base node, x has tint -1 and z tint 0; x gets index 2, z index 1.
        assert!(is_forbidden_triple(&czn, &c("g0^-1"), &c("g0^0"), &c("r_21")).unwrap());
        assert!(!is_forbidden_triple(&czn, &c("g0^-1"), &c("g0^0"), &c("r_12")).unwrap());
    }

    #[test]
    fn split_reds_need_one_copy() {
        let sig = blow_up_reds(&build_bf(3).unwrap(), 2).unwrap();
        assert!(is_forbidden_triple(&sig, &c("r^0_01"), &c("r^1_12"), &c("r^0_02")).unwrap());
        assert!(!is_forbidden_triple(&sig, &c("r^1_01"), &c("r^1_12"), &c("r^1_02")).unwrap());
        assert!(!is_forbidden_triple(&sig, &c("r^0_01"), &c("rho"), &c("rho")).unwrap());
        assert!(!is_forbidden_triple(&sig, &c("r^0_01"), &c("r^1_01"), &c("rho")).unwrap());
        assert!(blow_up_reds(&sig, 2).is_err());
    }

    #[test]
    fn presets() {
        let bf = build_bf(3).unwrap();
        assert_eq!(bf.ranked, vec![1]);
        assert_eq!(bf.tints, vec![1, 2, 3, 4, 5]);
        assert_eq!(bf.red_pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(build_bf_with_tints(3, 3).unwrap().tints, vec![1, 2, 3]);
        assert_eq!(build_bf(4).unwrap().red_pairs.len(), 6);
        assert!(build_bf(2).is_err());
        assert_eq!(t_bound(3), 7);
        let czn = build_czn(3, 1).unwrap();
        assert_eq!(czn.tints, vec![-1, 0, 1]);
        assert_eq!(czn.red_pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(build_czn(3, 5).unwrap().colours().len(), 50);
    }

    #[test]
    fn czn_triangle_count() {
        let p = build_czn(3, 5).unwrap().palette().unwrap();
        let size = p.len() as u8;
        let mut ok = 0;
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    ok += usize::from(!p.forbidden(a, b, c));
                }
            }
        }
        assert_eq!(ok, 68546);
    }

    #[test]
    fn shade_family() {
        let sig = build_czn(3, 1).unwrap();
        let p = sig.palette().unwrap();
        // full, empty, three singletons, three pairs
        assert_eq!(p.shades().len(), 8);
        assert_eq!(p.minimal_shade(&BTreeSet::new()), p.parse_shade("yS{}").unwrap());
        assert_eq!(p.minimal_shade(&[-1, 0, 1].into()), Palette::FULL);
        assert_eq!(p.shade(p.parse_shade("yS{-1,1}").unwrap()).to_string(), "yS{-1,1}");
    }

    #[test]
    fn json_round_trip() {
        let sig = blow_up_reds(&build_czn(3, 2).unwrap(), 2).unwrap();
        let text = serde_json::to_string(&sig.to_json()).unwrap();
        assert!(text.contains("\"super\""));
        let back: SignatureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_signature().unwrap(), sig);
    }
}
