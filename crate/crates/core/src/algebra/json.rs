use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AtomStructure, Relation};
use crate::error::{Error, Result};

/// Interchange format for atom structures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomStructureJson {
    pub n: usize,
    pub atoms: Vec<String>,
    #[serde(rename = "E")]
    pub e: BTreeMap<String, Vec<String>>,
    #[serde(rename = "T")]
    pub t: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<BTreeMap<String, Vec<[String; 2]>>>,
}

impl From<&AtomStructure> for AtomStructureJson {
    fn from(at: &AtomStructure) -> Self {
        let n = at.n();
        let mut e = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                e.insert(format!("{i},{j}"), at.set_names(at.diag(i, j)));
            }
        }
        let pairs = |r: &Relation| {
            r.pairs()
                .map(|(a, b)| [at.name(a).to_string(), at.name(b).to_string()])
                .collect::<Vec<_>>()
        };
        let t = (0..n).map(|i| (i.to_string(), pairs(at.cyl(i)))).collect();
        let r = at
            .has_interior()
            .then(|| (0..n).map(|i| (i.to_string(), pairs(at.interior(i).unwrap()))).collect());
        AtomStructureJson { n, atoms: at.names().to_vec(), e, t, r }
    }
}

impl AtomStructureJson {
    /// Validate and build. Missing diagonal keys are empty sets; a missing `R`
    /// means identity interior operators.
    pub fn to_structure(&self) -> Result<AtomStructure> {
        let n = self.n;
        if !(1..8).contains(&n) {
            return Err(Error::Malformed(format!("dimension {n} outside 1..8")));
        }
        let size = self.atoms.len();
        let index: BTreeMap<&str, usize> = self.atoms.iter().enumerate().map(|(k, a)| (a.as_str(), k)).collect();
        let look = |name: &str| index.get(name).copied().ok_or_else(|| Error::UnknownAtom(name.to_string()));
        let mut diag = BTreeMap::new();
        for (key, names) in &self.e {
            let (i, j) = parse_pair(key, n)?;
            let mut s = fixedbitset::FixedBitSet::with_capacity(size);
            for name in names {
                s.insert(look(name)?);
            }
            diag.insert((i.min(j), i.max(j)), s);
        }
        let relations = |map: &BTreeMap<String, Vec<[String; 2]>>, what: &str| -> Result<Vec<Relation>> {
            let mut rels = vec![Relation::empty(size); n];
            for (key, pairs) in map {
                let i = parse_index(key, n)?;
                for [a, b] in pairs {
                    rels[i].insert(look(a)?, look(b)?);
                }
            }
            if map.len() != n {
                return Err(Error::Malformed(format!("{what} needs an entry for each index below {n}")));
            }
            Ok(rels)
        };
        let cyl = relations(&self.t, "T")?;
        let interior = self.r.as_ref().map(|r| relations(r, "R")).transpose()?;
        AtomStructure::new(
            n,
            self.atoms.clone(),
            |i, j| diag.get(&(i, j)).cloned().unwrap_or_else(|| fixedbitset::FixedBitSet::with_capacity(size)),
            cyl,
            interior,
        )
    }
}

fn parse_index(key: &str, n: usize) -> Result<usize> {
    let i: usize = key.trim().parse().map_err(|_| Error::Parse(format!("bad index `{key}`")))?;
    if i >= n {
        return Err(Error::Index { index: i, dim: n });
    }
    Ok(i)
}

fn parse_pair(key: &str, n: usize) -> Result<(usize, usize)> {
    let (a, b) = key.split_once(',').ok_or_else(|| Error::Parse(format!("bad diagonal key `{key}`")))?;
    let (i, j) = (parse_index(a, n)?, parse_index(b, n)?);
    if i == j {
        return Err(Error::Malformed(format!("diagonal key `{key}` repeats an index")));
    }
    Ok((i, j))
}
