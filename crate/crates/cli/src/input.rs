//! Reading the workbench's JSON files.
//!
//! Every file written by `build` or `repsearch` is an object with a
//! `manifest` and one or more payload keys: `signature` (rainbow
//! signature), `atoms` (atom structure), `ra` (relation algebra), `blur`,
//! `representation`. Bare payloads are accepted as well.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use cylindra::algebra::AtomStructureJson;
use cylindra::rablur::{maddux_ek23, FiniteRa, RaJson};
use cylindra::rainbow::{RainbowSignature, SignatureJson};
use cylindra::repsearch::{Representation, RepresentationJson};
use cylindra::{complex_algebra, AtomStructure, FiniteBao};

use crate::manifest::{read_input, RunManifest};

pub struct Document {
    name: String,
    fields: Map<String, Value>,
}

impl Document {
    pub fn load(manifest: &mut RunManifest, path: &Path) -> Result<Document> {
        let bytes = read_input(manifest, path)?;
        let value: Value = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
        let Value::Object(mut fields) = value else {
            bail!("{} is not a JSON object", path.display());
        };
        // a bare payload is recognised by its characteristic keys
        let bare = [
            ("signature", &["greens", "reds"][..]),
            ("representation", &["U", "V", "assign"][..]),
            ("ra", &["identity", "forbidden"][..]),
            ("atoms", &["n", "atoms", "T"][..]),
        ];
        if !fields.contains_key("manifest") {
            if let Some((key, _)) = bare.iter().find(|(_, keys)| keys.iter().all(|k| fields.contains_key(*k))) {
                fields = Map::from_iter([(key.to_string(), Value::Object(fields))]);
            }
        }
        Ok(Document { name: path.display().to_string(), fields })
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.fields.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone()).map(Some).with_context(|| format!("{}: bad `{key}`", self.name)),
        }
    }

    fn need<T: DeserializeOwned>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| anyhow!("{} has no `{key}` section", self.name))
    }

    pub fn signature(&self) -> Result<Option<RainbowSignature>> {
        Ok(self.get::<SignatureJson>("signature")?.map(|j| j.to_signature()).transpose()?)
    }

    pub fn structure(&self) -> Result<AtomStructure> {
        Ok(self.need::<AtomStructureJson>("atoms")?.to_structure()?)
    }

    pub fn algebra(&self) -> Result<FiniteBao> {
        Ok(complex_algebra(self.structure()?))
    }

    pub fn ra(&self) -> Result<FiniteRa> {
        Ok(FiniteRa::from_json(&self.need::<RaJson>("ra")?)?)
    }

    pub fn representation(&self, a: &FiniteBao) -> Result<Representation> {
        Ok(Representation::from_json(a, &self.need::<RepresentationJson>("representation")?)?)
    }
}

/// A relation algebra from `--ra FILE` or the preset `--k K`.
pub fn ra_from(manifest: &mut RunManifest, file: Option<&Path>, k: Option<usize>) -> Result<FiniteRa> {
    match (file, k) {
        (Some(p), None) => Document::load(manifest, p)?.ra(),
        (None, Some(k)) => Ok(maddux_ek23(k)?),
        _ => bail!("give exactly one of --ra FILE and --k K"),
    }
}
