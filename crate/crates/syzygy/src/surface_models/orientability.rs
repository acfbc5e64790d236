//! Which generators are orientable, read from a data file.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{BaseCase, SurfaceError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientabilityEntry {
    pub orientable: bool,
    pub reason: String,
}

/// `base -> tag -> entry`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrientabilityRegistry(BTreeMap<String, BTreeMap<String, OrientabilityEntry>>);

const BUILTIN: &str = include_str!("../../data/orientability.json");

impl OrientabilityRegistry {
    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        let reg: OrientabilityRegistry =
            serde_json::from_str(text).map_err(|e| SurfaceError::Registry(e.to_string()))?;
        for (base, tags) in &reg.0 {
            base.parse::<BaseCase>().map_err(SurfaceError::Registry)?;
            for (tag, entry) in tags {
                if entry.reason.trim().is_empty() {
                    return Err(SurfaceError::Registry(format!("{base}/{tag} has no reason")));
                }
            }
        }
        Ok(reg)
    }

    pub fn builtin() -> &'static OrientabilityRegistry {
        static REG: OnceLock<OrientabilityRegistry> = OnceLock::new();
        REG.get_or_init(|| Self::from_json(BUILTIN).expect("bundled orientability registry is valid"))
    }

    pub fn entry(&self, base: BaseCase, tag: &str) -> Option<&OrientabilityEntry> {
        self.0.get(base.key()).and_then(|m| m.get(tag))
    }

    pub fn orientable(&self, base: BaseCase, tag: &str) -> Option<bool> {
        self.entry(base, tag).map(|e| e.orientable)
    }
}
