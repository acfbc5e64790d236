use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::formal_groups::FormalGroup;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub group: String,
    pub degree: usize,
    pub value: FormalGroup,
    pub provenance: String,
}

/// `(group, degree) -> H_degree(group, Z)`, each value with its provenance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnownHomologyRegistry {
    entries: BTreeMap<(String, usize), RegistryEntry>,
}

impl KnownHomologyRegistry {
    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        let list: Vec<RegistryEntry> =
            serde_json::from_str(text).map_err(|e| SpectralError::Registry(e.to_string()))?;
        let mut reg = KnownHomologyRegistry::default();
        for e in list {
            reg.insert(e)?;
        }
        Ok(reg)
    }

    pub fn from_path(path: &Path) -> Result<Self, SpectralError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| SpectralError::Registry(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn builtin() -> &'static KnownHomologyRegistry {
        static REG: OnceLock<KnownHomologyRegistry> = OnceLock::new();
        REG.get_or_init(|| {
            Self::from_json(include_str!("../../data/homology_registry.json")).expect("builtin registry is valid")
        })
    }

    pub fn insert(&mut self, e: RegistryEntry) -> Result<(), SpectralError> {
        if e.provenance.trim().is_empty() {
            return Err(SpectralError::Registry(format!(
                "{} in degree {} has no provenance",
                e.group, e.degree
            )));
        }
        let key = (e.group.clone(), e.degree);
        if self.entries.contains_key(&key) {
            return Err(SpectralError::Registry(format!(
                "duplicate entry {} in degree {}",
                e.group, e.degree
            )));
        }
        self.entries.insert(key, e);
        Ok(())
    }

    /// A copy with one more entry, used to feed derived values forward.
    pub fn with(
        &self,
        group: &str,
        degree: usize,
        value: FormalGroup,
        provenance: &str,
    ) -> Result<Self, SpectralError> {
        let mut out = self.clone();
        out.insert(RegistryEntry {
            group: group.into(),
            degree,
            value,
            provenance: provenance.into(),
        })?;
        Ok(out)
    }

    pub fn get(&self, group: &str, degree: usize) -> Option<&RegistryEntry> {
        self.entries.get(&(group.to_string(), degree))
    }

    pub fn require(&self, group: &str, degree: usize) -> Result<&RegistryEntry, SpectralError> {
        self.get(group, degree)
            .ok_or_else(|| SpectralError::MissingRegistry(vec![format!("H_{degree}({group})")]))
    }

    pub fn entries(&self) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        let list: Vec<&RegistryEntry> = self.entries.values().collect();
        serde_json::to_string_pretty(&list).expect("registry serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_entries_all_have_provenance() {
        let reg = KnownHomologyRegistry::builtin();
        assert!(reg.len() > 10);
        assert!(reg.entries().all(|e| !e.provenance.trim().is_empty()));
        assert_eq!(reg.require("SL(3,C)", 2).unwrap().value.to_string(), "K2(C)");
    }

    #[test]
    fn entries_without_provenance_fail_loading() {
        let text = r#"[{"group":"G","degree":1,"value":"Z","provenance":""}]"#;
        assert!(KnownHomologyRegistry::from_json(text).is_err());
        let text = r#"[{"group":"G","degree":1,"value":"Z"}]"#;
        assert!(KnownHomologyRegistry::from_json(text).is_err());
    }

    #[test]
    fn bad_values_fail_loading() {
        let text = r#"[{"group":"G","degree":1,"value":"Q","provenance":"x"}]"#;
        assert!(KnownHomologyRegistry::from_json(text).is_err());
    }

    #[test]
    fn json_round_trip() {
        let reg = KnownHomologyRegistry::builtin();
        assert_eq!(&KnownHomologyRegistry::from_json(&reg.to_json()).unwrap(), reg);
    }
}
