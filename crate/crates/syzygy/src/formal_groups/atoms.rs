use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::FormalError;

/// What the `d`-torsion of an atom looks like.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorsionRule {
    /// `D[d] = Z/d`.
    Cyclic,
    /// Torsion-free.
    None,
    /// Not determined; any operation that needs it fails.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    pub divisible: bool,
    pub torsion_rule: TorsionRule,
    pub uniquely_divisible: bool,
    pub source: String,
}

/// A registered map between distinct atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomMap {
    pub from: String,
    pub to: String,
    pub kind: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomRegistry {
    atoms: Vec<Atom>,
    maps: Vec<AtomMap>,
}

impl AtomRegistry {
    pub fn from_json(text: &str) -> Result<Self, FormalError> {
        let reg: AtomRegistry = serde_json::from_str(text).map_err(|e| FormalError::Registry(e.to_string()))?;
        let mut seen = BTreeMap::new();
        for a in &reg.atoms {
            if a.name.is_empty() || a.source.trim().is_empty() {
                return Err(FormalError::Registry(format!(
                    "atom {:?} needs a name and a source",
                    a.name
                )));
            }
            if a.uniquely_divisible && !(a.divisible && a.torsion_rule == TorsionRule::None) {
                return Err(FormalError::Registry(format!(
                    "{} is uniquely divisible but not divisible and torsion-free",
                    a.name
                )));
            }
            if is_reserved(&a.name) {
                return Err(FormalError::Registry(format!(
                    "{} clashes with the cyclic/free syntax",
                    a.name
                )));
            }
            if seen.insert(a.name.clone(), ()).is_some() {
                return Err(FormalError::Registry(format!("duplicate atom {}", a.name)));
            }
        }
        for m in &reg.maps {
            if !seen.contains_key(&m.from) || !seen.contains_key(&m.to) || m.from == m.to {
                return Err(FormalError::Registry(format!("bad map {} -> {}", m.from, m.to)));
            }
        }
        Ok(reg)
    }

    pub fn builtin() -> &'static AtomRegistry {
        static REG: OnceLock<AtomRegistry> = OnceLock::new();
        REG.get_or_init(|| {
            AtomRegistry::from_json(include_str!("../../data/atoms.json")).expect("builtin atom registry is valid")
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn maps(&self) -> &[AtomMap] {
        &self.maps
    }

    pub fn get(&self, name: &str) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Atom, FormalError> {
        self.get(name).ok_or_else(|| FormalError::UnknownAtom(name.to_string()))
    }

    pub fn has_map(&self, from: &str, to: &str) -> bool {
        self.maps.iter().any(|m| m.from == from && m.to == to)
    }
}

fn is_reserved(name: &str) -> bool {
    name == "0" || name == "Z" || name.starts_with("Z/") || name.starts_with("Z^") || name.starts_with("(+)")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_loads() {
        let reg = AtomRegistry::builtin();
        assert_eq!(reg.require("C*").unwrap().torsion_rule, TorsionRule::Cyclic);
        assert!(reg.require("K2(C)").unwrap().uniquely_divisible);
        assert_eq!(reg.require("Wedge2(C*)").unwrap().torsion_rule, TorsionRule::Unknown);
        assert!(reg.has_map("Wedge2(C*)", "K2(C)"));
        assert!(!reg.has_map("K2(C)", "Wedge2(C*)"));
    }

    #[test]
    fn rejects_inconsistent_unique_divisibility() {
        let text = r#"{"atoms":[{"name":"X","divisible":true,"torsion_rule":"cyclic","uniquely_divisible":true,"source":"s"}],"maps":[]}"#;
        assert!(AtomRegistry::from_json(text).is_err());
    }

    #[test]
    fn rejects_missing_source() {
        let text = r#"{"atoms":[{"name":"X","divisible":true,"torsion_rule":"none","uniquely_divisible":false,"source":" "}],"maps":[]}"#;
        assert!(AtomRegistry::from_json(text).is_err());
    }
}
