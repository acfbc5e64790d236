use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::atoms::AtomRegistry;
use super::FormalError;
use crate::complexes::{invariant_factors_of, FGAbelianGroup};

/// A countably infinite direct sum `(+)_index Z/order`, carried for display.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Family {
    pub index: String,
    pub order: u64,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(+)_{} Z/{}", self.index, self.order)
    }
}

/// Normal form: atoms sorted by name with multiplicities, finite part in
/// invariant-factor form, free rank, then families. Elementary `p`-torsion
/// is absorbed into a family of order `p`, since the family is infinite.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FormalGroup {
    atoms: BTreeMap<String, usize>,
    torsion: Vec<u64>,
    free_rank: usize,
    families: Vec<Family>,
}

impl FormalGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn atom(name: &str) -> Self {
        Self::atom_power(name, 1)
    }

    pub fn atom_power(name: &str, k: usize) -> Self {
        let mut g = Self::zero();
        if k > 0 {
            g.atoms.insert(name.to_string(), k);
        }
        g
    }

    pub fn cyclic(n: u64) -> Self {
        Self::finite(&[n])
    }

    pub fn finite(orders: &[u64]) -> Self {
        let mut g = Self::zero();
        g.torsion = orders.to_vec();
        g.normalize();
        g
    }

    pub fn free(rank: usize) -> Self {
        FormalGroup {
            free_rank: rank,
            ..Self::zero()
        }
    }

    pub fn family(index: &str, order: u64) -> Self {
        let mut g = Self::zero();
        g.families.push(Family {
            index: index.to_string(),
            order,
        });
        g.normalize();
        g
    }

    pub fn from_fg(g: &FGAbelianGroup) -> Self {
        let mut out = Self::free(g.free_rank());
        out.torsion = g.torsion().iter().map(big_to_u64).collect();
        out
    }

    /// Finite and free part as an ordinary finitely generated group.
    pub fn discrete_part(&self) -> FGAbelianGroup {
        FGAbelianGroup::from_cyclic_orders(self.free_rank, self.torsion.iter().copied())
    }

    pub fn direct_sum(&self, other: &FormalGroup) -> FormalGroup {
        let mut g = self.clone();
        for (name, k) in &other.atoms {
            *g.atoms.entry(name.clone()).or_insert(0) += k;
        }
        g.torsion.extend(other.torsion.iter().copied());
        g.free_rank += other.free_rank;
        g.families.extend(other.families.iter().cloned());
        g.normalize();
        g
    }

    pub fn atoms(&self) -> &BTreeMap<String, usize> {
        &self.atoms
    }

    pub fn atom_multiplicity(&self, name: &str) -> usize {
        self.atoms.get(name).copied().unwrap_or(0)
    }

    /// Invariant factors of the finite part.
    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.torsion.is_empty() && self.free_rank == 0 && self.families.is_empty()
    }

    /// No atoms, no free part, no families.
    pub fn is_finite(&self) -> bool {
        self.atoms.is_empty() && self.free_rank == 0 && self.families.is_empty()
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    /// Prime-power orders of the cyclic factors, ascending.
    pub fn elementary_divisors(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.torsion.iter().flat_map(|&d| prime_powers(d)).collect();
        out.sort_unstable();
        out
    }

    pub fn without_families(&self) -> FormalGroup {
        let mut g = self.clone();
        g.families.clear();
        g
    }

    pub fn without_atoms(&self) -> FormalGroup {
        let mut g = self.clone();
        g.atoms.clear();
        g
    }

    pub fn normalize(&mut self) {
        self.atoms.retain(|_, k| *k > 0);
        self.families.sort();
        self.families.dedup();
        let absorbing: Vec<u64> = self.families.iter().map(|f| f.order).filter(|&p| is_prime(p)).collect();
        let elementary: Vec<u64> = self
            .torsion
            .iter()
            .flat_map(|&d| prime_powers(d))
            .filter(|&q| !absorbing.contains(&q))
            .collect();
        let big: Vec<BigInt> = elementary.into_iter().map(BigInt::from).collect();
        self.torsion = invariant_factors_of(&big).iter().map(big_to_u64).collect();
    }

    pub fn parse(text: &str) -> Result<Self, FormalError> {
        Self::parse_with(text, AtomRegistry::builtin())
    }

    pub fn parse_with(text: &str, registry: &AtomRegistry) -> Result<Self, FormalError> {
        let err = |detail: &str| FormalError::Parse {
            input: text.to_string(),
            detail: detail.to_string(),
        };
        let terms = split_terms(text);
        if terms.is_empty() {
            return Err(err("empty expression"));
        }
        let mut g = FormalGroup::zero();
        for term in terms {
            let t = term.trim();
            if t.is_empty() {
                return Err(err("empty summand"));
            }
            g = g.direct_sum(&parse_term(t, registry).map_err(|d| err(&d))?);
        }
        Ok(g)
    }
}

fn parse_term(t: &str, registry: &AtomRegistry) -> Result<FormalGroup, String> {
    if t == "0" {
        return Ok(FormalGroup::zero());
    }
    if registry.get(t).is_some() {
        return Ok(FormalGroup::atom(t));
    }
    if let Some(rest) = t.strip_prefix("(+)_") {
        let (index, summand) = rest.split_once(' ').ok_or("family needs an index and a summand")?;
        let order = summand
            .trim()
            .strip_prefix("Z/")
            .ok_or("family summand must be cyclic")?
            .parse::<u64>()
            .map_err(|e| e.to_string())?;
        if order < 2 || index.is_empty() {
            return Err("family needs a nonempty index and order at least 2".into());
        }
        return Ok(FormalGroup::family(index, order));
    }
    let (base, power) = match t.rsplit_once('^') {
        Some((b, p)) => (b, p.parse::<usize>().map_err(|e| format!("bad exponent: {e}"))?),
        None => (t, 1),
    };
    if base == "Z" {
        return Ok(FormalGroup::free(power));
    }
    let cyc = base.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(base);
    if let Some(n) = cyc.strip_prefix("Z/") {
        if registry.get(cyc).is_none() {
            let n: u64 = n.parse().map_err(|_| format!("bad cyclic order in {t}"))?;
            if n == 0 {
                return Err("Z/0 is not allowed; write Z".into());
            }
            return Ok(FormalGroup::finite(&vec![n; power]));
        }
    }
    if registry.get(cyc).is_some() {
        return Ok(FormalGroup::atom_power(cyc, power));
    }
    Err(format!("unknown summand {t:?}"))
}

/// Splits on `(+)` separators, leaving the `(+)_` family prefix intact.
fn split_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut rest = text;
    while let Some(pos) = rest.find("(+)") {
        let after = &rest[pos + 3..];
        current.push_str(&rest[..pos]);
        if after.starts_with('_') {
            current.push_str("(+)");
        } else {
            out.push(std::mem::take(&mut current));
        }
        rest = after;
    }
    current.push_str(rest);
    out.push(current);
    out.into_iter().map(|s| s.trim().to_string()).collect()
}

impl fmt::Display for FormalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (name, k) in &self.atoms {
            parts.push(if *k == 1 { name.clone() } else { format!("{name}^{k}") });
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|&&x| x == d).count();
            parts.push(if run == 1 {
                format!("Z/{d}")
            } else {
                format!("(Z/{d})^{run}")
            });
            i += run;
        }
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.families.iter().map(|fam| fam.to_string()));
        write!(f, "{}", parts.join(" (+) "))
    }
}

impl fmt::Debug for FormalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalGroup({self})")
    }
}

impl FromStr for FormalGroup {
    type Err = FormalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormalGroup::parse(s)
    }
}

impl Serialize for FormalGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FormalGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        FormalGroup::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn big_to_u64(b: &BigInt) -> u64 {
    b.to_u64().expect("cyclic orders fit in u64")
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `d = p1^a1 * ... ` returned as the list `[p1^a1, ...]`.
pub(crate) fn prime_powers(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            let mut q = 1;
            while d.is_multiple_of(p) {
                d /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_canonical_form() {
        let g = FormalGroup::atom("K2(C)")
            .direct_sum(&FormalGroup::cyclic(3))
            .direct_sum(&FormalGroup::free(2));
        assert_eq!(g.to_string(), "K2(C) (+) Z/3 (+) Z^2");
        assert_eq!(FormalGroup::zero().to_string(), "0");
        assert_eq!(FormalGroup::finite(&[2, 2]).to_string(), "(Z/2)^2");
        assert_eq!(FormalGroup::atom_power("C*", 2).to_string(), "C*^2");
    }

    #[test]
    fn parse_round_trips() {
        for s in [
            "K2(C) (+) Z/3 (+) Z^2",
            "K2(C) (+) Z/3 (+) (+)_Z Z/2",
            "C*^2 (+) (Z/2)^2",
            "Q/Z (+) Wedge3(C*)",
            "0",
            "Z",
        ] {
            let g = FormalGroup::parse(s).unwrap();
            assert_eq!(g.to_string(), s);
            assert_eq!(FormalGroup::parse(&g.to_string()).unwrap(), g);
        }
    }

    #[test]
    fn parse_normalizes() {
        let g = FormalGroup::parse("Z/2 (+) C* (+) Z/3 (+) C*").unwrap();
        assert_eq!(g.to_string(), "C*^2 (+) Z/6");
        assert!(FormalGroup::parse("Z/0").is_err());
        assert!(FormalGroup::parse("Foo").is_err());
        assert!(FormalGroup::parse("").is_err());
    }

    #[test]
    fn families_absorb_elementary_torsion() {
        let g = FormalGroup::parse("(Z/2)^3 (+) Z/4 (+) Z/3 (+) (+)_Z Z/2").unwrap();
        assert_eq!(g.to_string(), "Z/12 (+) (+)_Z Z/2");
    }

    #[test]
    fn normalizing_twice_is_idempotent() {
        let mut g = FormalGroup::parse("Z/4 (+) Z/6 (+) K2(C) (+) Z").unwrap();
        let once = g.clone();
        g.normalize();
        assert_eq!(g, once);
    }

    #[test]
    fn serde_uses_the_display_form() {
        let g = FormalGroup::parse("K2(C) (+) Z/2").unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, "\"K2(C) (+) Z/2\"");
        let back: FormalGroup = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
