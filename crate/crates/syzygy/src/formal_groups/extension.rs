//! Extension and quotient enumeration for the finite parts of formal groups.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::atoms::{AtomRegistry, TorsionRule};
use super::group::{prime_powers, FormalGroup};
use super::FormalError;
use crate::complexes::{subquotient, IntMatrix};

/// Largest finite p-group the brute-force searches will enter.
const SEARCH_LIMIT: u64 = 1 << 12;

/// All groups `E` with `0 -> sub -> E -> quot -> 0` exact, up to isomorphism.
///
/// Divisible atoms of `sub` are injective and split off first; free parts of
/// `quot` split as well. What remains is enumerated prime by prime.
pub fn solve_extension(sub: &FormalGroup, quot: &FormalGroup) -> Result<Vec<FormalGroup>, FormalError> {
    let reg = AtomRegistry::builtin();
    for name in sub.atoms().keys() {
        if !reg.require(name)?.divisible {
            return Err(FormalError::Unbounded(format!(
                "{name} is not divisible, so it need not split off"
            )));
        }
    }
    let rest = sub.without_atoms();
    if !quot.atoms().is_empty() && !rest.is_zero() {
        return Err(FormalError::Unbounded(format!("extensions of {quot} by {rest}")));
    }
    if !quot.families().is_empty() && !(rest.torsion().is_empty() && rest.families().is_empty()) {
        return Err(FormalError::Unbounded(format!("extensions of {quot} by {rest}")));
    }
    if rest.free_rank() > 0 && !quot.torsion().is_empty() {
        return Err(FormalError::Unbounded(format!("extensions of {quot} by a free group")));
    }
    let quot_primes = primes_of(quot.torsion());
    for fam in rest.families() {
        if quot_primes.iter().any(|p| fam.order % p == 0) {
            return Err(FormalError::Unbounded(format!("extensions of {quot} by {fam}")));
        }
    }

    let mut base = sub.without_families().direct_sum(&quot.without_families());
    base = strip_torsion(&base);
    for f in sub.families().iter().chain(quot.families()) {
        base = base.direct_sum(&FormalGroup::family(&f.index, f.order));
    }

    let a = by_prime(sub.torsion());
    let q = by_prime(quot.torsion());
    let primes: BTreeSet<u64> = a.keys().chain(q.keys()).copied().collect();
    let mut per_prime = Vec::new();
    for p in primes {
        let mu = a.get(&p).cloned().unwrap_or_default();
        let nu = q.get(&p).cloned().unwrap_or_default();
        per_prime.push((p, p_extensions(p, &mu, &nu)?));
    }
    Ok(combine(&base, &per_prime))
}

/// All quotients `target / im(phi)` for homomorphisms `phi` from the finite
/// group `source`. Infinite families of order `p` absorb any finite change
/// in their `p`-part; torsion-free atoms receive nothing.
pub fn quotient_candidates(source: &FormalGroup, target: &FormalGroup) -> Result<Vec<FormalGroup>, FormalError> {
    if !source.is_finite() {
        return Err(FormalError::Unbounded(format!("{source} is not finite")));
    }
    let reg = AtomRegistry::builtin();
    for name in target.atoms().keys() {
        if reg.require(name)?.torsion_rule != TorsionRule::None {
            return Err(FormalError::InsufficientAtomData {
                atom: name.clone(),
                detail: "finite subgroups of this atom are not modelled".into(),
            });
        }
    }
    let s = by_prime(source.torsion());
    let t = by_prime(target.torsion());
    let mut per_prime = Vec::new();
    let mut untouched = Vec::new();
    let primes: BTreeSet<u64> = s.keys().chain(t.keys()).copied().collect();
    for p in primes {
        let sp = s.get(&p).cloned().unwrap_or_default();
        let tp = t.get(&p).cloned().unwrap_or_default();
        let family = target.families().iter().find(|f| f.order % p == 0);
        if sp.is_empty() {
            untouched.extend(tp.iter().map(|&e| p.pow(e)));
            continue;
        }
        match family {
            Some(f) if f.order == p && tp.is_empty() => {}
            Some(f) => return Err(FormalError::Unbounded(format!("quotients of {target} meeting {f}"))),
            None => per_prime.push((p, p_quotients(p, &sp, &tp)?)),
        }
    }
    let mut base = strip_torsion(target).direct_sum(&FormalGroup::finite(&untouched));
    for f in target.families() {
        base = base.direct_sum(&FormalGroup::family(&f.index, f.order));
    }
    Ok(combine(&base, &per_prime))
}

fn strip_torsion(g: &FormalGroup) -> FormalGroup {
    let mut out = FormalGroup::free(g.free_rank());
    for (name, k) in g.atoms() {
        out = out.direct_sum(&FormalGroup::atom_power(name, *k));
    }
    out
}

fn combine(base: &FormalGroup, per_prime: &[(u64, Vec<Vec<u32>>)]) -> Vec<FormalGroup> {
    let mut acc = vec![base.clone()];
    for (p, options) in per_prime {
        let mut next = Vec::new();
        for g in &acc {
            for lam in options {
                let orders: Vec<u64> = lam.iter().map(|&e| p.pow(e)).collect();
                next.push(g.direct_sum(&FormalGroup::finite(&orders)));
            }
        }
        acc = next;
    }
    acc.sort_by_key(|g| g.to_string());
    acc.dedup();
    acc
}

fn primes_of(orders: &[u64]) -> Vec<u64> {
    by_prime(orders).into_keys().collect()
}

/// Exponent partitions of the primary parts, descending.
fn by_prime(orders: &[u64]) -> BTreeMap<u64, Vec<u32>> {
    let mut out: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &d in orders {
        for q in prime_powers(d) {
            let p = smallest_prime_factor(q);
            out.entry(p).or_default().push(q.ilog(p));
        }
    }
    for v in out.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
    }
    out
}

fn smallest_prime_factor(n: u64) -> u64 {
    (2..=n).find(|d| n.is_multiple_of(*d)).unwrap_or(n)
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn order_of(p: u64, lam: &[u32]) -> Result<u64, FormalError> {
    let e: u32 = lam.iter().sum();
    p.checked_pow(e)
        .filter(|&o| o <= SEARCH_LIMIT)
        .ok_or_else(|| FormalError::Unbounded(format!("p-group of order {p}^{e} is too large to search")))
}

fn exponents_of(p: u64, g: &crate::complexes::FGAbelianGroup) -> Vec<u32> {
    let mut e: Vec<u32> = g
        .elementary_divisors()
        .iter()
        .map(|d| d.to_u64().expect("small").ilog(p))
        .collect();
    e.sort_unstable_by(|a, b| b.cmp(a));
    e
}

/// Elements of `⊕ Z/p^lam_i` killed by `p^k`, as coordinate vectors.
fn torsion_elements(p: u64, lam: &[u32], k: u32) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &l in lam {
        let step = p.pow(l.saturating_sub(k));
        let count = p.pow(l) / step;
        let mut next = Vec::new();
        for v in &out {
            for c in 0..count {
                let mut w = v.clone();
                w.push((c * step) as i64);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// For each choice of generator images, the subgroup type and quotient type.
fn for_each_subgroup(
    p: u64,
    lam: &[u32],
    gens: &[u32],
    mut visit: impl FnMut(Vec<u32>, Vec<u32>) -> bool,
) -> Result<(), FormalError> {
    let r = lam.len();
    let options: Vec<Vec<Vec<i64>>> = gens.iter().map(|&k| torsion_elements(p, lam, k)).collect();
    let total: u64 = options.iter().map(|o| o.len() as u64).product();
    if total > 1 << 20 {
        return Err(FormalError::Unbounded("too many generator images to search".into()));
    }
    let rel = IntMatrix::diagonal(&lam.iter().map(|&l| BigInt::from(p.pow(l))).collect::<Vec<_>>());
    let mut idx = vec![0usize; gens.len()];
    loop {
        let cols: Vec<Vec<i64>> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let g = IntMatrix::from_rows_shaped(r, cols.len(), &transpose(r, &cols));
        let span = g.hstack(&rel);
        let sub = subquotient(&IntMatrix::identity(r), &span, &rel).expect("relations lie in the span");
        let quo = subquotient(&IntMatrix::zeros(0, r), &IntMatrix::zeros(0, 0), &span).expect("ambient lattice");
        if visit(exponents_of(p, &sub), exponents_of(p, &quo)) {
            return Ok(());
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn transpose(rows: usize, cols: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// Partitions `lam` such that `⊕ Z/p^lam` has a subgroup of type `mu` with
/// quotient of type `nu`.
fn p_extensions(p: u64, mu: &[u32], nu: &[u32]) -> Result<Vec<Vec<u32>>, FormalError> {
    let n: u32 = mu.iter().sum::<u32>() + nu.iter().sum::<u32>();
    let mut out = Vec::new();
    for lam in partitions(n, n) {
        order_of(p, &lam)?;
        let mut found = false;
        for_each_subgroup(p, &lam, mu, |s, q| {
            found = s == mu && q == nu;
            found
        })?;
        if found {
            out.push(lam);
        }
    }
    Ok(out)
}

/// Types of `⊕ Z/p^tp / im(phi)` over homomorphisms from `⊕ Z/p^sp`.
fn p_quotients(p: u64, sp: &[u32], tp: &[u32]) -> Result<Vec<Vec<u32>>, FormalError> {
    order_of(p, tp)?;
    let mut seen = BTreeSet::new();
    for_each_subgroup(p, tp, sp, |_, q| {
        seen.insert(q);
        false
    })?;
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FormalGroup {
        FormalGroup::parse(s).unwrap()
    }

    fn names(v: &[FormalGroup]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn k2_by_two_has_two_candidates() {
        let c = solve_extension(&g("K2(C) (+) Z/2"), &g("Z/2")).unwrap();
        assert_eq!(names(&c), vec!["K2(C) (+) (Z/2)^2", "K2(C) (+) Z/4"]);
    }

    #[test]
    fn uniquely_divisible_sub_splits() {
        for n in 2..=5 {
            let c = solve_extension(&g("K2(C)"), &FormalGroup::cyclic(n)).unwrap();
            assert_eq!(names(&c), vec![format!("K2(C) (+) Z/{n}")]);
        }
    }

    #[test]
    fn trivial_sub() {
        let a = g("Z/6 (+) Z");
        assert_eq!(solve_extension(&FormalGroup::zero(), &a).unwrap(), vec![a]);
    }

    #[test]
    fn coprime_parts_split() {
        let c = solve_extension(&g("Z/3"), &g("Z/2")).unwrap();
        assert_eq!(names(&c), vec!["Z/6"]);
    }

    #[test]
    fn extensions_of_cyclic_by_cyclic() {
        let c = solve_extension(&g("Z/4"), &g("Z/2")).unwrap();
        assert_eq!(names(&c), vec!["Z/2 (+) Z/4", "Z/8"]);
        let c = solve_extension(&g("Z/2"), &g("Z/4")).unwrap();
        assert_eq!(names(&c), vec!["Z/2 (+) Z/4", "Z/8"]);
    }

    #[test]
    fn free_sub_with_torsion_quotient_is_refused() {
        assert!(solve_extension(&g("Z"), &g("Z/2")).is_err());
    }

    #[test]
    fn quotients_by_finite_images() {
        let c = quotient_candidates(&g("Z/3 (+) (Z/2)^2"), &g("K2(C) (+) Z/3 (+) (+)_Z Z/2")).unwrap();
        assert_eq!(names(&c), vec!["K2(C) (+) (+)_Z Z/2", "K2(C) (+) Z/3 (+) (+)_Z Z/2"]);
        let c = quotient_candidates(&FormalGroup::zero(), &g("K2(C) (+) Z/3 (+) (+)_Z Z/2")).unwrap();
        assert_eq!(names(&c), vec!["K2(C) (+) Z/3 (+) (+)_Z Z/2"]);
        let c = quotient_candidates(&g("Z/2"), &g("Z/4")).unwrap();
        assert_eq!(names(&c), vec!["Z/2", "Z/4"]);
    }

    #[test]
    fn quotients_into_c_star_are_refused() {
        assert!(quotient_candidates(&g("Z/2"), &g("C*")).is_err());
    }
}
