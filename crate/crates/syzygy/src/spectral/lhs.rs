use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{GridEntry, KnownHomologyRegistry, SpectralError, SpectralGrid};
use crate::formal_groups::{AtomRegistry, FormalError, FormalGroup, TorsionRule};

/// How the quotient acts on the homology of the normal subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Trivial,
    /// `Z/2` swapping the two factors of `normal = M x M`; `H_q(normal)` is
    /// then taken to be induced, so only column 0 survives above row 0.
    SwapFactors,
    /// A central element acts on the normal subgroup by a scalar without
    /// fixed vectors, so every row above 0 vanishes.
    CenterKills,
}

/// `1 -> normal -> G -> quotient -> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhsExtension {
    pub normal: String,
    pub quotient: String,
    pub action: Action,
    pub split: bool,
    pub p_max: usize,
    pub q_max: usize,
}

enum Piece {
    Free,
    Cyclic(u64),
    Family(String, u64),
    Atom(String),
}

fn pieces(g: &FormalGroup) -> Vec<Piece> {
    let mut out = Vec::new();
    for (name, &k) in g.atoms() {
        out.extend((0..k).map(|_| Piece::Atom(name.clone())));
    }
    out.extend(g.torsion().iter().map(|&n| Piece::Cyclic(n)));
    out.extend((0..g.free_rank()).map(|_| Piece::Free));
    out.extend(g.families().iter().map(|f| Piece::Family(f.index.clone(), f.order)));
    out
}

fn with_piece(acc: FormalGroup, p: Option<FormalGroup>) -> FormalGroup {
    match p {
        Some(g) => acc.direct_sum(&g),
        None => acc,
    }
}

fn atom_info(name: &str) -> Result<(bool, TorsionRule), SpectralError> {
    let a = AtomRegistry::builtin().require(name)?;
    Ok((a.divisible, a.torsion_rule))
}

fn insufficient(atom: &str, detail: &str) -> SpectralError {
    FormalError::InsufficientAtomData {
        atom: atom.into(),
        detail: detail.into(),
    }
    .into()
}

fn tensor_pieces(a: &Piece, b: &Piece) -> Result<Option<FormalGroup>, SpectralError> {
    use Piece::*;
    Ok(match (a, b) {
        (Free, x) | (x, Free) => Some(match x {
            Free => FormalGroup::free(1),
            Cyclic(n) => FormalGroup::cyclic(*n),
            Family(i, p) => FormalGroup::family(i, *p),
            Atom(name) => FormalGroup::atom(name),
        }),
        (Cyclic(n), Cyclic(m)) => Some(FormalGroup::cyclic(n.gcd(m))),
        (Cyclic(n), Family(i, p)) | (Family(i, p), Cyclic(n)) => (n % p == 0).then(|| FormalGroup::family(i, *p)),
        (Cyclic(_) | Family(..), Atom(name)) | (Atom(name), Cyclic(_) | Family(..)) => {
            if atom_info(name)?.0 {
                None
            } else {
                return Err(insufficient(name, "tensor with a finite group needs divisibility"));
            }
        }
        (Family(..), Family(..)) => return Err(SpectralError::Unsupported("tensor of two families".into())),
        (Atom(x), Atom(y)) => return Err(SpectralError::Unsupported(format!("tensor {x} with {y}"))),
    })
}

fn tor_pieces(a: &Piece, b: &Piece) -> Result<Option<FormalGroup>, SpectralError> {
    use Piece::*;
    Ok(match (a, b) {
        (Free, _) | (_, Free) => None,
        (Cyclic(n), Cyclic(m)) => Some(FormalGroup::cyclic(n.gcd(m))),
        (Cyclic(n), Family(i, p)) | (Family(i, p), Cyclic(n)) => (n % p == 0).then(|| FormalGroup::family(i, *p)),
        (Cyclic(_) | Family(..), Atom(name)) | (Atom(name), Cyclic(_) | Family(..)) => match atom_info(name)?.1 {
            TorsionRule::None => None,
            TorsionRule::Cyclic => Some(match a {
                Cyclic(n) => FormalGroup::cyclic(*n),
                Family(i, p) => FormalGroup::family(i, *p),
                _ => match b {
                    Cyclic(n) => FormalGroup::cyclic(*n),
                    Family(i, p) => FormalGroup::family(i, *p),
                    _ => unreachable!(),
                },
            }),
            TorsionRule::Unknown => return Err(insufficient(name, "torsion subgroup is not known")),
        },
        (Atom(x), Atom(y)) => {
            if atom_info(x)?.1 == TorsionRule::None || atom_info(y)?.1 == TorsionRule::None {
                None
            } else {
                return Err(SpectralError::Unsupported(format!("Tor of {x} and {y}")));
            }
        }
        (Family(..), Family(..)) => return Err(SpectralError::Unsupported("Tor of two families".into())),
    })
}

fn bilinear(
    a: &FormalGroup,
    b: &FormalGroup,
    f: fn(&Piece, &Piece) -> Result<Option<FormalGroup>, SpectralError>,
) -> Result<FormalGroup, SpectralError> {
    let mut acc = FormalGroup::zero();
    for x in pieces(a) {
        for y in pieces(b) {
            acc = with_piece(acc, f(&x, &y)?);
        }
    }
    Ok(acc)
}

pub fn tensor(a: &FormalGroup, b: &FormalGroup) -> Result<FormalGroup, SpectralError> {
    bilinear(a, b, tensor_pieces)
}

pub fn tor(a: &FormalGroup, b: &FormalGroup) -> Result<FormalGroup, SpectralError> {
    bilinear(a, b, tor_pieces)
}

/// `H_p(name, Z)`: degree 0, the trivial group and finite cyclic groups are
/// computed, anything else comes from the registry.
fn group_homology(name: &str, p: usize, reg: &KnownHomologyRegistry) -> Option<FormalGroup> {
    if p == 0 {
        return Some(FormalGroup::free(1));
    }
    if name == "1" {
        return Some(if p == 0 {
            FormalGroup::free(1)
        } else {
            FormalGroup::zero()
        });
    }
    if let Some(n) = name.strip_prefix("Z/").and_then(|n| n.parse::<u64>().ok()) {
        return Some(match p {
            0 => FormalGroup::free(1),
            p if p % 2 == 1 => FormalGroup::cyclic(n),
            _ => FormalGroup::zero(),
        });
    }
    reg.get(name, p).map(|e| e.value.clone())
}

/// `M` from `M (+) M`.
fn half(g: &FormalGroup) -> Result<FormalGroup, SpectralError> {
    let odd = || SpectralError::Unsupported(format!("{g} is not a sum of two equal halves"));
    let mut out = FormalGroup::zero();
    for (name, &k) in g.atoms() {
        if k % 2 == 1 {
            return Err(odd());
        }
        out = out.direct_sum(&FormalGroup::atom_power(name, k / 2));
    }
    let mut divisors = g.elementary_divisors();
    divisors.sort_unstable();
    let mut kept = Vec::new();
    for pair in divisors.chunks(2) {
        if pair.len() < 2 || pair[0] != pair[1] {
            return Err(odd());
        }
        kept.push(pair[0]);
    }
    if g.free_rank() % 2 == 1 {
        return Err(odd());
    }
    out = out
        .direct_sum(&FormalGroup::finite(&kept))
        .direct_sum(&FormalGroup::free(g.free_rank() / 2));
    for f in g.families() {
        out = out.direct_sum(&FormalGroup::family(&f.index, f.order));
    }
    Ok(out)
}

/// The `E^2` page `H_p(quotient; H_q(normal))`. Entries whose inputs are not
/// in the registry stay unknown.
pub fn lhs_grid(ext: &LhsExtension, reg: &KnownHomologyRegistry) -> Result<SpectralGrid, SpectralError> {
    let target = format!("H_*({} . {})", ext.normal, ext.quotient);
    let mut grid = SpectralGrid::new(2, ext.p_max, ext.q_max, &target);
    grid.bottom_row_survives = ext.split;
    if ext.action == Action::SwapFactors && ext.quotient != "Z/2" {
        return Err(SpectralError::Unsupported("the swap action needs quotient Z/2".into()));
    }
    for q in 0..=ext.q_max {
        let hq = group_homology(&ext.normal, q, reg);
        for p in 0..=ext.p_max {
            let entry = match (ext.action, &hq) {
                (Action::CenterKills, _) if q > 0 => GridEntry::Known(FormalGroup::zero()),
                (_, None) => GridEntry::Unknown(format!("H_{q}({}) is not in the registry", ext.normal)),
                (Action::SwapFactors, Some(h)) if q > 0 => {
                    if p == 0 {
                        GridEntry::Known(half(h)?)
                    } else {
                        GridEntry::Known(FormalGroup::zero())
                    }
                }
                (_, Some(h)) => trivial_entry(&ext.quotient, p, h, reg)?,
            };
            grid.set(p, q, entry);
        }
    }
    if ext.action == Action::CenterKills {
        grid.notes
            .push("rows above 0 vanish: a central element acts on them by a scalar other than 1".into());
    }
    if ext.action == Action::SwapFactors {
        grid.notes
            .push("rows above 0 are induced modules, so only coinvariants survive".into());
    }
    Ok(grid)
}

/// Universal coefficients: `H_p(Q) (x) M (+) Tor(H_{p-1}(Q), M)`.
fn trivial_entry(
    quotient: &str,
    p: usize,
    m: &FormalGroup,
    reg: &KnownHomologyRegistry,
) -> Result<GridEntry, SpectralError> {
    let hp = group_homology(quotient, p, reg);
    let hp1 = if p == 0 {
        Some(FormalGroup::zero())
    } else {
        group_homology(quotient, p - 1, reg)
    };
    let (Some(hp), Some(hp1)) = (hp, hp1) else {
        return Ok(GridEntry::Unknown(format!("H_{p}({quotient}) is not known")));
    };
    match tensor(&hp, m).and_then(|a| Ok(a.direct_sum(&tor(&hp1, m)?))) {
        Ok(g) => Ok(GridEntry::Known(g)),
        Err(e @ (SpectralError::Unsupported(_) | SpectralError::Formal(FormalError::InsufficientAtomData { .. }))) => {
            Ok(GridEntry::Unknown(e.to_string()))
        }
        Err(e) => Err(e),
    }
}
