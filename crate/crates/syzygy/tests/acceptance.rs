//! One PASS/FAIL line per acceptance criterion. Exits nonzero only when the
//! set of failing criteria differs from the documented one.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use syzygy::complexes::{smith_normal_form, FGAbelianGroup, IntMatrix};
use syzygy::formal_groups::{cokernel, kernel, FormalGroup, FormalHom, Slot};
use syzygy::picard_lattice::BlowupLattice;
use syzygy::spectral::{
    cremona_assemble, cremona_rows, low_abutment, nonorientable_block_homology, ruled_grid, schur_aut_p1xp1, schur_pgl,
    KnownHomologyRegistry, Transfer,
};
use syzygy::surface_models::{cubic_summary, syzygy_sphere_bl3, BaseCase, GeneratorUniverse};

/// Criteria expected to fail, with the reason kept in the decisions ledger.
const KNOWN_FAILURES: &[u32] = &[6];

type Check = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn ensure(ok: bool, detail: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn g(s: &str) -> FormalGroup {
    FormalGroup::parse(s).expect("valid group")
}

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c1_lines() -> Check {
    let counts: Vec<usize> = (0..=6)
        .map(|n| BlowupLattice::new(n).map(|l| l.enumerate_lines().len()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(counts == [0, 1, 3, 6, 10, 16, 27], format!("counts {counts:?}"))?;
    Ok(format!("counts {counts:?}"))
}

fn c2_hexagon() -> Check {
    let lat = BlowupLattice::new(3).map_err(err)?;
    let graph = lat.incidence_graph(&lat.enumerate_lines(), 1).map_err(err)?;
    ensure(graph.vertices.len() == 6, format!("{} vertices", graph.vertices.len()))?;
    ensure(graph.is_single_cycle(), "not a single cycle")?;
    Ok("6 lines, one 6-cycle".into())
}

fn c3_bl3_sphere() -> Check {
    let cx = syzygy_sphere_bl3().map_err(err)?;
    let vertices = cx.cells_of_dim(0).len();
    let faces = cx.cells_of_dim(2);
    let triangles = faces.iter().all(|&f| cx.facets(f).len() == 3);
    let chi = cx.euler_characteristic();
    let report = cx.validate();
    ensure(vertices == 9, format!("{vertices} vertices"))?;
    ensure(triangles, "a 2-face is not a triangle")?;
    ensure(chi == 2, format!("euler characteristic {chi}"))?;
    ensure(report.is_valid(), report.failures.join("; "))?;
    Ok(format!(
        "9 vertices, {} triangles, chi 2, links are spheres",
        faces.len()
    ))
}

fn c4_cubic() -> Check {
    let s = cubic_summary().map_err(err)?;
    ensure(
        s.divisorial_models == 27,
        format!("{} divisorial models", s.divisorial_models),
    )?;
    ensure(s.fibrations.orders_agree(), "enumeration orders disagree")?;
    let stated: BTreeSet<u64> = s.comparisons.iter().map(|c| c.stated).collect();
    ensure(
        stated.contains(&216) && stated.contains(&243),
        "stated values not recorded",
    )?;
    let flagged: Vec<String> = s
        .comparisons
        .iter()
        .filter(|c| !c.agrees)
        .map(|c| format!("{} flagged", c.stated))
        .collect();
    Ok(format!(
        "27 models, orders agree at {}; {}",
        s.fibrations.ordered_pairwise,
        if flagged.is_empty() {
            "all stated values reproduced".into()
        } else {
            flagged.join(", ")
        }
    ))
}

fn c5_boundary_squared() -> Check {
    let mut total = 0;
    for t in 3..=5 {
        for e_max in 3..=5 {
            let u = GeneratorUniverse::new(BaseCase::RuledOverP1, t, e_max, 4).map_err(err)?;
            total += u.check_boundary_squared().map_err(err)?;
        }
    }
    Ok(format!("{total} compositions vanish"))
}

fn c6_ruled_row0() -> Check {
    let mut mismatches = Vec::new();
    for t in 3..=5 {
        for e_max in 3..=5 {
            let u = GeneratorUniverse::new(BaseCase::RuledOverP1, t, e_max, 4).map_err(err)?;
            let e1 = u.row0_homology(1).map_err(err)?;
            let e2 = u.row0_homology(2).map_err(err)?;
            let want1 = FGAbelianGroup::from_cyclic_orders(0, vec![2; choose(t, 2)]);
            let want2 = FGAbelianGroup::from_cyclic_orders(0, vec![2; choose(t, 3)]);
            if e1 != want1 || e2 != want2 {
                mismatches.push(format!(
                    "|T|={t} e_max={e_max}: E10={e1} E20={e2}, wanted {want1} and {want2}"
                ));
            }
        }
    }
    if mismatches.is_empty() {
        return Ok("matches".into());
    }
    Err(format!(
        "{} of 9 instances differ, e.g. {}; computed values are (Z/2)^(|T|-1) and (Z/2)^C(|T|-1,2), \
         stable in e_max (analysis in the decisions ledger)",
        mismatches.len(),
        mismatches[0]
    ))
}

fn c7_cremona_row0() -> Check {
    let u4 = GeneratorUniverse::new(BaseCase::CremonaOverPoint, 0, 4, 4).map_err(err)?;
    for d in 1..=2 {
        let h = u4.row0_homology(d).map_err(err)?;
        ensure(h.is_zero(), format!("E{d}0 = {h} at r_max 4"))?;
    }
    let u5 = GeneratorUniverse::new(BaseCase::CremonaOverPoint, 0, 4, 5).map_err(err)?;
    let h3 = u5.row0_homology(3).map_err(err)?;
    ensure(h3.is_zero(), format!("E30 = {h3} at r_max 5"))?;
    Ok("E10 = E20 = 0 at r_max 4, E30 = 0 at r_max 5".into())
}

fn c8_row1() -> Check {
    let u = GeneratorUniverse::new(BaseCase::CremonaOverPoint, 0, 4, 4).map_err(err)?;
    let e01 = u.row1_homology(0).map_err(err)?;
    let e11 = u.row1_homology(1).map_err(err)?;
    ensure(
        e01.is_zero() && e11.is_zero(),
        format!("Cremona E01 = {e01}, E11 = {e11}"),
    )?;
    for t in 3..=5 {
        let u = GeneratorUniverse::new(BaseCase::RuledOverP1, t, 4, 3).map_err(err)?;
        let e11 = u.row1_homology(1).map_err(err)?;
        ensure(
            e11 == FormalGroup::atom_power("C*", t - 1),
            format!("|T|={t}: E11 = {e11}"),
        )?;
    }
    Ok("Cremona E01 = E11 = 0; ruled E11 = C*^(|T|-1)".into())
}

fn c9_schur() -> Check {
    let reg = KnownHomologyRegistry::builtin();
    for (n, want) in [(2, "K2(C) (+) Z/2"), (3, "K2(C) (+) Z/3")] {
        let d = schur_pgl(n, reg).map_err(err)?;
        ensure(d.candidates == vec![g(want)], format!("PGL({n}): {:?}", d.candidates))?;
    }
    let aut = schur_aut_p1xp1(reg).map_err(err)?;
    ensure(
        aut.candidates == vec![g("K2(C) (+) Z/2")],
        format!("Aut(P1xP1): {:?}", aut.candidates),
    )?;
    let reg2 = aut.register(reg).map_err(err)?;
    let k2p =
        nonorientable_block_homology(2, "Aut(P1xP1)", "PGL(2,C)xPGL(2,C)", &Transfer::Diagonal, &reg2).map_err(err)?;
    let got: BTreeSet<FormalGroup> = k2p.candidates.iter().cloned().collect();
    let want: BTreeSet<FormalGroup> = [g("K2(C) (+) Z/4"), g("K2(C) (+) (Z/2)^2")].into();
    ensure(got == want, format!("K2' candidates {:?}", k2p.candidates))?;
    Ok("PGL(2), PGL(3), Aut(P1xP1) and both K2' candidates".into())
}

fn c10_five_term() -> Check {
    let mut checked = 0;
    for t in 3..=5 {
        let grid = ruled_grid(t, 3, 4).map_err(err)?;
        let seq = grid.five_term(&low_abutment(&grid)).map_err(err)?;
        for (run, report) in seq.check_known().map_err(err)? {
            ensure(report.exact, format!("|T|={t}: not exact on {run}"))?;
            checked += report.positions.len();
        }
    }
    ensure(checked > 0, "no position was checkable")?;
    Ok(format!("{checked} known positions exact for |T| = 3, 4, 5"))
}

fn c11_assembly() -> Check {
    let rows = cremona_rows(4, 5).map_err(err)?;
    let a = cremona_assemble(&rows, KnownHomologyRegistry::builtin(), false).map_err(err)?;
    let got: BTreeSet<FormalGroup> = a.candidates.iter().cloned().collect();
    let want: BTreeSet<FormalGroup> = [g("K2(C) (+) (+)_Z Z/2"), g("K2(C) (+) Z/3 (+) (+)_Z Z/2")].into();
    ensure(
        got == want && a.candidates.len() == 2,
        format!("candidates {:?}", a.candidates),
    )?;
    Ok(format!(
        "{{{}}}",
        a.candidates
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn random_rows(rng: &mut ChaCha8Rng, max: usize) -> Vec<Vec<i64>> {
    let r = rng.gen_range(1..=max);
    let c = rng.gen_range(1..=max);
    (0..r)
        .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
        .collect()
}

fn snf_sound(rows: &[Vec<i64>]) -> bool {
    let a = IntMatrix::from_rows(rows);
    let s = smith_normal_form(&a);
    let (m, n) = s.d.shape();
    let diagonal = (0..m).all(|i| (0..n).all(|j| i == j || s.d[(i, j)].is_zero()));
    let f = s.invariant_factors();
    s.u.mul(&a).mul(&s.v) == s.d
        && s.u.determinant().abs().is_one()
        && s.v.determinant().abs().is_one()
        && diagonal
        && f.iter().all(|x| x.is_positive())
        && f.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}

fn free_hom(rows: Vec<Vec<i64>>, cols: usize) -> FormalHom {
    FormalHom::new(vec![Slot::Free; cols], vec![Slot::Free; rows.len()], rows).expect("free blocks")
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut m = IntMatrix::identity(n);
    for _ in 0..rng.gen_range(0..6) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            m.swap_rows(i, (i + 1) % n);
        } else {
            m.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-2..=2)));
        }
    }
    (0..n)
        .map(|i| m.row(i).iter().map(|x| i64::try_from(x).expect("small")).collect())
        .collect()
}

fn c12_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..1000 {
        let rows = random_rows(&mut rng, 12);
        ensure(snf_sound(&rows), format!("SNF fails on matrix {k}"))?;
    }
    for n in 0..=6 {
        let lat = BlowupLattice::new(n).map_err(err)?;
        for set in [lat.enumerate_lines(), lat.enumerate_conic_classes()] {
            let orig: BTreeSet<_> = set.iter().cloned().collect();
            for root in lat.simple_roots() {
                let moved: BTreeSet<_> = set
                    .iter()
                    .map(|c| lat.weyl_reflect(c, &root))
                    .collect::<Result<_, _>>()
                    .map_err(err)?;
                ensure(moved == orig, format!("reflection moves the set at n = {n}"))?;
            }
        }
    }
    for k in 0..200 {
        let rows = random_rows(&mut rng, 5);
        let (m, n) = (rows.len(), rows[0].len());
        let a = free_hom(rows, n);
        let u = free_hom(random_unimodular(&mut rng, m), m);
        let v = free_hom(random_unimodular(&mut rng, n), n);
        let b = v.then(&a).and_then(|x| x.then(&u)).map_err(err)?;
        ensure(
            kernel(&a).map_err(err)? == kernel(&b).map_err(err)?
                && cokernel(&a).map_err(err)? == cokernel(&b).map_err(err)?,
            format!("basis change alters kernel or cokernel, sample {k}"),
        )?;
    }
    for k in 1..=12u64 {
        for n in 1..=12u64 {
            let step = n / n.gcd(&k);
            for a in (0..n).step_by(step as usize) {
                let h =
                    FormalHom::new(vec![Slot::Cyclic(k)], vec![Slot::Cyclic(n)], vec![vec![a as i64]]).map_err(err)?;
                let ker = (0..k).filter(|x| (a * x) % n == 0).count() as u64;
                let image: BTreeSet<u64> = (0..k).map(|x| (a * x) % n).collect();
                let coker = n / image.len() as u64;
                ensure(
                    kernel(&h).map_err(err)? == FormalGroup::cyclic(ker)
                        && cokernel(&h).map_err(err)? == FormalGroup::cyclic(coker),
                    format!("Z/{k} -> Z/{n} by {a}"),
                )?;
            }
        }
    }
    Ok("1000 SNF samples, Weyl invariance n <= 6, 200 basis changes, cyclic maps k, n <= 12".into())
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "line counts n = 0..6", Duration::from_secs(1), c1_lines),
        (2, "Bl3 line graph is a hexagon", Duration::from_secs(1), c2_hexagon),
        (3, "Bl3 syzygy sphere", Duration::from_secs(1), c3_bl3_sphere),
        (4, "cubic summary", Duration::from_secs(30), c4_cubic),
        (
            5,
            "ruled boundary squares to zero",
            Duration::from_secs(10),
            c5_boundary_squared,
        ),
        (6, "ruled row-0 homology", Duration::from_secs(10), c6_ruled_row0),
        (7, "Cremona row-0 homology", Duration::from_secs(10), c7_cremona_row0),
        (8, "row-1 homology", Duration::from_secs(5), c8_row1),
        (9, "Schur derivations", Duration::from_secs(1), c9_schur),
        (
            10,
            "five-term sequence, ruled grid",
            Duration::from_secs(5),
            c10_five_term,
        ),
        (11, "Cremona H2 candidates", Duration::from_secs(5), c11_assembly),
        (12, "property suites", Duration::from_secs(60), c12_properties),
    ];
    let mut failed = BTreeSet::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(_) if elapsed > budget => Err(format!("took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match verdict {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{elapsed:.2?} / {budget:?}]"),
            Err(detail) => {
                failed.insert(id);
                println!("FAIL {id:>2} {name}: {detail} [{elapsed:.2?} / {budget:?}]");
            }
        }
    }
    let expected: BTreeSet<u32> = KNOWN_FAILURES.iter().copied().collect();
    if failed != expected {
        eprintln!("failing criteria {failed:?}, documented failures {expected:?}");
        std::process::exit(1);
    }
}
