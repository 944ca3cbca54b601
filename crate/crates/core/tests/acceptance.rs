//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see the lines.

mod common;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use vancycles::afcheck::{
    af_pair_check, af_via_vanishing, ch_phi_from_exceptional, cor48_scenario, prop43_check,
    Prop43Outcome,
};
use vancycles::algebra::{parse_poly, Field, Ideal, Point, Polynomial, Ring};
use vancycles::charcycle::{
    alternating_sum_check, betti_b, c_p, FinAbGroup, NormalDataTable, PrimeIdeal,
    StratifiedSheafData, StratumSpec,
};
use vancycles::corpus::{self, Scenario};
use vancycles::cycles::Variety;
use vancycles::pipeline::{integer_skeleton, run, Problem, RunOptions};
use vancycles::polar::point_coefficient;
use vancycles::vanishing::{betti_transfer, vanishing_index_check, TransferredTable};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn problems_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn load(name: &str) -> Problem {
    Problem::load(&problems_dir().join(name)).unwrap()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    for a in 2..=5u32 {
        for b in 2..=5u32 {
            let s = corpus::brieskorn(a, b).map_err(|e| e.to_string())?;
            let got = point_coefficient(
                &s.f,
                &Variety::ambient(&s.ring),
                &Point::origin(&s.ring),
                1,
                8,
            )
            .map_err(|e| format!("x^{a}+y^{b}: {e}"))?
            .value;
            let oracle = common::milnor_oracle(&vec![((a, 0), 1), ((0, b), 1)]) as i64;
            let expected = ((a - 1) * (b - 1)) as i64;
            ensure(got == oracle && oracle == expected, || {
                format!("x^{a}+y^{b}: engine {got}, staircase {oracle}, expected {expected}")
            })?;
        }
    }
    let el = t0.elapsed();
    ensure(el < Duration::from_secs(60), || format!("took {el:?}"))?;
    Ok(format!("16 Brieskorn curves in {:.2}s", el.as_secs_f64()))
}

fn transfer_tables(s: &Scenario) -> Result<Vec<TransferredTable>, String> {
    betti_transfer(&s.f, &s.data, &s.vf, 1, 8)
        .map(|t| t.tables)
        .map_err(|e| format!("{}: {e}", s.name))
}

fn check_table(t: &[TransferredTable], name: &str, b: &[(i64, u64)]) -> Result<(), String> {
    let row = t
        .iter()
        .find(|r| r.stratum == name)
        .ok_or(format!("no row {name}"))?;
    let want: std::collections::BTreeMap<i64, u64> = b.iter().copied().collect();
    ensure(row.b == want, || {
        format!("{name}: b = {:?}, expected {want:?}", row.b)
    })?;
    for (p, c) in &row.c {
        ensure(c == &want, || format!("{name}: c^{p} = {c:?}"))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let xy = transfer_tables(&corpus::xy().unwrap())?;
    check_table(&xy, "origin", &[(2, 1)])?;
    check_table(&xy, "x-axis", &[])?;
    check_table(&xy, "y-axis", &[])?;
    let cusp = transfer_tables(&corpus::cusp().unwrap())?;
    check_table(&cusp, "origin", &[(2, 2)])?;
    check_table(&cusp, "curve", &[])?;
    Ok("xy origin {2: 1}, axes zero; cusp origin {2: 2}".into())
}

fn criterion_3() -> Outcome {
    let mut corpus_list = vec![
        corpus::xy().unwrap(),
        corpus::cusp().unwrap(),
        corpus::smooth().unwrap(),
        corpus::zero_stratum().unwrap(),
        corpus::umbrella(true).unwrap(),
    ];
    for a in 2..=5 {
        for b in a..=5 {
            corpus_list.push(corpus::brieskorn(a, b).unwrap());
        }
    }
    for s in &corpus_list {
        let c = vanishing_index_check(&s.f, &s.data, &s.vf, 1, 8)
            .map_err(|e| format!("{}: {e}", s.name))?;
        ensure(c.passed && c.supports_equal, || {
            format!("{}: {:?}", s.name, c)
        })?;
    }
    Ok(format!("{} instances", corpus_list.len()))
}

/// Candidate closures in the plane, conormals computed once and reused.
fn closure_pool(r: &Ring) -> Vec<StratumSpec> {
    let gens: [&[&str]; 7] = [
        &[],
        &["y"],
        &["x"],
        &["x - y"],
        &["x^2 + y^3"],
        &["x", "y"],
        &["x - 1", "y + 2"],
    ];
    gens.iter()
        .enumerate()
        .map(|(i, g)| {
            StratumSpec::new(
                &format!("s{i}"),
                Variety::parse(r, g).unwrap(),
                NormalDataTable::zero(),
            )
            .unwrap()
        })
        .collect()
}

fn random_table(rng: &mut ChaCha8Rng) -> NormalDataTable {
    let n = rng.random_range(0..4);
    NormalDataTable::from_entries((0..n).map(|_| {
        let j = rng.random_range(-2..4);
        let rank = rng.random_range(0..4);
        let torsion: Vec<u64> = (0..rng.random_range(0..3))
            .map(|_| [2, 3, 4, 6, 9, 5][rng.random_range(0..6)])
            .collect();
        (j, FinAbGroup::new(rank, &torsion).unwrap())
    }))
}

fn random_data(rng: &mut ChaCha8Rng, r: &Ring, pool: &[StratumSpec]) -> StratifiedSheafData {
    let mut strata = Vec::new();
    for s in pool {
        if rng.random_bool(0.5) {
            strata.push(s.with_table(random_table(rng)));
        }
    }
    if strata.is_empty() {
        strata.push(pool[0].with_table(random_table(rng)));
    }
    let primes = [2u64, 3, 5]
        .into_iter()
        .filter(|_| rng.random_bool(0.5))
        .map(PrimeIdeal)
        .collect();
    StratifiedSheafData::new(r, strata, primes).unwrap()
}

fn criterion_4() -> Outcome {
    let r = Ring::rational(&["x", "y"]).unwrap();
    let pool = closure_pool(&r);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 150;
    for k in 0..n {
        let data = random_data(&mut rng, &r, &pool);
        ensure(alternating_sum_check(&data), || {
            format!("alternating sum fails on instance {k}")
        })?;
        for s in &data.strata {
            for j in -3..6 {
                ensure(
                    c_p(&s.table, j, PrimeIdeal::ZERO) == betti_b(&s.table, j),
                    || format!("c_0 != b on instance {k}"),
                )?;
                for p in [2, 3, 5, 7] {
                    ensure(
                        c_p(&s.table, j, PrimeIdeal(p)) >= betti_b(&s.table, j),
                        || format!("c_{p} < b on instance {k}"),
                    )?;
                }
            }
        }
    }
    for s in [corpus::xy().unwrap(), corpus::cusp().unwrap()] {
        let before = transfer_tables(&s)?;
        let mut strata = s.data.strata.clone();
        strata.push(
            StratumSpec::new(
                "invisible",
                Variety::parse(&s.ring, &["x - y"]).unwrap(),
                NormalDataTable::zero(),
            )
            .unwrap(),
        );
        let mut t = s.clone();
        t.data = StratifiedSheafData::new(&s.ring, strata, s.data.primes.clone()).unwrap();
        ensure(transfer_tables(&t)? == before, || {
            format!("{}: a zero-table stratum changed the transfer", s.name)
        })?;
    }
    Ok(format!("{n} random instances, invisible strata inert"))
}

fn criterion_5() -> Outcome {
    let s = corpus::umbrella(false).unwrap();
    let z_axis = Variety::parse(&s.ring, &["x", "y"]).unwrap();
    let o = Point::origin(&s.ring);
    let direct =
        af_pair_check(&Variety::ambient(&s.ring), &s.f, &z_axis, &o).map_err(|e| e.to_string())?;
    ensure(!direct.verdict, || "direct a_f holds on the z-axis".into())?;
    let w = direct.witness.clone().unwrap_or_default();
    ensure(w.contains("w_z"), || {
        format!("witness {w:?} has no dz part")
    })?;
    let p43 = prop43_check(&s.f, &s.data, &Variety::ambient(&s.ring), &z_axis, &o)
        .map_err(|e| e.to_string())?;
    ensure(
        p43 == Prop43Outcome::Checked {
            containment: false,
            af: false,
        },
        || format!("prop43: {p43:?}"),
    )?;
    let ch = ch_phi_from_exceptional(&s.f, &s.data).map_err(|e| e.to_string())?;
    let vv = af_via_vanishing(&ch, &s.f, &z_axis, &o).map_err(|e| e.to_string())?;
    ensure(!vv.verdict, || "vanishing route holds on the z-axis".into())?;

    let mut pairs = 1;
    for s in [
        corpus::xy().unwrap(),
        corpus::cusp().unwrap(),
        corpus::smooth().unwrap(),
        corpus::umbrella(true).unwrap(),
    ] {
        let sheaves = [("open".to_string(), s.data.clone())];
        let rep = cor48_scenario(&s.f, &sheaves, &s.vf, 1, 8).map_err(|e| e.to_string())?;
        for e in &rep.entries {
            for (v, d) in e.verdicts.iter().zip(&e.direct) {
                pairs += 1;
                ensure(v.verdict && d.verdict, || {
                    format!("{}: a_f fails for {} at {}", s.name, v.n, v.point)
                })?;
            }
        }
        if s.name == "xy" {
            ensure(rep.whitney.iter().all(|w| w.holds), || {
                "xy: Whitney (a) fails".into()
            })?;
        }
    }
    Ok(format!(
        "umbrella z-axis fails in all three routes, {pairs} pairs checked"
    ))
}

fn rational_points(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    while out.len() < count {
        let p: Vec<String> = (0..n)
            .map(|_| {
                let num = rng.random_range(-3..4);
                let den = [1, 1, 1, 2][rng.random_range(0..4)];
                format!("{num}/{den}")
            })
            .collect();
        let key = |v: &Vec<String>| -> Vec<(i64, i64)> {
            v.iter()
                .map(|s| {
                    let (a, b) = s.split_once('/').unwrap();
                    let (a, b): (i64, i64) = (a.parse().unwrap(), b.parse().unwrap());
                    let g = num_integer::gcd(a, b).max(1);
                    (a / g, b / g)
                })
                .collect()
        };
        if !out.iter().any(|q| key(q) == key(&p)) {
            out.push(p);
        }
    }
    out
}

fn maximal(r: &Ring, p: &[String]) -> Ideal {
    let gens: Vec<String> = r
        .vars()
        .iter()
        .zip(p)
        .map(|(v, c)| format!("{v} - ({c})"))
        .collect();
    Ideal::parse(r, &gens).unwrap()
}

fn to_point(r: &Ring, p: &[String]) -> Point {
    let q = p
        .iter()
        .map(|c| {
            r.field()
                .from_rational(&vancycles::algebra::parse_rational(c).unwrap())
        })
        .collect::<Result<Vec<_>, _>>()
        .unwrap();
    Point(q)
}

fn random_poly(rng: &mut ChaCha8Rng, r: &Ring, deg: u32) -> Polynomial {
    let vars = r.vars();
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(1..5) {
        let c: i64 = rng.random_range(-5..6);
        let mono: Vec<String> = vars
            .iter()
            .map(|v| format!("{v}^{}", rng.random_range(0..=deg)))
            .collect();
        terms.push(format!("({c})*{}", mono.join("*")));
    }
    parse_poly(r, &terms.join(" + ")).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut fixtures = 0;
    for k in 0..24 {
        let n = if k % 4 == 3 { 3 } else { 2 };
        let names = ["x", "y", "z"];
        let r = Ring::rational(&names[..n]).unwrap();
        let count = rng.random_range(1..4);
        let pts = rational_points(&mut rng, n, count);
        let mut ideal = Ideal::unit(&r);
        let mut expected = 0;
        for p in &pts {
            // rational elimination swells quickly; keep the total colength small
            let e = if count == 3 {
                rng.random_range(1..3)
            } else {
                rng.random_range(1..4)
            };
            let m = maximal(&r, p);
            let mut pw = m.clone();
            for _ in 1..e {
                pw = pw.product(&m);
            }
            ideal = ideal.intersect(&pw);
            expected += common::power_colength(n as u64, e);
        }
        let total = ideal
            .vs_dim()
            .ok_or(format!("fixture {k} not zero-dimensional"))?;
        let sum: u64 = pts
            .iter()
            .map(|p| ideal.local_multiplicity(&to_point(&r, p)).unwrap())
            .sum();
        ensure(total == expected && sum == expected, || {
            format!("fixture {k}: vs_dim {total}, local sum {sum}, oracle {expected}")
        })?;
        fixtures += 1;

        for _ in 0..3 {
            let combo = ideal.gens().iter().fold(Polynomial::zero(&r), |acc, g| {
                acc.add(&g.mul(&random_poly(&mut rng, &r, 2)))
            });
            ensure(ideal.contains(&combo), || {
                format!("fixture {k}: combination not a member")
            })?;
            let h = random_poly(&mut rng, &r, 3);
            let off = pts
                .iter()
                .any(|p| !h.eval(to_point(&r, p).coords()).is_zero());
            ensure(!(off && ideal.contains(&h)), || {
                format!("fixture {k}: {h} reported a member but is nonzero on V(I)")
            })?;
        }
    }

    let mut reports = 0;
    for entry in std::fs::read_dir(problems_dir()).unwrap() {
        let path = entry.unwrap().path();
        let p = Problem::load(&path).unwrap();
        let opts = |field| RunOptions {
            field: Some(field),
            confirm_over_rationals: Some(false),
            ..RunOptions::default()
        };
        let q = run(&p, &opts(Field::Rational)).map_err(|e| e.to_string())?;
        let m = run(&p, &opts(Field::Prime(32003))).map_err(|e| e.to_string())?;
        let strip = |mut c: serde_json::Map<String, Value>| {
            if let Some(Value::Object(ic)) = c.get_mut("index-check") {
                ic.remove("critical_values");
            }
            integer_skeleton(&Value::Object(c))
        };
        ensure(strip(q.certified) == strip(m.certified), || {
            format!("{}: modular and rational runs differ", path.display())
        })?;
        reports += 1;
    }
    Ok(format!(
        "{fixtures} multiplicity fixtures, {reports} problems agree mod 32003"
    ))
}

fn criterion_7() -> Outcome {
    let mut problems = 0;
    for name in ["xy.json", "cusp.json", "umbrella-coarse.json"] {
        let p = load(name);
        let certified = |seed| {
            let r = run(
                &p,
                &RunOptions {
                    seed: Some(seed),
                    ..RunOptions::default()
                },
            )
            .unwrap();
            serde_json::to_string(&r.certified).unwrap()
        };
        let base = certified(1);
        for seed in [2, 17, 12345] {
            ensure(certified(seed) == base, || {
                format!("{name}: seed {seed} changes certified values")
            })?;
        }
        let dir = tempfile::tempdir().unwrap();
        let with_cache = |cache: Option<PathBuf>| {
            run(
                &p,
                &RunOptions {
                    cache_dir: cache,
                    ..RunOptions::default()
                },
            )
            .unwrap()
            .to_json()
        };
        let plain = with_cache(None);
        let cold = with_cache(Some(dir.path().to_path_buf()));
        let warm = with_cache(Some(dir.path().to_path_buf()));
        ensure(plain == cold && cold == warm, || {
            format!("{name}: report depends on the cache state")
        })?;
        problems += 1;
    }

    let s = corpus::brieskorn(3, 4).unwrap();
    let ambient = Variety::ambient(&s.ring);
    let o = Point::origin(&s.ring);
    let a = point_coefficient(&s.f, &ambient, &o, 1, 8).map_err(|e| e.to_string())?;
    let b = point_coefficient(&s.f, &ambient, &o, 99, 8).map_err(|e| e.to_string())?;
    let agreeing = |c: &vancycles::polar::PointCoefficient| {
        let last = &c.draws[c.draws.len() - 2..];
        last[0].coefficients != last[1].coefficients
            && last[0].value == Some(c.value)
            && last[1].value == Some(c.value)
    };
    ensure(a.value == b.value && agreeing(&a) && agreeing(&b), || {
        format!("draws disagree: {a:?} vs {b:?}")
    })?;
    ensure(a.draws[0].coefficients != b.draws[0].coefficients, || {
        "seeds 1 and 99 drew the same form".into()
    })?;
    Ok(format!(
        "{problems} problems stable across seeds and cache states; two-draw certificates agree"
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 Milnor numbers of Brieskorn curves", criterion_1),
        ("2 transfer corpus", criterion_2),
        ("3 route consistency", criterion_3),
        ("4 calculus identities", criterion_4),
        ("5 a_f agreement", criterion_5),
        ("6 algebra engine", criterion_6),
        ("7 determinism and cache integrity", criterion_7),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let t0 = Instant::now();
        let outcome =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                println!("FAIL  {name}: {why} [{secs:.2}s]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
