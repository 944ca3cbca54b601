use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;

use vancycles::algebra::{parse_poly, Field, Ideal, MonomialOrder, Point, Polynomial, Ring};
use vancycles::charcycle::{
    alternating_sum_check, betti_b, c_p, ch, FinAbGroup, NormalDataTable, PrimeIdeal,
    StratifiedSheafData, StratumSpec,
};
use vancycles::cycles::Variety;
use vancycles::polar::point_coefficient;

fn plane() -> Ring {
    Ring::rational(&["x", "y"]).unwrap()
}

fn pool() -> &'static (Ring, Vec<StratumSpec>) {
    static POOL: OnceLock<(Ring, Vec<StratumSpec>)> = OnceLock::new();
    POOL.get_or_init(|| {
        let r = plane();
        let gens: [&[&str]; 5] = [&[], &["y"], &["x"], &["y - x^2"], &["x", "y"]];
        let specs = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                StratumSpec::new(
                    &format!("s{i}"),
                    Variety::parse(&r, g).unwrap(),
                    NormalDataTable::zero(),
                )
                .unwrap()
            })
            .collect();
        (r, specs)
    })
}

type RawTable = Vec<(i64, u64, Vec<u64>)>;

fn raw_table() -> impl Strategy<Value = RawTable> {
    prop::collection::vec(
        (
            -2i64..4,
            0u64..4,
            prop::collection::vec(prop::sample::select(vec![2u64, 3, 4, 5, 6, 9]), 0..3),
        ),
        0..4,
    )
}

/// Merges entries of the same degree as a direct sum.
fn table(raw: &RawTable) -> NormalDataTable {
    let mut by_deg: BTreeMap<i64, (u64, Vec<u64>)> = BTreeMap::new();
    for (j, r, t) in raw {
        let e = by_deg.entry(*j).or_default();
        e.0 += r;
        e.1.extend(t);
    }
    NormalDataTable::from_entries(
        by_deg
            .into_iter()
            .map(|(j, (r, t))| (j, FinAbGroup::new(r, &t).unwrap())),
    )
}

fn data(tables: &[Option<RawTable>], primes: &[u64]) -> StratifiedSheafData {
    let (r, specs) = pool();
    let mut strata: Vec<StratumSpec> = specs
        .iter()
        .zip(tables)
        .filter_map(|(s, t)| t.as_ref().map(|t| s.with_table(table(t))))
        .collect();
    if strata.is_empty() {
        strata.push(specs[0].clone());
    }
    let primes = primes.iter().map(|&p| PrimeIdeal(p)).collect();
    StratifiedSheafData::new(r, strata, primes).unwrap()
}

fn sheaf_tables() -> impl Strategy<Value = Vec<Option<RawTable>>> {
    prop::collection::vec(prop::option::of(raw_table()), 5)
}

fn poly_src() -> impl Strategy<Value = String> {
    prop::collection::vec((-6i64..7, 0u32..4, 0u32..4, 1i64..4), 1..6).prop_map(|terms| {
        terms
            .iter()
            .map(|(c, a, b, d)| format!("({c}/{d})*x^{a}*y^{b}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alternating_sum_holds(t in sheaf_tables(), primes in prop::collection::vec(prop::sample::select(vec![2u64, 3, 5]), 0..3)) {
        prop_assert!(alternating_sum_check(&data(&t, &primes)));
    }

    #[test]
    fn ch_is_additive_under_direct_sums(a in sheaf_tables(), b in sheaf_tables()) {
        // strata present in only one summand get a zero table in the other
        let pad = |x: &Option<RawTable>, y: &Option<RawTable>| match (x, y) {
            (None, None) => None,
            _ => Some(x.clone().unwrap_or_default()),
        };
        let a2: Vec<_> = a.iter().zip(&b).map(|(x, y)| pad(x, y)).collect();
        let b2: Vec<_> = b.iter().zip(&a).map(|(x, y)| pad(x, y)).collect();
        let sum: Vec<_> = a2
            .iter()
            .zip(&b2)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => Some(x.iter().chain(y).cloned().collect()),
                _ => None,
            })
            .collect();
        let (fa, fb, fs) = (data(&a2, &[]), data(&b2, &[]), data(&sum, &[]));
        prop_assume!(fa.d == fb.d);
        prop_assert_eq!(ch(&fs), ch(&fa).add(&ch(&fb)));
    }

    #[test]
    fn c_p_dominates_betti(raw in raw_table(), j in -3i64..5, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let t = table(&raw);
        prop_assert_eq!(c_p(&t, j, PrimeIdeal::ZERO), betti_b(&t, j));
        prop_assert!(c_p(&t, j, PrimeIdeal(p)) >= betti_b(&t, j));
    }

    #[test]
    fn torsion_is_canonical(rank in 0u64..5, cyclic in prop::collection::vec(1u64..40, 0..5)) {
        let g = FinAbGroup::new(rank, &cyclic).unwrap();
        prop_assert!(g.is_canonical());
        prop_assert_eq!(g.torsion.iter().product::<u64>(), cyclic.iter().product::<u64>());
    }

    #[test]
    fn parse_print_round_trip(src in poly_src()) {
        let r = plane();
        let p = parse_poly(&r, &src).unwrap();
        let q = parse_poly(&r, &p.to_string()).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn combinations_are_members(g1 in poly_src(), g2 in poly_src(), q1 in poly_src(), q2 in poly_src()) {
        let r = plane();
        let p = |s: &str| parse_poly(&r, s).unwrap();
        let (g1, g2) = (p(&g1), p(&g2));
        let i = Ideal::new(&r, vec![g1.clone(), g2.clone()]).unwrap();
        let h = g1.mul(&p(&q1)).add(&g2.mul(&p(&q2)));
        prop_assert!(i.contains(&h));
        prop_assert!(i.normal_form(&h).is_zero());
    }

    #[test]
    fn modular_basis_matches_reduction(g1 in poly_src(), g2 in poly_src()) {
        let r = plane();
        let i = Ideal::parse(&r, &[g1, g2]).unwrap();
        let rp = Ring::new(&["x", "y"], Field::Prime(32003), MonomialOrder::GrevLex).unwrap();
        let ip = i.to_field(Field::Prime(32003)).unwrap();
        // every rational basis element reduces to zero modulo the prime basis
        for g in i.gb().basis() {
            let gp: Polynomial = g.to_field(&rp).unwrap();
            prop_assert!(ip.contains(&gp));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn point_coefficient_ignores_the_seed(a in 2u32..5, b in 2u32..5, seed in any::<u64>()) {
        let r = plane();
        let f = parse_poly(&r, &format!("x^{a} + y^{b}")).unwrap();
        let c = point_coefficient(&f, &Variety::ambient(&r), &Point::origin(&r), seed, 8).unwrap();
        prop_assert_eq!(c.value, ((a - 1) * (b - 1)) as i64);
    }
}
