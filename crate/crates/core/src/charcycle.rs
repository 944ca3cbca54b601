//! Numerical calculus of normal data: Euler characteristics, characteristic
//! cycles and their perverse pieces, visibility, normality and the support of
//! vanishing cycles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::algebra::{Ideal, Point, Polynomial, Ring};
use crate::conormal::{conormal_ideal, ConormalVariety};
use crate::cycles::{Cycle, Variety};
use crate::error::{Error, Result};

/// Finitely generated abelian group `Z^rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with
/// `d_1 | d_2 | … | d_k`, each `d_i ≥ 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    pub rank: u64,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl FinAbGroup {
    pub fn free(rank: u64) -> FinAbGroup {
        FinAbGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    /// Canonical form of `Z^rank ⊕ ⨁ Z/c_i` for arbitrary positive `c_i`.
    pub fn new(rank: u64, cyclic: &[u64]) -> Result<FinAbGroup> {
        if cyclic.contains(&0) {
            return Err(Error::validation("torsion orders must be positive"));
        }
        let mut diag: Vec<i128> = cyclic.iter().map(|&c| c as i128).collect();
        // diagonal Smith form: make the chain divisible
        for i in 0..diag.len() {
            for j in i + 1..diag.len() {
                let g = diag[i].gcd(&diag[j]);
                let l = diag[i] / g * diag[j];
                diag[i] = g;
                diag[j] = l;
            }
        }
        let torsion = diag
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| d as u64)
            .collect();
        Ok(FinAbGroup { rank, torsion })
    }

    /// Cokernel of the integer relation matrix: `Z^generators / rowspan(relations)`.
    pub fn from_presentation(generators: usize, relations: &[Vec<i64>]) -> Result<FinAbGroup> {
        if relations.iter().any(|r| r.len() != generators) {
            return Err(Error::validation(
                "relation length differs from generator count",
            ));
        }
        let mut m: Vec<Vec<i128>> = relations
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        let diag = smith_diagonal(&mut m, generators);
        let nonzero = diag.iter().filter(|&&d| d != 0).count();
        let rank = (generators - nonzero) as u64;
        let cyclic: Vec<u64> = diag
            .iter()
            .filter(|&&d| d != 0)
            .map(|&d| d.unsigned_abs() as u64)
            .collect();
        FinAbGroup::new(rank, &cyclic)
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// `dim (G ⊗ F_p)` torsion part: number of divisors divisible by `p`.
    pub fn p_torsion_count(&self, p: u64) -> u64 {
        self.torsion.iter().filter(|&&d| d % p == 0).count() as u64
    }

    pub fn is_canonical(&self) -> bool {
        self.torsion.iter().all(|&d| d >= 2) && self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.rank)
            });
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn smith_diagonal(m: &mut [Vec<i128>], ncols: usize) -> Vec<i128> {
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        let p = m[t][t];
        for i in t + 1..nrows {
            let q = Integer::div_floor(&m[i][t], &p);
            if q != 0 {
                for j in t..ncols {
                    m[i][j] -= q * m[t][j];
                }
            }
            if m[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..ncols {
            let q = Integer::div_floor(&m[t][j], &p);
            if q != 0 {
                for row in m.iter_mut() {
                    row[j] -= q * row[t];
                }
            }
            if m[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold any entry not divisible by the pivot into row t
        if let Some(i) = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| m[i][j] % p != 0)) {
            for j in t..ncols {
                m[t][j] += m[i][j];
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag.resize(ncols.min(nrows).max(diag.len()), 0);
    diag
}

/// `j ↦ H^j(N, L; F)`, only nonzero entries stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "BTreeMap<i64, FinAbGroup>", into = "BTreeMap<i64, FinAbGroup>")]
pub struct NormalDataTable(BTreeMap<i64, FinAbGroup>);

impl From<BTreeMap<i64, FinAbGroup>> for NormalDataTable {
    fn from(m: BTreeMap<i64, FinAbGroup>) -> Self {
        NormalDataTable(m.into_iter().filter(|(_, g)| !g.is_zero()).collect())
    }
}

impl From<NormalDataTable> for BTreeMap<i64, FinAbGroup> {
    fn from(t: NormalDataTable) -> Self {
        t.0
    }
}

impl NormalDataTable {
    pub fn zero() -> NormalDataTable {
        NormalDataTable::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (i64, FinAbGroup)>) -> NormalDataTable {
        NormalDataTable::from(entries.into_iter().collect::<BTreeMap<_, _>>())
    }

    /// Torsion-free table from `(degree, rank)` pairs.
    pub fn free(entries: &[(i64, u64)]) -> NormalDataTable {
        NormalDataTable::from_entries(entries.iter().map(|&(j, r)| (j, FinAbGroup::free(r))))
    }

    pub fn get(&self, j: i64) -> Option<&FinAbGroup> {
        self.0.get(&j)
    }

    pub fn entries(&self) -> &BTreeMap<i64, FinAbGroup> {
        &self.0
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// `0` stands for the zero ideal of `Z` (residue field `Q`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimeIdeal(pub u64);

impl PrimeIdeal {
    pub const ZERO: PrimeIdeal = PrimeIdeal(0);

    pub fn new(p: u64) -> Result<PrimeIdeal> {
        if p == 0 || is_prime(p) {
            Ok(PrimeIdeal(p))
        } else {
            Err(Error::validation(format!("{p} is not prime")))
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "(0)")
        } else {
            write!(f, "({})", self.0)
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn euler_char(t: &NormalDataTable) -> i64 {
    t.0.iter()
        .map(|(&j, g)| {
            if j.rem_euclid(2) == 0 {
                g.rank as i64
            } else {
                -(g.rank as i64)
            }
        })
        .sum()
}

pub fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^{d - d_α} χ(t)`.
pub fn m_alpha(t: &NormalDataTable, d: i64, d_alpha: i64) -> i64 {
    sign(d - d_alpha) * euler_char(t)
}

pub fn betti_b(t: &NormalDataTable, j: i64) -> u64 {
    t.get(j).map_or(0, |g| g.rank)
}

/// `dim H^j ⊗ k_p + dim Tor(H^{j+1}, k_p)`.
pub fn c_p(t: &NormalDataTable, j: i64, p: PrimeIdeal) -> u64 {
    if p.is_zero() {
        return betti_b(t, j);
    }
    betti_b(t, j)
        + t.get(j).map_or(0, |g| g.p_torsion_count(p.0))
        + t.get(j + 1).map_or(0, |g| g.p_torsion_count(p.0))
}

/// Coefficient used in the perverse expansion: Betti number for the zero
/// ideal, `c^p` otherwise.
pub fn perverse_coefficient(t: &NormalDataTable, j: i64, p: PrimeIdeal) -> u64 {
    c_p(t, j, p)
}

/// Zero or nonzero normal data.
pub fn visible(t: &NormalDataTable) -> bool {
    !t.is_zero()
}

/// A stratum: name, closure and normal data. The conormal of the closure is
/// computed once and shared between clones.
#[derive(Clone)]
pub struct StratumSpec {
    pub name: String,
    pub closure: Variety,
    pub dim: i64,
    pub table: NormalDataTable,
    conormal: Arc<OnceLock<ConormalVariety>>,
}

impl fmt::Debug for StratumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StratumSpec")
            .field("name", &self.name)
            .field("closure", &self.closure)
            .field("dim", &self.dim)
            .field("table", &self.table)
            .finish()
    }
}

impl StratumSpec {
    pub fn new(name: &str, closure: Variety, table: NormalDataTable) -> Result<StratumSpec> {
        if closure.is_empty() {
            return Err(Error::validation(format!(
                "stratum {name} has empty closure"
            )));
        }
        Ok(StratumSpec {
            name: name.to_string(),
            dim: closure.dim(),
            closure,
            table,
            conormal: Arc::new(OnceLock::new()),
        })
    }

    /// Same geometry (and shared conormal cache) with another table.
    pub fn with_table(&self, table: NormalDataTable) -> StratumSpec {
        StratumSpec {
            table,
            ..self.clone()
        }
    }

    pub fn conormal(&self) -> &ConormalVariety {
        self.conormal
            .get_or_init(|| conormal_ideal(&self.closure).expect("nonempty closure"))
    }

    pub fn visible(&self) -> bool {
        visible(&self.table)
    }
}

#[derive(Clone, Debug)]
pub struct StratifiedSheafData {
    pub ring: Ring,
    pub d: i64,
    pub strata: Vec<StratumSpec>,
    /// Finite primes; the zero ideal is always implied.
    pub primes: Vec<PrimeIdeal>,
}

impl StratifiedSheafData {
    pub fn new(
        ring: &Ring,
        strata: Vec<StratumSpec>,
        primes: Vec<PrimeIdeal>,
    ) -> Result<StratifiedSheafData> {
        if strata.is_empty() {
            return Err(Error::validation("no strata"));
        }
        for (i, a) in strata.iter().enumerate() {
            if !a.closure.ring().same_space(ring) {
                return Err(Error::validation(format!(
                    "stratum {} lives in another ring",
                    a.name
                )));
            }
            for b in &strata[i + 1..] {
                if a.closure == b.closure {
                    return Err(Error::validation(format!(
                        "strata {} and {} have the same closure",
                        a.name, b.name
                    )));
                }
                if a.name == b.name {
                    return Err(Error::validation(format!(
                        "duplicate stratum name {}",
                        a.name
                    )));
                }
            }
        }
        let d = strata.iter().map(|s| s.dim).max().unwrap();
        let mut primes = primes;
        primes.retain(|p| !p.is_zero());
        primes.sort();
        primes.dedup();
        Ok(StratifiedSheafData {
            ring: ring.clone(),
            d,
            strata,
            primes,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ring.nvars()
    }

    /// The zero ideal followed by the finite primes.
    pub fn all_primes(&self) -> Vec<PrimeIdeal> {
        std::iter::once(PrimeIdeal::ZERO)
            .chain(self.primes.iter().copied())
            .collect()
    }

    pub fn visible_strata(&self) -> impl Iterator<Item = &StratumSpec> {
        self.strata.iter().filter(|s| s.visible())
    }

    /// Perverse degrees `i = j + d_α` at which some table is nonzero, widened
    /// by one for the Tor shift.
    pub fn perverse_range(&self) -> Vec<i64> {
        let mut set = BTreeSet::new();
        for s in &self.strata {
            for j in s.table.degrees() {
                set.insert(j + s.dim);
                set.insert(j + s.dim - 1);
            }
        }
        set.into_iter().collect()
    }
}

fn conormal_term(s: &StratumSpec) -> (Variety, Variety) {
    (s.conormal().as_variety(), s.closure.clone())
}

/// `Σ_α m_α [T*_{S_α} U]`.
pub fn ch(f: &StratifiedSheafData) -> Cycle {
    let mut c = Cycle::zero();
    for s in &f.strata {
        let m = m_alpha(&s.table, f.d, s.dim);
        if m != 0 {
            let (v, base) = conormal_term(s);
            c = c.plus_term(m, v, Some(base));
        }
    }
    c
}

/// `(-1)^d Σ_α coef_{i - d_α} [T*_{S_α} U]` with Betti or `c^p` coefficients.
pub fn ch_perverse(f: &StratifiedSheafData, i: i64, p: PrimeIdeal) -> Cycle {
    let mut c = Cycle::zero();
    for s in &f.strata {
        let coef = perverse_coefficient(&s.table, i - s.dim, p) as i64;
        if coef != 0 {
            let (v, base) = conormal_term(s);
            c = c.plus_term(sign(f.d) * coef, v, Some(base));
        }
    }
    c
}

/// `Ch(F) = Σ_i (-1)^i Ch(μH^i(F))`.
pub fn alternating_sum_check(f: &StratifiedSheafData) -> bool {
    let mut rhs = Cycle::zero();
    for i in f.perverse_range() {
        rhs = rhs.add(&ch_perverse(f, i, PrimeIdeal::ZERO).scale(sign(i)));
    }
    ch(f) == rhs
}

/// Every component of every perverse piece, over every residue field, is the
/// conormal of some `W_β`.
pub fn is_normal_partitioning(f: &StratifiedSheafData, w: &[Variety]) -> Result<bool> {
    let mut keys = BTreeSet::new();
    for v in w {
        keys.insert(conormal_ideal(v)?.as_variety());
    }
    for p in f.all_primes() {
        for i in f.perverse_range() {
            for comp in ch_perverse(f, i, p).support() {
                if !keys.contains(&comp) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct PhiSupport {
    /// `(stratum name, locus)` for each visible stratum meeting the locus.
    pub pieces: Vec<(String, Variety)>,
    /// Union of the pieces (intersection of their ideals).
    pub union: Variety,
}

impl PhiSupport {
    pub fn is_empty(&self) -> bool {
        self.union.is_empty()
    }
}

fn reduce_if_possible(i: &Ideal) -> Ideal {
    i.radical_zero_dim().unwrap_or_else(|| i.canonical())
}

/// `{x : (x, d_x f) ∈ ∪_{visible} T*_{S_α} U}`.
pub fn phi_support_locus(f: &StratifiedSheafData, g: &Polynomial) -> Result<PhiSupport> {
    let g = g.to_ring(&f.ring)?;
    let mut pieces = Vec::new();
    let mut union = Ideal::unit(&f.ring);
    for s in f.visible_strata() {
        let locus = s.conormal().covector_locus(&g).sum(s.closure.ideal());
        if locus.is_unit() {
            continue;
        }
        let locus = reduce_if_possible(&locus);
        union = union.intersect(&locus);
        pieces.push((s.name.clone(), Variety::new(&locus)));
    }
    Ok(PhiSupport {
        pieces,
        union: Variety::new(&union),
    })
}

/// `(x, d_x f)` lies on the conormal of some visible stratum.
pub fn phi_point_membership(f: &StratifiedSheafData, g: &Polynomial, x: &Point) -> Result<bool> {
    let g = g.to_ring(&f.ring)?;
    let mut coords: Vec<_> = x.coords().to_vec();
    coords.extend(g.gradient().iter().map(|d| d.eval(x.coords())));
    let pair = Point(coords);
    Ok(f.visible_strata()
        .any(|s| s.conormal().total.point_on(&pair)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn z(r: u64, t: &[u64]) -> FinAbGroup {
        FinAbGroup::new(r, t).unwrap()
    }

    #[test]
    fn groups_are_canonical() {
        assert_eq!(z(0, &[6, 4]).torsion, vec![2, 12]);
        assert_eq!(z(1, &[1, 3]).torsion, vec![3]);
        let g = FinAbGroup::from_presentation(3, &[vec![2, 0, 0], vec![0, 4, 6]]).unwrap();
        assert_eq!(g, z(1, &[2, 2]));
        let h = FinAbGroup::from_presentation(2, &[vec![2, 4], vec![6, 8]]).unwrap();
        // determinant -8, gcd of entries 2
        assert_eq!(h, z(0, &[2, 4]));
    }

    #[test]
    fn table_numbers() {
        assert_eq!(euler_char(&NormalDataTable::zero()), 0);
        assert_eq!(euler_char(&NormalDataTable::free(&[(0, 1)])), 1);
        let t = NormalDataTable::from_entries([(1, z(2, &[2]))]);
        assert_eq!(euler_char(&t), -2);
        assert_eq!(m_alpha(&NormalDataTable::free(&[(0, 1)]), 2, 2), 1);
        assert_eq!(m_alpha(&NormalDataTable::free(&[(1, 2)]), 2, 0), -2);
        let t = NormalDataTable::from_entries([(0, z(1, &[2])), (1, z(0, &[2]))]);
        assert_eq!(c_p(&t, 0, PrimeIdeal(2)), 3);
        let t = NormalDataTable::from_entries([(0, z(1, &[3]))]);
        assert_eq!(c_p(&t, 0, PrimeIdeal(2)), 1);
        assert_eq!(c_p(&t, 0, PrimeIdeal::ZERO), 1);
        assert!(visible(&NormalDataTable::free(&[(0, 1), (1, 1)])));
        assert!(visible(&NormalDataTable::from_entries([(3, z(0, &[5]))])));
        assert!(!visible(&NormalDataTable::zero()));
    }

    fn plane_data(tables: &[(&str, &[&str], NormalDataTable)]) -> StratifiedSheafData {
        let r = Ring::rational(&["x", "y"]).unwrap();
        let strata = tables
            .iter()
            .map(|(n, g, t)| {
                StratumSpec::new(n, Variety::parse(&r, g).unwrap(), t.clone()).unwrap()
            })
            .collect();
        StratifiedSheafData::new(&r, strata, vec![PrimeIdeal(2)]).unwrap()
    }

    #[test]
    fn characteristic_cycles() {
        let f = plane_data(&[
            ("open", &[], NormalDataTable::free(&[(0, 1)])),
            ("origin", &["x", "y"], NormalDataTable::free(&[(1, 1)])),
        ]);
        let c = ch(&f);
        let zero_section = f.strata[0].conormal().as_variety();
        let fibre = f.strata[1].conormal().as_variety();
        assert_eq!(c.coefficient_of(&zero_section), 1);
        assert_eq!(c.coefficient_of(&fibre), -1);
        assert!(alternating_sum_check(&f));
        assert_eq!(
            ch_perverse(&f, 2, PrimeIdeal::ZERO).coefficient_of(&zero_section),
            1
        );
        assert!(ch_perverse(&f, 50, PrimeIdeal::ZERO).is_zero());
        let closures: Vec<Variety> = f.strata.iter().map(|s| s.closure.clone()).collect();
        assert!(is_normal_partitioning(&f, &closures).unwrap());
        assert!(!is_normal_partitioning(&f, &closures[..1]).unwrap());
    }

    #[test]
    fn torsion_shows_up_mod_p() {
        let f = plane_data(&[(
            "origin",
            &["x", "y"],
            NormalDataTable::from_entries([(1, z(0, &[2]))]),
        )]);
        assert!(ch_perverse(&f, 0, PrimeIdeal::ZERO).is_zero());
        assert!(!ch_perverse(&f, 0, PrimeIdeal(2)).is_zero());
    }

    #[test]
    fn phi_support() {
        let f = plane_data(&[("open", &[], NormalDataTable::free(&[(0, 1)]))]);
        let r = f.ring.clone();
        let p = |s: &str| parse_poly(&r, s).unwrap();
        let origin = Variety::parse(&r, &["x", "y"]).unwrap();
        assert_eq!(phi_support_locus(&f, &p("x*y")).unwrap().union, origin);
        assert!(phi_support_locus(&f, &p("x")).unwrap().is_empty());
        assert_eq!(
            phi_support_locus(&f, &p("x^2 + y^3")).unwrap().union,
            origin
        );
        assert!(phi_point_membership(&f, &p("x*y"), &Point::origin(&r)).unwrap());
        assert!(!phi_point_membership(&f, &p("x*y"), &Point::from_i64(&r, &[1, 0])).unwrap());
        let zero = plane_data(&[("open", &[], NormalDataTable::zero())]);
        assert!(!phi_point_membership(&zero, &p("x*y"), &Point::origin(&r)).unwrap());
    }
}
