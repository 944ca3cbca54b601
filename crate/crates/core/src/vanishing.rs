//! Exceptional-divisor coefficients and supports, and the transfer of normal
//! data to the vanishing cycles of `f`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{squarefree_parts, Ideal, Point, Polynomial, Ring};
use crate::charcycle::{betti_b, c_p, euler_char, m_alpha, sign, StratifiedSheafData, StratumSpec};
use crate::conormal::{conormal_ideal, cotangent_names, cotangent_ring};
use crate::cycles::Variety;
use crate::error::{Error, Result};
use crate::polar::{critical_ideal, point_coefficient, LinearDraw};
use crate::rng;

/// A stratum of the partition of `V(f)`; tables are not part of the input.
#[derive(Clone, Debug)]
pub struct VfStratum {
    pub name: String,
    pub closure: Variety,
    pub dim: i64,
    /// Generic point used for coefficients.
    pub witness: Option<Point>,
    /// Further points at which a_f is checked.
    pub check_points: Vec<Point>,
}

impl VfStratum {
    pub fn new(name: &str, closure: Variety, witness: Option<Point>) -> Result<VfStratum> {
        if closure.is_empty() {
            return Err(Error::validation(format!(
                "stratum {name} has empty closure"
            )));
        }
        if let Some(w) = &witness {
            if w.len() != closure.ring().nvars() || !closure.ideal().point_on(w) {
                return Err(Error::validation(format!(
                    "witness {w} is not on stratum {name}"
                )));
            }
        }
        Ok(VfStratum {
            name: name.to_string(),
            dim: closure.dim(),
            closure,
            witness,
            check_points: Vec::new(),
        })
    }

    pub fn with_check_points(mut self, points: Vec<Point>) -> Result<VfStratum> {
        for p in &points {
            if p.len() != self.closure.ring().nvars() || !self.closure.ideal().point_on(p) {
                return Err(Error::validation(format!(
                    "check point {p} is not on stratum {}",
                    self.name
                )));
            }
        }
        self.check_points = points;
        Ok(self)
    }

    /// Witness (or the rational point of a point stratum) followed by the check points.
    pub fn all_points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self.point().into_iter().collect();
        for p in &self.check_points {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }

    /// The witness point, or the unique point of a zero-dimensional closure
    /// when it is rational.
    pub fn point(&self) -> Option<Point> {
        if let Some(w) = &self.witness {
            return Some(w.clone());
        }
        if self.dim != 0 {
            return None;
        }
        rational_point(self.closure.ideal())
    }
}

/// The point of an ideal whose reduced basis is `(z_i - c_i)`.
pub fn rational_point(i: &Ideal) -> Option<Point> {
    let ring = i.ring();
    let n = ring.nvars();
    let gb = i.gb().basis();
    if gb.len() != n {
        return None;
    }
    let mut coords = vec![ring.field().zero(); n];
    for g in gb {
        let lm = g.lm()?;
        if lm.iter().sum::<u32>() != 1 || g.len() > 2 {
            return None;
        }
        let v = lm.iter().position(|&e| e == 1)?;
        coords[v] = g.constant_term().neg();
    }
    Some(Point(coords))
}

#[derive(Clone, Debug)]
pub struct VfPartition {
    pub strata: Vec<VfStratum>,
}

impl VfPartition {
    /// Checks that every closure lies in `V(f)`.
    pub fn new(f: &Polynomial, strata: Vec<VfStratum>) -> Result<VfPartition> {
        for s in &strata {
            if !s.closure.vanishes(&f.to_ring(s.closure.ring())?) {
                return Err(Error::validation(format!(
                    "stratum {} is not inside V(f)",
                    s.name
                )));
            }
        }
        Ok(VfPartition { strata })
    }

    pub fn closures(&self) -> Vec<Variety> {
        self.strata.iter().map(|s| s.closure.clone()).collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CriticalValues {
    /// Rational stratified critical values, ascending.
    pub rational: Vec<String>,
    pub has_nonrational: bool,
    /// Visible strata on which `f` is constant.
    pub constant_on: Vec<String>,
}

/// Stratified critical locus of `f` on the open part of `S`: the critical
/// ideal saturated by the singular locus of the closure.
fn stratum_critical_locus(f: &Polynomial, s: &Variety) -> Result<Ideal> {
    let crit = critical_ideal(f, s)?;
    let c = (s.ring().nvars() as i64 - s.dim()) as usize;
    let jac = crate::algebra::PolyMatrix::jacobian(s.ring(), s.ideal().gens());
    let sing = s.ideal().with_gens(jac.minors(c));
    Ok(crit.saturate(&sing))
}

pub fn critical_values(f: &Polynomial, data: &StratifiedSheafData) -> Result<CriticalValues> {
    let ring = &data.ring;
    if !ring.field().is_rational() {
        return Err(Error::precondition(
            "critical values are computed over the rationals",
        ));
    }
    let f = f.to_ring(ring)?;
    let tname = ring.fresh_name("t");
    let big = ring.extended(&[tname.as_str()])?;
    let t = Polynomial::var(&big, ring.nvars());
    let mut roots: Vec<BigRational> = Vec::new();
    let mut nonrational = false;
    let mut constant_on = Vec::new();
    for s in data.visible_strata() {
        let locus = stratum_critical_locus(&f, &s.closure)?;
        if locus.is_unit() {
            continue;
        }
        if s.closure.ideal().zero_set_within(&locus) && s.dim > 0 {
            constant_on.push(s.name.clone());
        }
        let lifted = locus.to_ring(&big)?.with_gens([t.sub(&f.to_ring(&big)?)]);
        let elim = lifted.eliminate(&(0..ring.nvars()).collect::<Vec<_>>());
        let Some(p) = elim.gb().basis().first() else {
            nonrational = true;
            continue;
        };
        let (rs, irr) = rational_roots(p, ring.nvars());
        nonrational |= irr;
        roots.extend(rs);
    }
    roots.sort();
    roots.dedup();
    Ok(CriticalValues {
        rational: roots.iter().map(fmt_rational).collect(),
        has_nonrational: nonrational,
        constant_on,
    })
}

pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rational roots of a univariate polynomial in variable `var`, and whether
/// some root is not rational.
pub fn rational_roots(p: &Polynomial, var: usize) -> (Vec<BigRational>, bool) {
    let mut roots = Vec::new();
    let mut degree_left = 0u32;
    for (_, part) in squarefree_parts(p) {
        let mut coeffs: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (m, c) in part.terms() {
            coeffs.insert(
                m[var],
                c.as_rational().cloned().unwrap_or_else(BigRational::zero),
            );
        }
        let deg = *coeffs.keys().max().unwrap();
        let lcm_den = coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: BTreeMap<u32, BigInt> = coeffs
            .iter()
            .map(|(&e, c)| {
                (
                    e,
                    (c * BigRational::from_integer(lcm_den.clone())).to_integer(),
                )
            })
            .collect();
        let low = *ints.keys().min().unwrap();
        let mut found = 0u32;
        if low > 0 {
            roots.push(BigRational::zero());
            found += 1;
        }
        let a0 = ints[&low].abs();
        let an = ints[&deg].abs();
        let eval = |x: &BigRational| -> BigRational {
            ints.iter().fold(BigRational::zero(), |acc, (&e, c)| {
                acc + BigRational::from_integer(c.clone()) * num_traits::pow(x.clone(), e as usize)
            })
        };
        for pn in divisors(&a0) {
            for qd in divisors(&an) {
                for s in [1, -1] {
                    let cand = BigRational::new(pn.clone() * s, qd.clone());
                    if !roots.contains(&cand) && eval(&cand).is_zero() {
                        roots.push(cand);
                        found += 1;
                    }
                }
            }
        }
        degree_left += deg - found.min(deg);
    }
    (roots, degree_left > 0)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &(&d * &d) <= n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let q = n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMethod {
    ConstantStratum,
    NotIncident,
    PointPolar,
    SlicedPolar,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalCoefficient {
    pub value: i64,
    pub method: CoefficientMethod,
    /// Linear-form draws (diagnostic).
    pub draws: Vec<LinearDraw>,
    /// Coefficients of every slice tried (diagnostic).
    pub slices: Vec<Vec<Vec<i64>>>,
}

impl ExceptionalCoefficient {
    fn fixed(value: i64, method: CoefficientMethod) -> Self {
        ExceptionalCoefficient {
            value,
            method,
            draws: Vec::new(),
            slices: Vec::new(),
        }
    }
}

/// Affine-linear forms `Σ c_ji (z_i - x_i)` cutting a slice of codimension `k` through `x`.
fn slice_forms(
    ring: &Ring,
    x: &Point,
    k: usize,
    seed: u64,
    label: &str,
    attempt: u32,
) -> (Vec<Polynomial>, Vec<Vec<i64>>) {
    let mut r = rng::stream(seed, label, attempt);
    let mut forms = Vec::new();
    let mut coeffs = Vec::new();
    for _ in 0..k {
        let c = rng::small_ints(&mut r, ring.nvars(), 31);
        let mut form = Polynomial::zero(ring);
        for (i, &ci) in c.iter().enumerate() {
            let shifted =
                Polynomial::var(ring, i).sub(&Polynomial::constant(ring, x.coords()[i].clone()));
            form = form.add(&shifted.scale(&ring.field().from_i64(ci)));
        }
        forms.push(form);
        coeffs.push(c);
    }
    (forms, coeffs)
}

/// Coefficient of `P(T*_{W_β} U)` in `π(E_α)`.
pub fn exceptional_coefficient(
    f: &Polynomial,
    alpha: &StratumSpec,
    beta: &VfStratum,
    seed: u64,
    retries: u32,
) -> Result<ExceptionalCoefficient> {
    let s = &alpha.closure;
    let f = f.to_ring(s.ring())?;
    if !beta.closure.vanishes(&f) {
        return Err(Error::precondition(format!(
            "f does not vanish on {}",
            beta.name
        )));
    }
    if s.vanishes(&f) {
        let v = i64::from(*s == beta.closure);
        return Ok(ExceptionalCoefficient::fixed(
            v,
            CoefficientMethod::ConstantStratum,
        ));
    }
    // E_α lies over {z : (z, d_z f) ∈ T*_{S_α} U}
    let locus = alpha.conormal().covector_locus(&f).sum(s.ideal());
    if beta
        .closure
        .ideal()
        .sum(&locus.to_ring(beta.closure.ring())?)
        .krull_dim()
        < beta.dim
    {
        return Ok(ExceptionalCoefficient::fixed(
            0,
            CoefficientMethod::NotIncident,
        ));
    }
    let x = beta.point().ok_or_else(|| {
        Error::precondition(format!(
            "stratum {} needs a rational witness point",
            beta.name
        ))
    })?;
    if !s.ideal().point_on(&x) || s.dim() <= beta.dim {
        return Ok(ExceptionalCoefficient::fixed(
            0,
            CoefficientMethod::NotIncident,
        ));
    }
    if beta.dim == 0 {
        let pc = point_coefficient(&f, s, &x, seed, retries)?;
        return Ok(ExceptionalCoefficient {
            value: pc.value,
            method: CoefficientMethod::PointPolar,
            draws: pc.draws,
            slices: Vec::new(),
        });
    }
    let k = beta.dim as usize;
    let label = format!("slice:{}", beta.name);
    let mut draws = Vec::new();
    let mut slices = Vec::new();
    for attempt in 0..retries {
        let mut vals = Vec::new();
        for j in 0..2 {
            let (forms, coeffs) = slice_forms(s.ring(), &x, k, seed, &label, 2 * attempt + j);
            slices.push(coeffs);
            let cut = Variety::new(&s.ideal().with_gens(forms));
            if cut.dim() != s.dim() - k as i64 {
                vals.push(None);
                continue;
            }
            match point_coefficient(&f, &cut, &x, seed, retries) {
                Ok(pc) => {
                    draws.extend(pc.draws);
                    vals.push(Some(pc.value));
                }
                Err(Error::Genericity { .. }) | Err(Error::Precondition(_)) => vals.push(None),
                Err(e) => return Err(e),
            }
        }
        if let [Some(a), Some(b)] = vals[..] {
            if a == b {
                return Ok(ExceptionalCoefficient {
                    value: a,
                    method: CoefficientMethod::SlicedPolar,
                    draws,
                    slices,
                });
            }
        }
    }
    Err(Error::Genericity {
        attempts: retries,
        message: format!(
            "no two agreeing slices through the witness of {}",
            beta.name
        ),
    })
}

/// The exceptional divisor of `Bl_{im df} T*_S U`, mapped to `X × P^n` and
/// written in the cotangent ring with the `P^n` coordinates in place of `w`.
/// The ideal is homogeneous in `w`; its scheme structure is the pull-back of
/// the centre.
#[derive(Clone, Debug)]
pub struct ExceptionalSupport {
    pub stratum: String,
    /// Full exceptional image (scheme).
    pub scheme: Ideal,
    /// Part lying over `V(f)`.
    pub within_vf: Ideal,
}

impl ExceptionalSupport {
    pub fn is_empty(&self) -> bool {
        self.within_vf.is_unit()
    }

    pub fn variety(&self) -> Variety {
        Variety::new(&self.within_vf)
    }
}

pub fn exceptional_support(f: &Polynomial, alpha: &StratumSpec) -> Result<ExceptionalSupport> {
    let s = &alpha.closure;
    let ring = s.ring();
    let f = f.to_ring(ring)?;
    let cot = cotangent_ring(ring);
    if s.vanishes(&f) {
        let total = alpha.conormal().total.clone();
        return Ok(ExceptionalSupport {
            stratum: alpha.name.clone(),
            scheme: total.clone(),
            within_vf: total,
        });
    }
    let n = ring.nvars();
    let wn = cotangent_names(ring);
    let mut names: Vec<String> = ring.vars().to_vec();
    names.extend(wn.iter().cloned());
    let anames: Vec<String> = ring.vars().iter().map(|v| format!("_a_{v}")).collect();
    names.extend(anames.iter().cloned());
    names.push("_s".to_string());
    let big = Ring::new(&names, ring.field(), crate::algebra::MonomialOrder::GrevLex)?;
    let grad: Vec<Polynomial> = f
        .gradient()
        .iter()
        .map(|g| g.to_ring(&big).unwrap())
        .collect();
    let svar = Polynomial::var(&big, 3 * n);
    let mut gens: Vec<Polynomial> = alpha
        .conormal()
        .total
        .gens()
        .iter()
        .map(|g| g.to_ring(&big).unwrap())
        .collect();
    for i in 0..n {
        let centre = Polynomial::var(&big, n + i).sub(&grad[i]);
        gens.push(Polynomial::var(&big, 2 * n + i).sub(&svar.mul(&centre)));
    }
    let rees = Ideal::new(&big, gens)?.eliminate(&[3 * n]);
    // restrict to the centre: w := df, then a ↦ w in the cotangent ring
    let fc = f.to_ring(&cot)?;
    let mut images: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(&cot, i)).collect();
    images.extend(fc.gradient()[..n].iter().cloned());
    images.extend((0..n).map(|i| Polynomial::var(&cot, n + i)));
    images.push(Polynomial::zero(&cot));
    let e = Ideal::new(
        &cot,
        rees.gens()
            .iter()
            .map(|g| g.compose(&cot, &images))
            .collect(),
    )?;
    let irrelevant = Ideal::new(&cot, (0..n).map(|i| Polynomial::var(&cot, n + i)).collect())?;
    let scheme = e.saturate(&irrelevant).canonical();
    let within_vf = restrict_to_vf(&scheme, &fc);
    Ok(ExceptionalSupport {
        stratum: alpha.name.clone(),
        scheme,
        within_vf,
    })
}

/// Removes the components of `V(i)` not contained in `V(f)`.
fn restrict_to_vf(i: &Ideal, f: &Polynomial) -> Ideal {
    if i.is_unit() {
        return i.clone();
    }
    let away = i.saturate_poly(f);
    if away.is_unit() {
        return i.clone();
    }
    i.saturate(&away).canonical()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TransferredTable {
    pub stratum: String,
    pub dim: i64,
    /// Index `j` of `H^j(N_β, L_β; φ_f[-1] F)` to its Betti number.
    pub b: BTreeMap<i64, u64>,
    /// Per finite prime, index to `c^p`.
    pub c: BTreeMap<u64, BTreeMap<i64, u64>>,
}

impl TransferredTable {
    pub fn visible(&self) -> bool {
        self.b.values().any(|&v| v > 0) || self.c.values().any(|m| m.values().any(|&v| v > 0))
    }

    pub fn euler_char(&self) -> i64 {
        self.b.iter().map(|(&j, &v)| sign(j) * v as i64).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixEntry {
    pub source: String,
    pub target: String,
    pub coefficient: ExceptionalCoefficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferResult {
    pub tables: Vec<TransferredTable>,
    /// Exceptional coefficients over visible `(α, β)` pairs, in input order.
    pub matrix: Vec<MatrixEntry>,
}

impl TransferResult {
    pub fn table(&self, name: &str) -> Option<&TransferredTable> {
        self.tables.iter().find(|t| t.stratum == name)
    }

    pub fn coefficient(&self, source: &str, target: &str) -> Option<i64> {
        self.matrix
            .iter()
            .find(|e| e.source == source && e.target == target)
            .map(|e| e.coefficient.value)
    }
}

pub fn betti_transfer(
    f: &Polynomial,
    data: &StratifiedSheafData,
    w: &VfPartition,
    seed: u64,
    retries: u32,
) -> Result<TransferResult> {
    let mut matrix = Vec::new();
    let mut tables = Vec::new();
    for beta in &w.strata {
        let mut b: BTreeMap<i64, u64> = BTreeMap::new();
        let mut c: BTreeMap<u64, BTreeMap<i64, u64>> =
            data.primes.iter().map(|p| (p.0, BTreeMap::new())).collect();
        for alpha in data.visible_strata() {
            let coef = exceptional_coefficient(f, alpha, beta, seed, retries)?;
            let k = coef.value;
            if k < 0 {
                return Err(Error::precondition(format!(
                    "negative exceptional coefficient {k} for ({}, {})",
                    alpha.name, beta.name
                )));
            }
            let k = k as u64;
            if k > 0 {
                let shift = alpha.dim - beta.dim;
                let mut degrees: Vec<i64> = alpha.table.degrees().collect();
                degrees.extend(alpha.table.degrees().map(|j| j - 1));
                degrees.sort();
                degrees.dedup();
                for j in degrees {
                    let bv = betti_b(&alpha.table, j) * k;
                    if bv > 0 {
                        *b.entry(j + shift).or_default() += bv;
                    }
                    for p in &data.primes {
                        let cv = c_p(&alpha.table, j, *p) * k;
                        if cv > 0 {
                            *c.get_mut(&p.0).unwrap().entry(j + shift).or_default() += cv;
                        }
                    }
                }
            }
            matrix.push(MatrixEntry {
                source: alpha.name.clone(),
                target: beta.name.clone(),
                coefficient: coef,
            });
        }
        tables.push(TransferredTable {
            stratum: beta.name.clone(),
            dim: beta.dim,
            b,
            c,
        });
    }
    Ok(TransferResult { tables, matrix })
}

/// `V(i) ⊆ ∪_k V(j_k)`, tested as `Π j_k ⊆ √i`.
fn within_union(i: &Ideal, js: &[Ideal]) -> bool {
    if i.is_unit() {
        return true;
    }
    let Some(first) = js.first() else {
        return false;
    };
    let prod = js[1..].iter().fold(first.clone(), |acc, j| acc.product(j));
    i.zero_set_within(&prod)
}

fn union_ideal(is: &[Ideal], ring: &Ring) -> Ideal {
    is.iter().fold(Ideal::unit(ring), |acc, i| acc.product(i))
}

/// Every exceptional support lies in `∪_β P(T*_{W_β} U)`.
pub fn phi_normality_check(
    f: &Polynomial,
    data: &StratifiedSheafData,
    w: &VfPartition,
) -> Result<bool> {
    let conormals = w
        .strata
        .iter()
        .map(|b| Ok(conormal_ideal(&b.closure)?.total))
        .collect::<Result<Vec<_>>>()?;
    for alpha in data.visible_strata() {
        let sup = exceptional_support(f, alpha)?;
        if !within_union(&sup.within_vf, &conormals) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `d̂ = 1 + dim (X ∩ V(f))`.
pub fn d_hat(f: &Polynomial, data: &StratifiedSheafData) -> Result<i64> {
    let f = f.to_ring(&data.ring)?;
    let mut best = -1;
    for s in &data.strata {
        best = best.max(s.closure.ideal().with_gens([f.clone()]).krull_dim());
    }
    Ok(1 + best)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientCheck {
    pub stratum: String,
    /// `Σ_α m_α · length of E_α along P(T*_{W_β}U)`.
    pub exceptional_side: i64,
    /// `(-1)^{d - d̂} m_β(Ch(φ_f F))` from the transferred table.
    pub vanishing_side: i64,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexCheck {
    pub d: i64,
    pub d_hat: i64,
    pub supports_equal: bool,
    pub coefficients: Vec<CoefficientCheck>,
    pub passed: bool,
}

/// Length of the exceptional scheme along `{x} × P^n`, read off at a random
/// point `[a0]` of the fibre; certified by two draws.
fn blowup_length(scheme: &Ideal, x: &Point, seed: u64, label: &str, retries: u32) -> Result<i64> {
    let cot = scheme.ring();
    let n = x.len();
    for attempt in 0..retries {
        let mut vals = Vec::new();
        for j in 0..2 {
            let mut r = rng::stream(seed, label, 2 * attempt + j);
            let a0 = rng::small_ints(&mut r, n, 41);
            let mut coords: Vec<_> = x.coords().to_vec();
            coords.extend(a0.iter().map(|&v| cot.field().from_i64(v)));
            let pt = Point(coords);
            let cut = scheme.with_gens(
                (0..n).map(|i| Polynomial::var(cot, n + i).sub(&Polynomial::from_i64(cot, a0[i]))),
            );
            match cut.local_multiplicity(&pt) {
                Ok(v) => vals.push(Some(v as i64)),
                Err(Error::Precondition(_)) => vals.push(None),
                Err(e) => return Err(e),
            }
        }
        if let [Some(a), Some(b)] = vals[..] {
            if a == b {
                return Ok(a);
            }
        }
    }
    Err(Error::Genericity {
        attempts: retries,
        message: format!("blow-up length at {x} did not stabilise"),
    })
}

/// Cross-validates the exceptional-divisor route against the transfer route
/// at `v = 0`: equality of supports and, at point strata, of coefficients.
pub fn vanishing_index_check(
    f: &Polynomial,
    data: &StratifiedSheafData,
    w: &VfPartition,
    seed: u64,
    retries: u32,
) -> Result<IndexCheck> {
    if !phi_normality_check(f, data, w)? {
        return Err(Error::precondition(
            "the partition of V(f) is not normal for the vanishing cycles",
        ));
    }
    let transfer = betti_transfer(f, data, w, seed, retries)?;
    let ring = &data.ring;
    let cot = cotangent_ring(ring);
    let d = data.d;
    let dh = d_hat(f, data)?;

    let supports: Vec<(&StratumSpec, ExceptionalSupport)> = data
        .visible_strata()
        .map(|a| Ok((a, exceptional_support(f, a)?)))
        .collect::<Result<Vec<_>>>()?;
    let exc_union = union_ideal(
        &supports
            .iter()
            .map(|(_, s)| s.within_vf.clone())
            .collect::<Vec<_>>(),
        &cot,
    );
    let mut visible_conormals = Vec::new();
    for (beta, table) in w.strata.iter().zip(&transfer.tables) {
        if table.visible() {
            visible_conormals.push(conormal_ideal(&beta.closure)?.total);
        }
    }
    let phi_union = union_ideal(&visible_conormals, &cot);
    let supports_equal = exc_union.same_zero_set(&phi_union);

    let mut coefficients = Vec::new();
    for (beta, table) in w.strata.iter().zip(&transfer.tables) {
        if beta.dim != 0 {
            continue;
        }
        let Some(x) = beta.point() else { continue };
        let mut exc = 0i64;
        for (alpha, sup) in &supports {
            let m = m_alpha(&alpha.table, d, alpha.dim);
            let len = if alpha.closure.vanishes(&f.to_ring(ring)?) {
                i64::from(alpha.closure == beta.closure)
            } else if sup.scheme.is_unit() {
                0
            } else {
                blowup_length(
                    &sup.scheme,
                    &x,
                    seed,
                    &format!("fibre:{}:{}", alpha.name, beta.name),
                    retries,
                )?
            };
            exc += m * len;
        }
        let m_beta = sign(dh - 1 - beta.dim) * -table.euler_char();
        let vanishing_side = sign(d - dh) * m_beta;
        coefficients.push(CoefficientCheck {
            stratum: beta.name.clone(),
            exceptional_side: exc,
            vanishing_side,
            agree: exc == vanishing_side,
        });
    }
    let passed = supports_equal && coefficients.iter().all(|c| c.agree);
    Ok(IndexCheck {
        d,
        d_hat: dh,
        supports_equal,
        coefficients,
        passed,
    })
}

/// Entrywise Euler characteristic bookkeeping behind the coefficient check:
/// `(-1)^{d - d_β} χ(T_β) = Σ_α coef_{αβ} (-1)^{d - d_α} χ(t_α)`.
pub fn transfer_euler_identity(
    data: &StratifiedSheafData,
    transfer: &TransferResult,
    w: &VfPartition,
) -> bool {
    w.strata.iter().zip(&transfer.tables).all(|(beta, table)| {
        let lhs = sign(data.d - beta.dim) * table.euler_char();
        let rhs: i64 = data
            .visible_strata()
            .map(|a| {
                transfer.coefficient(&a.name, &beta.name).unwrap_or(0)
                    * sign(data.d - a.dim)
                    * euler_char(&a.table)
            })
            .sum();
        lhs == rhs
    })
}
