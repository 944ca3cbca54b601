use std::fmt;
use std::sync::{Arc, OnceLock};

use super::groebner;
use super::monomial::{self, Monomial, MonomialOrder};
use super::parse::parse_poly;
use super::poly::Polynomial;
use super::ring::Ring;
use super::scalar::Scalar;
use super::store;
use crate::error::{Error, Result};

/// A rational point of affine space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Scalar>);

impl Point {
    pub fn origin(ring: &Ring) -> Point {
        Point(vec![ring.field().zero(); ring.nvars()])
    }

    pub fn from_i64(ring: &Ring, coords: &[i64]) -> Point {
        Point(coords.iter().map(|&c| ring.field().from_i64(c)).collect())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The unique reduced Gröbner basis of an ideal under a fixed order.
#[derive(Clone, Debug)]
pub struct ReducedGB {
    ring: Ring,
    basis: Vec<Polynomial>,
}

impl ReducedGB {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn order(&self) -> &MonomialOrder {
        self.ring.order()
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        let p = p
            .to_ring(&self.ring)
            .expect("normal form of a polynomial from a different ring");
        let refs: Vec<&Polynomial> = self.basis.iter().collect();
        groebner::reduce(&p, &refs)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn leading_monomials(&self) -> Vec<&Monomial> {
        self.basis.iter().map(|g| g.lm().unwrap()).collect()
    }

    pub fn printed(&self) -> Vec<String> {
        self.basis.iter().map(|g| g.to_string()).collect()
    }
}

impl PartialEq for ReducedGB {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.basis == other.basis
    }
}

impl Eq for ReducedGB {}

/// A finitely generated ideal. The grevlex basis is computed on demand and
/// memoized inside the value.
#[derive(Clone)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<Polynomial>,
    grevlex: Arc<OnceLock<ReducedGB>>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{self}")
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Ideal {
    /// Builds an ideal in the grevlex version of `ring`; zero generators are dropped.
    pub fn new(ring: &Ring, gens: Vec<Polynomial>) -> Result<Ideal> {
        let ring = ring.with_order(MonomialOrder::GrevLex);
        let mut out = Vec::with_capacity(gens.len());
        for g in gens {
            if !g.ring().same_space(&ring) {
                return Err(Error::RingMismatch(format!(
                    "generator {g} does not belong to {ring:?}"
                )));
            }
            if !g.is_zero() {
                out.push(g.to_ring(&ring)?);
            }
        }
        Ok(Ideal {
            ring,
            gens: out,
            grevlex: Arc::new(OnceLock::new()),
        })
    }

    pub fn parse<S: AsRef<str>>(ring: &Ring, gens: &[S]) -> Result<Ideal> {
        let polys = gens
            .iter()
            .map(|g| parse_poly(ring, g.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(ring, polys)
    }

    pub fn zero(ring: &Ring) -> Ideal {
        Ideal::new(ring, Vec::new()).unwrap()
    }

    pub fn unit(ring: &Ring) -> Ideal {
        Ideal::new(ring, vec![Polynomial::one(ring)]).unwrap()
    }

    pub(crate) fn with_known_basis(ring: &Ring, basis: Vec<Polynomial>) -> Ideal {
        let ring = ring.with_order(MonomialOrder::GrevLex);
        let basis: Vec<Polynomial> = basis
            .into_iter()
            .map(|g| g.to_ring(&ring).unwrap())
            .collect();
        let cell = OnceLock::new();
        let _ = cell.set(ReducedGB {
            ring: ring.clone(),
            basis: basis.clone(),
        });
        Ideal {
            ring,
            gens: basis,
            grevlex: Arc::new(cell),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    /// Reduced Gröbner basis under `order`, consulting the installed store.
    pub fn groebner(&self, order: &MonomialOrder) -> ReducedGB {
        if *order == MonomialOrder::GrevLex {
            return self.gb().clone();
        }
        compute_gb(&self.ring.with_order(order.clone()), &self.gens)
    }

    /// Reduced grevlex basis (memoized).
    pub fn gb(&self) -> &ReducedGB {
        self.grevlex
            .get_or_init(|| compute_gb(&self.ring, &self.gens))
    }

    /// The same ideal presented by its reduced grevlex basis.
    pub fn canonical(&self) -> Ideal {
        Ideal::with_known_basis(&self.ring, self.gb().basis.clone())
    }

    pub fn is_unit(&self) -> bool {
        if self.gens.iter().any(|g| g.is_constant()) {
            return true;
        }
        self.gb().is_unit()
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.gb().contains(p)
    }

    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    pub fn same_ideal(&self, other: &Ideal) -> bool {
        self.ring.same_space(&other.ring) && self.gb().basis == other.gb().basis
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        self.gb().normal_form(p)
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(&self.ring, gens).unwrap()
    }

    pub fn with_gens(&self, extra: impl IntoIterator<Item = Polynomial>) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        Ideal::new(&self.ring, gens).unwrap()
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut gens = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.mul(b));
            }
        }
        Ideal::new(&self.ring, gens).unwrap()
    }

    /// Moves the ideal into another ring with the same variables but a different field.
    pub fn to_field(&self, field: super::Field) -> Result<Ideal> {
        let target = self.ring.with_field(field);
        let gens = self
            .gens
            .iter()
            .map(|g| g.to_field(&target))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(&target, gens)
    }

    /// Embeds into a ring containing all variables of this one.
    pub fn to_ring(&self, target: &Ring) -> Result<Ideal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.to_ring(target))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(target, gens)
    }

    /// `I ∩ k[vars not in elim]`, returned as an ideal of the same ring. The
    /// result is presented by its reduced grevlex basis.
    pub fn eliminate(&self, elim: &[usize]) -> Ideal {
        if elim.is_empty() {
            return self.clone();
        }
        let order = MonomialOrder::block(self.ring.nvars(), elim);
        let gb = self.groebner(&order);
        // The block order restricts to grevlex on the remaining variables, so the
        // surviving elements are already the reduced grevlex basis.
        let kept: Vec<Polynomial> = gb
            .basis
            .iter()
            .filter(|g| elim.iter().all(|&v| !g.uses_var(v)))
            .cloned()
            .collect();
        Ideal::with_known_basis(&self.ring, kept)
    }

    pub fn eliminate_named(&self, names: &[&str]) -> Result<Ideal> {
        let idx = names
            .iter()
            .map(|n| {
                self.ring
                    .index_of(n)
                    .ok_or_else(|| Error::validation(format!("unknown variable {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eliminate(&idx))
    }

    /// Runs `build` in the ring extended by one fresh variable `t`, eliminates
    /// `t` and maps the result back.
    fn eliminate_aux(&self, build: impl FnOnce(&Ring, &Polynomial) -> Vec<Polynomial>) -> Ideal {
        let tname = self.ring.fresh_name("t");
        let big = self.ring.extended(&[tname.as_str()]).unwrap();
        let t = Polynomial::var(&big, big.nvars() - 1);
        let gens = build(&big, &t);
        let ext = Ideal::new(&big, gens).unwrap();
        let elim = ext.eliminate(&[big.nvars() - 1]);
        let back: Vec<Polynomial> = elim
            .gens
            .iter()
            .map(|g| g.to_ring(&self.ring).unwrap())
            .collect();
        Ideal::with_known_basis(&self.ring, back)
    }

    pub fn intersect(&self, other: &Ideal) -> Ideal {
        if self.is_unit() {
            return other.clone();
        }
        if other.is_unit() {
            return self.clone();
        }
        if self.is_zero() || other.is_zero() {
            return Ideal::zero(&self.ring);
        }
        self.eliminate_aux(|big, t| {
            let one = Polynomial::one(big);
            let omt = one.sub(t);
            let mut gens: Vec<Polynomial> = self
                .gens
                .iter()
                .map(|g| t.mul(&g.to_ring(big).unwrap()))
                .collect();
            gens.extend(other.gens.iter().map(|g| omt.mul(&g.to_ring(big).unwrap())));
            gens
        })
    }

    /// `I : g`.
    pub fn quotient_poly(&self, g: &Polynomial) -> Ideal {
        if g.is_zero() {
            return Ideal::unit(&self.ring);
        }
        if g.is_constant() {
            return self.clone();
        }
        let principal = Ideal::new(&self.ring, vec![g.clone()]).unwrap();
        let inter = self.intersect(&principal);
        let gens: Vec<Polynomial> = inter
            .gens
            .iter()
            .map(|h| {
                h.exact_div(g)
                    .expect("intersection with (g) is divisible by g")
            })
            .collect();
        Ideal::new(&self.ring, gens).unwrap()
    }

    /// `I : J = { p : pJ ⊆ I }`.
    pub fn quotient(&self, other: &Ideal) -> Ideal {
        let mut acc: Option<Ideal> = None;
        for g in &other.gens {
            let q = self.quotient_poly(g);
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersect(&q),
            });
            if acc.as_ref().unwrap().same_ideal(self) {
                // cannot shrink below I
                return self.canonical();
            }
        }
        acc.unwrap_or_else(|| Ideal::unit(&self.ring))
    }

    /// `I : g^∞` via the Rabinowitsch trick.
    pub fn saturate_poly(&self, g: &Polynomial) -> Ideal {
        if g.is_zero() {
            return Ideal::unit(&self.ring);
        }
        if g.is_constant() || self.is_unit() {
            return self.clone();
        }
        if self.is_zero() {
            return self.clone();
        }
        self.eliminate_aux(|big, t| {
            let mut gens: Vec<Polynomial> =
                self.gens.iter().map(|h| h.to_ring(big).unwrap()).collect();
            let gb = g.to_ring(big).unwrap();
            gens.push(Polynomial::one(big).sub(&t.mul(&gb)));
            gens
        })
    }

    /// `I : J^∞ = ⋂_i (I : g_i^∞)` over the generators of `J`.
    pub fn saturate(&self, other: &Ideal) -> Ideal {
        if other.gens.iter().any(|g| g.is_constant()) || self.is_unit() {
            return self.clone();
        }
        // 1 = a + b with a in I, b in J forces I : J^∞ = I
        if !other.is_zero() && self.sum(other).is_unit() {
            return self.canonical();
        }
        let mut acc: Option<Ideal> = None;
        for g in &other.gens {
            let s = self.saturate_poly(g);
            acc = Some(match acc {
                None => s,
                Some(a) => a.intersect(&s),
            });
            if acc.as_ref().unwrap().same_ideal(self) {
                return self.canonical();
            }
        }
        acc.unwrap_or_else(|| Ideal::unit(&self.ring))
    }

    /// `p ∈ √I`, tested as `1 ∈ I + (1 - t p)`.
    pub fn radical_contains(&self, p: &Polynomial) -> bool {
        if self.contains(p) {
            return true;
        }
        let tname = self.ring.fresh_name("t");
        let big = self.ring.extended(&[tname.as_str()]).unwrap();
        let t = Polynomial::var(&big, big.nvars() - 1);
        let mut gens: Vec<Polynomial> =
            self.gens.iter().map(|h| h.to_ring(&big).unwrap()).collect();
        gens.push(Polynomial::one(&big).sub(&t.mul(&p.to_ring(&big).unwrap())));
        Ideal::new(&big, gens).unwrap().is_unit()
    }

    /// `V(self) ⊆ V(other)`, i.e. `other ⊆ √self`.
    pub fn zero_set_within(&self, other: &Ideal) -> bool {
        other.gens.iter().all(|g| self.radical_contains(g))
    }

    pub fn same_zero_set(&self, other: &Ideal) -> bool {
        self.zero_set_within(other) && other.zero_set_within(self)
    }

    /// Radical of a zero-dimensional ideal (Seidenberg): adjoin the square-free
    /// part of each univariate elimination polynomial. `None` when the ideal is
    /// positive-dimensional or the field is not the rationals.
    pub fn radical_zero_dim(&self) -> Option<Ideal> {
        if self.krull_dim() > 0 || !self.ring.field().is_rational() {
            return None;
        }
        if self.is_unit() {
            return Some(self.clone());
        }
        let n = self.ring.nvars();
        let mut extra = Vec::new();
        for i in 0..n {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let e = self.eliminate(&others);
            let p = e.gb().basis().first()?.clone();
            let sqfree = squarefree_parts(&p)
                .into_iter()
                .fold(Polynomial::one(&self.ring), |acc, (_, g)| acc.mul(&g));
            extra.push(sqfree);
        }
        Some(self.with_gens(extra).canonical())
    }

    /// Krull dimension of `V(I)`; `-1` for the unit ideal.
    pub fn krull_dim(&self) -> i64 {
        let gb = self.gb();
        if gb.is_unit() {
            return -1;
        }
        let n = self.ring.nvars();
        let lms: Vec<&Monomial> = gb.leading_monomials();
        let mut best = 0usize;
        let mut chosen = vec![false; n];
        max_independent(&lms, 0, &mut chosen, 0, &mut best);
        best as i64
    }

    /// Dimension of `k[x]/I` as a vector space; `None` when infinite.
    pub fn vs_dim(&self) -> Option<u64> {
        let gb = self.gb();
        if gb.is_unit() {
            return Some(0);
        }
        let n = self.ring.nvars();
        let lms: Vec<&Monomial> = gb.leading_monomials();
        let mut bounds = vec![u32::MAX; n];
        for m in &lms {
            let nz: Vec<usize> = (0..n).filter(|&i| m[i] > 0).collect();
            if nz.len() == 1 {
                bounds[nz[0]] = bounds[nz[0]].min(m[nz[0]]);
            }
        }
        if bounds.contains(&u32::MAX) {
            return None;
        }
        let mut count = 0u64;
        let mut cur = vec![0u32; n];
        count_standard(&lms, &bounds, 0, &mut cur, &mut count);
        Some(count)
    }

    pub fn point_on(&self, x: &Point) -> bool {
        self.gens.iter().all(|g| g.eval(&x.0).is_zero())
    }

    /// Translates coordinates so that `x` becomes the origin.
    pub fn translate_to_origin(&self, x: &Point) -> Ideal {
        if x.is_origin() {
            return self.clone();
        }
        let images: Vec<Polynomial> = (0..self.ring.nvars())
            .map(|i| {
                Polynomial::var(&self.ring, i)
                    .add(&Polynomial::constant(&self.ring, x.0[i].clone()))
            })
            .collect();
        let gens = self
            .gens
            .iter()
            .map(|g| g.compose(&self.ring, &images))
            .collect();
        Ideal::new(&self.ring, gens).unwrap()
    }

    /// Ideal of the origin, `(x_1, …, x_n)`.
    pub fn maximal_at_origin(ring: &Ring) -> Ideal {
        Ideal::new(
            ring,
            (0..ring.nvars())
                .map(|i| Polynomial::var(ring, i))
                .collect(),
        )
        .unwrap()
    }

    /// Length of the local ring of `k[x]/I` at the rational point `x`:
    /// `dim k[x]/(J : (J : m^∞))` with `J` the ideal translated to the origin.
    /// The point must be isolated in `V(I)` (or absent from it, giving 0).
    pub fn local_multiplicity(&self, x: &Point) -> Result<u64> {
        if x.len() != self.ring.nvars() {
            return Err(Error::precondition("point dimension differs from ring"));
        }
        if !self.point_on(x) {
            return Ok(0);
        }
        let j = self.translate_to_origin(x);
        let m = Ideal::maximal_at_origin(&self.ring);
        let away = j.saturate(&m);
        if away.point_on(&Point::origin(&self.ring)) {
            return Err(Error::precondition(format!(
                "point {x} is not an isolated point of V{self}"
            )));
        }
        let primary = j.quotient(&away);
        primary.vs_dim().ok_or_else(|| {
            Error::precondition(format!("point {x} is not an isolated point of V{self}"))
        })
    }
}

/// Monic greatest common divisor, via `(a) ∩ (b) = (lcm(a, b))`.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.ring());
    }
    let ring = a.ring();
    let ia = Ideal::new(ring, vec![a.clone()]).unwrap();
    let ib = Ideal::new(ring, vec![b.clone()]).unwrap();
    let inter = ia.intersect(&ib);
    let lcm = &inter.gb().basis()[0];
    let g = a.mul(b).exact_div(lcm).expect("lcm divides the product");
    g.monic()
}

/// Square-free decomposition in characteristic zero: pairs `(k, g_k)` with
/// `p = c · Π g_k^k` and the `g_k` square-free and pairwise coprime.
pub fn squarefree_parts(p: &Polynomial) -> Vec<(u32, Polynomial)> {
    let mut out = Vec::new();
    if p.is_zero() || p.is_constant() {
        return out;
    }
    let radical = |q: &Polynomial| -> Polynomial {
        let mut g = q.clone();
        for d in q.gradient() {
            g = poly_gcd(&g, &d);
        }
        q.exact_div(&g).unwrap().monic()
    };
    let mut cur = p.clone();
    let mut r = radical(&cur);
    let mut k = 1;
    while !cur.is_constant() {
        cur = cur.exact_div(&r).unwrap();
        let next = if cur.is_constant() {
            Polynomial::one(p.ring())
        } else {
            radical(&cur)
        };
        let part = r.exact_div(&next).unwrap().monic();
        if !part.is_constant() {
            out.push((k, part));
        }
        r = next;
        k += 1;
    }
    out
}

fn compute_gb(ring: &Ring, gens: &[Polynomial]) -> ReducedGB {
    let gens: Vec<Polynomial> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.to_ring(ring).unwrap())
        .collect();
    if gens.is_empty() {
        return ReducedGB {
            ring: ring.clone(),
            basis: Vec::new(),
        };
    }
    let store = store::current_store();
    let key = store.as_ref().map(|_| store::request_key(ring, &gens));
    if let (Some(s), Some(k)) = (&store, &key) {
        if let Some(printed) = s.get(k) {
            match printed
                .iter()
                .map(|p| parse_poly(ring, p))
                .collect::<Result<Vec<_>>>()
            {
                Ok(basis) if is_reduced_basis_of(ring, &basis, &gens) => {
                    return ReducedGB {
                        ring: ring.clone(),
                        basis,
                    }
                }
                _ => s.reject(k, "stored basis does not parse or fails verification"),
            }
        }
    }
    let basis = groebner::reduced_basis(ring, &gens);
    if let (Some(s), Some(k)) = (&store, &key) {
        let printed: Vec<String> = basis.iter().map(|p| p.to_string()).collect();
        s.put(k, &printed);
    }
    ReducedGB {
        ring: ring.clone(),
        basis,
    }
}

/// Cheap sanity check on a cached basis: monic, sorted, and every generator
/// reduces to zero modulo it.
fn is_reduced_basis_of(ring: &Ring, basis: &[Polynomial], gens: &[Polynomial]) -> bool {
    if basis
        .iter()
        .any(|b| b.is_zero() || !b.lc().unwrap().is_one())
    {
        return false;
    }
    if basis.windows(2).any(|w| {
        ring.order().cmp(w[0].lm().unwrap(), w[1].lm().unwrap()) != std::cmp::Ordering::Less
    }) {
        return false;
    }
    let refs: Vec<&Polynomial> = basis.iter().collect();
    gens.iter().all(|g| groebner::reduce(g, &refs).is_zero())
}

fn max_independent(
    lms: &[&Monomial],
    start: usize,
    chosen: &mut Vec<bool>,
    size: usize,
    best: &mut usize,
) {
    if size > *best {
        *best = size;
    }
    let n = chosen.len();
    if size + (n - start) <= *best {
        return;
    }
    for v in start..n {
        chosen[v] = true;
        // no leading monomial may live entirely in the chosen variables
        let ok = lms
            .iter()
            .all(|m| m.iter().enumerate().any(|(i, &e)| e > 0 && !chosen[i]));
        if ok {
            max_independent(lms, v + 1, chosen, size + 1, best);
        }
        chosen[v] = false;
    }
}

fn count_standard(
    lms: &[&Monomial],
    bounds: &[u32],
    var: usize,
    cur: &mut Vec<u32>,
    count: &mut u64,
) {
    if var == cur.len() {
        if !lms.iter().any(|m| monomial::divides(m, cur)) {
            *count += 1;
        }
        return;
    }
    for e in 0..bounds[var] {
        cur[var] = e;
        // prune: if the partial monomial (rest zero) is already divisible, larger ones are too
        let divisible = lms
            .iter()
            .any(|m| (0..=var).all(|i| m[i] <= cur[i]) && (var + 1..cur.len()).all(|i| m[i] == 0));
        if divisible {
            break;
        }
        count_standard(lms, bounds, var + 1, cur, count);
    }
    cur[var] = 0;
}
