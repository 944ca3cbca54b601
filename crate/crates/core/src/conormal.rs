//! Conormal and relative conormal varieties in `T*U = U × C^{n+1}` with
//! coordinates `(z, w)`, their fibres over points, and Whitney (a) tests.

use std::fmt;

use crate::algebra::{Ideal, Point, PolyMatrix, Polynomial, Ring, Scalar};
use crate::cycles::Variety;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConormalKind {
    Absolute,
    Relative,
}

/// Closure of a conormal-type space, stored by its ideal in `(z, w)`.
#[derive(Clone, Debug)]
pub struct ConormalVariety {
    pub total: Ideal,
    pub base: Variety,
    pub kind: ConormalKind,
}

/// Fibre of a conormal-type space over a point, an ideal in `w` only.
#[derive(Clone, Debug)]
pub struct CovectorFiber {
    pub ideal: Ideal,
    pub point: Point,
}

/// Names of the cotangent variables paired with `ring`'s variables.
pub fn cotangent_names(ring: &Ring) -> Vec<String> {
    ring.vars()
        .iter()
        .map(|v| {
            let mut name = format!("w_{v}");
            while ring.index_of(&name).is_some() {
                name.insert(0, '_');
            }
            name
        })
        .collect()
}

/// The ring `k[z, w]` (grevlex) for the base ring `k[z]`.
pub fn cotangent_ring(ring: &Ring) -> Ring {
    ring.extended(&cotangent_names(ring)).unwrap()
}

/// The ring `k[w]` alone.
pub fn covector_ring(ring: &Ring) -> Ring {
    Ring::new(
        &cotangent_names(ring),
        ring.field(),
        crate::algebra::MonomialOrder::GrevLex,
    )
    .unwrap()
}

fn w_row(big: &Ring, n: usize) -> Vec<Polynomial> {
    (0..n).map(|i| Polynomial::var(big, n + i)).collect()
}

fn lift(big: &Ring, ps: &[Polynomial]) -> Vec<Polynomial> {
    ps.iter().map(|p| p.to_ring(big).unwrap()).collect()
}

fn codim(s: &Variety) -> usize {
    (s.ring().nvars() as i64 - s.dim()) as usize
}

impl ConormalVariety {
    pub fn ring(&self) -> &Ring {
        self.total.ring()
    }

    /// Krull dimension of the total space.
    pub fn dim(&self) -> i64 {
        self.total.krull_dim()
    }

    /// Restriction to the fibre over `x`.
    pub fn fiber_at(&self, x: &Point) -> Result<CovectorFiber> {
        if !self.base.ideal().point_on(x) {
            return Err(Error::precondition(format!(
                "point {x} is not on the base {}",
                self.base
            )));
        }
        Ok(CovectorFiber {
            ideal: substitute_point(&self.total, self.base.ring(), x),
            point: x.clone(),
        })
    }

    /// The `z`-locus where `(z, d_z f)` lies on this space.
    pub fn covector_locus(&self, f: &Polynomial) -> Ideal {
        substitute_differential(&self.total, self.base.ring(), f)
    }

    /// The total space as a variety in `(z, w)`.
    pub fn as_variety(&self) -> Variety {
        Variety::new(&self.total)
    }
}

/// Substitutes `z := x` into an ideal of `k[z, w]`, giving an ideal of `k[w]`.
pub fn substitute_point(total: &Ideal, base: &Ring, x: &Point) -> Ideal {
    let n = base.nvars();
    let wr = covector_ring(base);
    let mut vals: Vec<Option<Scalar>> = x.coords().iter().cloned().map(Some).collect();
    vals.extend(std::iter::repeat_n(None, n));
    let images: Vec<Polynomial> = (0..n)
        .map(|_| Polynomial::zero(&wr))
        .chain((0..n).map(|i| Polynomial::var(&wr, i)))
        .collect();
    let gens = total
        .gens()
        .iter()
        .map(|g| g.partial_eval(&vals).compose(&wr, &images))
        .collect();
    Ideal::new(&wr, gens).unwrap()
}

/// Substitutes `w := df` into an ideal of `k[z, w]`, giving an ideal of `k[z]`.
pub fn substitute_differential(total: &Ideal, base: &Ring, f: &Polynomial) -> Ideal {
    let f = f.to_ring(base).unwrap();
    let mut images: Vec<Polynomial> = (0..base.nvars())
        .map(|i| Polynomial::var(base, i))
        .collect();
    images.extend(f.gradient());
    let gens = total
        .gens()
        .iter()
        .map(|g| g.compose(base, &images))
        .collect();
    Ideal::new(base, gens).unwrap()
}

/// Closure of the conormal space of `S_reg`.
pub fn conormal_ideal(s: &Variety) -> Result<ConormalVariety> {
    if s.is_empty() {
        return Err(Error::precondition("conormal of the empty variety"));
    }
    let ring = s.ring();
    let n = ring.nvars();
    let big = cotangent_ring(ring);
    let c = codim(s);
    let gens = lift(&big, s.ideal().gens());
    let jac = PolyMatrix::jacobian(&big, &gens);
    let mut m = PolyMatrix::new(
        &big,
        (0..jac.nrows()).map(|i| jac.row(i)[..n].to_vec()).collect(),
    );
    m.push_row(w_row(&big, n));
    let mut all = gens.clone();
    all.extend(m.minors(c + 1));
    let raw = Ideal::new(&big, all)?;
    let jac_z = PolyMatrix::new(
        &big,
        (0..jac.nrows()).map(|i| jac.row(i)[..n].to_vec()).collect(),
    );
    let sing = Ideal::new(&big, jac_z.minors(c))?;
    let total = raw.saturate(&sing);
    Ok(ConormalVariety {
        total,
        base: s.clone(),
        kind: ConormalKind::Absolute,
    })
}

/// Closure over `M_reg \ Σ(f|M)` of covectors killing `T_x M ∩ ker d_x f`.
/// When `f` is constant on `M` the absolute conormal is returned if
/// `constant_fallback` is set, and an error otherwise.
pub fn relative_conormal_ideal(
    m: &Variety,
    f: &Polynomial,
    constant_fallback: bool,
) -> Result<ConormalVariety> {
    if m.is_empty() {
        return Err(Error::precondition(
            "relative conormal of the empty variety",
        ));
    }
    let ring = m.ring();
    let n = ring.nvars();
    let big = cotangent_ring(ring);
    let c = codim(m);
    let gens = lift(&big, m.ideal().gens());
    let fb = f.to_ring(ring)?.to_ring(&big)?;
    let mut rows: Vec<Vec<Polynomial>> = gens.iter().map(|g| g.gradient()[..n].to_vec()).collect();
    rows.push(fb.gradient()[..n].to_vec());
    let jf = PolyMatrix::new(&big, rows.clone());
    let crit = Ideal::new(&big, jf.minors(c + 1))?;
    // f constant on M: every (c+1)-minor vanishes on M
    if Ideal::new(&big, gens.clone())?.zero_set_within(&crit) {
        if constant_fallback {
            return conormal_ideal(m);
        }
        return Err(Error::precondition(format!("f is constant on {m}")));
    }
    rows.push(w_row(&big, n));
    let full = PolyMatrix::new(&big, rows);
    let mut all = gens;
    all.extend(full.minors(c + 2));
    let total = Ideal::new(&big, all)?.saturate(&crit);
    Ok(ConormalVariety {
        total,
        base: m.clone(),
        kind: ConormalKind::Relative,
    })
}

impl CovectorFiber {
    pub fn generators(&self) -> Vec<String> {
        self.ideal.gb().printed()
    }
}

impl fmt::Display for CovectorFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.ideal, self.point)
    }
}

/// `V(fa) ⊆ V(fb)` as cones in the cotangent fibre.
pub fn fiber_contained(fa: &CovectorFiber, fb: &CovectorFiber) -> Result<bool> {
    if fa.point != fb.point {
        return Err(Error::precondition("fibres over different points"));
    }
    Ok(fa.ideal.zero_set_within(&fb.ideal))
}

/// A generator of `fb` that does not vanish on `V(fa)`, if any.
pub fn containment_witness(fa: &CovectorFiber, fb: &CovectorFiber) -> Option<Polynomial> {
    fb.ideal
        .gb()
        .basis()
        .iter()
        .find(|g| !fa.ideal.radical_contains(g))
        .cloned()
}

/// Rank of the Jacobian of `v`'s generators at `x` equals the codimension.
pub fn smooth_at(v: &Variety, x: &Point) -> bool {
    let rows: Vec<Vec<Scalar>> = v
        .ideal()
        .gens()
        .iter()
        .map(|g| g.gradient().iter().map(|d| d.eval(x.coords())).collect())
        .collect();
    rank(rows) as i64 == v.ring().nvars() as i64 - v.dim()
}

pub(crate) fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let mut r = 0;
    let ncols = rows.first().map_or(0, |x| x.len());
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r][col].inv();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].mul(&inv);
                for k in col..ncols {
                    let t = rows[r][k].mul(&factor);
                    rows[i][k] = rows[i][k].sub(&t);
                }
            }
        }
        r += 1;
    }
    r
}

/// Conormal-fibre form of Whitney's condition (a) for `(M, N)` at `x`.
pub fn whitney_a_at(m: &Variety, n: &Variety, x: &Point) -> Result<bool> {
    if !n.ideal().point_on(x) {
        return Err(Error::precondition(format!("point {x} is not on {n}")));
    }
    if !smooth_at(n, x) {
        return Err(Error::precondition(format!("{n} is not smooth at {x}")));
    }
    let cm = conormal_ideal(m)?;
    let fm = if m.ideal().point_on(x) {
        cm.fiber_at(x)?
    } else {
        return Ok(true);
    };
    let fn_ = conormal_ideal(n)?.fiber_at(x)?;
    fiber_contained(&fm, &fn_)
}
