//! Relative polar curves, local intersection numbers and the point
//! coefficient of the exceptional divisor.

use serde::Serialize;

use crate::algebra::{squarefree_parts, Ideal, Point, PolyMatrix, Polynomial, Ring};
use crate::conormal::conormal_ideal;
use crate::cycles::{Cycle, Variety};
use crate::error::{Error, Result};
use crate::rng;

/// Coefficient range for generic linear forms.
pub const LINEAR_BOUND: i64 = 97;

#[derive(Clone, Debug)]
pub struct GenericLinear {
    pub form: Polynomial,
    pub coefficients: Vec<i64>,
    pub seed: u64,
    pub retry: u32,
}

/// Linear form with coefficients drawn from the seeded stream.
pub fn pick_generic_linear(ring: &Ring, seed: u64, retry: u32) -> GenericLinear {
    let mut r = rng::stream(seed, "linear-form", retry);
    let coefficients = rng::small_ints(&mut r, ring.nvars(), LINEAR_BOUND);
    let form = linear_form(ring, &coefficients);
    GenericLinear {
        form,
        coefficients,
        seed,
        retry,
    }
}

pub fn linear_form(ring: &Ring, coefficients: &[i64]) -> Polynomial {
    coefficients
        .iter()
        .enumerate()
        .fold(Polynomial::zero(ring), |acc, (i, &c)| {
            acc.add(&Polynomial::var(ring, i).scale(&ring.field().from_i64(c)))
        })
}

#[derive(Clone, Debug)]
pub struct PolarCurve {
    /// Saturated minor ideal; multiplicities live in this scheme.
    pub ideal: Ideal,
    pub cycle: Cycle,
    pub stratum: Variety,
    pub linear: Polynomial,
}

fn codim(s: &Variety) -> usize {
    (s.ring().nvars() as i64 - s.dim()) as usize
}

/// Ideal of `S` plus the `(c+1)`-minors of `[Jac S; df]`: its zero set is
/// `Sing S ∪ Σ(f|S_reg)`.
pub fn critical_ideal(f: &Polynomial, s: &Variety) -> Result<Ideal> {
    let ring = s.ring();
    let f = f.to_ring(ring)?;
    let mut rows: Vec<Vec<Polynomial>> = s.ideal().gens().iter().map(|g| g.gradient()).collect();
    rows.push(f.gradient());
    let m = PolyMatrix::new(ring, rows);
    Ok(s.ideal().with_gens(m.minors(codim(s) + 1)))
}

/// True when `f` is locally constant on `S`, i.e. `S` is its own critical locus.
pub fn constant_on(f: &Polynomial, s: &Variety) -> Result<bool> {
    let crit = critical_ideal(f, s)?;
    Ok(s.ideal().zero_set_within(&crit))
}

/// The polar scheme `Γ¹_{f|S, L}`.
pub fn polar_curve(f: &Polynomial, s: &Variety, l: &Polynomial) -> Result<PolarCurve> {
    let ring = s.ring();
    let f = f.to_ring(ring)?;
    let l = l.to_ring(ring)?;
    let c = codim(s);
    let mut rows: Vec<Vec<Polynomial>> = s.ideal().gens().iter().map(|g| g.gradient()).collect();
    rows.push(f.gradient());
    let crit_minors = PolyMatrix::new(ring, rows.clone()).minors(c + 1);
    let crit = Ideal::new(ring, crit_minors)?;
    if s.ideal().zero_set_within(&crit) {
        return Err(Error::precondition(format!("f is constant on {s}")));
    }
    rows.push(l.gradient());
    let m = PolyMatrix::new(ring, rows);
    let raw = s.ideal().with_gens(m.minors(c + 2));
    let ideal = raw.saturate(&crit).canonical();
    if ideal.krull_dim() > 1 {
        return Err(Error::Genericity {
            attempts: 0,
            message: format!(
                "polar locus for L = {l} has dimension {}",
                ideal.krull_dim()
            ),
        });
    }
    let cycle = polar_cycle(&ideal);
    Ok(PolarCurve {
        ideal,
        cycle,
        stratum: s.clone(),
        linear: l,
    })
}

/// Cycle of a polar scheme. Principal schemes over the rationals are split
/// into square-free parts with their multiplicities; otherwise the scheme is
/// recorded as a single component of multiplicity one.
fn polar_cycle(ideal: &Ideal) -> Cycle {
    if ideal.is_unit() {
        return Cycle::zero();
    }
    let gb = ideal.gb().basis();
    if gb.len() == 1 && ideal.ring().field().is_rational() {
        let mut c = Cycle::zero();
        for (k, part) in squarefree_parts(&gb[0]) {
            let v = Variety::new(&Ideal::new(ideal.ring(), vec![part]).unwrap());
            c = c.plus_term(k as i64, v, None);
        }
        return c;
    }
    Cycle::single(1, Variety::new(ideal))
}

/// `(Γ · V(g - g(x)))_x`.
pub fn intersection_number(gamma: &PolarCurve, g: &Polynomial, x: &Point) -> Result<u64> {
    if gamma.ideal.is_unit() {
        return Ok(0);
    }
    let g = g.to_ring(gamma.ideal.ring())?;
    let gx = g.eval(x.coords());
    let shifted = g.sub(&Polynomial::constant(gamma.ideal.ring(), gx));
    gamma
        .ideal
        .with_gens([shifted])
        .local_multiplicity(x)
        .map_err(|e| match e {
            Error::Precondition(m) => Error::Genericity {
                attempts: 0,
                message: format!("improper intersection: {m}"),
            },
            other => other,
        })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LinearDraw {
    pub coefficients: Vec<i64>,
    pub stream: u32,
    pub value: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCoefficient {
    pub value: i64,
    /// Retry round that produced two agreeing draws.
    pub retry: u32,
    /// Every draw that was tried, in order.
    pub draws: Vec<LinearDraw>,
}

fn coefficient_for(f: &Polynomial, s: &Variety, x: &Point, l: &GenericLinear) -> Result<i64> {
    let gamma = polar_curve(f, s, &l.form)?;
    let a = intersection_number(&gamma, f, x)? as i64;
    let b = intersection_number(&gamma, &l.form, x)? as i64;
    Ok(a - b)
}

/// `(Γ·V(f))_x − (Γ·V(L − L(x)))_x`, certified by two independent draws of `L`.
pub fn point_coefficient(
    f: &Polynomial,
    s: &Variety,
    x: &Point,
    seed: u64,
    retries: u32,
) -> Result<PointCoefficient> {
    let ring = s.ring();
    let f = f.to_ring(ring)?;
    if !f.eval(x.coords()).is_zero() {
        return Err(Error::precondition(format!("f does not vanish at {x}")));
    }
    if !s.ideal().point_on(x) {
        return Err(Error::precondition(format!("{x} is not on {s}")));
    }
    let mut draws = Vec::new();
    for retry in 0..retries {
        let mut vals = Vec::new();
        for k in 0..2 {
            let stream = 2 * retry + k;
            let l = pick_generic_linear(ring, seed, stream);
            let v = match coefficient_for(&f, s, x, &l) {
                Ok(v) => Some(v),
                Err(Error::Genericity { .. }) => None,
                Err(e) => return Err(e),
            };
            draws.push(LinearDraw {
                coefficients: l.coefficients.clone(),
                stream,
                value: v,
            });
            vals.push(v);
        }
        if let [Some(a), Some(b)] = vals[..] {
            if a == b {
                return Ok(PointCoefficient {
                    value: a,
                    retry,
                    draws,
                });
            }
        }
    }
    Err(Error::Genericity {
        attempts: retries,
        message: format!("no two agreeing generic linear forms at {x} on {s}"),
    })
}

/// `1 · [P(T*_W U)]` for a stratum on which `f` vanishes identically.
pub fn constant_stratum_exceptional(w: &Variety, f: &Polynomial) -> Result<Cycle> {
    if !w.vanishes(&f.to_ring(w.ring())?) {
        return Err(Error::precondition(format!(
            "f does not vanish identically on {w}"
        )));
    }
    let c = conormal_ideal(w)?;
    Ok(Cycle::single_based(1, c.as_variety(), w.clone()))
}
