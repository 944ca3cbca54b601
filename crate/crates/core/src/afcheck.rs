//! Thom's a_f condition and Whitney's condition (a) at witness points: the
//! direct conormal test, the exceptional-divisor criterion, the
//! vanishing-cycle criterion and the partition scenario that combines them.

use serde::Serialize;

use crate::algebra::{Ideal, Point, Polynomial};
use crate::charcycle::{sign, StratifiedSheafData};
use crate::conormal::{
    conormal_ideal, containment_witness, cotangent_ring, fiber_contained, relative_conormal_ideal,
    substitute_point, whitney_a_at, CovectorFiber,
};
use crate::cycles::{Cycle, Variety};
use crate::error::{Error, Result};
use crate::polar::constant_on;
use crate::vanishing::{betti_transfer, exceptional_support, phi_normality_check, VfPartition};

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AfMethod {
    Direct,
    ViaVanishing,
    ViaProp43,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AfVerdict {
    pub m: String,
    pub n: String,
    pub point: String,
    pub verdict: bool,
    /// A covector equation of the small stratum violated by the big one.
    pub witness: Option<String>,
    pub method: AfMethod,
}

fn verdict_from(
    m: &str,
    n: &str,
    x: &Point,
    fa: &CovectorFiber,
    fb: &CovectorFiber,
    method: AfMethod,
) -> Result<AfVerdict> {
    let ok = fiber_contained(fa, fb)?;
    let witness = if ok {
        None
    } else {
        containment_witness(fa, fb).map(|g| g.to_string())
    };
    Ok(AfVerdict {
        m: m.to_string(),
        n: n.to_string(),
        point: x.to_string(),
        verdict: ok,
        witness,
        method,
    })
}

/// Fibres at `x` of the relative conormal of `(M, f)` inside those of `T*_N U`.
pub fn af_pair_check(m: &Variety, f: &Polynomial, n: &Variety, x: &Point) -> Result<AfVerdict> {
    af_pair_named(&m.to_string(), m, f, &n.to_string(), n, x)
}

pub fn af_pair_named(
    m_name: &str,
    m: &Variety,
    f: &Polynomial,
    n_name: &str,
    n: &Variety,
    x: &Point,
) -> Result<AfVerdict> {
    if !n.ideal().point_on(x) {
        return Err(Error::precondition(format!("point {x} is not on {n}")));
    }
    let f = f.to_ring(n.ring())?;
    if n.dim() > 0 && !constant_on(&f, n)? {
        return Err(Error::precondition(format!("f is not constant on {n}")));
    }
    let fb = conormal_ideal(n)?.fiber_at(x)?;
    if !m.ideal().point_on(x) {
        return Ok(AfVerdict {
            m: m_name.to_string(),
            n: n_name.to_string(),
            point: x.to_string(),
            verdict: true,
            witness: None,
            method: AfMethod::Direct,
        });
    }
    let fa = relative_conormal_ideal(m, &f, true)?.fiber_at(x)?;
    verdict_from(m_name, n_name, x, &fa, &fb, AfMethod::Direct)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Prop43Outcome {
    Skipped { reason: String },
    Checked { containment: bool, af: bool },
}

impl Prop43Outcome {
    pub fn agree(&self) -> Option<bool> {
        match self {
            Prop43Outcome::Skipped { .. } => None,
            Prop43Outcome::Checked { containment, af } => Some(containment == af),
        }
    }
}

/// Fibre at `x` of the union of the exceptional images of the visible strata.
fn exceptional_fiber(
    f: &Polynomial,
    data: &StratifiedSheafData,
    x: &Point,
) -> Result<CovectorFiber> {
    let cot = cotangent_ring(&data.ring);
    let mut union = Ideal::unit(&cot);
    for a in data.visible_strata() {
        union = union.product(&exceptional_support(f, a)?.within_vf);
    }
    Ok(CovectorFiber {
        ideal: substitute_point(&union, &data.ring, x),
        point: x.clone(),
    })
}

/// `(π(E))_x ⊆ (P(T*_N U))_x` next to the direct a_f verdict for
/// `(X_reg, N)`. Skipped when `(X_reg, N)` fails Whitney (a) at `x` or when
/// `d_x f` is not conormal to `N`.
pub fn prop43_check(
    f: &Polynomial,
    data: &StratifiedSheafData,
    x_reg: &Variety,
    n: &Variety,
    x: &Point,
) -> Result<Prop43Outcome> {
    let f = f.to_ring(&data.ring)?;
    if !whitney_a_at(x_reg, n, x)? {
        return Ok(Prop43Outcome::Skipped {
            reason: format!("Whitney (a) fails for the regular part over {n} at {x}"),
        });
    }
    let mut pair: Vec<_> = x.coords().to_vec();
    pair.extend(f.gradient().iter().map(|d| d.eval(x.coords())));
    if !conormal_ideal(n)?.total.point_on(&Point(pair)) {
        return Ok(Prop43Outcome::Skipped {
            reason: format!("d f at {x} is not conormal to {n}"),
        });
    }
    let fe = exceptional_fiber(&f, data, x)?;
    let fn_ = conormal_ideal(n)?.fiber_at(x)?;
    let containment = fiber_contained(&fe, &fn_)?;
    let af = af_pair_check(x_reg, &f, n, x)?.verdict;
    Ok(Prop43Outcome::Checked { containment, af })
}

/// Every component of `ch_phi` over `x` has its fibre inside `(T*_M U)_x`.
/// Components are cones in the cotangent ring; `x` lies over a component
/// when its fibre there is not empty.
pub fn af_via_vanishing(
    ch_phi: &Cycle,
    f: &Polynomial,
    m: &Variety,
    x: &Point,
) -> Result<AfVerdict> {
    af_via_vanishing_named("ChPhi", ch_phi, f, &m.to_string(), m, x)
}

pub fn af_via_vanishing_named(
    label: &str,
    ch_phi: &Cycle,
    f: &Polynomial,
    m_name: &str,
    m: &Variety,
    x: &Point,
) -> Result<AfVerdict> {
    let f = f.to_ring(m.ring())?;
    if !m.vanishes(&f) {
        return Err(Error::precondition(format!("{m} is not inside V(f)")));
    }
    if !m.ideal().point_on(x) {
        return Err(Error::precondition(format!("point {x} is not on {m}")));
    }
    let fm = conormal_ideal(m)?.fiber_at(x)?;
    let mut over = Ideal::unit(fm.ideal.ring());
    for t in ch_phi.terms() {
        let fib = substitute_point(t.component.ideal(), m.ring(), x);
        if !fib.is_unit() {
            over = over.product(&fib);
        }
    }
    let fa = CovectorFiber {
        ideal: over,
        point: x.clone(),
    };
    verdict_from(label, m_name, x, &fa, &fm, AfMethod::ViaVanishing)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleDirection {
    /// `Ch(φ) = Ch(ψ) − Ch(j^*P[-1])`
    PhiFromPsi,
    /// `Ch(ψ) = Ch(φ) + Ch(j^*P[-1])`
    PsiFromPhi,
    /// `Ch(i_! i^! P) = Ch(P) − Ch(j_* j^* P)`
    ShriekFromTotal,
    /// `Ch(P) = Ch(i_! i^! P) + Ch(j_* j^* P)`
    TotalFromShriek,
}

pub fn triangle_ch(a: &Cycle, b: &Cycle, direction: TriangleDirection) -> Cycle {
    match direction {
        TriangleDirection::PhiFromPsi | TriangleDirection::ShriekFromTotal => a.sub(b),
        TriangleDirection::PsiFromPhi | TriangleDirection::TotalFromShriek => a.add(b),
    }
}

/// `|Ch(i_! i^! P)|_{⊆V(f)} = |Ch(ψ_f[-1] P)|` when both cycles are supplied.
pub fn shriek_psi_support_check(shriek: &Cycle, psi: &Cycle, f: &Polynomial) -> Result<bool> {
    let Some(first) = shriek.terms().first().or(psi.terms().first()) else {
        return Ok(true);
    };
    let base_ring = first
        .base
        .as_ref()
        .ok_or_else(|| Error::precondition("components need registered bases"))?
        .ring()
        .clone();
    let z = Ideal::new(&base_ring, vec![f.to_ring(&base_ring)?])?;
    let mut a = shriek.restrict_within(&z)?.support();
    let mut b = psi.support();
    a.sort();
    b.sort();
    Ok(a == b)
}

/// `Σ_β m_β(φ_f[-1] F) [T*_{W_β} U]` from a transfer result.
pub fn ch_phi_from_transfer(
    f: &Polynomial,
    data: &StratifiedSheafData,
    w: &VfPartition,
    seed: u64,
    retries: u32,
) -> Result<Cycle> {
    let t = betti_transfer(f, data, w, seed, retries)?;
    let mut c = Cycle::zero();
    for (beta, table) in w.strata.iter().zip(&t.tables) {
        let m = sign(data.d - beta.dim) * table.euler_char();
        if m != 0 {
            let cv = conormal_ideal(&beta.closure)?;
            c = c.plus_term(m, cv.as_variety(), Some(beta.closure.clone()));
        }
    }
    Ok(c)
}

/// Set-level `|Ch(φ_f F)|` read off the exceptional images, each with
/// coefficient one.
pub fn ch_phi_from_exceptional(f: &Polynomial, data: &StratifiedSheafData) -> Result<Cycle> {
    let mut c = Cycle::zero();
    let n = data.ring.nvars();
    for a in data.visible_strata() {
        let sup = exceptional_support(f, a)?;
        if sup.is_empty() {
            continue;
        }
        let base = Variety::new(
            &sup.within_vf
                .eliminate(&(n..2 * n).collect::<Vec<_>>())
                .to_ring(&data.ring)?,
        );
        c = c.plus_term(1, sup.variety(), Some(base));
    }
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct WhitneyVerdict {
    pub m: String,
    pub n: String,
    pub point: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cor48Entry {
    pub sheaf: String,
    pub normal: bool,
    /// `transfer` when the partition is normal, `exceptional` otherwise.
    pub ch_phi_source: String,
    pub ch_phi: Vec<(i64, Vec<String>)>,
    pub verdicts: Vec<AfVerdict>,
    /// Direct checks of the same pairs, for comparison.
    pub direct: Vec<AfVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cor48Report {
    pub entries: Vec<Cor48Entry>,
    pub whitney: Vec<WhitneyVerdict>,
    /// Verdicts hold at the supplied witness points only.
    pub quantifier: String,
}

/// For each supplied sheaf (labelled by the stratum `W_α` it comes from),
/// computes `Ch(φ_f[-1] P)` and tests a_f for `(W_α, W_β)` at every witness
/// point of every `W_β ⊆ V(f)`. Whitney (a) for the same pairs is recorded as
/// the hypothesis check.
pub fn cor48_scenario(
    f: &Polynomial,
    sheaves: &[(String, StratifiedSheafData)],
    w: &VfPartition,
    seed: u64,
    retries: u32,
) -> Result<Cor48Report> {
    let mut entries = Vec::new();
    let mut whitney = Vec::new();
    for (label, data) in sheaves {
        let normal = phi_normality_check(f, data, w)?;
        let (source, ch_phi) = if normal {
            ("transfer", ch_phi_from_transfer(f, data, w, seed, retries)?)
        } else {
            ("exceptional", ch_phi_from_exceptional(f, data)?)
        };
        let source_closure = data
            .strata
            .iter()
            .find(|s| &s.name == label)
            .map(|s| s.closure.clone())
            .ok_or_else(|| Error::validation(format!("sheaf label {label} names no stratum")))?;
        let mut verdicts = Vec::new();
        let mut direct = Vec::new();
        for beta in &w.strata {
            for x in beta.all_points() {
                verdicts.push(af_via_vanishing_named(
                    label,
                    &ch_phi,
                    f,
                    &beta.name,
                    &beta.closure,
                    &x,
                )?);
                direct.push(af_pair_named(
                    label,
                    &source_closure,
                    f,
                    &beta.name,
                    &beta.closure,
                    &x,
                )?);
            }
        }
        entries.push(Cor48Entry {
            sheaf: label.clone(),
            normal,
            ch_phi_source: source.to_string(),
            ch_phi: ch_phi
                .terms()
                .iter()
                .map(|t| (t.coefficient, t.component.generators()))
                .collect(),
            verdicts,
            direct,
        });
    }
    if let Some((_, data)) = sheaves.first() {
        for beta in &w.strata {
            for x in beta.all_points() {
                for gamma in &data.strata {
                    if gamma.closure == beta.closure || !beta.closure.is_within(&gamma.closure) {
                        continue;
                    }
                    whitney.push(WhitneyVerdict {
                        m: gamma.name.clone(),
                        n: beta.name.clone(),
                        point: x.to_string(),
                        holds: whitney_a_at(&gamma.closure, &beta.closure, &x)?,
                    });
                }
            }
        }
    }
    Ok(Cor48Report {
        entries,
        whitney,
        quantifier: "at the supplied witness points".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, Ring};
    use crate::corpus;

    #[test]
    fn direct_pairs() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        let f = parse_poly(&r, "x*y").unwrap();
        let plane = Variety::ambient(&r);
        let y_axis = Variety::parse(&r, &["x"]).unwrap();
        let v = af_pair_check(&plane, &f, &y_axis, &Point::from_i64(&r, &[0, 1])).unwrap();
        assert!(v.verdict && v.witness.is_none());
        let origin = Variety::parse(&r, &["x", "y"]).unwrap();
        assert!(
            af_pair_check(&plane, &f, &origin, &Point::origin(&r))
                .unwrap()
                .verdict
        );
        let g = parse_poly(&r, "y").unwrap();
        assert!(af_pair_check(&plane, &g, &y_axis, &Point::from_i64(&r, &[0, 1])).is_err());

        let r = Ring::rational(&["x", "y", "z"]).unwrap();
        let f = parse_poly(&r, "x^2 - z*y^2").unwrap();
        let z_axis = Variety::parse(&r, &["x", "y"]).unwrap();
        let v = af_pair_check(&Variety::ambient(&r), &f, &z_axis, &Point::origin(&r)).unwrap();
        assert!(!v.verdict);
        assert!(v.witness.unwrap().contains("w_z"));
    }

    #[test]
    fn exceptional_containment_agrees() {
        let s = corpus::xy().unwrap();
        let open = Variety::ambient(&s.ring);
        let origin = Variety::parse(&s.ring, &["x", "y"]).unwrap();
        let o = Point::origin(&s.ring);
        let out = prop43_check(&s.f, &s.data, &open, &origin, &o).unwrap();
        assert_eq!(
            out,
            Prop43Outcome::Checked {
                containment: true,
                af: true
            }
        );

        let s = corpus::smooth().unwrap();
        let line = Variety::parse(&s.ring, &["x"]).unwrap();
        let p = Point::from_i64(&s.ring, &[0, 3]);
        let out = prop43_check(&s.f, &s.data, &Variety::ambient(&s.ring), &line, &p).unwrap();
        assert_eq!(
            out,
            Prop43Outcome::Checked {
                containment: true,
                af: true
            }
        );

        let s = corpus::umbrella(false).unwrap();
        let z_axis = Variety::parse(&s.ring, &["x", "y"]).unwrap();
        let o = Point::origin(&s.ring);
        let out = prop43_check(&s.f, &s.data, &Variety::ambient(&s.ring), &z_axis, &o).unwrap();
        assert_eq!(
            out,
            Prop43Outcome::Checked {
                containment: false,
                af: false
            }
        );
    }

    #[test]
    fn via_vanishing() {
        let s = corpus::xy().unwrap();
        let ch = ch_phi_from_transfer(&s.f, &s.data, &s.vf, 5, 4).unwrap();
        let origin = Variety::parse(&s.ring, &["x", "y"]).unwrap();
        let t0 = conormal_ideal(&origin).unwrap().as_variety();
        assert_eq!(ch, Cycle::single(1, t0));
        assert!(
            af_via_vanishing(&ch, &s.f, &origin, &Point::origin(&s.ring))
                .unwrap()
                .verdict
        );
        let y_axis = Variety::parse(&s.ring, &["x"]).unwrap();
        let p = Point::from_i64(&s.ring, &[0, 1]);
        assert!(af_via_vanishing(&ch, &s.f, &y_axis, &p).unwrap().verdict);
        let off = Variety::parse(&s.ring, &["x - 1"]).unwrap();
        assert!(af_via_vanishing(&ch, &s.f, &off, &Point::from_i64(&s.ring, &[1, 0])).is_err());
    }

    #[test]
    fn triangle_arithmetic() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        let a = Variety::parse(&r, &["x"]).unwrap();
        let b = Variety::parse(&r, &["y"]).unwrap();
        let psi = Cycle::single(2, a.clone()).add(&Cycle::single(1, b.clone()));
        let j = Cycle::single(1, b.clone());
        let phi = triangle_ch(&psi, &j, TriangleDirection::PhiFromPsi);
        assert_eq!(phi, Cycle::single(2, a));
        assert_eq!(triangle_ch(&phi, &j, TriangleDirection::PsiFromPhi), psi);
        assert_eq!(
            triangle_ch(&Cycle::zero(), &j, TriangleDirection::PsiFromPhi),
            j
        );
    }

    #[test]
    fn scenarios() {
        for s in [corpus::xy().unwrap(), corpus::cusp().unwrap()] {
            let sheaves = [("open".to_string(), s.data.clone())];
            let rep = cor48_scenario(&s.f, &sheaves, &s.vf, 2, 4).unwrap();
            let e = &rep.entries[0];
            assert!(e.normal);
            assert!(e.verdicts.iter().all(|v| v.verdict), "{}", s.name);
            assert!(e.direct.iter().all(|v| v.verdict));
        }
        let s = corpus::umbrella(false).unwrap();
        let sheaves = [("open".to_string(), s.data.clone())];
        let rep = cor48_scenario(&s.f, &sheaves, &s.vf, 2, 4).unwrap();
        let e = &rep.entries[0];
        assert!(!e.normal);
        let bad: Vec<_> = e.verdicts.iter().filter(|v| !v.verdict).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].point, "(0, 0, 0)");
        assert!(rep
            .whitney
            .iter()
            .any(|w| !w.holds && w.point == "(0, 0, 0)"));
    }
}
