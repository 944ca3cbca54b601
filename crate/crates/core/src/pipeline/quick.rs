//! Single-shot wrappers behind the `mu`, `polar`, `conormal` and `afpair`
//! subcommands. Variables default to the identifiers of the inputs in order
//! of first appearance.

use serde::Serialize;

use crate::afcheck::{af_pair_check, AfVerdict};
use crate::algebra::{identifiers, parse_poly, Field, MonomialOrder, Point, Ring};
use crate::conormal::conormal_ideal;
use crate::cycles::Variety;
use crate::error::Result;
use crate::pipeline::cycle_out;
use crate::pipeline::problem::{parse_point, Coord};
use crate::polar::{linear_form, point_coefficient, polar_curve, PointCoefficient};

use super::CycleTermOut;

/// Splits a `;`-separated generator list; blank entries are dropped.
pub fn split_generators(src: &str) -> Vec<String> {
    src.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

pub fn ring_for(vars: Option<&[String]>, sources: &[&str]) -> Result<Ring> {
    let names: Vec<String> = match vars {
        Some(v) if !v.is_empty() => v.to_vec(),
        _ => {
            let mut out: Vec<String> = Vec::new();
            for s in sources {
                for id in identifiers(s) {
                    if !out.contains(&id) {
                        out.push(id);
                    }
                }
            }
            out
        }
    };
    Ring::new(&names, Field::Rational, MonomialOrder::GrevLex)
}

pub fn parse_coords(src: &str) -> Vec<Coord> {
    src.split(',')
        .map(|c| Coord::Text(c.trim().to_string()))
        .collect()
}

/// Exceptional coefficient of `f` on the ambient space at `x` (the origin by
/// default); the Milnor number for isolated singularities.
pub fn mu(
    f: &str,
    vars: Option<&[String]>,
    point: Option<&str>,
    seed: u64,
    retries: u32,
) -> Result<PointCoefficient> {
    let ring = ring_for(vars, &[f])?;
    let fp = parse_poly(&ring, f)?;
    let x = match point {
        Some(p) => parse_point(&ring, &parse_coords(p))?,
        None => Point::origin(&ring),
    };
    point_coefficient(&fp, &Variety::ambient(&ring), &x, seed, retries)
}

#[derive(Debug, Serialize)]
pub struct PolarOut {
    pub ideal: Vec<String>,
    pub cycle: Vec<CycleTermOut>,
    pub linear: String,
}

/// Polar curve of `f` on `V(stratum)` (the ambient space when empty)
/// relative to the linear form `l`.
pub fn polar(f: &str, l: &str, stratum: &str, vars: Option<&[String]>) -> Result<PolarOut> {
    let ring = ring_for(vars, &[f, l, stratum])?;
    let s = Variety::parse(&ring, &split_generators(stratum))?;
    let lp = parse_poly(&ring, l)?;
    let fp = parse_poly(&ring, f)?;
    let g = polar_curve(&fp, &s, &lp)?;
    Ok(PolarOut {
        ideal: g.ideal.gb().printed(),
        cycle: cycle_out(&g.cycle),
        linear: g.linear.to_string(),
    })
}

/// Linear form from integer coefficients, for callers that draw their own.
pub fn linear(ring: &Ring, coefficients: &[i64]) -> String {
    linear_form(ring, coefficients).to_string()
}

#[derive(Debug, Serialize)]
pub struct ConormalOut {
    pub ring: Vec<String>,
    pub generators: Vec<String>,
    pub dim: i64,
}

pub fn conormal(generators: &str, vars: Option<&[String]>) -> Result<ConormalOut> {
    let ring = ring_for(vars, &[generators])?;
    let v = Variety::parse(&ring, &split_generators(generators))?;
    let c = conormal_ideal(&v)?;
    Ok(ConormalOut {
        ring: c.ring().vars().to_vec(),
        generators: c.total.gb().printed(),
        dim: c.dim(),
    })
}

pub fn afpair(
    m: &str,
    f: &str,
    n: &str,
    point: &str,
    vars: Option<&[String]>,
) -> Result<AfVerdict> {
    let ring = ring_for(vars, &[m, f, n])?;
    let mv = Variety::parse(&ring, &split_generators(m))?;
    let nv = Variety::parse(&ring, &split_generators(n))?;
    let fp = parse_poly(&ring, f)?;
    let x = parse_point(&ring, &parse_coords(point))?;
    af_pair_check(&mv, &fp, &nv, &x)
}
