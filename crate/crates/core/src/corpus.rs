//! Small bundled scenarios used by the tests, the acceptance suite, the CLI
//! and the Python bindings.

use crate::algebra::{parse_poly, Point, Polynomial, Ring};
use crate::charcycle::{NormalDataTable, PrimeIdeal, StratifiedSheafData, StratumSpec};
use crate::cycles::Variety;
use crate::error::Result;
use crate::vanishing::{VfPartition, VfStratum};

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub ring: Ring,
    pub f: Polynomial,
    pub data: StratifiedSheafData,
    pub vf: VfPartition,
}

fn stratum(r: &Ring, name: &str, gens: &[&str], table: &[(i64, u64)]) -> Result<StratumSpec> {
    StratumSpec::new(name, Variety::parse(r, gens)?, NormalDataTable::free(table))
}

fn vf(r: &Ring, name: &str, gens: &[&str], witness: Option<&[i64]>) -> Result<VfStratum> {
    VfStratum::new(
        name,
        Variety::parse(r, gens)?,
        witness.map(|c| Point::from_i64(r, c)),
    )
}

fn constant_sheaf(r: &Ring) -> Result<StratifiedSheafData> {
    let open = StratumSpec::new(
        "open",
        Variety::ambient(r),
        NormalDataTable::free(&[(0, 1)]),
    )?;
    StratifiedSheafData::new(r, vec![open], vec![PrimeIdeal(2), PrimeIdeal(3)])
}

fn plane() -> Ring {
    Ring::rational(&["x", "y"]).expect("valid names")
}

/// `f = xy` on the plane, partition `{x-axis∖0, y-axis∖0, 0}`.
pub fn xy() -> Result<Scenario> {
    let r = plane();
    let f = parse_poly(&r, "x*y")?;
    let vf = VfPartition::new(
        &f,
        vec![
            vf(&r, "x-axis", &["y"], Some(&[1, 0]))?,
            vf(&r, "y-axis", &["x"], Some(&[0, 1]))?,
            vf(&r, "origin", &["x", "y"], None)?,
        ],
    )?;
    Ok(Scenario {
        name: "xy".into(),
        data: constant_sheaf(&r)?,
        ring: r,
        f,
        vf,
    })
}

/// `f = x^a + y^b` with the constant sheaf. The curve stratum is listed only
/// when it has a rational point off the origin.
pub fn brieskorn(a: u32, b: u32) -> Result<Scenario> {
    let r = plane();
    let src = format!("x^{a} + y^{b}");
    let f = parse_poly(&r, &src)?;
    let witness: Option<[i64; 2]> = if a % 2 == 1 {
        Some([-1, 1])
    } else if b % 2 == 1 {
        Some([1, -1])
    } else {
        None
    };
    let mut strata = Vec::new();
    if let Some(w) = witness {
        strata.push(vf(&r, "curve", &[&src], Some(&w))?);
    }
    strata.push(vf(&r, "origin", &["x", "y"], None)?);
    let vf = VfPartition::new(&f, strata)?;
    Ok(Scenario {
        name: format!("brieskorn-{a}-{b}"),
        data: constant_sheaf(&r)?,
        ring: r,
        f,
        vf,
    })
}

pub fn cusp() -> Result<Scenario> {
    let mut s = brieskorn(2, 3)?;
    s.name = "cusp".into();
    Ok(s)
}

/// `f = x`, a submersion.
pub fn smooth() -> Result<Scenario> {
    let r = plane();
    let f = parse_poly(&r, "x")?;
    let vf = VfPartition::new(&f, vec![vf(&r, "line", &["x"], Some(&[0, 1]))?])?;
    Ok(Scenario {
        name: "smooth".into(),
        data: constant_sheaf(&r)?,
        ring: r,
        f,
        vf,
    })
}

/// `f = xy` with the sheaf `Z ⊕ Z_{V(x)}`: `f` vanishes on the second stratum.
pub fn zero_stratum() -> Result<Scenario> {
    let mut s = xy()?;
    let r = s.ring.clone();
    let data = StratifiedSheafData::new(
        &r,
        vec![
            stratum(&r, "open", &[], &[(0, 1)])?,
            stratum(&r, "line", &["x"], &[(0, 1)])?,
        ],
        vec![PrimeIdeal(2)],
    )?;
    s.name = "zero-stratum".into();
    s.data = data;
    Ok(s)
}

/// Whitney umbrella `x^2 - z y^2` in 3-space with the constant sheaf on the
/// ambient space. With `whitney = false` the handle is one stratum and the
/// pair (sheet, handle) fails Whitney (a) at the origin, which is supplied
/// as a check point.
pub fn umbrella(whitney: bool) -> Result<Scenario> {
    let r = Ring::rational(&["x", "y", "z"]).expect("valid names");
    let src = "x^2 - z*y^2";
    let f = parse_poly(&r, src)?;
    let mut strata = vec![
        stratum(&r, "open", &[], &[(0, 1)])?,
        stratum(&r, "sheet", &[src], &[])?,
        stratum(&r, "handle", &["x", "y"], &[])?,
    ];
    if whitney {
        strata.push(stratum(&r, "origin", &["x", "y", "z"], &[])?);
    }
    let data = StratifiedSheafData::new(&r, strata, vec![PrimeIdeal(2)])?;
    let mut w = vec![
        vf(&r, "sheet", &[src], Some(&[1, 1, 1]))?,
        vf(&r, "handle", &["x", "y"], Some(&[0, 0, 1]))?,
    ];
    if whitney {
        w.push(vf(&r, "origin", &["x", "y", "z"], None)?);
    } else {
        w[1] = w[1].clone().with_check_points(vec![Point::origin(&r)])?;
    }
    let vf = VfPartition::new(&f, w)?;
    Ok(Scenario {
        name: if whitney {
            "umbrella"
        } else {
            "umbrella-coarse"
        }
        .into(),
        ring: r,
        f,
        data,
        vf,
    })
}

/// Every bundled scenario by name.
pub fn by_name(name: &str) -> Option<Result<Scenario>> {
    Some(match name {
        "xy" => xy(),
        "cusp" => cusp(),
        "smooth" => smooth(),
        "zero-stratum" => zero_stratum(),
        "umbrella" => umbrella(true),
        "umbrella-coarse" => umbrella(false),
        _ => {
            let rest = name.strip_prefix("brieskorn-")?;
            let (a, b) = rest.split_once('-')?;
            brieskorn(a.parse().ok()?, b.parse().ok()?)
        }
    })
}

pub const NAMES: &[&str] = &[
    "xy",
    "cusp",
    "smooth",
    "zero-stratum",
    "brieskorn-3-4",
    "umbrella",
    "umbrella-coarse",
];
