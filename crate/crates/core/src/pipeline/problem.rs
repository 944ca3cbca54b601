//! Problem files: JSON job descriptions with polynomials as grammar strings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, parse_rational, Field, MonomialOrder, Point, Polynomial, Ring};
use crate::charcycle::{FinAbGroup, NormalDataTable, PrimeIdeal, StratifiedSheafData, StratumSpec};
use crate::cycles::Variety;
use crate::error::{Error, Result};
use crate::vanishing::{VfPartition, VfStratum};

pub const COMMANDS: &[&str] = &[
    "ch",
    "perverse",
    "normality",
    "support",
    "transfer",
    "index-check",
    "afcheck",
    "cor48",
];

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_RETRIES: u32 = 8;

/// A group written either as a bare rank or as `{rank, torsion}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum GroupInput {
    Rank(u64),
    Group {
        #[serde(default)]
        rank: u64,
        #[serde(default)]
        torsion: Vec<u64>,
    },
}

/// A coordinate written as an integer or a rational string such as `"-3/4"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Text(String),
}

pub type TableInput = BTreeMap<String, GroupInput>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumInput {
    pub name: String,
    #[serde(default)]
    pub generators: Vec<String>,
    pub dim: i64,
    #[serde(default)]
    pub table: TableInput,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VfInput {
    pub name: String,
    pub generators: Vec<String>,
    pub dim: i64,
    #[serde(default)]
    pub witness: Option<Vec<Coord>>,
    #[serde(default)]
    pub check_points: Vec<Vec<Coord>>,
}

/// Another sheaf on the same strata, for `cor48`. Missing strata get zero
/// tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafInput {
    pub label: String,
    pub tables: BTreeMap<String, TableInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub vars: Vec<String>,
    pub f: String,
    /// Critical value `v`; the run works with `f - v`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub strata: Vec<StratumInput>,
    #[serde(default)]
    pub vf_partition: Vec<VfInput>,
    #[serde(default)]
    pub primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retries: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default)]
    pub commands: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sheaves: Vec<SheafInput>,
}

pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    if s == "rationals" || s == "Q" {
        return Ok(Field::Rational);
    }
    let p = s
        .strip_prefix("modular:")
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(|| Error::validation(format!("unknown field mode {s:?}")))?;
    if !crate::charcycle::is_prime(p) || p >= 1 << 62 {
        return Err(Error::validation(format!("{p} is not a usable prime")));
    }
    Ok(Field::Prime(p))
}

pub fn parse_point(ring: &Ring, coords: &[Coord]) -> Result<Point> {
    if coords.len() != ring.nvars() {
        return Err(Error::validation(format!(
            "point has {} coordinates, expected {}",
            coords.len(),
            ring.nvars()
        )));
    }
    let field = ring.field();
    coords
        .iter()
        .map(|c| match c {
            Coord::Int(n) => Ok(field.from_i64(*n)),
            Coord::Text(t) => field.from_rational(&parse_rational(t)?),
        })
        .collect::<Result<Vec<_>>>()
        .map(Point)
}

pub fn parse_table(t: &TableInput) -> Result<NormalDataTable> {
    let mut entries = Vec::new();
    for (k, g) in t {
        let j: i64 = k
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("table degree {k:?} is not an integer")))?;
        let g = match g {
            GroupInput::Rank(r) => FinAbGroup::free(*r),
            GroupInput::Group { rank, torsion } => FinAbGroup::new(*rank, torsion)?,
        };
        entries.push((j, g));
    }
    Ok(NormalDataTable::from_entries(entries))
}

/// Everything the commands need, built and validated from a [`Problem`].
#[derive(Clone, Debug)]
pub struct Instance {
    pub ring: Ring,
    pub f: Polynomial,
    pub data: StratifiedSheafData,
    pub vf: VfPartition,
    pub sheaves: Vec<(String, StratifiedSheafData)>,
    pub commands: Vec<String>,
    pub seed: u64,
    pub retries: u32,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Problem> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            offset: 0,
            message: format!("problem file: {e}"),
        })
    }

    pub fn load(path: &Path) -> Result<Problem> {
        Problem::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn field(&self) -> Result<Field> {
        parse_field(self.field.as_deref().unwrap_or("rationals"))
    }

    pub fn commands(&self) -> Result<Vec<String>> {
        if self.commands.is_empty() {
            return Ok(COMMANDS.iter().map(|s| s.to_string()).collect());
        }
        for c in &self.commands {
            if !COMMANDS.contains(&c.as_str()) {
                return Err(Error::validation(format!("unknown command {c:?}")));
            }
        }
        Ok(self.commands.clone())
    }

    /// Builds the instance over `field`, with the problem's seed and retries
    /// unless overridden.
    pub fn instantiate(
        &self,
        field: Field,
        seed: Option<u64>,
        retries: Option<u32>,
    ) -> Result<Instance> {
        let ring = Ring::new(&self.vars, field, MonomialOrder::GrevLex)?;
        let mut f = parse_poly(&ring, &self.f)?;
        if let Some(v) = &self.value {
            let v = field.from_rational(&parse_rational(v)?)?;
            f = f.sub(&Polynomial::constant(&ring, v));
        }
        if self.strata.is_empty() {
            return Err(Error::validation("strata list is empty"));
        }
        let mut strata = Vec::new();
        for s in &self.strata {
            let closure = Variety::parse(&ring, &s.generators)?;
            check_dim(&s.name, s.dim, &closure)?;
            strata.push(StratumSpec::new(&s.name, closure, parse_table(&s.table)?)?);
        }
        let primes = self
            .primes
            .iter()
            .map(|&p| PrimeIdeal::new(p))
            .collect::<Result<Vec<_>>>()?;
        let data = StratifiedSheafData::new(&ring, strata, primes)?;

        let mut vf_strata = Vec::new();
        for w in &self.vf_partition {
            let closure = Variety::parse(&ring, &w.generators)?;
            check_dim(&w.name, w.dim, &closure)?;
            let witness = w
                .witness
                .as_ref()
                .map(|c| parse_point(&ring, c))
                .transpose()?;
            let points = w
                .check_points
                .iter()
                .map(|c| parse_point(&ring, c))
                .collect::<Result<Vec<_>>>()?;
            vf_strata.push(VfStratum::new(&w.name, closure, witness)?.with_check_points(points)?);
        }
        let vf = VfPartition::new(&f, vf_strata)?;

        let sheaves = if self.sheaves.is_empty() {
            let top = data
                .strata
                .iter()
                .max_by_key(|s| s.dim)
                .map(|s| s.name.clone())
                .unwrap();
            vec![(top, data.clone())]
        } else {
            self.sheaves
                .iter()
                .map(|sh| Ok((sh.label.clone(), sheaf_from(&data, sh)?)))
                .collect::<Result<Vec<_>>>()?
        };

        Ok(Instance {
            ring,
            f,
            data,
            vf,
            sheaves,
            commands: self.commands()?,
            seed: seed.or(self.seed).unwrap_or(DEFAULT_SEED),
            retries: retries.or(self.retries).unwrap_or(DEFAULT_RETRIES),
        })
    }
}

fn check_dim(name: &str, dim: i64, v: &Variety) -> Result<()> {
    if v.dim() != dim {
        return Err(Error::validation(format!(
            "stratum {name} declares dimension {dim} but its closure has dimension {}",
            v.dim()
        )));
    }
    Ok(())
}

fn sheaf_from(data: &StratifiedSheafData, sh: &SheafInput) -> Result<StratifiedSheafData> {
    for name in sh.tables.keys() {
        if !data.strata.iter().any(|s| &s.name == name) {
            return Err(Error::validation(format!(
                "sheaf {} names unknown stratum {name}",
                sh.label
            )));
        }
    }
    let strata = data
        .strata
        .iter()
        .map(|s| {
            let t = match sh.tables.get(&s.name) {
                Some(t) => parse_table(t)?,
                None => NormalDataTable::zero(),
            };
            Ok(s.with_table(t))
        })
        .collect::<Result<Vec<_>>>()?;
    StratifiedSheafData::new(&data.ring, strata, data.primes.clone())
}
