//! Formal integer combinations of varieties.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{Ideal, Polynomial, Ring};
use crate::error::{Error, Result};

/// A variety given by a reduced ideal. Reducedness and irreducibility are
/// trusted, not checked. Equality compares reduced grevlex bases.
#[derive(Clone)]
pub struct Variety {
    ideal: Ideal,
    dim: i64,
    key: String,
}

impl Variety {
    pub fn new(ideal: &Ideal) -> Variety {
        let ideal = ideal.canonical();
        let dim = ideal.krull_dim();
        let key = format!(
            "{}|{}",
            ideal.ring().vars().join(","),
            ideal.gb().printed().join(";")
        );
        Variety { ideal, dim, key }
    }

    pub fn parse<S: AsRef<str>>(ring: &Ring, gens: &[S]) -> Result<Variety> {
        Ok(Variety::new(&Ideal::parse(ring, gens)?))
    }

    pub fn ambient(ring: &Ring) -> Variety {
        Variety::new(&Ideal::zero(ring))
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn ring(&self) -> &Ring {
        self.ideal.ring()
    }

    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim < 0
    }

    /// Printed reduced basis, the canonical serialization.
    pub fn generators(&self) -> Vec<String> {
        self.ideal.gb().printed()
    }

    pub fn canonical_key(&self) -> &str {
        &self.key
    }

    /// `self ⊆ other` by ideal inclusion of the reduced ideals.
    pub fn is_within(&self, other: &Variety) -> bool {
        self.ideal.contains_ideal(&other.ideal)
    }

    /// `f` vanishes on the variety (radical membership, so exact even for
    /// slightly nonreduced input).
    pub fn vanishes(&self, f: &Polynomial) -> bool {
        self.ideal.radical_contains(f)
    }
}

impl PartialEq for Variety {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Variety {}

impl PartialOrd for Variety {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Variety {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl std::hash::Hash for Variety {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl fmt::Debug for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V({})", self.generators().join(", "))
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct CycleTerm {
    pub coefficient: i64,
    pub component: Variety,
    /// Base variety in `z`, registered for conormal-type components.
    pub base: Option<Variety>,
}

/// Finite integer combination of distinct varieties, kept sorted with no zero
/// coefficients.
#[derive(Clone, Debug, Default)]
pub struct Cycle {
    terms: Vec<CycleTerm>,
}

impl Cycle {
    pub fn zero() -> Cycle {
        Cycle::default()
    }

    pub fn single(coefficient: i64, component: Variety) -> Cycle {
        Cycle::zero().plus_term(coefficient, component, None)
    }

    pub fn single_based(coefficient: i64, component: Variety, base: Variety) -> Cycle {
        Cycle::zero().plus_term(coefficient, component, Some(base))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = CycleTerm>) -> Cycle {
        let mut c = Cycle::zero();
        for t in terms {
            c = c.plus_term(t.coefficient, t.component, t.base);
        }
        c
    }

    /// Adds `coefficient · [component]`. A registered base is kept from
    /// whichever term supplies one.
    pub fn plus_term(
        mut self,
        coefficient: i64,
        component: Variety,
        base: Option<Variety>,
    ) -> Cycle {
        match self.terms.binary_search_by(|t| t.component.cmp(&component)) {
            Ok(i) => {
                self.terms[i].coefficient += coefficient;
                if self.terms[i].base.is_none() {
                    self.terms[i].base = base;
                }
                if self.terms[i].coefficient == 0 {
                    self.terms.remove(i);
                }
            }
            Err(i) => {
                if coefficient != 0 {
                    self.terms.insert(
                        i,
                        CycleTerm {
                            coefficient,
                            component,
                            base,
                        },
                    );
                }
            }
        }
        self
    }

    pub fn terms(&self) -> &[CycleTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Cycle) -> Cycle {
        let mut out = self.clone();
        for t in &other.terms {
            out = out.plus_term(t.coefficient, t.component.clone(), t.base.clone());
        }
        out
    }

    pub fn scale(&self, k: i64) -> Cycle {
        if k == 0 {
            return Cycle::zero();
        }
        Cycle {
            terms: self
                .terms
                .iter()
                .map(|t| CycleTerm {
                    coefficient: t.coefficient * k,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> Cycle {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Cycle) -> Cycle {
        self.add(&other.neg())
    }

    pub fn coefficient_of(&self, v: &Variety) -> i64 {
        self.terms
            .binary_search_by(|t| t.component.cmp(v))
            .map(|i| self.terms[i].coefficient)
            .unwrap_or(0)
    }

    pub fn support(&self) -> Vec<Variety> {
        self.terms.iter().map(|t| t.component.clone()).collect()
    }

    /// Keeps the components whose base lies in `V(z)`.
    pub fn restrict_within(&self, z: &Ideal) -> Result<Cycle> {
        let mut out = Cycle::zero();
        for t in &self.terms {
            let base = t.base.as_ref().ok_or_else(|| {
                Error::precondition(format!("component {} has no registered base", t.component))
            })?;
            if base.ideal().contains_ideal(&z.to_ring(base.ring())?) {
                out = out.plus_term(t.coefficient, t.component.clone(), t.base.clone());
            }
        }
        Ok(out)
    }
}

impl PartialEq for Cycle {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|(a, b)| a.coefficient == b.coefficient && a.component == b.component)
    }
}

impl Eq for Cycle {}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{}*[{}]", t.coefficient, t.component))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: &Ring, gens: &[&str]) -> Variety {
        Variety::parse(r, gens).unwrap()
    }

    #[test]
    fn coefficients_and_cancellation() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        let c = Cycle::single(2, v(&r, &["x"])).add(&Cycle::single(3, v(&r, &["y"])));
        assert_eq!(c.coefficient_of(&v(&r, &["x"])), 2);
        assert_eq!(c.coefficient_of(&v(&r, &["x + y"])), 0);
        let z = Cycle::single(2, v(&r, &["x"])).add(&Cycle::single(-2, v(&r, &["2*x"])));
        assert!(z.is_zero());
        assert!(z.support().is_empty());
    }

    #[test]
    fn restriction_by_base() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        let whole = Variety::ambient(&r);
        let origin = v(&r, &["x", "y"]);
        let omega = Cycle::single_based(1, v(&r, &["x - 1"]), whole).add(&Cycle::single_based(
            1,
            v(&r, &["y - 1"]),
            origin.clone(),
        ));
        let point = omega
            .restrict_within(&Ideal::parse(&r, &["x", "y"]).unwrap())
            .unwrap();
        assert_eq!(point.support(), vec![v(&r, &["y - 1"])]);
        assert_eq!(omega.restrict_within(&Ideal::zero(&r)).unwrap(), omega);
        assert!(Cycle::single(1, origin)
            .restrict_within(&Ideal::zero(&r))
            .is_err());
    }

    #[test]
    fn variety_equality_is_canonical() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        assert_eq!(v(&r, &["x + y", "x - y"]), v(&r, &["x", "y"]));
        assert_eq!(v(&r, &["x*y"]).dim(), 1);
    }
}
