use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;

use super::monomial::{self, Monomial};
use super::ring::Ring;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial. Terms are sorted in descending order under
/// the ring's active monomial order and never carry zero coefficients.
#[derive(Clone)]
pub struct Polynomial {
    ring: Ring,
    terms: Vec<(Monomial, Scalar)>,
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Scalar) -> Self {
        let mut p = Polynomial::zero(ring);
        if !c.is_zero() {
            p.terms.push((vec![0; ring.nvars()], c));
        }
        p
    }

    pub fn one(ring: &Ring) -> Self {
        Polynomial::constant(ring, ring.field().one())
    }

    pub fn from_i64(ring: &Ring, c: i64) -> Self {
        Polynomial::constant(ring, ring.field().from_i64(c))
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        let mut m = vec![0; ring.nvars()];
        m[i] = 1;
        Polynomial {
            ring: ring.clone(),
            terms: vec![(m, ring.field().one())],
        }
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Self> {
        ring.index_of(name)
            .map(|i| Polynomial::var(ring, i))
            .ok_or_else(|| Error::validation(format!("unknown variable {name:?}")))
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.len(), ring.nvars());
        let mut p = Polynomial::zero(ring);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(ring: &Ring, mut terms: Vec<(Monomial, Scalar)>) -> Self {
        let order = ring.order().clone();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = last.1.add(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial {
            ring: ring.clone(),
            terms: out,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn lc(&self) -> Option<&Scalar> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| monomial::degree(m)).max()
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m[var] > 0)
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .iter()
            .find(|(m, _)| m.iter().all(|&e| e == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.ring.field().zero())
    }

    fn check_ring(&self, other: &Polynomial) {
        assert!(
            self.ring == other.ring,
            "polynomials from different rings: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        self.check_ring(other);
        let order = self.ring.order();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match order.cmp(ma, mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), if negate { cb.neg() } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca.sub(cb) } else { ca.add(cb) };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(
            other.terms[j..]
                .iter()
                .map(|(m, c)| (m.clone(), if negate { c.neg() } else { c.clone() })),
        );
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, true)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), d.mul(c)))
                .collect(),
        }
    }

    /// `c * x^m * self`; multiplying by a monomial preserves term order.
    pub fn mul_term(&self, m: &[u32], c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(n, d)| (monomial::product(n, m), d.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.check_ring(other);
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Polynomial::zero(&self.ring);
        for (m, c) in &small.terms {
            acc = acc.add(&big.mul_term(m, c));
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut r = Polynomial::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.lc() {
            Some(c) if !c.is_one() => self.scale(&c.inv()),
            _ => self.clone(),
        }
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let f = self.ring.field();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[var] > 0)
            .map(|(m, c)| {
                let mut n = m.clone();
                n[var] -= 1;
                (n, c.mul(&f.from_i64(m[var] as i64)))
            })
            .collect();
        Polynomial::from_terms(&self.ring, terms)
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.ring.nvars()).map(|i| self.derivative(i)).collect()
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.ring.nvars());
        let mut acc = self.ring.field().zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    t = t.mul(&x.pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Replaces each variable `i` with `images[i]` (polynomials of a target ring).
    pub fn compose(&self, target: &Ring, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.ring.nvars());
        let maxdeg: Vec<u32> = (0..self.ring.nvars()).map(|i| self.degree_in(i)).collect();
        let mut powers: Vec<Vec<Polynomial>> = Vec::with_capacity(images.len());
        for (i, img) in images.iter().enumerate() {
            let mut v = vec![Polynomial::one(target)];
            for k in 1..=maxdeg[i] as usize {
                let next = v[k - 1].mul(img);
                v.push(next);
            }
            powers.push(v);
        }
        let mut acc = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Re-expresses the polynomial in `target`, matching variables by name.
    /// Fails if a variable that actually occurs is missing from `target`.
    pub fn to_ring(&self, target: &Ring) -> Result<Polynomial> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        if self.ring.field() != target.field() {
            return Err(Error::RingMismatch("coefficient fields differ".into()));
        }
        let map: Vec<Option<usize>> = self
            .ring
            .vars()
            .iter()
            .map(|v| target.index_of(v))
            .collect();
        let n = target.nvars();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut out = vec![0; n];
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => out[j] = e,
                    None => {
                        return Err(Error::RingMismatch(format!(
                            "variable {} not in target ring",
                            self.ring.vars()[i]
                        )))
                    }
                }
            }
            terms.push((out, c.clone()));
        }
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Reduces rational coefficients into the field of `target`, which must
    /// have the same variables.
    pub fn to_field(&self, target: &Ring) -> Result<Polynomial> {
        if self.ring.vars() != target.vars() {
            return Err(Error::RingMismatch(
                "field change needs identical variables".into(),
            ));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let q: &BigRational = c.as_rational().ok_or_else(|| {
                    Error::RingMismatch("field change needs rational input".into())
                })?;
                Ok((m.clone(), target.field().from_rational(q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Substitutes the given values for some variables, keeping the others.
    pub fn partial_eval(&self, values: &[Option<Scalar>]) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mono = m.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(x) = v {
                    if mono[i] > 0 {
                        coeff = coeff.mul(&x.pow(mono[i]));
                        mono[i] = 0;
                    }
                }
            }
            terms.push((mono, coeff));
        }
        Polynomial::from_terms(&self.ring, terms)
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.check_ring(divisor);
        let (dlm, dlc) = (divisor.lm()?.clone(), divisor.lc()?.clone());
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some(lm) = rem.lm().cloned() {
            if !monomial::divides(&dlm, &lm) {
                return None;
            }
            let q = monomial::quotient(&lm, &dlm);
            let c = rem.lc().unwrap().div(&dlc);
            rem = rem.sub(&divisor.mul_term(&q, &c));
            quot.push((q, c));
        }
        Some(Polynomial::from_terms(&self.ring, quot))
    }

    /// In-place `self -= c * x^m * g`, the reduction step of normal forms.
    pub(crate) fn sub_mul_term(&mut self, m: &[u32], c: &Scalar, g: &Polynomial) {
        let shifted = g.mul_term(m, c);
        *self = self.sub(&shifted);
    }

    pub(crate) fn take_leading(&mut self) -> Option<(Monomial, Scalar)> {
        if self.terms.is_empty() {
            None
        } else {
            Some(self.terms.remove(0))
        }
    }

    pub(crate) fn push_smallest(&mut self, m: Monomial, c: Scalar) {
        debug_assert!(self
            .terms
            .last()
            .is_none_or(|(l, _)| self.ring.order().cmp(l, &m) == Ordering::Greater));
        self.terms.push((m, c));
    }

    /// Canonical key for sorting and hashing independent of the active order.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_space(&other.ring) && self.terms_sorted_eq(other)
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    fn terms_sorted_eq(&self, other: &Polynomial) -> bool {
        if self.ring.order() == other.ring.order() {
            return self.terms == other.terms;
        }
        let mut a = self.terms.clone();
        let mut b = other.terms.clone();
        a.sort();
        b.sort();
        a == b
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.ring.vars();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = m.iter().all(|&e| e == 0);
            let mut wrote = false;
            if is_const || !abs.is_one() {
                write!(f, "{abs}")?;
                wrote = true;
            }
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "{}", vars[i])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}
