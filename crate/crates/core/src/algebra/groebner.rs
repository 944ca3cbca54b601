//! Buchberger's algorithm with the normal selection strategy and the
//! Gebauer–Möller pair criteria.

use std::cmp::Ordering;

use super::monomial::{self, Monomial};
use super::poly::Polynomial;
use super::ring::Ring;

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Engine {
    ring: Ring,
    polys: Vec<Polynomial>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

/// Reduces the leading term of `p` until it is irreducible modulo `basis`.
fn top_reduce(p: &Polynomial, basis: &[&Polynomial]) -> Polynomial {
    let mut rest = p.clone();
    while let Some(lm) = rest.lm() {
        match basis
            .iter()
            .find(|g| monomial::divides(g.lm().unwrap(), lm))
        {
            Some(g) => {
                let q = monomial::quotient(lm, g.lm().unwrap());
                let c = rest.lc().unwrap().div(g.lc().unwrap());
                rest.sub_mul_term(&q, &c, g);
            }
            None => break,
        }
    }
    rest
}

/// Full reduction of `p` modulo `basis` (every element assumed monic).
pub(crate) fn reduce(p: &Polynomial, basis: &[&Polynomial]) -> Polynomial {
    let ring = p.ring().clone();
    let mut rest = p.clone();
    let mut rem = Polynomial::zero(&ring);
    while let Some(lm) = rest.lm() {
        match basis
            .iter()
            .find(|g| monomial::divides(g.lm().unwrap(), lm))
        {
            Some(g) => {
                let q = monomial::quotient(lm, g.lm().unwrap());
                let c = rest.lc().unwrap().div(g.lc().unwrap());
                rest.sub_mul_term(&q, &c, g);
            }
            None => {
                let (m, c) = rest.take_leading().unwrap();
                rem.push_smallest(m, c);
            }
        }
    }
    rem
}

impl Engine {
    fn lm(&self, i: usize) -> &Monomial {
        self.polys[i].lm().unwrap()
    }

    fn active_refs(&self) -> Vec<&Polynomial> {
        self.active.iter().map(|&i| &self.polys[i]).collect()
    }

    fn spoly(&self, i: usize, j: usize, lcm: &[u32]) -> Polynomial {
        let (a, b) = (&self.polys[i], &self.polys[j]);
        let ua = monomial::quotient(lcm, a.lm().unwrap());
        let ub = monomial::quotient(lcm, b.lm().unwrap());
        let ca = a.lc().unwrap().inv();
        let cb = b.lc().unwrap().inv();
        a.mul_term(&ua, &ca).sub(&b.mul_term(&ub, &cb))
    }

    /// Gebauer–Möller installation of a new basis element.
    fn update(&mut self, h: Polynomial) {
        let k = self.polys.len();
        let lh = h.lm().unwrap().clone();
        self.polys.push(h);

        let cands: Vec<(usize, Monomial)> = self
            .active
            .iter()
            .map(|&g| (g, monomial::lcm(self.lm(g), &lh)))
            .collect();
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        for (idx, (g, l)) in cands.iter().enumerate() {
            let copr = monomial::coprime(self.lm(*g), &lh);
            let dominated = cands[idx + 1..]
                .iter()
                .chain(kept.iter())
                .any(|(_, l2)| monomial::divides(l2, l));
            if copr || !dominated {
                kept.push((*g, l.clone()));
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|(g, _)| !monomial::coprime(self.lm(*g), &lh))
            .map(|(g, l)| Pair { i: g, j: k, lcm: l })
            .collect();

        let polys = &self.polys;
        self.pairs.retain(|p| {
            !monomial::divides(&lh, &p.lcm)
                || monomial::lcm(polys[p.i].lm().unwrap(), &lh) == p.lcm
                || monomial::lcm(polys[p.j].lm().unwrap(), &lh) == p.lcm
        });
        self.pairs.extend(new_pairs);

        let polys = &self.polys;
        self.active
            .retain(|&g| !monomial::divides(&lh, polys[g].lm().unwrap()));
        self.active.push(k);
    }

    fn select(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.ring.order();
        let mut best = 0;
        for (idx, p) in self.pairs.iter().enumerate().skip(1) {
            if order.cmp(&p.lcm, &self.pairs[best].lcm) == Ordering::Less {
                best = idx;
            }
        }
        Some(self.pairs.swap_remove(best))
    }
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens` under
/// the order of `ring`; output is monic and sorted by increasing leading monomial.
pub(crate) fn reduced_basis(ring: &Ring, gens: &[Polynomial]) -> Vec<Polynomial> {
    let mut eng = Engine {
        ring: ring.clone(),
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };
    let mut input: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    input.sort_by(|a, b| ring.order().cmp(a.lm().unwrap(), b.lm().unwrap()));
    for g in input {
        let h = reduce(&g, &eng.active_refs());
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return vec![Polynomial::one(ring)];
        }
        eng.update(h.monic());
    }
    while let Some(pair) = eng.select() {
        let s = eng.spoly(pair.i, pair.j, &pair.lcm);
        let h = top_reduce(&s, &eng.active_refs());
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return vec![Polynomial::one(ring)];
        }
        eng.update(h.monic());
    }

    let mut basis: Vec<Polynomial> = eng.active.iter().map(|&i| eng.polys[i].clone()).collect();
    basis.sort_by(|a, b| ring.order().cmp(a.lm().unwrap(), b.lm().unwrap()));
    for i in 0..basis.len() {
        let lead = Polynomial::monomial(ring, basis[i].lm().unwrap().clone(), ring.field().one());
        let tail = basis[i].sub(&lead);
        let others: Vec<&Polynomial> = basis
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p)
            .collect();
        let tail = reduce(&tail, &others);
        basis[i] = lead.add(&tail);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::MonomialOrder;

    fn basis_strings(ring: &Ring, gens: &[&str]) -> Vec<String> {
        let polys: Vec<Polynomial> = gens.iter().map(|g| parse_poly(ring, g).unwrap()).collect();
        reduced_basis(ring, &polys)
            .iter()
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn lex_hand_example() {
        let r = Ring::new(
            &["x", "y"],
            crate::algebra::Field::Rational,
            MonomialOrder::Lex,
        )
        .unwrap();
        // x(xy - 1) - y(x^2 - 1) = y - x
        assert_eq!(
            basis_strings(&r, &["x^2 - 1", "x*y - 1"]),
            vec!["y^2 - 1", "x - y"]
        );
    }

    #[test]
    fn trivial_ideals() {
        let r = Ring::rational(&["x", "y"]).unwrap();
        assert!(basis_strings(&r, &[]).is_empty());
        assert_eq!(basis_strings(&r, &["0"]), Vec::<String>::new());
        assert_eq!(basis_strings(&r, &["1"]), vec!["1"]);
        assert_eq!(basis_strings(&r, &["x", "x - 3"]), vec!["1"]);
    }

    #[test]
    fn twisted_cubic() {
        let r = Ring::rational(&["x", "y", "z"]).unwrap();
        let b = basis_strings(&r, &["y - x^2", "z - x^3"]);
        assert_eq!(b, vec!["y^2 - x*z", "x*y - z", "x^2 - y"]);
    }
}
