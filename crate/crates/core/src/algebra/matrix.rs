//! Polynomial matrices and their minors.

use std::collections::HashMap;

use super::poly::Polynomial;
use super::ring::Ring;

#[derive(Clone, Debug)]
pub struct PolyMatrix {
    ring: Ring,
    rows: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn new(ring: &Ring, rows: Vec<Vec<Polynomial>>) -> PolyMatrix {
        if let Some(first) = rows.first() {
            assert!(rows.iter().all(|r| r.len() == first.len()), "ragged matrix");
        }
        PolyMatrix {
            ring: ring.clone(),
            rows,
        }
    }

    /// Jacobian matrix of `polys` with respect to every variable of the ring.
    pub fn jacobian(ring: &Ring, polys: &[Polynomial]) -> PolyMatrix {
        PolyMatrix::new(ring, polys.iter().map(|p| p.gradient()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn row(&self, i: usize) -> &[Polynomial] {
        &self.rows[i]
    }

    pub fn push_row(&mut self, row: Vec<Polynomial>) {
        assert!(self.rows.is_empty() || row.len() == self.ncols());
        self.rows.push(row);
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Polynomial {
        assert_eq!(rows.len(), cols.len());
        let mut memo: HashMap<u64, Polynomial> = HashMap::new();
        self.det_rec(rows, cols, 0, 0, &mut memo)
    }

    // Laplace expansion along rows, memoized on the set of used columns.
    fn det_rec(
        &self,
        rows: &[usize],
        cols: &[usize],
        depth: usize,
        used: u64,
        memo: &mut HashMap<u64, Polynomial>,
    ) -> Polynomial {
        if depth == rows.len() {
            return Polynomial::one(&self.ring);
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = Polynomial::zero(&self.ring);
        let mut sign_pos = true;
        for (k, &c) in cols.iter().enumerate() {
            if used & (1 << k) != 0 {
                continue;
            }
            let entry = &self.rows[rows[depth]][c];
            if !entry.is_zero() {
                let sub = self.det_rec(rows, cols, depth + 1, used | (1 << k), memo);
                let t = entry.mul(&sub);
                acc = if sign_pos { acc.add(&t) } else { acc.sub(&t) };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(used, acc.clone());
        acc
    }

    /// All nonzero `k x k` minors, without duplicates.
    pub fn minors(&self, k: usize) -> Vec<Polynomial> {
        let mut out: Vec<Polynomial> = Vec::new();
        if k == 0 {
            return vec![Polynomial::one(&self.ring)];
        }
        if k > self.nrows() || k > self.ncols() {
            return out;
        }
        for rs in subsets(self.nrows(), k) {
            for cs in subsets(self.ncols(), k) {
                let m = self.minor(&rs, &cs);
                if !m.is_zero() && !out.contains(&m) && !out.contains(&m.neg()) {
                    out.push(m);
                }
            }
        }
        out
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn three_by_three_determinant() {
        let r = Ring::rational(&["a", "b"]).unwrap();
        let p = |s: &str| parse_poly(&r, s).unwrap();
        let m = PolyMatrix::new(
            &r,
            vec![
                vec![p("a"), p("1"), p("0")],
                vec![p("0"), p("b"), p("2")],
                vec![p("1"), p("0"), p("a")],
            ],
        );
        // a(ab - 0) - 1(0 - 2) + 0
        assert_eq!(m.minor(&[0, 1, 2], &[0, 1, 2]), p("a^2*b + 2"));
        assert_eq!(m.minors(3).len(), 1);
        assert_eq!(subsets(4, 2).len(), 6);
    }
}
