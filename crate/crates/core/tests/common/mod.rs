//! Hand-rolled oracles that share no code with the Gröbner engine.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Sparse polynomial in two variables with integer coefficients.
pub type Poly2 = Vec<((u32, u32), i64)>;

pub fn d_dx(p: &Poly2) -> Poly2 {
    p.iter()
        .filter(|((a, _), _)| *a > 0)
        .map(|&((a, b), c)| ((a - 1, b), c * a as i64))
        .collect()
}

pub fn d_dy(p: &Poly2) -> Poly2 {
    p.iter()
        .filter(|((_, b), _)| *b > 0)
        .map(|&((a, b), c)| ((a, b - 1), c * b as i64))
        .collect()
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v *= inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let k = rows[i][c].clone();
                let pivot = rows[r].clone();
                for (v, q) in rows[i].iter_mut().zip(pivot) {
                    *v -= k.clone() * q;
                }
            }
        }
        r += 1;
    }
    r
}

/// `dim k[x,y]_{≤D} / span{m·g : deg(m·g) ≤ D}` by plain linear algebra on
/// the monomial staircase.
pub fn truncated_colength(gens: &[Poly2], d: u32) -> usize {
    let monos: Vec<(u32, u32)> = (0..=d)
        .flat_map(|t| (0..=t).map(move |i| (i, t - i)))
        .collect();
    let col = |m: (u32, u32)| monos.iter().position(|&x| x == m).unwrap();
    let mut rows = Vec::new();
    for g in gens {
        let gd = g.iter().map(|((a, b), _)| a + b).max().unwrap_or(0);
        for &(i, j) in &monos {
            if i + j + gd > d {
                continue;
            }
            let mut row = vec![BigRational::zero(); monos.len()];
            for &((a, b), c) in g {
                row[col((a + i, b + j))] += BigRational::from_integer(c.into());
            }
            rows.push(row);
        }
    }
    monos.len() - rank(rows)
}

/// Colength of the Jacobian ideal of a weighted-homogeneous `f`, read off
/// once the truncated count has stabilised.
pub fn milnor_oracle(f: &Poly2) -> usize {
    let gens = [d_dx(f), d_dy(f)];
    let deg = f.iter().map(|((a, b), _)| a + b).max().unwrap();
    let mut d = 2 * deg;
    loop {
        let a = truncated_colength(&gens, d);
        let b = truncated_colength(&gens, d + 2);
        if a == b {
            return a;
        }
        d += 2;
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Colength of the `e`-th power of a maximal ideal in `n` variables.
pub fn power_colength(n: u64, e: u64) -> u64 {
    binomial(n + e - 1, n)
}
