use std::cmp::Ordering;

/// Exponent vector; its length is the number of ring variables.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Elimination order: graded reverse lexicographic on the flagged
    /// variables first, ties broken by grevlex on the rest.
    Block {
        eliminate: Vec<bool>,
    },
}

impl MonomialOrder {
    pub fn block(nvars: usize, vars: &[usize]) -> Self {
        let mut eliminate = vec![false; nvars];
        for &v in vars {
            eliminate[v] = true;
        }
        MonomialOrder::Block { eliminate }
    }

    pub fn name(&self) -> String {
        match self {
            MonomialOrder::Lex => "lex".into(),
            MonomialOrder::GrevLex => "grevlex".into(),
            MonomialOrder::Block { eliminate } => {
                let flags: String = eliminate
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect();
                format!("block:{flags}")
            }
        }
    }

    #[inline]
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => grevlex(a, b, |_| true),
            MonomialOrder::Block { eliminate } => {
                grevlex(a, b, |i| eliminate[i]).then_with(|| grevlex(a, b, |i| !eliminate[i]))
            }
        }
    }
}

#[inline]
fn grevlex(a: &[u32], b: &[u32], keep: impl Fn(usize) -> bool) -> Ordering {
    let mut da = 0u64;
    let mut db = 0u64;
    for i in 0..a.len() {
        if keep(i) {
            da += a[i] as u64;
            db += b[i] as u64;
        }
    }
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if keep(i) && a[i] != b[i] {
            // smaller exponent in the last variable wins
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

#[inline]
pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[inline]
pub fn lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

#[inline]
pub fn quotient(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn product(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

pub fn degree(a: &[u32]) -> u32 {
    a.iter().sum()
}
