//! Coefficient fields: the rationals and prime fields `F_p`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The coefficient field of a polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    /// `F_p` for a prime `p < 2^62`.
    Prime(u64),
}

impl Field {
    pub fn zero(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::zero()),
            Field::Prime(p) => Scalar::Fp { v: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::one()),
            Field::Prime(p) => Scalar::Fp { v: 1 % p, p },
        }
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp {
                v: n.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    /// Maps a rational number into this field; fails when `p` divides the denominator.
    pub fn from_rational(self, q: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Q(q.clone())),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64().unwrap();
                let den = q.denom().mod_floor(&pb).to_u64().unwrap();
                if den == 0 {
                    return Err(Error::UnluckyPrime(p));
                }
                Ok(Scalar::Fp {
                    v: mul_mod(num, inv_mod(den, p), p),
                    p,
                })
            }
        }
    }

    pub fn is_rational(self) -> bool {
        matches!(self, Field::Rational)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "rationals"),
            Field::Prime(p) => write!(f, "modular:{p}"),
        }
    }
}

/// A field element. Rationals are kept in lowest terms with positive
/// denominator; prime-field elements are canonical representatives in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero in F_{p}");
    pow_mod(a, p - 2, p)
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, .. }) => {
                let s = a + b;
                Scalar::Fp {
                    v: if s >= *p { s - p } else { s },
                    p: *p,
                }
            }
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, .. }) => Scalar::Fp {
                v: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("mixed coefficient fields"),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: inv_mod(*v, *p),
                p: *p,
            },
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut r = self.field().one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(q) => Some(q),
            Scalar::Fp { .. } => None,
        }
    }

    /// Whether the printed form needs a leading minus sign.
    pub(crate) fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }

    pub(crate) fn abs(&self) -> Scalar {
        match self {
            Scalar::Q(q) => Scalar::Q(q.abs()),
            s => s.clone(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only for canonical sorting, not for field arithmetic.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a.cmp(b),
            (Scalar::Fp { v: a, p: pa }, Scalar::Fp { v: b, p: pb }) => (pa, a).cmp(&(pb, b)),
            (Scalar::Q(_), Scalar::Fp { .. }) => Ordering::Less,
            (Scalar::Fp { .. }, Scalar::Q(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = Field::Prime(101);
        for a in 1..101 {
            let x = f.from_i64(a);
            assert!(x.mul(&x.inv()).is_one());
        }
    }

    #[test]
    fn rational_reduction_mod_p() {
        let q = BigRational::new(BigInt::from(3), BigInt::from(4));
        let s = Field::Prime(7).from_rational(&q).unwrap();
        // 3/4 = 3 * 2 = 6 mod 7
        assert_eq!(s, Scalar::Fp { v: 6, p: 7 });
        let bad = BigRational::new(BigInt::from(1), BigInt::from(7));
        assert_eq!(
            Field::Prime(7).from_rational(&bad),
            Err(Error::UnluckyPrime(7))
        );
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let a = Scalar::Q(BigRational::new(BigInt::from(2), BigInt::from(-4)));
        assert_eq!(a.to_string(), "-1/2");
    }
}
