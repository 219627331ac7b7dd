//! Coefficient fields: the rationals and prime fields `GF(p)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest admissible characteristic.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p < 2 || p > MAX_CHARACTERISTIC || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p))
    }

    /// Parses `QQ` or `GF(p)`.
    pub fn parse(text: &str) -> Result<Field> {
        let t = text.trim();
        if t == "QQ" {
            return Ok(Field::Rationals);
        }
        if let Some(inner) = t.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = inner
                .trim()
                .parse()
                .map_err(|_| Error::InvalidField(format!("bad characteristic in `{t}`")))?;
            return Field::prime(p);
        }
        Err(Error::InvalidField(format!("expected `QQ` or `GF(p)`, found `{t}`")))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Mod {
                v: (n.rem_euclid(*p as i64)) as u64,
                p: *p,
            },
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(*p));
                Scalar::Mod {
                    v: r.to_u64().unwrap(),
                    p: *p,
                }
            }
        }
    }

    /// Maps a scalar of another field into this one (rationals reduce mod p).
    pub fn convert(&self, s: &Scalar) -> Result<Scalar> {
        match (self, s) {
            (Field::Rationals, Scalar::Rat(_)) => Ok(s.clone()),
            (Field::Prime(p), Scalar::Mod { p: q, .. }) if p == q => Ok(s.clone()),
            (Field::Prime(_), Scalar::Rat(r)) => {
                let num = self.from_bigint(r.numer());
                let den = self.from_bigint(r.denom());
                let inv = den.inv().ok_or_else(|| {
                    Error::FieldMismatch {
                        left: format!("{r}"),
                        right: format!("{self} (denominator vanishes)"),
                    }
                })?;
                Ok(num.mul(&inv))
            }
            _ => Err(Error::FieldMismatch {
                left: s.field().to_string(),
                right: self.to_string(),
            }),
        }
    }

    /// All elements of a prime field in the order 0, 1, ..., p-1.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some((0..*p).map(|v| Scalar::Mod { v, p: *p }).collect()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Mixing fields in one operation is a logic error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { v: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, .. }) => Scalar::Mod {
                v: (a + b) % p,
                p: *p,
            },
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { v, p } => Scalar::Mod {
                v: (p - v) % p,
                p: *p,
            },
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, .. }) => Scalar::Mod {
                v: (a * b) % p,
                p: *p,
            },
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rat(a) => Some(Scalar::Rat(a.recip())),
            Scalar::Mod { v, p } => Some(Scalar::Mod {
                v: pow_mod(*v, p - 2, *p),
                p: *p,
            }),
        }
    }

    pub fn div(&self, o: &Scalar) -> Option<Scalar> {
        o.inv().map(|i| self.mul(&i))
    }

    /// True when the printed form needs a leading minus sign.
    pub(crate) fn is_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Mod { .. } => false,
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fields() {
        assert_eq!(Field::parse("QQ").unwrap(), Field::Rationals);
        assert_eq!(Field::parse("GF(5)").unwrap(), Field::Prime(5));
        assert!(Field::parse("GF(6)").is_err());
        assert!(Field::parse("GF(4294967311)").is_err());
        assert!(Field::parse("RR").is_err());
    }

    #[test]
    fn prime_field_inverse() {
        let f = Field::Prime(7);
        for v in 1..7 {
            let a = f.from_i64(v);
            assert!(a.mul(&a.inv().unwrap()).is_one());
        }
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rationals_reduce_mod_p() {
        let half = Scalar::Rat(BigRational::new(1.into(), 2.into()));
        let f = Field::Prime(5);
        assert_eq!(f.convert(&half).unwrap(), f.from_i64(3));
        assert!(Field::Prime(2).convert(&half).is_err());
    }
}
