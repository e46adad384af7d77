//! Exact scalars: arbitrary-precision rationals, or residues modulo a prime.
//!
//! Rational values act as constants that are coerced into `F_p` whenever they
//! meet a residue, so the small constants used by the algorithms (`±1`, `1/2`,
//! structure constants) work unchanged in either field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The coefficient field in force for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FieldConfig {
    #[default]
    Rationals,
    Prime(u64),
}

impl FieldConfig {
    pub fn characteristic(self) -> u64 {
        match self {
            FieldConfig::Rationals => 0,
            FieldConfig::Prime(p) => p,
        }
    }

    /// Reads the command-line spelling: `q` or `fp:<p>`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("q") {
            return Ok(FieldConfig::Rationals);
        }
        let p = text
            .strip_prefix("fp:")
            .ok_or_else(|| Error::Format(format!("unknown field '{text}', expected 'q' or 'fp:<p>'")))?
            .parse::<u64>()
            .map_err(|e| Error::Format(format!("bad prime in '{text}': {e}")))?;
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::Format(format!("{p} is not a supported prime")));
        }
        Ok(FieldConfig::Prime(p))
    }

    /// Brings a scalar into this field.
    pub fn coerce(self, s: &Scalar) -> Result<Scalar> {
        match self {
            FieldConfig::Rationals => match s {
                Scalar::Q(_) => Ok(s.clone()),
                Scalar::Mod { .. } => Err(Error::Field("residue used where a rational was expected".into())),
            },
            FieldConfig::Prime(p) => s.to_residue(p).map(|value| Scalar::Mod { value, modulus: p }),
        }
    }

    pub fn name(self) -> String {
        match self {
            FieldConfig::Rationals => "q".to_string(),
            FieldConfig::Prime(p) => format!("fp:{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element.
#[derive(Debug, Clone)]
pub enum Scalar {
    Q(BigRational),
    Mod { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Q(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Q(BigRational::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar::Q(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn half() -> Self {
        Scalar::ratio(1, 2)
    }

    /// `(-1)^exponent`.
    pub fn sign(odd: bool) -> Self {
        if odd {
            Scalar::from_i64(-1)
        } else {
            Scalar::one()
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Scalar::Q(_) => None,
            Scalar::Mod { modulus, .. } => Some(*modulus),
        }
    }

    fn to_residue(&self, p: u64) -> Result<u64> {
        match self {
            Scalar::Mod { value, modulus } if *modulus == p => Ok(*value),
            Scalar::Mod { modulus, .. } => Err(Error::Field(format!("mixed moduli {modulus} and {p}"))),
            Scalar::Q(q) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64().unwrap_or(0);
                let den = q.denom().mod_floor(&pb).to_u64().unwrap_or(0);
                if den == 0 {
                    return Err(Error::Field(format!("{q} has no image in F_{p}")));
                }
                Ok(mul_mod(num, inv_mod(den, p), p))
            }
        }
    }

    /// Multiplicative inverse; `None` for zero or an un-coercible rational.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Q(q) => Some(Scalar::Q(q.recip())),
            Scalar::Mod { value, modulus } => Some(Scalar::Mod { value: inv_mod(*value, *modulus), modulus: *modulus }),
        }
    }

    fn binary(&self, rhs: &Scalar, qop: impl Fn(&BigRational, &BigRational) -> BigRational, mop: impl Fn(u64, u64, u64) -> u64) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(qop(a, b)),
            _ => {
                let p = self.modulus().or(rhs.modulus()).unwrap();
                let a = self.to_residue(p).unwrap_or_else(|e| panic!("{e}"));
                let b = rhs.to_residue(p).unwrap_or_else(|e| panic!("{e}"));
                Scalar::Mod { value: mop(a, b, p), modulus: p }
            }
        }
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(q) => Some(q),
            Scalar::Mod { .. } => None,
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a == b,
            _ => {
                let p = self.modulus().or(other.modulus()).unwrap();
                match (self.to_residue(p), other.to_residue(p)) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a * b, mul_mod)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero");
        self * &inv
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(q) => Scalar::Q(-q),
            Scalar::Mod { value, modulus } => Scalar::Mod { value: (modulus - value) % modulus, modulus: *modulus },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Scalar::Q(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"n"` or `"p/q"` as a rational.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |e: &dyn fmt::Display| Error::Format(format!("bad scalar '{text}': {e}"));
        let q = match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|e| bad(&e))?;
                let d: BigInt = d.trim().parse().map_err(|e| bad(&e))?;
                if d.is_zero() {
                    return Err(bad(&"zero denominator"));
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(text.parse::<BigInt>().map_err(|e| bad(&e))?),
        };
        Ok(Scalar::Q(q))
    }
}

impl Scalar {
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(q) if q.is_negative())
    }
}
