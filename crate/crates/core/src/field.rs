//! Scalar arithmetic over the supported coefficient fields.
//!
//! A [`Scalar`] is a tagged value in one of: a prime field GF(p) with p <= 13,
//! the rationals (arbitrary precision), 64-bit real floats, or complex floats.
//! Arithmetic never mixes tags; exact tags stay exact.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Primes accepted for finite fields. Kept small so exhaustive tensor
/// enumeration stays feasible.
pub const SUPPORTED_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

/// Identifies the coefficient field of a scalar, vector, or tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    /// GF(p) for a prime p <= 13.
    Finite(u32),
    /// Exact rationals with big-integer numerator and denominator.
    Rational,
    /// IEEE f64.
    RealFloat,
    /// Pair of IEEE f64 (rectangular form).
    ComplexFloat,
}

impl FieldTag {
    /// Validated constructor for GF(p).
    pub fn finite(p: u32) -> Result<FieldTag> {
        if SUPPORTED_PRIMES.contains(&p) {
            Ok(FieldTag::Finite(p))
        } else {
            Err(Error::InvalidPrime(p))
        }
    }

    /// Field characteristic: p for GF(p), 0 otherwise.
    pub fn characteristic(&self) -> u32 {
        match self {
            FieldTag::Finite(p) => *p,
            _ => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldTag::Finite(_))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, FieldTag::Finite(_) | FieldTag::Rational)
    }

    pub fn is_float(&self) -> bool {
        !self.is_exact()
    }

    /// Serialized name: "gf2", .., "gf13", "rational", "float64", "complex128".
    pub fn name(&self) -> String {
        match self {
            FieldTag::Finite(p) => format!("gf{p}"),
            FieldTag::Rational => "rational".to_string(),
            FieldTag::RealFloat => "float64".to_string(),
            FieldTag::ComplexFloat => "complex128".to_string(),
        }
    }

    /// Parse a serialized field name.
    pub fn parse(name: &str) -> Result<FieldTag> {
        match name {
            "rational" => Ok(FieldTag::Rational),
            "float64" => Ok(FieldTag::RealFloat),
            "complex128" => Ok(FieldTag::ComplexFloat),
            _ => {
                if let Some(ps) = name.strip_prefix("gf") {
                    let p: u32 = ps
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad field name {name:?}")))?;
                    FieldTag::finite(p)
                } else {
                    Err(Error::Parse(format!("bad field name {name:?}")))
                }
            }
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// All elements of GF(p) in the canonical order 0, 1, .., p-1.
///
/// The order is fixed so searches that iterate field elements break ties
/// reproducibly.
pub fn field_elements(tag: FieldTag) -> Result<Vec<Scalar>> {
    match tag {
        FieldTag::Finite(p) => Ok((0..p).map(|r| Scalar::Finite { p, residue: r }).collect()),
        _ => Err(Error::InfiniteField(tag)),
    }
}

/// Field characteristic of a tag (free function mirror of the method).
pub fn characteristic(tag: FieldTag) -> u32 {
    tag.characteristic()
}

/// A scalar in one of the supported fields.
///
/// Invariants: finite residues lie in [0, p); rationals are kept in lowest
/// terms with positive denominator (maintained by `BigRational`).
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Finite { p: u32, residue: u32 },
    Rational(BigRational),
    Real(f64),
    Complex(Complex64),
}

/// Arithmetic operation selector for [`Scalar::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn tag(&self) -> FieldTag {
        match self {
            Scalar::Finite { p, .. } => FieldTag::Finite(*p),
            Scalar::Rational(_) => FieldTag::Rational,
            Scalar::Real(_) => FieldTag::RealFloat,
            Scalar::Complex(_) => FieldTag::ComplexFloat,
        }
    }

    pub fn zero(tag: FieldTag) -> Scalar {
        match tag {
            FieldTag::Finite(p) => Scalar::Finite { p, residue: 0 },
            FieldTag::Rational => Scalar::Rational(BigRational::zero()),
            FieldTag::RealFloat => Scalar::Real(0.0),
            FieldTag::ComplexFloat => Scalar::Complex(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(tag: FieldTag) -> Scalar {
        match tag {
            FieldTag::Finite(p) => Scalar::Finite { p, residue: 1 % p },
            FieldTag::Rational => Scalar::Rational(BigRational::one()),
            FieldTag::RealFloat => Scalar::Real(1.0),
            FieldTag::ComplexFloat => Scalar::Complex(Complex64::new(1.0, 0.0)),
        }
    }

    /// Embed a signed integer into the field.
    pub fn from_i64(tag: FieldTag, v: i64) -> Scalar {
        match tag {
            FieldTag::Finite(p) => {
                let m = v.rem_euclid(p as i64) as u32;
                Scalar::Finite { p, residue: m }
            }
            FieldTag::Rational => Scalar::Rational(BigRational::from(BigInt::from(v))),
            FieldTag::RealFloat => Scalar::Real(v as f64),
            FieldTag::ComplexFloat => Scalar::Complex(Complex64::new(v as f64, 0.0)),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Scalar {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Embed an f64 into a float tag.
    pub fn from_f64(tag: FieldTag, v: f64) -> Result<Scalar> {
        match tag {
            FieldTag::RealFloat => Ok(Scalar::Real(v)),
            FieldTag::ComplexFloat => Ok(Scalar::Complex(Complex64::new(v, 0.0))),
            _ => Err(Error::UnsupportedField(tag, "f64 embeds into float tags only".into())),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Finite { residue, .. } => *residue == 0,
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Real(x) => *x == 0.0,
            Scalar::Complex(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    fn check_same_tag(&self, other: &Scalar) -> Result<()> {
        if self.tag() == other.tag() {
            Ok(())
        } else {
            Err(Error::MixedFields(self.tag(), other.tag()))
        }
    }

    /// Checked arithmetic: mixed tags and division by zero are errors.
    pub fn arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar> {
        self.check_same_tag(other)?;
        match op {
            ArithOp::Add => Ok(self.add(other)),
            ArithOp::Sub => Ok(self.sub(other)),
            ArithOp::Mul => Ok(self.mul(other)),
            ArithOp::Div => self.div(other),
        }
    }

    /// Addition. Panics on mixed tags; use [`Scalar::arith`] at boundaries.
    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Finite { p, residue: a }, Scalar::Finite { p: q, residue: b }) if p == q => {
                Scalar::Finite { p: *p, residue: (a + b) % p }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a + b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a + b),
            _ => panic!("mixed field tags: {} vs {}", self.tag(), other.tag()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Finite { p, residue } => Scalar::Finite { p: *p, residue: (p - residue) % p },
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Real(x) => Scalar::Real(-x),
            Scalar::Complex(z) => Scalar::Complex(-z),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Finite { p, residue: a }, Scalar::Finite { p: q, residue: b }) if p == q => {
                Scalar::Finite { p: *p, residue: (a * b) % p }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a * b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a * b),
            _ => panic!("mixed field tags: {} vs {}", self.tag(), other.tag()),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same_tag(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul(&other.inv()?))
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Finite { p, residue } => {
                // Fermat: a^(p-2) mod p.
                let mut acc: u64 = 1;
                let mut base = *residue as u64;
                let mut e = p - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % *p as u64;
                    }
                    base = base * base % *p as u64;
                    e >>= 1;
                }
                Scalar::Finite { p: *p, residue: acc as u32 }
            }
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Real(x) => Scalar::Real(1.0 / x),
            Scalar::Complex(z) => Scalar::Complex(z.finv()),
        })
    }

    /// Complex conjugate; identity on every other tag.
    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
            other => other.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut acc = Scalar::one(self.tag());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Magnitude as f64 (float tags only; exact tags convert first).
    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::Finite { residue, .. } => *residue as f64,
            Scalar::Rational(r) => {
                rational_to_f64(r).abs()
            }
            Scalar::Real(x) => x.abs(),
            Scalar::Complex(z) => z.norm(),
        }
    }

    /// Convert to a complex float (lossy for rationals).
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Finite { residue, .. } => Complex64::new(*residue as f64, 0.0),
            Scalar::Rational(r) => Complex64::new(rational_to_f64(r), 0.0),
            Scalar::Real(x) => Complex64::new(*x, 0.0),
            Scalar::Complex(z) => *z,
        }
    }

    pub fn as_finite(&self) -> Option<(u32, u32)> {
        match self {
            Scalar::Finite { p, residue } => Some((*p, *residue)),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Good enough for the magnitudes this crate touches.
    let nf: f64 = num.to_string().parse().unwrap_or(if num.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    });
    let df: f64 = den.to_string().parse().unwrap_or(f64::INFINITY);
    nf / df
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Finite { residue, .. } => write!(f, "{residue}"),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Real(x) => write!(f, "{x}"),
            Scalar::Complex(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}
