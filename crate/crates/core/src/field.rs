//! Exact arithmetic in Q and in quadratic fields Q(sqrt(d)).
//!
//! Every element carries its field tag; rational literals embed canonically
//! into a quadratic field when mixed with its elements, while mixing two
//! distinct quadratic fields is rejected (no compositum support).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{sqrt_biguint, Interval};

/// The coefficient field: Q itself or a quadratic extension Q(sqrt(d)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Quadratic(i64),
}

impl Field {
    /// A quadratic field descriptor; `d` must be squarefree and not 0 or 1.
    pub fn quadratic(d: i64) -> Result<Field> {
        if d == 0 || d == 1 {
            return Err(Error::Domain(format!("invalid quadratic field parameter d = {d}")));
        }
        if d.unsigned_abs() > 1_000_000_000_000 {
            return Err(Error::Domain(format!("|d| = {} too large", d.unsigned_abs())));
        }
        if !is_squarefree(d.unsigned_abs()) {
            return Err(Error::Domain(format!("d = {d} is not squarefree")));
        }
        Ok(Field::Quadratic(d))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Field::Rational => 1,
            Field::Quadratic(_) => 2,
        }
    }

    /// Field discriminant: d when d = 1 mod 4, else 4d. Only quadratic fields.
    pub fn discriminant(&self) -> Option<i64> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => {
                if d.rem_euclid(4) == 1 {
                    Some(*d)
                } else {
                    Some(4 * d)
                }
            }
        }
    }

    pub fn is_real_quadratic(&self) -> bool {
        matches!(self, Field::Quadratic(d) if *d > 0)
    }

    pub fn is_imaginary_quadratic(&self) -> bool {
        matches!(self, Field::Quadratic(d) if *d < 0)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// An exact element `a + b*sqrt(d)` of its field (b = 0 over Q).
#[derive(Debug, Clone)]
pub struct FieldElement {
    field: Field,
    a: BigRational,
    b: BigRational,
}

/// Equality is by value: a rational-valued element equals its counterpart in
/// any field tag, while irrational elements require matching fields.
impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.field == other.field)
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.b.is_zero() {
            self.field.hash(state);
        }
    }
}

impl FieldElement {
    pub fn rational(a: BigRational) -> Self {
        FieldElement { field: Field::Rational, a, b: BigRational::zero() }
    }

    pub fn quadratic(field: Field, a: BigRational, b: BigRational) -> Result<Self> {
        match field {
            Field::Quadratic(_) => Ok(FieldElement { field, a, b }),
            Field::Rational => {
                if b.is_zero() {
                    Ok(FieldElement::rational(a))
                } else {
                    Err(Error::Domain("sqrt coefficient in a rational element".into()))
                }
            }
        }
    }

    pub fn from_i64(n: i64) -> Self {
        FieldElement::rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_int_ratio(n: i64, d: i64) -> Self {
        FieldElement::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        FieldElement::from_i64(0)
    }

    pub fn one() -> Self {
        FieldElement::from_i64(1)
    }

    pub fn zero_of(field: Field) -> Self {
        FieldElement { field, a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one_of(field: Field) -> Self {
        FieldElement { field, a: BigRational::one(), b: BigRational::zero() }
    }

    /// sqrt(d) as an element of Q(sqrt(d)).
    pub fn sqrt_gen(field: Field) -> Result<Self> {
        match field {
            Field::Quadratic(_) => {
                Ok(FieldElement { field, a: BigRational::zero(), b: BigRational::one() })
            }
            Field::Rational => Err(Error::Domain("Q has no quadratic generator".into())),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True when the element lies in Q (regardless of its field tag).
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Re-tags a rational-valued element into `field`.
    pub fn promote(&self, field: Field) -> Result<Self> {
        if self.field == field {
            return Ok(self.clone());
        }
        if self.is_rational() {
            return Ok(FieldElement { field, a: self.a.clone(), b: BigRational::zero() });
        }
        Err(Error::FieldMismatch { left: self.field, right: field })
    }

    fn join_fields(&self, other: &Self) -> Field {
        match (self.field, other.field) {
            (f, g) if f == g => f,
            (Field::Rational, g) => g,
            (f, Field::Rational) => f,
            (f, g) => panic!("field mismatch in arithmetic: {f} vs {g}"),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let field = self.join_fields(other);
        FieldElement { field, a: &self.a + &other.a, b: &self.b + &other.b }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let field = self.join_fields(other);
        FieldElement { field, a: &self.a - &other.a, b: &self.b - &other.b }
    }

    pub fn neg(&self) -> Self {
        FieldElement { field: self.field, a: -self.a.clone(), b: -self.b.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let field = self.join_fields(other);
        match field {
            Field::Rational => FieldElement::rational(&self.a * &other.a),
            Field::Quadratic(d) => {
                let d_rat = BigRational::from(BigInt::from(d));
                let a = &self.a * &other.a + (&self.b * &other.b) * &d_rat;
                let b = &self.a * &other.b + &self.b * &other.a;
                FieldElement { field, a, b }
            }
        }
    }

    /// Galois conjugate a - b*sqrt(d); identity on rationals.
    pub fn conjugate(&self) -> Self {
        FieldElement { field: self.field, a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm to Q: a^2 - d*b^2 (a^2 over Q).
    pub fn norm(&self) -> BigRational {
        match self.field {
            Field::Rational => &self.a * &self.a,
            Field::Quadratic(d) => {
                let d_rat = BigRational::from(BigInt::from(d));
                &self.a * &self.a - (&self.b * &self.b) * d_rat
            }
        }
    }

    pub fn trace(&self) -> BigRational {
        match self.field {
            Field::Rational => self.a.clone(),
            Field::Quadratic(_) => &self.a + &self.a,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroArgument { op: "inv" });
        }
        match self.field {
            Field::Rational => Ok(FieldElement::rational(self.a.recip())),
            Field::Quadratic(_) => {
                // 1/x = conj(x) / N(x)
                let n = self.norm();
                let conj = self.conjugate();
                Ok(FieldElement {
                    field: self.field,
                    a: &conj.a / &n,
                    b: &conj.b / &n,
                })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(FieldElement::one_of(self.field));
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = FieldElement::one_of(self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Exact sign of the image under the real embedding `which` (1: sqrt(d)
    /// positive, 2: negative). For rationals, the sign itself.
    pub fn sign_at_embedding(&self, which: u8) -> Result<Sign> {
        match self.field {
            Field::Rational => Ok(rational_sign(&self.a)),
            Field::Quadratic(d) if d > 0 => {
                let b = if which == 2 { -self.b.clone() } else { self.b.clone() };
                Ok(sign_of_a_plus_b_sqrt_d(&self.a, &b, d))
            }
            Field::Quadratic(_) => {
                Err(Error::Domain("no real embedding for an imaginary quadratic field".into()))
            }
        }
    }

    /// Exact comparison of |sigma(self)| and |sigma(other)| at a real
    /// embedding, via the sign of sigma(self^2 - other^2).
    pub fn abs_cmp_at_embedding(&self, other: &Self, which: u8) -> Result<Ordering> {
        let diff = self.mul(self).sub(&other.mul(other));
        Ok(match diff.sign_at_embedding(which)? {
            Sign::Plus => Ordering::Greater,
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
        })
    }

    /// |sigma(x)|^2 as an exact rational; only for imaginary quadratic fields
    /// and rationals (where it is x^2).
    pub fn abs_sq_complex(&self) -> Result<BigRational> {
        match self.field {
            Field::Rational => Ok(&self.a * &self.a),
            Field::Quadratic(d) if d < 0 => Ok(self.norm()),
            Field::Quadratic(_) => {
                Err(Error::Domain("abs_sq_complex on a real quadratic field".into()))
            }
        }
    }

    /// Certified enclosure of the real-embedding image `a + b*sqrt(d)`.
    pub fn embedding_interval(&self, which: u8, prec: u32) -> Result<Interval> {
        match self.field {
            Field::Rational => Ok(Interval::from_rational(&self.a, prec)),
            Field::Quadratic(d) if d > 0 => {
                let sqrt_d = sqrt_biguint(&BigInt::from(d).magnitude().clone(), prec + 8);
                let b = if which == 2 { -self.b.clone() } else { self.b.clone() };
                let bs = sqrt_d.mul_rational(&b, prec + 8);
                Ok(Interval::from_rational(&self.a, prec + 8).add(&bs, prec))
            }
            Field::Quadratic(_) => {
                Err(Error::Domain("no real embedding for an imaginary quadratic field".into()))
            }
        }
    }

    /// Denominator bound: smallest positive integer D with D*a and D*b integers.
    pub fn denominator_lcm(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }
}

fn rational_sign(r: &BigRational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Exact sign of a + b*sqrt(d) for d > 0.
fn sign_of_a_plus_b_sqrt_d(a: &BigRational, b: &BigRational, d: i64) -> Sign {
    let sa = rational_sign(a);
    let sb = rational_sign(b);
    match (sa, sb) {
        (s, Sign::NoSign) => s,
        (Sign::NoSign, s) => s,
        (Sign::Plus, Sign::Plus) => Sign::Plus,
        (Sign::Minus, Sign::Minus) => Sign::Minus,
        // Opposite signs: compare a^2 with d*b^2.
        (sa, _) => {
            let lhs = a * a;
            let rhs = b * b * BigRational::from(BigInt::from(d));
            match lhs.cmp(&rhs) {
                Ordering::Greater => sa,
                Ordering::Less => if sa == Sign::Plus { Sign::Minus } else { Sign::Plus },
                Ordering::Equal => Sign::NoSign,
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let d = match self.field {
            Field::Quadratic(d) => d,
            Field::Rational => unreachable!("nonzero sqrt part in Q"),
        };
        if self.b.is_negative() {
            write!(f, "({} - {}*sqrt({}))", self.a, -self.b.clone(), d)
        } else {
            write!(f, "({} + {}*sqrt({}))", self.a, self.b, d)
        }
    }
}

// ---- Parsing ----

/// Parses `p/q` or `(a + b*sqrt(d))` / `(a - b*sqrt(d))`, with `a`, `b`
/// rationals. Bare `sqrt(d)` terms and omitted `b*` factors are accepted.
impl FromStr for FieldElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_field_element(s)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from(n))
    }
}

pub fn parse_field_element(s: &str) -> Result<FieldElement> {
    let s = s.trim();
    if s.starts_with('(') && s.ends_with(')') && s.contains("sqrt") {
        let inner = &s[1..s.len() - 1];
        return parse_quadratic(inner);
    }
    if s.contains("sqrt") {
        return parse_quadratic(s);
    }
    Ok(FieldElement::rational(parse_rational(s)?))
}

fn parse_quadratic(s: &str) -> Result<FieldElement> {
    // Split "a +- rest" at the top-level sign preceding the sqrt term.
    let idx = s.find("sqrt").ok_or_else(|| Error::Parse(format!("expected sqrt in {s:?}")))?;
    // Locate the +/- separating the rational part from the sqrt term, if any.
    let mut split = None;
    for (i, c) in s.char_indices() {
        if i == 0 || i >= idx {
            continue;
        }
        if c == '+' || c == '-' {
            split = Some(i);
        }
    }
    let (a_str, b_term) = match split {
        Some(i) => (&s[..i], &s[i..]),
        None => ("0", s),
    };
    let a = parse_rational(a_str)?;

    let b_term = b_term.trim();
    let (sign, b_term) = match b_term.strip_prefix('-') {
        Some(rest) => (-1i64, rest.trim()),
        None => (1i64, b_term.strip_prefix('+').unwrap_or(b_term).trim()),
    };
    let (b_str, d_part) = match b_term.split_once('*') {
        Some((b, rest)) => (b.trim(), rest.trim()),
        None => ("1", b_term),
    };
    let d_inner = d_part
        .strip_prefix("sqrt(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected sqrt(d) in {s:?}")))?;
    let d: i64 = d_inner
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid sqrt parameter in {s:?}")))?;
    let field = Field::quadratic(d)?;
    let b = parse_rational(b_str)? * BigRational::from(BigInt::from(sign));
    FieldElement::quadratic(field, a, b)
}
