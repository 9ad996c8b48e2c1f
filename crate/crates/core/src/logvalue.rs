//! Certified logarithmic values.
//!
//! A [`LogValue`] is a sum `Σ c_m · log(m)  +  A` where the finite part is an
//! exact rational combination of logarithms of integers `m >= 2` and `A` is a
//! certified dyadic interval covering the archimedean contributions.
//!
//! The finite part does not require its bases to be prime: factor refinement
//! (repeated gcd splitting) turns any collection of bases into a
//! pairwise-coprime one, and over such a basis the logarithms are linearly
//! independent over Q. Exact zero tests and equality therefore never need an
//! integer factorization, which keeps quantities like
//! `log gcd(4^n - 1, 2^n - 1)` exact at sizes where factoring is hopeless.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{ln_rational, Interval};

/// Hard ceiling for precision escalation, in bits.
pub const MAX_PRECISION: u32 = 4096;

/// Default working precision when a caller does not specify one.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogValue {
    /// Exact part: base -> coefficient, value Σ c * log(base); bases >= 2.
    finite: BTreeMap<BigUint, BigRational>,
    /// Certified interval for the archimedean part.
    arch: Interval,
    /// Working precision (bits) the archimedean part was computed at.
    prec: u32,
}

impl LogValue {
    pub fn zero(prec: u32) -> Self {
        LogValue { finite: BTreeMap::new(), arch: Interval::zero(), prec }
    }

    /// `c * log(base)`, exact.
    pub fn from_base(base: BigUint, coeff: BigRational, prec: u32) -> Self {
        let mut finite = BTreeMap::new();
        if !coeff.is_zero() && base > BigUint::one() {
            finite.insert(base, coeff);
        }
        LogValue { finite, arch: Interval::zero(), prec }
    }

    /// `e * log(p)` for a prime (or any integer >= 2) and integer exponent.
    pub fn from_prime_power(p: u64, e: i64, prec: u32) -> Self {
        LogValue::from_base(BigUint::from(p), BigRational::from_integer(e.into()), prec)
    }

    pub fn from_arch(arch: Interval, prec: u32) -> Self {
        LogValue { finite: BTreeMap::new(), arch, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn arch(&self) -> &Interval {
        &self.arch
    }

    pub fn finite(&self) -> &BTreeMap<BigUint, BigRational> {
        &self.finite
    }

    pub fn add(&self, other: &LogValue) -> LogValue {
        let prec = self.prec.min(other.prec);
        let mut finite = self.finite.clone();
        for (base, c) in &other.finite {
            let entry = finite.entry(base.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                finite.remove(base);
            }
        }
        LogValue { finite, arch: self.arch.add(&other.arch, prec), prec }
    }

    pub fn neg(&self) -> LogValue {
        LogValue {
            finite: self.finite.iter().map(|(b, c)| (b.clone(), -c.clone())).collect(),
            arch: self.arch.neg(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &LogValue) -> LogValue {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigRational) -> LogValue {
        if r.is_zero() {
            return LogValue::zero(self.prec);
        }
        LogValue {
            finite: self.finite.iter().map(|(b, c)| (b.clone(), c * r)).collect(),
            arch: self.arch.mul_rational(r, self.prec),
            prec: self.prec,
        }
    }

    pub fn scale_int(&self, k: i64) -> LogValue {
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// Exact test: is the finite part identically zero?
    pub fn finite_is_zero(&self) -> bool {
        refine(&self.finite).is_empty()
    }

    /// Canonical finite part over a pairwise-coprime, power-free basis.
    pub fn finite_normalized(&self) -> BTreeMap<BigUint, BigRational> {
        refine(&self.finite)
    }

    /// Exactly zero: empty finite part and the point interval {0}.
    pub fn is_exact_zero(&self) -> bool {
        self.arch.is_exact_zero() && self.finite_is_zero()
    }

    /// Certified enclosure of the full value at precision `prec`.
    pub fn total_interval(&self, prec: u32) -> Interval {
        let mut acc = self.arch.clone();
        for (base, c) in &self.finite {
            let ln_b = ln_rational(&BigRational::from_integer(base.clone().into()), prec);
            acc = acc.add(&ln_b.mul_rational(c, prec), prec);
        }
        acc
    }

    /// Certified comparison with a rational threshold, escalating the finite
    /// evaluation precision up to [`MAX_PRECISION`]. The archimedean interval
    /// is fixed at construction time; when it alone straddles the threshold
    /// the caller must recompute the value at higher precision.
    pub fn certified_cmp(&self, threshold: &BigRational) -> Result<Ordering> {
        let mut prec = self.prec.max(64);
        loop {
            let iv = self.total_interval(prec);
            if let Some(ord) = iv.cmp_rational(threshold) {
                return Ok(ord);
            }
            if prec >= MAX_PRECISION {
                return Err(Error::UndecidableAtPrecision { bits: prec });
            }
            prec = (prec * 2).min(MAX_PRECISION);
        }
    }

    /// Certified sign, with the same escalation contract as `certified_cmp`.
    pub fn certified_sign(&self) -> Result<Ordering> {
        if self.is_exact_zero() {
            return Ok(Ordering::Equal);
        }
        self.certified_cmp(&BigRational::zero())
    }
}

/// Factor refinement: rewrite the formal sum over a pairwise-coprime,
/// power-free set of bases, combining coefficients and dropping zeros.
fn refine(map: &BTreeMap<BigUint, BigRational>) -> BTreeMap<BigUint, BigRational> {
    let one = BigUint::one();
    let mut items: Vec<(BigUint, BigRational)> = map
        .iter()
        .filter(|(b, c)| **b > one && !c.is_zero())
        .map(|(b, c)| (b.clone(), c.clone()))
        .collect();

    // Split any pair sharing a common factor; each split strictly reduces the
    // product of the bases, so this terminates.
    'outer: loop {
        for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                let g = items[i].0.gcd(&items[j].0);
                if g > one {
                    let (bi, ci) = items[i].clone();
                    let (bj, cj) = items[j].clone();
                    let mut next: Vec<(BigUint, BigRational)> = Vec::new();
                    for (idx, (b, c)) in items.into_iter().enumerate() {
                        if idx != i && idx != j {
                            next.push((b, c));
                        }
                    }
                    // log(b) = log(g) + log(b/g)
                    let qi = &bi / &g;
                    let qj = &bj / &g;
                    next.push((g.clone(), ci.clone()));
                    if qi > one {
                        next.push((qi, ci));
                    }
                    next.push((g, cj.clone()));
                    if qj > one {
                        next.push((qj, cj));
                    }
                    items = merge(next);
                    continue 'outer;
                }
            }
        }
        break;
    }

    // Pull out perfect powers: base = k^e becomes e * log(k).
    let mut out: BTreeMap<BigUint, BigRational> = BTreeMap::new();
    for (b, c) in items {
        let (root, e) = primitive_root(&b);
        let entry = out.entry(root).or_insert_with(BigRational::zero);
        *entry += c * BigRational::from_integer(e.into());
        // zero coefficients removed below
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn merge(items: Vec<(BigUint, BigRational)>) -> Vec<(BigUint, BigRational)> {
    let mut m: BTreeMap<BigUint, BigRational> = BTreeMap::new();
    for (b, c) in items {
        let entry = m.entry(b).or_insert_with(BigRational::zero);
        *entry += c;
    }
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Largest e with b = k^e; returns (k, e).
fn primitive_root(b: &BigUint) -> (BigUint, u32) {
    let bits = b.bits() as u32;
    for e in (2..=bits.max(2)).rev() {
        let k = b.nth_root(e);
        if k <= BigUint::one() {
            continue;
        }
        if k.pow(e) == *b {
            let (k0, e0) = primitive_root(&k);
            return (k0, e0 * e);
        }
    }
    (b.clone(), 1)
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let norm = self.finite_normalized();
        let mut first = true;
        for (b, c) in &norm {
            if first {
                write!(f, "{c}*log({b})")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*log({})", -c.clone(), b)?;
            } else {
                write!(f, " + {c}*log({b})")?;
            }
        }
        if !self.arch.is_exact_zero() || first {
            let (lo, hi) = self.arch.to_f64_bounds();
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "[{lo:.6e}, {hi:.6e}]")?;
        }
        Ok(())
    }
}
