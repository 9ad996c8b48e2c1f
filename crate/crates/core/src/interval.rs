//! Dyadic interval arithmetic with directed rounding.
//!
//! All archimedean quantities in this crate are carried as closed intervals
//! `[lo, hi]` whose endpoints are dyadic rationals `m * 2^e`. Operations round
//! outward at a caller-chosen working precision, so every interval is a
//! certified enclosure of the exact real value. Logarithms are computed with
//! the atanh series in fixed-point integer arithmetic and an explicit error
//! budget; nothing here ever trusts `f64`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A dyadic rational `mantissa * 2^exp`, normalized so the mantissa is odd
/// (or zero with exp 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mantissa, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exp += tz as i64;
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.magnitude().bits()
    }

    /// Round to at most `prec` mantissa bits, toward minus infinity.
    pub fn round_down(&self, prec: u32) -> Dyadic {
        self.round(prec, false)
    }

    /// Round to at most `prec` mantissa bits, toward plus infinity.
    pub fn round_up(&self, prec: u32) -> Dyadic {
        self.round(prec, true)
    }

    fn round(&self, prec: u32, up: bool) -> Dyadic {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let divisor = BigInt::one() << shift;
        let q = if up {
            self.mantissa.div_ceil(&divisor)
        } else {
            self.mantissa.div_floor(&divisor)
        };
        Dyadic::new(q, self.exp + shift as i64)
    }

    /// Exact sum.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - e) as u64;
        let b = &other.mantissa << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    /// Exact product.
    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exp + other.exp)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa.clone(), exp: self.exp }
    }

    pub fn sign(&self) -> Sign {
        self.mantissa.sign()
    }

    /// Exact comparison of two dyadics.
    pub fn cmp_dyadic(&self, other: &Dyadic) -> Ordering {
        match (self.mantissa.sign(), other.mantissa.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) | (Sign::NoSign, Sign::Plus) => {
                return Ordering::Less
            }
            (Sign::Plus, Sign::NoSign) | (Sign::Plus, Sign::Minus) | (Sign::NoSign, Sign::Minus) => {
                return Ordering::Greater
            }
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - e) as u64;
        let b = &other.mantissa << (other.exp - e) as u64;
        a.cmp(&b)
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // m * 2^e  vs  p/q  <=>  m * 2^e * q  vs  p   (q > 0)
        let p = r.numer();
        let q = r.denom();
        let lhs = if self.exp >= 0 {
            (&self.mantissa << self.exp as u64) * q
        } else {
            &self.mantissa * q
        };
        let rhs = if self.exp >= 0 {
            p.clone()
        } else {
            p << (-self.exp) as u64
        };
        lhs.cmp(&rhs)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mantissa << self.exp as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Good enough for reporting; certified logic never uses this.
        let bits = self.bits() as i64;
        if bits <= 53 {
            self.mantissa.to_f64().unwrap_or(f64::NAN) * 2f64.powi(self.exp as i32)
        } else {
            let shift = bits - 54;
            let mut m = &self.mantissa >> shift as u64;
            // Round to nearest, ties away from zero.
            if m.is_negative() {
                m -= 1;
            } else {
                m += 1;
            }
            let m = (m >> 1u8).to_f64().unwrap_or(f64::NAN);
            m * 2f64.powi((self.exp + shift + 1) as i32)
        }
    }
}

/// A closed interval with dyadic endpoints, `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo.cmp_dyadic(&hi) != Ordering::Greater);
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    /// Outward-rounded enclosure of an exact rational.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        if r.denom().is_one() {
            return Interval::point(Dyadic::from_bigint(r.numer().clone()));
        }
        Interval {
            lo: div_round(r.numer(), r.denom(), prec, false),
            hi: div_round(r.numer(), r.denom(), prec, true),
        }
    }

    pub fn add(&self, other: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add(&other.lo).round_down(prec),
            hi: self.hi.add(&other.hi).round_up(prec),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn sub(&self, other: &Interval, prec: u32) -> Interval {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Interval, prec: u32) -> Interval {
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if p.cmp_dyadic(&lo) == Ordering::Less {
                lo = p.clone();
            }
            if p.cmp_dyadic(&hi) == Ordering::Greater {
                hi = p.clone();
            }
        }
        Interval { lo: lo.round_down(prec), hi: hi.round_up(prec) }
    }

    /// Multiply by an exact rational, with outward rounding.
    pub fn mul_rational(&self, r: &BigRational, prec: u32) -> Interval {
        if r.is_zero() {
            return Interval::zero();
        }
        let scale = |d: &Dyadic, up: bool| -> Dyadic {
            let num = &d.mantissa * r.numer();
            let scaled = div_round(&num, r.denom(), prec, up);
            Dyadic::new(scaled.mantissa, scaled.exp + d.exp)
        };
        if r.is_positive() {
            Interval { lo: scale(&self.lo, false), hi: scale(&self.hi, true) }
        } else {
            Interval { lo: scale(&self.hi, false), hi: scale(&self.lo, true) }
        }
    }

    /// Pointwise maximum: encloses `max(x, y)` for x in self, y in other.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: max_dyadic(&self.lo, &other.lo),
            hi: max_dyadic(&self.hi, &other.hi),
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: min_dyadic(&self.lo, &other.lo),
            hi: min_dyadic(&self.hi, &other.hi),
        }
    }

    /// Enclosure of `max(x, 0)`.
    pub fn max_zero(&self) -> Interval {
        self.max(&Interval::zero())
    }

    /// Enclosure of `min(x, 0)`.
    pub fn min_zero(&self) -> Interval {
        self.min(&Interval::zero())
    }

    /// Enclosure of `|x|`.
    pub fn abs(&self) -> Interval {
        match (self.lo.sign(), self.hi.sign()) {
            (Sign::Minus, Sign::Minus) => self.neg(),
            (Sign::Minus, _) => Interval {
                lo: Dyadic::zero(),
                hi: max_dyadic(&self.lo.neg(), &self.hi),
            },
            _ => self.clone(),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.sign() != Sign::Plus && self.hi.sign() != Sign::Minus
    }

    /// Certified comparison against an exact rational. `None` means the
    /// interval straddles the threshold and cannot decide.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        let lo_cmp = self.lo.cmp_rational(r);
        let hi_cmp = self.hi.cmp_rational(r);
        if hi_cmp == Ordering::Less {
            return Some(Ordering::Less);
        }
        if lo_cmp == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        if lo_cmp == Ordering::Equal && hi_cmp == Ordering::Equal {
            return Some(Ordering::Equal);
        }
        None
    }

    pub fn width(&self) -> Dyadic {
        self.hi.add(&self.lo.neg())
    }

    pub fn mid_rational(&self) -> BigRational {
        let two = BigRational::from(BigInt::from(2));
        (self.lo.to_rational() + self.hi.to_rational()) / two
    }

    pub fn rad_rational(&self) -> BigRational {
        let two = BigRational::from(BigInt::from(2));
        (self.hi.to_rational() - self.lo.to_rational()) / two
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

fn max_dyadic(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.cmp_dyadic(b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

fn min_dyadic(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.cmp_dyadic(b) == Ordering::Greater {
        b.clone()
    } else {
        a.clone()
    }
}

/// Directed-rounding division `num / den` (den > 0) to `prec` significant bits.
fn div_round(num: &BigInt, den: &BigInt, prec: u32, up: bool) -> Dyadic {
    debug_assert!(den.is_positive());
    if num.is_zero() {
        return Dyadic::zero();
    }
    let nbits = num.magnitude().bits() as i64;
    let dbits = den.magnitude().bits() as i64;
    // Shift so the quotient has ~prec+2 significant bits.
    let shift = (prec as i64 + 2 - (nbits - dbits)).max(0) as u64;
    let shifted = num << shift;
    let q = if up {
        shifted.div_ceil(den)
    } else {
        shifted.div_floor(den)
    };
    Dyadic::new(q, -(shift as i64)).round(prec, up)
}

// ---- Certified natural logarithm ----

const LN_GUARD_BITS: u32 = 32;

/// Fixed-point bounds for S(z) = sum_{k>=0} z^(2k+1)/(2k+1), the atanh series,
/// for 0 <= z <= 0.6 given as `z_floor / 2^w` with the true z in
/// [z_floor/2^w, (z_floor+1)/2^w]. Returns (lo, hi) at scale 2^w.
fn atanh_series_fixed(z_floor: &BigUint, w: u64) -> (BigUint, BigUint) {
    if z_floor.is_zero() {
        // True z < 1 ulp; S(z) <= z / (1 - z^2) < 2 ulp.
        return (BigUint::zero(), BigUint::from(2u32));
    }
    // zz underestimates z^2 * 2^w by < 1 ulp.
    let zz = (z_floor * z_floor) >> w;
    let mut term = z_floor.clone();
    let mut sum = z_floor.clone();
    let mut k: u64 = 1;
    // Every multiply/divide floors, so `sum` is a lower bound for S(z_floor/2^w).
    loop {
        term = (&term * &zz) >> w;
        if term.is_zero() {
            break;
        }
        sum += &term / BigUint::from(2 * k + 1);
        k += 1;
        if k > w + 2 {
            break;
        }
    }
    // Error budget, all in ulps at scale 2^w:
    //  - per-term floor drift: <= 2 per computed term for the power, plus 1
    //    for the division by (2k+1)  => <= 3k total across k terms;
    //  - truncated tail: term bounds z^(2k+1) up to drift 2k, and the tail is
    //    geometric with ratio z^2 <= 0.36 => tail <= (term + 2k) * 2;
    //  - input uncertainty on z (1 ulp) scaled by S'(z) <= 1/(1-z^2) <= 2.
    let drift = BigUint::from(3 * k + 2);
    let tail = (&term + BigUint::from(2 * k)) * BigUint::from(2u32);
    let hi = &sum + drift + tail;
    (sum, hi)
}

fn ln2_fixed(w: u64) -> (BigUint, BigUint) {
    static CACHE: OnceLock<Mutex<BTreeMap<u64, (BigUint, BigUint)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(v) = guard.get(&w) {
        return v.clone();
    }
    // ln 2 = 2 * atanh(1/3)
    let z = (BigUint::one() << w) / BigUint::from(3u32);
    let (lo, hi) = atanh_series_fixed(&z, w);
    let v = (lo << 1u32, hi << 1u32);
    guard.insert(w, v.clone());
    v
}

/// Certified enclosure of `ln r` for a positive rational `r`.
pub fn ln_rational(r: &BigRational, prec: u32) -> Interval {
    assert!(r.is_positive(), "ln_rational requires a positive argument");
    if r.is_one() {
        return Interval::zero();
    }
    let w = (prec + LN_GUARD_BITS) as u64;
    let p = r.numer().magnitude();
    let q = r.denom().magnitude();

    // Find e with s = r / 2^e in [1, 2).
    let mut e = p.bits() as i64 - q.bits() as i64;
    // s >= 1  <=>  p >= q * 2^e
    let ge_one = |e: i64| -> bool {
        if e >= 0 {
            *p >= (q << e as u64)
        } else {
            (p << (-e) as u64) >= *q
        }
    };
    if !ge_one(e) {
        e -= 1;
    }
    debug_assert!(ge_one(e) && !ge_one(e + 1));

    // s_floor / 2^w <= s < (s_floor + 1) / 2^w, with s in [1, 2).
    let s_floor = if e >= 0 {
        (p << w) / (q << e as u64)
    } else {
        (p << (w + (-e) as u64)) / q
    };

    // z = (s - 1) / (s + 1), monotone in s; floor arithmetic gives a lower
    // bound, and the true z exceeds it by < 2 ulps (1 from s, 1 from the
    // division), which the series' 1-ulp input budget plus 2 extra ulps cover.
    let one_w = BigUint::one() << w;
    let z_floor = ((&s_floor - &one_w) << w) / (&s_floor + &one_w);
    let (s_lo, s_hi) = atanh_series_fixed(&z_floor, w);
    // ln s in [2*s_lo, 2*s_hi + 4] ulps (slack for the extra ulp of z above).
    let ln_s_lo = BigInt::from(s_lo << 1u32);
    let ln_s_hi = BigInt::from((s_hi << 1u32) + BigUint::from(4u32));

    let (ln2_lo, ln2_hi) = ln2_fixed(w);
    let (e_lo, e_hi) = if e >= 0 {
        (
            BigInt::from(e) * BigInt::from(ln2_lo),
            BigInt::from(e) * BigInt::from(ln2_hi),
        )
    } else {
        (
            BigInt::from(e) * BigInt::from(ln2_hi),
            BigInt::from(e) * BigInt::from(ln2_lo),
        )
    };

    let lo = Dyadic::new(ln_s_lo + e_lo, -(w as i64)).round_down(prec);
    let hi = Dyadic::new(ln_s_hi + e_hi, -(w as i64)).round_up(prec);
    Interval::new(lo, hi)
}

/// Certified enclosure of `ln x` over a positive interval.
pub fn ln_interval(x: &Interval, prec: u32) -> Interval {
    assert!(x.lo.sign() == Sign::Plus, "ln_interval requires a positive interval");
    let lo = ln_rational(&x.lo.to_rational(), prec);
    let hi = ln_rational(&x.hi.to_rational(), prec);
    Interval::new(lo.lo, hi.hi)
}

/// Certified enclosure of `sqrt(n)` for a nonnegative integer.
pub fn sqrt_biguint(n: &BigUint, prec: u32) -> Interval {
    if n.is_zero() {
        return Interval::zero();
    }
    let w = prec as u64 + 2;
    let t = (n << (2 * w)).sqrt();
    // t^2 <= n * 4^w < (t+1)^2
    let lo = Dyadic::new(BigInt::from(t.clone()), -(w as i64));
    let hi = Dyadic::new(BigInt::from(t + BigUint::one()), -(w as i64));
    Interval::new(lo.round_down(prec + 8), hi.round_up(prec + 8))
}
