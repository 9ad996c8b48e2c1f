//! Integer factorization for place enumeration.
//!
//! Trial division plus Brent-Pollard rho with a deterministic Miller-Rabin
//! primality test. Everything that fits in u128 factors quickly; larger
//! inputs fail with an explicit error instead of stalling, since valuations
//! themselves (`ord_at`) never require factoring.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_BOUND: u64 = 100_000;

/// Factors `n > 0` into a prime -> exponent map.
pub fn factorize(n: &BigUint) -> Result<BTreeMap<u64, u32>> {
    if n.is_zero() {
        return Err(Error::ZeroArgument { op: "factorize" });
    }
    let mut out = BTreeMap::new();
    let mut rest = n.clone();

    let mut p = 2u64;
    while p <= TRIAL_BOUND {
        if rest.is_one() {
            return Ok(out);
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if r.is_zero() {
                rest = q;
                e += 1;
            } else {
                break;
            }
        }
        if e > 0 {
            out.insert(p, e);
        }
        p += if p == 2 { 1 } else { 2 };
    }

    if rest.is_one() {
        return Ok(out);
    }
    let rest_u128 = rest
        .to_u128()
        .ok_or_else(|| Error::FactorizationOutOfRange { value: rest.to_string() })?;
    factor_u128(rest_u128, &mut out)?;
    Ok(out)
}

/// Factors the numerator and denominator of a nonzero rational, returning a
/// prime -> signed exponent map.
pub fn factorize_rational(
    num: &BigInt,
    den: &BigInt,
) -> Result<BTreeMap<u64, i64>> {
    let mut out: BTreeMap<u64, i64> = BTreeMap::new();
    for (p, e) in factorize(num.magnitude())? {
        *out.entry(p).or_default() += e as i64;
    }
    for (p, e) in factorize(den.magnitude())? {
        *out.entry(p).or_default() -= e as i64;
    }
    out.retain(|_, e| *e != 0);
    Ok(out)
}

fn factor_u128(n: u128, out: &mut BTreeMap<u64, u32>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime_u128(n) {
        let p = u64::try_from(n)
            .map_err(|_| Error::FactorizationOutOfRange { value: n.to_string() })?;
        *out.entry(p).or_default() += 1;
        return Ok(());
    }
    let d = pollard_rho(n)
        .ok_or_else(|| Error::FactorizationOutOfRange { value: n.to_string() })?;
    factor_u128(d, out)?;
    factor_u128(n / d, out)
}

pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // Schoolbook double-and-add; m < 2^127 here.
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

pub(crate) fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for n < 3.3 * 10^24 with the standard base set.
pub fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> Option<u128> {
    if n & 1 == 0 {
        return Some(2);
    }
    let mut c = 1u128;
    while c < 64 {
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        let f = |v: u128| (mul_mod(v, v, n) + c) % n;
        let mut steps = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = x.abs_diff(y);
            d = gcd_u128(diff, n);
            steps += 1;
            if steps > 1 << 24 {
                break;
            }
        }
        if d != n && d != 1 {
            return Some(d);
        }
        c += 1;
    }
    None
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// ord_p of a nonzero integer; pure division, no factorization.
pub fn ord_p_biguint(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut e = 0u32;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if r.is_zero() {
            rest = q;
            e += 1;
        } else {
            return e;
        }
    }
}

/// ord_p of a nonzero rational.
pub fn ord_p_rational(num: &BigInt, den: &BigInt, p: u64) -> i64 {
    ord_p_biguint(num.magnitude(), p) as i64 - ord_p_biguint(den.magnitude(), p) as i64
}
