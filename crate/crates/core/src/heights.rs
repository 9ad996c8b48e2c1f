//! Heights of scalars, projective points and polynomials; Weil functions;
//! and the generalized logarithmic gcd.
//!
//! Wherever a quantity reduces to the logarithm of an exact rational (all of
//! Q, and the norm-expressible parts of quadratic fields) it is carried in
//! the exact ledger of [`LogValue`]; only genuinely irrational real-embedding
//! logarithms use intervals. In particular `log_gcd` over Q is Euclid's
//! algorithm in disguise and never factors anything.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::logvalue::{LogValue, MAX_PRECISION};
use crate::places::{log_abs, ord_at, relevant_places, Place};

/// A point of projective space with exact coordinates, not all zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
}

/// Common field of a list of elements: the unique quadratic tag if present.
pub(crate) fn joint_field(xs: &[FieldElement]) -> Result<Field> {
    let mut field = Field::Rational;
    for x in xs {
        match (field, x.field()) {
            (Field::Rational, f) => field = f,
            (f, Field::Rational) => field = f,
            (f, g) if f == g => {}
            (f, g) => return Err(Error::FieldMismatch { left: f, right: g }),
        }
    }
    Ok(field)
}

fn coerce(xs: Vec<FieldElement>) -> Result<Vec<FieldElement>> {
    let field = joint_field(&xs)?;
    xs.into_iter().map(|x| x.promote(field)).collect()
}

impl ProjectivePoint {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|c| c.is_zero()) {
            return Err(Error::Domain("projective point needs a nonzero coordinate".into()));
        }
        Ok(ProjectivePoint { coords: coerce(coords)? })
    }

    pub fn field(&self) -> Field {
        self.coords[0].field()
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn scale(&self, lambda: &FieldElement) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroArgument { op: "ProjectivePoint::scale" });
        }
        Ok(ProjectivePoint { coords: self.coords.iter().map(|c| c.mul(lambda)).collect() })
    }

    /// Projective equality via vanishing of all 2x2 cross products.
    pub fn same_point(&self, other: &Self) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        let n = self.coords.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let cross = self.coords[i]
                    .mul(&other.coords[j])
                    .sub(&self.coords[j].mul(&other.coords[i]));
                if !cross.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// A nonzero linear form a_0 x_0 + ... + a_n x_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vec<FieldElement>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::Domain("linear form must not vanish identically".into()));
        }
        Ok(LinearForm { coeffs: coerce(coeffs)? })
    }

    pub fn field(&self) -> Field {
        self.coeffs[0].field()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn eval(&self, p: &ProjectivePoint) -> Result<FieldElement> {
        if self.coeffs.len() != p.coords.len() {
            return Err(Error::Domain(format!(
                "form in {} variables applied to point with {} coordinates",
                self.coeffs.len(),
                p.coords.len()
            )));
        }
        let mut acc = FieldElement::zero();
        for (a, x) in self.coeffs.iter().zip(&p.coords) {
            acc = acc.add(&a.mul(x));
        }
        Ok(acc)
    }
}

// ---- Exact-ledger building blocks ----

/// `log r` for a positive rational, as an exact ledger entry.
pub fn log_rational_exact(r: &BigRational, prec: u32) -> LogValue {
    debug_assert!(r.is_positive());
    LogValue::from_base(r.numer().magnitude().clone(), BigRational::one(), prec).add(
        &LogValue::from_base(r.denom().magnitude().clone(), -BigRational::one(), prec),
    )
}

/// `log |x|_v`, exact whenever the value is the log of a rational: finite
/// places, the complex place (|sigma|^2 = N), and rational arguments at real
/// places. Only irrational real embeddings produce intervals.
pub fn log_abs_sharp(x: &FieldElement, v: &Place, prec: u32) -> Result<LogValue> {
    if x.is_zero() {
        return Err(Error::ZeroArgument { op: "log_abs" });
    }
    match v {
        Place::FinitePrime { .. } => log_abs(x, v, prec),
        Place::ComplexPair => {
            let n = x.abs_sq_complex()?;
            Ok(log_rational_exact(&n, prec))
        }
        Place::RealEmbedding { .. } => {
            if let Some(r) = x.as_rational() {
                Ok(log_rational_exact(&r.abs(), prec))
            } else {
                log_abs(x, v, prec)
            }
        }
    }
}

/// Exact comparison of |x|_v and |y|_v.
pub fn abs_cmp_at_place(x: &FieldElement, y: &FieldElement, v: &Place) -> Result<Ordering> {
    match v {
        Place::FinitePrime { .. } => {
            if x.is_zero() && y.is_zero() {
                return Ok(Ordering::Equal);
            }
            if x.is_zero() {
                return Ok(Ordering::Less);
            }
            if y.is_zero() {
                return Ok(Ordering::Greater);
            }
            // |x|_v = p^{-f ord}: larger absolute value = smaller valuation.
            Ok(ord_at(y, v)?.cmp(&ord_at(x, v)?))
        }
        Place::ComplexPair => Ok(x.abs_sq_complex()?.cmp(&y.abs_sq_complex()?)),
        Place::RealEmbedding { which } => {
            if let (Some(a), Some(b)) = (x.as_rational(), y.as_rational()) {
                return Ok(a.abs().cmp(&b.abs()));
            }
            x.abs_cmp_at_embedding(y, *which)
        }
    }
}

/// `log max_i |x_i|_v` over the nonzero entries (exact argmax, then one log).
pub fn log_sup_at_place(
    xs: &[FieldElement],
    v: &Place,
    prec: u32,
) -> Result<LogValue> {
    let mut best: Option<&FieldElement> = None;
    for x in xs {
        if x.is_zero() {
            continue;
        }
        best = Some(match best {
            None => x,
            Some(b) => {
                if abs_cmp_at_place(x, b, v)? == Ordering::Greater {
                    x
                } else {
                    b
                }
            }
        });
    }
    let best = best.ok_or(Error::Domain("log_sup of all-zero list".into()))?;
    log_abs_sharp(best, v, prec)
}

/// Certified `max(0, value)` of a LogValue: exact when the sign is decided by
/// the ledger, an interval clamp otherwise.
fn log_plus_of(value: &LogValue) -> Result<LogValue> {
    match value.certified_sign() {
        Ok(Ordering::Greater) => Ok(value.clone()),
        Ok(Ordering::Less) | Ok(Ordering::Equal) => Ok(LogValue::zero(value.precision())),
        Err(e) => Err(e),
    }
}

/// The places where any of the inputs has a nontrivial absolute value.
fn support(xs: &[FieldElement]) -> Result<Vec<Place>> {
    let nonzero: Vec<FieldElement> = xs.iter().filter(|x| !x.is_zero()).cloned().collect();
    relevant_places(&nonzero)
}

// ---- Heights ----

/// `h(x) = Σ_v log max{1, |x|_v}`, certified nonnegative.
pub fn height_scalar(x: &FieldElement, prec: u32) -> Result<LogValue> {
    if x.is_zero() {
        return Err(Error::ZeroArgument { op: "height_scalar" });
    }
    let mut acc = LogValue::zero(prec);
    for v in support(std::slice::from_ref(x))? {
        let contribution = log_plus_of(&log_abs_sharp(x, &v, prec)?)?;
        acc = acc.add(&contribution);
    }
    Ok(acc)
}

/// `h([x_0 : ... : x_n]) = Σ_v log max_i |x_i|_v`; invariant under scaling.
pub fn height_point(p: &ProjectivePoint, prec: u32) -> Result<LogValue> {
    let mut acc = LogValue::zero(prec);
    for v in support(p.coords())? {
        acc = acc.add(&log_sup_at_place(p.coords(), &v, prec)?);
    }
    Ok(acc)
}

/// Height of a coefficient list (used for polynomials and linear forms).
pub fn height_coeffs(coeffs: &[FieldElement], prec: u32) -> Result<LogValue> {
    let p = ProjectivePoint::new(coeffs.iter().filter(|c| !c.is_zero()).cloned().collect())?;
    height_point(&p, prec)
}

/// `h(f) = Σ_v log max over coefficients of |a_I|_v`.
pub fn height_polynomial(f: &crate::multipoly::MultiPoly, prec: u32) -> Result<LogValue> {
    if f.is_zero() {
        return Err(Error::ZeroArgument { op: "height_polynomial" });
    }
    height_coeffs(&f.coefficients(), prec)
}

// ---- Generalized logarithmic gcd ----

/// `log gcd(a, b) = -Σ_v log^- max{|a|_v, |b|_v}`, certified nonnegative and
/// symmetric. Exact over Q (Euclid on the numerators).
pub fn log_gcd(a: &FieldElement, b: &FieldElement, prec: u32) -> Result<LogValue> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument { op: "log_gcd" });
    }
    if let (Some(ra), Some(rb)) = (a.as_rational(), b.as_rational()) {
        return Ok(log_gcd_rational(ra, rb, prec));
    }

    let xs = [a.clone(), b.clone()];
    let mut acc = LogValue::zero(prec);
    for v in support(&xs)? {
        match v {
            Place::FinitePrime { p, residue_degree, .. } => {
                let m = ord_at(a, &v)?.min(ord_at(b, &v)?);
                if m > 0 {
                    acc = acc.add(&LogValue::from_prime_power(
                        p,
                        residue_degree as i64 * m,
                        prec,
                    ));
                }
            }
            _ => {
                // -log^- max(|a|_v, |b|_v): nonzero only if both are < 1.
                let larger = if abs_cmp_at_place(a, b, &v)? == Ordering::Less { b } else { a };
                let l = log_abs_sharp(larger, &v, prec)?;
                if l.certified_sign().unwrap_or(Ordering::Greater) == Ordering::Less {
                    acc = acc.add(&l.neg());
                }
            }
        }
    }
    Ok(acc)
}

/// Per-place breakdown of the generalized log gcd, for inspection: the terms
/// `-log^- max{|a|_v, |b|_v}` at each relevant place. Unlike [`log_gcd`],
/// which takes a factorization-free route over Q, this enumerates places and
/// therefore needs factorable inputs.
pub fn log_gcd_breakdown(
    a: &FieldElement,
    b: &FieldElement,
    prec: u32,
) -> Result<Vec<(Place, LogValue)>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument { op: "log_gcd_breakdown" });
    }
    let xs = [a.clone(), b.clone()];
    let mut out = Vec::new();
    for v in support(&xs)? {
        let larger = if abs_cmp_at_place(a, b, &v)? == Ordering::Less { b } else { a };
        let l = log_abs_sharp(larger, &v, prec)?;
        let term = if l.certified_sign().unwrap_or(Ordering::Greater) == Ordering::Less {
            l.neg()
        } else {
            LogValue::zero(prec)
        };
        out.push((v, term));
    }
    Ok(out)
}

/// Rational case: the finite part is log gcd of the numerators, the
/// archimedean part is -log max(|a|, |b|) when that max is below 1.
fn log_gcd_rational(a: &BigRational, b: &BigRational, prec: u32) -> LogValue {
    use num_integer::Integer;
    let g: BigUint = a.numer().magnitude().gcd(b.numer().magnitude());
    let mut acc = LogValue::from_base(g, BigRational::one(), prec);
    let max = if a.abs() >= b.abs() { a.abs() } else { b.abs() };
    if max < BigRational::one() {
        acc = acc.add(&log_rational_exact(&max, prec).neg());
    }
    acc
}

// ---- Weil functions ----

/// Local Weil function `lambda_{H,v}(P) = log(||P||_v ||L||_v / |L(P)|_v)`.
pub fn weil(l: &LinearForm, p: &ProjectivePoint, v: &Place, prec: u32) -> Result<LogValue> {
    let field = joint_field(&[p.coords()[0].clone(), l.coeffs()[0].clone()])?;
    let coords: Vec<FieldElement> =
        p.coords().iter().map(|c| c.promote(field)).collect::<Result<_>>()?;
    let coeffs: Vec<FieldElement> =
        l.coeffs().iter().map(|c| c.promote(field)).collect::<Result<_>>()?;
    let value = l.eval(p)?.promote(field)?;
    if value.is_zero() {
        return Err(Error::Domain("point lies on the hyperplane".into()));
    }
    let sup_p = log_sup_at_place(&coords, v, prec)?;
    let sup_l = log_sup_at_place(&coeffs, v, prec)?;
    let denom = log_abs_sharp(&value, v, prec)?;
    Ok(sup_p.add(&sup_l).sub(&denom))
}

/// `Σ_v lambda_{H,v}(P) - h(P) - h(L)`: a certified enclosure of zero by the
/// product formula.
pub fn weil_global_identity_check(
    l: &LinearForm,
    p: &ProjectivePoint,
    prec: u32,
) -> Result<LogValue> {
    // Heights are normalization-dependent, so everything must live in one field.
    let field = joint_field(&[p.coords()[0].clone(), l.coeffs()[0].clone()])?;
    let p = ProjectivePoint::new(
        p.coords().iter().map(|c| c.promote(field)).collect::<Result<_>>()?,
    )?;
    let l = LinearForm::new(
        l.coeffs().iter().map(|c| c.promote(field)).collect::<Result<_>>()?,
    )?;
    let value = l.eval(&p)?;
    if value.is_zero() {
        return Err(Error::Domain("point lies on the hyperplane".into()));
    }
    let mut all: Vec<FieldElement> = p.coords().to_vec();
    all.extend_from_slice(l.coeffs());
    all.push(value);
    let mut acc = LogValue::zero(prec);
    for v in support(&all)? {
        acc = acc.add(&weil(&l, &p, &v, prec)?);
    }
    let hp = height_point(&p, prec)?;
    let hl = height_coeffs(l.coeffs(), prec)?;
    Ok(acc.sub(&hp).sub(&hl))
}

// ---- log+/log- split of an exact positive rational (for the identity tests) ----

/// (log^- c, log^+ c) for a positive rational c, both exact.
pub fn log_split_rational(c: &BigRational, prec: u32) -> (LogValue, LogValue) {
    if c >= &BigRational::one() {
        (LogValue::zero(prec), log_rational_exact(c, prec))
    } else {
        (log_rational_exact(c, prec), LogValue::zero(prec))
    }
}

/// Escalating certified comparison: re-runs `compute` at doubled precision
/// until the produced LogValue separates from `threshold`.
pub fn certified_cmp_with_escalation<F>(
    mut compute: F,
    threshold: &BigRational,
    start_prec: u32,
) -> Result<Ordering>
where
    F: FnMut(u32) -> Result<LogValue>,
{
    let mut prec = start_prec.max(64);
    loop {
        let value = compute(prec)?;
        match value.certified_cmp(threshold) {
            Ok(ord) => return Ok(ord),
            Err(Error::UndecidableAtPrecision { .. }) if prec < MAX_PRECISION => {
                prec = (prec * 2).min(MAX_PRECISION);
            }
            Err(e) => return Err(e),
        }
    }
}
