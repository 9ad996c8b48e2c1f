//! Instance-level checker for the Schmidt subspace inequality:
//! `Σ_{v in S} max_J Σ_{j in J} lambda_{H_j,v}(x)  vs  (n + 1 + eps) h(x)`,
//! with the maximum over subsets of linearly independent forms, in both the
//! static and the moving (index-parameterized) variants.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::heights::{height_coeffs, height_point, weil, LinearForm, ProjectivePoint};
use crate::interval::Interval;
use crate::logvalue::{LogValue, MAX_PRECISION};
use crate::matrix::Echelon;
use crate::multipoly::MultiPoly;
use crate::places::Place;

/// Default cap on the number of forms (subset enumeration is exponential).
pub const DEFAULT_FORM_CAP: usize = 12;

/// A family of hyperplanes whose coefficients are polynomials in the index.
#[derive(Debug, Clone)]
pub struct HyperplaneFamily {
    /// forms[i][k] = coefficient polynomial (univariate in n) of x_k.
    forms: Vec<Vec<MultiPoly>>,
}

impl HyperplaneFamily {
    pub fn new(forms: Vec<Vec<MultiPoly>>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::Domain("empty hyperplane family".into()));
        }
        let width = forms[0].len();
        if width == 0 {
            return Err(Error::Domain("forms need at least one coordinate".into()));
        }
        for f in &forms {
            if f.len() != width {
                return Err(Error::Domain("forms have inconsistent arity".into()));
            }
            if f.iter().any(|p| p.nvars() != 1) {
                return Err(Error::Domain("coefficients must be univariate in the index".into()));
            }
        }
        if forms.len() > DEFAULT_FORM_CAP {
            return Err(Error::Domain(format!(
                "family has {} forms, above the cap {DEFAULT_FORM_CAP}",
                forms.len()
            )));
        }
        Ok(HyperplaneFamily { forms })
    }

    /// Constant (non-moving) family.
    pub fn from_constant(forms: Vec<LinearForm>) -> Result<Self> {
        let as_polys = forms
            .iter()
            .map(|f| {
                f.coeffs()
                    .iter()
                    .map(|c| MultiPoly::constant(1, c.clone()))
                    .collect()
            })
            .collect();
        HyperplaneFamily::new(as_polys)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.forms[0].len()
    }

    /// Evaluate at index n; None for forms whose coefficients all vanish.
    pub fn eval(&self, n: u64) -> Result<Vec<Option<LinearForm>>> {
        let n_el = FieldElement::from_i64(n as i64);
        let mut out = Vec::with_capacity(self.forms.len());
        for f in &self.forms {
            let coeffs: Vec<FieldElement> = f
                .iter()
                .map(|p| p.eval(std::slice::from_ref(&n_el)))
                .collect::<Result<_>>()?;
            if coeffs.iter().all(|c| c.is_zero()) {
                out.push(None);
            } else {
                out.push(Some(LinearForm::new(coeffs)?));
            }
        }
        Ok(out)
    }
}

/// All nonempty subsets of linearly independent forms, by depth-first
/// extension with an exact rank test.
fn independent_subsets(forms: &[LinearForm]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let arity = forms.first().map(|f| f.coeffs().len()).unwrap_or(0);
    let mut stack: Vec<(Vec<usize>, Echelon)> = vec![(Vec::new(), Echelon::new(arity))];
    while let Some((subset, ech)) = stack.pop() {
        let start = subset.last().map(|&i| i + 1).unwrap_or(0);
        for i in start..forms.len() {
            if ech.is_independent(forms[i].coeffs()) {
                let mut next = ech.clone();
                next.insert(forms[i].coeffs().to_vec());
                let mut s = subset.clone();
                s.push(i);
                out.push(s.clone());
                stack.push((s, next));
            }
        }
    }
    out
}

/// Certified enclosure of `max_J Σ_{j in J} lambda_{H_j,v}(P)` over subsets J
/// of linearly independent forms.
pub fn best_general_position_sum(
    forms: &[LinearForm],
    p: &ProjectivePoint,
    v: &Place,
    prec: u32,
) -> Result<Interval> {
    if forms.is_empty() {
        return Ok(Interval::zero());
    }
    for (i, f) in forms.iter().enumerate() {
        if f.eval(p)?.is_zero() {
            return Err(Error::Domain(format!("form #{i} vanishes at the point")));
        }
    }
    let lambdas: Vec<LogValue> =
        forms.iter().map(|f| weil(f, p, v, prec)).collect::<Result<_>>()?;

    let mut best: Option<Interval> = None;
    for subset in independent_subsets(forms) {
        let mut sum = LogValue::zero(prec);
        for &i in &subset {
            sum = sum.add(&lambdas[i]);
        }
        let iv = sum.total_interval(prec);
        best = Some(match best {
            None => iv,
            // The maximum of interval quantities is enclosed by the
            // componentwise maximum of the enclosures.
            Some(b) => b.max(&iv),
        });
    }
    Ok(best.unwrap_or_else(Interval::zero))
}

/// One row of the subspace report.
#[derive(Debug, Clone)]
pub struct SubspaceRow {
    pub index: u64,
    pub lhs: Interval,
    pub rhs: Interval,
    /// Some(true): certified violation; Some(false): certified compliance;
    /// None: undecidable at the precision cap.
    pub violated: Option<bool>,
    /// Forms skipped at this index (vanishing coefficients or containing the point).
    pub skipped_forms: Vec<usize>,
    /// h(x(n)), for the height-ratio series.
    pub point_height: Interval,
    /// max_j h(H_j(n)), for inspecting the slow-growth hypothesis.
    pub max_form_height: Interval,
}

#[derive(Debug, Clone)]
pub struct SubspaceReport {
    pub rows: Vec<SubspaceRow>,
    pub violations: Vec<u64>,
    pub undecided: Vec<u64>,
}

/// Run the subspace check over indexed points. `eps > 0` exact; S must
/// contain the archimedean places of the working field.
pub fn subspace_check(
    family: &HyperplaneFamily,
    points: &[(u64, ProjectivePoint)],
    s: &[Place],
    eps: &BigRational,
    prec: u32,
) -> Result<SubspaceReport> {
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if points.is_empty() {
        return Err(Error::Domain("no points to check".into()));
    }
    for p in points {
        if p.1.coords().len() != family.arity() {
            return Err(Error::Domain("point arity does not match the family".into()));
        }
    }
    let field = points[0].1.field();
    for arch in crate::places::archimedean_places(field) {
        if !s.contains(&arch) {
            return Err(Error::MissingArchimedeanPlaces);
        }
    }

    let mut rows = Vec::with_capacity(points.len());
    let mut violations = Vec::new();
    let mut undecided = Vec::new();
    for (index, point) in points {
        let row = check_one(family, *index, point, s, eps, prec)?;
        match row.violated {
            Some(true) => violations.push(*index),
            Some(false) => {}
            None => undecided.push(*index),
        }
        rows.push(row);
    }
    Ok(SubspaceReport { rows, violations, undecided })
}

fn check_one(
    family: &HyperplaneFamily,
    index: u64,
    point: &ProjectivePoint,
    s: &[Place],
    eps: &BigRational,
    prec: u32,
) -> Result<SubspaceRow> {
    let mut working = prec;
    loop {
        let evaluated = family.eval(index)?;
        let mut skipped = Vec::new();
        let mut active: Vec<LinearForm> = Vec::new();
        for (i, form) in evaluated.into_iter().enumerate() {
            match form {
                None => skipped.push(i),
                Some(f) => {
                    if f.eval(point)?.is_zero() {
                        skipped.push(i);
                    } else {
                        active.push(f);
                    }
                }
            }
        }

        let h_point = height_point(point, working)?;
        let mut lhs = Interval::zero();
        for v in s {
            let best = best_general_position_sum(&active, point, v, working)?;
            lhs = lhs.add(&best, working);
        }
        let n_plus_1_eps =
            BigRational::from_integer((point.coords().len() as i64).into()) + eps;
        let rhs_value = h_point.scale(&n_plus_1_eps);
        let rhs = rhs_value.total_interval(working);

        let mut max_form_height = Interval::zero();
        for f in &active {
            let h = height_coeffs(f.coeffs(), working)?.total_interval(working);
            max_form_height = max_form_height.max(&h);
        }

        // Certified comparison of lhs and rhs.
        let verdict = compare_intervals(&lhs, &rhs);
        if verdict.is_some() || working >= MAX_PRECISION {
            return Ok(SubspaceRow {
                index,
                lhs,
                rhs,
                violated: verdict.map(|o| o == Ordering::Greater),
                skipped_forms: skipped,
                point_height: h_point.total_interval(working),
                max_form_height,
            });
        }
        working = (working * 2).min(MAX_PRECISION);
    }
}

/// Some(Greater) when lhs > rhs certified, Some(Less|Equal) when lhs <= rhs
/// certified, None when the enclosures overlap.
fn compare_intervals(lhs: &Interval, rhs: &Interval) -> Option<Ordering> {
    if lhs.lo().cmp_dyadic(rhs.hi()) == Ordering::Greater {
        return Some(Ordering::Greater);
    }
    if lhs.hi().cmp_dyadic(rhs.lo()) != Ordering::Greater {
        return Some(Ordering::Less);
    }
    None
}

/// Exact `log(n+1)`-type ledger value, for the lower-bound property tests.
pub fn log_int_exact(n: u64, prec: u32) -> LogValue {
    LogValue::from_base(BigUint::from(n), BigRational::one(), prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::places::{finite_places_above, s_from_primes};

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_i64(n)
    }

    fn form(coords: &[i64]) -> LinearForm {
        LinearForm::new(coords.iter().map(|&c| fe(c)).collect()).unwrap()
    }

    fn point(coords: &[i64]) -> ProjectivePoint {
        ProjectivePoint::new(coords.iter().map(|&c| fe(c)).collect()).unwrap()
    }

    #[test]
    fn independent_subsets_prune_dependent_forms() {
        // {x1, 2x1}: only singletons survive.
        let forms = vec![form(&[0, 1]), form(&[0, 2])];
        let subsets = independent_subsets(&forms);
        assert_eq!(subsets.len(), 2);
        assert!(subsets.iter().all(|s| s.len() == 1));
        // {x0, x1, x0+x1}: all singletons and pairs, no triple.
        let forms = vec![form(&[1, 0]), form(&[0, 1]), form(&[1, 1])];
        let subsets = independent_subsets(&forms);
        assert_eq!(subsets.len(), 3 + 3);
    }

    #[test]
    fn best_sum_examples() {
        // forms {x0, x1}, P = [1:1], v = infinity: both Weil values are 0.
        let forms = vec![form(&[1, 0]), form(&[0, 1])];
        let p = point(&[1, 1]);
        let v = Place::RealEmbedding { which: 1 };
        let best = best_general_position_sum(&forms, &p, &v, 128).unwrap();
        assert!(best.contains_zero());
        let (lo, hi) = best.to_f64_bounds();
        assert!(lo.abs() < 1e-25 && hi.abs() < 1e-25);

        // forms {x1, 2x1} (dependent), P = [1:4], v = 2: J holds one form;
        // max lambda = log 4 either way.
        let forms = vec![form(&[0, 1]), form(&[0, 2])];
        let p = point(&[1, 4]);
        let v2 = finite_places_above(Field::Rational, 2).remove(0);
        let best = best_general_position_sum(&forms, &p, &v2, 128).unwrap();
        let expect = 4f64.ln();
        let (lo, hi) = best.to_f64_bounds();
        assert!(lo <= expect + 1e-12 && expect - 1e-12 <= hi);
    }

    #[test]
    fn single_form_on_s_unit_gives_height() {
        // Single form x1, P = [1 : u] with u = 8 an S-unit for S = {inf, 2}:
        // sum over S of lambda = h(u) = log 8.
        use crate::heights::height_scalar;
        let forms = vec![form(&[0, 1])];
        let u = fe(8);
        let p = ProjectivePoint::new(vec![fe(1), u.clone()]).unwrap();
        let s = s_from_primes(Field::Rational, &[2]);
        let mut total = Interval::zero();
        for v in &s {
            total = total.add(&best_general_position_sum(&forms, &p, v, 160).unwrap(), 160);
        }
        let h = height_scalar(&u, 160).unwrap().total_interval(160);
        let diff = total.sub(&h, 160);
        assert!(diff.contains_zero());
        let rad = diff.rad_rational();
        assert!(rad < BigRational::new(1.into(), 1_000_000_000i64.into()));
    }

    #[test]
    fn weil_lower_bound_certified() {
        // lambda_{H,v}(P) >= -N_v * log(n+1) for every place.
        let forms = vec![form(&[3, -2]), form(&[1, 7])];
        let p = point(&[5, 9]);
        let n_plus_1 = 2u64;
        let mut places = s_from_primes(Field::Rational, &[2, 3, 5, 7]);
        places.push(finite_places_above(Field::Rational, 11).remove(0));
        for f in &forms {
            for v in &places {
                let lam = weil(f, &p, v, 160).unwrap();
                let bound = log_int_exact(n_plus_1, 160)
                    .scale_int(v.n_v() as i64);
                let slack = lam.add(&bound);
                assert_ne!(
                    slack.certified_sign().unwrap(),
                    Ordering::Less,
                    "lambda below -N_v log(n+1) at {v}"
                );
            }
        }
    }

    #[test]
    fn subspace_check_powers_of_two() {
        // family {x0, x1, x0+x1}, points [1 : 2^n], S = {inf, 2}, eps = 1/2:
        // no violations for n in [1, 60].
        let family = HyperplaneFamily::from_constant(vec![
            form(&[1, 0]),
            form(&[0, 1]),
            form(&[1, 1]),
        ])
        .unwrap();
        let points: Vec<(u64, ProjectivePoint)> = (1..=60)
            .map(|n| {
                let val = FieldElement::rational(BigRational::from(
                    num_bigint::BigInt::from(2).pow(n as u32),
                ));
                (n, ProjectivePoint::new(vec![fe(1), val]).unwrap())
            })
            .collect();
        let s = s_from_primes(Field::Rational, &[2]);
        let eps = BigRational::new(1.into(), 2.into());
        let report = subspace_check(&family, &points, &s, &eps, 256).unwrap();
        assert!(report.violations.is_empty(), "violations: {:?}", report.violations);
        assert!(report.undecided.is_empty(), "undecided: {:?}", report.undecided);
        assert_eq!(report.rows.len(), 60);
        assert!(report.rows.iter().all(|r| r.skipped_forms.is_empty()));
    }

    #[test]
    fn vanishing_form_is_skipped_and_reported() {
        // Point on x0 = x1 with the form x0 - x1 present.
        let family = HyperplaneFamily::from_constant(vec![
            form(&[1, 0]),
            form(&[1, -1]),
        ])
        .unwrap();
        let points = vec![(1u64, point(&[3, 3]))];
        let s = s_from_primes(Field::Rational, &[3]);
        let eps = BigRational::new(1.into(), 2.into());
        let report = subspace_check(&family, &points, &s, &eps, 128).unwrap();
        assert_eq!(report.rows[0].skipped_forms, vec![1]);
    }

    #[test]
    fn eps_must_be_positive() {
        let family = HyperplaneFamily::from_constant(vec![form(&[1, 0])]).unwrap();
        let points = vec![(1u64, point(&[1, 2]))];
        let s = s_from_primes(Field::Rational, &[]);
        assert!(subspace_check(&family, &points, &s, &BigRational::from_integer(0.into()), 64).is_err());
    }

    #[test]
    fn moving_family_evaluation() {
        // H(n): x0 + n x1: at n = 3 the form is x0 + 3 x1.
        let coeff_one = MultiPoly::one(1);
        let coeff_n = MultiPoly::var(1, 0);
        let family = HyperplaneFamily::new(vec![vec![coeff_one, coeff_n]]).unwrap();
        let forms = family.eval(3).unwrap();
        let f = forms[0].as_ref().unwrap();
        assert_eq!(f.coeffs()[1], fe(3));
        // At n = 0 the second coefficient vanishes but the form survives.
        let forms = family.eval(0).unwrap();
        assert!(forms[0].is_some());
    }

    #[test]
    fn moving_family_subspace_check() {
        // Forms {x0, x1, x0 + n*x1} against points [1 : 2^n]: the moving
        // coefficient grows like log n = o(n log 2), and no violations occur.
        let coeff = |k: i64| MultiPoly::constant(1, fe(k));
        let family = HyperplaneFamily::new(vec![
            vec![coeff(1), coeff(0)],
            vec![coeff(0), coeff(1)],
            vec![coeff(1), MultiPoly::var(1, 0)],
        ])
        .unwrap();
        let points: Vec<(u64, ProjectivePoint)> = (1..=25)
            .map(|n| {
                let val = FieldElement::rational(BigRational::from(
                    num_bigint::BigInt::from(2).pow(n as u32),
                ));
                (n, ProjectivePoint::new(vec![fe(1), val]).unwrap())
            })
            .collect();
        let s = s_from_primes(Field::Rational, &[2]);
        let eps = BigRational::new(1.into(), 2.into());
        let report = subspace_check(&family, &points, &s, &eps, 256).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.undecided.is_empty());
        // The slow-growth proxy is visible: form heights stay far below the
        // point height at large n.
        let last = report.rows.last().unwrap();
        let (h_lo, _) = last.point_height.to_f64_bounds();
        let (_, f_hi) = last.max_form_height.to_f64_bounds();
        assert!(f_hi < h_lo / 2.0);
    }

    #[test]
    fn global_weil_identity_for_form_point_pairs() {
        use crate::heights::weil_global_identity_check;
        for (f, pt) in [
            (form(&[1, 2]), point(&[3, 5])),
            (form(&[1, 0]), point(&[7, 2])),
            (form(&[2, -3]), point(&[1, 12])),
        ] {
            let res = weil_global_identity_check(&f, &pt, 160).unwrap();
            assert!(res.is_exact_zero(), "identity fails for rational data");
        }
    }
}
