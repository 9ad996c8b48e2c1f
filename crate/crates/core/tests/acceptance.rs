//! Acceptance suite: the empirical exit gate, one test per criterion.
//!
//! Every test prints a `criterion N PASS ...` line (visible with
//! `--nocapture`) and enforces its runtime budget. Randomness is a fixed
//! linear congruential generator so runs are reproducible.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use recurgcd_core::field::{Field, FieldElement};
use recurgcd_core::heights::{
    height_coeffs, height_point, log_gcd, weil_global_identity_check, LinearForm, ProjectivePoint,
};
use recurgcd_core::hilbert::{hilbert_prime, IdealSlice};
use recurgcd_core::logvalue::LogValue;
use recurgcd_core::multipoly::{coprime, Monomial, MultiPoly};
use recurgcd_core::places::{product_formula_residual, s_from_primes};
use recurgcd_core::recurrence::{
    coprime_in_r_gamma, exceptional_n, group_structure, s_integral_ratio, skolem_zeros,
    split_subsequence, to_laurent, LaurentForm, Recurrence,
};
use recurgcd_core::subspace::{subspace_check, HyperplaneFamily};

struct Lcg(u64);

impl Lcg {
    fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }
}

fn report(criterion: u32, label: &str, pass: bool, elapsed: Duration, budget: Duration) {
    let line = format!(
        "criterion {criterion} {}: {label} ({:.2}s of {:.0}s budget)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    println!("{line}");
    assert!(pass, "{line}");
    assert!(elapsed <= budget, "criterion {criterion} over budget: {elapsed:?} > {budget:?}");
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fe(n: i64, d: i64) -> FieldElement {
    FieldElement::from_int_ratio(n, d)
}

fn rec(text: &str) -> Recurrence {
    Recurrence::parse(text).unwrap()
}

#[test]
fn criterion_01_product_formula() {
    let start = Instant::now();
    let budget = Duration::from_secs(30);
    let prec = 256;
    let tight = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(30));
    let mut rng = Lcg::new(1);

    let mut pass = true;
    let mut rational_count = 0u32;
    while rational_count < 10_000 {
        let num = rng.in_range(-1_000_000, 1_000_000);
        let den = rng.in_range(1, 1_000_000);
        if num == 0 {
            continue;
        }
        let x = fe(num, den);
        let r = product_formula_residual(&x, prec).unwrap();
        pass &= r.finite_is_zero();
        pass &= r.arch().contains_zero() && r.arch().rad_rational() < tight;
        rational_count += 1;
    }

    let ds = [-7i64, -5, -3, 2, 3, 5];
    let mut quad_count = 0u32;
    let mut i = 0usize;
    while quad_count < 1_000 {
        let d = ds[i % ds.len()];
        i += 1;
        let field = Field::quadratic(d).unwrap();
        let a = rat(rng.in_range(-100, 100), rng.in_range(1, 50));
        let b = rat(rng.in_range(-100, 100), rng.in_range(1, 50));
        let x = FieldElement::quadratic(field, a, b).unwrap();
        if x.is_zero() {
            continue;
        }
        let r = product_formula_residual(&x, prec).unwrap();
        pass &= r.finite_is_zero();
        pass &= r.arch().contains_zero() && r.arch().rad_rational() < tight;
        quad_count += 1;
    }

    report(1, "product formula on 10000 rational + 1000 quadratic elements", pass, start.elapsed(), budget);
}

#[test]
fn criterion_02_integer_log_gcd_oracle() {
    let start = Instant::now();
    let budget = Duration::from_secs(5);
    let mut rng = Lcg::new(2);
    let mut pass = true;
    for _ in 0..1_000 {
        let a = rng.in_range(1, 1_000_000_000);
        let b = rng.in_range(1, 1_000_000_000);
        let g = euclid_gcd(a as u64, b as u64);
        let lv = log_gcd(&fe(a, 1), &fe(b, 1), 128).unwrap();
        let expected = LogValue::from_base(BigUint::from(g), BigRational::one(), 128);
        pass &= lv.sub(&expected).is_exact_zero();
    }
    report(2, "log_gcd equals log of the Euclidean gcd on 1000 integer pairs", pass, start.elapsed(), budget);
}

fn euclid_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[test]
fn criterion_03_hilbert_dimension() {
    let start = Instant::now();
    let budget = Duration::from_secs(120);
    use rayon::prelude::*;

    let mut jobs = Vec::new();
    for n in [2u32, 3] {
        for d in [1u32, 2, 3] {
            for m in (2 * d)..=(2 * d + 3) {
                jobs.push((n, d, m));
            }
        }
    }
    let pass = jobs
        .par_iter()
        .map(|&(n, d, m)| {
            let mut rng = Lcg::new(0x0300_0000 | ((n as u64) << 16) | ((d as u64) << 8) | m as u64);
            let mut ok = true;
            for _ in 0..5 {
                let (f, g) = random_coprime_forms(&mut rng, n, d);
                let slice = IdealSlice::new(&f, &g, m).unwrap();
                ok &= slice.complement_dim() as u128 == hilbert_prime(n, d, m);
            }
            ok
        })
        .reduce(|| true, |a, b| a && b);

    report(3, "ideal_slice complement dimension matches the closed form", pass, start.elapsed(), budget);
}

/// Random dense homogeneous degree-d forms in n+1 variables, redrawn until
/// coprime.
fn random_coprime_forms(rng: &mut Lcg, n: u32, d: u32) -> (MultiPoly, MultiPoly) {
    loop {
        let f = random_form(rng, n, d);
        let g = random_form(rng, n, d);
        if f.is_zero() || g.is_zero() {
            continue;
        }
        if coprime(&f, &g) {
            return (f, g);
        }
    }
}

fn random_form(rng: &mut Lcg, n: u32, d: u32) -> MultiPoly {
    let nvars = (n + 1) as usize;
    let monomials = recurgcd_core::hilbert::monomials_of_degree(nvars, d);
    MultiPoly::from_terms(
        nvars,
        monomials.into_iter().map(|m| (m, fe(rng.in_range(-5, 5), 1))),
    )
}

#[test]
fn criterion_04_weil_global_identity() {
    let start = Instant::now();
    let budget = Duration::from_secs(10);
    let mut rng = Lcg::new(4);
    let mut pass = true;
    let tight = rat(1, 1_000_000_000);

    // 150 rational pairs (exact zero) and 50 quadratic pairs (tight interval).
    for _ in 0..150 {
        let (l, p) = loop {
            let l = vec![fe(rng.in_range(-9, 9), 1), fe(rng.in_range(-9, 9), 1)];
            let p = vec![fe(rng.in_range(-9, 9), 1), fe(rng.in_range(-9, 9), 1)];
            if l.iter().all(|c| c.is_zero()) || p.iter().all(|c| c.is_zero()) {
                continue;
            }
            let form = LinearForm::new(l).unwrap();
            let point = ProjectivePoint::new(p).unwrap();
            if !form.eval(&point).unwrap().is_zero() {
                break (form, point);
            }
        };
        let res = weil_global_identity_check(&l, &p, 192).unwrap();
        pass &= res.is_exact_zero();
    }

    let field = Field::quadratic(5).unwrap();
    for _ in 0..50 {
        let (l, p) = loop {
            let mk = |rng: &mut Lcg| {
                FieldElement::quadratic(
                    field,
                    rat(rng.in_range(-5, 5), 1),
                    rat(rng.in_range(-5, 5), 1),
                )
                .unwrap()
            };
            let l = vec![mk(&mut rng), mk(&mut rng)];
            let p = vec![mk(&mut rng), mk(&mut rng)];
            if l.iter().all(|c| c.is_zero()) || p.iter().all(|c| c.is_zero()) {
                continue;
            }
            let form = LinearForm::new(l).unwrap();
            let point = ProjectivePoint::new(p).unwrap();
            if !form.eval(&point).unwrap().is_zero() {
                break (form, point);
            }
        };
        let res = weil_global_identity_check(&l, &p, 192).unwrap();
        let total = res.total_interval(192);
        pass &= total.contains_zero() && total.rad_rational() < tight;
    }

    report(4, "weil global identity on 200 (form, point) pairs", pass, start.elapsed(), budget);
}

#[test]
fn criterion_05_theorem_1_5_desk_check() {
    let start = Instant::now();
    let budget = Duration::from_secs(60);
    use rayon::prelude::*;

    let f = rec("1 ; 2\n-1 ; 1");
    let g = rec("1 ; 3\n-1 ; 1");

    // Coprimality hypothesis, through the full lattice pipeline.
    let lattice = group_structure(&[f.roots(), g.roots()].concat(), None).unwrap();
    assert_eq!(lattice.torsion_order, 1);
    let lf = to_laurent(&f, &lattice).unwrap();
    let lg = to_laurent(&g, &lattice).unwrap();
    let coprime_verdict = coprime_in_r_gamma(&f, &g, &lf, &lg).unwrap();

    let eps = rat(1, 20);
    let below: usize = (1u64..=300)
        .into_par_iter()
        .map(|n| {
            let fv = f.eval(n);
            let gv = g.eval(n);
            if fv.is_zero() || gv.is_zero() {
                return 0usize;
            }
            let lv = log_gcd(&fv, &gv, 256).unwrap();
            let eps_n = &eps * BigRational::from(BigInt::from(n));
            usize::from(lv.certified_cmp(&eps_n).unwrap() == Ordering::Less)
        })
        .sum();

    let pass = coprime_verdict && below >= 100;
    println!("criterion 5 detail: coprime = {coprime_verdict}, below = {below} of 300");
    report(5, "log gcd(2^n - 1, 3^n - 1) < n/20 at 100+ indices up to 300", pass, start.elapsed(), budget);
}

#[test]
fn criterion_06_non_coprime_contrast() {
    let start = Instant::now();
    let budget = Duration::from_secs(30);
    use rayon::prelude::*;

    let f = rec("1 ; 4\n-1 ; 1");
    let g = rec("1 ; 2\n-1 ; 1");
    let eps = rat(1, 2);

    let satisfying: BTreeSet<u64> = (1u64..=200)
        .into_par_iter()
        .filter_map(|n| {
            let fv = f.eval(n);
            let gv = g.eval(n);
            let lv = log_gcd(&fv, &gv, 256).unwrap();
            let eps_n = &eps * BigRational::from(BigInt::from(n));
            (lv.certified_cmp(&eps_n).unwrap() == Ordering::Less).then_some(n)
        })
        .collect();

    // Divisibility oracle: gcd(4^n - 1, 2^n - 1) = 2^n - 1, so
    // log gcd = log(2^n - 1) >= eps * n fails only at the n = 1 boundary
    // where the gcd is 1.
    let pass = satisfying == BTreeSet::from([1]);
    println!("criterion 6 detail: satisfying indices = {satisfying:?} (oracle: {{1}})");
    report(6, "4^n - 1 vs 2^n - 1 stays above eps*n for all n in [2, 200]", pass, start.elapsed(), budget);
}

#[test]
fn criterion_07_exceptional_n_fixtures() {
    let start = Instant::now();
    let budget = Duration::from_secs(30);
    let tv = &["t", "x"];

    let fixture = |fs: &str, gs: &str| -> (LaurentForm, LaurentForm) {
        let mk = |s: &str| LaurentForm {
            poly: MultiPoly::parse(s, tv).unwrap(),
            shift: vec![0],
            generators: vec![fe(2, 1)],
        };
        (mk(fs), mk(gs))
    };

    let mut pass = true;
    for (fs, gs, expect) in [
        ("x - t", "x - 2", BTreeSet::from([2u64])),
        ("x - 1", "x + 1", BTreeSet::new()),
        ("x - t", "x - t^2", BTreeSet::from([0, 1])),
    ] {
        let (f, g) = fixture(fs, gs);
        let rep = exceptional_n(&f, &g, 50).unwrap();
        let cand = rep.candidates.clone().unwrap();
        // Post-verification: resultant candidates, filtered by the direct
        // multivariate gcd, equal the exhaustive per-n failure set.
        let verified: BTreeSet<u64> = cand.intersection(&rep.exceptional).copied().collect();
        pass &= rep.exceptional == expect;
        pass &= cand.is_superset(&rep.exceptional);
        pass &= verified == rep.exceptional;
    }
    report(7, "resultant candidates post-verify to the exhaustive failure sets", pass, start.elapsed(), budget);
}

#[test]
fn criterion_08_laurent_round_trip() {
    let start = Instant::now();
    let budget = Duration::from_secs(30);
    let fixtures = [
        "1 ; 2\n-1 ; 1",
        "1 ; 3\n-1 ; 1",
        "2 ; 2",
        "t ; 6\n1 ; 2",
        "t^2 + 1 ; 4\n-1 ; 6\n3 ; 1",
        "1 ; 4\n-1 ; 1",
        "t ; 2\n1 ; 1",
        "1 ; 2\nt ; 1",
        "5 ; 10\n-3 ; 15",
        "t^3 - t ; 9\n1 ; 3\n7 ; 1",
    ];
    let mut pass = true;
    for text in fixtures {
        let f = rec(text);
        let lattice = group_structure(&f.roots(), None).unwrap();
        let lf = to_laurent(&f, &lattice).unwrap();
        for n in 0..=50 {
            pass &= lf.eval(n).unwrap() == f.eval(n);
        }
    }
    report(8, "u(n)^shift * f0 evaluation reproduces all 10 fixtures exactly", pass, start.elapsed(), budget);
}

#[test]
fn criterion_09_skolem_fixtures() {
    let start = Instant::now();
    let budget = Duration::from_secs(30);
    let mut pass = true;

    // 2^n - 4 -> {2}; independent check: 2^n != 4 except n = 2.
    let rep = skolem_zeros(&rec("1 ; 2\n-4 ; 1"), 200).unwrap();
    pass &= rep.zeros == BTreeSet::from([2]);
    pass &= (0..=200u64).all(|n| (BigInt::from(2).pow(n as u32) == BigInt::from(4)) == (n == 2));

    // 2^n - 1 -> {0}.
    let rep = skolem_zeros(&rec("1 ; 2\n-1 ; 1"), 200).unwrap();
    pass &= rep.zeros == BTreeSet::from([0]);
    pass &= (0..=200u64).all(|n| (BigInt::from(2).pow(n as u32) == BigInt::one()) == (n == 0));

    // (n - 2) * 1^n -> {2}.
    let rep = skolem_zeros(&rec("t - 2 ; 1"), 200).unwrap();
    pass &= rep.zeros == BTreeSet::from([2]);

    // Fibonacci + 1 -> no zeros up to 200; oracle via the integer recurrence.
    let fib_plus_one = {
        let mut terms = rec(
            "(0 + 1/5*sqrt(5)) ; (1/2 + 1/2*sqrt(5))\n(0 - 1/5*sqrt(5)) ; (1/2 - 1/2*sqrt(5))",
        )
        .terms()
        .to_vec();
        terms.push((MultiPoly::one(1), FieldElement::one()));
        Recurrence::new(terms).unwrap()
    };
    let rep = skolem_zeros(&fib_plus_one, 200).unwrap();
    pass &= rep.zeros.is_empty();
    {
        let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
        for _ in 0..=200u64 {
            pass &= a.clone() + 1 != BigInt::from(0);
            let t = &a + &b;
            a = std::mem::replace(&mut b, t);
        }
    }

    report(9, "skolem zero sets match on all four fixtures with re-evaluation", pass, start.elapsed(), budget);
}

#[test]
fn criterion_10_s_integrality_desk_check() {
    let start = Instant::now();
    let budget = Duration::from_secs(60);

    // F = 2^n, G = 2^n - 1, S = {inf, 2}: only the n = 1 boundary (G(1) = 1)
    // is integral; 2^n - 1 is odd and > 1 for every n >= 2.
    let f = rec("1 ; 2");
    let g = rec("1 ; 2\n-1 ; 1");
    let s = s_from_primes(Field::Rational, &[2]);
    let rep = s_integral_ratio(&f, &g, &s, 200).unwrap();
    let above: BTreeSet<u64> = rep.integral.iter().copied().filter(|&n| n >= 1).collect();
    let mut pass = above == BTreeSet::from([1]);
    pass &= rep.zero_denominator == BTreeSet::from([0]);

    // Contrast: F = 4^n - 1, G = 2^n - 1, S = {inf}: all n in [1, 200].
    let f = rec("1 ; 4\n-1 ; 1");
    let s = s_from_primes(Field::Rational, &[]);
    let rep = s_integral_ratio(&f, &g, &s, 200).unwrap();
    let expect: BTreeSet<u64> = (1..=200).collect();
    pass &= rep.integral == expect;

    report(10, "S-integral quotient sets match the divisibility oracle", pass, start.elapsed(), budget);
}

#[test]
fn criterion_11_split_subsequence_identity() {
    let start = Instant::now();
    let budget = Duration::from_secs(60);
    let fixtures = [
        "1 ; 2\n-1 ; 1",
        "1 ; -2",
        "1 ; -2\n1 ; 2",
        "t ; 3\n1 ; -2",
        "t^2 - 1 ; 2\n4 ; 3",
        "(0 + 1/5*sqrt(5)) ; (1/2 + 1/2*sqrt(5))\n(0 - 1/5*sqrt(5)) ; (1/2 - 1/2*sqrt(5))",
    ];
    let mut pass = true;
    for text in fixtures {
        let f = rec(text);
        for q in 1..=4u64 {
            for l in 0..q {
                match split_subsequence(&f, q, l) {
                    Ok(s) => {
                        for n in 0..=30 {
                            pass &= s.eval(n) == f.eval(q * n + l);
                        }
                    }
                    Err(recurgcd_core::Error::ZeroRecurrence) => {
                        for n in 0..=30 {
                            pass &= f.eval(q * n + l).is_zero();
                        }
                    }
                    Err(_) => pass = false,
                }
            }
        }
    }
    report(11, "split(F, q, l) evaluation identity exact on all fixtures", pass, start.elapsed(), budget);
}

#[test]
fn criterion_12_subspace_checker_sanity() {
    let start = Instant::now();
    let budget = Duration::from_secs(120);

    let family = HyperplaneFamily::from_constant(vec![
        LinearForm::new(vec![fe(1, 1), fe(0, 1)]).unwrap(),
        LinearForm::new(vec![fe(0, 1), fe(1, 1)]).unwrap(),
        LinearForm::new(vec![fe(1, 1), fe(1, 1)]).unwrap(),
    ])
    .unwrap();
    let points: Vec<(u64, ProjectivePoint)> = (1..=60)
        .map(|n| {
            let coord = FieldElement::rational(BigRational::from(BigInt::from(2).pow(n as u32)));
            (n, ProjectivePoint::new(vec![FieldElement::one(), coord]).unwrap())
        })
        .collect();
    let s = s_from_primes(Field::Rational, &[2]);
    let eps = rat(1, 2);
    let report_out = subspace_check(&family, &points, &s, &eps, 256).unwrap();

    let pass = report_out.violations.is_empty()
        && report_out.undecided.is_empty()
        && report_out.rows.len() == 60;
    report(12, "no violations and no undecided rows for [1 : 2^n], eps = 1/2", pass, start.elapsed(), budget);
}

// A few shared sanity checks used by more than one criterion.

#[test]
fn heights_agree_between_point_and_coeff_views() {
    let p = ProjectivePoint::new(vec![fe(2, 1), fe(3, 1)]).unwrap();
    let h1 = height_point(&p, 128).unwrap();
    let h2 = height_coeffs(&[fe(2, 1), fe(3, 1)], 128).unwrap();
    assert!(h1.sub(&h2).is_exact_zero());
}

#[test]
fn duplicate_root_merge_keeps_slice_semantics() {
    // Same value through the Laurent pipeline after merging 2^n + 2^n.
    let f = Recurrence::new(vec![
        (MultiPoly::one(1), fe(2, 1)),
        (MultiPoly::one(1), fe(2, 1)),
    ])
    .unwrap();
    let lattice = group_structure(&f.roots(), None).unwrap();
    let lf = to_laurent(&f, &lattice).unwrap();
    for n in 0..20 {
        assert_eq!(lf.eval(n).unwrap(), f.eval(n));
    }
    let slice_check = Monomial(vec![0]);
    assert_eq!(slice_check.degree(), 0);
}
