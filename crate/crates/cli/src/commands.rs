//! Subcommand implementations: each returns a CSV body, summary lines and
//! the count of undecided comparisons (which drives the exit code).

use std::cmp::Ordering;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use recurgcd_core::error::Error;
use recurgcd_core::field::{Field, FieldElement};
use recurgcd_core::heights::{abs_cmp_at_place, log_gcd, ProjectivePoint};
use recurgcd_core::interval::Interval;
use recurgcd_core::logvalue::LogValue;
use recurgcd_core::places::{
    log_abs, product_formula_residual, relevant_places, s_from_primes,
};
use recurgcd_core::recurrence::{
    coprime_in_r_gamma, group_structure, s_integral_ratio, skolem_zeros, split_subsequence,
    to_laurent, Recurrence,
};
use recurgcd_core::subspace::{subspace_check, HyperplaneFamily};

use crate::config::ExperimentConfig;

pub struct CmdOutput {
    pub csv: String,
    pub summary: Vec<(String, String)>,
    pub undecided: usize,
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.12e}")
}

fn interval_bounds(iv: &Interval) -> (String, String) {
    let (lo, hi) = iv.to_f64_bounds();
    (fmt_f64(lo), fmt_f64(hi))
}

fn require_f(cfg: &ExperimentConfig) -> anyhow::Result<&Recurrence> {
    cfg.rec_f.as_ref().ok_or_else(|| anyhow!("config needs an [F] block"))
}

fn require_g(cfg: &ExperimentConfig) -> anyhow::Result<&Recurrence> {
    cfg.rec_g.as_ref().ok_or_else(|| anyhow!("config needs a [G] block"))
}

/// Coprimality verdict of F and G in the recurrence ring, as a display string.
fn coprimality_verdict(cfg: &ExperimentConfig, f: &Recurrence, g: &Recurrence) -> String {
    let roots: Vec<FieldElement> = [f.roots(), g.roots()].concat();
    match group_structure(&roots, cfg.quad_unit.as_ref()) {
        Ok(lattice) if lattice.torsion_order == 1 => {
            let lf = to_laurent(f, &lattice);
            let lg = to_laurent(g, &lattice);
            match (lf, lg) {
                (Ok(lf), Ok(lg)) => match coprime_in_r_gamma(f, g, &lf, &lg) {
                    Ok(true) => "true".into(),
                    Ok(false) => "false".into(),
                    Err(e) => format!("error({e})"),
                },
                (Err(e), _) | (_, Err(e)) => format!("error({e})"),
            }
        }
        Ok(lattice) => format!("torsion({})", lattice.torsion_order),
        Err(e) => format!("unknown({e})"),
    }
}

/// Hypothesis check: max_{i,j} |root|_v >= 1 at every place; lists
/// the violating places.
fn root_hypothesis_violations(roots: &[FieldElement]) -> anyhow::Result<Vec<String>> {
    let places = relevant_places(roots)?;
    let field = roots
        .iter()
        .find(|r| r.field() != Field::Rational)
        .map(|r| r.field())
        .unwrap_or(Field::Rational);
    let one = FieldElement::one_of(field);
    let mut violations = Vec::new();
    for v in places {
        let mut any_ge_one = false;
        for r in roots {
            let r = r.promote(field)?;
            if abs_cmp_at_place(&r, &one, &v)? != Ordering::Less {
                any_ge_one = true;
                break;
            }
        }
        if !any_ge_one {
            violations.push(v.to_string());
        }
    }
    Ok(violations)
}

// ---- loggcd-sweep ----

pub fn cmd_loggcd_sweep(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    let f = require_f(cfg)?;
    let g = require_g(cfg)?;
    let eps = &cfg.eps;
    let prec = cfg.precision;

    struct Row {
        n: u64,
        lo: String,
        hi: String,
        eps_n: String,
        below: &'static str,
        reason: &'static str,
    }

    let rows: Vec<Row> = (0..=cfg.n_max)
        .into_par_iter()
        .map(|n| {
            let fv = f.eval(n);
            let gv = g.eval(n);
            let eps_n = eps * BigRational::from(BigInt::from(n));
            let eps_n_str = fmt_f64(rational_to_f64(&eps_n));
            if fv.is_zero() || gv.is_zero() {
                return Ok(Row {
                    n,
                    lo: String::new(),
                    hi: String::new(),
                    eps_n: eps_n_str,
                    below: "",
                    reason: "zero_value",
                });
            }
            let lg = log_gcd(&fv, &gv, prec).map_err(|e| anyhow!("log_gcd at n={n}: {e}"))?;
            let iv = lg.total_interval(prec);
            let (lo, hi) = interval_bounds(&iv);
            let below = match lg.certified_cmp(&eps_n) {
                Ok(Ordering::Less) => "1",
                Ok(_) => "0",
                Err(Error::UndecidableAtPrecision { .. }) => "undecided",
                Err(e) => return Err(anyhow!("comparison at n={n}: {e}")),
            };
            Ok(Row { n, lo, hi, eps_n: eps_n_str, below, reason: "" })
        })
        .collect::<anyhow::Result<_>>()?;

    let mut csv = String::from("n,loggcd_lo,loggcd_hi,eps_n,below_eps,reason\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{},{},{}", r.n, r.lo, r.hi, r.eps_n, r.below, r.reason)?;
    }

    let below: Vec<u64> = rows.iter().filter(|r| r.below == "1").map(|r| r.n).collect();
    let undecided = rows.iter().filter(|r| r.below == "undecided").count();
    let skipped = rows.iter().filter(|r| !r.reason.is_empty()).count();
    let verdict = coprimality_verdict(cfg, f, g);
    let combined: Vec<FieldElement> = [f.roots(), g.roots()].concat();
    let hyp = root_hypothesis_violations(&combined)?;

    let mut summary = vec![
        ("rows".into(), rows.len().to_string()),
        ("skipped".into(), skipped.to_string()),
        ("below_count".into(), below.len().to_string()),
        (
            "below_smallest_n".into(),
            below.first().map(|n| n.to_string()).unwrap_or_default(),
        ),
        (
            "below_largest_n".into(),
            below.last().map(|n| n.to_string()).unwrap_or_default(),
        ),
        ("coprime_in_r_gamma".into(), verdict),
        ("undecided".into(), undecided.to_string()),
    ];
    summary.push((
        "hypothesis_max_root_ge_1".into(),
        if hyp.is_empty() {
            "ok".into()
        } else {
            format!("violated at {}", hyp.join(" "))
        },
    ));
    Ok(CmdOutput { csv, summary, undecided })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    Interval::from_rational(r, 64).to_f64_bounds().0
}

// ---- pair-sweep ----

pub fn cmd_pair_sweep(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    let f = require_f(cfg)?;
    let g = require_g(cfg)?;
    let grid = cfg.grid_max.unwrap_or(cfg.n_max);
    let eps = &cfg.eps;
    let prec = cfg.precision;

    let pairs: Vec<(u64, u64)> =
        (1..=grid).flat_map(|m| (1..=grid).map(move |n| (m, n))).collect();

    struct Row {
        m: u64,
        n: u64,
        value: String,
        eps_max: String,
        exceeds: &'static str,
        reason: &'static str,
    }

    let rows: Vec<Row> = pairs
        .into_par_iter()
        .map(|(m, n)| {
            let fv = f.eval(m);
            let gv = g.eval(n);
            let max_mn = m.max(n);
            let eps_max = eps * BigRational::from(BigInt::from(max_mn));
            let eps_str = fmt_f64(rational_to_f64(&eps_max));
            if fv.is_zero() || gv.is_zero() {
                return Ok(Row {
                    m,
                    n,
                    value: String::new(),
                    eps_max: eps_str,
                    exceeds: "",
                    reason: "zero_value",
                });
            }
            let lg = log_gcd(&fv, &gv, prec).map_err(|e| anyhow!("log_gcd at ({m},{n}): {e}"))?;
            let mid = lg.total_interval(prec).to_f64_bounds();
            let exceeds = match lg.certified_cmp(&eps_max) {
                Ok(Ordering::Greater) => "1",
                Ok(_) => "0",
                Err(Error::UndecidableAtPrecision { .. }) => "undecided",
                Err(e) => return Err(anyhow!("comparison at ({m},{n}): {e}")),
            };
            Ok(Row {
                m,
                n,
                value: fmt_f64((mid.0 + mid.1) / 2.0),
                eps_max: eps_str,
                exceeds,
                reason: "",
            })
        })
        .collect::<anyhow::Result<_>>()?;

    let mut csv = String::from("m,n,loggcd,eps_max_mn,exceeds,reason\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{},{},{}", r.m, r.n, r.value, r.eps_max, r.exceeds, r.reason)?;
    }

    let exceeding: Vec<(u64, u64)> =
        rows.iter().filter(|r| r.exceeds == "1").map(|r| (r.m, r.n)).collect();
    let undecided = rows.iter().filter(|r| r.exceeds == "undecided").count();
    let shown: Vec<String> =
        exceeding.iter().take(25).map(|(m, n)| format!("({m},{n})")).collect();
    let summary = vec![
        ("pairs".into(), rows.len().to_string()),
        ("exceed_count".into(), exceeding.len().to_string()),
        ("exceed_pairs".into(), shown.join(" ")),
        ("undecided".into(), undecided.to_string()),
    ];
    Ok(CmdOutput { csv, summary, undecided })
}

// ---- group ----

pub fn cmd_group(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    let f = require_f(cfg)?;
    let g = require_g(cfg)?;
    let combined: Vec<FieldElement> = [f.roots(), g.roots()].concat();
    let lattice = group_structure(&combined, cfg.quad_unit.as_ref())
        .context("group structure of the combined roots")?;
    let q = lattice.torsion_order as u64;

    let mut summary = vec![
        (
            "generators".into(),
            lattice.generators.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        ),
        ("rank".into(), lattice.rank().to_string()),
        ("torsion_order".into(), q.to_string()),
        (
            "torsion_witnesses".into(),
            lattice.torsion_witness.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        ),
    ];
    for (root, expo) in lattice.roots.iter().zip(&lattice.root_exponents) {
        summary.push((format!("root {root}"), format!("{expo:?}")));
    }

    let mut csv = String::from("ell,f_split,g_split,coprime\n");
    for ell in 0..q {
        let fs = split_subsequence(f, q, ell);
        let gs = split_subsequence(g, q, ell);
        let (fd, gd, verdict) = match (&fs, &gs) {
            (Err(Error::ZeroRecurrence), _) | (_, Err(Error::ZeroRecurrence)) => (
                fs.as_ref().map(|r| r.to_string()).unwrap_or_else(|_| "0".into()),
                gs.as_ref().map(|r| r.to_string()).unwrap_or_else(|_| "0".into()),
                "zero_recurrence".to_string(),
            ),
            (Err(e), _) => bail!("split failed at ell = {ell}: {e}"),
            (_, Err(e)) => bail!("split failed at ell = {ell}: {e}"),
            (Ok(fs), Ok(gs)) => {
                let verdict = coprimality_verdict(cfg, fs, gs);
                (fs.to_string(), gs.to_string(), verdict)
            }
        };
        summary.push((format!("coprime_ell_{ell}"), verdict.clone()));
        writeln!(csv, "{ell},\"{fd}\",\"{gd}\",{verdict}")?;
    }
    Ok(CmdOutput { csv, summary, undecided: 0 })
}

// ---- skolem ----

pub fn cmd_skolem(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    let f = require_f(cfg)?;
    let report = skolem_zeros(f, cfg.n_max)?;
    let mut csv = String::from("n\n");
    for n in &report.zeros {
        writeln!(csv, "{n}")?;
    }
    let mut summary = vec![
        ("zero_count".into(), report.zeros.len().to_string()),
        (
            "zeros".into(),
            report.zeros.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
        ),
        ("nondegenerate".into(), report.nondegenerate.to_string()),
    ];
    if report.nondegenerate {
        summary.push((
            "note".into(),
            "nondegenerate recurrence: the global zero set is finite".into(),
        ));
    } else if let Some(w) = report.witness {
        summary.push((
            "degeneracy_witness".into(),
            format!("{} / {} has order {}", w.root_a, w.root_b, w.ratio_order),
        ));
    }
    Ok(CmdOutput { csv, summary, undecided: 0 })
}

// ---- hadamard (S-integrality of quotients) ----

pub fn cmd_hadamard(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    let f = require_f(cfg)?;
    let g = require_g(cfg)?;
    let field = effective_field(cfg, &[f, g]);
    let s = s_from_primes(field, &cfg.s_primes);
    let report = s_integral_ratio(f, g, &s, cfg.n_max)?;

    let mut csv = String::from("n,integral,reason\n");
    for n in 0..=cfg.n_max {
        if report.zero_denominator.contains(&n) {
            writeln!(csv, "{n},,zero_denominator")?;
        } else {
            writeln!(csv, "{n},{},", u8::from(report.integral.contains(&n)))?;
        }
    }
    let summary = vec![
        ("integral_count".into(), report.integral.len().to_string()),
        (
            "integral_head".into(),
            report.integral.iter().take(20).map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
        ),
        ("zero_denominator_count".into(), report.zero_denominator.len().to_string()),
    ];
    Ok(CmdOutput { csv, summary, undecided: 0 })
}

fn effective_field(cfg: &ExperimentConfig, recs: &[&Recurrence]) -> Field {
    if cfg.field != Field::Rational {
        return cfg.field;
    }
    recs.iter()
        .map(|r| r.field())
        .find(|f| *f != Field::Rational)
        .unwrap_or(Field::Rational)
}

// ---- subspace ----

pub fn cmd_subspace(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    if cfg.forms.is_empty() {
        bail!("config needs at least one [form] block");
    }
    if cfg.point_coords.is_empty() {
        bail!("config needs a [point] block");
    }
    let family = HyperplaneFamily::new(cfg.forms.clone())?;
    if cfg.point_coords.len() != family.arity() {
        bail!(
            "point has {} coordinates but the forms have arity {}",
            cfg.point_coords.len(),
            family.arity()
        );
    }

    let mut points = Vec::new();
    let mut skipped_points = Vec::new();
    for n in 1..=cfg.n_max {
        let coords: Vec<FieldElement> = cfg.point_coords.iter().map(|r| r.eval(n)).collect();
        if coords.iter().all(|c| c.is_zero()) {
            skipped_points.push(n);
            continue;
        }
        points.push((n, ProjectivePoint::new(coords)?));
    }

    let field = points
        .first()
        .map(|(_, p)| p.field())
        .unwrap_or(cfg.field);
    let s = s_from_primes(field, &cfg.s_primes);
    let report = subspace_check(&family, &points, &s, &cfg.eps, cfg.precision)?;

    let mut csv = String::from("index,lhs_lo,lhs_hi,rhs_lo,rhs_hi,violated,undecided\n");
    for row in &report.rows {
        let (llo, lhi) = interval_bounds(&row.lhs);
        let (rlo, rhi) = interval_bounds(&row.rhs);
        let (violated, undecided) = match row.violated {
            Some(true) => ("1", "0"),
            Some(false) => ("0", "0"),
            None => ("", "1"),
        };
        writeln!(csv, "{},{},{},{},{},{},{}", row.index, llo, lhi, rlo, rhi, violated, undecided)?;
    }

    let skipped_forms: usize = report.rows.iter().map(|r| r.skipped_forms.len()).sum();
    let mut max_ratio = 0f64;
    for row in &report.rows {
        let (h_lo, _) = row.point_height.to_f64_bounds();
        let (_, f_hi) = row.max_form_height.to_f64_bounds();
        if h_lo > 0.0 {
            max_ratio = max_ratio.max(f_hi / h_lo);
        }
    }
    let summary = vec![
        ("rows".into(), report.rows.len().to_string()),
        ("violations".into(), report.violations.len().to_string()),
        (
            "violation_indices".into(),
            report.violations.iter().take(25).map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
        ),
        ("undecided".into(), report.undecided.len().to_string()),
        ("skipped_points".into(), skipped_points.len().to_string()),
        ("skipped_form_instances".into(), skipped_forms.to_string()),
        ("max_form_to_point_height_ratio".into(), fmt_f64(max_ratio)),
    ];
    Ok(CmdOutput { csv, summary, undecided: report.undecided.len() })
}

// ---- selftest ----

/// Deterministic linear congruential generator (so selftest output is
/// byte-identical across runs).
struct Lcg(u64);

impl Lcg {
    fn next_u64(&mut self) -> u64 {
        // Constants from Knuth's MMIX.
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }
}

pub fn cmd_selftest(cfg: &ExperimentConfig) -> anyhow::Result<CmdOutput> {
    let prec = cfg.precision;
    let mut rng = Lcg(0x5EED_CAFE_F00D_0001);

    // Rational elements of height up to 10^6.
    let mut checked_rational = 0u64;
    for _ in 0..10_000 {
        let num = rng.in_range(-1_000_000, 1_000_000);
        let den = rng.in_range(1, 1_000_000);
        if num == 0 {
            continue;
        }
        let x = FieldElement::from_int_ratio(num, den);
        let r = product_formula_residual(&x, prec)?;
        if !r.finite_is_zero() || !r.arch().contains_zero() {
            bail!("product formula residual nonzero for {x}");
        }
        checked_rational += 1;
    }

    // Quadratic elements over a few discriminants.
    let ds = [-7i64, -5, -3, 2, 3, 5];
    let mut checked_quadratic = 0u64;
    for i in 0..1_000 {
        let d = ds[i % ds.len()];
        let field = Field::quadratic(d)?;
        let a = BigRational::new(rng.in_range(-50, 50).into(), rng.in_range(1, 20).into());
        let b = BigRational::new(rng.in_range(-50, 50).into(), rng.in_range(1, 20).into());
        let x = FieldElement::quadratic(field, a, b)?;
        if x.is_zero() {
            continue;
        }
        let r = product_formula_residual(&x, prec)?;
        if !r.finite_is_zero() || !r.arch().contains_zero() {
            bail!("product formula residual nonzero for {x}");
        }
        checked_quadratic += 1;
    }

    // Interval route: per-place sums of log_abs must enclose zero tightly.
    let tight = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(30));
    let mut checked_interval = 0u64;
    for _ in 0..200 {
        let num = rng.in_range(-10_000, 10_000);
        let den = rng.in_range(1, 10_000);
        if num == 0 {
            continue;
        }
        let x = FieldElement::from_int_ratio(num, den);
        let mut acc = LogValue::zero(prec);
        for v in relevant_places(std::slice::from_ref(&x))? {
            acc = acc.add(&log_abs(&x, &v, prec)?);
        }
        let total = acc.total_interval(prec);
        if !total.contains_zero() || total.rad_rational() >= tight {
            bail!("per-place interval sum too wide for {x}");
        }
        checked_interval += 1;
    }

    let csv = format!(
        "kind,count,ok\nrational,{checked_rational},1\nquadratic,{checked_quadratic},1\ninterval,{checked_interval},1\n"
    );
    let summary = vec![
        ("rational_checked".into(), checked_rational.to_string()),
        ("quadratic_checked".into(), checked_quadratic.to_string()),
        ("interval_checked".into(), checked_interval.to_string()),
        ("result".into(), "ok".into()),
    ];
    Ok(CmdOutput { csv, summary, undecided: 0 })
}
