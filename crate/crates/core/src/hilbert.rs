//! Degree-m slices of the ideal (F, G), their exact dimensions, and the
//! greedy monomial basis of the quotient.
//!
//! For coprime homogeneous F, G of degree d in n+1 variables and m >= 2d the
//! quotient dimension has the closed form
//! `N' = C(m+n, n) - 2 C(m+n-d, n) + C(m+n-2d, n)`,
//! which the multiplication-matrix rank reproduces exactly.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::heights::abs_cmp_at_place;
use crate::matrix::{rank, solve_in_span, Echelon};
use crate::multipoly::{Monomial, MultiPoly};
use crate::places::Place;

/// Default cap on the number of degree-m monomials (dense exact linear
/// algebra cost grows quickly past this).
pub const DEFAULT_MONOMIAL_CAP: u128 = 3003;

/// C(top, k), with C = 0 for negative tops.
pub fn binomial(top: i64, k: u32) -> u128 {
    if top < 0 || (top as u128) < k as u128 {
        return 0;
    }
    let top = top as u128;
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

/// The closed-form complement dimension N' for coprime degree-d forms in
/// P^n at slice degree m (valid for all m by the Koszul resolution).
pub fn hilbert_prime(n: u32, d: u32, m: u32) -> u128 {
    let n_ = n as i64;
    let d_ = d as i64;
    let m_ = m as i64;
    let val = binomial(m_ + n_, n) as i128 - 2 * binomial(m_ + n_ - d_, n) as i128
        + binomial(m_ + n_ - 2 * d_, n) as i128;
    debug_assert!(val >= 0);
    val.max(0) as u128
}

/// The matching ideal dimension N = C(m+n, n) - N'.
pub fn hilbert_rank(n: u32, d: u32, m: u32) -> u128 {
    binomial(m as i64 + n as i64, n) - hilbert_prime(n, d, m)
}

/// All exponent vectors of total degree m in `nvars` variables, sorted in
/// graded-lex order.
pub fn monomials_of_degree(nvars: usize, m: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fill(&mut out, &mut current, 0, m);
    out.sort();
    out
}

fn fill(out: &mut Vec<Monomial>, current: &mut Vec<u32>, idx: usize, remaining: u32) {
    if idx + 1 == current.len() {
        current[idx] = remaining;
        out.push(Monomial(current.clone()));
        current[idx] = 0;
        return;
    }
    for e in 0..=remaining {
        current[idx] = e;
        fill(out, current, idx + 1, remaining - e);
    }
    current[idx] = 0;
}

/// Replace (F, G) by (F^{deg G}, G^{deg F}) so both have equal degree.
pub fn equalize_degrees(f: &MultiPoly, g: &MultiPoly) -> Result<(MultiPoly, MultiPoly)> {
    let df = f
        .homogeneous_degree()
        .ok_or_else(|| Error::Domain("degree equalization needs homogeneous input".into()))?;
    let dg = g
        .homogeneous_degree()
        .ok_or_else(|| Error::Domain("degree equalization needs homogeneous input".into()))?;
    Ok((f.pow(dg), g.pow(df)))
}

/// The degree-m slice of (F, G): multiplication rows, exact rank N, and the
/// complement dimension N'.
#[derive(Debug)]
pub struct IdealSlice {
    f: MultiPoly,
    g: MultiPoly,
    degree: u32,
    m: u32,
    monomials: Vec<Monomial>,
    col_of: BTreeMap<Monomial, usize>,
    rows: Vec<Vec<FieldElement>>,
    rank_n: usize,
    echelon: OnceLock<Echelon>,
}

impl IdealSlice {
    pub fn new(f: &MultiPoly, g: &MultiPoly, m: u32) -> Result<Self> {
        Self::with_cap(f, g, m, DEFAULT_MONOMIAL_CAP)
    }

    pub fn with_cap(f: &MultiPoly, g: &MultiPoly, m: u32, cap: u128) -> Result<Self> {
        if f.is_zero() || g.is_zero() {
            return Err(Error::ZeroArgument { op: "ideal_slice" });
        }
        if f.nvars() != g.nvars() {
            return Err(Error::Domain("generators live in different polynomial rings".into()));
        }
        let df = f
            .homogeneous_degree()
            .ok_or_else(|| Error::Domain("F is not homogeneous".into()))?;
        let dg = g
            .homogeneous_degree()
            .ok_or_else(|| Error::Domain("G is not homogeneous".into()))?;
        if df != dg {
            return Err(Error::Domain(format!(
                "generator degrees differ: {df} vs {dg} (equalize first)"
            )));
        }
        if df == 0 {
            return Err(Error::Domain("generators must be nonconstant".into()));
        }
        if m < df {
            return Err(Error::Domain(format!("slice degree {m} below generator degree {df}")));
        }
        let nvars = f.nvars();
        let n = (nvars - 1) as u32;
        let count = binomial(m as i64 + n as i64, n);
        if count > cap {
            return Err(Error::Domain(format!(
                "slice needs {count} monomials, above the cap {cap}; reduce m or raise the cap"
            )));
        }

        let monomials = monomials_of_degree(nvars, m);
        let col_of: BTreeMap<Monomial, usize> =
            monomials.iter().cloned().enumerate().map(|(i, mo)| (mo, i)).collect();

        let mut rows = Vec::new();
        for shift in monomials_of_degree(nvars, m - df) {
            for gen in [f, g] {
                let prod = gen.mul_term(&shift, &FieldElement::one());
                let mut row = vec![FieldElement::zero(); monomials.len()];
                for (mono, c) in prod.terms() {
                    row[col_of[mono]] = c.clone();
                }
                rows.push(row);
            }
        }
        let rank_n = rank(&rows);

        Ok(IdealSlice {
            f: f.clone(),
            g: g.clone(),
            degree: df,
            m,
            monomials,
            col_of,
            rows,
            rank_n,
            echelon: OnceLock::new(),
        })
    }

    pub fn generators(&self) -> (&MultiPoly, &MultiPoly) {
        (&self.f, &self.g)
    }

    pub fn generator_degree(&self) -> u32 {
        self.degree
    }

    pub fn slice_degree(&self) -> u32 {
        self.m
    }

    /// dim (F, G)_m.
    pub fn rank(&self) -> usize {
        self.rank_n
    }

    /// N' = dim of the degree-m quotient.
    pub fn complement_dim(&self) -> usize {
        self.monomials.len() - self.rank_n
    }

    /// The degree-m monomials indexing matrix columns, graded-lex.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    fn echelon(&self) -> &Echelon {
        self.echelon.get_or_init(|| {
            let mut e = Echelon::new(self.monomials.len());
            for row in &self.rows {
                e.insert(row.clone());
            }
            debug_assert_eq!(e.rank(), self.rank_n);
            e
        })
    }

    fn unit_vector(&self, mono: &Monomial) -> Vec<FieldElement> {
        let mut v = vec![FieldElement::zero(); self.monomials.len()];
        v[self.col_of[mono]] = FieldElement::one();
        v
    }

    /// Is this degree-m polynomial (as a coefficient vector) in the slice?
    pub fn contains_vector(&self, v: &[FieldElement]) -> bool {
        self.echelon().reduce(v).iter().all(|c| c.is_zero())
    }
}

/// Greedy monomial basis of the quotient: each pick minimizes `|u^i|_v`
/// subject to linear independence modulo the slice; graded-lex breaks ties.
///
/// The point is `(1, u_1, ..., u_n)`, so `u` must have one fewer entry than
/// the ring has variables. All absolute-value comparisons are exact.
pub fn greedy_basis(
    slice: &IdealSlice,
    u: &[FieldElement],
    v: &Place,
    _precision: u32,
) -> Result<Vec<Monomial>> {
    if u.len() + 1 != slice.f.nvars() {
        return Err(Error::Domain(format!(
            "expected {} unit arguments, got {}",
            slice.f.nvars() - 1,
            u.len()
        )));
    }
    if u.iter().any(|x| x.is_zero()) {
        return Err(Error::ZeroArgument { op: "greedy_basis" });
    }
    let n_prime = slice.complement_dim();
    let mut basis = Vec::with_capacity(n_prime);
    if n_prime == 0 {
        return Ok(basis);
    }

    // u^i with u_0 = 1: exponents of x_0 contribute nothing.
    let values: Vec<FieldElement> = slice
        .monomials()
        .iter()
        .map(|mono| {
            let mut acc = FieldElement::one();
            for (k, &e) in mono.0.iter().enumerate().skip(1) {
                if e > 0 {
                    acc = acc.mul(&u[k - 1].pow(e as i64).expect("nonnegative exponent"));
                }
            }
            acc
        })
        .collect();

    let mut working = slice.echelon().clone();
    let mut taken = vec![false; slice.monomials().len()];
    for _ in 0..n_prime {
        let mut best: Option<usize> = None;
        for (idx, mono) in slice.monomials().iter().enumerate() {
            if taken[idx] {
                continue;
            }
            // Strict minimality, so the graded-lex-first candidate wins ties.
            if let Some(b) = best {
                if abs_cmp_at_place(&values[idx], &values[b], v)? != std::cmp::Ordering::Less {
                    continue;
                }
            }
            if working.is_independent(&slice.unit_vector(mono)) {
                best = Some(idx);
            }
        }
        let idx = best.ok_or_else(|| {
            Error::Domain("slice complement smaller than its computed dimension".into())
        })?;
        taken[idx] = true;
        working.insert(slice.unit_vector(&slice.monomials()[idx]));
        basis.push(slice.monomials()[idx].clone());
    }
    Ok(basis)
}

/// For every degree-m monomial outside the basis, the coefficients c_{i,j}
/// making `x^i + Σ_j c_{i,j} x^{i_j}` a member of the slice; basis monomials
/// are omitted.
pub fn reduction_forms(
    slice: &IdealSlice,
    basis: &[Monomial],
) -> Result<BTreeMap<Monomial, Vec<FieldElement>>> {
    let ech = slice.echelon();
    let residues: Vec<Vec<FieldElement>> =
        basis.iter().map(|b| ech.reduce(&slice.unit_vector(b))).collect();
    {
        let mut check = Echelon::new(slice.monomials().len());
        for r in &residues {
            if !check.insert(r.clone()) {
                return Err(Error::Domain("basis is dependent modulo the slice".into()));
            }
        }
    }

    let mut out = BTreeMap::new();
    for mono in slice.monomials() {
        if basis.contains(mono) {
            continue;
        }
        let target: Vec<FieldElement> =
            ech.reduce(&slice.unit_vector(mono)).iter().map(|c| c.neg()).collect();
        let coeffs = solve_in_span(&residues, &target).ok_or_else(|| {
            Error::Domain("monomial residue outside the basis span".into())
        })?;
        // Exact membership re-check.
        let mut vector = slice.unit_vector(mono);
        for (c, b) in coeffs.iter().zip(basis) {
            let col = slice.col_of[b];
            vector[col] = vector[col].add(c);
        }
        if !slice.contains_vector(&vector) {
            return Err(Error::Domain("reduction form fails slice membership".into()));
        }
        out.insert(mono.clone(), coeffs);
    }
    Ok(out)
}
