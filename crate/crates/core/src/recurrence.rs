//! Linear recurrence sequences F(n) = Σ p_i(n) α_i^n: exact evaluation,
//! non-degeneracy, the multiplicative structure of the roots, Laurent
//! normal forms, coprimality in the recurrence ring, exceptional indices of
//! specializations, subsequence splitting, zero search and S-integrality.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::factor::factorize_rational;
use crate::field::{Field, FieldElement};
use crate::multipoly::{coprime, resultant, Monomial, MultiPoly};
use crate::places::{finite_places_above, is_root_of_unity, ord_at, Place};

/// One recurrence term: coefficient polynomial in t and a nonzero root.
pub type Term = (MultiPoly, FieldElement);

/// F(n) = Σ p_i(n) α_i^n with pairwise distinct roots and nonzero p_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    terms: Vec<Term>,
}

impl Recurrence {
    /// Builds a recurrence, merging duplicate roots and dropping cancelled
    /// terms. An empty result is the zero recurrence and is rejected.
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let mut merged: Vec<Term> = Vec::new();
        for (p, root) in terms {
            if root.is_zero() {
                return Err(Error::ZeroArgument { op: "recurrence root" });
            }
            if p.nvars() != 1 {
                return Err(Error::Domain("coefficient polynomials must be univariate in t".into()));
            }
            match merged.iter_mut().find(|(_, r)| *r == root) {
                Some((q, _)) => *q = q.add(&p),
                None => merged.push((p, root)),
            }
        }
        merged.retain(|(p, _)| !p.is_zero());
        if merged.is_empty() {
            return Err(Error::ZeroRecurrence);
        }
        Ok(Recurrence { terms: merged })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn roots(&self) -> Vec<FieldElement> {
        self.terms.iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn field(&self) -> Field {
        self.terms
            .iter()
            .flat_map(|(p, r)| p.coefficients().into_iter().chain([r.clone()]))
            .find(|x| x.field() != Field::Rational)
            .map(|x| x.field())
            .unwrap_or(Field::Rational)
    }

    /// Exact value Σ p_i(n) α_i^n.
    pub fn eval(&self, n: u64) -> FieldElement {
        let n_el = FieldElement::from_i64(n as i64);
        let mut acc = FieldElement::zero();
        for (p, root) in &self.terms {
            let c = p.eval(std::slice::from_ref(&n_el)).expect("univariate");
            let pw = root.pow(n as i64).expect("nonzero root");
            acc = acc.add(&c.mul(&pw));
        }
        acc
    }

    /// Parse the one-term-per-line `poly_in_t ; root` format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (poly_s, root_s) = line
                .split_once(';')
                .ok_or_else(|| Error::Parse(format!("expected `poly ; root` in {line:?}")))?;
            let p = MultiPoly::parse(poly_s.trim(), &["t"])?;
            let root: FieldElement = root_s.trim().parse()?;
            terms.push((p, root));
        }
        Recurrence::new(terms)
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, root) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({})*({})^n", p.display(&["t"]), root)?;
            first = false;
        }
        Ok(())
    }
}

/// Witness that a ratio of two distinct roots is a root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyWitness {
    pub root_a: FieldElement,
    pub root_b: FieldElement,
    pub ratio_order: u32,
}

/// True iff no ratio of distinct roots is a root of unity.
pub fn is_nondegenerate(f: &Recurrence) -> Result<(bool, Option<DegeneracyWitness>)> {
    let roots = f.roots();
    for i in 0..roots.len() {
        for j in 0..roots.len() {
            if i == j {
                continue;
            }
            let ratio = roots[i].div(&roots[j])?;
            if let Some(order) = is_root_of_unity(&ratio)? {
                return Ok((
                    false,
                    Some(DegeneracyWitness {
                        root_a: roots[i].clone(),
                        root_b: roots[j].clone(),
                        ratio_order: order,
                    }),
                ));
            }
        }
    }
    Ok((true, None))
}

// ---- Multiplicative structure of the roots ----

/// Basis of the multiplicative group generated by the roots, with each root
/// written as torsion * product of generator powers.
#[derive(Debug, Clone)]
pub struct ExponentLattice {
    /// The roots this lattice describes, in input order.
    pub roots: Vec<FieldElement>,
    /// Multiplicatively independent generators.
    pub generators: Vec<FieldElement>,
    /// root_i = torsion_witness_i * prod_j generators_j ^ root_exponents_i_j.
    pub root_exponents: Vec<Vec<i64>>,
    /// Least q >= 1 with every torsion witness of order dividing q.
    pub torsion_order: u32,
    /// The root-of-unity part carried by each root.
    pub torsion_witness: Vec<FieldElement>,
}

impl ExponentLattice {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Exponent vector of a described root.
    pub fn exponents_of(&self, root: &FieldElement) -> Option<&[i64]> {
        let idx = self.roots.iter().position(|r| r == root)?;
        Some(&self.root_exponents[idx])
    }

    /// Exact reconstruction check for every root.
    pub fn reconstructs(&self, roots: &[FieldElement]) -> Result<bool> {
        for ((root, expo), zeta) in roots.iter().zip(&self.root_exponents).zip(&self.torsion_witness) {
            let mut acc = zeta.clone();
            for (g, &e) in self.generators.iter().zip(expo) {
                acc = acc.mul(&g.pow(e)?);
            }
            if !acc.sub(root).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Structure of the group generated by the roots.
///
/// Rational roots are handled exactly through prime factorization and a
/// Hermite normal form of the exponent matrix. Quadratic roots need a
/// candidate unit `eta` (from the experiment configuration) with |N(eta)|=1;
/// each root must then be torsion * rational * eta^k, which is verified
/// exactly. Anything else is rejected as unsupported.
pub fn group_structure(
    roots: &[FieldElement],
    quad_unit: Option<&FieldElement>,
) -> Result<ExponentLattice> {
    if roots.is_empty() {
        return Err(Error::Domain("no roots".into()));
    }
    if roots.iter().any(|r| r.is_zero()) {
        return Err(Error::ZeroArgument { op: "group_structure" });
    }
    let field = roots
        .iter()
        .find(|r| r.field() != Field::Rational)
        .map(|r| r.field())
        .unwrap_or(Field::Rational);

    // Decompose each root as zeta * s * eta^k with s rational positive.
    let mut unit_exponents: Vec<i64> = Vec::new();
    let mut rational_parts: Vec<BigRational> = Vec::new();
    let mut witnesses: Vec<FieldElement> = Vec::new();
    let eta = match quad_unit {
        Some(e) => {
            if e.is_rational() {
                return Err(Error::RelationDetectionUnsupported(
                    "candidate unit must be irrational".into(),
                ));
            }
            let n = e.norm();
            if n.abs() != BigRational::one() {
                return Err(Error::RelationDetectionUnsupported(format!(
                    "candidate unit must have norm +-1, got {n}"
                )));
            }
            Some(e.promote(field)?)
        }
        None => None,
    };

    for root in roots {
        let (zeta, s, k) = split_root(root, eta.as_ref(), field)?;
        witnesses.push(zeta);
        rational_parts.push(s);
        unit_exponents.push(k);
    }

    let torsion_orders = witnesses
        .iter()
        .map(|z| is_root_of_unity(z).map(|o| o.expect("witness is torsion")))
        .collect::<Result<Vec<u32>>>()?;
    let torsion_order = torsion_orders.into_iter().fold(1u32, lcm_u32);

    // Exponent matrix over the union prime support, plus one eta column.
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    let mut factored: Vec<std::collections::BTreeMap<u64, i64>> = Vec::new();
    for s in &rational_parts {
        let f = factorize_rational(s.numer(), s.denom())?;
        primes.extend(f.keys().copied());
        factored.push(f);
    }
    let prime_list: Vec<u64> = primes.into_iter().collect();
    let ncols = prime_list.len() + if eta.is_some() { 1 } else { 0 };
    let mut matrix: Vec<Vec<i64>> = Vec::new();
    for (f, &k) in factored.iter().zip(&unit_exponents) {
        let mut row = vec![0i64; ncols];
        for (idx, p) in prime_list.iter().enumerate() {
            row[idx] = f.get(p).copied().unwrap_or(0);
        }
        if eta.is_some() {
            row[ncols - 1] = k;
        }
        matrix.push(row);
    }

    let hnf = hnf_rows(matrix.clone());
    let mut generators = Vec::new();
    for row in &hnf {
        let mut g = FieldElement::one_of(field);
        for (idx, p) in prime_list.iter().enumerate() {
            if row[idx] != 0 {
                g = g.mul(&FieldElement::rational(BigRational::from(BigInt::from(*p))).pow(row[idx])?);
            }
        }
        if let Some(ref e) = eta {
            if row[ncols - 1] != 0 {
                g = g.mul(&e.pow(row[ncols - 1])?);
            }
        }
        generators.push(g);
    }

    let mut root_exponents = Vec::new();
    for row in &matrix {
        let coords = express_in_hnf(&hnf, row).ok_or_else(|| {
            Error::RelationDetectionUnsupported("root outside the generated lattice".into())
        })?;
        root_exponents.push(coords);
    }

    let lattice = ExponentLattice {
        roots: roots.to_vec(),
        generators,
        root_exponents,
        torsion_order,
        torsion_witness: witnesses,
    };
    debug_assert!(lattice.reconstructs(roots)?);
    Ok(lattice)
}

/// root = zeta * s * eta^k with zeta torsion, s a positive rational and k an
/// integer (k = 0 when no unit is supplied).
fn split_root(
    root: &FieldElement,
    eta: Option<&FieldElement>,
    field: Field,
) -> Result<(FieldElement, BigRational, i64)> {
    const UNIT_EXPONENT_BOUND: i64 = 64;
    let one = FieldElement::one_of(field);
    if let Some(r) = root.as_rational() {
        let zeta = if r.is_negative() { one.neg() } else { one };
        return Ok((zeta, r.abs(), 0));
    }
    let eta = eta.ok_or_else(|| {
        Error::RelationDetectionUnsupported(
            "quadratic roots need a candidate unit in the configuration".into(),
        )
    })?;
    for k in -UNIT_EXPONENT_BOUND..=UNIT_EXPONENT_BOUND {
        let ratio = root.promote(field)?.div(&eta.pow(k)?)?;
        for zeta in roots_of_unity(field)? {
            let s = ratio.div(&zeta)?;
            if let Some(r) = s.as_rational() {
                if r.is_positive() {
                    return Ok((zeta, r.clone(), k));
                }
            }
        }
    }
    Err(Error::RelationDetectionUnsupported(format!(
        "root {root} is not torsion * rational * unit^k for |k| <= {UNIT_EXPONENT_BOUND}"
    )))
}

/// All roots of unity of the field (orders divide 12).
fn roots_of_unity(field: Field) -> Result<Vec<FieldElement>> {
    let one = FieldElement::one_of(field);
    let mut out = vec![one.clone(), one.neg()];
    if let Field::Quadratic(d) = field {
        if d == -1 {
            let i = FieldElement::sqrt_gen(field)?;
            out.push(i.clone());
            out.push(i.neg());
        }
        if d == -3 {
            // primitive 6th and 3rd roots: (+-1 +- sqrt(-3))/2
            for (a, b) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                out.push(FieldElement::quadratic(
                    field,
                    BigRational::new(a.into(), 2.into()),
                    BigRational::new(b.into(), 2.into()),
                )?);
            }
        }
    }
    Ok(out)
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    use num_integer::Integer;
    a.lcm(&b)
}

/// Row-style Hermite normal form; returns the nonzero rows (a lattice basis).
pub fn hnf_rows(mut m: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    if m.is_empty() {
        return m;
    }
    let ncols = m[0].len();
    let nrows = m.len();
    let mut r = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // Euclid on column c below row r.
        loop {
            let mut min_row = None;
            let mut min_abs = i64::MAX;
            for (i, row) in m.iter().enumerate().skip(r) {
                let v = row[c].abs();
                if v != 0 && v < min_abs {
                    min_abs = v;
                    min_row = Some(i);
                }
            }
            let Some(pivot) = min_row else { break };
            m.swap(r, pivot);
            let mut done = true;
            let pivot_row = m[r].clone();
            for row in m.iter_mut().skip(r + 1) {
                if row[c] != 0 {
                    let q = row[c].div_euclid(pivot_row[c]);
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= q * p;
                    }
                    if row[c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[r][c] != 0 {
            if m[r][c] < 0 {
                for x in m[r].iter_mut() {
                    *x = -*x;
                }
            }
            // Reduce the rows above to put the column in normal form.
            let pivot_row = m[r].clone();
            for row in m.iter_mut().take(r) {
                let q = row[c].div_euclid(pivot_row[c]);
                if q != 0 {
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= q * p;
                    }
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

/// Solve `w = Σ z_i H_i` over Z for an HNF basis H; None if w is outside.
pub fn express_in_hnf(hnf: &[Vec<i64>], w: &[i64]) -> Option<Vec<i64>> {
    let mut rem: Vec<i64> = w.to_vec();
    let mut coords = Vec::with_capacity(hnf.len());
    for row in hnf {
        let pivot_col = row.iter().position(|&x| x != 0)?;
        let z = rem[pivot_col] / row[pivot_col];
        if rem[pivot_col] % row[pivot_col] != 0 {
            return None;
        }
        for (x, h) in rem.iter_mut().zip(row) {
            *x -= z * h;
        }
        coords.push(z);
    }
    rem.iter().all(|&x| x == 0).then_some(coords)
}

// ---- Laurent normal form ----

/// F written as x^shift * f0 in k[t][x_1..x_r], with no x_j dividing f0.
#[derive(Debug, Clone)]
pub struct LaurentForm {
    /// Polynomial in (t, x_1, ..., x_r); variable 0 is t.
    pub poly: MultiPoly,
    /// The stripped monomial x^shift (exponents may be negative).
    pub shift: Vec<i64>,
    /// Generators of the torsion-free group, for evaluation.
    pub generators: Vec<FieldElement>,
}

impl LaurentForm {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Evaluate x^shift(u(n)) * f0(n, u_1^n ... u_r^n), reversing the
    /// identification; equals the original recurrence at n.
    pub fn eval(&self, n: u64) -> Result<FieldElement> {
        let n_el = FieldElement::from_i64(n as i64);
        let mut point = vec![n_el];
        for g in &self.generators {
            point.push(g.pow(n as i64)?);
        }
        let mut acc = self.poly.eval(&point)?;
        for (g, &s) in self.generators.iter().zip(&self.shift) {
            if s != 0 {
                acc = acc.mul(&g.pow(s * n as i64)?);
            }
        }
        Ok(acc)
    }
}

/// Rewrite the recurrence as a Laurent polynomial over a torsion-free basis.
pub fn to_laurent(f: &Recurrence, lattice: &ExponentLattice) -> Result<LaurentForm> {
    if lattice.torsion_order != 1 {
        return Err(Error::Domain(format!(
            "torsion of order {} present: split the recurrence first",
            lattice.torsion_order
        )));
    }
    let r = lattice.rank();
    let exponents: Vec<&[i64]> = f
        .roots()
        .iter()
        .map(|root| {
            lattice
                .exponents_of(root)
                .ok_or_else(|| Error::Domain("lattice does not describe this recurrence".into()))
        })
        .collect::<Result<_>>()?;

    // Integer exponent vectors per term; shift by the componentwise minimum.
    let mut mins = vec![i64::MAX; r];
    for expo in &exponents {
        for (m, &e) in mins.iter_mut().zip(expo.iter()) {
            *m = (*m).min(e);
        }
    }
    if r == 0 {
        mins = Vec::new();
    }

    let nvars = r + 1;
    let mut poly = MultiPoly::zero(nvars);
    for ((p, _), expo) in f.terms().iter().zip(&exponents) {
        // p(t) * x^(expo - shift)
        let mut mono = vec![0u32; nvars];
        for j in 0..r {
            mono[j + 1] = u32::try_from(expo[j] - mins[j]).expect("shifted exponent nonnegative");
        }
        for (tm, c) in p.terms() {
            let mut e = mono.clone();
            e[0] = tm.0[0];
            poly = poly.add(&MultiPoly::from_terms(
                nvars,
                [(Monomial(e), c.clone())],
            ));
        }
    }
    // Strip any residual common x-monomial so that no x_j divides poly.
    // Common powers of t stay: only the multiplicative variables are units.
    let (extra, core) = poly.monomial_content();
    let mut shift = mins;
    for j in 0..r {
        shift[j] += extra.0[j + 1] as i64;
    }
    let poly = core.mul_var_power(0, extra.0[0]);

    Ok(LaurentForm { poly, shift, generators: lattice.generators.clone() })
}

/// Coprimality of F and G in the recurrence ring over the given torsion-free
/// lattice: coprimality of the stripped Laurent cores in k[t][x_1..x_r].
pub fn coprime_in_r_gamma(
    f: &Recurrence,
    g: &Recurrence,
    lattice_f: &LaurentForm,
    lattice_g: &LaurentForm,
) -> Result<bool> {
    let _ = (f, g);
    if lattice_f.rank() != lattice_g.rank() {
        return Err(Error::Domain("Laurent forms over different bases".into()));
    }
    Ok(coprime(&lattice_f.poly, &lattice_g.poly))
}

// ---- Exceptional indices of specializations ----

/// Indices n where the specializations f0(n, x), g0(n, x) fail to be coprime.
#[derive(Debug, Clone)]
pub struct ExceptionalReport {
    /// Verified exceptional indices (exhaustive and sound).
    pub exceptional: BTreeSet<u64>,
    /// Candidate indices from the resultant eliminant, when available.
    pub candidates: Option<BTreeSet<u64>>,
    /// False when the elimination path was skipped (rank too large).
    pub elimination_used: bool,
}

/// All n <= n_max with non-coprime specializations, with a resultant-based
/// candidate set for r <= 2 (two generic lines intersected when r = 2) and an
/// exhaustive per-n verification throughout.
pub fn exceptional_n(f0: &LaurentForm, g0: &LaurentForm, n_max: u64) -> Result<ExceptionalReport> {
    if f0.poly.nvars() != g0.poly.nvars() {
        return Err(Error::Domain("Laurent forms over different rings".into()));
    }
    let r = f0.poly.nvars() - 1;

    // Exhaustive per-n truth.
    let mut exceptional = BTreeSet::new();
    for n in 0..=n_max {
        let n_el = FieldElement::from_i64(n as i64);
        let fs = f0.poly.substitute(0, &n_el);
        let gs = g0.poly.substitute(0, &n_el);
        if fs.is_zero() || gs.is_zero() || !coprime(&fs, &gs) {
            exceptional.insert(n);
        }
    }

    let candidates = match r {
        1 => {
            let res = resultant(&f0.poly, &g0.poly, 1);
            Some(integer_zeros(&res, n_max)?)
        }
        2 => {
            // Substitute two generic rational lines x2 = a*x1 + b and
            // intersect the root sets of the two eliminants in t.
            let mut sets: Vec<BTreeSet<u64>> = Vec::new();
            for (a, b) in [(2i64, 3i64), (5, 7)] {
                let line = MultiPoly::var(3, 1)
                    .scale(&FieldElement::from_i64(a))
                    .add(&MultiPoly::constant(3, FieldElement::from_i64(b)));
                let fs = substitute_poly(&f0.poly, 2, &line);
                let gs = substitute_poly(&g0.poly, 2, &line);
                let res = resultant(&fs, &gs, 1);
                sets.push(integer_zeros(&res, n_max)?);
            }
            let both: BTreeSet<u64> = sets[0].intersection(&sets[1]).copied().collect();
            Some(both)
        }
        _ => None,
    };

    Ok(ExceptionalReport {
        exceptional,
        elimination_used: candidates.is_some(),
        candidates,
    })
}

/// Integer points n in [0, n_max] where the eliminant vanishes; all of them
/// when the eliminant is identically zero.
fn integer_zeros(eliminant: &MultiPoly, n_max: u64) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    if eliminant.is_zero() {
        out.extend(0..=n_max);
        return Ok(out);
    }
    for n in 0..=n_max {
        let n_el = FieldElement::from_i64(n as i64);
        let v = eliminant.substitute(0, &n_el);
        if v.is_zero() {
            out.insert(n);
        }
    }
    Ok(out)
}

/// Substitute variable `var` by a polynomial (same ring).
fn substitute_poly(f: &MultiPoly, var: usize, value: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(f.nvars());
    for (m, c) in f.terms() {
        let mut base = MultiPoly::constant(f.nvars(), c.clone());
        for (idx, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let factor = if idx == var { value.clone() } else { MultiPoly::var(f.nvars(), idx) };
            base = base.mul(&factor.pow(e));
        }
        out = out.add(&base);
    }
    out
}

// ---- Subsequence splitting ----

/// The recurrence n -> F(qn + l): roots α^q, coefficients p(qt + l) α^l.
pub fn split_subsequence(f: &Recurrence, q: u64, l: u64) -> Result<Recurrence> {
    if q == 0 || l >= q {
        return Err(Error::Domain(format!("need 0 <= l < q, got q = {q}, l = {l}")));
    }
    let mut terms = Vec::new();
    for (p, root) in f.terms() {
        let composed = compose_affine(p, q, l);
        let scale = root.pow(l as i64)?;
        terms.push((composed.scale(&scale), root.pow(q as i64)?));
    }
    Recurrence::new(terms)
}

/// p(q*t + l) for univariate p.
fn compose_affine(p: &MultiPoly, q: u64, l: u64) -> MultiPoly {
    let affine = MultiPoly::var(1, 0)
        .scale(&FieldElement::from_i64(q as i64))
        .add(&MultiPoly::constant(1, FieldElement::from_i64(l as i64)));
    let mut acc = MultiPoly::zero(1);
    for (m, c) in p.terms() {
        let powed = affine.pow(m.0[0]).scale(c);
        acc = acc.add(&powed);
    }
    acc
}

// ---- Zero search and S-integrality ----

#[derive(Debug, Clone)]
pub struct SkolemReport {
    pub zeros: BTreeSet<u64>,
    /// When true, the zero set is provably finite beyond any bound.
    pub nondegenerate: bool,
    pub witness: Option<DegeneracyWitness>,
}

/// Exact zero set in [0, n_max] by direct evaluation.
pub fn skolem_zeros(f: &Recurrence, n_max: u64) -> Result<SkolemReport> {
    let mut zeros = BTreeSet::new();
    for n in 0..=n_max {
        if f.eval(n).is_zero() {
            zeros.insert(n);
        }
    }
    let (nondegenerate, witness) = is_nondegenerate(f)?;
    Ok(SkolemReport { zeros, nondegenerate, witness })
}

#[derive(Debug, Clone)]
pub struct SIntegralReport {
    /// n with G(n) != 0 and F(n)/G(n) an S-integer.
    pub integral: BTreeSet<u64>,
    /// n with G(n) = 0, skipped.
    pub zero_denominator: BTreeSet<u64>,
}

/// All n in [1, n_max] (and n = 0) where F(n)/G(n) is an S-integer.
pub fn s_integral_ratio(
    f: &Recurrence,
    g: &Recurrence,
    s: &[Place],
    n_max: u64,
) -> Result<SIntegralReport> {
    let field = {
        let ff = f.field();
        let gf = g.field();
        match (ff, gf) {
            (a, b) if a == b => a,
            (Field::Rational, b) => b,
            (a, Field::Rational) => a,
            (a, b) => return Err(Error::FieldMismatch { left: a, right: b }),
        }
    };
    for arch in crate::places::archimedean_places(field) {
        if !s.contains(&arch) {
            return Err(Error::MissingArchimedeanPlaces);
        }
    }
    let s_primes: BTreeSet<u64> = s.iter().filter_map(|v| v.prime()).collect();

    let mut integral = BTreeSet::new();
    let mut zero_denominator = BTreeSet::new();
    for n in 0..=n_max {
        let gn = g.eval(n);
        if gn.is_zero() {
            zero_denominator.insert(n);
            continue;
        }
        let fn_ = f.eval(n);
        if fn_.is_zero() {
            integral.insert(n); // 0 is an S-integer
            continue;
        }
        let ratio = fn_.div(&gn)?.promote(field)?;
        if is_s_integral(&ratio, field, &s_primes)? {
            integral.insert(n);
        }
    }
    Ok(SIntegralReport { integral, zero_denominator })
}

/// ord_v(x) >= 0 at every finite place v outside the S-primes. Decided from
/// the reduced coordinate denominator, so no factorization is ever needed:
/// only the conductor prime 2 of Z[sqrt(d)] can be a spurious denominator
/// (e.g. (1 + sqrt(17))/2 is integral), and that one case is settled by an
/// exact valuation check.
fn is_s_integral(x: &FieldElement, field: Field, s_primes: &BTreeSet<u64>) -> Result<bool> {
    let one = num_bigint::BigUint::from(1u32);
    let mut d = x.denominator_lcm().magnitude().clone();
    for &p in s_primes {
        let pb = num_bigint::BigUint::from(p);
        while (&d % &pb) == num_bigint::BigUint::ZERO {
            d /= &pb;
        }
    }
    if d == one {
        return Ok(true);
    }
    if x.is_rational() {
        // Reduced rational denominators are genuine.
        return Ok(false);
    }
    let two = num_bigint::BigUint::from(2u32);
    let mut saw_two = false;
    while (&d % &two) == num_bigint::BigUint::ZERO {
        d /= &two;
        saw_two = true;
    }
    if d != one {
        // Odd coordinate denominators are genuine for quadratic elements.
        return Ok(false);
    }
    debug_assert!(saw_two);
    for v in finite_places_above(field, 2) {
        if ord_at(x, &v)? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}
