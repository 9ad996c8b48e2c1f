//! Multivariate polynomials over field elements: arithmetic, evaluation,
//! homogenization, contents, gcd (primitive/subresultant PRS) and resultants.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// Exponent vector with graded-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise division; None when any exponent would go negative.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables with nonzero stored coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    field: Field,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, field: Field::Rational, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: FieldElement) -> Self {
        let mut p = MultiPoly { nvars, field: c.field(), terms: BTreeMap::new() };
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(nvars, FieldElement::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars);
        let mut e = vec![0; nvars];
        e[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(e), FieldElement::one());
        MultiPoly { nvars, field: Field::Rational, terms }
    }

    pub fn from_terms(nvars: usize, iter: impl IntoIterator<Item = (Monomial, FieldElement)>) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in iter {
            p.add_term(&m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficients(&self) -> Vec<FieldElement> {
        self.terms.values().cloned().collect()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Degree m if every term has total degree m.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.degree());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// The graded-lex leading term.
    pub fn leading(&self) -> Option<(&Monomial, &FieldElement)> {
        self.terms.iter().next_back()
    }

    fn join_field(&mut self, other: Field) {
        match (self.field, other) {
            (f, g) if f == g => {}
            (Field::Rational, g) => self.field = g,
            (_, Field::Rational) => {}
            (f, g) => panic!("field mismatch in polynomial arithmetic: {f} vs {g}"),
        }
    }

    fn add_term(&mut self, m: &Monomial, c: &FieldElement) {
        if c.is_zero() {
            return;
        }
        self.join_field(c.field());
        match self.terms.get_mut(m) {
            Some(existing) => {
                *existing = existing.add(c);
                if existing.is_zero() {
                    self.terms.remove(m);
                }
            }
            None => {
                self.terms.insert(m.clone(), c.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(&m1.mul(m2), &c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m, &a.mul(c));
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &FieldElement) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (mm, cc) in &self.terms {
            out.add_term(&mm.mul(m), &cc.mul(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::Domain(format!(
                "evaluation point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars
            )));
        }
        let mut acc = FieldElement::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    term = term.mul(&x.pow(e as i64).expect("nonnegative power"));
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Substitute a value for one variable; the result no longer involves it.
    pub fn substitute(&self, var: usize, value: &FieldElement) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            let c2 = if e > 0 {
                c.mul(&value.pow(e as i64).expect("nonnegative power"))
            } else {
                c.clone()
            };
            out.add_term(&m2, &c2);
        }
        out
    }

    /// Homogenize with a fresh variable inserted at index 0.
    pub fn homogenize(&self, total_degree: u32) -> Result<Self> {
        let d = self.total_degree().unwrap_or(0);
        if total_degree < d {
            return Err(Error::Domain(format!(
                "homogenization degree {total_degree} below polynomial degree {d}"
            )));
        }
        let mut out = MultiPoly::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut e = Vec::with_capacity(self.nvars + 1);
            e.push(total_degree - m.degree());
            e.extend_from_slice(&m.0);
            out.add_term(&Monomial(e), c);
        }
        Ok(out)
    }

    /// Set the homogenizing variable (index 0) to 1 and drop it.
    pub fn dehomogenize(&self) -> Self {
        assert!(self.nvars >= 1);
        let mut out = MultiPoly::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            out.add_term(&Monomial(m.0[1..].to_vec()), c);
        }
        out
    }

    // ---- Univariate views ----

    /// Coefficient of `var^k`, as a polynomial with `var` zeroed out.
    pub fn coeff_of_power(&self, var: usize, k: u32) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[var] == k {
                let mut m2 = m.clone();
                m2.0[var] = 0;
                out.add_term(&m2, c);
            }
        }
        out
    }

    /// Leading coefficient with respect to one variable.
    pub fn lc_wrt(&self, var: usize) -> Self {
        self.coeff_of_power(var, self.degree_in(var))
    }

    pub fn mul_var_power(&self, var: usize, k: u32) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2.0[var] += k;
            out.add_term(&m2, c);
        }
        out
    }

    /// Exact polynomial division; None if `g` does not divide `self`.
    pub fn exact_div(&self, g: &Self) -> Option<Self> {
        if g.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut q = MultiPoly::zero(self.nvars);
        let (mg, cg) = {
            let (m, c) = g.leading().expect("nonzero divisor");
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (ml, cl) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let mq = ml.checked_div(&mg)?;
            let cq = cl.div(&cg).ok()?;
            q.add_term(&mq, &cq);
            rem = rem.sub(&g.mul_term(&mq, &cq));
        }
        Some(q)
    }

    /// Divide every coefficient by the graded-lex leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// The componentwise-minimal monomial dividing all terms, and the cofactor.
    pub fn monomial_content(&self) -> (Monomial, Self) {
        if self.is_zero() {
            return (Monomial::unit(self.nvars), self.clone());
        }
        let mut min = self.terms.keys().next().unwrap().0.clone();
        for m in self.terms.keys() {
            for (slot, &e) in min.iter_mut().zip(&m.0) {
                *slot = (*slot).min(e);
            }
        }
        let shift = Monomial(min);
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(&m.checked_div(&shift).unwrap(), c);
        }
        (shift, out)
    }
}

// ---- GCD machinery ----

/// Pseudo-remainder of f by g with respect to `var`:
/// `lc(g)^(deg f - deg g + 1) * f = q*g + r` with `deg_var r < deg_var g`.
pub fn pseudo_rem(f: &MultiPoly, g: &MultiPoly, var: usize) -> MultiPoly {
    debug_assert!(!g.is_zero());
    let n = g.degree_in(var);
    if n == 0 {
        // Division by something of degree zero in var leaves no remainder.
        return MultiPoly::zero(f.nvars());
    }
    let lcg = g.lc_wrt(var);
    let e = (f.degree_in(var) as i64 - n as i64 + 1).max(0) as u32;
    let mut r = f.clone();
    let mut count = 0u32;
    while !r.is_zero() && r.degree_in(var) >= n {
        let k = r.degree_in(var) - n;
        let lcr = r.lc_wrt(var);
        r = r.mul(&lcg).sub(&g.mul(&lcr.mul_var_power(var, k)));
        count += 1;
    }
    // Scale so the identity lc(g)^e * f = q*g + r holds with exponent e.
    for _ in count..e {
        r = r.mul(&lcg);
    }
    r
}

/// Content of f with respect to `var`: gcd of its coefficient polynomials.
pub fn content_wrt(f: &MultiPoly, var: usize) -> MultiPoly {
    let mut c = MultiPoly::zero(f.nvars());
    for k in 0..=f.degree_in(var) {
        let coeff = f.coeff_of_power(var, k);
        if !coeff.is_zero() {
            c = mpoly_gcd(&c, &coeff);
            if c.is_constant() && !c.is_zero() {
                return MultiPoly::one(f.nvars());
            }
        }
    }
    c
}

/// Multivariate gcd, normalized monic in graded-lex. gcd(0, g) = monic g.
pub fn mpoly_gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    if f.is_constant() || g.is_constant() {
        return MultiPoly::one(f.nvars());
    }
    // Highest variable actually appearing in either polynomial.
    let var = (0..f.nvars())
        .rev()
        .find(|&v| f.degree_in(v) > 0 || g.degree_in(v) > 0)
        .expect("nonconstant polynomials use some variable");

    if f.degree_in(var) == 0 {
        return mpoly_gcd(f, &content_wrt(g, var));
    }
    if g.degree_in(var) == 0 {
        return mpoly_gcd(g, &content_wrt(f, var));
    }

    let cf = content_wrt(f, var);
    let cg = content_wrt(g, var);
    let c = mpoly_gcd(&cf, &cg);
    let fp = f.exact_div(&cf).expect("content divides");
    let gp = g.exact_div(&cg).expect("content divides");

    // Subresultant PRS on the primitive parts.
    let (mut a, mut b) = if fp.degree_in(var) >= gp.degree_in(var) {
        (fp, gp)
    } else {
        (gp, fp)
    };
    let one = MultiPoly::one(f.nvars());
    let mut g_coef = one.clone();
    let mut h_coef = one.clone();
    loop {
        let delta = a.degree_in(var) - b.degree_in(var);
        let r = pseudo_rem(&a, &b, var);
        if r.is_zero() {
            break;
        }
        if r.degree_in(var) == 0 {
            // A nonzero remainder of degree 0 in var: the primitive parts are
            // coprime in var.
            b = r;
            break;
        }
        let divisor = g_coef.mul(&h_coef.pow(delta));
        let next = r.exact_div(&divisor).expect("subresultant divisor is exact");
        a = b;
        b = next;
        g_coef = a.lc_wrt(var);
        h_coef = if delta == 0 {
            h_coef
        } else {
            let num = g_coef.pow(delta);
            let den = h_coef.pow(delta - 1);
            num.exact_div(&den).expect("subresultant h update is exact")
        };
    }
    if b.degree_in(var) == 0 {
        return c.monic();
    }
    let pp = b.exact_div(&content_wrt(&b, var)).expect("content divides");
    c.mul(&pp).monic()
}

/// True when gcd(f, g) is a unit.
pub fn coprime(f: &MultiPoly, g: &MultiPoly) -> bool {
    if f.is_zero() || g.is_zero() {
        return false;
    }
    mpoly_gcd(f, g).is_constant()
}

/// Resultant of f and g with respect to `var` (Sylvester determinant with
/// fraction-free elimination). The result does not involve `var`.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: usize) -> MultiPoly {
    let m = f.degree_in(var) as usize;
    let n = g.degree_in(var) as usize;
    let nvars = f.nvars();
    if f.is_zero() || g.is_zero() {
        return MultiPoly::zero(nvars);
    }
    if m == 0 {
        return f.pow(n as u32);
    }
    if n == 0 {
        return g.pow(m as u32);
    }
    let size = m + n;
    let fc: Vec<MultiPoly> = (0..=m).map(|k| f.coeff_of_power(var, k as u32)).collect();
    let gc: Vec<MultiPoly> = (0..=n).map(|k| g.coeff_of_power(var, k as u32)).collect();
    let mut mat = vec![vec![MultiPoly::zero(nvars); size]; size];
    for (row, item) in mat.iter_mut().enumerate().take(n) {
        for k in 0..=m {
            item[row + m - k] = fc[k].clone();
        }
    }
    for row in 0..m {
        for k in 0..=n {
            mat[n + row][row + n - k] = gc[k].clone();
        }
    }
    det_bareiss(mat)
}

/// Fraction-free determinant over the polynomial ring.
fn det_bareiss(mut mat: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = mat.len();
    if n == 0 {
        return MultiPoly::one(0);
    }
    let nvars = mat[0][0].nvars();
    let mut sign = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if mat[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !mat[i][k].is_zero());
            match swap {
                Some(i) => {
                    mat.swap(k, i);
                    sign = !sign;
                }
                None => return MultiPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = mat[k][k].mul(&mat[i][j]).sub(&mat[i][k].mul(&mat[k][j]));
                mat[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            mat[i][k] = MultiPoly::zero(nvars);
        }
        prev = mat[k][k].clone();
    }
    let det = mat[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

// ---- Parsing and display ----

impl MultiPoly {
    /// Parse text like `2*x1^2*x2 - 3/4*x2 + 1` against an explicit variable
    /// list. Coefficients may be rationals or parenthesized quadratic
    /// elements `(a + b*sqrt(d))`.
    pub fn parse(s: &str, vars: &[&str]) -> Result<Self> {
        let nvars = vars.len();
        let mut out = MultiPoly::zero(nvars);
        for (sign, term) in split_terms(s)? {
            let (m, c) = parse_term(term.trim(), vars)?;
            let c = if sign { c.neg() } else { c };
            out.add_term(&m, &c);
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, vars: &'a [&'a str]) -> MultiPolyDisplay<'a> {
        MultiPolyDisplay { poly: self, vars }
    }
}

/// Split a sum into (is_negative, term) pieces, respecting parentheses.
fn split_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut pieces = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut neg = false;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parens in {s:?}")))?
            }
            '+' | '-' if depth == 0 && i > start => {
                // A sign splits terms unless it is part of an exponent or
                // immediately follows '*' or '^' (we never emit those forms).
                pieces.push((neg, &s[start..i]));
                neg = ch == '-';
                start = i + 1;
            }
            '-' if depth == 0 && i == start => {
                neg = true;
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parens in {s:?}")));
    }
    pieces.push((neg, &s[start..]));
    Ok(pieces)
}

fn parse_term(term: &str, vars: &[&str]) -> Result<(Monomial, FieldElement)> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coeff = FieldElement::one();
    let mut expo = vec![0u32; vars.len()];
    for factor in split_factors(term) {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {term:?}")));
        }
        // variable power?
        let (name, power) = match factor.split_once('^') {
            Some((n, p)) => {
                let power: u32 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                (n.trim(), power)
            }
            None => (factor, 1),
        };
        if let Some(idx) = vars.iter().position(|v| *v == name) {
            expo[idx] += power;
        } else if factor.contains('^') {
            return Err(Error::Parse(format!("unknown variable {name:?}")));
        } else {
            let c: FieldElement = factor
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {factor:?}")))?;
            coeff = coeff.mul(&c);
        }
    }
    Ok((Monomial(expo), coeff))
}

fn split_factors(term: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in term.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '*'
                if depth == 0 => {
                    out.push(&term[start..i]);
                    start = i + 1;
                }
            _ => {}
        }
    }
    out.push(&term[start..]);
    out
}

pub struct MultiPolyDisplay<'a> {
    poly: &'a MultiPoly,
    vars: &'a [&'a str],
}

impl fmt::Display for MultiPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let one = BigRational::one();
        let mut first = true;
        // Graded-lex descending reads most significant first.
        for (m, c) in self.poly.terms.iter().rev() {
            let mut lead = String::new();
            let is_const = m.degree() == 0;
            let coeff_str = if c.is_rational() && c.as_rational() == Some(&one) && !is_const {
                String::new()
            } else {
                format!("{c}")
            };
            if !coeff_str.is_empty() {
                lead.push_str(&coeff_str);
            }
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !lead.is_empty() {
                    lead.push('*');
                }
                lead.push_str(self.vars[idx]);
                if e > 1 {
                    lead.push_str(&format!("^{e}"));
                }
            }
            if first {
                write!(f, "{lead}")?;
                first = false;
            } else if let Some(rest) = lead.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {lead}")?;
            }
        }
        Ok(())
    }
}
