//! Exact linear algebra over field elements.
//!
//! Rational matrices take the fraction-free Bareiss route on cleared
//! denominators; quadratic-field matrices fall back to Gaussian elimination
//! with exact field division. Rank decisions are never floating-point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::FieldElement;

/// Exact rank of a row-major matrix.
pub fn rank(rows: &[Vec<FieldElement>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    if rows.iter().flatten().all(|c| c.is_rational()) {
        let int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| rational_row_to_int(r)).collect();
        rank_bareiss(int_rows)
    } else {
        let mut ech = Echelon::new(rows[0].len());
        for row in rows {
            ech.insert(row.clone());
        }
        ech.rank()
    }
}

/// Fraction-free Bareiss elimination; entries stay integral, divisions exact.
fn rank_bareiss(mut m: Vec<Vec<BigInt>>) -> usize {
    let nrows = m.len();
    let ncols = if nrows > 0 { m[0].len() } else { 0 };
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let pivot = (r..nrows).find(|&i| !m[i][c].is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap(r, pivot);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Incremental row-echelon structure with exact field arithmetic. Rows are
/// stored with their pivot normalized to 1.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Residue of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        debug_assert_eq!(v.len(), self.ncols);
        let mut out = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if out[piv].is_zero() {
                continue;
            }
            let factor = out[piv].clone();
            for (slot, r) in out.iter_mut().zip(row) {
                *slot = slot.sub(&factor.mul(r));
            }
        }
        out
    }

    /// Insert a vector; returns true when it was independent (rank grew).
    pub fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        let mut reduced = self.reduce(&v);
        let Some(piv) = reduced.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = reduced[piv].inv().expect("nonzero pivot");
        for c in reduced.iter_mut() {
            *c = c.mul(&inv);
        }
        self.rows.push(reduced);
        self.pivots.push(piv);
        true
    }

    /// Would inserting `v` increase the rank?
    pub fn is_independent(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().any(|c| !c.is_zero())
    }
}

/// Solve `Σ_j c_j * basis_j = target` when the basis vectors are linearly
/// independent; None if the target is outside their span.
pub fn solve_in_span(
    basis: &[Vec<FieldElement>],
    target: &[FieldElement],
) -> Option<Vec<FieldElement>> {
    let k = basis.len();
    if k == 0 {
        return target.iter().all(|c| c.is_zero()).then(Vec::new);
    }
    let n = target.len();
    // Augmented rows: one equation per coordinate.
    let mut rows: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            let mut row: Vec<FieldElement> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();

    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else {
            return None; // basis not independent; caller invariant violated
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().ok()?;
        for j in c..=k {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        for i in 0..n {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..=k {
                    let sub = f.mul(&rows[r][j]);
                    rows[i][j] = rows[i][j].sub(&sub);
                }
            }
        }
        pivot_rows.push(r);
        r += 1;
    }
    // Consistency: all rows beyond the pivots must have zero RHS.
    for row in rows.iter().skip(r) {
        if !row[k].is_zero() {
            return None;
        }
    }
    Some((0..k).map(|c| rows[pivot_rows[c]][k].clone()).collect())
}

/// Clears denominators of a rational row (scaling leaves rank unchanged).
pub fn rational_row_to_int(row: &[FieldElement]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in row {
        let r = c.as_rational().expect("rational entries");
        lcm = lcm.lcm(r.denom());
    }
    row.iter()
        .map(|c| {
            let r = c.as_rational().unwrap();
            (r * BigRational::from(lcm.clone())).to_integer()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use proptest::prelude::*;

    fn fe(n: i64, d: i64) -> FieldElement {
        FieldElement::from_int_ratio(n, d)
    }

    fn row(v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&n| fe(n, 1)).collect()
    }

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(rank(&[row(&[1, 0]), row(&[0, 1])]), 2);
        assert_eq!(rank(&[row(&[1, 2]), row(&[2, 4])]), 1);
        assert_eq!(rank(&[row(&[0, 0])]), 0);
        assert_eq!(rank(&[row(&[1, 2, 3]), row(&[4, 5, 6]), row(&[7, 8, 9])]), 2);
    }

    #[test]
    fn rank_with_fractions() {
        let independent = vec![
            vec![fe(1, 2), fe(1, 3)],
            vec![fe(3, 2), fe(1, 5)],
        ];
        assert_eq!(rank(&independent), 2);
        let dependent = vec![
            vec![fe(1, 2), fe(1, 3)],
            vec![fe(3, 2), fe(1, 1)], // = 3 * first row
        ];
        assert_eq!(rank(&dependent), 1);
    }

    #[test]
    fn rank_over_quadratic_field() {
        let f = Field::quadratic(5).unwrap();
        let s = FieldElement::sqrt_gen(f).unwrap();
        // (1, sqrt5), (sqrt5, 5): second = sqrt5 * first: rank 1.
        let rows = vec![
            vec![FieldElement::one_of(f), s.clone()],
            vec![s.clone(), s.mul(&s)],
        ];
        assert_eq!(rank(&rows), 1);
    }

    #[test]
    fn echelon_incremental() {
        let mut e = Echelon::new(3);
        assert!(e.insert(row(&[1, 2, 3])));
        assert!(e.insert(row(&[0, 1, 1])));
        assert!(!e.insert(row(&[1, 3, 4]))); // sum of the first two
        assert_eq!(e.rank(), 2);
        assert!(e.is_independent(&row(&[0, 0, 1])));
    }

    #[test]
    fn solve_in_span_roundtrip() {
        let basis = vec![row(&[1, 0, 2]), row(&[0, 1, 1])];
        // target = 3*b0 - 2*b1
        let target = row(&[3, -2, 4]);
        let c = solve_in_span(&basis, &target).unwrap();
        assert_eq!(c, vec![fe(3, 1), fe(-2, 1)]);
        // outside the span
        assert!(solve_in_span(&basis, &row(&[0, 0, 1])).is_none());
    }

    proptest! {
        // Bareiss rank agrees with field-Gaussian rank on random matrices.
        #[test]
        fn bareiss_matches_gaussian(entries in proptest::collection::vec(-9i64..=9, 12)) {
            let rows: Vec<Vec<FieldElement>> = entries
                .chunks(4)
                .map(|ch| ch.iter().map(|&n| fe(n, 1)).collect())
                .collect();
            let bareiss = rank(&rows);
            let mut ech = Echelon::new(4);
            for r in &rows {
                ech.insert(r.clone());
            }
            prop_assert_eq!(bareiss, ech.rank());
        }
    }
}
