//! Exact linear algebra for the substitution operator
//! `L h = h(t, x) - h(4t, 2x + t) / 2` on polynomials without constant term.
//!
//! Monomials `t^m x^n` with `1 <= m + n <= d` are ordered graded
//! lexicographically with `x > t`: by total degree, then by decreasing power
//! of `x`. For `d = 2` the order is `x, t, x^2, t x, t^2`.

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 12;

/// Exponent pair `(m, n)` of `t^m x^n`.
pub type Monomial = (usize, usize);

pub fn monomials(d: usize) -> Vec<Monomial> {
    (1..=d)
        .flat_map(|k| (0..=k).rev().map(move |n| (k - n, n)))
        .collect()
}

pub fn monomial_index((m, n): Monomial) -> usize {
    let k = m + n;
    // k(k+1)/2 - 1 monomials of lower positive degree precede this layer
    k * (k + 1) / 2 - 1 + m
}

pub fn monomial_label((m, n): Monomial) -> String {
    let part = |v: &str, p: usize| match p {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{p}"),
    };
    match (m, n) {
        (0, _) => part("x", n),
        (_, 0) => part("t", m),
        _ => format!("{} {}", part("t", m), part("x", n)),
    }
}

fn check_degree(d: usize) -> Result<()> {
    if (1..=MAX_DEGREE).contains(&d) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange(d))
    }
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Polynomial in `(t, x)` of total degree at most `d` and zero constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePoly {
    degree: usize,
    coeffs: Vec<BigRational>,
}

impl BivariatePoly {
    pub fn zero(d: usize) -> Result<Self> {
        check_degree(d)?;
        Ok(Self {
            degree: d,
            coeffs: vec![BigRational::zero(); monomials(d).len()],
        })
    }

    pub fn from_terms(d: usize, terms: &[(Monomial, BigRational)]) -> Result<Self> {
        let mut p = Self::zero(d)?;
        for ((m, n), q) in terms {
            if m + n == 0 || m + n > d {
                return Err(Error::InvalidArgument(format!(
                    "monomial t^{m} x^{n} outside degrees 1..={d}"
                )));
            }
            p.coeffs[monomial_index((*m, *n))] += q;
        }
        Ok(p)
    }

    /// `x - t/2`, the exponent of the canonical surfaces.
    pub fn x_minus_half_t(d: usize) -> Result<Self> {
        Self::from_terms(
            d,
            &[
                ((0, 1), BigRational::one()),
                ((1, 0), BigRational::new(-BigInt::one(), BigInt::from(2))),
            ],
        )
    }

    fn from_coeffs(degree: usize, coeffs: Vec<BigRational>) -> Self {
        Self { degree, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, mono: Monomial) -> BigRational {
        if mono.0 + mono.1 == 0 || mono.0 + mono.1 > self.degree {
            BigRational::zero()
        } else {
            self.coeffs[monomial_index(mono)].clone()
        }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        monomials(self.degree)
            .iter()
            .zip(&self.coeffs)
            .map(|(&(m, n), q)| q.to_f64().unwrap_or(f64::NAN) * t.powi(m as i32) * x.powi(n as i32))
            .sum()
    }

    /// `L` applied directly by substitution, independent of the matrix.
    pub fn apply_substitution(&self) -> Self {
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        for (&(m, n), q) in monomials(self.degree).iter().zip(&self.coeffs) {
            if q.is_zero() {
                continue;
            }
            for (mono, c) in substitution_column((m, n)) {
                out[monomial_index(mono)] += q * c;
            }
        }
        Self::from_coeffs(self.degree, out)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mono, q) in monomials(self.degree).into_iter().zip(&self.coeffs) {
            if q.is_zero() {
                continue;
            }
            let sign = if q.is_negative() { "-" } else { "+" };
            if first {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = q.abs();
            if !a.is_one() {
                write!(f, "{}*", format_rational(&a))?;
            }
            write!(f, "{}", monomial_label(mono))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// Nonzero entries of `L(t^m x^n)`.
fn substitution_column((m, n): Monomial) -> Vec<(Monomial, BigRational)> {
    let mut out = vec![((m, n), BigRational::one())];
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let scale = rational(4i64.pow(m as u32));
    for j in 0..=n {
        let c = &half * &scale * rational(binomial(n, j) * 2i64.pow(j as u32));
        let mono = (m + n - j, j);
        match out.iter_mut().find(|(k, _)| *k == mono) {
            Some((_, v)) => *v -= c,
            None => out.push((mono, -c)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    degree: usize,
    /// `rows[i][j]`: coefficient of monomial `i` in `L(monomial j)`.
    rows: Vec<Vec<BigRational>>,
}

pub fn build_substitution_matrix(d: usize) -> Result<SubstitutionMatrix> {
    check_degree(d)?;
    let monos = monomials(d);
    let size = monos.len();
    let mut rows = vec![vec![BigRational::zero(); size]; size];
    for (j, &mono) in monos.iter().enumerate() {
        for (target, c) in substitution_column(mono) {
            rows[monomial_index(target)][j] += c;
        }
    }
    Ok(SubstitutionMatrix { degree: d, rows })
}

impl SubstitutionMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    /// Image of monomial `mono` as a polynomial.
    pub fn column(&self, mono: Monomial) -> BivariatePoly {
        let j = monomial_index(mono);
        BivariatePoly::from_coeffs(self.degree, self.rows.iter().map(|r| r[j].clone()).collect())
    }

    pub fn apply(&self, h: &BivariatePoly) -> BivariatePoly {
        let coeffs = self
            .rows
            .iter()
            .map(|r| r.iter().zip(&h.coeffs).map(|(a, b)| a * b).sum())
            .collect();
        BivariatePoly::from_coeffs(self.degree, coeffs)
    }

    /// Every denominator is a power of two.
    pub fn dyadic(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|q| q.denom() & (q.denom() - BigInt::one()) == BigInt::zero())
    }

    /// Square block acting on the homogeneous monomials of degree `k`.
    pub fn layer(&self, k: usize) -> Vec<Vec<BigRational>> {
        let start = monomial_index((0, k));
        let range = start..start + k + 1;
        self.rows[range.clone()]
            .iter()
            .map(|r| r[range.clone()].to_vec())
            .collect()
    }

    /// Entries coupling different degrees. Zero since `L` preserves
    /// homogeneity.
    pub fn off_layer_nonzeros(&self) -> usize {
        let monos = monomials(self.degree);
        let mut count = 0;
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if a.0 + a.1 != b.0 + b.1 && !self.rows[i][j].is_zero() {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn is_leading_block_of(&self, larger: &SubstitutionMatrix) -> bool {
        let n = self.size();
        larger.size() >= n && (0..n).all(|i| self.rows[i][..] == larger.rows[i][..n])
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        let labels: Vec<String> = monomials(self.degree).into_iter().map(monomial_label).collect();
        writeln!(out, "row,{}", labels.join(","))?;
        for (label, row) in labels.iter().zip(&self.rows) {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(out, "{label},{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form in place. Returns the pivot columns.
fn rref(a: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in c..cols {
                    let delta = &factor * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(a: &[Vec<BigRational>]) -> usize {
    rref(&mut a.to_vec()).len()
}

/// Exact nullspace basis, each vector scaled so its first nonzero
/// coefficient (the `x` coefficient when present) is 1.
pub fn nullspace_basis(matrix: &SubstitutionMatrix) -> Vec<BivariatePoly> {
    let mut a = matrix.rows.clone();
    let pivots = rref(&mut a);
    let n = matrix.size();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][f].clone();
            }
            let lead = v.iter().find(|q| !q.is_zero()).cloned().unwrap_or_else(BigRational::one);
            for q in v.iter_mut() {
                *q /= &lead;
            }
            BivariatePoly::from_coeffs(matrix.degree, v)
        })
        .collect()
}

pub fn write_basis_csv(basis: &[BivariatePoly], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "vector,monomial,coefficient")?;
    for (i, p) in basis.iter().enumerate() {
        for (mono, q) in monomials(p.degree).into_iter().zip(&p.coeffs) {
            writeln!(out, "{i},{},{}", monomial_label(mono), format_rational(q))?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CascadeReport {
    pub h_t: String,
    pub h_x: String,
    /// `h_t(0,0) = -h_x(0,0) / 2` exactly.
    pub first_order_ok: bool,
    /// First nonzero coefficient of total degree at least 2, in monomial order.
    pub offending: Option<(Monomial, String)>,
    pub pass: bool,
}

pub fn derivative_cascade_check(h: &BivariatePoly) -> CascadeReport {
    let h_t = h.coeff((1, 0));
    let h_x = h.coeff((0, 1));
    let first_order_ok = h_t == -(&h_x / rational(2));
    let offending = monomials(h.degree)
        .into_iter()
        .zip(&h.coeffs)
        .find(|((m, n), q)| m + n >= 2 && !q.is_zero())
        .map(|(mono, q)| (mono, format_rational(q)));
    CascadeReport {
        h_t: format_rational(&h_t),
        h_x: format_rational(&h_x),
        first_order_ok,
        pass: first_order_ok && offending.is_none(),
        offending,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerRank {
    pub degree: usize,
    pub size: usize,
    pub rank: usize,
}

pub fn layer_ranks(matrix: &SubstitutionMatrix) -> Vec<LayerRank> {
    (1..=matrix.degree)
        .map(|k| LayerRank {
            degree: k,
            size: k + 1,
            rank: rank(&matrix.layer(k)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn canonical(d: usize) -> BivariatePoly {
        BivariatePoly::x_minus_half_t(d).unwrap()
    }

    #[test]
    fn monomial_order() {
        assert_eq!(monomials(2), vec![(0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]);
        for (i, &m) in monomials(MAX_DEGREE).iter().enumerate() {
            assert_eq!(monomial_index(m), i);
        }
        assert_eq!(monomials(MAX_DEGREE).len(), 90);
        assert_eq!(monomial_label((2, 3)), "t^2 x^3");
    }

    #[test]
    fn substitution_examples() {
        let m = build_substitution_matrix(2).unwrap();
        assert_eq!(m.column((0, 1)).to_string(), "-1/2*t");
        assert_eq!(m.column((1, 0)).to_string(), "-t");
        assert_eq!(m.column((0, 2)).to_string(), "-x^2 - 2*t x - 1/2*t^2");
        assert!(build_substitution_matrix(0).is_err());
        assert!(build_substitution_matrix(13).is_err());
    }

    #[test]
    fn matrix_structure() {
        let m = build_substitution_matrix(MAX_DEGREE).unwrap();
        assert!(m.dyadic());
        assert_eq!(m.off_layer_nonzeros(), 0);
        for d in 1..MAX_DEGREE {
            assert!(build_substitution_matrix(d).unwrap().is_leading_block_of(&build_substitution_matrix(d + 1).unwrap()));
        }
    }

    #[test]
    fn nullspace_is_one_dimensional() {
        for d in 1..=MAX_DEGREE {
            let basis = nullspace_basis(&build_substitution_matrix(d).unwrap());
            assert_eq!(basis.len(), 1, "degree {d}");
            assert_eq!(basis[0], canonical(d));
        }
        assert_eq!(canonical(3).to_string(), "x - 1/2*t");
    }

    #[test]
    fn layers_of_degree_two_and_above_are_invertible() {
        let ranks = layer_ranks(&build_substitution_matrix(MAX_DEGREE).unwrap());
        assert_eq!(ranks[0].rank, 1);
        assert!(ranks[1..].iter().all(|l| l.rank == l.size));
    }

    #[test]
    fn matrix_agrees_with_direct_substitution() {
        let m = build_substitution_matrix(5).unwrap();
        let h = BivariatePoly::from_terms(5, &[((2, 1), q(3, 1)), ((0, 4), q(-1, 3)), ((1, 0), q(7, 2))]).unwrap();
        assert_eq!(m.apply(&h), h.apply_substitution());
        // numeric cross-check of L h at a point
        let (t, x) = (0.3, -0.7);
        let lhs = m.apply(&h).eval(t, x);
        let rhs = h.eval(t, x) - 0.5 * h.eval(4.0 * t, 2.0 * x + t);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn cascade_examples() {
        let ok = derivative_cascade_check(&canonical(4));
        assert!(ok.pass);
        assert_eq!((ok.h_t.as_str(), ok.h_x.as_str()), ("-1/2", "1"));

        let sq = BivariatePoly::from_terms(4, &[((0, 2), q(1, 1))]).unwrap();
        let r = derivative_cascade_check(&sq);
        assert!(!r.pass);
        assert_eq!(r.offending, Some(((0, 2), "1".into())));

        let eps = BigRational::from_float(1e-9).unwrap();
        let mut terms = vec![((0, 1), q(1, 1)), ((1, 0), q(-1, 2))];
        terms.push(((2, 0), eps));
        let r = derivative_cascade_check(&BivariatePoly::from_terms(4, &terms).unwrap());
        assert!(r.first_order_ok && !r.pass);
        assert_eq!(r.offending.unwrap().0, (2, 0));
    }

    #[test]
    fn constant_term_is_unrepresentable() {
        assert!(BivariatePoly::from_terms(2, &[((0, 0), q(1, 1))]).is_err());
        assert!(BivariatePoly::from_terms(2, &[((3, 0), q(1, 1))]).is_err());
    }

    #[test]
    fn csv_uses_fractions() {
        let m = build_substitution_matrix(1).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "row,x,t\nx,0,0\nt,-1/2,-1\n");
        let mut buf = Vec::new();
        write_basis_csv(&nullspace_basis(&m), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "vector,monomial,coefficient\n0,x,1\n0,t,-1/2\n");
    }
}
