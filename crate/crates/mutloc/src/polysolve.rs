//! Polynomial arithmetic, Sylvester resultants for the scale-elimination
//! system, and real-root extraction for polynomials of degree up to 8.
//!
//! The scale system couples three unknowns `s1, s2, s3`. Eliminating `s2`
//! from two monic quadratics gives a bivariate polynomial in `(s1, s3)`;
//! eliminating `s3` against the remaining quadratic collapses it to a single
//! univariate polynomial of degree at most 8 in `s1`, which is rooted
//! numerically (no closed form exists at that degree).

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

/// Relative threshold for trimming a polynomial's leading coefficients.
const TRIM_REL_TOL: f64 = 1e-14;
/// Relative threshold below which a leading coefficient is deflated away
/// before root finding. Special geometries (e.g. symmetric rigs) collapse the
/// degree and leave near-zero leading terms.
const DEFLATE_REL_TOL: f64 = 1e-12;
/// Relative spacing below which two real roots are reported as one value.
const CLUSTER_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("zero polynomial has no well-defined roots")]
    ZeroPolynomial,
}

/// The scale unknowns a polynomial can be expressed in. `S2` only ever
/// appears as an eliminated variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    S1,
    S2,
    S3,
}

/// Dense univariate polynomial with ascending coefficients, tagged with its
/// variable.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    var: Var,
    coeffs: Vec<f64>,
}

impl UniPoly {
    /// Builds a polynomial from ascending coefficients, trimming leading
    /// coefficients below `1e-14` of the largest magnitude.
    pub fn new(var: Var, coeffs: Vec<f64>) -> Self {
        let mut p = Self { var, coeffs };
        p.trim();
        p
    }

    pub fn constant(var: Var, c: f64) -> Self {
        Self::new(var, vec![c])
    }

    /// Monic polynomial with the given roots, expanded by convolution.
    pub fn from_roots(var: Var, roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self::new(var, coeffs)
    }

    fn trim(&mut self) {
        let max = self.max_abs_coeff();
        let tol = TRIM_REL_TOL * max;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().abs() <= tol {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::constant(self.var, 0.0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        UniPoly::new(self.var, coeffs)
    }
}

/// Dense bivariate polynomial in `(s1, s3)`: `coeffs[i][j] * s1^i * s3^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<Vec<f64>>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self {
            coeffs: vec![vec![0.0]],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            coeffs: vec![vec![c]],
        }
    }

    pub fn from_grid(coeffs: Vec<Vec<f64>>) -> Self {
        assert!(!coeffs.is_empty() && coeffs.iter().all(|row| row.len() == coeffs[0].len()));
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// Embeds a univariate polynomial in `s1` (rows) or `s3` (columns).
    pub fn from_uni(p: &UniPoly) -> Self {
        match p.var() {
            Var::S1 => Self::from_grid(p.coeffs().iter().map(|&c| vec![c]).collect()),
            Var::S3 => Self::from_grid(vec![p.coeffs().to_vec()]),
            Var::S2 => panic!("s2 is the eliminated variable, not a free one"),
        }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().iter().all(|&c| c == 0.0) {
            self.coeffs.pop();
        }
        while self.coeffs[0].len() > 1 && self.coeffs.iter().all(|row| *row.last().unwrap() == 0.0)
        {
            for row in &mut self.coeffs {
                row.pop();
            }
        }
    }

    pub fn degree_s1(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree_s3(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|row| row.iter().all(|&c| c == 0.0))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, s1: f64, s3: f64) -> f64 {
        // Horner in s1 over row polynomials in s3.
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            acc * s1 + row.iter().rev().fold(0.0, |r, &c| r * s3 + c)
        })
    }

    /// Coefficient of each `s3` power as a univariate polynomial in `s1`,
    /// ascending.
    pub fn s3_coefficients(&self) -> Vec<UniPoly> {
        (0..=self.degree_s3())
            .map(|j| {
                UniPoly::new(
                    Var::S1,
                    self.coeffs.iter().map(|row| row[j]).collect(),
                )
            })
            .collect()
    }

    fn add(&self, other: &Self) -> Self {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let cols = self.coeffs[0].len().max(other.coeffs[0].len());
        let mut grid = vec![vec![0.0; cols]; rows];
        for (i, row) in grid.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self.coeff(i, j) + other.coeff(i, j);
            }
        }
        Self::from_grid(grid)
    }

    fn sub(&self, other: &Self) -> Self {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let cols = self.coeffs[0].len().max(other.coeffs[0].len());
        let mut grid = vec![vec![0.0; cols]; rows];
        for (i, row) in grid.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self.coeff(i, j) - other.coeff(i, j);
            }
        }
        Self::from_grid(grid)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let rows = self.coeffs.len() + other.coeffs.len() - 1;
        let cols = self.coeffs[0].len() + other.coeffs[0].len() - 1;
        let mut grid = vec![vec![0.0; cols]; rows];
        for (i1, row1) in self.coeffs.iter().enumerate() {
            for (j1, &c1) in row1.iter().enumerate() {
                if c1 == 0.0 {
                    continue;
                }
                for (i2, row2) in other.coeffs.iter().enumerate() {
                    for (j2, &c2) in row2.iter().enumerate() {
                        grid[i1 + i2][j1 + j2] += c1 * c2;
                    }
                }
            }
        }
        Self::from_grid(grid)
    }
}

impl std::ops::Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: Self) -> BiPoly {
        BiPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: Self) -> BiPoly {
        BiPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: Self) -> BiPoly {
        BiPoly::mul(self, rhs)
    }
}

/// Determinant of a square matrix of polynomials, by Laplace expansion along
/// the first column with zero-entry pruning. Matrices here are at most 6x6
/// and sparse, so the recursion stays small.
fn poly_det(m: &[Vec<BiPoly>]) -> BiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = BiPoly::zero();
    for (i, row) in m.iter().enumerate() {
        if row[0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BiPoly>> = m
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| r[1..].to_vec())
            .collect();
        let term = &row[0] * &poly_det(&minor);
        det = if i % 2 == 0 {
            &det + &term
        } else {
            &det - &term
        };
    }
    det
}

/// Sylvester determinant of two polynomials in an eliminated variable, given
/// as ascending coefficient lists over `(s1, s3)`-polynomials. The formal
/// degrees are `p.len()-1` and `q.len()-1`.
fn sylvester_det(p: &[BiPoly], q: &[BiPoly]) -> BiPoly {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let size = dp + dq;
    let mut m = vec![vec![BiPoly::zero(); size]; size];
    for (shift, row) in m.iter_mut().enumerate().take(dq) {
        for (k, c) in p.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
    }
    for (shift, row) in m.iter_mut().skip(dq).enumerate() {
        for (k, c) in q.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
    }
    poly_det(&m)
}

/// Resultant of two monic quadratics in `s2`, one with coefficients
/// polynomial in `s1` and one with coefficients polynomial in `s3`, as the
/// expanded 4x4 Sylvester determinant over `(s1, s3)`.
///
/// The result vanishes at exactly the `(s1, s3)` values where the parent
/// quadratics share an `s2` root.
pub fn resultant_quadratics(a: &[UniPoly; 3], b: &[UniPoly; 3]) -> BiPoly {
    assert!(
        a[2].degree() == 0 && (a[2].coeffs()[0] - 1.0).abs() < 1e-12,
        "first quadratic must be monic in s2"
    );
    assert!(
        b[2].degree() == 0 && (b[2].coeffs()[0] - 1.0).abs() < 1e-12,
        "second quadratic must be monic in s2"
    );
    let p: Vec<BiPoly> = a.iter().map(BiPoly::from_uni).collect();
    let q: Vec<BiPoly> = b.iter().map(BiPoly::from_uni).collect();
    sylvester_det(&p, &q)
}

/// Resultant in `s3` of a quartic `r(s1, s3)` and a quadratic in `s3` with
/// coefficients polynomial in `s1`, as the expanded 6x6 Sylvester
/// determinant: a univariate polynomial of degree at most 8 in `s1`.
pub fn resultant_quartic_quadratic(r: &BiPoly, g: &[UniPoly; 3]) -> UniPoly {
    assert!(r.degree_s3() <= 4, "first argument must have degree <= 4 in s3");
    assert!(
        !g[2].is_zero(),
        "second argument must have degree exactly 2 in s3"
    );
    let mut p: Vec<BiPoly> = r
        .s3_coefficients()
        .iter()
        .map(BiPoly::from_uni)
        .collect();
    p.resize(5, BiPoly::zero());
    let q: Vec<BiPoly> = g.iter().map(BiPoly::from_uni).collect();
    let det = sylvester_det(&p, &q);
    assert_eq!(det.degree_s3(), 0, "elimination must remove s3 entirely");
    let out = UniPoly::new(Var::S1, det.coeffs.iter().map(|row| row[0]).collect());
    // The physical system's Bezout bound: structurally capped when the inputs
    // have the shapes produced by the scale system.
    let structural = r.degree_s1() + r.degree_s3() <= 4
        && g[0].degree() <= 2
        && g[1].degree() == 0
        && g[2].degree() == 0;
    debug_assert!(!structural || out.degree() <= 8);
    out
}

/// Real roots of a univariate polynomial.
#[derive(Debug, Clone)]
pub struct RootSet {
    /// Distinct real roots, ascending.
    pub real_roots: Vec<f64>,
    /// Relative imaginary-part tolerance used to accept near-real roots.
    pub imag_tol: f64,
    /// Degree of the polynomial after deflation.
    pub degree: usize,
}

/// Every real root of `p`, computed from the balanced companion matrix's
/// eigenvalues, each polished by a few Newton steps.
///
/// A complex root with `|Im| <= imag_tol * max(1, |Re|)` is accepted as real
/// and its real part returned. Near-identical values (relative spacing below
/// `1e-8`) are reported once.
pub fn real_roots(p: &UniPoly, imag_tol: f64) -> Result<RootSet, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    // Deflate a near-vanishing leading coefficient rather than dividing by it.
    let max = p.max_abs_coeff();
    let mut coeffs: Vec<f64> = p.coeffs().to_vec();
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() <= DEFLATE_REL_TOL * max {
        coeffs.pop();
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(RootSet {
            real_roots: vec![],
            imag_tol,
            degree,
        });
    }

    let lead = *coeffs.last().unwrap();
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 0..degree {
        companion[(i, degree - 1)] = -monic[i];
        if i + 1 < degree {
            companion[(i + 1, i)] = 1.0;
        }
    }
    balance(&mut companion);
    let eigs = companion.complex_eigenvalues();

    let poly = UniPoly::new(p.var(), coeffs);
    let deriv = poly.derivative();
    let mut roots: Vec<f64> = Vec::new();
    for &eig in eigs.iter() {
        let z = newton_polish(&poly, &deriv, eig);
        if z.im.abs() <= imag_tol * z.re.abs().max(1.0) {
            roots.push(z.re);
        }
    }
    let real_roots = cluster_sorted(&mut roots);
    Ok(RootSet {
        real_roots,
        imag_tol,
        degree,
    })
}

fn newton_polish(p: &UniPoly, dp: &UniPoly, mut z: Complex<f64>) -> Complex<f64> {
    let mut best = z;
    let mut best_residual = p.eval_complex(z).norm();
    for _ in 0..4 {
        let f = p.eval_complex(z);
        let d = dp.eval_complex(z);
        if d.norm() <= f64::MIN_POSITIVE.sqrt() {
            break;
        }
        let step = f / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        let residual = p.eval_complex(z).norm();
        if residual < best_residual {
            best = z;
            best_residual = residual;
        } else {
            break;
        }
    }
    best
}

/// Sorts in place and merges runs of values with relative spacing below
/// `CLUSTER_REL_TOL`, reporting each cluster's mean.
fn cluster_sorted(values: &mut Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len()
            && values[j] - values[j - 1] <= CLUSTER_REL_TOL * values[j].abs().max(1.0)
        {
            j += 1;
        }
        let mean = values[i..j].iter().sum::<f64>() / (j - i) as f64;
        out.push(mean);
        i = j;
    }
    out
}

/// Balances a matrix by diagonal similarity scaling with powers of two, so
/// row and column norms are comparable before eigenvalue extraction.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix_sq = 4.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].abs()).sum();
            let row: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let start = col + row;
            let mut factor = 1.0;
            while col < row / 2.0 {
                factor *= 2.0;
                col *= radix_sq;
            }
            while col > row * 2.0 {
                factor /= 2.0;
                col /= radix_sq;
            }
            if (col + row) / factor < 0.95 * start {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= factor;
                }
                for j in 0..n {
                    a[(j, i)] *= factor;
                }
            }
        }
        if done {
            break;
        }
    }
}
