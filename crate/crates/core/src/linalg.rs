//! Dense linear algebra over MPFR floats, plus exact rational minors for the
//! lifted support matrix.

use std::cmp::Ordering;

use rug::float::Round;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::fewnomial::ExponentVector;
use crate::precision::{pow2, Interval, PrecisionBudget};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Float>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Float::with_val(prec, 0); rows * cols],
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Matrix::zeros(n, n, prec);
        for i in 0..n {
            m.set(i, i, Float::with_val(prec, 1));
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Float>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_f64_rows(rows: &[&[f64]], prec: u32) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| Float::with_val(prec, v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Float] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Float> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, 2);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len(), 2);
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m.set(i, k, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn mul(&self, other: &Matrix, prec: u32) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols, prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Float::with_val(prec, 0);
                for k in 0..self.cols {
                    acc += Float::with_val(prec, self.get(i, k) * other.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Float], prec: u32) -> Vec<Float> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Float::with_val(prec, 0);
                for (a, x) in self.row(i).iter().zip(v) {
                    acc += Float::with_val(prec, a * x);
                }
                acc
            })
            .collect()
    }

    pub fn max_abs(&self) -> Float {
        let mut best = Float::with_val(64, 0);
        for v in &self.data {
            if v.cmp_abs(&best) == Some(Ordering::Greater) {
                best = Float::with_val(v.prec(), &*v.as_abs());
            }
        }
        best
    }

    /// Product of column Euclidean norms, rounded up.
    pub fn hadamard_bound(&self) -> Float {
        let mut bound = Float::with_val(64, 1);
        for j in 0..self.cols {
            let mut sq = Float::with_val(64, 0);
            for i in 0..self.rows {
                let v = self.get(i, j);
                sq = Float::with_val_round(64, &sq + v * v, Round::Up).0;
            }
            let norm = Float::with_val_round(64, sq.sqrt_ref(), Round::Up).0;
            bound = Float::with_val_round(64, &bound * &norm, Round::Up).0;
        }
        bound
    }

    pub fn to_rationals(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|v| v.to_rational().expect("finite matrix entry"))
                    .collect()
            })
            .collect()
    }
}

fn guard_bits(n: usize) -> u32 {
    16 + 2 * (usize::BITS - n.leading_zeros())
}

/// Determinant by LU factorization with full pivoting.
pub fn determinant(m: &Matrix, budget: &PrecisionBudget) -> Float {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let prec = budget.mantissa + guard_bits(n);
    if n == 0 {
        return Float::with_val(budget.mantissa, 1);
    }
    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|i| m.row(i).iter().map(|v| Float::with_val(prec, v)).collect())
        .collect();
    let mut det = Float::with_val(prec, 1);
    for k in 0..n {
        let (mut pi, mut pj) = (k, k);
        for i in k..n {
            for j in k..n {
                if a[i][j].cmp_abs(&a[pi][pj]) == Some(Ordering::Greater) {
                    pi = i;
                    pj = j;
                }
            }
        }
        if a[pi][pj].is_zero() {
            return Float::with_val(budget.mantissa, 0);
        }
        if pi != k {
            a.swap(pi, k);
            det = -det;
        }
        if pj != k {
            for row in a.iter_mut() {
                row.swap(pj, k);
            }
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = Float::with_val(prec, &a[i][k] / &pivot);
            for j in k + 1..n {
                let t = Float::with_val(prec, &factor * &a[k][j]);
                a[i][j] -= t;
            }
            a[i][k] = Float::with_val(prec, 0);
        }
    }
    Float::with_val(budget.mantissa, det)
}

/// Numerical rank. A pivot counts as zero when its magnitude is at most
/// `2^{-mantissa/2}` times the largest entry of its row in the input.
pub fn rank(m: &Matrix, budget: &PrecisionBudget) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let prec = budget.mantissa + guard_bits(rows.max(cols));
    let tau = budget.half_tolerance();
    let mut a: Vec<Vec<Float>> = (0..rows)
        .map(|i| m.row(i).iter().map(|v| Float::with_val(prec, v)).collect())
        .collect();
    let mut scale: Vec<Float> = (0..rows)
        .map(|i| {
            m.row(i)
                .iter()
                .fold(Float::with_val(prec, 0), |acc, v| acc.max(&Float::with_val(prec, &*v.as_abs())))
        })
        .collect();
    let mut rank = 0;
    for k in 0..rows.min(cols) {
        // Scaled full pivoting: largest |a_ij| / scale_i over the remaining block.
        let mut best: Option<(usize, usize, Float)> = None;
        for i in k..rows {
            if scale[i].is_zero() {
                continue;
            }
            for j in k..cols {
                let ratio = Float::with_val(prec, &*a[i][j].as_abs()) / &scale[i];
                if best.as_ref().map_or(true, |(_, _, b)| ratio > *b) {
                    best = Some((i, j, ratio));
                }
            }
        }
        let Some((pi, pj, ratio)) = best else { break };
        if ratio <= tau {
            break;
        }
        a.swap(pi, k);
        scale.swap(pi, k);
        for row in a.iter_mut() {
            row.swap(pj, k);
        }
        let pivot = a[k][k].clone();
        for i in k + 1..rows {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = Float::with_val(prec, &a[i][k] / &pivot);
            for j in k + 1..cols {
                let t = Float::with_val(prec, &factor * &a[k][j]);
                a[i][j] -= t;
            }
            a[i][k] = Float::with_val(prec, 0);
        }
        rank += 1;
    }
    rank
}

fn residual_norm(m: &Matrix, x: &[Float], rhs: &[Float], prec: u32) -> Float {
    let mx = m.mul_vec(x, prec);
    mx.iter()
        .zip(rhs)
        .fold(Float::with_val(prec, 0), |acc, (a, b)| {
            acc.max(&Float::with_val(prec, a - b).abs())
        })
}

fn lu_solve(m: &Matrix, rhs: &[Float], prec: u32, tau: &Float) -> Option<Vec<Float>> {
    let n = m.rows();
    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|i| {
            let mut row: Vec<Float> = m.row(i).iter().map(|v| Float::with_val(prec, v)).collect();
            row.push(Float::with_val(prec, &rhs[i]));
            row
        })
        .collect();
    let scale: Vec<Float> = (0..n)
        .map(|i| {
            m.row(i)
                .iter()
                .fold(Float::with_val(prec, 0), |acc, v| acc.max(&Float::with_val(prec, &*v.as_abs())))
        })
        .collect();
    if scale.iter().any(|s| s.is_zero()) {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut pi = k;
        let mut best = Float::with_val(prec, 0);
        for i in k..n {
            let ratio = Float::with_val(prec, &*a[i][k].as_abs()) / &scale[perm[i]];
            if ratio > best {
                best = ratio;
                pi = i;
            }
        }
        if best <= *tau {
            return None;
        }
        a.swap(pi, k);
        perm.swap(pi, k);
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = Float::with_val(prec, &a[i][k] / &pivot);
            for j in k + 1..=n {
                let t = Float::with_val(prec, &factor * &a[k][j]);
                a[i][j] -= t;
            }
        }
    }
    let mut x = vec![Float::with_val(prec, 0); n];
    for i in (0..n).rev() {
        let mut acc = a[i][n].clone();
        for j in i + 1..n {
            acc -= Float::with_val(prec, &a[i][j] * &x[j]);
        }
        x[i] = acc / &a[i][i];
    }
    Some(x)
}

/// Solves `M x = rhs`. The residual is checked against
/// `2^{-mantissa/2} · max(‖M‖·‖x‖, ‖rhs‖)` and the solve is repeated at a
/// doubled mantissa (up to the cap) when it fails.
pub fn solve(m: &Matrix, rhs: &[Float], budget: &PrecisionBudget) -> Result<Vec<Float>> {
    if !m.is_square() || m.rows() != rhs.len() {
        return Err(Error::InvalidInput("solve needs a square system".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let tau = budget.half_tolerance();
    let mut current = *budget;
    loop {
        let prec = current.mantissa + guard_bits(n);
        if let Some(x) = lu_solve(m, rhs, prec, &tau) {
            let res = residual_norm(m, &x, rhs, prec);
            let xmax = x
                .iter()
                .fold(Float::with_val(prec, 0), |acc, v| acc.max(&Float::with_val(prec, &*v.as_abs())));
            let bmax = rhs
                .iter()
                .fold(Float::with_val(prec, 0), |acc, v| acc.max(&Float::with_val(prec, &*v.as_abs())));
            let scale = Float::with_val(prec, m.max_abs() * &xmax).max(&bmax) * n as u32;
            if res <= Float::with_val(prec, &scale * &tau) {
                return Ok(x
                    .into_iter()
                    .map(|v| Float::with_val(budget.mantissa, v))
                    .collect());
            }
        } else if current.mantissa >= budget.mantissa * 4 || current.escalated().is_none() {
            return Err(Error::SingularMatrix);
        }
        current = current.escalated().ok_or(Error::SingularMatrix)?;
    }
}

/// Exact determinant of a rational matrix by Gaussian elimination.
pub fn exact_determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut det = Rational::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return Rational::new();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let factor = Rational::from(&a[i][k] / &pivot);
            for j in k + 1..n {
                let t = Rational::from(&factor * &a[k][j]);
                a[i][j] -= t;
            }
            a[i][k] = Rational::new();
        }
    }
    det
}

/// The `(n+1) × m` matrix whose `j`-th column is `(1, a_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedMatrix(Matrix);

impl LiftedMatrix {
    pub fn new(support: &[ExponentVector]) -> Result<Self> {
        let n = support.first().map_or(0, |a| a.dim());
        if support.iter().any(|a| a.dim() != n) {
            return Err(Error::InvalidInput("support vectors differ in dimension".into()));
        }
        let prec = support
            .iter()
            .flat_map(|a| a.coords())
            .map(|v| v.prec())
            .max()
            .unwrap_or(64);
        let mut m = Matrix::zeros(n + 1, support.len(), prec);
        for (j, a) in support.iter().enumerate() {
            m.set(0, j, Float::with_val(prec, 1));
            for (i, v) in a.coords().iter().enumerate() {
                m.set(i + 1, j, v.clone());
            }
        }
        Ok(LiftedMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// Submatrix formed by the given columns.
    pub fn minor_matrix(&self, cols: &[usize]) -> Matrix {
        self.0.select_columns(cols)
    }
}

/// The signed maximal minors `b_i = (−1)^i det(Â with column i deleted)`
/// (1-based `i`), which span the right null space of the lifted matrix of an
/// `(n+2)`-point support.
#[derive(Clone, Debug, PartialEq)]
pub struct BVector {
    exact: Vec<Rational>,
    coords: Vec<Float>,
}

impl BVector {
    pub fn len(&self) -> usize {
        self.exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn coords(&self) -> &[Float] {
        &self.coords
    }

    pub fn exact(&self) -> &[Rational] {
        &self.exact
    }

    pub fn sign(&self, i: usize) -> Ordering {
        self.exact[i].cmp0()
    }

    pub fn is_zero(&self, i: usize) -> bool {
        self.exact[i] == 0
    }

    /// Indices with a nonzero coordinate.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_zero(i)).collect()
    }

    pub fn enclosure(&self, i: usize, prec: u32) -> Interval {
        Interval::from_rational(&self.exact[i], prec)
    }

    pub fn negated(&self) -> BVector {
        BVector {
            exact: self.exact.iter().map(|q| Rational::from(-q)).collect(),
            coords: self.coords.iter().map(|v| Float::with_val(v.prec(), -v)).collect(),
        }
    }

    /// Largest entry of `Â · b` in absolute value.
    pub fn residual(&self, lifted: &LiftedMatrix, prec: u32) -> Float {
        let r = lifted.matrix().mul_vec(&self.coords, prec);
        r.into_iter()
            .fold(Float::with_val(prec, 0), |acc, v| acc.max(&v.abs()))
    }
}

/// Cofactor b-vector of an `(n+2)`-point support in `R^n`.
///
/// Minors are computed exactly over the rationals (stored scalars are
/// dyadic). A minor whose magnitude is at most `2^{-mantissa+8}` times the
/// Hadamard bound of its submatrix is set to zero, so supports that are
/// degenerate up to the rounding of their inputs are recognised as such.
pub fn b_vector(support: &[ExponentVector], budget: &PrecisionBudget) -> Result<BVector> {
    let n = support.first().map_or(0, |a| a.dim());
    if support.len() != n + 2 {
        return Err(Error::InvalidInput(format!(
            "b-vector needs n+2 = {} support points, got {}",
            n + 2,
            support.len()
        )));
    }
    let lifted = LiftedMatrix::new(support)?;
    let q = lifted.matrix().to_rationals();
    let threshold_scale = pow2(64, -(budget.mantissa as i32) + 8);
    let mut exact = Vec::with_capacity(n + 2);
    for i in 0..n + 2 {
        let cols: Vec<usize> = (0..n + 2).filter(|&j| j != i).collect();
        let sub: Vec<Vec<Rational>> = q
            .iter()
            .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let mut det = exact_determinant(&sub);
        // (−1)^i with 1-based i: index 0 gets a minus sign.
        if i % 2 == 0 {
            det = -det;
        }
        if det != 0 {
            let bound = lifted.minor_matrix(&cols).hadamard_bound() * &threshold_scale;
            let mag = Float::with_val(64, det.clone().abs());
            if mag <= bound {
                det = Rational::new();
            }
        }
        exact.push(det);
    }
    let coords = exact
        .iter()
        .map(|v| Float::with_val(budget.mantissa, v))
        .collect();
    Ok(BVector { exact, coords })
}
