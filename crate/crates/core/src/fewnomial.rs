//! Sparse real-exponent polynomials on the positive orthant.

use std::fmt;

use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::precision::{Interval, PrecisionBudget, DEFAULT_MANTISSA};

/// A point of `R^n` used as a monomial exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentVector(Vec<Float>);

impl ExponentVector {
    pub fn new(coords: Vec<Float>) -> Result<Self> {
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "exponent coordinate {bad} is not finite"
            )));
        }
        Ok(ExponentVector(coords))
    }

    pub fn from_f64(coords: &[f64], prec: u32) -> Result<Self> {
        ExponentVector::new(coords.iter().map(|&c| Float::with_val(prec, c)).collect())
    }

    pub fn zeros(n: usize, prec: u32) -> Self {
        ExponentVector(vec![Float::with_val(prec, 0); n])
    }

    pub fn coords(&self) -> &[Float] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64()).collect()
    }

    /// Enclosure of `self · y`.
    pub fn dot_enclosure(&self, y: &[Interval]) -> Interval {
        let prec = y.first().map(|v| v.prec()).unwrap_or(DEFAULT_MANTISSA);
        self.0
            .iter()
            .zip(y)
            .fold(Interval::from_i64(0, prec), |acc, (a, yi)| {
                &acc + &yi.mul_float(a)
            })
    }

    /// `self · y` rounded to `prec` bits.
    pub fn dot(&self, y: &[Float], prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 0);
        for (a, yi) in self.0.iter().zip(y) {
            acc += Float::with_val(prec, a * yi);
        }
        acc
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.to_string_radix(10, Some(12)))?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Float,
    pub exponent: ExponentVector,
}

/// `f(x) = Σ c_i x^{a_i}` with nonzero coefficients and distinct exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct Fewnomial {
    n: usize,
    terms: Vec<Term>,
}

/// Validates and builds a fewnomial; terms keep their input order.
pub fn make_fewnomial(n: usize, terms: Vec<(Float, ExponentVector)>) -> Result<Fewnomial> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension n must be at least 1".into()));
    }
    if terms.is_empty() {
        return Err(Error::InvalidInput("a fewnomial needs at least one term".into()));
    }
    for (index, (coeff, exponent)) in terms.iter().enumerate() {
        if exponent.dim() != n {
            return Err(Error::DimensionMismatch {
                index,
                expected: n,
                found: exponent.dim(),
            });
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidInput(format!(
                "coefficient of term {index} is not finite"
            )));
        }
        if coeff.is_zero() {
            return Err(Error::ZeroCoefficient { index });
        }
    }
    for second in 1..terms.len() {
        for first in 0..second {
            if terms[first].1 == terms[second].1 {
                return Err(Error::DuplicateExponent { first, second });
            }
        }
    }
    Ok(Fewnomial {
        n,
        terms: terms
            .into_iter()
            .map(|(coeff, exponent)| Term { coeff, exponent })
            .collect(),
    })
}

impl Fewnomial {
    pub fn new(n: usize, terms: Vec<(Float, ExponentVector)>) -> Result<Self> {
        make_fewnomial(n, terms)
    }

    /// Convenience constructor from `f64` data at the default mantissa.
    pub fn from_f64(n: usize, terms: &[(f64, &[f64])]) -> Result<Self> {
        Fewnomial::from_f64_prec(n, terms, DEFAULT_MANTISSA)
    }

    pub fn from_f64_prec(n: usize, terms: &[(f64, &[f64])], prec: u32) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(c, a)| Ok((Float::with_val(prec, *c), ExponentVector::from_f64(a, prec)?)))
            .collect::<Result<Vec<_>>>()?;
        make_fewnomial(n, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn coeff(&self, i: usize) -> &Float {
        &self.terms[i].coeff
    }

    pub fn exponent(&self, i: usize) -> &ExponentVector {
        &self.terms[i].exponent
    }

    pub fn coeffs(&self) -> Vec<Float> {
        self.terms.iter().map(|t| t.coeff.clone()).collect()
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.iter().map(|t| t.exponent.clone()).collect()
    }

    /// Index of the constant term, if any.
    pub fn origin_index(&self) -> Option<usize> {
        self.terms.iter().position(|t| t.exponent.is_zero())
    }

    /// Largest mantissa among the stored scalars.
    pub fn prec(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|t| std::iter::once(&t.coeff).chain(t.exponent.coords()))
            .map(|x| x.prec())
            .max()
            .unwrap_or(DEFAULT_MANTISSA)
    }

    /// Same support, coefficients replaced. Fails on a zero coefficient.
    pub fn with_coeffs(&self, coeffs: Vec<Float>) -> Result<Self> {
        if coeffs.len() != self.m() {
            return Err(Error::InvalidInput("coefficient count changed".into()));
        }
        make_fewnomial(
            self.n,
            coeffs.into_iter().zip(self.support()).collect(),
        )
    }

    /// `k · f`.
    pub fn scaled(&self, k: &Float) -> Result<Self> {
        let prec = self.prec().max(k.prec());
        self.with_coeffs(
            self.terms
                .iter()
                .map(|t| Float::with_val(prec, &t.coeff * k))
                .collect(),
        )
    }

    /// Permutes terms: term `i` of the result is term `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Fewnomial {
            n: self.n,
            terms: order.iter().map(|&i| self.terms[i].clone()).collect(),
        }
    }

    /// Enclosure of `f` at a point given by enclosures of `ln x`.
    pub fn evaluate_log_enclosure(&self, log_x: &[Interval]) -> Interval {
        let prec = log_x.first().map(|v| v.prec()).unwrap_or(DEFAULT_MANTISSA);
        let mut acc = Interval::from_i64(0, prec);
        for term in &self.terms {
            let mono = term.exponent.dot_enclosure(log_x).exp();
            acc = &acc + &mono.mul_float(&term.coeff);
        }
        acc
    }

    /// Enclosure of `f` at a positive point given by coordinate enclosures.
    pub fn evaluate_enclosure(&self, x: &[Interval]) -> Result<Interval> {
        if x.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.n
            )));
        }
        let mut logs = Vec::with_capacity(x.len());
        for (index, xi) in x.iter().enumerate() {
            if !xi.is_positive() {
                return Err(Error::NonpositiveCoordinate { index });
            }
            logs.push(xi.ln()?);
        }
        Ok(self.evaluate_log_enclosure(&logs))
    }

    /// Fast double-precision value; no error control.
    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        self.terms
            .iter()
            .map(|t| {
                let e: f64 = t
                    .exponent
                    .coords()
                    .iter()
                    .zip(&logs)
                    .map(|(a, l)| a.to_f64() * l)
                    .sum();
                t.coeff.to_f64() * e.exp()
            })
            .sum()
    }
}

impl fmt::Display for Fewnomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·x^{}", t.coeff.to_string_radix(10, Some(12)), t.exponent)?;
        }
        Ok(())
    }
}

/// Membership of a fewnomial in the honest classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassMembership {
    pub support_dim: usize,
    pub honest: bool,
    pub has_origin: bool,
}

/// Affine dimension of the support via the rank of `[a_2 − a_1, …, a_m − a_1]`.
pub fn classify(f: &Fewnomial) -> ClassMembership {
    classify_with(f, &PrecisionBudget::default())
}

pub fn classify_with(f: &Fewnomial, budget: &PrecisionBudget) -> ClassMembership {
    let prec = budget.mantissa.max(f.prec());
    let first = f.exponent(0);
    let cols = f.m() - 1;
    let mut diffs = Matrix::zeros(f.n(), cols, prec);
    for j in 0..cols {
        let a = f.exponent(j + 1);
        for i in 0..f.n() {
            diffs.set(
                i,
                j,
                Float::with_val(prec, &a.coords()[i] - &first.coords()[i]),
            );
        }
    }
    let support_dim = if cols == 0 {
        0
    } else {
        linalg::rank(&diffs, &budget.at(prec))
    };
    ClassMembership {
        support_dim,
        honest: support_dim == f.n(),
        has_origin: f.origin_index().is_some(),
    }
}

/// `f(x)` with relative error at most `2^{-mantissa/2}`, escalating the
/// working precision through cancellation. Returns the best available
/// midpoint when the cap is reached first.
pub fn evaluate(f: &Fewnomial, x: &[Float], budget: &PrecisionBudget) -> Result<Float> {
    if x.len() != f.n() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            f.n()
        )));
    }
    if let Some(index) = x.iter().position(|xi| *xi <= 0 || xi.is_nan()) {
        return Err(Error::NonpositiveCoordinate { index });
    }
    let target = budget.half_tolerance().to_f64();
    let mut bits = budget.mantissa + 16;
    loop {
        let point: Vec<Interval> = x.iter().map(|xi| Interval::point(xi, bits)).collect();
        let value = f.evaluate_enclosure(&point)?;
        let exact_zero = value.lo().is_zero() && value.hi().is_zero();
        if exact_zero || value.relative_radius() <= target || bits >= budget.cap {
            return Ok(Float::with_val(budget.mantissa, value.mid()));
        }
        bits = (bits * 2).min(budget.cap);
    }
}
