//! Sparse rational polynomials and the quartic-feasibility gadget.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::{ExponentVector, Fewnomial};

/// Polynomial with rational coefficients and nonnegative integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(coeff: Rational, exponents: Vec<u32>) -> Self {
        let mut p = SparsePoly::zero(exponents.len());
        if coeff != 0 {
            p.terms.insert(exponents, coeff);
        }
        p
    }

    pub fn constant(nvars: usize, c: impl Into<Rational>) -> Self {
        SparsePoly::monomial(c.into(), vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        SparsePoly::monomial(Rational::from(1), e)
    }

    /// Builds from `(coefficient, exponents)` pairs, merging repeats.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Rational, Vec<u32>)>) -> Result<Self> {
        let mut p = SparsePoly::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    index: p.terms.len(),
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        let entry = self.terms.entry(e).or_insert_with(Rational::new);
        *entry += c;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, k: &Rational) -> SparsePoly {
        let mut p = SparsePoly::zero(self.nvars);
        if *k != 0 {
            for (e, c) in &self.terms {
                p.terms.insert(e.clone(), Rational::from(c * k));
            }
        }
        p
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut p = SparsePoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, Rational::from(c1 * c2));
            }
        }
        p
    }

    pub fn square(&self) -> SparsePoly {
        self.mul(self)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::new();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= Rational::from(xi.pow(k));
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64() * x.iter().zip(e).map(|(xi, &k)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Replaces variable `i` by `images[i]`; all images share one variable set.
    pub fn substitute(&self, images: &[SparsePoly]) -> SparsePoly {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let nv = images.first().map_or(0, |p| p.nvars);
        let one = SparsePoly::constant(nv, 1);
        let mut out = SparsePoly::zero(nv);
        let mut powers: Vec<Vec<SparsePoly>> = images.iter().map(|p| vec![one.clone(), p.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = SparsePoly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// The same polynomial in `total` variables, its own placed from `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> SparsePoly {
        assert!(offset + self.nvars <= total, "embedding out of range");
        let mut p = SparsePoly::zero(total);
        for (e, c) in &self.terms {
            let mut big = vec![0; total];
            big[offset..offset + self.nvars].copy_from_slice(e);
            p.terms.insert(big, c.clone());
        }
        p
    }

    /// Fewnomial with coefficients rounded to `prec` bits.
    pub fn to_fewnomial(&self, prec: u32) -> Result<Fewnomial> {
        if self.is_zero() {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let ev = ExponentVector::new(e.iter().map(|&k| Float::with_val(prec, k)).collect())?;
                Ok((Float::with_val(prec, c), ev))
            })
            .collect::<Result<Vec<_>>>()?;
        Fewnomial::new(self.nvars, terms)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{p}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// Which root question the gadget encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardnessMode {
    /// `F = f(x)² + t_M(z)`: roots of `f` in the positive orthant.
    PositiveOrthant,
    /// `f(x⁺ − x⁻)` in place of `f`: roots of `f` anywhere in `R^n`, read on
    /// the positive orthant of `2n` slack variables.
    SlackPositive,
    /// `F = f(x)² + t_M(z_1², …, z_M²)`: roots of `f` anywhere in `R^n`.
    AllOrthants,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardnessInstance {
    /// `F` in the variables `(x, z)`.
    pub poly: SparsePoly,
    pub source: SparsePoly,
    pub mode: HardnessMode,
    pub delta: f64,
    /// Number of `x` variables in `F`.
    pub x_vars: usize,
    /// `M` actually used.
    pub m: usize,
    /// `⌈C(n+4, 4)^{2/δ}⌉` before clamping.
    pub m_formula: Integer,
    pub clamped: bool,
}

impl HardnessInstance {
    pub fn to_fewnomial(&self, prec: u32) -> Result<Fewnomial> {
        self.poly.to_fewnomial(prec)
    }

    /// A root of `F` built from a root `x` of the source quartic.
    pub fn lift_root(&self, x: &[Rational]) -> Vec<Rational> {
        let mut point: Vec<Rational> = match self.mode {
            HardnessMode::PositiveOrthant | HardnessMode::AllOrthants => x.to_vec(),
            HardnessMode::SlackPositive => {
                let plus: Vec<Rational> = x
                    .iter()
                    .map(|v| if *v > 0 { Rational::from(v + 1u32) } else { Rational::from(1) })
                    .collect();
                let minus: Vec<Rational> = plus.iter().zip(x).map(|(p, v)| Rational::from(p - v)).collect();
                plus.into_iter().chain(minus).collect()
            }
        };
        point.extend(std::iter::repeat(Rational::from(1)).take(self.m));
        point
    }
}

/// Largest `M` accepted without an explicit cap.
pub const MAX_UNCAPPED_M: u64 = 4096;

/// `C(n+4, 4)`.
pub fn quartic_term_bound(n: usize) -> Integer {
    Integer::from(n + 4).binomial(4)
}

/// `⌈C(n+4, 4)^{2/δ}⌉`, exact when `2/δ` is an integer.
pub fn gadget_m(n: usize, delta: f64) -> Result<Integer> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    let k = quartic_term_bound(n);
    let ratio = Rational::from(2) / Rational::from_f64(delta).expect("finite delta");
    if *ratio.denom() == 1 {
        let e = ratio.numer().to_u32().ok_or_else(|| Error::InvalidInput("delta too small".into()))?;
        return Ok(k.pow(e));
    }
    let prec = 512;
    let v = Float::with_val(prec, &k).pow(Float::with_val(prec, &ratio));
    v.ceil()
        .to_integer()
        .ok_or_else(|| Error::InvalidInput("M is not finite".into()))
}

/// `t_M(z) = 1 + Σ z_i^{M+1} − (M+1)·Π z_i`, optionally at `z_i²`.
pub fn t_m(total: usize, offset: usize, m: usize, squared: bool) -> SparsePoly {
    let s: u32 = if squared { 2 } else { 1 };
    let mut p = SparsePoly::constant(total, 1);
    let mut prod = vec![0u32; total];
    for i in 0..m {
        let mut e = vec![0u32; total];
        e[offset + i] = s * (m as u32 + 1);
        p = p.add(&SparsePoly::monomial(Rational::from(1), e));
        prod[offset + i] = s;
    }
    p.add(&SparsePoly::monomial(Rational::from(-(m as i64 + 1)), prod))
}

/// `F(x, z) = f(x)² + t_M(z)` in the chosen mode, with
/// `M = ⌈C(n+4, 4)^{2/δ}⌉` clamped to `cap_m` (flagged) when given.
pub fn make_hardness_instance(
    f: &SparsePoly,
    delta: f64,
    cap_m: Option<u64>,
    mode: HardnessMode,
) -> Result<HardnessInstance> {
    if f.is_zero() {
        return Err(Error::InvalidInput("source polynomial is zero".into()));
    }
    let degree = f.degree();
    if degree > 4 {
        return Err(Error::DegreeNotFour { degree });
    }
    let n = f.nvars();
    let m_formula = gadget_m(n, delta)?;
    let (m, clamped) = match cap_m {
        Some(0) => return Err(Error::InvalidInput("cap_m must be at least 1".into())),
        Some(cap) if m_formula > cap => (cap, true),
        None if m_formula > MAX_UNCAPPED_M => {
            return Err(Error::InvalidInput(format!(
                "M = {m_formula} exceeds {MAX_UNCAPPED_M}; pass a cap"
            )))
        }
        _ => (m_formula.to_u64().expect("bounded"), false),
    };
    let m = m as usize;
    let x_vars = if mode == HardnessMode::SlackPositive { 2 * n } else { n };
    let total = x_vars + m;
    let base = match mode {
        HardnessMode::SlackPositive => {
            let images: Vec<SparsePoly> = (0..n)
                .map(|i| SparsePoly::var(total, i).sub(&SparsePoly::var(total, n + i)))
                .collect();
            f.substitute(&images)
        }
        _ => f.embed(total, 0),
    };
    let poly = base.square().add(&t_m(total, x_vars, m, mode == HardnessMode::AllOrthants));
    Ok(HardnessInstance {
        poly,
        source: f.clone(),
        mode,
        delta,
        x_vars,
        m,
        m_formula,
        clamped,
    })
}
