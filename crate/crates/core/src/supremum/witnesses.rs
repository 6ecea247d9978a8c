//! Curves along which a fewnomial grows without bound.

use std::cmp::Ordering;

use rug::Float;

use super::UnboundedWitness;
use crate::discriminant::CircuitData;
use crate::error::{Error, Result};
use crate::fewnomial::{ExponentVector, Fewnomial};
use crate::linalg::{solve, Matrix};
use crate::precision::{Interval, PrecisionBudget};

const SAMPLE_T: [u32; 3] = [10, 100, 1000];

/// Enclosure of `f(base ∘ t^direction)`.
pub fn curve_value(f: &Fewnomial, witness: &UnboundedWitness, t: &Float, prec: u32) -> Result<Interval> {
    let ln_t = Interval::point(t, prec).ln()?;
    let logs: Result<Vec<Interval>> = witness
        .base_point
        .iter()
        .zip(witness.direction.coords())
        .map(|(x, d)| Ok(&Interval::point(x, prec).ln()? + &ln_t.mul_float(d)))
        .collect();
    Ok(f.evaluate_log_enclosure(&logs?))
}

/// Certified strict increase of `f` along the witness curve at
/// `t = 1, 10, 100, 1000`.
pub fn witness_increases(f: &Fewnomial, witness: &UnboundedWitness, prec: u32) -> bool {
    let mut last: Option<Interval> = None;
    for t in std::iter::once(1).chain(SAMPLE_T) {
        let Ok(v) = curve_value(f, witness, &Float::with_val(prec, t), prec) else {
            return false;
        };
        if let Some(prev) = &last {
            if v.lo() <= prev.hi() {
                return false;
            }
        }
        last = Some(v);
    }
    true
}

fn normal_equations(rows: &[Vec<Float>], rhs: &[Float], budget: &PrecisionBudget) -> Result<Vec<Float>> {
    let n = rows[0].len();
    let prec = budget.mantissa;
    let mut ata = Matrix::zeros(n, n, prec);
    let mut atb = vec![Float::with_val(prec, 0); n];
    for (row, t) in rows.iter().zip(rhs) {
        for i in 0..n {
            atb[i] += Float::with_val(prec, &row[i] * t);
            for j in 0..n {
                let v = Float::with_val(prec, ata.get(i, j) + Float::with_val(prec, &row[i] * &row[j]));
                ata.set(i, j, v);
            }
        }
    }
    solve(&ata, &atb, budget)
}

/// A direction `w` with `(a_v − a_k)·w > 0` for every `k ≠ v`, built from the
/// affine dependency `b` of the support (any vertex other than the interior
/// point of the sub-circuit admits one).
pub(crate) fn vertex_direction(
    support: &[ExponentVector],
    data: &CircuitData,
    v: usize,
    budget: &PrecisionBudget,
) -> Result<Vec<Float>> {
    let prec = budget.mantissa + 32;
    let others: Vec<usize> = (0..support.len()).filter(|&k| k != v).collect();
    let count = |ord: Ordering| others.iter().filter(|&&k| data.sign(k) == ord).count();
    let (np, nn) = (count(Ordering::Greater), count(Ordering::Less));
    let mut rows = Vec::with_capacity(others.len());
    let mut rhs = Vec::with_capacity(others.len());
    for &k in &others {
        rows.push(
            support[v]
                .coords()
                .iter()
                .zip(support[k].coords())
                .map(|(x, y)| Float::with_val(prec, x - y))
                .collect::<Vec<_>>(),
        );
        let bk = Float::with_val(prec, &data.b.exact()[k]).abs();
        let t = match data.sign(k) {
            Ordering::Equal => Float::with_val(prec, 1),
            Ordering::Greater => Float::with_val(prec, (np as u32) * bk).recip(),
            Ordering::Less => Float::with_val(prec, (nn as u32) * bk).recip(),
        };
        rhs.push(t);
    }
    let w = normal_equations(&rows, &rhs, &budget.at(prec))?;
    for row in &rows {
        let d = row.iter().zip(&w).fold(Float::with_val(prec, 0), |acc, (a, b)| acc + Float::with_val(prec, a * b));
        if d <= 0 {
            return Err(Error::NotInClass("support point is not a vertex".into()));
        }
    }
    Ok(w)
}

/// Scales a direction by powers of two until the sampled increase is certified.
pub(crate) fn scaled_witness(
    f: &Fewnomial,
    base_point: Vec<Float>,
    w: Vec<Float>,
    term_index: usize,
    budget: &PrecisionBudget,
) -> Result<UnboundedWitness> {
    let prec = budget.mantissa;
    let mut scale = Float::with_val(prec, 1);
    for _ in 0..200 {
        let dir: Vec<Float> = w.iter().map(|x| Float::with_val(prec, x * &scale)).collect();
        let witness = UnboundedWitness {
            direction: ExponentVector::new(dir)?,
            base_point: base_point.clone(),
            term_index,
        };
        if witness_increases(f, &witness, prec) {
            return Ok(witness);
        }
        scale *= 2u32;
    }
    Err(Error::PrecisionExhausted { cap: budget.cap })
}

/// Witness for an unbounded supremum driven by a positive vertex term.
pub(crate) fn vertex_witness(
    f: &Fewnomial,
    data: &CircuitData,
    v: usize,
    budget: &PrecisionBudget,
) -> Result<UnboundedWitness> {
    let w = vertex_direction(&f.support(), data, v, budget)?;
    let ones = vec![Float::with_val(budget.mantissa, 1); f.n()];
    scaled_witness(f, ones, w, v, budget)
}

/// Witness for a sub-circuit `B` avoiding the origin whose interior term
/// beats its vertices: `y₀` is the equality point of the weighted AM-GM
/// bound, and `v` scales every monomial of `B` linearly while freezing the
/// rest.
pub(crate) fn interior_witness(
    f: &Fewnomial,
    data: &CircuitData,
    origin: usize,
    interior: usize,
    budget: &PrecisionBudget,
) -> Result<UnboundedWitness> {
    let prec = budget.mantissa + 32;
    let n = f.n();
    let bp = Float::with_val(prec, &data.b.exact()[interior]).abs();
    let mut m = Matrix::zeros(n, n, prec);
    let mut dir_rhs = Vec::with_capacity(n);
    let mut base_rhs = Vec::with_capacity(n);
    let mut row = 0;
    for k in 0..f.m() {
        if k == origin || k == interior {
            continue;
        }
        for (j, a) in f.exponent(k).coords().iter().enumerate() {
            m.set(row, j, Float::with_val(prec, a));
        }
        if data.in_sub_circuit(k) {
            let wk = Float::with_val(prec, &data.b.exact()[k]) / &bp;
            let ck = Float::with_val(prec, f.coeff(k).abs_ref());
            dir_rhs.push(Float::with_val(prec, 1));
            base_rhs.push((wk / ck).ln());
        } else {
            dir_rhs.push(Float::with_val(prec, 0));
            base_rhs.push(Float::with_val(prec, 0));
        }
        row += 1;
    }
    let b = budget.at(prec);
    let v = solve(&m, &dir_rhs, &b)?;
    let y0 = solve(&m, &base_rhs, &b)?;
    let base: Vec<Float> = y0.into_iter().map(|y| y.exp()).collect();
    let witness = UnboundedWitness {
        direction: ExponentVector::new(v.clone())?,
        base_point: base.clone(),
        term_index: interior,
    };
    if witness_increases(f, &witness, budget.mantissa) {
        return Ok(witness);
    }
    scaled_witness(f, base, v, interior, budget)
}
