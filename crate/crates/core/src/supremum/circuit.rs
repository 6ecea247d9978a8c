//! `n+2` terms on a circuit containing the origin.

use std::cmp::Ordering;

use rug::{Float, Rational};

use super::witnesses::{interior_witness, vertex_witness};
use super::{require_honest_with_origin, Case, MaxCoord, MaximizerDescription, Outcome, SupremumResult};
use crate::discriminant::{classify_circuit, log_form_enclosure, CircuitData, CircuitKind};
use crate::error::{Error, Result};
use crate::fewnomial::{ExponentVector, Fewnomial};
use crate::linalg::{solve, Matrix};
use crate::precision::{certified_sign, CertifiedSign, Interval, PrecisionBudget, SignReport};

/// `λ*` with the enclosure it was read from.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaStar {
    pub value: Float,
    pub enclosure: Interval,
    pub bits: u32,
    /// `radius / max(1, |λ*|)`.
    pub relative_error: f64,
}

/// Enclosure of `c_j − σ·b_j·exp(−σL/b_j)` with
/// `L = Σ_{i∈B∖{j}} σ·b_i·ln(σ·c_i/b_i)`.
fn lambda_enclosure(c: &[Float], b: &[Rational], j: usize, sigma: i32, prec: u32) -> Result<Interval> {
    let ci: Vec<Interval> = c.iter().map(|v| Interval::point(v, prec)).collect();
    let bi: Vec<Interval> = b.iter().map(|v| Interval::from_rational(v, prec)).collect();
    let rest: Vec<usize> = (0..b.len()).filter(|&i| i != j && b[i] != 0).collect();
    let l = log_form_enclosure(&ci, &bi, &rest, sigma)?;
    let l = if sigma < 0 { -l } else { l };
    let exponent = (-l).checked_div(&bi[j]).ok_or(Error::SingularMatrix)?;
    let scaled = &bi[j] * &exponent.exp();
    let scaled = if sigma < 0 { -scaled } else { scaled };
    Ok(&ci[j] - &scaled)
}

fn lambda_to_eps(c: &[Float], b: &[Rational], j: usize, sigma: i32, eps: f64, budget: &PrecisionBudget) -> Result<LambdaStar> {
    let mut bits = budget.bits_for_eps(eps);
    loop {
        let enc = lambda_enclosure(c, b, j, sigma, bits + 16)?;
        let rel = enc.mixed_radius();
        if rel <= eps / 2.0 {
            return Ok(LambdaStar {
                value: Float::with_val(bits, enc.mid()),
                enclosure: enc,
                bits,
                relative_error: rel,
            });
        }
        if bits >= budget.cap {
            return Err(Error::PrecisionExhausted { cap: budget.cap });
        }
        bits = bits.saturating_mul(2).min(budget.cap);
    }
}

fn sign_i(o: Ordering) -> i32 {
    match o {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// Solves for the supremum `λ*` of the sub-circuit equation with origin
/// index `j` and interior index `jp`.
///
/// `b` is taken as exact; indices with `b_i = 0` are ignored. Requires
/// `σ = sign(b_{jp})` and `sign(c_i b_i) = σ` for every other index of the
/// sub-circuit. The result satisfies `(c_j − λ*)·b_j·b_{jp} > 0`.
pub fn solve_lambda_star(
    c: &[Float],
    b: &[Float],
    j: usize,
    jp: usize,
    sigma: i32,
    eps: f64,
    budget: &PrecisionBudget,
) -> Result<LambdaStar> {
    if c.len() != b.len() || j >= c.len() || jp >= c.len() {
        return Err(Error::InvalidInput("index out of range".into()));
    }
    let exact: Vec<Rational> = b
        .iter()
        .map(|v| v.to_rational().ok_or_else(|| Error::InvalidInput("b must be finite".into())))
        .collect::<Result<_>>()?;
    let sign_b = |i: usize| sign_i(exact[i].cmp0());
    if exact[j] == 0 || sign_b(jp) != sigma {
        return Err(Error::SignPreconditionViolated("σ must equal sign(b_j') and b_j must be nonzero".into()));
    }
    for i in 0..c.len() {
        if i == j || exact[i] == 0 {
            continue;
        }
        let sc = sign_i(c[i].cmp0().unwrap_or(Ordering::Equal));
        if sc * sign_b(i) != sigma {
            return Err(Error::SignPreconditionViolated(format!("sign(c_{i}·b_{i}) differs from σ")));
        }
    }
    lambda_to_eps(c, &exact, j, sigma, eps, budget)
}

/// Maximizer of a sub-circuit with the origin: `x^{a_i − a_r} = b_i c_r / (b_r c_i)`
/// on the sub-circuit, pushed to the boundary along `w` with `a_i·w = 0` on
/// the sub-circuit and `a_k·w = −1` off it.
pub fn solve_binomial_system(
    support: &[ExponentVector],
    c: &[Float],
    b: &[Rational],
    sub_circuit_indices: &[usize],
    origin: usize,
    budget: &PrecisionBudget,
) -> Result<MaximizerDescription> {
    let n = support[0].dim();
    let prec = budget.mantissa + 32;
    let in_b: Vec<usize> = sub_circuit_indices.iter().copied().filter(|&i| i != origin).collect();
    let Some(&r) = in_b.first() else {
        return Err(Error::SingularMatrix);
    };
    let mut m = Matrix::zeros(n, n, prec);
    let mut zeta_rhs = Vec::with_capacity(n);
    let mut w_rhs = Vec::with_capacity(n);
    let mut row = 0;
    let ratio = |i: usize| -> Float {
        let num = Float::with_val(prec, &b[i]) * &c[r];
        let den = Float::with_val(prec, &b[r]) * &c[i];
        Float::with_val(prec, num / den)
    };
    for &i in in_b.iter().skip(1) {
        if row >= n {
            return Err(Error::SingularMatrix);
        }
        for k in 0..n {
            m.set(row, k, Float::with_val(prec, &support[i].coords()[k] - &support[r].coords()[k]));
        }
        let q = ratio(i);
        if q <= 0 {
            return Err(Error::SignPreconditionViolated("binomial right-hand side is not positive".into()));
        }
        zeta_rhs.push(q.ln());
        w_rhs.push(Float::with_val(prec, 0));
        row += 1;
    }
    for (k, a) in support.iter().enumerate() {
        if k == origin || sub_circuit_indices.contains(&k) {
            continue;
        }
        if row >= n {
            return Err(Error::SingularMatrix);
        }
        for (col, v) in a.coords().iter().enumerate() {
            m.set(row, col, Float::with_val(prec, v));
        }
        zeta_rhs.push(Float::with_val(prec, 0));
        w_rhs.push(Float::with_val(prec, -1));
        row += 1;
    }
    if row != n {
        return Err(Error::SingularMatrix);
    }
    let b2 = budget.at(prec);
    let zeta = solve(&m, &zeta_rhs, &b2)?;
    let w = solve(&m, &w_rhs, &b2)?;
    let wmax = w.iter().fold(Float::with_val(prec, 0), |acc, v| acc.max(&Float::with_val(prec, v.abs_ref())));
    let tau = Float::with_val(prec, &wmax * budget.half_tolerance());
    let coords = zeta
        .iter()
        .zip(&w)
        .map(|(z, wi)| {
            if wmax.is_zero() || Float::with_val(prec, wi.abs_ref()) <= tau {
                MaxCoord::Finite(Float::with_val(prec, z.exp_ref()))
            } else if wi.is_sign_positive() {
                MaxCoord::Infinity
            } else {
                MaxCoord::Zero
            }
        })
        .collect();
    Ok(MaximizerDescription {
        coords,
        orbit_dim: sub_circuit_indices.len().saturating_sub(2),
        log_point: zeta,
        boundary_direction: w,
    })
}

pub(crate) struct Analysis {
    pub data: CircuitData,
    pub origin: usize,
    pub case: Case,
    pub vertex: Option<usize>,
    pub sign: Option<SignReport>,
}

fn log_form_sign(f: &Fewnomial, data: &CircuitData, budget: &PrecisionBudget) -> Result<SignReport> {
    let idx = data.sub_circuit_indices.clone();
    let at = |bits: u32| -> Result<Interval> {
        let c: Vec<Interval> = f.terms().iter().map(|t| Interval::point(&t.coeff, bits)).collect();
        let b: Vec<Interval> = (0..f.m()).map(|i| data.b_enclosure(i, bits)).collect();
        log_form_enclosure(&c, &b, &idx, -1)
    };
    let initial = at(budget.mantissa)?.to_certified();
    certified_sign(initial, budget, |bits| Ok(at(bits)?.to_certified()))
}

pub(crate) fn analyze(f: &Fewnomial, budget: &PrecisionBudget) -> Result<Analysis> {
    let n = f.n();
    if f.m() != n + 2 {
        return Err(Error::NotInClass(format!("circuit case needs n+2 = {} terms, got {}", n + 2, f.m())));
    }
    let origin = require_honest_with_origin(f, budget)?;
    let data = classify_circuit(&f.support(), budget)?;
    if data.kind == CircuitKind::NotCircuit {
        return Err(Error::NotInClass("support is not a circuit".into()));
    }
    let interior = data.interior_index;
    let vertex = (0..f.m()).find(|&i| i != origin && Some(i) != interior && f.coeff(i).is_sign_positive());
    let mut sign = None;
    let case = if vertex.is_some() {
        Case::Condition1
    } else {
        match interior {
            None => Case::Fallthrough,
            Some(p) if p == origin => Case::OriginInterior,
            Some(p) if f.coeff(p).is_sign_negative() => Case::Fallthrough,
            Some(_) if data.in_sub_circuit(origin) => Case::Condition3,
            Some(_) => {
                let report = log_form_sign(f, &data, budget)?;
                let case = if report.sign == CertifiedSign::Positive {
                    Case::Condition2
                } else {
                    Case::Fallthrough
                };
                sign = Some(report);
                case
            }
        }
    };
    Ok(Analysis {
        data,
        origin,
        case,
        vertex,
        sign,
    })
}

/// Which branch of the analysis applies, without computing `λ*`.
pub fn circuit_case(f: &Fewnomial, budget: &PrecisionBudget) -> Result<Case> {
    Ok(analyze(f, budget)?.case)
}

/// Supremum of `f ∈ F**_{n,n+2}` to relative accuracy `eps` (measured
/// against `max(1, |λ*|)`).
///
/// Unbounded iff a non-origin vertex has a positive coefficient, or the
/// sub-circuit avoids the origin, its interior coefficient is positive and
/// `Σ_B σ b_i ln(σ c_i/b_i) > 0` with `σ = sign(b_{j'}) = −1`. When the
/// origin lies on the sub-circuit with a positive interior coefficient, or
/// is itself the interior point, `λ*` has the closed form of
/// [`solve_lambda_star`]. Otherwise the supremum is the constant term.
pub fn sup_circuit(f: &Fewnomial, eps: f64, budget: &PrecisionBudget) -> Result<SupremumResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let a = analyze(f, budget)?;
    let log_form = a.sign.as_ref().map(|s| s.value.to_interval());
    let constant = |tie: bool| SupremumResult {
        outcome: Outcome::ConstantAtBoundary {
            value: f.coeff(a.origin).clone(),
            tie,
        },
        case: a.case,
        certified_relative_error: 0.0,
        precision_bits: a.sign.as_ref().map_or(budget.mantissa, |s| s.bits),
        enclosure: Some(Interval::point(f.coeff(a.origin), f.prec())),
        log_form: log_form.clone(),
    };
    match a.case {
        Case::Condition1 => {
            let v = a.vertex.expect("condition 1 has a vertex");
            let witness = vertex_witness(f, &a.data, v, budget)?;
            Ok(SupremumResult {
                outcome: Outcome::Unbounded(witness),
                case: a.case,
                certified_relative_error: 0.0,
                precision_bits: budget.mantissa,
                enclosure: None,
                log_form: None,
            })
        }
        Case::Condition2 => {
            let p = a.data.interior_index.expect("condition 2 has an interior point");
            let witness = interior_witness(f, &a.data, a.origin, p, budget)?;
            Ok(SupremumResult {
                outcome: Outcome::Unbounded(witness),
                case: a.case,
                certified_relative_error: 0.0,
                precision_bits: a.sign.as_ref().map_or(budget.mantissa, |s| s.bits),
                enclosure: None,
                log_form,
            })
        }
        Case::Condition3 | Case::OriginInterior => {
            let c = f.coeffs();
            let lambda = lambda_to_eps(&c, a.data.b.exact(), a.origin, -1, eps, budget)?;
            let maximizer = solve_binomial_system(
                &f.support(),
                &c,
                a.data.b.exact(),
                &a.data.sub_circuit_indices,
                a.origin,
                budget,
            )?;
            Ok(SupremumResult {
                outcome: Outcome::Bounded {
                    lambda_star: lambda.value.clone(),
                    maximizer,
                },
                case: a.case,
                certified_relative_error: lambda.relative_error,
                precision_bits: lambda.bits,
                enclosure: Some(lambda.enclosure),
                log_form: None,
            })
        }
        _ => {
            let tie = matches!(a.sign, Some(SignReport { sign: CertifiedSign::ZeroAtCap, .. }));
            Ok(constant(tie))
        }
    }
}
