//! Suprema of fewnomials over the positive orthant.
//!
//! Supported classes: `n+1` terms with a constant term on a simplex,
//! `n+2` terms with a constant term on a (possibly degenerate) circuit, and
//! univariate tetranomials with a constant term.

mod circuit;
mod simplex;
mod tetranomial;
mod witnesses;

use std::cmp::Ordering;
use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::{classify_with, ExponentVector, Fewnomial};
use crate::precision::{Interval, PrecisionBudget};

pub use circuit::{circuit_case, solve_binomial_system, solve_lambda_star, sup_circuit, LambdaStar};
pub use simplex::sup_simplex;
pub use tetranomial::sup_tetranomial;
pub use witnesses::{curve_value, witness_increases};

/// Which branch of the analysis produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `n+1` terms.
    Simplex,
    /// A non-origin vertex carries a positive coefficient.
    Condition1,
    /// Positive interior point of a sub-circuit avoiding the origin, with a
    /// positive log form.
    Condition2,
    /// Positive interior point of a sub-circuit through the origin.
    Condition3,
    /// The origin is the interior point of the sub-circuit.
    OriginInterior,
    /// Everything else: the supremum is the constant term.
    Fallthrough,
    /// Univariate four-term case.
    Tetranomial,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::Simplex => "simplex",
            Case::Condition1 => "condition1",
            Case::Condition2 => "condition2",
            Case::Condition3 => "condition3",
            Case::OriginInterior => "origin_interior",
            Case::Fallthrough => "fallthrough",
            Case::Tetranomial => "tetranomial",
        };
        f.write_str(s)
    }
}

/// `f(base_point ∘ t^direction) → +∞` as `t → +∞`, strictly increasing at
/// `t = 10, 100, 1000`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnboundedWitness {
    pub direction: ExponentVector,
    pub base_point: Vec<Float>,
    /// Term whose growth drives the curve.
    pub term_index: usize,
}

/// A coordinate of a (possibly boundary) maximizer.
#[derive(Clone, Debug, PartialEq)]
pub enum MaxCoord {
    Finite(Float),
    Zero,
    Infinity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximizerDescription {
    pub coords: Vec<MaxCoord>,
    /// Dimension of the orbit containing the maximizer.
    pub orbit_dim: usize,
    /// `ζ` with `x = exp(ζ + s·w)` as `s → ∞`.
    pub log_point: Vec<Float>,
    /// `w`; zero when the maximum is attained.
    pub boundary_direction: Vec<Float>,
}

impl MaximizerDescription {
    pub fn attained(&self) -> bool {
        self.coords.iter().all(|c| matches!(c, MaxCoord::Finite(_)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Unbounded(UnboundedWitness),
    Bounded {
        lambda_star: Float,
        maximizer: MaximizerDescription,
    },
    /// The supremum equals the constant term and is approached at the
    /// boundary. `tie` is set when the deciding log form could not be
    /// separated from zero at the precision cap.
    ConstantAtBoundary { value: Float, tie: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupremumResult {
    pub outcome: Outcome,
    pub case: Case,
    /// `|λ̂ − λ*| / max(1, |λ*|)` bound for `Bounded`, zero otherwise.
    pub certified_relative_error: f64,
    pub precision_bits: u32,
    /// Enclosure of the supremum when it is finite.
    pub enclosure: Option<Interval>,
    /// Enclosure of the log form that decided the case, if one was needed.
    pub log_form: Option<Interval>,
}

impl SupremumResult {
    pub fn is_unbounded(&self) -> bool {
        matches!(self.outcome, Outcome::Unbounded(_))
    }

    /// The finite supremum, if any.
    pub fn value(&self) -> Option<&Float> {
        match &self.outcome {
            Outcome::Unbounded(_) => None,
            Outcome::Bounded { lambda_star, .. } => Some(lambda_star),
            Outcome::ConstantAtBoundary { value, .. } => Some(value),
        }
    }
}

/// Dispatches on the support shape.
pub fn sup(f: &Fewnomial, budget: &PrecisionBudget) -> Result<SupremumResult> {
    let (n, m) = (f.n(), f.m());
    if n == 1 && m == 4 {
        return sup_tetranomial(f, budget.target_eps, budget);
    }
    if m == n + 1 {
        return sup_simplex(f, budget);
    }
    if m == n + 2 {
        return sup_circuit(f, budget.target_eps, budget);
    }
    Err(Error::NotInClass(format!(
        "{m} terms in {n} variables: only n+1 or n+2 terms (or univariate tetranomials) are supported"
    )))
}

/// Membership in `F**`: honest support containing the origin.
pub(crate) fn require_honest_with_origin(f: &Fewnomial, budget: &PrecisionBudget) -> Result<usize> {
    let class = classify_with(f, budget);
    if !class.honest {
        return Err(Error::NotInClass(format!(
            "support has affine dimension {} < n = {}",
            class.support_dim,
            f.n()
        )));
    }
    f.origin_index()
        .ok_or_else(|| Error::NotInClass("support does not contain the origin".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    EqualWithinPrecision,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionReport {
    pub decision: Decision,
    /// Enclosure of the supremum used for the final comparison, if finite.
    pub enclosure: Option<Interval>,
    /// Distance from `λ` to the nearest end of the enclosure (zero on ties).
    pub margin: Float,
    pub bits: u32,
    pub result: SupremumResult,
}

/// Decides `sup f ≥ λ`.
///
/// Exact ties, and enclosures that still contain `λ` at the precision cap,
/// are reported as `EqualWithinPrecision`.
pub fn sup_decide(f: &Fewnomial, lambda: &Float, budget: &PrecisionBudget) -> Result<DecisionReport> {
    let mut bits = budget.mantissa;
    loop {
        let b = budget.at(bits);
        let eps = b.half_tolerance().to_f64().max(f64::MIN_POSITIVE);
        let b = PrecisionBudget { target_eps: eps, ..b };
        let result = sup(f, &b)?;
        let zero = Float::with_val(bits, 0);
        let report = |decision, enclosure: Option<Interval>, margin: Float, result| DecisionReport {
            decision,
            enclosure,
            margin,
            bits,
            result,
        };
        match &result.outcome {
            Outcome::Unbounded(_) => return Ok(report(Decision::Yes, None, zero, result)),
            Outcome::ConstantAtBoundary { value, tie } => {
                let margin = Float::with_val(bits, value - lambda).abs();
                let decision = match value.partial_cmp(lambda) {
                    Some(Ordering::Equal) => Decision::EqualWithinPrecision,
                    Some(Ordering::Greater) => Decision::Yes,
                    // A tie at the cap leaves room for an unbounded supremum.
                    _ if *tie => Decision::EqualWithinPrecision,
                    _ => Decision::No,
                };
                let enclosure = Some(Interval::point(value, bits));
                return Ok(report(decision, enclosure, margin, result));
            }
            Outcome::Bounded { .. } => {
                let enc = result.enclosure.clone().expect("bounded results carry an enclosure");
                if *enc.lo() > *lambda {
                    let margin = Float::with_val(bits, enc.lo() - lambda);
                    return Ok(report(Decision::Yes, Some(enc), margin, result));
                }
                if *enc.hi() < *lambda {
                    let margin = Float::with_val(bits, lambda - enc.hi());
                    return Ok(report(Decision::No, Some(enc), margin, result));
                }
                if bits >= budget.cap {
                    return Ok(report(Decision::EqualWithinPrecision, Some(enc), zero, result));
                }
            }
        }
        bits = bits.saturating_mul(2).min(budget.cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn fl(v: f64) -> Float {
        Float::with_val(256, v)
    }

    #[test]
    fn decide_examples() {
        let f = Fewnomial::from_f64(2, &[(5.0, &[0.0, 0.0]), (-1.0, &[1.0, 0.0]), (-1.0, &[0.0, 1.0])]).unwrap();
        assert_eq!(sup_decide(&f, &fl(4.0), &b()).unwrap().decision, Decision::Yes);
        assert_eq!(sup_decide(&f, &fl(5.0), &b()).unwrap().decision, Decision::EqualWithinPrecision);
        assert_eq!(sup_decide(&f, &fl(5.5), &b()).unwrap().decision, Decision::No);

        let g = Fewnomial::from_f64(1, &[(-1.0, &[0.0]), (2.0, &[1.0]), (-1.0, &[2.0])]).unwrap();
        assert_eq!(sup_decide(&g, &fl(0.5), &b()).unwrap().decision, Decision::No);
        assert_eq!(sup_decide(&g, &fl(-0.5), &b()).unwrap().decision, Decision::Yes);
        let budget = PrecisionBudget::new(256, 1024, 1e-12).unwrap();
        let tie = sup_decide(&g, &fl(0.0), &budget).unwrap();
        assert_eq!(tie.decision, Decision::EqualWithinPrecision);
        assert_eq!(tie.bits, 1024);
    }

    #[test]
    fn unsupported_shape() {
        let f = Fewnomial::from_f64(1, &[(1.0, &[0.0]), (1.0, &[1.0]), (1.0, &[2.0]), (1.0, &[3.0]), (1.0, &[4.0])]).unwrap();
        assert!(matches!(sup(&f, &b()), Err(Error::NotInClass(_))));
    }
}
