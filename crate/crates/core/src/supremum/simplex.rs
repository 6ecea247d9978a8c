use rug::Float;

use super::witnesses::scaled_witness;
use super::{require_honest_with_origin, Case, Outcome, SupremumResult};
use crate::error::Result;
use crate::fewnomial::Fewnomial;
use crate::linalg::{solve, Matrix};
use crate::precision::{Interval, PrecisionBudget};
use crate::transform::canonicalize_simplex;

/// Supremum of `f ∈ F**_{n,n+1}`.
///
/// In canonical form `c + z_1 + … + z_ℓ − z_{ℓ+1} − … − z_n` the supremum is
/// `+∞` when `ℓ ≥ 1` and `c` otherwise, approached as every `z_k → 0`.
pub fn sup_simplex(f: &Fewnomial, budget: &PrecisionBudget) -> Result<SupremumResult> {
    require_honest_with_origin(f, budget)?;
    let canon = canonicalize_simplex(f, budget)?;
    if canon.ell == 0 {
        return Ok(SupremumResult {
            outcome: Outcome::ConstantAtBoundary {
                value: canon.c.clone(),
                tie: false,
            },
            case: Case::Simplex,
            certified_relative_error: 0.0,
            precision_bits: budget.mantissa,
            enclosure: Some(Interval::point(&canon.c, f.prec())),
            log_form: None,
        });
    }
    let v = canon.permutation[0];
    let prec = budget.mantissa + 32;
    let n = f.n();
    // (a_v − a_k)·w = 1 for every k ≠ v; the origin row reads a_v·w = 1.
    let mut m = Matrix::zeros(n, n, prec);
    let mut row = 0;
    for k in (0..f.m()).filter(|&k| k != v) {
        for (j, (x, y)) in f.exponent(v).coords().iter().zip(f.exponent(k).coords()).enumerate() {
            m.set(row, j, Float::with_val(prec, x - y));
        }
        row += 1;
    }
    let w = solve(&m, &vec![Float::with_val(prec, 1); n], &budget.at(prec))?;
    let ones = vec![Float::with_val(budget.mantissa, 1); n];
    let witness = scaled_witness(f, ones, w, v, budget)?;
    Ok(SupremumResult {
        outcome: Outcome::Unbounded(witness),
        case: Case::Simplex,
        certified_relative_error: 0.0,
        precision_bits: budget.mantissa,
        enclosure: None,
        log_form: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fewnomial::ExponentVector;
    use crate::supremum::witness_increases;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    #[test]
    fn negative_terms_give_constant() {
        let f = Fewnomial::from_f64(2, &[(5.0, &[0.0, 0.0]), (-1.0, &[1.0, 0.0]), (-1.0, &[0.0, 1.0])]).unwrap();
        let r = sup_simplex(&f, &b()).unwrap();
        assert_eq!(r.case, Case::Simplex);
        assert_eq!(r.value().unwrap().to_f64(), 5.0);
        assert!(matches!(r.outcome, Outcome::ConstantAtBoundary { tie: false, .. }));
    }

    #[test]
    fn irrational_exponent_witness() {
        let p = 256;
        let pi = crate::precision::pi(p);
        let f = Fewnomial::new(
            2,
            vec![
                (Float::with_val(p, -3), ExponentVector::zeros(2, p)),
                (Float::with_val(p, 1), ExponentVector::new(vec![pi, Float::with_val(p, 0)]).unwrap()),
                (Float::with_val(p, -1), ExponentVector::from_f64(&[0.0, 1.0], p).unwrap()),
            ],
        )
        .unwrap();
        let r = sup_simplex(&f, &b()).unwrap();
        let Outcome::Unbounded(w) = &r.outcome else { panic!("expected unbounded") };
        assert_eq!(w.term_index, 1);
        let d = w.direction.to_f64();
        assert!(d[0] > 0.0 && d[1].abs() < 1e-30 * d[0]);
        assert!(witness_increases(&f, w, p));
    }

    #[test]
    fn power_tower_exponents_are_unbounded() {
        // c + Σ x_i^{D^i}
        let f = Fewnomial::from_f64(
            3,
            &[(-7.0, &[0.0, 0.0, 0.0]), (1.0, &[2.0, 0.0, 0.0]), (1.0, &[0.0, 4.0, 0.0]), (1.0, &[0.0, 0.0, 8.0])],
        )
        .unwrap();
        let r = sup_simplex(&f, &b()).unwrap();
        let Outcome::Unbounded(w) = &r.outcome else { panic!("expected unbounded") };
        assert!(witness_increases(&f, w, 256));
    }

    #[test]
    fn mixed_signs_general_position() {
        let f = Fewnomial::from_f64(2, &[(1.0, &[0.0, 0.0]), (-2.0, &[1.0, 1.0]), (0.5, &[-1.0, 2.0])]).unwrap();
        let r = sup_simplex(&f, &b()).unwrap();
        let Outcome::Unbounded(w) = &r.outcome else { panic!("expected unbounded") };
        assert!(witness_increases(&f, w, 256));
    }

    #[test]
    fn rejects_missing_origin_and_dishonest() {
        let f = Fewnomial::from_f64(2, &[(5.0, &[1.0, 1.0]), (-1.0, &[1.0, 0.0]), (-1.0, &[0.0, 1.0])]).unwrap();
        assert!(matches!(sup_simplex(&f, &b()), Err(Error::NotInClass(_))));
        let g = Fewnomial::from_f64(2, &[(5.0, &[0.0, 0.0]), (-1.0, &[1.0, 1.0]), (-1.0, &[2.0, 2.0])]).unwrap();
        assert!(matches!(sup_simplex(&g, &b()), Err(Error::NotInClass(_))));
    }
}
