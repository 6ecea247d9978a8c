use rug::Float;

use super::witnesses::scaled_witness;
use super::{require_honest_with_origin, Case, MaxCoord, MaximizerDescription, Outcome, SupremumResult};
use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;
use crate::precision::{Interval, PrecisionBudget};
use crate::univariate::trinomial_roots;

/// `x·f'(x)`, a trinomial once the constant term drops out.
fn log_derivative(f: &Fewnomial, origin: usize) -> Result<Fewnomial> {
    let terms = (0..f.m())
        .filter(|&i| i != origin)
        .map(|i| {
            let e = &f.exponent(i).coords()[0];
            let c = Float::with_val(f.coeff(i).prec() + e.prec(), f.coeff(i) * e);
            (c, f.exponent(i).clone())
        })
        .collect();
    Fewnomial::new(1, terms)
}

/// Mean-value enclosure of `f` over `x`: `f(m) + (g(X)/X)·(X − m)`.
fn value_enclosure(f: &Fewnomial, g: &Fewnomial, x: &Interval, prec: u32) -> Result<Interval> {
    let mid = x.mid();
    let at_mid = f.evaluate_enclosure(&[Interval::point(&mid, prec)])?;
    let slope = g
        .evaluate_enclosure(std::slice::from_ref(x))?
        .checked_div(x)
        .ok_or_else(|| Error::InvalidInput("root enclosure touches zero".into()))?;
    let offset = x - &Interval::point(&mid, prec);
    Ok(&at_mid + &(&slope * &offset))
}

/// Supremum of a univariate four-term fewnomial with a constant term.
///
/// Unbounded iff the highest positive or lowest negative exponent carries a
/// positive coefficient. Otherwise the supremum is the largest of the
/// boundary limits and the values at the positive roots of `x·f'`, which is
/// a trinomial.
pub fn sup_tetranomial(f: &Fewnomial, eps: f64, budget: &PrecisionBudget) -> Result<SupremumResult> {
    if f.n() != 1 || f.m() != 4 {
        return Err(Error::NotInClass(format!("univariate tetranomial required, got n = {}, m = {}", f.n(), f.m())));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let origin = require_honest_with_origin(f, budget)?;
    let exp = |i: usize| f.exponent(i).coords()[0].clone();
    let top = (0..4).max_by(|&i, &j| exp(i).total_cmp(&exp(j))).unwrap();
    let bottom = (0..4).min_by(|&i, &j| exp(i).total_cmp(&exp(j))).unwrap();
    let driver = if top != origin && f.coeff(top).is_sign_positive() {
        Some((top, 1))
    } else if bottom != origin && f.coeff(bottom).is_sign_positive() {
        Some((bottom, -1))
    } else {
        None
    };
    if let Some((v, s)) = driver {
        let ones = vec![Float::with_val(budget.mantissa, 1)];
        let witness = scaled_witness(f, ones, vec![Float::with_val(budget.mantissa, s)], v, budget)?;
        return Ok(SupremumResult {
            outcome: Outcome::Unbounded(witness),
            case: Case::Tetranomial,
            certified_relative_error: 0.0,
            precision_bits: budget.mantissa,
            enclosure: None,
            log_form: None,
        });
    }
    let constant = f.coeff(origin).clone();
    let boundary = top == origin || bottom == origin;
    let g = log_derivative(f, origin)?;
    let mut root_eps = (eps * 1e-3).max(1e-300);
    loop {
        let report = trinomial_roots(&g, root_eps, budget)?;
        let prec = report.bits.max(budget.mantissa) + 64;
        let mut best: Option<(Interval, Float)> = None;
        let mut hull: Option<(Float, Float)> = None;
        for root in &report.roots {
            let v = value_enclosure(f, &g, &root.enclosure, prec)?;
            hull = Some(match hull {
                None => (v.lo().clone(), v.hi().clone()),
                Some((lo, hi)) => (lo.max(v.lo()), hi.max(v.hi())),
            });
            if best.as_ref().map_or(true, |(b, _)| v.lo() > b.lo()) {
                best = Some((v, root.value.clone()));
            }
        }
        let Some((best, r)) = best else {
            if !boundary {
                return Err(Error::InvalidInput("bounded tetranomial without a critical point".into()));
            }
            return Ok(constant_result(constant, false, budget.mantissa));
        };
        let (lo, hi) = hull.expect("at least one root");
        let enclosure = Interval::from_bounds(&lo, &hi, prec);
        if boundary && *enclosure.hi() <= constant {
            return Ok(constant_result(constant, false, report.bits));
        }
        let separated = !boundary || *enclosure.lo() > constant;
        let err = enclosure.mixed_radius();
        if separated && err <= eps / 2.0 {
            let lr = Float::with_val(prec, r.ln_ref());
            return Ok(SupremumResult {
                outcome: Outcome::Bounded {
                    lambda_star: best.mid(),
                    maximizer: MaximizerDescription {
                        coords: vec![MaxCoord::Finite(r)],
                        orbit_dim: 1,
                        log_point: vec![lr],
                        boundary_direction: vec![Float::with_val(prec, 0)],
                    },
                },
                case: Case::Tetranomial,
                certified_relative_error: err * 2.0,
                precision_bits: report.bits,
                enclosure: Some(enclosure),
                log_form: None,
            });
        }
        if root_eps <= 1e-300 || report.bits >= budget.cap {
            if separated {
                return Err(Error::PrecisionExhausted { cap: budget.cap });
            }
            return Ok(constant_result(constant, true, report.bits));
        }
        root_eps = (root_eps * root_eps).max(1e-300);
    }
}

fn constant_result(value: Float, tie: bool, bits: u32) -> SupremumResult {
    let enclosure = Some(Interval::point(&value, value.prec()));
    SupremumResult {
        outcome: Outcome::ConstantAtBoundary { value, tie },
        case: Case::Tetranomial,
        certified_relative_error: 0.0,
        precision_bits: bits,
        enclosure,
        log_form: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supremum::witness_increases;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn tetra(t: &[(f64, f64); 4]) -> Fewnomial {
        let v: Vec<(f64, [f64; 1])> = t.iter().map(|&(c, e)| (c, [e])).collect();
        let r: Vec<(f64, &[f64])> = v.iter().map(|(c, e)| (*c, &e[..])).collect();
        Fewnomial::from_f64(1, &r).unwrap()
    }

    /// Log-spaced sweep plus the limit at `0⁺` (all other exponents positive).
    fn sweep_max(f: &Fewnomial) -> f64 {
        let mut best = f.coeff(0).to_f64();
        for k in 0..=400_000 {
            let s = -20.0 + 40.0 * k as f64 / 400_000.0;
            best = best.max(f.evaluate_f64(&[s.exp()]));
        }
        best
    }

    #[test]
    fn quartic_with_two_wells() {
        let f = tetra(&[(1.0, 0.0), (4.0, 1.0), (-6.0, 2.0), (-1.0, 4.0)]);
        let r = sup_tetranomial(&f, 1e-20, &b()).unwrap();
        assert_eq!(r.case, Case::Tetranomial);
        let v = r.value().unwrap().to_f64();
        assert!((v - sweep_max(&f)).abs() < 1e-8, "{v}");
        assert!(r.certified_relative_error <= 1e-20);
    }

    #[test]
    fn unbounded_ends() {
        let f = tetra(&[(1.0, 0.0), (-4.0, 1.0), (-6.0, 2.0), (1.0, 3.0)]);
        let r = sup_tetranomial(&f, 1e-12, &b()).unwrap();
        let Outcome::Unbounded(w) = &r.outcome else { panic!() };
        assert!(witness_increases(&f, w, 256));
        let g = tetra(&[(1.0, 0.0), (2.0, -1.0), (-6.0, 2.0), (-1.0, 3.0)]);
        let Outcome::Unbounded(w) = &sup_tetranomial(&g, 1e-12, &b()).unwrap().outcome else { panic!() };
        assert!(w.direction.to_f64()[0] < 0.0);
    }

    #[test]
    fn constant_at_boundary() {
        // Decreasing everywhere: sup is the constant as x → 0.
        let f = tetra(&[(3.0, 0.0), (-1.0, 1.0), (-1.0, 2.0), (-1.0, 3.0)]);
        let r = sup_tetranomial(&f, 1e-12, &b()).unwrap();
        assert!(matches!(r.outcome, Outcome::ConstantAtBoundary { tie: false, .. }));
        assert_eq!(r.value().unwrap().to_f64(), 3.0);
    }

    #[test]
    fn matches_sweep_on_random_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 25 {
            let mut e = [rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)];
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if e[1] - e[0] < 0.05 || e[2] - e[1] < 0.05 {
                continue;
            }
            let f = tetra(&[
                (rng.gen_range(-5.0..5.0), 0.0),
                (rng.gen_range(-5.0..5.0), e[0]),
                (rng.gen_range(-5.0..5.0), e[1]),
                (-rng.gen_range(0.1..5.0), e[2]),
            ]);
            let r = sup_tetranomial(&f, 1e-15, &b()).unwrap();
            let v = r.value().unwrap().to_f64();
            let s = sweep_max(&f);
            assert!(v >= s - 1e-9 && v - s < 1e-6 * (1.0 + s.abs()), "{f}: {v} vs {s}");
            checked += 1;
        }
    }
}
