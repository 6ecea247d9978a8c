//! Circuits, their b-vectors and the discriminant test.

use std::cmp::Ordering;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::ExponentVector;
use crate::linalg::{b_vector, solve, BVector, Matrix};
use crate::precision::{
    log_linear_form_enclosure, pow2, CertifiedValue, Interval, LogTerm, PrecisionBudget,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    NondegenerateCircuit,
    DegenerateCircuit,
    NotCircuit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitData {
    pub kind: CircuitKind,
    /// Normalized so that `b[interior]` is negative when an interior point exists.
    pub b: BVector,
    /// Indices with `b_i ≠ 0`.
    pub sub_circuit_indices: Vec<usize>,
    /// The unique index of minority sign on the sub-circuit, if any.
    pub interior_index: Option<usize>,
}

impl CircuitData {
    pub fn sign(&self, i: usize) -> Ordering {
        self.b.sign(i)
    }

    pub fn in_sub_circuit(&self, i: usize) -> bool {
        !self.b.is_zero(i)
    }

    /// Enclosure of `b_i` at `prec` bits.
    pub fn b_enclosure(&self, i: usize, prec: u32) -> Interval {
        self.b.enclosure(i, prec)
    }
}

/// Classifies a support of `n+2` points in `R^n`.
///
/// The sub-circuit is the zero pattern of `b`: when `Â` has full rank its
/// null space is a line and `Supp(b)` is the unique minimal dependent set.
pub fn classify_circuit(support: &[ExponentVector], budget: &PrecisionBudget) -> Result<CircuitData> {
    let b = b_vector(support, budget)?;
    let idx = b.support();
    let m = support.len();
    let kind = if idx.is_empty() {
        CircuitKind::NotCircuit
    } else if idx.len() == m {
        CircuitKind::NondegenerateCircuit
    } else {
        CircuitKind::DegenerateCircuit
    };
    let pos: Vec<usize> = idx.iter().copied().filter(|&i| b.sign(i) == Ordering::Greater).collect();
    let neg: Vec<usize> = idx.iter().copied().filter(|&i| b.sign(i) == Ordering::Less).collect();
    let (interior_index, flip) = match (pos.len(), neg.len()) {
        (1, k) if k >= 2 => (Some(pos[0]), true),
        (k, 1) if k >= 2 => (Some(neg[0]), false),
        _ => (None, false),
    };
    Ok(CircuitData {
        kind,
        b: if flip { b.negated() } else { b },
        sub_circuit_indices: idx,
        interior_index,
    })
}

/// A root of `g(y) = Σ c_i e^{a_i·y}` where the gradient also vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneratePoint {
    pub zeta: Vec<Float>,
    pub x: Vec<Float>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub holds: bool,
    /// All `c_i b_i` share one sign.
    pub sign_condition: bool,
    /// Enclosure of the log form, when the sign condition holds.
    pub log_form: Option<Interval>,
    pub point: Option<DegeneratePoint>,
    pub bits: u32,
}

fn sign_of(x: &Float) -> i32 {
    match x.cmp0() {
        Some(Ordering::Greater) => 1,
        Some(Ordering::Less) => -1,
        _ => 0,
    }
}

/// Enclosure of `Σ_{i∈indices} σ·b_i·ln(σ·c_i/b_i)`.
pub(crate) fn log_form_enclosure(
    c: &[Interval],
    b: &[Interval],
    indices: &[usize],
    sigma: i32,
) -> Result<Interval> {
    let mut terms = Vec::with_capacity(indices.len());
    for &i in indices {
        let (ci, bi) = (&c[i], &b[i]);
        let (ci, bi) = if sigma < 0 { (-ci, bi.clone()) } else { (ci.clone(), bi.clone()) };
        let ratio = ci.checked_div(&bi).filter(|r| r.is_positive()).ok_or_else(|| {
            Error::SignPreconditionViolated(format!("σ·c_{i}/b_{i} is not positive"))
        })?;
        let weight = if sigma < 0 { -bi } else { bi };
        terms.push(LogTerm { weight, base: ratio });
    }
    log_linear_form_enclosure(&terms)
}

/// `Σ_{i∈indices} σ·b_i·ln(σ·c_i/b_i)` with stored scalars taken as exact.
pub fn discriminant_log_form(
    c: &[Float],
    b: &[Float],
    indices: &[usize],
    sigma: i32,
    prec: u32,
) -> Result<CertifiedValue> {
    if c.len() != b.len() || indices.iter().any(|&i| i >= c.len()) {
        return Err(Error::InvalidInput("coefficient and b-vector lengths differ".into()));
    }
    if sigma != 1 && sigma != -1 {
        return Err(Error::InvalidInput("sigma must be ±1".into()));
    }
    for &i in indices {
        if sign_of(&c[i]) * sign_of(&b[i]) != sigma {
            return Err(Error::SignPreconditionViolated(format!(
                "σ·c_{i}/b_{i} is not positive"
            )));
        }
    }
    let ci: Vec<Interval> = c.iter().map(|v| Interval::point(v, prec)).collect();
    let bi: Vec<Interval> = b.iter().map(|v| Interval::point(v, prec)).collect();
    Ok(log_form_enclosure(&ci, &bi, indices, sigma)?.to_certified())
}

/// Outcome of the vanishing test for one coefficient vector on a circuit
/// (or sub-circuit) with known b-vector.
#[derive(Clone, Debug, PartialEq)]
pub struct VanishingTest {
    pub sign_condition: bool,
    pub sigma: i32,
    pub log_form: Option<Interval>,
    pub holds: bool,
    pub bits: u32,
}

/// Decides whether `∏ (σc_i/b_i)^{σb_i} = 1` with all `σ = sign(c_i b_i)` equal.
///
/// "Equal to one" means the log-form enclosure lies inside
/// `[−2^{-p/4}, 2^{-p/4}]` for the budget's starting mantissa `p`; "not equal"
/// means the enclosure misses that window. Straddling enclosures escalate.
pub fn vanishing_test<C>(
    coeffs: C,
    data: &CircuitData,
    indices: &[usize],
    budget: &PrecisionBudget,
) -> Result<VanishingTest>
where
    C: Fn(u32) -> Vec<Interval>,
{
    let probe = coeffs(budget.mantissa);
    let signs: Vec<i32> = indices
        .iter()
        .map(|&i| {
            let cs = match probe[i].sign() {
                Some(Ordering::Greater) => 1,
                Some(Ordering::Less) => -1,
                _ => 0,
            };
            cs * match data.sign(i) {
                Ordering::Greater => 1,
                Ordering::Less => -1,
                Ordering::Equal => 0,
            }
        })
        .collect();
    let sigma = signs.first().copied().unwrap_or(0);
    if sigma == 0 || signs.iter().any(|&s| s != sigma) {
        return Ok(VanishingTest {
            sign_condition: false,
            sigma,
            log_form: None,
            holds: false,
            bits: budget.mantissa,
        });
    }
    let tau = budget.quarter_tolerance();
    let mut bits = budget.mantissa;
    loop {
        let prec = bits + 16;
        let c = coeffs(prec);
        let b: Vec<Interval> = (0..data.b.len()).map(|i| data.b_enclosure(i, prec)).collect();
        let form = log_form_enclosure(&c, &b, indices, sigma)?;
        let inside = *form.lo() >= -tau.clone() && *form.hi() <= tau;
        let outside = *form.lo() > tau || *form.hi() < -tau.clone();
        if inside || outside {
            return Ok(VanishingTest {
                sign_condition: true,
                sigma,
                log_form: Some(form),
                holds: inside,
                bits,
            });
        }
        if bits >= budget.cap {
            return Err(Error::PrecisionExhausted { cap: budget.cap });
        }
        bits = bits.saturating_mul(2).min(budget.cap);
    }
}

/// The discriminant test on a non-degenerate circuit, with the degenerate
/// point when it exists.
pub fn discriminant_membership(
    c: &[Float],
    support: &[ExponentVector],
    budget: &PrecisionBudget,
) -> Result<Membership> {
    if c.len() != support.len() {
        return Err(Error::InvalidInput("one coefficient per support point is required".into()));
    }
    let data = classify_circuit(support, budget)?;
    if data.kind != CircuitKind::NondegenerateCircuit {
        return Err(Error::NotInClass("support is not a non-degenerate circuit".into()));
    }
    let all: Vec<usize> = (0..c.len()).collect();
    let test = vanishing_test(
        |prec| c.iter().map(|v| Interval::point(v, prec)).collect(),
        &data,
        &all,
        budget,
    )?;
    let point = if test.holds {
        Some(recover_point(c, support, &data.b, test.sigma, budget)?)
    } else {
        None
    };
    Ok(Membership {
        holds: test.holds,
        sign_condition: test.sign_condition,
        log_form: test.log_form,
        point,
        bits: test.bits,
    })
}

/// Solves `(a_i − a_0)·ζ = ln(σb_i/c_i) − ln(σb_0/c_0)` for `i = 1..n`.
fn recover_point(
    c: &[Float],
    support: &[ExponentVector],
    b: &BVector,
    sigma: i32,
    budget: &PrecisionBudget,
) -> Result<DegeneratePoint> {
    let n = support[0].dim();
    let prec = budget.mantissa + 32;
    let target = |i: usize| -> Float {
        let bi = Float::with_val(prec, &b.exact()[i]);
        let r = Float::with_val(prec, &bi / &c[i]) * sigma;
        r.ln()
    };
    let t0 = target(0);
    let mut m = Matrix::zeros(n, n, prec);
    let mut rhs = Vec::with_capacity(n);
    for i in 1..=n {
        for k in 0..n {
            m.set(
                i - 1,
                k,
                Float::with_val(prec, &support[i].coords()[k] - &support[0].coords()[k]),
            );
        }
        rhs.push(target(i) - &t0);
    }
    let zeta = solve(&m, &rhs, &budget.at(prec))?;
    let x = zeta.iter().map(|z| Float::with_val(prec, z.exp_ref())).collect();
    Ok(DegeneratePoint { zeta, x })
}

/// Largest `|g|`, `|∂g/∂y_k|` at `ζ` for `g(y) = Σ c_i e^{a_i·y}`, relative
/// to `max |c_i e^{a_i·ζ}|`.
pub fn degenerate_residual(c: &[Float], support: &[ExponentVector], zeta: &[Float], prec: u32) -> Float {
    let n = zeta.len();
    let mut g = Float::with_val(prec, 0);
    let mut grad = vec![Float::with_val(prec, 0); n];
    let mut scale = Float::with_val(prec, 0);
    for (ci, a) in c.iter().zip(support) {
        let term = Float::with_val(prec, a.dot(zeta, prec).exp() * ci);
        for k in 0..n {
            grad[k] += Float::with_val(prec, &term * &a.coords()[k]);
        }
        scale = scale.max(&Float::with_val(prec, term.abs_ref()));
        g += term;
    }
    let mut worst = g.abs();
    for d in grad {
        worst = worst.max(&d.abs());
    }
    worst / scale
}

/// Vanishing threshold used by [`vanishing_test`].
pub fn vanishing_threshold(budget: &PrecisionBudget) -> Float {
    pow2(budget.mantissa, -(budget.mantissa as i32) / 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_determinant;
    use crate::transform::MonomialMap;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::Rational;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn pts(points: &[&[f64]]) -> Vec<ExponentVector> {
        points.iter().map(|p| ExponentVector::from_f64(p, 256).unwrap()).collect()
    }

    fn fl(v: f64) -> Float {
        Float::with_val(256, v)
    }

    /// Affine independence by exact rank of the lifted columns.
    fn affinely_independent(support: &[ExponentVector], idx: &[usize]) -> bool {
        let n = support[0].dim();
        let rows: Vec<Vec<Rational>> = idx
            .iter()
            .map(|&i| {
                let mut r = vec![Rational::from(1)];
                r.extend(support[i].coords().iter().map(|v| v.to_rational().unwrap()));
                r
            })
            .collect();
        if idx.len() > n + 1 {
            return false;
        }
        // Gram determinant of the lifted vectors.
        let gram: Vec<Vec<Rational>> = rows
            .iter()
            .map(|u| {
                rows.iter()
                    .map(|v| u.iter().zip(v).fold(Rational::new(), |acc, (x, y)| acc + Rational::from(x * y)))
                    .collect()
            })
            .collect();
        exact_determinant(&gram) != 0
    }

    /// Minimal dependent subset by enumeration.
    fn minimal_dependent(support: &[ExponentVector]) -> Option<Vec<usize>> {
        let m = support.len();
        for k in 2..=m {
            for s in crate::condition::subsets(m, k) {
                if !affinely_independent(support, &s)
                    && (0..s.len()).all(|d| {
                        let t: Vec<usize> = s.iter().enumerate().filter(|(j, _)| *j != d).map(|(_, &v)| v).collect();
                        affinely_independent(support, &t)
                    })
                {
                    return Some(s);
                }
            }
        }
        None
    }

    #[test]
    fn line_circuit() {
        let d = classify_circuit(&pts(&[&[0.0], &[1.0], &[2.0]]), &b()).unwrap();
        assert_eq!(d.kind, CircuitKind::NondegenerateCircuit);
        assert_eq!(d.interior_index, Some(1));
        let expect = [-1, 2, -1];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(d.b.exact()[i], -e);
        }
        assert_eq!(d.sign(1), Ordering::Less);
    }

    #[test]
    fn degenerate_circuit_matches_enumeration() {
        let s = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
        let d = classify_circuit(&s, &b()).unwrap();
        assert_eq!(d.kind, CircuitKind::DegenerateCircuit);
        assert_eq!(d.sub_circuit_indices, vec![1, 2, 3]);
        assert_eq!(d.interior_index, Some(2));
        assert_eq!(minimal_dependent(&s), Some(vec![1, 2, 3]));
        for &i in &d.sub_circuit_indices {
            let rest: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            assert!(affinely_independent(&s, &rest));
        }
    }

    #[test]
    fn simplex_plus_generic_point() {
        let s = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.3, 0.4]]);
        let d = classify_circuit(&s, &b()).unwrap();
        assert_eq!(d.kind, CircuitKind::NondegenerateCircuit);
        assert_eq!(d.interior_index, Some(3));
        let s = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let d = classify_circuit(&s, &b()).unwrap();
        assert_eq!(d.interior_index, None);
    }

    #[test]
    fn random_sub_circuits_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let n = rng.gen_range(2..=3);
            let mut s: Vec<Vec<f64>> = vec![vec![0.0; n]];
            for _ in 0..n {
                s.push((0..n).map(|_| rng.gen_range(-8i32..=8) as f64 / 2.0).collect());
            }
            // Last point: a combination of a random subset of the others.
            let k = rng.gen_range(2..=n + 1);
            let mut last = vec![0.0; n];
            let mut w_left = 1.0;
            for (j, p) in s.iter().enumerate().take(k) {
                let w = if j + 1 == k { w_left } else { rng.gen_range(-4i32..=4) as f64 / 4.0 };
                w_left -= w;
                for (l, v) in p.iter().enumerate() {
                    last[l] += w * v;
                }
            }
            s.push(last);
            let refs: Vec<&[f64]> = s.iter().map(|v| v.as_slice()).collect();
            let support = pts(&refs);
            let distinct = (0..support.len()).all(|i| (0..i).all(|j| support[i] != support[j]));
            if !distinct {
                continue;
            }
            let d = classify_circuit(&support, &b()).unwrap();
            match minimal_dependent(&support) {
                Some(sub) if d.kind != CircuitKind::NotCircuit => assert_eq!(d.sub_circuit_indices, sub),
                _ => assert_eq!(d.kind, CircuitKind::NotCircuit),
            }
        }
    }

    #[test]
    fn log_form_examples() {
        let c = [fl(1.0), fl(-2.0), fl(1.0)];
        let bv = [fl(-1.0), fl(2.0), fl(-1.0)];
        let v = discriminant_log_form(&c, &bv, &[0, 1, 2], -1, 256).unwrap();
        assert!(v.contains_zero());
        let same = discriminant_log_form(&bv, &bv, &[0, 1, 2], 1, 256).unwrap();
        assert!(same.contains_zero());
        // Σ σ b_i ln(σ c_i/b_i) = ln 1 − 2 ln(3/2) + ln 1.
        let c = [fl(1.0), fl(-3.0), fl(1.0)];
        let v = discriminant_log_form(&c, &bv, &[0, 1, 2], -1, 512).unwrap();
        let oracle = Float::with_val(512, 1.5).ln() * -2i32;
        assert!(v.contains(&oracle));
        assert!(Float::with_val(512, &v.value - &oracle).abs() < pow2(512, -480));
        assert!(matches!(
            discriminant_log_form(&c, &bv, &[0, 1, 2], 1, 256),
            Err(Error::SignPreconditionViolated(_))
        ));
    }

    #[test]
    fn square_of_binomial() {
        let s = pts(&[&[0.0], &[1.0], &[2.0]]);
        let m = discriminant_membership(&[fl(1.0), fl(-2.0), fl(1.0)], &s, &b()).unwrap();
        assert!(m.holds && m.sign_condition);
        let p = m.point.unwrap();
        assert!(p.zeta[0].clone().abs() < pow2(256, -200));
        let m = discriminant_membership(&[fl(1.0), fl(1.0), fl(1.0)], &s, &b()).unwrap();
        assert!(!m.holds && !m.sign_condition);
    }

    #[test]
    fn degenerate_support_rejected() {
        let s = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
        let c = [fl(1.0), fl(1.0), fl(1.0), fl(1.0)];
        assert!(matches!(discriminant_membership(&c, &s, &b()), Err(Error::NotInClass(_))));
    }

    #[test]
    fn constructed_points_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..25 {
            let n = rng.gen_range(1..=3);
            let mut raw: Vec<Vec<f64>> = vec![vec![0.0; n]];
            for _ in 0..n + 1 {
                raw.push((0..n).map(|_| rng.gen_range(-4.0..4.0)).collect());
            }
            let refs: Vec<&[f64]> = raw.iter().map(|v| v.as_slice()).collect();
            let support = pts(&refs);
            let d = classify_circuit(&support, &b()).unwrap();
            if d.kind != CircuitKind::NondegenerateCircuit {
                continue;
            }
            let zeta: Vec<Float> = (0..n).map(|_| fl(rng.gen_range(-1.0..1.0))).collect();
            let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
            let c: Vec<Float> = support
                .iter()
                .zip(d.b.coords())
                .map(|(a, bi)| Float::with_val(256, (-a.dot(&zeta, 256)).exp() * bi) * sigma)
                .collect();
            let m = discriminant_membership(&c, &support, &b()).unwrap();
            assert!(m.holds);
            let p = m.point.unwrap();
            for (z, w) in p.zeta.iter().zip(&zeta) {
                assert!(Float::with_val(256, z - w).abs() < pow2(256, -150));
            }
            assert!(degenerate_residual(&c, &support, &p.zeta, 256) <= b().quarter_tolerance());
        }
    }

    #[test]
    fn perturbation_moves_log_form_monotonically() {
        let s = pts(&[&[0.0], &[1.5], &[3.0]]);
        let t = 2.0f64;
        let base = [t * t, -2.0 * t, 1.0];
        let mut last: Option<Float> = None;
        for k in 1..=5 {
            let delta = 1e-3 * k as f64;
            let c = [fl(base[0]) * (1.0 + delta), fl(base[1]), fl(base[2])];
            let m = discriminant_membership(&c, &s, &b()).unwrap();
            assert!(!m.holds);
            let v = m.log_form.unwrap().mid().abs();
            if let Some(prev) = &last {
                assert!(v > *prev);
            }
            last = Some(v);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn double_root_family(a in 0.5f64..10.0, t in 0.1f64..10.0) {
            let s = pts(&[&[0.0], &[a], &[2.0 * a]]);
            let c = [Float::with_val(256, t) * t, fl(-2.0 * t), fl(1.0)];
            let m = discriminant_membership(&c, &s, &b()).unwrap();
            prop_assert!(m.holds);
            let form = m.log_form.unwrap();
            prop_assert!(form.lo().to_f64().abs() <= 1e-30 && form.hi().to_f64().abs() <= 1e-30);
            let x = &m.point.unwrap().x[0];
            let oracle = Float::with_val(512, t).ln() / a;
            let oracle = oracle.exp();
            let rel = Float::with_val(256, x - &oracle).abs() / &oracle;
            prop_assert!(rel < 1e-25);
        }

        #[test]
        fn classification_invariant_under_maps(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=3);
            let mut raw: Vec<Vec<f64>> = vec![vec![0.0; n]];
            for _ in 0..n + 1 {
                raw.push((0..n).map(|_| rng.gen_range(-4i32..=4) as f64).collect());
            }
            let refs: Vec<&[f64]> = raw.iter().map(|v| v.as_slice()).collect();
            let support = pts(&refs);
            let distinct = (0..support.len()).all(|i| (0..i).all(|j| support[i] != support[j]));
            prop_assume!(distinct);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else if j > i { rng.gen_range(-3i32..=3) as f64 } else { 0.0 }).collect())
                .collect();
            let rrefs: Vec<&[f64]> = rows.iter().map(|v| v.as_slice()).collect();
            let u = MonomialMap::from_f64_rows(&rrefs, &b()).unwrap();
            let mapped: Vec<ExponentVector> = support.iter().map(|a| u.map_exponent(a, 256)).collect();
            let (d1, d2) = (classify_circuit(&support, &b()).unwrap(), classify_circuit(&mapped, &b()).unwrap());
            prop_assert_eq!(d1.kind, d2.kind);
            prop_assert_eq!(d1.sub_circuit_indices, d2.sub_circuit_indices);
            prop_assert_eq!(d1.interior_index, d2.interior_index);
        }
    }
}
