//! Condition number of a fewnomial: coefficient factors and the maximal
//! minors of the lifted support matrix.

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;
use crate::linalg::{determinant, LiftedMatrix};
use crate::precision::{pow2, PrecisionBudget};

/// One maximal minor `β_J = |det Â_J|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minor {
    pub columns: Vec<usize>,
    pub value: f64,
    /// Set when the determinant fell below the zero-test threshold.
    pub vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub minors: Vec<Minor>,
    /// Natural log of `C(f)`.
    pub log_condition: f64,
    /// Only for integer coefficients and integer exponents.
    pub sparse_size_bits: Option<u64>,
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic k-subsets of `0..n`.
pub(crate) fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let cur = current.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

fn ln_max3(x: &Float, prec: u32) -> Float {
    let three = Float::with_val(prec, 3);
    let a = Float::with_val(prec, x.abs_ref());
    let r = Float::with_val(prec, a.recip_ref());
    three.max(&a).max(&r).ln()
}

fn integer_bits(x: &Float) -> Option<u64> {
    if !x.is_integer() {
        return None;
    }
    let k = x.to_integer()?.abs() + 1u32;
    // ⌈log2(|k|+1)⌉
    let bits = if k.is_power_of_two() {
        k.significant_bits() as u64 - 1
    } else {
        k.significant_bits() as u64
    };
    Some(1 + bits)
}

/// `S(f)`: total bit size of the integer data, or `None` if any scalar is
/// not an integer.
pub fn sparse_size(f: &Fewnomial) -> Option<u64> {
    let mut total = 0;
    for t in f.terms() {
        total += integer_bits(&t.coeff)?;
        for a in t.exponent.coords() {
            total += integer_bits(a)?;
        }
    }
    Some(total)
}

/// Computes `ln C(f)`.
///
/// With `subset_budget = None` the support must have at most `n+2` points;
/// otherwise up to `subset_budget` minors are enumerated.
pub fn log_condition_number(
    f: &Fewnomial,
    budget: &PrecisionBudget,
    subset_budget: Option<u128>,
) -> Result<ConditionReport> {
    let (n, m) = (f.n(), f.m());
    let count = binomial(m, n + 1);
    let allowed = subset_budget.unwrap_or((n + 2) as u128);
    if subset_budget.is_none() && m > n + 2 || count > allowed {
        return Err(Error::SubsetBudgetExceeded {
            subsets: count,
            budget: allowed,
        });
    }
    let prec = budget.mantissa;
    let mut log_c = Float::with_val(prec, 0);
    for t in f.terms() {
        log_c += ln_max3(&t.coeff, prec);
    }
    let lifted = LiftedMatrix::new(&f.support())?;
    let threshold = pow2(64, -(budget.mantissa as i32) + 8);
    let mut minors = Vec::with_capacity(count as usize);
    for cols in subsets(m, n + 1) {
        let sub = lifted.minor_matrix(&cols);
        let det = determinant(&sub, budget).abs();
        let vanishes = det <= Float::with_val(64, sub.hadamard_bound() * &threshold);
        if vanishes {
            log_c += Float::with_val(prec, 3).ln();
        } else {
            log_c += ln_max3(&det, prec);
        }
        minors.push(Minor {
            columns: cols,
            value: if vanishes { 0.0 } else { det.to_f64() },
            vanishes,
        });
    }
    Ok(ConditionReport {
        minors,
        log_condition: log_c.to_f64(),
        sparse_size_bits: sparse_size(f),
    })
}

/// Exact integer determinant via the Bareiss recurrence.
pub fn integer_determinant(rows: &[Vec<Integer>]) -> Integer {
    let n = rows.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut a = rows.to_vec();
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(p, k);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_determinant;
    use proptest::prelude::*;
    use rug::Rational;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    #[test]
    fn subsets_enumerate_all() {
        let all: Vec<_> = subsets(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(subsets(3, 3).count(), 1);
        assert_eq!(subsets(2, 3).count(), 0);
        assert_eq!(binomial(10, 3), 120);
    }

    #[test]
    fn binomial_example() {
        let f = Fewnomial::from_f64(1, &[(-1.0, &[0.0]), (1.0, &[1.0])]).unwrap();
        let r = log_condition_number(&f, &b(), None).unwrap();
        assert_eq!(r.minors.len(), 1);
        assert_eq!(r.minors[0].value, 1.0);
        assert!((r.log_condition - 3.0 * 3f64.ln()).abs() < 1e-12);
        assert!((r.log_condition - 3.2958).abs() < 1e-4);
    }

    #[test]
    fn all_threes() {
        // Support {0, 3}: the single minor is 3.
        let f = Fewnomial::from_f64(1, &[(3.0, &[0.0]), (-3.0, &[3.0])]).unwrap();
        let r = log_condition_number(&f, &b(), None).unwrap();
        assert!((r.log_condition - 3.0 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn budget_enforced() {
        let f = Fewnomial::from_f64(
            1,
            &[(1.0, &[0.0]), (1.0, &[1.0]), (1.0, &[2.0]), (1.0, &[3.0])],
        )
        .unwrap();
        assert!(matches!(
            log_condition_number(&f, &b(), None),
            Err(Error::SubsetBudgetExceeded { subsets: 6, .. })
        ));
        assert_eq!(log_condition_number(&f, &b(), Some(6)).unwrap().minors.len(), 6);
        assert!(log_condition_number(&f, &b(), Some(5)).is_err());
    }

    #[test]
    fn vanishing_minor_contributes_three() {
        // Three collinear points in the plane plus one off the line.
        let f = Fewnomial::from_f64(
            2,
            &[(1.0, &[0.0, 0.0]), (1.0, &[1.0, 0.0]), (1.0, &[2.0, 0.0]), (1.0, &[0.0, 1.0])],
        )
        .unwrap();
        let r = log_condition_number(&f, &b(), None).unwrap();
        assert_eq!(r.minors.iter().filter(|m| m.vanishes).count(), 1);
        let expected: f64 = 4.0 * 3f64.ln()
            + r.minors.iter().map(|m| if m.vanishes { 3f64.ln() } else { m.value.max(3.0).ln() }).sum::<f64>();
        assert!((r.log_condition - expected).abs() < 1e-12);
    }

    #[test]
    fn pentanomial_minors_match_exact_oracle() {
        let prec = 256;
        let e = crate::precision::euler(prec);
        let r363 = Float::with_val(prec, 363).sqrt();
        use crate::fewnomial::ExponentVector;
        let pts = vec![
            ExponentVector::from_f64(&[0.0, 0.0, 0.0], prec).unwrap(),
            ExponentVector::new(vec![Float::with_val(prec, 999), Float::with_val(prec, 0), r363]).unwrap(),
            ExponentVector::from_f64(&[73.0, 0.0, 0.0], prec).unwrap(),
            ExponentVector::from_f64(&[0.0, 2009.0, 0.0], prec).unwrap(),
            ExponentVector::new(vec![
                Float::with_val(prec, 74),
                Float::with_val(prec, &e * 108u32),
                Float::with_val(prec, 1),
            ])
            .unwrap(),
        ];
        let f = Fewnomial::new(
            3,
            pts.iter()
                .zip([-1.0, -2.0, -3.0, -4.0, 5.0])
                .map(|(a, c)| (Float::with_val(prec, c), a.clone()))
                .collect(),
        )
        .unwrap();
        let r = log_condition_number(&f, &b(), None).unwrap();
        assert_eq!(r.minors.len(), 5);
        let q = LiftedMatrix::new(&pts).unwrap().matrix().to_rationals();
        let mut expected = 5.0f64.ln() + 4.0f64.ln() + 3.0 * 3f64.ln();
        for m in &r.minors {
            let sub: Vec<Vec<Rational>> = q
                .iter()
                .map(|row| m.columns.iter().map(|&j| row[j].clone()).collect())
                .collect();
            let exact = exact_determinant(&sub).abs().to_f64();
            assert!((m.value - exact).abs() <= 1e-12 * exact);
            expected += exact.max(3.0).ln();
        }
        assert!((r.log_condition - expected).abs() < 1e-9);
        assert_eq!(r.sparse_size_bits, None);
    }

    #[test]
    fn sparse_size_of_integer_input() {
        let f = Fewnomial::from_f64(1, &[(-1.0, &[0.0]), (3.0, &[1.0])]).unwrap();
        // -1: 1+1, 0: 1+0, 3: 1+2, 1: 1+1
        assert_eq!(sparse_size(&f), Some(8));
    }

    #[test]
    fn bareiss_matches_rational_elimination() {
        let rows = vec![
            vec![Integer::from(2), Integer::from(-1), Integer::from(0)],
            vec![Integer::from(0), Integer::from(0), Integer::from(3)],
            vec![Integer::from(1), Integer::from(4), Integer::from(5)],
        ];
        let q: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|v| Rational::from(v.clone())).collect())
            .collect();
        assert_eq!(Rational::from(integer_determinant(&rows)), exact_determinant(&q));
    }

    fn integer_instance() -> impl Strategy<Value = (usize, Vec<(i64, Vec<i64>)>)> {
        (1usize..=4).prop_flat_map(|n| {
            let term = (
                prop_oneof![-65536i64..=-1, 1i64..=65536],
                prop::collection::vec(-20i64..=20, n),
            );
            (Just(n), prop::collection::vec(term, n + 1..=n + 2))
        })
    }

    fn build(n: usize, terms: &[(i64, Vec<i64>)]) -> Option<Fewnomial> {
        let t: Vec<(f64, Vec<f64>)> = terms
            .iter()
            .map(|(c, a)| (*c as f64, a.iter().map(|&v| v as f64).collect()))
            .collect();
        let refs: Vec<(f64, &[f64])> = t.iter().map(|(c, a)| (*c, a.as_slice())).collect();
        Fewnomial::from_f64(n, &refs).ok()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn permutation_invariant((n, terms) in integer_instance(), seed in any::<u64>()) {
            let Some(f) = build(n, &terms) else { return Ok(()) };
            let mut order: Vec<usize> = (0..f.m()).collect();
            let k = (seed as usize) % order.len();
            order.rotate_left(k);
            order.reverse();
            let g = f.permuted(&order);
            let a = log_condition_number(&f, &b(), None).unwrap().log_condition;
            let c = log_condition_number(&g, &b(), None).unwrap().log_condition;
            prop_assert!((a - c).abs() <= 1e-9 * a.abs());
        }

        #[test]
        fn bounded_by_sparse_size((n, terms) in integer_instance()) {
            let Some(f) = build(n, &terms) else { return Ok(()) };
            let r = log_condition_number(&f, &b(), None).unwrap();
            let s = r.sparse_size_bits.unwrap() as f64;
            prop_assert!(r.log_condition <= 2.0 * n as f64 * s);
            let floor = (f.m() + r.minors.len()) as f64 * 3f64.ln();
            prop_assert!(r.log_condition >= floor - 1e-9);
        }
    }
}
