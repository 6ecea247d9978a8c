//! Seeded instance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::discriminant::{classify_circuit, CircuitKind};
use crate::error::{Error, Result};
use crate::fewnomial::{classify_with, ExponentVector, Fewnomial};
use crate::precision::PrecisionBudget;
use crate::supremum::{circuit_case, Case};

const ATTEMPTS: usize = 20_000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiple of 1/16 in `[−5, 5]`.
fn quantized_coord(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(-80i32..=80) as f64 / 16.0
}

/// Nonzero multiple of 1/64 with magnitude in `[0.5, 10]`.
fn magnitude(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(32i32..=640) as f64 / 64.0
}

fn signed(r: &mut ChaCha8Rng) -> f64 {
    let m = magnitude(r);
    if r.gen_bool(0.5) { m } else { -m }
}

fn random_point(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| quantized_coord(r)).collect();
        if p.iter().any(|&x| x != 0.0) {
            return p;
        }
    }
}

fn build(n: usize, points: &[Vec<f64>], coeffs: &[f64]) -> Result<Fewnomial> {
    let terms: Vec<(f64, &[f64])> = coeffs.iter().zip(points).map(|(c, p)| (*c, p.as_slice())).collect();
    Fewnomial::from_f64(n, &terms)
}

/// Origin plus `n+1` points; with `n ≥ 2` a quarter of the supports are
/// degenerate, the last point being a dyadic combination of earlier ones.
fn circuit_support(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; n]];
    for _ in 0..=n {
        pts.push(random_point(r, n));
    }
    if n >= 2 && r.gen_bool(0.25) {
        let i = r.gen_range(0..=n);
        let mut j = r.gen_range(0..=n);
        while j == i {
            j = r.gen_range(0..=n);
        }
        pts[n + 1] = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a + b) / 2.0).collect();
    }
    pts
}

/// Honest `F**_{n,n+2}` instance; with a target, rejection-samples until the
/// supremum classifier lands in that case.
///
/// Degenerate circuits need `n ≥ 2`, so `Condition2` fails immediately for
/// `n = 1`.
pub fn random_circuit_instance(n: usize, seed: u64, case_target: Option<Case>) -> Result<Fewnomial> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if let Some(t) = case_target {
        if matches!(t, Case::Simplex | Case::Tetranomial) || (n == 1 && t == Case::Condition2) {
            return Err(Error::ExhaustedAttempts { attempts: 0 });
        }
    }
    let budget = PrecisionBudget::default();
    let mut r = rng(seed);
    for _ in 0..ATTEMPTS {
        let pts = circuit_support(&mut r, n);
        let Ok(f0) = build(n, &pts, &vec![1.0; n + 2]) else { continue };
        if !classify_with(&f0, &budget).honest {
            continue;
        }
        let Ok(data) = classify_circuit(&f0.support(), &budget) else { continue };
        if data.kind == CircuitKind::NotCircuit {
            continue;
        }
        let interior = data.interior_index;
        let mut c: Vec<f64> = (0..n + 2).map(|_| signed(&mut r)).collect();
        match case_target {
            Some(Case::Condition1) => {
                let vertices: Vec<usize> = (1..n + 2).filter(|&i| Some(i) != interior).collect();
                let v = vertices[r.gen_range(0..vertices.len())];
                c[v] = c[v].abs();
            }
            Some(t) => {
                for (i, ci) in c.iter_mut().enumerate().skip(1) {
                    if Some(i) != interior {
                        *ci = -ci.abs();
                    }
                }
                if let Some(p) = interior {
                    if matches!(t, Case::Condition2 | Case::Condition3) {
                        c[p] = c[p].abs();
                    }
                }
            }
            None => {}
        }
        let Ok(f) = build(n, &pts, &c) else { continue };
        match circuit_case(&f, &budget) {
            Ok(case) if case_target.map_or(true, |t| t == case) => return Ok(f),
            _ => continue,
        }
    }
    Err(Error::ExhaustedAttempts { attempts: ATTEMPTS })
}

/// Honest `F**_{n,n+1}` instance with random signs.
pub fn random_simplex_instance(n: usize, seed: u64) -> Result<Fewnomial> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let budget = PrecisionBudget::default();
    let mut r = rng(seed);
    for _ in 0..ATTEMPTS {
        let mut pts = vec![vec![0.0; n]];
        for _ in 0..n {
            pts.push(random_point(&mut r, n));
        }
        let c: Vec<f64> = (0..=n).map(|_| signed(&mut r)).collect();
        let Ok(f) = build(n, &pts, &c) else { continue };
        if classify_with(&f, &budget).honest {
            return Ok(f);
        }
    }
    Err(Error::ExhaustedAttempts { attempts: ATTEMPTS })
}

fn distinct(v: &[f64], min_gap: f64) -> bool {
    v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (a - b).abs() >= min_gap))
}

/// Univariate trinomial with real exponents in `[−10, 10]` and coefficient
/// magnitudes in `[0.1, 10]`.
pub fn random_trinomial(seed: u64) -> Fewnomial {
    let mut r = rng(seed);
    loop {
        let e: Vec<f64> = (0..3).map(|_| r.gen_range(-10.0..10.0)).collect();
        if !distinct(&e, 0.05) {
            continue;
        }
        let c: Vec<f64> = (0..3)
            .map(|_| {
                let m: f64 = r.gen_range(0.1..10.0);
                if r.gen_bool(0.5) { m } else { -m }
            })
            .collect();
        return build(1, &e.iter().map(|x| vec![*x]).collect::<Vec<_>>(), &c).expect("distinct exponents");
    }
}

/// `F**_{1,4}` instance: a constant plus three real exponents in `[−4, 4]`.
pub fn random_tetranomial(seed: u64) -> Fewnomial {
    let mut r = rng(seed);
    loop {
        let mut e = vec![0.0];
        e.extend((0..3).map(|_| r.gen_range(-4.0..4.0)));
        if !distinct(&e, 0.1) {
            continue;
        }
        let c: Vec<f64> = (0..4).map(|_| signed(&mut r)).collect();
        return build(1, &e.iter().map(|x| vec![*x]).collect::<Vec<_>>(), &c).expect("distinct exponents");
    }
}

/// `−1 + kx − x²`, with supremum `k²/4 − 1`.
pub fn parabola(k: f64) -> Result<Fewnomial> {
    Fewnomial::from_f64(1, &[(-1.0, &[0.0]), (k, &[1.0]), (-1.0, &[2.0])])
}

/// `(x^a − t)² = t² − 2t·x^a + x^{2a}`, with a double root at `t^{1/a}`.
pub fn double_root_instance(a: f64, t: f64, prec: u32) -> Result<Fewnomial> {
    let t = Float::with_val(prec, t);
    let a = Float::with_val(prec, a);
    let terms = vec![
        (Float::with_val(prec, t.square_ref()), ExponentVector::zeros(1, prec)),
        (Float::with_val(prec, &t * -2i32), ExponentVector::new(vec![a.clone()])?),
        (Float::with_val(prec, 1), ExponentVector::new(vec![Float::with_val(prec, &a * 2u32)])?),
    ];
    Fewnomial::new(1, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_circuit_instance(2, 9, None).unwrap(), random_circuit_instance(2, 9, None).unwrap());
        assert_eq!(random_simplex_instance(4, 3).unwrap(), random_simplex_instance(4, 3).unwrap());
        assert_eq!(random_trinomial(1), random_trinomial(1));
        assert_ne!(random_tetranomial(1), random_tetranomial(2));
    }

    #[test]
    fn targets_are_met() {
        let b = PrecisionBudget::default();
        for (n, t) in [
            (1, Case::Condition3),
            (1, Case::Condition1),
            (2, Case::Condition1),
            (2, Case::Condition2),
            (3, Case::Condition2),
            (2, Case::Condition3),
            (3, Case::Fallthrough),
        ] {
            for seed in 0..3 {
                let f = random_circuit_instance(n, seed, Some(t)).unwrap();
                assert_eq!(circuit_case(&f, &b).unwrap(), t);
                assert_eq!(f.m(), n + 2);
                assert!(classify_with(&f, &b).honest);
            }
        }
        assert!(matches!(
            random_circuit_instance(1, 0, Some(Case::Condition2)),
            Err(Error::ExhaustedAttempts { .. })
        ));
    }

    #[test]
    fn any_instance_is_valid() {
        let b = PrecisionBudget::default();
        for seed in 0..10 {
            let f = random_circuit_instance(3, seed, None).unwrap();
            assert!(circuit_case(&f, &b).is_ok());
        }
    }

    #[test]
    fn families() {
        let p = parabola(3.0).unwrap();
        assert_eq!(p.evaluate_f64(&[1.5]), 1.25);
        let d = double_root_instance(2.0, 3.0, 256).unwrap();
        assert!(d.evaluate_f64(&[3f64.sqrt()]).abs() < 1e-12);
    }
}
