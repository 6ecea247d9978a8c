//! Monomial changes of variables and the canonical simplex form.
//!
//! Exponents are row vectors: a map `U` sends the exponent `a` to `aU`, and
//! the point map is `(y^U)_j = ∏_i y_i^{U_{ji}}`, so that `(y^U)^a = y^{aU}`
//! and `(x^U)^V = x^{VU}`.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::{classify_with, ExponentVector, Fewnomial};
use crate::linalg::{determinant, solve, Matrix};
use crate::precision::{pow2, PrecisionBudget};

fn guard(n: usize) -> u32 {
    16 + (usize::BITS - n.saturating_sub(1).leading_zeros())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMap {
    matrix: Matrix,
}

impl MonomialMap {
    /// Fails with `SingularMap` when `|det U|` is below the zero-test
    /// threshold relative to the Hadamard bound.
    pub fn new(matrix: Matrix, budget: &PrecisionBudget) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidInput("monomial map must be square".into()));
        }
        let det = determinant(&matrix, budget).abs();
        let threshold = Float::with_val(64, matrix.hadamard_bound() * pow2(64, -(budget.mantissa as i32) + 8));
        if det <= threshold {
            return Err(Error::SingularMap);
        }
        Ok(MonomialMap { matrix })
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        MonomialMap {
            matrix: Matrix::identity(n, prec),
        }
    }

    pub fn from_f64_rows(rows: &[&[f64]], budget: &PrecisionBudget) -> Result<Self> {
        MonomialMap::new(Matrix::from_f64_rows(rows, budget.mantissa), budget)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `a ↦ aU`.
    pub fn map_exponent(&self, a: &ExponentVector, prec: u32) -> ExponentVector {
        let n = self.dim();
        let coords = (0..n)
            .map(|j| {
                let mut acc = Float::with_val(prec, 0);
                for (i, ai) in a.coords().iter().enumerate() {
                    acc += Float::with_val(prec, ai * self.matrix.get(i, j));
                }
                acc
            })
            .collect();
        ExponentVector::new(coords).expect("finite product of finite entries")
    }

    /// `ln(y^U) = U · ln y`.
    pub fn map_log_point(&self, log_y: &[Float], prec: u32) -> Vec<Float> {
        self.matrix.mul_vec(log_y, prec)
    }

    /// `y ↦ y^U` on the positive orthant.
    pub fn map_point(&self, y: &[Float], prec: u32) -> Result<Vec<Float>> {
        let logs = log_coords(y, prec)?;
        Ok(self.map_log_point(&logs, prec).into_iter().map(|v| v.exp()).collect())
    }

    /// `VU`, the map with `(x^U)^V = x^{VU}`.
    pub fn then(&self, v: &MonomialMap, prec: u32) -> MonomialMap {
        MonomialMap {
            matrix: v.matrix.mul(&self.matrix, prec),
        }
    }

    pub fn inverse(&self, budget: &PrecisionBudget) -> Result<MonomialMap> {
        let n = self.dim();
        let prec = budget.mantissa;
        let mut inv = Matrix::zeros(n, n, prec);
        for j in 0..n {
            let mut e = vec![Float::with_val(prec, 0); n];
            e[j] = Float::with_val(prec, 1);
            let col = solve(&self.matrix, &e, budget).map_err(|_| Error::SingularMap)?;
            for (i, v) in col.into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        Ok(MonomialMap { matrix: inv })
    }
}

fn log_coords(y: &[Float], prec: u32) -> Result<Vec<Float>> {
    y.iter()
        .enumerate()
        .map(|(i, v)| {
            if *v > 0 {
                Ok(Float::with_val(prec, v.ln_ref()))
            } else {
                Err(Error::NonpositiveCoordinate { index: i })
            }
        })
        .collect()
}

/// Returns `g` with `Supp(g) = Supp(f)·U` and the same coefficients, so that
/// `g(y) = f(y^U)`.
pub fn apply_monomial_map(f: &Fewnomial, u: &MonomialMap, budget: &PrecisionBudget) -> Result<Fewnomial> {
    if u.dim() != f.n() {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: f.n(),
            found: u.dim(),
        });
    }
    let u = MonomialMap::new(u.matrix.clone(), budget)?;
    let prec = budget.mantissa.max(f.prec()) + guard(f.n());
    let terms = f
        .terms()
        .iter()
        .map(|t| (t.coeff.clone(), u.map_exponent(&t.exponent, prec)))
        .collect();
    Fewnomial::new(f.n(), terms)
}

/// `f ↦ c + y_1 + ⋯ + y_ℓ − y_{ℓ+1} − ⋯ − y_n` for `f ∈ F**_{n,n+1}`.
///
/// With `A` the matrix whose rows are the non-constant exponents in
/// `permutation` order, the canonical variables are `y = x^A` scaled by
/// `|c_k|`. Nothing here inverts `A`; [`CanonicalSimplexForm::pull_back`]
/// solves one linear system when a point is needed.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalSimplexForm {
    pub c: Float,
    pub ell: usize,
    pub transform: MonomialMap,
    pub scaling: Vec<Float>,
    /// `permutation[k]` is the term index of canonical variable `k`.
    pub permutation: Vec<usize>,
    pub origin_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSummary {
    pub c: String,
    pub ell: usize,
    pub permutation: Vec<usize>,
}

impl CanonicalSimplexForm {
    pub fn n(&self) -> usize {
        self.permutation.len()
    }

    /// Value of the canonical form at `z ∈ R^n_+`.
    pub fn evaluate(&self, z: &[Float], prec: u32) -> Float {
        let mut acc = Float::with_val(prec, &self.c);
        for (k, zk) in z.iter().enumerate() {
            if k < self.ell {
                acc += zk;
            } else {
                acc -= zk;
            }
        }
        acc
    }

    /// Canonical coordinates of an original point: `z_k = |c_k|·x^{a_k}`.
    pub fn push_forward(&self, x: &[Float], prec: u32) -> Result<Vec<Float>> {
        let y = self.transform.map_point(x, prec)?;
        Ok(y.into_iter()
            .zip(&self.scaling)
            .map(|(v, s)| Float::with_val(prec, v * s))
            .collect())
    }

    /// Original point `x` with `push_forward(x) = z`.
    pub fn pull_back(&self, z: &[Float], budget: &PrecisionBudget) -> Result<Vec<Float>> {
        let prec = budget.mantissa;
        let rhs: Vec<Float> = log_coords(z, prec)?
            .into_iter()
            .zip(&self.scaling)
            .map(|(lz, s)| lz - Float::with_val(prec, s.ln_ref()))
            .collect();
        let logs = solve(self.transform.matrix(), &rhs, budget)?;
        Ok(logs.into_iter().map(|v| v.exp()).collect())
    }

    pub fn summary(&self) -> CanonicalSummary {
        CanonicalSummary {
            c: crate::format::decimal(&self.c),
            ell: self.ell,
            permutation: self.permutation.clone(),
        }
    }
}

pub fn canonicalize_simplex(f: &Fewnomial, budget: &PrecisionBudget) -> Result<CanonicalSimplexForm> {
    let n = f.n();
    if f.m() != n + 1 {
        return Err(Error::NotInClass(format!(
            "simplex form needs n+1 = {} terms, got {}",
            n + 1,
            f.m()
        )));
    }
    let class = classify_with(f, budget);
    let Some(origin) = f.origin_index() else {
        return Err(Error::NotInClass("support does not contain the origin".into()));
    };
    if !class.honest {
        return Err(Error::NotInClass(format!(
            "support has affine dimension {} < n = {}",
            class.support_dim, n
        )));
    }
    let (mut pos, mut neg): (Vec<usize>, Vec<usize>) = (0..f.m())
        .filter(|&i| i != origin)
        .partition(|&i| f.coeff(i).is_sign_positive());
    let ell = pos.len();
    pos.append(&mut neg);
    let permutation = pos;
    let prec = budget.mantissa.max(f.prec()) + guard(n);
    let rows: Vec<Vec<Float>> = permutation
        .iter()
        .map(|&i| f.exponent(i).coords().iter().map(|v| Float::with_val(prec, v)).collect())
        .collect();
    let transform = MonomialMap::new(Matrix::from_rows(rows), budget)?;
    let scaling = permutation
        .iter()
        .map(|&i| Float::with_val(prec, f.coeff(i).abs_ref()))
        .collect();
    Ok(CanonicalSimplexForm {
        c: f.coeff(origin).clone(),
        ell,
        transform,
        scaling,
        permutation,
        origin_index: origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fewnomial::evaluate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn fl(v: f64) -> Float {
        Float::with_val(256, v)
    }

    fn close(a: &Float, c: &Float, rel: f64) -> bool {
        let scale = Float::with_val(64, a.abs_ref()).max(&Float::with_val(64, 1));
        Float::with_val(256, a - c).abs() <= scale * rel
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Float> {
        (0..n).map(|_| fl(10f64.powf(rng.gen_range(-1.0..1.0)))).collect()
    }

    fn random_map(rng: &mut ChaCha8Rng, n: usize) -> MonomialMap {
        loop {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let m = Matrix::from_f64_rows(&refs, 256);
            if determinant(&m, &b()).to_f64().abs() > 0.1 {
                return MonomialMap::new(m, &b()).unwrap();
            }
        }
    }

    #[test]
    fn identity_leaves_f_unchanged() {
        let f = Fewnomial::from_f64(2, &[(1.0, &[0.0, 0.0]), (-2.0, &[1.5, 3.0])]).unwrap();
        let g = apply_monomial_map(&f, &MonomialMap::identity(2, 256), &b()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn row_convention_example() {
        let f = Fewnomial::from_f64(2, &[(1.0, &[1.0, 1.0])]).unwrap();
        let u = MonomialMap::from_f64_rows(&[&[1.0, 0.0], &[1.0, 1.0]], &b()).unwrap();
        let g = apply_monomial_map(&f, &u, &b()).unwrap();
        assert_eq!(g.exponent(0).to_f64(), vec![2.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let y = random_point(&mut rng, 2);
            let gy = evaluate(&g, &y, &b()).unwrap();
            let fx = evaluate(&f, &u.map_point(&y, 256).unwrap(), &b()).unwrap();
            assert!(close(&gy, &fx, 1e-60));
        }
    }

    #[test]
    fn singular_map_rejected() {
        let u = MonomialMap::from_f64_rows(&[&[1.0, 2.0], &[2.0, 4.0]], &b());
        assert_eq!(u.unwrap_err(), Error::SingularMap);
    }

    #[test]
    fn formal_identity_under_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..=4);
            let (u, v) = (random_map(&mut rng, n), random_map(&mut rng, n));
            let (x, y) = (random_point(&mut rng, n), random_point(&mut rng, n));
            let xy: Vec<Float> = x.iter().zip(&y).map(|(a, c)| Float::with_val(256, a * c)).collect();
            let lhs = u.then(&v, 256).map_point(&xy, 256).unwrap();
            let xu_v = v.map_point(&u.map_point(&x, 256).unwrap(), 256).unwrap();
            let yu_v = v.map_point(&u.map_point(&y, 256).unwrap(), 256).unwrap();
            for k in 0..n {
                let rhs = Float::with_val(256, &xu_v[k] * &yu_v[k]);
                assert!(close(&lhs[k], &rhs, 1e-60));
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let f = Fewnomial::from_f64(2, &[(5.0, &[0.0, 0.0]), (-2.0, &[1.0, 0.0]), (-3.0, &[0.0, 1.0])]).unwrap();
        let c = canonicalize_simplex(&f, &b()).unwrap();
        assert_eq!((c.c.to_f64(), c.ell), (5.0, 0));

        let s2 = 2f64.sqrt();
        let f = Fewnomial::from_f64(2, &[(-1.0, &[0.0, 0.0]), (7.0, &[s2, 1.0]), (-1.0, &[0.0, 3.5])]).unwrap();
        let c = canonicalize_simplex(&f, &b()).unwrap();
        assert_eq!((c.c.to_f64(), c.ell), (-1.0, 1));
        assert_eq!(c.permutation, vec![1, 2]);

        let f = Fewnomial::from_f64(3, &[(2.0, &[0.0; 3]), (1.0, &[1.0, 0.0, 0.0]), (1.0, &[0.0, 1.0, 0.0]), (1.0, &[0.0, 0.0, 1.0])]).unwrap();
        assert_eq!(canonicalize_simplex(&f, &b()).unwrap().ell, 3);
    }

    #[test]
    fn canonical_rejects_outside_class() {
        let f = Fewnomial::from_f64(2, &[(1.0, &[1.0, 0.0]), (-2.0, &[0.0, 1.0]), (1.0, &[1.0, 1.0])]).unwrap();
        assert!(matches!(canonicalize_simplex(&f, &b()), Err(Error::NotInClass(_))));
        let f = Fewnomial::from_f64(2, &[(1.0, &[0.0, 0.0]), (-2.0, &[1.0, 1.0]), (1.0, &[2.0, 2.0])]).unwrap();
        assert!(matches!(canonicalize_simplex(&f, &b()), Err(Error::NotInClass(_))));
    }

    #[test]
    fn image_equality_at_pulled_back_points() {
        let s2 = 2f64.sqrt();
        let f = Fewnomial::from_f64(2, &[(-1.0, &[0.0, 0.0]), (7.0, &[s2, 1.0]), (-1.0, &[0.0, 3.5])]).unwrap();
        let c = canonicalize_simplex(&f, &b()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let z = random_point(&mut rng, 2);
            let x = c.pull_back(&z, &b()).unwrap();
            let fx = evaluate(&f, &x, &b()).unwrap();
            assert!(close(&fx, &c.evaluate(&z, 256), 1e-50));
            let z2 = c.push_forward(&x, 256).unwrap();
            for k in 0..2 {
                assert!(close(&z[k], &z2[k], 1e-50));
            }
        }
    }

    #[test]
    fn grid_suprema_agree_under_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let f = Fewnomial::from_f64(
                2,
                &[(rng.gen_range(-5.0..5.0), &[0.0, 0.0]), (-1.0, &[1.0, 0.0]), (-1.0, &[0.0, 1.0]), (1.5, &[0.5, 0.25])],
            )
            .unwrap();
            let u = random_map(&mut rng, 2);
            let g = apply_monomial_map(&f, &u, &b()).unwrap();
            // Grid for g is the preimage of a grid for f, so sampled values coincide.
            let uinv = u.inverse(&b()).unwrap();
            let mut best_f = f64::NEG_INFINITY;
            let mut best_g = f64::NEG_INFINITY;
            for i in 0..15 {
                for j in 0..15 {
                    let x = [fl(10f64.powf(-2.0 + i as f64 * 0.3)), fl(10f64.powf(-2.0 + j as f64 * 0.3))];
                    best_f = best_f.max(evaluate(&f, &x, &b()).unwrap().to_f64());
                    let y = uinv.map_point(&x, 256).unwrap();
                    best_g = best_g.max(evaluate(&g, &y, &b()).unwrap().to_f64());
                }
            }
            assert!((best_f - best_g).abs() <= 1e-9 * best_f.abs().max(1.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn inverse_round_trip(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_map(&mut rng, n);
            let terms: Vec<(f64, Vec<f64>)> = (0..n + 1)
                .map(|k| (1.0 + k as f64, (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()))
                .collect();
            let refs: Vec<(f64, &[f64])> = terms.iter().map(|(c, a)| (*c, a.as_slice())).collect();
            let f = Fewnomial::from_f64(n, &refs).unwrap();
            let g = apply_monomial_map(&f, &u, &b()).unwrap();
            let h = apply_monomial_map(&g, &u.inverse(&b()).unwrap(), &b()).unwrap();
            let tol = b().half_tolerance();
            for (s, t) in f.terms().iter().zip(h.terms()) {
                for (x, y) in s.exponent.coords().iter().zip(t.exponent.coords()) {
                    let scale = Float::with_val(64, x.abs_ref()).max(&Float::with_val(64, 1));
                    prop_assert!(Float::with_val(256, x - y).abs() <= scale * &tol);
                }
            }
        }

        #[test]
        fn canonical_invariant_under_maps(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut terms: Vec<(f64, Vec<f64>)> = vec![(rng.gen_range(-5.0..5.0), vec![0.0; n])];
            for k in 0..n {
                let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                a[k] += 3.0;
                let c = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..5.0);
                terms.push((c, a));
            }
            let refs: Vec<(f64, &[f64])> = terms.iter().map(|(c, a)| (*c, a.as_slice())).collect();
            let f = Fewnomial::from_f64(n, &refs).unwrap();
            let g = apply_monomial_map(&f, &random_map(&mut rng, n), &b()).unwrap();
            let (cf, cg) = (canonicalize_simplex(&f, &b()).unwrap(), canonicalize_simplex(&g, &b()).unwrap());
            prop_assert_eq!(cf.c, cg.c);
            prop_assert_eq!(cf.ell, cg.ell);
        }
    }
}
