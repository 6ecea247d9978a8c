//! Positive roots of univariate trinomials and root magnitude bounds.

use std::cmp::Ordering;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;
use crate::precision::{certified_sign, CertifiedSign, Interval, PrecisionBudget};

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Float,
    /// Enclosure of the root.
    pub enclosure: Interval,
    pub multiplicity: u8,
    pub certified_relative_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootReport {
    /// Number of distinct positive roots.
    pub count: usize,
    pub roots: Vec<Root>,
    pub bits: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootShape {
    Monotone,
    OneExtremum,
}

fn sorted_terms(f: &Fewnomial) -> Result<Vec<(Float, Rational)>> {
    if f.n() != 1 {
        return Err(Error::NotInClass(format!("univariate input required, got n = {}", f.n())));
    }
    let mut t: Vec<(Float, Rational)> = f
        .terms()
        .iter()
        .map(|t| (t.coeff.clone(), t.exponent.coords()[0].to_rational().expect("finite exponent")))
        .collect();
    t.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(t)
}

/// Bounds on `ln r` for every positive root `r`: past either end one
/// extreme term outweighs the sum of all others.
pub fn log_root_bound(f: &Fewnomial, prec: u32) -> Result<(Float, Float)> {
    let t = sorted_terms(f)?;
    let m = t.len();
    if m < 2 {
        return Err(Error::InvalidInput("root bounds need at least two terms".into()));
    }
    let mm = Interval::from_i64(m as i64, prec);
    let ratio_ln = |i: usize, k: usize| -> Result<Interval> {
        let q = Interval::point(&t[i].0, prec).checked_div(&Interval::point(&t[k].0, prec)).unwrap();
        (&mm * &q.abs()).ln()
    };
    let mut hi = Float::with_val(prec, f64::NEG_INFINITY);
    for i in 0..m - 1 {
        let gap = Interval::from_rational(&Rational::from(&t[m - 1].1 - &t[i].1), prec);
        let v = ratio_ln(i, m - 1)?.checked_div(&gap).unwrap();
        hi = hi.max(v.hi());
    }
    let mut lo = Float::with_val(prec, f64::INFINITY);
    for i in 1..m {
        let gap = Interval::from_rational(&Rational::from(&t[i].1 - &t[0].1), prec);
        let v = ratio_ln(i, 0)?.checked_div(&gap).unwrap();
        lo = lo.min(&Float::with_val(prec, -v.hi()));
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    Ok((lo, hi))
}

/// `[lo, hi]` containing every positive root.
pub fn root_bound(f: &Fewnomial, budget: &PrecisionBudget) -> Result<(Float, Float)> {
    let (lo, hi) = log_root_bound(f, budget.mantissa)?;
    Ok((lo.exp(), hi.exp()))
}

/// `h(s) = c_1 + c_2 e^{d_2 s} + c_3 e^{d_3 s}`, the trinomial divided by its
/// lowest monomial in log coordinates.
struct LogTrinomial {
    c: [Float; 3],
    d: [Rational; 2],
}

impl LogTrinomial {
    fn d(&self, k: usize, prec: u32) -> Interval {
        Interval::from_rational(&self.d[k], prec)
    }

    fn c(&self, k: usize, prec: u32) -> Interval {
        Interval::point(&self.c[k], prec)
    }

    fn value(&self, s: &Interval, prec: u32) -> Interval {
        let t2 = &self.c(1, prec) * &(&self.d(0, prec) * s).exp();
        let t3 = &self.c(2, prec) * &(&self.d(1, prec) * s).exp();
        &(&self.c(0, prec) + &t2) + &t3
    }

    fn derivative(&self, s: &Interval, prec: u32) -> Interval {
        let (d2, d3) = (self.d(0, prec), self.d(1, prec));
        let t2 = &(&self.c(1, prec) * &d2) * &(&d2 * s).exp();
        let t3 = &(&self.c(2, prec) * &d3) * &(&d3 * s).exp();
        &t2 + &t3
    }

    /// `s_c` with `h'(s_c) = 0`, when `c_2 c_3 < 0`.
    fn critical(&self, prec: u32) -> Option<Interval> {
        if self.c[1].is_sign_positive() == self.c[2].is_sign_positive() {
            return None;
        }
        let num = &self.c(1, prec) * &self.d(0, prec);
        let den = &self.c(2, prec) * &self.d(1, prec);
        let q = (-num).checked_div(&den)?;
        let gap = Interval::from_rational(&Rational::from(&self.d[1] - &self.d[0]), prec);
        q.ln().ok()?.checked_div(&gap)
    }

    /// `h(s_c) = c_1 + c_2 (1 − d_2/d_3) e^{d_2 s_c}`.
    fn critical_value(&self, prec: u32) -> Option<Interval> {
        let sc = self.critical(prec)?;
        let ratio = Interval::from_rational(&Rational::from(&self.d[0] / &self.d[1]), prec);
        let one = Interval::from_i64(1, prec);
        let t = &(&self.c(1, prec) * &(&one - &ratio)) * &(&self.d(0, prec) * &sc).exp();
        Some(&self.c(0, prec) + &t)
    }
}

fn sign_at(h: &LogTrinomial, s: &Float, prec: u32) -> Option<Ordering> {
    h.value(&Interval::point(s, prec), prec).sign()
}

/// Narrows a sign-change bracket `[a, b]` of `h` (in log coordinates) to
/// width at most `eps` by safeguarded Newton steps, escalating precision
/// when the sign at a probe point is not certified.
fn refine(
    h: &LogTrinomial,
    mut a: Float,
    mut b: Float,
    sign_a: Ordering,
    eps: f64,
    budget: &PrecisionBudget,
) -> Result<(Interval, u32)> {
    let mut bits = budget.bits_for_eps(eps);
    let mut s = Float::with_val(bits, &a + &b) / 2u32;
    let mut last_width = Float::with_val(bits, &b - &a);
    for _ in 0..20_000 {
        let prec = bits + 32;
        let width = Float::with_val(prec, &b - &a);
        if width <= eps {
            return Ok((Interval::from_bounds(&a, &b, prec), bits));
        }
        // Newton proposal from the current iterate, bisection fallback.
        let si = Interval::point(&s, prec);
        let (v, d) = (h.value(&si, prec).mid(), h.derivative(&si, prec).mid());
        let mut next = if d.is_zero() { None } else { Some(Float::with_val(prec, &s - Float::with_val(prec, &v / &d))) };
        if let Some(x) = &next {
            if *x <= a || *x >= b || !x.is_finite() {
                next = None;
            }
        }
        let halving = Float::with_val(prec, &width * 2u32) > last_width;
        let probe = match next {
            Some(x) if !halving => x,
            _ => Float::with_val(prec, &a + &b) / 2u32,
        };
        last_width = width.clone();
        match sign_at(h, &probe, prec) {
            Some(Ordering::Equal) => {
                return Ok((Interval::point(&probe, prec), bits));
            }
            Some(o) if o == sign_a => a = probe.clone(),
            Some(_) => b = probe.clone(),
            None => {
                // Too close to the root to resolve: try to straddle it tightly.
                let delta = Float::with_val(prec, eps / 4.0);
                let left = Float::with_val(prec, &probe - &delta).max(&a);
                let right = Float::with_val(prec, &probe + &delta).min(&b);
                let (sl, sr) = (sign_at(h, &left, prec), sign_at(h, &right, prec));
                if sl == Some(sign_a) && sr.is_some() && sr != Some(sign_a) {
                    return Ok((Interval::from_bounds(&left, &right, prec), bits));
                }
                if bits >= budget.cap {
                    return Err(Error::PrecisionExhausted { cap: budget.cap });
                }
                bits = bits.saturating_mul(2).min(budget.cap);
            }
        }
        s = probe;
    }
    Err(Error::PrecisionExhausted { cap: budget.cap })
}

fn root_from_log(s: Interval, multiplicity: u8, bits: u32) -> Root {
    let x = s.exp();
    Root {
        value: Float::with_val(bits + 32, x.mid()),
        certified_relative_error: x.relative_radius(),
        enclosure: x,
        multiplicity,
    }
}

fn sign_of(x: &Float) -> Ordering {
    x.cmp0().unwrap_or(Ordering::Equal)
}

/// Counts and approximates the positive roots of a univariate trinomial.
///
/// After dividing by the lowest monomial the derivative is a binomial, so the
/// trinomial has at most one extremum `x_c`; the count follows from the signs
/// at `0⁺`, `x_c` and `+∞`. A value at `x_c` that cannot be separated from
/// zero at the precision cap is reported as a double root.
pub fn trinomial_roots(f: &Fewnomial, eps: f64, budget: &PrecisionBudget) -> Result<RootReport> {
    if f.m() != 3 {
        return Err(Error::NotInClass(format!("trinomial required, got {} terms", f.m())));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let t = sorted_terms(f)?;
    let h = LogTrinomial {
        c: [t[0].0.clone(), t[1].0.clone(), t[2].0.clone()],
        d: [Rational::from(&t[1].1 - &t[0].1), Rational::from(&t[2].1 - &t[0].1)],
    };
    let prec = budget.mantissa + 32;
    let (log_lo, log_hi) = log_root_bound(f, prec)?;
    let (s1, s3) = (sign_of(&h.c[0]), sign_of(&h.c[2]));
    let mut lo = log_lo - 1u32;
    let mut hi = log_hi + 1u32;
    for _ in 0..64 {
        if sign_at(&h, &lo, prec) == Some(s1) {
            break;
        }
        lo -= Float::with_val(prec, lo.abs_ref()) + 1u32;
    }
    for _ in 0..64 {
        if sign_at(&h, &hi, prec) == Some(s3) {
            break;
        }
        hi += Float::with_val(prec, hi.abs_ref()) + 1u32;
    }
    let mut roots = Vec::new();
    let mut bits = budget.mantissa;
    match h.critical(prec) {
        None => {
            if s1 != s3 {
                let (r, b) = refine(&h, lo, hi, s1, eps, budget)?;
                roots.push(root_from_log(r, 1, b));
                bits = b;
            }
        }
        Some(sc) => {
            // With c_1 and c_3 of opposite signs the extremum has the sign
            // of c_1, so the only root lies past it.
            let sc_lo = sc.lo().clone();
            let sc_hi = sc.hi().clone();
            if s1 != s3 {
                let (r, b) = refine(&h, sc_hi.max(&lo), hi, s1, eps, budget)?;
                roots.push(root_from_log(r, 1, b));
                bits = b;
            } else {
                let at = |b: u32| -> Result<crate::precision::CertifiedValue> {
                    Ok(h.critical_value(b + 32).ok_or(Error::SingularMatrix)?.to_certified())
                };
                let report = certified_sign(at(budget.mantissa)?, budget, at)?;
                bits = report.bits;
                let vsign = match report.sign {
                    CertifiedSign::Positive => Some(Ordering::Greater),
                    CertifiedSign::Negative => Some(Ordering::Less),
                    CertifiedSign::ZeroAtCap => None,
                };
                match vsign {
                    Some(v) if v == s1 => {}
                    Some(_) => {
                        // Refine each branch from a point with certified sign
                        // strictly on its side of the extremum.
                        let mut sc_mid = Float::with_val(prec, &sc_lo + &sc_hi) / 2u32;
                        let mut p = bits.max(prec);
                        while sign_at(&h, &sc_mid, p).map_or(true, |o| o == s1) {
                            p = p.saturating_mul(2);
                            if p > budget.cap * 2 {
                                return Err(Error::PrecisionExhausted { cap: budget.cap });
                            }
                            let enc = h.critical(p).ok_or(Error::SingularMatrix)?;
                            sc_mid = enc.mid();
                        }
                        let (r1, b1) = refine(&h, lo, sc_mid.clone(), s1, eps, budget)?;
                        let (r2, b2) = refine(&h, sc_mid, hi, s1.reverse(), eps, budget)?;
                        roots.push(root_from_log(r1, 1, b1));
                        roots.push(root_from_log(r2, 1, b2));
                        bits = bits.max(b1).max(b2);
                    }
                    None => {
                        let p = budget.cap + 32;
                        let sc = h.critical(p).ok_or(Error::SingularMatrix)?;
                        roots.push(root_from_log(sc, 2, budget.cap));
                    }
                }
            }
        }
    }
    Ok(RootReport {
        count: roots.len(),
        roots,
        bits,
    })
}

/// `|f(r)|` and `|r·f'(r)|` at a reported root, evaluated at `prec` bits.
pub fn root_residual(f: &Fewnomial, r: &Float, prec: u32) -> (Float, Float) {
    let mut value = Float::with_val(prec, 0);
    let mut slope = Float::with_val(prec, 0);
    let lr = Float::with_val(prec, r.ln_ref());
    for t in f.terms() {
        let a = &t.exponent.coords()[0];
        let term = Float::with_val(prec, Float::with_val(prec, a * &lr).exp() * &t.coeff);
        slope += Float::with_val(prec, &term * a);
        value += term;
    }
    (value.abs(), slope.abs())
}
