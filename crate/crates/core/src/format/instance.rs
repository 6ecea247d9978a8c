//! JSON instance files: `{"n": 2, "terms": [{"coeff": "3", "exponents": ["1", "sqrt(2)"]}]}`.

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::decimal;
use super::expr::{parse_expr, parse_rational, parse_scalar};
use crate::error::{Error, Result};
use crate::fewnomial::{ExponentVector, Fewnomial};
use crate::harness::SparsePoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub coeff: String,
    pub exponents: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub terms: Vec<TermEntry>,
}

fn located(e: Error, term: usize, field: &str) -> Error {
    match e {
        Error::ParseError { position, message } => Error::ParseError {
            position,
            message: format!("term {term}, {field}: {message}"),
        },
        other => other,
    }
}

impl InstanceFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("malformed instance JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Scalars as shortest round-trip decimals at each value's precision.
    pub fn from_fewnomial(f: &Fewnomial) -> Self {
        InstanceFile {
            n: f.n(),
            terms: f
                .terms()
                .iter()
                .map(|t| TermEntry {
                    coeff: decimal(&t.coeff),
                    exponents: t.exponent.coords().iter().map(decimal).collect(),
                })
                .collect(),
        }
    }

    fn check_arity(&self) -> Result<()> {
        for (index, t) in self.terms.iter().enumerate() {
            if t.exponents.len() != self.n {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: self.n,
                    found: t.exponents.len(),
                });
            }
        }
        Ok(())
    }

    /// Evaluates every scalar at `prec` bits.
    pub fn to_fewnomial(&self, prec: u32) -> Result<Fewnomial> {
        self.check_arity()?;
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let c = parse_scalar(&t.coeff, prec).map_err(|e| located(e, i, "coeff"))?;
                let a = t
                    .exponents
                    .iter()
                    .map(|s| parse_scalar(s, prec).map_err(|e| located(e, i, "exponents")))
                    .collect::<Result<Vec<Float>>>()?;
                Ok((c, ExponentVector::new(a)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Fewnomial::new(self.n, terms)
    }

    /// Polynomial reading: rational coefficients, nonnegative integer exponents.
    pub fn to_sparse_poly(&self) -> Result<SparsePoly> {
        self.check_arity()?;
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let c = parse_rational(&t.coeff).map_err(|e| located(e, i, "coeff"))?;
                let e = t
                    .exponents
                    .iter()
                    .map(|s| {
                        let q = parse_expr(s)
                            .map_err(|e| located(e, i, "exponents"))?
                            .to_rational()
                            .filter(|q| *q.denom() == 1 && *q >= 0)
                            .ok_or_else(|| Error::InvalidInput(format!("term {i}: exponent '{s}' is not a nonnegative integer")))?;
                        q.numer()
                            .to_u32()
                            .ok_or_else(|| Error::InvalidInput(format!("term {i}: exponent '{s}' is too large")))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                Ok((c, e))
            })
            .collect::<Result<Vec<(Rational, Vec<u32>)>>>()?;
        SparsePoly::from_terms(self.n, terms)
    }

    pub fn from_sparse_poly(p: &SparsePoly) -> Self {
        InstanceFile {
            n: p.nvars(),
            terms: p
                .terms()
                .map(|(e, c)| TermEntry {
                    coeff: c.to_string(),
                    exponents: e.iter().map(|k| k.to_string()).collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_instance(json: &str, prec: u32) -> Result<Fewnomial> {
    InstanceFile::from_json(json)?.to_fewnomial(prec)
}

pub fn parse_quartic(json: &str) -> Result<SparsePoly> {
    InstanceFile::from_json(json)?.to_sparse_poly()
}

pub fn serialize_instance(f: &Fewnomial) -> String {
    InstanceFile::from_fewnomial(f).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PARABOLA: &str = r#"{"n": 1, "terms": [
        {"coeff": "-1", "exponents": ["0"]},
        {"coeff": "3", "exponents": ["1"]},
        {"coeff": "-1", "exponents": ["2"]}]}"#;

    #[test]
    fn parses_parabola() {
        let f = parse_instance(PARABOLA, 256).unwrap();
        assert_eq!(f.m(), 3);
        assert_eq!(f.evaluate_f64(&[1.5]), 1.25);
    }

    #[test]
    fn irrational_data_round_trips() {
        let src = r#"{"n": 2, "terms": [
            {"coeff": "1", "exponents": ["0", "0"]},
            {"coeff": "-sqrt(363)", "exponents": ["108*e", "pi/3"]},
            {"coeff": "0.1", "exponents": ["1", "2"]}]}"#;
        for prec in [64, 256, 1000] {
            let f = parse_instance(src, prec).unwrap();
            let g = parse_instance(&serialize_instance(&f), prec).unwrap();
            assert_eq!(f, g);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_instance("{", 256), Err(Error::InvalidInput(_))));
        assert!(matches!(
            parse_instance(r#"{"n": 2, "terms": [{"coeff": "1", "exponents": ["0"]}]}"#, 256),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_instance(r#"{"n": 1, "terms": [{"coeff": "1 +", "exponents": ["0"]}]}"#, 256),
            Err(Error::ParseError { position: 3, .. })
        ));
        assert!(matches!(
            parse_instance(r#"{"n": 1, "terms": [{"coeff": "0", "exponents": ["0"]}]}"#, 256),
            Err(Error::ZeroCoefficient { index: 0 })
        ));
        assert!(matches!(
            parse_instance(r#"{"n": 1, "terms": [{"coeff": "1", "exponents": ["0"], "x": 1}]}"#, 256),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn quartic_files() {
        let src = r#"{"n": 2, "terms": [
            {"coeff": "1/2", "exponents": ["4", "0"]},
            {"coeff": "-3", "exponents": ["1", "1"]},
            {"coeff": "-3", "exponents": ["1", "1"]}]}"#;
        let p = parse_quartic(src).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.degree(), 4);
        let back = parse_quartic(&InstanceFile::from_sparse_poly(&p).to_json()).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"n": 1, "terms": [{"coeff": "1", "exponents": ["1/2"]}]}"#;
        assert!(matches!(parse_quartic(bad), Err(Error::InvalidInput(_))));
        let irr = r#"{"n": 1, "terms": [{"coeff": "e", "exponents": ["1"]}]}"#;
        assert!(matches!(parse_quartic(irr), Err(Error::ParseError { .. })));
    }

    proptest! {
        #[test]
        fn f64_instances_round_trip(
            c in prop::collection::vec(prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6], 1..5),
            e in prop::collection::vec(-50.0f64..50.0, 5),
        ) {
            let pts: Vec<Vec<f64>> = (0..c.len()).map(|i| vec![e[i], i as f64]).collect();
            let terms: Vec<(f64, &[f64])> = c.iter().zip(&pts).map(|(c, p)| (*c, p.as_slice())).collect();
            let f = Fewnomial::from_f64(2, &terms).unwrap();
            prop_assert_eq!(parse_instance(&serialize_instance(&f), 256).unwrap(), f);
        }
    }
}
