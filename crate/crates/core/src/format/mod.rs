//! Decimal rendering, the scalar expression grammar and JSON instance files.

use rug::Float;

pub mod expr;
pub mod instance;

pub use expr::{parse_expr, parse_rational, parse_scalar, Expr};
pub use instance::{parse_instance, parse_quartic, serialize_instance, InstanceFile, TermEntry};

/// Shortest decimal string that reads back to exactly `x` at `x.prec()` bits.
pub fn decimal(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x.is_sign_positive() { "inf".into() } else { "-inf".into() };
    }
    let s = x.to_string_radix(10, None);
    let (mantissa, exp) = match s.find('e') {
        Some(k) => (&s[..k], s[k + 1..].parse::<i64>().unwrap_or(0)),
        None => (s.as_str(), 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let mut all: String = format!("{int_part}{frac_part}");
    let mut point = int_part.len() as i64 + exp;
    let lead = all.len() - all.trim_start_matches('0').len();
    all.drain(..lead);
    point -= lead as i64;
    let all = all.trim_end_matches('0');
    let len = all.len() as i64;
    let body = if (-6..=40).contains(&point) {
        if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), all)
        } else if point >= len {
            format!("{}{}", all, "0".repeat((point - len) as usize))
        } else {
            format!("{}.{}", &all[..point as usize], &all[point as usize..])
        }
    } else {
        let rest = if len > 1 { format!(".{}", &all[1..]) } else { String::new() };
        format!("{}{}e{}", &all[..1], rest, point - 1)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}
