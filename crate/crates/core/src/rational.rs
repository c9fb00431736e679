//! Exact rational arithmetic helpers and the `"p/q"` string encoding used in
//! every serialized report.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Ratio = num_rational::BigRational;

pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

pub fn zero() -> Ratio {
    Ratio::zero()
}

pub fn one() -> Ratio {
    Ratio::one()
}

/// `"p/q"` in lowest terms, denominator always present.
pub fn format(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"p/q"`, `"p"` or a decimal such as `"0.05"`.
pub fn parse(s: &str) -> Result<Ratio> {
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac;
        let numer = if negative { -mag } else { mag };
        return Ok(Ratio::new(numer, scale));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Ratio::from_integer(p))
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format(r))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Ratio, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).map_err(de::Error::custom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn format_keeps_denominator() {
        assert_eq!(format(&int(3)), "3/1");
        assert_eq!(format(&ratio(4, 8)), "1/2");
    }
}
