//! Exact rational scalars and the `"p/q"` string encoding used in configs and reports.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KzError, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"-0.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || KzError::schema("", format!("not a rational: {s:?}"));
    if let Some((p, d)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(KzError::schema("", format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(p, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.trim_start().starts_with('-');
        let ip_abs = ip.trim().trim_start_matches(['-', '+']);
        let ip_val: BigInt = if ip_abs.is_empty() {
            BigInt::zero()
        } else {
            ip_abs.parse().map_err(|_| bad())?
        };
        let fp_val: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), fp.len());
        let mag = Q::new(ip_val * &scale + fp_val, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(p))
}

/// Canonical string form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Embedding of exact rationals into the numeric scalar fields.
pub trait FromQ {
    fn from_q(x: &Q) -> Self;
}

impl FromQ for Q {
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
}

impl FromQ for f64 {
    fn from_q(x: &Q) -> Self {
        q_to_f64(x)
    }
}

impl FromQ for Complex64 {
    fn from_q(x: &Q) -> Self {
        Complex64::new(q_to_f64(x), 0.0)
    }
}

/// Magnitude used in residual reports.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for Q {
    fn magnitude(&self) -> f64 {
        q_to_f64(&self.abs())
    }
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

pub mod serde_q {
    //! Serde adapters that keep rationals as `"p/q"` strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_q(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
