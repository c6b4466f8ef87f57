//! Small registry of named scalar profiles, used for λ(s) and for Frenet
//! curvature/torsion inputs where no expression parser is available.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve::{scalar_fn, ScalarFn};
use crate::error::Error;

/// A scalar function of the curve parameter.
///
/// Textual forms: a number (`"2"`), `"2+sin"`, `"affine:a,b"` for `a + b s`,
/// `"sin:a,b,c"` for `a + b sin(c s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Constant(f64),
    TwoPlusSin,
    Affine { a: f64, b: f64 },
    Sine { a: f64, b: f64, c: f64 },
}

impl Profile {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::TwoPlusSin => 2.0 + s.sin(),
            Profile::Affine { a, b } => a + b * s,
            Profile::Sine { a, b, c } => a + b * (c * s).sin(),
        }
    }

    pub fn to_fn(&self) -> ScalarFn {
        let p = *self;
        scalar_fn(move |s| p.eval(s))
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Profile::Constant(_) => true,
            Profile::TwoPlusSin => false,
            Profile::Affine { b, .. } => b == 0.0,
            Profile::Sine { b, c, .. } => b == 0.0 || c == 0.0,
        }
    }
}

fn numbers(body: &str, n: usize, text: &str) -> Result<Vec<f64>, Error> {
    let xs: Vec<f64> = body
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::BadInput(format!("bad profile parameters in {text:?}")))?;
    if xs.len() != n || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadInput(format!(
            "profile {text:?} needs {n} finite parameters"
        )));
    }
    Ok(xs)
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let t = text.trim();
        if let Ok(c) = t.parse::<f64>() {
            if !c.is_finite() {
                return Err(Error::BadInput(format!("non-finite profile {text:?}")));
            }
            return Ok(Profile::Constant(c));
        }
        if t == "2+sin" {
            return Ok(Profile::TwoPlusSin);
        }
        if let Some(body) = t.strip_prefix("affine:") {
            let x = numbers(body, 2, text)?;
            return Ok(Profile::Affine { a: x[0], b: x[1] });
        }
        if let Some(body) = t.strip_prefix("sin:") {
            let x = numbers(body, 3, text)?;
            return Ok(Profile::Sine {
                a: x[0],
                b: x[1],
                c: x[2],
            });
        }
        Err(Error::BadInput(format!("unknown profile {text:?}")))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "{c}"),
            Profile::TwoPlusSin => write!(f, "2+sin"),
            Profile::Affine { a, b } => write!(f, "affine:{a},{b}"),
            Profile::Sine { a, b, c } => write!(f, "sin:{a},{b},{c}"),
        }
    }
}

// JSON accepts either a bare number or the textual form.
impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(c) => Ok(Profile::Constant(c)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Profile::Constant(c) => s.serialize_f64(*c),
            other => s.serialize_str(&other.to_string()),
        }
    }
}
