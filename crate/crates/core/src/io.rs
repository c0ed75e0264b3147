//! JSON formats for fans, divisors and foliated pairs.
//!
//! Rationals are written as strings `"p/q"` (or `"k"`); integers are also
//! accepted on input.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::divisor::TorusDivisor;
use crate::fan::Fan;
use crate::foliation::{FoliatedPair, FoliationSubspace};
use crate::lattice::RatVector;
use crate::{Error, Rat, Result};

/// Parses `"p/q"`, `"k"` or `"-p/q"`.
pub fn parse_rat(s: &str) -> std::result::Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(num, den))
}

pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Int(i64),
    Str(String),
}

impl RatRepr {
    fn into_rat(self) -> std::result::Result<Rat, String> {
        match self {
            RatRepr::Int(k) => Ok(Rat::from_integer(k.into())),
            RatRepr::Str(s) => parse_rat(&s),
        }
    }
}

/// Serde helper for a single rational.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        RatRepr::deserialize(d)?.into_rat().map_err(serde::de::Error::custom)
    }
}

/// Serde helper for a list of rationals.
pub mod rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        Vec::<RatRepr>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_rat().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde helper writing big integers as JSON numbers when they fit.
pub mod big_vec {
    use super::*;

    fn value(x: &BigInt) -> Value {
        match i64::try_from(x) {
            Ok(k) => Value::from(k),
            Err(_) => Value::from(x.to_string()),
        }
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(value))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &Option<Vec<BigInt>>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.collect_seq(v.iter().map(value)),
                None => s.serialize_none(),
            }
        }
    }
}

/// `{"dim": n, "rays": [[..]], "cones": [[..]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

/// `{"coeffs": ["p/q", ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorFile {
    #[serde(with = "rat_vec")]
    pub coeffs: Vec<Rat>,
}

/// `{"subspace": [["p/q", ..], ..], "delta": {"i": "p/q"}}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    #[serde(deserialize_with = "rat_rows")]
    pub subspace: Vec<Vec<Rat>>,
    #[serde(default, deserialize_with = "delta_map")]
    pub delta: BTreeMap<String, Rat>,
}

fn rat_rows<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rat>>, D::Error> {
    Vec::<Vec<RatRepr>>::deserialize(d)?
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|r| r.into_rat().map_err(serde::de::Error::custom))
                .collect()
        })
        .collect()
}

fn delta_map<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, Rat>, D::Error> {
    BTreeMap::<String, RatRepr>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| Ok((k, v.into_rat().map_err(serde::de::Error::custom)?)))
        .collect()
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: match e.path().to_string() {
            p if p == "." => "$".into(),
            p => p,
        },
        message: e.inner().to_string(),
    })
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

pub fn parse_fan(text: &str) -> Result<Fan> {
    let f: FanFile = from_json(text)?;
    for (i, r) in f.rays.iter().enumerate() {
        if r.len() != f.dim {
            return Err(parse_err(
                format!("rays[{i}]"),
                format!("expected {} coordinates, found {}", f.dim, r.len()),
            ));
        }
    }
    Fan::new(f.dim, f.rays.into_iter().map(crate::IntVector).collect(), f.cones)
}

pub fn fan_file(fan: &Fan) -> FanFile {
    FanFile {
        dim: fan.dim(),
        rays: fan.rays().iter().map(|r| r.0.clone()).collect(),
        cones: fan.cones().to_vec(),
    }
}

pub fn fan_to_json(fan: &Fan) -> Value {
    serde_json::to_value(fan_file(fan)).expect("fan serializes")
}

pub fn parse_divisor(text: &str, num_rays: usize) -> Result<TorusDivisor> {
    let d: DivisorFile = from_json(text)?;
    if d.coeffs.len() != num_rays {
        return Err(parse_err(
            "coeffs",
            format!("expected {num_rays} coefficients, found {}", d.coeffs.len()),
        ));
    }
    Ok(TorusDivisor::new(d.coeffs))
}

pub fn divisor_to_json(d: &TorusDivisor) -> Value {
    json!({ "coeffs": d.coeffs.iter().map(format_rat).collect::<Vec<_>>() })
}

/// Reads a pair on `fan`; boundary keys are ray indices.
pub fn parse_pair(text: &str, fan: &Fan) -> Result<FoliatedPair> {
    let p: PairFile = from_json(text)?;
    let n = fan.dim();
    for (i, row) in p.subspace.iter().enumerate() {
        if row.len() != n {
            return Err(parse_err(
                format!("subspace[{i}]"),
                format!("expected {n} coordinates, found {}", row.len()),
            ));
        }
    }
    let mut delta = TorusDivisor::zero(fan.num_rays());
    for (k, v) in p.delta {
        let i: usize = k
            .parse()
            .map_err(|_| parse_err(format!("delta.{k}"), "key must be a ray index"))?;
        if i >= fan.num_rays() {
            return Err(parse_err(
                format!("delta.{k}"),
                format!("ray index out of range (fan has {} rays)", fan.num_rays()),
            ));
        }
        delta.coeffs[i] = v;
    }
    let v = FoliationSubspace::new(p.subspace.into_iter().map(RatVector).collect(), n)?;
    FoliatedPair::new(fan.clone(), v, delta)
}

pub fn pair_to_json(pair: &FoliatedPair) -> Value {
    let delta: BTreeMap<String, String> = pair
        .delta()
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i.to_string(), format_rat(c)))
        .collect();
    json!({
        "subspace": pair
            .subspace()
            .basis()
            .iter()
            .map(|b| b.0.iter().map(format_rat).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "delta": delta,
    })
}
