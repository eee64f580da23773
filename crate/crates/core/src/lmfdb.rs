//! Parsing LMFDB elliptic-curve records into local curve files.
//!
//! Only parsing lives here; the HTTP request is made by the command-line
//! front end.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::Rational;
use crate::curve::{Curve, CurvePoint};
use crate::error::{Error, Result};

const API_BASE: &str = "https://www.lmfdb.org/api/ec_curvedata/";

/// A curve with the rank and generators the database publishes. The same
/// file is accepted as a curve file and as a Γ description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(flatten)]
    pub curve: Curve,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default)]
    pub generators: Vec<CurvePoint>,
}

/// Accepts labels of the form `5077.a1` or `11.a`.
pub fn validate_label(label: &str) -> Result<()> {
    let bad = || Error::UnknownLabel(label.to_string());
    let (conductor, rest) = label.split_once('.').ok_or_else(bad)?;
    let letters = rest.trim_end_matches(|c: char| c.is_ascii_digit());
    let ok = !conductor.is_empty()
        && conductor.bytes().all(|b| b.is_ascii_digit())
        && !letters.is_empty()
        && letters.bytes().all(|b| b.is_ascii_lowercase());
    if ok {
        Ok(())
    } else {
        Err(bad())
    }
}

pub fn api_url(label: &str) -> Result<String> {
    validate_label(label)?;
    Ok(format!("{API_BASE}?lmfdb_label={label}&_format=json"))
}

fn schema(msg: impl Into<String>) -> Error {
    Error::SchemaMismatch(msg.into())
}

fn rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Rational::from)
            .or_else(|| n.to_string().parse().ok())
            .ok_or_else(|| schema(format!("not an integer: {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| schema(format!("not a rational: {s:?}"))),
        other => Err(schema(format!("expected a number, found {other}"))),
    }
}

/// Generators appear as projective triples `[X, Y, Z]` or affine pairs.
fn generator(v: &Value) -> Result<CurvePoint> {
    let parts = v
        .as_array()
        .ok_or_else(|| schema("generator is not a list"))?;
    let coords: Vec<Rational> = parts.iter().map(rational).collect::<Result<_>>()?;
    match coords.as_slice() {
        [x, y] => Ok(CurvePoint::Affine {
            x: x.clone(),
            y: y.clone(),
        }),
        [_, _, z] if z.is_zero() => Ok(CurvePoint::Identity),
        [x, y, z] => Ok(CurvePoint::Affine { x: x / z, y: y / z }),
        _ => Err(schema("generator must have 2 or 3 coordinates")),
    }
}

/// Parses an API response `{"data": [{"ainvs": [...], "rank": r, "gens": [...]}]}`.
pub fn parse_response(label: &str, body: &str) -> Result<CurveFile> {
    validate_label(label)?;
    let root: Value = serde_json::from_str(body).map_err(|e| schema(e.to_string()))?;
    let data = root
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("missing \"data\" list"))?;
    let record = data
        .first()
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    let ainvs = record
        .get("ainvs")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("missing \"ainvs\""))?;
    let a: Vec<Rational> = ainvs.iter().map(rational).collect::<Result<_>>()?;
    let a: [Rational; 5] = a
        .try_into()
        .map_err(|_| schema("\"ainvs\" must have 5 entries"))?;
    let curve = Curve::new(a)
        .map_err(|e| schema(e.to_string()))?
        .with_label(label);
    let rank = match record.get("rank") {
        None | Some(Value::Null) => None,
        Some(r) => Some(
            r.as_u64()
                .and_then(|r| u32::try_from(r).ok())
                .ok_or_else(|| schema("\"rank\" is not a small nonnegative integer"))?,
        ),
    };
    let generators = match record.get("gens") {
        None | Some(Value::Null) => Vec::new(),
        Some(g) => g
            .as_array()
            .ok_or_else(|| schema("\"gens\" is not a list"))?
            .iter()
            .map(generator)
            .collect::<Result<_>>()?,
    };
    if let Some(p) = generators.iter().find(|p| !curve.contains(p)) {
        return Err(schema(format!(
            "published generator {p} is not on the curve"
        )));
    }
    Ok(CurveFile {
        curve,
        rank,
        generators,
    })
}
