//! Certificates: a curve, points, claimed image values and pattern claims,
//! checked line by line.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{P1Value, Rational};
use crate::curve::{Curve, CurvePoint};
use crate::error::{Error, Result};
use crate::maps::{CoordinateMap, RecurrenceMap};
use crate::membership::g_membership;
use crate::patterns::{scaling_intersection, shift_intersection};
use crate::subgroup::ValueSet;

const FIXTURES: [(&str, &str); 2] = [
    (
        "shifts-234446",
        include_str!("../fixtures/shifts-234446.json"),
    ),
    ("orbit-5077", include_str!("../fixtures/orbit-5077.json")),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `set` is exactly `{ v ∈ X : v + a ∈ X }`.
    Shift { a: Rational, set: Vec<P1Value> },
    /// `set` is exactly `{ v ∈ X : q·v ∈ X }`, without 0 if `exclude_fixed`.
    Scaling {
        q: Rational,
        #[serde(default)]
        exclude_fixed: bool,
        set: Vec<P1Value>,
    },
    /// `sequence` is an orbit segment of `map` inside X.
    Orbit {
        map: RecurrenceMap,
        sequence: Vec<P1Value>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub curve: Curve,
    #[serde(default = "CoordinateMap::x")]
    pub map: CoordinateMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default)]
    pub points: Vec<CurvePoint>,
    /// Claimed members of `g(E(ℚ))`; this is the set X the claims refer to.
    #[serde(default)]
    pub values: Vec<P1Value>,
    #[serde(default)]
    pub claims: Vec<Claim>,
}

impl Certificate {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn value_set(&self) -> ValueSet {
        ValueSet::new(
            self.values.iter().cloned(),
            format!("values of {}", self.name),
        )
    }
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn builtin(name: &str) -> Result<Certificate> {
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    Certificate::from_json(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub check: String,
    pub subject: String,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        write!(
            f,
            "{status} {} {}: {}",
            self.check, self.subject, self.detail
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub lines: Vec<CheckLine>,
    /// The first failure; checking stops there.
    pub failure: Option<Error>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Recorder {
    lines: Vec<CheckLine>,
}

impl Recorder {
    fn pass(&mut self, check: &str, subject: impl fmt::Display, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            check: check.into(),
            subject: subject.to_string(),
            status: Status::Pass,
            detail: detail.into(),
        });
    }

    fn fail(&mut self, check: &str, subject: impl fmt::Display, detail: String) -> Error {
        self.lines.push(CheckLine {
            check: check.into(),
            subject: subject.to_string(),
            status: Status::Fail,
            detail: detail.clone(),
        });
        Error::VerificationFailed(format!("{check} {subject}: {detail}"))
    }
}

fn show(vs: &[P1Value]) -> String {
    let parts: Vec<String> = vs.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Checks points, memberships and claims in order, stopping at the first
/// failure.
pub fn verify(cert: &Certificate) -> Verification {
    let mut rec = Recorder { lines: Vec::new() };
    let failure = run_checks(cert, &mut rec).err();
    Verification {
        lines: rec.lines,
        failure,
    }
}

fn run_checks(cert: &Certificate, rec: &mut Recorder) -> Result<()> {
    let e = &cert.curve;
    let g = &cert.map;
    for p in &cert.points {
        match p {
            CurvePoint::Identity => rec.pass("point", p, "identity"),
            CurvePoint::Affine { x, y } => {
                let r = e.residual(x, y);
                if !r.is_zero() {
                    return Err(rec.fail("point", p, format!("not on the curve, residual {r}")));
                }
                rec.pass("point", p, "residual 0");
            }
        }
    }

    for v in &cert.values {
        let listed = cert.points.iter().find(|p| g.apply(e, p) == *v);
        match listed.cloned().or_else(|| g_membership(e, g, v)) {
            Some(w) => rec.pass("member", v, format!("{g} = {v} at {w}")),
            None => return Err(rec.fail("member", v, format!("no rational point has {g} = {v}"))),
        }
    }

    let x = cert.value_set();
    for claim in &cert.claims {
        match claim {
            Claim::Shift { a, set } => {
                let want = shift_intersection(&x, a)?;
                check_set(rec, "shift", a, set, &want, |s| P1Value::Finite(s + a))?;
            }
            Claim::Scaling {
                q,
                exclude_fixed,
                set,
            } => {
                let want = scaling_intersection(&x, q, *exclude_fixed)?;
                check_set(rec, "scaling", q, set, &want, |s| P1Value::Finite(s * q))?;
            }
            Claim::Orbit { map, sequence } => {
                for (i, v) in sequence.iter().enumerate() {
                    if !x.contains(v) || sequence[..i].contains(v) {
                        return Err(rec.fail(
                            "orbit",
                            v,
                            "not a new member of the value set".into(),
                        ));
                    }
                }
                for pair in sequence.windows(2) {
                    let image = map.apply(&pair[0]);
                    if image != pair[1] {
                        return Err(rec.fail(
                            "orbit",
                            format!("F({})", pair[0]),
                            format!("is {image}, expected {}", pair[1]),
                        ));
                    }
                    rec.pass("orbit", format!("F({})", pair[0]), pair[1].to_string());
                }
                rec.pass("orbit", map, format!("length {}", sequence.len()));
            }
        }
    }
    Ok(())
}

fn check_set(
    rec: &mut Recorder,
    check: &str,
    param: &Rational,
    claimed: &[P1Value],
    want: &ValueSet,
    step: impl Fn(&Rational) -> P1Value,
) -> Result<()> {
    let subject = format!("by {param}");
    for s in claimed {
        let moved = s.finite().map(&step);
        if !want.contains(s) || moved.is_none() {
            return Err(rec.fail(
                check,
                &subject,
                format!("{s} or its image is not in the value set"),
            ));
        }
    }
    let got: ValueSet = ValueSet::explicit(claimed.iter().cloned());
    if got.values != want.values {
        let full: Vec<P1Value> = want.iter().cloned().collect();
        return Err(rec.fail(
            check,
            &subject,
            format!(
                "claimed {} but the maximal set is {}",
                show(claimed),
                show(&full)
            ),
        ));
    }
    let moved: Vec<P1Value> = claimed
        .iter()
        .filter_map(|s| s.finite().map(&step))
        .collect();
    rec.pass(
        check,
        &subject,
        format!(
            "|S| = {}, S = {}, image {}",
            claimed.len(),
            show(claimed),
            show(&moved)
        ),
    );
    Ok(())
}
