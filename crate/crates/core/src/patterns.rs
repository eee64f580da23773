//! Pattern detectors over finite value sets.
//!
//! Every detector returns a [`PatternReport`] whose witnesses can be
//! replayed against the declared recurrence or containment, so a report
//! never has to be taken on trust.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{P1Value, Rational};
use crate::error::{Error, Result};
use crate::maps::RecurrenceMap;
use crate::subgroup::ValueSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    #[serde(rename = "ap")]
    Ap,
    #[serde(rename = "gp")]
    Gp,
    Orbit,
    AdditiveShift,
    MultiplicativeShift,
    Intersection,
}

/// The step of a pattern: a difference, a ratio, or a map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Parameter {
    Scalar(Rational),
    Map(RecurrenceMap),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub kind: PatternKind,
    pub length: usize,
    pub witnesses: Vec<P1Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<Parameter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implied_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayError(pub String);

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ReplayError {}

impl PatternReport {
    fn new(kind: PatternKind, witnesses: Vec<P1Value>, parameter: Option<Parameter>) -> Self {
        PatternReport {
            kind,
            length: witnesses.len(),
            witnesses,
            parameter,
            implied_constant: None,
            rank: None,
            note: None,
        }
    }

    /// Attaches `n^{1/(1+rank)}` for the report's length.
    pub fn with_rank(mut self, rank: u32, declared: bool) -> Self {
        self.implied_constant = Some(implied_constant(self.length as u64, rank));
        self.rank = Some(rank);
        self.note =
            (!declared).then(|| "rank is the generator count, not a declared rank".to_string());
        self
    }

    fn scalar(&self) -> std::result::Result<&Rational, ReplayError> {
        match &self.parameter {
            Some(Parameter::Scalar(r)) => Ok(r),
            other => Err(ReplayError(format!(
                "expected a scalar parameter, found {other:?}"
            ))),
        }
    }

    /// Re-checks the report: distinct witnesses, the declared recurrence
    /// between consecutive witnesses, and containment in `universe` (which
    /// shift reports need for `S + a ⊆ X` / `q·S ⊆ X`).
    pub fn replay(&self, universe: Option<&ValueSet>) -> std::result::Result<(), ReplayError> {
        let fail = |msg: String| Err(ReplayError(msg));
        if self.length != self.witnesses.len() {
            return fail(format!(
                "length {} but {} witnesses",
                self.length,
                self.witnesses.len()
            ));
        }
        let distinct: BTreeSet<_> = self.witnesses.iter().collect();
        if distinct.len() != self.witnesses.len() {
            return fail("witnesses are not distinct".into());
        }
        let member = |v: &P1Value| universe.is_none_or(|u| u.contains(v));
        if let Some(w) = self.witnesses.iter().find(|w| !member(w)) {
            return fail(format!("witness {w} is not in the value set"));
        }
        let finite = |v: &P1Value| -> std::result::Result<Rational, ReplayError> {
            v.finite()
                .cloned()
                .ok_or_else(|| ReplayError("∞ cannot appear in this pattern".into()))
        };
        match self.kind {
            PatternKind::Ap | PatternKind::Gp if self.length < 2 => {
                for w in &self.witnesses {
                    finite(w)?;
                }
                Ok(())
            }
            PatternKind::Ap => {
                let a = self.scalar()?;
                if a.is_zero() {
                    return fail("zero common difference".into());
                }
                for pair in self.witnesses.windows(2) {
                    let (u, v) = (finite(&pair[0])?, finite(&pair[1])?);
                    if &(&v - &u) != a {
                        return fail(format!("{v} - {u} != {a}"));
                    }
                }
                Ok(())
            }
            PatternKind::Gp => {
                let q = self.scalar()?;
                check_ratio(q).map_err(|e| ReplayError(e.to_string()))?;
                for pair in self.witnesses.windows(2) {
                    let (u, v) = (finite(&pair[0])?, finite(&pair[1])?);
                    if u.is_zero() || v != &u * q {
                        return fail(format!("{v} != {q} * {u}"));
                    }
                }
                Ok(())
            }
            PatternKind::Orbit => {
                let f = match &self.parameter {
                    Some(Parameter::Map(f)) => f,
                    other => return fail(format!("orbit needs a map parameter, found {other:?}")),
                };
                for pair in self.witnesses.windows(2) {
                    let image = f.apply(&pair[0]);
                    if image != pair[1] {
                        return fail(format!("F({}) = {image}, expected {}", pair[0], pair[1]));
                    }
                }
                Ok(())
            }
            PatternKind::AdditiveShift | PatternKind::MultiplicativeShift => {
                let s = self.scalar()?;
                for w in &self.witnesses {
                    let w = finite(w)?;
                    let moved = match self.kind {
                        PatternKind::AdditiveShift => &w + s,
                        _ => &w * s,
                    };
                    if !member(&P1Value::Finite(moved.clone())) {
                        return fail(format!(
                            "{w} moves to {moved}, which is not in the value set"
                        ));
                    }
                }
                Ok(())
            }
            PatternKind::Intersection => Ok(()),
        }
    }
}

/// `n^{1/(1+rank)}` rounded to six decimals: the least value the constant in
/// `n ≤ c^{1+rank}` can take if a pattern of length `n` exists.
pub fn implied_constant(n: u64, rank: u32) -> f64 {
    let raw = (n as f64).powf(1.0 / (1.0 + f64::from(rank)));
    (raw * 1e6).round() / 1e6
}

fn check_ratio(q: &Rational) -> Result<()> {
    if q.is_zero() || q.abs().is_one() {
        Err(Error::BadRatio)
    } else {
        Ok(())
    }
}

fn sorted_finite(x: &ValueSet) -> Result<Vec<Rational>> {
    let xs: Vec<Rational> = x.finite().cloned().collect();
    if xs.is_empty() {
        Err(Error::EmptySet)
    } else {
        Ok(xs)
    }
}

/// Longest arithmetic progression among the finite values of `x`.
///
/// Progressions are reported in increasing order (`a > 0`); among those of
/// maximal length the smallest `a` wins, then the smallest start.
pub fn longest_ap(x: &ValueSet) -> Result<PatternReport> {
    let xs = sorted_finite(x)?;
    let n = xs.len();
    let index: HashMap<&Rational, usize> = xs.iter().enumerate().map(|(i, v)| (v, i)).collect();
    // len[i * n + j]: longest AP whose last two terms are xs[i] < xs[j]
    let mut len = vec![0u32; n * n];
    let mut best: Option<(u32, Rational, Rational)> = None;
    for j in 0..n {
        for i in 0..j {
            let prev = Rational::from(2) * &xs[i] - &xs[j];
            let l = match index.get(&prev) {
                Some(&k) => len[k * n + i] + 1,
                None => 2,
            };
            len[i * n + j] = l;
            let a = &xs[j] - &xs[i];
            let start = &xs[j] - &(&a * &Rational::from(i64::from(l) - 1));
            let better = match &best {
                None => true,
                Some((bl, ba, bs)) => (l, rev(&a), rev(&start)) > (*bl, rev(ba), rev(bs)),
            };
            if better {
                best = Some((l, a, start));
            }
        }
    }
    Ok(match best {
        None => PatternReport::new(PatternKind::Ap, vec![P1Value::Finite(xs[0].clone())], None),
        Some((l, a, start)) => {
            let witnesses = (0..i64::from(l))
                .map(|k| P1Value::Finite(&start + &(&a * &Rational::from(k))))
                .collect();
            PatternReport::new(PatternKind::Ap, witnesses, Some(Parameter::Scalar(a)))
        }
    })
}

/// Reverses the order so that tuples compare "longer, then smaller".
fn rev(r: &Rational) -> std::cmp::Reverse<&Rational> {
    std::cmp::Reverse(r)
}

/// Longest geometric progression among the nonzero finite values of `x`
/// with ratio `q ∉ {0, ±1}`.
///
/// Progressions are reported with `|q| > 1`; ties go to the smallest `|q|`,
/// then the smallest `q`, then the smallest start.
pub fn longest_gp(x: &ValueSet) -> Result<PatternReport> {
    let mut xs: Vec<Rational> = x.finite().filter(|v| !v.is_zero()).cloned().collect();
    if xs.is_empty() {
        return Err(Error::EmptySet);
    }
    xs.sort_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)));
    let n = xs.len();
    let index: HashMap<&Rational, usize> = xs.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut len = vec![0u32; n * n];
    type Key = (
        u32,
        std::cmp::Reverse<Rational>,
        std::cmp::Reverse<Rational>,
        std::cmp::Reverse<Rational>,
    );
    let mut best: Option<Key> = None;
    for j in 0..n {
        for i in 0..j {
            if xs[i].abs() == xs[j].abs() {
                continue;
            }
            let prev = &(&xs[i] * &xs[i]) / &xs[j];
            let l = match index.get(&prev) {
                Some(&k) => len[k * n + i] + 1,
                None => 2,
            };
            len[i * n + j] = l;
            let q = &xs[j] / &xs[i];
            let start = &xs[j] / &q.pow(l - 1);
            use std::cmp::Reverse as R;
            let key = (l, R(q.abs()), R(q), R(start));
            if best.as_ref().is_none_or(|b| key > *b) {
                best = Some(key);
            }
        }
    }
    Ok(match best {
        None => {
            let first = x.finite().find(|v| !v.is_zero()).expect("nonempty").clone();
            PatternReport::new(PatternKind::Gp, vec![P1Value::Finite(first)], None)
        }
        Some((l, _, std::cmp::Reverse(q), std::cmp::Reverse(start))) => {
            let witnesses = (0..l)
                .map(|k| P1Value::Finite(&start * &q.pow(k)))
                .collect();
            PatternReport::new(PatternKind::Gp, witnesses, Some(Parameter::Scalar(q)))
        }
    })
}

/// Longest segment `α, F(α), F²(α), …` of distinct members of `x`.
///
/// The successor relation `v ↦ F(v)` restricted to `x` is a functional
/// graph; chain lengths are computed once per vertex, with a chain that
/// runs into a cycle counting each cycle vertex once. Ties go to the
/// smallest start.
pub fn longest_orbit(x: &ValueSet, f: &RecurrenceMap) -> Result<PatternReport> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    let verts: Vec<&P1Value> = x.iter().collect();
    let index: HashMap<&P1Value, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let succ: Vec<Option<usize>> = verts
        .iter()
        .map(|v| index.get(&f.apply(v)).copied())
        .collect();

    let n = verts.len();
    let mut chain = vec![0usize; n];
    // 0 = unvisited, 1 = on the current walk, 2 = done
    let mut state = vec![0u8; n];
    let mut pos_on_walk = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = Some(root);
        while let Some(v) = cur {
            if state[v] != 0 {
                break;
            }
            state[v] = 1;
            pos_on_walk[v] = walk.len();
            walk.push(v);
            cur = succ[v];
        }
        let mut tail_end = walk.len();
        if let Some(v) = cur {
            if state[v] == 1 {
                let start = pos_on_walk[v];
                let cycle_len = walk.len() - start;
                for &c in &walk[start..] {
                    chain[c] = cycle_len;
                    state[c] = 2;
                }
                tail_end = start;
            }
        }
        for &v in walk[..tail_end].iter().rev() {
            chain[v] = 1 + succ[v].map_or(0, |s| chain[s]);
            state[v] = 2;
        }
    }

    // verts are sorted, so the first maximum is the smallest start
    let (best, &length) = chain
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|(_, l)| **l)
        .expect("nonempty");
    let mut witnesses = Vec::with_capacity(length);
    let mut cur = best;
    for _ in 0..length {
        witnesses.push(verts[cur].clone());
        match succ[cur] {
            Some(s) => cur = s,
            None => break,
        }
    }
    Ok(PatternReport::new(
        PatternKind::Orbit,
        witnesses,
        Some(Parameter::Map(f.clone())),
    ))
}

/// `{ v ∈ x : v + a ∈ x }`, the largest `S ⊆ x` with `S + a ⊆ x`.
pub fn shift_intersection(x: &ValueSet, a: &Rational) -> Result<ValueSet> {
    if a.is_zero() {
        return Err(Error::ZeroShift);
    }
    let values = x
        .finite()
        .filter(|v| x.contains(&P1Value::Finite(*v + a)))
        .cloned()
        .map(P1Value::Finite);
    Ok(ValueSet::new(
        values,
        format!("shift by {a} of {}", x.provenance),
    ))
}

/// `{ v ∈ x : q·v ∈ x }`, optionally without the fixed point 0.
pub fn scaling_intersection(x: &ValueSet, q: &Rational, exclude_fixed: bool) -> Result<ValueSet> {
    check_ratio(q)?;
    let values = x
        .finite()
        .filter(|v| !(exclude_fixed && v.is_zero()))
        .filter(|v| x.contains(&P1Value::Finite(*v * q)))
        .cloned()
        .map(P1Value::Finite);
    Ok(ValueSet::new(
        values,
        format!("scaling by {q} of {}", x.provenance),
    ))
}

/// The difference `a > 0` with the largest shift set, smallest `a` on ties.
pub fn best_additive_shift(x: &ValueSet) -> Result<(Rational, ValueSet)> {
    let xs: Vec<&Rational> = x.finite().collect();
    if xs.len() < 2 {
        return Err(Error::EmptySet);
    }
    let mut counts: HashMap<Rational, usize> = HashMap::new();
    for (i, u) in xs.iter().enumerate() {
        for v in &xs[i + 1..] {
            *counts.entry(*v - *u).or_default() += 1;
        }
    }
    let (a, _) = counts
        .into_iter()
        .max_by(|(a1, c1), (a2, c2)| c1.cmp(c2).then(a2.cmp(a1)))
        .expect("at least one pair");
    let s = shift_intersection(x, &a)?;
    Ok((a, s))
}

pub fn additive_shift_report(x: &ValueSet, a: &Rational) -> Result<PatternReport> {
    let s = shift_intersection(x, a)?;
    Ok(PatternReport::new(
        PatternKind::AdditiveShift,
        s.values.into_iter().collect(),
        Some(Parameter::Scalar(a.clone())),
    ))
}

pub fn multiplicative_shift_report(
    x: &ValueSet,
    q: &Rational,
    exclude_fixed: bool,
) -> Result<PatternReport> {
    let s = scaling_intersection(x, q, exclude_fixed)?;
    Ok(PatternReport::new(
        PatternKind::MultiplicativeShift,
        s.values.into_iter().collect(),
        Some(Parameter::Scalar(q.clone())),
    ))
}

pub fn intersection_report(x: &ValueSet) -> PatternReport {
    PatternReport::new(
        PatternKind::Intersection,
        x.values.iter().cloned().collect(),
        None,
    )
}
