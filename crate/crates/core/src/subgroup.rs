//! Finite pieces of a finite-rank subgroup Γ and their images `g(Γ)`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::P1Value;
use crate::curve::{Curve, CurvePoint};
use crate::error::{Error, Result};
use crate::maps::CoordinateMap;

/// Γ described by generators, optionally together with the torsion subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub generators: Vec<CurvePoint>,
    #[serde(default)]
    pub include_torsion: bool,
    #[serde(default, rename = "rank", skip_serializing_if = "Option::is_none")]
    pub declared_rank: Option<u32>,
}

impl GammaSpec {
    pub fn new(generators: Vec<CurvePoint>) -> Self {
        GammaSpec {
            generators,
            include_torsion: false,
            declared_rank: None,
        }
    }

    /// Rank used in bound reports and whether it was declared (as opposed to
    /// the generator count standing in for it).
    pub fn rank(&self) -> (u32, bool) {
        match self.declared_rank {
            Some(r) => (r, true),
            None => (self.generators.len() as u32, false),
        }
    }
}

/// A finite set of values in ℙ¹(ℚ), sorted and without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSet {
    pub values: BTreeSet<P1Value>,
    pub provenance: String,
}

impl ValueSet {
    pub fn new(values: impl IntoIterator<Item = P1Value>, provenance: impl Into<String>) -> Self {
        ValueSet {
            values: values.into_iter().collect(),
            provenance: provenance.into(),
        }
    }

    /// An explicit list of values.
    pub fn explicit(values: impl IntoIterator<Item = P1Value>) -> Self {
        Self::new(values, "explicit list")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &P1Value) -> bool {
        self.values.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &P1Value> {
        self.values.iter()
    }

    /// Finite members in increasing order.
    pub fn finite(&self) -> impl Iterator<Item = &crate::algebra::Rational> {
        self.values.iter().filter_map(P1Value::finite)
    }
}

/// `{ Σ nᵢGᵢ + T : |nᵢ| ≤ coeff_bound, T torsion (or just O) }`
pub fn enumerate_gamma(
    curve: &Curve,
    spec: &GammaSpec,
    coeff_bound: u32,
) -> Result<BTreeSet<CurvePoint>> {
    if let Some(i) = spec.generators.iter().position(|g| !curve.contains(g)) {
        return Err(Error::GeneratorNotOnCurve(i));
    }
    let bound = i64::from(coeff_bound);
    let mut sums: BTreeSet<CurvePoint> = BTreeSet::from([CurvePoint::Identity]);
    for g in &spec.generators {
        let multiples: Vec<CurvePoint> = (-bound..=bound).map(|n| curve.mul(n, g)).collect();
        sums = sums
            .par_iter()
            .flat_map_iter(|s| multiples.iter().map(move |m| curve.add(s, m)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
    }
    if !spec.include_torsion {
        return Ok(sums);
    }
    let torsion: Vec<CurvePoint> = curve.torsion_points().into_iter().collect();
    Ok(sums
        .par_iter()
        .flat_map_iter(|s| torsion.iter().map(move |t| curve.add(s, t)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

/// `{ g(P) : P ∈ points }`. The value ∞ is dropped unless `keep_infinity`.
pub fn image_set<'a>(
    curve: &Curve,
    g: &CoordinateMap,
    points: impl IntoIterator<Item = &'a CurvePoint>,
    keep_infinity: bool,
) -> ValueSet {
    let values = points
        .into_iter()
        .map(|p| g.apply(curve, p))
        .filter(|v| keep_infinity || !v.is_infinite());
    ValueSet::new(values, format!("image under g = {g}"))
}

/// `g1(pts1) ∩ g2(pts2)`, with ∞ dropped unless `keep_infinity`.
pub fn intersect_images<'a, 'b>(
    (e1, g1, pts1): (
        &Curve,
        &CoordinateMap,
        impl IntoIterator<Item = &'a CurvePoint>,
    ),
    (e2, g2, pts2): (
        &Curve,
        &CoordinateMap,
        impl IntoIterator<Item = &'b CurvePoint>,
    ),
    keep_infinity: bool,
) -> ValueSet {
    let a = image_set(e1, g1, pts1, keep_infinity);
    let b = image_set(e2, g2, pts2, keep_infinity);
    ValueSet::new(
        a.values.intersection(&b.values).cloned(),
        format!("intersection of {g1} and {g2} images"),
    )
}
