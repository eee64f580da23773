//! Deciding `v ∈ g(E(ℚ))` by solving fibers, and a naive point search.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use crate::algebra::factor::integer_sqrt;
use crate::algebra::{P1Value, Rational, UniPoly};
use crate::curve::{Curve, CurvePoint};
use crate::maps::{Coordinate, CoordinateMap};

/// Square root of `r` if it is the square of a rational; the root returned
/// is nonnegative.
pub fn is_square(r: &Rational) -> Option<Rational> {
    let n = integer_sqrt(r.numer())?;
    let d = integer_sqrt(r.denom())?;
    Some(Rational::new(n, d).expect("denominator is positive"))
}

/// Rational `y` with `(x0, y)` on the curve.
pub fn y_candidates(curve: &Curve, x0: &Rational) -> BTreeSet<Rational> {
    let b = curve.a1() * x0 + curve.a3();
    let c = curve.rhs(x0);
    let disc = &b * &b + Rational::from(4) * &c;
    let Some(s) = is_square(&disc) else {
        return BTreeSet::new();
    };
    let two = Rational::from(2);
    [&(&s - &b) / &two, &(-&s - &b) / &two]
        .into_iter()
        .collect()
}

/// Affine points of the curve with the given y-coordinate.
pub fn points_with_y(curve: &Curve, y0: &Rational) -> BTreeSet<CurvePoint> {
    // x³ + a2x² + (a4 − a1·y)x + (a6 − y² − a3·y) = 0
    let cubic = UniPoly::new(vec![
        curve.a6() - y0 * y0 - curve.a3() * y0,
        curve.a4() - curve.a1() * y0,
        curve.a2().clone(),
        Rational::one(),
    ]);
    cubic
        .rational_roots()
        .expect("monic cubic")
        .into_iter()
        .map(|x| CurvePoint::Affine { x, y: y0.clone() })
        .collect()
}

/// Decides whether `v ∈ g(E(ℚ))`, returning a witness point when it is.
pub fn g_membership(curve: &Curve, g: &CoordinateMap, v: &P1Value) -> Option<CurvePoint> {
    for t in g.post.preimages(v) {
        let t = match t {
            P1Value::Infinity => return Some(CurvePoint::Identity),
            P1Value::Finite(t) => t,
        };
        let witness = match g.base {
            Coordinate::X => y_candidates(curve, &t)
                .into_iter()
                .next()
                .map(|y| CurvePoint::Affine { x: t, y }),
            Coordinate::Y => points_with_y(curve, &t).into_iter().next(),
        };
        if witness.is_some() {
            return witness;
        }
    }
    None
}

/// All points with `x = m/e²`, `gcd(m, e) = 1`, `1 ≤ e ≤ den_bound` and
/// `|m| ≤ num_bound·e²`, plus the identity.
///
/// Curves with non-integral coefficients are searched on their integral
/// model and the points mapped back.
pub fn naive_point_search(curve: &Curve, num_bound: u64, den_bound: u64) -> BTreeSet<CurvePoint> {
    let (u, model) = curve.integral_model();
    let found: Vec<CurvePoint> = (1..=den_bound.max(1))
        .into_par_iter()
        .flat_map_iter(|e| {
            let e2 = e * e;
            let lim = i128::from(num_bound) * i128::from(e2);
            let ebig = BigInt::from(e);
            let model = &model;
            (-lim..=lim)
                .filter_map(move |m| {
                    let mb = BigInt::from(m);
                    if !mb.gcd(&ebig).is_one() {
                        return None;
                    }
                    let x = Rational::new(mb, BigInt::from(e2)).expect("positive");
                    let ys = y_candidates(model, &x);
                    (!ys.is_empty()).then_some((x, ys))
                })
                .flat_map(|(x, ys)| {
                    ys.into_iter()
                        .map(move |y| CurvePoint::Affine { x: x.clone(), y })
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let ur = Rational::from(u);
    let (u2, u3) = (ur.pow(2), ur.pow(3));
    let mut out: BTreeSet<CurvePoint> = found
        .into_iter()
        .map(|p| match p {
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: &x / &u2,
                y: &y / &u3,
            },
            CurvePoint::Identity => CurvePoint::Identity,
        })
        .collect();
    out.insert(CurvePoint::Identity);
    out
}
