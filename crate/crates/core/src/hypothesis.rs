//! Branch values of coordinate maps and the hypothesis that `g` and `F∘g`
//! have different branch-value sets.
//!
//! A set of branch values is held as a monic squarefree polynomial over ℚ
//! (whose complex roots are the finite values) and a flag for ∞. Two such
//! sets agree exactly when the polynomials and the flags agree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{sylvester_resultant, P1Value, Rational, UniPoly};
use crate::curve::Curve;
use crate::error::Result;
use crate::maps::{
    Coordinate, CoordinateMap, MobiusMap, RationalFunction, RecurrenceMap, TorsionOrder,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchSet {
    pub locus: UniPoly,
    pub contains_infinity: bool,
}

impl BranchSet {
    /// Normalizes `locus` to its monic squarefree part.
    pub fn new(locus: &UniPoly, contains_infinity: bool) -> Result<Self> {
        Ok(BranchSet {
            locus: locus.squarefree_part()?,
            contains_infinity,
        })
    }

    pub fn empty() -> Self {
        BranchSet {
            locus: UniPoly::one(),
            contains_infinity: false,
        }
    }

    /// Number of branch values over ℂ.
    pub fn count(&self) -> usize {
        self.locus.degree().unwrap_or(0) + usize::from(self.contains_infinity)
    }

    pub fn contains(&self, v: &P1Value) -> bool {
        match v {
            P1Value::Infinity => self.contains_infinity,
            P1Value::Finite(t) => self.locus.eval(t).is_zero(),
        }
    }

    pub fn union(&self, other: &BranchSet) -> BranchSet {
        BranchSet::new(
            &(&self.locus * &other.locus),
            self.contains_infinity || other.contains_infinity,
        )
        .expect("product of nonzero polynomials")
    }

    fn with_value(&self, v: &P1Value) -> BranchSet {
        match v {
            P1Value::Infinity => BranchSet {
                locus: self.locus.clone(),
                contains_infinity: true,
            },
            P1Value::Finite(t) => self.union(&BranchSet {
                locus: UniPoly::linear_root(t),
                contains_infinity: false,
            }),
        }
    }
}

impl fmt::Display for BranchSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "roots of {}", self.locus)?;
        if self.contains_infinity {
            f.write_str(" and ∞")?;
        }
        Ok(())
    }
}

/// Branch values of `x : E → ℙ¹`: the roots of the 2-division polynomial
/// (where the fiber quadratic in `y` has a double root) and ∞.
pub fn branch_set_x(curve: &Curve) -> BranchSet {
    BranchSet::new(&curve.two_division_polynomial(), true)
        .expect("2-division polynomial is nonzero")
}

/// `M(B)` for a Möbius map `M`.
pub fn mobius_image_branch_set(b: &BranchSet, m: &MobiusMap) -> BranchSet {
    let moved = b
        .locus
        .substitute_mobius(m)
        .expect("invertible map, nonzero locus");
    let image = BranchSet::new(&moved.poly, moved.root_to_infinity)
        .expect("transport of a nonzero polynomial");
    if b.contains_infinity {
        image.with_value(&moved.infinity_image)
    } else {
        image
    }
}

pub fn branch_sets_equal(b1: &BranchSet, b2: &BranchSet) -> bool {
    b1 == b2
}

/// `F(B)` for a rational function `F`.
///
/// The finite images of the roots of `L` are the roots in `w` of
/// `Res_t(L(t), num(t) − w·den(t))`, taken with the formal degree `deg F` in
/// `t` so that the identity holds even where the leading term cancels. It is
/// recovered by interpolation from `deg L + 1` values of `w`.
pub fn image_branch_set(b: &BranchSet, f: &RationalFunction) -> BranchSet {
    let (num, den) = (f.numerator(), f.denominator());
    let m = f.degree();
    let lcoeffs = b.locus.coeffs();
    let n = b.locus.degree().unwrap_or(0);
    let mut image = if n == 0 {
        BranchSet::empty()
    } else {
        let nodes: Vec<(Rational, Rational)> = (0..=n as i64)
            .map(|w| {
                let w = Rational::from(w);
                let g = num - &den.scale(&w);
                let mut gc = g.coeffs().to_vec();
                gc.resize(m + 1, Rational::zero());
                let r = sylvester_resultant(lcoeffs, &gc);
                (w, r)
            })
            .collect();
        let res = UniPoly::interpolate(&nodes);
        // roots of L that are poles of F go to ∞
        let to_infinity = !b.locus.gcd(den).is_constant();
        BranchSet::new(&res, to_infinity)
            .expect("num and den are coprime, so the resultant is nonzero")
    };
    if b.contains_infinity {
        image = image.with_value(&f.apply(&P1Value::Infinity));
    }
    image
}

/// Critical values of `F : ℙ¹ → ℙ¹`.
///
/// Finite critical points are the roots of `W = num′·den − num·den′` (a pole
/// of order `k` is a root of order `k − 1`). Riemann–Hurwitz gives `2d − 2`
/// critical points in all, so ∞ is critical exactly when `deg W < 2d − 2`.
pub fn critical_values(f: &RationalFunction) -> BranchSet {
    let (num, den) = (f.numerator(), f.denominator());
    let w = &(&num.derivative() * den) - &(num * &den.derivative());
    let d = f.degree();
    let finite_points =
        BranchSet::new(&w, false).expect("non-constant map has a nonzero Wronskian");
    let values = image_branch_set(&finite_points, f);
    if w.degree().unwrap_or(0) + 2 < 2 * d {
        values.with_value(&f.apply(&P1Value::Infinity))
    } else {
        values
    }
}

/// Branch values of `H∘x`: `H(branch(x)) ∪ critval(H)`. `None` for maps
/// built on the y-coordinate.
pub fn branch_set(curve: &Curve, g: &CoordinateMap) -> Option<BranchSet> {
    if g.base != Coordinate::X {
        return None;
    }
    let base = branch_set_x(curve);
    Some(if g.post.is_identity() {
        base
    } else if let Some(m) = g.post.as_mobius() {
        mobius_image_branch_set(&base, &m)
    } else {
        image_branch_set(&base, &g.post).union(&critical_values(&g.post))
    })
}

/// The duplication map on x-coordinates: `F(x(P)) = x(2P)` when `2P ≠ O`.
pub fn lattes_duplication(curve: &Curve) -> RationalFunction {
    let num = UniPoly::new(vec![
        -curve.b8(),
        -(Rational::from(2) * curve.b6()),
        -curve.b4(),
        Rational::zero(),
        Rational::one(),
    ]);
    RationalFunction::new(num, curve.two_division_polynomial())
        .expect("nonsingular curve gives a degree-4 map")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub verdict: Verdict,
    /// Which rung of the ladder decided: 1 infinite-order Möbius, 2 torsion
    /// Möbius, 3 general rational map, 4 out of reach.
    pub case: u8,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_g: Option<BranchSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_fg: Option<BranchSet>,
}

/// Decides whether `g` and `F∘g` have different branch-value sets.
pub fn check_pattern_hypothesis(
    curve: &Curve,
    g: &CoordinateMap,
    f: &RecurrenceMap,
) -> HypothesisReport {
    let mobius = match f {
        RecurrenceMap::Mobius(m) => Some(m.clone()),
        RecurrenceMap::RatFunc(h) => h.as_mobius(),
    };
    let unknown = |reason: &str| HypothesisReport {
        verdict: Verdict::Unknown,
        case: 4,
        reason: reason.to_string(),
        branch_g: None,
        branch_fg: None,
    };
    let compare = |case: u8, bg: BranchSet, bfg: BranchSet| {
        let equal = branch_sets_equal(&bg, &bfg);
        HypothesisReport {
            verdict: if equal {
                Verdict::Violated
            } else {
                Verdict::Satisfied
            },
            case,
            reason: format!(
                "branch values of g and F∘g {}",
                if equal { "coincide" } else { "differ" }
            ),
            branch_g: Some(bg),
            branch_fg: Some(bfg),
        }
    };
    match mobius {
        Some(m) => match m.torsion_order() {
            TorsionOrder::Infinite => HypothesisReport {
                verdict: Verdict::Satisfied,
                case: 1,
                reason: "F is a Möbius map of infinite order, so it cannot permute the (at least 3) branch values of g"
                    .into(),
                branch_g: None,
                branch_fg: None,
            },
            TorsionOrder::Finite(_) => match branch_set(curve, g) {
                Some(bg) => {
                    let bfg = mobius_image_branch_set(&bg, &m);
                    compare(2, bg, bfg)
                }
                None => unknown("F is a torsion Möbius map and branch values of y-based maps are not computed"),
            },
        },
        None => match branch_set(curve, g) {
            Some(bg) => {
                let fg = g.then(f);
                let bfg = branch_set(curve, &fg).expect("same base as g");
                compare(3, bg, bfg)
            }
            None => unknown("branch values of y-based maps are not computed"),
        },
    }
}
