//! Maps to and on the projective line: Möbius transformations, rational
//! functions, and coordinate maps `g = H∘π` on a curve with `π ∈ {x, y}`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{P1Value, Rational, UniPoly};
use crate::curve::{Curve, CurvePoint};
use crate::error::{Error, Result};

/// `t ↦ (at + b)/(ct + d)` with `ad − bc ≠ 0`, stored in canonical
/// projective form: coprime integer entries, first nonzero entry positive.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MobiusMap {
    m: [[Rational; 2]; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionOrder {
    Finite(u32),
    Infinite,
}

impl MobiusMap {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        if (&a * &d - &b * &c).is_zero() {
            return Err(Error::SingularMap);
        }
        Ok(Self::canonical([[a, b], [c, d]]))
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1).expect("invertible")
    }

    /// `t ↦ t + a`
    pub fn translation(a: &Rational) -> Self {
        Self::new(
            Rational::one(),
            a.clone(),
            Rational::zero(),
            Rational::one(),
        )
        .expect("invertible")
    }

    /// `t ↦ q·t`, `q ≠ 0`.
    pub fn scaling(q: &Rational) -> Result<Self> {
        Self::new(
            q.clone(),
            Rational::zero(),
            Rational::zero(),
            Rational::one(),
        )
    }

    fn canonical(m: [[Rational; 2]; 2]) -> Self {
        let flat = [&m[0][0], &m[0][1], &m[1][0], &m[1][1]];
        let den = Rational::common_denominator(flat);
        let ints: Vec<BigInt> = flat
            .iter()
            .map(|r| (*r * &Rational::from(den.clone())).numer().clone())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let first = ints
            .iter()
            .find(|v| !v.is_zero())
            .expect("invertible matrix");
        if first.is_negative() {
            g = -g;
        }
        let e: Vec<Rational> = ints.into_iter().map(|v| Rational::from(v / &g)).collect();
        MobiusMap {
            m: [[e[0].clone(), e[1].clone()], [e[2].clone(), e[3].clone()]],
        }
    }

    pub fn entries(&self) -> [[&Rational; 2]; 2] {
        [
            [&self.m[0][0], &self.m[0][1]],
            [&self.m[1][0], &self.m[1][1]],
        ]
    }

    pub fn det(&self) -> Rational {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn trace(&self) -> Rational {
        &self.m[0][0] + &self.m[1][1]
    }

    /// True for the identity element of PGL₂ (scalar matrices).
    pub fn is_identity(&self) -> bool {
        self.m[0][1].is_zero() && self.m[1][0].is_zero() && self.m[0][0] == self.m[1][1]
    }

    /// Projective evaluation, with `M(∞) = a/c` and `M(−d/c) = ∞`.
    pub fn apply(&self, v: &P1Value) -> P1Value {
        let [[a, b], [c, d]] = self.entries();
        match v {
            P1Value::Infinity if c.is_zero() => P1Value::Infinity,
            P1Value::Infinity => P1Value::Finite(a / c),
            P1Value::Finite(t) => {
                let den = c * t + d;
                match (a * t + b).checked_div(&den) {
                    Some(r) => P1Value::Finite(r),
                    None => P1Value::Infinity,
                }
            }
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let (x, y) = (&self.m, &other.m);
        let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
        Self::canonical([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn inverse(&self) -> MobiusMap {
        let [[a, b], [c, d]] = self.entries();
        Self::canonical([[d.clone(), -b], [-c, a.clone()]])
    }

    /// `self` composed with itself `n` times (`n = 0` gives the identity).
    pub fn iterate(&self, n: u32) -> MobiusMap {
        (0..n).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// Order of the map in PGL₂(ℚ), read off from `trace²/det`.
    ///
    /// A finite order `n > 1` forces the eigenvalue ratio to be a primitive
    /// n-th root of unity whose `λ + λ⁻¹` is rational, so `trace²/det`
    /// is one of 0, 1, 2, 3 (orders 2, 3, 4, 6). The value 4 means a
    /// repeated eigenvalue, which for a non-scalar matrix is parabolic.
    pub fn torsion_order(&self) -> TorsionOrder {
        if self.is_identity() {
            return TorsionOrder::Finite(1);
        }
        let tr = self.trace();
        if tr.is_zero() {
            return TorsionOrder::Finite(2);
        }
        let ratio = &(&tr * &tr) / &self.det();
        match ratio {
            r if r == Rational::from(1) => TorsionOrder::Finite(3),
            r if r == Rational::from(2) => TorsionOrder::Finite(4),
            r if r == Rational::from(3) => TorsionOrder::Finite(6),
            _ => TorsionOrder::Infinite,
        }
    }

    pub fn to_rational_function(&self) -> RationalFunction {
        let [[a, b], [c, d]] = self.entries();
        RationalFunction::new(
            UniPoly::new(vec![b.clone(), a.clone()]),
            UniPoly::new(vec![d.clone(), c.clone()]),
        )
        .expect("invertible Möbius map is non-constant")
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.entries();
        write!(f, "({a}*t + {b})/({c}*t + {d})")
    }
}

impl fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mobius[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

#[derive(Serialize, Deserialize)]
struct MobiusJson {
    m: [[Rational; 2]; 2],
}

impl Serialize for MobiusMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MobiusJson { m: self.m.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MobiusMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let MobiusJson {
            m: [[a, b], [c, d]],
        } = MobiusJson::deserialize(deserializer)?;
        MobiusMap::new(a, b, c, d).map_err(serde::de::Error::custom)
    }
}

/// A non-constant rational function `num/den` in lowest terms, `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: UniPoly,
    den: UniPoly,
}

impl RationalFunction {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        let lc = den.leading().ok_or(Error::DivisionByZero)?.clone();
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g)?;
        let (den, _) = den.div_rem(&g)?;
        let inv = lc.recip().expect("nonzero");
        // den/g has leading coefficient lc/lc(g) = lc since g is monic
        let (num, den) = (num.scale(&inv), den.scale(&inv));
        if num.is_constant() && den.is_constant() {
            return Err(Error::ConstantMap);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(p: UniPoly) -> Result<Self> {
        Self::new(p, UniPoly::one())
    }

    pub fn identity() -> Self {
        Self::polynomial(UniPoly::t()).expect("non-constant")
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.den
    }

    fn deg_num(&self) -> usize {
        self.num.degree().unwrap_or(0)
    }

    fn deg_den(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.deg_num().max(self.deg_den())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Degree-one functions as Möbius maps.
    pub fn as_mobius(&self) -> Option<MobiusMap> {
        if self.degree() != 1 {
            return None;
        }
        MobiusMap::new(
            self.num.coeff(1),
            self.num.coeff(0),
            self.den.coeff(1),
            self.den.coeff(0),
        )
        .ok()
    }

    pub fn apply(&self, v: &P1Value) -> P1Value {
        match v {
            P1Value::Finite(t) => {
                let d = self.den.eval(t);
                match self.num.eval(t).checked_div(&d) {
                    Some(r) => P1Value::Finite(r),
                    // num(t) ≠ 0 here, since num and den are coprime
                    None => P1Value::Infinity,
                }
            }
            P1Value::Infinity => match self.deg_num().cmp(&self.deg_den()) {
                std::cmp::Ordering::Greater => P1Value::Infinity,
                std::cmp::Ordering::Less => P1Value::Finite(Rational::zero()),
                std::cmp::Ordering::Equal => P1Value::Finite(
                    self.num.leading().expect("nonzero") / self.den.leading().expect("nonzero"),
                ),
            },
        }
    }

    /// All `t ∈ ℙ¹(ℚ)` with `H(t) = v`.
    pub fn preimages(&self, v: &P1Value) -> BTreeSet<P1Value> {
        let finite = match v {
            P1Value::Finite(val) => &self.num - &self.den.scale(val),
            P1Value::Infinity => self.den.clone(),
        };
        let mut out: BTreeSet<P1Value> = match finite.rational_roots() {
            Ok(roots) => roots.into_iter().map(P1Value::Finite).collect(),
            Err(_) => BTreeSet::new(),
        };
        if self.apply(&P1Value::Infinity) == *v {
            out.insert(P1Value::Infinity);
        }
        out
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &RationalFunction) -> RationalFunction {
        let m = self.degree() as u32;
        let homogenize = |p: &UniPoly| {
            p.coeffs()
                .iter()
                .enumerate()
                .fold(UniPoly::zero(), |acc, (i, c)| {
                    let term = &inner.num.pow(i as u32) * &inner.den.pow(m - i as u32);
                    &acc + &term.scale(c)
                })
        };
        RationalFunction::new(homogenize(&self.num), homogenize(&self.den))
            .expect("composition of non-constant maps is non-constant")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct RatFuncJson {
    num: UniPoly,
    #[serde(default = "UniPoly::one")]
    den: UniPoly,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncJson {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RatFuncJson::deserialize(deserializer)?;
        RationalFunction::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

/// The map `F` driving a recurrence `α ↦ F(α)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum RecurrenceMap {
    Mobius(MobiusMap),
    RatFunc(RationalFunction),
}

impl RecurrenceMap {
    pub fn apply(&self, v: &P1Value) -> P1Value {
        match self {
            RecurrenceMap::Mobius(m) => m.apply(v),
            RecurrenceMap::RatFunc(h) => h.apply(v),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            RecurrenceMap::Mobius(_) => 1,
            RecurrenceMap::RatFunc(h) => h.degree(),
        }
    }

    pub fn to_rational_function(&self) -> RationalFunction {
        match self {
            RecurrenceMap::Mobius(m) => m.to_rational_function(),
            RecurrenceMap::RatFunc(h) => h.clone(),
        }
    }
}

impl fmt::Display for RecurrenceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecurrenceMap::Mobius(m) => write!(f, "{m}"),
            RecurrenceMap::RatFunc(h) => write!(f, "{h}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    X,
    Y,
}

impl Coordinate {
    pub fn degree(self) -> usize {
        match self {
            Coordinate::X => 2,
            Coordinate::Y => 3,
        }
    }
}

/// `g = post ∘ π` where `π` is the x- or y-coordinate on the curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateMap {
    pub base: Coordinate,
    #[serde(default = "RationalFunction::identity")]
    pub post: RationalFunction,
}

impl CoordinateMap {
    pub fn x() -> Self {
        CoordinateMap {
            base: Coordinate::X,
            post: RationalFunction::identity(),
        }
    }

    pub fn y() -> Self {
        CoordinateMap {
            base: Coordinate::Y,
            post: RationalFunction::identity(),
        }
    }

    pub fn new(base: Coordinate, post: RationalFunction) -> Self {
        CoordinateMap { base, post }
    }

    pub fn degree(&self) -> usize {
        self.post.degree() * self.base.degree()
    }

    /// `F∘g` for a recurrence map `F`.
    pub fn then(&self, f: &RecurrenceMap) -> CoordinateMap {
        CoordinateMap {
            base: self.base,
            post: f.to_rational_function().compose(&self.post),
        }
    }

    /// The identity point maps to `post(∞)`.
    pub fn apply(&self, _curve: &Curve, p: &CurvePoint) -> P1Value {
        let t = match (p, self.base) {
            (CurvePoint::Identity, _) => P1Value::Infinity,
            (CurvePoint::Affine { x, .. }, Coordinate::X) => P1Value::Finite(x.clone()),
            (CurvePoint::Affine { y, .. }, Coordinate::Y) => P1Value::Finite(y.clone()),
        };
        self.post.apply(&t)
    }
}

impl fmt::Display for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            Coordinate::X => "x",
            Coordinate::Y => "y",
        };
        if self.post.is_identity() {
            f.write_str(base)
        } else {
            write!(f, "({})∘{base}", self.post)
        }
    }
}
