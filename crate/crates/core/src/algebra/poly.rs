//! Dense univariate polynomials over ℚ.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::factor::{divisors, integer_sqrt};
use super::rational::{P1Value, Rational};
use crate::error::{Error, Result};
use crate::maps::MobiusMap;

/// A polynomial in one variable with rational coefficients, constant term
/// first. The zero polynomial has no coefficients; otherwise the last
/// coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

/// Result of pushing a polynomial's root set through a Möbius map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTransport {
    /// Polynomial whose roots are the finite images of the original roots.
    pub poly: UniPoly,
    /// Some root was sent to ∞.
    pub root_to_infinity: bool,
    /// Image of ∞ under the map; callers adjoin it when ∞ belonged to the set.
    pub infinity_image: P1Value,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `t`.
    pub fn t() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `t - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.recip().expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, v: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * v + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rational::from(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dl = d.leading().ok_or(Error::ZeroPolynomial)?.clone();
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] = &rem[i + j] - &(&c * dc);
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor; zero only if both inputs are zero.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("divisor is nonzero");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `p / gcd(p, p′)`, made monic: same roots, each with multiplicity one.
    pub fn squarefree_part(&self) -> Result<UniPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        let (q, _) = self.div_rem(&g)?;
        Ok(q.monic())
    }

    /// Exact rational roots without multiplicity, by the rational root theorem.
    pub fn rational_roots(&self) -> Result<BTreeSet<Rational>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut roots = BTreeSet::new();
        let ints = self.integer_coefficients();
        let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        if low > 0 {
            roots.insert(Rational::zero());
        }
        let ints = &ints[low..];
        match ints.len() {
            0 | 1 => {}
            2 => {
                roots.insert(Rational::new(-&ints[0], ints[1].clone()).expect("nonzero"));
            }
            3 => {
                let (c, b, a) = (&ints[0], &ints[1], &ints[2]);
                let disc = b * b - BigInt::from(4) * a * c;
                if let Some(s) = integer_sqrt(&disc) {
                    let two_a = BigInt::from(2) * a;
                    roots.insert(Rational::new(-b + &s, two_a.clone()).expect("nonzero"));
                    roots.insert(Rational::new(-b - &s, two_a).expect("nonzero"));
                }
            }
            _ => {
                let p = UniPoly::new(ints.iter().cloned().map(Rational::from).collect());
                roots.extend(integer_root_search(
                    p.squarefree_part()?.integer_coefficients(),
                ));
            }
        }
        Ok(roots)
    }

    /// Integer multiple of `self` with integer coefficients.
    pub fn integer_coefficients(&self) -> Vec<BigInt> {
        let den = Rational::common_denominator(&self.coeffs);
        let den = Rational::from(den);
        self.coeffs
            .iter()
            .map(|c| {
                let v = c * &den;
                debug_assert!(v.is_integer());
                v.numer().clone()
            })
            .collect()
    }

    /// Pushes the roots of `self` through `m`.
    ///
    /// With `m⁻¹(t) = (αt+β)/(γt+δ)`, returns the polynomial
    /// `Σ pᵢ (αt+β)ⁱ (γt+δ)ⁿ⁻ⁱ`, whose roots are exactly `m(r)` for the roots
    /// `r` of `self` with `m(r)` finite.
    pub fn substitute_mobius(&self, m: &MobiusMap) -> Result<MobiusTransport> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let [[a, b], [c, d]] = m.entries();
        if (a * d - b * c).is_zero() {
            return Err(Error::SingularMap);
        }
        // adj(m) represents m⁻¹ projectively: t ↦ (dt − b)/(−ct + a).
        let num = UniPoly::new(vec![-b, d.clone()]);
        let den = UniPoly::new(vec![a.clone(), -c]);
        let n = self.degree().expect("nonzero") as u32;
        let mut out = UniPoly::zero();
        for (i, p_i) in self.coeffs.iter().enumerate() {
            if p_i.is_zero() {
                continue;
            }
            let term = &num.pow(i as u32) * &den.pow(n - i as u32);
            out = &out + &term.scale(p_i);
        }
        let root_to_infinity = match c.is_zero() {
            true => false,
            false => self.eval(&(-d / c.clone())).is_zero(),
        };
        Ok(MobiusTransport {
            poly: out,
            root_to_infinity,
            infinity_image: m.apply(&P1Value::Infinity),
        })
    }

    /// Resultant of `self` and `other` with their actual degrees.
    pub fn resultant(&self, other: &UniPoly) -> Rational {
        sylvester_resultant(&self.coeffs, &other.coeffs)
    }

    /// The unique polynomial of degree `< points.len()` through the given
    /// nodes (which must be distinct).
    pub fn interpolate(points: &[(Rational, Rational)]) -> UniPoly {
        let mut out = UniPoly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = UniPoly::one();
            let mut denom = Rational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = &basis * &UniPoly::linear_root(xj);
                    denom = denom * (xi - xj);
                }
            }
            out = &out + &basis.scale(&(yi / &denom));
        }
        out
    }
}

/// Determinant of the Sylvester matrix of two coefficient vectors (constant
/// term first). The formal degrees are `f.len() - 1` and `g.len() - 1`, so a
/// vanishing leading entry is allowed. Either side empty gives zero.
pub fn sylvester_resultant(f: &[Rational], g: &[Rational]) -> Rational {
    if f.is_empty() || g.is_empty() {
        return Rational::zero();
    }
    let (m, n) = (f.len() - 1, g.len() - 1);
    if m == 0 {
        return f[0].pow(n as u32);
    }
    if n == 0 {
        return g[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![Rational::zero(); size]; size];
    // Rows hold coefficients from the leading term down.
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    determinant(mat)
}

/// Exact determinant by Gaussian elimination over ℚ.
pub fn determinant(mut mat: Vec<Vec<Rational>>) -> Rational {
    let n = mat.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            mat.swap(pivot, col);
            det = -det;
        }
        let p = mat[col][col].clone();
        det = det * &p;
        for r in col + 1..n {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] / &p;
            let (upper, lower) = mat.split_at_mut(r);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst = &*dst - &(&factor * src);
            }
        }
    }
    det
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
                if i > 0 {
                    f.write_str("*")?;
                }
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Vec::<Rational>::deserialize(deserializer).map(UniPoly::new)
    }
}

/// Rational roots of a squarefree integer polynomial with nonzero constant
/// term, by the rational root theorem. Candidates `u/v` must satisfy
/// `(v − u) | p(1)` and `(v + u) | p(−1)`; each root found is divided out,
/// which shrinks the remaining candidates.
fn integer_root_search(mut p: Vec<BigInt>) -> Vec<Rational> {
    let mut found = Vec::new();
    if p.len() < 2 || p[0].is_zero() {
        return found;
    }
    let num_divs = divisors(&p[0]);
    let den_divs = divisors(p.last().expect("nonempty"));
    'outer: loop {
        if p.len() <= 1 {
            break;
        }
        let at_one: BigInt = p.iter().sum();
        let at_minus_one: BigInt = p
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
            .sum();
        let (a0, an) = (p[0].clone(), p.last().expect("nonempty").clone());
        for v in den_divs.iter().filter(|v| an.is_multiple_of(v)) {
            for u in num_divs.iter().filter(|u| a0.is_multiple_of(u)) {
                if !u.gcd(v).is_one() {
                    continue;
                }
                for cand in [u.clone(), -u] {
                    let divides = |d: BigInt, n: &BigInt| {
                        if d.is_zero() {
                            n.is_zero()
                        } else {
                            n.is_multiple_of(&d)
                        }
                    };
                    if !divides(v - &cand, &at_one) || !divides(v + &cand, &at_minus_one) {
                        continue;
                    }
                    if let Some(quot) = deflate(&p, &cand, v) {
                        found.push(Rational::new(cand, v.clone()).expect("nonzero"));
                        p = quot;
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    found
}

/// `p / (v·t − u)` when the division is exact over ℤ.
fn deflate(p: &[BigInt], u: &BigInt, v: &BigInt) -> Option<Vec<BigInt>> {
    // synthetic division from the top: p = (v t − u)·q
    let n = p.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut carry = BigInt::zero();
    for k in (1..=n).rev() {
        let c = &p[k] + &carry;
        let (qk, rem) = c.div_rem(v);
        if !rem.is_zero() {
            return None;
        }
        carry = u * &qk;
        q[k - 1] = qk;
    }
    (&p[0] + &carry).is_zero().then_some(q)
}
