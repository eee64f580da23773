//! Integer factorization for divisor enumeration.
//!
//! Trial division strips small primes; whatever remains is split with
//! Pollard–Brent rho and certified with Miller–Rabin. The inputs here are
//! constant terms, leading coefficients and discriminants of small models,
//! so this is never the bottleneck.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const TRIAL_LIMIT: u32 = 1 << 12;
const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Prime factorization of `|n|` as prime → exponent. Empty for 0 and ±1.
pub fn factorize(n: &BigInt) -> BTreeMap<BigUint, u32> {
    let mut out = BTreeMap::new();
    let mut m = n.magnitude().clone();
    if m.is_zero() {
        return out;
    }
    let mut p = 2u32;
    while p < TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            m /= &bp;
            *out.entry(bp.clone()).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        split_large(m, &mut out);
    }
    out
}

fn split_large(m: BigUint, out: &mut BTreeMap<BigUint, u32>) {
    if m.is_one() {
        return;
    }
    if is_probable_prime(&m) {
        *out.entry(m).or_insert(0) += 1;
        return;
    }
    if let Some(r) = perfect_square_root(&m) {
        let mut sub = BTreeMap::new();
        split_large(r, &mut sub);
        for (p, e) in sub {
            *out.entry(p).or_insert(0) += 2 * e;
        }
        return;
    }
    let d = pollard_brent(&m);
    split_large(m.clone() / &d, out);
    split_large(d, out);
}

fn perfect_square_root(m: &BigUint) -> Option<BigUint> {
    let r = m.sqrt();
    (&r * &r == *m).then_some(r)
}

pub(crate) fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigUint::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'outer: for &w in &WITNESSES {
        let mut x = BigUint::from(w).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Returns a nontrivial factor of the odd composite `n`.
fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}

/// All positive divisors of `|n|` in increasing order. `n` must be nonzero.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    debug_assert!(!n.is_zero());
    let mut divs = vec![BigInt::one()];
    for (p, e) in factorize(n) {
        let p = BigInt::from(p);
        let current = divs.clone();
        let mut pk = BigInt::one();
        for _ in 0..e {
            pk *= &p;
            divs.extend(current.iter().map(|d| d * &pk));
        }
    }
    divs.sort();
    divs
}

/// Positive integers `y` with `y² | n`, in increasing order. `n` must be nonzero.
pub fn square_divisor_roots(n: &BigInt) -> Vec<BigInt> {
    let mut roots = vec![BigInt::one()];
    for (p, e) in factorize(n) {
        let p = BigInt::from(p);
        let current = roots.clone();
        let mut pk = BigInt::one();
        for _ in 0..e / 2 {
            pk *= &p;
            roots.extend(current.iter().map(|d| d * &pk));
        }
    }
    roots.sort();
    roots
}

/// Exact integer square root of a nonnegative integer, if it is a perfect square.
pub fn integer_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}
