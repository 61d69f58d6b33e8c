//! Exact arithmetic in cyclotomic fields `Q(ζ_M)`.
//!
//! A [`CycNumber`] is a polynomial in `ζ_M = exp(2πi/M)` with rational
//! coefficients, kept reduced modulo the `M`-th cyclotomic polynomial, so
//! the representation at a fixed order is unique.  Numbers of different
//! orders mix by promotion into the least common multiple order; promotion
//! is lazy, so arithmetic among low-order values never pays for a large
//! field.

use crate::error::{Error, Result};
use crate::linalg::{Rat, Int};
use num::complex::Complex64;
use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex};

static CYC_POLY_CACHE: Lazy<Mutex<HashMap<u64, Arc<Vec<Int>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut phi = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Monic integer coefficients of the `m`-th cyclotomic polynomial,
/// ascending degree.  Computed by dividing `x^m - 1` by the cyclotomic
/// polynomials of the proper divisors; memoized.
pub fn cyclotomic_poly(m: u64) -> Arc<Vec<Int>> {
    if let Some(p) = CYC_POLY_CACHE.lock().unwrap().get(&m) {
        return p.clone();
    }
    let poly = if m == 1 {
        vec![-BigInt::one(), BigInt::one()]
    } else {
        let mut num = vec![BigInt::zero(); m as usize + 1];
        num[0] = -BigInt::one();
        num[m as usize] = BigInt::one();
        for d in 1..m {
            if m % d == 0 {
                let phi_d = cyclotomic_poly(d);
                num = int_poly_div_exact(&num, &phi_d);
            }
        }
        num
    };
    let arc = Arc::new(poly);
    CYC_POLY_CACHE.lock().unwrap().insert(m, arc.clone());
    arc
}

/// Exact division of integer polynomials with monic divisor.
fn int_poly_div_exact(num: &[Int], den: &[Int]) -> Vec<Int> {
    let dn = den.len() - 1;
    debug_assert!(den[dn].is_one());
    let mut rem = num.to_vec();
    let qd = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let v = &rem[k + i] - &c * d;
            rem[k + i] = v;
        }
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    quot
}

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().map_or(false, |x| x.is_zero()) {
        v.pop();
    }
    v
}

/// Remainder of a rational polynomial modulo a monic integer polynomial.
fn reduce_mod(poly: Vec<Rat>, modulus: &[Int]) -> Vec<Rat> {
    let dn = modulus.len() - 1;
    let mut rem = poly;
    while rem.len() > dn {
        let c = rem.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let k = rem.len() - dn;
        for (i, m) in modulus.iter().take(dn).enumerate() {
            let v = &rem[k + i] - &c * BigRational::from_integer(m.clone());
            rem[k + i] = v;
        }
    }
    trim(rem)
}

/// An element of `Q(ζ_order)`.
#[derive(Clone, Debug)]
pub struct CycNumber {
    order: u64,
    /// ascending powers of ζ, degree < φ(order), trailing zeros trimmed
    coeffs: Vec<Rat>,
}

impl CycNumber {
    pub fn zero() -> Self {
        CycNumber { order: 1, coeffs: vec![] }
    }

    pub fn one() -> Self {
        CycNumber { order: 1, coeffs: vec![BigRational::one()] }
    }

    pub fn from_rat(r: Rat) -> Self {
        if r.is_zero() {
            Self::zero()
        } else {
            CycNumber { order: 1, coeffs: vec![r] }
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rat(BigRational::from_integer(BigInt::from(v)))
    }

    /// `ζ_den^num`, i.e. `exp(2πi num/den)`.
    pub fn root_of_unity(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let e = BigInt::from(num).mod_floor(&BigInt::from(den));
        let e = e.to_u64().unwrap();
        let mut poly = vec![BigRational::zero(); e as usize + 1];
        poly[e as usize] = BigRational::one();
        let red = reduce_mod(poly, &cyclotomic_poly(den));
        CycNumber { order: den, coeffs: red }.normalized()
    }

    /// `exp(2πi r)` for rational `r`.
    pub fn root_of_unity_rat(r: &Rat) -> Self {
        let den = r.denom().to_u64().expect("order fits in u64");
        let num = r.numer().mod_floor(r.denom()).to_i64().unwrap();
        Self::root_of_unity(num, den)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Drops to order 1 when the value is rational, so common values stay
    /// cheap to combine.
    fn normalized(self) -> Self {
        if self.order > 1 && self.coeffs.len() <= 1 {
            CycNumber { order: 1, coeffs: self.coeffs }
        } else {
            self
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `Some(r)` iff the value lies in `Q`.
    pub fn as_rational(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Embeds into `Q(ζ_target)`; `order` must divide `target`.
    pub fn promote(&self, target: u64) -> Self {
        assert_eq!(target % self.order, 0, "promotion needs order | target");
        if target == self.order {
            return self.clone();
        }
        let k = (target / self.order) as usize;
        let mut poly = vec![BigRational::zero(); self.coeffs.len() * k];
        for (e, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if poly.len() <= e * k {
                    poly.resize(e * k + 1, BigRational::zero());
                }
                poly[e * k] = c.clone();
            }
        }
        let red = reduce_mod(poly, &cyclotomic_poly(target));
        CycNumber { order: target, coeffs: red }
    }

    fn common(&self, other: &Self) -> (Self, Self, u64) {
        let m = self.order.lcm(&other.order);
        (self.promote(m), other.promote(m), m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, m) = self.common(other);
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in a.coeffs.iter().enumerate() {
            out[i] = c.clone();
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            let v = &out[i] + c;
            out[i] = v;
        }
        CycNumber { order: m, coeffs: trim(out) }.normalized()
    }

    pub fn neg(&self) -> Self {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (a, b, m) = self.common(other);
        let mut prod =
            vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let v = &prod[i + j] + x * y;
                prod[i + j] = v;
            }
        }
        let red = reduce_mod(prod, &cyclotomic_poly(m));
        CycNumber { order: m, coeffs: red }.normalized()
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the cyclotomic polynomial.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rat(r.recip()));
        }
        let modulus: Vec<Rat> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, s) = poly_ext_gcd(&self.coeffs, &modulus);
        // the modulus is irreducible over Q, so the gcd is a nonzero constant
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        let coeffs: Vec<Rat> = s.iter().map(|c| c * &ginv).collect();
        let red = reduce_mod(coeffs, &cyclotomic_poly(self.order));
        Ok(CycNumber { order: self.order, coeffs: red }.normalized())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Complex conjugate: `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.order;
        let mut poly: Vec<Rat> = vec![BigRational::zero(); m as usize];
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = ((m as usize) - e) % m as usize;
            let v = &poly[idx] + c;
            poly[idx] = v;
        }
        let red = reduce_mod(poly, &cyclotomic_poly(m));
        CycNumber { order: m, coeffs: red }.normalized()
    }

    /// Floating-point embedding sending `ζ_M` to `exp(2πi/M)`.
    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = TAU * (e as f64) / (self.order as f64);
            acc += Complex64::from_polar(1.0, angle)
                * c.to_f64().expect("coefficient fits in f64");
        }
        acc
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNumber {}

/// `1/(1 - ζ_m^k)` without a general field inversion.  Works modulo
/// `x^{m'} - 1` using the product of `1 - ζ^t` over the primitive residues
/// `t ≠ k'`, whose full product is the cyclotomic polynomial evaluated at 1.
pub fn inv_one_minus_root(k: i64, m: u64) -> Result<CycNumber> {
    let kk = BigInt::from(k).mod_floor(&BigInt::from(m)).to_u64().unwrap();
    if kk == 0 {
        return Err(Error::DivisionByZero);
    }
    let d = kk.gcd(&m);
    let m1 = m / d;
    let k1 = kk / d;
    // numerator product in Z[x]/(x^{m1} - 1)
    let mut prod = vec![BigInt::zero(); m1 as usize];
    prod[0] = BigInt::one();
    for t in 1..m1 {
        if t.gcd(&m1) != 1 || t == k1 {
            continue;
        }
        let mut next = vec![BigInt::zero(); m1 as usize];
        for (e, c) in prod.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[e] = &next[e] + c;
            let shifted = (e + t as usize) % m1 as usize;
            next[shifted] = &next[shifted] - c;
        }
        prod = next;
    }
    let phi_at_one: Int = cyclotomic_poly(m1).iter().fold(BigInt::zero(), |a, c| a + c);
    debug_assert!(!phi_at_one.is_zero());
    let scale = BigRational::from_integer(phi_at_one).recip();
    let poly: Vec<Rat> = prod
        .into_iter()
        .map(|c| BigRational::from_integer(c) * &scale)
        .collect();
    let red = reduce_mod(poly, &cyclotomic_poly(m1));
    Ok(CycNumber { order: m1, coeffs: red }.normalized())
}

/// Extended gcd of rational polynomials: returns `(g, s)` with
/// `s·a ≡ g (mod b)` and `g` the gcd.
fn poly_ext_gcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut old_r = trim(a.to_vec());
    let mut r = trim(b.to_vec());
    let mut old_s = vec![BigRational::one()];
    let mut s: Vec<Rat> = vec![];
    while !r.is_empty() {
        let (q, rem) = poly_divrem(&old_r, &r);
        old_r = r;
        r = rem;
        let qs = poly_mul(&q, &s);
        let new_s = poly_sub(&old_s, &qs);
        old_s = s;
        s = new_s;
    }
    (old_r, old_s)
}

fn poly_divrem(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dn = den.len() - 1;
    let lead = den[dn].recip();
    let mut rem = num.to_vec();
    if rem.len() <= dn {
        return (vec![], trim(rem));
    }
    let qd = rem.len() - 1 - dn;
    let mut quot = vec![BigRational::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = &rem[k + dn] * &lead;
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let v = &rem[k + i] - &c * d;
            rem[k + i] = v;
        }
    }
    rem.truncate(dn);
    (trim(quot), trim(rem))
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let v = &out[i + j] + x * y;
            out[i + j] = v;
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        let v = &out[i] - y;
        out[i] = v;
    }
    trim(out)
}
