//! Polynomials in the chamber parameter and truncated power series.
//!
//! [`SymbolicPoly`] is a polynomial in the components of the target vector
//! (the `a_i` appearing in closed formulas) with coefficients in a
//! cyclotomic field.  [`TruncSeries`] is a multivariate power series in the
//! dual variables `z_1..z_n`, truncated at a total degree, whose
//! coefficients are symbolic polynomials.  Residue extraction multiplies a
//! handful of these and reads off one homogeneous layer.

use crate::cyclotomic::{inv_one_minus_root, CycNumber};
use crate::error::Result;
use crate::linalg::Rat;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;

pub fn factorial(k: u32) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=k as u64 {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}

/// A polynomial in `nvars` commuting variables over a cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, CycNumber>,
}

impl SymbolicPoly {
    pub fn zero(nvars: usize) -> Self {
        SymbolicPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: CycNumber) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn constant_rat(nvars: usize, r: Rat) -> Self {
        Self::constant(nvars, CycNumber::from_rat(r))
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, CycNumber::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut key = vec![0; nvars];
        key[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(key, CycNumber::one());
        p
    }

    /// `Σ coeffs[i]·x_i`.
    pub fn linear(coeffs: &[Rat]) -> Self {
        let mut p = Self::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut key = vec![0; coeffs.len()];
                key[i] = 1;
                p.terms.insert(key, CycNumber::from_rat(c.clone()));
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, CycNumber> {
        &self.terms
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    fn widen(&self, nvars: usize) -> Self {
        if nvars == self.nvars {
            return self.clone();
        }
        assert!(nvars > self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut key = k.clone();
                key.resize(nvars, 0);
                (key, c.clone())
            })
            .collect();
        SymbolicPoly { nvars, terms }
    }

    fn insert_add(terms: &mut BTreeMap<Vec<u32>, CycNumber>, key: Vec<u32>, val: CycNumber) {
        if val.is_zero() {
            return;
        }
        match terms.get_mut(&key) {
            Some(c) => {
                let s = c.add(&val);
                if s.is_zero() {
                    terms.remove(&key);
                } else {
                    *c = s;
                }
            }
            None => {
                terms.insert(key, val);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.nvars.max(other.nvars);
        let mut out = self.widen(n);
        let other = other.widen(n);
        for (k, v) in other.terms {
            Self::insert_add(&mut out.terms, k, v);
        }
        out
    }

    pub fn neg(&self) -> Self {
        SymbolicPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.nvars.max(other.nvars);
        let a = self.widen(n);
        let b = other.widen(n);
        let mut out = Self::zero(n);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                Self::insert_add(&mut out.terms, key, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        SymbolicPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul(c))).collect(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&CycNumber::from_rat(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> CycNumber {
        assert_eq!(point.len(), self.nvars);
        let mut acc = CycNumber::zero();
        for (k, c) in &self.terms {
            let mut m = BigRational::one();
            for (i, &e) in k.iter().enumerate() {
                for _ in 0..e {
                    m *= &point[i];
                }
            }
            acc = acc.add(&c.scale(&m));
        }
        acc
    }

    /// Substitutes `x = t·x0`, producing a univariate polynomial in `t`.
    pub fn restrict_to_ray(&self, x0: &[Rat]) -> Self {
        assert_eq!(x0.len(), self.nvars);
        let mut out = Self::zero(1);
        for (k, c) in &self.terms {
            let mut m = BigRational::one();
            let mut deg = 0u32;
            for (i, &e) in k.iter().enumerate() {
                deg += e;
                for _ in 0..e {
                    m *= &x0[i];
                }
            }
            Self::insert_add(&mut out.terms, vec![deg], c.scale(&m));
        }
        out
    }

    /// `Some` iff every coefficient is rational.
    pub fn rational_coeffs(&self) -> Option<BTreeMap<Vec<u32>, Rat>> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.terms {
            out.insert(k.clone(), c.as_rational()?);
        }
        Some(out)
    }

    /// Deterministic plain-text rendering with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in &self.terms {
            let mono = render_monomial(k, names);
            let (sign, body) = render_coeff(c, !mono.is_empty());
            if out.is_empty() {
                if sign < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if sign < 0 { " - " } else { " + " });
            }
            match (body.is_empty(), mono.is_empty()) {
                (true, true) => out.push('1'),
                (true, false) => out.push_str(&mono),
                (false, true) => out.push_str(&body),
                (false, false) => {
                    out.push_str(&body);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

fn render_monomial(k: &[u32], names: &[String]) -> String {
    let mut parts = vec![];
    for (i, &e) in k.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Returns (sign, body); body empty means "coefficient 1" (caller prints the
/// monomial alone).  Non-rational coefficients render parenthesized with the
/// root of unity written `w{order}`.
fn render_coeff(c: &CycNumber, has_mono: bool) -> (i32, String) {
    if let Some(r) = c.as_rational() {
        let sign = if r.is_negative() { -1 } else { 1 };
        let a = r.abs();
        if a.is_one() && has_mono {
            return (sign, String::new());
        }
        return (sign, format!("{}", a));
    }
    let m = c.order();
    let mut inner = String::new();
    for (e, v) in c.coeffs().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let root = match e {
            0 => String::new(),
            1 => format!("w{}", m),
            _ => format!("w{}^{}", m, e),
        };
        let a = v.abs();
        let body = if a.is_one() && !root.is_empty() {
            root
        } else if root.is_empty() {
            format!("{}", a)
        } else {
            format!("{}*{}", a, root)
        };
        if inner.is_empty() {
            if v.is_negative() {
                inner.push('-');
            }
        } else {
            inner.push_str(if v.is_negative() { " - " } else { " + " });
        }
        inner.push_str(&body);
    }
    (1, format!("({})", inner))
}

/// Truncated power series in `nvars` variables: total degree ≤ `max_deg`.
#[derive(Clone, Debug)]
pub struct TruncSeries {
    nvars: usize,
    max_deg: u32,
    terms: BTreeMap<Vec<u32>, SymbolicPoly>,
}

impl TruncSeries {
    pub fn zero(nvars: usize, max_deg: u32) -> Self {
        TruncSeries { nvars, max_deg, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize, max_deg: u32) -> Self {
        let mut s = Self::zero(nvars, max_deg);
        s.terms.insert(vec![0; nvars], SymbolicPoly::one(0));
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_deg(&self) -> u32 {
        self.max_deg
    }

    pub fn coeff(&self, key: &[u32]) -> Option<&SymbolicPoly> {
        self.terms.get(key)
    }

    fn insert_add(&mut self, key: Vec<u32>, val: SymbolicPoly) {
        if val.is_zero() || key.iter().sum::<u32>() > self.max_deg {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(p) => {
                let s = p.add(&val);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *p = s;
                }
            }
            None => {
                self.terms.insert(key, val);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        out.max_deg = self.max_deg.min(other.max_deg);
        out.terms.retain(|k, _| k.iter().sum::<u32>() <= out.max_deg);
        for (k, v) in &other.terms {
            out.insert_add(k.clone(), v.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars, self.max_deg.min(other.max_deg));
        for (ka, pa) in &self.terms {
            let da: u32 = ka.iter().sum();
            for (kb, pb) in &other.terms {
                let db: u32 = kb.iter().sum();
                if da + db > out.max_deg {
                    continue;
                }
                let key: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                out.insert_add(key, pa.mul(pb));
            }
        }
        out
    }

    pub fn scale(&self, c: &SymbolicPoly) -> Self {
        let mut out = Self::zero(self.nvars, self.max_deg);
        for (k, p) in &self.terms {
            out.insert_add(k.clone(), p.mul(c));
        }
        out
    }

    /// All terms of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> Vec<(Vec<u32>, SymbolicPoly)> {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().sum::<u32>() == d)
            .map(|(k, p)| (k.clone(), p.clone()))
            .collect()
    }

    /// Substitutes `t = ⟨form, z⟩` into a univariate series `Σ c_k t^k`.
    pub fn from_univariate(coeffs: &[CycNumber], form: &[Rat], max_deg: u32) -> Self {
        let nvars = form.len();
        let mut out = Self::zero(nvars, max_deg);
        // powers of the linear form, computed incrementally
        let mut power: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        power.insert(vec![0; nvars], BigRational::one());
        for (k, c) in coeffs.iter().enumerate().take(max_deg as usize + 1) {
            if !c.is_zero() {
                for (key, r) in &power {
                    out.insert_add(
                        key.clone(),
                        SymbolicPoly::constant(0, c.scale(r)),
                    );
                }
            }
            if k as u32 == max_deg {
                break;
            }
            let mut next: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
            for (key, r) in &power {
                for (i, f) in form.iter().enumerate() {
                    if f.is_zero() {
                        continue;
                    }
                    let mut nk = key.clone();
                    nk[i] += 1;
                    let v = r * f;
                    match next.get_mut(&nk) {
                        Some(x) => *x += v,
                        None => {
                            next.insert(nk, v);
                        }
                    }
                }
            }
            power = next;
        }
        out
    }

    /// `exp(⟨x - shift, z⟩)` with `x` left symbolic: the coefficient of
    /// `z^m` is `Π_i (x_i - shift_i)^{m_i} / m_i!`.
    pub fn exp_symbolic(shift: &[Rat], max_deg: u32) -> Self {
        let n = shift.len();
        // (x_i - shift_i)^e for e = 0..max_deg, per variable
        let mut pows: Vec<Vec<SymbolicPoly>> = Vec::with_capacity(n);
        for i in 0..n {
            let base = SymbolicPoly::var(n, i)
                .sub(&SymbolicPoly::constant_rat(n, shift[i].clone()));
            let mut list = vec![SymbolicPoly::one(n)];
            for e in 1..=max_deg as usize {
                list.push(list[e - 1].mul(&base));
            }
            pows.push(list);
        }
        let mut out = Self::zero(n, max_deg);
        let mut key = vec![0u32; n];
        loop {
            let deg: u32 = key.iter().sum();
            if deg <= max_deg {
                let mut p = SymbolicPoly::one(n);
                let mut denom = BigRational::one();
                for (i, &e) in key.iter().enumerate() {
                    p = p.mul(&pows[i][e as usize]);
                    denom *= factorial(e);
                }
                out.insert_add(key.clone(), p.scale_rat(&denom.recip()));
            }
            // advance the exponent vector through the degree-bounded box
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                key[i] += 1;
                if key[i] as u32 <= max_deg && key.iter().sum::<u32>() <= max_deg {
                    break;
                }
                key[i] = 0;
                i += 1;
            }
        }
    }
}

/// Coefficients of `(t/(1 - e^{-t}))^h` up to degree `max_deg`.
pub fn todd_series(h: u32, max_deg: u32) -> Vec<Rat> {
    // invert g(t) = (1 - e^{-t})/t = Σ (-1)^k t^k/(k+1)!
    let g: Vec<Rat> = (0..=max_deg)
        .map(|k| {
            let s = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            s / factorial(k + 1)
        })
        .collect();
    let inv = invert_series_rat(&g);
    pow_series_rat(&inv, h)
}

fn invert_series_rat(s: &[Rat]) -> Vec<Rat> {
    let a0 = s[0].recip();
    let mut out = vec![a0.clone()];
    for k in 1..s.len() {
        let mut acc = BigRational::zero();
        for j in 1..=k {
            acc += &s[j] * &out[k - j];
        }
        out.push(-acc * &a0);
    }
    out
}

fn pow_series_rat(s: &[Rat], e: u32) -> Vec<Rat> {
    let n = s.len();
    let mut acc = vec![BigRational::zero(); n];
    acc[0] = BigRational::one();
    for _ in 0..e {
        let mut next = vec![BigRational::zero(); n];
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in s.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                let v = &next[i + j] + x * y;
                next[i + j] = v;
            }
        }
        acc = next;
    }
    acc
}

/// Coefficients of `(1 - ζ e^{-t})^{-h}` where `ζ = exp(2πi·exponent) ≠ 1`.
pub fn twisted_inverse_series(exponent: &Rat, h: u32, max_deg: u32) -> Result<Vec<CycNumber>> {
    let zeta = CycNumber::root_of_unity_rat(exponent);
    // s(t) = 1 - ζ e^{-t}: s_0 = 1 - ζ, s_k = ζ·(-1)^{k+1}/k!
    let mut s = vec![CycNumber::one().sub(&zeta)];
    for k in 1..=max_deg {
        let sign = if k % 2 == 1 { BigRational::one() } else { -BigRational::one() };
        s.push(zeta.scale(&(sign / factorial(k))));
    }
    let den = r_den(exponent);
    let num = r_num_mod(exponent);
    let a0 = inv_one_minus_root(num, den)?;
    let mut inv = vec![a0.clone()];
    for k in 1..s.len() {
        let mut acc = CycNumber::zero();
        for j in 1..=k {
            acc = acc.add(&s[j].mul(&inv[k - j]));
        }
        inv.push(acc.neg().mul(&a0));
    }
    // h-th power
    let mut acc = vec![CycNumber::zero(); inv.len()];
    acc[0] = CycNumber::one();
    for _ in 0..h {
        let mut next = vec![CycNumber::zero(); inv.len()];
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in inv.iter().enumerate() {
                if i + j >= next.len() {
                    break;
                }
                let v = next[i + j].add(&x.mul(y));
                next[i + j] = v;
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn r_den(r: &Rat) -> u64 {
    use num::ToPrimitive;
    r.denom().to_u64().expect("root order fits in u64")
}

fn r_num_mod(r: &Rat) -> i64 {
    use num::{Integer, ToPrimitive};
    r.numer().mod_floor(r.denom()).to_i64().unwrap()
}
