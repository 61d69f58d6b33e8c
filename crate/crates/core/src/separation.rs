//! Admissible partial fractions for periodic meromorphic functions.
//!
//! A [`MeroFunction`] is a finite sum of exponentials `e^{<ξ,z>}` over a
//! common denominator `∏ (1 - u e^{<β,z>})` with roots of unity `u`.  Its
//! box is the polytope of directions `μ` for which `e^{s<μ,v>} F(z + sv)`
//! stays bounded as `s → ∞`, read off any presentation as the set of `μ`
//! with `μ + ξ ∈ Σ [0,1]β` for every numerator exponent `ξ`.
//!
//! [`admissible_decompose`] rewrites a function as a sum of terms whose
//! denominator directions are linearly independent, keeping a chosen `μ`
//! inside the box of every term, so that coefficient extraction can be done
//! term by term.  The rewriting uses three exact identities: the flip
//! `1/(1-ue^β) = -u⁻¹e^{-β}/(1-u⁻¹e^{-β})`, the geometric rescale
//! `1/(1-ue^β) = (Σ_{t<ρ} uᵗe^{tβ})/(1-u^ρe^{ρβ})`, and the split of
//! [`crucial_split`] that trades one factor of a dependent set for the
//! factor carrying the sum of their exponents.

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::linalg::{
    feasible, frac, int_to_rat, primitive, primitive_int, rat, IntVec, LinearSystem, Rat,
    RatMat, RatVec,
};
use itertools::Itertools;
use num::complex::Complex64;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// `Σ c e^{<ξ,z>} / ∏ (1 - u e^{<β,z>})`.
///
/// Numerator terms are combined by exponent and kept sorted; the denominator
/// is an ordered multiset, repeated factors standing for powers.
#[derive(Clone, Debug, PartialEq)]
pub struct MeroFunction {
    nvars: usize,
    terms: Vec<(CycNumber, IntVec)>,
    denominator: Vec<(CycNumber, IntVec)>,
}

impl MeroFunction {
    pub fn new(
        nvars: usize,
        terms: Vec<(CycNumber, IntVec)>,
        denominator: Vec<(CycNumber, IntVec)>,
    ) -> Result<Self> {
        for (_, xi) in &terms {
            if xi.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: xi.len() });
            }
        }
        for (u, beta) in &denominator {
            if beta.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: beta.len() });
            }
            if u.is_zero() {
                return Err(Error::Invalid("zero coefficient in a denominator factor".into()));
            }
            if beta.iter().all(|x| x.is_zero()) {
                return Err(Error::Invalid("zero exponent in a denominator factor".into()));
            }
        }
        let mut combined: BTreeMap<IntVec, CycNumber> = BTreeMap::new();
        for (c, xi) in terms {
            let entry = combined.entry(xi).or_insert_with(CycNumber::zero);
            *entry = entry.add(&c);
        }
        let terms = combined
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(xi, c)| (c, xi))
            .collect();
        Ok(MeroFunction { nvars, terms, denominator })
    }

    /// `1 / ∏ (1 - u e^{<β,z>})`
    pub fn reciprocal(nvars: usize, denominator: Vec<(CycNumber, IntVec)>) -> Result<Self> {
        let one = vec![(CycNumber::one(), vec![BigInt::zero(); nvars])];
        MeroFunction::new(nvars, one, denominator)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(CycNumber, IntVec)] {
        &self.terms
    }

    pub fn denominator(&self) -> &[(CycNumber, IntVec)] {
        &self.denominator
    }

    pub fn scaled(&self, c: &CycNumber) -> Self {
        let terms = self.terms.iter().map(|(a, xi)| (a.mul(c), xi.clone())).collect();
        MeroFunction { nvars: self.nvars, terms, denominator: self.denominator.clone() }
    }

    pub fn to_complex(&self, z: &[Complex64]) -> Complex64 {
        let num: Complex64 =
            self.terms.iter().map(|(c, xi)| c.to_complex() * exp_pairing(xi, z)).sum();
        let den: Complex64 = self
            .denominator
            .iter()
            .map(|(u, beta)| Complex64::new(1.0, 0.0) - u.to_complex() * exp_pairing(beta, z))
            .product();
        num / den
    }
}

fn exp_pairing(exps: &[BigInt], z: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (e, zi) in exps.iter().zip(z) {
        s += e.to_f64().expect("small exponent") * zi;
    }
    s.exp()
}

/// A feasible `t` with `Σ t_i β_i = target` and `0 ≤ t_i ≤ 1` (open bounds
/// when `strict`).
fn box_certificate(
    factors: &[(CycNumber, IntVec)],
    target: &[Rat],
    strict: bool,
) -> Option<RatVec> {
    let r = factors.len();
    let mut sys = LinearSystem::new(r);
    for (j, t) in target.iter().enumerate() {
        let row: RatVec = factors
            .iter()
            .map(|(_, beta)| BigRational::from_integer(beta[j].clone()))
            .collect();
        sys.eq(row, t.clone());
    }
    for i in 0..r {
        let mut e = vec![BigRational::zero(); r];
        e[i] = BigRational::one();
        if strict {
            sys.gt(e.clone(), rat(0));
            sys.lt(e, rat(1));
        } else {
            sys.ge(e.clone(), rat(0));
            sys.le(e, rat(1));
        }
    }
    feasible(&sys)
}

fn box_test(f: &MeroFunction, mu: &[Rat], strict: bool) -> bool {
    debug_assert_eq!(mu.len(), f.nvars);
    f.terms.iter().all(|(_, xi)| {
        let target: RatVec = mu
            .iter()
            .zip(xi)
            .map(|(m, x)| m + BigRational::from_integer(x.clone()))
            .collect();
        box_certificate(&f.denominator, &target, strict).is_some()
    })
}

/// Whether `μ + ξ ∈ Σ [0,1]β` for every numerator exponent `ξ`.
pub fn box_membership(f: &MeroFunction, mu: &[Rat]) -> bool {
    box_test(f, mu, false)
}

/// The strict variant: every certificate coordinate in the open interval.
pub fn box_interior(f: &MeroFunction, mu: &[Rat]) -> bool {
    box_test(f, mu, true)
}

/// Splits a single-exponential function along the relation
/// `α₀ = -(α_1 + ⋯ + α_r)` over all of its denominator factors: one summand
/// per factor, that factor replaced by `(1 - u_1⋯u_r e^{-α₀})`, earlier
/// factors flipped, with alternating signs.  Factors are ordered by the box
/// certificate of `μ`, ties by position.  Every returned term keeps `μ` in
/// its box.
///
/// When `α₀ = 0` the replacement factor is the constant `1 - u_1⋯u_r`, which
/// folds into the coefficient; this needs `u_1⋯u_r ≠ 1`.
pub fn crucial_split(f: &MeroFunction, mu: &[Rat]) -> Result<Vec<MeroFunction>> {
    if mu.len() != f.nvars {
        return Err(Error::DimensionMismatch { expected: f.nvars, got: mu.len() });
    }
    if f.terms.len() != 1 {
        return Err(Error::Invalid("the split needs a single numerator exponential".into()));
    }
    if f.denominator.is_empty() {
        return Err(Error::Invalid("the split needs at least one denominator factor".into()));
    }
    let xi = &f.terms[0].1;
    let target: RatVec = mu
        .iter()
        .zip(xi)
        .map(|(m, x)| m + BigRational::from_integer(x.clone()))
        .collect();
    let cert = box_certificate(&f.denominator, &target, false)
        .ok_or_else(|| Error::Invalid("the point lies outside the box of the function".into()))?;
    let mut order: Vec<usize> = (0..f.denominator.len()).collect();
    order.sort_by(|&a, &b| cert[a].cmp(&cert[b]).then(a.cmp(&b)));
    apply_crucial(f, &order)
}

/// The split above, applied to the factors listed in `parts` (already
/// certificate-sorted) while the remaining factors ride along untouched.
fn apply_crucial(f: &MeroFunction, parts: &[usize]) -> Result<Vec<MeroFunction>> {
    let (c, xi) = &f.terms[0];
    let n = f.nvars;
    let mut merged = vec![BigInt::zero(); n];
    let mut uprod = CycNumber::one();
    for &i in parts {
        let (u, beta) = &f.denominator[i];
        for (m, b) in merged.iter_mut().zip(beta) {
            *m += b;
        }
        uprod = uprod.mul(u);
    }
    let fold = if merged.iter().all(|x| x.is_zero()) {
        if uprod.is_one() {
            return Err(Error::DegenerateRelation);
        }
        Some(CycNumber::one().sub(&uprod).inv()?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(parts.len());
    for k in 0..parts.len() {
        let mut coeff = if k % 2 == 0 { c.clone() } else { c.neg() };
        let mut den: Vec<(CycNumber, IntVec)> = Vec::with_capacity(f.denominator.len());
        match &fold {
            Some(inv) => coeff = coeff.mul(inv),
            None => den.push((uprod.clone(), merged.clone())),
        }
        for (j, &i) in parts.iter().enumerate() {
            let (u, beta) = &f.denominator[i];
            match j.cmp(&k) {
                std::cmp::Ordering::Less => {
                    den.push((u.inv()?, beta.iter().map(|x| -x.clone()).collect()))
                }
                std::cmp::Ordering::Greater => den.push((u.clone(), beta.clone())),
                std::cmp::Ordering::Equal => {}
            }
        }
        for (i, fac) in f.denominator.iter().enumerate() {
            if !parts.contains(&i) {
                den.push(fac.clone());
            }
        }
        out.push(MeroFunction::new(n, vec![(coeff, xi.clone())], den)?);
    }
    Ok(out)
}

/// One term of a finished decomposition: a single exponential over powers of
/// factors with linearly independent directions `σ`.
#[derive(Clone, Debug)]
pub struct AdmissibleTerm {
    /// the distinct denominator directions, in order of first appearance
    pub directions: Vec<IntVec>,
    pub function: MeroFunction,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// The point the terms are admissible for.  It differs from the
    /// requested one only when that point sits in special position (some
    /// term's box touches it on the boundary); then a nearby interior point
    /// is substituted and reported here.
    pub mu: RatVec,
    pub terms: Vec<AdmissibleTerm>,
}

const PERTURB_TRIES: usize = 20;

/// Rewrites `f` as an exact sum of terms with independent denominator
/// directions, each box containing `μ` strictly in its interior.
pub fn admissible_decompose(f: &MeroFunction, mu: &[Rat]) -> Result<Decomposition> {
    if mu.len() != f.nvars {
        return Err(Error::DimensionMismatch { expected: f.nvars, got: mu.len() });
    }
    if f.denominator.is_empty() && f.nvars > 0 {
        return Err(Error::EssentialityViolated);
    }
    let rows: Vec<RatVec> = f.denominator.iter().map(|(_, b)| int_to_rat(b)).collect();
    if RatMat::from_rows(rows).rank() < f.nvars {
        return Err(Error::EssentialityViolated);
    }
    if !box_membership(f, mu) {
        return Err(Error::Invalid("the point must lie in the box of the function".into()));
    }
    let center = box_center(f);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ad_1455);
    for attempt in 0..=PERTURB_TRIES {
        let mu_try: RatVec = if attempt == 0 {
            mu.to_vec()
        } else {
            match &center {
                Some(c) => perturbed(mu, c, attempt, &mut rng),
                // a box with empty interior leaves nothing to retry with
                None => break,
            }
        };
        if attempt > 0 && !box_membership(f, &mu_try) {
            continue;
        }
        let pieces = rewrite(f, &mu_try)?;
        if pieces
            .iter()
            .all(|t| distinct_directions(t).len() == f.nvars && box_interior(t, &mu_try))
        {
            let terms = pieces
                .into_iter()
                .map(|p| AdmissibleTerm { directions: distinct_directions(&p), function: p })
                .collect();
            return Ok(Decomposition { mu: mu_try, terms });
        }
    }
    Err(Error::Invalid("the point and its perturbations stay in special position".into()))
}

/// A point strictly inside the box, shared across all numerator exponents.
fn box_center(f: &MeroFunction) -> Option<RatVec> {
    let n = f.nvars;
    let r = f.denominator.len();
    let k = f.terms.len();
    let mut sys = LinearSystem::new(n + k * r);
    for (ti, (_, xi)) in f.terms.iter().enumerate() {
        let base = n + ti * r;
        for j in 0..n {
            let mut row = vec![BigRational::zero(); n + k * r];
            row[j] = -BigRational::one();
            for (i, (_, beta)) in f.denominator.iter().enumerate() {
                row[base + i] = BigRational::from_integer(beta[j].clone());
            }
            sys.eq(row, BigRational::from_integer(xi[j].clone()));
        }
        for i in 0..r {
            let mut e = vec![BigRational::zero(); n + k * r];
            e[base + i] = BigRational::one();
            sys.gt(e.clone(), rat(0));
            sys.lt(e, rat(1));
        }
    }
    feasible(&sys).map(|p| p[..n].to_vec())
}

fn perturbed(mu: &[Rat], center: &[Rat], attempt: usize, rng: &mut ChaCha8Rng) -> RatVec {
    let theta = frac(attempt as i64, PERTURB_TRIES as i64 + 1);
    mu.iter()
        .zip(center)
        .map(|(m, c)| {
            let jig = frac(rng.gen_range(-5i64..=5), 2048);
            m + (c - m) * &theta + jig
        })
        .collect()
}

fn distinct_directions(term: &MeroFunction) -> Vec<IntVec> {
    let mut dirs: Vec<IntVec> = vec![];
    for (_, beta) in &term.denominator {
        if !dirs.contains(beta) {
            dirs.push(beta.clone());
        }
    }
    dirs
}

enum Step {
    Final,
    Split(Vec<MeroFunction>),
}

fn rewrite(f: &MeroFunction, mu: &[Rat]) -> Result<Vec<MeroFunction>> {
    let mut work: Vec<MeroFunction> = f
        .terms
        .iter()
        .map(|(c, xi)| MeroFunction {
            nvars: f.nvars,
            terms: vec![(c.clone(), xi.clone())],
            denominator: f.denominator.clone(),
        })
        .collect();
    let mut done = vec![];
    while let Some(term) = work.pop() {
        if term.terms.is_empty() {
            continue;
        }
        match step(&term, mu)? {
            Step::Final => done.push(term),
            Step::Split(parts) => work.extend(parts),
        }
    }
    Ok(done)
}

/// How many copies of the primitive vector of its line a factor exponent is.
fn signed_length(beta: &IntVec, rep: &IntVec) -> BigInt {
    let j = rep.iter().position(|x| !x.is_zero()).expect("nonzero exponent");
    &beta[j] / &rep[j]
}

/// One rewriting move.  Dependent lines trade a factor along a circuit;
/// independent lines are consolidated (orientation, common multiple, one
/// root of unity per direction) until the term reaches its final form.
fn step(term: &MeroFunction, mu: &[Rat]) -> Result<Step> {
    let mut groups: BTreeMap<IntVec, Vec<usize>> = BTreeMap::new();
    for (i, (_, beta)) in term.denominator.iter().enumerate() {
        groups.entry(primitive_int(beta)).or_default().push(i);
    }
    let reps: Vec<IntVec> = groups.keys().cloned().collect();
    if !reps.is_empty() {
        let m = RatMat::from_rows(reps.iter().map(|r| int_to_rat(r)).collect());
        if m.rank() < reps.len() {
            return circuit_split(term, &groups, &reps, mu).map(Step::Split);
        }
    }
    for (rep, idxs) in &groups {
        for &i in idxs {
            if signed_length(&term.denominator[i].1, rep).is_negative() {
                return Ok(Step::Split(vec![flip(term, i)?]));
            }
        }
        let lens: Vec<BigInt> =
            idxs.iter().map(|&i| signed_length(&term.denominator[i].1, rep)).collect();
        let lcm = lens.iter().fold(BigInt::one(), |a, b| a.lcm(b));
        for (&i, len) in idxs.iter().zip(&lens) {
            if *len != lcm {
                return Ok(Step::Split(rescale(term, i, &(&lcm / len))?));
            }
        }
        let u0 = &term.denominator[idxs[0]].0;
        for &i in &idxs[1..] {
            if term.denominator[i].0 != *u0 {
                return merge_pair(term, idxs[0], i, mu).map(Step::Split);
            }
        }
    }
    Ok(Step::Final)
}

/// `1/(1-ue^β) = -u⁻¹e^{-β}/(1-u⁻¹e^{-β})` applied to one factor.
fn flip(term: &MeroFunction, idx: usize) -> Result<MeroFunction> {
    let (c, xi) = &term.terms[0];
    let (u, beta) = &term.denominator[idx];
    let uinv = u.inv()?;
    let coeff = c.mul(&uinv).neg();
    let shifted: IntVec = xi.iter().zip(beta).map(|(a, b)| a - b).collect();
    let mut den = term.denominator.clone();
    den[idx] = (uinv, beta.iter().map(|x| -x.clone()).collect());
    MeroFunction::new(term.nvars, vec![(coeff, shifted)], den)
}

/// `1/(1-ue^β) = (Σ_{t<ρ} uᵗe^{tβ})/(1-u^ρe^{ρβ})`, one summand per
/// numerator exponential picked up.
fn rescale(term: &MeroFunction, idx: usize, rho: &BigInt) -> Result<Vec<MeroFunction>> {
    let steps = rho.to_usize().ok_or_else(|| Error::Invalid("rescale multiple too large".into()))?;
    let (c, xi) = &term.terms[0];
    let (u, beta) = term.denominator[idx].clone();
    let mut den = term.denominator.clone();
    den[idx] = (u.pow(steps as i64)?, beta.iter().map(|x| x * rho).collect());
    let mut out = Vec::with_capacity(steps);
    let mut coeff = c.clone();
    let mut shift = xi.clone();
    for _ in 0..steps {
        out.push(MeroFunction::new(
            term.nvars,
            vec![(coeff.clone(), shift.clone())],
            den.clone(),
        )?);
        coeff = coeff.mul(&u);
        for (s, b) in shift.iter_mut().zip(&beta) {
            *s += b;
        }
    }
    Ok(out)
}

/// Partial fractions for two factors sharing one exponent vector but with
/// distinct roots of unity.  The two-coordinate certificate sum decides
/// between the direct split and the one with both factors flipped.
fn merge_pair(term: &MeroFunction, i1: usize, i2: usize, mu: &[Rat]) -> Result<Vec<MeroFunction>> {
    let (c, xi) = &term.terms[0];
    let target: RatVec = mu
        .iter()
        .zip(xi)
        .map(|(m, x)| m + BigRational::from_integer(x.clone()))
        .collect();
    let cert = box_certificate(&term.denominator, &target, false)
        .ok_or_else(|| Error::Invalid("box membership lost while rewriting".into()))?;
    let t = &cert[i1] + &cert[i2];
    let (u1, w) = term.denominator[i1].clone();
    let u2 = term.denominator[i2].0.clone();
    let c1 = CycNumber::one().sub(&u2.mul(&u1.inv()?)).inv()?;
    let c2 = CycNumber::one().sub(&u1.mul(&u2.inv()?)).inv()?;
    let without = |skip: usize| -> Vec<(CycNumber, IntVec)> {
        term.denominator
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, f)| f.clone())
            .collect()
    };
    let n = term.nvars;
    if t <= rat(1) {
        Ok(vec![
            MeroFunction::new(n, vec![(c.mul(&c1), xi.clone())], without(i2))?,
            MeroFunction::new(n, vec![(c.mul(&c2), xi.clone())], without(i1))?,
        ])
    } else {
        let shifted: IntVec = xi.iter().zip(&w).map(|(a, b)| a - b).collect();
        Ok(vec![
            MeroFunction::new(
                n,
                vec![(c.mul(&c1).mul(&u1.inv()?).neg(), shifted.clone())],
                without(i1),
            )?,
            MeroFunction::new(n, vec![(c.mul(&c2).mul(&u2.inv()?).neg(), shifted)], without(i2))?,
        ])
    }
}

/// The smallest (then lexicographically first) dependent subset of the line
/// representatives, with the primitive integer relation on it.
fn find_circuit(reps: &[IntVec]) -> Option<(Vec<usize>, Vec<BigInt>)> {
    let n = reps[0].len();
    for size in 2..=reps.len() {
        for combo in (0..reps.len()).combinations(size) {
            let m = RatMat::from_rows(combo.iter().map(|&i| int_to_rat(&reps[i])).collect());
            if m.rank() < size {
                let cols = RatMat::from_rows(
                    (0..n)
                        .map(|j| {
                            combo
                                .iter()
                                .map(|&i| BigRational::from_integer(reps[i][j].clone()))
                                .collect()
                        })
                        .collect(),
                );
                let kernel = cols.kernel();
                debug_assert_eq!(kernel.len(), 1);
                return Some((combo, primitive(&kernel[0])));
            }
        }
    }
    None
}

/// Trades one factor from each non-pivot line of a circuit for a factor on
/// the pivot line.  Participating factors are first flipped and rescaled so
/// that their exponents realize the circuit relation with the pivot summed
/// out, then split with alternating signs, certificate-sorted.
fn circuit_split(
    term: &MeroFunction,
    groups: &BTreeMap<IntVec, Vec<usize>>,
    reps: &[IntVec],
    mu: &[Rat],
) -> Result<Vec<MeroFunction>> {
    let (circuit, rel) = find_circuit(reps).expect("dependent lines admit a circuit");
    // the pivot is the largest line, so each split moves a factor strictly
    // up in the line order and the rewriting terminates
    let pivot_pos = circuit.len() - 1;
    let mut scale = BigInt::one();
    let mut picks: Vec<(usize, BigInt, BigInt)> = vec![];
    for (pos, &line) in circuit.iter().enumerate() {
        if pos == pivot_pos {
            continue;
        }
        let rep = &reps[line];
        let fi = groups[rep][0];
        let d = signed_length(&term.denominator[fi].1, rep);
        let m = rel[pos].clone();
        scale = scale.lcm(&(d.abs() / d.abs().gcd(&m.abs())));
        picks.push((fi, d, m));
    }
    let mut prepped = term.clone();
    for (fi, d, m) in &picks {
        if d.is_negative() != (&scale * m).is_negative() {
            prepped = flip(&prepped, *fi)?;
        }
    }
    let mut subterms = vec![prepped];
    for (fi, d, m) in &picks {
        let rho = (&scale * m).abs() / d.abs();
        if rho > BigInt::one() {
            let mut next = vec![];
            for t in &subterms {
                next.extend(rescale(t, *fi, &rho)?);
            }
            subterms = next;
        }
    }
    let mut out = vec![];
    for sub in &subterms {
        let xi = &sub.terms[0].1;
        let target: RatVec = mu
            .iter()
            .zip(xi)
            .map(|(m, x)| m + BigRational::from_integer(x.clone()))
            .collect();
        let cert = box_certificate(&sub.denominator, &target, false)
            .ok_or_else(|| Error::Invalid("box membership lost while rewriting".into()))?;
        let mut parts: Vec<usize> = picks.iter().map(|(fi, _, _)| *fi).collect();
        parts.sort_by(|&a, &b| cert[a].cmp(&cert[b]).then(a.cmp(&b)));
        out.extend(apply_crucial(sub, &parts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;

    fn root(num: i64, den: u64) -> CycNumber {
        CycNumber::root_of_unity(num, den)
    }

    fn fac(num: i64, den: u64, beta: &[i64]) -> (CycNumber, IntVec) {
        (root(num, den), ivec(beta))
    }

    fn rv(xs: &[(i64, i64)]) -> RatVec {
        xs.iter().map(|&(p, q)| frac(p, q)).collect()
    }

    #[test]
    fn boxes_read_off_any_presentation() {
        let f = MeroFunction::reciprocal(1, vec![fac(0, 1, &[1])]).unwrap();
        assert!(box_membership(&f, &[frac(1, 2)]));
        assert!(box_membership(&f, &[rat(1)]));
        assert!(!box_membership(&f, &[frac(3, 2)]));
        assert!(box_interior(&f, &[frac(1, 2)]));
        assert!(!box_interior(&f, &[rat(1)]));

        // (1+e^z)/(1-e^{2z}) cuts the interval [0,2] down to [0,1]
        let g = MeroFunction::new(
            1,
            vec![(CycNumber::one(), ivec(&[0])), (CycNumber::one(), ivec(&[1]))],
            vec![fac(0, 1, &[2])],
        )
        .unwrap();
        assert!(box_membership(&g, &[frac(1, 2)]));
        assert!(box_membership(&g, &[rat(1)]));
        assert!(!box_membership(&g, &[frac(3, 2)]));

        let f1 = MeroFunction::reciprocal(2, vec![fac(0, 1, &[1, 0]), fac(0, 1, &[0, 1])]).unwrap();
        assert!(box_membership(&f1, &rv(&[(1, 2), (1, 2)])));
        assert!(!box_membership(&f1, &rv(&[(3, 2), (0, 1)])));
    }

    #[test]
    fn certificate_order_steers_the_split() {
        let f1 = MeroFunction::reciprocal(2, vec![fac(0, 1, &[1, 0]), fac(0, 1, &[0, 1])]).unwrap();

        let low_first = crucial_split(&f1, &rv(&[(1, 4), (3, 4)])).unwrap();
        let merged = fac(0, 1, &[1, 1]);
        let f2 =
            MeroFunction::reciprocal(2, vec![merged.clone(), fac(0, 1, &[0, 1])]).unwrap();
        let f3 =
            MeroFunction::reciprocal(2, vec![merged.clone(), fac(0, 1, &[-1, 0])]).unwrap();
        assert_eq!(low_first, vec![f2.clone(), f3.scaled(&CycNumber::from_int(-1))]);

        // swapped coordinates reverse the roles of the two factors
        let high_first = crucial_split(&f1, &rv(&[(3, 4), (1, 4)])).unwrap();
        let f2r = MeroFunction::reciprocal(2, vec![merged.clone(), fac(0, 1, &[1, 0])]).unwrap();
        let f3r = MeroFunction::reciprocal(2, vec![merged, fac(0, 1, &[0, -1])]).unwrap();
        assert_eq!(high_first, vec![f2r, f3r.scaled(&CycNumber::from_int(-1))]);

        for (orig, split) in [(&f1, &low_first), (&f1, &high_first)] {
            let z = [Complex64::new(0.31, -0.7), Complex64::new(-0.45, 1.2)];
            let direct = orig.to_complex(&z);
            let sum: Complex64 = split.iter().map(|t| t.to_complex(&z)).sum();
            assert!((direct - sum).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_relation_folds_into_a_constant() {
        // 1/((1-u⁻¹e^{-z})(1-ve^z)) with u ≠ v splits into two simple
        // fractions behind the constant 1/(1-u⁻¹v)
        let u = root(1, 5);
        let v = root(1, 3);
        let f =
            MeroFunction::reciprocal(1, vec![(u.inv().unwrap(), ivec(&[-1])), (v.clone(), ivec(&[1]))])
                .unwrap();
        let fold = CycNumber::one().sub(&u.inv().unwrap().mul(&v)).inv().unwrap();

        let pos = crucial_split(&f, &[frac(1, 2)]).unwrap();
        let expect_pos = vec![
            MeroFunction::reciprocal(1, vec![(v.clone(), ivec(&[1]))]).unwrap().scaled(&fold),
            MeroFunction::reciprocal(1, vec![(u.clone(), ivec(&[1]))])
                .unwrap()
                .scaled(&fold.neg()),
        ];
        assert_eq!(pos, expect_pos);

        let neg = crucial_split(&f, &[frac(-1, 2)]).unwrap();
        let expect_neg = vec![
            MeroFunction::reciprocal(1, vec![(u.inv().unwrap(), ivec(&[-1]))])
                .unwrap()
                .scaled(&fold),
            MeroFunction::reciprocal(1, vec![(v.inv().unwrap(), ivec(&[-1]))])
                .unwrap()
                .scaled(&fold.neg()),
        ];
        assert_eq!(neg, expect_neg);

        let degenerate =
            MeroFunction::reciprocal(1, vec![fac(0, 1, &[1]), fac(0, 1, &[-1])]).unwrap();
        assert!(matches!(crucial_split(&degenerate, &[rat(0)]), Err(Error::DegenerateRelation)));
    }

    #[test]
    fn split_rejects_points_outside_the_box() {
        let f1 = MeroFunction::reciprocal(2, vec![fac(0, 1, &[1, 0]), fac(0, 1, &[0, 1])]).unwrap();
        assert!(crucial_split(&f1, &rv(&[(2, 1), (0, 1)])).is_err());

        let two_terms = MeroFunction::new(
            2,
            vec![(CycNumber::one(), ivec(&[0, 0])), (CycNumber::one(), ivec(&[1, 0]))],
            vec![fac(0, 1, &[1, 0]), fac(0, 1, &[0, 1])],
        )
        .unwrap();
        assert!(crucial_split(&two_terms, &rv(&[(1, 2), (1, 2)])).is_err());
    }

    #[test]
    fn independent_consolidated_functions_pass_through() {
        let f1 = MeroFunction::reciprocal(2, vec![fac(0, 1, &[1, 0]), fac(0, 1, &[0, 1])]).unwrap();
        let mu = rv(&[(1, 4), (3, 4)]);
        let dec = admissible_decompose(&f1, &mu).unwrap();
        assert_eq!(dec.mu, mu);
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.terms[0].function, f1);
        assert_eq!(dec.terms[0].directions, vec![ivec(&[1, 0]), ivec(&[0, 1])]);
    }

    #[test]
    fn same_direction_twists_split_behind_constants() {
        let u1 = root(1, 3);
        let u2 = root(2, 3);
        let f = MeroFunction::reciprocal(1, vec![(u1.clone(), ivec(&[1])), (u2.clone(), ivec(&[1]))])
            .unwrap();
        let dec = admissible_decompose(&f, &[frac(1, 2)]).unwrap();
        assert_eq!(dec.mu, vec![frac(1, 2)]);
        assert_eq!(dec.terms.len(), 2);

        let c1 = CycNumber::one().sub(&u2.mul(&u1.inv().unwrap())).inv().unwrap();
        let c2 = CycNumber::one().sub(&u1.mul(&u2.inv().unwrap())).inv().unwrap();
        let keep1 =
            MeroFunction::reciprocal(1, vec![(u1.clone(), ivec(&[1]))]).unwrap().scaled(&c1);
        let keep2 =
            MeroFunction::reciprocal(1, vec![(u2.clone(), ivec(&[1]))]).unwrap().scaled(&c2);
        assert!(dec.terms.iter().any(|t| t.function == keep1));
        assert!(dec.terms.iter().any(|t| t.function == keep2));
    }

    #[test]
    fn upper_certificates_flip_the_pair_merge() {
        let u1 = root(1, 3);
        let u2 = root(1, 4);
        let f = MeroFunction::reciprocal(1, vec![(u1.clone(), ivec(&[1])), (u2.clone(), ivec(&[1]))])
            .unwrap();
        let dec = admissible_decompose(&f, &[frac(3, 2)]).unwrap();
        assert_eq!(dec.terms.len(), 2);

        let c1 = CycNumber::one().sub(&u2.mul(&u1.inv().unwrap())).inv().unwrap();
        let c2 = CycNumber::one().sub(&u1.mul(&u2.inv().unwrap())).inv().unwrap();
        let keep2 = MeroFunction::new(
            1,
            vec![(c1.mul(&u1.inv().unwrap()).neg(), ivec(&[-1]))],
            vec![(u2.clone(), ivec(&[1]))],
        )
        .unwrap();
        let keep1 = MeroFunction::new(
            1,
            vec![(c2.mul(&u2.inv().unwrap()).neg(), ivec(&[-1]))],
            vec![(u1.clone(), ivec(&[1]))],
        )
        .unwrap();
        assert!(dec.terms.iter().any(|t| t.function == keep2));
        assert!(dec.terms.iter().any(|t| t.function == keep1));

        let z = [Complex64::new(0.17, 0.9)];
        let direct = f.to_complex(&z);
        let sum: Complex64 = dec.terms.iter().map(|t| t.function.to_complex(&z)).sum();
        assert!((direct - sum).norm() < 1e-10);
    }

    #[test]
    fn dependent_directions_get_traded_away() {
        let f = MeroFunction::reciprocal(
            2,
            vec![fac(0, 1, &[1, 0]), fac(0, 1, &[0, 1]), fac(0, 1, &[1, 1])],
        )
        .unwrap();
        let mu = rv(&[(1, 2), (1, 4)]);
        let dec = admissible_decompose(&f, &mu).unwrap();
        assert_eq!(dec.mu, mu);
        for term in &dec.terms {
            assert_eq!(term.directions.len(), 2);
            assert!(box_interior(&term.function, &dec.mu));
            let m = RatMat::from_rows(term.directions.iter().map(|d| int_to_rat(d)).collect());
            assert_eq!(m.rank(), 2);
        }
        for z in [
            [Complex64::new(0.4, -1.1), Complex64::new(-0.23, 0.77)],
            [Complex64::new(-0.61, 0.35), Complex64::new(0.8, 2.1)],
        ] {
            let direct = f.to_complex(&z);
            let sum: Complex64 = dec.terms.iter().map(|t| t.function.to_complex(&z)).sum();
            assert!((direct - sum).norm() < 1e-9);
        }
    }

    #[test]
    fn special_points_get_reported_perturbations() {
        let f =
            MeroFunction::reciprocal(1, vec![fac(0, 1, &[1]), fac(0, 1, &[1])]).unwrap();
        let dec = admissible_decompose(&f, &[rat(0)]).unwrap();
        assert_ne!(dec.mu, vec![rat(0)]);
        assert!(dec.mu[0] > rat(0) && dec.mu[0] < rat(2));
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.terms[0].function, f);
    }

    #[test]
    fn preconditions_are_enforced() {
        let flat = MeroFunction::reciprocal(2, vec![fac(0, 1, &[1, 0])]).unwrap();
        assert!(matches!(
            admissible_decompose(&flat, &rv(&[(1, 2), (0, 1)])),
            Err(Error::EssentialityViolated)
        ));

        let f = MeroFunction::reciprocal(1, vec![fac(0, 1, &[1])]).unwrap();
        assert!(admissible_decompose(&f, &[rat(2)]).is_err());
    }

    #[test]
    fn random_functions_decompose_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let twists: [(i64, u64); 3] = [(0, 1), (1, 3), (1, 4)];
        let mut seen = 0;
        while seen < 30 {
            let n = rng.gen_range(1..=2usize);
            let nf = rng.gen_range(n..=4usize);
            let mut den = vec![];
            for _ in 0..nf {
                let beta: Vec<i64> = loop {
                    let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2i64)).collect();
                    if v.iter().any(|&x| x != 0) {
                        break v;
                    }
                };
                let (p, q) = twists[rng.gen_range(0..3usize)];
                den.push(fac(p, q, &beta));
            }
            let rows: Vec<RatVec> = den.iter().map(|(_, b)| int_to_rat(b)).collect();
            if RatMat::from_rows(rows).rank() < n {
                continue;
            }
            let xi: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1i64)).collect();
            let f = MeroFunction::new(
                n,
                vec![(CycNumber::one(), ivec(&xi))],
                den.clone(),
            )
            .unwrap();
            let mut mu: RatVec = ivec(&xi).iter().map(|x| -BigRational::from_integer(x.clone())).collect();
            for (_, beta) in &den {
                let t = frac(rng.gen_range(1..8i64), 8);
                for (m, b) in mu.iter_mut().zip(beta) {
                    *m += BigRational::from_integer(b.clone()) * &t;
                }
            }
            let dec = admissible_decompose(&f, &mu).unwrap();
            for term in &dec.terms {
                assert!(box_membership(&term.function, &dec.mu));
                assert!(box_interior(&term.function, &dec.mu));
                assert_eq!(term.directions.len(), n);
            }

            let mut points = 0;
            let mut tries = 0;
            while points < 20 && tries < 2000 {
                tries += 1;
                let z: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0)))
                    .collect();
                let clear = |g: &MeroFunction| {
                    g.denominator.iter().all(|(u, beta)| {
                        (Complex64::new(1.0, 0.0) - u.to_complex() * exp_pairing(beta, &z))
                            .norm()
                            > 0.05
                    })
                };
                if !clear(&f) || !dec.terms.iter().all(|t| clear(&t.function)) {
                    continue;
                }
                let direct = f.to_complex(&z);
                let sum: Complex64 = dec.terms.iter().map(|t| t.function.to_complex(&z)).sum();
                assert!(
                    (direct - sum).norm() <= 1e-9,
                    "residual {} at {:?}",
                    (direct - sum).norm(),
                    z
                );
                points += 1;
            }
            assert_eq!(points, 20, "not enough pole-free sample points");
            seen += 1;
        }
    }
}
