//! Brute-force lattice enumeration: the reference the closed formulas are
//! checked against, plus the reduction of a polytope given by inequalities
//! to a partition polytope.
//!
//! Everything here is exact.  Enumeration walks the fibers
//! `{x ∈ Z^N_{≥0} : Σ x_k β_k = λ}` directly, bounding the search with a
//! linear functional that is positive on every direction, so it is the
//! slow-but-trusted side of every comparison with a quasi-polynomial.

use crate::arrangement::System;
use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::linalg::{
    dot_int, dot_int_rat, feasible, int_to_rat, maximize, minimize, rat, solve, IntMat, IntVec,
    LinearSystem, LpOutcome, Rat, RatMat, RatVec, SolveOutcome,
};
use crate::separation::MeroFunction;
use crate::series::SymbolicPoly;
use itertools::Itertools;
use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// `(k+1)(k+2)⋯(k+r-1) / (r-1)!`, the number of ways to write `k` as an
/// ordered sum of `r` naturals when `k ≥ 0`, extended as a polynomial in `k`
/// elsewhere (it vanishes for `-r < k < 0`).
pub fn shifted_binomial(k: &BigInt, r: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..r {
        num *= k + BigInt::from(i);
        den *= BigInt::from(i);
    }
    num / den
}

/// Depth-first enumeration of `{x ≥ 0 : Σ x_k v_k = target}` for a fixed
/// list of directions, reusable across targets.
struct Enumeration {
    vectors: Vec<IntVec>,
    witness: RatVec,
    /// positions sorted by decreasing pairing with the witness
    order: Vec<usize>,
    pairings: Vec<Rat>,
    /// whether the directions from a given level on are independent
    indep: Vec<bool>,
}

impl Enumeration {
    fn new(vectors: &[IntVec], n: usize) -> Result<Self> {
        let mut lp = LinearSystem::new(n);
        for v in vectors {
            lp.ge(int_to_rat(v), rat(1));
        }
        let witness = feasible(&lp).ok_or(Error::NoHalfspace)?;
        let pairings: Vec<Rat> = vectors.iter().map(|v| dot_int_rat(v, &witness)).collect();
        let mut order: Vec<usize> = (0..vectors.len()).collect();
        order.sort_by(|&a, &b| pairings[b].cmp(&pairings[a]).then(a.cmp(&b)));
        let mut indep = vec![false; vectors.len() + 1];
        indep[vectors.len()] = true;
        for k in (0..vectors.len()).rev() {
            let m =
                RatMat::from_rows(order[k..].iter().map(|&i| int_to_rat(&vectors[i])).collect());
            indep[k] = m.rank() == vectors.len() - k;
        }
        Ok(Enumeration { vectors: vectors.to_vec(), witness, order, pairings, indep })
    }

    fn run(&self, target: &[BigInt], f: &mut dyn FnMut(&[BigInt])) {
        let mut rem = target.to_vec();
        let mut totals = vec![BigInt::zero(); self.vectors.len()];
        self.descend(0, &mut rem, &mut totals, f);
    }

    fn descend(
        &self,
        level: usize,
        rem: &mut Vec<BigInt>,
        totals: &mut Vec<BigInt>,
        f: &mut dyn FnMut(&[BigInt]),
    ) {
        if self.indep[level] {
            // at most one way to finish; solve for it
            let cols = &self.order[level..];
            let n = rem.len();
            let m = RatMat::from_rows(
                (0..n)
                    .map(|j| {
                        cols.iter()
                            .map(|&i| BigRational::from_integer(self.vectors[i][j].clone()))
                            .collect()
                    })
                    .collect(),
            );
            let b: RatVec = rem.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            match solve(&m, &b) {
                Ok(SolveOutcome::Unique(x)) => {
                    if x.iter().all(|t| t.is_integer() && !t.is_negative()) {
                        for (&i, t) in cols.iter().zip(&x) {
                            totals[i] = t.to_integer();
                        }
                        f(totals);
                    }
                }
                Ok(SolveOutcome::NoSolution) => {}
                _ => unreachable!("independent columns"),
            }
            return;
        }
        let available = dot_int_rat(rem, &self.witness);
        if available.is_negative() {
            return;
        }
        let k = self.order[level];
        let cap = (available / &self.pairings[k]).floor().to_integer();
        let beta = self.vectors[k].clone();
        let mut used = BigInt::zero();
        loop {
            totals[k] = used.clone();
            self.descend(level + 1, rem, totals, f);
            if used == cap {
                break;
            }
            used += 1;
            for (r, b) in rem.iter_mut().zip(&beta) {
                *r -= b;
            }
        }
        for (r, b) in rem.iter_mut().zip(&beta) {
            *r += b * &used;
        }
    }
}

fn check_dim(sys: &System, lam: &[BigInt]) -> Result<()> {
    if lam.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: lam.len() });
    }
    Ok(())
}

fn check_flat(sys: &System, len: usize) -> Result<()> {
    if len != sys.flat_len() {
        return Err(Error::DimensionMismatch { expected: sys.flat_len(), got: len });
    }
    Ok(())
}

/// `#{x ∈ Z^N_{≥0} : Σ x_k β_k = λ}` over the flattened directions.
pub fn count_points(sys: &System, lam: &[BigInt]) -> Result<BigInt> {
    check_dim(sys, lam)?;
    let en = Enumeration::new(sys.vectors(), sys.dim())?;
    let mut acc = BigInt::zero();
    en.run(lam, &mut |totals| {
        let mut w = BigInt::one();
        for (t, &m) in totals.iter().zip(sys.multiplicities()) {
            w *= shifted_binomial(t, m);
        }
        acc += w;
    });
    Ok(acc)
}

fn compositions(total: &BigInt, parts: usize) -> Vec<Vec<BigInt>> {
    if parts == 1 {
        return vec![vec![total.clone()]];
    }
    let mut out = vec![];
    let mut first = BigInt::zero();
    while &first <= total {
        for mut rest in compositions(&(total - &first), parts - 1) {
            let mut row = Vec::with_capacity(parts);
            row.push(first.clone());
            row.append(&mut rest);
            out.push(row);
        }
        first += 1;
    }
    out
}

/// Visits every lattice point of the fiber, in flattened coordinates.
pub fn for_each_point(
    sys: &System,
    lam: &[BigInt],
    f: &mut dyn FnMut(&[BigInt]),
) -> Result<()> {
    check_dim(sys, lam)?;
    let en = Enumeration::new(sys.vectors(), sys.dim())?;
    let mults = sys.multiplicities().to_vec();
    let flat_len = sys.flat_len();
    en.run(lam, &mut |totals| {
        let blocks: Vec<Vec<Vec<BigInt>>> = totals
            .iter()
            .zip(&mults)
            .map(|(t, &m)| compositions(t, m as usize))
            .collect();
        for combo in blocks.iter().map(|b| b.iter()).multi_cartesian_product() {
            let mut flat = Vec::with_capacity(flat_len);
            for part in combo {
                flat.extend(part.iter().cloned());
            }
            f(&flat);
        }
    });
    Ok(())
}

/// `Σ_{x ∈ fiber} f(x)` for a polynomial weight in the flat coordinates.
pub fn sum_polynomial(sys: &System, lam: &[BigInt], f: &SymbolicPoly) -> Result<CycNumber> {
    check_flat(sys, f.nvars())?;
    let mut acc = CycNumber::zero();
    for_each_point(sys, lam, &mut |x| {
        let pt: RatVec = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        acc = acc.add(&f.eval(&pt));
    })?;
    Ok(acc)
}

/// `Σ_{x ∈ fiber} e^{2πi <twist, x>}`, exact in the cyclotomic field.
pub fn sum_exponential(sys: &System, lam: &[BigInt], twist: &[Rat]) -> Result<CycNumber> {
    check_flat(sys, twist.len())?;
    let mut acc = CycNumber::zero();
    for_each_point(sys, lam, &mut |x| {
        let mut e = BigRational::zero();
        for (t, v) in twist.iter().zip(x) {
            e += t * BigRational::from_integer(v.clone());
        }
        acc = acc.add(&CycNumber::root_of_unity_rat(&e));
    })?;
    Ok(acc)
}

/// `Σ_{x ∈ fiber} e^{<y, x>}` in floating point, for arbitrary complex `y`.
pub fn sum_complex(sys: &System, lam: &[BigInt], y: &[Complex64]) -> Result<Complex64> {
    check_flat(sys, y.len())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_point(sys, lam, &mut |x| {
        let mut e = Complex64::new(0.0, 0.0);
        for (c, v) in y.iter().zip(x) {
            e += c * v.to_f64().expect("small coordinate");
        }
        acc += e.exp();
    })?;
    Ok(acc)
}

/// `Σ_{x ∈ fiber} e^{2πi <twist, x>} ∏_j c(x_j, h_j)` with the per-copy
/// binomial weights `c(x, h) = (x+1)⋯(x+h-1)/(h-1)!`.
pub fn sum_twisted_binomial(
    sys: &System,
    lam: &[BigInt],
    twist: &[Rat],
    heights: &[u32],
) -> Result<CycNumber> {
    check_flat(sys, twist.len())?;
    check_flat(sys, heights.len())?;
    let mut acc = CycNumber::zero();
    for_each_point(sys, lam, &mut |x| {
        let mut e = BigRational::zero();
        let mut w = BigInt::one();
        for (j, v) in x.iter().enumerate() {
            e += &twist[j] * BigRational::from_integer(v.clone());
            w *= shifted_binomial(v, heights[j]);
        }
        let c = CycNumber::root_of_unity_rat(&e).scale(&BigRational::from_integer(w));
        acc = acc.add(&c);
    })?;
    Ok(acc)
}

fn pow_nonneg(u: &CycNumber, t: &BigInt) -> CycNumber {
    u.pow(t.to_i64().expect("enumeration exponent fits a machine word"))
        .expect("nonzero base")
}

/// The coefficient of `e^{<λ,z>}` in the expansion of `f` as a power series
/// supported on the cone of its denominator directions: each factor
/// `1/(1-ue^{<β,z>})` is expanded geometrically and the expansions are
/// convolved, the search bounded by a functional positive on every `β`.
pub fn coeff_expansion(f: &MeroFunction, lam: &[BigInt]) -> Result<CycNumber> {
    if lam.len() != f.nvars() {
        return Err(Error::DimensionMismatch { expected: f.nvars(), got: lam.len() });
    }
    let dirs: Vec<IntVec> = f.denominator().iter().map(|(_, b)| b.clone()).collect();
    let mut acc = CycNumber::zero();
    if dirs.is_empty() {
        for (c, xi) in f.terms() {
            if xi.as_slice() == lam {
                acc = acc.add(c);
            }
        }
        return Ok(acc);
    }
    let en = Enumeration::new(&dirs, f.nvars())?;
    let us: Vec<CycNumber> = f.denominator().iter().map(|(u, _)| u.clone()).collect();
    for (c, xi) in f.terms() {
        let target: Vec<BigInt> = lam.iter().zip(xi).map(|(l, x)| l - x).collect();
        let mut sub = CycNumber::zero();
        en.run(&target, &mut |x| {
            let mut prod = CycNumber::one();
            for (t, u) in x.iter().zip(&us) {
                prod = prod.mul(&pow_nonneg(u, t));
            }
            sub = sub.add(&prod);
        });
        acc = acc.add(&c.mul(&sub));
    }
    Ok(acc)
}

/// `{v : <u_k, v> + h_k ≥ 0}`, required bounded.
#[derive(Clone, Debug)]
pub struct InequalityPolytope {
    dim: usize,
    normals: Vec<IntVec>,
    offsets: Vec<BigInt>,
}

impl InequalityPolytope {
    pub fn new(dim: usize, normals: Vec<IntVec>, offsets: Vec<BigInt>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        if normals.len() != offsets.len() {
            return Err(Error::DimensionMismatch { expected: normals.len(), got: offsets.len() });
        }
        for u in &normals {
            if u.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: u.len() });
            }
            if u.iter().all(|x| x.is_zero()) {
                return Err(Error::Invalid("zero normal".into()));
            }
        }
        let rows = RatMat::from_rows(normals.iter().map(|u| int_to_rat(u)).collect());
        if normals.is_empty() || rows.rank() < dim {
            return Err(Error::NonSpanningNormals);
        }
        // the recession cone is trivial exactly when some strictly positive
        // combination of the normals vanishes
        let mut lp = LinearSystem::new(normals.len());
        for j in 0..dim {
            let row: RatVec =
                normals.iter().map(|u| BigRational::from_integer(u[j].clone())).collect();
            lp.eq(row, rat(0));
        }
        for k in 0..normals.len() {
            let mut e = vec![BigRational::zero(); normals.len()];
            e[k] = BigRational::one();
            lp.ge(e, rat(1));
        }
        if feasible(&lp).is_none() {
            return Err(Error::Unbounded);
        }
        Ok(InequalityPolytope { dim, normals, offsets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[IntVec] {
        &self.normals
    }

    pub fn offsets(&self) -> &[BigInt] {
        &self.offsets
    }

    fn constraint_system(&self) -> LinearSystem {
        let mut lp = LinearSystem::new(self.dim);
        for (u, h) in self.normals.iter().zip(&self.offsets) {
            lp.ge(int_to_rat(u), -BigRational::from_integer(h.clone()));
        }
        lp
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(u, h)| !(dot_int(u, v) + h).is_negative())
    }

    /// All lattice points, by scanning the exact bounding box.
    pub fn points(&self) -> Vec<IntVec> {
        let lp = self.constraint_system();
        let mut axes: Vec<Vec<BigInt>> = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let mut obj = vec![BigRational::zero(); self.dim];
            obj[j] = BigRational::one();
            let hi = match maximize(&obj, &lp) {
                LpOutcome::Optimal { value, .. } => value.floor().to_integer(),
                LpOutcome::Infeasible => return vec![],
                LpOutcome::Unbounded => unreachable!("construction enforces boundedness"),
            };
            let lo = match minimize(&obj, &lp) {
                LpOutcome::Optimal { value, .. } => value.ceil().to_integer(),
                _ => return vec![],
            };
            if lo > hi {
                return vec![];
            }
            let mut axis = vec![];
            let mut x = lo;
            while x <= hi {
                axis.push(x.clone());
                x += 1;
            }
            axes.push(axis);
        }
        axes.iter()
            .map(|a| a.iter())
            .multi_cartesian_product()
            .map(|c| c.into_iter().cloned().collect::<IntVec>())
            .filter(|v| self.contains(v))
            .collect()
    }
}

/// A bounded inequality polytope rewritten as a partition polytope: the
/// system of slack directions, the right-hand side it is cut out at, and
/// the affine map sending ambient points to their slack coordinates.
pub struct Embedding {
    pub system: System,
    pub target: IntVec,
    normals: Vec<IntVec>,
    offsets: Vec<BigInt>,
    /// flat index of the system -> row of the (possibly padded) description
    flat_rows: Vec<usize>,
}

impl Embedding {
    /// Flat slack coordinates `<u_k, v> + h_k` of an ambient point, aligned
    /// with the system's flattened indexing.
    pub fn coordinates(&self, v: &[BigInt]) -> IntVec {
        self.flat_rows.iter().map(|&k| dot_int(&self.normals[k], v) + &self.offsets[k]).collect()
    }
}

/// Integral slack vectors must force integral ambient points; by Smith
/// reduction of the normal matrix that is exactly all invariant factors
/// being 1.
fn saturated(normals: &[IntVec], dim: usize) -> bool {
    let mut m = IntMat::zero(normals.len(), dim);
    for (i, u) in normals.iter().enumerate() {
        for j in 0..dim {
            m.set(i, j, u[j].clone());
        }
    }
    let (_, d, _) = m.smith_normal_form();
    (0..dim).all(|i| d.at(i, i).abs().is_one())
}

/// Smallest `h ≥ 0` making `v_j + h ≥ 0` hold on the whole polytope.
fn padding_offset(p: &InequalityPolytope, j: usize) -> BigInt {
    let lp = p.constraint_system();
    let mut obj = vec![BigRational::zero(); p.dim()];
    obj[j] = BigRational::one();
    match minimize(&obj, &lp) {
        LpOutcome::Optimal { value, .. } => {
            let need = (-value).ceil().to_integer();
            if need.is_negative() {
                BigInt::zero()
            } else {
                need
            }
        }
        _ => BigInt::zero(),
    }
}

/// Lattice-point-preserving reduction: the slack map `v ↦ (<u_k,v> + h_k)_k`
/// identifies the polytope with the fiber of `Σ x_k β_k = a` where the `β_k`
/// span the integer kernel of `x ↦ Σ x_k u_k` and `a = Σ h_k β_k`.  When the
/// normals do not generate a saturated lattice, coordinate halfspaces pushed
/// past the polytope are added first so that the identification is a
/// bijection on lattice points.
pub fn embed_polytope(p: &InequalityPolytope) -> Result<Embedding> {
    let r = p.dim();
    let mut normals = p.normals().to_vec();
    let mut offsets = p.offsets().to_vec();
    if !saturated(&normals, r) {
        for j in 0..r {
            let mut e = vec![BigInt::zero(); r];
            e[j] = BigInt::one();
            offsets.push(padding_offset(p, j));
            normals.push(e);
        }
    }
    let mut m = IntMat::zero(r, normals.len());
    for (k, u) in normals.iter().enumerate() {
        for i in 0..r {
            m.set(i, k, u[i].clone());
        }
    }
    let mut basis = m.kernel_lattice();
    for b in &mut basis {
        let flip = b.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        if flip {
            for x in b.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let n = basis.len();
    debug_assert_eq!(n, normals.len() - r);
    let rows: Vec<IntVec> =
        (0..normals.len()).map(|k| basis.iter().map(|b| b[k].clone()).collect()).collect();
    let mut vectors: Vec<IntVec> = vec![];
    let mut mults: Vec<u32> = vec![];
    let mut copies: Vec<Vec<usize>> = vec![];
    for (k, row) in rows.iter().enumerate() {
        match vectors.iter().position(|v| v == row) {
            Some(i) => {
                mults[i] += 1;
                copies[i].push(k);
            }
            None => {
                vectors.push(row.clone());
                mults.push(1);
                copies.push(vec![k]);
            }
        }
    }
    let system = System::new(n, vectors, mults)?;
    let target: IntVec = (0..n)
        .map(|j| {
            let mut s = BigInt::zero();
            for (k, h) in offsets.iter().enumerate() {
                s += h * &rows[k][j];
            }
            s
        })
        .collect();
    Ok(Embedding { system, target, normals, offsets, flat_rows: copies.concat() })
}

/// Whether `Π(a) + Π(b) = Π(a+b)` for the fibers of the system: every
/// vertex of the sum fiber must split into a point of each summand.  The
/// vertices are the basic solutions supported on spanning bases.
pub fn minkowski_sum_law_check(sys: &System, a: &[BigInt], b: &[BigInt]) -> Result<bool> {
    check_dim(sys, a)?;
    check_dim(sys, b)?;
    let n = sys.dim();
    let total: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let total_rat = int_to_rat(&total);
    let a_rat = int_to_rat(a);
    let flat = sys.flat_len();
    let ranges = sys.flat_ranges();
    let mut flat_vec: Vec<usize> = Vec::with_capacity(flat);
    for (k, rg) in ranges.iter().enumerate() {
        for _ in rg.clone() {
            flat_vec.push(k);
        }
    }
    for basis in sys.spanning_bases() {
        let m = RatMat::from_rows(
            (0..n)
                .map(|i| {
                    basis
                        .iter()
                        .map(|&k| BigRational::from_integer(sys.vector(k)[i].clone()))
                        .collect()
                })
                .collect(),
        );
        let x = match solve(&m, &total_rat)? {
            SolveOutcome::Unique(x) => x,
            _ => unreachable!("spanning basis"),
        };
        if x.iter().any(|t| t.is_negative()) {
            continue;
        }
        // the vertex puts all weight on the first copy of each basis
        // vector; copies are interchangeable for the splitting test
        let mut p = vec![BigRational::zero(); flat];
        for (&k, t) in basis.iter().zip(&x) {
            p[ranges[k].start] = t.clone();
        }
        // y ∈ [0, p] with Σ y_k β_k = a splits the vertex
        let mut lp = LinearSystem::new(flat);
        for j in 0..flat {
            let mut e = vec![BigRational::zero(); flat];
            e[j] = BigRational::one();
            lp.ge(e.clone(), rat(0));
            lp.le(e, p[j].clone());
        }
        for i in 0..n {
            let row: RatVec = (0..flat)
                .map(|j| BigRational::from_integer(sys.vector(flat_vec[j])[i].clone()))
                .collect();
            lp.eq(row, a_rat[i].clone());
        }
        if feasible(&lp).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::enumerate_chambers;
    use crate::formula::ehrhart;
    use crate::linalg::{frac, ivec};
    use crate::separation::admissible_decompose;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a2(mult: u32) -> System {
        System::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])],
            vec![mult; 3],
        )
        .unwrap()
    }

    fn nonuni(mult: u32) -> System {
        System::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 2])],
            vec![mult; 3],
        )
        .unwrap()
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn generating_function(s: &System) -> MeroFunction {
        let mut den = vec![];
        for (k, v) in s.vectors().iter().enumerate() {
            for _ in 0..s.multiplicity(k) {
                den.push((CycNumber::one(), v.clone()));
            }
        }
        MeroFunction::reciprocal(s.dim(), den).unwrap()
    }

    #[test]
    fn binomial_weights_count_compositions() {
        for k in 0..=6i64 {
            for r in 1..=4u32 {
                let direct = compositions(&BigInt::from(k), r as usize).len();
                assert_eq!(shifted_binomial(&BigInt::from(k), r), BigInt::from(direct));
            }
        }
        assert_eq!(shifted_binomial(&BigInt::from(-2), 3), BigInt::zero());
        assert_eq!(shifted_binomial(&BigInt::from(-4), 3), BigInt::from(3));
    }

    #[test]
    fn counts_match_the_small_cases() {
        let s = a2(1);
        assert_eq!(count_points(&s, &big(&[1, 1])).unwrap(), BigInt::from(2));
        assert_eq!(count_points(&s, &big(&[-1, 2])).unwrap(), BigInt::zero());
        assert_eq!(count_points(&a2(2), &big(&[2, 1])).unwrap(), BigInt::from(10));

        let mut seen = 0;
        for_each_point(&s, &big(&[1, 1]), &mut |x| {
            assert_eq!(&x[0] + &x[2], BigInt::one());
            assert_eq!(&x[1] + &x[2], BigInt::one());
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, 2);
    }

    #[test]
    fn weighted_sums_cover_each_weight_kind() {
        let line = System::new(1, vec![ivec(&[1])], vec![2]).unwrap();
        let x1 = SymbolicPoly::var(2, 0);
        assert_eq!(sum_polynomial(&line, &big(&[4]), &x1).unwrap(), CycNumber::from_int(10));

        let s = a2(1);
        let ones = SymbolicPoly::one(3);
        assert_eq!(
            sum_polynomial(&s, &big(&[3, 2]), &ones).unwrap().as_rational().unwrap(),
            BigRational::from_integer(count_points(&s, &big(&[3, 2])).unwrap())
        );

        let tw = [frac(1, 5), rat(0), rat(0)];
        let expect = CycNumber::root_of_unity(1, 5).add(&CycNumber::one());
        assert_eq!(sum_exponential(&s, &big(&[1, 1]), &tw).unwrap(), expect);

        let y = [
            Complex64::new(0.0, 2.0 * std::f64::consts::PI / 5.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let float = sum_complex(&s, &big(&[1, 1]), &y).unwrap();
        assert!((float - expect.to_complex()).norm() < 1e-12);

        let h = [2, 1, 1];
        let zero_tw = [rat(0), rat(0), rat(0)];
        // Σ c(x₁,2) over the fiber equals Σ (x₁+1)
        let mut by_hand = CycNumber::zero();
        for_each_point(&s, &big(&[2, 2]), &mut |x| {
            by_hand = by_hand.add(&CycNumber::from_rat(BigRational::from_integer(&x[0] + 1_i32)));
        })
        .unwrap();
        assert_eq!(sum_twisted_binomial(&s, &big(&[2, 2]), &zero_tw, &h).unwrap(), by_hand);
    }

    #[test]
    fn expansion_coefficients_match_counting() {
        for s in [a2(1), nonuni(1)] {
            let f = generating_function(&s);
            for l1 in 0..=6 {
                for l2 in 0..=6 {
                    let lam = big(&[l1, l2]);
                    assert_eq!(
                        coeff_expansion(&f, &lam).unwrap().as_rational().unwrap(),
                        BigRational::from_integer(count_points(&s, &lam).unwrap())
                    );
                }
            }
        }

        // a twisted double factor picks up the binomial weight
        let z3 = CycNumber::root_of_unity(1, 3);
        let g = MeroFunction::reciprocal(
            1,
            vec![(z3.clone(), ivec(&[1])), (z3.clone(), ivec(&[1]))],
        )
        .unwrap();
        assert_eq!(coeff_expansion(&g, &big(&[3])).unwrap(), CycNumber::from_int(4));
        assert_eq!(coeff_expansion(&g, &big(&[4])).unwrap(), z3.scale(&rat(5)));
        assert_eq!(coeff_expansion(&g, &big(&[-1])).unwrap(), CycNumber::zero());

        let opposed = MeroFunction::reciprocal(
            1,
            vec![(CycNumber::one(), ivec(&[1])), (CycNumber::one(), ivec(&[-1]))],
        )
        .unwrap();
        assert!(matches!(coeff_expansion(&opposed, &big(&[0])), Err(Error::NoHalfspace)));
    }

    #[test]
    fn dilation_counts_follow_the_periodic_polynomials() {
        for s in [a2(1), nonuni(1)] {
            for lam0 in [[2i64, 1], [1, 2], [1, 1]] {
                let l0 = big(&lam0);
                let qp = ehrhart(&s, &l0).unwrap();
                for k in 0..=(qp.period * 3) {
                    let scaled: Vec<BigInt> = l0.iter().map(|x| x * BigInt::from(k)).collect();
                    assert_eq!(
                        qp.eval(k as i64),
                        BigRational::from_integer(count_points(&s, &scaled).unwrap()),
                        "dilation {k} of {lam0:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn embeddings_preserve_lattice_points() {
        // squares [0, k]²
        for k in 0..=5i64 {
            let p = InequalityPolytope::new(
                2,
                vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, 0]), ivec(&[0, -1])],
                big(&[0, 0, k, k]),
            )
            .unwrap();
            let e = embed_polytope(&p).unwrap();
            assert_eq!(
                count_points(&e.system, &e.target).unwrap(),
                BigInt::from((k + 1) * (k + 1))
            );
            // the slack map is a bijection onto the fiber
            let mut images = std::collections::BTreeSet::new();
            for v in p.points() {
                let c = e.coordinates(&v);
                assert!(c.iter().all(|x| !x.is_negative()));
                let mut sum = vec![BigInt::zero(); e.system.dim()];
                for (j, rg) in e.system.flat_ranges().iter().enumerate() {
                    for idx in rg.clone() {
                        for i in 0..e.system.dim() {
                            sum[i] += &c[idx] * &e.system.vector(j)[i];
                        }
                    }
                }
                assert_eq!(sum, e.target);
                images.insert(c);
            }
            assert_eq!(BigInt::from(images.len()), count_points(&e.system, &e.target).unwrap());
        }

        // segment {v ≥ 0, k - v ≥ 0} comes out as two copies of one direction
        let seg = InequalityPolytope::new(1, vec![ivec(&[1]), ivec(&[-1])], big(&[0, 7])).unwrap();
        let e = embed_polytope(&seg).unwrap();
        assert_eq!(e.system.dim(), 1);
        assert_eq!(e.system.vectors(), &[ivec(&[1])]);
        assert_eq!(e.system.multiplicities(), &[2]);
        assert_eq!(e.target, big(&[7]));

        // triangles x, y ≥ 0, x + y ≤ k
        for k in 0..=6i64 {
            let p = InequalityPolytope::new(
                2,
                vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
                big(&[0, 0, k]),
            )
            .unwrap();
            let e = embed_polytope(&p).unwrap();
            assert_eq!(
                count_points(&e.system, &e.target).unwrap(),
                BigInt::from((k + 2) * (k + 1) / 2)
            );
        }

        // diamonds |x| + |y| ≤ k have a non-saturated normal lattice and
        // need the padding rows
        for k in 0..=4i64 {
            let p = InequalityPolytope::new(
                2,
                vec![ivec(&[1, 1]), ivec(&[-1, 1]), ivec(&[-1, -1]), ivec(&[1, -1])],
                big(&[k, k, k, k]),
            )
            .unwrap();
            let e = embed_polytope(&p).unwrap();
            assert_eq!(
                count_points(&e.system, &e.target).unwrap(),
                BigInt::from(k * k + (k + 1) * (k + 1))
            );
            assert_eq!(BigInt::from(p.points().len()), BigInt::from(k * k + (k + 1) * (k + 1)));
        }
    }

    #[test]
    fn random_planar_embeddings_keep_their_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 10 {
            let m = rng.gen_range(3..=5usize);
            let mut normals = vec![];
            for _ in 0..m {
                loop {
                    let v = [rng.gen_range(-3..=3i64), rng.gen_range(-3..=3i64)];
                    if v.iter().any(|&x| x != 0) {
                        normals.push(ivec(&v));
                        break;
                    }
                }
            }
            let offsets: Vec<BigInt> =
                (0..m).map(|_| BigInt::from(rng.gen_range(0..=3i64))).collect();
            let p = match InequalityPolytope::new(2, normals, offsets) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let e = embed_polytope(&p).unwrap();
            assert_eq!(
                count_points(&e.system, &e.target).unwrap(),
                BigInt::from(p.points().len()),
                "lattice count drifted for {:?}",
                p
            );
            done += 1;
        }
    }

    #[test]
    fn minkowski_additivity_detects_shared_chambers() {
        let s = a2(1);
        assert!(minkowski_sum_law_check(&s, &big(&[3, 1]), &big(&[2, 1])).unwrap());
        assert!(!minkowski_sum_law_check(&s, &big(&[3, 1]), &big(&[1, 3])).unwrap());
        assert!(minkowski_sum_law_check(&s, &big(&[1, 3]), &big(&[1, 3])).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for sys in [a2(1), nonuni(1)] {
            let chambers = enumerate_chambers(&sys).unwrap();
            for _ in 0..25 {
                let sample = |rng: &mut ChaCha8Rng| -> Vec<BigInt> {
                    let mut v = vec![BigInt::zero(); sys.dim()];
                    for beta in sys.vectors() {
                        let c = rng.gen_range(0..=4i64);
                        for (vi, bi) in v.iter_mut().zip(beta) {
                            *vi += bi * BigInt::from(c);
                        }
                    }
                    v
                };
                let a = sample(&mut rng);
                let b = sample(&mut rng);
                let shared = chambers.iter().any(|c| {
                    c.closure_contains(&int_to_rat(&a)) && c.closure_contains(&int_to_rat(&b))
                });
                assert_eq!(
                    minkowski_sum_law_check(&sys, &a, &b).unwrap(),
                    shared,
                    "additivity disagrees with shared chambers at {a:?}, {b:?}"
                );
            }
        }
    }

    #[test]
    fn decomposition_terms_have_closed_coefficients() {
        fn independent_coeff(term: &MeroFunction, lam: &[BigInt]) -> CycNumber {
            let mut dirs: Vec<(IntVec, CycNumber, u32)> = vec![];
            for (u, beta) in term.denominator() {
                match dirs.iter_mut().find(|(v, _, _)| v == beta) {
                    Some((_, u0, h)) => {
                        assert_eq!(&*u0, u, "final terms carry one root per direction");
                        *h += 1;
                    }
                    None => dirs.push((beta.clone(), u.clone(), 1)),
                }
            }
            let n = lam.len();
            let m = RatMat::from_rows(
                (0..n)
                    .map(|i| {
                        dirs.iter()
                            .map(|(v, _, _)| BigRational::from_integer(v[i].clone()))
                            .collect()
                    })
                    .collect(),
            );
            let mut acc = CycNumber::zero();
            for (c, xi) in term.terms() {
                let b: RatVec = lam
                    .iter()
                    .zip(xi)
                    .map(|(l, x)| BigRational::from_integer(l - x))
                    .collect();
                let k = match solve(&m, &b).unwrap() {
                    SolveOutcome::Unique(k) => k,
                    SolveOutcome::NoSolution => continue,
                    _ => unreachable!("independent directions"),
                };
                if !k.iter().all(|t| t.is_integer() && !t.is_negative()) {
                    continue;
                }
                let mut prod = c.clone();
                for (t, (_, u, h)) in k.iter().zip(&dirs) {
                    let ti = t.to_integer();
                    prod = prod
                        .mul(&pow_nonneg(u, &ti))
                        .scale(&BigRational::from_integer(shifted_binomial(&ti, *h)));
                }
                acc = acc.add(&prod);
            }
            acc
        }

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let twists: [(i64, u64); 3] = [(0, 1), (1, 3), (1, 4)];
        let mut seen = 0;
        let mut attempts = 0;
        while seen < 5 {
            attempts += 1;
            assert!(attempts < 500, "sampler starved");
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
                den.push((CycNumber::root_of_unity(p, q), ivec(&beta)));
            }
            let rows: Vec<RatVec> = den.iter().map(|(_, b)| int_to_rat(b)).collect();
            if RatMat::from_rows(rows).rank() < n {
                continue;
            }
            let f = MeroFunction::reciprocal(n, den.clone()).unwrap();
            let mut mu: RatVec = vec![BigRational::zero(); n];
            for (_, beta) in &den {
                let t = frac(rng.gen_range(1..8i64), 8);
                for (m, b) in mu.iter_mut().zip(beta) {
                    *m += BigRational::from_integer(b.clone()) * &t;
                }
            }
            let dec = match admissible_decompose(&f, &mu) {
                Ok(d) => d,
                Err(_) => continue,
            };
            for term in &dec.terms {
                for _ in 0..10 {
                    let lam: Vec<BigInt> =
                        (0..n).map(|_| BigInt::from(rng.gen_range(-3..=5i64))).collect();
                    let direct = coeff_expansion(&term.function, &lam).unwrap();
                    assert_eq!(direct, independent_coeff(&term.function, &lam));
                }
            }
            seen += 1;
        }
    }
}
