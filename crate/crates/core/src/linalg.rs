//! Exact rational linear algebra.
//!
//! Everything downstream depends on this module staying exact: Smith normal
//! form over the integers, Gaussian elimination over `BigRational`, integer
//! kernel lattices, and a small two-phase simplex (Bland's rule, so it
//! terminates) used for feasibility of systems that mix equalities with
//! strict and non-strict inequalities.  Strict inequalities are decided by
//! maximizing a shared slack variable; the region is nonempty iff the
//! optimum is positive.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(int(v))
}

/// `p/q` as an exact rational.  Panics if `q == 0`.
pub fn frac(p: i64, q: i64) -> Rat {
    BigRational::new(int(p), int(q))
}

pub fn ivec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| int(x)).collect()
}

pub fn rvec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn int_to_rat(v: &[Int]) -> RatVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_rat(a: &[Int], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
        .sum()
}

pub fn add_vec(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vec(c: &Rat, v: &[Rat]) -> RatVec {
    v.iter().map(|x| c * x).collect()
}

/// Clears denominators and divides by the content, then fixes the sign so
/// the first nonzero entry is positive.  The zero vector maps to itself.
pub fn primitive(v: &[Rat]) -> IntVec {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: IntVec = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    primitive_int(&ints)
}

/// Like [`primitive`] but scales by a positive factor only, preserving the
/// orientation; use for inequality normals.
pub fn primitive_pos(v: &[Rat]) -> IntVec {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: IntVec = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return ints;
    }
    ints.iter().map(|x| x / &gcd).collect()
}

pub fn primitive_int(v: &[Int]) -> IntVec {
    let gcd = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    let mut out: IntVec = v.iter().map(|x| x / &gcd).collect();
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut out {
                *x = -x.clone();
            }
        }
    }
    out
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<IntVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> IntVec {
        (0..self.rows).map(|i| dot_int(self.row(i), v)).collect()
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn det(&self) -> Int {
        let d = self.to_rat().det();
        debug_assert!(d.denom().is_one());
        d.numer().clone()
    }

    /// Smith normal form: returns unimodular `(u, v)` and diagonal `d` with
    /// `u * self * v = d`, diagonal entries nonnegative and each dividing
    /// the next.
    pub fn smith_normal_form(&self) -> (IntMat, IntMat, IntMat) {
        let mut d = self.clone();
        let mut u = IntMat::identity(self.rows);
        let mut v = IntMat::identity(self.cols);

        let steps = self.rows.min(self.cols);
        for t in 0..steps {
            'reduce: loop {
                // smallest nonzero entry of the trailing block becomes the pivot
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..d.rows {
                    for j in t..d.cols {
                        if !d.at(i, j).is_zero()
                            && pivot.map_or(true, |(pi, pj)| {
                                d.at(i, j).abs() < d.at(pi, pj).abs()
                            })
                        {
                            pivot = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = pivot else { break 'reduce };
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);

                let mut dirty = false;
                for i in t + 1..d.rows {
                    if !d.at(i, t).is_zero() {
                        let q = d.at(i, t).div_floor(d.at(t, t));
                        d.row_op(i, t, &q);
                        u.row_op(i, t, &q);
                        dirty = dirty || !d.at(i, t).is_zero();
                    }
                }
                for j in t + 1..d.cols {
                    if !d.at(t, j).is_zero() {
                        let q = d.at(t, j).div_floor(d.at(t, t));
                        d.col_op(j, t, &q);
                        v.col_op(j, t, &q);
                        dirty = dirty || !d.at(t, j).is_zero();
                    }
                }
                if dirty {
                    continue 'reduce;
                }
                // pivot now alone in its row and column; enforce divisibility
                let mut fixed = true;
                'divcheck: for i in t + 1..d.rows {
                    for j in t + 1..d.cols {
                        if !(d.at(i, j) % d.at(t, t)).is_zero() {
                            // fold row i into row t so the pivot shrinks
                            d.row_add(t, i);
                            u.row_add(t, i);
                            fixed = false;
                            break 'divcheck;
                        }
                    }
                }
                if fixed {
                    break 'reduce;
                }
            }
            if d.at(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
        }
        (u, d, v)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[i] -= q * row[t]
    fn row_op(&mut self, i: usize, t: usize, q: &Int) {
        for j in 0..self.cols {
            let v = self.at(i, j) - q * self.at(t, j);
            self.set(i, j, v);
        }
    }

    /// col[j] -= q * col[t]
    fn col_op(&mut self, j: usize, t: usize, q: &Int) {
        for i in 0..self.rows {
            let v = self.at(i, j) - q * self.at(i, t);
            self.set(i, j, v);
        }
    }

    /// row[t] += row[i]
    fn row_add(&mut self, t: usize, i: usize) {
        for j in 0..self.cols {
            let v = self.at(t, j) + self.at(i, j);
            self.set(t, j, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.at(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// A basis of the saturated lattice `{x ∈ Z^cols : self · x = 0}`,
    /// read off the unimodular column transform of the Smith form.
    pub fn kernel_lattice(&self) -> Vec<IntVec> {
        let (_, d, v) = self.smith_normal_form();
        let rank = (0..self.rows.min(self.cols))
            .take_while(|&i| !d.at(i, i).is_zero())
            .count();
        (rank..self.cols).map(|j| v.col(j)).collect()
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<RatVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        RatMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rat]) -> RatVec {
        (0..self.rows).map(|i| dot_rat(self.row(i), v)).collect()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = m.rows;
        let mut det = BigRational::one();
        for t in 0..n {
            let Some(p) = (t..n).find(|&i| !m.at(i, t).is_zero()) else {
                return BigRational::zero();
            };
            if p != t {
                for j in 0..n {
                    m.data.swap(t * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = m.at(t, t).clone();
            det *= &pivot;
            for i in t + 1..n {
                if m.at(i, t).is_zero() {
                    continue;
                }
                let f = m.at(i, t) / &pivot;
                for j in t..n {
                    let v = m.at(i, j) - &f * m.at(t, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, j).is_zero()) else {
                continue;
            };
            for k in 0..self.cols {
                self.data.swap(r * self.cols + k, p * self.cols + k);
            }
            let inv = self.at(r, j).recip();
            for k in 0..self.cols {
                let v = self.at(r, k) * &inv;
                self.set(r, k, v);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, j).is_zero() {
                    let f = self.at(i, j).clone();
                    for k in 0..self.cols {
                        let v = self.at(i, k) - &f * self.at(r, k);
                        self.set(i, k, v);
                    }
                }
            }
            pivots.push(j);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A rational basis of the right kernel.
    pub fn kernel(&self) -> Vec<RatVec> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> =
            (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.at(r, f).clone();
                }
                v
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(RatVec),
    NoSolution,
    Underdetermined { particular: RatVec, kernel: Vec<RatVec> },
}

impl SolveOutcome {
    /// Any solution, if one exists.
    pub fn solution(&self) -> Option<&RatVec> {
        match self {
            SolveOutcome::Unique(x) => Some(x),
            SolveOutcome::Underdetermined { particular, .. } => Some(particular),
            SolveOutcome::NoSolution => None,
        }
    }
}

/// Solves `m · x = b` exactly.
pub fn solve(m: &RatMat, b: &[Rat]) -> Result<SolveOutcome> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch { expected: m.rows, got: b.len() });
    }
    let mut aug = RatMat::zero(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.at(i, j).clone());
        }
        aug.set(i, m.cols, b[i].clone());
    }
    let pivots = aug.rref();
    if pivots.contains(&m.cols) {
        return Ok(SolveOutcome::NoSolution);
    }
    let mut particular = vec![BigRational::zero(); m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = aug.at(r, m.cols).clone();
    }
    if pivots.len() == m.cols {
        return Ok(SolveOutcome::Unique(particular));
    }
    let kernel = m.kernel();
    Ok(SolveOutcome::Underdetermined { particular, kernel })
}

/// `⟨a, x⟩ = b` rows plus `⟨a, x⟩ ≥ b` / `⟨a, x⟩ > b` rows over free
/// rational variables.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub nvars: usize,
    pub eqs: Vec<(RatVec, Rat)>,
    pub ineqs: Vec<(RatVec, Rat, bool)>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem { nvars, eqs: Vec::new(), ineqs: Vec::new() }
    }

    pub fn eq(&mut self, a: RatVec, b: Rat) -> &mut Self {
        debug_assert_eq!(a.len(), self.nvars);
        self.eqs.push((a, b));
        self
    }

    /// `⟨a, x⟩ ≥ b`
    pub fn ge(&mut self, a: RatVec, b: Rat) -> &mut Self {
        debug_assert_eq!(a.len(), self.nvars);
        self.ineqs.push((a, b, false));
        self
    }

    /// `⟨a, x⟩ > b`
    pub fn gt(&mut self, a: RatVec, b: Rat) -> &mut Self {
        debug_assert_eq!(a.len(), self.nvars);
        self.ineqs.push((a, b, true));
        self
    }

    /// `⟨a, x⟩ ≤ b`
    pub fn le(&mut self, a: RatVec, b: Rat) -> &mut Self {
        let neg: RatVec = a.iter().map(|x| -x.clone()).collect();
        self.ge(neg, -b)
    }

    /// `⟨a, x⟩ < b`
    pub fn lt(&mut self, a: RatVec, b: Rat) -> &mut Self {
        let neg: RatVec = a.iter().map(|x| -x.clone()).collect();
        self.gt(neg, -b)
    }
}

/// Is the system satisfiable, honoring strict inequalities exactly?  Returns
/// a witness point when it is.  Decided by maximizing one shared slack `s`
/// with every strict row relaxed to `⟨a,x⟩ - s ≥ b` and `0 ≤ s ≤ 1`; the
/// system is satisfiable iff the optimum has `s > 0`.
pub fn feasible(sys: &LinearSystem) -> Option<RatVec> {
    let n = sys.nvars;
    let mut lp = LpBuilder::new(n + 1);
    for (a, b) in &sys.eqs {
        let mut row = a.clone();
        row.push(BigRational::zero());
        lp.eq(row, b.clone());
    }
    for (a, b, strict) in &sys.ineqs {
        let mut row = a.clone();
        row.push(if *strict { -rat(1) } else { BigRational::zero() });
        lp.ge(row, b.clone());
    }
    let mut s_cap = vec![BigRational::zero(); n + 1];
    s_cap[n] = -rat(1);
    lp.ge(s_cap, -rat(1)); // s ≤ 1
    let mut s_pos = vec![BigRational::zero(); n + 1];
    s_pos[n] = rat(1);
    lp.ge(s_pos.clone(), rat(0)); // s ≥ 0
    match lp.maximize(&s_pos) {
        LpOutcome::Optimal { value, point } => {
            if value.is_positive() {
                Some(point[..n].to_vec())
            } else {
                None
            }
        }
        LpOutcome::Infeasible => None,
        // objective is capped by s ≤ 1
        LpOutcome::Unbounded => unreachable!("slack objective is bounded"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: RatVec },
    Infeasible,
    Unbounded,
}

/// Maximizes `⟨obj, x⟩` over the non-strict part of a constraint system with
/// free variables.  Strict rows are treated as non-strict here; use
/// [`feasible`] when strictness matters.
pub fn maximize(obj: &[Rat], sys: &LinearSystem) -> LpOutcome {
    let mut lp = LpBuilder::new(sys.nvars);
    for (a, b) in &sys.eqs {
        lp.eq(a.clone(), b.clone());
    }
    for (a, b, _) in &sys.ineqs {
        lp.ge(a.clone(), b.clone());
    }
    lp.maximize(obj)
}

pub fn minimize(obj: &[Rat], sys: &LinearSystem) -> LpOutcome {
    let neg: RatVec = obj.iter().map(|x| -x.clone()).collect();
    match maximize(&neg, sys) {
        LpOutcome::Optimal { value, point } => {
            LpOutcome::Optimal { value: -value, point }
        }
        other => other,
    }
}

/// Converts free-variable constraints to standard equality form
/// (`A y = b, y ≥ 0` via the split `x = x⁺ - x⁻`) and runs two-phase
/// simplex.
struct LpBuilder {
    nvars: usize,
    eqs: Vec<(RatVec, Rat)>,
    ges: Vec<(RatVec, Rat)>,
}

impl LpBuilder {
    fn new(nvars: usize) -> Self {
        LpBuilder { nvars, eqs: Vec::new(), ges: Vec::new() }
    }

    fn eq(&mut self, a: RatVec, b: Rat) {
        self.eqs.push((a, b));
    }

    fn ge(&mut self, a: RatVec, b: Rat) {
        self.ges.push((a, b));
    }

    fn maximize(&self, obj: &[Rat]) -> LpOutcome {
        let n = self.nvars;
        let nslack = self.ges.len();
        let ncols = 2 * n + nslack;
        let mut rows: Vec<RatVec> = Vec::new();
        let mut rhs: RatVec = Vec::new();
        let expand = |a: &[Rat], slack: Option<usize>| -> RatVec {
            let mut row = Vec::with_capacity(ncols);
            row.extend(a.iter().cloned());
            row.extend(a.iter().map(|x| -x.clone()));
            let mut tail = vec![BigRational::zero(); nslack];
            if let Some(s) = slack {
                tail[s] = -rat(1);
            }
            row.extend(tail);
            row
        };
        for (a, b) in &self.eqs {
            rows.push(expand(a, None));
            rhs.push(b.clone());
        }
        for (s, (a, b)) in self.ges.iter().enumerate() {
            rows.push(expand(a, Some(s)));
            rhs.push(b.clone());
        }
        let mut cost = Vec::with_capacity(ncols);
        cost.extend(obj.iter().cloned());
        cost.extend(obj.iter().map(|x| -x.clone()));
        cost.extend(vec![BigRational::zero(); nslack]);

        match simplex(rows, rhs, &cost) {
            SimplexOutcome::Optimal { value, point } => {
                let x: RatVec =
                    (0..n).map(|i| &point[i] - &point[n + i]).collect();
                LpOutcome::Optimal { value, point: x }
            }
            SimplexOutcome::Infeasible => LpOutcome::Infeasible,
            SimplexOutcome::Unbounded => LpOutcome::Unbounded,
        }
    }
}

enum SimplexOutcome {
    Optimal { value: Rat, point: RatVec },
    Infeasible,
    Unbounded,
}

/// Two-phase tableau simplex for `max ⟨c, y⟩ : A y = b, y ≥ 0`, with
/// Bland's anti-cycling rule.
fn simplex(mut a: Vec<RatVec>, mut b: RatVec, c: &[Rat]) -> SimplexOutcome {
    let m = a.len();
    let n = c.len();
    for i in 0..m {
        if b[i].is_negative() {
            for v in a[i].iter_mut() {
                *v = -v.clone();
            }
            b[i] = -b[i].clone();
        }
    }
    // phase 1: artificial identity basis
    for (i, row) in a.iter_mut().enumerate() {
        for k in 0..m {
            row.push(if k == i { rat(1) } else { BigRational::zero() });
        }
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut phase1_cost = vec![BigRational::zero(); n + m];
    for item in phase1_cost.iter_mut().skip(n) {
        *item = -rat(1);
    }
    run_simplex(&mut a, &mut b, &mut basis, &phase1_cost, n + m);
    let p1_value: Rat = basis
        .iter()
        .zip(&b)
        .map(|(&j, bi)| &phase1_cost[j] * bi)
        .sum();
    if !p1_value.is_zero() {
        return SimplexOutcome::Infeasible;
    }
    // drive surviving artificials out of the basis, dropping redundant rows
    let mut keep = vec![true; a.len()];
    for i in 0..a.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !a[i][j].is_zero()) {
                pivot(&mut a, &mut b, &mut basis, i, j);
            } else {
                keep[i] = false;
            }
        }
    }
    let mut ka = Vec::new();
    let mut kb = Vec::new();
    let mut kbasis = Vec::new();
    for i in 0..a.len() {
        if keep[i] {
            let mut row = a[i].clone();
            row.truncate(n);
            ka.push(row);
            kb.push(b[i].clone());
            kbasis.push(basis[i]);
        }
    }
    let (mut a, mut b, mut basis) = (ka, kb, kbasis);
    // phase 2
    if !run_simplex(&mut a, &mut b, &mut basis, c, n) {
        return SimplexOutcome::Unbounded;
    }
    let mut point = vec![BigRational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        point[j] = b[i].clone();
    }
    let value = dot_rat(c, &point);
    SimplexOutcome::Optimal { value, point }
}

/// Bland-rule iterations until optimal (`true`) or unbounded (`false`).
fn run_simplex(
    a: &mut [RatVec],
    b: &mut RatVec,
    basis: &mut [usize],
    cost: &[Rat],
    ncols: usize,
) -> bool {
    loop {
        // reduced costs from scratch; these tableaus are small
        let mut entering = None;
        for j in 0..ncols {
            if basis.contains(&j) {
                continue;
            }
            let z: Rat = basis
                .iter()
                .enumerate()
                .map(|(i, &bj)| &cost[bj] * &a[i][j])
                .sum();
            if &cost[j] - z > BigRational::zero() {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else { return true };
        let mut leaving: Option<(usize, Rat)> = None;
        for i in 0..a.len() {
            if a[i][e].is_positive() {
                let ratio = &b[i] / &a[i][e];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leaving else { return false };
        pivot(a, b, basis, l, e);
    }
}

fn pivot(
    a: &mut [RatVec],
    b: &mut RatVec,
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let inv = a[row][col].recip();
    for v in a[row].iter_mut() {
        *v = &*v * &inv;
    }
    b[row] *= &inv;
    for i in 0..a.len() {
        if i == row || a[i][col].is_zero() {
            continue;
        }
        let f = a[i][col].clone();
        for j in 0..a[i].len() {
            let v = &a[i][j] - &f * &a[row][j];
            a[i][j] = v;
        }
        let v = &b[i] - &f * &b[row];
        b[i] = v;
    }
    basis[row] = col;
}
