//! Chamber geometry of a vector configuration.
//!
//! A [`System`] is a finite list of nonzero integer vectors spanning `R^n`,
//! contained in an open halfspace, each carrying a positive multiplicity.
//! The cone they generate is divided into big chambers: the connected
//! components of the complement of the cones spanned by fewer than `n` of
//! the vectors.  Each chamber is determined by the set of simplicial bases
//! whose cones contain it, and its closure is the intersection of those
//! cones.
//!
//! Chambers get stable identifiers `c1, c2, ...` ordered by their basis
//! sets; the exterior of the big cone is addressed as `cnull`.

use crate::error::{Error, Result};
use crate::linalg::{
    dot_int, dot_int_rat, feasible, int_to_rat, minimize, primitive, primitive_pos, rat,
    solve, IntMat, IntVec, LinearSystem, LpOutcome, Rat, RatMat, RatVec, SolveOutcome,
};
use itertools::Itertools;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
pub struct System {
    n: usize,
    vectors: Vec<IntVec>,
    multiplicities: Vec<u32>,
}

impl System {
    pub fn new(n: usize, vectors: Vec<IntVec>, multiplicities: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("ambient dimension must be positive".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidSystem("no vectors given".into()));
        }
        if multiplicities.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                got: multiplicities.len(),
            });
        }
        for v in &vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            if v.iter().all(|x| x.is_zero()) {
                return Err(Error::InvalidSystem("zero vector".into()));
            }
        }
        if multiplicities.iter().any(|&h| h == 0) {
            return Err(Error::InvalidSystem("multiplicities must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &vectors {
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidSystem(
                    "duplicate vector; raise its multiplicity instead".into(),
                ));
            }
        }
        let rows = RatMat::from_rows(vectors.iter().map(|v| int_to_rat(v)).collect());
        if rows.rank() < n {
            return Err(Error::NotSpanning);
        }
        // pointedness: some linear functional is >= 1 on every vector
        let mut sys = LinearSystem::new(n);
        for v in &vectors {
            sys.ge(int_to_rat(v), rat(1));
        }
        if feasible(&sys).is_none() {
            return Err(Error::NoHalfspace);
        }
        Ok(System { n, vectors, multiplicities })
    }

    pub fn with_unit_multiplicities(n: usize, vectors: Vec<IntVec>) -> Result<Self> {
        let m = vec![1; vectors.len()];
        Self::new(n, vectors, m)
    }

    /// Same vectors, every multiplicity scaled by `k`.
    pub fn scaled(&self, k: u32) -> Result<Self> {
        Self::new(
            self.n,
            self.vectors.clone(),
            self.multiplicities.iter().map(|h| h * k).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vectors(&self) -> &[IntVec] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &IntVec {
        &self.vectors[k]
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn multiplicity(&self, k: usize) -> u32 {
        self.multiplicities[k]
    }

    /// Number of entries of the flattened list (each vector repeated by
    /// its multiplicity); per-copy data like weights and twists use this
    /// indexing, copies of vector `k` occupying a consecutive block.
    pub fn flat_len(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    /// `flat_ranges()[k]` is the block of flattened indices of vector `k`.
    pub fn flat_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::with_capacity(self.vectors.len());
        let mut start = 0;
        for &m in &self.multiplicities {
            out.push(start..start + m as usize);
            start += m as usize;
        }
        out
    }

    /// Matrix with the vectors indexed by `indices` as columns.
    pub fn basis_matrix(&self, indices: &[usize]) -> IntMat {
        let mut m = IntMat::zero(self.n, indices.len());
        for (j, &k) in indices.iter().enumerate() {
            for i in 0..self.n {
                m.set(i, j, self.vectors[k][i].clone());
            }
        }
        m
    }

    /// All size-`n` index sets whose vectors are linearly independent,
    /// in lexicographic order.
    pub fn spanning_bases(&self) -> Vec<Vec<usize>> {
        (0..self.vectors.len())
            .combinations(self.n)
            .filter(|idx| !self.basis_matrix(idx).det().is_zero())
            .collect()
    }

    /// |det| of the basis, i.e. the index of its lattice in `Z^n`.
    pub fn basis_volume(&self, indices: &[usize]) -> BigInt {
        self.basis_matrix(indices).det().abs()
    }
}

/// One big chamber of the configuration.
#[derive(Clone, Debug)]
pub struct Chamber {
    pub id: String,
    /// index sets of the simplicial bases whose cones contain the chamber
    pub bases: Vec<Vec<usize>>,
    /// primitive inner normals: the open chamber is `⟨w, λ⟩ > 0` for all,
    /// its closure the same with ≥
    pub normals: Vec<IntVec>,
    /// a rational point strictly inside
    pub interior: RatVec,
}

impl Chamber {
    pub fn contains_strictly(&self, point: &[Rat]) -> bool {
        self.normals.iter().all(|w| dot_int_rat(w, point).is_positive())
    }

    pub fn closure_contains(&self, point: &[Rat]) -> bool {
        self.normals.iter().all(|w| !dot_int_rat(w, point).is_negative())
    }
}

/// Where a point sits relative to the chamber complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Interior(String),
    /// on the boundary of these chambers (ids ascending)
    OnWall { adjacent: Vec<String> },
    Exterior,
}

/// All hyperplanes spanned by `n-1` of the vectors, as primitive normals
/// with the first nonzero coordinate positive.
fn wall_normals(sys: &System) -> Vec<IntVec> {
    let n = sys.dim();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let mut walls = BTreeSet::new();
    for idx in (0..sys.len()).combinations(n - 1) {
        let rows = RatMat::from_rows(idx.iter().map(|&k| int_to_rat(sys.vector(k))).collect());
        let kern = rows.kernel();
        if kern.len() == 1 {
            walls.insert(primitive(&kern[0]));
        }
    }
    walls.into_iter().collect()
}

fn strict_interior(rows: &[IntVec], n: usize) -> Option<RatVec> {
    let mut sys = LinearSystem::new(n);
    for w in rows {
        sys.gt(int_to_rat(w), rat(0));
    }
    feasible(&sys)
}

/// Removes rows implied by the others; `⟨w, λ⟩ ≥ 0` over the cone cut out
/// by the rest is redundant exactly when its minimum there is 0 rather
/// than unbounded.
fn prune_cone_rows(rows: Vec<IntVec>, n: usize) -> Vec<IntVec> {
    let mut kept = rows;
    let mut i = 0;
    while i < kept.len() {
        if kept.len() == 1 {
            break;
        }
        let mut sys = LinearSystem::new(n);
        for (j, w) in kept.iter().enumerate() {
            if j != i {
                sys.ge(int_to_rat(w), rat(0));
            }
        }
        let obj = int_to_rat(&kept[i]);
        match minimize(&obj, &sys) {
            LpOutcome::Optimal { value, .. } if !value.is_negative() => {
                kept.remove(i);
            }
            _ => i += 1,
        }
    }
    kept
}

/// Enumerates the big chambers.
pub fn enumerate_chambers(sys: &System) -> Result<Vec<Chamber>> {
    let n = sys.dim();
    let walls = wall_normals(sys);

    // orient walls with every vector on one side; the rest split the cone
    let mut facet_rows: BTreeSet<IntVec> = BTreeSet::new();
    let mut splitters: Vec<IntVec> = vec![];
    for w in walls {
        let mut pos = false;
        let mut neg = false;
        for v in sys.vectors() {
            match dot_int(v, &w).sign() {
                num::bigint::Sign::Plus => pos = true,
                num::bigint::Sign::Minus => neg = true,
                num::bigint::Sign::NoSign => {}
            }
        }
        match (pos, neg) {
            (true, true) => splitters.push(w),
            (true, false) => {
                facet_rows.insert(w);
            }
            (false, true) => {
                facet_rows.insert(w.iter().map(|x| -x.clone()).collect());
            }
            (false, false) => unreachable!("wall orthogonal to a spanning set"),
        }
    }

    let base: Vec<IntVec> = facet_rows.into_iter().collect();
    let mut pieces: Vec<Vec<IntVec>> = vec![base];
    for w in &splitters {
        let mut next = vec![];
        for rows in pieces {
            for oriented in [w.clone(), w.iter().map(|x| -x.clone()).collect::<IntVec>()] {
                let mut r = rows.clone();
                r.push(oriented);
                if strict_interior(&r, n).is_some() {
                    next.push(r);
                }
            }
        }
        pieces = next;
    }

    // wall hyperplanes overshoot the singular cones, so a chamber may have
    // been cut into several pieces; pieces of one chamber carry the same
    // basis set
    let all_bases = sys.spanning_bases();
    let mut by_bases: BTreeMap<Vec<Vec<usize>>, ()> = BTreeMap::new();
    for rows in &pieces {
        let point = strict_interior(rows, n).expect("piece was feasible when split");
        let mut bases = vec![];
        for idx in &all_bases {
            let m = sys.basis_matrix(idx).to_rat();
            if let SolveOutcome::Unique(x) = solve(&m, &point)? {
                if x.iter().all(|c| !c.is_negative()) {
                    bases.push(idx.clone());
                }
            }
        }
        if bases.is_empty() {
            // cannot happen: every piece lies in the big cone, which the
            // simplicial cones cover
            return Err(Error::Invalid("piece outside every simplicial cone".into()));
        }
        by_bases.insert(bases, ());
    }

    let mut chambers = vec![];
    for (k, (bases, ())) in by_bases.into_iter().enumerate() {
        // closure of the chamber = intersection of its bases' cones,
        // rows of the inverse basis matrices as inner normals
        let mut rows: BTreeSet<IntVec> = BTreeSet::new();
        for idx in &bases {
            let mt = sys.basis_matrix(idx).transpose().to_rat();
            for i in 0..n {
                let mut e = vec![BigRational::zero(); n];
                e[i] = BigRational::one();
                match solve(&mt, &e)? {
                    SolveOutcome::Unique(y) => {
                        rows.insert(primitive_pos(&y));
                    }
                    _ => unreachable!("basis matrix is invertible"),
                }
            }
        }
        let normals = prune_cone_rows(rows.into_iter().collect(), n);
        let interior =
            strict_interior(&normals, n).ok_or_else(|| Error::Invalid("empty chamber".into()))?;
        chambers.push(Chamber {
            id: format!("c{}", k + 1),
            bases,
            normals,
            interior,
        });
    }
    Ok(chambers)
}

/// Locates a point: strictly inside one chamber, on walls of the chambers
/// whose closures contain it, or outside the cone entirely.
pub fn chamber_of(chambers: &[Chamber], point: &[Rat]) -> Location {
    for c in chambers {
        if c.contains_strictly(point) {
            return Location::Interior(c.id.clone());
        }
    }
    let adjacent: Vec<String> = chambers
        .iter()
        .filter(|c| c.closure_contains(point))
        .map(|c| c.id.clone())
        .collect();
    if adjacent.is_empty() {
        Location::Exterior
    } else {
        Location::OnWall { adjacent }
    }
}

/// Whether the closed formula attached to `chamber` evaluates the counting
/// function correctly at `point`: the point plus some sub-box combination
/// of the vectors must reach the open chamber, with the multiplicities as
/// box bounds.
pub fn in_validity_region(sys: &System, chamber: &Chamber, point: &[Rat]) -> bool {
    in_validity_region_with(sys, chamber, point, sys.multiplicities())
}

/// Same with explicit box heights per vector (for weights whose box is
/// taller than the plain multiplicities).
pub fn in_validity_region_with(
    sys: &System,
    chamber: &Chamber,
    point: &[Rat],
    heights: &[u32],
) -> bool {
    let nvars = sys.len();
    let mut lp = LinearSystem::new(nvars);
    for k in 0..nvars {
        let mut row = vec![BigRational::zero(); nvars];
        row[k] = BigRational::one();
        lp.ge(row.clone(), rat(0));
        lp.le(row, rat(heights[k] as i64));
    }
    for w in &chamber.normals {
        let mut row = vec![BigRational::zero(); nvars];
        for (k, v) in sys.vectors().iter().enumerate() {
            row[k] = BigRational::from_integer(dot_int(w, v));
        }
        let c = dot_int_rat(w, point);
        lp.gt(row, -c);
    }
    feasible(&lp).is_some()
}

/// Irredundant description `⟨w, λ⟩ > r` of the validity region of a
/// chamber's formula, rows sorted.
pub fn validity_inequalities(sys: &System, chamber: &Chamber) -> Vec<(IntVec, Rat)> {
    validity_inequalities_with(sys, chamber, sys.multiplicities())
}

/// Same with explicit box heights per vector.
pub fn validity_inequalities_with(
    sys: &System,
    chamber: &Chamber,
    heights: &[u32],
) -> Vec<(IntVec, Rat)> {
    let n = sys.dim();
    let nt = sys.len();
    // rows over (λ, t): coeffs, rhs, strict
    let mut rows: Vec<(RatVec, Rat, bool)> = vec![];
    for k in 0..nt {
        let mut a = vec![BigRational::zero(); n + nt];
        a[n + k] = BigRational::one();
        rows.push((a.clone(), rat(0), false));
        let neg: RatVec = a.iter().map(|x| -x.clone()).collect();
        rows.push((neg, rat(-(heights[k] as i64)), false));
    }
    for w in &chamber.normals {
        let mut a: RatVec = int_to_rat(w);
        for v in sys.vectors() {
            a.push(BigRational::from_integer(dot_int(w, v)));
        }
        rows.push((a, rat(0), true));
    }

    for var in (n..n + nt).rev() {
        let mut zero_rows = vec![];
        let mut pos = vec![];
        let mut neg = vec![];
        for r in rows {
            if r.0[var].is_zero() {
                zero_rows.push(r);
            } else if r.0[var].is_positive() {
                pos.push(r);
            } else {
                neg.push(r);
            }
        }
        let mut combined: BTreeMap<(Vec<Rat>, Rat), bool> = BTreeMap::new();
        let mut push = |a: RatVec, b: Rat, strict: bool| {
            if a.iter().all(|x| x.is_zero()) {
                debug_assert!(if strict { b.is_negative() } else { !b.is_positive() });
                return;
            }
            let (na, nb) = normalize_row(&a, &b);
            let e = combined.entry((na, nb)).or_insert(false);
            *e = *e || strict;
        };
        for (a, b, s) in zero_rows {
            push(a, b, s);
        }
        for (pa, pb, ps) in &pos {
            for (na_, nb_, ns) in &neg {
                let cp = &pa[var];
                let cn = &na_[var];
                // cp·(neg row) − cn·(pos row) keeps both senses
                let a: RatVec = pa
                    .iter()
                    .zip(na_)
                    .map(|(x, y)| cp.clone() * y - cn.clone() * x)
                    .collect();
                let b = cp.clone() * nb_ - cn.clone() * pb;
                push(a, b, *ps || *ns);
            }
        }
        rows = combined
            .into_iter()
            .map(|((a, b), s)| (a, b, s))
            .collect();
        rows = prune_affine_rows(rows, n + nt);
    }

    let mut out: Vec<(IntVec, Rat)> = rows
        .into_iter()
        .map(|(a, b, _)| {
            let w = primitive_pos(&a[..n]);
            // primitive() rescales by a positive factor; apply it to b
            let scale = a
                .iter()
                .zip(&w)
                .find(|(x, _)| !x.is_zero())
                .map(|(x, y)| BigRational::from_integer(y.clone()) / x)
                .unwrap();
            (w, b * scale)
        })
        .collect();
    out.sort();
    out
}

fn normalize_row(a: &[Rat], b: &Rat) -> (RatVec, Rat) {
    let first = a.iter().find(|x| !x.is_zero());
    let scale = match first {
        Some(x) => x.abs().recip(),
        None => return (a.to_vec(), b.clone()),
    };
    (
        a.iter().map(|x| x * &scale).collect(),
        b * &scale,
    )
}

fn prune_affine_rows(rows: Vec<(RatVec, Rat, bool)>, nvars: usize) -> Vec<(RatVec, Rat, bool)> {
    let mut kept = rows;
    let mut i = 0;
    while i < kept.len() {
        let mut sys = LinearSystem::new(nvars);
        for (j, (a, b, _)) in kept.iter().enumerate() {
            if j != i {
                sys.ge(a.clone(), b.clone());
            }
        }
        let redundant = match minimize(&kept[i].0, &sys) {
            LpOutcome::Optimal { value, .. } => value >= kept[i].1,
            _ => false,
        };
        if redundant && kept.len() > 1 {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}
