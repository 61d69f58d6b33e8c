//! Iterated residues of meromorphic functions with hyperplane poles.
//!
//! The counting formulas all reduce to the same projection: expand a
//! meromorphic function at a pole of its denominator lattice, keep the
//! homogeneous part of the correct degree over the product of the singular
//! linear forms, rewrite that fraction as a combination of simple
//! fractions `1/(α_1···α_n)` over bases, and pair the result with a
//! chamber.  The pairing sends `1/Π_{α∈σ}α` to `1/vol(σ)` when the chamber
//! lies in the cone of `σ` and to zero otherwise; terms whose denominators
//! do not span contribute nothing.

use crate::arrangement::{Chamber, System};
use crate::cyclotomic::CycNumber;
use crate::error::Result;
use crate::linalg::{
    dot_int_rat, int_to_rat, solve, IntVec, Rat, RatMat, RatVec, SolveOutcome,
};
use crate::series::{todd_series, twisted_inverse_series, SymbolicPoly, TruncSeries};
use itertools::Itertools;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A point of the torus `R^n/Z^n` with rational coordinates in `[0,1)`,
/// standing for the character `λ ↦ exp(-2πi⟨λ,q⟩)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pole {
    pub coords: RatVec,
}

impl Pole {
    pub fn new(coords: RatVec) -> Self {
        Pole { coords: coords.iter().map(frac_part).collect() }
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// lcm of the coordinate denominators
    pub fn order(&self) -> u64 {
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
            .to_u64()
            .expect("pole order fits in u64")
    }
}

pub fn frac_part(x: &Rat) -> Rat {
    x - x.floor()
}

/// The solutions `q` of `⟨β_j, q⟩ ≡ -r_j (mod Z)` for the basis members
/// `β_j`, as points of the torus; there are exactly `vol(σ)` of them.
pub fn poles_of_basis(sys: &System, indices: &[usize], twist: &[Rat]) -> Vec<Pole> {
    let n = sys.dim();
    assert_eq!(indices.len(), n);
    assert_eq!(twist.len(), n);
    let m = sys.basis_matrix(indices).transpose();
    let (u, d, v) = m.smith_normal_form();
    let neg_r: RatVec = twist.iter().map(|x| -x.clone()).collect();
    let s = u.to_rat().mul_vec(&neg_r);
    let divisors: Vec<u64> = (0..n)
        .map(|i| d.at(i, i).to_u64().expect("positive invariant factor"))
        .collect();
    let vrat = v.to_rat();
    let mut poles = vec![];
    let mut counter = vec![0u64; n];
    loop {
        let w: RatVec = (0..n)
            .map(|i| {
                (&s[i] + BigRational::from_integer(BigInt::from(counter[i])))
                    / BigRational::from_integer(BigInt::from(divisors[i]))
            })
            .collect();
        poles.push(Pole::new(vrat.mul_vec(&w)));
        let mut i = 0;
        loop {
            if i == n {
                poles.sort();
                return poles;
            }
            counter[i] += 1;
            if counter[i] < divisors[i] {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// Union of the pole sets of the given bases, one twist choice per basis
/// member drawn from the per-vector twist lists; sorted and deduplicated.
pub fn pole_union(sys: &System, bases: &[Vec<usize>], twists: &[Vec<Rat>]) -> Vec<Pole> {
    let mut set: BTreeSet<Pole> = BTreeSet::new();
    for idx in bases {
        let lists: Vec<&Vec<Rat>> = idx.iter().map(|&k| &twists[k]).collect();
        for combo in lists.iter().map(|l| l.iter()).multi_cartesian_product() {
            let twist: RatVec = combo.into_iter().cloned().collect();
            for p in poles_of_basis(sys, idx, &twist) {
                set.insert(p);
            }
        }
    }
    set.into_iter().collect()
}

/// Deduplicated union of the pole sets over a chamber's bases, together
/// with the least common order of the poles and twists: the root-of-unity
/// order every coefficient of the resulting formula lives in.
pub fn reduced_pole_set(
    sys: &System,
    chamber: &Chamber,
    twists: &[Vec<Rat>],
) -> (Vec<Pole>, u64) {
    let poles = pole_union(sys, &chamber.bases, twists);
    let mut order = BigInt::one();
    for p in &poles {
        order = order.lcm(&BigInt::from(p.order()));
    }
    for list in twists {
        for t in list {
            order = order.lcm(t.denom());
        }
    }
    (poles, order.to_u64().expect("order fits in u64"))
}

/// A fraction with hyperplane poles written as a combination of simple
/// fractions over bases plus terms whose denominators do not span (these
/// have total residue zero).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleFractionVector {
    /// basis (sorted distinct spanning vectors) → coefficient of `1/Πα`
    pub simple: BTreeMap<Vec<IntVec>, Rat>,
    /// (numerator monomial, denominator multiset) → coefficient
    pub dropped: BTreeMap<(Vec<u32>, Vec<IntVec>), Rat>,
}

impl SimpleFractionVector {
    fn scaled_add(&mut self, other: &SimpleFractionVector, c: &Rat) {
        for (k, v) in &other.simple {
            let e = self.simple.entry(k.clone()).or_insert_with(BigRational::zero);
            *e += v * c;
            if e.is_zero() {
                self.simple.remove(k);
            }
        }
        for (k, v) in &other.dropped {
            let e = self.dropped.entry(k.clone()).or_insert_with(BigRational::zero);
            *e += v * c;
            if e.is_zero() {
                self.dropped.remove(k);
            }
        }
    }

    pub fn evaluate_simple(&self, z: &[Rat]) -> Rat {
        let mut acc = BigRational::zero();
        for (sigma, c) in &self.simple {
            let mut den = BigRational::one();
            for a in sigma {
                den *= dot_int_rat(a, z);
            }
            acc += c / den;
        }
        acc
    }

    pub fn evaluate_dropped(&self, z: &[Rat]) -> Rat {
        let mut acc = BigRational::zero();
        for ((mono, denoms), c) in &self.dropped {
            let mut num = c.clone();
            for (i, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    num *= &z[i];
                }
            }
            let mut den = BigRational::one();
            for a in denoms {
                den *= dot_int_rat(a, z);
            }
            acc += num / den;
        }
        acc
    }

    pub fn evaluate(&self, z: &[Rat]) -> Rat {
        self.evaluate_simple(z) + self.evaluate_dropped(z)
    }
}

/// Decomposes `Σ c_m z^m / Π denoms` where each monomial has total degree
/// `|denoms| - n`.  The `denoms` are given as a multiset of integer
/// vectors standing for the linear forms `⟨α, z⟩`.
pub fn simple_fraction_decompose(
    numerator: &[(Vec<u32>, Rat)],
    denoms: &[IntVec],
) -> SimpleFractionVector {
    let mut sorted: Vec<IntVec> = denoms.to_vec();
    sorted.sort();
    let mut memo = HashMap::new();
    let mut out = SimpleFractionVector::default();
    for (mono, c) in numerator {
        if c.is_zero() {
            continue;
        }
        let dec = decompose_monomial(mono.clone(), sorted.clone(), &mut memo);
        out.scaled_add(&dec, c);
    }
    out
}

type Memo = HashMap<(Vec<u32>, Vec<IntVec>), SimpleFractionVector>;

fn decompose_monomial(mono: Vec<u32>, denoms: Vec<IntVec>, memo: &mut Memo) -> SimpleFractionVector {
    if let Some(hit) = memo.get(&(mono.clone(), denoms.clone())) {
        return hit.clone();
    }
    let n = denoms[0].len();
    debug_assert_eq!(
        mono.iter().sum::<u32>() as usize + n,
        denoms.len(),
        "decomposition keeps total degree -n"
    );
    let distinct: Vec<IntVec> = denoms.iter().cloned().dedup().collect();
    let rank = RatMat::from_rows(distinct.iter().map(|v| int_to_rat(v)).collect()).rank();
    let mut out = SimpleFractionVector::default();
    if rank < n {
        out.dropped.insert((mono.clone(), denoms.clone()), BigRational::one());
    } else if denoms.len() == n {
        out.simple.insert(denoms.clone(), BigRational::one());
    } else {
        let t = mono.iter().position(|&e| e > 0).expect("numerator is non-constant");
        let mut child_mono = mono.clone();
        child_mono[t] -= 1;
        let on_axis = denoms.iter().position(|d| {
            !d[t].is_zero() && d.iter().enumerate().all(|(i, x)| i == t || x.is_zero())
        });
        if let Some(pos) = on_axis {
            // the coordinate cancels against a denominator on its own axis
            let mut child_denoms = denoms.clone();
            let form = child_denoms.remove(pos);
            let sub = decompose_monomial(child_mono, child_denoms, memo);
            out.scaled_add(&sub, &BigRational::new(BigInt::one(), form[t].clone()));
        } else {
            // first spanning subset of the distinct forms, greedily by order
            let mut tau: Vec<IntVec> = vec![];
            for v in &distinct {
                if tau.len() == n {
                    break;
                }
                let mut cand = tau.clone();
                cand.push(v.clone());
                let r = RatMat::from_rows(cand.iter().map(|w| int_to_rat(w)).collect()).rank();
                if r > tau.len() {
                    tau = cand;
                }
            }
            // e_t = Σ γ_k τ_k
            let mut cols = RatMat::zero(n, n);
            for (j, w) in tau.iter().enumerate() {
                for i in 0..n {
                    cols.set(i, j, BigRational::from_integer(w[i].clone()));
                }
            }
            let mut e = vec![BigRational::zero(); n];
            e[t] = BigRational::one();
            let gamma = match solve(&cols, &e).expect("square solve") {
                SolveOutcome::Unique(g) => g,
                _ => unreachable!("tau is a basis"),
            };
            for (k, g) in gamma.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                let mut child_denoms = denoms.clone();
                let pos = child_denoms.iter().position(|d| *d == tau[k]).unwrap();
                child_denoms.remove(pos);
                let sub = decompose_monomial(child_mono.clone(), child_denoms, memo);
                out.scaled_add(&sub, g);
            }
        }
    }
    memo.insert((mono, denoms), out.clone());
    out
}

/// `1/vol(σ)` if the chamber lies in the cone spanned by `σ`, else 0.
fn pairing_weight(chamber: &Chamber, sigma: &[IntVec]) -> Result<Rat> {
    let n = sigma[0].len();
    let mut cols = RatMat::zero(n, n);
    for (j, v) in sigma.iter().enumerate() {
        for i in 0..n {
            cols.set(i, j, BigRational::from_integer(v[i].clone()));
        }
    }
    let det = cols.det();
    match solve(&cols, &chamber.interior)? {
        SolveOutcome::Unique(x) if x.iter().all(|c| c.is_positive()) => Ok(det.abs().recip()),
        SolveOutcome::Unique(_) => Ok(BigRational::zero()),
        _ => unreachable!("sigma is a basis"),
    }
}

/// Pairs an already-decomposed fraction with a chamber: each simple part
/// over a basis `σ` contributes `coeff/vol(σ)` when the chamber lies in
/// the cone of `σ`; dropped parts contribute nothing.
pub fn chamber_pairing(v: &SimpleFractionVector, chamber: &Chamber) -> Result<Rat> {
    let mut acc = BigRational::zero();
    for (sigma, c) in &v.simple {
        acc += c * pairing_weight(chamber, sigma)?;
    }
    Ok(acc)
}

/// Total residue of `e^{⟨a,z⟩} / Π (1 - e^{-⟨vector,z⟩})^{power}` for a
/// fixed numeric direction `a`, as a simple-fraction combination.  The
/// vectors need not lie in a halfspace; if they do not span, everything
/// lands in `dropped` and the residue is zero.
pub fn total_residue(
    exp_dir: &[Rat],
    factors: &[(IntVec, u32)],
    n: usize,
) -> SimpleFractionVector {
    let total: u32 = factors.iter().map(|(_, p)| p).sum();
    assert!(total >= n as u32, "need at least n denominator factors");
    let d = total - n as u32;
    let mut series = {
        let mut exp_coeffs = vec![CycNumber::one()];
        let mut fact = BigRational::one();
        for k in 1..=d {
            fact *= BigRational::from_integer(BigInt::from(k));
            exp_coeffs.push(CycNumber::from_rat(fact.clone().recip()));
        }
        TruncSeries::from_univariate(&exp_coeffs, exp_dir, d)
    };
    let mut denoms = vec![];
    for (v, p) in factors {
        let todd: Vec<CycNumber> =
            todd_series(*p, d).into_iter().map(CycNumber::from_rat).collect();
        series = series.mul(&TruncSeries::from_univariate(&todd, &int_to_rat(v), d));
        for _ in 0..*p {
            denoms.push(v.clone());
        }
    }
    denoms.sort();
    let mut memo: Memo = HashMap::new();
    let mut out = SimpleFractionVector::default();
    for (mono, coeff) in series.homogeneous(d) {
        let rc = coeff.rational_coeffs().expect("numeric numerator");
        debug_assert!(rc.keys().all(|k| k.iter().all(|&e| e == 0)));
        let c = rc.into_values().next().unwrap_or_else(BigRational::zero);
        if c.is_zero() {
            continue;
        }
        let dec = decompose_monomial(mono, denoms.clone(), &mut memo);
        out.scaled_add(&dec, &c);
    }
    out
}

/// Pairs a truncated series over the given denominator multiset with the
/// chamber: decompose the homogeneous layer of degree `|denoms| - n` and
/// collect the simple coefficients weighted by the chamber pairing.
fn project_series(
    chamber: &Chamber,
    numerator: &TruncSeries,
    denoms: &[IntVec],
    n: usize,
) -> Result<SymbolicPoly> {
    let d = (denoms.len() - n) as u32;
    let mut sorted = denoms.to_vec();
    sorted.sort();
    let mut memo: Memo = HashMap::new();
    let mut weights: BTreeMap<Vec<IntVec>, Rat> = BTreeMap::new();
    let mut out = SymbolicPoly::zero(n);
    for (mono, coeff) in numerator.homogeneous(d) {
        let dec = decompose_monomial(mono, sorted.clone(), &mut memo);
        for (sigma, c) in &dec.simple {
            if !weights.contains_key(sigma) {
                let w = pairing_weight(chamber, sigma)?;
                weights.insert(sigma.clone(), w);
            }
            let w = &weights[sigma];
            if !w.is_zero() {
                out = out.add(&coeff.scale_rat(&(c * w)));
            }
        }
    }
    Ok(out)
}

/// One denominator factor `(1 - e^{2πi·exponent} e^{-⟨vector, z⟩})^{power}`
/// as seen at a fixed pole: `exponent` already includes the pole pairing.
#[derive(Clone, Debug)]
pub struct TwistedFactor {
    pub vector: IntVec,
    pub power: u32,
    pub exponent: Rat,
}

/// The residue contribution of one pole: pairs the chamber with the total
/// residue of `Σ_j coeff_j e^{⟨λ - shift_j, z⟩} / Π factors`, leaving `λ`
/// symbolic.  Factors with integral exponent are the singular ones; if
/// they do not span, the contribution is zero.
pub fn twisted_residue(
    chamber: &Chamber,
    factors: &[TwistedFactor],
    numerator: &[(RatVec, CycNumber)],
    n: usize,
) -> Result<SymbolicPoly> {
    let singular: Vec<&TwistedFactor> =
        factors.iter().filter(|f| f.exponent.is_integer()).collect();
    let rows: Vec<RatVec> = singular.iter().map(|f| int_to_rat(&f.vector)).collect();
    if rows.is_empty() || RatMat::from_rows(rows).rank() < n {
        return Ok(SymbolicPoly::zero(n));
    }
    let total: u32 = singular.iter().map(|f| f.power).sum();
    let d = total - n as u32;

    let mut series = TruncSeries::zero(n, d);
    for (shift, coeff) in numerator {
        if coeff.is_zero() {
            continue;
        }
        let e = TruncSeries::exp_symbolic(shift, d);
        series = series.add(&e.scale(&SymbolicPoly::constant(n, coeff.clone())));
    }
    let mut denoms: Vec<IntVec> = vec![];
    for f in factors {
        if f.exponent.is_integer() {
            let todd: Vec<CycNumber> = todd_series(f.power, d)
                .into_iter()
                .map(CycNumber::from_rat)
                .collect();
            series = series.mul(&TruncSeries::from_univariate(&todd, &int_to_rat(&f.vector), d));
            for _ in 0..f.power {
                denoms.push(f.vector.clone());
            }
        } else {
            let inv = twisted_inverse_series(&f.exponent, f.power, d)?;
            series = series.mul(&TruncSeries::from_univariate(&inv, &int_to_rat(&f.vector), d));
        }
    }
    project_series(chamber, &series, &denoms, n)
}

/// Pairs the chamber with the total residue of
/// `e^{⟨λ,z⟩} / Π ⟨vector, z⟩^{power}`: the polynomial giving the
/// top-degree behaviour of the counting function.
pub fn volume_residue(
    chamber: &Chamber,
    factors: &[(IntVec, u32)],
    n: usize,
) -> Result<SymbolicPoly> {
    let total: u32 = factors.iter().map(|(_, p)| p).sum();
    let d = total - n as u32;
    let series = TruncSeries::exp_symbolic(&vec![BigRational::zero(); n], d);
    let mut denoms = vec![];
    for (v, p) in factors {
        for _ in 0..*p {
            denoms.push(v.clone());
        }
    }
    project_series(chamber, &series, &denoms, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::enumerate_chambers;
    use crate::cyclotomic::inv_one_minus_root;
    use crate::linalg::{frac, ivec, rat, rvec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a2() -> System {
        System::with_unit_multiplicities(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])],
        )
        .unwrap()
    }

    fn nonuni() -> System {
        System::with_unit_multiplicities(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 2])],
        )
        .unwrap()
    }

    #[test]
    fn worked_decomposition_example() {
        // (3z1² - 13/12 z1z2) / (z1 z2 (z1-z2)²)
        //   = 23/12 · 1/(z1-z2)²  +  3 · 1/(z2(z1-z2))
        let numerator = vec![(vec![2, 0], rat(3)), (vec![1, 1], frac(-13, 12))];
        let denoms = vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, -1]), ivec(&[1, -1])];
        let dec = simple_fraction_decompose(&numerator, &denoms);

        let dropped_key = (vec![0u32, 0], vec![ivec(&[1, -1]), ivec(&[1, -1])]);
        assert_eq!(dec.dropped.len(), 1);
        assert_eq!(dec.dropped[&dropped_key], frac(23, 12));

        assert_eq!(dec.simple.len(), 1);
        assert_eq!(dec.simple[&vec![ivec(&[0, 1]), ivec(&[1, -1])]], rat(3));

        // the simple part equals 3/(z2(z1-z2)) as a function
        for z in [rvec(&[3, 1]), rvec(&[2, 5]), rvec(&[7, -2])] {
            let want = rat(3) / (&z[1] * (&z[0] - &z[1]));
            assert_eq!(dec.evaluate_simple(&z), want);
            // and the whole decomposition reproduces the input
            let input = (rat(3) * &z[0] * &z[0] - frac(13, 12) * &z[0] * &z[1])
                / (&z[0] * &z[1] * (&z[0] - &z[1]) * (&z[0] - &z[1]));
            assert_eq!(dec.evaluate(&z), input);
        }
    }

    #[test]
    fn decomposition_reconstructs_input_function() {
        let pool2 = vec![
            ivec(&[1, 0]),
            ivec(&[0, 1]),
            ivec(&[1, 1]),
            ivec(&[1, -1]),
            ivec(&[2, 1]),
        ];
        let pool3 = vec![
            ivec(&[1, 0, 0]),
            ivec(&[0, 1, 0]),
            ivec(&[0, 0, 1]),
            ivec(&[1, 1, 1]),
            ivec(&[1, 2, 0]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (n, pool) in [(2usize, pool2), (3usize, pool3)] {
            for _ in 0..25 {
                let count = rng.gen_range(n..=n + 2);
                let denoms: Vec<IntVec> = (0..count)
                    .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                    .collect();
                let deg = count - n;
                // a random monomial of total degree `deg`
                let mut mono = vec![0u32; n];
                for _ in 0..deg {
                    mono[rng.gen_range(0..n)] += 1;
                }
                let coeff = frac(rng.gen_range(1..=5), rng.gen_range(1..=3));
                let dec = simple_fraction_decompose(&[(mono.clone(), coeff.clone())], &denoms);
                // exact function equality at a few generic points
                let mut checked = 0;
                let mut attempt = 0;
                while checked < 3 && attempt < 40 {
                    attempt += 1;
                    let z: RatVec =
                        (0..n).map(|_| rat(rng.gen_range(-9..=9))).collect();
                    if denoms.iter().any(|a| dot_int_rat(a, &z).is_zero()) {
                        continue;
                    }
                    checked += 1;
                    let mut want = coeff.clone();
                    for (i, &e) in mono.iter().enumerate() {
                        for _ in 0..e {
                            want *= &z[i];
                        }
                    }
                    for a in &denoms {
                        want /= dot_int_rat(a, &z);
                    }
                    assert_eq!(dec.evaluate(&z), want);
                }
                assert_eq!(checked, 3);
            }
        }
    }

    #[test]
    fn pole_sets_of_bases() {
        let sys = nonuni();
        let zero2 = rvec(&[0, 0]);
        assert_eq!(
            poles_of_basis(&sys, &[0, 1], &zero2),
            vec![Pole::new(rvec(&[0, 0]))]
        );
        let p = poles_of_basis(&sys, &[0, 2], &zero2);
        assert_eq!(
            p,
            vec![
                Pole::new(rvec(&[0, 0])),
                Pole::new(vec![rat(0), frac(1, 2)]),
            ]
        );
        assert_eq!(poles_of_basis(&sys, &[1, 2], &zero2).len(), 1);

        let chambers = enumerate_chambers(&sys).unwrap();
        let twists = vec![vec![rat(0)], vec![rat(0)], vec![rat(0)]];
        let rg1 = pole_union(&sys, &chambers[0].bases, &twists);
        assert_eq!(rg1.len(), 2);
        assert_eq!(rg1[1].coords, vec![rat(0), frac(1, 2)]);
        assert_eq!(rg1[1].order(), 2);
        let rg2 = pole_union(&sys, &chambers[1].bases, &twists);
        assert_eq!(rg2.len(), 1);
        assert!(rg2[0].is_origin());
    }

    #[test]
    fn twisted_pole_congruences() {
        // single direction 2e with twist 1/3: 2q ≡ -1/3 (mod 1)
        let sys = System::with_unit_multiplicities(1, vec![ivec(&[2]), ivec(&[3])]).unwrap();
        let poles = poles_of_basis(&sys, &[0], &[frac(1, 3)]);
        assert_eq!(poles, vec![Pole::new(vec![frac(1, 3)]), Pole::new(vec![frac(5, 6)])]);
        for p in &poles {
            let v = frac_part(&(rat(2) * &p.coords[0] + frac(1, 3)));
            assert!(v.is_zero());
        }
    }

    #[test]
    fn untwisted_residue_at_origin_rank_two() {
        let sys = a2();
        let chambers = enumerate_chambers(&sys).unwrap();
        let factors: Vec<TwistedFactor> = (0..3)
            .map(|k| TwistedFactor {
                vector: sys.vector(k).clone(),
                power: 1,
                exponent: rat(0),
            })
            .collect();
        let numer = vec![(rvec(&[0, 0]), CycNumber::one())];
        let p1 = twisted_residue(&chambers[0], &factors, &numer, 2).unwrap();
        let expect1 = SymbolicPoly::var(2, 1).add(&SymbolicPoly::one(2));
        assert_eq!(p1, expect1, "first chamber count is a2+1");
        let p2 = twisted_residue(&chambers[1], &factors, &numer, 2).unwrap();
        let expect2 = SymbolicPoly::var(2, 0).add(&SymbolicPoly::one(2));
        assert_eq!(p2, expect2, "second chamber count is a1+1");
    }

    #[test]
    fn residues_of_the_non_unimodular_system() {
        let sys = nonuni();
        let chambers = enumerate_chambers(&sys).unwrap();
        let at = |pole: &Pole, chamber: &Chamber| {
            let factors: Vec<TwistedFactor> = (0..3)
                .map(|k| TwistedFactor {
                    vector: sys.vector(k).clone(),
                    power: 1,
                    exponent: frac_part(&dot_int_rat(sys.vector(k), &pole.coords)),
                })
                .collect();
            let numer = vec![(rvec(&[0, 0]), CycNumber::one())];
            twisted_residue(chamber, &factors, &numer, 2).unwrap()
        };
        // at the origin the first chamber gets a2/2 + 3/4
        let origin = Pole::new(rvec(&[0, 0]));
        let p = at(&origin, &chambers[0]);
        let want = SymbolicPoly::var(2, 1)
            .scale_rat(&frac(1, 2))
            .add(&SymbolicPoly::constant_rat(2, frac(3, 4)));
        assert_eq!(p, want);
        // at (0, 1/2) it gets the constant 1/4
        let half = Pole::new(vec![rat(0), frac(1, 2)]);
        let p = at(&half, &chambers[0]);
        assert_eq!(p, SymbolicPoly::constant_rat(2, frac(1, 4)));
        // second chamber: a1 + 1 at the origin, zero at the half pole
        let p = at(&origin, &chambers[1]);
        let want = SymbolicPoly::var(2, 0).add(&SymbolicPoly::one(2));
        assert_eq!(p, want);
        let p = at(&half, &chambers[1]);
        assert!(p.is_zero());
    }

    #[test]
    fn volume_polynomial_of_rank_two_system() {
        // vol(a) for the unimodular three-vector system: on the first
        // chamber the volume of the slice is a2(a1 - a2/2) + a2²/2... the
        // residue computes it directly; compare against the simplex count
        // growth checked elsewhere by evaluation
        let sys = a2();
        let chambers = enumerate_chambers(&sys).unwrap();
        let factors: Vec<(IntVec, u32)> =
            sys.vectors().iter().map(|v| (v.clone(), 1)).collect();
        let v1 = volume_residue(&chambers[0], &factors, 2).unwrap();
        // degree one polynomial: the polytope is a segment of length a2
        // when a1 > a2 > 0... evaluate and compare
        assert_eq!(v1.eval(&rvec(&[5, 2])).as_rational(), Some(rat(2)));
        assert_eq!(v1.eval(&rvec(&[7, 3])).as_rational(), Some(rat(3)));
        let v2 = volume_residue(&chambers[1], &factors, 2).unwrap();
        assert_eq!(v2.eval(&rvec(&[2, 5])).as_rational(), Some(rat(2)));
    }

    #[test]
    fn standalone_total_residue_of_exponential_product() {
        // e^{z1}/((1-e^{-z1})(1-e^{-z2})(1-e^{-(z1-z2)})²): the degree-2
        // numerator layer is 3z1² - 13/12 z1z2 and the total residue is
        // 3/(z2(z1-z2))
        let out = total_residue(
            &rvec(&[1, 0]),
            &[(ivec(&[1, 0]), 1), (ivec(&[0, 1]), 1), (ivec(&[1, -1]), 2)],
            2,
        );
        let dropped_key = (vec![0u32, 0], vec![ivec(&[1, -1]), ivec(&[1, -1])]);
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(out.dropped[&dropped_key], frac(23, 12));
        for z in [rvec(&[3, 1]), rvec(&[-2, 5]), rvec(&[9, 4])] {
            let want = rat(3) / (&z[1] * (&z[0] - &z[1]));
            assert_eq!(out.evaluate_simple(&z), want);
        }
    }

    #[test]
    fn one_dimensional_residue_counts_compositions() {
        // residue of e^{λz}/(1-e^{-z})^R at 0 is binom(λ+R-1, R-1)
        for r in 1u32..=4 {
            let sys = System::new(1, vec![ivec(&[1])], vec![r]).unwrap();
            let chambers = enumerate_chambers(&sys).unwrap();
            let factors =
                vec![TwistedFactor { vector: ivec(&[1]), power: r, exponent: rat(0) }];
            let numer = vec![(rvec(&[0]), CycNumber::one())];
            let p = twisted_residue(&chambers[0], &factors, &numer, 1).unwrap();
            for k in 0i64..=6 {
                let mut want = rat(1);
                for j in 1..=(r as i64 - 1) {
                    want *= frac(k + j, j);
                }
                assert_eq!(p.eval(&[rat(k)]).as_rational(), Some(want), "R={r} k={k}");
            }
        }
    }

    #[test]
    fn generic_twists_reduce_to_a_constant_per_basis() {
        // when the singular factors form exactly a basis, the residue is
        // the product of (1-ζ)^{-h} over the twisted factors divided by
        // the basis volume
        let sys = a2();
        let chambers = enumerate_chambers(&sys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let den = rng.gen_range(2u64..=9);
            let num = rng.gen_range(1..den) as i64;
            let h = rng.gen_range(1u32..=2);
            let which = rng.gen_range(0..3);
            let factors: Vec<TwistedFactor> = (0..3)
                .map(|k| TwistedFactor {
                    vector: sys.vector(k).clone(),
                    power: if k == which { h } else { 1 },
                    exponent: if k == which { frac(num, den as i64) } else { rat(0) },
                })
                .collect();
            let numer = vec![(rvec(&[0, 0]), CycNumber::one())];
            for chamber in &chambers {
                let got = twisted_residue(chamber, &factors, &numer, 2).unwrap();
                let sigma: Vec<IntVec> = (0..3)
                    .filter(|&k| k != which)
                    .map(|k| sys.vector(k).clone())
                    .collect();
                let inside = chamber.bases.iter().any(|b| {
                    b.iter().map(|&k| sys.vector(k).clone()).collect::<Vec<_>>() == sigma
                });
                if !inside {
                    assert!(got.is_zero());
                } else {
                    let want = inv_one_minus_root(num, den)
                        .unwrap()
                        .pow(h as i64)
                        .unwrap();
                    assert_eq!(got, SymbolicPoly::constant(2, want));
                }
            }
        }
    }

    #[test]
    fn simple_fractions_decompose_to_themselves() {
        for denoms in [
            vec![ivec(&[1, 0]), ivec(&[0, 1])],
            vec![ivec(&[1, 0]), ivec(&[1, 2])],
            vec![ivec(&[0, 1]), ivec(&[1, 1])],
        ] {
            let dec = simple_fraction_decompose(&[(vec![0, 0], rat(1))], &denoms);
            assert!(dec.dropped.is_empty());
            let mut key = denoms.clone();
            key.sort();
            assert_eq!(dec.simple.len(), 1);
            assert_eq!(dec.simple[&key], rat(1));
        }
    }

    #[test]
    fn pole_set_orders_accumulate_twist_denominators() {
        let sys = nonuni();
        let chambers = enumerate_chambers(&sys).unwrap();
        let zero = vec![vec![rat(0)]; 3];
        let (p1, m1) = reduced_pole_set(&sys, &chambers[0], &zero);
        assert_eq!((p1.len(), m1), (2, 2));
        let (p2, m2) = reduced_pole_set(&sys, &chambers[1], &zero);
        assert_eq!((p2.len(), m2), (1, 1));

        // first chamber of the unimodular system has two bases; with the
        // twists below their poles are (4/5, 6/7) and (4/5, 6/55)
        let a2 = a2();
        let ch = enumerate_chambers(&a2).unwrap();
        let twists = vec![vec![frac(1, 5)], vec![frac(1, 7)], vec![frac(1, 11)]];
        let (poles, m) = reduced_pole_set(&a2, &ch[0], &twists);
        assert_eq!(poles.len(), 2);
        assert_eq!(
            poles[0].coords,
            vec![frac(4, 5), frac(6, 55)]
        );
        assert_eq!(poles[1].coords, vec![frac(4, 5), frac(6, 7)]);
        assert_eq!(m, 385);
    }

    #[test]
    fn pairing_applies_the_chamber_rule() {
        let sys = a2();
        let chambers = enumerate_chambers(&sys).unwrap();
        let mut v = SimpleFractionVector::default();
        v.simple.insert(vec![ivec(&[0, 1]), ivec(&[1, 1])], rat(1));
        // first chamber (a1 > a2 > 0) is not inside cone{e2, e1+e2}
        assert_eq!(chamber_pairing(&v, &chambers[0]).unwrap(), rat(0));
        assert_eq!(chamber_pairing(&v, &chambers[1]).unwrap(), rat(1));
        let mut w = SimpleFractionVector::default();
        w.simple.insert(vec![ivec(&[1, 0]), ivec(&[1, 2])], rat(1));
        let nu = nonuni();
        let nch = enumerate_chambers(&nu).unwrap();
        assert_eq!(chamber_pairing(&w, &nch[0]).unwrap(), frac(1, 2));
    }

    #[test]
    fn residue_drops_when_singular_forms_do_not_span() {
        let sys = a2();
        let chambers = enumerate_chambers(&sys).unwrap();
        // only one singular direction: nothing spans, residue is zero
        let factors = vec![
            TwistedFactor { vector: ivec(&[1, 0]), power: 3, exponent: rat(0) },
            TwistedFactor { vector: ivec(&[0, 1]), power: 1, exponent: frac(1, 3) },
            TwistedFactor { vector: ivec(&[1, 1]), power: 1, exponent: frac(1, 2) },
        ];
        let numer = vec![(rvec(&[0, 0]), CycNumber::one())];
        let p = twisted_residue(&chambers[0], &factors, &numer, 2).unwrap();
        assert!(p.is_zero());
    }
}
