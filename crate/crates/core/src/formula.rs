//! Per-chamber closed forms: counting functions, weighted sums, volumes,
//! dilation quasi-polynomials, and exponential sums.
//!
//! Every formula here is a finite list of pairs (torus point `q`,
//! polynomial): the function of `λ` is `Σ_q exp(-2πi⟨λ,q⟩)·poly_q(λ)`.
//! The polynomials come out of the residue engine one pole at a time.

use crate::arrangement::{
    chamber_of, enumerate_chambers, validity_inequalities_with, Chamber, Location, System,
};
use crate::cyclotomic::{inv_one_minus_root, CycNumber};
use crate::error::{Error, Result};
use crate::linalg::{dot_int_rat, dot_rat, int_to_rat, IntVec, Rat, RatVec};
use crate::residue::{
    frac_part, poles_of_basis, reduced_pole_set, twisted_residue, volume_residue, Pole,
    TwistedFactor,
};
use crate::series::SymbolicPoly;
use itertools::Itertools;
use num::complex::Complex64;
use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A finite sum `λ ↦ Σ exp(-2πi⟨λ,q⟩)·poly_q(λ)` valid on the recorded
/// region: the closed form of a counting or summation function on one
/// chamber.
#[derive(Clone, Debug)]
pub struct QuasiPolynomial {
    pub nvars: usize,
    /// all poles and coefficients live in the cyclotomic field of this order
    pub order: u64,
    pub chamber: String,
    /// rows `(w, r)` meaning `⟨w, λ⟩ > r`; their conjunction is the
    /// validity region
    pub validity: Vec<(IntVec, Rat)>,
    /// pairwise distinct poles `q ∈ [0,1)ⁿ`, sorted
    pub terms: Vec<(RatVec, SymbolicPoly)>,
}

impl QuasiPolynomial {
    pub fn zero(nvars: usize, chamber: String) -> Self {
        QuasiPolynomial { nvars, order: 1, chamber, validity: vec![], terms: vec![] }
    }

    pub fn evaluate_cyclotomic(&self, lam: &[Rat]) -> CycNumber {
        let mut acc = CycNumber::zero();
        for (q, poly) in &self.terms {
            let character = CycNumber::root_of_unity_rat(&-dot_rat(lam, q));
            acc = acc.add(&character.mul(&poly.eval(lam)));
        }
        acc
    }

    /// Evaluates at a lattice point, where the value is Galois-stable
    /// and hence rational.
    pub fn evaluate(&self, lam: &[Rat]) -> Result<Rat> {
        self.evaluate_cyclotomic(lam)
            .as_rational()
            .ok_or(Error::NonRealValue)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, p)| p.total_degree()).max().unwrap_or(0)
    }

    /// The polynomial attached to the trivial character, if any.
    pub fn polynomial_part(&self) -> Option<&SymbolicPoly> {
        self.terms
            .iter()
            .find(|(q, _)| q.iter().all(|x| x.is_zero()))
            .map(|(_, p)| p)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(q, _)| q.iter().all(|x| x.is_zero()))
    }
}

fn pole_orders_lcm(poles: &[Pole]) -> u64 {
    poles
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(&BigInt::from(p.order())))
        .to_u64()
        .expect("order fits in u64")
}

/// The closed form of the sum `Σ_{x ∈ Π(λ) ∩ Z^L} e^{2πi⟨r,x⟩} Π c(x_i, h_i)`
/// on the given chamber, where `Π(λ)` is the partition polytope of the
/// flattened vector list, `h` and `r` are per flattened index, and
/// `c(x,h) = binom(x+h-1, h-1)`.  With `h = 1` and `r = 0` this is the
/// number of lattice points.
pub fn euler_maclaurin_quasipoly(
    sys: &System,
    chamber: &Chamber,
    h: &[u32],
    r: &[Rat],
) -> Result<QuasiPolynomial> {
    let n = sys.dim();
    let flat = sys.flat_len();
    if h.len() != flat || r.len() != flat {
        return Err(Error::DimensionMismatch { expected: flat, got: h.len().max(r.len()) });
    }
    if h.iter().any(|&x| x == 0) {
        return Err(Error::Invalid("weight orders must be positive".into()));
    }
    let ranges = sys.flat_ranges();
    let twists: Vec<Vec<Rat>> = ranges
        .iter()
        .map(|rg| {
            r[rg.clone()]
                .iter()
                .map(frac_part)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    let (poles, order) = reduced_pole_set(sys, chamber, &twists);

    let mut terms = vec![];
    for q in &poles {
        let mut factors = Vec::with_capacity(flat);
        for (k, rg) in ranges.iter().enumerate() {
            let pairing = dot_int_rat(sys.vector(k), &q.coords);
            for i in rg.clone() {
                factors.push(TwistedFactor {
                    vector: sys.vector(k).clone(),
                    power: h[i],
                    exponent: frac_part(&(&r[i] + &pairing)),
                });
            }
        }
        let numer = vec![(vec![BigRational::zero(); n], CycNumber::one())];
        let poly = twisted_residue(chamber, &factors, &numer, n)?;
        if !poly.is_zero() {
            terms.push((q.coords.clone(), poly));
        }
    }

    let heights: Vec<u32> = ranges.iter().map(|rg| h[rg.clone()].iter().sum()).collect();
    Ok(QuasiPolynomial {
        nvars: n,
        order,
        chamber: chamber.id.clone(),
        validity: validity_inequalities_with(sys, chamber, &heights),
        terms,
    })
}

/// The number of ways to write `λ` as a nonnegative integer combination
/// of the system's vectors (with multiplicities), as a closed form on the
/// given chamber.
pub fn partition_quasipoly(sys: &System, chamber: &Chamber) -> Result<QuasiPolynomial> {
    let flat = sys.flat_len();
    euler_maclaurin_quasipoly(sys, chamber, &vec![1; flat], &vec![BigRational::zero(); flat])
}

/// Writes `x^d` over the basis `c(x,1), …, c(x,d+1)`; entry `j` is the
/// coefficient of `c(x, j+1)`.
fn monomial_in_binomial_basis(d: u32) -> Vec<Rat> {
    let d = d as usize;
    // solve by evaluating both sides at x = 0..d
    let mut mat = crate::linalg::RatMat::zero(d + 1, d + 1);
    let mut rhs = vec![BigRational::zero(); d + 1];
    for x in 0..=d {
        for j in 0..=d {
            // c(x, j+1) = binom(x+j, j)
            let mut v = BigRational::one();
            for t in 1..=j {
                v *= BigRational::new(BigInt::from(x + t), BigInt::from(t));
            }
            mat.set(x, j, v);
        }
        rhs[x] = BigRational::from_integer(BigInt::from(x).pow(d as u32));
    }
    match crate::linalg::solve(&mat, &rhs).expect("basis conversion") {
        crate::linalg::SolveOutcome::Unique(a) => a,
        _ => unreachable!("binomial basis is triangular"),
    }
}

/// The closed form of `λ ↦ Σ_{x ∈ Π(λ) ∩ Z^L} f(x)` for a polynomial
/// weight `f` in the `L` flattened coordinates, on the given chamber.
pub fn weighted_sum_quasipoly(
    sys: &System,
    chamber: &Chamber,
    f: &SymbolicPoly,
) -> Result<QuasiPolynomial> {
    let n = sys.dim();
    let flat = sys.flat_len();
    if f.nvars() != flat {
        return Err(Error::DimensionMismatch { expected: flat, got: f.nvars() });
    }
    let coeffs = f
        .rational_coeffs()
        .ok_or_else(|| Error::Invalid("weight must have rational coefficients".into()))?;

    // expand f over products Π c(x_i, h_i)
    let mut conversions: Vec<Vec<Rat>> = vec![];
    let mut expansion: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
    for (mono, c) in coeffs {
        let mut partial: Vec<(Vec<u32>, Rat)> = vec![(vec![], c)];
        for &d in &mono {
            while conversions.len() <= d as usize {
                conversions.push(monomial_in_binomial_basis(conversions.len() as u32));
            }
            let table = &conversions[d as usize];
            let mut next = vec![];
            for (hs, w) in &partial {
                for (j, a) in table.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut hs2 = hs.clone();
                    hs2.push(j as u32 + 1);
                    next.push((hs2, w * a));
                }
            }
            partial = next;
        }
        for (hs, w) in partial {
            let e = expansion.entry(hs).or_insert_with(BigRational::zero);
            *e += w;
        }
    }

    let zero_twist = vec![BigRational::zero(); flat];
    let mut combined: BTreeMap<RatVec, SymbolicPoly> = BTreeMap::new();
    let mut order = 1u64;
    for (hs, w) in &expansion {
        if w.is_zero() {
            continue;
        }
        let qp = euler_maclaurin_quasipoly(sys, chamber, hs, &zero_twist)?;
        order = order.lcm(&qp.order);
        for (q, poly) in qp.terms {
            let e = combined.entry(q).or_insert_with(|| SymbolicPoly::zero(n));
            *e = e.add(&poly.scale_rat(w));
        }
    }
    let terms: Vec<(RatVec, SymbolicPoly)> =
        combined.into_iter().filter(|(_, p)| !p.is_zero()).collect();
    // each summand is valid on chamber − Box(heights); the common region
    // uses the plain multiplicities, the smallest box that occurs
    Ok(QuasiPolynomial {
        nvars: n,
        order,
        chamber: chamber.id.clone(),
        validity: validity_inequalities_with(sys, chamber, sys.multiplicities()),
        terms,
    })
}

/// Normalized volume of the partition polytope as a polynomial of `λ` on
/// the chamber: the leading behaviour of the counting function.
pub fn volume_polynomial(sys: &System, chamber: &Chamber) -> Result<SymbolicPoly> {
    let factors: Vec<(IntVec, u32)> = sys
        .vectors()
        .iter()
        .zip(sys.multiplicities())
        .map(|(v, &m)| (v.clone(), m))
        .collect();
    volume_residue(chamber, &factors, sys.dim())
}

fn render_pole(q: &[Rat]) -> String {
    let inner = q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    format!("({inner})")
}

/// The closed form of `λ ↦ Σ_{x ∈ Π(λ) ∩ Z^L} e^{2πi⟨r,x⟩}` for generic
/// rational twists: a pure sum of characters, one group of terms per
/// basis of the chamber.  Fails with the offending data when a twist
/// degenerates on some basis's pole.
pub fn exponential_sum_quasipoly(
    sys: &System,
    chamber: &Chamber,
    r: &[Rat],
) -> Result<QuasiPolynomial> {
    let n = sys.dim();
    let flat = sys.flat_len();
    if r.len() != flat {
        return Err(Error::DimensionMismatch { expected: flat, got: r.len() });
    }
    let ranges = sys.flat_ranges();
    let mut combined: BTreeMap<RatVec, CycNumber> = BTreeMap::new();
    let mut all_poles = vec![];
    for basis in &chamber.bases {
        let vol = sys.basis_volume(basis).to_u64().expect("volume fits");
        // one copy choice per basis member
        for choice in basis
            .iter()
            .map(|&k| ranges[k].clone())
            .multi_cartesian_product()
        {
            let twist: RatVec = choice.iter().map(|&i| r[i].clone()).collect();
            for q in poles_of_basis(sys, basis, &twist) {
                let mut coeff = CycNumber::from_rat(
                    BigRational::new(BigInt::one(), BigInt::from(vol)),
                );
                for (k, rg) in ranges.iter().enumerate() {
                    let pairing = dot_int_rat(sys.vector(k), &q.coords);
                    for i in rg.clone() {
                        if choice.contains(&i) {
                            continue;
                        }
                        let e = frac_part(&(&r[i] + &pairing));
                        if e.is_zero() {
                            return Err(Error::GenericityViolated {
                                basis: choice.clone(),
                                pole: render_pole(&q.coords),
                                factor: i,
                            });
                        }
                        let num = e.numer().to_i64().expect("twist numerator fits");
                        let den = e.denom().to_u64().expect("twist denominator fits");
                        coeff = coeff.mul(&inv_one_minus_root(num, den)?);
                    }
                }
                all_poles.push(q.clone());
                let entry = combined.entry(q.coords).or_insert_with(CycNumber::zero);
                *entry = entry.add(&coeff);
            }
        }
    }
    let mut order = pole_orders_lcm(&all_poles);
    for x in r {
        order = order.lcm(&x.denom().to_u64().expect("denominator fits"));
    }
    let terms: Vec<(RatVec, SymbolicPoly)> = combined
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(q, c)| (q, SymbolicPoly::constant(n, c)))
        .collect();
    Ok(QuasiPolynomial {
        nvars: n,
        order,
        chamber: chamber.id.clone(),
        validity: validity_inequalities_with(sys, chamber, sys.multiplicities()),
        terms,
    })
}

/// One term `coeff · exp(⟨λ, pole⟩)` of a numeric exponential-sum
/// formula; `pole` collects the `n` complex coordinates of `-p`.
#[derive(Clone, Debug)]
pub struct ExpTerm {
    pub pole: Vec<Complex64>,
    pub coeff: Complex64,
}

pub fn evaluate_exp_terms(terms: &[ExpTerm], lam: &[Rat]) -> Complex64 {
    let lf: Vec<f64> = lam.iter().map(|x| x.to_f64().unwrap()).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        let mut e = Complex64::new(0.0, 0.0);
        for (x, p) in lf.iter().zip(&t.pole) {
            e += p * x;
        }
        acc += t.coeff * e.exp();
    }
    acc
}

/// Floating-point version of the exponential sum for arbitrary complex
/// `y` (per flattened index): the weight is `e^{⟨y,x⟩}`.  Genericity is
/// checked within 1e-9.
pub fn exponential_sum_terms(
    sys: &System,
    chamber: &Chamber,
    y: &[Complex64],
) -> Result<Vec<ExpTerm>> {
    let n = sys.dim();
    let flat = sys.flat_len();
    if y.len() != flat {
        return Err(Error::DimensionMismatch { expected: flat, got: y.len() });
    }
    let tau = std::f64::consts::TAU;
    let ranges = sys.flat_ranges();
    let mut out = vec![];
    for basis in &chamber.bases {
        let vol = sys.basis_volume(basis).to_f64().expect("volume fits");
        let m = sys.basis_matrix(basis).transpose();
        let (u, d, v) = m.smith_normal_form();
        let divisors: Vec<f64> =
            (0..n).map(|i| d.at(i, i).to_f64().unwrap()).collect();
        for choice in basis
            .iter()
            .map(|&k| ranges[k].clone())
            .multi_cartesian_product()
        {
            // solve ⟨β_j, q⟩ ≡ -y_j/2πi (mod 1) via the Smith form
            let s: Vec<Complex64> = (0..n)
                .map(|i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &fi) in choice.iter().enumerate() {
                        acc -= y[fi] / Complex64::new(0.0, tau)
                            * u.at(i, j).to_f64().unwrap();
                    }
                    acc
                })
                .collect();
            let mut counter = vec![0u64; n];
            'poles: loop {
                let w: Vec<Complex64> = (0..n)
                    .map(|i| (s[i] + counter[i] as f64) / divisors[i])
                    .collect();
                let q: Vec<Complex64> = (0..n)
                    .map(|i| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (j, wj) in w.iter().enumerate() {
                            acc += wj * v.at(i, j).to_f64().unwrap();
                        }
                        acc
                    })
                    .collect();
                let mut coeff = Complex64::new(1.0 / vol, 0.0);
                for (k, rg) in ranges.iter().enumerate() {
                    let mut pairing = Complex64::new(0.0, 0.0);
                    for (i, b) in sys.vector(k).iter().enumerate() {
                        pairing += q[i] * b.to_f64().unwrap();
                    }
                    for i in rg.clone() {
                        if choice.contains(&i) {
                            continue;
                        }
                        let factor = 1.0
                            - (y[i] + Complex64::new(0.0, tau) * pairing).exp();
                        if factor.norm() <= 1e-9 {
                            return Err(Error::GenericityViolated {
                                basis: choice.clone(),
                                pole: format!(
                                    "({})",
                                    q.iter().map(|z| z.to_string()).join(", ")
                                ),
                                factor: i,
                            });
                        }
                        coeff /= factor;
                    }
                }
                out.push(ExpTerm {
                    pole: q.iter().map(|z| -z * Complex64::new(0.0, tau)).collect(),
                    coeff,
                });
                let mut i = 0;
                loop {
                    if i == n {
                        break 'poles;
                    }
                    counter[i] += 1;
                    if (counter[i] as f64) < divisors[i] {
                        break;
                    }
                    counter[i] = 0;
                    i += 1;
                }
            }
        }
    }
    Ok(out)
}

/// The dilation counting function `k ↦ #(k·Π ∩ Z^L)` of the partition
/// polytope of `λ0`: one univariate polynomial per residue class of `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EhrhartQP {
    pub period: u64,
    /// ascending coefficient lists, indexed by `k mod period`
    pub polys: Vec<Vec<Rat>>,
}

impl EhrhartQP {
    pub fn eval(&self, k: i64) -> Rat {
        let class = k.rem_euclid(self.period as i64) as usize;
        let kq = BigRational::from_integer(BigInt::from(k));
        let mut acc = BigRational::zero();
        let mut pw = BigRational::one();
        for c in &self.polys[class] {
            acc += c * &pw;
            pw *= &kq;
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.polys.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// True when all residue classes carry the same polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.polys.iter().all(|p| *p == self.polys[0])
    }

    pub fn leading_coefficient(&self) -> Rat {
        let d = self.degree();
        self.polys[0].get(d).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Specializes the counting formula along the ray of `λ0`.  On a wall,
/// the adjacent chamber with the lowest id is used; the two sides agree
/// there.
pub fn ehrhart(sys: &System, lam0: &[BigInt]) -> Result<EhrhartQP> {
    let chambers = enumerate_chambers(sys)?;
    let point = int_to_rat(lam0);
    let id = match chamber_of(&chambers, &point) {
        Location::Interior(id) => id,
        Location::OnWall { adjacent } => {
            adjacent.into_iter().min().expect("wall has neighbours")
        }
        Location::Exterior => return Err(Error::ExteriorPoint),
    };
    let chamber = chambers.iter().find(|c| c.id == id).unwrap();
    let qp = partition_quasipoly(sys, chamber)?;

    let mut period = BigInt::one();
    let thetas: Vec<Rat> = qp
        .terms
        .iter()
        .map(|(q, _)| frac_part(&dot_rat(&point, q)))
        .collect();
    for t in &thetas {
        period = period.lcm(t.denom());
    }
    let period = period.to_u64().expect("period fits in u64");

    let mut polys = vec![];
    for class in 0..period {
        let mut restricted = SymbolicPoly::zero(1);
        for ((_, poly), theta) in qp.terms.iter().zip(&thetas) {
            let character = CycNumber::root_of_unity_rat(
                &(-theta * BigRational::from_integer(BigInt::from(class))),
            );
            restricted = restricted.add(&poly.restrict_to_ray(&point).scale(&character));
        }
        let coeffs = restricted.rational_coeffs().ok_or(Error::NonRealValue)?;
        let deg = coeffs.keys().map(|k| k[0]).max().unwrap_or(0) as usize;
        let mut dense = vec![BigRational::zero(); deg + 1];
        for (k, c) in coeffs {
            dense[k[0] as usize] = c;
        }
        polys.push(dense);
    }
    Ok(EhrhartQP { period, polys })
}
