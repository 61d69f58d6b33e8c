//! JSON schemas for systems, formulas, and polytopes.
//!
//! Rationals travel as strings (`"p/q"`, or `"p"` when the denominator is
//! one).  Formula terms carry both a display string and the exact monomial
//! data, so `eval` can rebuild the quasi-polynomial without parsing the
//! display form.

use std::str::FromStr;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use vpf_core::{CycNumber, QuasiPolynomial, Rat, SymbolicPoly, System};

use crate::render::{display_order, lambda_names, render_compact};

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    BigRational::from_str(s.trim()).map_err(|e| format!("bad rational {s:?}: {e}"))
}

fn small_int(v: &BigInt, what: &str) -> Result<i64, String> {
    v.to_i64().ok_or_else(|| format!("{what} does not fit in 64 bits: {v}"))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub n: usize,
    pub vectors: Vec<Vec<i64>>,
    pub multiplicities: Vec<u32>,
}

impl SystemJson {
    pub fn build(&self) -> Result<System, vpf_core::Error> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        System::new(self.n, vectors, self.multiplicities.clone())
    }

    pub fn from_system(sys: &System) -> Result<Self, String> {
        let vectors = sys
            .vectors()
            .iter()
            .map(|v| v.iter().map(|x| small_int(x, "vector entry")).collect())
            .collect::<Result<_, _>>()?;
        Ok(SystemJson { n: sys.dim(), vectors, multiplicities: sys.multiplicities().to_vec() })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityRow {
    pub normal: Vec<i64>,
    pub shift: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub exps: Vec<u32>,
    pub coeff: CoeffJson,
}

/// A rational string, or exact cyclotomic data as ascending power-basis
/// coefficients of `ζ_order`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Rational(String),
    Cyclotomic { order: u64, coeffs: Vec<String> },
}

pub fn coeff_to_json(c: &CycNumber) -> CoeffJson {
    match c.as_rational() {
        Some(r) => CoeffJson::Rational(r.to_string()),
        None => CoeffJson::Cyclotomic {
            order: c.order(),
            coeffs: c.coeffs().iter().map(|r| r.to_string()).collect(),
        },
    }
}

pub fn coeff_from_json(c: &CoeffJson) -> Result<CycNumber, String> {
    match c {
        CoeffJson::Rational(s) => Ok(CycNumber::from_rat(parse_rat(s)?)),
        CoeffJson::Cyclotomic { order, coeffs } => {
            if *order == 0 {
                return Err("cyclotomic order must be positive".into());
            }
            let mut acc = CycNumber::zero();
            for (e, s) in coeffs.iter().enumerate() {
                let r = parse_rat(s)?;
                if r.is_zero() {
                    continue;
                }
                acc = acc.add(&CycNumber::root_of_unity(e as i64, *order).scale(&r));
            }
            Ok(acc)
        }
    }
}

pub fn poly_to_monomials(p: &SymbolicPoly) -> Vec<MonomialJson> {
    display_order(p.terms().keys())
        .into_iter()
        .map(|k| MonomialJson { coeff: coeff_to_json(&p.terms()[&k]), exps: k })
        .collect()
}

pub fn poly_from_monomials(nvars: usize, monos: &[MonomialJson]) -> Result<SymbolicPoly, String> {
    let mut acc = SymbolicPoly::zero(nvars);
    for m in monos {
        if m.exps.len() != nvars {
            return Err(format!("monomial has {} exponents, expected {nvars}", m.exps.len()));
        }
        let mut t = SymbolicPoly::constant(nvars, coeff_from_json(&m.coeff)?);
        for (i, &e) in m.exps.iter().enumerate() {
            if e > 0 {
                t = t.mul(&SymbolicPoly::var(nvars, i).pow(e));
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub pole: Vec<String>,
    pub poly: String,
    pub monomials: Vec<MonomialJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaJson {
    pub n: usize,
    pub order: u64,
    pub chamber: String,
    pub validity: Vec<ValidityRow>,
    pub terms: Vec<TermJson>,
}

pub fn formula_to_json(qp: &QuasiPolynomial) -> Result<FormulaJson, String> {
    let names = lambda_names(qp.nvars);
    let validity = qp
        .validity
        .iter()
        .map(|(w, r)| {
            Ok(ValidityRow {
                normal: w.iter().map(|x| small_int(x, "validity normal")).collect::<Result<_, String>>()?,
                shift: r.to_string(),
            })
        })
        .collect::<Result<_, String>>()?;
    let terms = qp
        .terms
        .iter()
        .map(|(pole, poly)| TermJson {
            pole: pole.iter().map(|r| r.to_string()).collect(),
            poly: render_compact(poly, &names),
            monomials: poly_to_monomials(poly),
        })
        .collect();
    Ok(FormulaJson {
        n: qp.nvars,
        order: qp.order,
        chamber: qp.chamber.clone(),
        validity,
        terms,
    })
}

pub fn formula_from_json(f: &FormulaJson) -> Result<QuasiPolynomial, String> {
    let validity = f
        .validity
        .iter()
        .map(|row| {
            if row.normal.len() != f.n {
                return Err(format!("validity normal has {} entries, expected {}", row.normal.len(), f.n));
            }
            Ok((row.normal.iter().map(|&x| BigInt::from(x)).collect(), parse_rat(&row.shift)?))
        })
        .collect::<Result<_, String>>()?;
    let terms = f
        .terms
        .iter()
        .map(|t| {
            if t.pole.len() != f.n {
                return Err(format!("pole has {} entries, expected {}", t.pole.len(), f.n));
            }
            let pole = t.pole.iter().map(|s| parse_rat(s)).collect::<Result<_, _>>()?;
            Ok((pole, poly_from_monomials(f.n, &t.monomials)?))
        })
        .collect::<Result<_, String>>()?;
    Ok(QuasiPolynomial {
        nvars: f.n,
        order: f.order.max(1),
        chamber: f.chamber.clone(),
        validity,
        terms,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<i64>,
}

#[derive(Serialize)]
pub struct EmbedJson {
    pub system: SystemJson,
    pub target: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<EmbedCheck>,
}

#[derive(Serialize)]
pub struct EmbedCheck {
    pub polytope_points: String,
    pub embedded_count: String,
    pub matched: bool,
}

#[derive(Serialize)]
pub struct ChambersJson {
    pub n: usize,
    pub chambers: Vec<ChamberJson>,
}

#[derive(Serialize)]
pub struct ChamberJson {
    pub id: String,
    pub normals: Vec<Vec<i64>>,
    pub bases: Vec<Vec<usize>>,
    pub interior: Vec<String>,
}

#[derive(Serialize)]
pub struct EhrhartJson {
    pub period: u64,
    pub degree: usize,
    pub classes: Vec<EhrhartClass>,
}

#[derive(Serialize)]
pub struct EhrhartClass {
    pub residue: u64,
    /// ascending powers of the dilation parameter
    pub coeffs: Vec<String>,
}

#[derive(Serialize)]
pub struct VolumeJson {
    pub chamber: String,
    pub degree: u32,
    pub poly: String,
    pub monomials: Vec<MonomialJson>,
}
