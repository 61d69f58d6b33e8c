//! `vpf`: exact chamber decompositions, counting formulas, weighted lattice
//! sums, and volumes for partition polytopes.
//!
//! Systems are JSON objects `{"n": 2, "vectors": [[1,0],[0,1],[1,1]],
//! "multiplicities": [1,1,1]}`.  Every path argument accepts `-` for stdin.
//! Exit codes: 0 on success, 1 on mathematical failure (a validation sweep
//! mismatch, a degenerate twist, a non-convergent input), 2 on malformed
//! input.

mod render;
mod schema;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use num::{BigInt, BigRational, Zero};
use rayon::prelude::*;
use vpf_core::arrangement::{enumerate_chambers, in_validity_region};
use vpf_core::formula::{
    ehrhart, euler_maclaurin_quasipoly, exponential_sum_quasipoly, partition_quasipoly,
    volume_polynomial, weighted_sum_quasipoly,
};
use vpf_core::linalg::int_to_rat;
use vpf_core::oracle::{count_points, embed_polytope, InequalityPolytope};
use vpf_core::{Chamber, Rat, SymbolicPoly, System};

use render::{lambda_names, latex_formula, latex_poly, linear_compact, render_compact, text_formula};
use schema::{
    formula_from_json, formula_to_json, parse_rat, poly_from_monomials, ChamberJson,
    ChambersJson, EhrhartClass, EhrhartJson, EmbedCheck, EmbedJson, FormulaJson, MonomialJson,
    PolytopeJson, SystemJson, VolumeJson,
};

#[derive(Parser)]
#[command(name = "vpf", version, about = "Exact lattice-point counting in partition polytopes")]
struct Cli {
    /// Output format (LaTeX is display-only; JSON keeps exact data)
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Text,
    Latex,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the big chambers of a system
    Chambers {
        /// System JSON path, or - for stdin
        #[arg(long)]
        system: String,
    },
    /// Closed-form counting formula on one chamber
    Formula {
        #[arg(long)]
        system: String,
        /// Chamber id, as listed by `chambers`
        #[arg(long)]
        chamber: String,
    },
    /// Number of lattice points at one right-hand side
    Count {
        #[arg(long)]
        system: String,
        /// Comma-separated integers
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Closed form of a weighted lattice sum on one chamber
    Sum {
        #[arg(long)]
        system: String,
        #[arg(long)]
        chamber: String,
        /// Polynomial weight in the flattened coordinates, as JSON
        /// monomials: [{"exps":[1,0,0],"coeff":"1"}]
        #[arg(long, conflicts_with_all = ["h", "r"])]
        weight: Option<String>,
        /// Per-slot box heights (weight becomes binom(x+h-1, h-1))
        #[arg(long)]
        h: Option<String>,
        /// Per-slot rational twists (weight gains e^{2 pi i <r,x>})
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
    },
    /// Closed form of an exponentially twisted lattice sum
    ExpSum {
        #[arg(long)]
        system: String,
        #[arg(long)]
        chamber: String,
        /// Comma-separated rational twists, one per flattened slot
        #[arg(long, allow_hyphen_values = true)]
        twist: String,
    },
    /// Normalized volume polynomial of the partition polytope
    Volume {
        #[arg(long)]
        system: String,
        #[arg(long)]
        chamber: String,
    },
    /// Dilation-counting quasi-polynomial along a ray
    Ehrhart {
        #[arg(long)]
        system: String,
        /// Ray direction, comma-separated integers
        #[arg(long, allow_hyphen_values = true)]
        lambda0: String,
        /// Evaluate at this dilation instead of printing the formula
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
    },
    /// Rewrite a bounded inequality polytope {v : <u,v> + h >= 0} as a
    /// partition polytope
    Embed {
        /// Polytope JSON {"dim":2,"normals":[[1,0],...],"offsets":[0,...]},
        /// or - for stdin
        #[arg(long)]
        polytope: String,
        /// Also enumerate both sides and compare the counts
        #[arg(long)]
        check: bool,
    },
    /// Evaluate a formula emitted by `formula` or `sum`
    Eval {
        /// Formula JSON path, or - for stdin
        #[arg(long)]
        formula: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Sweep a box, comparing every chamber formula against direct
    /// enumeration; parallel over the grid (RAYON_NUM_THREADS overrides)
    Validate {
        #[arg(long)]
        system: String,
        /// Inclusive per-coordinate range, e.g. -6..6
        #[arg(long = "box", default_value = "-6..6", allow_hyphen_values = true)]
        sweep: String,
    },
}

enum Failure {
    Schema(String),
    Math(String),
    Counterexample(String),
}

fn schema_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Schema(e.to_string())
}

fn math_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Math(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Schema(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Counterexample(m)) => {
            print!("{m}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(schema_err)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Schema(format!("{path}: {e}")))
    }
}

fn load_system(path: &str) -> Result<System, Failure> {
    let text = read_input(path)?;
    let json: SystemJson = serde_json::from_str(&text).map_err(schema_err)?;
    json.build().map_err(schema_err)
}

fn find_chamber(sys: &System, id: &str) -> Result<Chamber, Failure> {
    let chambers = enumerate_chambers(sys).map_err(math_err)?;
    let known = chambers.iter().map(|c| c.id.clone()).collect::<Vec<_>>().join(", ");
    chambers
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Failure::Schema(format!("unknown chamber {id}; system has {known}")))
}

fn parse_list<T, F: Fn(&str) -> Result<T, Failure>>(s: &str, piece: F) -> Result<Vec<T>, Failure> {
    s.split(',').map(|p| piece(p.trim())).collect()
}

fn parse_lambda(s: &str, n: usize) -> Result<Vec<BigInt>, Failure> {
    let v = parse_list(s, |p| {
        p.parse::<i64>().map(BigInt::from).map_err(|e| Failure::Schema(format!("bad integer {p:?}: {e}")))
    })?;
    if v.len() != n {
        return Err(Failure::Schema(format!("lambda has {} entries, expected {n}", v.len())));
    }
    Ok(v)
}

fn parse_rats(s: &str, n: usize, what: &str) -> Result<Vec<Rat>, Failure> {
    let v = parse_list(s, |p| parse_rat(p).map_err(Failure::Schema))?;
    if v.len() != n {
        return Err(Failure::Schema(format!("{what} has {} entries, expected {n}", v.len())));
    }
    Ok(v)
}

fn parse_box(s: &str) -> Result<(i64, i64), Failure> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Failure::Schema(format!("bad box {s:?}: expected lo..hi")))?;
    let lo: i64 = lo.trim().parse().map_err(|e| Failure::Schema(format!("bad box {s:?}: {e}")))?;
    let hi: i64 = hi.trim().parse().map_err(|e| Failure::Schema(format!("bad box {s:?}: {e}")))?;
    if lo > hi {
        return Err(Failure::Schema(format!("bad box {s:?}: empty range")));
    }
    Ok((lo, hi))
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn formula_output(qp: &vpf_core::QuasiPolynomial, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(pretty(&formula_to_json(qp).map_err(Failure::Math)?)),
        Format::Text => Ok(text_formula(qp)),
        Format::Latex => Ok(latex_formula(qp)),
    }
}

fn poly_from_coeffs(coeffs: &[Rat]) -> SymbolicPoly {
    let mut p = SymbolicPoly::zero(1);
    for (e, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        p = p.add(&SymbolicPoly::constant_rat(1, c.clone()).mul(&SymbolicPoly::var(1, 0).pow(e as u32)));
    }
    p
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Cmd::Chambers { system } => {
            let sys = load_system(system)?;
            let chambers = enumerate_chambers(&sys).map_err(math_err)?;
            match cli.format {
                Format::Json => {
                    let out = ChambersJson {
                        n: sys.dim(),
                        chambers: chambers
                            .iter()
                            .map(|c| {
                                Ok(ChamberJson {
                                    id: c.id.clone(),
                                    normals: c
                                        .normals
                                        .iter()
                                        .map(|w| {
                                            w.iter()
                                                .map(|x| {
                                                    num::ToPrimitive::to_i64(x).ok_or_else(|| {
                                                        Failure::Math("normal entry does not fit in 64 bits".into())
                                                    })
                                                })
                                                .collect()
                                        })
                                        .collect::<Result<_, _>>()?,
                                    bases: c.bases.clone(),
                                    interior: c.interior.iter().map(|r| r.to_string()).collect(),
                                })
                            })
                            .collect::<Result<_, Failure>>()?,
                    };
                    Ok(pretty(&out))
                }
                Format::Text | Format::Latex => {
                    let names = lambda_names(sys.dim());
                    let mut out = String::new();
                    for c in &chambers {
                        let rows = c
                            .normals
                            .iter()
                            .map(|w| format!("{} > 0", linear_compact(w, &names)))
                            .collect::<Vec<_>>()
                            .join(", ");
                        out.push_str(&format!("{}: {}\n", c.id, rows));
                    }
                    Ok(out)
                }
            }
        }
        Cmd::Formula { system, chamber } => {
            let sys = load_system(system)?;
            let ch = find_chamber(&sys, chamber)?;
            let qp = partition_quasipoly(&sys, &ch).map_err(math_err)?;
            formula_output(&qp, cli.format)
        }
        Cmd::Count { system, lambda } => {
            let sys = load_system(system)?;
            let lam = parse_lambda(lambda, sys.dim())?;
            let count = count_points(&sys, &lam).map_err(math_err)?;
            Ok(format!("{count}\n"))
        }
        Cmd::Sum { system, chamber, weight, h, r } => {
            let sys = load_system(system)?;
            let ch = find_chamber(&sys, chamber)?;
            let flat = sys.flat_len();
            let qp = if let Some(w) = weight {
                let monos: Vec<MonomialJson> = serde_json::from_str(w).map_err(schema_err)?;
                let f = poly_from_monomials(flat, &monos).map_err(Failure::Schema)?;
                weighted_sum_quasipoly(&sys, &ch, &f).map_err(math_err)?
            } else {
                let hs = match h {
                    Some(s) => {
                        let v = parse_list(s, |p| {
                            p.parse::<u32>().map_err(|e| Failure::Schema(format!("bad height {p:?}: {e}")))
                        })?;
                        if v.len() != flat {
                            return Err(Failure::Schema(format!("h has {} entries, expected {flat}", v.len())));
                        }
                        v
                    }
                    None => vec![1; flat],
                };
                let rs = match r {
                    Some(s) => parse_rats(s, flat, "r")?,
                    None => vec![BigRational::zero(); flat],
                };
                euler_maclaurin_quasipoly(&sys, &ch, &hs, &rs).map_err(math_err)?
            };
            formula_output(&qp, cli.format)
        }
        Cmd::ExpSum { system, chamber, twist } => {
            let sys = load_system(system)?;
            let ch = find_chamber(&sys, chamber)?;
            let r = parse_rats(twist, sys.flat_len(), "twist")?;
            let qp = exponential_sum_quasipoly(&sys, &ch, &r).map_err(math_err)?;
            formula_output(&qp, cli.format)
        }
        Cmd::Volume { system, chamber } => {
            let sys = load_system(system)?;
            let ch = find_chamber(&sys, chamber)?;
            let vol = volume_polynomial(&sys, &ch).map_err(math_err)?;
            let names = lambda_names(sys.dim());
            match cli.format {
                Format::Json => Ok(pretty(&VolumeJson {
                    chamber: ch.id.clone(),
                    degree: vol.total_degree(),
                    poly: render_compact(&vol, &names),
                    monomials: schema::poly_to_monomials(&vol),
                })),
                Format::Text => Ok(format!("chamber {}\nvolume: {}\n", ch.id, render_compact(&vol, &names))),
                Format::Latex => {
                    let latex_names: Vec<String> = (1..=sys.dim()).map(|i| format!("a_{{{i}}}")).collect();
                    Ok(format!("{}\n", latex_poly(&vol, &latex_names)))
                }
            }
        }
        Cmd::Ehrhart { system, lambda0, k } => {
            let sys = load_system(system)?;
            let lam0 = parse_lambda(lambda0, sys.dim())?;
            let qp = ehrhart(&sys, &lam0).map_err(math_err)?;
            if let Some(k) = k {
                return Ok(format!("{}\n", qp.eval(*k)));
            }
            match cli.format {
                Format::Json => Ok(pretty(&EhrhartJson {
                    period: qp.period,
                    degree: qp.degree(),
                    classes: qp
                        .polys
                        .iter()
                        .enumerate()
                        .map(|(j, coeffs)| EhrhartClass {
                            residue: j as u64,
                            coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
                        })
                        .collect(),
                })),
                Format::Text | Format::Latex => {
                    let kname = vec!["k".to_string()];
                    let mut out = format!("period {}\ndegree {}\n", qp.period, qp.degree());
                    for (j, coeffs) in qp.polys.iter().enumerate() {
                        out.push_str(&format!(
                            "k = {j} mod {}: {}\n",
                            qp.period,
                            render_compact(&poly_from_coeffs(coeffs), &kname)
                        ));
                    }
                    Ok(out)
                }
            }
        }
        Cmd::Embed { polytope, check } => {
            let text = read_input(polytope)?;
            let json: PolytopeJson = serde_json::from_str(&text).map_err(schema_err)?;
            let normals = json.normals.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let offsets = json.offsets.iter().map(|&x| BigInt::from(x)).collect();
            let p = InequalityPolytope::new(json.dim, normals, offsets).map_err(schema_err)?;
            let emb = embed_polytope(&p).map_err(math_err)?;
            let target = emb
                .target
                .iter()
                .map(|x| num::ToPrimitive::to_i64(x).ok_or_else(|| Failure::Math("target entry does not fit in 64 bits".into())))
                .collect::<Result<Vec<_>, _>>()?;
            let check_out = if *check {
                let direct = BigInt::from(p.points().len());
                let embedded = count_points(&emb.system, &emb.target).map_err(math_err)?;
                let matched = direct == embedded;
                let out = EmbedCheck {
                    polytope_points: direct.to_string(),
                    embedded_count: embedded.to_string(),
                    matched,
                };
                if !matched {
                    return Err(Failure::Math(format!(
                        "embedding does not preserve the count: polytope has {direct}, embedded system gives {embedded}"
                    )));
                }
                Some(out)
            } else {
                None
            };
            let out = EmbedJson {
                system: SystemJson::from_system(&emb.system).map_err(Failure::Math)?,
                target,
                check: check_out,
            };
            Ok(pretty(&out))
        }
        Cmd::Eval { formula, lambda } => {
            let text = read_input(formula)?;
            let json: FormulaJson = serde_json::from_str(&text).map_err(schema_err)?;
            let qp = formula_from_json(&json).map_err(Failure::Schema)?;
            let lam = parse_lambda(lambda, qp.nvars)?;
            let value = qp.evaluate(&int_to_rat(&lam)).map_err(math_err)?;
            Ok(format!("{value}\n"))
        }
        Cmd::Validate { system, sweep } => {
            let sys = load_system(system)?;
            let (lo, hi) = parse_box(sweep)?;
            let chambers = enumerate_chambers(&sys).map_err(math_err)?;
            let n = sys.dim();
            let grid: Vec<Vec<BigInt>> = (0..n)
                .map(|_| lo..=hi)
                .multi_cartesian_product()
                .map(|v| v.into_iter().map(BigInt::from).collect())
                .collect();
            let mut checked = 0usize;
            for ch in &chambers {
                let qp = partition_quasipoly(&sys, ch).map_err(math_err)?;
                let pts: Vec<&Vec<BigInt>> =
                    grid.iter().filter(|lam| in_validity_region(&sys, ch, &int_to_rat(lam))).collect();
                checked += pts.len();
                let bad = pts.par_iter().find_map_first(|lam| {
                    let expected = match count_points(&sys, lam) {
                        Ok(v) => v,
                        Err(e) => return Some(Err(e)),
                    };
                    let got = match qp.evaluate(&int_to_rat(lam)) {
                        Ok(v) => v,
                        Err(e) => return Some(Err(e)),
                    };
                    if got != BigRational::from_integer(expected.clone()) {
                        return Some(Ok(((*lam).clone(), expected, got)));
                    }
                    None
                });
                match bad {
                    Some(Err(e)) => return Err(math_err(e)),
                    Some(Ok((lam, expected, got))) => {
                        let lam_str = lam.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                        return Err(Failure::Counterexample(format!(
                            "mismatch\n  system: {system}\n  chamber: {}\n  lambda: ({lam_str})\n  expected: {expected}\n  got: {got}\n",
                            ch.id
                        )));
                    }
                    None => {}
                }
            }
            Ok(format!("ok: {} chambers, {checked} points checked\n", chambers.len()))
        }
    }
}
