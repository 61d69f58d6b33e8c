//! Deterministic text and LaTeX rendering.
//!
//! Polynomials print in graded order (total degree descending, then
//! exponents descending), so `a2+1` and `7*a1^2-7*a1*a2+2*a2^2+...` come
//! out the same way every run.  LaTeX groups conjugate poles into cos/sin
//! pairs; the JSON side keeps the exact cyclotomic data.

use num::{BigInt, BigRational, One, Signed, Zero};
use vpf_core::{CycNumber, QuasiPolynomial, Rat, SymbolicPoly};

pub fn lambda_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

pub fn display_order<'a, I: Iterator<Item = &'a Vec<u32>>>(keys: I) -> Vec<Vec<u32>> {
    let mut v: Vec<Vec<u32>> = keys.cloned().collect();
    v.sort_by(|a, b| {
        let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
        db.cmp(&da).then_with(|| b.cmp(a))
    });
    v
}

pub fn render_compact(p: &SymbolicPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for k in display_order(p.terms().keys()) {
        let c = &p.terms()[&k];
        let mono = mono_compact(&k, names);
        let (neg, body) = coeff_compact(c, !mono.is_empty());
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
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

fn mono_compact(k: &[u32], names: &[String]) -> String {
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

fn coeff_compact(c: &CycNumber, has_mono: bool) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        let neg = r.is_negative();
        let a = r.abs();
        if a.is_one() && has_mono {
            return (neg, String::new());
        }
        let s = a.to_string();
        if s.contains('/') && has_mono {
            return (neg, format!("({s})"));
        }
        return (neg, s);
    }
    (false, format!("({})", cyc_body(c)))
}

fn cyc_body(c: &CycNumber) -> String {
    let m = c.order();
    let mut inner = String::new();
    for (e, v) in c.coeffs().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let root = match e {
            0 => String::new(),
            1 => format!("w{m}"),
            _ => format!("w{m}^{e}"),
        };
        let a = v.abs();
        let body = if a.is_one() && !root.is_empty() {
            root
        } else if root.is_empty() {
            a.to_string()
        } else {
            format!("{a}*{root}")
        };
        if inner.is_empty() {
            if v.is_negative() {
                inner.push('-');
            }
        } else {
            inner.push(if v.is_negative() { '-' } else { '+' });
        }
        inner.push_str(&body);
    }
    inner
}

pub fn linear_compact(w: &[BigInt], names: &[String]) -> String {
    let mut out = String::new();
    for (i, c) in w.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let a = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push(if c.is_negative() { '-' } else { '+' });
        }
        if a.is_one() {
            out.push_str(&names[i]);
        } else {
            out.push_str(&format!("{}*{}", a, names[i]));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn pole_tuple(pole: &[Rat]) -> String {
    format!("({})", pole.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","))
}

pub fn text_formula(qp: &QuasiPolynomial) -> String {
    let names = lambda_names(qp.nvars);
    let mut out = format!("chamber {}\n", qp.chamber);
    out.push_str("validity:\n");
    for (w, r) in &qp.validity {
        out.push_str(&format!("  {} > {}\n", linear_compact(w, &names), r));
    }
    out.push_str("terms:\n");
    for (pole, poly) in &qp.terms {
        out.push_str(&format!("  pole {}: {}\n", pole_tuple(pole), render_compact(poly, &names)));
    }
    out
}

fn pole_conj(q: &[Rat]) -> Vec<Rat> {
    q.iter().map(|x| if x.is_zero() { x.clone() } else { BigRational::one() - x }).collect()
}

fn poly_conj(p: &SymbolicPoly) -> SymbolicPoly {
    let n = p.nvars();
    let mut acc = SymbolicPoly::zero(n);
    for (k, c) in p.terms() {
        let mut t = SymbolicPoly::constant(n, c.conj());
        for (i, &e) in k.iter().enumerate() {
            if e > 0 {
                t = t.mul(&SymbolicPoly::var(n, i).pow(e));
            }
        }
        acc = acc.add(&t);
    }
    acc
}

fn split_real_imag(p: &SymbolicPoly) -> (SymbolicPoly, SymbolicPoly) {
    let pc = poly_conj(p);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let re = p.add(&pc).scale_rat(&half);
    let im = p.sub(&pc).scale(&CycNumber::root_of_unity(-1, 4)).scale_rat(&half);
    (re, im)
}

fn latex_angle(q: &[Rat], names: &[String]) -> String {
    let mut out = String::new();
    for (i, x) in q.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let a = x.abs();
        if out.is_empty() {
            if x.is_negative() {
                out.push('-');
            }
        } else {
            out.push(if x.is_negative() { '-' } else { '+' });
        }
        if a.is_one() {
            out.push_str(&names[i]);
        } else if a.is_integer() {
            out.push_str(&format!("{}{}", a, names[i]));
        } else {
            out.push_str(&format!("\\tfrac{{{}}}{{{}}}{}", a.numer(), a.denom(), names[i]));
        }
    }
    out
}

fn latex_mono(k: &[u32], names: &[String]) -> String {
    let mut s = String::new();
    for (i, &e) in k.iter().enumerate() {
        match e {
            0 => {}
            1 => s.push_str(&names[i]),
            _ => s.push_str(&format!("{}^{{{e}}}", names[i])),
        }
    }
    s
}

fn latex_rat(a: &Rat) -> String {
    if a.is_integer() {
        a.to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
    }
}

fn latex_coeff(c: &CycNumber, has_mono: bool) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        let neg = r.is_negative();
        let a = r.abs();
        if a.is_one() && has_mono {
            return (neg, String::new());
        }
        return (neg, latex_rat(&a));
    }
    let m = c.order();
    let mut inner = String::new();
    for (e, v) in c.coeffs().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let root = match e {
            0 => String::new(),
            1 => format!("\\zeta_{{{m}}}"),
            _ => format!("\\zeta_{{{m}}}^{{{e}}}"),
        };
        let a = v.abs();
        let body = if a.is_one() && !root.is_empty() {
            root
        } else {
            format!("{}{root}", latex_rat(&a))
        };
        if inner.is_empty() {
            if v.is_negative() {
                inner.push('-');
            }
        } else {
            inner.push(if v.is_negative() { '-' } else { '+' });
        }
        inner.push_str(&body);
    }
    (false, format!("\\left({inner}\\right)"))
}

pub fn latex_poly(p: &SymbolicPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for k in display_order(p.terms().keys()) {
        let c = &p.terms()[&k];
        let mono = latex_mono(&k, names);
        let (neg, body) = latex_coeff(c, !mono.is_empty());
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        match (body.is_empty(), mono.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&mono),
            (false, true) => out.push_str(&body),
            (false, false) => {
                out.push_str(&body);
                out.push_str(&mono);
            }
        }
    }
    out
}

fn push_trig(parts: &mut Vec<String>, re: &SymbolicPoly, im: &SymbolicPoly, theta: &str, doubled: bool, names: &[String]) {
    let f = if doubled { "2" } else { "" };
    if !re.is_zero() {
        parts.push(format!("{f}\\left[{}\\right]\\cos\\left(2\\pi({theta})\\right)", latex_poly(re, names)));
    }
    if !im.is_zero() {
        parts.push(format!("{f}\\left[{}\\right]\\sin\\left(2\\pi({theta})\\right)", latex_poly(im, names)));
    }
}

pub fn latex_formula(qp: &QuasiPolynomial) -> String {
    let names: Vec<String> = (1..=qp.nvars).map(|i| format!("a_{{{i}}}")).collect();
    let mut parts: Vec<String> = vec![];
    let mut used = vec![false; qp.terms.len()];
    for i in 0..qp.terms.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (q, p) = &qp.terms[i];
        if q.iter().all(|x| x.is_zero()) {
            parts.push(format!("\\left[{}\\right]", latex_poly(p, &names)));
            continue;
        }
        let qc = pole_conj(q);
        if qc == *q {
            let theta = latex_angle(q, &names);
            let (re, im) = split_real_imag(p);
            push_trig(&mut parts, &re, &im, &theta, false, &names);
        } else if let Some(j) = (i + 1..qp.terms.len()).find(|&j| !used[j] && qp.terms[j].0 == qc) {
            used[j] = true;
            let (rep_q, rep_p) = if *q <= qc {
                (q.clone(), p.clone())
            } else {
                (qc, qp.terms[j].1.clone())
            };
            let theta = latex_angle(&rep_q, &names);
            let (re, im) = split_real_imag(&rep_p);
            push_trig(&mut parts, &re, &im, &theta, true, &names);
        } else {
            let theta = latex_angle(q, &names);
            parts.push(format!("e^{{-2\\pi i({theta})}}\\left[{}\\right]", latex_poly(p, &names)));
        }
    }
    if parts.is_empty() {
        return "0\n".into();
    }
    parts.join("\n+ ") + "\n"
}
