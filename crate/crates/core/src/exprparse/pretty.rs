use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeffring::{Atom, Mono, ZRat};
use crate::cyclofield::{CycloScalar, FieldCtx};
use crate::opalgebra::{OpExpr, OpKey};

fn rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn power(base: &str, e: i64) -> String {
    if e == 1 {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

fn zeta_pow(t: usize) -> String {
    match t {
        0 => "1".to_string(),
        _ => power("zeta", t as i64),
    }
}

/// `(negative, body, body_is_one)` for a scalar used as a factor.
fn signed_scalar(c: &CycloScalar) -> (bool, String, bool) {
    let terms: Vec<(usize, BigRational)> = c.coords().into_iter().enumerate().filter(|(_, q)| !q.is_zero()).collect();
    match terms.as_slice() {
        [] => (false, "0".to_string(), false),
        [(0, q)] => (q.is_negative(), rational(&q.abs()), q.abs().is_one()),
        [(j, q)] => {
            let z = zeta_pow(*j);
            let body = if q.abs().is_one() { z } else { format!("{}*{z}", rational(&q.abs())) };
            (q.is_negative(), body, false)
        }
        _ => {
            let mut s = String::from("(");
            for (n, (j, q)) in terms.iter().enumerate() {
                let mag = q.abs();
                let body = match (*j, mag.is_one()) {
                    (0, _) => rational(&mag),
                    (_, true) => zeta_pow(*j),
                    _ => format!("{}*{}", rational(&mag), zeta_pow(*j)),
                };
                push_signed(&mut s, n == 0, q.is_negative(), &body);
            }
            s.push(')');
            (false, s, false)
        }
    }
}

fn push_signed(out: &mut String, first: bool, neg: bool, body: &str) {
    match (first, neg) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    out.push_str(body);
}

/// Text form of a scalar, e.g. `-3/2` or `(1 + zeta^2)`.
pub fn pretty_scalar(c: &CycloScalar) -> String {
    let (neg, body, _) = signed_scalar(c);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Sign and factor list of a coefficient function; an empty list means `1`.
fn zrat_factors(f: &ZRat, _ctx: &FieldCtx) -> (bool, Vec<String>) {
    let coeffs = f.numerator().coeffs();
    let nonzero: Vec<usize> = (0..coeffs.len()).filter(|j| !coeffs[*j].is_zero()).collect();
    let mut factors = Vec::new();
    let mut neg = false;
    if let [j] = nonzero.as_slice() {
        let (n, body, one) = signed_scalar(&coeffs[*j]);
        neg = n;
        if !one {
            factors.push(body);
        }
        if *j > 0 {
            factors.push(power("z", *j as i64));
        }
    } else {
        let mut s = String::from("(");
        for (n, j) in nonzero.iter().enumerate() {
            let (neg, body, one) = signed_scalar(&coeffs[*j]);
            let mut parts = Vec::new();
            if !one || *j == 0 {
                parts.push(body);
            }
            if *j > 0 {
                parts.push(power("z", *j as i64));
            }
            push_signed(&mut s, n == 0, neg, &parts.join("*"));
        }
        s.push(')');
        factors.push(s);
    }
    for (atom, e) in f.den_atoms() {
        let base = match *atom {
            Atom::Z => "z".to_string(),
            Atom::Lin(t) => format!("(z - {})", zeta_pow(t as usize)),
            Atom::Quad(t) => format!("(z^2 - {})", zeta_pow(t as usize)),
        };
        factors.push(format!("{base}^-{e}"));
    }
    (neg, factors)
}

/// Text form of a coefficient function.
pub fn pretty_zrat(f: &ZRat, ctx: &FieldCtx) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let (neg, factors) = zrat_factors(f, ctx);
    let body = if factors.is_empty() { "1".to_string() } else { factors.join("*") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn entry(key: OpKey, mono: Mono, f: &ZRat, ctx: &FieldCtx) -> (bool, String) {
    let (neg, mut factors) = zrat_factors(f, ctx);
    for (name, d) in [("a", mono.a), ("b", mono.b), ("w2", mono.w)] {
        if d > 0 {
            factors.push(power(name, d as i64));
        }
    }
    if mono.m != 0 {
        factors.push(power("r", mono.m as i64));
    }
    if key.p > 0 {
        factors.push(power("dr", key.p as i64));
    }
    if key.q > 0 {
        factors.push(power("dphi", key.q as i64));
    }
    if key.i > 0 {
        factors.push(power("R", key.i as i64));
    }
    if key.e > 0 {
        factors.push("I".to_string());
    }
    if factors.is_empty() {
        factors.push("1".to_string());
    }
    (neg, factors.join("*"))
}

/// Canonical text of an operator; parses back to an equal value.
pub fn pretty(x: &OpExpr) -> String {
    let ctx = x.ctx();
    let mut out = String::new();
    for (n, (key, mono, f)) in x.entries().enumerate() {
        let (neg, body) = entry(key, mono, f, ctx);
        push_signed(&mut out, n == 0, neg, &body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// First nonzero term only, as used in residual samples.
pub fn pretty_first_term(x: &OpExpr) -> String {
    x.entries()
        .next()
        .map(|(key, mono, f)| {
            let (neg, body) = entry(key, mono, f, x.ctx());
            if neg {
                format!("-{body}")
            } else {
                body
            }
        })
        .unwrap_or_default()
}
