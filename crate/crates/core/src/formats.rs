//! Plain-text file formats.
//!
//! `.pmap`:
//! ```text
//! %field Q
//! %vars x y
//! x -> x + y^3
//! y -> y
//! ```
//!
//! `.oalg` (indices are 1-based, ascending for symmetric operators):
//! ```text
//! %field GF(5)
//! %dim 2
//! op psi2 arity 2
//! 1 : 1 2 = 1/2
//! op m arity 2 ordered
//! 2 : 2 1 = -1
//! ```
//!
//! Term expression files use `%vars` and one `x -> expr` line per variable.
//! Blank lines and `#` comments are ignored everywhere.

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::algebra::{MultilinearOp, OperatorAlgebra, TermExpr};
use crate::context::{Ctx, VarContext};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::parse::parse_polynomial;
use crate::polymap::PolyMap;

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Format { line, message: message.into() }
}

/// Numbered non-empty lines with comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_field(text: &str) -> Result<Field> {
    let t = text.trim();
    if t == "Q" {
        return Ok(Field::Rationals);
    }
    let p = t
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|p| p.trim().parse::<u64>().ok())
        .ok_or_else(|| Error::MalformedParameters(format!("unknown field `{t}`")))?;
    Field::prime(p)
}

/// `a` or `a/b` with integers `a, b`.
pub fn parse_scalar(text: &str, field: Field) -> Result<Scalar> {
    let bad = || Error::MalformedParameters(format!("`{}` is not a scalar", text.trim()));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    field.from_ratio(&n, &d)
}

/// Header lines shared by the map and expression formats.
struct Header {
    field: Option<Field>,
    vars: Option<Vec<String>>,
    dim: Option<usize>,
}

fn header(line: usize, l: &str, h: &mut Header) -> Result<bool> {
    let Some(rest) = l.strip_prefix('%') else {
        return Ok(false);
    };
    let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    match key {
        "field" => h.field = Some(parse_field(value).map_err(|e| err(line, e.to_string()))?),
        "vars" => h.vars = Some(value.split_whitespace().map(str::to_string).collect()),
        "dim" => {
            h.dim = Some(value.trim().parse().map_err(|_| err(line, format!("bad dimension `{value}`")))?);
        }
        _ => return Err(err(line, format!("unknown header `%{key}`"))),
    }
    Ok(true)
}

/// Collects `name -> body` lines after the headers, in variable order.
fn assignments<'t>(text: &'t str, what: &str) -> Result<(Ctx, Vec<&'t str>)> {
    let mut h = Header { field: None, vars: None, dim: None };
    let mut bodies: Vec<(usize, &str, &str)> = Vec::new();
    for (line, l) in lines(text) {
        if header(line, l, &mut h)? {
            continue;
        }
        let (name, body) = l.split_once("->").ok_or_else(|| err(line, format!("expected `name -> {what}`")))?;
        bodies.push((line, name.trim(), body.trim()));
    }
    let vars = h.vars.ok_or_else(|| err(0, "missing %vars"))?;
    let ctx = VarContext::new(&vars, h.field.unwrap_or(Field::Rationals)).map_err(|e| err(0, e.to_string()))?;
    let mut out: Vec<Option<&str>> = vec![None; vars.len()];
    for (line, name, body) in bodies {
        let i = ctx.index_of(name).ok_or_else(|| err(line, format!("`{name}` is not declared")))?;
        if out[i].replace(body).is_some() {
            return Err(err(line, format!("`{name}` assigned twice")));
        }
    }
    let out = out
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| err(0, format!("no image for `{}`", vars[i]))))
        .collect::<Result<_>>()?;
    Ok((ctx, out))
}

pub fn parse_pmap(text: &str) -> Result<PolyMap> {
    let (ctx, bodies) = assignments(text, "polynomial")?;
    let images = bodies
        .iter()
        .map(|b| parse_polynomial(b, &ctx))
        .collect::<Result<Vec<_>>>()?;
    PolyMap::new(&ctx, images)
}

pub fn write_pmap(f: &PolyMap) -> String {
    let ctx = f.ctx();
    let mut s = format!("%field {}\n%vars {}\n", ctx.field(), ctx.names().join(" "));
    for (i, p) in f.images().iter().enumerate() {
        let _ = writeln!(s, "{} -> {}", ctx.name(i), p.to_canonical_string());
    }
    s
}

/// Parses an operator algebra; the basis is named `e1..en`.
pub fn parse_oalg(text: &str) -> Result<OperatorAlgebra> {
    let mut h = Header { field: None, vars: None, dim: None };
    struct Pending {
        line: usize,
        name: String,
        arity: usize,
        ordered: bool,
        entries: Vec<(usize, Vec<usize>, Scalar)>,
    }
    let mut ops: Vec<Pending> = Vec::new();
    for (line, l) in lines(text) {
        if header(line, l, &mut h)? {
            continue;
        }
        let field = h.field.unwrap_or(Field::Rationals);
        let dim = h.dim.ok_or_else(|| err(line, "%dim must come before operators"))?;
        let words: Vec<&str> = l.split_whitespace().collect();
        if words.first() == Some(&"op") {
            let (name, arity, ordered) = match words.as_slice() {
                ["op", name, "arity", l] => (name, l, false),
                ["op", name, "arity", l, "ordered"] => (name, l, true),
                _ => return Err(err(line, "expected `op <name> arity <l> [ordered]`")),
            };
            let arity = arity.parse().map_err(|_| err(line, format!("bad arity `{arity}`")))?;
            ops.push(Pending { line, name: name.to_string(), arity, ordered, entries: Vec::new() });
            continue;
        }
        let op = ops.last_mut().ok_or_else(|| err(line, "coefficient before any `op` line"))?;
        let (lhs, value) = l.split_once('=').ok_or_else(|| err(line, "expected `i : j1 .. jl = c`"))?;
        let (out, idx) = lhs.split_once(':').ok_or_else(|| err(line, "expected `i : j1 .. jl = c`"))?;
        let index = |s: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(i) if (1..=dim).contains(&i) => Ok(i - 1),
                _ => Err(err(line, format!("index `{}` not in 1..={dim}", s.trim()))),
            }
        };
        let out = index(out)?;
        let idx = idx.split_whitespace().map(index).collect::<Result<Vec<_>>>()?;
        if idx.len() != op.arity {
            return Err(err(line, format!("{} indices for arity {}", idx.len(), op.arity)));
        }
        if !op.ordered && idx.windows(2).any(|w| w[0] > w[1]) {
            return Err(err(line, "indices of a symmetric operator must be ascending"));
        }
        let c = parse_scalar(value, field).map_err(|e| err(line, e.to_string()))?;
        op.entries.push((out, idx, c));
    }
    let field = h.field.unwrap_or(Field::Rationals);
    let dim = h.dim.ok_or_else(|| err(0, "missing %dim"))?;
    let ctx = VarContext::numbered("e", dim, field).map_err(|e| err(0, e.to_string()))?;
    let ops = ops
        .into_iter()
        .map(|p| {
            let made = if p.ordered {
                MultilinearOp::ordered(&p.name, p.arity, dim, field, p.entries)
            } else {
                MultilinearOp::symmetric(&p.name, p.arity, dim, field, p.entries)
            };
            made.map_err(|e| err(p.line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorAlgebra::new(&ctx, ops)
}

pub fn write_oalg(a: &OperatorAlgebra) -> String {
    let mut s = format!("%field {}\n%dim {}\n", a.field(), a.dim());
    for op in a.ops() {
        let kind = if op.is_symmetric() { "" } else { " ordered" };
        let _ = writeln!(s, "op {} arity {}{kind}", op.name(), op.arity());
        for ((out, idx), c) in op.coefficients() {
            let idx: Vec<String> = idx.iter().map(|j| (j + 1).to_string()).collect();
            let _ = writeln!(s, "{} : {} = {c}", out + 1, idx.join(" "));
        }
    }
    s
}

/// Reads term expressions over the variables in `%vars`, one per variable.
pub fn parse_exprs(text: &str, a: &OperatorAlgebra) -> Result<(Vec<String>, Vec<TermExpr>)> {
    let (ctx, bodies) = assignments(text, "expression")?;
    let names = ctx.names().to_vec();
    let exprs = bodies
        .iter()
        .map(|b| TermExpr::parse(b, a, &names))
        .collect::<Result<Vec<_>>>()?;
    Ok((names, exprs))
}
