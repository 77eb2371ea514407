//! Text format: a header `p rcsp <model> <k> <n> <m> <d>` and then one line
//! per clause, `c v_1 L_1 ... v_k L_k`, with 1-based variables.

use std::fmt::Write as _;
use std::path::Path;

use super::instance::NaeInstance;
use crate::error::{Error, Result};
use crate::model::Model;

pub fn format_instance(inst: &NaeInstance) -> String {
    let mut out = format!("p rcsp {} {} {} {} {}\n", inst.model, inst.k, inst.n, inst.m, inst.d);
    for (c, l) in inst.clauses.iter().zip(&inst.literals) {
        out.push('c');
        for (v, b) in c.iter().zip(l) {
            let _ = write!(out, " {} {}", v + 1, b);
        }
        out.push('\n');
    }
    out
}

/// `(column, token)` pairs with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn number(line: usize, tok: (usize, &str), what: &str) -> Result<usize> {
    tok.1
        .parse::<usize>()
        .map_err(|_| parse_err(line, tok.0, format!("expected {what}, found '{}'", tok.1)))
}

pub fn parse_instance(text: &str) -> Result<NaeInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let ht = tokens(header);
    if ht.len() != 7 || ht[0].1 != "p" || ht[1].1 != "rcsp" {
        return Err(parse_err(hl, 1, "header must read 'p rcsp <model> <k> <n> <m> <d>'"));
    }
    let model: Model = ht[2]
        .1
        .parse()
        .map_err(|_| parse_err(hl, ht[2].0, format!("unknown model '{}'", ht[2].1)))?;
    let k = number(hl, ht[3], "k")?;
    let n = number(hl, ht[4], "n")?;
    let m = number(hl, ht[5], "m")?;
    let d = number(hl, ht[6], "d")?;
    if k < 2 || n == 0 || d == 0 {
        return Err(parse_err(hl, 1, "header needs k >= 2, n >= 1, d >= 1"));
    }
    if n * d != m * k {
        return Err(parse_err(
            hl,
            ht[5].0,
            format!("header inconsistent: n*d = {} but m*k = {}", n * d, m * k),
        ));
    }

    let mut clauses = Vec::with_capacity(m);
    let mut literals = Vec::with_capacity(m);
    let mut last_line = hl;
    for (ln, line) in lines {
        last_line = ln;
        let t = tokens(line);
        if t[0].1 != "c" {
            return Err(parse_err(ln, t[0].0, format!("expected 'c', found '{}'", t[0].1)));
        }
        if clauses.len() == m {
            return Err(parse_err(ln, 1, format!("more than m = {m} clause lines")));
        }
        if t.len() != 1 + 2 * k {
            let col = t.get(1 + 2 * k).map_or(line.len() + 1, |x| x.0);
            return Err(parse_err(ln, col, format!("clause needs {k} variable/literal pairs")));
        }
        let mut vars = Vec::with_capacity(k);
        let mut lits = Vec::with_capacity(k);
        for pair in t[1..].chunks(2) {
            let v = number(ln, pair[0], "variable index")?;
            if v == 0 || v > n {
                return Err(parse_err(ln, pair[0].0, format!("variable {v} outside 1..={n}")));
            }
            let b = match pair[1].1 {
                "0" => 0u8,
                "1" => 1u8,
                other => return Err(parse_err(ln, pair[1].0, format!("literal must be 0 or 1, found '{other}'"))),
            };
            vars.push(v - 1);
            lits.push(b);
        }
        clauses.push(vars);
        literals.push(lits);
    }
    if clauses.len() != m {
        return Err(parse_err(last_line + 1, 1, format!("expected {m} clause lines, found {}", clauses.len())));
    }
    NaeInstance::from_parts(model, n, k, d, clauses, literals)
}

pub fn write_instance(inst: &NaeInstance, path: &Path) -> Result<()> {
    std::fs::write(path, format_instance(inst))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<NaeInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}
