//! DIMACS CNF and QDIMACS.

use std::fmt::Write;

use sdnnf_core::{Clause, Cnf, Lit, Qbf, Quant, Var};

use crate::{content_lines, token, FormatError, Result};

struct Header {
    num_vars: u32,
    num_clauses: usize,
}

fn parse_header(line: usize, text: &str) -> Result<Header> {
    let mut it = text.split_whitespace();
    if it.next() != Some("p") || it.next() != Some("cnf") {
        return Err(FormatError::at(line, "expected `p cnf <vars> <clauses>`"));
    }
    let num_vars = token(it.next(), line, "variable count")?;
    let num_clauses = token(it.next(), line, "clause count")?;
    if it.next().is_some() {
        return Err(FormatError::at(line, "trailing tokens after header"));
    }
    Ok(Header {
        num_vars,
        num_clauses,
    })
}

fn parse_lit(tok: &str, line: usize, num_vars: u32) -> Result<i64> {
    let code: i64 = token(Some(tok), line, "literal")?;
    if code.unsigned_abs() > num_vars as u64 {
        return Err(FormatError::at(
            line,
            format!("literal {code} out of range for {num_vars} variables"),
        ));
    }
    Ok(code)
}

/// Reads the clause section, which may wrap clauses across lines.
fn parse_clauses<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    header: &Header,
    header_line: usize,
) -> Result<Vec<Clause>> {
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = header_line;
    for (line, text) in lines {
        if text.starts_with('%') {
            break;
        }
        last_line = line;
        for tok in text.split_whitespace() {
            let code = parse_lit(tok, line, header.num_vars)?;
            match Lit::from_dimacs(code) {
                Some(l) => current.push(l),
                None => clauses.push(Clause::new(std::mem::take(&mut current))),
            }
        }
    }
    if !current.is_empty() {
        return Err(FormatError::at(last_line, "last clause is missing its terminating 0"));
    }
    if clauses.len() != header.num_clauses {
        return Err(FormatError::at(
            header_line,
            format!("header declares {} clauses but {} were read", header.num_clauses, clauses.len()),
        ));
    }
    Ok(clauses)
}

pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut lines = content_lines(text);
    let (hl, ht) = lines.next().ok_or_else(|| FormatError::at(1, "missing `p cnf` header"))?;
    let header = parse_header(hl, ht)?;
    let clauses = parse_clauses(lines, &header, hl)?;
    Ok(Cnf::new(header.num_vars, clauses)?)
}

pub fn parse_qdimacs(text: &str) -> Result<Qbf> {
    let mut lines = content_lines(text).peekable();
    let (hl, ht) = lines.next().ok_or_else(|| FormatError::at(1, "missing `p cnf` header"))?;
    let header = parse_header(hl, ht)?;
    let mut blocks: Vec<(Quant, Vec<Var>)> = Vec::new();
    let mut seen = vec![false; header.num_vars as usize + 1];
    while let Some(&(line, text)) = lines.peek() {
        let quant = match text.split_whitespace().next() {
            Some("e") => Quant::Exists,
            Some("a") => Quant::Forall,
            _ => break,
        };
        lines.next();
        let mut vars = Vec::new();
        let mut closed = false;
        for tok in text.split_whitespace().skip(1) {
            if closed {
                return Err(FormatError::at(line, "tokens after the terminating 0"));
            }
            let code = parse_lit(tok, line, header.num_vars)?;
            if code < 0 {
                return Err(FormatError::at(line, format!("negative variable {code} in quantifier block")));
            }
            if code == 0 {
                closed = true;
                continue;
            }
            let v = code as Var;
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(FormatError::at(line, format!("variable {v} is quantified twice")));
            }
            vars.push(v);
        }
        if !closed {
            return Err(FormatError::at(line, "quantifier block is missing its terminating 0"));
        }
        if vars.is_empty() {
            return Err(FormatError::at(line, "empty quantifier block"));
        }
        blocks.push((quant, vars));
    }
    let clauses = parse_clauses(lines, &header, hl)?;
    let matrix = Cnf::new(header.num_vars, clauses)?;
    Ok(Qbf::new(blocks, matrix)?)
}

fn write_clauses(out: &mut String, f: &Cnf) {
    for c in f.clauses() {
        for l in c.lits() {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
}

pub fn write_dimacs(f: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars(), f.clauses().len());
    write_clauses(&mut out, f);
    out
}

pub fn write_qdimacs(q: &Qbf) -> String {
    let f = q.matrix();
    let mut out = format!("p cnf {} {}\n", f.num_vars(), f.clauses().len());
    for b in q.prefix() {
        out.push(match b.quant {
            Quant::Exists => 'e',
            Quant::Forall => 'a',
        });
        for v in &b.vars {
            let _ = write!(out, " {v}");
        }
        out.push_str(" 0\n");
    }
    write_clauses(&mut out, f);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_line_numbers() {
        let err = parse_dimacs("c hi\np cnf 2 1\n1 3 0\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
        let err = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }), "{err}");
        let err = parse_dimacs("p cnf x 1\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn quantifier_lines() {
        let q = parse_qdimacs("p cnf 3 1\ne 1 0\ne 2 0\na 3 0\n1 2 3 0\n").unwrap();
        assert_eq!(q.prefix().len(), 2);
        assert_eq!(q.prefix()[0].vars, vec![1, 2]);
        assert!(parse_qdimacs("p cnf 2 1\ne 1 0\na 1 0\n1 0\n").is_err());
        assert!(parse_qdimacs("p cnf 2 1\ne 0\n1 0\n").is_err());
    }
}
