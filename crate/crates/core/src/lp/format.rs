//! CPLEX LP text format (Minimize / Subject To / Bounds / End).

use std::collections::HashMap;
use std::fmt::Write;

use super::{LpError, LpModel};

const TERMS_PER_LINE: usize = 8;

/// Writes `model` in LP format. Output is byte-stable for a given model;
/// integral coefficients are written without a decimal point.
pub fn export_lp(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ equality-form model, all bounds explicit\n");
    out.push_str("Minimize\n obj:");
    let objective: Vec<(usize, f64)> = model
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.cost != 0.0)
        .map(|(j, c)| (j, c.cost))
        .collect();
    if objective.is_empty() && !model.columns.is_empty() {
        write_terms(&mut out, model, &[(0, 0.0)]);
    } else {
        write_terms(&mut out, model, &objective);
    }
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        write!(out, " {}:", row.name).unwrap();
        write_terms(&mut out, model, &row.coeffs);
        writeln!(out, " = {}", row.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for c in &model.columns {
        if c.is_fixed() {
            writeln!(out, " {} = {}", c.name, c.lower).unwrap();
        } else if c.upper.is_infinite() {
            writeln!(out, " {} >= {}", c.name, c.lower).unwrap();
        } else {
            writeln!(out, " {} <= {} <= {}", c.lower, c.name, c.upper).unwrap();
        }
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, model: &LpModel, terms: &[(usize, f64)]) {
    for (i, &(j, a)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if a < 0.0 { '-' } else { '+' };
        if i == 0 && sign == '+' {
            write!(out, " {} {}", a, model.columns[j].name).unwrap();
        } else {
            write!(out, " {sign} {} {}", a.abs(), model.columns[j].name).unwrap();
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Part {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Done,
}

/// Reads the subset of the LP format produced by [`export_lp`]: a single
/// minimization objective, equality rows and simple bounds.
///
/// Columns are numbered in order of first appearance.
pub fn read_lp(text: &str) -> Result<LpModel, LpError> {
    let mut model = LpModel::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut part = Part::Preamble;
    let mut statement: Vec<(usize, String)> = Vec::new();

    let mut lookup = |model: &mut LpModel, name: &str| -> usize {
        *index
            .entry(name.to_owned())
            .or_insert_with(|| model.add_column(name, 0.0, f64::INFINITY, 0.0))
    };

    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('\\').next().unwrap_or("")))
        .collect();

    let mut flush = |model: &mut LpModel,
                     part: Part,
                     statement: &mut Vec<(usize, String)>|
     -> Result<(), LpError> {
        if statement.is_empty() {
            return Ok(());
        }
        let line = statement[0].0;
        let joined = statement
            .drain(..)
            .map(|(_, s)| s)
            .collect::<Vec<_>>()
            .join(" ");
        match part {
            Part::Objective => {
                let body = strip_label(&joined).1;
                for (name, a) in parse_terms(body, line)? {
                    let j = lookup(model, &name);
                    model.columns[j].cost += a;
                }
            }
            Part::Constraints => {
                let (label, body) = strip_label(&joined);
                let (lhs, rhs) = body.split_once('=').ok_or_else(|| LpError::Parse {
                    line,
                    msg: "only equality rows are supported".into(),
                })?;
                if lhs.ends_with(['<', '>']) || rhs.starts_with(['<', '>']) {
                    return Err(LpError::Parse {
                        line,
                        msg: "only equality rows are supported".into(),
                    });
                }
                let coeffs = parse_terms(lhs, line)?
                    .into_iter()
                    .map(|(name, a)| (lookup(model, &name), a))
                    .collect();
                let rhs = parse_number(rhs.trim(), line)?;
                let name = label.map_or_else(|| format!("r{}", model.row_count()), str::to_owned);
                model.add_row(name, coeffs, rhs);
            }
            Part::Bounds => parse_bound(model, &joined, line, &mut lookup)?,
            Part::Preamble | Part::Done => {
                return Err(LpError::Parse {
                    line,
                    msg: format!("unexpected `{}`", joined.trim()),
                })
            }
        }
        Ok(())
    };

    for (line, raw) in lines {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        let next = match lower.as_str() {
            "minimize" | "minimise" | "min" => Some(Part::Objective),
            "subject to" | "such that" | "st" | "s.t." => Some(Part::Constraints),
            "bounds" | "bound" => Some(Part::Bounds),
            "end" => Some(Part::Done),
            "maximize" | "maximise" | "max" => {
                return Err(LpError::Parse {
                    line,
                    msg: "only minimization is supported".into(),
                })
            }
            _ => None,
        };
        if let Some(next) = next {
            flush(&mut model, part, &mut statement)?;
            part = next;
            continue;
        }
        // Continuation lines start with whitespace or an operator.
        let continues = raw.starts_with(char::is_whitespace)
            && (trimmed.starts_with(['+', '-']) || !trimmed.contains(':'))
            && !statement.is_empty()
            && part != Part::Bounds;
        if !continues {
            flush(&mut model, part, &mut statement)?;
        }
        statement.push((line, trimmed.to_owned()));
    }
    flush(&mut model, part, &mut statement)?;
    if part != Part::Done {
        return Err(LpError::Parse {
            line: text.lines().count(),
            msg: "missing `End`".into(),
        });
    }
    Ok(model)
}

fn strip_label(s: &str) -> (Option<&str>, &str) {
    match s.split_once(':') {
        Some((label, body)) => (Some(label.trim()), body),
        None => (None, s),
    }
}

fn parse_number(s: &str, line: usize) -> Result<f64, LpError> {
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| LpError::Parse {
            line,
            msg: format!("expected a number, found `{s}`"),
        }),
    }
}

fn parse_terms(s: &str, line: usize) -> Result<Vec<(String, f64)>, LpError> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coeff: Option<f64> = None;
    for tok in s.split_whitespace() {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(v) = tok.parse::<f64>() {
                    coeff = Some(coeff.unwrap_or(1.0) * v);
                } else {
                    let (tok_sign, name) = match tok.strip_prefix('-') {
                        Some(rest) => (-1.0, rest),
                        None => (1.0, tok.strip_prefix('+').unwrap_or(tok)),
                    };
                    if name.is_empty() {
                        return Err(LpError::Parse {
                            line,
                            msg: format!("bad term `{tok}`"),
                        });
                    }
                    terms.push((name.to_owned(), sign * tok_sign * coeff.unwrap_or(1.0)));
                    sign = 1.0;
                    coeff = None;
                }
            }
        }
    }
    if coeff.is_some() {
        return Err(LpError::Parse {
            line,
            msg: "constant term without a variable".into(),
        });
    }
    Ok(terms)
}

fn parse_bound(
    model: &mut LpModel,
    s: &str,
    line: usize,
    lookup: &mut impl FnMut(&mut LpModel, &str) -> usize,
) -> Result<(), LpError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let bad = || LpError::Parse {
        line,
        msg: format!("unsupported bound `{s}`"),
    };
    match toks.as_slice() {
        [lo, "<=", name, "<=", hi] => {
            let (lo, hi) = (parse_number(lo, line)?, parse_number(hi, line)?);
            let j = lookup(model, name);
            model.columns[j].lower = lo;
            model.columns[j].upper = hi;
        }
        [name, op, v] => {
            let v = parse_number(v, line)?;
            let j = lookup(model, name);
            let c = &mut model.columns[j];
            match *op {
                "=" => {
                    c.lower = v;
                    c.upper = v;
                }
                ">=" => c.lower = v,
                "<=" => c.upper = v,
                _ => return Err(bad()),
            }
        }
        [name, free] if free.eq_ignore_ascii_case("free") => {
            let j = lookup(model, name);
            model.columns[j].lower = f64::NEG_INFINITY;
            model.columns[j].upper = f64::INFINITY;
        }
        _ => return Err(bad()),
    }
    Ok(())
}
