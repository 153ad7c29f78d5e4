//! SMT-LIB2 QF_NRA export of the certificate conditions with symbolic λ, and
//! import of a solver's sat model back into a checked certificate.
//!
//! The exported script is byte-deterministic: declarations in variable order
//! (`x0_*`, `x1_*`, `y_*`, `lambda`), then `(> lambda 0)`, the stem rows on
//! `(x0, x1)` (omitted when the stem is true), the loop rows on
//! `(x1, x1 + y)`, and the homogeneous rows on `(y, λ·y)` — the `(* lambda
//! y_v)` products are the only nonlinear terms, one per program variable.
//! No `(set-option)` lines and no push/pop, for maximal solver
//! compatibility. The tool never spawns a solver itself; pipe the script into
//! one (e.g. `z3 -in`) and feed the output back.

use crate::certs;
use crate::program::LassoProgram;
use crate::rational::Rational;
use crate::witness::{CheckReport, Gnta};

use crate::linalg::RationalVector;

/// A complete SMT-LIB2 script (ASCII, `QF_NRA`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtScript {
    pub text: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SmtError {
    #[error("relation contains strict rows; close it (closure mode) before exporting")]
    StrictRows,
    #[error("solver did not report sat (first token `{0}`)")]
    NotSat(String),
    #[error("unsupported model value term `{0}`")]
    UnsupportedModelValue(String),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("model does not satisfy the certificate conditions")]
    InvalidModel(CheckReport),
}

/// Program variable names sanitized to `[A-Za-z0-9_]`, collisions resolved
/// with a numeric suffix.
fn sanitized_names(vars: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(vars.len());
    for v in vars {
        let mut s: String = v
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if s.is_empty() || s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            s.insert(0, '_');
        }
        if out.contains(&s) {
            let mut i = 2;
            while out.contains(&format!("{s}_{i}")) {
                i += 1;
            }
            s = format!("{s}_{i}");
        }
        out.push(s);
    }
    out
}

/// Rational literal: bare integers, `(/ p q)` for fractions, `(- t)` for
/// negatives.
fn literal(r: &Rational) -> String {
    if r.is_negative() {
        format!("(- {})", literal(&r.abs()))
    } else if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("(/ {} {})", r.numer(), r.denom())
    }
}

/// Linear term over the row's coefficients with per-position atoms. Positive
/// terms come first; negatives are folded into a single subtraction so rows
/// read the way they are written on paper.
fn row_term(coeffs: &[(Rational, String)]) -> String {
    let mut pos: Vec<String> = Vec::new();
    let mut neg: Vec<String> = Vec::new();
    for (c, atom) in coeffs {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let term = if mag.is_one() {
            atom.clone()
        } else {
            format!("(* {} {})", literal(&mag), atom)
        };
        if c.is_negative() {
            neg.push(term);
        } else {
            pos.push(term);
        }
    }
    let positive = match pos.len() {
        0 => None,
        1 => Some(pos.remove(0)),
        _ => Some(format!("(+ {})", pos.join(" "))),
    };
    match (positive, neg.is_empty()) {
        (None, true) => "0".to_string(),
        (Some(p), true) => p,
        (None, false) => {
            if neg.len() == 1 {
                format!("(- {})", neg[0])
            } else {
                format!("(- (+ {}))", neg.join(" "))
            }
        }
        (Some(p), false) => format!("(- {} {})", p, neg.join(" ")),
    }
}

/// Exports the certificate-existence conditions for symbolic λ.
pub fn export_qfnra(prog: &LassoProgram) -> Result<SmtScript, SmtError> {
    if prog.has_strict_rows() {
        return Err(SmtError::StrictRows);
    }
    let names = sanitized_names(prog.var_names());
    let n = prog.n();
    let mut text = String::new();
    text.push_str("(set-logic QF_NRA)\n");
    for prefix in ["x0", "x1", "y"] {
        for name in &names {
            text.push_str(&format!("(declare-const {prefix}_{name} Real)\n"));
        }
    }
    text.push_str("(declare-const lambda Real)\n");
    text.push_str("(assert (> lambda 0))\n");

    let assert_row = |row_x: &[Rational],
                      row_xp: &[Rational],
                      atom_x: &dyn Fn(&str) -> String,
                      atom_xp: &dyn Fn(&str) -> String,
                      rhs: String|
     -> String {
        let mut coeffs = Vec::with_capacity(2 * n);
        for (c, name) in row_x.iter().zip(&names) {
            coeffs.push((c.clone(), atom_x(name)));
        }
        for (c, name) in row_xp.iter().zip(&names) {
            coeffs.push((c.clone(), atom_xp(name)));
        }
        format!("(assert (<= {} {}))\n", row_term(&coeffs), rhs)
    };

    if let Some(stem) = prog.stem() {
        for i in 0..stem.num_rows() {
            text.push_str(&assert_row(
                stem.row_x(i),
                stem.row_xp(i),
                &|v| format!("x0_{v}"),
                &|v| format!("x1_{v}"),
                literal(stem.bound(i)),
            ));
        }
    }

    let loop_rel = prog.loop_rel();
    for i in 0..loop_rel.num_rows() {
        text.push_str(&assert_row(
            loop_rel.row_x(i),
            loop_rel.row_xp(i),
            &|v| format!("x1_{v}"),
            &|v| format!("(+ x1_{v} y_{v})"),
            literal(loop_rel.bound(i)),
        ));
    }
    for i in 0..loop_rel.num_rows() {
        text.push_str(&assert_row(
            loop_rel.row_x(i),
            loop_rel.row_xp(i),
            &|v| format!("y_{v}"),
            &|v| format!("(* lambda y_{v})"),
            "0".to_string(),
        ));
    }

    text.push_str("(check-sat)\n(get-model)\n");
    Ok(SmtScript { text })
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn render(&self) -> String {
        match self {
            Sexp::Atom(a) => a.clone(),
            Sexp::List(items) => format!(
                "({})",
                items.iter().map(Sexp::render).collect::<Vec<_>>().join(" ")
            ),
        }
    }
}

fn parse_sexps(text: &str) -> Result<Vec<Sexp>, SmtError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == ';' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '(' {
            stack.push(Vec::new());
            i += 1;
        } else if c == ')' {
            let done = stack
                .pop()
                .ok_or_else(|| SmtError::MalformedModel("unbalanced parenthesis".into()))?;
            match stack.last_mut() {
                Some(top) => top.push(Sexp::List(done)),
                None => return Err(SmtError::MalformedModel("unbalanced parenthesis".into())),
            }
            i += 1;
        } else {
            let start = i;
            while i < chars.len()
                && !chars[i].is_whitespace()
                && chars[i] != '('
                && chars[i] != ')'
                && chars[i] != ';'
            {
                i += 1;
            }
            let atom: String = chars[start..i].iter().collect();
            stack
                .last_mut()
                .expect("stack never empty here")
                .push(Sexp::Atom(atom));
        }
    }
    if stack.len() != 1 {
        return Err(SmtError::MalformedModel("unbalanced parenthesis".into()));
    }
    Ok(stack.pop().expect("single frame"))
}

/// Evaluates a model value term. Supported forms: integer numerals, decimal
/// numerals with a finite expansion, `(- t)`, and `(/ p q)`. Anything else
/// (e.g. algebraic root objects for irrational values) is rejected.
fn eval_value(term: &Sexp) -> Result<Rational, SmtError> {
    match term {
        Sexp::Atom(a) => {
            if let Ok(v) = a.parse::<Rational>() {
                return Ok(v);
            }
            if let Ok(v) = Rational::from_decimal_str(a) {
                return Ok(v);
            }
            Err(SmtError::UnsupportedModelValue(a.clone()))
        }
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), inner] if op == "-" => Ok(-eval_value(inner)?),
            [Sexp::Atom(op), p, q] if op == "/" => {
                let denom = eval_value(q)?;
                if denom.is_zero() {
                    return Err(SmtError::UnsupportedModelValue(term.render()));
                }
                Ok(eval_value(p)? / denom)
            }
            _ => Err(SmtError::UnsupportedModelValue(term.render())),
        },
    }
}

/// Collects `name -> value` pairs from `define-fun` entries (get-model) and
/// bare `(name value)` pairs (get-value).
fn collect_assignments(
    sexp: &Sexp,
    wanted: &dyn Fn(&str) -> bool,
    out: &mut Vec<(String, Sexp)>,
) {
    if let Sexp::List(items) = sexp {
        match items.as_slice() {
            [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(args), _sort, value]
                if head == "define-fun" && args.is_empty() && wanted(name) =>
            {
                out.push((name.clone(), value.clone()));
            }
            [Sexp::Atom(name), value] if wanted(name) => {
                out.push((name.clone(), value.clone()));
            }
            _ => {
                for item in items {
                    collect_assignments(item, wanted, out);
                }
            }
        }
    }
}

/// Parses solver output (must start with `sat`), assembles the certificate,
/// and re-checks it exactly; a model that fails the check — for example one
/// that was decimal-approximated by the solver — is rejected.
pub fn import_model(text: &str, prog: &LassoProgram) -> Result<Gnta, SmtError> {
    let sexps = parse_sexps(text)?;
    match sexps.first() {
        Some(Sexp::Atom(a)) if a == "sat" => {}
        Some(Sexp::Atom(a)) => return Err(SmtError::NotSat(a.clone())),
        _ => return Err(SmtError::NotSat("<empty>".into())),
    }

    let names = sanitized_names(prog.var_names());
    let is_ours = |name: &str| {
        name == "lambda"
            || names.iter().any(|n| {
                name == format!("x0_{n}")
                    || name == format!("x1_{n}")
                    || name == format!("y_{n}")
            })
    };
    let mut assignments: Vec<(String, Sexp)> = Vec::new();
    for sexp in &sexps[1..] {
        collect_assignments(sexp, &is_ours, &mut assignments);
    }
    let lookup = |name: &str| -> Result<Option<Rational>, SmtError> {
        match assignments.iter().find(|(n, _)| n == name) {
            Some((_, term)) => Ok(Some(eval_value(term)?)),
            None => Ok(None),
        }
    };

    let mut x1 = Vec::with_capacity(names.len());
    let mut y = Vec::with_capacity(names.len());
    for n in &names {
        x1.push(
            lookup(&format!("x1_{n}"))?
                .ok_or_else(|| SmtError::MalformedModel(format!("no value for x1_{n}")))?,
        );
        y.push(
            lookup(&format!("y_{n}"))?
                .ok_or_else(|| SmtError::MalformedModel(format!("no value for y_{n}")))?,
        );
    }
    let lambda = lookup("lambda")?
        .ok_or_else(|| SmtError::MalformedModel("no value for lambda".into()))?;

    let x0 = if prog.stem().is_some() {
        let mut x0 = Vec::with_capacity(names.len());
        for n in &names {
            x0.push(
                lookup(&format!("x0_{n}"))?
                    .ok_or_else(|| SmtError::MalformedModel(format!("no value for x0_{n}")))?,
            );
        }
        RationalVector::new(x0)
    } else {
        // The init rows are vacuous for a true stem; pin x0 = x1.
        RationalVector::new(x1.clone())
    };

    let gnta = Gnta::new(x0, RationalVector::new(x1), RationalVector::new(y), lambda);
    let report = certs::check_gnta(prog, &gnta)
        .map_err(|e| SmtError::MalformedModel(e.to_string()))?;
    if !report.valid() {
        return Err(SmtError::InvalidModel(report));
    }
    Ok(gnta)
}
