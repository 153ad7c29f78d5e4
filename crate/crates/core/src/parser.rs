//! Parser and printer for the `.lasso` text format.
//!
//! ```text
//! # comment
//! vars: a b
//! stem:
//!   a >= 0
//! loop:
//!   a >= 7
//!   a' = b
//!   b' = b + 1
//! ```
//!
//! One constraint per line; `#` starts a comment. Constraints are affine
//! comparisons between linear expressions over the declared variables and
//! their primed next-state forms. Assignments are relational: `a' = b` is a
//! simultaneous constraint, not sequential sugar. Every constraint normalizes
//! to rows `a·(x,x')ᵀ ≤ b`; `e1 >= e2` flips sign, `e1 = e2` expands to the
//! `<=` row followed by the `>=` row, and `<`/`>` produce strict-flagged rows
//! plus a warning.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::linalg::{RationalMatrix, RationalVector};
use crate::program::{LassoProgram, LinearRelation};
use crate::rational::Rational;

/// Raw program text with a display name for diagnostics.
#[derive(Clone, Debug)]
pub struct SourceProgram {
    pub text: String,
    pub origin: String,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            origin: origin.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned message; `line` and `column` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, kind, self.message)
    }
}

/// A successfully parsed program together with any warnings.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub program: LassoProgram,
    pub warnings: Vec<ParseDiagnostic>,
}

pub fn parse(src: &SourceProgram) -> Result<Parsed, Vec<ParseDiagnostic>> {
    Parser::new(&src.text).run()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident { name: String, primed: bool },
    Plus,
    Minus,
    Star,
    Slash,
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
}

fn tokenize_line(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>, ParseDiagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(digits.parse().expect("digits")), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let primed = i < chars.len() && chars[i] == '\'';
                if primed {
                    i += 1;
                }
                toks.push((Tok::Ident { name, primed }, col));
            }
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '<' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    toks.push((Tok::Le, col));
                    i += 2;
                } else {
                    toks.push((Tok::Lt, col));
                    i += 1;
                }
            }
            '>' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    toks.push((Tok::Ge, col));
                    i += 2;
                } else {
                    toks.push((Tok::Gt, col));
                    i += 1;
                }
            }
            '=' => {
                toks.push((Tok::Eq, col));
                i += 1;
            }
            other => {
                return Err(ParseDiagnostic {
                    line: lineno,
                    column: col,
                    severity: Severity::Error,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

/// An affine combination over `(x, x')` plus a constant, during parsing.
struct LinComb {
    coeffs: Vec<Rational>, // length 2n: unprimed then primed
    konst: Rational,
}

/// One normalized row `coeffs·(x,x')ᵀ ≤ bound`.
struct Row {
    coeffs: Vec<Rational>,
    bound: Rational,
    strict: bool,
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Stem,
    Loop,
}

struct Parser<'a> {
    text: &'a str,
    vars: Vec<String>,
    diags: Vec<ParseDiagnostic>,
    warnings: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            vars: Vec::new(),
            diags: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn error(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            line,
            column,
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn run(mut self) -> Result<Parsed, Vec<ParseDiagnostic>> {
        let mut section = Section::Preamble;
        let mut seen_vars = false;
        let mut seen_stem = false;
        let mut seen_loop = false;
        let mut stem_rows: Vec<Row> = Vec::new();
        let mut loop_rows: Vec<Row> = Vec::new();
        let mut loop_header_line = 0;

        for (idx, raw_line) in self.text.lines().enumerate() {
            let lineno = idx + 1;
            let line = strip_comment(raw_line);
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("vars:") {
                if seen_vars {
                    self.error(lineno, 1, "duplicate `vars:` header");
                } else {
                    seen_vars = true;
                    self.parse_vars_header(rest, lineno, line);
                }
                continue;
            }
            if trimmed == "stem:" {
                if seen_stem || seen_loop {
                    self.error(lineno, 1, "`stem:` must appear once, before `loop:`");
                } else if !seen_vars {
                    self.error(lineno, 1, "`vars:` header must come first");
                }
                seen_stem = true;
                section = Section::Stem;
                continue;
            }
            if trimmed == "loop:" {
                if seen_loop {
                    self.error(lineno, 1, "duplicate `loop:` header");
                } else if !seen_vars {
                    self.error(lineno, 1, "`vars:` header must come first");
                }
                seen_loop = true;
                loop_header_line = lineno;
                section = Section::Loop;
                continue;
            }
            // A constraint line.
            if !seen_vars {
                self.error(lineno, 1, "expected `vars:` header before constraints");
                continue;
            }
            match section {
                Section::Preamble => {
                    self.error(lineno, 1, "constraint outside a section; expected `stem:` or `loop:`");
                }
                Section::Stem | Section::Loop => match self.parse_constraint(line, lineno) {
                    Ok(mut rows) => {
                        if section == Section::Stem {
                            stem_rows.append(&mut rows);
                        } else {
                            loop_rows.append(&mut rows);
                        }
                    }
                    Err(diag) => self.diags.push(diag),
                },
            }
        }

        if !seen_vars {
            self.error(1, 1, "missing `vars:` header");
        }
        if !seen_loop {
            self.error(1, 1, "missing `loop:` section");
        } else if loop_rows.is_empty() && self.diags.is_empty() {
            self.error(loop_header_line, 1, "empty loop section");
        }

        if !self.diags.is_empty() {
            let mut all = self.diags;
            all.extend(self.warnings);
            return Err(all);
        }

        let n = self.vars.len();
        let stem = if stem_rows.is_empty() {
            None
        } else {
            Some(rows_to_relation(n, stem_rows))
        };
        let loop_rel = rows_to_relation(n, loop_rows);
        let program =
            LassoProgram::new(self.vars, stem, loop_rel).expect("parser enforces program shape");
        Ok(Parsed {
            program,
            warnings: self.warnings,
        })
    }

    fn parse_vars_header(&mut self, rest: &str, lineno: usize, full_line: &str) {
        let offset = full_line.find("vars:").unwrap_or(0) + "vars:".len();
        let mut col = offset;
        for word in rest.split_whitespace() {
            col = full_line[col..]
                .find(word)
                .map(|p| col + p)
                .unwrap_or(col)
                + 1;
            let word_col = col;
            col += word.len() - 1;
            if word.contains('\'') {
                self.error(lineno, word_col, format!("primed variable `{word}` not allowed in `vars:`"));
                continue;
            }
            if !is_ident(word) {
                self.error(lineno, word_col, format!("invalid variable name `{word}`"));
                continue;
            }
            if self.vars.iter().any(|v| v == word) {
                self.error(lineno, word_col, format!("duplicate variable `{word}`"));
                continue;
            }
            self.vars.push(word.to_string());
        }
        if self.vars.is_empty() {
            self.error(lineno, 1, "`vars:` header declares no variables");
        }
    }

    fn parse_constraint(&mut self, line: &str, lineno: usize) -> Result<Vec<Row>, ParseDiagnostic> {
        let toks = tokenize_line(line, lineno)?;
        let mut pos = 0;
        let lhs = self.parse_linexpr(&toks, &mut pos, lineno)?;
        let (op, op_col) = match toks.get(pos) {
            Some((t @ (Tok::Le | Tok::Ge | Tok::Lt | Tok::Gt | Tok::Eq), col)) => {
                pos += 1;
                (t.clone(), *col)
            }
            Some((_, col)) => {
                return Err(self.diag_err(lineno, *col, "expected comparison operator"));
            }
            None => {
                return Err(self.diag_err(lineno, line.len().max(1), "expected comparison operator"));
            }
        };
        let rhs = self.parse_linexpr(&toks, &mut pos, lineno)?;
        if let Some((_, col)) = toks.get(pos) {
            return Err(self.diag_err(lineno, *col, "unexpected trailing tokens"));
        }

        // diff = lhs - rhs, so the constraint reads diff.coeffs·v + diff.konst REL 0.
        let n2 = 2 * self.vars.len();
        let mut diff = Vec::with_capacity(n2);
        for j in 0..n2 {
            diff.push(&lhs.coeffs[j] - &rhs.coeffs[j]);
        }
        let konst = &lhs.konst - &rhs.konst;

        let le_row = |strict: bool| Row {
            coeffs: diff.clone(),
            bound: -&konst,
            strict,
        };
        let ge_row = |strict: bool| Row {
            coeffs: diff.iter().map(|c| -c).collect(),
            bound: konst.clone(),
            strict,
        };

        let rows = match op {
            Tok::Le => vec![le_row(false)],
            Tok::Ge => vec![ge_row(false)],
            Tok::Eq => vec![le_row(false), ge_row(false)],
            Tok::Lt => {
                self.warn_strict(lineno, op_col);
                vec![le_row(true)]
            }
            Tok::Gt => {
                self.warn_strict(lineno, op_col);
                vec![ge_row(true)]
            }
            _ => unreachable!(),
        };
        Ok(rows)
    }

    fn warn_strict(&mut self, line: usize, column: usize) {
        self.warnings.push(ParseDiagnostic {
            line,
            column,
            severity: Severity::Warning,
            message: "strict inequality: the relation is not topologically closed".into(),
        });
    }

    fn diag_err(&self, line: usize, column: usize, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line,
            column,
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn parse_linexpr(
        &self,
        toks: &[(Tok, usize)],
        pos: &mut usize,
        lineno: usize,
    ) -> Result<LinComb, ParseDiagnostic> {
        let n = self.vars.len();
        let mut comb = LinComb {
            coeffs: vec![Rational::zero(); 2 * n],
            konst: Rational::zero(),
        };
        let mut sign = Rational::one();
        // optional leading minus
        if let Some((Tok::Minus, _)) = toks.get(*pos) {
            sign = -Rational::one();
            *pos += 1;
        }
        loop {
            self.parse_term(toks, pos, lineno, &sign, &mut comb)?;
            match toks.get(*pos) {
                Some((Tok::Plus, _)) => {
                    sign = Rational::one();
                    *pos += 1;
                }
                Some((Tok::Minus, _)) => {
                    sign = -Rational::one();
                    *pos += 1;
                }
                _ => break,
            }
        }
        Ok(comb)
    }

    fn parse_term(
        &self,
        toks: &[(Tok, usize)],
        pos: &mut usize,
        lineno: usize,
        sign: &Rational,
        comb: &mut LinComb,
    ) -> Result<(), ParseDiagnostic> {
        match toks.get(*pos) {
            Some((Tok::Int(p), col)) => {
                let col = *col;
                let mut value = Rational::from_bigint(p.clone());
                *pos += 1;
                if let Some((Tok::Slash, _)) = toks.get(*pos) {
                    *pos += 1;
                    match toks.get(*pos) {
                        Some((Tok::Int(q), qcol)) => {
                            if q.is_zero() {
                                return Err(self.diag_err(lineno, *qcol, "zero denominator"));
                            }
                            value = value / Rational::from_bigint(q.clone());
                            *pos += 1;
                        }
                        other => {
                            let c = other.map(|(_, c)| *c).unwrap_or(col);
                            return Err(self.diag_err(lineno, c, "expected denominator after `/`"));
                        }
                    }
                }
                let explicit_star = matches!(toks.get(*pos), Some((Tok::Star, _)));
                if explicit_star {
                    *pos += 1;
                }
                match toks.get(*pos) {
                    Some((Tok::Ident { name, primed }, icol)) => {
                        let idx = self.resolve(name, *primed, lineno, *icol)?;
                        self.reject_nonlinear_tail(toks, *pos + 1, lineno)?;
                        comb.coeffs[idx] = &comb.coeffs[idx] + &(sign * &value);
                        *pos += 1;
                    }
                    _ if explicit_star => {
                        return Err(self.diag_err(lineno, col, "expected variable after `*`"));
                    }
                    _ => {
                        comb.konst = &comb.konst + &(sign * &value);
                    }
                }
                Ok(())
            }
            Some((Tok::Ident { name, primed }, col)) => {
                let idx = self.resolve(name, *primed, lineno, *col)?;
                self.reject_nonlinear_tail(toks, *pos + 1, lineno)?;
                comb.coeffs[idx] = &comb.coeffs[idx] + sign;
                *pos += 1;
                Ok(())
            }
            Some((_, col)) => Err(self.diag_err(lineno, *col, "expected term")),
            None => Err(self.diag_err(lineno, 1, "expected term")),
        }
    }

    /// A variable followed by `*` is a product of variables (or a misplaced
    /// coefficient); both are rejected as non-linear.
    fn reject_nonlinear_tail(
        &self,
        toks: &[(Tok, usize)],
        next: usize,
        lineno: usize,
    ) -> Result<(), ParseDiagnostic> {
        if let Some((Tok::Star, col)) = toks.get(next) {
            return Err(self.diag_err(
                lineno,
                *col,
                "non-linear term: products of variables are not supported",
            ));
        }
        Ok(())
    }

    fn resolve(
        &self,
        name: &str,
        primed: bool,
        lineno: usize,
        col: usize,
    ) -> Result<usize, ParseDiagnostic> {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => Ok(if primed { self.vars.len() + i } else { i }),
            None => Err(self.diag_err(lineno, col, format!("unknown identifier `{name}`"))),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn rows_to_relation(n: usize, rows: Vec<Row>) -> LinearRelation {
    let m = rows.len();
    let mut data = Vec::with_capacity(m * 2 * n);
    let mut bounds = Vec::with_capacity(m);
    let mut strict = Vec::with_capacity(m);
    for row in rows {
        data.extend(row.coeffs);
        bounds.push(row.bound);
        strict.push(row.strict);
    }
    LinearRelation::new(n, RationalMatrix::new(m, 2 * n, data), RationalVector::new(bounds), strict)
        .expect("rows are built at the right width")
}

/// Prints a program in the `.lasso` format such that re-parsing yields the
/// same normalized rows in the same order.
pub fn render(prog: &LassoProgram) -> String {
    let mut out = String::new();
    out.push_str("vars:");
    for v in prog.var_names() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    if let Some(stem) = prog.stem() {
        out.push_str("stem:\n");
        render_relation(&mut out, stem, prog.var_names());
    }
    out.push_str("loop:\n");
    render_relation(&mut out, prog.loop_rel(), prog.var_names());
    out
}

fn render_relation(out: &mut String, rel: &LinearRelation, vars: &[String]) {
    let n = vars.len();
    for i in 0..rel.num_rows() {
        out.push_str("  ");
        let mut wrote_term = false;
        for j in 0..2 * n {
            let c = if j < n {
                &rel.row_x(i)[j]
            } else {
                &rel.row_xp(i)[j - n]
            };
            if c.is_zero() {
                continue;
            }
            if wrote_term {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                out.push('-');
            }
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push(' ');
            }
            out.push_str(&vars[j % n]);
            if j >= n {
                out.push('\'');
            }
            wrote_term = true;
        }
        if !wrote_term {
            out.push('0');
        }
        if rel.is_strict_row(i) {
            out.push_str(" < ");
            out.push_str(&rel.bound(i).to_string());
            out.push_str(" # strict");
        } else {
            out.push_str(" <= ");
            out.push_str(&rel.bound(i).to_string());
        }
        out.push('\n');
    }
}
