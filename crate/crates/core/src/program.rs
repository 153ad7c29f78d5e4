//! Polyhedral relations and lasso programs.
//!
//! A relation is a conjunction of rows `a·(x,x')ᵀ ≤ b` over current state `x`
//! and next state `x'`. Rows may carry a strict flag (`<` instead of `≤`);
//! closed relations have all flags false. A lasso program is an optional stem
//! relation followed by a loop relation over the same variables.

use crate::linalg::{dot_slices, RationalMatrix, RationalVector};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("variable names must be unique: `{0}` repeats")]
    DuplicateVariable(String),
}

/// A binary relation `{(x, x') | A·(x,x')ᵀ ≤ b}` with per-row strictness.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearRelation {
    n: usize,
    a: RationalMatrix,
    b: RationalVector,
    strict: Vec<bool>,
}

impl LinearRelation {
    /// `a` must be `m × 2n`; `b` and `strict` must have length `m`.
    pub fn new(
        n: usize,
        a: RationalMatrix,
        b: RationalVector,
        strict: Vec<bool>,
    ) -> Result<Self, ModelError> {
        if a.cols() != 2 * n {
            return Err(ModelError::DimensionMismatch {
                context: "relation matrix columns",
                expected: 2 * n,
                got: a.cols(),
            });
        }
        if b.dim() != a.rows() {
            return Err(ModelError::DimensionMismatch {
                context: "relation bounds",
                expected: a.rows(),
                got: b.dim(),
            });
        }
        if strict.len() != a.rows() {
            return Err(ModelError::DimensionMismatch {
                context: "relation strict flags",
                expected: a.rows(),
                got: strict.len(),
            });
        }
        Ok(LinearRelation { n, a, b, strict })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn bounds(&self) -> &RationalVector {
        &self.b
    }

    pub fn strict_flags(&self) -> &[bool] {
        &self.strict
    }

    pub fn is_strict_row(&self, i: usize) -> bool {
        self.strict[i]
    }

    pub fn has_strict_rows(&self) -> bool {
        self.strict.iter().any(|&s| s)
    }

    /// Coefficients of row `i` on the unprimed variables.
    pub fn row_x(&self, i: usize) -> &[Rational] {
        &self.a.row(i)[..self.n]
    }

    /// Coefficients of row `i` on the primed variables.
    pub fn row_xp(&self, i: usize) -> &[Rational] {
        &self.a.row(i)[self.n..]
    }

    pub fn bound(&self, i: usize) -> &Rational {
        self.b.get(i)
    }

    /// Exact left-hand-side value of row `i` at `(x, x')`.
    pub fn row_lhs(&self, i: usize, x: &RationalVector, xp: &RationalVector) -> Rational {
        dot_slices(self.row_x(i), x.entries()) + dot_slices(self.row_xp(i), xp.entries())
    }

    /// Membership test: every row satisfied, strict rows strictly.
    pub fn contains(&self, x: &RationalVector, xp: &RationalVector) -> Result<bool, ModelError> {
        if x.dim() != self.n {
            return Err(ModelError::DimensionMismatch {
                context: "relation membership (x)",
                expected: self.n,
                got: x.dim(),
            });
        }
        if xp.dim() != self.n {
            return Err(ModelError::DimensionMismatch {
                context: "relation membership (x')",
                expected: self.n,
                got: xp.dim(),
            });
        }
        for i in 0..self.num_rows() {
            let lhs = self.row_lhs(i, x, xp);
            let ok = if self.strict[i] {
                lhs < *self.bound(i)
            } else {
                lhs <= *self.bound(i)
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Topological closure: same rows with every strict flag cleared.
    /// The boolean reports whether any flag changed.
    pub fn closure(&self) -> (LinearRelation, bool) {
        let changed = self.has_strict_rows();
        let closed = LinearRelation {
            n: self.n,
            a: self.a.clone(),
            b: self.b.clone(),
            strict: vec![false; self.strict.len()],
        };
        (closed, changed)
    }
}

impl std::fmt::Debug for LinearRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "LinearRelation(n={}, rows={})", self.n, self.num_rows())?;
        for i in 0..self.num_rows() {
            let op = if self.strict[i] { "<" } else { "<=" };
            writeln!(
                f,
                "  {:?} | {:?} {} {}",
                self.row_x(i),
                self.row_xp(i),
                op,
                self.bound(i)
            )?;
        }
        Ok(())
    }
}

/// A lasso program: variable names, an optional stem relation (absent means
/// the stem is trivially true), and a loop relation.
#[derive(Clone, Debug)]
pub struct LassoProgram {
    var_names: Vec<String>,
    stem: Option<LinearRelation>,
    loop_rel: LinearRelation,
}

impl LassoProgram {
    pub fn new(
        var_names: Vec<String>,
        stem: Option<LinearRelation>,
        loop_rel: LinearRelation,
    ) -> Result<Self, ModelError> {
        let n = var_names.len();
        for (i, name) in var_names.iter().enumerate() {
            if var_names[..i].contains(name) {
                return Err(ModelError::DuplicateVariable(name.clone()));
            }
        }
        if loop_rel.num_vars() != n {
            return Err(ModelError::DimensionMismatch {
                context: "loop relation variables",
                expected: n,
                got: loop_rel.num_vars(),
            });
        }
        if let Some(stem) = &stem {
            if stem.num_vars() != n {
                return Err(ModelError::DimensionMismatch {
                    context: "stem relation variables",
                    expected: n,
                    got: stem.num_vars(),
                });
            }
        }
        Ok(LassoProgram {
            var_names,
            stem,
            loop_rel,
        })
    }

    pub fn n(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// `None` means the stem is trivially true (a linear loop program).
    pub fn stem(&self) -> Option<&LinearRelation> {
        self.stem.as_ref()
    }

    pub fn loop_rel(&self) -> &LinearRelation {
        &self.loop_rel
    }

    pub fn has_strict_rows(&self) -> bool {
        self.loop_rel.has_strict_rows()
            || self.stem.as_ref().is_some_and(LinearRelation::has_strict_rows)
    }

    /// Program with both relations topologically closed; the flag reports
    /// whether anything changed.
    pub fn closure(&self) -> (LassoProgram, bool) {
        let (loop_rel, loop_changed) = self.loop_rel.closure();
        let (stem, stem_changed) = match &self.stem {
            Some(s) => {
                let (c, ch) = s.closure();
                (Some(c), ch)
            }
            None => (None, false),
        };
        (
            LassoProgram {
                var_names: self.var_names.clone(),
                stem,
                loop_rel,
            },
            loop_changed || stem_changed,
        )
    }
}
