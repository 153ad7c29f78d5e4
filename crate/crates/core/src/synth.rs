//! GNTA synthesis.
//!
//! The certificate conditions become linear once the contraction factor λ is
//! fixed, so the search space is a candidate list of positive rationals:
//! eigenvalue-derived candidates first (when the loop has a deterministic
//! affine update), then a fixed grid. A fixed-point shortcut runs before the
//! candidate loop: a state with `(x*, x*)` in the loop yields the trivial
//! argument `(x0, x*, y = 0, λ = 1)` immediately. Every found certificate is
//! re-checked exactly before being reported, and every missed candidate
//! carries its verified infeasibility certificate.

use std::borrow::Cow;

use crate::certs;
use crate::eigen;
use crate::linalg::RationalVector;
use crate::lp::{self, FarkasCertificate, FeasOutcome, IntOutcome, LpProblem};
use crate::program::{LassoProgram, LinearRelation};
use crate::rational::Rational;
use crate::witness::Gnta;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("relation contains strict rows; enable closure mode or close it first")]
    StrictRows,
}

/// Search configuration. The grid is tried in order after the eigenvalue
/// candidates; all entries must be positive.
#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub lambda_grid: Vec<Rational>,
    pub use_eigen_candidates: bool,
    pub use_fixed_point_shortcut: bool,
    pub integer_mode: bool,
    pub closure_mode: bool,
    pub bnb_depth_limit: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            lambda_grid: default_lambda_grid(),
            use_eigen_candidates: true,
            use_fixed_point_shortcut: true,
            integer_mode: false,
            closure_mode: false,
            bnb_depth_limit: 64,
        }
    }
}

/// The default λ grid, ordered: 1 first (fixed points and linear drift are
/// the common case), then small contractions and expansions.
pub fn default_lambda_grid() -> Vec<Rational> {
    [
        (1, 1),
        (1, 2),
        (2, 1),
        (1, 3),
        (3, 1),
        (2, 3),
        (3, 2),
        (1, 4),
        (4, 1),
        (5, 1),
    ]
    .iter()
    .map(|&(p, q)| Rational::new(p, q))
    .collect()
}

/// Why a λ candidate yielded no certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttemptReason {
    /// The linear system is infeasible, with a verified Farkas certificate.
    LpInfeasible(FarkasCertificate),
    /// The branch-and-bound tree closed without an integral point.
    IntegerInfeasible,
    /// The branch-and-bound depth limit was hit; inconclusive.
    DepthLimit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaAttempt {
    pub lambda: Rational,
    pub reason: AttemptReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthOutcome {
    Found { gnta: Gnta, lambda: Rational },
    NotFound { attempts: Vec<LambdaAttempt> },
    StrictRejected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthReport {
    pub outcome: SynthOutcome,
    pub closure_applied: bool,
    pub fixed_point_used: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointOutcome {
    Found(RationalVector),
    Absent(FarkasCertificate),
}

/// Encodes the fixed-λ certificate conditions as one LP over `(x0, x1, y)`:
/// stem rows on `(x0, x1)` (or `x0 = x1` when the stem is true), loop rows on
/// `(x1, x1 + y)`, and homogeneous loop rows on `(y, λy)`.
pub fn encode_fixed_lambda(prog: &LassoProgram, lambda: &Rational) -> Result<LpProblem, SynthError> {
    assert!(lambda.is_positive(), "lambda must be positive");
    if prog.has_strict_rows() {
        return Err(SynthError::StrictRows);
    }
    let n = prog.n();
    let width = 3 * n;
    let mut problem = LpProblem::new(width);

    match prog.stem() {
        Some(stem) => {
            for i in 0..stem.num_rows() {
                let mut coeffs = Vec::with_capacity(width);
                coeffs.extend_from_slice(stem.row_x(i));
                coeffs.extend_from_slice(stem.row_xp(i));
                coeffs.resize(width, Rational::zero());
                problem.push_row(RationalVector::new(coeffs), stem.bound(i).clone());
            }
        }
        None => {
            // Pin x0 = x1 so reports carry a concrete initial state.
            for j in 0..n {
                let mut le = vec![Rational::zero(); width];
                le[j] = Rational::one();
                le[n + j] = -Rational::one();
                let ge: Vec<Rational> = le.iter().map(|c| -c).collect();
                problem.push_row(RationalVector::new(le), Rational::zero());
                problem.push_row(RationalVector::new(ge), Rational::zero());
            }
        }
    }

    let loop_rel = prog.loop_rel();
    for i in 0..loop_rel.num_rows() {
        // point: u·x1 + v·(x1 + y) ≤ b  ⇔  (u+v)·x1 + v·y ≤ b
        let mut coeffs = vec![Rational::zero(); width];
        for j in 0..n {
            coeffs[n + j] = &loop_rel.row_x(i)[j] + &loop_rel.row_xp(i)[j];
            coeffs[2 * n + j] = loop_rel.row_xp(i)[j].clone();
        }
        problem.push_row(RationalVector::new(coeffs), loop_rel.bound(i).clone());
    }
    for i in 0..loop_rel.num_rows() {
        // ray: u·y + v·(λy) ≤ 0  ⇔  (u + λv)·y ≤ 0
        let mut coeffs = vec![Rational::zero(); width];
        for j in 0..n {
            coeffs[2 * n + j] = &loop_rel.row_x(i)[j] + &(lambda * &loop_rel.row_xp(i)[j]);
        }
        problem.push_row(RationalVector::new(coeffs), Rational::zero());
    }
    Ok(problem)
}

/// The system `A(x, x)ᵀ ≤ b` over the loop relation, as an LP over `x`.
fn fixed_point_problem(loop_rel: &LinearRelation) -> LpProblem {
    let n = loop_rel.num_vars();
    let mut problem = LpProblem::new(n);
    for i in 0..loop_rel.num_rows() {
        let coeffs: Vec<Rational> = (0..n)
            .map(|j| &loop_rel.row_x(i)[j] + &loop_rel.row_xp(i)[j])
            .collect();
        problem.push_row(RationalVector::new(coeffs), loop_rel.bound(i).clone());
    }
    problem
}

/// Searches for a state `x*` with `(x*, x*)` in the loop relation.
pub fn find_fixed_point(loop_rel: &LinearRelation) -> Result<FixedPointOutcome, SynthError> {
    if loop_rel.has_strict_rows() {
        return Err(SynthError::StrictRows);
    }
    let problem = fixed_point_problem(loop_rel);
    match lp::solve_feasibility(&problem) {
        FeasOutcome::Feasible(point) => {
            assert!(
                loop_rel.contains(&point, &point).expect("dims agree"),
                "fixed-point solution is not a loop member"
            );
            Ok(FixedPointOutcome::Found(point))
        }
        FeasOutcome::Infeasible(cert) => Ok(FixedPointOutcome::Absent(cert)),
    }
}

/// Positive rational eigenvalues of the loop's deterministic update matrix,
/// ascending; empty when the loop has no deterministic affine update.
pub fn eigen_lambda_candidates(loop_rel: &LinearRelation) -> Vec<Rational> {
    match eigen::deterministic_update(loop_rel) {
        Some((matrix, _)) => eigen::positive_rational_roots(&eigen::char_poly(&matrix)),
        None => Vec::new(),
    }
}

/// Runs the full synthesis pipeline and reports the outcome.
///
/// Strict rows are rejected unless closure mode is set, in which case the
/// search runs on the topological closure and the report is marked; the
/// caller must re-verify any witness against the strict original.
pub fn synthesize(prog: &LassoProgram, cfg: &SynthConfig) -> SynthReport {
    let mut closure_applied = false;
    let solving: Cow<'_, LassoProgram> = if prog.has_strict_rows() {
        if !cfg.closure_mode {
            return SynthReport {
                outcome: SynthOutcome::StrictRejected,
                closure_applied: false,
                fixed_point_used: false,
            };
        }
        closure_applied = true;
        Cow::Owned(prog.closure().0)
    } else {
        Cow::Borrowed(prog)
    };
    let solving: &LassoProgram = &solving;

    if cfg.use_fixed_point_shortcut {
        if let Some(gnta) = fixed_point_shortcut(solving, cfg) {
            soundness_gate(solving, &gnta);
            return SynthReport {
                outcome: SynthOutcome::Found {
                    lambda: gnta.lambda.clone(),
                    gnta,
                },
                closure_applied,
                fixed_point_used: true,
            };
        }
    }

    let mut candidates: Vec<Rational> = Vec::new();
    if cfg.use_eigen_candidates {
        for c in eigen_lambda_candidates(solving.loop_rel()) {
            if c.is_positive() && !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }
    for c in &cfg.lambda_grid {
        assert!(c.is_positive(), "lambda grid entries must be positive");
        if !candidates.contains(c) {
            candidates.push(c.clone());
        }
    }

    let mut attempts = Vec::with_capacity(candidates.len());
    for lambda in candidates {
        let problem = encode_fixed_lambda(solving, &lambda).expect("strict rows handled above");
        let reason = if cfg.integer_mode {
            match lp::solve_integer_feasibility(&problem, cfg.bnb_depth_limit) {
                IntOutcome::Feasible(point) => {
                    let gnta = split_point(solving.n(), point, lambda.clone());
                    soundness_gate(solving, &gnta);
                    return SynthReport {
                        outcome: SynthOutcome::Found { gnta, lambda },
                        closure_applied,
                        fixed_point_used: false,
                    };
                }
                IntOutcome::Infeasible => AttemptReason::IntegerInfeasible,
                IntOutcome::DepthExceeded => AttemptReason::DepthLimit,
            }
        } else {
            match lp::solve_feasibility(&problem) {
                FeasOutcome::Feasible(point) => {
                    let gnta = split_point(solving.n(), point, lambda.clone());
                    soundness_gate(solving, &gnta);
                    return SynthReport {
                        outcome: SynthOutcome::Found { gnta, lambda },
                        closure_applied,
                        fixed_point_used: false,
                    };
                }
                FeasOutcome::Infeasible(cert) => AttemptReason::LpInfeasible(cert),
            }
        };
        attempts.push(LambdaAttempt { lambda, reason });
    }

    SynthReport {
        outcome: SynthOutcome::NotFound { attempts },
        closure_applied,
        fixed_point_used: false,
    }
}

/// Trivial-argument path: a loop fixed point plus a stem-admissible initial
/// state give `(x0, x*, 0, 1)`. In integer mode both solves run through
/// branch-and-bound so the shortcut never yields a fractional witness.
fn fixed_point_shortcut(prog: &LassoProgram, cfg: &SynthConfig) -> Option<Gnta> {
    let loop_rel = prog.loop_rel();
    let fp_problem = fixed_point_problem(loop_rel);
    let xstar = if cfg.integer_mode {
        match lp::solve_integer_feasibility(&fp_problem, cfg.bnb_depth_limit) {
            IntOutcome::Feasible(point) => point,
            _ => return None,
        }
    } else {
        match lp::solve_feasibility(&fp_problem) {
            FeasOutcome::Feasible(point) => point,
            FeasOutcome::Infeasible(_) => return None,
        }
    };

    let n = prog.n();
    let x0 = match prog.stem() {
        None => xstar.clone(),
        Some(stem) => {
            // Admission: some x0 with (x0, x*) in the stem.
            let mut admission = LpProblem::new(n);
            for i in 0..stem.num_rows() {
                let shifted =
                    stem.bound(i) - &crate::linalg::dot_slices(stem.row_xp(i), xstar.entries());
                admission.push_row(RationalVector::new(stem.row_x(i).to_vec()), shifted);
            }
            if cfg.integer_mode {
                match lp::solve_integer_feasibility(&admission, cfg.bnb_depth_limit) {
                    IntOutcome::Feasible(point) => point,
                    _ => return None,
                }
            } else {
                match lp::solve_feasibility(&admission) {
                    FeasOutcome::Feasible(point) => point,
                    FeasOutcome::Infeasible(_) => return None,
                }
            }
        }
    };
    Some(Gnta::new(
        x0,
        xstar,
        RationalVector::zeros(n),
        Rational::one(),
    ))
}

fn split_point(n: usize, point: RationalVector, lambda: Rational) -> Gnta {
    debug_assert_eq!(point.dim(), 3 * n);
    let entries = point.entries();
    Gnta::new(
        RationalVector::new(entries[..n].to_vec()),
        RationalVector::new(entries[n..2 * n].to_vec()),
        RationalVector::new(entries[2 * n..].to_vec()),
        lambda,
    )
}

/// Every reported certificate must survive the exact re-check; a failure here
/// is an internal soundness bug, never a property of the input.
fn soundness_gate(prog: &LassoProgram, gnta: &Gnta) {
    let report = certs::check_gnta(prog, gnta).expect("dimensions agree by construction");
    assert!(
        report.valid(),
        "synthesized certificate failed the exact re-check: {:?}",
        report.failures()
    );
}
