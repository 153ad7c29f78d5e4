//! Exact certificate checking.
//!
//! Everything here re-derives validity from first principles with exact
//! arithmetic: GNTA condition checks, witness unrolling and step-by-step
//! execution verification, and construction plus sampling-based verification
//! of polyhedral recurrence sets. Solver output is never trusted without
//! passing through these checks.

use crate::linalg::RationalVector;
use crate::lp::{self, LpProblem, OptOutcome};
use crate::program::{LassoProgram, LinearRelation, ModelError};
use crate::rational::Rational;
use crate::witness::{
    CheckFailure, CheckReport, ConstraintKind, Gnta, RecurrenceCheckReport, RecurrenceSet,
    SampleFailure, SampleFailureReason, SetEquality, SetInequality, WitnessPrefix,
};

/// Checks the four GNTA conditions against the program, exactly:
/// λ > 0 (domain), stem membership of `(x0, x1)` (init), loop membership of
/// `(x1, x1+y)` (point), and homogeneous loop membership of `(y, λy)` (ray).
/// Strict rows are compared strictly.
pub fn check_gnta(prog: &LassoProgram, g: &Gnta) -> Result<CheckReport, ModelError> {
    let n = prog.n();
    for (context, dim) in [
        ("gnta x0", g.x0.dim()),
        ("gnta x1", g.x1.dim()),
        ("gnta y", g.y.dim()),
    ] {
        if dim != n {
            return Err(ModelError::DimensionMismatch {
                context,
                expected: n,
                got: dim,
            });
        }
    }

    let mut report = CheckReport::default();
    if !g.lambda.is_positive() {
        report.push(CheckFailure {
            kind: ConstraintKind::Domain,
            row: 0,
            step: None,
            lhs: Rational::zero(),
            rhs: g.lambda.clone(),
            strict: true,
        });
    }

    if let Some(stem) = prog.stem() {
        check_pair(stem, &g.x0, &g.x1, ConstraintKind::Init, None, &mut report);
    }

    let x1_plus_y = g.x1.add(&g.y);
    check_pair(
        prog.loop_rel(),
        &g.x1,
        &x1_plus_y,
        ConstraintKind::Point,
        None,
        &mut report,
    );

    let lambda_y = g.y.scale(&g.lambda);
    let loop_rel = prog.loop_rel();
    for i in 0..loop_rel.num_rows() {
        let lhs = loop_rel.row_lhs(i, &g.y, &lambda_y);
        let ok = if loop_rel.is_strict_row(i) {
            lhs.is_negative()
        } else {
            !lhs.is_positive()
        };
        if !ok {
            report.push(CheckFailure {
                kind: ConstraintKind::Ray,
                row: i,
                step: None,
                lhs,
                rhs: Rational::zero(),
                strict: loop_rel.is_strict_row(i),
            });
        }
    }

    Ok(report)
}

fn check_pair(
    rel: &LinearRelation,
    x: &RationalVector,
    xp: &RationalVector,
    kind: ConstraintKind,
    step: Option<usize>,
    report: &mut CheckReport,
) {
    for i in 0..rel.num_rows() {
        let lhs = rel.row_lhs(i, x, xp);
        let bound = rel.bound(i);
        let ok = if rel.is_strict_row(i) {
            lhs < *bound
        } else {
            lhs <= *bound
        };
        if !ok {
            report.push(CheckFailure {
                kind,
                row: i,
                step,
                lhs,
                rhs: bound.clone(),
                strict: rel.is_strict_row(i),
            });
        }
    }
}

/// Unrolls the execution generated by a GNTA:
/// `states[0] = x0`, `states[t] = x1 + Σ_{i=0}^{t-2} λ^i · y` for `t ≥ 1`.
/// Computed incrementally so rational sizes grow linearly in `steps`.
pub fn unroll_witness(g: &Gnta, steps: usize) -> WitnessPrefix {
    assert!(steps >= 1, "unroll_witness needs steps >= 1");
    let mut states = Vec::with_capacity(steps + 1);
    states.push(g.x0.clone());
    states.push(g.x1.clone());
    let mut current = g.x1.clone();
    let mut power = Rational::one();
    for _ in 2..=steps {
        current = current.add(&g.y.scale(&power));
        power = power * &g.lambda;
        states.push(current.clone());
    }
    WitnessPrefix::from_states(states)
}

/// Verifies that a witness prefix really is an execution of the program:
/// `(states[0], states[1])` in the stem (vacuous when the stem is true) and
/// every consecutive pair in the loop. When `strict_original` is supplied
/// (closure mode), loop pairs are checked against it with strict rows
/// enforced strictly, which is exactly the detector for closures that
/// manufacture unreachable fixed points.
pub fn verify_execution(
    prog: &LassoProgram,
    witness: &WitnessPrefix,
    strict_original: Option<&LinearRelation>,
) -> Result<CheckReport, ModelError> {
    let states = witness.states();
    let n = prog.n();
    for s in states {
        if s.dim() != n {
            return Err(ModelError::DimensionMismatch {
                context: "witness state",
                expected: n,
                got: s.dim(),
            });
        }
    }

    let mut report = CheckReport::default();
    if let Some(stem) = prog.stem() {
        check_pair(
            stem,
            &states[0],
            &states[1],
            ConstraintKind::StemStep,
            Some(0),
            &mut report,
        );
    }
    let loop_rel = strict_original.unwrap_or_else(|| prog.loop_rel());
    for t in 1..states.len() - 1 {
        check_pair(
            loop_rel,
            &states[t],
            &states[t + 1],
            ConstraintKind::LoopStep,
            Some(t),
            &mut report,
        );
    }
    Ok(report)
}

/// A spanning set of the vector space orthogonal to `y`: `n - 1` linearly
/// independent vectors when `y ≠ 0` (from the exact nullspace of the row
/// `yᵀ`), or the `n` standard basis vectors when `y = 0`.
pub fn orthogonal_span(y: &RationalVector) -> Vec<RationalVector> {
    let n = y.dim();
    let unit = |j: usize| {
        let mut entries = vec![Rational::zero(); n];
        entries[j] = Rational::one();
        RationalVector::new(entries)
    };
    if y.is_zero() {
        return (0..n).map(unit).collect();
    }
    let p = y
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero vector has a pivot");
    let yp = y.get(p);
    (0..n)
        .filter(|&j| j != p)
        .map(|j| {
            // v_j = y_p·e_j − y_j·e_p, orthogonal to y by construction
            let mut entries = vec![Rational::zero(); n];
            entries[j] = yp.clone();
            entries[p] = -y.get(j);
            RationalVector::new(entries)
        })
        .collect()
}

/// Builds the polyhedral recurrence set induced by a GNTA:
/// `yᵀ(x − x1) ≥ 0` intersected with `zᵀ(x − x1) = 0` for each spanning
/// vector `z` orthogonal to `y`. For `λ < 1` the set is additionally capped
/// at the geometric limit: `yᵀ(x − x1) ≤ yᵀy / (1 − λ)`. A zero `y`
/// degenerates to the single point `x1`.
pub fn build_recurrence_set(g: &Gnta) -> RecurrenceSet {
    let n = g.x1.dim();
    if g.y.is_zero() {
        let equalities = (0..n)
            .map(|j| {
                let mut entries = vec![Rational::zero(); n];
                entries[j] = Rational::one();
                SetEquality {
                    normal: RationalVector::new(entries),
                    value: g.x1.get(j).clone(),
                }
            })
            .collect();
        return RecurrenceSet {
            inequalities: Vec::new(),
            equalities,
        };
    }

    let mut inequalities = vec![SetInequality {
        normal: g.y.clone(),
        bound: g.y.dot(&g.x1),
    }];
    if g.lambda < Rational::one() {
        // yᵀ(x − x1) ≤ yᵀy/(1−λ)  ⇔  −yᵀx ≥ −yᵀx1 − yᵀy/(1−λ)
        let reach = g.y.dot(&g.y) * (Rational::one() - &g.lambda).recip();
        inequalities.push(SetInequality {
            normal: g.y.scale(&-Rational::one()),
            bound: -(g.y.dot(&g.x1) + reach),
        });
    }
    let equalities = orthogonal_span(&g.y)
        .into_iter()
        .map(|z| {
            let value = z.dot(&g.x1);
            SetEquality { normal: z, value }
        })
        .collect();
    RecurrenceSet {
        inequalities,
        equalities,
    }
}

/// Adds the set's constraints as `≤` rows over the block of `n` variables
/// starting at `offset` in a `width`-variable problem.
fn push_set_rows(problem: &mut LpProblem, set: &RecurrenceSet, offset: usize, width: usize) {
    let embed = |normal: &RationalVector, flip: bool| {
        let mut coeffs = vec![Rational::zero(); width];
        for (j, c) in normal.iter().enumerate() {
            coeffs[offset + j] = if flip { -c } else { c.clone() };
        }
        RationalVector::new(coeffs)
    };
    for ineq in &set.inequalities {
        // normal·x ≥ bound  ⇔  −normal·x ≤ −bound
        problem.push_row(embed(&ineq.normal, true), -&ineq.bound);
    }
    for eq in &set.equalities {
        problem.push_row(embed(&eq.normal, false), eq.value.clone());
        problem.push_row(embed(&eq.normal, true), -&eq.value);
    }
}

fn set_is_nonempty(set: &RecurrenceSet, n: usize) -> bool {
    let mut p = LpProblem::new(n);
    push_set_rows(&mut p, set, 0, n);
    lp::solve_feasibility(&p).is_feasible()
}

/// LP query: does some `(x0, xs)` satisfy the stem with `xs` in the set?
fn stem_reaches_set(stem: &LinearRelation, set: &RecurrenceSet, n: usize) -> bool {
    let mut p = LpProblem::new(2 * n);
    for i in 0..stem.num_rows() {
        let mut coeffs = Vec::with_capacity(2 * n);
        coeffs.extend_from_slice(stem.row_x(i));
        coeffs.extend_from_slice(stem.row_xp(i));
        p.push_row(RationalVector::new(coeffs), stem.bound(i).clone());
    }
    push_set_rows(&mut p, set, n, 2 * n);
    lp::solve_feasibility(&p).is_feasible()
}

/// LP query: does `x` have a loop successor inside the set? Strict loop rows
/// are relaxed to their closure here; membership of the sample itself is
/// checked exactly by the caller.
fn has_successor_in_set(loop_rel: &LinearRelation, x: &RationalVector, set: &RecurrenceSet) -> bool {
    let n = loop_rel.num_vars();
    let mut p = LpProblem::new(n);
    for i in 0..loop_rel.num_rows() {
        let shifted = loop_rel.bound(i) - &crate::linalg::dot_slices(loop_rel.row_x(i), x.entries());
        p.push_row(RationalVector::new(loop_rel.row_xp(i).to_vec()), shifted);
    }
    push_set_rows(&mut p, set, 0, n);
    lp::solve_feasibility(&p).is_feasible()
}

/// Sampling-based verification of the two recurrence conditions:
/// (a) some set member is reachable through the stem (one LP query), and
/// (b) each sampled member has a loop successor inside the set (one LP query
/// per sample). Samples are the witness trajectory points `t = 0..min(k, 8)`
/// when a generator is supplied, plus up to `sample_count` vertices obtained
/// by optimizing ± each coordinate over the set.
pub fn verify_recurrence_set(
    prog: &LassoProgram,
    set: &RecurrenceSet,
    generator: Option<&Gnta>,
    sample_count: usize,
) -> Result<RecurrenceCheckReport, ModelError> {
    let n = prog.n();
    for normal in set
        .inequalities
        .iter()
        .map(|i| &i.normal)
        .chain(set.equalities.iter().map(|e| &e.normal))
    {
        if normal.dim() != n {
            return Err(ModelError::DimensionMismatch {
                context: "recurrence set normal",
                expected: n,
                got: normal.dim(),
            });
        }
    }

    let reachable = match prog.stem() {
        None => set_is_nonempty(set, n),
        Some(stem) => stem_reaches_set(stem, set, n),
    };

    let mut samples: Vec<RationalVector> = Vec::new();
    if let Some(g) = generator {
        let k = sample_count.min(8);
        let trajectory = unroll_witness(g, k + 1);
        for state in &trajectory.states()[1..] {
            if !samples.contains(state) {
                samples.push(state.clone());
            }
        }
    }
    let mut vertex_budget = sample_count;
    'outer: for j in 0..n {
        for sign in [1i64, -1] {
            if vertex_budget == 0 {
                break 'outer;
            }
            let mut objective = vec![Rational::zero(); n];
            objective[j] = Rational::from_int(sign);
            let mut p = LpProblem::new(n);
            push_set_rows(&mut p, set, 0, n);
            p.set_objective(RationalVector::new(objective));
            if let OptOutcome::Optimal { point, .. } = lp::optimize(&p) {
                vertex_budget -= 1;
                if !samples.contains(&point) {
                    samples.push(point);
                }
            }
        }
    }

    let mut failures = Vec::new();
    for (index, point) in samples.iter().enumerate() {
        if !set.contains(point) {
            failures.push(SampleFailure {
                index,
                point: point.clone(),
                reason: SampleFailureReason::NotInSet,
            });
        } else if !has_successor_in_set(prog.loop_rel(), point, set) {
            failures.push(SampleFailure {
                index,
                point: point.clone(),
                reason: SampleFailureReason::NoSuccessorInSet,
            });
        }
    }

    Ok(RecurrenceCheckReport {
        reachable,
        samples_checked: samples.len(),
        failures,
    })
}
