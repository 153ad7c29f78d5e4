//! Exact rational linear constraint solving.
//!
//! Problems are conjunctions of rows `coeffs·v ≤ bound` over free rational
//! variables, with an optional linear objective to maximize. Feasibility and
//! optimization run an exact two-phase simplex with Bland's rule; infeasible
//! outcomes carry a Farkas certificate `c ≥ 0, cᵀA = 0, cᵀb < 0` that is
//! re-verified before being returned. Integer feasibility is decided by
//! branch-and-bound over the same solver, and a Fourier–Motzkin elimination
//! serves as an independent feasibility oracle for testing.

mod branch;
mod fm;
mod simplex;

use crate::linalg::RationalVector;
use crate::rational::Rational;

pub use fm::FmCapExceeded;

/// Default cap on intermediate row count during Fourier–Motzkin elimination.
pub const DEFAULT_FM_ROW_CAP: usize = 100_000;

/// One constraint `coeffs·v ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: RationalVector,
    pub bound: Rational,
}

/// A linear program over `num_vars` free rational variables.
#[derive(Clone, Debug)]
pub struct LpProblem {
    num_vars: usize,
    rows: Vec<LpRow>,
    objective: Option<RationalVector>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            rows: Vec::new(),
            objective: None,
        }
    }

    pub fn push_row(&mut self, coeffs: RationalVector, bound: Rational) {
        assert_eq!(coeffs.dim(), self.num_vars, "row width must match num_vars");
        self.rows.push(LpRow { coeffs, bound });
    }

    pub fn set_objective(&mut self, objective: RationalVector) {
        assert_eq!(
            objective.dim(),
            self.num_vars,
            "objective width must match num_vars"
        );
        self.objective = Some(objective);
    }

    pub fn with_objective(mut self, objective: RationalVector) -> Self {
        self.set_objective(objective);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    pub fn objective(&self) -> Option<&RationalVector> {
        self.objective.as_ref()
    }

    /// Exact check that `point` satisfies every row.
    pub fn is_satisfied_by(&self, point: &RationalVector) -> bool {
        assert_eq!(point.dim(), self.num_vars);
        self.rows
            .iter()
            .all(|row| row.coeffs.dot(point) <= row.bound)
    }
}

/// Nonnegative row multipliers proving `Ax ≤ b` infeasible:
/// `c ≥ 0`, `cᵀA = 0`, `cᵀb < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    multipliers: RationalVector,
}

impl FarkasCertificate {
    pub fn new(multipliers: RationalVector) -> Self {
        FarkasCertificate { multipliers }
    }

    pub fn multipliers(&self) -> &RationalVector {
        &self.multipliers
    }

    /// Exact verification against the problem the certificate was issued for.
    pub fn verify(&self, problem: &LpProblem) -> bool {
        if self.multipliers.dim() != problem.rows().len() {
            return false;
        }
        if self.multipliers.iter().any(Rational::is_negative) {
            return false;
        }
        let k = problem.num_vars();
        let mut combined = vec![Rational::zero(); k];
        let mut combined_bound = Rational::zero();
        for (mult, row) in self.multipliers.iter().zip(problem.rows()) {
            if mult.is_zero() {
                continue;
            }
            for (acc, c) in combined.iter_mut().zip(row.coeffs.iter()) {
                *acc += &(mult * c);
            }
            combined_bound += mult * &row.bound;
        }
        combined.iter().all(Rational::is_zero) && combined_bound.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasOutcome {
    Feasible(RationalVector),
    Infeasible(FarkasCertificate),
}

impl FeasOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasOutcome::Feasible(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OptOutcome {
    Optimal {
        point: RationalVector,
        value: Rational,
    },
    Unbounded {
        ray: RationalVector,
    },
    Infeasible(FarkasCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntOutcome {
    Feasible(RationalVector),
    Infeasible,
    DepthExceeded,
}

/// Decides feasibility; the objective, if any, is ignored.
///
/// A `Feasible` point satisfies every row exactly; an `Infeasible` outcome
/// carries a verified Farkas certificate. Deterministic for a fixed input.
pub fn solve_feasibility(problem: &LpProblem) -> FeasOutcome {
    let outcome = simplex::feasibility(problem);
    match &outcome {
        FeasOutcome::Feasible(point) => {
            assert!(
                problem.is_satisfied_by(point),
                "solver returned a point violating a row"
            );
        }
        FeasOutcome::Infeasible(cert) => {
            assert!(
                cert.verify(problem),
                "solver returned an invalid Farkas certificate"
            );
        }
    }
    outcome
}

/// Maximizes the problem's objective. Panics if no objective is set.
pub fn optimize(problem: &LpProblem) -> OptOutcome {
    let objective = problem
        .objective()
        .expect("optimize requires an objective")
        .clone();
    let outcome = simplex::maximize(problem, &objective);
    match &outcome {
        OptOutcome::Optimal { point, value } => {
            assert!(problem.is_satisfied_by(point));
            assert_eq!(&objective.dot(point), value);
        }
        OptOutcome::Unbounded { ray } => {
            assert!(
                problem
                    .rows()
                    .iter()
                    .all(|row| !row.coeffs.dot(ray).is_positive()),
                "unbounded ray leaves the feasible cone"
            );
            assert!(objective.dot(ray).is_positive(), "ray does not improve objective");
        }
        OptOutcome::Infeasible(cert) => {
            assert!(cert.verify(problem));
        }
    }
    outcome
}

/// Integer feasibility by branch-and-bound on the LP relaxation.
///
/// Branches on the lowest-index fractional coordinate, floor branch first.
/// `DepthExceeded` is inconclusive: the search hit `depth_limit` branchings
/// on some path without closing the tree.
pub fn solve_integer_feasibility(problem: &LpProblem, depth_limit: usize) -> IntOutcome {
    let outcome = branch::solve(problem, depth_limit);
    if let IntOutcome::Feasible(point) = &outcome {
        assert!(point.is_integral(), "branch-and-bound returned a fractional point");
        assert!(problem.is_satisfied_by(point));
    }
    outcome
}

/// Feasibility by Fourier–Motzkin elimination with the default row cap.
///
/// Independent of the simplex path; intended as a testing oracle for small
/// problems (variable elimination is doubly exponential in the worst case).
pub fn fourier_motzkin_feasible(problem: &LpProblem) -> Result<bool, FmCapExceeded> {
    fm::feasible(problem, DEFAULT_FM_ROW_CAP)
}

/// Same as [`fourier_motzkin_feasible`] with an explicit intermediate-row cap.
pub fn fourier_motzkin_feasible_with_cap(
    problem: &LpProblem,
    cap: usize,
) -> Result<bool, FmCapExceeded> {
    fm::feasible(problem, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn vec_of(vals: &[i64]) -> RationalVector {
        RationalVector::from_ints(vals)
    }

    fn problem(k: usize, rows: &[(&[i64], i64)]) -> LpProblem {
        let mut p = LpProblem::new(k);
        for (coeffs, bound) in rows {
            p.push_row(vec_of(coeffs), q(*bound));
        }
        p
    }

    #[test]
    fn contradictory_bounds_give_verified_certificate() {
        // x <= -1 and -x <= 0 combine to 0 <= -1.
        let p = problem(1, &[(&[1], -1), (&[-1], 0)]);
        match solve_feasibility(&p) {
            FeasOutcome::Infeasible(cert) => {
                assert!(cert.verify(&p));
                // multipliers sum the rows to 0·x <= negative
                let combined_bound = cert
                    .multipliers()
                    .iter()
                    .zip(p.rows())
                    .map(|(c, row)| c * &row.bound)
                    .fold(Rational::zero(), |a, b| a + b);
                assert!(combined_bound.is_negative());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn identity_loop_fixed_point_system_is_feasible() {
        // x >= 0 together with x' = x collapsed to x' := x gives {-x <= 0}.
        let p = problem(1, &[(&[-1], 0)]);
        match solve_feasibility(&p) {
            FeasOutcome::Feasible(point) => {
                assert_eq!(point, vec_of(&[0]), "vertex solution is the origin");
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_row_contradiction_is_infeasible() {
        let p = problem(2, &[(&[0, 0], -1)]);
        assert!(!solve_feasibility(&p).is_feasible());
    }

    #[test]
    fn optimize_bounded_above() {
        let p = problem(1, &[(&[1], 5), (&[-1], 0)]).with_objective(vec_of(&[1]));
        match optimize(&p) {
            OptOutcome::Optimal { point, value } => {
                assert_eq!(point, vec_of(&[5]));
                assert_eq!(value, q(5));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn optimize_unbounded_returns_ray() {
        let p = problem(1, &[(&[-1], 0)]).with_objective(vec_of(&[1]));
        match optimize(&p) {
            OptOutcome::Unbounded { ray } => {
                assert!(ray.get(0).is_positive());
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn optimize_infeasible_carries_certificate() {
        let p = problem(1, &[(&[1], -1), (&[-1], 0)]).with_objective(vec_of(&[1]));
        match optimize(&p) {
            OptOutcome::Infeasible(cert) => assert!(cert.verify(&p)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn integer_forced_fraction_is_infeasible() {
        // 2x <= 1 and -2x <= -1 force x = 1/2.
        let p = problem(1, &[(&[2], 1), (&[-2], -1)]);
        assert_eq!(solve_integer_feasibility(&p, 64), IntOutcome::Infeasible);
        // The relaxation is feasible.
        assert!(solve_feasibility(&p).is_feasible());
    }

    #[test]
    fn integer_rounds_inside_interval() {
        // 7/2 <= x <= 9/2 admits exactly x = 4.
        let mut p = LpProblem::new(1);
        p.push_row(vec_of(&[1]), Rational::new(9, 2));
        p.push_row(vec_of(&[-1]), Rational::new(-7, 2));
        match solve_integer_feasibility(&p, 64) {
            IntOutcome::Feasible(point) => assert_eq!(point, vec_of(&[4])),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn integer_depth_zero_on_fractional_relaxation_is_inconclusive() {
        // x - y = 1/2 keeps every relaxation vertex fractional.
        let mut p = LpProblem::new(2);
        p.push_row(vec_of(&[2, -2]), Rational::from_int(1));
        p.push_row(vec_of(&[-2, 2]), Rational::from_int(-1));
        assert_eq!(solve_integer_feasibility(&p, 0), IntOutcome::DepthExceeded);
    }

    #[test]
    fn fourier_motzkin_matches_simplex_on_fixed_cases() {
        let cases = [
            problem(1, &[(&[1], -1), (&[-1], 0)]),
            problem(1, &[(&[-1], 0)]),
            problem(2, &[(&[1, 1], 3), (&[-1, 0], 0), (&[0, -1], 0)]),
            problem(2, &[(&[0, 0], -1)]),
            problem(2, &[]),
            problem(3, &[(&[1, 1, 1], -1), (&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0)]),
        ];
        for p in &cases {
            let fm = fourier_motzkin_feasible(p).expect("under cap");
            assert_eq!(fm, solve_feasibility(p).is_feasible(), "disagreement on {p:?}");
        }
    }

    #[test]
    fn empty_row_set_is_vacuously_feasible() {
        let p = problem(2, &[]);
        assert!(fourier_motzkin_feasible(&p).unwrap());
        assert!(solve_feasibility(&p).is_feasible());
    }

    #[test]
    fn determinism_bit_for_bit() {
        let p = problem(
            3,
            &[
                (&[1, 2, -1], 4),
                (&[-1, 1, 0], -1),
                (&[0, -3, 2], 5),
                (&[2, 0, 1], 7),
            ],
        );
        assert_eq!(solve_feasibility(&p), solve_feasibility(&p));
        let with_obj = p.clone().with_objective(vec_of(&[1, 1, 1]));
        assert_eq!(optimize(&with_obj), optimize(&with_obj));
    }
}
