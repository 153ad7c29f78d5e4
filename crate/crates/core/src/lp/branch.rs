//! Integer feasibility by branch-and-bound on the LP relaxation.

use crate::linalg::RationalVector;
use crate::rational::Rational;

use super::{solve_feasibility, FeasOutcome, IntOutcome, LpProblem};

pub(super) fn solve(problem: &LpProblem, depth_limit: usize) -> IntOutcome {
    recurse(problem, depth_limit)
}

fn recurse(problem: &LpProblem, depth_remaining: usize) -> IntOutcome {
    let point = match solve_feasibility(problem) {
        FeasOutcome::Infeasible(_) => return IntOutcome::Infeasible,
        FeasOutcome::Feasible(point) => point,
    };
    let fractional = point.iter().position(|v| !v.is_integer());
    let j = match fractional {
        None => return IntOutcome::Feasible(point),
        Some(j) => j,
    };
    if depth_remaining == 0 {
        return IntOutcome::DepthExceeded;
    }
    let value = point.get(j);
    let floor = Rational::from_bigint(value.floor_int());

    // Floor branch first: x_j <= floor(v).
    let mut unit = vec![Rational::zero(); problem.num_vars()];
    unit[j] = Rational::one();
    let mut low = problem.clone();
    low.push_row(RationalVector::new(unit.clone()), floor.clone());
    let low_outcome = recurse(&low, depth_remaining - 1);
    if let IntOutcome::Feasible(p) = low_outcome {
        return IntOutcome::Feasible(p);
    }

    // Ceil branch: x_j >= floor(v) + 1, i.e. -x_j <= -(floor(v) + 1).
    unit[j] = -Rational::one();
    let mut high = problem.clone();
    high.push_row(
        RationalVector::new(unit),
        -(floor + Rational::one()),
    );
    let high_outcome = recurse(&high, depth_remaining - 1);
    match (low_outcome, high_outcome) {
        (_, IntOutcome::Feasible(p)) => IntOutcome::Feasible(p),
        (IntOutcome::DepthExceeded, _) | (_, IntOutcome::DepthExceeded) => {
            IntOutcome::DepthExceeded
        }
        _ => IntOutcome::Infeasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_relaxation_needs_no_branching() {
        let mut p = LpProblem::new(2);
        p.push_row(RationalVector::from_ints(&[-1, 0]), Rational::from_int(-3));
        p.push_row(RationalVector::from_ints(&[0, -1]), Rational::from_int(0));
        match solve(&p, 0) {
            IntOutcome::Feasible(point) => assert!(point.is_integral()),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn closed_tree_reports_infeasible() {
        // 3x = 1 has no integer solution and both branches close.
        let mut p = LpProblem::new(1);
        p.push_row(RationalVector::from_ints(&[3]), Rational::from_int(1));
        p.push_row(RationalVector::from_ints(&[-3]), Rational::from_int(-1));
        assert_eq!(solve(&p, 16), IntOutcome::Infeasible);
    }
}
