//! Fourier–Motzkin variable elimination as a feasibility oracle.
//!
//! Eliminates variables in index order, combining every (positive, negative)
//! coefficient pair with positive multipliers so the target coefficient
//! cancels exactly. Rows are kept on a canonical scale (first nonzero
//! coefficient ±1) and deduplicated to slow the quadratic growth; a row cap
//! guards against the worst case.

use std::collections::BTreeSet;

use crate::rational::Rational;

use super::LpProblem;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("Fourier-Motzkin intermediate row count exceeded the cap of {cap}")]
pub struct FmCapExceeded {
    pub cap: usize,
}

type Row = (Vec<Rational>, Rational);

/// Scales so the first nonzero coefficient is ±1 (positive factor only, so
/// the halfspace is unchanged). Returns `None` for all-zero coefficients.
fn canonicalize(mut coeffs: Vec<Rational>, mut bound: Rational) -> Option<Row> {
    let first = coeffs.iter().position(|c| !c.is_zero())?;
    let scale = coeffs[first].abs().recip();
    if !scale.is_one() {
        for c in coeffs.iter_mut() {
            if !c.is_zero() {
                *c = &*c * &scale;
            }
        }
        bound = bound * &scale;
    }
    Some((coeffs, bound))
}

pub(super) fn feasible(problem: &LpProblem, cap: usize) -> Result<bool, FmCapExceeded> {
    let k = problem.num_vars();
    let mut rows: BTreeSet<Row> = BTreeSet::new();
    for row in problem.rows() {
        match canonicalize(row.coeffs.entries().to_vec(), row.bound.clone()) {
            Some(r) => {
                rows.insert(r);
            }
            None => {
                // 0 <= bound must already hold.
                if row.bound.is_negative() {
                    return Ok(false);
                }
            }
        }
    }

    for var in 0..k {
        let mut pos: Vec<Row> = Vec::new();
        let mut neg: Vec<Row> = Vec::new();
        let mut rest: BTreeSet<Row> = BTreeSet::new();
        for row in rows {
            if row.0[var].is_positive() {
                pos.push(row);
            } else if row.0[var].is_negative() {
                neg.push(row);
            } else {
                rest.insert(row);
            }
        }
        let mut next = rest;
        for (pc, pb) in &pos {
            for (nc, nb) in &neg {
                // (-n_var)·P + p_var·N cancels the variable; both multipliers
                // are positive so the implication is sound and complete.
                let mp = -&nc[var];
                let mn = pc[var].clone();
                let coeffs: Vec<Rational> = pc
                    .iter()
                    .zip(nc.iter())
                    .map(|(p, n)| &(&mp * p) + &(&mn * n))
                    .collect();
                let bound = &(&mp * pb) + &(&mn * nb);
                match canonicalize(coeffs, bound) {
                    Some(r) => {
                        next.insert(r);
                    }
                    None => {
                        if bound_is_violated(&mp, pb, &mn, nb) {
                            return Ok(false);
                        }
                    }
                }
                if next.len() > cap {
                    return Err(FmCapExceeded { cap });
                }
            }
        }
        rows = next;
    }

    // All variables eliminated; every surviving row must be 0 <= bound.
    Ok(rows.iter().all(|(_, bound)| !bound.is_negative()))
}

fn bound_is_violated(mp: &Rational, pb: &Rational, mn: &Rational, nb: &Rational) -> bool {
    let bound = &(mp * pb) + &(mn * nb);
    bound.is_negative()
}
