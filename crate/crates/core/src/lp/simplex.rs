//! Two-phase primal simplex over exact rationals.
//!
//! Free variables are split into nonnegative pairs (`x = x⁺ − x⁻`) and rows
//! get one slack each, giving the standard equality form. Rows with negative
//! right-hand sides are sign-flipped and receive an artificial variable;
//! phase 1 minimizes the artificial sum. Bland's rule (lowest eligible index
//! entering, lowest basic index on ratio ties) makes every run terminating
//! and deterministic. When phase 1 bottoms out above zero, the simplex
//! multipliers of the initial unit columns yield the Farkas certificate.

use crate::linalg::RationalVector;
use crate::rational::Rational;

use super::{FarkasCertificate, FeasOutcome, LpProblem, OptOutcome};

struct Tableau {
    k: usize,
    m: usize,
    art_start: usize, // == 2k + m; artificial columns follow
    n_total: usize,
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Tableau {
        let k = problem.num_vars();
        let m = problem.rows().len();
        let art_start = 2 * k + m;
        let n_art = problem
            .rows()
            .iter()
            .filter(|r| r.bound.is_negative())
            .count();
        let n_total = art_start + n_art;

        let mut a = vec![vec![Rational::zero(); n_total]; m];
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        let mut next_art = art_start;

        for (i, row) in problem.rows().iter().enumerate() {
            let flip = row.bound.is_negative();
            for j in 0..k {
                let c = row.coeffs.get(j);
                if c.is_zero() {
                    continue;
                }
                let v = if flip { -c } else { c.clone() };
                a[i][k + j] = -&v;
                a[i][j] = v;
            }
            a[i][2 * k + i] = if flip { -Rational::one() } else { Rational::one() };
            rhs.push(if flip { -&row.bound } else { row.bound.clone() });
            if flip {
                a[i][next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(2 * k + i);
            }
            flipped.push(flip);
        }

        Tableau {
            k,
            m,
            art_start,
            n_total,
            a,
            rhs,
            basis,
            flipped,
        }
    }

    fn pivot(&mut self, r: usize, e: usize, obj: &mut [Rational], obj_rhs: &mut Rational) {
        let pivot = self.a[r][e].clone();
        debug_assert!(!pivot.is_zero());
        let inv = pivot.recip();
        for v in self.a[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let scaled = &self.rhs[r] * &inv;
        self.rhs[r] = scaled;

        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.m {
            if i == r || self.a[i][e].is_zero() {
                continue;
            }
            let factor = self.a[i][e].clone();
            let row = &mut self.a[i];
            for (dst, src) in row.iter_mut().zip(pivot_row.iter()) {
                if !src.is_zero() {
                    *dst -= &(&factor * src);
                }
            }
            self.rhs[i] -= &(&factor * &pivot_rhs);
        }
        if !obj[e].is_zero() {
            let factor = obj[e].clone();
            for (dst, src) in obj.iter_mut().zip(pivot_row.iter()) {
                if !src.is_zero() {
                    *dst -= &(&factor * src);
                }
            }
            *obj_rhs -= &(&factor * &pivot_rhs);
        }
        self.basis[r] = e;
    }

    /// Bland ratio test: among rows with a positive pivot entry, the minimum
    /// `rhs/pivot`, ties broken by the lowest basic column index.
    fn leaving_row(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..self.m {
            if !self.a[i][e].is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / &self.a[i][e];
            match &best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]) {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn column_value(&self, col: usize) -> Rational {
        for i in 0..self.m {
            if self.basis[i] == col {
                return self.rhs[i].clone();
            }
        }
        Rational::zero()
    }

    fn extract_point(&self) -> RationalVector {
        RationalVector::new(
            (0..self.k)
                .map(|j| self.column_value(j) - self.column_value(self.k + j))
                .collect(),
        )
    }

    /// Runs phase 1. Returns `None` when feasible, or the Farkas certificate
    /// for the original `≤` system when the artificial sum stays positive.
    fn phase1(&mut self) -> Option<FarkasCertificate> {
        if (0..self.m).all(|i| self.basis[i] < self.art_start) {
            return None;
        }
        let mut obj = vec![Rational::zero(); self.n_total];
        for item in obj.iter_mut().skip(self.art_start) {
            *item = Rational::one();
        }
        let mut obj_rhs = Rational::zero();
        for i in 0..self.m {
            if self.basis[i] < self.art_start {
                continue;
            }
            for (dst, src) in obj.iter_mut().zip(self.a[i].iter()) {
                if !src.is_zero() {
                    *dst -= src;
                }
            }
            obj_rhs -= &self.rhs[i];
        }

        loop {
            let entering = (0..self.n_total).find(|&j| obj[j].is_negative());
            let e = match entering {
                Some(e) => e,
                None => break,
            };
            let r = self
                .leaving_row(e)
                .expect("phase-1 objective is bounded below");
            self.pivot(r, e, &mut obj, &mut obj_rhs);
        }

        let value = -&obj_rhs;
        if value.is_zero() {
            return None;
        }

        // Simplex multipliers read off the initial unit columns: the column
        // that started as row i's identity column has reduced cost
        // c_col − y_i, so y_i = c_col − obj[col].
        let mut art_cursor = self.art_start;
        let mut cert = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let y_i = if self.flipped[i] {
                let col = art_cursor;
                art_cursor += 1;
                Rational::one() - &obj[col]
            } else {
                -&obj[2 * self.k + i]
            };
            // Undo the row sign flip to get the original-system multiplier.
            cert.push(if self.flipped[i] { y_i } else { -y_i });
        }
        Some(FarkasCertificate::new(RationalVector::new(cert)))
    }

    /// Pivots zero-valued artificial variables out of the basis; rows whose
    /// non-artificial entries are all zero are redundant and removed.
    fn evict_artificials(&mut self) {
        let mut dummy_obj = vec![Rational::zero(); self.n_total];
        let mut dummy_rhs = Rational::zero();
        let mut drop_rows = Vec::new();
        for r in 0..self.m {
            if self.basis[r] < self.art_start {
                continue;
            }
            debug_assert!(
                self.rhs[r].is_zero(),
                "basic artificial above zero after phase 1"
            );
            match (0..self.art_start).find(|&j| !self.a[r][j].is_zero()) {
                Some(e) => self.pivot(r, e, &mut dummy_obj, &mut dummy_rhs),
                None => drop_rows.push(r),
            }
        }
        for &r in drop_rows.iter().rev() {
            self.a.remove(r);
            self.rhs.remove(r);
            self.basis.remove(r);
            self.flipped.remove(r);
        }
        self.m = self.a.len();
    }
}

pub(super) fn feasibility(problem: &LpProblem) -> FeasOutcome {
    let mut t = Tableau::build(problem);
    match t.phase1() {
        Some(cert) => FeasOutcome::Infeasible(cert),
        None => FeasOutcome::Feasible(t.extract_point()),
    }
}

pub(super) fn maximize(problem: &LpProblem, objective: &RationalVector) -> OptOutcome {
    let mut t = Tableau::build(problem);
    if let Some(cert) = t.phase1() {
        return OptOutcome::Infeasible(cert);
    }
    t.evict_artificials();

    // Phase 2 minimizes the negated objective over the split variables.
    let mut obj = vec![Rational::zero(); t.n_total];
    for j in 0..t.k {
        let c = objective.get(j);
        obj[j] = -c;
        obj[t.k + j] = c.clone();
    }
    let mut obj_rhs = Rational::zero();
    for i in 0..t.m {
        let b = t.basis[i];
        if obj[b].is_zero() {
            continue;
        }
        let factor = obj[b].clone();
        let row = t.a[i].clone();
        for (dst, src) in obj.iter_mut().zip(row.iter()) {
            if !src.is_zero() {
                *dst -= &(&factor * src);
            }
        }
        obj_rhs -= &(&factor * &t.rhs[i]);
    }

    loop {
        let entering = (0..t.art_start).find(|&j| obj[j].is_negative());
        let e = match entering {
            Some(e) => e,
            None => {
                let point = t.extract_point();
                let value = objective.dot(&point);
                return OptOutcome::Optimal { point, value };
            }
        };
        match t.leaving_row(e) {
            Some(r) => t.pivot(r, e, &mut obj, &mut obj_rhs),
            None => {
                // Recession direction: the entering variable grows freely,
                // basics move by the negated column.
                let mut delta = vec![Rational::zero(); 2 * t.k];
                if e < 2 * t.k {
                    delta[e] = Rational::one();
                }
                for i in 0..t.m {
                    if t.basis[i] < 2 * t.k && !t.a[i][e].is_zero() {
                        delta[t.basis[i]] = -&t.a[i][e];
                    }
                }
                let ray =
                    RationalVector::new((0..t.k).map(|j| &delta[j] - &delta[t.k + j]).collect());
                return OptOutcome::Unbounded { ray };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_int(v)
    }

    #[test]
    fn phase1_handles_negative_bounds() {
        // x >= 3 and x <= 10
        let mut p = LpProblem::new(1);
        p.push_row(RationalVector::from_ints(&[-1]), q(-3));
        p.push_row(RationalVector::from_ints(&[1]), q(10));
        match feasibility(&p) {
            FeasOutcome::Feasible(point) => {
                assert!(point.get(0) >= &q(3) && point.get(0) <= &q(10));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn equality_pair_pins_value() {
        let mut p = LpProblem::new(1);
        p.push_row(RationalVector::from_ints(&[1]), Rational::new(7, 2));
        p.push_row(RationalVector::from_ints(&[-1]), Rational::new(-7, 2));
        match maximize(&p, &RationalVector::from_ints(&[1])) {
            OptOutcome::Optimal { point, value } => {
                assert_eq!(point.get(0), &Rational::new(7, 2));
                assert_eq!(value, Rational::new(7, 2));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_rows_survive_phase2() {
        // Duplicated constraints produce redundant rows after phase 1.
        let mut p = LpProblem::new(2);
        for _ in 0..3 {
            p.push_row(RationalVector::from_ints(&[-1, -1]), q(-2));
        }
        p.push_row(RationalVector::from_ints(&[1, 0]), q(5));
        p.push_row(RationalVector::from_ints(&[0, 1]), q(5));
        match maximize(&p, &RationalVector::from_ints(&[1, 1])) {
            OptOutcome::Optimal { value, .. } => assert_eq!(value, q(10)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }
}
