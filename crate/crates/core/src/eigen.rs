//! Exact characteristic polynomials and their positive rational roots.
//!
//! Used as a heuristic source of loop-contraction factors: when a loop has a
//! deterministic affine update `x' = Mx + c`, the homogeneous constraint on a
//! geometric ray forces `My = λy`, so positive rational eigenvalues of `M`
//! are natural candidates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::linalg::{RationalMatrix, RationalVector};
use crate::program::LinearRelation;
use crate::rational::Rational;

/// Coefficients of `det(λI − M)` in ascending degree; the leading
/// coefficient is 1. Computed with the Faddeev–LeVerrier recurrence, which is
/// division-free except for exact divisions by small integers.
pub fn char_poly(m: &RationalMatrix) -> Vec<Rational> {
    assert_eq!(m.rows(), m.cols(), "characteristic polynomial of a square matrix");
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut aux = RationalMatrix::zeros(n, n);
    for k in 1..=n {
        // aux_k = M·aux_{k-1} + c_{n-k+1}·I
        let mut next = m.mul_mat(&aux);
        let c = coeffs[n - k + 1].clone();
        for i in 0..n {
            let v = next.get(i, i) + &c;
            next.set(i, i, v);
        }
        let prod = m.mul_mat(&next);
        coeffs[n - k] = -(prod.trace() / Rational::from_int(k as i64));
        aux = next;
    }
    coeffs
}

/// Positive rational roots of a polynomial with rational coefficients, in
/// ascending order. Uses the rational root theorem after clearing
/// denominators; coefficients too large for 64-bit divisor enumeration make
/// the search give up (empty result), which is acceptable for a heuristic.
pub fn positive_rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    // Strip high-order zeros, then factor out λ^t (roots at zero).
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].is_zero() {
        hi -= 1;
    }
    if hi == 0 {
        return Vec::new();
    }
    let mut lo = 0;
    while coeffs[lo].is_zero() {
        lo += 1;
    }
    let poly = &coeffs[lo..hi];
    if poly.len() <= 1 {
        return Vec::new();
    }

    // Clear denominators to integer coefficients.
    let mut lcm = BigInt::one();
    for c in poly {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = poly
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();

    let a0 = ints.first().expect("nonzero constant term").magnitude();
    let an = ints.last().expect("nonzero leading term").magnitude();
    let (a0, an) = match (a0.to_u64(), an.to_u64()) {
        (Some(a0), Some(an)) => (a0, an),
        _ => return Vec::new(),
    };

    let mut roots = Vec::new();
    for p in divisors(a0) {
        for q in divisors(an) {
            if gcd_u64(p, q) != 1 {
                continue;
            }
            let candidate = Rational::from_big(BigInt::from(p), BigInt::from(q));
            if eval_poly(poly, &candidate).is_zero() {
                roots.push(candidate);
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extracts a deterministic affine update `x' = Mx + c` from the loop rows,
/// when one exists: every primed variable must be pinned by an equality pair
/// (two rows that are exact negations) whose primed part touches only that
/// variable. Returns `None` for nondeterministic loops.
pub(crate) fn deterministic_update(rel: &LinearRelation) -> Option<(RationalMatrix, RationalVector)> {
    let n = rel.num_vars();
    let m = rel.num_rows();
    let mut defining: Vec<Option<(Vec<Rational>, Rational, Rational)>> = vec![None; n];

    for i in 0..m {
        for j in (i + 1)..m {
            let negated = rel.bound(j) == &-rel.bound(i)
                && rel
                    .row_x(i)
                    .iter()
                    .zip(rel.row_x(j).iter())
                    .all(|(a, b)| b == &-a)
                && rel
                    .row_xp(i)
                    .iter()
                    .zip(rel.row_xp(j).iter())
                    .all(|(a, b)| b == &-a);
            if !negated {
                continue;
            }
            // Equality u·x + v·x' = β in row i's orientation.
            let v = rel.row_xp(i);
            let mut nonzero = v.iter().enumerate().filter(|(_, c)| !c.is_zero());
            let (jp, coeff) = match (nonzero.next(), nonzero.next()) {
                (Some((jp, coeff)), None) => (jp, coeff.clone()),
                _ => continue,
            };
            if defining[jp].is_none() {
                defining[jp] = Some((rel.row_x(i).to_vec(), coeff, rel.bound(i).clone()));
            }
        }
    }

    if defining.iter().any(Option::is_none) {
        return None;
    }
    let mut matrix = RationalMatrix::zeros(n, n);
    let mut offset = Vec::with_capacity(n);
    for (jp, def) in defining.into_iter().enumerate() {
        let (u, coeff, beta) = def.expect("checked above");
        let inv = coeff.recip();
        for (col, val) in u.iter().enumerate() {
            matrix.set(jp, col, -&(val * &inv));
        }
        offset.push(beta * &inv);
    }
    Some((matrix, RationalVector::new(offset)))
}
