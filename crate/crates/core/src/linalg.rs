//! Exact Gaussian elimination over the function field and over Q.

#![allow(clippy::needless_range_loop)]

use num_traits::Zero;

use crate::expr::{Expr, Q};

/// Solve `m · c = rhs`. Free unknowns are set to zero; `None` if inconsistent.
pub fn solve(mut m: Vec<Vec<Expr>>, mut rhs: Vec<Expr>) -> Option<Vec<Expr>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // smallest nonzero entry keeps intermediate fractions small
        let Some(p) = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| (m[i][c].size(), i))
        else {
            continue;
        };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for k in c..cols {
            m[r][k] = m[r][k].mul(&inv);
        }
        rhs[r] = rhs[r].mul(&inv);
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in c..cols {
                if !m[r][k].is_zero() {
                    m[i][k] = m[i][k].sub(&f.mul(&m[r][k]));
                }
            }
            rhs[i] = rhs[i].sub(&f.mul(&rhs[r]));
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|e| !e.is_zero()) {
        return None;
    }
    let mut out = vec![Expr::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = rhs[i].clone();
    }
    Some(out)
}

/// Solve `m · c = rhs` over Q. Free unknowns are set to zero; `None` if
/// inconsistent.
pub fn solve_q(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].recip();
        for k in c..cols {
            m[r][k] = &m[r][k] * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in c..cols {
                if !m[r][k].is_zero() {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
            let t = &f * &rhs[r];
            rhs[i] -= t;
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|e| !e.is_zero()) {
        return None;
    }
    let mut out = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = rhs[i].clone();
    }
    Some(out)
}

/// Rank of a rational matrix.
pub fn rank_q(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for k in c..cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in c..cols {
                let t = &f * &m[r][k];
                m[i][k] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    #[test]
    fn solves_consistent_and_rejects_inconsistent() {
        let e = Expr::int;
        let m = vec![vec![e(1), e(1)], vec![e(1), e(-1)]];
        assert_eq!(solve(m.clone(), vec![e(3), e(1)]), Some(vec![e(2), e(1)]));
        let singular = vec![vec![e(1), e(1)], vec![e(2), e(2)]];
        assert_eq!(solve(singular.clone(), vec![e(1), e(3)]), None);
        assert_eq!(solve(singular, vec![e(1), e(2)]), Some(vec![e(1), e(0)]));
    }

    #[test]
    fn rational_rank() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(1)]];
        assert_eq!(rank_q(m), 2);
        assert_eq!(rank_q(vec![vec![q(0)]]), 0);
    }

    #[test]
    fn rational_solve() {
        let m = vec![vec![q(2), q(0)], vec![q(0), q(0)], vec![q(1), q(3)]];
        let x = solve_q(m.clone(), vec![q(4), q(0), q(5)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        assert_eq!(solve_q(m, vec![q(4), q(1), q(5)]), None);
    }
}
