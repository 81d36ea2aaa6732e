//! Exact rational linear feasibility for the small dense systems produced by
//! the metric search: two-phase simplex with Bland's rule.

use num::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, solution: Vec<Rational> },
}

/// Maximizes c·x subject to A x = b, x ≥ 0.
pub fn simplex_max(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpResult {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);
    // tableau over columns: n structural + m artificial, rows + rhs
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = a[i].clone();
        let mut r = b[i].clone();
        if r.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            r = -r;
        }
        let mut art = vec![Rational::zero(); m];
        art[i] = Rational::one();
        row.extend(art);
        rows.push(row);
        rhs.push(r);
    }
    let total = n + m;
    let mut basis: Vec<usize> = (n..total).collect();

    // phase 1: minimize the artificial sum
    let mut obj: Vec<Rational> = vec![Rational::zero(); total];
    for j in n..total {
        obj[j] = -Rational::one();
    }
    if run(&mut rows, &mut rhs, &mut basis, &obj, total).is_none() {
        return LpResult::Infeasible; // phase 1 is always bounded
    }
    let phase1: Rational = basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(i, _)| rhs[i].clone())
        .sum();
    if !phase1.is_zero() {
        return LpResult::Infeasible;
    }
    // drive remaining artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !rows[i][j].is_zero()) {
                pivot(&mut rows, &mut rhs, &mut basis, i, j);
            }
        }
    }

    // phase 2: artificials may not re-enter (enterable = n); any left in the
    // basis sit at value zero
    let mut obj: Vec<Rational> = c.to_vec();
    obj.extend(vec![Rational::zero(); m]);
    match run(&mut rows, &mut rhs, &mut basis, &obj, n) {
        None => LpResult::Unbounded,
        Some(()) => {
            let mut x = vec![Rational::zero(); n];
            for (i, &j) in basis.iter().enumerate() {
                if j < n {
                    x[j] = rhs[i].clone();
                }
            }
            let value: Rational = c.iter().zip(&x).map(|(ci, xi)| ci.clone() * xi.clone()).sum();
            LpResult::Optimal { value, solution: x }
        }
    }
}

/// Simplex iterations with Bland's rule; columns `0..enterable` may enter.
/// Returns None on unboundedness.
fn run(
    rows: &mut Vec<Vec<Rational>>,
    rhs: &mut Vec<Rational>,
    basis: &mut Vec<usize>,
    obj: &[Rational],
    enterable: usize,
) -> Option<()> {
    loop {
        // reduced costs: obj_j - obj_B · column_j
        let mut entering = None;
        'cols: for j in 0..enterable {
            if basis.contains(&j) {
                continue;
            }
            let mut red = obj[j].clone();
            for (i, &bj) in basis.iter().enumerate() {
                if !obj[bj].is_zero() && !rows[i][j].is_zero() {
                    red -= obj[bj].clone() * rows[i][j].clone();
                }
            }
            if red.is_positive() {
                entering = Some(j);
                break 'cols;
            }
        }
        let Some(j) = entering else {
            return Some(());
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows.len() {
            if rows[i][j].is_positive() {
                let ratio = rhs[i].clone() / rows[i][j].clone();
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return None;
        };
        pivot(rows, rhs, basis, i, j);
    }
}

fn pivot(rows: &mut Vec<Vec<Rational>>, rhs: &mut Vec<Rational>, basis: &mut Vec<usize>, i: usize, j: usize) {
    let p = rows[i][j].clone();
    for x in rows[i].iter_mut() {
        *x /= p.clone();
    }
    rhs[i] /= p;
    for r in 0..rows.len() {
        if r != i && !rows[r][j].is_zero() {
            let f = rows[r][j].clone();
            let pivot_row = rows[i].clone();
            for (x, pv) in rows[r].iter_mut().zip(&pivot_row) {
                *x -= f.clone() * pv.clone();
            }
            let d = rhs[i].clone();
            rhs[r] -= f * d;
        }
    }
    basis[i] = j;
}

/// Finds x with A x = b and every coordinate strictly positive, maximizing
/// the smallest coordinate. Returns None when no strictly positive solution
/// exists.
pub fn solve_strictly_positive(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { return None };
    // variables: x (n), s (1), slacks k (n):  A x = b,  x_i - s - k_i = 0
    let cols = 2 * n + 1;
    let mut rows = Vec::with_capacity(m + n);
    let mut rhs = Vec::with_capacity(m + n);
    for i in 0..m {
        let mut row = vec![Rational::zero(); cols];
        row[..n].clone_from_slice(&a[i]);
        rows.push(row);
        rhs.push(b[i].clone());
    }
    for i in 0..n {
        let mut row = vec![Rational::zero(); cols];
        row[i] = Rational::one();
        row[n] = -Rational::one();
        row[n + 1 + i] = -Rational::one();
        rows.push(row);
        rhs.push(Rational::zero());
    }
    let mut c = vec![Rational::zero(); cols];
    c[n] = Rational::one();
    match simplex_max(&c, &rows, &rhs) {
        LpResult::Optimal { value, solution } if value.is_positive() => {
            Some(solution[..n].to_vec())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn solves_a_simple_system() {
        // x + y = 1, strictly positive
        let a = vec![vec![rat_int(1), rat_int(1)]];
        let b = vec![rat_int(1)];
        let x = solve_strictly_positive(&a, &b).unwrap();
        assert_eq!(x.len(), 2);
        assert!(x.iter().all(|v| v.is_positive()));
        assert_eq!(x[0].clone() + x[1].clone(), rat_int(1));
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = 1 and x + y = 2
        let a = vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(1)],
        ];
        let b = vec![rat_int(1), rat_int(2)];
        assert!(solve_strictly_positive(&a, &b).is_none());
    }

    #[test]
    fn detects_sign_infeasibility() {
        // x + y = 1, y alone must also sum to 1 -> x = 0: no strictly positive solution
        let a = vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(0), rat_int(1)],
        ];
        let b = vec![rat_int(1), rat_int(1)];
        assert!(solve_strictly_positive(&a, &b).is_none());
    }

    #[test]
    fn respects_exact_targets() {
        // the realized two-boundary system: 12(x+y+2u+2v) = 12/11·...,
        // scaled variant with exact rationals
        let a = vec![
            vec![rat_int(1), rat_int(1), rat_int(2), rat_int(2)],
            vec![rat_int(1), rat_int(1), rat_int(0), rat_int(0)],
        ];
        let b = vec![rat(1, 11), rat(1, 23)];
        let x = solve_strictly_positive(&a, &b).unwrap();
        let s1 = x[0].clone() + x[1].clone() + rat_int(2) * (x[2].clone() + x[3].clone());
        assert_eq!(s1, rat(1, 11));
        assert_eq!(x[0].clone() + x[1].clone(), rat(1, 23));
    }

    #[test]
    fn unbounded_is_reported() {
        // max x with no constraints binding it: A = [0]·x = 0
        let c = vec![rat_int(1)];
        let a = vec![vec![rat_int(0)]];
        let b = vec![rat_int(0)];
        assert_eq!(simplex_max(&c, &a, &b), LpResult::Unbounded);
    }
}
