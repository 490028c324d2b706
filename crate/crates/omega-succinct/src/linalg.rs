//! Exact linear-system solving over arbitrary-precision rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mdp::Rational;

/// Solve `A·x = b` by Gaussian elimination with exact arithmetic. Pivoting
/// picks the first row with a nonzero entry in the current column; there is
/// no numerical tolerance anywhere.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(Error::contract("linear system must be square"));
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::contract("singular linear system"))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
            }
            b[r] = &b[r] - &(&factor * &b[col]);
        }
    }
    Ok(b)
}

/// Solve a fixpoint system `x_i = Σ_j c_ij · x_j + b_i` given as sparse
/// equations, by exact state elimination.
///
/// Unknowns are eliminated greedily by minimal (uses × dependencies) degree,
/// which keeps fill-in low on the sparse transition structures these systems
/// come from; values are recovered by substitution in reverse elimination
/// order. Equivalent to Gaussian elimination on `(I - C) x = b`, still with
/// no numerical tolerance anywhere.
pub fn solve_hitting(equations: Vec<(Vec<(usize, Rational)>, Rational)>) -> Result<Vec<Rational>> {
    let m = equations.len();
    let mut deps: Vec<BTreeMap<usize, Rational>> = Vec::with_capacity(m);
    let mut consts: Vec<Rational> = Vec::with_capacity(m);
    for (coefs, b) in equations {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, c) in coefs {
            if j >= m {
                return Err(Error::contract("equation references unknown out of range"));
            }
            if !c.is_zero() {
                *row.entry(j).or_insert_with(Rational::zero) += c;
            }
        }
        row.retain(|_, c| !c.is_zero());
        deps.push(row);
        consts.push(b);
    }

    let mut users: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for (i, row) in deps.iter().enumerate() {
        for (&j, _) in row {
            if j != i {
                users[j].insert(i);
            }
        }
    }
    let mut alive: BTreeSet<usize> = (0..m).collect();
    let mut order: Vec<usize> = Vec::with_capacity(m);

    while !alive.is_empty() {
        let &pivot = alive
            .iter()
            .min_by_key(|&&v| {
                let out = deps[v].keys().filter(|&&j| j != v).count();
                (users[v].len() * out, v)
            })
            .expect("alive nonempty");

        // Resolve a self-dependency: x = c·x + rest  =>  x = rest / (1 - c).
        if let Some(c) = deps[pivot].remove(&pivot) {
            let denom = Rational::one() - c;
            if denom.is_zero() {
                return Err(Error::contract("singular hitting system"));
            }
            let inv = denom.recip();
            for coef in deps[pivot].values_mut() {
                *coef = &*coef * &inv;
            }
            consts[pivot] = &consts[pivot] * &inv;
        }

        // Substitute the pivot's expression into every equation using it.
        let expr = deps[pivot].clone();
        let base = consts[pivot].clone();
        for &user in &users[pivot].clone() {
            if user == pivot || !alive.contains(&user) {
                continue;
            }
            let Some(weight) = deps[user].remove(&pivot) else {
                continue;
            };
            consts[user] = &consts[user] + &(&weight * &base);
            for (&j, c) in &expr {
                let add = &weight * c;
                let entry = deps[user].entry(j).or_insert_with(Rational::zero);
                *entry = &*entry + &add;
                if entry.is_zero() {
                    deps[user].remove(&j);
                    users[j].remove(&user);
                } else if j != user {
                    users[j].insert(user);
                }
            }
            // A substitution can create a self-dependency on `user`; it is
            // resolved when `user` itself is eliminated.
        }
        for (&j, _) in &expr {
            users[j].remove(&pivot);
        }
        alive.remove(&pivot);
        order.push(pivot);
    }

    // Back-substitution: each stored expression references only unknowns
    // eliminated later, so walking the order in reverse resolves everything.
    let mut values: Vec<Rational> = consts;
    for &v in order.iter().rev() {
        let mut acc = values[v].clone();
        for (&j, c) in &deps[v] {
            acc += c * &values[j];
        }
        values[v] = acc;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> Rational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn solves_hitting_style_system() {
        // x0 = 1/2 x0 + 1/2, x1 = 1/4 x0 + 1/4  =>  x0 = 1, x1 = 1/2
        let a = vec![vec![q(1, 2), q(0, 1)], vec![q(-1, 4), q(1, 1)]];
        let b = vec![q(1, 2), q(1, 4)];
        let x = solve(a, b).unwrap();
        assert_eq!(x, vec![q(1, 1), q(1, 2)]);
    }

    #[test]
    fn singular_system_is_error() {
        let a = vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]];
        let b = vec![q(1, 1), q(2, 1)];
        assert!(solve(a, b).is_err());
    }
}
