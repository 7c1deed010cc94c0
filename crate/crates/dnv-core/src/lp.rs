//! Exact rational linear feasibility.
//!
//! A small dense two-phase simplex over `BigRational` with Bland's rule, used
//! to decide strict feasibility of ample-degree systems. Deterministic: the
//! same system always yields the same answer (and the same witness point).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Ge,
    Eq,
}

/// One linear constraint `coeffs · x REL rhs` over free (sign-unrestricted)
/// variables.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rel: Rel,
    pub rhs: BigRational,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// Find any point satisfying all constraints, or report definite
/// infeasibility.
pub fn feasible_point(n_vars: usize, cons: &[Constraint]) -> Option<Vec<BigRational>> {
    let m = cons.len();
    let n_ge = cons.iter().filter(|c| c.rel == Rel::Ge).count();
    // Columns: x+ (n_vars), x- (n_vars), surplus (n_ge), artificial (m).
    let n_cols = 2 * n_vars + n_ge + m;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut ge_seen = 0;
    for (r, c) in cons.iter().enumerate() {
        assert_eq!(c.coeffs.len(), n_vars, "constraint arity mismatch");
        let mut row = vec![BigRational::zero(); n_cols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a.clone();
            row[n_vars + j] = -a.clone();
        }
        if c.rel == Rel::Ge {
            row[2 * n_vars + ge_seen] = -BigRational::one();
            ge_seen += 1;
        }
        row[n_cols] = c.rhs.clone();
        if row[n_cols].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        let art = 2 * n_vars + n_ge + r;
        row[art] = BigRational::one();
        basis.push(art);
        tab.push(row);
    }
    // Phase-1 reduced-cost row for objective = sum of artificials.
    let mut cost = vec![BigRational::zero(); n_cols + 1];
    for row in &tab {
        for j in 0..=n_cols {
            cost[j] -= &row[j];
        }
    }
    for r in 0..m {
        let art = 2 * n_vars + n_ge + r;
        cost[art] = BigRational::zero();
    }
    loop {
        // Bland: smallest column with negative reduced cost.
        let enter = (0..n_cols).find(|&j| cost[j].is_negative());
        let Some(enter) = enter else { break };
        // Min-ratio leaving row; ties by smallest basis index.
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for r in 0..m {
            if tab[r][enter].is_positive() {
                let ratio = &tab[r][n_cols] / &tab[r][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[r] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
        }
        let leave = leave.expect("phase-1 objective is bounded below by 0");
        pivot(&mut tab, &mut cost, &mut basis, leave, enter, n_cols);
    }
    if !cost[n_cols].is_zero() {
        // -z != 0 means the artificial sum cannot reach 0.
        return None;
    }
    let mut x = vec![BigRational::zero(); 2 * n_vars];
    for r in 0..m {
        if basis[r] < 2 * n_vars {
            x[basis[r]] = tab[r][n_cols].clone();
        }
    }
    Some(
        (0..n_vars)
            .map(|j| &x[j] - &x[n_vars + j])
            .collect(),
    )
}

fn pivot(
    tab: &mut [Vec<BigRational>],
    cost: &mut [BigRational],
    basis: &mut [usize],
    r: usize,
    c: usize,
    n_cols: usize,
) {
    let p = tab[r][c].clone();
    for x in tab[r].iter_mut() {
        *x /= &p;
    }
    for i in 0..tab.len() {
        if i == r || tab[i][c].is_zero() {
            continue;
        }
        let f = tab[i][c].clone();
        for j in 0..=n_cols {
            let sub = &f * &tab[r][j];
            tab[i][j] -= sub;
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for j in 0..=n_cols {
            let sub = &f * &tab[r][j];
            cost[j] -= sub;
        }
    }
    basis[r] = c;
}
