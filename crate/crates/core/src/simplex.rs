//! Exact feasibility of `A x = b, x >= 0` by Phase-I simplex with Bland's rule.
//!
//! Either a feasible `x` or a Farkas vector `y` with `yᵀA <= 0 < yᵀb` comes
//! back; both are exact rationals and checkable by the caller.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    /// `y` with `yᵀA <= 0` componentwise and `yᵀb > 0`.
    Infeasible(Vec<BigRational>),
}

/// Decides `A x = b, x >= 0` for a dense `rows × cols` matrix.
pub fn feasibility(a: &[Vec<BigRational>], b: &[BigRational]) -> Feasibility {
    let rows = b.len();
    assert_eq!(a.len(), rows, "row count mismatch");
    let cols = a.first().map_or(0, Vec::len);
    let width = cols + rows + 1;

    // Rows with negative right-hand side are negated so the artificial basis
    // starts feasible; `sign` undoes that in the certificate.
    let mut sign = vec![BigRational::one(); rows];
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for i in 0..rows {
        assert_eq!(a[i].len(), cols, "ragged matrix");
        let flip = b[i].is_negative();
        if flip {
            sign[i] = -BigRational::one();
        }
        let mut row = vec![BigRational::zero(); width];
        for j in 0..cols {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[cols + i] = BigRational::one();
        row[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
        tab.push(row);
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Reduced costs for min Σ artificials: d_j = c_j − Σ_i tab[i][j].
    let mut cost = vec![BigRational::zero(); width];
    for c in &mut cost[cols..cols + rows] {
        *c = BigRational::one();
    }
    for row in &tab {
        for (c, v) in cost.iter_mut().zip(row) {
            if !v.is_zero() {
                *c -= v;
            }
        }
    }

    while let Some(enter) = (0..width - 1).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][width - 1] / &tab[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pr, _) = leave.expect("phase-I objective is bounded below");
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    // Objective value is −cost[rhs].
    if cost[width - 1].is_zero() {
        let mut x = vec![BigRational::zero(); cols];
        for (i, &var) in basis.iter().enumerate() {
            if var < cols {
                x[var] = tab[i][width - 1].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // y_i = c_i − d_i for the artificial column of row i.
        let y = (0..rows).map(|i| (BigRational::one() - &cost[cols + i]) * &sign[i]).collect();
        Feasibility::Infeasible(y)
    }
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], pr: usize, pc: usize) {
    let width = cost.len();
    let inv = BigRational::one() / &tab[pr][pc];
    for v in tab[pr].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for j in 0..width {
            if !pivot_row[j].is_zero() {
                row[j] -= &f * &pivot_row[j];
            }
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for j in 0..width {
            if !pivot_row[j].is_zero() {
                cost[j] -= &f * &pivot_row[j];
            }
        }
    }
}

/// Checks a feasibility answer against the original system.
pub fn certifies(a: &[Vec<BigRational>], b: &[BigRational], answer: &Feasibility) -> bool {
    let cols = a.first().map_or(0, Vec::len);
    match answer {
        Feasibility::Feasible(x) => {
            x.len() == cols
                && x.iter().all(|v| !v.is_negative())
                && a.iter().zip(b).all(|(row, bi)| {
                    let lhs: BigRational = row.iter().zip(x).map(|(aij, xj)| aij * xj).sum();
                    lhs == *bi
                })
        }
        Feasibility::Infeasible(y) => {
            let yb: BigRational = y.iter().zip(b).map(|(yi, bi)| yi * bi).sum();
            y.len() == b.len()
                && yb.is_positive()
                && (0..cols).all(|j| {
                    let s: BigRational = a.iter().zip(y).map(|(row, yi)| &row[j] * yi).sum();
                    !s.is_positive()
                })
        }
    }
}
