//! Integer row lattices: Hermite normal form with transform, kernels,
//! membership and saturation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn sub_multiple(row: &mut [BigInt], other: &[BigInt], q: &BigInt) {
    for (a, b) in row.iter_mut().zip(other) {
        *a -= q * b;
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U * A = H`, `U`
/// unimodular, nonzero rows of `H` first, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf_with_transform(a: &Matrix, cols: usize) -> (Matrix, Matrix, usize) {
    let m = a.len();
    let mut h = a.clone();
    let mut u = identity(m);
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].magnitude().cmp(h[j][c].magnitude()));
            let Some(piv) = piv else { break };
            h.swap(r, piv);
            u.swap(r, piv);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                let (hr, ur) = (h[r].clone(), u[r].clone());
                sub_multiple(&mut h[i], &hr, &q);
                sub_multiple(&mut u[i], &ur, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !h[r][c].is_zero() {
            if h[r][c].is_negative() {
                h[r].iter_mut().for_each(|x| *x = -x.clone());
                u[r].iter_mut().for_each(|x| *x = -x.clone());
            }
            for i in 0..r {
                let q = h[i][c].div_floor(&h[r][c]);
                if !q.is_zero() {
                    let (hr, ur) = (h[r].clone(), u[r].clone());
                    sub_multiple(&mut h[i], &hr, &q);
                    sub_multiple(&mut u[i], &ur, &q);
                }
            }
            r += 1;
        }
    }
    (h, u, r)
}

/// Basis of `{x : x A = 0}`.
pub fn left_kernel(a: &Matrix, cols: usize) -> Matrix {
    let (_, u, rank) = hnf_with_transform(a, cols);
    u[rank..].to_vec()
}

fn transpose(a: &Matrix, cols: usize) -> Matrix {
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Reduced basis (nonzero HNF rows) of the row lattice.
pub fn row_basis(a: &Matrix, cols: usize) -> Matrix {
    let (h, _, rank) = hnf_with_transform(a, cols);
    h[..rank].to_vec()
}

/// `x` with `x A = target`, if one exists.
pub fn solve_left(a: &Matrix, cols: usize, target: &[BigInt]) -> Option<Vec<BigInt>> {
    let (h, u, rank) = hnf_with_transform(a, cols);
    let mut residual = target.to_vec();
    let mut y = vec![BigInt::zero(); rank];
    for (j, yj) in y.iter_mut().enumerate() {
        let p = (0..cols).find(|&c| !h[j][c].is_zero()).unwrap();
        let (q, rem) = residual[p].div_rem(&h[j][p]);
        if !rem.is_zero() {
            return None;
        }
        sub_multiple(&mut residual, &h[j], &q);
        *yj = q;
    }
    if residual.iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![BigInt::zero(); a.len()];
    for (j, yj) in y.iter().enumerate() {
        for (xi, uji) in x.iter_mut().zip(&u[j]) {
            *xi += yj * uji;
        }
    }
    Some(x)
}

/// `(L tensor Q) intersect Z^n`, as a reduced basis.
pub fn saturation(a: &Matrix, cols: usize) -> Matrix {
    let basis = row_basis(a, cols);
    if basis.is_empty() {
        return basis;
    }
    // right kernel K of the basis, then the integer vectors orthogonal to K
    let k = left_kernel(&transpose(&basis, cols), basis.len().max(1));
    if k.is_empty() {
        return row_basis(&identity(cols), cols);
    }
    let kt = transpose(&k, cols);
    let sat = left_kernel(&kt, k.len());
    row_basis(&sat, cols)
}

pub fn mat_vec_left(x: &[BigInt], a: &Matrix, cols: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); cols];
    for (xi, row) in x.iter().zip(a) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += xi * v;
        }
    }
    out
}
