//! Lawson–Hanson non-negative least squares and the least-distance program
//! built on top of it.

use nalgebra::{DMatrix, DVector};

/// Solves `min ||E u - f||` subject to `u >= 0`.
pub fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> DVector<f64> {
    let n = e.ncols();
    let tol = 1e-13 * (1.0 + e.norm()) * (1.0 + f.norm());
    let mut u = DVector::zeros(n);
    let mut passive = vec![false; n];
    for _outer in 0..(3 * n + 10) {
        let w = e.transpose() * (f - e * &u);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(t) = candidate else { break };
        if w[t] <= tol {
            break;
        }
        passive[t] = true;
        for _inner in 0..(3 * n + 10) {
            let z = solve_passive(e, f, &passive);
            if (0..n).filter(|&j| passive[j]).all(|j| z[j] > 0.0) {
                u = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for j in (0..n).filter(|&j| passive[j] && z[j] <= 0.0) {
                alpha = alpha.min(u[j] / (u[j] - z[j]));
            }
            u += (z - &u) * alpha;
            for j in 0..n {
                if passive[j] && u[j] <= 1e-15 {
                    passive[j] = false;
                    u[j] = 0.0;
                }
            }
        }
    }
    u
}

fn solve_passive(e: &DMatrix<f64>, f: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let sub = e.select_columns(&cols);
    let svd = sub.svd(true, true);
    let sol = svd
        .solve(f, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols.len()));
    let mut z = DVector::zeros(passive.len());
    for (k, &j) in cols.iter().enumerate() {
        z[j] = sol[k];
    }
    z
}

/// Outcome of the least-distance program `min ||y||` s.t. `G y >= h`.
pub enum Ldp {
    Feasible(DVector<f64>),
    /// Certificate `u >= 0` with `G^T u = 0` and `h^T u > 0`.
    Infeasible(DVector<f64>),
}

pub fn least_distance(g: &DMatrix<f64>, h: &DVector<f64>) -> Ldp {
    let (m, n) = g.shape();
    let mut e = DMatrix::zeros(n + 1, m);
    for i in 0..m {
        for j in 0..n {
            e[(j, i)] = g[(i, j)];
        }
        e[(n, i)] = h[i];
    }
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let u = nnls(&e, &f);
    let r = &e * &u - &f;
    if r.norm() <= 1e-10 {
        return Ldp::Infeasible(u);
    }
    Ldp::Feasible(DVector::from_iterator(n, (0..n).map(|j| -r[j] / r[n])))
}
