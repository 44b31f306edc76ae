//! Reference implementations shared by the integration tests. Nothing here
//! calls into the stencil or the CG solver of the library.
#![allow(dead_code, clippy::needless_range_loop)]

use schrolab::grid::Grid;

/// Dense `−Δ_h + diag(w)` assembled from node coordinates alone: two nodes
/// are coupled when they differ by exactly `h` along one axis.
pub fn dense_operator(grid: &Grid, w: &[f64]) -> Vec<Vec<f64>> {
    let n = grid.len();
    let h = grid.h();
    let centre = 2.0 * grid.dim() as f64 / (h * h);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = centre + w[i];
        let p = grid.node(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let q = grid.node(j);
            let (dx, dy) = ((p[0] - q[0]).abs(), (p[1] - q[1]).abs());
            let unit = |d: f64| (d - h).abs() < 1e-9 * h;
            if (unit(dx) && dy < 1e-9 * h) || (unit(dy) && dx < 1e-9 * h) {
                a[i][j] = -1.0 / (h * h);
            }
        }
    }
    a
}

/// LU factorisation with partial pivoting.
pub struct Lu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(mut a: Vec<Vec<f64>>) -> Self {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap();
            a.swap(k, p);
            perm.swap(k, p);
            let pivot = a[k][k];
            assert!(pivot.abs() > 0.0, "singular matrix");
            for i in k + 1..n {
                let m = a[i][k] / pivot;
                a[i][k] = m;
                for j in k + 1..n {
                    a[i][j] -= m * a[k][j];
                }
            }
        }
        Lu { lu: a, perm }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[i][j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i][j] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        y
    }
}

pub fn dense_solve(grid: &Grid, w: &[f64], b: &[f64]) -> Vec<f64> {
    Lu::new(dense_operator(grid, w)).solve(b)
}

/// Column `j` of the inverse scaled by `1/h^N`: the discrete Green's
/// function with a unit atom at node `j`.
pub fn dense_green(grid: &Grid, w: &[f64], j: usize) -> Vec<f64> {
    let mut e = vec![0.0; grid.len()];
    e[j] = 1.0 / grid.cell_volume();
    dense_solve(grid, w, &e)
}

/// Torsion function of the Laplacian on `(−a, a)²` at the centre, from the
/// double sine series.
pub fn square_torsion_centre(a: f64, terms: usize) -> f64 {
    let side = 2.0 * a;
    let pi = std::f64::consts::PI;
    let mut sum = 0.0;
    for m in (1..=terms).step_by(2) {
        for n in (1..=terms).step_by(2) {
            let (mf, nf) = (m as f64, n as f64);
            let sign = if ((m + n) / 2) % 2 == 1 { 1.0 } else { -1.0 };
            let coeff = 16.0 / (pi * pi * mf * nf) / (pi * pi * (mf * mf + nf * nf) / (side * side));
            sum += sign * coeff;
        }
    }
    sum
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
