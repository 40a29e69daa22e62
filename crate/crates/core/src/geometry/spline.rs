//! Periodic cubic splines on a uniform grid over the unit parameter circle.

use super::Vec3;

/// Interpolating periodic cubic spline through `N` points at `t_i = i/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    points: Vec<Vec3>,
    second: Vec<Vec3>,
}

impl PeriodicSpline {
    /// Needs at least 4 points.
    pub fn new(points: Vec<Vec3>) -> Self {
        let n = points.len();
        assert!(n >= 4, "periodic spline needs at least 4 points");
        let h = 1.0 / n as f64;
        let rhs: Vec<Vec3> = (0..n)
            .map(|i| {
                let prev = points[(i + n - 1) % n];
                let next = points[(i + 1) % n];
                (next - 2.0 * points[i] + prev) * (6.0 / (h * h))
            })
            .collect();
        let second = solve_cyclic_141(&rhs);
        PeriodicSpline { points, second }
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Value and first three derivatives at `t` (wrapped into `[0,1)`).
    pub fn jet(&self, t: f64) -> [Vec3; 4] {
        let n = self.points.len();
        let h = 1.0 / n as f64;
        let x = t.rem_euclid(1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let j = (i + 1) % n;
        let b = (x - i as f64) * h;
        let a = h - b;
        let (yi, yj) = (self.points[i], self.points[j]);
        let (mi, mj) = (self.second[i], self.second[j]);
        let ci = yi / h - mi * (h / 6.0);
        let cj = yj / h - mj * (h / 6.0);
        let value = mi * (a * a * a / (6.0 * h)) + mj * (b * b * b / (6.0 * h)) + ci * a + cj * b;
        let d1 = -mi * (a * a / (2.0 * h)) + mj * (b * b / (2.0 * h)) - ci + cj;
        let d2 = mi * (a / h) + mj * (b / h);
        let d3 = (mj - mi) / h;
        [value, d1, d2, d3]
    }
}

/// Solves the cyclic system `x[i-1] + 4 x[i] + x[i+1] = r[i]` by
/// Sherman–Morrison on top of the Thomas algorithm.
fn solve_cyclic_141(rhs: &[Vec3]) -> Vec<Vec3> {
    let n = rhs.len();
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;

    let x = solve_tridiagonal_1d1(&diag, rhs);
    let mut u = vec![Vec3::zeros(); n];
    u[0] = Vec3::repeat(gamma);
    u[n - 1] = Vec3::repeat(1.0);
    let z = solve_tridiagonal_1d1(&diag, &u);

    // Each component is independent; z is identical across components.
    let factor = (x[0] + x[n - 1] / gamma).component_div(&(Vec3::repeat(1.0) + z[0] + z[n - 1] / gamma));
    x.iter().zip(&z).map(|(xi, zi)| xi - zi.component_mul(&factor)).collect()
}

fn solve_tridiagonal_1d1(diag: &[f64], rhs: &[Vec3]) -> Vec<Vec3> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Vec3::zeros(); n];
    c[0] = 1.0 / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - c[i - 1];
        c[i] = 1.0 / m;
        d[i] = (rhs[i] - d[i - 1]) / m;
    }
    let mut x = vec![Vec3::zeros(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
