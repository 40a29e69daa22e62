//! Truncated Taylor jets: a value together with its first three derivatives.
//!
//! The analytic curve families are built from sums and products of
//! `sin(ωt + φ)` terms, so carrying jets through the arithmetic gives exact
//! derivatives up to third order without symbolic differentiation.

use std::ops::{Add, Mul};

use super::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; 4]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    /// `sin(ωt + φ)` and its derivatives.
    pub fn sin_linear(omega: f64, phase: f64, t: f64) -> Self {
        let (s, c) = (omega * t + phase).sin_cos();
        Jet([s, omega * c, -omega * omega * s, -omega * omega * omega * c])
    }

    /// `cos(ωt + φ)` and its derivatives.
    pub fn cos_linear(omega: f64, phase: f64, t: f64) -> Self {
        let (s, c) = (omega * t + phase).sin_cos();
        Jet([c, -omega * s, -omega * omega * c, omega * omega * omega * s])
    }

    pub fn scale(self, k: f64) -> Self {
        Jet(self.0.map(|v| v * k))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let (a, b) = (self.0, rhs.0);
        Jet([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl Mul for Jet {
    type Output = Jet;
    // Leibniz rule, truncated at third order.
    fn mul(self, rhs: Jet) -> Jet {
        let (f, g) = (self.0, rhs.0);
        Jet([
            f[0] * g[0],
            f[1] * g[0] + f[0] * g[1],
            f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2],
            f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3],
        ])
    }
}

/// Position and first three derivatives of a vector-valued function.
pub type VecJet = [Vec3; 4];

pub fn vec_jet(x: Jet, y: Jet, z: Jet) -> VecJet {
    std::array::from_fn(|k| Vec3::new(x.0[k], y.0[k], z.0[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn product_rule_matches_finite_differences() {
        let t = 0.31;
        let jet = |t: f64| Jet::cos_linear(3.0, 0.2, t) * Jet::sin_linear(5.0, -0.7, t);
        let j = jet(t);
        for k in 1..4 {
            let lower = |s: f64| jet(s).0[k - 1];
            let approx = fd(lower, t, 1e-5);
            assert!((approx - j.0[k]).abs() < 1e-5 * (1.0 + j.0[k].abs()), "order {k}");
        }
    }
}
