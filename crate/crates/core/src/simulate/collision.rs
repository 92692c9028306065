//! Collision terms of the kinetic equations, written for the perturbations
//! `P_i = N_i / N0 - 1` of one grid cell.

use crate::model::ModelConfig;

/// Right-hand side of the collision part of the kinetic equations.
pub trait CollisionOperator: Send + Sync {
    /// Number of velocity components `2n`.
    fn components(&self) -> usize;

    /// Writes `dP_i/dt` due to collisions for one cell.
    fn rate(&self, p: &[f64], out: &mut [f64]);

    /// Largest relaxation rate, used for the explicit stability limit.
    fn stiffness(&self) -> f64;
}

/// Linearized collision term
/// `dP_m/dt = -nu (P_m + P_{m+n}) + (nu / n) sum_k P_k` with `nu = 2 c S N0 (1 + B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearCollision {
    pub n: usize,
    pub nu: f64,
}

impl LinearCollision {
    pub fn new(config: &ModelConfig) -> Self {
        LinearCollision {
            n: config.n,
            nu: 2.0 * config.collision_scale() * (1.0 + config.blocking),
        }
    }
}

impl CollisionOperator for LinearCollision {
    fn components(&self) -> usize {
        2 * self.n
    }

    fn rate(&self, p: &[f64], out: &mut [f64]) {
        let n = self.n;
        let gain = self.nu / n as f64 * p.iter().sum::<f64>();
        for m in 0..n {
            let loss = self.nu * (p[m] + p[m + n]);
            out[m] = gain - loss;
            out[m + n] = gain - loss;
        }
    }

    fn stiffness(&self) -> f64 {
        2.0 * self.nu
    }
}

/// Full collision term with the `(1 + gamma N)` statistics factors.
///
/// A pair `(i, i+n)` scatters into every pair with equal probability `1/n`.
/// With `g_j = (1+P_j)(1+P_{j+n})(1+B(1+P_{j+1}))(1+B(1+P_{j+n+1}))`
/// (indices modulo `2n`) this reads `dP_i/dt = c S N0 [(1/n) sum_j g_j - 2 g_i]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UehlingUhlenbeck {
    pub n: usize,
    /// `c S N0`.
    pub scale: f64,
    /// `B = gamma N0`.
    pub blocking: f64,
}

impl UehlingUhlenbeck {
    pub fn new(config: &ModelConfig) -> Self {
        UehlingUhlenbeck {
            n: config.n,
            scale: config.collision_scale(),
            blocking: config.blocking,
        }
    }

    fn pair_weight(&self, p: &[f64], j: usize) -> f64 {
        let count = 2 * self.n;
        let b = self.blocking;
        (1.0 + p[j])
            * (1.0 + p[(j + self.n) % count])
            * (1.0 + b * (1.0 + p[(j + 1) % count]))
            * (1.0 + b * (1.0 + p[(j + self.n + 1) % count]))
    }
}

impl CollisionOperator for UehlingUhlenbeck {
    fn components(&self) -> usize {
        2 * self.n
    }

    fn rate(&self, p: &[f64], out: &mut [f64]) {
        let count = 2 * self.n;
        for (j, o) in out.iter_mut().enumerate().take(count) {
            *o = self.pair_weight(p, j);
        }
        let mean = out[..count].iter().sum::<f64>() / self.n as f64;
        for o in out.iter_mut().take(count) {
            *o = self.scale * (mean - 2.0 * *o);
        }
    }

    fn stiffness(&self) -> f64 {
        4.0 * self.scale * (1.0 + self.blocking)
    }
}
