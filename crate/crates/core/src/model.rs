//! Parameters of the 2n-velocity gas.
//!
//! A [`ModelConfig`] can be built from physical quantities (speed, cross
//! section, density, frequency, statistics factor) or directly from the
//! reduced pair `(h, B)`. Everything downstream of the dispersion relation
//! only sees `h_b = h (1 + B)`, the orientation and `n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quantum statistics of the particles, selecting the sign of `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
    Boltzmann,
}

impl Statistics {
    pub fn default_gamma(self) -> f64 {
        match self {
            Statistics::Bose => 1.0,
            Statistics::Fermi => -1.0,
            Statistics::Boltzmann => 0.0,
        }
    }

    /// Statistics implied by the sign of the blocking parameter.
    pub fn from_blocking(blocking: f64) -> Self {
        if blocking > 0.0 {
            Statistics::Bose
        } else if blocking < 0.0 {
            Statistics::Fermi
        } else {
            Statistics::Boltzmann
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Half the number of discrete velocities.
    pub n: usize,
    /// Orientation of the first velocity relative to the x axis, radians.
    pub theta: f64,
    /// Pauli-blocking parameter `B = gamma * N0`.
    pub blocking: f64,
    /// Velocity modulus `c`.
    pub speed: f64,
    /// Effective scattering cross section `S`.
    pub cross_section: f64,
    /// Equilibrium number density `N0`.
    pub density: f64,
    /// Angular frequency of the driven wave.
    pub omega: f64,
    /// Statistics factor in the `(1 + gamma N)` terms.
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    /// Rarefaction parameter `4 c S N0 / omega`.
    pub h: f64,
    /// `h (1 + B)`.
    pub h_b: f64,
    /// `1 / h`, proportional to the Knudsen number.
    pub knudsen_proxy: f64,
}

impl ModelConfig {
    /// Builds a configuration from physical parameters; `B` is derived as `gamma * N0`.
    pub fn physical(
        n: usize,
        theta: f64,
        speed: f64,
        cross_section: f64,
        density: f64,
        omega: f64,
        gamma: f64,
    ) -> Result<Self> {
        ModelConfig {
            n,
            theta,
            blocking: gamma * density,
            speed,
            cross_section,
            density,
            omega,
            gamma,
        }
        .validate()
    }

    /// Builds a configuration from `(h, B)` with statistics inferred from the sign of `B`.
    pub fn reduced(n: usize, theta: f64, h: f64, blocking: f64) -> Result<Self> {
        Self::reduced_with(n, theta, h, blocking, Statistics::from_blocking(blocking))
    }

    /// Builds a configuration from `(h, B)` using the default `gamma` of `statistics`.
    ///
    /// The physical scales are fixed to `c = omega = 1`; `N0 = B / gamma`
    /// (or 1 for Boltzmann particles) and `S` is chosen to reproduce `h`.
    pub fn reduced_with(
        n: usize,
        theta: f64,
        h: f64,
        blocking: f64,
        statistics: Statistics,
    ) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::domain("h", format!("must be positive and finite, got {h}")));
        }
        if !blocking.is_finite() {
            return Err(Error::domain("B", "must be finite"));
        }
        let gamma = statistics.default_gamma();
        let density = if gamma == 0.0 {
            if blocking != 0.0 {
                return Err(Error::domain(
                    "B",
                    format!("Boltzmann statistics require B = 0, got {blocking}"),
                ));
            }
            1.0
        } else {
            blocking / gamma
        };
        if density <= 0.0 {
            return Err(Error::domain(
                "B",
                format!("{statistics:?} statistics require B with the sign of gamma = {gamma}, got {blocking}"),
            ));
        }
        let (cross_section, omega) = exact_scales(h, density);
        ModelConfig {
            n,
            theta,
            blocking,
            speed: 1.0,
            cross_section,
            density,
            omega,
            gamma,
        }
        .validate()
    }

    /// Checks every field and reduces `theta` to `[0, pi/n)`.
    pub fn validate(mut self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::domain("n", format!("must be at least 2, got {}", self.n)));
        }
        for (field, value) in [
            ("c", self.speed),
            ("S", self.cross_section),
            ("N0", self.density),
            ("omega", self.omega),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(field, format!("must be positive and finite, got {value}")));
            }
        }
        if !self.gamma.is_finite() {
            return Err(Error::domain("gamma", "must be finite"));
        }
        if !self.blocking.is_finite() || self.blocking <= -1.0 {
            return Err(Error::domain(
                "B",
                format!("B must exceed -1, got {}", self.blocking),
            ));
        }
        let implied = self.gamma * self.density;
        if (self.blocking - implied).abs() > 1e-12 * self.blocking.abs().max(1.0) {
            return Err(Error::domain(
                "B",
                format!(
                    "B = {} is inconsistent with gamma * N0 = {implied}",
                    self.blocking
                ),
            ));
        }
        self.theta = normalize_theta(self.theta, self.n)?;
        Ok(self)
    }

    pub fn reduced_params(&self) -> ReducedParams {
        let h = 4.0 * self.speed * self.cross_section * self.density / self.omega;
        ReducedParams {
            h,
            h_b: h * (1.0 + self.blocking),
            knudsen_proxy: 1.0 / h,
        }
    }

    pub fn h_b(&self) -> f64 {
        self.reduced_params().h_b
    }

    /// `c S N0`, the prefactor of the collision terms.
    pub fn collision_scale(&self) -> f64 {
        self.speed * self.cross_section * self.density
    }
}

/// `(S, omega)` with `c = 1` such that `4 c S N0 / omega` evaluates to exactly `h`.
///
/// Starts from `S = h / (4 N0)`, `omega = 1` and searches a few ulps around
/// both, so configurations built from `h` report that same `h` bit for bit.
fn exact_scales(h: f64, density: f64) -> (f64, f64) {
    fn step(x: f64, k: i32) -> f64 {
        (0..k.unsigned_abs()).fold(x, |y, _| if k > 0 { y.next_up() } else { y.next_down() })
    }
    let s0 = h / (4.0 * density);
    let mut offsets: Vec<(i32, i32)> = (-3..=3).flat_map(|a| (-3..=3).map(move |b| (a, b))).collect();
    offsets.sort_by_key(|&(a, b)| (b.abs(), a.abs(), a, b));
    offsets
        .into_iter()
        .map(|(a, b)| (step(s0, a), step(1.0, b)))
        .find(|&(s, omega)| 4.0 * s * density / omega == h)
        .unwrap_or((s0, 1.0))
}

/// Reduces an orientation to `[0, pi/n)`; only `cos^2(theta + k pi/n)` enters the model.
pub fn normalize_theta(theta: f64, n: usize) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::domain("theta", "must be finite"));
    }
    if n == 0 {
        return Err(Error::domain("n", "must be at least 2, got 0"));
    }
    let period = PI / n as f64;
    let reduced = theta.rem_euclid(period);
    Ok(if reduced >= period { 0.0 } else { reduced })
}

/// Direction cosines `cos[theta + (m-1) pi/n]` for `m = 1..n`.
pub fn direction_cosines(theta: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|m| (theta + m as f64 * PI / n as f64).cos())
        .collect()
}
