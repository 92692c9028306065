//! The dispersion relation of the 2n-velocity model and its roots.
//!
//! For a plane wave `exp(i(kx - omega t))` the pair averages
//! `D_m = (P_m + P_{m+n}) / 2` satisfy
//! `(1 + i h_b - 2 lambda^2 c_m^2) a_m - (i h_b / n) sum_k a_k = 0`
//! with `c_m = cos[theta + (m-1) pi/n]` and `lambda = k c / (sqrt(2) omega)`.
//! Eliminating the amplitudes gives a polynomial of degree at most `n` in
//! `u = lambda^2`.

mod branch;
mod polynomial;
mod roots;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use branch::{
    acoustic_root, continuation_track, principal_lambda, roots_at, roots_by_branch, select_branch,
    BranchFollower, Track, AMBIGUITY_TOLERANCE, DEFAULT_SEED_H_B, SEED_MIN_H,
};
pub(crate) use branch::{label, validate_line};
pub use polynomial::{assemble_polynomial, closed_form_n2, DispersionPolynomial, TRIM_TOLERANCE};
pub use roots::{polynomial_roots, solve_roots, MAX_ITERATIONS, SOLVER_TOLERANCE};

use crate::error::{Error, Result};
use crate::model::direction_cosines;

/// Residual bound every reported root must satisfy.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
const SINGULAR_RESIDUAL: f64 = 1e-14;
const SINGULAR_MODE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    Acoustic,
    /// Non-acoustic roots, numbered from 1 by descending `lambda_i`.
    Secondary(usize),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Acoustic => f.write_str("acoustic"),
            Branch::Secondary(k) => write!(f, "secondary{k}"),
        }
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "acoustic" {
            return Ok(Branch::Acoustic);
        }
        s.strip_prefix("secondary")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(Branch::Secondary)
            .ok_or_else(|| Error::domain("branch", format!("unknown branch {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchPolicy {
    Acoustic,
    All,
}

impl FromStr for BranchPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acoustic" => Ok(BranchPolicy::Acoustic),
            "all" => Ok(BranchPolicy::All),
            _ => Err(Error::domain("branch", format!("expected acoustic|all, got {s:?}"))),
        }
    }
}

/// One root of the dispersion relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRoot {
    /// `lambda_r + i lambda_i` with `lambda_r >= 0`.
    pub lambda: Complex64,
    pub u: Complex64,
    pub branch: Branch,
    /// Relative backward error of `u` in the cleared-denominator relation.
    pub residual: f64,
}

impl DispersionRoot {
    /// Components of `u` smaller than its rounding-error estimate are set to zero,
    /// so exactly real or imaginary roots come out that way.
    pub fn from_u(u: Complex64, branch: Branch, poly: &DispersionPolynomial) -> Self {
        let floor = 4.0 * f64::EPSILON * (u.norm() + poly.condition(u));
        let snap = |x: f64| if x.abs() <= floor { 0.0 } else { x };
        let u = Complex64::new(snap(u.re), snap(u.im));
        DispersionRoot {
            lambda: principal_lambda(u),
            u,
            branch,
            residual: poly.relative_residual(u),
        }
    }
}

/// Relative amplitudes `a_m` of the pair averages for one root, max-normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeShape {
    pub amplitudes: Vec<Complex64>,
    /// Largest residual among the `n` amplitude equations.
    pub row_residual: f64,
}

impl ModeShape {
    /// Amplitudes of all `2n` number-density perturbations `P_i` for this mode.
    ///
    /// With `B_m = (P_m - P_{m+n}) / 2` eliminated through the odd part of the
    /// kinetic equations, `P_m = a_m (1 + sqrt(2) lambda c_m)` and
    /// `P_{m+n} = a_m (1 - sqrt(2) lambda c_m)`.
    pub fn kinetic_components(&self, lambda: Complex64, theta: f64) -> Vec<Complex64> {
        let n = self.amplitudes.len();
        let cosines = direction_cosines(theta, n);
        let s = std::f64::consts::SQRT_2 * lambda;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        for m in 0..n {
            out[m] = self.amplitudes[m] * (1.0 + s * cosines[m]);
            out[m + n] = self.amplitudes[m] * (1.0 - s * cosines[m]);
        }
        out
    }
}

fn denominators(lambda: Complex64, h_b: f64, theta: f64, n: usize) -> Vec<Complex64> {
    let u = lambda * lambda;
    let one_plus_z = Complex64::new(1.0, h_b);
    direction_cosines(theta, n)
        .into_iter()
        .map(|c| one_plus_z - 2.0 * u * c * c)
        .collect()
}

/// Left side of the reduced dispersion relation
/// `1 - (i h_b / n) sum_m 1 / (1 + i h_b - 2 lambda^2 c_m^2)`.
pub fn residual(lambda: Complex64, h_b: f64, theta: f64, n: usize) -> Result<Complex64> {
    let z = Complex64::new(0.0, h_b);
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, d) in denominators(lambda, h_b, theta, n).into_iter().enumerate() {
        if d.norm() < SINGULAR_RESIDUAL {
            return Err(Error::SingularDenominator {
                index: m + 1,
                magnitude: d.norm(),
            });
        }
        sum += d.inv();
    }
    Ok(1.0 - z / n as f64 * sum)
}

/// Amplitudes `a_m proportional to 1 / (1 + i h_b - 2 lambda^2 c_m^2)` for a verified root.
pub fn mode_shape(lambda: Complex64, h_b: f64, theta: f64, n: usize) -> Result<ModeShape> {
    let d = denominators(lambda, h_b, theta, n);
    for (m, dm) in d.iter().enumerate() {
        if dm.norm() < SINGULAR_MODE {
            return Err(Error::SingularDenominator {
                index: m + 1,
                magnitude: dm.norm(),
            });
        }
    }
    let r = residual(lambda, h_b, theta, n)?.norm();
    if !(r < RESIDUAL_TOLERANCE) {
        return Err(Error::NotARoot {
            lambda: lambda.to_string(),
            residual: r,
        });
    }
    let raw: Vec<Complex64> = d.iter().map(|dm| dm.inv()).collect();
    let pivot = *raw
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("n >= 1");
    let amplitudes: Vec<Complex64> = raw.iter().map(|a| a / pivot).collect();

    let z = Complex64::new(0.0, h_b);
    let total: Complex64 = amplitudes.iter().sum();
    let row_residual = d
        .iter()
        .zip(&amplitudes)
        .map(|(dm, am)| (dm * am - z / n as f64 * total).norm())
        .fold(0.0, f64::max);
    Ok(ModeShape {
        amplitudes,
        row_residual,
    })
}
