//! Simultaneous (Aberth-Ehrlich) iteration for all roots of a complex polynomial.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::polynomial::{horner_with_derivative, relative_residual, trim_leading, DispersionPolynomial};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
/// Target relative backward error for every returned root.
pub const SOLVER_TOLERANCE: f64 = 1e-12;
const POLISH_STEPS: usize = 3;

/// All roots of the dispersion polynomial, with multiplicity.
pub fn solve_roots(poly: &DispersionPolynomial) -> Result<Vec<Complex64>> {
    polynomial_roots(&poly.coeffs)
}

/// All roots of the polynomial with the given coefficients (highest degree first).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut monic = coeffs.to_vec();
    trim_leading(&mut monic);
    let degree = monic.len().saturating_sub(1);
    if degree == 0 || monic[0].norm() == 0.0 {
        return Err(Error::DegreeTooLow { degree: 0 });
    }
    let lead = monic[0];
    for c in monic.iter_mut() {
        *c /= lead;
    }
    if degree == 1 {
        return Ok(vec![-monic[1]]);
    }

    let radius = 1.0 + monic[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / degree as f64 + 0.4))
        .collect();

    // A root is frozen once its backward error is at rounding level and its
    // steps have stopped shrinking.
    let mut done = vec![false; degree];
    let mut last_step = vec![f64::INFINITY; degree];
    for _ in 0..MAX_ITERATIONS {
        let mut converged = true;
        for k in 0..degree {
            if done[k] {
                continue;
            }
            let (p, dp) = horner_with_derivative(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = newton / (1.0 - newton * repulsion);
            if !step.is_finite() {
                continue;
            }
            if step.norm() >= last_step[k] && relative_residual(&monic, z[k]) < 8.0 * f64::EPSILON {
                done[k] = true;
                continue;
            }
            last_step[k] = step.norm();
            z[k] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }

    for root in z.iter_mut() {
        polish(&monic, root);
    }
    let worst = z
        .iter()
        .map(|&u| relative_residual(&monic, u))
        .fold(0.0, f64::max);
    // An unconverged iteration is still accepted when polishing met the target.
    if !(worst < SOLVER_TOLERANCE) {
        return Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
        });
    }
    Ok(z)
}

fn polish(coeffs: &[Complex64], root: &mut Complex64) {
    for _ in 0..POLISH_STEPS {
        let (p, dp) = horner_with_derivative(coeffs, *root);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            return;
        }
        let candidate = *root - p / dp;
        if !candidate.is_finite() {
            return;
        }
        if relative_residual(coeffs, candidate) <= relative_residual(coeffs, *root) {
            *root = candidate;
        } else {
            return;
        }
    }
}
