use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::direction_cosines;

/// Squared direction cosines below this are treated as zero.
///
/// The leading coefficient of the polynomial is `prod_m (-2 c_m^2)`, so this
/// is what decides whether the degree drops; the remaining roots move by a
/// relative amount of order `c_m^2` when a cosine is zeroed.
pub const TRIM_TOLERANCE: f64 = 1e-13;

/// The dispersion relation with denominators cleared, as a polynomial in `u = lambda^2`.
///
/// For `d_m = 1 + i h_b - 2 u cos^2[theta + (m-1) pi/n]` this is
/// `prod_m d_m - (i h_b / n) sum_m prod_{j != m} d_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionPolynomial {
    /// Monic coefficients, highest degree first.
    pub coeffs: Vec<Complex64>,
    /// Degree before trimming; always `n`.
    pub full_degree: usize,
    pub h_b: f64,
    pub theta: f64,
    pub n: usize,
}

impl DispersionPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Number of roots lost to infinity by a vanishing leading coefficient.
    pub fn roots_at_infinity(&self) -> usize {
        self.full_degree - self.degree()
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        horner(&self.coeffs, u)
    }

    /// `|p(u)| / sum_k |a_k| |u|^k`: the relative backward error of `u` as a root.
    pub fn relative_residual(&self, u: Complex64) -> f64 {
        relative_residual(&self.coeffs, u)
    }

    /// `sum_k |a_k| |u|^k / |p'(u)|`: how far a root moves per unit relative
    /// perturbation of the coefficients. Zero for a degree-0 polynomial.
    pub fn condition(&self, u: Complex64) -> f64 {
        let r = u.norm();
        let scale = self.coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm());
        let (_, dp) = horner_with_derivative(&self.coeffs, u);
        if scale == 0.0 {
            0.0
        } else {
            scale / dp.norm()
        }
    }
}

/// Builds the cleared-denominator dispersion polynomial for `(h_b, theta, n)`.
pub fn assemble_polynomial(h_b: f64, theta: f64, n: usize) -> DispersionPolynomial {
    let z = Complex64::new(0.0, h_b);
    let one_plus_z = Complex64::new(1.0, h_b);
    // Ascending-order linear factors d_m(u) = (1 + z) - 2 c_m^2 u.
    let factors: Vec<[Complex64; 2]> = direction_cosines(theta, n)
        .into_iter()
        .map(|c| [one_plus_z, Complex64::new(-2.0 * squared_cosine(c), 0.0)])
        .collect();

    let mut product = vec![Complex64::new(1.0, 0.0)];
    for f in &factors {
        product = mul_linear(&product, f);
    }
    let mut cofactor_sum = vec![Complex64::new(0.0, 0.0); n];
    for skip in 0..n {
        let mut partial = vec![Complex64::new(1.0, 0.0)];
        for (j, f) in factors.iter().enumerate() {
            if j != skip {
                partial = mul_linear(&partial, f);
            }
        }
        for (acc, p) in cofactor_sum.iter_mut().zip(&partial) {
            *acc += p;
        }
    }
    let weight = z / n as f64;
    let mut ascending = product;
    for (k, s) in cofactor_sum.iter().enumerate() {
        ascending[k] -= weight * s;
    }

    let mut coeffs: Vec<Complex64> = ascending.into_iter().rev().collect();
    trim_leading(&mut coeffs);
    let lead = coeffs[0];
    for c in coeffs.iter_mut() {
        *c /= lead;
    }
    DispersionPolynomial {
        coeffs,
        full_degree: n,
        h_b,
        theta,
        n,
    }
}

/// Roots in `u` of `sin^2(2 theta) u^2 - (2 + i h_b) u + (1 + i h_b)`, the `n = 2` relation.
///
/// Solved by the cancellation-free quadratic formula; when the leading
/// coefficient vanishes (a squared cosine below [`TRIM_TOLERANCE`]) the single
/// finite root is returned.
pub fn closed_form_n2(h_b: f64, theta: f64) -> Vec<Complex64> {
    let cosines = direction_cosines(theta, 2);
    let b = Complex64::new(-2.0, -h_b);
    let c = Complex64::new(1.0, h_b);
    if cosines.iter().any(|&cm| squared_cosine(cm) == 0.0) {
        return vec![-c / b];
    }
    let a = Complex64::new((2.0 * theta).sin().powi(2), 0.0);
    let disc = (b * b - 4.0 * a * c).sqrt();
    let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc);
    vec![q / a, c / q]
}

pub(crate) fn horner(coeffs: &[Complex64], u: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
}

/// Value and derivative by Horner's scheme.
pub(crate) fn horner_with_derivative(coeffs: &[Complex64], u: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * u + p;
        p = p * u + c;
    }
    (p, dp)
}

pub(crate) fn relative_residual(coeffs: &[Complex64], u: Complex64) -> f64 {
    let r = u.norm();
    let scale = coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm());
    if scale == 0.0 {
        return 0.0;
    }
    horner(coeffs, u).norm() / scale
}

/// Drops leading coefficients that are exactly zero.
pub(crate) fn trim_leading(coeffs: &mut Vec<Complex64>) {
    let keep_from = coeffs
        .iter()
        .position(|c| c.norm() != 0.0)
        .unwrap_or(coeffs.len().saturating_sub(1));
    coeffs.drain(..keep_from);
}

fn squared_cosine(c: f64) -> f64 {
    let c2 = c * c;
    if c2 < TRIM_TOLERANCE {
        0.0
    } else {
        c2
    }
}

fn mul_linear(poly: &[Complex64], factor: &[Complex64; 2]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (k, &p) in poly.iter().enumerate() {
        out[k] += p * factor[0];
        out[k + 1] += p * factor[1];
    }
    out
}
