//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dvsound::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `cos(theta + m pi / n)` for `m = 0..n`.
pub fn cosines(theta: f64, n: usize) -> Vec<f64> {
    (0..n).map(|m| (theta + m as f64 * PI / n as f64).cos()).collect()
}

/// Left side of the dispersion relation evaluated term by term.
pub fn relation(lambda: Complex64, h_b: f64, theta: f64, n: usize) -> Complex64 {
    let z = c(0.0, h_b);
    let sum: Complex64 = cosines(theta, n)
        .iter()
        .map(|cm| 1.0 / (1.0 + z - 2.0 * lambda * lambda * cm * cm))
        .sum();
    1.0 - z / n as f64 * sum
}

/// Roots in `u` of the `n = 2` quadratic `a u^2 + b u + c`.
///
/// The larger root comes from the textbook formula with the sign that avoids
/// cancellation; the smaller one from the product of the roots, `c / a`.
pub fn quadratic_n2(h_b: f64, theta: f64) -> Vec<Complex64> {
    let a = (2.0 * theta).sin().powi(2);
    let b = c(-2.0, -h_b);
    let cc = c(1.0, h_b);
    if a < 1e-12 {
        return vec![-cc / b];
    }
    let d = (b * b - 4.0 * a * cc).sqrt();
    let plus = (-b + d) / (2.0 * a);
    let minus = (-b - d) / (2.0 * a);
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    vec![big, cc / a / big]
}

/// Square root with non-negative real part.
pub fn forward_sqrt(u: Complex64) -> Complex64 {
    let r = u.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

/// Largest distance between matched members of two equal-size root lists,
/// relative to `max(1, |want|)`, minimized over all pairings.
pub fn root_set_distance(got: &[Complex64], want: &[Complex64]) -> f64 {
    assert_eq!(got.len(), want.len(), "root counts differ: {got:?} vs {want:?}");
    fn permute(rest: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == rest.len() {
            out.push(rest.clone());
            return;
        }
        for i in k..rest.len() {
            rest.swap(k, i);
            permute(rest, k + 1, out);
            rest.swap(k, i);
        }
    }
    let mut perms = Vec::new();
    permute(&mut (0..got.len()).collect(), 0, &mut perms);
    perms
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(i, &j)| (got[j] - want[i]).norm() / want[i].norm().max(1.0))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
