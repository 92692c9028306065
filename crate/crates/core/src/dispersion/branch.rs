//! Branch identification by continuation in `h_b`.
//!
//! The acoustic branch is the root that tends to `u = 1` as `h_b` grows.
//! It is followed downward in `log h_b`, stepping adaptively so that the
//! nearest root at the new point is always clearly separated from the rest.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::{assemble_polynomial, horner_with_derivative, DispersionPolynomial};
use super::roots::solve_roots;
use super::{Branch, BranchPolicy, DispersionRoot};
use crate::error::{Error, Result};

/// Smallest `h` accepted as the seed of a continuation line.
pub const SEED_MIN_H: f64 = 1e4;
/// Internal seed used when the caller starts below [`SEED_MIN_H`].
pub const DEFAULT_SEED_H_B: f64 = 1e6;
/// Roots closer than this (relative to `max(1, |u|)`) cannot be told apart.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-8;

const MAX_LOG_STEP: f64 = std::f64::consts::LN_10 / 16.0;
/// Below this step size two roots are treated as crossing and the follower jumps past them.
pub const CROSSING_LOG_STEP: f64 = 1e-6;
/// Accept a continuation step only when the nearest root is this much closer than the runner-up.
const SEPARATION_RATIO: f64 = 0.25;
/// Root pairs closer than this get a refined separation estimate.
const NEAR_PAIR: f64 = 1e-4;

/// Square root with `Re >= 0`, and `Im >= 0` when `Re == 0`.
pub fn principal_lambda(u: Complex64) -> Complex64 {
    let lambda = u.sqrt();
    if lambda.re < 0.0 || (lambda.re == 0.0 && lambda.im < 0.0) {
        -lambda
    } else {
        lambda
    }
}

/// Polynomial and roots at `h_b`, retrying once with a perturbed `h_b` when the solver fails.
pub fn roots_at(h_b: f64, theta: f64, n: usize) -> Result<(DispersionPolynomial, Vec<Complex64>)> {
    let poly = assemble_polynomial(h_b, theta, n);
    match solve_roots(&poly) {
        Ok(roots) => Ok((poly, roots)),
        Err(Error::NoConvergence { .. }) => {
            let nudged = h_b * (1.0 + 4.0 * f64::EPSILON);
            let poly = assemble_polynomial(nudged, theta, n);
            let roots = solve_roots(&poly)?;
            Ok((poly, roots))
        }
        Err(e) => Err(e),
    }
}

fn nearest(roots: &[Complex64], target: Complex64) -> (usize, f64, f64) {
    let mut best = (0, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (k, u) in roots.iter().enumerate() {
        let d = (u - target).norm();
        if d < best.1 {
            second = best.1;
            best = (k, d);
        } else if d < second {
            second = d;
        }
    }
    (best.0, best.1, second)
}

fn check_separation(
    poly: &DispersionPolynomial,
    roots: &[Complex64],
    chosen: usize,
    h_b: f64,
) -> Result<()> {
    let u = roots[chosen];
    let scale = u.norm().max(1.0);
    let Some((other, closest)) = roots
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != chosen)
        .map(|(k, v)| (k, (v - u).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return Ok(());
    };
    let separation = if closest < NEAR_PAIR * scale {
        closest.min(pair_separation(poly, u, roots[other]))
    } else {
        closest
    };
    if separation < AMBIGUITY_TOLERANCE * scale {
        return Err(Error::AmbiguousBranch { h_b, separation });
    }
    Ok(())
}

/// Separation of a close root pair estimated from the critical point between them.
///
/// Near a double root `p(u) ~ p(m) + p''(m) (u - m)^2 / 2`, so the pair is
/// `2 sqrt(|2 p(m) / p''(m)|)` apart. Computed roots of a double root are only
/// accurate to about `sqrt(eps)`, while `m` is well conditioned. A critical
/// point whose value is at rounding level is a double root to working
/// precision and yields separation zero.
fn pair_separation(poly: &DispersionPolynomial, a: Complex64, b: Complex64) -> f64 {
    let coeffs = &poly.coeffs;
    let degree = coeffs.len() - 1;
    let first: Vec<Complex64> = coeffs[..degree]
        .iter()
        .enumerate()
        .map(|(k, c)| c * (degree - k) as f64)
        .collect();
    let mut m = 0.5 * (a + b);
    for _ in 0..8 {
        let (dp, ddp) = horner_with_derivative(&first, m);
        if ddp.norm() == 0.0 {
            break;
        }
        let step = dp / ddp;
        if !step.is_finite() {
            break;
        }
        m -= step;
        if step.norm() <= f64::EPSILON * m.norm() {
            break;
        }
    }
    let (_, ddp) = horner_with_derivative(&first, m);
    let rounding = 64.0 * f64::EPSILON * {
        let r = m.norm();
        coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm())
    };
    let value = poly.eval(m).norm();
    if value <= rounding || ddp.norm() == 0.0 {
        return 0.0;
    }
    2.0 * (2.0 * value / ddp.norm()).sqrt()
}

/// One root being followed along a line of fixed `(theta, n)`.
#[derive(Clone, Debug)]
pub struct BranchFollower {
    theta: f64,
    n: usize,
    h_b: f64,
    u: Complex64,
    near_crossings: Vec<f64>,
}

impl BranchFollower {
    /// Seeds the acoustic branch at `h_b` (which should be large) as the root nearest `u = 1`.
    pub fn seed_acoustic(h_b: f64, theta: f64, n: usize) -> Result<Self> {
        let (poly, roots) = roots_at(h_b, theta, n)?;
        let (k, _, _) = nearest(&roots, Complex64::new(1.0, 0.0));
        check_separation(&poly, &roots, k, h_b)?;
        Ok(BranchFollower {
            theta,
            n,
            h_b,
            u: roots[k],
            near_crossings: Vec::new(),
        })
    }

    pub fn from_point(h_b: f64, u: Complex64, theta: f64, n: usize) -> Self {
        BranchFollower {
            theta,
            n,
            h_b,
            u,
            near_crossings: Vec::new(),
        }
    }

    /// Values of `h_b` where the followed root met another root; past such a
    /// point the less damped of the pair is kept.
    pub fn near_crossings(&self) -> &[f64] {
        &self.near_crossings
    }

    pub fn h_b(&self) -> f64 {
        self.h_b
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    /// Moves the followed root to `target_h_b`; returns the polynomial and all roots there
    /// together with the index of the followed one.
    pub fn advance_to(
        &mut self,
        target_h_b: f64,
    ) -> Result<(DispersionPolynomial, Vec<Complex64>, usize)> {
        let end = target_h_b.ln();
        let mut pos = self.h_b.ln();
        let mut step = MAX_LOG_STEP;
        loop {
            let remaining = end - pos;
            let (trial_pos, h_b) = if remaining.abs() <= step {
                (end, target_h_b)
            } else {
                let p = pos + step.copysign(remaining);
                (p, p.exp())
            };
            let (poly, roots) = roots_at(h_b, self.theta, self.n)?;
            let (mut k, d1, d2) = nearest(&roots, self.u);
            let clear = roots.len() == 1 || d1 <= SEPARATION_RATIO * d2;
            if !clear && step > CROSSING_LOG_STEP {
                step *= 0.5;
                continue;
            }
            if !clear {
                // Two roots meet here and the continuation is not unique. Jump past the
                // meeting point and keep the less damped of the two roots that emerge.
                let jump = (MAX_LOG_STEP / 4.0).min(remaining.abs());
                let jump_pos = if jump == remaining.abs() { end } else { pos + jump.copysign(remaining) };
                let jump_h_b = if jump_pos == end { target_h_b } else { jump_pos.exp() };
                let (poly, roots) = roots_at(jump_h_b, self.theta, self.n)?;
                let mut by_distance: Vec<usize> = (0..roots.len()).collect();
                by_distance.sort_by(|&a, &b| (roots[a] - self.u).norm().total_cmp(&(roots[b] - self.u).norm()));
                let j = by_distance
                    .iter()
                    .take(2)
                    .copied()
                    .min_by(|&a, &b| {
                        principal_lambda(roots[a])
                            .im
                            .total_cmp(&principal_lambda(roots[b]).im)
                    })
                    .expect("at least one root");
                self.near_crossings.push(h_b);
                self.accept(jump_h_b, roots[j]);
                pos = jump_pos;
                if jump_pos == end {
                    check_separation(&poly, &roots, j, jump_h_b)?;
                    return Ok((poly, roots, j));
                }
                step = MAX_LOG_STEP / 4.0;
                continue;
            }
            if roots.len() == 1 {
                k = 0;
            }
            self.accept(h_b, roots[k]);
            pos = trial_pos;
            if trial_pos == end {
                check_separation(&poly, &roots, k, h_b)?;
                return Ok((poly, roots, k));
            }
            step = (step * 2.0).min(MAX_LOG_STEP);
        }
    }

    fn accept(&mut self, h_b: f64, u: Complex64) {
        self.h_b = h_b;
        self.u = u;
    }
}

/// A continuation line: acoustic roots over a descending `h` grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Track {
    pub h: Vec<f64>,
    pub roots: Vec<DispersionRoot>,
    /// Branch-crossing diagnostics, e.g. the acoustic root acquiring `lambda_i < 0`.
    pub diagnostics: Vec<String>,
}

/// Follows the acoustic root over `h_grid` (descending, first entry at least [`SEED_MIN_H`]).
pub fn continuation_track(theta: f64, n: usize, blocking: f64, h_grid: &[f64]) -> Result<Track> {
    validate_line(n, blocking)?;
    let first = *h_grid
        .first()
        .ok_or_else(|| Error::domain("h_grid", "must not be empty"))?;
    if first < SEED_MIN_H {
        return Err(Error::domain(
            "h_grid",
            format!("first entry must be at least {SEED_MIN_H}, got {first}"),
        ));
    }
    check_descending(h_grid)?;
    track_from_seed(theta, n, blocking, first * (1.0 + blocking), h_grid)
}

/// Acoustic roots on an arbitrary descending grid, seeded internally at large `h_b`.
fn track_from_seed(
    theta: f64,
    n: usize,
    blocking: f64,
    seed_h_b: f64,
    h_grid: &[f64],
) -> Result<Track> {
    let scale = 1.0 + blocking;
    let mut follower = BranchFollower::seed_acoustic(seed_h_b, theta, n).map_err(|e| e.at_h(seed_h_b / scale))?;
    let mut roots = Vec::with_capacity(h_grid.len());
    let mut diagnostics = Vec::new();
    for &h in h_grid {
        let seen = follower.near_crossings().len();
        let (poly, all, k) = follower.advance_to(h * scale).map_err(|e| e.at_h(h))?;
        for &h_b in &follower.near_crossings()[seen..] {
            diagnostics.push(format!(
                "near-degenerate crossing of the acoustic root near h = {}",
                h_b / scale
            ));
        }
        let root = DispersionRoot::from_u(all[k], Branch::Acoustic, &poly);
        if root.lambda.im < -1e-12 * root.lambda.norm() {
            diagnostics.push(format!(
                "branch crossing at h = {h}: acoustic lambda_i = {:e} < 0",
                root.lambda.im
            ));
        }
        roots.push(root);
    }
    Ok(Track {
        h: h_grid.to_vec(),
        roots,
        diagnostics,
    })
}

/// Labels `roots` (all roots at `h_b`) by branch.
///
/// The acoustic root is located by continuation from [`DEFAULT_SEED_H_B`]
/// (or from `h_b` itself if larger). `All` lists the acoustic root first,
/// then the rest as `Secondary(1..)` by descending `lambda_i`.
pub fn select_branch(
    roots: &[Complex64],
    h_b: f64,
    theta: f64,
    n: usize,
    policy: BranchPolicy,
) -> Result<Vec<DispersionRoot>> {
    if roots.is_empty() {
        return Err(Error::domain("roots", "must not be empty"));
    }
    if !(h_b.is_finite() && h_b > 0.0) {
        return Err(Error::domain("h_b", format!("must be positive, got {h_b}")));
    }
    let mut follower = BranchFollower::seed_acoustic(DEFAULT_SEED_H_B.max(h_b), theta, n)?;
    let (poly, _, _) = follower.advance_to(h_b)?;
    let (k, _, _) = nearest(roots, follower.u());
    check_separation(&poly, roots, k, h_b)?;
    Ok(label(roots, k, &poly, policy))
}

pub(crate) fn label(
    roots: &[Complex64],
    acoustic: usize,
    poly: &DispersionPolynomial,
    policy: BranchPolicy,
) -> Vec<DispersionRoot> {
    let mut out = vec![DispersionRoot::from_u(roots[acoustic], Branch::Acoustic, poly)];
    if policy == BranchPolicy::All {
        let mut rest: Vec<DispersionRoot> = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != acoustic)
            .map(|(_, &u)| DispersionRoot::from_u(u, Branch::Secondary(0), poly))
            .collect();
        rest.sort_by(|a, b| {
            b.lambda
                .im
                .total_cmp(&a.lambda.im)
                .then(b.lambda.re.total_cmp(&a.lambda.re))
        });
        for (i, r) in rest.iter_mut().enumerate() {
            r.branch = Branch::Secondary(i + 1);
        }
        out.extend(rest);
    }
    out
}

/// All roots at `(h_b, theta, n)`, labelled by `policy`.
pub fn roots_by_branch(h_b: f64, theta: f64, n: usize, policy: BranchPolicy) -> Result<Vec<DispersionRoot>> {
    if n < 2 {
        return Err(Error::domain("n", format!("must be at least 2, got {n}")));
    }
    let (_, roots) = roots_at(h_b, theta, n)?;
    select_branch(&roots, h_b, theta, n, policy)
}

/// The acoustic root at `(h_b, theta, n)`.
pub fn acoustic_root(h_b: f64, theta: f64, n: usize) -> Result<DispersionRoot> {
    Ok(roots_by_branch(h_b, theta, n, BranchPolicy::Acoustic)?.remove(0))
}

pub(crate) fn validate_line(n: usize, blocking: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("n", format!("must be at least 2, got {n}")));
    }
    if !(blocking.is_finite() && blocking > -1.0) {
        return Err(Error::domain("B", format!("B must exceed -1, got {blocking}")));
    }
    Ok(())
}

fn check_descending(h_grid: &[f64]) -> Result<()> {
    for w in h_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::domain("h_grid", "must be strictly descending"));
        }
    }
    if let Some(&last) = h_grid.last() {
        if !(last > 0.0 && last.is_finite()) {
            return Err(Error::domain("h_grid", "entries must be positive and finite"));
        }
    }
    Ok(())
}
