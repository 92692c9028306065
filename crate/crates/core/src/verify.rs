//! Cross-checks of the numerical paths against independent oracles.
//!
//! Every check is deterministic: random cases come from a seeded generator
//! and the report contains no timings.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{find_hmax, sweep, theta_grid, theta_scan, log_grid};
use crate::dispersion::{
    acoustic_root, assemble_polynomial, closed_form_n2, solve_roots, Branch, BranchPolicy,
};
use crate::error::Result;
use crate::model::ModelConfig;
use crate::output::{write_table, Format};
use crate::simulate::{
    build_lattice, run_forced, Boundary, ForcingOptions, Mode, Scheme, Stepper, WaveField,
};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Greatest distance from each of `want` to its nearest unused entry of
/// `got`, relative to `max(1, |want|)`; infinite when the counts differ.
pub fn multiset_distance(got: &[Complex64], want: &[Complex64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; got.len()];
    let mut worst: f64 = 0.0;
    for w in want {
        let best = (0..got.len())
            .filter(|&k| !used[k])
            .min_by(|&a, &b| (got[a] - w).norm().total_cmp(&(got[b] - w).norm()))
            .expect("equal lengths");
        used[best] = true;
        worst = worst.max((got[best] - w).norm() / w.norm().max(1.0));
    }
    worst
}

fn check(id: usize, name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Acoustic root at `theta = pi/4`, `n = 2` equals 1.
pub fn quarter_pi_identity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for b in [-0.5, 0.0, 0.5] {
        for h in [0.1, 1.0, 10.0] {
            let root = acoustic_root(h * (1.0 + b), FRAC_PI_4, 2)?;
            worst = worst.max((root.lambda - 1.0).norm());
        }
    }
    Ok((worst < 1e-10, format!("max |lambda - 1| = {worst:.3e}")))
}

/// General solver against the closed-form quadratic, plus limits.
pub fn closed_form_oracle(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let h_b = 10f64.powf(rng.gen_range(-3.0..3.0));
        let theta = rng.gen_range(0.0..PI / 2.0);
        let got = solve_roots(&assemble_polynomial(h_b, theta, 2))?;
        worst = worst.max(multiset_distance(&got, &closed_form_n2(h_b, theta)));
    }
    let mut exact: f64 = 0.0;
    for h_b in [1e-3, 0.1, 1.0, 7.0, 1e3] {
        let z = Complex64::new(0.0, h_b);
        let root = acoustic_root(h_b, 0.0, 2)?;
        exact = exact.max((root.u - (1.0 + z) / (2.0 + z)).norm());
    }
    let high = (acoustic_root(1e4, 0.0, 2)?.lambda - 1.0).norm();
    let low = (acoustic_root(1e-6, 0.0, 2)?.lambda - std::f64::consts::FRAC_1_SQRT_2).norm();
    let passed = worst < 1e-9 && exact < 1e-14 && high < 1e-3 && low < 1e-3;
    Ok((
        passed,
        format!(
            "1000 cases max rel diff {worst:.3e}; theta=0 {exact:.3e}; |lambda(1e4)-1| {high:.3e}; |lambda(1e-6)-1/sqrt2| {low:.3e}"
        ),
    ))
}

/// The attenuation peak is the same for all `B` once `h` is mapped to `h_b`.
pub fn peak_invariance() -> Result<(bool, String)> {
    let mut spread_value: f64 = 0.0;
    let mut spread_h: f64 = 0.0;
    for theta in [0.0, FRAC_PI_8] {
        let mut values = Vec::new();
        let mut hbs = Vec::new();
        for b in [-0.5, 0.0, 0.3, 0.7] {
            let p = find_hmax(theta, b, 2, Branch::Acoustic, (1e-2, 1e2))?;
            values.push(p.lambda_i_max);
            hbs.push(p.h_max * (1.0 + b));
        }
        let (vmin, vmax) = min_max(&values);
        let (hmin, hmax) = min_max(&hbs);
        spread_value = spread_value.max(vmax - vmin);
        spread_h = spread_h.max((hmax - hmin) / hmin);
    }
    Ok((
        spread_value < 1e-6 && spread_h < 1e-3,
        format!("lambda_i_max spread {spread_value:.3e}; h_max (1+B) rel spread {spread_h:.3e}"),
    ))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

/// Peak location for `theta = 0`, `n = 2`, `B = 0`.
pub fn peak_location() -> Result<(bool, String)> {
    let p = find_hmax(0.0, 0.0, 2, Branch::Acoustic, (1e-2, 1e2))?;
    Ok((
        (p.h_max - 1.69).abs() <= 0.05 && (p.lambda_i_max - 0.1443).abs() <= 5e-4,
        format!("h_max = {:.6}, lambda_i_max = {:.7}", p.h_max, p.lambda_i_max),
    ))
}

/// Relative errors `(lambda_r, lambda_i)` of the simulated wave against the acoustic root.
pub fn simulated_error(theta: f64, h: f64, b: f64, ppw: usize) -> Result<(f64, f64, Complex64)> {
    let cfg = ModelConfig::reduced(2, theta, h, b)?;
    let lambda = acoustic_root(cfg.h_b(), cfg.theta, 2)?.lambda;
    let options = ForcingOptions {
        points_per_wavelength: ppw,
        ..ForcingOptions::default()
    };
    let fit = run_forced(&cfg, &options)?.fit()?;
    let m = fit.lambda_meas;
    Ok((
        (m.re / lambda.re - 1.0).abs(),
        (m.im / lambda.im - 1.0).abs(),
        m - lambda,
    ))
}

/// Driven runs against the dispersion root at two parameter points.
pub fn simulator_cross_check() -> Result<(bool, String)> {
    let mut passed = true;
    let mut detail = String::new();
    for (theta, h, b) in [(0.0, 1.0, 0.0), (FRAC_PI_8, 2.0, 0.5)] {
        let (er, ei, _) = simulated_error(theta, h, b, 40)?;
        passed &= er < 0.03 && ei < 0.05;
        let _ = write!(detail, "(theta={theta:.4}, h={h}, B={b}): err_r {er:.2e} err_i {ei:.2e}; ");
    }
    Ok((passed, detail.trim_end_matches("; ").to_owned()))
}

fn random_field(cfg: &ModelConfig, rng: &mut ChaCha8Rng, cells: usize, dx: f64, amplitude: f64) -> Result<WaveField> {
    let p = (0..2 * cfg.n)
        .map(|_| (0..cells).map(|_| amplitude * rng.gen_range(-1.0..1.0)).collect())
        .collect();
    WaveField::from_components(cfg, p, dx, Boundary::Periodic)
}

/// Independent reference for one `gamma = 0` step on a periodic grid.
///
/// Works on the number densities `N_i` themselves, with the collision term
/// assembled from a rate tensor over ordered velocity pairs: a head-on pair
/// `(i, j)` with relative speed `|U_i - U_j|` scatters into each ordered
/// head-on pair `(k, l)` at rate `S |U_i - U_j| / (2n)`. The splitting and
/// the time integrators match the default scheme.
pub fn boltzmann_reference_step(field: &WaveField, dt: f64) -> Vec<Vec<f64>> {
    let cfg = &field.config;
    let n = cfg.n;
    let count = 2 * n;
    let angle = |i: usize| cfg.theta + i as f64 * PI / n as f64;
    let velocity: Vec<(f64, f64)> = (0..count)
        .map(|i| (cfg.speed * angle(i).cos(), cfg.speed * angle(i).sin()))
        .collect();
    let head_on = |i: usize, j: usize| {
        let (a, b) = (velocity[i], velocity[j]);
        ((a.0 + b.0).powi(2) + (a.1 + b.1).powi(2)).sqrt() < 1e-9 * cfg.speed
    };
    let mut rate = vec![vec![0.0; count]; count];
    for i in 0..count {
        for j in 0..count {
            if head_on(i, j) {
                let (a, b) = (velocity[i], velocity[j]);
                rate[i][j] = cfg.cross_section * ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
                    / count as f64;
            }
        }
    }
    let rhs = |nd: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; count];
        for i in 0..count {
            for j in 0..count {
                for k in 0..count {
                    for l in 0..count {
                        if rate[i][j] == 0.0 || rate[k][l] == 0.0 {
                            continue;
                        }
                        // (k, l) -> (i, j) gains, (i, j) -> (k, l) loses.
                        out[i] += rate[k][l] * nd[k] * nd[l] - rate[i][j] * nd[i] * nd[j];
                    }
                }
            }
        }
        out
    };
    let heun = |nd: &mut [f64], h: f64| {
        let k1 = rhs(nd);
        let stage: Vec<f64> = nd.iter().zip(&k1).map(|(x, k)| x + h * k).collect();
        let k2 = rhs(&stage);
        for i in 0..count {
            nd[i] += 0.5 * h * (k1[i] + k2[i]);
        }
    };
    let cells = field.cells();
    let mut nd: Vec<Vec<f64>> = (0..cells)
        .map(|j| (0..count).map(|i| cfg.density * (1.0 + field.p[i][j])).collect())
        .collect();
    for cell in nd.iter_mut() {
        heun(cell, 0.5 * dt);
    }
    let lattice = build_lattice(cfg);
    let mut moved = nd.clone();
    for i in 0..count {
        let s = lattice.x_speeds[i] * dt / field.dx;
        for j in 0..cells {
            let l = nd[(j + cells - 1) % cells][i];
            let c = nd[j][i];
            let r = nd[(j + 1) % cells][i];
            moved[j][i] = c - 0.5 * s * (r - l) + 0.5 * s * s * (r - 2.0 * c + l);
        }
    }
    for cell in moved.iter_mut() {
        heun(cell, 0.5 * dt);
    }
    (0..count)
        .map(|i| (0..cells).map(|j| moved[j][i] / cfg.density - 1.0).collect())
        .collect()
}

/// Mass and momentum over 1000 unforced periodic steps, and the `gamma = 0` reference.
pub fn conservation(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let cfg = ModelConfig::reduced(2, 0.3, 1.5, 0.5)?;
    let dx = 0.1;
    let dt = 0.05;
    let mut field = random_field(&cfg, &mut rng, 64, dx, 0.05)?;
    let stepper = Stepper::new(&cfg, Mode::Nonlinear, Scheme::LaxWendroff, dx, dt)?;
    let lattice = build_lattice(&cfg);
    let momentum_scale = |f: &WaveField| {
        let s: f64 = f
            .p
            .iter()
            .zip(&lattice.x_speeds)
            .map(|(c, u)| u.abs() * c.iter().map(|p| 1.0 + p).sum::<f64>())
            .sum();
        cfg.density * f.dx * s
    };
    let (m0, q0, scale) = (field.total_mass(), field.total_momentum(), momentum_scale(&field));
    for _ in 0..1000 {
        stepper.step(&mut field)?;
    }
    let mass = (field.total_mass() - m0).abs() / m0;
    let momentum = (field.total_momentum() - q0).abs() / scale;

    let boltzmann = ModelConfig::reduced_with(3, 0.2, 1.0, 0.0, crate::model::Statistics::Boltzmann)?;
    let start = random_field(&boltzmann, &mut rng, 32, dx, 0.1)?;
    let ours = {
        let s = Stepper::new(&boltzmann, Mode::Nonlinear, Scheme::LaxWendroff, dx, dt)?;
        let mut f = start.clone();
        s.step(&mut f)?;
        f.p
    };
    let reference = boltzmann_reference_step(&start, dt);
    let diff = ours
        .iter()
        .flatten()
        .zip(reference.iter().flatten())
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    Ok((
        mass < 1e-12 && momentum < 1e-12 && diff < 1e-13,
        format!("mass {mass:.3e}; momentum {momentum:.3e}; gamma=0 reference diff {diff:.3e}"),
    ))
}

/// Orientation scan: acoustic decrease toward `pi/4` and the secondary-branch ratio.
pub fn theta_scan_check() -> Result<(bool, String)> {
    let grid = theta_grid(2, 12)?;
    let rows = theta_scan(0.0, 2, 10.0, &grid)?;
    let acoustic: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.branch == Branch::Acoustic && r.theta <= FRAC_PI_4)
        .map(|r| (r.theta, r.lambda_i_max))
        .collect();
    let decreasing = acoustic.windows(2).all(|w| w[1].1 < w[0].1);
    let at_quarter = acoustic.last().map(|r| r.1.abs()).unwrap_or(f64::INFINITY);
    let secondary = |b: f64| -> Result<f64> {
        theta_scan(b, 2, 10.0, &[FRAC_PI_4])?
            .into_iter()
            .find(|r| r.branch == Branch::Secondary(1))
            .map(|r| r.lambda_i_max)
            .ok_or_else(|| crate::Error::domain("branch", "no secondary root at pi/4"))
    };
    let ratio = secondary(0.5)? / secondary(-0.5)?;
    Ok((
        decreasing && at_quarter < 1e-12 && (ratio - 1.850).abs() <= 0.01,
        format!(
            "acoustic decreasing: {decreasing}; value at pi/4 {at_quarter:.3e}; secondary ratio {ratio:.6}"
        ),
    ))
}

/// Root multisets are invariant under `theta -> theta + pi/n` and `theta -> pi/n - theta`.
pub fn symmetry_suite() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        let period = PI / n as f64;
        for k in 0..50 {
            let theta = period * (k as f64 + 0.5) / 50.0;
            for h_b in [0.05, 0.9, 13.0] {
                let base = solve_roots(&assemble_polynomial(h_b, theta, n))?;
                for other in [theta + period, period - theta] {
                    let roots = solve_roots(&assemble_polynomial(h_b, other, n))?;
                    worst = worst.max(multiset_distance(&roots, &base));
                }
            }
        }
    }
    Ok((worst < 1e-9, format!("max rel diff {worst:.3e} over 450 points")))
}

/// A fixed sweep rendered twice gives identical bytes.
pub fn determinism() -> Result<(bool, String)> {
    let render = || -> Result<Vec<u8>> {
        let table = sweep(
            &[0.0, FRAC_PI_8, FRAC_PI_4],
            &[0.0, 0.5],
            &log_grid(1e-2, 1e2, 41)?,
            3,
            BranchPolicy::All,
        )?;
        let mut buf = Vec::new();
        write_table(&mut buf, &table, Format::Csv).expect("writing to memory");
        Ok(buf)
    };
    let (a, b) = (render()?, render()?);
    Ok((a == b, format!("{} bytes, identical: {}", a.len(), a == b)))
}

/// Runs every check with the given seed.
pub fn run_checks(seed: u64) -> Vec<Check> {
    vec![
        check(1, "quarter-pi identity", quarter_pi_identity()),
        check(2, "closed-form oracle", closed_form_oracle(seed)),
        check(3, "peak invariance in B", peak_invariance()),
        check(4, "peak location", peak_location()),
        check(5, "simulator cross-check", simulator_cross_check()),
        check(6, "conservation", conservation(seed)),
        check(7, "orientation scan", theta_scan_check()),
        check(8, "symmetry suite", symmetry_suite()),
        check(9, "determinism", determinism()),
    ]
}

/// Plain-text report, one line per check plus a summary.
pub fn render(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let _ = writeln!(
            out,
            "{:>2}  {:<24} {}  {}",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} checks passed", checks.len());
    out
}
