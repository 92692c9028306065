//! Acceptance criteria 1-9: one PASS/FAIL line each, non-zero exit on any failure.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::process::ExitCode;
use std::time::Instant;

use common::{c, forward_sqrt, quadratic_n2, root_set_distance};
use dvsound::analysis::{find_hmax, log_grid, sweep, theta_grid, theta_scan};
use dvsound::dispersion::{acoustic_root, assemble_polynomial, solve_roots, Branch, BranchPolicy};
use dvsound::output::{write_table, Format};
use dvsound::simulate::{
    run_forced, step_nonlinear, Boundary, ForcingOptions, Mode, Scheme, Stepper, WaveField,
};
use dvsound::{verify, ModelConfig, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<(bool, String)>;

fn quarter_pi_identity() -> Outcome {
    let mut worst = 0.0f64;
    for b in [-0.5, 0.0, 0.5] {
        for h in [0.1, 1.0, 10.0] {
            let cfg = ModelConfig::reduced(2, FRAC_PI_4, h, b)?;
            let root = acoustic_root(cfg.h_b(), cfg.theta, 2)?;
            worst = worst.max((root.lambda - 1.0).norm());
        }
    }
    Ok((worst < 1e-10, format!("max |lambda - 1| = {worst:.3e} (tol 1e-10)")))
}

fn closed_form_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let h_b = 10f64.powf(rng.gen_range(-3.0..3.0));
        let theta = rng.gen_range(0.0..PI / 2.0);
        let got = solve_roots(&assemble_polynomial(h_b, theta, 2))?;
        worst = worst.max(root_set_distance(&got, &quadratic_n2(h_b, theta)));
    }
    let mut linear = 0.0f64;
    for h_b in [1e-3, 0.1, 1.0, 10.0, 1e3] {
        let want = c(1.0, h_b) / c(2.0, h_b);
        let got = acoustic_root(h_b, 0.0, 2)?.u;
        linear = linear.max((got - want).norm() / want.norm());
    }
    let far = (acoustic_root(1e4, 0.0, 2)?.lambda - 1.0).norm();
    let near = (acoustic_root(1e-6, 0.0, 2)?.lambda - FRAC_1_SQRT_2).norm();
    let pass = worst < 1e-9 && linear < 1e-15 && far < 1e-3 && near < 1e-3;
    Ok((
        pass,
        format!("1000 cases max rel diff {worst:.2e}; theta=0 {linear:.1e}; |lambda(1e4)-1| {far:.2e}; |lambda(1e-6)-1/sqrt2| {near:.2e}"),
    ))
}

fn peak_invariance() -> Outcome {
    let mut spread = 0.0f64;
    let mut h_spread = 0.0f64;
    for theta in [0.0, FRAC_PI_8] {
        let peaks = [-0.5, 0.0, 0.3, 0.7]
            .iter()
            .map(|&b| find_hmax(theta, b, 2, Branch::Acoustic, (1e-3, 1e3)).map(|p| (b, p)))
            .collect::<Result<Vec<_>>>()?;
        let base = &peaks[1].1;
        for (b, p) in &peaks {
            spread = spread.max((p.lambda_i_max - base.lambda_i_max).abs());
            h_spread = h_spread.max((p.h_max * (1.0 + b) / base.h_max - 1.0).abs());
        }
    }
    Ok((
        spread < 1e-6 && h_spread < 1e-3,
        format!("lambda_i_max spread {spread:.2e} (tol 1e-6); h_max(1+B) rel spread {h_spread:.2e} (tol 1e-3)"),
    ))
}

fn peak_location() -> Outcome {
    let p = find_hmax(0.0, 0.0, 2, Branch::Acoustic, (1e-2, 1e2))?;
    // Dense scan of the closed form as the reference.
    let dense = (0..100_000)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 99_999.0))
        .map(|h| (h, forward_sqrt(c(1.0, h) / c(2.0, h)).im))
        .fold((0.0, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    let pass = (p.h_max - 1.69).abs() <= 0.05
        && (p.lambda_i_max - 0.1443).abs() <= 5e-4
        && (p.h_max / dense.0 - 1.0).abs() < 1e-3;
    Ok((
        pass,
        format!("h_max = {:.6}, lambda_i_max = {:.7} (dense scan {:.6}, {:.7})", p.h_max, p.lambda_i_max, dense.0, dense.1),
    ))
}

fn simulator_cross_check() -> Outcome {
    let cases: Vec<(f64, f64, f64)> = [0.0, FRAC_PI_8]
        .iter()
        .flat_map(|&t| [0.5, 1.0, 2.0].into_iter().flat_map(move |h| [0.0, 0.5].map(|b| (t, h, b))))
        .collect();
    let errors = cases
        .par_iter()
        .map(|&(theta, h, b)| -> Result<[(f64, f64, f64); 2]> {
            let cfg = ModelConfig::reduced(2, theta, h, b)?;
            let oracle = acoustic_root(cfg.h_b(), cfg.theta, 2)?.lambda;
            let mut out = [(0.0, 0.0, 0.0); 2];
            for (slot, ppw) in out.iter_mut().zip([40, 80]) {
                let options = ForcingOptions { points_per_wavelength: ppw, ..ForcingOptions::default() };
                let lambda = run_forced(&cfg, &options)?.fit()?.lambda_meas;
                *slot = (
                    (lambda.re / oracle.re - 1.0).abs(),
                    (lambda.im / oracle.im - 1.0).abs(),
                    (lambda - oracle).norm(),
                );
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pass = true;
    let (mut worst_r, mut worst_i) = (0.0f64, 0.0f64);
    for [coarse, fine] in &errors {
        pass &= coarse.0 < 0.03 && coarse.1 < 0.05 && fine.2 < coarse.2;
        worst_r = worst_r.max(coarse.0);
        worst_i = worst_i.max(coarse.1);
    }
    let shrink = errors.iter().map(|[a, b]| a.2 / b.2).fold(f64::INFINITY, f64::min);
    Ok((
        pass,
        format!("12 cases at 40 ppw: max err_r {worst_r:.2e} (tol 3e-2), max err_i {worst_i:.2e} (tol 5e-2); smallest 40->80 error ratio {shrink:.2}"),
    ))
}

fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut mass, mut momentum) = (0.0f64, 0.0f64);
    for (n, b, gamma) in [(2, 0.0, 0.0), (2, 0.5, 1.0), (3, -0.4, -1.0), (4, 0.7, 1.0)] {
        let density = if gamma == 0.0 { 1.0 } else { b / gamma };
        let cfg = ModelConfig::physical(n, 0.3, 1.0, 0.4, density, 1.0, gamma)?;
        let (cells, dx) = (64, 0.05);
        let p = (0..2 * n)
            .map(|_| {
                let (a, phase) = (rng.gen_range(-0.05..0.05), rng.gen_range(0.0..6.3));
                (0..cells).map(|j| a * (2.0 * PI * j as f64 / cells as f64 + phase).sin()).collect()
            })
            .collect();
        let mut field = WaveField::from_components(&cfg, p, dx, Boundary::Periodic)?;
        let dt = 0.4 * dx;
        let stepper = Stepper::new(&cfg, Mode::Nonlinear, Scheme::LaxWendroff, dx, dt)?;
        let speeds: Vec<f64> = common::cosines(cfg.theta, n).iter().map(|&u| u).chain(common::cosines(cfg.theta, n).iter().map(|&u| -u)).collect();
        let totals = |f: &WaveField| {
            let m: f64 = f.p.iter().flatten().map(|p| 1.0 + p).sum();
            let (x, s) = f.p.iter().zip(&speeds).fold((0.0, 0.0), |(x, s), (comp, u)| {
                let sum: f64 = comp.iter().map(|p| 1.0 + p).sum();
                (x + u * sum, s + u.abs() * sum)
            });
            (m, x, s)
        };
        let (m0, x0, s0) = totals(&field);
        for _ in 0..1000 {
            stepper.step(&mut field)?;
        }
        let (m1, x1, _) = totals(&field);
        mass = mass.max((m1 - m0).abs() / m0);
        momentum = momentum.max((x1 - x0).abs() / s0);
    }
    let cfg = ModelConfig::physical(3, 0.2, 1.0, 0.5, 1.0, 1.0, 0.0)?;
    let p = (0..6).map(|_| (0..40).map(|_| rng.gen_range(-0.2..0.2)).collect()).collect();
    let field = WaveField::from_components(&cfg, p, 0.1, Boundary::Periodic)?;
    let ours = step_nonlinear(&field, 0.02)?;
    let reference = verify::boltzmann_reference_step(&field, 0.02);
    let diff = ours.p.iter().flatten().zip(reference.iter().flatten()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((
        mass < 1e-12 && momentum < 1e-12 && diff < 1e-14,
        format!("1000 steps: mass {mass:.2e}, momentum {momentum:.2e} (tol 1e-12); gamma=0 vs reference {diff:.2e}"),
    ))
}

fn orientation_scan() -> Outcome {
    let grid = theta_grid(2, 90)?;
    let rows = theta_scan(0.0, 2, 10.0, &grid)?;
    let acoustic: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.branch == Branch::Acoustic && r.theta <= FRAC_PI_4)
        .map(|r| (r.theta, r.lambda_i_max))
        .collect();
    let decreasing = acoustic.windows(2).all(|w| w[1].1 < w[0].1);
    let at_quarter = acoustic.last().map(|&(t, v)| t == FRAC_PI_4 && v == 0.0).unwrap_or(false);
    let secondary = |b: f64| -> Result<f64> {
        Ok(theta_scan(b, 2, 10.0, &[FRAC_PI_4])?
            .into_iter()
            .find(|r| r.branch == Branch::Secondary(1))
            .map(|r| r.lambda_i_max)
            .unwrap_or(f64::NAN))
    };
    let ratio = secondary(0.5)? / secondary(-0.5)?;
    let want = forward_sqrt(c(1.0, 15.0)).im / forward_sqrt(c(1.0, 5.0)).im;
    Ok((
        decreasing && at_quarter && (ratio - 1.850).abs() <= 0.01,
        format!("acoustic max decreasing to 0 at pi/4: {}; secondary ratio {ratio:.6} (closed form {want:.6})", decreasing && at_quarter),
    ))
}

fn symmetry_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [2usize, 3, 4] {
        let period = PI / n as f64;
        for k in 0..50 {
            let theta = period * k as f64 / 50.0;
            for h_b in [0.1, 1.0, 10.0] {
                let base = solve_roots(&assemble_polynomial(h_b, theta, n))?;
                for other in [theta + period, period - theta] {
                    let roots = solve_roots(&assemble_polynomial(h_b, other, n))?;
                    worst = worst.max(if roots.len() == base.len() { root_set_distance(&roots, &base) } else { f64::INFINITY });
                }
                count += 1;
            }
        }
    }
    Ok((worst < 1e-9, format!("max rel diff {worst:.2e} over {count} points (tol 1e-9)")))
}

fn determinism() -> Outcome {
    let report = || verify::render(&verify::run_checks(verify::DEFAULT_SEED));
    let (a, b) = (report(), report());
    let grid = log_grid(1e-2, 1e2, 41)?;
    let table = || -> Result<Vec<u8>> {
        let t = sweep(&[0.0, 0.3, FRAC_PI_4], &[0.0, 0.5], &grid, 3, BranchPolicy::All)?;
        let mut out = Vec::new();
        write_table(&mut out, &t, Format::Csv).expect("in-memory write");
        Ok(out)
    };
    let (x, y) = (table()?, table()?);
    Ok((
        a == b && x == y,
        format!("verify report {} bytes identical: {}; sweep {} bytes identical: {}", a.len(), a == b, x.len(), x == y),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("quarter-pi identity", quarter_pi_identity),
        ("closed-form oracle", closed_form_oracle),
        ("peak invariance in B", peak_invariance),
        ("peak location", peak_location),
        ("simulator cross-check", simulator_cross_check),
        ("conservation", conservation),
        ("orientation scan", orientation_scan),
        ("symmetry suite", symmetry_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!(
            "criterion {}  {:<22} {}  {} [{:.1}s]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{}/9 acceptance criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
