mod common;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use common::{c, forward_sqrt, relation};
use dvsound::analysis::{
    find_hmax, localization_length, log_grid, sweep, theta_grid, theta_scan, LocalizationLength,
    RowOutcome,
};
use dvsound::dispersion::{acoustic_root, Branch, BranchPolicy, RESIDUAL_TOLERANCE};
use dvsound::Error;

fn default_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 41).unwrap()
}

#[test]
fn dispersion_approaches_the_hydrodynamic_limit() {
    let table = sweep(&[0.0, FRAC_PI_8, FRAC_PI_4], &[0.0], &default_grid(), 2, BranchPolicy::Acoustic).unwrap();
    assert_eq!(table.rows.len(), 3 * 41);
    for line in table.rows.chunks(41) {
        let lambdas: Vec<_> = line.iter().map(|r| r.root().unwrap().lambda).collect();
        // Rows run from large to small h, so lambda_r must not increase along them.
        for w in lambdas.windows(2) {
            assert!(w[1].re <= w[0].re + 1e-14, "theta = {}", line[0].theta);
        }
        assert!((lambdas[0].re - 1.0).abs() < 0.01);
    }
    for r in &table.rows[82..] {
        assert_eq!(r.theta, FRAC_PI_4);
        assert_eq!(r.root().unwrap().lambda, c(1.0, 0.0));
    }
}

#[test]
fn rows_are_ordered_by_theta_then_b_then_h() {
    let grid = vec![0.5, 5.0, 1.0];
    let table = sweep(&[0.5, 0.1], &[0.7, -0.2], &grid, 3, BranchPolicy::Acoustic).unwrap();
    let keys: Vec<(f64, f64, f64)> = table.rows.iter().map(|r| (r.theta, r.blocking, r.h)).collect();
    let mut want = Vec::new();
    for t in [0.1, 0.5] {
        for b in [0.7, -0.2] {
            for h in [5.0, 1.0, 0.5] {
                want.push((t, b, h));
            }
        }
    }
    assert_eq!(keys, want);
}

#[test]
fn blocking_collapses_onto_h_b() {
    let grid = default_grid();
    let a = sweep(&[0.3], &[0.3], &grid, 2, BranchPolicy::All).unwrap();
    let mapped: Vec<f64> = grid.iter().map(|h| h * 1.3 / 1.7).collect();
    let b = sweep(&[0.3], &[0.7], &mapped, 2, BranchPolicy::All).unwrap();
    assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        let (x, y) = (x.root().unwrap(), y.root().unwrap());
        assert_eq!(x.branch, y.branch);
        assert!((x.lambda - y.lambda).norm() < 1e-12);
    }
}

#[test]
fn every_row_rechecks_against_the_relation() {
    for n in [2, 3, 4] {
        let thetas: Vec<f64> = (0..6).map(|k| PI / n as f64 * k as f64 / 6.0 + 0.01).collect();
        let table = sweep(&thetas, &[0.0, 0.5], &default_grid(), n, BranchPolicy::All).unwrap();
        for row in &table.rows {
            let RowOutcome::Root(root) = &row.outcome else { panic!("unexpected error row {row:?}") };
            assert!(root.residual < RESIDUAL_TOLERANCE);
            let h_b = row.h * (1.0 + row.blocking);
            let nearest_pole = common::cosines(row.theta, n)
                .iter()
                .map(|cm| (1.0 + c(0.0, h_b) - 2.0 * root.u * cm * cm).norm())
                .fold(f64::INFINITY, f64::min);
            if nearest_pole > 1e-2 * (1.0 + h_b * h_b).sqrt() {
                let r = relation(root.lambda, h_b, row.theta, n).norm();
                assert!(r < RESIDUAL_TOLERANCE, "n={n} row {row:?}: {r}");
            }
            if root.branch == Branch::Acoustic {
                assert!(root.lambda.re > 0.0);
            }
        }
    }
}

#[test]
fn unsolvable_points_become_error_rows() {
    let table = sweep(&[0.0], &[0.0], &[10.0, 1.0, 0.1], 4, BranchPolicy::Acoustic).unwrap();
    assert_eq!(table.rows.len(), 3);
    let errors = table.rows.iter().filter(|r| matches!(r.outcome, RowOutcome::Error(_))).count();
    assert!(errors >= 1, "{:?}", table.rows);
}

#[test]
fn peak_examples() {
    let p = find_hmax(0.0, 0.0, 2, Branch::Acoustic, (1e-2, 1e2)).unwrap();
    assert!((p.h_max - 1.69).abs() < 0.05, "{p:?}");
    assert!((p.lambda_i_max - 0.1443).abs() < 5e-4, "{p:?}");
    assert!(p.bracket.1 - p.bracket.0 < 1e-4 * p.h_max);
    for end in [p.bracket.0, p.bracket.1] {
        assert!(acoustic_root(end, 0.0, 2).unwrap().lambda.im <= p.lambda_i_max);
    }
    // Dense scan of the closed form lambda^2 = (1 + i h) / (2 + i h).
    let dense = (0..200_000)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 199_999.0))
        .map(|h| (h, forward_sqrt(c(1.0, h) / c(2.0, h)).im))
        .fold((0.0, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    assert!((p.h_max - dense.0).abs() < 1e-4 * dense.0, "{p:?} vs {dense:?}");
    assert!((p.lambda_i_max - dense.1).abs() < 1e-9);

    let q = find_hmax(0.0, 0.5, 2, Branch::Acoustic, (1e-2, 1e2)).unwrap();
    assert!((q.h_max - p.h_max / 1.5).abs() < 2e-4 * q.h_max, "{q:?}");
    assert!((q.lambda_i_max - p.lambda_i_max).abs() < 1e-6);

    assert!(matches!(
        find_hmax(FRAC_PI_4, 0.0, 2, Branch::Acoustic, (1e-2, 1e2)),
        Err(Error::NoInteriorMaximum { .. })
    ));
    assert!(matches!(
        find_hmax(FRAC_PI_4, 0.0, 2, Branch::Secondary(1), (1e-2, 1e2)),
        Err(Error::NoInteriorMaximum { .. })
    ));
    assert!(find_hmax(0.0, 0.0, 2, Branch::Acoustic, (1.0, 10.0)).is_err());
}

#[test]
fn peak_is_invariant_in_blocking() {
    for theta in [0.0, FRAC_PI_8, 0.5] {
        let peaks: Vec<_> = [-0.5, 0.0, 0.3, 0.5, 0.7]
            .iter()
            .map(|&b| (b, find_hmax(theta, b, 2, Branch::Acoustic, (1e-3, 1e3)).unwrap()))
            .collect();
        let (_, base) = &peaks[1];
        for (b, p) in &peaks {
            assert!((p.lambda_i_max - base.lambda_i_max).abs() < 1e-6, "theta={theta} B={b}");
            assert!((p.h_max * (1.0 + b) / base.h_max - 1.0).abs() < 1e-3, "theta={theta} B={b}");
        }
    }
}

#[test]
fn localization_lengths() {
    assert!((LocalizationLength::from_attenuation(0.1443).value() - 6.930).abs() < 5e-4);
    assert_eq!(LocalizationLength::from_attenuation(0.0), LocalizationLength::Infinite);
    for x in [0.01, 0.1443, 3.0] {
        let l = LocalizationLength::Finite(x);
        assert_eq!(l.reciprocal().reciprocal(), l);
    }

    let grid = log_grid(0.5, 5.0, 801).unwrap();
    let table = sweep(&[0.0, FRAC_PI_4], &[0.0], &grid, 2, BranchPolicy::Acoustic).unwrap();
    let rows = localization_length(&table);
    assert_eq!(rows.len(), table.rows.len());
    let (theta0, quarter): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.row.theta == 0.0);
    assert!(quarter.iter().all(|r| r.length == LocalizationLength::Infinite));
    let shortest = theta0
        .iter()
        .min_by(|a, b| a.length.value().total_cmp(&b.length.value()))
        .unwrap();
    let peak = find_hmax(0.0, 0.0, 2, Branch::Acoustic, (1e-2, 1e2)).unwrap();
    assert!((shortest.row.h / peak.h_max - 1.0).abs() < 0.005, "{} vs {}", shortest.row.h, peak.h_max);
    for r in &theta0 {
        let li = r.row.root().unwrap().lambda.im;
        assert!((r.length.value() * li - 1.0).abs() < 1e-14);
    }
}

#[test]
fn theta_scan_reconstruction() {
    let grid = theta_grid(2, 90).unwrap();
    assert!(grid.contains(&FRAC_PI_4));
    let rows = theta_scan(0.0, 2, 10.0, &grid).unwrap();
    let acoustic: Vec<_> = rows.iter().filter(|r| r.branch == Branch::Acoustic).collect();
    assert_eq!(acoustic.len(), grid.len());

    // Decreasing toward pi/4 from both sides, zero at pi/4.
    let below: Vec<f64> = acoustic.iter().filter(|r| r.theta <= FRAC_PI_4).map(|r| r.lambda_i_max).collect();
    for w in below.windows(2) {
        assert!(w[1] < w[0] + 1e-12);
    }
    let at = acoustic.iter().find(|r| r.theta == FRAC_PI_4).unwrap();
    assert_eq!(at.lambda_i_max, 0.0);

    // Mirror symmetry about pi/4.
    for r in &acoustic {
        let mirror = acoustic
            .iter()
            .find(|s| (s.theta - (PI / 2.0 - r.theta)).abs() < 1e-12)
            .expect("grid is symmetric");
        assert!((r.lambda_i_max - mirror.lambda_i_max).abs() < 1e-9, "theta = {}", r.theta);
    }

    // Oracle values of the acoustic maximum.
    for (theta, want) in [(0.0, 0.144337567), (0.2618, 0.137098956), (0.5236, 0.107541382)] {
        let row = theta_scan(0.0, 2, 10.0, &[theta]).unwrap();
        assert!((row[0].lambda_i_max - want).abs() < 2e-6, "theta = {theta}: {}", row[0].lambda_i_max);
    }

    let secondary = |b: f64| {
        theta_scan(b, 2, 10.0, &[FRAC_PI_4])
            .unwrap()
            .into_iter()
            .find(|r| r.branch == Branch::Secondary(1))
            .unwrap()
    };
    let s0 = secondary(0.0);
    assert!((s0.lambda_i_max - forward_sqrt(c(1.0, 10.0)).im).abs() < 1e-9);
    assert!(s0.at_cap);
    let ratio = secondary(0.5).lambda_i_max / secondary(-0.5).lambda_i_max;
    assert!((ratio - 1.850).abs() < 0.01, "{ratio}");
    assert!((secondary(0.5).lambda_i_max - forward_sqrt(c(1.0, 15.0)).im).abs() < 1e-9);
}

#[test]
fn scan_requires_valid_inputs() {
    assert!(theta_scan(0.0, 2, -1.0, &[0.0]).is_err());
    assert!(theta_scan(0.0, 2, 10.0, &[]).is_err());
    assert!(theta_scan(-1.0, 2, 10.0, &[0.0]).is_err());
    assert!(sweep(&[], &[0.0], &[1.0], 2, BranchPolicy::Acoustic).is_err());
    assert!(sweep(&[0.0], &[0.0], &[-1.0], 2, BranchPolicy::Acoustic).is_err());
}
