//! Boundary-driven runs and extraction of the complex wavenumber.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_lattice, Boundary, Mode, Scheme, Stepper, WaveField, MAX_COLLISION_STEP, MAX_COURANT};
use crate::dispersion::{acoustic_root, mode_shape};
use crate::error::{Error, Result};
use crate::model::ModelConfig;

/// How the inflow components at `x = 0` are driven.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Drive {
    /// Inflow components follow the acoustic eigenmode.
    #[default]
    ModePure,
    /// Every inflow component gets the same `eps sin(omega t)`.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingOptions {
    /// Domain length in hydrodynamic wavelengths `2 pi c / (sqrt(2) omega)`.
    pub wavelengths: usize,
    pub points_per_wavelength: usize,
    /// Minimum number of periods discarded before recording.
    pub transient_periods: usize,
    /// Recorded periods.
    pub periods: usize,
    /// Drive amplitude `eps`.
    pub amplitude: f64,
    pub mode: Mode,
    pub scheme: Scheme,
    pub drive: Drive,
}

impl Default for ForcingOptions {
    fn default() -> Self {
        ForcingOptions {
            wavelengths: 12,
            points_per_wavelength: 40,
            transient_periods: 10,
            periods: 5,
            amplitude: 1e-3,
            mode: Mode::Linear,
            scheme: Scheme::default(),
            drive: Drive::default(),
        }
    }
}

impl ForcingOptions {
    fn validate(&self) -> Result<()> {
        if self.wavelengths < 5 {
            return Err(Error::domain(
                "wavelengths",
                format!("need at least 5 to leave a fit window, got {}", self.wavelengths),
            ));
        }
        if self.points_per_wavelength < 4 {
            return Err(Error::domain(
                "ppw",
                format!("need at least 4 points per wavelength, got {}", self.points_per_wavelength),
            ));
        }
        if self.periods == 0 {
            return Err(Error::domain("periods", "must be at least 1"));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::domain(
                "eps",
                format!("must be positive and finite, got {}", self.amplitude),
            ));
        }
        Ok(())
    }
}

/// Result of a driven run: the field at every step of the recorded periods.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcedRun {
    pub config: ModelConfig,
    pub options: ForcingOptions,
    pub dt: f64,
    pub steps_per_period: usize,
    /// Periods actually discarded before recording.
    pub discarded_periods: usize,
    /// Complex amplitudes of the `2n` components in the drive, before scaling by `eps`.
    pub drive_vector: Vec<Complex64>,
    /// Set for linear runs with `n > 2`, where the linear collision term is
    /// an extension of the form derived for `n = 2`.
    pub extrapolated: bool,
    pub snapshots: Vec<WaveField>,
}

impl ForcedRun {
    /// Hydrodynamic wavelength `2 pi c / (sqrt(2) omega)`.
    pub fn wavelength(&self) -> f64 {
        hydrodynamic_wavelength(&self.config)
    }

    /// Fit over [`default_fit_window`].
    pub fn fit(&self) -> Result<FitResult> {
        let window = default_fit_window(&self.config, &self.options);
        fit_wave(&self.snapshots, self.config.omega, window)
    }
}

fn hydrodynamic_wavelength(config: &ModelConfig) -> f64 {
    TAU * config.speed / (SQRT_2 * config.omega)
}

/// `[2 L, (wavelengths - 2) L]` with `L` the hydrodynamic wavelength.
pub fn default_fit_window(config: &ModelConfig, options: &ForcingOptions) -> (f64, f64) {
    let l = hydrodynamic_wavelength(config);
    (2.0 * l, (options.wavelengths as f64 - 2.0) * l)
}

/// Drives the left boundary at `config.omega` and records the final periods.
pub fn run_forced(config: &ModelConfig, options: &ForcingOptions) -> Result<ForcedRun> {
    let config = config.validate()?;
    options.validate()?;
    let n = config.n;
    let lattice = build_lattice(&config);
    let wavelength = hydrodynamic_wavelength(&config);
    let dx = wavelength / options.points_per_wavelength as f64;
    let cells = options.wavelengths * options.points_per_wavelength + 1;
    let period = TAU / config.omega;

    let relaxation_rate = 4.0 * config.collision_scale() * (1.0 + config.blocking);
    let dt_max = (MAX_COURANT * dx / lattice.max_speed()).min(MAX_COLLISION_STEP / relaxation_rate);
    let steps_per_period = (period / dt_max).ceil() as usize;
    let dt = period / steps_per_period as f64;
    let stepper = Stepper::new(&config, options.mode, options.scheme, dx, dt)?;

    let slowest = lattice
        .min_positive_speed()
        .ok_or_else(|| Error::domain("theta", "no velocity points into the domain"))?;
    // Coupling to slower (or zero-speed) components delays the front, so
    // the crossing time of the fastest characteristic is doubled.
    let crossing = 2.0 * (cells - 1) as f64 * dx / slowest / period + 5.0;
    let discarded = (options.transient_periods as f64).max(crossing).ceil() as usize;

    let drive_vector = drive_vector(&config, options.drive, &lattice.x_speeds)?;
    let eps = options.amplitude;
    let omega = config.omega;
    let speeds = lattice.x_speeds.clone();
    let boundary = |field: &mut WaveField| {
        let phase = Complex64::new(0.0, -omega * field.t).exp() * Complex64::i();
        let last = field.cells() - 1;
        for (i, &u) in speeds.iter().enumerate() {
            if u > 0.0 {
                field.p[i][0] = eps * (drive_vector[i] * phase).re;
            } else if u < 0.0 {
                field.p[i][last] = 0.0;
            }
        }
    };

    let limit = 1e3 * eps;
    let mut field = WaveField::zeros(&config, cells, dx, Boundary::Open)?;
    let total = (discarded + options.periods) * steps_per_period;
    let record_from = discarded * steps_per_period;
    let mut snapshots = Vec::with_capacity(options.periods * steps_per_period);
    for step in 0..total {
        stepper.step_with(&mut field, boundary)?;
        let magnitude = field.max_abs();
        if !(magnitude <= limit) {
            return Err(Error::Unstable {
                magnitude,
                limit,
                time: field.t,
            });
        }
        if step >= record_from {
            snapshots.push(field.clone());
        }
    }

    Ok(ForcedRun {
        config,
        options: *options,
        dt,
        steps_per_period,
        discarded_periods: discarded,
        drive_vector,
        extrapolated: options.mode == Mode::Linear && n > 2,
        snapshots,
    })
}

/// Drive amplitudes per component, scaled so the largest inflow entry has modulus 1.
fn drive_vector(config: &ModelConfig, drive: Drive, speeds: &[f64]) -> Result<Vec<Complex64>> {
    let raw = match drive {
        Drive::Uniform => vec![Complex64::new(1.0, 0.0); speeds.len()],
        Drive::ModePure => {
            let h_b = config.h_b();
            let root = acoustic_root(h_b, config.theta, config.n)?;
            mode_shape(root.lambda, h_b, config.theta, config.n)?
                .kinetic_components(root.lambda, config.theta)
        }
    };
    let scale = raw
        .iter()
        .zip(speeds)
        .filter(|(_, &u)| u > 0.0)
        .fold(0.0, |a: f64, (v, _)| a.max(v.norm()));
    if !(scale > 0.0) {
        return Err(Error::domain("drive", "mode has no amplitude on the inflow components"));
    }
    Ok(raw.into_iter().map(|v| v / scale).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Phase wavenumber.
    pub k_r: f64,
    /// Spatial attenuation rate.
    pub k_i: f64,
    /// `(k_r + i k_i) c / (sqrt(2) omega)`.
    pub lambda_meas: Complex64,
    /// Root-mean-square deviation of `log A(x)` from the fitted line, phase and
    /// log-amplitude combined.
    pub rms_residual: f64,
    /// Number of cells in the fit window.
    pub cells: usize,
}

/// Measures the complex wavenumber of the density perturbation `sum_i P_i`.
///
/// Each cell is demodulated at `omega` over the largest whole number of
/// periods covered by `series` (equally spaced in time); the unwrapped phase
/// and the log-amplitude are then fitted by straight lines over `window`.
pub fn fit_wave(series: &[WaveField], omega: f64, window: (f64, f64)) -> Result<FitResult> {
    if series.len() < 2 {
        return Err(Error::FitFailure("need at least two snapshots".into()));
    }
    let dt = series[1].t - series[0].t;
    let period = TAU / omega;
    let used = (1..=series.len())
        .rev()
        .find(|&k| {
            let cycles = k as f64 * dt / period;
            cycles >= 1.0 - 1e-9 && (cycles - cycles.round()).abs() < 1e-6
        })
        .ok_or_else(|| Error::FitFailure("snapshots do not span a whole period".into()))?;
    let samples = &series[series.len() - used..];

    let first = &samples[0];
    let cells: Vec<usize> = (0..first.cells())
        .filter(|&j| {
            let x = first.x(j);
            x >= window.0 && x <= window.1
        })
        .collect();
    if cells.len() < 3 {
        return Err(Error::FitFailure(format!(
            "window [{}, {}] holds {} cells",
            window.0,
            window.1,
            cells.len()
        )));
    }

    let mut amplitude = vec![Complex64::new(0.0, 0.0); cells.len()];
    for snap in samples {
        let carrier = Complex64::new(0.0, omega * snap.t).exp();
        for (a, &j) in amplitude.iter_mut().zip(&cells) {
            let density: f64 = snap.p.iter().map(|c| c[j]).sum();
            *a += density * carrier;
        }
    }
    for a in amplitude.iter_mut() {
        *a *= 2.0 / used as f64;
    }
    if amplitude.iter().any(|a| !(a.norm() > 0.0 && a.is_finite())) {
        return Err(Error::FitFailure("field has zero amplitude in the window".into()));
    }

    let xs: Vec<f64> = cells.iter().map(|&j| first.x(j)).collect();
    let mut phase = Vec::with_capacity(cells.len());
    let mut previous = amplitude[0].arg();
    phase.push(previous);
    for a in &amplitude[1..] {
        let raw = a.arg();
        let jump = (raw - previous + PI).rem_euclid(TAU) - PI;
        if jump.abs() > PI / 2.0 {
            return Err(Error::FitFailure(format!(
                "phase jumps by {jump} between adjacent cells; grid under-resolved"
            )));
        }
        let next = phase.last().copied().unwrap_or(0.0) + jump;
        phase.push(next);
        previous = raw;
    }
    let log_amp: Vec<f64> = amplitude.iter().map(|a| a.norm().ln()).collect();

    let (k_r, phase_res) = line_fit(&xs, &phase);
    let (slope, amp_res) = line_fit(&xs, &log_amp);
    let k_i = -slope;
    if !(k_r > 0.0) {
        return Err(Error::FitFailure(format!(
            "no forward wave: fitted k_r = {k_r}"
        )));
    }
    let speed = first.config.speed;
    let rms = phase_res
        .iter()
        .zip(&amp_res)
        .map(|(p, a)| p * p + a * a)
        .sum::<f64>()
        / xs.len() as f64;
    Ok(FitResult {
        k_r,
        k_i,
        lambda_meas: Complex64::new(k_r, k_i) * speed / (SQRT_2 * omega),
        rms_residual: rms.sqrt(),
        cells: xs.len(),
    })
}

/// Least-squares slope and residuals of `y` against `x`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let residuals = x
        .iter()
        .zip(y)
        .map(|(a, b)| b - (my + slope * (a - mx)))
        .collect();
    (slope, residuals)
}

/// Writes every `stride`-th snapshot as a plain-text table.
///
/// The file starts with `#` lines giving the parameters; each snapshot is
/// introduced by `# t = <time>` and followed by one row per cell:
/// `x P_1 ... P_2n`, separated by single spaces.
pub fn write_snapshots_to<W: Write + ?Sized>(out: &mut W, run: &ForcedRun, stride: usize) -> std::io::Result<()> {
    let cfg = &run.config;
    let o = &run.options;
    let stride = stride.max(1);
    writeln!(
        out,
        "# dvsound snapshots: n={} theta={:?} h={:?} B={:?} h_b={:?} c={:?} omega={:?} mode={} scheme={} drive={} eps={:?} ppw={} wavelengths={} dt={:?} steps_per_period={} stride={}",
        cfg.n,
        cfg.theta,
        cfg.reduced_params().h,
        cfg.blocking,
        cfg.h_b(),
        cfg.speed,
        cfg.omega,
        name(&o.mode),
        name(&o.scheme),
        name(&o.drive),
        o.amplitude,
        o.points_per_wavelength,
        o.wavelengths,
        run.dt,
        run.steps_per_period,
        stride,
    )?;
    if run.extrapolated {
        writeln!(out, "# note: linear collision term extrapolated to n > 2")?;
    }
    let columns: Vec<String> = (1..=2 * cfg.n).map(|i| format!("P{i}")).collect();
    writeln!(out, "# columns: x {}", columns.join(" "))?;
    for snap in run.snapshots.iter().step_by(stride) {
        writeln!(out, "# t = {:?}", snap.t)?;
        for j in 0..snap.cells() {
            write!(out, "{:?}", snap.x(j))?;
            for comp in &snap.p {
                write!(out, " {:?}", comp[j])?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_snapshots(path: &Path, run: &ForcedRun, stride: usize) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut out = BufWriter::new(file);
    write_snapshots_to(&mut out, run, stride).map_err(io)?;
    out.flush().map_err(io)
}

fn name<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(k: f64, decay: f64, omega: f64) -> Vec<WaveField> {
        let cfg = ModelConfig::reduced(2, 0.0, 1.0, 0.0).unwrap();
        let dx = 0.01;
        let cells = 400;
        let steps = 64;
        let period = TAU / omega;
        (0..2 * steps)
            .map(|s| {
                let t = s as f64 * period / steps as f64;
                let mut p = vec![vec![0.0; cells]; 4];
                for j in 0..cells {
                    let x = j as f64 * dx;
                    p[0][j] = (-decay * x).exp() * (k * x - omega * t).sin();
                }
                let mut f = WaveField::from_components(&cfg, p, dx, Boundary::Open).unwrap();
                f.t = t;
                f
            })
            .collect()
    }

    #[test]
    fn fit_recovers_synthetic_wave() {
        let fit = fit_wave(&synthetic(TAU, 0.1, 1.0), 1.0, (0.5, 3.5)).unwrap();
        assert!((fit.k_r - TAU).abs() < 1e-6, "{}", fit.k_r);
        assert!((fit.k_i - 0.1).abs() < 1e-6, "{}", fit.k_i);
        assert!(fit.rms_residual < 1e-9);
        let want = Complex64::new(TAU, 0.1) / SQRT_2;
        assert!((fit.lambda_meas - want).norm() < 1e-6);
    }

    #[test]
    fn fit_rejects_zero_field() {
        let mut series = synthetic(TAU, 0.1, 1.0);
        for f in series.iter_mut() {
            for c in f.p.iter_mut() {
                c.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        assert!(matches!(
            fit_wave(&series, 1.0, (0.5, 3.5)),
            Err(Error::FitFailure(_))
        ));
    }

    #[test]
    fn fit_rejects_under_resolved_phase() {
        // About 1.3 cells per wavelength.
        let series = synthetic(480.0, 0.0, 1.0);
        assert!(matches!(
            fit_wave(&series, 1.0, (0.5, 3.5)),
            Err(Error::FitFailure(_))
        ));
    }
}
