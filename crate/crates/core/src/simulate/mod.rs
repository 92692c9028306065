//! Time integration of the discrete-velocity kinetic equations on a 1D grid.
//!
//! Only the x components of the velocities enter: waves are plane and
//! travel along x. A [`WaveField`] holds the perturbations `P_i` of all `2n`
//! number densities; a [`Stepper`] advances it by operator splitting between
//! advection and collisions.

mod collision;
mod forced;

use serde::{Deserialize, Serialize};

pub use collision::{CollisionOperator, LinearCollision, UehlingUhlenbeck};
pub use forced::{
    default_fit_window, fit_wave, run_forced, write_snapshots, write_snapshots_to, Drive,
    FitResult, ForcedRun, ForcingOptions,
};

use crate::error::{Error, Result};
use crate::model::{direction_cosines, ModelConfig};

/// Largest admissible advective Courant number.
pub const MAX_COURANT: f64 = 0.9;
/// Largest admissible `dt` times the collision rate `4 c S N0 (1 + B)`.
pub const MAX_COLLISION_STEP: f64 = 0.5;
/// Direction cosines smaller than this are treated as exactly zero.
const ZERO_SPEED: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityLattice {
    pub n: usize,
    /// `c cos[theta + (i-1) pi/n]` for `i = 1..n`, then their negatives.
    pub x_speeds: Vec<f64>,
}

impl VelocityLattice {
    pub fn max_speed(&self) -> f64 {
        self.x_speeds.iter().fold(0.0, |a, &u| a.max(u.abs()))
    }

    /// Slowest strictly positive speed; the crossing time of the domain is set by it.
    pub fn min_positive_speed(&self) -> Option<f64> {
        self.x_speeds
            .iter()
            .copied()
            .filter(|&u| u > 0.0)
            .min_by(f64::total_cmp)
    }
}

pub fn build_lattice(config: &ModelConfig) -> VelocityLattice {
    let n = config.n;
    let mut x_speeds = vec![0.0; 2 * n];
    for (m, cos) in direction_cosines(config.theta, n).into_iter().enumerate() {
        // cos(pi/2) evaluates to 6e-17; such a component must not advect.
        let u = if cos.abs() < ZERO_SPEED { 0.0 } else { config.speed * cos };
        x_speeds[m] = u;
        x_speeds[m + n] = -u;
    }
    VelocityLattice { n, x_speeds }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Nonlinear,
}

/// Spatial and temporal discretization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// First-order upwind advection followed by a forward Euler collision step.
    Upwind,
    /// Lax-Wendroff advection between two half collision steps, each by Heun's method.
    #[default]
    LaxWendroff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    /// Outflow nodes are updated one-sidedly; inflow nodes are left to the caller.
    Open,
}

/// Perturbations `P_i(x)` on a uniform grid `x_j = j dx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    /// `p[i][j]` is `P_{i+1}` at cell `j`.
    pub p: Vec<Vec<f64>>,
    pub dx: f64,
    pub t: f64,
    pub config: ModelConfig,
    pub boundary: Boundary,
}

impl WaveField {
    pub fn zeros(config: &ModelConfig, cells: usize, dx: f64, boundary: Boundary) -> Result<Self> {
        Self::from_components(config, vec![vec![0.0; cells]; 2 * config.n], dx, boundary)
    }

    pub fn from_components(
        config: &ModelConfig,
        p: Vec<Vec<f64>>,
        dx: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        let config = config.validate()?;
        if p.len() != 2 * config.n {
            return Err(Error::domain(
                "field",
                format!("expected {} components, got {}", 2 * config.n, p.len()),
            ));
        }
        let cells = p[0].len();
        if cells < 2 || p.iter().any(|c| c.len() != cells) {
            return Err(Error::domain("field", "components need equal lengths of at least 2 cells"));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::domain("dx", format!("must be positive, got {dx}")));
        }
        Ok(WaveField {
            p,
            dx,
            t: 0.0,
            config,
            boundary,
        })
    }

    pub fn cells(&self) -> usize {
        self.p[0].len()
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Relative density perturbation `sum_i P_i` per cell.
    pub fn density(&self) -> Vec<f64> {
        (0..self.cells())
            .map(|j| self.p.iter().map(|c| c[j]).sum())
            .collect()
    }

    /// `sum_i integral N_i dx`.
    pub fn total_mass(&self) -> f64 {
        let sum: f64 = self.p.iter().flatten().map(|&p| 1.0 + p).sum();
        self.config.density * self.dx * sum
    }

    /// `sum_i integral N_i U_i,x dx`.
    pub fn total_momentum(&self) -> f64 {
        let lattice = build_lattice(&self.config);
        let sum: f64 = self
            .p
            .iter()
            .zip(&lattice.x_speeds)
            .map(|(c, &u)| u * c.iter().map(|&p| 1.0 + p).sum::<f64>())
            .sum();
        self.config.density * self.dx * sum
    }

    pub fn max_abs(&self) -> f64 {
        self.p.iter().flatten().fold(0.0, |a, &p| a.max(p.abs()))
    }
}

/// Pair averages `D_m = (P_m + P_{m+n}) / 2` per cell.
pub fn pair_averages(field: &WaveField) -> Vec<Vec<f64>> {
    let n = field.config.n;
    (0..n)
        .map(|m| {
            field.p[m]
                .iter()
                .zip(&field.p[m + n])
                .map(|(a, b)| 0.5 * (a + b))
                .collect()
        })
        .collect()
}

/// Checks the explicit stability limits for a step of `dt` on spacing `dx`.
pub fn check_step(config: &ModelConfig, lattice: &VelocityLattice, dx: f64, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain("dt", format!("must be positive, got {dt}")));
    }
    let courant = dt * lattice.max_speed() / dx;
    if courant > MAX_COURANT * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge(format!(
            "Courant number {courant} exceeds {MAX_COURANT}"
        )));
    }
    let relaxation = dt * 4.0 * config.collision_scale() * (1.0 + config.blocking);
    if relaxation > MAX_COLLISION_STEP * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge(format!(
            "dt times collision rate is {relaxation}, exceeds {MAX_COLLISION_STEP}"
        )));
    }
    Ok(())
}

/// Advances a field by fixed steps of one discretization.
pub struct Stepper {
    lattice: VelocityLattice,
    operator: Box<dyn CollisionOperator>,
    mode: Mode,
    scheme: Scheme,
    dt: f64,
}

impl Stepper {
    pub fn new(config: &ModelConfig, mode: Mode, scheme: Scheme, dx: f64, dt: f64) -> Result<Self> {
        let config = config.validate()?;
        let lattice = build_lattice(&config);
        check_step(&config, &lattice, dx, dt)?;
        let operator: Box<dyn CollisionOperator> = match mode {
            Mode::Linear => Box::new(LinearCollision::new(&config)),
            Mode::Nonlinear => Box::new(UehlingUhlenbeck::new(&config)),
        };
        Ok(Stepper {
            lattice,
            operator,
            mode,
            scheme,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn lattice(&self) -> &VelocityLattice {
        &self.lattice
    }

    pub fn step(&self, field: &mut WaveField) -> Result<()> {
        self.step_with(field, |_| {})
    }

    /// One step; `boundary` runs right after advection to impose inflow values.
    pub fn step_with(&self, field: &mut WaveField, boundary: impl FnOnce(&mut WaveField)) -> Result<()> {
        match self.scheme {
            Scheme::Upwind => {
                advect(field, &self.lattice, self.dt, Scheme::Upwind);
                field.t += self.dt;
                boundary(field);
                collide(field, self.operator.as_ref(), self.dt, Integrator::Euler);
            }
            Scheme::LaxWendroff => {
                let half = 0.5 * self.dt;
                collide(field, self.operator.as_ref(), half, Integrator::Heun);
                advect(field, &self.lattice, self.dt, Scheme::LaxWendroff);
                field.t += self.dt;
                boundary(field);
                collide(field, self.operator.as_ref(), half, Integrator::Heun);
            }
        }
        self.check_field(field)
    }

    fn check_field(&self, field: &WaveField) -> Result<()> {
        for (i, comp) in field.p.iter().enumerate() {
            for (j, &p) in comp.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::Unstable {
                        magnitude: p.abs(),
                        limit: f64::MAX,
                        time: field.t,
                    });
                }
                if self.mode == Mode::Nonlinear && p <= -1.0 {
                    return Err(Error::PositivityLoss {
                        value: p,
                        cell: j,
                        component: i + 1,
                    });
                }
            }
        }
        Ok(())
    }
}

/// One step of the linearized equations with the default scheme.
pub fn step_linear(field: &WaveField, dt: f64) -> Result<WaveField> {
    step_mode(field, dt, Mode::Linear)
}

/// One step of the full equations with the default scheme.
pub fn step_nonlinear(field: &WaveField, dt: f64) -> Result<WaveField> {
    step_mode(field, dt, Mode::Nonlinear)
}

fn step_mode(field: &WaveField, dt: f64, mode: Mode) -> Result<WaveField> {
    let stepper = Stepper::new(&field.config, mode, Scheme::default(), field.dx, dt)?;
    let mut next = field.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Integrator {
    Euler,
    Heun,
}

/// Advects every component by `dt` at its x speed. Zero-speed components are untouched.
pub fn advect(field: &mut WaveField, lattice: &VelocityLattice, dt: f64, scheme: Scheme) {
    let dx = field.dx;
    let periodic = field.boundary == Boundary::Periodic;
    for (comp, &u) in field.p.iter_mut().zip(&lattice.x_speeds) {
        if u == 0.0 {
            continue;
        }
        let s = u * dt / dx;
        let old = comp.clone();
        let m = old.len();
        let at = |j: isize| -> f64 {
            if periodic {
                old[j.rem_euclid(m as isize) as usize]
            } else {
                old[j as usize]
            }
        };
        let (lo, hi) = if periodic {
            (0, m)
        } else if s > 0.0 {
            (1, m)
        } else {
            (0, m - 1)
        };
        for j in lo..hi {
            let ji = j as isize;
            let interior = periodic || (j > 0 && j + 1 < m);
            comp[j] = if scheme == Scheme::LaxWendroff && interior {
                let (l, c, r) = (at(ji - 1), old[j], at(ji + 1));
                c - 0.5 * s * (r - l) + 0.5 * s * s * (r - 2.0 * c + l)
            } else if s > 0.0 {
                old[j] - s * (old[j] - at(ji - 1))
            } else {
                old[j] - s * (at(ji + 1) - old[j])
            };
        }
    }
}

fn collide(field: &mut WaveField, operator: &dyn CollisionOperator, dt: f64, integrator: Integrator) {
    let count = operator.components();
    let mut cell = vec![0.0; count];
    let mut k1 = vec![0.0; count];
    let mut k2 = vec![0.0; count];
    let mut stage = vec![0.0; count];
    for j in 0..field.cells() {
        for (i, c) in cell.iter_mut().enumerate() {
            *c = field.p[i][j];
        }
        operator.rate(&cell, &mut k1);
        match integrator {
            Integrator::Euler => {
                for i in 0..count {
                    field.p[i][j] = cell[i] + dt * k1[i];
                }
            }
            Integrator::Heun => {
                for i in 0..count {
                    stage[i] = cell[i] + dt * k1[i];
                }
                operator.rate(&stage, &mut k2);
                for i in 0..count {
                    field.p[i][j] = cell[i] + 0.5 * dt * (k1[i] + k2[i]);
                }
            }
        }
    }
}
