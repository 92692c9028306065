//! Parameter sweeps and derived quantities on top of the dispersion roots:
//! attenuation curves over `h`, the attenuation peak, localization lengths
//! and orientation scans.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{
    label, validate_line, Branch, BranchFollower, BranchPolicy, DispersionRoot, DEFAULT_SEED_H_B,
};
use crate::error::{Error, Result};
use crate::model::normalize_theta;

/// Points of the coarse logarithmic scan that brackets a peak.
pub const COARSE_POINTS: usize = 256;
/// Relative bracket width at which [`find_hmax`] stops refining.
pub const PEAK_TOLERANCE: f64 = 1e-4;
/// Relative bracket width used by [`theta_scan`].
pub const SCAN_TOLERANCE: f64 = 1e-8;
/// Peaks below this value count as no attenuation at all.
const FLAT_PEAK: f64 = 1e-12;
/// Lower end of the `theta_scan` range relative to `h_cap`.
const SCAN_DECADES: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowOutcome {
    Root(DispersionRoot),
    /// The point could not be solved; the message explains why.
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub blocking: f64,
    /// Orientation as requested (not reduced).
    pub theta: f64,
    pub n: usize,
    pub outcome: RowOutcome,
}

impl SweepRow {
    pub fn root(&self) -> Option<&DispersionRoot> {
        match &self.outcome {
            RowOutcome::Root(r) => Some(r),
            RowOutcome::Error(_) => None,
        }
    }
}

/// Rows ordered by `theta`, then `B` in the order given, then `h` descending.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Near-degenerate crossings and other continuation notes.
    pub diagnostics: Vec<String>,
}

/// Log-spaced grid from `lo` to `hi` inclusive, `steps` points, descending.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    check_range(lo, hi)?;
    if steps < 2 {
        return Err(Error::domain("h_range", format!("need at least 2 steps, got {steps}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = steps - 1;
    Ok((0..steps)
        .map(|k| match k {
            0 => hi,
            k if k == last => lo,
            k => (b + (a - b) * k as f64 / last as f64).exp(),
        })
        .collect())
}

/// Linearly spaced grid from `lo` to `hi` inclusive, descending.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    check_range(lo, hi)?;
    if steps < 2 {
        return Err(Error::domain("h_range", format!("need at least 2 steps, got {steps}")));
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|k| match k {
            0 => hi,
            k if k == last => lo,
            k => hi + (lo - hi) * k as f64 / last as f64,
        })
        .collect())
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::domain(
            "h_range",
            format!("need 0 < lo < hi, got {lo}:{hi}"),
        ));
    }
    Ok(())
}

/// A continuation line at fixed `(theta, n, B)` that labels all roots at each visited `h`.
#[derive(Clone)]
struct Line {
    follower: BranchFollower,
    scale: f64,
}

impl Line {
    fn seed(theta: f64, n: usize, blocking: f64, h_top: f64) -> Result<Self> {
        let scale = 1.0 + blocking;
        let seed = DEFAULT_SEED_H_B.max(h_top * scale);
        Ok(Line {
            follower: BranchFollower::seed_acoustic(seed, theta, n)?,
            scale,
        })
    }

    fn at(&mut self, h: f64, policy: BranchPolicy) -> Result<Vec<DispersionRoot>> {
        let (poly, roots, k) = self.follower.advance_to(h * self.scale)?;
        Ok(label(&roots, k, &poly, policy))
    }

    fn crossings(&self) -> &[f64] {
        self.follower.near_crossings()
    }
}

/// Continuation-tracked roots for every `(theta, B)` line over `h_grid`.
///
/// Lines run in parallel; the row order is fixed regardless. A point that
/// cannot be solved becomes an error row and the line is reseeded below it.
pub fn sweep(
    thetas: &[f64],
    blockings: &[f64],
    h_grid: &[f64],
    n: usize,
    policy: BranchPolicy,
) -> Result<SweepTable> {
    if thetas.is_empty() {
        return Err(Error::domain("theta", "list must not be empty"));
    }
    if blockings.is_empty() {
        return Err(Error::domain("B", "list must not be empty"));
    }
    if h_grid.is_empty() {
        return Err(Error::domain("h_grid", "must not be empty"));
    }
    if let Some(&h) = h_grid.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
        return Err(Error::domain("h_grid", format!("entries must be positive, got {h}")));
    }
    for &b in blockings {
        validate_line(n, b)?;
    }
    let mut reduced = Vec::with_capacity(thetas.len());
    for &t in thetas {
        reduced.push(normalize_theta(t, n)?);
    }

    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    let mut hs = h_grid.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));

    let lines: Vec<(usize, f64)> = order
        .iter()
        .flat_map(|&t| blockings.iter().map(move |&b| (t, b)))
        .collect();
    let results: Vec<(Vec<SweepRow>, Vec<String>)> = lines
        .par_iter()
        .map(|&(t, b)| sweep_line(thetas[t], reduced[t], b, &hs, n, policy))
        .collect();

    let mut table = SweepTable::default();
    for (rows, notes) in results {
        table.rows.extend(rows);
        table.diagnostics.extend(notes);
    }
    Ok(table)
}

fn sweep_line(
    theta: f64,
    reduced: f64,
    blocking: f64,
    hs: &[f64],
    n: usize,
    policy: BranchPolicy,
) -> (Vec<SweepRow>, Vec<String>) {
    let row = |h: f64, outcome| SweepRow {
        h,
        blocking,
        theta,
        n,
        outcome,
    };
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut line: Option<Line> = None;
    let scale = 1.0 + blocking;
    for &h in hs {
        let attempt = match line.as_mut() {
            Some(l) => Ok(l),
            None => Line::seed(reduced, n, blocking, h).map(|l| line.insert(l)),
        }
        .and_then(|l| {
            let seen = l.crossings().len();
            let roots = l.at(h, policy)?;
            for &h_b in &l.crossings()[seen..] {
                notes.push(format!(
                    "theta = {theta}, B = {blocking}: near-degenerate crossing of the acoustic root near h = {}",
                    h_b / scale
                ));
            }
            Ok(roots)
        });
        match attempt {
            Ok(roots) => {
                let acoustic = &roots[0];
                if acoustic.lambda.im < -1e-12 * acoustic.lambda.norm() {
                    notes.push(format!(
                        "theta = {theta}, B = {blocking}: branch crossing at h = {h}, acoustic lambda_i = {:e} < 0",
                        acoustic.lambda.im
                    ));
                }
                rows.extend(roots.into_iter().map(|r| row(h, RowOutcome::Root(r))));
            }
            Err(e) => {
                rows.push(row(h, RowOutcome::Error(e.to_string())));
                line = None;
            }
        }
    }
    (rows, notes)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakResult {
    pub h_max: f64,
    pub lambda_i_max: f64,
    /// Final search interval in `h`.
    pub bracket: (f64, f64),
}

/// Largest value of a branch quantity over a log grid, refined by golden section.
struct Maximum {
    h: f64,
    value: f64,
    bracket: (f64, f64),
    interior: bool,
}

fn acoustic_attenuation(roots: &[DispersionRoot]) -> Option<f64> {
    roots.first().map(|r| r.lambda.im)
}

fn secondary_attenuation(roots: &[DispersionRoot]) -> Option<f64> {
    roots
        .iter()
        .filter(|r| r.branch != Branch::Acoustic)
        .map(|r| r.lambda.im)
        .max_by(f64::total_cmp)
}

fn branch_attenuation(roots: &[DispersionRoot], branch: Branch) -> Option<f64> {
    roots.iter().find(|r| r.branch == branch).map(|r| r.lambda.im)
}

/// Scans `grid` (descending) along `line` and refines every requested maximum.
fn maximize(
    line: Line,
    grid: &[f64],
    selectors: &[&dyn Fn(&[DispersionRoot]) -> Option<f64>],
    tolerance: f64,
) -> Result<Vec<Option<Maximum>>> {
    let mut scan = line;
    let mut states = Vec::with_capacity(grid.len());
    let mut values: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(grid.len()); selectors.len()];
    for &h in grid {
        let roots = scan.at(h, BranchPolicy::All).map_err(|e| e.at_h(h))?;
        states.push(scan.clone());
        for (s, v) in selectors.iter().zip(values.iter_mut()) {
            v.push(s(&roots));
        }
    }

    let last = grid.len() - 1;
    let mut out = Vec::with_capacity(selectors.len());
    for (s, v) in selectors.iter().zip(&values) {
        let best = v
            .iter()
            .enumerate()
            .filter_map(|(k, x)| x.map(|x| (k, x)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((k, value)) = best else {
            out.push(None);
            continue;
        };
        let defined = |j: usize| v[j].is_some();
        if k == 0 || k == last || !defined(k - 1) || !defined(k + 1) {
            out.push(Some(Maximum {
                h: grid[k],
                value,
                bracket: (grid[k], grid[k]),
                interior: false,
            }));
            continue;
        }
        let mut refine = states[k - 1].clone();
        let mut eval = |h: f64| -> Result<f64> {
            let roots = refine.at(h, BranchPolicy::All).map_err(|e| e.at_h(h))?;
            s(&roots).ok_or_else(|| Error::domain("branch", format!("branch vanishes at h = {h}")))
        };
        out.push(Some(golden_section(
            &mut eval,
            grid[k + 1],
            grid[k - 1],
            (grid[k], value),
            tolerance,
        )?));
    }
    Ok(out)
}

/// Golden-section maximization in `log h` over `[lo, hi]`, given one interior sample.
fn golden_section(
    eval: &mut dyn FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    sample: (f64, f64),
    tolerance: f64,
) -> Result<Maximum> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = eval(x1.exp())?;
    let mut f2 = eval(x2.exp())?;
    let mut best = sample;
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > best.1 {
            best = (x.exp(), f);
        }
    }
    while b.exp() - a.exp() >= tolerance * best.0 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1.exp())?;
            if f1 > best.1 {
                best = (x1.exp(), f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2.exp())?;
            if f2 > best.1 {
                best = (x2.exp(), f2);
            }
        }
        if b - a < 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
    }
    Ok(Maximum {
        h: best.0,
        value: best.1,
        bracket: (a.exp(), b.exp()),
        interior: true,
    })
}

/// Location and value of the largest `lambda_i` over `h` on one branch.
///
/// A coarse scan of [`COARSE_POINTS`] log-spaced values brackets the
/// maximum, which is then refined by golden section until the bracket is
/// narrower than [`PEAK_TOLERANCE`] `* h_max`.
pub fn find_hmax(
    theta: f64,
    blocking: f64,
    n: usize,
    branch: Branch,
    h_range: (f64, f64),
) -> Result<PeakResult> {
    validate_line(n, blocking)?;
    let (lo, hi) = h_range;
    check_range(lo, hi)?;
    if hi / lo < 100.0 {
        return Err(Error::domain(
            "h_range",
            format!("must span at least two decades, got {lo}:{hi}"),
        ));
    }
    let theta = normalize_theta(theta, n)?;
    let grid = log_grid(lo, hi, COARSE_POINTS)?;
    let line = Line::seed(theta, n, blocking, hi)?;
    let select = move |roots: &[DispersionRoot]| branch_attenuation(roots, branch);
    let found = maximize(line, &grid, &[&select], PEAK_TOLERANCE)?.remove(0);
    let Some(max) = found else {
        return Err(Error::domain(
            "branch",
            format!("no {branch} root at theta = {theta}, n = {n}"),
        ));
    };
    if !max.interior || max.value <= FLAT_PEAK {
        return Err(Error::NoInteriorMaximum { lo, hi });
    }
    Ok(PeakResult {
        h_max: max.h,
        lambda_i_max: max.value,
        bracket: max.bracket,
    })
}

/// `1 / lambda_i`, or no finite length when there is no absorption.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalizationLength {
    Finite(f64),
    Infinite,
}

impl LocalizationLength {
    /// Localization length for attenuation `lambda_i`.
    pub fn from_attenuation(lambda_i: f64) -> Self {
        Self::Finite(lambda_i).reciprocal()
    }

    /// `1 / x`, mapping zero to the infinite marker and back.
    pub fn reciprocal(self) -> Self {
        match self {
            LocalizationLength::Finite(x) if x == 0.0 => LocalizationLength::Infinite,
            LocalizationLength::Finite(x) => LocalizationLength::Finite(1.0 / x),
            LocalizationLength::Infinite => LocalizationLength::Finite(0.0),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            LocalizationLength::Finite(x) => x,
            LocalizationLength::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub row: SweepRow,
    pub length: LocalizationLength,
}

/// Attaches `1 / lambda_i` to every solved row. Attenuation below
/// `1e-14 |lambda|` is treated as none.
pub fn localization_length(table: &SweepTable) -> Vec<LocalizationRow> {
    table
        .rows
        .iter()
        .filter_map(|row| {
            let root = row.root()?;
            let lambda_i = if root.lambda.im.abs() <= 1e-14 * root.lambda.norm() {
                0.0
            } else {
                root.lambda.im
            };
            Some(LocalizationRow {
                row: row.clone(),
                length: LocalizationLength::from_attenuation(lambda_i),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub theta: f64,
    /// `Acoustic`, or `Secondary(1)` for the largest attenuation among the other roots.
    pub branch: Branch,
    pub lambda_i_max: f64,
    /// Where the maximum is attained.
    pub h_at_max: f64,
    /// True when the maximum sits at `h_cap` rather than in the interior.
    pub at_cap: bool,
}

/// Orientations `(pi/n) k / steps` for `k = 0..=steps`, plus `pi/4` when it
/// lies in range and is missing.
pub fn theta_grid(n: usize, steps: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain("n", format!("must be at least 2, got {n}")));
    }
    if steps == 0 {
        return Err(Error::domain("steps", "must be at least 1"));
    }
    let top = PI / n as f64;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| if k == steps { top } else { top * k as f64 / steps as f64 })
        .collect();
    if FRAC_PI_4 <= top && !grid.iter().any(|&t| (t - FRAC_PI_4).abs() < 1e-15) {
        grid.push(FRAC_PI_4);
        grid.sort_by(f64::total_cmp);
    }
    for t in grid.iter_mut() {
        if (*t - FRAC_PI_4).abs() < 1e-15 {
            *t = FRAC_PI_4;
        }
    }
    Ok(grid)
}

/// Largest `lambda_i` over `h in [1e-4 h_cap, h_cap]` per orientation, for
/// the acoustic branch and separately for the most attenuated other root.
///
/// Rows keep the order of `thetas`, acoustic first; orientations with a
/// single root have no secondary row.
pub fn theta_scan(blocking: f64, n: usize, h_cap: f64, thetas: &[f64]) -> Result<Vec<ThetaRow>> {
    validate_line(n, blocking)?;
    if !(h_cap.is_finite() && h_cap > 0.0) {
        return Err(Error::domain("h_cap", format!("must be positive, got {h_cap}")));
    }
    if thetas.is_empty() {
        return Err(Error::domain("theta", "grid must not be empty"));
    }
    let grid = log_grid(h_cap * SCAN_DECADES, h_cap, COARSE_POINTS)?;
    let per_theta: Vec<Vec<ThetaRow>> = thetas
        .par_iter()
        .map(|&theta| {
            let reduced = normalize_theta(theta, n)?;
            let line = Line::seed(reduced, n, blocking, h_cap)?;
            let found = maximize(
                line,
                &grid,
                &[&acoustic_attenuation, &secondary_attenuation],
                SCAN_TOLERANCE,
            )?;
            let mut rows = Vec::with_capacity(2);
            for (max, branch) in found.into_iter().zip([Branch::Acoustic, Branch::Secondary(1)]) {
                match max {
                    // A branch that stays undamped up to round-off has no peak to locate.
                    Some(m) if m.value <= FLAT_PEAK => rows.push(ThetaRow {
                        theta,
                        branch,
                        lambda_i_max: 0.0,
                        h_at_max: h_cap,
                        at_cap: true,
                    }),
                    Some(m) => rows.push(ThetaRow {
                        theta,
                        branch,
                        lambda_i_max: m.value,
                        h_at_max: m.h,
                        at_cap: !m.interior && m.h == h_cap,
                    }),
                    None => {}
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_theta.into_iter().flatten().collect())
}
