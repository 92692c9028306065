mod args;
mod config;
mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use dvsound::analysis::{
    find_hmax, linear_grid, localization_length, log_grid, sweep, theta_grid, theta_scan,
    SweepRow, SweepTable, RowOutcome,
};
use dvsound::dispersion::{roots_by_branch, Branch, BranchPolicy};
use dvsound::output::{self, Format};
use dvsound::simulate::{run_forced, write_snapshots, Drive, ForcingOptions, Mode, Scheme};
use dvsound::{Error, ModelConfig, Statistics};

use args::{
    Cli, Command, DriveArg, FormatArg, HmaxArgs, ModelArgs, PolicyArg, RootsArgs, SchemeArg,
    SimulateArgs, StatisticsArg, SweepArgs, ThetaScanArgs, VerifyArgs,
};

/// Failure of a command, carrying its exit code.
enum Failure {
    Usage(String),
    Core(Error),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    match config::take_config_path(&mut argv) {
        Ok(Some(path)) => match config::load(Path::new(&path)) {
            Ok(entries) => config::merge(&mut argv, &entries),
            Err(e) => return report(Failure::Usage(format!("--config {e}"))),
        },
        Ok(None) => {}
        Err(e) => return report(Failure::Usage(e)),
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(failure: Failure) -> ExitCode {
    match failure {
        Failure::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Failure::Core(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
        Failure::ChecksFailed => {
            eprintln!("error: some checks failed");
            ExitCode::from(2)
        }
    }
}

/// Error text with internal field names replaced by the matching flag.
fn describe(e: &Error) -> String {
    match e {
        Error::Domain { field, reason } => format!("invalid {}: {reason}", flag_for(field)),
        other => other.to_string(),
    }
}

fn flag_for(field: &str) -> String {
    match field {
        "h" | "B" | "theta" | "n" | "S" | "N0" | "c" | "omega" | "gamma" | "eps" | "ppw"
        | "periods" | "wavelengths" | "steps" | "branch" | "format" => format!("--{field}"),
        "h_range" | "h_grid" => "--h-range".into(),
        "h_cap" => "--h-cap".into(),
        other => other.into(),
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Roots(a) => roots(a),
        Command::Sweep(a) => sweep_command(a, false),
        Command::Localization(a) => sweep_command(a, true),
        Command::Hmax(a) => hmax(a),
        Command::ThetaScan(a) => theta_scan_command(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn policy_of(p: PolicyArg) -> BranchPolicy {
    match p {
        PolicyArg::Acoustic => BranchPolicy::Acoustic,
        PolicyArg::All => BranchPolicy::All,
    }
}

/// Runs `write` against `path`, or standard output when there is none.
fn with_output(
    path: Option<&PathBuf>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Outcome {
    match path {
        Some(p) => {
            let io_err = |source| Failure::Core(Error::Io { path: p.clone(), source });
            let mut out = BufWriter::new(File::create(p).map_err(io_err)?);
            write(&mut out).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out).map_err(|source| {
                Failure::Core(Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
            })
        }
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid {flag}: {msg}"))
}

fn model_config(m: &ModelArgs) -> Result<ModelConfig, Failure> {
    let physical = [m.c, m.cross_section, m.density, m.omega, m.gamma];
    let any_physical = physical.iter().any(Option::is_some);
    if any_physical {
        if m.h.is_some() || m.blocking.is_some() || m.statistics.is_some() {
            return Err(Failure::Usage(
                "give either --h/--B or the physical set --c --S --N0 --omega --gamma, not both".into(),
            ));
        }
        let names = ["--c", "--S", "--N0", "--omega", "--gamma"];
        let mut values = [0.0; 5];
        for ((v, name), slot) in physical.iter().zip(names).zip(values.iter_mut()) {
            *slot = v.ok_or_else(|| Failure::Usage(format!("missing {name} for the physical parameter set")))?;
        }
        let [c, s, n0, omega, gamma] = values;
        return Ok(ModelConfig::physical(m.n, m.theta, c, s, n0, omega, gamma)?);
    }
    let h = m.h.ok_or_else(|| Failure::Usage("missing --h".into()))?;
    let b = m.blocking.unwrap_or(0.0);
    let statistics = match m.statistics {
        Some(StatisticsArg::Bose) => Statistics::Bose,
        Some(StatisticsArg::Fermi) => Statistics::Fermi,
        Some(StatisticsArg::Boltzmann) => Statistics::Boltzmann,
        None => Statistics::from_blocking(b),
    };
    Ok(ModelConfig::reduced_with(m.n, m.theta, h, b, statistics)?)
}

fn roots(a: RootsArgs) -> Outcome {
    let cfg = model_config(&a.model)?;
    let p = cfg.reduced_params();
    let roots = roots_by_branch(p.h_b, cfg.theta, cfg.n, policy_of(a.branch))?;
    let table = SweepTable {
        rows: roots
            .into_iter()
            .map(|r| SweepRow {
                h: p.h,
                blocking: cfg.blocking,
                theta: a.model.theta,
                n: cfg.n,
                outcome: RowOutcome::Root(r),
            })
            .collect(),
        diagnostics: Vec::new(),
    };
    let format = format_of(a.format);
    with_output(a.out.as_ref(), |out| output::write_table(out, &table, format))
}

fn sweep_command(a: SweepArgs, localize: bool) -> Outcome {
    let (lo, hi, steps) = parse::range(&a.h_range, true).map_err(|e| usage("--h-range", e))?;
    let steps = steps.unwrap_or(2);
    let grid = if a.linear {
        linear_grid(lo, hi, steps)?
    } else {
        log_grid(lo, hi, steps)?
    };
    let thetas = parse::list(&a.theta, parse::angle).map_err(|e| usage("--theta", e))?;
    let blockings = parse::list(&a.blocking, parse::number).map_err(|e| usage("--B", e))?;
    let table = sweep(&thetas, &blockings, &grid, a.n, policy_of(a.branch))?;
    for note in &table.diagnostics {
        eprintln!("note: {note}");
    }
    let failed = table
        .rows
        .iter()
        .filter(|r| matches!(r.outcome, RowOutcome::Error(_)))
        .count();
    if failed > 0 {
        eprintln!("note: {failed} row(s) could not be solved and are marked as errors");
    }
    let format = format_of(a.format);
    if localize {
        let rows = localization_length(&table);
        with_output(a.out.as_ref(), |out| output::write_localization(out, &rows, format))
    } else {
        with_output(a.out.as_ref(), |out| output::write_table(out, &table, format))
    }
}

fn hmax(a: HmaxArgs) -> Outcome {
    let (lo, hi, _) = parse::range(&a.h_range, false).map_err(|e| usage("--h-range", e))?;
    let branch: Branch = a.branch.parse()?;
    let peak = find_hmax(a.theta, a.blocking, a.n, branch, (lo, hi))?;
    let format = format_of(a.format);
    with_output(a.out.as_ref(), |out| {
        output::write_peak(out, &peak, a.theta, a.blocking, a.n, branch, format)
    })
}

fn theta_scan_command(a: ThetaScanArgs) -> Outcome {
    let grid = theta_grid(a.n, a.steps)?;
    let rows = theta_scan(a.blocking, a.n, a.h_cap, &grid)?;
    let format = format_of(a.format);
    with_output(a.out.as_ref(), |out| {
        output::write_theta_scan(out, &rows, a.blocking, a.n, format)
    })
}

fn simulate(a: SimulateArgs) -> Outcome {
    let cfg = model_config(&a.model)?;
    if a.stride == 0 {
        return Err(usage("--stride", "must be at least 1"));
    }
    let options = ForcingOptions {
        wavelengths: a.wavelengths,
        points_per_wavelength: a.ppw,
        transient_periods: a.transient,
        periods: a.periods,
        amplitude: a.eps,
        mode: if a.nonlinear { Mode::Nonlinear } else { Mode::Linear },
        scheme: match a.scheme {
            SchemeArg::LaxWendroff => Scheme::LaxWendroff,
            SchemeArg::Upwind => Scheme::Upwind,
        },
        drive: match a.drive {
            DriveArg::Mode => Drive::ModePure,
            DriveArg::Uniform => Drive::Uniform,
        },
    };
    let run = run_forced(&cfg, &options)?;
    if let Some(path) = &a.out {
        write_snapshots(path, &run, a.stride)?;
    }
    let fit = run.fit()?;
    let oracle = dvsound::dispersion::acoustic_root(cfg.h_b(), cfg.theta, cfg.n)?;
    let f = output::format_float;
    let p = cfg.reduced_params();
    let lines = [
        ("h", f(p.h)),
        ("B", f(cfg.blocking)),
        ("theta", f(cfg.theta)),
        ("n", cfg.n.to_string()),
        ("mode", if a.nonlinear { "nonlinear" } else { "linear" }.to_owned()),
        ("dt", f(run.dt)),
        ("steps_per_period", run.steps_per_period.to_string()),
        ("discarded_periods", run.discarded_periods.to_string()),
        ("k_r", f(fit.k_r)),
        ("k_i", f(fit.k_i)),
        ("lambda_r", f(fit.lambda_meas.re)),
        ("lambda_i", f(fit.lambda_meas.im)),
        ("rms_residual", f(fit.rms_residual)),
        ("root_lambda_r", f(oracle.lambda.re)),
        ("root_lambda_i", f(oracle.lambda.im)),
        ("extrapolated", run.extrapolated.to_string()),
    ];
    with_output(None, |out| {
        for (k, v) in lines {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    })
}

fn verify(a: VerifyArgs) -> Outcome {
    let checks = dvsound::verify::run_checks(a.seed);
    let text = dvsound::verify::render(&checks);
    with_output(None, |out| out.write_all(text.as_bytes()))?;
    if checks.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
