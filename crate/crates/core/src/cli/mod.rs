//! Command-line front end.
//!
//! Subcommands `pattern`, `telescope`, `montecarlo` and `eraser` each
//! resolve a [`RunConfig`] (defaults, then an optional `--config` TOML file,
//! then flags), compute, and write CSV or JSON to `--out` or stdout.
//!
//! Exit codes: 0 success, 1 physics-check failure, 2 usage error.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::eraser::eraser_patterns;
use crate::experiment::{
    closed_form_screen_probability, detection_probability, fringe_visibility, screen_pattern,
    source_state, telescope_field_operator, telescope_pattern, Slit,
};
use crate::stochastic::{compare_runs, ComparisonReport, MonteCarlo, RunStatistics};

pub use config::{ConfigLayer, OutputFormat, PolicySpec, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PHYSICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest tolerated gap between operator and closed-form screen columns.
pub const PATTERN_AGREEMENT_TOLERANCE: f64 = 1e-9;
/// Flatness and complementarity tolerance for telescope and eraser checks.
pub const FLATNESS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "delayed-choice", version, about = "Double-slit delayed-choice simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Screen pattern from the field operator and the closed form (CSV).
    Pattern(Flags),
    /// Per-slit telescope probabilities and visibility (JSON).
    Telescope(Flags),
    /// Before/after delayed-choice Monte Carlo runs and their comparison (JSON).
    Montecarlo(Flags),
    /// Marked and erased patterns of the polarization eraser (JSON).
    Eraser(Flags),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct Flags {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Slit separation (m).
    #[arg(long = "d")]
    d: Option<f64>,
    /// Slit-to-screen distance (m).
    #[arg(long = "L")]
    l: Option<f64>,
    /// Source-to-slit distance (m).
    #[arg(long)]
    ds: Option<f64>,
    /// Wavelength (m).
    #[arg(long, conflicts_with = "k")]
    wavelength: Option<f64>,
    /// Wavenumber (rad/m).
    #[arg(long)]
    k: Option<f64>,
    /// Source amplitude per slit
    #[arg(long)]
    epsilon: Option<f64>,
    /// Source phase at slit a (rad)
    #[arg(long = "phi-a")]
    phi_a: Option<f64>,
    /// Source phase at slit b (rad)
    #[arg(long = "phi-b")]
    phi_b: Option<f64>,
    /// Left edge of the screen window (m)
    #[arg(long)]
    xmin: Option<f64>,
    /// Right edge of the screen window (m)
    #[arg(long)]
    xmax: Option<f64>,
    /// Number of screen grid points.
    #[arg(long)]
    grid: Option<usize>,
    /// Monte Carlo histogram bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Monte Carlo events per run
    #[arg(long)]
    events: Option<u64>,
    /// Monte Carlo seed
    #[arg(long)]
    seed: Option<u64>,
    /// always-screen | always-telescope | random[:p_screen]
    #[arg(long)]
    policy: Option<PolicySpec>,
    /// before | after
    #[arg(long = "choice-time", value_parser = config::parse_choice_time)]
    choice_time: Option<crate::stochastic::ChoiceTime>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long = "dump-config")]
    dump_config: bool,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            d: self.d,
            l: self.l,
            ds: self.ds,
            wavelength: self.wavelength,
            k: self.k,
            epsilon: self.epsilon,
            phi_a: self.phi_a,
            phi_b: self.phi_b,
            xmin: self.xmin,
            xmax: self.xmax,
            grid: self.grid,
            bins: self.bins,
            events: self.events,
            seed: self.seed,
            policy: self.policy,
            choice_time: self.choice_time,
            format: self.format,
        }
    }

    fn resolve(&self) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.overlay(&ConfigLayer::from_file(path)?)?;
        }
        cfg.overlay(&self.layer())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Rendered command output plus the exit code it implies.
struct Report {
    body: String,
    code: i32,
    note: Option<String>,
}

fn csv_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_pattern(cfg: &RunConfig) -> crate::Result<Report> {
    let g = cfg.geometry()?;
    let sp = cfg.source()?;
    let grid = cfg.x_grid();
    let pattern = screen_pattern(&g, &sp, &grid)?;
    let closed: Vec<f64> = grid.iter().map(|&x| closed_form_screen_probability(&g, &sp, x)).collect();
    let max_diff = pattern
        .values()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let body = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out = String::from("x,p_op,p_closed\n");
            for (pt, pc) in pattern.points().iter().zip(&closed) {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    csv_number(pt.x),
                    csv_number(pt.p.max(0.0)),
                    csv_number(pc.max(0.0))
                );
            }
            out
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                x: Vec<f64>,
                p_op: Vec<f64>,
                p_closed: &'a [f64],
                max_abs_diff: f64,
            }
            to_json(&Out {
                x: grid.clone(),
                p_op: pattern.values().map(|p| p.max(0.0)).collect(),
                p_closed: &closed.iter().map(|p| p.max(0.0)).collect::<Vec<_>>(),
                max_abs_diff: max_diff,
            })
        }
    };
    let ok = max_diff <= PATTERN_AGREEMENT_TOLERANCE;
    Ok(Report {
        body,
        code: if ok { EXIT_OK } else { EXIT_PHYSICS },
        note: (!ok).then(|| format!("operator and closed-form columns differ by {max_diff:e}")),
    })
}

#[derive(Debug, Serialize)]
struct TelescopeSummary {
    epsilon: f64,
    expected: f64,
    p_a: f64,
    p_b: f64,
    visibility_a: f64,
    visibility_b: f64,
    visibility: f64,
    equal: bool,
}

fn cmd_telescope(cfg: &RunConfig) -> crate::Result<Report> {
    let g = cfg.geometry()?;
    let sp = cfg.source()?;
    let state = source_state(&sp)?;
    let p_a = detection_probability(&telescope_field_operator(&g, Slit::A, None), &state)?;
    let p_b = detection_probability(&telescope_field_operator(&g, Slit::B, None), &state)?;
    let grid = cfg.x_grid();
    let pat_a = telescope_pattern(&g, &sp, Slit::A, &grid)?;
    let pat_b = telescope_pattern(&g, &sp, Slit::B, &grid)?;
    let visibility_a = fringe_visibility(&pat_a)?;
    let visibility_b = fringe_visibility(&pat_b)?;
    let visibility = visibility_a.max(visibility_b);
    let equal = (p_a - p_b).abs() <= FLATNESS_TOLERANCE;
    let ok = equal && visibility <= FLATNESS_TOLERANCE;

    let body = match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => to_json(&TelescopeSummary {
            epsilon: sp.epsilon,
            expected: 0.5 * sp.epsilon * sp.epsilon,
            p_a,
            p_b,
            visibility_a,
            visibility_b,
            visibility,
            equal,
        }),
        OutputFormat::Csv => {
            let mut out = String::from("aperture_x,p_a,p_b\n");
            for (a, b) in pat_a.points().iter().zip(pat_b.points()) {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    csv_number(a.x),
                    csv_number(a.p.max(0.0)),
                    csv_number(b.p.max(0.0))
                );
            }
            out
        }
    };
    Ok(Report {
        body,
        code: if ok { EXIT_OK } else { EXIT_PHYSICS },
        note: (!ok).then(|| "telescope probabilities are not uniform".to_string()),
    })
}

#[derive(Debug, Serialize)]
struct MonteCarloOutput {
    before: RunStatistics,
    after: RunStatistics,
    identical: bool,
    after_independent: RunStatistics,
    comparison: ComparisonReport,
}

/// Seed of the independent "after" run derived from the configured seed.
pub fn independent_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

fn cmd_montecarlo(cfg: &RunConfig) -> crate::Result<Report> {
    let g = cfg.geometry()?;
    let sp = cfg.source()?;
    let mc = MonteCarlo::new(&g, &sp, cfg.setup()?)?;
    let policy = cfg.policy()?;
    let before_policy = crate::stochastic::ChoicePolicy {
        choice_time: crate::stochastic::ChoiceTime::BeforeSlit,
        ..policy
    };
    let after_policy = crate::stochastic::ChoicePolicy {
        choice_time: crate::stochastic::ChoiceTime::AfterSlit,
        ..policy
    };
    let before = mc.run(&before_policy, cfg.events, cfg.seed)?;
    let after = mc.run(&after_policy, cfg.events, cfg.seed)?;
    let after_independent = mc.run(&after_policy, cfg.events, independent_seed(cfg.seed))?;
    let identical = before.same_outcomes(&after);
    let comparison = compare_runs(&before, &after_independent)?;
    let ok = identical && comparison.indistinguishable;
    let out = MonteCarloOutput { before, after, identical, after_independent, comparison };
    Ok(Report {
        body: to_json(&out),
        code: if ok { EXIT_OK } else { EXIT_PHYSICS },
        note: (!ok).then(|| "before/after runs are distinguishable".to_string()),
    })
}

#[derive(Debug, Serialize)]
struct EraserSummary {
    marked_visibility: f64,
    erased_diag_visibility: f64,
    erased_antidiag_visibility: f64,
    complementarity_max_error: f64,
    complementarity: &'static str,
    marked_flat: bool,
}

#[derive(Debug, Serialize)]
struct EraserOutput {
    summary: EraserSummary,
    x: Vec<f64>,
    marked: Vec<f64>,
    erased_diag: Vec<f64>,
    erased_antidiag: Vec<f64>,
}

fn cmd_eraser(cfg: &RunConfig) -> crate::Result<Report> {
    let g = cfg.geometry()?;
    let sp = cfg.source()?;
    let grid = cfg.x_grid();
    let pats = eraser_patterns(&g, &sp, &grid)?;
    let marked: Vec<f64> = pats.marked.values().collect();
    let diag: Vec<f64> = pats.erased_diag.values().collect();
    let anti: Vec<f64> = pats.erased_antidiag.values().collect();
    let err = marked
        .iter()
        .zip(&diag)
        .zip(&anti)
        .map(|((m, d), a)| (d + a - m).abs())
        .fold(0.0, f64::max);
    let summary = EraserSummary {
        marked_visibility: fringe_visibility(&pats.marked)?,
        erased_diag_visibility: fringe_visibility(&pats.erased_diag)?,
        erased_antidiag_visibility: fringe_visibility(&pats.erased_antidiag)?,
        complementarity_max_error: err,
        complementarity: if err <= FLATNESS_TOLERANCE { "pass" } else { "fail" },
        marked_flat: false,
    };
    let summary = EraserSummary {
        marked_flat: summary.marked_visibility <= FLATNESS_TOLERANCE,
        ..summary
    };
    let ok = summary.marked_flat && err <= FLATNESS_TOLERANCE;
    let clamp = |v: &[f64]| v.iter().map(|p| p.max(0.0)).collect::<Vec<_>>();

    let (body, note) = match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => (
            to_json(&EraserOutput {
                x: grid,
                marked: clamp(&marked),
                erased_diag: clamp(&diag),
                erased_antidiag: clamp(&anti),
                summary,
            }),
            None,
        ),
        OutputFormat::Csv => {
            let mut out = String::from("x,marked,erased_diag,erased_antidiag\n");
            for i in 0..grid.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    csv_number(grid[i]),
                    csv_number(marked[i].max(0.0)),
                    csv_number(diag[i].max(0.0)),
                    csv_number(anti[i].max(0.0))
                );
            }
            (out, Some(serde_json::to_string(&summary).expect("serializable")))
        }
    };
    let note = if ok { note } else { Some(note.unwrap_or_else(|| "eraser checks failed".into())) };
    Ok(Report { body, code: if ok { EXIT_OK } else { EXIT_PHYSICS }, note })
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Results go to `--out` or `stdout`;
/// diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let (flags, command): (&Flags, fn(&RunConfig) -> crate::Result<Report>) = match &cli.command {
        Command::Pattern(f) => (f, cmd_pattern),
        Command::Telescope(f) => (f, cmd_telescope),
        Command::Montecarlo(f) => (f, cmd_montecarlo),
        Command::Eraser(f) => (f, cmd_eraser),
    };
    let cfg = match flags.resolve() {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };

    let report = if flags.dump_config {
        Report { body: cfg.to_toml(), code: EXIT_OK, note: None }
    } else {
        match command(&cfg) {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return if e.is_invalid_argument() { EXIT_USAGE } else { EXIT_PHYSICS };
            }
        }
    };

    let written = match &flags.out {
        Some(path) => std::fs::write(path, report.body.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(report.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    if let Some(note) = report.note {
        let _ = writeln!(stderr, "{note}");
    }
    report.code
}
