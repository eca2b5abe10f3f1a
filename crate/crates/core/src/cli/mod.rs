//! Command-line front end.
//!
//! Exit codes: `0` success, `1` usage or configuration error, `2`
//! computation error (singular or invalid paths).

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::engine::{
    assemble_total_state, chsh_value, closed_form_correlation, compute_phases,
    compute_phases_quadrature, correlation, exhaustive_lhv_max, joint_probabilities,
    lhv_reference_bound, meeting_amplitudes, scan_chsh_over_locations, ChshSettings, Contour,
    EngineError, ScanOptions,
};
use crate::geometry::validate_path;
use crate::spin::CoupledLabel;

pub use config::{ConfigError, ExperimentConfig};
use report::*;

/// Set to `1` to run scans on a single thread.
pub const NO_PARALLEL_ENV: &str = "AC_BELL_NO_PARALLEL";

#[derive(Debug, Parser)]
#[command(
    name = "ac-bell",
    version,
    about = "Aharonov-Casher four-particle Bell test simulator"
)]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Report format; CSV is available for `scan`.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Gauss-Legendre nodes per segment for the quadrature cross-check.
    #[arg(long, global = true)]
    nodes: Option<usize>,

    /// Seed of the local-strategy sampler.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Exclusion radius around the line charge.
    #[arg(long, global = true)]
    exclusion: Option<f64>,

    /// Print the normalized configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Contour phases and their quadrature cross-check.
    Phases,
    /// Product-basis and meeting-pair coupled amplitudes.
    State,
    /// Joint probabilities and correlation at the configured meeting points.
    Correlate,
    /// CHSH sum from `meetings.a_prime`/`b_prime` or from direct phases.
    Chsh {
        /// Station phases `phi_a,phi_a',phi_b,phi_b'` in radians.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direct: Option<Vec<f64>>,
    },
    /// Exhaustive CHSH search over the configured loci.
    Scan,
    /// Classical bound from deterministic local strategies.
    Lhv {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Check every contour against the exclusion radius.
    Validate,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] EngineError),
    #[error("{0} contour(s) violate the exclusion radius")]
    InvalidPaths(usize),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Compute(_) | CliError::InvalidPaths(_) => 2,
        }
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    let parallel = std::env::var(NO_PARALLEL_ENV).map_or(true, |v| v != "1");
    match execute(&cli, parallel, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let _ = writeln!(stderr, "  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --config <PATH>".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(nodes) = cli.nodes {
        config.numerics.nodes = nodes;
    }
    if let Some(r) = cli.exclusion {
        config.numerics.exclusion_radius = r;
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli, parallel: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    if cli.format == Format::Csv && !matches!(cli.command, Some(Command::Scan)) {
        return Err(CliError::Usage(
            "--format csv is only available for `scan`".into(),
        ));
    }
    if cli.dump_config {
        let config = load_config(cli)?;
        emit(out, &to_json(&config));
        return Ok(0);
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage(
            "no command given; try `ac-bell --help`".into(),
        ));
    };
    let text = match command {
        Command::Phases => {
            let config = load_config(cli)?;
            let layout = config.layout();
            let p = compute_phases(&layout)?;
            let q = compute_phases_quadrature(&layout, config.numerics.nodes)?;
            let [p1, p2, p3, p4] = p.radians();
            let deltas = [
                q[0].radians() - p1,
                q[1].radians() - p2,
                q[2].radians() - p3,
                q[3].radians() - p4,
            ];
            to_json(&PhasesReport {
                phi1: p1,
                phi2: p2,
                phi3: p3,
                phi4: p4,
                phi_a: p.phi_a().radians(),
                phi_b: p.phi_b().radians(),
                quadrature: QuadratureCheck {
                    nodes: config.numerics.nodes,
                    phi1_delta: deltas[0],
                    phi2_delta: deltas[1],
                    phi3_delta: deltas[2],
                    phi4_delta: deltas[3],
                    max_abs_delta: deltas.iter().fold(0.0, |m, d| m.max(d.abs())),
                },
            })
        }
        Command::State => {
            let config = load_config(cli)?;
            let p = compute_phases(&config.layout())?;
            let state = assemble_total_state(&p);
            let coupled = meeting_amplitudes(&state);
            let [p1, p2, p3, p4] = p.radians();
            to_json(&StateReport {
                phi1: p1,
                phi2: p2,
                phi3: p3,
                phi4: p4,
                phi_a: p.phi_a().radians(),
                phi_b: p.phi_b().radians(),
                product: state
                    .iter()
                    .map(|(label, amp)| ProductAmplitude {
                        label: label.to_string(),
                        re: amp.re,
                        im: amp.im,
                    })
                    .collect(),
                coupled_grouping: "(1,4),(2,3)",
                coupled: CoupledLabel::ALL
                    .iter()
                    .enumerate()
                    .flat_map(|(i, a)| {
                        CoupledLabel::ALL
                            .iter()
                            .enumerate()
                            .map(move |(j, b)| (i, a, j, b))
                    })
                    .map(|(i, a, j, b)| CoupledAmplitude {
                        a: a.name(),
                        b: b.name(),
                        re: coupled[i][j].re,
                        im: coupled[i][j].im,
                    })
                    .collect(),
            })
        }
        Command::Correlate => {
            let config = load_config(cli)?;
            let p = compute_phases(&config.layout())?;
            let dist = joint_probabilities(&assemble_total_state(&p))?;
            let (pa, pb) = (p.phi_a().radians(), p.phi_b().radians());
            to_json(&CorrelateReport {
                phi_a: pa,
                phi_b: pb,
                distribution: (&dist).into(),
                e: correlation(&dist)?,
                e_closed_form: closed_form_correlation(pa, pb),
            })
        }
        Command::Chsh { direct } => {
            let record = match direct {
                Some(v) => {
                    let [phi_a, phi_a_prime, phi_b, phi_b_prime] =
                        <[f64; 4]>::try_from(v.as_slice()).map_err(|_| {
                            CliError::Usage(format!(
                                "--direct expects 4 comma-separated phases, got {}",
                                v.len()
                            ))
                        })?;
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(CliError::Usage("--direct phases must be finite".into()));
                    }
                    let settings = ChshSettings::Direct {
                        phi_a,
                        phi_a_prime,
                        phi_b,
                        phi_b_prime,
                    };
                    chsh_value(&settings, None)?
                }
                None => {
                    let config = load_config(cli)?;
                    let m = &config.meetings;
                    let (Some(a_prime), Some(b_prime)) = (m.a_prime, m.b_prime) else {
                        return Err(ConfigError {
                            path: "meetings".into(),
                            message: "geometric CHSH needs `a_prime` and `b_prime`".into(),
                        }
                        .into());
                    };
                    let settings = ChshSettings::Geometric {
                        a: m.a,
                        a_prime,
                        b: m.b,
                        b_prime,
                    };
                    chsh_value(&settings, Some(&config.layout()))?
                }
            };
            to_json(&ChshReport::from(&record))
        }
        Command::Scan => {
            let config = load_config(cli)?;
            let Some(scan) = &config.scan else {
                return Err(ConfigError {
                    path: "scan".into(),
                    message: "the scan command needs a `scan` section".into(),
                }
                .into());
            };
            let outcome = scan_chsh_over_locations(
                &config.layout(),
                &scan.locus_a,
                &scan.locus_b,
                ScanOptions {
                    parallel,
                    keep_table: true,
                },
            )?;
            match cli.format {
                Format::Json => to_json(&ScanReport::from(&outcome)),
                Format::Csv => scan_csv(&outcome.table),
            }
        }
        Command::Lhv { samples } => {
            let bound = lhv_reference_bound(*samples, cli.seed)?;
            to_json(&LhvReport {
                samples: *samples,
                seed: cli.seed,
                sampled_max_abs_s: bound,
                exhaustive_max_abs_s: exhaustive_lhv_max(),
                classical_bound: crate::engine::CLASSICAL_BOUND,
            })
        }
        Command::Validate => {
            let config = load_config(cli)?;
            let layout = config.layout();
            let mut contours = Vec::new();
            for c in Contour::ALL {
                let path = layout.contour(c)?;
                let violations = match validate_path(&path, &layout.charge, layout.exclusion_radius)
                {
                    Ok(()) => Vec::new(),
                    Err(v) => v
                        .violations
                        .iter()
                        .map(|v| ViolationReport {
                            segment: v.index,
                            distance: v.distance,
                        })
                        .collect(),
                };
                contours.push(ContourReport {
                    contour: c.name(),
                    ok: violations.is_empty(),
                    violations,
                });
            }
            let bad = contours.iter().filter(|c| !c.ok).count();
            emit(
                out,
                &to_json(&ValidateReport {
                    exclusion_radius: layout.exclusion_radius,
                    ok: bad == 0,
                    contours,
                }),
            );
            if bad > 0 {
                return Err(CliError::InvalidPaths(bad));
            }
            return Ok(0);
        }
    };
    emit(out, &text);
    Ok(0)
}

fn emit(out: &mut dyn Write, text: &str) {
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}
