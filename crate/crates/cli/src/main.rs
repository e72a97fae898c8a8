//! `workstats` - work distributions and work averages for a driven qubit.
//!
//! Subcommands: `distribution` (single distribution as CSV), `sweep`
//! (figure-style parameter sweeps as CSV) and `selfcheck` (randomized
//! oracle cross-validation). Energies are reported in units of the gap Δ
//! and pointer positions in units of λΔ, so the coupling λ drops out of
//! every output.

mod config;
mod table;
mod threads;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use workstats_core::{
    coherent_gibbs_state, fcs_quasi_distribution, pointer_distribution, selfcheck, su2_unitary,
    sweep_beta, sweep_sigma, thermal_state, tpm_distribution, Error as CoreError, GaussianPointer,
    GridSpec, Protocol, QubitDrive, SweepRow,
};

use config::ConfigFile;
use table::{fmt_sci, open_output, write_csv};
use threads::{parallel_map, thread_cap};

const EXIT_SELFCHECK_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "workstats",
    version,
    about = "Quantum work distributions for a driven qubit under TPM, phase and pointer measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit one work distribution as CSV.
    Distribution(DistributionArgs),
    /// Emit a parameter sweep as CSV.
    Sweep(SweepArgs),
    /// Run the randomized oracle suite and print a pass/fail table.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct DistributionArgs {
    /// tpm | fcs | pointer
    #[arg(long)]
    protocol: Option<String>,
    /// Bundled scenario (only `qubit-fig2`).
    #[arg(long)]
    preset: Option<String>,
    /// Inverse temperature as βΔ.
    #[arg(long)]
    beta: Option<f64>,
    /// Relative phase φ of the coherent-Gibbs state; omit for thermal.
    #[arg(long)]
    phi: Option<f64>,
    /// Pointer spread as σ/(λΔ) (pointer protocol).
    #[arg(long)]
    sigma_ratio: Option<f64>,
    /// Pointer grid resolution.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// INI-style config mirroring these flags; flags override.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Figure preset: 2a | 2b | 3a | 3b | 3c.
    #[arg(long)]
    figure: Option<String>,
    /// p1 | p2 (explicit sweeps without --figure).
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long)]
    beta_points: Option<usize>,
    /// Comma-separated phases, e.g. `0,1,4`; empty for thermal-only.
    #[arg(long)]
    phis: Option<String>,
    /// Pointer spread as σ/(λΔ) (p2 sweeps).
    #[arg(long)]
    sigma_ratio: Option<f64>,
    /// σ-sweep bounds as σ/(λΔ) (figure 3c).
    #[arg(long)]
    sigma_min: Option<f64>,
    #[arg(long)]
    sigma_max: Option<f64>,
    #[arg(long)]
    sigma_points: Option<usize>,
    /// Phase for the σ sweep.
    #[arg(long)]
    phi: Option<f64>,
    /// βΔ for the σ sweep.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// RNG seed for the randomized inputs.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per check.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            // Bad user-supplied parameters.
            CoreError::InvalidPointer { .. } | CoreError::InvalidDrive { .. } => EXIT_USAGE,
            // Violated numerical invariants.
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            // Downstream closed the pipe (e.g. `| head`); not an error.
            return CliError {
                code: 0,
                message: String::new(),
            };
        }
        CliError::usage(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Distribution(args) => cmd_distribution(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Selfcheck(args) => cmd_selfcheck(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("workstats: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

fn load_config(path: &Option<PathBuf>, keys: &[&str]) -> Result<ConfigFile, CliError> {
    match path {
        Some(p) => ConfigFile::load(p, keys).map_err(CliError::usage),
        None => Ok(ConfigFile::empty()),
    }
}

fn preset_drive(name: &str) -> Result<QubitDrive, CliError> {
    match name {
        "qubit-fig2" => Ok(QubitDrive::fig2_preset(1.0)),
        other => Err(CliError::usage(format!(
            "unknown preset `{other}` (available: qubit-fig2)"
        ))),
    }
}

fn parse_phis(raw: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("invalid phase `{s}`: {e}")))
        })
        .collect()
}

fn cmd_distribution(args: DistributionArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &[
        "protocol",
        "preset",
        "beta",
        "phi",
        "sigma-ratio",
        "grid-points",
        "out",
    ];
    let cfg = load_config(&args.config, KEYS)?;
    let protocol: String = cfg
        .resolve_opt(&args.protocol, "protocol")
        .map_err(CliError::usage)?
        .ok_or_else(|| CliError::usage("missing --protocol (tpm | fcs | pointer)"))?;
    let preset: String = cfg
        .resolve(&args.preset, "preset", "qubit-fig2".to_string())
        .map_err(CliError::usage)?;
    let beta: f64 = cfg.resolve(&args.beta, "beta", 1.0).map_err(CliError::usage)?;
    let phi: Option<f64> = cfg.resolve_opt(&args.phi, "phi").map_err(CliError::usage)?;
    let sigma_ratio: f64 = cfg
        .resolve(&args.sigma_ratio, "sigma-ratio", 1.0)
        .map_err(CliError::usage)?;
    let grid_points: usize = cfg
        .resolve(&args.grid_points, "grid-points", 4096)
        .map_err(CliError::usage)?;
    let out: Option<PathBuf> = cfg
        .resolve_opt(&args.out, "out")
        .map_err(CliError::usage)?;

    let drive = preset_drive(&preset)?;
    let h = drive.hamiltonian();
    let v = su2_unitary(&drive);
    let state = match phi {
        Some(phi) => coherent_gibbs_state(&h, beta / drive.gap(), &[0.0, phi])?,
        None => thermal_state(&h, beta / drive.gap()),
    };

    let mut out = open_output(out.as_deref())?;
    match protocol.as_str() {
        "tpm" => {
            let dist = tpm_distribution(&state, &v, &h, &h)?;
            write_csv(
                &mut out,
                "work,probability",
                dist.atoms()
                    .iter()
                    .map(|a| format!("{},{}", fmt_sci(a.work), fmt_sci(a.weight))),
            )?;
        }
        "fcs" => {
            let dist = fcs_quasi_distribution(&state, &v, &h, &h)?;
            write_csv(
                &mut out,
                "work,weight",
                dist.atoms()
                    .iter()
                    .map(|a| format!("{},{}", fmt_sci(a.work), fmt_sci(a.weight))),
            )?;
        }
        "pointer" => {
            let pointer = GaussianPointer::new(sigma_ratio * drive.gap(), 1.0)?;
            let grid = GridSpec::Auto {
                points: grid_points,
                pad_sigmas: 8.0,
            };
            let density = pointer_distribution(&state, &v, &h, &h, &pointer, &grid)?;
            let rows: Vec<String> = density
                .grid()
                .iter()
                .zip(density.density())
                .map(|(&x, &p)| {
                    format!(
                        "{},{},{}",
                        fmt_sci(x),
                        fmt_sci(p),
                        fmt_sci(density.work_at(x))
                    )
                })
                .collect();
            write_csv(&mut out, "x,density,work_equiv", rows)?;
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown protocol `{other}` (tpm | fcs | pointer)"
            )))
        }
    }
    Ok(0)
}

fn beta_sweep_rows(
    drive: &QubitDrive,
    phis: &[f64],
    grid: &[f64],
    protocol: &Protocol,
) -> Result<Vec<SweepRow>, CliError> {
    let threads = thread_cap().map_err(CliError::usage)?;
    let per_beta = parallel_map(grid.len(), threads, |i| {
        sweep_beta(drive, phis, &grid[i..=i], protocol)
    });
    let mut rows = Vec::new();
    for chunk in per_beta {
        rows.extend(chunk?);
    }
    Ok(rows)
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &[
        "figure",
        "protocol",
        "preset",
        "beta-min",
        "beta-max",
        "beta-points",
        "phis",
        "sigma-ratio",
        "sigma-min",
        "sigma-max",
        "sigma-points",
        "phi",
        "beta",
        "out",
    ];
    let cfg = load_config(&args.config, KEYS)?;
    let figure: Option<String> = cfg
        .resolve_opt(&args.figure, "figure")
        .map_err(CliError::usage)?;
    let preset: String = cfg
        .resolve(&args.preset, "preset", "qubit-fig2".to_string())
        .map_err(CliError::usage)?;
    let drive = preset_drive(&preset)?;

    let beta_min: f64 = cfg
        .resolve(&args.beta_min, "beta-min", 0.01)
        .map_err(CliError::usage)?;
    let beta_max: f64 = cfg
        .resolve(&args.beta_max, "beta-max", 10.0)
        .map_err(CliError::usage)?;
    let beta_points: usize = cfg
        .resolve(&args.beta_points, "beta-points", 60)
        .map_err(CliError::usage)?;
    if !(beta_min > 0.0 && beta_max > beta_min && beta_points >= 2) {
        return Err(CliError::usage(
            "need 0 < beta-min < beta-max and beta-points >= 2",
        ));
    }
    let phis_raw: String = cfg
        .resolve(&args.phis, "phis", "0,1,4".to_string())
        .map_err(CliError::usage)?;
    let phis = parse_phis(&phis_raw)?;
    let sigma_ratio: f64 = cfg
        .resolve(&args.sigma_ratio, "sigma-ratio", 1.0)
        .map_err(CliError::usage)?;
    let out: Option<PathBuf> = cfg
        .resolve_opt(&args.out, "out")
        .map_err(CliError::usage)?;

    let beta_grid = workstats_core::qubit::log_grid(beta_min, beta_max, beta_points);
    let mut out = open_output(out.as_deref())?;

    match figure.as_deref() {
        Some("2a") | Some("3a") => {
            let protocol = if figure.as_deref() == Some("2a") {
                Protocol::P1
            } else {
                Protocol::P2 { sigma_ratio }
            };
            let rows = beta_sweep_rows(&drive, &phis, &beta_grid, &protocol)?;
            write_csv(
                &mut out,
                "beta_delta,label,exp_work",
                rows.iter().map(|r| {
                    format!("{},{},{}", fmt_sci(r.beta_delta), r.label, fmt_sci(r.exp_work))
                }),
            )?;
        }
        Some("2b") | Some("3b") => {
            let protocol = if figure.as_deref() == Some("2b") {
                Protocol::P1
            } else {
                Protocol::P2 { sigma_ratio }
            };
            let rows = beta_sweep_rows(&drive, &phis, &beta_grid, &protocol)?;
            write_csv(
                &mut out,
                "beta_delta,label,mean_work",
                rows.iter().map(|r| {
                    format!("{},{},{}", fmt_sci(r.beta_delta), r.label, fmt_sci(r.mean_work))
                }),
            )?;
        }
        Some("3c") => {
            let phi: f64 = cfg.resolve(&args.phi, "phi", 0.0).map_err(CliError::usage)?;
            let beta: f64 = cfg.resolve(&args.beta, "beta", 1.0).map_err(CliError::usage)?;
            let sigma_min: f64 = cfg
                .resolve(&args.sigma_min, "sigma-min", 0.05)
                .map_err(CliError::usage)?;
            let sigma_max: f64 = cfg
                .resolve(&args.sigma_max, "sigma-max", 20.0)
                .map_err(CliError::usage)?;
            let sigma_points: usize = cfg
                .resolve(&args.sigma_points, "sigma-points", 60)
                .map_err(CliError::usage)?;
            if !(sigma_min > 0.0 && sigma_max > sigma_min && sigma_points >= 2) {
                return Err(CliError::usage(
                    "need 0 < sigma-min < sigma-max and sigma-points >= 2",
                ));
            }
            let grid = workstats_core::qubit::log_grid(sigma_min, sigma_max, sigma_points);
            let threads = thread_cap().map_err(CliError::usage)?;
            let per_sigma = parallel_map(grid.len(), threads, |i| {
                sweep_sigma(&drive, phi, beta, &grid[i..=i])
            });
            let mut rows = Vec::new();
            for chunk in per_sigma {
                rows.extend(chunk?);
            }
            write_csv(
                &mut out,
                "sigma_ratio,work_diff",
                rows.iter()
                    .map(|r| format!("{},{}", fmt_sci(r.sigma_ratio), fmt_sci(r.work_diff))),
            )?;
        }
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown figure `{other}` (2a | 2b | 3a | 3b | 3c)"
            )))
        }
        None => {
            let protocol: String = cfg
                .resolve_opt(&args.protocol, "protocol")
                .map_err(CliError::usage)?
                .ok_or_else(|| CliError::usage("missing --figure or --protocol (p1 | p2)"))?;
            let protocol = match protocol.as_str() {
                "p1" => Protocol::P1,
                "p2" => Protocol::P2 { sigma_ratio },
                other => {
                    return Err(CliError::usage(format!(
                        "unknown protocol `{other}` (p1 | p2)"
                    )))
                }
            };
            let rows = beta_sweep_rows(&drive, &phis, &beta_grid, &protocol)?;
            write_csv(
                &mut out,
                "beta_delta,label,exp_work,mean_work,je_deviation,bound",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{},{},{}",
                        fmt_sci(r.beta_delta),
                        r.label,
                        fmt_sci(r.exp_work),
                        fmt_sci(r.mean_work),
                        fmt_sci(r.je_deviation),
                        fmt_sci(r.bound)
                    )
                }),
            )?;
        }
    }
    Ok(0)
}

fn cmd_selfcheck(args: SelfcheckArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["seed", "trials"];
    let cfg = load_config(&args.config, KEYS)?;
    let seed: u64 = cfg
        .resolve(&args.seed, "seed", selfcheck::DEFAULT_SEED)
        .map_err(CliError::usage)?;
    let trials: usize = cfg
        .resolve(&args.trials, "trials", selfcheck::DEFAULT_TRIALS)
        .map_err(CliError::usage)?;
    if trials == 0 {
        return Err(CliError::usage("trials must be at least 1"));
    }
    match selfcheck::run(seed, trials) {
        Ok(report) => {
            println!("{report}");
            Ok(if report.all_passed() {
                0
            } else {
                EXIT_SELFCHECK_FAIL
            })
        }
        Err(e) => {
            println!("selfcheck: FAIL ({e})");
            Ok(EXIT_SELFCHECK_FAIL)
        }
    }
}
