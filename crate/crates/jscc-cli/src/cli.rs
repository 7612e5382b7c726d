//! Flag definitions and argument parsing, including the optional
//! `--config key=value` defaults file.
//!
//! The config file is folded in by argv rewriting: its pairs are inserted as
//! flags directly after the subcommand, before everything the user typed, so
//! explicit flags always win. Precedence is flag > config file > environment
//! (`JSCC_SEED`) > built-in default.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "jscc",
    version,
    about = "Simulator and bound calculator for minimal-delay analog transmission \
             by recursive quantization over n AWGN channel uses",
    // Config-file defaults are spliced in as leading flags; a later (explicit)
    // occurrence must override them rather than conflict.
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one (n, snr, eps) operating point and print its row.
    Simulate(SimulateArgs),
    /// Simulate a dB grid and append a scaling-fit summary line.
    Sweep(SweepArgs),
    /// Evaluate the lower-bound curves on a dB grid without simulating.
    Bounds(BoundsArgs),
    /// Solve for the resolution exponent at one snr and print the solution.
    SolveEps(SolveEpsArgs),
}

/// Resolution exponent argument: a literal value or a schedule name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsArg {
    Fixed(f64),
    /// Conservative schedule snr^eps = (n/k) ln snr ("auto").
    Auto,
    /// Balance point of the two displacement bounds ("optimal").
    Optimal,
}

impl FromStr for EpsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" | "achievability" => Ok(EpsArg::Auto),
            "optimal" | "balance" => Ok(EpsArg::Optimal),
            _ => s
                .parse::<f64>()
                .map(EpsArg::Fixed)
                .map_err(|_| format!("expected a number, \"auto\" or \"optimal\", got {s:?}")),
        }
    }
}

/// Inclusive dB grid "LO:HI:STEP".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl FromStr for DbRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let err = || format!("expected LO:HI:STEP with STEP > 0 and LO <= HI, got {s:?}");
        if parts.len() != 3 {
            return Err(err());
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err())?;
        let (lo, hi, step) = (nums[0], nums[1], nums[2]);
        if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && lo <= hi) {
            return Err(err());
        }
        Ok(DbRange { lo, hi, step })
    }
}

impl std::fmt::Display for DbRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl DbRange {
    /// Grid points lo, lo+step, ... up to hi (inclusive within fp slack).
    pub fn grid(&self) -> Vec<f64> {
        let slack = 1e-9 * self.step.max(1.0);
        let mut points = Vec::new();
        let mut i = 0u64;
        loop {
            let v = self.lo + i as f64 * self.step;
            if v > self.hi + slack || i > 1_000_000 {
                break;
            }
            points.push(v);
            i += 1;
        }
        points
    }
}

/// Fit window "LO:HI" in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for FitWindow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let err = || format!("expected LO:HI with LO <= HI, got {s:?}");
        if parts.len() != 2 {
            return Err(err());
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| err())?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| err())?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(err());
        }
        Ok(FitWindow { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    /// One JSON object per row, same field names as the CSV columns.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Use the --eps value at every grid point.
    Fixed,
    /// snr^eps = (n/k) ln snr.
    Achievability,
    /// Balance point of the two displacement bounds.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolvePolicy {
    /// Balance point eps*(snr) with the full solution fields.
    Optimal,
    /// Conservative schedule eps(snr).
    Achievability,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Channel uses per source letter.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Operating snr in dB; snr = 10^(dB/10).
    #[arg(long, default_value_t = 40.0)]
    pub snr_db: f64,

    /// Resolution exponent: a number in [0,1), "auto" or "optimal".
    #[arg(long, default_value = "0", conflicts_with = "beta")]
    pub eps: EpsArg,

    /// Quantizer resolution; overrides --eps through beta^2 = snr^(1-eps).
    #[arg(long)]
    pub beta: Option<f64>,

    /// Monte Carlo draws for this point (>= 1000).
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    /// RNG seed; JSCC_SEED is the fallback, the flag wins.
    #[arg(long, env = "JSCC_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Source family.
    #[arg(long, value_enum, default_value_t = SourceArg::Gaussian)]
    pub source: SourceArg,

    /// Source variance sigma_S^2.
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,

    /// Per-use transmit power P (default 1).
    #[arg(long)]
    pub power: Option<f64>,

    /// Channel noise variance; overrides the value implied by --snr-db.
    /// 0 selects the noiseless debug channel and requires --beta.
    #[arg(long)]
    pub noise_var: Option<f64>,

    /// Power headroom delta reserved for the lattice letters
    /// (default 0.1 sigma_S^2).
    #[arg(long)]
    pub delta: Option<f64>,

    /// Tail constant k in exp(-k snr^eps)
    /// (default 1/(8 (sigma_S^2 + delta))).
    #[arg(long)]
    pub k: Option<f64>,

    /// Also write the row(s) to this file, with a manifest sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,

    /// key=value defaults file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Channel uses per source letter.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Inclusive dB grid LO:HI:STEP.
    #[arg(long, value_name = "LO:HI:STEP", default_value = "30:60:3")]
    pub snr_db_range: DbRange,

    /// How the resolution exponent follows the grid.
    #[arg(long, value_enum, default_value_t = PolicyArg::Achievability)]
    pub eps_policy: PolicyArg,

    /// Exponent used when --eps-policy fixed.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,

    /// Monte Carlo draws per grid point (>= 1000).
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    /// RNG seed; JSCC_SEED is the fallback, the flag wins.
    #[arg(long, env = "JSCC_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Source family.
    #[arg(long, value_enum, default_value_t = SourceArg::Gaussian)]
    pub source: SourceArg,

    /// Source variance sigma_S^2.
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,

    /// Per-use transmit power P (default 1).
    #[arg(long)]
    pub power: Option<f64>,

    /// Power headroom delta (default 0.1 sigma_S^2).
    #[arg(long)]
    pub delta: Option<f64>,

    /// Tail constant k (default 1/(8 (sigma_S^2 + delta))).
    #[arg(long)]
    pub k: Option<f64>,

    /// dB window LO:HI for the scaling fit (default: the whole grid).
    #[arg(long, value_name = "LO:HI")]
    pub fit_window: Option<FitWindow>,

    /// Write rows to this file (stdout then carries only the fit line).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,

    /// key=value defaults file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Channel uses per source letter.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Inclusive dB grid LO:HI:STEP.
    #[arg(long, value_name = "LO:HI:STEP", default_value = "30:60:3")]
    pub snr_db_range: DbRange,

    /// How the resolution exponent follows the grid.
    #[arg(long, value_enum, default_value_t = PolicyArg::Achievability)]
    pub eps_policy: PolicyArg,

    /// Exponent used when --eps-policy fixed.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,

    /// Source family.
    #[arg(long, value_enum, default_value_t = SourceArg::Gaussian)]
    pub source: SourceArg,

    /// Source variance sigma_S^2.
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,

    /// Power headroom delta (default 0.1 sigma_S^2).
    #[arg(long)]
    pub delta: Option<f64>,

    /// Tail constant k (default 1/(8 (sigma_S^2 + delta))).
    #[arg(long)]
    pub k: Option<f64>,

    /// Write the curve table to this file, with a manifest sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// key=value defaults file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveEpsArgs {
    /// snr as a linear ratio (not dB); must exceed 1.
    #[arg(long)]
    pub snr: f64,

    /// Channel uses per source letter.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Tail constant k in exp(-k snr^eps). The default matches a unit-variance
    /// source with the default headroom: 1/(8 * 1.1).
    #[arg(long, default_value_t = 1.0 / 8.8)]
    pub k: f64,

    /// Which schedule to solve.
    #[arg(long, value_enum, default_value_t = SolvePolicy::Optimal)]
    pub policy: SolvePolicy,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// key=value defaults file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parse argv with config-file expansion. clap renders its own usage errors
/// (exit 2) and help/version (exit 0).
pub fn parse() -> Result<Cli, CliError> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let argv = expand_config(argv)?;
    match Cli::try_parse_from(argv) {
        Ok(cli) => Ok(cli),
        Err(e) => e.exit(),
    }
}

/// If a `--config FILE` flag is present after the subcommand, splice the
/// file's key=value pairs in as flags ahead of the user's own, so that
/// explicit flags override the file.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    if argv.len() < 2 {
        return Ok(argv);
    }
    let subcommand = argv[1].clone();
    if subcommand.to_string_lossy().starts_with('-') {
        return Ok(argv);
    }

    let mut config_path: Option<PathBuf> = None;
    let rest = &argv[2..];
    for (i, tok) in rest.iter().enumerate() {
        let s = tok.to_string_lossy();
        if s == "--config" {
            if let Some(v) = rest.get(i + 1) {
                config_path = Some(PathBuf::from(v));
            }
        } else if let Some(v) = s.strip_prefix("--config=") {
            config_path = Some(PathBuf::from(v));
        }
    }
    let Some(path) = config_path else {
        return Ok(argv);
    };

    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
    let mut expanded: Vec<OsString> = vec![argv[0].clone(), subcommand];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config file {} line {}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if key == "config" {
            continue;
        }
        expanded.push(format!("--{key}").into());
        expanded.push(value.trim().into());
    }
    expanded.extend(rest.iter().cloned());
    Ok(expanded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_range_parses_and_enumerates_inclusively() {
        let r: DbRange = "30:60:3".parse().unwrap();
        let grid = r.grid();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 30.0);
        assert_eq!(*grid.last().unwrap(), 60.0);
        assert!("30:60:0".parse::<DbRange>().is_err());
        assert!("60:30:3".parse::<DbRange>().is_err());
        assert!("30:60".parse::<DbRange>().is_err());
        let single: DbRange = "40:40:5".parse().unwrap();
        assert_eq!(single.grid(), vec![40.0]);
    }

    #[test]
    fn eps_argument_accepts_schedule_names_and_numbers() {
        assert_eq!("auto".parse::<EpsArg>().unwrap(), EpsArg::Auto);
        assert_eq!("optimal".parse::<EpsArg>().unwrap(), EpsArg::Optimal);
        assert_eq!("0.3".parse::<EpsArg>().unwrap(), EpsArg::Fixed(0.3));
        assert!("fast".parse::<EpsArg>().is_err());
    }

    #[test]
    fn config_expansion_puts_file_pairs_before_user_flags() {
        let dir = std::env::temp_dir().join(format!("jscc-cli-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("defaults.cfg");
        std::fs::write(&path, "# defaults\nsamples = 2000\nsnr_db=46\n").unwrap();

        let argv: Vec<OsString> = ["jscc", "simulate", "--config"]
            .iter()
            .map(OsString::from)
            .chain([path.clone().into_os_string()])
            .chain([OsString::from("--samples"), OsString::from("5000")])
            .collect();
        let out = expand_config(argv).unwrap();
        let strings: Vec<String> = out.iter().map(|s| s.to_string_lossy().into_owned()).collect();
        assert_eq!(
            strings,
            vec![
                "jscc",
                "simulate",
                "--samples",
                "2000",
                "--snr-db",
                "46",
                "--config",
                path.to_string_lossy().as_ref(),
                "--samples",
                "5000",
            ]
        );
        std::fs::remove_dir_all(&dir).ok();
    }
}
