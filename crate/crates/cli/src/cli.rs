//! Argument definitions, range parsing and the key=value config file.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dscale_core::atom::{ChargePolicy, PairMode};

#[derive(Debug, Parser)]
#[command(
    name = "dscale",
    version,
    about = "Large-D and D=3 correlation-energy sweeps with area-difference bound checks",
    after_help = "Exit codes: 0 success, 1 usage error, 2 numerical or I/O failure.\n\
                  Output goes to --out, else $DSCALE_OUT_DIR/<subcommand>.<ext>, else ./<subcommand>.<ext>."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Neutral atoms or ions at D → ∞: HF and correlated solutions, area differences.
    #[command(args_override_self = true)]
    Atoms(AtomsArgs),
    /// Simple-cubic metallic hydrogen at D → ∞ over a range of lattice constants.
    #[command(name = "mh-infty", args_override_self = true)]
    MhInfty(MhInftyArgs),
    /// Metallic hydrogen at D = 3 from the fitted total and correlation energies.
    #[command(name = "mh-3d", args_override_self = true)]
    Mh3d(Mh3dArgs),
    /// Helium at D = 3: radius-change area difference against the correlation energy.
    #[command(name = "helium-3d", args_override_self = true)]
    Helium3d(OutputArgs),
    /// Bound ε_corr ≤ C·Δarea over a CSV table, or over the built-in tables when no path is given.
    #[command(name = "bound-check", args_override_self = true)]
    BoundCheck(BoundCheckArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Atoms(_) => "atoms",
            Command::MhInfty(_) => "mh-infty",
            Command::Mh3d(_) => "mh-3d",
            Command::Helium3d(_) => "helium-3d",
            Command::BoundCheck(_) => "bound-check",
        }
    }

    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Atoms(a) => &a.output,
            Command::MhInfty(a) => &a.output,
            Command::Mh3d(a) => &a.output,
            Command::Helium3d(o) => o,
            Command::BoundCheck(a) => &a.output,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; an existing directory receives <subcommand>.<ext>.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// key=value file (one pair per line, # comments) read before the flags; flags win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct AtomsArgs {
    /// Electron counts, inclusive. Z ≥ 14 leaves the maximally symmetric regime and is flagged valid=0.
    #[arg(long = "n", value_name = "A..B", default_value = "2..14")]
    pub electrons: Span<u32>,
    /// Nuclear charge for every row, or `neutral` for Z = N.
    #[arg(long = "z", value_name = "VALUE|neutral", default_value = "neutral")]
    pub charge: ChargeArg,
    /// Same as --z neutral.
    #[arg(long)]
    pub neutral: bool,
    /// Triangles per atom: one per ring neighbour (n-triangles) or one per electron pair (all-pairs).
    /// n-triangles keeps Δarea/ε_corr within a factor of five for N ≤ 13.
    #[arg(long, value_enum, default_value_t = PairModeArg::NTriangles)]
    pub pair_mode: PairModeArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl AtomsArgs {
    pub fn charge_policy(&self) -> ChargePolicy {
        if self.neutral {
            ChargePolicy::Neutral
        } else {
            self.charge.0
        }
    }
}

#[derive(Debug, Args)]
pub struct MhInftyArgs {
    /// Lattice constants R, inclusive, in scaled bohr.
    #[arg(long = "r", value_name = "A..B", default_value = "1.0..4.0")]
    pub range: Span<f64>,
    /// Grid spacing in R.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Largest |l|,|m|,|n| summed site by site; farther sites enter through an exact integral tail.
    #[arg(long, default_value_t = dscale_core::mh::DEFAULT_SHELL_CUTOFF)]
    pub cutoff: u32,
    /// Largest allowed change of the lattice sum when the cutoff is doubled.
    #[arg(long, default_value_t = dscale_core::mh::DEFAULT_TAIL_TOL)]
    pub tol: f64,
    /// Share of each pair interaction carried by one electron in the mean-field energy.
    /// 0.5 counts every pair once and puts the zero of eps_hf near R = 1.29.
    #[arg(long, default_value_t = dscale_core::mh::DEFAULT_PAIR_SHARE)]
    pub pair_share: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Mh3dArgs {
    /// Wigner–Seitz radii r_s, inclusive, in bohr.
    #[arg(long = "rs", value_name = "A..B", default_value = "0.7..1.6")]
    pub range: Span<f64>,
    /// Grid spacing in r_s.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Rows with |dε/dr_s| below this become error cells; the area change diverges there.
    #[arg(long, default_value_t = dscale_core::d3::DEFAULT_DERIVATIVE_FLOOR)]
    pub floor: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundCheckArgs {
    /// CSV table with eps_corr and delta_area columns (and optionally stable).
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairModeArg {
    AllPairs,
    NTriangles,
}

impl From<PairModeArg> for PairMode {
    fn from(m: PairModeArg) -> Self {
        match m {
            PairModeArg::AllPairs => PairMode::AllPairs,
            PairModeArg::NTriangles => PairMode::NTriangles,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeArg(pub ChargePolicy);

impl FromStr for ChargeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("neutral") {
            return Ok(ChargeArg(ChargePolicy::Neutral));
        }
        match s.parse::<f64>() {
            Ok(z) if z > 0.0 && z.is_finite() => Ok(ChargeArg(ChargePolicy::Fixed(z))),
            _ => Err(format!("expected a positive charge or 'neutral', got '{s}'")),
        }
    }
}

/// Inclusive range written `A..B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span<T> {
    pub lo: T,
    pub hi: T,
}

impl<T> FromStr for Span<T>
where
    T: FromStr + PartialOrd + Copy,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
        let parse = |v: &str| v.trim().parse::<T>().map_err(|_| format!("cannot parse '{v}' in range '{s}'"));
        let (lo, hi) = (parse(a)?, parse(b.trim_start_matches('='))?);
        if !(lo <= hi) {
            return Err(format!("range '{s}' is empty"));
        }
        Ok(Span { lo, hi })
    }
}

impl<T: fmt::Display> fmt::Display for Span<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Points lo, lo+step, … up to hi (inclusive within rounding).
pub fn grid(span: Span<f64>, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(format!("step must be positive, got {step}"));
    }
    let count = ((span.hi - span.lo) / step + 1e-9).floor();
    if !(count < 1e6) {
        return Err(format!("range {span} with step {step} has too many points"));
    }
    Ok((0..=count as usize).map(|i| span.lo + i as f64 * step).collect())
}

/// Splices the pairs of a `--config` file into `args` right after the
/// subcommand, so that flags given on the command line override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let strs: Vec<Option<&str>> = args.iter().map(|a| a.to_str()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        match a {
            Some("--config") => path = strs.get(i + 1).copied().flatten().map(str::to_string),
            Some(a) if a.starts_with("--config=") => path = Some(a["--config=".len()..].to_string()),
            _ => {}
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config '{path}': {e}"))?;
    let tokens = config_tokens(&text).map_err(|e| format!("config '{path}': {e}"))?;
    let Some(sub) = strs.iter().skip(1).position(|a| a.is_none_or(|a| !a.starts_with('-'))) else {
        return Ok(args);
    };
    let at = sub + 2;
    let mut out = args[..at].to_vec();
    out.extend(tokens.into_iter().map(OsString::from));
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

/// `key=value` lines to `--key value` tokens; `true`/`false` toggle switches.
pub fn config_tokens(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let (k, v) = (k.trim().trim_start_matches("--"), v.trim());
        if k.is_empty() || k == "config" {
            return Err(format!("line {}: invalid key '{k}'", i + 1));
        }
        match v {
            "true" => tokens.push(format!("--{k}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{k}"));
                tokens.push(v.to_string());
            }
        }
    }
    Ok(tokens)
}
