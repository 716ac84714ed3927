//! Command-line surface: `analyze`, `curve`, `region`, `beta-sweep` and
//! `verify`.
//!
//! CSV goes to standard output with a header row; JSON is a single document
//! carrying a `schema_version`. Diagnostics go to standard error. Exit codes:
//! 0 on success, 1 when `verify` finds a disagreement (or output fails),
//! 2 on invalid parameters.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::adversary::{normalize, GameParams, Orientation, CASE4_REL_TOL};
use crate::error::Error;
use crate::oracle::scan::THRESHOLD_BAND;
use crate::oracle::verify::DEFAULT_BETAS;
use crate::oracle::{run_verification, OracleConfig, VerifyConfig};
use crate::sweep::{self, Axis, Param, SweepGrid};
use crate::transfer::{self, TransferAnalysis, BISECTION_TOL, TAU_EDGE};

pub const SCHEMA_VERSION: u32 = 1;
pub const CASE4_SPLIT_CONVENTION: &str = "x_a_i = x_i / (x1 + x2)";

#[derive(Debug, Parser)]
#[command(name = "lotto-alliance", version, about = "Lossy budget transfers in coalitional General Lotto games")]
pub struct Cli {
    /// Key-value file (TOML) supplying defaults for any flag; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full transfer analysis of one game.
    Analyze(AnalyzeArgs),
    /// Payoff changes over a range of transfers (CSV).
    Curve(CurveArgs),
    /// Existence regions over a budget raster (CSV).
    Region(RegionArgs),
    /// Best reachable payoffs across efficiencies (CSV).
    BetaSweep(BetaSweepArgs),
    /// Compare closed forms against the brute-force oracle (JSON).
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
pub struct GameArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x2: Option<f64>,
    /// Adversary budget (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub xa: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi2: Option<f64>,
    /// Comma-separated efficiencies, e.g. `0.25,0.5,1`.
    #[arg(long)]
    pub beta_list: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub x1_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x1_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x2_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x2_max: Option<f64>,
    /// Points per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BetaSweepArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    /// Integer seed, or any string (hashed).
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub tau_step: Option<f64>,
    #[arg(long)]
    pub split_step: Option<f64>,
    /// Comma-separated efficiencies (default 0.1,0.3,0.5,0.8,1).
    #[arg(long)]
    pub betas: Option<String>,
    /// Verify this game (`phi1,phi2,x1,x2`) instead of sampling.
    #[arg(long, allow_negative_numbers = true)]
    pub game: Option<String>,
}

/// A failed command: exit code plus diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconsistency(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("output error: {e}"),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: 1,
            message: format!("output error: {e}"),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

/// Flag values layered over an optional config file.
struct Settings {
    file: toml::Table,
}

impl Settings {
    fn load(path: Option<&PathBuf>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Settings {
                file: toml::Table::new(),
            });
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let file = text
            .parse::<toml::Table>()
            .map_err(|e| usage(format!("cannot parse config {}: {e}", path.display())))?;
        Ok(Settings { file })
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        self.file
            .get(key)
            .or_else(|| self.file.get(&key.replace('-', "_")))
    }

    fn f64(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(*v)),
            Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(usage(format!("config key {key} must be a number, got {other}"))),
        }
    }

    fn usize(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as usize)),
            Some(other) => Err(usage(format!(
                "config key {key} must be a nonnegative integer, got {other}"
            ))),
        }
    }

    fn string(&self, flag: Option<String>, key: &str) -> Result<Option<String>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(toml::Value::Integer(v)) => Ok(Some(v.to_string())),
            Some(toml::Value::Float(v)) => Ok(Some(v.to_string())),
            Some(toml::Value::Array(items)) => Ok(Some(
                items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
            )),
            Some(other) => Err(usage(format!("config key {key} has unsupported value {other}"))),
        }
    }

    fn require_f64(&self, flag: Option<f64>, key: &str) -> Result<f64, Failure> {
        self.f64(flag, key)?
            .ok_or_else(|| usage(format!("missing required --{key}")))
    }

    fn require_usize(&self, flag: Option<usize>, key: &str) -> Result<usize, Failure> {
        self.usize(flag, key)?
            .ok_or_else(|| usage(format!("missing required --{key}")))
    }

    fn game(&self, a: &GameArgs) -> Result<GameParams, Failure> {
        let g = GameParams::with_adversary_budget(
            self.require_f64(a.phi1, "phi1")?,
            self.require_f64(a.phi2, "phi2")?,
            self.require_f64(a.x1, "x1")?,
            self.require_f64(a.x2, "x2")?,
            self.f64(a.xa, "xa")?.unwrap_or(1.0),
        )?;
        Ok(g)
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| usage(format!("malformed {what} entry {p:?}")))
        })
        .collect()
}

/// Integer seeds are used as-is; any other string is hashed (FNV-1a).
pub fn seed_from_str(s: &str) -> u64 {
    if let Ok(v) = s.parse::<u64>() {
        return v;
    }
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// JSON formatter writing every float with 17 significant digits.
struct Sig17(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, Sig17(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub case4_rel_tol: f64,
    pub bisection_tol: f64,
    pub tau_edge: f64,
    pub threshold_band: f64,
    pub case4_split_convention: String,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool_version: crate::VERSION.to_string(),
            case4_rel_tol: CASE4_REL_TOL,
            bisection_tol: BISECTION_TOL,
            tau_edge: TAU_EDGE,
            threshold_band: THRESHOLD_BAND,
            case4_split_convention: CASE4_SPLIT_CONVENTION.to_string(),
        }
    }
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub raw_game: GameParams,
    pub normalized_game: GameParams,
    pub beta: f64,
    pub orientation: Orientation,
    pub analysis: TransferAnalysis,
    pub provenance: Provenance,
}

pub fn analysis_report(game: &GameParams, beta: f64) -> crate::Result<AnalysisReport> {
    let (normalized_game, orientation) = normalize(game)?;
    let analysis = transfer::analyze(game, beta)?;
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        raw_game: *game,
        normalized_game,
        beta,
        orientation,
        analysis,
        provenance: Provenance::default(),
    })
}

fn write_text(out: &mut dyn Write, r: &AnalysisReport) -> io::Result<()> {
    let a = &r.analysis;
    let g = &r.raw_game;
    writeln!(
        out,
        "game: phi1={} phi2={} x1={} x2={} xa={}  beta={}",
        g.phi1, g.phi2, g.x1, g.x2, g.adversary_budget, r.beta
    )?;
    writeln!(
        out,
        "orientation: {}",
        if r.orientation.swapped { "players swapped" } else { "as given" }
    )?;
    writeln!(out, "case at tau=0: {}", a.case_at_zero)?;
    writeln!(
        out,
        "nominal payoffs: u1={} u2={} adversary={}",
        a.nominal.u1, a.nominal.u2, a.nominal.u_adversary
    )?;
    writeln!(out, "mutually beneficial transfer: {}", a.mb_exists)?;
    if let Some((lo, hi)) = a.mb_interval {
        writeln!(out, "  interval: ({lo}, {hi})")?;
    }
    if a.mb_interval_anomaly {
        writeln!(out, "  warning: interval anomaly")?;
    }
    writeln!(out, "mb beta threshold: {}", a.mb_beta_threshold)?;
    writeln!(out, "alliance-optimal tau: {}", a.alliance_tau)?;
    writeln!(out, "alliance gain: {}", a.alliance_payoff_gain)?;
    writeln!(out, "in G-dagger: {}", a.in_g_dagger)?;
    if let Some(t) = a.alliance_beta_threshold {
        writeln!(out, "alliance beta threshold: {t}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RegionRow {
    beta: f64,
    x1: f64,
    x2: f64,
    in_frame: u8,
    case: Option<u8>,
    mb_exists: Option<u8>,
    tau_dagger: Option<f64>,
}

#[derive(Serialize)]
struct BetaCsvRow {
    beta: f64,
    max_u1: f64,
    max_u2: f64,
    max_u12: f64,
    max_u1_unconstrained: f64,
    max_u2_unconstrained: f64,
    u1_at_tau_dagger: f64,
    u2_at_tau_dagger: f64,
    nominal_u1: f64,
    nominal_u2: f64,
    nominal_u12: f64,
    mb_exists: u8,
    alliance_nonzero: u8,
}

fn cmd_analyze(s: &Settings, a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let game = s.game(&a.game)?;
    let beta = s.require_f64(a.beta, "beta")?;
    let report = analysis_report(&game, beta)?;
    if a.text {
        write_text(out, &report)?;
    } else {
        writeln!(out, "{}", to_json(&report).map_err(io::Error::from)?)?;
    }
    Ok(0)
}

fn cmd_curve(s: &Settings, a: &CurveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let game = s.game(&a.game)?;
    let beta = s.require_f64(a.beta, "beta")?;
    let rows = sweep::payoff_curves(
        &game,
        beta,
        s.require_f64(a.tau_min, "tau-min")?,
        s.require_f64(a.tau_max, "tau-max")?,
        s.require_usize(a.steps, "steps")?,
    )?;
    let mut w = csv::Writer::from_writer(out);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(0)
}

fn cmd_region(s: &Settings, a: &RegionArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let betas = s
        .string(a.beta_list.clone(), "beta-list")?
        .ok_or_else(|| usage("missing required --beta-list".into()))?;
    let res = s.require_usize(a.resolution, "resolution")?;
    let grid = SweepGrid::budgets(
        s.require_f64(a.phi1, "phi1")?,
        s.require_f64(a.phi2, "phi2")?,
        Axis::new(
            Param::X1,
            s.require_f64(a.x1_min, "x1-min")?,
            s.require_f64(a.x1_max, "x1-max")?,
            res,
        ),
        Axis::new(
            Param::X2,
            s.require_f64(a.x2_min, "x2-min")?,
            s.require_f64(a.x2_max, "x2-max")?,
            res,
        ),
        parse_list(&betas, "beta-list")?,
    );
    let cells = sweep::region_raster(&grid)?;
    let mut w = csv::Writer::from_writer(out);
    for c in &cells {
        w.serialize(RegionRow {
            beta: c.beta,
            x1: c.game.x1,
            x2: c.game.x2,
            in_frame: u8::from(c.in_frame),
            case: c.analysis.map(|x| x.case_label.number()),
            mb_exists: c.analysis.map(|x| u8::from(x.mb_exists)),
            tau_dagger: c.analysis.map(|x| x.tau_dagger),
        })?;
    }
    w.flush()?;
    Ok(0)
}

fn cmd_beta_sweep(s: &Settings, a: &BetaSweepArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let game = s.game(&a.game)?;
    let rows = sweep::beta_sweep(
        &game,
        s.require_f64(a.beta_min, "beta-min")?,
        s.require_f64(a.beta_max, "beta-max")?,
        s.require_usize(a.steps, "steps")?,
    )?;
    let mut w = csv::Writer::from_writer(out);
    for r in &rows {
        w.serialize(BetaCsvRow {
            beta: r.beta,
            max_u1: r.max_u1,
            max_u2: r.max_u2,
            max_u12: r.max_u12,
            max_u1_unconstrained: r.max_u1_unconstrained,
            max_u2_unconstrained: r.max_u2_unconstrained,
            u1_at_tau_dagger: r.u1_at_tau_dagger,
            u2_at_tau_dagger: r.u2_at_tau_dagger,
            nominal_u1: r.nominal_u1,
            nominal_u2: r.nominal_u2,
            nominal_u12: r.nominal_u12,
            mb_exists: u8::from(r.mb_exists),
            alliance_nonzero: u8::from(r.alliance_nonzero),
        })?;
    }
    w.flush()?;
    Ok(0)
}

fn cmd_verify(
    s: &Settings,
    a: &VerifyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let defaults = VerifyConfig::default();
    let seed = s
        .string(a.seed.clone(), "seed")?
        .map_or(defaults.seed, |x| seed_from_str(&x));
    let betas = match s.string(a.betas.clone(), "betas")? {
        Some(list) => parse_list(&list, "betas")?,
        None => DEFAULT_BETAS.to_vec(),
    };
    for &b in &betas {
        transfer::check_beta(b)?;
    }
    let games = match s.string(a.game.clone(), "game")? {
        None => None,
        Some(text) => {
            let v = parse_list(&text, "game")?;
            if v.len() != 4 {
                return Err(usage(format!(
                    "--game expects phi1,phi2,x1,x2, got {} values",
                    v.len()
                )));
            }
            Some(vec![GameParams::new(v[0], v[1], v[2], v[3])?])
        }
    };
    let cfg = VerifyConfig {
        trials: s.usize(a.trials, "trials")?.unwrap_or(defaults.trials),
        seed,
        betas,
        oracle: OracleConfig {
            tau_step: s.f64(a.tau_step, "tau-step")?.unwrap_or(defaults.oracle.tau_step),
            split_step: s
                .f64(a.split_step, "split-step")?
                .unwrap_or(defaults.oracle.split_step),
            tolerance: defaults.oracle.tolerance,
        },
        games,
    };
    let report = run_verification(&cfg)?;
    writeln!(out, "{}", to_json(&report).map_err(io::Error::from)?)?;
    if report.passed {
        Ok(0)
    } else {
        for d in &report.disagreements {
            writeln!(
                err,
                "disagreement: {} closed={} grid={} at beta={} game=({}, {}, {}, {})",
                d.quantity,
                d.closed_form_value,
                d.grid_value,
                d.beta,
                d.game.phi1,
                d.game.phi2,
                d.game.x1,
                d.game.x2
            )?;
        }
        Ok(1)
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let result = Settings::load(cli.config.as_ref()).and_then(|s| match &cli.command {
        Command::Analyze(a) => cmd_analyze(&s, a, out),
        Command::Curve(a) => cmd_curve(&s, a, out),
        Command::Region(a) => cmd_region(&s, a, out),
        Command::BetaSweep(a) => cmd_beta_sweep(&s, a, out),
        Command::Verify(a) => cmd_verify(&s, a, out, err),
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
