use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use phid_core::linalg::real_part;
use phid_core::passivity::{pick_condition, SweepPoint};
use phid_core::pipeline::{Diagnostics, Spacing};
use phid_core::zoo::{make_analytic, make_ladder, make_ladder_ph, make_rlc5, LadderSpec, ZOO};
use phid_core::{
    algorithm1, assemble_realization, build_pencil, build_realifier, check_certificate, compute_spectral_zeros,
    dof_count, filter_rhp, identify_loewner, identify_ph, identify_ph_limited, lambda_min_dissipation,
    left_from_spectral, positive_real_sweep, realify_pencil, reconstruct, spectral_data_from_model, DofKind, DofQuery,
    FeedthroughMode, FrequencyGrid, FrequencySampleSet, PipelineConfig, StateSpace, Verdict,
};

use crate::io;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Sweep values below this count as a loss of positive realness.
const SWEEP_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "phid", version, about = "Passive port-Hamiltonian identification from frequency-response data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a model on the imaginary axis.
    Sample(SampleArgs),
    /// Loewner model of a sample file, truncated by singular values.
    Identify(IdentifyArgs),
    /// Normalized port-Hamiltonian model of a sample file.
    Ph(PhArgs),
    /// Spectral zeros and directions of a model.
    Zeros(ZerosArgs),
    /// Certificate and positive-realness checks of a model or pH file.
    Validate(ValidateArgs),
    /// Number of real parameters of an m x m transfer function of degree n.
    Dof(DofArgs),
    /// Magnitudes of the transfer function entries.
    Bode(BodeArgs),
    /// Interpolant of a tangential data file.
    Interpolate(InterpolateArgs),
    /// Built-in reference models.
    #[command(subcommand)]
    Zoo(ZooCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scale {
    Log,
    Lin,
}

#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    fn points(self, scale: Scale) -> Result<Vec<f64>> {
        let spacing = match scale {
            Scale::Log => Spacing::Log,
            Scale::Lin => Spacing::Linear,
        };
        let grid = FrequencyGrid {
            lo: self.lo,
            hi: self.hi,
            count: self.count,
            spacing,
        };
        Ok(grid.points()?)
    }
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, count] = parts[..] else {
        return Err("expected lo,hi,count".into());
    };
    Ok(Grid {
        lo: lo.parse().map_err(|e| format!("lo: {e}"))?,
        hi: hi.parse().map_err(|e| format!("hi: {e}"))?,
        count: count.parse().map_err(|e| format!("count: {e}"))?,
    })
}

fn parse_band(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    Ok((lo, hi))
}

/// `given:<file>` or `estimate`.
#[derive(Debug, Clone)]
pub enum FeedthroughArg {
    Given(PathBuf),
    Estimate,
}

fn parse_feedthrough(s: &str) -> std::result::Result<FeedthroughArg, String> {
    match s.split_once(':') {
        Some(("given", path)) if !path.is_empty() => Ok(FeedthroughArg::Given(path.into())),
        None if s == "estimate" => Ok(FeedthroughArg::Estimate),
        _ => Err("expected given:<file> or estimate".into()),
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub model: PathBuf,
    #[arg(long, value_parser = parse_grid, value_name = "LO,HI,COUNT")]
    pub grid: Grid,
    #[arg(long, value_enum, default_value = "log")]
    pub scale: Scale,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub samples: PathBuf,
    /// Relative singular value cutoff.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Value at infinity.
    #[arg(long = "D", value_parser = parse_feedthrough, default_value = "estimate", value_name = "given:<file>|estimate")]
    pub feedthrough: FeedthroughArg,
}

impl FitArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let d_mode = match &self.feedthrough {
            FeedthroughArg::Given(path) => FeedthroughMode::Given(io::load_named_matrix(path, "D")?),
            FeedthroughArg::Estimate => FeedthroughMode::EstimateFromTop,
        };
        Ok(PipelineConfig {
            svd_rel_tol: self.tol,
            d_mode,
            ..PipelineConfig::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Singular values of the Loewner matrix as CSV.
    #[arg(long)]
    pub sv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Only use samples with lo <= omega <= hi.
    #[arg(long, value_parser = parse_band, value_name = "LO,HI")]
    pub band: Option<(f64, f64)>,
    /// Model to measure in-band and out-of-band errors against.
    #[arg(long, requires = "band")]
    pub reference: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub diag: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    pub model: PathBuf,
    /// Keep only the right half-plane zeros.
    #[arg(long)]
    pub rhp: bool,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the right half-plane zeros as a tangential data file.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub input: PathBuf,
    /// Certificate X, bare or under the key "X".
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long, value_parser = parse_grid, value_name = "LO,HI,COUNT")]
    pub sweep: Option<Grid>,
    #[arg(long, requires = "sweep")]
    pub sweep_csv: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DofArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Rank of the value at infinity; strictly proper when absent.
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BodeArgs {
    pub model: PathBuf,
    #[arg(long, value_parser = parse_grid, value_name = "LO,HI,COUNT")]
    pub grid: Grid,
    #[arg(long, value_enum, default_value = "log")]
    pub scale: Scale,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    pub data: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ZooCommand {
    /// List the available models.
    List,
    /// Write a model file.
    Export(ZooExportArgs),
}

#[derive(Debug, Args)]
pub struct ZooExportArgs {
    pub name: String,
    /// Real part of the analytic model's poles.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub a: f64,
    /// Imaginary part of the analytic model's poles.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Feedthrough (analytic: 2, ladder: 1 by default).
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Ladder sections.
    #[arg(long, default_value_t = 100)]
    pub sections: usize,
    /// Write the ladder in port-Hamiltonian form.
    #[arg(long)]
    pub ph: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(a) => sample(a),
        Command::Identify(a) => identify(a),
        Command::Ph(a) => ph(a),
        Command::Zeros(a) => zeros(a),
        Command::Validate(a) => validate(a),
        Command::Dof(a) => dof(a),
        Command::Bode(a) => bode(a),
        Command::Interpolate(a) => interpolate(a),
        Command::Zoo(ZooCommand::List) => {
            for entry in ZOO {
                println!("{:<10} {}", entry.name, entry.description);
            }
            Ok(())
        }
        Command::Zoo(ZooCommand::Export(a)) => zoo_export(a),
    }
}

fn load_model(path: &Path) -> Result<StateSpace> {
    let v = io::read_json(path)?;
    if io::is_ph_value(&v) {
        Ok(reconstruct(&io::ph_from_value(&v)?))
    } else {
        io::model_from_value(&v)
    }
}

fn sample(a: SampleArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let fs = FrequencySampleSet::from_model(&model, &a.grid.points(a.scale)?)?;
    io::write_samples(&a.output, &fs)
}

fn identify(a: IdentifyArgs) -> Result<()> {
    let fs = io::read_samples(&a.fit.samples)?;
    let lm = identify_loewner(&fs, &a.fit.config()?)?;
    if let Some(w) = &lm.feedthrough.warning {
        eprintln!("warning: {w}");
    }
    io::write_json(&a.output, &io::model_value(&lm.model))?;
    if let Some(path) = &a.sv {
        io::write_singular_values(path, &lm.singular_values)?;
    }
    println!("order {}", lm.order);
    Ok(())
}

fn diagnostics_value(d: &Diagnostics) -> Value {
    json!({
        "D": io::real_matrix_value(&d.d),
        "order": d.order,
        "singular_values": d.singular_values.iter().map(|&x| io::number(x)).collect::<Vec<_>>(),
        "zeros": d.zeros.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
        "pick_condition": io::number(d.pick_condition),
        "max_interpolation_residual": io::number(d.max_interpolation_residual),
        "lambda_min_dissipation": io::number(d.lambda_min_dissipation),
        "in_band_error": d.in_band_error.map(io::number),
        "out_of_band_error": d.out_of_band_error.map(io::number),
        "warnings": d.warnings,
    })
}

fn ph(a: PhArgs) -> Result<()> {
    let fs = io::read_samples(&a.fit.samples)?;
    let mut cfg = a.fit.config()?;
    let (form, diag) = match a.band {
        Some(band) => {
            cfg.band = Some(band);
            let reference = a.reference.as_deref().map(load_model).transpose()?;
            identify_ph_limited(&fs, &cfg, reference.as_ref())?
        }
        None => identify_ph(&fs, &cfg)?,
    };
    for w in &diag.warnings {
        eprintln!("warning: {w}");
    }
    io::write_json(&a.output, &io::ph_value(&form))?;
    if let Some(path) = &a.diag {
        io::write_json(path, &diagnostics_value(&diag))?;
    }
    println!("order {}", form.dim());
    Ok(())
}

fn zeros(a: ZerosArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let all = compute_spectral_zeros(&model)?;
    let zs = if a.rhp { filter_rhp(&all, model.n())? } else { all };
    io::write_zeros(&a.output, &zs, model.m())?;
    if let Some(path) = &a.data {
        if !model.is_real() {
            return Err(phid_core::Error::ComplexModel.into());
        }
        let rights = spectral_data_from_model(&model, model.n())?;
        let ds = left_from_spectral(rights, real_part(model.d()))?;
        io::write_json(path, &io::tangential_value(&ds))?;
    }
    println!("{} zeros", zs.len());
    Ok(())
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Strict => "strict",
        Verdict::Nonstrict => "nonstrict",
        Verdict::Invalid => "invalid",
    }
}

fn sweep_value(sweep: &[SweepPoint]) -> Value {
    let finite: Vec<f64> = sweep.iter().filter_map(|p| p.lambda_min).collect();
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    json!({
        "points": sweep.len(),
        "failed_evaluations": sweep.len() - finite.len(),
        "lambda_min": io::number(min),
        "omega": sweep.iter().map(|p| p.omega).collect::<Vec<_>>(),
        "values": sweep.iter().map(|p| p.lambda_min.map(io::number)).collect::<Vec<_>>(),
    })
}

/// Writes the report, then fails with exit code 2 when a check did not pass.
fn validate(a: ValidateArgs) -> Result<()> {
    let v = io::read_json(&a.input)?;
    let mut report = serde_json::Map::new();
    let mut failures = Vec::new();
    let (model, default_x) = if io::is_ph_value(&v) {
        let form = io::ph_from_value(&v)?;
        report.insert("kind".into(), json!("ph"));
        report.insert("lambda_min_dissipation".into(), io::number(lambda_min_dissipation(&form)));
        report.insert("normalized".into(), json!(form.is_normalized()));
        (reconstruct(&form), Some(form.q().clone()))
    } else {
        report.insert("kind".into(), json!("model"));
        (io::model_from_value(&v)?, None)
    };
    report.insert("n".into(), json!(model.n()));
    report.insert("m".into(), json!(model.m()));

    let x = match &a.certificate {
        Some(path) => Some(io::load_named_matrix(path, "X")?),
        None => default_x,
    };
    if let Some(x) = x {
        let cert = check_certificate(&model, &x)?;
        if cert.verdict == Verdict::Invalid {
            failures.push("certificate".to_string());
        }
        report.insert(
            "certificate".into(),
            json!({
                "verdict": verdict_name(cert.verdict),
                "lambda_min_x": io::number(cert.lambda_min_x),
                "lambda_min_w": io::number(cert.lambda_min_w),
                "pick_condition": io::number(pick_condition(&cert.x)),
            }),
        );
    }

    let grid = match a.sweep {
        Some(g) => Some(g),
        None if !report.contains_key("certificate") => {
            let g = FrequencyGrid::default();
            Some(Grid {
                lo: g.lo,
                hi: g.hi,
                count: g.count,
            })
        }
        None => None,
    };
    if let Some(grid) = grid {
        let sweep = positive_real_sweep(&model, &grid.points(Scale::Log)?);
        if sweep.iter().any(|p| p.lambda_min.is_none_or(|x| x < -SWEEP_TOL)) {
            failures.push("sweep".to_string());
        }
        report.insert("sweep".into(), sweep_value(&sweep));
        if let Some(path) = &a.sweep_csv {
            io::write_sweep(path, &sweep)?;
        }
    }
    report.insert("passed".into(), json!(failures.is_empty()));
    report.insert("failed_checks".into(), json!(failures));
    io::write_json(&a.output, &Value::Object(report))?;
    if failures.is_empty() {
        println!("passed");
        Ok(())
    } else {
        Err(CliError::Rejected(format!("failed checks: {}", failures.join(", "))))
    }
}

fn dof(a: DofArgs) -> Result<()> {
    let kind = match a.rank {
        Some(r) => DofKind::ProperWithRank(r),
        None => DofKind::StrictlyProper,
    };
    println!("{}", dof_count(DofQuery::new(a.n, a.m, kind)?));
    Ok(())
}

fn bode(a: BodeArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    io::write_bode(&a.output, &model, &a.grid.points(a.scale)?)
}

/// Spectral data give a normalized pH model, general data a real Loewner
/// model whenever the data are self-conjugate.
fn interpolate(a: InterpolateArgs) -> Result<()> {
    let ds = io::tangential_from_value(&io::read_json(&a.data)?)?;
    if ds.spectral {
        let form = algorithm1(&ds.rights, &ds.d)?;
        println!("order {}", form.dim());
        return io::write_json(&a.output, &io::ph_value(&form));
    }
    let pencil = build_pencil(&ds)?;
    let pencil = match build_realifier(&ds) {
        Ok(map) => realify_pencil(&pencil, &map)?,
        Err(_) => pencil,
    };
    let model = assemble_realization(&pencil, &ds.d)?;
    println!("order {}", model.n());
    io::write_json(&a.output, &io::model_value(&model))
}

fn zoo_export(a: ZooExportArgs) -> Result<()> {
    let ladder_spec = || {
        let mut spec = LadderSpec::new(a.sections);
        spec.feedthrough = a.d.unwrap_or(1.0);
        spec
    };
    let value = match a.name.as_str() {
        "analytic" => io::model_value(&make_analytic(a.a, a.b, a.d.unwrap_or(2.0))?),
        "rlc5" => io::model_value(&make_rlc5()),
        "ladder" if a.ph => io::ph_value(&make_ladder_ph(&ladder_spec())?),
        "ladder" => io::model_value(&make_ladder(&ladder_spec())?),
        other => {
            let names: Vec<&str> = ZOO.iter().map(|e| e.name).collect();
            return Err(CliError::Data(format!("unknown model \"{other}\", available: {}", names.join(", "))));
        }
    };
    io::write_json(&a.output, &value)
}
