//! `epd` command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input or arguments, 3 when an
//! internal invariant check fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use epd_core::label::one_hot;
use epd_core::losses::{dice_loss_smoothed, l1_loss, total_loss, LossWeights};
use epd_core::metrics::{evaluate, Exclusion, Target};
use epd_core::preprocess::{stack_windows, HuWindow, DEFAULT_WINDOWS};
use epd_core::synth::{bench_sweep, generate, Shape, ShapeSpec};
use epd_core::{bilinear_image_downsample, nearest_label_downsample, Factor, MultiChannelImage, SoftLabelMap};
use serde::Deserialize;

use crate::pad::{pad_image, pad_label, Padding};
use crate::par;
use crate::planefile::{self, Plane, Semantic};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "epd", version, about = "Edge-preserving probabilistic downsampling of segmentation labels and CT images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Downsample a label or image plane file
    Downsample(DownsampleArgs),
    /// Evaluate a soft prediction against a target with threshold search
    Metrics(MetricsArgs),
    /// Render a synthetic label map
    Synth(SynthArgs),
    /// Compare class-area preservation of EPD and nearest-neighbor
    Bench(BenchArgs),
    /// Evaluate the L1, dice and uncertainty-weighted losses on two files
    LossEval(LossEvalArgs),
    /// HU windowing into three channels followed by downsampling
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Epd,
    Nearest,
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Label,
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct DownsampleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub factor: usize,
    #[arg(long, value_enum, default_value_t = Method::Epd)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Kind::Label)]
    pub kind: Kind,
    #[arg(long)]
    pub output: PathBuf,
    /// Pad bottom/right to a multiple of the factor (labels with class 0,
    /// images by edge replication) instead of failing
    #[arg(long)]
    pub pad: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Soft-label prediction (a hard label is one-hot encoded)
    #[arg(long)]
    pub pred: PathBuf,
    /// Hard or soft target
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub report: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Average over every class, counting undefined values as 0
    #[arg(long)]
    pub keep_missing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Disk,
    HalfPlane,
    Stripes,
    Random,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long, value_enum)]
    pub shape: ShapeKind,
    /// Side length of a square map
    #[arg(long, default_value_t = 512)]
    pub size: usize,
    /// Overrides the height given by --size
    #[arg(long)]
    pub rows: Option<usize>,
    /// Overrides the width given by --size
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Disk radius (default: a quarter of the smaller side)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Disk center or half-plane anchor row (default: middle)
    #[arg(long)]
    pub center_row: Option<f64>,
    /// Disk center or half-plane anchor column (default: middle)
    #[arg(long)]
    pub center_col: Option<f64>,
    /// Half-plane normal angle in degrees
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub angle: f64,
    /// Stripe width in pixels
    #[arg(long, default_value_t = 1)]
    pub width: usize,
    /// Stripe period (default: twice the width)
    #[arg(long)]
    pub period: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub phase: usize,
}

impl ShapeArgs {
    pub fn spec(&self) -> ShapeSpec {
        let h = self.rows.unwrap_or(self.size);
        let w = self.cols.unwrap_or(self.size);
        let row = self.center_row.unwrap_or(h as f64 / 2.0);
        let col = self.center_col.unwrap_or(w as f64 / 2.0);
        let shape = match self.shape {
            ShapeKind::Disk => Shape::Disk {
                center_row: row,
                center_col: col,
                radius: self.radius.unwrap_or(h.min(w) as f64 / 4.0),
            },
            ShapeKind::HalfPlane => Shape::HalfPlane {
                angle_deg: self.angle,
                anchor_row: row,
                anchor_col: col,
            },
            ShapeKind::Stripes => Shape::Stripes {
                width: self.width,
                period: self.period.unwrap_or(2 * self.width),
                phase: self.phase,
            },
            ShapeKind::Random => Shape::Random,
        };
        ShapeSpec::new(shape, h, w, self.classes).with_seed(self.seed)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Output plane file, or a `.pgm`
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
    pub factors: Vec<usize>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LossEvalArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Weights for the L1 and dice terms
    #[arg(long, value_delimiter = ',', default_values_t = [1.0f64, 1.0])]
    pub omega: Vec<f64>,
    /// Dice smoothing added to numerator and denominator
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Single-channel HU image
    #[arg(long)]
    pub input: PathBuf,
    /// Three `lo:hi` HU windows, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub windows: Option<String>,
    /// TOML file with `windows = [[lo, hi], ...]` and optionally `factor`
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub factor: Option<usize>,
    /// `epd` (window mean) or `bilinear`
    #[arg(long, value_enum, default_value_t = Method::Epd)]
    pub method: Method,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub windows: Option<Vec<[f64; 2]>>,
    pub factor: Option<usize>,
}

/// Failure classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Validation(e.into())
    }
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

type Outcome = Result<(), Failure>;

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = panic::catch_unwind(AssertUnwindSafe(|| run(cli)));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            let (Failure::Validation(e) | Failure::Internal(e)) = &failure;
            eprintln!("error: {e:#}");
            ExitCode::from(failure.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}

pub fn run(cli: Cli) -> Outcome {
    let pool = par::pool(par::threads_from_env());
    match cli.command {
        Command::Downsample(a) => downsample(&pool, &a),
        Command::Metrics(a) => metrics(&a),
        Command::Synth(a) => synth(&a),
        Command::Bench(a) => bench(&a),
        Command::LossEval(a) => loss_eval(&a),
        Command::Pipeline(a) => pipeline(&pool, &a),
    }
}

fn factor(f: usize) -> Result<Factor, Failure> {
    Factor::new(f).map_err(Failure::from)
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn downsample(pool: &rayon::ThreadPool, a: &DownsampleArgs) -> Outcome {
    let f = factor(a.factor)?;
    let input = planefile::load(&a.input)?;
    let (h, w) = input.dims();
    let padding = Padding::for_dims(h, w, a.factor);
    if !a.pad && !padding.is_empty() {
        // surfaces the axis and suggested padded size
        epd_core::downsample::output_dims(h, w, f).context("rerun with --pad to pad to the suggested size")?;
    }
    let recorded = (!padding.is_empty()).then_some([padding.rows, padding.cols]);

    let output = match (a.kind, input) {
        (Kind::Label, Plane::Hard(label)) => {
            let label = pad_label(&label, padding);
            match a.method {
                Method::Epd => Plane::Soft(par::epd_label_downsample(pool, &label, f).map_err(internal)?),
                Method::Nearest => Plane::Hard(nearest_label_downsample(&label, f)?),
                Method::Bilinear => return Err(anyhow!("bilinear downsampling applies to images, not labels").into()),
            }
        }
        (Kind::Label, Plane::Soft(soft)) => match a.method {
            Method::Epd if padding.is_empty() => Plane::Soft(par::epd_soft_downsample(pool, &soft, f).map_err(internal)?),
            Method::Epd => return Err(anyhow!("soft labels cannot be padded; pad the hard label instead").into()),
            _ => return Err(anyhow!("soft labels only support --method epd").into()),
        },
        (Kind::Image, Plane::Image { semantic, image }) => {
            if a.method == Method::Nearest {
                return Err(anyhow!("nearest-neighbor downsampling applies to labels, not images").into());
            }
            let out = image.try_map(|ch| {
                let ch = pad_image(ch, padding);
                match a.method {
                    Method::Epd => par::epd_image_downsample(pool, &ch, f),
                    _ => bilinear_image_downsample(&ch, f),
                }
            });
            Plane::Image {
                semantic,
                image: out?,
            }
        }
        (kind, other) => {
            return Err(anyhow!(
                "--kind {} does not accept a {} file",
                if kind == Kind::Label { "label" } else { "image" },
                other.semantic().name()
            )
            .into())
        }
    };
    if let Plane::Soft(s) = &output {
        s.validate().map_err(internal)?;
    }
    planefile::save_with_padding(&a.output, &output, recorded)?;
    if let Some([rows, cols]) = recorded {
        eprintln!("padded {rows} rows and {cols} columns before downsampling");
    }
    Ok(())
}

fn metrics(a: &MetricsArgs) -> Outcome {
    let pred = match planefile::load(&a.pred)? {
        Plane::Soft(s) => s,
        Plane::Hard(h) => one_hot(&h),
        other => return Err(anyhow!("prediction must be a label file, got {}", other.semantic().name()).into()),
    };
    let target_plane = planefile::load(&a.target)?;
    let target = match &target_plane {
        Plane::Hard(h) => Target::Hard(h),
        Plane::Soft(s) => Target::Soft(s),
        other => return Err(anyhow!("target must be a label file, got {}", other.semantic().name()).into()),
    };
    let policy = if a.keep_missing { Exclusion::ZeroFill } else { Exclusion::MissingClasses };
    let search = evaluate(&pred, target, a.step, policy)?;
    let text = match a.report {
        ReportFormat::Csv => report::metrics_csv(&search.report),
        ReportFormat::Json => report::metrics_json(&search.report),
    };
    emit(a.output.as_deref(), &text)
}

fn synth(a: &SynthArgs) -> Outcome {
    let label = generate(&a.shape.spec())?;
    planefile::save(&a.output, &Plane::Hard(label))?;
    Ok(())
}

fn bench(a: &BenchArgs) -> Outcome {
    let factors = a.factors.iter().map(|&f| factor(f)).collect::<Result<Vec<_>, _>>()?;
    let rows = bench_sweep(&a.shape.spec(), &factors)?;
    emit(a.output.as_deref(), &report::bench_csv(&rows))
}

fn as_soft(plane: Plane, what: &str) -> Result<SoftLabelMap, Failure> {
    match plane {
        Plane::Soft(s) => Ok(s),
        Plane::Hard(h) => Ok(one_hot(&h)),
        other => Err(anyhow!("{what} must be a label file, got {}", other.semantic().name()).into()),
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn loss_eval(a: &LossEvalArgs) -> Outcome {
    let target = as_soft(planefile::load(&a.target)?, "target")?;
    let pred = as_soft(planefile::load(&a.pred)?, "prediction")?;
    if (target.height(), target.width(), target.num_classes()) != (pred.height(), pred.width(), pred.num_classes()) {
        return Err(anyhow!("target and prediction shapes differ").into());
    }
    let l1 = l1_loss(target.data(), pred.data())?;
    let dice = dice_loss_smoothed(target.data(), pred.data(), a.eps)?;
    let weights = LossWeights::new(a.omega.clone())?;
    let total = total_loss(&[l1.value, dice.value], &weights)?;
    let grad_omega = total.grad_omega.as_deref().unwrap_or_default();
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",");
    println!("l1 value={:.6} grad_norm={:.6}", l1.value, l2(&l1.grad_pred));
    println!("dice value={:.6} grad_norm={:.6}", dice.value, l2(&dice.grad_pred));
    println!(
        "total value={:.6} grad_terms={} grad_omega={}",
        total.value,
        list(&total.grad_pred),
        list(grad_omega)
    );
    Ok(())
}

pub fn parse_windows(s: &str) -> anyhow::Result<Vec<HuWindow>> {
    s.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .with_context(|| format!("window `{part}` is not of the form lo:hi"))?;
            let lo: f64 = lo.trim().parse().with_context(|| format!("bad window bound `{lo}`"))?;
            let hi: f64 = hi.trim().parse().with_context(|| format!("bad window bound `{hi}`"))?;
            Ok(HuWindow::new(lo, hi)?)
        })
        .collect()
}

fn pipeline(pool: &rayon::ThreadPool, a: &PipelineArgs) -> Outcome {
    let config: PipelineConfig = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => PipelineConfig::default(),
    };
    let windows = match (&a.windows, &config.windows) {
        (Some(s), _) => parse_windows(s)?,
        (None, Some(list)) => list
            .iter()
            .map(|&[lo, hi]| HuWindow::new(lo, hi))
            .collect::<Result<_, _>>()?,
        (None, None) => DEFAULT_WINDOWS
            .iter()
            .map(|&(lo, hi)| HuWindow::new(lo, hi))
            .collect::<Result<_, _>>()?,
    };
    let f = factor(
        a.factor
            .or(config.factor)
            .ok_or_else(|| anyhow!("--factor is required unless the config sets it"))?,
    )?;
    let image = match planefile::load(&a.input)? {
        Plane::Image {
            semantic: Semantic::ImageHu,
            image,
        } if image.channels().len() == 1 => image.into_channels().remove(0),
        other => return Err(anyhow!("pipeline expects a single-channel image-hu file, got {}", other.semantic().name()).into()),
    };
    let stacked = stack_windows(&image, &windows)?;
    let down: MultiChannelImage = match a.method {
        Method::Epd => stacked.try_map(|ch| par::epd_image_downsample(pool, ch, f))?,
        Method::Bilinear => stacked.try_map(|ch| bilinear_image_downsample(ch, f))?,
        Method::Nearest => return Err(anyhow!("pipeline supports --method epd or bilinear").into()),
    };
    planefile::save(
        &a.output,
        &Plane::Image {
            semantic: Semantic::ImageNorm,
            image: down,
        },
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_parse_negative_bounds() {
        let w = parse_windows("-190:-30,-29:150,-1000:1000").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!((w[0].lo(), w[0].hi()), (-190.0, -30.0));
        assert!(parse_windows("5:1").is_err());
        assert!(parse_windows("-190").is_err());
    }

    #[test]
    fn config_accepts_integer_bounds() {
        let c: PipelineConfig = toml::from_str("windows = [[-190, -30], [-29, 150], [-1000, 1000]]\nfactor = 4\n").unwrap();
        assert_eq!(c.windows.unwrap()[2], [-1000.0, 1000.0]);
        assert_eq!(c.factor, Some(4));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
