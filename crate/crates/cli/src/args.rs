//! Command-line flags and their resolution into library types.

use std::path::PathBuf;

use bootperc::families::{parse_edge_list, BaseSpec};
use bootperc::{FamilySpec, ProcessSpec, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bootperc",
    version,
    about = "Majority bootstrap percolation on high-dimensional geometric graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for trial and centre parallelism.
    #[arg(long, global = true, env = "BOOTPERC_WORKERS")]
    pub workers: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the process from random or explicit initial sets.
    Run(RunArgs),
    /// Estimate Φ(p) on a grid of p values from coupled trials.
    Scan(ScanArgs),
    /// Estimate the critical probability from per-trial critical points.
    Pc(PcArgs),
    /// Check the geometric class properties of a graph.
    Certify(CertifyArgs),
    /// Exact Φ and p_c by subset enumeration on small graphs.
    Exact(ExactArgs),
    /// Describe a family, or list the available kinds.
    Families(FamiliesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Hypercube,
    Product,
    Hamming,
    Torus,
    Grid,
    #[value(alias = "middle_layer")]
    MiddleLayer,
    Odd,
    Folded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProcessKind {
    Majority,
    #[value(alias = "r-neighbour")]
    Rneighbour,
    Boot,
}

#[derive(Clone, Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Dimension parameter of hypercube, hamming, middle-layer, odd and folded.
    #[arg(long)]
    pub n: Option<u32>,
    /// Alphabet size for hamming.
    #[arg(long)]
    pub q: Option<u32>,
    /// Side lengths for torus and grid, e.g. `4,4,3`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<u32>>,
    /// Product factors, e.g. `cycle:3,path:4,complete:2,star:3`.
    #[arg(long, value_delimiter = ',')]
    pub bases: Option<Vec<String>>,
    /// Explicit graph: one `u v` pair per line, `#` comments.
    #[arg(long)]
    pub edge_list: Option<PathBuf>,
    /// Class constant K: declared for explicit graphs, checked by certify.
    #[arg(long = "K")]
    pub big_k: Option<u32>,
}

#[derive(Clone, Debug, Args)]
pub struct ProcessArgs {
    #[arg(long, value_enum, default_value_t = ProcessKind::Majority)]
    pub process: ProcessKind,
    /// Majority threshold offset.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// r-neighbour threshold.
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Boot slack rounds.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_scale: f64,
    #[arg(long)]
    pub max_rounds: Option<u32>,
    /// Majority only: require strictly more than half.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Infection probability of the random initial set.
    #[arg(long, conflicts_with = "initial")]
    pub p: Option<f64>,
    /// Comma-separated vertex labels; an empty string is the empty set.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct CurveArgs {
    /// Window half-width ε of the reference bounds.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Window offset λ of the reference point.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Clone, Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub process: ProcessArgs,
    /// `start:stop:step`, inclusive of both ends.
    #[arg(long)]
    pub grid: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[command(flatten)]
    pub curves: CurveArgs,
}

#[derive(Clone, Debug, Args)]
pub struct PcArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub curves: CurveArgs,
}

#[derive(Clone, Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = bootperc::certify::MAX_ELL)]
    pub ell_max: u32,
    /// `exhaustive`, or the number of sampled centres for large graphs.
    #[arg(long, default_value = "64")]
    pub centers: String,
    /// Seed of the centre sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Projection recursion depth.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
}

#[derive(Clone, Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[arg(long, conflicts_with = "grid")]
    pub p: Option<f64>,
    #[arg(long)]
    pub grid: Option<String>,
    /// Bisection tolerance of the exact critical probability.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Clone, Debug, Args)]
pub struct FamiliesArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
}

impl FamilyArgs {
    pub fn is_given(&self) -> bool {
        self.family.is_some() || self.edge_list.is_some()
    }

    pub fn resolve(&self) -> Result<FamilySpec, CliError> {
        if let Some(path) = &self.edge_list {
            if self.family.is_some() {
                return Err(CliError::usage(
                    "--edge-list and --family are mutually exclusive",
                ));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            let (order, edges) = parse_edge_list(&text)?;
            return Ok(FamilySpec::Explicit {
                order,
                edges,
                k: self.big_k.unwrap_or(1),
            });
        }
        let kind = self
            .family
            .ok_or_else(|| CliError::usage("one of --family or --edge-list is required"))?;
        let n = || {
            self.n
                .ok_or_else(|| CliError::usage("--n is required for this family"))
        };
        let dims = || {
            self.dims
                .clone()
                .ok_or_else(|| CliError::usage("--dims is required for this family"))
        };
        Ok(match kind {
            FamilyKind::Hypercube => FamilySpec::Hypercube { n: n()? },
            FamilyKind::MiddleLayer => FamilySpec::MiddleLayer { n: n()? },
            FamilyKind::Odd => FamilySpec::Odd { n: n()? },
            FamilyKind::Folded => FamilySpec::Folded { n: n()? },
            FamilyKind::Hamming => FamilySpec::Hamming {
                n: n()?,
                q: self
                    .q
                    .ok_or_else(|| CliError::usage("--q is required for hamming"))?,
            },
            FamilyKind::Torus => FamilySpec::Torus { dims: dims()? },
            FamilyKind::Grid => FamilySpec::Grid { dims: dims()? },
            FamilyKind::Product => {
                let bases = self
                    .bases
                    .as_ref()
                    .ok_or_else(|| CliError::usage("--bases is required for product"))?;
                FamilySpec::Product {
                    bases: bases
                        .iter()
                        .map(|b| b.parse::<BaseSpec>())
                        .collect::<Result<_, _>>()?,
                }
            }
        })
    }
}

impl ProcessArgs {
    pub fn resolve(&self) -> Result<ProcessSpec, CliError> {
        let variant = match self.process {
            ProcessKind::Majority => Variant::Majority { m: self.m },
            ProcessKind::Rneighbour => Variant::RNeighbour { r: self.r },
            ProcessKind::Boot => Variant::Boot {
                k: self.k,
                gamma_scale: self.gamma_scale,
            },
        };
        let mut spec = ProcessSpec::new(variant).with_strict(self.strict);
        if let Some(max) = self.max_rounds {
            spec = spec.with_max_rounds(max);
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(CliError::usage(format!(
            "grid `{s}` must look like start:stop:step"
        )));
    };
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("bad number `{t}` in grid `{s}`")))
    };
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(0.0..=1.0).contains(&a)
        || !(0.0..=1.0).contains(&b)
        || a > b
        || step.is_nan()
        || step <= 0.0
    {
        return Err(CliError::usage(format!(
            "grid `{s}` needs 0 <= start <= stop <= 1 and step > 0"
        )));
    }
    let count = ((b - a) / step + 1e-9).floor() as u64;
    // points are a + i·step rounded to 12 decimals so that 0.1 steps print cleanly
    Ok((0..=count)
        .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
