//! The subcommands, each producing a serialisable document.

use bootperc::certify::Property;
use bootperc::{
    certify, critical_points, exact_pc, run, sample_infected, scan_phi, theory_curves_irregular,
    vertex_set, CenterPolicy, CertRequest, Certificate, ExactPhi, FamilySpec, Graph, GraphFamily,
    PcEstimate, PhiEstimate, ProcessSpec, TheoryCurves, Trace, TrialRandomness,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    parse_grid, CertifyArgs, CurveArgs, ExactArgs, FamiliesArgs, PcArgs, RunArgs, ScanArgs,
};
use crate::CliError;

/// Resolved inputs echoed in every document.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Config {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub big_k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<CenterPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub name: String,
    pub order: u64,
    pub min_degree: usize,
    pub max_degree: usize,
    #[serde(rename = "canonical_K")]
    pub canonical_k: u32,
}

impl GraphSummary {
    fn of(g: &GraphFamily) -> Self {
        Self {
            name: g.spec().to_string(),
            order: g.order(),
            min_degree: g.min_degree(),
            max_degree: g.max_degree(),
            canonical_k: g.canonical_k(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    pub initial_size: usize,
    pub percolated: bool,
    pub rounds_to_stabilize: u32,
    pub final_size: usize,
    /// Newly infected vertices per round, starting with `|A_0|`.
    pub per_round_counts: Vec<usize>,
}

impl TraceRecord {
    fn new(trial: Option<u64>, trace: &Trace) -> Self {
        let per_round_counts = trace.per_round_counts();
        Self {
            trial,
            initial_size: per_round_counts[0],
            percolated: trace.percolated,
            rounds_to_stabilize: trace.rounds_to_stabilize,
            final_size: trace.final_size(),
            per_round_counts,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunDoc {
    pub config: Config,
    pub graph: GraphSummary,
    pub traces: Vec<TraceRecord>,
    /// Final infected set when a single explicit initial set was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_set: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanDoc {
    pub config: Config,
    pub graph: GraphSummary,
    pub theory: Option<TheoryCurves>,
    pub rows: Vec<PhiEstimate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PcDoc {
    pub config: Config,
    pub graph: GraphSummary,
    pub theory: Option<TheoryCurves>,
    pub estimate: PcEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyDoc {
    pub config: Config,
    pub passed: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactRow {
    pub p: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactDoc {
    pub config: Config,
    pub graph: GraphSummary,
    pub pc: f64,
    /// Number of percolating initial sets of each size.
    pub percolating_by_size: Vec<u64>,
    pub rows: Vec<ExactRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KindInfo {
    pub kind: &'static str,
    pub flags: &'static str,
    #[serde(rename = "canonical_K")]
    pub canonical_k: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamiliesDoc {
    pub config: Config,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_radius: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub kinds: Vec<KindInfo>,
}

fn build(spec: &FamilySpec) -> Result<GraphFamily, CliError> {
    Ok(GraphFamily::new(spec.clone())?)
}

fn check_p(p: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(CliError::usage(format!("p must lie in [0, 1], got {p}")))
    }
}

fn curves(g: &GraphFamily, args: &CurveArgs) -> Result<Option<TheoryCurves>, CliError> {
    if !(args.eps.is_finite() && args.eps >= 0.0 && args.lambda.is_finite()) {
        return Err(CliError::usage(
            "--eps must be finite and non-negative, --lambda finite",
        ));
    }
    // reference curves are undefined below degree 3
    Ok(theory_curves_irregular(
        g.min_degree() as u64,
        g.max_degree() as u64,
        args.eps,
        args.lambda,
    )
    .ok())
}

pub fn cmd_run(args: &RunArgs) -> Result<RunDoc, CliError> {
    let family = args.family.resolve()?;
    let process = args.process.resolve()?;
    let g = build(&family)?;
    let mut config = Config {
        command: "run",
        family: Some(family),
        process: Some(process),
        ..Config::default()
    };
    if let Some(initial) = &args.initial {
        let labels: Vec<String> = initial
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        let vertices = labels
            .iter()
            .map(|l| g.parse_vertex(l))
            .collect::<bootperc::Result<Vec<_>>>()?;
        let trace = run(&g, &process, &vertex_set(&g, &vertices)?)?;
        config.initial = Some(labels);
        let final_set = trace
            .final_vertices(&g)
            .into_iter()
            .map(|v| g.label(v))
            .collect();
        return Ok(RunDoc {
            config,
            graph: GraphSummary::of(&g),
            traces: vec![TraceRecord::new(None, &trace)],
            final_set: Some(final_set),
        });
    }
    let p = check_p(
        args.p
            .ok_or_else(|| CliError::usage("run needs --p or --initial"))?,
    )?;
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be positive"));
    }
    let traces = (0..args.trials)
        .into_par_iter()
        .map(|t| {
            let a0 = sample_infected(&g, p, &TrialRandomness::new(args.seed, t));
            run(&g, &process, &a0).map(|trace| TraceRecord::new(Some(t), &trace))
        })
        .collect::<bootperc::Result<Vec<_>>>()?;
    config.p = Some(p);
    config.trials = Some(args.trials);
    config.seed = Some(args.seed);
    Ok(RunDoc {
        config,
        graph: GraphSummary::of(&g),
        traces,
        final_set: None,
    })
}

pub fn cmd_scan(args: &ScanArgs) -> Result<ScanDoc, CliError> {
    let family = args.family.resolve()?;
    let process = args.process.resolve()?;
    let grid = parse_grid(&args.grid)?;
    let g = build(&family)?;
    let theory = curves(&g, &args.curves)?;
    let points = critical_points(&g, &process, args.trials, args.seed)?;
    let rows = scan_phi(&points, &grid, args.confidence)?;
    Ok(ScanDoc {
        config: Config {
            command: "scan",
            family: Some(family),
            process: Some(process),
            grid: Some(grid),
            trials: Some(args.trials),
            seed: Some(args.seed),
            confidence: Some(args.confidence),
            eps: Some(args.curves.eps),
            lambda: Some(args.curves.lambda),
            ..Config::default()
        },
        graph: GraphSummary::of(&g),
        theory,
        rows,
    })
}

pub fn cmd_pc(args: &PcArgs) -> Result<PcDoc, CliError> {
    let family = args.family.resolve()?;
    let process = args.process.resolve()?;
    let g = build(&family)?;
    let theory = curves(&g, &args.curves)?;
    let points = critical_points(&g, &process, args.trials, args.seed)?;
    let estimate = PcEstimate::from_points(&points, args.seed)?;
    Ok(PcDoc {
        config: Config {
            command: "pc",
            family: Some(family),
            process: Some(process),
            trials: Some(args.trials),
            seed: Some(args.seed),
            eps: Some(args.curves.eps),
            lambda: Some(args.curves.lambda),
            ..Config::default()
        },
        graph: GraphSummary::of(&g),
        theory,
        estimate,
    })
}

fn center_policy(s: &str, seed: u64) -> Result<CenterPolicy, CliError> {
    if s.eq_ignore_ascii_case("exhaustive") {
        return Ok(CenterPolicy::Exhaustive);
    }
    match s.parse::<u32>() {
        Ok(count) if count > 0 => Ok(CenterPolicy::Sampled { count, seed }),
        _ => Err(CliError::usage(format!(
            "--centers must be `exhaustive` or a positive count, got `{s}`"
        ))),
    }
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<CertifyDoc, CliError> {
    let family = args.family.resolve()?;
    let g = build(&family)?;
    let k = args.family.big_k.unwrap_or_else(|| g.canonical_k());
    let centers = center_policy(&args.centers, args.seed)?;
    let request = CertRequest::new(&g, k)
        .ell_max(args.ell_max)
        .centers(centers)
        .projection_depth(args.depth);
    let certificate = certify(&request)?;
    Ok(CertifyDoc {
        config: Config {
            command: "certify",
            family: Some(family),
            big_k: Some(k),
            ell_max: Some(args.ell_max),
            centers: Some(centers),
            depth: Some(args.depth),
            ..Config::default()
        },
        passed: certificate.passed(),
        certificate,
    })
}

pub fn cmd_exact(args: &ExactArgs) -> Result<ExactDoc, CliError> {
    let family = args.family.resolve()?;
    let process = args.process.resolve()?;
    let grid = match (&args.grid, args.p) {
        (Some(grid), _) => parse_grid(grid)?,
        (None, Some(p)) => vec![check_p(p)?],
        (None, None) => parse_grid("0:1:0.1")?,
    };
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::usage("--tol must be positive"));
    }
    let g = build(&family)?;
    let oracle = ExactPhi::new(&g, &process)?;
    let rows = grid
        .iter()
        .map(|&p| ExactRow {
            p,
            phi: oracle.phi(p),
        })
        .collect();
    Ok(ExactDoc {
        config: Config {
            command: "exact",
            family: Some(family),
            process: Some(process),
            grid: Some(grid),
            tol: Some(args.tol),
            ..Config::default()
        },
        graph: GraphSummary::of(&g),
        pc: exact_pc(&g, &process, args.tol)?,
        percolating_by_size: oracle.counts_by_size().to_vec(),
        rows,
    })
}

const KINDS: [KindInfo; 9] = [
    KindInfo {
        kind: "hypercube",
        flags: "--n",
        canonical_k: "2",
    },
    KindInfo {
        kind: "product",
        flags: "--bases kind:size,... (path, cycle, complete, star)",
        canonical_k: "largest base order",
    },
    KindInfo {
        kind: "hamming",
        flags: "--n --q",
        canonical_k: "q",
    },
    KindInfo {
        kind: "torus",
        flags: "--dims",
        canonical_k: "largest side",
    },
    KindInfo {
        kind: "grid",
        flags: "--dims",
        canonical_k: "largest side",
    },
    KindInfo {
        kind: "middle-layer",
        flags: "--n",
        canonical_k: "4",
    },
    KindInfo {
        kind: "odd",
        flags: "--n",
        canonical_k: "4",
    },
    KindInfo {
        kind: "folded",
        flags: "--n",
        canonical_k: "3",
    },
    KindInfo {
        kind: "explicit",
        flags: "--edge-list FILE [--K]",
        canonical_k: "--K (default 1)",
    },
];

pub fn cmd_families(args: &FamiliesArgs) -> Result<FamiliesDoc, CliError> {
    if !args.family.is_given() {
        return Ok(FamiliesDoc {
            config: Config {
                command: "families",
                ..Config::default()
            },
            graph: None,
            local_radius: None,
            kinds: KINDS.to_vec(),
        });
    }
    let family = args.family.resolve()?;
    let g = build(&family)?;
    Ok(FamiliesDoc {
        config: Config {
            command: "families",
            family: Some(family),
            ..Config::default()
        },
        graph: Some(GraphSummary::of(&g)),
        local_radius: g.local_radius(),
        kinds: Vec::new(),
    })
}

/// Short status of a property, as used in flat outputs.
pub(crate) fn property_name(p: Property) -> String {
    serde_json::to_value(p)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_else(|| format!("{p:?}"))
}
