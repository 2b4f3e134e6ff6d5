mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use vsi_core::catalog::{builtin, CatalogError};
use vsi_core::curvature::{build_stack, CurvatureError, CurvatureStack, WitnessKind, DEFAULT_COMPONENT_CAP};
use vsi_core::degeneracy::{
    vsi_verdict_for_stack, DegeneracyError, OrderStatus, Strictness, VerdictOptions, CONVENTION_NOTE,
    INCONCLUSIVE_NOTE,
};
use vsi_core::expr::display;
use vsi_core::frame::{bw_decompose, bw_decompose_curvature, classify_geometry, FrameError, NullFrame};
use vsi_core::io::{ExpectedFile, FrameFile, IoError, MetricFile};
use vsi_core::oracle::{cross_check_metric, OracleError, SamplePlan};
use vsi_core::tensor::Metric;

use report::{Cell, Certificate, CommandEcho, Entry, Flags, MismatchEntry, OrderEntry, Report, Resources, Results};

const CAP_ENV: &str = "VSI_COMPONENT_CAP";

#[derive(Parser, Debug)]
#[command(name = "vsi", version, about = "Exact curvature invariants and VSI verdicts for pseudo-Riemannian metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Self-norms of ∇^j Riem for j ≤ order and the operator traces.
    Invariants {
        metric: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Walker/Kundt/recurrent/constant flags from the spin coefficients (4D neutral).
    Classify {
        metric: PathBuf,
        #[arg(long)]
        frame: PathBuf,
    },
    /// VSI verdict per order with its certificate.
    Vsi {
        metric: PathBuf,
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Boost-weight diagram of a tensor in the frame.
    Bw {
        metric: PathBuf,
        #[arg(long)]
        frame: PathBuf,
        /// `riemann`, `nabla^j` or `metric`.
        #[arg(long, default_value = "riemann")]
        tensor: String,
    },
    /// Write metric, frame and expectation files for a catalog family.
    Builtin {
        name: String,
        /// Binding `key=expr`; repeatable.
        #[arg(long = "set", value_name = "KEY=EXPR")]
        set: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Cross-check the symbolic invariants at random rational points.
    Oracle {
        metric: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<CurvatureError> for CliError {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            CurvatureError::InvariantViolation(_) => CliError::Internal(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<DegeneracyError> for CliError {
    fn from(e: DegeneracyError) -> Self {
        match e {
            DegeneracyError::Curvature(c) => c.into(),
            DegeneracyError::InvariantViolation(_) => CliError::Internal(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Curvature(c) => c.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

fn component_cap() -> Result<usize, CliError> {
    match std::env::var(CAP_ENV) {
        Err(_) => Ok(DEFAULT_COMPONENT_CAP),
        Ok(text) => {
            let v: f64 = text
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("{CAP_ENV}='{text}' is not a number")))?;
            if !(v.is_finite() && v >= 1.0) {
                return Err(CliError::Invalid(format!("{CAP_ENV} must be at least 1, got '{text}'")));
            }
            Ok(v.min(usize::MAX as f64) as usize)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn load_metric(path: &Path) -> Result<Metric, CliError> {
    let file = MetricFile::from_json(&read(path)?).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    file.to_metric().map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn load_frame(path: &Path, metric: &Metric) -> Result<NullFrame, CliError> {
    let file = FrameFile::from_json(&read(path)?).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    file.to_frame(metric).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn stack_for(metric: &Metric, order: usize) -> Result<(CurvatureStack, usize), CliError> {
    let cap = component_cap()?;
    Ok((build_stack(metric, order, cap)?, cap))
}

fn resources(stack: &CurvatureStack, cap: usize) -> Resources {
    Resources {
        order: stack.order(),
        dense_components: stack.total_components(),
        stored_components: stack.stored_components(),
        cap,
    }
}

fn echo(name: &str, args: &[(&str, String)]) -> CommandEcho {
    CommandEcho {
        name: name.into(),
        args: args.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn invariants(metric_path: &Path, order: usize) -> Result<Report, CliError> {
    let metric = load_metric(metric_path)?;
    let (stack, cap) = stack_for(&metric, order)?;
    let ctx = metric.ctx();
    let witnesses = stack.witnesses(order)?;
    let (norms, ops): (Vec<_>, Vec<_>) = witnesses
        .iter()
        .partition(|w| matches!(w.kind, WitnessKind::SelfNorm { .. }));
    let entries = |ws: Vec<&vsi_core::curvature::Witness>| -> Vec<Entry> {
        ws.into_iter().map(|w| Entry::new(w.kind.to_string(), display(&w.value, ctx))).collect()
    };
    Ok(Report {
        command: echo("invariants", &[("metric", path_str(metric_path)), ("order", order.to_string())]),
        convention: "R^a_bcd = d_c G^a_bd - d_d G^a_bc + G^a_ce G^e_bd - G^a_de G^e_bc; R_abcd = g_ae R^e_bcd".into(),
        results: Results::Invariants {
            self_norms: entries(norms),
            operator: entries(ops),
        },
        certificate: None,
        resources: Some(resources(&stack, cap)),
    })
}

fn classify(metric_path: &Path, frame_path: &Path) -> Result<Report, CliError> {
    let metric = load_metric(metric_path)?;
    let frame = load_frame(frame_path, &metric)?;
    let conn = vsi_core::curvature::christoffel(&metric);
    let (flags, spin) = classify_geometry(&frame, &conn)?;
    let ctx = metric.ctx();
    Ok(Report {
        command: echo("classify", &[("metric", path_str(metric_path)), ("frame", path_str(frame_path))]),
        convention: "walker: kappa = rho = sigma = tau = 0; kundt: kappa, rho, sigma and their ~ partners vanish; \
                     spin coefficients are frame components of the derivative of l1"
            .into(),
        results: Results::Classify {
            flags: Flags {
                walker: flags.walker_plane,
                kundt: flags.kundt,
                recurrent: flags.recurrent,
                covariantly_constant: flags.covariantly_constant,
            },
            spin_coefficients: spin.named().into_iter().map(|(n, v)| Entry::new(n, display(v, ctx))).collect(),
        },
        certificate: None,
        resources: None,
    })
}

fn vsi(metric_path: &Path, frame_path: &Path, order: usize) -> Result<Report, CliError> {
    let metric = load_metric(metric_path)?;
    let frame = load_frame(frame_path, &metric)?;
    let (stack, cap) = stack_for(&metric, order)?;
    let verdict = vsi_verdict_for_stack(&stack, &frame, VerdictOptions::default())?;
    let ctx = metric.ctx();
    let orders = verdict
        .orders
        .iter()
        .map(|o| OrderEntry {
            order: o.order,
            label: o.label(),
            support: o.support.iter().map(|b| b.0.clone()).collect(),
            witness: match &o.status {
                OrderStatus::RefutedAtOrder { witness, value } => Some(Entry::new(witness.to_string(), display(value, ctx))),
                _ => None,
            },
        })
        .collect();
    let refuted = verdict.first_refuted();
    let inconclusive = verdict.orders.iter().any(|o| o.status == OrderStatus::Inconclusive);
    let certificate = Certificate {
        lambda: verdict.direction.as_ref().map(|d| d.lambda.clone()),
        strictness: verdict.direction.as_ref().map(|d| match d.strictness {
            Strictness::Strict => "strict".into(),
            Strictness::Weak => "weak".into(),
        }),
        certified_through: verdict.highest_certified(),
        witness: refuted.and_then(|o| match &o.status {
            OrderStatus::RefutedAtOrder { witness, value } => Some(Entry::new(witness.to_string(), display(value, ctx))),
            _ => None,
        }),
        refuted_at: refuted.map(|o| o.order),
        no_direction: verdict.failure.map(|f| f.to_string()),
    };
    Ok(Report {
        command: echo(
            "vsi",
            &[
                ("metric", path_str(metric_path)),
                ("frame", path_str(frame_path)),
                ("order", order.to_string()),
            ],
        ),
        convention: CONVENTION_NOTE.into(),
        results: Results::Vsi {
            summary: verdict.summary(),
            orders,
            note: inconclusive.then(|| INCONCLUSIVE_NOTE.to_string()),
        },
        certificate: Some(certificate),
        resources: Some(resources(&stack, cap)),
    })
}

fn parse_tensor(spec: &str) -> Result<Option<usize>, CliError> {
    let s = spec.trim().to_ascii_lowercase();
    match s.as_str() {
        "metric" | "g" => Ok(None),
        "riemann" | "riem" => Ok(Some(0)),
        "nabla" => Ok(Some(1)),
        _ => s
            .strip_prefix("nabla^")
            .and_then(|j| j.parse().ok())
            .map(Some)
            .ok_or_else(|| CliError::Invalid(format!("unknown tensor '{spec}' (riemann, nabla^j or metric)"))),
    }
}

fn bw(metric_path: &Path, frame_path: &Path, tensor: &str) -> Result<Report, CliError> {
    let metric = load_metric(metric_path)?;
    let frame = load_frame(frame_path, &metric)?;
    let which = parse_tensor(tensor)?;
    let (dec, res) = match which {
        None => (bw_decompose(metric.g(), &frame)?, None),
        Some(j) => {
            let (stack, cap) = stack_for(&metric, j)?;
            (bw_decompose_curvature(stack.member(j)?, &frame), Some(resources(&stack, cap)))
        }
    };
    let cells = dec
        .counts()
        .into_iter()
        .map(|(b, count)| Cell { weight: b.0, count })
        .collect();
    Ok(Report {
        command: echo(
            "bw",
            &[
                ("metric", path_str(metric_path)),
                ("frame", path_str(frame_path)),
                ("tensor", tensor.to_string()),
            ],
        ),
        convention: CONVENTION_NOTE.into(),
        results: Results::Bw {
            tensor: match which {
                None => "metric".into(),
                Some(0) => "riemann".into(),
                Some(j) => format!("nabla^{j}"),
            },
            k: frame.k(),
            representatives: dec.orbit_representatives(),
            cells,
        },
        certificate: None,
        resources: res,
    })
}

fn builtin_cmd(name: &str, sets: &[String], out: &Path) -> Result<Report, CliError> {
    let pairs = sets
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Invalid(format!("--set expects KEY=EXPR, got '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let inst = builtin(name, &pairs)?;
    fs::create_dir_all(out).map_err(|e| CliError::Invalid(format!("{}: {e}", out.display())))?;
    let expected = ExpectedFile::from_instance(&inst);
    let files = [
        ("metric.json", MetricFile::from_metric(&inst.metric).to_json()),
        ("frame.json", FrameFile::from_frame(&inst.frame).to_json()),
        ("expected.json", expected.to_json()),
    ];
    let mut written = Vec::new();
    for (file, text) in files {
        let p = out.join(file);
        fs::write(&p, text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
        written.push(path_str(&p));
    }
    let mut args = vec![("name", name.to_string()), ("out", path_str(out))];
    if !sets.is_empty() {
        args.push(("set", sets.join(";")));
    }
    Ok(Report {
        command: echo("builtin", &args),
        convention: CONVENTION_NOTE.into(),
        results: Results::Builtin {
            family: inst.id.clone(),
            files: written,
            expected: expected.description,
        },
        certificate: None,
        resources: None,
    })
}

fn oracle(metric_path: &Path, order: usize, seed: u64, points: usize) -> Result<Report, CliError> {
    let metric = load_metric(metric_path)?;
    let (stack, cap) = stack_for(&metric, order)?;
    let plan = SamplePlan::with_seed(seed, points);
    let r = cross_check_metric(&path_str(metric_path), &metric, &stack, &plan, &[])?;
    Ok(Report {
        command: echo(
            "oracle",
            &[
                ("metric", path_str(metric_path)),
                ("order", order.to_string()),
                ("seed", seed.to_string()),
                ("points", points.to_string()),
            ],
        ),
        convention: "exact rational evaluation at sampled points; no tolerances".into(),
        results: Results::Oracle {
            points: r.points.len(),
            comparisons: r.comparisons,
            mismatches: r
                .mismatches
                .into_iter()
                .map(|m| MismatchEntry {
                    point: m.point,
                    quantity: m.quantity,
                    symbolic: m.symbolic,
                    pointwise: m.pointwise,
                })
                .collect(),
            exhausted: r.exhausted,
        },
        certificate: None,
        resources: Some(resources(&stack, cap)),
    })
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Invariants { metric, order } => invariants(metric, *order),
        Command::Classify { metric, frame } => classify(metric, frame),
        Command::Vsi { metric, frame, order } => vsi(metric, frame, *order),
        Command::Bw { metric, frame, tensor } => bw(metric, frame, tensor),
        Command::Builtin { name, set, out } => builtin_cmd(name, set, out),
        Command::Oracle {
            metric,
            order,
            seed,
            points,
        } => oracle(metric, *order, *seed, *points),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.render());
            }
            // Oracle mismatches mean the symbolic pipeline is wrong somewhere.
            match &report.results {
                Results::Oracle { mismatches, .. } if !mismatches.is_empty() => ExitCode::from(4),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
