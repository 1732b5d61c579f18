//! `moma`: extract motion features from BVH files to CSV, build and match
//! gesture templates, or stream features over OSC in real time.
//!
//! Exit codes: 0 success, 1 input/parse/runtime failure, 2 unknown feature.
//! Diagnostics go to standard error; data only to the declared outputs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand};

use moma_core::error::Error as CoreError;
use moma_core::extract::{
    extract_features, guess_contact_candidates, guess_end_effectors, ExtractContext,
    FeatureKind, FeatureRequest,
};
use moma_core::features::balance::SegmentModel;
use moma_core::features::ergonomics::DiscomfortTable;
use moma_core::io::bvh::parse_bvh;
use moma_core::io::csv::export_feature_csv;
use moma_core::io::lab::{write_labels, Label};
use moma_core::math::Axis;
use moma_core::recognition::{
    build_template, detect, parse_feature_defs, relational_features, spans_to_labels,
    subsequence_distance, MotionTemplate,
};
use moma_core::skeleton::{PoseTrack, SkeletonTopology};
use moma_osc::{StreamConfig, StreamEngine};

#[derive(Parser)]
#[command(name = "moma", version, about = "Motion-capture feature extraction engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract features from a BVH file into a CSV table.
    Extract(ExtractArgs),
    /// Build or match gesture templates.
    #[command(subcommand)]
    Template(TemplateCommand),
    /// Run the OSC streaming loop until interrupted.
    Stream {
        /// Stream configuration file (`key value` lines).
        config: PathBuf,
    },
}

#[derive(Args)]
struct ExtractArgs {
    /// Input BVH file.
    input: PathBuf,
    /// Comma-separated feature list, e.g. `com,weight_effort:0.5`.
    #[arg(long, short = 'f')]
    features: String,
    /// Output CSV path.
    #[arg(long, short = 'o')]
    output: PathBuf,
    /// Optional label output: runs of the ternary balance state
    /// (requires the `balance` feature).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Segment model file (`name proximal distal com_ratio mass_fraction`).
    #[arg(long)]
    segments: Option<PathBuf>,
    /// Discomfort table file for postural load.
    #[arg(long)]
    discomfort: Option<PathBuf>,
    /// Comma-separated ground-contact candidate node names
    /// (default: nodes whose names contain foot/toe/ankle).
    #[arg(long)]
    contact_nodes: Option<String>,
    /// Comma-separated end-effector node names for sphereness
    /// (default: head/hands/feet guessed by name).
    #[arg(long)]
    end_effectors: Option<String>,
    /// Up axis of the recording: X, Y or Z.
    #[arg(long, default_value = "Y")]
    up: String,
    /// Node tracked by covered distance/area and space effort
    /// (default: the root).
    #[arg(long)]
    space_node: Option<String>,
}

#[derive(Subcommand)]
enum TemplateCommand {
    /// Average one gesture's executions into a template file.
    Build {
        /// Relational feature definitions file.
        #[arg(long)]
        defs: PathBuf,
        /// One or more BVH executions of the same gesture.
        executions: Vec<PathBuf>,
        /// Output template path.
        #[arg(long, short = 'o')]
        output: PathBuf,
        /// Lower uncertainty threshold.
        #[arg(long, default_value_t = 0.1)]
        tau_lo: f64,
        /// Upper uncertainty threshold.
        #[arg(long, default_value_t = 0.9)]
        tau_hi: f64,
    },
    /// Match a template against a target recording, writing detections
    /// as a .lab file.
    Match {
        /// Template file produced by `template build`.
        template: PathBuf,
        /// Target BVH recording.
        target: PathBuf,
        /// Relational feature definitions file (same family as the build).
        #[arg(long)]
        defs: PathBuf,
        /// Detection threshold on the distance curve.
        #[arg(long)]
        threshold: f64,
        /// Output .lab path.
        #[arg(long, short = 'o')]
        output: PathBuf,
        /// Merge detections separated by fewer than this many frames.
        #[arg(long, default_value_t = 2)]
        merge_gap: usize,
        /// Label name for detections (default: template file stem).
        #[arg(long)]
        name: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Template(TemplateCommand::Build {
            defs,
            executions,
            output,
            tau_lo,
            tau_hi,
        }) => cmd_template_build(&defs, &executions, &output, tau_lo, tau_hi),
        Command::Template(TemplateCommand::Match {
            template,
            target,
            defs,
            threshold,
            output,
            merge_gap,
            name,
        }) => cmd_template_match(&template, &target, &defs, threshold, &output, merge_gap, name),
        Command::Stream { config } => cmd_stream(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("moma: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    UnknownFeature(String),
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::UnknownFeature(name) => write!(f, "unknown feature `{name}`"),
            CliError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::UnknownFeature(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::UnknownFeature(name) => CliError::UnknownFeature(name),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<moma_osc::StreamError> for CliError {
    fn from(e: moma_osc::StreamError) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn load_bvh(path: &Path) -> Result<(SkeletonTopology<f64>, PoseTrack<f64>), CliError> {
    let text = read_file(path)?;
    parse_bvh(&text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn node_list(
    topology: &SkeletonTopology<f64>,
    names: &str,
) -> Result<Vec<usize>, CliError> {
    names.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|name| topology.require(name.trim()).map_err(CliError::from))
        .collect()
}

fn cmd_extract(args: ExtractArgs) -> Result<(), CliError> {
    let requests = FeatureRequest::parse_list(&args.features)?;
    if requests.is_empty() {
        return Err(CliError::UnknownFeature(String::new()));
    }
    let (topology, pose) = load_bvh(&args.input)?;

    let segments = match &args.segments {
        Some(path) => Some(
            SegmentModel::parse(&read_file(path)?, &topology)
                .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let discomfort = match &args.discomfort {
        Some(path) => Some(
            DiscomfortTable::parse(&read_file(path)?)
                .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };

    let mut ctx = ExtractContext::for_pose(&pose, &topology);
    ctx.segments = segments.as_ref();
    ctx.discomfort = discomfort.as_ref();
    ctx.balance.up = Axis::parse(&args.up)?;
    ctx.contact_candidates = Some(match &args.contact_nodes {
        Some(names) => node_list(&topology, names)?,
        None => guess_contact_candidates(&topology),
    });
    ctx.end_effectors = Some(match &args.end_effectors {
        Some(names) => node_list(&topology, names)?,
        None => guess_end_effectors(&topology),
    });
    if let Some(name) = &args.space_node {
        ctx.space_node = topology.require(name)?;
    }

    let features = extract_features(pose.positions(), &ctx, &requests)?;
    write_file(&args.output, &export_feature_csv(&features)?)?;

    if let Some(lab_path) = &args.labels {
        let balance = requests
            .iter()
            .zip(&features)
            .find(|(r, _)| r.kind == FeatureKind::Balance)
            .ok_or_else(|| {
                CliError::Failure("--labels requires the `balance` feature".into())
            })?
            .1;
        write_file(&lab_path.clone(), &write_labels(&balance_labels(balance)?)?)?;
    }
    Ok(())
}

/// Contiguous runs of the ternary balance value as labels:
/// `balanced`, `off_balance`, `airborne`.
fn balance_labels(
    series: &moma_core::features::FeatureSeries<f64>,
) -> Result<Vec<Label<f64>>, CliError> {
    let s = &series.series;
    let mut labels = Vec::new();
    let mut run_start = 0usize;
    let name_of = |v: f64| {
        if v == 1.0 {
            "balanced"
        } else if v == 0.0 {
            "off_balance"
        } else {
            "airborne"
        }
    };
    for i in 1..=s.len() {
        let boundary = i == s.len() || s.value(0, i)? != s.value(0, run_start)?;
        if boundary {
            labels.push(
                Label::new(
                    s.time_of_index(run_start)?,
                    s.time_of_index(i - 1)?,
                    name_of(s.value(0, run_start)?),
                )
                .map_err(CliError::from)?,
            );
            if i < s.len() {
                run_start = i;
            }
        }
    }
    Ok(labels)
}

fn cmd_template_build(
    defs_path: &Path,
    executions: &[PathBuf],
    output: &Path,
    tau_lo: f64,
    tau_hi: f64,
) -> Result<(), CliError> {
    if executions.is_empty() {
        return Err(CliError::Failure("at least one execution BVH required".into()));
    }
    let defs_text = read_file(defs_path)?;
    let mut matrices = Vec::with_capacity(executions.len());
    for path in executions {
        let (topology, pose) = load_bvh(path)?;
        let defs = parse_feature_defs(&defs_text, &topology)
            .map_err(|e| CliError::Failure(format!("{}: {e}", defs_path.display())))?;
        matrices.push(relational_features(pose.positions(), &defs)?);
    }
    let template = build_template(&matrices, tau_lo, tau_hi)?;
    write_file(output, &template.to_text())
}

fn cmd_template_match(
    template_path: &Path,
    target: &Path,
    defs_path: &Path,
    threshold: f64,
    output: &Path,
    merge_gap: usize,
    name: Option<String>,
) -> Result<(), CliError> {
    let template = MotionTemplate::<f64>::parse(&read_file(template_path)?)
        .map_err(|e| CliError::Failure(format!("{}: {e}", template_path.display())))?;
    let (topology, pose) = load_bvh(target)?;
    let defs = parse_feature_defs(&read_file(defs_path)?, &topology)
        .map_err(|e| CliError::Failure(format!("{}: {e}", defs_path.display())))?;
    let matrix = relational_features(pose.positions(), &defs)?;
    let curve = subsequence_distance(&template, &matrix)?;
    let spans = detect(&curve, threshold, merge_gap);
    let rate = pose
        .positions()
        .frame_rate()
        .ok_or_else(|| CliError::Failure("target has no fixed frame rate".into()))?;
    let label_name = name.unwrap_or_else(|| {
        template_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "match".into())
    });
    let labels = spans_to_labels(&spans, rate, 0.0, &label_name)?;
    write_file(output, &write_labels(&labels)?)
}

static STOP: AtomicBool = AtomicBool::new(false);

extern "C" fn on_interrupt(_: libc::c_int) {
    STOP.store(true, Ordering::Relaxed);
}

fn cmd_stream(config_path: &Path) -> Result<(), CliError> {
    let config = StreamConfig::load(config_path)?;
    let segments = match &config.segments_file {
        Some(rel) => {
            // Paths resolve relative to the config file.
            let base = config_path.parent().unwrap_or(Path::new("."));
            let path = base.join(rel);
            let text = read_file(&path)?;
            let topo = stream_naming_topology(&config)?;
            Some(
                SegmentModel::parse(&text, &topo)
                    .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let mut engine = StreamEngine::new(config, segments)?;
    unsafe {
        libc::signal(libc::SIGINT, on_interrupt as *const () as libc::sighandler_t);
        libc::signal(libc::SIGTERM, on_interrupt as *const () as libc::sighandler_t);
    }
    eprintln!("moma: listening on UDP port {}", engine.local_port());
    let stats = engine.run(&STOP, |s| {
        eprintln!(
            "moma: frames={} emitted={} dropped={} bad={}",
            s.frames, s.emitted, s.drops, s.bad_packets
        );
    })?;
    eprintln!(
        "moma: done; frames={} emitted={} dropped={} bad={}",
        stats.frames, stats.emitted, stats.drops, stats.bad_packets
    );
    Ok(())
}

fn stream_naming_topology(config: &StreamConfig) -> Result<SkeletonTopology<f64>, CliError> {
    let names = config.node_names.clone().ok_or_else(|| {
        CliError::Failure("segments_file requires node_names in the stream config".into())
    })?;
    let parents = (0..names.len())
        .map(|i| if i == 0 { None } else { Some(0) })
        .collect();
    let offsets = vec![moma_core::math::Vec3::zero(); names.len()];
    SkeletonTopology::new(names, parents, offsets).map_err(CliError::from)
}
