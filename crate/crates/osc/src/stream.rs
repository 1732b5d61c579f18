//! Real-time streaming: decode `/moma/in/frame` datagrams into a ring
//! track, evaluate enabled features per frame, and emit one OSC message per
//! feature at `/moma/out/<name>`.
//!
//! Two roles share a bounded hand-off queue: the receiver (socket read +
//! decode) and the processor (ring push + feature compute + emit). When the
//! queue is full the oldest unprocessed frame is dropped and counted: live
//! freshness beats completeness. The processor is the only writer of the
//! ring track.

use std::collections::VecDeque;
use std::net::UdpSocket;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use moma_core::error::Error as CoreError;
use moma_core::extract::{extract_feature, ExtractContext, FeatureKind, FeatureRequest};
use moma_core::features::accel::AccelParams;
use moma_core::features::balance::{
    binary_balance, continuous_balance, global_com, BalanceConfig, SegmentModel,
};
use moma_core::features::effort::TraceHull;
use moma_core::features::ergonomics::sphereness;
use moma_core::geometry::{project_point, GroundPoint};
use moma_core::math::{Axis, Vec3};
use moma_core::skeleton::SkeletonTopology;
use moma_core::timed::TimedSeries;

use crate::wire::{decode, encode, OscArg, OscMessage, WireError};

pub const FRAME_ADDRESS: &str = "/moma/in/frame";
pub const OUT_PREFIX: &str = "/moma/out/";
pub const STATS_ADDRESS: &str = "/moma/out/_stats";

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("frame message: {0}")]
    Frame(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamTimeModel {
    Fixed,
    Stamped,
}

/// Streaming configuration, parsed from plain `key value` lines.
#[derive(Clone, Debug)]
pub struct StreamConfig {
    pub listen_port: u16,
    pub emit_host: String,
    pub emit_port: u16,
    pub nodes: usize,
    pub ring_capacity: usize,
    pub frame_rate: f64,
    pub time_model: StreamTimeModel,
    pub features: Vec<FeatureRequest>,
    pub up: Axis,
    pub space_node: usize,
    pub node_names: Option<Vec<String>>,
    pub segments_file: Option<String>,
    pub contact_nodes: Vec<String>,
    pub end_effectors: Vec<String>,
    /// Emit every n-th frame; 0 or 1 emits every frame.
    pub emit_rate: usize,
}

impl StreamConfig {
    pub fn parse(text: &str) -> Result<Self, StreamError> {
        let mut listen_port = None;
        let mut emit_host = "127.0.0.1".to_string();
        let mut emit_port = None;
        let mut nodes = None;
        let mut ring_capacity = 256usize;
        let mut frame_rate = 100.0f64;
        let mut time_model = StreamTimeModel::Fixed;
        let mut features = Vec::new();
        let mut up = Axis::Z;
        let mut space_node = 0usize;
        let mut node_names: Option<Vec<String>> = None;
        let mut segments_file = None;
        let mut contact_nodes = Vec::new();
        let mut end_effectors = Vec::new();
        let mut emit_rate = 0usize;

        let bad = |line: usize, msg: String| StreamError::Config(format!("line {line}: {msg}"));
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad(line_no, format!("expected `key value`, found `{line}`")))?;
            let value = value.trim();
            let parse_num = |what: &str| -> Result<f64, StreamError> {
                value
                    .parse::<f64>()
                    .map_err(|_| bad(line_no, format!("bad {what} `{value}`")))
            };
            match key {
                "listen_port" => listen_port = Some(parse_num("port")? as u16),
                "emit_host" => emit_host = value.to_string(),
                "emit_port" => emit_port = Some(parse_num("port")? as u16),
                "nodes" => nodes = Some(parse_num("node count")? as usize),
                "ring_capacity" => ring_capacity = parse_num("capacity")? as usize,
                "frame_rate" => frame_rate = parse_num("frame rate")?,
                "time_model" => {
                    time_model = match value {
                        "fixed" => StreamTimeModel::Fixed,
                        "stamped" => StreamTimeModel::Stamped,
                        other => return Err(bad(line_no, format!("unknown time model `{other}`"))),
                    }
                }
                "feature" => features.push(
                    FeatureRequest::parse(value)
                        .map_err(|e| bad(line_no, e.to_string()))?,
                ),
                "up_axis" => {
                    up = Axis::parse(value).map_err(|e| bad(line_no, e.to_string()))?
                }
                "space_node" => space_node = parse_num("node index")? as usize,
                "node_names" => {
                    node_names = Some(value.split_whitespace().map(str::to_string).collect())
                }
                "segments_file" => segments_file = Some(value.to_string()),
                "contact_nodes" => {
                    contact_nodes = value.split_whitespace().map(str::to_string).collect()
                }
                "end_effectors" => {
                    end_effectors = value.split_whitespace().map(str::to_string).collect()
                }
                "emit_rate" => emit_rate = parse_num("emit rate")? as usize,
                other => return Err(bad(line_no, format!("unknown key `{other}`"))),
            }
        }
        Ok(StreamConfig {
            listen_port: listen_port.ok_or_else(|| StreamError::Config("missing listen_port".into()))?,
            emit_host,
            emit_port: emit_port.ok_or_else(|| StreamError::Config("missing emit_port".into()))?,
            nodes: nodes.ok_or_else(|| StreamError::Config("missing nodes".into()))?,
            ring_capacity,
            frame_rate,
            time_model,
            features,
            up,
            space_node,
            node_names,
            segments_file,
            contact_nodes,
            end_effectors,
            emit_rate,
        })
    }

    pub fn load(path: &Path) -> Result<Self, StreamError> {
        StreamConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// A name-lookup-only topology over the configured node names.
    fn naming_topology(&self) -> Result<SkeletonTopology<f64>, StreamError> {
        let names = self
            .node_names
            .clone()
            .ok_or_else(|| StreamError::Config("node_names required for named lookups".into()))?;
        if names.len() != self.nodes {
            return Err(StreamError::Config(format!(
                "node_names lists {} names for {} nodes",
                names.len(),
                self.nodes
            )));
        }
        let parents = (0..names.len()).map(|i| if i == 0 { None } else { Some(0) }).collect();
        let offsets = vec![Vec3::zero(); names.len()];
        SkeletonTopology::new(names, parents, offsets).map_err(StreamError::Core)
    }
}

/// One outbound feature sample.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSample {
    pub name: String,
    pub time: f64,
    pub values: Vec<f32>,
}

impl FeatureSample {
    pub fn message(&self) -> OscMessage {
        let mut args = vec![OscArg::Double(self.time)];
        args.extend(self.values.iter().map(|v| OscArg::Float(*v)));
        OscMessage::new(format!("{OUT_PREFIX}{}", self.name), args)
    }
}

/// Build the inbound frame message: one f64 timestamp then x, y, z per node.
pub fn frame_message(time: f64, coords: &[f32]) -> OscMessage {
    let mut args = vec![OscArg::Double(time)];
    args.extend(coords.iter().map(|c| OscArg::Float(*c)));
    OscMessage::new(FRAME_ADDRESS, args)
}

/// Validate and unpack a frame message for `nodes` skeleton nodes.
pub fn parse_frame(message: &OscMessage, nodes: usize) -> Result<(f64, Vec<f32>), StreamError> {
    if message.address != FRAME_ADDRESS {
        return Err(StreamError::Frame(format!(
            "unexpected address `{}`",
            message.address
        )));
    }
    let expect = 1 + 3 * nodes;
    if message.args.len() != expect {
        return Err(StreamError::Frame(format!(
            "expected {expect} arguments (1 timestamp + 3x{nodes} floats), found {}",
            message.args.len()
        )));
    }
    let time = match &message.args[0] {
        OscArg::Double(t) => *t,
        other => {
            return Err(StreamError::Frame(format!(
                "timestamp must be a 64-bit float, found {other:?}"
            )))
        }
    };
    let mut coords = Vec::with_capacity(3 * nodes);
    for arg in &message.args[1..] {
        match arg {
            OscArg::Float(v) => coords.push(*v),
            other => {
                return Err(StreamError::Frame(format!(
                    "coordinates must be 32-bit floats, found {other:?}"
                )))
            }
        }
    }
    Ok((time, coords))
}

/// Push one decoded frame into a ring track. Under a stamped model the
/// timestamp drives the time base; under fixed rate it is ignored.
pub fn ingest_frame(
    ring: &mut TimedSeries<f64>,
    time: f64,
    coords: &[f32],
) -> Result<(), StreamError> {
    let column: Vec<f64> = coords.iter().map(|c| *c as f64).collect();
    let stamp = ring.frame_rate().is_none().then_some(time);
    ring.push_frame(&column, stamp)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StreamStats {
    pub frames: u64,
    pub drops: u64,
    pub emitted: u64,
    pub bad_packets: u64,
}

pub fn stats_message(stats: &StreamStats) -> OscMessage {
    OscMessage::new(
        STATS_ADDRESS,
        vec![
            OscArg::Int(stats.drops as i32),
            OscArg::Int(stats.frames as i32),
        ],
    )
}

enum Evaluator {
    /// Evaluated through the offline registry over the materialized ring,
    /// `lookahead` frames behind the newest frame.
    Registry { request: FeatureRequest },
    /// Cumulative path length; survives ring eviction.
    CoveredDistance {
        prev: Option<GroundPoint<f64>>,
        total: f64,
    },
    /// Cumulative trace hull; survives ring eviction.
    CoveredArea { trace: TraceHull<f64> },
    /// Direct per-frame evaluation (stamped time model).
    PerFrame { request: FeatureRequest },
}

/// Socket-free streaming core: ring track, models, feature evaluators.
pub struct StreamProcessor {
    config: StreamConfig,
    segments: Option<SegmentModel<f64>>,
    contact_indices: Option<Vec<usize>>,
    effector_indices: Option<Vec<usize>>,
    ring: Option<TimedSeries<f64>>,
    evaluators: Vec<(String, Evaluator)>,
    accel: AccelParams<f64>,
    frames_seen: u64,
}

impl StreamProcessor {
    pub fn new(
        config: StreamConfig,
        segments: Option<SegmentModel<f64>>,
    ) -> Result<Self, StreamError> {
        if config.nodes == 0 {
            return Err(StreamError::Config("node count must be positive".into()));
        }
        if config.features.is_empty() {
            return Err(StreamError::Config("no features enabled".into()));
        }
        if config.space_node >= config.nodes {
            return Err(StreamError::Config(format!(
                "space_node {} out of range ({} nodes)",
                config.space_node, config.nodes
            )));
        }
        let accel = AccelParams::for_rate(config.frame_rate);
        let needs_segments = |k: FeatureKind| {
            matches!(
                k,
                FeatureKind::Com
                    | FeatureKind::Balance
                    | FeatureKind::ContinuousBalance
                    | FeatureKind::Sphereness
            )
        };

        let lookup = |names: &[String]| -> Result<Vec<usize>, StreamError> {
            let topo = config.naming_topology()?;
            names
                .iter()
                .map(|n| topo.require(n).map_err(StreamError::Core))
                .collect()
        };
        let contact_indices = if config.contact_nodes.is_empty() {
            None
        } else {
            Some(lookup(&config.contact_nodes)?)
        };
        let effector_indices = if config.end_effectors.is_empty() {
            None
        } else {
            Some(lookup(&config.end_effectors)?)
        };

        let mut evaluators = Vec::new();
        for request in &config.features {
            let kind = request.kind;
            if kind == FeatureKind::PosturalLoad {
                return Err(StreamError::Config(
                    "postural_load needs joint rotations, which the frame stream does not carry"
                        .into(),
                ));
            }
            if needs_segments(kind) && segments.is_none() {
                return Err(StreamError::Config(format!(
                    "feature `{}` requires segments_file",
                    request.name()
                )));
            }
            if matches!(kind, FeatureKind::Balance | FeatureKind::ContinuousBalance)
                && contact_indices.is_none()
            {
                return Err(StreamError::Config(format!(
                    "feature `{}` requires contact_nodes",
                    request.name()
                )));
            }
            if kind == FeatureKind::Sphereness && effector_indices.is_none() {
                return Err(StreamError::Config(format!(
                    "feature `{}` requires end_effectors",
                    request.name()
                )));
            }
            let evaluator = match kind {
                FeatureKind::CoveredDistance => Evaluator::CoveredDistance {
                    prev: None,
                    total: 0.0,
                },
                FeatureKind::CoveredArea => Evaluator::CoveredArea {
                    trace: TraceHull::new(),
                },
                _ => match config.time_model {
                    StreamTimeModel::Fixed => {
                        let needed = request.required_history(config.frame_rate, &accel);
                        if config.ring_capacity < needed {
                            return Err(StreamError::Config(format!(
                                "ring_capacity {} too small for `{}` (needs at least {needed})",
                                config.ring_capacity,
                                request.name()
                            )));
                        }
                        Evaluator::Registry { request: *request }
                    }
                    StreamTimeModel::Stamped => {
                        if !matches!(
                            kind,
                            FeatureKind::Com
                                | FeatureKind::Balance
                                | FeatureKind::ContinuousBalance
                                | FeatureKind::Sphereness
                        ) {
                            return Err(StreamError::Config(format!(
                                "feature `{}` needs a fixed frame rate (set `time_model fixed`)",
                                request.name()
                            )));
                        }
                        Evaluator::PerFrame { request: *request }
                    }
                },
            };
            evaluators.push((request.name(), evaluator));
        }
        Ok(StreamProcessor {
            config,
            segments,
            contact_indices,
            effector_indices,
            ring: None,
            evaluators,
            accel,
            frames_seen: 0,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    fn ensure_ring(&mut self, first_time: f64) -> Result<&mut TimedSeries<f64>, StreamError> {
        if self.ring.is_none() {
            let dims = 3 * self.config.nodes;
            let ring = match self.config.time_model {
                StreamTimeModel::Fixed => TimedSeries::ring_fixed_rate(
                    dims,
                    self.config.ring_capacity,
                    self.config.frame_rate,
                    first_time,
                )?,
                StreamTimeModel::Stamped => {
                    TimedSeries::ring_stamped(dims, self.config.ring_capacity)?
                }
            };
            self.ring = Some(ring);
        }
        Ok(self.ring.as_mut().expect("just inserted"))
    }

    fn context<'a>(&'a self) -> ExtractContext<'a, f64> {
        let mut ctx = ExtractContext::new(self.config.frame_rate);
        ctx.segments = self.segments.as_ref();
        ctx.contact_candidates = self.contact_indices.clone();
        ctx.end_effectors = self.effector_indices.clone();
        ctx.balance = BalanceConfig {
            up: self.config.up,
            ..BalanceConfig::default()
        };
        ctx.space_node = self.config.space_node;
        ctx.accel = self.accel;
        ctx
    }

    fn newest_positions(ring: &TimedSeries<f64>) -> Vec<Vec3<f64>> {
        let frame = ring.frame(ring.len() - 1).expect("non-empty");
        frame
            .chunks_exact(3)
            .map(|c| Vec3::new(c[0], c[1], c[2]))
            .collect()
    }

    /// Ingest one frame and produce the feature samples it finalizes.
    pub fn push(&mut self, time: f64, coords: &[f32]) -> Result<Vec<FeatureSample>, StreamError> {
        if coords.len() != 3 * self.config.nodes {
            return Err(StreamError::Frame(format!(
                "expected {} coordinates, found {}",
                3 * self.config.nodes,
                coords.len()
            )));
        }
        self.ensure_ring(time)?;
        let ring = self.ring.as_mut().expect("ring exists");
        ingest_frame(ring, time, coords)?;
        self.frames_seen += 1;

        let emit_every = self.config.emit_rate.max(1) as u64;
        if !self.frames_seen.is_multiple_of(emit_every) {
            return Ok(Vec::new());
        }

        let ring = self.ring.as_ref().expect("ring exists");
        let newest_time = match self.config.time_model {
            StreamTimeModel::Fixed => ring.time_of_index(ring.len() - 1)?,
            StreamTimeModel::Stamped => time,
        };
        let newest = Self::newest_positions(ring);
        let needs_prefix = self
            .evaluators
            .iter()
            .any(|(_, e)| matches!(e, Evaluator::Registry { .. }));
        let prefix = needs_prefix.then(|| ring.to_offline());

        let mut samples = Vec::new();
        let ctx = self.context();
        let mut pending: Vec<(usize, FeatureSample)> = Vec::new();
        for (index, (name, evaluator)) in self.evaluators.iter().enumerate() {
            match evaluator {
                Evaluator::Registry { request } => {
                    let prefix = prefix.as_ref().expect("materialized above");
                    let lag = request.kind.lookahead();
                    if prefix.len() <= lag {
                        continue;
                    }
                    let target = prefix.len() - 1 - lag;
                    let series = match extract_feature(prefix, &ctx, request) {
                        Ok(s) => s,
                        // Not enough frames buffered yet: stay quiet.
                        Err(CoreError::TooFewFrames { .. }) | Err(CoreError::EmptySeries) => {
                            continue
                        }
                        Err(e) => return Err(e.into()),
                    };
                    let values: Vec<f32> = (0..series.series.dims())
                        .map(|d| series.series.value(d, target).map(|v| v as f32))
                        .collect::<Result<_, _>>()?;
                    if values.iter().any(|v| v.is_nan()) {
                        continue;
                    }
                    pending.push((
                        index,
                        FeatureSample {
                            name: name.clone(),
                            time: prefix.time_of_index(target)?,
                            values,
                        },
                    ));
                }
                Evaluator::PerFrame { request } => {
                    let value = self.per_frame_value(request, &newest)?;
                    let Some(values) = value else { continue };
                    pending.push((
                        index,
                        FeatureSample {
                            name: name.clone(),
                            time: newest_time,
                            values,
                        },
                    ));
                }
                Evaluator::CoveredDistance { .. } | Evaluator::CoveredArea { .. } => {}
            }
        }
        // Cumulative evaluators mutate their state per frame.
        let space = project_point(newest[self.config.space_node], self.config.up);
        for (name, evaluator) in self.evaluators.iter_mut() {
            match evaluator {
                Evaluator::CoveredDistance { prev, total } => {
                    if let Some(p) = prev {
                        *total += space.distance(*p);
                    }
                    *prev = Some(space);
                    samples.push(FeatureSample {
                        name: name.clone(),
                        time: newest_time,
                        values: vec![*total as f32],
                    });
                }
                Evaluator::CoveredArea { trace } => {
                    let area = trace.push(space);
                    samples.push(FeatureSample {
                        name: name.clone(),
                        time: newest_time,
                        values: vec![area as f32],
                    });
                }
                _ => {}
            }
        }
        samples.extend(pending.into_iter().map(|(_, s)| s));
        Ok(samples)
    }

    fn per_frame_value(
        &self,
        request: &FeatureRequest,
        positions: &[Vec3<f64>],
    ) -> Result<Option<Vec<f32>>, StreamError> {
        let balance_cfg = BalanceConfig {
            up: self.config.up,
            ..BalanceConfig::default()
        };
        let model = self.segments.as_ref();
        Ok(match request.kind {
            FeatureKind::Com => {
                let com = global_com(positions, model.expect("validated"))?;
                Some(vec![com.x as f32, com.y as f32, com.z as f32])
            }
            FeatureKind::Balance => {
                let v = binary_balance(
                    positions,
                    model.expect("validated"),
                    self.contact_indices.as_ref().expect("validated"),
                    &balance_cfg,
                )?;
                Some(vec![v as f32])
            }
            FeatureKind::ContinuousBalance => continuous_balance(
                positions,
                model.expect("validated"),
                self.contact_indices.as_ref().expect("validated"),
                &balance_cfg,
            )?
            .map(|v| vec![v as f32]),
            FeatureKind::Sphereness => {
                let com = global_com(positions, model.expect("validated"))?;
                let s = sphereness(
                    positions,
                    self.effector_indices.as_ref().expect("validated"),
                    com,
                )?;
                Some(vec![s.radius as f32, s.deviation as f32])
            }
            _ => None,
        })
    }
}

/// Bounded hand-off between the receiver and the processor.
struct Handoff {
    queue: Mutex<HandoffState>,
    available: Condvar,
    capacity: usize,
}

struct HandoffState {
    frames: VecDeque<(f64, Vec<f32>)>,
    drops: u64,
    bad_packets: u64,
    receiver_done: bool,
}

impl Handoff {
    fn new(capacity: usize) -> Self {
        Handoff {
            queue: Mutex::new(HandoffState {
                frames: VecDeque::new(),
                drops: 0,
                bad_packets: 0,
                receiver_done: false,
            }),
            available: Condvar::new(),
            capacity,
        }
    }

    fn push(&self, frame: (f64, Vec<f32>)) {
        let mut state = self.queue.lock().expect("handoff poisoned");
        if state.frames.len() == self.capacity {
            state.frames.pop_front();
            state.drops += 1;
        }
        state.frames.push_back(frame);
        drop(state);
        self.available.notify_one();
    }

    fn bad_packet(&self) {
        self.queue.lock().expect("handoff poisoned").bad_packets += 1;
    }

    fn finish(&self) {
        self.queue.lock().expect("handoff poisoned").receiver_done = true;
        self.available.notify_one();
    }

    fn pop(&self, timeout: Duration) -> (Option<(f64, Vec<f32>)>, bool) {
        let state = self.queue.lock().expect("handoff poisoned");
        let (mut state, _) = self
            .available
            .wait_timeout_while(state, timeout, |s| {
                s.frames.is_empty() && !s.receiver_done
            })
            .expect("handoff poisoned");
        (state.frames.pop_front(), state.receiver_done)
    }

    fn counters(&self) -> (u64, u64) {
        let state = self.queue.lock().expect("handoff poisoned");
        (state.drops, state.bad_packets)
    }
}

/// UDP front door around a [`StreamProcessor`].
pub struct StreamEngine {
    socket: UdpSocket,
    sink: UdpSocket,
    emit_addr: String,
    processor: StreamProcessor,
    handoff_capacity: usize,
}

impl StreamEngine {
    pub fn new(
        config: StreamConfig,
        segments: Option<SegmentModel<f64>>,
    ) -> Result<Self, StreamError> {
        let socket = UdpSocket::bind(("0.0.0.0", config.listen_port))?;
        socket.set_read_timeout(Some(Duration::from_millis(20)))?;
        let sink = UdpSocket::bind(("0.0.0.0", 0))?;
        let emit_addr = format!("{}:{}", config.emit_host, config.emit_port);
        let processor = StreamProcessor::new(config, segments)?;
        Ok(StreamEngine {
            socket,
            sink,
            emit_addr,
            processor,
            handoff_capacity: 64,
        })
    }

    /// The actually bound listen port (useful with `listen_port 0`).
    pub fn local_port(&self) -> u16 {
        self.socket.local_addr().map(|a| a.port()).unwrap_or(0)
    }

    /// Receive, process and emit until `stop` is raised and the queue is
    /// drained. `on_stats` fires roughly once per second and once at
    /// shutdown, right after the `_stats` message is emitted.
    pub fn run(
        &mut self,
        stop: &AtomicBool,
        mut on_stats: impl FnMut(&StreamStats),
    ) -> Result<StreamStats, StreamError> {
        let handoff = Handoff::new(self.handoff_capacity);
        let nodes = self.processor.config().nodes;
        let mut stats = StreamStats::default();
        let socket = &self.socket;
        let sink = &self.sink;
        let emit_addr = self.emit_addr.clone();
        let processor = &mut self.processor;

        // Raised on processor failure so the receiver thread unblocks and
        // the scope can join it before the error propagates.
        let abort = AtomicBool::new(false);
        std::thread::scope(|scope| -> Result<(), StreamError> {
            let receiver_handoff = &handoff;
            let abort = &abort;
            scope.spawn(move || {
                let mut buf = [0u8; 65536];
                loop {
                    if stop.load(Ordering::Relaxed) || abort.load(Ordering::Relaxed) {
                        break;
                    }
                    match socket.recv_from(&mut buf) {
                        Ok((len, _)) => match decode(&buf[..len]) {
                            Ok(message) if message.address == FRAME_ADDRESS => {
                                match parse_frame(&message, nodes) {
                                    Ok(frame) => receiver_handoff.push(frame),
                                    Err(_) => receiver_handoff.bad_packet(),
                                }
                            }
                            // Other addresses are not ours to consume.
                            Ok(_) => {}
                            Err(_) => receiver_handoff.bad_packet(),
                        },
                        Err(ref e)
                            if e.kind() == std::io::ErrorKind::WouldBlock
                                || e.kind() == std::io::ErrorKind::TimedOut => {}
                        Err(_) => break,
                    }
                }
                receiver_handoff.finish();
            });

            let mut process = || -> Result<(), StreamError> {
                let mut last_stats = Instant::now();
                loop {
                    let (frame, receiver_done) = handoff.pop(Duration::from_millis(20));
                    if let Some((time, coords)) = frame {
                        stats.frames += 1;
                        let samples = processor.push(time, &coords)?;
                        for sample in samples {
                            let bytes = encode(&sample.message())?;
                            // Unreachable sinks are reported, never fatal.
                            if sink.send_to(&bytes, &emit_addr).is_ok() {
                                stats.emitted += 1;
                            }
                        }
                    }
                    let idle = last_stats.elapsed() >= Duration::from_secs(1);
                    let finished = receiver_done
                        && handoff.queue.lock().expect("handoff poisoned").frames.is_empty();
                    if idle || finished {
                        let (drops, bad) = handoff.counters();
                        stats.drops = drops;
                        stats.bad_packets = bad;
                        let bytes = encode(&stats_message(&stats))?;
                        let _ = sink.send_to(&bytes, &emit_addr);
                        on_stats(&stats);
                        last_stats = Instant::now();
                    }
                    if finished {
                        return Ok(());
                    }
                }
            };
            let result = process();
            abort.store(true, Ordering::Relaxed);
            result
        })?;
        let (drops, bad) = handoff.counters();
        stats.drops = drops;
        stats.bad_packets = bad;
        Ok(stats)
    }
}
