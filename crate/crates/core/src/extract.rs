//! Named feature registry: maps feature tokens such as `com` or
//! `weight_effort:0.5` onto the extractor pipeline. Both the offline CLI
//! path and the streaming engine evaluate features through this module, so
//! the two stay numerically identical.

use crate::error::{Error, Result};
use crate::features::accel::{AccelParams, AccelRig};
use crate::features::balance::{
    binary_balance, continuous_balance, global_com, BalanceConfig, SegmentModel,
};
use crate::features::effort::{
    covered_area, covered_distance, flow_effort, kinetic_energy, space_effort, time_effort,
    weight_effort, EffortWindow,
};
use crate::features::ergonomics::{postural_load, sphereness, DiscomfortTable};
use crate::features::{FeatureSeries, JointWeights};
use crate::kinematics::{acceleration, jerk_magnitude, jerk_vector, velocity, DerivativeTrack};
use crate::math::Axis;
use crate::num::Real;
use crate::skeleton::{PoseTrack, SkeletonTopology};
use crate::timed::TimedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Com,
    Balance,
    ContinuousBalance,
    KineticEnergy,
    WeightEffort,
    TimeEffort,
    SpaceEffort,
    FlowEffort,
    CoveredDistance,
    CoveredArea,
    Wei,
    Fluidity,
    Impulsivity,
    Sphereness,
    PosturalLoad,
}

impl FeatureKind {
    pub fn base_name(self) -> &'static str {
        match self {
            FeatureKind::Com => "com",
            FeatureKind::Balance => "balance",
            FeatureKind::ContinuousBalance => "continuous_balance",
            FeatureKind::KineticEnergy => "kinetic_energy",
            FeatureKind::WeightEffort => "weight_effort",
            FeatureKind::TimeEffort => "time_effort",
            FeatureKind::SpaceEffort => "space_effort",
            FeatureKind::FlowEffort => "flow_effort",
            FeatureKind::CoveredDistance => "covered_distance",
            FeatureKind::CoveredArea => "covered_area",
            FeatureKind::Wei => "wei",
            FeatureKind::Fluidity => "fluidity",
            FeatureKind::Impulsivity => "impulsivity",
            FeatureKind::Sphereness => "sphereness",
            FeatureKind::PosturalLoad => "postural_load",
        }
    }

    fn windowed(self) -> bool {
        matches!(
            self,
            FeatureKind::WeightEffort
                | FeatureKind::TimeEffort
                | FeatureKind::SpaceEffort
                | FeatureKind::FlowEffort
        )
    }

    /// Frames after the target frame a streaming evaluation must wait for
    /// (reach of the differentiation stencils).
    pub fn lookahead(self) -> usize {
        match self {
            FeatureKind::KineticEnergy
            | FeatureKind::WeightEffort
            | FeatureKind::TimeEffort
            | FeatureKind::Wei => 1,
            FeatureKind::FlowEffort | FeatureKind::Fluidity | FeatureKind::Impulsivity => 2,
            _ => 0,
        }
    }
}

const ALL_KINDS: [FeatureKind; 15] = [
    FeatureKind::Com,
    FeatureKind::Balance,
    FeatureKind::ContinuousBalance,
    FeatureKind::KineticEnergy,
    FeatureKind::WeightEffort,
    FeatureKind::TimeEffort,
    FeatureKind::SpaceEffort,
    FeatureKind::FlowEffort,
    FeatureKind::CoveredDistance,
    FeatureKind::CoveredArea,
    FeatureKind::Wei,
    FeatureKind::Fluidity,
    FeatureKind::Impulsivity,
    FeatureKind::Sphereness,
    FeatureKind::PosturalLoad,
];

/// One requested feature: kind plus optional window parameter (seconds),
/// written `name` or `name:seconds`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureRequest {
    pub kind: FeatureKind,
    pub window_seconds: Option<f64>,
}

impl FeatureRequest {
    pub fn parse(token: &str) -> Result<Self> {
        let (name, param) = match token.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (token, None),
        };
        let kind = ALL_KINDS
            .iter()
            .copied()
            .find(|k| k.base_name() == name)
            .ok_or_else(|| Error::UnknownFeature(token.to_string()))?;
        let window_seconds = match param {
            None => None,
            Some(p) => {
                let seconds: f64 = p
                    .parse()
                    .map_err(|_| Error::UnknownFeature(token.to_string()))?;
                if seconds.is_nan() || seconds <= 0.0 {
                    return Err(Error::UnknownFeature(token.to_string()));
                }
                Some(seconds)
            }
        };
        if window_seconds.is_some() && !kind.windowed() {
            return Err(Error::UnknownFeature(token.to_string()));
        }
        Ok(FeatureRequest {
            kind,
            window_seconds,
        })
    }

    /// Comma-separated request list.
    pub fn parse_list(tokens: &str) -> Result<Vec<FeatureRequest>> {
        tokens
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| FeatureRequest::parse(t.trim()))
            .collect()
    }

    pub fn window(&self) -> EffortWindow {
        EffortWindow {
            seconds: self.window_seconds.unwrap_or(0.5),
        }
    }

    /// Exported column name; windowed features carry the window in seconds.
    pub fn name(&self) -> String {
        if self.kind.windowed() {
            format!("{}_{}", self.kind.base_name(), self.window().seconds)
        } else {
            self.kind.base_name().to_string()
        }
    }

    /// Frames of history a ring buffer must retain for streaming evaluation
    /// to match offline extraction at the emitted frame.
    pub fn required_history<T: Real>(&self, frame_rate: T, accel: &AccelParams<T>) -> usize {
        let window = if self.kind.windowed() {
            self.window().frames(frame_rate)
        } else {
            0
        };
        let impulse = if self.kind == FeatureKind::Impulsivity {
            accel.impulse_lag
        } else {
            0
        };
        window + impulse + self.kind.lookahead() + 4
    }
}

/// Everything extraction may need beyond the positions themselves. Build
/// one per recording; optional members gate the features that use them.
pub struct ExtractContext<'a, T: Real> {
    pub topology: Option<&'a SkeletonTopology<T>>,
    pub segments: Option<&'a SegmentModel<T>>,
    pub discomfort: Option<&'a DiscomfortTable<T>>,
    /// Local rotations series (4 per node), required for postural load.
    pub rotations: Option<&'a TimedSeries<T>>,
    /// Aggregation weights; defaults to segment masses, then uniform.
    pub weights: Option<JointWeights<T>>,
    pub contact_candidates: Option<Vec<usize>>,
    pub end_effectors: Option<Vec<usize>>,
    pub balance: BalanceConfig<T>,
    /// Node tracked by covered distance/area and space effort.
    pub space_node: usize,
    pub accel: AccelParams<T>,
}

impl<'a, T: Real> ExtractContext<'a, T> {
    pub fn new(frame_rate: T) -> Self {
        ExtractContext {
            topology: None,
            segments: None,
            discomfort: None,
            rotations: None,
            weights: None,
            contact_candidates: None,
            end_effectors: None,
            balance: BalanceConfig::default(),
            space_node: 0,
            accel: AccelParams::for_rate(frame_rate),
        }
    }

    /// Context for a parsed pose track: pelvis-equivalent defaults (the
    /// root node) and contact candidates guessed from node names when not
    /// set explicitly.
    pub fn for_pose(pose: &'a PoseTrack<T>, topology: &'a SkeletonTopology<T>) -> Self {
        let rate = pose.positions().frame_rate().unwrap_or_else(T::one);
        let mut ctx = ExtractContext::new(rate);
        ctx.topology = Some(topology);
        ctx.rotations = Some(pose.rotations());
        ctx.space_node = topology.root();
        ctx
    }

    fn weights_for(&self, joint_count: usize) -> Result<JointWeights<T>> {
        if let Some(w) = &self.weights {
            w.require_len(joint_count)?;
            return Ok(w.clone());
        }
        if let Some(model) = self.segments {
            return model.joint_weights(joint_count);
        }
        JointWeights::uniform(joint_count)
    }

    fn segments_required(&self, what: &str) -> Result<&SegmentModel<T>> {
        self.segments
            .ok_or_else(|| Error::Config(format!("feature `{what}` requires a segment model")))
    }

    fn candidates_required(&self, what: &str) -> Result<&[usize]> {
        self.contact_candidates
            .as_deref()
            .ok_or_else(|| Error::Config(format!("feature `{what}` requires contact candidate nodes")))
    }
}

/// Contact candidates guessed from node names (feet, toes, ankles).
pub fn guess_contact_candidates<T: Real>(topology: &SkeletonTopology<T>) -> Vec<usize> {
    topology
        .names()
        .iter()
        .enumerate()
        .filter(|(_, name)| {
            let lower = name.to_lowercase();
            ["foot", "toe", "ankle"].iter().any(|p| lower.contains(p))
        })
        .map(|(i, _)| i)
        .collect()
}

/// End effectors guessed from node names (head, hands, feet extremities).
pub fn guess_end_effectors<T: Real>(topology: &SkeletonTopology<T>) -> Vec<usize> {
    let mut found = Vec::new();
    for pattern in ["head", "hand", "foot", "toe"] {
        for (i, name) in topology.names().iter().enumerate() {
            let lower = name.to_lowercase();
            if lower.contains(pattern) && !lower.ends_with("_end") && !found.contains(&i) {
                found.push(i);
            }
        }
    }
    found
}

fn scalar_series<T: Real>(positions: &TimedSeries<T>, values: Vec<T>) -> Result<TimedSeries<T>> {
    let rate = positions.frame_rate().ok_or(Error::NotFixedRate)?;
    let start = positions.time_of_index(0)?;
    let mut out = TimedSeries::offline_fixed_rate(1, rate, start)?;
    for v in values {
        out.push_frame(&[v], None)?;
    }
    Ok(out)
}

fn all_velocities<T: Real>(positions: &TimedSeries<T>) -> Result<Vec<DerivativeTrack<T>>> {
    (0..positions.dims() / 3)
        .map(|n| velocity(positions, n))
        .collect()
}

/// Extract one named feature from a positions series (dims = 3·nodes).
pub fn extract_feature<T: Real>(
    positions: &TimedSeries<T>,
    ctx: &ExtractContext<T>,
    request: &FeatureRequest,
) -> Result<FeatureSeries<T>> {
    if positions.is_empty() {
        return Err(Error::EmptySeries);
    }
    let node_count = positions.dims() / 3;
    let rate = positions.frame_rate().ok_or(Error::NotFixedRate)?;
    let window_frames = request.window().frames(rate);
    let name = request.name();
    let series = match request.kind {
        FeatureKind::Com => {
            let model = ctx.segments_required("com")?;
            let start = positions.time_of_index(0)?;
            let mut out = TimedSeries::offline_fixed_rate(3, rate, start)?;
            for i in 0..positions.len() {
                let frame = frame_positions(positions, i)?;
                let com = global_com(&frame, model)?;
                out.push_frame(&[com.x, com.y, com.z], None)?;
            }
            out
        }
        FeatureKind::Balance => {
            let model = ctx.segments_required("balance")?;
            let candidates = ctx.candidates_required("balance")?;
            let values = (0..positions.len())
                .map(|i| {
                    let frame = frame_positions(positions, i)?;
                    Ok(T::of(
                        binary_balance(&frame, model, candidates, &ctx.balance)? as f64,
                    ))
                })
                .collect::<Result<_>>()?;
            scalar_series(positions, values)?
        }
        FeatureKind::ContinuousBalance => {
            let model = ctx.segments_required("continuous_balance")?;
            let candidates = ctx.candidates_required("continuous_balance")?;
            let values = (0..positions.len())
                .map(|i| {
                    let frame = frame_positions(positions, i)?;
                    Ok(continuous_balance(&frame, model, candidates, &ctx.balance)?
                        .unwrap_or_else(T::nan))
                })
                .collect::<Result<_>>()?;
            scalar_series(positions, values)?
        }
        FeatureKind::KineticEnergy => {
            let velocities = all_velocities(positions)?;
            let weights = ctx.weights_for(node_count)?;
            kinetic_energy(&velocities, &weights)?.whole_body
        }
        FeatureKind::WeightEffort => {
            let velocities = all_velocities(positions)?;
            let weights = ctx.weights_for(node_count)?;
            let energy = kinetic_energy(&velocities, &weights)?.whole_body;
            weight_effort(&energy, window_frames)?
        }
        FeatureKind::TimeEffort => {
            let accels: Vec<DerivativeTrack<T>> = (0..node_count)
                .map(|n| acceleration(positions, n))
                .collect::<Result<_>>()?;
            let weights = ctx.weights_for(node_count)?;
            time_effort(&accels, &weights, window_frames)?.whole_body
        }
        FeatureKind::SpaceEffort => {
            let joints = vec![ctx.space_node];
            let weights = JointWeights::uniform(1)?;
            space_effort(positions, &joints, &weights, window_frames.max(2), T::of(1e-6))?
                .whole_body
        }
        FeatureKind::FlowEffort => {
            let magnitudes: Vec<DerivativeTrack<T>> = (0..node_count)
                .map(|n| jerk_vector(positions, n).and_then(|j| jerk_magnitude(&j)))
                .collect::<Result<_>>()?;
            let weights = ctx.weights_for(node_count)?;
            flow_effort(&magnitudes, &weights, window_frames)?.whole_body
        }
        FeatureKind::CoveredDistance => covered_distance(positions, ctx.space_node, ctx.balance.up)?,
        FeatureKind::CoveredArea => covered_area(positions, ctx.space_node, ctx.balance.up)?,
        FeatureKind::Wei => {
            let rig = AccelRig::new(all_velocities(positions)?, ctx.accel)?;
            let values = (0..positions.len())
                .map(|i| rig.wei(i))
                .collect::<Result<_>>()?;
            scalar_series(positions, values)?
        }
        FeatureKind::Fluidity => {
            let rig = AccelRig::new(all_velocities(positions)?, ctx.accel)?;
            let values = (0..positions.len())
                .map(|i| rig.fluidity_mean(i))
                .collect::<Result<_>>()?;
            scalar_series(positions, values)?
        }
        FeatureKind::Impulsivity => {
            let rig = AccelRig::new(all_velocities(positions)?, ctx.accel)?;
            let values = (0..positions.len())
                .map(|i| {
                    if i < ctx.accel.impulse_lag {
                        Ok(T::nan())
                    } else {
                        Ok(rig.impulsivity_mean(i)?.unwrap_or_else(T::nan))
                    }
                })
                .collect::<Result<_>>()?;
            scalar_series(positions, values)?
        }
        FeatureKind::Sphereness => {
            let model = ctx.segments_required("sphereness")?;
            let effectors = ctx
                .end_effectors
                .as_deref()
                .ok_or_else(|| Error::Config("feature `sphereness` requires end effectors".into()))?;
            let start = positions.time_of_index(0)?;
            let mut out = TimedSeries::offline_fixed_rate(2, rate, start)?;
            for i in 0..positions.len() {
                let frame = frame_positions(positions, i)?;
                let com = global_com(&frame, model)?;
                let s = sphereness(&frame, effectors, com)?;
                out.push_frame(&[s.radius, s.deviation], None)?;
            }
            out
        }
        FeatureKind::PosturalLoad => {
            let table = ctx
                .discomfort
                .ok_or_else(|| Error::Config("feature `postural_load` requires a discomfort table".into()))?;
            let topology = ctx
                .topology
                .ok_or_else(|| Error::Config("feature `postural_load` requires a topology".into()))?;
            let rotations = ctx
                .rotations
                .ok_or_else(|| Error::Config("feature `postural_load` requires rotations".into()))?;
            let values = (0..positions.len())
                .map(|i| {
                    let quats = frame_rotations(rotations, i)?;
                    postural_load(&quats, topology, table)
                })
                .collect::<Result<_>>()?;
            scalar_series(positions, values)?
        }
    };
    Ok(FeatureSeries { name, series })
}

pub fn extract_features<T: Real>(
    positions: &TimedSeries<T>,
    ctx: &ExtractContext<T>,
    requests: &[FeatureRequest],
) -> Result<Vec<FeatureSeries<T>>> {
    requests
        .iter()
        .map(|r| extract_feature(positions, ctx, r))
        .collect()
}

fn frame_positions<T: Real>(
    positions: &TimedSeries<T>,
    frame: usize,
) -> Result<Vec<crate::math::Vec3<T>>> {
    (0..positions.dims() / 3)
        .map(|n| node_position_checked(positions, n, frame))
        .collect()
}

fn node_position_checked<T: Real>(
    positions: &TimedSeries<T>,
    node: usize,
    frame: usize,
) -> Result<crate::math::Vec3<T>> {
    crate::kinematics::node_position(positions, node, frame)
}

fn frame_rotations<T: Real>(rotations: &TimedSeries<T>, frame: usize) -> Result<Vec<crate::math::Quat<T>>> {
    let f = rotations.frame(frame)?;
    Ok((0..rotations.dims() / 4)
        .map(|n| crate::math::Quat::new(f[4 * n], f[4 * n + 1], f[4 * n + 2], f[4 * n + 3]))
        .collect())
}

/// Default up axis for parsed BVH data. BVH files are conventionally Y-up;
/// the engine default elsewhere is Z-up.
pub fn default_up_axis() -> Axis {
    Axis::Z
}
