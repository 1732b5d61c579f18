//! Gesture recognition: relational binary features, motion templates
//! averaged over DTW-aligned executions, and threshold detection on a
//! subsequence-DTW distance curve.

use crate::error::{Error, Result};
use crate::io::lab::Label;
use crate::kinematics::{node_position, velocity};
use crate::num::Real;
use crate::skeleton::SkeletonTopology;
use crate::timed::TimedSeries;

/// Hysteresis pair. With equal thresholds this is plain thresholding;
/// otherwise the state flips only when the opposing threshold is crossed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hysteresis<T> {
    pub on: T,
    pub off: T,
}

impl<T: Real> Hysteresis<T> {
    pub fn sharp(threshold: T) -> Self {
        Hysteresis {
            on: threshold,
            off: threshold,
        }
    }
}

/// Relational predicate families between skeleton nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationalKind {
    /// Signed distance of `target` to the plane through `origin` whose
    /// normal points from `normal_a` to `normal_b`; active above threshold.
    PlaneSide {
        normal_a: usize,
        normal_b: usize,
        origin: usize,
        target: usize,
    },
    /// Euclidean distance between two nodes; active below threshold.
    DistanceBelow { a: usize, b: usize },
    /// Angle at `vertex` between its rays to `a` and `c`, degrees; active
    /// below threshold.
    AngleBelow { a: usize, vertex: usize, c: usize },
    /// Speed of a node in m/s; active above threshold.
    SpeedAbove { node: usize },
}

impl RelationalKind {
    fn nodes(&self) -> Vec<usize> {
        match *self {
            RelationalKind::PlaneSide {
                normal_a,
                normal_b,
                origin,
                target,
            } => vec![normal_a, normal_b, origin, target],
            RelationalKind::DistanceBelow { a, b } => vec![a, b],
            RelationalKind::AngleBelow { a, vertex, c } => vec![a, vertex, c],
            RelationalKind::SpeedAbove { node } => vec![node],
        }
    }

    /// Whether the predicate activates when the measure rises above the
    /// threshold (as opposed to dropping below it).
    fn active_above(&self) -> bool {
        matches!(
            self,
            RelationalKind::PlaneSide { .. } | RelationalKind::SpeedAbove { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelationalFeatureDef<T> {
    pub kind: RelationalKind,
    pub thresholds: Hysteresis<T>,
}

impl<T: Real> RelationalFeatureDef<T> {
    pub fn validate(&self, node_count: usize) -> Result<()> {
        for n in self.kind.nodes() {
            if n >= node_count {
                return Err(Error::NodeOutOfRange {
                    index: n,
                    count: node_count,
                });
            }
        }
        let ok = if self.kind.active_above() {
            self.thresholds.on >= self.thresholds.off
        } else {
            self.thresholds.on <= self.thresholds.off
        };
        if !ok {
            return Err(Error::Config(format!(
                "hysteresis thresholds ({}, {}) do not bracket the active side",
                self.thresholds.on, self.thresholds.off
            )));
        }
        Ok(())
    }
}

/// Binary features-by-frames matrix (frame-major storage).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    features: usize,
    frames: usize,
    data: Vec<u8>,
}

impl FeatureMatrix {
    pub fn zeros(features: usize, frames: usize) -> Self {
        FeatureMatrix {
            features,
            frames,
            data: vec![0; features * frames],
        }
    }

    /// Build from per-feature rows of 0/1 values.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let features = rows.len();
        let frames = rows.first().map(Vec::len).unwrap_or(0);
        let mut m = FeatureMatrix::zeros(features, frames);
        for (f, row) in rows.iter().enumerate() {
            if row.len() != frames {
                return Err(Error::FrameCountMismatch {
                    a: frames,
                    b: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m.set(f, j, *v != 0);
            }
        }
        Ok(m)
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn get(&self, feature: usize, frame: usize) -> u8 {
        self.data[frame * self.features + feature]
    }

    pub fn set(&mut self, feature: usize, frame: usize, value: bool) {
        self.data[frame * self.features + feature] = value as u8;
    }

    /// All feature values of one frame.
    pub fn column(&self, frame: usize) -> &[u8] {
        &self.data[frame * self.features..(frame + 1) * self.features]
    }
}

/// Evaluate relational features over a positions track (dims = 3·nodes).
/// Speed predicates require a fixed-rate track with at least 3 frames.
pub fn relational_features<T: Real>(
    positions: &TimedSeries<T>,
    defs: &[RelationalFeatureDef<T>],
) -> Result<FeatureMatrix> {
    let node_count = positions.dims() / 3;
    for def in defs {
        def.validate(node_count)?;
    }
    let frames = positions.len();
    let needs_speed = defs
        .iter()
        .any(|d| matches!(d.kind, RelationalKind::SpeedAbove { .. }));
    let speeds: Vec<Vec<T>> = if needs_speed {
        let mut per_node = vec![Vec::new(); node_count];
        for (node, slot) in per_node.iter_mut().enumerate() {
            if defs.iter().any(|d| matches!(d.kind, RelationalKind::SpeedAbove { node: n } if n == node)) {
                let v = velocity(positions, node)?;
                *slot = (0..frames)
                    .map(|i| v.vec3(i).map(|x| x.norm()))
                    .collect::<Result<_>>()?;
            }
        }
        per_node
    } else {
        Vec::new()
    };

    let mut matrix = FeatureMatrix::zeros(defs.len(), frames);
    for (f, def) in defs.iter().enumerate() {
        let mut state: Option<bool> = None;
        #[allow(clippy::needless_range_loop)] // j also drives position lookups
        for j in 0..frames {
            let measure = match def.kind {
                RelationalKind::PlaneSide {
                    normal_a,
                    normal_b,
                    origin,
                    target,
                } => {
                    let n = node_position(positions, normal_b, j)?
                        - node_position(positions, normal_a, j)?;
                    let len = n.norm();
                    if len == T::zero() {
                        T::zero()
                    } else {
                        (node_position(positions, target, j)?
                            - node_position(positions, origin, j)?)
                        .dot(n.scale(T::one() / len))
                    }
                }
                RelationalKind::DistanceBelow { a, b } => {
                    (node_position(positions, a, j)? - node_position(positions, b, j)?).norm()
                }
                RelationalKind::AngleBelow { a, vertex, c } => {
                    let u = node_position(positions, a, j)? - node_position(positions, vertex, j)?;
                    let v = node_position(positions, c, j)? - node_position(positions, vertex, j)?;
                    let denom = u.norm() * v.norm();
                    if denom == T::zero() {
                        T::zero()
                    } else {
                        num_traits::clamp(u.dot(v) / denom, -T::one(), T::one())
                            .acos()
                            .to_degrees()
                    }
                }
                RelationalKind::SpeedAbove { node } => speeds[node][j],
            };
            let above = def.kind.active_above();
            let next = match state {
                None => {
                    if above {
                        measure > def.thresholds.on
                    } else {
                        measure < def.thresholds.on
                    }
                }
                Some(current) => {
                    let turn_on = if above {
                        measure > def.thresholds.on
                    } else {
                        measure < def.thresholds.on
                    };
                    let turn_off = if above {
                        measure < def.thresholds.off
                    } else {
                        measure > def.thresholds.off
                    };
                    match (current, turn_on, turn_off) {
                        (false, true, _) => true,
                        (true, _, true) => false,
                        (s, _, _) => s,
                    }
                }
            };
            state = Some(next);
            matrix.set(f, j, next);
        }
    }
    Ok(matrix)
}

/// One run of equal values in a binary row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub value: u8,
    pub start: usize,
    pub len: usize,
}

/// Lossless run-length encoding, one run list per feature.
pub fn segment_encode(matrix: &FeatureMatrix) -> Vec<Vec<Run>> {
    let mut out = Vec::with_capacity(matrix.features());
    for f in 0..matrix.features() {
        let mut runs: Vec<Run> = Vec::new();
        for j in 0..matrix.frames() {
            let v = matrix.get(f, j);
            match runs.last_mut() {
                Some(run) if run.value == v => run.len += 1,
                _ => runs.push(Run {
                    value: v,
                    start: j,
                    len: 1,
                }),
            }
        }
        out.push(runs);
    }
    out
}

/// Inverse of [`segment_encode`].
pub fn segment_decode(runs: &[Vec<Run>], frames: usize) -> Result<FeatureMatrix> {
    let mut m = FeatureMatrix::zeros(runs.len(), frames);
    for (f, row) in runs.iter().enumerate() {
        let mut cursor = 0usize;
        for run in row {
            if run.start != cursor || run.start + run.len > frames {
                return Err(Error::Config(format!(
                    "run list for feature {f} is not a partition of 0..{frames}"
                )));
            }
            for j in run.start..run.start + run.len {
                m.set(f, j, run.value != 0);
            }
            cursor += run.len;
        }
        if cursor != frames {
            return Err(Error::Config(format!(
                "run list for feature {f} covers {cursor} of {frames} frames"
            )));
        }
    }
    Ok(m)
}

/// Gesture summary: per-feature per-frame means over aligned executions,
/// entries in [0, 1], with the uncertainty band (tau_lo, tau_hi).
#[derive(Clone, Debug, PartialEq)]
pub struct MotionTemplate<T> {
    features: usize,
    len: usize,
    /// Frame-major, like [`FeatureMatrix`].
    values: Vec<T>,
    pub tau_lo: T,
    pub tau_hi: T,
}

impl<T: Real> MotionTemplate<T> {
    pub fn features(&self) -> usize {
        self.features
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, feature: usize, frame: usize) -> T {
        self.values[frame * self.features + feature]
    }

    /// Serialize: header `F K tau_lo tau_hi`, then one line per feature.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.features, self.len, self.tau_lo, self.tau_hi);
        for f in 0..self.features {
            let row: Vec<String> = (0..self.len).map(|k| format!("{}", self.get(f, k))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(0, "empty template"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(1, "expected header `F K tau_lo tau_hi`"));
        }
        let features: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(1, "bad feature count"))?;
        let len: usize = fields[1].parse().map_err(|_| Error::parse(1, "bad length"))?;
        let tau_lo: T = fields[2].parse().map_err(|_| Error::parse(1, "bad tau_lo"))?;
        let tau_hi: T = fields[3].parse().map_err(|_| Error::parse(1, "bad tau_hi"))?;
        let mut values = vec![T::zero(); features * len];
        let mut rows = 0usize;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if rows >= features {
                return Err(Error::parse(i + 1, "more rows than declared features"));
            }
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != len {
                return Err(Error::parse(
                    i + 1,
                    format!("expected {len} values, found {}", cells.len()),
                ));
            }
            for (k, cell) in cells.iter().enumerate() {
                values[k * features + rows] = cell
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad value `{cell}`")))?;
            }
            rows += 1;
        }
        if rows != features {
            return Err(Error::parse(
                0,
                format!("expected {features} rows, found {rows}"),
            ));
        }
        Ok(MotionTemplate {
            features,
            len,
            values,
            tau_lo,
            tau_hi,
        })
    }
}

/// Mean absolute difference between two binary columns.
fn column_cost<T: Real>(a: &[u8], b: &[u8]) -> T {
    let mut sum = T::zero();
    for (x, y) in a.iter().zip(b) {
        sum += T::of_usize(x.abs_diff(*y) as usize);
    }
    sum / T::of_usize(a.len())
}

/// Full-alignment DTW path between matrix columns, symmetric steps,
/// minimizing accumulated cost (ties prefer diagonal, then vertical).
/// Returns the warping path as (reference frame, other frame) pairs.
fn full_dtw_path<T: Real>(reference: &FeatureMatrix, other: &FeatureMatrix) -> Vec<(usize, usize)> {
    let k = reference.frames();
    let l = other.frames();
    let mut cost = vec![T::infinity(); k * l];
    // 0 = start, 1 = diagonal, 2 = vertical (reference advances), 3 = horizontal.
    let mut step = vec![0u8; k * l];
    let idx = |i: usize, j: usize| i * l + j;
    for i in 0..k {
        for j in 0..l {
            let local = column_cost::<T>(reference.column(i), other.column(j));
            if i == 0 && j == 0 {
                cost[idx(0, 0)] = local;
                continue;
            }
            let mut best = T::infinity();
            let mut chosen = 0u8;
            if i > 0 && j > 0 && cost[idx(i - 1, j - 1)] < best {
                best = cost[idx(i - 1, j - 1)];
                chosen = 1;
            }
            if i > 0 && cost[idx(i - 1, j)] < best {
                best = cost[idx(i - 1, j)];
                chosen = 2;
            }
            if j > 0 && cost[idx(i, j - 1)] < best {
                best = cost[idx(i, j - 1)];
                chosen = 3;
            }
            cost[idx(i, j)] = best + local;
            step[idx(i, j)] = chosen;
        }
    }
    let mut path = Vec::new();
    let (mut i, mut j) = (k - 1, l - 1);
    loop {
        path.push((i, j));
        match step[idx(i, j)] {
            1 => {
                i -= 1;
                j -= 1;
            }
            2 => i -= 1,
            3 => j -= 1,
            _ => break,
        }
    }
    path.reverse();
    path
}

/// Average several executions of one gesture into a template. The first
/// execution is the reference timeline; every other execution is warped
/// onto it by full DTW before averaging.
pub fn build_template<T: Real>(
    executions: &[FeatureMatrix],
    tau_lo: T,
    tau_hi: T,
) -> Result<MotionTemplate<T>> {
    let reference = executions.first().ok_or(Error::NoExecutions)?;
    let features = reference.features();
    let len = reference.frames();
    if features == 0 || len == 0 {
        return Err(Error::NoExecutions);
    }
    for e in executions {
        if e.features() != features {
            return Err(Error::FeatureCountMismatch {
                a: features,
                b: e.features(),
            });
        }
        if e.frames() == 0 {
            return Err(Error::NoExecutions);
        }
    }
    let mut acc = vec![T::zero(); features * len];
    for e in executions {
        let path = full_dtw_path::<T>(reference, e);
        // Mean of the execution's columns aligned to each reference frame.
        let mut sums = vec![T::zero(); features * len];
        let mut counts = vec![0usize; len];
        for (i, j) in path {
            counts[i] += 1;
            for f in 0..features {
                sums[i * features + f] += T::of_usize(e.get(f, j) as usize);
            }
        }
        for i in 0..len {
            let c = T::of_usize(counts[i].max(1));
            for f in 0..features {
                acc[i * features + f] += sums[i * features + f] / c;
            }
        }
    }
    let count = T::of_usize(executions.len());
    for v in acc.iter_mut() {
        *v /= count;
    }
    Ok(MotionTemplate {
        features,
        len,
        values: acc,
        tau_lo,
        tau_hi,
    })
}

/// Distance curve over motion end frames, with the start frame of the best
/// alignment ending at each frame.
#[derive(Clone, Debug)]
pub struct DistanceCurve<T> {
    pub values: Vec<T>,
    pub starts: Vec<usize>,
}

/// Subsequence DTW between a template (K columns) and a longer motion
/// (L columns): free start, symmetric steps, local cost = mean absolute
/// difference over unmasked rows (template entries strictly inside
/// (tau_lo, tau_hi) are uncertain and masked per column). The curve value
/// at each end frame is the minimal accumulated cost divided by the
/// length of the shortest such path.
pub fn subsequence_distance<T: Real>(
    template: &MotionTemplate<T>,
    motion: &FeatureMatrix,
) -> Result<DistanceCurve<T>> {
    if template.features() != motion.features() {
        return Err(Error::FeatureCountMismatch {
            a: template.features(),
            b: motion.features(),
        });
    }
    let k = template.len();
    let l = motion.frames();
    if k == 0 || l == 0 {
        return Err(Error::NoExecutions);
    }
    let features = template.features();
    // Per template column: the unmasked row set.
    let mut unmasked: Vec<Vec<usize>> = Vec::with_capacity(k);
    for col in 0..k {
        let rows: Vec<usize> = (0..features)
            .filter(|&f| {
                let v = template.get(f, col);
                !(v > template.tau_lo && v < template.tau_hi)
            })
            .collect();
        if rows.is_empty() {
            return Err(Error::MaskedColumn { column: col });
        }
        unmasked.push(rows);
    }
    let local = |i: usize, j: usize| -> T {
        let rows = &unmasked[i];
        let mut sum = T::zero();
        for &f in rows {
            sum += (template.get(f, i) - T::of_usize(motion.get(f, j) as usize)).abs();
        }
        sum / T::of_usize(rows.len())
    };

    let idx = |i: usize, j: usize| i * l + j;
    let mut cost = vec![T::zero(); k * l];
    let mut plen = vec![0usize; k * l];
    let mut start = vec![0usize; k * l];
    for j in 0..l {
        cost[idx(0, j)] = local(0, j);
        plen[idx(0, j)] = 1;
        start[idx(0, j)] = j;
    }
    for i in 1..k {
        for j in 0..l {
            // Predecessors: diagonal, vertical, horizontal. Minimize cost,
            // then path length (well-defined normalization).
            let mut best_cost = cost[idx(i - 1, j)];
            let mut best_len = plen[idx(i - 1, j)];
            let mut best_start = start[idx(i - 1, j)];
            if j > 0 {
                let c = cost[idx(i - 1, j - 1)];
                let len = plen[idx(i - 1, j - 1)];
                if c < best_cost || (c == best_cost && len < best_len) {
                    best_cost = c;
                    best_len = len;
                    best_start = start[idx(i - 1, j - 1)];
                }
                let c = cost[idx(i, j - 1)];
                let len = plen[idx(i, j - 1)];
                if c < best_cost || (c == best_cost && len < best_len) {
                    best_cost = c;
                    best_len = len;
                    best_start = start[idx(i, j - 1)];
                }
            }
            cost[idx(i, j)] = best_cost + local(i, j);
            plen[idx(i, j)] = best_len + 1;
            start[idx(i, j)] = best_start;
        }
    }
    let mut values = Vec::with_capacity(l);
    let mut starts = Vec::with_capacity(l);
    for j in 0..l {
        values.push(cost[idx(k - 1, j)] / T::of_usize(plen[idx(k - 1, j)]));
        starts.push(start[idx(k - 1, j)]);
    }
    Ok(DistanceCurve { values, starts })
}

/// A detected match: the frame span from the best alignment's start to the
/// end of the below-threshold run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectionSpan {
    pub start_frame: usize,
    pub end_frame: usize,
}

/// Maximal runs of curve values strictly below the threshold (so a zero
/// threshold detects nothing). Runs closer than `merge_gap` frames merge;
/// each reported span starts at the DTW-induced start of the run's best
/// (minimal) frame. Spans come back disjoint and sorted.
pub fn detect<T: Real>(curve: &DistanceCurve<T>, threshold: T, merge_gap: usize) -> Vec<DetectionSpan> {
    let n = curve.values.len();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for j in 0..n {
        let below = curve.values[j] < threshold;
        match (below, open) {
            (true, None) => open = Some(j),
            (false, Some(s)) => {
                runs.push((s, j - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, n - 1));
    }
    // Merge runs separated by fewer than merge_gap frames.
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for run in runs {
        match merged.last_mut() {
            Some(last) if run.0 - last.1 - 1 < merge_gap => last.1 = run.1,
            _ => merged.push(run),
        }
    }
    let mut spans: Vec<DetectionSpan> = Vec::new();
    for (s, e) in merged {
        let best = (s..=e)
            .min_by(|a, b| {
                curve.values[*a]
                    .partial_cmp(&curve.values[*b])
                    .expect("finite distances")
            })
            .expect("non-empty run");
        let start_frame = curve.starts[best].min(s);
        let span = DetectionSpan {
            start_frame,
            end_frame: e,
        };
        match spans.last_mut() {
            // Keep spans disjoint after mapping starts backward.
            Some(last) if span.start_frame <= last.end_frame => {
                last.end_frame = last.end_frame.max(span.end_frame);
            }
            _ => spans.push(span),
        }
    }
    spans
}

/// Convert detection spans to labels on a fixed-rate timeline.
pub fn spans_to_labels<T: Real>(
    spans: &[DetectionSpan],
    frame_rate: T,
    start_time: T,
    name: &str,
) -> Result<Vec<Label<T>>> {
    spans
        .iter()
        .map(|s| {
            Label::new(
                start_time + T::of_usize(s.start_frame) / frame_rate,
                start_time + T::of_usize(s.end_frame) / frame_rate,
                name,
            )
        })
        .collect()
}

/// Parse relational feature definitions, one per line:
///
/// ```text
/// plane_side <normal_a> <normal_b> <origin> <target> <on> [off]
/// distance_below <a> <b> <on> [off]
/// angle_below <a> <vertex> <c> <on_degrees> [off_degrees]
/// speed_above <node> <on> [off]
/// ```
///
/// Node names resolve against the topology; `#` starts a comment.
pub fn parse_feature_defs<T: Real>(
    text: &str,
    topology: &SkeletonTopology<T>,
) -> Result<Vec<RelationalFeatureDef<T>>> {
    let mut defs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let node = |name: &str| -> Result<usize> {
            topology
                .index_of(name)
                .ok_or_else(|| Error::parse(line_no, format!("unknown node `{name}`")))
        };
        let num = |s: &str| -> Result<T> {
            s.parse()
                .map_err(|_| Error::parse(line_no, format!("bad threshold `{s}`")))
        };
        let thresholds = |on_at: usize| -> Result<Hysteresis<T>> {
            let on = num(fields[on_at])?;
            let off = if fields.len() > on_at + 1 {
                num(fields[on_at + 1])?
            } else {
                on
            };
            Ok(Hysteresis { on, off })
        };
        let (kind, thresholds) = match fields[0] {
            "plane_side" if fields.len() == 6 || fields.len() == 7 => (
                RelationalKind::PlaneSide {
                    normal_a: node(fields[1])?,
                    normal_b: node(fields[2])?,
                    origin: node(fields[3])?,
                    target: node(fields[4])?,
                },
                thresholds(5)?,
            ),
            "distance_below" if fields.len() == 4 || fields.len() == 5 => (
                RelationalKind::DistanceBelow {
                    a: node(fields[1])?,
                    b: node(fields[2])?,
                },
                thresholds(3)?,
            ),
            "angle_below" if fields.len() == 5 || fields.len() == 6 => (
                RelationalKind::AngleBelow {
                    a: node(fields[1])?,
                    vertex: node(fields[2])?,
                    c: node(fields[3])?,
                },
                thresholds(4)?,
            ),
            "speed_above" if fields.len() == 3 || fields.len() == 4 => (
                RelationalKind::SpeedAbove {
                    node: node(fields[1])?,
                },
                thresholds(2)?,
            ),
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown or malformed definition `{other}`"),
                ))
            }
        };
        let def = RelationalFeatureDef { kind, thresholds };
        def.validate(topology.node_count())?;
        defs.push(def);
    }
    Ok(defs)
}
