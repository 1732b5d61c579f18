//! BVH (BioVision Hierarchy) reader.
//!
//! The HIERARCHY section becomes a [`SkeletonTopology`] (End Sites become
//! channel-less nodes named `<parent>_End`); the MOTION section becomes a
//! fixed-rate [`PoseTrack`] with `frame_rate = 1 / FrameTime`. Euler
//! rotation channels are converted to quaternions honoring each joint's
//! declared channel order, and global positions are produced by forward
//! kinematics.

use crate::error::{Error, Result};
use crate::math::{Axis, EulerOrder, Quat, Vec3};
use crate::num::Real;
use crate::skeleton::{forward_kinematics, PoseTrack, RotationSpace, SkeletonTopology};
use crate::timed::TimedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    XPosition,
    YPosition,
    ZPosition,
    XRotation,
    YRotation,
    ZRotation,
}

impl Channel {
    fn parse(token: &str, line: usize) -> Result<Channel> {
        match token {
            "Xposition" => Ok(Channel::XPosition),
            "Yposition" => Ok(Channel::YPosition),
            "Zposition" => Ok(Channel::ZPosition),
            "Xrotation" => Ok(Channel::XRotation),
            "Yrotation" => Ok(Channel::YRotation),
            "Zrotation" => Ok(Channel::ZRotation),
            other => Err(Error::parse(line, format!("unknown channel `{other}`"))),
        }
    }

    fn rotation_axis(self) -> Option<Axis> {
        match self {
            Channel::XRotation => Some(Axis::X),
            Channel::YRotation => Some(Axis::Y),
            Channel::ZRotation => Some(Axis::Z),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RawJoint<T> {
    pub name: String,
    pub parent: Option<usize>,
    pub offset: Vec3<T>,
    pub channels: Vec<Channel>,
}

/// Parsed document before kinematic evaluation: joint declarations plus the
/// raw motion rows in channel order.
#[derive(Clone, Debug)]
pub struct RawBvh<T> {
    pub joints: Vec<RawJoint<T>>,
    pub frame_time: T,
    pub rows: Vec<Vec<T>>,
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                items.push((i + 1, tok));
            }
        }
        Tokens { items, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let item = self.items.get(self.pos).copied().ok_or_else(|| {
            Error::parse(self.last_line(), format!("unexpected end of file, expected {what}"))
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn expect(&mut self, token: &str) -> Result<usize> {
        let (line, tok) = self.next(&format!("`{token}`"))?;
        if tok != token {
            return Err(Error::parse(line, format!("expected `{token}`, found `{tok}`")));
        }
        Ok(line)
    }

    fn number<T: Real>(&mut self, what: &str) -> Result<T> {
        let (line, tok) = self.next(what)?;
        tok.parse::<T>()
            .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
    }

    fn integer(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.next(what)?;
        tok.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
    }

    fn last_line(&self) -> usize {
        self.items.last().map(|(l, _)| *l).unwrap_or(0)
    }

    fn remaining(&self) -> usize {
        self.items.len() - self.pos
    }
}

impl<T: Real> RawBvh<T> {
    pub fn parse(text: &str) -> Result<Self> {
        let mut toks = Tokens::new(text);
        if toks.peek().is_none() {
            return Err(Error::parse(0, "empty document, missing HIERARCHY section"));
        }
        toks.expect("HIERARCHY")?;
        toks.expect("ROOT")?;
        let mut joints: Vec<RawJoint<T>> = Vec::new();
        parse_joint(&mut toks, None, &mut joints)?;

        toks.expect("MOTION")?;
        toks.expect("Frames:")?;
        let declared_frames = toks.integer("frame count")?;
        toks.expect("Frame")?;
        toks.expect("Time:")?;
        let frame_time: T = toks.number("frame time")?;
        if frame_time <= T::zero() {
            return Err(Error::parse(toks.last_line(), "frame time must be positive"));
        }

        let width: usize = joints.iter().map(|j| j.channels.len()).sum();
        if width == 0 {
            return Err(Error::parse(toks.last_line(), "no channels declared"));
        }
        let expected = declared_frames * width;
        if toks.remaining() != expected {
            return Err(Error::parse(
                toks.last_line(),
                format!(
                    "motion data holds {} values but {} frames x {} channels = {} were declared",
                    toks.remaining(),
                    declared_frames,
                    width,
                    expected
                ),
            ));
        }
        let mut rows = Vec::with_capacity(declared_frames);
        for _ in 0..declared_frames {
            let mut row = Vec::with_capacity(width);
            for _ in 0..width {
                row.push(toks.number("motion sample")?);
            }
            rows.push(row);
        }
        Ok(RawBvh {
            joints,
            frame_time,
            rows,
        })
    }

    pub fn topology(&self) -> Result<SkeletonTopology<T>> {
        SkeletonTopology::new(
            self.joints.iter().map(|j| j.name.clone()).collect(),
            self.joints.iter().map(|j| j.parent).collect(),
            self.joints.iter().map(|j| j.offset).collect(),
        )
    }

    pub fn frame_rate(&self) -> T {
        T::one() / self.frame_time
    }

    /// Local rotation and translation of every joint for one motion row.
    fn decode_row(&self, row: &[T]) -> (Vec<Quat<T>>, Vec<Vec3<T>>) {
        let mut rotations = Vec::with_capacity(self.joints.len());
        let mut translations = Vec::with_capacity(self.joints.len());
        let mut cursor = 0usize;
        for joint in &self.joints {
            let values = &row[cursor..cursor + joint.channels.len()];
            cursor += joint.channels.len();
            let mut q = Quat::identity();
            let mut t = joint.offset;
            for (channel, v) in joint.channels.iter().zip(values) {
                match channel {
                    Channel::XPosition => t.x += *v,
                    Channel::YPosition => t.y += *v,
                    Channel::ZPosition => t.z += *v,
                    rot => {
                        let axis = rot.rotation_axis().expect("rotation channel");
                        q = q * Quat::from_axis_angle(axis, *v);
                    }
                }
            }
            rotations.push(q);
            translations.push(t);
        }
        (rotations, translations)
    }

    /// Evaluate the kinematic chain for every frame.
    pub fn to_pose_track(&self) -> Result<(SkeletonTopology<T>, PoseTrack<T>)> {
        let topology = self.topology()?;
        let n = topology.node_count();
        let rate = self.frame_rate();
        let mut positions = TimedSeries::offline_fixed_rate(3 * n, rate, T::zero())?;
        let mut rotations = TimedSeries::offline_fixed_rate(4 * n, rate, T::zero())?;
        for row in &self.rows {
            let (quats, translations) = self.decode_row(row);
            // Same recurrence as forward_kinematics, with per-joint
            // translations standing in for the rest offsets.
            let mut pos = vec![Vec3::zero(); n];
            let mut glob = vec![Quat::identity(); n];
            for i in 0..n {
                match topology.parent(i) {
                    None => {
                        pos[i] = translations[i];
                        glob[i] = quats[i];
                    }
                    Some(p) => {
                        pos[i] = pos[p] + glob[p].rotate(translations[i]);
                        glob[i] = glob[p] * quats[i];
                    }
                }
            }
            let mut pcol = Vec::with_capacity(3 * n);
            for p in &pos {
                pcol.extend_from_slice(&[p.x, p.y, p.z]);
            }
            let mut rcol = Vec::with_capacity(4 * n);
            for q in &quats {
                rcol.extend_from_slice(&[q.w, q.x, q.y, q.z]);
            }
            positions.push_frame(&pcol, None)?;
            rotations.push_frame(&rcol, None)?;
        }
        let track = PoseTrack::new(positions, rotations, RotationSpace::Local)?;
        Ok((topology, track))
    }

    /// Declared rotation order of a joint (first rotation channel first),
    /// when it has exactly three rotation channels.
    pub fn rotation_order(&self, joint: usize) -> Option<EulerOrder> {
        let axes: Vec<Axis> = self.joints[joint]
            .channels
            .iter()
            .filter_map(|c| c.rotation_axis())
            .collect();
        if axes.len() == 3 {
            EulerOrder::new([axes[0], axes[1], axes[2]]).ok()
        } else {
            None
        }
    }
}

fn parse_joint<T: Real>(
    toks: &mut Tokens,
    parent: Option<usize>,
    joints: &mut Vec<RawJoint<T>>,
) -> Result<usize> {
    let (_, name) = toks.next("joint name")?;
    let name = name.to_string();
    toks.expect("{")?;
    toks.expect("OFFSET")?;
    let offset = Vec3::new(
        toks.number("offset x")?,
        toks.number("offset y")?,
        toks.number("offset z")?,
    );
    let (line, tok) = toks.next("CHANNELS")?;
    if tok != "CHANNELS" {
        return Err(Error::parse(line, format!("expected `CHANNELS`, found `{tok}`")));
    }
    let count = toks.integer("channel count")?;
    let mut channels = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, tok) = toks.next("channel name")?;
        channels.push(Channel::parse(tok, line)?);
    }
    let index = joints.len();
    joints.push(RawJoint {
        name: name.clone(),
        parent,
        offset,
        channels,
    });

    loop {
        let (line, tok) = toks.next("`JOINT`, `End` or `}`")?;
        match tok {
            "}" => return Ok(index),
            "JOINT" => {
                parse_joint(toks, Some(index), joints)?;
            }
            "End" => {
                toks.expect("Site")?;
                toks.expect("{")?;
                toks.expect("OFFSET")?;
                let offset = Vec3::new(
                    toks.number("offset x")?,
                    toks.number("offset y")?,
                    toks.number("offset z")?,
                );
                toks.expect("}")?;
                joints.push(RawJoint {
                    name: format!("{name}_End"),
                    parent: Some(index),
                    offset,
                    channels: Vec::new(),
                });
            }
            other => {
                return Err(Error::parse(
                    line,
                    format!("expected `JOINT`, `End` or `}}`, found `{other}`"),
                ))
            }
        }
    }
}

/// Parse a BVH document into a topology and a fixed-rate pose track.
pub fn parse_bvh<T: Real>(text: &str) -> Result<(SkeletonTopology<T>, PoseTrack<T>)> {
    RawBvh::parse(text)?.to_pose_track()
}

// Forward kinematics over rest offsets only; used by tests to cross-check
// the zero-rotation pose.
#[allow(dead_code)]
fn rest_pose<T: Real>(topology: &SkeletonTopology<T>) -> Vec<Vec3<T>> {
    let identity = vec![Quat::identity(); topology.node_count()];
    forward_kinematics(topology, &identity, topology.offset(topology.root()))
        .expect("identity pose")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_JOINT: &str = "HIERARCHY
ROOT Hips
{
    OFFSET 0.0 0.0 0.0
    CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
    JOINT Chest
    {
        OFFSET 0.0 0.5 0.0
        CHANNELS 3 Zrotation Xrotation Yrotation
        End Site
        {
            OFFSET 0.0 0.4 0.0
        }
    }
}
MOTION
Frames: 2
Frame Time: 0.01
0.0 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0
0.1 1.0 0.0 0.0 0.0 0.0 90.0 0.0 0.0
";

    #[test]
    fn frame_rate_is_reciprocal() {
        let raw = RawBvh::<f64>::parse(TWO_JOINT).unwrap();
        assert_eq!(raw.frame_rate(), 100.0);
        let (_, track) = raw.to_pose_track().unwrap();
        assert_eq!(track.positions().frame_rate().unwrap(), 100.0);
        assert_eq!(track.len(), 2);
        assert_eq!(track.node_count(), 3);
    }

    #[test]
    fn zero_rotation_positions_follow_offsets() {
        let (topo, track) = parse_bvh::<f64>(TWO_JOINT).unwrap();
        let p = track.frame_positions(0).unwrap();
        assert_eq!(p[0], Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(p[1], Vec3::new(0.0, 1.5, 0.0));
        assert_eq!(p[2], Vec3::new(0.0, 1.9, 0.0));
        assert_eq!(topo.name(2), "Chest_End");
    }

    #[test]
    fn rotation_channels_respect_declared_order() {
        let (_, track) = parse_bvh::<f64>(TWO_JOINT).unwrap();
        // Frame 1 rotates the chest 90 deg about Z: its end site swings to -X.
        let p = track.frame_positions(1).unwrap();
        assert!((p[2].x - (0.1 - 0.4)).abs() < 1e-9);
        assert!((p[2].y - 1.5).abs() < 1e-9);
    }

    #[test]
    fn frame_count_mismatch_rejected() {
        let bad = TWO_JOINT.replace("Frames: 2", "Frames: 3");
        let err = RawBvh::<f64>::parse(&bad).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn non_numeric_sample_rejected() {
        let bad = TWO_JOINT.replace("0.1 1.0", "0.1 oops");
        assert!(RawBvh::<f64>::parse(&bad).is_err());
    }

    #[test]
    fn missing_sections_rejected() {
        assert!(RawBvh::<f64>::parse("").is_err());
        assert!(RawBvh::<f64>::parse("MOTION\nFrames: 0\n").is_err());
        let no_motion = TWO_JOINT.split("MOTION").next().unwrap();
        assert!(RawBvh::<f64>::parse(no_motion).is_err());
    }

    #[test]
    fn declared_rotation_order() {
        let raw = RawBvh::<f64>::parse(TWO_JOINT).unwrap();
        assert_eq!(raw.rotation_order(0), Some(EulerOrder::ZXY));
        assert_eq!(raw.rotation_order(2), None);
    }
}
