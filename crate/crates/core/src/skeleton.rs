//! Skeletal-model-independent pose representation: a bone hierarchy plus
//! per-frame global node positions and per-bone unit quaternions.
//!
//! Rotations are stored as quaternions; Euler angles exist only at file
//! boundaries. Bones without rotation channels behave as identity.

use crate::error::{Error, Result};
use crate::math::{Quat, Vec3};
use crate::num::Real;
use crate::timed::TimedSeries;

pub use crate::math::{euler_from_quaternion, euler_to_quaternion};

/// Tolerance under which rotations are silently renormalized; beyond it the
/// data is treated as corrupt.
pub const UNIT_QUAT_TOLERANCE: f64 = 1e-6;

/// Bone hierarchy: node names, parent links (in topological order, parents
/// before children, exactly one root) and rest offsets from the parent in
/// meters.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonTopology<T> {
    node_names: Vec<String>,
    parents: Vec<Option<usize>>,
    offsets: Vec<Vec3<T>>,
}

impl<T: Real> SkeletonTopology<T> {
    pub fn new(
        node_names: Vec<String>,
        parents: Vec<Option<usize>>,
        offsets: Vec<Vec3<T>>,
    ) -> Result<Self> {
        let n = node_names.len();
        if parents.len() != n || offsets.len() != n {
            return Err(Error::InvalidTopology(
                "names, parents and offsets must have equal length".into(),
            ));
        }
        let roots = parents.iter().filter(|p| p.is_none()).count();
        if roots != 1 {
            return Err(Error::InvalidTopology(format!("expected one root, found {roots}")));
        }
        for (i, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                if *p >= i {
                    return Err(Error::InvalidTopology(format!(
                        "parent {p} of node {i} is not earlier in topological order"
                    )));
                }
            }
        }
        Ok(SkeletonTopology {
            node_names,
            parents,
            offsets,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn name(&self, node: usize) -> &str {
        &self.node_names[node]
    }

    pub fn names(&self) -> &[String] {
        &self.node_names
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parents[node]
    }

    pub fn offset(&self, node: usize) -> Vec3<T> {
        self.offsets[node]
    }

    pub fn root(&self) -> usize {
        self.parents
            .iter()
            .position(|p| p.is_none())
            .expect("validated at construction")
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.node_names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }
}

/// Whether stored rotations are relative to the parent bone or the world.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationSpace {
    Local,
    Global,
}

/// Per-frame pose data: global node positions (3 per node) and bone
/// rotations (4 per node, unit quaternions), sharing one time model.
#[derive(Clone, Debug)]
pub struct PoseTrack<T> {
    positions: TimedSeries<T>,
    rotations: TimedSeries<T>,
    space: RotationSpace,
}

impl<T: Real> PoseTrack<T> {
    pub fn new(
        positions: TimedSeries<T>,
        rotations: TimedSeries<T>,
        space: RotationSpace,
    ) -> Result<Self> {
        if !positions.dims().is_multiple_of(3) {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: positions.dims(),
            });
        }
        let nodes = positions.dims() / 3;
        if rotations.dims() != 4 * nodes {
            return Err(Error::DimensionMismatch {
                expected: 4 * nodes,
                got: rotations.dims(),
            });
        }
        if !positions.same_time_base(&rotations) {
            return Err(Error::TimeModelMismatch);
        }
        let track = PoseTrack {
            positions,
            rotations,
            space,
        };
        // Every stored quaternion must be unit within tolerance.
        for frame in 0..track.len() {
            for node in 0..nodes {
                track.rotation(node, frame)?;
            }
        }
        Ok(track)
    }

    pub fn node_count(&self) -> usize {
        self.positions.dims() / 3
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn space(&self) -> RotationSpace {
        self.space
    }

    pub fn positions(&self) -> &TimedSeries<T> {
        &self.positions
    }

    pub fn rotations(&self) -> &TimedSeries<T> {
        &self.rotations
    }

    pub fn position(&self, node: usize, frame: usize) -> Result<Vec3<T>> {
        crate::kinematics::node_position(&self.positions, node, frame)
    }

    /// Unit rotation of one bone, renormalized within tolerance.
    pub fn rotation(&self, node: usize, frame: usize) -> Result<Quat<T>> {
        let f = self.rotations.frame(frame)?;
        let q = Quat::new(f[4 * node], f[4 * node + 1], f[4 * node + 2], f[4 * node + 3]);
        q.checked_unit(T::of(UNIT_QUAT_TOLERANCE))
    }

    /// All node positions of one frame.
    pub fn frame_positions(&self, frame: usize) -> Result<Vec<Vec3<T>>> {
        (0..self.node_count())
            .map(|n| self.position(n, frame))
            .collect()
    }

    /// All bone rotations of one frame.
    pub fn frame_rotations(&self, frame: usize) -> Result<Vec<Quat<T>>> {
        (0..self.node_count())
            .map(|n| self.rotation(n, frame))
            .collect()
    }
}

fn checked_units<T: Real>(rotations: &[Quat<T>]) -> Result<Vec<Quat<T>>> {
    rotations
        .iter()
        .map(|q| q.checked_unit(T::of(UNIT_QUAT_TOLERANCE)))
        .collect()
}

/// Global node positions from local per-bone rotations and the root position:
/// `child = parent + parent_global_rotation ⊗ offset(child)`.
pub fn forward_kinematics<T: Real>(
    topology: &SkeletonTopology<T>,
    local_rotations: &[Quat<T>],
    root_position: Vec3<T>,
) -> Result<Vec<Vec3<T>>> {
    let n = topology.node_count();
    if local_rotations.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: local_rotations.len(),
        });
    }
    let locals = checked_units(local_rotations)?;
    let mut positions = vec![Vec3::zero(); n];
    let mut globals = vec![Quat::identity(); n];
    for i in 0..n {
        match topology.parent(i) {
            None => {
                positions[i] = root_position;
                globals[i] = locals[i];
            }
            Some(p) => {
                positions[i] = positions[p] + globals[p].rotate(topology.offset(i));
                globals[i] = globals[p] * locals[i];
            }
        }
    }
    Ok(positions)
}

/// Re-express global rotations relative to each bone's parent.
pub fn global_to_local<T: Real>(
    topology: &SkeletonTopology<T>,
    global_rotations: &[Quat<T>],
) -> Result<Vec<Quat<T>>> {
    let n = topology.node_count();
    if global_rotations.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: global_rotations.len(),
        });
    }
    let globals = checked_units(global_rotations)?;
    Ok((0..n)
        .map(|i| match topology.parent(i) {
            None => globals[i],
            Some(p) => globals[p].conjugate() * globals[i],
        })
        .collect())
}

/// Accumulate local rotations down the hierarchy. Inverse of
/// [`global_to_local`] up to quaternion sign.
pub fn local_to_global<T: Real>(
    topology: &SkeletonTopology<T>,
    local_rotations: &[Quat<T>],
) -> Result<Vec<Quat<T>>> {
    let n = topology.node_count();
    if local_rotations.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: local_rotations.len(),
        });
    }
    let locals = checked_units(local_rotations)?;
    let mut globals = vec![Quat::identity(); n];
    for i in 0..n {
        globals[i] = match topology.parent(i) {
            None => locals[i],
            Some(p) => globals[p] * locals[i],
        };
    }
    Ok(globals)
}
