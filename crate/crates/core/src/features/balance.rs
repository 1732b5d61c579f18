//! Balance features: segment-model center of mass, ground support base, and
//! the ternary / continuous balance values.

use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull, point_in_convex_polygon, project_point, GroundPoint,
};
use crate::math::{Axis, Vec3};
use crate::num::Real;
use crate::skeleton::SkeletonTopology;

/// One body segment: the line between two nodes, its center-of-mass ratio
/// along that line and its share of total body mass.
#[derive(Clone, Debug)]
pub struct Segment<T> {
    pub name: String,
    pub proximal: usize,
    pub distal: usize,
    pub com_ratio: T,
    pub mass_fraction: T,
}

/// Anthropometric segment table. Shipped as configuration; validated only
/// against its own invariants (ratios in [0, 1], fractions summing to 1).
#[derive(Clone, Debug)]
pub struct SegmentModel<T> {
    segments: Vec<Segment<T>>,
}

impl<T: Real> SegmentModel<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config("segment model is empty".into()));
        }
        for s in &segments {
            if s.com_ratio < T::zero() || s.com_ratio > T::one() {
                return Err(Error::BadSegmentRatio(s.com_ratio.as_f64()));
            }
            if s.mass_fraction < T::zero() || s.mass_fraction > T::one() {
                return Err(Error::BadSegmentRatio(s.mass_fraction.as_f64()));
            }
        }
        let sum = segments
            .iter()
            .fold(T::zero(), |acc, s| acc + s.mass_fraction);
        if (sum - T::one()).abs() > T::of(1e-6) {
            return Err(Error::BadMassFractions { sum: sum.as_f64() });
        }
        Ok(SegmentModel { segments })
    }

    /// Parse `name proximal distal com_ratio mass_fraction` lines, resolving
    /// node names against a topology. `#` starts a comment.
    pub fn parse(text: &str, topology: &SkeletonTopology<T>) -> Result<Self> {
        let mut segments = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "expected `name proximal distal com_ratio mass_fraction`, found {} field(s)",
                        fields.len()
                    ),
                ));
            }
            let proximal = topology
                .index_of(fields[1])
                .ok_or_else(|| Error::parse(line_no, format!("unknown node `{}`", fields[1])))?;
            let distal = topology
                .index_of(fields[2])
                .ok_or_else(|| Error::parse(line_no, format!("unknown node `{}`", fields[2])))?;
            let com_ratio: T = fields[3]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad ratio `{}`", fields[3])))?;
            let mass_fraction: T = fields[4]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad mass fraction `{}`", fields[4])))?;
            segments.push(Segment {
                name: fields[0].to_string(),
                proximal,
                distal,
                com_ratio,
                mass_fraction,
            });
        }
        SegmentModel::new(segments)
    }

    /// Build a model directly from node indices (streaming configs).
    pub fn from_indices(entries: &[(usize, usize, T, T)]) -> Result<Self> {
        SegmentModel::new(
            entries
                .iter()
                .enumerate()
                .map(|(i, (p, d, ratio, mass))| Segment {
                    name: format!("segment_{i}"),
                    proximal: *p,
                    distal: *d,
                    com_ratio: *ratio,
                    mass_fraction: *mass,
                })
                .collect(),
        )
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    /// Map segment masses onto joints (each segment contributes its mass to
    /// its distal node) for use as aggregation weights.
    pub fn joint_weights(&self, node_count: usize) -> Result<crate::features::JointWeights<T>> {
        let mut weights = vec![T::zero(); node_count];
        for s in &self.segments {
            if s.distal >= node_count {
                return Err(Error::NodeOutOfRange {
                    index: s.distal,
                    count: node_count,
                });
            }
            weights[s.distal] += s.mass_fraction;
        }
        crate::features::JointWeights::new(weights)
    }

    pub fn max_node(&self) -> usize {
        self.segments
            .iter()
            .map(|s| s.proximal.max(s.distal))
            .max()
            .unwrap_or(0)
    }
}

fn node<T: Real>(positions: &[Vec3<T>], index: usize) -> Result<Vec3<T>> {
    positions.get(index).copied().ok_or(Error::NodeOutOfRange {
        index,
        count: positions.len(),
    })
}

/// Center of mass of one segment: `proximal + ratio * (distal - proximal)`.
pub fn segment_com<T: Real>(positions: &[Vec3<T>], segment: &Segment<T>) -> Result<Vec3<T>> {
    let p = node(positions, segment.proximal)?;
    let d = node(positions, segment.distal)?;
    Ok(p + (d - p).scale(segment.com_ratio))
}

/// Whole-body center of mass: mass-fraction-weighted sum of segment centers.
pub fn global_com<T: Real>(positions: &[Vec3<T>], model: &SegmentModel<T>) -> Result<Vec3<T>> {
    let mut acc = Vec3::zero();
    for s in model.segments() {
        acc = acc + segment_com(positions, s)?.scale(s.mass_fraction);
    }
    Ok(acc)
}

/// Ground contact detection parameters: a candidate touches ground when its
/// up-coordinate is within `contact_epsilon` of the lowest candidate AND
/// below the absolute `ground_height`.
#[derive(Clone, Copy, Debug)]
pub struct BalanceConfig<T> {
    pub contact_epsilon: T,
    pub ground_height: T,
    pub up: Axis,
}

impl<T: Real> Default for BalanceConfig<T> {
    fn default() -> Self {
        BalanceConfig {
            contact_epsilon: T::of(0.05),
            ground_height: T::of(0.05),
            up: Axis::Z,
        }
    }
}

/// The support polygon: contact nodes, their ground-projection hull, and the
/// mean of the contact projections.
#[derive(Clone, Debug)]
pub struct SupportBase<T> {
    pub contacts: Vec<usize>,
    pub hull: Vec<GroundPoint<T>>,
    pub center: GroundPoint<T>,
}

/// Detect the support base; `None` when every candidate is above the ground
/// threshold (airborne).
pub fn support_base<T: Real>(
    positions: &[Vec3<T>],
    candidates: &[usize],
    config: &BalanceConfig<T>,
) -> Result<Option<SupportBase<T>>> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut min_up = T::infinity();
    for &c in candidates {
        min_up = min_up.min(node(positions, c)?.component(config.up));
    }
    let contacts: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&c| {
            let h = positions[c].component(config.up);
            h <= min_up + config.contact_epsilon && h <= config.ground_height
        })
        .collect();
    if contacts.is_empty() {
        return Ok(None);
    }
    let projections: Vec<GroundPoint<T>> = contacts
        .iter()
        .map(|&c| project_point(positions[c], config.up))
        .collect();
    let hull = convex_hull(&projections);
    let count = T::of_usize(projections.len());
    let center = GroundPoint::new(
        projections.iter().fold(T::zero(), |a, p| a + p.u) / count,
        projections.iter().fold(T::zero(), |a, p| a + p.v) / count,
    );
    Ok(Some(SupportBase {
        contacts,
        hull,
        center,
    }))
}

/// Ternary balance: 1 when the center of mass projects inside the support
/// hull, 0 when outside, -2 when there is no support base.
pub fn binary_balance<T: Real>(
    positions: &[Vec3<T>],
    model: &SegmentModel<T>,
    candidates: &[usize],
    config: &BalanceConfig<T>,
) -> Result<i32> {
    let Some(support) = support_base(positions, candidates, config)? else {
        return Ok(-2);
    };
    let com = global_com(positions, model)?;
    let projected = project_point(com, config.up);
    Ok(if point_in_convex_polygon(projected, &support.hull) {
        1
    } else {
        0
    })
}

/// Planar distance between the support-base center and the projected center
/// of mass; `None` when airborne.
pub fn continuous_balance<T: Real>(
    positions: &[Vec3<T>],
    model: &SegmentModel<T>,
    candidates: &[usize],
    config: &BalanceConfig<T>,
) -> Result<Option<T>> {
    let Some(support) = support_base(positions, candidates, config)? else {
        return Ok(None);
    };
    let com = global_com(positions, model)?;
    Ok(Some(support.center.distance(project_point(com, config.up))))
}
