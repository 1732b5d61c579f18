//! Ergonomic features: spline-interpolated postural load and sphereness.
//!
//! Discomfort scores per joint degree of freedom come from knot tables
//! shipped as configuration; a natural cubic spline interpolates between
//! knots and clamps outside the tabulated range (extrapolation could go
//! negative, which a discomfort score cannot).

use crate::error::{Error, Result};
use crate::math::{euler_from_quaternion, Axis, EulerOrder, Quat, Vec3};
use crate::num::Real;
use crate::skeleton::SkeletonTopology;

/// Natural cubic spline through strictly increasing knots; constant for a
/// single knot, clamped to the boundary values outside the knot range.
#[derive(Clone, Debug)]
pub struct CubicSpline<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    /// Second derivatives at the knots (zero at the boundaries).
    y2: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn natural(knots: &[(T, T)]) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::EmptyKnots);
        }
        for pair in knots.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::UnsortedKnots);
            }
        }
        let n = knots.len();
        let xs: Vec<T> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<T> = knots.iter().map(|k| k.1).collect();
        let mut y2 = vec![T::zero(); n];
        if n > 2 {
            // Thomas solve of the natural-spline tridiagonal system.
            let m = n - 2;
            let mut diag = vec![T::zero(); m];
            let mut upper = vec![T::zero(); m];
            let mut lower = vec![T::zero(); m];
            let mut rhs = vec![T::zero(); m];
            let six = T::of(6.0);
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                lower[i] = h0;
                diag[i] = T::of(2.0) * (h0 + h1);
                upper[i] = h1;
                rhs[i] = six * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..m {
                let w = lower[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= w * prev;
            }
            y2[m] = rhs[m - 1] / diag[m - 1];
            for i in (1..m).rev() {
                y2[i] = (rhs[i - 1] - upper[i - 1] * y2[i + 1]) / diag[i - 1];
            }
        }
        Ok(CubicSpline { xs, ys, y2 })
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        // Interval with xs[i] <= x < xs[i+1].
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[hi] - self.xs[lo];
        let a = (self.xs[hi] - x) / h;
        let b = (x - self.xs[lo]) / h;
        let six = T::of(6.0);
        a * self.ys[lo]
            + b * self.ys[hi]
            + ((a * a * a - a) * self.y2[lo] + (b * b * b - b) * self.y2[hi]) * h * h / six
    }

    pub fn knot_count(&self) -> usize {
        self.xs.len()
    }
}

/// Discomfort score for one degree of freedom at the given joint angle.
pub fn dof_discomfort<T: Real>(theta_degrees: T, spline: &CubicSpline<T>) -> T {
    spline.eval(theta_degrees)
}

/// One tabulated degree of freedom: which Euler angle to read (axis within
/// the declared decomposition order) and its discomfort spline.
#[derive(Clone, Debug)]
pub struct DofTable<T> {
    pub axis: Axis,
    pub order: EulerOrder,
    pub spline: CubicSpline<T>,
}

/// Per-joint discomfort tables, keyed by node name.
#[derive(Clone, Debug, Default)]
pub struct DiscomfortTable<T> {
    joints: Vec<(String, Vec<DofTable<T>>)>,
}

/// Parser state for one table block: joint name, axis, order, knots and
/// the header's line number.
type TableBlock<T> = (String, Axis, EulerOrder, Vec<(T, T)>, usize);

impl<T: Real> DiscomfortTable<T> {
    pub fn new(joints: Vec<(String, Vec<DofTable<T>>)>) -> Self {
        DiscomfortTable { joints }
    }

    /// Parse a table file. Each block starts with
    /// `joint <name> <axis> <euler-order>` and is followed by `angle score`
    /// knot lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut joints: Vec<(String, Vec<DofTable<T>>)> = Vec::new();
        let mut current: Option<TableBlock<T>> = None;

        fn flush<T: Real>(
            joints: &mut Vec<(String, Vec<DofTable<T>>)>,
            block: Option<TableBlock<T>>,
        ) -> Result<()> {
            let Some((name, axis, order, knots, line)) = block else {
                return Ok(());
            };
            if knots.is_empty() {
                return Err(Error::parse(line, format!("joint `{name}` has no knots")));
            }
            let spline = CubicSpline::natural(&knots)?;
            let table = DofTable { axis, order, spline };
            match joints.iter_mut().find(|(n, _)| *n == name) {
                Some((_, dofs)) => dofs.push(table),
                None => joints.push((name, vec![table])),
            }
            Ok(())
        }

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "joint" {
                if fields.len() != 4 {
                    return Err(Error::parse(
                        line_no,
                        "expected `joint <name> <axis> <euler-order>`",
                    ));
                }
                flush(&mut joints, current.take())?;
                current = Some((
                    fields[1].to_string(),
                    Axis::parse(fields[2])
                        .map_err(|_| Error::parse(line_no, format!("bad axis `{}`", fields[2])))?,
                    EulerOrder::parse(fields[3])
                        .map_err(|_| Error::parse(line_no, format!("bad order `{}`", fields[3])))?,
                    Vec::new(),
                    line_no,
                ));
            } else {
                let Some((_, _, _, knots, _)) = current.as_mut() else {
                    return Err(Error::parse(line_no, "knot line before any `joint` header"));
                };
                if fields.len() != 2 {
                    return Err(Error::parse(line_no, "expected `angle score`"));
                }
                let angle: T = fields[0]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad angle `{}`", fields[0])))?;
                let score: T = fields[1]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad score `{}`", fields[1])))?;
                knots.push((angle, score));
            }
        }
        flush(&mut joints, current.take())?;
        Ok(DiscomfortTable { joints })
    }

    pub fn joints(&self) -> impl Iterator<Item = &str> {
        self.joints.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, joint: &str) -> Option<&[DofTable<T>]> {
        self.joints
            .iter()
            .find(|(n, _)| n == joint)
            .map(|(_, dofs)| dofs.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }
}

/// Sum of per-DoF discomforts for one joint, angles taken from its local
/// rotation via each table's declared Euler order.
pub fn joint_stress<T: Real>(
    local_rotations: &[Quat<T>],
    topology: &SkeletonTopology<T>,
    joint: &str,
    table: &DiscomfortTable<T>,
) -> Result<T> {
    let dofs = table
        .get(joint)
        .ok_or_else(|| Error::UnknownJoint(joint.to_string()))?;
    let node = topology.require(joint)?;
    let q = local_rotations
        .get(node)
        .copied()
        .ok_or(Error::NodeOutOfRange {
            index: node,
            count: local_rotations.len(),
        })?;
    let mut total = T::zero();
    for dof in dofs {
        let angles = euler_from_quaternion(q, dof.order);
        let position = dof
            .order
            .position(dof.axis)
            .expect("order contains every axis");
        total += dof_discomfort(angles[position], &dof.spline);
    }
    Ok(total)
}

/// Unweighted sum of joint stresses over every tabled joint.
pub fn postural_load<T: Real>(
    local_rotations: &[Quat<T>],
    topology: &SkeletonTopology<T>,
    table: &DiscomfortTable<T>,
) -> Result<T> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut total = T::zero();
    for joint in table.joints() {
        total += joint_stress(local_rotations, topology, joint, table)?;
    }
    Ok(total)
}

/// Sphere radius (mean end-effector distance from the center of mass) and
/// population-style deviation (denominator = effector count).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherenessSample<T> {
    pub radius: T,
    pub deviation: T,
}

pub fn sphereness<T: Real>(
    positions: &[Vec3<T>],
    end_effectors: &[usize],
    com: Vec3<T>,
) -> Result<SpherenessSample<T>> {
    if end_effectors.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut distances = Vec::with_capacity(end_effectors.len());
    for &e in end_effectors {
        let p = positions.get(e).copied().ok_or(Error::NodeOutOfRange {
            index: e,
            count: positions.len(),
        })?;
        distances.push((p - com).norm());
    }
    let count = T::of_usize(distances.len());
    let radius = distances.iter().fold(T::zero(), |a, d| a + *d) / count;
    let var = distances
        .iter()
        .fold(T::zero(), |a, d| a + (*d - radius) * (*d - radius))
        / count;
    Ok(SpherenessSample {
        radius,
        deviation: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_knot_constant() {
        let s = CubicSpline::natural(&[(0.0, 2.0)]).unwrap();
        assert_eq!(s.eval(-100.0), 2.0);
        assert_eq!(s.eval(0.0), 2.0);
        assert_eq!(s.eval(55.5), 2.0);
    }

    #[test]
    fn interpolates_through_knots() {
        let knots: [(f64, f64); 4] = [(-30.0, 1.0), (0.0, 0.0), (45.0, 2.5), (90.0, 6.0)];
        let s = CubicSpline::natural(&knots).unwrap();
        for (x, y) in knots {
            assert!((s.eval(x) - y).abs() < 1e-12, "knot at {x}");
        }
    }

    #[test]
    fn clamps_outside_range() {
        let s = CubicSpline::<f64>::natural(&[(0.0, 1.0), (10.0, 3.0)]).unwrap();
        assert_eq!(s.eval(-5.0), 1.0);
        assert_eq!(s.eval(20.0), 3.0);
        // Two knots interpolate linearly.
        assert!((s.eval(5.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn knot_validation() {
        assert!(matches!(
            CubicSpline::<f64>::natural(&[]),
            Err(Error::EmptyKnots)
        ));
        assert!(matches!(
            CubicSpline::natural(&[(0.0, 1.0), (0.0, 2.0)]),
            Err(Error::UnsortedKnots)
        ));
    }

    fn one_joint_topology() -> SkeletonTopology<f64> {
        SkeletonTopology::new(
            vec!["root".into(), "elbow".into()],
            vec![None, Some(0)],
            vec![Vec3::zero(), Vec3::new(0.3, 0.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn joint_stress_sums_dofs() {
        let topo = one_joint_topology();
        // Two DoFs with constant scores 1.5 and 2.5.
        let table = DiscomfortTable::new(vec![(
            "elbow".into(),
            vec![
                DofTable {
                    axis: Axis::X,
                    order: EulerOrder::ZXY,
                    spline: CubicSpline::natural(&[(0.0, 1.5)]).unwrap(),
                },
                DofTable {
                    axis: Axis::Z,
                    order: EulerOrder::ZXY,
                    spline: CubicSpline::natural(&[(0.0, 2.5)]).unwrap(),
                },
            ],
        )]);
        let rot = vec![Quat::identity(), Quat::identity()];
        let s = joint_stress(&rot, &topo, "elbow", &table).unwrap();
        assert_eq!(s, 4.0);
        assert_eq!(postural_load(&rot, &topo, &table).unwrap(), 4.0);
        assert!(matches!(
            joint_stress(&rot, &topo, "knee", &table),
            Err(Error::UnknownJoint(_))
        ));
    }

    #[test]
    fn stress_reads_declared_angle() {
        let topo = one_joint_topology();
        // Score equals the X angle itself (linear knots over the range).
        let table = DiscomfortTable::new(vec![(
            "elbow".into(),
            vec![DofTable {
                axis: Axis::X,
                order: EulerOrder::ZXY,
                spline: CubicSpline::natural(&[(-180.0, -180.0), (180.0, 180.0)]).unwrap(),
            }],
        )]);
        let rot = vec![Quat::identity(), Quat::from_axis_angle(Axis::X, 42.0)];
        let s = joint_stress(&rot, &topo, "elbow", &table).unwrap();
        assert!((s - 42.0).abs() < 1e-9);
    }

    #[test]
    fn empty_table_rejected() {
        let topo = one_joint_topology();
        let table = DiscomfortTable::<f64>::new(vec![]);
        assert!(matches!(
            postural_load(&[Quat::identity(), Quat::identity()], &topo, &table),
            Err(Error::EmptyTable)
        ));
    }

    #[test]
    fn table_file_round_trip() {
        let text = "
# elbow flexion
joint elbow X ZXY
-30 1.0
0 0.0
90 3.5

joint elbow Z ZXY
0 0.5
";
        let table = DiscomfortTable::<f64>::parse(text).unwrap();
        let dofs = table.get("elbow").unwrap();
        assert_eq!(dofs.len(), 2);
        assert_eq!(dofs[0].spline.knot_count(), 3);
        assert!(DiscomfortTable::<f64>::parse("0 1\n").is_err());
    }

    #[test]
    fn perfect_sphere() {
        let com = Vec3::<f64>::zero();
        let pts = vec![
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(-2.0, 0.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
            Vec3::new(0.0, -2.0, 0.0),
            Vec3::new(0.0, 0.0, 2.0),
        ];
        let s = sphereness(&pts, &[0, 1, 2, 3, 4], com).unwrap();
        assert_eq!(s.radius, 2.0);
        assert_eq!(s.deviation, 0.0);
    }

    #[test]
    fn known_distances() {
        let com = Vec3::<f64>::zero();
        let pts = vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(3.0, 0.0, 0.0),
        ];
        // Distances {1,1,1,1,3}: mean 1.4, population sd 0.8.
        let s = sphereness(&pts, &[0, 1, 2, 3, 4], com).unwrap();
        assert!((s.radius - 1.4).abs() < 1e-12);
        assert!((s.deviation - 0.8).abs() < 1e-12);
    }

    #[test]
    fn sphereness_bad_node() {
        assert!(matches!(
            sphereness(&[Vec3::<f64>::zero()], &[3], Vec3::zero()),
            Err(Error::NodeOutOfRange { .. })
        ));
    }
}
