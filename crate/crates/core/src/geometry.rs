//! Ground-plane geometry shared by the balance and space features:
//! projection, convex hull (monotone chain), polygon area (shoelace),
//! perimeter, point-in-polygon. Coordinates must be finite.

use crate::math::{Axis, Vec3};
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundPoint<T> {
    pub u: T,
    pub v: T,
}

impl<T: Real> GroundPoint<T> {
    pub fn new(u: T, v: T) -> Self {
        GroundPoint { u, v }
    }

    pub fn distance(self, o: GroundPoint<T>) -> T {
        let du = self.u - o.u;
        let dv = self.v - o.v;
        (du * du + dv * dv).sqrt()
    }
}

/// Drop the up coordinate, preserving order. The remaining two coordinates
/// keep their (x, y, z) relative order.
pub fn project_to_ground<T: Real>(points: &[Vec3<T>], up: Axis) -> Vec<GroundPoint<T>> {
    points.iter().map(|p| project_point(*p, up)).collect()
}

pub fn project_point<T: Real>(p: Vec3<T>, up: Axis) -> GroundPoint<T> {
    match up {
        Axis::X => GroundPoint::new(p.y, p.z),
        Axis::Y => GroundPoint::new(p.x, p.z),
        Axis::Z => GroundPoint::new(p.x, p.y),
    }
}

/// Twice the signed area of (o, a, b); positive for a left turn.
fn cross<T: Real>(o: GroundPoint<T>, a: GroundPoint<T>, b: GroundPoint<T>) -> T {
    (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u)
}

/// Minimal convex hull, counter-clockwise, collinear interior points
/// excluded. Fewer than 3 distinct input points come back as-is (sorted).
pub fn convex_hull<T: Real>(points: &[GroundPoint<T>]) -> Vec<GroundPoint<T>> {
    let mut pts: Vec<GroundPoint<T>> = points.to_vec();
    pts.sort_by(|a, b| {
        a.u.partial_cmp(&b.u)
            .expect("finite coordinates")
            .then(a.v.partial_cmp(&b.v).expect("finite coordinates"))
    });
    pts.dedup_by(|a, b| a.u == b.u && a.v == b.v);
    if pts.len() < 3 {
        return pts;
    }

    let mut lower: Vec<GroundPoint<T>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero()
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<GroundPoint<T>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero()
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area, orientation-insensitive. Fewer than 3 vertices give 0.
pub fn polygon_area<T: Real>(hull: &[GroundPoint<T>]) -> T {
    if hull.len() < 3 {
        return T::zero();
    }
    let mut twice = T::zero();
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        twice += a.u * b.v - b.u * a.v;
    }
    twice.abs() / T::of(2.0)
}

/// Sum of consecutive edge lengths including the closing edge. Fewer than
/// 2 points give 0.
pub fn hull_perimeter<T: Real>(hull: &[GroundPoint<T>]) -> T {
    if hull.len() < 2 {
        return T::zero();
    }
    let mut total = T::zero();
    for i in 0..hull.len() {
        total += hull[i].distance(hull[(i + 1) % hull.len()]);
    }
    total
}

/// Closed-polygon membership: boundary counts as inside. `hull` must be a
/// [`convex_hull`] output (counter-clockwise, minimal).
pub fn point_in_convex_polygon<T: Real>(p: GroundPoint<T>, hull: &[GroundPoint<T>]) -> bool {
    match hull.len() {
        0 => false,
        1 => p.u == hull[0].u && p.v == hull[0].v,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            if cross(a, b, p) != T::zero() {
                return false;
            }
            let t = (p.u - a.u) * (b.u - a.u) + (p.v - a.v) * (b.v - a.v);
            t >= T::zero() && t <= (b.u - a.u) * (b.u - a.u) + (b.v - a.v) * (b.v - a.v)
        }
        n => {
            for i in 0..n {
                if cross(hull[i], hull[(i + 1) % n], p) < T::zero() {
                    return false;
                }
            }
            true
        }
    }
}
