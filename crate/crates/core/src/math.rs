//! Small 3D primitives: vectors, unit quaternions, Euler-angle conversion.
//!
//! Quaternion component order is (w, x, y, z) everywhere.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Vec3<T>) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3<T>) -> Vec3<T> {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, k: T) -> Vec3<T> {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn component(self, axis: Axis) -> T {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Vec3<T>;
    fn add(self, o: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Vec3<T>;
    fn sub(self, o: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Vec3<T>;
    fn neg(self) -> Vec3<T> {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn parse(s: &str) -> Result<Axis> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(Error::InvalidAxisOrder(other.to_string())),
        }
    }
}

/// Intrinsic rotation order: `axes()[0]` is applied first (leftmost factor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EulerOrder([Axis; 3]);

impl EulerOrder {
    pub const XYZ: EulerOrder = EulerOrder([Axis::X, Axis::Y, Axis::Z]);
    pub const XZY: EulerOrder = EulerOrder([Axis::X, Axis::Z, Axis::Y]);
    pub const YXZ: EulerOrder = EulerOrder([Axis::Y, Axis::X, Axis::Z]);
    pub const YZX: EulerOrder = EulerOrder([Axis::Y, Axis::Z, Axis::X]);
    pub const ZXY: EulerOrder = EulerOrder([Axis::Z, Axis::X, Axis::Y]);
    pub const ZYX: EulerOrder = EulerOrder([Axis::Z, Axis::Y, Axis::X]);

    pub const ALL: [EulerOrder; 6] = [
        Self::XYZ,
        Self::XZY,
        Self::YXZ,
        Self::YZX,
        Self::ZXY,
        Self::ZYX,
    ];

    pub fn new(axes: [Axis; 3]) -> Result<EulerOrder> {
        let mut seen = [false; 3];
        for a in axes {
            if seen[a.index()] {
                let code: String = axes.iter().map(|a| a.letter()).collect();
                return Err(Error::InvalidAxisOrder(code));
            }
            seen[a.index()] = true;
        }
        Ok(EulerOrder(axes))
    }

    /// Parse a three-letter code such as `ZXY`.
    pub fn parse(code: &str) -> Result<EulerOrder> {
        let chars: Vec<char> = code.chars().collect();
        if chars.len() != 3 {
            return Err(Error::InvalidAxisOrder(code.to_string()));
        }
        let mut axes = [Axis::X; 3];
        for (i, c) in chars.iter().enumerate() {
            axes[i] = Axis::parse(&c.to_string())
                .map_err(|_| Error::InvalidAxisOrder(code.to_string()))?;
        }
        EulerOrder::new(axes).map_err(|_| Error::InvalidAxisOrder(code.to_string()))
    }

    pub fn axes(self) -> [Axis; 3] {
        self.0
    }

    pub fn code(self) -> String {
        self.0.iter().map(|a| a.letter()).collect()
    }

    /// +1 when the axis sequence is an even permutation of (X, Y, Z).
    fn parity(self) -> f64 {
        match (self.0[0].index() + 1) % 3 == self.0[1].index() {
            true => 1.0,
            false => -1.0,
        }
    }

    /// Position of `axis` within the order.
    pub fn position(self, axis: Axis) -> Option<usize> {
        self.0.iter().position(|a| *a == axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quat<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quat { w, x, y, z }
    }

    pub fn identity() -> Self {
        Quat::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn from_axis_angle(axis: Axis, degrees: T) -> Self {
        let half = degrees.to_radians() / T::of(2.0);
        let (s, c) = (half.sin(), half.cos());
        match axis {
            Axis::X => Quat::new(c, s, T::zero(), T::zero()),
            Axis::Y => Quat::new(c, T::zero(), s, T::zero()),
            Axis::Z => Quat::new(c, T::zero(), T::zero(), s),
        }
    }

    pub fn norm(self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Quat::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    /// Renormalize when within `tol` of unit norm; otherwise report corruption.
    pub fn checked_unit(self, tol: T) -> Result<Self> {
        let n = self.norm();
        if (n - T::one()).abs() > tol {
            return Err(Error::NonUnitQuaternion { norm: n.as_f64() });
        }
        Ok(self.normalized())
    }

    pub fn conjugate(self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(self, o: Quat<T>) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Rotate a vector: q v q*.
    pub fn rotate(self, v: Vec3<T>) -> Vec3<T> {
        let u = Vec3::new(self.x, self.y, self.z);
        let two = T::of(2.0);
        let t = u.cross(v).scale(two);
        v + t.scale(self.w) + u.cross(t)
    }

    /// Column-vector rotation matrix.
    pub fn to_matrix(self) -> [[T; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = T::of(2.0);
        [
            [
                T::one() - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                T::one() - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                T::one() - two * (x * x + y * y),
            ],
        ]
    }
}

impl<T: Real> Mul for Quat<T> {
    type Output = Quat<T>;
    fn mul(self, o: Quat<T>) -> Quat<T> {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Quaternion of the ordered product of per-axis rotations, angles in degrees.
pub fn euler_to_quaternion<T: Real>(degrees: [T; 3], order: EulerOrder) -> Quat<T> {
    let axes = order.axes();
    let q0 = Quat::from_axis_angle(axes[0], degrees[0]);
    let q1 = Quat::from_axis_angle(axes[1], degrees[1]);
    let q2 = Quat::from_axis_angle(axes[2], degrees[2]);
    q0 * q1 * q2
}

/// Decompose a rotation back into the given intrinsic order, angles in
/// degrees, middle angle in [-90, 90]. Inverse of [`euler_to_quaternion`]
/// away from gimbal lock.
pub fn euler_from_quaternion<T: Real>(q: Quat<T>, order: EulerOrder) -> [T; 3] {
    let m = q.to_matrix();
    let axes = order.axes();
    let (a, b, c) = (axes[0].index(), axes[1].index(), axes[2].index());
    let sigma = T::of(order.parity());

    let sin_mid = num_traits::clamp(sigma * m[a][c], -T::one(), T::one());
    let mid = sin_mid.asin();
    let (first, last) = if sin_mid.abs() < T::of(1.0 - 1e-12) {
        (
            (-sigma * m[b][c]).atan2(m[c][c]),
            (-sigma * m[a][b]).atan2(m[a][a]),
        )
    } else {
        // Gimbal lock: fold everything into the first angle.
        ((sigma * m[b][a]).atan2(m[b][b]), T::zero())
    };
    [first.to_degrees(), mid.to_degrees(), last.to_degrees()]
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn quat_close(a: Quat<f64>, b: Quat<f64>, tol: f64) -> bool {
        // Sign-insensitive: q and -q encode the same rotation.
        let d = a.dot(b).abs();
        (d - 1.0).abs() < tol
    }

    #[test]
    fn zero_angles_give_identity() {
        for order in EulerOrder::ALL {
            let q = euler_to_quaternion([0.0, 0.0, 0.0], order);
            assert_eq!(q, Quat::identity());
        }
    }

    #[test]
    fn ninety_about_z_half_angle() {
        let q = euler_to_quaternion([90.0, 0.0, 0.0], EulerOrder::ZXY);
        assert!((q.w - SQRT_HALF).abs() < 1e-12);
        assert!(q.x.abs() < 1e-12);
        assert!(q.y.abs() < 1e-12);
        assert!((q.z - SQRT_HALF).abs() < 1e-12);
    }

    #[test]
    fn rotate_unit_x_about_z() {
        let q = Quat::from_axis_angle(Axis::Z, 90.0f64);
        let v = q.rotate(Vec3::new(1.0, 0.0, 0.0));
        assert!((v.x).abs() < 1e-12);
        assert!((v.y - 1.0).abs() < 1e-12);
        assert!(v.z.abs() < 1e-12);
    }

    #[test]
    fn matrix_oracle_matches_quaternion_product() {
        // Chain per-axis rotation matrices independently and compare the
        // rotated basis against the quaternion product path.
        fn axis_matrix(axis: Axis, deg: f64) -> [[f64; 3]; 3] {
            let (s, c) = deg.to_radians().sin_cos();
            match axis {
                Axis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
                Axis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
                Axis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            }
        }
        fn mat_mul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
            let mut out = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for (k, bk) in b.iter().enumerate() {
                        out[i][j] += a[i][k] * bk[j];
                    }
                }
            }
            out
        }

        let angles = [33.0, -71.5, 140.25];
        for order in EulerOrder::ALL {
            let axes = order.axes();
            let m = mat_mul(
                mat_mul(axis_matrix(axes[0], angles[0]), axis_matrix(axes[1], angles[1])),
                axis_matrix(axes[2], angles[2]),
            );
            let q = euler_to_quaternion(angles, order);
            let qm = q.to_matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (m[i][j] - qm[i][j]).abs() < 1e-9,
                        "order {} cell ({i},{j})",
                        order.code()
                    );
                }
            }
        }
    }

    #[test]
    fn euler_round_trip_all_orders() {
        let cases = [
            [12.0, 34.0, -56.0],
            [-120.0, 45.0, 170.0],
            [5.0, -80.0, 5.0],
            [179.0, 0.5, -179.0],
        ];
        for order in EulerOrder::ALL {
            for angles in cases {
                let q = euler_to_quaternion(angles, order);
                let back = euler_from_quaternion(q, order);
                let q2 = euler_to_quaternion(back, order);
                assert!(
                    quat_close(q, q2, 1e-9),
                    "order {} angles {angles:?} -> {back:?}",
                    order.code()
                );
            }
        }
    }

    #[test]
    fn bad_axis_orders_rejected() {
        assert!(EulerOrder::parse("ZZY").is_err());
        assert!(EulerOrder::parse("ABC").is_err());
        assert!(EulerOrder::parse("XY").is_err());
        assert!(EulerOrder::new([Axis::X, Axis::X, Axis::Y]).is_err());
    }
}
