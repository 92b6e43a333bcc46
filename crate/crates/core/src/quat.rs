//! Unit quaternions as SU(2), their action on the 2-sphere, and circle angles.
//!
//! `qrot(u, t) = cos t + sin t (u_x i + u_y j + u_z k)`. The induced rotation
//! of S² has angle `2t`; traces are `2w`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Algebraic tolerance: unit-norm drift allowed after construction.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Geometric tolerance: unit-axis checks, central-element detection.
pub const GEOMETRY_TOL: f64 = 1e-9;
/// A quaternion counts as lying on a circle subgroup when its imaginary part
/// is parallel to the axis within this distance.
pub const CIRCLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    x: f64,
    y: f64,
    z: f64,
}

/// Axis and quaternion angle `t ∈ [0, π]` of a unit quaternion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: SpherePoint,
    pub t: f64,
}

impl SpherePoint {
    /// Validates that `(x, y, z)` is unit within 1e-9, then renormalizes.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > GEOMETRY_TOL {
            return Err(Error::InvalidInput(format!(
                "axis ({x}, {y}, {z}) has norm {n}, expected 1"
            )));
        }
        Ok(Self::normalized(x, y, z))
    }

    fn normalized(x: f64, y: f64, z: f64) -> Self {
        let n = (x * x + y * y + z * z).sqrt();
        Self { x: x / n, y: y / n, z: z / n }
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || n < GEOMETRY_TOL {
            return Err(Error::InvalidInput("zero vector has no direction".into()));
        }
        Ok(Self::normalized(v[0], v[1], v[2]))
    }

    pub const E1: SpherePoint = SpherePoint { x: 1.0, y: 0.0, z: 0.0 };
    pub const E2: SpherePoint = SpherePoint { x: 0.0, y: 1.0, z: 0.0 };
    pub const E3: SpherePoint = SpherePoint { x: 0.0, y: 0.0, z: 1.0 };

    /// Point `(cos a, sin a, 0)` on the equator.
    pub fn equator(a: f64) -> Self {
        Self::normalized(a.cos(), a.sin(), 0.0)
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &SpherePoint) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint { x: -self.x, y: -self.y, z: -self.z }
    }

    /// Great-circle distance.
    pub fn arc_distance(&self, other: &SpherePoint) -> f64 {
        // atan2 form stays accurate near 0 and π
        let c = self.cross(other);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.9}, {:.9}, {:.9})", self.x, self.y, self.z)
    }
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Normalizes `(w, x, y, z)`. Fails on zero or non-finite input.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < GEOMETRY_TOL {
            return Err(Error::InvalidInput("zero quaternion".into()));
        }
        Ok(Self { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    fn renormalized(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self { w: w / n, x: x / n, y: y / n, z: z / n }
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn imag(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm_sq(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn inverse(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Hamilton product, renormalized.
    pub fn qmul(&self, b: &UnitQuaternion) -> Self {
        let a = self;
        Self::renormalized(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    /// Integer power by repeated multiplication (negative powers invert).
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { *self };
        (0..e.unsigned_abs()).fold(Self::IDENTITY, |acc, _| acc.qmul(&base))
    }

    pub fn conjugate_by(&self, g: &UnitQuaternion) -> Self {
        g.qmul(self).qmul(&g.inverse())
    }

    /// SU(2) trace, `2w`.
    pub fn trace(&self) -> f64 {
        2.0 * self.w
    }

    /// Euclidean distance in ℝ⁴.
    pub fn distance(&self, other: &UnitQuaternion) -> f64 {
        let d = [self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]).sqrt()
    }

    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&Self::IDENTITY)
    }

    fn imag_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_central(&self) -> bool {
        self.imag_norm() <= GEOMETRY_TOL
    }

    /// Image of `p` under the induced SO(3) rotation `p ↦ q p q⁻¹`.
    pub fn rotate(&self, p: &SpherePoint) -> SpherePoint {
        // v' = v + 2w (u × v) + 2 u × (u × v), u the imaginary part
        let u = [self.x, self.y, self.z];
        let v = p.coords();
        let c1 = cross3(u, v);
        let c2 = cross3(u, c1);
        let r = [
            v[0] + 2.0 * (self.w * c1[0] + c2[0]),
            v[1] + 2.0 * (self.w * c1[1] + c2[1]),
            v[2] + 2.0 * (self.w * c1[2] + c2[2]),
        ];
        SpherePoint::normalized(r[0], r[1], r[2])
    }

    /// Normalized imaginary part, sign as stored.
    pub fn axis(&self) -> Result<SpherePoint> {
        if self.is_central() {
            return Err(Error::CentralElement);
        }
        Ok(SpherePoint::normalized(self.x, self.y, self.z))
    }

    /// Axis and angle `t ∈ [0, π]` with `qrot(axis, t) = self`.
    pub fn axis_angle(&self) -> Result<AxisAngle> {
        let axis = self.axis()?;
        Ok(AxisAngle { axis, t: self.angle() })
    }

    /// Quaternion angle in `[0, π]`; conjugation invariant.
    pub fn angle(&self) -> f64 {
        self.imag_norm().atan2(self.w)
    }

    /// Principal `θ ∈ (−π, π]` with `self = cos θ + sin θ · axis`.
    pub fn circle_angle(&self, axis: &SpherePoint) -> Result<f64> {
        let along = self.x * axis.x + self.y * axis.y + self.z * axis.z;
        let perp = [self.x - along * axis.x, self.y - along * axis.y, self.z - along * axis.z];
        let deviation = (perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt();
        if deviation > CIRCLE_TOL {
            return Err(Error::OffCircle { deviation });
        }
        let theta = along.atan2(self.w);
        Ok(if theta <= -PI { theta + 2.0 * PI } else { theta })
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, rhs: UnitQuaternion) -> UnitQuaternion {
        self.qmul(&rhs)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.12}, {:.12}, {:.12}, {:.12})", self.w, self.x, self.y, self.z)
    }
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `cos t + sin t · axis`.
pub fn qrot(axis: &SpherePoint, t: f64) -> UnitQuaternion {
    let (s, c) = t.sin_cos();
    UnitQuaternion::renormalized(c, s * axis.x, s * axis.y, s * axis.z)
}

/// `‖a b a⁻¹ b⁻¹ − 1‖`; zero iff `a` and `b` commute.
pub fn commutator_distance(a: &UnitQuaternion, b: &UnitQuaternion) -> f64 {
    a.qmul(b).qmul(&a.inverse()).qmul(&b.inverse()).distance_to_identity()
}

/// Smallest distance of the commutator from ±1; zero iff the SO(3) images commute.
pub fn so3_commutator_distance(a: &UnitQuaternion, b: &UnitQuaternion) -> f64 {
    let c = a.qmul(b).qmul(&a.inverse()).qmul(&b.inverse());
    c.distance_to_identity().min(c.distance(&-UnitQuaternion::IDENTITY))
}

/// Shifts `raw` by a multiple of 2π to land nearest `prev`.
pub fn unwrap_near(prev: f64, raw: f64) -> f64 {
    let two_pi = 2.0 * PI;
    raw + two_pi * ((prev - raw) / two_pi).round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_quat(q: UnitQuaternion, expected: [f64; 4], tol: f64) {
        for (a, b) in q.coords().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = tol);
        }
    }

    fn arb_quat() -> impl Strategy<Value = UnitQuaternion> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
            .prop_map(|(w, x, y, z)| UnitQuaternion::new(w, x, y, z).unwrap())
    }

    fn arb_point() -> impl Strategy<Value = SpherePoint> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-3)
            .prop_map(|(x, y, z)| SpherePoint::from_vector([x, y, z]).unwrap())
    }

    #[test]
    fn qrot_examples() {
        assert_quat(qrot(&SpherePoint::E1, 0.0), [1.0, 0.0, 0.0, 0.0], 1e-15);
        let r = qrot(&SpherePoint::E1, PI / 3.0);
        assert_quat(r.pow(3), [-1.0, 0.0, 0.0, 0.0], 1e-12);
        assert_quat(qrot(&SpherePoint::E2, PI / 2.0), [0.0, 0.0, 1.0, 0.0], 1e-15);
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(matches!(SpherePoint::new(1.0, 1.0, 0.0), Err(Error::InvalidInput(_))));
        assert!(SpherePoint::new(1.0 + 1e-11, 0.0, 0.0).is_ok());
    }

    #[test]
    fn quaternion_table() {
        let i = qrot(&SpherePoint::E1, PI / 2.0);
        let j = qrot(&SpherePoint::E2, PI / 2.0);
        assert_quat(i * j, [0.0, 0.0, 0.0, 1.0], 1e-15);
        assert_quat(j * i, [0.0, 0.0, 0.0, -1.0], 1e-15);
    }

    #[test]
    fn traces() {
        assert_eq!(UnitQuaternion::IDENTITY.trace(), 2.0);
        assert_eq!((-UnitQuaternion::IDENTITY).trace(), -2.0);
        assert_abs_diff_eq!(qrot(&SpherePoint::E1, PI / 2.0).trace(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rotate_examples() {
        let p = SpherePoint::equator(0.7);
        assert!(UnitQuaternion::IDENTITY.rotate(&p).distance(&p) < 1e-15);
        let r = qrot(&SpherePoint::E3, PI / 2.0).rotate(&SpherePoint::E1);
        assert!(r.distance(&SpherePoint::E1.antipode()) < 1e-15);
    }

    #[test]
    fn axis_examples() {
        let a = qrot(&SpherePoint::E2, 0.3).axis().unwrap();
        assert!(a.distance(&SpherePoint::E2) < 1e-15);
        assert!(matches!(UnitQuaternion::IDENTITY.axis(), Err(Error::CentralElement)));
        let q = qrot(&SpherePoint::E1, PI / 2.0) * qrot(&SpherePoint::E1, PI / 4.0);
        assert!(q.axis().unwrap().distance(&SpherePoint::E1) < 1e-15);
        // stored sign is kept: angle past π flips the imaginary part
        let q = qrot(&SpherePoint::E1, 4.0);
        assert!(q.axis().unwrap().distance(&SpherePoint::E1.antipode()) < 1e-15);
    }

    #[test]
    fn circle_angle_examples() {
        let axis = SpherePoint::equator(1.1);
        assert_eq!(UnitQuaternion::IDENTITY.circle_angle(&axis).unwrap(), 0.0);
        let e1 = SpherePoint::E1;
        assert_abs_diff_eq!(qrot(&e1, 2.0).circle_angle(&e1).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(qrot(&e1, -2.0).circle_angle(&e1).unwrap(), -2.0, epsilon = 1e-14);
        assert_eq!((-UnitQuaternion::IDENTITY).circle_angle(&e1).unwrap(), PI);
        assert!(matches!(
            qrot(&SpherePoint::E2, 0.5).circle_angle(&e1),
            Err(Error::OffCircle { .. })
        ));
    }

    #[test]
    fn unwrap_near_picks_nearest_branch() {
        assert_abs_diff_eq!(unwrap_near(3.1, -3.1), 2.0 * PI - 3.1, epsilon = 1e-15);
        assert_abs_diff_eq!(unwrap_near(13.0, 0.5), 0.5 + 4.0 * PI, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_quat(), b in arb_quat(), c in arb_quat()) {
            prop_assert!((a * b * c).distance(&(a * (b * c))) < ALGEBRA_TOL);
            prop_assert!((a * a.inverse()).distance_to_identity() < ALGEBRA_TOL);
            prop_assert!((a * UnitQuaternion::IDENTITY).distance(&a) < ALGEBRA_TOL);
            prop_assert!(((a * b).norm_sq() - 1.0).abs() < ALGEBRA_TOL);
        }

        #[test]
        fn one_parameter_subgroup(u in arb_point(), s in -4.0f64..4.0, t in -4.0f64..4.0) {
            prop_assert!((qrot(&u, s) * qrot(&u, t)).distance(&qrot(&u, s + t)) < ALGEBRA_TOL);
        }

        #[test]
        fn rotate_is_homomorphism(a in arb_quat(), b in arb_quat(), p in arb_point()) {
            let lhs = (a * b).rotate(&p);
            let rhs = a.rotate(&b.rotate(&p));
            prop_assert!(lhs.distance(&rhs) < 1e-10);
        }

        #[test]
        fn trace_conjugation_invariant(q in arb_quat(), g in arb_quat()) {
            prop_assert!((q.conjugate_by(&g).trace() - q.trace()).abs() < ALGEBRA_TOL);
        }

        #[test]
        fn double_cover(u in arb_point(), t in -4.0f64..4.0, p in arb_point()) {
            let a = qrot(&u, t + PI);
            let b = -qrot(&u, t);
            prop_assert!(a.distance(&b) < ALGEBRA_TOL);
            prop_assert!(a.rotate(&p).distance(&qrot(&u, t).rotate(&p)) < 1e-10);
        }

        #[test]
        fn axis_is_fixed(q in arb_quat()) {
            prop_assume!(!q.is_central());
            let a = q.axis().unwrap();
            prop_assert!(q.rotate(&a).distance(&a) < 1e-10);
            prop_assert!(q.rotate(&a.antipode()).distance(&a.antipode()) < 1e-10);
        }

        #[test]
        fn axis_angle_round_trip(q in arb_quat()) {
            prop_assume!(!q.is_central());
            let aa = q.axis_angle().unwrap();
            prop_assert!((0.0..=PI).contains(&aa.t));
            prop_assert!(qrot(&aa.axis, aa.t).distance(&q) < 1e-10);
        }

        #[test]
        fn circle_angle_round_trip(u in arb_point(), t in -3.1f64..3.1) {
            let q = qrot(&u, t);
            let theta = q.circle_angle(&u).unwrap();
            prop_assert!((theta - t).abs() < 1e-9);
            prop_assert!(qrot(&u, theta).distance(&q) < 1e-9);
        }
    }
}
