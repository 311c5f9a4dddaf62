//! Rigid transforms and the invertible pose encodings used by the pairwise models.
//!
//! Every pose stores a unit quaternion in the `w >= 0` hemisphere together with a
//! translation in meters. Encodings always place the translation (or the se(3)
//! translational part) first and the rotation block last:
//!
//! | encoding    | layout                         | length |
//! |-------------|--------------------------------|--------|
//! | `Quat`      | `[x, y, z, qw, qx, qy, qz]`    | 7      |
//! | `AxisAngle` | `[x, y, z, rx, ry, rz]`        | 6      |
//! | `Euler`     | `[x, y, z, roll, pitch, yaw]`  | 6      |
//! | `Se3Log`    | `[rho_x, rho_y, rho_z, wx, wy, wz]` | 6 |
//!
//! Euler angles follow the intrinsic X-Y-Z convention, `R = Rx(roll) * Ry(pitch) * Rz(yaw)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this rotation angle the exponential and logarithm maps use Taylor expansions.
pub const SMALL_ANGLE: f64 = 1e-8;

/// Pitch values closer than this to +-pi/2 are rejected by the Euler encoding.
pub const GIMBAL_MARGIN: f64 = 1e-6;

/// A rigid transform in SE(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    rotation: UnitQuaternion<f64>,
    translation: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Builds a pose, re-normalizing the rotation and moving it to the `w >= 0` hemisphere.
    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation: canonical_quat(rotation.into_inner()),
            translation,
        }
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(UnitQuaternion::identity(), Vector3::new(x, y, z))
    }

    pub fn from_rotation(rotation: UnitQuaternion<f64>) -> Self {
        Self::new(rotation, Vector3::zeros())
    }

    /// Rotation about `axis` by `angle` radians, no translation.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        Self::from_rotation(so3_exp(&(axis.normalize() * angle)))
    }

    /// Builds a pose from a `[w, x, y, z]` quaternion that need not be normalized.
    pub fn from_parts(quat_wxyz: [f64; 4], translation: [f64; 3]) -> Result<Self> {
        let q = Quaternion::new(quat_wxyz[0], quat_wxyz[1], quat_wxyz[2], quat_wxyz[3]);
        let norm = q.norm();
        if !(norm >= 1e-6) {
            return Err(Error::DegenerateQuaternion { norm });
        }
        Ok(Self {
            rotation: canonical_quat(q),
            translation: Vector3::from(translation),
        })
    }

    pub fn rotation(&self) -> &UnitQuaternion<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Quaternion as `[w, x, y, z]`.
    pub fn quat_wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn translation_array(&self) -> [f64; 3] {
        [self.translation.x, self.translation.y, self.translation.z]
    }

    pub fn with_translation(&self, translation: Vector3<f64>) -> Self {
        Self {
            rotation: self.rotation,
            translation,
        }
    }

    /// `self * other`: the frame `other` expressed through `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: canonical_quat((self.rotation * other.rotation).into_inner()),
            translation: self.translation + self.rotation * other.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.rotation.inverse();
        Pose {
            rotation: canonical_quat(inv.into_inner()),
            translation: -(inv * self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    /// Rotation angle in radians, in `[0, pi]`.
    pub fn rotation_angle(&self) -> f64 {
        let q = self.rotation.quaternion();
        2.0 * q.imag().norm().atan2(q.w.abs())
    }

    pub fn encode(&self, kind: EncodingKind) -> Result<PoseVector> {
        encode(self, kind)
    }
}

/// `a * b`.
pub fn compose(a: &Pose, b: &Pose) -> Pose {
    a.compose(b)
}

pub fn invert(p: &Pose) -> Pose {
    p.inverse()
}

fn canonical_quat(q: Quaternion<f64>) -> UnitQuaternion<f64> {
    let q = if q.w < 0.0 { -q } else { q };
    UnitQuaternion::new_normalize(q)
}

/// Skew-symmetric matrix of `v`.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rotation vector to unit quaternion.
pub fn so3_exp(omega: &Vector3<f64>) -> UnitQuaternion<f64> {
    let theta2 = omega.norm_squared();
    let theta = theta2.sqrt();
    let (w, k) = if theta < SMALL_ANGLE {
        (1.0 - theta2 / 8.0, 0.5 - theta2 / 48.0)
    } else {
        let half = 0.5 * theta;
        (half.cos(), half.sin() / theta)
    };
    canonical_quat(Quaternion::new(w, k * omega.x, k * omega.y, k * omega.z))
}

/// Unit quaternion to rotation vector with angle in `[0, pi]`.
pub fn so3_log(q: &UnitQuaternion<f64>) -> Vector3<f64> {
    let q = q.quaternion();
    let (w, v) = if q.w < 0.0 { (-q.w, -q.imag()) } else { (q.w, q.imag()) };
    let n = v.norm();
    let theta = 2.0 * n.atan2(w);
    if theta < SMALL_ANGLE {
        // theta / n = 2 / w * (1 - n^2 / (3 w^2)) + O(n^4)
        v * (2.0 / w) * (1.0 - n * n / (3.0 * w * w))
    } else {
        v * (theta / n)
    }
}

/// Left Jacobian `V` of SO(3), mapping se(3) translation to SE(3) translation.
fn so3_left_jacobian(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = omega.norm_squared();
    let theta = theta2.sqrt();
    let w = hat(omega);
    let (b, c) = if theta < SMALL_ANGLE {
        (0.5 - theta2 / 24.0, 1.0 / 6.0 - theta2 / 120.0)
    } else {
        let s = (0.5 * theta).sin();
        ((2.0 * s * s) / theta2, (theta - theta.sin()) / (theta2 * theta))
    };
    Matrix3::identity() + w * b + w * w * c
}

fn so3_left_jacobian_inv(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = omega.norm_squared();
    let theta = theta2.sqrt();
    let w = hat(omega);
    let c = if theta < SMALL_ANGLE {
        1.0 / 12.0 + theta2 / 720.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half * half.cos() / half.sin()) / theta2
    };
    Matrix3::identity() - w * 0.5 + w * w * c
}

/// Pose to se(3) coordinates `(rho, omega)`.
pub fn se3_log(p: &Pose) -> (Vector3<f64>, Vector3<f64>) {
    let omega = so3_log(&p.rotation);
    let rho = so3_left_jacobian_inv(&omega) * p.translation;
    (rho, omega)
}

pub fn se3_exp(rho: &Vector3<f64>, omega: &Vector3<f64>) -> Pose {
    Pose::new(so3_exp(omega), so3_left_jacobian(omega) * rho)
}

/// Intrinsic XYZ Euler angles `(roll, pitch, yaw)` without the singularity check.
fn euler_xyz(q: &UnitQuaternion<f64>) -> [f64; 3] {
    let r = q.to_rotation_matrix().into_inner();
    let pitch = r[(0, 2)].atan2((r[(0, 0)] * r[(0, 0)] + r[(0, 1)] * r[(0, 1)]).sqrt());
    let roll = (-r[(1, 2)]).atan2(r[(2, 2)]);
    let yaw = (-r[(0, 1)]).atan2(r[(0, 0)]);
    [roll, pitch, yaw]
}

fn from_euler_xyz(roll: f64, pitch: f64, yaw: f64) -> UnitQuaternion<f64> {
    let qx = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), roll);
    let qy = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), pitch);
    let qz = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw);
    qx * qy * qz
}

/// Rotation built from intrinsic XYZ Euler angles.
pub fn rotation_from_euler(roll: f64, pitch: f64, yaw: f64) -> UnitQuaternion<f64> {
    canonical_quat(from_euler_xyz(roll, pitch, yaw).into_inner())
}

/// Invertible pose-to-vector maps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingKind {
    Quat,
    #[default]
    AxisAngle,
    Euler,
    Se3Log,
    /// Per-relation choice among the other four, resolved when a distribution is fitted.
    Mix,
}

impl EncodingKind {
    /// The concrete encodings in tie-break order.
    pub const CONCRETE: [EncodingKind; 4] = [
        EncodingKind::AxisAngle,
        EncodingKind::Se3Log,
        EncodingKind::Euler,
        EncodingKind::Quat,
    ];

    /// Vector length, `None` for `Mix`.
    pub fn dim(self) -> Option<usize> {
        match self {
            EncodingKind::Quat => Some(7),
            EncodingKind::AxisAngle | EncodingKind::Euler | EncodingKind::Se3Log => Some(6),
            EncodingKind::Mix => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            EncodingKind::Quat => "quat",
            EncodingKind::AxisAngle => "aa",
            EncodingKind::Euler => "euler",
            EncodingKind::Se3Log => "se3",
            EncodingKind::Mix => "mix",
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quat" => Ok(EncodingKind::Quat),
            "aa" | "axis_angle" | "axisangle" => Ok(EncodingKind::AxisAngle),
            "euler" => Ok(EncodingKind::Euler),
            "se3" | "se3_log" | "se3log" => Ok(EncodingKind::Se3Log),
            "mix" => Ok(EncodingKind::Mix),
            other => Err(Error::InvalidInput(format!("unknown encoding `{other}`"))),
        }
    }
}

/// An encoded pose. Stored inline; only the first `dim()` values are meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoseVector {
    kind: EncodingKind,
    values: [f64; 7],
}

impl PoseVector {
    pub fn new(kind: EncodingKind, values: &[f64]) -> Result<Self> {
        let dim = kind
            .dim()
            .ok_or_else(|| Error::InvalidInput("a pose vector cannot use the mix encoding".into()))?;
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        let mut buf = [0.0; 7];
        buf[..dim].copy_from_slice(values);
        Ok(Self { kind, values: buf })
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.dim()]
    }

    pub fn dim(&self) -> usize {
        // kind is never Mix
        self.kind.dim().unwrap_or(7)
    }

    pub fn decode(&self) -> Result<Pose> {
        decode(self)
    }
}

/// Encodes without the Euler singularity check. Used when scoring candidates,
/// where a value is always needed.
pub(crate) fn encode_into(p: &Pose, kind: EncodingKind, out: &mut [f64; 7]) {
    let t = p.translation;
    match kind {
        EncodingKind::Quat => {
            out[..3].copy_from_slice(t.as_slice());
            let q = p.rotation.quaternion();
            out[3] = q.w;
            out[4] = q.i;
            out[5] = q.j;
            out[6] = q.k;
        }
        EncodingKind::AxisAngle | EncodingKind::Mix => {
            out[..3].copy_from_slice(t.as_slice());
            let r = so3_log(&p.rotation);
            out[3..6].copy_from_slice(r.as_slice());
        }
        EncodingKind::Euler => {
            out[..3].copy_from_slice(t.as_slice());
            out[3..6].copy_from_slice(&euler_xyz(&p.rotation));
        }
        EncodingKind::Se3Log => {
            let (rho, omega) = se3_log(p);
            out[..3].copy_from_slice(rho.as_slice());
            out[3..6].copy_from_slice(omega.as_slice());
        }
    }
}

pub fn encode(p: &Pose, kind: EncodingKind) -> Result<PoseVector> {
    if kind == EncodingKind::Mix {
        return Err(Error::InvalidInput(
            "mix must be resolved to a concrete encoding before encoding".into(),
        ));
    }
    let mut values = [0.0; 7];
    encode_into(p, kind, &mut values);
    if kind == EncodingKind::Euler && (values[4].abs() > std::f64::consts::FRAC_PI_2 - GIMBAL_MARGIN) {
        return Err(Error::GimbalLock { pitch: values[4] });
    }
    Ok(PoseVector { kind, values })
}

pub(crate) fn decode_slice(kind: EncodingKind, v: &[f64]) -> Result<Pose> {
    let t = Vector3::new(v[0], v[1], v[2]);
    match kind {
        EncodingKind::Quat => Pose::from_parts([v[3], v[4], v[5], v[6]], [v[0], v[1], v[2]]),
        EncodingKind::AxisAngle => Ok(Pose::new(so3_exp(&Vector3::new(v[3], v[4], v[5])), t)),
        EncodingKind::Euler => Ok(Pose::new(from_euler_xyz(v[3], v[4], v[5]), t)),
        EncodingKind::Se3Log => Ok(se3_exp(&t, &Vector3::new(v[3], v[4], v[5]))),
        EncodingKind::Mix => Err(Error::InvalidInput("cannot decode a mix vector".into())),
    }
}

pub fn decode(v: &PoseVector) -> Result<Pose> {
    decode_slice(v.kind, v.as_slice())
}

/// Geodesic distance between the rotations of `a` and `b`, in degrees within `[0, 180]`.
pub fn geodesic_angle_deg(a: &Pose, b: &Pose) -> f64 {
    let qa = a.rotation.quaternion().coords;
    let qb = b.rotation.quaternion().coords;
    let qb = if qa.dot(&qb) < 0.0 { -qb } else { qb };
    // Chordal form: exact zero for equal inputs and symmetric in its arguments.
    (4.0 * (qa - qb).norm().atan2((qa + qb).norm())).to_degrees()
}

/// Wire form: translation `[x, y, z]` meters and quaternion `[w, x, y, z]`.
#[derive(Serialize, Deserialize)]
struct PoseRepr {
    translation: [f64; 3],
    rotation: [f64; 4],
}

impl Serialize for Pose {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoseRepr {
            translation: self.translation_array(),
            rotation: self.quat_wxyz(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PoseRepr::deserialize(d)?;
        let [w, x, y, z] = repr.rotation;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if (norm - 1.0).abs() <= 1e-9 && w >= 0.0 {
            // Already canonical: keep the stored bits.
            return Ok(Pose {
                rotation: UnitQuaternion::new_unchecked(q),
                translation: Vector3::from(repr.translation),
            });
        }
        Pose::from_parts(repr.rotation, repr.translation).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::Rng;

    pub fn random_pose<R: Rng>(rng: &mut R, translation_range: f64) -> Pose {
        let q = Quaternion::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let t = Vector3::new(
            rng.random_range(-translation_range..translation_range),
            rng.random_range(-translation_range..translation_range),
            rng.random_range(-translation_range..translation_range),
        );
        Pose::new(UnitQuaternion::new_normalize(q), t)
    }

    pub fn pose_distance(a: &Pose, b: &Pose) -> (f64, f64) {
        let angle = {
            let d = a.rotation().inverse() * b.rotation();
            let q = d.quaternion();
            2.0 * q.imag().norm().atan2(q.w.abs())
        };
        ((a.translation() - b.translation()).norm(), angle)
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_pose_eq(a: &Pose, b: &Pose, tol: f64) {
        let (dt, dr) = pose_distance(a, b);
        assert!(dt <= tol && dr <= tol, "poses differ: dt={dt:e}, dr={dr:e}");
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_pose(&mut rng, 3.0);
        assert_pose_eq(&Pose::identity().compose(&p), &p, 1e-15);
        assert_pose_eq(&p.compose(&p.inverse()), &Pose::identity(), 1e-12);
    }

    #[test]
    fn compose_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a = random_pose(&mut rng, 2.0);
            let b = random_pose(&mut rng, 2.0);
            let c = random_pose(&mut rng, 2.0);
            assert_pose_eq(&a.compose(&b).compose(&c), &a.compose(&b.compose(&c)), 1e-12);
        }
    }

    #[test]
    fn inversion() {
        assert_eq!(Pose::identity().inverse(), Pose::identity());
        let t = Pose::from_translation(1.0, 2.0, 3.0).inverse();
        assert_eq!(t.translation(), &Vector3::new(-1.0, -2.0, -3.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = random_pose(&mut rng, 5.0);
            assert_pose_eq(&p.inverse().inverse(), &p, 1e-12);
            assert_pose_eq(&p.inverse().compose(&p), &Pose::identity(), 1e-12);
        }
    }

    #[test]
    fn quaternion_stays_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut p = Pose::identity();
        for _ in 0..1000 {
            p = p.compose(&random_pose(&mut rng, 1.0));
            let q = p.quat_wxyz();
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
            assert!(q[0] >= 0.0);
        }
    }

    #[test]
    fn encode_examples() {
        let v = encode(&Pose::identity(), EncodingKind::AxisAngle).unwrap();
        assert_eq!(v.as_slice(), &[0.0; 6]);

        let v = encode(&Pose::from_translation(1.0, 0.0, 0.0), EncodingKind::Se3Log).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let z90 = Pose::from_axis_angle(&Vector3::z(), FRAC_PI_2);
        let v = encode(&z90, EncodingKind::AxisAngle).unwrap();
        let expected = [0.0, 0.0, 0.0, 0.0, 0.0, FRAC_PI_2];
        for (a, b) in v.as_slice().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn decode_examples() {
        let v = PoseVector::new(EncodingKind::AxisAngle, &[0.0; 6]).unwrap();
        assert_eq!(decode(&v).unwrap(), Pose::identity());

        // Non-unit quaternion block is projected onto the unit sphere.
        let v = PoseVector::new(EncodingKind::Quat, &[0.1, 0.2, 0.3, 2.0, 0.0, 0.0, 0.0]).unwrap();
        let p = decode(&v).unwrap();
        assert_eq!(p.quat_wxyz(), [1.0, 0.0, 0.0, 0.0]);

        let v = PoseVector::new(EncodingKind::Quat, &[0.0, 0.0, 0.0, 1e-9, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(decode(&v), Err(Error::DegenerateQuaternion { .. })));

        assert!(matches!(
            PoseVector::new(EncodingKind::AxisAngle, &[0.0; 7]),
            Err(Error::DimensionMismatch { expected: 6, found: 7 })
        ));
    }

    #[test]
    fn round_trip_all_encodings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let p = random_pose(&mut rng, 3.0);
            for kind in EncodingKind::CONCRETE {
                match encode(&p, kind) {
                    Ok(v) => {
                        let back = decode(&v).unwrap();
                        let (dt, dr) = pose_distance(&p, &back);
                        worst = worst.max(dt).max(dr);
                    }
                    Err(Error::GimbalLock { .. }) => assert_eq!(kind, EncodingKind::Euler),
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(worst < 1e-9, "worst round-trip error {worst:e}");
    }

    #[test]
    fn euler_convention_is_intrinsic_xyz() {
        let (roll, pitch, yaw) = (0.3, -0.4, 1.1);
        let q = rotation_from_euler(roll, pitch, yaw);
        let rx = nalgebra::Rotation3::from_axis_angle(&Vector3::x_axis(), roll);
        let ry = nalgebra::Rotation3::from_axis_angle(&Vector3::y_axis(), pitch);
        let rz = nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), yaw);
        let expected = (rx * ry * rz).into_inner();
        assert_abs_diff_eq!(q.to_rotation_matrix().into_inner(), expected, epsilon = 1e-14);
        let v = encode(&Pose::from_rotation(q), EncodingKind::Euler).unwrap();
        assert_abs_diff_eq!(v.as_slice()[3], roll, epsilon = 1e-14);
        assert_abs_diff_eq!(v.as_slice()[4], pitch, epsilon = 1e-14);
        assert_abs_diff_eq!(v.as_slice()[5], yaw, epsilon = 1e-14);
    }

    #[test]
    fn euler_gimbal_lock() {
        let p = Pose::from_rotation(rotation_from_euler(0.2, FRAC_PI_2, 0.1));
        assert!(matches!(encode(&p, EncodingKind::Euler), Err(Error::GimbalLock { .. })));
        let p = Pose::from_rotation(rotation_from_euler(0.2, FRAC_PI_2 - 2e-3, 0.1));
        let back = decode(&encode(&p, EncodingKind::Euler).unwrap()).unwrap();
        assert_pose_eq(&p, &back, 1e-9);
    }

    #[test]
    fn small_angle_logs_are_finite() {
        for angle in [0.0, 1e-300, 1e-12, 1e-9, 5e-9, 2e-8, 1e-6] {
            let p = Pose::new(
                so3_exp(&(Vector3::new(0.3, -0.5, 0.8).normalize() * angle)),
                Vector3::new(0.5, -1.0, 2.0),
            );
            let (rho, omega) = se3_log(&p);
            assert!(rho.iter().chain(omega.iter()).all(|x| x.is_finite()));
            assert_abs_diff_eq!(omega.norm(), angle, epsilon = 1e-15);
            assert_abs_diff_eq!(rho, p.translation().clone(), epsilon = 1e-6);
            assert_pose_eq(&se3_exp(&rho, &omega), &p, 1e-12);
        }
    }

    #[test]
    fn hemisphere_is_canonical() {
        let q = Quaternion::new(0.3, 0.5, -0.2, 0.7);
        let a = Pose::new(UnitQuaternion::new_normalize(q), Vector3::new(1.0, 2.0, 3.0));
        let b = Pose::new(UnitQuaternion::new_normalize(-q), Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(
            encode(&a, EncodingKind::Quat).unwrap(),
            encode(&b, EncodingKind::Quat).unwrap()
        );
    }

    #[test]
    fn geodesic_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_pose(&mut rng, 1.0);
        assert_eq!(geodesic_angle_deg(&a, &a), 0.0);
        for axis in [Vector3::x(), Vector3::new(1.0, 1.0, -2.0), Vector3::z()] {
            let b = a.compose(&Pose::from_axis_angle(&axis, FRAC_PI_2));
            assert_abs_diff_eq!(geodesic_angle_deg(&a, &b), 90.0, epsilon = 1e-9);
        }
        let flip = a.compose(&Pose::from_axis_angle(&Vector3::y(), PI));
        assert_abs_diff_eq!(geodesic_angle_deg(&a, &flip), 180.0, epsilon = 1e-9);
    }

    #[test]
    fn geodesic_matches_quaternion_dot_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = random_pose(&mut rng, 1.0);
            let b = random_pose(&mut rng, 1.0);
            let qa = a.quat_wxyz();
            let qb = b.quat_wxyz();
            let dot: f64 = qa.iter().zip(qb.iter()).map(|(x, y)| x * y).sum();
            let oracle = (2.0 * dot.abs().min(1.0).acos()).to_degrees();
            assert_abs_diff_eq!(geodesic_angle_deg(&a, &b), oracle, epsilon = 1e-9);
            assert_eq!(geodesic_angle_deg(&a, &b), geodesic_angle_deg(&b, &a));
        }
    }

    #[test]
    fn geodesic_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let a = random_pose(&mut rng, 1.0);
            let b = random_pose(&mut rng, 1.0);
            let c = random_pose(&mut rng, 1.0);
            let ab = geodesic_angle_deg(&a, &b);
            let bc = geodesic_angle_deg(&b, &c);
            let ac = geodesic_angle_deg(&a, &c);
            assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = random_pose(&mut rng, 10.0);
            let s = serde_json::to_string(&p).unwrap();
            let back: Pose = serde_json::from_str(&s).unwrap();
            assert_eq!(p, back);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_pose() -> impl Strategy<Value = Pose> {
            (
                prop::array::uniform4(-1.0f64..1.0),
                prop::array::uniform3(-10.0f64..10.0),
            )
                .prop_filter_map("degenerate quaternion", |(q, t)| Pose::from_parts(q, t).ok())
        }

        proptest! {
            #[test]
            fn round_trip(p in arb_pose()) {
                for kind in [EncodingKind::Quat, EncodingKind::AxisAngle, EncodingKind::Se3Log] {
                    let back = decode(&encode(&p, kind).unwrap()).unwrap();
                    let (dt, dr) = pose_distance(&p, &back);
                    prop_assert!(dt < 1e-9 && dr < 1e-9);
                }
                let [roll, pitch, yaw] = euler_xyz(p.rotation());
                if pitch.abs() < FRAC_PI_2 - 1e-3 {
                    let back = decode(&encode(&p, EncodingKind::Euler).unwrap()).unwrap();
                    let (dt, dr) = pose_distance(&p, &back);
                    prop_assert!(dt < 1e-9 && dr < 1e-9, "{roll} {pitch} {yaw}");
                }
            }
        }
    }
}
