//! Camera model, frame conventions, projection and bearing operations, rigid
//! transforms, absolute orientation, and the rotation-error metric.
//!
//! Conventions: 3D points are in meters, image positions in pixels. A
//! [`Pose`] maps points from frame `{p}` to frame `{q}` as `q = R p + t`.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use thiserror::Error;

/// 3D vector in meters (unitless when used as a direction).
pub type Vec3 = Vector3<f64>;
/// 3x3 real matrix.
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// Point lies on or behind the camera plane and cannot be projected.
    #[error("non-positive depth: z = {0}")]
    NonPositiveDepth(f64),
    /// Input points do not span enough directions to fix a rotation.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
}

/// 2D image position in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pixel {
    pub u: f64,
    pub v: f64,
}

impl Pixel {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn distance_squared(&self, other: &Pixel) -> f64 {
        let du = self.u - other.u;
        let dv = self.v - other.v;
        du * du + dv * dv
    }
}

/// Pinhole calibration matrix parameters for one camera.
///
/// The implied matrix is upper triangular:
/// ```text
/// K = [ fx  skew  cx ]
///     [  0   fy   cy ]
///     [  0    0    1 ]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub skew: f64,
}

impl CameraIntrinsics {
    /// Zero-skew intrinsics. Focal lengths must be positive.
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Self {
        assert!(fx > 0.0 && fy > 0.0, "focal lengths must be positive");
        Self {
            fx,
            fy,
            cx,
            cy,
            skew: 0.0,
        }
    }

    pub fn with_skew(mut self, skew: f64) -> Self {
        self.skew = skew;
        self
    }

    pub fn matrix(&self) -> Mat3 {
        Mat3::new(
            self.fx, self.skew, self.cx, //
            0.0, self.fy, self.cy, //
            0.0, 0.0, 1.0,
        )
    }
}

/// Unit direction from a camera's optical center toward an observed point.
#[derive(Debug, Clone, Copy)]
pub struct Bearing {
    dir: Vec3,
}

impl Bearing {
    /// Normalizes `v` to unit length. `v` must be nonzero and finite.
    pub fn new_normalize(v: Vec3) -> Self {
        let n = v.norm();
        assert!(n.is_finite() && n > 0.0, "bearing must be a nonzero vector");
        Self { dir: v / n }
    }

    pub fn dir(&self) -> Vec3 {
        self.dir
    }

    pub fn dot(&self, other: &Bearing) -> f64 {
        self.dir.dot(&other.dir)
    }

    /// The point at distance `s` along this bearing.
    pub fn scaled(&self, s: f64) -> Vec3 {
        self.dir * s
    }
}

/// Perspective projection of a camera-frame point through intrinsics `k`.
///
/// Applies the intrinsic map and divides by depth. Fails when the point is on
/// or behind the camera plane.
pub fn project(k: &CameraIntrinsics, point: &Vec3) -> Result<Pixel, GeometryError> {
    if point.z <= 0.0 {
        return Err(GeometryError::NonPositiveDepth(point.z));
    }
    let v = k.matrix() * point;
    Ok(Pixel::new(v.x / v.z, v.y / v.z))
}

/// Unit vector from the optical center through image position `px`.
///
/// Computes `K^-1 [u, v, 1]^T` normalized to unit length. The third component
/// of the unnormalized vector is exactly 1, so the result always points in
/// front of the camera.
pub fn bearing_from_pixel(k: &CameraIntrinsics, px: &Pixel) -> Bearing {
    let y = (px.v - k.cy) / k.fy;
    let x = (px.u - k.skew * y - k.cx) / k.fx;
    Bearing::new_normalize(Vec3::new(x, y, 1.0))
}

/// Rigid transform from frame `{p}` to frame `{q}`: `q = R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Pose {
    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Mat3::identity(), Vec3::zeros())
    }

    /// Applies the transform to a point: `R p + t`.
    pub fn transform(&self, point: &Vec3) -> Vec3 {
        self.rotation * point + self.translation
    }

    /// The inverse transform `(R^T, -R^T t)`.
    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose::new(rt, -(rt * self.translation))
    }

    /// Max absolute entry of `R^T R - I`; zero for an exact rotation.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.rotation.transpose() * self.rotation - Mat3::identity();
        d.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Checks orthonormality and `det = +1` to `tol` per entry.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.orthonormality_defect() <= tol
            && (self.rotation.determinant() - 1.0).abs() <= tol
            && self.translation.iter().all(|x| x.is_finite())
    }

    pub fn unit_quaternion(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(self.rotation))
    }
}

/// Least-squares rigid transform mapping `src` onto `dst`.
///
/// Centroid subtraction, 3x3 cross-covariance, SVD orthogonal factor with
/// determinant sign correction, so the result is always a proper rotation.
pub fn absolute_orientation(src: &[Vec3], dst: &[Vec3]) -> Result<Pose, GeometryError> {
    assert_eq!(src.len(), dst.len(), "point lists must have equal length");
    assert!(src.len() >= 3, "need at least three correspondences");
    let n = src.len() as f64;
    let centroid_src = src.iter().sum::<Vec3>() / n;
    let centroid_dst = dst.iter().sum::<Vec3>() / n;

    // Scatter of the centered source points; rank < 2 means collinear.
    let mut scatter = Mat3::zeros();
    let mut cross_cov = Mat3::zeros();
    for (s, d) in src.iter().zip(dst) {
        let sc = s - centroid_src;
        let dc = d - centroid_dst;
        scatter += sc * sc.transpose();
        cross_cov += sc * dc.transpose();
    }
    let mut eig = scatter.symmetric_eigenvalues();
    eig.as_mut_slice().sort_by(|a, b| b.total_cmp(a));
    if eig[1] <= 1e-10 * eig[0].max(f64::MIN_POSITIVE) {
        return Err(GeometryError::DegenerateConfiguration(
            "source points are collinear".to_string(),
        ));
    }

    let svd = cross_cov.svd(true, true);
    let u = svd.u.expect("svd of 3x3 always yields u");
    let v_t = svd.v_t.expect("svd of 3x3 always yields v_t");
    let mut rotation = (u * v_t).transpose();
    if rotation.determinant() < 0.0 {
        // Reflection case: flip the singular direction with the smallest value.
        let flip = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        rotation = v_t.transpose() * flip * u.transpose();
    }
    let translation = centroid_dst - rotation * centroid_src;
    Ok(Pose::new(rotation, translation))
}

/// Angle in degrees of the differential rotation between two rotation
/// matrices, from the trace of `R_gt^T R_est`. The arccos argument is clamped
/// to `[-1, 1]` before evaluation.
pub fn rotation_error_deg(r_gt: &Mat3, r_est: &Mat3) -> f64 {
    let d = r_gt.transpose() * r_est;
    let c = (d.trace() - 1.0) / 2.0;
    // The antisymmetric part carries sin(theta); atan2 of (sin, cos) stays
    // precise for small angles where acos of the clamped cosine floors out
    // near 1e-6 degrees.
    let s = Vector3::new(
        d[(2, 1)] - d[(1, 2)],
        d[(0, 2)] - d[(2, 0)],
        d[(1, 0)] - d[(0, 1)],
    )
    .norm()
        / 2.0;
    s.atan2(c).to_degrees()
}
