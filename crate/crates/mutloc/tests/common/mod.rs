//! Shared oracles for the acceptance suite: an exact rational-arithmetic
//! Sylvester determinant (checked against the numeric resultants) and a
//! brute-force reprojection-cost minimizer (checked against the algebraic
//! pose). Both are written independently of the library's elimination code
//! so they can disagree with it.

#![allow(dead_code)]

use mutloc::geometry::{bearing_from_pixel, CameraIntrinsics, Pose, Vec3};
use mutloc::polysolve::{UniPoly, Var};
use mutloc::solver::{reprojection_cost, ObservationPair, RigConfig};
use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Vector3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Exact rational bivariate polynomials and Sylvester determinants.

/// Bivariate polynomial over the rationals; `coeffs[i][j]` multiplies
/// `s1^i * s3^j`. Rows may be ragged.
#[derive(Clone, Debug, PartialEq)]
pub struct RatBiPoly {
    pub coeffs: Vec<Vec<BigRational>>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RatBiPoly {
    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    /// Builds from integer rows, `grid[i][j]` multiplying `s1^i * s3^j`.
    pub fn from_int_grid(grid: &[&[i64]]) -> Self {
        Self {
            coeffs: grid
                .iter()
                .map(|row| row.iter().map(|&c| rat(c)).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|row| row.iter().all(Zero::is_zero))
    }

    fn coeff(&self, i: usize, j: usize) -> BigRational {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn dims(&self) -> (usize, usize) {
        let rows = self.coeffs.len();
        let cols = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        (rows, cols)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (r1, c1) = self.dims();
        let (r2, c2) = other.dims();
        let coeffs = (0..r1.max(r2))
            .map(|i| {
                (0..c1.max(c2))
                    .map(|j| self.coeff(i, j) + other.coeff(i, j))
                    .collect()
            })
            .collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|c| -c.clone()).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (r1, c1) = self.dims();
        let (r2, c2) = other.dims();
        let mut coeffs =
            vec![vec![BigRational::zero(); c1 + c2 - 1]; r1 + r2 - 1];
        for (i1, row1) in self.coeffs.iter().enumerate() {
            for (j1, a) in row1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (i2, row2) in other.coeffs.iter().enumerate() {
                    for (j2, b) in row2.iter().enumerate() {
                        if !b.is_zero() {
                            coeffs[i1 + i2][j1 + j2] += a * b;
                        }
                    }
                }
            }
        }
        Self { coeffs }
    }

    /// Largest absolute coefficient, as f64.
    pub fn max_abs_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.to_f64().unwrap().abs())
            .fold(0.0, f64::max)
    }
}

/// First-column Laplace expansion; exponential but fine for 6x6 inputs.
pub fn rat_poly_det(m: &[Vec<RatBiPoly>]) -> RatBiPoly {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut det = RatBiPoly::zero();
    for (i, row) in m.iter().enumerate() {
        if row[0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RatBiPoly>> = m
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| r[1..].to_vec())
            .collect();
        let term = row[0].mul(&rat_poly_det(&minor));
        det = if i % 2 == 0 {
            det.add(&term)
        } else {
            det.sub(&term)
        };
    }
    det
}

/// Sylvester determinant of ascending coefficient lists `p` (formal degree
/// `p.len()-1`) and `q`, matching the library's row layout: `q.len()-1`
/// rows of `p` then `p.len()-1` rows of `q`, each reversed and shifted.
pub fn rat_sylvester_det(p: &[RatBiPoly], q: &[RatBiPoly]) -> RatBiPoly {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let size = dp + dq;
    let mut m = vec![vec![RatBiPoly::zero(); size]; size];
    for (shift, row) in m.iter_mut().enumerate().take(dq) {
        for (k, c) in p.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
    }
    for (shift, row) in m.iter_mut().skip(dq).enumerate() {
        for (k, c) in q.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
    }
    rat_poly_det(&m)
}

/// One random integer instance with the scale system's coefficient shapes:
/// `f = s2^2 + (b f1 * s1) s2 + (s1^2 + f0)`,
/// `g = s2^2 + g1 s2 + (-s3^2 + g01 s3 + g00)`,
/// `h = -s3^2 + h1 s3 + (s1^2 + h01 s1 + h00)`.
pub struct IntInstance {
    pub f: [UniPoly; 3],
    pub g: [UniPoly; 3],
    pub h: [UniPoly; 3],
    pub f_rat: [RatBiPoly; 3],
    pub g_rat: [RatBiPoly; 3],
    pub h_rat: [RatBiPoly; 3],
}

pub fn random_int_instance(rng: &mut ChaCha8Rng) -> IntInstance {
    let mut c = || rng.random_range(-9i64..=9);
    let (f0, f1) = (c(), c());
    let (g00, g01, g1) = (c(), c(), c());
    let (h00, h01, h1) = (c(), c(), c());
    IntInstance {
        f: [
            UniPoly::new(Var::S1, vec![f0 as f64, 0.0, 1.0]),
            UniPoly::new(Var::S1, vec![0.0, f1 as f64]),
            UniPoly::constant(Var::S1, 1.0),
        ],
        g: [
            UniPoly::new(Var::S3, vec![g00 as f64, g01 as f64, -1.0]),
            UniPoly::constant(Var::S3, g1 as f64),
            UniPoly::constant(Var::S3, 1.0),
        ],
        h: [
            UniPoly::new(Var::S1, vec![h00 as f64, h01 as f64, 1.0]),
            UniPoly::constant(Var::S1, h1 as f64),
            UniPoly::constant(Var::S1, -1.0),
        ],
        f_rat: [
            RatBiPoly::from_int_grid(&[&[f0], &[0], &[1]]),
            RatBiPoly::from_int_grid(&[&[0], &[f1]]),
            RatBiPoly::from_int_grid(&[&[1]]),
        ],
        g_rat: [
            RatBiPoly::from_int_grid(&[&[g00, g01, -1]]),
            RatBiPoly::from_int_grid(&[&[g1]]),
            RatBiPoly::from_int_grid(&[&[1]]),
        ],
        h_rat: [
            RatBiPoly::from_int_grid(&[&[h00], &[h01], &[1]]),
            RatBiPoly::from_int_grid(&[&[h1]]),
            RatBiPoly::from_int_grid(&[&[-1]]),
        ],
    }
}

// ---------------------------------------------------------------------------
// Brute-force pose oracle: dense rotation sampling, closed-form translation
// per rotation, Nelder-Mead descent from the best seeds.

/// Least-squares translation for a fixed rotation: each observed marker
/// constrains the transformed marker to lie on its measured sightline,
/// `(point) x (bearing) = 0`, which is linear in `t`.
pub fn translation_for_rotation(
    rig: &RigConfig,
    obs: &ObservationPair,
    rotation: &Matrix3<f64>,
) -> Option<Vec3> {
    let mut rows: Vec<(Matrix3<f64>, Vec3)> = Vec::new();
    // Camera p sees q-side markers: (q_j - t) is parallel to R * u_j.
    for (pixel, marker) in [(&obs.m1, &rig.q1), (&obs.m2, &rig.q2)] {
        let w = rotation * bearing_from_pixel(&rig.intrinsics_p, pixel).dir();
        rows.push((w.cross_matrix(), w.cross(marker)));
    }
    // Camera q sees p-side markers: (R p_i + t) is parallel to v_i.
    let mut q_side = vec![(&obs.m3, &rig.p3)];
    if let (Some(m4), Some(p4)) = (obs.m4.as_ref(), rig.p4.as_ref()) {
        q_side.push((m4, p4));
    }
    for (pixel, marker) in q_side {
        let v = bearing_from_pixel(&rig.intrinsics_q, pixel).dir();
        rows.push((v.cross_matrix(), (rotation * marker).cross(&v)));
    }

    let mut a = DMatrix::zeros(3 * rows.len(), 3);
    let mut b = DVector::zeros(3 * rows.len());
    for (k, (m, rhs)) in rows.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                a[(3 * k + i, j)] = m[(i, j)];
            }
            b[3 * k + i] = rhs[i];
        }
    }
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-12)
        .ok()
        .map(|t| Vector3::new(t[0], t[1], t[2]))
}

fn uniform_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    // Shoemake's uniform quaternion sampling.
    let u1: f64 = rng.random_range(0.0..1.0);
    let u2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let u3: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::Quaternion::new(b * u3.cos(), a * u2.sin(), a * u2.cos(), b * u3.sin());
    *nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix().matrix()
}

fn pose_from_params(seed_pose: &Pose, x: &[f64; 6]) -> Pose {
    let delta = Rotation3::new(Vector3::new(x[0], x[1], x[2]));
    Pose::new(
        seed_pose.rotation * delta.matrix(),
        seed_pose.translation + Vector3::new(x[3], x[4], x[5]),
    )
}

/// Nelder-Mead over a local 6-DOF chart (rotation vector, translation
/// offset) anchored at `seed_pose`.
fn nelder_mead_descent(
    rig: &RigConfig,
    obs: &ObservationPair,
    seed_pose: &Pose,
    iterations: usize,
) -> (Pose, f64) {
    let cost_of = |x: &[f64; 6]| reprojection_cost(&pose_from_params(seed_pose, x), rig, obs);
    let steps = [0.12, 0.12, 0.12, 0.08, 0.08, 0.08];
    let mut simplex: Vec<([f64; 6], f64)> = Vec::with_capacity(7);
    let origin = [0.0; 6];
    simplex.push((origin, cost_of(&origin)));
    for i in 0..6 {
        let mut x = origin;
        x[i] += steps[i];
        simplex.push((x, cost_of(&x)));
    }

    for _ in 0..iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let centroid = {
            let mut c = [0.0; 6];
            for (x, _) in &simplex[..6] {
                for i in 0..6 {
                    c[i] += x[i] / 6.0;
                }
            }
            c
        };
        let worst = simplex[6];
        let combine = |alpha: f64| {
            let mut x = [0.0; 6];
            for i in 0..6 {
                x[i] = centroid[i] + alpha * (centroid[i] - worst.0[i]);
            }
            x
        };

        let reflected = combine(1.0);
        let fr = cost_of(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(2.0);
            let fe = cost_of(&expanded);
            simplex[6] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[5].1 {
            simplex[6] = (reflected, fr);
        } else {
            let contracted = combine(-0.5);
            let fc = cost_of(&contracted);
            if fc < worst.1 {
                simplex[6] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for i in 0..6 {
                        entry.0[i] = best[i] + 0.5 * (entry.0[i] - best[i]);
                    }
                    entry.1 = cost_of(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (pose_from_params(seed_pose, &simplex[0].0), simplex[0].1)
}

/// Minimizes the reprojection cost without the elimination machinery:
/// samples `rotations` uniform rotations, solves the translation linearly
/// for each, and runs Nelder-Mead from the best-scoring seeds.
pub fn brute_force_pose(
    rig: &RigConfig,
    obs: &ObservationPair,
    rotations: usize,
    rng: &mut ChaCha8Rng,
) -> (Pose, f64) {
    let mut seeds: Vec<(f64, Pose)> = Vec::new();
    for _ in 0..rotations {
        let r = uniform_rotation(rng);
        if let Some(t) = translation_for_rotation(rig, obs, &r) {
            let pose = Pose::new(r, t);
            let cost = reprojection_cost(&pose, rig, obs);
            if cost.is_finite() {
                seeds.push((cost, pose));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(!seeds.is_empty(), "no rotation sample produced a frontal pose");

    let mut best: Option<(Pose, f64)> = None;
    for (_, seed_pose) in seeds.iter().take(10) {
        let (pose, cost) = nelder_mead_descent(rig, obs, seed_pose, 400);
        // Re-solving the translation at the refined rotation and descending
        // again cleans up the translation block.
        let (pose, cost) =
            if let Some(t) = translation_for_rotation(rig, obs, &pose.rotation) {
                let re_seeded = Pose::new(pose.rotation, t);
                let re_cost = reprojection_cost(&re_seeded, rig, obs);
                if re_cost < cost {
                    nelder_mead_descent(rig, obs, &re_seeded, 200)
                } else {
                    (pose, cost)
                }
            } else {
                (pose, cost)
            };
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((pose, cost));
        }
    }
    best.unwrap()
}

// ---------------------------------------------------------------------------
// Scene helpers.

/// Exact pixel observation of every rig marker, or None if any marker is
/// behind a camera.
pub fn exact_observation(rig: &RigConfig, pose: &Pose) -> Option<ObservationPair> {
    let inverse = pose.inverse();
    let proj = |k: &CameraIntrinsics, v: &Vec3| mutloc::geometry::project(k, v).ok();
    Some(ObservationPair {
        m1: proj(&rig.intrinsics_p, &inverse.transform(&rig.q1))?,
        m2: proj(&rig.intrinsics_p, &inverse.transform(&rig.q2))?,
        m3: proj(&rig.intrinsics_q, &pose.transform(&rig.p3))?,
        m4: match rig.p4 {
            Some(p4) => Some(proj(&rig.intrinsics_q, &pose.transform(&p4))?),
            None => None,
        },
    })
}
