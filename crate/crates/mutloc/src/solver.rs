//! Relative pose recovery from one pair of simultaneous reciprocal marker
//! observations.
//!
//! Camera `p` sees markers `M1`, `M2`, whose positions `q1`, `q2` are known
//! in frame `{q}`; camera `q` sees `M3` (and optionally `M4`), whose
//! positions `p3`, `p4` are known in frame `{p}`. The recovered pose maps
//! `{p}` coordinates into `{q}`: `x_q = R x_p + t`.
//!
//! Pipeline per marker triple: equate inter-marker distances across the two
//! frames to get three quadratics in the unknown ranges, eliminate pairwise
//! with Sylvester resultants down to one degree-8 univariate, root it
//! numerically, back-substitute the surviving ranges, reconstruct each pose
//! by absolute orientation over the three exact point correspondences, and
//! rank every candidate by total squared reprojection error.

use std::cmp::Ordering;

use thiserror::Error;

use crate::geometry::{
    absolute_orientation, bearing_from_pixel, project, Bearing, CameraIntrinsics, GeometryError,
    Pixel, Pose, Vec3,
};
use crate::polysolve::{
    real_roots, resultant_quadratics, resultant_quartic_quadratic, UniPoly, Var,
};

/// Two sightlines from one camera count as the same ray above this dot
/// product; the first distance equation would then be rank deficient.
const PARALLEL_BEARING_TOL: f64 = 1e-10;

/// Marker layout and camera intrinsics of the two-robot rig.
///
/// `q1`, `q2` locate the markers carried by robot `q` in its own frame;
/// `p3` (and optionally `p4`) locate the markers carried by robot `p`.
/// Markers of one robot must be distinct (separation above 1e-6 m) and off
/// the optical center; the solver asserts these invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct RigConfig {
    pub intrinsics_p: CameraIntrinsics,
    pub intrinsics_q: CameraIntrinsics,
    pub q1: Vec3,
    pub q2: Vec3,
    pub p3: Vec3,
    pub p4: Option<Vec3>,
}

impl RigConfig {
    fn assert_valid(&self) {
        assert!(
            (self.q1 - self.q2).norm() > 1e-6,
            "markers q1 and q2 must be distinct"
        );
        assert!(self.p3.norm() > 0.0, "marker p3 must be off the optical center");
        if let Some(p4) = self.p4 {
            assert!(
                (p4 - self.p3).norm() > 1e-6,
                "markers p3 and p4 must be distinct"
            );
        }
    }
}

/// Pixel positions of the markers in one simultaneous image pair: camera `p`
/// images `M1`, `M2`; camera `q` images `M3` and, unless occluded, `M4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationPair {
    pub m1: Pixel,
    pub m2: Pixel,
    pub m3: Pixel,
    pub m4: Option<Pixel>,
}

/// Tunable solver thresholds. The defaults suit metre-scale scenes observed
/// by cameras with focal lengths of a few hundred pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Relative imaginary-part tolerance for accepting a near-real root.
    pub imag_tol: f64,
    /// Relative tolerance on the distance-equation residuals a range triple
    /// must satisfy after back-substitution.
    pub residual_tol: f64,
    /// Drop roots closer to a camera than that camera's own markers. Falls
    /// back to all positive roots when the filter would empty the set.
    pub plausibility_filter: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            imag_tol: 1e-6,
            residual_tol: 1e-6,
            plausibility_filter: true,
        }
    }
}

/// Recovered marker ranges for one triple, in triple order: distances from
/// the camera observing the triple's first two markers to those markers,
/// then the distance from the opposite camera to the third marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleTriple {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    /// Absolute residuals of the three distance equations at these ranges,
    /// in the order (markers 1-2, markers 2-3, markers 1-3).
    pub residuals: [f64; 3],
}

/// The three-marker subsets the solver can draw candidates from. The last
/// two swap the roles of the cameras and invert the recovered pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkerTriple {
    M1M2M3,
    M1M2M4,
    M3M4M1,
    M3M4M2,
}

impl MarkerTriple {
    pub fn label(&self) -> &'static str {
        match self {
            MarkerTriple::M1M2M3 => "m1m2m3",
            MarkerTriple::M1M2M4 => "m1m2m4",
            MarkerTriple::M3M4M1 => "m3m4m1",
            MarkerTriple::M3M4M2 => "m3m4m2",
        }
    }
}

/// One pose hypothesis surviving back-substitution and reconstruction.
#[derive(Debug, Clone)]
pub struct CandidateSolution {
    /// Maps `{p}` coordinates into `{q}` regardless of the source triple.
    pub pose: Pose,
    pub scales: ScaleTriple,
    /// Range from camera `q` to `M4` implied by the pose, when `M4` exists.
    pub s4: Option<f64>,
    /// Total squared reprojection error in pixels^2 over every observed
    /// marker; infinite when the pose puts a marker behind a camera.
    pub cost: f64,
    pub triple: MarkerTriple,
}

/// Root accounting for one marker triple.
#[derive(Debug, Clone, Copy)]
pub struct TripleDiagnostics {
    pub triple: MarkerTriple,
    /// Real roots of the degree-8 univariate (at most 8).
    pub raw_real_roots: usize,
    /// Roots with a positive first range.
    pub positive_roots: usize,
    /// Range triples surviving back-substitution, residual checks, and the
    /// plausibility filter (or its fallback).
    pub kept_roots: usize,
    /// Pose hypotheses produced from the kept triples.
    pub candidates: usize,
}

/// Full solver output: the minimum-cost pose plus every ranked alternative.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub best: CandidateSolution,
    /// All candidates, sorted by cost (ties broken by smaller translation
    /// norm, then by triple enumeration order).
    pub candidates: Vec<CandidateSolution>,
    pub diagnostics: Vec<TripleDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// Sightlines from one camera coincide; the distance system is rank
    /// deficient before any root finding starts.
    #[error("degenerate observation geometry: {0}")]
    DegenerateBearing(String),
    /// No triple produced an all-positive range triple consistent with the
    /// distance equations.
    #[error("no positive range solution is consistent with the observations")]
    NoPositiveRoots,
    /// Range triples existed but pose reconstruction degenerated for all of
    /// them (collinear correspondence points).
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Candidate poses existed but every one reprojects a marker behind a
    /// camera.
    #[error("no candidate pose explains the observations")]
    NoSolution,
}

/// The three distance equations of one marker triple, in the canonical
/// orientation (one camera sees markers 1 and 2, the other sees marker 3):
///
/// - markers 1-2: `s1^2 + s2^2 - 2 c12 s1 s2 - d12^2 = 0`, a monic
///   quadratic in `s2` with coefficients in `s1`,
/// - markers 2-3: monic quadratic in `s2` with coefficients in `s3`,
/// - markers 1-3: quadratic in `s3` (leading coefficient -1) with
///   coefficients in `s1`.
#[derive(Debug, Clone)]
pub struct ScaleSystem {
    eq12: [UniPoly; 3],
    eq23: [UniPoly; 3],
    eq13: [UniPoly; 3],
    c12: f64,
    d12_sq: f64,
    b23: f64,
    w1_dot_u3: f64,
    w2_dot_u3: f64,
    /// Squared norms of the two known marker positions and of the third
    /// marker's position.
    n1_sq: f64,
    n2_sq: f64,
    n3_sq: f64,
}

impl ScaleSystem {
    /// The quadratics as ascending coefficient lists, in the order above.
    pub fn quadratics(&self) -> (&[UniPoly; 3], &[UniPoly; 3], &[UniPoly; 3]) {
        (&self.eq12, &self.eq23, &self.eq13)
    }

    /// Signed values of the three distance equations at the given ranges; a
    /// valid range triple drives all three to zero.
    pub fn eval_distance_equations(&self, s1: f64, s2: f64, s3: f64) -> [f64; 3] {
        [
            s1 * s1 + s2 * s2 - 2.0 * self.c12 * s1 * s2 - self.d12_sq,
            s2 * s2 - 2.0 * self.b23 * s2 - s3 * s3 + 2.0 * self.w2_dot_u3 * s3 + self.n3_sq
                - self.n2_sq,
            s1 * s1 - 2.0 * self.eq13_lin() * s1 - s3 * s3 + 2.0 * self.w1_dot_u3 * s3
                + self.n3_sq
                - self.n1_sq,
        ]
    }

    fn eq13_lin(&self) -> f64 {
        -self.eq13[0].coeffs()[1] / 2.0
    }

    fn plausibility_bounds(&self) -> (f64, f64) {
        (self.n3_sq.sqrt(), self.n1_sq.max(self.n2_sq).sqrt())
    }
}

/// One triple in canonical orientation: `u1`, `u2` are sightlines from the
/// camera that sees two markers (their positions `w1`, `w2` known in the
/// opposite frame); `u3` is the opposite camera's sightline to the third
/// marker, whose position `v3` is known in the first camera's frame. The
/// canonical pose maps the first camera's frame into the opposite frame.
struct CanonicalTriple {
    u1: Bearing,
    u2: Bearing,
    w1: Vec3,
    w2: Vec3,
    u3: Bearing,
    v3: Vec3,
}

impl CanonicalTriple {
    fn primary(rig: &RigConfig, obs: &ObservationPair) -> Self {
        Self {
            u1: bearing_from_pixel(&rig.intrinsics_p, &obs.m1),
            u2: bearing_from_pixel(&rig.intrinsics_p, &obs.m2),
            w1: rig.q1,
            w2: rig.q2,
            u3: bearing_from_pixel(&rig.intrinsics_q, &obs.m3),
            v3: rig.p3,
        }
    }
}

struct SystemRoots {
    raw_real_roots: usize,
    positive_roots: usize,
    triples: Vec<ScaleTriple>,
}

/// Builds the three distance equations for the primary triple `{M1,M2,M3}`
/// from one observation pair.
pub fn build_scale_system(
    rig: &RigConfig,
    obs: &ObservationPair,
) -> Result<ScaleSystem, SolverError> {
    rig.assert_valid();
    canonical_scale_system(&CanonicalTriple::primary(rig, obs))
        .map_err(SolverError::DegenerateBearing)
}

/// Solves the primary triple's distance system: eliminates down to the
/// degree-8 univariate, roots it, and back-substitutes every positive,
/// residual-consistent range triple. The result is unfiltered; apply
/// [`filter_roots`] for the physical-plausibility cut.
pub fn solve_scales(rig: &RigConfig, obs: &ObservationPair) -> Result<Vec<ScaleTriple>, SolverError> {
    let system = build_scale_system(rig, obs)?;
    let roots = solve_system_scales(&system, &SolverParams::default())
        .map_err(SolverError::DegenerateBearing)?;
    if roots.triples.is_empty() {
        return Err(SolverError::NoPositiveRoots);
    }
    Ok(roots.triples)
}

/// Keeps range triples satisfying the physical-plausibility bounds for the
/// primary triple: both ranges from camera `p` at least `‖p3‖`, the range
/// from camera `q` at least `max(‖q1‖, ‖q2‖)`. May return an empty list;
/// the pose pipeline falls back to the unfiltered set in that case.
pub fn filter_roots(triples: &[ScaleTriple], rig: &RigConfig) -> Vec<ScaleTriple> {
    let s12_min = rig.p3.norm();
    let s3_min = rig.q1.norm().max(rig.q2.norm());
    filter_by_bounds(triples, s12_min, s3_min)
}

/// Solves with default parameters. See [`solve_mutual_pose_with`].
pub fn solve_mutual_pose(
    rig: &RigConfig,
    obs: &ObservationPair,
) -> Result<SolveReport, SolverError> {
    solve_mutual_pose_with(rig, obs, &SolverParams::default())
}

/// Recovers the relative pose `{p}` to `{q}` from one reciprocal
/// observation pair, trying every available marker triple and ranking the
/// union of candidates by reprojection cost over all observed markers.
///
/// An observation of `M4` requires `rig.p4`; the reverse is fine (an
/// occluded `M4` drops the solver to single-triple mode).
pub fn solve_mutual_pose_with(
    rig: &RigConfig,
    obs: &ObservationPair,
    params: &SolverParams,
) -> Result<SolveReport, SolverError> {
    rig.assert_valid();
    assert!(
        obs.m4.is_none() || rig.p4.is_some(),
        "observation contains m4 but the rig defines no fourth marker"
    );

    // (triple, canonical problem, whether the canonical pose maps {q}->{p}
    // and must be inverted)
    let mut problems: Vec<(MarkerTriple, CanonicalTriple, bool)> =
        vec![(MarkerTriple::M1M2M3, CanonicalTriple::primary(rig, obs), false)];
    if let (Some(p4), Some(m4)) = (rig.p4, obs.m4) {
        let u_p1 = bearing_from_pixel(&rig.intrinsics_p, &obs.m1);
        let u_p2 = bearing_from_pixel(&rig.intrinsics_p, &obs.m2);
        let u_q3 = bearing_from_pixel(&rig.intrinsics_q, &obs.m3);
        let u_q4 = bearing_from_pixel(&rig.intrinsics_q, &m4);
        problems.push((
            MarkerTriple::M1M2M4,
            CanonicalTriple {
                u1: u_p1,
                u2: u_p2,
                w1: rig.q1,
                w2: rig.q2,
                u3: u_q4,
                v3: p4,
            },
            false,
        ));
        problems.push((
            MarkerTriple::M3M4M1,
            CanonicalTriple {
                u1: u_q3,
                u2: u_q4,
                w1: rig.p3,
                w2: p4,
                u3: u_p1,
                v3: rig.q1,
            },
            true,
        ));
        problems.push((
            MarkerTriple::M3M4M2,
            CanonicalTriple {
                u1: u_q3,
                u2: u_q4,
                w1: rig.p3,
                w2: p4,
                u3: u_p2,
                v3: rig.q2,
            },
            true,
        ));
    }

    let mut candidates: Vec<CandidateSolution> = Vec::new();
    let mut diagnostics: Vec<TripleDiagnostics> = Vec::new();
    let mut degeneracies: Vec<String> = Vec::new();
    let mut total_kept = 0usize;
    let mut last_geometry_error: Option<GeometryError> = None;

    for (triple, canonical, swapped) in &problems {
        let outcome = canonical_scale_system(canonical)
            .and_then(|system| solve_system_scales(&system, params).map(|roots| (system, roots)));
        let (system, roots) = match outcome {
            Ok(pair) => pair,
            Err(msg) => {
                degeneracies.push(format!("{}: {msg}", triple.label()));
                diagnostics.push(TripleDiagnostics {
                    triple: *triple,
                    raw_real_roots: 0,
                    positive_roots: 0,
                    kept_roots: 0,
                    candidates: 0,
                });
                continue;
            }
        };

        let kept = if params.plausibility_filter {
            let (s12_min, s3_min) = system.plausibility_bounds();
            let filtered = filter_by_bounds(&roots.triples, s12_min, s3_min);
            if filtered.is_empty() {
                roots.triples
            } else {
                filtered
            }
        } else {
            roots.triples
        };
        total_kept += kept.len();

        let mut produced = 0usize;
        for scales in &kept {
            let src = [
                canonical.u1.scaled(scales.s1),
                canonical.u2.scaled(scales.s2),
                canonical.v3,
            ];
            let dst = [canonical.w1, canonical.w2, canonical.u3.scaled(scales.s3)];
            let canonical_pose = match absolute_orientation(&src, &dst) {
                Ok(pose) => pose,
                Err(e) => {
                    last_geometry_error = Some(e);
                    continue;
                }
            };
            let pose = if *swapped {
                canonical_pose.inverse()
            } else {
                canonical_pose
            };
            let cost = reprojection_cost(&pose, rig, obs);
            let s4 = rig.p4.map(|p4| pose.transform(&p4).norm());
            candidates.push(CandidateSolution {
                pose,
                scales: *scales,
                s4,
                cost,
                triple: *triple,
            });
            produced += 1;
        }
        diagnostics.push(TripleDiagnostics {
            triple: *triple,
            raw_real_roots: roots.raw_real_roots,
            positive_roots: roots.positive_roots,
            kept_roots: kept.len(),
            candidates: produced,
        });
    }

    if degeneracies.len() == problems.len() {
        return Err(SolverError::DegenerateBearing(degeneracies.join("; ")));
    }
    if candidates.is_empty() {
        return Err(match (total_kept, last_geometry_error) {
            (0, _) => SolverError::NoPositiveRoots,
            (_, Some(e)) => SolverError::Geometry(e),
            (_, None) => SolverError::NoSolution,
        });
    }
    candidates.sort_by(candidate_order);
    if !candidates[0].cost.is_finite() {
        return Err(SolverError::NoSolution);
    }
    Ok(SolveReport {
        best: candidates[0].clone(),
        candidates,
        diagnostics,
    })
}

/// Total squared reprojection error (pixels^2) of a pose hypothesis over
/// every observed marker, evaluating each marker in the frame of the camera
/// that images it. A marker behind either camera poisons the candidate with
/// an infinite cost.
pub fn reprojection_cost(pose: &Pose, rig: &RigConfig, obs: &ObservationPair) -> f64 {
    let inverse = pose.inverse();
    let mut cost = 0.0;
    for (pixel, marker) in [(&obs.m1, &rig.q1), (&obs.m2, &rig.q2)] {
        match project(&rig.intrinsics_p, &inverse.transform(marker)) {
            Ok(projected) => cost += projected.distance_squared(pixel),
            Err(_) => return f64::INFINITY,
        }
    }
    let mut q_side: Vec<(&Pixel, &Vec3)> = vec![(&obs.m3, &rig.p3)];
    if let (Some(m4), Some(p4)) = (obs.m4.as_ref(), rig.p4.as_ref()) {
        q_side.push((m4, p4));
    }
    for (pixel, marker) in q_side {
        match project(&rig.intrinsics_q, &pose.transform(marker)) {
            Ok(projected) => cost += projected.distance_squared(pixel),
            Err(_) => return f64::INFINITY,
        }
    }
    cost
}

/// Cost-then-translation ordering. Costs within `1e-12` relative are tied
/// and resolved by the smaller translation norm; the sort is stable, so
/// equal candidates keep triple enumeration order.
fn candidate_order(a: &CandidateSolution, b: &CandidateSolution) -> Ordering {
    let tied = if a.cost.is_finite() && b.cost.is_finite() {
        (a.cost - b.cost).abs() <= 1e-12 * a.cost.abs().max(b.cost.abs()).max(1.0)
    } else {
        a.cost == b.cost
    };
    if tied {
        a.pose
            .translation
            .norm()
            .total_cmp(&b.pose.translation.norm())
    } else {
        a.cost.total_cmp(&b.cost)
    }
}

fn canonical_scale_system(ct: &CanonicalTriple) -> Result<ScaleSystem, String> {
    let c12 = ct.u1.dot(&ct.u2);
    if c12 > 1.0 - PARALLEL_BEARING_TOL {
        return Err("the two sightlines from one camera coincide".into());
    }
    let d12_sq = (ct.w1 - ct.w2).norm_squared();
    let a13 = ct.u1.dir().dot(&ct.v3);
    let b23 = ct.u2.dir().dot(&ct.v3);
    let w1_dot_u3 = ct.w1.dot(&ct.u3.dir());
    let w2_dot_u3 = ct.w2.dot(&ct.u3.dir());
    let n1_sq = ct.w1.norm_squared();
    let n2_sq = ct.w2.norm_squared();
    let n3_sq = ct.v3.norm_squared();

    Ok(ScaleSystem {
        eq12: [
            UniPoly::new(Var::S1, vec![-d12_sq, 0.0, 1.0]),
            UniPoly::new(Var::S1, vec![0.0, -2.0 * c12]),
            UniPoly::constant(Var::S1, 1.0),
        ],
        eq23: [
            UniPoly::new(Var::S3, vec![n3_sq - n2_sq, 2.0 * w2_dot_u3, -1.0]),
            UniPoly::constant(Var::S3, -2.0 * b23),
            UniPoly::constant(Var::S3, 1.0),
        ],
        eq13: [
            UniPoly::new(Var::S1, vec![n3_sq - n1_sq, -2.0 * a13, 1.0]),
            UniPoly::constant(Var::S1, 2.0 * w1_dot_u3),
            UniPoly::constant(Var::S1, -1.0),
        ],
        c12,
        d12_sq,
        b23,
        w1_dot_u3,
        w2_dot_u3,
        n1_sq,
        n2_sq,
        n3_sq,
    })
}

/// Eliminates `s2` then `s3`, roots the final univariate in `s1`, and
/// back-substitutes. Keeps all-positive triples whose residuals against the
/// intermediate resultant and the first distance equation stay below the
/// relative tolerance.
fn solve_system_scales(
    system: &ScaleSystem,
    params: &SolverParams,
) -> Result<SystemRoots, String> {
    let r = resultant_quadratics(&system.eq12, &system.eq23);
    let r2 = resultant_quartic_quadratic(&r, &system.eq13);
    let roots = real_roots(&r2, params.imag_tol)
        .map_err(|_| "scale elimination collapsed to the zero polynomial".to_string())?;

    let raw_real_roots = roots.real_roots.len();
    let positive: Vec<f64> = roots
        .real_roots
        .iter()
        .copied()
        .filter(|&s1| s1 > 0.0)
        .collect();

    let mut triples: Vec<ScaleTriple> = Vec::new();
    for &s1 in &positive {
        // Back-substitute the markers 1-3 equation for s3.
        for s3 in quadratic_roots(-1.0, 2.0 * system.w1_dot_u3, system.eq13[0].eval(s1)) {
            if s3 <= 0.0 {
                continue;
            }
            let r_scale = r.max_abs_coeff() * s1.abs().max(s3.abs()).max(1.0).powi(4);
            if r.eval(s1, s3).abs() > params.residual_tol * r_scale {
                continue;
            }
            // Back-substitute the markers 2-3 equation for s2 and keep the
            // roots consistent with the markers 1-2 equation.
            for s2 in quadratic_roots(1.0, -2.0 * system.b23, system.eq23[0].eval(s3)) {
                if s2 <= 0.0 {
                    continue;
                }
                let residuals = system.eval_distance_equations(s1, s2, s3);
                let eq12_scale = (s1 * s1 + s2 * s2 + system.d12_sq).max(1.0);
                if residuals[0].abs() > params.residual_tol * eq12_scale {
                    continue;
                }
                let triple = ScaleTriple {
                    s1,
                    s2,
                    s3,
                    residuals: residuals.map(f64::abs),
                };
                if !triples.iter().any(|t| triples_close(t, &triple)) {
                    triples.push(triple);
                }
            }
        }
    }

    Ok(SystemRoots {
        raw_real_roots,
        positive_roots: positive.len(),
        triples,
    })
}

/// Markers of the observed robot sit farther from the observer than the
/// observer's own markers, which bounds each range from below.
fn filter_by_bounds(triples: &[ScaleTriple], s12_min: f64, s3_min: f64) -> Vec<ScaleTriple> {
    triples
        .iter()
        .copied()
        .filter(|t| t.s1 >= s12_min && t.s2 >= s12_min && t.s3 >= s3_min)
        .collect()
}

/// Real roots of `a x^2 + b x + c`, tolerating a slightly negative
/// discriminant from floating-point cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(1e-300);
    if disc < -1e-9 * scale {
        return vec![];
    }
    let sqrt_disc = disc.max(0.0).sqrt();
    // The larger-magnitude root first via the cancellation-free form.
    let q = -0.5 * (b + b.signum() * sqrt_disc);
    if q == 0.0 {
        // b and the discriminant both vanish: double root at zero offset.
        return vec![-b / (2.0 * a)];
    }
    let r1 = q / a;
    let r2 = c / q;
    if (r1 - r2).abs() <= 1e-12 * r1.abs().max(r2.abs()).max(1.0) {
        vec![r1]
    } else {
        vec![r1, r2]
    }
}

fn triples_close(a: &ScaleTriple, b: &ScaleTriple) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
    close(a.s1, b.s1) && close(a.s2, b.s2) && close(a.s3, b.s3)
}
