//! Mutual localization: relative 6-DOF pose between two cameras from a single
//! pair of simultaneous, reciprocal fiducial-marker observations.
//!
//! Each camera carries markers whose positions are known in its own frame and
//! observes the markers mounted on the other camera. One such observation pair
//! is enough to recover the full rotation and translation between the two
//! camera frames, with no egomotion and no shared world landmarks: the known
//! inter-marker distances resolve the scale that bearing-only measurements
//! leave free.
//!
//! The crate is organized as:
//! - [`geometry`]: pinhole camera model, bearings, rigid transforms, absolute
//!   orientation, and the rotation-error metric.
//! - [`polysolve`]: polynomial arithmetic, Sylvester resultants, and real-root
//!   extraction for the degree-8 elimination polynomial.
//! - [`solver`]: the end-to-end pipeline from one observation pair to the
//!   minimum-reprojection-cost pose.
//! - [`sim`]: synthetic scene generation and Monte-Carlo noise sweeps.

pub mod geometry;
pub mod polysolve;
pub mod sim;
pub mod solver;

pub use geometry::{
    absolute_orientation, bearing_from_pixel, project, rotation_error_deg, Bearing,
    CameraIntrinsics, GeometryError, Pixel, Pose, Vec3,
};
pub use solver::{
    build_scale_system, filter_roots, reprojection_cost, solve_mutual_pose,
    solve_mutual_pose_with, solve_scales, CandidateSolution, MarkerTriple, ObservationPair,
    RigConfig, ScaleSystem, ScaleTriple, SolveReport, SolverError, SolverParams,
    TripleDiagnostics,
};
