//! Rig configuration file: a single TOML document describing both cameras,
//! the marker mounting positions, and optional solver tolerances.
//!
//! ```toml
//! [camera_p]
//! fx = 500.0
//! fy = 500.0
//! cx = 480.0
//! cy = 270.0
//! # skew = 0.0
//!
//! [camera_q]
//! fx = 500.0
//! fy = 500.0
//! cx = 480.0
//! cy = 270.0
//!
//! [markers]          # meters, in the owning robot's camera frame
//! q1 = [0.25, 0.0, 0.1]
//! q2 = [-0.22, 0.08, 0.05]
//! p3 = [0.2, -0.06, 0.12]
//! # p4 = [-0.24, 0.1, 0.07]
//!
//! [solver]           # optional; defaults shown
//! # imag_tol = 1e-6
//! # residual_tol = 1e-6
//! # plausibility_filter = true
//!
//! [scenario]         # optional; only used by `mutloc sweep`
//! # separation = 1.0
//! # image_width = 960
//! # image_height = 540
//! ```
//!
//! Unknown keys anywhere are rejected, with the offending key named.

use std::fs;
use std::path::Path;

use mutloc::geometry::{CameraIntrinsics, Vec3};
use mutloc::solver::{RigConfig, SolverParams};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub camera_p: CameraSection,
    pub camera_q: CameraSection,
    pub markers: MarkerSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSection {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub skew: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerSection {
    pub q1: [f64; 3],
    pub q2: [f64; 3],
    pub p3: [f64; 3],
    #[serde(default)]
    pub p4: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub imag_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub plausibility_filter: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub separation: f64,
    pub image_width: u32,
    pub image_height: u32,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            separation: 1.0,
            image_width: 960,
            image_height: 540,
        }
    }
}

impl ConfigFile {
    /// Parses and validates; error strings are single-line and name the
    /// file, the line where known, and the offending key.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let config: ConfigFile = toml::from_str(&text).map_err(|e| {
            let location = e
                .span()
                .map(|span| {
                    let line = text[..span.start.min(text.len())]
                        .bytes()
                        .filter(|&b| b == b'\n')
                        .count()
                        + 1;
                    format!("{}:{line}", path.display())
                })
                .unwrap_or_else(|| path.display().to_string());
            format!("{location}: {}", e.message())
        })?;
        config.validate(path)?;
        Ok(config)
    }

    fn validate(&self, path: &Path) -> Result<(), String> {
        let named = |key: &str, msg: &str| format!("{}: key `{key}`: {msg}", path.display());
        for (name, cam) in [("camera_p", &self.camera_p), ("camera_q", &self.camera_q)] {
            if !(cam.fx.is_finite() && cam.fx > 0.0 && cam.fy.is_finite() && cam.fy > 0.0) {
                return Err(named(name, "focal lengths must be finite and positive"));
            }
            if !(cam.cx.is_finite() && cam.cy.is_finite() && cam.skew.is_finite()) {
                return Err(named(name, "principal point and skew must be finite"));
            }
        }
        let vec = |v: &[f64; 3]| Vec3::new(v[0], v[1], v[2]);
        for (key, v) in [
            ("markers.q1", &self.markers.q1),
            ("markers.q2", &self.markers.q2),
            ("markers.p3", &self.markers.p3),
        ] {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(named(key, "coordinates must be finite"));
            }
        }
        if let Some(p4) = &self.markers.p4 {
            if p4.iter().any(|c| !c.is_finite()) {
                return Err(named("markers.p4", "coordinates must be finite"));
            }
        }
        if (vec(&self.markers.q1) - vec(&self.markers.q2)).norm() <= 1e-6 {
            return Err(named("markers.q2", "q1 and q2 must be at least 1e-6 m apart"));
        }
        if vec(&self.markers.p3).norm() == 0.0 {
            return Err(named("markers.p3", "p3 must be off the optical center"));
        }
        if let Some(p4) = &self.markers.p4 {
            if (vec(p4) - vec(&self.markers.p3)).norm() <= 1e-6 {
                return Err(named("markers.p4", "p3 and p4 must be at least 1e-6 m apart"));
            }
        }
        for (key, value) in [
            ("solver.imag_tol", self.solver.imag_tol),
            ("solver.residual_tol", self.solver.residual_tol),
        ] {
            if let Some(tol) = value {
                if !(tol.is_finite() && tol > 0.0) {
                    return Err(named(key, "tolerance must be finite and positive"));
                }
            }
        }
        if !(self.scenario.separation.is_finite() && self.scenario.separation > 0.0) {
            return Err(named("scenario.separation", "must be finite and positive"));
        }
        if self.scenario.image_width == 0 || self.scenario.image_height == 0 {
            return Err(named("scenario.image_width", "image size must be nonzero"));
        }
        Ok(())
    }

    pub fn rig(&self) -> RigConfig {
        let cam = |c: &CameraSection| {
            CameraIntrinsics::new(c.fx, c.fy, c.cx, c.cy).with_skew(c.skew)
        };
        let vec = |v: &[f64; 3]| Vec3::new(v[0], v[1], v[2]);
        RigConfig {
            intrinsics_p: cam(&self.camera_p),
            intrinsics_q: cam(&self.camera_q),
            q1: vec(&self.markers.q1),
            q2: vec(&self.markers.q2),
            p3: vec(&self.markers.p3),
            p4: self.markers.p4.as_ref().map(vec),
        }
    }

    /// Config tolerances over the library defaults, then CLI flags over
    /// the config.
    pub fn solver_params(&self, no_filter: bool, imag_tol_flag: Option<f64>) -> SolverParams {
        let mut params = SolverParams::default();
        if let Some(tol) = self.solver.imag_tol {
            params.imag_tol = tol;
        }
        if let Some(tol) = self.solver.residual_tol {
            params.residual_tol = tol;
        }
        if let Some(keep) = self.solver.plausibility_filter {
            params.plausibility_filter = keep;
        }
        if let Some(tol) = imag_tol_flag {
            params.imag_tol = tol;
        }
        if no_filter {
            params.plausibility_filter = false;
        }
        params
    }
}
