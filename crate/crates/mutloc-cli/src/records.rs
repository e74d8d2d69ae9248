//! Observation input (JSON Lines) and result output (one JSON object per
//! input record, printed to standard output).
//!
//! An observation record looks like
//! `{"frame": 17, "m1": [512.3, 260.1], "m2": [430.0, 275.9], "m3": [501.2, 266.0], "m4": [455.7, 271.3]}`
//! with `m4` optional and `frame` any JSON scalar. Markers `m1`, `m2` are
//! pixels in camera p's image; `m3`, `m4` in camera q's.

use std::fs;
use std::path::Path;

use mutloc::geometry::{Pixel, Pose};
use mutloc::solver::{ObservationPair, SolveReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationRecord {
    pub frame: serde_json::Value,
    pub m1: [f64; 2],
    pub m2: [f64; 2],
    pub m3: [f64; 2],
    #[serde(default)]
    pub m4: Option<[f64; 2]>,
}

impl ObservationRecord {
    pub fn observation(&self) -> ObservationPair {
        let px = |p: &[f64; 2]| Pixel::new(p[0], p[1]);
        ObservationPair {
            m1: px(&self.m1),
            m2: px(&self.m2),
            m3: px(&self.m3),
            m4: self.m4.as_ref().map(px),
        }
    }

    fn check_finite(&self) -> Result<(), String> {
        let pairs = [
            ("m1", Some(&self.m1)),
            ("m2", Some(&self.m2)),
            ("m3", Some(&self.m3)),
            ("m4", self.m4.as_ref()),
        ];
        for (key, coords) in pairs {
            if let Some(c) = coords {
                if !(c[0].is_finite() && c[1].is_finite()) {
                    return Err(format!("key `{key}`: coordinates must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Reads a JSON Lines observation file. Blank lines are skipped; any
/// malformed line is a parse error naming the file, line, and message.
pub fn load_observations(path: &Path) -> Result<Vec<ObservationRecord>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ObservationRecord = serde_json::from_str(line)
            .map_err(|e| format!("{}:{}: {e}", path.display(), idx + 1))?;
        record
            .check_finite()
            .map_err(|e| format!("{}:{}: {e}", path.display(), idx + 1))?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(format!("{}: no observation records", path.display()));
    }
    Ok(records)
}

/// Per-triple root accounting mirrored into the output stream.
#[derive(Debug, Serialize)]
pub struct TripleCounts {
    pub triple: &'static str,
    pub raw_real_roots: usize,
    pub positive_roots: usize,
    pub kept_roots: usize,
    pub candidates: usize,
}

#[derive(Debug, Serialize)]
pub struct SolveRecord {
    pub frame: serde_json::Value,
    pub ok: bool,
    pub markers_used: usize,
    /// Row-major rotation matrix mapping frame p into frame q.
    pub rotation: [f64; 9],
    /// Same rotation as a unit quaternion, components w, x, y, z.
    pub quaternion: [f64; 4],
    pub translation: [f64; 3],
    pub cost: f64,
    pub candidates: usize,
    pub roots: Vec<TripleCounts>,
}

#[derive(Debug, Serialize)]
pub struct FailureRecord {
    pub frame: serde_json::Value,
    pub ok: bool,
    pub markers_used: usize,
    pub error: String,
}

pub fn solve_record(
    frame: &serde_json::Value,
    markers_used: usize,
    report: &SolveReport,
) -> SolveRecord {
    let pose: &Pose = &report.best.pose;
    let r = &pose.rotation;
    let q = pose.unit_quaternion();
    SolveRecord {
        frame: frame.clone(),
        ok: true,
        markers_used,
        rotation: [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
        ],
        quaternion: [q.w, q.i, q.j, q.k],
        translation: [
            pose.translation.x,
            pose.translation.y,
            pose.translation.z,
        ],
        cost: report.best.cost,
        candidates: report.candidates.len(),
        roots: report
            .diagnostics
            .iter()
            .map(|d| TripleCounts {
                triple: d.triple.label(),
                raw_real_roots: d.raw_real_roots,
                positive_roots: d.positive_roots,
                kept_roots: d.kept_roots,
                candidates: d.candidates,
            })
            .collect(),
    }
}
