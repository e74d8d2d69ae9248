//! Embedded sanity suite: zero-noise roundtrips on random scenes, the
//! resultant/evaluation commutation oracle, and the reprojection-cost
//! identities. Runs in a few seconds; every check has a stable name so a
//! failure can be reported as `selftest: <name>: <reason>`.

use mutloc::geometry::{rotation_error_deg, Pose};
use mutloc::polysolve::{
    real_roots, resultant_quadratics, resultant_quartic_quadratic, UniPoly, Var,
};
use mutloc::sim::{random_scenario, simulate_observation};
use mutloc::solver::{build_scale_system, reprojection_cost, solve_mutual_pose};
use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3};

/// Tolerance for the scale-residual check; `MUTLOC_SELFTEST_RESIDUAL_TOL`
/// overrides it (used by the test suite to force a named failure).
const RESIDUAL_TOL: f64 = 1e-6;

type CheckResult = Result<String, String>;

pub fn run() -> Result<(), (&'static str, String)> {
    let checks: [(&'static str, fn() -> CheckResult); 4] = [
        ("zero-noise-roundtrip", zero_noise_roundtrip),
        ("scale-residuals", scale_residuals),
        ("resultant-evaluation", resultant_evaluation),
        ("reprojection-cost", reprojection_identities),
    ];
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("selftest {name}: ok ({detail})"),
            Err(reason) => return Err((name, reason)),
        }
    }
    Ok(())
}

fn residual_tol() -> f64 {
    match std::env::var("MUTLOC_SELFTEST_RESIDUAL_TOL") {
        Ok(v) => v
            .parse()
            .unwrap_or_else(|_| panic!("MUTLOC_SELFTEST_RESIDUAL_TOL must be a float, got {v:?}")),
        Err(_) => RESIDUAL_TOL,
    }
}

fn zero_noise_roundtrip() -> CheckResult {
    let mut worst_t = 0.0f64;
    let mut worst_r = 0.0f64;
    for k in 0..25 {
        let spec = random_scenario(0x5E1F7E57, k);
        let obs = simulate_observation(&spec, 0).map_err(|e| e.to_string())?;
        let report =
            solve_mutual_pose(&spec.rig, &obs).map_err(|e| format!("scene {k}: {e}"))?;
        worst_t = worst_t.max((report.best.pose.translation - spec.pose_gt.translation).norm());
        worst_r = worst_r.max(rotation_error_deg(
            &spec.pose_gt.rotation,
            &report.best.pose.rotation,
        ));
    }
    if worst_t < 1e-5 && worst_r < 1e-4 {
        Ok(format!("25 scenes, worst {worst_t:.1e} m / {worst_r:.1e} deg"))
    } else {
        Err(format!(
            "zero-noise pose error {worst_t:.3e} m / {worst_r:.3e} deg exceeds 1e-5 m / 1e-4 deg"
        ))
    }
}

fn scale_residuals() -> CheckResult {
    let tol = residual_tol();
    let mut worst = 0.0f64;
    for k in 0..25 {
        let spec = random_scenario(0x5E1F7E57, k);
        let obs = simulate_observation(&spec, 0).map_err(|e| e.to_string())?;
        let report =
            solve_mutual_pose(&spec.rig, &obs).map_err(|e| format!("scene {k}: {e}"))?;
        let s = &report.best.scales;
        let scale = (s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3).max(1.0);
        for residual in s.residuals {
            worst = worst.max(residual / scale);
        }
    }
    if worst <= tol {
        Ok(format!("worst relative residual {worst:.1e} <= {tol:.1e}"))
    } else {
        Err(format!(
            "distance-equation residual {worst:.3e} exceeds tolerance {tol:.1e}"
        ))
    }
}

/// The resultant of the scale-system quadratics must commute with
/// evaluation: plugging numbers into the eliminated polynomial equals the
/// determinant of the Sylvester matrix of the evaluated inputs.
fn resultant_evaluation() -> CheckResult {
    let samples = [-1.7, -0.3, 0.6, 1.9, 3.2];
    let mut worst = 0.0f64;
    for k in 0..8 {
        let spec = random_scenario(0x0D0C5EED, k);
        let obs = simulate_observation(&spec, 0).map_err(|e| e.to_string())?;
        let system = build_scale_system(&spec.rig, &obs).map_err(|e| e.to_string())?;
        let (f, g, h) = system.quadratics();
        let r = resultant_quadratics(f, g);
        let r2 = resultant_quartic_quadratic(&r, h);

        for &s1 in &samples {
            for &s3 in &samples {
                let fv = [f[0].eval(s1), f[1].eval(s1), f[2].eval(s1)];
                let gv = [g[0].eval(s3), g[1].eval(s3), g[2].eval(s3)];
                let det = Matrix4::new(
                    fv[2], fv[1], fv[0], 0.0, //
                    0.0, fv[2], fv[1], fv[0], //
                    gv[2], gv[1], gv[0], 0.0, //
                    0.0, gv[2], gv[1], gv[0],
                )
                .determinant();
                let direct = r.eval(s1, s3);
                // Comparison scale tracks the evaluated monomial growth, not
                // just the raw coefficients.
                let scale = r.max_abs_coeff() * s1.abs().max(s3.abs()).max(1.0).powi(4);
                worst = worst.max((det - direct).abs() / scale.max(1e-300));
            }

            // Same commutation for the second elimination: r as a quartic
            // in s3 at fixed s1, against the third equation's quadratic.
            let rv: Vec<f64> = (0..=4)
                .map(|j| {
                    (0..=r.degree_s1())
                        .map(|i| r.coeff(i, j) * s1.powi(i as i32))
                        .sum()
                })
                .collect();
            let hv = [h[0].eval(s1), h[1].eval(s1), h[2].eval(s1)];
            let det6 = Matrix6::new(
                rv[4], rv[3], rv[2], rv[1], rv[0], 0.0, //
                0.0, rv[4], rv[3], rv[2], rv[1], rv[0], //
                hv[2], hv[1], hv[0], 0.0, 0.0, 0.0, //
                0.0, hv[2], hv[1], hv[0], 0.0, 0.0, //
                0.0, 0.0, hv[2], hv[1], hv[0], 0.0, //
                0.0, 0.0, 0.0, hv[2], hv[1], hv[0],
            )
            .determinant();
            let direct2 = r2.eval(s1);
            let scale2 = r2.max_abs_coeff() * s1.abs().max(1.0).powi(8);
            worst = worst.max((det6 - direct2).abs() / scale2.max(1e-300));
        }
    }

    // Root recall on a known factorization keeps the rooting path honest.
    let poly = UniPoly::from_roots(Var::S1, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    let roots = real_roots(&poly, 1e-6).map_err(|e| e.to_string())?;
    if roots.real_roots.len() != 8 {
        return Err(format!(
            "expected 8 real roots of the degree-8 product, got {}",
            roots.real_roots.len()
        ));
    }
    for (i, root) in roots.real_roots.iter().enumerate() {
        if (root - (i + 1) as f64).abs() > 1e-6 {
            return Err(format!("root {root} strayed from {}", i + 1));
        }
    }

    if worst < 1e-9 {
        Ok(format!("worst relative determinant mismatch {worst:.1e}"))
    } else {
        Err(format!(
            "resultant disagrees with evaluated Sylvester determinant by {worst:.3e}"
        ))
    }
}

fn reprojection_identities() -> CheckResult {
    let spec = random_scenario(0xC057, 0);
    let obs = simulate_observation(&spec, 0).map_err(|e| e.to_string())?;
    let at_truth = reprojection_cost(&spec.pose_gt, &spec.rig, &obs);
    if at_truth >= 1e-12 {
        return Err(format!("cost at ground truth is {at_truth:.3e}, expected ~0"));
    }
    let behind = Pose::new(Matrix3::identity(), Vector3::new(0.0, 0.0, -50.0));
    let at_behind = reprojection_cost(&behind, &spec.rig, &obs);
    if at_behind.is_finite() {
        return Err(format!(
            "behind-camera pose cost {at_behind:.3e}, expected infinite"
        ));
    }
    Ok(format!("ground-truth cost {at_truth:.1e}, behind-camera cost infinite"))
}
