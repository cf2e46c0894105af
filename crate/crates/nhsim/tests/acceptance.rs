//! Acceptance suite: every release-gating property of the simulator and
//! the exact-solution engine, one test per criterion, each printing one
//! machine-readable `CHECK` line per measurement (run with
//! `--nocapture` to see them on success).
//!
//! The tests drive the same preset code paths exposed by the `nhsim`
//! binary, so a green suite here matches green presets on the CLI.

use nhsim::preset::run_preset;
use nhsim::report::Report;

fn run(name: &str, seed: u64) -> Report {
    let dir = tempfile::tempdir().expect("temp dir");
    let report =
        run_preset(name, dir.path(), seed).unwrap_or_else(|e| panic!("preset {name} aborted: {e}"));
    print!("{}", report.render());
    report
}

fn assert_all(report: &Report) {
    assert!(report.passed(), "failing checks:\n{}", report.render());
}

/// Criterion 1: split-step solution of the quadratic flow vs. the closed
/// form on the reference configuration — relative L2 error <= 1e-3 at
/// T = 0.5, second-order refinement (ratio >= 3.5 under dt halving),
/// inside 60 s.
#[test]
fn criterion_01_gamma2_oracle_equivalence() {
    assert_all(&run("validate-gamma2", 7));
}

/// Criterion 2: harmonic-equation oracle for (eta, zeta) in
/// {(1, 0.5), (-0.5, 0.4), critical mass}, and the stripped critical-mass
/// solution matching free propagation, each within 1e-3.
#[test]
fn criterion_02_harmonic_oracle_equivalence() {
    assert_all(&run("validate-harmonic", 7));
}

/// Criterion 3: conservation sweep over gamma in {0.75, 1.5, 2} x lambda
/// in {-1, 1} at T = 1 — mass drift <= 1e-10, energy drift <= 1e-5,
/// momentum drift <= 1e-6, center-of-mass law <= 1e-5, inside 3 minutes.
#[test]
fn criterion_03_conservation_suite() {
    assert_all(&run("conservation-sweep", 7));
}

/// Criterion 4: evolving directly vs. through the center-of-mass frame
/// (forward transform, modified equation, inverse transform) agree within
/// 1e-4 relative L2 at t = 0.5 for gamma = 1.5.
#[test]
fn criterion_04_frame_equivalence() {
    assert_all(&run("frame-equivalence", 7));
}

/// Criterion 5: propagator-translation commutation identity, residual
/// <= 1e-8 on five seeded random (kappa, a, b, t) tuples.
#[test]
fn criterion_05_translation_identity() {
    assert_all(&run("translation-identity", 7));
}

/// Criterion 6: moment-phase identity deviation <= 1e-5 over T = 1 for
/// omega in {1, 0, -1}.
#[test]
fn criterion_06_phase_formula() {
    assert_all(&run("phase-formula", 7));
}

/// Criterion 7: momentum law dP/dt = eta X, residual <= 1e-4 for
/// (eta, zeta) in {(1, 0), (-0.5, 0.4)}.
#[test]
fn criterion_07_momentum_motion() {
    assert_all(&run("momentum-motion", 7));
}

/// Criterion 8: remainder-kernel bound scan (|x| <= 100, 0 < |y| <= 10,
/// 400x400) stays below C_gamma for gamma in {1.1, 1.25, 1.5, 1.75, 2},
/// the gamma = 2 ratio equals 1 within 1e-12, inside 10 s.
#[test]
fn criterion_08_kernel_bound_audit() {
    assert_all(&run("kernel-audit", 7));
}

/// Criterion 9: focusing gamma = 1.5 gradient norm is bounded (log-log
/// slope <= 0.2), and the quadratic repulsive gradient norm follows the
/// closed-form identity within 1e-3 relative up to t = 2.
#[test]
fn criterion_09_growth_bounds() {
    assert_all(&run("growth-exponents", 7));
}

/// Criterion 10: the sub-linear (gamma = 0.75, W = 0) and logarithmic
/// regimes pass the criterion-3 drift bounds, and the log-family audit
/// reports kappa = 0 with a bounded remainder.
#[test]
fn criterion_10_appendix_regimes() {
    assert_all(&run("appendix-regimes", 7));
}
