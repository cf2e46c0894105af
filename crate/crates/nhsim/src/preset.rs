//! Experiment presets: each maps one family of claims onto a concrete
//! desk-scale run with pinned tolerances, writes its artifacts into an
//! output directory, and returns a pass/fail [`Report`].
//!
//! Every preset is deterministic given its inputs; the only sampling
//! (random tuples in `translation-identity`) uses a seeded generator whose
//! seed is recorded in the report.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::closedform::{
    explicit_solution_2h, explicit_solution_nh, growth_norm_identities, mehler_propagate,
    strip_decorations_2h, verify_phase_formula, verify_translation_identity, HarmonicSetup,
    InteractionSign, PropagatorError,
};
use crate::grid::{l2_distance, Grid, GridError, WaveField};
use crate::io::{self, IoError};
use crate::kernels::{audit_assumptions, audit_kernel_bound, KernelError, PotentialSpec};
use crate::observables::{mass, ObservableError};
use crate::report::{Check, Report};
use crate::solver::{
    from_com_frame, gauge_strip, growth_diagnostics, run_simulation, to_com_frame,
    verify_momentum_motion, EquationSpec, SimulationRun, SolverConfig, SolverError,
};

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown preset `{name}`; available: {}", available.join(", "))]
    Unknown {
        name: String,
        available: Vec<&'static str>,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    OutputDir(std::io::Error),
}

pub const PRESETS: &[&str] = &[
    "validate-gamma2",
    "validate-harmonic",
    "conservation-sweep",
    "growth-exponents",
    "kernel-audit",
    "phase-formula",
    "translation-identity",
    "momentum-motion",
    "appendix-regimes",
    "frame-equivalence",
];

/// Reference desk-scale configuration: d = 1, n = 2048, L = 30.
pub fn reference_grid() -> Grid {
    Grid::new(1, 2048, 30.0).expect("reference grid is valid")
}

/// Reference wave packet `exp(i x / 2) exp(-(x-1)^2)`: nonzero momentum
/// and center of mass, so frame effects are exercised.
pub fn reference_packet(grid: Grid) -> WaveField {
    WaveField::from_fn(grid, |x| {
        Complex64::from_polar((-(x[0] - 1.0) * (x[0] - 1.0)).exp(), 0.5 * x[0])
    })
}

/// Centered Gaussian `exp(-x^2)` (zero momentum and center).
pub fn centered_gaussian(grid: Grid) -> WaveField {
    WaveField::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0))
}

/// Runs the named preset, writing artifacts under `out_dir`.
pub fn run_preset(name: &str, out_dir: &Path, seed: u64) -> Result<Report, PresetError> {
    if !PRESETS.contains(&name) {
        return Err(PresetError::Unknown {
            name: name.to_string(),
            available: PRESETS.to_vec(),
        });
    }
    std::fs::create_dir_all(out_dir).map_err(PresetError::OutputDir)?;
    match name {
        "validate-gamma2" => validate_gamma2(out_dir),
        "validate-harmonic" => validate_harmonic(out_dir),
        "conservation-sweep" => conservation_sweep(out_dir),
        "growth-exponents" => growth_exponents(out_dir),
        "kernel-audit" => kernel_audit(out_dir),
        "phase-formula" => phase_formula(out_dir),
        "translation-identity" => translation_identity(out_dir, seed),
        "momentum-motion" => momentum_motion(out_dir),
        "appendix-regimes" => appendix_regimes(out_dir),
        "frame-equivalence" => frame_equivalence(out_dir),
        _ => Err(PresetError::Unknown {
            name: name.to_string(),
            available: PRESETS.to_vec(),
        }),
    }
}

fn write_report(report: &Report, out_dir: &Path) -> Result<(), PresetError> {
    std::fs::write(out_dir.join("report.txt"), report.render()).map_err(PresetError::OutputDir)
}

fn rel_l2(a: &WaveField, b: &WaveField) -> f64 {
    l2_distance(a, b) / crate::grid::l2_norm(b).max(f64::MIN_POSITIVE)
}

/// Quadratic-interaction oracle test: split-step vs. the closed form at
/// T = 0.5 on the reference configuration, plus a dt-halving refinement
/// ratio check (second order: error ratio >= 3.5).
fn validate_gamma2(out_dir: &Path) -> Result<Report, PresetError> {
    let started = Instant::now();
    let mut report = Report::new("gamma2 closed-form oracle");
    let grid = reference_grid();
    let u0 = reference_packet(grid);
    let t_final = 0.5;
    let oracle = explicit_solution_nh(t_final, &u0, InteractionSign::Repulsive)?;

    let solve = |dt: f64| -> Result<WaveField, PresetError> {
        let run = SimulationRun {
            initial: u0.clone(),
            equation: EquationSpec::nh_direct(PotentialSpec::power(2.0, 0.5)?)?,
            config: SolverConfig::new(dt, t_final, 100)?,
        };
        Ok(run_simulation(&run)?.final_state)
    };

    let coarse = solve(5e-4)?;
    let fine = solve(2.5e-4)?;
    let err_coarse = rel_l2(&coarse, &oracle);
    let err_fine = rel_l2(&fine, &oracle);
    io::write_snapshot(&coarse, &out_dir.join("gamma2_final.snap"))?;
    io::write_snapshot(&oracle, &out_dir.join("gamma2_oracle.snap"))?;

    report.note(format!(
        "reference config: n=2048, L=30, dt=5e-4, T={t_final}, data exp(ix/2)exp(-(x-1)^2), lambda=1/2"
    ));
    report.push(Check::upper("rel-l2-error-vs-oracle", err_coarse, 1e-3));
    report.push(Check::lower(
        "dt-refinement-ratio",
        err_coarse / err_fine,
        3.5,
    ));
    report.push(Check::upper(
        "runtime-seconds",
        started.elapsed().as_secs_f64(),
        60.0,
    ));
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Harmonic-equation oracle test for several `(eta, zeta)` pairs, plus the
/// critical-mass reduction to a decorated free flow.
fn validate_harmonic(out_dir: &Path) -> Result<Report, PresetError> {
    let mut report = Report::new("harmonic closed-form oracle");
    let grid = reference_grid();
    let u0 = reference_packet(grid);
    let t_final = 0.5;
    let dt = 2.5e-4;

    let cases: Vec<(String, HarmonicSetup)> = vec![
        (
            "eta-1.0-zeta-0.5".into(),
            HarmonicSetup::from_field(&u0, 1.0, 0.5)?,
        ),
        (
            "eta--0.5-zeta-0.4".into(),
            HarmonicSetup::from_field(&u0, -0.5, 0.4)?,
        ),
        (
            "critical-mass-zeta-0.4".into(),
            HarmonicSetup::critical(&u0, 0.4)?,
        ),
    ];
    for (label, setup) in &cases {
        let run = SimulationRun {
            initial: u0.clone(),
            equation: EquationSpec::harmonic(setup.eta, setup.zeta),
            config: SolverConfig::new(dt, t_final, 200)?,
        };
        let out = run_simulation(&run)?;
        let oracle = explicit_solution_2h(t_final, &u0, setup)?;
        report.push(Check::upper(
            format!("rel-l2-{label}"),
            rel_l2(&out.final_state, &oracle),
            1e-3,
        ));
        if setup.omega == 0.0 {
            // strip the decorations: the core must follow the free flow
            let stripped = strip_decorations_2h(&out.final_state, setup, t_final);
            let free = mehler_propagate(&u0, 0.0, t_final)?;
            report.push(Check::upper(
                "critical-mass-stripped-vs-free",
                rel_l2(&stripped, &free),
                1e-3,
            ));
        }
    }
    report.note("omega = eta + zeta M decides the propagator profile".to_string());
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Conservation drifts for gamma in {0.75, 1.5, 2} x lambda in {-1, +1}
/// over T = 1 on the reference configuration.
fn conservation_sweep(out_dir: &Path) -> Result<Report, PresetError> {
    let started = Instant::now();
    let mut report = Report::new("conservation sweep");
    let grid = reference_grid();
    let u0 = reference_packet(grid);
    for gamma in [0.75, 1.5, 2.0] {
        for lambda in [-1.0, 1.0] {
            let run = SimulationRun {
                initial: u0.clone(),
                equation: EquationSpec::nh_direct(PotentialSpec::power(gamma, lambda)?)?,
                config: SolverConfig::new(5e-4, 1.0, 20)?,
            };
            let out = run_simulation(&run)?;
            let tag = format!("g{gamma}-l{lambda}");
            report.push(Check::upper(
                format!("mass-drift-{tag}"),
                out.drifts.mass_rel,
                1e-10,
            ));
            report.push(Check::upper(
                format!("energy-drift-{tag}"),
                out.drifts.energy_abs,
                1e-5,
            ));
            report.push(Check::upper(
                format!("momentum-drift-{tag}"),
                out.drifts.momentum_abs,
                1e-6,
            ));
            report.push(Check::upper(
                format!("com-law-{tag}"),
                out.drifts.com_law_abs,
                1e-5,
            ));
            io::emit_series(
                &out.series,
                grid.dim(),
                &out_dir.join(format!("series_{tag}.csv")),
            )?;
        }
    }
    report.push(Check::upper(
        "runtime-seconds",
        started.elapsed().as_secs_f64(),
        180.0,
    ));
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Growth diagnostics: the focusing run has a bounded gradient norm
/// (log-log slope near zero), and the quadratic repulsive run follows the
/// closed-form norm identities up to t = 2.
fn growth_exponents(out_dir: &Path) -> Result<Report, PresetError> {
    let mut report = Report::new("growth exponents");
    let grid = reference_grid();

    // focusing, gamma = 1.5: gradient norm stays bounded
    let focusing = SimulationRun {
        initial: reference_packet(grid),
        equation: EquationSpec::nh_direct(PotentialSpec::power(1.5, -1.0)?)?,
        config: SolverConfig::new(5e-4, 5.0, 50)?,
    };
    let out = run_simulation(&focusing)?;
    io::emit_series(
        &out.series,
        grid.dim(),
        &out_dir.join("series_focusing.csv"),
    )?;
    let fit = growth_diagnostics(&out.series, 1.5, -1.0)?;
    report.push(Check::upper(
        "focusing-grad-slope",
        fit.grad_slope,
        fit.grad_bound,
    ));
    report.push(Check::upper(
        "focusing-weighted-slope",
        fit.weighted_slope,
        fit.weighted_bound,
    ));

    // gamma = 2, lambda = 1/2, centered data: measured gradient norm vs the
    // closed-form identity, relative error over [0, 2]. The envelope grows
    // like cosh(sqrt(M) t) (~4.8x by t = 2), so this run gets a wider box
    // to keep the tail away from the boundary guard.
    let wide = Grid::new(1, 2048, 45.0)?;
    let u0 = centered_gaussian(wide);
    let quad = SimulationRun {
        initial: u0.clone(),
        equation: EquationSpec::nh_direct(PotentialSpec::power(2.0, 0.5)?)?,
        config: SolverConfig::new(5e-4, 2.0, 40)?,
    };
    let out = run_simulation(&quad)?;
    io::emit_series(
        &out.series,
        wide.dim(),
        &out_dir.join("series_quadratic.csv"),
    )?;
    let mut worst = 0.0f64;
    for (t, rec) in out.series.iter() {
        let (grad_sq_pred, _) = growth_norm_identities(&u0, t)?;
        let pred = grad_sq_pred.sqrt();
        worst = worst.max((rec.grad_norm - pred).abs() / pred);
    }
    report.push(Check::upper("quadratic-grad-norm-vs-formula", worst, 1e-3));
    let fit = growth_diagnostics(&out.series, 2.0, 0.5)?;
    if let Some((rate, bound)) = fit.exponential {
        report.push(Check::upper("quadratic-exponential-rate", rate, bound));
    }
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Remainder-kernel bound scan over gamma, with the exact-identity check
/// at gamma = 2.
fn kernel_audit(out_dir: &Path) -> Result<Report, PresetError> {
    let started = Instant::now();
    let mut report = Report::new("kernel bound audit");
    let mut table = String::new();
    for gamma in [1.1, 1.25, 1.5, 1.75, 2.0] {
        let audit = audit_kernel_bound(gamma, 100.0, 10.0, 400, 400)?;
        table.push_str(&audit.summary());
        table.push('\n');
        let measured = audit.max_ratio.unwrap_or(f64::INFINITY);
        report.push(Check::upper(
            format!("ktilde-ratio-g{gamma}"),
            measured,
            audit.bound,
        ));
        if gamma == 2.0 {
            report.push(Check::upper(
                "ktilde-gamma2-identity",
                (measured - 1.0).abs(),
                1e-12,
            ));
        }
    }
    std::fs::write(out_dir.join("kernel_audit.txt"), &table).map_err(PresetError::OutputDir)?;
    report.push(Check::upper(
        "runtime-seconds",
        started.elapsed().as_secs_f64(),
        10.0,
    ));
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Moment-phase identity for omega in {1, 0, -1} over T = 1.
fn phase_formula(out_dir: &Path) -> Result<Report, PresetError> {
    let mut report = Report::new("phase formula");
    let grid = Grid::new(1, 1024, 20.0)?;
    let u0 = centered_gaussian(grid);
    for omega in [1.0, 0.0, -1.0] {
        let dev = verify_phase_formula(&u0, omega, [1.0, 0.0], [0.5, 0.0], 1.0);
        report.push(Check::upper(format!("deviation-omega-{omega}"), dev, 1e-5));
    }
    report.note("Simpson over 200 nodes of the second moment along a fine split-step path");
    write_report(&report, out_dir)?;
    Ok(report)
}

/// The propagator-translation commutation identity on seeded random
/// `(kappa, a, b, t)` tuples.
fn translation_identity(out_dir: &Path, seed: u64) -> Result<Report, PresetError> {
    let mut report = Report::new("translation identity");
    report.note(format!("seed = {seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::new(1, 2048, 20.0)?;
    let phi = centered_gaussian(grid);
    for case in 0..5 {
        let kappa: f64 = rng.gen_range(-1.5..1.5);
        let a = [rng.gen_range(-1.0..1.0), 0.0];
        let b = [rng.gen_range(-1.0..1.0), 0.0];
        let t: f64 = rng.gen_range(0.35..1.1);
        let resid = verify_translation_identity(&phi, kappa, a, b, t)?;
        report.push(
            Check::upper(format!("residual-case-{case}"), resid, 1e-8).with_note(format!(
                "kappa={kappa:.4}, a={:.4}, b={:.4}, t={t:.4}",
                a[0], b[0]
            )),
        );
    }
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Momentum law `dP/dt = eta X` for a pure harmonic and a mixed case,
/// plus the trajectory law `X[u(t)] = M g_eta(t)` for the pure one.
fn momentum_motion(out_dir: &Path) -> Result<Report, PresetError> {
    let mut report = Report::new("momentum motion");
    let grid = Grid::new(1, 1024, 20.0)?;
    let u0 = reference_packet(grid);
    for (eta, zeta) in [(1.0, 0.0), (-0.5, 0.4)] {
        let resid = verify_momentum_motion(eta, zeta, &u0, 1.0)?;
        report.push(Check::upper(
            format!("residual-eta-{eta}-zeta-{zeta}"),
            resid,
            1e-4,
        ));
    }
    let run = SimulationRun {
        initial: u0,
        equation: EquationSpec::harmonic(1.0, 0.0),
        config: SolverConfig::new(2.5e-4, 1.0, 40)?,
    };
    let out = run_simulation(&run)?;
    report.push(Check::upper(
        "com-trajectory-eta-1",
        out.drifts.com_law_abs,
        1e-4,
    ));
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Sub-linear (`gamma <= 1`, W = 0) and logarithmic regimes: the same
/// drift bounds as the conservation sweep, plus the log-family assumption
/// audit (kappa = 0, bounded remainder).
fn appendix_regimes(out_dir: &Path) -> Result<Report, PresetError> {
    let mut report = Report::new("appendix regimes");
    let grid = reference_grid();
    let u0 = reference_packet(grid);

    let runs: Vec<(&str, EquationSpec)> = vec![
        (
            "power-g0.75",
            EquationSpec::nh_direct(PotentialSpec::power(0.75, 1.0)?)?,
        ),
        ("log", EquationSpec::logarithmic(0.5)?),
    ];
    for (tag, equation) in runs {
        let run = SimulationRun {
            initial: u0.clone(),
            equation,
            config: SolverConfig::new(5e-4, 1.0, 20)?,
        };
        let out = run_simulation(&run)?;
        report.push(Check::upper(
            format!("mass-drift-{tag}"),
            out.drifts.mass_rel,
            1e-10,
        ));
        report.push(Check::upper(
            format!("energy-drift-{tag}"),
            out.drifts.energy_abs,
            1e-5,
        ));
        report.push(Check::upper(
            format!("momentum-drift-{tag}"),
            out.drifts.momentum_abs,
            1e-6,
        ));
        report.push(Check::upper(
            format!("com-law-{tag}"),
            out.drifts.com_law_abs,
            1e-5,
        ));
        io::emit_series(
            &out.series,
            grid.dim(),
            &out_dir.join(format!("series_{tag}.csv")),
        )?;
    }

    let audit = audit_assumptions(&PotentialSpec::logarithmic(0.5)?, 100.0, 10.0, 401)?;
    std::fs::write(out_dir.join("log_assumptions.txt"), audit.render())
        .map_err(PresetError::OutputDir)?;
    report.push(Check::upper("log-family-kappa", audit.kappa, 0.0));
    let r_row = audit
        .rows
        .iter()
        .find(|r| r.name.starts_with("R:"))
        .expect("audit reports the remainder row");
    report.push(Check::upper(
        "log-family-remainder-sup",
        r_row.empirical,
        r_row.bound,
    ));
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Frame-change equivalence: evolving the packet directly under the split
/// kernel matches moving to the neutral frame, evolving the modified
/// equation, and mapping back.
fn frame_equivalence(out_dir: &Path) -> Result<Report, PresetError> {
    let mut report = Report::new("frame equivalence");
    let grid = reference_grid();
    let u0 = reference_packet(grid);
    let t_final = 0.5;
    let dt = 5e-4;
    let pot = PotentialSpec::power(1.5, 1.0)?;

    let direct = run_simulation(&SimulationRun {
        initial: u0.clone(),
        equation: EquationSpec::gh(pot)?,
        config: SolverConfig::new(dt, t_final, 100)?,
    })?;

    let (v0, frame) = to_com_frame(&u0)?;
    let modified = run_simulation(&SimulationRun {
        initial: v0,
        equation: EquationSpec::mgh(pot, frame.mass, frame)?,
        config: SolverConfig::new(dt, t_final, 100)?,
    })?;
    let mapped = from_com_frame(&modified.final_state, &frame, t_final);
    io::write_snapshot(&mapped, &out_dir.join("mapped_back.snap"))?;
    report.push(Check::upper(
        "gh-vs-mgh-roundtrip-rel-l2",
        rel_l2(&mapped, &direct.final_state),
        1e-4,
    ));

    // gauge stripping: the neutral-frame quadratic flow, with the
    // accumulated phase removed, follows the oscillator propagator
    let g2_u0 = centered_gaussian(grid);
    let m = mass(&g2_u0);
    let quad = run_simulation(&SimulationRun {
        initial: g2_u0.clone(),
        equation: EquationSpec::nh_direct(PotentialSpec::power(2.0, 0.5)?)?,
        config: SolverConfig::new(2.5e-4, 0.5, 200)?.with_snapshots(1),
    })?;
    let stripped = gauge_strip(&quad.snapshots, 0.5);
    let oracle = mehler_propagate(&g2_u0, m, 0.5)?;
    report.push(Check::upper(
        "gauge-stripped-vs-oscillator",
        rel_l2(stripped.last().unwrap(), &oracle),
        1e-4,
    ));
    write_report(&report, out_dir)?;
    Ok(report)
}
