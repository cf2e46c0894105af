//! Quadratic interaction combined with a quadratic linear potential:
//! the center of mass follows `M g_eta(t)` (driven by the linear
//! potential alone), while the dispersive profile is decided by
//! `omega = eta + zeta M`. At the critical mass `M = -eta/zeta` the two
//! quadratic effects cancel and the profile disperses freely.

use nhsim::closedform::{explicit_solution_2h, g_omega, HarmonicSetup, OmegaMode};
use nhsim::grid::{l2_distance, l2_norm, Grid, WaveField};
use nhsim::observables::center_of_mass;
use nhsim::solver::{run_simulation, EquationSpec, SimulationRun, SolverConfig};
use num_complex::Complex64;

fn main() {
    let grid = Grid::new(1, 2048, 30.0).unwrap();
    let u0 = WaveField::from_fn(grid, |x| {
        Complex64::from_polar((-(x[0] - 1.0) * (x[0] - 1.0)).exp(), 0.5 * x[0])
    });

    let (eta, zeta) = (1.0, 0.5);
    let setup = HarmonicSetup::from_field(&u0, eta, zeta).unwrap();
    println!(
        "eta = {eta}, zeta = {zeta}, M = {:.6} => omega = {:.6}",
        setup.mass(),
        setup.omega
    );

    println!("\n{:>6} {:>12} {:>12}", "t", "X[u(t)]/M", "g_eta(t)");
    let mode = OmegaMode::new(eta);
    for k in 1..=5 {
        let t = 0.1 * k as f64;
        let run = SimulationRun {
            initial: u0.clone(),
            equation: EquationSpec::harmonic(eta, zeta),
            config: SolverConfig::new(5e-4, t, usize::MAX).unwrap(),
        };
        let out = run_simulation(&run).unwrap();
        let x = center_of_mass(&out.final_state)[0] / setup.mass();
        let g = g_omega(t, mode, setup.frame.velocity, setup.frame.center)[0];
        println!("{t:>6.2} {x:>12.8} {g:>12.8}");
    }

    let t = 0.5;
    let run = SimulationRun {
        initial: u0.clone(),
        equation: EquationSpec::harmonic(eta, zeta),
        config: SolverConfig::new(2.5e-4, t, usize::MAX).unwrap(),
    };
    let out = run_simulation(&run).unwrap();
    let oracle = explicit_solution_2h(t, &u0, &setup).unwrap();
    println!(
        "\nrel L2 error vs the closed form at t = {t}: {:.3e}",
        l2_distance(&out.final_state, &oracle) / l2_norm(&u0)
    );

    // critical mass: omega = 0 exactly, free dispersion of the profile
    let critical = HarmonicSetup::critical(&u0, zeta).unwrap();
    println!(
        "critical-mass setup: eta = {:.6} makes omega = {:.1}",
        critical.eta, critical.omega
    );
}
