//! Free dispersion of a Gaussian wave packet, checked against the exact
//! solution `(1 + 2it)^{-1/2} exp(-x^2 / (1 + 2it))`.
//!
//! ```bash
//! cargo run --release --example free_wavepacket
//! ```

use nhsim::grid::{l2_distance, Grid, WaveField};
use nhsim::solver::{run_simulation, EquationSpec, SimulationRun, SolverConfig};
use num_complex::Complex64;

fn main() {
    let grid = Grid::new(1, 1024, 20.0).unwrap();
    let u0 = WaveField::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));

    println!("{:>6} {:>14} {:>14}", "t", "peak |u|", "exact peak");
    for steps in [1, 2, 4, 8] {
        let t = 0.125 * steps as f64;
        let run = SimulationRun {
            initial: u0.clone(),
            // both harmonic coefficients zero: the free Schrödinger flow
            equation: EquationSpec::harmonic(0.0, 0.0),
            config: SolverConfig::new(1e-3, t, 1000).unwrap(),
        };
        let out = run_simulation(&run).unwrap();
        let peak = out
            .final_state
            .values()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        println!(
            "{t:>6.3} {peak:>14.9} {:>14.9}",
            (1.0 + 4.0 * t * t).powf(-0.25)
        );
    }

    // pointwise comparison at t = 0.5
    let t = 0.5;
    let run = SimulationRun {
        initial: u0.clone(),
        equation: EquationSpec::harmonic(0.0, 0.0),
        config: SolverConfig::new(1e-3, t, 1000).unwrap(),
    };
    let out = run_simulation(&run).unwrap();
    let exact = WaveField::from_fn(grid, |x| {
        let denom = Complex64::new(1.0, 2.0 * t);
        (Complex64::new(-x[0] * x[0], 0.0) / denom).exp() / denom.sqrt()
    });
    println!(
        "\nL2 distance to the exact free solution at t = {t}: {:.3e}",
        l2_distance(&out.final_state, &exact)
    );
}
