//! The logarithmic interaction `-lambda (log|x| * |u|^2) u`: the cutoff
//! assigns the (integrable) singularity at the origin to the bounded
//! remainder, the linearization vector is zero, and the conservation
//! suite holds as in the power case.

use nhsim::grid::{Grid, WaveField};
use nhsim::kernels::{audit_assumptions, PotentialSpec};
use nhsim::solver::{run_simulation, EquationSpec, SimulationRun, SolverConfig};
use num_complex::Complex64;

fn main() {
    let spec = PotentialSpec::logarithmic(0.5).unwrap();
    let audit = audit_assumptions(&spec, 100.0, 10.0, 401).unwrap();
    print!("{}", audit.render());

    let grid = Grid::new(1, 2048, 30.0).unwrap();
    let u0 = WaveField::from_fn(grid, |x| {
        Complex64::from_polar((-(x[0] - 1.0) * (x[0] - 1.0)).exp(), 0.5 * x[0])
    });
    let run = SimulationRun {
        initial: u0,
        equation: EquationSpec::logarithmic(0.5).unwrap(),
        config: SolverConfig::new(5e-4, 1.0, 100).unwrap(),
    };
    let out = run_simulation(&run).unwrap();
    println!("\nlogarithmic run to T = 1:");
    println!("  mass drift (relative) {:.3e}", out.drifts.mass_rel);
    println!("  energy drift          {:.3e}", out.drifts.energy_abs);
    println!("  momentum drift        {:.3e}", out.drifts.momentum_abs);
    println!("  com-law deviation     {:.3e}", out.drifts.com_law_abs);
}
