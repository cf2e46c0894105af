//! The oscillator propagator `U_omega(t) = exp(it(Lap/2 + omega|x|^2/2))`
//! through its multiply–dilate–transform–multiply factorization: unitary,
//! a one-parameter group, and branch-continuous across omega = 0.

use nhsim::closedform::mehler_propagate;
use nhsim::grid::{l2_distance, Grid, WaveField};
use nhsim::observables::mass;
use num_complex::Complex64;

fn main() {
    // the dilation step resamples within the Nyquist band only for
    // |sinh(sqrt(omega) t)/sqrt(omega)| >= L h / pi, so short times need a
    // fine grid
    let grid = Grid::new(1, 2048, 20.0).unwrap();
    let u0 = WaveField::from_fn(grid, |x| {
        Complex64::from_polar((-(x[0] - 0.5) * (x[0] - 0.5)).exp(), 0.3 * x[0])
    });
    let m0 = mass(&u0);

    println!(
        "{:>8} {:>8} {:>14} {:>14}",
        "omega", "t", "mass drift", "group error"
    );
    for omega in [1.5, 0.0, -1.0] {
        for t in [0.5, 0.9] {
            let half = mehler_propagate(&u0, omega, t / 2.0).unwrap();
            let composed = mehler_propagate(&half, omega, t / 2.0).unwrap();
            let direct = mehler_propagate(&u0, omega, t).unwrap();
            println!(
                "{omega:>8.2} {t:>8.2} {:>14.3e} {:>14.3e}",
                (mass(&direct) - m0).abs() / m0,
                l2_distance(&direct, &composed)
            );
        }
    }

    // forward then backward is the identity
    let fwd = mehler_propagate(&u0, -1.0, 0.7).unwrap();
    let back = mehler_propagate(&fwd, -1.0, -0.7).unwrap();
    println!(
        "\nU(-t) U(t) round trip distance: {:.3e}",
        l2_distance(&back, &u0)
    );

    // the confined branch has singular times at multiples of pi/sqrt(|omega|)
    match mehler_propagate(&u0, -1.0, std::f64::consts::PI) {
        Err(e) => println!("at t = pi, omega = -1: {e}"),
        Ok(_) => unreachable!(),
    }
}
