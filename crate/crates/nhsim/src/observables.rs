//! Conserved and monitored functionals of a wave field: mass, center of
//! mass, momentum, energy, the quadratic phase constants, and the time
//! series container used by the drift diagnostics.
//!
//! Moments are computed by quadrature in physical space; momentum uses the
//! Fourier-side expression `sum xi |u^(xi)|^2`, which is the numerically
//! stable representation. Moment integrals are boundary-sensitive when the
//! interaction grows at infinity, so the functions that need decay log a
//! warning when the outer eighth of the domain carries more than
//! [`BOUNDARY_MASS_FRACTION`] of the total mass.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{
    self, gradient_axis, integrate, integrate_complex, norm_sq, transform_forward, Vec2, WaveField,
};
use crate::kernels::KernelTable;

/// Moment-based observables tolerate at most this fraction of the total
/// mass in the outer eighth of the domain.
pub const BOUNDARY_MASS_FRACTION: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum ObservableError {
    #[error("field has zero mass; frame vectors are undefined")]
    ZeroField,
    #[error(
        "boundary leak: fraction {fraction:.3e} of the mass sits in the outer eighth \
         (threshold {threshold:.3e})"
    )]
    BoundaryLeak { fraction: f64, threshold: f64 },
}

/// Center-of-mass frame data: mass `M`, momentum per unit mass (the drift
/// velocity of the center of mass), and center of mass per unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVectors {
    pub mass: f64,
    pub velocity: Vec2,
    pub center: Vec2,
}

/// The three quadratic functionals of the initial datum that drive every
/// closed-form phase: `grad_sq = ||grad u||^2`, `cross = Im \int conj(u)
/// x.grad u` (position-momentum cross term), `second_moment = ||x u||^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConstants {
    pub grad_sq: f64,
    pub cross: f64,
    pub second_moment: f64,
}

impl PhaseConstants {
    /// Cauchy-Schwarz: `cross^2 <= grad_sq * second_moment`.
    pub fn is_consistent(&self) -> bool {
        self.grad_sq >= 0.0
            && self.second_moment >= 0.0
            && self.cross * self.cross <= self.grad_sq * self.second_moment * (1.0 + 1e-12) + 1e-30
    }
}

/// One record of the monitored functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub mass: f64,
    pub energy: f64,
    pub momentum: Vec2,
    pub center_of_mass: Vec2,
    pub grad_norm: f64,
    pub weighted_norm: f64,
}

/// Time series of observable records with strictly increasing times.
#[derive(Debug, Clone, Default)]
pub struct ObservableSeries {
    times: Vec<f64>,
    records: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; panics if `time` does not increase.
    pub fn push(&mut self, time: f64, record: ObservableRecord) {
        if let Some(&last) = self.times.last() {
            assert!(time > last, "series times must be strictly increasing");
        }
        self.times.push(time);
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn records(&self) -> &[ObservableRecord] {
        &self.records
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &ObservableRecord)> {
        self.times.iter().copied().zip(self.records.iter())
    }
}

/// Fraction of `||u||^2` carried by points with `max_axis |x| >= 7L/8`.
pub fn boundary_mass_fraction(u: &WaveField) -> f64 {
    let grid = u.grid();
    let edge = 0.875 * grid.half_width();
    let mut outer = 0.0;
    let mut total = 0.0;
    for (i, v) in u.values().iter().enumerate() {
        let p = grid.point(i);
        let w = v.norm_sqr();
        total += w;
        if p[0].abs() >= edge || (grid.dim() == 2 && p[1].abs() >= edge) {
            outer += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

/// Errors when the boundary-mass guard is violated.
pub fn check_boundary_mass(u: &WaveField) -> Result<(), ObservableError> {
    let fraction = boundary_mass_fraction(u);
    if fraction >= BOUNDARY_MASS_FRACTION {
        Err(ObservableError::BoundaryLeak {
            fraction,
            threshold: BOUNDARY_MASS_FRACTION,
        })
    } else {
        Ok(())
    }
}

fn warn_on_boundary_mass(u: &WaveField, what: &str) {
    let fraction = boundary_mass_fraction(u);
    if fraction >= BOUNDARY_MASS_FRACTION {
        log::warn!(
            "{what}: boundary mass fraction {fraction:.3e} exceeds {BOUNDARY_MASS_FRACTION:.1e}; \
             moment values may be unreliable"
        );
    }
}

/// `||u||_2^2`.
pub fn mass(u: &WaveField) -> f64 {
    let rho: Vec<f64> = u.values().iter().map(|v| v.norm_sqr()).collect();
    integrate(&rho, u.grid())
}

/// Center of mass `X[u] = \int y |u(y)|^2 dy` (not normalized by the mass).
pub fn center_of_mass(u: &WaveField) -> Vec2 {
    warn_on_boundary_mass(u, "center_of_mass");
    let grid = u.grid();
    let mut acc = [0.0; 2];
    for (i, v) in u.values().iter().enumerate() {
        let p = grid.point(i);
        let w = v.norm_sqr();
        acc[0] += p[0] * w;
        acc[1] += p[1] * w;
    }
    let hd = grid.spacing().powi(grid.dim() as i32);
    [acc[0] * hd, acc[1] * hd]
}

/// Momentum `P[u] = \int xi |u^(xi)|^2 dxi` (equivalently `Im \int conj(u)
/// grad u`).
pub fn momentum(u: &WaveField) -> Vec2 {
    let grid = u.grid();
    let spec = transform_forward(u);
    let mut acc = [0.0; 2];
    for (i, c) in spec.coeffs().iter().enumerate() {
        let xi = grid.wavenumber(i);
        let w = c.norm_sqr();
        acc[0] += xi[0] * w;
        acc[1] += xi[1] * w;
    }
    let dxi = (PI / grid.half_width()).powi(grid.dim() as i32);
    [acc[0] * dxi, acc[1] * dxi]
}

/// `||grad u||_2^2` via the spectral kinetic sum `\int |xi|^2 |u^|^2 dxi`.
pub fn grad_norm_sq(u: &WaveField) -> f64 {
    let grid = u.grid();
    let spec = transform_forward(u);
    let dxi = (PI / grid.half_width()).powi(grid.dim() as i32);
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| norm_sq(grid.wavenumber(i)) * c.norm_sqr())
        .sum::<f64>()
        * dxi
}

/// `||x u||_2^2`.
pub fn second_moment(u: &WaveField) -> f64 {
    let grid = u.grid();
    let rho: Vec<f64> = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| norm_sq(grid.point(i)) * v.norm_sqr())
        .collect();
    integrate(&rho, grid)
}

/// Interaction part `1/2 \iint (V+R)(x-y) |u(x)|^2 |u(y)|^2 dx dy`, reduced
/// to one linear convolution and one quadrature.
pub fn interaction_integral(u: &WaveField, table: &KernelTable) -> f64 {
    let grid = u.grid();
    let rho: Vec<f64> = u.values().iter().map(|v| v.norm_sqr()).collect();
    let conv = grid::linear_convolve(table.full_doubled(), &rho, grid)
        .expect("kernel table matches the grid by construction");
    let prod: Vec<f64> = conv.iter().zip(&rho).map(|(c, r)| c * r).collect();
    integrate(&prod, grid)
}

/// Conserved energy of the Hartree flow:
/// `E[u] = 1/2 ||grad u||^2 - 1/2 \iint (V+R)(x-y) |u(x)|^2 |u(y)|^2`.
///
/// The gradient term is evaluated spectrally; the double integral collapses
/// to a convolution. With the kernel `lambda |x|^gamma` this is the
/// quantity held fixed by the flow (drift of either term separately is the
/// diagnostic of interest).
pub fn energy(u: &WaveField, table: &KernelTable) -> f64 {
    0.5 * grad_norm_sq(u) - 0.5 * interaction_integral(u, table)
}

/// Conserved energy of the harmonic interaction flow
/// `i u_t + 1/2 Lap u + eta/2 |x|^2 u = -zeta/2 (|x|^2 * |u|^2) u`:
/// `E = 1/2 ||grad u||^2 - eta/2 ||x u||^2 - zeta/4 \iint |x-y|^2 rho rho`,
/// with the double integral expanded through the moments.
pub fn energy_harmonic(u: &WaveField, eta: f64, zeta: f64) -> f64 {
    let m = mass(u);
    let x = center_of_mass(u);
    let e2 = second_moment(u);
    let quad_double = 2.0 * (m * e2 - norm_sq(x));
    0.5 * grad_norm_sq(u) - 0.5 * eta * e2 - 0.25 * zeta * quad_double
}

/// `||<V>^{1/2} u||_2` for a sampled potential weight on the grid.
pub fn weighted_norm(u: &WaveField, v_main: &[f64]) -> f64 {
    let rho: Vec<f64> = u
        .values()
        .iter()
        .zip(v_main)
        .map(|(a, v)| (1.0 + v * v).sqrt() * a.norm_sqr())
        .collect();
    integrate(&rho, u.grid()).sqrt()
}

/// The constants `(c, d, e)` of the quadratic phase formulas.
pub fn phase_constants(u: &WaveField) -> PhaseConstants {
    warn_on_boundary_mass(u, "phase_constants");
    let grid = u.grid();
    let mut integrand = vec![Complex64::default(); grid.len()];
    for axis in 0..grid.dim() {
        let du = gradient_axis(u, axis);
        for (i, v) in integrand.iter_mut().enumerate() {
            *v += u.values()[i].conj() * grid.point(i)[axis] * du.values()[i];
        }
    }
    let cross = integrate_complex(&integrand, grid);
    PhaseConstants {
        grad_sq: grad_norm_sq(u),
        cross: cross.im,
        second_moment: second_moment(u),
    }
}

/// Mass and the normalized momentum / center-of-mass vectors.
pub fn frame_vectors(u: &WaveField) -> Result<FrameVectors, ObservableError> {
    let m = mass(u);
    if !(m > 0.0) {
        return Err(ObservableError::ZeroField);
    }
    let p = momentum(u);
    let x = center_of_mass(u);
    Ok(FrameVectors {
        mass: m,
        velocity: [p[0] / m, p[1] / m],
        center: [x[0] / m, x[1] / m],
    })
}

/// Physical-space momentum `Im \int conj(u) grad u`, used to cross-check the
/// spectral expression.
pub fn momentum_physical(u: &WaveField) -> Vec2 {
    let grid = u.grid();
    let mut out = [0.0; 2];
    for axis in 0..grid.dim() {
        let du = gradient_axis(u, axis);
        let integrand: Vec<Complex64> = u
            .values()
            .iter()
            .zip(du.values())
            .map(|(a, d)| a.conj() * d)
            .collect();
        out[axis] = integrate_complex(&integrand, grid).im;
    }
    out
}

/// Full record of the monitored functionals for the series.
pub fn observe(u: &WaveField, table: Option<&KernelTable>, energy_value: f64) -> ObservableRecord {
    ObservableRecord {
        mass: mass(u),
        energy: energy_value,
        momentum: momentum(u),
        center_of_mass: center_of_mass(u),
        grad_norm: grad_norm_sq(u).sqrt(),
        weighted_norm: match table {
            Some(t) => weighted_norm(u, t.v_main()),
            None => {
                // harmonic runs: weight by the bare quadratic potential
                let grid = u.grid();
                let v: Vec<f64> = (0..grid.len()).map(|i| norm_sq(grid.point(i))).collect();
                weighted_norm(u, &v)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernels::{KernelTable, PotentialSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gauss_grid() -> Grid {
        Grid::new(1, 1024, 20.0).unwrap()
    }

    fn gaussian(grid: Grid) -> WaveField {
        WaveField::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0))
    }

    /// Shift a field by a whole number of cells (periodic index shift, exact).
    fn shift_cells(u: &WaveField, cells: i64) -> WaveField {
        let g = *u.grid();
        let n = g.len() as i64;
        let vals: Vec<Complex64> = (0..n)
            .map(|j| u.values()[((j - cells).rem_euclid(n)) as usize])
            .collect();
        WaveField::new(g, vals, u.time).unwrap()
    }

    #[test]
    fn mass_of_zero_and_gaussian() {
        let g = gauss_grid();
        assert_eq!(mass(&WaveField::zeros(g)), 0.0);
        assert_relative_eq!(mass(&gaussian(g)), (PI / 2.0).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn mass_is_translation_invariant() {
        let u = gaussian(gauss_grid());
        let shifted = shift_cells(&u, 37);
        assert_relative_eq!(mass(&shifted), mass(&u), epsilon = 1e-12);
    }

    #[test]
    fn center_of_mass_even_field() {
        let u = gaussian(gauss_grid());
        assert!(center_of_mass(&u)[0].abs() <= 1e-12);
    }

    #[test]
    fn center_of_mass_shifted_gaussian() {
        let g = gauss_grid();
        let u = WaveField::from_fn(g, |x| Complex64::new((-(x[0] - 1.0).powi(2)).exp(), 0.0));
        let m = mass(&u);
        assert_relative_eq!(center_of_mass(&u)[0], m, epsilon = 1e-8);
    }

    #[test]
    fn center_of_mass_shift_covariance() {
        let g = gauss_grid();
        let u = gaussian(g);
        let cells = 64i64;
        let s = cells as f64 * g.spacing();
        let shifted = shift_cells(&u, cells);
        let lhs = center_of_mass(&shifted)[0];
        let rhs = center_of_mass(&u)[0] + mass(&u) * s;
        assert!((lhs - rhs).abs() <= 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn momentum_of_real_field_vanishes() {
        let u = gaussian(gauss_grid());
        assert!(momentum(&u)[0].abs() <= 1e-12);
    }

    #[test]
    fn momentum_of_modulated_gaussian() {
        let g = gauss_grid();
        let k = PI / g.half_width() * 16.0;
        let u = WaveField::from_fn(g, |x| Complex64::from_polar((-x[0] * x[0]).exp(), k * x[0]));
        assert_relative_eq!(momentum(&u)[0], mass(&u) * k, epsilon = 1e-8);
    }

    #[test]
    fn momentum_modulation_covariance() {
        let g = gauss_grid();
        let u = gaussian(g);
        let k = PI / g.half_width() * 8.0;
        let modulated =
            WaveField::from_fn(g, |x| Complex64::from_polar((-x[0] * x[0]).exp(), k * x[0]));
        let lhs = momentum(&modulated)[0] - momentum(&u)[0];
        assert!((lhs - mass(&u) * k).abs() <= 1e-10, "delta {lhs}");
    }

    #[test]
    fn spectral_and_physical_momentum_agree() {
        let g = gauss_grid();
        let u = WaveField::from_fn(g, |x| {
            Complex64::from_polar(
                (-(x[0] - 0.5).powi(2)).exp(),
                0.8 * x[0] + 0.2 * x[0] * x[0],
            )
        });
        let ps = momentum(&u)[0];
        let pp = momentum_physical(&u)[0];
        assert!((ps - pp).abs() <= 1e-10 * ps.abs().max(1.0), "{ps} vs {pp}");
    }

    #[test]
    fn free_energy_of_gaussian() {
        let g = gauss_grid();
        let u = gaussian(g);
        // lambda = 0 has no kernel table; energy reduces to the kinetic term
        assert_relative_eq!(
            0.5 * grad_norm_sq(&u),
            0.5 * (PI / 2.0).sqrt(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn energy_zero_field() {
        let g = gauss_grid();
        let spec = PotentialSpec::power(1.5, 1.0).unwrap();
        let table = KernelTable::build(&spec, &g).unwrap();
        assert_eq!(energy(&WaveField::zeros(g), &table), 0.0);
    }

    #[test]
    fn quadratic_energy_matches_moment_expansion() {
        // iint |x-y|^2 rho rho = 2 (M e - |X|^2); with coupling lambda the
        // interaction term is lambda/2 * that
        let g = gauss_grid();
        let lambda = 0.5;
        let u = WaveField::from_fn(g, |x| {
            Complex64::from_polar((-(x[0] - 1.0).powi(2)).exp(), 0.5 * x[0])
        });
        let spec = PotentialSpec::power(2.0, lambda).unwrap();
        let table = KernelTable::build(&spec, &g).unwrap();
        let m = mass(&u);
        let e2 = second_moment(&u);
        let x = center_of_mass(&u)[0];
        let expect = 0.5 * grad_norm_sq(&u) - 0.5 * lambda * 2.0 * (m * e2 - x * x);
        assert_relative_eq!(energy(&u, &table), expect, epsilon = 1e-8);
    }

    #[test]
    fn phase_constants_of_gaussian() {
        let u = gaussian(gauss_grid());
        let k = phase_constants(&u);
        let root = (PI / 2.0).sqrt();
        assert_relative_eq!(k.grad_sq, root, epsilon = 1e-8);
        assert!(k.cross.abs() <= 1e-10);
        assert_relative_eq!(k.second_moment, 0.25 * root, epsilon = 1e-8);
    }

    #[test]
    fn second_moment_shift_expansion() {
        let g = gauss_grid();
        let u = WaveField::from_fn(g, |x| Complex64::new((-(x[0] - 0.5).powi(2)).exp(), 0.0));
        let cells = 32i64;
        let s = cells as f64 * g.spacing();
        let shifted = shift_cells(&u, cells);
        let lhs = second_moment(&shifted);
        let rhs = second_moment(&u) + 2.0 * s * center_of_mass(&u)[0] + s * s * mass(&u);
        assert_relative_eq!(lhs, rhs, epsilon = 1e-8);
    }

    #[test]
    fn cross_constant_of_modulated_data() {
        // for u = e^{i k x} g with real g, cross = k * X[u]
        let g = gauss_grid();
        let k = 0.7;
        let u = WaveField::from_fn(g, |x| {
            Complex64::from_polar((-(x[0] - 1.0).powi(2)).exp(), k * x[0])
        });
        let pc = phase_constants(&u);
        let x = center_of_mass(&u)[0];
        assert_relative_eq!(pc.cross, k * x, epsilon = 1e-8);
        // centered data: cross vanishes
        let centered =
            WaveField::from_fn(g, |x| Complex64::from_polar((-x[0] * x[0]).exp(), k * x[0]));
        assert!(phase_constants(&centered).cross.abs() <= 1e-10);
    }

    #[test]
    fn frame_vectors_basic_cases() {
        let g = gauss_grid();
        assert_eq!(
            frame_vectors(&WaveField::zeros(g)).unwrap_err(),
            ObservableError::ZeroField
        );
        let even = gaussian(g);
        let f = frame_vectors(&even).unwrap();
        assert!(f.velocity[0].abs() <= 1e-12 && f.center[0].abs() <= 1e-12);

        let shifted = WaveField::from_fn(g, |x| Complex64::new((-(x[0] - 1.0).powi(2)).exp(), 0.0));
        let f = frame_vectors(&shifted).unwrap();
        assert_relative_eq!(f.center[0], 1.0, epsilon = 1e-8);
        assert!(f.velocity[0].abs() <= 1e-10);

        let k = PI / g.half_width() * 16.0;
        let modulated =
            WaveField::from_fn(g, |x| Complex64::from_polar((-x[0] * x[0]).exp(), k * x[0]));
        let f = frame_vectors(&modulated).unwrap();
        assert_relative_eq!(f.velocity[0], k, epsilon = 1e-8);
        assert!(f.center[0].abs() <= 1e-10);
    }

    #[test]
    fn series_rejects_non_increasing_times() {
        let mut s = ObservableSeries::new();
        let rec = ObservableRecord {
            mass: 1.0,
            energy: 0.0,
            momentum: [0.0; 2],
            center_of_mass: [0.0; 2],
            grad_norm: 0.0,
            weighted_norm: 0.0,
        };
        s.push(0.0, rec);
        s.push(0.5, rec);
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            let mut s2 = s.clone();
            s2.push(0.5, rec);
        }));
        assert!(r.is_err());
    }

    #[test]
    fn boundary_fraction_flags_leaky_field() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let wide = WaveField::from_fn(g, |x| Complex64::new((-0.01 * x[0] * x[0]).exp(), 0.0));
        assert!(boundary_mass_fraction(&wide) > BOUNDARY_MASS_FRACTION);
        assert!(check_boundary_mass(&wide).is_err());
        let tight = gaussian(gauss_grid());
        assert!(check_boundary_mass(&tight).is_ok());
    }

    proptest! {
        #[test]
        fn cauchy_schwarz_on_random_smooth_fields(seed in 0u64..200) {
            let g = Grid::new(1, 256, 12.0).unwrap();
            let mut state = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(99);
            let mut rnd = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let (a1, a2, k1, k2, s1) = (rnd() * 2.0, rnd() * 2.0, rnd() * 3.0, rnd() * 3.0, rnd());
            let u = WaveField::from_fn(g, |x| {
                Complex64::from_polar((-(x[0] - s1).powi(2)).exp(), k1 * x[0])
                    * a1 + Complex64::from_polar((-0.5 * x[0] * x[0]).exp(), k2 * x[0]) * a2
            });
            let pc = phase_constants(&u);
            prop_assert!(pc.is_consistent(), "{pc:?}");
        }
    }
}
