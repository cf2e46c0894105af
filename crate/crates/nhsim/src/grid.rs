//! Uniform periodic grids, discrete Fourier transforms, quadrature, and
//! zero-padded linear convolution.
//!
//! The spatial domain per axis is `[-L, L)` with `n` (a power of two) equally
//! spaced points, `h = 2L/n`. The frequency axis carries wavenumbers
//! `xi_k = pi k / L` for `k = -n/2 .. n/2 - 1`, and the transform uses the
//! symmetric normalization `F f(xi) = (2 pi)^{-d/2} \int e^{-i x xi} f(x) dx`,
//! discretized by the rectangle rule. With these conventions the discrete
//! transform is exactly unitary (Parseval holds to round-off) and momenta can
//! be read off as plain sums over `xi |u^(xi)|^2`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

/// Coordinate or wavenumber vector; the second component is 0 when `dim == 1`.
pub type Vec2 = [f64; 2];

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm_sq(a: Vec2) -> f64 {
    dot(a, a)
}

pub fn scale(a: Vec2, c: f64) -> Vec2 {
    [a[0] * c, a[1] * c]
}

pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn neg(a: Vec2) -> Vec2 {
    [-a[0], -a[1]]
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("unsupported dimension {0}; only 1 and 2 are implemented")]
    UnsupportedDim(usize),
    #[error("n = {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("n = {0} is below the minimum of 8 points per axis")]
    TooFewPoints(usize),
    #[error("half-width must be positive, got {0}")]
    NonpositiveHalfWidth(f64),
    #[error("sample count {got} does not match grid ({expected} points)")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite amplitude at flat index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Uniform periodic grid on `[-L, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::UnsupportedDim(dim));
        }
        if !n.is_power_of_two() {
            return Err(GridError::NotPowerOfTwo(n));
        }
        if n < 8 {
            return Err(GridError::TooFewPoints(n));
        }
        if !(half_width > 0.0) {
            return Err(GridError::NonpositiveHalfWidth(half_width));
        }
        Ok(Grid { dim, n, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Domain half-width `L`; the domain per axis is `[-L, L)`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Grid spacing `h = 2L/n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `j` along one axis: `x_j = -L + j h`.
    pub fn axis_coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.axis_coord(j)).collect()
    }

    /// Wavenumber of FFT-storage index `k` along one axis (`pi k_signed / L`).
    pub fn axis_wavenumber(&self, k: usize) -> f64 {
        let signed = if k < self.n / 2 {
            k as f64
        } else {
            k as f64 - self.n as f64
        };
        PI * signed / self.half_width
    }

    /// Largest representable wavenumber magnitude, `pi/h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Coordinates of the flat index (row-major; axis 0 slowest).
    pub fn point(&self, idx: usize) -> Vec2 {
        match self.dim {
            1 => [self.axis_coord(idx), 0.0],
            _ => [self.axis_coord(idx / self.n), self.axis_coord(idx % self.n)],
        }
    }

    /// Wavenumber vector of the flat index in FFT storage order.
    pub fn wavenumber(&self, idx: usize) -> Vec2 {
        match self.dim {
            1 => [self.axis_wavenumber(idx), 0.0],
            _ => [
                self.axis_wavenumber(idx / self.n),
                self.axis_wavenumber(idx % self.n),
            ],
        }
    }

    /// Grid covering `[-2L, 2L)` at the same spacing; kernels that must be
    /// exact under linear convolution are tabulated here.
    pub fn doubled(&self) -> Grid {
        Grid {
            dim: self.dim,
            n: 2 * self.n,
            half_width: 2.0 * self.half_width,
        }
    }
}

/// Complex amplitudes on a grid together with a time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid,
    values: Vec<Complex64>,
    pub time: f64,
}

impl WaveField {
    pub fn new(grid: Grid, values: Vec<Complex64>, time: f64) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(GridError::NonFinite(i));
        }
        Ok(WaveField { grid, values, time })
    }

    pub fn zeros(grid: Grid) -> Self {
        WaveField {
            grid,
            values: vec![Complex64::default(); grid.len()],
            time: 0.0,
        }
    }

    /// Sample a closure over the grid points (time stamp 0).
    pub fn from_fn(grid: Grid, f: impl Fn(Vec2) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        WaveField {
            grid,
            values,
            time: 0.0,
        }
    }

    /// Gaussian wave packet `exp(i k.x) exp(-|x - c|^2 / (2 w^2))`.
    pub fn gaussian(grid: Grid, center: Vec2, wavenumber: Vec2, width: f64) -> Self {
        let inv = 1.0 / (2.0 * width * width);
        Self::from_fn(grid, |x| {
            let d = [x[0] - center[0], x[1] - center[1]];
            Complex64::from_polar((-norm_sq(d) * inv).exp(), dot(wavenumber, x))
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn has_non_finite(&self) -> bool {
        self.values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
    }

    /// Pointwise multiplication by a sampled function of position.
    pub fn multiply_pointwise(&mut self, f: impl Fn(Vec2) -> Complex64) {
        for i in 0..self.values.len() {
            self.values[i] *= f(self.grid.point(i));
        }
    }
}

/// Transform coefficients in FFT storage order (use [`Grid::wavenumber`] to
/// recover the physical wavenumber of each slot).
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    pub time: f64,
}

impl SpectralField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized FFT along every axis of a row-major `n^dim` buffer.
fn fft_nd(values: &mut [Complex64], n: usize, dim: usize, inverse: bool) {
    let fft = plan(n, inverse);
    match dim {
        1 => fft.process(values),
        2 => {
            for row in values.chunks_exact_mut(n) {
                fft.process(row);
            }
            let mut col = vec![Complex64::default(); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = values[i * n + j];
                }
                fft.process(&mut col);
                for i in 0..n {
                    values[i * n + j] = col[i];
                }
            }
        }
        _ => unreachable!("grid dimension is validated at construction"),
    }
}

/// Parity `(-1)^(k1 + k2 + ...)` of a flat index; compensates for the grid
/// starting at `-L` rather than 0.
fn parity(idx: usize, n: usize, dim: usize) -> f64 {
    let s = match dim {
        1 => idx,
        _ => idx / n + idx % n,
    };
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Discrete approximation of `(2 pi)^{-d/2} \int e^{-i x xi} f(x) dx` at the
/// grid wavenumbers. Round-trips with [`transform_inverse`] to machine
/// precision.
pub fn transform_forward(f: &WaveField) -> SpectralField {
    let grid = f.grid;
    let (n, dim) = (grid.n, grid.dim);
    let mut buf = f.values.clone();
    fft_nd(&mut buf, n, dim, false);
    let scale = grid.spacing().powi(dim as i32) * (2.0 * PI).powf(-(dim as f64) / 2.0);
    for (idx, v) in buf.iter_mut().enumerate() {
        *v *= scale * parity(idx, n, dim);
    }
    SpectralField {
        grid,
        coeffs: buf,
        time: f.time,
    }
}

/// Inverse of [`transform_forward`].
pub fn transform_inverse(f: &SpectralField) -> WaveField {
    let grid = f.grid;
    let (n, dim) = (grid.n, grid.dim);
    let mut buf: Vec<Complex64> = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, v)| v * parity(idx, n, dim))
        .collect();
    fft_nd(&mut buf, n, dim, true);
    let dxi = PI / grid.half_width;
    let scale = dxi.powi(dim as i32) * (2.0 * PI).powf(-(dim as f64) / 2.0);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    WaveField {
        grid,
        values: buf,
        time: f.time,
    }
}

/// Apply a diagonal Fourier multiplier `u <- F^{-1} [ m(xi) F u ]`.
pub fn apply_spectral_multiplier(u: &mut WaveField, m: impl Fn(Vec2) -> Complex64) {
    let (n, dim) = (u.grid.n, u.grid.dim);
    fft_nd(&mut u.values, n, dim, false);
    let norm = 1.0 / u.grid.len() as f64;
    for idx in 0..u.values.len() {
        u.values[idx] *= m(u.grid.wavenumber(idx)) * norm;
    }
    fft_nd(&mut u.values, n, dim, true);
}

/// Spectral partial derivative along `axis`.
pub fn gradient_axis(u: &WaveField, axis: usize) -> WaveField {
    let mut out = u.clone();
    apply_spectral_multiplier(&mut out, |xi| Complex64::new(0.0, xi[axis]));
    out
}

/// `||u||_2`.
pub fn l2_norm(u: &WaveField) -> f64 {
    let v: Vec<f64> = u.values().iter().map(|c| c.norm_sqr()).collect();
    integrate(&v, u.grid()).sqrt()
}

/// `||u - v||_2` for fields on the same grid.
pub fn l2_distance(u: &WaveField, v: &WaveField) -> f64 {
    assert_eq!(u.grid(), v.grid(), "fields live on different grids");
    let d: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .collect();
    integrate(&d, u.grid()).sqrt()
}

/// Rectangle-rule quadrature `h^dim * sum(samples)`; spectrally accurate for
/// smooth integrands that decay at the boundary.
pub fn integrate(samples: &[f64], grid: &Grid) -> f64 {
    assert_eq!(samples.len(), grid.len(), "sample count must match grid");
    samples.iter().sum::<f64>() * grid.spacing().powi(grid.dim as i32)
}

pub fn integrate_complex(samples: &[Complex64], grid: &Grid) -> Complex64 {
    assert_eq!(samples.len(), grid.len(), "sample count must match grid");
    samples.iter().sum::<Complex64>() * grid.spacing().powi(grid.dim as i32)
}

/// Linear (non-circular) convolution `c(x) = h^dim * sum_y a(x - y) b(y)` on
/// the grid, by zero-padded spectral multiplication.
///
/// The kernel `a` must be tabulated on the doubled grid `[-2L, 2L)` so that
/// every difference `x - y` of two grid points is a table entry; this keeps a
/// kernel that grows at infinity from wrapping around.
pub fn linear_convolve(
    kernel_doubled: &[f64],
    b: &[f64],
    grid: &Grid,
) -> Result<Vec<f64>, GridError> {
    let big = grid.doubled();
    if kernel_doubled.len() != big.len() {
        return Err(GridError::LengthMismatch {
            expected: big.len(),
            got: kernel_doubled.len(),
        });
    }
    if b.len() != grid.len() {
        return Err(GridError::LengthMismatch {
            expected: grid.len(),
            got: b.len(),
        });
    }
    let (n, dim) = (grid.n, grid.dim);
    let m = 2 * n;

    // Kernel rearranged so that slot k holds a(k h) with negative offsets
    // wrapped (a plain fftshift of the doubled-domain table).
    let mut ka = vec![Complex64::default(); big.len()];
    let mut bb = vec![Complex64::default(); big.len()];
    match dim {
        1 => {
            for k in 0..m {
                ka[k] = Complex64::new(kernel_doubled[(k + n) % m], 0.0);
            }
            for j in 0..n {
                bb[j] = Complex64::new(b[j], 0.0);
            }
        }
        _ => {
            for k1 in 0..m {
                for k2 in 0..m {
                    ka[k1 * m + k2] =
                        Complex64::new(kernel_doubled[((k1 + n) % m) * m + (k2 + n) % m], 0.0);
                }
            }
            for j1 in 0..n {
                for j2 in 0..n {
                    bb[j1 * m + j2] = Complex64::new(b[j1 * n + j2], 0.0);
                }
            }
        }
    }
    fft_nd(&mut ka, m, dim, false);
    fft_nd(&mut bb, m, dim, false);
    for i in 0..ka.len() {
        ka[i] *= bb[i];
    }
    fft_nd(&mut ka, m, dim, true);
    let scale = grid.spacing().powi(dim as i32) / big.len() as f64;
    let mut out = vec![0.0; grid.len()];
    match dim {
        1 => {
            for j in 0..n {
                out[j] = ka[j].re * scale;
            }
        }
        _ => {
            for j1 in 0..n {
                for j2 in 0..n {
                    out[j1 * n + j2] = ka[j1 * m + j2].re * scale;
                }
            }
        }
    }
    Ok(out)
}

/// Semi-discrete transform of grid samples evaluated at the scaled targets
/// `xi = x_m / s` for every grid coordinate `x_m`:
/// `out_m = (2 pi)^{-d/2} h^d sum_j exp(-i x_j . x_m / s) g_j`.
///
/// This is the resampling step of the oscillator propagator factorization.
/// Evaluated by a Bluestein chirp factorization in O(n log n) per axis.
pub fn scaled_dft(g: &[Complex64], grid: &Grid, s: f64) -> Vec<Complex64> {
    assert_eq!(g.len(), grid.len(), "sample count must match grid");
    let n = grid.n;
    match grid.dim {
        1 => scaled_dft_axis(g, grid, s),
        _ => {
            let mut out = vec![Complex64::default(); g.len()];
            for (r, row) in g.chunks_exact(n).enumerate() {
                out[r * n..(r + 1) * n].copy_from_slice(&scaled_dft_axis(row, grid, s));
            }
            let mut col = vec![Complex64::default(); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = out[i * n + j];
                }
                let t = scaled_dft_axis(&col, grid, s);
                for i in 0..n {
                    out[i * n + j] = t[i];
                }
            }
            out
        }
    }
}

/// One-axis core of [`scaled_dft`]: `out_m = (2 pi)^{-1/2} h sum_j
/// exp(-i x_j x_m / s) g_j`, via the chirp split
/// `x_j x_m = j m h^2 - (j + m) h L + L^2` and `jm = (j^2 + m^2 - (j-m)^2)/2`.
fn scaled_dft_axis(g: &[Complex64], grid: &Grid, s: f64) -> Vec<Complex64> {
    let n = g.len();
    let h = grid.spacing();
    let half_width = grid.half_width;
    let phi = h * h / s;
    let beta = h * half_width / s;
    let m = 2 * n;

    let mut a = vec![Complex64::default(); m];
    for j in 0..n {
        let jf = j as f64;
        a[j] = g[j] * Complex64::from_polar(1.0, beta * jf - 0.5 * phi * jf * jf);
    }
    let mut ker = vec![Complex64::default(); m];
    for (idx, k) in ker.iter_mut().enumerate() {
        let r = if idx <= n {
            idx as f64
        } else {
            idx as f64 - m as f64
        };
        *k = Complex64::from_polar(1.0, 0.5 * phi * r * r);
    }
    fft_nd(&mut a, m, 1, false);
    fft_nd(&mut ker, m, 1, false);
    for i in 0..m {
        a[i] *= ker[i];
    }
    fft_nd(&mut a, m, 1, true);

    let pref = h / (2.0 * PI).sqrt() / m as f64;
    let global = Complex64::from_polar(pref, -half_width * half_width / s);
    (0..n)
        .map(|mm| {
            let mf = mm as f64;
            global * Complex64::from_polar(1.0, beta * mf - 0.5 * phi * mf * mf) * a[mm]
        })
        .collect()
}
