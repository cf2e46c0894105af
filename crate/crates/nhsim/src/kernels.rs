//! Interaction-kernel algebra: the smooth cutoff, the divergent/bounded
//! decomposition `V + R` of the growing kernel, the linearization vector `W`,
//! the bounded remainder kernels `K` and `K~`, and numerical audits of the
//! structural assumptions those objects must satisfy.
//!
//! For the power family the full kernel is `lambda |x|^gamma` with
//! `gamma in (0, 2]`; the divergent part keeps the growth,
//! `V(x) = lambda |x|^gamma chi(|x|)`, and the remainder
//! `R(x) = lambda |x|^gamma (1 - chi(|x|))` is bounded. Subtracting the
//! value and the linear term of `V` at `x` leaves the kernel
//! `K(x, y) = V(x - y) - V(x) + y . W(x)` with
//! `W(x) = lambda gamma x <x>^{gamma-2}`, which is bounded in `x` — that
//! bound is what the audits measure.

use thiserror::Error;

use crate::grid::{dot, norm_sq, Grid, Vec2};

/// Sup of |chi'| for the quintic smoothstep (at the ramp midpoint).
const CHI_D1_SUP: f64 = 1.875;
/// Sup of |chi''| for the quintic smoothstep (10/sqrt(3)).
const CHI_D2_SUP: f64 = 5.773502691896258;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("power family requires gamma in (0, 2], got {0}")]
    GammaOutOfRange(f64),
    #[error("coupling lambda must be nonzero")]
    ZeroCoupling,
    #[error("harmonic family has no kernel table; it is handled in closed form")]
    HarmonicFamily,
    #[error("K~ requires gamma in (1, 2], got {0}")]
    KTildeGammaOutOfRange(f64),
    #[error("K~ is singular at x = 0")]
    SingularPoint,
}

/// Kernel family of the interaction `-(kernel * |u|^2) u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// `lambda |x|^gamma`, `gamma in (0, 2]`.
    Power { gamma: f64, lambda: f64 },
    /// `lambda log |x|`.
    Logarithmic { lambda: f64 },
    /// Quadratic interaction plus a quadratic linear potential, handled in
    /// closed form: `eta/2 |x|^2 u` on the left, `-zeta/2 (|x|^2 * rho) u`
    /// on the right.
    Harmonic { eta: f64, zeta: f64 },
}

/// Kernel family together with the (fixed) cutoff radii of the smooth ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub family: KernelFamily,
    /// chi vanishes at and below this radius.
    pub cutoff_inner: f64,
    /// chi is 1 at and above this radius.
    pub cutoff_outer: f64,
}

impl PotentialSpec {
    pub fn power(gamma: f64, lambda: f64) -> Result<Self, KernelError> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(KernelError::GammaOutOfRange(gamma));
        }
        if lambda == 0.0 {
            return Err(KernelError::ZeroCoupling);
        }
        Ok(PotentialSpec {
            family: KernelFamily::Power { gamma, lambda },
            cutoff_inner: 1.0,
            cutoff_outer: 2.0,
        })
    }

    pub fn logarithmic(lambda: f64) -> Result<Self, KernelError> {
        if lambda == 0.0 {
            return Err(KernelError::ZeroCoupling);
        }
        Ok(PotentialSpec {
            family: KernelFamily::Logarithmic { lambda },
            cutoff_inner: 1.0,
            cutoff_outer: 2.0,
        })
    }

    pub fn harmonic(eta: f64, zeta: f64) -> Self {
        PotentialSpec {
            family: KernelFamily::Harmonic { eta, zeta },
            cutoff_inner: 1.0,
            cutoff_outer: 2.0,
        }
    }

    /// C^2 monotone ramp: exactly 0 below `cutoff_inner`, exactly 1 above
    /// `cutoff_outer`, the quintic smoothstep in between.
    pub fn chi(&self, r: f64) -> f64 {
        let s = (r - self.cutoff_inner) / (self.cutoff_outer - self.cutoff_inner);
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
        }
    }

    /// View with pointwise kernel evaluators; rejects the harmonic family.
    pub fn tabulated(&self) -> Result<TabulatedKernel, KernelError> {
        match self.family {
            KernelFamily::Power { gamma, lambda } => Ok(TabulatedKernel {
                spec: *self,
                shape: KernelShape::Power { gamma },
                lambda,
            }),
            KernelFamily::Logarithmic { lambda } => Ok(TabulatedKernel {
                spec: *self,
                shape: KernelShape::Logarithmic,
                lambda,
            }),
            KernelFamily::Harmonic { .. } => Err(KernelError::HarmonicFamily),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum KernelShape {
    Power { gamma: f64 },
    Logarithmic,
}

/// Pointwise evaluators for the power and logarithmic families.
#[derive(Debug, Clone, Copy)]
pub struct TabulatedKernel {
    spec: PotentialSpec,
    shape: KernelShape,
    lambda: f64,
}

impl TabulatedKernel {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.shape {
            KernelShape::Power { gamma } => Some(gamma),
            KernelShape::Logarithmic => None,
        }
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    /// Full kernel `V + R` (the unsplit interaction).
    pub fn eval_full(&self, x: Vec2) -> f64 {
        let r = norm_sq(x).sqrt();
        match self.shape {
            KernelShape::Power { gamma } => self.lambda * r.powf(gamma),
            // log singularity at the origin is integrable; table builders
            // replace the singular cell by its average
            KernelShape::Logarithmic => self.lambda * r.ln(),
        }
    }

    /// Divergent part `V`: the full kernel times the cutoff. Smooth, and
    /// zero inside the inner cutoff radius.
    pub fn eval_v(&self, x: Vec2) -> f64 {
        let r = norm_sq(x).sqrt();
        if r <= self.spec.cutoff_inner {
            return 0.0;
        }
        let chi = self.spec.chi(r);
        match self.shape {
            KernelShape::Power { gamma } => self.lambda * r.powf(gamma) * chi,
            KernelShape::Logarithmic => self.lambda * r.ln() * chi,
        }
    }

    /// Bounded remainder `R = full - V`; vanishes at and beyond the outer
    /// cutoff radius. For the logarithmic family this part carries the
    /// (integrable) singularity at the origin.
    pub fn eval_r(&self, x: Vec2) -> f64 {
        let r = norm_sq(x).sqrt();
        if r >= self.spec.cutoff_outer {
            return 0.0;
        }
        let one_minus = 1.0 - self.spec.chi(r);
        match self.shape {
            KernelShape::Power { gamma } => self.lambda * r.powf(gamma) * one_minus,
            KernelShape::Logarithmic => self.lambda * r.ln() * one_minus,
        }
    }

    /// Linearization vector `W(x) = lambda gamma x <x>^{gamma-2}` for the
    /// power family (smooth everywhere thanks to the `<x>` regularization);
    /// zero for the logarithmic family, whose remainder kernel is bounded
    /// without a linear correction.
    pub fn eval_w(&self, x: Vec2) -> Vec2 {
        match self.shape {
            KernelShape::Power { gamma } => {
                let bracket = (1.0 + norm_sq(x)).powf((gamma - 2.0) / 2.0);
                [
                    self.lambda * gamma * x[0] * bracket,
                    self.lambda * gamma * x[1] * bracket,
                ]
            }
            KernelShape::Logarithmic => [0.0, 0.0],
        }
    }

    /// Remainder kernel `K(x, y) = V(x - y) - V(x) + y . W(x)`.
    pub fn eval_k(&self, x: Vec2, y: Vec2) -> f64 {
        let diff = [x[0] - y[0], x[1] - y[1]];
        self.eval_v(diff) - self.eval_v(x) + dot(y, self.eval_w(x))
    }

    /// `grad_x K(x, y)` by central differences (step 1e-4 per axis).
    pub fn eval_k_gradient(&self, x: Vec2, y: Vec2, dim: usize) -> Vec2 {
        const STEP: f64 = 1e-4;
        let mut g = [0.0; 2];
        for (axis, slot) in g.iter_mut().enumerate().take(dim) {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += STEP;
            xm[axis] -= STEP;
            *slot = (self.eval_k(xp, y) - self.eval_k(xm, y)) / (2.0 * STEP);
        }
        g
    }
}

/// Uncut remainder kernel of the pure power interaction:
/// `K~(x, y) = |x-y|^gamma - |x|^gamma + gamma |x|^{gamma-2} x.y`.
pub fn eval_k_tilde(x: Vec2, y: Vec2, gamma: f64) -> Result<f64, KernelError> {
    if !(gamma > 1.0 && gamma <= 2.0) {
        return Err(KernelError::KTildeGammaOutOfRange(gamma));
    }
    let rx = norm_sq(x).sqrt();
    if rx == 0.0 {
        return Err(KernelError::SingularPoint);
    }
    let diff = [x[0] - y[0], x[1] - y[1]];
    let rd = norm_sq(diff).sqrt();
    Ok(rd.powf(gamma) - rx.powf(gamma) + gamma * rx.powf(gamma - 2.0) * dot(x, y))
}

// error-free transformations for the compensated quadratic evaluation
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    (s, (a - (s - bp)) + (b - bp))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `(x-y)^2 - x^2 + 2 x y` evaluated with error-free transformations; the
/// naive route loses ~|x|^2 eps of absolute accuracy to cancellation, which
/// swamps the tiny `|y|^2` result when `|x| >> |y|`.
fn k_tilde_quadratic_compensated(x: f64, y: f64) -> f64 {
    let (d, d_lo) = two_sum(x, -y);
    let (d2, d2_lo) = two_prod(d, d);
    let (x2, x2_lo) = two_prod(x, x);
    let (xy, xy_lo) = two_prod(x, y);
    // sum the heads and tails by decreasing magnitude with a running
    // compensation (Neumaier)
    let terms = [
        d2,
        -x2,
        2.0 * xy,
        d2_lo,
        -x2_lo,
        2.0 * xy_lo,
        2.0 * d * d_lo,
        d_lo * d_lo,
    ];
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &t in &terms {
        let (s, e) = two_sum(sum, t);
        sum = s;
        comp += e;
    }
    sum + comp
}

/// Constant of the two-regime bound `sup_x |K~(x, y)| <= C_gamma |y|^gamma`:
/// `C = max(3^g + 2^g + g 2^{g-1}, g/2 + 9 g (4 - g) / 2)`.
pub fn kernel_bound_constant(gamma: f64) -> f64 {
    let near = 3f64.powf(gamma) + 2f64.powf(gamma) + gamma * 2f64.powf(gamma - 1.0);
    let far = gamma / 2.0 + 9.0 * gamma * (4.0 - gamma) / 2.0;
    near.max(far)
}

/// Result of scanning `|K~(x, y)| / |y|^gamma` over a sample box.
#[derive(Debug, Clone)]
pub struct KernelBoundAudit {
    pub gamma: f64,
    pub bound: f64,
    pub samples: usize,
    pub max_ratio: Option<f64>,
    /// (x, y) attaining the maximum ratio.
    pub witness: Option<(Vec2, Vec2)>,
}

impl KernelBoundAudit {
    /// An empty scan is reported as "no samples", never as a pass.
    pub fn passed(&self) -> bool {
        self.samples > 0 && self.max_ratio.is_some_and(|m| m <= self.bound)
    }

    pub fn summary(&self) -> String {
        match self.max_ratio {
            None => format!("gamma={:.4}: no samples", self.gamma),
            Some(m) => {
                let (wx, wy) = self.witness.unwrap();
                format!(
                    "gamma={:.4}: max |K~|/|y|^g = {:.6} (bound {:.6}) at x={:.4}, y={:.4} [{}]",
                    self.gamma,
                    m,
                    self.bound,
                    wx[0],
                    wy[0],
                    if self.passed() { "PASS" } else { "FAIL" }
                )
            }
        }
    }
}

/// Scan `|K~|/|y|^gamma` over `x in [-x_max, x_max]`, `0 < |y| <= y_max`
/// (one-dimensional sections; the radial profile carries the extremes).
pub fn audit_kernel_bound(
    gamma: f64,
    x_max: f64,
    y_max: f64,
    x_samples: usize,
    y_samples: usize,
) -> Result<KernelBoundAudit, KernelError> {
    if !(gamma > 1.0 && gamma <= 2.0) {
        return Err(KernelError::KTildeGammaOutOfRange(gamma));
    }
    let bound = kernel_bound_constant(gamma);
    let mut best: Option<(f64, Vec2, Vec2)> = None;
    let mut samples = 0usize;
    for i in 0..x_samples {
        let x = if x_samples == 1 {
            x_max
        } else {
            -x_max + 2.0 * x_max * i as f64 / (x_samples - 1) as f64
        };
        if x == 0.0 {
            continue;
        }
        for j in 0..y_samples {
            let y = if y_samples == 1 {
                y_max
            } else {
                -y_max + 2.0 * y_max * j as f64 / (y_samples - 1) as f64
            };
            if y == 0.0 {
                continue;
            }
            let xv = [x, 0.0];
            let yv = [y, 0.0];
            let kt = if gamma == 2.0 {
                k_tilde_quadratic_compensated(x, y)
            } else {
                eval_k_tilde(xv, yv, gamma)?
            };
            let ratio = kt.abs() / y.abs().powf(gamma);
            samples += 1;
            if best.is_none_or(|(m, _, _)| ratio > m) {
                best = Some((ratio, xv, yv));
            }
        }
    }
    Ok(KernelBoundAudit {
        gamma,
        bound,
        samples,
        max_ratio: best.map(|(m, _, _)| m),
        witness: best.map(|(_, x, y)| (x, y)),
    })
}

/// One row of the assumption audit: empirical constant vs. a bound
/// assembled from the decomposition formulas.
#[derive(Debug, Clone)]
pub struct AssumptionRow {
    pub name: &'static str,
    pub empirical: f64,
    pub bound: f64,
    pub witness: Vec2,
    /// Whether the regime under audit needs this assumption at all; rows
    /// that are not required (W = 0 regimes) are informational.
    pub required: bool,
    pub note: &'static str,
}

impl AssumptionRow {
    pub fn passed(&self) -> bool {
        !self.required || self.empirical <= self.bound
    }
}

/// Report of the assumption audit for one kernel spec.
#[derive(Debug, Clone)]
pub struct AssumptionAudit {
    pub kappa: f64,
    pub rows: Vec<AssumptionRow>,
}

impl AssumptionAudit {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(AssumptionRow::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("assumption audit (kappa = {:.6})\n", self.kappa);
        for row in &self.rows {
            out.push_str(&format!(
                "  {:<22} measured={:<12.6} bound={:<12.6} at x={:<9.4} {}{}\n",
                row.name,
                row.empirical,
                row.bound,
                row.witness[0],
                if row.passed() { "PASS" } else { "FAIL" },
                if row.note.is_empty() {
                    String::new()
                } else {
                    format!("  ({})", row.note)
                },
            ));
        }
        out
    }
}

fn fd_first(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    const STEP: f64 = 1e-4;
    (f(x + STEP) - f(x - STEP)) / (2.0 * STEP)
}

fn fd_second(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    const STEP: f64 = 1e-4;
    (f(x + STEP) - 2.0 * f(x) + f(x - STEP)) / (STEP * STEP)
}

/// Growth exponent of the gradient bound `|grad V| <= C <V>^{kappa/2}`.
pub fn kappa_exponent(spec: &PotentialSpec) -> f64 {
    match spec.family {
        KernelFamily::Power { gamma, .. } if gamma > 1.0 => 2.0 * (gamma - 1.0) / gamma,
        _ => 0.0,
    }
}

/// Scan the structural assumptions on `V`, `W`, `K`, and `R` over
/// `|x| <= x_max` (and `|y| <= y_max` for the kernel row), reporting the
/// empirical constants next to bounds assembled from the closed-form
/// estimates of the decomposition.
pub fn audit_assumptions(
    spec: &PotentialSpec,
    x_max: f64,
    y_max: f64,
    samples: usize,
) -> Result<AssumptionAudit, KernelError> {
    let kernel = spec.tabulated()?;
    let lambda = kernel.lambda().abs();
    let kappa = kappa_exponent(spec);
    let gamma = kernel.gamma();

    let xs: Vec<f64> = (0..samples)
        .map(|i| -x_max + 2.0 * x_max * i as f64 / (samples - 1) as f64)
        .filter(|&x| x.abs() > 1e-3)
        .collect();
    let ys: Vec<f64> = (0..samples)
        .map(|j| -y_max + 2.0 * y_max * j as f64 / (samples - 1) as f64)
        .filter(|&y| y != 0.0)
        .collect();

    let v = |x: f64| kernel.eval_v([x, 0.0]);
    let w0 = |x: f64| kernel.eval_w([x, 0.0])[0];

    let sup = |f: &dyn Fn(f64) -> f64| {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for &x in &xs {
            let val = f(x);
            if val > best.0 {
                best = (val, x);
            }
        }
        best
    };

    // (V1): second derivatives of V bounded
    let (v1, v1_at) = sup(&|x| fd_second(v, x).abs());
    let v1_bound = match gamma {
        Some(g) => {
            lambda
                * (g * (g - 1.0).abs().max(1.0)
                    + 2.0 * g * 2f64.powf(g - 1.0) * CHI_D1_SUP
                    + 2f64.powf(g) * CHI_D2_SUP)
        }
        None => lambda * (CHI_D2_SUP * 2f64.ln() + 2.0 * CHI_D1_SUP + 1.0),
    };

    // companion smoothness for W: second derivatives bounded
    let (w2, w2_at) = sup(&|x| fd_second(w0, x).abs());
    let w2_bound = match gamma {
        // |W''| <= lambda g (sup over the smooth profile); 6 covers the
        // worst constant of x <x>^{g-2} derivatives on g in (0, 2]
        Some(g) => lambda * g * 6.0,
        None => 1e-12, // W = 0 identically
    };

    // (V2): |V'| <= C <V>^{kappa/2}
    let (v2, v2_at) = sup(&|x| {
        let grad = fd_first(v, x).abs();
        grad / (1.0 + v(x) * v(x)).powf(kappa / 4.0)
    });
    let v2_bound = match gamma {
        Some(g) => {
            let tail = g * lambda.powf(1.0 - kappa / 2.0);
            let ramp = lambda * (g * 2f64.powf(g - 1.0) + 2f64.powf(g) * CHI_D1_SUP);
            tail.max(ramp)
        }
        None => lambda * (CHI_D1_SUP * 2f64.ln() + 1.0),
    };

    // (V3): sup_x (|K(x,y)| + |grad_x K(x,y)|) <= C <V(y)>
    let mut v3 = (f64::NEG_INFINITY, [0.0, 0.0]);
    for &y in &ys {
        let yv = [y, 0.0];
        let weight = (1.0 + kernel.eval_v(yv).powi(2)).sqrt();
        for &x in &xs {
            let xv = [x, 0.0];
            let val =
                (kernel.eval_k(xv, yv).abs() + kernel.eval_k_gradient(xv, yv, 1)[0].abs()) / weight;
            if val > v3.0 {
                v3 = (val, yv);
            }
        }
    }
    let v3_bound = match gamma {
        Some(g) if g > 1.0 => {
            let c_tilde = kernel_bound_constant(g);
            let scale_to_v = 5f64.powf(g / 2.0).max(1.25f64.powf(g / 2.0) / lambda);
            lambda
                * (c_tilde
                    + 2f64.powf(1.0 + g)
                    + 2.0 * g
                    + g * (4.0 - g)
                    + 2f64.powf(g + 1.0) * CHI_D1_SUP
                    + 2.0 * g)
                * scale_to_v
        }
        Some(g) => {
            // gamma <= 1, W = 0: |K| <= lambda (2^{g+1} + |y|^g)
            let scale_to_v = 5f64.powf(g / 2.0).max(1.25f64.powf(g / 2.0) / lambda);
            lambda
                * (2f64.powf(g + 1.0) + 1.0 + 2.0 * g + 2f64.powf(g + 1.0) * CHI_D1_SUP)
                * scale_to_v
        }
        None => {
            // |chi ln| differences grow like ln of the separation
            lambda * (4.0 + 4.0 * (1.0 + y_max).ln()) * (1.0 + 1.0 / lambda)
        }
    };

    // (V4): <x> <= C <V(x)>; only binding in the regime that uses the
    // momentum transform (power gamma > 1)
    let (v4, v4_at) = sup(&|x| (1.0 + x * x).sqrt() / (1.0 + v(x) * v(x)).sqrt());
    let v4_required = matches!(gamma, Some(g) if g > 1.0);
    let v4_bound = match gamma {
        Some(g) if g > 1.0 => {
            5f64.sqrt()
                .max(1.25f64.sqrt() * 2f64.powf(1.0 - g) / lambda)
                * 2.0
        }
        _ => f64::INFINITY,
    };

    // (R1)/(R2): remainder bounded (power) or integrable-log (logarithmic)
    let r_min_radius = x_max / (samples as f64); // smallest |x| visited, roughly
    let (r_sup, r_at) = sup(&|x| kernel.eval_r([x, 0.0]).abs());
    let r_bound = match gamma {
        Some(g) => lambda * spec.cutoff_outer.powf(g),
        None => lambda * (2f64.ln().max(r_min_radius.ln().abs()) + 1.0),
    };

    let rows = vec![
        AssumptionRow {
            name: "V1: sup |V''|",
            empirical: v1,
            bound: v1_bound,
            witness: [v1_at, 0.0],
            required: true,
            note: "",
        },
        AssumptionRow {
            name: "W:  sup |W''|",
            empirical: w2,
            bound: w2_bound.max(1e-12),
            witness: [w2_at, 0.0],
            required: true,
            note: if gamma.is_none() {
                "W = 0 for the log family"
            } else {
                ""
            },
        },
        AssumptionRow {
            name: "V2: |V'|/<V>^(k/2)",
            empirical: v2,
            bound: v2_bound,
            witness: [v2_at, 0.0],
            required: true,
            note: "",
        },
        AssumptionRow {
            name: "V3: (|K|+|K_x|)/<V(y)>",
            empirical: v3.0,
            bound: v3_bound,
            witness: v3.1,
            required: true,
            note: if gamma.is_none() {
                "audited with W = 0; the bounded log part plays the remainder role"
            } else {
                ""
            },
        },
        AssumptionRow {
            name: "V4: <x>/<V>",
            empirical: v4,
            bound: v4_bound,
            witness: [v4_at, 0.0],
            required: v4_required,
            note: if v4_required {
                ""
            } else {
                "not required: W = 0 regime"
            },
        },
        AssumptionRow {
            name: "R:  sup |R|",
            empirical: r_sup,
            bound: r_bound,
            witness: [r_at, 0.0],
            required: true,
            note: if gamma.is_none() {
                "integrable log singularity at 0; tabulated by cell average"
            } else {
                ""
            },
        },
    ];

    Ok(AssumptionAudit { kappa, rows })
}

/// Kernel samples used by the solver and the energy: `V`, `R`, and `V + R`
/// on the doubled domain (for exact linear convolutions), and `V`, `W` on
/// the main grid (for the linear-potential term and the weighted norm).
/// Built once per (spec, grid) pair; immutable afterwards.
#[derive(Debug, Clone)]
pub struct KernelTable {
    spec: PotentialSpec,
    grid: Grid,
    v_doubled: Vec<f64>,
    r_doubled: Vec<f64>,
    full_doubled: Vec<f64>,
    v_main: Vec<f64>,
    w_main: Vec<Vec2>,
}

impl KernelTable {
    pub fn build(spec: &PotentialSpec, grid: &Grid) -> Result<Self, KernelError> {
        let kernel = spec.tabulated()?;
        let big = grid.doubled();
        let is_log = kernel.gamma().is_none();
        let mut v_doubled = vec![0.0; big.len()];
        let mut r_doubled = vec![0.0; big.len()];
        let mut full_doubled = vec![0.0; big.len()];
        for i in 0..big.len() {
            let p = big.point(i);
            let vv = kernel.eval_v(p);
            let rr = if is_log && norm_sq(p) == 0.0 {
                log_zero_cell_average(kernel.lambda(), grid)
            } else {
                kernel.eval_r(p)
            };
            v_doubled[i] = vv;
            r_doubled[i] = rr;
            full_doubled[i] = vv + rr;
        }
        let v_main = (0..grid.len())
            .map(|i| kernel.eval_v(grid.point(i)))
            .collect();
        let w_main = (0..grid.len())
            .map(|i| kernel.eval_w(grid.point(i)))
            .collect();
        Ok(KernelTable {
            spec: *spec,
            grid: *grid,
            v_doubled,
            r_doubled,
            full_doubled,
            v_main,
            w_main,
        })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn v_doubled(&self) -> &[f64] {
        &self.v_doubled
    }

    pub fn r_doubled(&self) -> &[f64] {
        &self.r_doubled
    }

    /// `V + R` on the doubled domain (the unsplit kernel).
    pub fn full_doubled(&self) -> &[f64] {
        &self.full_doubled
    }

    pub fn v_main(&self) -> &[f64] {
        &self.v_main
    }

    pub fn w_main(&self) -> &[Vec2] {
        &self.w_main
    }
}

/// Average of `lambda ln |x|` over the grid cell centered at the origin;
/// stands in for the integrable singularity so the rectangle rule stays an
/// O(h^2) quadrature of the convolution there.
fn log_zero_cell_average(lambda: f64, grid: &Grid) -> f64 {
    let h = grid.spacing();
    match grid.dim() {
        // (2/h) \int_0^{h/2} ln x dx = ln(h/2) - 1
        1 => lambda * ((0.5 * h).ln() - 1.0),
        _ => {
            // numeric cell average over a subgrid (cheap, done once)
            let m = 32;
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let x = (i as f64 + 0.5) / m as f64 * h - 0.5 * h;
                    let y = (j as f64 + 0.5) / m as f64 * h - 0.5 * h;
                    acc += 0.5 * (x * x + y * y).ln();
                }
            }
            lambda * acc / (m * m) as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{linear_convolve, WaveField};
    use crate::observables;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn chi_ramp_values() {
        let spec = PotentialSpec::power(1.5, 1.0).unwrap();
        assert_eq!(spec.chi(0.5), 0.0);
        assert_eq!(spec.chi(1.0), 0.0);
        assert_eq!(spec.chi(3.0), 1.0);
        assert_eq!(spec.chi(2.0), 1.0);
        assert_relative_eq!(spec.chi(1.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn chi_is_monotone() {
        let spec = PotentialSpec::power(1.5, 1.0).unwrap();
        let mut prev = -1.0;
        for i in 0..=4000 {
            let r = i as f64 * 3.0 / 4000.0;
            let v = spec.chi(r);
            assert!(v >= prev - 1e-12, "chi not monotone at r = {r}");
            prev = v;
        }
        // finite-difference derivative nonnegative
        for i in 0..4000 {
            let r = i as f64 * 3.0 / 4000.0 + 1e-4;
            let d = (spec.chi(r + 1e-5) - spec.chi(r - 1e-5)) / 2e-5;
            assert!(d >= -1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            PotentialSpec::power(2.5, 1.0).unwrap_err(),
            KernelError::GammaOutOfRange(2.5)
        );
        assert_eq!(
            PotentialSpec::power(1.5, 0.0).unwrap_err(),
            KernelError::ZeroCoupling
        );
        assert!(PotentialSpec::harmonic(1.0, 0.5).tabulated().is_err());
    }

    #[test]
    fn eval_v_r_examples() {
        let k = PotentialSpec::power(1.5, 1.0).unwrap().tabulated().unwrap();
        assert_relative_eq!(k.eval_v([3.0, 0.0]), 3f64.powf(1.5), epsilon = 1e-12);
        assert_eq!(k.eval_r([3.0, 0.0]), 0.0);
        assert_eq!(k.eval_v([0.5, 0.0]), 0.0);
        assert_relative_eq!(k.eval_r([0.5, 0.0]), 0.5f64.powf(1.5), epsilon = 1e-12);
        assert_eq!(k.eval_w([0.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn decomposition_reconstructs_full_kernel() {
        for gamma in [0.75, 1.0, 1.5, 2.0] {
            let k = PotentialSpec::power(gamma, -0.7)
                .unwrap()
                .tabulated()
                .unwrap();
            for i in 1..400 {
                let x = [i as f64 * 0.01 * 12.0, 0.0];
                let full = -0.7 * x[0].abs().powf(gamma);
                assert!(
                    (k.eval_v(x) + k.eval_r(x) - full).abs() <= 1e-12 * full.abs().max(1.0),
                    "gamma={gamma} x={}",
                    x[0]
                );
            }
        }
    }

    #[test]
    fn remainder_is_bounded_by_cutoff_powers() {
        let lambda = 1.3;
        for gamma in [0.75, 1.5, 2.0] {
            let spec = PotentialSpec::power(gamma, lambda).unwrap();
            let k = spec.tabulated().unwrap();
            let mut sup = 0.0f64;
            for i in 0..=3000 {
                let x = [i as f64 * 0.001 * 3.0, 0.0];
                sup = sup.max(k.eval_r(x).abs());
            }
            assert!(sup <= lambda * spec.cutoff_outer.powf(gamma) + 1e-12);
            assert!(sup >= lambda * spec.cutoff_inner.powf(gamma) - 1e-12);
        }
    }

    #[test]
    fn k_vanishes_at_zero_y() {
        let k = PotentialSpec::power(1.5, 1.0).unwrap().tabulated().unwrap();
        for x in [0.2, 1.7, 15.0, -40.0] {
            assert_eq!(k.eval_k([x, 0.0], [0.0, 0.0]), 0.0);
        }
    }

    #[test]
    fn k_inside_cutoff_reduces_to_linear_term() {
        let k = PotentialSpec::power(1.5, 2.0).unwrap().tabulated().unwrap();
        let (x, y) = ([0.6, 0.0], [0.3, 0.0]);
        // |x| <= 1 and |x - y| <= 1: both V terms vanish
        assert_relative_eq!(k.eval_k(x, y), dot(y, k.eval_w(x)), epsilon = 1e-15);
    }

    #[test]
    fn k_matches_three_term_formula() {
        let lambda = 1.0;
        let gamma = 1.5;
        let spec = PotentialSpec::power(gamma, lambda).unwrap();
        let k = spec.tabulated().unwrap();
        let (x, y) = ([50.0, 0.0], [2.0, 0.0]);
        let v = |p: f64| lambda * p.abs().powf(gamma) * spec.chi(p.abs());
        let w = lambda * gamma * x[0] * (1.0 + x[0] * x[0]).powf((gamma - 2.0) / 2.0);
        let direct = v(x[0] - y[0]) - v(x[0]) + y[0] * w;
        assert!((k.eval_k(x, y) - direct).abs() <= 1e-12);
    }

    #[test]
    fn k_tilde_examples() {
        // gamma = 2 collapses to |y|^2 independent of x
        for (x, y) in [(3.0, 1.0), (-17.0, 4.0), (0.3, -2.0)] {
            let kt = eval_k_tilde([x, 0.0], [y, 0.0], 2.0).unwrap();
            assert_relative_eq!(kt, y * y, epsilon = 1e-10);
        }
        assert_eq!(eval_k_tilde([5.0, 0.0], [0.0, 0.0], 1.5).unwrap(), 0.0);
        let hand = eval_k_tilde([10.0, 0.0], [1.0, 0.0], 1.5).unwrap();
        assert_relative_eq!(hand, 0.120_639_888_568_77, epsilon = 1e-10);
        assert_eq!(
            eval_k_tilde([0.0, 0.0], [1.0, 0.0], 1.5).unwrap_err(),
            KernelError::SingularPoint
        );
        assert!(eval_k_tilde([1.0, 0.0], [1.0, 0.0], 0.9).is_err());
    }

    #[test]
    fn kernel_bound_audit_gamma_two_is_exact() {
        let audit = audit_kernel_bound(2.0, 100.0, 10.0, 101, 101).unwrap();
        assert!(audit.passed());
        let m = audit.max_ratio.unwrap();
        assert!((m - 1.0).abs() <= 1e-12, "ratio {m}");
    }

    #[test]
    fn kernel_bound_audit_sweeps_gammas() {
        for gamma in [1.1, 1.25, 1.5, 1.75, 2.0] {
            let audit = audit_kernel_bound(gamma, 100.0, 10.0, 160, 160).unwrap();
            assert!(audit.passed(), "{}", audit.summary());
        }
    }

    #[test]
    fn kernel_bound_audit_empty_scan_is_not_a_pass() {
        let audit = audit_kernel_bound(1.5, 100.0, 10.0, 160, 0).unwrap();
        assert_eq!(audit.samples, 0);
        assert!(!audit.passed());
        assert!(audit.summary().contains("no samples"));
    }

    #[test]
    fn assumption_audit_power_family() {
        let spec = PotentialSpec::power(1.5, 1.0).unwrap();
        let audit = audit_assumptions(&spec, 100.0, 10.0, 401).unwrap();
        assert_relative_eq!(audit.kappa, 2.0 * 0.5 / 1.5, epsilon = 1e-15);
        assert!(audit.passed(), "{}", audit.render());
    }

    #[test]
    fn assumption_audit_gamma_one_has_zero_kappa() {
        let spec = PotentialSpec::power(1.0, 1.0).unwrap();
        let audit = audit_assumptions(&spec, 100.0, 10.0, 401).unwrap();
        assert_eq!(audit.kappa, 0.0);
        // |V'| = 1 away from the cutoff, so the V2 constant sits near |lambda|
        let v2 = audit
            .rows
            .iter()
            .find(|r| r.name.starts_with("V2"))
            .unwrap();
        assert!(v2.empirical < 4.0, "V2 constant {}", v2.empirical);
        assert!(audit.passed(), "{}", audit.render());
    }

    #[test]
    fn assumption_audit_logarithmic_family() {
        let spec = PotentialSpec::logarithmic(0.5).unwrap();
        let audit = audit_assumptions(&spec, 100.0, 10.0, 401).unwrap();
        assert_eq!(audit.kappa, 0.0);
        assert!(audit.passed(), "{}", audit.render());
        let r_row = audit
            .rows
            .iter()
            .find(|r| r.name.starts_with("R:"))
            .unwrap();
        assert!(r_row.empirical.is_finite());
    }

    #[test]
    fn nonlocal_bridge_identity() {
        // integral of K(x, y) rho(y) dy = (V * rho)(x) - mass * V(x) + W(x).X
        let grid = Grid::new(1, 256, 10.0).unwrap();
        let spec = PotentialSpec::power(1.5, 1.0).unwrap();
        let kernel = spec.tabulated().unwrap();
        let table = KernelTable::build(&spec, &grid).unwrap();
        let u = WaveField::from_fn(grid, |x| {
            Complex64::from_polar((-(x[0] - 0.7).powi(2)).exp(), 0.4 * x[0])
        });
        let rho: Vec<f64> = u.values().iter().map(|v| v.norm_sqr()).collect();
        let m = observables::mass(&u);
        let xcom = observables::center_of_mass(&u);
        let v_conv = linear_convolve(table.v_doubled(), &rho, &grid).unwrap();
        let h = grid.spacing();
        let mut worst = 0.0f64;
        for i in 0..grid.len() {
            let x = grid.point(i);
            let mut direct = 0.0;
            for j in 0..grid.len() {
                direct += kernel.eval_k(x, grid.point(j)) * rho[j];
            }
            direct *= h;
            let bridge = v_conv[i] - m * table.v_main()[i] + dot(kernel.eval_w(x), xcom);
            worst = worst.max((direct - bridge).abs());
        }
        assert!(worst <= 1e-8, "bridge identity error {worst}");
    }

    #[test]
    fn log_table_regularizes_the_singular_cell() {
        let grid = Grid::new(1, 128, 8.0).unwrap();
        let spec = PotentialSpec::logarithmic(1.0).unwrap();
        let table = KernelTable::build(&spec, &grid).unwrap();
        assert!(table.r_doubled().iter().all(|v| v.is_finite()));
        let h = grid.spacing();
        let big = grid.doubled();
        let zero_idx = (0..big.len()).find(|&i| big.point(i)[0] == 0.0).unwrap();
        assert_relative_eq!(
            table.r_doubled()[zero_idx],
            (0.5 * h).ln() - 1.0,
            epsilon = 1e-12
        );
        // the regularized quadrature of ln|x| over a symmetric window is close
        // to the true integral: int_{-1}^{1} ln|x| dx = -2
        let w: Vec<f64> = (0..grid.len())
            .map(|i| {
                if grid.point(i)[0].abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let mut acc = 0.0;
        for i in 0..grid.len() {
            let x = grid.point(i)[0];
            if x.abs() <= 1.0 {
                acc += if x == 0.0 {
                    (0.5 * h).ln() - 1.0
                } else {
                    x.abs().ln()
                };
            }
        }
        let approx_integral = acc * h;
        let _ = w;
        assert!(
            (approx_integral - (-2.0)).abs() < 0.05,
            "got {approx_integral}"
        );
    }
}
