//! Tabulated power and thrust coefficient surfaces.
//!
//! The power coefficient follows the common exponential fit
//!
//! ```text
//! cp(λ, θ) = c1 (c2/λi − c3 θ − c4) exp(−c5/λi) + c6 λ
//! 1/λi     = 1/(λ + 0.08 θ) − 0.035/(θ³ + 1)
//! ```
//!
//! shifted so that its optimum lands on `(lambda_opt, theta_fine)` and scaled
//! so that the optimum equals the calibrated `cp_max`. The fit is not monotone
//! in pitch in deep stall, so each tip-speed-ratio row is replaced by its
//! running minimum along pitch before tabulation. Bilinear interpolation of a
//! row-monotone table stays monotone in pitch.
//!
//! Thrust comes from one-dimensional momentum theory: `cp = 4a(1−a)²` is
//! solved for the axial induction `a ∈ [0, 1/3]`, then `ct = 4a(1−a)`.

const C1: f64 = 0.5176;
const C2: f64 = 116.0;
const C3: f64 = 0.4;
const C4: f64 = 5.0;
const C5: f64 = 21.0;
const C6: f64 = 0.0068;

/// Largest tabulated tip-speed ratio.
pub const LAMBDA_MAX: f64 = 25.0;
/// Table nodes between zero and `lambda_opt`; places the optimum on a node.
const NODES_PER_OPT: usize = 160;
const PITCH_STEP: f64 = 0.25;

/// Coefficients at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub cp: f64,
    pub ct: f64,
    /// Set when the query fell outside the tabulated domain and was clamped.
    pub clamped: bool,
}

#[derive(Debug, Clone)]
pub struct AeroSurface {
    cp_max: f64,
    lambda_opt: f64,
    theta_fine: f64,
    theta_max: f64,
    lambda_scale: f64,
    pitch_step: f64,
    n_lambda: usize,
    n_pitch: usize,
    cp: Vec<f64>,
    ct: Vec<f64>,
}

/// The raw exponential fit, in its own (unshifted) coordinates.
fn base_cp(lambda: f64, pitch: f64) -> f64 {
    if lambda <= 1e-9 {
        return 0.0;
    }
    let inv_li = 1.0 / (lambda + 0.08 * pitch) - 0.035 / (pitch.powi(3) + 1.0);
    if inv_li <= 0.0 {
        return 0.0;
    }
    C1 * (C2 * inv_li - C3 * pitch - C4) * (-C5 * inv_li).exp() + C6 * lambda
}

/// Tip-speed ratio maximising the raw fit at zero pitch (golden section).
fn base_lambda_star() -> f64 {
    let (mut lo, mut hi) = (4.0_f64, 12.0_f64);
    let g = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (base_cp(x1, 0.0), base_cp(x2, 0.0));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = base_cp(x2, 0.0);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = base_cp(x1, 0.0);
        }
    }
    0.5 * (lo + hi)
}

/// Axial induction `a ∈ [0, 1/3]` with `4a(1−a)² = cp`.
pub fn induction_from_cp(cp: f64) -> f64 {
    let target = cp.clamp(0.0, 16.0 / 27.0);
    let (mut lo, mut hi) = (0.0_f64, 1.0 / 3.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if 4.0 * mid * (1.0 - mid).powi(2) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Axial induction from the thrust coefficient, `a = (1 − √(1 − ct))/2`.
pub fn induction_from_ct(ct: f64) -> f64 {
    0.5 * (1.0 - (1.0 - ct.clamp(0.0, 1.0)).sqrt())
}

impl AeroSurface {
    pub fn new(cp_max: f64, lambda_opt: f64, theta_fine: f64, theta_max: f64) -> Self {
        let lambda_star = base_lambda_star();
        let lambda_scale = lambda_star / lambda_opt;
        let lambda_step = lambda_opt / NODES_PER_OPT as f64;
        let n_lambda = (LAMBDA_MAX / lambda_step).ceil() as usize + 1;
        let n_pitch = ((theta_max - theta_fine) / PITCH_STEP).round().max(1.0) as usize + 1;
        let pitch_step = (theta_max - theta_fine) / (n_pitch - 1) as f64;

        let base_max = base_cp(lambda_star, 0.0);
        let scale = cp_max / base_max;
        let mut cp = vec![0.0; n_lambda * n_pitch];
        for i in 0..n_lambda {
            let lam = if i == NODES_PER_OPT {
                lambda_star
            } else {
                lambda_opt * i as f64 / NODES_PER_OPT as f64 * lambda_scale
            };
            let mut running = f64::INFINITY;
            for j in 0..n_pitch {
                let v = (base_cp(lam, j as f64 * pitch_step) * scale).max(0.0);
                running = running.min(v);
                cp[i * n_pitch + j] = running.min(cp_max);
            }
        }
        cp[NODES_PER_OPT * n_pitch] = cp_max;

        let ct = cp
            .iter()
            .map(|&c| {
                let a = induction_from_cp(c);
                4.0 * a * (1.0 - a)
            })
            .collect();

        Self {
            cp_max,
            lambda_opt,
            theta_fine,
            theta_max,
            lambda_scale,
            pitch_step,
            n_lambda,
            n_pitch,
            cp,
            ct,
        }
    }

    pub fn cp_max(&self) -> f64 {
        self.cp_max
    }

    pub fn lambda_opt(&self) -> f64 {
        self.lambda_opt
    }

    /// Ratio between the raw fit's optimal tip-speed ratio and `lambda_opt`.
    pub fn lambda_scale(&self) -> f64 {
        self.lambda_scale
    }

    pub fn lookup(&self, lambda: f64, pitch: f64) -> SurfacePoint {
        let lambda_hi = (self.n_lambda - 1) as f64;
        let mut clamped = false;
        let mut x = lambda * (NODES_PER_OPT as f64 / self.lambda_opt);
        if !(0.0..=lambda_hi).contains(&x) {
            clamped = true;
            x = if x.is_nan() { 0.0 } else { x.clamp(0.0, lambda_hi) };
        }
        let pitch_hi = (self.n_pitch - 1) as f64;
        let mut y = (pitch - self.theta_fine) / self.pitch_step;
        if !(0.0..=pitch_hi).contains(&y) {
            clamped = true;
            y = if y.is_nan() { 0.0 } else { y.clamp(0.0, pitch_hi) };
        }
        let i = (x.floor() as usize).min(self.n_lambda - 2);
        let j = (y.floor() as usize).min(self.n_pitch - 2);
        let fx = x - i as f64;
        let fy = y - j as f64;
        SurfacePoint {
            cp: self.bilinear(&self.cp, i, j, fx, fy),
            ct: self.bilinear(&self.ct, i, j, fx, fy),
            clamped,
        }
    }

    pub fn cp(&self, lambda: f64, pitch: f64) -> f64 {
        self.lookup(lambda, pitch).cp
    }

    pub fn ct(&self, lambda: f64, pitch: f64) -> f64 {
        self.lookup(lambda, pitch).ct
    }

    pub fn theta_range(&self) -> (f64, f64) {
        (self.theta_fine, self.theta_max)
    }

    fn bilinear(&self, table: &[f64], i: usize, j: usize, fx: f64, fy: f64) -> f64 {
        let n = self.n_pitch;
        let v00 = table[i * n + j];
        let v01 = table[i * n + j + 1];
        let v10 = table[(i + 1) * n + j];
        let v11 = table[(i + 1) * n + j + 1];
        // Exact node hits return the node value untouched.
        let lo = if fy == 0.0 { v00 } else { v00 + fy * (v01 - v00) };
        let hi = if fy == 0.0 { v10 } else { v10 + fy * (v11 - v10) };
        if fx == 0.0 {
            lo
        } else {
            lo + fx * (hi - lo)
        }
    }
}
