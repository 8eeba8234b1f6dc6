//! The complementary error function, the singular function family that
//! absorbs the initial discontinuity, and the reaction damping factor.
//!
//! With a jump of size `J` at `s = d`, the leading singular part of the
//! solution is `0.5 J I(t) psi0(s, t)` where
//!
//! ```text
//!     psi0(s, t) = erfc( (d(t) - s) / (2 sqrt(eps t)) ),
//!     I(t)       = exp( - int_0^t b(d(r), r) dr ),
//! ```
//!
//! and `I == 1` when the reaction coefficient vanishes. Subtracting that
//! part leaves a function with no discontinuity, which is what the scheme
//! actually computes.
//!
//! In the mapped coordinates the family extends to `psi_0 .. psi_4`:
//! with `z = sqrt(g) (d - x)` and `E = exp(-z^2 / (4 eps t))`,
//!
//! ```text
//!     psi_0 = erfc( z / (2 sqrt(eps t)) ),
//!     psi_1 = z psi_0 - 2 sqrt(eps t / pi) E,
//!     psi_k = z psi_{k-1} + 2 eps t (k-1) psi_{k-2},     k = 2, 3, 4,
//! ```
//!
//! satisfying `d(psi_k)/dx = -k sqrt(g) psi_{k-1}` and the initial limits
//! `psi_k(x, 0+) = 2 (d - x)^k` right of the jump, `0` left of it.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::characteristic::CharacteristicCurve;
use crate::error::{Error, Result};
use crate::math;
use crate::problem::ProblemSpec;
use crate::transform::{side_of, TransformContext};

/// Complementary error function.
///
/// Power series on `|z| < 1`, continued fraction (modified Lentz) for
/// `z >= 1`, reflection for negative arguments. Relative error is below
/// `1e-13` up to `|z| = 6`; past `z = 26.7` the value underflows and exact
/// zero is returned.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        2.0 - erfc_nonneg(-z)
    } else {
        erfc_nonneg(z)
    }
}

fn erfc_nonneg(z: f64) -> f64 {
    if z < 1.0 {
        1.0 - erf_series(z)
    } else if z > 26.7 {
        // exp(-z^2) is below every subnormal
        0.0
    } else {
        // erfc(z) = exp(-z^2)/sqrt(pi) * 1/F with the classical fraction
        // F = z + (1/2)/(z + 1/(z + (3/2)/(z + 2/(z + ...))))
        math::exp(-z * z) * (0.5 * FRAC_2_SQRT_PI) / lentz_fraction(z)
    }
}

/// erf by its scaled Maclaurin series; all terms positive, no cancellation:
/// `erf(z) = (2/sqrt(pi)) exp(-z^2) * sum_{n>=0} (2 z^2)^n z / (2n+1)!!`.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0u32;
    while term > sum * 1e-17 + 1e-300 {
        n += 1;
        term *= 2.0 * z2 / (2 * n + 1) as f64;
        sum += term;
    }
    FRAC_2_SQRT_PI * math::exp(-z2) * sum
}

fn lentz_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0f64;
    for n in 1..=500u32 {
        let a = 0.5 * n as f64;
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Cumulative reaction integral along the layer path, as a dense table.
///
/// Stores `int_0^{t_k} b(d(r), r) dr` on a uniform grid, computed with
/// composite five-point Gauss-Legendre quadrature and panel doubling until
/// the nodal values settle to `1e-12`; evaluation in between is cubic
/// Hermite with the exact integrand as slope. Self-contained: a solution
/// object can carry it without keeping the problem callbacks alive.
#[derive(Debug, Clone)]
pub struct DampingTable {
    t_final: f64,
    step: f64,
    integral: Vec<f64>,
    slope: Vec<f64>,
}

const BASE_PANELS: usize = 256;
const MAX_PANEL_DOUBLINGS: usize = 4;
const PANEL_TOLERANCE: f64 = 1e-12;

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.4786286704993665,
    0.5688888888888889,
    0.4786286704993665,
    0.23692688505618908,
];

impl DampingTable {
    pub fn build(p: &ProblemSpec, curve: &CharacteristicCurve) -> Result<DampingTable> {
        let mut table = Self::with_panels(p, curve, BASE_PANELS)?;
        for _ in 0..MAX_PANEL_DOUBLINGS {
            let refined = Self::with_panels(p, curve, 2 * (table.integral.len() - 1))?;
            let drift = table
                .integral
                .iter()
                .enumerate()
                .map(|(k, v)| (refined.integral[2 * k] - v).abs())
                .fold(0.0f64, f64::max);
            table = refined;
            if drift < PANEL_TOLERANCE {
                break;
            }
        }
        Ok(table)
    }

    fn with_panels(p: &ProblemSpec, curve: &CharacteristicCurve, panels: usize) -> Result<DampingTable> {
        let t_final = curve.t_final();
        let step = t_final / panels as f64;
        let integrand = |r: f64| -> Result<f64> { Ok(p.reaction(curve.position(r)?, r)) };
        let mut integral = Vec::with_capacity(panels + 1);
        let mut slope = Vec::with_capacity(panels + 1);
        integral.push(0.0);
        slope.push(integrand(0.0)?);
        let mut acc = 0.0;
        for k in 0..panels {
            let left = t_final * k as f64 / panels as f64;
            let mid = left + 0.5 * step;
            let mut panel = 0.0;
            for (xi, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                panel += w * integrand(mid + 0.5 * step * xi)?;
            }
            acc += 0.5 * step * panel;
            let right = t_final * (k + 1) as f64 / panels as f64;
            integral.push(acc);
            slope.push(integrand(right)?);
        }
        Ok(DampingTable { t_final, step, integral, slope })
    }

    /// `I(t) = exp(-int_0^t b(d(r), r) dr)`; identically 1 for zero reaction.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.t_final).contains(&t) {
            return Err(Error::OutOfRange { what: "t", value: t });
        }
        let k = ((t / self.step) as usize).min(self.integral.len() - 2);
        let tau = (t - k as f64 * self.step) / self.step;
        if tau == 0.0 {
            return Ok(math::exp(-self.integral[k]));
        }
        let (p0, p1) = (self.integral[k], self.integral[k + 1]);
        let (v0, v1) = (self.slope[k], self.slope[k + 1]);
        let t2 = tau * tau;
        let t3 = t2 * tau;
        let j = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + tau) * self.step * v0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * self.step * v1;
        Ok(math::exp(-j))
    }
}

/// Evaluation context for the singular family at one diffusion parameter.
pub struct SingularContext<'a> {
    epsilon: f64,
    ctx: &'a TransformContext<'a>,
    problem: &'a ProblemSpec,
    damping: DampingTable,
}

impl<'a> SingularContext<'a> {
    pub fn new(epsilon: f64, ctx: &'a TransformContext<'a>, problem: &'a ProblemSpec) -> Result<Self> {
        assert!(epsilon > 0.0, "epsilon must be positive");
        let damping = DampingTable::build(problem, ctx.curve())?;
        Ok(SingularContext { epsilon, ctx, problem, damping })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.problem
    }

    pub fn damping_table(&self) -> &DampingTable {
        &self.damping
    }

    /// `I(t)`.
    pub fn damping(&self, t: f64) -> Result<f64> {
        self.damping.eval(t)
    }

    /// `psi0` in the original coordinates. At `t = 0` the defining limit is
    /// taken: 0 left of the jump, 1 at it, 2 right of it.
    pub fn psi0_physical(&self, s: f64, t: f64) -> Result<f64> {
        if !(0.0..=self.problem.final_time()).contains(&t) {
            return Err(Error::OutOfRange { what: "t", value: t });
        }
        let d = self.problem.jump_location();
        if t == 0.0 {
            return Ok(initial_limit(s, d, 0));
        }
        let d_t = self.ctx.curve().position(t)?;
        Ok(erfc((d_t - s) / (2.0 * math::sqrt(self.epsilon * t))))
    }

    /// `psi_k` in the mapped coordinates, `k <= 4`, one-sided at `x = d`.
    /// At `t = 0` the defining limits are taken.
    pub fn psi(&self, k: usize, x: f64, t: f64) -> Result<f64> {
        assert!(k <= 4, "the singular family is defined for k = 0..4");
        if !(0.0..=self.problem.final_time()).contains(&t) {
            return Err(Error::OutOfRange { what: "t", value: t });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange { what: "x", value: x });
        }
        let d = self.ctx.interface();
        if t == 0.0 {
            return Ok(initial_limit(x, d, k));
        }
        let snap = self.ctx.snapshot(t)?;
        let z = snap.scale(side_of(x, d)) * (d - x);
        let et = self.epsilon * t;
        let arg = z / (2.0 * math::sqrt(et));
        let mut prev2 = erfc(arg);
        if k == 0 {
            return Ok(prev2);
        }
        let kernel = math::exp(-arg * arg);
        let mut prev1 = z * prev2 - 2.0 * math::sqrt(et / PI) * kernel;
        for i in 2..=k {
            let next = z * prev1 + 2.0 * et * (i - 1) as f64 * prev2;
            prev2 = prev1;
            prev1 = next;
        }
        Ok(prev1)
    }
}

fn initial_limit(x: f64, d: f64, k: usize) -> f64 {
    if x < d {
        0.0
    } else if x == d {
        if k == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        let mut v = 2.0;
        for _ in 0..k {
            v *= d - x;
        }
        v
    }
}
