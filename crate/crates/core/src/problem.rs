//! Continuous problem description and the built-in benchmark problems.
//!
//! A problem is
//!
//! ```text
//!     -eps u_ss + a(s,t) u_s + b(s,t) u + u_t = f(s,t)   on (0,1) x (0,T],
//!     u(s,0) = phi(s) with a jump at s = d,
//!     u(0,t) and u(1,t) prescribed,
//! ```
//!
//! with `a > 0` and `b >= 0`. The initial condition is supplied as two
//! smooth branches so the jump and the one-sided values at `d` are exact
//! rather than inferred from floating-point evaluation at the jump.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Coefficient callback in the original coordinates `(s, t)`.
pub type Coefficient = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Scalar callback of a single variable.
pub type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Lower bound for the convection coefficient, either user-supplied or
/// estimated by sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha {
    /// Take `0.999 * min a` over a 101x101 sample grid.
    Auto,
    Fixed(f64),
}

/// Immutable description of one initial-boundary-value problem.
///
/// Coefficient callbacks must be pure; a `ProblemSpec` is freely shareable
/// across threads after construction.
pub struct ProblemSpec {
    name: String,
    a_hat: Coefficient,
    b_hat: Coefficient,
    f_hat: Coefficient,
    phi_left: ScalarFn,
    phi_right: ScalarFn,
    d: f64,
    t_final: f64,
    u_left: ScalarFn,
    u_right: ScalarFn,
    alpha: Alpha,
    exact_path: Option<ScalarFn>,
}

impl ProblemSpec {
    pub fn builder(name: impl Into<String>) -> ProblemBuilder {
        ProblemBuilder {
            name: name.into(),
            a_hat: None,
            b_hat: None,
            f_hat: None,
            initial: None,
            t_final: None,
            boundary: None,
            alpha: Alpha::Auto,
            exact_path: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Convection coefficient `a(s, t)`.
    #[inline]
    pub fn convection(&self, s: f64, t: f64) -> f64 {
        (self.a_hat)(s, t)
    }

    /// Reaction coefficient `b(s, t)`.
    #[inline]
    pub fn reaction(&self, s: f64, t: f64) -> f64 {
        (self.b_hat)(s, t)
    }

    /// Source term `f(s, t)`.
    #[inline]
    pub fn source(&self, s: f64, t: f64) -> f64 {
        (self.f_hat)(s, t)
    }

    /// Left initial branch, smooth on `[0, d]`.
    #[inline]
    pub fn initial_left(&self, s: f64) -> f64 {
        (self.phi_left)(s)
    }

    /// Right initial branch, smooth on `[d, 1]`.
    #[inline]
    pub fn initial_right(&self, s: f64) -> f64 {
        (self.phi_right)(s)
    }

    /// Boundary data `u(0, t)`.
    #[inline]
    pub fn boundary_left(&self, t: f64) -> f64 {
        (self.u_left)(t)
    }

    /// Boundary data `u(1, t)`.
    #[inline]
    pub fn boundary_right(&self, t: f64) -> f64 {
        (self.u_right)(t)
    }

    /// Location `d` of the initial-data jump.
    #[inline]
    pub fn jump_location(&self) -> f64 {
        self.d
    }

    /// Final time `T`.
    #[inline]
    pub fn final_time(&self) -> f64 {
        self.t_final
    }

    /// Jump of the initial data, right branch minus left branch at `d`.
    #[inline]
    pub fn jump(&self) -> f64 {
        self.initial_right(self.d) - self.initial_left(self.d)
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Exact layer path, if one was registered. Bypasses the integrator.
    pub fn exact_path(&self, t: f64) -> Option<f64> {
        self.exact_path.as_ref().map(|f| f(t))
    }

    pub fn has_exact_path(&self) -> bool {
        self.exact_path.is_some()
    }
}

pub struct ProblemBuilder {
    name: String,
    a_hat: Option<Coefficient>,
    b_hat: Option<Coefficient>,
    f_hat: Option<Coefficient>,
    initial: Option<(ScalarFn, ScalarFn, f64)>,
    t_final: Option<f64>,
    boundary: Option<(ScalarFn, ScalarFn)>,
    alpha: Alpha,
    exact_path: Option<ScalarFn>,
}

impl ProblemBuilder {
    pub fn convection(mut self, a: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.a_hat = Some(Box::new(a));
        self
    }

    pub fn reaction(mut self, b: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.b_hat = Some(Box::new(b));
        self
    }

    pub fn source(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.f_hat = Some(Box::new(f));
        self
    }

    /// Initial data as two smooth branches meeting (discontinuously) at `d`.
    pub fn initial(
        mut self,
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d: f64,
    ) -> Self {
        self.initial = Some((Box::new(left), Box::new(right), d));
        self
    }

    pub fn horizon(mut self, t_final: f64) -> Self {
        self.t_final = Some(t_final);
        self
    }

    /// Boundary data at `s = 0` and `s = 1`. Defaults to the constant
    /// values of the initial branches at the endpoints.
    pub fn boundary(
        mut self,
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.boundary = Some((Box::new(left), Box::new(right)));
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Alpha::Fixed(alpha);
        self
    }

    /// Register a closed-form layer path `d(t)`; used in regression tests
    /// to bypass the integrator.
    pub fn exact_path(mut self, d_of_t: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact_path = Some(Box::new(d_of_t));
        self
    }

    pub fn build(self) -> ProblemSpec {
        let a_hat = self.a_hat.expect("convection coefficient is required");
        let (phi_left, phi_right, d) = self.initial.expect("initial data is required");
        let t_final = self.t_final.expect("final time is required");
        assert!(d > 0.0 && d < 1.0, "jump location must lie in (0, 1)");
        assert!(t_final > 0.0, "final time must be positive");
        if let Alpha::Fixed(a) = self.alpha {
            assert!(a > 0.0, "alpha must be positive");
        }
        let (u_left, u_right) = self.boundary.unwrap_or_else(|| {
            let at_zero = phi_left(0.0);
            let at_one = phi_right(1.0);
            (
                Box::new(move |_| at_zero) as ScalarFn,
                Box::new(move |_| at_one) as ScalarFn,
            )
        });
        ProblemSpec {
            name: self.name,
            a_hat,
            b_hat: self.b_hat.unwrap_or_else(|| Box::new(|_, _| 0.0)),
            f_hat: self.f_hat.unwrap_or_else(|| Box::new(|_, _| 0.0)),
            phi_left,
            phi_right,
            d,
            t_final,
            u_left,
            u_right,
            alpha: self.alpha,
            exact_path: self.exact_path,
        }
    }
}

/// First benchmark: space-dependent convection, no reaction term.
///
/// `a = (0.81 - (s - 0.2)^2)/4`, `f = 4s(1-s)t + t^2`, initial data -2 / 1
/// jumping at `d = 0.2`, horizon `T = 0.5`.
pub fn example_1() -> ProblemSpec {
    ProblemSpec::builder("example-1")
        .convection(|s, _| (0.81 - (s - 0.2) * (s - 0.2)) / 4.0)
        .source(|s, t| 4.0 * s * (1.0 - s) * t + t * t)
        .initial(|_| -2.0, |_| 1.0, 0.2)
        .horizon(0.5)
        .boundary(|_| -2.0, |_| 1.0)
        .build()
}

/// Second benchmark: adds a reaction term.
///
/// `a = 1 + s^2`, `b = s + t`, `f = 4s(1-s)t + t^2`, initial data -2 / 1
/// jumping at `d = 0.1`, horizon `T = 0.5`.
pub fn example_2() -> ProblemSpec {
    ProblemSpec::builder("example-2")
        .convection(|s, _| 1.0 + s * s)
        .reaction(|s, t| s + t)
        .source(|s, t| 4.0 * s * (1.0 - s) * t + t * t)
        .initial(|_| -2.0, |_| 1.0, 0.1)
        .horizon(0.5)
        .boundary(|_| -2.0, |_| 1.0)
        .build()
}

/// Registry used by the command line: examples are addressed by integer id.
pub fn from_id(id: u32) -> Option<ProblemSpec> {
    match id {
        1 => Some(example_1()),
        2 => Some(example_2()),
        _ => None,
    }
}

/// Sampled sanity report for a problem.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Resolved lower bound for the convection coefficient.
    pub alpha: f64,
    /// Minimum of the convection coefficient over the sample grid.
    pub min_convection: f64,
    /// Minimum of the reaction coefficient over the sample grid.
    pub min_reaction: f64,
    /// Initial-data jump at `d`.
    pub jump: f64,
    /// Jump of the initial-data derivative at `d` (one-sided differences).
    pub derivative_jump: f64,
    /// `a_s(d, 0)`, central difference.
    pub convection_slope_at_jump: f64,
    /// `b_s(d, 0)`, central difference.
    pub reaction_slope_at_jump: f64,
    /// Hypotheses that fail but do not prevent running the method.
    pub warnings: Vec<String>,
}

/// Sample the coefficients on a `grid_density` x `grid_density` grid and
/// report the constants the method needs.
///
/// Fails when the sampled convection is not positive, the sampled reaction
/// is negative, or the jump is not finite. Conditions the error theory
/// assumes but the method tolerates (zero derivative jump, zero coefficient
/// slopes at the jump) are reported as warnings only.
pub fn validate(p: &ProblemSpec, grid_density: usize) -> Result<ValidationReport> {
    assert!(grid_density >= 2, "grid density must be at least 2");
    let (min_convection, min_reaction) = coefficient_minima(p, grid_density);
    if !(min_convection > 0.0) {
        return Err(Error::NonPositiveConvection { min: min_convection });
    }
    if min_reaction < 0.0 {
        return Err(Error::NegativeReaction { min: min_reaction });
    }
    let jump = p.jump();
    if !jump.is_finite() {
        return Err(Error::NonFiniteJump);
    }

    let d = p.jump_location();
    let h = 1e-5;
    // One-sided second-order differences keep each branch on its own side.
    let left_slope =
        (3.0 * p.initial_left(d) - 4.0 * p.initial_left(d - h) + p.initial_left(d - 2.0 * h))
            / (2.0 * h);
    let right_slope =
        (-3.0 * p.initial_right(d) + 4.0 * p.initial_right(d + h) - p.initial_right(d + 2.0 * h))
            / (2.0 * h);
    let derivative_jump = right_slope - left_slope;
    let convection_slope_at_jump =
        (p.convection(d + h, 0.0) - p.convection(d - h, 0.0)) / (2.0 * h);
    let reaction_slope_at_jump = (p.reaction(d + h, 0.0) - p.reaction(d - h, 0.0)) / (2.0 * h);

    let mut warnings = Vec::new();
    let tol = 1e-6;
    if derivative_jump.abs() > tol {
        warnings.push(format!(
            "initial-data derivative jumps at d: [phi'](d) = {derivative_jump:.3e}"
        ));
    }
    if convection_slope_at_jump.abs() > tol {
        warnings.push(format!(
            "convection slope at the jump is nonzero: a_s(d,0) = {convection_slope_at_jump:.3e}"
        ));
    }
    if reaction_slope_at_jump.abs() > tol {
        warnings.push(format!(
            "reaction slope at the jump is nonzero: b_s(d,0) = {reaction_slope_at_jump:.3e}"
        ));
    }

    let alpha = match p.alpha() {
        Alpha::Fixed(a) => a,
        Alpha::Auto => 0.999 * min_convection,
    };
    Ok(ValidationReport {
        alpha,
        min_convection,
        min_reaction,
        jump,
        derivative_jump,
        convection_slope_at_jump,
        reaction_slope_at_jump,
        warnings,
    })
}

/// Lower bound used for mesh construction: the fixed value when one was
/// given, otherwise `0.999 *` the sampled minimum of the convection.
pub fn resolve_alpha(p: &ProblemSpec) -> Result<f64> {
    match p.alpha() {
        Alpha::Fixed(a) => Ok(a),
        Alpha::Auto => {
            let (min_convection, _) = coefficient_minima(p, 101);
            if !(min_convection > 0.0) {
                return Err(Error::NonPositiveConvection { min: min_convection });
            }
            Ok(0.999 * min_convection)
        }
    }
}

/// True when the reaction coefficient is not identically zero on the
/// sample grid. Lets the solver skip terms that would evaluate to zero.
pub(crate) fn reaction_present(p: &ProblemSpec, grid_density: usize) -> bool {
    let last = (grid_density - 1) as f64;
    for i in 0..grid_density {
        let s = i as f64 / last;
        for j in 0..grid_density {
            let t = p.final_time() * j as f64 / last;
            if p.reaction(s, t) != 0.0 {
                return true;
            }
        }
    }
    false
}

fn coefficient_minima(p: &ProblemSpec, grid_density: usize) -> (f64, f64) {
    let last = (grid_density - 1) as f64;
    let mut min_a = f64::INFINITY;
    let mut min_b = f64::INFINITY;
    for i in 0..grid_density {
        let s = i as f64 / last;
        for j in 0..grid_density {
            let t = p.final_time() * j as f64 / last;
            min_a = min_a.min(p.convection(s, t));
            min_b = min_b.min(p.reaction(s, t));
        }
    }
    (min_a, min_b)
}
