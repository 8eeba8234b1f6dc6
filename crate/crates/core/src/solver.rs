//! Upwinded implicit time-marching scheme with a flux transmission row.
//!
//! Away from the interface the discrete operator at node `i`, level `j` is
//!
//! ```text
//!     -eps d2(Y) + kappa+ D-(Y) + kappa- D+(Y) + g b Y + g Dt-(Y) = rhs
//! ```
//!
//! with the sign-split upwind derivative (`kappa+ = max(kappa, 0)`,
//! `kappa- = min(kappa, 0)`; `kappa` changes sign near the interface, so
//! one-sided upwinding would be wrong), the usual second difference `d2`
//! on a nonuniform mesh, and the backward time difference acting on the
//! unknown level. At `i = N/2` the row enforces continuity of the scaled
//! flux across the interface,
//!
//! ```text
//!     (d / d(t)) D-(Y)  =  ((1-d) / (1-d(t))) D+(Y),
//! ```
//!
//! with zero right side and no time derivative; it is stored negated so
//! the diagonal stays positive. Each level is one tridiagonal solve; every
//! assembled row is an M-matrix row, which is asserted during assembly.
//!
//! All coefficients and the right side are evaluated at the unknown level
//! `t_j`. The first level is `t_1 = k > 0`, which keeps the `1/sqrt(t)`
//! and exponential factors in the right side finite; the reaction-damped
//! variants of the boundary and forcing terms reduce to the plain ones
//! when the reaction coefficient vanishes, since then `I == 1`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::characteristic::{self, CharacteristicCurve};
use crate::error::{Error, Result};
use crate::math;
use crate::mesh::{build_space_mesh, transition_points, SpaceMesh, TimeMesh};
use crate::problem::{self, ProblemSpec};
use crate::singular::{erfc, DampingTable};
use crate::transform::{side_of, MapSnapshot, Side};

/// Everything a march needs, built once per `(problem, epsilon, N, M)`.
pub struct SolverContext<'a> {
    problem: &'a ProblemSpec,
    epsilon: f64,
    space: SpaceMesh,
    time: TimeMesh,
    curve: CharacteristicCurve,
    damping: DampingTable,
    jump: f64,
    reaction_present: bool,
}

/// Interior rows of one time level, `i = 1 .. N-1` stored at `i - 1`.
pub struct StepSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Per-level quantities shared by every row of the level.
struct Level {
    t: f64,
    snap: MapSnapshot,
    damp: f64,
    a_layer: f64,
    b_layer: f64,
    sqrt_eps_pi_t: f64,
    inv_two_sqrt_eps_t: f64,
}

impl<'a> SolverContext<'a> {
    pub fn prepare(p: &'a ProblemSpec, epsilon: f64, n: usize, m: usize) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::OutOfRange { what: "epsilon", value: epsilon });
        }
        let jump = p.jump();
        if !jump.is_finite() {
            return Err(Error::NonFiniteJump);
        }
        let alpha = problem::resolve_alpha(p)?;
        let curve = characteristic::integrate(p, characteristic::DEFAULT_TOLERANCE)?;
        let d = p.jump_location();
        let delta = (1.0 - curve.end_position()) / (1.0 - d);
        let trans = transition_points(epsilon, n, d, p.final_time(), delta, alpha)?;
        let space = build_space_mesh(n, d, trans)?;
        let time = TimeMesh::new(m, p.final_time())?;
        let damping = DampingTable::build(p, &curve)?;
        let reaction_present = problem::reaction_present(p, 101);
        Ok(SolverContext { problem: p, epsilon, space, time, curve, damping, jump, reaction_present })
    }

    pub fn space(&self) -> &SpaceMesh {
        &self.space
    }

    pub fn time(&self) -> &TimeMesh {
        &self.time
    }

    pub fn curve(&self) -> &CharacteristicCurve {
        &self.curve
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn level(&self, j: usize) -> Result<Level> {
        debug_assert!(j >= 1 && j <= self.time.m());
        let t = self.time.node(j);
        let snap = MapSnapshot::at(&self.curve, t)?;
        let damp = self.damping.eval(t)?;
        let a_layer = self.problem.convection(snap.layer(), t);
        let b_layer = if self.reaction_present { self.problem.reaction(snap.layer(), t) } else { 0.0 };
        let et = self.epsilon * t;
        Ok(Level {
            t,
            snap,
            damp,
            a_layer,
            b_layer,
            sqrt_eps_pi_t: math::sqrt(et * PI),
            inv_two_sqrt_eps_t: 1.0 / (2.0 * math::sqrt(et)),
        })
    }

    /// Initial level of the transformed unknown: the left branch up to and
    /// including the interface, the right branch shifted down by the jump
    /// beyond it. The shifted right branch meets the left one at `d`, so
    /// the initial level is continuous.
    pub fn initial_value(&self, x: f64) -> f64 {
        let d = self.space.interface();
        if x < d {
            self.problem.initial_left(x)
        } else if x == d {
            self.problem.initial_left(d)
        } else {
            self.problem.initial_right(x) - self.jump
        }
    }

    /// Boundary value of the transformed unknown at level `j >= 1`:
    /// the prescribed data minus the damped singular part.
    pub fn boundary_value(&self, end: Side, j: usize) -> Result<f64> {
        let lv = self.level(j)?;
        Ok(self.boundary_at(&lv, end))
    }

    fn boundary_at(&self, lv: &Level, end: Side) -> f64 {
        let (p_coord, data) = match end {
            Side::Left => (0.0, self.problem.boundary_left(lv.t)),
            Side::Right => (1.0, self.problem.boundary_right(lv.t)),
        };
        let psi0 = erfc((lv.snap.layer() - p_coord) * lv.inv_two_sqrt_eps_t);
        data - 0.5 * self.jump * lv.damp * psi0
    }

    /// Right side of the transformed equation at interior node `i`,
    /// level `j >= 1` (`x_i` must not be the interface).
    pub fn interior_rhs(&self, i: usize, j: usize) -> Result<f64> {
        assert!(i != self.space.interface_index(), "no equation right side at the interface");
        let lv = self.level(j)?;
        Ok(self.rhs_at(&lv, i))
    }

    fn rhs_at(&self, lv: &Level, i: usize) -> f64 {
        let x = self.space.node(i);
        let d = self.space.interface();
        let side = side_of(x, d);
        let g = lv.snap.metric(side);
        let s = lv.snap.inverse(x);
        let mut rhs = g * self.problem.source(s, lv.t);
        if self.jump != 0.0 {
            // forcing induced by the subtracted singular part
            let arg = lv.snap.scale(side) * (d - x) * lv.inv_two_sqrt_eps_t;
            let kernel = math::exp(-arg * arg);
            let a_here = self.problem.convection(s, lv.t);
            rhs += 0.5 * self.jump * lv.damp * g * (lv.a_layer - a_here) / lv.sqrt_eps_pi_t
                * kernel;
            if self.reaction_present {
                let b_here = self.problem.reaction(s, lv.t);
                rhs += 0.5 * self.jump * lv.damp * g * (lv.b_layer - b_here) * erfc(arg);
            }
        }
        rhs
    }

    /// Assemble the interior rows of level `j`.
    pub fn interior_system(&self, j: usize) -> Result<StepSystem> {
        let lv = self.level(j)?;
        let n = self.space.n();
        let mut lower = Vec::with_capacity(n - 1);
        let mut diag = Vec::with_capacity(n - 1);
        let mut upper = Vec::with_capacity(n - 1);
        for i in 1..n {
            let (l, dg, u) = self.row_at(&lv, i);
            lower.push(l);
            diag.push(dg);
            upper.push(u);
        }
        Ok(StepSystem { lower, diag, upper })
    }

    fn row_at(&self, lv: &Level, i: usize) -> (f64, f64, f64) {
        let h_lo = self.space.width(i);
        let h_hi = self.space.width(i + 1);
        if i == self.space.interface_index() {
            // transmission row: scaled-flux continuity, zero right side
            let lower = -(lv.snap.interface() / lv.snap.layer()) / h_lo;
            let upper = -((1.0 - lv.snap.interface()) / (1.0 - lv.snap.layer())) / h_hi;
            return (lower, -(lower + upper), upper);
        }
        let x = self.space.node(i);
        let side = side_of(x, self.space.interface());
        let g = lv.snap.metric(side);
        let kappa = lv.snap.convection(self.problem, x);
        let half = 0.5 * (h_lo + h_hi);
        let mut lower = -self.epsilon / (half * h_lo);
        let mut upper = -self.epsilon / (half * h_hi);
        if kappa >= 0.0 {
            lower -= kappa / h_lo;
        } else {
            upper += kappa / h_hi;
        }
        let reaction = if self.reaction_present {
            g * self.problem.reaction(lv.snap.inverse(x), lv.t)
        } else {
            0.0
        };
        let diag = -(lower + upper) + reaction + g / self.time.step();
        debug_assert!(lower <= 0.0 && upper <= 0.0, "off-diagonals must not be positive");
        debug_assert!(
            diag >= -(lower + upper) + g / self.time.step(),
            "row lost its diagonal dominance margin"
        );
        (lower, diag, upper)
    }

    /// Advance one time level: assemble, fold in the boundary values, solve
    /// the tridiagonal system. Returns the full column including boundary
    /// nodes. `prev` is the full column of level `j - 1`.
    pub fn advance_step(&self, prev: &[f64], j: usize) -> Result<Vec<f64>> {
        let n = self.space.n();
        assert_eq!(prev.len(), n + 1, "previous column has the wrong length");
        assert!(j >= 1 && j <= self.time.m(), "level index out of range");
        let lv = self.level(j)?;
        let interface = self.space.interface_index();
        let step = self.time.step();

        let sys = self.interior_system(j)?;
        let mut rhs = Vec::with_capacity(n - 1);
        for i in 1..n {
            if i == interface {
                rhs.push(0.0);
            } else {
                let side = side_of(self.space.node(i), self.space.interface());
                let g = lv.snap.metric(side);
                rhs.push(self.rhs_at(&lv, i) + g / step * prev[i]);
            }
        }
        let left = self.boundary_at(&lv, Side::Left);
        let right = self.boundary_at(&lv, Side::Right);
        rhs[0] -= sys.lower[0] * left;
        rhs[n - 2] -= sys.upper[n - 2] * right;

        let interior = crate::tridiag::solve(&sys.lower, &sys.diag, &sys.upper, &rhs)?;
        let mut column = Vec::with_capacity(n + 1);
        column.push(left);
        column.extend_from_slice(&interior);
        column.push(right);
        Ok(column)
    }
}

/// March the full scheme.
pub fn solve(p: &ProblemSpec, epsilon: f64, n: usize, m: usize) -> Result<DiscreteSolution> {
    let ctx = SolverContext::prepare(p, epsilon, n, m)?;
    let mut values = Vec::with_capacity((n + 1) * (m + 1));
    for i in 0..=n {
        values.push(ctx.initial_value(ctx.space.node(i)));
    }
    let mut prev: Vec<f64> = values.clone();
    for j in 1..=m {
        let column = ctx.advance_step(&prev, j)?;
        values.extend_from_slice(&column);
        prev = column;
    }
    let SolverContext { space, time, curve, damping, jump, .. } = ctx;
    Ok(DiscreteSolution {
        values,
        space,
        time,
        epsilon,
        problem_name: String::from(p.name()),
        curve,
        damping,
        jump,
    })
}

/// Grid function produced by a solve, with everything needed to evaluate
/// it anywhere and to reconstruct the original unknown. Immutable.
pub struct DiscreteSolution {
    values: Vec<f64>,
    space: SpaceMesh,
    time: TimeMesh,
    epsilon: f64,
    problem_name: String,
    curve: CharacteristicCurve,
    damping: DampingTable,
    jump: f64,
}

impl DiscreteSolution {
    /// Nodal value `Y(x_i, t_j)`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.space.n() + 1) + i]
    }

    pub fn space(&self) -> &SpaceMesh {
        &self.space
    }

    pub fn time(&self) -> &TimeMesh {
        &self.time
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn problem_name(&self) -> &str {
        &self.problem_name
    }

    pub fn curve(&self) -> &CharacteristicCurve {
        &self.curve
    }

    /// Initial-data jump the solve was set up with.
    pub fn jump(&self) -> f64 {
        self.jump
    }

    /// `I(t)` of the underlying problem.
    pub fn damping(&self, t: f64) -> Result<f64> {
        self.damping.eval(t)
    }

    /// Remaining fraction of the right subinterval at the final time.
    pub fn delta(&self) -> f64 {
        (1.0 - self.curve.end_position()) / (1.0 - self.space.interface())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest scaled-flux jump across the interface over all levels
    /// `j >= 1`; the solve drives this to roundoff.
    pub fn transmission_residual(&self) -> Result<f64> {
        let ii = self.space.interface_index();
        let h_lo = self.space.width(ii);
        let h_hi = self.space.width(ii + 1);
        let d = self.space.interface();
        let mut worst = 0.0f64;
        for j in 1..=self.time.m() {
            let d_t = self.curve.position(self.time.node(j))?;
            let fwd = (self.value(ii + 1, j) - self.value(ii, j)) / h_hi;
            let bwd = (self.value(ii, j) - self.value(ii - 1, j)) / h_lo;
            worst = worst.max(((1.0 - d) / (1.0 - d_t) * fwd - d / d_t * bwd).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{example_1, example_2, ProblemSpec};

    fn constant_problem(c: f64) -> ProblemSpec {
        ProblemSpec::builder("constant")
            .convection(|s, t| 1.0 + 0.5 * s * t)
            .initial(move |_| c, move |_| c, 0.25)
            .horizon(0.5)
            .build()
    }

    #[test]
    fn initial_column_is_continuous_for_example_1() {
        let p = example_1();
        let ctx = SolverContext::prepare(&p, 2f64.powi(-8), 32, 8).unwrap();
        for i in 0..=32 {
            assert_eq!(ctx.initial_value(ctx.space().node(i)), -2.0);
        }
    }

    #[test]
    fn initial_column_shifts_the_right_branch_for_example_2() {
        let p = example_2();
        let ctx = SolverContext::prepare(&p, 2f64.powi(-8), 32, 8).unwrap();
        assert_eq!(ctx.initial_value(0.5), -2.0);
        assert_eq!(ctx.initial_value(0.05), -2.0);
        assert_eq!(ctx.initial_value(0.1), -2.0);
    }

    #[test]
    fn zero_jump_leaves_boundary_data_untouched() {
        let p = constant_problem(3.0);
        let ctx = SolverContext::prepare(&p, 0.5, 32, 8).unwrap();
        assert_eq!(ctx.boundary_value(Side::Left, 3).unwrap(), 3.0);
        assert_eq!(ctx.boundary_value(Side::Right, 8).unwrap(), 3.0);
    }

    #[test]
    fn small_eps_boundary_values_saturate() {
        // the singular part underflows at the inflow and saturates to 2 at
        // the outflow, so both transformed boundary values equal -2
        let p = example_1();
        let ctx = SolverContext::prepare(&p, 2f64.powi(-20), 64, 64).unwrap();
        let j = 32; // t = 0.25
        assert_eq!(ctx.boundary_value(Side::Left, j).unwrap(), -2.0);
        assert_eq!(ctx.boundary_value(Side::Right, j).unwrap(), 1.0 - 3.0);
    }

    #[test]
    fn zero_jump_rhs_is_scaled_source() {
        let p = constant_problem(0.0);
        let ctx = SolverContext::prepare(&p, 0.5, 32, 8).unwrap();
        // f == 0 for this problem, so the right side vanishes identically
        for i in [1usize, 5, 20, 31] {
            if i == ctx.space().interface_index() {
                continue;
            }
            assert_eq!(ctx.interior_rhs(i, 4).unwrap(), 0.0);
        }
    }

    #[test]
    fn scheme_annihilates_constants() {
        let c = -1.75;
        let p = constant_problem(c);
        for eps in [1.0, 2f64.powi(-10)] {
            let sol = solve(&p, eps, 32, 16).unwrap();
            for j in 0..=16 {
                for i in 0..=32 {
                    assert!(
                        (sol.value(i, j) - c).abs() < 1e-12,
                        "eps {eps}: Y({i},{j}) = {}",
                        sol.value(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn solve_is_linear_in_the_data() {
        // negating data (jump 0, so data enters through f and the
        // boundary) negates the solution
        let plus = ProblemSpec::builder("load+")
            .convection(|_, _| 1.0)
            .source(|s, t| s + t)
            .initial(|_| 0.0, |_| 0.0, 0.25)
            .horizon(0.5)
            .build();
        let minus = ProblemSpec::builder("load-")
            .convection(|_, _| 1.0)
            .source(|s, t| -(s + t))
            .initial(|_| 0.0, |_| 0.0, 0.25)
            .horizon(0.5)
            .build();
        let a = solve(&plus, 2f64.powi(-6), 32, 16).unwrap();
        let b = solve(&minus, 2f64.powi(-6), 32, 16).unwrap();
        for j in 0..=16 {
            for i in 0..=32 {
                assert!((a.value(i, j) + b.value(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transmission_residual_is_roundoff_small() {
        let p = example_1();
        let sol = solve(&p, 2f64.powi(-12), 64, 64).unwrap();
        let resid = sol.transmission_residual().unwrap();
        assert!(resid <= 1e-10 * sol.max_abs(), "residual {resid}");
    }

    #[test]
    fn nonpositive_epsilon_is_rejected() {
        let p = example_1();
        assert!(matches!(
            SolverContext::prepare(&p, 0.0, 32, 8),
            Err(Error::OutOfRange { .. })
        ));
    }
}
