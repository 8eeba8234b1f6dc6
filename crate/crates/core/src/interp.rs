//! Global evaluation of a discrete solution: bilinear interpolation on the
//! space-time mesh, and reconstruction of the original unknown by adding
//! the damped singular part back.

use crate::error::{Error, Result};
use crate::math;
use crate::singular::erfc;
use crate::solver::DiscreteSolution;
use crate::transform::MapSnapshot;

impl DiscreteSolution {
    /// Bilinear interpolant of the transformed unknown at `(x, t)`.
    /// Exact at nodes; bounded by the four corners of the cell.
    pub fn eval_transformed(&self, x: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange { what: "x", value: x });
        }
        if !(0.0..=self.time().t_final()).contains(&t) {
            return Err(Error::OutOfRange { what: "t", value: t });
        }
        let i = cell_index(self.space().nodes(), x);
        let j = cell_index(self.time().nodes(), t);
        let wx = (x - self.space().node(i)) / (self.space().node(i + 1) - self.space().node(i));
        let wt = (t - self.time().node(j)) / (self.time().node(j + 1) - self.time().node(j));
        Ok((1.0 - wx) * (1.0 - wt) * self.value(i, j)
            + wx * (1.0 - wt) * self.value(i + 1, j)
            + (1.0 - wx) * wt * self.value(i, j + 1)
            + wx * wt * self.value(i + 1, j + 1))
    }

    /// Original unknown at `(s, t)`: the interpolated transformed solution
    /// at the mapped point plus the damped singular part.
    pub fn eval_physical(&self, s: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange { what: "s", value: s });
        }
        let snap = MapSnapshot::at(self.curve(), t)?;
        let base = self.eval_transformed(snap.forward(s), t)?;
        let d = self.space().interface();
        let psi0 = if t == 0.0 {
            // defining limit at the initial time
            if s < d {
                0.0
            } else if s == d {
                1.0
            } else {
                2.0
            }
        } else {
            erfc((snap.layer() - s) / (2.0 * math::sqrt(self.epsilon() * t)))
        };
        Ok(base + 0.5 * self.jump() * self.damping(t)? * psi0)
    }
}

/// Greatest `i` with `nodes[i] <= q`, clamped so `i + 1` is valid.
fn cell_index(nodes: &[f64], q: f64) -> usize {
    debug_assert!(nodes.len() >= 2);
    match nodes.binary_search_by(|v| v.partial_cmp(&q).unwrap()) {
        Ok(i) => i.min(nodes.len() - 2),
        Err(i) => i.saturating_sub(1).min(nodes.len() - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::example_1;
    use crate::solver::solve;

    #[test]
    fn cell_lookup() {
        let nodes = [0.0, 0.25, 0.5, 1.0];
        assert_eq!(cell_index(&nodes, 0.0), 0);
        assert_eq!(cell_index(&nodes, 0.25), 1);
        assert_eq!(cell_index(&nodes, 0.3), 1);
        assert_eq!(cell_index(&nodes, 1.0), 2);
    }

    #[test]
    fn interpolant_is_exact_at_nodes() {
        let sol = solve(&example_1(), 2f64.powi(-8), 32, 16).unwrap();
        for j in (0..=16).step_by(4) {
            for i in (0..=32).step_by(5) {
                let x = sol.space().node(i);
                let t = sol.time().node(j);
                assert_eq!(sol.eval_transformed(x, t).unwrap(), sol.value(i, j));
            }
        }
    }

    #[test]
    fn cell_center_is_the_corner_mean() {
        let sol = solve(&example_1(), 2f64.powi(-8), 32, 16).unwrap();
        let (i, j) = (10, 7);
        let x = 0.5 * (sol.space().node(i) + sol.space().node(i + 1));
        let t = 0.5 * (sol.time().node(j) + sol.time().node(j + 1));
        let mean = 0.25
            * (sol.value(i, j) + sol.value(i + 1, j) + sol.value(i, j + 1) + sol.value(i + 1, j + 1));
        assert!((sol.eval_transformed(x, t).unwrap() - mean).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_restores_the_initial_branches() {
        let sol = solve(&example_1(), 2f64.powi(-8), 32, 16).unwrap();
        // both branches of the original initial data are constants
        assert_eq!(sol.eval_physical(0.1, 0.0).unwrap(), -2.0);
        assert!((sol.eval_physical(0.7, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_queries_fail() {
        let sol = solve(&example_1(), 2f64.powi(-8), 32, 16).unwrap();
        assert!(sol.eval_transformed(-0.1, 0.2).is_err());
        assert!(sol.eval_transformed(0.5, 0.6).is_err());
        assert!(sol.eval_physical(1.2, 0.1).is_err());
    }
}
