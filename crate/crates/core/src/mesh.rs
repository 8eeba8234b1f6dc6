//! Piecewise-uniform fitted meshes.
//!
//! The space mesh splits `[0, 1]` at `d - sigma1, d, d + sigma2, 1 - sigma`
//! into five pieces carrying `3N/8 : N/8 : N/8 : N/4 : N/8` uniform cells.
//! The two inner widths resolve the interior layer on either side of the
//! interface, the outer one the boundary layer at the outflow edge; each
//! width is capped so the pieces always fit. The interface lands exactly on
//! node `N/2`. Time is discretized uniformly.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Layer-resolving widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoints {
    /// Interior-layer width left of the interface.
    pub sigma1: f64,
    /// Interior-layer width right of the interface.
    pub sigma2: f64,
    /// Boundary-layer width at the outflow edge.
    pub sigma: f64,
}

/// Compute the transition points for diffusion `epsilon` and `n` cells:
///
/// ```text
///     sigma1 = min( d/4, 2 sqrt(T eps) ln n )
///     sigma2 = min( 1 - d(T), d/4, 2 sqrt(T eps / delta) ln n )
///     sigma  = min( (1 - (d + sigma2))/2, (2 eps / (alpha delta)) ln n )
/// ```
///
/// with `1 - d(T) = delta (1 - d)`.
pub fn transition_points(
    epsilon: f64,
    n: usize,
    d: f64,
    t_final: f64,
    delta: f64,
    alpha: f64,
) -> Result<TransitionPoints> {
    check_cell_count(n)?;
    assert!(epsilon > 0.0, "epsilon must be positive");
    assert!(d > 0.0 && d < 1.0, "interface must lie in (0, 1)");
    assert!(t_final > 0.0, "final time must be positive");
    assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    assert!(alpha > 0.0, "alpha must be positive");

    let log_n = math::ln(n as f64);
    let sigma1 = (d / 4.0).min(2.0 * math::sqrt(t_final * epsilon) * log_n);
    let end_gap = delta * (1.0 - d); // 1 - d(T)
    let sigma2 = end_gap
        .min(d / 4.0)
        .min(2.0 * math::sqrt(t_final * epsilon / delta) * log_n);
    let sigma = (0.5 * (1.0 - (d + sigma2))).min(2.0 * epsilon / (alpha * delta) * log_n);

    if !(sigma1 > 0.0 && sigma2 > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidMesh { reason: "transition point is not positive" });
    }
    if d + sigma2 > 1.0 - 2.0 * sigma + 4.0 * f64::EPSILON {
        return Err(Error::InvalidMesh { reason: "layer pieces overlap the boundary piece" });
    }
    Ok(TransitionPoints { sigma1, sigma2, sigma })
}

/// Space mesh with `n + 1` nodes; node `n/2` is the interface, exactly.
#[derive(Debug, Clone)]
pub struct SpaceMesh {
    n: usize,
    d: f64,
    nodes: Vec<f64>,
    trans: TransitionPoints,
}

impl SpaceMesh {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interface(&self) -> f64 {
        self.d
    }

    pub fn interface_index(&self) -> usize {
        self.n / 2
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Cell width `x_i - x_{i-1}`, for `1 <= i <= n`.
    #[inline]
    pub fn width(&self, i: usize) -> f64 {
        self.nodes[i] - self.nodes[i - 1]
    }

    pub fn transition(&self) -> TransitionPoints {
        self.trans
    }
}

/// Build the five-piece mesh. Nodes within a piece are affine in the index
/// (no running sums), and piece boundaries are pinned to their exact
/// values, so the interface sits on node `n/2` with no rounding drift.
pub fn build_space_mesh(n: usize, d: f64, trans: TransitionPoints) -> Result<SpaceMesh> {
    check_cell_count(n)?;
    let TransitionPoints { sigma1, sigma2, sigma } = trans;
    let bounds = [0.0, d - sigma1, d, d + sigma2, 1.0 - sigma, 1.0];
    if bounds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidMesh { reason: "piece boundaries are not increasing" });
    }
    let counts = [3 * n / 8, n / 8, n / 8, n / 4, n / 8];
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    for (piece, &count) in counts.iter().enumerate() {
        let (left, right) = (bounds[piece], bounds[piece + 1]);
        for q in 1..count {
            nodes.push(left + (right - left) * q as f64 / count as f64);
        }
        nodes.push(right);
    }
    debug_assert_eq!(nodes.len(), n + 1);
    debug_assert_eq!(nodes[n / 2], d);
    if nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidMesh { reason: "nodes are not strictly increasing" });
    }
    Ok(SpaceMesh { n, d, nodes, trans })
}

fn check_cell_count(n: usize) -> Result<()> {
    if n < 8 || n % 8 != 0 {
        return Err(Error::InvalidMesh { reason: "N must be a positive multiple of 8" });
    }
    Ok(())
}

/// Uniform time mesh on `[0, T]`.
#[derive(Debug, Clone)]
pub struct TimeMesh {
    m: usize,
    t_final: f64,
    step: f64,
    nodes: Vec<f64>,
}

impl TimeMesh {
    pub fn new(m: usize, t_final: f64) -> Result<TimeMesh> {
        if m == 0 {
            return Err(Error::InvalidMesh { reason: "M must be at least 1" });
        }
        assert!(t_final > 0.0, "final time must be positive");
        // t_j = T * (j/M): endpoints come out exact, and halving M keeps
        // the shared nodes bit-identical.
        let nodes = (0..=m).map(|j| t_final * (j as f64 / m as f64)).collect();
        Ok(TimeMesh { m, t_final, step: t_final / m as f64, nodes })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Step `k = T/M`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `t_j`; the endpoints are exact.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_built_minimal_mesh() {
        let trans = TransitionPoints { sigma1: 0.1, sigma2: 0.1, sigma: 0.1 };
        let mesh = build_space_mesh(8, 0.5, trans).unwrap();
        let want = [0.0, 0.4 / 3.0, 0.8 / 3.0, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0];
        assert_eq!(mesh.nodes().len(), 9);
        for (got, want) in mesh.nodes().iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-15, "{got} != {want}");
        }
        assert_eq!(mesh.node(mesh.interface_index()), 0.5);
    }

    #[test]
    fn transition_points_take_the_geometric_branch_for_large_eps() {
        // d/4 caps both interior widths when eps = 1
        let tp = transition_points(1.0, 64, 0.2, 0.5, 0.87396874627460513, 0.0425).unwrap();
        assert_eq!(tp.sigma1, 0.05);
        assert_eq!(tp.sigma2, 0.05);
    }

    #[test]
    fn transition_points_take_the_diffusion_branch_for_small_eps() {
        let eps = 2f64.powi(-20);
        let tp = transition_points(eps, 64, 0.2, 0.5, 0.87396874627460513, 0.0425).unwrap();
        assert!((tp.sigma1 - 5.7437000593860187e-3).abs() < 1e-15);
        assert!((tp.sigma - 2.1356100774261606e-4).abs() < 1e-17);
    }

    #[test]
    fn widths_are_uniform_within_each_piece() {
        let eps = 2f64.powi(-12);
        let tp = transition_points(eps, 64, 0.2, 0.5, 0.87396874627460513, 0.0425).unwrap();
        let mesh = build_space_mesh(64, 0.2, tp).unwrap();
        let ranges = [(1, 24), (25, 32), (33, 40), (41, 56), (57, 64)];
        for (lo, hi) in ranges {
            let h = mesh.width(lo);
            for i in lo..=hi {
                // widths are differences of O(1) coordinates, so they can
                // wiggle by a couple of ulps of the coordinate scale
                assert!((mesh.width(i) - h).abs() <= 2.0 * f64::EPSILON, "piece not uniform");
            }
        }
    }

    #[test]
    fn fine_width_formula_when_all_caps_inactive() {
        // with every min taking the diffusion branch, h = 8 sigma1 / N on
        // the piece left of the interface
        let eps = 2f64.powi(-20);
        let n = 64;
        let tp = transition_points(eps, n, 0.2, 0.5, 0.87396874627460513, 0.0425).unwrap();
        let mesh = build_space_mesh(n, 0.2, tp).unwrap();
        let h = mesh.width(mesh.interface_index());
        assert!((h - 8.0 * tp.sigma1 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn bad_cell_counts_are_rejected() {
        assert!(matches!(
            transition_points(1.0, 63, 0.2, 0.5, 0.5, 1.0),
            Err(Error::InvalidMesh { .. })
        ));
        assert!(matches!(
            transition_points(1.0, 4, 0.2, 0.5, 0.5, 1.0),
            Err(Error::InvalidMesh { .. })
        ));
        let trans = TransitionPoints { sigma1: 0.01, sigma2: 0.01, sigma: 0.01 };
        assert!(build_space_mesh(20, 0.5, trans).is_err());
    }

    #[test]
    fn overlapping_pieces_are_rejected() {
        // sigma1 bigger than d: left boundary would go negative
        let trans = TransitionPoints { sigma1: 0.6, sigma2: 0.1, sigma: 0.1 };
        assert!(matches!(
            build_space_mesh(8, 0.5, trans),
            Err(Error::InvalidMesh { .. })
        ));
    }

    #[test]
    fn time_mesh_endpoints_are_exact() {
        let tm = TimeMesh::new(48, 0.5).unwrap();
        assert_eq!(tm.node(0), 0.0);
        assert_eq!(tm.node(48), 0.5);
        assert!((tm.node(7) - 0.5 * 7.0 / 48.0).abs() < 1e-16);
        assert!(TimeMesh::new(0, 0.5).is_err());
    }
}
