//! Piecewise-linear coordinate change that pins the moving layer to the
//! fixed line `x = d`, and the coefficients of the transformed equation.
//!
//! The map stretches `[0, d(t)]` onto `[0, d]` and `[d(t), 1]` onto
//! `[d, 1]`, so `s = d(t)` goes to `x = d` at every time. Its one-sided
//! squared slope `g` enters the transformed time derivative, and the
//! transformed convection coefficient
//!
//! ```text
//!     kappa(x,t) = sqrt(g) * (a(x,t) + a(d,t) * (w(x) - 1))
//! ```
//!
//! vanishes at the interface (`w` is the hat weight [`interface_weight`]),
//! which is what lets a fixed fitted mesh track the layer.

use crate::characteristic::CharacteristicCurve;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Which side of the interface `x = d` a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Side of a point strictly left of `d`; points at or right of `d` are
/// `Right`. The solver never asks for two-sided quantities at `x = d`
/// itself (the interface row is the transmission condition).
#[inline]
pub fn side_of(x: f64, d: f64) -> Side {
    if x < d {
        Side::Left
    } else {
        Side::Right
    }
}

/// Hat weight: 1 at the endpoints, 0 at the interface, linear in between.
#[inline]
pub fn interface_weight(x: f64, d: f64) -> f64 {
    if x < d {
        (d - x) / d
    } else {
        (x - d) / (1.0 - d)
    }
}

/// Map context tied to one integrated layer path.
pub struct TransformContext<'a> {
    d: f64,
    curve: &'a CharacteristicCurve,
}

impl<'a> TransformContext<'a> {
    pub fn new(curve: &'a CharacteristicCurve) -> Self {
        TransformContext { d: curve.start(), curve }
    }

    pub fn interface(&self) -> f64 {
        self.d
    }

    pub fn curve(&self) -> &CharacteristicCurve {
        self.curve
    }

    /// Freeze the map at time `t`; all per-level solver work goes through
    /// a snapshot so the path is queried once per time level.
    pub fn snapshot(&self, t: f64) -> Result<MapSnapshot> {
        MapSnapshot::at(self.curve, t)
    }

    /// `x(s, t)`.
    pub fn forward(&self, s: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange { what: "s", value: s });
        }
        Ok(self.snapshot(t)?.forward(s))
    }

    /// `s(x, t)`.
    pub fn inverse(&self, x: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange { what: "x", value: x });
        }
        Ok(self.snapshot(t)?.inverse(x))
    }

    /// One-sided squared map slope `g`.
    pub fn metric(&self, side: Side, t: f64) -> Result<f64> {
        Ok(self.snapshot(t)?.metric(side))
    }

    /// Transformed convection coefficient `kappa(x, t)`, one-sided at the
    /// interface.
    pub fn convection(&self, p: &ProblemSpec, x: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange { what: "x", value: x });
        }
        Ok(self.snapshot(t)?.convection(p, x))
    }
}

/// The map at one frozen time.
#[derive(Clone, Copy, Debug)]
pub struct MapSnapshot {
    t: f64,
    d: f64,
    d_t: f64,
}

impl MapSnapshot {
    /// Freeze the map for `curve` at time `t`.
    pub fn at(curve: &CharacteristicCurve, t: f64) -> Result<MapSnapshot> {
        Ok(MapSnapshot { t, d: curve.start(), d_t: curve.position(t)? })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn interface(&self) -> f64 {
        self.d
    }

    /// Layer position `d(t)`.
    pub fn layer(&self) -> f64 {
        self.d_t
    }

    /// `x(s)`: endpoints stay fixed and the layer goes exactly to `d`.
    #[inline]
    pub fn forward(&self, s: f64) -> f64 {
        if s == self.d_t {
            self.d
        } else if s < self.d_t {
            self.d / self.d_t * s
        } else {
            1.0 - (1.0 - self.d) / (1.0 - self.d_t) * (1.0 - s)
        }
    }

    /// `s(x)`: algebraic inverse of [`MapSnapshot::forward`].
    #[inline]
    pub fn inverse(&self, x: f64) -> f64 {
        if x == self.d {
            self.d_t
        } else if x < self.d {
            self.d_t / self.d * x
        } else {
            1.0 - (1.0 - self.d_t) / (1.0 - self.d) * (1.0 - x)
        }
    }

    /// One-sided map slope `sqrt(g)`: `d(t)/d` left of the interface,
    /// `(1 - d(t))/(1 - d)` right of it.
    #[inline]
    pub fn scale(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.d_t / self.d,
            Side::Right => (1.0 - self.d_t) / (1.0 - self.d),
        }
    }

    /// One-sided squared slope `g`.
    #[inline]
    pub fn metric(&self, side: Side) -> f64 {
        let r = self.scale(side);
        r * r
    }

    /// `kappa(x)` at this time level.
    #[inline]
    pub fn convection(&self, p: &ProblemSpec, x: f64) -> f64 {
        let side = side_of(x, self.d);
        let a_here = p.convection(self.inverse(x), self.t);
        let a_layer = p.convection(self.d_t, self.t);
        self.scale(side) * (a_here + a_layer * (interface_weight(x, self.d) - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::integrate;
    use crate::problem::example_1;

    /// Snapshot with prescribed layer position, for hand-checkable values.
    fn snap(d: f64, d_t: f64) -> MapSnapshot {
        MapSnapshot { t: 0.0, d, d_t }
    }

    #[test]
    fn endpoints_and_interface_are_pinned() {
        let m = snap(0.2, 0.3);
        assert_eq!(m.forward(0.0), 0.0);
        assert_eq!(m.forward(1.0), 1.0);
        assert_eq!(m.forward(0.3), 0.2);
        assert_eq!(m.inverse(0.2), 0.3);
    }

    #[test]
    fn hand_values() {
        let m = snap(0.2, 0.3);
        assert!((m.forward(0.15) - 0.1).abs() < 1e-16);
        assert!((m.inverse(0.1) - 0.15).abs() < 1e-16);
        assert!((m.metric(Side::Left) - 2.25).abs() < 1e-15);
        assert!((m.metric(Side::Right) - 0.765625).abs() < 1e-15);
    }

    #[test]
    fn metric_is_one_at_start() {
        let p = example_1();
        let c = integrate(&p, 1e-12).unwrap();
        let ctx = TransformContext::new(&c);
        assert_eq!(ctx.metric(Side::Left, 0.0).unwrap(), 1.0);
        assert_eq!(ctx.metric(Side::Right, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn metric_jump_is_negative_for_positive_time() {
        let p = example_1();
        let c = integrate(&p, 1e-12).unwrap();
        let ctx = TransformContext::new(&c);
        for k in 1..=10 {
            let t = 0.05 * k as f64;
            let s = ctx.snapshot(t).unwrap();
            assert!(s.metric(Side::Right) - s.metric(Side::Left) < 0.0);
        }
    }

    #[test]
    fn convection_vanishes_at_the_interface() {
        let p = example_1();
        let c = integrate(&p, 1e-12).unwrap();
        let ctx = TransformContext::new(&c);
        for k in 0..=10 {
            let t = 0.05 * k as f64;
            assert!(ctx.convection(&p, 0.2, t).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn convection_at_the_inflow_has_unit_weight() {
        // w(0) = 1 kills the layer term, leaving sqrt(g) * a(0, t).
        let p = example_1();
        let c = integrate(&p, 1e-12).unwrap();
        let ctx = TransformContext::new(&c);
        let t = 0.4;
        let s = ctx.snapshot(t).unwrap();
        let expect = s.scale(Side::Left) * p.convection(0.0, t);
        assert!((ctx.convection(&p, 0.0, t).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_points_are_rejected() {
        let p = example_1();
        let c = integrate(&p, 1e-12).unwrap();
        let ctx = TransformContext::new(&c);
        assert!(ctx.forward(-0.1, 0.2).is_err());
        assert!(ctx.inverse(1.1, 0.2).is_err());
    }
}
