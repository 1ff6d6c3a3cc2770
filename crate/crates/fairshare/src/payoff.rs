use std::fmt;
use std::ops::{Add, Mul, Sub};

/// A utility pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Payoff {
    pub u1: f64,
    pub u2: f64,
}

impl Payoff {
    pub const fn new(u1: f64, u2: f64) -> Self {
        Payoff { u1, u2 }
    }

    pub fn dot(self, other: Payoff) -> f64 {
        self.u1 * other.u1 + self.u2 * other.u2
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, other: Payoff) -> f64 {
        (self - other).norm()
    }

    /// Componentwise `|self|`, used when folding symmetric domains.
    pub fn abs(self) -> Payoff {
        Payoff::new(self.u1.abs(), self.u2.abs())
    }

    pub fn min_component(self) -> f64 {
        self.u1.min(self.u2)
    }
}

impl Add for Payoff {
    type Output = Payoff;
    fn add(self, rhs: Payoff) -> Payoff {
        Payoff::new(self.u1 + rhs.u1, self.u2 + rhs.u2)
    }
}

impl Sub for Payoff {
    type Output = Payoff;
    fn sub(self, rhs: Payoff) -> Payoff {
        Payoff::new(self.u1 - rhs.u1, self.u2 - rhs.u2)
    }
}

impl Mul<f64> for Payoff {
    type Output = Payoff;
    fn mul(self, t: f64) -> Payoff {
        Payoff::new(self.u1 * t, self.u2 * t)
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u1, self.u2)
    }
}

/// Componentwise positive affine map `u -> (a1*u1 + b1, a2*u2 + b2)`.
///
/// These are the utility rescalings the solution concepts are expected to
/// commute with, so both scale factors must be strictly positive.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl AffineMap {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Self {
        assert!(a1 > 0.0 && a2 > 0.0, "affine scale factors must be positive");
        AffineMap { a1, b1, a2, b2 }
    }

    pub fn identity() -> Self {
        AffineMap { a1: 1.0, b1: 0.0, a2: 1.0, b2: 0.0 }
    }

    pub fn apply(&self, p: Payoff) -> Payoff {
        Payoff::new(self.a1 * p.u1 + self.b1, self.a2 * p.u2 + self.b2)
    }

    pub fn inverse(&self) -> AffineMap {
        AffineMap {
            a1: 1.0 / self.a1,
            b1: -self.b1 / self.a1,
            a2: 1.0 / self.a2,
            b2: -self.b2 / self.a2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_round_trip() {
        let m = AffineMap::new(2.5, -1.0, 0.25, 3.0);
        let p = Payoff::new(0.3, -0.7);
        let q = m.inverse().apply(m.apply(p));
        assert!(p.dist(q) < 1e-12);
    }

    #[test]
    #[should_panic]
    fn rejects_negative_scale() {
        AffineMap::new(-1.0, 0.0, 1.0, 0.0);
    }
}
