//! The two-angle slice of the SU(2) representation variety of a
//! two-bridge knot group.
//!
//! A slice point `(φ, ψ)` stands for the representation
//! `ρ(x) = qrot(e₁, φ)`, `ρ(y) = qrot((cos ψ, sin ψ, 0), φ)`.

mod dihedral;
mod gamma;
mod rhombus;
mod track;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::quat::{commutator_distance, qrot, SpherePoint, UnitQuaternion};
use crate::words::{GroupWord, TwoBridgeKnot};

pub use dihedral::{find_dihedral, find_dihedral_with, DEFAULT_SCAN_SAMPLES};
pub use gamma::{build_gamma, peripheral_restriction, trace_csv, ClosedLoop};
pub use rhombus::{rhombus, rhombus_path, RhombusData};
pub use track::{track_arc, ArcEnd, TrackedArc, TrackerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub phi: f64,
    pub psi: f64,
}

impl SlicePoint {
    pub fn new(phi: f64, psi: f64) -> Self {
        Self { phi, psi }
    }

    pub fn dihedral(psi: f64) -> Self {
        Self { phi: FRAC_PI_2, psi }
    }

    /// `(φ, ψ) ↦ (π − φ, ψ)`, realizing `ρ̄(x) = −ρ(x⁻¹)`, `ρ̄(y) = −ρ(y⁻¹)`.
    pub fn mirror(&self) -> Self {
        Self { phi: PI - self.phi, psi: self.psi }
    }

    /// Images of the generators.
    pub fn generators(&self) -> (UnitQuaternion, UnitQuaternion) {
        (
            qrot(&SpherePoint::E1, self.phi),
            qrot(&SpherePoint::equator(self.psi), self.phi),
        )
    }

    pub fn meridian_axis(&self) -> SpherePoint {
        SpherePoint::E1
    }

    pub fn distance(&self, other: &SlicePoint) -> f64 {
        (self.phi - other.phi).hypot(self.psi - other.psi)
    }

    /// Distance to the edge of the open square `(0, π)²`.
    pub fn boundary_distance(&self) -> f64 {
        self.phi.min(PI - self.phi).min(self.psi).min(PI - self.psi)
    }
}

/// Relator test quaternion `ρ(W) ρ(x) ρ(W)⁻¹ ρ(y)⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub imag: [f64; 3],
    pub real: f64,
}

impl Residual {
    pub fn norm(&self) -> f64 {
        let [a, b, c] = self.imag;
        (a * a + b * b + c * c).sqrt()
    }

    /// A representation on the `+1` branch.
    pub fn is_solution(&self, tol: f64) -> bool {
        self.norm() < tol && self.real > 0.0
    }
}

/// Precomputed words of a two-bridge knot group.
#[derive(Clone, Debug)]
pub struct TwoBridgeGroup {
    knot: TwoBridgeKnot,
    w: GroupWord,
    w_star: GroupWord,
    beta: GroupWord,
    exponent_sum: i64,
}

impl TwoBridgeGroup {
    pub fn new(knot: TwoBridgeKnot) -> Self {
        let w = knot.relator_word();
        let w_star = w.star();
        let beta = w_star.concat(&w);
        let exponent_sum = w.exponent_sum();
        Self { knot, w, w_star, beta, exponent_sum }
    }

    pub fn knot(&self) -> &TwoBridgeKnot {
        &self.knot
    }

    pub fn w(&self) -> &GroupWord {
        &self.w
    }

    pub fn w_star(&self) -> &GroupWord {
        &self.w_star
    }

    pub fn beta(&self) -> &GroupWord {
        &self.beta
    }

    /// `e = Σ ε(i)`.
    pub fn exponent_sum(&self) -> i64 {
        self.exponent_sum
    }

    pub fn residual(&self, s: &SlicePoint) -> Residual {
        let (qx, qy) = s.generators();
        let v = self.w.evaluate(&qx, &qy);
        let r = v.qmul(&qx).qmul(&v.inverse()).qmul(&qy.inverse());
        Residual { imag: r.imag(), real: r.w() }
    }

    pub fn beta_image(&self, s: &SlicePoint) -> UnitQuaternion {
        let (qx, qy) = s.generators();
        self.beta.evaluate(&qx, &qy)
    }

    /// Circle angle of `ρ(β)` on the meridian axis, principal value.
    pub fn beta_angle(&self, s: &SlicePoint) -> crate::Result<f64> {
        self.beta_image(s).circle_angle(&SpherePoint::E1)
    }

    /// `‖[ρ(x), ρ(y)] − 1‖`.
    pub fn commutator_distance(&self, s: &SlicePoint) -> f64 {
        let (qx, qy) = s.generators();
        commutator_distance(&qx, &qy)
    }
}

/// Free-function form of [`TwoBridgeGroup::residual`].
pub fn residual(knot: &TwoBridgeKnot, s: &SlicePoint) -> Residual {
    TwoBridgeGroup::new(*knot).residual(s)
}
