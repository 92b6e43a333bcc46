//! The closed curve `γ`: a pole-switching dihedral arc followed by its mirror
//! image traversed backwards.

use std::fmt::Write as _;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::track::correct;
use super::{track_arc, SlicePoint, TrackedArc, TrackerConfig, TwoBridgeGroup};
use crate::error::{ArcReport, Error, Result};
use crate::pairing::{
    FamilyPoint, LoopSample, PeripheralElement, Provenance, RepLoop, RepresentationFamily,
    SampleSource,
};
use crate::quat::{unwrap_near, UnitQuaternion};
use crate::words::TwoBridgeKnot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoop {
    pub knot: TwoBridgeKnot,
    /// First and last points coincide.
    pub points: Vec<SlicePoint>,
    /// Index of the far dihedral endpoint, where the mirrored half begins.
    pub junction: usize,
    pub arc: TrackedArc,
}

impl ClosedLoop {
    pub fn is_closed(&self) -> bool {
        let (a, b) = (self.points[0], self.points[self.points.len() - 1]);
        a.distance(&b) < 1e-12
    }
}

/// Searches the arcs leaving each dihedral point, in both directions, for the
/// first one ending at another dihedral point with `B` at the opposite pole.
pub fn build_gamma(group: &TwoBridgeGroup, cfg: &TrackerConfig) -> Result<ClosedLoop> {
    let starts = super::find_dihedral(group.knot())?;
    let mut reports = Vec::new();
    for start in starts {
        for direction in [1i8, -1] {
            let arc = track_arc(group, start, direction, cfg)?;
            let switch = arc.pole_switch(group)?;
            let last = *arc.last();
            reports.push(ArcReport {
                start_psi: start.psi,
                direction,
                end: arc.end.to_string(),
                end_phi: last.phi,
                end_psi: last.psi,
                pole_switch: switch,
            });
            if switch {
                return Ok(close(group, arc));
            }
        }
    }
    Err(Error::NoPoleSwitchFound { arcs: reports })
}

fn close(group: &TwoBridgeGroup, arc: TrackedArc) -> ClosedLoop {
    let junction = arc.points.len() - 1;
    let mut points = arc.points.clone();
    // both ends sit on φ = π/2, which the mirror fixes
    points.extend(arc.points.iter().rev().skip(1).map(SlicePoint::mirror));
    let n = points.len();
    points[n - 1] = points[0];
    ClosedLoop { knot: *group.knot(), points, junction, arc }
}

/// `(θ_μ, θ_λ)` at a slice point as principal values.
fn peripheral_angles(group: &TwoBridgeGroup, s: &SlicePoint) -> Result<(f64, f64)> {
    let theta_beta = group.beta_angle(s)?;
    Ok((s.phi, theta_beta - 2.0 * group.exponent_sum() as f64 * s.phi))
}

/// Peripheral restriction of `γ` as an unwrapped loop of angles, with
/// `θ_μ = φ` and `θ_λ = θ_β − 2eφ` from `λ = β x^(−2e)`.
pub fn peripheral_restriction(group: &TwoBridgeGroup, gamma: &ClosedLoop) -> Result<RepLoop> {
    let total = gamma.points.len() - 1;
    let mut samples: Vec<LoopSample> = Vec::with_capacity(gamma.points.len());
    let mut theta_beta_prev: Option<f64> = None;
    for (i, s) in gamma.points.iter().enumerate() {
        let raw = group.beta_angle(s)?;
        let theta_beta = match theta_beta_prev {
            Some(p) => unwrap_near(p, raw),
            None => raw,
        };
        theta_beta_prev = Some(theta_beta);
        samples.push(LoopSample {
            t: i as f64 / total as f64,
            theta_mu: s.phi,
            theta_lambda: theta_beta - 2.0 * group.exponent_sum() as f64 * s.phi,
            source: SampleSource::Slice { phi: s.phi, psi: s.psi },
        });
    }
    let k = group.knot();
    RepLoop::new(Provenance::TwoBridgeGamma { n: k.n(), k: k.k() }, samples)
}

/// CSV trace of `γ`: `index,t,phi,psi,theta_beta,residual`, `θ_β` unwrapped.
pub fn trace_csv(group: &TwoBridgeGroup, gamma: &ClosedLoop) -> Result<String> {
    let mut out = String::from("index,t,phi,psi,theta_beta,residual\n");
    let total = gamma.points.len() - 1;
    let mut prev: Option<f64> = None;
    for (i, s) in gamma.points.iter().enumerate() {
        let raw = group.beta_angle(s)?;
        let tb = prev.map_or(raw, |p| unwrap_near(p, raw));
        prev = Some(tb);
        let _ = writeln!(
            out,
            "{i},{:.12},{:.15},{:.15},{:.15},{:.3e}",
            i as f64 / total as f64,
            s.phi,
            s.psi,
            tb,
            group.residual(s).norm()
        );
    }
    Ok(out)
}

impl RepresentationFamily for TwoBridgeGroup {
    /// Linear interpolation in `(φ, ψ)` projected back onto the curve
    /// perpendicular to the chord.
    fn interpolate(&self, a: &SampleSource, b: &SampleSource, u: f64) -> Result<FamilyPoint> {
        let (SampleSource::Slice { phi: p0, psi: s0 }, SampleSource::Slice { phi: p1, psi: s1 }) =
            (*a, *b)
        else {
            return Err(Error::NoUnderlyingRepresentation);
        };
        let guess = SlicePoint::new(p0 + u * (p1 - p0), s0 + u * (s1 - s0));
        let chord = Vector2::new(p1 - p0, s1 - s0);
        let s = if chord.norm() < 1e-15 {
            guess
        } else {
            let c = chord.normalize();
            let cfg = TrackerConfig { residual_tol: 1e-10, ..TrackerConfig::default() };
            correct(self, guess, Vector2::new(-c[1], c[0]), &cfg)
                .ok_or(Error::RefinementStalled { error: self.residual(&guess).norm() })?
        };
        let (rho_x, rho_y) = s.generators();
        let (theta_mu, theta_lambda) = peripheral_angles(self, &s)?;
        Ok(FamilyPoint {
            rho_x,
            rho_y,
            source: SampleSource::Slice { phi: s.phi, psi: s.psi },
            theta_mu,
            theta_lambda,
        })
    }

    fn peripheral_image(
        &self,
        rho_x: &UnitQuaternion,
        rho_y: &UnitQuaternion,
        a: &PeripheralElement,
    ) -> UnitQuaternion {
        self.knot().slope_word(a.m, a.n).evaluate(rho_x, rho_y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{nu, winding_number};
    use std::f64::consts::FRAC_PI_2;

    fn group(n: u32, k: u32) -> TwoBridgeGroup {
        TwoBridgeGroup::new(TwoBridgeKnot::new(n, k).unwrap())
    }

    #[test]
    fn figure_eight_gamma_closes() {
        let g = group(2, 3);
        let gamma = build_gamma(&g, &TrackerConfig::default()).unwrap();
        assert!(gamma.is_closed());
        assert!((gamma.points[gamma.junction].phi - FRAC_PI_2).abs() < 1e-12);
        for p in &gamma.points {
            assert!(g.residual(p).norm() < 1e-8);
        }
        // the second half is the mirror of the first
        let j = gamma.junction;
        for i in 0..=j {
            let m = gamma.points[2 * j - i].mirror();
            assert!(m.distance(&gamma.points[i]) < 1e-15);
        }
    }

    #[test]
    fn longitude_relation_holds_pointwise() {
        let g = group(2, 3);
        let gamma = build_gamma(&g, &TrackerConfig::default()).unwrap();
        let lam = g.knot().longitude();
        for s in gamma.points.iter().step_by(17) {
            let (qx, qy) = s.generators();
            let (_, tl) = peripheral_angles(&g, s).unwrap();
            let direct = lam.evaluate(&qx, &qy).circle_angle(&crate::quat::SpherePoint::E1).unwrap();
            assert!(unwrap_near(0.0, tl - direct).abs() < 1e-8);
        }
    }

    #[test]
    fn meridian_winds_zero_and_longitude_two() {
        for (n, k) in [(2, 3), (3, 3), (3, 5)] {
            let g = group(n, k);
            let gamma = build_gamma(&g, &TrackerConfig::default()).unwrap();
            let l = peripheral_restriction(&g, &gamma).unwrap();
            assert_eq!(nu(&l, &PeripheralElement::MERIDIAN).unwrap().value, 0);
            let c = nu(&l, &PeripheralElement::LONGITUDE).unwrap().value;
            assert_eq!(c.abs(), 2, "{}", g.knot());
            let mu: Vec<f64> = l.samples().iter().map(|s| s.theta_mu).collect();
            assert_eq!(winding_number(&mu).unwrap(), 0);
        }
    }

    #[test]
    fn trefoil_has_no_pole_switch() {
        let g = group(1, 1);
        match build_gamma(&g, &TrackerConfig::default()) {
            Err(Error::NoPoleSwitchFound { arcs }) => {
                assert_eq!(arcs.len(), 2);
                assert!(arcs.iter().all(|a| a.end == "reducible-boundary" && !a.pole_switch));
            }
            other => panic!("expected NoPoleSwitchFound, got {other:?}"),
        }
    }

    #[test]
    fn figure_eight_fillings_have_nonabelian_solutions() {
        use crate::pairing::dehn_fill_solve;
        let g = group(2, 3);
        let gamma = build_gamma(&g, &TrackerConfig::default()).unwrap();
        let l = peripheral_restriction(&g, &gamma).unwrap();
        for (m, n) in [(1, 1), (-1, 1), (2, 1), (3, 1), (5, 2)] {
            let a = PeripheralElement::new(m, n);
            let f = dehn_fill_solve(&l, &a).unwrap();
            assert!(f.alpha_distance < 1e-8, "{m}/{n}");
            assert!(f.commutator_distance > 1e-3, "{m}/{n}");
            // independent check from the slope word
            let img = g.knot().slope_word(m, n).evaluate(&f.rho_x, &f.rho_y);
            assert!(img.distance_to_identity() < 1e-8);
        }
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let g = group(2, 3);
        let gamma = build_gamma(&g, &TrackerConfig::default()).unwrap();
        let csv = trace_csv(&g, &gamma).unwrap();
        assert_eq!(csv.lines().count(), gamma.points.len() + 1);
        assert!(csv.starts_with("index,t,phi,psi,theta_beta,residual"));
    }
}
