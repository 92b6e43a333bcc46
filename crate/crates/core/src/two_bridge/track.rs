//! Predictor–corrector continuation of the zero curve of the relator residual.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3x2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::{rhombus_path, SlicePoint, TwoBridgeGroup};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Predictor step in the `(φ, ψ)` plane.
    pub step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    pub boundary_margin: f64,
    /// Residual norm every accepted sample must satisfy.
    pub residual_tol: f64,
    pub corrector_max_iter: usize,
    pub fd_step: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            step: 0.01,
            min_step: 1e-7,
            max_steps: 100_000,
            boundary_margin: 1e-4,
            residual_tol: 1e-8,
            corrector_max_iter: 25,
            fd_step: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcEnd {
    Dihedral,
    ReducibleBoundary,
    StepLimit,
}

impl std::fmt::Display for ArcEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArcEnd::Dihedral => "dihedral",
            ArcEnd::ReducibleBoundary => "reducible-boundary",
            ArcEnd::StepLimit => "step-limit",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedArc {
    pub points: Vec<SlicePoint>,
    /// Cumulative arc length in the `(φ, ψ)` plane.
    pub arc_length: Vec<f64>,
    pub end: ArcEnd,
    pub direction: i8,
}

impl TrackedArc {
    pub fn start(&self) -> &SlicePoint {
        &self.points[0]
    }

    pub fn last(&self) -> &SlicePoint {
        self.points.last().expect("arc has at least its start point")
    }

    /// Whether `B` (the fixed point of `ρ(W)`, followed continuously) lies at
    /// opposite poles at the two ends. Only meaningful for dihedral ends.
    pub fn pole_switch(&self, group: &TwoBridgeGroup) -> Result<bool> {
        if self.end != ArcEnd::Dihedral {
            return Ok(false);
        }
        let path = rhombus_path(group, &self.points)?;
        let (b0, b1) = (path[0].b, path[path.len() - 1].b);
        Ok(b0.coords()[2] * b1.coords()[2] < 0.0)
    }
}

fn residual_vec(group: &TwoBridgeGroup, s: &SlicePoint) -> Vector3<f64> {
    Vector3::from(group.residual(s).imag)
}

fn jacobian(group: &TwoBridgeGroup, s: &SlicePoint, h: f64) -> Matrix3x2<f64> {
    let d_phi = (residual_vec(group, &SlicePoint::new(s.phi + h, s.psi))
        - residual_vec(group, &SlicePoint::new(s.phi - h, s.psi)))
        / (2.0 * h);
    let d_psi = (residual_vec(group, &SlicePoint::new(s.phi, s.psi + h))
        - residual_vec(group, &SlicePoint::new(s.phi, s.psi - h)))
        / (2.0 * h);
    Matrix3x2::from_columns(&[d_phi, d_psi])
}

/// Unit null direction of the 3×2 Jacobian (smallest right singular vector).
fn null_direction(j: &Matrix3x2<f64>) -> Vector2<f64> {
    let svd = j.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let idx = if svd.singular_values[0] < svd.singular_values[1] { 0 } else { 1 };
    Vector2::new(vt[(idx, 0)], vt[(idx, 1)]).normalize()
}

pub(super) fn tangent_at(
    group: &TwoBridgeGroup,
    s: &SlicePoint,
    cfg: &TrackerConfig,
) -> Vector2<f64> {
    null_direction(&jacobian(group, s, cfg.fd_step))
}

/// Gauss–Newton corrections along `normal` only, so the corrected point stays
/// on the line through `start` orthogonal to the predictor direction.
pub(super) fn correct(
    group: &TwoBridgeGroup,
    start: SlicePoint,
    normal: Vector2<f64>,
    cfg: &TrackerConfig,
) -> Option<SlicePoint> {
    let mut x = start;
    let target = (cfg.residual_tol * 1e-4).max(1e-13);
    for it in 0..=cfg.corrector_max_iter {
        let f = residual_vec(group, &x);
        if f.norm() < target {
            return Some(x);
        }
        if it == cfg.corrector_max_iter {
            break;
        }
        let jn = jacobian(group, &x, cfg.fd_step) * normal;
        let denom = jn.norm_squared();
        if denom < 1e-30 {
            return None;
        }
        let s = -jn.dot(&f) / denom;
        x = SlicePoint::new(x.phi + s * normal[0], x.psi + s * normal[1]);
        if s.abs() < 1e-15 {
            break;
        }
    }
    // stagnated updates still count when inside tolerance
    (residual_vec(group, &x).norm() < cfg.residual_tol).then_some(x)
}

/// Lands on `φ = π/2` between two consecutive samples straddling it.
fn snap_to_dihedral(
    group: &TwoBridgeGroup,
    a: &SlicePoint,
    b: &SlicePoint,
) -> Option<SlicePoint> {
    let u = (FRAC_PI_2 - a.phi) / (b.phi - a.phi);
    let mut psi = a.psi + u * (b.psi - a.psi);
    let f = |p: f64| group.residual(&SlicePoint::dihedral(p)).imag[2];
    let h = 1e-7;
    for _ in 0..50 {
        let v = f(psi);
        if v.abs() < 1e-15 {
            break;
        }
        let d = (f(psi + h) - f(psi - h)) / (2.0 * h);
        if d.abs() < 1e-14 {
            return None;
        }
        let step = v / d;
        psi -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    let s = SlicePoint::dihedral(psi);
    group.residual(&s).is_solution(1e-10).then_some(s)
}

/// Tracks the representation curve from `start`. Direction `+1` leaves with
/// increasing `φ` (increasing `ψ` if the tangent is vertical in `φ`).
pub fn track_arc(
    group: &TwoBridgeGroup,
    start: SlicePoint,
    direction: i8,
    cfg: &TrackerConfig,
) -> Result<TrackedArc> {
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidInput("direction must be +1 or -1".into()));
    }
    let r0 = group.residual(&start);
    if r0.norm() >= cfg.residual_tol {
        return Err(Error::InvalidInput(format!(
            "start point residual {:.3e} is not below {:.1e}",
            r0.norm(),
            cfg.residual_tol
        )));
    }

    let mut tangent = tangent_at(group, &start, cfg);
    let lead = if tangent[0].abs() > 1e-12 { tangent[0] } else { tangent[1] };
    if lead * f64::from(direction) < 0.0 {
        tangent = -tangent;
    }

    let start_on_dihedral = (start.phi - FRAC_PI_2).abs() < 1e-12;
    let mut points = vec![start];
    let mut arc_length = vec![0.0];
    let mut x = start;
    let mut h = cfg.step;

    for _ in 0..cfg.max_steps {
        let normal = Vector2::new(-tangent[1], tangent[0]);
        let predicted = SlicePoint::new(x.phi + h * tangent[0], x.psi + h * tangent[1]);
        let corrected = correct(group, predicted, normal, cfg).filter(|c| {
            let d = c.distance(&x);
            d < 2.0 * h && d > 0.25 * h
        });
        let Some(next) = corrected else {
            h *= 0.5;
            if h < cfg.min_step {
                return Err(Error::CorrectorDiverged {
                    iterations: cfg.corrector_max_iter,
                    phi: x.phi,
                    psi: x.psi,
                });
            }
            continue;
        };

        let crossed = (x.phi - FRAC_PI_2) * (next.phi - FRAC_PI_2) < 0.0
            || ((next.phi - FRAC_PI_2) == 0.0 && !start_on_dihedral);
        let left_start = points.len() > 1 || !start_on_dihedral;
        if crossed && left_start {
            if let Some(end) = snap_to_dihedral(group, &x, &next) {
                let total = arc_length.last().unwrap() + x.distance(&end);
                points.push(end);
                arc_length.push(total);
                return Ok(TrackedArc { points, arc_length, end: ArcEnd::Dihedral, direction });
            }
        }

        let total = arc_length.last().unwrap() + x.distance(&next);
        if next.boundary_distance() < cfg.boundary_margin {
            points.push(next);
            arc_length.push(total);
            return Ok(TrackedArc {
                points,
                arc_length,
                end: ArcEnd::ReducibleBoundary,
                direction,
            });
        }

        let mut t_next = tangent_at(group, &next, cfg);
        if t_next.dot(&tangent) < 0.0 {
            t_next = -t_next;
        }
        tangent = t_next;
        x = next;
        points.push(next);
        arc_length.push(total);
        h = (h * 1.5).min(cfg.step);
    }

    Ok(TrackedArc { points, arc_length, end: ArcEnd::StepLimit, direction })
}
