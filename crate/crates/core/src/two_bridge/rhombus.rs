//! The spherical rhombus `A B C D` formed by the fixed points of
//! `ρ(x), ρ(W), ρ(y), ρ(W*)`.

use serde::{Deserialize, Serialize};

use super::{SlicePoint, TwoBridgeGroup};
use crate::error::{Error, Result};
use crate::quat::SpherePoint;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhombusData {
    pub a: SpherePoint,
    pub b: SpherePoint,
    pub c: SpherePoint,
    pub d: SpherePoint,
    /// Oriented angle at `A` from the arc `A→B` to the arc `A→D`, in `(−π, π]`.
    pub theta: f64,
    /// Sign applied to the stored axes of `ρ(W)` and `ρ(W*)`.
    pub sign: i8,
}

impl RhombusData {
    pub fn side_lengths(&self) -> [f64; 4] {
        [
            self.a.arc_distance(&self.b),
            self.b.arc_distance(&self.c),
            self.c.arc_distance(&self.d),
            self.d.arc_distance(&self.a),
        ]
    }

    /// Largest difference between two side lengths.
    pub fn side_spread(&self) -> f64 {
        let s = self.side_lengths();
        let max = s.iter().cloned().fold(f64::MIN, f64::max);
        let min = s.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }
}

fn tangent_at(base: &SpherePoint, p: &SpherePoint) -> [f64; 3] {
    let a = base.coords();
    let v = p.coords();
    let k = base.dot(p);
    [v[0] - k * a[0], v[1] - k * a[1], v[2] - k * a[2]]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Rhombus at `s`. With `prev`, the axis sign follows `prev` continuously;
/// without it, `B` is placed in the closed upper hemisphere.
pub fn rhombus(
    group: &TwoBridgeGroup,
    s: &SlicePoint,
    prev: Option<&RhombusData>,
) -> Result<RhombusData> {
    let a = SpherePoint::E1;
    let c = SpherePoint::equator(s.psi);
    if s.psi.sin().abs() < 1e-9 {
        return Err(Error::DegenerateRhombus("A = ±C (abelian image)"));
    }
    let (qx, qy) = s.generators();
    let v = group.w().evaluate(&qx, &qy);
    let v_star = group.w_star().evaluate(&qx, &qy);
    let (b_raw, d_raw) = match (v.axis(), v_star.axis()) {
        (Ok(b), Ok(d)) => (b, d),
        _ => return Err(Error::DegenerateRhombus("rho(W) is central")),
    };
    let sign: i8 = match prev {
        Some(p) if b_raw.dot(&p.b) < 0.0 => -1,
        Some(_) => 1,
        None if b_raw.coords()[2] < 0.0 => -1,
        None => 1,
    };
    let (b, d) = if sign < 0 { (b_raw.antipode(), d_raw.antipode()) } else { (b_raw, d_raw) };

    let tb = tangent_at(&a, &b);
    let td = tangent_at(&a, &d);
    if norm3(tb) < 1e-12 || norm3(td) < 1e-12 {
        return Err(Error::DegenerateRhombus("B or D coincides with ±A"));
    }
    let cr = [
        tb[1] * td[2] - tb[2] * td[1],
        tb[2] * td[0] - tb[0] * td[2],
        tb[0] * td[1] - tb[1] * td[0],
    ];
    let sin_part = a.coords().iter().zip(cr).map(|(x, y)| x * y).sum::<f64>();
    let cos_part = tb.iter().zip(td).map(|(x, y)| x * y).sum::<f64>();
    let theta = sin_part.atan2(cos_part);

    Ok(RhombusData { a, b, c, d, theta, sign })
}

/// Rhombi along a path, with the axis sign carried continuously.
pub fn rhombus_path(group: &TwoBridgeGroup, points: &[SlicePoint]) -> Result<Vec<RhombusData>> {
    let mut out: Vec<RhombusData> = Vec::with_capacity(points.len());
    for p in points {
        let r = rhombus(group, p, out.last())?;
        out.push(r);
    }
    Ok(out)
}
