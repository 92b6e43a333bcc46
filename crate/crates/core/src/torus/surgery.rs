//! Which Dehn fillings of a torus knot exterior carry irreducible SU(2) or
//! nonabelian SO(3) representations, with explicit witnesses.

use std::f64::consts::{FRAC_PI_2, PI};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{arc_descriptor, arc_rep, enumerate_arcs, meridian_trace_angle, ArcDescriptor};
use crate::error::{Error, Result};
use crate::quat::{commutator_distance, so3_commutator_distance, UnitQuaternion};
use crate::words::TorusKnot;

const WITNESS_TOL: f64 = 1e-9;
const MIN_COMMUTATOR: f64 = 0.1;
const BRACKET_SAMPLES: usize = 1024;

/// Slope `m/n` normalized to `n ≥ 0`, `gcd(m, n) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusSlope {
    pub m: i64,
    pub n: i64,
}

impl TorusSlope {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m.gcd(&n) != 1 {
            return Err(Error::InvalidInput(format!("{m}/{n} is not a reduced slope")));
        }
        Ok(if n < 0 { Self { m: -m, n: -n } } else { Self { m, n } })
    }

    /// `(g, h)` with `α = μ^g ζ^h`, from `ζ = μ^{pq} λ`.
    pub fn gh(&self, knot: &TorusKnot) -> (i64, i64) {
        (self.m - knot.pq() * self.n, self.n)
    }
}

impl std::str::FromStr for TorusSlope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse slope {s:?}; expected m/n"));
        let (m, n) = match s.split_once('/') {
            Some((m, n)) => (m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        TorusSlope::new(m, n)
    }
}

impl std::fmt::Display for TorusSlope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.m, self.n)
    }
}

/// A representation on an arc with `ρ(α) = sign`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub arc: ArcDescriptor,
    pub psi: f64,
    pub rho_x: UnitQuaternion,
    pub rho_y: UnitQuaternion,
    /// Target meridian angle `kπ/|g|`; absent when `g = 0`.
    pub theta_target: Option<f64>,
    pub k: Option<i64>,
    pub meridian_angle: f64,
    /// `±1`.
    pub sign: i8,
    /// `‖ρ(α) − sign‖`.
    pub alpha_distance: f64,
    pub commutator_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurgeryVerdict {
    IrreducibleSu2 { witness: Witness },
    NonabelianSo3Only { witness: Witness },
    AllSo3Abelian,
    MeridianExcluded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurgeryClassification {
    pub p: i64,
    pub q: i64,
    pub slope: TorusSlope,
    pub g: i64,
    pub h: i64,
    /// Case `1..=4`; absent for the meridian.
    pub case: Option<u8>,
    pub verdict: SurgeryVerdict,
}

fn alpha_image(knot: &TorusKnot, g: i64, h: i64, qx: &UnitQuaternion, qy: &UnitQuaternion) -> UnitQuaternion {
    knot.peripheral_word(g, h).evaluate(qx, qy)
}

fn witness_at(
    knot: &TorusKnot,
    arc: ArcDescriptor,
    psi: f64,
    g: i64,
    h: i64,
    sign: i8,
    target: Option<(i64, f64)>,
) -> Result<Witness> {
    let (rho_x, rho_y) = arc_rep(knot, &arc, psi);
    let img = alpha_image(knot, g, h, &rho_x, &rho_y);
    let expected = if sign > 0 { UnitQuaternion::IDENTITY } else { -UnitQuaternion::IDENTITY };
    let comm = if sign > 0 {
        commutator_distance(&rho_x, &rho_y)
    } else {
        so3_commutator_distance(&rho_x, &rho_y)
    };
    Ok(Witness {
        arc,
        psi,
        rho_x,
        rho_y,
        theta_target: target.map(|t| t.1),
        k: target.map(|t| t.0),
        meridian_angle: meridian_trace_angle(knot, &arc, psi)?,
        sign,
        alpha_distance: img.distance(&expected),
        commutator_distance: comm,
    })
}

impl Witness {
    pub fn verifies(&self) -> bool {
        self.alpha_distance < WITNESS_TOL && self.commutator_distance > MIN_COMMUTATOR
    }
}

/// Classification of the filling along `slope` into one of four cases:
/// `g = 0` with `p > 2` (irreducible SU(2)), `g = 0` with `p = 2` (nonabelian
/// SO(3) only), `|g| = 1` (abelian), `|g| ≥ 2` (irreducible SU(2)).
pub fn classify_surgery(knot: &TorusKnot, slope: &TorusSlope) -> Result<SurgeryClassification> {
    let (g, h) = slope.gh(knot);
    let (case, verdict) = if slope.n == 0 {
        (None, SurgeryVerdict::MeridianExcluded)
    } else if g == 0 && knot.p() > 2 {
        // ρ(ζ) = +1 on even arcs, so ρ(α) = ρ(ζ)^h = 1
        let arc = arc_descriptor(knot, 2, 2)?;
        let witness = witness_at(knot, arc, FRAC_PI_2, g, h, 1, None)?;
        (Some(1), SurgeryVerdict::IrreducibleSu2 { witness })
    } else if g == 0 {
        let arc = arc_descriptor(knot, 1, 1)?;
        let sign = if h % 2 == 0 { 1 } else { -1 };
        let witness = witness_at(knot, arc, FRAC_PI_2, g, h, sign, None)?;
        (Some(2), SurgeryVerdict::NonabelianSo3Only { witness })
    } else if g.abs() == 1 {
        (Some(3), SurgeryVerdict::AllSo3Abelian)
    } else {
        let witness = construct_witness(knot, slope)?;
        (Some(4), SurgeryVerdict::IrreducibleSu2 { witness })
    };
    Ok(SurgeryClassification { p: knot.p(), q: knot.q(), slope: *slope, g, h, case, verdict })
}

/// Arc tried first: `A_(1,1)` for `pq` even; for `pq` odd, `A_(a,c)` with `c`
/// the odd one of `(q ± p)/2` and `a` the odd residue of `±c` mod `p`.
fn preferred_arc(knot: &TorusKnot) -> Result<ArcDescriptor> {
    let (p, q) = (knot.p(), knot.q());
    if knot.pq() % 2 == 0 {
        return arc_descriptor(knot, 1, 1);
    }
    let c = if ((q + p) / 2) % 2 == 1 { (q + p) / 2 } else { (q - p) / 2 };
    let r = c.rem_euclid(p);
    let a = if r % 2 == 1 { r } else { p - r };
    arc_descriptor(knot, a, c)
}

/// Integers `k ≡ a·h (mod 2)` with `kπ/|g|` strictly inside `(cπ/pq, dπ/pq)`.
fn admissible_k(knot: &TorusKnot, arc: &ArcDescriptor, g: i64, h: i64) -> Vec<i64> {
    let (pq, ag) = (knot.pq(), g.abs());
    let parity = (arc.a * h).rem_euclid(2);
    (1..ag)
        .filter(|k| k % 2 == parity)
        .filter(|k| arc.c * ag < k * pq && k * pq < arc.d * ag)
        .collect()
}

/// First `ψ` from the left where the meridian angle crosses `theta`.
fn solve_psi(knot: &TorusKnot, arc: &ArcDescriptor, theta: f64) -> Result<Option<f64>> {
    let f = |psi: f64| meridian_trace_angle(knot, arc, psi).map(|v| v - theta);
    let mut prev = (0.0, f(0.0)?);
    for i in 1..=BRACKET_SAMPLES {
        let psi = PI * i as f64 / BRACKET_SAMPLES as f64;
        let cur = (psi, f(psi)?);
        if prev.1 == 0.0 {
            return Ok(Some(prev.0));
        }
        if prev.1.signum() != cur.1.signum() {
            let (mut lo, mut hi, mut f_lo) = (prev.0, cur.0, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid)?;
                if fm == 0.0 {
                    return Ok(Some(mid));
                }
                if fm.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = cur;
    }
    Ok(None)
}

/// Irreducible representation with `ρ(α) = 1` for `|g| ≥ 2`: a point on an
/// arc where the meridian angle is `kπ/|g|`, so that `ρ(μ)^g = (−1)^k` and
/// `ρ(ζ)^h = (−1)^{ah}` cancel.
pub fn construct_witness(knot: &TorusKnot, slope: &TorusSlope) -> Result<Witness> {
    let (g, h) = slope.gh(knot);
    if g.abs() < 2 || slope.n == 0 {
        return Err(Error::InvalidInput(format!(
            "witness construction needs |g| ≥ 2 and n ≠ 0, got g = {g}, n = {}",
            slope.n
        )));
    }
    let first = preferred_arc(knot)?;
    let arcs = std::iter::once(first).chain(enumerate_arcs(knot).into_iter().filter(|a| *a != first));
    for arc in arcs {
        for k in admissible_k(knot, &arc, g, h) {
            let theta = k as f64 * PI / g.abs() as f64;
            let Some(psi) = solve_psi(knot, &arc, theta)? else {
                continue;
            };
            let w = witness_at(knot, arc, psi, g, h, 1, Some((k, theta)))?;
            if w.verifies() {
                return Ok(w);
            }
        }
    }
    Err(Error::NoParityMultiple { g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::enumerate_arcs;
    use crate::words::torus_knots_up_to;
    use proptest::prelude::*;

    fn knot(p: i64, q: i64) -> TorusKnot {
        TorusKnot::new(p, q).unwrap()
    }

    fn classify(p: i64, q: i64, m: i64, n: i64) -> SurgeryClassification {
        classify_surgery(&knot(p, q), &TorusSlope::new(m, n).unwrap()).unwrap()
    }

    #[test]
    fn slope_normalization() {
        assert_eq!(TorusSlope::new(-3, -2).unwrap(), TorusSlope { m: 3, n: 2 });
        assert!(TorusSlope::new(4, 2).is_err());
        assert_eq!("7/1".parse::<TorusSlope>().unwrap(), TorusSlope { m: 7, n: 1 });
        assert_eq!("5".parse::<TorusSlope>().unwrap(), TorusSlope { m: 5, n: 1 });
        assert_eq!("1/0".parse::<TorusSlope>().unwrap(), TorusSlope { m: 1, n: 0 });
        assert!("a/b".parse::<TorusSlope>().is_err());
    }

    #[test]
    fn four_case_structure() {
        let c = classify(2, 3, 6, 1);
        assert_eq!(c.case, Some(2));
        assert!(matches!(c.verdict, SurgeryVerdict::NonabelianSo3Only { ref witness } if witness.verifies()));

        let c = classify(2, 3, 7, 1);
        assert_eq!(c.case, Some(3));
        assert_eq!(c.verdict, SurgeryVerdict::AllSo3Abelian);

        let c = classify(3, 5, 15, 1);
        assert_eq!(c.case, Some(1));
        assert!(matches!(c.verdict, SurgeryVerdict::IrreducibleSu2 { ref witness } if witness.verifies()));

        let c = classify(2, 3, 1, 0);
        assert_eq!(c.case, None);
        assert_eq!(c.verdict, SurgeryVerdict::MeridianExcluded);
    }

    #[test]
    fn trefoil_four_surgery_witness() {
        let c = classify(2, 3, 4, 1);
        assert_eq!((c.g, c.h, c.case), (-2, 1, Some(4)));
        let SurgeryVerdict::IrreducibleSu2 { witness } = c.verdict else { panic!() };
        assert_eq!((witness.arc.a, witness.arc.b, witness.k), (1, 1, Some(1)));
        assert!((witness.meridian_angle - FRAC_PI_2).abs() < 1e-9);
        // direct check: ρ(μ)² = −1 = ρ(ζ)⁻¹
        let k = knot(2, 3);
        let mu = k.meridian().evaluate(&witness.rho_x, &witness.rho_y);
        assert!(mu.pow(2).distance(&-UnitQuaternion::IDENTITY) < 1e-9);
    }

    #[test]
    fn odd_pq_witness_uses_preferred_arc() {
        let w = construct_witness(&knot(3, 5), &TorusSlope::new(13, 1).unwrap()).unwrap();
        assert_eq!((w.arc.a, w.arc.b), (1, 1));
        assert_eq!((w.arc.c, w.arc.d), (1, 11));
        assert!((w.theta_target.unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(w.verifies());
    }

    #[test]
    fn witness_falls_back_to_other_arcs() {
        // A_(1,1) of T(3,4) spans (π/12, 7π/12), too short for 27/2
        let w = construct_witness(&knot(3, 4), &TorusSlope::new(27, 2).unwrap()).unwrap();
        assert_eq!((w.arc.a, w.arc.b), (1, 3));
        assert!(w.verifies());
    }

    #[test]
    fn case_three_has_no_irreducible_solutions() {
        let k = knot(2, 3);
        let (g, h) = TorusSlope::new(7, 1).unwrap().gh(&k);
        for arc in enumerate_arcs(&k) {
            for i in 1..=512 {
                let psi = PI * i as f64 / 513.0;
                let (qx, qy) = arc_rep(&k, &arc, psi);
                if k.meridian().evaluate(&qx, &qy).is_central() {
                    continue;
                }
                let img = alpha_image(&k, g, h, &qx, &qy);
                let d = img.distance(&UnitQuaternion::IDENTITY).min(img.distance(&-UnitQuaternion::IDENTITY));
                assert!(d >= 1e-3, "psi {psi}: {d}");
            }
        }
    }

    #[test]
    fn witnesses_for_many_slopes() {
        for k in torus_knots_up_to(7) {
            for n in 1..=3i64 {
                for m in -40..=60i64 {
                    let Ok(slope) = TorusSlope::new(m, n) else { continue };
                    let c = classify_surgery(&k, &slope).unwrap();
                    match c.verdict {
                        SurgeryVerdict::IrreducibleSu2 { ref witness }
                        | SurgeryVerdict::NonabelianSo3Only { ref witness } => {
                            assert!(witness.verifies(), "{k} {slope}: {witness:?}")
                        }
                        SurgeryVerdict::AllSo3Abelian => assert_eq!(c.g.abs(), 1),
                        SurgeryVerdict::MeridianExcluded => unreachable!(),
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn verdicts_partition_slopes(m in -200i64..200, n in 0i64..20, idx in 0usize..10) {
            prop_assume!(m.gcd(&n) == 1);
            let k = torus_knots_up_to(7)[idx % torus_knots_up_to(7).len()];
            let slope = TorusSlope::new(m, n).unwrap();
            let c = classify_surgery(&k, &slope).unwrap();
            prop_assert_eq!(c.g + k.pq() * c.h, slope.m);
            let expected = if n == 0 { None } else if c.g == 0 { Some(if k.p() > 2 { 1 } else { 2 }) }
                else if c.g.abs() == 1 { Some(3) } else { Some(4) };
            prop_assert_eq!(c.case, expected);
        }
    }
}
