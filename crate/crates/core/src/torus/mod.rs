//! Arcs of irreducible SU(2) characters of the `(p, q)` torus knot group
//! `⟨x, y | x^p = y^q⟩`, and the loops they close up with the abelian
//! characters.

mod surgery;

use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairing::{
    FamilyPoint, LoopSample, PeripheralElement, Provenance, RepLoop, RepresentationFamily,
    SampleSource,
};
use crate::quat::{qrot, unwrap_near, SpherePoint, UnitQuaternion};
use crate::words::TorusKnot;

pub use surgery::{
    classify_surgery, construct_witness, SurgeryClassification, SurgeryVerdict, TorusSlope,
    Witness,
};

/// Closure tolerance at the junctions of a ζ-loop.
pub const JUNCTION_TOL: f64 = 1e-6;
pub const DEFAULT_LOOP_SAMPLES: usize = 1024;

/// The arc `A_(a,b)`: `tr ρ(x) = 2cos(aπ/p)`, `tr ρ(y) = 2cos(bπ/q)`. Along it
/// the meridian angle runs between `cπ/pq` and `dπ/pq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcDescriptor {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ArcDescriptor {
    /// `ψ ∈ {0, π}` at which the meridian angle equals `dπ/pq`.
    pub fn d_end(&self, knot: &TorusKnot) -> f64 {
        let at_zero = reducible_meridian_residue(knot, self.a, self.b, false);
        if at_zero == self.d {
            0.0
        } else {
            PI
        }
    }
}

fn check_label(knot: &TorusKnot, a: i64, b: i64) -> Result<()> {
    if !(1..knot.p()).contains(&a) || !(1..knot.q()).contains(&b) || (a - b).rem_euclid(2) != 0 {
        return Err(Error::InvalidInput(format!(
            "({a}, {b}) is not an arc label of {knot}: need 1 ≤ a < {}, 1 ≤ b < {}, a ≡ b mod 2",
            knot.p(),
            knot.q()
        )));
    }
    Ok(())
}

/// Solution of `s ≡ r1 (mod 2p)`, `s ≡ r2 (mod 2q)` in `[0, 2pq)`;
/// requires `r1 ≡ r2 (mod 2)`.
fn crt(p: i64, q: i64, r1: i64, r2: i64) -> i64 {
    let m = 2 * p * q;
    let diff = (r2 - r1).rem_euclid(2 * q);
    debug_assert_eq!(diff % 2, 0);
    // 2p t ≡ diff (mod 2q)  ⇔  p t ≡ diff/2 (mod q)
    let p_inv = p.extended_gcd(&q).x.rem_euclid(q);
    let t = (diff / 2 * p_inv).rem_euclid(q);
    (r1 + 2 * p * t).rem_euclid(m)
}

/// The two residues `c < d` in `1..pq` with `s ≡ ±a (mod 2p)` and
/// `s ≡ ±b (mod 2q)`.
pub fn arc_endpoints(knot: &TorusKnot, a: i64, b: i64) -> Result<(i64, i64)> {
    check_label(knot, a, b)?;
    let (p, q) = (knot.p(), knot.q());
    let mut sols: Vec<i64> = [(a, b), (a, -b), (-a, b), (-a, -b)]
        .iter()
        .map(|&(r1, r2)| crt(p, q, r1, r2))
        .filter(|&s| 0 < s && s < p * q)
        .collect();
    sols.sort_unstable();
    sols.dedup();
    match sols[..] {
        [c, d] => Ok((c, d)),
        _ => Err(Error::InvalidInput(format!("congruences for ({a}, {b}) are degenerate"))),
    }
}

/// All `(p−1)(q−1)/2` arcs, sorted by `(a, b)`.
pub fn enumerate_arcs(knot: &TorusKnot) -> Vec<ArcDescriptor> {
    let mut out = Vec::new();
    for a in 1..knot.p() {
        for b in (1..knot.q()).filter(|b| (a - b) % 2 == 0) {
            let (c, d) = arc_endpoints(knot, a, b).expect("valid label");
            out.push(ArcDescriptor { a, b, c, d });
        }
    }
    out
}

pub fn arc_descriptor(knot: &TorusKnot, a: i64, b: i64) -> Result<ArcDescriptor> {
    let (c, d) = arc_endpoints(knot, a, b)?;
    Ok(ArcDescriptor { a, b, c, d })
}

/// `ρ(x) = qrot(e₁, aπ/p)`, `ρ(y) = qrot((cos ψ, sin ψ, 0), bπ/q)`.
/// At `ψ ∈ {0, π}` the image is abelian.
pub fn arc_rep(knot: &TorusKnot, arc: &ArcDescriptor, psi: f64) -> (UnitQuaternion, UnitQuaternion) {
    (
        qrot(&SpherePoint::E1, arc.a as f64 * PI / knot.p() as f64),
        qrot(&SpherePoint::equator(psi), arc.b as f64 * PI / knot.q() as f64),
    )
}

/// Quaternion angle of `ρ(μ)` in `[0, π]`.
pub fn meridian_trace_angle(knot: &TorusKnot, arc: &ArcDescriptor, psi: f64) -> Result<f64> {
    let (qx, qy) = arc_rep(knot, arc, psi);
    let m = knot.meridian().evaluate(&qx, &qy);
    if m.is_central() {
        return Err(Error::CentralElement);
    }
    Ok(m.angle())
}

/// Residue `r ∈ 1..pq` with meridian angle `rπ/pq` at `ψ = 0` (or `π`).
fn reducible_meridian_residue(knot: &TorusKnot, a: i64, b: i64, at_pi: bool) -> i64 {
    let (u, v) = knot.meridian_exponents();
    let (p, q) = (knot.p(), knot.q());
    let sign = if at_pi { -1 } else { 1 };
    // ρ(μ) = qrot(e₁, (u a q + sign · v b p) π / pq), folded into [0, π]
    let r = (u * a * q + sign * v * b * p).rem_euclid(2 * p * q);
    if r > p * q {
        2 * p * q - r
    } else {
        r
    }
}

/// Loop `ζ`-winding `(d − c)/2` times: abelian characters with meridian angle
/// from `cπ/pq` to `dπ/pq`, then the arc back from its `d` end to its `c` end.
pub fn build_zeta_loop(knot: &TorusKnot, arc: &ArcDescriptor, samples: usize) -> Result<RepLoop> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples per segment".into()));
    }
    let pq = knot.pq() as f64;
    let (s_c, s_d) = (arc.c as f64 * PI / pq, arc.d as f64 * PI / pq);
    let n = samples - 1;

    let mut out: Vec<LoopSample> = Vec::with_capacity(2 * samples);
    // reducible segment, θ_λ = θ_ζ − pq θ_μ = 0; its endpoint s_d is
    // represented by the arc's first sample instead
    for i in 0..n {
        let s = s_c + (s_d - s_c) * i as f64 / n as f64;
        out.push(LoopSample {
            t: 0.0,
            theta_mu: s,
            theta_lambda: 0.0,
            source: SampleSource::TorusReducible { s },
        });
    }

    let psi_d = arc.d_end(knot);
    let psi_c = PI - psi_d;
    let theta_zeta = arc.d as f64 * PI;
    for i in 0..=n {
        let psi = psi_d + (psi_c - psi_d) * i as f64 / n as f64;
        let mu = meridian_trace_angle(knot, arc, psi)?;
        out.push(LoopSample {
            t: 0.0,
            theta_mu: mu,
            theta_lambda: theta_zeta - pq * mu,
            source: SampleSource::TorusArc { psi },
        });
    }

    let gap_d = (out[n].theta_mu - s_d).abs();
    let gap_c = (out[out.len() - 1].theta_mu - s_c).abs();
    let gap = gap_d.max(gap_c);
    if gap > JUNCTION_TOL {
        return Err(Error::JunctionMismatch { gap });
    }
    let total = (out.len() - 1) as f64;
    for (i, s) in out.iter_mut().enumerate() {
        s.t = i as f64 / total;
    }
    RepLoop::new(
        Provenance::TorusZeta { p: knot.p(), q: knot.q(), a: arc.a, b: arc.b },
        out,
    )
}

/// Representations behind the samples of a ζ-loop.
#[derive(Clone, Copy, Debug)]
pub struct TorusArcFamily {
    knot: TorusKnot,
    arc: ArcDescriptor,
}

impl TorusArcFamily {
    pub fn new(knot: TorusKnot, a: i64, b: i64) -> Result<Self> {
        Ok(Self { knot, arc: arc_descriptor(&knot, a, b)? })
    }

    /// Meridian angle `s` of an abelian sample, or of an arc endpoint.
    fn as_reducible(&self, src: &SampleSource) -> Option<f64> {
        match *src {
            SampleSource::TorusReducible { s } => Some(s),
            SampleSource::TorusArc { psi } if psi == 0.0 || psi == PI => {
                meridian_trace_angle(&self.knot, &self.arc, psi).ok()
            }
            _ => None,
        }
    }
}

impl RepresentationFamily for TorusArcFamily {
    fn interpolate(&self, a: &SampleSource, b: &SampleSource, u: f64) -> Result<FamilyPoint> {
        let pq = self.knot.pq() as f64;
        if let (SampleSource::TorusArc { psi: p0 }, SampleSource::TorusArc { psi: p1 }) = (a, b) {
            let psi = p0 + u * (p1 - p0);
            let (rho_x, rho_y) = arc_rep(&self.knot, &self.arc, psi);
            let mu = meridian_trace_angle(&self.knot, &self.arc, psi)?;
            let zeta = if self.arc.a % 2 == 0 { 0.0 } else { PI };
            return Ok(FamilyPoint {
                rho_x,
                rho_y,
                source: SampleSource::TorusArc { psi },
                theta_mu: mu,
                theta_lambda: zeta - pq * mu,
            });
        }
        let (Some(s0), Some(s1)) = (self.as_reducible(a), self.as_reducible(b)) else {
            return Err(Error::NoUnderlyingRepresentation);
        };
        let s = s0 + u * (s1 - s0);
        // x ↦ μ^q, y ↦ μ^p with ρ(μ) = qrot(e₁, s)
        let rho_x = qrot(&SpherePoint::E1, self.knot.q() as f64 * s);
        let rho_y = qrot(&SpherePoint::E1, self.knot.p() as f64 * s);
        Ok(FamilyPoint {
            rho_x,
            rho_y,
            source: SampleSource::TorusReducible { s },
            theta_mu: s,
            theta_lambda: 0.0,
        })
    }

    fn peripheral_image(
        &self,
        rho_x: &UnitQuaternion,
        rho_y: &UnitQuaternion,
        a: &PeripheralElement,
    ) -> UnitQuaternion {
        self.knot.peripheral_word(a.m - self.knot.pq() * a.n, a.n).evaluate(rho_x, rho_y)
    }
}

/// Unwrapped `θ_ζ` along a ζ-loop, recovered as `θ_λ + pq θ_μ`.
pub fn zeta_angles(knot: &TorusKnot, l: &RepLoop) -> Vec<f64> {
    let pq = knot.pq() as f64;
    let mut prev: Option<f64> = None;
    l.samples()
        .iter()
        .map(|s| {
            let raw = s.theta_lambda + pq * s.theta_mu;
            let v = prev.map_or(raw, |p| unwrap_near(p, raw));
            prev = Some(v);
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{kernel_classify, nu, KernelClass};
    use crate::quat::commutator_distance;
    use crate::words::torus_knots_up_to;
    use rand::{Rng, SeedableRng};

    fn knot(p: i64, q: i64) -> TorusKnot {
        TorusKnot::new(p, q).unwrap()
    }

    /// Brute-force oracle: residues in `1..pq` meeting both congruence pairs.
    fn brute_endpoints(k: &TorusKnot, a: i64, b: i64) -> Vec<i64> {
        let (p, q) = (k.p(), k.q());
        (1..p * q)
            .filter(|s| {
                let m1 = s.rem_euclid(2 * p);
                let m2 = s.rem_euclid(2 * q);
                (m1 == a || m1 == 2 * p - a) && (m2 == b || m2 == 2 * q - b)
            })
            .collect()
    }

    #[test]
    fn endpoint_examples() {
        assert_eq!(
            enumerate_arcs(&knot(2, 3)),
            vec![ArcDescriptor { a: 1, b: 1, c: 1, d: 5 }]
        );
        assert_eq!(
            enumerate_arcs(&knot(2, 5)),
            vec![
                ArcDescriptor { a: 1, b: 1, c: 1, d: 9 },
                ArcDescriptor { a: 1, b: 3, c: 3, d: 7 }
            ]
        );
        let arcs = enumerate_arcs(&knot(3, 4));
        assert_eq!(arcs.len(), 3);
        assert_eq!((arcs[0].c, arcs[0].d), (1, 7));
        assert_eq!(arc_endpoints(&knot(3, 5), 1, 1).unwrap(), (1, 11));
    }

    #[test]
    fn endpoints_match_brute_force() {
        for k in torus_knots_up_to(9) {
            let arcs = enumerate_arcs(&k);
            assert_eq!(arcs.len() as i64, (k.p() - 1) * (k.q() - 1) / 2, "{k}");
            for arc in arcs {
                assert_eq!(brute_endpoints(&k, arc.a, arc.b), vec![arc.c, arc.d], "{k} {arc:?}");
                assert_eq!((arc.d - arc.c) % 2, 0);
            }
        }
    }

    #[test]
    fn crt_solutions_pair_up() {
        let k = knot(4, 7);
        for arc in enumerate_arcs(&k) {
            let m = 2 * k.pq();
            let mut all: Vec<i64> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                .iter()
                .map(|&(e, f)| crt(k.p(), k.q(), e * arc.a, f * arc.b))
                .collect();
            all.sort_unstable();
            assert_eq!(all, vec![arc.c, arc.d, m - arc.d, m - arc.c]);
        }
    }

    #[test]
    fn invalid_labels() {
        assert!(arc_endpoints(&knot(2, 3), 1, 2).is_err());
        assert!(arc_endpoints(&knot(2, 3), 2, 2).is_err());
    }

    #[test]
    fn arc_reps_satisfy_relator() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for k in torus_knots_up_to(9) {
            for arc in enumerate_arcs(&k) {
                let psi = rng.gen_range(0.01..PI - 0.01);
                let (qx, qy) = arc_rep(&k, &arc, psi);
                assert!(qx.pow(k.p()).distance(&qy.pow(k.q())) < 1e-12);
                let sign = if arc.a % 2 == 0 { 1.0 } else { -1.0 };
                assert!((qx.pow(k.p()).w() - sign).abs() < 1e-12);
                assert!(commutator_distance(&qx, &qy) > 0.0);
            }
        }
    }

    #[test]
    fn meridian_angle_limits() {
        for k in torus_knots_up_to(7) {
            let pq = k.pq() as f64;
            for arc in enumerate_arcs(&k) {
                let lo = meridian_trace_angle(&k, &arc, 1e-7).unwrap();
                let hi = meridian_trace_angle(&k, &arc, PI - 1e-7).unwrap();
                let mut got = [lo, hi];
                got.sort_by(f64::total_cmp);
                assert!((got[0] - arc.c as f64 * PI / pq).abs() < 1e-4, "{k} {arc:?}");
                assert!((got[1] - arc.d as f64 * PI / pq).abs() < 1e-4, "{k} {arc:?}");
            }
        }
    }

    #[test]
    fn trefoil_meridian_range_and_continuity() {
        let k = knot(2, 3);
        let arc = enumerate_arcs(&k)[0];
        let vals: Vec<f64> = (1..1024)
            .map(|i| meridian_trace_angle(&k, &arc, PI * i as f64 / 1024.0).unwrap())
            .collect();
        let d = 1e-6;
        assert!(vals.iter().all(|&v| v > PI / 6.0 - d && v < 5.0 * PI / 6.0 + d));
        assert!(vals.windows(2).all(|w| (w[1] - w[0]).abs() < PI / 64.0));
    }

    #[test]
    fn zeta_winding_examples() {
        for (p, q, a, b, expected) in [(2, 3, 1, 1, 2), (2, 5, 1, 3, 2), (3, 4, 1, 1, 3)] {
            let k = knot(p, q);
            let arc = arc_descriptor(&k, a, b).unwrap();
            let l = build_zeta_loop(&k, &arc, DEFAULT_LOOP_SAMPLES).unwrap();
            let zeta = PeripheralElement::new(k.pq(), 1);
            assert_eq!(nu(&l, &zeta).unwrap().value, expected);
            assert_eq!(nu(&l, &PeripheralElement::MERIDIAN).unwrap().value, 0);
        }
    }

    #[test]
    fn zeta_angle_is_constant_on_arc() {
        let k = knot(3, 5);
        let arc = arc_descriptor(&k, 1, 3).unwrap();
        let l = build_zeta_loop(&k, &arc, 256).unwrap();
        let z = zeta_angles(&k, &l);
        for (s, zv) in l.samples().iter().zip(&z) {
            if let SampleSource::TorusArc { .. } = s.source {
                assert!((zv - arc.d as f64 * PI).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zeta_winding_all_small_knots() {
        for k in torus_knots_up_to(15).into_iter().filter(|k| k.pq() <= 45) {
            for arc in enumerate_arcs(&k) {
                let l = build_zeta_loop(&k, &arc, DEFAULT_LOOP_SAMPLES).unwrap();
                let v = nu(&l, &PeripheralElement::new(k.pq(), 1)).unwrap().value;
                assert_eq!(v, (arc.d - arc.c) / 2, "{k} {arc:?}");
            }
        }
    }

    #[test]
    fn filling_matches_witness() {
        use crate::pairing::dehn_fill_solve;
        let k = knot(2, 3);
        let l = build_zeta_loop(&k, &enumerate_arcs(&k)[0], DEFAULT_LOOP_SAMPLES).unwrap();
        let f = dehn_fill_solve(&l, &PeripheralElement::new(4, 1)).unwrap();
        assert!(f.irreducible);
        let w = construct_witness(&k, &TorusSlope::new(4, 1).unwrap()).unwrap();
        assert!((f.rho_x.trace() - w.rho_x.trace()).abs() < 1e-6);
        assert!((f.rho_y.trace() - w.rho_y.trace()).abs() < 1e-6);
        let tm = |x, y| k.meridian().evaluate(x, y).trace();
        assert!((tm(&f.rho_x, &f.rho_y) - tm(&w.rho_x, &w.rho_y)).abs() < 1e-6);
    }

    #[test]
    fn trefoil_kernel_is_meridian_only() {
        let k = knot(2, 3);
        let l = build_zeta_loop(&k, &enumerate_arcs(&k)[0], DEFAULT_LOOP_SAMPLES).unwrap();
        assert_eq!(kernel_classify(&l).unwrap(), KernelClass::MeridianOnly { c: 2 });
    }
}
