//! Desk-scale reproduction of the main results: each check runs a family of
//! small instances and reports pass or fail with a one-line summary.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::certificate::Tolerances;
use crate::error::{Error, Result};
use crate::pairing::{
    dehn_fill_solve_with, kernel_classify_with, nu_with, KernelClass, PeripheralElement,
    Provenance, RepLoop,
};
use crate::quat::unwrap_near;
use crate::torus::{
    build_zeta_loop, classify_surgery, construct_witness, enumerate_arcs, SurgeryVerdict,
    TorusSlope,
};
use crate::two_bridge::{
    build_gamma, find_dihedral, peripheral_restriction, rhombus_path, TwoBridgeGroup,
};
use crate::words::{two_bridge_knots_up_to, TorusKnot, TwoBridgeKnot};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&Tolerances) -> Result<String>;

const CHECKS: [(u8, &str, Check); 9] = [
    (1, "word identities", word_identities),
    (2, "torus arc endpoints", torus_arcs),
    (3, "zeta winding", zeta_winding),
    (4, "surgery classifier", surgery),
    (5, "dihedral counts", dihedral_counts),
    (6, "two-bridge loop winding", two_bridge_loops),
    (7, "rhombus invariants", rhombus_invariants),
    (8, "Dehn-filling solver", dehn_filling),
    (9, "pairing algebra", pairing_algebra),
];

pub fn run_all(tol: &Tolerances) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(id, name, f)| {
            let (passed, detail) = match f(tol) {
                Ok(d) => (true, d),
                Err(e) => (false, e.to_string()),
            };
            CheckResult { id, name: name.to_string(), passed, detail }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::CheckFailed(msg()))
    }
}

fn word_identities(_: &Tolerances) -> Result<String> {
    let knots = two_bridge_knots_up_to(15);
    for k in &knots {
        let e = k.epsilon();
        ensure(e.iter().eq(e.iter().rev()), || format!("{k}: epsilon not palindromic"))?;
        let w = k.relator_word();
        ensure(w.invert_generators() == w.star().inverse(), || format!("{k}: W(x^-1,y^-1) != W(y,x)^-1"))?;
        ensure(w.star().invert_generators() == w.inverse(), || format!("{k}: W*(x^-1,y^-1) != W^-1"))?;
    }
    Ok(format!("{} knots", knots.len()))
}

fn torus_arcs(_: &Tolerances) -> Result<String> {
    let mut total = 0;
    for k in crate::words::torus_knots_up_to(9) {
        let (p, q) = (k.p(), k.q());
        let arcs = enumerate_arcs(&k);
        ensure(arcs.len() as i64 == (p - 1) * (q - 1) / 2, || format!("{k}: arc count {}", arcs.len()))?;
        for a in &arcs {
            let brute: Vec<i64> = (1..p * q)
                .filter(|s| {
                    let (r1, r2) = (s.rem_euclid(2 * p), s.rem_euclid(2 * q));
                    (r1 == a.a || r1 == 2 * p - a.a) && (r2 == a.b || r2 == 2 * q - a.b)
                })
                .collect();
            ensure(brute == vec![a.c, a.d], || format!("{k} {a:?}: brute force {brute:?}"))?;
        }
        total += arcs.len();
    }
    Ok(format!("{total} arcs"))
}

fn zeta_winding(tol: &Tolerances) -> Result<String> {
    let mut n = 0;
    for (p, q) in [(2, 3), (2, 5), (3, 4), (3, 5)] {
        let k = TorusKnot::new(p, q)?;
        for arc in enumerate_arcs(&k) {
            let l = build_zeta_loop(&k, &arc, tol.samples)?;
            let z = nu_with(&l, &PeripheralElement::new(k.pq(), 1), &tol.winding())?.value;
            ensure(z == (arc.d - arc.c) / 2, || format!("{k} {arc:?}: nu(zeta) = {z}"))?;
            let m = nu_with(&l, &PeripheralElement::MERIDIAN, &tol.winding())?.value;
            ensure(m == 0, || format!("{k} {arc:?}: nu(mu) = {m}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} loops"))
}

fn surgery(_: &Tolerances) -> Result<String> {
    let mut n = 0;
    for (p, q) in [(2, 3), (2, 5), (3, 4), (3, 5)] {
        let k = TorusKnot::new(p, q)?;
        for den in 1..=5i64 {
            for m in -40..=40i64 {
                let Ok(slope) = TorusSlope::new(m, den) else { continue };
                let c = classify_surgery(&k, &slope)?;
                let g = m - k.pq() * den;
                let expected = match g.abs() {
                    0 if p > 2 => 1,
                    0 => 2,
                    1 => 3,
                    _ => 4,
                };
                ensure(c.case == Some(expected), || format!("{k} {slope}: case {:?}", c.case))?;
                let ok = match &c.verdict {
                    SurgeryVerdict::IrreducibleSu2 { witness } => {
                        witness.sign == 1 && witness.alpha_distance < 1e-9 && witness.commutator_distance > 0.1
                    }
                    SurgeryVerdict::NonabelianSo3Only { witness } => {
                        witness.sign == -1 && witness.alpha_distance < 1e-9 && witness.commutator_distance > 0.1
                    }
                    SurgeryVerdict::AllSo3Abelian => expected == 3,
                    SurgeryVerdict::MeridianExcluded => false,
                };
                ensure(ok, || format!("{k} {slope}: bad witness"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} slopes"))
}

fn dihedral_counts(_: &Tolerances) -> Result<String> {
    let mut counts = Vec::new();
    for ((n, k), expected) in [((1, 1), 1), ((2, 3), 2), ((3, 3), 3), ((3, 5), 3)] {
        let knot = TwoBridgeKnot::new(n, k)?;
        let g = TwoBridgeGroup::new(knot);
        let pts = find_dihedral(&knot)?;
        let fine = crate::two_bridge::find_dihedral_with(&g, 2 * crate::two_bridge::DEFAULT_SCAN_SAMPLES)?;
        ensure(pts.len() == expected && fine.len() == expected, || {
            format!("{knot}: {} points ({} at doubled resolution)", pts.len(), fine.len())
        })?;
        ensure(pts.iter().all(|p| g.residual(p).is_solution(1e-10)), || format!("{knot}: residual"))?;
        counts.push(pts.len().to_string());
    }
    Ok(format!("counts {}", counts.join(", ")))
}

const LOOP_KNOTS: [(u32, u32); 3] = [(2, 3), (3, 3), (3, 5)];

fn two_bridge_loops(tol: &Tolerances) -> Result<String> {
    let mut values = Vec::new();
    for (n, k) in LOOP_KNOTS {
        let g = TwoBridgeGroup::new(TwoBridgeKnot::new(n, k)?);
        let gamma = build_gamma(&g, &tol.tracker())?;
        let l = peripheral_restriction(&g, &gamma)?;
        // λ = β x^(−2e), so ν(β) = ν(λ) + 2e ν(μ)
        let nu_mu = nu_with(&l, &PeripheralElement::MERIDIAN, &tol.winding())?.value;
        let nu_lambda = nu_with(&l, &PeripheralElement::LONGITUDE, &tol.winding())?.value;
        let nu_beta = nu_lambda + 2 * g.exponent_sum() * nu_mu;
        ensure(nu_mu == 0, || format!("{}: nu(mu) = {nu_mu}", g.knot()))?;
        ensure(nu_beta != 0 && nu_beta % 2 == 0 && (nu_beta / 2) % 2 != 0, || {
            format!("{}: nu(beta) = {nu_beta}", g.knot())
        })?;
        let kc = kernel_classify_with(&l, &tol.winding())?;
        ensure(matches!(kc, KernelClass::MeridianOnly { .. }), || format!("{}: {kc:?}", g.knot()))?;
        values.push(format!("{} nu(beta)={nu_beta}", g.knot()));
    }
    Ok(values.join("; "))
}

fn rhombus_invariants(tol: &Tolerances) -> Result<String> {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (n, k) in LOOP_KNOTS {
        let g = TwoBridgeGroup::new(TwoBridgeKnot::new(n, k)?);
        let gamma = build_gamma(&g, &tol.tracker())?;
        let path = rhombus_path(&g, &gamma.arc.points)?;
        for (s, r) in gamma.arc.points.iter().zip(&path).step_by(16) {
            // rotation angle of ρ(β) is twice its quaternion circle angle
            let t = g.beta_angle(s)?;
            let angle_err = unwrap_near(0.0, 2.0 * t - 2.0 * r.theta).abs();
            let spread = r.side_spread();
            worst = worst.max(angle_err).max(spread);
            ensure(spread < 1e-6 && angle_err < 1e-6, || {
                format!("{}: spread {spread:.2e}, angle error {angle_err:.2e}", g.knot())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} samples, worst {worst:.1e}"))
}

fn dehn_filling(tol: &Tolerances) -> Result<String> {
    let g = TwoBridgeGroup::new(TwoBridgeKnot::new(2, 3)?);
    let l = peripheral_restriction(&g, &build_gamma(&g, &tol.tracker())?)?;
    let mut worst: f64 = 0.0;
    for (m, n) in [(1, 1), (-1, 1), (2, 1), (3, 1), (5, 2)] {
        let f = dehn_fill_solve_with(&l, &PeripheralElement::new(m, n), &tol.winding())?;
        let img = g.knot().slope_word(m, n).evaluate(&f.rho_x, &f.rho_y);
        let d = img.distance_to_identity();
        worst = worst.max(d);
        ensure(d < 1e-8 && f.commutator_distance > 1e-6, || {
            format!("b(5,3) {m}/{n}: |rho(alpha) - 1| = {d:.2e}, commutator {:.2e}", f.commutator_distance)
        })?;
    }
    let k = TorusKnot::new(2, 3)?;
    let zl = build_zeta_loop(&k, &enumerate_arcs(&k)[0], tol.samples)?;
    let f = dehn_fill_solve_with(&zl, &PeripheralElement::new(4, 1), &tol.winding())?;
    let w = construct_witness(&k, &TorusSlope::new(4, 1)?)?;
    let mu = k.meridian();
    let diffs = [
        (f.rho_x.trace() - w.rho_x.trace()).abs(),
        (f.rho_y.trace() - w.rho_y.trace()).abs(),
        (mu.evaluate(&f.rho_x, &f.rho_y).trace() - mu.evaluate(&w.rho_x, &w.rho_y).trace()).abs(),
    ];
    let dmax = diffs.iter().cloned().fold(0.0, f64::max);
    ensure(dmax < 1e-6, || format!("T(2,3) 4/1 traces differ by {dmax:.2e}"))?;
    Ok(format!("worst |rho(alpha) - 1| {worst:.1e}; torus trace gap {dmax:.1e}"))
}

/// Deterministic synthetic loops; `(a, b, c)` sets `ν(μ) = a`, `ν(λ) = b` plus
/// a wobble of frequency `c`.
fn synthetic(a: i64, b: i64, c: i64, n: usize) -> Result<RepLoop> {
    RepLoop::from_fn(Provenance::User { label: format!("synthetic {a} {b} {c}") }, n, |t| {
        (
            TAU * a as f64 * t + 0.3 * (TAU * c as f64 * t).sin(),
            TAU * b as f64 * t + 0.2 * (TAU * (c + 1) as f64 * t).cos(),
        )
    })
}

fn pairing_algebra(tol: &Tolerances) -> Result<String> {
    let w = tol.winding();
    let nu = |l: &RepLoop, e: &PeripheralElement| nu_with(l, e, &w).map(|c| c.value);
    for i in 0..100i64 {
        let (a, b, c) = (i % 5 - 2, (i / 5) % 5 - 2, i % 3);
        let (e1, e2) = (
            PeripheralElement::new(i % 7 - 3, (i / 7) % 5 - 2),
            PeripheralElement::new((i * 3) % 5 - 2, (i * 7) % 3 - 1),
        );
        let l1 = synthetic(a, b, c, 512)?;
        let l2 = synthetic(b, -a, c + 1, 384)?;
        ensure(nu(&l1, &e1.add(&e2))? == nu(&l1, &e1)? + nu(&l1, &e2)?, || format!("probe {i}: bilinearity"))?;
        ensure(nu(&l1.concat(&l2)?, &e1)? == nu(&l1, &e1)? + nu(&l2, &e1)?, || format!("probe {i}: additivity"))?;
        ensure(nu(&l1.reversed(), &e1)? == -nu(&l1, &e1)?, || format!("probe {i}: antisymmetry"))?;
        ensure(nu(&l1.refined(), &e1)? == nu(&l1, &e1)?, || format!("probe {i}: refinement"))?;
        ensure(nu(&l1, &e1)? == e1.m * a + e1.n * b, || format!("probe {i}: value"))?;
    }
    Ok("100 probes".to_string())
}
