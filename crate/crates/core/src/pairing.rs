//! The winding-number pairing between peripheral elements `mμ + nλ` and
//! closed loops of peripheral restrictions, valued in `π₁(S¹) = ℤ`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{commutator_distance, unwrap_near, UnitQuaternion};

/// Where a loop came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    TwoBridgeGamma { n: u32, k: u32 },
    TorusZeta { p: i64, q: i64, a: i64, b: i64 },
    User { label: String },
}

/// Back-reference from a loop sample to the representation that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSource {
    /// Two-bridge slice point.
    Slice { phi: f64, psi: f64 },
    /// Point of a torus-knot arc; `ψ ∈ {0, π}` are its reducible endpoints.
    TorusArc { psi: f64 },
    /// Abelian representation with meridian angle `s`.
    TorusReducible { s: f64 },
    None,
}

impl SampleSource {
    pub fn is_irreducible(&self) -> bool {
        match *self {
            SampleSource::Slice { .. } => true,
            SampleSource::TorusArc { psi } => psi > 0.0 && psi < PI,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub t: f64,
    pub theta_mu: f64,
    pub theta_lambda: f64,
    pub source: SampleSource,
}

/// A closed loop of peripheral restrictions, angles already unwrapped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepLoop {
    pub provenance: Provenance,
    samples: Vec<LoopSample>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingTolerance {
    /// Endpoints must agree mod 2π within this.
    pub closure: f64,
    /// Largest admissible step of a tracked angle between samples.
    pub max_step: f64,
    /// Largest admissible distance of `Δ/2π` from an integer.
    pub max_residue: f64,
}

impl Default for WindingTolerance {
    fn default() -> Self {
        Self { closure: 1e-6, max_step: PI / 2.0, max_residue: 0.01 }
    }
}

/// The element `mμ + nλ` of the peripheral subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeripheralElement {
    pub m: i64,
    pub n: i64,
}

impl PeripheralElement {
    pub const MERIDIAN: PeripheralElement = PeripheralElement { m: 1, n: 0 };
    pub const LONGITUDE: PeripheralElement = PeripheralElement { m: 0, n: 1 };

    pub fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }

    pub fn add(&self, other: &PeripheralElement) -> Self {
        Self { m: self.m + other.m, n: self.n + other.n }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingCertificate {
    pub provenance: Provenance,
    pub element: PeripheralElement,
    pub value: i64,
    pub max_step: f64,
    pub samples: usize,
    pub residue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelClass {
    FullKernel,
    MeridianOnly { c: i64 },
}

impl RepLoop {
    /// Checks closure of both angle sequences.
    pub fn new(provenance: Provenance, samples: Vec<LoopSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("a loop needs at least two samples".into()));
        }
        let tol = WindingTolerance::default();
        let (first, last) = (samples[0], samples[samples.len() - 1]);
        closure_gap(first.theta_mu, last.theta_mu, tol.closure)?;
        closure_gap(first.theta_lambda, last.theta_lambda, tol.closure)?;
        Ok(Self { provenance, samples })
    }

    /// Samples `f` at `t = i/n`, `i = 0..=n`, unwrapping each angle onto the
    /// branch nearest its predecessor.
    pub fn from_fn(
        provenance: Provenance,
        n: usize,
        f: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self> {
        let mut samples: Vec<LoopSample> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let (mu, la) = f(t);
            let (mu, la) = match samples.last() {
                Some(p) => (unwrap_near(p.theta_mu, mu), unwrap_near(p.theta_lambda, la)),
                None => (mu, la),
            };
            samples.push(LoopSample { t, theta_mu: mu, theta_lambda: la, source: SampleSource::None });
        }
        Self::new(provenance, samples)
    }

    pub fn samples(&self) -> &[LoopSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `m θ_μ + n θ_λ` per sample.
    pub fn combined_angles(&self, a: &PeripheralElement) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| a.m as f64 * s.theta_mu + a.n as f64 * s.theta_lambda)
            .collect()
    }

    /// Largest absolute step of either tracked angle.
    pub fn max_component_step(&self) -> (usize, f64) {
        self.samples
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let s = (w[1].theta_mu - w[0].theta_mu)
                    .abs()
                    .max((w[1].theta_lambda - w[0].theta_lambda).abs());
                (i, s)
            })
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    /// Traversal in the opposite direction.
    pub fn reversed(&self) -> RepLoop {
        let mut samples: Vec<LoopSample> = self.samples.iter().rev().copied().collect();
        for s in &mut samples {
            s.t = 1.0 - s.t;
        }
        RepLoop { provenance: self.provenance.clone(), samples }
    }

    /// Inserts the midpoint of every step; the angles are already unwrapped.
    /// Inserted samples carry no representation.
    pub fn refined(&self) -> RepLoop {
        let mut samples = Vec::with_capacity(2 * self.samples.len() - 1);
        for w in self.samples.windows(2) {
            samples.push(w[0]);
            samples.push(LoopSample {
                t: 0.5 * (w[0].t + w[1].t),
                theta_mu: 0.5 * (w[0].theta_mu + w[1].theta_mu),
                theta_lambda: 0.5 * (w[0].theta_lambda + w[1].theta_lambda),
                source: SampleSource::None,
            });
        }
        samples.push(self.samples[self.samples.len() - 1]);
        RepLoop { provenance: self.provenance.clone(), samples }
    }

    /// `self` followed by `other`, shifting `other` by multiples of 2π so the
    /// angles stay continuous.
    pub fn concat(&self, other: &RepLoop) -> Result<RepLoop> {
        let last = self.samples[self.samples.len() - 1];
        let first = other.samples[0];
        let tol = WindingTolerance::default();
        let shift_mu = unwrap_near(last.theta_mu, first.theta_mu) - first.theta_mu;
        let shift_la = unwrap_near(last.theta_lambda, first.theta_lambda) - first.theta_lambda;
        if (first.theta_mu + shift_mu - last.theta_mu).abs() > tol.closure
            || (first.theta_lambda + shift_la - last.theta_lambda).abs() > tol.closure
        {
            return Err(Error::NotClosed {
                gap: (first.theta_mu + shift_mu - last.theta_mu)
                    .abs()
                    .max((first.theta_lambda + shift_la - last.theta_lambda).abs()),
            });
        }
        let mut samples: Vec<LoopSample> =
            self.samples.iter().map(|s| LoopSample { t: 0.5 * s.t, ..*s }).collect();
        samples.extend(other.samples.iter().skip(1).map(|s| LoopSample {
            t: 0.5 + 0.5 * s.t,
            theta_mu: s.theta_mu + shift_mu,
            theta_lambda: s.theta_lambda + shift_la,
            source: s.source,
        }));
        let provenance = if self.provenance == other.provenance {
            self.provenance.clone()
        } else {
            Provenance::User { label: "concatenation".into() }
        };
        RepLoop::new(provenance, samples)
    }
}

fn closure_gap(first: f64, last: f64, tol: f64) -> Result<()> {
    let d = last - first;
    let gap = (d - TAU * (d / TAU).round()).abs();
    if gap > tol {
        return Err(Error::NotClosed { gap });
    }
    Ok(())
}

fn checked_winding(angles: &[f64], tol: &WindingTolerance, check_steps: bool) -> Result<(i64, f64, f64)> {
    if angles.len() < 2 {
        return Err(Error::InvalidInput("need at least two angles".into()));
    }
    let (first, last) = (angles[0], angles[angles.len() - 1]);
    closure_gap(first, last, tol.closure)?;
    let mut max_step: f64 = 0.0;
    for (i, w) in angles.windows(2).enumerate() {
        let step = (w[1] - w[0]).abs();
        if check_steps && step >= tol.max_step {
            return Err(Error::StepTooLarge { index: i, step, bound: tol.max_step });
        }
        max_step = max_step.max(step);
    }
    let turns = (last - first) / TAU;
    let value = turns.round();
    let residue = (turns - value).abs();
    if residue >= tol.max_residue {
        return Err(Error::ResidueTooLarge { residue });
    }
    Ok((value as i64, max_step, residue))
}

/// Winding number of an unwrapped closed angle sequence.
pub fn winding_number(angles: &[f64]) -> Result<i64> {
    winding_number_with(angles, &WindingTolerance::default())
}

pub fn winding_number_with(angles: &[f64], tol: &WindingTolerance) -> Result<i64> {
    checked_winding(angles, tol, true).map(|(v, _, _)| v)
}

/// `ν(a, [loop])`.
pub fn nu(rep_loop: &RepLoop, a: &PeripheralElement) -> Result<WindingCertificate> {
    nu_with(rep_loop, a, &WindingTolerance::default())
}

pub fn nu_with(
    rep_loop: &RepLoop,
    a: &PeripheralElement,
    tol: &WindingTolerance,
) -> Result<WindingCertificate> {
    // the step bound applies to the tracked angles; their integer combination
    // inherits a valid lift
    let (index, step) = rep_loop.max_component_step();
    if step >= tol.max_step {
        return Err(Error::StepTooLarge { index, step, bound: tol.max_step });
    }
    let (value, max_step, residue) =
        checked_winding(&rep_loop.combined_angles(a), tol, false)?;
    Ok(WindingCertificate {
        provenance: rep_loop.provenance.clone(),
        element: *a,
        value,
        max_step,
        samples: rep_loop.len(),
        residue,
    })
}

/// Kernel of `a ↦ ν(a, [loop])`: all of `A`, or `ℤμ` with `c = ν(λ)`.
pub fn kernel_classify(rep_loop: &RepLoop) -> Result<KernelClass> {
    kernel_classify_with(rep_loop, &WindingTolerance::default())
}

pub fn kernel_classify_with(rep_loop: &RepLoop, tol: &WindingTolerance) -> Result<KernelClass> {
    let c = nu_with(rep_loop, &PeripheralElement::LONGITUDE, tol)?.value;
    Ok(if c == 0 { KernelClass::FullKernel } else { KernelClass::MeridianOnly { c } })
}

/// A representation at an intermediate loop parameter.
#[derive(Clone, Copy, Debug)]
pub struct FamilyPoint {
    pub rho_x: UnitQuaternion,
    pub rho_y: UnitQuaternion,
    pub source: SampleSource,
    /// Principal values; the caller unwraps.
    pub theta_mu: f64,
    pub theta_lambda: f64,
}

/// Reconstructs representations between the samples of a loop.
pub trait RepresentationFamily {
    fn interpolate(&self, a: &SampleSource, b: &SampleSource, u: f64) -> Result<FamilyPoint>;

    /// `ρ(μ^m λ^n)` evaluated from generator images.
    fn peripheral_image(
        &self,
        rho_x: &UnitQuaternion,
        rho_y: &UnitQuaternion,
        a: &PeripheralElement,
    ) -> UnitQuaternion;
}

/// Family reconstructing the representations behind a loop's samples.
pub fn family_for(provenance: &Provenance) -> Result<Box<dyn RepresentationFamily>> {
    match *provenance {
        Provenance::TwoBridgeGamma { n, k } => {
            let knot = crate::words::TwoBridgeKnot::new(n, k)?;
            Ok(Box::new(crate::two_bridge::TwoBridgeGroup::new(knot)))
        }
        Provenance::TorusZeta { p, q, a, b } => {
            let knot = crate::words::TorusKnot::new(p, q)?;
            Ok(Box::new(crate::torus::TorusArcFamily::new(knot, a, b)?))
        }
        Provenance::User { .. } => Err(Error::NoUnderlyingRepresentation),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilledRepresentation {
    pub element: PeripheralElement,
    pub rho_x: UnitQuaternion,
    pub rho_y: UnitQuaternion,
    pub source: SampleSource,
    /// Loop parameter of the representation.
    pub t: f64,
    /// `|Θ − 2πj|` at the refined point.
    pub angle_error: f64,
    /// `‖ρ(α) − 1‖` recomputed from words.
    pub alpha_distance: f64,
    pub commutator_distance: f64,
    pub irreducible: bool,
    pub winding: i64,
}

const ALPHA_TOL: f64 = 1e-8;

/// Finds a representation on the loop killing `α`: a point where the lifted
/// angle `m θ_μ + n θ_λ` crosses a multiple of 2π, refined by bisection.
/// Crossings between irreducible samples are preferred.
pub fn dehn_fill_solve(rep_loop: &RepLoop, alpha: &PeripheralElement) -> Result<FilledRepresentation> {
    dehn_fill_solve_with(rep_loop, alpha, &WindingTolerance::default())
}

pub fn dehn_fill_solve_with(
    rep_loop: &RepLoop,
    alpha: &PeripheralElement,
    tol: &WindingTolerance,
) -> Result<FilledRepresentation> {
    let cert = nu_with(rep_loop, alpha, tol)?;
    if cert.value == 0 {
        return Err(Error::ZeroWinding);
    }
    let family = family_for(&rep_loop.provenance)?;
    let big_theta = rep_loop.combined_angles(alpha);
    let samples = rep_loop.samples();

    let crossing = |irreducible_only: bool| {
        (0..samples.len() - 1).find_map(|i| {
            let (s0, s1) = (&samples[i], &samples[i + 1]);
            if irreducible_only && !(s0.source.is_irreducible() && s1.source.is_irreducible()) {
                return None;
            }
            let (lo, hi) = (big_theta[i].min(big_theta[i + 1]), big_theta[i].max(big_theta[i + 1]));
            let j = (lo / TAU).ceil();
            (j * TAU <= hi).then_some((i, j * TAU))
        })
    };
    let (i, target) = crossing(true)
        .or_else(|| crossing(false))
        .ok_or(Error::RefinementStalled { error: f64::NAN })?;

    let (s0, s1) = (samples[i], samples[i + 1]);
    let lifted = |u: f64| -> Result<(f64, FamilyPoint)> {
        let pt = family.interpolate(&s0.source, &s1.source, u)?;
        let mu_ref = s0.theta_mu + u * (s1.theta_mu - s0.theta_mu);
        let la_ref = s0.theta_lambda + u * (s1.theta_lambda - s0.theta_lambda);
        let mu = unwrap_near(mu_ref, pt.theta_mu);
        let la = unwrap_near(la_ref, pt.theta_lambda);
        Ok((alpha.m as f64 * mu + alpha.n as f64 * la - target, pt))
    };

    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (mut f_lo, mut best) = lifted(lo)?;
    let mut best_err = f_lo.abs();
    for _ in 0..200 {
        if best_err < 1e-13 || hi - lo < 1e-16 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (fm, pt) = lifted(mid)?;
        if fm.abs() < best_err {
            best_err = fm.abs();
            best = pt;
        }
        if fm == 0.0 {
            break;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let (f_hi, pt_hi) = lifted(1.0)?;
    if f_hi.abs() < best_err {
        best_err = f_hi.abs();
        best = pt_hi;
    }

    let alpha_image = family.peripheral_image(&best.rho_x, &best.rho_y, alpha);
    let alpha_distance = alpha_image.distance_to_identity();
    if best_err >= 1e-9 || alpha_distance >= ALPHA_TOL {
        return Err(Error::RefinementStalled { error: best_err.max(alpha_distance) });
    }
    Ok(FilledRepresentation {
        element: *alpha,
        rho_x: best.rho_x,
        rho_y: best.rho_y,
        source: best.source,
        t: s0.t + 0.5 * (lo + hi) * (s1.t - s0.t),
        angle_error: best_err,
        alpha_distance,
        commutator_distance: commutator_distance(&best.rho_x, &best.rho_y),
        irreducible: best.source.is_irreducible(),
        winding: cert.value,
    })
}
