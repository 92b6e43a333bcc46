use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Summary of one dihedral-to-somewhere arc, reported when no pole switch is found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcReport {
    pub start_psi: f64,
    pub direction: i8,
    pub end: String,
    pub end_phi: f64,
    pub end_psi: f64,
    pub pole_switch: bool,
}

impl std::fmt::Display for ArcReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "start psi={:.6} dir={:+} -> {} at (phi={:.6}, psi={:.6}) pole switch: {}",
            self.start_psi,
            self.direction,
            self.end,
            self.end_phi,
            self.end_psi,
            self.pole_switch
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("element is central (+1 or -1), no rotation axis")]
    CentralElement,

    #[error("quaternion is off the circle subgroup (deviation {deviation:.3e})")]
    OffCircle { deviation: f64 },

    #[error("dihedral scan too coarse: two sign changes in cell [{lo:.6}, {hi:.6}]")]
    ScanTooCoarse { lo: f64, hi: f64 },

    #[error("corrector diverged after {iterations} iterations; last good point (phi={phi:.9}, psi={psi:.9})")]
    CorrectorDiverged { iterations: usize, phi: f64, psi: f64 },

    #[error("no pole-switching dihedral arc found; explored {} arcs:\n{}", arcs.len(), format_arcs(arcs))]
    NoPoleSwitchFound { arcs: Vec<ArcReport> },

    #[error("degenerate rhombus: {0}")]
    DegenerateRhombus(&'static str),

    #[error("loop junction mismatch {gap:.3e} exceeds tolerance")]
    JunctionMismatch { gap: f64 },

    #[error("angle sequence not closed: endpoints differ by {gap:.3e} mod 2pi")]
    NotClosed { gap: f64 },

    #[error("angle step {step:.3e} at sample {index} exceeds bound {bound:.3e}; refine the loop")]
    StepTooLarge { index: usize, step: f64, bound: f64 },

    #[error("winding residue {residue:.3e} exceeds 0.01")]
    ResidueTooLarge { residue: f64 },

    #[error("element has zero winding on this loop")]
    ZeroWinding,

    #[error("crossing refinement stalled (|angle error| = {error:.3e})")]
    RefinementStalled { error: f64 },

    #[error("no admissible multiple of pi/{g} inside any arc interval")]
    NoParityMultiple { g: i64 },

    #[error("loop has no underlying representation family")]
    NoUnderlyingRepresentation,

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_arcs(arcs: &[ArcReport]) -> String {
    arcs.iter()
        .map(|a| format!("  {a}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
