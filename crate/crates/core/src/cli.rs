//! Command-line front end. Every command yields a [`Certificate`] plus a
//! human-readable rendering; `main` chooses which one to print.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::certificate::{input_hash, Certificate, Tolerances};
use crate::error::{Error, Result};
use crate::pairing::{dehn_fill_solve_with, kernel_classify_with, nu_with, PeripheralElement};
use crate::reproduce;
use crate::torus::{
    arc_descriptor, build_zeta_loop, classify_surgery, construct_witness, enumerate_arcs,
    zeta_angles, SurgeryVerdict, TorusSlope,
};
use crate::two_bridge::{build_gamma, find_dihedral, peripheral_restriction, trace_csv, TwoBridgeGroup};
use crate::words::{TorusKnot, TwoBridgeKnot};

pub const EXIT_CODES: &str = "\
Exit codes:
  0   success
  1   internal error (broken numeric invariant, I/O)
  2   usage error or invalid input
  3   no pole-switching dihedral arc found
  4   winding step exceeds the step bound
  5   reproduce: at least one check failed
  6   predictor-corrector diverged
  7   dihedral scan too coarse
  8   loop not closed or junction mismatch
  9   winding residue too large
  10  element has zero winding on the loop
  11  crossing refinement stalled
  12  no admissible witness angle
  13  degenerate rhombus";

#[derive(Debug, Parser)]
#[command(
    name = "knot-su2",
    version,
    about = "SU(2) representations of two-bridge and torus knot groups, winding numbers, and Dehn fillings",
    after_help = EXIT_CODES
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Print the JSON certificate instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Residual norm every tracked sample must satisfy.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_residual: f64,
    /// Samples per segment of torus-knot loops.
    #[arg(long, global = true, default_value_t = 1024)]
    pub samples: usize,
    /// Step limit of the arc tracker.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_steps: usize,
    /// Largest admissible angle step between loop samples.
    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub step_bound: f64,
    /// Record wall-clock time in the certificate (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Directory for CSV traces.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

impl GlobalArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            residual: self.tol_residual,
            samples: self.samples,
            max_steps: self.max_steps,
            winding_step_bound: self.step_bound,
            ..Tolerances::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-bridge knot b(2n+1, k).
    Twobridge {
        n: u32,
        k: u32,
        #[command(subcommand)]
        action: TwoBridgeAction,
    },
    /// Torus knot T(p, q).
    Torus {
        p: i64,
        q: i64,
        #[command(subcommand)]
        action: TorusAction,
    },
    /// Run every desk-scale check and print a pass/fail table.
    Reproduce,
}

#[derive(Debug, Subcommand)]
pub enum TwoBridgeAction {
    /// Relator word W and its symmetry identities.
    Word,
    /// Binary dihedral representations in the slice.
    Dihedral,
    /// Build the closed curve γ and write its CSV trace.
    Loop,
    /// Winding numbers of μ, λ and β on γ.
    Pair,
    /// Representation of the filled group along slope m/n.
    Fill { slope: String },
}

#[derive(Debug, Subcommand)]
pub enum TorusAction {
    /// Arcs of irreducible characters with endpoint residues.
    Arcs,
    /// ζ-loop through arc A_(a,b); writes its CSV trace.
    Loop { a: i64, b: i64 },
    /// Classify the filling along slope m/n.
    Classify { slope: String },
    /// Explicit representation killing slope m/n (|g| ≥ 2).
    Witness { slope: String },
}

/// Result of one command.
pub struct Outcome {
    pub certificate: Certificate,
    pub human: String,
    /// Nonzero for commands that completed but report failure.
    pub exit_code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::NoPoleSwitchFound { .. } => 3,
        Error::StepTooLarge { .. } => 4,
        Error::CheckFailed(_) => 5,
        Error::CorrectorDiverged { .. } => 6,
        Error::ScanTooCoarse { .. } => 7,
        Error::NotClosed { .. } | Error::JunctionMismatch { .. } => 8,
        Error::ResidueTooLarge { .. } => 9,
        Error::ZeroWinding => 10,
        Error::RefinementStalled { .. } => 11,
        Error::NoParityMultiple { .. } => 12,
        Error::DegenerateRhombus(_) => 13,
        Error::CentralElement
        | Error::OffCircle { .. }
        | Error::NoUnderlyingRepresentation
        | Error::Io(_) => 1,
    }
}

fn parse_slope(s: &str) -> Result<TorusSlope> {
    s.parse()
}

pub fn run(cli: &Cli, argv: Vec<String>) -> Result<Outcome> {
    let tol = cli.global.tolerances();
    let (inputs, outputs, human, exit_code) = match &cli.command {
        Command::Twobridge { n, k, action } => {
            let knot = TwoBridgeKnot::new(*n, *k)?;
            let (o, h) = run_two_bridge(&knot, action, &cli.global, &tol)?;
            (json!({"knot": knot.to_string(), "n": n, "k": k}), o, h, 0)
        }
        Command::Torus { p, q, action } => {
            let knot = TorusKnot::new(*p, *q)?;
            let (o, h) = run_torus(&knot, action, &cli.global, &tol)?;
            (json!({"knot": knot.to_string(), "p": p, "q": q}), o, h, 0)
        }
        Command::Reproduce => {
            let results = reproduce::run_all(&tol);
            let mut h = String::new();
            for r in &results {
                let _ = writeln!(
                    h,
                    "[{}] {} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.detail
                );
            }
            let all = results.iter().all(|r| r.passed);
            (json!({}), json!({"all_passed": all, "checks": results}), h, if all { 0 } else { 5 })
        }
    };
    let certificate = Certificate::new(argv, inputs, outputs, tol);
    Ok(Outcome { certificate, human, exit_code })
}

fn write_csv(global: &GlobalArgs, prefix: &str, key: &[&str], body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&global.out_dir)?;
    let path = global.out_dir.join(format!("{prefix}-{}.csv", input_hash(key)));
    std::fs::write(&path, body)?;
    Ok(path)
}

fn run_two_bridge(
    knot: &TwoBridgeKnot,
    action: &TwoBridgeAction,
    global: &GlobalArgs,
    tol: &Tolerances,
) -> Result<(serde_json::Value, String)> {
    let group = TwoBridgeGroup::new(*knot);
    Ok(match action {
        TwoBridgeAction::Word => {
            let w = group.w();
            let sym = w.invert_generators() == w.star().inverse();
            let sym_star = w.star().invert_generators() == w.inverse();
            let eps = knot.epsilon();
            let pal = eps.iter().eq(eps.iter().rev());
            let h = format!(
                "{knot}\n  W       = {w}\n  W*      = {}\n  beta    = {}\n  lambda  = {}\n  e       = {}\n  \
                 epsilon palindromic: {pal}\n  W(x^-1,y^-1) = W(y,x)^-1: {sym}\n  W*(x^-1,y^-1) = W^-1: {sym_star}\n",
                group.w_star(),
                group.beta(),
                knot.longitude(),
                group.exponent_sum()
            );
            let o = json!({
                "w": w.to_string(), "w_star": group.w_star().to_string(), "beta": group.beta().to_string(),
                "longitude": knot.longitude().to_string(), "exponent_sum": group.exponent_sum(),
                "epsilon": eps, "identities": {"epsilon_palindromic": pal, "inverted_generators": sym, "inverted_generators_star": sym_star}
            });
            (o, h)
        }
        TwoBridgeAction::Dihedral => {
            let pts = find_dihedral(knot)?;
            let mut h = format!("{knot}: {} dihedral points\n", pts.len());
            let rows: Vec<_> = pts
                .iter()
                .map(|p| {
                    let r = group.residual(p).norm();
                    let _ = writeln!(h, "  psi = {:.12}  residual {r:.1e}", p.psi);
                    json!({"phi": p.phi, "psi": p.psi, "residual": r})
                })
                .collect();
            (json!({"points": rows}), h)
        }
        TwoBridgeAction::Loop => {
            let gamma = build_gamma(&group, &tol.tracker())?;
            let csv = trace_csv(&group, &gamma)?;
            let key = ["twobridge", &knot.n().to_string(), &knot.k().to_string(), "loop"];
            let path = write_csv(global, "gamma", &key, &csv)?;
            let gap = gamma.points[0].distance(&gamma.points[gamma.points.len() - 1]);
            let max_res = gamma.points.iter().map(|p| group.residual(p).norm()).fold(0.0, f64::max);
            let h = format!(
                "{knot}: gamma with {} samples, junction at {}, closure gap {gap:.1e}, max residual {max_res:.1e}\n  trace: {}\n",
                gamma.points.len(),
                gamma.junction,
                path.display()
            );
            let o = json!({
                "samples": gamma.points.len(), "junction": gamma.junction, "closure_gap": gap,
                "max_residual": max_res, "trace": path.file_name().map(|f| f.to_string_lossy().into_owned())
            });
            (o, h)
        }
        TwoBridgeAction::Pair => {
            let gamma = build_gamma(&group, &tol.tracker())?;
            let l = peripheral_restriction(&group, &gamma)?;
            let w = tol.winding();
            let mu = nu_with(&l, &PeripheralElement::MERIDIAN, &w)?;
            let lambda = nu_with(&l, &PeripheralElement::LONGITUDE, &w)?;
            let beta = lambda.value + 2 * group.exponent_sum() * mu.value;
            let kernel = kernel_classify_with(&l, &w)?;
            let h = format!(
                "{knot} on gamma:\n  nu(mu)     = {}\n  nu(lambda) = {}\n  nu(beta)   = {beta}\n  kernel     = {kernel:?}\n",
                mu.value, lambda.value
            );
            (json!({"nu_mu": mu, "nu_lambda": lambda, "nu_beta": beta, "kernel": kernel}), h)
        }
        TwoBridgeAction::Fill { slope } => {
            let s = parse_slope(slope)?;
            let gamma = build_gamma(&group, &tol.tracker())?;
            let l = peripheral_restriction(&group, &gamma)?;
            let f = dehn_fill_solve_with(&l, &PeripheralElement::new(s.m, s.n), &tol.winding())?;
            let h = format!(
                "{knot} filled along {s}:\n  rho(x) = {}\n  rho(y) = {}\n  |rho(alpha) - 1| = {:.2e}\n  commutator distance = {:.4}\n  winding = {}\n",
                f.rho_x, f.rho_y, f.alpha_distance, f.commutator_distance, f.winding
            );
            (json!({"slope": s, "representation": f}), h)
        }
    })
}

fn run_torus(
    knot: &TorusKnot,
    action: &TorusAction,
    global: &GlobalArgs,
    tol: &Tolerances,
) -> Result<(serde_json::Value, String)> {
    Ok(match action {
        TorusAction::Arcs => {
            let arcs = enumerate_arcs(knot);
            let mut h = format!("{knot}: {} arcs\n     a    b    c    d\n", arcs.len());
            for a in &arcs {
                let _ = writeln!(h, "  {:>4} {:>4} {:>4} {:>4}", a.a, a.b, a.c, a.d);
            }
            (json!({"arcs": arcs}), h)
        }
        TorusAction::Loop { a, b } => {
            let arc = arc_descriptor(knot, *a, *b)?;
            let l = build_zeta_loop(knot, &arc, tol.samples)?;
            let w = tol.winding();
            let zeta = nu_with(&l, &PeripheralElement::new(knot.pq(), 1), &w)?;
            let mu = nu_with(&l, &PeripheralElement::MERIDIAN, &w)?;
            let kernel = kernel_classify_with(&l, &w)?;
            let mut csv = String::from("index,t,theta_mu,theta_lambda,theta_zeta\n");
            for (i, (s, z)) in l.samples().iter().zip(zeta_angles(knot, &l)).enumerate() {
                let _ = writeln!(csv, "{i},{:.12},{:.15},{:.15},{:.15}", s.t, s.theta_mu, s.theta_lambda, z);
            }
            let key = ["torus", &knot.p().to_string(), &knot.q().to_string(), "loop", &a.to_string(), &b.to_string(), &tol.samples.to_string()];
            let path = write_csv(global, "zeta", &key, &csv)?;
            let h = format!(
                "{knot} arc ({a},{b}) with (c,d) = ({},{}):\n  nu(zeta) = {}  ((d-c)/2 = {})\n  nu(mu)   = {}\n  kernel   = {kernel:?}\n  trace: {}\n",
                arc.c,
                arc.d,
                zeta.value,
                (arc.d - arc.c) / 2,
                mu.value,
                path.display()
            );
            let o = json!({
                "arc": arc, "nu_zeta": zeta, "nu_mu": mu, "kernel": kernel,
                "trace": path.file_name().map(|f| f.to_string_lossy().into_owned())
            });
            (o, h)
        }
        TorusAction::Classify { slope } => {
            let s = parse_slope(slope)?;
            let c = classify_surgery(knot, &s)?;
            let verdict = match &c.verdict {
                SurgeryVerdict::IrreducibleSu2 { .. } => "irreducible SU(2) representation",
                SurgeryVerdict::NonabelianSo3Only { .. } => "nonabelian SO(3) only",
                SurgeryVerdict::AllSo3Abelian => "all SO(3) representations abelian",
                SurgeryVerdict::MeridianExcluded => "meridian slope excluded",
            };
            let mut h = format!("{knot} slope {s}: (g, h) = ({}, {})\n", c.g, c.h);
            match c.case {
                Some(n) => {
                    let _ = writeln!(h, "  case {n}: {verdict}");
                }
                None => {
                    let _ = writeln!(h, "  {verdict}");
                }
            }
            if let SurgeryVerdict::IrreducibleSu2 { witness } | SurgeryVerdict::NonabelianSo3Only { witness } = &c.verdict {
                let _ = writeln!(
                    h,
                    "  witness on arc ({},{}) at psi = {:.12}: |rho(alpha) - ({:+})| = {:.1e}",
                    witness.arc.a, witness.arc.b, witness.psi, witness.sign, witness.alpha_distance
                );
            }
            (json!({"classification": c}), h)
        }
        TorusAction::Witness { slope } => {
            let s = parse_slope(slope)?;
            let w = construct_witness(knot, &s)?;
            let (g, hh) = s.gh(knot);
            let h = format!(
                "{knot} slope {s} (g = {g}, h = {hh}):\n  arc ({},{}) with (c,d) = ({},{}), k = {}, target {:.12}\n  psi* = {:.15}\n  rho(x) = {}\n  rho(y) = {}\n  |rho(alpha) - 1| = {:.2e}, commutator distance {:.4}\n",
                w.arc.a,
                w.arc.b,
                w.arc.c,
                w.arc.d,
                w.k.unwrap_or_default(),
                w.theta_target.unwrap_or_default(),
                w.psi,
                w.rho_x,
                w.rho_y,
                w.alpha_distance,
                w.commutator_distance
            );
            (json!({"slope": s, "g": g, "h": hh, "witness": w}), h)
        }
    })
}
