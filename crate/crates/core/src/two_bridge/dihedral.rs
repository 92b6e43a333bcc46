use std::f64::consts::PI;

use super::{SlicePoint, TwoBridgeGroup};
use crate::error::{Error, Result};
use crate::words::TwoBridgeKnot;

pub const DEFAULT_SCAN_SAMPLES: usize = 4096;
const BISECTION_TOL: f64 = 1e-12;

/// At `φ = π/2` both generator images are pure imaginary in the `i, j` plane,
/// so `ρ(W)` lies in `span{1, k}` and so does the relator test quaternion.
/// Its `k` component is `±sin` of the angular defect; its real part picks
/// the branch.
fn k_component(group: &TwoBridgeGroup, psi: f64) -> (f64, f64) {
    let r = group.residual(&SlicePoint::dihedral(psi));
    (r.imag[2], r.real)
}

/// Binary dihedral representations in the slice, sorted by `ψ`.
pub fn find_dihedral(knot: &TwoBridgeKnot) -> Result<Vec<SlicePoint>> {
    find_dihedral_with(&TwoBridgeGroup::new(*knot), DEFAULT_SCAN_SAMPLES)
}

pub fn find_dihedral_with(group: &TwoBridgeGroup, samples: usize) -> Result<Vec<SlicePoint>> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least 2 scan samples".into()));
    }
    let grid: Vec<f64> = (1..samples).map(|i| PI * i as f64 / samples as f64).collect();
    let values: Vec<(f64, f64)> = grid.iter().map(|&p| k_component(group, p)).collect();

    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        let (lo, hi) = (grid[i], grid[i + 1]);
        let ((f_lo, re_lo), (f_hi, re_hi)) = (values[i], values[i + 1]);
        let (f_mid, _) = k_component(group, 0.5 * (lo + hi));
        let crosses = f_lo.signum() != f_hi.signum() || f_lo == 0.0;
        if !crosses {
            if f_mid.signum() != f_lo.signum() && f_mid != 0.0 {
                return Err(Error::ScanTooCoarse { lo, hi });
            }
            continue;
        }
        // both ends on the +1 branch; −1 branch zeros sit where the real part is negative
        if re_lo <= 0.0 || re_hi <= 0.0 {
            continue;
        }
        let psi = bisect(|p| k_component(group, p).0, lo, hi, f_lo);
        if group.residual(&SlicePoint::dihedral(psi)).is_solution(1e-10) {
            out.push(SlicePoint::dihedral(psi));
        }
    }
    Ok(out)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    if f_lo == 0.0 {
        return lo;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
