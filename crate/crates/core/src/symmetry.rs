//! Discrete symmetries of the exponential map: the reflections eps1, eps2,
//! eps3 (and the branch swap eps0), their action on initial covectors and on
//! endpoints, the commutation identity tying the two together, and the
//! closed characterizations of their fixed points.
//!
//! The curve-level definition is authoritative: a time-reversing reflection
//! acts on the covector through the endpoint of the vertical flow,
//! `eps^i(lambda, t) = eps^i(e^{t H_v} lambda)`, so that
//! `Exp(eps^i(lambda, t), t) = eps^i(Exp(lambda, t))` holds exactly.

use crate::elliptic::jacobi;
use crate::engel::GroupPoint;
use crate::expmap::exp;
use crate::vertical::{
    classify, rectify, vertical_flow, CausalFamily, Covector, Stratum,
};
use crate::Result;

/// The four involutive symmetries. `Eps0` swaps the two branches of the
/// Hamiltonian chart; `Eps1..Eps3` are the pendulum reflections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryAction {
    Eps0,
    Eps1,
    Eps2,
    Eps3,
}

impl SymmetryAction {
    pub const ALL: [SymmetryAction; 4] = [
        SymmetryAction::Eps0,
        SymmetryAction::Eps1,
        SymmetryAction::Eps2,
        SymmetryAction::Eps3,
    ];

    pub fn index(self) -> usize {
        match self {
            SymmetryAction::Eps0 => 0,
            SymmetryAction::Eps1 => 1,
            SymmetryAction::Eps2 => 2,
            SymmetryAction::Eps3 => 3,
        }
    }

    /// Whether the action reverses time on the given family, i.e. whether
    /// its preimage must be evaluated at the flowed covector.
    pub fn is_time_reversing(self, causal: CausalFamily) -> bool {
        match causal {
            CausalFamily::Timelike => matches!(self, SymmetryAction::Eps2 | SymmetryAction::Eps3),
            CausalFamily::Spacelike => matches!(self, SymmetryAction::Eps1 | SymmetryAction::Eps2),
        }
    }
}

/// Principal-branch reflection of chart data `(theta, c, alpha)`.
fn reflect_chart(
    action: SymmetryAction,
    causal: CausalFamily,
    theta: f64,
    c: f64,
    alpha: f64,
) -> (f64, f64, f64) {
    match causal {
        CausalFamily::Timelike => match action {
            SymmetryAction::Eps0 => unreachable!("eps0 handled separately"),
            SymmetryAction::Eps1 => (-theta, -c, -alpha),
            SymmetryAction::Eps2 => (theta, -c, alpha),
            SymmetryAction::Eps3 => (-theta, c, -alpha),
        },
        CausalFamily::Spacelike => match action {
            SymmetryAction::Eps0 => unreachable!("eps0 handled separately"),
            SymmetryAction::Eps1 => (theta, -c, alpha),
            SymmetryAction::Eps2 => (-theta, c, alpha),
            SymmetryAction::Eps3 => (-theta, -c, alpha),
        },
    }
}

/// Rebuild a covector on the requested branch from principal-branch chart
/// data (inverse of [`Covector::normal_form`], allowing a changed alpha).
fn denormalize(
    causal: CausalFamily,
    branch_sign: f64,
    theta: f64,
    c: f64,
    alpha: f64,
) -> Covector {
    if branch_sign > 0.0 {
        return Covector {
            causal,
            theta,
            c,
            alpha,
            branch_sign: 1.0,
        };
    }
    match causal {
        CausalFamily::Timelike => Covector {
            causal,
            theta,
            c: -c,
            alpha,
            branch_sign: -1.0,
        },
        CausalFamily::Spacelike => Covector {
            causal,
            theta,
            c: -c,
            alpha: -alpha,
            branch_sign: -1.0,
        },
    }
}

/// Action of the symmetry on the initial covector of an arc of duration `t`.
/// Time-preserving actions transform `lambda` directly; time-reversing ones
/// transform the endpoint of the vertical flow.
pub fn apply_preimage(action: SymmetryAction, lambda: &Covector, t: f64) -> Result<Covector> {
    if action == SymmetryAction::Eps0 {
        // branch swap: c -> -c (and alpha -> -alpha on the spacelike side),
        // with the branch sign flipped; this is time-preserving
        let mut out = *lambda;
        out.c = -lambda.c;
        out.branch_sign = -lambda.branch_sign;
        if lambda.causal == CausalFamily::Spacelike {
            out.alpha = -lambda.alpha;
        }
        return Ok(out);
    }
    let base = if action.is_time_reversing(lambda.causal) {
        vertical_flow(lambda, t)?
    } else {
        *lambda
    };
    let nf = base.normal_form();
    let (th, c, al) = reflect_chart(action, nf.causal, nf.theta, nf.c, nf.alpha);
    Ok(denormalize(lambda.causal, lambda.branch_sign, th, c, al))
}

/// Action of the symmetry on endpoints.
pub fn apply_image(action: SymmetryAction, causal: CausalFamily, q: GroupPoint) -> GroupPoint {
    let GroupPoint { x1, x2, y, z } = q;
    match causal {
        CausalFamily::Timelike => match action {
            SymmetryAction::Eps0 => GroupPoint::new(-x1, x2, -y, z),
            SymmetryAction::Eps1 => GroupPoint::new(x1, -x2, -y, -z),
            SymmetryAction::Eps2 => GroupPoint::new(x1, x2, -y, z - x1 * y),
            SymmetryAction::Eps3 => GroupPoint::new(x1, -x2, y, x1 * y - z),
        },
        CausalFamily::Spacelike => match action {
            SymmetryAction::Eps0 => GroupPoint::new(x1, -x2, -y, -z),
            SymmetryAction::Eps1 => GroupPoint::new(x1, x2, -y, z - x1 * y),
            SymmetryAction::Eps2 => GroupPoint::new(-x1, x2, y, z - x1 * y),
            SymmetryAction::Eps3 => GroupPoint::new(-x1, x2, -y, z),
        },
    }
}

/// Residual of the commutation identity
/// `Exp(eps^i(lambda, t), t) = eps^i(Exp(lambda, t))` in the sup norm.
pub fn check_commutation(action: SymmetryAction, lambda: &Covector, t: f64) -> Result<f64> {
    let qt = exp(lambda, t)?;
    let lam1 = apply_preimage(action, lambda, t)?;
    let q1 = exp(&lam1, t)?;
    Ok(q1.dist_inf(apply_image(action, lambda.causal, qt)))
}

/// Whether `q` is a fixed point of the image action, by the closed
/// characterization (each coordinate condition checked against `band`):
///
/// timelike: eps1 iff `x2 = y = z = 0`; eps2 iff `y = 0`; eps3 iff `x2 = 0`
/// and `z = x1 y / 2`; spacelike: eps1 iff `y = 0`; eps2 iff `x1 = 0`;
/// eps3 iff `x1 = y = 0`.
pub fn fixed_image(action: SymmetryAction, causal: CausalFamily, q: GroupPoint, band: f64) -> bool {
    let GroupPoint { x1, x2, y, z } = q;
    match causal {
        CausalFamily::Timelike => match action {
            SymmetryAction::Eps0 => x1.abs() <= band && y.abs() <= band,
            SymmetryAction::Eps1 => x2.abs() <= band && y.abs() <= band && z.abs() <= band,
            SymmetryAction::Eps2 => y.abs() <= band,
            SymmetryAction::Eps3 => x2.abs() <= band && (z - x1 * y / 2.0).abs() <= band,
        },
        CausalFamily::Spacelike => match action {
            SymmetryAction::Eps0 => x2.abs() <= band && y.abs() <= band && z.abs() <= band,
            SymmetryAction::Eps1 => y.abs() <= band,
            SymmetryAction::Eps2 => x1.abs() <= band,
            SymmetryAction::Eps3 => x1.abs() <= band && y.abs() <= band,
        },
    }
}

/// Whether `lambda` is a fixed point of the preimage action on arcs of
/// duration `t`, by the per-stratum closed characterization. The midpoint
/// argument `tau = psi0 + ae t / 2` is computed in rectified coordinates,
/// never by root finding.
///
/// Characterizations (principal-branch normal form): timelike eps1 iff
/// `C00` with `theta = 0`; eps2 iff `C00`, or `C+-` with `tau = 0`;
/// eps3 iff `alpha = 0` with midpoint angle zero (`theta0 = c t / 2`).
/// Spacelike: eps1 iff `sn tau = 0` on C1, C2, always on C5 and C7, never
/// elsewhere; eps2 iff `cn tau = 0` on C1, `sn tau = 0` on C3, midpoint
/// angle zero on C6, `theta0 = 0` on C7, always on C5, never on C2, C4;
/// eps3 iff `theta = c = 0` (C5 and C7 only). Eps0 flips the branch sign,
/// so it has no fixed covectors.
pub fn fixed_preimage(
    action: SymmetryAction,
    lambda: &Covector,
    t: f64,
    band: f64,
) -> Result<bool> {
    if action == SymmetryAction::Eps0 {
        return Ok(false);
    }
    let nf = lambda.normal_form();
    let stratum = classify(lambda)?;
    let tau_sn_cn = |lambda: &Covector| -> Result<(f64, f64)> {
        let rc = rectify(lambda)?;
        let tau = rc.psi0 + rc.ae * t / 2.0;
        let b = jacobi(tau, rc.k2)?;
        Ok((b.sn, b.cn))
    };
    let midpoint_zero = (nf.theta - nf.c * t / 2.0).abs() <= band * nf.theta.abs().max(1.0);
    Ok(match (nf.causal, action) {
        (CausalFamily::Timelike, SymmetryAction::Eps1) => {
            stratum == Stratum::TlC00 && nf.theta.abs() <= band
        }
        (CausalFamily::Timelike, SymmetryAction::Eps2) => match stratum {
            Stratum::TlC00 => true,
            Stratum::TlCplus | Stratum::TlCminus => {
                let rc = rectify(lambda)?;
                (rc.psi0 + rc.ae * t / 2.0).abs() <= band
            }
            _ => false,
        },
        (CausalFamily::Timelike, SymmetryAction::Eps3) => {
            matches!(stratum, Stratum::TlC0 | Stratum::TlC00) && midpoint_zero
        }
        (CausalFamily::Spacelike, SymmetryAction::Eps1) => match stratum {
            Stratum::SlC1 | Stratum::SlC2 => tau_sn_cn(lambda)?.0.abs() <= band,
            Stratum::SlC5 | Stratum::SlC7 => true,
            _ => false,
        },
        (CausalFamily::Spacelike, SymmetryAction::Eps2) => match stratum {
            Stratum::SlC1 => tau_sn_cn(lambda)?.1.abs() <= band,
            Stratum::SlC3 => tau_sn_cn(lambda)?.0.abs() <= band,
            Stratum::SlC5 => true,
            Stratum::SlC6 => midpoint_zero,
            Stratum::SlC7 => nf.theta.abs() <= band,
            _ => false,
        },
        (CausalFamily::Spacelike, SymmetryAction::Eps3) => {
            matches!(stratum, Stratum::SlC5 | Stratum::SlC7) && nf.theta.abs() <= band
        }
        (_, SymmetryAction::Eps0) => unreachable!(),
    })
}
