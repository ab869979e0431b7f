//! Closed-form parametrization of the extremal trajectories: one explicit
//! formula per stratum, in elementary or Jacobi elliptic functions, together
//! with the explosion time and a validator that cross-checks every formula
//! against the RK4 oracle.
//!
//! All formulas are stated for the principal branch; the other branch is
//! reached through an exact conjugation (see [`crate::vertical`]) followed by
//! the point map `(x1,x2,y,z) -> (-x1,x2,-y,z)` (timelike) or
//! `(x1,x2,y,z) -> (x1,-x2,-y,-z)` (spacelike).

use crate::elliptic::{complete_k, jacobi};
use crate::engel::GroupPoint;
use crate::rk4;
use crate::util::sinh_minus_x;
use crate::vertical::{classify, full_rhs, rectify, CausalFamily, Covector, Stratum};
use crate::{Error, Result};
use serde::Serialize;

/// A sampled extremal trajectory produced by the RK4 oracle.
#[derive(Clone, Debug)]
pub struct ExtremalArc {
    pub lambda: Covector,
    pub stratum: Stratum,
    /// Strictly increasing sample times in `(0, t_supr)`.
    pub times: Vec<f64>,
    pub points: Vec<GroupPoint>,
    /// Pendulum angle along the arc, one entry per sample time.
    pub theta: Vec<f64>,
    /// Costate component h3 along the arc.
    pub c: Vec<f64>,
    /// Max drift of the Hamiltonian H, measured on the raw costate system.
    pub h_drift: f64,
    /// Max drift of the vertical energy E, measured on the chart system.
    pub e_drift: f64,
    pub t_supr: f64,
}

/// Supremum of times for which the closed forms (and the trajectory itself)
/// stay finite. Infinite except where the chart argument can reach the pole
/// of `sn/cn`: timelike C+/C-, spacelike C2 and C3 reach it at
/// `(K - psi0)/ae`; C4 explodes at `(-ln(alpha)/2 - psi0)/ae` when
/// `w0 = alpha e^{2 psi0} < 1` and never when `w0 > 1`.
pub fn t_supr(lambda: &Covector) -> Result<f64> {
    let stratum = classify(lambda)?;
    match stratum {
        Stratum::TlCplus | Stratum::TlCminus | Stratum::SlC2 | Stratum::SlC3 => {
            let rc = rectify(lambda)?;
            let kk = complete_k(rc.k2)?;
            Ok((kk - rc.psi0) / rc.ae)
        }
        Stratum::SlC4 => {
            let rc = rectify(lambda)?;
            let w0 = rc.alpha * (2.0 * rc.psi0).exp();
            if w0 < 1.0 {
                Ok((-rc.alpha.ln() / 2.0 - rc.psi0) / rc.ae)
            } else {
                Ok(f64::INFINITY)
            }
        }
        _ => Ok(f64::INFINITY),
    }
}

/// Which reading of the trajectory formulas to evaluate. Besides the
/// corrected forms the validator can exercise two defective variants kept
/// for auditability; both are expected to fail validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaVariant {
    /// The cross-checked formulas.
    Corrected,
    /// C4 with the x2 bracket evaluated at equal arguments (so x2 = t).
    PrintedC4X2,
    /// C7 with z linear in t instead of cubic.
    PrintedC7Z,
}

/// The exponential map: endpoint at time `t` of the extremal trajectory with
/// initial covector `lambda`. Domain errors for `t < 0` and for `t` at or
/// beyond the explosion time (with a refusal margin of `1e-6/ae` just below
/// it, where the formulas lose all accuracy).
pub fn exp(lambda: &Covector, t: f64) -> Result<GroupPoint> {
    Ok(exp_arc(lambda, &[t])?[0])
}

/// Batch exponential map: the covector is classified and rectified once,
/// then every time in `times` is evaluated.
pub fn exp_arc(lambda: &Covector, times: &[f64]) -> Result<Vec<GroupPoint>> {
    exp_arc_variant(lambda, times, FormulaVariant::Corrected)
}

/// [`exp_arc`] with an explicit formula variant (validator hook).
pub fn exp_arc_variant(
    lambda: &Covector,
    times: &[f64],
    variant: FormulaVariant,
) -> Result<Vec<GroupPoint>> {
    let stratum = classify(lambda)?;
    let nf = lambda.normal_form();
    let ts = t_supr(lambda)?;
    let rc = if stratum.is_elliptic() {
        Some(rectify(lambda)?)
    } else {
        None
    };
    let margin = rc
        .as_ref()
        .filter(|_| ts.is_finite())
        .map_or(0.0, |r| 1e-6 / r.ae);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("exp: need t >= 0, got {t}")));
        }
        if t >= ts - margin {
            return Err(Error::Domain(format!(
                "exp: t = {t} at or beyond the explosion time {ts} (margin {margin:.3e})"
            )));
        }
        let q = match stratum {
            Stratum::TlC00 => exp_tl_c00(nf.theta, t),
            Stratum::TlC0 => exp_tl_c0(nf.theta, nf.c, t),
            Stratum::TlCplus | Stratum::TlCminus => {
                let r = rc.as_ref().unwrap();
                exp_tl_cpm(r.energy, r.alpha, r.psi0, t)?
            }
            Stratum::SlC1 => {
                let r = rc.as_ref().unwrap();
                exp_sl_c1(r.energy, r.alpha, r.psi0, t)?
            }
            Stratum::SlC2 => {
                let r = rc.as_ref().unwrap();
                exp_sl_c2(r.energy, r.alpha, r.sg, r.psi0, t)?
            }
            Stratum::SlC3 => {
                let r = rc.as_ref().unwrap();
                exp_sl_c3(r.energy, r.alpha, r.sg, r.psi0, t)?
            }
            Stratum::SlC4 => {
                let r = rc.as_ref().unwrap();
                exp_sl_c4(r.alpha, r.sg, r.psi0, t, variant)
            }
            Stratum::SlC5 => exp_sl_c5(t),
            Stratum::SlC6 => exp_sl_c6(nf.theta, nf.c, t),
            Stratum::SlC7 => exp_sl_c7(nf.theta, t, variant),
            Stratum::LightPlus | Stratum::LightMinus => {
                return Err(Error::Stratum(
                    "exp: lightlike trajectories have no covector chart; \
                     use exp_lightlike"
                        .into(),
                ))
            }
        };
        out.push(apply_branch_image(lambda, q));
    }
    Ok(out)
}

/// Point map carrying the principal-branch trajectory to the other branch.
fn apply_branch_image(lambda: &Covector, q: GroupPoint) -> GroupPoint {
    if lambda.branch_sign > 0.0 {
        return q;
    }
    match lambda.causal {
        CausalFamily::Timelike => GroupPoint::new(-q.x1, q.x2, -q.y, q.z),
        CausalFamily::Spacelike => GroupPoint::new(q.x1, -q.x2, -q.y, -q.z),
    }
}

/// The two lightlike trajectories through the identity:
/// `(t, t, 0, t^3/3)` for `branch_sign = +1` and `(t, -t, 0, -t^3/3)` for
/// `branch_sign = -1`. Defined for all real `t >= 0`.
pub fn exp_lightlike(branch_sign: f64, t: f64) -> GroupPoint {
    let s = if branch_sign >= 0.0 { 1.0 } else { -1.0 };
    GroupPoint::new(t, s * t, 0.0, s * t * t * t / 3.0)
}

/// Horizontal ODE of the lightlike trajectory with the given branch:
/// velocity `u = (1, s)` in the frame, a null vector of the metric.
pub fn lightlike_rhs(branch_sign: f64, q: &[f64; 4]) -> [f64; 4] {
    let s = if branch_sign >= 0.0 { 1.0 } else { -1.0 };
    let [x1, x2, _y, _z] = *q;
    [
        1.0,
        s,
        (s * x1 - x2) / 2.0,
        s * (x1 * x1 + x2 * x2) / 2.0,
    ]
}

fn exp_tl_c00(theta0: f64, t: f64) -> GroupPoint {
    let (s0, c0) = (theta0.sinh(), theta0.cosh());
    GroupPoint::new(
        -c0 * t,
        s0 * t,
        0.0,
        (2.0 * s0 * s0 + 1.0) * s0 / 6.0 * t.powi(3),
    )
}

fn exp_tl_c0(theta0: f64, c: f64, t: f64) -> GroupPoint {
    let x1 = ((theta0 - c * t).sinh() - theta0.sinh()) / c;
    let x2 = (theta0.cosh() - (theta0 - c * t).cosh()) / c;
    let y = sinh_minus_x(c * t) / (2.0 * c * c);
    let z = (4.0 * (c * t / 2.0).sinh().powi(3) * (3.0 * theta0 - 3.0 * c * t / 2.0).sinh()
        - 3.0 * sinh_minus_x(c * t) * theta0.sinh())
        / (6.0 * c.powi(3));
    GroupPoint::new(x1, x2, y, z)
}

fn exp_tl_cpm(e: f64, alpha: f64, psi0: f64, t: f64) -> Result<GroupPoint> {
    let ae = ((e * e + alpha * alpha).sqrt() / 2.0).sqrt();
    let k2 = 0.5 + e / (4.0 * ae * ae);
    let psit = psi0 + ae * t;
    let b0 = jacobi(psi0, k2)?;
    let bt = jacobi(psit, k2)?;
    let (sc0, sct) = (b0.sn / b0.cn, bt.sn / bt.cn);
    let aa = alpha.abs();
    let de = bt.eps - b0.eps;
    let x1 = (2.0 * ae / aa) * (sc0 * b0.dn - sct * bt.dn);
    let x2 = (4.0 * ae * (ae * (1.0 - k2) * t - de) - aa * x1) / alpha;
    let y = -(2.0 * ae * ae / (alpha * aa))
        * (k2 * (bt.cn.powi(2) - b0.cn.powi(2))
            + (1.0 - k2) * (bt.cn.powi(-2) - b0.cn.powi(-2)))
        + (ae / aa) * (b0.dn * sc0 + bt.dn * sct) * x2;
    let z = x2.powi(3) / 6.0
        + (4.0 * ae.powi(3) / (3.0 * alpha.powi(3)))
            * (2.0 * ae * (k2 - 1.0) * t
                + (1.0 - k2) * (bt.dn * bt.sn / bt.cn.powi(3) - b0.dn * b0.sn / b0.cn.powi(3))
                + k2 * (bt.cn * bt.dn * bt.sn - b0.cn * b0.dn * b0.sn)
                - 2.0 * de * (2.0 * k2 - 1.0))
        - (2.0 * ae * b0.dn * b0.sn / (b0.cn * aa))
            * ((ae * b0.dn * sc0 / aa) * x2 - 0.5 * x1 * x2 - y)
        - (2.0 * ae * ae * (2.0 * k2 - 1.0) * x1) / (3.0 * alpha * aa);
    Ok(GroupPoint::new(x1, x2, y, z))
}

fn exp_sl_c1(e: f64, alpha: f64, psi0: f64, t: f64) -> Result<GroupPoint> {
    let ae = ((e - alpha) / 2.0).sqrt();
    let k2 = (e + alpha) / (e - alpha);
    let psit = psi0 + ae * t;
    let b0 = jacobi(psi0, k2)?;
    let bt = jacobi(psit, k2)?;
    let de = bt.eps - b0.eps;
    let sq2 = std::f64::consts::SQRT_2;
    let x1 = sq2 * (alpha + e).sqrt() / alpha * (bt.sn - b0.sn);
    let x2 = -(2.0 * ae / alpha) * de - t;
    let y = (alpha + e).sqrt() / (sq2 * alpha * alpha)
        * (2.0 * ae * (bt.cn * bt.dn - b0.cn * b0.dn + de * (bt.sn + b0.sn))
            + alpha * (bt.sn + b0.sn) * t);
    let z = x2.powi(3) / 6.0
        + (1.0 / (3.0 * alpha.powi(3)))
            * (2.0 * ae
                * ((alpha + e)
                    * (bt.cn * bt.dn * (bt.sn - b0.sn)
                        - 2.0 * (bt.cn * bt.dn - b0.cn * b0.dn) * b0.sn)
                    - (e + 3.0 * (alpha + e) * b0.sn * b0.sn) * de)
                + alpha * (alpha - e - 3.0 * (alpha + e) * b0.sn * b0.sn) * t);
    Ok(GroupPoint::new(x1, x2, y, z))
}

fn exp_sl_c2(e: f64, alpha: f64, sg: f64, psi0: f64, t: f64) -> Result<GroupPoint> {
    let ae = ((alpha - e) / 2.0).sqrt();
    let k2 = 2.0 * alpha / (alpha - e);
    let kp2 = 1.0 - k2;
    let psit = psi0 + ae * t;
    let b0 = jacobi(psi0, k2)?;
    let bt = jacobi(psit, k2)?;
    let (sc0, sct) = (b0.sn / b0.cn, bt.sn / bt.cn);
    let de = bt.eps - b0.eps;
    let sq2 = std::f64::consts::SQRT_2;
    let x1 = -sq2 * (-alpha - e).sqrt() * sg / alpha * (sct - sc0);
    let x2 = -(2.0 * ae * (de + b0.dn * sc0 - bt.dn * sct) + e * t) / alpha;
    let y = -(-alpha - e).sqrt() * sg / (sq2 * alpha * alpha)
        * (e * (sc0 + sct) * t
            + 2.0 * ae * ((sc0 + sct) * de + (bt.dn - b0.dn) * (1.0 - sc0 * sct)));
    // z is the antiderivative of (x1^2 + x2^2)/2 cosh(theta) in the chart
    // argument, split into the exact part x2^3/6 plus an elliptic remainder
    let a1 = -1.0 / (3.0 * kp2) - 2.0 / (3.0 * k2) + 2.0 * sc0 * sc0 / k2;
    let a4 = -2.0 / (3.0 * k2) + sc0 * sc0 * (2.0 - k2) / k2;
    let g = |sn: f64, cn: f64, dn: f64, eps: f64, u: f64| -> f64 {
        let sc = sn / cn;
        a1 * (sc * dn - eps) + (2.0 / (3.0 * k2)) * sn * dn / cn.powi(3) + a4 * u
            - (2.0 * sc0 / k2) * dn / (cn * cn)
    };
    let p = 2.0 * kp2 / (ae.powi(3) * k2 * k2);
    let z = x2.powi(3) / 6.0
        + p * (g(bt.sn, bt.cn, bt.dn, bt.eps, psit) - g(b0.sn, b0.cn, b0.dn, b0.eps, psi0));
    Ok(GroupPoint::new(x1, x2, y, z))
}

fn exp_sl_c3(e: f64, alpha: f64, sg: f64, psi0: f64, t: f64) -> Result<GroupPoint> {
    let ae = ((e + alpha) / 2.0).sqrt();
    let k2 = (e - alpha) / (e + alpha);
    let psit = psi0 + ae * t;
    let b0 = jacobi(psi0, k2)?;
    let bt = jacobi(psit, k2)?;
    let (dc0, dct) = (b0.dn / b0.cn, bt.dn / bt.cn);
    let (sc0, sct) = (b0.sn / b0.cn, bt.sn / bt.cn);
    let de = bt.eps - b0.eps;
    let kp = 1.0 - k2;
    let x1 = 2.0 * sg * (b0.cn * bt.dn - bt.cn * b0.dn) / (ae * bt.cn * b0.cn * kp);
    let x2 = (2.0 / (ae * kp)) * (bt.dn * sct - b0.dn * sc0 - de) + t;
    let y = sg / (ae * kp)
        * ((2.0 / (ae * kp)) * ((dct + dc0) * de + (dc0 * dct + k2) * (b0.sn - bt.sn))
            - (dc0 + dct) * t);
    let km1 = k2 - 1.0;
    let cn02 = b0.cn * b0.cn;
    let z = 2.0 * de * (6.0 - 6.0 * k2 + cn02 * (1.0 + 7.0 * k2))
        / (3.0 * ae.powi(3) * cn02 * km1.powi(3))
        + 2.0 * (3.0 * b0.dn * b0.dn + cn02) * t / (3.0 * ae * ae * cn02 * km1 * km1)
        + (2.0 / (3.0 * ae.powi(3) * bt.cn.powi(3) * b0.cn.powi(3) * km1.powi(3)))
            * (bt.cn.powi(3) * b0.dn * (2.0 + cn02 - 2.0 * k2 + 7.0 * cn02 * k2) * b0.sn
                - 6.0 * cn02 * bt.cn * b0.dn * km1 * bt.sn
                + 2.0 * b0.cn.powi(3) * bt.dn * km1 * bt.sn
                - b0.cn * bt.cn * bt.cn * bt.dn * (6.0 - 6.0 * k2 + cn02 * (1.0 + 7.0 * k2)) * bt.sn)
        + x2.powi(3) / 6.0;
    Ok(GroupPoint::new(x1, x2, y, z))
}

fn exp_sl_c4(alpha: f64, sg: f64, psi0: f64, t: f64, variant: FormulaVariant) -> GroupPoint {
    let ae = alpha.sqrt();
    let psit = psi0 + ae * t;
    let w0 = alpha * (2.0 * psi0).exp();
    let wt = alpha * (2.0 * psit).exp();
    let x1 = 4.0 * sg * (psit.exp() / (wt - 1.0) - psi0.exp() / (w0 - 1.0));
    let x2 = if variant == FormulaVariant::PrintedC4X2 {
        // the printed bracket has both terms at the same argument, so it
        // cancels identically and leaves x2 = t
        (4.0 / ae) * (1.0 / (w0 - 1.0) - 1.0 / (w0 - 1.0)) + t
    } else {
        (4.0 / ae) * (1.0 / (w0 - 1.0) - 1.0 / (wt - 1.0)) + t
    };
    let y = -sg * 2.0 * psi0.exp() * (alpha * (psit + psi0).exp() - 1.0)
        * (2.0 + ae * t + (psit - psi0).exp() * (ae * t - 2.0))
        / (ae * (w0 - 1.0) * (wt - 1.0));
    let wm0 = w0 - 1.0;
    let wmt = wt - 1.0;
    let edp = (psit - psi0).exp();
    let z = x2.powi(3) / 6.0
        + (4.0 / 3.0)
            * (6.0 * (2.0 * psi0).exp() * t / (wm0 * wm0)
                + (-1.0 - 9.0 * w0 * (-2.0 + w0)) / (alpha * ae * wm0.powi(3))
                + 12.0 * (1.0 + w0 * (-1.0 + 2.0 * edp)) / (alpha * ae * wm0 * wmt * wmt)
                - 8.0 / (alpha * ae * wmt.powi(3))
                - 3.0 * (1.0 + w0 * (6.0 + 4.0 * edp - w0 * (-1.0 + 4.0 * edp)))
                    / (alpha * ae * wm0 * wm0 * wmt));
    GroupPoint::new(x1, x2, y, z)
}

fn exp_sl_c5(t: f64) -> GroupPoint {
    GroupPoint::new(0.0, t, 0.0, t.powi(3) / 6.0)
}

fn exp_sl_c6(theta0: f64, c: f64, t: f64) -> GroupPoint {
    let x1 = ((c * t - theta0).cosh() - theta0.cosh()) / c;
    let x2 = ((c * t - theta0).sinh() + theta0.sinh()) / c;
    let y = -sinh_minus_x(c * t) / (2.0 * c * c);
    let z = (4.0 * (3.0 * c * t / 2.0 - 3.0 * theta0).cosh() * (c * t / 2.0).sinh().powi(3)
        + 3.0 * theta0.cosh() * sinh_minus_x(c * t))
        / (6.0 * c.powi(3));
    GroupPoint::new(x1, x2, y, z)
}

fn exp_sl_c7(theta0: f64, t: f64, variant: FormulaVariant) -> GroupPoint {
    let (s0, c0) = (theta0.sinh(), theta0.cosh());
    let z = if variant == FormulaVariant::PrintedC7Z {
        // printed with a linear t where the cube belongs
        c0 * (1.0 + 2.0 * s0 * s0) / 6.0 * t
    } else {
        c0 * (1.0 + 2.0 * s0 * s0) / 6.0 * t.powi(3)
    };
    GroupPoint::new(-s0 * t, c0 * t, 0.0, z)
}

/// Per-coordinate maximum absolute deviation between the closed forms and
/// the RK4 oracle over a grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MaxErr {
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
    pub z: f64,
}

/// Covector sample echoed in a validation record.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleCovector {
    pub theta: f64,
    pub c: f64,
    pub alpha: f64,
}

/// One closed-form-vs-oracle comparison, serializable as the validation
/// report entry.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationRecord {
    pub stratum: Stratum,
    pub sample: SampleCovector,
    pub t_grid: Vec<f64>,
    pub max_err: MaxErr,
    pub verdict: String,
}

/// Cross-check the stratum closed form of `lambda` against the RK4 oracle on
/// a uniform grid of `grid` times in `(0, t_end]`, using about `rk4_steps`
/// total integrator steps. Verdict is `PASS` when every coordinate deviation
/// stays below `tol`, else `SUSPECT`.
pub fn validate_closed_forms(
    lambda: &Covector,
    t_end: f64,
    grid: usize,
    rk4_steps: usize,
    tol: f64,
    variant: FormulaVariant,
) -> Result<ValidationRecord> {
    if grid == 0 {
        return Err(Error::Domain("validate_closed_forms: empty grid".into()));
    }
    let times: Vec<f64> = (1..=grid).map(|i| t_end * i as f64 / grid as f64).collect();
    let closed = exp_arc_variant(lambda, &times, variant)?;
    let causal = lambda.causal;
    let branch = lambda.branch_sign;
    let mut rhs =
        |_t: f64, s: &[f64; 7]| -> Result<[f64; 7]> { full_rhs(s, causal, branch) };
    let y0 = [0.0, 0.0, 0.0, 0.0, lambda.theta, lambda.c, lambda.alpha];
    let per_seg = (rk4_steps / grid).max(4);
    let oracle = rk4::integrate_grid(&mut rhs, &times, y0, per_seg)?;
    let mut err = MaxErr {
        x1: 0.0,
        x2: 0.0,
        y: 0.0,
        z: 0.0,
    };
    for (q, o) in closed.iter().zip(oracle.iter()) {
        err.x1 = err.x1.max((q.x1 - o[0]).abs());
        err.x2 = err.x2.max((q.x2 - o[1]).abs());
        err.y = err.y.max((q.y - o[2]).abs());
        err.z = err.z.max((q.z - o[3]).abs());
    }
    let worst = err.x1.max(err.x2).max(err.y).max(err.z);
    Ok(ValidationRecord {
        stratum: classify(lambda)?,
        sample: SampleCovector {
            theta: lambda.theta,
            c: lambda.c,
            alpha: lambda.alpha,
        },
        t_grid: times,
        max_err: err,
        verdict: if worst < tol { "PASS" } else { "SUSPECT" }.to_string(),
    })
}
