//! Maxwell sets of the reflection symmetries and upper bounds on cut times.
//!
//! In midpoint coordinates `tau = (psi_t + psi_0)/2`, `p = (psi_t - psi_0)/2
//! = ae t / 2`, the endpoint conditions `y = 0` (eps1, eps2 on the timelike
//! side) and `x1 = 0` (eps2 on the spacelike side) factor into a product of
//! Jacobi functions of `tau` (vanishing exactly on symmetry fixed points)
//! and a function of `p` alone. Positivity of those `p`-factors, the
//! functions `f_y, f1, f2, f3, f4` below, decides whether the corresponding
//! Maxwell set is empty; their first roots give Maxwell times.

use crate::elliptic::{complete_k, jacobi};
use crate::expmap::t_supr;
use crate::vertical::{classify, rectify, Covector, Stratum};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Midpoint coordinates of an arc: chart arguments `psi_0 = tau - p`,
/// `psi_t = tau + p` with `p = ae t / 2`.
#[derive(Clone, Copy, Debug)]
pub struct MidpointCoords {
    pub tau: f64,
    pub p: f64,
    pub k2: f64,
    pub ae: f64,
}

/// Midpoint coordinates of the arc `(lambda, t)` in its stratum chart.
pub fn midpoint_coords(lambda: &Covector, t: f64) -> Result<MidpointCoords> {
    let rc = rectify(lambda)?;
    let p = rc.ae * t / 2.0;
    Ok(MidpointCoords {
        tau: rc.psi0 + p,
        p,
        k2: rc.k2,
        ae: rc.ae,
    })
}

/// Hat-units used on the `k2 < 0` part of C3: squared modulus
/// `(alpha - E)/(2 alpha)` in `(0, 1)` and scale `sqrt(alpha)`. Chart
/// arguments convert by the ratio of scales.
pub fn c3_hat_units(e: f64, alpha: f64) -> (f64, f64) {
    ((alpha - e) / (2.0 * alpha), alpha.sqrt())
}

/// Timelike `p`-factor of the `y = 0` condition. Positive on `(0, K)`;
/// the parameters satisfy `alpha^2 = 16 ae^4 k2 (1 - k2)`.
pub fn f_y(p: f64, k2: f64, ae: f64, alpha: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    let ae4 = ae.powi(4);
    Ok(
        -16.0 * ae4 * k2 * k2 * b.cn.powi(3) * b.dn * b.sn
            + (16.0 * ae4 * k2 * b.eps - alpha * alpha * p)
                * (b.dn * b.dn - k2 * b.cn * b.cn * b.sn * b.sn),
    )
}

/// C1 `p`-factor of the `y = 0` condition (eps1 Maxwell set). Has roots;
/// the first one beyond `2K` gives the eps1 Maxwell time.
pub fn f1(p: f64, k2: f64, ae: f64, alpha: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    Ok(alpha * p * b.cn * b.dn
        + ae * ae
            * (2.0 * b.cn * b.dn * b.eps - (1.0 + k2) * b.sn + 2.0 * k2 * b.sn.powi(3)))
}

/// C2 `p`-factor of the `y = 0` condition, with the coefficient `E p` on the
/// leading term. Positive on `(0, K)`.
pub fn f2(p: f64, k2: f64, ae: f64, e: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    Ok(-e * p * b.dn - ae * ae * (2.0 * b.dn * b.eps - k2 * b.cn * b.sn))
}

/// Defective reading of [`f2`] with the incomplete elliptic integral in
/// place of `E p`. Kept for auditability; it does not factor the endpoint.
pub fn f2_printed(p: f64, k2: f64, ae: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    Ok(-b.eps * b.dn - ae * ae * (2.0 * b.dn * b.eps - k2 * b.cn * b.sn))
}

/// C3 `p`-factor (modulus in `(0,1)`). Positive on `(0, K)`.
pub fn f3(p: f64, k2: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    Ok(b.cn * b.dn * ((1.0 - k2) * p - 2.0 * b.eps) + (1.0 + k2) * b.sn
        - 2.0 * k2 * b.sn.powi(3))
}

/// C3 hat-modulus `p`-factor (used when the native modulus is negative).
/// Positive on `(0, K)`. This is the sign-corrected form; see
/// [`f4_printed`].
pub fn f4(p: f64, k2: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    Ok(p * b.cn + b.dn * b.sn - 2.0 * b.cn * b.eps)
}

/// Sign-flipped variant of [`f4`] as printed; non-positive on `(0, K)`.
pub fn f4_printed(p: f64, k2: f64) -> Result<f64> {
    Ok(-f4(p, k2)?)
}

/// Factored endpoint `y` of a timelike `C+-` arc in midpoint coordinates.
pub fn y_factored_tl(tau: f64, p: f64, k2: f64, ae: f64, alpha: f64) -> Result<f64> {
    let bt = jacobi(tau, k2)?;
    let bp = jacobi(p, k2)?;
    let fy = f_y(p, k2, ae, alpha)?;
    Ok(-bt.sn * bt.cn * bt.dn * fy
        / (alpha
            * alpha.abs()
            * ae
            * ae
            * k2
            * (bt.cn * bt.cn - bt.dn * bt.dn * bp.sn * bp.sn)
            * (1.0 - k2 * bp.sn * bp.sn * bt.sn * bt.sn)))
}

/// Factored endpoint `(x1, y)` of a C1 arc in midpoint coordinates.
pub fn xy_factored_c1(
    tau: f64,
    p: f64,
    k2: f64,
    ae: f64,
    alpha: f64,
    e: f64,
) -> Result<(f64, f64)> {
    let bt = jacobi(tau, k2)?;
    let bp = jacobi(p, k2)?;
    let root = (2.0 * (alpha + e)).sqrt();
    let den = 1.0 - k2 * bp.sn * bp.sn * bt.sn * bt.sn;
    let x1 = 2.0 * root * bt.cn * bt.dn * bp.sn / (alpha * den);
    let y = 2.0 * root * bt.sn * f1(p, k2, ae, alpha)? / (alpha * alpha * ae * den);
    Ok((x1, y))
}

/// Factored endpoint `(x1, y)` of a C2 arc in midpoint coordinates.
pub fn xy_factored_c2(
    tau: f64,
    p: f64,
    k2: f64,
    ae: f64,
    alpha: f64,
    e: f64,
    sg: f64,
) -> Result<(f64, f64)> {
    let bt = jacobi(tau, k2)?;
    let bp = jacobi(p, k2)?;
    let root = std::f64::consts::SQRT_2 * (-alpha - e).sqrt();
    let den = bt.cn * bt.cn - bp.sn * bp.sn * bt.dn * bt.dn;
    let x1 = -2.0 * sg * root * bt.dn * bp.cn * bp.sn / (alpha * den);
    let y = 2.0 * sg * root * bt.cn * bt.sn * f2(p, k2, ae, e)? / (alpha * alpha * ae * den);
    Ok((x1, y))
}

/// Factored endpoint `(x1, y)` of a C3 arc, native modulus in `(0, 1)`.
pub fn xy_factored_c3(tau: f64, p: f64, k2: f64, ae: f64, sg: f64) -> Result<(f64, f64)> {
    let bt = jacobi(tau, k2)?;
    let bp = jacobi(p, k2)?;
    let den = bt.cn * bt.cn - bt.dn * bt.dn * bp.sn * bp.sn;
    let x1 = 4.0 * sg * bp.sn * bt.sn / (ae * den);
    let kp = 1.0 - k2;
    let y = -4.0 * sg * bt.cn * bt.dn * f3(p, k2)? / (ae * ae * kp * kp * den);
    Ok((x1, y))
}

/// Factored endpoint `(x1, y)` of a C3 arc with negative native modulus,
/// expressed in hat-units (`tau`, `p` and the modulus are the hat ones).
pub fn xy_factored_c3_hat(
    tau_h: f64,
    p_h: f64,
    k2_h: f64,
    ae_h: f64,
    alpha: f64,
    e: f64,
    sg: f64,
) -> Result<(f64, f64)> {
    let bt = jacobi(tau_h, k2_h)?;
    let bp = jacobi(p_h, k2_h)?;
    let root = std::f64::consts::SQRT_2 * (alpha + e).sqrt();
    let den = bt.cn * bt.cn - bt.dn * bt.dn * bp.sn * bp.sn;
    let x1 = 2.0 * root * sg * bt.dn * bt.sn * bp.dn * bp.sn / (alpha * den);
    let y = -2.0 * root * bt.cn * sg * f4(p_h, k2_h)? / (alpha * ae_h * den);
    Ok((x1, y))
}

/// Which comparison-function identity to check: the closed forms of
/// `(f/g)'` for the four positivity proofs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonPair {
    /// `(f_y / g)'` with `g = k2 (1 - k2 (1 - cn^4))`.
    FyOverG,
    /// `(f2 / dn)'`.
    F2OverDn,
    /// `(f3 / (cn dn))'`.
    F3OverCnDn,
    /// `(f4 / cn)'`.
    F4OverCn,
}

/// Reference parameters for grid checks of a comparison pair: the functions
/// are scale-covariant, so one representative `(ae, alpha, E)` per modulus
/// suffices. Returns `(ae, alpha, e)`.
fn reference_params(pair: ComparisonPair, k2: f64) -> (f64, f64, f64) {
    match pair {
        ComparisonPair::FyOverG => {
            let ae = 1.1_f64;
            let alpha = (16.0 * ae.powi(4) * k2 * (1.0 - k2)).sqrt();
            let e = (k2 - 0.5) * 4.0 * ae * ae;
            (ae, alpha, e)
        }
        ComparisonPair::F2OverDn => {
            let alpha = 1.0;
            let e = alpha - 2.0 * alpha / k2;
            (((alpha - e) / 2.0).sqrt(), alpha, e)
        }
        ComparisonPair::F3OverCnDn => {
            let alpha = 1.0;
            let e = alpha * (1.0 + k2) / (1.0 - k2);
            (((e + alpha) / 2.0).sqrt(), alpha, e)
        }
        ComparisonPair::F4OverCn => (1.0, 1.0, 1.0),
    }
}

fn pair_f_over_g(pair: ComparisonPair, p: f64, k2: f64, ae: f64, alpha: f64, e: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    Ok(match pair {
        ComparisonPair::FyOverG => {
            let g = k2 * (1.0 - k2 * (1.0 - b.cn.powi(4)));
            f_y(p, k2, ae, alpha)? / g
        }
        ComparisonPair::F2OverDn => f2(p, k2, ae, e)? / b.dn,
        ComparisonPair::F3OverCnDn => f3(p, k2)? / (b.cn * b.dn),
        ComparisonPair::F4OverCn => f4(p, k2)? / b.cn,
    })
}

/// Closed form of `(f/g)'` for the pair (the corrected displays).
fn pair_derivative(pair: ComparisonPair, p: f64, k2: f64, ae: f64, alpha: f64) -> Result<f64> {
    let b = jacobi(p, k2)?;
    let (sn2, cn2, dn2) = (b.sn * b.sn, b.cn * b.cn, b.dn * b.dn);
    Ok(match pair {
        ComparisonPair::FyOverG => {
            let d = 1.0 - k2 * (1.0 - cn2 * cn2);
            4.0 * alpha * alpha * sn2 * cn2 * dn2 / (d * d)
        }
        ComparisonPair::F2OverDn => alpha * alpha * sn2 * cn2 / (ae * ae * dn2),
        ComparisonPair::F3OverCnDn => {
            let kp = 1.0 - k2;
            kp * kp * sn2 / (cn2 * dn2)
        }
        ComparisonPair::F4OverCn => dn2 * sn2 / cn2,
    })
}

/// Check the closed `(f/g)'` display of one comparison pair against a finite
/// difference of `f/g` on `grid` interior points of `(0, K)`. The finite
/// difference uses step `1e-5`, one-sided where a centered stencil would
/// leave the interval. Returns the worst relative residual.
pub fn comparison_check(pair: ComparisonPair, k2: f64, grid: usize) -> Result<f64> {
    let (ae, alpha, e) = reference_params(pair, k2);
    let kk = complete_k(k2)?;
    let h = 1e-5;
    let mut worst = 0.0f64;
    for i in 1..=grid {
        let p = kk * i as f64 / (grid + 1) as f64;
        let (lo, hi) = if p - h <= 0.0 {
            (p, p + h)
        } else if p + h >= kk {
            (p - h, p)
        } else {
            (p - h, p + h)
        };
        let fd = (pair_f_over_g(pair, hi, k2, ae, alpha, e)?
            - pair_f_over_g(pair, lo, k2, ae, alpha, e)?)
            / (hi - lo);
        let closed = pair_derivative(pair, p, k2, ae, alpha)?;
        worst = worst.max((fd - closed).abs() / closed.abs().max(1.0));
    }
    Ok(worst)
}

/// Minimum of the `p`-factor named by `pair` over `grid` interior points of
/// `(0, K)` at the given modulus, with the reference parameters. Evaluated
/// in parallel; the reduction is the exact minimum, so the result is
/// deterministic.
pub fn positivity_grid(pair: ComparisonPair, k2: f64, grid: usize) -> Result<f64> {
    let (ae, alpha, e) = reference_params(pair, k2);
    let kk = complete_k(k2)?;
    let values: Result<Vec<f64>> = (1..=grid)
        .into_par_iter()
        .map(|i| {
            let p = kk * i as f64 / (grid + 1) as f64;
            match pair {
                ComparisonPair::FyOverG => f_y(p, k2, ae, alpha),
                ComparisonPair::F2OverDn => f2(p, k2, ae, e),
                ComparisonPair::F3OverCnDn => f3(p, k2),
                ComparisonPair::F4OverCn => f4(p, k2),
            }
        })
        .collect();
    Ok(values?.into_iter().fold(f64::INFINITY, f64::min))
}

/// First root of `f1` in `(0, 6K]`, in `p`-units: scan on a uniform grid
/// for the first sign change, then bisect to `1e-12`.
pub fn f1_first_root(k2: f64, ae: f64, alpha: f64) -> Result<f64> {
    let kk = complete_k(k2)?;
    let n = 6 * 2048;
    let ps: Vec<f64> = (0..=n)
        .map(|i| 1e-4 + (6.0 * kk - 1e-4) * i as f64 / n as f64)
        .collect();
    let vals: Result<Vec<f64>> = ps.par_iter().map(|&p| f1(p, k2, ae, alpha)).collect();
    let vals = vals?;
    let mut bracket = None;
    for i in 1..vals.len() {
        if vals[i - 1].signum() * vals[i].signum() < 0.0 {
            bracket = Some((ps[i - 1], ps[i]));
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Domain(format!("f1 has no sign change in (0, 6K] at k2 = {k2}"))
    })?;
    let flo = f1(lo, k2, ae, alpha)?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f1(mid, k2, ae, alpha)?;
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One Maxwell set in a report: the reflection index, whether the set is
/// empty or carries a first Maxwell time, and why.
#[derive(Clone, Debug, Serialize)]
pub struct MaxwellEntry {
    pub symmetry: usize,
    pub status: String,
    pub time: Option<f64>,
    pub detail: String,
}

/// Maxwell times of the reflections on the covector's stratum. Defined on
/// timelike `C+-` and spacelike C1, C2, C3; stratum error elsewhere.
pub fn maxwell_times(lambda: &Covector) -> Result<Vec<MaxwellEntry>> {
    let stratum = classify(lambda)?;
    let rc = match stratum {
        Stratum::TlCplus | Stratum::TlCminus | Stratum::SlC1 | Stratum::SlC2 | Stratum::SlC3 => {
            rectify(lambda)?
        }
        s => {
            return Err(Error::Stratum(format!(
                "maxwell_times: no Maxwell analysis on {}",
                s.tag()
            )))
        }
    };
    Ok(match stratum {
        Stratum::TlCplus | Stratum::TlCminus => vec![MaxwellEntry {
            symmetry: 2,
            status: "empty".into(),
            time: None,
            detail: "y factors through f_y, which is positive on (0, K)".into(),
        }],
        Stratum::SlC1 => {
            let kk = complete_k(rc.k2)?;
            let p1 = f1_first_root(rc.k2, rc.ae, rc.alpha)?;
            vec![
                MaxwellEntry {
                    symmetry: 1,
                    status: "time".into(),
                    time: Some(2.0 * p1 / rc.ae),
                    detail: "first root of f1".into(),
                },
                MaxwellEntry {
                    symmetry: 2,
                    status: "time".into(),
                    time: Some(4.0 * kk / rc.ae),
                    detail: "first root of sn p at p = 2K".into(),
                },
            ]
        }
        Stratum::SlC2 => vec![
            MaxwellEntry {
                symmetry: 1,
                status: "empty".into(),
                time: None,
                detail: "y factors through f2, which is positive on (0, K)".into(),
            },
            MaxwellEntry {
                symmetry: 2,
                status: "empty".into(),
                time: None,
                detail: "x1 factors through cn p sn p, with no root before the explosion time"
                    .into(),
            },
        ],
        Stratum::SlC3 => {
            let detail1 = if rc.k2 > 0.0 {
                "y factors through f3, which is positive on (0, K)"
            } else {
                "y factors through hat-modulus f4, which is positive on (0, K)"
            };
            vec![
                MaxwellEntry {
                    symmetry: 1,
                    status: "empty".into(),
                    time: None,
                    detail: detail1.into(),
                },
                MaxwellEntry {
                    symmetry: 2,
                    status: "empty".into(),
                    time: None,
                    detail: "x1 factors through sn p, with no root before the explosion time"
                        .into(),
                },
            ]
        }
        _ => unreachable!(),
    })
}

/// Upper bound on cut time, serializable.
#[derive(Clone, Debug, Serialize)]
pub struct CutBound {
    /// `"c1-theorem"`, `"t-supr"`, or `"unbounded"`.
    pub kind: String,
    pub value: Option<f64>,
}

/// Upper bound on the cut time along the extremal of `lambda`: the eps2
/// Maxwell time `4K/ae` on C1, the explosion time on C2 and C3, and no
/// bound elsewhere.
pub fn cut_time_bound(lambda: &Covector) -> Result<CutBound> {
    let stratum = classify(lambda)?;
    Ok(match stratum {
        Stratum::SlC1 => {
            let rc = rectify(lambda)?;
            let kk = complete_k(rc.k2)?;
            CutBound {
                kind: "c1-theorem".into(),
                value: Some(4.0 * kk / rc.ae),
            }
        }
        Stratum::SlC2 | Stratum::SlC3 => CutBound {
            kind: "t-supr".into(),
            value: Some(t_supr(lambda)?),
        },
        _ => CutBound {
            kind: "unbounded".into(),
            value: None,
        },
    })
}

/// Full Maxwell report for one covector, as emitted by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct MaxwellReport {
    pub stratum: Stratum,
    pub sample: Covector,
    /// Explosion time; absent when infinite.
    pub t_supr: Option<f64>,
    pub maxwell: Vec<MaxwellEntry>,
    pub cut_bound: CutBound,
}

pub fn maxwell_report(lambda: &Covector) -> Result<MaxwellReport> {
    let stratum = classify(lambda)?;
    let ts = t_supr(lambda)?;
    // strata without a Maxwell analysis still get a report, with an empty
    // Maxwell list and whatever cut bound applies
    let maxwell = match maxwell_times(lambda) {
        Ok(entries) => entries,
        Err(Error::Stratum(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    Ok(MaxwellReport {
        stratum,
        sample: *lambda,
        t_supr: ts.is_finite().then_some(ts),
        maxwell,
        cut_bound: cut_time_bound(lambda)?,
    })
}
