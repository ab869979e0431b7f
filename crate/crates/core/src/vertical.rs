//! The Hamiltonian system of the maximum principle and its vertical
//! (costate) subsystem: energy integral, stratification, rectifying
//! coordinates.
//!
//! Chart conventions on the two level surfaces of `H = (-h1^2 + h2^2)/2`:
//!
//! * timelike, `H = -1/2`: `h1 = branch * cosh(theta)`, `h2 = sinh(theta)`;
//! * spacelike, `H = +1/2`: `h1 = sinh(theta)`, `h2 = branch * cosh(theta)`.
//!
//! On the principal branch (`branch = +1`) the vertical subsystem is the
//! pendulum-like pair `theta' = -c`, `c' = -alpha cosh(theta)` (timelike) or
//! `c' = -alpha sinh(theta)` (spacelike), with conserved energy
//! `E = c^2/2 - alpha sinh(theta)` respectively `E = c^2/2 - alpha cosh(theta)`.
//! The `branch = -1` component is carried to the principal one by an exact
//! conjugation (flip the sign of `c`, and of `alpha` in the spacelike case),
//! so all stratum labels and rectified quantities refer to that normal form.
//!
//! Strata (normal form): timelike `C00 (c=0, alpha=0)`, `C0 (c!=0, alpha=0)`,
//! `C+ (alpha>0)`, `C- (alpha<0)`; spacelike `C1 (alpha<0, E>-alpha)` through
//! `C7 (alpha=0, E=0, c=0)` per the seven-case split of `(alpha, E, c, theta)`.

use crate::elliptic::{complete_k, jacobi, legendre_f_inc};
use crate::engel::{frame_at, GroupPoint};
use crate::expmap::{t_supr, ExtremalArc};
use crate::rk4;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Zero band for the stratification: values of `|alpha|`, `|c|`, `|E+alpha|`
/// (and `|theta|` on the `E = -alpha` boundary) below this count as zero.
pub const STRATUM_ZERO_BAND: f64 = 1e-12;

/// Pole guard: chart formulas that divide by `cn(psi)` refuse arguments with
/// `|cn|` at or below this.
pub const CN_POLE_GUARD: f64 = 1e-9;

/// Which level surface of the Hamiltonian the covector sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalFamily {
    Timelike,
    Spacelike,
}

/// A normalized covector in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub causal: CausalFamily,
    pub theta: f64,
    /// The costate component h3.
    pub c: f64,
    /// The costate component h4 (a first integral).
    pub alpha: f64,
    /// Sign of h1 (timelike chart) or of h2 (spacelike chart).
    pub branch_sign: f64,
}

impl Covector {
    pub fn timelike(theta: f64, c: f64, alpha: f64) -> Self {
        Covector {
            causal: CausalFamily::Timelike,
            theta,
            c,
            alpha,
            branch_sign: 1.0,
        }
    }

    pub fn spacelike(theta: f64, c: f64, alpha: f64) -> Self {
        Covector {
            causal: CausalFamily::Spacelike,
            theta,
            c,
            alpha,
            branch_sign: 1.0,
        }
    }

    pub fn with_branch(mut self, branch_sign: f64) -> Self {
        self.branch_sign = branch_sign;
        self
    }

    /// The raw costate `(h1, h2, h3, h4)` this chart point represents.
    pub fn h_vector(&self) -> [f64; 4] {
        let s = self.branch_sign;
        match self.causal {
            CausalFamily::Timelike => [s * self.theta.cosh(), self.theta.sinh(), self.c, self.alpha],
            CausalFamily::Spacelike => [self.theta.sinh(), s * self.theta.cosh(), self.c, self.alpha],
        }
    }

    /// The principal-branch covector whose trajectory maps onto this one
    /// under the exact branch conjugation. Identity when `branch_sign = +1`.
    pub fn normal_form(&self) -> Covector {
        if self.branch_sign > 0.0 {
            return *self;
        }
        match self.causal {
            CausalFamily::Timelike => Covector::timelike(self.theta, -self.c, self.alpha),
            CausalFamily::Spacelike => Covector::spacelike(self.theta, -self.c, -self.alpha),
        }
    }

    /// Inverse of [`Covector::normal_form`] for chart values `(theta, c)`
    /// obtained in the normal form: map them back to this covector's branch.
    pub(crate) fn from_normal_form(&self, theta: f64, c: f64) -> Covector {
        let s = self.branch_sign;
        if s > 0.0 {
            let mut out = *self;
            out.theta = theta;
            out.c = c;
            return out;
        }
        let mut out = *self;
        out.theta = theta;
        out.c = -c;
        out
    }
}

/// Invariant-set label of the vertical subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stratum {
    TlC00,
    TlC0,
    TlCplus,
    TlCminus,
    SlC1,
    SlC2,
    SlC3,
    SlC4,
    SlC5,
    SlC6,
    SlC7,
    LightPlus,
    LightMinus,
}

impl Stratum {
    pub fn tag(self) -> &'static str {
        match self {
            Stratum::TlC00 => "TL_C00",
            Stratum::TlC0 => "TL_C0",
            Stratum::TlCplus => "TL_Cplus",
            Stratum::TlCminus => "TL_Cminus",
            Stratum::SlC1 => "SL_C1",
            Stratum::SlC2 => "SL_C2",
            Stratum::SlC3 => "SL_C3",
            Stratum::SlC4 => "SL_C4",
            Stratum::SlC5 => "SL_C5",
            Stratum::SlC6 => "SL_C6",
            Stratum::SlC7 => "SL_C7",
            Stratum::LightPlus => "LIGHT_plus",
            Stratum::LightMinus => "LIGHT_minus",
        }
    }

    /// True for the strata whose trajectory formulas involve Jacobi elliptic
    /// functions of `psi0 + ae t` (and which therefore rectify).
    pub fn is_elliptic(self) -> bool {
        matches!(
            self,
            Stratum::TlCplus
                | Stratum::TlCminus
                | Stratum::SlC1
                | Stratum::SlC2
                | Stratum::SlC3
                | Stratum::SlC4
        )
    }
}

impl serde::Serialize for Stratum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

/// The Hamiltonian `H = (-h1^2 + h2^2)/2` of the maximum principle,
/// evaluated from a coordinate costate `xi` at the point `q` by expressing it
/// in the frame: `h_i = <xi, X_i(q)>`.
pub fn hamiltonian_h(q: GroupPoint, xi: [f64; 4]) -> f64 {
    let cols = frame_at(q);
    let mut h = [0.0f64; 2];
    for (i, hi) in h.iter_mut().enumerate() {
        for j in 0..4 {
            *hi += xi[j] * cols[i][j];
        }
    }
    0.5 * (-h[0] * h[0] + h[1] * h[1])
}

/// The conserved energy of the vertical subsystem:
/// timelike `E = c^2/2 - alpha sinh(theta)` (either branch),
/// spacelike `E = c^2/2 - branch * alpha * cosh(theta)`.
pub fn energy(lambda: &Covector) -> f64 {
    match lambda.causal {
        CausalFamily::Timelike => lambda.c * lambda.c / 2.0 - lambda.alpha * lambda.theta.sinh(),
        CausalFamily::Spacelike => {
            lambda.c * lambda.c / 2.0 - lambda.branch_sign * lambda.alpha * lambda.theta.cosh()
        }
    }
}

/// Largest pendulum angle before `cosh` overflows.
const THETA_OVERFLOW: f64 = 700.0;

/// Right-hand side of the full Hamiltonian system in chart coordinates.
/// State layout: `[x1, x2, y, z, theta, c, alpha]`.
pub fn full_rhs(state: &[f64; 7], causal: CausalFamily, branch_sign: f64) -> Result<[f64; 7]> {
    let [x1, x2, _y, _z, theta, c, alpha] = *state;
    if theta.abs() > THETA_OVERFLOW {
        return Err(Error::Overflow(format!(
            "cosh overflow at theta = {theta:.3}"
        )));
    }
    let s = branch_sign;
    let (sh, ch) = (theta.sinh(), theta.cosh());
    Ok(match causal {
        CausalFamily::Timelike => [
            -s * ch,
            sh,
            (x2 * s * ch + x1 * sh) / 2.0,
            (x1 * x1 + x2 * x2) / 2.0 * sh,
            -s * c,
            -s * alpha * ch,
            0.0,
        ],
        CausalFamily::Spacelike => [
            -sh,
            s * ch,
            (x2 * sh + x1 * s * ch) / 2.0,
            (x1 * x1 + x2 * x2) / 2.0 * s * ch,
            -s * c,
            -alpha * sh,
            0.0,
        ],
    })
}

/// Right-hand side of the raw costate system `h' = (-h2 h3, -h1 h3, -h1 h4, 0)`
/// paired with the horizontal equations; state `[x1,x2,y,z,h1,h2,h3,h4]`.
/// Used by the oracle to monitor conservation of `H` itself.
fn raw_rhs(state: &[f64; 8]) -> [f64; 8] {
    let [x1, x2, _y, _z, h1, h2, h3, h4] = *state;
    [
        -h1,
        h2,
        (x1 * h2 + x2 * h1) / 2.0,
        (x1 * x1 + x2 * x2) / 2.0 * h2,
        -h2 * h3,
        -h1 * h3,
        -h1 * h4,
        0.0,
    ]
}

/// Fixed-step RK4 integration of the full system: the independent oracle the
/// closed forms are validated against.
///
/// Alongside the chart system this also integrates the raw costate system
/// (same initial data through `h_vector`), from which the drift of the
/// Hamiltonian `H` is measured; the energy drift is measured on the chart
/// variables. Requires `n >= 16` steps and `t_end` below the explosion time.
pub fn integrate(lambda: &Covector, t_end: f64, n: usize) -> Result<ExtremalArc> {
    if n < 16 {
        return Err(Error::Domain(format!("integrate: need n >= 16, got {n}")));
    }
    if !(t_end > 0.0) {
        return Err(Error::Domain(format!(
            "integrate: need t_end > 0, got {t_end}"
        )));
    }
    let ts = t_supr(lambda)?;
    if !(t_end < ts) {
        return Err(Error::Domain(format!(
            "integrate: t_end = {t_end} is not below the explosion time {ts}"
        )));
    }
    let causal = lambda.causal;
    let branch = lambda.branch_sign;
    let h0 = lambda.h_vector();
    let h_ref = 0.5 * (-h0[0] * h0[0] + h0[1] * h0[1]);
    let e_ref = energy(lambda);

    // combined state: chart (7) then raw costate (4); x-coordinates shared
    let mut rhs = |_t: f64, s: &[f64; 11]| -> Result<[f64; 11]> {
        let chart: [f64; 7] = s[0..7].try_into().unwrap();
        let d_chart = full_rhs(&chart, causal, branch)?;
        let raw: [f64; 8] = [s[0], s[1], s[2], s[3], s[7], s[8], s[9], s[10]];
        let d_raw = raw_rhs(&raw);
        Ok([
            d_chart[0], d_chart[1], d_chart[2], d_chart[3], d_chart[4], d_chart[5], d_chart[6],
            d_raw[4], d_raw[5], d_raw[6], d_raw[7],
        ])
    };

    let mut state = [
        0.0, 0.0, 0.0, 0.0, lambda.theta, lambda.c, lambda.alpha, h0[0], h0[1], h0[2], h0[3],
    ];
    let h_step = t_end / n as f64;
    let mut times = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut thetas = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    let mut h_drift = 0.0f64;
    let mut e_drift = 0.0f64;
    for i in 0..n {
        let t = i as f64 * h_step;
        state = rk4::step(&mut rhs, t, &state, h_step)?;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!(
                "integrate: trajectory exploded at t = {:.6}",
                t + h_step
            )));
        }
        times.push(t + h_step);
        points.push(GroupPoint::new(state[0], state[1], state[2], state[3]));
        thetas.push(state[4]);
        cs.push(state[5]);
        let h_now = 0.5 * (-state[7] * state[7] + state[8] * state[8]);
        h_drift = h_drift.max((h_now - h_ref).abs());
        let lam_now = Covector {
            causal,
            theta: state[4],
            c: state[5],
            alpha: lambda.alpha,
            branch_sign: branch,
        };
        e_drift = e_drift.max((energy(&lam_now) - e_ref).abs());
    }
    Ok(ExtremalArc {
        lambda: *lambda,
        stratum: classify(lambda)?,
        times,
        points,
        theta: thetas,
        c: cs,
        h_drift,
        e_drift,
        t_supr: ts,
    })
}

/// Endpoint of the vertical-subsystem flow after time `t`, by fixed-step RK4
/// with `n` steps. Oracle counterpart of [`vertical_flow`].
pub fn vertical_flow_rk4(lambda: &Covector, t: f64, n: usize) -> Result<Covector> {
    let causal = lambda.causal;
    let s = lambda.branch_sign;
    let alpha = lambda.alpha;
    let mut rhs = |_t: f64, st: &[f64; 2]| -> Result<[f64; 2]> {
        let (theta, c) = (st[0], st[1]);
        if theta.abs() > THETA_OVERFLOW {
            return Err(Error::Overflow(format!(
                "vertical flow: cosh overflow at theta = {theta:.3}"
            )));
        }
        Ok(match causal {
            CausalFamily::Timelike => [-s * c, -s * alpha * theta.cosh()],
            CausalFamily::Spacelike => [-s * c, -alpha * theta.sinh()],
        })
    };
    let end = rk4::integrate(&mut rhs, 0.0, t, [lambda.theta, lambda.c], n.max(16))?;
    let mut out = *lambda;
    out.theta = end[0];
    out.c = end[1];
    Ok(out)
}

/// Exact endpoint of the vertical-subsystem flow after time `t`, using the
/// closed-form chart of the covector's stratum (every stratum has one).
pub fn vertical_flow(lambda: &Covector, t: f64) -> Result<Covector> {
    let nf = lambda.normal_form();
    let stratum = classify(lambda)?;
    let (theta_t, c_t) = match stratum {
        Stratum::TlC00 | Stratum::SlC7 => (nf.theta, 0.0),
        Stratum::SlC5 => (0.0, 0.0),
        Stratum::TlC0 | Stratum::SlC6 => (nf.theta - nf.c * t, nf.c),
        _ => {
            let rc = rectify(lambda)?;
            let (sh, _ch, c) = chart_point(&rc, rc.psi0 + rc.ae * t)?;
            (sh.asinh(), c)
        }
    };
    Ok(lambda.from_normal_form(theta_t, c_t))
}

/// Stratum of a covector, by the decomposition of the covector space into
/// invariant sets of the vertical subsystem. Uses [`STRATUM_ZERO_BAND`] to
/// absorb float noise on the boundaries; for `branch_sign = -1` the label
/// refers to the principal-branch normal form.
pub fn classify(lambda: &Covector) -> Result<Stratum> {
    let band = STRATUM_ZERO_BAND;
    let nf = lambda.normal_form();
    match nf.causal {
        CausalFamily::Timelike => {
            if nf.alpha.abs() <= band {
                if nf.c.abs() <= band {
                    Ok(Stratum::TlC00)
                } else {
                    Ok(Stratum::TlC0)
                }
            } else if nf.alpha > 0.0 {
                Ok(Stratum::TlCplus)
            } else {
                Ok(Stratum::TlCminus)
            }
        }
        CausalFamily::Spacelike => {
            let e = energy(&nf);
            let a = nf.alpha;
            if a.abs() <= band {
                if nf.c.abs() <= band {
                    Ok(Stratum::SlC7)
                } else {
                    Ok(Stratum::SlC6)
                }
            } else if a < 0.0 {
                // E >= -alpha holds identically here; the boundary is C5
                if (e + a).abs() <= band {
                    if nf.c.abs() <= band && nf.theta.abs() <= band {
                        Ok(Stratum::SlC5)
                    } else {
                        Ok(Stratum::SlC1)
                    }
                } else {
                    Ok(Stratum::SlC1)
                }
            } else if e + a > band {
                Ok(Stratum::SlC3)
            } else if e + a < -band {
                Ok(Stratum::SlC2)
            } else {
                let c_zero = nf.c.abs() <= band;
                let theta_zero = nf.theta.abs() <= band;
                match (c_zero, theta_zero) {
                    (true, true) => Ok(Stratum::SlC5),
                    (false, false) => Ok(Stratum::SlC4),
                    _ => Err(Error::UnresolvedBoundary(format!(
                        "E = -alpha boundary with c = {:.3e}, theta = {:.3e}: \
                         neither both inside nor both outside the zero band",
                        nf.c, nf.theta
                    ))),
                }
            }
        }
    }
}

/// Rectifying coordinates of an elliptic-stratum covector: the data
/// `(phi0, E, alpha, k2, ae, psi0)` such that the stratum chart evaluated at
/// `psi = psi0 + ae t` reproduces the vertical flow, which becomes
/// `phi' = 1, E' = 0, alpha' = 0` in these coordinates (`psi = ae phi`).
///
/// All fields refer to the principal-branch normal form of the covector.
#[derive(Clone, Copy, Debug)]
pub struct RectifiedCoords {
    pub phi0: f64,
    pub energy: f64,
    pub alpha: f64,
    /// Squared modulus of the stratum chart. The boundary stratum C4 is the
    /// hyperbolic degeneration; it carries `k2 = 1`.
    pub k2: f64,
    pub ae: f64,
    pub psi0: f64,
    pub stratum: Stratum,
    /// Frozen sign factor of the chart (sgn theta for C2 and C4, sgn c for
    /// C3); `1.0` where the chart needs none.
    pub sg: f64,
    /// The causal family of the covector this was built from.
    pub causal: CausalFamily,
    /// The branch sign of the covector this was built from.
    pub branch_sign: f64,
}

/// Evaluate the stratum chart of `rc` at argument `psi`: returns
/// `(sinh theta, cosh theta, c)` in the principal-branch normal form.
pub fn chart_point(rc: &RectifiedCoords, psi: f64) -> Result<(f64, f64, f64)> {
    match rc.stratum {
        Stratum::TlCplus | Stratum::TlCminus => chart_tl(rc.energy, rc.alpha, psi),
        Stratum::SlC1 => chart_c1(rc.energy, rc.alpha, psi),
        Stratum::SlC2 => chart_c2(rc.energy, rc.alpha, rc.sg, psi),
        Stratum::SlC3 => chart_c3(rc.energy, rc.alpha, rc.sg, psi),
        Stratum::SlC4 => chart_c4(rc.alpha, rc.sg, psi),
        s => Err(Error::Stratum(format!(
            "chart_point: no elliptic chart on {}",
            s.tag()
        ))),
    }
}

/// Timelike C+/C- chart. `ae = sqrt(sqrt(E^2+alpha^2)/2)`,
/// `k2 = 1/2 + E/(4 ae^2)`.
pub fn chart_tl(e: f64, alpha: f64, psi: f64) -> Result<(f64, f64, f64)> {
    let ae = ((e * e + alpha * alpha).sqrt() / 2.0).sqrt();
    let k2 = 0.5 + e / (4.0 * ae * ae);
    let b = jacobi(psi, k2)?;
    if b.cn.abs() <= CN_POLE_GUARD {
        return Err(Error::Domain(format!("chart pole: |cn({psi})| <= 1e-9")));
    }
    let cn2 = b.cn * b.cn;
    let cn4 = cn2 * cn2;
    let c = -alpha.signum() * 2.0 * ae * (b.sn / b.cn) * b.dn;
    let sh = 2.0 * ae * ae * (1.0 - k2 * (1.0 + cn4)) / (alpha * cn2);
    let ch = 2.0 * ae * ae * (1.0 - k2 * (1.0 - cn4)) / (alpha.abs() * cn2);
    Ok((sh, ch, c))
}

/// Spacelike C1 chart. `ae = sqrt((E-alpha)/2)`, `k2 = (E+alpha)/(E-alpha)`.
pub fn chart_c1(e: f64, alpha: f64, psi: f64) -> Result<(f64, f64, f64)> {
    let k2 = (e + alpha) / (e - alpha);
    let b = jacobi(psi, k2)?;
    let c = (2.0 * (e + alpha)).sqrt() * b.sn;
    let sh = -(e - alpha).sqrt() * (e + alpha).sqrt() * b.cn * b.dn / alpha;
    let ch = 1.0 - (e + alpha) * b.cn * b.cn / alpha;
    Ok((sh, ch, c))
}

/// Spacelike C2 chart. `ae = sqrt((alpha-E)/2)`, `k2 = 2 alpha/(alpha-E)`,
/// `sg = sgn theta` frozen on the component.
pub fn chart_c2(e: f64, alpha: f64, sg: f64, psi: f64) -> Result<(f64, f64, f64)> {
    let k2 = 2.0 * alpha / (alpha - e);
    let b = jacobi(psi, k2)?;
    if b.cn.abs() <= CN_POLE_GUARD {
        return Err(Error::Domain(format!("chart pole: |cn({psi})| <= 1e-9")));
    }
    let cn2 = b.cn * b.cn;
    let c = -sg * (2.0 * (-alpha - e)).sqrt() * b.sn / b.cn;
    let sh = sg * (-alpha - e).sqrt() * (alpha - e).sqrt() * b.dn / (alpha * cn2);
    let ch = 1.0 - (alpha + e) / (alpha * cn2);
    Ok((sh, ch, c))
}

/// Spacelike C3 chart. `ae = sqrt((E+alpha)/2)`, `k2 = (E-alpha)/(E+alpha)`
/// (any sign below 1), `sg = sgn c` frozen on the component.
pub fn chart_c3(e: f64, alpha: f64, sg: f64, psi: f64) -> Result<(f64, f64, f64)> {
    let ae = ((e + alpha) / 2.0).sqrt();
    let k2 = (e - alpha) / (e + alpha);
    let b = jacobi(psi, k2)?;
    if b.cn.abs() <= CN_POLE_GUARD {
        return Err(Error::Domain(format!("chart pole: |cn({psi})| <= 1e-9")));
    }
    let cn2 = b.cn * b.cn;
    let c = sg * 2.0 * ae * b.dn / b.cn;
    let sh = -sg * 2.0 * b.sn / cn2;
    let ch = (1.0 + b.sn * b.sn) / cn2;
    Ok((sh, ch, c))
}

/// Spacelike C4 chart (the `E = -alpha` boundary, hyperbolic functions).
/// `ae = sqrt(alpha)`, `w = alpha e^{2 psi}`, `sg = sgn theta`.
pub fn chart_c4(alpha: f64, sg: f64, psi: f64) -> Result<(f64, f64, f64)> {
    let w = alpha * (2.0 * psi).exp();
    if (w - 1.0).abs() <= CN_POLE_GUARD {
        return Err(Error::Domain(format!(
            "chart pole: alpha e^(2 psi) = {w} too close to 1"
        )));
    }
    let wm = w - 1.0;
    let c = sg * 4.0 * alpha * psi.exp() / wm;
    let sh = sg * 4.0 * w.sqrt() * (w + 1.0) / (wm * wm);
    let ch = (w * w + 6.0 * w + 1.0) / (wm * wm);
    Ok((sh, ch, c))
}

/// Verify that a candidate `psi0` reproduces the normal-form `(sinh theta, c)`
/// of the covector to 1e-9 (scale-relative).
fn verify_inversion(rc: &RectifiedCoords, sh_want: f64, c_want: f64) -> Result<()> {
    let (sh, _ch, c) = chart_point(rc, rc.psi0)?;
    let tol = 1e-9;
    if (sh - sh_want).abs() <= tol * sh_want.abs().max(1.0)
        && (c - c_want).abs() <= tol * c_want.abs().max(1.0)
    {
        Ok(())
    } else {
        Err(Error::InversionFailure(format!(
            "chart inversion residual too large on {}: sinh theta {sh} vs {sh_want}, c {c} vs {c_want}",
            rc.stratum.tag()
        )))
    }
}

/// Generic bisection + Newton polish for a strictly increasing function on
/// `(lo, hi)`; `f` also returns its derivative.
fn solve_increasing(
    mut f: impl FnMut(f64) -> Result<(f64, f64)>,
    mut lo: f64,
    mut hi: f64,
    target: f64,
) -> Result<f64> {
    let flo = f(lo)?.0;
    let fhi = f(hi)?.0;
    if !(flo <= target && target <= fhi) {
        return Err(Error::InversionFailure(format!(
            "target {target} outside bracket values [{flo}, {fhi}]"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?.0;
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (v, d) = f(x)?;
        if d.abs() < 1e-300 {
            break;
        }
        let step = (v - target) / d;
        let nx = x - step;
        if nx > lo && nx < hi {
            x = nx;
        } else {
            break;
        }
    }
    Ok(x)
}

/// Compute rectifying coordinates for a covector in one of the elliptic
/// strata (timelike C+/C-, spacelike C1..C4); stratum error otherwise.
pub fn rectify(lambda: &Covector) -> Result<RectifiedCoords> {
    let stratum = classify(lambda)?;
    let nf = lambda.normal_form();
    let e = energy(&nf);
    let alpha = nf.alpha;
    let sh_want = nf.theta.sinh();
    let c_want = nf.c;
    let margin = 1e-9;
    let mut rc = RectifiedCoords {
        phi0: 0.0,
        energy: e,
        alpha,
        k2: 0.0,
        ae: 0.0,
        psi0: 0.0,
        stratum,
        sg: 1.0,
        causal: lambda.causal,
        branch_sign: lambda.branch_sign,
    };
    match stratum {
        Stratum::TlCplus | Stratum::TlCminus => {
            let ae = ((e * e + alpha * alpha).sqrt() / 2.0).sqrt();
            let k2 = 0.5 + e / (4.0 * ae * ae);
            let kk = complete_k(k2)?;
            // c = -sgn(alpha) 2 ae sc dn, and sc dn is odd increasing on (-K, K)
            let target = -c_want / (alpha.signum() * 2.0 * ae);
            let psi0 = solve_increasing(
                |psi| {
                    let b = jacobi(psi, k2)?;
                    let cn2 = b.cn * b.cn;
                    let v = b.sn / b.cn * b.dn;
                    let d = (b.dn * b.dn - k2 * b.sn * b.sn * cn2) / cn2;
                    Ok((v, d))
                },
                -kk + margin,
                kk - margin,
                target,
            )?;
            rc.k2 = k2;
            rc.ae = ae;
            rc.psi0 = psi0;
            rc.phi0 = psi0 / ae;
        }
        Stratum::SlC1 => {
            let ae = ((e - alpha) / 2.0).sqrt();
            let k2 = (e + alpha) / (e - alpha);
            let kk = complete_k(k2)?;
            let sn0 = (c_want / (2.0 * (e + alpha)).sqrt()).clamp(-1.0, 1.0);
            // cn0 carries the sign of sinh theta here (alpha < 0)
            let base = legendre_f_inc(sn0.asin(), k2);
            let psi0 = if sh_want >= 0.0 { base } else { 2.0 * kk - base };
            // wrap into (-2K, 2K]
            let period = 4.0 * kk;
            let psi0 = psi0 - period * ((psi0 + 2.0 * kk) / period).floor();
            rc.k2 = k2;
            rc.ae = ae;
            rc.psi0 = psi0;
            rc.phi0 = psi0 / ae;
        }
        Stratum::SlC2 => {
            let ae = ((alpha - e) / 2.0).sqrt();
            let k2 = 2.0 * alpha / (alpha - e);
            let kk = complete_k(k2)?;
            let sg = nf.theta.signum();
            let target = -c_want / (sg * (2.0 * (-alpha - e)).sqrt());
            let psi0 = solve_increasing(
                |psi| {
                    let b = jacobi(psi, k2)?;
                    Ok((b.sn / b.cn, b.dn / (b.cn * b.cn)))
                },
                -kk + margin,
                kk - margin,
                target,
            )?;
            rc.k2 = k2;
            rc.ae = ae;
            rc.psi0 = psi0;
            rc.phi0 = psi0 / ae;
            rc.sg = sg;
        }
        Stratum::SlC3 => {
            let ae = ((e + alpha) / 2.0).sqrt();
            let k2 = (e - alpha) / (e + alpha);
            let kk = complete_k(k2)?;
            let sg = c_want.signum();
            // dn/cn is even, increasing in |psi| from 1; solve on [0, K)
            let target = c_want.abs() / (2.0 * ae);
            if target < 1.0 - 1e-9 {
                return Err(Error::InversionFailure(format!(
                    "C3 chart requires |c| >= 2 ae, got |c|/(2 ae) = {target}"
                )));
            }
            let u = solve_increasing(
                |psi| {
                    let b = jacobi(psi, k2)?;
                    let cn2 = b.cn * b.cn;
                    Ok((b.dn / b.cn, (1.0 - k2) * b.sn / cn2))
                },
                0.0,
                kk - margin,
                target.max(1.0),
            )?;
            let sign = if sh_want == 0.0 {
                0.0
            } else {
                -sg * sh_want.signum()
            };
            rc.k2 = k2;
            rc.ae = ae;
            rc.psi0 = sign * u;
            rc.phi0 = rc.psi0 / ae;
            rc.sg = sg;
        }
        Stratum::SlC4 => {
            let ae = alpha.sqrt();
            let sg = nf.theta.signum();
            let ch = nf.theta.cosh();
            // cosh theta = (w^2 + 6w + 1)/(w - 1)^2 is a palindromic quadratic
            // in w: roots are a reciprocal pair; w > 1 iff sgn(c) sgn(theta) > 0
            let disc = (32.0 * (ch + 1.0)).sqrt();
            let w_big = (2.0 * ch + 6.0 + disc) / (2.0 * (ch - 1.0));
            let w0 = if c_want.signum() * sg > 0.0 {
                w_big
            } else {
                1.0 / w_big
            };
            rc.k2 = 1.0;
            rc.ae = ae;
            rc.psi0 = (w0 / alpha).ln() / 2.0;
            rc.phi0 = rc.psi0 / ae;
            rc.sg = sg;
        }
        s => {
            return Err(Error::Stratum(format!(
                "rectify: {} does not rectify (no elliptic chart)",
                s.tag()
            )))
        }
    }
    verify_inversion(&rc, sh_want, c_want)?;
    Ok(rc)
}

/// Evaluate the vertical flow of the rectified covector at time `t` and map
/// it back to the original chart and branch: the inverse of [`rectify`]
/// composed with the flow `psi = psi0 + ae t`.
pub fn unrectify(lambda: &Covector, rc: &RectifiedCoords, t: f64) -> Result<Covector> {
    let (sh, _ch, c) = chart_point(rc, rc.psi0 + rc.ae * t)?;
    Ok(lambda.from_normal_form(sh.asinh(), c))
}
