//! Jacobi elliptic functions and elliptic integrals.
//!
//! Everything is parametrized by the squared modulus `k2 = k^2`, which may be
//! any real number below 1; negative squared moduli arise naturally in one of
//! the spacelike strata and are handled by the real transformation to an
//! auxiliary modulus in (0,1).
//!
//! Evaluation strategy: `sn`, `cn`, `dn` and the amplitude come from the
//! descending Landen / arithmetic-geometric-mean recursion, stopped once the
//! iterated modulus drops below 1e-14. The incomplete second-kind integral
//! `eps(psi) = int_0^psi dn^2 t dt` is computed through Legendre's incomplete
//! E of the amplitude using Carlson symmetric forms, which stays accurate
//! near the quarter period where direct quadrature degrades.
//!
//! Callers that divide by `cn` (trajectory formulas have poles at the quarter
//! period) must guard `|cn| > 1e-9` themselves; this module only returns raw
//! values.

use crate::{Error, Result};

/// Stop the AGM recursion once the iterated modulus is below this.
pub const MODULUS_CUTOFF: f64 = 1e-14;

/// Values of the Jacobi functions at one argument.
///
/// `eps` is the incomplete second-kind integral `int_0^psi dn^2 t dt`; `am`
/// is the amplitude, continued continuously (not reduced mod 2 pi) so that
/// `d am / d psi = dn` globally.
#[derive(Clone, Copy, Debug)]
pub struct JacobiBundle {
    pub psi: f64,
    pub k2: f64,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub am: f64,
    pub eps: f64,
}

fn check_k2(k2: f64, what: &str) -> Result<()> {
    if !k2.is_finite() || k2 >= 1.0 {
        return Err(Error::Domain(format!(
            "{what}: squared modulus must be < 1, got {k2}"
        )));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind `K(k)` as a function of
/// `k2 = k^2 < 1` (negative values allowed), via the arithmetic-geometric
/// mean: `K = pi / (2 AGM(1, sqrt(1 - k2)))`.
pub fn complete_k(k2: f64) -> Result<f64> {
    check_k2(k2, "complete_k")?;
    let mut a = 1.0f64;
    let mut b = (1.0 - k2).sqrt();
    for _ in 0..200 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (2.0 * a))
}

/// Complete elliptic integral of the second kind `E(k)` for `k2 < 1`,
/// through the Carlson forms.
pub fn complete_e(k2: f64) -> Result<f64> {
    check_k2(k2, "complete_e")?;
    let y = 1.0 - k2;
    Ok(carlson_rf(0.0, y, 1.0) - k2 / 3.0 * carlson_rd(0.0, y, 1.0))
}

/// Carlson symmetric integral R_F(x, y, z) for nonnegative arguments with at
/// most one of them zero. Duplication algorithm with fifth-order series tail.
fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    const ERR_TOL: f64 = 0.0025;
    let (mut x, mut y, mut z) = (x, y, z);
    let mut mu;
    let (mut dx, mut dy, mut dz);
    let mut it = 0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        mu = (x + y + z) / 3.0;
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
        it += 1;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERR_TOL || it >= 100 {
            break;
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / mu.sqrt()
}

/// Carlson symmetric integral R_D(x, y, z) = R_J(x, y, z, z), z > 0.
fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    const ERR_TOL: f64 = 0.0015;
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let mut mu;
    let (mut dx, mut dy, mut dz);
    let mut it = 0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        mu = 0.2 * (x + y + 3.0 * z);
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
        it += 1;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERR_TOL || it >= 100 {
            break;
        }
    }
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    3.0 * sum
        + fac
            * (1.0 + ed * (-C1 + C5 * ed - C6 * dz * ee) + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
            / (mu * mu.sqrt())
}

/// Legendre incomplete integral of the second kind `E(phi | m)` for
/// `m in [0, 1)`, any real amplitude `phi` (quasi-periodic continuation
/// `E(phi + n pi) = E(phi) + 2 n E(m)`).
fn legendre_e_inc(phi: f64, m: f64) -> f64 {
    let n = (phi / std::f64::consts::PI).round();
    let phir = phi - n * std::f64::consts::PI;
    let s = phir.sin();
    let c = phir.cos();
    let s2 = s * s;
    let x = c * c;
    let y = 1.0 - m * s2;
    let e = s * carlson_rf(x, y, 1.0) - m / 3.0 * s * s2 * carlson_rd(x, y, 1.0);
    if n == 0.0 {
        e
    } else {
        e + 2.0 * n * complete_e(m).expect("m checked by caller")
    }
}

/// Legendre incomplete integral of the first kind `F(phi | m)` for
/// `m in [0, 1)`, any real amplitude (quasi-periodic continuation by `2K`).
pub(crate) fn legendre_f_inc(phi: f64, m: f64) -> f64 {
    let n = (phi / std::f64::consts::PI).round();
    let phir = phi - n * std::f64::consts::PI;
    let s = phir.sin();
    let c = phir.cos();
    let f = s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
    if n == 0.0 {
        f
    } else {
        f + 2.0 * n * complete_k(m).expect("m checked by caller")
    }
}

/// AGM evaluation for `m in [0, 1)`.
fn jacobi_nonneg(psi: f64, m: f64) -> JacobiBundle {
    if m < MODULUS_CUTOFF {
        // circular degeneration; dn = 1 is exact to below the cutoff
        let (sn, cn) = psi.sin_cos();
        return JacobiBundle {
            psi,
            k2: m,
            sn,
            cn,
            dn: 1.0,
            am: psi,
            eps: psi,
        };
    }
    let mut a = [0.0f64; 33];
    let mut c = [0.0f64; 33];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0usize;
    while c[n].abs() > MODULUS_CUTOFF * a[n].abs() && n < 32 {
        let an = 0.5 * (a[n] + b);
        let cn1 = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
        a[n] = an;
        c[n] = cn1;
    }
    // backward amplitude recursion
    let mut phi = (1u64 << n) as f64 * a[n] * psi;
    for i in (1..=n).rev() {
        let s = (c[i] / a[i] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    let am = phi;
    let (sn, cn) = am.sin_cos();
    let dn = (1.0 - m * sn * sn).max(0.0).sqrt();
    let eps = legendre_e_inc(am, m);
    JacobiBundle {
        psi,
        k2: m,
        sn,
        cn,
        dn,
        am,
        eps,
    }
}

/// Jacobi bundle at a negative squared modulus, through the real
/// transformation to the auxiliary modulus `kt2 = -k2/(1 - k2) in (0, 1)`:
///
/// `sn(psi, k2) = sqrt(1 - kt2) snt / dnt`, `cn = cnt / dnt`, `dn = 1 / dnt`,
/// where the tilded values are taken at argument `psi sqrt(1 - k2)`.
///
/// The amplitude keeps its winding (taken from the auxiliary amplitude), and
/// the second-kind integral transforms as
/// `eps(psi) = sqrt(1 - k2) (eps_t - kt2 snt cnt / dnt)`.
pub fn negative_modulus_transform(psi: f64, k2: f64) -> Result<JacobiBundle> {
    if !k2.is_finite() || k2 >= 0.0 {
        return Err(Error::Domain(format!(
            "negative_modulus_transform: need k2 < 0, got {k2}"
        )));
    }
    let kt2 = -k2 / (1.0 - k2);
    let f = (1.0 - k2).sqrt();
    let t = jacobi_nonneg(psi * f, kt2);
    let sn = (1.0 - kt2).sqrt() * t.sn / t.dn;
    let cn = t.cn / t.dn;
    let dn = 1.0 / t.dn;
    let a0 = sn.atan2(cn);
    let tau = 2.0 * std::f64::consts::PI;
    let am = a0 + tau * ((t.am - a0) / tau).round();
    let eps = f * (t.eps - kt2 * t.sn * t.cn / t.dn);
    Ok(JacobiBundle {
        psi,
        k2,
        sn,
        cn,
        dn,
        am,
        eps,
    })
}

/// Jacobi functions at argument `psi`, squared modulus `k2 in (-inf, 1)`.
pub fn jacobi(psi: f64, k2: f64) -> Result<JacobiBundle> {
    check_k2(k2, "jacobi")?;
    if !psi.is_finite() {
        return Err(Error::Domain(format!("jacobi: non-finite argument {psi}")));
    }
    if k2 < 0.0 {
        negative_modulus_transform(psi, k2)
    } else {
        Ok(jacobi_nonneg(psi, k2))
    }
}

/// Incomplete second-kind integral `eps(psi) = int_0^psi dn^2 t dt`.
pub fn eps_incomplete(psi: f64, k2: f64) -> Result<f64> {
    Ok(jacobi(psi, k2)?.eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_at_zero_is_half_pi() {
        assert!((complete_k(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn k_rejects_unit_modulus() {
        assert!(complete_k(1.0).is_err());
        assert!(complete_k(1.5).is_err());
        assert!(complete_k(f64::NAN).is_err());
        // just below 1 stays finite
        assert!(complete_k(1.0 - 1e-12).unwrap().is_finite());
    }

    #[test]
    fn circular_degeneration() {
        let b = jacobi(0.83, 0.0).unwrap();
        assert!((b.sn - 0.83f64.sin()).abs() < 1e-15);
        assert!((b.cn - 0.83f64.cos()).abs() < 1e-15);
        assert!((b.dn - 1.0).abs() < 1e-15);
        assert!((b.eps - 0.83).abs() < 1e-15);
    }

    #[test]
    fn near_hyperbolic_degeneration() {
        // k2 -> 1: sn -> tanh, cn, dn -> sech
        let b = jacobi(0.9, 1.0 - 1e-12).unwrap();
        assert!((b.sn - 0.9f64.tanh()).abs() < 1e-5);
        assert!((b.cn - 1.0 / 0.9f64.cosh()).abs() < 1e-5);
        assert!((b.dn - 1.0 / 0.9f64.cosh()).abs() < 1e-5);
    }

    #[test]
    fn eps_is_odd() {
        for &(psi, k2) in &[(0.7, 0.3), (1.9, 0.81), (2.5, -1.9)] {
            let p = eps_incomplete(psi, k2).unwrap();
            let m = eps_incomplete(-psi, k2).unwrap();
            assert!((p + m).abs() < 1e-13, "psi {psi} k2 {k2}");
        }
    }

    #[test]
    fn negative_modulus_transform_rejects_nonnegative() {
        assert!(negative_modulus_transform(0.3, 0.0).is_err());
        assert!(negative_modulus_transform(0.3, 0.5).is_err());
    }

    #[test]
    fn quarter_period_values() {
        for &k2 in &[0.09, 0.25, 0.49, 0.81] {
            let kk = complete_k(k2).unwrap();
            let b = jacobi(kk, k2).unwrap();
            assert!((b.sn - 1.0).abs() < 1e-10, "sn(K) k2={k2}");
            assert!(b.cn.abs() < 1e-10, "cn(K) k2={k2}");
            assert!((b.dn - (1.0 - k2).sqrt()).abs() < 1e-10, "dn(K) k2={k2}");
            // eps(K) = complete E
            assert!((b.eps - complete_e(k2).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn periodicity_4k() {
        for &k2 in &[0.3, 0.75] {
            let kk = complete_k(k2).unwrap();
            let a = jacobi(0.37, k2).unwrap();
            let b = jacobi(0.37 + 4.0 * kk, k2).unwrap();
            assert!((a.sn - b.sn).abs() < 1e-9);
            assert!((a.cn - b.cn).abs() < 1e-9);
            assert!((a.dn - b.dn).abs() < 1e-9);
        }
    }
}
