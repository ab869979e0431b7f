//! Seeded self-validation suites: elliptic identities, closed forms against
//! the RK4 oracle, symmetry commutation, positivity grids, and conservation
//! of the two first integrals. The CLI `validate` command runs these and
//! exits nonzero if any named invariant fails.

use crate::elliptic::{complete_k, eps_incomplete, jacobi};
use crate::expmap::{t_supr, validate_closed_forms, FormulaVariant};
use crate::maxwell::{comparison_check, positivity_grid, ComparisonPair};
use crate::symmetry::{check_commutation, SymmetryAction};
use crate::vertical::{
    chart_c1, chart_c2, chart_c3, chart_c4, chart_tl, integrate, vertical_flow,
    vertical_flow_rk4, CausalFamily, Covector, Stratum,
};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The available suite names, in run order.
pub const SUITES: [&str; 5] = [
    "elliptic",
    "oracle",
    "symmetry",
    "positivity",
    "conservation",
];

/// One named invariant check: `passed` compares `worst` against `tol`
/// (strictly below for residuals; positivity grids must exceed it).
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSummary {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    /// Names of every failed check, for quick triage.
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Draw a covector from the named stratum, via the stratum chart where one
/// exists. The ranges keep trajectories tame enough for tight oracle
/// comparisons. Returns principal-branch covectors.
pub fn sample_stratum<R: Rng>(rng: &mut R, stratum: Stratum) -> Covector {
    let sign = |r: &mut R| -> f64 {
        if r.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    };
    match stratum {
        Stratum::TlC00 => Covector::timelike(rng.random_range(-2.0..2.0), 0.0, 0.0),
        Stratum::TlC0 => {
            let theta = rng.random_range(-0.6..0.6);
            let c = sign(rng) * rng.random_range(0.25..0.8);
            Covector::timelike(theta, c, 0.0)
        }
        Stratum::TlCplus | Stratum::TlCminus => {
            let dir: f64 = if stratum == Stratum::TlCplus { 1.0 } else { -1.0 };
            let alpha: f64 = dir * rng.random_range(0.5..1.8);
            let e = rng.random_range(-1.5..1.5);
            let ae = ((e * e + alpha * alpha).sqrt() / 2.0).sqrt();
            let k2 = 0.5 + e / (4.0 * ae * ae);
            let kk = complete_k(k2).expect("k2 in (0,1)");
            // keep a fixed distance from the cn poles at +-K: the chart
            // blows up as 1/cn^2 there and the oracle comparisons are
            // absolute, so near-pole starts inflate the error budget
            let psi0 = rng.random_range(-kk + 0.35..kk - 0.35);
            let (sh, _ch, c) = chart_tl(e, alpha, psi0).expect("interior psi0");
            Covector::timelike(sh.asinh(), c, alpha)
        }
        Stratum::SlC1 => {
            let alpha = -rng.random_range(0.4..1.5);
            let e = -alpha + rng.random_range(0.1..3.0);
            let psi0 = rng.random_range(-3.0..3.0);
            let (sh, _ch, c) = chart_c1(e, alpha, psi0).expect("C1 chart is global");
            Covector::spacelike(sh.asinh(), c, alpha)
        }
        Stratum::SlC2 => {
            let alpha = rng.random_range(0.3..1.5);
            let e = -alpha - rng.random_range(0.15..3.0);
            let sg = sign(rng);
            let k2 = 2.0 * alpha / (alpha - e);
            let kk = complete_k(k2).expect("k2 in (0,1)");
            let psi0 = rng.random_range(-kk + 0.35..kk - 0.35);
            let (sh, _ch, c) = chart_c2(e, alpha, sg, psi0).expect("interior psi0");
            Covector::spacelike(sh.asinh(), c, alpha)
        }
        Stratum::SlC3 => {
            let alpha = rng.random_range(0.3..1.5);
            let e = if rng.random::<bool>() {
                alpha + rng.random_range(0.1..2.5) // k2 in (0,1)
            } else {
                rng.random_range(-alpha + 0.1..alpha - 0.05) // k2 < 0
            };
            let sg = sign(rng);
            let k2 = (e - alpha) / (e + alpha);
            let kk = complete_k(k2).expect("k2 below 1");
            // the C3 chart grows as 2/cn^2 regardless of modulus, so it
            // needs the widest pole margin of the three cn-divided charts
            let psi0 = rng.random_range(-kk + 0.5..kk - 0.5);
            let (sh, _ch, c) = chart_c3(e, alpha, sg, psi0).expect("interior psi0");
            Covector::spacelike(sh.asinh(), c, alpha)
        }
        Stratum::SlC4 => {
            let alpha: f64 = rng.random_range(0.4..1.8);
            // w0 < 1 means a finite explosion time; keep the band below 0.55
            // so an arc run to nine tenths of that time tops out near
            // theta ~ 8.5. Beyond that the raw costates reach cosh(theta)
            // ~ 1e4 and the H-conservation diagnostic drowns in the f64
            // floor eps*cosh^2 even though the integration itself is fine.
            let w0: f64 = if rng.random::<bool>() {
                rng.random_range(0.2..0.55)
            } else {
                rng.random_range(1.45..6.0)
            };
            let sg = sign(rng);
            let psi0 = (w0 / alpha).ln() / 2.0;
            let (sh, _ch, c) = chart_c4(alpha, sg, psi0).expect("w0 away from 1");
            Covector::spacelike(sh.asinh(), c, alpha)
        }
        Stratum::SlC5 => Covector::spacelike(0.0, 0.0, sign(rng) * rng.random_range(0.4..1.5)),
        Stratum::SlC6 => {
            let theta = rng.random_range(-0.6..0.6);
            let c = sign(rng) * rng.random_range(0.25..0.8);
            Covector::spacelike(theta, c, 0.0)
        }
        Stratum::SlC7 => Covector::spacelike(rng.random_range(-2.0..2.0), 0.0, 0.0),
        Stratum::LightPlus | Stratum::LightMinus => {
            unreachable!("lightlike trajectories carry no covector")
        }
    }
}

/// The ten covector strata, in report order.
pub const COVECTOR_STRATA: [Stratum; 10] = [
    Stratum::TlC00,
    Stratum::TlC0,
    Stratum::TlCplus,
    Stratum::TlCminus,
    Stratum::SlC1,
    Stratum::SlC2,
    Stratum::SlC3,
    Stratum::SlC4,
    Stratum::SlC5,
    Stratum::SlC6,
];

/// A comparison horizon strictly inside the domain: `min(cap, 0.9 t_supr)`.
pub fn sample_horizon(lambda: &Covector, cap: f64) -> Result<f64> {
    Ok(cap.min(0.9 * t_supr(lambda)?))
}

fn residual_check(name: &str, worst: f64, default_tol: f64, tol_override: Option<f64>) -> CheckResult {
    let tol = tol_override.unwrap_or(default_tol);
    CheckResult {
        name: name.to_string(),
        worst,
        tol,
        passed: worst < tol,
        detail: None,
    }
}

fn suite_elliptic(rng: &mut ChaCha8Rng, tol_override: Option<f64>) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    let mut worst_id = 0.0f64;
    for _ in 0..2000 {
        let psi = rng.random_range(-8.0..8.0);
        let k2 = rng.random_range(-3.0..0.999);
        let b = jacobi(psi, k2)?;
        worst_id = worst_id
            .max((b.sn * b.sn + b.cn * b.cn - 1.0).abs())
            .max((b.dn * b.dn + k2 * b.sn * b.sn - 1.0).abs());
    }
    checks.push(residual_check("jacobi-identities", worst_id, 1e-12, tol_override));

    let mut worst_eps = 0.0f64;
    let h = 1e-6;
    for _ in 0..200 {
        let psi = rng.random_range(-3.0..3.0);
        let k2 = rng.random_range(-2.0..0.95);
        let fd = (eps_incomplete(psi + h, k2)? - eps_incomplete(psi - h, k2)?) / (2.0 * h);
        let dn = jacobi(psi, k2)?.dn;
        worst_eps = worst_eps.max((fd - dn * dn).abs() / (dn * dn).max(1.0));
    }
    checks.push(residual_check("eps-derivative-vs-dn2", worst_eps, 1e-6, tol_override));

    let k0 = (complete_k(0.0)? - std::f64::consts::FRAC_PI_2).abs();
    checks.push(residual_check("complete-k-at-zero", k0, 1e-14, tol_override));

    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteResult {
        suite: "elliptic".into(),
        checks,
        passed,
    })
}

fn suite_oracle(rng: &mut ChaCha8Rng, tol_override: Option<f64>) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    for stratum in COVECTOR_STRATA {
        let mut worst = 0.0f64;
        for _ in 0..2 {
            let lambda = sample_stratum(rng, stratum);
            let t_end = sample_horizon(&lambda, 3.0)?;
            let rec = validate_closed_forms(
                &lambda,
                t_end,
                24,
                4000,
                tol_override.unwrap_or(1e-6),
                FormulaVariant::Corrected,
            )?;
            worst = worst
                .max(rec.max_err.x1)
                .max(rec.max_err.x2)
                .max(rec.max_err.y)
                .max(rec.max_err.z);
        }
        checks.push(residual_check(
            &format!("closed-form-vs-rk4-{}", stratum.tag()),
            worst,
            1e-6,
            tol_override,
        ));
    }

    // the defective printed variants must be flagged SUSPECT
    for (name, stratum, variant) in [
        ("printed-c4-x2-flagged", Stratum::SlC4, FormulaVariant::PrintedC4X2),
        ("printed-c7-z-flagged", Stratum::SlC7, FormulaVariant::PrintedC7Z),
    ] {
        let lambda = sample_stratum(rng, stratum);
        let t_end = sample_horizon(&lambda, 3.0)?;
        let rec = validate_closed_forms(
            &lambda,
            t_end,
            24,
            4000,
            tol_override.unwrap_or(1e-6),
            variant,
        )?;
        let worst = rec
            .max_err
            .x1
            .max(rec.max_err.x2)
            .max(rec.max_err.y)
            .max(rec.max_err.z);
        checks.push(CheckResult {
            name: name.into(),
            worst,
            tol: tol_override.unwrap_or(1e-6),
            passed: rec.verdict == "SUSPECT",
            detail: Some("defective printed reading; expected verdict SUSPECT".into()),
        });
    }

    // C4 chart: the hyperbolic (cosh) reading of the boundary chart is the
    // validated one; compare the chart flow against the RK4 vertical flow
    let lambda = sample_stratum(rng, Stratum::SlC4);
    let t = sample_horizon(&lambda, 1.5)?;
    let flowed = vertical_flow(&lambda, t)?;
    let oracle = vertical_flow_rk4(&lambda, t, 4000)?;
    let worst = (flowed.theta - oracle.theta)
        .abs()
        .max((flowed.c - oracle.c).abs());
    checks.push(CheckResult {
        name: "c4-hyperbolic-cosh-reading".into(),
        worst,
        tol: tol_override.unwrap_or(1e-8),
        passed: worst < tol_override.unwrap_or(1e-8),
        detail: Some(
            "boundary chart read with cosh(theta); the trigonometric reading \
             disagrees with the vertical flow and is rejected"
                .into(),
        ),
    });

    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteResult {
        suite: "oracle".into(),
        checks,
        passed,
    })
}

fn suite_symmetry(rng: &mut ChaCha8Rng, tol_override: Option<f64>) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    let mut worst_by_action = [0.0f64; 4];
    for round in 0..4 {
        for stratum in COVECTOR_STRATA {
            let mut lambda = sample_stratum(rng, stratum);
            if round % 2 == 1 {
                lambda = lambda.with_branch(-1.0);
            }
            let t = sample_horizon(&lambda, 1.2)?.min(0.5 * t_supr(&lambda)?);
            for action in SymmetryAction::ALL {
                let r = check_commutation(action, &lambda, t)?;
                worst_by_action[action.index()] = worst_by_action[action.index()].max(r);
            }
        }
    }
    for action in SymmetryAction::ALL {
        checks.push(residual_check(
            &format!("commutation-eps{}", action.index()),
            worst_by_action[action.index()],
            1e-8,
            tol_override,
        ));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteResult {
        suite: "symmetry".into(),
        checks,
        passed,
    })
}

fn suite_positivity(tol_override: Option<f64>) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    let pairs = [
        (ComparisonPair::FyOverG, "fy"),
        (ComparisonPair::F2OverDn, "f2"),
        (ComparisonPair::F3OverCnDn, "f3"),
        (ComparisonPair::F4OverCn, "f4"),
    ];
    for (pair, name) in pairs {
        let mut min = f64::INFINITY;
        for k in [0.1, 0.3, 0.5, 0.7, 0.9] {
            min = min.min(positivity_grid(pair, k * k, 512)?);
        }
        checks.push(CheckResult {
            name: format!("positivity-grid-{name}"),
            worst: min,
            tol: tol_override.unwrap_or(0.0),
            passed: min > tol_override.unwrap_or(0.0),
            detail: Some("grid minimum must stay positive".into()),
        });
        let res = comparison_check(pair, if pair == ComparisonPair::F4OverCn { 0.37 } else { 0.49 }, 64)?;
        checks.push(residual_check(
            &format!("comparison-derivative-{name}"),
            res,
            1e-5,
            tol_override,
        ));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteResult {
        suite: "positivity".into(),
        checks,
        passed,
    })
}

fn suite_conservation(rng: &mut ChaCha8Rng, tol_override: Option<f64>) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    let mut worst_h = 0.0f64;
    let mut worst_e = 0.0f64;
    let mut worst_pendulum = 0.0f64;
    for stratum in COVECTOR_STRATA {
        let lambda = sample_stratum(rng, stratum);
        let t_end = sample_horizon(&lambda, 2.0)?;
        let arc = integrate(&lambda, t_end, 2000)?;
        worst_h = worst_h.max(arc.h_drift);
        worst_e = worst_e.max(arc.e_drift);
        // second difference of theta against the pendulum equation, on a
        // shorter arc with a finer step so the O(h^2) truncation of the
        // stencil stays well under the tolerance even near chart poles
        let t_pend = sample_horizon(&lambda, 1.2)?.min(0.55 * arc.t_supr);
        let arc = integrate(&lambda, t_pend, 4000)?;
        let hstep = arc.times[1] - arc.times[0];
        let s = lambda.branch_sign;
        for i in 1..arc.theta.len() - 1 {
            let acc = (arc.theta[i + 1] - 2.0 * arc.theta[i] + arc.theta[i - 1]) / (hstep * hstep);
            let want = match lambda.causal {
                CausalFamily::Timelike => lambda.alpha * arc.theta[i].cosh(),
                CausalFamily::Spacelike => s * lambda.alpha * arc.theta[i].sinh(),
            };
            worst_pendulum = worst_pendulum.max((acc - want).abs() / want.abs().max(1.0));
        }
    }
    checks.push(residual_check("hamiltonian-drift", worst_h, 1e-8, tol_override));
    checks.push(residual_check("energy-drift", worst_e, 1e-8, tol_override));
    checks.push(residual_check(
        "pendulum-second-difference",
        worst_pendulum,
        1e-5,
        tol_override,
    ));
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteResult {
        suite: "conservation".into(),
        checks,
        passed,
    })
}

/// Run the validation suites (all, or the one named in `only`) with the
/// given RNG seed. `tol_override` replaces every default tolerance; driving
/// it to an absurd value (for example `1e-16`) is the supported negative
/// control for the harness itself.
pub fn run(seed: u64, only: Option<&str>, tol_override: Option<f64>) -> Result<ValidationSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = Vec::new();
    for name in SUITES {
        if let Some(o) = only {
            if o != name {
                continue;
            }
        }
        let suite = match name {
            "elliptic" => suite_elliptic(&mut rng, tol_override)?,
            "oracle" => suite_oracle(&mut rng, tol_override)?,
            "symmetry" => suite_symmetry(&mut rng, tol_override)?,
            "positivity" => suite_positivity(tol_override)?,
            "conservation" => suite_conservation(&mut rng, tol_override)?,
            _ => unreachable!(),
        };
        suites.push(suite);
    }
    if suites.is_empty() {
        return Err(crate::Error::Domain(format!(
            "unknown suite {:?}; expected one of {:?}",
            only, SUITES
        )));
    }
    let failures: Vec<String> = suites
        .iter()
        .flat_map(|s| s.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()))
        .collect();
    let passed = failures.is_empty();
    Ok(ValidationSummary {
        seed,
        suites,
        failures,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertical::classify;

    #[test]
    fn samplers_land_in_their_stratum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for stratum in COVECTOR_STRATA {
            for _ in 0..20 {
                let l = sample_stratum(&mut rng, stratum);
                assert_eq!(classify(&l).unwrap(), stratum, "{l:?}");
            }
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run(0, Some("nonsense"), None).is_err());
    }
}
