// The closed-form exponential map against frozen endpoint anchors, the raw
// RK4 oracle, stratum-boundary limits, and the causal character of the
// velocity expressed in the moving frame.

mod common;

use common::{anchor_covector, horizon, one_per_stratum, EXP_ANCHORS};
use engelsl::engel::to_frame_coords;
use engelsl::expmap::{
    exp, exp_arc, exp_lightlike, lightlike_rhs, t_supr, validate_closed_forms, FormulaVariant,
};
use engelsl::rk4;
use engelsl::vertical::{chart_c1, chart_c4, chart_tl, classify, CausalFamily, Covector, Stratum};

#[test]
fn frozen_exp_anchors() {
    for &(tag, theta0, c0, alpha, t, x1, x2, y, z) in EXP_ANCHORS {
        let lambda = anchor_covector(tag, theta0, c0, alpha);
        let q = exp(&lambda, t).unwrap();
        let want = [x1, x2, y, z];
        let got = q.to_array();
        for i in 0..4 {
            assert!(
                (got[i] - want[i]).abs() < 1e-10 * want[i].abs().max(1.0),
                "{tag} component {i}: {} vs {}",
                got[i],
                want[i]
            );
        }
    }
}

#[test]
fn closed_forms_match_rk4() {
    for round in 0..3 {
        for (stratum, mut lambda) in one_per_stratum(43 + round) {
            if round == 2 {
                lambda = lambda.with_branch(-1.0);
            }
            let t_end = horizon(&lambda, 3.0);
            let rec =
                validate_closed_forms(&lambda, t_end, 24, 4000, 1e-6, FormulaVariant::Corrected)
                    .unwrap();
            assert_eq!(rec.verdict, "PASS", "stratum {stratum:?} round {round}: {rec:?}");
        }
    }
}

#[test]
fn c4_pole_and_refusal() {
    let alpha = 0.7_f64;
    let w0 = 0.4_f64;
    let psi0 = (w0 / alpha).ln() / 2.0;
    let ae = alpha.sqrt();
    let t0 = ((1.0 / alpha).ln() / 2.0 - psi0) / ae;

    let (sh, _, c) = chart_c4(alpha, 1.0, psi0).unwrap();
    let lambda = Covector::spacelike(sh.asinh(), c, alpha);
    assert_eq!(classify(&lambda).unwrap(), Stratum::SlC4);

    let ts = t_supr(&lambda).unwrap();
    assert!((ts - t0).abs() < 1e-9, "t_supr {ts} vs {t0}");

    // the trajectory leaves every compact set as t approaches the pole
    let q = exp(&lambda, 0.999 * t0).unwrap();
    assert!(q.norm_inf() > 1e2, "near-pole endpoint {q:?}");

    // requests at or within the refusal margin of the pole are rejected
    assert!(exp(&lambda, t0).is_err());
    assert!(exp(&lambda, t0 * (1.0 - 1e-9)).is_err());
    assert!(exp(&lambda, t0 + 1.0).is_err());

    // moving away from the pole (w0 > 1) the horizon is infinite
    let psi0_far = (2.5_f64 / alpha).ln() / 2.0;
    let (sh, _, c) = chart_c4(alpha, 1.0, psi0_far).unwrap();
    let far = Covector::spacelike(sh.asinh(), c, alpha);
    assert_eq!(classify(&far).unwrap(), Stratum::SlC4);
    assert!(t_supr(&far).unwrap().is_infinite());

    // all strata without a chart pole have an infinite horizon
    for l in [
        Covector::timelike(0.4, 0.0, 0.0),
        Covector::timelike(0.4, 0.7, 0.0),
        Covector::spacelike(0.3, 0.8, -1.1),
        Covector::spacelike(0.0, 0.0, 0.6),
        Covector::spacelike(0.4, -1.2, 0.0),
    ] {
        assert!(t_supr(&l).unwrap().is_infinite(), "{l:?}");
    }
}

#[test]
fn limits_match_adjacent_strata() {
    // c -> 0 joins the pendulum separatrix strata to their rest strata
    let theta0 = 0.6;
    for t in [0.3, 1.0, 2.7] {
        let near = exp(&Covector::timelike(theta0, 1e-7, 0.0), t).unwrap();
        let at = exp(&Covector::timelike(theta0, 0.0, 0.0), t).unwrap();
        assert!(near.dist_inf(at) < 1e-5, "timelike limit at t = {t}");

        let near = exp(&Covector::spacelike(theta0, 1e-7, 0.0), t).unwrap();
        let at = exp(&Covector::spacelike(theta0, 0.0, 0.0), t).unwrap();
        assert!(near.dist_inf(at) < 1e-5, "spacelike limit at t = {t}");
    }
}

#[test]
fn velocity_is_horizontal_and_unit() {
    let h = 1e-6;
    let check = |lambda: &Covector, t: f64, want_sq: f64, label: &str| {
        let qp = exp(lambda, t + h).unwrap().to_array();
        let qm = exp(lambda, t - h).unwrap().to_array();
        let q = exp(lambda, t).unwrap();
        let v = [
            (qp[0] - qm[0]) / (2.0 * h),
            (qp[1] - qm[1]) / (2.0 * h),
            (qp[2] - qm[2]) / (2.0 * h),
            (qp[3] - qm[3]) / (2.0 * h),
        ];
        let u = to_frame_coords(q, v);
        assert!(u[2].abs() < 1e-5, "{label}: u3 = {}", u[2]);
        assert!(u[3].abs() < 1e-5, "{label}: u4 = {}", u[3]);
        assert!(
            (-u[0] * u[0] + u[1] * u[1] - want_sq).abs() < 1e-5,
            "{label}: squared speed {} vs {want_sq}",
            -u[0] * u[0] + u[1] * u[1]
        );
    };

    // the two arcs pinned by explicit chart data
    let (sh, _, c) = chart_tl(0.3, 1.2, -0.2).unwrap();
    let tl = Covector::timelike(sh.asinh(), c, 1.2);
    let (sh, _, c) = chart_c1(1.4, -0.9, 0.3).unwrap();
    let sl = Covector::spacelike(sh.asinh(), c, -0.9);
    for t in [0.2, 0.5] {
        check(&tl, t, -1.0, "timelike chart sample");
        check(&sl, t, 1.0, "spacelike chart sample");
    }

    // and one random sample per stratum
    for (stratum, lambda) in one_per_stratum(53) {
        let t = 0.4 * horizon(&lambda, 2.0);
        let want = match lambda.causal {
            CausalFamily::Timelike => -1.0,
            CausalFamily::Spacelike => 1.0,
        };
        check(&lambda, t, want, stratum.tag());
    }
}

#[test]
fn lightlike_curves_are_exact() {
    for &t in &[0.1, 1.0, 2.0, 5.0] {
        let q = exp_lightlike(1.0, t);
        assert_eq!(q.x1, t);
        assert_eq!(q.x2, t);
        assert_eq!(q.y, 0.0);
        assert!((q.z - t * t * t / 3.0).abs() <= 4.0 * f64::EPSILON * (t * t * t / 3.0).abs());

        let q = exp_lightlike(-1.0, t);
        assert_eq!(q.x1, t);
        assert_eq!(q.x2, -t);
        assert_eq!(q.y, 0.0);
        assert!((q.z + t * t * t / 3.0).abs() <= 4.0 * f64::EPSILON * (t * t * t / 3.0).abs());

        for branch in [1.0, -1.0] {
            let mut rhs =
                |_t: f64, s: &[f64; 4]| -> engelsl::Result<[f64; 4]> { Ok(lightlike_rhs(branch, s)) };
            let o = rk4::integrate(&mut rhs, 0.0, t, [0.0; 4], 2000).unwrap();
            let q = exp_lightlike(branch, t).to_array();
            for i in 0..4 {
                assert!((o[i] - q[i]).abs() < 1e-10, "branch {branch} component {i}");
            }
        }
    }
}

#[test]
fn printed_variants_are_flagged() {
    let c4 = common::samples_of(61, Stratum::SlC4, 1)[0];
    let rec = validate_closed_forms(
        &c4,
        horizon(&c4, 2.0),
        24,
        4000,
        1e-6,
        FormulaVariant::PrintedC4X2,
    )
    .unwrap();
    assert_eq!(rec.verdict, "SUSPECT", "{rec:?}");

    let c7 = Covector::spacelike(1.1, 0.0, 0.0);
    let rec =
        validate_closed_forms(&c7, 2.0, 24, 4000, 1e-6, FormulaVariant::PrintedC7Z).unwrap();
    assert_eq!(rec.verdict, "SUSPECT", "{rec:?}");
    let rec = validate_closed_forms(&c7, 2.0, 24, 4000, 1e-6, FormulaVariant::Corrected).unwrap();
    assert_eq!(rec.verdict, "PASS", "{rec:?}");
}

#[test]
fn exp_arc_agrees_with_pointwise_exp() {
    for (stratum, lambda) in one_per_stratum(67) {
        let cap = horizon(&lambda, 2.0);
        let times: Vec<f64> = (1..=16).map(|i| cap * i as f64 / 16.0).collect();
        let batch = exp_arc(&lambda, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let single = exp(&lambda, t).unwrap();
            assert!(
                batch[i].dist_inf(single) < 1e-12 * single.norm_inf().max(1.0),
                "{stratum:?} at t = {t}"
            );
        }
    }
}
