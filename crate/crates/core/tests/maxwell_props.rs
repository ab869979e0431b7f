// The Maxwell-set machinery: frozen anchors for the f-functions, the
// factored endpoint forms against the plain closed forms, positivity grids,
// derivative displays, small-argument asymptotics, the C1 time ordering, and
// the cut-time bounds.

mod common;

use common::{samples_of, F_ANCHORS};
use engelsl::elliptic::complete_k;
use engelsl::expmap::{exp, t_supr};
use engelsl::maxwell::{
    c3_hat_units, comparison_check, cut_time_bound, f1, f1_first_root, f2, f2_printed, f3, f4,
    f4_printed, f_y, maxwell_report, maxwell_times, midpoint_coords, positivity_grid,
    xy_factored_c1, xy_factored_c2, xy_factored_c3, xy_factored_c3_hat, y_factored_tl,
    ComparisonPair,
};
use engelsl::vertical::{energy, rectify, Covector, Stratum};
use engelsl::Error;
use rand::Rng;

#[test]
fn frozen_f_anchors() {
    for &(name, p, k2, ae, alpha, e, want) in F_ANCHORS {
        let got = match name {
            "f_y" => f_y(p, k2, ae, alpha).unwrap(),
            "f1" => f1(p, k2, ae, alpha).unwrap(),
            "f2" => f2(p, k2, ae, e).unwrap(),
            "f3" => f3(p, k2).unwrap(),
            "f4" => f4(p, k2).unwrap(),
            other => panic!("unknown anchor {other}"),
        };
        assert!(
            (got - want).abs() < 1e-12 * want.abs().max(1.0),
            "{name}({p}) = {got} vs {want}"
        );
    }
}

#[test]
fn printed_variants_differ_materially() {
    // the printed f2 swaps the time factor for the elliptic integral, the
    // printed f4 carries the opposite sign; both are retained for comparison
    let (p, k2, ae) = (1.1, 0.5185185185185185, 1.161895003862225);
    let corrected = f2(p, k2, ae, -2.0).unwrap();
    let printed = f2_printed(p, k2, ae).unwrap();
    assert!((corrected - printed).abs() > 1e-3);

    let (p, k2) = (1.2, 0.3181818181818182);
    assert!((f4(p, k2).unwrap() + f4_printed(p, k2).unwrap()).abs() < 1e-15);
    assert!(f4(p, k2).unwrap() > 0.0);
}

#[test]
fn factored_forms_match_endpoints() {
    // timelike rotating strata: y factors through f_y
    for stratum in [Stratum::TlCplus, Stratum::TlCminus] {
        for lambda in samples_of(103, stratum, 10) {
            let t = 0.8 * common::horizon(&lambda, 1.6);
            let nf = lambda.normal_form();
            let m = midpoint_coords(&nf, t).unwrap();
            let rc = rectify(&nf).unwrap();
            let q = exp(&nf, t).unwrap();
            let y = y_factored_tl(m.tau, m.p, m.k2, m.ae, rc.alpha).unwrap();
            assert!(
                (y - q.y).abs() < 1e-8 * q.y.abs().max(1.0),
                "{stratum:?}: factored y {y} vs {}",
                q.y
            );
        }
    }

    // C1: both x1 and y
    for lambda in samples_of(107, Stratum::SlC1, 10) {
        let t = 0.8 * common::horizon(&lambda, 1.6);
        let m = midpoint_coords(&lambda, t).unwrap();
        let rc = rectify(&lambda).unwrap();
        let e = energy(&lambda);
        let q = exp(&lambda, t).unwrap();
        let (x1, y) = xy_factored_c1(m.tau, m.p, m.k2, m.ae, rc.alpha, e).unwrap();
        assert!((x1 - q.x1).abs() < 1e-8 * q.x1.abs().max(1.0), "C1 x1");
        assert!((y - q.y).abs() < 1e-8 * q.y.abs().max(1.0), "C1 y");
    }

    // C2
    for lambda in samples_of(109, Stratum::SlC2, 10) {
        let t = 0.8 * common::horizon(&lambda, 1.6);
        let m = midpoint_coords(&lambda, t).unwrap();
        let rc = rectify(&lambda).unwrap();
        let e = energy(&lambda);
        let q = exp(&lambda, t).unwrap();
        let (x1, y) = xy_factored_c2(m.tau, m.p, m.k2, m.ae, rc.alpha, e, rc.sg).unwrap();
        assert!((x1 - q.x1).abs() < 1e-8 * q.x1.abs().max(1.0), "C2 x1");
        assert!((y - q.y).abs() < 1e-8 * q.y.abs().max(1.0), "C2 y");
    }

    // C3, both modulus signs; negative native modulus goes through hat-units
    let mut positive = 0;
    let mut negative = 0;
    for lambda in samples_of(113, Stratum::SlC3, 24) {
        let t = 0.8 * common::horizon(&lambda, 1.6);
        let m = midpoint_coords(&lambda, t).unwrap();
        let rc = rectify(&lambda).unwrap();
        let e = energy(&lambda);
        let q = exp(&lambda, t).unwrap();
        if rc.k2 > 0.0 {
            positive += 1;
            let (x1, y) = xy_factored_c3(m.tau, m.p, m.k2, m.ae, rc.sg).unwrap();
            assert!((x1 - q.x1).abs() < 1e-8 * q.x1.abs().max(1.0), "C3 x1");
            assert!((y - q.y).abs() < 1e-8 * q.y.abs().max(1.0), "C3 y");
        } else {
            negative += 1;
            let (k2_h, ae_h) = c3_hat_units(e, rc.alpha);
            let scale = ae_h / m.ae;
            let (x1, y) =
                xy_factored_c3_hat(m.tau * scale, m.p * scale, k2_h, ae_h, rc.alpha, e, rc.sg)
                    .unwrap();
            assert!((x1 - q.x1).abs() < 1e-8 * q.x1.abs().max(1.0), "C3 hat x1");
            assert!((y - q.y).abs() < 1e-8 * q.y.abs().max(1.0), "C3 hat y");
        }
    }
    assert!(positive >= 4 && negative >= 4, "{positive} / {negative}");
}

#[test]
fn positivity_grids_stay_positive() {
    for pair in [
        ComparisonPair::FyOverG,
        ComparisonPair::F2OverDn,
        ComparisonPair::F3OverCnDn,
        ComparisonPair::F4OverCn,
    ] {
        for k in [0.3, 0.7] {
            let min = positivity_grid(pair, k * k, 2000).unwrap();
            assert!(min > 0.0, "{pair:?} at k = {k}: min {min}");
        }
    }
}

#[test]
fn comparison_derivative_displays() {
    for (pair, k2) in [
        (ComparisonPair::FyOverG, 0.49),
        (ComparisonPair::F2OverDn, 0.49),
        (ComparisonPair::F3OverCnDn, 0.49),
        (ComparisonPair::F4OverCn, 0.37),
    ] {
        let worst = comparison_check(pair, k2, 64).unwrap();
        assert!(worst < 1e-5, "{pair:?}: residual {worst:.3e}");
    }
}

#[test]
fn small_argument_cubics() {
    let p = 1e-3;
    let mut r = common::rng(127);
    for _ in 0..20 {
        let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
        let alpha: f64 = sign * r.random_range(0.3..2.0);
        let e: f64 = r.random_range(-2.0..2.0);
        let ae = ((e * e + alpha * alpha).sqrt() / 2.0).sqrt();
        let k2 = 0.5 + e / (4.0 * ae * ae);
        let want = 4.0 / 3.0 * alpha * alpha * k2;
        let got = f_y(p, k2, ae, alpha).unwrap() / (p * p * p);
        assert!((got / want - 1.0).abs() < 0.01, "f_y cubic: {got} vs {want}");
    }
    for _ in 0..20 {
        let alpha: f64 = r.random_range(0.2..2.0);
        let e: f64 = -alpha - r.random_range(0.1..4.0);
        let ae = ((alpha - e) / 2.0).sqrt();
        let k2 = 2.0 * alpha / (alpha - e);
        let want = alpha * k2 / 3.0;
        let got = f2(p, k2, ae, e).unwrap() / (p * p * p);
        assert!((got / want - 1.0).abs() < 0.01, "f2 cubic: {got} vs {want}");
    }
    for _ in 0..20 {
        let alpha: f64 = r.random_range(0.2..2.0);
        let e: f64 = alpha + r.random_range(0.1..5.0);
        let ae = ((e + alpha) / 2.0).sqrt();
        let k2 = (e - alpha) / (e + alpha);
        let want = alpha * alpha / (3.0 * ae.powi(4));
        let got = f3(p, k2).unwrap() / (p * p * p);
        assert!((got / want - 1.0).abs() < 0.01, "f3 cubic: {got} vs {want}");
    }
    let got = f4(p, 0.37).unwrap() / (p * p * p);
    assert!((got * 3.0 - 1.0).abs() < 0.01, "f4 cubic: {got}");
}

#[test]
fn c1_first_root_beyond_half_period() {
    let mut r = common::rng(131);
    for i in 0..100 {
        let alpha: f64 = -r.random_range(0.2..2.0);
        let e: f64 = -alpha + r.random_range(0.05..6.0);
        let ae = ((e - alpha) / 2.0).sqrt();
        let k2 = (e + alpha) / (e - alpha);
        let kq = complete_k(k2).unwrap();
        let p1 = f1_first_root(k2, ae, alpha).unwrap();
        assert!(
            p1 > 2.0 * kq,
            "sample {i}: first f1 root {p1} not beyond 2K = {}",
            2.0 * kq
        );
    }
}

#[test]
fn maxwell_times_per_stratum() {
    for lambda in samples_of(137, Stratum::SlC1, 5) {
        let entries = maxwell_times(&lambda).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].symmetry, 1);
        assert_eq!(entries[0].status, "time");
        assert_eq!(entries[1].symmetry, 2);
        assert_eq!(entries[1].status, "time");
        let t1 = entries[0].time.unwrap();
        let t2 = entries[1].time.unwrap();
        assert!(t2 < t1, "second reflection must strike first: {t2} vs {t1}");
        // and the time ordering is what the cut bound reports
        let bound = cut_time_bound(&lambda).unwrap();
        assert_eq!(bound.kind, "c1-theorem");
        assert!((bound.value.unwrap() - t2).abs() < 1e-12);
    }

    for stratum in [Stratum::TlCplus, Stratum::TlCminus] {
        for lambda in samples_of(139, stratum, 3) {
            let entries = maxwell_times(&lambda).unwrap();
            assert_eq!(entries.len(), 1);
            assert_eq!(entries[0].symmetry, 2);
            assert_eq!(entries[0].status, "empty");
            assert_eq!(cut_time_bound(&lambda).unwrap().kind, "unbounded");
        }
    }

    for stratum in [Stratum::SlC2, Stratum::SlC3] {
        for lambda in samples_of(149, stratum, 4) {
            let entries = maxwell_times(&lambda).unwrap();
            assert_eq!(entries.len(), 2);
            assert!(entries.iter().all(|e| e.status == "empty"));
            let bound = cut_time_bound(&lambda).unwrap();
            assert_eq!(bound.kind, "t-supr");
            assert!((bound.value.unwrap() - t_supr(&lambda).unwrap()).abs() < 1e-12);
        }
    }

    // no Maxwell analysis off the four stratum families, but still a report
    let c5 = Covector::spacelike(0.0, 0.0, 0.6);
    assert!(matches!(maxwell_times(&c5), Err(Error::Stratum(_))));
    let report = maxwell_report(&c5).unwrap();
    assert!(report.maxwell.is_empty());
    assert_eq!(report.cut_bound.kind, "unbounded");
    assert_eq!(report.t_supr, None);

    // C2 reports carry the finite explosion time
    let lambda = samples_of(151, Stratum::SlC2, 1)[0];
    let report = maxwell_report(&lambda).unwrap();
    assert!(report.t_supr.unwrap().is_finite());
}
