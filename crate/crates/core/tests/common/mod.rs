// Shared fixtures for the integration tests: frozen oracle anchors and
// covector sampling helpers.
//
// The anchor tables were generated by an independent high-precision pipeline
// (AGM/Landen evaluation cross-checked against 30-digit arbitrary precision
// arithmetic) and are frozen here as plain literals. Tests compare the crate
// against these numbers, never the other way around.
#![allow(dead_code)]

use engelsl::validate::{sample_horizon, sample_stratum, COVECTOR_STRATA};
use engelsl::vertical::{Covector, Stratum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(psi, k2, sn, cn, dn, am, eps)` including negative squared moduli.
pub const JACOBI_ANCHORS: &[(f64, f64, f64, f64, f64, f64, f64)] = &[
    (0.3, 0.2, 0.2946763356810718, 0.9555971207520334, 0.9912785539079897, 0.2991167972335084, 0.2982382413466851),
    (0.7, 0.6, 0.6203519088371462, 0.7843235997992851, 0.8769823860952201, 0.6691913017515229, 0.6407281927329077),
    (1.9, 0.81, 0.9857330613036415, 0.16831616634462507, 0.46146242404001936, 1.4016751121984787, 1.0965151627024792),
    (3.4, 0.5, 0.3010199997800833, -0.9536178268742665, 0.9770841723547665, 2.835830569232086, 2.397879924218154),
    (-2.2, 0.95, -0.9853803843607107, 0.17036871226002112, 0.2785214950614782, -1.3995924870933327, -1.0189057319082355),
    (6.0, 0.3, -0.7370228667339779, 0.6758678080151689, 0.9148984578483932, 5.454530498466004, 4.978261391667605),
    (0.5, -0.7, 0.49163616396873533, 0.8708007132967376, 1.0812928754067168, 0.5139676774730284, 0.5286259954233085),
    (2.5, -1.9, -0.13490738475677053, -0.9908582126308934, 1.017143060084289, 3.2769126457378848, 4.453961701638428),
    (-4.0, -3.2, 0.257375630140339, 0.9663114327223202, 1.1008974011997832, -6.0228799540151154, -9.59642558429619),
    (8.5, -0.4, 0.14877600978687383, -0.988870921259138, 1.0044171048101689, 9.275447568981841, 10.156733552959322),
    (1.234, 0.999, 0.843857694896121, 0.5365670421900746, 0.5372301988662221, 1.0044326754857775, 0.844052920732359),
    (0.05, 0.004, 0.04997908608313598, 0.9987502645578095, 0.9999950041694294, 0.04999991670836497, 0.049999833416979646),
];

/// `(k2, K(k2))`.
pub const COMPLETE_K_ANCHORS: &[(f64, f64)] = &[
    (-3.5, 1.04156071196962),
    (-1.0, 1.3110287771460598),
    (-0.2, 1.5000268912867476),
    (0.0, 1.5707963267948966),
    (0.25, 1.685750354812596),
    (0.5, 1.8540746773013717),
    (0.75, 2.1565156474996434),
    (0.9, 2.578092113348173),
    (0.99, 3.6956373629898738),
    (0.9999, 5.991589340507052),
];

/// `(tag, theta0, c0, alpha, t, x1, x2, y, z)` endpoints of the exponential
/// map, one or two anchors per stratum, branch sign `+1`.
pub const EXP_ANCHORS: &[(&str, f64, f64, f64, f64, f64, f64, f64, f64)] = &[
    ("tl_c00", 0.8, 0.0, 0.0, 1.7, -2.273639408718236, 1.5097801697189592, 0.0, 1.8743599530252384),
    ("tl_c0", -0.4, 1.3, 0.0, 2.1, -8.464906574454783, -7.982904844621791, 1.450838421632999, -184.9383663307759),
    ("tl_cpm", -0.3159591606176477, 0.4785582324555866, 1.2, 0.9, -0.9593110453819924, -0.32939121041997627, -0.006106104862050231, -0.05240780572958692),
    ("tl_cpm", -0.4937512648502248, 0.3539866592724691, -0.9, 1.1, -1.6769713557413113, -1.2142004998302784, 0.11643242893566197, -0.9617813309171397),
    ("sl_c1", 1.4373235943944378, 0.6651451876978822, -0.8, 1.6, -0.9362075402868466, 2.1648729527190778, -0.6069555650952938, 2.424544572950971),
    ("sl_c2", 1.7739885756873004, -0.4947524582436365, 0.7, 0.8, -3.945193183916341, 4.0363280571033995, 0.07045341355346514, 21.30173645764433),
    ("sl_c3", 0.4011530565177386, 2.3870182348496747, 0.6, 0.9, 0.8155956657622994, 1.3663618910417272, -0.19117903362686564, 0.5240434543137329),
    ("sl_c3", 0.3016602304388059, -1.760925939259278, 1.1, 0.7, -0.8751805066338023, 1.1608385920473647, 0.06546290818436008, 0.3851154056142801),
    ("sl_c4", -2.633915793849633, -3.0983866769659336, 0.8, 1.4, 3.1141844512464347, 3.5108278931419132, 0.36632007978233133, 13.546504388912945),
    ("sl_c4", 2.981992617989617, -3.265986323710904, 0.6, 0.3548778744832808, -8.567489605860374, 8.576962610489337, 0.021573426608548586, 210.00772843024816),
    ("sl_c5", 0.0, 0.0, -1.3, 2.4, 0.0, 2.4, 0.0, 2.304),
    ("sl_c6", 0.55, -0.9, 0.0, 1.9, -4.098464901817366, 4.6235752636237235, 0.5950912608045933, 28.416481842688412),
    ("sl_c7", -1.1, 0.0, 0.0, 1.3, 1.73634171116143, 2.1690741199689336, 0.0, 2.7907904397067056),
];

/// `(name, p, k2, ae, alpha, E, value)` anchors for the Maxwell functions.
pub const F_ANCHORS: &[(&str, f64, f64, f64, f64, f64, f64)] = &[
    ("f_y", 0.4, 0.36, 1.15, 2.5391999999999997, -0.7405999999999999, 0.17076842334210096),
    ("f_y", 1.0, 0.36, 1.15, 2.5391999999999997, -0.7405999999999999, 1.3222821664309774),
    ("f1", 0.5, 0.4285714285714286, 1.1832159566199232, -0.8, 2.0, -0.018449319336461434),
    ("f1", 2.0, 0.4285714285714286, 1.1832159566199232, -0.8, 2.0, -1.121502684971878),
    ("f2", 0.4, 0.5185185185185185, 1.161895003862225, 0.7, -2.0, 0.006769814969429966),
    ("f2", 1.1, 0.5185185185185185, 1.161895003862225, 0.7, -2.0, 0.0631899411678516),
    ("f3", 0.4, 0.5714285714285714, 1.1832159566199232, 0.6, 2.2, 0.0038291859450166332),
    ("f3", 1.1, 0.5714285714285714, 1.1832159566199232, 0.6, 2.2, 0.07411971579185261),
    ("f4", 0.4, 0.3181818181818182, 1.0488088481701516, 1.1, 0.4, 0.020184456231475023),
    ("f4", 1.2, 0.3181818181818182, 1.0488088481701516, 1.1, 0.4, 0.37903350866564633),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Covector for an `EXP_ANCHORS` row.
pub fn anchor_covector(tag: &str, theta0: f64, c0: f64, alpha: f64) -> Covector {
    if tag.starts_with("tl") {
        Covector::timelike(theta0, c0, alpha)
    } else {
        Covector::spacelike(theta0, c0, alpha)
    }
}

/// One random interior covector per stratum.
pub fn one_per_stratum(seed: u64) -> Vec<(Stratum, Covector)> {
    let mut r = rng(seed);
    COVECTOR_STRATA
        .iter()
        .map(|&s| (s, sample_stratum(&mut r, s)))
        .collect()
}

/// `n` random interior covectors of one stratum.
pub fn samples_of(seed: u64, stratum: Stratum, n: usize) -> Vec<Covector> {
    let mut r = rng(seed);
    (0..n).map(|_| sample_stratum(&mut r, stratum)).collect()
}

/// Safe integration horizon: `cap`, shortened away from any finite pole.
pub fn horizon(lambda: &Covector, cap: f64) -> f64 {
    sample_horizon(lambda, cap).expect("horizon")
}
