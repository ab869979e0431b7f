//! Small numeric helpers shared across modules.

/// `sinh(x) - x`, evaluated without cancellation for small `x`.
///
/// The naive difference loses all significant digits for `|x| < ~1e-5`,
/// which poisons trajectory formulas that divide the difference by `x^3`.
/// Below 0.1 the Maclaurin tail `x^3/6 (1 + x^2/20 (1 + x^2/42 (1 + x^2/72)))`
/// is accurate to full precision.
pub fn sinh_minus_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)))
    } else {
        x.sinh() - x
    }
}

/// Format a float with 17 significant digits, enough to round-trip any f64
/// exactly through parsing.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_minus_x_matches_naive_for_moderate_x() {
        for &x in &[0.2, 0.5, -1.3, 2.0] {
            assert!((sinh_minus_x(x) - (x.sinh() - x)).abs() < 1e-14 * x.sinh().abs().max(1.0));
        }
    }

    #[test]
    fn sinh_minus_x_small_argument_leading_term() {
        // relative agreement with x^3/6 (1 + x^2/20) near zero
        for &x in &[1e-3, -1e-4, 1e-6] {
            let want = x * x * x / 6.0 * (1.0 + x * x / 20.0);
            let got = sinh_minus_x(x);
            assert!((got - want).abs() <= 1e-12 * want.abs());
        }
    }

    #[test]
    fn fmt_g17_round_trips() {
        for &v in &[0.1, 1.0 / 3.0, -2.5e-17, 6.02e23, f64::MIN_POSITIVE] {
            let s = fmt_g17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }
}
