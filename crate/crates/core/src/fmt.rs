//! Canonical text formatting for numbers that appear in emitted files.
//!
//! All text output (records, settings, coefficient reports, CLI tables) must
//! be byte-identical across runs and platforms, so every floating-point value
//! goes through [`float12`].

/// Formats a float with 12 significant digits in scientific notation.
///
/// Negative zero collapses to zero so that `-0` never leaks into output.
pub fn float12(x: f64) -> String {
    debug_assert!(x.is_finite(), "refusing to format non-finite value");
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::float12;

    #[test]
    fn formats_are_canonical() {
        assert_eq!(float12(1.0), "1.00000000000e0");
        assert_eq!(float12(0.5), "5.00000000000e-1");
        assert_eq!(float12(-0.0), "0.00000000000e0");
        assert_eq!(float12(0.0), "0.00000000000e0");
        assert_eq!(float12(-1.25e-3), "-1.25000000000e-3");
        assert_eq!(float12(std::f64::consts::PI), "3.14159265359e0");
    }

    #[test]
    fn round_trips_through_parse() {
        for &x in &[0.0, 1.0, -0.731, 2.5e-13, 9.999999999e9] {
            let s = float12(x);
            let back: f64 = s.parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs().max(1.0));
        }
    }
}
