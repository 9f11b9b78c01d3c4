//! Small numeric helpers shared by the closed-form and oracle paths.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Unnormalized sinc, `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let wrapped = (phase + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

/// `-2 pi num / den` for integers, reduced modulo `den` before converting to
/// floating point and wrapped to `(-pi, pi]`.
pub fn rational_phase(num: i128, den: usize) -> f64 {
    let den = den as i128;
    let r = num.rem_euclid(den);
    wrap_phase(-2.0 * PI * r as f64 / den as f64)
}

/// Zero-order-hold response of a hold lasting `1/len` of the period, at
/// harmonic `k` of that period: `sinc(pi k/len) e^{-j pi k/len}`.
pub fn hold_response(k: f64, len: f64) -> Complex64 {
    let x = PI * k / len;
    Complex64::from_polar(sinc(x), -x)
}

pub fn power_db(power: f64) -> f64 {
    10.0 * power.log10()
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(PI / 2.0) - 2.0 / PI).abs() < 1e-15);
        assert!(sinc(PI).abs() < 1e-15);
        assert_eq!(sinc(-1.3), sinc(1.3));
    }

    #[test]
    fn wrap_into_half_open_interval() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_phase(0.0), 0.0);
        assert!((wrap_phase(-7.0 * PI / 4.0) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn rational_phase_reduces_exactly() {
        assert_eq!(rational_phase(0, 8), 0.0);
        assert!((rational_phase(1, 8) + PI / 4.0).abs() < 1e-15);
        assert!((rational_phase(-3, 8) - 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(rational_phase(4, 8), PI);
        assert_eq!(rational_phase(1_000_000_001, 8), rational_phase(1, 8));
    }

    #[test]
    fn lcm_gcd() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(lcm(1, 7), 7);
    }
}
