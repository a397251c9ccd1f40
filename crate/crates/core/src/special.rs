//! Log-gamma evaluation, including a signed variant for negative arguments.

use std::f64::consts::PI;

/// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.9999999999998099,
    676.520_368_121_885_1,
    -1259.1392167224028,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
///
/// # Panics
/// Panics if `x <= 0`; use [`ln_gamma_signed`] there.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x < 0.5 {
        // Reflection keeps the Lanczos series in its accurate range.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `(ln |Gamma(x)|, sign of Gamma(x))` for any non-pole argument; `None` at
/// the poles (zero and the negative integers).
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((ln_gamma(x), 1.0));
    }
    if x == x.floor() {
        return None;
    }
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    let s = (PI * x).sin();
    let val = (PI / s.abs()).ln() - ln_gamma(1.0 - x);
    Some((val, s.signum()))
}
