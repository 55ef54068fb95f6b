use num_complex::Complex64;

/// |(tau - shift) chi| below which the Taylor branch is used.
pub const SINC_SWITCH: f64 = 1e-2;

/// sin((tau - shift) chi) / (tau - shift), with the removable singularity
/// handled by the series chi (1 - y^2/3! + y^4/5! - y^6/7! + y^8/9!), y = (tau - shift) chi.
pub fn sinc_shifted(tau: Complex64, shift: Complex64, chi: f64) -> Complex64 {
    let x = tau - shift;
    let y = x * chi;
    if y.norm() < SINC_SWITCH {
        let y2 = y * y;
        let poly = 1.0 - y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 72.0)));
        return poly * chi;
    }
    y.sin() / x
}

/// sin(x)/x for real x.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x.sin() / x
    }
}
