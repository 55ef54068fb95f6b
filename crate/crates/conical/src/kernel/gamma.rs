//! Gamma function: Lanczos (g = 7, n = 9) for Re z >= 1/2, reflection below.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + x.ln()
}

/// log sin(pi z) for Im z > 0, written so that no branch cut is crossed
/// as Re z runs along the real direction.
fn log_sin_pi_upper(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let w = (2.0 * PI * i * z).exp();
    Complex64::new(0.5f64.ln(), 0.0) - i * PI * z + i * (PI / 2.0) + (Complex64::new(1.0, 0.0) - w).ln()
}

/// Principal branch of log Gamma(z).
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::PoleOfGamma(format!("{}", z.re)));
    }
    if z.im == 0.0 {
        let (lg, sign) = ln_gamma_real(z.re)?;
        let im = if sign < 0.0 { PI } else { 0.0 };
        return Ok(Complex64::new(lg, im));
    }
    if z.im < 0.0 {
        return log_gamma_complex(z.conj()).map(|v| v.conj());
    }
    if z.re >= 0.5 {
        return Ok(lanczos(z));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(Complex64::new(PI.ln(), 0.0) - log_sin_pi_upper(z) - lanczos(one - z))
}

pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    log_gamma_complex(z).map(|v| v.exp())
}

/// ln|Gamma(x)| and the sign of Gamma(x).
pub fn ln_gamma_real(x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 && x == x.round() {
        return Err(Error::PoleOfGamma(format!("{x}")));
    }
    if x >= 0.5 {
        return Ok((lanczos(Complex64::new(x, 0.0)).re, 1.0));
    }
    // Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
    let s = sin_pi(x);
    let (lg, _) = ln_gamma_real(1.0 - x)?;
    Ok((PI.ln() - s.abs().ln() - lg, s.signum()))
}

pub fn gamma_real(x: f64) -> Result<f64> {
    if x > 0.0 && x == x.round() && x <= 30.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    let (lg, s) = ln_gamma_real(x)?;
    Ok(s * lg.exp())
}

/// 1/Gamma(x), which is entire: zero at the non-positive integers.
pub fn rgamma_real(x: f64) -> f64 {
    match gamma_real(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// sin(pi x) with exact zeros at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    (PI * r).sin()
}

/// cos(pi x) with exact zeros at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}
