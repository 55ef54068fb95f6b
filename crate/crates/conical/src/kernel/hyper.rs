//! Gauss and Kummer hypergeometric series.

use super::dd::Dd;
use crate::error::{Error, Result};
use num_complex::Complex64;

fn nonpositive_integer(c: Complex64) -> bool {
    c.im == 0.0 && c.re <= 0.0 && c.re == c.re.round()
}

/// 2F1(a, b; c; z) for |z| < 1 by the Gauss series.
pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideConvergenceDisk(z.norm()));
    }
    if nonpositive_integer(c) {
        return Err(Error::PoleOfGamma(format!("c = {}", c.re)));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let budget = 200_000usize;
    let mut quiet = 0;
    for k in 0..budget {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == Complex64::new(0.0, 0.0) {
            return Ok(sum);
        }
        if term.norm() <= 1e-17 * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(format!("2F1 series did not settle in {budget} terms")))
}

/// Kummer series with non-negative real argument, returned as (mantissa, ln scale).
fn kummer_positive(a: f64, c: f64, y: f64) -> Result<(f64, f64)> {
    const BIG: f64 = 1e280;
    let ln_big = BIG.ln();
    let mut sum = Dd::new(1.0);
    let mut term = Dd::new(1.0);
    let mut log_scale = 0.0;
    if y > 1e7 {
        return Err(Error::NonConvergence(format!("1F1 argument {y} beyond term budget")));
    }
    let budget = 2_000 + (4.0 * y) as usize;
    let mut quiet = 0;
    for k in 0..budget {
        let kf = k as f64;
        let factor = (a + kf) / (c + kf) * y / (kf + 1.0);
        term = term * Dd::new(factor);
        sum = sum + term;
        if term.hi == 0.0 {
            return Ok((sum.to_f64(), log_scale));
        }
        if sum.hi.abs() > BIG {
            sum = sum * Dd::new(1.0 / BIG);
            term = term * Dd::new(1.0 / BIG);
            log_scale += ln_big;
        }
        if kf > y && term.hi.abs() <= 1e-32 * sum.hi.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok((sum.to_f64(), log_scale));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(format!("1F1 series did not settle in {budget} terms")))
}

/// 1F1(a; c; z). Negative real parts go through Kummer's transformation
/// e^z 1F1(c-a; c; -z), which turns the alternating series into a positive one.
/// Real arguments are summed in double-double; beyond |z| ~ 700 the result is
/// assembled from a log scale and loses roughly log10|z| digits.
pub fn hyp1f1(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    if nonpositive_integer(c) {
        return Err(Error::PoleOfGamma(format!("c = {}", c.re)));
    }
    let real = a.im == 0.0 && c.im == 0.0 && z.im == 0.0;
    if real {
        let (a, c, x) = (a.re, c.re, z.re);
        let v = if x < 0.0 {
            let (m, ls) = kummer_positive(c - a, c, -x)?;
            m * (ls + x).exp()
        } else {
            let (m, ls) = kummer_positive(a, c, x)?;
            m * ls.exp()
        };
        return Ok(Complex64::new(v, 0.0));
    }
    if z.re < 0.0 {
        let inner = kummer_complex(c - a, c, -z)?;
        return Ok(z.exp() * inner);
    }
    kummer_complex(a, c, z)
}

fn kummer_complex(a: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let budget = 2_000 + (4.0 * z.norm()) as usize;
    let mut quiet = 0;
    for k in 0..budget {
        let kf = k as f64;
        term *= (a + kf) / (c + kf) * z / (kf + 1.0);
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        if kf > z.norm() && term.norm() <= 1e-17 * sum.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(format!("1F1 series did not settle in {budget} terms")))
}
