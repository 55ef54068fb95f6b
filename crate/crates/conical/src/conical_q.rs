//! Second-kind conical functions Q^{-1/2-K}_{-1/2+i tau}(chi).
//!
//! The series form expands the large-w integrand in powers of e^{-w}; the
//! coefficients are Gegenbauer values C_n^{(-K)}(cosh chi) and every pole
//! tau = i(n - K) appears as a simple fraction.

use crate::coefficients::{integer_order, pole_prefactor, table_for, CoeffTable, ConicalPoint, BAND_ZERO_TOL};
use crate::conical_p::{check_table, integer_expansion_sum, p_recurrence_step, SERIES_WARN_REL};
use crate::error::{Error, Result};
use crate::kernel::gamma::{cos_pi, log_gamma_complex, rgamma_real, sin_pi};
use crate::kernel::quad::{quad_semi_infinite_with, smoothing_power};
use crate::kernel::tailfit::regularized_sum;
use crate::settings::QuadSettings;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// |tau - pole| below which evaluation is refused.
pub const POLE_HIT_RADIUS: f64 = 1e-10;

/// Minimum decay rate accepted by the direct integral.
pub const MIN_DECAY_RATE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Q_{-1/2+i tau}
    Plus,
    /// Q_{-1/2-i tau}
    Minus,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QPole {
    pub n: usize,
    pub location: Complex64,
    /// Residue of the series at `location`.
    pub residue: Complex64,
    /// -pi R^K_{n-K}(chi) from the offset-phase coefficient integral.
    pub offset_residue: Complex64,
    pub significant: bool,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pole_location(n: usize, k: f64) -> Complex64 {
    Complex64::new(0.0, n as f64 - k)
}

pub fn q_elementary(point: &ConicalPoint, branch: Branch) -> Result<Complex64> {
    let ConicalPoint { k, tau, chi } = *point;
    let t = match branch {
        Branch::Plus => tau,
        Branch::Minus => -tau,
    };
    let amp = (PI / (2.0 * chi.sinh())).sqrt();
    let i = Complex64::i();
    let ph = (-i * t * chi).exp();
    match integer_order(k) {
        Some(-1) => Ok(i * amp * ph),
        Some(0) => {
            if t.norm() < POLE_HIT_RADIUS {
                return Err(Error::PoleHit("tau = 0".into()));
            }
            Ok(-amp * ph / t)
        }
        Some(1) => {
            for p in [c(0.0), i, -i] {
                if (t - p).norm() < POLE_HIT_RADIUS {
                    return Err(Error::PoleHit(format!("tau = {p}")));
                }
            }
            let coth = chi.cosh() / chi.sinh();
            Ok(amp / (t * t + 1.0) * (-coth * ph / t - i * ph))
        }
        _ => Err(Error::UnsupportedOrder(format!("no elementary form for K = {k}"))),
    }
}

fn check_pole(k: f64, tau: Complex64, n_poles: usize) -> Result<()> {
    // poles sit on the imaginary axis at i(n - K)
    if tau.re.abs() >= POLE_HIT_RADIUS {
        return Ok(());
    }
    let x = tau.im + k;
    let n = x.round();
    if n >= 0.0 && (n as usize) <= n_poles && (x - n).abs() < POLE_HIT_RADIUS {
        return Err(Error::PoleHit(format!("tau = {tau} is at the pole i({n} - {k})")));
    }
    Ok(())
}

/// Pole-fraction series for Q_{-1/2+i tau}. Integer K >= 0 gives 2K + 1
/// terms; otherwise the tail is summed from the fitted asymptotic model.
pub fn q_sinc_series(point: &ConicalPoint, table: &CoeffTable) -> Result<Complex64> {
    check_table(point, table)?;
    let ConicalPoint { k, tau, chi } = *point;
    let e = table.pole_scaled();
    let int_k = integer_order(k);
    let finite = matches!(int_k, Some(l) if l >= 0);
    let neg_int = matches!(int_k, Some(l) if l < 0);
    if !neg_int {
        let n_poles = if finite { 2 * int_k.unwrap() as usize } else { e.len() - 1 };
        check_pole(k, tau, n_poles)?;
    }
    let i = Complex64::i();
    let front = -i * pole_prefactor(k, chi) * (k * chi).exp() * (-i * tau * chi).exp();
    if finite {
        let l = int_k.unwrap() as usize;
        let mut s = c(0.0);
        for n in (0..=2 * l).rev() {
            s += e[n] / (tau - pole_location(n, k));
        }
        return Ok(front * s * rgamma_real(1.0 + k));
    }
    let terms: Vec<Complex64> = e
        .iter()
        .enumerate()
        .map(|(n, en)| {
            let d = tau - pole_location(n, k);
            if d.norm() == 0.0 {
                c(0.0)
            } else {
                en / d
            }
        })
        .collect();
    let ts = regularized_sum(&terms, k + 2.0, k);
    let value = front * ts.value;
    let estimate = ts.estimate * front.norm();
    if estimate > SERIES_WARN_REL * value.norm() && estimate > 1e-300 {
        return Err(Error::TruncationWarning { value, estimate });
    }
    Ok(value)
}

/// The series with the offset-phase coefficients R~_n taken literally:
/// -i sum_n R~_n e^{-i chi (tau - i(n-K))} / (tau - i(n-K)). It coincides with
/// `q_sinc_series` for integer K only.
pub fn q_sinc_series_literal(point: &ConicalPoint, table: &CoeffTable) -> Result<Complex64> {
    check_table(point, table)?;
    let ConicalPoint { k, tau, chi } = *point;
    let rt = table.offset_values()?;
    check_pole(k, tau, rt.len() - 1)?;
    let i = Complex64::i();
    let mut s = c(0.0);
    for (n, r) in rt.iter().enumerate().rev() {
        let d = tau - pole_location(n, k);
        s += r * (-i * chi * d).exp() / d;
    }
    Ok(-i * s)
}

/// ln(cosh w / cosh chi - 1) for w > chi, overflow-free.
/// ln(cosh w / cosh chi - 1) at w = chi + d, overflow-free.
fn ln_outer_base(d: f64, chi: f64) -> f64 {
    let ln_sinh = |x: f64| x + (-0.5 * (-2.0 * x).exp_m1()).ln();
    std::f64::consts::LN_2 + ln_sinh(chi + 0.5 * d) + ln_sinh(0.5 * d) - chi.cosh().ln()
}

/// Semi-infinite integral representation; requires -1 < K and a decay rate
/// -Im(tau) - K of at least `MIN_DECAY_RATE`. `settings.epsilon_shift`
/// moves tau to tau - i eps before evaluation.
pub fn q_direct(point: &ConicalPoint, settings: &QuadSettings) -> Result<Complex64> {
    let ConicalPoint { k, chi, .. } = *point;
    let tau = point.tau - Complex64::i() * settings.epsilon_shift;
    if !(k > -1.0) {
        return Err(Error::RegionViolation(format!("direct Q integral needs K > -1, got {k}")));
    }
    let decay = -tau.im - k;
    if decay < MIN_DECAY_RATE {
        return Err(Error::RegionViolation(format!(
            "decay rate -Im(tau) - K = {decay} is below {MIN_DECAY_RATE}"
        )));
    }
    let i = Complex64::i();
    let phase = Complex64::new(cos_pi(k), -sin_pi(k));
    let pref = -(PI / (2.0 * chi.sinh())).sqrt() * i * phase * (-k * chi.tanh().ln()).exp() * rgamma_real(1.0 + k);
    // in d = w - chi so the branch point at d = 0 keeps full precision
    let f = move |d: f64| {
        let w = chi + d;
        if k == 0.0 {
            return (-i * w * tau).exp();
        }
        if d <= 0.0 {
            return c(0.0);
        }
        (c(k * ln_outer_base(d, chi)) - i * w * tau).exp()
    };
    let r = quad_semi_infinite_with(f, 0.0, decay, smoothing_power(k), settings)?;
    Ok(r.value * pref)
}

/// Default evaluator for either branch; Q_{-1/2-i tau}(chi) = Q_{-1/2+i(-tau)}(chi).
pub fn q_eval(point: &ConicalPoint, branch: Branch, settings: &QuadSettings) -> Result<Complex64> {
    let p = match branch {
        Branch::Plus => *point,
        Branch::Minus => point.with_tau(-point.tau),
    };
    let table = table_for(p.k, p.chi, p.tau, settings)?;
    q_sinc_series(&p, &table)
}

pub fn q_recurrence_step(ell: u32, tau: Complex64, chi: f64, q_l: Complex64, q_lm1: Complex64) -> Result<Complex64> {
    p_recurrence_step(ell, tau, chi, q_l, q_lm1)
}

/// Q^{-1/2-K}_{-1/2+K+i tau}(chi) from the integer-order members
/// Q^{-1/2-l}_{-1/2+l+i tau}(chi), outer sum cut at n <= ell_max.
pub fn q_integer_expansion(
    k: f64,
    tau: Complex64,
    chi: f64,
    ell_max: usize,
    settings: &QuadSettings,
) -> Result<Complex64> {
    let i = Complex64::i();
    let members: Vec<Complex64> = (0..=ell_max)
        .map(|l| {
            let p = ConicalPoint::new(l as f64, tau - i * l as f64, chi)?;
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            Ok(q_eval(&p, Branch::Plus, settings)? * sign)
        })
        .collect::<Result<_>>()?;
    let phase = Complex64::new(cos_pi(k), -sin_pi(k));
    let s = integer_expansion_sum(k, chi, &members, 2.0 * chi.sinh(), |_| 1.0);
    match s {
        Ok(v) => Ok(v * phase),
        Err(Error::TruncationWarning { value, estimate }) => {
            Err(Error::TruncationWarning { value: value * phase, estimate })
        }
        Err(e) => Err(e),
    }
}

/// Poles tau = i(n - K), n = 0..=n_max, with their residues.
pub fn q_poles(k: f64, chi: f64, n_max: usize, table: &CoeffTable) -> Result<Vec<QPole>> {
    if table.k != k || table.chi != chi {
        return Err(Error::InvalidArgument("table does not match (K, chi)".into()));
    }
    let e = table.pole_scaled();
    let i = Complex64::i();
    let front = -i * pole_prefactor(k, chi) * rgamma_real(1.0 + k);
    let neg_int = matches!(integer_order(k), Some(l) if l < 0);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let cn = e.get(n).copied().unwrap_or(0.0) * (n as f64 * chi).exp();
        let residue = if neg_int { c(0.0) } else { front * cn };
        let offset_residue = -PI * crate::coefficients::r_coeff(k, n as f64 - k, chi, table.settings())?;
        out.push(QPole { n, location: pole_location(n, k), residue, offset_residue, significant: false });
    }
    let max = out.iter().fold(0.0f64, |m, p| m.max(p.residue.norm()));
    for p in &mut out {
        p.significant = max > 0.0 && p.residue.norm() > BAND_ZERO_TOL * max;
    }
    Ok(out)
}

/// Large-chi form with the first two corrections in 1/cosh^2 chi.
pub fn q_asymptotic(point: &ConicalPoint) -> Result<Complex64> {
    let ConicalPoint { k, tau, chi } = *point;
    let i = Complex64::i();
    let it = i * tau;
    let lg = log_gamma_complex(it - k)? - log_gamma_complex(it + 1.0)?;
    let ch = chi.cosh();
    let x = 1.0 / (4.0 * ch * ch);
    // (2 cosh chi)^{-1/2 - i tau}
    let pw = (-(0.5 + it) * (2.0 * ch).ln()).exp();
    let phase = Complex64::new(cos_pi(k), -sin_pi(k));
    let c1 = 1.0 + (1.0 + 2.0 * k) * x;
    let c2 = 1.0 + (it - k) * (it - k + 1.0) * x / (it + 1.0);
    Ok(-i * PI.sqrt() * phase * lg.exp() * pw * c1 * c2)
}
