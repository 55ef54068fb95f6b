//! Band-limited signals, their sinc reconstruction, and the two
//! cosmological sums built on sampling at n pi / chi.

use crate::coefficients::ConicalPoint;
use crate::conical_p::p_eval;
use crate::error::{Error, Result};
use crate::identities::fitted_tail;
use crate::kernel::gamma::ln_gamma_real;
use crate::kernel::hyper::hyp1f1;
use crate::kernel::quad::{adaptive_gk, quad_finite};
use crate::kernel::sinc::{sinc, sinc_shifted};
use crate::settings::QuadSettings;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    None,
}

/// A function of tau whose Fourier transform lives in [-bandwidth, bandwidth].
#[derive(Clone)]
pub struct BandSignal {
    pub bandwidth: f64,
    pub parity: Parity,
    eval: Eval,
}

impl fmt::Debug for BandSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BandSignal").field("bandwidth", &self.bandwidth).field("parity", &self.parity).finish()
    }
}

impl BandSignal {
    /// The caller vouches for the bandwidth.
    pub fn new(bandwidth: f64, parity: Parity, eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Result<Self> {
        if !(bandwidth >= 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidArgument(format!("bandwidth must be finite and >= 0, got {bandwidth}")));
        }
        Ok(BandSignal { bandwidth, parity, eval: Arc::new(eval) })
    }

    pub fn constant(c: f64) -> Self {
        BandSignal { bandwidth: 0.0, parity: Parity::Even, eval: Arc::new(move |_| Complex64::new(c, 0.0)) }
    }

    /// sin(chi tau)/(chi tau)
    pub fn sinc(chi: f64) -> Result<Self> {
        if !(chi > 0.0) {
            return Err(Error::ZeroFrequency);
        }
        Self::new(chi, Parity::Even, move |t| Complex64::new(sinc(chi * t), 0.0))
    }

    /// P^{-1/2-K}_{-1/2+i tau}(chi); even in tau, bandwidth chi.
    pub fn conical_p(k: f64, chi: f64, settings: QuadSettings) -> Result<Self> {
        ConicalPoint::real(k, 0.0, chi)?;
        if !(k > -1.0) {
            return Err(Error::RegionViolation("band limit needs K > -1".into()));
        }
        Self::new(chi, Parity::Even, move |t| {
            p_eval(&ConicalPoint::real(k, t, chi).expect("validated"), &settings).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })
    }

    pub fn evaluate(&self, tau: f64) -> Complex64 {
        (self.eval)(tau)
    }
}

pub fn band_product(s1: &BandSignal, s2: &BandSignal) -> BandSignal {
    let (a, b) = (s1.eval.clone(), s2.eval.clone());
    let parity = if s1.parity == Parity::Even && s2.parity == Parity::Even { Parity::Even } else { Parity::None };
    BandSignal { bandwidth: s1.bandwidth + s2.bandwidth, parity, eval: Arc::new(move |t| a(t) * b(t)) }
}

/// Multiply by a polynomial (ascending coefficients); bandwidth unchanged.
pub fn band_polynomial(s: &BandSignal, poly: &[f64]) -> BandSignal {
    let a = s.eval.clone();
    let p = poly.to_vec();
    let even_poly = p.iter().enumerate().all(|(j, c)| j % 2 == 0 || *c == 0.0);
    let parity = if s.parity == Parity::Even && even_poly { Parity::Even } else { Parity::None };
    BandSignal {
        bandwidth: s.bandwidth,
        parity,
        eval: Arc::new(move |t| a(t) * p.iter().rev().fold(0.0, |acc, &c| acc * t + c)),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Reconstruction {
    pub value: Complex64,
    /// Size of the next block of samples, |n| in (n_cut, 2 n_cut].
    pub tail_estimate: f64,
}

pub const RECONSTRUCT_TAIL_LIMIT: f64 = 1e-6;

/// B(tau) = 1/2 sum_n B(n pi/chi) [sinc(chi tau - n pi) + sinc(chi tau + n pi)] for even B.
pub fn band_reconstruct(s: &BandSignal, tau: f64, n_cut: usize) -> Result<Reconstruction> {
    if s.parity != Parity::Even {
        return Err(Error::InvalidArgument("reconstruction needs an even signal".into()));
    }
    if n_cut < 1 {
        return Err(Error::InvalidArgument("n_cut must be at least 1".into()));
    }
    let chi = s.bandwidth;
    if chi <= 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let x = chi * tau;
    // B even: n and -n carry the same kernel sum
    let kernel = |n: usize| -> f64 {
        let np = n as f64 * PI;
        if n == 0 {
            sinc(x)
        } else {
            sinc(x - np) + sinc(x + np)
        }
    };
    let block = |lo: usize, hi: usize| -> Complex64 {
        (lo..=hi).rev().map(|n| s.evaluate(n as f64 * PI / chi) * kernel(n)).sum()
    };
    let value = block(0, n_cut);
    let tail = block(n_cut + 1, 2 * n_cut).norm();
    if tail > RECONSTRUCT_TAIL_LIMIT * value.norm().max(1e-300) && tail > 1e-14 {
        return Err(Error::TailTooLarge(format!("next {n_cut} samples contribute {tail:e}")));
    }
    Ok(Reconstruction { value, tail_estimate: tail })
}

// ---- cosmology -------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosmoParams {
    pub rho0: f64,
    pub rho_l: f64,
    pub chi_l: f64,
    pub a: f64,
    pub n: f64,
    pub beta: f64,
    pub ell: usize,
    pub k: f64,
}

impl CosmoParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(rho0: f64, rho_l: f64, a: f64, n: f64, beta: f64, ell: usize, k: f64) -> Result<Self> {
        if !(rho0 > rho_l) {
            return Err(Error::InvalidArgument("need rho0 > rho_L".into()));
        }
        if !(beta >= 0.0) {
            return Err(Error::InvalidArgument("beta must be >= 0".into()));
        }
        Ok(CosmoParams { rho0, rho_l, chi_l: rho0 - rho_l, a, n, beta, ell, k })
    }

    /// 2|chi_L - rho_0| + 2 chi_L; equals the bandwidth of the squared
    /// chi-integral for either sign of rho_L.
    pub fn chi_d(&self) -> f64 {
        2.0 * (self.chi_l - self.rho0).abs() + 2.0 * self.chi_l
    }
}

/// 1 / N_l^2(tau) = (pi/2) tau^2 prod_{k=1}^l (tau^2 + k^2).
pub fn inverse_norm_sq(ell: usize, tau: f64) -> f64 {
    let t2 = tau * tau;
    0.5 * PI * t2 * (1..=ell).map(|k| t2 + (k * k) as f64).product::<f64>()
}

#[derive(Debug, Clone, Serialize)]
pub struct CosmoSum {
    pub value: f64,
    /// Weighted per-n contributions, n = 0, 1, ...
    pub terms: Vec<f64>,
    pub tail_estimate: f64,
}

impl CosmoSum {
    /// Least-squares slope of log|term| against log n over local maxima of
    /// the upper half of the terms.
    pub fn tail_slope(&self) -> Option<f64> {
        envelope_slope(&self.terms)
    }
}

pub fn envelope_slope(terms: &[f64]) -> Option<f64> {
    let n = terms.len();
    if n < 16 {
        return None;
    }
    let mut pts = Vec::new();
    for i in (n / 4).max(2)..n - 1 {
        let (a, b, c) = (terms[i - 1].abs(), terms[i].abs(), terms[i + 1].abs());
        if b >= a && b >= c && b > 0.0 {
            pts.push(((i as f64).ln(), b.ln()));
        }
    }
    if pts.len() < 4 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx) * (p.0 - mx)));
    Some(num / den)
}

fn p_real(k: f64, tau: f64, chi: f64, settings: &QuadSettings) -> Result<f64> {
    Ok(p_eval(&ConicalPoint::real(k, tau, chi)?, settings)?.re)
}

/// A tau^{N-4} / N_l^2 P_l(chi_L)^2 P_K(rho_L)^2.
fn cosmo_i_integrand(p: &CosmoParams, tau: f64, settings: &QuadSettings) -> Result<f64> {
    let pl = p_real(p.ell as f64, tau, p.chi_l, settings)?;
    let pk = p_real(p.k, tau, p.rho_l, settings)?;
    // tau^{N-4} tau^2 combined so that tau = 0 is finite for N >= 2
    let t2 = tau * tau;
    let weight = 0.5 * PI * (1..=p.ell).map(|k| t2 + (k * k) as f64).product::<f64>();
    let power = if p.n == 2.0 { 1.0 } else { tau.abs().powf(p.n - 2.0) };
    Ok(p.a * power * weight * (-p.beta * p.beta * t2).exp() * pl * pl * pk * pk)
}

pub const COSMO_MAX_TERMS: usize = 200_000;
pub const COSMO_SUM_TOL: f64 = 1e-10;

/// int_0^inf tau-integral of the four-P product as the sampled sum at
/// tau_n = n pi/(2 chi_L + 2 rho_L): dtau (f(0)/2 + sum_{n>=1} f(tau_n)).
/// Terms are added until the envelope bound on the remainder, from the
/// (n dtau)^{N-2K-6} decay, drops below `COSMO_SUM_TOL` of the sum.
pub fn cosmo_i(params: &CosmoParams, settings: &QuadSettings) -> Result<CosmoSum> {
    let p = params;
    if p.beta != 0.0 {
        return Err(Error::RegionViolation("the sampled sum needs beta = 0".into()));
    }
    let s = p.n - 2.0 * p.k - 6.0;
    if !(s < -1.0) {
        return Err(Error::RegionViolation(format!("N - 2K - 5 = {} must be negative", s + 1.0)));
    }
    if !(p.rho_l > 0.0) {
        return Err(Error::RegionViolation("rho_L must be positive".into()));
    }
    let dt = PI / (2.0 * p.chi_l + 2.0 * p.rho_l);
    let mut terms: Vec<f64> = Vec::new();
    let chunk = 64;
    let mut sum = 0.0;
    let mut tail = f64::INFINITY;
    while terms.len() < COSMO_MAX_TERMS {
        let start = terms.len();
        let block: Vec<f64> = (start..start + chunk)
            .into_par_iter()
            .map(|n| {
                let w = if n == 0 { 0.5 } else { 1.0 };
                cosmo_i_integrand(p, n as f64 * dt, settings).map(|f| dt * w * f)
            })
            .collect::<Result<_>>()?;
        terms.extend(block);
        sum = terms.iter().rev().sum();
        let n = terms.len();
        let env = terms[n - chunk..].iter().fold(0.0f64, |m, t| m.max(t.abs()));
        tail = env * n as f64 / (-s - 1.0);
        if n >= 128 && tail <= COSMO_SUM_TOL * sum.abs() {
            break;
        }
    }
    Ok(CosmoSum { value: sum, terms, tail_estimate: tail })
}

/// The same tau-integral by adaptive quadrature on [0, T] plus a fitted tail.
pub fn cosmo_i_quadrature(params: &CosmoParams, settings: &QuadSettings) -> Result<f64> {
    let p = *params;
    let t_end = 60.0;
    let s = *settings;
    let f = move |t: f64| Complex64::new(cosmo_i_integrand(&p, t, &s).unwrap_or(f64::NAN), 0.0);
    let step = PI / (2.0 * p.chi_l + 2.0 * p.rho_l);
    let panels = (t_end / step).ceil() as usize;
    let breaks: Vec<f64> = (0..=panels).map(|k| (k as f64 * step).min(t_end)).collect();
    let body = adaptive_gk(&f, &breaks, &settings.with_rel_tol(settings.rel_tol.max(1e-12)));
    if !body.result.converged || !body.result.value.re.is_finite() {
        return Err(Error::NonConvergence(format!("tau integral: error {:e}", body.result.err_estimate)));
    }
    let tail = if p.beta == 0.0 {
        let (cl, rl) = (2.0 * p.chi_l, 2.0 * p.rho_l);
        let freqs = [cl, rl, cl + rl, (cl - rl).abs()];
        let freqs: Vec<f64> = freqs.into_iter().filter(|w| *w > 1e-9).collect();
        fitted_tail(&f, t_end, -(p.n - 2.0 * p.k - 6.0), &freqs, 1.0).0.re
    } else {
        0.0
    };
    Ok(body.result.value.re + tail)
}

/// J(tau) = int_0^{chi_L} dchi sinh(rho0 - chi) sin(tau (rho0 - chi))/tau P_l(chi)/sinh^{5/2} chi
pub fn cosmo_chi_integral(params: &CosmoParams, tau: f64, settings: &QuadSettings) -> Result<f64> {
    let p = *params;
    let l = p.ell as f64;
    let inner = settings.with_rel_tol(settings.rel_tol.max(1e-11));
    let f = |chi: f64| {
        if chi <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let r = p.rho0 - chi;
        let pl = p_real(l, tau, chi, &inner).unwrap_or(f64::NAN);
        Complex64::new(r.sinh() * r * sinc(tau * r) * pl / chi.sinh().powf(2.5), 0.0)
    };
    Ok(quad_finite(f, 0.0, p.chi_l, &inner)?.value.re)
}

fn spectrum_constant(n: f64, beta: f64) -> Result<f64> {
    let a = 0.5 * (n - 3.0);
    if a <= 0.0 && a == a.round() {
        return Err(Error::PoleOfGamma(format!("Gamma((N-3)/2) at N = {n}")));
    }
    let (lg, sign) = ln_gamma_real(a)?;
    Ok(sign * (lg + (3.0 - n) * beta.ln()).exp())
}

/// int_0^{chi_d} beta^{3-N} Gamma((N-3)/2) 1F1((N-3)/2; 1/2; -w^2/(4 beta^2)) cos(w tau) dw
pub fn cosmo_omega_integral(params: &CosmoParams, tau: f64, settings: &QuadSettings) -> Result<f64> {
    let p = params;
    let g = spectrum_constant(p.n, p.beta)?;
    let a = Complex64::new(0.5 * (p.n - 3.0), 0.0);
    let half = Complex64::new(0.5, 0.0);
    let b2 = 4.0 * p.beta * p.beta;
    let chi_d = p.chi_d();
    let f = |w: f64| {
        let phi = hyp1f1(a, half, Complex64::new(-w * w / b2, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
        Complex64::new(g * phi * (w * tau).cos(), 0.0)
    };
    let periods = (chi_d * tau.abs() / PI).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=periods).map(|k| chi_d * k as f64 / periods as f64).collect();
    let r = adaptive_gk(&f, &breaks, settings);
    if !r.result.converged || !r.result.value.re.is_finite() {
        return Err(Error::NonConvergence(format!("omega integral at tau = {tau}")));
    }
    Ok(r.result.value.re)
}

/// Terms n = 0..=n_cut of the sampled C_l sum over tau_n = n pi/chi_d:
/// (4A/(pi chi_d)) (1/N_l^2) J(tau_n)^2 W(tau_n), with n and -n folded
/// together and W the full omega-integral of the spectrum's cosine transform.
pub fn cosmo_cl_terms(params: &CosmoParams, n_cut: usize, settings: &QuadSettings) -> Result<Vec<f64>> {
    let p = params;
    if !(p.beta > 0.0) {
        return Err(Error::RegionViolation("the sampled C_l needs beta > 0".into()));
    }
    if p.ell < 2 {
        return Err(Error::InvalidArgument("tensor modes need l >= 2".into()));
    }
    if n_cut < 1 {
        return Err(Error::InvalidArgument("n_cut must be at least 1".into()));
    }
    spectrum_constant(p.n, p.beta)?;
    let chi_d = p.chi_d();
    let pref = 4.0 * p.a / (PI * chi_d);
    (0..=n_cut)
        .into_par_iter()
        .map(|n| {
            if n == 0 {
                // 1/N^2 vanishes at tau = 0
                return Ok(0.0);
            }
            let tau = n as f64 * PI / chi_d;
            let j = cosmo_chi_integral(p, tau, settings)?;
            let w = cosmo_omega_integral(p, tau, settings)?;
            Ok(2.0 * pref * inverse_norm_sq(p.ell, tau) * j * j * w)
        })
        .collect()
}

/// Sampled C_l truncated at n_cut. The remainder bound is the envelope of
/// the last terms times n_cut; above 1e-2 of the sum it is `TailTooLarge`.
pub fn cosmo_cl(params: &CosmoParams, n_cut: usize, settings: &QuadSettings) -> Result<CosmoSum> {
    let terms = cosmo_cl_terms(params, n_cut, settings)?;
    let value: f64 = terms.iter().rev().sum();
    let env = terms[terms.len().saturating_sub(8)..].iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let tail_estimate = env * n_cut as f64;
    if tail_estimate > 1e-2 * value.abs() {
        return Err(Error::TailTooLarge(format!("remainder bound {tail_estimate:e} at n_cut = {n_cut}")));
    }
    Ok(CosmoSum { value, terms, tail_estimate })
}

/// C_l straight from its tau-integral: (8/pi) int_0^inf A tau^{N-4} e^{-beta^2 tau^2} J^2/N_l^2.
pub fn cosmo_cl_quadrature(params: &CosmoParams, settings: &QuadSettings) -> Result<f64> {
    let p = *params;
    if !(p.beta > 0.0) {
        return Err(Error::RegionViolation("needs beta > 0".into()));
    }
    let t_end = (40.0f64).sqrt() / p.beta;
    let s = *settings;
    let f = move |t: f64| {
        let j = cosmo_chi_integral(&p, t, &s).unwrap_or(f64::NAN);
        let power = if p.n == 4.0 { 1.0 } else { t.abs().powf(p.n - 4.0) };
        Complex64::new(p.a * power * (-p.beta * p.beta * t * t).exp() * inverse_norm_sq(p.ell, t) * j * j, 0.0)
    };
    let panels = 16usize;
    let breaks: Vec<f64> = (0..=panels).map(|k| t_end * k as f64 / panels as f64).collect();
    let r = adaptive_gk(&f, &breaks, &settings.with_rel_tol(settings.rel_tol.max(1e-9)));
    if !r.result.value.re.is_finite() {
        return Err(Error::NonConvergence("C_l tau integral".into()));
    }
    Ok(8.0 / PI * r.result.value.re)
}

/// (E, dE/drho) of the temporal mode; tau = 0 and tau = +-i are removable.
pub fn mode_e(rho: f64, tau: Complex64) -> Result<(Complex64, Complex64)> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument("rho must be positive".into()));
    }
    let c = (2.0 / PI).sqrt();
    let de = c * rho.sinh() * sinc_shifted(tau, Complex64::new(0.0, 0.0), rho);
    let e_at = |t: Complex64| -> Complex64 {
        // [cosh rho sin(t rho) - t sinh rho cos(t rho)] / t, then / (t^2 + 1)
        let num = rho.cosh() * sinc_shifted(t, Complex64::new(0.0, 0.0), rho) - rho.sinh() * (t * rho).cos();
        c * num / (t * t + 1.0)
    };
    let e = if (tau * tau + 1.0).norm() < 1e-7 {
        let d = Complex64::new(1e-4, 0.0);
        0.5 * (e_at(tau + d) + e_at(tau - d))
    } else {
        e_at(tau)
    };
    Ok((e, de))
}
