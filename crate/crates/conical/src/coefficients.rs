//! The tau-independent coefficients R^K_n(chi) of the sinc expansion and the
//! pole coefficients of the second-kind series.
//!
//! Coefficients are kept "Gamma-free": `scaled[n] = e^{n chi} * int_0^{2pi}
//! (1 - cos w / cosh chi)^K e^{i n w} dw`, with 1/Gamma(1+K) stored apart so
//! that orders with Gamma poles (K = -1, -2, ...) can be taken as limits.

use crate::error::{Error, Result};
use crate::kernel::gamma::{cos_pi, rgamma_real, sin_pi};
use crate::kernel::quad::{quad_finite, quad_periodic};
use crate::settings::QuadSettings;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

/// Relative size below which an integer-order coefficient counts as zero.
pub const BAND_ZERO_TOL: f64 = 1e-12;

/// One evaluation point: order K (mu = -1/2 - K), degree tau (nu = -1/2 + i tau), argument chi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicalPoint {
    pub k: f64,
    pub tau: Complex64,
    pub chi: f64,
}

impl ConicalPoint {
    pub fn new(k: f64, tau: Complex64, chi: f64) -> Result<Self> {
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::InvalidArgument(format!("chi must be positive, got {chi}")));
        }
        if !k.is_finite() || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidArgument("non-finite parameter".into()));
        }
        Ok(ConicalPoint { k, tau, chi })
    }

    pub fn real(k: f64, tau: f64, chi: f64) -> Result<Self> {
        Self::new(k, Complex64::new(tau, 0.0), chi)
    }

    pub fn mu(&self) -> f64 {
        -0.5 - self.k
    }

    pub fn nu(&self) -> Complex64 {
        Complex64::new(-0.5, 0.0) + Complex64::i() * self.tau
    }

    pub fn with_tau(&self, tau: Complex64) -> Self {
        ConicalPoint { tau, ..*self }
    }
}

pub(crate) fn integer_order(k: f64) -> Option<i64> {
    if k == k.round() && k.abs() < 1e6 {
        Some(k as i64)
    } else {
        None
    }
}

/// (1 - cos w / cosh chi)^K with the base formed without cancellation.
pub(crate) fn weight(k: f64, chi: f64, w: f64) -> f64 {
    let sh = (0.5 * chi).sinh();
    let sw = (0.5 * w).sin();
    let base = 2.0 * (sh * sh + sw * sw) / chi.cosh();
    if k == 0.0 {
        1.0
    } else {
        (k * base.ln()).exp()
    }
}

/// (2 pi)^{-3/2} tanh^{-K} chi sinh^{-1/2} chi, without the Gamma factor.
pub(crate) fn r_prefactor(k: f64, chi: f64) -> f64 {
    (2.0 * PI).powf(-1.5) * (-k * chi.tanh().ln()).exp() / chi.sinh().sqrt()
}

/// Default number of explicit series terms before the tail fit.
pub fn default_series_length(chi: f64, tau_abs: f64) -> usize {
    let want = 512f64.max(400.0 / chi).max(16.0 * tau_abs);
    let n = (want.min(65_536.0) as usize).next_power_of_two();
    n.clamp(512, 65_536)
}

#[derive(Debug)]
pub struct CoeffTable {
    pub k: f64,
    pub chi: f64,
    pub n_min: i64,
    pub n_max: i64,
    /// R^K_n(chi) for n = n_min..=n_max (index n - n_min).
    pub values: Vec<f64>,
    /// Gamma-free scaled coefficients e^{n chi} c_n, n = 0..=series_len.
    scaled: Vec<f64>,
    prefactor: f64,
    rgamma: f64,
    offset: OnceLock<Vec<Complex64>>,
    pole: OnceLock<Vec<f64>>,
    settings: QuadSettings,
}

fn compute_scaled(k: f64, chi: f64, len: usize, settings: &QuadSettings) -> Result<Vec<f64>> {
    let c0 = quad_periodic(|w| Complex64::new(weight(k, chi, w), 0.0), settings)?.value.re;
    let mut d = vec![0.0; len + 1];
    d[0] = c0;
    if len == 0 {
        return Ok(d);
    }
    let h = chi.cosh();
    let top = len + (40.0 / chi).ceil() as usize + 20;
    // backward continued fraction for r_n = c_n / c_{n-1}
    let mut r_next = (-chi).exp();
    let mut ratios = vec![0.0; len + 1];
    for n in (1..=top).rev() {
        let nf = n as f64;
        let num = nf - 1.0 - k;
        let den = 2.0 * h * nf - (nf + 1.0 + k) * r_next;
        let r = if num == 0.0 { 0.0 } else { num / den };
        if n <= len {
            ratios[n] = r;
        }
        r_next = r;
    }
    let e = chi.exp();
    for n in 1..=len {
        d[n] = d[n - 1] * ratios[n] * e;
    }
    Ok(d)
}

impl CoeffTable {
    /// Uncached construction. `n_max` bounds the stored `values`; the series
    /// length used by the sums is at least `series_len`.
    pub fn compute(k: f64, chi: f64, n_max: usize, series_len: usize, settings: &QuadSettings) -> Result<Self> {
        if !(chi > 0.0) {
            return Err(Error::InvalidArgument(format!("chi must be positive, got {chi}")));
        }
        settings.validate()?;
        let len = match integer_order(k) {
            Some(l) if l >= 0 => (l as usize).max(n_max),
            _ => series_len.max(n_max),
        };
        let mut scaled = compute_scaled(k, chi, len, settings)?;
        if let Some(l) = integer_order(k) {
            if l >= 0 {
                for v in scaled.iter_mut().skip(l as usize + 1) {
                    *v = 0.0;
                }
            }
        }
        let prefactor = r_prefactor(k, chi);
        let rgamma = rgamma_real(1.0 + k);
        let n_max_i = n_max as i64;
        let values: Vec<f64> = (-n_max_i..=n_max_i)
            .map(|n| {
                let m = n.unsigned_abs() as usize;
                prefactor * rgamma * scaled[m] * (-(m as f64) * chi).exp()
            })
            .collect();
        let table = CoeffTable {
            k,
            chi,
            n_min: -n_max_i,
            n_max: n_max_i,
            values,
            scaled,
            prefactor,
            rgamma,
            offset: OnceLock::new(),
            pole: OnceLock::new(),
            settings: *settings,
        };
        table.check_band()?;
        Ok(table)
    }

    fn check_band(&self) -> Result<()> {
        let Some(l) = integer_order(self.k) else { return Ok(()) };
        if l < 0 {
            return Ok(());
        }
        // compare the recurrence-built band edge against direct quadrature
        let max = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for n in [l + 1, l + 2] {
            if n > self.n_max {
                break;
            }
            let direct = r_coeff(self.k, n as f64, self.chi, &self.settings)?.re;
            if direct.abs() > BAND_ZERO_TOL * max.max(f64::MIN_POSITIVE) {
                return Err(Error::BandViolation { n, value: direct, max });
            }
        }
        Ok(())
    }

    pub fn get(&self, n: i64) -> f64 {
        if n < self.n_min || n > self.n_max {
            let m = n.unsigned_abs() as usize;
            if m < self.scaled.len() {
                return self.prefactor * self.rgamma * self.scaled[m] * (-(m as f64) * self.chi).exp();
            }
            return 0.0;
        }
        self.values[(n - self.n_min) as usize]
    }

    /// e^{|n| chi} c_{|n|} without the Gamma factor.
    pub fn scaled(&self) -> &[f64] {
        &self.scaled
    }

    pub fn series_len(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn rgamma(&self) -> f64 {
        self.rgamma
    }

    pub fn settings(&self) -> &QuadSettings {
        &self.settings
    }

    /// Literal offset coefficients R~^K_n, n = 0..=count, from the
    /// offset-phase integral int_0^{2pi} (...)^K e^{i (n - K) w} dw, so that
    /// i R~_n = pi R^K_{n-K}. The count defaults to what the exponentially
    /// damped literal Q series needs.
    pub fn offset_values(&self) -> Result<&[Complex64]> {
        if let Some(v) = self.offset.get() {
            return Ok(v);
        }
        let count = (self.n_max.max(0) as usize).max(offset_count(self.chi));
        let out = (0..=count)
            .map(|n| rtilde_coeff(self.k, n, self.chi, &self.settings))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.offset.get_or_init(|| out))
    }

    /// Scaled pole coefficients e_n = C_n^{(-K)}(cosh chi) e^{-n chi}.
    pub fn pole_scaled(&self) -> &[f64] {
        self.pole.get_or_init(|| {
            let len = match integer_order(self.k) {
                Some(l) if l >= 0 => 2 * l as usize,
                _ => self.series_len(),
            };
            gegenbauer_scaled(self.k, self.chi, len)
        })
    }

    /// Gamma-free part of the pole-series normalisation:
    /// -i e^{-i K pi} (pi/2)^{1/2} sinh^{-K-1/2} chi / 2^K.
    pub fn pole_prefactor(&self) -> Complex64 {
        pole_prefactor(self.k, self.chi)
    }
}

/// Terms needed before e^{-n chi} drops below 1e-17.
pub(crate) fn offset_count(chi: f64) -> usize {
    ((40.0 / chi).ceil() as usize + 4).min(4000)
}

pub(crate) fn pole_prefactor(k: f64, chi: f64) -> Complex64 {
    let phase = Complex64::new(cos_pi(k), -sin_pi(k));
    let mag = (PI / 2.0).sqrt() * (-(k + 0.5) * chi.sinh().ln() - k * 2f64.ln()).exp();
    -Complex64::i() * phase * mag
}

/// Gegenbauer C_n^{(lambda)}(cosh chi) e^{-n chi}, lambda = -K, by the forward
/// three-term recurrence (C_n grows like e^{n chi}, so forward is stable).
/// For integer K >= 0 the generating polynomial factors as
/// ((1 - y)(1 - e^{-2 chi} y))^K in y = e^{chi} x and is expanded exactly.
pub fn gegenbauer_scaled(k: f64, chi: f64, len: usize) -> Vec<f64> {
    let q = (-chi).exp();
    let mut e = vec![0.0; len + 1];
    if let Some(l) = integer_order(k) {
        if l >= 0 {
            // ((1 - y)(1 - q^2 y))^l: every contribution to y^n has sign (-1)^n
            let l = l as usize;
            let q2 = q * q;
            let binom = |m: usize| -> Vec<f64> {
                let mut b = vec![1.0; m + 1];
                for j in 1..=m {
                    b[j] = b[j - 1] * (m + 1 - j) as f64 / j as f64;
                }
                b
            };
            let b = binom(l);
            for n in 0..=(2 * l).min(len) {
                let mut acc = 0.0;
                let lo = n.saturating_sub(l);
                for j in lo..=n.min(l) {
                    acc += b[j] * b[n - j] * q2.powi((n - j) as i32);
                }
                e[n] = if n % 2 == 0 { acc } else { -acc };
            }
            return e;
        }
    }
    let lambda = -k;
    let t = chi.cosh();
    e[0] = 1.0;
    if len >= 1 {
        e[1] = 2.0 * lambda * t * q;
    }
    for n in 2..=len {
        let nf = n as f64;
        e[n] = (2.0 * t * (nf + lambda - 1.0) * q * e[n - 1] - (nf + 2.0 * lambda - 2.0) * q * q * e[n - 2]) / nf;
    }
    e
}

/// R^K_n(chi) at a real index n. Integer n uses the periodic trapezoid rule and
/// returns a real value; a non-integer index (the offset n - K) is integrated
/// by adaptive quadrature and is complex in general.
pub fn r_coeff(k: f64, n: f64, chi: f64, settings: &QuadSettings) -> Result<Complex64> {
    if !(chi > 0.0) {
        return Err(Error::InvalidArgument(format!("chi must be positive, got {chi}")));
    }
    let scale = r_prefactor(k, chi) * rgamma_real(1.0 + k);
    if n == n.round() {
        // start above the aliasing threshold of cos(n w) times the weight's harmonics
        let harmonics = 2.0 * n.abs() + 2.0 * k.max(0.0) + 16.0;
        let mut s = *settings;
        s.periodic_points = s.periodic_points.max((harmonics as usize).next_power_of_two());
        let r = quad_periodic(|w| Complex64::new(weight(k, chi, w) * (n * w).cos(), 0.0), &s)?;
        return Ok(Complex64::new(scale * r.value.re, 0.0));
    }
    let r = quad_finite(
        |w| Complex64::from_polar(weight(k, chi, w), n * w),
        0.0,
        2.0 * PI,
        settings,
    )?;
    Ok(r.value * scale)
}

/// The offset coefficient R~^K_n(chi), defined through the e^{i (n - K) w} phase.
pub fn rtilde_coeff(k: f64, n: usize, chi: f64, settings: &QuadSettings) -> Result<Complex64> {
    let r = r_coeff(k, n as f64 - k, chi, settings)?;
    // i R~ = pi R_{n-K}
    Ok(-Complex64::i() * PI * r)
}

type Key = (u64, u64, usize, usize);

fn cache() -> &'static RwLock<HashMap<Key, Arc<CoeffTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<CoeffTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached table keyed on the exact bit patterns of (K, chi) and the sizes.
/// Tables are built with the default settings' tolerances when `settings`
/// matches; distinct settings bypass the cache.
pub fn build_table(k: f64, chi: f64, n_max: usize, settings: &QuadSettings) -> Result<Arc<CoeffTable>> {
    let series_len = default_series_length(chi, 0.0);
    build_table_with_len(k, chi, n_max, series_len, settings)
}

pub fn build_table_with_len(
    k: f64,
    chi: f64,
    n_max: usize,
    series_len: usize,
    settings: &QuadSettings,
) -> Result<Arc<CoeffTable>> {
    let cacheable = *settings == QuadSettings::default();
    let key = (k.to_bits(), chi.to_bits(), n_max, series_len);
    if cacheable {
        if let Some(t) = cache().read().unwrap().get(&key) {
            return Ok(t.clone());
        }
    }
    let table = Arc::new(CoeffTable::compute(k, chi, n_max, series_len, settings)?);
    if cacheable {
        let mut w = cache().write().unwrap();
        return Ok(w.entry(key).or_insert(table).clone());
    }
    Ok(table)
}

/// Table sized for evaluations at degree `tau`.
pub fn table_for(k: f64, chi: f64, tau: Complex64, settings: &QuadSettings) -> Result<Arc<CoeffTable>> {
    let n_max = match integer_order(k) {
        Some(l) if l >= 0 => l as usize + 2,
        _ => 40,
    };
    build_table_with_len(k, chi, n_max, default_series_length(chi, tau.norm()), settings)
}
