//! First-kind conical functions P^{-1/2-K}_{-1/2+i tau}(chi).

use crate::coefficients::{integer_order, table_for, CoeffTable, ConicalPoint};
use crate::error::{Error, Result};
use crate::kernel::gamma::rgamma_real;
use crate::kernel::quad::{quad_finite_exponent, quad_smooth};
use crate::kernel::sinc::{sinc_shifted, SINC_SWITCH};
use crate::kernel::tailfit::regularized_sum;
use crate::settings::QuadSettings;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Relative tail-estimate size above which a truncated series is reported
/// as a `TruncationWarning` instead of a value.
pub const SERIES_WARN_REL: f64 = 1e-10;

/// Relative rounding loss tolerated in the series before `p_eval` switches
/// to the direct integral.
pub const CANCELLATION_LIMIT: f64 = 1e-12;

/// Outer-sum truncation threshold for the integer-order expansions.
pub const EXPANSION_WARN_REL: f64 = 1e-6;

/// Symbolic expressions in the derivative form are capped at this order.
pub const DERIVATIVE_FORM_MAX_ELL: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PRepresentation {
    Elementary,
    SincSeries,
    DirectIntegral,
    DerivativeForm,
    Recurrence,
    IntegerExpansion,
}

/// N_l(tau)^2 = 2 / (pi tau^2 (tau^2 + 1) ... (tau^2 + l^2)).
pub fn norm_constant_sq(ell: u32, tau: Complex64) -> Complex64 {
    let t2 = tau * tau;
    let mut d = t2;
    for k in 1..=ell {
        d *= t2 + (k * k) as f64;
    }
    2.0 / (PI * d)
}

#[derive(Debug, Clone, Copy)]
pub struct NormConstant {
    pub ell: u32,
    pub tau: Complex64,
    pub value: Complex64,
}

impl NormConstant {
    pub fn new(ell: u32, tau: Complex64) -> Self {
        NormConstant { ell, tau, value: norm_constant_sq(ell, tau).sqrt() }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn p_elementary(point: &ConicalPoint) -> Result<Complex64> {
    let ConicalPoint { k, tau, chi } = *point;
    let amp = (2.0 / (PI * chi.sinh())).sqrt();
    let zero = c(0.0);
    match integer_order(k) {
        Some(-1) => Ok(amp * (tau * chi).cos()),
        Some(0) => Ok(amp * sinc_shifted(tau, zero, chi)),
        Some(1) => {
            let s = sinc_shifted(tau, zero, chi);
            let coth = chi.cosh() / chi.sinh();
            let num = coth * s - (tau * chi).cos();
            let den = tau * tau + 1.0;
            if den.norm() < 1e-6 {
                // tau = +-i: expand around the removable point
                return p_direct(point, &QuadSettings::default());
            }
            Ok(amp * num / den)
        }
        _ => Err(Error::UnsupportedOrder(format!("no elementary form for K = {k}"))),
    }
}

/// Pair (n, -n) of the sinc series times e^{n chi} / d_n:
/// e^{-n chi} [sinc_shifted(tau, i n) + sinc_shifted(tau, -i n)].
fn sinc_pair(tau: Complex64, n: f64, chi: f64) -> Complex64 {
    let i = Complex64::i();
    let near = |s: f64| ((tau - i * s) * chi).norm() < SINC_SWITCH;
    if near(n) || near(-n) {
        let e = (-n * chi).exp();
        return e * (sinc_shifted(tau, i * n, chi) + sinc_shifted(tau, -i * n, chi));
    }
    let e2 = (-2.0 * n * chi).exp();
    let a = (tau * chi).sin() * (0.5 * (1.0 + e2));
    let b = (tau * chi).cos() * (0.5 * (1.0 - e2));
    2.0 * (a * tau + b * n) / (tau * tau + n * n)
}

/// Terms of the paired series in the Gamma-free normalisation (the caller
/// applies 1/Gamma(1+K)). Index 0 is the n = 0 term.
fn p_terms(table: &CoeffTable, tau: Complex64) -> Vec<Complex64> {
    let chi = table.chi;
    let pref = table.prefactor();
    let d = table.scaled();
    let mut out = Vec::with_capacity(d.len());
    out.push(2.0 * pref * d[0] * sinc_shifted(tau, c(0.0), chi));
    for (n, dn) in d.iter().enumerate().skip(1) {
        out.push(2.0 * pref * dn * sinc_pair(tau, n as f64, chi));
    }
    out
}

/// 2 sum_n R_n sin((tau - i n) chi)/(tau - i n). Integer K >= 0 is a finite
/// band; otherwise the tail past the table is summed from a fitted
/// asymptotic model, which also continues the series to K <= -1.
pub fn p_sinc_series(point: &ConicalPoint, table: &CoeffTable) -> Result<Complex64> {
    p_sinc_series_conditioned(point, table).map(|(v, _)| v)
}

/// Series value together with its cancellation ratio sum|t_n| / |sum t_n|.
pub fn p_sinc_series_conditioned(point: &ConicalPoint, table: &CoeffTable) -> Result<(Complex64, f64)> {
    check_table(point, table)?;
    let terms = p_terms(table, point.tau);
    if let Some(l) = integer_order(point.k) {
        if l >= 0 {
            let band = &terms[..=l as usize];
            let s: Complex64 = band.iter().rev().sum();
            let abs: f64 = band.iter().map(|t| t.norm()).sum();
            return Ok((s * table.rgamma(), abs / s.norm()));
        }
    }
    let ts = regularized_sum(&terms, point.k + 2.0, point.k);
    let abs: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() * rgamma_real(1.0 + point.k).abs();
    if ts.estimate > SERIES_WARN_REL * ts.value.norm() && ts.estimate > 1e-300 {
        return Err(Error::TruncationWarning { value: ts.value, estimate: ts.estimate });
    }
    Ok((ts.value, if abs > 0.0 { abs / ts.value.norm() } else { 1.0 }))
}

pub(crate) fn check_table(point: &ConicalPoint, table: &CoeffTable) -> Result<()> {
    if table.k != point.k || table.chi != point.chi {
        return Err(Error::InvalidArgument(format!(
            "table built for (K, chi) = ({}, {}), point has ({}, {})",
            table.k, table.chi, point.k, point.chi
        )));
    }
    Ok(())
}

/// (1 - cosh w / cosh chi) evaluated as 2 sinh((chi+w)/2) sinh((chi-w)/2) / cosh chi.
pub(crate) fn inner_base(w: f64, chi: f64) -> f64 {
    2.0 * (0.5 * (chi + w)).sinh() * (0.5 * (chi - w)).sinh() / chi.cosh()
}

/// Finite-range integral representation, valid for K > -1.
pub fn p_direct(point: &ConicalPoint, settings: &QuadSettings) -> Result<Complex64> {
    let ConicalPoint { k, tau, chi } = *point;
    if !(k > -1.0) {
        return Err(Error::RegionViolation(format!("direct P integral needs K > -1, got {k}")));
    }
    let pref = (1.0 / (2.0 * PI * chi.sinh())).sqrt() * (-k * chi.tanh().ln()).exp() * rgamma_real(1.0 + k);
    // even integrand: 2 int_0^chi cos(w tau) base^K, in d = chi - w so the
    // branch point sits at d = 0 where the endpoint map keeps full precision
    let f = |d: f64| {
        let b = 2.0 * (chi - 0.5 * d).sinh() * (0.5 * d).sinh() / chi.cosh();
        let wk = if k == 0.0 { 1.0 } else if b <= 0.0 { 0.0 } else { (k * b.ln()).exp() };
        (tau * (chi - d)).cos() * (2.0 * wk)
    };
    // large tau cancels the integral far below the integrand scale; an
    // absolute target under ~1e-14 of that scale is rounding noise
    let scale = 2.0 * chi * inner_base(0.0, chi).powf(k.max(0.0));
    let s = settings.with_abs_tol(settings.abs_tol.max(1e-14 * scale));
    // integer K: the integrand is smooth at w = chi, so no endpoint map
    let r = if k.fract() == 0.0 {
        quad_smooth(f, 0.0, chi, &s)?
    } else {
        quad_finite_exponent(f, 0.0, chi, k, &s)?
    };
    Ok(r.value * pref)
}

pub const DIRECT_CHI: f64 = 0.05;

/// Default evaluator: the sinc series, unless its tail is not under control
/// or its terms cancel by more than `1 / (eps * CANCELLATION_LIMIT)`; in both
/// cases the direct integral is used where it exists (K > -1).
pub fn p_eval(point: &ConicalPoint, settings: &QuadSettings) -> Result<Complex64> {
    // the series needs ~1/chi terms; the direct integral over [0, chi] is cheap there
    if point.chi < DIRECT_CHI && point.k > -1.0 {
        return p_direct(point, settings);
    }
    let table = table_for(point.k, point.chi, point.tau, settings)?;
    match p_sinc_series_conditioned(point, &table) {
        Ok((v, cond)) => {
            if cond * f64::EPSILON > CANCELLATION_LIMIT && point.k > -1.0 {
                p_direct(point, settings)
            } else {
                Ok(v)
            }
        }
        Err(Error::TruncationWarning { value, estimate }) => {
            if point.k > -1.0 {
                p_direct(point, settings)
            } else {
                Err(Error::TruncationWarning { value, estimate })
            }
        }
        Err(e) => Err(e),
    }
}

/// [(2l+1) coth chi P_l - P_{l-1}] / (tau^2 + (l+1)^2), the next member of the
/// order ladder (P_l = P^{-1/2-l}).
pub fn p_recurrence_step(ell: u32, tau: Complex64, chi: f64, p_l: Complex64, p_lm1: Complex64) -> Result<Complex64> {
    let l1 = (ell + 1) as f64;
    let den = tau * tau + l1 * l1;
    if den.norm() <= 1e-14 * l1 * l1 {
        return Err(Error::RecurrencePole(l1 * l1));
    }
    let coth = chi.cosh() / chi.sinh();
    Ok(((2.0 * ell as f64 + 1.0) * coth * p_l - p_lm1) / den)
}

// ---- derivative form -------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Trig {
    Cos,
    Sin,
}

/// Basis element trig(tau chi) cosh^b(chi) sinh^{-j}(chi) chi^c; the
/// coefficient is a polynomial in tau.
type Key = (Trig, u8, i32, u8);

#[derive(Debug, Clone, Default)]
struct SymExpr {
    terms: BTreeMap<Key, Vec<f64>>,
}

fn poly_add(acc: &mut Vec<f64>, p: &[f64], scale: f64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(p) {
        *a += scale * b;
    }
}

fn poly_shift(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend_from_slice(p);
    out
}

fn poly_eval(p: &[f64], x: Complex64) -> Complex64 {
    let mut acc = c(0.0);
    for coef in p.iter().rev() {
        acc = acc * x + coef;
    }
    acc
}

impl SymExpr {
    fn add(&mut self, key: Key, p: &[f64], scale: f64) {
        poly_add(self.terms.entry(key).or_default(), p, scale);
    }

    /// (1/sinh chi) d/dchi; only applied to chi-power-free expressions.
    fn apply_d(&self) -> SymExpr {
        let mut out = SymExpr::default();
        for (&(trig, b, j, cp), p) in &self.terms {
            debug_assert_eq!(cp, 0);
            let tp = poly_shift(p);
            match trig {
                Trig::Cos => out.add((Trig::Sin, b, j + 1, 0), &tp, -1.0),
                Trig::Sin => out.add((Trig::Cos, b, j + 1, 0), &tp, 1.0),
            }
            if b == 1 {
                out.add((trig, 0, j, 0), p, 1.0);
                // -j cosh^2 sinh^{-j-2}, cosh^2 = 1 + sinh^2
                if j != 0 {
                    out.add((trig, 0, j + 2, 0), p, -(j as f64));
                    out.add((trig, 0, j, 0), p, -(j as f64));
                }
            } else if j != 0 {
                out.add((trig, 1, j + 2, 0), p, -(j as f64));
            }
        }
        out
    }

    /// d/dtau.
    fn d_tau(&self) -> SymExpr {
        let mut out = SymExpr::default();
        for (&(trig, b, j, cp), p) in &self.terms {
            if p.len() > 1 {
                let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect();
                out.add((trig, b, j, cp), &dp, 1.0);
            }
            match trig {
                Trig::Cos => out.add((Trig::Sin, b, j, cp + 1), p, -1.0),
                Trig::Sin => out.add((Trig::Cos, b, j, cp + 1), p, 1.0),
            }
        }
        out
    }

    fn eval(&self, tau: Complex64, chi: f64) -> Complex64 {
        let sh = chi.sinh();
        let ch = chi.cosh();
        let (s, co) = ((tau * chi).sin(), (tau * chi).cos());
        let mut acc = c(0.0);
        for (&(trig, b, j, cp), p) in &self.terms {
            let t = if trig == Trig::Cos { co } else { s };
            let g = ch.powi(b as i32) * sh.powi(-j) * chi.powi(cp as i32);
            acc += poly_eval(p, tau) * t * g;
        }
        acc
    }
}

fn derivative_expr(ell: u32) -> SymExpr {
    let mut e = SymExpr::default();
    e.add((Trig::Cos, 0, 0, 0), &[1.0], 1.0);
    for _ in 0..=ell {
        e = e.apply_d();
    }
    e
}

/// tau^2 prod_k (tau^2 + k^2) as a real polynomial in tau.
fn norm_denominator(ell: u32) -> Vec<f64> {
    let mut d = vec![0.0, 0.0, 1.0];
    for k in 1..=ell {
        let mut next = vec![0.0; d.len() + 2];
        for (i, v) in d.iter().enumerate() {
            next[i] += v * (k * k) as f64;
            next[i + 2] += v;
        }
        d = next;
    }
    d
}

fn poly_deriv_at(p: &[f64], order: usize, x: Complex64) -> Complex64 {
    let mut q = p.to_vec();
    for _ in 0..order {
        if q.len() <= 1 {
            return c(0.0);
        }
        q = q.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect();
    }
    poly_eval(&q, x)
}

/// Closed form (sinh^{-1} d/dchi)^{l+1} cos(tau chi) with the N_l^2 factor.
/// Near the zeros of the N_l^{-2} polynomial (tau = 0, +-i, ..., +-i l) the
/// quotient is taken from Taylor expansions of numerator and denominator
/// about the zero, so the removable singularity cancels analytically.
pub fn p_derivative_form(ell: i64, tau: Complex64, chi: f64) -> Result<Complex64> {
    if ell < 0 || ell > DERIVATIVE_FORM_MAX_ELL {
        return Err(Error::UnsupportedOrder(format!(
            "derivative form supports 0 <= l <= {DERIVATIVE_FORM_MAX_ELL}, got {ell}"
        )));
    }
    if !(chi > 0.0) {
        return Err(Error::InvalidArgument("chi must be positive".into()));
    }
    let l = ell as u32;
    let expr = derivative_expr(l);
    let den = norm_denominator(l);
    let sign = if (l + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let front = sign * (PI / 2.0).sqrt() * (2.0 / PI) * chi.sinh().powf(l as f64 + 0.5);

    // nearest zero of the denominator
    let mut nearest: Option<(Complex64, usize)> = None;
    for k in 0..=l {
        let z = Complex64::new(0.0, k as f64);
        for zz in [z, -z] {
            let order = if k == 0 { 2 } else { 1 };
            if (tau - zz).norm() < 1e-3 {
                nearest = Some((zz, order));
            }
        }
    }
    let ratio = match nearest {
        None => expr.eval(tau, chi) / poly_deriv_at(&den, 0, tau),
        Some((z0, m)) => {
            const TERMS: usize = 8;
            let h = tau - z0;
            let mut num_d = Vec::with_capacity(TERMS + m);
            let mut e = expr.clone();
            let mut fact = 1.0;
            for j in 0..(TERMS + m) {
                if j > 0 {
                    fact *= j as f64;
                    e = e.d_tau();
                }
                num_d.push(e.eval(z0, chi) / fact);
            }
            let mut den_d = Vec::with_capacity(TERMS + m);
            let mut fact = 1.0;
            for j in 0..(TERMS + m) {
                if j > 0 {
                    fact *= j as f64;
                }
                den_d.push(poly_deriv_at(&den, j, z0) / fact);
            }
            // drop the m leading zeros and divide the power series
            let a = &num_d[m..];
            let b = &den_d[m..];
            let mut q = vec![c(0.0); TERMS];
            for i in 0..TERMS {
                let mut s = a[i];
                for j in 0..i {
                    s -= q[j] * b[i - j];
                }
                q[i] = s / b[0];
            }
            let mut acc = c(0.0);
            for coef in q.iter().rev() {
                acc = acc * h + coef;
            }
            acc
        }
    };
    Ok(front * ratio)
}

/// Expansion of P^{-1/2-K} over integer-order members P^{-1/2-l}, with the
/// outer sum cut at n <= ell_max. The inner members come from the direct
/// integral.
pub fn p_integer_expansion(
    k: f64,
    tau: Complex64,
    chi: f64,
    ell_max: usize,
    settings: &QuadSettings,
) -> Result<Complex64> {
    if !(k > -1.0) {
        return Err(Error::RegionViolation(format!("integer expansion needs K > -1, got {k}")));
    }
    let members: Vec<Complex64> = (0..=ell_max)
        .map(|l| p_direct(&ConicalPoint::new(l as f64, tau, chi)?, settings))
        .collect::<Result<_>>()?;
    integer_expansion_sum(k, chi, &members, chi.tanh(), |_| 1.0)
}

/// sum_n sum_{l<=n} (-1)^{n+l}/(n-l)! t^{l-K} / Gamma(1+K-n) * w(l) * member_l.
/// For non-integer K the outer terms decay algebraically (like n^{-K-2});
/// the remainder past the last n is estimated from a fit of that decay.
pub(crate) fn integer_expansion_sum(
    k: f64,
    _chi: f64,
    members: &[Complex64],
    t: f64,
    weight: impl Fn(usize) -> f64,
) -> Result<Complex64> {
    let ell_max = members.len() - 1;
    let mut outer = Vec::with_capacity(ell_max + 1);
    for n in 0..=ell_max {
        let rg = rgamma_real(1.0 + k - n as f64);
        if rg == 0.0 {
            outer.push(c(0.0));
            continue;
        }
        let mut inner = c(0.0);
        let mut inv_fact = 1.0; // 1/(n-l)!
        for l in (0..=n).rev() {
            if l < n {
                inv_fact /= (n - l) as f64;
            }
            let sgn = if (n + l) % 2 == 0 { 1.0 } else { -1.0 };
            inner += members[l] * (sgn * inv_fact * t.powf(l as f64 - k) * weight(l));
        }
        outer.push(inner * rg);
    }
    let plain: Complex64 = outer.iter().rev().sum();
    if integer_order(k).is_some() {
        return Ok(plain);
    }
    if ell_max < 16 {
        let last = outer[ell_max].norm();
        return if last > EXPANSION_WARN_REL * plain.norm() {
            Err(Error::TruncationWarning { value: plain, estimate: last })
        } else {
            Ok(plain)
        };
    }
    let ts = regularized_sum(&outer, k + 2.0, 0.0);
    let estimate = ts.estimate;
    if estimate > EXPANSION_WARN_REL * ts.value.norm() {
        return Err(Error::TruncationWarning { value: ts.value, estimate });
    }
    Ok(ts.value)
}
