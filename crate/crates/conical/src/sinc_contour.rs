//! Line integrals of products of sine factors over powers of tau: the
//! closed form for a dominant frequency, Nyquist sampling sums, a plain
//! quadrature reference, and exact rational Borwein values.

use crate::error::{Error, Result};
use crate::kernel::quad::{adaptive_gk, power_oscillatory_tail};
use crate::settings::QuadSettings;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::f64::consts::PI;

/// p(tau) * prod_n sin(chi_n tau) / tau, with p given by ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SincProduct {
    pub frequencies: Vec<f64>,
    pub polynomial: Option<Vec<f64>>,
}

impl SincProduct {
    pub fn new(frequencies: Vec<f64>, polynomial: Option<Vec<f64>>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::InvalidArgument("at least one frequency is required".into()));
        }
        if frequencies.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
            return Err(Error::InvalidArgument("frequencies must be positive and finite".into()));
        }
        Ok(SincProduct { frequencies, polynomial })
    }

    pub fn is_dominant(&self) -> bool {
        let rest: f64 = self.frequencies[1..].iter().sum();
        self.frequencies[0] >= rest
    }

    fn poly(&self) -> Vec<f64> {
        self.polynomial.clone().unwrap_or_else(|| vec![1.0])
    }

    pub fn evaluate(&self, tau: f64) -> f64 {
        let p = poly_eval(&self.poly(), tau);
        if tau == 0.0 {
            return p * self.frequencies.iter().product::<f64>();
        }
        let mut v = p;
        for &f in &self.frequencies {
            v *= (f * tau).sin() / tau;
        }
        v
    }

    /// Highest power with a non-zero coefficient must stay below the number
    /// of sine factors for the line integral to exist.
    fn check_summable(&self) -> Result<()> {
        let m = self.frequencies.len();
        for (j, &c) in self.poly().iter().enumerate() {
            if c != 0.0 && j >= m {
                return Err(Error::NonConvergentWeighted(format!(
                    "tau^{j} against {m} sine factor(s) does not decay"
                )));
            }
        }
        Ok(())
    }
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// int sin(chi tau)/tau over the real line.
pub fn sinc_line_integral(chi: f64) -> Result<f64> {
    if chi == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(PI * chi.signum())
}

/// pi p(0) prod_{n>=1} chi_n, valid when chi_0 is at least the sum of the others.
pub fn dominant_product_integral(prod: &SincProduct) -> Result<f64> {
    if !prod.is_dominant() {
        return Err(Error::NotDominant(format!(
            "chi_0 = {} is below the sum of the remaining frequencies",
            prod.frequencies[0]
        )));
    }
    prod.check_summable()?;
    let p = prod.poly();
    let m = prod.frequencies.len();
    // the top admissible power only converges conditionally; at exact
    // balance a non-oscillating 1/tau piece survives
    let rest: f64 = prod.frequencies[1..].iter().sum();
    if m >= 1 && p.len() == m && p[m - 1] != 0.0 && prod.frequencies[0] == rest && m % 2 == 0 {
        return Err(Error::NonConvergentWeighted("balanced frequencies with tau^(M-1) weight".into()));
    }
    let p0 = p.first().copied().unwrap_or(0.0);
    if p.len() > 1 && p0 == 0.0 {
        return Err(Error::UnsupportedWeight("weight vanishes at the tau = 0 pole".into()));
    }
    Ok(PI * p0 * prod.frequencies[1..].iter().product::<f64>())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SamplingPlan {
    pub chi0: f64,
    pub delta_tau: f64,
    pub n_cut: usize,
}

impl SamplingPlan {
    pub const MAX_DEFAULT_CUT: usize = 4096;

    pub fn new(chi0: f64, n_cut: usize) -> Result<Self> {
        if !(chi0 > 0.0 && chi0.is_finite()) {
            return Err(Error::InvalidArgument("chi0 must be positive".into()));
        }
        Ok(SamplingPlan { chi0, delta_tau: PI / chi0, n_cut })
    }

    /// Smallest n_cut whose crude tail bound sum_j |p_j| dtau^{j-M+1} n^{j-M+1}/(M-j-1)
    /// is below `abs_tol`, capped at `MAX_DEFAULT_CUT`.
    pub fn with_default_cut(chi0: f64, prod: &SincProduct, abs_tol: f64) -> Result<Self> {
        let mut plan = Self::new(chi0, 1)?;
        let m = prod.frequencies.len() as i32;
        let fprod: f64 = prod.frequencies.iter().map(|f| f.abs().max(1.0)).product();
        let p = prod.poly();
        let bound = |n: usize| -> f64 {
            p.iter()
                .enumerate()
                .filter(|(j, c)| **c != 0.0 && m - *j as i32 > 1)
                .map(|(j, c)| {
                    let s = (m - j as i32) as f64;
                    2.0 * c.abs() * fprod.min(1.0 / plan.delta_tau.powf(s - 1.0)) * (n as f64).powf(1.0 - s) / (s - 1.0)
                })
                .sum()
        };
        let mut n = 16usize;
        while n < Self::MAX_DEFAULT_CUT && bound(n) > abs_tol {
            n *= 2;
        }
        plan.n_cut = n.min(Self::MAX_DEFAULT_CUT);
        Ok(plan)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SamplingResult {
    pub value: f64,
    /// The part of `value` contributed by |n| > n_cut.
    pub tail: f64,
    pub n_cut: usize,
}

fn bernoulli_numbers(n: usize) -> Vec<f64> {
    // Akiyama-Tanigawa, exact enough in f64 for the small orders used here
    let mut b = vec![0.0; n + 1];
    let mut a = vec![0.0; n + 1];
    for m in 0..=n {
        a[m] = 1.0 / (m as f64 + 1.0);
        for j in (1..=m).rev() {
            a[j - 1] = j as f64 * (a[j - 1] - a[j]);
        }
        b[m] = a[0];
    }
    // B_1 = -1/2 convention
    if n >= 1 {
        b[1] = -0.5;
    }
    b
}

fn bernoulli_poly(m: usize, x: f64, bern: &[f64]) -> f64 {
    let mut binom = 1.0;
    let mut s = 0.0;
    for k in 0..=m {
        s += binom * bern[k] * x.powi((m - k) as i32);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    s
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// sum_{n>=1} cos(n theta)/n^s (s even) or sin(n theta)/n^s (s odd), s >= 1.
fn lattice_sum(theta: f64, s: usize, bern: &[f64]) -> f64 {
    let two_pi = 2.0 * PI;
    let mut x = (theta / two_pi).rem_euclid(1.0);
    if x > 1.0 - 1e-15 {
        x = 0.0;
    }
    let sign = if (s / 2) % 2 == 0 { -1.0 } else { 1.0 };
    if s % 2 == 1 && x == 0.0 {
        return 0.0;
    }
    // (-1)^{floor(s/2)+1} (2pi)^s B_s(x) / (2 s!)
    sign * two_pi.powi(s as i32) * bernoulli_poly(s, x, bern) / (2.0 * factorial(s))
}

/// dtau * sum_n p(n dtau) prod_m sin(chi_m n dtau)/(n dtau). Terms with
/// |n| <= n_cut are summed directly; the rest is the exact lattice sum of
/// the product's harmonics minus their explicit partial sums.
pub fn sampling_sum(frequencies: &[f64], polynomial: Option<&[f64]>, plan: &SamplingPlan) -> Result<SamplingResult> {
    let prod = SincProduct::new(frequencies.to_vec(), polynomial.map(|p| p.to_vec()))?;
    prod.check_summable()?;
    let total_band: f64 = frequencies.iter().sum();
    if plan.chi0 < total_band * (1.0 - 1e-15) {
        return Err(Error::NotDominant(format!(
            "sampling bandwidth {} is below the product bandwidth {total_band}",
            plan.chi0
        )));
    }
    let m = frequencies.len();
    if m > 24 {
        return Err(Error::InvalidArgument("at most 24 sine factors".into()));
    }
    let dt = plan.delta_tau;
    let p = prod.poly();
    // odd powers cancel between n and -n
    let even: Vec<(usize, f64)> = p.iter().enumerate().filter(|(j, c)| j % 2 == 0 && **c != 0.0).map(|(j, c)| (j, *c)).collect();

    let mut explicit = p[0] * frequencies.iter().product::<f64>();
    for n in (1..=plan.n_cut).rev() {
        let t = n as f64 * dt;
        let mut sines = 1.0;
        for &f in frequencies {
            sines *= (f * t).sin();
        }
        let w: f64 = even.iter().map(|&(j, c)| c * t.powi(j as i32 - m as i32)).sum();
        explicit += 2.0 * w * sines;
    }

    // prod sin(chi_m t) = (2i)^{-M} sum_sigma (prod sigma) e^{i t sum sigma chi}
    let bern = bernoulli_numbers(m + 1);
    let unit = 0.5f64.powi(m as i32) * if m % 4 == 0 || m % 4 == 1 { 1.0 } else { -1.0 };
    let mut tail = 0.0;
    for &(j, c) in &even {
        let s = m - j;
        let mut full = 0.0;
        let mut partial = 0.0;
        for mask in 0u32..(1u32 << m) {
            let mut theta = 0.0;
            let mut sign = 1.0;
            for (b, &f) in frequencies.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    theta -= f * dt;
                    sign = -sign;
                } else {
                    theta += f * dt;
                }
            }
            full += sign * lattice_sum(theta, s, &bern);
            let mut ps = 0.0;
            for n in (1..=plan.n_cut).rev() {
                let nf = n as f64;
                let harmonic = if s % 2 == 0 { (nf * theta).cos() } else { (nf * theta).sin() };
                ps += harmonic / nf.powi(s as i32);
            }
            partial += sign * ps;
        }
        // real part of (2i)^{-M} e^{i n theta} pairs: cos for even M, sin for odd M
        tail += 2.0 * c * dt.powi(j as i32 - m as i32) * unit * (full - partial);
    }
    Ok(SamplingResult { value: dt * (explicit + tail), tail: dt * tail, n_cut: plan.n_cut })
}

/// Reference value by adaptive quadrature on [0, T] and the exactly
/// integrated harmonics beyond T.
pub fn sinc_product_quadrature(prod: &SincProduct, settings: &QuadSettings) -> Result<f64> {
    prod.check_summable()?;
    let m = prod.frequencies.len();
    let fmin = prod.frequencies.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_end = (400.0 / fmin).max(200.0);
    let f = |t: f64| Complex64::new(0.5 * (prod.evaluate(t) + prod.evaluate(-t)), 0.0);
    let period = PI / prod.frequencies.iter().sum::<f64>();
    let panels = ((t_end / period).ceil() as usize).clamp(8, 20_000);
    let breaks: Vec<f64> = (0..=panels).map(|k| t_end * k as f64 / panels as f64).collect();
    let body = adaptive_gk(&f, &breaks, settings);
    if !body.result.converged {
        return Err(Error::NonConvergence(format!("sinc product body: error {:e}", body.result.err_estimate)));
    }
    let p = prod.poly();
    let mut tail = 0.0;
    for (j, &c) in p.iter().enumerate() {
        if c == 0.0 || j % 2 == 1 {
            continue;
        }
        let s = (m - j) as f64;
        for mask in 0u32..(1u32 << m) {
            let mut w = 0.0;
            let mut sign = 1.0;
            for (b, &fr) in prod.frequencies.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    w -= fr;
                    sign = -sign;
                } else {
                    w += fr;
                }
            }
            if w == 0.0 && m % 2 == 1 {
                // a sine harmonic of zero frequency vanishes
                continue;
            }
            let unit = Complex64::new(0.0, 2.0).powi(-(m as i32));
            tail += (c * sign * unit * power_oscillatory_tail(s, w, t_end)).re;
        }
    }
    Ok(2.0 * (body.result.value.re + tail))
}

// ---- exact piecewise polynomials ------------------------------------------

/// Piecewise polynomial with rational coefficients in x (ascending powers),
/// zero outside [breakpoints[0], breakpoints[last]].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseRationalPoly {
    pub breakpoints: Vec<BigRational>,
    pub pieces: Vec<Vec<BigRational>>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn peval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn antiderivative(p: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    for (k, c) in p.iter().enumerate() {
        out.push(c / rat(k as i64 + 1));
    }
    out
}

/// q(x) = p(x + h)
fn shift(p: &[BigRational], h: &BigRational) -> Vec<BigRational> {
    let n = p.len();
    let mut out = vec![BigRational::zero(); n];
    for (k, c) in p.iter().enumerate() {
        // c (x + h)^k
        let mut binom = BigInt::one();
        let mut hp = BigRational::one();
        for i in (0..=k).rev() {
            out[i] += c * BigRational::from_integer(binom.clone()) * &hp;
            hp *= h;
            binom = binom * BigInt::from(i) / BigInt::from(k - i + 1);
        }
    }
    out
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

impl PiecewiseRationalPoly {
    /// Unit-mass indicator of [-h, h].
    pub fn unit_box(half_width: &BigRational) -> Self {
        assert!(half_width.is_positive(), "half width must be positive");
        let height = BigRational::one() / (rat(2) * half_width);
        PiecewiseRationalPoly { breakpoints: vec![-half_width.clone(), half_width.clone()], pieces: vec![vec![height]] }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let bp = &self.breakpoints;
        if x < &bp[0] || x > &bp[bp.len() - 1] {
            return BigRational::zero();
        }
        let i = match bp.binary_search(x) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        peval(&self.pieces[i], x)
    }

    pub fn integral(&self) -> BigRational {
        let mut total = BigRational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let a = antiderivative(p);
            total += peval(&a, &self.breakpoints[i + 1]) - peval(&a, &self.breakpoints[i]);
        }
        total
    }

    /// Antiderivative as (pieces, value at the right end); constant beyond.
    fn cumulative(&self) -> (Vec<Vec<BigRational>>, BigRational) {
        let mut out = Vec::with_capacity(self.pieces.len());
        let mut acc = BigRational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let mut a = antiderivative(p);
            let a0 = peval(&a, &self.breakpoints[i]);
            a[0] = &a[0] - a0 + &acc;
            acc = peval(&a, &self.breakpoints[i + 1]);
            out.push(a);
        }
        (out, acc)
    }

    /// Polynomial of the antiderivative valid around x (given as a point
    /// strictly inside a new interval).
    fn cumulative_at(&self, cum: &[Vec<BigRational>], total: &BigRational, x: &BigRational) -> Vec<BigRational> {
        let bp = &self.breakpoints;
        if x <= &bp[0] {
            return vec![BigRational::zero()];
        }
        if x >= &bp[bp.len() - 1] {
            return vec![total.clone()];
        }
        let i = match bp.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        cum[i].clone()
    }

    /// Exact convolution with the unit-mass box of half-width h.
    pub fn convolve_box(&self, half_width: &BigRational) -> Self {
        assert!(half_width.is_positive(), "half width must be positive");
        let h = half_width;
        let (cum, total) = self.cumulative();
        let mut bp: Vec<BigRational> = self.breakpoints.iter().flat_map(|b| [b - h, b + h]).collect();
        bp.sort();
        bp.dedup();
        let scale = BigRational::one() / (rat(2) * h);
        let mut pieces = Vec::with_capacity(bp.len() - 1);
        for w in bp.windows(2) {
            let mid = (&w[0] + &w[1]) / rat(2);
            let upper = shift(&self.cumulative_at(&cum, &total, &(&mid + h)), h);
            let lower = shift(&self.cumulative_at(&cum, &total, &(&mid - h)), &-h);
            let n = upper.len().max(lower.len());
            let g: Vec<BigRational> = (0..n)
                .map(|k| {
                    let u = upper.get(k).cloned().unwrap_or_else(BigRational::zero);
                    let l = lower.get(k).cloned().unwrap_or_else(BigRational::zero);
                    (u - l) * &scale
                })
                .collect();
            pieces.push(trim(g));
        }
        let mut out = PiecewiseRationalPoly { breakpoints: bp, pieces };
        out.merge();
        out
    }

    /// Drop breakpoints between identical neighbouring polynomials.
    fn merge(&mut self) {
        let mut bp = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Vec<BigRational>> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if pieces.last() == Some(p) {
                bp.pop();
            } else {
                pieces.push(p.clone());
            }
            bp.push(self.breakpoints[i + 1].clone());
        }
        self.breakpoints = bp;
        self.pieces = pieces;
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }
}

/// int prod_n sinc(chi_n tau) dtau divided by its value pi/chi_0 in the
/// dominant regime: exactly 1 while chi_0 >= sum of the rest, below 1 after.
/// Cost grows with the number of distinct breakpoints, O(2^N) at worst.
pub fn borwein_exact(frequencies: &[BigRational]) -> Result<BigRational> {
    if frequencies.is_empty() || frequencies.iter().any(|f| !f.is_positive()) {
        return Err(Error::InvalidArgument("frequencies must be positive rationals".into()));
    }
    let mut g = PiecewiseRationalPoly::unit_box(&frequencies[0]);
    for f in &frequencies[1..] {
        g = g.convolve_box(f);
    }
    // int prod sinc = 2 pi g(0)
    Ok(g.eval(&BigRational::zero()) * rat(2) * &frequencies[0])
}

/// Parse "p/q" or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
