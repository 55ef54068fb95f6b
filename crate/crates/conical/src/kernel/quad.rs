//! Quadrature: periodic trapezoid, adaptive Gauss–Kronrod with endpoint
//! substitution, and a panel integrator for exponentially decaying tails.

use crate::error::{Error, Result};
use crate::settings::{QuadResult, QuadSettings};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_928_651,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel: (integral, error estimate).
pub fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let (v, e, _) = gk21_abs(f, a, b);
    (v, e)
}

/// As `gk21`, also returning the integral of |f| over the panel.
fn gk21_abs<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();
    let fc = f(centr);
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resk = fc * WGK[10];
    let mut resabs = WGK[10] * fc.norm();
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let absc = hlgth * XGK[j];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
        resk += (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).norm() + (fv2[j] - reskh).norm());
    }
    let result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut abserr = ((resk - resg) * hlgth).norm();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (1.0f64).min((200.0 * abserr / resasc).powf(1.5));
    }
    // rounding floor (QUADPACK uses 50 eps; the sums here are short enough
    // for a few eps, which keeps cancelling integrands convergent)
    if resabs > f64::MIN_POSITIVE / (4.0 * f64::EPSILON) {
        abserr = abserr.max(4.0 * f64::EPSILON * resabs);
    }
    (result, abserr, resabs)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Outcome of the adaptive driver, including where the worst panel sits.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOutcome {
    pub result: QuadResult,
    pub worst_a: f64,
    pub worst_b: f64,
    pub evaluations: usize,
}

/// Globally adaptive GK21 over the given initial breakpoints.
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(
    f: &F,
    breaks: &[f64],
    settings: &QuadSettings,
) -> AdaptiveOutcome {
    let mut heap = BinaryHeap::new();
    let mut frozen_val = Complex64::new(0.0, 0.0);
    let mut frozen_err = 0.0;
    let mut frozen_abs = 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    let mut evals = 0usize;
    for w in breaks.windows(2) {
        let (v, e, ab) = gk21_abs(f, w[0], w[1]);
        evals += 21;
        total += v;
        total_err += e;
        total_abs += ab;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e, abs: ab });
    }
    // an error within a few rounding floors cannot be reduced by splitting
    let rounding_limited = |err: f64, abs: f64| err <= 16.0 * f64::EPSILON * abs;
    let mut splits = 0usize;
    let mut bad = !total.re.is_finite() || !total.im.is_finite();
    while !bad {
        if total_err <= settings.target(total.norm()) || rounding_limited(total_err, total_abs) {
            // running sums drift; confirm on fresh ones before stopping
            total = frozen_val + heap.iter().map(|p| p.value).sum::<Complex64>();
            total_err = frozen_err + heap.iter().map(|p| p.err).sum::<f64>();
            total_abs = frozen_abs + heap.iter().map(|p| p.abs).sum::<f64>();
            if total_err <= settings.target(total.norm()) || rounding_limited(total_err, total_abs) {
                break;
            }
        }
        if splits >= settings.max_subdivisions {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) || (p.b - p.a) <= 1e-14 * (p.a.abs().max(p.b.abs()).max(1e-300)) {
            frozen_val += p.value;
            frozen_err += p.err;
            frozen_abs += p.abs;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1, a1) = gk21_abs(f, p.a, m);
        let (v2, e2, a2) = gk21_abs(f, m, p.b);
        evals += 42;
        splits += 1;
        // halves reproduce the parent to rounding: the GK estimate is noise
        // there, so keep the panel with the observed change as its error
        let change = (v1 + v2 - p.value).norm();
        if change <= 64.0 * f64::EPSILON * p.abs && e1 + e2 > change {
            let e = change.max(4.0 * f64::EPSILON * (a1 + a2));
            frozen_val += v1 + v2;
            frozen_err += e;
            frozen_abs += a1 + a2;
            total += v1 + v2 - p.value;
            total_err += e - p.err;
            total_abs += a1 + a2 - p.abs;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        total_abs += a1 + a2 - p.abs;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1, abs: a1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2, abs: a2 });
        if splits % 64 == 0 {
            total = frozen_val + heap.iter().map(|p| p.value).sum::<Complex64>();
            total_err = frozen_err + heap.iter().map(|p| p.err).sum::<f64>();
            total_abs = frozen_abs + heap.iter().map(|p| p.abs).sum::<f64>();
        }
        bad = !total.re.is_finite() || !total.im.is_finite();
    }
    total = frozen_val + heap.iter().map(|p| p.value).sum::<Complex64>();
    total_err = (frozen_err + heap.iter().map(|p| p.err).sum::<f64>()).max(0.0);
    total_abs = frozen_abs + heap.iter().map(|p| p.abs).sum::<f64>();
    let converged = total.re.is_finite()
        && total.im.is_finite()
        && (total_err <= settings.target(total.norm()) || rounding_limited(total_err, total_abs));
    let (wa, wb) = heap.peek().map(|p| (p.a, p.b)).unwrap_or((0.0, 0.0));
    AdaptiveOutcome {
        result: QuadResult { value: total, err_estimate: total_err, converged },
        worst_a: wa,
        worst_b: wb,
        evaluations: evals,
    }
}

/// Trapezoid rule on [0, 2pi) with node doubling.
pub fn quad_periodic<F: Fn(f64) -> Complex64>(f: F, settings: &QuadSettings) -> Result<QuadResult> {
    let mut n = settings.periodic_points.max(16);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let v = f(2.0 * PI * k as f64 / n as f64);
        sum += v;
        abs_sum += v.norm();
    }
    let mut prev = sum * (2.0 * PI / n as f64);
    const CAP: usize = 1 << 20;
    while n < CAP {
        let h = 2.0 * PI / (2 * n) as f64;
        for k in 0..n {
            let v = f(h * (2 * k + 1) as f64);
            sum += v;
            abs_sum += v.norm();
        }
        n *= 2;
        let cur = sum * (2.0 * PI / n as f64);
        let err = (cur - prev).norm();
        if !cur.re.is_finite() || !cur.im.is_finite() {
            return Err(Error::NonConvergence("non-finite periodic integrand".into()));
        }
        // rounding floor relative to the integral of |f|
        let floor = 16.0 * f64::EPSILON * abs_sum * (2.0 * PI / n as f64);
        if err <= settings.target(cur.norm()).max(floor) {
            return Ok(QuadResult { value: cur, err_estimate: err, converged: true });
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!("trapezoid rule did not converge with {CAP} nodes")))
}

/// Substitution exponent that smooths an endpoint factor (x - a)^alpha.
pub fn smoothing_power(alpha: f64) -> f64 {
    if alpha > -1.0 {
        (2.0f64).max(2.0 / (1.0 + alpha))
    } else {
        2.0
    }
}

/// Integral over [a, b] with possible integrable branch points at both ends.
/// Each half is mapped by w = a + (m - a) u^p, which for p = 2 removes
/// singularities of exponent > -1/2; stronger ones need `quad_finite_exponent`.
pub fn quad_finite<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<QuadResult> {
    quad_finite_power(f, a, b, 2.0, settings)
}

/// As `quad_finite`, with the substitution power matched to a known endpoint
/// exponent `alpha` (> -1).
pub fn quad_finite_exponent<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    alpha: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    quad_finite_power(f, a, b, smoothing_power(alpha), settings)
}

pub fn quad_finite_power<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    p: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    let m = 0.5 * (a + b);
    let hl = m - a;
    let hr = b - m;
    let g = |u: f64| -> Complex64 {
        if u < 1.0 {
            let up = u.powf(p - 1.0);
            let w = a + hl * up * u;
            f(w) * (p * hl * up)
        } else {
            let v = 2.0 - u;
            let vp = v.powf(p - 1.0);
            let w = b - hr * vp * v;
            f(w) * (p * hr * vp)
        }
    };
    let out = adaptive_gk(&g, &[0.0, 0.5, 1.0, 1.5, 2.0], settings);
    if out.result.converged {
        return Ok(out.result);
    }
    let near_end = out.worst_a <= 1e-6 || out.worst_b >= 2.0 - 1e-6;
    let tiny = (out.worst_b - out.worst_a) < 1e-8;
    if near_end && tiny {
        Err(Error::SingularityTooStrong(format!(
            "error {:e} concentrated at an endpoint",
            out.result.err_estimate
        )))
    } else {
        Err(Error::NonConvergence(format!(
            "adaptive quadrature stopped at error {:e} (value {})",
            out.result.err_estimate, out.result.value
        )))
    }
}

/// Plain adaptive GK over [a, b] (no endpoint mapping).
pub fn quad_smooth<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<QuadResult> {
    let out = adaptive_gk(&f, &[a, b], settings);
    if out.result.converged {
        Ok(out.result)
    } else {
        Err(Error::NonConvergence(format!(
            "adaptive quadrature stopped at error {:e}",
            out.result.err_estimate
        )))
    }
}

/// Integral over [a, inf) of an integrand bounded by C e^{-decay_rate w}.
/// The first panel carries the endpoint substitution; the tail bound is the
/// envelope max|f| e^{d (w - w_end)} / d sampled on the last panel.
pub fn quad_semi_infinite_oscillatory<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    decay_rate: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    quad_semi_infinite_with(f, a, decay_rate, 2.0, settings)
}

pub fn quad_semi_infinite_with<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    decay_rate: f64,
    p: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    if !(decay_rate > 0.0) {
        return Err(Error::NonDecayingIntegrand(format!("decay rate {decay_rate} <= 0")));
    }
    let d = decay_rate;
    let width = 1.0f64.min(4.0 / d).max(0.25);
    let inner = settings.with_abs_tol(settings.abs_tol * 0.1);
    let first = quad_finite_power(&f, a, a + width, p, &inner)?;
    let mut total = first.value;
    let mut err = first.err_estimate;
    let mut x = a + width;
    let mut envelope_prev = f64::INFINITY;
    let mut growing = 0usize;
    for _panel in 0..200_000 {
        let target = settings.target(total.norm());
        // envelope at x from samples of the panel just finished
        let mut env: f64 = 0.0;
        for k in 0..=16 {
            let w = x - width * k as f64 / 16.0;
            let v = f(w).norm();
            if !v.is_finite() {
                return Err(Error::NonDecayingIntegrand(format!("non-finite integrand at {w}")));
            }
            env = env.max(v * (-d * (x - w)).exp());
        }
        let tail = env / d;
        if tail + err <= target || tail <= 0.25 * target {
            // further panels cannot change the value; report what we have
            let err_estimate = err + tail;
            let converged = err_estimate <= settings.target(total.norm());
            return Ok(QuadResult { value: total, err_estimate, converged });
        }
        if env >= envelope_prev {
            growing += 1;
            if growing > 40 {
                return Err(Error::NonDecayingIntegrand(format!("envelope stopped shrinking at w = {x}")));
            }
        } else {
            growing = 0;
        }
        envelope_prev = env;
        let pan_settings = settings.with_abs_tol((0.05 * target).max(settings.abs_tol * 1e-3));
        let out = adaptive_gk(&f, &[x, x + width], &pan_settings);
        if !out.result.converged {
            return Err(Error::NonConvergence(format!("panel at {x} did not converge")));
        }
        total += out.result.value;
        err += out.result.err_estimate;
        x += width;
    }
    Err(Error::NonDecayingIntegrand("panel budget exhausted".into()))
}


/// int_T^inf t^{-m} e^{i w t} dt by repeated integration by parts
/// (w T large), or the elementary value for w = 0.
pub fn power_oscillatory_tail(m: f64, w: f64, t: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(t.powf(1.0 - m) / (m - 1.0), 0.0);
    }
    // I(m) = -e^{iwT} T^{-m}/(iw) + m/(iw) I(m+1)
    let iw = Complex64::new(0.0, w);
    let mut term = -(iw * t).exp() * t.powf(-m) / iw;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mm = m;
    for _ in 0..60 {
        acc += term;
        let next = term * mm / (iw * t);
        if next.norm() >= term.norm() || next.norm() < 1e-18 * acc.norm() {
            break;
        }
        term = next;
        mm += 1.0;
    }
    acc
}
