mod common;

use common::{c, rel};
use conical::bandwidth_cosmo::{
    band_polynomial, band_product, band_reconstruct, cosmo_chi_integral, cosmo_cl, cosmo_cl_terms, cosmo_i,
    cosmo_i_quadrature, cosmo_omega_integral, envelope_slope, inverse_norm_sq, mode_e, BandSignal, CosmoParams,
    Parity,
};
use conical::{p_eval, ConicalPoint, Error, QuadSettings};
use std::f64::consts::PI;

fn s() -> QuadSettings {
    QuadSettings::default()
}

#[test]
fn reconstruct_sinc_off_lattice() {
    let sig = BandSignal::sinc(1.3).unwrap();
    for &tau in &[0.1, 0.77, 2.9] {
        let r = band_reconstruct(&sig, tau, 10).unwrap();
        assert!((r.value.re - (1.3 * tau as f64).sin() / (1.3 * tau)).abs() < 1e-15);
    }
}

#[test]
fn reconstruct_conical_p() {
    // P decays like tau^{-K-1}; K = 2 keeps the truncated sum short
    let sig = BandSignal::conical_p(2.0, 0.9, s()).unwrap();
    let tau = 1.234;
    let r = band_reconstruct(&sig, tau, 400).unwrap();
    let want = p_eval(&ConicalPoint::real(2.0, tau, 0.9).unwrap(), &s()).unwrap();
    assert!(rel(r.value, want) < 1e-6, "{} {want}", r.value);
}

#[test]
fn reconstruct_errors() {
    let odd = BandSignal::new(1.0, Parity::None, |t| c(t.sin(), 0.0)).unwrap();
    assert!(matches!(band_reconstruct(&odd, 0.3, 10), Err(Error::InvalidArgument(_))));
    // a lone sinc sampled at its own bandwidth only hits zeros; a product does not
    let sig = band_product(&BandSignal::sinc(0.4).unwrap(), &BandSignal::sinc(0.7).unwrap());
    assert!(matches!(band_reconstruct(&sig, 0.3, 3), Err(Error::TailTooLarge(_))));
    assert!(matches!(BandSignal::sinc(0.0), Err(Error::ZeroFrequency)));
    assert!(matches!(BandSignal::conical_p(-1.5, 1.0, s()), Err(Error::RegionViolation(_))));
}

#[test]
fn bandwidths_add_under_products() {
    let a = BandSignal::sinc(0.4).unwrap();
    let b = BandSignal::sinc(0.7).unwrap();
    let p = band_product(&a, &b);
    assert!((p.bandwidth - 1.1).abs() < 1e-15);
    assert_eq!(p.parity, Parity::Even);
    let w = band_polynomial(&p, &[1.0, 0.0, 2.0]);
    assert_eq!(w.bandwidth, p.bandwidth);
    assert_eq!(w.parity, Parity::Even);
    assert_eq!(band_polynomial(&p, &[0.0, 1.0]).parity, Parity::None);
    let t = 0.8;
    let want = (0.4f64 * t).sin() / (0.4 * t) * (0.7f64 * t).sin() / (0.7 * t) * (1.0 + 2.0 * t * t);
    assert!((w.evaluate(t).re - want).abs() < 1e-15);
    // the product of two band-limited signals reconstructs at the summed bandwidth
    let r = band_reconstruct(&p, 0.37, 2000).unwrap();
    assert!((r.value - p.evaluate(0.37)).norm() < 1e-7);
}

#[test]
fn inverse_norm_values() {
    assert!((inverse_norm_sq(0, 2.0) - PI / 2.0 * 4.0).abs() < 1e-14);
    assert!((inverse_norm_sq(2, 1.0) - PI / 2.0 * 2.0 * 5.0).abs() < 1e-13);
}

#[test]
fn params_and_bandwidth() {
    let p = CosmoParams::new(1.2, 0.2, 1.0, 2.0, 0.0, 2, 0.5).unwrap();
    assert!((p.chi_l - 1.0).abs() < 1e-15);
    assert!((p.chi_d() - 2.4).abs() < 1e-15);
    assert!(matches!(CosmoParams::new(0.2, 1.0, 1.0, 2.0, 0.0, 2, 0.5), Err(Error::InvalidArgument(_))));
    assert!(matches!(CosmoParams::new(1.2, 0.2, 1.0, 2.0, -1.0, 2, 0.5), Err(Error::InvalidArgument(_))));
}

#[test]
fn sampled_i_matches_quadrature() {
    let p = CosmoParams::new(1.2, 0.2, 1.0, 2.0, 0.0, 2, 0.5).unwrap();
    let sum = cosmo_i(&p, &s()).unwrap();
    let q = cosmo_i_quadrature(&p, &s()).unwrap();
    assert!((sum.value - q).abs() < 1e-8 * q.abs(), "{} {q}", sum.value);
    let slope = sum.tail_slope().unwrap();
    assert!((slope - (2.0 - 1.0 - 6.0)).abs() < 0.2, "{slope}");
}

#[test]
fn sampled_i_region() {
    let p = CosmoParams::new(1.2, 0.2, 1.0, 2.0, 0.5, 2, 0.5).unwrap();
    assert!(matches!(cosmo_i(&p, &s()), Err(Error::RegionViolation(_))));
    let p = CosmoParams::new(1.2, 0.2, 1.0, 6.0, 0.0, 2, 0.0).unwrap();
    assert!(matches!(cosmo_i(&p, &s()), Err(Error::RegionViolation(_))));
    let p = CosmoParams::new(1.2, -0.2, 1.0, 2.0, 0.0, 2, 0.5).unwrap();
    assert!(matches!(cosmo_i(&p, &s()), Err(Error::RegionViolation(_))));
}

#[test]
fn chi_integral_small_tau_limit() {
    // sin(tau r)/tau -> r; compare against the tau -> 0 integrand written out
    let p = CosmoParams::new(1.0, 0.3, 1.0, 4.0, 0.5, 2, 0.0).unwrap();
    let j_small = cosmo_chi_integral(&p, 1e-3, &s()).unwrap();
    let j_smaller = cosmo_chi_integral(&p, 5e-4, &s()).unwrap();
    assert!(j_small.is_finite() && j_smaller.is_finite());
    // P^{-5/2} ~ tau^0 at tau -> 0, so J tends to a constant
    assert!((j_small - j_smaller).abs() < 1e-5 * j_small.abs().max(1e-300));
}

#[test]
fn omega_integral_gaussian_case() {
    // N = 4: Gamma(1/2) beta^{-1} 1F1(1/2; 1/2; -x) = sqrt(pi)/beta e^{-w^2/(4 beta^2)}
    let p = CosmoParams::new(1.0, 0.3, 1.0, 4.0, 0.5, 2, 0.0).unwrap();
    let chi_d = p.chi_d();
    for &tau in &[0.0, 1.0, 3.0] {
        let w = cosmo_omega_integral(&p, tau, &s()).unwrap();
        let n = 4000;
        let h = chi_d / n as f64;
        let g = |x: f64| PI.sqrt() / 0.5 * (-x * x / (4.0 * 0.25)).exp() * (x * tau).cos();
        let simpson: f64 = (0..n)
            .map(|k| {
                let a = k as f64 * h;
                h / 6.0 * (g(a) + 4.0 * g(a + 0.5 * h) + g(a + h))
            })
            .sum();
        assert!((w - simpson).abs() < 1e-10, "tau={tau}: {w} {simpson}");
    }
}

#[test]
fn cl_terms_validation() {
    let p = CosmoParams::new(1.0, 0.3, 1.0, 4.0, 0.0, 2, 0.0).unwrap();
    assert!(matches!(cosmo_cl_terms(&p, 10, &s()), Err(Error::RegionViolation(_))));
    let p = CosmoParams::new(1.0, 0.3, 1.0, 4.0, 0.5, 1, 0.0).unwrap();
    assert!(matches!(cosmo_cl_terms(&p, 10, &s()), Err(Error::InvalidArgument(_))));
    let p = CosmoParams::new(1.0, 0.3, 1.0, 3.0, 0.5, 2, 0.0).unwrap();
    assert!(matches!(cosmo_cl_terms(&p, 10, &s()), Err(Error::PoleOfGamma(_))));
}

#[test]
fn cl_sum_reports_a_large_remainder() {
    // at l = 2 the even terms settle to a constant, so the truncated sum is flagged
    let p = CosmoParams::new(1.0, 0.3, 1.0, 4.0, 0.5, 2, 0.0).unwrap();
    assert!(matches!(cosmo_cl(&p, 40, &s()), Err(Error::TailTooLarge(_))));
}

#[test]
fn envelope_slope_of_power_law() {
    let terms: Vec<f64> = (1..400).map(|n| (n as f64).powf(-3.0) * if n % 3 == 0 { 1.0 } else { 0.2 }).collect();
    let s = envelope_slope(&terms).unwrap();
    assert!((s + 3.0).abs() < 0.05, "{s}");
    assert!(envelope_slope(&terms[..10]).is_none());
}

#[test]
fn temporal_mode() {
    let (rho, tau) = (0.7f64, 1.3f64);
    let (e, de) = mode_e(rho, c(tau, 0.0)).unwrap();
    let k = (2.0 / PI).sqrt();
    let want_e = k * (rho.cosh() * (tau * rho).sin() / tau - rho.sinh() * (tau * rho).cos()) / (tau * tau + 1.0);
    assert!((e.re - want_e).abs() < 1e-15);
    assert!((de.re - k * rho.sinh() * (tau * rho).sin() / tau).abs() < 1e-15);
    // derivative consistency by central differences
    let h = 1e-5;
    let fd = (mode_e(rho + h, c(tau, 0.0)).unwrap().0 - mode_e(rho - h, c(tau, 0.0)).unwrap().0) / (2.0 * h);
    assert!((fd - de).norm() < 1e-9);
    // removable point tau = i
    let (e_i, _) = mode_e(rho, c(0.0, 1.0)).unwrap();
    let (e_near, _) = mode_e(rho, c(0.0, 1.0 + 1e-3)).unwrap();
    assert!((e_i - e_near).norm() < 1e-3 * e_i.norm());
    assert!(matches!(mode_e(0.0, c(1.0, 0.0)), Err(Error::InvalidArgument(_))));
}
