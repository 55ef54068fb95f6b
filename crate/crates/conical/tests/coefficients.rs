mod common;

use common::{c, rel};
use conical::coefficients::{gegenbauer_scaled, table_for, BAND_ZERO_TOL};
use conical::{build_table, r_coeff, rtilde_coeff, Complex64, ConicalPoint, Error, QuadSettings};
use std::f64::consts::PI;

fn s() -> QuadSettings {
    QuadSettings::default()
}

// R^{1/2}_n(1), n = 0..7, mpmath quadrature at 30 digits
const R_HALF: [f64; 8] = [
    0.46180685980186623552,
    -0.080726989807637159066,
    -0.007293231782900722216,
    -0.0013293382896668728559,
    -0.00030395763490425070855,
    -0.000077982435933226932289,
    -0.000021458483888915606271,
    -6.1900119464327602808e-6,
];

#[test]
fn order_one_closed_form() {
    // (1 - cos w / cosh chi) has only the harmonics 0 and +-1
    let chi = 1.0f64;
    let pref = (2.0 * PI).powf(-1.5) / chi.tanh() / chi.sinh().sqrt();
    let r0 = r_coeff(1.0, 0.0, chi, &s()).unwrap();
    let r1 = r_coeff(1.0, 1.0, chi, &s()).unwrap();
    assert!(rel(r0, c(2.0 * PI * pref, 0.0)) < 1e-14);
    assert!(rel(r1, c(-PI * pref / chi.cosh(), 0.0)) < 1e-14);
    assert!(rel(r1, c(-0.15657114743328861921, 0.0)) < 1e-14);
}

#[test]
fn order_zero_is_a_single_coefficient() {
    let chi = 0.7f64;
    let r0 = r_coeff(0.0, 0.0, chi, &s()).unwrap();
    let want = (2.0 * PI).powf(-0.5) / chi.sinh().sqrt();
    assert!(rel(r0, c(want, 0.0)) < 1e-14);
    for n in 1..6 {
        assert!(r_coeff(0.0, n as f64, chi, &s()).unwrap().norm() < 1e-16);
    }
}

#[test]
fn half_order_reference_values() {
    for (n, &want) in R_HALF.iter().enumerate() {
        let v = r_coeff(0.5, n as f64, 1.0, &s()).unwrap();
        // the periodic rule is accurate to rounding of the largest coefficient
        assert!((v.re - want).abs() < 1e-14 * R_HALF[0], "n = {n}: {v}");
        assert_eq!(v.im, 0.0);
    }
}

#[test]
fn table_matches_direct_coefficients() {
    let t = build_table(0.5, 1.0, 10, &s()).unwrap();
    for (n, &want) in R_HALF.iter().enumerate() {
        assert!((t.get(n as i64) - want).abs() < 1e-13 * R_HALF[0], "n = {n}");
        assert_eq!(t.get(n as i64), t.get(-(n as i64)));
    }
    // beyond the stored range the values come from the scaled recurrence
    let far = t.get(25);
    let direct = r_coeff(0.5, 25.0, 1.0, &s()).unwrap().re;
    assert!((far - direct).abs() < 1e-13 * R_HALF[0]);
}

#[test]
fn coefficients_are_even_in_n() {
    for &(k, chi) in &[(0.5, 1.0), (1.3, 0.4), (2.7, 2.0), (-0.3, 1.0)] {
        for n in 1..8 {
            let a = r_coeff(k, n as f64, chi, &s()).unwrap();
            let b = r_coeff(k, -(n as f64), chi, &s()).unwrap();
            assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300) + 1e-18);
        }
    }
}

#[test]
fn integer_orders_are_band_limited() {
    for ell in 0..=8u32 {
        let chi = 0.9;
        let vals: Vec<f64> = (0..=ell as i64 + 6).map(|n| r_coeff(ell as f64, n as f64, chi, &s()).unwrap().re).collect();
        let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (n, v) in vals.iter().enumerate() {
            if n as u32 > ell {
                assert!(v.abs() <= BAND_ZERO_TOL * max, "l = {ell}, n = {n}: {v:e}");
            } else {
                assert!(v.abs() > BAND_ZERO_TOL * max, "l = {ell}, n = {n} vanished");
            }
        }
    }
}

#[test]
fn band_edge_sign_alternates() {
    // R^l_{+-l} carries the sign of (-1)^l
    for ell in 1..=6 {
        let v = r_coeff(ell as f64, ell as f64, 1.2, &s()).unwrap().re;
        assert_eq!(v.signum(), if ell % 2 == 0 { 1.0 } else { -1.0 });
    }
}

#[test]
fn offset_coefficient_relation() {
    let r = r_coeff(0.7, 2.0 - 0.7, 0.5, &s()).unwrap();
    assert!(rel(r, c(-0.074253986649087385836, -0.10220184474671177598)) < 1e-11);
    let rt = rtilde_coeff(0.7, 2, 0.5, &s()).unwrap();
    assert!(rel(rt, c(-0.32107656463959431832, 0.23327577895652751975)) < 1e-11);
    assert!(rel(Complex64::i() * rt, PI * r) < 1e-15);
}

#[test]
fn gegenbauer_integer_order_is_finite() {
    let e = gegenbauer_scaled(2.0, 0.8, 10);
    for v in &e[5..] {
        assert_eq!(*v, 0.0);
    }
    // signs alternate, so the alternating sum is (1 - y)^2 (1 - q^2 y)^2 at y = -1
    let q = (-0.8f64).exp();
    let alt: f64 = e.iter().enumerate().map(|(n, v)| if n % 2 == 0 { *v } else { -*v }).sum();
    let want = 4.0 * (1.0 + q * q) * (1.0 + q * q);
    assert!((alt - want).abs() < 1e-14 * want);
}

#[test]
fn table_for_caches_by_arguments() {
    let a = table_for(0.5, 1.0, c(2.0, 0.0), &s()).unwrap();
    let b = table_for(0.5, 1.0, c(2.0, 0.0), &s()).unwrap();
    assert!(std::sync::Arc::ptr_eq(&a, &b));
}

#[test]
fn invalid_chi_is_rejected() {
    assert!(matches!(r_coeff(0.5, 0.0, 0.0, &s()), Err(Error::InvalidArgument(_))));
    assert!(matches!(ConicalPoint::real(0.5, 1.0, -1.0), Err(Error::InvalidArgument(_))));
    assert!(matches!(ConicalPoint::real(f64::NAN, 1.0, 1.0), Err(Error::InvalidArgument(_))));
}
