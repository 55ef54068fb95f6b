mod common;

use common::{c, rel, Q_REF};
use conical::coefficients::table_for;
use conical::kernel::gamma::gamma_complex;
use conical::kernel::hyper::hyp2f1;
use conical::{
    q_asymptotic, q_direct, q_elementary, q_eval, q_integer_expansion, q_poles, q_recurrence_step, q_sinc_series,
    Branch, Complex64, ConicalPoint, Error, QuadSettings,
};
use std::f64::consts::PI;

fn s() -> QuadSettings {
    QuadSettings::default()
}

fn q(k: f64, tau: Complex64, chi: f64) -> Complex64 {
    q_eval(&ConicalPoint::new(k, tau, chi).unwrap(), Branch::Plus, &s()).unwrap()
}

/// Independent oracle: Q^mu_nu(x) through 2F1 in 1/x^2.
fn q_hypergeometric(k: f64, tau: Complex64, chi: f64) -> Complex64 {
    let i = Complex64::i();
    let mu = c(-0.5 - k, 0.0);
    let nu = c(-0.5, 0.0) + i * tau;
    let x = chi.cosh();
    let front = (i * mu * PI).exp() * PI.sqrt() * gamma_complex(nu + mu + 1.0).unwrap()
        / gamma_complex(nu + 1.5).unwrap()
        * (mu / 2.0 * (x * x - 1.0).ln()).exp()
        / (2f64.ln() * (nu + 1.0)).exp()
        / ((nu + mu + 1.0) * x.ln()).exp();
    let f = hyp2f1((nu + mu + 2.0) / 2.0, (nu + mu + 1.0) / 2.0, nu + 1.5, c(1.0 / (x * x), 0.0)).unwrap();
    front * f
}

#[test]
fn elementary_orders_match_series() {
    for k in [-1.0, 0.0, 1.0] {
        for &chi in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            for &tau in &[0.3, 1.0, 2.7] {
                let p = ConicalPoint::real(k, tau, chi).unwrap();
                let e = q_elementary(&p, Branch::Plus).unwrap();
                let t = table_for(k, chi, p.tau, &s()).unwrap();
                let v = q_sinc_series(&p, &t).unwrap();
                assert!(rel(v, e) < 1e-10, "K={k} chi={chi} tau={tau}");
            }
        }
    }
}

#[test]
fn order_zero_closed_form() {
    let (tau, chi) = (1.7f64, 0.9f64);
    let want = -(PI / (2.0 * chi.sinh())).sqrt() * Complex64::from_polar(1.0, -tau * chi) / tau;
    let p = ConicalPoint::real(0.0, tau, chi).unwrap();
    assert!(rel(q_elementary(&p, Branch::Plus).unwrap(), want) < 1e-15);
    let minus = q_elementary(&p, Branch::Minus).unwrap();
    assert!(rel(minus, -want.conj()) < 1e-15);
}

#[test]
fn eval_matches_reference_values() {
    for &(k, tr, ti, chi, re, im) in Q_REF {
        let v = q(k, c(tr, ti), chi);
        assert!(rel(v, c(re, im)) < 1e-12, "K={k} tau={tr}{ti:+}i chi={chi}: {v}");
    }
}

#[test]
fn eval_matches_hypergeometric_oracle() {
    for &(k, tau, chi) in &[(0.5, c(1.0, 0.0), 1.0), (1.3, c(2.0, -0.3), 1.5), (2.7, c(0.4, 0.2), 2.0), (0.0, c(3.0, 0.0), 0.8)] {
        let v = q(k, tau, chi);
        let o = q_hypergeometric(k, tau, chi);
        assert!(rel(v, o) < 1e-11, "K={k} tau={tau} chi={chi}: {v} vs {o}");
    }
}

#[test]
fn minus_branch_is_reflected_degree() {
    let p = ConicalPoint::new(1.3, c(0.8, -0.1), 1.2).unwrap();
    let a = q_eval(&p, Branch::Minus, &s()).unwrap();
    let b = q(1.3, c(-0.8, 0.1), 1.2);
    assert_eq!(a, b);
}

#[test]
fn direct_integral_in_its_region() {
    for &(k, tr, ti, chi, re, im) in Q_REF.iter().filter(|r| -r.2 - r.0 >= 0.05 && r.0 > -1.0) {
        let v = q_direct(&ConicalPoint::new(k, c(tr, ti), chi).unwrap(), &s()).unwrap();
        assert!(rel(v, c(re, im)) < 1e-12, "K={k} tau={tr}{ti:+}i: {v}");
    }
    // shifted degree: tau - i (K + 1/2) for the series comparison
    for &(k, tau, chi) in &[(0.5, 0.7, 0.5), (1.3, 2.0, 1.0), (2.7, 0.7, 3.0)] {
        let t = c(tau, -(k + 0.5));
        let d = q_direct(&ConicalPoint::new(k, t, chi).unwrap(), &s()).unwrap();
        assert!(rel(d, q(k, t, chi)) < 1e-9, "K={k} tau={tau} chi={chi}");
    }
}

#[test]
fn direct_integral_region_checks() {
    let p = ConicalPoint::real(0.5, 1.0, 1.0).unwrap();
    assert!(matches!(q_direct(&p, &s()), Err(Error::RegionViolation(_))));
    let p = ConicalPoint::new(-1.5, c(1.0, -3.0), 1.0).unwrap();
    assert!(matches!(q_direct(&p, &s()), Err(Error::RegionViolation(_))));
    // an epsilon shift moves the degree into the region
    let p = ConicalPoint::real(0.5, 1.0, 1.0).unwrap();
    let v = q_direct(&p, &s().with_epsilon(0.6)).unwrap();
    assert!(rel(v, q(0.5, c(1.0, -0.6), 1.0)) < 1e-11);
}

#[test]
fn pole_census_for_integer_orders() {
    for (k, want) in [(0.0, 1), (1.0, 3), (2.0, 5), (3.0, 7)] {
        let t = table_for(k, 1.0, c(1.0, 0.0), &s()).unwrap();
        let poles = q_poles(k, 1.0, 10, &t).unwrap();
        assert_eq!(poles.iter().filter(|p| p.significant).count(), want, "K={k}");
        for p in &poles {
            assert_eq!(p.significant, p.n <= 2 * k as usize);
        }
    }
}

#[test]
fn non_integer_orders_have_unbounded_poles() {
    let t = table_for(0.5, 1.0, c(1.0, 0.0), &s()).unwrap();
    let poles = q_poles(0.5, 1.0, 12, &t).unwrap();
    assert!(poles.iter().all(|p| p.significant));
    assert_eq!(poles[3].location, c(0.0, 2.5));
}

#[test]
fn residues_match_the_limit() {
    for &k in &[0.0, 0.5, 1.0, 1.3] {
        let chi = 1.0;
        let t = table_for(k, chi, c(1.0, 0.0), &s()).unwrap();
        for p in q_poles(k, chi, 2, &t).unwrap() {
            let d = 1e-6;
            let mut acc = c(0.0, 0.0);
            for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
                let tau = p.location + dir * d;
                acc += dir * d * q(k, tau, chi) / 4.0;
            }
            assert!((acc - p.residue).norm() <= 1e-8 * p.residue.norm().max(1.0), "K={k} n={}", p.n);
        }
    }
}

#[test]
fn integer_order_residues_are_offset_coefficients() {
    for &k in &[0.0, 1.0, 2.0] {
        let t = table_for(k, 0.8, c(1.0, 0.0), &s()).unwrap();
        for p in q_poles(k, 0.8, 2 * k as usize, &t).unwrap() {
            assert!((p.residue - p.offset_residue).norm() < 1e-12 * p.residue.norm());
        }
    }
}

#[test]
fn evaluation_at_a_pole() {
    let p = ConicalPoint::new(0.5, c(0.0, 0.5), 1.0).unwrap();
    assert!(matches!(q_eval(&p, Branch::Plus, &s()), Err(Error::PoleHit(_))));
    let p = ConicalPoint::new(1.0, c(0.0, 1.0), 1.0).unwrap();
    assert!(matches!(q_elementary(&p, Branch::Plus), Err(Error::PoleHit(_))));
    // integer order: no pole past n = 2K
    let v = q(1.0, c(0.0, 2.0 + 1e-3), 1.0);
    assert!(v.norm().is_finite());
}

#[test]
fn recurrence_relates_neighbouring_orders() {
    let (tau, chi) = (c(1.3, 0.0), 1.0);
    let v: Vec<Complex64> = (-1..=20).map(|l| q(l as f64, tau, chi)).collect();
    for ell in 0..20u32 {
        let (lo, mid, hi) = (v[ell as usize], v[ell as usize + 1], v[ell as usize + 2]);
        let next = q_recurrence_step(ell, tau, chi, mid, lo).unwrap();
        let l1 = (ell + 1) as f64;
        let r = ((next - hi) * (tau * tau + l1 * l1)).norm() / mid.norm().max(lo.norm());
        assert!(r < 1e-10, "l={}: {r:e}", ell + 1);
    }
}

#[test]
fn integer_expansion_matches_series() {
    let (k, tau, chi) = (1.3, c(2.0, 0.0), 0.6);
    // the expansion builds Q^{-1/2-K}_{-1/2+K+i tau}: degree shifted by -iK
    let want = q(k, tau - Complex64::i() * k, chi);
    let v = q_integer_expansion(k, tau, chi, 16, &s()).unwrap();
    assert!(rel(v, want) < 1e-7, "{v} {want}");
}

#[test]
fn integer_expansion_flags_lost_precision() {
    // members shrink like 1/l! while the outer weights grow like n!, so past
    // ~16 members their rounding dominates; the estimate must say so
    let (k, tau, chi) = (1.3, c(2.0, 0.0), 0.6);
    let want = q(k, tau - Complex64::i() * k, chi);
    match q_integer_expansion(k, tau, chi, 32, &s()) {
        Err(Error::TruncationWarning { value, estimate }) => {
            assert!((value - want).norm() < 3.0 * estimate);
        }
        other => panic!("expected a truncation warning, got {other:?}"),
    }
}

#[test]
fn large_argument_form() {
    let (k, tau) = (0.5, c(2.0, 0.0));
    let e3 = rel(q_asymptotic(&ConicalPoint::new(k, tau, 3.0).unwrap()).unwrap(), q(k, tau, 3.0));
    let e6 = rel(q_asymptotic(&ConicalPoint::new(k, tau, 6.0).unwrap()).unwrap(), q(k, tau, 6.0));
    let e10 = rel(q_asymptotic(&ConicalPoint::new(k, tau, 10.0).unwrap()).unwrap(), c(0.003499007431133846371, -0.0021299307055400471863));
    assert!(e3 < 1e-3 && e6 < 1e-8 && e10 < 1e-13, "{e3:e} {e6:e} {e10:e}");
    assert!(e6 < e3);
}
