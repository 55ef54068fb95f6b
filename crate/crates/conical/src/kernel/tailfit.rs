//! Tail acceleration for slowly decaying series.
//!
//! Terms are modelled as t_n = n^{-s} (b_0 + b_1/n + ... + b_J/n^J) on
//! n in [N/2, N]; the remainder past N is then sum_j b_j zeta(s + j, N + 1).
//! Because zeta is continued analytically in s, the same formula yields the
//! analytic continuation of a divergent series (s <= 1).

use super::gamma::rgamma_real;
use super::zeta::hurwitz_zeta;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct TailSum {
    pub value: Complex64,
    pub estimate: f64,
    pub degree: usize,
}

const SAMPLES: usize = 41;

fn fit(terms: &[Complex64], s: f64, degree: usize) -> Vec<Complex64> {
    let n_end = terms.len() - 1;
    let nf = n_end as f64;
    let mut ns: Vec<usize> = (0..SAMPLES)
        .map(|k| {
            let u = 1.5 + 0.5 * (std::f64::consts::PI * (k as f64 + 0.5) / SAMPLES as f64).cos();
            (nf / u).round() as usize
        })
        .collect();
    ns.sort_unstable();
    ns.dedup();
    let rows = ns.len();
    let a = DMatrix::from_fn(rows, degree + 1, |r, j| (nf / ns[r] as f64).powi(j as i32));
    let yr = DVector::from_fn(rows, |r, _| terms[ns[r]].re * (ns[r] as f64).powf(s));
    let yi = DVector::from_fn(rows, |r, _| terms[ns[r]].im * (ns[r] as f64).powf(s));
    let svd = a.svd(true, true);
    let cr = svd.solve(&yr, 1e-15).expect("svd solve");
    let ci = svd.solve(&yi, 1e-15).expect("svd solve");
    (0..=degree)
        .map(|j| Complex64::new(cr[j], ci[j]) * nf.powi(j as i32))
        .collect()
}

fn tail_from(b: &[Complex64], s: f64, n_end: usize) -> Complex64 {
    let a = n_end as f64 + 1.0;
    b.iter()
        .enumerate()
        .map(|(j, bj)| bj * hurwitz_zeta(s + j as f64, a))
        .sum()
}

/// Sum of `terms` (indices 0..=N) plus the fitted remainder, multiplied by
/// 1/Gamma(1 + order). When `order` is a negative integer -m the product is
/// taken as a limit and reduces to (-1)^{m-1} (m-1)! b_{m-1}.
pub fn regularized_sum(terms: &[Complex64], s: f64, order: f64) -> TailSum {
    let n_end = terms.len() - 1;
    assert!(n_end >= 16, "tail fit needs at least 16 explicit terms");
    let explicit: Complex64 = {
        // pairwise-ish: sum from the small end for accuracy
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms.iter().rev() {
            acc += t;
        }
        acc
    };
    let neg_int = order < 0.0 && order == order.round();
    let rg = rgamma_real(1.0 + order);
    let evaluate = |b: &[Complex64]| -> Complex64 {
        if neg_int {
            let m = (-order) as usize;
            if m - 1 >= b.len() {
                return Complex64::new(0.0, 0.0);
            }
            let mut fact = 1.0;
            for k in 1..m {
                fact *= k as f64;
            }
            let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
            b[m - 1] * (sign * fact)
        } else {
            (explicit + tail_from(b, s, n_end)) * rg
        }
    };
    let mut values = Vec::new();
    for degree in [2usize, 4, 6, 8] {
        values.push((degree, evaluate(&fit(terms, s, degree))));
    }
    let mut best = (values[3].0, values[3].1, f64::INFINITY);
    for w in values.windows(2) {
        let d = (w[1].1 - w[0].1).norm();
        if d < best.2 {
            best = (w[1].0, w[1].1, d);
        }
    }
    TailSum { value: best.1, estimate: best.2, degree: best.0 }
}
