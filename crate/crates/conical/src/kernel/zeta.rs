//! Hurwitz zeta for real s != 1 by Euler–Maclaurin summation.

// B_{2k} / (2k)!
const B2K_OVER_FACT: [f64; 12] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_888_9e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_767e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_468e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_23e-18,
    -1.395_446_468_581_252e-19,
];

/// zeta(s, a) = sum_{k>=0} (k + a)^{-s}, analytically continued in s; a > 0.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0);
    debug_assert!(s != 1.0);
    let m = (30.0 + s.abs()).ceil() as usize;
    let shift = if a < m as f64 { m - a.floor() as usize } else { 0 };
    let mut sum = 0.0;
    for k in 0..shift {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + shift as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising product s (s+1) ... (s + 2k - 2)
    let mut rising = s;
    let mut xp = x.powf(-s - 1.0);
    let x2 = 1.0 / (x * x);
    for (k, b) in B2K_OVER_FACT.iter().enumerate() {
        let term = b * rising * xp;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let kk = (2 * k + 1) as f64;
        rising *= (s + kk) * (s + kk + 1.0);
        xp *= x2;
    }
    sum
}
