#![allow(dead_code)]

use conical::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

// (K, Re tau, Im tau, chi, Re value, Im value), from mpmath legenp/legenq
// (type 3) at 30 digits with mu = -1/2 - K, nu = -1/2 + i tau.
pub const P_REF: &[(f64, f64, f64, f64, f64, f64)] = &[
    (0.5, 0.7, 0.0, 0.5, 0.23929864720334866326, -6.4099407059513311443e-48),
    (0.5, 0.7, 0.0, 1.0, 0.42069561090219184651, -4.3437066957059035001e-47),
    (0.5, 0.7, 0.0, 3.0, 0.3500022976672949408, 0.0),
    (0.5, 2.0, 0.0, 0.5, 0.21380029648752801364, -4.1895037293799549963e-49),
    (0.5, 2.0, 0.0, 1.0, 0.2565605423358985952, -1.1066768651480008918e-48),
    (0.5, 2.0, 0.0, 3.0, -0.067000984071839627865, 0.0),
    (1.3, 0.7, 0.0, 0.5, 0.046624892913202259618, -9.6499680298428072319e-49),
    (1.3, 0.7, 0.0, 1.0, 0.13890692775216795049, -1.1467528827029081946e-47),
    (1.3, 0.7, 0.0, 3.0, 0.24352000848368223509, 0.0),
    (1.3, 2.0, 0.0, 0.5, 0.043045273109183156778, -6.4873734654405426769e-50),
    (1.3, 2.0, 0.0, 1.0, 0.098838348585080333833, -4.1954373757423470534e-49),
    (1.3, 2.0, 0.0, 3.0, -0.042297328932144445268, 0.0),
    (2.7, 0.7, 0.0, 0.5, 0.0014137226630726810831, -3.4356635725975794504e-50),
    (2.7, 0.7, 0.0, 1.0, 0.010415026770198333013, -8.5695202042035823477e-49),
    (2.7, 0.7, 0.0, 3.0, 0.055850303532093594635, 0.0),
    (2.7, 2.0, 0.0, 0.5, 0.0013406422504052009473, -2.2007809361835028508e-51),
    (2.7, 2.0, 0.0, 1.0, 0.0083322384942457396967, -2.3312078901533140228e-50),
    (2.7, 2.0, 0.0, 3.0, -0.0043597167236210775106, 0.0),
    (1.7, 1.3, 0.0, 0.8, 0.044422328985752100864, -3.0431114669099146855e-48),
    (-0.5, 1.0, 0.0, 1.0, 0.72207522827937457342, -2.8224395338573586023e-48),
    (-0.7, 2.0, 0.0, 0.6, 0.63591591868198517097, -2.4444069953757665242e-48),
    (0.5, 1.0, 0.5, 1.0, 0.40448760596740501059, -0.053018334559965999793),
    (2.3, 0.4, -0.3, 1.5, 0.056786424366863526747, 0.0021712402767360337526),
    (0.5, 0.0, 0.0, 0.5, 0.2430102930218571428, 0.0),
    (3.0, 2.0, 0.0, 1.0, 0.0044881845415853253116, -1.4798579657492409577e-50),
    (5.0, 2.0, 0.0, 1.0, 0.000041830600470528966599, -1.2343143004378800341e-52),
    (0.25, 10.0, 0.0, 2.0, 0.016461950851166077403, 0.0),
];
pub const Q_REF: &[(f64, f64, f64, f64, f64, f64)] = &[
    (0.5, 2.0, -0.1, 1.0, 0.075259109324648658361, -0.36297040760324965695),
    (0.3, 2.0, -1.0, 1.0, 0.15242777567291059175, 0.035718246586973343504),
    (0.0, 1.0, -0.5, 1.0, -0.53912198414465880547, 0.32049840484401690925),
    (1.3, 0.7, 0.0, 1.0, 0.67724757736348415575, 1.3338573457704556542),
    (2.0, 1.0, 0.0, 1.0, -0.5813656602875180049, 0.062545488589940453559),
    (0.5, 2.0, 0.0, 10.0, 0.003499007431133846371, -0.0021299307055400471863),
    (0.5, 1.0, 0.0, 0.5, 1.8499058551204477993, -0.36850545043307110252),
    (1.3, 2.0, 0.0, 3.0, -0.06481766367962256976, 0.015516757267793693667),
    (2.7, 0.7, 0.0, 1.0, 0.22247154003893144853, -0.70877771277640239693),
    (-0.5, 1.5, 0.0, 1.0, -0.53623542470627947026, -0.76306668611896855039),
    (0.7, -1.2, 0.0, 0.8, 0.87348730189717892123, 0.39290062015320293577),
];
