pub mod dd;
pub mod gamma;
pub mod hyper;
pub mod quad;
pub mod sinc;
pub mod tailfit;
pub mod zeta;

pub use gamma::{gamma_real, ln_gamma_real, log_gamma_complex, rgamma_real};
pub use hyper::{hyp1f1, hyp2f1};
pub use quad::{quad_finite, quad_finite_exponent, quad_periodic, quad_semi_infinite_oscillatory};
pub use sinc::sinc_shifted;
