pub mod bandwidth_cosmo;
pub mod coefficients;
pub mod conical_p;
pub mod conical_q;
pub mod error;
pub mod identities;
pub mod kernel;
pub mod settings;
pub mod sinc_contour;

pub use coefficients::{build_table, r_coeff, rtilde_coeff, CoeffTable, ConicalPoint};
pub use conical_p::{p_derivative_form, p_direct, p_elementary, p_eval, p_integer_expansion, p_recurrence_step, p_sinc_series};
pub use conical_q::{
    q_asymptotic, q_direct, q_elementary, q_eval, q_integer_expansion, q_poles, q_recurrence_step, q_sinc_series,
    Branch, QPole,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use settings::{QuadResult, QuadSettings};
