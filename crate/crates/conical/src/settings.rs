use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerances and budgets shared by every quadrature routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub periodic_points: usize,
    /// Regulator that moves Q-type integrals off the real axis.
    pub epsilon_shift: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
            periodic_points: 32,
            epsilon_shift: 0.0,
        }
    }
}

impl QuadSettings {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
        periodic_points: usize,
        epsilon_shift: f64,
    ) -> Result<Self> {
        let s = QuadSettings { abs_tol, rel_tol, max_subdivisions, periodic_points, epsilon_shift };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.periodic_points < 16 || self.periodic_points % 2 != 0 {
            return Err(Error::InvalidArgument("periodic_points must be even and >= 16".into()));
        }
        if !(self.epsilon_shift >= 0.0) {
            return Err(Error::InvalidArgument("epsilon_shift must be >= 0".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon_shift = eps;
        self
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub converged: bool,
}
