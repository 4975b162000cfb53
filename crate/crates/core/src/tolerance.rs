use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};

/// Numerical slack and grid resolution shared by every geometric test and search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps: f64,
    /// Samples per full turn for angular grids.
    pub grid_angle: usize,
    /// Samples of the contraction parameter on `[1/2, 1]`.
    pub grid_gamma: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps: 1e-9,
            grid_angle: 720,
            grid_gamma: 200,
        }
    }
}

impl Tolerance {
    pub fn new(eps: f64, grid_angle: usize, grid_gamma: usize) -> Result<Self> {
        let tol = Tolerance {
            eps,
            grid_angle,
            grid_gamma,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid_angle(mut self, grid_angle: usize) -> Result<Self> {
        self.grid_angle = grid_angle;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps < 1e-3) {
            return Err(GptError::Input(format!(
                "tolerance eps must lie in [0, 1e-3), got {}",
                self.eps
            )));
        }
        if self.grid_angle < 8 || self.grid_gamma < 8 {
            return Err(GptError::Input(format!(
                "grids need at least 8 samples (angle {}, gamma {})",
                self.grid_angle, self.grid_gamma
            )));
        }
        Ok(())
    }
}
