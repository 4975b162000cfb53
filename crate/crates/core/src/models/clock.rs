//! The disk theory: pure states on a circle, O(2) automorphisms, and a
//! self-dual Lorentz cone.

use nalgebra::DMatrix;

use super::spin_factor::ball_model;
use super::{ModelBundle, ModelKind};
use crate::groups::{embed, reflection2, rotation2};

pub fn clock() -> ModelBundle {
    ball_model(ModelKind::Clock, 2, false)
}

/// Rotation of the disk by `phi`.
pub fn rotation(phi: f64) -> DMatrix<f64> {
    embed(&rotation2(phi))
}

/// Reflection of the disk across the axis at angle `phi`.
pub fn reflection(phi: f64) -> DMatrix<f64> {
    embed(&reflection2(phi))
}
