use std::fmt;

use crate::constructors::build_r1;
use crate::error::{GeometryError, Result};
use crate::hermitian::HermitianPoint;
use crate::tensor::FourTensor;

use super::{antiholo_range, check_dims, contractions, nu_from_scalars, rk_defect, Budget};

/// Local models of nearly Kähler manifolds of constant antiholomorphic
/// sectional curvature in dimension at least six.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelClass {
    Cn,
    CPn,
    CDn,
    S6,
    NonConstant,
    Indeterminate,
}

impl ModelClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelClass::Cn => "Cn",
            ModelClass::CPn => "CPn",
            ModelClass::CDn => "CDn",
            ModelClass::S6 => "S6",
            ModelClass::NonConstant => "NonConstant",
            ModelClass::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassLabel {
    pub label: ModelClass,
    /// Antiholomorphic sectional curvature from the scalar curvatures.
    pub nu: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    /// Mean holomorphic sectional curvature over sampled unit vectors.
    pub holomorphic_curvature_estimate: f64,
    /// `tau - tau'`.
    pub tau_gap: f64,
}

/// Classifies pointwise curvature data against the local models.
///
/// Decision order: a non-constant antiholomorphic range wins; a vanishing
/// tensor is flat; `J`-invariant data with `tau = tau'` is a complex space
/// form whose sign is that of `nu`; in dimension six, `tau != tau'` with
/// `R = nu R1`, `nu > 0` is the six-sphere; anything else is indeterminate.
/// Tolerances are relative to `max(1, |R|)`.
pub fn classify(
    r: &FourTensor,
    p: &HermitianPoint,
    budget: Budget,
    seed: u64,
    tol: f64,
) -> Result<ClassLabel> {
    check_dims(r, p)?;
    if p.dim() < 6 {
        return Err(GeometryError::InvalidDimension(format!(
            "classification needs dimension > 4, got {}",
            p.dim()
        )));
    }
    let norm = r.max_abs();
    let scale = norm.max(1.0);
    let ricci = contractions(r, p)?;
    let nu = nu_from_scalars(p.n(), ricci.tau, ricci.tau_star);
    let tau_gap = ricci.tau - ricci.tau_star;
    let range = antiholo_range(r, p, budget.samples, budget.refine_steps, seed)?;

    let samples = budget.samples.max(1) as u64;
    let holomorphic_curvature_estimate = (0..samples)
        .map(|i| {
            let x = p.random_unit_vector(seed, i);
            let jx = p.apply_j(&x);
            r.eval(&x, &jx, &jx, &x)
        })
        .sum::<f64>()
        / samples as f64;

    let tau_scale = scale * p.dim() as f64;
    let label = if range.nu_max - range.nu_min > tol * scale {
        ModelClass::NonConstant
    } else if norm <= tol {
        ModelClass::Cn
    } else if rk_defect(r, p)? <= tol * scale && tau_gap.abs() <= tol * tau_scale {
        if nu > tol * scale {
            ModelClass::CPn
        } else if nu < -tol * scale {
            ModelClass::CDn
        } else {
            ModelClass::Cn
        }
    } else if p.dim() == 6
        && tau_gap.abs() > tol * tau_scale
        && nu > tol * scale
        && r.max_abs_diff(&(build_r1(p) * nu)) <= tol * scale
    {
        ModelClass::S6
    } else {
        ModelClass::Indeterminate
    };

    Ok(ClassLabel {
        label,
        nu,
        nu_min: range.nu_min,
        nu_max: range.nu_max,
        holomorphic_curvature_estimate,
        tau_gap,
    })
}
