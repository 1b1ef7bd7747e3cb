//! Polyhedral tip normal cones, nested families of generalized cones,
//! the rescaling construction that restores the nested-normal-set
//! property, and the linearity classification of Coxeter types.
//!
//! A family of affine forms b_1..b_r with independent linear parts cuts
//! out the generalized cones Y_t = { x : b_i(x) <= t }. The normal cone
//! of the tip of Y_t is spanned by the linear parts, and the normal set
//! is the tip translated by that cone. Whether the normal sets nest as t
//! grows depends on the scaling of the forms; `rescale_constants`
//! produces scalings that make them nest.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::rootsys::{self, RootSysError, TypeLabel};

/// Strictness margin for interior tests; every quantity the checks
/// decide on is bounded away from zero by at least 3 - 2*sqrt(2) ~ 0.17.
pub const INTERIOR_MARGIN: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("degenerate tip: linear parts are dependent")]
    DegenerateTip,
    #[error("affine form must be non-constant")]
    ConstantForm,
    #[error("empty interior: no interior point found")]
    EmptyInterior,
    #[error("scalings must be positive")]
    NonPositiveScaling,
    #[error("levels must satisfy s < t")]
    BadLevels,
    #[error(transparent)]
    RootSys(#[from] RootSysError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Non-constant affine form x -> <linear, x> + offset.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineForm {
    pub linear: Vec<f64>,
    pub offset: f64,
}

impl AffineForm {
    pub fn new(linear: Vec<f64>, offset: f64) -> Result<Self, ConeError> {
        if linalg::norm(&linear) < INTERIOR_MARGIN {
            return Err(ConeError::ConstantForm);
        }
        Ok(AffineForm { linear, offset })
    }

    pub fn linear_form(linear: Vec<f64>) -> Result<Self, ConeError> {
        AffineForm::new(linear, 0.0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.linear, x) + self.offset
    }
}

/// A cone given by a nonnegative-span list of generators.
#[derive(Clone, Debug, Serialize)]
pub struct NormalCone {
    pub generators: Vec<Vec<f64>>,
}

impl NormalCone {
    /// x belongs to the cone iff it is a nonnegative combination of the
    /// generators, decided by nonnegative least squares.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let scale = linalg::norm(x).max(1.0);
        let (_, residual) = linalg::nnls(&self.generators, x, tol);
        residual <= tol.sqrt() * scale
    }
}

fn linear_parts(forms: &[AffineForm]) -> Vec<Vec<f64>> {
    forms.iter().map(|f| f.linear.clone()).collect()
}

fn require_independent(parts: &[Vec<f64>]) -> Result<(), ConeError> {
    if parts.is_empty() || linalg::rank(parts, 1e-9) != parts.len() {
        return Err(ConeError::DegenerateTip);
    }
    Ok(())
}

/// Normal cone of the tip of { x : forms_i(x) <= t }: the nonnegative
/// span of the forms' linear parts.
pub fn tip_normal_cone(forms: &[AffineForm]) -> Result<NormalCone, ConeError> {
    let parts = linear_parts(forms);
    require_independent(&parts)?;
    Ok(NormalCone { generators: parts })
}

/// A point on the tip of { x : scalings_i * forms_i(x) <= level }
/// (minimum-norm representative when the tip is a positive-dimensional
/// affine subspace).
fn tip_point(
    forms: &[AffineForm],
    scalings: &[f64],
    level: f64,
) -> Result<Vec<f64>, ConeError> {
    let parts = linear_parts(forms);
    let rhs: Vec<f64> = forms
        .iter()
        .zip(scalings)
        .map(|(f, &s)| level / s - f.offset)
        .collect();
    Ok(linalg::min_norm_solution(&parts, &rhs)?)
}

/// Does the normal set of the tip at level t sit inside the interior of
/// the normal set of the tip at level s, for the scaled forms?
///
/// Both normal sets are translates of the same cone along the tip
/// subspace, so the containment reduces to interior membership of the
/// tip displacement: each candidate point (the t-tip and its translates
/// by one generator) must have strictly positive coordinates in the
/// generator basis relative to the s-tip.
pub fn nested_normal_set_check(
    forms: &[AffineForm],
    scalings: &[f64],
    s: f64,
    t: f64,
) -> Result<bool, ConeError> {
    if s >= t {
        return Err(ConeError::BadLevels);
    }
    if scalings.len() != forms.len() || scalings.iter().any(|&x| x <= 0.0) {
        return Err(ConeError::NonPositiveScaling);
    }
    let parts = linear_parts(forms);
    require_independent(&parts)?;
    let tip_s = tip_point(forms, scalings, s)?;
    let tip_t = tip_point(forms, scalings, t)?;
    let mut candidates = vec![tip_t.clone()];
    for g in &parts {
        let mut c = tip_t.clone();
        linalg::axpy(&mut c, 1.0, g);
        candidates.push(c);
    }
    for cand in candidates {
        let delta: Vec<f64> = cand.iter().zip(&tip_s).map(|(a, b)| a - b).collect();
        let (coords, _) = linalg::span_coefficients(&parts, &delta)?;
        if coords.iter().any(|&c| c <= INTERIOR_MARGIN) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership of x in the normal set of the tip at the given level:
/// x minus the tip point must lie in the generator cone.
pub fn normal_set_contains(
    forms: &[AffineForm],
    scalings: &[f64],
    level: f64,
    x: &[f64],
    tol: f64,
) -> Result<bool, ConeError> {
    let cone = tip_normal_cone(forms)?;
    let tip = tip_point(forms, scalings, level)?;
    let delta: Vec<f64> = x.iter().zip(&tip).map(|(a, b)| a - b).collect();
    Ok(cone.contains(&delta, tol))
}

/// Scaling constants s_i = 1 / b_i(v) for an interior point v of the
/// tip normal set at level 0, taken as the sum of the normalized linear
/// parts (an interior point by construction), perturbed deterministically
/// if some form fails to be positive on it.
pub fn rescale_constants(forms: &[AffineForm]) -> Result<Vec<f64>, ConeError> {
    let parts = linear_parts(forms);
    require_independent(&parts)?;
    let dim = parts[0].len();
    let mut v = vec![0.0; dim];
    for g in &parts {
        linalg::axpy(&mut v, 1.0 / linalg::norm(g), g);
    }
    let positive = |v: &[f64]| parts.iter().all(|g| linalg::dot(g, v) > INTERIOR_MARGIN);
    if !positive(&v) {
        'outer: for k in 1..=60u32 {
            let eps = 0.5f64.powi(k as i32);
            for g in &parts {
                linalg::axpy(&mut v, eps, g);
                if positive(&v) {
                    break 'outer;
                }
            }
        }
        if !positive(&v) {
            return Err(ConeError::EmptyInterior);
        }
    }
    Ok(parts.iter().map(|g| 1.0 / linalg::dot(g, &v)).collect())
}

/// One row of the linearity classification.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationRow {
    pub label: String,
    pub is_linear: bool,
    pub v: Vec<f64>,
    pub v_dot_a: Vec<f64>,
}

/// Solve <w_i, v> = 1 over the (optionally normalized) fundamental
/// weights and evaluate the simple roots on the solution.
pub fn weight_equation_solution(
    rs: &rootsys::RootSystemData,
    normalize: bool,
) -> Result<(Vec<f64>, Vec<f64>), ConeError> {
    let weights: Vec<Vec<f64>> = if normalize {
        rootsys::normalized_weights(rs)
    } else {
        (0..rs.rank)
            .map(|j| {
                rs.fund_weights
                    .column(j)
                    .iter()
                    .map(crate::places::Rational::to_f64)
                    .collect()
            })
            .collect()
    };
    let ones = vec![1.0; weights.len()];
    let v = linalg::min_norm_solution(&weights, &ones)?;
    let roots = rootsys::simple_roots_f64(rs);
    let va: Vec<f64> = roots.iter().map(|a| linalg::dot(a, &v)).collect();
    Ok((v, va))
}

/// Classify a Coxeter type: solve v . Wbar = (1,...,1) over the
/// normalized weights and test whether every root evaluates
/// nonnegatively on v.
pub fn linear_type_classification(label: TypeLabel) -> Result<ClassificationRow, ConeError> {
    let rs = rootsys::build_root_system(label)?;
    let (v, va) = weight_equation_solution(&rs, true)?;
    let is_linear = va.iter().all(|&x| x >= -INTERIOR_MARGIN);
    Ok(ClassificationRow {
        label: label.to_string(),
        is_linear,
        v,
        v_dot_a: va,
    })
}

pub fn classify_all() -> Result<Vec<ClassificationRow>, ConeError> {
    rootsys::classification_table_types()
        .into_iter()
        .map(linear_type_classification)
        .collect()
}

/// Rescaling report for a Coxeter type: forms are the normalized
/// weights, and the verification reruns the nested check at the given
/// levels with the computed scalings.
#[derive(Clone, Debug, Serialize)]
pub struct RescaleReport {
    pub label: String,
    pub scalings: Vec<f64>,
    pub checked_levels: Vec<f64>,
    pub nested: bool,
}

pub fn rescale_report(label: TypeLabel, levels: &[f64]) -> Result<RescaleReport, ConeError> {
    let rs = rootsys::build_root_system(label)?;
    let forms: Vec<AffineForm> = rootsys::normalized_weights(&rs)
        .into_iter()
        .map(AffineForm::linear_form)
        .collect::<Result<_, _>>()?;
    let scalings = rescale_constants(&forms)?;
    let mut nested = true;
    for &t in levels {
        nested &= nested_normal_set_check(&forms, &scalings, 0.0, t)?;
    }
    Ok(RescaleReport {
        label: label.to_string(),
        scalings,
        checked_levels: levels.to_vec(),
        nested,
    })
}
