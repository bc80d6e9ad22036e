use serde::{Deserialize, Serialize};

use super::matching::bottleneck_assignment;
use crate::error::{Error, Result};
use crate::linalg::eigenvalues;
use crate::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub input_eigs: Vec<C64>,
    pub limit_eigs: Vec<C64>,
    /// Set distance between the two spectra (multiplicity ignored).
    pub hausdorff: f64,
    /// `min_π max_i |λ_i − μ_π(i)|` over bijections of the multisets.
    pub matching_distance: f64,
}

/// Hausdorff distance between two finite point sets in the plane.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    fn directed(from: &[C64], to: &[C64]) -> f64 {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    directed(a, b).max(directed(b, a))
}

/// Optimal bottleneck matching distance between equal-size multisets.
pub fn matching_distance(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    Ok(bottleneck_assignment(&cost).0)
}

pub fn spectrum_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SpectrumReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let input_eigs = eigenvalues(a)?;
    let limit_eigs = eigenvalues(b)?;
    let matching = matching_distance(&input_eigs, &limit_eigs)?;
    Ok(SpectrumReport {
        hausdorff: hausdorff_distance(&input_eigs, &limit_eigs),
        matching_distance: matching,
        input_eigs,
        limit_eigs,
    })
}
