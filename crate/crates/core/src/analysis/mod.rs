//! Measurable counterparts of the convergence theorems: normality defect,
//! spectrum distances, spectral-radius estimators, Riesz splitting,
//! continuity probes and finite-section studies.

mod continuity;
mod matching;
mod radius;
mod riesz;
mod sections;
mod spectrum;

pub use continuity::{continuity_probe, ContinuityRow, Perturbation};
pub use matching::bottleneck_assignment;
pub use radius::{gelfand_radius, yamazaki_radius};
pub use riesz::{riesz_split, RieszSplit};
pub use sections::{finite_section_study, SectionRecord};
pub use spectrum::{hausdorff_distance, matching_distance, spectrum_distance, SpectrumReport};

use crate::linalg::hermitian_op_norm;
use crate::matrix::ComplexMatrix;

/// `‖S*S − SS*‖`
pub fn normality_defect(s: &ComplexMatrix) -> f64 {
    let m = s.as_matrix();
    let adj = m.adjoint();
    let comm = &adj * m - m * &adj;
    hermitian_op_norm(&comm)
}
