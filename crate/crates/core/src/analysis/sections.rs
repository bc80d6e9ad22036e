use rayon::prelude::*;

use super::normality_defect;
use super::spectrum::{spectrum_distance, SpectrumReport};
use crate::aluthge::{iterate, IterationConfig, StopReason};
use crate::error::{Error, Result};
use crate::generators::{finite_sections, OperatorFamily};
use crate::linalg::op_norm;
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone)]
pub struct SectionRecord {
    pub dim: usize,
    pub section: ComplexMatrix,
    pub limit: ComplexMatrix,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub normality_defect: f64,
    /// See [`IterationTrace::worst_norm_growth`](crate::aluthge::IterationTrace::worst_norm_growth).
    pub worst_norm_growth: f64,
    /// Section spectrum against limit spectrum.
    pub spectrum: SpectrumReport,
    /// `‖corner(S_N, M) − S_M‖` against the previous dimension `M`.
    pub corner_deviation: Option<f64>,
}

/// Iterates each nested finite section to its limit and compares limits of
/// consecutive dimensions.
pub fn finite_section_study(
    family: &OperatorFamily,
    dims: &[usize],
    cfg: &IterationConfig,
) -> Result<Vec<SectionRecord>> {
    let sections = finite_sections(family, dims)?;
    if !sections.nested {
        return Err(Error::NotNested(family.name()));
    }
    cfg.validate()?;

    let mut records = sections
        .matrices
        .into_par_iter()
        .zip(sections.dims.into_par_iter())
        .map(|(section, dim)| {
            let trace = iterate(&section, cfg)?;
            let spectrum = spectrum_distance(&section, &trace.limit)?;
            Ok(SectionRecord {
                dim,
                normality_defect: normality_defect(&trace.limit),
                converged: trace.converged,
                stop_reason: trace.stop_reason,
                iterations: trace.iterations(),
                worst_norm_growth: trace.worst_norm_growth(),
                limit: trace.limit,
                section,
                spectrum,
                corner_deviation: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    for k in 1..records.len() {
        let prev_dim = records[k - 1].dim;
        let corner = records[k].limit.corner(prev_dim)?;
        records[k].corner_deviation = Some(op_norm(&(&corner - &records[k - 1].limit)));
    }
    Ok(records)
}
