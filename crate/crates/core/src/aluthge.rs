//! The Aluthge transform `ΔT = |T|^{1/2} U |T|^{1/2}` and its iteration.

use serde::{Deserialize, Serialize};

use crate::analysis::normality_defect;
use crate::error::{Error, Result};
use crate::linalg::op_norm;
use crate::matrix::ComplexMatrix;
use crate::polar::{polar_decompose, PolarParts};

/// Steps without a new minimum step size (while above tolerance) before the
/// iteration is declared stagnant.
pub const STAGNATION_WINDOW: usize = 1000;

/// `ΔT` with the default rank tolerance.
pub fn aluthge(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    aluthge_with_tol(t, None)
}

pub fn aluthge_with_tol(t: &ComplexMatrix, rank_tol: Option<f64>) -> Result<ComplexMatrix> {
    let parts = polar_decompose(t, rank_tol)?;
    transform_parts(&parts)
}

/// `ΔT` from an existing polar decomposition.
pub fn transform_parts(parts: &PolarParts) -> Result<ComplexMatrix> {
    let root = parts.modulus_power(0.5)?;
    Ok(sandwich(&root, &parts.isometry))
}

/// `root · u · root`; lets callers substitute another `U` (e.g. a unitary
/// extension) with the same modulus root.
pub fn sandwich(root: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    &(root * u) * root
}

/// `Δ^m T`, returning every iterate `ΔT, …, Δ^m T`.
pub fn aluthge_powers(t: &ComplexMatrix, m: usize) -> Result<Vec<ComplexMatrix>> {
    let mut out = Vec::with_capacity(m);
    let mut cur = t.clone();
    for _ in 0..m {
        cur = aluthge(&cur)?;
        out.push(cur.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct IterationConfig {
    pub max_iter: usize,
    /// Step tolerance relative to `max(1, ‖T‖)`.
    pub tol_step: f64,
    pub consecutive_hits: usize,
    pub record_full_iterates: bool,
    pub rank_tol_override: Option<f64>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            tol_step: 1e-12,
            consecutive_hits: 3,
            record_full_iterates: false,
            rank_tol_override: None,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if !(self.tol_step.is_finite() && self.tol_step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol_step must be positive, got {}",
                self.tol_step
            )));
        }
        if self.consecutive_hits == 0 {
            return Err(Error::InvalidParameter(
                "consecutive_hits must be >= 1".into(),
            ));
        }
        if let Some(tol) = self.rank_tol_override {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "rank_tol_override must be non-negative, got {tol}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    StepTolerance,
    MaxIter,
    Stagnation,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::StepTolerance => "step_tolerance",
            StopReason::MaxIter => "max_iter",
            StopReason::Stagnation => "stagnation",
        }
    }
}

/// Statistics of `ΔⁿT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub op_norm: f64,
    /// `‖ΔⁿT − Δⁿ⁻¹T‖`
    pub step_delta: f64,
    /// `‖(ΔⁿT)*ΔⁿT − ΔⁿT(ΔⁿT)*‖`
    pub normality_defect: f64,
    /// Numerical rank of `Δⁿ⁻¹T` used to form this step.
    pub rank: usize,
    pub rank_tol: f64,
    pub borderline: bool,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub initial_norm: f64,
    pub initial_defect: f64,
    pub steps: Vec<StepRecord>,
    pub limit: ComplexMatrix,
    pub converged: bool,
    /// First index of the final run of sub-tolerance steps.
    pub converged_at: Option<usize>,
    pub stop_reason: StopReason,
    pub iterates: Option<Vec<ComplexMatrix>>,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Norms `‖T‖, ‖ΔT‖, …`.
    pub fn norms(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.initial_norm).chain(self.steps.iter().map(|s| s.op_norm))
    }

    /// Largest `‖Δⁿ⁺¹T‖ / ‖ΔⁿT‖ − 1` over the trace (0 for steps from zero to
    /// zero; infinite if a zero iterate is followed by a non-zero one).
    pub fn worst_norm_growth(&self) -> f64 {
        let norms: Vec<f64> = self.norms().collect();
        norms
            .windows(2)
            .map(|w| {
                if w[0] == 0.0 {
                    if w[1] == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    w[1] / w[0] - 1.0
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn final_norm(&self) -> f64 {
        self.steps.last().map_or(self.initial_norm, |s| s.op_norm)
    }
}

/// Iterates `Δ` from `T` until the step size stays below
/// `tol_step · max(1, ‖T‖)` for `consecutive_hits` steps, `max_iter` is
/// reached, or the step size stops decreasing for [`STAGNATION_WINDOW`]
/// steps.
pub fn iterate(t: &ComplexMatrix, cfg: &IterationConfig) -> Result<IterationTrace> {
    cfg.validate()?;
    let mut parts = polar_decompose(t, cfg.rank_tol_override)?;
    let initial_norm = parts.norm();
    let threshold = cfg.tol_step * initial_norm.max(1.0);

    let mut cur = t.clone();
    let mut steps = Vec::new();
    let mut iterates = cfg.record_full_iterates.then(Vec::new);
    let mut hits = 0usize;
    let mut best = f64::INFINITY;
    let mut best_at = 0usize;
    let mut stop = StopReason::MaxIter;

    for n in 1..=cfg.max_iter {
        let next = transform_parts(&parts)?;
        let next_parts = polar_decompose(&next, cfg.rank_tol_override)?;
        let step_delta = op_norm(&(&next - &cur));
        steps.push(StepRecord {
            index: n,
            op_norm: next_parts.norm(),
            step_delta,
            normality_defect: normality_defect(&next),
            rank: parts.rank,
            rank_tol: parts.rank_tol,
            borderline: parts.borderline,
        });
        if let Some(it) = iterates.as_mut() {
            it.push(next.clone());
        }
        cur = next;
        parts = next_parts;

        if step_delta <= threshold {
            hits += 1;
            if hits >= cfg.consecutive_hits {
                stop = StopReason::StepTolerance;
                break;
            }
        } else {
            hits = 0;
        }

        if step_delta < best {
            best = step_delta;
            best_at = n;
        } else if step_delta > threshold && n - best_at >= STAGNATION_WINDOW {
            stop = StopReason::Stagnation;
            break;
        }
    }

    let converged = stop == StopReason::StepTolerance;
    Ok(IterationTrace {
        initial_norm,
        initial_defect: normality_defect(t),
        converged_at: converged.then(|| steps.len() + 1 - hits),
        steps,
        limit: cur,
        converged,
        stop_reason: stop,
        iterates,
    })
}
