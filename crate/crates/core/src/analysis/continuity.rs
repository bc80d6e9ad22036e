use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aluthge::aluthge;
use crate::error::{Error, Result};
use crate::generators::{complex_gaussian, random_with_singulars, seeded_rng};
use crate::linalg::op_norm;
use crate::matrix::{ComplexMatrix, C64};

/// Shape of the random perturbations `E`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// Dense complex Gaussian.
    #[default]
    Dense,
    /// Haar factors around singular values `1/k²`, mimicking a compact tail.
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub epsilon: f64,
    /// `max over trials of ‖Δ(T + E) − ΔT‖` with `‖E‖ = ε`.
    pub displacement: f64,
}

fn draw(dim: usize, kind: Perturbation, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let e = match kind {
        Perturbation::Dense => ComplexMatrix::new(complex_gaussian(dim, rng))?,
        Perturbation::Compact => {
            let s: Vec<f64> = (1..=dim).map(|k| 1.0 / (k * k) as f64).collect();
            random_with_singulars(&s, rng)?
        }
    };
    let norm = op_norm(&e);
    Ok(e.scale(C64::new(1.0 / norm, 0.0)))
}

/// Worst `Δ`-displacement under random perturbations of each size.
///
/// Trial `t` at the `i`-th epsilon draws from ChaCha stream `i · trials + t`
/// of `seed`, so rows do not depend on evaluation order.
pub fn continuity_probe(
    t: &ComplexMatrix,
    epsilons: &[f64],
    trials: usize,
    seed: u64,
    kind: Perturbation,
) -> Result<Vec<ContinuityRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0))
        || epsilons.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParameter(
            "epsilons must be non-negative and strictly descending".into(),
        ));
    }
    let base = aluthge(t)?;
    let n = t.dim();

    let jobs: Vec<(usize, usize)> = (0..epsilons.len())
        .flat_map(|i| (0..trials).map(move |k| (i, k)))
        .collect();
    let displacements = jobs
        .par_iter()
        .map(|&(i, k)| {
            let eps = epsilons[i];
            if eps == 0.0 {
                return Ok(0.0);
            }
            let mut rng = seeded_rng(seed);
            rng.set_stream((i * trials + k) as u64);
            let e = draw(n, kind, &mut rng)?.scale(C64::new(eps, 0.0));
            let moved = aluthge(&(t + &e))?;
            Ok(op_norm(&(&moved - &base)))
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(epsilons
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| ContinuityRow {
            epsilon,
            displacement: displacements[i * trials..(i + 1) * trials]
                .iter()
                .fold(0.0, |m: f64, &d| m.max(d)),
        })
        .collect())
}
