//! Operator families: weighted shifts, Jordan blocks, diagonal compacts,
//! seeded random compacts and their finite sections.
//!
//! Randomness comes from `ChaCha8Rng` so a seed reproduces the same matrix
//! on every platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lower weighted shift: entry `(k+1, k) = weights[k]`.
pub fn weighted_shift(weights: &[C64], dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Empty);
    }
    if weights.len() < dim - 1 {
        return Err(Error::TooFewWeights {
            needed: dim - 1,
            got: weights.len(),
        });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim - 1 {
        m[(k + 1, k)] = weights[k];
    }
    ComplexMatrix::new(m)
}

/// `lambda` on the diagonal, ones on the superdiagonal.
pub fn jordan_block(lambda: C64, dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Empty);
    }
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        m[(k, k)] = lambda;
        if k + 1 < dim {
            m[(k, k + 1)] = C64::new(1.0, 0.0);
        }
    }
    ComplexMatrix::new(m)
}

/// `dim`×`dim` matrix of i.i.d. standard complex Gaussians (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // column-major fill; fixed order keeps draws reproducible
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Empty);
    }
    ComplexMatrix::new(complex_gaussian(dim, rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian, with `Q`'s columns
/// rotated by the phases of `R`'s diagonal.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Empty);
    }
    let qr = complex_gaussian(dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    ComplexMatrix::new(q)
}

/// `W · diag(s) · V*` with independent Haar unitaries `W`, `V`.
pub fn random_with_singulars<R: Rng + ?Sized>(
    singulars: &[f64],
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let n = singulars.len();
    let w = random_unitary(n, rng)?;
    let v = random_unitary(n, rng)?;
    let mut ws = w.into_matrix();
    for (j, &s) in singulars.iter().enumerate() {
        ws.column_mut(j).scale_mut(s);
    }
    ComplexMatrix::new(ws * v.as_matrix().adjoint())
}

/// Random matrix of rank `rank` (product of Gaussian factors).
pub fn random_rank_deficient<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if rank > dim {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} exceeds dimension {dim}"
        )));
    }
    let a = complex_gaussian(dim, rng).columns(0, rank).into_owned();
    let b = complex_gaussian(dim, rng).rows(0, rank).into_owned();
    if rank == 0 {
        return ComplexMatrix::zeros(dim);
    }
    ComplexMatrix::new(a * b)
}

/// Normal matrix `Q · diag(eigs) · Q*` with Haar `Q`.
pub fn random_normal<R: Rng + ?Sized>(eigs: &[C64], rng: &mut R) -> Result<ComplexMatrix> {
    let q = random_unitary(eigs.len(), rng)?;
    let d = ComplexMatrix::from_diagonal(eigs)?;
    Ok(&(&q * &d) * &q.adjoint())
}

/// Rule producing `s_1, s_2, …` (1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SequenceRule {
    /// `s_k = scale / k^power`
    Harmonic {
        #[serde(default = "one")]
        power: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `s_k = scale · ratio^(k-1)`
    Geometric {
        ratio: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Constant {
        value: f64,
    },
    /// First value is `s_1`; indices past the end are zero.
    Explicit {
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl SequenceRule {
    pub fn harmonic() -> Self {
        SequenceRule::Harmonic {
            power: 1.0,
            scale: 1.0,
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        match self {
            SequenceRule::Harmonic { power, scale } => scale / (k as f64).powf(*power),
            SequenceRule::Geometric { ratio, scale } => scale * ratio.powi(k as i32 - 1),
            SequenceRule::Constant { value } => *value,
            SequenceRule::Explicit { values } => values.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    /// `s_1 … s_len`
    pub fn take(&self, len: usize) -> Vec<f64> {
        (1..=len).map(|k| self.value(k)).collect()
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            SequenceRule::Harmonic { power, scale } => power.is_finite() && scale.is_finite(),
            SequenceRule::Geometric { ratio, scale } => ratio.is_finite() && scale.is_finite(),
            SequenceRule::Constant { value } => value.is_finite(),
            SequenceRule::Explicit { values } => values.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "non-finite sequence rule {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub family: OperatorFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub dim: usize,
    pub family: OperatorFamily,
}

/// Descriptor of an operator that can be instantiated at any truncation
/// dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorFamily {
    WeightedShift {
        weights: SequenceRule,
    },
    Jordan {
        lambda: [f64; 2],
    },
    Diagonal {
        diagonal: SequenceRule,
    },
    RandomCompact {
        decay: SequenceRule,
        seed: u64,
    },
    /// Direct sum of fixed-size blocks; only instantiable at the total size.
    BlockDiag {
        blocks: Vec<Block>,
    },
    /// Row-major `[re, im]` entries; sections are leading corners.
    CustomMatrix {
        dim: usize,
        data: Vec<[f64; 2]>,
    },
    /// `Σ coefficient · family`
    Combination {
        terms: Vec<Term>,
    },
}

impl OperatorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorFamily::WeightedShift { .. } => "weighted_shift",
            OperatorFamily::Jordan { .. } => "jordan",
            OperatorFamily::Diagonal { .. } => "diagonal",
            OperatorFamily::RandomCompact { .. } => "random_compact",
            OperatorFamily::BlockDiag { .. } => "block_diag",
            OperatorFamily::CustomMatrix { .. } => "custom_matrix",
            OperatorFamily::Combination { .. } => "combination",
        }
    }

    /// Whether the `N`×`N` instance is the leading corner of every larger one.
    pub fn is_nested(&self) -> bool {
        match self {
            OperatorFamily::WeightedShift { .. }
            | OperatorFamily::Jordan { .. }
            | OperatorFamily::Diagonal { .. }
            | OperatorFamily::CustomMatrix { .. } => true,
            OperatorFamily::RandomCompact { .. } | OperatorFamily::BlockDiag { .. } => false,
            OperatorFamily::Combination { terms } => terms.iter().all(|t| t.family.is_nested()),
        }
    }

    /// Whether any draw is random (the experiment needs a seed).
    pub fn is_randomized(&self) -> bool {
        match self {
            OperatorFamily::RandomCompact { .. } => true,
            OperatorFamily::BlockDiag { blocks } => blocks.iter().any(|b| b.family.is_randomized()),
            OperatorFamily::Combination { terms } => terms.iter().any(|t| t.family.is_randomized()),
            _ => false,
        }
    }

    /// For families modelling compact operators, checks that the defining
    /// sequence decays on the window `1..=dim` (last ≤ first in modulus).
    /// `None` for kinds without a defining sequence.
    pub fn decays_on_window(&self, dim: usize) -> Option<bool> {
        let seq = match self {
            OperatorFamily::WeightedShift { weights } => weights.take(dim.saturating_sub(1)),
            OperatorFamily::Diagonal { diagonal } => diagonal.take(dim),
            OperatorFamily::RandomCompact { decay, .. } => decay.take(dim),
            _ => return None,
        };
        match (seq.first(), seq.last()) {
            (Some(f), Some(l)) => Some(l.abs() <= f.abs()),
            _ => Some(true),
        }
    }

    pub fn instantiate(&self, dim: usize) -> Result<ComplexMatrix> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        match self {
            OperatorFamily::WeightedShift { weights } => {
                weights.validate()?;
                let w: Vec<C64> = weights
                    .take(dim - 1)
                    .into_iter()
                    .map(|x| C64::new(x, 0.0))
                    .collect();
                weighted_shift(&w, dim)
            }
            OperatorFamily::Jordan { lambda } => jordan_block(C64::new(lambda[0], lambda[1]), dim),
            OperatorFamily::Diagonal { diagonal } => {
                diagonal.validate()?;
                ComplexMatrix::from_real_diagonal(&diagonal.take(dim))
            }
            OperatorFamily::RandomCompact { decay, seed } => {
                decay.validate()?;
                random_compact(dim, decay, *seed)
            }
            OperatorFamily::BlockDiag { blocks } => {
                let total: usize = blocks.iter().map(|b| b.dim).sum();
                if total != dim || blocks.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "block_diag has total size {total}, requested {dim}"
                    )));
                }
                let mut acc: Option<ComplexMatrix> = None;
                for b in blocks {
                    let m = b.family.instantiate(b.dim)?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => ComplexMatrix::direct_sum(&a, &m),
                    });
                }
                Ok(acc.expect("non-empty blocks"))
            }
            OperatorFamily::CustomMatrix { dim: full, data } => {
                let entries: Vec<C64> = data.iter().map(|z| C64::new(z[0], z[1])).collect();
                let m = ComplexMatrix::from_row_major(*full, &entries)?;
                m.corner(dim)
            }
            OperatorFamily::Combination { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter("combination without terms".into()));
                }
                let mut acc = ComplexMatrix::zeros(dim)?;
                for t in terms {
                    if !t.coefficient.is_finite() {
                        return Err(Error::InvalidParameter("non-finite coefficient".into()));
                    }
                    let m = t.family.instantiate(dim)?;
                    acc = &acc + &m.scale(C64::new(t.coefficient, 0.0));
                }
                Ok(acc)
            }
        }
    }
}

/// `W · diag(s_1..s_N) · V*` with Haar `W`, `V` drawn from `seed`.
pub fn random_compact(dim: usize, decay: &SequenceRule, seed: u64) -> Result<ComplexMatrix> {
    let s = decay.take(dim);
    if s.iter().any(|&x| x < 0.0) || s.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter(
            "singular-value decay must be non-negative and non-increasing".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    random_with_singulars(&s, &mut rng)
}

#[derive(Debug, Clone)]
pub struct FiniteSections {
    pub dims: Vec<usize>,
    pub matrices: Vec<ComplexMatrix>,
    /// False when sections are independent draws rather than corners.
    pub nested: bool,
}

pub fn finite_sections(family: &OperatorFamily, dims: &[usize]) -> Result<FiniteSections> {
    if dims.is_empty() || dims[0] == 0 || dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadDimensions);
    }
    let matrices = dims
        .iter()
        .map(|&n| family.instantiate(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiniteSections {
        dims: dims.to_vec(),
        matrices,
        nested: family.is_nested(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{op_norm, singular_values};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn shift_examples() {
        let t = weighted_shift(&[c(4.0), c(9.0)], 3).unwrap();
        let want =
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[4.0, 0.0, 0.0], &[0.0, 9.0, 0.0]])
                .unwrap();
        assert_eq!(t, want);
        assert!(weighted_shift(&[c(0.0)], 2).unwrap().is_zero());
        let h: Vec<C64> = (1..=3).map(|k| c(1.0 / k as f64)).collect();
        let t = weighted_shift(&h, 4).unwrap();
        assert_eq!(t[(1, 0)], c(1.0));
        assert_eq!(t[(2, 1)], c(0.5));
        assert_eq!(t[(3, 2)], c(1.0 / 3.0));
        assert_eq!(
            weighted_shift(&[c(1.0)], 3).unwrap_err(),
            Error::TooFewWeights { needed: 2, got: 1 }
        );
    }

    #[test]
    fn jordan_examples() {
        let j = jordan_block(c(0.0), 2).unwrap();
        assert_eq!(
            j,
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
        );
        assert_eq!(jordan_block(c(1.0), 1).unwrap()[(0, 0)], c(1.0));
        let i = C64::new(0.0, 1.0);
        let j = jordan_block(i, 3).unwrap();
        for k in 0..3 {
            assert_eq!(j[(k, k)], i);
        }
        assert_eq!(j[(0, 1)], c(1.0));
        assert_eq!(j[(1, 2)], c(1.0));
        assert_eq!(j[(0, 2)], c(0.0));
        assert_eq!(j[(1, 0)], c(0.0));
    }

    #[test]
    fn random_compact_examples() {
        let zero = SequenceRule::Constant { value: 0.0 };
        assert!(random_compact(5, &zero, 1).unwrap().is_zero());

        let rank1 = SequenceRule::Explicit { values: vec![1.0] };
        let m = random_compact(6, &rank1, 7).unwrap();
        assert!((op_norm(&m) - 1.0).abs() < 1e-12);
        assert!(singular_values(&m).unwrap()[1] < 1e-12);

        let m = random_compact(8, &SequenceRule::harmonic(), 42).unwrap();
        let s = singular_values(&m).unwrap();
        for (k, sk) in s.iter().enumerate() {
            assert!((sk - 1.0 / (k + 1) as f64).abs() < 1e-12);
        }

        let growing = SequenceRule::Geometric {
            ratio: 2.0,
            scale: 1.0,
        };
        assert!(random_compact(3, &growing, 0).is_err());
    }

    #[test]
    fn random_unitary_is_unitary_and_deterministic() {
        let u = random_unitary(7, &mut seeded_rng(3)).unwrap();
        let eye = ComplexMatrix::identity(7).unwrap();
        assert!(op_norm(&(&(&u.adjoint() * &u) - &eye)) < 1e-13);
        let again = random_unitary(7, &mut seeded_rng(3)).unwrap();
        assert_eq!(u.row_major(), again.row_major());
        let other = random_unitary(7, &mut seeded_rng(4)).unwrap();
        assert_ne!(u.row_major(), other.row_major());
    }

    #[test]
    fn rank_deficient_has_requested_rank() {
        let m = random_rank_deficient(6, 2, &mut seeded_rng(9)).unwrap();
        let s = singular_values(&m).unwrap();
        assert!(s[1] > 1e-3);
        assert!(s[2] < 1e-12 * s[0]);
    }

    #[test]
    fn section_corners() {
        let diag = OperatorFamily::Diagonal {
            diagonal: SequenceRule::harmonic(),
        };
        let s = finite_sections(&diag, &[2, 4]).unwrap();
        assert!(s.nested);
        assert_eq!(
            s.matrices[0],
            ComplexMatrix::from_real_diagonal(&[1.0, 0.5]).unwrap()
        );
        assert_eq!(
            s.matrices[1],
            ComplexMatrix::from_real_diagonal(&[1.0, 0.5, 1.0 / 3.0, 0.25]).unwrap()
        );
        assert_eq!(s.matrices[1].corner(2).unwrap(), s.matrices[0]);

        let shift = OperatorFamily::WeightedShift {
            weights: SequenceRule::harmonic(),
        };
        let s = finite_sections(&shift, &[3, 6]).unwrap();
        assert_eq!(s.matrices[1].corner(3).unwrap(), s.matrices[0]);

        let jordan = OperatorFamily::Jordan { lambda: [0.0, 0.0] };
        let s = finite_sections(&jordan, &[2, 3]).unwrap();
        assert_eq!(s.matrices[1].corner(2).unwrap(), s.matrices[0]);

        let rc = OperatorFamily::RandomCompact {
            decay: SequenceRule::harmonic(),
            seed: 1,
        };
        assert!(!finite_sections(&rc, &[2, 3]).unwrap().nested);

        assert_eq!(
            finite_sections(&diag, &[4, 4]).unwrap_err(),
            Error::BadDimensions
        );
        assert_eq!(
            finite_sections(&diag, &[]).unwrap_err(),
            Error::BadDimensions
        );
    }

    #[test]
    fn combination_and_blocks() {
        let fam = OperatorFamily::Combination {
            terms: vec![
                Term {
                    coefficient: 1.0,
                    family: OperatorFamily::Diagonal {
                        diagonal: SequenceRule::harmonic(),
                    },
                },
                Term {
                    coefficient: 0.2,
                    family: OperatorFamily::WeightedShift {
                        weights: SequenceRule::Harmonic {
                            power: 2.0,
                            scale: 1.0,
                        },
                    },
                },
            ],
        };
        assert!(fam.is_nested());
        let m = fam.instantiate(3).unwrap();
        assert_eq!(m[(1, 1)], c(0.5));
        assert!((m[(2, 1)] - c(0.2 / 4.0)).norm() < 1e-17);
        let big = fam.instantiate(6).unwrap();
        assert_eq!(big.corner(3).unwrap(), m);

        let blocks = OperatorFamily::BlockDiag {
            blocks: vec![
                Block {
                    dim: 2,
                    family: OperatorFamily::Jordan { lambda: [2.0, 0.0] },
                },
                Block {
                    dim: 1,
                    family: OperatorFamily::Jordan { lambda: [0.1, 0.0] },
                },
            ],
        };
        assert!(!blocks.is_nested());
        assert_eq!(blocks.instantiate(3).unwrap()[(2, 2)], c(0.1));
        assert!(blocks.instantiate(4).is_err());
    }

    #[test]
    fn decay_window_check() {
        let diag = OperatorFamily::Diagonal {
            diagonal: SequenceRule::harmonic(),
        };
        assert_eq!(diag.decays_on_window(5), Some(true));
        let grow = OperatorFamily::Diagonal {
            diagonal: SequenceRule::Geometric {
                ratio: 1.5,
                scale: 1.0,
            },
        };
        assert_eq!(grow.decays_on_window(5), Some(false));
        assert_eq!(
            OperatorFamily::Jordan { lambda: [0.0, 0.0] }.decays_on_window(3),
            None
        );
    }
}
