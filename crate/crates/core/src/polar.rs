//! Polar decomposition `T = U|T|` with the canonical partial isometry.
//!
//! `U` is built from the SVD `T = W Σ V*` as `Σ_{s_i > tol} w_i v_i*`, so it
//! vanishes on the numerical kernel of `T` and `U*U` is the projection onto
//! `ker(T)^⊥`. Singular values at or below the rank tolerance are treated as
//! zero in the modulus as well, which keeps `ker |T| = ker U` exact.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, spectral_synthesis};
use crate::matrix::{ComplexMatrix, C64};

/// A singular value within this factor of the rank tolerance is borderline.
pub const BORDERLINE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct PolarParts {
    pub isometry: ComplexMatrix,
    pub modulus: ComplexMatrix,
    pub rank: usize,
    pub rank_tol: f64,
    /// Some singular value sits within a factor of ten of `rank_tol`; the
    /// rank decision (and hence Δ) may be unstable here.
    pub borderline: bool,
    left: ComplexMatrix,
    right: ComplexMatrix,
    singulars: Vec<f64>,
}

impl PolarParts {
    /// Singular values of `T`, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singulars
    }

    /// Operator norm of `T`.
    pub fn norm(&self) -> f64 {
        self.singulars[0]
    }

    /// `|T|^p` computed from the SVD right factor, with `0^p = 0` on the
    /// numerical kernel.
    pub fn modulus_power(&self, p: f64) -> Result<ComplexMatrix> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidExponent(p));
        }
        let powered: Vec<f64> = self
            .singulars
            .iter()
            .enumerate()
            .map(|(i, &s)| if i < self.rank { s.powf(p) } else { 0.0 })
            .collect();
        Ok(spectral_synthesis(&self.right, &powered))
    }

    /// A unitary that agrees with `U` on `ker(T)^⊥` and maps `ker(T)`
    /// isometrically onto `range(T)^⊥`.
    pub fn unitary_extension(&self) -> ComplexMatrix {
        let n = self.singulars.len();
        let w = self.left.as_matrix();
        let v = self.right.as_matrix();
        let mut u = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            u += w.column(i) * v.column(i).adjoint();
        }
        ComplexMatrix::from_raw(u)
    }
}

/// Default numerical rank cut: `dim · ε · ‖T‖`.
pub fn default_rank_tol(dim: usize, norm: f64) -> f64 {
    dim as f64 * f64::EPSILON * norm
}

pub fn polar_decompose(t: &ComplexMatrix, rank_tol: Option<f64>) -> Result<PolarParts> {
    if let Some(tol) = rank_tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rank tolerance must be finite and non-negative, got {tol}"
            )));
        }
    }
    let n = t.dim();
    let parts = linalg::svd(t)?;
    let norm = parts.singulars[0];
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(n, norm));
    let rank = parts.singulars.iter().filter(|&&s| s > tol).count();
    let borderline = tol > 0.0
        && parts
            .singulars
            .iter()
            .any(|&s| s >= tol / BORDERLINE_FACTOR && s <= tol * BORDERLINE_FACTOR);

    let w = parts.left.as_matrix();
    let v = parts.right.as_matrix();
    let mut isometry = DMatrix::<C64>::zeros(n, n);
    for i in 0..rank {
        isometry += w.column(i) * v.column(i).adjoint();
    }
    let kept: Vec<f64> = parts
        .singulars
        .iter()
        .enumerate()
        .map(|(i, &s)| if i < rank { s } else { 0.0 })
        .collect();
    let modulus = spectral_synthesis(&parts.right, &kept);

    Ok(PolarParts {
        isometry: ComplexMatrix::from_raw(isometry),
        modulus,
        rank,
        rank_tol: tol,
        borderline,
        left: parts.left,
        right: parts.right,
        singulars: parts.singulars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::op_norm;

    fn m(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        op_norm(&(a - b)) <= tol
    }

    #[test]
    fn positive_diagonal() {
        let t = ComplexMatrix::from_real_diagonal(&[2.0, 3.0]).unwrap();
        let p = polar_decompose(&t, None).unwrap();
        assert_eq!(p.rank, 2);
        assert!(close(
            &p.isometry,
            &ComplexMatrix::identity(2).unwrap(),
            1e-14
        ));
        assert!(close(&p.modulus, &t, 1e-14));
    }

    #[test]
    fn nilpotent_two_by_two() {
        let t = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let p = polar_decompose(&t, None).unwrap();
        assert_eq!(p.rank, 1);
        assert!(close(&p.isometry, &t, 1e-15));
        assert!(close(&p.modulus, &m(&[&[0.0, 0.0], &[0.0, 1.0]]), 1e-15));
        let proj = &p.isometry.adjoint() * &p.isometry;
        assert!(close(&proj, &m(&[&[0.0, 0.0], &[0.0, 1.0]]), 1e-15));
        assert!(close(&(&p.isometry * &p.modulus), &t, 1e-15));
    }

    #[test]
    fn zero_matrix() {
        let z = ComplexMatrix::zeros(3).unwrap();
        let p = polar_decompose(&z, None).unwrap();
        assert_eq!(p.rank, 0);
        assert!(p.isometry.is_zero());
        assert!(p.modulus.is_zero());
        assert!(!p.borderline);
    }

    #[test]
    fn override_and_borderline() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1e-6]).unwrap();
        let p = polar_decompose(&t, Some(1e-3)).unwrap();
        assert_eq!(p.rank, 1);
        assert!(!p.borderline);
        assert_eq!(p.rank_tol, 1e-3);
        let p = polar_decompose(&t, Some(2e-6)).unwrap();
        assert_eq!(p.rank, 1);
        assert!(p.borderline);
        assert!(polar_decompose(&t, Some(-1.0)).is_err());
    }

    #[test]
    fn modulus_power_matches_psd_power() {
        let t = m(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, -1.0], &[0.5, 0.0, 3.0]]);
        let p = polar_decompose(&t, None).unwrap();
        let via_eig = crate::linalg::psd_power(&p.modulus, 0.5).unwrap();
        assert!(close(&p.modulus_power(0.5).unwrap(), &via_eig, 1e-13));
        assert!(close(&p.modulus_power(1.0).unwrap(), &p.modulus, 1e-13));
    }

    #[test]
    fn unitary_extension_is_unitary() {
        let t = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let p = polar_decompose(&t, None).unwrap();
        let u = p.unitary_extension();
        let eye = ComplexMatrix::identity(3).unwrap();
        assert!(close(&(&u.adjoint() * &u), &eye, 1e-14));
        assert!(close(&(&u * &p.modulus), &t, 1e-14));
    }
}
