//! Dense complex linear-algebra primitives.
//!
//! SVD and Hermitian eigenproblems use complex Jacobi sweeps, Schur forms a
//! shifted Hessenberg QR. This module fixes orderings, conventions
//! (`0^p = 0`, PSD clamping) and reports solver failures as errors instead of
//! panics.

use nalgebra::DMatrix;

mod jacobi;
mod qr;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Negative eigenvalues above `-PSD_CLAMP * ‖A‖` are rounding noise.
pub const PSD_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct SvdParts {
    pub left: ComplexMatrix,
    /// Descending, non-negative.
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdParts {
    /// `left · diag(s) · right*`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.singulars.len();
        let mut scaled = self.left.as_matrix().clone();
        for j in 0..n {
            let s = self.singulars[j];
            scaled.column_mut(j).scale_mut(s);
        }
        ComplexMatrix::from_raw(scaled * self.right.as_matrix().adjoint())
    }
}

/// `max(1, ‖A‖)`, the scale every tolerance in the crate is measured against.
pub fn tol_scale(a: &ComplexMatrix) -> f64 {
    op_norm(a).max(1.0)
}

/// Eigendecomposition of the Hermitian part `(A + A*)/2`.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let n = a.dim();
    let m = a.as_matrix();
    let herm = (m + m.adjoint()).scale(0.5);
    let (values, vectors) = jacobi::eigh(&herm).ok_or(Error::NoConvergence {
        routine: "hermitian eigensolver",
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &vectors.column(src));
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_raw(vecs),
    })
}

fn raw_svd(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, Vec<f64>, DMatrix<C64>)> {
    jacobi::svd(m).ok_or(Error::NoConvergence { routine: "svd" })
}

/// Full SVD with singular values sorted descending.
///
/// The zero matrix returns identity factors.
pub fn svd(a: &ComplexMatrix) -> Result<SvdParts> {
    let n = a.dim();
    if a.is_zero() {
        let eye = ComplexMatrix::identity(n)?;
        return Ok(SvdParts {
            left: eye.clone(),
            singulars: vec![0.0; n],
            right: eye,
        });
    }
    let (u, s, v) = raw_svd(a.as_matrix())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let mut left = DMatrix::zeros(n, n);
    let mut right = DMatrix::zeros(n, n);
    let mut singulars = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        left.set_column(dst, &u.column(src));
        right.set_column(dst, &v.column(src));
        singulars.push(s[src]);
    }
    Ok(SvdParts {
        left: ComplexMatrix::from_raw(left),
        singulars,
        right: ComplexMatrix::from_raw(right),
    })
}

/// Singular values only, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.is_zero() {
        return Ok(vec![0.0; a.dim()]);
    }
    let (_, mut s, _) = raw_svd(a.as_matrix())?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Operator (spectral) norm: the largest singular value.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    // Only a solver failure could leave us without singular values; fall back
    // to the Frobenius norm, which bounds the spectral norm from above.
    singular_values(a)
        .map(|s| s[0])
        .unwrap_or_else(|_| a.frobenius_norm())
}

/// Operator norm of a Hermitian matrix via its eigenvalues.
pub(crate) fn hermitian_op_norm(a: &DMatrix<C64>) -> f64 {
    match jacobi::eigh(a) {
        Some((w, _)) => w.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        None => a.norm(),
    }
}

/// Spectral norm of a possibly rectangular matrix.
pub(crate) fn rect_op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // ‖M‖² = λ_max(M* M), scaled to keep the Gram matrix finite
    let scale = m.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    let x = m.unscale(scale);
    match jacobi::eigh(&(x.adjoint() * &x)) {
        Some((w, _)) => scale * w.iter().fold(0.0_f64, |a, x| a.max(*x)).sqrt(),
        None => m.norm(),
    }
}

/// `A^p` for Hermitian positive semidefinite `A`, with `0^p = 0`.
pub fn psd_power(a: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidExponent(p));
    }
    let eig = hermitian_eig(a)?;
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = -PSD_CLAMP * norm;
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&x| x < floor) {
        return Err(Error::NotPsd { eigenvalue: bad });
    }
    let powered: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&x| if x <= 0.0 { 0.0 } else { x.powf(p) })
        .collect();
    Ok(spectral_synthesis(&eig.eigenvectors, &powered))
}

/// `V · diag(values) · V*`
pub(crate) fn spectral_synthesis(v: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    let vm = v.as_matrix();
    let mut scaled = vm.clone();
    for (j, &x) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(x);
    }
    let mut out = scaled * vm.adjoint();
    // Hermitian by construction; remove rounding asymmetry.
    let sym = (&out + out.adjoint()).scale(0.5);
    out.copy_from(&sym);
    ComplexMatrix::from_raw(out)
}

/// Complex Schur form `A = Q R Q*` with `R` upper triangular.
pub fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (q, r) = qr::complex_schur(a.as_matrix()).ok_or(Error::NoConvergence {
        routine: "Schur eigensolver",
    })?;
    Ok((ComplexMatrix::from_raw(q), ComplexMatrix::from_raw(r)))
}

fn triangular_diagonal(m: &DMatrix<C64>) -> Option<Vec<C64>> {
    let n = m.nrows();
    let zero = C64::new(0.0, 0.0);
    let upper = (0..n).all(|j| ((j + 1)..n).all(|i| m[(i, j)] == zero));
    let lower = (0..n).all(|j| (0..j).all(|i| m[(i, j)] == zero));
    (upper || lower).then(|| (0..n).map(|i| m[(i, i)]).collect())
}

/// Eigenvalues with algebraic multiplicity, ordered by descending modulus
/// (ties by real then imaginary part).
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    // exactly triangular input: the diagonal is the spectrum
    let mut eigs = match triangular_diagonal(a.as_matrix()) {
        Some(d) => d,
        None => {
            let (_, r) = schur(a)?;
            (0..a.dim()).map(|i| r[(i, i)]).collect()
        }
    };
    eigs.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
    Ok(eigs)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().fold(0.0_f64, |m, z| m.max(z.norm())))
}
