//! Complex Jacobi methods: one-sided (Hestenes) SVD and two-sided Hermitian
//! eigensolver.
//!
//! Both reach relative accuracy on graded matrices, which matters here:
//! Aluthge iterates of truncated shifts carry singular values spanning many
//! orders of magnitude next to exact zeros.

use nalgebra::DMatrix;

use crate::matrix::C64;

const MAX_SWEEPS: usize = 80;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().fold(0.0, |m: f64, z| m.max(z.norm()))
}

/// Rotation parameters for `t² + 2ζt − 1 = 0` (smaller root).
fn rotation(zeta: f64) -> (f64, f64) {
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// `A = U diag(s) V*` for square `A`; singular values unsorted, `U` and `V`
/// unitary. `None` if the sweeps do not converge.
pub(crate) fn svd(a: &DMatrix<C64>) -> Option<(DMatrix<C64>, Vec<f64>, DMatrix<C64>)> {
    let n = a.ncols();
    let scale = max_abs(a);
    if !scale.is_finite() {
        return None;
    }
    let mut g = if scale > 0.0 {
        a.unscale(scale)
    } else {
        a.clone()
    };
    let mut v = DMatrix::<C64>::identity(n, n);
    let eps = f64::EPSILON;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let mag = gamma.norm();
                if mag == 0.0 || mag <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / mag; // e^{-iφ}
                let (c, s) = rotation((beta - alpha) / (2.0 * mag));
                for i in 0..n {
                    let gp = g[(i, p)];
                    let gq = g[(i, q)] * phase;
                    g[(i, p)] = gp * c - gq * s;
                    g[(i, q)] = gp * s + gq * c;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase;
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return None;
    }

    let s: Vec<f64> = (0..n).map(|j| g.column(j).norm()).collect();
    let mut u = g;
    for (j, &sj) in s.iter().enumerate() {
        if sj > 0.0 {
            u.column_mut(j).unscale_mut(sj);
        }
    }
    complete_orthonormal(&mut u, &s);
    Some((u, s.iter().map(|x| x * scale).collect(), v))
}

/// Replaces columns with zero scale by unit vectors orthogonal to the rest.
fn complete_orthonormal(u: &mut DMatrix<C64>, s: &[f64]) {
    let n = u.nrows();
    let missing: Vec<usize> = (0..n).filter(|&j| s[j] == 0.0).collect();
    if missing.is_empty() {
        return;
    }
    let mut basis: Vec<usize> = (0..n).filter(|&j| s[j] > 0.0).collect();
    let mut candidate = 0;
    for &j in &missing {
        loop {
            let mut x = nalgebra::DVector::<C64>::zeros(n);
            x[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            // two passes of Gram-Schmidt
            for _ in 0..2 {
                for &b in &basis {
                    let proj = u.column(b).dotc(&x);
                    x -= u.column(b) * proj;
                }
            }
            let norm = x.norm();
            if norm > 0.5 {
                u.set_column(j, &(x / C64::new(norm, 0.0)));
                basis.push(j);
                break;
            }
            debug_assert!(candidate < n, "standard basis exhausted");
        }
    }
}

/// Eigenpairs of Hermitian `A` (lower and upper triangles both read);
/// eigenvalues unsorted.
pub(crate) fn eigh(a: &DMatrix<C64>) -> Option<(Vec<f64>, DMatrix<C64>)> {
    let n = a.nrows();
    let scale = max_abs(a);
    if !scale.is_finite() {
        return None;
    }
    let mut m = if scale > 0.0 {
        a.unscale(scale)
    } else {
        a.clone()
    };
    let mut v = DMatrix::<C64>::identity(n, n);
    let eps = f64::EPSILON;
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = m[(p, q)];
                let mag = b.norm();
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                if mag == 0.0 || mag <= eps * (app.abs() * aqq.abs()).sqrt().max(f64::MIN_POSITIVE)
                {
                    continue;
                }
                rotated = true;
                let phase = b.conj() / mag; // e^{-iφ}
                let (c, s) = rotation((aqq - app) / (2.0 * mag));
                // J = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] on columns p, q
                let j = [
                    [C64::new(c, 0.0), C64::new(s, 0.0)],
                    [-phase * s, phase * c],
                ];
                for i in 0..n {
                    let (x, y) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = x * j[0][0] + y * j[1][0];
                    m[(i, q)] = x * j[0][1] + y * j[1][1];
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x * j[0][0] + y * j[1][0];
                    v[(i, q)] = x * j[0][1] + y * j[1][1];
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = j[0][0].conj() * x + j[1][0].conj() * y;
                    m[(q, k)] = j[0][1].conj() * x + j[1][1].conj() * y;
                }
                m[(p, q)] = zero();
                m[(q, p)] = zero();
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return None;
    }
    Some(((0..n).map(|i| m[(i, i)].re * scale).collect(), v))
}
