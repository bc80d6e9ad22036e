//! Complex Schur form by single-shift Hessenberg QR.
//!
//! Wilkinson shifts with exceptional shifts every ten stalled sweeps, so
//! cyclic and nilpotent shift-like inputs (where the plain shifted QR
//! stalls) still deflate.

use nalgebra::{DMatrix, Hessenberg};

use crate::matrix::C64;

const ITERS_PER_EIGENVALUE: usize = 60;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Givens pair `(c, s)` with `[c s; -conj(s) c] [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, zero());
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Returns `(Q, R)` with `A = Q R Q*`, `R` upper triangular, or `None` if
/// the iteration budget is exhausted.
pub(crate) fn complex_schur(a: &DMatrix<C64>) -> Option<(DMatrix<C64>, DMatrix<C64>)> {
    let n = a.nrows();
    if n == 1 {
        return Some((DMatrix::identity(1, 1), a.clone()));
    }
    let (mut z, mut h) = Hessenberg::new(a.clone()).unpack();
    let ulp = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE / ulp;

    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    let budget = ITERS_PER_EIGENVALUE * n;

    while hi > 0 {
        // find the lowest negligible subdiagonal in the active window
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut tst = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if tst == 0.0 {
                if lo >= 2 {
                    tst += h[(lo - 1, lo - 2)].norm();
                }
                if lo + 1 < n {
                    tst += h[(lo + 1, lo)].norm();
                }
            }
            if sub <= safe_min || sub <= ulp * tst {
                h[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        its += 1;
        total += 1;
        if total > budget {
            return None;
        }

        let shift = if its % 20 == 10 {
            h[(lo, lo)] + 0.75 * h[(lo + 1, lo)].re.abs()
        } else if its.is_multiple_of(20) {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
        } else {
            wilkinson(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);

            // rows k, k+1 ← G · rows
            let first_col = if k == lo { lo } else { k - 1 };
            for j in first_col..n {
                let (p, q) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = p * c + s * q;
                h[(k + 1, j)] = -s.conj() * p + q * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = zero();
            }
            // columns k, k+1 ← columns · G*
            let last_row = (k + 2).min(hi);
            for i in 0..=last_row {
                let (p, q) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = p * c + q * s.conj();
                h[(i, k + 1)] = -p * s + q * c;
            }
            for i in 0..n {
                let (p, q) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = p * c + q * s.conj();
                z[(i, k + 1)] = -p * s + q * c;
            }
        }
    }

    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = zero();
        }
    }
    Some((z, h))
}
