use crate::aluthge::IterationTrace;
use crate::error::{Error, Result};
use crate::linalg::op_norm;
use crate::matrix::{ComplexMatrix, C64};

/// `‖Tⁿ‖^{1/n}` for `n = 1..=n_max`.
///
/// Powers are carried as `(Tⁿ / ‖Tⁿ‖, ln ‖Tⁿ‖)` so large exponents neither
/// overflow nor underflow. `Tⁿ` is the square of `T^{n/2}` when `n` is a
/// power of two and `T^{n-1} · T` otherwise. Once a power vanishes every
/// later entry is zero.
pub fn gelfand_radius(t: &ComplexMatrix, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(n_max);
    let t_norm = op_norm(t);
    if t_norm == 0.0 {
        return Ok(vec![0.0; n_max]);
    }
    let unit_t = t.scale(C64::new(1.0 / t_norm, 0.0));

    // (normalized power, log norm) for the previous n and the last power of two
    let mut prev = (unit_t.clone(), t_norm.ln());
    let mut pow2 = prev.clone();
    out.push(t_norm);

    for n in 2..=n_max {
        let (raw, log_base) = if n.is_power_of_two() {
            (&pow2.0 * &pow2.0, 2.0 * pow2.1)
        } else {
            (&prev.0 * &unit_t, prev.1 + t_norm.ln())
        };
        let norm = op_norm(&raw);
        if norm == 0.0 {
            out.resize(n_max, 0.0);
            return Ok(out);
        }
        let log_norm = log_base + norm.ln();
        out.push((log_norm / n as f64).exp());
        prev = (raw.scale(C64::new(1.0 / norm, 0.0)), log_norm);
        if n.is_power_of_two() {
            pow2 = prev.clone();
        }
    }
    Ok(out)
}

/// Spectral-radius estimate `lim ‖ΔⁿT‖`: the last recorded norm.
pub fn yamazaki_radius(trace: &IterationTrace) -> f64 {
    trace.final_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aluthge::{iterate, IterationConfig};
    use crate::generators::jordan_block;

    #[test]
    fn gelfand_examples() {
        let d = ComplexMatrix::from_real_diagonal(&[3.0, 1.0]).unwrap();
        for v in gelfand_radius(&d, 20).unwrap() {
            assert!((v - 3.0).abs() < 1e-12);
        }
        let j = jordan_block(C64::new(0.0, 0.0), 2).unwrap();
        let g = gelfand_radius(&j, 6).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let g = gelfand_radius(&t, 64).unwrap();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        // ‖Tⁿ‖ = n/2 + sqrt(1 + n²/4)
        let n = 64.0_f64;
        let exact = (n / 2.0 + (1.0 + n * n / 4.0).sqrt()).powf(1.0 / n);
        assert!((g[63] - exact).abs() < 1e-12);
        assert!(gelfand_radius(&t, 0).is_err());
    }

    #[test]
    fn gelfand_survives_huge_powers() {
        let d = ComplexMatrix::from_real_diagonal(&[1e200, 1.0]).unwrap();
        let g = gelfand_radius(&d, 16).unwrap();
        assert!(g.iter().all(|v| (v / 1e200 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn yamazaki_examples() {
        let d = ComplexMatrix::from_real_diagonal(&[3.0, 1.0]).unwrap();
        let tr = iterate(&d, &IterationConfig::default()).unwrap();
        assert!((yamazaki_radius(&tr) - 3.0).abs() < 1e-12);
        let j = jordan_block(C64::new(0.0, 0.0), 3).unwrap();
        let tr = iterate(&j, &IterationConfig::default()).unwrap();
        assert!(yamazaki_radius(&tr) <= 1e-10);
    }
}
