//! Regularized zero-forcing precoder.
//!
//! `W = eta' H^H (H H^H + alpha I)^-1` with
//! `eta' = sqrt(P_total / trace(W_u W_u^H))` computed on the unscaled `W_u`.
//! Row `n` of `H` is `h_n^H`, so `(H W)[n][i] = h_n^H w_i`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PrecodeError;

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingMatrix {
    /// One column per served user.
    pub w: DMatrix<Complex64>,
    pub alpha: f64,
    /// The power normalization `eta'`.
    pub scale: f64,
}

impl PrecodingMatrix {
    pub fn power(&self) -> f64 {
        self.w.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Relative floor on the smallest eigenvalue of `H H^H` when `alpha = 0`.
const SINGULAR_RCOND: f64 = 1e-13;

pub fn rzf(h: &DMatrix<Complex64>, alpha: f64, p_total: f64) -> Result<PrecodingMatrix, PrecodeError> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(PrecodeError::InvalidRegularization(alpha));
    }
    if !(p_total.is_finite() && p_total > 0.0) {
        return Err(PrecodeError::InvalidPower(p_total));
    }
    let users = h.nrows();
    if users == 0 || h.ncols() == 0 {
        return Err(PrecodeError::ShapeMismatch("empty channel matrix".into()));
    }
    let hh = h.adjoint();
    let mut gram = h * &hh;
    if alpha == 0.0 {
        let eig = gram.clone().symmetric_eigenvalues();
        let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min = eig.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if max == 0.0 || min <= SINGULAR_RCOND * max {
            return Err(PrecodeError::Singular);
        }
    }
    for i in 0..users {
        gram[(i, i)] += Complex64::new(alpha, 0.0);
    }
    let inverse = gram
        .cholesky()
        .ok_or(PrecodeError::Singular)?
        .inverse();
    let unscaled = hh * inverse;
    let trace: f64 = unscaled.iter().map(Complex64::norm_sqr).sum();
    if !(trace.is_finite() && trace > 0.0) {
        return Err(PrecodeError::Singular);
    }
    let scale = (p_total / trace).sqrt();
    Ok(PrecodingMatrix {
        w: unscaled * Complex64::new(scale, 0.0),
        alpha,
        scale,
    })
}

/// `L sigma_bar^2 / P_total`, the MMSE-style regularizer.
pub fn default_regularization(noise: &[f64], p_total: f64) -> f64 {
    if noise.is_empty() {
        return 0.0;
    }
    let mean = noise.iter().sum::<f64>() / noise.len() as f64;
    noise.len() as f64 * mean / p_total
}

/// `|h_l^H w_l|^2 / (sum_{i != l} |h_l^H w_i|^2 + sigma_l^2)` per user.
pub fn precoded_sinr(
    h: &DMatrix<Complex64>,
    w: &DMatrix<Complex64>,
    noise: &[f64],
) -> Result<Vec<f64>, PrecodeError> {
    if h.ncols() != w.nrows() || h.nrows() != w.ncols() || noise.len() != h.nrows() {
        return Err(PrecodeError::ShapeMismatch(format!(
            "H is {}x{}, W is {}x{}, {} noise powers",
            h.nrows(),
            h.ncols(),
            w.nrows(),
            w.ncols(),
            noise.len()
        )));
    }
    let hw = h * w;
    Ok((0..h.nrows())
        .map(|l| {
            let signal = hw[(l, l)].norm_sqr();
            let interference: f64 = (0..hw.ncols()).filter(|&i| i != l).map(|i| hw[(l, i)].norm_sqr()).sum();
            signal / (interference + noise[l])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_h(rng: &mut Prng, n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.normal(), rng.normal()))
    }

    #[test]
    fn identity_channel_without_regularization() {
        let h = DMatrix::<Complex64>::identity(2, 2);
        let p = rzf(&h, 0.0, 2.0).unwrap();
        assert!((&p.w - &h).norm() < 1e-12);
        assert!((p.scale - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_with_unit_regularization() {
        let h = DMatrix::<Complex64>::identity(2, 2);
        let p = rzf(&h, 1.0, 2.0).unwrap();
        assert!((p.scale - 2.0).abs() < 1e-12);
        assert!((&p.w - &h).norm() < 1e-12);
    }

    #[test]
    fn zero_forcing_nulls_cross_terms() {
        let mut rng = Prng::new(9);
        for _ in 0..20 {
            let h = random_h(&mut rng, 4);
            let p = rzf(&h, 0.0, 3.0).unwrap();
            let hw = &h * &p.w;
            let bound = 1e-8 * h.norm();
            for n in 0..4 {
                for i in 0..4 {
                    if n != i {
                        assert!(hw[(n, i)].norm() <= bound);
                    } else {
                        assert!((hw[(n, n)] - c(p.scale)).norm() < 1e-8 * p.scale);
                    }
                }
            }
        }
    }

    #[test]
    fn singular_channel_needs_regularization() {
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert_eq!(rzf(&h, 0.0, 1.0), Err(PrecodeError::Singular));
        assert!(rzf(&h, 0.1, 1.0).is_ok());
        assert_eq!(rzf(&h, -1.0, 1.0), Err(PrecodeError::InvalidRegularization(-1.0)));
        assert_eq!(rzf(&h, 1.0, 0.0), Err(PrecodeError::InvalidPower(0.0)));
    }

    #[test]
    fn identity_sinr_is_unit() {
        let i = DMatrix::<Complex64>::identity(3, 3);
        assert_eq!(precoded_sinr(&i, &i, &[1.0; 3]).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn zero_forcing_sinr_is_scale_squared_over_noise() {
        let mut rng = Prng::new(21);
        let h = random_h(&mut rng, 3);
        let p = rzf(&h, 0.0, 5.0).unwrap();
        let noise = [0.5, 1.0, 2.0];
        let got = precoded_sinr(&h, &p.w, &noise).unwrap();
        for (g, n) in got.iter().zip(noise) {
            let want = p.scale * p.scale / n;
            assert!((g - want).abs() < 1e-8 * want);
        }
    }

    #[test]
    fn zero_column_gives_zero_sinr() {
        let mut rng = Prng::new(4);
        let h = random_h(&mut rng, 3);
        let mut w = rzf(&h, 0.1, 1.0).unwrap().w;
        w.column_mut(1).fill(c(0.0));
        let sinr = precoded_sinr(&h, &w, &[1.0; 3]).unwrap();
        assert_eq!(sinr[1], 0.0);
        assert!(sinr[0] > 0.0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let h = DMatrix::<Complex64>::identity(2, 2);
        let w = DMatrix::<Complex64>::identity(3, 3);
        assert!(matches!(precoded_sinr(&h, &w, &[1.0; 2]), Err(PrecodeError::ShapeMismatch(_))));
        assert!(matches!(precoded_sinr(&h, &h, &[1.0; 3]), Err(PrecodeError::ShapeMismatch(_))));
    }

    #[test]
    fn default_alpha() {
        assert_eq!(default_regularization(&[1.0, 3.0], 4.0), 1.0);
    }
}
