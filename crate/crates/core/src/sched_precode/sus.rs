//! Semi-orthogonal user selection.

use nalgebra::DVector;
use num_complex::Complex64;

pub const DEFAULT_SUS_EPSILON: f64 = 0.4;

/// `|a^H b| / (|a| |b|)`; zero vectors correlate with nothing.
pub fn channel_correlation(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dotc(b).norm() / (na * nb)
}

/// Orthonormal basis of the selected channels, grown one vector at a time.
#[derive(Debug, Clone, Default)]
pub(crate) struct Span {
    basis: Vec<DVector<Complex64>>,
}

impl Span {
    /// Component of `h` orthogonal to the span.
    pub(crate) fn residual(&self, h: &DVector<Complex64>) -> DVector<Complex64> {
        let mut r = h.clone();
        for q in &self.basis {
            let c = q.dotc(&r);
            r -= q * c;
        }
        r
    }

    /// Norm of the projection of `h` onto the span, relative to `|h|`.
    pub(crate) fn correlation(&self, h: &DVector<Complex64>) -> f64 {
        let n = h.norm();
        if n == 0.0 || self.basis.is_empty() {
            return 0.0;
        }
        let projected: f64 = self.basis.iter().map(|q| q.dotc(h).norm_sqr()).sum();
        (projected.sqrt() / n).min(1.0)
    }

    pub(crate) fn push(&mut self, h: &DVector<Complex64>) {
        let r = self.residual(h);
        let n = r.norm();
        if n > 0.0 {
            self.basis.push(r / Complex64::new(n, 0.0));
        }
    }
}

/// Greedy selection: start from the strongest channel, keep only candidates
/// whose projection onto the selected span stays below `epsilon`, then take
/// the one with the largest residual norm. Returns candidate indices in
/// selection order.
pub fn sus_select(candidates: &[DVector<Complex64>], epsilon: f64, max_users: usize) -> Vec<usize> {
    let mut selected = Vec::new();
    let mut span = Span::default();
    let mut pool: Vec<usize> = (0..candidates.len()).collect();
    while selected.len() < max_users && !pool.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for &i in &pool {
            let score = span.residual(&candidates[i]).norm();
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        let Some((pick, score)) = best else { break };
        if score == 0.0 {
            break;
        }
        selected.push(pick);
        span.push(&candidates[pick]);
        pool.retain(|&i| i != pick && span.correlation(&candidates[i]) < epsilon);
    }
    selected
}
