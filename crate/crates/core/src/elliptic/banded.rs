//! Banded LU factorization without pivoting.
//!
//! The shifted operators factored here are nonsingular M-matrices, for
//! which Gaussian elimination without pivoting is stable.

use super::DiscreteOperator;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedLu {
    /// Factors `alpha * M + diag(shift)` where `M` is the interior matrix.
    pub fn factor(op: &DiscreteOperator, alpha: f64, shift: &[f64]) -> Result<BandedLu> {
        let n = op.len();
        assert_eq!(shift.len(), n);
        let bw = op.bandwidth();
        let width = 2 * bw + 1;
        let mut data = vec![0.0; n * width];
        for k in 0..n {
            data[k * width + bw] = alpha * op.diagonal()[k] + shift[k];
            for (m, v) in op.row(k) {
                data[k * width + (m + bw - k)] += alpha * v;
            }
        }
        let mut lu = BandedLu { n, bw, width, data };
        lu.eliminate()?;
        Ok(lu)
    }

    fn eliminate(&mut self) -> Result<()> {
        let (n, bw, w) = (self.n, self.bw, self.width);
        for k in 0..n {
            let pivot = self.data[k * w + bw];
            if !(pivot.abs() > 1e-300) || !pivot.is_finite() {
                return Err(Error::invalid(format!("zero pivot at row {k} in banded LU")));
            }
            let last = (k + bw).min(n - 1);
            let (head, tail) = self.data.split_at_mut((k + 1) * w);
            let prow = &head[k * w + bw + 1..k * w + bw + 1 + (last - k)];
            for i in k + 1..=last {
                let row = &mut tail[(i - k - 1) * w..(i - k) * w];
                // column k sits at offset k + bw - i in row i
                let off = k + bw - i;
                let l = row[off] / pivot;
                row[off] = l;
                if l != 0.0 {
                    let dst = &mut row[off + 1..off + 1 + (last - k)];
                    for (d, p) in dst.iter_mut().zip(prow) {
                        *d -= l * p;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.width);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = &self.data[i * w + lo + bw - i..i * w + bw];
            x[i] -= dot(row, &x[lo..i]);
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let row = &self.data[i * w + bw..i * w + bw + 1 + hi - i];
            x[i] = (x[i] - dot(&row[1..], &x[i + 1..=hi])) / row[0];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, ra) = a.split_at(a.len() / 4 * 4);
    let (cb, rb) = b.split_at(ca.len());
    for (x, y) in ca.chunks_exact(4).zip(cb.chunks_exact(4)) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
