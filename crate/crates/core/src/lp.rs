//! Dense bounded-variable primal simplex, used to polish the truncated design
//! problem to vertex accuracy.
//!
//! Solves `max c.x` subject to `A x = b`, `lower <= x <= upper` from a feasible
//! starting basis. The constraint count is small (one row per mode plus the
//! mass row) while columns number in the thousands, so the basis inverse is
//! kept explicitly and refreshed periodically.

use crate::{Error, Result};

pub(crate) struct Lp {
    /// Column-major `m x n` matrix.
    pub a: Vec<f64>,
    pub m: usize,
    pub c: Vec<f64>,
    pub b: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    /// Row duals `y = c_B B^{-1}`.
    pub y: Vec<f64>,
    pub pivots: usize,
}

impl Lp {
    fn n(&self) -> usize {
        self.c.len()
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }

    fn invert(&self, basis: &[usize]) -> Result<Vec<f64>> {
        let m = self.m;
        // Gauss-Jordan on [B | I] with partial pivoting, row-major
        let mut w = vec![0.0; m * 2 * m];
        for (k, &j) in basis.iter().enumerate() {
            for (i, v) in self.col(j).iter().enumerate() {
                w[i * 2 * m + k] = *v;
            }
        }
        for i in 0..m {
            w[i * 2 * m + m + i] = 1.0;
        }
        for k in 0..m {
            let p = (k..m)
                .max_by(|&r, &s| w[r * 2 * m + k].abs().total_cmp(&w[s * 2 * m + k].abs()))
                .unwrap();
            let piv = w[p * 2 * m + k];
            if piv.abs() < 1e-14 {
                return Err(Error::Numeric("singular simplex basis".into()));
            }
            if p != k {
                for c in 0..2 * m {
                    w.swap(p * 2 * m + c, k * 2 * m + c);
                }
            }
            for c in 0..2 * m {
                w[k * 2 * m + c] /= piv;
            }
            for r in 0..m {
                if r == k {
                    continue;
                }
                let f = w[r * 2 * m + k];
                if f != 0.0 {
                    for c in 0..2 * m {
                        w[r * 2 * m + c] -= f * w[k * 2 * m + c];
                    }
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m..(r + 1) * m].copy_from_slice(&w[r * 2 * m + m..(r + 1) * 2 * m]);
        }
        Ok(inv)
    }

    fn basic_values(&self, inv: &[f64], basis: &[usize], is_basic: &[bool], x: &mut [f64]) {
        let m = self.m;
        let mut rhs = self.b.clone();
        for j in 0..self.n() {
            if !is_basic[j] && x[j] != 0.0 {
                for (r, v) in rhs.iter_mut().zip(self.col(j)) {
                    *r -= v * x[j];
                }
            }
        }
        for (k, &j) in basis.iter().enumerate() {
            x[j] = (0..m).map(|i| inv[k * m + i] * rhs[i]).sum();
        }
    }

    /// Runs the simplex from `basis`, with nonbasic variables at the values in
    /// `x` (each at one of its bounds, or zero when free).
    pub fn solve(&self, mut x: Vec<f64>, mut basis: Vec<usize>, max_pivots: usize) -> Result<LpSolution> {
        let (m, n) = (self.m, self.n());
        let mut is_basic = vec![false; n];
        for &j in &basis {
            is_basic[j] = true;
        }
        let mut inv = self.invert(&basis)?;
        self.basic_values(&inv, &basis, &is_basic, &mut x);
        let scale = self.c.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
        let mut degenerate = 0usize;
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        for pivots in 0..max_pivots {
            if pivots % 64 == 63 {
                inv = self.invert(&basis)?;
                self.basic_values(&inv, &basis, &is_basic, &mut x);
            }
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = basis.iter().enumerate().map(|(k, &j)| self.c[j] * inv[k * m + i]).sum();
            }
            // Dantzig pricing on column-scaled reduced costs; Bland's rule
            // while stuck on a degenerate vertex
            let bland = degenerate > 50;
            let mut enter = None;
            let mut best = 0.0;
            for j in 0..n {
                if is_basic[j] {
                    continue;
                }
                let col = self.col(j);
                let d = self.c[j] - col.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>();
                let norm = 1.0 + col.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                let score = d.abs() / norm;
                let can_up = d > 0.0 && x[j] < self.upper[j];
                let can_down = d < 0.0 && x[j] > self.lower[j];
                if score > 1e-12 * scale && (can_up || can_down) {
                    if bland {
                        enter = Some((j, d.signum()));
                        break;
                    }
                    if score > best {
                        best = score;
                        enter = Some((j, d.signum()));
                    }
                }
            }
            let Some((q, dir)) = enter else {
                return Ok(LpSolution { x, y, pivots });
            };
            let col = self.col(q);
            for (k, a) in alpha.iter_mut().enumerate() {
                *a = (0..m).map(|i| inv[k * m + i] * col[i]).sum();
            }
            // x_B moves by -theta * dir * alpha
            let mut theta = self.upper[q] - self.lower[q];
            let mut leave: Option<usize> = None;
            for k in 0..m {
                let rate = dir * alpha[k];
                if rate.abs() < 1e-11 {
                    continue;
                }
                let j = basis[k];
                let room = if rate > 0.0 {
                    x[j] - self.lower[j]
                } else {
                    self.upper[j] - x[j]
                };
                let t = (room.max(0.0)) / rate.abs();
                let better = match leave {
                    None => t < theta,
                    Some(l) => t < theta || (t == theta && basis[k] < basis[l]),
                };
                if better {
                    theta = t;
                    leave = Some(k);
                }
            }
            if !theta.is_finite() {
                return Err(Error::Numeric("unbounded linear program".into()));
            }
            degenerate = if theta <= 1e-15 { degenerate + 1 } else { 0 };
            x[q] += dir * theta;
            for k in 0..m {
                x[basis[k]] -= dir * theta * alpha[k];
            }
            match leave {
                None => {
                    // bound flip
                    x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some(r) => {
                    let out = basis[r];
                    x[out] = if dir * alpha[r] > 0.0 {
                        self.lower[out]
                    } else {
                        self.upper[out]
                    };
                    is_basic[out] = false;
                    is_basic[q] = true;
                    basis[r] = q;
                    let p = alpha[r];
                    for i in 0..m {
                        inv[r * m + i] /= p;
                    }
                    for k in 0..m {
                        if k != r && alpha[k] != 0.0 {
                            let f = alpha[k];
                            for i in 0..m {
                                inv[k * m + i] -= f * inv[r * m + i];
                            }
                        }
                    }
                }
            }
        }
        Err(Error::Numeric(format!("simplex did not finish in {max_pivots} pivots")))
    }
}
