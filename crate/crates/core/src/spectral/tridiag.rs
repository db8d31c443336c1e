//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use crate::{Error, Result};

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::param("diag", "matrix must have at least one row"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch {
                expected: diag.len() - 1,
                actual: off.len(),
            });
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::param("matrix", "entries must be finite"));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// `self + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d + c).collect(),
            off: self.off.clone(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let radius = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let max_off = self.off.iter().fold(1.0f64, |m, e| m.max(e * e));
        let pivmin = f64::MIN_POSITIVE * max_off;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Exact count of negative eigenvalues.
    pub fn negative_count(&self) -> usize {
        self.count_below(0.0)
    }

    /// The `index`-th smallest eigenvalue (0-based), bracketed to `tolerance`.
    pub fn eigenvalue(&self, index: usize, tolerance: f64) -> Result<f64> {
        if index >= self.len() {
            return Err(Error::param("index", "exceeds the matrix size"));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        lo -= pad;
        hi += pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tolerance || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// The `q` smallest eigenvalues in ascending order (fewer when the
    /// matrix is smaller).
    pub fn lowest_eigenvalues(&self, q: usize, tolerance: f64) -> Result<Vec<f64>> {
        if q == 0 {
            return Err(Error::param("q", "must be ≥ 1"));
        }
        if !(tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        (0..q.min(self.len()))
            .map(|i| self.eigenvalue(i, tolerance))
            .collect()
    }

    /// Unit eigenvector for an eigenvalue estimate, from a twisted
    /// factorization of `T - λI`: a top-down and a bottom-up `LDLᵀ` sweep meet
    /// at the row where the twist is smallest, and each side is filled in by
    /// a two-term recurrence. The twisted solve leaves a residual only in the
    /// twist row; it is driven down by Rayleigh corrections of the estimate,
    /// which matter because Sturm counts resolve `λ` only to `ε·‖T‖`.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        let mut lambda = eigenvalue;
        let mut x = self.twisted_solve(lambda).0;
        for _ in 0..3 {
            let (candidate, twist) = self.twisted_solve(lambda);
            let norm2: f64 = candidate.iter().map(|v| v * v).sum();
            let correction = twist / norm2;
            x = candidate;
            if correction.abs() > 1e-6 * lambda.abs().max(1.0)
                || correction.abs() <= 4.0 * f64::EPSILON * lambda.abs()
            {
                break;
            }
            lambda += correction;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        x
    }

    /// Solution of `(T - λI)x = γ e_k` with `x_k = 1`, and `γ`.
    fn twisted_solve(&self, lambda: f64) -> (Vec<f64>, f64) {
        let n = self.len();
        let tiny = f64::EPSILON * lambda.abs().max(f64::MIN_POSITIVE.sqrt());
        let guard = |v: f64| if v.abs() < tiny { tiny.copysign(v) } else { v };
        let shifted: Vec<f64> = self.diag.iter().map(|d| d - lambda).collect();
        let e = &self.off;

        let mut top = vec![0.0; n];
        top[0] = guard(shifted[0]);
        for i in 1..n {
            top[i] = guard(shifted[i] - e[i - 1] * e[i - 1] / top[i - 1]);
        }
        let mut bottom = vec![0.0; n];
        bottom[n - 1] = guard(shifted[n - 1]);
        for i in (0..n - 1).rev() {
            bottom[i] = guard(shifted[i] - e[i] * e[i] / bottom[i + 1]);
        }
        let gamma = |i: usize| top[i] + bottom[i] - shifted[i];
        let twist = (0..n)
            .min_by(|&i, &j| gamma(i).abs().total_cmp(&gamma(j).abs()))
            .unwrap_or(0);

        let mut x = vec![0.0; n];
        x[twist] = 1.0;
        for i in (0..twist).rev() {
            x[i] = -e[i] / top[i] * x[i + 1];
        }
        for i in twist + 1..n {
            x[i] = -e[i - 1] / bottom[i] * x[i - 1];
        }
        (x, gamma(twist))
    }
}
