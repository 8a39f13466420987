//! Eigendecomposition of real symmetric arrowhead matrices
//!
//! ```text
//! A = [ α   zᵀ ]
//!     [ z   D  ]     D = diag(d_0 < d_1 < … < d_{m−1}),  z_k ≠ 0
//! ```
//!
//! The `m + 1` eigenvalues strictly interlace the poles `d_k` and are the
//! roots of the secular function `f(λ) = λ − α − Σ_k z_k² / (λ − d_k)`.
//! Each root is stored as an offset from its nearest pole so that the
//! differences `λ_j − d_k` entering the eigenvectors keep full relative
//! precision. The couplings are then recomputed from the computed spectrum
//! (Löwner's formula) before forming eigenvectors, which keeps them
//! numerically orthogonal.

use crate::error::{Error, Result};
use crate::weak::C64;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone)]
pub struct Arrowhead {
    pub tip: f64,
    pub poles: Vec<f64>,
    pub couplings: Vec<f64>,
}

/// Root `λ = poles[origin] + offset`.
#[derive(Debug, Clone, Copy)]
struct Root {
    origin: usize,
    offset: f64,
}

#[derive(Debug, Clone)]
pub struct ArrowheadEigen {
    poles: Vec<f64>,
    roots: Vec<Root>,
    /// Couplings recovered from the computed spectrum.
    z: Vec<f64>,
    /// First eigenvector component per root (the normalization factor).
    head: Vec<f64>,
    /// `poles[origin]` and `offset` per root, unpacked for the summation loops.
    root_base: Vec<f64>,
    root_offset: Vec<f64>,
}

impl Arrowhead {
    pub fn dim(&self) -> usize {
        self.poles.len() + 1
    }

    fn validate(&self) -> Result<()> {
        let m = self.poles.len();
        if m == 0 || self.couplings.len() != m {
            return Err(Error::EigenFailure(format!(
                "arrowhead needs matching nonempty poles and couplings ({} vs {})",
                m,
                self.couplings.len()
            )));
        }
        if !self.tip.is_finite()
            || self
                .poles
                .iter()
                .chain(&self.couplings)
                .any(|x| !x.is_finite())
        {
            return Err(Error::EigenFailure("non-finite arrowhead entry".into()));
        }
        if self.poles.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::EigenFailure(
                "poles must be strictly increasing".into(),
            ));
        }
        if self.couplings.contains(&0.0) {
            return Err(Error::EigenFailure(
                "zero coupling needs deflation, unsupported".into(),
            ));
        }
        Ok(())
    }

    /// `f(d_origin + μ)` and its derivative.
    fn secular(&self, origin: usize, mu: f64) -> (f64, f64) {
        let base = self.poles[origin];
        let mut value = base + mu - self.tip;
        let mut slope = 1.0;
        for (&d, &z) in self.poles.iter().zip(&self.couplings) {
            let gap = (base - d) + mu;
            let q = z * z / gap;
            value -= q;
            slope += q / gap;
        }
        (value, slope)
    }

    pub fn solve(&self) -> Result<ArrowheadEigen> {
        self.validate()?;
        let m = self.poles.len();
        let z_norm = self.couplings.iter().map(|z| z * z).sum::<f64>().sqrt();
        let mut roots = Vec::with_capacity(m + 1);
        for j in 0..=m {
            roots.push(self.root(j, z_norm)?);
        }
        let mut eig = ArrowheadEigen {
            poles: self.poles.clone(),
            root_base: roots.iter().map(|r| self.poles[r.origin]).collect(),
            root_offset: roots.iter().map(|r| r.offset).collect(),
            roots,
            z: Vec::new(),
            head: Vec::new(),
        };
        eig.z = eig.lowner_couplings(&self.couplings)?;
        eig.head = (0..=m).map(|j| eig.normalization(j)).collect();
        Ok(eig)
    }

    /// Root `j` lies in `(d_{j−1}, d_j)` with `d_{−1} = −∞`, `d_m = +∞`.
    fn root(&self, j: usize, z_norm: f64) -> Result<Root> {
        let m = self.poles.len();
        let (origin, mut lo, mut hi) = if j == 0 {
            let lo = (self.tip.min(self.poles[0]) - self.poles[0]) - z_norm - 1.0;
            (0, lo, 0.0)
        } else if j == m {
            let hi = (self.tip.max(self.poles[m - 1]) - self.poles[m - 1]) + z_norm + 1.0;
            (m - 1, 0.0, hi)
        } else {
            let width = self.poles[j] - self.poles[j - 1];
            let (f_mid, _) = self.secular(j - 1, width / 2.0);
            if f_mid == 0.0 {
                return Ok(Root {
                    origin: j - 1,
                    offset: width / 2.0,
                });
            }
            if f_mid > 0.0 {
                (j - 1, 0.0, width / 2.0)
            } else {
                (j, -width / 2.0, 0.0)
            }
        };

        // Open ends at a pole are never evaluated; the outer ends are checked.
        if j == 0 && self.secular(origin, lo).0 >= 0.0 {
            return Err(Error::EigenFailure(
                "lower bracket does not enclose the smallest root".into(),
            ));
        }
        if j == m && self.secular(origin, hi).0 <= 0.0 {
            return Err(Error::EigenFailure(
                "upper bracket does not enclose the largest root".into(),
            ));
        }

        let mut mu = 0.5 * (lo + hi);
        for _ in 0..MAX_ITER {
            let (f, df) = self.secular(origin, mu);
            if f == 0.0 {
                return Ok(Root { origin, offset: mu });
            }
            if f < 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            // Fit f ≈ a − b/μ through the current value and slope; exact
            // when the origin pole dominates.
            let b = df * mu * mu;
            let a = f + b / mu;
            let mut next = if a != 0.0 { b / a } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = mu - f / df;
            }
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - mu).abs();
            mu = next;
            let tol = 4.0 * f64::EPSILON * mu.abs().max(f64::MIN_POSITIVE);
            if step <= tol || hi - lo <= tol {
                return Ok(Root { origin, offset: mu });
            }
        }
        Err(Error::EigenFailure(format!(
            "secular root {j} did not converge"
        )))
    }
}

impl ArrowheadEigen {
    pub fn dim(&self) -> usize {
        self.roots.len()
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        let r = self.roots[j];
        self.poles[r.origin] + r.offset
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.eigenvalue(j)).collect()
    }

    /// `λ_j − d_k` without cancellation.
    #[inline]
    pub fn gap(&self, j: usize, k: usize) -> f64 {
        let r = self.roots[j];
        (self.poles[r.origin] - self.poles[k]) + r.offset
    }

    /// Component of eigenvector `j` on the tip (row 0).
    #[inline]
    pub fn head(&self, j: usize) -> f64 {
        self.head[j]
    }

    /// Component of eigenvector `j` on pole `k` (row `k + 1`).
    #[inline]
    pub fn pole_component(&self, k: usize, j: usize) -> f64 {
        self.head[j] * self.z[k] / self.gap(j, k)
    }

    /// Component on matrix row `row` (0 = tip).
    pub fn component(&self, row: usize, j: usize) -> f64 {
        if row == 0 {
            self.head(j)
        } else {
            self.pole_component(row - 1, j)
        }
    }

    /// Recovered coupling `z_k`.
    pub fn coupling(&self, k: usize) -> f64 {
        self.z[k]
    }

    /// `Σ_j c_j / (λ_j − d_k)` over all roots, for pole `k`.
    pub fn sum_over_roots(&self, k: usize, c: &[C64]) -> C64 {
        let d = self.poles[k];
        let (mut re, mut im) = (0.0, 0.0);
        for ((&base, &off), c) in self.root_base.iter().zip(&self.root_offset).zip(c) {
            let inv = 1.0 / ((base - d) + off);
            re += c.re * inv;
            im += c.im * inv;
        }
        C64::new(re, im)
    }

    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        (0..self.dim()).map(|row| self.component(row, j)).collect()
    }

    fn normalization(&self, j: usize) -> f64 {
        let tail: f64 = self
            .z
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let v = z / self.gap(j, k);
                v * v
            })
            .sum();
        1.0 / (1.0 + tail).sqrt()
    }

    /// `z̃_i² = −∏_j (d_i − λ_j) / ∏_{k≠i} (d_i − d_k)`, evaluated as a
    /// product of interlaced ratios close to one.
    fn lowner_couplings(&self, original: &[f64]) -> Result<Vec<f64>> {
        let m = self.poles.len();
        (0..m)
            .map(|i| {
                let d_i = self.poles[i];
                let mut prod = -(-self.gap(i, i)) * (-self.gap(i + 1, i));
                for k in 0..i {
                    prod *= -self.gap(k, i) / (d_i - self.poles[k]);
                }
                for k in i + 1..m {
                    prod *= -self.gap(k + 1, i) / (d_i - self.poles[k]);
                }
                if !(prod > 0.0) || !prod.is_finite() {
                    return Err(Error::EigenFailure(format!(
                        "recovered coupling {i} is not positive ({prod:e})"
                    )));
                }
                Ok(prod.sqrt().copysign(original[i]))
            })
            .collect()
    }
}
