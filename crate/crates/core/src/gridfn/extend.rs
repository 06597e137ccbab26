use serde::{Deserialize, Serialize};

use super::{BoxDomain, GridFunction, GridSpec};
use crate::banach::Exponent;
use crate::error::{Error, Result};

/// Index of the even reflection of `i` into `0..n`; valid for `-n <= i < 2n`.
#[inline]
pub(crate) fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = if i < 0 {
        -1 - i
    } else if i >= n {
        2 * n - 1 - i
    } else {
        i
    };
    debug_assert!((0..n).contains(&m));
    m as usize
}

/// Operator-norm bookkeeping for the reflection extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub pad: usize,
    pub sobolev_norm: f64,
    pub extended_sobolev_norm: f64,
    pub ratio: f64,
    /// Crude bound `3^d` on the discrete extension operator.
    pub bound: f64,
    pub pass: bool,
}

impl GridFunction {
    /// Even reflection across every face, `pad` ghost cells per side.
    pub fn extend_reflect(&self, pad: usize) -> Result<GridFunction> {
        if pad == 0 {
            return Err(Error::InvalidArgument("reflection pad must be at least 1".into()));
        }
        if let Some(j) = self.grid.cells().iter().position(|&n| pad > n) {
            return Err(Error::InvalidArgument(format!(
                "pad {pad} exceeds the {} cells of axis {j}",
                self.grid.cells()[j]
            )));
        }
        let d = self.d();
        let h = self.spacings();
        let lo = (0..d).map(|j| self.domain.lo()[j] - pad as f64 * h[j]).collect();
        let hi = (0..d).map(|j| self.domain.hi()[j] + pad as f64 * h[j]).collect();
        let big_n: Vec<usize> = self.grid.cells().iter().map(|n| n + 2 * pad).collect();
        let domain = BoxDomain::new(lo, hi)?;
        let grid = GridSpec::new(big_n.clone())?;
        let k = self.space.dim();
        let count: usize = big_n.iter().product();
        let mut values = Vec::with_capacity(count * k);
        let mut idx = vec![0usize; d];
        for node in 0..count {
            let mut rest = node;
            for j in (0..d).rev() {
                let i = rest % big_n[j];
                rest /= big_n[j];
                idx[j] = mirror(i as isize - pad as isize, self.grid.cells()[j]);
            }
            values.extend_from_slice(self.value(self.node_of(&idx)));
        }
        GridFunction::new(domain, grid, self.space.clone(), values)
    }

    /// Drops `pad` cells from every side; inverse of [`GridFunction::extend_reflect`].
    pub fn restrict(&self, pad: usize) -> Result<GridFunction> {
        if self.grid.cells().iter().any(|&n| n < 2 * pad + 2) {
            return Err(Error::InvalidArgument(format!("cannot strip {pad} cells per side")));
        }
        let d = self.d();
        let h = self.spacings();
        let lo = (0..d).map(|j| self.domain.lo()[j] + pad as f64 * h[j]).collect();
        let hi = (0..d).map(|j| self.domain.hi()[j] - pad as f64 * h[j]).collect();
        let small_n: Vec<usize> = self.grid.cells().iter().map(|n| n - 2 * pad).collect();
        let grid = GridSpec::new(small_n.clone())?;
        let k = self.space.dim();
        let count: usize = small_n.iter().product();
        let mut values = Vec::with_capacity(count * k);
        let mut idx = vec![0usize; d];
        for node in 0..count {
            let mut rest = node;
            for j in (0..d).rev() {
                idx[j] = rest % small_n[j] + pad;
                rest /= small_n[j];
            }
            values.extend_from_slice(self.value(self.node_of(&idx)));
        }
        GridFunction::new(BoxDomain::new(lo, hi)?, grid, self.space.clone(), values)
    }

    pub fn extension_report(&self, pad: usize, p: Exponent) -> Result<ExtensionReport> {
        let ext = self.extend_reflect(pad)?;
        let sobolev_norm = self.sobolev_norm(p)?;
        let extended_sobolev_norm = ext.sobolev_norm(p)?;
        let bound = 3f64.powi(self.d() as i32);
        let ratio = if sobolev_norm > 0.0 {
            extended_sobolev_norm / sobolev_norm
        } else {
            0.0
        };
        Ok(ExtensionReport {
            pad,
            sobolev_norm,
            extended_sobolev_norm,
            ratio,
            bound,
            pass: extended_sobolev_norm <= bound * sobolev_norm * (1.0 + 1e-12),
        })
    }
}
