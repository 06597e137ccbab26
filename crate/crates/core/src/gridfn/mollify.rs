use rayon::prelude::*;

use super::extend::mirror;
use super::GridFunction;
use crate::error::{Error, Result};

/// Standard bump `exp(1 / (|z|^2 - 1))` on the open unit ball.
#[inline]
fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (1.0 / (r2 - 1.0)).exp()
    } else {
        0.0
    }
}

/// Discrete stencil of `rho_n`: cell offsets and weights summing to one.
#[derive(Debug, Clone)]
pub struct MollifierStencil {
    pub offsets: Vec<Vec<isize>>,
    pub weights: Vec<f64>,
    pub radius_cells: Vec<usize>,
}

impl MollifierStencil {
    pub fn new(h: &[f64], level: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("mollifier level must be positive".into()));
        }
        let radius = 1.0 / level as f64;
        if let Some(j) = h.iter().position(|&hj| radius <= hj) {
            return Err(Error::GridTooSmall(format!(
                "mollifier radius 1/{level} is not wider than one cell on axis {j}; refine the grid"
            )));
        }
        let radius_cells: Vec<usize> = h.iter().map(|hj| (radius / hj).ceil() as usize).collect();
        let d = h.len();
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let extent: Vec<usize> = radius_cells.iter().map(|r| 2 * r + 1).collect();
        let total: usize = extent.iter().product();
        for flat in 0..total {
            let mut rest = flat;
            let mut k = vec![0isize; d];
            for j in (0..d).rev() {
                k[j] = (rest % extent[j]) as isize - radius_cells[j] as isize;
                rest /= extent[j];
            }
            let r2: f64 = (0..d)
                .map(|j| {
                    let z = level as f64 * k[j] as f64 * h[j];
                    z * z
                })
                .sum();
            let w = bump(r2);
            if w > 0.0 {
                offsets.push(k);
                weights.push(w);
            }
        }
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        Ok(MollifierStencil {
            offsets,
            weights,
            radius_cells,
        })
    }

    /// `sum_k w_k |k h|_1`, the mean l^1 displacement of the stencil.
    pub fn first_moment_l1(&self, h: &[f64]) -> f64 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| w * k.iter().zip(h).map(|(a, b)| (*a as f64 * b).abs()).sum::<f64>())
            .sum()
    }
}

impl GridFunction {
    /// Discrete convolution with `rho_n`, evaluated on the same grid. Points
    /// of the stencil outside the box read the even reflection of `u`,
    /// which is the same as mollifying `extend_reflect(u)` and restricting.
    pub fn mollify(&self, level: usize) -> Result<GridFunction> {
        let h = self.spacings();
        let stencil = MollifierStencil::new(&h, level)?;
        if let Some(j) = (0..self.d()).find(|&j| stencil.radius_cells[j] > self.grid.cells()[j]) {
            return Err(Error::GridTooSmall(format!(
                "mollifier support exceeds the box on axis {j}"
            )));
        }
        let k = self.space.dim();
        let d = self.d();
        let n = self.grid.cells().to_vec();
        let mut out = vec![0.0; self.node_count() * k];
        out.par_chunks_mut(k).enumerate().for_each(|(node, acc)| {
            let base = self.multi_index(node);
            let mut idx = vec![0usize; d];
            for (off, w) in stencil.offsets.iter().zip(&stencil.weights) {
                for j in 0..d {
                    idx[j] = mirror(base[j] as isize + off[j], n[j]);
                }
                let v = self.value(self.node_of(&idx));
                for s in 0..k {
                    acc[s] += w * v[s];
                }
            }
        });
        self.with_values(self.space.clone(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::SpaceDescriptor;
    use crate::gridfn::{BoxDomain, GridSpec};

    #[test]
    fn weights_sum_to_one_and_are_symmetric() {
        let s = MollifierStencil::new(&[1.0 / 64.0, 1.0 / 32.0], 8).unwrap();
        let sum: f64 = s.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        for (k, w) in s.offsets.iter().zip(&s.weights) {
            let neg: Vec<isize> = k.iter().map(|v| -v).collect();
            let j = s.offsets.iter().position(|o| *o == neg).unwrap();
            assert_eq!(*w, s.weights[j]);
        }
    }

    #[test]
    fn radius_below_cell_rejected() {
        assert!(matches!(MollifierStencil::new(&[0.25], 4), Err(Error::GridTooSmall(_))));
        assert!(MollifierStencil::new(&[0.2], 4).is_ok());
    }

    #[test]
    fn constants_preserved() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 32).unwrap(), sp, |_| {
            vec![0.7, -1.3]
        })
        .unwrap();
        let m = u.mollify(8).unwrap();
        for i in 0..m.node_count() {
            assert!((m.value(i)[0] - 0.7).abs() <= 4.0 * f64::EPSILON);
            assert!((m.value(i)[1] + 1.3).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn affine_unchanged_away_from_boundary() {
        let n = 64;
        let sp = SpaceDescriptor::finite_lr(2, 1.0).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n).unwrap(), sp, |x| {
            vec![x[0], -3.0 * x[0]]
        })
        .unwrap();
        let level = 8;
        let m = u.mollify(level).unwrap();
        let r = (n as f64 / level as f64).ceil() as usize;
        for i in r..n - r {
            assert!((m.value(i)[0] - u.value(i)[0]).abs() < 1e-12);
            assert!((m.value(i)[1] - u.value(i)[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn never_raises_pointwise_norm_max() {
        let sp = SpaceDescriptor::sampled_sup(3).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, 80).unwrap(), sp, |x| {
            vec![
                (9.0 * x[0]).sin(),
                (x[0] - 0.3).abs(),
                if x[0] < 0.5 { 1.0 } else { -1.0 },
            ]
        })
        .unwrap();
        let before = u.bochner_norm(crate::banach::Exponent::Infinity);
        let after = u.mollify(10).unwrap().bochner_norm(crate::banach::Exponent::Infinity);
        assert!(after <= before * (1.0 + 1e-12));
    }
}
