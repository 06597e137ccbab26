use serde::{Deserialize, Serialize};

use super::{lp_of_norms, GridFunction};
use crate::banach::Exponent;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Central,
    Forward,
    Backward,
}

/// Per-direction discrete derivatives `D_1 u, ..., D_d u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeField {
    components: Vec<GridFunction>,
    scheme: Scheme,
    h: Vec<f64>,
}

impl DerivativeField {
    pub fn new(components: Vec<GridFunction>, scheme: Scheme, h: Vec<f64>) -> Self {
        DerivativeField { components, scheme, h }
    }

    pub fn components(&self) -> &[GridFunction] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &GridFunction {
        &self.components[j]
    }

    pub fn into_components(self) -> Vec<GridFunction> {
        self.components
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn spacings(&self) -> &[f64] {
        &self.h
    }

    /// True where the stencil along axis `j` had to fall back to a one-sided difference.
    pub fn is_one_sided(&self, j: usize, node: usize) -> bool {
        let g = &self.components[j];
        let i = g.multi_index(node)[j];
        let n = g.grid().cells()[j];
        match self.scheme {
            Scheme::Central => i == 0 || i + 1 == n,
            Scheme::Forward => i + 1 == n,
            Scheme::Backward => i == 0,
        }
    }

    /// Nodes whose axis-`j` stencil used the nominal scheme.
    pub fn interior_mask(&self, j: usize) -> Vec<bool> {
        (0..self.components[j].node_count())
            .map(|i| !self.is_one_sided(j, i))
            .collect()
    }
}

impl GridFunction {
    /// Finite differences along every axis. Central differences need at
    /// least three cells per axis; the outer layer always uses a one-sided
    /// stencil and is flagged by [`DerivativeField::is_one_sided`].
    pub fn finite_difference(&self, scheme: Scheme) -> Result<DerivativeField> {
        let need = if scheme == Scheme::Central { 3 } else { 2 };
        if let Some(j) = self.grid.cells().iter().position(|&n| n < need) {
            return Err(Error::GridTooSmall(format!(
                "{scheme:?} differences need {need} cells on axis {j}"
            )));
        }
        let strides = self.grid.strides();
        let k = self.space.dim();
        let count = self.node_count();
        let mut comps = Vec::with_capacity(self.d());
        for j in 0..self.d() {
            let n = self.grid.cells()[j];
            let h = self.spacing(j);
            let st = strides[j];
            let mut out = vec![0.0; count * k];
            for node in 0..count {
                let i = (node / st) % n;
                let (a, b, den) = match scheme {
                    Scheme::Central if i == 0 => (node + st, node, h),
                    Scheme::Central if i + 1 == n => (node, node - st, h),
                    Scheme::Central => (node + st, node - st, 2.0 * h),
                    Scheme::Forward if i + 1 == n => (node, node - st, h),
                    Scheme::Forward => (node + st, node, h),
                    Scheme::Backward if i == 0 => (node + st, node, h),
                    Scheme::Backward => (node, node - st, h),
                };
                let (va, vb) = (self.value(a), self.value(b));
                for s in 0..k {
                    out[node * k + s] = (va[s] - vb[s]) / den;
                }
            }
            comps.push(self.with_values(self.space.clone(), out)?);
        }
        Ok(DerivativeField::new(comps, scheme, self.spacings()))
    }

    /// `|u(. + steps h_j e_j) - u|_{L^p(omega, X)}` over the nodes whose shift stays on the grid.
    pub fn shift_difference_norm(&self, j: usize, steps: usize, p: Exponent) -> Result<f64> {
        if j >= self.d() {
            return Err(Error::InvalidArgument(format!("axis {j} out of range")));
        }
        let n = self.grid.cells()[j];
        if steps == 0 || steps >= n {
            return Err(Error::InvalidArgument(format!(
                "shift of {steps} cells must lie in [1, {n})"
            )));
        }
        let st = self.grid.strides()[j];
        let k = self.space.dim();
        let mut diff = vec![0.0; k];
        let mut norms = Vec::with_capacity(self.node_count());
        for node in 0..self.node_count() {
            let i = (node / st) % n;
            if i + steps >= n {
                continue;
            }
            let (a, b) = (self.value(node + steps * st), self.value(node));
            for s in 0..k {
                diff[s] = a[s] - b[s];
            }
            norms.push(self.space.norm_unchecked(&diff));
        }
        Ok(lp_of_norms(norms, self.cell_volume(), p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::SpaceDescriptor;
    use crate::gridfn::{BoxDomain, GridSpec};

    fn affine(n: usize, d: usize) -> GridFunction {
        let sp = SpaceDescriptor::finite_lr(2, 1.0).unwrap();
        GridFunction::sample(BoxDomain::unit(d), GridSpec::uniform(d, n).unwrap(), sp, |xi| {
            vec![xi[0] * 2.0, -xi[0]]
        })
        .unwrap()
    }

    #[test]
    fn constant_has_zero_derivative() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 5).unwrap(), sp, |_| {
            vec![1.5, -0.5]
        })
        .unwrap();
        for scheme in [Scheme::Central, Scheme::Forward, Scheme::Backward] {
            let f = u.finite_difference(scheme).unwrap();
            assert!(f.components().iter().all(|g| g.values().iter().all(|v| *v == 0.0)));
        }
    }

    #[test]
    fn affine_data_differentiated_exactly() {
        let u = affine(16, 2);
        let f = u.finite_difference(Scheme::Central).unwrap();
        for i in 0..u.node_count() {
            let d1 = f.component(0).value(i);
            assert!((d1[0] - 2.0).abs() < 1e-12 && (d1[1] + 1.0).abs() < 1e-12);
            assert!(f.component(1).value(i).iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn central_difference_is_second_order() {
        // max interior error of D sin(pi x) at n = 64 vs 128: ratio ~ 4
        let err = |n: usize| {
            let sp = SpaceDescriptor::hilbert(1).unwrap();
            let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n).unwrap(), sp, |x| {
                vec![(std::f64::consts::PI * x[0]).sin()]
            })
            .unwrap();
            let f = u.finite_difference(Scheme::Central).unwrap();
            (0..n)
                .filter(|&i| !f.is_one_sided(0, i))
                .map(|i| {
                    let x = u.center(i)[0];
                    (f.component(0).value(i)[0] - std::f64::consts::PI * (std::f64::consts::PI * x).cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn central_needs_three_cells() {
        let u = affine(2, 1);
        assert!(matches!(
            u.finite_difference(Scheme::Central),
            Err(Error::GridTooSmall(_))
        ));
        assert!(u.finite_difference(Scheme::Forward).is_ok());
    }

    #[test]
    fn one_sided_flags() {
        let u = affine(5, 1);
        let c = u.finite_difference(Scheme::Central).unwrap();
        assert_eq!(c.interior_mask(0), vec![false, true, true, true, false]);
        let f = u.finite_difference(Scheme::Forward).unwrap();
        assert_eq!(f.interior_mask(0), vec![true, true, true, true, false]);
        let b = u.finite_difference(Scheme::Backward).unwrap();
        assert_eq!(b.interior_mask(0), vec![false, true, true, true, true]);
    }

    #[test]
    fn shift_difference_examples() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let c = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, 10).unwrap(), sp, |_| {
            vec![1.0, 1.0]
        })
        .unwrap();
        assert_eq!(c.shift_difference_norm(0, 3, Exponent::Finite(2.0)).unwrap(), 0.0);

        // affine: each shifted difference is h |x0|; omega has (n - 1) cells
        let n = 20;
        let u = affine(n, 2);
        let h = 1.0 / n as f64;
        for p in [1.0, 2.0, 3.0] {
            let got = u.shift_difference_norm(0, 1, Exponent::Finite(p)).unwrap();
            let omega = (n - 1) as f64 * h;
            let want = h * 3.0 * omega.powf(1.0 / p);
            assert!((got - want).abs() < 1e-12, "p={p}: {got} vs {want}");
        }
        assert!(u.shift_difference_norm(0, 0, Exponent::Finite(1.0)).is_err());
        assert!(u.shift_difference_norm(0, n, Exponent::Finite(1.0)).is_err());
        assert!(u.shift_difference_norm(2, 1, Exponent::Finite(1.0)).is_err());
    }

    #[test]
    fn indicator_path_shift_is_half_power() {
        let m = 128;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, m).unwrap(), sp, |t| {
            (0..m)
                .map(|s| if (s as f64 + 0.5) / m as f64 <= t[0] { 1.0 } else { 0.0 })
                .collect()
        })
        .unwrap();
        let h = 1.0 / m as f64;
        for steps in [1usize, 2, 4, 8] {
            let got = u.shift_difference_norm(0, steps, Exponent::Finite(2.0)).unwrap();
            // |1_(t, t+sh)|_{L^2} = (s h)^(1/2) at every t in omega
            let want = (steps as f64 * h).sqrt() * (1.0 - steps as f64 * h).sqrt();
            assert!((got - want).abs() < 1e-12);
        }
    }
}
