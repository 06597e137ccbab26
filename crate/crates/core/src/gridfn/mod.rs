//! Functions `u: Omega -> X` sampled at the cell centres of a uniform grid on a box.
//!
//! Values are stored node-major in one flat buffer: node `i` owns
//! `values[i * dim .. (i + 1) * dim]`. Nodes are ordered row-major with the
//! last axis varying fastest.

mod difference;
mod extend;
mod mollify;
mod trace;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::banach::{self, Exponent, SpaceDescriptor};
use crate::error::{Error, Result};

pub use difference::{DerivativeField, Scheme};
pub use extend::ExtensionReport;
pub use mollify::MollifierStencil;
pub use trace::{BoundaryTrace, FaceTrace, Side};

/// The open box `prod (lo_j, hi_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidArgument(
                "box bounds must be non-empty and of equal length".into(),
            ));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidArgument("box requires lo_j < hi_j".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn unit(d: usize) -> Self {
        BoxDomain {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, j: usize) -> f64 {
        self.hi[j] - self.lo[j]
    }

    pub fn measure(&self) -> f64 {
        (0..self.dim()).map(|j| self.width(j)).product()
    }

    /// Total (d-1)-dimensional measure of the boundary; two points count 1 each when d = 1.
    pub fn surface_measure(&self) -> f64 {
        let d = self.dim();
        if d == 1 {
            return 2.0;
        }
        (0..d)
            .map(|j| 2.0 * (0..d).filter(|&k| k != j).map(|k| self.width(k)).product::<f64>())
            .sum()
    }
}

/// Cells per axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n: Vec<usize>,
}

impl GridSpec {
    pub fn new(n: Vec<usize>) -> Result<Self> {
        if n.is_empty() || n.iter().any(|&k| k < 2) {
            return Err(Error::GridTooSmall("every axis needs at least 2 cells".into()));
        }
        Ok(GridSpec { n })
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; d])
    }

    pub fn cells(&self) -> &[usize] {
        &self.n
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn node_count(&self) -> usize {
        self.n.iter().product()
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.n.len()];
        for j in (0..self.n.len().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.n[j + 1];
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridFunction")]
pub struct GridFunction {
    domain: BoxDomain,
    grid: GridSpec,
    space: SpaceDescriptor,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGridFunction {
    domain: BoxDomain,
    grid: GridSpec,
    space: SpaceDescriptor,
    values: Vec<f64>,
}

impl TryFrom<RawGridFunction> for GridFunction {
    type Error = Error;

    fn try_from(r: RawGridFunction) -> Result<Self> {
        let domain = BoxDomain::new(r.domain.lo, r.domain.hi)?;
        let grid = GridSpec::new(r.grid.n)?;
        GridFunction::new(domain, grid, r.space, r.values)
    }
}

/// `sum a_i^p` with exact squaring for `p = 2`.
#[inline]
pub(crate) fn pow_p(a: f64, p: f64) -> f64 {
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

/// Discrete `L^p` norm of nonnegative nodal values with a common cell volume.
pub(crate) fn lp_of_norms<I: IntoIterator<Item = f64>>(norms: I, cell_volume: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => norms.into_iter().fold(0.0_f64, f64::max),
        Exponent::Finite(p) => {
            let acc: f64 = norms.into_iter().map(|a| pow_p(a, p)).sum();
            let total = acc * cell_volume;
            if p == 1.0 {
                total
            } else if p == 2.0 {
                total.sqrt()
            } else {
                total.powf(1.0 / p)
            }
        }
    }
}

impl GridFunction {
    pub fn new(domain: BoxDomain, grid: GridSpec, space: SpaceDescriptor, values: Vec<f64>) -> Result<Self> {
        if domain.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: grid.dim(),
            });
        }
        let expected = grid.node_count() * space.dim();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: k / space.dim() });
        }
        Ok(GridFunction {
            domain,
            grid,
            space,
            values,
        })
    }

    /// Samples `f` at every cell centre.
    pub fn sample<F>(domain: BoxDomain, grid: GridSpec, space: SpaceDescriptor, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        if domain.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: grid.dim(),
            });
        }
        let count = grid.node_count();
        let dim = space.dim();
        let mut values = Vec::with_capacity(count * dim);
        let mut scratch = GridFunction {
            domain,
            grid,
            space,
            values: Vec::new(),
        };
        let mut xi = vec![0.0; scratch.domain.dim()];
        for i in 0..count {
            scratch.center_into(i, &mut xi);
            let v = f(&xi);
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
            values.extend_from_slice(&v);
        }
        scratch.values = values;
        Ok(scratch)
    }

    /// Scalar-valued convenience wrapper around [`GridFunction::sample`].
    pub fn sample_scalar<F>(domain: BoxDomain, grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::sample(domain, grid, SpaceDescriptor::scalar(), |xi| vec![f(xi)])
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn d(&self) -> usize {
        self.grid.dim()
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    #[inline]
    pub fn value(&self, node: usize) -> &[f64] {
        let k = self.space.dim();
        &self.values[node * k..(node + 1) * k]
    }

    pub fn spacing(&self, j: usize) -> f64 {
        self.domain.width(j) / self.grid.n[j] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.d()).map(|j| self.spacing(j)).collect()
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.d()).map(|j| self.spacing(j)).fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.d()).map(|j| self.spacing(j)).product()
    }

    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d()];
        for j in (0..self.d()).rev() {
            idx[j] = node % self.grid.n[j];
            node /= self.grid.n[j];
        }
        idx
    }

    pub fn node_of(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.grid.n.iter()).fold(0, |acc, (i, n)| acc * n + i)
    }

    fn center_into(&self, node: usize, out: &mut [f64]) {
        let mut rest = node;
        for j in (0..self.d()).rev() {
            let n = self.grid.n[j];
            let i = rest % n;
            rest /= n;
            out[j] = self.domain.lo[j] + (i as f64 + 0.5) * self.spacing(j);
        }
    }

    pub fn center(&self, node: usize) -> Vec<f64> {
        let mut xi = vec![0.0; self.d()];
        self.center_into(node, &mut xi);
        xi
    }

    /// True when the node is not in the outermost layer along any axis.
    pub fn is_interior(&self, node: usize) -> bool {
        self.multi_index(node)
            .iter()
            .zip(&self.grid.n)
            .all(|(&i, &n)| i > 0 && i + 1 < n)
    }

    pub fn same_layout(&self, other: &GridFunction) -> Result<()> {
        if self.domain != other.domain || self.grid != other.grid {
            return Err(Error::InvalidArgument("grid functions live on different grids".into()));
        }
        Ok(())
    }

    /// Builds a grid function on the same grid from raw values in another space.
    pub fn with_values(&self, space: SpaceDescriptor, values: Vec<f64>) -> Result<Self> {
        GridFunction::new(self.domain.clone(), self.grid.clone(), space, values)
    }

    /// Applies `f` nodewise, producing values in `target`.
    pub fn map<F>(&self, target: SpaceDescriptor, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(self.node_count() * target.dim());
        for i in 0..self.node_count() {
            let v = f(self.value(i));
            if v.len() != target.dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.dim(),
                    got: v.len(),
                });
            }
            values.extend_from_slice(&v);
        }
        self.with_values(target, values)
    }

    pub fn scale(&self, c: f64) -> Self {
        GridFunction {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_values(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_values(other, |a, b| a - b)
    }

    fn zip_values(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_layout(other)?;
        if self.space != other.space {
            return Err(Error::InvalidArgument(
                "grid functions take values in different spaces".into(),
            ));
        }
        Ok(GridFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
            ..self.clone()
        })
    }

    /// Multiplies by a scalar grid function: `(psi u)(xi) = psi(xi) u(xi)`.
    pub fn multiply_scalar(&self, psi: &GridFunction) -> Result<Self> {
        self.same_layout(psi)?;
        if !psi.space.is_scalar() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: psi.space.dim(),
            });
        }
        let k = self.space.dim();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(q, v)| psi.values[q / k] * v)
            .collect();
        Ok(GridFunction { values, ..self.clone() })
    }

    pub fn pointwise_norm_values(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| self.space.norm_unchecked(self.value(i)))
            .collect()
    }

    /// The scalar function `xi -> |u(xi)|_X`.
    pub fn pointwise_norms(&self) -> Self {
        GridFunction {
            domain: self.domain.clone(),
            grid: self.grid.clone(),
            space: SpaceDescriptor::scalar(),
            values: self.pointwise_norm_values(),
        }
    }

    /// Bochner norm `(sum_i |u_i|_X^p prod h_j)^(1/p)`, or the nodal max for `p = inf`.
    pub fn bochner_norm(&self, p: Exponent) -> f64 {
        lp_of_norms(self.pointwise_norm_values(), self.cell_volume(), p)
    }

    /// Bochner norm restricted to the nodes where `mask` is true.
    pub fn bochner_norm_masked(&self, p: Exponent, mask: &[bool]) -> f64 {
        let norms = (0..self.node_count())
            .filter(|&i| mask[i])
            .map(|i| self.space.norm_unchecked(self.value(i)));
        lp_of_norms(norms, self.cell_volume(), p)
    }

    /// Discrete `W^{1,p}` norm using central differences for `D_j u`.
    pub fn sobolev_norm(&self, p: Exponent) -> Result<f64> {
        let field = self.finite_difference(Scheme::Central)?;
        let parts = std::iter::once(self.bochner_norm(p)).chain(field.components().iter().map(|g| g.bochner_norm(p)));
        Ok(match p {
            Exponent::Infinity => parts.fold(0.0, f64::max),
            Exponent::Finite(q) => parts.map(|a| pow_p(a, q)).sum::<f64>().powf(1.0 / q),
        })
    }

    /// Pointwise pairing `<u(xi), x'>` as a scalar grid function.
    pub fn apply_functional(&self, functional: &[f64]) -> Result<Self> {
        self.space.check(functional)?;
        let values = (0..self.node_count())
            .map(|i| banach::pairing_unchecked(&self.space, self.value(i), functional))
            .collect();
        self.with_values(SpaceDescriptor::scalar(), values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One CSV row per node: centre coordinates, then value coordinates.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = (0..self.d())
            .map(|j| format!("x{j}"))
            .chain((0..self.space.dim()).map(|s| format!("v{s}")))
            .collect();
        w.write_record(&header)?;
        for i in 0..self.node_count() {
            let row: Vec<String> = self
                .center(i)
                .iter()
                .chain(self.value(i))
                .map(|v| format!("{v:e}"))
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_line(n: usize) -> (BoxDomain, GridSpec) {
        (BoxDomain::unit(1), GridSpec::uniform(1, n).unwrap())
    }

    #[test]
    fn sample_constant_and_centres() {
        let x0 = vec![1.0, -2.0];
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 4).unwrap(), sp.clone(), |_| {
            x0.clone()
        })
        .unwrap();
        assert!((0..u.node_count()).all(|i| u.value(i) == x0.as_slice()));

        let v = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 4).unwrap(), sp, |xi| {
            vec![xi[0] * 1.0, xi[0] * -2.0]
        })
        .unwrap();
        let mut firsts: Vec<f64> = (0..v.node_count()).map(|i| v.value(i)[0]).collect();
        firsts.dedup();
        firsts.sort_by(f64::total_cmp);
        firsts.dedup();
        assert_eq!(firsts, vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn sample_indicator_path() {
        // u(t) = 1_{(0,t)} in L^2(0,1) sampled at 8 points, t on an 8-cell grid
        let m = 8;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let (dom, grid) = unit_line(8);
        let u = GridFunction::sample(dom, grid, sp, |t| {
            (0..m)
                .map(|s| if (s as f64 + 0.5) / m as f64 <= t[0] { 1.0 } else { 0.0 })
                .collect()
        })
        .unwrap();
        for i in 0..8 {
            let expect: Vec<f64> = (0..m).map(|s| if s <= i { 1.0 } else { 0.0 }).collect();
            assert_eq!(u.value(i), expect.as_slice());
        }
    }

    #[test]
    fn sample_rejects_non_finite() {
        let (dom, grid) = unit_line(4);
        let err = GridFunction::sample_scalar(dom, grid, |x| if x[0] > 0.5 { f64::NAN } else { 0.0 });
        assert_eq!(err.unwrap_err(), Error::NonFinite { index: 2 });
    }

    #[test]
    fn bochner_norm_examples() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 8).unwrap(), sp.clone(), |_| {
            vec![3.0, 4.0]
        })
        .unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((u.bochner_norm(Exponent::Finite(p)) - 5.0).abs() < 1e-12);
        }
        assert_eq!(u.scale(0.0).bochner_norm(Exponent::Finite(2.0)), 0.0);

        // int_0^1 t^2 dt = 1/3 under the midpoint rule
        let (dom, grid) = unit_line(256);
        let v = GridFunction::sample(dom, grid, sp, |t| vec![3.0 * t[0], 4.0 * t[0]]).unwrap();
        assert!((v.bochner_norm(Exponent::Finite(2.0)) - 5.0 / 3f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn bochner_norm_equals_scalar_norm_of_pointwise_norms() {
        let sp = SpaceDescriptor::grid_lr(5, 3.0).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::new(vec![7, 9]).unwrap(), sp, |xi| {
            (0..5).map(|s| (xi[0] * (s as f64 + 1.0)).sin() - xi[1]).collect()
        })
        .unwrap();
        for p in [
            Exponent::Finite(1.0),
            Exponent::Finite(2.0),
            Exponent::Finite(2.7),
            Exponent::Infinity,
        ] {
            assert_eq!(
                u.bochner_norm(p).to_bits(),
                u.pointwise_norms().bochner_norm(p).to_bits()
            );
        }
    }

    #[test]
    fn apply_functional_examples() {
        let sp = SpaceDescriptor::finite_lr(3, 1.0).unwrap();
        let (dom, grid) = unit_line(5);
        let u = GridFunction::sample(dom, grid, sp, |t| vec![t[0], 2.0 * t[0], -t[0]]).unwrap();
        let second = u.apply_functional(&[0.0, 1.0, 0.0]).unwrap();
        for i in 0..5 {
            assert_eq!(second.value(i)[0], u.value(i)[1]);
        }
        let zero = u.apply_functional(&[0.0; 3]).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn apply_functional_overlap_integral() {
        // <1_{(0,t)}, 1_{(0,s)}> = |(0, min(t, s))| with s = 0.5
        let m = 64;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let (dom, grid) = unit_line(64);
        let u = GridFunction::sample(dom, grid, sp, |t| {
            (0..m)
                .map(|s| if (s as f64 + 0.5) / m as f64 <= t[0] { 1.0 } else { 0.0 })
                .collect()
        })
        .unwrap();
        let x: Vec<f64> = (0..m).map(|s| if s < m / 2 { 1.0 } else { 0.0 }).collect();
        let g = u.apply_functional(&x).unwrap();
        for i in 0..64 {
            let t = u.center(i)[0];
            // quadrature oracle: count of centres in (0, min(t, 0.5)) times 1/m
            let count = (0..m)
                .filter(|&s| {
                    let c = (s as f64 + 0.5) / m as f64;
                    c <= t && c < 0.5
                })
                .count();
            assert!((g.value(i)[0] - count as f64 / m as f64).abs() < 1e-15);
            assert!((g.value(i)[0] - t.min(0.5)).abs() <= 0.5 / m as f64 + 1e-15);
        }
    }

    #[test]
    fn json_and_csv() {
        let sp = SpaceDescriptor::sampled_sup(2).unwrap();
        let (dom, grid) = unit_line(3);
        let u = GridFunction::sample(dom, grid, sp, |t| vec![t[0], -t[0]]).unwrap();
        let j = u.to_json().unwrap();
        assert!(j.starts_with(r#"{"domain":{"lo":[0.0],"hi":[1.0]},"grid":{"n":[3]},"space":{"kind":"SampledSup""#));
        assert_eq!(GridFunction::from_json(&j).unwrap(), u);
        assert!(GridFunction::from_json(&j.replace("[3]", "[4]")).is_err());

        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x0,v0,v1");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn surface_measure_of_boxes() {
        assert_eq!(BoxDomain::unit(1).surface_measure(), 2.0);
        assert_eq!(BoxDomain::unit(2).surface_measure(), 4.0);
        assert_eq!(
            BoxDomain::new(vec![0.0, 0.0], vec![2.0, 1.0])
                .unwrap()
                .surface_measure(),
            6.0
        );
    }
}
