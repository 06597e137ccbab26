use serde::{Deserialize, Serialize};

use super::{lp_of_norms, GridFunction};
use crate::banach::{Exponent, SpaceDescriptor};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lo,
    Hi,
}

/// Boundary values on one face `{xi_axis = lo_axis}` or `{xi_axis = hi_axis}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceTrace {
    pub axis: usize,
    pub side: Side,
    /// Cells per tangential axis; empty when `d = 1`.
    pub cells: Vec<usize>,
    /// Node-major values, `space.dim()` numbers per face node.
    pub values: Vec<f64>,
    /// Quadrature weight of each face node (1 for the point faces of `d = 1`).
    pub cell_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub space: SpaceDescriptor,
    pub faces: Vec<FaceTrace>,
    /// The box is an interval, so the boundary consists of two points.
    pub point_boundary: bool,
}

impl BoundaryTrace {
    /// `(sum_faces sum_nodes |v|_X^p dS)^(1/p)`.
    pub fn boundary_lp_norm(&self, p: Exponent) -> f64 {
        let k = self.space.dim();
        match p {
            Exponent::Infinity => self
                .faces
                .iter()
                .flat_map(|f| f.values.chunks(k))
                .map(|v| self.space.norm_unchecked(v))
                .fold(0.0, f64::max),
            Exponent::Finite(q) => {
                let acc: f64 = self
                    .faces
                    .iter()
                    .map(|f| {
                        let norms = f.values.chunks(k).map(|v| self.space.norm_unchecked(v));
                        lp_of_norms(norms, f.cell_measure, Exponent::Finite(q)).powf(q)
                    })
                    .sum();
                acc.powf(1.0 / q)
            }
        }
    }

    pub fn max_pointwise_norm(&self) -> f64 {
        self.boundary_lp_norm(Exponent::Infinity)
    }
}

impl GridFunction {
    /// Boundary values by linear extrapolation from the two cell layers
    /// nearest each face: `1.5 u_0 - 0.5 u_1`.
    pub fn trace_boundary(&self) -> Result<BoundaryTrace> {
        let d = self.d();
        let k = self.space.dim();
        let n = self.grid.cells();
        let strides = self.grid.strides();
        let h = self.spacings();
        let mut faces = Vec::with_capacity(2 * d);
        for axis in 0..d {
            let tangential: Vec<usize> = (0..d).filter(|&j| j != axis).collect();
            let cells: Vec<usize> = tangential.iter().map(|&j| n[j]).collect();
            let count: usize = cells.iter().product();
            let cell_measure: f64 = tangential.iter().map(|&j| h[j]).product();
            for side in [Side::Lo, Side::Hi] {
                let (first, second) = match side {
                    Side::Lo => (0, 1),
                    Side::Hi => (n[axis] - 1, n[axis] - 2),
                };
                let mut values = Vec::with_capacity(count * k);
                for f in 0..count {
                    let mut rest = f;
                    let mut base = 0;
                    for (t, &j) in tangential.iter().enumerate().rev() {
                        base += (rest % cells[t]) * strides[j];
                        rest /= cells[t];
                    }
                    let a = self.value(base + first * strides[axis]);
                    let b = self.value(base + second * strides[axis]);
                    values.extend(a.iter().zip(b).map(|(x, y)| 1.5 * x - 0.5 * y));
                }
                faces.push(FaceTrace {
                    axis,
                    side,
                    cells: cells.clone(),
                    values,
                    cell_measure,
                });
            }
        }
        Ok(BoundaryTrace {
            space: self.space.clone(),
            faces,
            point_boundary: d == 1,
        })
    }
}
