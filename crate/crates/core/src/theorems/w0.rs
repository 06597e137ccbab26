use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::banach::{Exponent, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::gridfn::GridFunction;

/// Default membership tolerance `10 h^2`, the size of the extrapolation error.
pub fn default_w0_tolerance(u: &GridFunction) -> f64 {
    let h = u.max_spacing();
    10.0 * h * h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W0Report {
    /// `|Tr u|_{L^p(boundary, X)}`.
    pub boundary_norm: f64,
    /// Boundary norm of the trace of the scalar function `|u(.)|_X`.
    pub scalar_boundary_norm: f64,
    pub w_norm: f64,
    pub tolerance: f64,
    /// `tolerance * (1 + |u|_{W^{1,p}})`.
    pub threshold: f64,
    pub member: bool,
    pub scalar_member: bool,
    pub agree: bool,
    pub point_boundary: bool,
    pub h: f64,
}

/// Membership in `W_0^{1,p}` through a vanishing trace, next to the verdict
/// for the scalar function `|u(.)|_X`.
pub fn w0_membership(u: &GridFunction, p: Exponent, tol: Option<f64>) -> Result<W0Report> {
    let tolerance = tol.unwrap_or_else(|| default_w0_tolerance(u));
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidArgument("tolerance must be non-negative".into()));
    }
    let trace = u.trace_boundary()?;
    let boundary_norm = trace.boundary_lp_norm(p);
    let scalar_boundary_norm = u.pointwise_norms().trace_boundary()?.boundary_lp_norm(p);
    let w_norm = u.sobolev_norm(p)?;
    let threshold = tolerance * (1.0 + w_norm);
    let member = boundary_norm <= threshold;
    let scalar_member = scalar_boundary_norm <= threshold;
    Ok(W0Report {
        boundary_norm,
        scalar_boundary_norm,
        w_norm,
        tolerance,
        threshold,
        member,
        scalar_member,
        agree: member == scalar_member,
        point_boundary: trace.point_boundary,
        h: u.max_spacing(),
    })
}

/// Coordinate functionals `e_s / w_s`, so that `<u, x'_s> = u_s` in every space.
pub fn coordinate_functionals(space: &SpaceDescriptor) -> Vec<Vec<f64>> {
    (0..space.dim())
        .map(|s| {
            let mut f = vec![0.0; space.dim()];
            f[s] = if space.is_weighted() {
                1.0 / space.weight(s)
            } else {
                1.0
            };
            f
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakW0Report {
    pub rank: usize,
    pub verdicts: Vec<W0Report>,
    /// Indices of functionals whose pairing is not in `W_0`.
    pub failing: Vec<usize>,
    pub member: bool,
    /// The strong verdict from [`w0_membership`].
    pub strong_member: bool,
    pub agree: bool,
}

/// `<u, x'>` in scalar `W_0` for every `x'` of a separating family.
pub fn weak_w0_check(
    u: &GridFunction,
    p: Exponent,
    functionals: &[Vec<f64>],
    tol: Option<f64>,
) -> Result<WeakW0Report> {
    let k = u.space().dim();
    for f in functionals {
        u.space().check(f)?;
    }
    let rank = if functionals.is_empty() {
        0
    } else {
        let m = DMatrix::from_fn(functionals.len(), k, |i, j| functionals[i][j]);
        let scale = m.amax().max(f64::MIN_POSITIVE);
        m.rank(1e-10 * scale)
    };
    if rank < k {
        return Err(Error::InvalidArgument(format!(
            "functionals span rank {rank} < {k} and do not separate points"
        )));
    }
    let tolerance = tol.unwrap_or_else(|| default_w0_tolerance(u));
    let verdicts = functionals
        .iter()
        .map(|f| w0_membership(&u.apply_functional(f)?, p, Some(tolerance)))
        .collect::<Result<Vec<_>>>()?;
    let failing: Vec<usize> = verdicts
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.member)
        .map(|(i, _)| i)
        .collect();
    let strong_member = w0_membership(u, p, Some(tolerance))?.member;
    let member = failing.is_empty();
    Ok(WeakW0Report {
        rank,
        verdicts,
        failing,
        member,
        strong_member,
        agree: member == strong_member,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealReport {
    /// First node with `|v|_Y > |u|_X (1 + 1e-12)`.
    pub domination_witness: Option<usize>,
    pub u_report: W0Report,
    pub v_report: W0Report,
    pub pass: bool,
}

/// `u in W_0`, `|v|_Y <= |u|_X` pointwise `=> v in W_0`.
pub fn ideal_property_check(u: &GridFunction, v: &GridFunction, p: Exponent, tol: Option<f64>) -> Result<IdealReport> {
    u.same_layout(v)?;
    let nu = u.pointwise_norm_values();
    let nv = v.pointwise_norm_values();
    let domination_witness = nu.iter().zip(&nv).position(|(a, b)| *b > a * (1.0 + 1e-12));
    let u_report = w0_membership(u, p, tol)?;
    let v_report = w0_membership(v, p, tol)?;
    Ok(IdealReport {
        pass: domination_witness.is_none() && u_report.member && v_report.member,
        domination_witness,
        u_report,
        v_report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormContinuityReport {
    /// `|u_k - u|_{W^{1,p}(X)}`.
    pub input_distances: Vec<f64>,
    /// `| |u_k|_X - |u|_X |_{W^{1,p}}`.
    pub output_distances: Vec<f64>,
    pub pass: bool,
}

/// Continuity of `u -> |u(.)|_X` from `W^{1,p}(X)` to `W^{1,p}`: along a
/// sequence with shrinking input distance the output distance must shrink
/// at least like the square root of the input distance.
pub fn norm_map_continuity_check(
    u: &GridFunction,
    sequence: &[GridFunction],
    p: Exponent,
) -> Result<NormContinuityReport> {
    if sequence.is_empty() {
        return Err(Error::InvalidArgument("sequence must be non-empty".into()));
    }
    let nu = u.pointwise_norms();
    let mut input_distances = Vec::with_capacity(sequence.len());
    let mut output_distances = Vec::with_capacity(sequence.len());
    for uk in sequence {
        input_distances.push(uk.sub(u)?.sobolev_norm(p)?);
        output_distances.push(uk.pointwise_norms().sub(&nu)?.sobolev_norm(p)?);
    }
    let (fi, li) = (input_distances[0], *input_distances.last().unwrap());
    let (fo, lo) = (output_distances[0], *output_distances.last().unwrap());
    let pass = if fi == 0.0 {
        output_distances.iter().all(|d| *d <= 1e-10)
    } else {
        lo <= 1e-10 + fo * (li / fi).sqrt()
    };
    Ok(NormContinuityReport {
        input_distances,
        output_distances,
        pass,
    })
}

/// `u + w / k` for each `k`.
pub fn perturbation_sequence(u: &GridFunction, w: &GridFunction, ks: &[f64]) -> Result<Vec<GridFunction>> {
    ks.iter().map(|k| u.add(&w.scale(1.0 / k))).collect()
}

/// Rotations of each consecutive coordinate pair of a Hilbert-valued `u` by `angle`.
pub fn rotation_sequence(u: &GridFunction, angles: &[f64]) -> Result<Vec<GridFunction>> {
    if u.space().kind() != crate::banach::SpaceKind::Hilbert {
        return Err(Error::Capability("rotations need a Hilbert space".into()));
    }
    angles
        .iter()
        .map(|a| {
            let (s, c) = a.sin_cos();
            u.map(u.space().clone(), |x| {
                let mut y = x.to_vec();
                for q in 0..x.len() / 2 {
                    y[2 * q] = c * x[2 * q] - s * x[2 * q + 1];
                    y[2 * q + 1] = s * x[2 * q] + c * x[2 * q + 1];
                }
                y
            })
        })
        .collect()
}
