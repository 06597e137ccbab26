use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banach::Exponent;
use crate::calculus::{dq_criterion, CriterionVerdict};
use crate::error::{Error, Result};
use crate::fit::ConvergenceReport;
use crate::gridfn::{GridFunction, MollifierStencil};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierLevel {
    pub level: usize,
    /// `sup_f |rho_n * f - f|_{L^p}` over the family.
    pub sup_error: f64,
    pub argmax: usize,
    /// `sqrt(d) C / n`.
    pub bound: f64,
    /// `C sum_k w_k |k h|_1`, the bound for the discrete stencil.
    pub moment_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierFamilyReport {
    pub p: Exponent,
    /// Largest difference quotient of the reflected members.
    pub criterion_constant: f64,
    pub levels: Vec<MollifierLevel>,
    pub monotone: bool,
    pub within_bound: bool,
    pub convergence: ConvergenceReport,
    pub pass: bool,
}

/// Uniform convergence of mollification over a family bounded in
/// `W^{1,p}`: the sup error must not increase with `n` and must stay below
/// `sqrt(d) C / n`, with `C` the largest difference quotient of the
/// reflected members.
pub fn mollifier_family_check(family: &[GridFunction], levels: &[usize], p: Exponent) -> Result<MollifierFamilyReport> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidArgument("family must be non-empty".into()))?;
    if levels.is_empty() {
        return Err(Error::InvalidArgument("levels must be non-empty".into()));
    }
    for f in family {
        first.same_layout(f)?;
    }
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let h = first.spacings();
    let stencils = levels
        .iter()
        .map(|&n| MollifierStencil::new(&h, n))
        .collect::<Result<Vec<_>>>()?;
    let pad = stencils[0].radius_cells.iter().copied().max().unwrap_or(1).max(1);

    let constants = family
        .par_iter()
        .map(|f| {
            let r = dq_criterion(&f.extend_reflect(pad)?, p, &[1])?;
            if r.verdict == CriterionVerdict::Divergent {
                return Err(Error::Certification(
                    "family member fails the difference-quotient criterion".into(),
                ));
            }
            Ok(r.c_est)
        })
        .collect::<Result<Vec<_>>>()?;
    let c = constants.iter().copied().fold(0.0, f64::max);

    let d = first.d() as f64;
    let mut out = Vec::with_capacity(levels.len());
    for (&n, stencil) in levels.iter().zip(&stencils) {
        let errors = family
            .par_iter()
            .map(|f| Ok(f.mollify(n)?.sub(f)?.bochner_norm(p)))
            .collect::<Result<Vec<f64>>>()?;
        let (argmax, sup_error) = errors
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
        out.push(MollifierLevel {
            level: n,
            sup_error,
            argmax,
            bound: d.sqrt() * c / n as f64,
            moment_bound: c * stencil.first_moment_l1(&h),
        });
    }
    let scale = 1.0 + out.iter().map(|l| l.sup_error).fold(0.0, f64::max);
    let monotone = out.windows(2).all(|w| w[1].sup_error <= w[0].sup_error + 1e-12 * scale);
    let within_bound = out
        .iter()
        .all(|l| l.sup_error <= l.bound * (1.0 + 1e-9) + 1e-12 * scale);
    let convergence = ConvergenceReport::new(
        "mollifier sup error",
        out.iter().map(|l| (1.0 / l.level as f64, l.sup_error)).collect(),
        1.0,
    );
    Ok(MollifierFamilyReport {
        p,
        criterion_constant: c,
        pass: monotone && within_bound,
        levels: out,
        monotone,
        within_bound,
        convergence,
    })
}
