use serde::{Deserialize, Serialize};

use crate::banach::Exponent;
use crate::error::{Error, Result};
use crate::fit::log_log_fit;
use crate::gridfn::GridFunction;

/// Minimum number of distinct step sizes before a divergence verdict is allowed.
pub const DIVERGENCE_MIN_STEPS: usize = 4;
pub const DIVERGENCE_SLOPE: f64 = -0.1;
pub const DIVERGENCE_MIN_R2: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionVerdict {
    Bounded,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub axis: usize,
    pub steps: usize,
    pub h: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub table: Vec<CriterionRow>,
    /// Largest observed quotient, the estimate of `C`.
    pub c_est: f64,
    /// Most negative per-axis slope of `ln quotient` against `ln h`.
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
    pub residual: Option<f64>,
    pub verdict: CriterionVerdict,
}

/// Tabulates `|u(. + h e_j) - u|_{L^p(omega)} / h` for every axis and step
/// count and decides whether the quotients stay bounded as `h` shrinks.
pub fn dq_criterion(u: &GridFunction, p: Exponent, steps_list: &[usize]) -> Result<CriterionReport> {
    if steps_list.is_empty() {
        return Err(Error::InvalidArgument("steps_list must be non-empty".into()));
    }
    let mut table = Vec::with_capacity(u.d() * steps_list.len());
    for axis in 0..u.d() {
        for &steps in steps_list {
            let h = steps as f64 * u.spacing(axis);
            let quotient = u.shift_difference_norm(axis, steps, p)? / h;
            table.push(CriterionRow {
                axis,
                steps,
                h,
                quotient,
            });
        }
    }
    let c_est = table.iter().map(|r| r.quotient).fold(0.0, f64::max);

    let mut worst: Option<(f64, f64, f64)> = None;
    let mut divergent = false;
    for axis in 0..u.d() {
        let pts: Vec<(f64, f64)> = table
            .iter()
            .filter(|r| r.axis == axis)
            .map(|r| (r.h, r.quotient))
            .collect();
        let mut distinct: Vec<usize> = steps_list.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if let Some(fit) = log_log_fit(&pts) {
            if worst.is_none_or(|w| fit.slope < w.0) {
                worst = Some((fit.slope, fit.r_squared, fit.residual));
            }
            if distinct.len() >= DIVERGENCE_MIN_STEPS
                && fit.slope < DIVERGENCE_SLOPE
                && fit.r_squared >= DIVERGENCE_MIN_R2
            {
                divergent = true;
            }
        }
    }
    Ok(CriterionReport {
        table,
        c_est,
        slope: worst.map(|w| w.0),
        r_squared: worst.map(|w| w.1),
        residual: worst.map(|w| w.2),
        verdict: if divergent {
            CriterionVerdict::Divergent
        } else {
            CriterionVerdict::Bounded
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::SpaceDescriptor;
    use crate::gridfn::{BoxDomain, GridSpec};

    #[test]
    fn affine_bounded_with_exact_constant() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, 64).unwrap(), sp, |x| {
            vec![3.0 * x[0], 4.0 * x[0]]
        })
        .unwrap();
        let r = dq_criterion(&u, Exponent::Infinity, &[1, 2, 4, 8]).unwrap();
        assert!((r.c_est - 5.0).abs() < 1e-12);
        assert_eq!(r.verdict, CriterionVerdict::Bounded);
    }

    #[test]
    fn constant_gives_zero() {
        let u = GridFunction::sample_scalar(BoxDomain::unit(1), GridSpec::uniform(1, 16).unwrap(), |_| 2.0).unwrap();
        let r = dq_criterion(&u, Exponent::Finite(2.0), &[1, 2]).unwrap();
        assert_eq!(r.c_est, 0.0);
        assert_eq!(r.slope, None);
        assert_eq!(r.verdict, CriterionVerdict::Bounded);
    }

    #[test]
    fn indicator_path_diverges_at_half_power() {
        let m = 256;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, m).unwrap(), sp, |t| {
            (0..m)
                .map(|s| if (s as f64 + 0.5) / m as f64 <= t[0] { 1.0 } else { 0.0 })
                .collect()
        })
        .unwrap();
        let r = dq_criterion(&u, Exponent::Finite(2.0), &[1, 2, 4, 8]).unwrap();
        let slope = r.slope.unwrap();
        assert!((slope + 0.5).abs() < 0.05, "{slope}");
        assert_eq!(r.verdict, CriterionVerdict::Divergent);
    }

    #[test]
    fn too_few_steps_never_divergent() {
        let m = 64;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, m).unwrap(), sp, |t| {
            (0..m)
                .map(|s| if (s as f64 + 0.5) / m as f64 <= t[0] { 1.0 } else { 0.0 })
                .collect()
        })
        .unwrap();
        let r = dq_criterion(&u, Exponent::Finite(2.0), &[1, 2, 4]).unwrap();
        assert_eq!(r.verdict, CriterionVerdict::Bounded);
        assert!(dq_criterion(&u, Exponent::Finite(2.0), &[]).is_err());
        assert!(dq_criterion(&u, Exponent::Finite(2.0), &[64]).is_err());
    }
}
