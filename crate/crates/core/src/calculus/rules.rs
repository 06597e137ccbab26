use serde::{Deserialize, Serialize};

use super::{norm_derivative_field, tau_zero};
use crate::banach::Exponent;
use crate::error::{Error, Result};
use crate::gridfn::{DerivativeField, GridFunction, Scheme};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientRuleReport {
    /// `v = u / |u|_X * phi * 1_{u != 0}` with `phi = phi_hat ^ |u|_X`.
    pub v: GridFunction,
    /// `D_j v` from the rule.
    pub field: DerivativeField,
    /// `|u(xi)|_X <= tau_zero`.
    pub flagged: Vec<bool>,
    /// `sum_j |field_j - D_j v|_{L^1(X)}` over non-flagged interior nodes.
    pub discrepancy: f64,
    /// `L^1` sizes of the two terms of the rule, summed over `j`.
    pub first_term: f64,
    pub second_term: f64,
    pub h: f64,
}

/// Builds `v` and its derivative
/// `((D_j u) |u| - u D_j|u|) / |u|^2 * phi + u / |u| * D_j phi` on `{u != 0}`.
pub fn quotient_rule_field(u: &GridFunction, phi_hat: &GridFunction) -> Result<QuotientRuleReport> {
    u.same_layout(phi_hat)?;
    if !phi_hat.space().is_scalar() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: phi_hat.space().dim(),
        });
    }
    if let Some(i) = phi_hat.values().iter().position(|v| *v < 0.0) {
        return Err(Error::InvalidArgument(format!("phi_hat is negative at node {i}")));
    }
    let sp = u.space();
    let k = sp.dim();
    let n = u.node_count();
    let norms = u.pointwise_norm_values();
    let flagged: Vec<bool> = norms.iter().map(|a| *a <= tau_zero(*a)).collect();
    let phi: Vec<f64> = norms.iter().zip(phi_hat.values()).map(|(a, b)| b.min(*a)).collect();
    let phi_fn = phi_hat.with_values(phi_hat.space().clone(), phi.clone())?;

    let mut vv = vec![0.0; n * k];
    for i in 0..n {
        if norms[i] > 0.0 {
            for (s, x) in u.value(i).iter().enumerate() {
                vv[i * k + s] = x / norms[i] * phi[i];
            }
        }
    }
    let v = u.with_values(sp.clone(), vv)?;

    let du = u.finite_difference(Scheme::Central)?;
    let dnorm = norm_derivative_field(u)?.field;
    let dphi = phi_fn.finite_difference(Scheme::Central)?;
    let dv = v.finite_difference(Scheme::Central)?;
    let vol = u.cell_volume();

    let mut comps = Vec::with_capacity(u.d());
    let mut discrepancy = 0.0;
    let mut first_term = 0.0;
    let mut second_term = 0.0;
    let mut t1 = vec![0.0; k];
    let mut t2 = vec![0.0; k];
    let mut diff = vec![0.0; k];
    for j in 0..u.d() {
        let mut vals = vec![0.0; n * k];
        for i in 0..n {
            let a = norms[i];
            if a == 0.0 {
                continue;
            }
            let x = u.value(i);
            let dx = du.component(j).value(i);
            let dn = dnorm.component(j).value(i)[0];
            let dp = dphi.component(j).value(i)[0];
            for s in 0..k {
                t1[s] = (dx[s] * a - x[s] * dn) / (a * a) * phi[i];
                t2[s] = x[s] / a * dp;
                vals[i * k + s] = t1[s] + t2[s];
            }
            first_term += sp.norm_unchecked(&t1) * vol;
            second_term += sp.norm_unchecked(&t2) * vol;
            if !flagged[i] && !du.is_one_sided(j, i) {
                for s in 0..k {
                    diff[s] = vals[i * k + s] - dv.component(j).value(i)[s];
                }
                discrepancy += sp.norm_unchecked(&diff) * vol;
            }
        }
        comps.push(u.with_values(sp.clone(), vals)?);
    }
    Ok(QuotientRuleReport {
        v,
        field: DerivativeField::new(comps, Scheme::Central, u.spacings()),
        flagged,
        discrepancy,
        first_term,
        second_term,
        h: u.max_spacing(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRuleReport {
    /// `sum_j |D_j(psi u) - (D_j psi) u - psi D_j u|_{L^1(X)}` over interior nodes.
    pub error: f64,
    /// `(1 + |u|_{W^{1,inf}}) (1 + |psi|_{W^{1,inf}})`.
    pub constant: f64,
    pub h: f64,
    pub pass: bool,
}

/// `D_j(psi u) = (D_j psi) u + psi D_j u` up to `C h`.
pub fn product_rule_check(u: &GridFunction, psi: &GridFunction) -> Result<ProductRuleReport> {
    let prod = u.multiply_scalar(psi)?;
    let du = u.finite_difference(Scheme::Central)?;
    let dpsi = psi.finite_difference(Scheme::Central)?;
    let dprod = prod.finite_difference(Scheme::Central)?;
    let sp = u.space();
    let vol = u.cell_volume();
    let mut error = 0.0;
    let mut diff = vec![0.0; sp.dim()];
    for j in 0..u.d() {
        for i in (0..u.node_count()).filter(|&i| !du.is_one_sided(j, i)) {
            let dp = dpsi.component(j).value(i)[0];
            let ps = psi.value(i)[0];
            for (s, d) in diff.iter_mut().enumerate() {
                *d = dprod.component(j).value(i)[s] - dp * u.value(i)[s] - ps * du.component(j).value(i)[s];
            }
            error += sp.norm_unchecked(&diff) * vol;
        }
    }
    let constant = (1.0 + u.sobolev_norm(Exponent::Infinity)?) * (1.0 + psi.sobolev_norm(Exponent::Infinity)?);
    let h = u.max_spacing();
    Ok(ProductRuleReport {
        error,
        constant,
        h,
        pass: error <= constant * h,
    })
}
