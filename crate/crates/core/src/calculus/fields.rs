use serde::{Deserialize, Serialize};

use super::tau_zero;
use crate::banach::{self, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::gridfn::{DerivativeField, GridFunction, Scheme};

/// A node whose pairing `<D_j u, J(u)>` is an interval rather than a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingInterval {
    pub axis: usize,
    pub node: usize,
    pub plus: f64,
    pub minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormFieldReport {
    /// Scalar field `D_j |u|_X`; zero where `u` vanishes, interval midpoint at ties.
    pub field: DerivativeField,
    /// `flagged[j][node]`: zero of `u` or non-unique pairing.
    pub flagged: Vec<Vec<bool>>,
    pub zero_nodes: usize,
    pub intervals: Vec<PairingInterval>,
    /// `sum_j |field_j - D_j |u|_X|_{L^1}` over non-flagged interior nodes.
    pub discrepancy: f64,
    /// Nodes where `|field_j| > |D_j u|_X` beyond `1e-12 (1 + |D_j u|_X)`.
    pub estimate_violations: usize,
    pub max_estimate_ratio: f64,
    pub h: f64,
}

/// `D_j |u(xi)|_X = <D_j u(xi), J(u(xi))>` nodewise, compared with the finite
/// difference of the pointwise norm.
pub fn norm_derivative_field(u: &GridFunction) -> Result<NormFieldReport> {
    let sp = u.space();
    let n = u.node_count();
    let du = u.finite_difference(Scheme::Central)?;
    let norms = u.pointwise_norms();
    let dnorm = norms.finite_difference(Scheme::Central)?;
    let vol = u.cell_volume();
    let node_norms = norms.values();

    let zero: Vec<bool> = (0..n).map(|i| node_norms[i] <= tau_zero(node_norms[i])).collect();
    let zero_nodes = zero.iter().filter(|z| **z).count();
    let mut comps = Vec::with_capacity(u.d());
    let mut flagged = Vec::with_capacity(u.d());
    let mut intervals = Vec::new();
    let mut discrepancy = 0.0;
    let mut estimate_violations = 0;
    let mut max_estimate_ratio = 0.0_f64;
    for j in 0..u.d() {
        let dj = du.component(j);
        let mut vals = vec![0.0; n];
        let mut flags = zero.clone();
        for i in 0..n {
            if zero[i] {
                continue;
            }
            let dir = dj.value(i);
            let r = banach::one_sided_unchecked(sp, u.value(i), dir);
            if r.unique {
                vals[i] = r.plus;
                let bound = sp.norm_unchecked(dir);
                if r.plus.abs() > bound + 1e-12 * (1.0 + bound) {
                    estimate_violations += 1;
                }
                if bound > 0.0 {
                    max_estimate_ratio = max_estimate_ratio.max(r.plus.abs() / bound);
                }
                if !du.is_one_sided(j, i) {
                    discrepancy += (r.plus - dnorm.component(j).value(i)[0]).abs() * vol;
                }
            } else {
                vals[i] = 0.5 * (r.plus + r.minus);
                flags[i] = true;
                intervals.push(PairingInterval {
                    axis: j,
                    node: i,
                    plus: r.plus,
                    minus: r.minus,
                });
            }
        }
        comps.push(u.with_values(SpaceDescriptor::scalar(), vals)?);
        flagged.push(flags);
    }
    Ok(NormFieldReport {
        field: DerivativeField::new(comps, Scheme::Central, u.spacings()),
        flagged,
        zero_nodes,
        intervals,
        discrepancy,
        estimate_violations,
        max_estimate_ratio,
        h: u.max_spacing(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFieldReport {
    pub field: DerivativeField,
    /// Some coordinate of `u(xi)` lies within `tau_zero` of 0.
    pub flagged: Vec<bool>,
    /// `sum_j |field_j - D_j g(u)|_{L^1(X)}` over non-flagged interior nodes,
    /// `g` being `|.|` or `(.)^+`.
    pub consistency_error: f64,
    /// `pos = (abs + D u) / 2` bit for bit on coordinates where `u != 0`.
    /// Always true for the abs field.
    pub half_sum_identity: bool,
    pub h: f64,
}

fn require_order_continuous(sp: &SpaceDescriptor) -> Result<()> {
    if !sp.lattice_capable() {
        return Err(Error::Capability(format!("{sp} has no lattice structure")));
    }
    if !sp.order_continuous() {
        return Err(Error::Hypothesis(format!(
            "{sp} does not have order continuous norm; lattice chain rules need it"
        )));
    }
    Ok(())
}

fn zero_set_flags(u: &GridFunction) -> Vec<bool> {
    (0..u.node_count())
        .map(|i| {
            let x = u.value(i);
            let tau = tau_zero(u.space().norm_unchecked(x));
            x.iter().any(|v| v.abs() <= tau)
        })
        .collect()
}

enum LatticeOp {
    Abs,
    Pos,
}

fn lattice_field(u: &GridFunction, op: LatticeOp) -> Result<LatticeFieldReport> {
    let sp = u.space();
    require_order_continuous(sp)?;
    let du = u.finite_difference(Scheme::Central)?;
    let g = match op {
        LatticeOp::Abs => u.map(sp.clone(), |x| x.iter().map(|v| v.abs()).collect())?,
        LatticeOp::Pos => u.map(sp.clone(), |x| x.iter().map(|v| v.max(0.0)).collect())?,
    };
    let dg = g.finite_difference(Scheme::Central)?;
    let flagged = zero_set_flags(u);
    let vol = u.cell_volume();
    let mut comps = Vec::with_capacity(u.d());
    let mut consistency_error = 0.0;
    let mut half_sum_identity = true;
    let mut diff = vec![0.0; sp.dim()];
    for j in 0..u.d() {
        let dj = du.component(j);
        let mut vals = Vec::with_capacity(u.values().len());
        for i in 0..u.node_count() {
            let x = u.value(i);
            let w = dj.value(i);
            let start = vals.len();
            match op {
                LatticeOp::Abs => vals.extend(x.iter().zip(w).map(|(a, b)| {
                    if *a > 0.0 {
                        *b
                    } else if *a < 0.0 {
                        -*b
                    } else {
                        0.0
                    }
                })),
                LatticeOp::Pos => {
                    vals.extend(x.iter().zip(w).map(|(a, b)| if *a > 0.0 { *b } else { 0.0 }));
                    for (s, (a, b)) in x.iter().zip(w).enumerate() {
                        if *a != 0.0 {
                            let abs = if *a > 0.0 { *b } else { -*b };
                            if vals[start + s] != 0.5 * (abs + b) {
                                half_sum_identity = false;
                            }
                        }
                    }
                }
            }
            if !flagged[i] && !du.is_one_sided(j, i) {
                for (d, (a, b)) in diff.iter_mut().zip(vals[start..].iter().zip(dg.component(j).value(i))) {
                    *d = a - b;
                }
                consistency_error += sp.norm_unchecked(&diff) * vol;
            }
        }
        comps.push(u.with_values(sp.clone(), vals)?);
    }
    Ok(LatticeFieldReport {
        field: DerivativeField::new(comps, Scheme::Central, u.spacings()),
        flagged,
        consistency_error,
        half_sum_identity,
        h: u.max_spacing(),
    })
}

/// `D_j |u| = (sign u) D_j u`.
pub fn abs_derivative_field(u: &GridFunction) -> Result<LatticeFieldReport> {
    lattice_field(u, LatticeOp::Abs)
}

/// `D_j u^+ = P_{u^+} D_j u`.
pub fn pos_derivative_field(u: &GridFunction) -> Result<LatticeFieldReport> {
    lattice_field(u, LatticeOp::Pos)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StampacchiaReport {
    /// Nodes where `|u(xi)| ^ w` exceeds `tau_zero`.
    pub precondition_violations: Vec<usize>,
    /// Largest coordinate of `|D_j u(xi)| ^ w` over interior nodes.
    pub max_meet: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// If `|u| ^ w = 0` then `|D_j u| ^ w = 0`.
pub fn stampacchia_check(u: &GridFunction, w: &[f64]) -> Result<StampacchiaReport> {
    let sp = u.space();
    if !sp.lattice_capable() {
        return Err(Error::Capability(format!("{sp} has no lattice structure")));
    }
    sp.check(w)?;
    if w.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("w must be a positive element".into()));
    }
    let mut precondition_violations = Vec::new();
    let mut tau_max = 0.0_f64;
    for i in 0..u.node_count() {
        let x = u.value(i);
        let tau = tau_zero(sp.norm_unchecked(x));
        tau_max = tau_max.max(tau);
        if x.iter().zip(w).any(|(a, b)| a.abs().min(*b) > tau) {
            precondition_violations.push(i);
        }
    }
    let du = u.finite_difference(Scheme::Central)?;
    let mut max_meet = 0.0_f64;
    for j in 0..u.d() {
        for i in (0..u.node_count()).filter(|&i| !du.is_one_sided(j, i)) {
            for (a, b) in du.component(j).value(i).iter().zip(w) {
                max_meet = max_meet.max(a.abs().min(*b));
            }
        }
    }
    let tolerance = 2.0 * tau_max / u.spacings().into_iter().fold(f64::INFINITY, f64::min);
    Ok(StampacchiaReport {
        pass: precondition_violations.is_empty() && max_meet <= tolerance,
        precondition_violations,
        max_meet,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{BoxDomain, GridSpec};
    use std::f64::consts::PI;

    fn line(n: usize, lo: f64, hi: f64) -> (BoxDomain, GridSpec) {
        (BoxDomain::interval(lo, hi).unwrap(), GridSpec::uniform(1, n).unwrap())
    }

    #[test]
    fn circle_has_zero_norm_derivative() {
        let sp = SpaceDescriptor::hilbert(2).unwrap();
        let (d, g) = line(200, 0.0, 2.0 * PI);
        let u = GridFunction::sample(d, g, sp, |t| vec![t[0].sin(), t[0].cos()]).unwrap();
        let r = norm_derivative_field(&u).unwrap();
        let du = u.finite_difference(Scheme::Central).unwrap();
        for i in 1..199 {
            assert!(r.field.component(0).value(i)[0].abs() <= 1e-10);
        }
        // while |D u| stays near 1 away from the ends
        assert!((du.component(0).value(100)[0].hypot(du.component(0).value(100)[1]) - 1.0).abs() < 1e-3);
        assert_eq!(r.estimate_violations, 0);
    }

    #[test]
    fn sup_norm_with_unique_extremum() {
        // u(xi)(k) = xi * c_k, the largest |c_k| is unique and negative
        let sp = SpaceDescriptor::sampled_sup(3).unwrap();
        let (d, g) = line(20, 0.5, 1.0);
        let u = GridFunction::sample(d, g, sp, |t| vec![t[0], -3.0 * t[0], 2.0 * t[0] * t[0]]).unwrap();
        let r = norm_derivative_field(&u).unwrap();
        let du = u.finite_difference(Scheme::Central).unwrap();
        for i in 0..20 {
            let want = -du.component(0).value(i)[1];
            assert_eq!(r.field.component(0).value(i)[0], want);
        }
        assert!(r.intervals.is_empty());
    }

    #[test]
    fn affine_path_has_constant_norm_derivative() {
        let sp = SpaceDescriptor::grid_lr(3, 3.0).unwrap();
        let x0 = [1.0, -2.0, 0.5];
        let (d, g) = line(16, 0.1, 1.0);
        let u = GridFunction::sample(d, g, sp.clone(), |t| x0.iter().map(|c| c * t[0]).collect()).unwrap();
        let r = norm_derivative_field(&u).unwrap();
        let nx = banach::norm(&sp, &x0).unwrap();
        for i in 0..16 {
            assert!((r.field.component(0).value(i)[0] - nx).abs() < 1e-12);
        }
        assert!(r.discrepancy < 1e-12);
    }

    #[test]
    fn zero_and_tie_nodes_are_flagged() {
        let sp = SpaceDescriptor::sampled_sup(2).unwrap();
        let (d, g) = line(4, 0.0, 1.0);
        // node 1 is a tie with conflicting directions, node 2 is zero
        let u = GridFunction::new(d, g, sp, vec![1.0, 3.0, 2.0, 2.0, 0.0, 0.0, 1.0, 5.0]).unwrap();
        let r = norm_derivative_field(&u).unwrap();
        assert_eq!(r.zero_nodes, 1);
        assert!(r.flagged[0][2]);
        assert_eq!(r.field.component(0).value(2)[0], 0.0);
        assert!(r.flagged[0][1]);
        let iv = r.intervals.iter().find(|iv| iv.node == 1).unwrap();
        assert!(iv.plus > iv.minus);
        assert_eq!(r.field.component(0).value(1)[0], 0.5 * (iv.plus + iv.minus));
    }

    #[test]
    fn nonnegative_paths_have_plain_lattice_fields() {
        let sp = SpaceDescriptor::finite_lr(2, 2.0).unwrap();
        let (d, g) = line(30, 0.0, 1.0);
        let u = GridFunction::sample(d, g, sp, |t| vec![1.0 + t[0], (2.0 * t[0]).exp()]).unwrap();
        let du = u.finite_difference(Scheme::Central).unwrap();
        let a = abs_derivative_field(&u).unwrap();
        let p = pos_derivative_field(&u).unwrap();
        assert_eq!(a.field.component(0), du.component(0));
        assert_eq!(p.field.component(0), du.component(0));
        assert!(p.half_sum_identity);
    }

    #[test]
    fn scalar_positive_part_masks_derivative() {
        let (d, g) = line(64, -1.0, 1.0);
        let u = GridFunction::sample_scalar(d, g, |t| t[0] * t[0] * t[0] - 0.3).unwrap();
        let du = u.finite_difference(Scheme::Central).unwrap();
        let p = pos_derivative_field(&u).unwrap();
        for i in 0..64 {
            let want = if u.value(i)[0] > 0.0 {
                du.component(0).value(i)[0]
            } else {
                0.0
            };
            assert_eq!(p.field.component(0).value(i)[0], want);
        }
        assert!(p.half_sum_identity);
    }

    #[test]
    fn gridlr_difference_path_sign_field() {
        // u(xi)(s) = xi - s, s on a grid that avoids the xi nodes
        let m = 10;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let (d, g) = line(40, 0.0, 1.0);
        let s: Vec<f64> = (0..m).map(|k| (k as f64 + 0.3) / m as f64).collect();
        let u = GridFunction::sample(d, g, sp, |t| s.iter().map(|sv| t[0] - sv).collect()).unwrap();
        let a = abs_derivative_field(&u).unwrap();
        for i in 0..40 {
            let xi = u.center(i)[0];
            for (k, sv) in s.iter().enumerate() {
                let want = if xi > *sv { 1.0 } else { -1.0 };
                assert!((a.field.component(0).value(i)[k] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lattice_field_errors() {
        let (d, g) = line(8, 0.0, 1.0);
        let u = GridFunction::sample(d.clone(), g.clone(), SpaceDescriptor::sampled_sup(2).unwrap(), |t| {
            vec![t[0], -t[0]]
        })
        .unwrap();
        assert!(matches!(pos_derivative_field(&u), Err(Error::Hypothesis(_))));
        let v = GridFunction::sample(d, g, SpaceDescriptor::hilbert(2).unwrap(), |t| vec![t[0], 1.0]).unwrap();
        assert!(matches!(abs_derivative_field(&v), Err(Error::Capability(_))));
    }

    #[test]
    fn stampacchia_disjoint_supports() {
        let m = 8;
        let sp = SpaceDescriptor::grid_lr(m, 2.0).unwrap();
        let (d, g) = line(25, 0.0, 1.0);
        let u = GridFunction::sample(d, g, sp, |t| {
            (0..m)
                .map(|s| if (s as f64 + 0.5) / (m as f64) < 0.5 { t[0] } else { 0.0 })
                .collect()
        })
        .unwrap();
        let w: Vec<f64> = (0..m)
            .map(|s| if (s as f64 + 0.5) / (m as f64) >= 0.5 { 1.0 } else { 0.0 })
            .collect();
        let r = stampacchia_check(&u, &w).unwrap();
        assert!(r.pass && r.max_meet == 0.0);
        assert!(stampacchia_check(&u, &vec![0.0; m]).unwrap().pass);
        let r = stampacchia_check(&u, &vec![1.0; m]).unwrap();
        assert!(!r.pass && !r.precondition_violations.is_empty());
    }
}
