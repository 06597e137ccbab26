use serde::{Deserialize, Serialize};

use super::w0::{w0_membership, W0Report};
use crate::banach::Exponent;
use crate::error::{Error, Result};
use crate::gridfn::{GridFunction, Scheme};

/// `pi_p = 2 pi (p - 1)^{1/p} / (p sin(pi / p))`, the sharp one-dimensional
/// Poincare constant of `W_0^{1,p}(0, 1)`; equal to `pi` for `p = 2` and to 2
/// at both ends of the range.
pub fn pi_p(p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => 2.0,
        Exponent::Finite(q) if q == 1.0 => 2.0,
        Exponent::Finite(q) => {
            let pi = std::f64::consts::PI;
            2.0 * pi * (q - 1.0).powf(1.0 / q) / (q * (pi / q).sin())
        }
    }
}

/// Smallest eigenvalue of `tridiag(-1, 2, -1) / h^2` of size `n - 1` with
/// `h = len / n`, by Sturm-sequence bisection.
pub fn first_dirichlet_eigenvalue(n: usize, len: f64) -> Result<f64> {
    if n < 2 || !(len > 0.0) {
        return Err(Error::InvalidArgument("need n >= 2 and a positive length".into()));
    }
    let m = n - 1;
    let h = len / n as f64;
    let (diag, off) = (2.0 / (h * h), -1.0 / (h * h));
    // number of eigenvalues strictly below x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = diag - x;
        if q < 0.0 {
            count += 1;
        }
        for _ in 1..m {
            if q == 0.0 {
                q = f64::EPSILON * off.abs();
            }
            q = diag - x - off * off / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = (0.0, 4.0 / (h * h));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed form `4 / h^2 sin^2(pi h / (2 len))` of the same eigenvalue.
pub fn first_dirichlet_eigenvalue_exact(n: usize, len: f64) -> f64 {
    let h = len / n as f64;
    let s = (std::f64::consts::PI / (2.0 * n as f64)).sin();
    4.0 / (h * h) * s * s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub axis: usize,
    pub p: Exponent,
    pub derivative_norm: f64,
    pub lp_norm: f64,
    /// `|D_j u|_p / |u|_p`.
    pub ratio: f64,
    /// `pi_p / (hi_j - lo_j)`.
    pub constant: f64,
    pub rel_tolerance: f64,
    pub precondition: W0Report,
    pub pass: bool,
}

/// `|D_j u|_{L^p(X)} >= C |u|_{L^p(X)}` for `u` with vanishing trace.
pub fn poincare_check(u: &GridFunction, p: Exponent, axis: usize, rel_tolerance: f64) -> Result<PoincareReport> {
    if axis >= u.d() {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for d = {}",
            u.d()
        )));
    }
    let precondition = w0_membership(u, p, None)?;
    let derivative_norm = u.finite_difference(Scheme::Central)?.component(axis).bochner_norm(p);
    let lp_norm = u.bochner_norm(p);
    let constant = pi_p(p) / u.domain().width(axis);
    let ratio = if lp_norm == 0.0 {
        f64::INFINITY
    } else {
        derivative_norm / lp_norm
    };
    let holds = derivative_norm >= constant * lp_norm * (1.0 - rel_tolerance);
    Ok(PoincareReport {
        axis,
        p,
        derivative_norm,
        lp_norm,
        ratio,
        constant,
        rel_tolerance,
        pass: precondition.member && holds,
        precondition,
    })
}
