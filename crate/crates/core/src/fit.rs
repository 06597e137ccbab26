//! Log-log regression and the convergence report shared by every verification.

use serde::{Deserialize, Serialize};

/// Errors at or below this level count as exact; a refinement ladder made of
/// them passes without a fitted order.
pub const EXACT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Least-squares line through `(ln x, ln y)`. Needs two points with positive coordinates.
pub fn log_log_fit(points: &[(f64, f64)]) -> Option<LineFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
        residual: (ss_res / n).sqrt(),
    })
}

/// `(h, error)` pairs with the fitted order of `error ~ h^order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub fitted_order: f64,
    pub residual: f64,
    pub threshold: f64,
    /// Every error sits below [`EXACT_FLOOR`].
    pub exact: bool,
    pub pass: bool,
}

impl ConvergenceReport {
    /// Sorts by decreasing `h`, fits the order and compares it with `min_order`.
    pub fn new(name: impl Into<String>, mut points: Vec<(f64, f64)>, min_order: f64) -> Self {
        points.sort_by(|a, b| b.0.total_cmp(&a.0));
        let exact = points.iter().all(|p| p.1 <= EXACT_FLOOR);
        let fit = log_log_fit(&points);
        let (fitted_order, residual) = match (exact, fit) {
            (true, _) => (f64::INFINITY, 0.0),
            (false, Some(f)) => (f.slope, f.residual),
            (false, None) => (f64::NAN, f64::NAN),
        };
        let pass = exact || fitted_order >= min_order;
        ConvergenceReport {
            name: name.into(),
            points,
            fitted_order,
            residual,
            threshold: min_order,
            exact,
            pass,
        }
    }

    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125].iter().map(|h| (*h, 3.0 * h * h)).collect();
        let f = log_log_fit(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_sorts_and_judges() {
        let r = ConvergenceReport::new("t", vec![(0.01, 1e-2), (0.1, 1e-1), (0.05, 5e-2)], 0.9);
        assert_eq!(r.points[0].0, 0.1);
        assert!(r.pass && (r.fitted_order - 1.0).abs() < 1e-12);
        let bad = ConvergenceReport::new("t", vec![(0.1, 1e-2), (0.01, 1e-2)], 0.9);
        assert!(!bad.pass);
        let exact = ConvergenceReport::new("t", vec![(0.1, 0.0), (0.01, 1e-15)], 0.9);
        assert!(exact.pass && exact.exact);
    }

    #[test]
    fn degenerate_input() {
        assert!(log_log_fit(&[(0.1, 1.0)]).is_none());
        assert!(log_log_fit(&[(0.1, 1.0), (0.1, 2.0)]).is_none());
    }
}
