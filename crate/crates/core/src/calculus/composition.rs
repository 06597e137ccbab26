use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::banach::{self, Exponent, SpaceDescriptor, PAIRING_TOLERANCE};
use crate::error::{Error, Result};
use crate::gridfn::{lp_of_norms, DerivativeField, GridFunction, Scheme};

pub type PointRule = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// `(x, v) -> (D_v^+ F(x), D_v^- F(x))`.
pub type OneSidedRule = Arc<dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Number of seeded node pairs used to validate a claimed Lipschitz constant.
pub const LIPSCHITZ_PAIRS: usize = 10_000;

/// A pointwise map `F: X -> Y` with a claimed Lipschitz constant.
#[derive(Clone)]
pub struct LipschitzMap {
    pub name: String,
    pub source: SpaceDescriptor,
    pub target: SpaceDescriptor,
    pub lipschitz: f64,
    pub rule: PointRule,
    pub onesided: Option<OneSidedRule>,
}

impl fmt::Debug for LipschitzMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzMap")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("lipschitz", &self.lipschitz)
            .field("onesided", &self.onesided.is_some())
            .finish()
    }
}

impl LipschitzMap {
    pub fn identity(space: &SpaceDescriptor) -> Self {
        LipschitzMap {
            name: "identity".into(),
            source: space.clone(),
            target: space.clone(),
            lipschitz: 1.0,
            rule: Arc::new(|x: &[f64]| x.to_vec()),
            onesided: Some(Arc::new(|_x: &[f64], v: &[f64]| (v.to_vec(), v.to_vec()))),
        }
    }

    /// `x -> |x|_X` into the real line.
    pub fn norm(space: &SpaceDescriptor) -> Self {
        let s1 = space.clone();
        let s2 = space.clone();
        LipschitzMap {
            name: "norm".into(),
            source: space.clone(),
            target: SpaceDescriptor::scalar(),
            lipschitz: 1.0,
            rule: Arc::new(move |x: &[f64]| vec![s1.norm_unchecked(x)]),
            onesided: Some(Arc::new(move |x: &[f64], v: &[f64]| {
                let r = banach::one_sided_unchecked(&s2, x, v);
                (vec![r.plus], vec![r.minus])
            })),
        }
    }

    /// The lattice modulus `v -> |v|`, one-sided derivatives `(sign v) w +- P_{|v|^d}|w|`.
    pub fn lattice_abs(space: &SpaceDescriptor) -> Result<Self> {
        if !space.lattice_capable() {
            return Err(Error::Capability(format!("{space} has no lattice structure")));
        }
        let s = space.clone();
        Ok(LipschitzMap {
            name: "lattice_abs".into(),
            source: space.clone(),
            target: space.clone(),
            lipschitz: 1.0,
            rule: Arc::new(|x: &[f64]| x.iter().map(|v| v.abs()).collect()),
            onesided: Some(Arc::new(move |x: &[f64], v: &[f64]| {
                banach::abs_one_sided(&s, x, v).expect("conformance checked by caller")
            })),
        })
    }

    /// `x -> f(<x, x'>)` for a scalar Lipschitz `f`; the constant is `Lip(f) |x'|_{X'}`.
    pub fn scalar_of_functional<F>(
        space: &SpaceDescriptor,
        functional: Vec<f64>,
        f: F,
        f_lipschitz: f64,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let dual = banach::dual_norm(space, &functional)?;
        let s = space.clone();
        Ok(LipschitzMap {
            name: "scalar_of_functional".into(),
            source: space.clone(),
            target: SpaceDescriptor::scalar(),
            lipschitz: f_lipschitz * dual,
            rule: Arc::new(move |x: &[f64]| vec![f(banach::pairing_unchecked(&s, x, &functional))]),
            onesided: None,
        })
    }

    pub fn with_onesided(mut self, rule: OneSidedRule) -> Self {
        self.onesided = Some(rule);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub map: String,
    pub lipschitz: f64,
    pub pairs_checked: usize,
    pub max_pair_quotient: f64,
    /// Largest `|D_j(F o u)|_Y - L |D_j u|_X` over interior nodes.
    pub max_excess: f64,
    pub h: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Composes `F o u` nodewise after validating `F`'s Lipschitz constant on
/// seeded pairs drawn from the range of `u`, and checks the derivative bound
/// `|D_j (F o u)| <= L |D_j u| + C h` at interior nodes.
pub fn compose_lipschitz(map: &LipschitzMap, u: &GridFunction, seed: u64) -> Result<(GridFunction, CompositionReport)> {
    if u.space() != &map.source {
        return Err(Error::InvalidArgument(format!(
            "map {} expects {} but u takes values in {}",
            map.name,
            map.source,
            u.space()
        )));
    }
    let n = u.node_count();
    let images: Vec<Vec<f64>> = (0..n).map(|i| (map.rule)(u.value(i))).collect();
    if let Some(bad) = images.iter().position(|y| y.len() != map.target.dim()) {
        return Err(Error::DimensionMismatch {
            expected: map.target.dim(),
            got: images[bad].len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_pair_quotient = 0.0_f64;
    let mut pairs_checked = 0;
    let mut diff_x = vec![0.0; u.space().dim()];
    let mut diff_y = vec![0.0; map.target.dim()];
    if n >= 2 {
        for _ in 0..LIPSCHITZ_PAIRS {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                continue;
            }
            for (d, (x, y)) in diff_x.iter_mut().zip(u.value(a).iter().zip(u.value(b))) {
                *d = x - y;
            }
            for (d, (x, y)) in diff_y.iter_mut().zip(images[a].iter().zip(&images[b])) {
                *d = x - y;
            }
            let dx = u.space().norm_unchecked(&diff_x);
            let dy = map.target.norm_unchecked(&diff_y);
            pairs_checked += 1;
            let scale = u.space().norm_unchecked(u.value(a)) + u.space().norm_unchecked(u.value(b));
            if dy > map.lipschitz * dx * (1.0 + 1e-9) + 1e-14 * scale {
                return Err(Error::LipschitzViolation {
                    a,
                    b,
                    quotient: dy / dx,
                    constant: map.lipschitz,
                });
            }
            if dx > 0.0 {
                max_pair_quotient = max_pair_quotient.max(dy / dx);
            }
        }
    }

    let values: Vec<f64> = images.into_iter().flatten().collect();
    let composed = u.with_values(map.target.clone(), values)?;
    let du = u.finite_difference(Scheme::Central)?;
    let dfu = composed.finite_difference(Scheme::Central)?;
    let mut max_excess = f64::NEG_INFINITY;
    for j in 0..u.d() {
        for i in (0..n).filter(|&i| !du.is_one_sided(j, i)) {
            let lhs = map.target.norm_unchecked(dfu.component(j).value(i));
            let rhs = map.lipschitz * u.space().norm_unchecked(du.component(j).value(i));
            max_excess = max_excess.max(lhs - rhs);
        }
    }
    let h = u.max_spacing();
    let slack = h;
    Ok((
        composed,
        CompositionReport {
            map: map.name.clone(),
            lipschitz: map.lipschitz,
            pairs_checked,
            max_pair_quotient,
            max_excess,
            h,
            slack,
            pass: max_excess <= slack,
        },
    ))
}

/// Output of [`gateaux_chain_field`].
#[derive(Debug, Clone)]
pub struct GateauxReport {
    pub plus: DerivativeField,
    pub minus: DerivativeField,
    /// `flagged[j][node]`: the one-sided derivatives disagree there.
    pub flagged: Vec<Vec<bool>>,
    pub summary: GateauxSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateauxSummary {
    /// `sum_j |plus_j - minus_j|_{L^p}` over all nodes, divided by `|Omega|`.
    pub disagreement: f64,
    /// The same measured over non-flagged nodes only.
    pub disagreement_unflagged: f64,
    pub flagged_fraction: f64,
    /// `sum_j |plus_j - D_j(F o u)|_{L^p}` over non-flagged interior nodes.
    pub fd_discrepancy: f64,
    pub h: f64,
}

/// Evaluates `D^{+-}_{D_j u(xi)} F(u(xi))` at every node and compares both
/// fields with each other and with the finite difference of `F o u`.
pub fn gateaux_chain_field(map: &LipschitzMap, u: &GridFunction, p: Exponent) -> Result<GateauxReport> {
    let rule = map
        .onesided
        .as_ref()
        .ok_or_else(|| Error::Capability(format!("map {} has no one-sided derivative rule", map.name)))?;
    if u.space() != &map.source {
        return Err(Error::InvalidArgument(format!(
            "map {} expects {}",
            map.name, map.source
        )));
    }
    let n = u.node_count();
    let du = u.finite_difference(Scheme::Central)?;
    let composed = u.map(map.target.clone(), |x| (map.rule)(x))?;
    let dfu = composed.finite_difference(Scheme::Central)?;
    let ty = &map.target;
    let vol = u.cell_volume();

    let mut plus_c = Vec::with_capacity(u.d());
    let mut minus_c = Vec::with_capacity(u.d());
    let mut flagged = Vec::with_capacity(u.d());
    let mut disagreement = 0.0;
    let mut disagreement_unflagged = 0.0;
    let mut fd_discrepancy = 0.0;
    let mut flagged_count = 0usize;
    for j in 0..u.d() {
        let mut pv = Vec::with_capacity(n * ty.dim());
        let mut mv = Vec::with_capacity(n * ty.dim());
        let mut flags = vec![false; n];
        let mut gaps = Vec::with_capacity(n);
        let mut fd_err = Vec::new();
        for i in 0..n {
            let dir = du.component(j).value(i);
            let (a, b) = rule(u.value(i), dir);
            let gap_vec: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            let gap = ty.norm_unchecked(&gap_vec);
            let tol = PAIRING_TOLERANCE * (1.0 + u.space().norm_unchecked(dir));
            flags[i] = gap > tol;
            gaps.push(gap);
            if !flags[i] && !du.is_one_sided(j, i) {
                let e: Vec<f64> = a.iter().zip(dfu.component(j).value(i)).map(|(x, y)| x - y).collect();
                fd_err.push(ty.norm_unchecked(&e));
            }
            pv.extend_from_slice(&a);
            mv.extend_from_slice(&b);
        }
        flagged_count += flags.iter().filter(|f| **f).count();
        disagreement += lp_of_norms(gaps.iter().copied(), vol, p);
        disagreement_unflagged += lp_of_norms(gaps.iter().zip(&flags).filter(|(_, f)| !**f).map(|(g, _)| *g), vol, p);
        fd_discrepancy += lp_of_norms(fd_err, vol, p);
        plus_c.push(u.with_values(ty.clone(), pv)?);
        minus_c.push(u.with_values(ty.clone(), mv)?);
        flagged.push(flags);
    }
    let measure = u.domain().measure();
    let spacings = u.spacings();
    Ok(GateauxReport {
        plus: DerivativeField::new(plus_c, Scheme::Central, spacings.clone()),
        minus: DerivativeField::new(minus_c, Scheme::Central, spacings),
        flagged,
        summary: GateauxSummary {
            disagreement: disagreement / measure,
            disagreement_unflagged: disagreement_unflagged / measure,
            flagged_fraction: flagged_count as f64 / (n * u.d()) as f64,
            fd_discrepancy,
            h: u.max_spacing(),
        },
    })
}
