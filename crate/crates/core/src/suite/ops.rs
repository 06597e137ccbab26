use serde_json::{json, Value};

use super::config::EntrySpec;
use crate::banach::{Exponent, SpaceDescriptor};
use crate::calculus::{
    abs_derivative_field, compose_lipschitz, dq_criterion, gateaux_chain_field, holder_beta, norm_derivative_field,
    pos_derivative_field, product_rule_check, quotient_rule_field, stampacchia_check, CriterionVerdict, HolderOptions,
    LipschitzMap,
};
use crate::corpus::{self, scalar_probes, smooth_vector, Sample};
use crate::counterexamples::{c0_sine_witness, ck_pospart_witness, indicator_path, indicator_path_witness};
use crate::error::{Error, Result};
use crate::fit::ConvergenceReport;
use crate::gridfn::{BoxDomain, GridFunction, GridSpec};
use crate::theorems::{
    aubin_lions_probe, compact_family, coordinate_functionals, embedding_check, embedding_constant_transfer,
    first_dirichlet_eigenvalue, ideal_property_check, indicator_control_family, mollifier_family_check, morrey_check,
    norm_map_continuity_check, perturbation_sequence, poincare_check, random_operator, rotation_sequence,
    w0_membership, weak_w0_check, TensorExtension, TensorOptions,
};

/// Parameters and seed of one entry.
pub(crate) struct Ctx<'a> {
    pub spec: &'a EntrySpec,
    pub index: usize,
    pub seed: u64,
    pub refine: Option<usize>,
}

/// Metric values in catalog order plus free-form details.
pub(crate) struct Outcome {
    pub metrics: Vec<(&'static str, f64)>,
    pub details: Value,
}

impl Ctx<'_> {
    fn bad(&self, key: &str, msg: impl std::fmt::Display) -> Error {
        Error::Config {
            pointer: format!("/suite/{}/params/{key}", self.index),
            message: msg.to_string(),
        }
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.spec.params.get(key)
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| self.bad(key, "expected a number")),
        }
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .filter(|x| *x > 0)
                .ok_or_else(|| self.bad(key, "expected a positive integer")),
        }
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) if !a.is_empty() => a
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| self.bad(key, "expected numbers")))
                .collect(),
            Some(_) => Err(self.bad(key, "expected a non-empty list of numbers")),
        }
    }

    fn exponent_of(&self, key: &str, v: &Value) -> Result<Exponent> {
        serde_json::from_value::<Exponent>(v.clone()).map_err(|e| self.bad(key, e))
    }

    fn exponent(&self, key: &str, default: Exponent) -> Result<Exponent> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => self.exponent_of(key, v),
        }
    }

    fn exponent_list(&self, key: &str, default: &[Exponent]) -> Result<Vec<Exponent>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) if !a.is_empty() => a.iter().map(|v| self.exponent_of(key, v)).collect(),
            Some(v) => Ok(vec![self.exponent_of(key, v)?]),
        }
    }

    /// A refinement ladder. Without an explicit list, `--refine k` extends
    /// the default ladder's recurrence `n_{i+1} = 2 n_i + c` to `k` levels.
    fn ladder(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        if let Some(v) = self.raw(key) {
            let list: Vec<usize> = match v {
                Value::Array(a) => a
                    .iter()
                    .map(|x| x.as_u64().map(|n| n as usize).filter(|n| *n >= 2))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| self.bad(key, "expected integers >= 2"))?,
                _ => return Err(self.bad(key, "expected a list of integers")),
            };
            if list.len() < 2 || list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(self.bad(key, "ladder must be increasing with at least two levels"));
            }
            return Ok(list);
        }
        match self.refine {
            Some(k) if default.len() >= 2 => {
                let c = default[1] as i64 - 2 * default[0] as i64;
                let mut out = vec![default[0]];
                while out.len() < k.max(2) {
                    let last = *out.last().expect("non-empty") as i64;
                    out.push((2 * last + c) as usize);
                }
                Ok(out)
            }
            _ => Ok(default.to_vec()),
        }
    }

    fn space(&self, default: SpaceDescriptor) -> Result<SpaceDescriptor> {
        match &self.spec.space {
            Some(s) => s.build(),
            None => Ok(default),
        }
    }

    fn sample_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }

    /// Samples named by the entry: a corpus, `corpus/name`, or `smooth`.
    fn samples(
        &self,
        default: &str,
        smooth_space: SpaceDescriptor,
        smooth_count: usize,
    ) -> Result<Vec<(Sample, Option<bool>)>> {
        let which = self.spec.sample.as_deref().unwrap_or(default);
        let bad = |msg: String| Error::Config {
            pointer: format!("/suite/{}/sample", self.index),
            message: msg,
        };
        if which == "smooth" {
            let sp = self.space(smooth_space)?;
            let count = self.usize("count", smooth_count)?;
            let dom = BoxDomain::unit(1);
            return Ok((0..count)
                .map(|i| {
                    (
                        smooth_vector(&format!("smooth-{i}"), &dom, &sp, self.sample_seed(i)),
                        None,
                    )
                })
                .collect());
        }
        let (corpus, name) = match which.split_once('/') {
            Some((c, n)) => (c, Some(n)),
            None => (which, None),
        };
        let all: Vec<(Sample, Option<bool>)> = match corpus {
            "norm_chain" => corpus::norm_chain_corpus().into_iter().map(|s| (s, None)).collect(),
            "lattice" => corpus::lattice_corpus().into_iter().map(|s| (s, None)).collect(),
            "c1" => corpus::c1_corpus().into_iter().map(|(s, _)| (s, None)).collect(),
            "w0" => corpus::w0_corpus().into_iter().map(|(s, m)| (s, Some(m))).collect(),
            "morrey" => corpus::morrey_corpus().into_iter().map(|s| (s, None)).collect(),
            _ => return Err(bad(format!("unknown sample {which:?}"))),
        };
        match name {
            None => Ok(all),
            Some(n) => {
                let picked: Vec<_> = all.into_iter().filter(|(s, _)| s.name == n).collect();
                if picked.is_empty() {
                    Err(bad(format!("no sample {n:?} in corpus {corpus:?}")))
                } else {
                    Ok(picked)
                }
            }
        }
    }
}

fn order(name: &str, points: Vec<(f64, f64)>) -> ConvergenceReport {
    ConvergenceReport::new(name, points, 0.0)
}

fn min_order(reports: &[ConvergenceReport]) -> f64 {
    reports
        .iter()
        .map(|r| r.fitted_order)
        .fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) })
}

fn bool_count<I: IntoIterator<Item = bool>>(it: I) -> f64 {
    it.into_iter().filter(|b| *b).count() as f64
}

pub(crate) fn run(op: &str, ctx: &Ctx) -> Result<Outcome> {
    match op {
        "dq_criterion" => dq(ctx),
        "compose_lipschitz" => compose(ctx),
        "gateaux_chain_field" => gateaux(ctx),
        "norm_derivative_field" => norm_field(ctx),
        "abs_derivative_field" => lattice(ctx, false),
        "pos_derivative_field" => lattice(ctx, true),
        "quotient_rule_field" => quotient(ctx),
        "product_rule_check" => product(ctx),
        "stampacchia_check" => stampacchia(ctx),
        "holder_beta" => holder(ctx),
        "embedding_check" => embedding(ctx),
        "morrey_check" => morrey(ctx),
        "poincare_check" => poincare(ctx),
        "w0_membership" => w0(ctx),
        "weak_w0_check" => weak_w0(ctx),
        "ideal_property_check" => ideal(ctx),
        "norm_map_continuity_check" => continuity(ctx),
        "aubin_lions_probe" => aubin_lions(ctx),
        "mollifier_family_check" => mollifier(ctx),
        "tensor_extend" => tensor(ctx),
        "indicator_path_witness" => indicator(ctx),
        "c0_sine_witness" => c0(ctx),
        "ck_pospart_witness" => ck(ctx),
        _ => Err(Error::InvalidArgument(format!("unknown op {op:?}"))),
    }
}

fn dq(ctx: &Ctx) -> Result<Outcome> {
    let levels = ctx.ladder("levels", &[32, 64, 128, 256])?;
    let exact: Vec<(String, f64)> = corpus::c1_corpus().into_iter().map(|(s, e)| (s.name, e)).collect();
    let mut reports = Vec::new();
    for (s, _) in ctx.samples("c1", SpaceDescriptor::hilbert(2)?, 3)? {
        let oracle = exact
            .iter()
            .find(|(n, _)| *n == s.name)
            .map(|(_, e)| *e)
            .ok_or_else(|| Error::InvalidArgument(format!("sample {} has no analytic derivative norm", s.name)))?;
        let mut pts = Vec::new();
        for &n in &levels {
            let u = s.grid(n)?;
            let c = dq_criterion(&u, Exponent::Finite(2.0), &[1])?.c_est;
            pts.push((u.max_spacing(), (c - oracle).abs()));
        }
        reports.push(order(&s.name, pts));
    }
    let r = ctx.exponent("r", Exponent::Finite(2.0))?;
    let grid = ctx.usize("grid", 256)?;
    let path = indicator_path(r, grid, grid)?;
    let ind = dq_criterion(&path, Exponent::Finite(2.0), &[1, 2, 4, 8])?;
    let expected = match r {
        Exponent::Infinity => -1.0,
        Exponent::Finite(q) => 1.0 / q - 1.0,
    };
    let slope = ind.slope.unwrap_or(f64::NAN);
    Ok(Outcome {
        metrics: vec![
            ("c1_min_order", min_order(&reports)),
            ("indicator_slope_deviation", (slope - expected).abs()),
            (
                "indicator_divergent",
                (ind.verdict == CriterionVerdict::Divergent) as u8 as f64,
            ),
        ],
        details: json!({ "c1": reports, "indicator": ind }),
    })
}

fn compose(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 64)?;
    let count = ctx.usize("count", 4)?;
    let spaces = match &ctx.spec.space {
        Some(s) => vec![s.build()?],
        None => vec![
            SpaceDescriptor::hilbert(3)?,
            SpaceDescriptor::finite_lr(3, 1.0)?,
            SpaceDescriptor::sampled_sup(3)?,
            SpaceDescriptor::grid_lr(4, 1.5)?,
        ],
    };
    let dom = BoxDomain::unit(1);
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (si, sp) in spaces.iter().enumerate() {
        let mut maps = vec![LipschitzMap::identity(sp), LipschitzMap::norm(sp)];
        if sp.lattice_capable() {
            maps.push(LipschitzMap::lattice_abs(sp)?);
        }
        let functional: Vec<f64> = (0..sp.dim()).map(|s| if s % 2 == 0 { 1.0 } else { -0.5 }).collect();
        maps.push(LipschitzMap::scalar_of_functional(sp, functional, f64::sin, 1.0)?);
        for i in 0..count {
            let u = smooth_vector("u", &dom, sp, ctx.sample_seed(100 * si + i)).grid(n)?;
            for map in &maps {
                let pass = match compose_lipschitz(map, &u, ctx.sample_seed(i)) {
                    Ok((_, rep)) => {
                        rows.push(json!({ "space": sp.to_string(), "map": rep.map, "max_pair_quotient": rep.max_pair_quotient, "lipschitz": rep.lipschitz, "pass": rep.pass }));
                        rep.pass
                    }
                    Err(Error::LipschitzViolation { .. }) => false,
                    Err(e) => return Err(e),
                };
                failures += !pass as usize;
            }
        }
    }
    Ok(Outcome {
        metrics: vec![("failures", failures as f64)],
        details: json!({ "compositions": rows }),
    })
}

fn gateaux(ctx: &Ctx) -> Result<Outcome> {
    let levels = ctx.ladder("levels", &[31, 63, 127, 255])?;
    let sp = SpaceDescriptor::finite_lr(2, 1.0)?;
    let map = LipschitzMap::norm(&sp);
    let mut rows = Vec::new();
    for &n in &levels {
        let u = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n)?, sp.clone(), |t| {
            vec![t[0] - 0.5, (3.0 * t[0]).cos()]
        })?;
        rows.push(gateaux_chain_field(&map, &u, Exponent::Finite(1.0))?.summary);
    }
    let increases = rows
        .windows(2)
        .filter(|w| w[1].disagreement >= w[0].disagreement)
        .count();
    let unflagged = rows.iter().map(|r| r.disagreement_unflagged).fold(0.0, f64::max);
    Ok(Outcome {
        metrics: vec![
            ("increases", increases as f64),
            ("max_unflagged_disagreement", unflagged),
        ],
        details: json!({ "levels": levels, "summaries": rows }),
    })
}

fn norm_field(ctx: &Ctx) -> Result<Outcome> {
    let levels = ctx.ladder("levels", &[32, 64, 128, 256])?;
    let mut reports = Vec::new();
    let mut violations = 0usize;
    for (s, _) in ctx.samples("norm_chain", SpaceDescriptor::hilbert(2)?, 5)? {
        let mut pts = Vec::new();
        for &n in &levels {
            let r = norm_derivative_field(&s.grid(n)?)?;
            violations += r.estimate_violations;
            pts.push((r.h, r.discrepancy));
        }
        reports.push(order(&s.name, pts));
    }
    let circle = corpus::norm_chain_corpus()
        .into_iter()
        .find(|s| s.name == "hilbert-circle")
        .expect("corpus has the circle");
    let n = *levels.last().expect("non-empty");
    let u = circle.grid(n)?;
    let r = norm_derivative_field(&u)?;
    let du = u.finite_difference(crate::gridfn::Scheme::Central)?;
    let interior: Vec<usize> = (0..u.node_count()).filter(|&i| u.is_interior(i)).collect();
    let lhs = interior
        .iter()
        .map(|&i| r.field.component(0).value(i)[0].abs())
        .fold(0.0, f64::max);
    let rhs = interior
        .iter()
        .map(|&i| u.space().norm_unchecked(du.component(0).value(i)))
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        metrics: vec![
            ("min_order", min_order(&reports)),
            ("estimate_violations", violations as f64),
            ("circle_max_lhs", lhs),
            ("circle_min_rhs", rhs),
        ],
        details: json!({ "discrepancy": reports, "circle": { "n": n, "max_lhs": lhs, "min_rhs": rhs } }),
    })
}

fn lattice(ctx: &Ctx, pos: bool) -> Result<Outcome> {
    let levels = ctx.ladder("levels", &[32, 64, 128, 256])?;
    let mut reports = Vec::new();
    let mut half_sum_failures = 0usize;
    for (s, _) in ctx.samples("lattice", SpaceDescriptor::finite_lr(3, 2.0)?, 5)? {
        let mut pts = Vec::new();
        let mut ok = true;
        for &n in &levels {
            let u = s.grid(n)?;
            let r = if pos {
                pos_derivative_field(&u)?
            } else {
                abs_derivative_field(&u)?
            };
            ok &= r.half_sum_identity;
            pts.push((r.h, r.consistency_error));
        }
        half_sum_failures += !ok as usize;
        reports.push(order(&s.name, pts));
    }
    let mut metrics = vec![("min_order", min_order(&reports))];
    if pos {
        metrics.push(("half_sum_failures", half_sum_failures as f64));
    }
    Ok(Outcome {
        metrics,
        details: json!({ "consistency": reports }),
    })
}

fn quotient(ctx: &Ctx) -> Result<Outcome> {
    let levels = ctx.ladder("levels", &[64, 128, 256])?;
    let sp = SpaceDescriptor::hilbert(2)?;
    let mut pts = Vec::new();
    let mut terms = Vec::new();
    for &n in &levels {
        let (d, g) = (BoxDomain::unit(1), GridSpec::uniform(1, n)?);
        let u = GridFunction::sample(d.clone(), g.clone(), sp.clone(), |t| {
            vec![2.0 + t[0], (3.0 * t[0]).sin()]
        })?;
        let phi = GridFunction::sample_scalar(d, g, |t| (std::f64::consts::PI * t[0]).sin().powi(2))?;
        let r = quotient_rule_field(&u, &phi)?;
        pts.push((r.h, r.discrepancy));
        terms.push((r.first_term, r.second_term));
    }
    let rep = order("quotient rule", pts);
    Ok(Outcome {
        metrics: vec![("order", rep.fitted_order)],
        details: json!({ "discrepancy": rep, "terms": terms }),
    })
}

fn product(ctx: &Ctx) -> Result<Outcome> {
    let levels = ctx.ladder("levels", &[32, 64, 128, 256])?;
    let mut failures = 0usize;
    let mut rows = Vec::new();
    for (s, _) in ctx.samples("smooth", SpaceDescriptor::finite_lr(3, 1.5)?, 5)? {
        for &n in &levels {
            let u = s.grid(n)?;
            let psi = GridFunction::sample_scalar(u.domain().clone(), u.grid().clone(), |x| {
                x.iter().map(|t| (std::f64::consts::PI * t).sin().powi(2)).product()
            })?;
            let r = product_rule_check(&u, &psi)?;
            failures += !r.pass as usize;
            rows.push(json!({ "sample": s.name, "n": n, "report": r }));
        }
    }
    Ok(Outcome {
        metrics: vec![("failures", failures as f64)],
        details: json!({ "rows": rows }),
    })
}

fn stampacchia(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 256)?;
    let m = 8;
    let left = |s: usize| (s as f64 + 0.5) / (m as f64) < 0.5;
    let sp = SpaceDescriptor::grid_lr(m, 2.0)?;
    let w: Vec<f64> = (0..m).map(|s| if left(s) { 0.0 } else { 1.0 }).collect();
    let line = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n)?, sp.clone(), |t| {
        (0..m)
            .map(|s| if left(s) { (3.0 * t[0] + s as f64).sin() } else { 0.0 })
            .collect()
    })?;
    let nn = (n / 8).max(8);
    let square = GridFunction::sample(BoxDomain::unit(2), GridSpec::uniform(2, nn)?, sp, |x| {
        (0..m)
            .map(|s| if left(s) { x[0] * x[1] - 0.25 * s as f64 } else { 0.0 })
            .collect()
    })?;
    let l1 = SpaceDescriptor::finite_lr(3, 1.0)?;
    let flat = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n)?, l1, |t| {
        vec![t[0].cos(), 0.0, (t[0] - 0.5).powi(2)]
    })?;
    let reports = vec![
        stampacchia_check(&line, &w)?,
        stampacchia_check(&square, &w)?,
        stampacchia_check(&flat, &[0.0, 2.0, 0.0])?,
    ];
    let failures = bool_count(reports.iter().map(|r| !r.pass));
    Ok(Outcome {
        metrics: vec![("failures", failures)],
        details: json!({ "reports": reports }),
    })
}

fn holder(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 1024)?;
    let sp = SpaceDescriptor::hilbert(2)?;
    let g = GridSpec::uniform(1, n)?;
    let opts = HolderOptions {
        seed: ctx.seed,
        ..HolderOptions::default()
    };
    let circle = GridFunction::sample(BoxDomain::unit(1), g.clone(), sp.clone(), |t| {
        vec![t[0].cos(), t[0].sin()]
    })?;
    let c = holder_beta(&circle, 1.0, opts)?;
    let sqrt = GridFunction::sample(BoxDomain::unit(1), g, sp, |t| {
        vec![0.6 * t[0].sqrt(), 0.8 * t[0].sqrt()]
    })?;
    let s = holder_beta(&sqrt, 0.5, opts)?;
    Ok(Outcome {
        metrics: vec![
            ("circle_lipschitz_excess", c.beta - 1.0),
            ("sqrt_rel_error", (s.beta - 1.0).abs()),
        ],
        details: json!({ "circle": c, "sqrt": s }),
    })
}

fn embedding(ctx: &Ctx) -> Result<Outcome> {
    let p = ctx.exponent("p", Exponent::Finite(2.0))?;
    let r = ctx.exponent("r", Exponent::Finite(4.0))?;
    let n = ctx.usize("n", 64)?;
    let samples = ctx.samples("smooth", SpaceDescriptor::sampled_sup(3)?, 100)?;
    let dom = samples
        .first()
        .map(|(s, _)| s.domain.clone())
        .unwrap_or_else(|| BoxDomain::unit(1));
    let probes = scalar_probes(&dom, 10, ctx.seed);
    let grids = samples.iter().map(|(s, _)| s.grid(n)).collect::<Result<Vec<_>>>()?;
    let mut max_ratio = 0.0_f64;
    let mut ratios = Vec::new();
    for u in &grids {
        let rep = embedding_check(u, p, r, &probes)?;
        max_ratio = max_ratio.max(rep.ratio);
        ratios.push(rep.ratio);
    }
    let sp = grids
        .first()
        .map(|u| u.space().clone())
        .unwrap_or(SpaceDescriptor::sampled_sup(3)?);
    let x0: Vec<f64> = (0..sp.dim()).map(|s| 1.0 / (1.0 + s as f64)).collect();
    let transfer = if grids.is_empty() {
        None
    } else {
        Some(embedding_constant_transfer(
            &grids[..grids.len().min(10)],
            &x0,
            &probes,
            p,
            r,
        )?)
    };
    let transfer_error = transfer.as_ref().map_or(0.0, |t| (t.ratio - 1.0).abs());
    Ok(Outcome {
        metrics: vec![("max_ratio", max_ratio), ("transfer_error", transfer_error)],
        details: json!({ "ratios": ratios, "transfer": transfer }),
    })
}

fn morrey(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 2048)?;
    let p = Exponent::Finite(2.0);
    let opts = HolderOptions {
        seed: ctx.seed,
        ..HolderOptions::default()
    };
    let mut rows = Vec::new();
    let mut max_quotient = 0.0_f64;
    let mut measured_failures = 0usize;
    let mut sqrt_error = f64::NAN;
    for (s, _) in ctx.samples("morrey", SpaceDescriptor::hilbert(2)?, 5)? {
        if s.d() != 1 {
            return Err(Error::InvalidArgument(format!(
                "sample {} is not one-dimensional",
                s.name
            )));
        }
        let u = s.grid(n)?;
        let unit = morrey_check(&u, p, Some(1.0), &[], opts)?;
        let probes = scalar_probes(&s.domain, 5, ctx.seed);
        let measured = morrey_check(&u, p, None, &probes, opts)?;
        let q = if unit.w_norm == 0.0 {
            0.0
        } else {
            unit.holder.beta / unit.w_norm
        };
        max_quotient = max_quotient.max(q);
        measured_failures += !measured.pass as usize;
        if s.name == "sqrt" {
            let x0 = u.space().norm_unchecked(&[0.6, 0.8]);
            sqrt_error = (unit.holder.beta - x0).abs() / x0;
        }
        rows.push(json!({ "sample": s.name, "beta": unit.holder.beta, "w_norm": unit.w_norm, "quotient": q, "measured_constant": measured.constant }));
    }
    if sqrt_error.is_nan() && ctx.spec.sample.is_some() {
        sqrt_error = 0.0;
    }
    Ok(Outcome {
        metrics: vec![
            ("max_quotient", max_quotient),
            ("sqrt_rel_error", sqrt_error),
            ("measured_failures", measured_failures as f64),
        ],
        details: json!({ "n": n, "rows": rows }),
    })
}

fn poincare(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 512)?;
    let tol = ctx.f64("tolerance", 0.01)?;
    let pi = std::f64::consts::PI;
    let lambda = first_dirichlet_eigenvalue(n, 1.0)?;
    let eigen_rel_error = (lambda - pi * pi).abs() / (pi * pi);
    let sp = SpaceDescriptor::hilbert(2)?;
    let sine = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n)?, sp, |t| {
        let s = (pi * t[0]).sin();
        vec![0.6 * s, 0.8 * s]
    })?;
    let eig = poincare_check(&sine, Exponent::Finite(2.0), 0, tol)?;
    let mut margin = f64::INFINITY;
    let mut rows = Vec::new();
    for (s, member) in ctx.samples("w0", SpaceDescriptor::hilbert(2)?, 5)? {
        if member == Some(false) {
            continue;
        }
        let cells = if s.d() == 1 { n } else { (n / 4).max(16) };
        let u = s.grid(cells)?;
        for j in 0..u.d() {
            let r = poincare_check(&u, Exponent::Finite(2.0), j, tol)?;
            let m = if r.precondition.member {
                r.ratio / r.constant
            } else {
                0.0
            };
            margin = margin.min(m);
            rows.push(json!({ "sample": s.name, "axis": j, "ratio": r.ratio, "constant": r.constant, "pass": r.pass }));
        }
    }
    Ok(Outcome {
        metrics: vec![
            ("eigen_rel_error", eigen_rel_error),
            ("min_margin", margin),
            ("eigenfunction_rel_error", (eig.ratio - pi).abs() / pi),
        ],
        details: json!({ "n": n, "lambda": lambda, "eigenfunction_ratio": eig.ratio, "members": rows }),
    })
}

fn w0(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 64)?;
    let levels = ctx.ladder("levels", &[16, 32, 64, 128])?;
    let p = Exponent::Finite(2.0);
    let mut disagreements = 0usize;
    let mut label_errors = 0usize;
    let mut decay = Vec::new();
    let mut rows = Vec::new();
    for (s, label) in ctx.samples("w0", SpaceDescriptor::hilbert(2)?, 5)? {
        let u = s.grid(n)?;
        let strong = w0_membership(&u, p, None)?;
        let weak = weak_w0_check(&u, p, &coordinate_functionals(u.space()), None)?;
        let agree = strong.member == strong.scalar_member && strong.member == weak.member;
        disagreements += !agree as usize;
        if let Some(l) = label {
            label_errors += (l != strong.member) as usize;
        }
        if label.unwrap_or(strong.member) {
            let pts = levels
                .iter()
                .map(|&k| {
                    let r = w0_membership(&s.grid(k)?, p, None)?;
                    Ok((r.h, r.boundary_norm))
                })
                .collect::<Result<Vec<_>>>()?;
            decay.push(order(&s.name, pts));
        }
        rows.push(json!({
            "sample": s.name, "expected": label, "member": strong.member,
            "scalar_member": strong.scalar_member, "weak_member": weak.member,
            "boundary_norm": strong.boundary_norm, "threshold": strong.threshold,
        }));
    }
    let min_member_order = if decay.is_empty() {
        f64::INFINITY
    } else {
        min_order(&decay)
    };
    Ok(Outcome {
        metrics: vec![
            ("disagreements", disagreements as f64),
            ("label_errors", label_errors as f64),
            ("min_member_order", min_member_order),
        ],
        details: json!({ "n": n, "samples": rows, "member_decay": decay }),
    })
}

fn weak_w0(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 64)?;
    let p = Exponent::Finite(2.0);
    let mut disagreements = 0usize;
    for (s, _) in ctx.samples("w0", SpaceDescriptor::hilbert(2)?, 5)? {
        let u = s.grid(n)?;
        disagreements += !weak_w0_check(&u, p, &coordinate_functionals(u.space()), None)?.agree as usize;
    }
    let sp = SpaceDescriptor::finite_lr(3, 2.0)?;
    let witness = GridFunction::sample(BoxDomain::unit(1), GridSpec::uniform(1, n)?, sp.clone(), |t| {
        let g = (std::f64::consts::PI * t[0]).sin();
        vec![g, 1.0 + t[0], -g]
    })?;
    let w = weak_w0_check(&witness, p, &coordinate_functionals(&sp), None)?;
    let witness_errors = (w.failing != [1]) as u8 as f64;
    Ok(Outcome {
        metrics: vec![
            ("disagreements", disagreements as f64),
            ("witness_errors", witness_errors),
        ],
        details: json!({ "witness_failing": w.failing, "witness_member": w.member }),
    })
}

fn ideal(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 64)?;
    let p = Exponent::Finite(2.0);
    let y = SpaceDescriptor::hilbert(3)?;
    let y0 = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
    let mut failures = 0usize;
    let mut rows = Vec::new();
    for (s, member) in ctx.samples("w0", SpaceDescriptor::hilbert(2)?, 5)? {
        if member == Some(false) {
            continue;
        }
        let u = s.grid(if s.d() == 1 { n } else { n / 2 })?;
        let half = u.scale(0.5);
        let moved = u
            .pointwise_norms()
            .map(y.clone(), |a| y0.iter().map(|c| a[0] * c).collect())?;
        let k = u.space().dim();
        let masked = u.map(u.space().clone(), |x| {
            x.iter()
                .enumerate()
                .map(|(s, v)| if s < k / 2 { *v } else { 0.0 })
                .collect()
        })?;
        for (kind, v) in [("half", half), ("transplanted", moved), ("masked", masked)] {
            let r = ideal_property_check(&u, &v, p, None)?;
            failures += !r.pass as usize;
            rows.push(json!({ "sample": s.name, "v": kind, "pass": r.pass }));
        }
    }
    Ok(Outcome {
        metrics: vec![("failures", failures as f64)],
        details: json!({ "rows": rows }),
    })
}

fn continuity(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 128)?;
    let p = Exponent::Finite(2.0);
    let dom = BoxDomain::unit(1);
    let sp = ctx.space(SpaceDescriptor::hilbert(2)?)?;
    let u = smooth_vector("u", &dom, &sp, ctx.seed).grid(n)?;
    let w = smooth_vector("w", &dom, &sp, ctx.seed.wrapping_add(1)).grid(n)?;
    let mut reports = vec![
        ("constant", norm_map_continuity_check(&u, &vec![u.clone(); 4], p)?),
        (
            "perturbed",
            norm_map_continuity_check(&u, &perturbation_sequence(&u, &w, &[1.0, 2.0, 4.0, 8.0, 16.0])?, p)?,
        ),
    ];
    if sp.kind() == crate::banach::SpaceKind::Hilbert {
        let seq = rotation_sequence(&u, &[1.0, 0.5, 0.25, 0.125])?;
        reports.push(("rotated", norm_map_continuity_check(&u, &seq, p)?));
    }
    let failures = bool_count(reports.iter().map(|(_, r)| !r.pass));
    let details: Vec<Value> = reports
        .iter()
        .map(|(k, r)| json!({ "sequence": k, "report": r }))
        .collect();
    Ok(Outcome {
        metrics: vec![("failures", failures)],
        details: json!(details),
    })
}

fn aubin_lions(ctx: &Ctx) -> Result<Outcome> {
    let members = ctx.usize("members", 400)?;
    let levels = ctx
        .refine
        .filter(|_| ctx.raw("levels").is_none())
        .map_or(ctx.usize("levels", 4), Ok)?;
    let eps = ctx.f64_list("eps", &[0.05, 0.1, 0.2])?;
    let p = Exponent::Finite(2.0);
    let compact = aubin_lions_probe(&compact_family(members, levels, ctx.seed, true)?, p, &eps, 1.0)?;
    let growth = (0..eps.len())
        .map(|e| {
            let c = compact.counts_at(e);
            c.iter().copied().max().unwrap_or(0) as f64 / c[0].max(1) as f64
        })
        .fold(0.0, f64::max);
    let control = aubin_lions_probe(&indicator_control_family(levels, 2.0)?, p, &[0.1], 1.0)?;
    Ok(Outcome {
        metrics: vec![("compact_max_growth", growth), ("control_growth", control.growth(0))],
        details: json!({ "compact": compact, "control": control }),
    })
}

fn mollifier(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.usize("n", 128)?;
    let p = ctx.exponent("p", Exponent::Finite(2.0))?;
    let levels = ctx.ladder("levels", &[4, 8, 16, 32])?;
    let fam = ctx
        .samples("smooth", SpaceDescriptor::hilbert(2)?, 20)?
        .iter()
        .map(|(s, _)| s.grid(n))
        .collect::<Result<Vec<_>>>()?;
    let r = mollifier_family_check(&fam, &levels, p)?;
    let bound_failures = bool_count(r.levels.iter().map(|l| l.sup_error > l.bound * (1.0 + 1e-9)));
    Ok(Outcome {
        metrics: vec![
            ("monotone_failures", (!r.monotone) as u8 as f64),
            ("bound_failures", bound_failures),
            ("order", r.convergence.fitted_order),
        ],
        details: json!(r),
    })
}

fn tensor(ctx: &Ctx) -> Result<Outcome> {
    let matrices = ctx.usize("matrices", 50)?;
    let max_size = ctx.usize("max_size", 32)?.max(2);
    let h_dim = ctx.usize("h_dim", 3)?;
    let certify = ctx.usize("certify_samples", 10_000)?;
    let others = ctx.exponent_list(
        "other_p",
        &[
            Exponent::Finite(1.0),
            Exponent::Finite(1.5),
            Exponent::Finite(3.0),
            Exponent::Infinity,
        ],
    )?;
    let mut max_gap = 0.0_f64;
    let mut mismatches = 0usize;
    let mut rows = Vec::new();
    for i in 0..matrices {
        // sizes sweep 2..=max_size, largest first
        let m = max_size - (i * 7) % (max_size - 1);
        let seed = ctx.sample_seed(i);
        let ext = TensorExtension::new(random_operator(m, seed), h_dim)?;
        let opts = TensorOptions {
            seed,
            certify_samples: certify,
            ..TensorOptions::default()
        };
        let r = ext.norm_report(Exponent::Finite(2.0), opts)?;
        let gap = (r.extended_norm - r.scalar_norm).abs() / r.scalar_norm.max(f64::MIN_POSITIVE);
        max_gap = max_gap.max(gap);

        let f = GridFunction::sample_scalar(BoxDomain::unit(1), GridSpec::uniform(1, m)?, |t| {
            (7.0 * t[0] + i as f64).sin()
        })?;
        let x: Vec<f64> = (0..h_dim).map(|s| [1.0, 0.5, -2.0, 0.25][s % 4]).collect();
        let fx = f.map(SpaceDescriptor::hilbert(h_dim)?, |v| {
            x.iter().map(|b| v[0] * b).collect()
        })?;
        let (a, b) = (ext.apply(&fx)?, ext.apply_tensor(&f, &x)?);
        mismatches += a
            .values()
            .iter()
            .zip(b.values())
            .filter(|(s, t)| s.to_bits() != t.to_bits())
            .count();
        rows.push(json!({ "size": m, "norm": r.scalar_norm, "extended": r.extended_norm, "residual": r.power_residual, "iterations": r.power_iterations }));
    }
    let mut cert = Vec::new();
    for (k, &p) in others.iter().enumerate() {
        let seed = ctx.sample_seed(1000 + k);
        let ext = TensorExtension::new(random_operator(8, seed), h_dim)?;
        let opts = TensorOptions {
            seed,
            certify_samples: certify,
            ..TensorOptions::default()
        };
        cert.push(ext.norm_report(p, opts)?);
    }
    let certification_failures = bool_count(cert.iter().map(|r| !r.pass));
    Ok(Outcome {
        metrics: vec![
            ("max_rel_gap", max_gap),
            ("bit_mismatches", mismatches as f64),
            ("certification_failures", certification_failures),
        ],
        details: json!({ "hilbert": rows, "certified": cert }),
    })
}

fn indicator(ctx: &Ctx) -> Result<Outcome> {
    let rs = ctx.exponent_list("r", &[Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity])?;
    let grid = ctx.usize("grid", 4096)?;
    let default_h: Vec<f64> = (4..=10).map(|k| 0.5f64.powi(k)).collect();
    let hs = ctx.f64_list("h", &default_h)?;
    let mut max_dev = 0.0_f64;
    let mut unexpected = 0usize;
    let mut tables = Vec::new();
    for r in rs {
        let w = indicator_path_witness(r, &hs, grid, 0.25)?;
        max_dev = max_dev.max(w.signature[0].value);
        unexpected += !w.pass() as usize;
        tables.push(json!({ "r": r, "table": w }));
    }
    Ok(Outcome {
        metrics: vec![("max_slope_deviation", max_dev), ("unexpected", unexpected as f64)],
        details: json!(tables),
    })
}

fn c0(ctx: &Ctx) -> Result<Outcome> {
    let ns: Vec<usize> = ctx
        .f64_list("n", &[100.0, 1000.0, 10000.0])?
        .iter()
        .map(|v| *v as usize)
        .collect();
    let ts = ctx.f64_list("t", &[0.5, 1.0, 2.0])?;
    let w = c0_sine_witness(&ns, &ts)?;
    let min_tail = w.rows.iter().map(|r| r.measured).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        metrics: vec![("min_tail_sup", min_tail), ("unexpected", (!w.pass()) as u8 as f64)],
        details: json!(w),
    })
}

fn ck(ctx: &Ctx) -> Result<Outcome> {
    let hs = ctx.f64_list("h", &[1e-2, 3e-3, 1e-3])?;
    let grid = ctx.usize("grid", 100_001)?;
    let w = ck_pospart_witness(&hs, grid, 1.0 / 3.0)?;
    let h_min = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let distance = w
        .rows
        .iter()
        .find(|r| r.parameter == h_min)
        .map_or(f64::NAN, |r| r.measured);
    let contrast = w
        .positive
        .iter()
        .find(|c| c.name.starts_with("L^2 contrast at the smallest h"))
        .map_or(f64::NAN, |c| c.value);
    Ok(Outcome {
        metrics: vec![
            ("distance_at_min_h", distance),
            ("l2_contrast", contrast),
            ("unexpected", (!w.pass()) as u8 as f64),
        ],
        details: json!(w),
    })
}
