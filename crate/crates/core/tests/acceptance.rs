//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use sobolev_banach::calculus::{
    abs_derivative_field, dq_criterion, holder_beta, norm_derivative_field, pos_derivative_field, CriterionVerdict,
    HolderOptions,
};
use sobolev_banach::corpus::{c1_corpus, lattice_corpus, morrey_corpus, norm_chain_corpus, w0_corpus};
use sobolev_banach::counterexamples::{
    c0_sine_witness, ck_pospart_witness, indicator_path, indicator_path_witness, WitnessVerdict,
};
use sobolev_banach::fit::ConvergenceReport;
use sobolev_banach::suite::{run_suite, RunConfig, RunOverrides};
use sobolev_banach::theorems::{
    aubin_lions_probe, compact_family, coordinate_functionals, first_dirichlet_eigenvalue, indicator_control_family,
    poincare_check, random_operator, w0_membership, weak_w0_check, TensorExtension, TensorOptions,
};
use sobolev_banach::{BoxDomain, Exponent, GridFunction, GridSpec, Scheme, SpaceDescriptor};

const LEVELS: [usize; 4] = [32, 64, 128, 256];
const P2: Exponent = Exponent::Finite(2.0);

/// Outcome of one criterion: pass flag and a one-line measurement summary.
type Verdict = (bool, String);

type Criterion = (&'static str, fn() -> Verdict);

fn order(name: &str, pts: Vec<(f64, f64)>) -> f64 {
    ConvergenceReport::new(name, pts, 0.0).fitted_order
}

fn norm_chain_order() -> Verdict {
    let t = Instant::now();
    let corpus = norm_chain_corpus();
    let mut worst = (f64::INFINITY, String::new());
    for s in &corpus {
        let pts = LEVELS
            .iter()
            .map(|&n| {
                let r = norm_derivative_field(&s.grid(n).unwrap()).unwrap();
                (r.h, r.discrepancy)
            })
            .collect();
        let o = order(&s.name, pts);
        if !(o >= worst.0) {
            worst = (o, s.name.clone());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        corpus.len() == 30 && worst.0 >= 0.9 && secs < 120.0,
        format!(
            "{} samples, min order {:.3} ({}), {:.1}s",
            corpus.len(),
            worst.0,
            worst.1,
            secs
        ),
    )
}

fn norm_estimate() -> Verdict {
    let mut violations = 0;
    for s in norm_chain_corpus() {
        for &n in &LEVELS {
            violations += norm_derivative_field(&s.grid(n).unwrap()).unwrap().estimate_violations;
        }
    }
    let circle = norm_chain_corpus()
        .into_iter()
        .find(|s| s.name == "hilbert-circle")
        .unwrap();
    let u = circle.grid(256).unwrap();
    let r = norm_derivative_field(&u).unwrap();
    let du = u.finite_difference(Scheme::Central).unwrap();
    let (mut lhs, mut rhs_min, mut rhs_dev) = (0.0_f64, f64::INFINITY, 0.0_f64);
    for i in (0..u.node_count()).filter(|&i| u.is_interior(i) && !r.flagged[0][i]) {
        lhs = lhs.max(r.field.component(0).value(i)[0].abs());
        let d = du.component(0).value(i);
        let rhs = (d[0] * d[0] + d[1] * d[1]).sqrt();
        rhs_min = rhs_min.min(rhs);
        // |(cos t, sin t)'| = 1
        rhs_dev = rhs_dev.max((rhs - 1.0).abs());
    }
    (
        violations == 0 && lhs <= 1e-10 && rhs_dev <= 1e-2,
        format!("violations {violations}, circle max LHS {lhs:.2e}, min RHS {rhs_min:.6}"),
    )
}

fn lattice_rules() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut identity = true;
    for s in lattice_corpus() {
        let (mut a, mut p) = (Vec::new(), Vec::new());
        for &n in &LEVELS {
            let u = s.grid(n).unwrap();
            let ra = abs_derivative_field(&u).unwrap();
            let rp = pos_derivative_field(&u).unwrap();
            identity &= rp.half_sum_identity;
            a.push((ra.h, ra.consistency_error));
            p.push((rp.h, rp.consistency_error));
        }
        worst = worst.min(order("abs", a)).min(order("pos", p));
    }
    (
        worst >= 0.9 && identity,
        format!("min order {worst:.3}, half-sum identity {identity}"),
    )
}

fn dq_criterion_check() -> Verdict {
    let mut worst = f64::INFINITY;
    for (s, exact) in c1_corpus() {
        let pts = LEVELS
            .iter()
            .map(|&n| {
                let u = s.grid(n).unwrap();
                let c = dq_criterion(&u, P2, &[1]).unwrap().c_est;
                (u.max_spacing(), (c - exact).abs())
            })
            .collect();
        worst = worst.min(order(&s.name, pts));
    }
    let path = indicator_path(P2, 256, 256).unwrap();
    let ind = dq_criterion(&path, P2, &[1, 2, 4, 8]).unwrap();
    let slope = ind.slope.unwrap_or(f64::NAN);
    (
        worst >= 1.0 && (slope + 0.5).abs() <= 0.05 && ind.verdict == CriterionVerdict::Divergent,
        format!(
            "C1 min order {worst:.3}, indicator slope {slope:.4}, verdict {:?}",
            ind.verdict
        ),
    )
}

fn poincare() -> Verdict {
    let t = Instant::now();
    let n = 512;
    let lambda = first_dirichlet_eigenvalue(n, 1.0).unwrap();
    let h = 1.0 / n as f64;
    let closed = 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
    let eig_err = (lambda - PI * PI).abs() / (PI * PI);
    let closed_err = (lambda - closed).abs() / closed;
    let mut margin = f64::INFINITY;
    for (s, member) in w0_corpus() {
        if !member {
            continue;
        }
        let u = s.grid(if s.d() == 1 { n } else { 128 }).unwrap();
        for j in 0..u.d() {
            let r = poincare_check(&u, P2, j, 0.01).unwrap();
            let c = PI / u.domain().width(j);
            margin = margin.min(if r.precondition.member {
                r.derivative_norm / (c * r.lp_norm)
            } else {
                0.0
            });
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        eig_err <= 0.01 && closed_err <= 1e-9 && margin >= 0.99 && secs < 10.0,
        format!("lambda_1 rel err {eig_err:.2e} (closed form {closed_err:.1e}), min margin {margin:.4}, {secs:.1}s"),
    )
}

fn w0_equivalences() -> Verdict {
    let corpus = w0_corpus();
    let (mut agree, mut labelled, mut worst) = (0, 0, f64::INFINITY);
    for (s, member) in &corpus {
        let u = s.grid(64).unwrap();
        let strong = w0_membership(&u, P2, None).unwrap();
        let weak = weak_w0_check(&u, P2, &coordinate_functionals(u.space()), None).unwrap();
        agree += (strong.member == strong.scalar_member && strong.member == weak.member) as usize;
        labelled += (strong.member == *member) as usize;
        if *member {
            let pts = [16, 32, 64, 128]
                .iter()
                .map(|&k| {
                    let r = w0_membership(&s.grid(k).unwrap(), P2, None).unwrap();
                    (r.h, r.boundary_norm)
                })
                .collect();
            worst = worst.min(order(&s.name, pts));
        }
    }
    (
        corpus.len() == 20 && agree == 20 && labelled == 20 && worst >= 1.9,
        format!(
            "agree {agree}/{}, labels {labelled}/{}, member decay order {worst:.3}",
            corpus.len(),
            corpus.len()
        ),
    )
}

fn morrey() -> Verdict {
    let opts = HolderOptions {
        seed: 7,
        ..HolderOptions::default()
    };
    let (mut ok, mut worst, mut sqrt_err) = (true, 0.0_f64, f64::NAN);
    for s in morrey_corpus() {
        let u = s.grid(2048).unwrap();
        let beta = holder_beta(&u, 0.5, opts).unwrap().beta;
        let w = u.sobolev_norm(P2).unwrap();
        ok &= beta <= w;
        if w > 0.0 {
            worst = worst.max(beta / w);
        }
        if s.name == "sqrt" {
            // sup |sqrt t - sqrt s| / |t - s|^(1/2) = 1, times |x0| = 1
            sqrt_err = (beta - 1.0).abs();
        }
    }
    (
        ok && sqrt_err <= 0.05,
        format!("max beta/|u|_W {worst:.4}, sqrt relative gap {sqrt_err:.4}"),
    )
}

fn aubin_lions() -> Verdict {
    let t = Instant::now();
    let eps = [0.05, 0.1, 0.2];
    let compact = aubin_lions_probe(&compact_family(400, 4, 42, true).unwrap(), P2, &eps, 1.0).unwrap();
    let growth: Vec<f64> = (0..eps.len())
        .map(|e| {
            let c = compact.counts_at(e);
            *c.iter().max().unwrap() as f64 / c[0] as f64
        })
        .collect();
    let control = aubin_lions_probe(&indicator_control_family(4, 2.0).unwrap(), P2, &[0.1], 1.0).unwrap();
    let c = control.counts_at(0);
    let control_growth = *c.last().unwrap() as f64 / c[0] as f64;
    let secs = t.elapsed().as_secs_f64();
    (
        growth.iter().all(|g| *g <= 2.0) && control_growth >= 4.0 && secs < 180.0,
        format!("compact growth {growth:?}, control N(0.1) {c:?}, {secs:.1}s"),
    )
}

fn tensor() -> Verdict {
    let (mut gap, mut mismatches) = (0.0_f64, 0usize);
    for i in 0..50 {
        let m = 32 - (i * 7) % 31;
        let t = random_operator(m, 1000 + i as u64);
        // independent oracle: sqrt of the top eigenvalue of T^T T
        let gram: DMatrix<f64> = t.transpose() * &t;
        let oracle = gram.symmetric_eigen().eigenvalues.max().sqrt();
        let ext = TensorExtension::new(t, 3).unwrap();
        let opts = TensorOptions {
            seed: i as u64,
            certify_samples: 1000,
            ..TensorOptions::default()
        };
        let r = ext.norm_report(P2, opts).unwrap();
        gap = gap.max((r.extended_norm - oracle).abs() / oracle);

        let f = GridFunction::sample_scalar(BoxDomain::unit(1), GridSpec::uniform(1, m).unwrap(), |s| {
            (5.0 * s[0] + i as f64).cos()
        })
        .unwrap();
        let x = [1.0, 0.5, -2.0];
        let fx = f
            .map(SpaceDescriptor::hilbert(3).unwrap(), |v| {
                x.iter().map(|b| v[0] * b).collect()
            })
            .unwrap();
        let (a, b) = (ext.apply(&fx).unwrap(), ext.apply_tensor(&f, &x).unwrap());
        mismatches += a
            .values()
            .iter()
            .zip(b.values())
            .filter(|(p, q)| p.to_bits() != q.to_bits())
            .count();
    }
    (
        gap <= 1e-8 && mismatches == 0,
        format!("max relative gap {gap:.2e}, bit mismatches {mismatches}"),
    )
}

fn witnesses() -> Verdict {
    let hs: Vec<f64> = (4..=10).map(|k| 0.5f64.powi(k)).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for r in [Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity] {
        let w = indicator_path_witness(r, &hs, 4096, 0.25).unwrap();
        let expected = match r {
            Exponent::Finite(q) => 1.0 / q - 1.0,
            Exponent::Infinity => -1.0,
        };
        let pts: Vec<(f64, f64)> = w.rows.iter().map(|row| (row.parameter, row.measured)).collect();
        let slope = sobolev_banach::fit::log_log_fit(&pts).unwrap().slope;
        ok &= (slope - expected).abs() <= 0.05 && w.verdict == WitnessVerdict::ConfirmsFailure && w.pass();
        lines.push(format!("r={r} slope {slope:.4}"));
    }
    let c0 = c0_sine_witness(&[100, 1000, 10000], &[0.5, 1.0, 2.0]).unwrap();
    let tail = c0.rows.iter().map(|r| r.measured).fold(f64::INFINITY, f64::min);
    ok &= tail >= 0.99 && c0.verdict == WitnessVerdict::ConfirmsFailure && c0.pass();
    let ck = ck_pospart_witness(&[1e-2, 3e-3, 1e-3], 100_001, 1.0 / 3.0).unwrap();
    let dist = ck.rows.iter().find(|r| r.parameter == 1e-3).unwrap().measured;
    let contrast = ck
        .positive
        .iter()
        .find(|c| c.name.starts_with("L^2 contrast at the smallest h"))
        .unwrap()
        .value;
    ok &= dist >= 0.98 && contrast <= 0.05 && ck.verdict == WitnessVerdict::ConfirmsFailure && ck.pass();
    lines.push(format!(
        "c0 tail {tail:.4}, C(K) distance {dist:.4}, L^2 contrast {contrast:.4}"
    ));
    (ok, lines.join(", "))
}

fn determinism() -> Verdict {
    let t = Instant::now();
    let cfg = RunConfig::default_suite(42);
    let (a, _) = run_suite(&cfg, &RunOverrides::default()).unwrap();
    let first = t.elapsed().as_secs_f64();
    let (b, _) = run_suite(
        &cfg,
        &RunOverrides {
            workers: Some(2),
            ..RunOverrides::default()
        },
    )
    .unwrap();
    let (ca, cb) = (a.summary_csv().unwrap(), b.summary_csv().unwrap());
    (
        ca == cb && a.pass && first < 600.0,
        format!(
            "{} entries, csv identical {}, all pass {}, {first:.1}s per run",
            a.entries.len(),
            ca == cb,
            a.pass
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("norm chain rule discrepancy order", norm_chain_order),
        ("norm estimate and circle gap", norm_estimate),
        ("lattice abs/pos rules", lattice_rules),
        ("difference quotient criterion", dq_criterion_check),
        ("Poincare eigenvalue and bound", poincare),
        ("W0 equivalences", w0_equivalences),
        ("Morrey d=1 p=2", morrey),
        ("Aubin-Lions covering probe", aubin_lions),
        ("Hilbert tensor extension", tensor),
        ("counterexample witnesses", witnesses),
        ("determinism and runtime", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        // written to the stdout handle so the lines survive output capture
        let line = format!("{} [{:>2}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" }, k + 1);
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        if !pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
