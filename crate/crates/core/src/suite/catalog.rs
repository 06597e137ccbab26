use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cmp {
    /// Passes when `value <= threshold`.
    Le,
    /// Passes when `value >= threshold`.
    Ge,
}

impl Cmp {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Cmp::Le => value <= threshold,
            Cmp::Ge => value >= threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricSpec {
    pub name: &'static str,
    pub cmp: Cmp,
    pub threshold: f64,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CatalogEntry {
    pub op: &'static str,
    pub module: &'static str,
    /// Name of the result checked, followed by the statement it checks.
    pub anchor: &'static str,
    pub summary: &'static str,
    pub default_sample: &'static str,
    pub params: &'static [ParamSpec],
    pub metrics: &'static [MetricSpec],
}

const fn le(name: &'static str, threshold: f64, doc: &'static str) -> MetricSpec {
    MetricSpec {
        name,
        cmp: Cmp::Le,
        threshold,
        doc,
    }
}

const fn ge(name: &'static str, threshold: f64, doc: &'static str) -> MetricSpec {
    MetricSpec {
        name,
        cmp: Cmp::Ge,
        threshold,
        doc,
    }
}

const fn param(name: &'static str, default: &'static str, doc: &'static str) -> ParamSpec {
    ParamSpec { name, default, doc }
}

const LEVELS: ParamSpec = param("levels", "[32, 64, 128, 256]", "refinement ladder, cells per axis");
const P: ParamSpec = param("p", "2", "integrability exponent");
const COUNT: ParamSpec = param("count", "varies", "number of seeded samples");

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        op: "dq_criterion",
        module: "calculus",
        anchor: "Difference Quotient Criterion: u in W^{1,p}(Omega,X) iff |u(. + h e_j) - u|_{L^p(omega,X)} <= C|h| for small h",
        summary: "Difference quotients of C^1 samples converge to max_j |D_j u|_p; the indicator path in L^2 diverges like h^{-1/2}.",
        default_sample: "c1",
        params: &[LEVELS, param("r", "2", "exponent of the indicator path"), param("grid", "256", "cells of the indicator path")],
        metrics: &[
            ge("c1_min_order", 1.0, "smallest fitted order of |C_est - max_j |D_j u|_2| over the C^1 samples"),
            le("indicator_slope_deviation", 0.05, "|fitted slope - (1/r - 1)| of the indicator path quotients"),
            ge("indicator_divergent", 1.0, "1 when the indicator path is classified DIVERGENT"),
        ],
    },
    CatalogEntry {
        op: "compose_lipschitz",
        module: "calculus",
        anchor: "Lipschitz composition: F o u in W^{1,p}(Omega,Y) for Lipschitz F: X -> Y",
        summary: "Pairwise Lipschitz bounds of identity, norm, lattice modulus and scalar-of-functional maps on seeded samples.",
        default_sample: "smooth",
        params: &[COUNT, param("n", "64", "cells per axis")],
        metrics: &[le("failures", 0.0, "compositions whose pairwise quotient exceeds the declared constant")],
    },
    CatalogEntry {
        op: "gateaux_chain_field",
        module: "calculus",
        anchor: "Gateaux chain rule: D_j(F o u) = F'(u; D_j u) where the one-sided derivatives of F agree",
        summary: "One-sided chain-rule fields of the norm map agree away from kinks and the disagreement shrinks under refinement.",
        default_sample: "l1 norm of (t - 1/2, cos 3t)",
        params: &[param("levels", "[31, 63, 127, 255]", "refinement ladder")],
        metrics: &[
            le("increases", 0.0, "refinements where the disagreement grows"),
            le("max_unflagged_disagreement", 1e-9, "disagreement of plus/minus fields at non-flagged nodes"),
        ],
    },
    CatalogEntry {
        op: "norm_derivative_field",
        module: "calculus",
        anchor: "Norm weak derivative: D_j |u|_X = <D_j u, x'> for a norming functional x' of u(xi), with |D_j |u|_X| <= |D_j u|_X",
        summary: "Chain rule for the norm over a thirty-sample corpus, the norm estimate at every node and the circle gap witness.",
        default_sample: "norm_chain",
        params: &[LEVELS],
        metrics: &[
            ge("min_order", 0.9, "smallest fitted order of the L^1 discrepancy over the corpus"),
            le("estimate_violations", 0.0, "nodes with |D_j |u|| > |D_j u| + 1e-12"),
            le("circle_max_lhs", 1e-10, "largest |D |u|| at interior nodes of the circle sample"),
            ge("circle_min_rhs", 0.99, "smallest |D u| at interior nodes of the circle sample"),
        ],
    },
    CatalogEntry {
        op: "abs_derivative_field",
        module: "calculus",
        anchor: "Lattice Sobolev: D_j |u| = (sign u) D_j u in order continuous Banach lattices",
        summary: "Consistency of the modulus field with finite differences of |u| under refinement.",
        default_sample: "lattice",
        params: &[LEVELS],
        metrics: &[ge("min_order", 0.9, "smallest fitted order of the consistency error over the corpus")],
    },
    CatalogEntry {
        op: "pos_derivative_field",
        module: "calculus",
        anchor: "Positive part derivative: D_j u^+ = P_{u^+} D_j u = (D_j |u| + D_j u) / 2",
        summary: "Consistency of the positive-part field and the half-sum identity pos = (abs + D u) / 2.",
        default_sample: "lattice",
        params: &[LEVELS],
        metrics: &[
            ge("min_order", 0.9, "smallest fitted order of the consistency error over the corpus"),
            le("half_sum_failures", 0.0, "samples where pos = (abs + D u) / 2 fails bit for bit"),
        ],
    },
    CatalogEntry {
        op: "quotient_rule_field",
        module: "calculus",
        anchor: "Quotient rule: D_j (u / |u|_X phi) = ((D_j u)|u| - u D_j|u|) / |u|^2 phi + u / |u| D_j phi",
        summary: "The truncated quotient field against finite differences of v.",
        default_sample: "(2 + t, sin 3t) with phi = sin^2(pi t)",
        params: &[param("levels", "[64, 128, 256]", "refinement ladder")],
        metrics: &[ge("order", 1.5, "fitted order of the discrepancy")],
    },
    CatalogEntry {
        op: "product_rule_check",
        module: "calculus",
        anchor: "Product rule: D_j(psi u) = (D_j psi) u + psi D_j u for psi in C_c^infty",
        summary: "Product-rule residual against the C h bound.",
        default_sample: "smooth",
        params: &[LEVELS, COUNT],
        metrics: &[le("failures", 0.0, "sample/level pairs above C h")],
    },
    CatalogEntry {
        op: "stampacchia_check",
        module: "calculus",
        anchor: "Stampacchia: D_j u = 0 almost everywhere on the level set {u = w}",
        summary: "Derivative components vanish where a coordinate of u is pinned at zero.",
        default_sample: "coordinates with a flat zero interval",
        params: &[param("n", "256", "cells")],
        metrics: &[le("failures", 0.0, "samples with derivative mass on the zero set")],
    },
    CatalogEntry {
        op: "holder_beta",
        module: "calculus",
        anchor: "Holder seminorm: beta_alpha(u) = sup |u(xi) - u(eta)|_X / |xi - eta|^alpha",
        summary: "Exact pairwise Holder seminorms against closed forms.",
        default_sample: "circle, sqrt(t) x0",
        params: &[param("n", "1024", "cells")],
        metrics: &[
            le("circle_lipschitz_excess", 0.0, "beta_1 of the unit-speed circle minus 1"),
            le("sqrt_rel_error", 0.05, "|beta_{1/2}(sqrt(t) x0) - |x0|| / |x0|"),
        ],
    },
    CatalogEntry {
        op: "embedding_check",
        module: "theorems",
        anchor: "Sobolev embedding: W^{1,p}(Omega,X) -> L^r(Omega,X) with the norm of the scalar embedding",
        summary: "Vector embedding quotients never beat the scalar constant; factorizing samples match it.",
        default_sample: "smooth",
        params: &[COUNT, P, param("r", "4", "target exponent"), param("n", "64", "cells")],
        metrics: &[
            le("max_ratio", 1.000001, "worst vector/scalar constant ratio"),
            le("transfer_error", 1e-6, "|vector constant / scalar constant - 1| with lifted scalars"),
        ],
    },
    CatalogEntry {
        op: "morrey_check",
        module: "theorems",
        anchor: "Morrey: |u(xi) - u(eta)|_X <= C |u|_{W^{1,p}(Omega,X)} |xi - eta|^alpha, alpha = 1 - d/p",
        summary: "Holder-1/2 seminorms of one-dimensional samples against |u|_{W^{1,2}}.",
        default_sample: "morrey",
        params: &[param("n", "2048", "cells")],
        metrics: &[
            le("max_quotient", 1.0, "largest beta_{1/2} / |u|_{W^{1,2}} over the corpus"),
            le("sqrt_rel_error", 0.05, "|beta_{1/2}(sqrt(t) x0) - |x0|| / |x0|"),
            le("measured_failures", 0.0, "samples failing the bound with the measured scalar constant"),
        ],
    },
    CatalogEntry {
        op: "poincare_check",
        module: "theorems",
        anchor: "Poincare inequality: |D_j u|_{L^p(Omega,X)} >= C |u|_{L^p(Omega,X)} for u in W_0^{1,p}",
        summary: "Dirichlet eigenvalue of the second-difference matrix and the Poincare bound on zero-trace samples.",
        default_sample: "w0 members",
        params: &[param("n", "512", "cells in 1-D, n/4 per axis in 2-D"), param("tolerance", "0.01", "relative tolerance")],
        metrics: &[
            le("eigen_rel_error", 0.01, "|lambda_1(n) - pi^2| / pi^2"),
            ge("min_margin", 0.99, "smallest |D_j u|_2 / (C |u|_2) over members and axes"),
            le("eigenfunction_rel_error", 0.01, "|ratio - pi| / pi for sin(pi t) x0"),
        ],
    },
    CatalogEntry {
        op: "w0_membership",
        module: "theorems",
        anchor: "W_0 by the norm: u in W_0^{1,p}(Omega,X) iff |u|_X in W_0^{1,p}(Omega), iff Tr_X u = 0",
        summary: "Vector trace, scalar trace and weak verdicts on ten members and ten non-members.",
        default_sample: "w0",
        params: &[param("n", "64", "cells per axis"), param("levels", "[16, 32, 64, 128]", "ladder for boundary decay")],
        metrics: &[
            le("disagreements", 0.0, "samples where the three verdicts differ"),
            le("label_errors", 0.0, "samples whose verdict differs from the expected one"),
            ge("min_member_order", 1.9, "smallest fitted order of member boundary norms"),
        ],
    },
    CatalogEntry {
        op: "weak_w0_check",
        module: "theorems",
        anchor: "Weak W_0 characterization: u in W_0^{1,p} iff <u, x'> in W_0^{1,p}(Omega) for x' in a separating set",
        summary: "Coordinate functionals agree with the strong verdict; a witness fails on exactly one coordinate.",
        default_sample: "w0",
        params: &[param("n", "64", "cells per axis")],
        metrics: &[
            le("disagreements", 0.0, "samples where weak and strong verdicts differ"),
            le("witness_errors", 0.0, "1 unless the witness fails on exactly its perturbed coordinate"),
        ],
    },
    CatalogEntry {
        op: "ideal_property_check",
        module: "theorems",
        anchor: "Ideal property: |v|_Y <= |u|_X almost everywhere and u in W_0^{1,p} imply v in W_0^{1,p}",
        summary: "Halved, transplanted and masked versions of zero-trace samples.",
        default_sample: "w0 members",
        params: &[param("n", "64", "cells per axis")],
        metrics: &[le("failures", 0.0, "dominated functions reported outside W_0")],
    },
    CatalogEntry {
        op: "norm_map_continuity_check",
        module: "theorems",
        anchor: "Norm continuity: |.|_X: W^{1,p}(Omega,X) -> W^{1,p}(Omega) is continuous",
        summary: "Constant, perturbed and rotated sequences converging in W^{1,p}.",
        default_sample: "smooth",
        params: &[param("n", "128", "cells")],
        metrics: &[le("failures", 0.0, "sequences whose norm images do not converge")],
    },
    CatalogEntry {
        op: "aubin_lions_probe",
        module: "theorems",
        anchor: "Aubin-Lions: W^{1,p}(Omega,X) cap L^p(Omega,Y) -> L^p(Omega,X) is compact when Y -> X compactly",
        summary: "Greedy covering numbers along a refinement/truncation path for a bounded family and a control family.",
        default_sample: "weighted compact family, normalized cell indicators",
        params: &[
            param("members", "400", "members of the compact family"),
            param("levels", "4", "refinement levels"),
            param("eps", "[0.05, 0.1, 0.2]", "covering radii"),
        ],
        metrics: &[
            le("compact_max_growth", 2.0, "max over eps and levels of N(eps) / N_coarsest(eps)"),
            ge("control_growth", 4.0, "N(0.1) finest / coarsest for the control family"),
        ],
    },
    CatalogEntry {
        op: "mollifier_family_check",
        module: "theorems",
        anchor: "Uniform convolution: sup_{f in F} |rho_n * f - f|_{L^p} -> 0 for F bounded in W^{1,p}",
        summary: "Family sup of mollification errors is nonincreasing and below sqrt(d) C / n.",
        default_sample: "smooth",
        params: &[COUNT, P, param("n", "128", "cells"), param("levels", "[4, 8, 16, 32]", "mollifier levels")],
        metrics: &[
            le("monotone_failures", 0.0, "1 when the sup sequence increases"),
            le("bound_failures", 0.0, "levels above sqrt(d) C / n"),
            ge("order", 1.0, "fitted decay order of the sup"),
        ],
    },
    CatalogEntry {
        op: "tensor_extend",
        module: "theorems",
        anchor: "Hilbert extension: T~(f (x) x) = Tf (x) x and |T~| = |T|",
        summary: "Operator norms of T (x) I_H against T at p = 2 and certified bounds elsewhere.",
        default_sample: "seeded matrices",
        params: &[
            param("matrices", "50", "seeded matrices"),
            param("max_size", "32", "largest matrix size"),
            param("h_dim", "3", "Hilbert dimension"),
            param("other_p", "[1, 1.5, 3, \"inf\"]", "exponents for the certified bound"),
            param("certify_samples", "10000", "random inputs per certification"),
        ],
        metrics: &[
            le("max_rel_gap", 1e-8, "largest |T~| - |T| relative gap at p = 2"),
            le("bit_mismatches", 0.0, "entries where T~(f (x) x) differs from Tf (x) x"),
            le("certification_failures", 0.0, "exponents with a violated or unattained bound"),
        ],
    },
    CatalogEntry {
        op: "indicator_path_witness",
        module: "counterexamples",
        anchor: "Indicator path: u(t) := 1_{(0,t)} in L^r(0,1) is nowhere differentiable",
        summary: "Quotients |u(t+h) - u(t)|_r / h against h^{1/r - 1}, with Lipschitz scalar pairings.",
        default_sample: "t = 1/4",
        params: &[
            param("r", "[2, 4, \"inf\"]", "exponents"),
            param("grid", "4096", "cells of (0,1) in the target space"),
            param("h", "[1/16, ..., 1/1024]", "steps"),
        ],
        metrics: &[
            le("max_slope_deviation", 0.05, "largest |slope - (1/r - 1)|"),
            le("unexpected", 0.0, "tables with verdict UNEXPECTED or a failed positive side"),
        ],
    },
    CatalogEntry {
        op: "c0_sine_witness",
        module: "counterexamples",
        anchor: "c_0 sine path: u(t) := (sin(nt)/n) has candidate derivative (cos(nt)) not in c_0 for any t",
        summary: "Tail sups of (cos(nt)) at growing truncations, with smooth weak pairings.",
        default_sample: "t in {0.5, 1, 2}",
        params: &[param("n", "[100, 1000, 10000]", "truncations"), param("t", "[0.5, 1, 2]", "sample points")],
        metrics: &[
            ge("min_tail_sup", 0.99, "smallest tail sup"),
            le("unexpected", 0.0, "1 unless the verdict is CONFIRMS_FAILURE with the positive side"),
        ],
    },
    CatalogEntry {
        op: "ck_pospart_witness",
        module: "counterexamples",
        anchor: "Positive part in C(K): u(t)(r) = r - t, and u^+ cannot be distributionally differentiable",
        summary: "Sup distance of the u^+ quotient to its only candidate limit, with the L^2 contrast.",
        default_sample: "t = 1/3",
        params: &[param("h", "[1e-2, 3e-3, 1e-3]", "steps"), param("grid", "100001", "points of K")],
        metrics: &[
            ge("distance_at_min_h", 0.98, "sup distance at the smallest step"),
            le("l2_contrast", 0.05, "L^2 distance at the smallest step"),
            le("unexpected", 0.0, "1 unless the verdict is CONFIRMS_FAILURE with the positive side"),
        ],
    },
];

pub fn lookup(op: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.op == op)
}

/// Multi-line description of an entry for `describe`.
pub fn describe(entry: &CatalogEntry) -> String {
    let mut s = format!(
        "{} ({})\n  {}\n  {}\n  default sample: {}\n",
        entry.op, entry.module, entry.anchor, entry.summary, entry.default_sample
    );
    if !entry.params.is_empty() {
        s.push_str("  params:\n");
        for p in entry.params {
            s.push_str(&format!("    {} = {}: {}\n", p.name, p.default, p.doc));
        }
    }
    s.push_str("  metrics:\n");
    for m in entry.metrics {
        s.push_str(&format!(
            "    {} {} {}: {}\n",
            m.name,
            m.cmp.symbol(),
            m.threshold,
            m.doc
        ));
    }
    s
}
