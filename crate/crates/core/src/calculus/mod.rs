//! Composition calculus on grid functions: the difference-quotient criterion,
//! Lipschitz and one-sided Gateaux chain rules, derivative fields of the norm
//! and of lattice operations, and the quotient and product rules.
//!
//! Every rule uses the central finite difference of `u` for `D_j u`. Nodes
//! sitting on a singular set of the rule (zero of the norm, tie in the sup
//! norm, zero coordinate for lattice maps) are flagged and excluded from the
//! consistency measurements, since the identities only hold almost everywhere.

mod composition;
mod criterion;
mod fields;
mod holder;
mod rules;

pub use composition::{compose_lipschitz, gateaux_chain_field, CompositionReport, GateauxReport, LipschitzMap};
pub use criterion::{dq_criterion, CriterionReport, CriterionRow, CriterionVerdict};
pub use fields::{
    abs_derivative_field, norm_derivative_field, pos_derivative_field, stampacchia_check, LatticeFieldReport,
    NormFieldReport, StampacchiaReport,
};
pub use holder::{holder_beta, HolderOptions, HolderReport};
pub use rules::{product_rule_check, quotient_rule_field, ProductRuleReport, QuotientRuleReport};

/// Relative zero-set tolerance: a quantity is treated as zero when it is
/// below `ZERO_TOLERANCE * (1 + |u(xi)|_X)`.
pub const ZERO_TOLERANCE: f64 = 1e-8;

#[inline]
pub(crate) fn tau_zero(node_norm: f64) -> f64 {
    ZERO_TOLERANCE * (1.0 + node_norm)
}
