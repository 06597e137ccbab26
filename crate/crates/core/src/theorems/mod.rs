//! Checks of the global statements: embeddings, Morrey, Poincare, zero-trace
//! characterisations, continuity of the norm map, compactness probes and
//! tensor extension of operators.

mod compactness;
mod embedding;
mod mollifier;
mod poincare;
mod tensor;
mod w0;

pub use compactness::{
    aubin_lions_probe, compact_family, compact_schedule, compact_weights, greedy_net_radii, indicator_control_family,
    net_count, CoveringProfile, CoveringVerdict, LevelCounts, ProbeLevel,
};
pub use embedding::{
    embedding_admissible, embedding_check, embedding_constant_transfer, morrey_check, ConstantTransferReport,
    EmbeddingReport, MorreyReport,
};
pub use mollifier::{mollifier_family_check, MollifierFamilyReport, MollifierLevel};
pub use poincare::{
    first_dirichlet_eigenvalue, first_dirichlet_eigenvalue_exact, pi_p, poincare_check, PoincareReport,
};
pub use tensor::{random_operator, NormMethod, TensorExtension, TensorNormReport, TensorOptions};
pub use w0::{
    coordinate_functionals, default_w0_tolerance, ideal_property_check, norm_map_continuity_check,
    perturbation_sequence, rotation_sequence, w0_membership, weak_w0_check, IdealReport, NormContinuityReport,
    W0Report, WeakW0Report,
};
