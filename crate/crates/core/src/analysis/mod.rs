//! Resource accounting, barren-plateau statistics and coefficient geometry.

mod bicone;
mod plateau;
mod resources;

pub use bicone::{
    bicone_agreement, bicone_contains, bicone_height, numerical_membership, BiconeAgreement,
    Membership, MembershipGrid, BICONE_TOLERANCE, GRID_TOLERANCE, MAX_MEMBERSHIP_POINTS,
};
pub use plateau::{
    fit_decay, plateau_stats, predicted_grad_f_sq, variance_bounds, DecayFit, Estimate,
    GradientStats, PlateauCase, PlateauConfig, PlateauMode, PlateauReport, VarianceBound,
    DENSE_HAAR_MAX_DIM, MAX_HAAR_QUBITS, MIN_TRIALS,
};
pub use resources::{
    advantage_criterion, advantage_lattice, count_gates, crossing_epsilon, log_big,
    resource_report, resrc_classical, resrc_classical_full, resrc_classical_lattice,
    resrc_quantum, resrc_quantum_f64, Advantage, ResourceReport,
};
