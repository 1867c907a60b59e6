//! Entangled generalized Bernoulli states of two cavity modes.
//!
//! * [`fock`]: truncated Fock space, operators, multi-site registers, seeded
//!   random streams.
//! * [`binomial`]: generalized binomial states and their closed-form overlaps.
//! * [`field`]: field expectations, correlations and covariance of the
//!   entangled two-cavity state.
//! * [`bell`]: the dichotomic field observable and the CHSH Bell function.
//! * [`dynamics`]: Jaynes-Cummings and Ramsey dynamics, probe-atom
//!   measurements, state generation and Monte Carlo Bell experiments.
//!
//! Fields are measured in units of `sqrt(4 pi hbar omega / V)` at a cavity
//! antinode, so the single-mode field operator is `a + a^dagger`.

pub mod bell;
pub mod binomial;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod fock;

pub use bell::{
    analytic_s_b, angle_preset, bell_correlation, bell_correlation_operator, bell_function,
    bell_function_operator, degree_of_entanglement, dichotomic_operator, eta_for_degree,
    optimal_p_scan, Angles, BellConfig, DichotomicParams, PScan, Preset,
};
pub use binomial::{
    binomial_overlap, binomial_state, orthogonal_partner, BinomialParams, GbsParams,
};
pub use dynamics::{
    detection_threshold_check, generate_entangled_gbs, run_bell_experiment, timing_sensitivity,
    BellEstimate, ExperimentConfig, InitialAtomPair, RamseyPhaseConvention,
};
pub use error::{Error, Result};
pub use field::{
    entangled_gbs_state, field_covariance, field_stats_operator, EntangledGbsParams, FieldStats,
};
pub use fock::{Cavity, RandomStream, StateVector, TwoCavityState, DEFAULT_N_MAX};
