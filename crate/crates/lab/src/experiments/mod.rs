//! The quantitative experiments: deterministic height-profile
//! constructions, Monte Carlo estimators with error bars, the extremal-edge
//! probe, the reflection inequality check, the shifted-configuration
//! inspection, and the randomized property campaign.

pub mod chessboard;
pub mod estimators;
pub mod gradients;
pub mod shifted;
pub mod tau;
pub mod verify;

pub use chessboard::{chessboard_check, BlockFunction, ChessboardReport};
pub use estimators::{
    estimate_max, estimate_small_ball, estimate_tail, estimate_variance, probability_estimate,
};
pub use gradients::{controlled_gradients_probe, GradientsReport, TupleReport};
pub use shifted::{shifted_config_experiment, ShiftExperimentReport};
pub use tau::{
    eta, eta_field, eta_prime, eta_shifted, eta_sum_bound, eta_sum_bound_brute_force,
    lemma_l_lower_bound, tau_log, tau_log_field, tau_log_gradient_square_sum,
};
pub use verify::{run_addition_campaign, CampaignConfig, CampaignReport};
