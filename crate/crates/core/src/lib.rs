//! Balanced modulation for storage channels.
//!
//! Stored words are balanced (equal numbers of 0s and 1s, or of each q-ary
//! level), so a reader can pick the threshold that splits the cells evenly
//! instead of relying on a fixed one while levels drift.

pub mod channel;
pub mod em;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod knuth;
pub mod ldpc;
pub mod mlc;
pub mod partial;
pub mod rng;
pub mod thresholding;
pub mod word;

pub use channel::{
    analytic_ber_mean_drift, analytic_ber_variance_growth, apply_bec, apply_bsc, model_thresholds,
    sample_levels, AgedBlock, DriftKind, DriftModel, ErasureSymbol, ErasureWord, ModelThresholds,
};
pub use em::{e_step, fit, m_step, per_cell_llr, MixtureParams, Responsibilities};
pub use error::{Error, Result};
pub use ldpc::{
    balanced_decode_symmetric, balanced_encode, bec_decode, bp_decode, build_gallager,
    candidate_inversions, check_interval_sets, lambda_scores_all_shifts, InversionSet, LdpcCode,
    ShiftScore,
};
pub use harness::{
    emit, run_ber_curve, run_inversion_set, run_threshold_compare, run_wer_bec, run_wer_bsc,
    ExperimentKind, ExperimentSpec, OutputFormat, ResultTable,
};
pub use knuth::{knuth_decode, knuth_encode, KnuthCodec, KnuthCodeword};
pub use partial::{
    pb_decode, pb_encode, pb_read, rate_fixed_vs_partial, LdpcEcc, PartialBalanced, SystematicCode,
};
pub use thresholding::{
    balancing_threshold_bisect, balancing_threshold_exact, optimal_threshold_oracle,
    read_with_threshold, relaxed_threshold_mean, relaxed_threshold_second_order, CellLevelVector,
    ErrorCounts,
};
pub use word::{find_balancing_index, invert_prefix, weight, BalancedWord, BitWord};
