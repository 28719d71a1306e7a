//! Balanced codes for multi-level cells: enumerative rank coding and the
//! recursive q-ary Knuth construction.

mod knuth_q;
mod rank;
mod redundancy;
mod word;

pub use knuth_q::{
    group_count_walk, knuth_q_balance, knuth_q_unbalance, BalancingTrace, TraceStep,
};
pub use rank::{
    balanced_count, binomial, biguint_to_bits, bits_to_biguint, decode_message, encode_message,
    multinomial, rank_balanced, rank_balanced_checked, rank_code_m, rank_multiset, rank_to_u128,
    unrank_balanced, unrank_multiset,
};
pub use redundancy::{
    full_set_redundancy_bits, redundancy_factor, trace_bit_cost, trace_bit_cost_direct,
};
pub use word::{BalancedQaryWord, QaryWord};
