//! Balanced encoding and decoding over symmetric channels.

use super::bp::{bp_decode, clip};
use super::lambda::{candidate_inversions, lambda_scores_all_shifts};
use super::LdpcCode;
use crate::error::{Error, Result};
use crate::word::{find_balancing_index, BalancedWord, BitWord};

/// Encodes `u` and inverts the shortest prefix that balances the codeword.
/// Returns the stored word and the (unstored) inversion index.
pub fn balanced_encode(code: &LdpcCode, u: &BitWord) -> Result<(BalancedWord, usize)> {
    let z = code.encode(u)?;
    let i = find_balancing_index(&z)?;
    Ok((BalancedWord::new(z.invert_prefix(i)?)?, i))
}

/// Hard-decision LLRs of a binary symmetric channel with crossover `p`.
pub fn bsc_llr(y: &BitWord, p: f64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("crossover {p} outside (0, 1)")));
    }
    Ok(hard_llr(y, ((1.0 - p) / p).ln()))
}

/// `+magnitude` for 0 bits, `-magnitude` for 1 bits.
pub fn hard_llr(y: &BitWord, magnitude: f64) -> Vec<f64> {
    y.iter().map(|b| if b == 1 { -magnitude } else { magnitude }).collect()
}

/// Log-likelihood of `x` given channel LLRs, up to a constant.
pub fn log_likelihood_of(llr: &[f64], x: &BitWord) -> f64 {
    llr.iter()
        .zip(x.iter())
        .map(|(&l, b)| if b == 1 { -clip(l) / 2.0 } else { clip(l) / 2.0 })
        .sum()
}

/// Parameters of the shift-guided decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricDecoder {
    /// Belief propagation rounds behind each shift score.
    pub rounds: usize,
    /// Number of candidate shifts decoded.
    pub candidates: usize,
    pub max_iter: usize,
}

impl Default for SymmetricDecoder {
    fn default() -> Self {
        SymmetricDecoder { rounds: 2, candidates: 4, max_iter: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedDecode {
    pub u: BitWord,
    pub z: BitWord,
    pub i: usize,
    /// Shifts that were decoded.
    pub tried: Vec<usize>,
}

fn decode_shifts(
    code: &LdpcCode,
    llr: &[f64],
    shifts: Vec<usize>,
    max_iter: usize,
) -> Result<BalancedDecode> {
    let mut best: Option<(f64, BitWord, usize)> = None;
    for &j in &shifts {
        let shifted: Vec<f64> =
            llr.iter().enumerate().map(|(v, &l)| if v < j { -l } else { l }).collect();
        let r = bp_decode(code, &shifted, max_iter)?;
        if !r.satisfied {
            continue;
        }
        // BP may land on a codeword whose own balancing index differs from j
        let i = find_balancing_index(&r.hard)?;
        let score = log_likelihood_of(llr, &r.hard.invert_prefix(i)?);
        if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
            best = Some((score, r.hard, i));
        }
    }
    match best {
        Some((_, z, i)) => Ok(BalancedDecode { u: code.extract_info(&z)?, z, i, tried: shifts }),
        None => Err(Error::DecodeFailure(format!("no candidate among {} shifts decoded", shifts.len()))),
    }
}

/// Decodes a balanced codeword from channel LLRs (positive favors 0): scores
/// every shift, decodes the best local maxima and keeps the most likely
/// result whose inversion index is minimal.
pub fn balanced_decode_symmetric(
    code: &LdpcCode,
    llr: &[f64],
    params: &SymmetricDecoder,
) -> Result<BalancedDecode> {
    if params.candidates == 0 {
        return Err(Error::InvalidParameter("candidate count must be positive".into()));
    }
    let scores = lambda_scores_all_shifts(code, llr, params.rounds)?;
    let shifts = candidate_inversions(&scores.scores, params.candidates);
    decode_shifts(code, llr, shifts, params.max_iter)
}

/// Decodes every shift.
pub fn balanced_decode_exhaustive(code: &LdpcCode, llr: &[f64], max_iter: usize) -> Result<BalancedDecode> {
    code.check_len(llr.len())?;
    decode_shifts(code, llr, (0..code.n()).collect(), max_iter)
}
