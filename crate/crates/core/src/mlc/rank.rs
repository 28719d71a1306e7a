//! Enumerative (lexicographic) rank coding of words with a fixed symbol
//! composition.
//!
//! The number of words that start with a given prefix is a multinomial
//! coefficient in the remaining symbol counts, so ranking walks the word left
//! to right adding, at each position, the number of completions that start
//! with a smaller symbol. All arithmetic is arbitrary precision.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::word::{BalancedQaryWord, QaryWord};
use crate::error::{Error, Result};
use crate::word::BitWord;

/// `n! / (parts[0]! parts[1]! …)`; `parts` must sum to `n`.
pub fn multinomial(n: usize, parts: &[usize]) -> Result<BigUint> {
    let total: usize = parts.iter().sum();
    if total != n {
        return Err(Error::InvalidParameter(format!(
            "multinomial parts sum to {total}, expected {n}"
        )));
    }
    let mut acc = BigUint::one();
    let mut remaining = n;
    for &p in parts {
        acc *= binomial(remaining, p);
        remaining -= p;
    }
    Ok(acc)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 1..=k {
        acc *= n - k + j;
        acc /= j;
    }
    acc
}

/// Number of arrangements of a multiset with the given symbol counts.
fn arrangements(counts: &[usize]) -> BigUint {
    let n = counts.iter().sum();
    multinomial(n, counts).expect("counts sum to their total")
}

/// Lexicographic rank of `symbols` among all arrangements of its own multiset.
pub fn rank_multiset(symbols: &[u8], q: usize) -> BigUint {
    let mut counts = vec![0usize; q];
    for &s in symbols {
        counts[usize::from(s)] += 1;
    }
    let mut remaining = symbols.len();
    let mut total = arrangements(&counts);
    let mut rank = BigUint::zero();
    for &s in symbols {
        let s = usize::from(s);
        // arrangements starting with symbol t = total * counts[t] / remaining
        for t in 0..s {
            if counts[t] > 0 {
                rank += &total * counts[t] / remaining;
            }
        }
        total = total * counts[s] / remaining;
        counts[s] -= 1;
        remaining -= 1;
    }
    rank
}

/// Inverse of [`rank_multiset`]: the `rank`-th arrangement (lexicographic) of
/// the multiset with `counts[s]` copies of symbol `s`.
pub fn unrank_multiset(rank: &BigUint, counts: &[usize]) -> Result<Vec<u8>> {
    let mut counts = counts.to_vec();
    let mut remaining: usize = counts.iter().sum();
    let mut total = arrangements(&counts);
    if rank >= &total {
        return Err(Error::RankOutOfRange);
    }
    let mut r = rank.clone();
    let mut out = Vec::with_capacity(remaining);
    while remaining > 0 {
        for s in 0..counts.len() {
            if counts[s] == 0 {
                continue;
            }
            let block = &total * counts[s] / remaining;
            if r < block {
                out.push(s as u8);
                total = block;
                counts[s] -= 1;
                remaining -= 1;
                break;
            }
            r -= block;
        }
    }
    Ok(out)
}

/// Number of balanced words of length `q*m`.
pub fn balanced_count(q: usize, m: usize) -> BigUint {
    arrangements(&vec![m; q])
}

/// The `r`-th balanced word of length `q*m` in lexicographic order.
pub fn unrank_balanced(r: &BigUint, q: usize, m: usize) -> Result<BalancedQaryWord> {
    let symbols = unrank_multiset(r, &vec![m; q])?;
    BalancedQaryWord::new(QaryWord::new(symbols, q)?)
}

/// Lexicographic rank of a balanced word.
pub fn rank_balanced(x: &BalancedQaryWord) -> BigUint {
    rank_multiset(x.symbols(), x.q())
}

/// Like [`rank_balanced`] but accepts any word and rejects unbalanced ones.
pub fn rank_balanced_checked(x: &QaryWord) -> Result<BigUint> {
    let balanced = BalancedQaryWord::new(x.clone())?;
    Ok(rank_balanced(&balanced))
}

/// Smallest `m` such that there are at least `2^k` balanced words of length `q*m`.
pub fn rank_code_m(k: usize, q: usize) -> usize {
    let need = BigUint::one() << k;
    let mut m = 1;
    while balanced_count(q, m) < need {
        m += 1;
    }
    m
}

/// Maps a `k`-bit message (read as a binary integer, MSB first) to the
/// balanced word with that rank, using the shortest admissible length.
pub fn encode_message(u: &BitWord, q: usize) -> Result<BalancedQaryWord> {
    let m = rank_code_m(u.len(), q);
    unrank_balanced(&bits_to_biguint(u), q, m)
}

/// Inverse of [`encode_message`] for a `k`-bit message.
pub fn decode_message(x: &BalancedQaryWord, k: usize) -> Result<BitWord> {
    let r = rank_balanced(x);
    if r.bits() as usize > k {
        return Err(Error::RankOutOfRange);
    }
    Ok(biguint_to_bits(&r, k))
}

pub fn bits_to_biguint(u: &BitWord) -> BigUint {
    u.iter().fold(BigUint::zero(), |acc, b| (acc << 1u32) + BigUint::from(b))
}

pub fn biguint_to_bits(r: &BigUint, width: usize) -> BitWord {
    BitWord::from_bools((0..width).rev().map(|k| r.bit(k as u64)))
}

/// Converts a rank to `u128` when it fits.
pub fn rank_to_u128(r: &BigUint) -> Option<u128> {
    r.to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Factorial-based multinomial, independent of the product-of-binomials path.
    fn factorial_oracle(n: usize, parts: &[usize]) -> BigUint {
        let fact = |k: usize| (1..=k).fold(BigUint::one(), |acc, j| acc * j);
        parts.iter().fold(fact(n), |acc, &p| acc / fact(p))
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(9, &[3, 3, 3]).unwrap(), BigUint::from(1680u32));
        assert_eq!(factorial_oracle(9, &[3, 3, 3]), BigUint::from(1680u32));
        assert_eq!(multinomial(8, &[2, 3, 3]).unwrap(), BigUint::from(560u32));
        assert_eq!(multinomial(7, &[7]).unwrap(), BigUint::one());
        assert!(multinomial(7, &[3, 3]).is_err());
        for (n, parts) in [(12, vec![4, 4, 4]), (20, vec![5, 5, 5, 5]), (30, vec![10, 7, 13])] {
            assert_eq!(multinomial(n, &parts).unwrap(), factorial_oracle(n, &parts));
        }
    }

    #[test]
    fn unrank_examples() {
        let first = unrank_balanced(&BigUint::zero(), 3, 3).unwrap();
        assert_eq!(first.to_string(), "000111222");
        assert_eq!(rank_balanced(&first), BigUint::zero());
        let last = unrank_balanced(&BigUint::from(1679u32), 3, 3).unwrap();
        assert_eq!(last.to_string(), "222111000");
        assert_eq!(unrank_balanced(&BigUint::from(1680u32), 3, 3), Err(Error::RankOutOfRange));
    }

    #[test]
    fn rejects_unbalanced_rank_input() {
        let w = QaryWord::parse("001112222", 3).unwrap();
        assert!(rank_balanced_checked(&w).is_err());
    }

    #[test]
    fn message_codec_round_trip() {
        let u: BitWord = "1010010010".parse().unwrap();
        assert_eq!(rank_code_m(10, 3), 3);
        let x = encode_message(&u, 3).unwrap();
        assert_eq!(x.len(), 9);
        assert_eq!(decode_message(&x, 10).unwrap(), u);
    }
}
