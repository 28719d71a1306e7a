//! Binary Knuth balancing codec.
//!
//! A `k`-bit message has its first `i` bits inverted so it becomes balanced;
//! `i` is then sent as the `i`-th balanced word (lexicographic order) of a
//! short prefix of length `p`, where `p` is the smallest even length with
//! `C(p, p/2) >= k`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::mlc::{binomial, rank_multiset, unrank_multiset};
use crate::word::{find_balancing_index, BalancedWord, BitWord};

/// Balanced payload plus the balanced prefix that names the inversion point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnuthCodeword {
    pub prefix: BalancedWord,
    pub payload: BalancedWord,
}

impl KnuthCodeword {
    /// Prefix followed by payload, as stored.
    pub fn to_word(&self) -> BitWord {
        self.prefix.as_word().concat(self.payload.as_word())
    }
}

/// Encoder/decoder for a fixed message length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnuthCodec {
    k: usize,
    prefix_len: usize,
}

impl KnuthCodec {
    /// Codec for `k`-bit messages with the shortest sufficient prefix.
    pub fn new(k: usize) -> Result<Self> {
        check_message_len(k)?;
        let mut p = 2;
        while binomial(p, p / 2) < BigUint::from(k) {
            p += 2;
        }
        Ok(KnuthCodec { k, prefix_len: p })
    }

    /// Codec with an explicit prefix length.
    pub fn with_prefix_len(k: usize, prefix_len: usize) -> Result<Self> {
        check_message_len(k)?;
        if prefix_len % 2 != 0 || prefix_len == 0 {
            return Err(Error::OddLength(prefix_len));
        }
        let capacity = binomial(prefix_len, prefix_len / 2);
        if capacity < BigUint::from(k) {
            return Err(Error::PrefixCapacity {
                prefix_len,
                capacity: capacity.to_u128().unwrap_or(u128::MAX),
                required: k,
            });
        }
        Ok(KnuthCodec { k, prefix_len })
    }

    pub fn message_len(&self) -> usize {
        self.k
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    pub fn codeword_len(&self) -> usize {
        self.k + self.prefix_len
    }

    fn prefix_for(&self, i: usize) -> Result<BalancedWord> {
        let half = self.prefix_len / 2;
        let bits = unrank_multiset(&BigUint::from(i), &[half, half])?;
        BalancedWord::new(BitWord::from_bits(bits)?)
    }

    fn index_of(&self, prefix: &BalancedWord) -> Result<usize> {
        if prefix.len() != self.prefix_len {
            return Err(Error::LengthMismatch {
                expected: self.prefix_len,
                actual: prefix.len(),
            });
        }
        let r = rank_multiset(prefix.bits(), 2);
        match r.to_usize() {
            Some(i) if i < self.k => Ok(i),
            _ => Err(Error::IndexOutOfRange {
                index: r.to_usize().unwrap_or(usize::MAX),
                len: self.k,
            }),
        }
    }

    pub fn encode(&self, u: &BitWord) -> Result<KnuthCodeword> {
        if u.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: u.len(),
            });
        }
        let i = find_balancing_index(u)?;
        Ok(KnuthCodeword {
            prefix: self.prefix_for(i)?,
            payload: BalancedWord::new(u.invert_prefix(i)?)?,
        })
    }

    pub fn decode(&self, c: &KnuthCodeword) -> Result<BitWord> {
        if c.payload.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: c.payload.len(),
            });
        }
        let i = self.index_of(&c.prefix)?;
        c.payload.invert_prefix(i)
    }

    /// Splits a stored word (prefix then payload) and decodes it.
    pub fn decode_word(&self, w: &BitWord) -> Result<BitWord> {
        if w.len() != self.codeword_len() {
            return Err(Error::LengthMismatch {
                expected: self.codeword_len(),
                actual: w.len(),
            });
        }
        let c = KnuthCodeword {
            prefix: BalancedWord::new(w.slice(0..self.prefix_len))?,
            payload: BalancedWord::new(w.slice(self.prefix_len..w.len()))?,
        };
        self.decode(&c)
    }

    /// Index encoded by a prefix, for inspection.
    pub fn inversion_index(&self, c: &KnuthCodeword) -> Result<usize> {
        self.index_of(&c.prefix)
    }
}

fn check_message_len(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Empty);
    }
    if k % 2 != 0 {
        return Err(Error::OddLength(k));
    }
    Ok(())
}

/// Encodes with the shortest-prefix codec for `u.len()`.
pub fn knuth_encode(u: &BitWord) -> Result<KnuthCodeword> {
    KnuthCodec::new(u.len())?.encode(u)
}

/// Decodes with the shortest-prefix codec for the payload length.
pub fn knuth_decode(c: &KnuthCodeword) -> Result<BitWord> {
    KnuthCodec::new(c.payload.len())?.decode(c)
}
