//! Binary words, Hamming weight and prefix inversion.
//!
//! Words are stored most-significant-bit first: bit 0 is the leftmost symbol
//! when the word is written out, and "the first `i` bits" always means
//! positions `0..i`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A fixed-length binary word. Each entry is `0` or `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    bits: Vec<u8>,
}

impl BitWord {
    /// All-zero word of length `n`.
    pub fn zeros(n: usize) -> Self {
        BitWord { bits: vec![0; n] }
    }

    pub fn ones(n: usize) -> Self {
        BitWord { bits: vec![1; n] }
    }

    /// Builds a word from `0`/`1` values; any non-zero byte is rejected.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidSymbol {
                symbol: char::from_digit(u32::from(bits[pos]) % 10, 10).unwrap_or('?'),
                position: pos,
            });
        }
        Ok(BitWord { bits })
    }

    /// Builds a word from booleans (`true` is a one).
    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitWord {
            bits: iter.into_iter().map(u8::from).collect(),
        }
    }

    /// `value` written in `width` bits, most significant bit first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        BitWord {
            bits: (0..width)
                .map(|k| {
                    let shift = width - 1 - k;
                    if shift >= 64 {
                        0
                    } else {
                        ((value >> shift) & 1) as u8
                    }
                })
                .collect(),
        }
    }

    /// Interprets the word as an unsigned integer, most significant bit first.
    pub fn to_uint(&self) -> Option<u64> {
        if self.bits.len() > 64 && self.bits[..self.bits.len() - 64].iter().any(|&b| b == 1) {
            return None;
        }
        Some(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.bits[i] = u8::from(bit);
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_balanced(&self) -> bool {
        self.bits.len() % 2 == 0 && 2 * self.weight() == self.bits.len()
    }

    /// Complements bits `0..i`. `i == len` complements everything.
    pub fn invert_prefix(&self, i: usize) -> Result<BitWord> {
        let mut out = self.clone();
        out.invert_prefix_in_place(i)?;
        Ok(out)
    }

    pub fn invert_prefix_in_place(&mut self, i: usize) -> Result<()> {
        if i > self.bits.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.bits.len(),
            });
        }
        self.bits[..i].iter_mut().for_each(|b| *b ^= 1);
        Ok(())
    }

    /// Bitwise XOR with another word of the same length.
    pub fn xor(&self, other: &BitWord) -> Result<BitWord> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(BitWord {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitWord { bits }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitWord {
        BitWord {
            bits: self.bits[range].to_vec(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(position, symbol)| match symbol {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidSymbol { symbol, position }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| BitWord { bits })
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Free-function form of [`BitWord::weight`].
pub fn weight(w: &BitWord) -> usize {
    w.weight()
}

/// Free-function form of [`BitWord::invert_prefix`].
pub fn invert_prefix(w: &BitWord, i: usize) -> Result<BitWord> {
    w.invert_prefix(i)
}

/// Smallest `i` in `[0, n)` such that inverting the first `i` bits of `w`
/// leaves a word of weight `n/2`.
///
/// The weight after inverting `i` bits moves by exactly one per step of `i`
/// and goes from `|w|` to `n - |w|`, so it crosses `n/2` before `i` reaches `n`.
pub fn find_balancing_index(w: &BitWord) -> Result<usize> {
    let n = w.len();
    if n % 2 != 0 {
        return Err(Error::OddLength(n));
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    let target = n / 2;
    let mut current = w.weight();
    for (i, &b) in w.bits().iter().enumerate() {
        if current == target {
            return Ok(i);
        }
        if b == 1 {
            current -= 1;
        } else {
            current += 1;
        }
    }
    unreachable!("prefix-inversion walk always crosses n/2 before i = n")
}

/// A binary word of even length and weight exactly half its length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BalancedWord(BitWord);

impl BalancedWord {
    pub fn new(word: BitWord) -> Result<Self> {
        let len = word.len();
        if len % 2 != 0 {
            return Err(Error::OddLength(len));
        }
        let weight = word.weight();
        if 2 * weight != len {
            return Err(Error::NotBalanced {
                len,
                weight,
                expected: len / 2,
            });
        }
        Ok(BalancedWord(word))
    }

    pub fn as_word(&self) -> &BitWord {
        &self.0
    }

    pub fn into_word(self) -> BitWord {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BalancedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::ops::Deref for BalancedWord {
    type Target = BitWord;

    fn deref(&self) -> &BitWord {
        &self.0
    }
}
