use std::fmt;

use crate::error::{Error, Result};

/// A word over the alphabet `{0, …, q-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QaryWord {
    symbols: Vec<u8>,
    q: usize,
}

impl QaryWord {
    pub fn new(symbols: Vec<u8>, q: usize) -> Result<Self> {
        if !(2..=256).contains(&q) {
            return Err(Error::InvalidParameter(format!("alphabet size {q} not in 2..=256")));
        }
        if let Some(position) = symbols.iter().position(|&s| usize::from(s) >= q) {
            return Err(Error::InvalidSymbol {
                symbol: char::from_digit(u32::from(symbols[position]), 36).unwrap_or('?'),
                position,
            });
        }
        Ok(QaryWord { symbols, q })
    }

    /// Parses a digit string such as `0110230210110003` (digits and letters up to base 36).
    pub fn parse(s: &str, q: usize) -> Result<Self> {
        let symbols = s
            .chars()
            .enumerate()
            .map(|(position, symbol)| {
                symbol
                    .to_digit(36)
                    .map(|d| d as u8)
                    .ok_or(Error::InvalidSymbol { symbol, position })
            })
            .collect::<Result<Vec<u8>>>()?;
        QaryWord::new(symbols, q)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub(crate) fn symbols_mut(&mut self) -> &mut [u8] {
        &mut self.symbols
    }

    /// Occurrences of each symbol.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.q];
        for &s in &self.symbols {
            counts[usize::from(s)] += 1;
        }
        counts
    }

    pub fn is_balanced(&self) -> bool {
        self.len() % self.q == 0 && self.counts().iter().all(|&c| c * self.q == self.len())
    }
}

impl fmt::Display for QaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            let c = char::from_digit(u32::from(s), 36).unwrap_or('?');
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A q-ary word in which every symbol occurs exactly `m = len / q` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BalancedQaryWord(QaryWord);

impl BalancedQaryWord {
    pub fn new(word: QaryWord) -> Result<Self> {
        if !word.is_balanced() {
            let counts = word.counts();
            return Err(Error::InvalidParameter(format!(
                "word {word} is not balanced (symbol counts {counts:?})"
            )));
        }
        Ok(BalancedQaryWord(word))
    }

    /// Occurrences of each symbol.
    pub fn m(&self) -> usize {
        self.0.len() / self.0.q()
    }

    pub fn as_word(&self) -> &QaryWord {
        &self.0
    }

    pub fn into_word(self) -> QaryWord {
        self.0
    }
}

impl std::ops::Deref for BalancedQaryWord {
    type Target = QaryWord;

    fn deref(&self) -> &QaryWord {
        &self.0
    }
}

impl fmt::Display for BalancedQaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
