//! Erasure decoding of balanced LDPC codewords.
//!
//! Message passing fills erasures as in ordinary peeling, while every fully
//! observed check narrows the set of possible inversion indices. A check with
//! a single erasure can only resolve it once the whole inversion set agrees
//! on how many of its variables were flipped.

use super::inversion::{interval_sets, InversionSet};
use super::LdpcCode;
use crate::channel::{ErasureSymbol, ErasureWord};
use crate::error::Result;
use crate::word::{find_balancing_index, BitWord};

/// Default number of residual inversion indices tried after a stall.
pub const DEFAULT_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BecOutcome {
    /// Every feasible index yields the same codeword; `i` is the smallest.
    Unique { z: BitWord, i: usize },
    /// Several codewords are feasible, or the residual set exceeded the
    /// budget. `solutions` lists what was found.
    Ambiguous { solutions: Vec<(BitWord, usize)>, truncated: bool },
    Failure,
}

impl BecOutcome {
    pub fn unique(&self) -> Option<(&BitWord, usize)> {
        match self {
            BecOutcome::Unique { z, i } => Some((z, *i)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BecReport {
    pub outcome: BecOutcome,
    /// Inversion set when message passing stopped, before enumeration.
    pub inversion_set: InversionSet,
    /// Erasures left when message passing stopped.
    pub residual_erasures: usize,
}

struct State {
    x: Vec<Option<u8>>,
    set: InversionSet,
    active: Vec<bool>,
}

impl State {
    fn new(y: &ErasureWord, set: InversionSet, checks: usize) -> Self {
        let x = y
            .symbols()
            .iter()
            .map(|s| match s {
                ErasureSymbol::Bit(b) => Some(*b),
                ErasureSymbol::Erased => None,
            })
            .collect();
        State { x, set, active: vec![true; checks] }
    }

    fn erasures(&self) -> usize {
        self.x.iter().filter(|b| b.is_none()).count()
    }

    fn to_word(&self) -> Option<BitWord> {
        let bits: Option<Vec<u8>> = self.x.iter().copied().collect();
        bits.map(|b| BitWord::from_bits(b).expect("bits are 0 or 1"))
    }
}

/// Interval sets per check, computed once per decode.
fn check_sets(code: &LdpcCode) -> Vec<(InversionSet, InversionSet)> {
    (0..code.r()).map(|c| interval_sets(code.n(), code.check(c))).collect()
}

fn propagate(code: &LdpcCode, sets: &[(InversionSet, InversionSet)], st: &mut State) {
    loop {
        let mut progress = false;
        for c in 0..code.r() {
            if !st.active[c] {
                continue;
            }
            let vs = code.check(c);
            if vs.iter().all(|&v| st.x[v].is_some()) {
                let parity = vs.iter().fold(0, |acc, &v| acc ^ st.x[v].unwrap_or(0));
                let s = if parity == 0 { &sets[c].0 } else { &sets[c].1 };
                st.set = st.set.intersect(s);
                st.active[c] = false;
                progress = true;
            }
        }
        if st.set.is_empty() {
            return;
        }
        for c in 0..code.r() {
            if !st.active[c] {
                continue;
            }
            let vs = code.check(c);
            let mut unknown = None;
            let mut count = 0;
            let mut parity = 0;
            for &v in vs {
                match st.x[v] {
                    Some(b) => parity ^= b,
                    None => {
                        unknown = Some(v);
                        count += 1;
                    }
                }
            }
            if count != 1 {
                continue;
            }
            let flips = if st.set.is_subset_of(&sets[c].0) {
                0
            } else if st.set.is_subset_of(&sets[c].1) {
                1
            } else {
                continue;
            };
            if let Some(v) = unknown {
                st.x[v] = Some(parity ^ flips);
            }
            st.active[c] = false;
            progress = true;
        }
        if !progress {
            return;
        }
    }
}

/// Checks an index against a stalled state: message passing with the index
/// fixed must fill every erasure, the filled word must be balanced, and the
/// index must be the smallest one that balances the recovered codeword.
fn try_index(
    code: &LdpcCode,
    sets: &[(InversionSet, InversionSet)],
    stalled: &State,
    i: usize,
) -> Option<BitWord> {
    let mut st = State {
        x: stalled.x.clone(),
        set: InversionSet::singleton(code.n(), i),
        active: stalled.active.clone(),
    };
    propagate(code, sets, &mut st);
    if st.set.is_empty() {
        return None;
    }
    let x = st.to_word()?;
    if !x.is_balanced() {
        return None;
    }
    let z = x.invert_prefix(i).ok()?;
    if !code.is_codeword(&z) || find_balancing_index(&z).ok()? != i {
        return None;
    }
    Some(z)
}

pub fn bec_decode(code: &LdpcCode, y: &ErasureWord, budget: usize) -> Result<BecReport> {
    code.check_len(y.len())?;
    let sets = check_sets(code);
    let mut st = State::new(y, InversionSet::full(code.n()), code.r());
    propagate(code, &sets, &mut st);
    let inversion_set = st.set.clone();
    let residual_erasures = st.erasures();
    if st.set.is_empty() {
        return Ok(BecReport { outcome: BecOutcome::Failure, inversion_set, residual_erasures });
    }
    let truncated = st.set.len() > budget;
    let mut solutions: Vec<(BitWord, usize)> = Vec::new();
    for i in st.set.iter().take(budget) {
        if let Some(z) = try_index(code, &sets, &st, i) {
            if !solutions.iter().any(|(w, _)| *w == z) {
                solutions.push((z, i));
            }
        }
    }
    let outcome = match (solutions.len(), truncated) {
        (0, false) => BecOutcome::Failure,
        (1, false) => {
            let (z, i) = solutions.pop().expect("one solution");
            BecOutcome::Unique { z, i }
        }
        _ => BecOutcome::Ambiguous { solutions, truncated },
    };
    Ok(BecReport { outcome, inversion_set, residual_erasures })
}

/// Decoder that is told the inversion index.
pub fn bec_decode_genie(code: &LdpcCode, y: &ErasureWord, i: usize) -> Result<Option<BitWord>> {
    code.check_len(y.len())?;
    let sets = check_sets(code);
    let mut st = State::new(y, InversionSet::singleton(code.n(), i), code.r());
    propagate(code, &sets, &mut st);
    if st.set.is_empty() {
        return Ok(None);
    }
    Ok(st.to_word().and_then(|x| x.invert_prefix(i).ok()))
}

/// Plain peeling decoder for the ordinary (uninverted) code.
pub fn peel_decode(code: &LdpcCode, y: &ErasureWord) -> Result<Option<BitWord>> {
    bec_decode_genie(code, y, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_bec_with, random_word};
    use crate::ldpc::{balanced_encode, build_gallager};
    use crate::rng::stream;

    fn small_code() -> LdpcCode {
        LdpcCode::from_checks(8, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![0, 2, 4, 6], vec![1, 3, 5, 7]])
            .unwrap()
    }

    fn erase(x: &BitWord, positions: &[usize]) -> ErasureWord {
        ErasureWord::new(
            (0..x.len())
                .map(|p| {
                    if positions.contains(&p) {
                        ErasureSymbol::Erased
                    } else {
                        ErasureSymbol::Bit(x.get(p))
                    }
                })
                .collect(),
        )
    }

    /// Every codeword and every index consistent with `y`.
    fn exhaustive(code: &LdpcCode, y: &ErasureWord) -> Vec<BitWord> {
        let mut out: Vec<BitWord> = Vec::new();
        for m in 0..1u64 << code.k() {
            let z = code.encode(&BitWord::from_uint(m, code.k())).unwrap();
            let i = find_balancing_index(&z).unwrap();
            let x = z.invert_prefix(i).unwrap();
            let fits = y.symbols().iter().enumerate().all(|(p, s)| match s {
                ErasureSymbol::Bit(b) => *b == x.get(p),
                ErasureSymbol::Erased => true,
            });
            if fits && !out.contains(&z) {
                out.push(z);
            }
        }
        out
    }

    #[test]
    fn two_erasures_against_exhaustive_search() {
        let code = small_code();
        assert_eq!(code.k(), 5);
        let mut decoded = 0;
        for m in 0..32u64 {
            let z = code.encode(&BitWord::from_uint(m, 5)).unwrap();
            let (x, i) = balanced_encode(&code, &code.extract_info(&z).unwrap()).unwrap();
            for a in 0..8 {
                for b in a + 1..8 {
                    let y = erase(x.as_word(), &[a, b]);
                    let truth = exhaustive(&code, &y);
                    assert!(truth.contains(&z));
                    let report = bec_decode(&code, &y, DEFAULT_BUDGET).unwrap();
                    if let Some((found, j)) = report.outcome.unique() {
                        assert!(truth.contains(found));
                        if truth.len() == 1 {
                            assert_eq!(found, &z);
                            assert_eq!(j, i);
                        }
                        decoded += 1;
                    }
                }
            }
        }
        assert!(decoded > 0);
    }

    #[test]
    fn planted_pattern_decodes() {
        let code = small_code();
        let z = code.encode(&BitWord::from_uint(0b10110, 5)).unwrap();
        let i = find_balancing_index(&z).unwrap();
        let x = z.invert_prefix(i).unwrap();
        let y = erase(&x, &[6, 7]);
        assert_eq!(exhaustive(&code, &y), vec![z.clone()]);
        let report = bec_decode(&code, &y, DEFAULT_BUDGET).unwrap();
        assert_eq!(report.outcome, BecOutcome::Unique { z, i });
    }

    #[test]
    fn all_erased_is_not_unique() {
        let code = small_code();
        let y: ErasureWord = "????????".parse().unwrap();
        let report = bec_decode(&code, &y, DEFAULT_BUDGET).unwrap();
        assert!(report.outcome.unique().is_none());
        assert_eq!(report.inversion_set.len(), 9);
        assert_eq!(report.residual_erasures, 8);
    }

    #[test]
    fn clean_words_match_genie() {
        let code = build_gallager(56, 2, 8, 3).unwrap();
        let mut rng = stream(21, &[]);
        let mut unique = 0;
        for _ in 0..200 {
            let u = random_word(code.k(), &mut rng);
            let (x, i) = balanced_encode(&code, &u).unwrap();
            let z = code.encode(&u).unwrap();
            let y = erase(x.as_word(), &[]);
            // only the true shift passes every check
            let alone = (0..code.n())
                .filter(|&j| j != i)
                .all(|j| !code.is_codeword(&x.as_word().invert_prefix(j).unwrap()));
            let report = bec_decode(&code, &y, DEFAULT_BUDGET).unwrap();
            assert_eq!(bec_decode_genie(&code, &y, i).unwrap(), Some(z.clone()));
            if alone {
                assert_eq!(report.outcome, BecOutcome::Unique { z, i });
                unique += 1;
            }
        }
        assert!(unique > 100);
    }

    #[test]
    fn decoded_words_are_sound() {
        let code = build_gallager(64, 3, 8, 5).unwrap();
        let mut rng = stream(22, &[]);
        for _ in 0..300 {
            let u = random_word(code.k(), &mut rng);
            let (x, _) = balanced_encode(&code, &u).unwrap();
            let y = apply_bec_with(x.as_word(), 0.25, &mut rng);
            let report = bec_decode(&code, &y, DEFAULT_BUDGET).unwrap();
            if let Some((z, i)) = report.outcome.unique() {
                assert!(code.is_codeword(z));
                let xr = z.invert_prefix(i).unwrap();
                assert!(xr.is_balanced());
                assert_eq!(find_balancing_index(z).unwrap(), i);
                for (p, s) in y.symbols().iter().enumerate() {
                    if let ErasureSymbol::Bit(b) = s {
                        assert_eq!(*b, xr.get(p));
                    }
                }
            }
        }
    }

    #[test]
    fn peeling_recovers_ordinary_codewords() {
        let code = build_gallager(64, 3, 8, 6).unwrap();
        let mut rng = stream(23, &[]);
        let z = code.encode(&random_word(code.k(), &mut rng)).unwrap();
        assert_eq!(peel_decode(&code, &erase(&z, &[3, 40])).unwrap(), Some(z.clone()));
    }
}
