//! Knuth-style balancing for q-ary words.
//!
//! The alphabet of a node is split into `beta` contiguous groups of `alpha`
//! levels each (`beta` the smallest prime factor of the node's alphabet
//! size). Adding `alpha` modulo the alphabet size to a symbol moves it to the
//! next group, so applying that map to a growing prefix changes each group
//! count by at most one per step. Some group among the first `beta - 1` is
//! guaranteed to reach exactly `alpha * m` symbols along the way. That group
//! and the remaining levels are then balanced recursively as subsequences.
//!
//! For `q = 4` this is the pair split `{0,1} | {2,3}` with the map
//! `0→2, 1→3, 2→0, 3→1`, followed by plain binary inversion inside each pair.

use super::word::{BalancedQaryWord, QaryWord};
use crate::error::{Error, Result};

/// One recorded prefix operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceStep {
    /// Number of leading symbols of the node's subsequence that were shifted.
    pub index: usize,
    /// Group that was brought to its exact share; always 0 for two-way splits.
    pub group: usize,
    /// Length of the subsequence the step operated on.
    pub span: usize,
    /// Number of groups at this node.
    pub groups: usize,
}

impl TraceStep {
    /// Bits needed to store this step.
    pub fn bit_cost(&self) -> usize {
        let index_bits = if self.groups == 2 {
            ceil_log2(self.span)
        } else {
            ceil_log2(self.span + 1)
        };
        index_bits + ceil_log2(self.groups - 1)
    }
}

/// Location integers recorded by [`knuth_q_balance`], in pre-order of the
/// split tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BalancingTrace {
    steps: Vec<TraceStep>,
}

impl BalancingTrace {
    pub fn from_steps(steps: Vec<TraceStep>) -> Self {
        BalancingTrace { steps }
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn indices(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.index).collect()
    }

    pub fn bit_cost(&self) -> usize {
        self.steps.iter().map(TraceStep::bit_cost).sum()
    }

    /// Replaces the index list, keeping the tree shape. Used to feed a stored
    /// trace back into [`knuth_q_unbalance`].
    pub fn with_indices(&self, indices: &[usize]) -> Result<Self> {
        if indices.len() != self.steps.len() {
            return Err(Error::MalformedTrace(format!(
                "expected {} indices, got {}",
                self.steps.len(),
                indices.len()
            )));
        }
        let steps = self
            .steps
            .iter()
            .zip(indices)
            .map(|(s, &index)| TraceStep { index, ..*s })
            .collect();
        Ok(BalancingTrace { steps })
    }
}

pub(crate) fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..=n).find(|d| n % d == 0).unwrap_or(n)
}

/// Split of a node's sorted level list.
struct Split {
    groups: usize,
    per_group: usize,
}

impl Split {
    fn of(levels: usize) -> Self {
        let groups = smallest_prime_factor(levels);
        Split {
            groups,
            per_group: levels / groups,
        }
    }

    fn group_of(&self, local: usize) -> usize {
        local / self.per_group
    }
}

fn local_index(levels: &[u8], symbol: u8) -> Result<usize> {
    levels
        .binary_search(&symbol)
        .map_err(|_| Error::MalformedTrace(format!("symbol {symbol} outside node alphabet")))
}

/// Shifts a symbol by `shift` places within the node alphabet.
fn rotate(levels: &[u8], symbol: u8, shift: usize) -> u8 {
    let local = levels.binary_search(&symbol).expect("symbol in node alphabet");
    levels[(local + shift) % levels.len()]
}

/// Child alphabets after fixing `group`: that group's levels, then the rest.
fn children(levels: &[u8], split: &Split, group: usize) -> (Vec<u8>, Vec<u8>) {
    let lo = group * split.per_group;
    let hi = lo + split.per_group;
    let fixed = levels[lo..hi].to_vec();
    let rest = levels[..lo].iter().chain(&levels[hi..]).copied().collect();
    (fixed, rest)
}

fn positions_in(symbols: &[u8], positions: &[usize], alphabet: &[u8]) -> Vec<usize> {
    positions
        .iter()
        .copied()
        .filter(|&p| alphabet.binary_search(&symbols[p]).is_ok())
        .collect()
}

fn balance_node(
    symbols: &mut [u8],
    positions: &[usize],
    levels: &[u8],
    m: usize,
    steps: &mut Vec<TraceStep>,
) {
    if levels.len() <= 1 {
        return;
    }
    let split = Split::of(levels.len());
    let target = split.per_group * m;
    let candidates = (split.groups - 1).max(1);
    let mut counts = vec![0usize; split.groups];
    for &p in positions {
        let local = levels.binary_search(&symbols[p]).expect("symbol in node alphabet");
        counts[split.group_of(local)] += 1;
    }
    let mut found = None;
    for i in 0..=positions.len() {
        if let Some(g) = (0..candidates).find(|&g| counts[g] == target) {
            found = Some((i, g));
            break;
        }
        if i == positions.len() {
            break;
        }
        let p = positions[i];
        let local = levels.binary_search(&symbols[p]).expect("symbol in node alphabet");
        let g = split.group_of(local);
        counts[g] -= 1;
        counts[(g + 1) % split.groups] += 1;
        symbols[p] = rotate(levels, symbols[p], split.per_group);
    }
    let (index, group) = found.expect("group-count walk always reaches the target share");
    steps.push(TraceStep {
        index,
        group,
        span: positions.len(),
        groups: split.groups,
    });
    let (fixed, rest) = children(levels, &split, group);
    let fixed_pos = positions_in(symbols, positions, &fixed);
    let rest_pos = positions_in(symbols, positions, &rest);
    balance_node(symbols, &fixed_pos, &fixed, m, steps);
    balance_node(symbols, &rest_pos, &rest, m, steps);
}

/// Balances `u` (length a multiple of `q`) by recursive prefix operations.
pub fn knuth_q_balance(u: &QaryWord) -> Result<(BalancedQaryWord, BalancingTrace)> {
    let q = u.q();
    if u.len() % q != 0 || u.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "length {} is not a positive multiple of q = {q}",
            u.len()
        )));
    }
    let m = u.len() / q;
    let levels: Vec<u8> = (0..q).map(|s| s as u8).collect();
    let positions: Vec<usize> = (0..u.len()).collect();
    let mut word = u.clone();
    let mut steps = Vec::with_capacity(q - 1);
    balance_node(word.symbols_mut(), &positions, &levels, m, &mut steps);
    Ok((BalancedQaryWord::new(word)?, BalancingTrace { steps }))
}

fn unbalance_node<'a, I>(
    symbols: &mut [u8],
    positions: &[usize],
    levels: &[u8],
    m: usize,
    steps: &mut I,
) -> Result<()>
where
    I: Iterator<Item = &'a TraceStep>,
{
    if levels.len() <= 1 {
        return Ok(());
    }
    let split = Split::of(levels.len());
    let step = steps
        .next()
        .ok_or_else(|| Error::MalformedTrace("trace ended early".into()))?;
    if step.index > positions.len() {
        return Err(Error::MalformedTrace(format!(
            "index {} exceeds subsequence length {}",
            step.index,
            positions.len()
        )));
    }
    if step.group >= (split.groups - 1).max(1) {
        return Err(Error::MalformedTrace(format!(
            "group {} invalid for a {}-way split",
            step.group, split.groups
        )));
    }
    let (fixed, rest) = children(levels, &split, step.group);
    let fixed_pos = positions_in(symbols, positions, &fixed);
    if fixed_pos.len() != split.per_group * m {
        return Err(Error::MalformedTrace(format!(
            "group {} holds {} symbols, expected {}",
            step.group,
            fixed_pos.len(),
            split.per_group * m
        )));
    }
    let rest_pos = positions_in(symbols, positions, &rest);
    unbalance_node(symbols, &fixed_pos, &fixed, m, steps)?;
    unbalance_node(symbols, &rest_pos, &rest, m, steps)?;
    let back = levels.len() - split.per_group;
    for &p in &positions[..step.index] {
        local_index(levels, symbols[p])?;
        symbols[p] = rotate(levels, symbols[p], back);
    }
    Ok(())
}

/// Exact inverse of [`knuth_q_balance`].
pub fn knuth_q_unbalance(x: &BalancedQaryWord, trace: &BalancingTrace) -> Result<QaryWord> {
    let q = x.q();
    let m = x.m();
    let levels: Vec<u8> = (0..q).map(|s| s as u8).collect();
    let positions: Vec<usize> = (0..x.len()).collect();
    let mut word = x.as_word().clone();
    let mut steps = trace.steps.iter();
    unbalance_node(word.symbols_mut(), &positions, &levels, m, &mut steps)?;
    if steps.next().is_some() {
        return Err(Error::MalformedTrace("trailing trace entries".into()));
    }
    Ok(word)
}

/// Two-group count walk used by the splitting argument: the number of
/// symbols of `u` in group `group` after applying the group rotation to the
/// first `i` symbols, for every `i` in `0..=len`.
pub fn group_count_walk(u: &QaryWord, groups: usize, group: usize) -> Result<Vec<usize>> {
    let q = u.q();
    if groups < 2 || q % groups != 0 || group >= groups {
        return Err(Error::InvalidParameter(format!(
            "cannot split q = {q} into {groups} groups"
        )));
    }
    let per_group = q / groups;
    let mut count = u
        .symbols()
        .iter()
        .filter(|&&s| usize::from(s) / per_group == group)
        .count();
    let mut walk = Vec::with_capacity(u.len() + 1);
    walk.push(count);
    for &s in u.symbols() {
        let g = usize::from(s) / per_group;
        if g == group {
            count -= 1;
        } else if (g + 1) % groups == group {
            count += 1;
        }
        walk.push(count);
    }
    Ok(walk)
}
