//! Shift scores for locating the inversion index.
//!
//! For a shift `j` the channel values of the first `j` variables are negated
//! and a few rounds of belief propagation are run; the score sums, over all
//! checks, the product of `tanh(m/2)` of the messages entering the check. A
//! large score means most checks are confidently satisfied.
//!
//! One round uses the channel values directly and reduces to the integer
//! `r - 2|H y|`, computed exactly. More rounds reuse the message update
//! functions of the decoder.

use super::bp::{check_update, clip, variable_update};
use super::LdpcCode;
use crate::error::{Error, Result};

/// Largest supported number of rounds.
pub const MAX_ROUNDS: usize = 3;

/// Score of every prefix-inversion shift `j` in `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftScore {
    pub scores: Vec<f64>,
    pub rounds: usize,
}

impl ShiftScore {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Shift with the highest score, smallest on ties.
    pub fn argmax(&self) -> Option<usize> {
        candidate_inversions(&self.scores, 1).first().copied()
    }
}

fn check_rounds(rounds: usize) -> Result<()> {
    if !(1..=MAX_ROUNDS).contains(&rounds) {
        return Err(Error::InvalidParameter(format!(
            "rounds must be in 1..={MAX_ROUNDS}, got {rounds}"
        )));
    }
    Ok(())
}

fn shifted(llr: &[f64], j: usize) -> Vec<f64> {
    llr.iter()
        .enumerate()
        .map(|(v, &l)| if v < j { -clip(l) } else { clip(l) })
        .collect()
}

/// Pairwise sum over a fixed binary tree so that partial updates reproduce a
/// full rebuild bit for bit.
struct SumTree {
    size: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    fn new(leaves: &[f64]) -> Self {
        let size = leaves.len().next_power_of_two().max(1);
        let mut nodes = vec![0.0; 2 * size];
        nodes[size..size + leaves.len()].copy_from_slice(leaves);
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i] + nodes[2 * i + 1];
        }
        SumTree { size, nodes }
    }

    fn set(&mut self, leaf: usize, value: f64) {
        let mut i = self.size + leaf;
        self.nodes[i] = value;
        while i > 1 {
            i /= 2;
            self.nodes[i] = self.nodes[2 * i] + self.nodes[2 * i + 1];
        }
    }

    fn total(&self) -> f64 {
        self.nodes[1]
    }
}

/// Messages of a truncated run of belief propagation.
struct Messages {
    m: Vec<f64>,
    // vc[k]: variable-to-check messages of round k; cv[k] is computed from vc[k]
    vc: Vec<Vec<f64>>,
    cv: Vec<Vec<f64>>,
}

impl Messages {
    fn new(code: &LdpcCode, m: Vec<f64>, rounds: usize) -> Self {
        let depth = rounds - 1;
        let edges = code.edge_count();
        let mut msgs = Messages {
            m,
            vc: vec![vec![0.0; edges]; depth + 1],
            cv: vec![vec![0.0; edges]; depth],
        };
        for k in 0..=depth {
            for v in 0..code.n() {
                msgs.update_var(code, k, v);
            }
            if k < depth {
                for c in 0..code.r() {
                    check_update(code, c, &msgs.vc[k], &mut msgs.cv[k]);
                }
            }
        }
        msgs
    }

    fn update_var(&mut self, code: &LdpcCode, k: usize, v: usize) {
        if k == 0 {
            for &e in code.edges_of_var(v) {
                self.vc[0][e] = self.m[v];
            }
        } else {
            variable_update(code, v, self.m[v], &self.cv[k - 1], &mut self.vc[k]);
        }
    }

    fn term(&self, code: &LdpcCode, c: usize) -> f64 {
        let last = &self.vc[self.vc.len() - 1];
        code.edges_of_check(c).fold(1.0, |acc, e| acc * (last[e] / 2.0).tanh())
    }
}

fn unsatisfied(code: &LdpcCode, hard: &[u8]) -> usize {
    (0..code.r())
        .filter(|&c| code.check(c).iter().fold(0, |acc, &v| acc ^ hard[v]) == 1)
        .count()
}

fn hard_bits(m: &[f64]) -> Vec<u8> {
    m.iter().map(|&l| u8::from(l < 0.0)).collect()
}

/// Score of the unshifted word.
pub fn lambda_score(code: &LdpcCode, llr: &[f64], rounds: usize) -> Result<f64> {
    code.check_len(llr.len())?;
    check_rounds(rounds)?;
    Ok(score_of(code, shifted(llr, 0), rounds))
}

fn score_of(code: &LdpcCode, m: Vec<f64>, rounds: usize) -> f64 {
    if rounds == 1 {
        let bad = unsatisfied(code, &hard_bits(&m));
        return code.r() as f64 - 2.0 * bad as f64;
    }
    let msgs = Messages::new(code, m, rounds);
    let terms: Vec<f64> = (0..code.r()).map(|c| msgs.term(code, c)).collect();
    SumTree::new(&terms).total()
}

/// Scores of all shifts, each computed independently.
pub fn lambda_scores_from_scratch(code: &LdpcCode, llr: &[f64], rounds: usize) -> Result<ShiftScore> {
    code.check_len(llr.len())?;
    check_rounds(rounds)?;
    let scores = (0..code.n()).map(|j| score_of(code, shifted(llr, j), rounds)).collect();
    Ok(ShiftScore { scores, rounds })
}

/// Scores of all shifts. Moving from shift `j - 1` to `j` negates one
/// channel value, so only messages within `rounds` hops of that variable are
/// recomputed.
pub fn lambda_scores_all_shifts(code: &LdpcCode, llr: &[f64], rounds: usize) -> Result<ShiftScore> {
    code.check_len(llr.len())?;
    check_rounds(rounds)?;
    let n = code.n();
    let m = shifted(llr, 0);
    let mut scores = Vec::with_capacity(n);
    if rounds == 1 {
        let mut hard = hard_bits(&m);
        let mut syndrome: Vec<u8> =
            (0..code.r()).map(|c| code.check(c).iter().fold(0, |acc, &v| acc ^ hard[v])).collect();
        let mut bad = syndrome.iter().filter(|&&s| s == 1).count();
        let r = code.r() as f64;
        scores.push(r - 2.0 * bad as f64);
        for j in 1..n {
            let v = j - 1;
            let bit = u8::from(-m[v] < 0.0);
            if bit != hard[v] {
                hard[v] = bit;
                for &c in code.var(v) {
                    syndrome[c] ^= 1;
                    if syndrome[c] == 1 {
                        bad += 1;
                    } else {
                        bad -= 1;
                    }
                }
            }
            scores.push(r - 2.0 * bad as f64);
        }
        return Ok(ShiftScore { scores, rounds });
    }

    let depth = rounds - 1;
    let mut msgs = Messages::new(code, m, rounds);
    let terms: Vec<f64> = (0..code.r()).map(|c| msgs.term(code, c)).collect();
    let mut tree = SumTree::new(&terms);
    scores.push(tree.total());

    let mut var_mark = vec![usize::MAX; n];
    let mut check_mark = vec![usize::MAX; code.r()];
    let mut stamp = 0;
    for j in 1..n {
        let v0 = j - 1;
        msgs.m[v0] = -msgs.m[v0];
        let mut dirty_vars = vec![v0];
        for k in 0..=depth {
            for &v in &dirty_vars {
                msgs.update_var(code, k, v);
            }
            stamp += 1;
            let mut dirty_checks = Vec::new();
            for &v in &dirty_vars {
                for &c in code.var(v) {
                    if check_mark[c] != stamp {
                        check_mark[c] = stamp;
                        dirty_checks.push(c);
                    }
                }
            }
            if k < depth {
                for &c in &dirty_checks {
                    check_update(code, c, &msgs.vc[k], &mut msgs.cv[k]);
                }
                let mut next = Vec::new();
                for &v in dirty_vars.iter().chain(dirty_checks.iter().flat_map(|&c| code.check(c))) {
                    if var_mark[v] != stamp {
                        var_mark[v] = stamp;
                        next.push(v);
                    }
                }
                dirty_vars = next;
            } else {
                for &c in &dirty_checks {
                    tree.set(c, msgs.term(code, c));
                }
            }
        }
        scores.push(tree.total());
    }
    Ok(ShiftScore { scores, rounds })
}

/// At most `c` local maxima with the highest scores, ties to the smaller
/// shift. Shift `j` is a local maximum when its score is strictly above that
/// of `j - 1` and at least that of `j + 1` (missing neighbors are ignored).
pub fn candidate_inversions(scores: &[f64], c: usize) -> Vec<usize> {
    let n = scores.len();
    let mut maxima: Vec<usize> = (0..n)
        .filter(|&j| {
            (j == 0 || scores[j] > scores[j - 1]) && (j + 1 == n || scores[j] >= scores[j + 1])
        })
        .collect();
    maxima.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    maxima.truncate(c);
    maxima
}
