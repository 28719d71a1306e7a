//! Low-density parity-check codes and their balanced variant.
//!
//! A balanced LDPC codeword is an ordinary codeword `z` with its first `i`
//! bits inverted, `i` being the smallest index that balances it. The index is
//! not stored; decoders recover it from the parity structure.

mod balanced;
mod bec;
mod bp;
mod inversion;
mod lambda;

pub use balanced::{
    balanced_decode_exhaustive, balanced_decode_symmetric, balanced_encode, bsc_llr,
    hard_llr, log_likelihood_of, BalancedDecode, SymmetricDecoder,
};
pub use bec::{bec_decode, bec_decode_genie, peel_decode, BecOutcome, BecReport, DEFAULT_BUDGET};
pub use bp::{bp_decode, BpResult, LLR_CLIP};
pub use inversion::{check_interval_sets, interval_sets, InversionSet};
pub use lambda::{
    candidate_inversions, lambda_score, lambda_scores_all_shifts, lambda_scores_from_scratch,
    ShiftScore,
};

use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::gf2::{dot, pack, rref, BitMatrix};
use crate::rng::rng_from_seed;
use crate::word::BitWord;

/// Draws allowed before giving up on a Gallager matrix of acceptable rank.
pub const MAX_REDRAWS: u64 = 64;

/// Construction record of a Gallager code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ensemble {
    pub a: usize,
    pub b: usize,
    /// Seed requested by the caller.
    pub requested_seed: u64,
    /// Seed of the accepted draw.
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    checks: Vec<Vec<usize>>,
    vars: Vec<Vec<usize>>,
    // edge e joins variable `edge_var[e]` to a check; edges of check c are
    // the range check_start[c]..check_start[c + 1]
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
    h: BitMatrix,
    reduced: BitMatrix,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
    ensemble: Option<Ensemble>,
}

impl LdpcCode {
    /// Builds a code from the variable lists of its checks.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut checks = checks;
        let mut h = BitMatrix::zeros(checks.len(), n);
        for (c, vs) in checks.iter_mut().enumerate() {
            vs.sort_unstable();
            if vs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("check {c} repeats a variable")));
            }
            for &v in vs.iter() {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, len: n });
                }
                h.set(c, v, true);
            }
        }
        let mut vars = vec![Vec::new(); n];
        let mut check_start = Vec::with_capacity(checks.len() + 1);
        let mut edge_var = Vec::new();
        let mut var_edges = vec![Vec::new(); n];
        for (c, vs) in checks.iter().enumerate() {
            check_start.push(edge_var.len());
            for &v in vs {
                vars[v].push(c);
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
        }
        check_start.push(edge_var.len());
        let e = rref(&h);
        Ok(LdpcCode {
            n,
            checks,
            vars,
            check_start,
            edge_var,
            var_edges,
            h,
            reduced: e.reduced,
            pivot_cols: e.pivot_cols,
            free_cols: e.free_cols,
            ensemble: None,
        })
    }

    /// Gallager `(n, a, b)` code: `a` stacked blocks, each a random column
    /// permutation of the block with rows `[1^b 0 …], [0^b 1^b 0 …], …`.
    ///
    /// Each block's rows sum to the all-ones row, so the rank is at most
    /// `n a / b - (a - 1)`. Draws that fall short of that are redrawn with the
    /// next seed.
    pub fn gallager(n: usize, a: usize, b: usize, seed: u64) -> Result<Self> {
        if a < 2 || b < 2 || n % b != 0 {
            return Err(Error::InvalidParameter(format!(
                "gallager ensemble needs a >= 2, b >= 2 and b | n (got n={n}, a={a}, b={b})"
            )));
        }
        let rows_per_block = n / b;
        let full_rank = a * rows_per_block - (a - 1);
        for attempt in 0..MAX_REDRAWS {
            let s = seed.wrapping_add(attempt);
            let mut rng = rng_from_seed(s);
            let mut checks = Vec::with_capacity(a * rows_per_block);
            for _ in 0..a {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                for row in 0..rows_per_block {
                    checks.push(perm[row * b..(row + 1) * b].to_vec());
                }
            }
            let mut code = LdpcCode::from_checks(n, checks)?;
            if code.rank() >= full_rank {
                code.ensemble = Some(Ensemble { a, b, requested_seed: seed, seed: s });
                return Ok(code);
            }
        }
        Err(Error::RankDeficient { attempts: MAX_REDRAWS as usize })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity checks (rows of H).
    pub fn r(&self) -> usize {
        self.checks.len()
    }

    /// Rank of H.
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Dimension of the code.
    pub fn k(&self) -> usize {
        self.n - self.rank()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn ensemble(&self) -> Option<Ensemble> {
        self.ensemble
    }

    /// Sorted variable indices of check `c`.
    pub fn check(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    /// Checks containing variable `v`.
    pub fn var(&self, v: usize) -> &[usize] {
        &self.vars[v]
    }

    pub fn parity_matrix(&self) -> &BitMatrix {
        &self.h
    }

    /// Positions carrying message bits, increasing.
    pub fn info_positions(&self) -> &[usize] {
        &self.free_cols
    }

    pub(crate) fn edges_of_check(&self, c: usize) -> std::ops::Range<usize> {
        self.check_start[c]..self.check_start[c + 1]
    }

    pub(crate) fn edges_of_var(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.edge_var.len()
    }

    /// Codeword carrying `u` on the information positions.
    pub fn encode(&self, u: &BitWord) -> Result<BitWord> {
        if u.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), actual: u.len() });
        }
        let mut z = vec![0u8; self.n];
        for (&pos, bit) in self.free_cols.iter().zip(u.iter()) {
            z[pos] = bit;
        }
        let packed = pack(z.iter().map(|&b| b == 1), self.n);
        for (row, &pos) in self.pivot_cols.iter().enumerate() {
            z[pos] = u8::from(dot(self.reduced.row(row), &packed));
        }
        BitWord::from_bits(z)
    }

    /// Message bits of a codeword.
    pub fn extract_info(&self, z: &BitWord) -> Result<BitWord> {
        self.check_len(z.len())?;
        Ok(BitWord::from_bools(self.free_cols.iter().map(|&p| z.get(p) == 1)))
    }

    /// `H y` as one bit per check.
    pub fn syndrome(&self, y: &BitWord) -> Result<Vec<u8>> {
        self.check_len(y.len())?;
        Ok(self
            .checks
            .iter()
            .map(|vs| vs.iter().fold(0u8, |acc, &v| acc ^ y.get(v)))
            .collect())
    }

    /// Number of unsatisfied checks.
    pub fn syndrome_weight(&self, y: &BitWord) -> Result<usize> {
        Ok(self.syndrome(y)?.iter().filter(|&&s| s == 1).count())
    }

    pub fn is_codeword(&self, y: &BitWord) -> bool {
        matches!(self.syndrome_weight(y), Ok(0))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: len });
        }
        Ok(())
    }

    /// Sparse listing of H in matrix-market coordinate form.
    pub fn to_matrix_market(&self) -> String {
        let mut out = String::from("%%MatrixMarket matrix coordinate pattern general\n");
        match self.ensemble {
            Some(e) => writeln!(
                out,
                "% ldpc n={} a={} b={} seed={} requested_seed={}",
                self.n, e.a, e.b, e.seed, e.requested_seed
            ),
            None => writeln!(out, "% ldpc n={}", self.n),
        }
        .expect("writing to a string");
        writeln!(out, "{} {} {}", self.r(), self.n, self.edge_count()).expect("writing to a string");
        for (c, vs) in self.checks.iter().enumerate() {
            for &v in vs {
                writeln!(out, "{} {}", c + 1, v + 1).expect("writing to a string");
            }
        }
        out
    }

    pub fn from_matrix_market<R: BufRead>(reader: R) -> Result<Self> {
        let mut ensemble = None;
        let mut shape: Option<(usize, usize, usize)> = None;
        let mut checks: Vec<Vec<usize>> = Vec::new();
        let mut entries = 0;
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('%') {
                if let Some(fields) = comment.trim().strip_prefix("ldpc") {
                    ensemble = parse_header(fields)?;
                }
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            match (shape, nums.as_slice()) {
                (None, &[rows, cols, nnz]) => {
                    shape = Some((rows, cols, nnz));
                    checks = vec![Vec::new(); rows];
                }
                (Some((rows, cols, _)), &[r, c]) => {
                    if r == 0 || r > rows || c == 0 || c > cols {
                        return Err(Error::Parse(format!("entry ({r}, {c}) outside {rows}x{cols}")));
                    }
                    checks[r - 1].push(c - 1);
                    entries += 1;
                }
                _ => return Err(Error::Parse(format!("unexpected line `{line}`"))),
            }
        }
        let (_, cols, nnz) = shape.ok_or_else(|| Error::Parse("missing size line".into()))?;
        if nnz != entries {
            return Err(Error::Parse(format!("expected {nnz} entries, found {entries}")));
        }
        let mut code = LdpcCode::from_checks(cols, checks)?;
        code.ensemble = ensemble;
        Ok(code)
    }
}

fn parse_header(fields: &str) -> Result<Option<Ensemble>> {
    let mut a = None;
    let mut b = None;
    let mut seed = None;
    let mut requested = None;
    for kv in fields.split_whitespace() {
        let Some((k, v)) = kv.split_once('=') else { continue };
        let parse = |v: &str| v.parse::<u64>().map_err(|e| Error::Parse(format!("`{kv}`: {e}")));
        match k {
            "a" => a = Some(parse(v)? as usize),
            "b" => b = Some(parse(v)? as usize),
            "seed" => seed = Some(parse(v)?),
            "requested_seed" => requested = Some(parse(v)?),
            _ => {}
        }
    }
    Ok(match (a, b, seed) {
        (Some(a), Some(b), Some(seed)) => Some(Ensemble {
            a,
            b,
            seed,
            requested_seed: requested.unwrap_or(seed),
        }),
        _ => None,
    })
}

/// Gallager `(n, a, b)` code; see [`LdpcCode::gallager`].
pub fn build_gallager(n: usize, a: usize, b: usize, seed: u64) -> Result<LdpcCode> {
    LdpcCode::gallager(n, a, b, seed)
}
