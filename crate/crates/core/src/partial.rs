//! Partial-balanced modulation.
//!
//! Only the information segment is balanced. The stored word is
//! `[ũ, i, r]`: the balanced message `ũ`, the inversion index `i` in plain
//! binary, and the parity `r` of a systematic code over `[ũ, i]`. The cells
//! are scattered over the block by a seeded permutation, and the reader picks
//! the threshold that balances the information cells alone.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::ldpc::{bp_decode, hard_llr, LdpcCode, LLR_CLIP, MAX_REDRAWS};
use crate::rng::{derive_seed, rng_from_seed};
use crate::thresholding::{balancing_threshold_exact, read_with_threshold, CellLevelVector};
use crate::word::{find_balancing_index, BalancedWord, BitWord};

/// A systematic binary code: codewords are the message followed by parity.
pub trait SystematicCode {
    /// Codeword length.
    fn n(&self) -> usize;
    /// Message length.
    fn k(&self) -> usize;
    /// Parity bits for a `k`-bit message.
    fn parity(&self, message: &BitWord) -> Result<BitWord>;
    /// Message of the nearest codeword, or [`Error::DecodeFailure`].
    fn decode(&self, received: &BitWord) -> Result<BitWord>;
    /// Number of bit errors always corrected.
    fn capability(&self) -> usize;

    fn encode(&self, message: &BitWord) -> Result<BitWord> {
        Ok(message.concat(&self.parity(message)?))
    }
}

/// Shortened LDPC code with belief propagation decoding.
///
/// Message bits occupy the first information positions of the mother code;
/// the remaining information positions are fixed to zero and not sent.
#[derive(Debug, Clone)]
pub struct LdpcEcc {
    code: LdpcCode,
    message_len: usize,
    // mother-code positions in transmitted order: message, then parity
    sent: Vec<usize>,
    shortened: Vec<usize>,
    llr_magnitude: f64,
    max_iter: usize,
    capability: usize,
}

impl LdpcEcc {
    /// Wraps `code`, shortened to `message_len` message bits, and certifies
    /// its correction capability by decoding every error pattern of weight up
    /// to `max_t`.
    pub fn new(code: LdpcCode, message_len: usize, max_t: usize) -> Result<Self> {
        if message_len == 0 || message_len > code.k() {
            return Err(Error::InvalidParameter(format!(
                "message length {message_len} does not fit code dimension {}",
                code.k()
            )));
        }
        let info = code.info_positions();
        let mut sent: Vec<usize> = info[..message_len].to_vec();
        let shortened = info[message_len..].to_vec();
        let mut is_info = vec![false; code.n()];
        for &p in info {
            is_info[p] = true;
        }
        sent.extend((0..code.n()).filter(|&p| !is_info[p]));
        let mut ecc = LdpcEcc {
            code,
            message_len,
            sent,
            shortened,
            llr_magnitude: (0.98f64 / 0.02).ln(),
            max_iter: 50,
            capability: 0,
        };
        ecc.capability = ecc.certify(max_t);
        Ok(ecc)
    }

    /// Shortest regular `(n, 3, 6)` mother code with room for `message_len`
    /// bits whose certified capability reaches `min_t`. Draws are repeated
    /// with derived seeds until one qualifies.
    pub fn for_message(message_len: usize, seed: u64, min_t: usize) -> Result<Self> {
        let mut n = 12;
        while n / 2 + 2 < message_len {
            n += 6;
        }
        for draw in 0..MAX_REDRAWS {
            let code = LdpcCode::gallager(n, 3, 6, derive_seed(seed, &[draw]))?;
            let ecc = Self::new(code, message_len, min_t)?;
            if ecc.capability >= min_t {
                return Ok(ecc);
            }
        }
        Err(Error::InvalidParameter(format!(
            "no ({n}, 3, 6) draw corrects {min_t} errors after {MAX_REDRAWS} attempts"
        )))
    }

    pub fn mother(&self) -> &LdpcCode {
        &self.code
    }

    /// Largest `t <= max_t` such that every pattern of at most `t` errors on
    /// the all-zero codeword decodes correctly. Belief propagation commutes
    /// with adding a codeword, so the bound holds for every codeword.
    fn certify(&self, max_t: usize) -> usize {
        let n = self.n();
        let zero = BitWord::zeros(n);
        let ok = |positions: &[usize]| {
            let mut y = zero.clone();
            for &p in positions {
                y.flip(p);
            }
            matches!(self.decode(&y), Ok(m) if m.weight() == 0)
        };
        if !ok(&[]) {
            return 0;
        }
        let mut t = 0;
        while t < max_t {
            let w = t + 1;
            if !combinations(n, w).all(|c| ok(&c)) {
                break;
            }
            t = w;
        }
        t
    }

    fn mother_word(&self, sent_bits: &BitWord) -> BitWord {
        let mut z = BitWord::zeros(self.code.n());
        for (&p, b) in self.sent.iter().zip(sent_bits.iter()) {
            z.set(p, b == 1);
        }
        z
    }
}

/// All `w`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, w: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if w <= n { Some((0..w).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let c = current.as_mut()?;
        let mut k = w;
        loop {
            if k == 0 {
                current = None;
                break;
            }
            k -= 1;
            if c[k] < n - w + k {
                c[k] += 1;
                for j in k + 1..w {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

impl SystematicCode for LdpcEcc {
    fn n(&self) -> usize {
        self.sent.len()
    }

    fn k(&self) -> usize {
        self.message_len
    }

    fn parity(&self, message: &BitWord) -> Result<BitWord> {
        if message.len() != self.message_len {
            return Err(Error::LengthMismatch { expected: self.message_len, actual: message.len() });
        }
        let full = message.concat(&BitWord::zeros(self.code.k() - self.message_len));
        let z = self.code.encode(&full)?;
        Ok(BitWord::from_bools(self.sent[self.message_len..].iter().map(|&p| z.get(p) == 1)))
    }

    fn decode(&self, received: &BitWord) -> Result<BitWord> {
        if received.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: received.len() });
        }
        let mut llr = hard_llr(&self.mother_word(received), self.llr_magnitude);
        for &p in &self.shortened {
            llr[p] = LLR_CLIP;
        }
        let r = bp_decode(&self.code, &llr, self.max_iter)?;
        if !r.satisfied || self.shortened.iter().any(|&p| r.hard.get(p) == 1) {
            return Err(Error::DecodeFailure("parity checks not satisfied".into()));
        }
        Ok(BitWord::from_bools(self.sent[..self.message_len].iter().map(|&p| r.hard.get(p) == 1)))
    }

    fn capability(&self) -> usize {
        self.capability
    }
}

/// `ceil(log2 k)`, the width of the stored inversion index.
pub fn index_bits(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Logical contents of a partial-balanced block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialCodeword {
    pub u_tilde: BalancedWord,
    pub i_bits: BitWord,
    pub parity: BitWord,
}

impl PartialCodeword {
    /// `[ũ, i, r]` in logical order.
    pub fn logical(&self) -> BitWord {
        self.u_tilde.as_word().concat(&self.i_bits).concat(&self.parity)
    }
}

/// Permutation from logical positions to physical cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    to_cell: Vec<usize>,
}

impl Layout {
    pub fn identity(n: usize) -> Self {
        Layout { to_cell: (0..n).collect() }
    }

    /// Uniform random permutation derived from `seed`.
    pub fn seeded(n: usize, seed: u64) -> Self {
        let mut to_cell: Vec<usize> = (0..n).collect();
        to_cell.shuffle(&mut rng_from_seed(seed));
        Layout { to_cell }
    }

    pub fn from_permutation(to_cell: Vec<usize>) -> Result<Self> {
        let n = to_cell.len();
        let mut seen = vec![false; n];
        for &c in &to_cell {
            if c >= n || seen[c] {
                return Err(Error::InvalidParameter("layout is not a permutation".into()));
            }
            seen[c] = true;
        }
        Ok(Layout { to_cell })
    }

    pub fn len(&self) -> usize {
        self.to_cell.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_cell.is_empty()
    }

    pub fn cell(&self, logical: usize) -> usize {
        self.to_cell[logical]
    }

    pub fn scatter(&self, logical: &BitWord) -> BitWord {
        let mut out = BitWord::zeros(logical.len());
        for (p, b) in logical.iter().enumerate() {
            out.set(self.to_cell[p], b == 1);
        }
        out
    }

    pub fn gather(&self, cells: &BitWord) -> BitWord {
        BitWord::from_bools(self.to_cell.iter().map(|&c| cells.get(c) == 1))
    }
}

/// Partial-balanced codec over a systematic code with message length
/// `k + ceil(log2 k)`.
pub struct PartialBalanced<C> {
    k: usize,
    ecc: C,
    layout: Layout,
}

impl<C: SystematicCode> PartialBalanced<C> {
    pub fn new(k: usize, ecc: C, layout_seed: u64) -> Result<Self> {
        if k == 0 || k % 2 != 0 {
            return Err(Error::OddLength(k));
        }
        let expected = k + index_bits(k);
        if ecc.k() != expected {
            return Err(Error::LengthMismatch { expected, actual: ecc.k() });
        }
        let layout = Layout::seeded(ecc.n(), layout_seed);
        Ok(PartialBalanced { k, ecc, layout })
    }

    pub fn with_layout(mut self, layout: Layout) -> Result<Self> {
        if layout.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: layout.len() });
        }
        self.layout = layout;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.ecc.n()
    }

    pub fn ecc(&self) -> &C {
        &self.ecc
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Physical cells holding the message segment.
    pub fn info_cells(&self) -> Vec<usize> {
        (0..self.k).map(|p| self.layout.cell(p)).collect()
    }

    pub fn encode(&self, u: &BitWord) -> Result<PartialCodeword> {
        if u.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: u.len() });
        }
        let i = find_balancing_index(u)?;
        let u_tilde = BalancedWord::new(u.invert_prefix(i)?)?;
        let i_bits = BitWord::from_uint(i as u64, index_bits(self.k));
        let parity = self.ecc.parity(&u_tilde.as_word().concat(&i_bits))?;
        Ok(PartialCodeword { u_tilde, i_bits, parity })
    }

    /// Cell contents of an encoded block.
    pub fn to_cells(&self, cw: &PartialCodeword) -> BitWord {
        self.layout.scatter(&cw.logical())
    }

    pub fn encode_cells(&self, u: &BitWord) -> Result<BitWord> {
        Ok(self.to_cells(&self.encode(u)?))
    }

    /// Threshold balancing the message cells only.
    pub fn read_threshold(&self, levels: &CellLevelVector) -> Result<f64> {
        if levels.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: levels.len() });
        }
        Ok(balancing_threshold_exact(&levels.select(&self.info_cells()))?.threshold)
    }

    /// Reads every cell at the message-balancing threshold.
    pub fn read(&self, levels: &CellLevelVector) -> Result<BitWord> {
        Ok(read_with_threshold(levels, self.read_threshold(levels)?))
    }

    pub fn decode(&self, cells: &BitWord) -> Result<BitWord> {
        if cells.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: cells.len() });
        }
        let logical = self.layout.gather(cells);
        let message = self.ecc.decode(&logical)?;
        let u_tilde = message.slice(0..self.k);
        let i = message
            .slice(self.k..message.len())
            .to_uint()
            .ok_or_else(|| Error::DecodeFailure("index field too wide".into()))? as usize;
        if i >= self.k {
            return Err(Error::IndexOutOfRange { index: i, len: self.k });
        }
        u_tilde.invert_prefix(i)
    }
}

/// Encodes `u` into physical cell contents.
pub fn pb_encode<C: SystematicCode>(codec: &PartialBalanced<C>, u: &BitWord) -> Result<PartialCodeword> {
    codec.encode(u)
}

pub fn pb_read<C: SystematicCode>(codec: &PartialBalanced<C>, levels: &CellLevelVector) -> Result<BitWord> {
    codec.read(levels)
}

pub fn pb_decode<C: SystematicCode>(codec: &PartialBalanced<C>, cells: &BitWord) -> Result<BitWord> {
    codec.decode(cells)
}

/// Data rates of a fixed code and of its partial-balanced counterpart:
/// `k_fixed / n` and `(k_pb - i_bits) / n`.
pub fn rate_fixed_vs_partial(n: usize, k_fixed: usize, k_pb: usize, i_bits: usize) -> Result<(f64, f64)> {
    if n == 0 || k_fixed > n || k_pb > n || i_bits > k_pb {
        return Err(Error::InvalidParameter(format!(
            "inconsistent rate arguments n={n}, k_fixed={k_fixed}, k_pb={k_pb}, i_bits={i_bits}"
        )));
    }
    Ok((k_fixed as f64 / n as f64, (k_pb - i_bits) as f64 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{random_balanced_word, random_word, sample_levels_with, DriftModel};
    use crate::rng::stream;

    /// Parity bits each covering a stride of the message; no correction.
    struct StrideParity {
        k: usize,
        r: usize,
    }

    impl SystematicCode for StrideParity {
        fn n(&self) -> usize {
            self.k + self.r
        }
        fn k(&self) -> usize {
            self.k
        }
        fn parity(&self, m: &BitWord) -> Result<BitWord> {
            Ok(BitWord::from_bools(
                (0..self.r).map(|j| m.iter().skip(j).step_by(self.r).fold(0, |a, b| a ^ b) == 1),
            ))
        }
        fn decode(&self, y: &BitWord) -> Result<BitWord> {
            let m = y.slice(0..self.k);
            if self.parity(&m)? != y.slice(self.k..y.len()) {
                return Err(Error::DecodeFailure("parity mismatch".into()));
            }
            Ok(m)
        }
        fn capability(&self) -> usize {
            0
        }
    }

    fn ldpc_codec(k: usize, seed: u64, t: usize) -> PartialBalanced<LdpcEcc> {
        let ecc = LdpcEcc::for_message(k + index_bits(k), seed, t).unwrap();
        PartialBalanced::new(k, ecc, seed).unwrap()
    }

    #[test]
    fn index_widths() {
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(8), 3);
        assert_eq!(index_bits(9), 4);
        assert_eq!(index_bits(64), 6);
        assert_eq!(index_bits(183), 8);
    }

    #[test]
    fn balanced_message_needs_no_inversion() {
        let codec = ldpc_codec(16, 1, 1);
        let u: BitWord = "0101010101010101".parse().unwrap();
        let cw = codec.encode(&u).unwrap();
        assert_eq!(cw.u_tilde.as_word(), &u);
        assert_eq!(cw.i_bits.to_uint(), Some(0));
    }

    #[test]
    fn error_free_round_trip() {
        let codec = ldpc_codec(64, 2, 1);
        let mut rng = stream(2, &[]);
        for _ in 0..1000 {
            let u = random_word(64, &mut rng);
            let cells = codec.encode_cells(&u).unwrap();
            assert_eq!(codec.decode(&cells).unwrap(), u);
        }
    }

    #[test]
    fn layout_is_reproducible() {
        assert_eq!(Layout::seeded(100, 7), Layout::seeded(100, 7));
        assert_ne!(Layout::seeded(100, 7), Layout::seeded(100, 8));
        let l = Layout::seeded(50, 3);
        let w = random_word(50, &mut stream(3, &[]));
        assert_eq!(l.gather(&l.scatter(&w)), w);
        assert!(Layout::from_permutation(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn read_uses_message_cells_only() {
        let codec = ldpc_codec(32, 4, 1);
        let mut rng = stream(4, &[]);
        let u = random_word(32, &mut rng);
        let cells = codec.encode_cells(&u).unwrap();
        let model = DriftModel::mean_drift(0.05).unwrap();
        let block = sample_levels_with(&cells, &model, 0.2, &mut rng).unwrap();
        let th = codec.read_threshold(&block.levels).unwrap();
        let info = block.levels.select(&codec.info_cells());
        assert_eq!(th, balancing_threshold_exact(&info).unwrap().threshold);
        // well separated levels read back exactly
        assert_eq!(codec.read(&block.levels).unwrap(), cells);
        assert_eq!(codec.decode(&codec.read(&block.levels).unwrap()).unwrap(), u);

        let info_cells = codec.info_cells();
        let perturbed = block
            .levels
            .levels()
            .iter()
            .enumerate()
            .map(|(c, &x)| if info_cells.contains(&c) { x } else { x + 5.0 })
            .collect();
        let perturbed = CellLevelVector::new(perturbed).unwrap();
        assert_eq!(codec.read_threshold(&perturbed).unwrap(), th);
    }

    #[test]
    fn planted_errors_within_capability() {
        let codec = ldpc_codec(64, 5, 2);
        let t = codec.ecc().capability();
        assert_eq!(t, 2);
        let mut rng = stream(5, &[]);
        use rand::seq::index::sample;
        for _ in 0..300 {
            let u = random_word(64, &mut rng);
            let mut cells = codec.encode_cells(&u).unwrap();
            for p in sample(&mut rng, codec.n(), t).into_iter() {
                cells.flip(p);
            }
            assert_eq!(codec.decode(&cells).unwrap(), u);
        }
    }

    #[test]
    fn failures_are_reported() {
        let codec = PartialBalanced::new(8, StrideParity { k: 11, r: 3 }, 0)
            .unwrap()
            .with_layout(Layout::identity(14))
            .unwrap();
        let u: BitWord = "11111111".parse().unwrap();
        let cw = codec.encode(&u).unwrap();
        assert_eq!(cw.i_bits.to_uint(), Some(4));
        let mut cells = codec.to_cells(&cw);
        assert_eq!(codec.decode(&cells).unwrap(), u);
        cells.flip(9);
        assert!(matches!(codec.decode(&cells), Err(Error::DecodeFailure(_))));

        // an index field that passes the parity but points past the message
        let codec = PartialBalanced::new(6, StrideParity { k: 9, r: 3 }, 0)
            .unwrap()
            .with_layout(Layout::identity(12))
            .unwrap();
        let msg: BitWord = "000111111".parse().unwrap();
        let logical = codec.ecc().encode(&msg).unwrap();
        assert!(matches!(codec.decode(&logical), Err(Error::IndexOutOfRange { index: 7, len: 6 })));
        assert!(PartialBalanced::new(8, StrideParity { k: 10, r: 3 }, 0).is_err());
    }

    #[test]
    fn segment_threshold_tracks_full_threshold() {
        let model = DriftModel::mean_drift(0.15).unwrap();
        let mut gaps = Vec::new();
        for &n in &[64usize, 256, 1024] {
            let k = n / 2;
            let codec = PartialBalanced::new(k, StrideParity { k: k + index_bits(k), r: n - k - index_bits(k) }, 9)
                .unwrap();
            let mut rng = stream(10, &[n as u64]);
            let mut total = 0.0;
            let blocks = 200;
            for _ in 0..blocks {
                let u = random_balanced_word(k, &mut rng).unwrap();
                let cells = codec.encode_cells(&u).unwrap();
                let block = sample_levels_with(&cells, &model, 0.2, &mut rng).unwrap();
                let seg = codec.read_threshold(&block.levels).unwrap();
                let full = balancing_threshold_exact(&block.levels).unwrap().threshold;
                total += (seg - full).abs();
            }
            gaps.push(total / blocks as f64);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn rate_examples() {
        let (fixed, _) = rate_fixed_vs_partial(255, 131, 191, 8).unwrap();
        assert_eq!(format!("{fixed:.4}"), "0.5137");
        let (_, partial) = rate_fixed_vs_partial(255, 131, 191, 8).unwrap();
        assert_eq!(format!("{partial:.4}"), "0.7176");
        let (a, b) = rate_fixed_vs_partial(100, 50, 50, 0).unwrap();
        assert_eq!(a, b);
        assert!(rate_fixed_vs_partial(10, 11, 5, 1).is_err());
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).count(), 6);
        assert_eq!(combinations(5, 0).count(), 1);
        assert_eq!(combinations(3, 4).count(), 0);
        assert_eq!(combinations(4, 2).last(), Some(vec![2, 3]));
    }
}
