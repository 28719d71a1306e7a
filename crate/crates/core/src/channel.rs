//! Drift channels, block aging and analytic bit error rates.
//!
//! Cells storing 0 have level density `g_t`, cells storing 1 have `h_t`.
//! Two families are provided:
//!
//! * [`DriftKind::MeanDrift`]: `g_t = N(0, σ)`, `h_t = N(1 - t, σ)`
//! * [`DriftKind::VarianceGrowth`]: `g_t = N(0, σ)`, `h_t = N(1, σ + t)`

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::thresholding::CellLevelVector;
use crate::word::BitWord;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftKind {
    MeanDrift,
    VarianceGrowth,
}

impl fmt::Display for DriftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriftKind::MeanDrift => "mean_drift",
            DriftKind::VarianceGrowth => "variance_growth",
        })
    }
}

impl FromStr for DriftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "mean_drift" | "mean" => Ok(DriftKind::MeanDrift),
            "variance_growth" | "variance" => Ok(DriftKind::VarianceGrowth),
            other => Err(Error::Parse(format!("unknown drift model `{other}`"))),
        }
    }
}

/// Mean and standard deviation of a normal level distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mean: f64,
    pub std: f64,
}

impl Normal {
    pub fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        -0.5 * z * z - self.std.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    kind: DriftKind,
    sigma: f64,
}

impl DriftModel {
    pub fn new(kind: DriftKind, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(DriftModel { kind, sigma })
    }

    pub fn mean_drift(sigma: f64) -> Result<Self> {
        Self::new(DriftKind::MeanDrift, sigma)
    }

    pub fn variance_growth(sigma: f64) -> Result<Self> {
        Self::new(DriftKind::VarianceGrowth, sigma)
    }

    pub fn kind(&self) -> DriftKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Level distribution of a cell storing 0 at time `t`.
    pub fn zero_level(&self, _t: f64) -> Normal {
        Normal { mean: 0.0, std: self.sigma }
    }

    /// Level distribution of a cell storing 1 at time `t`.
    pub fn one_level(&self, t: f64) -> Normal {
        match self.kind {
            DriftKind::MeanDrift => Normal { mean: 1.0 - t, std: self.sigma },
            DriftKind::VarianceGrowth => Normal { mean: 1.0, std: self.sigma + t },
        }
    }

    /// Bit error rate of a balanced-prior block read at threshold `v`.
    pub fn ber(&self, v: f64, t: f64) -> f64 {
        match self.kind {
            DriftKind::MeanDrift => analytic_ber_mean_drift(v, t, self.sigma),
            DriftKind::VarianceGrowth => analytic_ber_variance_growth(v, t, self.sigma),
        }
    }
}

/// Stored word together with its cell levels after aging for time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgedBlock {
    pub truth: BitWord,
    pub levels: CellLevelVector,
    pub t: f64,
}

/// Programs `x` and ages it to time `t`; deterministic in `seed`.
pub fn sample_levels(x: &BitWord, model: &DriftModel, t: f64, seed: u64) -> Result<AgedBlock> {
    let mut rng = rng_from_seed(seed);
    sample_levels_with(x, model, t, &mut rng)
}

/// Like [`sample_levels`] but draws from a caller-supplied generator.
pub fn sample_levels_with<R: Rng + ?Sized>(
    x: &BitWord,
    model: &DriftModel,
    t: f64,
    rng: &mut R,
) -> Result<AgedBlock> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let g = model.zero_level(t);
    let h = model.one_level(t);
    let levels = x
        .iter()
        .map(|b| {
            let d = if b == 1 { h } else { g };
            let z: f64 = StandardNormal.sample(rng);
            d.mean + d.std * z
        })
        .collect();
    Ok(AgedBlock {
        truth: x.clone(),
        levels: CellLevelVector::new(levels)?,
        t,
    })
}

pub fn analytic_ber_mean_drift(v: f64, t: f64, sigma: f64) -> f64 {
    0.5 * normal_cdf(-v / sigma) + 0.5 * normal_cdf(-(1.0 - t - v) / sigma)
}

pub fn analytic_ber_variance_growth(v: f64, t: f64, sigma: f64) -> f64 {
    0.5 * normal_cdf(-v / sigma) + 0.5 * normal_cdf(-(1.0 - v) / (sigma + t))
}

/// Population thresholds of a drift model at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelThresholds {
    /// Balancing threshold: half of all cells read as 1.
    pub balancing: f64,
    /// Threshold minimizing the bit error rate.
    pub optimal: f64,
    /// Fixed threshold used without aging information.
    pub fixed: f64,
}

pub fn model_thresholds(model: &DriftModel, t: f64) -> Result<ModelThresholds> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let sigma = model.sigma();
    let (balancing, optimal) = match model.kind() {
        DriftKind::MeanDrift => ((1.0 - t) / 2.0, (1.0 - t) / 2.0),
        DriftKind::VarianceGrowth => (1.0 / (2.0 + t / sigma), variance_growth_optimal(sigma, t)),
    };
    Ok(ModelThresholds { balancing, optimal, fixed: 0.5 })
}

/// `ln g_t(v) - ln h_t(v)` for the variance-growth model.
pub fn variance_growth_density_gap(v: f64, t: f64, sigma: f64) -> f64 {
    let s1 = sigma + t;
    -sigma.ln() - v * v / (2.0 * sigma * sigma) + s1.ln() + (1.0 - v) * (1.0 - v) / (2.0 * s1 * s1)
}

fn variance_growth_optimal(sigma: f64, t: f64) -> f64 {
    const GRID: usize = 1000;
    let f = |v: f64| variance_growth_density_gap(v, t, sigma);
    let mut candidates = vec![f64::NEG_INFINITY, f64::INFINITY];
    let mut a = 0.0;
    let mut fa = f(a);
    for j in 1..=GRID {
        let b = j as f64 / GRID as f64;
        let fb = f(b);
        if fa == 0.0 {
            candidates.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || hi - lo <= f64::EPSILON {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            candidates.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        candidates.push(a);
    }
    let mut best = candidates[0];
    let mut best_pe = analytic_ber_variance_growth(best, t, sigma);
    for &v in &candidates[1..] {
        let pe = analytic_ber_variance_growth(v, t, sigma);
        if pe < best_pe {
            best = v;
            best_pe = pe;
        }
    }
    best
}

/// Flips each bit independently with probability `p`.
pub fn apply_bsc(x: &BitWord, p: f64, seed: u64) -> Result<BitWord> {
    check_probability(p)?;
    let mut rng = rng_from_seed(seed);
    Ok(apply_bsc_with(x, p, &mut rng))
}

pub fn apply_bsc_with<R: Rng + ?Sized>(x: &BitWord, p: f64, rng: &mut R) -> BitWord {
    BitWord::from_bools(x.iter().map(|b| (b == 1) ^ rng.random_bool(p)))
}

/// Received symbol of an erasure channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErasureSymbol {
    Bit(u8),
    Erased,
}

/// A word over `{0, 1, ?}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErasureWord(Vec<ErasureSymbol>);

impl ErasureWord {
    pub fn new(symbols: Vec<ErasureSymbol>) -> Self {
        ErasureWord(symbols)
    }

    pub fn symbols(&self) -> &[ErasureSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.0.iter().filter(|s| **s == ErasureSymbol::Erased).count()
    }

    pub fn get(&self, i: usize) -> ErasureSymbol {
        self.0[i]
    }
}

impl fmt::Display for ErasureWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            match s {
                ErasureSymbol::Bit(b) => write!(f, "{b}")?,
                ErasureSymbol::Erased => f.write_str("?")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ErasureWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(position, symbol)| match symbol {
                '0' => Ok(ErasureSymbol::Bit(0)),
                '1' => Ok(ErasureSymbol::Bit(1)),
                '?' => Ok(ErasureSymbol::Erased),
                _ => Err(Error::InvalidSymbol { symbol, position }),
            })
            .collect::<Result<Vec<_>>>()
            .map(ErasureWord)
    }
}

/// Erases each bit independently with probability `p`.
pub fn apply_bec(x: &BitWord, p: f64, seed: u64) -> Result<ErasureWord> {
    check_probability(p)?;
    let mut rng = rng_from_seed(seed);
    Ok(apply_bec_with(x, p, &mut rng))
}

pub fn apply_bec_with<R: Rng + ?Sized>(x: &BitWord, p: f64, rng: &mut R) -> ErasureWord {
    ErasureWord(
        x.iter()
            .map(|b| {
                if rng.random_bool(p) {
                    ErasureSymbol::Erased
                } else {
                    ErasureSymbol::Bit(b)
                }
            })
            .collect(),
    )
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Uniformly random word of length `n`.
pub fn random_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitWord {
    BitWord::from_bools((0..n).map(|_| rng.random_bool(0.5)))
}

/// Uniformly random balanced word of even length `n`.
pub fn random_balanced_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BitWord> {
    if n % 2 != 0 {
        return Err(Error::OddLength(n));
    }
    let mut bits: Vec<u8> = (0..n).map(|i| u8::from(i < n / 2)).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        bits.swap(i, j);
    }
    BitWord::from_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::thresholding::{error_counts, read_with_threshold};

    // reference values computed with 50-digit arithmetic
    const PHI_M2_5: f64 = 6.209_665_325_776_132e-3;
    const PHI_M2: f64 = 2.275_013_194_817_921e-2;
    const PHI_M1: f64 = 0.158_655_253_931_457_05;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn cdf_reference_points() {
        assert!(close(normal_cdf(-2.5), PHI_M2_5, 1e-12));
        assert!(close(normal_cdf(-2.0), PHI_M2, 1e-12));
        assert!(close(normal_cdf(-1.0), PHI_M1, 1e-12));
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn analytic_examples() {
        assert!(close(analytic_ber_mean_drift(0.5, 0.0, 0.2), PHI_M2_5, 1e-12));
        assert!(close(analytic_ber_variance_growth(0.5, 0.0, 0.25), PHI_M2, 1e-12));
        let expected = 0.5 * PHI_M2 + 0.5 * PHI_M1;
        assert!(close(analytic_ber_variance_growth(0.5, 0.25, 0.25), expected, 1e-12));
        assert!((expected - 9.07e-2).abs() < 5e-5);
    }

    #[test]
    fn analytic_shape() {
        for &(v, t) in &[(0.1, 0.2), (0.3, 0.1), (0.45, 0.4)] {
            let a = analytic_ber_mean_drift(v, t, 0.15);
            let b = analytic_ber_mean_drift(1.0 - t - v, t, 0.15);
            assert!((a - b).abs() < 1e-15);
        }
        assert!(analytic_ber_mean_drift(0.3, 0.2, 1e-4) < 1e-300);
        let mut last = 0.0;
        for j in 0..20 {
            let pe = analytic_ber_variance_growth(0.4, j as f64 * 0.05, 0.2);
            assert!(pe > last);
            last = pe;
        }
    }

    #[test]
    fn thresholds() {
        let m = DriftModel::mean_drift(0.2).unwrap();
        let th = model_thresholds(&m, 0.3).unwrap();
        assert!((th.balancing - 0.35).abs() < 1e-15);
        assert!((th.optimal - 0.35).abs() < 1e-15);
        assert_eq!(th.fixed, 0.5);

        let vg = DriftModel::variance_growth(0.2).unwrap();
        assert_eq!(model_thresholds(&vg, 0.0).unwrap().balancing, 0.5);
        let th = model_thresholds(&vg, 0.2).unwrap();
        assert!((th.balancing - 1.0 / 3.0).abs() < 1e-15);
        let (s, t, vo) = (0.2f64, 0.2f64, th.optimal);
        let residual = (-vo * vo / (2.0 * s * s)).exp()
            - s / (s + t) * (-(1.0 - vo) * (1.0 - vo) / (2.0 * (s + t) * (s + t))).exp();
        assert!(residual.abs() < 1e-10, "residual {residual}");
        // no grid point beats the root
        let pe = analytic_ber_variance_growth(vo, t, s);
        for j in 0..=2000 {
            let v = j as f64 / 2000.0;
            assert!(analytic_ber_variance_growth(v, t, s) >= pe - 1e-15);
        }
        assert!((model_thresholds(&vg, 0.0).unwrap().optimal - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DriftModel::mean_drift(0.0).is_err());
        assert!(DriftModel::variance_growth(f64::NAN).is_err());
        let m = DriftModel::mean_drift(0.1).unwrap();
        assert!(sample_levels(&BitWord::zeros(4), &m, -1.0, 0).is_err());
        assert!(apply_bsc(&BitWord::zeros(4), 1.5, 0).is_err());
    }

    #[test]
    fn sampled_means() {
        let m = DriftModel::mean_drift(0.1).unwrap();
        let n = 100_000;
        let zeros = sample_levels(&BitWord::zeros(n), &m, 0.4, 7).unwrap();
        let mean0: f64 = zeros.levels.levels().iter().sum::<f64>() / n as f64;
        assert!(mean0.abs() < 5.0 * 0.1 / (n as f64).sqrt());
        let ones = sample_levels(&BitWord::ones(n), &m, 0.4, 7).unwrap();
        let mean1: f64 = ones.levels.levels().iter().sum::<f64>() / n as f64;
        assert!((mean1 - 0.6).abs() < 5.0 * 0.1 / (n as f64).sqrt());
        assert_eq!(ones, sample_levels(&BitWord::ones(n), &m, 0.4, 7).unwrap());
        assert_ne!(ones, sample_levels(&BitWord::ones(n), &m, 0.4, 8).unwrap());
    }

    #[test]
    fn binary_channels() {
        let x = random_word(1000, &mut stream(3, &[]));
        assert_eq!(apply_bsc(&x, 0.0, 1).unwrap(), x);
        let flipped = apply_bsc(&x, 1.0, 1).unwrap();
        assert!(flipped.iter().zip(x.iter()).all(|(a, b)| a != b));
        let e = apply_bec(&x, 0.0, 1).unwrap();
        assert_eq!(e.erasures(), 0);
        assert_eq!(apply_bec(&x, 1.0, 1).unwrap().erasures(), 1000);

        let n = 1_000_000;
        let p = 0.1;
        let y = apply_bsc(&BitWord::zeros(n), p, 11).unwrap();
        let rate = y.weight() as f64 / n as f64;
        assert!((rate - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt());
        let e = apply_bec(&BitWord::zeros(n), p, 12).unwrap();
        let rate = e.erasures() as f64 / n as f64;
        assert!((rate - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn erasure_word_text() {
        let w: ErasureWord = "01?1".parse().unwrap();
        assert_eq!(w.erasures(), 1);
        assert_eq!(w.to_string(), "01?1");
        assert!("01x".parse::<ErasureWord>().is_err());
    }

    #[test]
    fn random_balanced_words_are_balanced() {
        let mut rng = stream(5, &[]);
        for n in [2, 10, 64, 1000] {
            assert!(random_balanced_word(n, &mut rng).unwrap().is_balanced());
        }
        assert!(random_balanced_word(3, &mut rng).is_err());
    }

    #[test]
    fn monte_carlo_matches_analytic_at_balancing_threshold() {
        let n = 10_000;
        let blocks = 40;
        for model in [DriftModel::mean_drift(0.15).unwrap(), DriftModel::variance_growth(0.15).unwrap()] {
            let t = 0.2;
            let vb = model_thresholds(&model, t).unwrap().balancing;
            let mut errors = 0usize;
            for b in 0..blocks {
                let mut rng = stream(99, &[b]);
                let x = random_word(n, &mut rng);
                let block = sample_levels_with(&x, &model, t, &mut rng).unwrap();
                let y = read_with_threshold(&block.levels, vb);
                errors += error_counts(&x, &y).unwrap().total();
            }
            let total = (n * blocks as usize) as f64;
            let p = model.ber(vb, t);
            let se = (p * (1.0 - p) / total).sqrt();
            let emp = errors as f64 / total;
            assert!((emp - p).abs() < 3.0 * se, "{model:?}: {emp} vs {p}");
        }
    }
}
