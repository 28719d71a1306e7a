//! Read-threshold selection and error accounting.
//!
//! A cell reads as `1` exactly when its level is at or above the threshold.

use crate::error::{Error, Result};
use crate::word::BitWord;

/// Real-valued levels of the cells of one block. All values are finite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellLevelVector(Vec<f64>);

impl CellLevelVector {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if let Some(pos) = levels.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLevel(pos));
        }
        Ok(CellLevelVector(levels))
    }

    pub fn levels(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Levels of a subset of cells, in the order given.
    pub fn select(&self, cells: &[usize]) -> CellLevelVector {
        CellLevelVector(cells.iter().map(|&i| self.0[i]).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<CellLevelVector> {
        CellLevelVector::new(self.0.iter().map(|&v| f(v)).collect())
    }
}

/// Per-direction error counts between a stored and a read word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct ErrorCounts {
    /// Stored 1, read 0.
    pub n10: usize,
    /// Stored 0, read 1.
    pub n01: usize,
}

impl ErrorCounts {
    pub fn total(&self) -> usize {
        self.n10 + self.n01
    }
}

/// Outcome of a balancing-threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancingThreshold {
    pub threshold: f64,
    /// Weight of the word read at `threshold`.
    pub weight: usize,
    /// Whether the read word has weight exactly `n/2`.
    pub balanced: bool,
    /// Number of threshold probes (bisection only; 0 for the sorting method).
    pub probes: usize,
}

pub fn read_with_threshold(c: &CellLevelVector, v: f64) -> BitWord {
    BitWord::from_bools(c.levels().iter().map(|&level| level >= v))
}

/// Number of cells at or above `v`, i.e. the weight of the read word.
pub fn ones_at(c: &CellLevelVector, v: f64) -> usize {
    c.levels().iter().filter(|&&level| level >= v).count()
}

pub fn error_counts(x: &BitWord, y: &BitWord) -> Result<ErrorCounts> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let mut counts = ErrorCounts::default();
    for (a, b) in x.iter().zip(y.iter()) {
        match (a, b) {
            (1, 0) => counts.n10 += 1,
            (0, 1) => counts.n01 += 1,
            _ => {}
        }
    }
    Ok(counts)
}

fn check_even_nonempty(c: &CellLevelVector) -> Result<()> {
    match c.len() {
        0 => Err(Error::Empty),
        n if n % 2 != 0 => Err(Error::OddLength(n)),
        _ => Ok(()),
    }
}

/// Sorted distinct levels, ascending, each with its multiplicity.
fn distinct_levels(c: &CellLevelVector) -> Vec<(f64, usize)> {
    let mut sorted = c.levels().to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Candidate cut positions: below every level, between each pair of
/// consecutive distinct levels, and above every level. Returns
/// `(threshold, ones_read)` from the lowest cut to the highest.
fn cut_positions(c: &CellLevelVector) -> Vec<(f64, usize)> {
    let distinct = distinct_levels(c);
    let mut cuts = Vec::with_capacity(distinct.len() + 1);
    let mut ones = c.len();
    cuts.push((f64::NEG_INFINITY, ones));
    for (k, &(v, mult)) in distinct.iter().enumerate() {
        ones -= mult;
        let next = distinct.get(k + 1).map(|&(w, _)| w);
        let cut = match next {
            Some(w) => midpoint(v, w),
            None => f64::INFINITY,
        };
        cuts.push((cut, ones));
    }
    cuts
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // adjacent floats: the midpoint rounds onto `a`
    if m <= a {
        b
    } else {
        m
    }
}

/// Balancing threshold by sorting: the midpoint between the `n/2`-th and
/// `(n/2+1)`-th largest levels.
///
/// When levels tie across the median no threshold gives weight `n/2`; the
/// threshold minimising `|weight - n/2|` is returned (lowest such threshold
/// on ties) with `balanced == false`.
pub fn balancing_threshold_exact(c: &CellLevelVector) -> Result<BalancingThreshold> {
    check_even_nonempty(c)?;
    let half = c.len() / 2;
    let mut sorted = c.levels().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let (upper, lower) = (sorted[half - 1], sorted[half]);
    if upper > lower {
        let threshold = midpoint(lower, upper);
        return Ok(BalancingThreshold {
            threshold,
            weight: half,
            balanced: true,
            probes: 0,
        });
    }
    let (threshold, weight) = cut_positions(c)
        .into_iter()
        .min_by_key(|&(_, ones)| ones.abs_diff(half))
        .expect("at least one cut");
    Ok(BalancingThreshold {
        threshold,
        weight,
        balanced: weight == half,
        probes: 0,
    })
}

/// Half-interval search for a balancing threshold inside `[lo, hi]`.
///
/// Each probe counts the ones read at the interval midpoint: too few ones
/// moves the upper end down, too many moves the lower end up. Stops when the
/// count is exactly `n/2` or the interval is no wider than `eps`.
pub fn balancing_threshold_bisect(
    c: &CellLevelVector,
    lo: f64,
    hi: f64,
    eps: f64,
) -> Result<BalancingThreshold> {
    check_even_nonempty(c)?;
    if !(lo < hi) || !(eps > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bisection needs lo < hi and eps > 0 (lo={lo}, hi={hi}, eps={eps})"
        )));
    }
    let half = c.len() / 2;
    let (mut lo, mut hi) = (lo, hi);
    let mut probes = 0;
    loop {
        let mid = lo + (hi - lo) / 2.0;
        let ones = ones_at(c, mid);
        probes += 1;
        if ones == half || hi - lo <= eps || mid <= lo || mid >= hi {
            return Ok(BalancingThreshold {
                threshold: mid,
                weight: ones,
                balanced: ones == half,
                probes,
            });
        }
        if ones < half {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// First-order relaxed threshold: the mean level.
pub fn relaxed_threshold_mean(c: &CellLevelVector) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::Empty);
    }
    Ok(c.levels().iter().sum::<f64>() / c.len() as f64)
}

/// Second-order relaxed threshold `mean + a (1/2 - mean)^2`.
pub fn relaxed_threshold_second_order(c: &CellLevelVector, a: f64) -> Result<f64> {
    let mean = relaxed_threshold_mean(c)?;
    Ok(mean + a * (0.5 - mean).powi(2))
}

/// Genie threshold minimising total read errors against the stored word `x`.
///
/// Only cut positions between consecutive distinct levels (plus the two
/// infinite sentinels) are scanned since the error count is constant in
/// between. Ties go to the lowest threshold.
pub fn optimal_threshold_oracle(
    c: &CellLevelVector,
    x: &BitWord,
) -> Result<(f64, ErrorCounts)> {
    if c.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: c.len(),
        });
    }
    let mut cells: Vec<(f64, u8)> = c.levels().iter().copied().zip(x.iter()).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    // threshold below everything: every cell reads 1
    let mut counts = ErrorCounts {
        n10: 0,
        n01: x.len() - x.weight(),
    };
    let mut best = (f64::NEG_INFINITY, counts);
    let mut k = 0;
    while k < cells.len() {
        let level = cells[k].0;
        while k < cells.len() && cells[k].0 == level {
            if cells[k].1 == 1 {
                counts.n10 += 1;
            } else {
                counts.n01 -= 1;
            }
            k += 1;
        }
        let cut = match cells.get(k) {
            Some(&(next, _)) => midpoint(level, next),
            None => f64::INFINITY,
        };
        if counts.total() < best.1.total() {
            best = (cut, counts);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn levels(v: &[f64]) -> CellLevelVector {
        CellLevelVector::new(v.to_vec()).unwrap()
    }

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(CellLevelVector::new(vec![0.0, f64::NAN]), Err(Error::NonFiniteLevel(1)));
        assert_eq!(
            CellLevelVector::new(vec![f64::INFINITY]),
            Err(Error::NonFiniteLevel(0))
        );
    }

    #[test]
    fn read_examples() {
        assert_eq!(read_with_threshold(&levels(&[0.1, 0.9]), 0.5), w("01"));
        assert_eq!(read_with_threshold(&levels(&[0.5]), 0.5), w("1"));
        assert_eq!(read_with_threshold(&levels(&[0.3, 0.2, 0.8, 0.7]), 0.25), w("1011"));
    }

    #[test]
    fn error_count_examples() {
        assert_eq!(error_counts(&w("0101"), &w("0101")).unwrap(), ErrorCounts { n10: 0, n01: 0 });
        assert_eq!(error_counts(&w("1100"), &w("1001")).unwrap(), ErrorCounts { n10: 1, n01: 1 });
        assert_eq!(error_counts(&w("1111"), &w("0000")).unwrap(), ErrorCounts { n10: 4, n01: 0 });
        assert!(error_counts(&w("11"), &w("111")).is_err());
    }

    #[test]
    fn exact_threshold_examples() {
        let t = balancing_threshold_exact(&levels(&[0.1, 0.9, 0.2, 0.8])).unwrap();
        assert!((t.threshold - 0.5).abs() < 1e-15);
        assert_eq!(t.weight, 2);
        assert!(t.balanced);

        let t = balancing_threshold_exact(&levels(&[0.0, 1.0])).unwrap();
        assert_eq!(t.threshold, 0.5);
        assert_eq!(t.weight, 1);

        let t = balancing_threshold_exact(&levels(&[0.3, 0.3, 0.3, 0.3])).unwrap();
        assert!(!t.balanced);
        assert_eq!(t.weight.abs_diff(2), 2);
        assert_eq!(ones_at(&levels(&[0.3; 4]), t.threshold), t.weight);

        assert_eq!(balancing_threshold_exact(&levels(&[0.1, 0.2, 0.3])), Err(Error::OddLength(3)));
    }

    #[test]
    fn exact_threshold_partial_tie() {
        // 0.5 appears three times across the median: best achievable is 3 or 1 ones
        let c = levels(&[0.9, 0.5, 0.5, 0.5, 0.1, 0.0]);
        let t = balancing_threshold_exact(&c).unwrap();
        assert!(!t.balanced);
        assert_eq!(ones_at(&c, t.threshold), t.weight);
        assert_eq!(t.weight.abs_diff(3), 1);
    }

    #[test]
    fn bisect_examples() {
        let t = balancing_threshold_bisect(&levels(&[0.1, 0.9, 0.2, 0.8]), 0.0, 1.0, 1e-9).unwrap();
        assert_eq!(t.weight, 2);
        assert!(t.balanced);
        let t = balancing_threshold_bisect(&levels(&[0.0, 1.0]), 0.0, 1.0, 1e-9).unwrap();
        assert_eq!(t.weight, 1);
        assert!(balancing_threshold_bisect(&levels(&[0.0, 1.0]), 1.0, 0.0, 1e-9).is_err());
        assert!(balancing_threshold_bisect(&levels(&[0.0, 1.0]), 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bisect_falls_back_on_ties() {
        let t = balancing_threshold_bisect(&levels(&[0.3; 4]), 0.0, 1.0, 1e-6).unwrap();
        assert!(!t.balanced);
        assert!(t.probes > 1);
    }

    #[test]
    fn relaxed_examples() {
        assert_eq!(relaxed_threshold_mean(&levels(&[0.0, 1.0])).unwrap(), 0.5);
        assert!((relaxed_threshold_mean(&levels(&[0.2, 0.4, 0.6, 0.8])).unwrap() - 0.5).abs() < 1e-15);
        let c = levels(&[0.1, 0.1, 0.1, 0.9]);
        assert!((relaxed_threshold_mean(&c).unwrap() - 0.3).abs() < 1e-15);
        assert!((relaxed_threshold_second_order(&c, 1.0).unwrap() - 0.34).abs() < 1e-15);
        let sym = levels(&[0.2, 0.8]);
        assert_eq!(relaxed_threshold_second_order(&sym, 7.0).unwrap(), 0.5);
        assert_eq!(relaxed_threshold_second_order(&levels(&[0.0, 1.0]), 2.0).unwrap(), 0.5);
        assert_eq!(relaxed_threshold_mean(&levels(&[])), Err(Error::Empty));
    }

    /// Brute force over every candidate cut, for cross-checking the sweep.
    fn brute_force_optimum(c: &CellLevelVector, x: &BitWord) -> usize {
        let mut cuts = vec![f64::NEG_INFINITY, f64::INFINITY];
        cuts.extend(c.levels().iter().copied());
        cuts.iter()
            .map(|&v| error_counts(x, &read_with_threshold(c, v)).unwrap().total())
            .min()
            .unwrap()
    }

    #[test]
    fn oracle_examples() {
        let (_, e) = optimal_threshold_oracle(&levels(&[0.1, 0.9]), &w("01")).unwrap();
        assert_eq!(e.total(), 0);
        let (v, e) = optimal_threshold_oracle(&levels(&[0.1, 0.9]), &w("10")).unwrap();
        assert_eq!(e.total(), 1);
        assert_eq!(v, f64::NEG_INFINITY);
        assert!(optimal_threshold_oracle(&levels(&[0.1]), &w("10")).is_err());
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
        (1usize..20).prop_flat_map(|half| {
            let n = 2 * half;
            (
                proptest::collection::vec(-2.0f64..3.0, n),
                Just(n).prop_perturb(|n, mut rng| {
                    let mut bits: Vec<u8> = (0..n).map(|i| u8::from(i < n / 2)).collect();
                    for i in (1..n).rev() {
                        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                        bits.swap(i, j);
                    }
                    bits
                }),
            )
        })
    }

    proptest! {
        #[test]
        fn balancing_threshold_is_two_competitive((lv, bits) in instance()) {
            let c = CellLevelVector::new(lv).unwrap();
            let x = BitWord::from_bits(bits).unwrap();
            let vb = balancing_threshold_exact(&c).unwrap();
            let e_b = error_counts(&x, &read_with_threshold(&c, vb.threshold)).unwrap();
            let (vo, e_o) = optimal_threshold_oracle(&c, &x).unwrap();
            prop_assert!(e_b.total() <= 2 * e_o.total());
            prop_assert_eq!(e_o.total(), brute_force_optimum(&c, &x));
            prop_assert_eq!(error_counts(&x, &read_with_threshold(&c, vo)).unwrap(), e_o);
            if vb.balanced {
                prop_assert_eq!(e_b.n10, e_b.n01);
            }
        }

        #[test]
        fn weight_is_non_increasing_in_threshold(lv in proptest::collection::vec(-1.0f64..1.0, 1..40), a in -1.5f64..1.5, b in -1.5f64..1.5) {
            let c = CellLevelVector::new(lv).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(ones_at(&c, lo) >= ones_at(&c, hi));
        }

        #[test]
        fn bisect_agrees_with_sorting(lv in proptest::collection::vec(0.0f64..1.0, 2..40)) {
            let mut lv = lv;
            if lv.len() % 2 == 1 { lv.pop(); }
            let c = CellLevelVector::new(lv).unwrap();
            let exact = balancing_threshold_exact(&c).unwrap();
            let bis = balancing_threshold_bisect(&c, -0.5, 1.5, 1e-12).unwrap();
            let mut sorted = c.levels().to_vec();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let gap = sorted[c.len() / 2 - 1] - sorted[c.len() / 2];
            if exact.balanced && gap > 1e-10 {
                prop_assert!(bis.balanced);
                prop_assert_eq!(bis.weight, exact.weight);
            }
        }
    }
}
