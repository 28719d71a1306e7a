use std::fmt;

use crate::error::{Error, Result};

/// A set of candidate inversion indices in `[0, n]`, stored as sorted,
/// disjoint, non-adjacent half-open intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InversionSet {
    n: usize,
    intervals: Vec<(usize, usize)>,
}

impl InversionSet {
    /// All indices `0..=n`.
    pub fn full(n: usize) -> Self {
        InversionSet { n, intervals: vec![(0, n + 1)] }
    }

    pub fn empty(n: usize) -> Self {
        InversionSet { n, intervals: Vec::new() }
    }

    pub fn singleton(n: usize, i: usize) -> Self {
        Self::from_intervals(n, [(i, i + 1)])
    }

    /// Normalizes arbitrary half-open intervals, clipped to `[0, n]`.
    pub fn from_intervals(n: usize, intervals: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut v: Vec<(usize, usize)> = intervals
            .into_iter()
            .map(|(lo, hi)| (lo, hi.min(n + 1)))
            .filter(|(lo, hi)| lo < hi)
            .collect();
        v.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        InversionSet { n, intervals: out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    /// Number of indices in the set.
    pub fn len(&self) -> usize {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        let k = self.intervals.partition_point(|&(lo, _)| lo <= i);
        k > 0 && i < self.intervals[k - 1].1
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.intervals.iter().flat_map(|&(lo, hi)| lo..hi)
    }

    pub fn intersect(&self, other: &InversionSet) -> InversionSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        InversionSet { n: self.n, intervals: out }
    }

    pub fn union(&self, other: &InversionSet) -> InversionSet {
        Self::from_intervals(self.n, self.intervals.iter().chain(&other.intervals).copied())
    }

    /// Indices of `[0, n]` not in the set.
    pub fn complement(&self) -> InversionSet {
        let mut out = Vec::new();
        let mut at = 0;
        for &(lo, hi) in &self.intervals {
            if at < lo {
                out.push((at, lo));
            }
            at = hi;
        }
        if at < self.n + 1 {
            out.push((at, self.n + 1));
        }
        InversionSet { n: self.n, intervals: out }
    }

    pub fn is_subset_of(&self, other: &InversionSet) -> bool {
        self.intersect(other) == *self
    }
}

impl fmt::Display for InversionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("{}");
        }
        for (k, &(lo, hi)) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(" u ")?;
            }
            if hi == self.n + 1 {
                write!(f, "[{lo},{}]", self.n)?;
            } else {
                write!(f, "[{lo},{hi})")?;
            }
        }
        Ok(())
    }
}

/// The two interval sets of a check with (0-based, increasing) variables
/// `neighbors`: the inversion indices that flip an even number of them, and
/// those that flip an odd number. Inverting the first `i` bits flips variable
/// `v` exactly when `v < i`.
pub fn interval_sets(n: usize, neighbors: &[usize]) -> (InversionSet, InversionSet) {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut lo = 0;
    for (k, &v) in neighbors.iter().enumerate() {
        let cut = v + 1;
        if k % 2 == 0 {
            even.push((lo, cut));
        } else {
            odd.push((lo, cut));
        }
        lo = cut;
    }
    if neighbors.len() % 2 == 0 {
        even.push((lo, n + 1));
    } else {
        odd.push((lo, n + 1));
    }
    (InversionSet::from_intervals(n, even), InversionSet::from_intervals(n, odd))
}

/// Indices consistent with a fully observed check: the even set when the
/// observed values XOR to 0, the odd set otherwise.
pub fn check_interval_sets(
    n: usize,
    neighbors: &[usize],
    values: &[Option<u8>],
) -> Result<InversionSet> {
    if neighbors.len() != values.len() {
        return Err(Error::LengthMismatch { expected: neighbors.len(), actual: values.len() });
    }
    if neighbors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("check neighbors must be increasing".into()));
    }
    let mut parity = 0;
    for (&v, value) in neighbors.iter().zip(values) {
        match value {
            Some(b) => parity ^= b,
            None => {
                return Err(Error::InvalidParameter(format!("variable {v} is unassigned")));
            }
        }
    }
    let (even, odd) = interval_sets(n, neighbors);
    Ok(if parity == 0 { even } else { odd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn check_examples() {
        // variables 2 and 5 in 1-based numbering
        let s = check_interval_sets(8, &[1, 4], &[Some(0), Some(0)]).unwrap();
        assert_eq!(s, InversionSet::from_intervals(8, [(0, 2), (5, 9)]));
        assert_eq!(s.to_string(), "[0,2) u [5,8]");
        let s = check_interval_sets(8, &[1, 4], &[Some(1), Some(0)]).unwrap();
        assert_eq!(s.to_string(), "[2,5)");
        assert!(check_interval_sets(8, &[1, 4], &[Some(1), None]).is_err());
    }

    #[test]
    fn observed_check_keeps_true_index() {
        // x = 01111000 comes from z = 11111000 with i = 1
        let n = 8;
        let x = [0u8, 1, 1, 1, 1, 0, 0, 0];
        let observe = |vs: &[usize]| {
            let values: Vec<_> = vs.iter().map(|&v| Some(x[v])).collect();
            check_interval_sets(n, vs, &values).unwrap()
        };
        let set = InversionSet::full(n).intersect(&observe(&[0, 1, 3, 4]));
        assert!(set.contains(1));
        assert!(!set.contains(2));
    }

    #[test]
    fn set_algebra() {
        let a = InversionSet::from_intervals(10, [(0, 3), (5, 8)]);
        let b = InversionSet::from_intervals(10, [(2, 6), (7, 11)]);
        assert_eq!(a.intersect(&b).intervals(), &[(2, 3), (5, 6), (7, 8)]);
        assert_eq!(a.union(&b).intervals(), &[(0, 11)]);
        assert_eq!(a.complement().intervals(), &[(3, 5), (8, 11)]);
        assert_eq!(a.len(), 6);
        assert!(a.contains(0) && a.contains(7) && !a.contains(3) && !a.contains(10));
        assert!(InversionSet::singleton(10, 6).is_subset_of(&a));
        assert_eq!(InversionSet::full(4).len(), 5);
    }

    proptest! {
        #[test]
        fn interval_sets_partition(
            n in 2usize..40,
            picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..8),
            seed_values in proptest::collection::vec(0u8..2, 8),
        ) {
            let mut vs: Vec<usize> = picks.iter().map(|p| p.index(n)).collect();
            vs.sort_unstable();
            vs.dedup();
            let (even, odd) = interval_sets(n, &vs);
            prop_assert!(even.intersect(&odd).is_empty());
            prop_assert_eq!(even.union(&odd), InversionSet::full(n));
            prop_assert_eq!(even.complement(), odd.clone());

            let values: Vec<Option<u8>> = vs.iter().zip(&seed_values).map(|(_, &b)| Some(b)).collect();
            let flipped: Vec<Option<u8>> = values.iter().enumerate()
                .map(|(k, b)| if k == 0 { b.map(|x| x ^ 1) } else { *b }).collect();
            let s = check_interval_sets(n, &vs, &values).unwrap();
            let t = check_interval_sets(n, &vs, &flipped).unwrap();
            prop_assert_eq!(s.complement(), t);

            // direct membership: i is in the set iff flipping the first i bits
            // makes the observed parity even
            let parity = values.iter().fold(0u8, |a, b| a ^ b.unwrap());
            for i in 0..=n {
                let flips = vs.iter().filter(|&&v| v < i).count() as u8 % 2;
                prop_assert_eq!(s.contains(i), parity ^ flips == 0);
            }

            // intersecting with both sets of one check partitions any set
            let base = InversionSet::from_intervals(n, [(n / 3, n + 1)]);
            let (p, q) = (base.intersect(&even), base.intersect(&odd));
            prop_assert_eq!(p.len() + q.len(), base.len());
            prop_assert!(p.len() <= base.len());
        }
    }
}
