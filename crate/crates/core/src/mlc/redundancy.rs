//! Redundancy bookkeeping for the q-ary balancing constructions.

use num_traits::ToPrimitive;

use super::rank::balanced_count;
use crate::error::{Error, Result};

fn exact_log2(x: usize) -> Option<u32> {
    (x.is_power_of_two()).then(|| x.trailing_zeros())
}

fn power_of_two_exponents(q: usize, m: usize) -> Result<(i64, i64)> {
    match (exact_log2(q), exact_log2(m)) {
        (Some(a), Some(b)) if q >= 2 => Ok((i64::from(a), i64::from(b))),
        _ => Err(Error::InvalidParameter(format!(
            "q = {q} and m = {m} must both be powers of two (q >= 2)"
        ))),
    }
}

/// Published closed form for the location bits of the recursive q-ary Knuth
/// construction with `q = 2^a`, `m = 2^b`: `(q-1)ab - q(a-2) - 2`.
///
/// This value agrees with [`trace_bit_cost_direct`] only when `ab = a + b`;
/// the difference is exactly `(q-1)(ab - a - b)`.
pub fn trace_bit_cost(q: usize, m: usize) -> Result<i64> {
    let (a, b) = power_of_two_exponents(q, m)?;
    let q = q as i64;
    Ok((q - 1) * a * b - q * (a - 2) - 2)
}

/// `sum_{j=0}^{a-1} 2^j log2(qm / 2^j)`: one location integer of
/// `log2(qm/2^j)` bits for each of the `2^j` splits at depth `j`.
pub fn trace_bit_cost_direct(q: usize, m: usize) -> Result<i64> {
    let (a, b) = power_of_two_exponents(q, m)?;
    Ok((0..a).map(|j| (1i64 << j) * (a + b - j)).sum())
}

/// Ratio between the asymptotic redundancy of the recursive construction and
/// that of a code using every balanced word: `2(q-1)log2 q / (q - log2 q)`.
pub fn redundancy_factor(q: usize) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    let q = q as f64;
    let l = q.log2();
    Ok(2.0 * (q - 1.0) * l / (q - l))
}

/// `log2 q^(qm) - log2 multinomial(qm; m, …, m)`, the redundancy in bits of a
/// code that uses every balanced word.
pub fn full_set_redundancy_bits(q: usize, m: usize) -> f64 {
    let count = balanced_count(q, m);
    // log2 of a big integer from its leading 64 bits
    let shift = count.bits().saturating_sub(64);
    let top = (&count >> shift).to_f64().unwrap_or(f64::MAX);
    let log2_count = top.log2() + shift as f64;
    (q * m) as f64 * (q as f64).log2() - log2_count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_values() {
        assert_eq!(trace_bit_cost(8, 128).unwrap(), 137);
        let listed = [2.0000, 4.4803, 6.0000, 6.9361, 7.5694, 8.0351, 8.4000, 8.6995, 8.9539];
        for (q, want) in (2..=10).zip(listed) {
            let got = redundancy_factor(q).unwrap();
            assert!((got - want).abs() < 5e-5, "q={q}: {got} vs {want}");
        }
    }

    #[test]
    fn direct_sum_matches_walkthrough() {
        // q = 4, m = 4: locations over lengths 16, 8, 8
        assert_eq!(trace_bit_cost_direct(4, 4).unwrap(), 10);
        assert_eq!(trace_bit_cost(4, 4).unwrap(), 10);
        assert_eq!(trace_bit_cost_direct(8, 128).unwrap(), 60);
    }

    #[test]
    fn closed_form_gap_is_the_ab_term() {
        for a in 1..=4u32 {
            for b in 0..=10u32 {
                let (q, m) = (1usize << a, 1usize << b);
                let (ai, bi) = (i64::from(a), i64::from(b));
                let gap = trace_bit_cost(q, m).unwrap() - trace_bit_cost_direct(q, m).unwrap();
                assert_eq!(gap, (q as i64 - 1) * (ai * bi - ai - bi), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn rejects_non_powers() {
        assert!(trace_bit_cost(6, 4).is_err());
        assert!(trace_bit_cost_direct(8, 3).is_err());
        assert!(redundancy_factor(1).is_err());
    }

    #[test]
    fn full_set_redundancy_grows_like_log_m() {
        let r1 = full_set_redundancy_bits(4, 64);
        let r2 = full_set_redundancy_bits(4, 256);
        // grows by (q - 1)/2 * log2(256/64) = 3 bits
        assert!((r2 - r1 - 3.0).abs() < 0.1, "{r1} {r2}");
    }
}
