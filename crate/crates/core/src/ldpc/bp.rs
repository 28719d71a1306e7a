//! Sum-product belief propagation with a flooding schedule.

use super::LdpcCode;
use crate::error::Result;
use crate::word::BitWord;

/// Magnitude limit for channel and check messages.
pub const LLR_CLIP: f64 = 30.0;

pub(crate) fn clip(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(-LLR_CLIP, LLR_CLIP)
    }
}

/// Variable-to-check messages of variable `v`: its channel value plus every
/// other incoming check message.
pub(crate) fn variable_update(code: &LdpcCode, v: usize, m_v: f64, cv: &[f64], vc: &mut [f64]) {
    let edges = code.edges_of_var(v);
    for &e in edges {
        let mut acc = m_v;
        for &f in edges {
            if f != e {
                acc += cv[f];
            }
        }
        vc[e] = acc;
    }
}

/// Check-to-variable messages of check `c`.
pub(crate) fn check_update(code: &LdpcCode, c: usize, vc: &[f64], cv: &mut [f64]) {
    let edges = code.edges_of_check(c);
    for e in edges.clone() {
        let mut prod = 1.0;
        for f in edges.clone() {
            if f != e {
                prod *= (vc[f] / 2.0).tanh();
            }
        }
        cv[e] = clip(2.0 * prod.atanh());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpResult {
    pub hard: BitWord,
    pub satisfied: bool,
    pub iterations: usize,
    /// Posterior log-likelihood ratios, positive favoring 0.
    pub posterior: Vec<f64>,
}

/// Decodes channel LLRs (positive favors 0). Stops after the first iteration
/// whose hard decision satisfies every check.
pub fn bp_decode(code: &LdpcCode, llr: &[f64], max_iter: usize) -> Result<BpResult> {
    code.check_len(llr.len())?;
    let m: Vec<f64> = llr.iter().map(|&x| clip(x)).collect();
    let mut vc = vec![0.0; code.edge_count()];
    let mut cv = vec![0.0; code.edge_count()];
    let mut posterior = m.clone();
    let mut hard = hard_decision(&posterior);
    for iter in 1..=max_iter {
        for (v, &m_v) in m.iter().enumerate() {
            variable_update(code, v, m_v, &cv, &mut vc);
        }
        for c in 0..code.r() {
            check_update(code, c, &vc, &mut cv);
        }
        for (v, p) in posterior.iter_mut().enumerate() {
            *p = m[v] + code.edges_of_var(v).iter().map(|&e| cv[e]).sum::<f64>();
        }
        hard = hard_decision(&posterior);
        if code.is_codeword(&hard) {
            return Ok(BpResult { hard, satisfied: true, iterations: iter, posterior });
        }
    }
    let satisfied = code.is_codeword(&hard);
    Ok(BpResult { hard, satisfied, iterations: max_iter, posterior })
}

pub(crate) fn hard_decision(llr: &[f64]) -> BitWord {
    BitWord::from_bools(llr.iter().map(|&l| l < 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_word;
    use crate::ldpc::{bsc_llr, build_gallager};
    use crate::rng::stream;

    fn llr_of(z: &BitWord, mag: f64) -> Vec<f64> {
        z.iter().map(|b| if b == 1 { -mag } else { mag }).collect()
    }

    #[test]
    fn noiseless_input_converges_at_once() {
        let code = build_gallager(56, 3, 7, 1).unwrap();
        let z = code.encode(&random_word(code.k(), &mut stream(1, &[]))).unwrap();
        let r = bp_decode(&code, &llr_of(&z, f64::INFINITY), 50).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.hard, z);
    }

    #[test]
    fn corrects_single_flip() {
        let code = build_gallager(280, 4, 7, 2).unwrap();
        let mut rng = stream(2, &[]);
        for t in 0..20 {
            let z = code.encode(&random_word(code.k(), &mut rng)).unwrap();
            let mut y = z.clone();
            y.flip((t * 37) % 280);
            let r = bp_decode(&code, &bsc_llr(&y, 0.01).unwrap(), 50).unwrap();
            assert!(r.satisfied);
            assert_eq!(r.hard, z);
        }
    }

    #[test]
    fn bsc_constants() {
        let y: BitWord = "01".parse().unwrap();
        let l = bsc_llr(&y, 0.1).unwrap();
        assert!((l[0] - (0.9f64 / 0.1).ln()).abs() < 1e-15);
        assert!((l[1] + (0.9f64 / 0.1).ln()).abs() < 1e-15);
    }

    #[test]
    fn reports_failure_on_heavy_noise() {
        let code = build_gallager(56, 3, 7, 3).unwrap();
        let mut rng = stream(3, &[]);
        let y = random_word(56, &mut rng);
        let r = bp_decode(&code, &bsc_llr(&y, 0.45).unwrap(), 5).unwrap();
        if !r.satisfied {
            assert_eq!(r.iterations, 5);
        }
        assert!(bp_decode(&code, &[0.0; 3], 5).is_err());
    }
}
