//! Shared fixtures for the benchmarks.

use balmod::channel::{apply_bsc_with, random_word};
use balmod::ldpc::{balanced_encode, bsc_llr, build_gallager, LdpcCode};
use balmod::rng::stream;

/// A (280,4,7) code and BSC channel LLRs of a noisy balanced codeword.
pub fn bsc_fixture(p: f64, seed: u64) -> (LdpcCode, Vec<f64>) {
    let code = build_gallager(280, 4, 7, seed).expect("gallager code");
    let mut rng = stream(seed, &[1]);
    let u = random_word(code.k(), &mut rng);
    let (x, _) = balanced_encode(&code, &u).expect("encode");
    let y = apply_bsc_with(x.as_word(), p, &mut rng);
    let llr = bsc_llr(&y, p).expect("llr");
    (code, llr)
}
