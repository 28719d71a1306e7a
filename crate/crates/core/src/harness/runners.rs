//! Monte-Carlo experiment runners.
//!
//! Trial `j` of point `p` draws from its own stream `(seed, tag, p, j)`, so
//! trials run in parallel and results are collected in trial order before
//! being summed.

use rand::Rng;
use rayon::prelude::*;

use super::spec::{BecParams, BerParams, BscParams, ExperimentSpec, InversionSetParams, Params, ThresholdParams};
use super::table::{ResultTable, Row};
use crate::channel::{
    model_thresholds, random_balanced_word, random_word, sample_levels_with, DriftModel, ErasureSymbol,
    ErasureWord,
};
use crate::em::{default_init, fit, per_cell_llr};
use crate::error::Result;
use crate::ldpc::{
    balanced_decode_exhaustive, balanced_decode_symmetric, balanced_encode, bec_decode, bec_decode_genie,
    bp_decode, bsc_llr, build_gallager, peel_decode, BecOutcome, LdpcCode, SymmetricDecoder,
};
use crate::rng::{derive_seed, stream};
use crate::thresholding::{
    balancing_threshold_bisect, balancing_threshold_exact, optimal_threshold_oracle,
    relaxed_threshold_mean, relaxed_threshold_second_order, CellLevelVector,
};
use crate::word::BitWord;

const CODE_TAG: u64 = 1;
const TRIAL_TAG: u64 = 2;

/// Runs `f` for every trial and sums the per-trial counters.
fn tally<const N: usize, F>(trials: usize, f: F) -> Result<[u64; N]>
where
    F: Fn(usize) -> Result<[u64; N]> + Sync + Send,
{
    let per_trial: Vec<[u64; N]> = (0..trials).into_par_iter().map(f).collect::<Result<_>>()?;
    let mut acc = [0u64; N];
    for t in per_trial {
        for (a, v) in acc.iter_mut().zip(t) {
            *a += v;
        }
    }
    Ok(acc)
}

struct Emit<'a> {
    table: &'a mut ResultTable,
    seed: u64,
}

impl Emit<'_> {
    fn row(&mut self, x: f64, strategy: &str, metric: &str, value: f64, stderr: f64, trials: usize) {
        self.table.push(Row {
            x,
            strategy: strategy.to_string(),
            metric: metric.to_string(),
            value,
            stderr,
            trials: trials as u64,
            seed: self.seed,
        });
    }

    /// Proportion `count / total` with its binomial standard error.
    fn rate(&mut self, x: f64, strategy: &str, metric: &str, count: u64, total: u64, trials: usize) {
        let (v, se) = if total == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let v = count as f64 / total as f64;
            (v, (v * (1.0 - v) / total as f64).sqrt())
        };
        self.row(x, strategy, metric, v, se, trials);
    }

    /// Sample mean and its standard error from a sum and a sum of squares.
    fn mean(&mut self, x: f64, strategy: &str, metric: &str, sum: u64, sum_sq: u64, trials: usize) {
        let n = trials as f64;
        let mean = sum as f64 / n;
        let se = if trials > 1 {
            let var = (sum_sq as f64 - sum as f64 * mean) / (n - 1.0);
            (var.max(0.0) / n).sqrt()
        } else {
            f64::NAN
        };
        self.row(x, strategy, metric, mean, se, trials);
    }
}

fn errors_at(levels: &[f64], x: &BitWord, v: f64) -> u64 {
    levels.iter().zip(x.iter()).filter(|&(&c, b)| (c >= v) != (b == 1)).count() as u64
}

fn errors_by_llr(llr: &[f64], x: &BitWord) -> u64 {
    llr.iter().zip(x.iter()).filter(|&(&l, b)| (l < 0.0) != (b == 1)).count() as u64
}

pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(spec.describe());
    let mut out = Emit { table: &mut table, seed: spec.seed };
    match &spec.params {
        Params::Ber(p) => ber_curve(p, spec, &mut out)?,
        Params::ThresholdCompare(p) => threshold_compare(p, spec, &mut out)?,
        Params::WerBec(p) => wer_bec(p, spec, &mut out)?,
        Params::InversionSet(p) => inversion_set(p, spec, &mut out)?,
        Params::WerBsc(p) => wer_bsc(p, spec, &mut out)?,
    }
    Ok(table)
}

pub fn run_ber_curve(spec: &ExperimentSpec) -> Result<ResultTable> {
    expect_kind(spec, matches!(spec.params, Params::Ber(_)))?;
    run(spec)
}

pub fn run_threshold_compare(spec: &ExperimentSpec) -> Result<ResultTable> {
    expect_kind(spec, matches!(spec.params, Params::ThresholdCompare(_)))?;
    run(spec)
}

pub fn run_wer_bec(spec: &ExperimentSpec) -> Result<ResultTable> {
    expect_kind(spec, matches!(spec.params, Params::WerBec(_)))?;
    run(spec)
}

pub fn run_inversion_set(spec: &ExperimentSpec) -> Result<ResultTable> {
    expect_kind(spec, matches!(spec.params, Params::InversionSet(_)))?;
    run(spec)
}

pub fn run_wer_bsc(spec: &ExperimentSpec) -> Result<ResultTable> {
    expect_kind(spec, matches!(spec.params, Params::WerBsc(_)))?;
    run(spec)
}

fn expect_kind(spec: &ExperimentSpec, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(crate::error::Error::InvalidParameter(format!("runner does not accept {} experiments", spec.kind())))
    }
}

const BER_STRATEGIES: [&str; 5] = ["fixed", "balancing", "optimal", "balancing_model", "optimal_model"];

fn ber_curve(p: &BerParams, spec: &ExperimentSpec, out: &mut Emit) -> Result<()> {
    let model = DriftModel::new(p.model, p.sigma)?;
    for (ti, &t) in p.times.iter().enumerate() {
        let th = model_thresholds(&model, t)?;
        let counts = tally::<5, _>(spec.trials, |j| {
            let mut rng = stream(spec.seed, &[TRIAL_TAG, ti as u64, j as u64]);
            let x = random_balanced_word(p.cells, &mut rng)?;
            let block = sample_levels_with(&x, &model, t, &mut rng)?;
            let levels = block.levels.levels();
            let vb = balancing_threshold_exact(&block.levels)?.threshold;
            let (_, opt) = optimal_threshold_oracle(&block.levels, &x)?;
            Ok([
                errors_at(levels, &x, th.fixed),
                errors_at(levels, &x, vb),
                opt.total() as u64,
                errors_at(levels, &x, th.balancing),
                errors_at(levels, &x, th.optimal),
            ])
        })?;
        let bits = (p.cells * spec.trials) as u64;
        for (name, c) in BER_STRATEGIES.iter().zip(counts) {
            out.rate(t, name, "ber", c, bits, spec.trials);
        }
        for (name, v) in [("fixed", th.fixed), ("balancing", th.balancing), ("optimal", th.optimal)] {
            out.row(t, name, "analytic_ber", model.ber(v, t), 0.0, spec.trials);
        }
    }
    Ok(())
}

const THRESHOLD_STRATEGIES: [&str; 7] =
    ["fixed", "balancing_exact", "balancing_bisect", "relaxed_mean", "relaxed_second_order", "em", "optimal"];

fn threshold_compare(p: &ThresholdParams, spec: &ExperimentSpec, out: &mut Emit) -> Result<()> {
    let model = DriftModel::new(p.model, p.sigma)?;
    for (ti, &t) in p.times.iter().enumerate() {
        let counts = tally::<8, _>(spec.trials, |j| {
            let mut rng = stream(spec.seed, &[TRIAL_TAG, ti as u64, j as u64]);
            let x = random_balanced_word(p.cells, &mut rng)?;
            let block = sample_levels_with(&x, &model, t, &mut rng)?;
            let c: &CellLevelVector = &block.levels;
            let levels = c.levels();
            let lo = levels.iter().copied().fold(f64::INFINITY, f64::min) - p.eps;
            let hi = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max) + p.eps;
            let bisect = balancing_threshold_bisect(c, lo, hi, p.eps)?;
            let (em_errors, em_failed) = match default_init(c).and_then(|init| fit(c, &init, 200, 1e-9)) {
                Ok(params) => (errors_by_llr(&per_cell_llr(c, &params)?, &x), 0),
                Err(_) => (errors_at(levels, &x, 0.5), 1),
            };
            Ok([
                errors_at(levels, &x, 0.5),
                errors_at(levels, &x, balancing_threshold_exact(c)?.threshold),
                errors_at(levels, &x, bisect.threshold),
                errors_at(levels, &x, relaxed_threshold_mean(c)?),
                errors_at(levels, &x, relaxed_threshold_second_order(c, p.a)?),
                em_errors,
                optimal_threshold_oracle(c, &x)?.1.total() as u64,
                em_failed,
            ])
        })?;
        let bits = (p.cells * spec.trials) as u64;
        for (name, &c) in THRESHOLD_STRATEGIES.iter().zip(&counts) {
            out.rate(t, name, "ber", c, bits, spec.trials);
        }
        out.rate(t, "em", "fit_failure_rate", counts[7], spec.trials as u64, spec.trials);
    }
    Ok(())
}

fn code_for(seed: u64, n: usize, a: usize, b: usize) -> Result<LdpcCode> {
    build_gallager(n, a, b, derive_seed(seed, &[CODE_TAG, n as u64, a as u64, b as u64]))
}

fn erase(w: &BitWord, mask: &[bool]) -> ErasureWord {
    ErasureWord::new(
        w.iter()
            .zip(mask)
            .map(|(b, &e)| if e { ErasureSymbol::Erased } else { ErasureSymbol::Bit(b) })
            .collect(),
    )
}

/// A random stored balanced word, its codeword and its inversion index.
fn balanced_instance<R: Rng + ?Sized>(code: &LdpcCode, rng: &mut R) -> Result<(BitWord, BitWord, usize)> {
    let u = random_word(code.k(), rng);
    let (x, i) = balanced_encode(code, &u)?;
    let z = x.invert_prefix(i)?;
    Ok((x.into_word(), z, i))
}

fn wer_bec(p: &BecParams, spec: &ExperimentSpec, out: &mut Emit) -> Result<()> {
    for (ni, &n) in p.lengths.iter().enumerate() {
        let code = code_for(spec.seed, n, p.a, p.b)?;
        let budget = p.budget.unwrap_or(n + 1);
        let c = tally::<8, _>(spec.trials, |j| {
            let mut rng = stream(spec.seed, &[TRIAL_TAG, ni as u64, j as u64]);
            let (x, z, i) = balanced_instance(&code, &mut rng)?;
            let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(p.erasure)).collect();
            let y = erase(&x, &mask);
            let report = bec_decode(&code, &y, budget)?;
            let genie = bec_decode_genie(&code, &y, i)?;
            let plain = peel_decode(&code, &erase(&z, &mask))?;
            let unique = report.outcome.unique();
            let size = report.inversion_set.len() as u64;
            let mismatch = matches!((&genie, unique), (Some(g), Some((u, _))) if g != u);
            Ok([
                u64::from(unique.is_none_or(|(w, _)| *w != z)),
                u64::from(genie.as_ref() != Some(&z)),
                u64::from(plain.as_ref() != Some(&z)),
                size,
                size * size,
                report.residual_erasures as u64,
                u64::from(matches!(report.outcome, BecOutcome::Ambiguous { .. })),
                u64::from(mismatch),
            ])
        })?;
        let x = n as f64;
        let t = spec.trials;
        out.rate(x, "balanced", "wer", c[0], t as u64, t);
        out.rate(x, "genie", "wer", c[1], t as u64, t);
        out.rate(x, "unbalanced", "wer", c[2], t as u64, t);
        out.mean(x, "balanced", "inversion_set_size", c[3], c[4], t);
        out.rate(x, "balanced", "residual_erasure_rate", c[5], (n * t) as u64, t);
        out.rate(x, "balanced", "ambiguous_rate", c[6], t as u64, t);
        out.row(x, "balanced", "genie_mismatches", c[7] as f64, 0.0, t);
    }
    Ok(())
}

fn inversion_set(p: &InversionSetParams, spec: &ExperimentSpec, out: &mut Emit) -> Result<()> {
    for &n in &p.lengths {
        let code = code_for(spec.seed, n, p.a, p.b)?;
        let label = format!("n={n}");
        for (ei, &e) in p.erasures.iter().enumerate() {
            let c = tally::<3, _>(spec.trials, |j| {
                let mut rng = stream(spec.seed, &[TRIAL_TAG, n as u64, ei as u64, j as u64]);
                let (x, _, _) = balanced_instance(&code, &mut rng)?;
                let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(e)).collect();
                let report = bec_decode(&code, &erase(&x, &mask), 1)?;
                let size = report.inversion_set.len() as u64;
                Ok([size, size * size, report.residual_erasures as u64])
            })?;
            out.mean(e, &label, "inversion_set_size", c[0], c[1], spec.trials);
            out.rate(e, &label, "residual_erasure_rate", c[2], (n * spec.trials) as u64, spec.trials);
        }
    }
    Ok(())
}

fn wer_bsc(p: &BscParams, spec: &ExperimentSpec, out: &mut Emit) -> Result<()> {
    let code = code_for(spec.seed, p.n, p.a, p.b)?;
    let params = SymmetricDecoder { rounds: p.rounds, candidates: p.candidates, max_iter: p.max_iter };
    let sub = p.exhaustive_trials.min(spec.trials);
    for (pi, &q) in p.crossovers.iter().enumerate() {
        let c = tally::<4, _>(spec.trials, |j| {
            let mut rng = stream(spec.seed, &[TRIAL_TAG, pi as u64, j as u64]);
            let u = random_word(code.k(), &mut rng);
            let (x, i) = balanced_encode(&code, &u)?;
            let z = x.invert_prefix(i)?;
            let e = BitWord::from_bools((0..p.n).map(|_| rng.random_bool(q)));
            let plain = bp_decode(&code, &bsc_llr(&z.xor(&e)?, q)?, p.max_iter)?;
            let llr = bsc_llr(&x.xor(&e)?, q)?;
            let guided_err = balanced_decode_symmetric(&code, &llr, &params).map_or(true, |d| d.u != u);
            let (exh_err, paired_err) = if j < sub {
                let exh = balanced_decode_exhaustive(&code, &llr, p.max_iter).map_or(true, |d| d.u != u);
                (u64::from(exh), u64::from(guided_err))
            } else {
                (0, 0)
            };
            Ok([u64::from(!(plain.satisfied && plain.hard == z)), u64::from(guided_err), exh_err, paired_err])
        })?;
        let t = spec.trials as u64;
        out.rate(q, "unbalanced", "wer", c[0], t, spec.trials);
        out.rate(q, "balanced", "wer", c[1], t, spec.trials);
        if sub > 0 {
            out.rate(q, "exhaustive", "wer", c[2], sub as u64, sub);
            out.rate(q, "balanced", "wer_exhaustive_subset", c[3], sub as u64, sub);
        }
    }
    Ok(())
}
