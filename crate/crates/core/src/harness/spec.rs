use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::DriftKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    BerCurve,
    WerBec,
    WerBsc,
    InversionSetSize,
    ThresholdCompare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::BerCurve,
        ExperimentKind::WerBec,
        ExperimentKind::WerBsc,
        ExperimentKind::InversionSetSize,
        ExperimentKind::ThresholdCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::BerCurve => "ber-curve",
            ExperimentKind::WerBec => "wer-bec",
            ExperimentKind::WerBsc => "wer-bsc",
            ExperimentKind::InversionSetSize => "inversion-set-size",
            ExperimentKind::ThresholdCompare => "threshold-compare",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment kind {s:?}")))
    }
}

/// Bit error rate of a drifting block read at several thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct BerParams {
    pub model: DriftKind,
    pub sigma: f64,
    pub times: Vec<f64>,
    /// Cells per simulated block.
    pub cells: usize,
}

/// Data-driven threshold estimators compared on the same blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdParams {
    pub model: DriftKind,
    pub sigma: f64,
    pub times: Vec<f64>,
    pub cells: usize,
    /// Interval width at which bisection stops.
    pub eps: f64,
    /// Coefficient of the second-order relaxed threshold.
    pub a: f64,
}

/// Erasure decoding of balanced codes across block lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct BecParams {
    pub a: usize,
    pub b: usize,
    pub lengths: Vec<usize>,
    pub erasure: f64,
    /// Residual inversion indices tried after a stall; `None` tries all.
    pub budget: Option<usize>,
}

/// Residual inversion-set size across erasure probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionSetParams {
    pub a: usize,
    pub b: usize,
    pub lengths: Vec<usize>,
    pub erasures: Vec<f64>,
}

/// Word error rate over a binary symmetric channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BscParams {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub crossovers: Vec<f64>,
    /// Belief propagation rounds behind each shift score.
    pub rounds: usize,
    /// Candidate shifts decoded per word.
    pub candidates: usize,
    pub max_iter: usize,
    /// Trials per point that also run the every-shift decoder.
    pub exhaustive_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Ber(BerParams),
    WerBec(BecParams),
    WerBsc(BscParams),
    InversionSet(InversionSetParams),
    ThresholdCompare(ThresholdParams),
}

impl Params {
    pub fn defaults(kind: ExperimentKind) -> Params {
        let times = (0..=5).map(|k| k as f64 / 10.0).collect::<Vec<_>>();
        match kind {
            ExperimentKind::BerCurve => Params::Ber(BerParams {
                model: DriftKind::MeanDrift,
                sigma: 0.2,
                times,
                cells: 10_000,
            }),
            ExperimentKind::ThresholdCompare => Params::ThresholdCompare(ThresholdParams {
                model: DriftKind::VarianceGrowth,
                sigma: 0.2,
                times,
                cells: 1024,
                eps: 1e-6,
                a: 1.0,
            }),
            ExperimentKind::WerBec => Params::WerBec(BecParams {
                a: 4,
                b: 8,
                lengths: vec![64, 128, 256, 512],
                erasure: 0.35,
                budget: None,
            }),
            ExperimentKind::InversionSetSize => Params::InversionSet(InversionSetParams {
                a: 4,
                b: 8,
                lengths: vec![64, 128, 256],
                erasures: vec![0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
            }),
            ExperimentKind::WerBsc => Params::WerBsc(BscParams {
                n: 280,
                a: 4,
                b: 7,
                crossovers: vec![0.01, 0.02, 0.03, 0.04, 0.05],
                rounds: 2,
                candidates: 4,
                max_iter: 50,
                exhaustive_trials: 20,
            }),
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            Params::Ber(_) => ExperimentKind::BerCurve,
            Params::WerBec(_) => ExperimentKind::WerBec,
            Params::WerBsc(_) => ExperimentKind::WerBsc,
            Params::InversionSet(_) => ExperimentKind::InversionSetSize,
            Params::ThresholdCompare(_) => ExperimentKind::ThresholdCompare,
        }
    }
}

fn default_trials(kind: ExperimentKind) -> usize {
    match kind {
        ExperimentKind::BerCurve | ExperimentKind::ThresholdCompare => 20,
        ExperimentKind::WerBec => 1000,
        ExperimentKind::InversionSetSize => 500,
        ExperimentKind::WerBsc => 2000,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: Params,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn check_probability(name: &str, p: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { (0.0..1.0).contains(&p) } else { p > 0.0 && p < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} {p} out of range")))
    }
}

fn check_times(times: &[f64], sigma: f64, cells: usize) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidParameter(format!("time {t} must be non-negative")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
    }
    if cells == 0 || cells % 2 == 1 {
        return Err(Error::InvalidParameter(format!("cell count {cells} must be even and positive")));
    }
    Ok(())
}

fn check_code(a: usize, b: usize, lengths: &[usize]) -> Result<()> {
    if lengths.is_empty() {
        return Err(Error::InvalidParameter("no block lengths".into()));
    }
    if a < 2 || b <= a {
        return Err(Error::InvalidParameter(format!("column weight {a} and row weight {b} unusable")));
    }
    if let Some(n) = lengths.iter().find(|&&n| n == 0 || n % b != 0 || n % 2 == 1) {
        return Err(Error::InvalidParameter(format!("block length {n} must be even and a multiple of {b}")));
    }
    Ok(())
}

impl ExperimentSpec {
    pub fn new(params: Params, seed: u64) -> Self {
        let trials = default_trials(params.kind());
        ExperimentSpec { params, trials, seed, output: None }
    }

    pub fn defaults(kind: ExperimentKind, seed: u64) -> Self {
        ExperimentSpec::new(Params::defaults(kind), seed)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.params.kind()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trial count must be at least 1".into()));
        }
        match &self.params {
            Params::Ber(p) => check_times(&p.times, p.sigma, p.cells),
            Params::ThresholdCompare(p) => {
                check_times(&p.times, p.sigma, p.cells)?;
                if !(p.eps > 0.0) || !p.a.is_finite() {
                    return Err(Error::InvalidParameter("eps must be positive and a finite".into()));
                }
                Ok(())
            }
            Params::WerBec(p) => {
                check_code(p.a, p.b, &p.lengths)?;
                check_probability("erasure probability", p.erasure, true)?;
                if p.budget == Some(0) {
                    return Err(Error::InvalidParameter("budget must be positive".into()));
                }
                Ok(())
            }
            Params::InversionSet(p) => {
                check_code(p.a, p.b, &p.lengths)?;
                if p.erasures.is_empty() {
                    return Err(Error::InvalidParameter("no erasure probabilities".into()));
                }
                p.erasures.iter().try_for_each(|&e| check_probability("erasure probability", e, true))
            }
            Params::WerBsc(p) => {
                check_code(p.a, p.b, &[p.n])?;
                if p.crossovers.is_empty() {
                    return Err(Error::InvalidParameter("no crossover probabilities".into()));
                }
                p.crossovers.iter().try_for_each(|&c| check_probability("crossover", c, false))?;
                if p.candidates == 0 || p.max_iter == 0 {
                    return Err(Error::InvalidParameter("candidates and max_iter must be positive".into()));
                }
                Ok(())
            }
        }
    }

    /// Key-value record of every parameter, in a fixed order.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out: Vec<(&str, String)> = vec![("experiment", self.kind().to_string())];
        match &self.params {
            Params::Ber(p) => {
                out.push(("model", p.model.to_string()));
                out.push(("sigma", p.sigma.to_string()));
                out.push(("times", join(&p.times)));
                out.push(("cells", p.cells.to_string()));
            }
            Params::ThresholdCompare(p) => {
                out.push(("model", p.model.to_string()));
                out.push(("sigma", p.sigma.to_string()));
                out.push(("times", join(&p.times)));
                out.push(("cells", p.cells.to_string()));
                out.push(("eps", p.eps.to_string()));
                out.push(("a", p.a.to_string()));
            }
            Params::WerBec(p) => {
                out.push(("column_weight", p.a.to_string()));
                out.push(("row_weight", p.b.to_string()));
                out.push(("lengths", join(&p.lengths)));
                out.push(("erasure", p.erasure.to_string()));
                out.push(("budget", p.budget.map_or("all".to_string(), |b| b.to_string())));
            }
            Params::InversionSet(p) => {
                out.push(("column_weight", p.a.to_string()));
                out.push(("row_weight", p.b.to_string()));
                out.push(("lengths", join(&p.lengths)));
                out.push(("erasures", join(&p.erasures)));
            }
            Params::WerBsc(p) => {
                out.push(("n", p.n.to_string()));
                out.push(("column_weight", p.a.to_string()));
                out.push(("row_weight", p.b.to_string()));
                out.push(("crossovers", join(&p.crossovers)));
                out.push(("rounds", p.rounds.to_string()));
                out.push(("candidates", p.candidates.to_string()));
                out.push(("max_iter", p.max_iter.to_string()));
                out.push(("exhaustive_trials", p.exhaustive_trials.to_string()));
            }
        }
        out.push(("trials", self.trials.to_string()));
        out.push(("seed", self.seed.to_string()));
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}
