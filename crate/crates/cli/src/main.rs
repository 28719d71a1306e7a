mod config;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use balmod::harness::{self, ExperimentKind, ExperimentSpec, OutputFormat, Params};
use balmod::mlc::{
    knuth_q_balance, knuth_q_unbalance, rank_balanced_checked, unrank_balanced, BalancedQaryWord, QaryWord,
};
use balmod::thresholding::{
    balancing_threshold_bisect, balancing_threshold_exact, read_with_threshold, relaxed_threshold_mean,
    relaxed_threshold_second_order, CellLevelVector,
};
use balmod::{build_gallager, BitWord, DriftKind, KnuthCodec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "balmod", version, about = "Balanced modulation codecs, read thresholds and simulations")]
struct Cli {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// TOML file with model, code and decoder parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Balance a bit string with a prefix-inversion code.
    Encode { bits: String },
    /// Recover the message from a balanced codeword.
    Decode { bits: String },
    /// Compute a read threshold for comma-separated cell levels.
    Threshold(ThresholdArgs),
    /// Run a seeded simulation and emit a result table.
    Sim {
        #[command(subcommand)]
        which: SimKind,
    },
    /// Multi-level (q-ary) balanced codes.
    Mlc {
        #[command(subcommand)]
        op: MlcOp,
    },
    /// LDPC code utilities.
    Code {
        #[command(subcommand)]
        op: CodeOp,
    },
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    levels: String,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    a_constant: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Bisect,
    Mean,
    SecondOrder,
}

#[derive(Subcommand, Debug)]
enum SimKind {
    Ber(SimArgs),
    WerBec(SimArgs),
    WerBsc(SimArgs),
    InversionSet(SimArgs),
    ThresholdCompare(SimArgs),
}

#[derive(Args, Debug, Default)]
struct SimArgs {
    #[arg(long)]
    model: Option<DriftKind>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Column weight of the parity-check matrix.
    #[arg(long)]
    a: Option<usize>,
    /// Row weight of the parity-check matrix.
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    erasures: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    crossovers: Option<Vec<f64>>,
    /// Belief propagation rounds behind each shift score.
    #[arg(long)]
    ell: Option<usize>,
    /// Candidate shifts decoded per word.
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    exhaustive_trials: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum MlcOp {
    /// Lexicographic rank of a balanced q-ary word.
    Rank {
        word: String,
        #[arg(long)]
        q: usize,
    },
    /// Balanced q-ary word of length q*m with the given rank.
    Unrank {
        rank: String,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        m: usize,
    },
    /// Balance a q-ary word and print its trace.
    Balance {
        word: String,
        #[arg(long)]
        q: usize,
    },
    /// Undo `balance` given the word and its trace.
    Unbalance {
        word: String,
        #[arg(long)]
        q: usize,
        #[arg(long, value_delimiter = ',')]
        trace: Vec<usize>,
        /// Group per trace entry; zeros when omitted.
        #[arg(long, value_delimiter = ',')]
        groups: Option<Vec<usize>>,
    },
}

#[derive(Subcommand, Debug)]
enum CodeOp {
    /// Draw a regular Gallager code and print it in MatrixMarket form.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn symbols_to_string(w: &QaryWord) -> String {
    w.symbols().iter().map(|s| char::from_digit(u32::from(*s), 36).unwrap_or('?')).collect()
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn parse_levels(s: &str) -> Result<CellLevelVector> {
    let levels = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad level {x:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellLevelVector::new(levels)?)
}

fn codec_for_codeword(len: usize) -> Result<KnuthCodec> {
    (2..len)
        .step_by(2)
        .filter_map(|k| KnuthCodec::new(k).ok())
        .find(|c| c.codeword_len() == len)
        .ok_or_else(|| anyhow!("no prefix-inversion code has codeword length {len}"))
}

fn build_spec(kind: ExperimentKind, cli: &Cli, cfg: &Config, a: &SimArgs) -> Result<ExperimentSpec> {
    let seed = cli.seed.or(cfg.seed).unwrap_or(1);
    let mut spec = ExperimentSpec::defaults(kind, seed);
    if let Some(t) = cli.trials.or(cfg.trials) {
        spec.trials = t;
    }
    spec.output = cli.out.clone();
    let code = cfg.code.as_ref();
    let model = match (&a.model, &cfg.model) {
        (Some(m), _) => Some(*m),
        (None, Some(m)) => Some(m.parse::<DriftKind>()?),
        (None, None) => None,
    };
    let sigma = a.sigma.or(cfg.sigma);
    let times = a.times.clone().or_else(|| cfg.times.clone());
    let cells = a.cells.or(cfg.cells);
    let ca = a.a.or(code.and_then(|c| c.a));
    let cb = a.b.or(code.and_then(|c| c.b));
    let lengths = a.lengths.clone().or_else(|| cfg.lengths.clone());
    match &mut spec.params {
        Params::Ber(p) => {
            p.model = model.unwrap_or(p.model);
            p.sigma = sigma.unwrap_or(p.sigma);
            p.times = times.unwrap_or(p.times.clone());
            p.cells = cells.unwrap_or(p.cells);
        }
        Params::ThresholdCompare(p) => {
            p.model = model.unwrap_or(p.model);
            p.sigma = sigma.unwrap_or(p.sigma);
            p.times = times.unwrap_or(p.times.clone());
            p.cells = cells.unwrap_or(p.cells);
            p.eps = cfg.eps.unwrap_or(p.eps);
            p.a = cfg.a_constant.unwrap_or(p.a);
        }
        Params::WerBec(p) => {
            p.a = ca.unwrap_or(p.a);
            p.b = cb.unwrap_or(p.b);
            p.lengths = lengths.unwrap_or(p.lengths.clone());
            if let Some(e) = a.erasures.as_ref().and_then(|e| e.first().copied()).or(cfg.erasure) {
                p.erasure = e;
            }
            p.budget = a.budget.or(cfg.budget).or(p.budget);
        }
        Params::InversionSet(p) => {
            p.a = ca.unwrap_or(p.a);
            p.b = cb.unwrap_or(p.b);
            p.lengths = lengths.unwrap_or(p.lengths.clone());
            p.erasures = a.erasures.clone().or_else(|| cfg.erasures.clone()).unwrap_or(p.erasures.clone());
        }
        Params::WerBsc(p) => {
            p.n = a.n.or(code.and_then(|c| c.n)).unwrap_or(p.n);
            p.a = ca.unwrap_or(p.a);
            p.b = cb.unwrap_or(p.b);
            p.crossovers = a.crossovers.clone().or_else(|| cfg.crossovers.clone()).unwrap_or(p.crossovers.clone());
            p.rounds = a.ell.or(cfg.ell).unwrap_or(p.rounds);
            p.candidates = a.c.or(cfg.c).unwrap_or(p.candidates);
            p.max_iter = a.max_iter.or(cfg.max_iter).unwrap_or(p.max_iter);
            p.exhaustive_trials = a.exhaustive_trials.or(cfg.exhaustive_trials).unwrap_or(p.exhaustive_trials);
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn run_sim(cli: &Cli, cfg: &Config, which: &SimKind) -> Result<()> {
    let (kind, args) = match which {
        SimKind::Ber(a) => (ExperimentKind::BerCurve, a),
        SimKind::WerBec(a) => (ExperimentKind::WerBec, a),
        SimKind::WerBsc(a) => (ExperimentKind::WerBsc, a),
        SimKind::InversionSet(a) => (ExperimentKind::InversionSetSize, a),
        SimKind::ThresholdCompare(a) => (ExperimentKind::ThresholdCompare, a),
    };
    let spec = build_spec(kind, cli, cfg, args)?;
    let table = harness::run(&spec)?;
    let format = match cli.format {
        Format::Csv => OutputFormat::Csv,
        Format::Svg => OutputFormat::Svg,
    };
    match &spec.output {
        Some(path) => harness::emit(&table, format, path).with_context(|| format!("writing {}", path.display())),
        None => write_output(None, &harness::render(&table, format)?),
    }
}

fn run_mlc(cli: &Cli, op: &MlcOp) -> Result<()> {
    let text = match op {
        MlcOp::Rank { word, q } => {
            let w = QaryWord::parse(word, *q)?;
            format!("{}\n", rank_balanced_checked(&w)?)
        }
        MlcOp::Unrank { rank, q, m } => {
            let r: BigUint = rank.parse().with_context(|| format!("bad rank {rank:?}"))?;
            format!("{}\n", symbols_to_string(unrank_balanced(&r, *q, *m)?.as_word()))
        }
        MlcOp::Balance { word, q } => {
            let (x, trace) = knuth_q_balance(&QaryWord::parse(word, *q)?)?;
            let groups: Vec<usize> = trace.steps().iter().map(|s| s.group).collect();
            let mut out = format!("{}\ntrace={}\n", symbols_to_string(x.as_word()), join(&trace.indices()));
            if groups.iter().any(|&g| g != 0) {
                out.push_str(&format!("groups={}\n", join(&groups)));
            }
            out
        }
        MlcOp::Unbalance { word, q, trace, groups } => {
            let x = BalancedQaryWord::new(QaryWord::parse(word, *q)?)?;
            // any word of the same shape yields the trace layout
            let (_, shape) = knuth_q_balance(x.as_word())?;
            let mut steps = shape.with_indices(trace)?.steps().to_vec();
            if let Some(groups) = groups {
                if groups.len() != steps.len() {
                    bail!("expected {} groups, got {}", steps.len(), groups.len());
                }
                for (s, &g) in steps.iter_mut().zip(groups) {
                    s.group = g;
                }
            }
            let u = knuth_q_unbalance(&x, &balmod::mlc::BalancingTrace::from_steps(steps))?;
            format!("{}\n", symbols_to_string(&u))
        }
    };
    write_output(cli.out.as_ref(), &text)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Encode { bits } => {
            let u: BitWord = bits.parse()?;
            let c = KnuthCodec::new(u.len())?.encode(&u)?;
            write_output(cli.out.as_ref(), &format!("{}\n", c.to_word()))
        }
        Command::Decode { bits } => {
            let w: BitWord = bits.parse()?;
            let u = codec_for_codeword(w.len())?.decode_word(&w)?;
            write_output(cli.out.as_ref(), &format!("{u}\n"))
        }
        Command::Threshold(t) => {
            let c = parse_levels(&t.levels)?;
            let v = match t.method {
                Method::Exact => balancing_threshold_exact(&c)?.threshold,
                Method::Bisect => {
                    let lo = c.levels().iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = c.levels().iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let eps = t.eps.or(cfg.eps).unwrap_or(1e-9);
                    balancing_threshold_bisect(&c, lo - eps, hi + eps, eps)?.threshold
                }
                Method::Mean => relaxed_threshold_mean(&c)?,
                Method::SecondOrder => relaxed_threshold_second_order(&c, t.a_constant.or(cfg.a_constant).unwrap_or(1.0))?,
            };
            write_output(cli.out.as_ref(), &format!("threshold={v}\nread={}\n", read_with_threshold(&c, v)))
        }
        Command::Sim { which } => run_sim(cli, &cfg, which),
        Command::Mlc { op } => run_mlc(cli, op),
        Command::Code { op: CodeOp::Gen { n, a, b } } => {
            let code = build_gallager(*n, *a, *b, cli.seed.or(cfg.seed).unwrap_or(1))?;
            write_output(cli.out.as_ref(), &code.to_matrix_market())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
