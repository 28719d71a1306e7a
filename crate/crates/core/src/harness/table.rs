use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = ["x", "strategy", "metric", "value", "stderr", "trials", "seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x: f64,
    pub strategy: String,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    /// Parameters of the run that produced the rows.
    pub spec: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

impl ResultTable {
    pub fn new(spec: Vec<(String, String)>) -> Self {
        ResultTable { spec, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Rows with the given strategy and metric, in insertion order.
    pub fn series<'a>(&'a self, strategy: &'a str, metric: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.strategy == strategy && r.metric == metric)
    }

    pub fn get<'a>(&'a self, x: f64, strategy: &'a str, metric: &'a str) -> Option<&'a Row> {
        self.series(strategy, metric).find(|r| r.x == x)
    }

    pub fn spec_value(&self, key: &str) -> Option<&str> {
        self.spec.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.spec {
            writeln!(out, "# {k}={v}").expect("writing to a string");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.x.to_string(),
                r.strategy.clone(),
                r.metric.clone(),
                r.value.to_string(),
                r.stderr.to_string(),
                r.trials.to_string(),
                r.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut spec = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let entry = line[1..].trim_start();
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header line {line:?}")))?;
            spec.push((k.to_string(), v.to_string()));
        }
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = rd.headers().map_err(csv_err)?;
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::Parse(format!("unexpected columns {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(csv_err)?;
            let f = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::Parse(format!("bad number {:?}", &rec[i])))
            };
            let u = |i: usize| -> Result<u64> {
                rec[i].parse().map_err(|_| Error::Parse(format!("bad integer {:?}", &rec[i])))
            };
            rows.push(Row {
                x: f(0)?,
                strategy: rec[1].to_string(),
                metric: rec[2].to_string(),
                value: f(3)?,
                stderr: f(4)?,
                trials: u(5)?,
                seed: u(6)?,
            });
        }
        Ok(ResultTable { spec, rows })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        ResultTable::from_csv(&std::fs::read_to_string(path)?)
    }
}
