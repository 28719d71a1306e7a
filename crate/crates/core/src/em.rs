//! Expectation-maximization for an equal-weight two-component Gaussian
//! mixture over the cell levels of one block, plus per-cell log-likelihood
//! ratios for soft decoding.
//!
//! Densities are handled in the log domain throughout.

use crate::error::{Error, Result};
use crate::thresholding::CellLevelVector;

/// Smallest variance a component may take.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Minimum total responsibility a component needs in the M-step.
pub const COLLAPSE_FLOOR: f64 = 1e-9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    pub u0: f64,
    pub sigma0: f64,
    pub u1: f64,
    pub sigma1: f64,
}

impl MixtureParams {
    pub fn new(u0: f64, sigma0: f64, u1: f64, sigma1: f64) -> Result<Self> {
        let p = MixtureParams { u0, sigma0, u1, sigma1 };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.u0, self.sigma0, self.u1, self.sigma1].iter().all(|v| v.is_finite());
        if !finite || self.sigma0 <= 0.0 || self.sigma1 <= 0.0 {
            return Err(Error::InvalidParameter(format!("invalid mixture parameters {self:?}")));
        }
        Ok(())
    }

    /// Swaps component labels so that `u0 <= u1`.
    pub fn sorted(self) -> Self {
        if self.u0 <= self.u1 {
            self
        } else {
            MixtureParams { u0: self.u1, sigma0: self.sigma1, u1: self.u0, sigma1: self.sigma0 }
        }
    }

    /// `log f(c | 0)`.
    pub fn log_density0(&self, c: f64) -> f64 {
        log_normal(c, self.u0, self.sigma0)
    }

    /// `log f(c | 1)`.
    pub fn log_density1(&self, c: f64) -> f64 {
        log_normal(c, self.u1, self.sigma1)
    }

    /// Log of the equal-weight mixture density at `c`.
    pub fn log_mixture_density(&self, c: f64) -> f64 {
        let a = self.log_density0(c);
        let b = self.log_density1(c);
        log_add_exp(a, b) - std::f64::consts::LN_2
    }
}

fn log_normal(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    -0.5 * z * z - std.ln() - LN_SQRT_2PI
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Per-cell posterior `P(x_i = 0 | c_i)`; `P(x_i = 1)` is the complement.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    p0: Vec<f64>,
}

impl Responsibilities {
    /// Builds from `P(x_i = 0)` values, which must lie in `[0, 1]`.
    pub fn from_p0(p0: Vec<f64>) -> Result<Self> {
        if let Some(i) = p0.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(format!("responsibility {} at cell {i}", p0[i])));
        }
        Ok(Responsibilities { p0 })
    }

    pub fn len(&self) -> usize {
        self.p0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p0.is_empty()
    }

    pub fn p0(&self, i: usize) -> f64 {
        self.p0[i]
    }

    pub fn p1(&self, i: usize) -> f64 {
        1.0 - self.p0[i]
    }

    pub fn pair(&self, i: usize) -> (f64, f64) {
        (self.p0(i), self.p1(i))
    }
}

pub fn e_step(c: &CellLevelVector, params: &MixtureParams) -> Result<Responsibilities> {
    params.validate()?;
    let p0 = c
        .levels()
        .iter()
        .map(|&ci| {
            // P(0|c) = 1 / (1 + exp(l1 - l0))
            let d = params.log_density1(ci) - params.log_density0(ci);
            if d > 0.0 {
                let e = (-d).exp();
                e / (1.0 + e)
            } else {
                1.0 / (1.0 + d.exp())
            }
        })
        .collect();
    Ok(Responsibilities { p0 })
}

pub fn m_step(c: &CellLevelVector, r: &Responsibilities) -> Result<MixtureParams> {
    if c.len() != r.len() {
        return Err(Error::LengthMismatch { expected: c.len(), actual: r.len() });
    }
    let levels = c.levels();
    let (mut w0, mut w1, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
    for (i, &ci) in levels.iter().enumerate() {
        let (a, b) = r.pair(i);
        w0 += a;
        w1 += b;
        s0 += a * ci;
        s1 += b * ci;
    }
    if w0 < COLLAPSE_FLOOR {
        return Err(Error::ComponentCollapse { component: 0, weight: w0 });
    }
    if w1 < COLLAPSE_FLOOR {
        return Err(Error::ComponentCollapse { component: 1, weight: w1 });
    }
    let u0 = s0 / w0;
    let u1 = s1 / w1;
    let (mut v0, mut v1) = (0.0, 0.0);
    for (i, &ci) in levels.iter().enumerate() {
        let (a, b) = r.pair(i);
        v0 += a * (ci - u0) * (ci - u0);
        v1 += b * (ci - u1) * (ci - u1);
    }
    let sigma0 = (v0 / w0).max(VARIANCE_FLOOR).sqrt();
    let sigma1 = (v1 / w1).max(VARIANCE_FLOOR).sqrt();
    Ok(MixtureParams { u0, sigma0, u1, sigma1 })
}

/// Data log-likelihood under the equal-weight mixture.
pub fn log_likelihood(c: &CellLevelVector, params: &MixtureParams) -> f64 {
    c.levels().iter().map(|&ci| params.log_mixture_density(ci)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub params: MixtureParams,
    pub iterations: usize,
    /// Log-likelihood of the initial parameters followed by one entry per iteration.
    pub log_likelihood: Vec<f64>,
    pub converged: bool,
}

/// Runs EM until the log-likelihood improves by less than `tol` or
/// `max_iter` iterations have run. Labels are sorted on return.
pub fn fit(
    c: &CellLevelVector,
    init: &MixtureParams,
    max_iter: usize,
    tol: f64,
) -> Result<MixtureParams> {
    fit_with_trace(c, init, max_iter, tol).map(|r| r.params)
}

pub fn fit_with_trace(
    c: &CellLevelVector,
    init: &MixtureParams,
    max_iter: usize,
    tol: f64,
) -> Result<FitReport> {
    init.validate()?;
    let mut params = *init;
    let mut trace = vec![log_likelihood(c, &params)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let r = e_step(c, &params)?;
        let next = m_step(c, &r)?;
        let ll = log_likelihood(c, &next);
        let gain = ll - trace[trace.len() - 1];
        params = next;
        trace.push(ll);
        iterations += 1;
        if gain < tol {
            converged = true;
            break;
        }
    }
    Ok(FitReport { params: params.sorted(), iterations, log_likelihood: trace, converged })
}

/// Default starting point: means of the lowest and highest quartiles and the
/// pooled standard deviation of the two quartiles.
pub fn default_init(c: &CellLevelVector) -> Result<MixtureParams> {
    if c.len() < 2 {
        return Err(Error::InvalidParameter("need at least two cells to initialize".into()));
    }
    let mut sorted = c.levels().to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = (sorted.len() / 4).max(1);
    let low = &sorted[..q];
    let high = &sorted[sorted.len() - q..];
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let u0 = mean(low);
    let u1 = mean(high);
    let ss: f64 = low.iter().map(|x| (x - u0) * (x - u0)).sum::<f64>()
        + high.iter().map(|x| (x - u1) * (x - u1)).sum::<f64>();
    let sigma = (ss / (2 * q) as f64).max(VARIANCE_FLOOR).sqrt();
    MixtureParams::new(u0, sigma, u1, sigma)
}

/// `log f(c_i | 0) - log f(c_i | 1)` per cell; positive favors 0.
pub fn per_cell_llr(c: &CellLevelVector, params: &MixtureParams) -> Result<Vec<f64>> {
    params.validate()?;
    Ok(c.levels()
        .iter()
        .map(|&ci| params.log_density0(ci) - params.log_density1(ci))
        .collect())
}
