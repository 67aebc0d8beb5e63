//! Monte Carlo harness for the coverage of the selected coordinate mean.
//!
//! Each replication draws an `n × p` matrix of independent standard normals
//! (every population mean is zero), picks one coordinate according to a
//! [`ScreeningDesign`], and checks whether the known-variance normal interval
//! `θ̂_j ± z_{α/2} / sqrt(m)` built from `m` observations contains zero.
//!
//! Randomness for replication `r` comes from a stream keyed by `(seed, r)`
//! alone, so results do not depend on scheduling or thread count. Within a
//! stream the matrix is drawn row by row, followed by `p` extra normals that
//! the noisy-screening design scales by `τ`. Because designs consume the
//! same stream, several designs can be evaluated on one draw and give exactly
//! what separate runs would give.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probkit::{normal_cdf, normal_quantile};
use crate::stream::ReplicationStream;

pub const DEFAULT_SEED: u64 = 20_240_517;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScreeningDesign {
    /// Coordinate `j` (1-based) chosen in advance.
    FixedCoordinate { j: usize },
    /// Largest column mean, interval from the same observations.
    SameSample,
    /// Largest mean over the first `n/2` rows, interval from the rest.
    SplitSample,
    /// Largest `θ̂_j + ξ_j` with `ξ_j ~ N(0, τ²)`, interval from all rows.
    NoisyScreening { tau: f64 },
}

impl ScreeningDesign {
    pub fn label(&self) -> String {
        match self {
            ScreeningDesign::FixedCoordinate { j: 1 } => "No selection; fixed coordinate".into(),
            ScreeningDesign::FixedCoordinate { j } => {
                format!("No selection; fixed coordinate {j}")
            }
            ScreeningDesign::SameSample => "Same-sample selection".into(),
            ScreeningDesign::SplitSample => "Split-sample selection".into(),
            ScreeningDesign::NoisyScreening { tau } => {
                format!("Noisy screening, τ = {tau:.2}")
            }
        }
    }
}

impl fmt::Display for ScreeningDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The six rows of the reference table, in order.
pub const TABLE1_DESIGNS: [ScreeningDesign; 6] = [
    ScreeningDesign::FixedCoordinate { j: 1 },
    ScreeningDesign::SameSample,
    ScreeningDesign::NoisyScreening { tau: 0.25 },
    ScreeningDesign::NoisyScreening { tau: 0.5 },
    ScreeningDesign::NoisyScreening { tau: 1.0 },
    ScreeningDesign::SplitSample,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
    pub design: ScreeningDesign,
}

impl Default for SimulationConfig {
    /// `n = 400`, `p = 50`, `α = 0.05`, 10 000 replications.
    fn default() -> Self {
        Self {
            n: 400,
            p: 50,
            alpha: 0.05,
            reps: 10_000,
            seed: DEFAULT_SEED,
            design: ScreeningDesign::FixedCoordinate { j: 1 },
        }
    }
}

impl SimulationConfig {
    pub fn with_design(design: ScreeningDesign) -> Self {
        Self {
            design,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.p == 0 {
            return bad("p must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} must lie in (0, 1)", self.alpha));
        }
        if self.reps == 0 {
            return bad("reps must be positive".into());
        }
        match self.design {
            ScreeningDesign::FixedCoordinate { j } if j == 0 || j > self.p => {
                bad(format!("fixed coordinate {j} is outside 1..={}", self.p))
            }
            ScreeningDesign::SplitSample if self.n < 2 || !self.n.is_multiple_of(2) => bad(
                format!("split-sample design needs an even n >= 2, got {}", self.n),
            ),
            ScreeningDesign::NoisyScreening { tau } if !(tau > 0.0 && tau.is_finite()) => {
                bad(format!("noise scale tau = {tau} must be positive"))
            }
            _ => Ok(()),
        }
    }

    fn critical_value(&self) -> f64 {
        normal_quantile(1.0 - 0.5 * self.alpha).expect("alpha validated in (0, 1)")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub design: ScreeningDesign,
    pub label: String,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
    pub covered: u64,
    pub coverage: f64,
    /// `sqrt(ĉ (1 - ĉ) / R)`.
    pub mc_se: f64,
    /// Closed-form coverage, where one is known.
    pub exact_coverage: Option<f64>,
}

/// `Φ(z_{α/2})^p`: coverage when the largest of `p` independent means is
/// reported with the interval from the same data.
pub fn exact_same_sample_coverage(p: usize, alpha: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::domain("p", 0.0, "at least 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "in (0, 1)"));
    }
    let z = normal_quantile(1.0 - 0.5 * alpha)?;
    Ok(normal_cdf(z).powf(p as f64))
}

/// Column sums over the two halves of one replication's matrix, plus the
/// screening noise when some design needs it.
struct Draw {
    first: Vec<f64>,
    second: Vec<f64>,
    noise: Vec<f64>,
}

impl Draw {
    fn new(p: usize) -> Self {
        Self {
            first: vec![0.0; p],
            second: vec![0.0; p],
            noise: vec![0.0; p],
        }
    }

    fn fill(&mut self, n: usize, seed: u64, rep: u64, with_noise: bool) {
        let mut stream = ReplicationStream::new(seed, rep);
        self.first.fill(0.0);
        self.second.fill(0.0);
        let half = n / 2;
        for i in 0..n {
            let sums = if i < half {
                &mut self.first
            } else {
                &mut self.second
            };
            for s in sums.iter_mut() {
                *s += stream.standard_normal();
            }
        }
        if with_noise {
            for x in self.noise.iter_mut() {
                *x = stream.standard_normal();
            }
        }
    }
}

/// Index of the largest value; ties go to the lowest index.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

fn evaluate(design: &ScreeningDesign, draw: &Draw, n: usize, z: f64) -> bool {
    let nf = n as f64;
    let full_mean = |j: usize| (draw.first[j] + draw.second[j]) / nf;
    let full_half_width = z / nf.sqrt();
    match *design {
        ScreeningDesign::FixedCoordinate { j } => full_mean(j - 1).abs() <= full_half_width,
        ScreeningDesign::SameSample => {
            let s = argmax((0..draw.first.len()).map(full_mean));
            full_mean(s).abs() <= full_half_width
        }
        ScreeningDesign::SplitSample => {
            let m = (n / 2) as f64;
            let s = argmax(draw.first.iter().copied());
            (draw.second[s] / m).abs() <= z / m.sqrt()
        }
        ScreeningDesign::NoisyScreening { tau } => {
            let s = argmax((0..draw.first.len()).map(|j| full_mean(j) + tau * draw.noise[j]));
            full_mean(s).abs() <= full_half_width
        }
    }
}

fn needs_noise(designs: &[ScreeningDesign]) -> bool {
    designs
        .iter()
        .any(|d| matches!(d, ScreeningDesign::NoisyScreening { .. }))
}

/// Whether replication `rep_index` of `config` covers zero.
pub fn run_replication(config: &SimulationConfig, rep_index: u64) -> Result<bool> {
    config.validate()?;
    if rep_index >= config.reps {
        return Err(Error::InvalidConfig(format!(
            "replication {rep_index} outside 0..{}",
            config.reps
        )));
    }
    let mut draw = Draw::new(config.p);
    let designs = [config.design];
    draw.fill(config.n, config.seed, rep_index, needs_noise(&designs));
    Ok(evaluate(
        &config.design,
        &draw,
        config.n,
        config.critical_value(),
    ))
}

/// Per-replication outcomes, in replication order.
pub fn covered_sequence(config: &SimulationConfig) -> Result<Vec<bool>> {
    config.validate()?;
    let z = config.critical_value();
    let designs = [config.design];
    let noise = needs_noise(&designs);
    Ok((0..config.reps)
        .into_par_iter()
        .map_init(
            || Draw::new(config.p),
            |draw, rep| {
                draw.fill(config.n, config.seed, rep, noise);
                evaluate(&config.design, draw, config.n, z)
            },
        )
        .collect())
}

pub fn run_simulation(config: &SimulationConfig) -> Result<CoverageReport> {
    let mut reports = run_designs(config, &[config.design])?;
    Ok(reports.remove(0))
}

/// Runs several designs on shared draws. `base.design` is ignored; every
/// entry of `designs` is checked against the remaining settings.
pub fn run_designs(
    base: &SimulationConfig,
    designs: &[ScreeningDesign],
) -> Result<Vec<CoverageReport>> {
    if designs.is_empty() || designs.len() > 64 {
        return Err(Error::InvalidConfig(format!(
            "between 1 and 64 designs per run, got {}",
            designs.len()
        )));
    }
    for design in designs {
        SimulationConfig {
            design: *design,
            ..base.clone()
        }
        .validate()?;
    }
    let z = base.critical_value();
    let noise = needs_noise(designs);
    let (n, seed) = (base.n, base.seed);

    let counts = (0..base.reps)
        .into_par_iter()
        .map_init(
            || Draw::new(base.p),
            |draw, rep| {
                draw.fill(n, seed, rep, noise);
                designs
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| evaluate(d, draw, n, z))
                    .fold(0u64, |mask, (i, _)| mask | (1 << i))
            },
        )
        .fold(
            || vec![0u64; designs.len()],
            |mut acc, mask| {
                for (i, c) in acc.iter_mut().enumerate() {
                    *c += (mask >> i) & 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; designs.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    designs
        .iter()
        .zip(counts)
        .map(|(design, covered)| {
            let config = SimulationConfig {
                design: *design,
                ..base.clone()
            };
            report(&config, covered)
        })
        .collect()
}

fn report(config: &SimulationConfig, covered: u64) -> Result<CoverageReport> {
    let reps = config.reps as f64;
    let coverage = covered as f64 / reps;
    let exact_coverage = match config.design {
        ScreeningDesign::FixedCoordinate { .. } => Some(1.0 - config.alpha),
        ScreeningDesign::SameSample => Some(exact_same_sample_coverage(config.p, config.alpha)?),
        _ => None,
    };
    Ok(CoverageReport {
        design: config.design,
        label: config.design.label(),
        n: config.n,
        p: config.p,
        alpha: config.alpha,
        reps: config.reps,
        seed: config.seed,
        covered,
        coverage,
        mc_se: (coverage * (1.0 - coverage) / reps).sqrt(),
        exact_coverage,
    })
}

/// The six reference rows at `n = 400`, `p = 50`, `α = 0.05`.
pub fn table1(seed: u64, reps: u64) -> Result<Vec<CoverageReport>> {
    let base = SimulationConfig {
        seed,
        reps,
        ..SimulationConfig::default()
    };
    run_designs(&base, &TABLE1_DESIGNS)
}

/// Runs `f` on a dedicated pool of `threads` workers (`0` picks the rayon
/// default). Results of this module do not depend on the choice.
pub fn with_thread_count<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
