//! Seeded Monte Carlo oracles for the return probability.
//!
//! Trial `t` belongs to worker `t mod workers`; worker `w` draws from the
//! ChaCha8 stream `w` keyed by `seed`. Partial tallies are merged in worker
//! order, so a result is a pure function of `(spec, trials, seed, workers)`.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{decimal_string, rational_string, rational_to_f64};
use crate::scalar::CompensatedSum;
use crate::walk::{return_probability, WalkSpec};

/// An exact probability in both machine- and human-readable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: String,
}

impl From<&BigRational> for ExactValue {
    fn from(r: &BigRational) -> Self {
        ExactValue {
            exact: rational_string(r),
            decimal: decimal_string(r, 15),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimulationKind {
    Walk,
    Beta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationResult {
    pub kind: SimulationKind,
    pub dimension: u32,
    pub half_steps: u32,
    pub trials: u64,
    /// Walks that ended at the origin; only meaningful for path simulation.
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub exact_reference: ExactValue,
    /// `(estimate − reference) / stdError`; infinite if the error is zero and the estimate is off.
    pub z_score: f64,
    pub seed: u64,
    pub workers: usize,
}

impl SimulationResult {
    /// Passes the `|z| < 4` statistical gate.
    pub fn within(&self, z_limit: f64) -> bool {
        self.z_score.abs() < z_limit
    }
}

fn z_score(estimate: f64, reference: f64, std_error: f64) -> f64 {
    let diff = estimate - reference;
    if std_error > 0.0 {
        diff / std_error
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

fn check_run(trials: u64, workers: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidParameter("workers must be at least 1".into()));
    }
    Ok(())
}

/// Trials handled by worker `w`.
fn share(trials: u64, workers: usize, w: usize) -> u64 {
    let workers = workers as u64;
    trials / workers + u64::from((w as u64) < trials % workers)
}

/// Independent stream for one worker.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Simulate `trials` walks of `2n` steps and count returns to the origin.
pub fn simulate_walk(spec: &WalkSpec, trials: u64, seed: u64, workers: usize) -> Result<SimulationResult> {
    check_run(trials, workers)?;
    let k = spec.dimension() as usize;
    let steps = spec.steps();
    let directions = 2 * spec.dimension();

    let hits: u64 = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = worker_rng(seed, w);
            let mut pos = vec![0i64; k];
            let mut hits = 0u64;
            for _ in 0..share(trials, workers, w) {
                pos.iter_mut().for_each(|x| *x = 0);
                for _ in 0..steps {
                    let d = rng.random_range(0..directions);
                    pos[(d / 2) as usize] += if d % 2 == 0 { 1 } else { -1 };
                }
                hits += u64::from(pos.iter().all(|&x| x == 0));
            }
            hits
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();

    let exact = return_probability(spec.dimension(), spec.half_steps())?;
    let estimate = hits as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(SimulationResult {
        kind: SimulationKind::Walk,
        dimension: spec.dimension(),
        half_steps: spec.half_steps(),
        trials,
        hits,
        estimate,
        std_error,
        z_score: z_score(estimate, rational_to_f64(&exact), std_error),
        exact_reference: (&exact).into(),
        seed,
        workers,
    })
}

/// One draw of `V = 2Y − 1` with `Y ~ Be(1/2, 1/2)`, via the arcsine inverse CDF.
#[inline]
pub fn sample_arcsine_shifted<R: Rng>(rng: &mut R) -> f64 {
    let w: f64 = rng.random();
    -(std::f64::consts::PI * w).cos()
}

/// Estimate `E[((V₁ + ⋯ + V_k)/k)^{2n}]` by sampling.
pub fn simulate_beta_moment(
    k: u32,
    n: u32,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimulationResult> {
    let spec = WalkSpec::new(k, n)?;
    check_run(trials, workers)?;
    let inv_k = 1.0 / k as f64;
    let power = 2 * n as i32;

    let partials: Vec<(CompensatedSum<f64>, CompensatedSum<f64>)> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = worker_rng(seed, w);
            let mut sum = CompensatedSum::zero();
            let mut sum_sq = CompensatedSum::zero();
            for _ in 0..share(trials, workers, w) {
                let s: f64 = (0..k).map(|_| sample_arcsine_shifted(&mut rng)).sum();
                let x = (s * inv_k).powi(power);
                sum.add(x);
                sum_sq.add(x * x);
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = CompensatedSum::zero();
    let mut sum_sq = CompensatedSum::zero();
    for (s, sq) in &partials {
        sum.absorb(s);
        sum_sq.absorb(sq);
    }
    let nt = trials as f64;
    let mean = sum.value() / nt;
    let std_error = if trials > 1 {
        let var = ((sum_sq.value() - sum.value() * mean) / (nt - 1.0)).max(0.0);
        (var / nt).sqrt()
    } else {
        0.0
    };
    let exact = return_probability(k, n)?;
    Ok(SimulationResult {
        kind: SimulationKind::Beta,
        dimension: k,
        half_steps: spec.half_steps(),
        trials,
        hits: 0,
        estimate: mean,
        std_error,
        z_score: z_score(mean, rational_to_f64(&exact), std_error),
        exact_reference: (&exact).into(),
        seed,
        workers,
    })
}
