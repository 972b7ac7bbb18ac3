//! Monte Carlo trajectory simulation over the dual stochastic matrices,
//! with z-score validation against the spectral/matrix-power probabilities.
//!
//! Determinism contract: the generator is ChaCha8 (as shipped by
//! `rand_chacha` 0.3), keyed by `seed_from_u64(seed)` with the stream
//! counter set to the trajectory index, and each step consumes one
//! `next_u64` mapped to `[0, 1)` by `(x >> 11)·2⁻⁵³`. Trajectories
//! therefore draw from disjoint substreams and the report is bit-identical
//! regardless of execution order or parallelism.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kmg::ChainSide;
use crate::scalar::Scalar;
use crate::stochastic::StochasticPair;

/// A row defect larger than this is treated as genuine escape probability
/// (semi-stochastic boundary rows); anything smaller is rounding and the
/// last outcome absorbs it.
const ESCAPE_DEFECT_TOL: f64 = 1e-9;

/// One simulation request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub side: ChainSide,
    pub start_state: usize,
    /// Number of steps each trajectory takes (the horizon).
    pub steps: usize,
    pub trajectories: u64,
    pub seed: u64,
    /// States the simulation is allowed to touch; `None` sizes it so no
    /// trajectory can structurally reach the truncation edge.
    pub truncation: Option<usize>,
}

impl SimConfig {
    /// The structural bound: everything the walk can climb to plus the
    /// edge rows.
    pub fn resolved_truncation(&self) -> usize {
        self.truncation
            .unwrap_or(self.start_state + self.side.up_reach() * self.steps + 3)
    }
}

/// A per-state estimate of the `steps`-step transition probability with its
/// binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RStepEstimate {
    pub state: usize,
    pub probability: f64,
    pub std_error: f64,
}

/// Everything a simulation run produces. `visit_counts[t][s]` is the number
/// of trajectories at state `s` after `t` steps; `escaped[t]` counts those
/// absorbed by the escape sink (semi-stochastic row defect) by time `t`, so
/// each time slice sums to `trajectories`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    /// The declared generator, for cross-implementation reproduction.
    pub prng: String,
    pub visit_counts: Vec<Vec<u64>>,
    pub escaped: Vec<u64>,
    pub rstep_estimates: Vec<RStepEstimate>,
    /// Fraction of trajectories that revisit `start_state` at some
    /// `1 ≤ t ≤ steps`.
    pub return_frequency: f64,
}

/// Runs the simulation by inverse-CDF over each row's banded outcomes.
pub fn simulate<S: Scalar>(config: &SimConfig, pair: &StochasticPair<S>) -> Result<SimReport> {
    if config.trajectories == 0 {
        return Err(Error::Domain("simulation needs at least one trajectory".into()));
    }
    let truncation = config.resolved_truncation();
    if pair.size() < truncation {
        return Err(Error::Sizing(format!(
            "simulation truncation {truncation} exceeds the pair's {} states",
            pair.size()
        )));
    }
    if config.start_state >= truncation {
        return Err(Error::Domain(format!(
            "start state {} outside the truncation {truncation}",
            config.start_state
        )));
    }
    let matrix = match config.side {
        ChainSide::Hat => &pair.hat_h,
        ChainSide::Check => &pair.check_h,
    };
    // Per-row sampling tables: band start, cumulative probabilities, and
    // whether the leftover tail is a genuine escape.
    struct RowTable {
        start: usize,
        cumulative: Vec<f64>,
        escapes: bool,
        complete: bool,
    }
    let tables: Vec<RowTable> = (0..truncation)
        .map(|i| {
            let row = matrix.row(i);
            let mut acc = 0.0;
            let cumulative: Vec<f64> = row
                .entries
                .iter()
                .map(|e| {
                    acc += e.to_f64();
                    acc
                })
                .collect();
            RowTable {
                start: row.start,
                cumulative,
                escapes: acc < 1.0 - ESCAPE_DEFECT_TOL,
                complete: row.complete,
            }
        })
        .collect();

    let mut visit_counts = vec![vec![0u64; truncation]; config.steps + 1];
    let mut escaped = vec![0u64; config.steps + 1];
    let mut returns = 0u64;

    for trajectory in 0..config.trajectories {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trajectory);
        let mut state = config.start_state;
        let mut out = false;
        let mut returned = false;
        visit_counts[0][state] += 1;
        for step in 1..=config.steps {
            if !out {
                let table = &tables[state];
                if !table.complete {
                    return Err(Error::Internal(format!(
                        "trajectory {trajectory} reached incomplete row {state} at step {step}; \
                         truncation {truncation} is too shallow for this walk"
                    )));
                }
                let u = (rng.next_u64() >> 11) as f64 * 2f64.powi(-53);
                match table.cumulative.iter().position(|c| u < *c) {
                    Some(idx) => state = table.start + idx,
                    // Past every outcome: genuine defect escapes, rounding
                    // residue folds into the last outcome.
                    None if table.escapes => out = true,
                    None => state = table.start + table.cumulative.len() - 1,
                }
            }
            if out {
                escaped[step] += 1;
            } else {
                visit_counts[step][state] += 1;
                if state == config.start_state && !returned {
                    returned = true;
                    returns += 1;
                }
            }
        }
    }

    let t = config.trajectories as f64;
    let rstep_estimates = (0..truncation)
        .map(|s| {
            let p = visit_counts[config.steps][s] as f64 / t;
            RStepEstimate { state: s, probability: p, std_error: (p * (1.0 - p) / t).sqrt() }
        })
        .collect();
    Ok(SimReport {
        config: *config,
        prng: "chacha8 (rand_chacha 0.3); stream = trajectory index; u = (next_u64 >> 11)·2⁻⁵³"
            .into(),
        visit_counts,
        escaped,
        rstep_estimates,
        return_frequency: returns as f64 / t,
    })
}

/// One state's empirical-vs-exact comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CellComparison {
    pub state: usize,
    pub empirical: f64,
    pub exact: f64,
    /// `(p̂ − p)/√(p(1−p)/T)`; 0 when the exact probability is degenerate
    /// and matched, `±∞` when degenerate and missed.
    pub z: f64,
    pub flagged: bool,
}

/// z-score sheet for a simulated distribution against exact probabilities.
#[derive(Debug, Clone, Serialize)]
pub struct KmgComparison {
    pub cells: Vec<CellComparison>,
    pub worst_abs_z: f64,
    pub any_flagged: bool,
}

/// Threshold above which a z-score is flagged as inconsistent with the
/// exact probability.
pub const Z_FLAG: f64 = 4.0;

/// Compares the report's final-time estimates against exact `steps`-step
/// probabilities supplied per state (from the spectral or matrix-power
/// route).
pub fn empirical_vs_kmg(report: &SimReport, exact: &[(usize, f64)]) -> KmgComparison {
    let t = report.config.trajectories as f64;
    let mut cells = Vec::with_capacity(exact.len());
    let mut worst = 0.0f64;
    for &(state, p) in exact {
        let empirical = report
            .rstep_estimates
            .iter()
            .find(|e| e.state == state)
            .map_or(0.0, |e| e.probability);
        let variance = p * (1.0 - p) / t;
        let z = if variance > 0.0 {
            (empirical - p) / variance.sqrt()
        } else if empirical == p {
            0.0
        } else {
            f64::INFINITY * (empirical - p).signum()
        };
        worst = worst.max(z.abs());
        cells.push(CellComparison { state, empirical, exact: p, z, flagged: z.abs() > Z_FLAG });
    }
    let any_flagged = cells.iter().any(|c| c.flagged);
    KmgComparison { cells, worst_abs_z: worst, any_flagged }
}
