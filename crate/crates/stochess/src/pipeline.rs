//! Deep-truncation numeric builds.
//!
//! Gaussian elimination on these moment matrices sheds roughly 1.7 decimal
//! digits of accuracy per row (they are Hilbert-matrix-like in conditioning),
//! so a truncation of several hundred states needs working precision in the
//! hundreds of digits. The ladder here starts at a predicted precision,
//! certifies the result **against the input moments** (reconstruction
//! defect of the two triangular factors), and escalates until the
//! certification passes or the schedule is exhausted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss_borel::{
    extract_hessenberg_with_band_tol, factorize, BandedHessenberg, GaussBorelFactorization,
};
use crate::moments::{build_jp_moments, MomentLayout, MomentMatrix, MomentMode};
use crate::scalar::{ExactScalar, PrecisionScalar, Scalar};
use crate::stochastic::{make_stochastic_pair, StochasticPair, TransposedLimitReport};
use crate::weights::JacobiPineiroParams;

/// Observed elimination loss per row, with headroom. The measured rate for
/// the interleaved moment matrices is ≈ 1.68 digits/row.
const LOSS_DIGITS_PER_ROW: f64 = 1.8;
const GUARD_DIGITS: u32 = 80;

/// Working precision predicted to survive elimination at this truncation.
pub fn predicted_digits(truncation: usize) -> u32 {
    let need = (LOSS_DIGITS_PER_ROW * truncation as f64).ceil() as u32 + GUARD_DIGITS;
    need.next_multiple_of(64).max(64)
}

/// One attempted precision level.
#[derive(Debug, Clone, Serialize)]
pub struct EscalationRung {
    pub digits: u32,
    pub outcome: RungOutcome,
}

#[derive(Debug, Clone, Serialize)]
pub enum RungOutcome {
    /// The factorization, band extraction, or moment-reconstruction check
    /// failed at this precision.
    TooCoarse { error: String },
    /// All checks passed; the worst `|S·g·S̃ᵀ − H̃|` entry is recorded.
    Certified { reconstruction_defect: f64 },
}

/// A certified deep numeric factorization.
#[derive(Debug)]
pub struct DeepBuild {
    pub factorization: GaussBorelFactorization<PrecisionScalar>,
    pub hessenberg: BandedHessenberg<PrecisionScalar>,
    pub digits: u32,
    pub ladder: Vec<EscalationRung>,
}

fn default_schedule(truncation: usize) -> Vec<u32> {
    let p = predicted_digits(truncation);
    let mut schedule = vec![p, (p + p / 4).next_multiple_of(64), (p + p / 2).next_multiple_of(64), 2 * p];
    schedule.dedup();
    schedule
}

/// Deep numeric factorization of a Jacobi–Piñeiro system on the default
/// precision schedule (predicted precision, then three escalations).
pub fn escalated_jp_build(
    params: &JacobiPineiroParams,
    size: usize,
    band_tol: f64,
) -> Result<DeepBuild> {
    escalated_jp_build_with_schedule(params, size, band_tol, &default_schedule(size - 1))
}

/// Like [`escalated_jp_build`] with an explicit precision schedule.
///
/// Each rung is accepted only if (1) elimination completes, (2) every
/// off-band entry of the conjugated product is below `band_tol`, and (3)
/// the reconstruction defect `max |S·g·S̃ᵀ − H̃|` against the *input*
/// moment matrix is below `band_tol` — the one check that is independent
/// of the factors themselves.
pub fn escalated_jp_build_with_schedule(
    params: &JacobiPineiroParams,
    size: usize,
    band_tol: f64,
    schedule: &[u32],
) -> Result<DeepBuild> {
    if schedule.is_empty() {
        return Err(Error::Domain("escalation schedule must name at least one precision".into()));
    }
    if !(band_tol > 0.0) {
        return Err(Error::Domain(format!("band tolerance must be positive, got {band_tol}")));
    }
    let g_exact = build_jp_moments(params, size)?;
    let mut ladder = Vec::with_capacity(schedule.len());
    let mut last_failure = String::new();
    for &digits in schedule {
        match attempt_rung(&g_exact, size, digits, band_tol) {
            Ok((f, h, defect)) => {
                ladder.push(EscalationRung {
                    digits,
                    outcome: RungOutcome::Certified { reconstruction_defect: defect },
                });
                return Ok(DeepBuild { factorization: f, hessenberg: h, digits, ladder });
            }
            Err(e) => {
                last_failure = e.to_string();
                ladder.push(EscalationRung {
                    digits,
                    outcome: RungOutcome::TooCoarse { error: last_failure.clone() },
                });
            }
        }
    }
    Err(Error::numeric(
        format!(
            "no precision up to {} digits certified the size-{size} factorization \
             to {band_tol} (last failure: {last_failure})",
            schedule.last().unwrap()
        ),
        0,
        None,
    ))
}

fn attempt_rung(
    g_exact: &MomentMatrix<ExactScalar>,
    size: usize,
    digits: u32,
    band_tol: f64,
) -> Result<(GaussBorelFactorization<PrecisionScalar>, BandedHessenberg<PrecisionScalar>, f64)> {
    let rows: Vec<Vec<PrecisionScalar>> = g_exact
        .rows()
        .iter()
        .map(|r| r.iter().map(|v| v.to_precision(digits)).collect())
        .collect();
    let mut gp = MomentMatrix::from_rows(
        rows,
        MomentLayout::Interleaved { size },
        MomentMode::Numeric { digits },
        g_exact.normalization.clone(),
    )?;
    if let Some(unit) = &g_exact.odd_unit {
        gp = gp.with_odd_unit(unit.clone());
    }
    let f = factorize(&gp)?;
    let h = extract_hessenberg_with_band_tol(&f, Some(band_tol))?;
    let defect = f.reconstruction_defect(&gp)?.to_f64().abs();
    if !(defect <= band_tol) {
        return Err(Error::numeric(
            format!("moment reconstruction defect {defect} exceeds {band_tol}"),
            (-defect.log10()).max(0.0) as u32,
            Some(defect),
        ));
    }
    Ok((f, h, defect))
}

/// Band limits, value-sequence ratios, and the transposed-limit profile of
/// a deep Jacobi–Piñeiro build, probed near the truncation edge.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub truncation: usize,
    /// Row the band/ratio probes are taken at (`truncation − 10`).
    pub probe_index: usize,
    pub digits: u32,
    pub ladder: Vec<EscalationRung>,
    /// `|a_probe − κ³|` with `κ = 4/27`.
    pub a_deviation: f64,
    /// `|b_probe − 3κ²|`.
    pub b_deviation: f64,
    /// `|c_probe − 3κ|`.
    pub c_deviation: f64,
    pub q_ratio: f64,
    /// `|q_{probe+1}/q_probe − 27/8|`.
    pub q_ratio_deviation: f64,
    pub b1_ratio: f64,
    /// `|B_{probe+1}(1)/B_probe(1) − 8/27|`.
    pub b1_ratio_deviation: f64,
    pub transposed: TransposedLimitReport,
}

/// Builds a deep truncation and reads off the asymptotic diagnostics: the
/// three lower bands against the universal limits `(κ³, 3κ², 3κ)`, the
/// type I/II value ratios against `27/8` and `8/27`, and the decay of the
/// discrepancy between `Ȟ` and `Ĥᵀ` along the truncation.
pub fn jp_asymptotics(
    params: &JacobiPineiroParams,
    truncation: usize,
    band_tol: f64,
    window: usize,
) -> Result<AsymptoticsReport> {
    if truncation < 30 {
        return Err(Error::Sizing(format!(
            "asymptotic probes at truncation − 10 need at least 30 states, got {truncation}"
        )));
    }
    let build = escalated_jp_build(params, truncation + 1, band_tol)?;
    jp_asymptotics_from_build(&build, truncation, window)
}

/// Probes an already-certified deep build, so callers that also need the
/// factorization itself pay for elimination once.
pub fn jp_asymptotics_from_build(
    build: &DeepBuild,
    truncation: usize,
    window: usize,
) -> Result<AsymptoticsReport> {
    if truncation < 30 {
        return Err(Error::Sizing(format!(
            "asymptotic probes at truncation − 10 need at least 30 states, got {truncation}"
        )));
    }
    if build.hessenberg.c.len() < truncation {
        return Err(Error::Sizing(format!(
            "build carries {} band rows, fewer than the probed truncation {truncation}",
            build.hessenberg.c.len()
        )));
    }
    let h = &build.hessenberg;
    let f = &build.factorization;
    let probe = truncation - 10;

    let kappa: f64 = 4.0 / 27.0;
    let a_deviation = (h.a[probe].to_f64() - kappa.powi(3)).abs();
    let b_deviation = (h.b[probe].to_f64() - 3.0 * kappa.powi(2)).abs();
    let c_deviation = (h.c[probe].to_f64() - 3.0 * kappa).abs();

    let b1 = f.b_at_1();
    let b1_ratio = b1[probe + 1].to_f64() / b1[probe].to_f64();
    let q = f.normalized_type_i_at_1(&ExactScalar::one_v())?.realize(build.digits);
    let q_ratio = q[probe + 1].to_f64() / q[probe].to_f64();

    let pair = make_stochastic_pair(h, &b1, &q)?;
    let transposed = pair.verify_transposed_limit(window)?;

    Ok(AsymptoticsReport {
        truncation,
        probe_index: probe,
        digits: build.digits,
        ladder: build.ladder.clone(),
        a_deviation,
        b_deviation,
        c_deviation,
        q_ratio,
        q_ratio_deviation: (q_ratio - 27.0 / 8.0).abs(),
        b1_ratio,
        b1_ratio_deviation: (b1_ratio - 8.0 / 27.0).abs(),
        transposed,
    })
}

/// The certified stochastic pair of a deep build (true value sequences).
pub fn deep_pair(build: &DeepBuild) -> Result<StochasticPair<PrecisionScalar>> {
    let q = build
        .factorization
        .normalized_type_i_at_1(&ExactScalar::one_v())?
        .realize(build.digits);
    make_stochastic_pair(&build.hessenberg, &build.factorization.b_at_1(), &q)
}
