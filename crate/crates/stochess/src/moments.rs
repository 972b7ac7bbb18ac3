//! Truncated moment matrices.
//!
//! The two-weight families use the interleaved layout: row `j` addresses
//! the monomial `x^j`, column `k` addresses `x^{⌊k/2⌋} · w_{1+(k mod 2)}`,
//! so even columns carry `w₁` moments and odd columns `w₂` moments. The
//! matrix is stored divided by its raw `(0,0)` entry, which keeps entries
//! `O(1)` and leaves the derived operator untouched (the extraction is a
//! similarity, invariant under this diagonal rescale).
//!
//! Jacobi–Piñeiro matrices are exact: every entry is a rational multiple of
//! `1` (even columns) or of one shared transcendental unit
//! `u = B(α₂+1, α₀+1)/B(α₁+1, α₀+1)` (odd columns); the stored value is the
//! rational coefficient, and the unit rides along as bookkeeping. The
//! hypergeometric family gets both a numeric builder (term-by-term Beta
//! series with a certified tail) and an exact builder (each moment of
//! `ω(a, b; c, d)` collapses to the Pochhammer ratio
//! `(a)_P (b)_P / ((c)_P (d)_P)` by Gauss summation of the Beta series).

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, PrecisionScalar, Scalar, MIN_DIGITS};
use crate::special::{
    beta_mp, beta_ratio, beta_ratio_prefix, log_gamma, pochhammer, sum_ratio_series,
};
use crate::weights::{HypergeometricParams, JacobiPineiroParams, WeightChannel};

/// Decimal digits carried by the numeric value of the odd-column unit.
const UNIT_DIGITS: u32 = 60;

/// How entries were computed and what accuracy they claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    Exact,
    Numeric { digits: u32 },
}

/// Column addressing convention of a moment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentLayout {
    /// Two interleaved weights: column `k` pairs power `⌊k/2⌋` with weight
    /// channel `1 + (k mod 2)`.
    Interleaved { size: usize },
    /// One weight, Hankel layout: column `k` is plain power `k`.
    SingleWeight { size: usize },
}

impl MomentLayout {
    pub fn size(&self) -> usize {
        match self {
            MomentLayout::Interleaved { size } | MomentLayout::SingleWeight { size } => *size,
        }
    }

    /// Monomial power contributed by column `k`.
    pub fn column_power(&self, k: usize) -> usize {
        match self {
            MomentLayout::Interleaved { .. } => k / 2,
            MomentLayout::SingleWeight { .. } => k,
        }
    }

    /// Weight channel addressed by column `k`.
    pub fn weight_channel(&self, k: usize) -> WeightChannel {
        match self {
            MomentLayout::Interleaved { .. } => {
                if k % 2 == 0 {
                    WeightChannel::One
                } else {
                    WeightChannel::Two
                }
            }
            MomentLayout::SingleWeight { .. } => WeightChannel::One,
        }
    }
}

/// The shared transcendental factor carried by odd columns of an exact
/// Jacobi–Piñeiro matrix.
#[derive(Debug, Clone)]
pub struct OddColumnUnit {
    pub description: String,
    pub value: PrecisionScalar,
}

/// Truncated moment matrix of a weight system.
#[derive(Debug, Clone)]
pub struct MomentMatrix<S: Scalar> {
    entries: Vec<Vec<S>>,
    pub layout: MomentLayout,
    pub mode: MomentMode,
    /// Human-readable description of the factor divided out of every entry.
    pub normalization: String,
    /// Present when odd-column entries are rational coefficients of a
    /// transcendental unit rather than plain values.
    pub odd_unit: Option<OddColumnUnit>,
}

impl<S: Scalar> MomentMatrix<S> {
    pub fn size(&self) -> usize {
        self.layout.size()
    }

    pub fn entry(&self, j: usize, k: usize) -> &S {
        &self.entries[j][k]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.entries
    }

    /// Wraps externally assembled rows (ingested JSON, test fixtures,
    /// unstripped numeric matrices) after checking they form a square matrix
    /// of the layout's size.
    pub fn from_rows(
        entries: Vec<Vec<S>>,
        layout: MomentLayout,
        mode: MomentMode,
        normalization: impl Into<String>,
    ) -> Result<Self> {
        let n = layout.size();
        require_size(n)?;
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::Sizing(format!(
                "expected a square {n}×{n} entry array matching the layout"
            )));
        }
        Ok(MomentMatrix { entries, layout, mode, normalization: normalization.into(), odd_unit: None })
    }

    /// Attaches the shared odd-column transcendental factor (see
    /// [`OddColumnUnit`]).
    pub fn with_odd_unit(mut self, unit: OddColumnUnit) -> Self {
        self.odd_unit = Some(unit);
        self
    }
}

fn require_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Sizing(format!(
            "moment matrices need size ≥ 2 to seed the factorization, got {n}"
        )));
    }
    Ok(())
}

/// Exact interleaved moment matrix of a Jacobi–Piñeiro pair.
///
/// After normalizing by the raw first moment `B(α₁+1, α₀+1)`, entry `(j,k)`
/// is `beta_ratio(j+⌊k/2⌋, α_{w(k)}, α₀)`, exactly rational, with odd
/// columns additionally carrying the unit `u` recorded in `odd_unit`.
pub fn build_jp_moments(
    params: &JacobiPineiroParams,
    n: usize,
) -> Result<MomentMatrix<ExactScalar>> {
    require_size(n)?;
    // Entry (j,k) only depends on j + ⌊k/2⌋ and the channel parity, so two
    // telescoped prefixes cover the whole matrix.
    let reach = (n - 1) + (n - 1) / 2 + 1;
    let even = beta_ratio_prefix(reach, &params.alpha1, &params.alpha0)?;
    let odd = beta_ratio_prefix(reach, &params.alpha2, &params.alpha0)?;
    let mut entries = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let channel = if k % 2 == 0 { &even } else { &odd };
            row.push(channel[j + k / 2].clone());
        }
        entries.push(row);
    }
    Ok(MomentMatrix {
        entries,
        layout: MomentLayout::Interleaved { size: n },
        mode: MomentMode::Exact,
        normalization: format!(
            "divided by the raw (0,0) entry B({}+1, {}+1)",
            params.alpha1, params.alpha0
        ),
        // The unit's precision scales with the truncation: realizing a type I
        // value at index n cancels ~1.5n digits against τ = ρ/u.
        odd_unit: Some(jp_odd_column_unit(params, UNIT_DIGITS.max(2 * n as u32 + 40))?),
    })
}

/// The transcendental factor stripped from odd columns of an exact
/// Jacobi–Piñeiro matrix, `u = B(α₂+1, α₀+1)/B(α₁+1, α₀+1)`, evaluated via
/// log-Gamma at the requested digits. Escalation ladders recompute it at
/// working precision instead of reusing the default-tagged value, since a
/// type I realization at index `n` burns roughly `1.5n` digits of `τ = ρ/u`
/// in cancellation.
pub fn jp_odd_column_unit(params: &JacobiPineiroParams, digits: u32) -> Result<OddColumnUnit> {
    let digits = digits.max(MIN_DIGITS);
    let one = ExactScalar::one_v();
    let lb = |a: &ExactScalar| -> Result<PrecisionScalar> {
        let ap1 = PrecisionScalar::from_exact_digits(&(a + &one), digits);
        let a0p1 = PrecisionScalar::from_exact_digits(&(&params.alpha0 + &one), digits);
        Ok(log_gamma(&ap1)?
            .add(&log_gamma(&a0p1)?)
            .sub(&log_gamma(&ap1.add(&a0p1))?))
    };
    Ok(OddColumnUnit {
        description: format!(
            "u = B({a2}+1, {a0}+1)/B({a1}+1, {a0}+1)",
            a1 = params.alpha1,
            a2 = params.alpha2,
            a0 = params.alpha0
        ),
        value: lb(&params.alpha2)?.sub(&lb(&params.alpha1)?).exp(),
    })
}

/// One raw moment `∫ x^p ω dx` of the hypergeometric weight by term-by-term
/// integration of its defining series:
/// `N' · Σ_m [(c'-b')_m (d'-b')_m / ((δ)_m m!)] · B(a'+p, δ+m)`,
/// summed with a certified tail bound (the term ratio has the rational
/// four-parameter shape with `σ∞ = 1 + p + b' > 1`, so the `z = 1` Raabe
/// bound applies).
pub fn ll_moment_series(
    params: &HypergeometricParams,
    shifted: bool,
    power: usize,
    digits: u32,
) -> Result<PrecisionScalar> {
    let digits = digits.max(1);
    // Operands carry guard precision; the certified tolerance is set by the
    // *requested* digits. The tail decays like m^{-(power+b')}, so each extra
    // digit multiplies the term count — the budget, not the arithmetic,
    // limits what this route can certify.
    let d = digits.max(MIN_DIGITS) + 10;
    let (pa, pb, pc, pd) = params.channel_tuple(shifted);
    let delta = &params.delta;
    let mp = |v: &ExactScalar| PrecisionScalar::from_exact_digits(v, d);
    let p_e = ExactScalar::int(power as i64);

    let t0 = beta_mp(&mp(&(&pa + &p_e)), &mp(delta))?;
    let u1 = mp(&(&pc - &pb));
    let u2 = mp(&(&pd - &pb));
    let v1 = PrecisionScalar::from_i64_digits(1, d);
    let v2 = mp(&(&(&pa + &p_e) + delta));
    let z = PrecisionScalar::from_i64_digits(1, d);
    let sum = sum_ratio_series(&t0, &u1, &u2, &v1, &v2, &z, 10f64.powi(-(digits as i32)))?;

    let lg = |v: &ExactScalar| log_gamma(&mp(v));
    let log_norm = lg(&pc)?
        .add(&lg(&pd)?)
        .sub(&lg(&pa)?)
        .sub(&lg(&pb)?)
        .sub(&lg(delta)?);
    Ok(log_norm.exp().mul(&sum.value))
}

/// Numeric interleaved moment matrix of a hypergeometric pair, to the given
/// digit budget, normalized by its raw `(0,0)` entry (which is 1 up to the
/// achieved accuracy: each `ω` is a probability density).
pub fn build_ll_moments(
    params: &HypergeometricParams,
    n: usize,
    digits: u32,
) -> Result<MomentMatrix<PrecisionScalar>> {
    require_size(n)?;
    let digits = digits.max(1);
    let max_power = (n - 1) + (n - 1) / 2;
    let mut moments = [Vec::with_capacity(max_power + 1), Vec::with_capacity(max_power + 1)];
    for (slot, shifted) in [(0usize, false), (1usize, true)] {
        for p in 0..=max_power {
            moments[slot].push(ll_moment_series(params, shifted, p, digits)?);
        }
    }
    let g00 = moments[0][0].clone();
    if g00.to_f64() <= 0.0 {
        return Err(Error::Positivity("raw (0,0) moment must be positive".into()));
    }
    let mut entries = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let value = moments[k % 2][j + k / 2].div(&g00);
            row.push(PrecisionScalar::from_rug(value.rug().clone(), digits.max(MIN_DIGITS)));
        }
        entries.push(row);
    }
    Ok(MomentMatrix {
        entries,
        layout: MomentLayout::Interleaved { size: n },
        mode: MomentMode::Numeric { digits },
        normalization: "divided by the raw (0,0) entry (≈ 1: ω is a probability density)".into(),
        odd_unit: None,
    })
}

/// Exact interleaved moment matrix of a hypergeometric pair.
///
/// Integrating the Beta series term-by-term and applying Gauss's `₂F₁(…; 1)`
/// summation collapses each raw moment to
/// `∫ x^P ω(a', b'; c', d') dx = (a')_P (b')_P / ((c')_P (d')_P)`,
/// a plain rational; no transcendental unit is needed for this family.
pub fn build_ll_moments_exact(
    params: &HypergeometricParams,
    n: usize,
) -> Result<MomentMatrix<ExactScalar>> {
    require_size(n)?;
    let moment = |shifted: bool, p: usize| -> ExactScalar {
        let (pa, pb, pc, pd) = params.channel_tuple(shifted);
        let k = p as u64;
        let num = &pochhammer(&pa, k) * &pochhammer(&pb, k);
        let den = &pochhammer(&pc, k) * &pochhammer(&pd, k);
        &num / &den
    };
    let mut entries = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            row.push(moment(k % 2 == 1, j + k / 2));
        }
        entries.push(row);
    }
    Ok(MomentMatrix {
        entries,
        layout: MomentLayout::Interleaved { size: n },
        mode: MomentMode::Exact,
        normalization: "raw (0,0) entry is exactly 1 (ω is a probability density)".into(),
        odd_unit: None,
    })
}

/// Classical single-weight measures, normalized to unit mass on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalMeasure {
    /// Chebyshev (first kind) on `[-1, 1]`, i.e. the arcsine law; carried
    /// internally on `[0, 1]` through `x' = 2x - 1` (recorded in the
    /// matrix's normalization note).
    Chebyshev,
    /// `x^q (1-x)^p` on `[0, 1]`, unit-normalized.
    Jacobi { p: ExactScalar, q: ExactScalar },
}

/// Moment of the symmetric `[-1, 1]` Chebyshev measure: 0 for odd `k`,
/// `C(k, k/2)/2^k` for even `k` (the same value chain as the `[0, 1]`
/// arcsine moments, reached via `beta_ratio` at half the index).
pub fn chebyshev_moment_symmetric(k: usize) -> ExactScalar {
    if k % 2 == 1 {
        return ExactScalar::zero_v();
    }
    let half = ExactScalar::ratio(-1, 2);
    beta_ratio((k / 2) as u64, &half, &half).expect("exponents -1/2 are admissible")
}

/// Hankel moment matrix `(j,k) ↦ m_{j+k}` of a classical measure on the
/// internal `[0, 1]` support, unit-normalized (so the `(0,0)` entry is 1).
pub fn build_classical_moments(
    measure: &ClassicalMeasure,
    n: usize,
) -> Result<MomentMatrix<ExactScalar>> {
    require_size(n)?;
    let (p, q, note) = match measure {
        ClassicalMeasure::Chebyshev => (
            ExactScalar::ratio(-1, 2),
            ExactScalar::ratio(-1, 2),
            "unit mass; Chebyshev support [-1,1] mapped by x' = 2x - 1".to_string(),
        ),
        ClassicalMeasure::Jacobi { p, q } => (
            p.clone(),
            q.clone(),
            format!("unit mass (divided by B({q}+1, {p}+1))"),
        ),
    };
    let cache = beta_ratio_prefix(2 * n - 1, &q, &p)?;
    let entries: Vec<Vec<ExactScalar>> =
        (0..n).map(|j| (0..n).map(|k| cache[j + k].clone()).collect()).collect();
    Ok(MomentMatrix {
        entries,
        layout: MomentLayout::SingleWeight { size: n },
        mode: MomentMode::Exact,
        normalization: note,
        odd_unit: None,
    })
}
