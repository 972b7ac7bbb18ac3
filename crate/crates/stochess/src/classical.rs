//! The tridiagonal baseline: stochastic Jacobi chains, their orthogonal
//! polynomial sequences, and the spectral (Stieltjes) series.
//!
//! A chain here is a row-stochastic tridiagonal matrix with down/stay/up
//! bands `p_n, q_n, r_n`. Its polynomial sequence `P_n` (three-term
//! recurrence, `P_n(1) = 1` by stochasticity) carries the spectral measure:
//! return probabilities to state 0 are the measure's moments, the resolvent
//! at the base state is the Stieltjes transform, and ratios of associated
//! to ordinary polynomials converge to it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss_borel::{extract_hessenberg, factorize};
use crate::moments::{build_classical_moments, ClassicalMeasure};
use crate::quadrature::gauss_jacobi;
use crate::scalar::{ExactScalar, PrecisionScalar, Scalar};

/// A row-stochastic tridiagonal transition matrix: from state `n` the walk
/// moves down with `p[n]`, stays with `q[n]`, moves up with `r[n]`
/// (`p[0]` is structurally zero).
#[derive(Debug, Clone)]
pub struct TridiagonalChain {
    pub p: Vec<ExactScalar>,
    pub q: Vec<ExactScalar>,
    pub r: Vec<ExactScalar>,
    /// The coordinate functional the spectral series is taken against
    /// (`ℓ₀` — always state 0 for the constructions here).
    pub base_state: usize,
}

impl TridiagonalChain {
    /// Validates the stochasticity conditions: `q₀ + r₀ = 1`,
    /// `p_n + q_n + r_n = 1` for `n ≥ 1`, with `p_n, r_n > 0`, `q_n ≥ 0`.
    /// The last state's row is the truncation edge and is exempt from the
    /// sum condition (its up-probability leaves the truncation).
    pub fn new(p: Vec<ExactScalar>, q: Vec<ExactScalar>, r: Vec<ExactScalar>) -> Result<Self> {
        let n = q.len();
        if p.len() != n || r.len() != n || n < 2 {
            return Err(Error::Sizing(format!(
                "chain bands must share a length of at least 2 (p {}, q {}, r {})",
                p.len(),
                n,
                r.len()
            )));
        }
        if !p[0].is_zero() {
            return Err(Error::Structure(format!(
                "p[0] = {} but state 0 has no down-neighbour",
                p[0]
            )));
        }
        for i in 0..n {
            if q[i].is_negative() {
                return Err(Error::Positivity(format!("q[{i}] = {} < 0", q[i])));
            }
            if !r[i].is_positive() {
                return Err(Error::Positivity(format!("r[{i}] = {} must be > 0", r[i])));
            }
            if i >= 1 && !p[i].is_positive() {
                return Err(Error::Positivity(format!("p[{i}] = {} must be > 0", p[i])));
            }
            let sum = &(&p[i] + &q[i]) + &r[i];
            if i + 1 < n && sum != ExactScalar::one_v() {
                return Err(Error::Consistency(format!(
                    "row {i} sums to {sum}, not 1"
                )));
            }
        }
        Ok(TridiagonalChain { p, q, r, base_state: 0 })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Matrix entry `(i, j)` inside the truncation.
    pub fn entry(&self, i: usize, j: usize) -> ExactScalar {
        if i >= self.len() || j >= self.len() {
            return ExactScalar::zero_v();
        }
        if j + 1 == i {
            self.p[i].clone()
        } else if j == i {
            self.q[i].clone()
        } else if j == i + 1 {
            self.r[i].clone()
        } else {
            ExactScalar::zero_v()
        }
    }
}

/// The Chebyshev walk: reflect at 0, otherwise step up or down with 1/2.
/// Its polynomial sequence is `T_n(x) = cos(n·arccos x)` on `[-1, 1]`.
pub fn chebyshev_chain(states: usize) -> TridiagonalChain {
    let half = ExactScalar::ratio(1, 2);
    let mut p = vec![ExactScalar::zero_v()];
    let mut q = vec![ExactScalar::zero_v()];
    let mut r = vec![ExactScalar::one_v()];
    for _ in 1..states.max(2) {
        p.push(half.clone());
        q.push(ExactScalar::zero_v());
        r.push(half.clone());
    }
    TridiagonalChain { p, q, r, base_state: 0 }
}

/// Derives the stochastic chain of a classical measure from its moment
/// factorization: the monic tridiagonal bands conjugated by
/// `diag(π_n(1))` give `r_n = π_{n+1}(1)/π_n(1)`, `q_n = c_n`,
/// `p_n = b_n·π_{n−1}(1)/π_n(1)`, which sum to one exactly by the
/// recurrence at the support endpoint. The Chebyshev arm short-circuits to
/// [`chebyshev_chain`] (its `[-1, 1]` coordinates are the user-facing
/// convention; derived Jacobi chains live on `[0, 1]`).
pub fn chain_from_measure(measure: &ClassicalMeasure, states: usize) -> Result<TridiagonalChain> {
    if matches!(measure, ClassicalMeasure::Chebyshev) {
        return Ok(chebyshev_chain(states));
    }
    let g = build_classical_moments(measure, states + 2)?;
    let f = factorize(&g)?;
    let h = extract_hessenberg(&f)?;
    let v = f.b_at_1();
    let n = states.min(h.truncation_size).min(v.len().saturating_sub(1));
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        if !v[i].is_positive() || !v[i + 1].is_positive() {
            return Err(Error::Positivity(format!(
                "π_{i}(1) = {} must be positive to normalize the chain",
                v[i]
            )));
        }
        p.push(if i == 0 { ExactScalar::zero_v() } else { &h.b[i] * &(&v[i - 1] / &v[i]) });
        q.push(h.c[i].clone());
        r.push(&v[i + 1] / &v[i]);
    }
    TridiagonalChain::new(p, q, r)
}

/// Values `P_0(x), …, P_{count−1}(x)` by the forward three-term recurrence
/// `x·P_n = r_n·P_{n+1} + q_n·P_n + p_n·P_{n−1}`, `P_{−1} = 0`, `P_0 = 1`.
pub fn op_sequence<S: Scalar>(chain: &TridiagonalChain, count: usize, x: &S) -> Result<Vec<S>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > chain.len() {
        return Err(Error::Sizing(format!(
            "recurrence through P_{} needs {} coefficient rows, chain has {}",
            count - 1,
            count,
            chain.len()
        )));
    }
    let one = x.one();
    let mut values = vec![one.clone()];
    let mut prev = x.zero();
    for n in 0..count - 1 {
        let cur = values[n].clone();
        let pn = x.from_exact(&chain.p[n]);
        let qn = x.from_exact(&chain.q[n]);
        let rn = x.from_exact(&chain.r[n]);
        let next = x.mul(&cur).sub(&qn.mul(&cur)).sub(&pn.mul(&prev)).div(&rn);
        values.push(next);
        prev = cur;
    }
    Ok(values)
}

/// Entry `(n, m)` of the `k`-th power of the chain, exact: bandedness keeps
/// all mass strictly inside the truncation when the sizing precondition
/// holds, so the truncated power equals the semi-infinite one.
pub fn chain_power_entry(
    chain: &TridiagonalChain,
    n: usize,
    m: usize,
    k: usize,
) -> Result<ExactScalar> {
    let needed = (n + k).max(m) + 1;
    if chain.len() < needed {
        return Err(Error::Sizing(format!(
            "power P^{k} from state {n} reaches state {}; chain of {} states would \
             truncate probability mass (need {needed})",
            n + k,
            chain.len()
        )));
    }
    let mut dist = vec![ExactScalar::zero_v(); chain.len()];
    dist[n] = ExactScalar::one_v();
    for _ in 0..k {
        let mut next = vec![ExactScalar::zero_v(); chain.len()];
        for (i, mass) in dist.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            if i >= 1 {
                next[i - 1] = &next[i - 1] + &(mass * &chain.p[i]);
            }
            next[i] = &next[i] + &(mass * &chain.q[i]);
            if i + 1 < chain.len() {
                next[i + 1] = &next[i + 1] + &(mass * &chain.r[i]);
            }
        }
        dist = next;
    }
    Ok(dist[m].clone())
}

/// Moments of the spectral measure read off the walk itself:
/// `w_n = ℓ₀ᵀ Pⁿ ℓ₀` is the probability of being back at the base state
/// after `n` steps.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSeries {
    pub coefficients: Vec<ExactScalar>,
    /// The series `S(z) = Σ w_n/z^{n+1}` converges for `|z| > 1`.
    pub evaluation_radius_note: String,
}

/// Computes `w_0, …, w_{terms−1}` exactly, validating `w₀ = 1` and
/// `0 ≤ w_n ≤ 1`.
pub fn spectral_series(chain: &TridiagonalChain, terms: usize) -> Result<SpectralSeries> {
    if terms == 0 {
        return Err(Error::DegenerateQuery("spectral series needs at least one term".into()));
    }
    let base = chain.base_state;
    if chain.len() < base + terms {
        return Err(Error::Sizing(format!(
            "{terms} return probabilities from state {base} need at least {} states, \
             chain has {}",
            base + terms,
            chain.len()
        )));
    }
    let mut coefficients = Vec::with_capacity(terms);
    for n in 0..terms {
        let w = chain_power_entry(chain, base, base, n)?;
        if w.is_negative() || w > ExactScalar::one_v() {
            return Err(Error::Consistency(format!(
                "return probability w_{n} = {w} escapes [0, 1]"
            )));
        }
        coefficients.push(w);
    }
    if coefficients[0] != ExactScalar::one_v() {
        return Err(Error::Consistency("w₀ must be 1".into()));
    }
    Ok(SpectralSeries {
        coefficients,
        evaluation_radius_note: "partial sums of S(z) = Σ w_n z^{-n-1}; valid for |z| > 1".into(),
    })
}

/// A Stieltjes-transform partial sum with its geometric tail bound.
#[derive(Debug, Clone, Serialize)]
pub struct StieltjesValue {
    pub value: PrecisionScalar,
    pub terms: usize,
    /// `Σ_{n≥terms} |z|^{−n−1}` = `|z|^{−terms}/(|z|−1)`, a hard bound on
    /// the dropped tail since every `w_n` is a probability.
    pub remainder_bound: f64,
}

/// Partial sum `Σ_{n<terms} w_n/z^{n+1}` of the spectral series
/// `S(z) = ℓ₀ᵀ(zI − P)⁻¹ℓ₀`.
pub fn stieltjes_series(
    chain: &TridiagonalChain,
    z: &PrecisionScalar,
    terms: usize,
) -> Result<StieltjesValue> {
    let abs_z = z.to_f64().abs();
    if !(abs_z > 1.0) {
        return Err(Error::Domain(format!(
            "Stieltjes series evaluates outside the closed unit disc; |z| = {abs_z}"
        )));
    }
    let series = spectral_series(chain, terms)?;
    let z_inv = z.one().div(z);
    let mut value = z.zero();
    let mut power = z_inv.clone();
    for w in &series.coefficients {
        value = value.add(&power.mul(&z.from_exact(w)));
        power = power.mul(&z_inv);
    }
    let remainder_bound = abs_z.powi(-(terms as i32)) / (abs_z - 1.0);
    Ok(StieltjesValue { value, terms, remainder_bound })
}

/// Values `N_0(z), …, N_{count−1}(z)` of the associated sequence: the same
/// recurrence with inhomogeneous start `N₀ = 0`, `N₁ = 1/r₀`, which makes
/// `N_n(z) = ∫ (P_n(z) − P_n(x))/(z−x) dμ(x)` (each difference quotient
/// satisfies the recurrence, and the `n = 0` orthogonality term `∫P₀ dμ = 1`
/// seeds `N₁`).
pub fn associated_sequence<S: Scalar>(
    chain: &TridiagonalChain,
    count: usize,
    z: &S,
) -> Result<Vec<S>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > chain.len() {
        return Err(Error::Sizing(format!(
            "associated recurrence through N_{} needs {} coefficient rows, chain has {}",
            count - 1,
            count,
            chain.len()
        )));
    }
    let mut values = vec![z.zero()];
    if count == 1 {
        return Ok(values);
    }
    values.push(z.one().div(&z.from_exact(&chain.r[0])));
    let mut prev = values[0].clone();
    for n in 1..count - 1 {
        let cur = values[n].clone();
        let pn = z.from_exact(&chain.p[n]);
        let qn = z.from_exact(&chain.q[n]);
        let rn = z.from_exact(&chain.r[n]);
        let next = z.mul(&cur).sub(&qn.mul(&cur)).sub(&pn.mul(&prev)).div(&rn);
        values.push(next);
        prev = cur;
    }
    Ok(values)
}

/// The convergent `N_n(z)/P_n(z)` of the Stieltjes transform (the
/// associated-to-ordinary polynomial ratio): converges to `S(z)` for
/// `|z| > 1` as `n` grows.
pub fn markov_stieltjes_ratio(
    chain: &TridiagonalChain,
    z: &PrecisionScalar,
    n: usize,
) -> Result<PrecisionScalar> {
    let abs_z = z.to_f64().abs();
    if !(abs_z > 1.0) {
        return Err(Error::Domain(format!(
            "Markov–Stieltjes ratio evaluates outside the closed unit disc; |z| = {abs_z}"
        )));
    }
    let p = op_sequence(chain, n + 1, z)?;
    let a = associated_sequence(chain, n + 1, z)?;
    let denom = &p[n];
    if denom.is_zero() {
        // Zeros of P_n lie in the support interval, so |z| > 1 never lands
        // here; a zero means the chain data is inconsistent.
        return Err(Error::DegenerateQuery(format!(
            "P_{n}(z) vanished at z = {z} outside the support"
        )));
    }
    Ok(a[n].div(denom))
}

/// Quadrature data for a classical measure: rule exponents, unit-interval
/// node map, and the chain in matching coordinates.
pub(crate) struct MeasureFrame {
    pub chain: TridiagonalChain,
    pub p_exp: ExactScalar,
    pub q_exp: ExactScalar,
    /// Maps a `[0, 1]` quadrature node into the chain's coordinates.
    pub to_coords: fn(&PrecisionScalar) -> PrecisionScalar,
}

pub(crate) fn measure_frame(measure: &ClassicalMeasure, states: usize) -> Result<MeasureFrame> {
    let chain = chain_from_measure(measure, states)?;
    Ok(match measure {
        ClassicalMeasure::Chebyshev => MeasureFrame {
            chain,
            p_exp: ExactScalar::ratio(-1, 2),
            q_exp: ExactScalar::ratio(-1, 2),
            to_coords: |t| {
                let two = t.from_i64(2);
                two.mul(t).sub(&t.one())
            },
        },
        ClassicalMeasure::Jacobi { p, q } => MeasureFrame {
            chain,
            p_exp: p.clone(),
            q_exp: q.clone(),
            to_coords: |t| t.clone(),
        },
    })
}

/// `∫ f(x) dμ(x)` over the measure in chain coordinates, with `f` given on
/// quadrature nodes already mapped by the frame.
pub(crate) fn integrate_measure(
    frame: &MeasureFrame,
    nodes: usize,
    digits: u32,
    mut f: impl FnMut(&PrecisionScalar) -> PrecisionScalar,
) -> Result<PrecisionScalar> {
    let rule = gauss_jacobi(nodes, &frame.p_exp, &frame.q_exp, digits)?;
    let mut mass = rule.weights[0].zero();
    for w in &rule.weights {
        mass = mass.add(w);
    }
    let total = rule.integrate(|t| f(&(frame.to_coords)(t)));
    Ok(total.div(&mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    fn mp(v: f64) -> PrecisionScalar {
        PrecisionScalar::from_f64(v, 30)
    }

    #[test]
    fn chebyshev_rows_match_the_reflecting_walk() {
        let t = chebyshev_chain(6);
        let row = |i: usize| (0..6).map(|j| t.entry(i, j)).collect::<Vec<_>>();
        assert_eq!(
            row(0),
            vec![ex("0"), ex("1"), ex("0"), ex("0"), ex("0"), ex("0")]
        );
        assert_eq!(
            row(2),
            vec![ex("0"), ex("1/2"), ex("0"), ex("1/2"), ex("0"), ex("0")]
        );
        for i in 0..5 {
            let sum: ExactScalar = (0..6).fold(ex("0"), |acc, j| &acc + &t.entry(i, j));
            assert_eq!(sum, ExactScalar::one_v(), "row {i}");
        }
    }

    #[test]
    fn op_sequence_reproduces_cosines() {
        let t = chebyshev_chain(12);
        let x = mp(0.3);
        let p = op_sequence(&t, 9, &x).unwrap();
        assert!((p[2].to_f64() + 0.82).abs() < 1e-12, "P₂(0.3) = {}", p[2]);
        for (n, v) in p.iter().enumerate() {
            let reference = (n as f64 * 0.3f64.acos()).cos();
            assert!(
                (v.to_f64() - reference).abs() < 1e-10,
                "P_{n}(0.3) = {v} vs cos {reference}"
            );
        }
        // At the endpoint every stochastic chain gives P_n(1) = 1, exactly.
        let ones = op_sequence(&t, 12, &ExactScalar::one_v()).unwrap();
        assert!(ones.iter().all(|v| *v == ExactScalar::one_v()));
    }

    #[test]
    fn flat_weight_chain_comes_out_stochastic() {
        let measure = ClassicalMeasure::Jacobi { p: ex("0"), q: ex("0") };
        let chain = chain_from_measure(&measure, 8).unwrap();
        // Legendre-style values: q_n = 1/2 and the first up/down split.
        assert_eq!(chain.q[0], ex("1/2"));
        assert_eq!(chain.r[0], ex("1/2"));
        assert_eq!(chain.p[1], ex("1/6"));
        assert_eq!(chain.r[1], ex("1/3"));
        let ones = op_sequence(&chain, chain.len(), &ExactScalar::one_v()).unwrap();
        assert!(ones.iter().all(|v| *v == ExactScalar::one_v()));
    }

    #[test]
    fn return_probabilities_are_the_arcsine_moments() {
        let t = chebyshev_chain(10);
        let s = spectral_series(&t, 7).unwrap();
        let want = ["1", "0", "1/2", "0", "3/8", "0", "5/16"];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(s.coefficients[n], ex(w), "w_{n}");
        }
    }

    #[test]
    fn two_step_return_is_the_single_path() {
        let t = chebyshev_chain(6);
        assert_eq!(chain_power_entry(&t, 0, 0, 2).unwrap(), ex("1/2"));
        assert_eq!(chain_power_entry(&t, 0, 2, 2).unwrap(), ex("1/2"));
        assert_eq!(chain_power_entry(&t, 0, 1, 1).unwrap(), ex("1"));
        assert_eq!(chain_power_entry(&t, 3, 3, 0).unwrap(), ex("1"));
    }

    #[test]
    fn power_sizing_never_truncates_mass() {
        let t = chebyshev_chain(5);
        assert!(matches!(chain_power_entry(&t, 0, 0, 6), Err(Error::Sizing(_))));
        assert!(matches!(spectral_series(&t, 10), Err(Error::Sizing(_))));
    }

    #[test]
    fn stieltjes_series_reaches_the_closed_form() {
        // S(2) for the arcsine law is 1/√(2²−1) = 1/√3.
        let t = chebyshev_chain(45);
        let z = mp(2.0);
        let s = stieltjes_series(&t, &z, 40).unwrap();
        let closed = 1.0 / 3.0f64.sqrt();
        let err = (s.value.to_f64() - closed).abs();
        assert!(err <= s.remainder_bound, "error {err} vs bound {}", s.remainder_bound);

        // Doubling the terms moves the sum by less than the attached bound.
        let t2 = chebyshev_chain(90);
        let s2 = stieltjes_series(&t2, &z, 80).unwrap();
        let step = (s2.value.to_f64() - s.value.to_f64()).abs();
        assert!(step <= s.remainder_bound, "step {step} vs bound {}", s.remainder_bound);
    }

    #[test]
    fn stieltjes_series_rejects_the_unit_disc() {
        let t = chebyshev_chain(10);
        assert!(matches!(
            stieltjes_series(&t, &mp(0.9), 5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn markov_stieltjes_ratio_converges_monotonically() {
        // Convergence is geometric at rate (2−√3)^{2n}, far below f64
        // resolution by n = 20, so reference and errors live at 60 digits.
        let t = chebyshev_chain(45);
        let z = PrecisionScalar::from_i64_digits(2, 60);
        let closed = z.one().div(&z.from_i64(3).sqrt());
        let errs: Vec<f64> = [5usize, 10, 20, 40]
            .iter()
            .map(|n| {
                markov_stieltjes_ratio(&t, &z, *n).unwrap().sub(&closed).to_f64().abs()
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "errors {errs:?}");
        assert!(errs[2] < 1e-6, "n=20 error {}", errs[2]);
    }

    #[test]
    fn associated_values_match_the_defining_integral() {
        // N₃(z) = ∫ (P₃(z) − P₃(x))/(z−x) dμ(x), checked by quadrature.
        let measure = ClassicalMeasure::Chebyshev;
        let frame = measure_frame(&measure, 12).unwrap();
        let z = mp(2.0);
        let pz = op_sequence(&frame.chain, 4, &z).unwrap()[3].clone();
        let integral = integrate_measure(&frame, 16, 30, |x| {
            let px = op_sequence(&frame.chain, 4, x).unwrap()[3].clone();
            pz.sub(&px).div(&z.sub(x))
        })
        .unwrap();
        let n3 = associated_sequence(&frame.chain, 4, &z).unwrap()[3].clone();
        assert!(
            (integral.to_f64() - n3.to_f64()).abs() < 1e-10,
            "integral {integral} vs recurrence {n3}"
        );
    }

    #[test]
    fn chebyshev_gram_matrix_is_diagonal() {
        let frame = measure_frame(&ClassicalMeasure::Chebyshev, 16).unwrap();
        for n in 0..=12usize {
            for m in 0..=12usize {
                let v = integrate_measure(&frame, 18, 40, |x| {
                    let p = op_sequence(&frame.chain, 13, x).unwrap();
                    p[n].mul(&p[m])
                })
                .unwrap()
                .to_f64();
                if n == m {
                    let kappa = if n == 0 { 1.0 } else { 0.5 };
                    assert!((v - kappa).abs() < 1e-10, "κ_{n} = {v}");
                } else {
                    assert!(v.abs() < 1e-10, "Gram[{n}][{m}] = {v}");
                }
            }
        }
    }

    #[test]
    fn invalid_chains_are_rejected() {
        let half = ex("1/2");
        // Row sums off.
        let err = TridiagonalChain::new(
            vec![ex("0"), half.clone(), half.clone()],
            vec![ex("0"), ex("1/4"), ex("0")],
            vec![ex("1"), half.clone(), half.clone()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
        // Nonpositive up-probability.
        let err = TridiagonalChain::new(
            vec![ex("0"), half.clone()],
            vec![ex("0"), half.clone()],
            vec![ex("1"), ex("0")],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Positivity(_)));
        // q₀ + r₀ ≠ 1.
        let err = TridiagonalChain::new(
            vec![ex("0"), half.clone()],
            vec![ex("1/4"), ex("0")],
            vec![ex("1/2"), half.clone()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }
}
