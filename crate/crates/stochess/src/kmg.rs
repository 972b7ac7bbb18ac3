//! Karlin–McGregor evolution: `r`-step transition probabilities of the dual
//! chains, computed by two independent routes.
//!
//! The spectral route evaluates `∫ xʳ B_j(x) Q_k(x) dμ(x)` by quadrature
//! against the weight channels; since `x·B_j = Σ_i H[j][i] B_i` and the
//! families are biorthogonal, that integral is `(Hʳ)[j][k]`, so dressing it
//! with the similarity ratio gives an `r`-step probability without ever
//! forming a matrix power. The matrix route iterates the truncated
//! stochastic matrices directly. Agreement of the two is the working
//! validation of every convention in the pipeline (gauge, channel
//! normalization, band orientation).
//!
//! Single-weight (classical) chains evolve through the analogous tridiagonal
//! identity in [`classical_evolution`].

use serde::Serialize;

use crate::classical::{integrate_measure, measure_frame, op_sequence};
use crate::error::{Error, Result};
use crate::gauss_borel::{horner_mp, mp_coeffs, PolynomialFamily};
use crate::moments::ClassicalMeasure;
use crate::quadrature::{gauss_jacobi, integrate_unit_interval_endpoints, QuadratureRule};
use crate::scalar::{PrecisionScalar, Scalar};
use crate::stochastic::StochasticPair;
use crate::weights::{ll_weight_closed, ll_weight_series, WeightChannel, WeightSystem};

/// Which of the two dual chains a query addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainSide {
    /// Bands `-2..=+1`: down-jumps of one or two, up-jumps of one.
    Hat,
    /// Bands `-1..=+2`: down-jumps of one, up-jumps of one or two.
    Check,
}

impl ChainSide {
    /// Largest upward jump per step — the rate at which a walk can climb
    /// toward (and past) a truncation edge.
    pub fn up_reach(self) -> usize {
        match self {
            ChainSide::Hat => 1,
            ChainSide::Check => 2,
        }
    }
}

/// An `r`-step transition probability request `P(from → to in steps)` on one
/// of the dual chains.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolutionQuery {
    pub from: usize,
    pub to: usize,
    pub steps: usize,
    pub side: ChainSide,
}

impl EvolutionQuery {
    /// States a truncated matrix must carry so the iterated distribution
    /// never touches an incomplete edge row: everything the walk can climb
    /// to, plus the edge rows themselves.
    pub fn required_truncation(&self) -> usize {
        self.from.max(self.to) + self.side.up_reach() * self.steps + 3
    }
}

/// `r`-step probability by the spectral (integral) route.
///
/// `P̂ʳ(n→m) = (B_m(1)/B_n(1)) · ∫xʳ B_n Q_m dμ` and
/// `P̌ʳ(n→m) = (q_m/q_n) · ∫xʳ B_m Q_n dμ`; the gauge shared by the `q`
/// values cancels in the ratio. The family's type I coefficients already
/// absorb the `H̃` normalization, so the integral needs no further division.
pub fn kmg_probability<S: Scalar>(
    query: &EvolutionQuery,
    family: &PolynomialFamily<S>,
    system: &WeightSystem,
    digits: u32,
) -> Result<PrecisionScalar> {
    let top = query.from.max(query.to);
    if family.typeii_coeffs.len() <= top {
        return Err(Error::Sizing(format!(
            "query touches polynomial index {top}, family carries {}",
            family.typeii_coeffs.len()
        )));
    }
    let (j, k) = match query.side {
        ChainSide::Hat => (query.from, query.to),
        ChainSide::Check => (query.to, query.from),
    };
    let integral = spectral_integral(family, system, query.steps, j, k, digits)?;
    let ratio = match query.side {
        ChainSide::Hat => family.b_at_1[query.to]
            .to_precision(digits)
            .div(&family.b_at_1[query.from].to_precision(digits)),
        ChainSide::Check => {
            let q = family.q_at_1.realize(digits);
            q[query.to].div(&q[query.from])
        }
    };
    Ok(ratio.mul(&integral))
}

/// `∫ xʳ B_j(x) Q_k(x) dμ(x)` — equal to `(Hʳ)[j][k]` — summed over the two
/// unit-normalized weight channels.
fn spectral_integral<S: Scalar>(
    family: &PolynomialFamily<S>,
    system: &WeightSystem,
    r: usize,
    j: usize,
    k: usize,
    digits: u32,
) -> Result<PrecisionScalar> {
    let bj = mp_coeffs(&family.typeii_coeffs[j], digits);
    let a1 = mp_coeffs(&family.typei_even[k], digits);
    let a2 = mp_coeffs(&family.typei_odd[k], digits);
    let rp = r as i32;
    match system {
        WeightSystem::JacobiPineiro(p) => {
            let nodes = (r + j + k + 4).div_ceil(2) + 2;
            let rule1 = gauss_jacobi(nodes, &p.alpha0, &p.alpha1, digits)?;
            let rule2 = gauss_jacobi(nodes, &p.alpha0, &p.alpha2, digits)?;
            let channel = |rule: &QuadratureRule, a: &[PrecisionScalar]| {
                let mut mass = rule.weights[0].zero();
                for w in &rule.weights {
                    mass = mass.add(w);
                }
                rule.integrate(|x| x.powi(rp).mul(&horner_mp(&bj, x)).mul(&horner_mp(a, x)))
                    .div(&mass)
            };
            Ok(channel(&rule1, &a1).add(&channel(&rule2, &a2)))
        }
        WeightSystem::Hypergeometric(p) => {
            let uniform = p.is_uniform_tuple();
            let weight = |ch: WeightChannel, x: &PrecisionScalar| -> Result<PrecisionScalar> {
                if uniform {
                    ll_weight_closed(ch, x)
                } else {
                    ll_weight_series(p, ch == WeightChannel::Two, x)
                }
            };
            let channel = |ch: WeightChannel, a: &[PrecisionScalar]| {
                integrate_unit_interval_endpoints(
                    |x| {
                        x.powi(rp)
                            .mul(&horner_mp(&bj, x))
                            .mul(&horner_mp(a, x))
                            .mul(&weight(ch, x).expect("interior weight evaluation"))
                    },
                    48,
                    digits,
                )
            };
            Ok(channel(WeightChannel::One, &a1)?.add(&channel(WeightChannel::Two, &a2)?))
        }
        WeightSystem::ClassicalJacobi(_) => Err(Error::UnsupportedKind(
            "single-weight chains have no dual pair; evolve them with classical_evolution".into(),
        )),
    }
}

/// `r`-step probability by iterating the truncated stochastic matrix.
///
/// Exact scalars stay exact (the route used for doubling-invariance and
/// closed-form checks). Refuses truncations too small to contain the walk:
/// a distribution touching an incomplete edge row would silently leak mass.
pub fn matrix_power_probability<S: Scalar>(
    query: &EvolutionQuery,
    pair: &StochasticPair<S>,
) -> Result<S> {
    let matrix = match query.side {
        ChainSide::Hat => &pair.hat_h,
        ChainSide::Check => &pair.check_h,
    };
    let n = matrix.size();
    let required = query.required_truncation();
    if n < required {
        return Err(Error::Sizing(format!(
            "{} steps from state {} need {required} truncated states, pair has {n}",
            query.steps, query.from
        )));
    }
    let zero = matrix.row(0).entries[0].zero();
    let mut dist = vec![zero.clone(); n];
    dist[query.from] = zero.one();
    for _ in 0..query.steps {
        let mut next = vec![zero.clone(); n];
        for (i, mass) in dist.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            let row = matrix.row(i);
            for (t, v) in row.entries.iter().enumerate() {
                next[row.start + t] = next[row.start + t].add(&mass.mul(v));
            }
        }
        dist = next;
    }
    Ok(dist[query.to].clone())
}

/// `k`-step probability of a classical (tridiagonal) chain by the spectral
/// route: `Pᵏ[n][m] = ∫xᵏ P_n P_m dμ / ∫P_m² dμ`.
///
/// The denominator is the `m`-th Fourier norm `κ_m = ∫P_m² dμ`, which never
/// vanishes — normalizing instead by a power-weighted self-integral such as
/// `∫xᵏP_n² dμ` breaks down already at `k = 1, n = 0` for any measure with
/// mean zero, where that integral is exactly 0.
pub fn classical_evolution(
    measure: &ClassicalMeasure,
    from: usize,
    to: usize,
    steps: usize,
) -> Result<PrecisionScalar> {
    let digits = 40;
    let count = from.max(to) + 1;
    let frame = measure_frame(measure, count + 1)?;
    let nodes = (steps + from + to + 4).div_ceil(2) + 2;
    let num = integrate_measure(&frame, nodes, digits, |x| {
        let p = op_sequence(&frame.chain, count, x).expect("coverage checked by frame size");
        x.powi(steps as i32).mul(&p[from]).mul(&p[to])
    })?;
    let den = integrate_measure(&frame, nodes, digits, |x| {
        let p = op_sequence(&frame.chain, count, x).expect("coverage checked by frame size");
        p[to].mul(&p[to])
    })?;
    if den.to_f64().abs() < 1e-30 {
        return Err(Error::DegenerateQuery(format!(
            "Fourier norm ∫P_{to}² dμ evaluated to {den}"
        )));
    }
    Ok(num.div(&den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    use crate::classical::chain_power_entry;
    use crate::gauss_borel::{extract_hessenberg, factorize, BandedHessenberg};
    use crate::moments::{build_jp_moments, build_ll_moments_exact};
    use crate::scalar::ExactScalar;
    use crate::stochastic::{
        make_stochastic_pair, make_stochastic_pair_with_policy, BoundaryPolicy,
    };
    use crate::weights::{HypergeometricParams, JacobiPineiroParams};

    fn ex(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    fn set1() -> JacobiPineiroParams {
        JacobiPineiroParams::parse("-1/4", "-1/2", "-1/2").unwrap()
    }

    fn set2() -> JacobiPineiroParams {
        JacobiPineiroParams::parse("-1/4", "-1/2", "1/2").unwrap()
    }

    struct JpFixture {
        family: PolynomialFamily<ExactScalar>,
        pair: StochasticPair<PrecisionScalar>,
        system: WeightSystem,
    }

    fn jp_fixture(params: JacobiPineiroParams, size: usize) -> JpFixture {
        let digits = 60;
        let g = build_jp_moments(&params, size).unwrap();
        let f = factorize(&g).unwrap();
        let h = extract_hessenberg(&f).unwrap();
        let family = f.polynomial_family(&ExactScalar::one_v()).unwrap();
        let to_p =
            |v: &[ExactScalar]| -> Vec<PrecisionScalar> { v.iter().map(|x| x.to_precision(digits)).collect() };
        let hp = BandedHessenberg {
            a: to_p(&h.a),
            b: to_p(&h.b),
            c: to_p(&h.c),
            truncation_size: h.truncation_size,
        };
        let b1 = to_p(&family.b_at_1);
        let q = family.q_at_1.realize(digits);
        let pair = make_stochastic_pair(&hp, &b1, &q).unwrap();
        JpFixture { family, pair, system: WeightSystem::JacobiPineiro(params) }
    }

    fn set1_fixture() -> &'static JpFixture {
        static FIX: OnceLock<JpFixture> = OnceLock::new();
        FIX.get_or_init(|| jp_fixture(set1(), 17))
    }

    fn set2_fixture() -> &'static JpFixture {
        static FIX: OnceLock<JpFixture> = OnceLock::new();
        FIX.get_or_init(|| jp_fixture(set2(), 17))
    }

    struct LlFixture {
        family: PolynomialFamily<ExactScalar>,
        pair: StochasticPair<ExactScalar>,
        system: WeightSystem,
    }

    fn uniform_fixture() -> &'static LlFixture {
        static FIX: OnceLock<LlFixture> = OnceLock::new();
        FIX.get_or_init(|| {
            let params = HypergeometricParams::uniform_tuple();
            let system = WeightSystem::Hypergeometric(params.clone());
            let g = build_ll_moments_exact(&params, 13).unwrap();
            let f = factorize(&g).unwrap();
            let h = extract_hessenberg(&f).unwrap();
            let rho = system.endpoint_ratio_limit().unwrap();
            let family = f.polynomial_family(&rho).unwrap();
            let q = family.q_at_1.collapse().unwrap();
            let pair = make_stochastic_pair(&h, &family.b_at_1, &q).unwrap();
            LlFixture { family, pair, system }
        })
    }

    /// Exact Toeplitz operator of the uniform tuple with the geometric
    /// asymptotic normalizations (semi-stochastic boundary).
    fn uniform_toeplitz_pair(n: usize) -> StochasticPair<ExactScalar> {
        let mut a = vec![ex("0"), ex("0")];
        let mut b = vec![ex("0")];
        let mut c = Vec::new();
        for _ in 0..n {
            c.push(ex("4/9"));
        }
        for _ in 1..n {
            b.push(ex("16/243"));
        }
        for _ in 2..n {
            a.push(ex("64/19683"));
        }
        let h = BandedHessenberg { a, b, c, truncation_size: n };
        let two_kappa = ex("8/27");
        let mut b1 = vec![ExactScalar::one_v()];
        let mut q = vec![ExactScalar::one_v()];
        for i in 1..n {
            b1.push(&b1[i - 1] * &two_kappa);
            q.push(&q[i - 1] / &two_kappa);
        }
        make_stochastic_pair_with_policy(&h, &b1, &q, BoundaryPolicy::Semi).unwrap()
    }

    #[test]
    fn zero_steps_is_the_identity() {
        let fix = set1_fixture();
        for side in [ChainSide::Hat, ChainSide::Check] {
            for n in 0..4usize {
                for m in 0..4usize {
                    let q = EvolutionQuery { from: n, to: m, steps: 0, side };
                    let v = kmg_probability(&q, &fix.family, &fix.system, 40).unwrap().to_f64();
                    let target = if n == m { 1.0 } else { 0.0 };
                    assert!(
                        (v - target).abs() < 1e-10,
                        "{side:?} 0-step ({n}→{m}) = {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn one_step_recovers_the_transition_matrices() {
        let fix = set1_fixture();
        for side in [ChainSide::Hat, ChainSide::Check] {
            for n in 0..5usize {
                for m in 0..6usize {
                    let q = EvolutionQuery { from: n, to: m, steps: 1, side };
                    let v = kmg_probability(&q, &fix.family, &fix.system, 40).unwrap().to_f64();
                    let matrix = match side {
                        ChainSide::Hat => &fix.pair.hat_h,
                        ChainSide::Check => &fix.pair.check_h,
                    };
                    let entry = matrix.entry(n, m).to_f64();
                    assert!(
                        (v - entry).abs() < 1e-10,
                        "{side:?} 1-step ({n}→{m}) integral {v} vs matrix {entry}"
                    );
                }
            }
        }
    }

    #[test]
    fn hypergeometric_one_step_recovers_the_exact_pair() {
        let fix = uniform_fixture();
        for side in [ChainSide::Hat, ChainSide::Check] {
            for n in 0..4usize {
                for m in 0..5usize {
                    let q = EvolutionQuery { from: n, to: m, steps: 1, side };
                    let v = kmg_probability(&q, &fix.family, &fix.system, 30).unwrap().to_f64();
                    let matrix = match side {
                        ChainSide::Hat => &fix.pair.hat_h,
                        ChainSide::Check => &fix.pair.check_h,
                    };
                    let entry = matrix.entry(n, m).to_f64();
                    assert!(
                        (v - entry).abs() < 1e-9,
                        "{side:?} 1-step ({n}→{m}) integral {v} vs exact {entry}"
                    );
                }
            }
        }
    }

    #[test]
    fn spectral_integrals_match_matrix_powers_on_a_grid() {
        for fix in [set1_fixture(), set2_fixture()] {
            for side in [ChainSide::Hat, ChainSide::Check] {
                for r in 2..=4usize {
                    for n in 0..=4usize {
                        for m in 0..=4usize {
                            let q = EvolutionQuery { from: n, to: m, steps: r, side };
                            let integral =
                                kmg_probability(&q, &fix.family, &fix.system, 40).unwrap().to_f64();
                            let power =
                                matrix_power_probability(&q, &fix.pair).unwrap().to_f64();
                            assert!(
                                (integral - power).abs() < 1e-8,
                                "{side:?} {r}-step ({n}→{m}): integral {integral} vs power {power}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hypergeometric_integrals_match_exact_powers() {
        let fix = uniform_fixture();
        for side in [ChainSide::Hat, ChainSide::Check] {
            for (n, m) in [(0usize, 0usize), (0, 2), (2, 1), (1, 3)] {
                let q = EvolutionQuery { from: n, to: m, steps: 2, side };
                let integral = kmg_probability(&q, &fix.family, &fix.system, 30).unwrap().to_f64();
                let power = matrix_power_probability(&q, &fix.pair).unwrap().to_f64();
                assert!(
                    (integral - power).abs() < 1e-9,
                    "{side:?} 2-step ({n}→{m}): integral {integral} vs exact power {power}"
                );
            }
        }
    }

    #[test]
    fn probability_is_conserved_by_the_integral_route() {
        let fix = set1_fixture();
        // Hat walk climbs at most one per step, so 3 steps from state 3
        // land in 0..=6; the integral-route masses must sum to 1.
        let mut total = 0.0;
        for m in 0..=6usize {
            let q = EvolutionQuery { from: 3, to: m, steps: 3, side: ChainSide::Hat };
            total += kmg_probability(&q, &fix.family, &fix.system, 40).unwrap().to_f64();
        }
        assert!((total - 1.0).abs() < 1e-8, "hat mass {total}");

        let mut total = 0.0;
        for m in 0..=5usize {
            let q = EvolutionQuery { from: 1, to: m, steps: 2, side: ChainSide::Check };
            total += kmg_probability(&q, &fix.family, &fix.system, 40).unwrap().to_f64();
        }
        assert!((total - 1.0).abs() < 1e-8, "check mass {total}");
    }

    #[test]
    fn uniform_chain_returns_in_two_steps() {
        // Two-step return at the boundary: stay-stay plus up-down,
        // (12/27)² + (8/27)(6/27) = 192/729. The off-band two-step entry is
        // the single path through state 1.
        let pair = uniform_toeplitz_pair(12);
        let q00 = EvolutionQuery { from: 0, to: 0, steps: 2, side: ChainSide::Hat };
        assert_eq!(matrix_power_probability(&q00, &pair).unwrap(), ex("192/729"));
        let q02 = EvolutionQuery { from: 0, to: 2, steps: 2, side: ChainSide::Hat };
        assert_eq!(matrix_power_probability(&q02, &pair).unwrap(), ex("64/729"));
    }

    #[test]
    fn exact_powers_satisfy_chapman_kolmogorov() {
        let pair = uniform_toeplitz_pair(14);
        let direct = matrix_power_probability(
            &EvolutionQuery { from: 1, to: 1, steps: 4, side: ChainSide::Check },
            &pair,
        )
        .unwrap();
        let mut split = ExactScalar::zero_v();
        for mid in 0..=5usize {
            let first = matrix_power_probability(
                &EvolutionQuery { from: 1, to: mid, steps: 2, side: ChainSide::Check },
                &pair,
            )
            .unwrap();
            let second = matrix_power_probability(
                &EvolutionQuery { from: mid, to: 1, steps: 2, side: ChainSide::Check },
                &pair,
            )
            .unwrap();
            split = &split + &(&first * &second);
        }
        assert_eq!(direct, split);
    }

    #[test]
    fn power_route_refuses_leaky_truncations() {
        let pair = uniform_toeplitz_pair(8);
        let q = EvolutionQuery { from: 5, to: 0, steps: 10, side: ChainSide::Hat };
        assert!(matches!(matrix_power_probability(&q, &pair), Err(Error::Sizing(_))));
        let fix = set1_fixture();
        let q = EvolutionQuery { from: 0, to: 40, steps: 1, side: ChainSide::Hat };
        assert!(matches!(
            kmg_probability(&q, &fix.family, &fix.system, 40),
            Err(Error::Sizing(_))
        ));
    }

    #[test]
    fn classical_weights_have_no_dual_route() {
        let fix = set1_fixture();
        let system = WeightSystem::ClassicalJacobi(
            crate::weights::ClassicalJacobiParams::new(ex("0"), ex("0")).unwrap(),
        );
        let q = EvolutionQuery { from: 0, to: 0, steps: 1, side: ChainSide::Hat };
        assert!(matches!(
            kmg_probability(&q, &fix.family, &system, 40),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn classical_evolution_matches_exact_chain_powers() {
        let chains: [(ClassicalMeasure, usize); 2] = [
            (ClassicalMeasure::Chebyshev, 6),
            (ClassicalMeasure::Jacobi { p: ex("0"), q: ex("0") }, 4),
        ];
        for (measure, kmax) in chains {
            let reference = match &measure {
                ClassicalMeasure::Chebyshev => crate::classical::chebyshev_chain(12),
                m => crate::classical::chain_from_measure(m, 12).unwrap(),
            };
            for k in 0..=kmax {
                for n in 0..=3usize {
                    for m in 0..=3usize {
                        let spectral = classical_evolution(&measure, n, m, k).unwrap().to_f64();
                        let exact =
                            chain_power_entry(&reference, n, m, k).unwrap().to_f64();
                        assert!(
                            (spectral - exact).abs() < 1e-10,
                            "{measure:?} P^{k}[{n}][{m}]: spectral {spectral} vs exact {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn one_step_from_the_base_state_is_defined() {
        // The mean-zero arcsine measure makes ∫x·P₀² dμ = 0, so any gauge
        // dividing by it has no value here; the Fourier gauge gives the
        // chain entry 1 directly.
        let v = classical_evolution(&ClassicalMeasure::Chebyshev, 0, 1, 1).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-12, "P¹[0][1] = {v}");
        let v = classical_evolution(&ClassicalMeasure::Chebyshev, 0, 0, 2).unwrap();
        assert!((v.to_f64() - 0.5).abs() < 1e-12, "P²[0][0] = {v}");
    }
}
