//! Weight systems on the unit interval.
//!
//! Three families share one interface: the Jacobi–Piñeiro pair
//! `x^{α₁}(1-x)^{α₀}, x^{α₂}(1-x)^{α₀}`, the hypergeometric pair built from
//! `ω(x; a, b; c, d)` (with its uniform-tuple cube-root closed forms), and
//! single-weight classical Jacobi systems. The module also carries the
//! recurrence/transience classification, which is symbolic: whether
//! `∫ w₁(x)/(1-x) dx` diverges is decided exactly by the exponent of
//! `(1-x)` at the right endpoint.

use crate::error::{Error, Result};
use crate::quadrature::gauss_jacobi;
use crate::scalar::{ExactScalar, PrecisionScalar, Scalar};
use crate::special::{hyp2f1, log_gamma};

/// Which member of the weight pair is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightChannel {
    One,
    Two,
}

impl WeightChannel {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(WeightChannel::One),
            2 => Ok(WeightChannel::Two),
            _ => Err(Error::Domain(format!("weight channel must be 1 or 2, got {i}"))),
        }
    }
}

/// Exponent triple of the Jacobi–Piñeiro pair
/// `w₁ = x^{α₁}(1-x)^{α₀}`, `w₂ = x^{α₂}(1-x)^{α₀}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct JacobiPineiroParams {
    pub alpha1: ExactScalar,
    pub alpha2: ExactScalar,
    pub alpha0: ExactScalar,
}

impl JacobiPineiroParams {
    /// Requires all three exponents `> -1` and `α₁ - α₂` not an integer
    /// (otherwise the two weights are not independent enough to span the
    /// multiple-orthogonality system).
    pub fn new(alpha1: ExactScalar, alpha2: ExactScalar, alpha0: ExactScalar) -> Result<Self> {
        let neg_one = ExactScalar::int(-1);
        for (name, v) in [("alpha1", &alpha1), ("alpha2", &alpha2), ("alpha0", &alpha0)] {
            if *v <= neg_one {
                return Err(Error::Domain(format!("{name} must exceed -1, got {v}")));
            }
        }
        let diff = &alpha1 - &alpha2;
        if diff.is_integer() {
            return Err(Error::Domain(format!(
                "alpha1 - alpha2 must not be an integer, got {diff}"
            )));
        }
        Ok(JacobiPineiroParams { alpha1, alpha2, alpha0 })
    }

    pub fn parse(alpha1: &str, alpha2: &str, alpha0: &str) -> Result<Self> {
        JacobiPineiroParams::new(alpha1.parse()?, alpha2.parse()?, alpha0.parse()?)
    }

    /// `|α₁ - α₂| < 1`: the range in which the dual chain's transition
    /// weights are all nonnegative.
    pub fn positivity_flag(&self) -> bool {
        (&self.alpha1 - &self.alpha2).abs_v() < ExactScalar::one_v()
    }

    /// The same system with the roles of the two weights exchanged.
    pub fn swapped(&self) -> Self {
        JacobiPineiroParams {
            alpha1: self.alpha2.clone(),
            alpha2: self.alpha1.clone(),
            alpha0: self.alpha0.clone(),
        }
    }

    fn alpha_for(&self, which: WeightChannel) -> &ExactScalar {
        match which {
            WeightChannel::One => &self.alpha1,
            WeightChannel::Two => &self.alpha2,
        }
    }
}

/// Parameter tuple `(a, b; c, d)` of the hypergeometric weight
/// `ω(x) = N · x^{a-1}(1-x)^{δ-1} · ₂F₁(c-b, d-b; δ; 1-x)` with
/// `δ = c+d-a-b` and `N = Γ(c)Γ(d)/(Γ(a)Γ(b)Γ(δ))`. The pair is
/// `W₁ = ω(a, b; c, d)` and `W₂ = ω(a, b+1; c+1, d)`; both share `δ`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HypergeometricParams {
    pub a: ExactScalar,
    pub b: ExactScalar,
    pub c: ExactScalar,
    pub d: ExactScalar,
    pub delta: ExactScalar,
}

impl HypergeometricParams {
    pub fn new(a: ExactScalar, b: ExactScalar, c: ExactScalar, d: ExactScalar) -> Result<Self> {
        let delta = &(&c + &d) - &(&a + &b);
        let zero = ExactScalar::zero_v();
        for (name, v) in [("a", &a), ("b", &b), ("c", &c), ("d", &d), ("delta = c+d-a-b", &delta)]
        {
            if *v <= zero {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        let one = ExactScalar::one_v();
        for (name, v) in [
            ("d-a", &d - &a),
            ("d-b", &d - &b),
            ("c+1-a", &(&c + &one) - &a),
            ("c-b", &c - &b),
        ] {
            if v.is_integer() && !v.is_positive() {
                return Err(Error::Domain(format!(
                    "{name} must not be a nonpositive integer, got {v}"
                )));
            }
        }
        Ok(HypergeometricParams { a, b, c, d, delta })
    }

    pub fn parse(a: &str, b: &str, c: &str, d: &str) -> Result<Self> {
        HypergeometricParams::new(a.parse()?, b.parse()?, c.parse()?, d.parse()?)
    }

    /// The tuple `(4/3, 5/3, 2, 5/2)`, whose weights have elementary
    /// cube-root closed forms (see [`ll_weight_closed`]) and whose operator
    /// is exactly Toeplitz.
    pub fn uniform_tuple() -> Self {
        HypergeometricParams::new(
            ExactScalar::ratio(4, 3),
            ExactScalar::ratio(5, 3),
            ExactScalar::int(2),
            ExactScalar::ratio(5, 2),
        )
        .expect("the uniform tuple is admissible")
    }

    pub fn is_uniform_tuple(&self) -> bool {
        *self == HypergeometricParams::uniform_tuple()
    }

    /// Effective `(a', b', c', d')` for the requested channel: the second
    /// weight shifts `b` and `c` up by one.
    pub fn channel_tuple(
        &self,
        shifted: bool,
    ) -> (ExactScalar, ExactScalar, ExactScalar, ExactScalar) {
        let one = ExactScalar::one_v();
        if shifted {
            (self.a.clone(), &self.b + &one, &self.c + &one, self.d.clone())
        } else {
            (self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
        }
    }
}

/// Exponent pair of a single classical Jacobi weight `x^q (1-x)^p`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassicalJacobiParams {
    pub p: ExactScalar,
    pub q: ExactScalar,
}

impl ClassicalJacobiParams {
    pub fn new(p: ExactScalar, q: ExactScalar) -> Result<Self> {
        let neg_one = ExactScalar::int(-1);
        if p <= neg_one || q <= neg_one {
            return Err(Error::Domain(format!(
                "jacobi exponents must exceed -1, got p={p}, q={q}"
            )));
        }
        Ok(ClassicalJacobiParams { p, q })
    }

    pub fn parse(p: &str, q: &str) -> Result<Self> {
        ClassicalJacobiParams::new(p.parse()?, q.parse()?)
    }
}

/// A weight system on `[0, 1]`: the parameter family plus (implicitly) its
/// support. All families in this crate live on the unit interval.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSystem {
    JacobiPineiro(JacobiPineiroParams),
    Hypergeometric(HypergeometricParams),
    ClassicalJacobi(ClassicalJacobiParams),
}

impl WeightSystem {
    /// Support interval; identical for every family.
    pub fn support(&self) -> (ExactScalar, ExactScalar) {
        (ExactScalar::zero_v(), ExactScalar::one_v())
    }

    /// Pointwise evaluation dispatching to the family-specific routine.
    pub fn weight(&self, which: WeightChannel, x: &PrecisionScalar) -> Result<PrecisionScalar> {
        match self {
            WeightSystem::JacobiPineiro(p) => jp_weight(p, which, x),
            WeightSystem::Hypergeometric(p) => {
                ll_weight_series(p, which == WeightChannel::Two, x)
            }
            WeightSystem::ClassicalJacobi(p) => {
                if which == WeightChannel::Two {
                    return Err(Error::Domain(
                        "classical systems carry a single weight; channel 2 is undefined".into(),
                    ));
                }
                power_weight(&p.q, &p.p, x)
            }
        }
    }

    /// `ρ = lim_{x→1} w₂(x)/w₁(x)`, the ingredient that regularizes type I
    /// values at 1. Jacobi–Piñeiro: `x^{α₂-α₁} → 1`. Hypergeometric: both
    /// channels share the `(1-x)^{δ-1}` profile, so the limit is the ratio of
    /// their Gamma normalizers, `c/b`.
    pub fn endpoint_ratio_limit(&self) -> Result<ExactScalar> {
        match self {
            WeightSystem::JacobiPineiro(_) => Ok(ExactScalar::one_v()),
            WeightSystem::Hypergeometric(p) => Ok(&p.c / &p.b),
            WeightSystem::ClassicalJacobi(_) => Err(Error::UnsupportedKind(
                "the second-channel endpoint ratio applies to the two-weight families only".into(),
            )),
        }
    }
}

/// `x^α (1-x)^{α₀}` with endpoint care: an endpoint with a negative exponent
/// means the weight is unbounded there.
fn power_weight(
    x_exponent: &ExactScalar,
    one_minus_x_exponent: &ExactScalar,
    x: &PrecisionScalar,
) -> Result<PrecisionScalar> {
    let xf = x.to_f64();
    if !(0.0..=1.0).contains(&xf) {
        return Err(Error::Domain(format!("weight evaluation requires 0 ≤ x ≤ 1, got {xf}")));
    }
    let d = x.working_digits();
    let at_zero = x.is_zero();
    let at_one = *x.rug() == 1;
    if at_zero && x_exponent.is_negative() || at_one && one_minus_x_exponent.is_negative() {
        return Err(Error::Domain(
            "weight is unbounded at this endpoint (negative exponent)".into(),
        ));
    }
    let pow_term = |base: &PrecisionScalar, e: &ExactScalar| -> PrecisionScalar {
        if e.is_zero() {
            base.one()
        } else if base.is_zero() {
            base.zero()
        } else {
            base.pow(&PrecisionScalar::from_exact_digits(e, d)).expect("positive base")
        }
    };
    let one_minus = x.one().sub(x);
    Ok(pow_term(x, x_exponent).mul(&pow_term(&one_minus, one_minus_x_exponent)))
}

/// Jacobi–Piñeiro weight `x^{α_which}(1-x)^{α₀}`.
pub fn jp_weight(
    params: &JacobiPineiroParams,
    which: WeightChannel,
    x: &PrecisionScalar,
) -> Result<PrecisionScalar> {
    power_weight(params.alpha_for(which), &params.alpha0, x)
}

/// Hypergeometric weight by its defining series:
/// `N · x^{a'-1}(1-x)^{δ-1} · ₂F₁(c'-b', d'-b'; δ; 1-x)` where the primed
/// tuple is `(a, b; c, d)` for `shifted = false` (channel `W₁`) and
/// `(a, b+1; c+1, d)` for `shifted = true` (channel `W₂`).
pub fn ll_weight_series(
    params: &HypergeometricParams,
    shifted: bool,
    x: &PrecisionScalar,
) -> Result<PrecisionScalar> {
    let xf = x.to_f64();
    if !(0.0 < xf && xf <= 1.0) {
        return Err(Error::Domain(format!(
            "hypergeometric weight evaluation requires 0 < x ≤ 1, got {xf}"
        )));
    }
    let d = x.working_digits();
    let (pa, pb, pc, pd) = params.channel_tuple(shifted);
    let delta = &params.delta;
    let one_e = ExactScalar::one_v();

    let at_one = *x.rug() == 1;
    if at_one {
        if *delta > one_e {
            return Ok(x.zero());
        }
        if !(*delta == one_e) {
            return Err(Error::Domain(
                "hypergeometric weight is unbounded at x = 1 for delta < 1".into(),
            ));
        }
    }

    let mp = |v: &ExactScalar| PrecisionScalar::from_exact_digits(v, d);
    let lg = |v: &ExactScalar| log_gamma(&mp(v));
    let log_norm = lg(&pc)?
        .add(&lg(&pd)?)
        .sub(&lg(&pa)?)
        .sub(&lg(&pb)?)
        .sub(&lg(delta)?);
    let norm = log_norm.exp();
    if at_one {
        // delta = 1: both power factors are 1 and the series argument is 0.
        return Ok(norm);
    }

    let z = x.one().sub(x);
    let f = hyp2f1(&mp(&(&pc - &pb)), &mp(&(&pd - &pb)), &mp(delta), &z)?;
    let x_pow = x.pow(&mp(&(&pa - &one_e))).expect("x > 0");
    let z_pow = z.pow(&mp(&(delta - &one_e))).expect("1 - x > 0");
    Ok(norm.mul(&x_pow).mul(&z_pow).mul(&f))
}

/// Cube-root closed forms of the uniform tuple `(4/3, 5/3, 2, 5/2)`:
///
/// `W₁(x) = 81√3/(16π) · ∛x · (∛(1+√(1-x)) - ∛(1-√(1-x)))`
/// `W₂(x) = 243√3/(160π) · ∛x · ((∛(1+√(1-x)))⁴ - (∛(1-√(1-x)))⁴)`
///
/// Valid only for that tuple; both vanish at `x = 1` where the two
/// cube-root terms coincide.
pub fn ll_weight_closed(which: WeightChannel, x: &PrecisionScalar) -> Result<PrecisionScalar> {
    let xf = x.to_f64();
    if !(0.0..=1.0).contains(&xf) {
        return Err(Error::Domain(format!(
            "closed-form weight evaluation requires 0 ≤ x ≤ 1, got {xf}"
        )));
    }
    let d = x.working_digits();
    let one = x.one();
    let root = one.sub(x).sqrt();
    let plus = one.add(&root).cbrt();
    let minus = one.sub(&root).cbrt();
    let sqrt3 = PrecisionScalar::from_i64_digits(3, d).sqrt();
    let pi = PrecisionScalar::pi(d);
    let value = match which {
        WeightChannel::One => {
            let coeff = PrecisionScalar::from_i64_digits(81, d)
                .mul(&sqrt3)
                .div(&PrecisionScalar::from_i64_digits(16, d).mul(&pi));
            coeff.mul(&x.cbrt()).mul(&plus.sub(&minus))
        }
        WeightChannel::Two => {
            let coeff = PrecisionScalar::from_i64_digits(243, d)
                .mul(&sqrt3)
                .div(&PrecisionScalar::from_i64_digits(160, d).mul(&pi));
            coeff.mul(&x.cbrt()).mul(&plus.powi(4).sub(&minus.powi(4)))
        }
    };
    Ok(value)
}

/// One of the two firm verdicts of the recurrence classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Recurrent,
    Transient,
}

/// Recurrence/transience of the dual Markov chains attached to a weight
/// system. The `BoundaryFlagged` case carries both defensible readings of
/// the α₀ = 0 boundary: the divergence test on `∫ w₁(x)/(1-x) dx` says
/// recurrent (logarithmic divergence), while the stated transience range
/// `α₀ ≥ 0` says transient. The conflict is reported, not resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "classification", rename_all = "snake_case")]
pub enum Classification {
    Recurrent,
    Transient,
    BoundaryFlagged { integral_reading: Verdict, corollary_reading: Verdict },
}

/// Symbolic recurrence classification.
///
/// Jacobi–Piñeiro: `w₁(x)/(1-x) = x^{α₁}(1-x)^{α₀-1}`, whose integral over
/// `[0,1]` diverges exactly when `α₀ ≤ 0` — recurrent for `α₀ < 0`,
/// transient for `α₀ > 0`, flagged at `α₀ = 0`. Hypergeometric: recurrent
/// for `0 < δ ≤ 1`, transient for `δ > 1`. Classical single-weight systems
/// are outside the duality framework and are rejected.
pub fn classify_chain(system: &WeightSystem) -> Result<Classification> {
    match system {
        WeightSystem::JacobiPineiro(p) => {
            if p.alpha0.is_negative() {
                Ok(Classification::Recurrent)
            } else if p.alpha0.is_positive() {
                Ok(Classification::Transient)
            } else {
                Ok(Classification::BoundaryFlagged {
                    integral_reading: Verdict::Recurrent,
                    corollary_reading: Verdict::Transient,
                })
            }
        }
        WeightSystem::Hypergeometric(p) => {
            if p.delta <= ExactScalar::one_v() {
                Ok(Classification::Recurrent)
            } else {
                Ok(Classification::Transient)
            }
        }
        WeightSystem::ClassicalJacobi(_) => Err(Error::UnsupportedKind(
            "recurrence classification applies to the two-weight families only".into(),
        )),
    }
}

/// Numeric diagnostic for the classification (never used to classify):
/// cumulative values of `∫_{1/4}^{1-ε} w₁(x)/(1-x) dx` for a dyadic ladder
/// of `ε`, as `(ε, integral)` pairs. A recurrent system shows unbounded
/// growth; a transient one stabilizes.
pub fn divergence_probe(
    system: &WeightSystem,
    levels: usize,
    digits: u32,
) -> Result<Vec<(f64, f64)>> {
    let zero_e = ExactScalar::zero_v();
    let rule = gauss_jacobi(24, &zero_e, &zero_e, digits)?;
    let one = PrecisionScalar::from_i64_digits(1, digits);
    let mut acc = one.zero();
    let mut out = Vec::with_capacity(levels);
    // Panels [1 - 2^{-j}, 1 - 2^{-j-1}] for j = 2, 3, …: the left portion
    // [1/4, 3/4] is the j = 2 panel's neighbor, folded in first.
    let mut a = PrecisionScalar::from_exact_digits(&ExactScalar::ratio(1, 4), digits);
    for j in 2..(2 + levels) {
        let b = one.sub(&PrecisionScalar::from_exact_digits(
            &ExactScalar::ratio(1, 2).pow(j as i32),
            digits,
        ));
        let panel = rule.mapped_to(&a, &b)?;
        let mut err: Option<Error> = None;
        let contribution = panel.integrate(|x| {
            match system.weight(WeightChannel::One, x) {
                Ok(w) => w.div(&one.sub(x)),
                Err(e) => {
                    err = Some(e);
                    one.zero()
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        acc = acc.add(&contribution);
        out.push((2f64.powi(-(j as i32)), acc.to_f64()));
        a = b;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_unit_interval_endpoints;
    use crate::special::{beta_mp, beta_ratio};

    fn ex(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    fn mp(v: f64, d: u32) -> PrecisionScalar {
        PrecisionScalar::from_f64(v, d)
    }

    fn mp_ex(s: &str, d: u32) -> PrecisionScalar {
        PrecisionScalar::from_exact_digits(&ex(s), d)
    }

    fn set1() -> JacobiPineiroParams {
        JacobiPineiroParams::parse("-1/4", "-1/2", "-1/2").unwrap()
    }

    fn set2() -> JacobiPineiroParams {
        JacobiPineiroParams::parse("-1/4", "-1/2", "1/2").unwrap()
    }

    #[test]
    fn jp_flat_weight_is_one() {
        let p = JacobiPineiroParams::parse("0", "1/2", "0").unwrap();
        let w = jp_weight(&p, WeightChannel::One, &mp(0.3, 30)).unwrap();
        assert!((w.to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn jp_weight_at_half_is_a_power_of_two() {
        // x^{-1/4}(1-x)^{-1/2} at x = 1/2 is 2^{1/4}·2^{1/2} = 2^{3/4}.
        let w = jp_weight(&set1(), WeightChannel::One, &mp_ex("1/2", 40)).unwrap();
        let want = PrecisionScalar::from_i64_digits(2, 40)
            .pow(&mp_ex("3/4", 40))
            .unwrap();
        assert!(w.sub(&want).abs_f64() < 1e-35);
        assert!((w.to_f64() - 1.6817928).abs() < 1e-7);
    }

    #[test]
    fn jp_channel_ratio_tends_to_one_at_the_right_endpoint() {
        let p = set1();
        let d = 40;
        let x = mp(1.0 - 1e-6, d);
        let w1 = jp_weight(&p, WeightChannel::One, &x).unwrap();
        let w2 = jp_weight(&p, WeightChannel::Two, &x).unwrap();
        assert!((w2.div(&w1).to_f64() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn jp_endpoint_rules() {
        let p = set1();
        // Negative α₀ makes x = 1 unbounded; negative α₁ makes x = 0 unbounded.
        assert!(matches!(
            jp_weight(&p, WeightChannel::One, &mp(1.0, 30)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            jp_weight(&p, WeightChannel::One, &mp(0.0, 30)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            jp_weight(&p, WeightChannel::One, &mp(1.3, 30)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn jp_positive_alpha0_vanishes_at_one() {
        let w = jp_weight(&set2(), WeightChannel::One, &mp(1.0, 30)).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn jp_invalid_parameters_are_rejected() {
        assert!(matches!(
            JacobiPineiroParams::parse("-5/4", "-1/2", "0"),
            Err(Error::Domain(_))
        ));
        // Integer difference α₁ - α₂.
        assert!(matches!(
            JacobiPineiroParams::parse("3/4", "-1/4", "0"),
            Err(Error::Domain(_))
        ));
        assert!(set1().positivity_flag());
        assert!(set2().positivity_flag());
    }

    #[test]
    fn jp_moments_match_beta_ratio_through_k20() {
        // ∫ x^k · x^{α₁}(1-x)^{α₀} dx against the exact Beta-ratio moments,
        // for both printed parameter sets, to 1e-12 relative.
        let d = 30;
        for params in [set1(), set2()] {
            for (al, which) in
                [(&params.alpha1, WeightChannel::One), (&params.alpha2, WeightChannel::Two)]
            {
                let rule = gauss_jacobi(11, &params.alpha0, al, d).unwrap();
                let mass = beta_mp(
                    &PrecisionScalar::from_exact_digits(&(al + &ExactScalar::one_v()), d),
                    &PrecisionScalar::from_exact_digits(
                        &(&params.alpha0 + &ExactScalar::one_v()),
                        d,
                    ),
                )
                .unwrap();
                for k in 0..=20u64 {
                    let got = rule.integrate(|x| x.powi(k as i32));
                    let want = mass.mul(&PrecisionScalar::from_exact_digits(
                        &beta_ratio(k, al, &params.alpha0).unwrap(),
                        d,
                    ));
                    let rel = got.sub(&want).abs_f64() / want.abs_f64();
                    assert!(rel < 1e-12, "channel {which:?} k={k} rel={rel}");
                }
            }
        }
    }

    #[test]
    fn ll_series_vanishes_at_one_for_uniform_delta() {
        let p = HypergeometricParams::uniform_tuple();
        let w = ll_weight_series(&p, false, &mp(1.0, 30)).unwrap();
        assert!(w.is_zero());
        let w2 = ll_weight_series(&p, true, &mp(1.0, 30)).unwrap();
        assert!(w2.is_zero());
    }

    #[test]
    fn ll_series_and_closed_forms_agree_on_a_grid() {
        // 100 interior points, both channels, 1e-10 — the closed forms are
        // an elementary-function oracle completely independent of the
        // series/Gamma route.
        let d = 30;
        let p = HypergeometricParams::uniform_tuple();
        for i in 1..=100 {
            let x = mp(i as f64 / 101.0, d);
            for (shifted, which) in [(false, WeightChannel::One), (true, WeightChannel::Two)] {
                let series = ll_weight_series(&p, shifted, &x).unwrap();
                let closed = ll_weight_closed(which, &x).unwrap();
                let diff = series.sub(&closed).abs_f64();
                assert!(
                    diff < 1e-10,
                    "channel {which:?} x={} series={} closed={}",
                    x.to_f64(),
                    series.to_f64(),
                    closed.to_f64()
                );
            }
        }
    }

    #[test]
    fn ll_closed_forms_vanish_at_both_relevant_endpoints() {
        for which in [WeightChannel::One, WeightChannel::Two] {
            let w = ll_weight_closed(which, &mp(1.0, 30)).unwrap();
            assert!(w.abs_f64() < 1e-28, "cube-root terms must cancel at x=1");
            let w0 = ll_weight_closed(which, &mp(0.0, 30)).unwrap();
            assert!(w0.is_zero(), "∛x factor vanishes at 0");
        }
    }

    #[test]
    fn ll_weights_are_unit_mass() {
        // ∫₀¹ ω dx = 1 for both channels of the uniform tuple: the Γ
        // prefactor is exactly the normalizer of the Beta-series expansion.
        let d = 30;
        let p = HypergeometricParams::uniform_tuple();
        for shifted in [false, true] {
            let total = integrate_unit_interval_endpoints(
                |x| ll_weight_series(&p, shifted, x).unwrap(),
                48,
                d,
            )
            .unwrap();
            assert!(
                (total.to_f64() - 1.0).abs() < 1e-8,
                "shifted={shifted} total={}",
                total.to_f64()
            );
        }
    }

    #[test]
    fn ll_invalid_parameters_are_rejected() {
        // delta = -2 ≤ 0.
        assert!(matches!(
            HypergeometricParams::parse("2", "2", "1", "1"),
            Err(Error::Domain(_))
        ));
        // d - b = 0 lies in -ℕ∪{0}.
        assert!(matches!(
            HypergeometricParams::parse("1/2", "5/2", "3", "5/2"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn weights_are_positive_on_the_open_interval() {
        let d = 20;
        let jp_sets = [set1(), set2()];
        for i in 1..1000 {
            let x = mp(i as f64 / 1000.0, d);
            for p in &jp_sets {
                for which in [WeightChannel::One, WeightChannel::Two] {
                    assert!(jp_weight(p, which, &x).unwrap().to_f64() > 0.0);
                }
            }
            for which in [WeightChannel::One, WeightChannel::Two] {
                assert!(ll_weight_closed(which, &x).unwrap().to_f64() > 0.0);
            }
        }
    }

    #[test]
    fn classify_printed_examples() {
        let s1 = WeightSystem::JacobiPineiro(set1());
        assert_eq!(classify_chain(&s1).unwrap(), Classification::Recurrent);
        let s2 = WeightSystem::JacobiPineiro(set2());
        assert_eq!(classify_chain(&s2).unwrap(), Classification::Transient);
        let u = WeightSystem::Hypergeometric(HypergeometricParams::uniform_tuple());
        assert_eq!(classify_chain(&u).unwrap(), Classification::Transient);
    }

    #[test]
    fn classify_boundary_is_flagged_with_both_readings() {
        let p = JacobiPineiroParams::parse("-1/4", "-1/2", "0").unwrap();
        let c = classify_chain(&WeightSystem::JacobiPineiro(p)).unwrap();
        assert_eq!(
            c,
            Classification::BoundaryFlagged {
                integral_reading: Verdict::Recurrent,
                corollary_reading: Verdict::Transient,
            }
        );
    }

    #[test]
    fn classify_is_invariant_under_channel_swap() {
        for (a1, a2, a0) in [
            ("-1/4", "-1/2", "-1/2"),
            ("-1/4", "-1/2", "1/2"),
            ("1/3", "-1/3", "-1/4"),
            ("1/2", "-1/4", "3/4"),
            ("-1/4", "-1/2", "0"),
        ] {
            let p = JacobiPineiroParams::parse(a1, a2, a0).unwrap();
            let direct = classify_chain(&WeightSystem::JacobiPineiro(p.clone())).unwrap();
            let swapped = classify_chain(&WeightSystem::JacobiPineiro(p.swapped())).unwrap();
            assert_eq!(direct, swapped);
        }
    }

    #[test]
    fn classify_rejects_classical_systems() {
        let p = ClassicalJacobiParams::parse("0", "0").unwrap();
        assert!(matches!(
            classify_chain(&WeightSystem::ClassicalJacobi(p)),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn divergence_probe_grows_for_recurrent_and_stalls_for_transient() {
        // Per-level increment ratio tends to 2^{-α₀} (Jacobi–Piñeiro) or
        // 2^{1-δ} (hypergeometric): above 1 means the integral diverges.
        let incr_ratio = |probe: &[(f64, f64)]| {
            let n = probe.len();
            let last = probe[n - 1].1 - probe[n - 2].1;
            let prev = probe[n - 2].1 - probe[n - 3].1;
            last / prev
        };
        let d = 25;
        let rec = divergence_probe(&WeightSystem::JacobiPineiro(set1()), 12, d).unwrap();
        let r = incr_ratio(&rec);
        assert!((r - 2f64.powf(0.5)).abs() < 0.05, "α₀=-1/2 ratio → √2, got {r}");
        assert!(rec[11].1 / rec[8].1 > 1.5, "recurrent probe should keep growing");

        let tra = divergence_probe(&WeightSystem::JacobiPineiro(set2()), 12, d).unwrap();
        let r = incr_ratio(&tra);
        assert!((r - 2f64.powf(-0.5)).abs() < 0.05, "α₀=1/2 ratio → 1/√2, got {r}");

        let uni = divergence_probe(
            &WeightSystem::Hypergeometric(HypergeometricParams::uniform_tuple()),
            8,
            d,
        )
        .unwrap();
        let r = incr_ratio(&uni);
        assert!((r - 2f64.powf(-0.5)).abs() < 0.05, "δ=3/2 ratio → 1/√2, got {r}");
    }

    #[test]
    fn params_parse_decimals_and_fractions_alike() {
        let a = JacobiPineiroParams::parse("-0.25", "-0.5", "-0.5").unwrap();
        assert_eq!(a, set1());
        let h = HypergeometricParams::parse("4/3", "5/3", "2.0", "2.5").unwrap();
        assert!(h.is_uniform_tuple());
        assert_eq!(h.delta, ex("3/2"));
    }

    #[test]
    fn endpoint_ratio_limits_match_direct_weight_ratios() {
        let jp = WeightSystem::JacobiPineiro(set1());
        assert_eq!(jp.endpoint_ratio_limit().unwrap(), ex("1"));

        let ll = WeightSystem::Hypergeometric(HypergeometricParams::uniform_tuple());
        let rho = ll.endpoint_ratio_limit().unwrap();
        assert_eq!(rho, ex("6/5"));
        // Corroborate numerically just inside the endpoint: the series
        // factors there are 1 + O(1-x).
        let x = mp(1.0 - 1e-8, 30);
        let ratio = ll
            .weight(WeightChannel::Two, &x)
            .unwrap()
            .div(&ll.weight(WeightChannel::One, &x).unwrap());
        assert!((ratio.to_f64() - 1.2).abs() < 1e-6, "ratio={}", ratio.to_f64());

        let cls =
            WeightSystem::ClassicalJacobi(ClassicalJacobiParams::parse("-1/2", "-1/2").unwrap());
        assert!(matches!(cls.endpoint_ratio_limit(), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn classical_channel_two_is_rejected() {
        let sys = WeightSystem::ClassicalJacobi(ClassicalJacobiParams::parse("-1/2", "-1/2").unwrap());
        assert!(sys.weight(WeightChannel::One, &mp(0.5, 20)).is_ok());
        assert!(matches!(
            sys.weight(WeightChannel::Two, &mp(0.5, 20)),
            Err(Error::Domain(_))
        ));
    }
}
