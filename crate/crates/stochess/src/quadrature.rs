//! Gauss–Jacobi quadrature on `[0, 1]`.
//!
//! Rules come from the Golub–Welsch construction: the exact three-term
//! recurrence of the (monic, affinely shifted) Jacobi polynomials fills a
//! symmetric tridiagonal matrix whose eigenvalues are the nodes and whose
//! first eigenvector components square to the weights. The eigenproblem is
//! solved at guard precision by a QL sweep with implicit shifts.

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, PrecisionScalar, Scalar, MIN_DIGITS};
use crate::special::beta_mp;

/// Nodes and positive weights of an `n`-point Gauss rule on `[0, 1]` for the
/// weight `x^q (1-x)^p`; integrates polynomials exactly (to working
/// precision) through degree `degree_exact = 2n - 1`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<PrecisionScalar>,
    pub weights: Vec<PrecisionScalar>,
    pub jacobi_exponents: (ExactScalar, ExactScalar),
    pub degree_exact: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ f(xᵢ)`: the integral of `f` against this rule's weight function.
    pub fn integrate<F>(&self, mut f: F) -> PrecisionScalar
    where
        F: FnMut(&PrecisionScalar) -> PrecisionScalar,
    {
        let mut acc = self.weights[0].zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc.add(&w.mul(&f(x)));
        }
        acc
    }

    /// Affine image of this rule on `[a, b]`. Only meaningful for the flat
    /// weight (`p = q = 0`); Jacobi weights do not transport under the map.
    pub fn mapped_to(&self, a: &PrecisionScalar, b: &PrecisionScalar) -> Result<QuadratureRule> {
        if !self.jacobi_exponents.0.is_zero() || !self.jacobi_exponents.1.is_zero() {
            return Err(Error::Domain(
                "only the flat-weight rule (p = q = 0) can be remapped affinely".into(),
            ));
        }
        let span = b.sub(a);
        if span.to_f64() <= 0.0 {
            return Err(Error::Domain("mapped_to requires a < b".into()));
        }
        Ok(QuadratureRule {
            nodes: self.nodes.iter().map(|x| a.add(&span.mul(x))).collect(),
            weights: self.weights.iter().map(|w| span.mul(w)).collect(),
            jacobi_exponents: self.jacobi_exponents.clone(),
            degree_exact: self.degree_exact,
        })
    }
}

/// `n`-point Gauss rule on `[0, 1]` for the weight `x^q (1-x)^p`,
/// with `p, q > -1`. Weights are positive and sum to `B(q+1, p+1)`.
pub fn gauss_jacobi(
    n: usize,
    p: &ExactScalar,
    q: &ExactScalar,
    digits: u32,
) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Domain("quadrature rule needs at least one node".into()));
    }
    let neg_one = ExactScalar::int(-1);
    if *p <= neg_one || *q <= neg_one {
        return Err(Error::Domain(format!(
            "jacobi exponents must exceed -1, got p={p}, q={q}"
        )));
    }
    // Guard digits absorb the eigensolver's rounding; results are stamped
    // back at the caller's working precision.
    let work = digits.max(MIN_DIGITS) + 10;

    let (alpha, beta) = shifted_jacobi_recurrence(n, p, q);
    let mut d: Vec<PrecisionScalar> =
        alpha.iter().map(|a| PrecisionScalar::from_exact_digits(a, work)).collect();
    let mut e: Vec<PrecisionScalar> =
        beta.iter().map(|b| PrecisionScalar::from_exact_digits(b, work).sqrt()).collect();
    e.push(d[0].zero());

    // First row of the eigenvector matrix is all the weights need.
    let mut z0: Vec<PrecisionScalar> = vec![d[0].zero(); n];
    z0[0] = d[0].one();
    ql_implicit_row(&mut d, &mut e, &mut z0)?;

    let one = ExactScalar::one_v();
    let mass = beta_mp(
        &PrecisionScalar::from_exact_digits(&(q + &one), work),
        &PrecisionScalar::from_exact_digits(&(p + &one), work),
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].rug().partial_cmp(d[j].rug()).expect("finite eigenvalues"));

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &i in &order {
        let x = d[i].to_f64();
        if !(0.0 < x && x < 1.0) {
            return Err(Error::numeric(
                "eigen-solver produced a quadrature node outside (0,1)",
                0,
                Some(x),
            ));
        }
        let w = mass.mul(&z0[i].mul(&z0[i]));
        if w.to_f64() <= 0.0 {
            return Err(Error::numeric(
                "eigen-solver produced a nonpositive quadrature weight",
                0,
                Some(w.to_f64()),
            ));
        }
        nodes.push(PrecisionScalar::from_rug(d[i].rug().clone(), digits));
        weights.push(PrecisionScalar::from_rug(w.rug().clone(), digits));
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        jacobi_exponents: (p.clone(), q.clone()),
        degree_exact: 2 * n - 1,
    })
}

/// `∫₀¹ f(x) dx` for integrands with algebraic endpoint behavior of the
/// cube-root kind at 0 and square-root kind at 1 (the hypergeometric weight
/// family): substitutes `x = t³` on the left half and `x = 1 - s²` on the
/// right half, making both halves analytic, then applies Gauss–Legendre of
/// the given size to each.
pub fn integrate_unit_interval_endpoints<F>(
    mut f: F,
    n: usize,
    digits: u32,
) -> Result<PrecisionScalar>
where
    F: FnMut(&PrecisionScalar) -> PrecisionScalar,
{
    let zero_e = ExactScalar::zero_v();
    let rule = gauss_jacobi(n, &zero_e, &zero_e, digits + 5)?;
    let one = PrecisionScalar::from_i64_digits(1, digits + 5);
    let three = PrecisionScalar::from_i64_digits(3, digits + 5);
    let two = PrecisionScalar::from_i64_digits(2, digits + 5);
    let half = PrecisionScalar::from_exact_digits(&ExactScalar::ratio(1, 2), digits + 5);

    // Left: x = t³, t ∈ [0, 2^{-1/3}], dx = 3t² dt.
    let t_end = half.cbrt();
    let left_rule = rule.mapped_to(&PrecisionScalar::from_i64_digits(0, digits + 5), &t_end)?;
    let left = left_rule.integrate(|t| {
        let x = t.mul(t).mul(t);
        three.mul(&t.mul(t)).mul(&f(&x))
    });

    // Right: x = 1 - s², s ∈ [0, 2^{-1/2}], dx = 2s ds.
    let s_end = half.sqrt();
    let right_rule = rule.mapped_to(&PrecisionScalar::from_i64_digits(0, digits + 5), &s_end)?;
    let right = right_rule.integrate(|s| {
        let x = one.sub(&s.mul(s));
        two.mul(s).mul(&f(&x))
    });

    Ok(PrecisionScalar::from_rug(left.add(&right).rug().clone(), digits))
}

/// Exact monic recurrence for the weight `x^q (1-x)^p` on `[0, 1]`:
/// the classical `(1-t)^p (1+t)^q` coefficients on `[-1, 1]` carried through
/// `x = (t+1)/2` (diagonal `(a_k+1)/2`, subdiagonal `b_k/4`).
fn shifted_jacobi_recurrence(
    n: usize,
    p: &ExactScalar,
    q: &ExactScalar,
) -> (Vec<ExactScalar>, Vec<ExactScalar>) {
    let one = ExactScalar::one_v();
    let two = ExactScalar::int(2);
    let s = p + q;
    let mut alpha = Vec::with_capacity(n);
    let a0 = &(q - p) / &(&s + &two);
    alpha.push(&(&a0 + &one) / &two);
    for k in 1..n {
        let t = &(&two * &ExactScalar::int(k as i64)) + &s;
        let ak = &(&(q * q) - &(p * p)) / &(&t * &(&t + &two));
        alpha.push(&(&ak + &one) / &two);
    }
    let mut beta = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let bbar = if k == 1 {
            // Dedicated k = 1 form: finite for every p, q > -1, including
            // p + q = -1 where the generic expression is 0/0.
            let sp2 = &s + &two;
            &(&(p + &one) * &(q + &one)) / &(&(&sp2 * &sp2) * &(&s + &ExactScalar::int(3)))
        } else {
            let kk = ExactScalar::int(k as i64);
            let t = &(&two * &kk) + &s;
            let num = &(&kk * &(&kk + p)) * &(&(&kk + q) * &(&kk + &s));
            let den = &(&t * &t) * &(&(&t + &one) * &(&t - &one));
            &num / &den
        };
        beta.push(bbar);
    }
    (alpha, beta)
}

fn hypot_mp(a: &PrecisionScalar, b: &PrecisionScalar) -> PrecisionScalar {
    a.mul(a).add(&b.mul(b)).sqrt()
}

/// QL with implicit shifts on a symmetric tridiagonal matrix, rotating a
/// single accumulated row (`z0`) of the eigenvector matrix along with it.
/// `d` holds the diagonal, `e[i]` couples `i` and `i+1` (`e[n-1]` is
/// scratch). On return `d` holds eigenvalues in the order matching `z0`.
fn ql_implicit_row(
    d: &mut [PrecisionScalar],
    e: &mut [PrecisionScalar],
    z0: &mut [PrecisionScalar],
) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let bits = d[0].bits();
    let eps = {
        let mut t = rug::Float::with_val(bits, 1u32);
        t >>= bits - 8;
        t
    };
    let two = d[0].from_i64(2);

    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = rug::Float::with_val(
                    bits,
                    d[m].rug().clone().abs() + d[m + 1].rug().clone().abs(),
                );
                let thresh = rug::Float::with_val(bits, &dd * &eps);
                if e[m].rug().clone().abs() <= thresh {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::numeric(
                    "tridiagonal eigen-solver failed to converge",
                    0,
                    None,
                ));
            }

            let mut g = d[l + 1].sub(&d[l]).div(&two.mul(&e[l]));
            let mut r = hypot_mp(&g, &g.one());
            let denom = if g.to_f64() >= 0.0 { g.add(&r) } else { g.sub(&r) };
            g = d[m].sub(&d[l]).add(&e[l].div(&denom));
            let mut s = d[l].one();
            let mut c = d[l].one();
            let mut shift = d[l].zero();
            let mut restart = false;
            for i in (l..m).rev() {
                let f = s.mul(&e[i]);
                let b = c.mul(&e[i]);
                r = hypot_mp(&f, &g);
                e[i + 1] = r.clone();
                if r.is_zero() {
                    // Rare underflow split: drop the shift and retry the row.
                    d[i + 1] = d[i + 1].sub(&shift);
                    e[m] = d[l].zero();
                    restart = true;
                    break;
                }
                s = f.div(&r);
                c = g.div(&r);
                g = d[i + 1].sub(&shift);
                r = d[i].sub(&g).mul(&s).add(&two.mul(&c).mul(&b));
                shift = s.mul(&r);
                d[i + 1] = g.add(&shift);
                g = c.mul(&r).sub(&b);

                let fz = z0[i + 1].clone();
                z0[i + 1] = s.mul(&z0[i]).add(&c.mul(&fz));
                z0[i] = c.mul(&z0[i]).sub(&s.mul(&fz));
            }
            if restart {
                continue;
            }
            d[l] = d[l].sub(&shift);
            e[l] = g;
            e[m] = d[l].zero();
        }
    }
    Ok(())
}
