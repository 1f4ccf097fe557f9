//! The polynomials `q_n(eta)` generated by `N(t)^eta = sum q_n(eta) t^n / x_n!`
//! and the identities that cross-validate them.

use num_traits::{One, Zero};

use crate::error::{check_order, Error, Result};
use crate::model::{hermite_phi, DeformedModel, GeneratingFamily};
use crate::series::{
    binomial_q, complete_bell, factorial_q, partial_bell_table, poly_shift, series_exp_eta,
    usize_q, EtaPolynomial, Rational,
};

/// Largest `n` accepted by [`q_combinatorial_oracle`]; the multi-index
/// enumeration grows with the partition count of `n`.
pub const ORACLE_MAX_N: usize = 10;

/// A model together with its polynomials `q_0 .. q_N`.
#[derive(Clone, Debug)]
pub struct QFamily {
    model: DeformedModel,
    q: Vec<EtaPolynomial>,
}

impl QFamily {
    pub fn model(&self) -> &DeformedModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    pub fn q(&self, n: usize) -> &EtaPolynomial {
        &self.q[n]
    }

    pub fn polys(&self) -> &[EtaPolynomial] {
        &self.q
    }

    /// `q_k(eta)` for every `k <= n`.
    pub fn eval_all(&self, n: usize, eta: &Rational) -> Vec<Rational> {
        self.q[..=n].iter().map(|p| p.eval(eta)).collect()
    }
}

/// `q_n = x_n! [t^n] exp(eta F(t))`.
pub fn q_polynomials(model: &DeformedModel) -> QFamily {
    let exp_eta =
        series_exp_eta(&model.log_series()).expect("model seeds always have a zero constant term");
    let q = exp_eta
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.scale(model.xfact(n)))
        .collect();
    QFamily {
        model: model.clone(),
        q,
    }
}

/// Result of an identity checked for every `n` up to some bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub checked_up_to: usize,
    pub first_failure: Option<usize>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Verifies, as an exact polynomial identity,
/// `q_{n+1}(eta) = eta (x_{n+1}/(n+1)) sum_k [x_n; x_k] ((n-k+1)/x_{n-k+1}) q_k(eta - 1)`
/// for every `n < order`.
pub fn q_recurrence_check(qf: &QFamily) -> IdentityReport {
    let m = &qf.model;
    let order = m.order();
    let minus_one = -Rational::one();
    let shifted: Vec<EtaPolynomial> = qf.q.iter().map(|p| poly_shift(p, &minus_one)).collect();
    let eta = EtaPolynomial::eta();
    let mut first_failure = None;
    for n in 0..order {
        let mut sum = EtaPolynomial::zero();
        for (k, qk) in shifted.iter().enumerate().take(n + 1) {
            let w = m.deformed_binomial(n, k) * usize_q(n - k + 1) / m.x(n - k + 1);
            sum = &sum + &qk.scale(&w);
        }
        let rhs = (&eta * &sum).scale(&(m.x(n + 1) / usize_q(n + 1)));
        if rhs != qf.q[n + 1] {
            first_failure = Some(n + 1);
            break;
        }
    }
    IdentityReport {
        checked_up_to: order,
        first_failure,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalReport {
    /// `sum_k [x_n; x_k] q_k(z1) q_{n-k}(z2) == q_n(z1 + z2)`.
    pub relation: IdentityReport,
    /// The same statement for `q~_n = (n!/x_n!) q_n` with ordinary binomials.
    pub binomial_type: IdentityReport,
}

impl FunctionalReport {
    pub fn holds(&self) -> bool {
        self.relation.holds() && self.binomial_type.holds()
    }
}

pub fn q_functional_check(qf: &QFamily, z1: &Rational, z2: &Rational) -> FunctionalReport {
    let m = &qf.model;
    let order = m.order();
    let a = qf.eval_all(order, z1);
    let b = qf.eval_all(order, z2);
    let s = qf.eval_all(order, &(z1 + z2));
    let norm: Vec<Rational> = (0..=order).map(|n| factorial_q(n) / m.xfact(n)).collect();

    let mut relation = None;
    let mut binomial_type = None;
    for n in 0..=order {
        if relation.is_none() {
            let lhs = (0..=n)
                .map(|k| m.deformed_binomial(n, k) * &a[k] * &b[n - k])
                .fold(Rational::zero(), |acc, x| acc + x);
            if lhs != s[n] {
                relation = Some(n);
            }
        }
        if binomial_type.is_none() {
            let lhs = (0..=n)
                .map(|k| binomial_q(n, k) * &norm[k] * &a[k] * &norm[n - k] * &b[n - k])
                .fold(Rational::zero(), |acc, x| acc + x);
            if lhs != &norm[n] * &s[n] {
                binomial_type = Some(n);
            }
        }
    }
    FunctionalReport {
        relation: IdentityReport {
            checked_up_to: order,
            first_failure: relation,
        },
        binomial_type: IdentityReport {
            checked_up_to: order,
            first_failure: binomial_type,
        },
    }
}

/// Multiplicity vectors `(i_1, .., i_n)` with `sum s i_s = n`.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if part == 0 {
            return;
        }
        for mult in (0..=rest / part).rev() {
            cur[part - 1] = mult;
            go(rest - mult * part, part - 1, cur, out);
        }
        cur[part - 1] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    go(n, n, &mut cur, &mut out);
    out
}

/// Faa di Bruno expansion of `N(t)^eta` around `t = 0`:
/// `q_n = x_n! sum_m eta(eta-1)..(eta-m+1) sum_{I} prod_s (1/x_s!)^{i_s} / i_s!`,
/// the inner sum running over multiplicity vectors with `sum s i_s = n` and
/// `sum i_s = m`. Independent of the series route; used as a test oracle.
pub fn q_combinatorial_oracle(model: &DeformedModel, n: usize) -> Result<EtaPolynomial> {
    if n > ORACLE_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "combinatorial expansion is capped at n = {ORACLE_MAX_N}, got {n}"
        )));
    }
    check_order(n, model.order())?;
    if n == 0 {
        return Ok(EtaPolynomial::one());
    }
    let mut by_m = vec![Rational::zero(); n + 1];
    for mult in partitions(n) {
        let m: usize = mult.iter().sum();
        let term = mult
            .iter()
            .enumerate()
            .filter(|(_, &i)| i > 0)
            .map(|(s, &i)| model.invfact().coeff(s + 1).pow(i as i32) / factorial_q(i))
            .fold(Rational::one(), |acc, x| acc * x);
        by_m[m] += term;
    }
    let sum = by_m
        .iter()
        .enumerate()
        .skip(1)
        .fold(EtaPolynomial::zero(), |acc, (m, w)| {
            &acc + &EtaPolynomial::falling_factorial(m).scale(w)
        });
    Ok(sum.scale(model.xfact(n)))
}

/// Closed-form `q_n` of a named family.
pub fn q_closed_form(family: &GeneratingFamily, n: usize) -> Result<EtaPolynomial> {
    let one = Rational::one();
    match family {
        GeneratingFamily::Exponential => Ok(EtaPolynomial::eta().pow(n)),
        GeneratingFamily::QExponential(alpha) => {
            Ok((1..=n).fold(EtaPolynomial::one(), |acc, k| {
                let km1 = usize_q(k - 1);
                let factor = EtaPolynomial::new(vec![km1.clone(), alpha.clone()]);
                (&acc * &factor).scale(&(km1 + alpha).recip())
            }))
        }
        GeneratingFamily::AbelLambert(alpha) => {
            if n == 0 {
                return Ok(EtaPolynomial::one());
            }
            let shift = usize_q(n) / alpha;
            let base = EtaPolynomial::new(vec![shift.clone(), one.clone()]);
            let num = &EtaPolynomial::eta() * &base.pow(n - 1);
            Ok(num.scale(&(one + shift).pow(n as i32 - 1).recip()))
        }
        GeneratingFamily::HermiteGauss(a) => {
            // eta^n phi_n(a/eta) cleared to sum_m (a/2)^m eta^{n-m} / (m! (n-2m)!)
            let half = a / usize_q(2);
            let mut coeffs = vec![Rational::zero(); n + 1];
            for m in 0..=n / 2 {
                coeffs[n - m] += half.pow(m as i32) / (factorial_q(m) * factorial_q(n - 2 * m));
            }
            Ok(EtaPolynomial::new(coeffs).scale(&hermite_phi(n, a).recip()))
        }
        GeneratingFamily::Custom(_) => Err(Error::Unsupported(
            "custom seeds have no closed-form polynomials".into(),
        )),
    }
}

/// `q'_n(0) / x_n! == a_n` for all `1 <= n <= order`, i.e.
/// `ln N(t) = sum q'_n(0) t^n / x_n!`.
pub fn dlog_identity_check(qf: &QFamily) -> IdentityReport {
    let m = &qf.model;
    let first_failure = (1..=m.order()).find(|&n| qf.q[n].coeff(1) / m.xfact(n) != m.a(n));
    IdentityReport {
        checked_up_to: m.order(),
        first_failure,
    }
}

/// Bell-polynomial route: with `x_m = m! a_m`, the `eta^k` coefficient of
/// `q_n` is `B_{n,k}(x) / B_n(x)`.
pub fn q_bell(model: &DeformedModel, n: usize) -> Result<EtaPolynomial> {
    check_order(n, model.order())?;
    let args = bell_args(model, n);
    let table = partial_bell_table(n, &args);
    let total = complete_bell(&args);
    Ok(EtaPolynomial::new(
        table[n].iter().map(|b| b / &total).collect(),
    ))
}

/// `x_n! = n! / B_n(1! a_1, .., n! a_n)`.
pub fn xfact_bell(model: &DeformedModel, n: usize) -> Result<Rational> {
    check_order(n, model.order())?;
    Ok(factorial_q(n) / complete_bell(&bell_args(model, n)))
}

fn bell_args(model: &DeformedModel, n: usize) -> Vec<Rational> {
    (1..=n).map(|m| factorial_q(m) * model.a(m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, SeedSeries};
    use crate::series::{int, rat};
    use num_traits::Signed;

    fn qf(fam: GeneratingFamily, order: usize) -> QFamily {
        q_polynomials(&build_model(fam, order).unwrap())
    }

    #[test]
    fn exponential_gives_monomials() {
        let f = qf(GeneratingFamily::Exponential, 20);
        for n in 0..=20 {
            assert_eq!(f.q(n), &EtaPolynomial::eta().pow(n));
        }
    }

    #[test]
    fn qexp_second_polynomial() {
        let f = qf(GeneratingFamily::QExponential(int(2)), 6);
        assert_eq!(
            f.q(2),
            &EtaPolynomial::new(vec![int(0), rat(1, 3), rat(2, 3)])
        );
        assert_eq!(
            q_closed_form(&GeneratingFamily::QExponential(int(2)), 2).unwrap(),
            *f.q(2)
        );
    }

    #[test]
    fn abel_second_polynomial() {
        let f = qf(GeneratingFamily::AbelLambert(int(1)), 6);
        // eta (eta + 2) / 3
        assert_eq!(
            f.q(2),
            &EtaPolynomial::new(vec![int(0), rat(2, 3), rat(1, 3)])
        );
        assert_eq!(f.q(2).eval(&int(1)), int(1));
        assert_eq!(
            q_closed_form(&GeneratingFamily::AbelLambert(int(1)), 1).unwrap(),
            EtaPolynomial::eta()
        );
    }

    #[test]
    fn hermite_closed_form_second_polynomial() {
        let a = rat(1, 2);
        let expect = EtaPolynomial::new(vec![int(0), &a / (&a + int(1)), (&a + int(1)).recip()]);
        assert_eq!(
            q_closed_form(&GeneratingFamily::HermiteGauss(a.clone()), 2).unwrap(),
            expect
        );
        let oracle = q_combinatorial_oracle(
            &build_model(GeneratingFamily::HermiteGauss(a), 4).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(oracle, expect);
    }

    #[test]
    fn basic_invariants() {
        for fam in [
            GeneratingFamily::QExponential(rat(3, 2)),
            GeneratingFamily::AbelLambert(int(2)),
            GeneratingFamily::HermiteGauss(rat(1, 4)),
            GeneratingFamily::Custom(SeedSeries::new(vec![rat(1, 3), int(0), rat(2, 7), int(1)])),
        ] {
            let f = qf(fam, 18);
            assert_eq!(f.q(0), &EtaPolynomial::one());
            assert_eq!(f.q(1), &EtaPolynomial::eta());
            for n in 1..=18 {
                let p = f.q(n);
                assert_eq!(p.eval(&int(0)), int(0));
                assert_eq!(p.eval(&int(1)), int(1));
                assert_eq!(p.degree(), Some(n));
                assert!(p.coeffs().iter().all(|c| !c.is_negative()));
            }
        }
    }

    #[test]
    fn recurrence_holds() {
        for fam in [
            GeneratingFamily::Exponential,
            GeneratingFamily::QExponential(int(3)),
            GeneratingFamily::HermiteGauss(rat(1, 2)),
        ] {
            let r = q_recurrence_check(&qf(fam, 16));
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.checked_up_to, 16);
        }
    }

    #[test]
    fn recurrence_detects_tampering() {
        let mut f = qf(GeneratingFamily::QExponential(int(3)), 8);
        f.q[5] = f.q[5].scale(&rat(2, 1));
        assert_eq!(q_recurrence_check(&f).first_failure, Some(5));
    }

    #[test]
    fn functional_relation() {
        let f = qf(GeneratingFamily::AbelLambert(rat(3, 2)), 14);
        let eta = rat(2, 7);
        assert!(q_functional_check(&f, &eta, &(int(1) - &eta)).holds());
        assert!(q_functional_check(&f, &int(1), &int(1)).holds());
        assert!(q_functional_check(&f, &int(-1), &int(1)).holds());
        // q_n(0) = 0 for n >= 1
        for n in 1..=14 {
            assert!(f.q(n).eval(&int(0)).is_zero());
        }
    }

    #[test]
    fn oracle_and_closed_forms_agree_with_series() {
        for fam in [
            GeneratingFamily::Exponential,
            GeneratingFamily::QExponential(int(2)),
            GeneratingFamily::AbelLambert(rat(1, 3)),
            GeneratingFamily::HermiteGauss(rat(3, 4)),
        ] {
            let m = build_model(fam.clone(), 12).unwrap();
            let f = q_polynomials(&m);
            for n in 0..=12 {
                assert_eq!(&q_closed_form(&fam, n).unwrap(), f.q(n), "{fam} n={n}");
                assert_eq!(&q_bell(&m, n).unwrap(), f.q(n));
                assert_eq!(&xfact_bell(&m, n).unwrap(), m.xfact(n));
                if n <= ORACLE_MAX_N {
                    assert_eq!(&q_combinatorial_oracle(&m, n).unwrap(), f.q(n));
                }
            }
        }
    }

    #[test]
    fn oracle_limits() {
        let m = build_model(GeneratingFamily::Exponential, 20).unwrap();
        assert!(matches!(
            q_combinatorial_oracle(&m, 11),
            Err(Error::ResourceLimit(_))
        ));
        let small = build_model(GeneratingFamily::Exponential, 3).unwrap();
        assert!(matches!(
            q_combinatorial_oracle(&small, 5),
            Err(Error::Order { .. })
        ));
        assert_eq!(partitions(5).len(), 7);
        assert_eq!(partitions(10).len(), 42);
    }

    #[test]
    fn dlog_identity() {
        let exp = qf(GeneratingFamily::Exponential, 10);
        assert!(dlog_identity_check(&exp).holds());
        assert_eq!(exp.q(1).coeff(1), int(1));
        assert!((2..=10).all(|n| exp.q(n).coeff(1).is_zero()));

        let alpha = int(3);
        let q = qf(GeneratingFamily::QExponential(alpha.clone()), 12);
        assert!(dlog_identity_check(&q).holds());
        for n in 1..=12 {
            let expect = q.model().xfact(n) / (usize_q(n) * alpha.pow(n as i32 - 1));
            assert_eq!(q.q(n).coeff(1), expect);
        }

        let h = qf(GeneratingFamily::HermiteGauss(rat(1, 3)), 12);
        assert!(dlog_identity_check(&h).holds());
        assert_eq!(h.q(2).coeff(1), rat(1, 3) / rat(4, 3));
        assert!((3..=12).all(|n| h.q(n).coeff(1).is_zero()));
    }

    #[test]
    fn closed_form_rejects_custom() {
        let fam = GeneratingFamily::Custom(SeedSeries::new(vec![int(1)]));
        assert!(matches!(q_closed_form(&fam, 3), Err(Error::Unsupported(_))));
    }
}
