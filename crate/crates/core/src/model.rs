//! Deformed models: the seed series `F = ln N`, the sequence `x_n` and its
//! factorials `x_n!` derived from `N(t) = exp F(t) = sum t^n / x_n!`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{check_order, Error, Result};
use crate::qpoly::q_polynomials;
use crate::series::{factorial_q, series_exp, usize_q, PowerSeries, Rational};

/// Default truncation order for every series in a model.
pub const DEFAULT_ORDER: usize = 64;

/// Coefficients `(a_1, a_2, ..)` of `F(t) = sum_{n>=1} a_n t^n`. Indices
/// beyond the stored list are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSeries {
    a: Vec<Rational>,
}

impl SeedSeries {
    /// Stores `a_1, a_2, ..`; no validation happens here, see [`sigma0_check`].
    pub fn new(a: Vec<Rational>) -> Self {
        Self { a }
    }

    /// `a_n` for `n >= 1`.
    pub fn get(&self, n: usize) -> Rational {
        assert!(n >= 1, "seed coefficients start at a_1");
        self.a.get(n - 1).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.a
    }

    /// `F` as a power series of the given order.
    pub fn to_series(&self, order: usize) -> PowerSeries {
        PowerSeries::from_fn(order, |n| {
            if n == 0 {
                Rational::zero()
            } else {
                self.get(n)
            }
        })
    }
}

/// The generating function families with a closed form, plus arbitrary seeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratingFamily {
    /// `N(t) = e^t`, the ordinary binomial case.
    Exponential,
    /// `N(t) = (1 - t/alpha)^{-alpha}`, `alpha > 0`.
    QExponential(Rational),
    /// `N(t) = exp(-alpha W(-t/alpha))` with `W` the Lambert function, `alpha > 0`.
    AbelLambert(Rational),
    /// `N(t) = exp(t + a t^2 / 2)`, `0 < a < 1`.
    HermiteGauss(Rational),
    Custom(SeedSeries),
}

impl GeneratingFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential => Ok(()),
            Self::QExponential(alpha) | Self::AbelLambert(alpha) => {
                if alpha.is_positive() {
                    Ok(())
                } else {
                    Err(Error::InvalidFamily(format!(
                        "{} needs alpha > 0, got {alpha}",
                        self.name()
                    )))
                }
            }
            Self::HermiteGauss(a) => {
                if a.is_positive() && *a < Rational::one() {
                    Ok(())
                } else {
                    Err(Error::InvalidFamily(format!(
                        "hermite needs 0 < a < 1, got {a}"
                    )))
                }
            }
            Self::Custom(seed) => {
                let report = sigma0_check(seed);
                if report.accepted {
                    Ok(())
                } else {
                    Err(Error::InvalidFamily(report.reason))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponential => "exp",
            Self::QExponential(_) => "qexp",
            Self::AbelLambert(_) => "abel",
            Self::HermiteGauss(_) => "hermite",
            Self::Custom(_) => "custom",
        }
    }

    pub fn is_named(&self) -> bool {
        !matches!(self, Self::Custom(_))
    }

    /// Seed coefficient `a_n`, `n >= 1`.
    pub fn seed_coefficient(&self, n: usize) -> Rational {
        match self {
            Self::Exponential => {
                if n == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            // -alpha ln(1 - t/alpha)
            Self::QExponential(alpha) => (usize_q(n) * alpha.pow(n as i32 - 1)).recip(),
            // -alpha W(-t/alpha), from W(x) = sum (-n)^{n-1} x^n / n!
            Self::AbelLambert(alpha) => {
                usize_q(n).pow(n as i32 - 1) / (alpha.pow(n as i32 - 1) * factorial_q(n))
            }
            Self::HermiteGauss(a) => match n {
                1 => Rational::one(),
                2 => a / usize_q(2),
                _ => Rational::zero(),
            },
            Self::Custom(seed) => seed.get(n),
        }
    }

    pub fn seed(&self, order: usize) -> SeedSeries {
        match self {
            Self::Custom(seed) => SeedSeries::new(
                (1..=order.min(seed.len().max(1)))
                    .map(|n| seed.get(n))
                    .collect(),
            ),
            _ => SeedSeries::new((1..=order).map(|n| self.seed_coefficient(n)).collect()),
        }
    }

    /// The family at the parameter reached by log-scale invariance,
    /// `N(t, alpha)^eta = N(eta t, eta alpha)`.
    fn log_scaled(&self, eta: &Rational) -> std::result::Result<Self, String> {
        if !eta.is_positive() {
            return Err(format!("eta = {eta} does not scale to a legal parameter"));
        }
        match self {
            Self::Exponential => Ok(Self::Exponential),
            Self::QExponential(alpha) => Ok(Self::QExponential(alpha * eta)),
            Self::AbelLambert(alpha) => Ok(Self::AbelLambert(alpha * eta)),
            Self::HermiteGauss(a) => {
                // alpha = 1/a, so the scaled parameter is a/eta; a/eta = 1 is
                // accepted as the boundary of the legal range.
                let scaled = a / eta;
                if scaled <= Rational::one() {
                    Ok(Self::HermiteGauss(scaled))
                } else {
                    Err(format!("scaled parameter a/eta = {scaled} leaves (0, 1]"))
                }
            }
            Self::Custom(_) => Err("custom seeds carry no scale parameter".into()),
        }
    }
}

impl fmt::Display for GeneratingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential => write!(f, "exp"),
            Self::QExponential(alpha) => write!(f, "qexp(alpha={alpha})"),
            Self::AbelLambert(alpha) => write!(f, "abel(alpha={alpha})"),
            Self::HermiteGauss(a) => write!(f, "hermite(a={a})"),
            Self::Custom(seed) => write!(f, "custom({} coefficients)", seed.len()),
        }
    }
}

/// A family together with every quantity derived from `exp F` up to a fixed
/// truncation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedModel {
    family: GeneratingFamily,
    order: usize,
    seed: SeedSeries,
    invfact: PowerSeries,
    xfact: Vec<Rational>,
    x: Vec<Rational>,
}

impl DeformedModel {
    pub fn family(&self) -> &GeneratingFamily {
        &self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn seed(&self) -> &SeedSeries {
        &self.seed
    }

    /// `a_n` for `n >= 1`.
    pub fn a(&self, n: usize) -> Rational {
        self.seed.get(n)
    }

    /// `F = ln N` as a series.
    pub fn log_series(&self) -> PowerSeries {
        self.seed.to_series(self.order)
    }

    /// Coefficients `1/x_n!` of `N(t)`.
    pub fn invfact(&self) -> &PowerSeries {
        &self.invfact
    }

    pub fn xfact(&self, n: usize) -> &Rational {
        &self.xfact[n]
    }

    pub fn xfacts(&self) -> &[Rational] {
        &self.xfact
    }

    pub fn x(&self, n: usize) -> &Rational {
        &self.x[n]
    }

    pub fn xs(&self) -> &[Rational] {
        &self.x
    }

    /// Deformed binomial coefficient `x_n! / (x_k! x_{n-k}!)`.
    pub fn deformed_binomial(&self, n: usize, k: usize) -> Rational {
        &self.xfact[n] / (&self.xfact[k] * &self.xfact[n - k])
    }

    pub fn check_n(&self, n: usize) -> Result<()> {
        check_order(n, self.order)
    }
}

/// Builds the model for `family`, deriving `1/x_n!`, `x_n!` and `x_n` from
/// `exp F` to the given order.
pub fn build_model(family: GeneratingFamily, order: usize) -> Result<DeformedModel> {
    if order < 2 {
        return Err(Error::InvalidInput(format!(
            "truncation order must be at least 2, got {order}"
        )));
    }
    family.validate()?;
    let seed = family.seed(order);
    let invfact = series_exp(&seed.to_series(order))?;
    let xfact: Vec<Rational> = invfact.coeffs().iter().map(|c| c.recip()).collect();
    let mut x = Vec::with_capacity(order + 1);
    x.push(Rational::zero());
    for n in 1..=order {
        x.push(invfact.coeff(n - 1) / invfact.coeff(n));
    }
    Ok(DeformedModel {
        family,
        order,
        seed,
        invfact,
        xfact,
        x,
    })
}

/// `phi_n(a) = sum_{m <= n/2} (a/2)^m / (m! (n-2m)!)`, the reciprocal of the
/// Hermite family's `x_n!`.
pub fn hermite_phi(n: usize, a: &Rational) -> Rational {
    let half = a / usize_q(2);
    (0..=n / 2)
        .map(|m| half.pow(m as i32) / (factorial_q(m) * factorial_q(n - 2 * m)))
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// Rising factorial `(z)_n = z (z+1) ... (z+n-1)`.
pub fn pochhammer(z: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, k| acc * (z + usize_q(k)))
}

/// Closed-form `x_n!` of a named family.
pub fn closed_form_xfact(family: &GeneratingFamily, n: usize) -> Result<Rational> {
    match family {
        GeneratingFamily::Exponential => Ok(factorial_q(n)),
        GeneratingFamily::QExponential(alpha) => {
            Ok(alpha.pow(n as i32) * factorial_q(n) / pochhammer(alpha, n))
        }
        GeneratingFamily::AbelLambert(alpha) => {
            let e = n as i32 - 1;
            Ok(factorial_q(n) * alpha.pow(e) / (usize_q(n) + alpha).pow(e))
        }
        GeneratingFamily::HermiteGauss(a) => Ok(hermite_phi(n, a).recip()),
        GeneratingFamily::Custom(_) => Err(Error::Unsupported(
            "custom seeds have no closed-form factorial".into(),
        )),
    }
}

/// Outcome of the `Sigma_0` membership test on a seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma0Report {
    pub accepted: bool,
    /// First index `n` (1-based) violating `a_1 > 0` or `a_n >= 0`.
    pub first_offending: Option<usize>,
    pub reason: String,
}

pub fn sigma0_check(seed: &SeedSeries) -> Sigma0Report {
    let a1 = seed.get(1);
    if !a1.is_positive() {
        return Sigma0Report {
            accepted: false,
            first_offending: Some(1),
            reason: format!("a_1 must be positive, got {a1}"),
        };
    }
    for (i, an) in seed.as_slice().iter().enumerate().skip(1) {
        if an.is_negative() {
            return Sigma0Report {
                accepted: false,
                first_offending: Some(i + 1),
                reason: format!("a_{} must be non-negative, got {an}", i + 1),
            };
        }
    }
    Sigma0Report {
        accepted: true,
        first_offending: None,
        reason: "seed lies in Sigma_0".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaleInvariance {
    Holds,
    Violated,
    NotApplicable(String),
}

/// Checks `q_n(eta; alpha) == eta^n x_n(alpha)! / x_n(eta alpha)!`, the left
/// side from the series route and the right side from closed forms at the
/// scaled parameter.
pub fn log_scale_invariance_check(
    family: &GeneratingFamily,
    eta: &Rational,
    n: usize,
) -> Result<ScaleInvariance> {
    family.validate()?;
    let scaled = match family.log_scaled(eta) {
        Ok(f) => f,
        Err(reason) => return Ok(ScaleInvariance::NotApplicable(reason)),
    };
    let qf = q_polynomials(&build_model(family.clone(), n.max(2))?);
    let lhs = qf.q(n).eval(eta);
    let rhs = eta.pow(n as i32) * closed_form_xfact(family, n)? / closed_form_xfact(&scaled, n)?;
    Ok(if lhs == rhs {
        ScaleInvariance::Holds
    } else {
        ScaleInvariance::Violated
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat, series_log};

    #[test]
    fn qexp_alpha_two() {
        let m = build_model(GeneratingFamily::QExponential(int(2)), 8).unwrap();
        assert_eq!(m.x(2), &rat(4, 3));
        assert_eq!(m.xfact(2), &rat(4, 3));
        assert_eq!(m.x(1), &int(1));
        assert_eq!(m.x(0), &int(0));
    }

    #[test]
    fn abel_and_hermite_second_factorial() {
        let m = build_model(GeneratingFamily::AbelLambert(int(1)), 6).unwrap();
        assert_eq!(m.xfact(2), &rat(2, 3));
        for a in [rat(1, 4), rat(1, 2), rat(9, 10)] {
            let m = build_model(GeneratingFamily::HermiteGauss(a.clone()), 6).unwrap();
            assert_eq!(m.xfact(1), &int(1));
            assert_eq!(m.xfact(2), &(int(2) / (a + int(1))));
        }
    }

    #[test]
    fn exponential_reproduces_integers() {
        let m = build_model(GeneratingFamily::Exponential, 20).unwrap();
        for n in 0..=20 {
            assert_eq!(m.x(n), &usize_q(n));
            assert_eq!(m.xfact(n), &factorial_q(n));
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            closed_form_xfact(&GeneratingFamily::QExponential(int(2)), 2).unwrap(),
            rat(4, 3)
        );
        assert_eq!(
            closed_form_xfact(&GeneratingFamily::AbelLambert(int(1)), 3).unwrap(),
            rat(3, 8)
        );
        assert_eq!(
            closed_form_xfact(&GeneratingFamily::HermiteGauss(rat(1, 3)), 1).unwrap(),
            int(1)
        );
        assert!(matches!(
            closed_form_xfact(&GeneratingFamily::Custom(SeedSeries::new(vec![int(1)])), 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn closed_forms_match_series_for_named_families() {
        let families = [
            GeneratingFamily::Exponential,
            GeneratingFamily::QExponential(rat(1, 2)),
            GeneratingFamily::QExponential(int(3)),
            GeneratingFamily::AbelLambert(rat(5, 2)),
            GeneratingFamily::HermiteGauss(rat(1, 4)),
        ];
        for fam in families {
            let m = build_model(fam.clone(), 24).unwrap();
            for n in 0..=24 {
                assert_eq!(
                    &closed_form_xfact(&fam, n).unwrap(),
                    m.xfact(n),
                    "{fam} n={n}"
                );
            }
        }
    }

    #[test]
    fn qexp_x_approaches_alpha_monotonically() {
        let alpha = int(3);
        let m = build_model(GeneratingFamily::QExponential(alpha.clone()), 40).unwrap();
        let gaps: Vec<Rational> = (1..=40).map(|n| (m.x(n) - &alpha).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn seed_is_recovered_by_log() {
        for fam in [
            GeneratingFamily::QExponential(int(2)),
            GeneratingFamily::AbelLambert(int(1)),
            GeneratingFamily::HermiteGauss(rat(1, 2)),
        ] {
            let m = build_model(fam, 16).unwrap();
            assert_eq!(series_log(m.invfact()).unwrap(), m.log_series());
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            build_model(GeneratingFamily::QExponential(int(0)), 8),
            Err(Error::InvalidFamily(_))
        ));
        assert!(build_model(GeneratingFamily::AbelLambert(int(-1)), 8).is_err());
        assert!(build_model(GeneratingFamily::HermiteGauss(int(1)), 8).is_err());
        assert!(build_model(GeneratingFamily::HermiteGauss(int(0)), 8).is_err());
        assert!(matches!(
            build_model(GeneratingFamily::Exponential, 1),
            Err(Error::InvalidInput(_))
        ));
        let bad = SeedSeries::new(vec![int(1), rat(-1, 8)]);
        assert!(build_model(GeneratingFamily::Custom(bad), 8).is_err());
    }

    #[test]
    fn sigma0() {
        let ok = sigma0_check(&SeedSeries::new(vec![int(1), rat(1, 2), int(0)]));
        assert!(ok.accepted);
        let bad = sigma0_check(&SeedSeries::new(vec![int(1), rat(-1, 8), int(1)]));
        assert!(!bad.accepted);
        assert_eq!(bad.first_offending, Some(2));
        let zero_lead = sigma0_check(&SeedSeries::new(vec![int(0), int(1)]));
        assert_eq!(zero_lead.first_offending, Some(1));
        let q3 = GeneratingFamily::QExponential(int(3)).seed(20);
        assert!(sigma0_check(&q3).accepted);
    }

    #[test]
    fn custom_seed_is_zero_padded() {
        let fam = GeneratingFamily::Custom(SeedSeries::new(vec![int(2)]));
        let m = build_model(fam, 6).unwrap();
        assert_eq!(m.x(1), &rat(1, 2));
        assert_eq!(m.a(5), int(0));
        assert_eq!(m.log_series().order(), 6);
    }

    #[test]
    fn log_scale_invariance() {
        let q2 = GeneratingFamily::QExponential(int(2));
        assert_eq!(
            log_scale_invariance_check(&q2, &rat(1, 2), 2).unwrap(),
            ScaleInvariance::Holds
        );
        for fam in [
            GeneratingFamily::Exponential,
            GeneratingFamily::QExponential(rat(7, 3)),
            GeneratingFamily::AbelLambert(int(2)),
            GeneratingFamily::HermiteGauss(rat(1, 3)),
        ] {
            for n in 0..10 {
                assert_eq!(
                    log_scale_invariance_check(&fam, &int(1), n).unwrap(),
                    ScaleInvariance::Holds
                );
            }
        }
        let herm = GeneratingFamily::HermiteGauss(rat(1, 2));
        assert_eq!(
            log_scale_invariance_check(&herm, &rat(1, 2), 2).unwrap(),
            ScaleInvariance::Holds
        );
        assert!(matches!(
            log_scale_invariance_check(&herm, &rat(1, 4), 2).unwrap(),
            ScaleInvariance::NotApplicable(_)
        ));
        assert!(matches!(
            log_scale_invariance_check(&q2, &int(0), 3).unwrap(),
            ScaleInvariance::NotApplicable(_)
        ));
        let abel = GeneratingFamily::AbelLambert(int(3));
        for n in 1..8 {
            assert_eq!(
                log_scale_invariance_check(&abel, &rat(2, 5), n).unwrap(),
                ScaleInvariance::Holds
            );
        }
    }
}
