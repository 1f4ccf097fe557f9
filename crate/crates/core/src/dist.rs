//! The symmetric deformed binomial distribution
//! `p_k^(n)(eta) = x_n!/(x_k! x_{n-k}!) q_k(eta) q_{n-k}(1 - eta)`,
//! its moments, the coefficient `c_n` entering the variance, the
//! hypergeometric embedding and the large-`n` semicircle probe.
//!
//! Two evaluation modes exist. Exact mode takes a rational `eta` and returns
//! rational probabilities. Float mode works in the log domain through
//! log-gamma closed forms and is limited to the named families, which is
//! what makes `n` in the thousands reachable.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{hermite_phi, pochhammer, GeneratingFamily};
use crate::numeric::{compensated_sum, ln_choose, ln_gamma};
use crate::qpoly::QFamily;
use crate::series::{
    binomial, binomial_q, complete_bell, factorial_q, horner_f64, int, to_f64, usize_q,
    PowerSeries, Rational,
};

/// The running parameter: exact when given as `p/q`, float when decimal.
#[derive(Clone, Debug, PartialEq)]
pub enum Eta {
    Exact(Rational),
    Float(f64),
}

impl Eta {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => to_f64(r),
            Self::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }
}

impl FromStr for Eta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(['.', 'e', 'E']) {
            s.parse::<f64>()
                .map(Eta::Float)
                .map_err(|e| Error::InvalidInput(format!("eta `{s}`: {e}")))
        } else {
            s.parse::<Rational>()
                .map(Eta::Exact)
                .map_err(|e| Error::InvalidInput(format!("eta `{s}`: {e}")))
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(r) => write!(f, "{r}"),
            Self::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Probabilities {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// `(p_0, .., p_n)` for fixed `(n, eta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable {
    pub n: usize,
    pub eta: Eta,
    pub p: Probabilities,
}

impl DistributionTable {
    pub fn is_exact(&self) -> bool {
        matches!(self.p, Probabilities::Exact(_))
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        match &self.p {
            Probabilities::Exact(v) => Some(v),
            Probabilities::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match &self.p {
            Probabilities::Exact(v) => v.iter().map(to_f64).collect(),
            Probabilities::Float(v) => v.clone(),
        }
    }

    /// Mean, second moment and variance of `k` in floating point.
    pub fn float_moments(&self) -> FloatMoments {
        let p = self.to_f64();
        let mean = compensated_sum(p.iter().enumerate().map(|(k, pk)| k as f64 * pk));
        let second = compensated_sum(p.iter().enumerate().map(|(k, pk)| (k * k) as f64 * pk));
        let variance = compensated_sum(
            p.iter()
                .enumerate()
                .map(|(k, pk)| (k as f64 - mean).powi(2) * pk),
        );
        FloatMoments {
            mean,
            second_moment: second,
            variance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

fn check_unit(eta: &Rational) -> Result<()> {
    if eta.is_negative() || *eta > Rational::one() {
        Err(Error::Domain(format!("eta = {eta} lies outside [0, 1]")))
    } else {
        Ok(())
    }
}

fn check_unit_f64(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("eta = {eta} lies outside [0, 1]")))
    }
}

/// Exact distribution from the series-built polynomials.
pub fn pmf(qf: &QFamily, n: usize, eta: &Rational) -> Result<DistributionTable> {
    check_unit(eta)?;
    qf.model().check_n(n)?;
    let m = qf.model();
    let win = qf.eval_all(n, eta);
    let loss = qf.eval_all(n, &(Rational::one() - eta));
    let p = (0..=n)
        .map(|k| m.deformed_binomial(n, k) * &win[k] * &loss[n - k])
        .collect();
    Ok(DistributionTable {
        n,
        eta: Eta::Exact(eta.clone()),
        p: Probabilities::Exact(p),
    })
}

/// Float distribution from the series-built polynomials (any seed, `n <= order`).
pub fn pmf_float(qf: &QFamily, n: usize, eta: f64) -> Result<DistributionTable> {
    check_unit_f64(eta)?;
    qf.model().check_n(n)?;
    let m = qf.model();
    let polys: Vec<Vec<f64>> = qf.polys()[..=n].iter().map(|p| p.to_f64_coeffs()).collect();
    let p = (0..=n)
        .map(|k| {
            to_f64(&m.deformed_binomial(n, k))
                * horner_f64(&polys[k], eta)
                * horner_f64(&polys[n - k], 1.0 - eta)
        })
        .collect();
    Ok(DistributionTable {
        n,
        eta: Eta::Float(eta),
        p: Probabilities::Float(p),
    })
}

/// Exact distribution from a named family's closed form.
pub fn pmf_closed(
    family: &GeneratingFamily,
    n: usize,
    eta: &Rational,
) -> Result<DistributionTable> {
    check_unit(eta)?;
    family.validate()?;
    let one = Rational::one();
    let comp = &one - eta;
    let p: Vec<Rational> = match family {
        GeneratingFamily::Exponential => (0..=n)
            .map(|k| binomial_q(n, k) * eta.pow(k as i32) * comp.pow((n - k) as i32))
            .collect(),
        GeneratingFamily::QExponential(alpha) => {
            // C(n,k) (eta alpha)_k ((1-eta) alpha)_{n-k} / (alpha)_n
            let denom = pochhammer(alpha, n);
            let (wa, la) = (eta * alpha, &comp * alpha);
            (0..=n)
                .map(|k| binomial_q(n, k) * pochhammer(&wa, k) * pochhammer(&la, n - k) / &denom)
                .collect()
        }
        GeneratingFamily::AbelLambert(alpha) => {
            let g = |z: &Rational, k: usize| -> Rational {
                if k == 0 {
                    one.clone()
                } else {
                    z * (z + usize_q(k) / alpha).pow(k as i32 - 1)
                }
            };
            let denom = (&one + usize_q(n) / alpha).pow(n as i32 - 1);
            (0..=n)
                .map(|k| binomial_q(n, k) * g(eta, k) * g(&comp, n - k) / &denom)
                .collect()
        }
        GeneratingFamily::HermiteGauss(a) => {
            // z^k phi_k(a/z) = sum_m (a/2)^m z^{k-m} / (m! (k-2m)!), finite at z = 0
            let scaled = |z: &Rational, k: usize| -> Rational {
                let half = a / usize_q(2);
                (0..=k / 2)
                    .map(|m| {
                        half.pow(m as i32) * z.pow((k - m) as i32)
                            / (factorial_q(m) * factorial_q(k - 2 * m))
                    })
                    .fold(Rational::zero(), |acc, x| acc + x)
            };
            let denom = hermite_phi(n, a);
            (0..=n)
                .map(|k| scaled(eta, k) * scaled(&comp, n - k) / &denom)
                .collect()
        }
        GeneratingFamily::Custom(_) => {
            return Err(Error::Unsupported(
                "custom seeds have no closed-form distribution".into(),
            ))
        }
    };
    Ok(DistributionTable {
        n,
        eta: Eta::Exact(eta.clone()),
        p: Probabilities::Exact(p),
    })
}

/// `ln phi_k(b)` for `k = 0..=n` through `x_i = i / (1 + b x_{i-1})`,
/// `phi_k = 1 / prod x_i`.
fn ln_hermite_phi_table(n: usize, b: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut x_prev = 0.0;
    let mut acc = 0.0;
    for i in 1..=n {
        let x = if i == 1 {
            1.0
        } else {
            i as f64 / (1.0 + b * x_prev)
        };
        acc -= x.ln();
        out.push(acc);
        x_prev = x;
    }
    out
}

/// Log-probabilities `ln p_k` from a named family's closed form, evaluated
/// with log-gamma so that `n` may be large. Zero probabilities map to `-inf`.
pub fn pmf_log_closed(family: &GeneratingFamily, n: usize, eta: f64) -> Result<Vec<f64>> {
    check_unit_f64(eta)?;
    family.validate()?;
    if !family.is_named() {
        return Err(Error::Unsupported(
            "float closed forms exist only for named families".into(),
        ));
    }
    if eta == 0.0 || eta == 1.0 {
        let hit = if eta == 0.0 { 0 } else { n };
        return Ok((0..=n)
            .map(|k| if k == hit { 0.0 } else { f64::NEG_INFINITY })
            .collect());
    }
    let comp = 1.0 - eta;
    let out = match family {
        GeneratingFamily::Exponential => (0..=n)
            .map(|k| ln_choose(n, k) + k as f64 * eta.ln() + (n - k) as f64 * comp.ln())
            .collect(),
        GeneratingFamily::QExponential(alpha) => {
            let al = to_f64(alpha);
            let (wa, la) = (eta * al, comp * al);
            let base = ln_gamma(al) - ln_gamma(al + n as f64) - ln_gamma(wa) - ln_gamma(la);
            (0..=n)
                .map(|k| {
                    base + ln_choose(n, k) + ln_gamma(wa + k as f64) + ln_gamma(la + (n - k) as f64)
                })
                .collect()
        }
        GeneratingFamily::AbelLambert(alpha) => {
            let al = to_f64(alpha);
            let lg = |z: f64, k: usize| {
                if k == 0 {
                    0.0
                } else {
                    z.ln() + (k as f64 - 1.0) * (z + k as f64 / al).ln()
                }
            };
            let denom = (n as f64 - 1.0) * (1.0 + n as f64 / al).ln();
            (0..=n)
                .map(|k| ln_choose(n, k) + lg(eta, k) + lg(comp, n - k) - denom)
                .collect()
        }
        GeneratingFamily::HermiteGauss(a) => {
            let af = to_f64(a);
            let win = ln_hermite_phi_table(n, af / eta);
            let loss = ln_hermite_phi_table(n, af / comp);
            let total = ln_hermite_phi_table(n, af)[n];
            (0..=n)
                .map(|k| {
                    k as f64 * eta.ln() + (n - k) as f64 * comp.ln() + win[k] + loss[n - k] - total
                })
                .collect()
        }
        GeneratingFamily::Custom(_) => unreachable!(),
    };
    Ok(out)
}

/// Float distribution of a named family at arbitrary `n`.
pub fn pmf_float_closed(
    family: &GeneratingFamily,
    n: usize,
    eta: f64,
) -> Result<DistributionTable> {
    let p = pmf_log_closed(family, n, eta)?
        .into_iter()
        .map(f64::exp)
        .collect();
    Ok(DistributionTable {
        n,
        eta: Eta::Float(eta),
        p: Probabilities::Float(p),
    })
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentReport {
    pub n: usize,
    pub eta: Rational,
    pub mean: Rational,
    pub second_moment: Rational,
    pub variance: Rational,
    pub c_n: Rational,
}

/// Mean and second moment by direct summation over the exact distribution.
pub fn moments(qf: &QFamily, n: usize, eta: &Rational) -> Result<MomentReport> {
    let table = pmf(qf, n, eta)?;
    let p = table.exact().expect("exact table");
    let mean = p
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (k, pk)| acc + usize_q(k) * pk);
    let second_moment = p
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (k, pk)| acc + usize_q(k * k) * pk);
    let variance = &second_moment - &mean * &mean;
    Ok(MomentReport {
        n,
        eta: eta.clone(),
        mean,
        second_moment,
        variance,
        c_n: cn(qf, n)?.series_sum,
    })
}

/// `c_n` by every available route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnRoutes {
    pub n: usize,
    /// `sum_{m=1}^{n-1} m (n-m) [x_n; x_m] q'_m(0)`.
    pub series_sum: Rational,
    /// `x_n! [t^n] t^2 N'(t)^2 / N(t)`.
    pub generating: Rational,
    /// Bell form `(n!/B_n) sum_m m a_m B_{n-m} / (n-m-1)!`, with `B_k` the
    /// complete Bell polynomial of `(1! a_1, .., k! a_k)`.
    pub bell: Rational,
    /// Family closed form, when one exists.
    pub closed: Option<Rational>,
}

impl CnRoutes {
    /// The common value when every route agrees.
    pub fn agreed(&self) -> Option<&Rational> {
        let ok = self.series_sum == self.generating
            && self.series_sum == self.bell
            && self.closed.as_ref().is_none_or(|c| *c == self.series_sum);
        ok.then_some(&self.series_sum)
    }
}

pub fn cn(qf: &QFamily, n: usize) -> Result<CnRoutes> {
    let m = qf.model();
    m.check_n(n)?;
    if n < 2 {
        let zero = Rational::zero();
        return Ok(CnRoutes {
            n,
            series_sum: zero.clone(),
            generating: zero.clone(),
            bell: zero.clone(),
            closed: m.family().is_named().then_some(zero),
        });
    }

    let series_sum = (1..n)
        .map(|j| usize_q(j * (n - j)) * m.deformed_binomial(n, j) * qf.q(j).coeff(1))
        .fold(Rational::zero(), |acc, x| acc + x);

    let big_n = m.invfact().truncate(n - 1);
    let d = big_n.derivative();
    let s = d.mul(&d).mul(&big_n.reciprocal()?.truncate(n - 2));
    let generating = m.xfact(n) * s.coeff(n - 2);

    let args: Vec<Rational> = (1..=n).map(|j| factorial_q(j) * m.a(j)).collect();
    let bell_sum = (1..n)
        .map(|j| usize_q(j) * m.a(j) * complete_bell(&args[..n - j]) / factorial_q(n - j - 1))
        .fold(Rational::zero(), |acc, x| acc + x);
    let bell = factorial_q(n) / complete_bell(&args) * bell_sum;

    Ok(CnRoutes {
        n,
        series_sum,
        generating,
        bell,
        closed: cn_closed(m.family(), n).ok(),
    })
}

/// Closed-form `c_n` of a named family.
pub fn cn_closed(family: &GeneratingFamily, n: usize) -> Result<Rational> {
    if n < 2 {
        return Ok(Rational::zero());
    }
    let nn1 = usize_q(n * (n - 1));
    match family {
        GeneratingFamily::Exponential => Ok(nn1),
        GeneratingFamily::QExponential(alpha) => Ok(nn1 * alpha / (Rational::one() + alpha)),
        GeneratingFamily::AbelLambert(alpha) => Ok(nn1 * alpha
            / (usize_q(n) + alpha).pow(n as i32 - 1)
            * t_polynomial(n - 2, &(alpha + int(2)))),
        GeneratingFamily::HermiteGauss(a) => {
            Ok(nn1 - a * hermite_phi(n - 2, a) / hermite_phi(n, a))
        }
        GeneratingFamily::Custom(_) => Err(Error::Unsupported(
            "custom seeds have no closed-form c_n".into(),
        )),
    }
}

/// `eta (1 - eta) (n^2 - c_n)`.
pub fn variance(qf: &QFamily, n: usize, eta: &Rational) -> Result<Rational> {
    let c = cn(qf, n)?.series_sum;
    Ok(eta * (Rational::one() - eta) * (usize_q(n * n) - c))
}

/// Family-specific variance formulas, exact.
pub fn variance_closed(family: &GeneratingFamily, n: usize, eta: &Rational) -> Result<Rational> {
    family.validate()?;
    let w = eta * (Rational::one() - eta);
    let nq = usize_q(n);
    if n == 0 {
        return Ok(Rational::zero());
    }
    match family {
        GeneratingFamily::Exponential => Ok(nq * w),
        GeneratingFamily::QExponential(alpha) => {
            Ok(&nq * &nq * w * (Rational::one() + alpha / &nq) / (Rational::one() + alpha))
        }
        GeneratingFamily::AbelLambert(alpha) => {
            if n < 2 {
                return Ok(w);
            }
            let corr = usize_q(n - 1) / &nq * alpha / (&nq + alpha).pow(n as i32 - 1)
                * t_polynomial(n - 2, &(alpha + int(2)));
            Ok(&nq * &nq * w * (Rational::one() - corr))
        }
        GeneratingFamily::HermiteGauss(a) => {
            if n < 2 {
                return Ok(w);
            }
            let ratio = hermite_phi(n - 2, a) / hermite_phi(n, a);
            Ok(&nq * w * (Rational::one() + a / &nq * ratio))
        }
        GeneratingFamily::Custom(_) => Err(Error::Unsupported(
            "custom seeds have no closed-form variance".into(),
        )),
    }
}

/// Closed-form variance in floating point, usable at large `n`.
pub fn variance_float(family: &GeneratingFamily, n: usize, eta: f64) -> Result<f64> {
    check_unit_f64(eta)?;
    family.validate()?;
    let w = eta * (1.0 - eta);
    let nf = n as f64;
    if n < 2 {
        return Ok(w * nf * nf);
    }
    match family {
        GeneratingFamily::Exponential => Ok(nf * w),
        GeneratingFamily::QExponential(alpha) => {
            let al = to_f64(alpha);
            Ok(nf * nf * w * (1.0 + al / nf) / (1.0 + al))
        }
        GeneratingFamily::AbelLambert(alpha) => {
            // c_n / (n (n-1)) = alpha sum_{k<=n-2} (n-2)!/k! (n+alpha)^{k-n+1}
            let al = to_f64(alpha);
            let l = (nf + al).ln();
            let s = compensated_sum((0..=n - 2).map(|k| {
                (ln_gamma(nf - 1.0) - ln_gamma(k as f64 + 1.0) + (k as f64 - nf + 1.0) * l).exp()
            }));
            let c = nf * (nf - 1.0) * al * s;
            Ok(w * (nf * nf - c))
        }
        GeneratingFamily::HermiteGauss(a) => {
            // a phi_{n-2}/phi_n = a x_n x_{n-1}
            let af = to_f64(a);
            let mut x_prev = 1.0;
            let mut x = 1.0;
            for i in 2..=n {
                x_prev = x;
                x = i as f64 / (1.0 + af * x_prev);
            }
            Ok(w * (nf + af * x * x_prev))
        }
        GeneratingFamily::Custom(_) => Err(Error::Unsupported(
            "custom seeds have no closed-form variance".into(),
        )),
    }
}

/// `T_n(z) = n! sum_{k=0}^n (z+n)^k / k!`, equivalently `e^{z+n} Gamma(n+1, z+n)`.
pub fn t_polynomial(n: usize, z: &Rational) -> Rational {
    let base = z + usize_q(n);
    let sum = (0..=n)
        .map(|k| base.pow(k as i32) / factorial_q(k))
        .fold(Rational::zero(), |acc, x| acc + x);
    factorial_q(n) * sum
}

// ---------------------------------------------------------------------------
// Hypergeometric embedding
// ---------------------------------------------------------------------------

/// The hypergeometric law computed twice: by counting, and through the
/// deformed machinery with `x_j = N j / (N - j + 1)` and the q-exponential
/// polynomials continued to `alpha = -N` at `eta = m / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypergeometricEmbedding {
    pub counting: DistributionTable,
    pub deformed: Vec<Rational>,
}

impl HypergeometricEmbedding {
    pub fn agrees(&self) -> bool {
        self.counting.exact() == Some(self.deformed.as_slice())
    }
}

pub fn hypergeometric_embed(
    population: usize,
    successes: usize,
    draws: usize,
) -> Result<HypergeometricEmbedding> {
    let (big_n, m, n) = (population, successes, draws);
    if big_n == 0 || m > big_n || n > big_n {
        return Err(Error::Domain(format!(
            "need 1 <= N, 0 <= m <= N, 0 <= n <= N; got N = {big_n}, m = {m}, n = {n}"
        )));
    }
    let total = binomial(big_n, n);
    let counting: Vec<Rational> = (0..=n)
        .map(|k| Rational::new(binomial(m, k) * binomial(big_n - m, n - k), total.clone()))
        .collect();

    let nq = usize_q(big_n);
    let x = |j: usize| &nq * usize_q(j) / usize_q(big_n + 1 - j);
    let xfact: Vec<Rational> = (0..=n)
        .scan(Rational::one(), |acc, j| {
            if j > 0 {
                *acc = &*acc * x(j);
            }
            Some(acc.clone())
        })
        .collect();
    // (alpha eta)_j / (alpha)_j with alpha = -N
    let alpha = -nq.clone();
    let q = |eta: &Rational, j: usize| pochhammer(&(&alpha * eta), j) / pochhammer(&alpha, j);
    let eta = usize_q(m) / &nq;
    let comp = Rational::one() - &eta;
    let deformed = (0..=n)
        .map(|k| &xfact[n] / (&xfact[k] * &xfact[n - k]) * q(&eta, k) * q(&comp, n - k))
        .collect();

    Ok(HypergeometricEmbedding {
        counting: DistributionTable {
            n,
            eta: Eta::Exact(eta),
            p: Probabilities::Exact(counting),
        },
        deformed,
    })
}

// ---------------------------------------------------------------------------
// Semicircle probe
// ---------------------------------------------------------------------------

/// How the lattice points `s_k` are turned into a histogram density.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Binning {
    /// Each point's mass is spread uniformly over its lattice cell
    /// `[s_k - d/2, s_k + d/2]` and split between the bins it overlaps.
    #[default]
    LatticeCell,
    /// Each point's whole mass goes to the bin containing `s_k`. Aliases
    /// when the number of lattice points per bin is small.
    PointMass,
}

pub const SEMICIRCLE_HALF_RANGE: f64 = 1.05;
pub const DEFAULT_BINS: usize = 101;

#[derive(Clone, Debug, PartialEq)]
pub struct WignerProbe {
    pub n: usize,
    /// `w = 2 sqrt(Var(k/n))`, the rescaling that gives the semicircle unit radius.
    pub width: f64,
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    /// Mean semicircle density over each bin.
    pub reference: Vec<f64>,
    pub sup_distance: f64,
}

/// Cumulative distribution of the unit semicircle law `(2/pi) sqrt(1 - s^2)`.
pub fn semicircle_cdf(s: f64) -> f64 {
    if s <= -1.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        0.5 + (s * (1.0 - s * s).sqrt() + s.asin()) / std::f64::consts::PI
    }
}

/// Rescales the `eta = 1/2` q-exponential distribution by its own variance
/// and measures the sup distance between its histogram density and the unit
/// semicircle.
pub fn wigner_limit_probe(
    family: &GeneratingFamily,
    n: usize,
    bins: usize,
    binning: Binning,
) -> Result<WignerProbe> {
    if !matches!(family, GeneratingFamily::QExponential(_)) {
        return Err(Error::Unsupported(format!(
            "the semicircle probe applies to the q-exponential family only, got {family}"
        )));
    }
    if n == 0 || bins == 0 {
        return Err(Error::InvalidInput(
            "need n >= 1 and at least one bin".into(),
        ));
    }
    let p = pmf_float_closed(family, n, 0.5)?.to_f64();
    let nf = n as f64;
    let mean = compensated_sum(p.iter().enumerate().map(|(k, pk)| k as f64 / nf * pk));
    let var = compensated_sum(
        p.iter()
            .enumerate()
            .map(|(k, pk)| (k as f64 / nf - mean).powi(2) * pk),
    );
    let width = 2.0 * var.sqrt();
    let lo = -SEMICIRCLE_HALF_RANGE;
    let h = 2.0 * SEMICIRCLE_HALF_RANGE / bins as f64;
    let cell = 1.0 / (nf * width);
    let mut mass = vec![0.0; bins];
    for (k, pk) in p.iter().enumerate() {
        let s = (k as f64 / nf - 0.5) / width;
        match binning {
            Binning::PointMass => {
                let idx = ((s - lo) / h).floor();
                if idx >= 0.0 && (idx as usize) < bins {
                    mass[idx as usize] += pk;
                }
            }
            Binning::LatticeCell => {
                let (a, b) = (s - 0.5 * cell, s + 0.5 * cell);
                let first = (((a - lo) / h).floor().max(0.0)) as usize;
                let last = (((b - lo) / h).floor().min(bins as f64 - 1.0)).max(-1.0);
                if last < 0.0 {
                    continue;
                }
                for (i, slot) in mass
                    .iter_mut()
                    .enumerate()
                    .take(last as usize + 1)
                    .skip(first)
                {
                    let (e0, e1) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
                    let overlap = (b.min(e1) - a.max(e0)).max(0.0);
                    *slot += pk * overlap / cell;
                }
            }
        }
    }
    let centers: Vec<f64> = (0..bins).map(|i| lo + (i as f64 + 0.5) * h).collect();
    let density: Vec<f64> = mass.iter().map(|m| m / h).collect();
    let reference: Vec<f64> = (0..bins)
        .map(|i| {
            let (e0, e1) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
            (semicircle_cdf(e1) - semicircle_cdf(e0)) / h
        })
        .collect();
    let sup_distance = density
        .iter()
        .zip(&reference)
        .map(|(d, r)| (d - r).abs())
        .fold(0.0, f64::max);
    Ok(WignerProbe {
        n,
        width,
        centers,
        density,
        reference,
        sup_distance,
    })
}

/// Exact `t^n` coefficients of `t^2 N'(t)^2 / N(t)` times `x_n!`; exposed for
/// reporting the generating-function route over a whole range.
pub fn cn_generating_series(qf: &QFamily) -> Result<Vec<Rational>> {
    let m = qf.model();
    let order = m.order();
    let big_n: &PowerSeries = m.invfact();
    let d = big_n.derivative();
    let s = d.mul(&d).mul(&big_n.reciprocal()?);
    Ok((0..=order)
        .map(|n| {
            if n < 2 {
                Rational::zero()
            } else {
                m.xfact(n) * s.coeff(n - 2)
            }
        })
        .collect())
}
