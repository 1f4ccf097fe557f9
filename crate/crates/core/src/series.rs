//! Exact power-series and polynomial arithmetic over the rationals.
//!
//! Two kinds of objects live here:
//!
//! * [`PowerSeries`] holds a truncated series in `t` with rational
//!   coefficients. Its order is fixed at construction and binary operations
//!   use the smaller of the two orders; nothing ever silently extends it.
//! * [`EtaPolynomial`] holds a polynomial in the running parameter `eta`.
//!   [`EtaPowerSeries`] is a series in `t` whose coefficients are such
//!   polynomials, which is how `exp(eta * F(t))` is represented exactly.
//!
//! Bell polynomials follow the standard exponential convention
//! `exp(sum x_m t^m / m!) = sum B_n(x_1, .., x_n) t^n / n!`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn usize_q(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_q(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_q(n: usize, k: usize) -> Rational {
    Rational::from_integer(binomial(n, k))
}

/// Nearest `f64` to an exact rational. Saturates to +-inf or 0 when the value
/// is outside the double range.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Natural logarithm of a positive rational, accurate even when the value
/// itself under- or overflows `f64`.
pub fn ln_rational(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// PowerSeries
// ---------------------------------------------------------------------------

/// Truncated power series `sum_{n=0}^{order} c_n t^n` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Builds a series whose order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "a power series needs at least the constant coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Drops every coefficient above `order`. Never extends.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| &self.coeffs[n] + &other.coeffs[n])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| {
            (0..=n)
                .filter(|&k| !self.coeffs[k].is_zero() && !other.coeffs[n - k].is_zero())
                .map(|k| &self.coeffs[k] * &other.coeffs[n - k])
                .fold(Rational::zero(), |acc, x| acc + x)
        })
    }

    /// Formal derivative. The result is known to one order less.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |n| &self.coeffs[n + 1] * usize_q(n + 1))
    }

    /// Multiplies by `t^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        Self::from_fn(self.order(), |n| {
            if n < k {
                Rational::zero()
            } else {
                self.coeffs[n - k].clone()
            }
        })
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::InvalidInput(
                "cannot invert a series with zero constant term".into(),
            ));
        }
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..=self.order() {
            let s = (1..=n)
                .filter(|&k| !self.coeffs[k].is_zero())
                .map(|k| &self.coeffs[k] * &out[n - k])
                .fold(Rational::zero(), |acc, x| acc + x);
            out.push(-s * &inv0);
        }
        Ok(Self { coeffs: out })
    }
}

// ---------------------------------------------------------------------------
// EtaPolynomial
// ---------------------------------------------------------------------------

/// Polynomial in `eta` with exact coefficients; index `k` is the coefficient
/// of `eta^k`. Trailing zeros are always trimmed, so the zero polynomial has
/// no coefficients at all.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EtaPolynomial {
    coeffs: Vec<Rational>,
}

impl EtaPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The monomial `eta`.
    pub fn eta() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `eta (eta - 1) ... (eta - m + 1)`.
    pub fn falling_factorial(m: usize) -> Self {
        (0..m).fold(Self::one(), |acc, j| {
            &acc * &Self::new(vec![-usize_q(j), Rational::one()])
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `eta^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, eta: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * eta + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn eval_f64(&self, eta: f64) -> f64 {
        horner_f64(&self.to_f64_coeffs(), eta)
    }

    /// `p(scale * eta + offset)` as a polynomial.
    pub fn compose_linear(&self, scale: &Rational, offset: &Rational) -> Self {
        let lin = Self::new(vec![offset.clone(), scale.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * &lin) + &Self::constant(c.clone())
        })
    }

    /// `p(1 - eta)`.
    pub fn reflect(&self) -> Self {
        self.compose_linear(&-Rational::one(), &Rational::one())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * usize_q(k))
                .collect(),
        )
    }

    /// Exact `int_0^1 p(eta) d eta`.
    pub fn integrate_unit(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, c)| acc + c / usize_q(k + 1))
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }
}

pub fn horner_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl Add for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn add(self, rhs: &EtaPolynomial) -> EtaPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        EtaPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn sub(self, rhs: &EtaPolynomial) -> EtaPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        EtaPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn neg(self) -> EtaPolynomial {
        EtaPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &EtaPolynomial {
    type Output = EtaPolynomial;
    fn mul(self, rhs: &EtaPolynomial) -> EtaPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return EtaPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        EtaPolynomial::new(out)
    }
}

impl fmt::Display for EtaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})η")?,
                _ => write!(f, "({c})η^{k}")?,
            }
        }
        Ok(())
    }
}

/// Series in `t` whose coefficients are polynomials in `eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaPowerSeries {
    coeffs: Vec<EtaPolynomial>,
}

impl EtaPowerSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &EtaPolynomial {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[EtaPolynomial] {
        &self.coeffs
    }

    /// Substitutes a value for `eta`, producing an ordinary series.
    pub fn eval(&self, eta: &Rational) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|p| p.eval(eta)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// exp / log
// ---------------------------------------------------------------------------

fn require_zero_constant(f: &PowerSeries) -> Result<()> {
    if f.coeffs[0].is_zero() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "exponent series must have zero constant term, got {}",
            f.coeffs[0]
        )))
    }
}

/// `G = exp(F)` for `F` with zero constant term, via
/// `n G_n = sum_{k=1..n} k F_k G_{n-k}`.
pub fn series_exp(f: &PowerSeries) -> Result<PowerSeries> {
    require_zero_constant(f)?;
    let kf: Vec<Rational> = (0..=f.order()).map(|k| &f.coeffs[k] * usize_q(k)).collect();
    let mut g: Vec<Rational> = Vec::with_capacity(f.order() + 1);
    g.push(Rational::one());
    for n in 1..=f.order() {
        let s = (1..=n)
            .filter(|&k| !kf[k].is_zero())
            .map(|k| &kf[k] * &g[n - k])
            .fold(Rational::zero(), |acc, x| acc + x);
        g.push(s / usize_q(n));
    }
    Ok(PowerSeries { coeffs: g })
}

/// `exp(eta F(t))` with polynomial-in-`eta` coefficients, via
/// `n c_n(eta) = eta sum_{k=1..n} k F_k c_{n-k}(eta)`.
pub fn series_exp_eta(f: &PowerSeries) -> Result<EtaPowerSeries> {
    require_zero_constant(f)?;
    let mut c: Vec<EtaPolynomial> = Vec::with_capacity(f.order() + 1);
    c.push(EtaPolynomial::one());
    for n in 1..=f.order() {
        // accumulate sum_k (k F_k / n) c_{n-k}, then multiply by eta (shift)
        let mut acc = vec![Rational::zero(); n];
        for k in 1..=n {
            if f.coeffs[k].is_zero() {
                continue;
            }
            let w = &f.coeffs[k] * usize_q(k) / usize_q(n);
            for (i, v) in c[n - k].coeffs.iter().enumerate() {
                acc[i] += &w * v;
            }
        }
        let mut shifted = Vec::with_capacity(n + 1);
        shifted.push(Rational::zero());
        shifted.extend(acc);
        c.push(EtaPolynomial::new(shifted));
    }
    Ok(EtaPowerSeries { coeffs: c })
}

/// `ln G` for `G` with constant term one.
pub fn series_log(g: &PowerSeries) -> Result<PowerSeries> {
    if !g.coeffs[0].is_one() {
        return Err(Error::InvalidInput(format!(
            "logarithm needs constant term 1, got {}",
            g.coeffs[0]
        )));
    }
    // n G_n = sum_{k=1..n} k F_k G_{n-k}, solved for F_n
    let mut kf: Vec<Rational> = vec![Rational::zero()];
    for n in 1..=g.order() {
        let s = (1..n)
            .filter(|&k| !kf[k].is_zero())
            .map(|k| &kf[k] * &g.coeffs[n - k])
            .fold(Rational::zero(), |acc, x| acc + x);
        kf.push(&g.coeffs[n] * usize_q(n) - s);
    }
    Ok(PowerSeries {
        coeffs: kf
            .into_iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { v } else { v / usize_q(k) })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// Bell polynomials
// ---------------------------------------------------------------------------

/// Complete exponential Bell polynomial `B_n(x_1, .., x_n)` with `n = args.len()`.
pub fn complete_bell(args: &[Rational]) -> Rational {
    let n = args.len();
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 0..n {
        // B_{m+1} = sum_{i=0..m} C(m, i) B_{m-i} x_{i+1}
        let s = (0..=m)
            .map(|i| binomial_q(m, i) * &b[m - i] * &args[i])
            .fold(Rational::zero(), |acc, x| acc + x);
        b.push(s);
    }
    b.pop().unwrap()
}

/// Partial exponential Bell polynomial `B_{n,k}(x_1, .., x_{n-k+1})`.
pub fn partial_bell(n: usize, k: usize, args: &[Rational]) -> Result<Rational> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "partial Bell polynomial needs 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if args.len() < n - k + 1 {
        return Err(Error::InvalidInput(format!(
            "B_{{{n},{k}}} needs {} arguments, got {}",
            n - k + 1,
            args.len()
        )));
    }
    Ok(partial_bell_table(n, args)[n][k].clone())
}

/// Table `T[m][j] = B_{m,j}` for `0 <= j <= m <= n`, using
/// `B_{m,j} = sum_{i=1..m-j+1} C(m-1, i-1) x_i B_{m-i,j-1}`.
pub(crate) fn partial_bell_table(n: usize, args: &[Rational]) -> Vec<Vec<Rational>> {
    let mut t: Vec<Vec<Rational>> = vec![vec![Rational::one()]];
    for m in 1..=n {
        let mut row = vec![Rational::zero(); m + 1];
        for (j, slot) in row.iter_mut().enumerate().skip(1) {
            let mut s = Rational::zero();
            for i in 1..=(m + 1 - j) {
                let prev = &t[m - i];
                if j > prev.len() || prev[j - 1].is_zero() {
                    continue;
                }
                let Some(x) = args.get(i - 1) else { continue };
                if x.is_zero() {
                    continue;
                }
                s += binomial_q(m - 1, i - 1) * x * &prev[j - 1];
            }
            *slot = s;
        }
        t.push(row);
    }
    t
}

pub fn poly_eval(p: &EtaPolynomial, eta: &Rational) -> Rational {
    p.eval(eta)
}

/// `p(eta + s)` as a polynomial identity.
pub fn poly_shift(p: &EtaPolynomial, s: &Rational) -> EtaPolynomial {
    p.compose_linear(&Rational::one(), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[Rational]) -> PowerSeries {
        PowerSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn exp_of_t() {
        let f = series(&[int(0), int(1), int(0), int(0), int(0)]);
        let g = series_exp(&f).unwrap();
        assert_eq!(
            g.coeffs(),
            &[int(1), int(1), rat(1, 2), rat(1, 6), rat(1, 24)]
        );
    }

    #[test]
    fn exp_of_zero_is_one() {
        let g = series_exp(&PowerSeries::zero(6)).unwrap();
        assert_eq!(g, PowerSeries::one(6));
    }

    #[test]
    fn exp_of_abel_seed() {
        // F = t + t^2 + (3/2) t^3, alpha = 1
        let f = series(&[int(0), int(1), int(1), rat(3, 2)]);
        let g = series_exp(&f).unwrap();
        assert_eq!(g.coeff(2), &rat(3, 2));
    }

    #[test]
    fn exp_rejects_constant_term() {
        let f = series(&[int(1), int(1)]);
        assert!(matches!(series_exp(&f), Err(Error::InvalidInput(_))));
        assert!(series_exp_eta(&f).is_err());
    }

    #[test]
    fn exp_eta_of_t_is_binomial_gf() {
        let f = series(&[int(0), int(1), int(0), int(0), int(0), int(0)]);
        let e = series_exp_eta(&f).unwrap();
        for n in 0..=5 {
            let mut expect = vec![Rational::zero(); n + 1];
            expect[n] = factorial_q(n).recip();
            assert_eq!(e.coeff(n), &EtaPolynomial::new(expect));
        }
    }

    #[test]
    fn exp_eta_hermite_second_coefficient() {
        let a = rat(1, 3);
        let f = series(&[int(0), int(1), &a / int(2)]);
        let e = series_exp_eta(&f).unwrap();
        // eta^2/2 + a eta/2
        assert_eq!(
            e.coeff(2),
            &EtaPolynomial::new(vec![int(0), &a / int(2), rat(1, 2)])
        );
        let xfact2 = int(2) / (&a + int(1));
        let q2 = e.coeff(2).scale(&xfact2);
        // (eta^2 + a eta)/(1 + a)
        let expect = EtaPolynomial::new(vec![int(0), &a / (&a + int(1)), int(1) / (&a + int(1))]);
        assert_eq!(q2, expect);
    }

    #[test]
    fn log_of_exp_series() {
        let g = series(&[int(1), int(1), rat(1, 2), rat(1, 6)]);
        let f = series_log(&g).unwrap();
        assert_eq!(f.coeffs(), &[int(0), int(1), int(0), int(0)]);
    }

    #[test]
    fn log_of_qexp_generating_function() {
        // (1 - t/2)^{-2} = sum (n+1) (t/2)^n
        let g = PowerSeries::from_fn(8, |n| usize_q(n + 1) / int(2).pow(n as i32));
        let f = series_log(&g).unwrap();
        for n in 1..=8 {
            assert_eq!(f.coeff(n), &(usize_q(n) * int(2).pow(n as i32 - 1)).recip());
        }
    }

    #[test]
    fn log_rejects_bad_constant() {
        let g = series(&[int(2), int(1)]);
        assert!(matches!(series_log(&g), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bell_base_cases() {
        let x1 = rat(2, 3);
        let x2 = rat(-1, 5);
        assert_eq!(complete_bell(std::slice::from_ref(&x1)), x1);
        assert_eq!(complete_bell(&[x1.clone(), x2.clone()]), &x1 * &x1 + &x2);
        assert_eq!(complete_bell(&[int(1), int(1), int(1)]), int(5));
        assert_eq!(complete_bell(&[]), int(1));
        for n in 1..8 {
            assert_eq!(
                partial_bell(n, n, std::slice::from_ref(&x1)).unwrap(),
                x1.pow(n as i32)
            );
        }
    }

    #[test]
    fn bell_numbers_and_stirling() {
        let ones = vec![int(1); 10];
        let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for n in 0..=10 {
            assert_eq!(complete_bell(&ones[..n]), int(bell[n]));
        }
        // S(5, 2) = 15
        assert_eq!(partial_bell(5, 2, &ones).unwrap(), int(15));
    }

    #[test]
    fn partial_bell_range_errors() {
        let ones = vec![int(1); 4];
        assert!(partial_bell(3, 0, &ones).is_err());
        assert!(partial_bell(3, 4, &ones).is_err());
        assert!(partial_bell(4, 1, &ones[..2]).is_err());
    }

    #[test]
    fn polynomial_eval_and_shift() {
        let sq = EtaPolynomial::new(vec![int(0), int(0), int(1)]);
        assert_eq!(poly_eval(&sq, &rat(1, 2)), rat(1, 4));
        assert_eq!(
            poly_shift(&sq, &int(-1)),
            EtaPolynomial::new(vec![int(1), int(-2), int(1)])
        );
        // q_2 of the alpha = 2 q-exponential at eta = 1/2
        let q2 = EtaPolynomial::new(vec![int(0), rat(1, 3), rat(2, 3)]);
        assert_eq!(poly_eval(&q2, &rat(1, 2)), rat(1, 3));
    }

    #[test]
    fn polynomial_helpers() {
        let ff = EtaPolynomial::falling_factorial(3);
        assert_eq!(
            ff,
            EtaPolynomial::new(vec![int(0), int(2), int(-3), int(1)])
        );
        let p = EtaPolynomial::new(vec![int(1), int(2), int(3)]);
        assert_eq!(p.reflect().eval(&rat(1, 4)), p.eval(&rat(3, 4)));
        assert_eq!(p.integrate_unit(), int(3));
        assert_eq!(p.derivative(), EtaPolynomial::new(vec![int(2), int(6)]));
        assert_eq!(EtaPolynomial::zero().degree(), None);
        assert_eq!(p.degree(), Some(2));
        assert_eq!((&p - &p), EtaPolynomial::zero());
    }

    #[test]
    fn series_ops() {
        let a = PowerSeries::from_fn(5, |n| usize_q(n + 1));
        let inv = a.reciprocal().unwrap();
        assert_eq!(a.mul(&inv), PowerSeries::one(5));
        assert_eq!(a.derivative().order(), 4);
        assert_eq!(a.shift_up(2).coeff(2), &int(1));
        assert!(PowerSeries::zero(3).reciprocal().is_err());
        assert_eq!(a.add(&PowerSeries::zero(2)).order(), 2);
    }

    #[test]
    fn misc_numbers() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
        let big = factorial_q(300).recip();
        assert!((ln_rational(&big) + statrs::function::gamma::ln_gamma(301.0)).abs() < 1e-9);
    }
}
