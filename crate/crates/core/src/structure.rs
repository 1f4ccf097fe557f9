//! Leibniz triangle rule and entropies.
//!
//! Everything here is phrased through the reduced weights
//! `varpi_k^n = p_k^(n) / C(n, k)`. The triangle rule
//! `varpi_k^{n-1} = varpi_k^n + varpi_{k+1}^n` holds exactly only for the
//! q-exponential family; other families approach it as `n` grows.

use std::ops::RangeInclusive;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::pmf_log_closed;
use crate::error::{Error, Result};
use crate::model::{build_model, pochhammer, GeneratingFamily};
use crate::numeric::{compensated_sum, linear_fit, ln_choose, LinearFit};
use crate::qpoly::{q_polynomials, QFamily};
use crate::series::{horner_f64, to_f64, usize_q, EtaPolynomial, Rational};

/// `varpi_k^n = (y_n! / (y_k! y_{n-k}!)) q_k(eta) q_{n-k}(1 - eta)` with
/// `y_j = x_j / j`, for `k = 0..=n`.
pub fn varpi(qf: &QFamily, n: usize, eta: &Rational) -> Result<Vec<Rational>> {
    if eta.is_negative() || *eta > Rational::one() {
        return Err(Error::Domain(format!("eta = {eta} lies outside [0, 1]")));
    }
    let m = qf.model();
    m.check_n(n)?;
    let yfact: Vec<Rational> = (0..=n)
        .scan(Rational::one(), |acc, j| {
            if j > 0 {
                *acc = &*acc * m.x(j) / usize_q(j);
            }
            Some(acc.clone())
        })
        .collect();
    let win = qf.eval_all(n, eta);
    let loss = qf.eval_all(n, &(Rational::one() - eta));
    Ok((0..=n)
        .map(|k| &yfact[n] / (&yfact[k] * &yfact[n - k]) * &win[k] * &loss[n - k])
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeibnizRow {
    pub n: usize,
    /// `max_k |varpi_k^{n-1} - varpi_k^n - varpi_{k+1}^n|`.
    #[serde(serialize_with = "crate::structure::ser_rational")]
    pub max_residual: Rational,
    pub exact_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeibnizReport {
    pub family: String,
    #[serde(serialize_with = "crate::structure::ser_rational")]
    pub eta: Rational,
    pub rows: Vec<LeibnizRow>,
}

impl LeibnizReport {
    pub fn all_zero(&self) -> bool {
        self.rows.iter().all(|r| r.exact_zero)
    }

    /// Whether the residual strictly decreases over rows with `n` in `range`.
    pub fn strictly_decreasing(&self, range: RangeInclusive<usize>) -> bool {
        let sel: Vec<&LeibnizRow> = self.rows.iter().filter(|r| range.contains(&r.n)).collect();
        sel.len() >= 2
            && sel
                .windows(2)
                .all(|w| w[1].max_residual < w[0].max_residual)
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Triangle-rule residuals for `n = 1..=nmax`.
pub fn leibniz_residuals(qf: &QFamily, nmax: usize, eta: &Rational) -> Result<LeibnizReport> {
    qf.model().check_n(nmax)?;
    let table: Vec<Vec<Rational>> = (0..=nmax)
        .into_par_iter()
        .map(|n| varpi(qf, n, eta))
        .collect::<Result<_>>()?;
    let rows = (1..=nmax)
        .map(|n| {
            let max_residual = (0..n)
                .map(|k| (&table[n - 1][k] - &table[n][k] - &table[n][k + 1]).abs())
                .max()
                .unwrap_or_else(Rational::zero);
            LeibnizRow {
                n,
                exact_zero: max_residual.is_zero(),
                max_residual,
            }
        })
        .collect();
    Ok(LeibnizReport {
        family: qf.model().family().to_string(),
        eta: eta.clone(),
        rows,
    })
}

/// Outcome of the four checks characterising the q-exponential family as
/// the unique solution of the triangle rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeibnizUniqueness {
    /// `q_n(eta) = prod_{k=1}^n (k - 1 + alpha eta)/(k - 1 + alpha)` matches
    /// the polynomials generated by the series.
    pub product_form: bool,
    /// `y_n = x_n / n = alpha / (n + alpha - 1)`.
    pub y_sequence: bool,
    /// `q_n = prod_k (1 + (y_k / y_1)(eta - 1))` reproduces the product form.
    pub recurrence_solution: bool,
    /// `Z(n) = 1 / y_n` is affine, `Z(n) = mu n + nu`, and satisfies
    /// `Z(n) = Z(n-k) + Z(k+1) - Z(1)` for `1 <= k < n`.
    pub cauchy_pexider: bool,
}

impl LeibnizUniqueness {
    pub fn holds(&self) -> bool {
        self.product_form && self.y_sequence && self.recurrence_solution && self.cauchy_pexider
    }
}

pub fn leibniz_unique_family(alpha: &Rational, nmax: usize) -> Result<LeibnizUniqueness> {
    let family = GeneratingFamily::QExponential(alpha.clone());
    let qf = q_polynomials(&build_model(family, nmax.max(2))?);
    let m = qf.model();
    let one = Rational::one();
    let eta = EtaPolynomial::eta();

    let mut product = EtaPolynomial::one();
    let mut product_form = true;
    for n in 1..=nmax {
        let k1 = usize_q(n - 1);
        let factor = EtaPolynomial::new(vec![k1.clone() / (&k1 + alpha), alpha / (&k1 + alpha)]);
        product = &product * &factor;
        product_form &= product == *qf.q(n);
    }

    let y = |n: usize| m.x(n) / usize_q(n);
    let y_sequence = (1..=nmax).all(|n| y(n) == alpha / (usize_q(n) + alpha - &one));

    let shifted = &eta - &EtaPolynomial::one();
    let mut sol = EtaPolynomial::one();
    let mut recurrence_solution = true;
    for n in 1..=nmax {
        let ratio = y(n) / y(1);
        sol = &sol * &(&EtaPolynomial::one() + &shifted.scale(&ratio));
        recurrence_solution &= sol == *qf.q(n);
    }

    let z = |n: usize| Rational::one() / y(n);
    let mu = z(2) - z(1);
    let nu = z(1) - &mu;
    let affine = (1..=nmax).all(|n| z(n) == &mu * usize_q(n) + &nu);
    let pexider = (2..=nmax).all(|n| (1..n).all(|k| z(n) == z(n - k) + z(k + 1) - z(1)));
    // alpha is recovered from the affine coefficients
    let recovered = nmax < 2 || (&one + &nu / &mu) == *alpha;

    Ok(LeibnizUniqueness {
        product_form,
        y_sequence,
        recurrence_solution,
        cauchy_pexider: affine && pexider && recovered,
    })
}

/// `q_n` of the q-exponential family as a product of linear factors,
/// evaluated at a rational point.
pub fn qexp_product(alpha: &Rational, n: usize, eta: &Rational) -> Rational {
    pochhammer(&(alpha * eta), n) / pochhammer(alpha, n)
}

// ---------------------------------------------------------------------------
// Entropies
// ---------------------------------------------------------------------------

fn check_open_unit(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "entropy needs eta in (0, 1), got {eta}"
        )))
    }
}

/// `(ln C(n,k), ln varpi_k)` for `k = 0..=n`. Named families use log-gamma
/// closed forms and ignore the model order; custom seeds need `n <= order`.
fn log_weights(qf: &QFamily, n: usize, eta: f64) -> Result<Vec<(f64, f64)>> {
    let family = qf.model().family();
    if family.is_named() {
        return log_weights_closed(family, n, eta);
    }
    let m = qf.model();
    m.check_n(n)?;
    let polys: Vec<Vec<f64>> = qf.polys()[..=n].iter().map(|p| p.to_f64_coeffs()).collect();
    Ok((0..=n)
        .map(|k| {
            let lc = ln_choose(n, k);
            let p = to_f64(&m.deformed_binomial(n, k))
                * horner_f64(&polys[k], eta)
                * horner_f64(&polys[n - k], 1.0 - eta);
            (lc, p.ln() - lc)
        })
        .collect())
}

fn log_weights_closed(family: &GeneratingFamily, n: usize, eta: f64) -> Result<Vec<(f64, f64)>> {
    Ok(pmf_log_closed(family, n, eta)?
        .into_iter()
        .enumerate()
        .map(|(k, lp)| {
            let lc = ln_choose(n, k);
            (lc, lp - lc)
        })
        .collect())
}

fn bg_from_logs(w: &[(f64, f64)]) -> f64 {
    -compensated_sum(
        w.iter()
            .filter(|(_, lv)| lv.is_finite())
            .map(|(lc, lv)| (lc + lv).exp() * lv),
    )
}

fn tsallis_from_logs(w: &[(f64, f64)], q: f64) -> f64 {
    let s = compensated_sum(
        w.iter()
            .filter(|(_, lv)| lv.is_finite())
            .map(|(lc, lv)| (lc + q * lv).exp()),
    );
    (1.0 - s) / (q - 1.0)
}

fn check_q(q: f64) -> Result<()> {
    if q == 1.0 {
        Err(Error::InvalidInput(
            "Tsallis index q = 1 is the Boltzmann-Gibbs case; use bg_entropy".into(),
        ))
    } else if !q.is_finite() {
        Err(Error::InvalidInput(format!(
            "Tsallis index must be finite, got {q}"
        )))
    } else {
        Ok(())
    }
}

/// `S_BG = -sum_k C(n,k) varpi_k ln varpi_k`, with `0 ln 0 = 0`.
pub fn bg_entropy(qf: &QFamily, n: usize, eta: f64) -> Result<f64> {
    check_open_unit(eta)?;
    Ok(bg_from_logs(&log_weights(qf, n, eta)?))
}

/// `S_q = (1 - sum_k C(n,k) varpi_k^q) / (q - 1)`.
pub fn tsallis_entropy(qf: &QFamily, n: usize, eta: f64, q: f64) -> Result<f64> {
    check_open_unit(eta)?;
    check_q(q)?;
    Ok(tsallis_from_logs(&log_weights(qf, n, eta)?, q))
}

/// Sign pattern of the discrete second difference over the fit window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    /// Every second difference is strictly positive.
    Convex,
    /// Every second difference is `<= 0`.
    Concave,
    Mixed,
    /// Fewer than three points in the window.
    Undetermined,
}

pub fn classify_curvature(ys: &[f64]) -> Curvature {
    if ys.len() < 3 {
        return Curvature::Undetermined;
    }
    let d2: Vec<f64> = ys.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    if d2.iter().all(|d| *d > 0.0) {
        Curvature::Convex
    } else if d2.iter().all(|d| *d <= 0.0) {
        Curvature::Concave
    } else {
        Curvature::Mixed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub n: usize,
    pub s_bg: f64,
    pub s_q: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyScan {
    pub family: String,
    pub eta: f64,
    pub q_values: Vec<f64>,
    pub rows: Vec<EntropyRow>,
    pub window: (usize, usize),
    /// Least-squares line of `S_BG` against `n` over the window.
    pub fit: Option<LinearFit>,
    /// One entry per `q`, over the window.
    pub curvature: Vec<Curvature>,
}

pub const DEFAULT_FIT_WINDOW: (usize, usize) = (50, 200);

pub fn entropy_scan(
    family: &GeneratingFamily,
    eta: f64,
    n_range: RangeInclusive<usize>,
    q_list: &[f64],
) -> Result<EntropyScan> {
    entropy_scan_with_window(family, eta, n_range, q_list, DEFAULT_FIT_WINDOW)
}

pub fn entropy_scan_with_window(
    family: &GeneratingFamily,
    eta: f64,
    n_range: RangeInclusive<usize>,
    q_list: &[f64],
    window: (usize, usize),
) -> Result<EntropyScan> {
    check_open_unit(eta)?;
    family.validate()?;
    for q in q_list {
        check_q(*q)?;
    }
    let custom = if family.is_named() {
        None
    } else {
        Some(q_polynomials(&build_model(
            family.clone(),
            (*n_range.end()).max(2),
        )?))
    };
    let rows: Vec<EntropyRow> = n_range
        .clone()
        .into_par_iter()
        .map(|n| {
            let w = match &custom {
                None => log_weights_closed(family, n, eta)?,
                Some(qf) => log_weights(qf, n, eta)?,
            };
            Ok(EntropyRow {
                n,
                s_bg: bg_from_logs(&w),
                s_q: q_list.iter().map(|q| tsallis_from_logs(&w, *q)).collect(),
            })
        })
        .collect::<Result<_>>()?;

    let in_window: Vec<&EntropyRow> = rows
        .iter()
        .filter(|r| (window.0..=window.1).contains(&r.n))
        .collect();
    let fit = (in_window.len() >= 2).then(|| {
        let xs: Vec<f64> = in_window.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = in_window.iter().map(|r| r.s_bg).collect();
        linear_fit(&xs, &ys)
    });
    let curvature = (0..q_list.len())
        .map(|i| classify_curvature(&in_window.iter().map(|r| r.s_q[i]).collect::<Vec<_>>()))
        .collect();

    Ok(EntropyScan {
        family: family.to_string(),
        eta,
        q_values: q_list.to_vec(),
        rows,
        window,
        fit,
        curvature,
    })
}
