//! Coherent states built on the q-polynomials.
//!
//! The deformed factorial `f_n = int_0^inf q_n(u) e^{-u} du` and deformed
//! beta `b_{m,n} = int_0^1 q_m(u) q_n(1-u) du` are computed exactly from
//! polynomial coefficients. Quadrature appears only as a cross-check.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_order, Error, Result};
use crate::model::{build_model, DeformedModel, GeneratingFamily, SeedSeries};
use crate::numeric::{compensated_sum, integrate, integrate_half_line};
use crate::qpoly::{q_polynomials, QFamily};
use crate::series::{factorial_q, horner_f64, to_f64, usize_q, EtaPolynomial, Rational};

// ---------------------------------------------------------------------------
// Restriction to a_1 = 1 with summable seed
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sigma1Report {
    /// The scale `s` in `F_0(t) = s F(t/s) / a_1`.
    #[serde(serialize_with = "crate::structure::ser_rational")]
    pub scale: Rational,
    /// Root-test estimate of `limsup (a_n / a_1)^{1/(n-1)}` before rescaling.
    pub rho: f64,
    /// `sum a_n` of the rescaled seed over the truncation.
    #[serde(serialize_with = "crate::structure::ser_rational")]
    pub truncated_sum: Rational,
    /// True when summability of the full series is known analytically
    /// (named families); false when it rests on the root-test heuristic.
    pub certified: bool,
    pub changed: bool,
}

/// Whether a named family's seed is summable, and its exact growth rate.
fn named_summability(family: &GeneratingFamily) -> Option<(bool, f64)> {
    match family {
        GeneratingFamily::Exponential | GeneratingFamily::HermiteGauss(_) => Some((true, 0.0)),
        // a_n = 1/(n alpha^{n-1}): summable iff alpha > 1
        GeneratingFamily::QExponential(alpha) => {
            Some((*alpha > Rational::one(), 1.0 / to_f64(alpha)))
        }
        // a_n ~ e^{n-1} / (sqrt(2 pi) n^{3/2} alpha^{n-1}): summable iff alpha >= e
        GeneratingFamily::AbelLambert(alpha) => {
            let a = to_f64(alpha);
            Some((a >= std::f64::consts::E, std::f64::consts::E / a))
        }
        GeneratingFamily::Custom(_) => None,
    }
}

fn root_test(seed: &SeedSeries) -> f64 {
    let a1 = to_f64(&seed.get(1));
    let len = seed.len();
    (len / 2 + 1..=len)
        .filter(|&n| n >= 2)
        .map(|n| {
            let r = to_f64(&seed.get(n)) / a1;
            if r > 0.0 {
                (r.ln() / (n - 1) as f64).exp()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Maps a model into the class with `a_1 = 1` and `sum a_n < inf` through
/// `F_0(t) = s F(t/s) / a_1`. Summable seeds with `a_1 = 1` pass through.
/// Otherwise `s = max(2, ceil(2 rho))`, which puts the growth rate of the
/// rescaled seed at or below 1/2.
pub fn sigma1_restrict(model: &DeformedModel) -> Result<(DeformedModel, Sigma1Report)> {
    let family = model.family();
    let order = model.order();
    let a1 = model.a(1);
    if !a1.is_positive() {
        return Err(Error::InvalidFamily(format!(
            "seed needs a_1 > 0 for the restriction, got a_1 = {a1}"
        )));
    }
    let (summable, rho, certified) = match named_summability(family) {
        Some((s, r)) => (s, r, true),
        None => {
            let r = root_test(model.seed());
            (r < 1.0, r, false)
        }
    };
    let keep = summable && a1.is_one();
    let scale = if summable {
        Rational::one()
    } else {
        usize_q(((2.0 * rho).ceil() as usize).max(2))
    };
    let new_family = if keep {
        family.clone()
    } else {
        match family {
            GeneratingFamily::QExponential(alpha) => GeneratingFamily::QExponential(alpha * &scale),
            GeneratingFamily::AbelLambert(alpha) => GeneratingFamily::AbelLambert(alpha * &scale),
            GeneratingFamily::HermiteGauss(a) => GeneratingFamily::HermiteGauss(a / &scale),
            GeneratingFamily::Exponential => GeneratingFamily::Exponential,
            GeneratingFamily::Custom(seed) => {
                let coeffs = (1..=seed.len())
                    .map(|n| seed.get(n) / &a1 / scale.pow(n as i32 - 1))
                    .collect();
                GeneratingFamily::Custom(SeedSeries::new(coeffs))
            }
        }
    };
    let restricted = build_model(new_family, order)?;
    let truncated_sum = (1..=order).fold(Rational::zero(), |acc, n| acc + restricted.a(n));
    Ok((
        restricted,
        Sigma1Report {
            scale,
            rho,
            truncated_sum,
            certified,
            changed: !keep,
        },
    ))
}

// ---------------------------------------------------------------------------
// Deformed factorial and beta
// ---------------------------------------------------------------------------

/// `int_0^inf p(u) e^{-u} du = sum_i p_i i!`.
fn laplace_at_one(p: &EtaPolynomial, fact: &[Rational]) -> Rational {
    p.coeffs()
        .iter()
        .zip(fact)
        .fold(Rational::zero(), |acc, (c, f)| acc + c * f)
}

fn beta_from_coeffs(c: &[Rational], d: &[Rational], fact: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (i, ci) in c.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            if !dj.is_zero() {
                acc += ci * dj * &fact[i] * &fact[j] / &fact[i + j + 1];
            }
        }
    }
    acc
}

/// `f_n` for `n = 0..=order`.
pub fn deformed_factorial(qf: &QFamily) -> Vec<Rational> {
    let fact: Vec<Rational> = (0..=qf.order()).map(factorial_q).collect();
    qf.polys()
        .iter()
        .map(|p| laplace_at_one(p, &fact))
        .collect()
}

/// `b_{m,n}` from the coefficient formula.
pub fn deformed_beta(qf: &QFamily, m: usize, n: usize) -> Result<Rational> {
    check_order(m + n, qf.order())?;
    let fact: Vec<Rational> = (0..=m + n + 1).map(factorial_q).collect();
    Ok(beta_from_coeffs(qf.q(m).coeffs(), qf.q(n).coeffs(), &fact))
}

/// `f_n` and the table `b_{m,n}` for `m + n <= max_sum`, for a model with
/// `a_1 = 1`.
#[derive(Clone, Debug)]
pub struct CoherentData {
    qf: QFamily,
    f: Vec<Rational>,
    b: Vec<Vec<Rational>>,
    max_sum: usize,
}

impl CoherentData {
    pub fn new(qf: QFamily, max_sum: usize) -> Result<Self> {
        check_order(max_sum, qf.order())?;
        let a1 = qf.model().a(1);
        if !a1.is_one() {
            return Err(Error::InvalidFamily(format!(
                "coherent states need a_1 = 1, got {a1}; apply sigma1_restrict first"
            )));
        }
        let f = deformed_factorial(&qf);
        let fact: Vec<Rational> = (0..=max_sum + 1).map(factorial_q).collect();
        let b = (0..=max_sum)
            .into_par_iter()
            .map(|m| {
                (0..=max_sum - m)
                    .map(|n| beta_from_coeffs(qf.q(m).coeffs(), qf.q(n).coeffs(), &fact))
                    .collect()
            })
            .collect();
        Ok(Self { qf, f, b, max_sum })
    }

    pub fn qf(&self) -> &QFamily {
        &self.qf
    }

    pub fn model(&self) -> &DeformedModel {
        self.qf.model()
    }

    pub fn max_sum(&self) -> usize {
        self.max_sum
    }

    pub fn f(&self, n: usize) -> &Rational {
        &self.f[n]
    }

    pub fn fs(&self) -> &[Rational] {
        &self.f
    }

    pub fn b(&self, m: usize, n: usize) -> Result<&Rational> {
        check_order(m + n, self.max_sum)?;
        Ok(&self.b[m][n])
    }

    /// Checks `f_n >= x_n!`, `b_{m,n} = b_{n,m}` and
    /// `b_{m,n} >= x_m! x_n! / (m+n+1)!` over the stored table.
    pub fn inequalities(&self) -> InequalityReport {
        let m = self.model();
        let f_bound = (0..=self.qf.order()).all(|n| self.f[n] >= *m.xfact(n));
        let mut b_symmetric = true;
        let mut b_bound = true;
        for i in 0..=self.max_sum {
            for j in 0..=self.max_sum - i {
                b_symmetric &= self.b[i][j] == self.b[j][i];
                b_bound &= self.b[i][j] >= m.xfact(i) * m.xfact(j) / factorial_q(i + j + 1);
            }
        }
        InequalityReport {
            max_sum: self.max_sum,
            f_bound,
            b_symmetric,
            b_bound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub max_sum: usize,
    pub f_bound: bool,
    pub b_symmetric: bool,
    pub b_bound: bool,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.f_bound && self.b_symmetric && self.b_bound
    }
}

// ---------------------------------------------------------------------------
// N(u)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Normalization {
    pub value: f64,
    /// Geometric tail estimate: the true sum lies in `[value, value + bound]`.
    pub bound: f64,
    pub terms: usize,
}

/// Ratio used for the geometric tail. Ratios still climbing geometrically
/// toward their limit are replaced by the Aitken extrapolation of that limit.
fn tail_ratio([r0, r1, r2]: [f64; 3]) -> f64 {
    let worst = r0.max(r1).max(r2);
    let (d1, d2) = (r1 - r0, r2 - r1);
    if d1 > 0.0 && d2 > 0.0 {
        if d2 < d1 {
            worst.max(r2 + d2 * d2 / (d1 - d2))
        } else {
            f64::INFINITY
        }
    } else {
        worst
    }
}

/// `N(u) = sum_n q_n(u) / f_n` for `u >= 0`, summed until the geometric
/// tail estimate drops below `tol`.
pub fn normalization_n(data: &CoherentData, u: f64, tol: f64) -> Result<Normalization> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("N(u) needs finite u >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(Normalization {
            value: 1.0,
            bound: 0.0,
            terms: 1,
        });
    }
    let order = data.qf.order();
    let mut sum = crate::numeric::CompensatedSum::default();
    // last three term ratios, oldest first
    let mut ratios = [f64::INFINITY; 3];
    let mut prev = 0.0;
    let mut worst_ratio = f64::INFINITY;
    for n in 0..=order {
        let t = data.qf.q(n).eval_f64(u) / to_f64(&data.f[n]);
        sum.add(t);
        if n >= 1 {
            ratios.rotate_left(1);
            ratios[2] = t / prev;
            worst_ratio = tail_ratio(ratios);
            if n >= 4 && worst_ratio < 1.0 {
                let bound = t * worst_ratio / (1.0 - worst_ratio);
                if bound < tol {
                    return Ok(Normalization {
                        value: sum.value(),
                        bound,
                        terms: n + 1,
                    });
                }
            }
        }
        prev = t;
    }
    Err(Error::NonConvergent(format!(
        "N({u}): tail bound not below {tol} within {order} terms (last ratio {worst_ratio:.4})"
    )))
}

// ---------------------------------------------------------------------------
// Plane coherent states
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneFrameRow {
    pub n: usize,
    #[serde(serialize_with = "crate::structure::ser_rational")]
    pub f_n: Rational,
    /// `sum_k p^{(k)}(0)`, the repeated integration-by-parts value.
    #[serde(serialize_with = "crate::structure::ser_rational")]
    pub exact_integral: Rational,
    pub quadrature: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneFrameReport {
    pub rows: Vec<PlaneFrameRow>,
    pub tolerance: f64,
}

impl PlaneFrameReport {
    pub fn exact_holds(&self) -> bool {
        self.rows.iter().all(|r| r.f_n == r.exact_integral)
    }

    pub fn quadrature_holds(&self) -> bool {
        self.rows.iter().all(|r| r.relative_error < self.tolerance)
    }

    pub fn holds(&self) -> bool {
        self.exact_holds() && self.quadrature_holds()
    }
}

pub const FRAME_TOLERANCE: f64 = 1e-8;

/// `int_0^inf e^{-u} q_n(u) du == f_n` for `n <= nmax`: the diagonal
/// condition behind the resolution of unity on the plane.
pub fn plane_cs_frame_check(data: &CoherentData, nmax: usize) -> Result<PlaneFrameReport> {
    check_order(nmax, data.qf.order())?;
    let rows = (0..=nmax)
        .into_par_iter()
        .map(|n| {
            let q = data.qf.q(n);
            let mut exact_integral = Rational::zero();
            let mut d = q.clone();
            while !d.is_zero() {
                exact_integral += d.coeff(0);
                d = d.derivative();
            }
            let c = q.to_f64_coeffs();
            let quad = integrate_half_line(|u| horner_f64(&c, u) * (-u).exp(), 1e-12, 0.0);
            let f = to_f64(&data.f[n]);
            PlaneFrameRow {
                n,
                f_n: data.f[n].clone(),
                exact_integral,
                quadrature: quad.value,
                relative_error: ((quad.value - f) / f).abs(),
            }
        })
        .collect();
    Ok(PlaneFrameReport {
        rows,
        tolerance: FRAME_TOLERANCE,
    })
}

// ---------------------------------------------------------------------------
// Spin coherent states
// ---------------------------------------------------------------------------

/// `|theta, phi>` in the `2j + 1` dimensional space. Amplitudes are stored as
/// `(modulus, phase)` for `m = -j, .., j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinCsVector {
    pub two_j: usize,
    pub theta: f64,
    pub phi: f64,
    /// `varpi(theta) = sum_m q_{j-m}(cos^2 theta/2) q_{j+m}(sin^2 theta/2) / b_{j-m,j+m}`.
    pub weight: f64,
    pub amplitudes: Vec<(f64, f64)>,
}

impl SpinCsVector {
    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.two_j).map(|i| i as f64 - self.two_j as f64 / 2.0)
    }

    pub fn norm_squared(&self) -> f64 {
        compensated_sum(self.amplitudes.iter().map(|(r, _)| r * r))
    }
}

fn spin_terms(data: &CoherentData, two_j: usize, theta: f64) -> Vec<f64> {
    let (c2, s2) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
    // index i = j + m: q_{2j - i}(cos^2) q_i(sin^2) / b_{2j-i, i}
    (0..=two_j)
        .map(|i| {
            let b = to_f64(&data.b[two_j - i][i]);
            (data.qf.q(two_j - i).eval_f64(c2) * data.qf.q(i).eval_f64(s2)).max(0.0) / b
        })
        .collect()
}

pub fn spin_cs(data: &CoherentData, two_j: usize, theta: f64, phi: f64) -> Result<SpinCsVector> {
    check_order(two_j, data.max_sum)?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Domain(format!(
            "theta = {theta} lies outside [0, pi]"
        )));
    }
    if !(0.0..std::f64::consts::TAU).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} lies outside [0, 2 pi)")));
    }
    let terms = spin_terms(data, two_j, theta);
    let weight = compensated_sum(terms.iter().copied());
    let half = two_j as f64 / 2.0;
    let amplitudes = terms
        .iter()
        .enumerate()
        .map(|(i, t)| ((t / weight).sqrt(), (i as f64 - half) * phi))
        .collect();
    Ok(SpinCsVector {
        two_j,
        theta,
        phi,
        weight,
        amplitudes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinResolutionReport {
    pub two_j: usize,
    /// Per `m = -j..j`: `int_0^1 q_{j-m}(1-u) q_{j+m}(u) du == b_{j-m,j+m}`.
    pub exact_diagonal: Vec<bool>,
    /// Frame operator from quadrature, as `(re, im)` entries.
    pub frame: Vec<Vec<(f64, f64)>>,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl SpinResolutionReport {
    pub fn exact_holds(&self) -> bool {
        self.exact_diagonal.iter().all(|b| *b)
    }

    pub fn quadrature_holds(&self) -> bool {
        self.max_deviation < self.tolerance
    }

    pub fn holds(&self) -> bool {
        self.exact_holds() && self.quadrature_holds()
    }
}

/// Resolution of unity for the spin states. The exact route integrates the
/// diagonal polynomial identity; the float route builds the full frame
/// operator `(1/4 pi) int sin theta varpi(theta) |theta,phi><theta,phi|`
/// from `spin_cs`, with adaptive quadrature in `theta` and an `M`-point
/// trapezoid rule in `phi` (exact for `M > 2 * 2j`).
pub fn spin_resolution_check(data: &CoherentData, two_j: usize) -> Result<SpinResolutionReport> {
    check_order(two_j, data.max_sum)?;
    let qf = &data.qf;
    let exact_diagonal = (0..=two_j)
        .map(|i| {
            let integrand = &qf.q(two_j - i).reflect() * qf.q(i);
            integrand.integrate_unit() == data.b[two_j - i][i]
        })
        .collect();

    let dim = two_j + 1;
    let phis = 4 * two_j + 2;
    // phase part: (1/M) sum_k e^{i (phase_m - phase_m')} at phi_k = 2 pi k / M
    let phase_rows: Vec<Vec<f64>> = (0..phis)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / phis as f64;
            spin_cs(data, two_j, std::f64::consts::FRAC_PI_2, phi)
                .map(|v| v.amplitudes.iter().map(|(_, p)| *p).collect())
        })
        .collect::<Result<_>>()?;
    let mut frame = vec![vec![(0.0, 0.0); dim]; dim];
    let mut max_deviation = 0.0_f64;
    for a in 0..dim {
        for b in 0..dim {
            let (re, im) = phase_rows.iter().fold((0.0, 0.0), |(re, im), row| {
                let d = row[a] - row[b];
                (re + d.cos(), im + d.sin())
            });
            let (re, im) = (re / phis as f64, im / phis as f64);
            let radial = integrate(
                |theta| {
                    let v = spin_cs(data, two_j, theta, 0.0).expect("validated");
                    theta.sin() * v.weight * v.amplitudes[a].0 * v.amplitudes[b].0
                },
                0.0,
                std::f64::consts::PI,
                1e-13,
                1e-15,
            )
            .value
                / 2.0;
            let entry = (radial * re, radial * im);
            let target = if a == b { 1.0 } else { 0.0 };
            max_deviation =
                max_deviation.max(((entry.0 - target).powi(2) + entry.1.powi(2)).sqrt());
            frame[a][b] = entry;
        }
    }
    Ok(SpinResolutionReport {
        two_j,
        exact_diagonal,
        frame,
        max_deviation,
        tolerance: FRAME_TOLERANCE,
    })
}

/// Convenience: restrict, build q-polynomials and coherent data in one step.
pub fn coherent_data_for(
    family: GeneratingFamily,
    order: usize,
    max_sum: usize,
) -> Result<(CoherentData, Sigma1Report)> {
    let (model, report) = sigma1_restrict(&build_model(family, order)?)?;
    Ok((CoherentData::new(q_polynomials(&model), max_sum)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat};

    fn data(fam: GeneratingFamily, order: usize) -> CoherentData {
        CoherentData::new(q_polynomials(&build_model(fam, order).unwrap()), order).unwrap()
    }

    #[test]
    fn factorial_examples() {
        let e = data(GeneratingFamily::Exponential, 8);
        for n in 0..=8 {
            assert_eq!(*e.f(n), factorial_q(n));
        }
        let q = data(GeneratingFamily::QExponential(int(2)), 4);
        assert_eq!(*q.f(2), rat(5, 3));
        let a = rat(1, 3);
        let h = data(GeneratingFamily::HermiteGauss(a.clone()), 4);
        assert_eq!(*h.f(2), (int(2) + &a) / (int(1) + &a));
    }

    #[test]
    fn beta_examples() {
        let e = data(GeneratingFamily::Exponential, 8);
        for m in 0..=4 {
            for n in 0..=4 {
                assert_eq!(
                    *e.b(m, n).unwrap(),
                    factorial_q(m) * factorial_q(n) / factorial_q(m + n + 1)
                );
            }
        }
        let q = data(GeneratingFamily::QExponential(int(2)), 6);
        assert_eq!(*q.b(0, 0).unwrap(), int(1));
        assert_eq!(*q.b(1, 1).unwrap(), rat(1, 6));
        assert_eq!(deformed_beta(q.qf(), 2, 3).unwrap(), *q.b(2, 3).unwrap());
        assert!(q.b(4, 3).is_err());
    }

    #[test]
    fn inequalities_hold() {
        for fam in [
            GeneratingFamily::QExponential(int(2)),
            GeneratingFamily::AbelLambert(int(3)),
            GeneratingFamily::HermiteGauss(rat(1, 2)),
        ] {
            assert!(data(fam, 12).inequalities().holds());
        }
    }

    #[test]
    fn restriction_examples() {
        let m = build_model(GeneratingFamily::Exponential, 8).unwrap();
        let (r, rep) = sigma1_restrict(&m).unwrap();
        assert!(!rep.changed);
        assert_eq!(r.family(), m.family());

        let q = build_model(GeneratingFamily::QExponential(int(3)), 8).unwrap();
        assert!(!sigma1_restrict(&q).unwrap().1.changed);

        // harmonic tail: alpha = 1 is not summable
        let q1 = build_model(GeneratingFamily::QExponential(int(1)), 8).unwrap();
        let (r1, rep1) = sigma1_restrict(&q1).unwrap();
        assert!(rep1.changed && rep1.certified);
        assert_eq!(r1.family(), &GeneratingFamily::QExponential(int(2)));

        let c = GeneratingFamily::Custom(SeedSeries::new(vec![int(2)]));
        let (rc, repc) = sigma1_restrict(&build_model(c, 8).unwrap()).unwrap();
        assert!(repc.changed && !repc.certified);
        assert_eq!(rc.a(1), int(1));
        for n in 1..=8 {
            assert_eq!(*rc.xfact(n), factorial_q(n));
        }

        let bad = GeneratingFamily::Custom(SeedSeries::new(vec![int(0), int(1)]));
        assert!(build_model(bad, 4)
            .and_then(|m| sigma1_restrict(&m))
            .is_err());
    }

    #[test]
    fn restricted_custom_rescales_tail() {
        let c = GeneratingFamily::Custom(SeedSeries::new(vec![int(1), int(4), int(16)]));
        let (r, rep) = sigma1_restrict(&build_model(c, 6).unwrap()).unwrap();
        assert!(rep.rho >= 2.0);
        let s = rep.scale.clone();
        assert_eq!(r.a(2), int(4) / &s);
        assert_eq!(r.a(3), int(16) / (&s * &s));
    }

    #[test]
    fn normalization_examples() {
        let e = data(GeneratingFamily::Exponential, 60);
        let n = normalization_n(&e, 2.0, 1e-12).unwrap();
        assert!((n.value - 2f64.exp()).abs() < 1e-11);
        let z = normalization_n(&e, 0.0, 1e-12).unwrap();
        assert_eq!(z.value, 1.0);

        let q = data(GeneratingFamily::QExponential(int(2)), 60);
        let short = normalization_n(&q, 1.0, 1e-6).unwrap();
        let long = normalization_n(&q, 1.0, 1e-12).unwrap();
        assert!(long.value >= short.value - 1e-15);
        assert!(long.value <= short.value + short.bound + 1e-15);
        assert!(normalization_n(&q, -1.0, 1e-6).is_err());

        let tiny = data(GeneratingFamily::Exponential, 6);
        assert!(matches!(
            normalization_n(&tiny, 30.0, 1e-12),
            Err(Error::NonConvergent(_))
        ));
    }

    #[test]
    fn plane_frame() {
        for fam in [
            GeneratingFamily::Exponential,
            GeneratingFamily::QExponential(int(2)),
            GeneratingFamily::HermiteGauss(rat(1, 2)),
        ] {
            let d = data(fam, 8);
            let rep = plane_cs_frame_check(&d, 8).unwrap();
            assert!(rep.holds(), "{rep:?}");
        }
        let q = data(GeneratingFamily::QExponential(int(2)), 4);
        let rep = plane_cs_frame_check(&q, 2).unwrap();
        assert_eq!(rep.rows[2].exact_integral, rat(5, 3));
    }

    #[test]
    fn spin_states() {
        let q = data(GeneratingFamily::QExponential(int(2)), 6);
        let v = spin_cs(&q, 3, std::f64::consts::FRAC_PI_3, 1.0).unwrap();
        assert!((v.norm_squared() - 1.0).abs() < 1e-12);
        let top = spin_cs(&q, 3, 0.0, 0.0).unwrap();
        assert!((top.amplitudes[0].0 - 1.0).abs() < 1e-15);
        assert!(top.amplitudes[1..].iter().all(|(r, _)| *r == 0.0));
        assert!(spin_cs(&q, 3, 4.0, 0.0).is_err());
        assert!(spin_cs(&q, 3, 1.0, 7.0).is_err());
        assert!(spin_cs(&q, 7, 1.0, 1.0).is_err());
    }

    #[test]
    fn standard_spin_states() {
        let e = data(GeneratingFamily::Exponential, 4);
        let theta: f64 = 1.1;
        let v = spin_cs(&e, 4, theta, 0.3).unwrap();
        let (c, s) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
        for (i, (r, _)) in v.amplitudes.iter().enumerate() {
            let binom = to_f64(&crate::series::binomial_q(4, i));
            let expect = binom * s.powi(i as i32) * c.powi(4 - i as i32);
            assert!((r * r - expect).abs() < 1e-14);
        }
        // ordinary spin states have varpi = 2j + 1
        assert!((v.weight - 5.0).abs() < 1e-12);
    }

    #[test]
    fn spin_resolution() {
        let e = data(GeneratingFamily::Exponential, 2);
        let rep = spin_resolution_check(&e, 2).unwrap();
        assert!(rep.exact_holds());
        assert!(rep.max_deviation < 1e-10);
        for fam in [
            GeneratingFamily::QExponential(int(2)),
            GeneratingFamily::HermiteGauss(rat(1, 2)),
        ] {
            let d = data(fam, 4);
            for two_j in [2, 3] {
                let rep = spin_resolution_check(&d, two_j).unwrap();
                assert!(rep.holds(), "{rep:?}");
            }
        }
    }

    #[test]
    fn coherent_needs_unit_a1() {
        let c = GeneratingFamily::Custom(SeedSeries::new(vec![int(2)]));
        let qf = q_polynomials(&build_model(c.clone(), 4).unwrap());
        assert!(CoherentData::new(qf, 4).is_err());
        let (d, rep) = coherent_data_for(c, 4, 4).unwrap();
        assert!(rep.changed);
        assert_eq!(*d.f(3), int(6));
    }
}
