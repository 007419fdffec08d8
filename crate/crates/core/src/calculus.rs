//! Deformed derivative, deformed binomial polynomials and the two deformed
//! exponential series.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{PqError, Result};
use crate::numbers::{ipow, pq_binomial_coeff, DeformationParams};

/// Polynomial in `z` stored by ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    pub coeffs: Vec<Complex64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn monomial(degree: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
        coeffs[degree] = c;
        Self { coeffs }
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `f(s z)` as a polynomial in `z`.
    pub fn dilate(&self, s: Complex64) -> Self {
        let mut pow = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * pow;
                pow *= s;
                out
            })
            .collect();
        Self { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |s, c| s.max(c.norm()))
    }

    /// Largest coefficient-wise difference over `max(1, largest coefficient)`.
    pub fn scaled_diff(&self, other: &Self) -> f64 {
        self.max_diff(other) / 1f64.max(self.max_abs()).max(other.max_abs())
    }

    /// Largest coefficient-wise absolute difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// `D_{p,q}`: maps `z^n` to `[n] z^{n-1}`.
pub fn pq_derivative(f: &PolyCoeffs, params: &DeformationParams) -> PolyCoeffs {
    if f.coeffs.len() <= 1 {
        return PolyCoeffs::zero();
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c * params.bracket(n as i64))
        .collect();
    PolyCoeffs { coeffs }
}

/// `D_{p,q} f` evaluated pointwise from the difference quotient
/// `(f(pz) - f(qz)) / ((p - q) z)`. Requires `p != q` and `z != 0`.
pub fn pq_difference_quotient(f: &PolyCoeffs, params: &DeformationParams, z: Complex64) -> Complex64 {
    let (p, q) = (params.p(), params.q());
    (f.eval(z * p) - f.eval(z * q)) / ((p - q) * z)
}

/// `(z - a)^n_{p,q} = (z - p^{n-1} a)(z - p^{n-2} q a) ... (z - q^{n-1} a)`.
pub fn pq_binomial_poly(params: &DeformationParams, a: Complex64, n: u32) -> PolyCoeffs {
    let one = Complex64::new(1.0, 0.0);
    let n = n as i64;
    (0..n).fold(PolyCoeffs::constant(one), |acc, j| {
        let root = a * ipow(params.p(), n - 1 - j) * ipow(params.q(), j);
        acc.mul(&PolyCoeffs::new(vec![-root, one]))
    })
}

/// Coefficient residual of `D (z-a)^n = [n] (z-a)^{n-1}`, relative to the
/// largest coefficient (see [`PolyCoeffs::scaled_diff`]).
pub fn pq_derivative_binomial_check(params: &DeformationParams, a: Complex64, n: u32) -> f64 {
    if n == 0 {
        return pq_derivative(&pq_binomial_poly(params, a, 0), params).max_diff(&PolyCoeffs::zero());
    }
    let lhs = pq_derivative(&pq_binomial_poly(params, a, n), params);
    let rhs = pq_binomial_poly(params, a, n - 1).scale(params.bracket(n as i64).into());
    lhs.scaled_diff(&rhs)
}

/// Scaled coefficient residual of the deformed binomial theorem
/// `(z + a)^n = sum_k [n k] (pq)^{k(k-1)/2} z^{n-k} a^k`.
pub fn gauss_binomial_check(params: &DeformationParams, a: Complex64, n: u32) -> Result<f64> {
    let lhs = pq_binomial_poly(params, -a, n);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    let pq = params.product();
    for k in 0..=n as i64 {
        let c = pq_binomial_coeff(params, n, k)? * ipow(pq, k * (k - 1) / 2);
        rhs[(n as i64 - k) as usize] = a.powi(k as i32) * c;
    }
    Ok(lhs.scaled_diff(&PolyCoeffs::new(rhs)))
}

/// Scaled residual of both splitting laws
/// `(z-a)^{n+m} = (z - p^m a)^n (z - q^n a)^m = (z - q^m a)^n (z - p^n a)^m`.
pub fn splitting_law_residual(params: &DeformationParams, a: Complex64, n: u32, m: u32) -> f64 {
    let (p, q) = (params.p(), params.q());
    let (ni, mi) = (n as i64, m as i64);
    let whole = pq_binomial_poly(params, a, n + m);
    let first = pq_binomial_poly(params, a * ipow(p, mi), n).mul(&pq_binomial_poly(params, a * ipow(q, ni), m));
    let second = pq_binomial_poly(params, a * ipow(q, mi), n).mul(&pq_binomial_poly(params, a * ipow(p, ni), m));
    whole.scaled_diff(&first).max(whole.scaled_diff(&second))
}

/// Convergence classification of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesClass {
    Converged,
    TruncatedAtCap,
    Diverging,
}

/// A truncated series sum with its error proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub last_term_magnitude: f64,
    pub terms_used: usize,
    pub classification: SeriesClass,
}

/// Controls for series summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub tol: f64,
    pub cap: usize,
    /// Consecutive growing terms needed before a series is called diverging.
    pub window: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            tol: 1e-17,
            cap: 500,
            window: 8,
        }
    }
}

impl SeriesConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Sums `t_0 = 1`, `t_n = t_{n-1} * ratio(n)`.
///
/// Divergence is declared when `window` consecutive terms grow and the
/// step ratio has not fallen by more than 1% across that window, which
/// separates geometric growth from the transient rise of an entire series
/// at large argument.
fn sum_ratio_series(ratio: impl Fn(usize) -> Result<Complex64>, cfg: &SeriesConfig) -> Result<SeriesValue> {
    if !(cfg.tol > 0.0) {
        return Err(PqError::InvalidParameter(format!("tol must be > 0 (got {})", cfg.tol)));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut growth: Vec<f64> = Vec::with_capacity(cfg.window + 1);
    for n in 1..cfg.cap {
        let r = ratio(n)?;
        let next = term * r;
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(PqError::NonFiniteResult { n: n as i64 });
        }
        let (prev_mag, mag) = (term.norm(), next.norm());
        term = next;
        sum += term;
        if mag == 0.0 {
            return Ok(SeriesValue {
                value: sum,
                last_term_magnitude: 0.0,
                terms_used: n + 1,
                classification: SeriesClass::Converged,
            });
        }
        if mag > prev_mag {
            growth.push(mag / prev_mag);
            if growth.len() >= cfg.window {
                let first = growth[growth.len() - cfg.window];
                let last = growth[growth.len() - 1];
                if last >= 0.99 * first {
                    return Ok(SeriesValue {
                        value: sum,
                        last_term_magnitude: mag,
                        terms_used: n + 1,
                        classification: SeriesClass::Diverging,
                    });
                }
            }
        } else {
            growth.clear();
        }
        if mag <= cfg.tol * sum.norm().max(1.0) {
            // Only stop once the terms are also shrinking from here on.
            let nr = ratio(n + 1)?;
            if nr.norm() < 1.0 {
                return Ok(SeriesValue {
                    value: sum,
                    last_term_magnitude: mag,
                    terms_used: n + 1,
                    classification: SeriesClass::Converged,
                });
            }
        }
    }
    Ok(SeriesValue {
        value: sum,
        last_term_magnitude: term.norm(),
        terms_used: cfg.cap,
        classification: SeriesClass::TruncatedAtCap,
    })
}

fn bracket_ratio(params: &DeformationParams, n: usize) -> Result<f64> {
    let b = params.bracket(n as i64);
    if b == 0.0 {
        Err(PqError::DivisionByZeroPqNumber { m: n as i64 })
    } else {
        Ok(b)
    }
}

fn reject_diverging(v: SeriesValue) -> Result<SeriesValue> {
    if v.classification == SeriesClass::Diverging {
        Err(PqError::SeriesDiverged {
            terms: v.terms_used,
            last_term: v.last_term_magnitude,
        })
    } else {
        Ok(v)
    }
}

/// `e^z_{p,q} = sum z^n / [n]!` with full classification (never errors on divergence).
pub fn pq_exp_small_classified(params: &DeformationParams, z: Complex64, cfg: &SeriesConfig) -> Result<SeriesValue> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(SeriesValue {
            value: Complex64::new(1.0, 0.0),
            last_term_magnitude: 0.0,
            terms_used: 1,
            classification: SeriesClass::Converged,
        });
    }
    sum_ratio_series(|n| Ok(z / bracket_ratio(params, n)?), cfg)
}

/// `E^z_{p,q} = sum (pq)^{n(n-1)/2} z^n / [n]!` with full classification.
pub fn pq_exp_big_classified(params: &DeformationParams, z: Complex64, cfg: &SeriesConfig) -> Result<SeriesValue> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(SeriesValue {
            value: Complex64::new(1.0, 0.0),
            last_term_magnitude: 0.0,
            terms_used: 1,
            classification: SeriesClass::Converged,
        });
    }
    let pq = params.product();
    sum_ratio_series(|n| Ok(z * ipow(pq, n as i64 - 1) / bracket_ratio(params, n)?), cfg)
}

/// `e^z_{p,q}`; errors with [`PqError::SeriesDiverged`] on divergence.
pub fn pq_exp_small(params: &DeformationParams, z: Complex64, tol: f64) -> Result<SeriesValue> {
    pq_exp_small_classified(params, z, &SeriesConfig::with_tol(tol)).and_then(reject_diverging)
}

/// `E^z_{p,q}`; errors with [`PqError::SeriesDiverged`] on divergence.
pub fn pq_exp_big(params: &DeformationParams, z: Complex64, tol: f64) -> Result<SeriesValue> {
    pq_exp_big_classified(params, z, &SeriesConfig::with_tol(tol)).and_then(reject_diverging)
}

/// Convenience: value of `e^z_{p,q}` for real `x` at the default tolerance.
pub fn exp_real(params: &DeformationParams, x: f64) -> Result<f64> {
    Ok(
        pq_exp_small(params, Complex64::new(x, 0.0), SeriesConfig::default().tol)?
            .value
            .re,
    )
}

/// Degree-`degree` truncation of `e^z_{p,q}`.
pub fn exp_small_poly(params: &DeformationParams, degree: usize) -> Result<PolyCoeffs> {
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut c = 1.0;
    coeffs.push(Complex64::new(c, 0.0));
    for n in 1..=degree {
        c /= bracket_ratio(params, n)?;
        coeffs.push(Complex64::new(c, 0.0));
    }
    Ok(PolyCoeffs::new(coeffs))
}

/// Degree-`degree` truncation of `E^z_{p,q}`.
pub fn exp_big_poly(params: &DeformationParams, degree: usize) -> Result<PolyCoeffs> {
    let pq = params.product();
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut c = 1.0;
    coeffs.push(Complex64::new(c, 0.0));
    for n in 1..=degree {
        c *= ipow(pq, n as i64 - 1) / bracket_ratio(params, n)?;
        coeffs.push(Complex64::new(c, 0.0));
    }
    Ok(PolyCoeffs::new(coeffs))
}

/// Floor below which `|e^z_{p,q}|` is treated as a zero of the denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-250;

/// `f(lambda, z) = e^{lambda z}_{p,q} / e^z_{p,q} - lambda z`.
pub fn f_function(params: &DeformationParams, lambda: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    let den = pq_exp_small(params, z, tol)?.value;
    if den.norm() < DENOMINATOR_FLOOR {
        return Err(PqError::DenominatorUnderflow { magnitude: den.norm() });
    }
    let num = pq_exp_small(params, lambda * z, tol)?.value;
    Ok(num / den - lambda * z)
}

/// `|e^{pz} - e^{qz} - (p-q) z e^z| / max(1, |e^z|)`.
pub fn exp_relation_residual(params: &DeformationParams, z: Complex64, tol: f64) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    let ez = pq_exp_small(params, z, tol)?.value;
    let epz = pq_exp_small(params, z * p, tol)?.value;
    let eqz = pq_exp_small(params, z * q, tol)?.value;
    Ok((epz - eqz - z * (p - q) * ez).norm() / ez.norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{FamilyKind, FamilyPreset, GOLDEN_RATIO};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pq(p: f64, q: f64) -> DeformationParams {
        DeformationParams::new(p, q).unwrap()
    }

    fn fib() -> DeformationParams {
        pq(GOLDEN_RATIO, -1.0 / GOLDEN_RATIO)
    }

    #[test]
    fn derivative_examples() {
        let d = pq_derivative(&PolyCoeffs::monomial(3, c(1.0)), &pq(1.0, 1.0));
        assert_eq!(d, PolyCoeffs::monomial(2, c(3.0)));
        let d = pq_derivative(&PolyCoeffs::monomial(4, c(1.0)), &fib());
        assert_eq!(d.degree(), Some(3));
        assert!((d.coeff(3) - c(3.0)).norm() < 1e-12);
        assert!(pq_derivative(&PolyCoeffs::constant(c(7.0)), &fib()).is_zero());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let params = pq(1.3, 0.6);
        let f = PolyCoeffs::new(vec![c(0.5), c(-1.0), c(2.0), c(0.25), c(-0.75)]);
        let d = pq_derivative(&f, &params);
        for z in [c(0.4), Complex64::new(-0.3, 0.8), c(1.7)] {
            let direct = pq_difference_quotient(&f, &params, z);
            assert!((d.eval(z) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn binomial_poly_examples() {
        assert_eq!(pq_binomial_poly(&fib(), c(3.0), 0), PolyCoeffs::constant(c(1.0)));
        assert_eq!(pq_binomial_poly(&pq(0.3, 4.0), c(2.0), 1).coeffs, vec![c(-2.0), c(1.0)]);
        assert_eq!(
            pq_binomial_poly(&pq(1.0, 2.0), c(1.0), 2).coeffs,
            vec![c(2.0), c(-3.0), c(1.0)]
        );
    }

    #[test]
    fn derivative_binomial_examples() {
        assert_eq!(pq_derivative_binomial_check(&pq(1.0, 1.0), c(1.0), 3), 0.0);
        assert!(pq_derivative_binomial_check(&pq(1.0, 2.0), c(1.0), 3) <= 1e-12);
        assert!(pq_derivative_binomial_check(&fib(), c(0.5), 4) <= 1e-12);
    }

    #[test]
    fn derivative_binomial_all_presets() {
        for preset in crate::numbers::standard_presets() {
            let params = preset.params();
            for n in 1..=10 {
                for a in [c(-2.0), c(0.5), Complex64::new(1.0, 1.0), c(2.0)] {
                    let r = pq_derivative_binomial_check(&params, a, n);
                    assert!(r <= 1e-12, "{} n={n} a={a} r={r}", preset.label());
                }
            }
        }
    }

    #[test]
    fn gauss_binomial_examples() {
        assert_eq!(gauss_binomial_check(&pq(1.4, 0.2), c(1.0), 0).unwrap(), 0.0);
        assert_eq!(gauss_binomial_check(&pq(1.0, 1.0), c(1.0), 4).unwrap(), 0.0);
        assert!(gauss_binomial_check(&pq(1.2, 0.7), c(1.0), 5).unwrap() <= 1e-12);
    }

    #[test]
    fn splitting_law() {
        for preset in crate::numbers::standard_presets() {
            for n in 0..=4 {
                for m in 0..=(8 - n) {
                    let r = splitting_law_residual(&preset.params(), c(0.7), n, m);
                    assert!(r <= 1e-12, "{} {n} {m} {r}", preset.label());
                }
            }
        }
    }

    /// Negative powers follow from extending the splitting law:
    /// `(z - b)^{-k} = 1 / (z - (pq)^{-k} b)^k`. Both splitting forms must
    /// agree with the direct positive power.
    #[test]
    fn negative_binomial_reciprocal() {
        let eval =
            |params: &DeformationParams, a: Complex64, n: u32, z: Complex64| pq_binomial_poly(params, a, n).eval(z);
        let neg = |params: &DeformationParams, b: Complex64, k: u32, z: Complex64| {
            let pq = params.product();
            c(1.0) / eval(params, b * ipow(pq, -(k as i64)), k, z)
        };
        for params in [pq(1.3, 0.6), fib(), pq(2.0, 0.5)] {
            let (p, q) = (params.p(), params.q());
            let a = c(0.4);
            for z in [c(1.9), Complex64::new(0.5, 1.1)] {
                for n in 1..=4u32 {
                    // The identity itself: (z - q^n a)^{-n} = 1/(z - p^{-n} a)^n.
                    let lhs = neg(&params, a * ipow(q, n as i64), n, z);
                    let rhs = c(1.0) / eval(&params, a * ipow(p, -(n as i64)), n, z);
                    assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
                    for k in 1..=n {
                        // (z-a)^{n-k} = (z - p^{-k} a)^n (z - q^n a)^{-k}
                        let whole = eval(&params, a, n - k, z);
                        let split =
                            eval(&params, a * ipow(p, -(k as i64)), n, z) * neg(&params, a * ipow(q, n as i64), k, z);
                        assert!((whole - split).norm() <= 1e-12 * whole.norm().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn exp_examples() {
        let v = pq_exp_small(&fib(), c(0.0), 1e-16).unwrap();
        assert_eq!(v.value, c(1.0));
        assert_eq!(v.classification, SeriesClass::Converged);
        let v = pq_exp_small(&pq(1.0, 1.0), c(1.0), 1e-16).unwrap();
        assert!((v.value.re - std::f64::consts::E).abs() <= 1e-15 * std::f64::consts::E);
        assert_eq!(v.classification, SeriesClass::Converged);
        assert!(v.last_term_magnitude <= 1e-16 * v.value.norm());
    }

    #[test]
    fn exp_fibonacci_oracle() {
        // Partial sums with Fibonacci factorials computed from integers.
        let fibs: Vec<f64> = {
            let mut f = vec![0.0, 1.0];
            for k in 2..40 {
                let next = f[k - 1] + f[k - 2];
                f.push(next);
            }
            f
        };
        let mut fact = 1.0;
        let mut sum = 1.0;
        for f in fibs.iter().take(40).skip(1) {
            fact *= f;
            sum += 1.0 / fact;
        }
        let v = pq_exp_small(&fib(), c(1.0), 1e-17).unwrap();
        assert!((v.value.re - sum).abs() < 1e-14);
    }

    #[test]
    fn exp_big_examples() {
        assert_eq!(pq_exp_big(&fib(), c(0.0), 1e-16).unwrap().value, c(1.0));
        let v = pq_exp_big(&pq(1.0, 1.0), c(1.0), 1e-16).unwrap();
        assert!((v.value.re - std::f64::consts::E).abs() < 1e-14);
        let big = pq_exp_big(&pq(2.0, 0.5), c(0.3), 1e-17).unwrap().value;
        let small = pq_exp_small(&pq(0.5, 2.0), c(0.3), 1e-17).unwrap().value;
        assert!((big - small).norm() < 1e-14);
    }

    #[test]
    fn exp_small_equals_big_with_inverted_bases() {
        for params in [pq(1.3, 0.6), pq(2.0, 1.5), fib(), pq(1.1, 1.1)] {
            let inv = params.inverted().unwrap();
            for z in [c(0.3), Complex64::new(-0.5, 0.4), c(1.2)] {
                let a = pq_exp_small(&params, z, 1e-17).unwrap().value;
                let b = pq_exp_big(&inv, z, 1e-17).unwrap().value;
                assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn derivative_reproduces_exponentials() {
        for preset in crate::numbers::standard_presets() {
            let params = preset.params();
            let n = 20;
            let e = exp_small_poly(&params, n).unwrap();
            let de = pq_derivative(&e, &params);
            let lower = exp_small_poly(&params, n - 1).unwrap();
            assert!(de.max_diff(&lower) <= 1e-12, "{}", preset.label());

            let big = exp_big_poly(&params, n).unwrap();
            let dbig = pq_derivative(&big, &params);
            let shifted = exp_big_poly(&params, n - 1).unwrap().dilate(c(params.product()));
            let scale = shifted.coeffs.iter().fold(1f64, |s, v| s.max(v.norm()));
            assert!(dbig.max_diff(&shifted) <= 1e-12 * scale, "{}", preset.label());
        }
    }

    #[test]
    fn nonsymmetric_small_q_diverges() {
        // [n] -> 1/(1-q) = 2, so the ratio tends to z/2 = 2.5 > 1.
        let params = pq(1.0, 0.5);
        let err = pq_exp_small(&params, c(5.0), 1e-16).unwrap_err();
        assert!(matches!(err, PqError::SeriesDiverged { .. }));
        // Inside the disc of convergence it converges.
        assert!(pq_exp_small(&params, c(1.0), 1e-16).is_ok());
    }

    #[test]
    fn large_argument_entire_series_not_flagged() {
        let v = pq_exp_small(&pq(1.0, 1.0), c(30.0), 1e-16).unwrap();
        assert_eq!(v.classification, SeriesClass::Converged);
        assert!((v.value.re / 30f64.exp() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cap_reports_truncation() {
        let cfg = SeriesConfig {
            tol: 1e-17,
            cap: 5,
            window: 8,
        };
        let v = pq_exp_small_classified(&pq(1.0, 1.0), c(1.0), &cfg).unwrap();
        assert_eq!(v.classification, SeriesClass::TruncatedAtCap);
        assert_eq!(v.terms_used, 5);
    }

    #[test]
    fn f_function_examples() {
        let params = pq(1.3, 0.6);
        for z in [c(0.2), c(0.7), Complex64::new(0.3, -0.4)] {
            let f1 = f_function(&params, c(1.0), z, 1e-17).unwrap();
            assert!((f1 - (c(1.0) - z)).norm() < 1e-12);
        }
        let fp = f_function(&params, c(1.3), c(0.4), 1e-17).unwrap();
        let fq = f_function(&params, c(0.6), c(0.4), 1e-17).unwrap();
        assert!((fp - fq).norm() < 1e-10);
        assert_eq!(f_function(&params, c(0.0), c(0.0), 1e-17).unwrap(), c(1.0));
    }

    #[test]
    fn exp_relation_on_presets() {
        for preset in crate::numbers::standard_presets() {
            for x in [0.1, 0.5, 1.0] {
                let r = exp_relation_residual(&preset.params(), c(x), 1e-17).unwrap();
                assert!(r <= 1e-10, "{} {x} {r}", preset.label());
            }
        }
        let td = FamilyPreset::new(FamilyKind::TammDankov { q: 1.1 }).unwrap().params();
        assert_eq!(exp_relation_residual(&td, c(0.5), 1e-17).unwrap(), 0.0);
    }
}
