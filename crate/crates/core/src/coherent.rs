//! Deformed coherent states, their overlaps and averages, and the
//! coordinate-momentum uncertainty relations.
//!
//! Closed forms are evaluated from the deformed exponential series; every
//! one of them has a matrix counterpart built on truncated vectors so the two
//! can be compared.

use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::{exp_real, f_function, pq_derivative, pq_exp_small, PolyCoeffs, SeriesConfig};
use crate::error::{PqError, Result};
use crate::fock::{
    build_annihilation, build_creation, build_pq_number_op, check_positivity, diag_fn, momentum_op, position_op,
    FockVector, OperatorMatrix, Units,
};
use crate::numbers::DeformationParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest truncation the automatic selection will consider.
pub const MAX_AUTO_DIM: usize = 4096;
/// Default tail tolerance for automatic truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
/// Largest normalized boundary residual accepted by automatic truncation.
pub const AUTO_BOUNDARY_TARGET: f64 = 1e-10;

/// Truncation choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DimChoice {
    Fixed(usize),
    Auto,
}

/// Request for a coherent-state vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentSpec {
    pub alpha: Complex64,
    pub normalized: bool,
    pub dim: DimChoice,
    pub tail_tol: f64,
}

impl CoherentSpec {
    pub fn new(alpha: Complex64) -> Self {
        Self {
            alpha,
            normalized: true,
            dim: DimChoice::Auto,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = DimChoice::Fixed(dim);
        self
    }

    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }
}

/// Squared magnitudes of a coefficient sequence, generated until the
/// remainder is negligible, with a geometric bound for what is left.
#[derive(Debug, Clone)]
pub struct MassProfile {
    masses: Vec<f64>,
    remainder: f64,
}

impl MassProfile {
    /// Builds the profile from `c_start` and the step `c_n = step(n, c_{n-1})`.
    /// Indices below `start` have zero coefficient.
    pub fn generate(
        start: usize,
        c_start: Complex64,
        step: impl Fn(usize, Complex64) -> Result<Complex64>,
    ) -> Result<Self> {
        const LIMIT: usize = 2 * MAX_AUTO_DIM;
        let mut masses = vec![0.0; start];
        let mut c = c_start;
        masses.push(c.norm_sqr());
        let mut total = c.norm_sqr();
        let mut n = start;
        loop {
            n += 1;
            if n >= LIMIT {
                let last = *masses.last().unwrap_or(&0.0);
                return Err(PqError::SeriesDiverged {
                    terms: n,
                    last_term: last,
                });
            }
            let next = step(n, c)?;
            let m = next.norm_sqr();
            if !m.is_finite() {
                return Err(PqError::NonFiniteResult { n: n as i64 });
            }
            let prev = c.norm_sqr();
            masses.push(m);
            total += m;
            c = next;
            if m == 0.0 {
                return Ok(Self { masses, remainder: 0.0 });
            }
            let r = m / prev;
            if n > start + 4 && r < 0.5 && m <= 1e-40 * total {
                return Ok(Self {
                    masses,
                    remainder: m * r / (1.0 - r),
                });
            }
        }
    }

    /// Mass at index `k` (zero beyond the generated range).
    pub fn mass(&self, k: usize) -> f64 {
        self.masses.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.remainder
    }

    /// Mass at indices `>= k`.
    pub fn tail_from(&self, k: usize) -> f64 {
        self.masses.iter().skip(k).sum::<f64>() + self.remainder
    }

    /// Mass at indices `>= k`, relative to the total.
    pub fn relative_tail_from(&self, k: usize) -> f64 {
        let total = self.total();
        if total == 0.0 {
            0.0
        } else {
            self.tail_from(k) / total
        }
    }

    /// Smallest power of two `>= 4` with relative tail beyond the
    /// truncation at most `tol` and boundary residual
    /// `|alpha| |c_{dim-1}| / |c|` at most [`AUTO_BOUNDARY_TARGET`].
    ///
    /// The boundary term is exactly the eigen-relation residual of the
    /// truncated annihilator, which the tail alone does not control when
    /// `[n]` grows quickly.
    pub fn suggest_dim(&self, tol: f64, alpha_abs: f64) -> Result<usize> {
        let total = self.total();
        let boundary = |dim: usize| {
            let m = self.masses.get(dim - 1).copied().unwrap_or(0.0);
            if total == 0.0 {
                0.0
            } else {
                alpha_abs * (m / total).sqrt()
            }
        };
        let mut dim = 4;
        while dim <= MAX_AUTO_DIM {
            if self.relative_tail_from(dim) <= tol && boundary(dim) <= AUTO_BOUNDARY_TARGET {
                return Ok(dim);
            }
            dim *= 2;
        }
        Err(PqError::TailTooLarge {
            tail: self.relative_tail_from(MAX_AUTO_DIM),
            tol,
            dim: MAX_AUTO_DIM,
        })
    }
}

fn positive_bracket(params: &DeformationParams, n: usize) -> Result<f64> {
    let b = params.bracket(n as i64);
    if b > 0.0 {
        Ok(b)
    } else if b == 0.0 {
        Err(PqError::DivisionByZeroPqNumber { m: n as i64 })
    } else {
        Err(PqError::NegativePqNumber { n: n as i64, value: b })
    }
}

/// Mass profile of `|alpha> = sum alpha^n / sqrt([n]!) |n>`.
pub fn coherent_profile(params: &DeformationParams, alpha: Complex64) -> Result<MassProfile> {
    MassProfile::generate(0, Complex64::new(1.0, 0.0), |n, c| {
        Ok(c * alpha / positive_bracket(params, n)?.sqrt())
    })
}

/// Mass profile of the primed state `|alpha'/lambda>` with coefficients
/// `[n] alpha^{n-1} lambda^{-n} / sqrt([n]!)`.
pub fn primed_profile(params: &DeformationParams, alpha: Complex64, lambda: Complex64) -> Result<MassProfile> {
    MassProfile::generate(1, Complex64::new(1.0, 0.0) / lambda, |n, c| {
        let b = positive_bracket(params, n)?;
        let prev = positive_bracket(params, n - 1)?;
        Ok(c * (b / prev) * alpha / (lambda * b.sqrt()))
    })
}

/// Unnormalized coefficients `alpha^n / sqrt([n]!)`, `n < dim`.
pub fn coherent_coeffs(params: &DeformationParams, alpha: Complex64, dim: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(dim);
    let mut c = Complex64::new(1.0, 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / positive_bracket(params, n)?.sqrt();
        }
        out.push(c);
    }
    Ok(out)
}

/// Coefficients of `|alpha'/lambda>`: `[n] alpha^{n-1} lambda^{-n} / sqrt([n]!)`.
///
/// With `lambda = 1` this is `a^dagger |alpha>`; in general it is the
/// deformed derivative in `alpha` of the coefficients of `|alpha/lambda>`.
pub fn primed_coeffs(
    params: &DeformationParams,
    alpha: Complex64,
    lambda: Complex64,
    dim: usize,
) -> Result<Vec<Complex64>> {
    let mut out = vec![ZERO; dim];
    if dim < 2 {
        return Ok(out);
    }
    // c_n = [n] alpha^{n-1} / (lambda^n sqrt([n]!)); start at n = 1.
    let mut c = Complex64::new(1.0, 0.0) / lambda;
    out[1] = c;
    for n in 2..dim {
        let b = positive_bracket(params, n)?;
        let prev = positive_bracket(params, n - 1)?;
        c = c * (b / prev) * alpha / (lambda * b.sqrt());
        out[n] = c;
    }
    Ok(out)
}

fn resolve_dim(profile: &MassProfile, spec: &CoherentSpec) -> Result<usize> {
    match spec.dim {
        DimChoice::Fixed(d) if d < 2 => Err(PqError::InvalidDimension { dim: d }),
        DimChoice::Fixed(d) => Ok(d),
        DimChoice::Auto => profile.suggest_dim(spec.tail_tol, spec.alpha.norm()),
    }
}

/// Smallest adequate power-of-two truncation for `|alpha>`.
pub fn suggest_dim(params: &DeformationParams, alpha: Complex64, tail_tol: f64) -> Result<usize> {
    coherent_profile(params, alpha)?.suggest_dim(tail_tol, alpha.norm())
}

/// Truncated coherent-state vector with its tail estimate.
pub fn coherent_vector(params: &DeformationParams, spec: &CoherentSpec) -> Result<FockVector> {
    let x = spec.alpha.norm_sqr();
    let series = pq_exp_small(params, Complex64::new(x, 0.0), SeriesConfig::default().tol)?;
    let profile = coherent_profile(params, spec.alpha)?;
    let dim = resolve_dim(&profile, spec)?;
    check_positivity(params, dim)?;
    let coeffs = coherent_coeffs(params, spec.alpha, dim)?;
    let rel_tail = profile.relative_tail_from(dim);
    if rel_tail > spec.tail_tol {
        return Err(PqError::TailTooLarge {
            tail: rel_tail,
            tol: spec.tail_tol,
            dim,
        });
    }
    let v = FockVector {
        coeffs,
        tail_mass: profile.tail_from(dim),
        normalized: false,
    };
    if spec.normalized {
        let inv = 1.0 / series.value.re.sqrt();
        Ok(FockVector {
            coeffs: v.coeffs.iter().map(|c| c * inv).collect(),
            tail_mass: rel_tail,
            normalized: true,
        })
    } else {
        Ok(v)
    }
}

/// `<beta|alpha> = e^{conj(beta) alpha}_{p,q}`, optionally divided by
/// `sqrt(e^{|alpha|^2} e^{|beta|^2})`.
pub fn coherent_inner(
    params: &DeformationParams,
    alpha: Complex64,
    beta: Complex64,
    normalized: bool,
) -> Result<Complex64> {
    let tol = SeriesConfig::default().tol;
    let raw = pq_exp_small(params, beta.conj() * alpha, tol)?.value;
    if !normalized {
        return Ok(raw);
    }
    let na = exp_real(params, alpha.norm_sqr())?;
    let nb = exp_real(params, beta.norm_sqr())?;
    Ok(raw / (na * nb).sqrt())
}

/// Residual norms of the scaling and primed-state relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledRelations {
    /// `a |alpha/lambda> - (alpha/lambda) |alpha/lambda>`.
    pub eigen: f64,
    /// `lambda^N |alpha> - |lambda alpha>`.
    pub lambda_power: f64,
    /// `a^dagger |alpha> - |alpha'>`.
    pub creation_primed: f64,
    /// `D_{p,q} |alpha/lambda> - |alpha'/lambda>`, the derivative taken in `alpha`.
    pub derivative_primed: f64,
    /// `a |alpha'/lambda> - (q alpha/lambda)|alpha'/lambda> - (1/lambda)|p alpha/lambda>`.
    pub three_term: f64,
}

impl ScaledRelations {
    pub fn worst(&self) -> f64 {
        self.eigen
            .max(self.lambda_power)
            .max(self.creation_primed)
            .max(self.derivative_primed)
            .max(self.three_term)
    }
}

/// Checks the scaling relations on unnormalized vectors at truncation `dim`.
/// Relations involving the annihilator are compared on the first `dim - 1`
/// components.
pub fn scaled_state_relations(
    params: &DeformationParams,
    alpha: Complex64,
    lambda: Complex64,
    dim: usize,
) -> Result<ScaledRelations> {
    if lambda == ZERO {
        return Err(PqError::InvalidParameter("lambda must be nonzero".into()));
    }
    let a = build_annihilation(params, dim)?;
    let ad = build_creation(params, dim)?;
    let inner = dim - 1;
    let vec = |c: Vec<Complex64>| FockVector::new(c);

    let scaled = vec(coherent_coeffs(params, alpha / lambda, dim)?);
    let eigen = scaled.apply(&a).distance_prefix(&scaled.scaled(alpha / lambda), inner);

    let base = vec(coherent_coeffs(params, alpha, dim)?);
    let lambda_n: Vec<Complex64> = (0..dim).map(|n| lambda.powi(n as i32)).collect();
    let powered = FockVector::new(base.coeffs.iter().zip(&lambda_n).map(|(c, l)| c * l).collect());
    let lambda_power = powered.distance(&vec(coherent_coeffs(params, lambda * alpha, dim)?));

    let one = Complex64::new(1.0, 0.0);
    let primed_one = vec(primed_coeffs(params, alpha, one, dim)?);
    let creation_primed = base.apply(&ad).distance(&primed_one);

    // Independent route: differentiate each coefficient, a monomial in alpha.
    let mut fact = 1.0;
    let mut derived = Vec::with_capacity(dim);
    for n in 0..dim {
        if n > 0 {
            fact *= params.bracket(n as i64);
        }
        let mono = PolyCoeffs::monomial(n, one / (lambda.powi(n as i32) * fact.sqrt()));
        derived.push(pq_derivative(&mono, params).eval(alpha));
    }
    let primed = vec(primed_coeffs(params, alpha, lambda, dim)?);
    let derivative_primed = vec(derived).distance(&primed);

    let rhs = primed
        .scaled(params.q() * alpha / lambda)
        .add(&vec(coherent_coeffs(params, params.p() * alpha / lambda, dim)?).scaled(one / lambda));
    let three_term = primed.apply(&a).distance_prefix(&rhs, inner);

    Ok(ScaledRelations {
        eigen,
        lambda_power,
        creation_primed,
        derivative_primed,
        three_term,
    })
}

/// Unnormalized averages `<alpha| O |alpha>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentAverages {
    /// `<alpha|alpha> = e^{|alpha|^2}`.
    pub norm: f64,
    pub a: Complex64,
    pub a_dag: Complex64,
    pub a2: Complex64,
    pub a_dag2: Complex64,
    pub number: f64,
    /// `<[N+1]>` from `p |alpha|^2 e^{|alpha|^2} + e^{q|alpha|^2}`.
    pub number_up: f64,
    /// `<[N+1]>` from `q |alpha|^2 e^{|alpha|^2} + e^{p|alpha|^2}`.
    pub number_up_alt: f64,
}

impl CoherentAverages {
    /// Every average divided by `<alpha|alpha>`.
    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.norm;
        Self {
            norm: 1.0,
            a: self.a * s,
            a_dag: self.a_dag * s,
            a2: self.a2 * s,
            a_dag2: self.a_dag2 * s,
            number: self.number * s,
            number_up: self.number_up * s,
            number_up_alt: self.number_up_alt * s,
        }
    }
}

/// Closed-form averages; fails with [`PqError::SelfCheckFailed`] if the two
/// forms of `<[N+1]>` disagree beyond `1e-10` relative.
pub fn coherent_averages(params: &DeformationParams, alpha: Complex64) -> Result<CoherentAverages> {
    let x = alpha.norm_sqr();
    let (p, q) = (params.p(), params.q());
    let e = exp_real(params, x)?;
    let number_up = p * x * e + exp_real(params, q * x)?;
    let number_up_alt = q * x * e + exp_real(params, p * x)?;
    let gap = (number_up - number_up_alt).abs() / number_up.abs().max(1.0);
    if gap > 1e-10 {
        return Err(PqError::SelfCheckFailed {
            what: "number_up forms",
            gap,
        });
    }
    Ok(CoherentAverages {
        norm: e,
        a: alpha * e,
        a_dag: alpha.conj() * e,
        a2: alpha * alpha * e,
        a_dag2: alpha.conj() * alpha.conj() * e,
        number: x * e,
        number_up,
        number_up_alt,
    })
}

fn expectation(v: &FockVector, op: &OperatorMatrix) -> Complex64 {
    v.inner(&v.apply(op))
}

/// Matrix averages on the unnormalized truncated vector.
pub fn averages_numeric(params: &DeformationParams, alpha: Complex64, dim: usize) -> Result<CoherentAverages> {
    let v = coherent_vector(params, &CoherentSpec::new(alpha).with_dim(dim).unnormalized())?;
    let a = build_annihilation(params, dim)?;
    let ad = build_creation(params, dim)?;
    let num = build_pq_number_op(params, dim)?;
    let num_up = diag_fn("[N+1]", dim, |n| params.bracket(n + 1))?;
    let up = expectation(&v, &num_up).re;
    Ok(CoherentAverages {
        norm: v.norm_sqr(),
        a: expectation(&v, &a),
        a_dag: expectation(&v, &ad),
        a2: expectation(&v, &a.mul(&a)),
        a_dag2: expectation(&v, &ad.mul(&ad)),
        number: expectation(&v, &num).re,
        number_up: up,
        number_up_alt: up,
    })
}

/// Which route produced an [`UncertaintyReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UncertaintySource {
    ClosedForm,
    MatrixNumeric,
    SymmetricForm,
}

impl UncertaintySource {
    pub fn as_str(&self) -> &'static str {
        match self {
            UncertaintySource::ClosedForm => "closed_form",
            UncertaintySource::MatrixNumeric => "matrix_numeric",
            UncertaintySource::SymmetricForm => "symmetric_form",
        }
    }
}

/// Coordinate and momentum dispersions and their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    /// `<Delta X^2>`.
    pub dx2: f64,
    /// `<Delta P^2>`.
    pub dp2: f64,
    /// `Delta X Delta P`.
    pub product: f64,
    pub source: UncertaintySource,
}

impl UncertaintyReport {
    pub fn from_dispersions(dx2: f64, dp2: f64, source: UncertaintySource) -> Self {
        Self {
            dx2,
            dp2,
            product: (dx2 * dp2).sqrt(),
            source,
        }
    }

    /// Relative gap between the two products.
    pub fn relative_gap(&self, other: &Self) -> f64 {
        (self.product - other.product).abs() / self.product.abs().max(other.product.abs()).max(1e-300)
    }
}

/// Agreement required between the two orderings of the bracket.
pub const SWAP_SELF_CHECK_TOL: f64 = 1e-8;

/// `(q-1) x + e^{px}/e^x`, cross-checked against its `p <-> q` mirror.
pub fn uncertainty_bracket(params: &DeformationParams, x: f64) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    let e = exp_real(params, x)?;
    let primary = (q - 1.0) * x + exp_real(params, p * x)? / e;
    let mirror = (p - 1.0) * x + exp_real(params, q * x)? / e;
    let gap = (primary - mirror).abs() / primary.abs().max(1.0);
    if gap > SWAP_SELF_CHECK_TOL {
        return Err(PqError::SelfCheckFailed {
            what: "p<->q bracket",
            gap,
        });
    }
    Ok(primary)
}

/// Dispersions from the closed form.
pub fn uncertainty_closed(params: &DeformationParams, alpha: Complex64, units: &Units) -> Result<UncertaintyReport> {
    let b = uncertainty_bracket(params, alpha.norm_sqr())?;
    let dx2 = units.hbar / (2.0 * units.mass * units.omega) * b;
    let dp2 = units.mass * units.hbar * units.omega / 2.0 * b;
    Ok(UncertaintyReport::from_dispersions(
        dx2,
        dp2,
        UncertaintySource::ClosedForm,
    ))
}

/// Product from the `p,q`-symmetric form
/// `(hbar/4)(f(p, x) + f(q, x) + 2(p + q - 1) x)`.
pub fn uncertainty_symmetric_form(
    params: &DeformationParams,
    alpha: Complex64,
    units: &Units,
) -> Result<UncertaintyReport> {
    let x = alpha.norm_sqr();
    let (p, q) = (params.p(), params.q());
    let tol = SeriesConfig::default().tol;
    let z = Complex64::new(x, 0.0);
    let fp = f_function(params, p.into(), z, tol)?.re;
    let fq = f_function(params, q.into(), z, tol)?.re;
    // Twice the bracket.
    let twice = fp + fq + 2.0 * (p + q - 1.0) * x;
    let dx2 = units.hbar / (4.0 * units.mass * units.omega) * twice;
    let dp2 = units.mass * units.hbar * units.omega / 4.0 * twice;
    Ok(UncertaintyReport::from_dispersions(
        dx2,
        dp2,
        UncertaintySource::SymmetricForm,
    ))
}

/// First moments and dispersions of `X`, `P` on a normalized vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub dx2: f64,
    pub dp2: f64,
}

/// Moments of `X = x_scale (a^dagger + a)`, `P = i p_scale (a^dagger - a)` in
/// the (renormalized) state `v`.
pub fn moments(params: &DeformationParams, v: &FockVector, units: &Units) -> Result<Moments> {
    let dim = v.dim();
    let x = position_op(params, dim, units)?;
    let p = momentum_op(params, dim, units)?;
    let norm = v.norm_sqr();
    let mean_x = expectation(v, &x).re / norm;
    let mean_p = expectation(v, &p).re / norm;
    let x2 = expectation(v, &x.mul(&x)).re / norm;
    let p2 = expectation(v, &p.mul(&p)).re / norm;
    Ok(Moments {
        mean_x,
        mean_p,
        dx2: x2 - mean_x * mean_x,
        dp2: p2 - mean_p * mean_p,
    })
}

/// Dispersions computed from matrices on the truncated coherent vector.
pub fn uncertainty_numeric(
    params: &DeformationParams,
    alpha: Complex64,
    dim: DimChoice,
    units: &Units,
) -> Result<(UncertaintyReport, Moments)> {
    let mut spec = CoherentSpec::new(alpha);
    spec.dim = dim;
    let v = coherent_vector(params, &spec)?;
    let m = moments(params, &v, units)?;
    Ok((
        UncertaintyReport::from_dispersions(m.dx2, m.dp2, UncertaintySource::MatrixNumeric),
        m,
    ))
}

/// Second-order one-sided finite-difference slope of `Delta X Delta P` in
/// `|alpha|^2` at zero, for step `h`.
pub fn small_alpha_slope(params: &DeformationParams, h: f64, units: &Units) -> Result<f64> {
    let at = |x: f64| -> Result<f64> { Ok(uncertainty_closed(params, Complex64::new(x.sqrt(), 0.0), units)?.product) };
    Ok((-3.0 * at(0.0)? + 4.0 * at(h)? - at(2.0 * h)?) / (2.0 * h))
}
