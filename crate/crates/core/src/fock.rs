//! Truncated Fock-space representation of the deformed oscillator.
//!
//! Basis vectors `|n>_{p,q}` are the canonical unit vectors `e_n`, so every
//! operator is a dense `dim x dim` matrix. The last row and column of any
//! product of ladder matrices are wrong by construction (the level `dim` is
//! missing), hence every algebraic check compares only the leading
//! `(dim-1) x (dim-1)` block.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PqError, Result};
use crate::numbers::{ipow, DeformationParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Physical scales; every module defaults to `hbar = m = omega = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
        }
    }
}

impl Units {
    /// `sqrt(hbar / (2 m omega))`, the coordinate prefactor.
    pub fn x_scale(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega)).sqrt()
    }

    /// `sqrt(m hbar omega / 2)`, the momentum prefactor.
    pub fn p_scale(&self) -> f64 {
        (self.mass * self.hbar * self.omega / 2.0).sqrt()
    }
}

/// Dense operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: String,
    pub entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(label: impl Into<String>, entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim < 2 || entries.ncols() != dim {
            return Err(PqError::InvalidDimension { dim });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PqError::NonFiniteResult { n: dim as i64 });
        }
        Ok(Self {
            label: label.into(),
            entries,
        })
    }

    pub fn diagonal(label: impl Into<String>, values: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(label, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v)))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new("I", DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            label: format!("({})^dagger", self.label),
            entries: self.entries.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            label: format!("{} {}", self.label, other.label),
            entries: &self.entries * &other.entries,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            label: format!("{} + {}", self.label, other.label),
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            label: format!("{} - {}", self.label, other.label),
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            label: format!("{s} {}", self.label),
            entries: &self.entries * s,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.entries * x).iter().copied().collect()
    }

    /// Largest entry magnitude of the leading `(dim-1)` block.
    pub fn interior_max_abs(&self) -> f64 {
        let k = self.dim() - 1;
        self.entries
            .view((0, 0), (k, k))
            .iter()
            .fold(0.0, |s, z| s.max(z.norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |s, z| s.max(z.norm()))
    }

    /// Diagonal entries as reals (imaginary parts dropped).
    pub fn diagonal_values(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }
}

/// A matrix identity residual on the leading block, absolute and scaled by
/// `max(1, largest operand entry)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub absolute: f64,
    pub scaled: f64,
}

impl Residual {
    pub const ZERO: Residual = Residual {
        absolute: 0.0,
        scaled: 0.0,
    };

    /// Residual of `sum(terms)` on the leading block.
    pub fn interior(terms: &[&OperatorMatrix]) -> Self {
        let k = terms[0].dim() - 1;
        let mut total = DMatrix::<Complex64>::zeros(k, k);
        let mut scale = 1f64;
        for t in terms {
            total += t.entries.view((0, 0), (k, k));
            scale = scale.max(t.interior_max_abs());
        }
        let absolute = total.iter().fold(0f64, |s, z| s.max(z.norm()));
        Self {
            absolute,
            scaled: absolute / scale,
        }
    }

    pub fn max(self, other: Self) -> Self {
        Self {
            absolute: self.absolute.max(other.absolute),
            scaled: self.scaled.max(other.scaled),
        }
    }
}

/// Coefficient vector over the truncated basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockVector {
    pub coeffs: Vec<Complex64>,
    /// Estimated squared-norm mass beyond the truncation, in the same
    /// normalization as `coeffs`.
    pub tail_mass: f64,
    pub normalized: bool,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs,
            tail_mass: 0.0,
            normalized: false,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// Canonical basis vector `|n>`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(PqError::IndexOutOfRange { index: n as i64, dim });
        }
        let mut v = Self::zeros(dim);
        v.coeffs[n] = ONE;
        v.normalized = true;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            tail_mass: self.tail_mass * s.norm_sqr(),
            normalized: false,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    /// Unit vector in the same direction; the tail mass is rescaled with it.
    pub fn normalize(&self) -> Self {
        let n2 = self.norm_sqr();
        let inv = 1.0 / n2.sqrt();
        Self {
            coeffs: self.coeffs.iter().map(|c| c * inv).collect(),
            tail_mass: self.tail_mass / n2,
            normalized: true,
        }
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Self {
        Self::new(op.apply(&self.coeffs))
    }

    /// Euclidean distance over the first `len` components.
    pub fn distance_prefix(&self, other: &Self, len: usize) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .take(len)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.distance_prefix(other, self.dim().max(other.dim()))
    }
}

/// Fails with [`PqError::NegativePqNumber`] unless `[n] >= 0` for `1 <= n < dim`.
pub fn check_positivity(params: &DeformationParams, dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(PqError::InvalidDimension { dim });
    }
    for n in 1..dim as i64 {
        let v = params.bracket(n);
        if !v.is_finite() {
            return Err(PqError::NonFiniteResult { n });
        }
        if v < 0.0 {
            return Err(PqError::NegativePqNumber { n, value: v });
        }
    }
    Ok(())
}

/// Diagonal operator `f(N)` for a function of the level index.
pub fn diag_fn(label: &str, dim: usize, f: impl Fn(i64) -> f64) -> Result<OperatorMatrix> {
    let values: Vec<f64> = (0..dim as i64).map(f).collect();
    OperatorMatrix::diagonal(label, &values)
}

/// `a_{p,q}` with `<n-1| a |n> = sqrt([n])`.
pub fn build_annihilation(params: &DeformationParams, dim: usize) -> Result<OperatorMatrix> {
    check_positivity(params, dim)?;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new(params.bracket(n as i64).sqrt(), 0.0);
    }
    OperatorMatrix::new("a", m)
}

/// `a^dagger_{p,q}`, the conjugate transpose of [`build_annihilation`].
pub fn build_creation(params: &DeformationParams, dim: usize) -> Result<OperatorMatrix> {
    let mut a = build_annihilation(params, dim)?.adjoint();
    a.label = "a^dagger".into();
    Ok(a)
}

/// `[N]_{p,q} = diag([0], [1], ..., [dim-1])`.
pub fn build_pq_number_op(params: &DeformationParams, dim: usize) -> Result<OperatorMatrix> {
    diag_fn("[N]", dim, |n| params.bracket(n))
}

/// Residuals of the deformed commutation relations on the leading block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraReport {
    /// `a a^dagger - p a^dagger a - q^N`.
    pub p_relation: Residual,
    /// `a a^dagger - q a^dagger a - p^N`.
    pub q_relation: Residual,
    /// `[a, a^dagger] - ([N+1] - [N])`.
    pub commutator: Residual,
    /// `[[N], a^dagger]` against both of its closed forms.
    pub number_commutator: Residual,
    /// `a^dagger f([N+1]) - f([N]) a^dagger` and `a f([N]) - f([N+1]) a`
    /// for `f(x) = x` and `f(x) = x^2`.
    pub intertwining: Residual,
}

impl AlgebraReport {
    pub fn worst(&self) -> Residual {
        self.p_relation
            .max(self.q_relation)
            .max(self.commutator)
            .max(self.number_commutator)
            .max(self.intertwining)
    }
}

/// Checks the deformed oscillator algebra at truncation `dim`.
pub fn algebra_residuals(params: &DeformationParams, dim: usize) -> Result<AlgebraReport> {
    let (p, q) = (params.p(), params.q());
    let a = build_annihilation(params, dim)?;
    let ad = build_creation(params, dim)?;
    let aad = a.mul(&ad);
    let ada = ad.mul(&a);
    let p_pow = diag_fn("p^N", dim, |n| ipow(p, n))?;
    let q_pow = diag_fn("q^N", dim, |n| ipow(q, n))?;
    let num = build_pq_number_op(params, dim)?;
    let num_up = diag_fn("[N+1]", dim, |n| params.bracket(n + 1))?;
    // [N-1] only enters through products with a^dagger, whose first row is
    // zero, so its value on the vacuum never contributes.
    let num_down = diag_fn("[N-1]", dim, |n| if n == 0 { 0.0 } else { params.bracket(n - 1) })?;

    let p_relation = Residual::interior(&[&aad, &ada.scale((-p).into()), &q_pow.scale((-1.0).into())]);
    let q_relation = Residual::interior(&[&aad, &ada.scale((-q).into()), &p_pow.scale((-1.0).into())]);
    let commutator = Residual::interior(&[&aad, &ada.scale((-1.0).into()), &num_up.scale((-1.0).into()), &num]);

    let lhs = num.mul(&ad).sub(&ad.mul(&num));
    let form_left = num.sub(&num_down).mul(&ad);
    let form_right = ad.mul(&num_up.sub(&num));
    let number_commutator = Residual::interior(&[&lhs, &form_left.scale((-1.0).into())])
        .max(Residual::interior(&[&lhs, &form_right.scale((-1.0).into())]));

    let square = |m: &OperatorMatrix| m.mul(m);
    let mut intertwining = Residual::ZERO;
    for (f_num, f_up) in [(num.clone(), num_up.clone()), (square(&num), square(&num_up))] {
        let creation = Residual::interior(&[&ad.mul(&f_up), &f_num.mul(&ad).scale((-1.0).into())]);
        let annihilation = Residual::interior(&[&a.mul(&f_num), &f_up.mul(&a).scale((-1.0).into())]);
        intertwining = intertwining.max(creation).max(annihilation);
    }

    Ok(AlgebraReport {
        p_relation,
        q_relation,
        commutator,
        number_commutator,
        intertwining,
    })
}

/// Worst scaled residual of the number-operator relations
/// `[N+1] = (p+q)[N] - pq[N-1]`, `p^N = p[N] - pq[N-1]`,
/// `q^N = q[N] - pq[N-1]` and `[N+1] = p[N] + q^N = q[N] + p^N`.
///
/// The vacuum level needs `[-1] = -1/(pq)` and is skipped when `pq = 0`.
pub fn number_relation_residuals(params: &DeformationParams, dim: usize) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    let pq = p * q;
    let start = if pq == 0.0 { 1 } else { 0 };
    let mut worst = 0f64;
    let mut record = |lhs: f64, terms: &[f64]| {
        let rhs: f64 = terms.iter().sum();
        let scale = terms.iter().fold(1f64.max(lhs.abs()), |s, t| s.max(t.abs()));
        worst = worst.max((lhs - rhs).abs() / scale);
    };
    for n in start..(dim as i64 - 1) {
        let (b, up, down) = (params.bracket(n), params.bracket(n + 1), params.bracket(n - 1));
        record(up, &[(p + q) * b, -pq * down]);
        record(ipow(p, n), &[p * b, -pq * down]);
        record(ipow(q, n), &[q * b, -pq * down]);
        record(up, &[p * b, ipow(q, n)]);
        record(up, &[q * b, ipow(p, n)]);
    }
    if worst.is_finite() {
        Ok(worst)
    } else {
        Err(PqError::NonFiniteResult { n: dim as i64 })
    }
}

/// `H = (hbar omega / 2)([N] + [N+1])`.
pub fn hamiltonian(params: &DeformationParams, dim: usize, hbar_omega: f64) -> Result<OperatorMatrix> {
    check_positivity(params, dim)?;
    diag_fn("H", dim, |n| {
        0.5 * hbar_omega * (params.bracket(n) + params.bracket(n + 1))
    })
}

/// `H` against `(hbar omega / 2)(a a^dagger + a^dagger a)` on the leading block.
pub fn hamiltonian_residual(params: &DeformationParams, dim: usize, hbar_omega: f64) -> Result<Residual> {
    let h = hamiltonian(params, dim, hbar_omega)?;
    let a = build_annihilation(params, dim)?;
    let ad = build_creation(params, dim)?;
    let ladder = a.mul(&ad).add(&ad.mul(&a)).scale((0.5 * hbar_omega).into());
    Ok(Residual::interior(&[&h, &ladder.scale((-1.0).into())]))
}

/// Compares `a_{p,q}` with `a sqrt([N]/N)` and `sqrt([N+1]/(N+1)) a` built
/// from the undeformed ladder matrix, with `[0]/0` taken as its limit `1`.
pub fn nonlinear_map_check(params: &DeformationParams, dim: usize) -> Result<f64> {
    for n in 1..dim as i64 {
        if params.bracket(n) <= 0.0 {
            return Err(PqError::NegativePqNumber {
                n,
                value: params.bracket(n),
            });
        }
    }
    let deformed = build_annihilation(params, dim)?;
    let classical = DeformationParams::new(1.0, 1.0)?;
    let a = build_annihilation(&classical, dim)?;
    let ratio = |n: i64| {
        if n == 0 {
            1.0
        } else {
            (params.bracket(n) / n as f64).sqrt()
        }
    };
    let right = diag_fn("sqrt([N]/N)", dim, ratio)?;
    let left = diag_fn("sqrt([N+1]/(N+1))", dim, |n| ratio(n + 1))?;
    let r1 = Residual::interior(&[&deformed, &a.mul(&right).scale((-1.0).into())]);
    let r2 = Residual::interior(&[&deformed, &left.mul(&a).scale((-1.0).into())]);
    Ok(r1.absolute.max(r2.absolute))
}

/// Largest distance between `(a^dagger)^n |0> / sqrt([n]!)` and `e_n`.
pub fn basis_state_residual(params: &DeformationParams, dim: usize) -> Result<f64> {
    let ad = build_creation(params, dim)?;
    let mut v = FockVector::basis(dim, 0)?;
    let mut fact = 1.0;
    let mut worst = 0f64;
    for n in 0..dim {
        if n > 0 {
            v = v.apply(&ad);
            fact *= params.bracket(n as i64);
        }
        let e = FockVector::basis(dim, n)?;
        worst = worst.max(v.scaled(Complex64::new(1.0 / fact.sqrt(), 0.0)).distance(&e));
    }
    Ok(worst)
}

/// `X = sqrt(hbar/2m omega)(a^dagger + a)`.
pub fn position_op(params: &DeformationParams, dim: usize, units: &Units) -> Result<OperatorMatrix> {
    let a = build_annihilation(params, dim)?;
    let mut x = a.adjoint().add(&a).scale(units.x_scale().into());
    x.label = "X".into();
    Ok(x)
}

/// `P = i sqrt(m hbar omega / 2)(a^dagger - a)`.
pub fn momentum_op(params: &DeformationParams, dim: usize, units: &Units) -> Result<OperatorMatrix> {
    let a = build_annihilation(params, dim)?;
    let mut p = a.adjoint().sub(&a).scale(Complex64::new(0.0, units.p_scale()));
    p.label = "P".into();
    Ok(p)
}

/// True when `[n+1] > [n]` for every `0 <= n < dim - 1`.
pub fn spectrum_increasing(params: &DeformationParams, dim: usize) -> bool {
    (0..dim as i64 - 1).all(|n| params.bracket(n + 1) > params.bracket(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{standard_presets, GOLDEN_RATIO};

    fn pq(p: f64, q: f64) -> DeformationParams {
        DeformationParams::new(p, q).unwrap()
    }

    fn fib() -> DeformationParams {
        pq(GOLDEN_RATIO, -1.0 / GOLDEN_RATIO)
    }

    fn subdiag(m: &OperatorMatrix) -> Vec<f64> {
        (1..m.dim()).map(|n| m.entries[(n - 1, n)].re).collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn annihilation_examples() {
        let a = build_annihilation(&pq(1.0, 1.0), 4).unwrap();
        assert!(close(&subdiag(&a), &[1.0, 2f64.sqrt(), 3f64.sqrt()], 1e-15));
        let a = build_annihilation(&fib(), 5).unwrap();
        assert!(close(&subdiag(&a), &[1.0, 1.0, 2f64.sqrt(), 3f64.sqrt()], 1e-14));
        let a = build_annihilation(&pq(1.0, 2.0), 3).unwrap();
        assert!(close(&subdiag(&a), &[1.0, 3f64.sqrt()], 1e-15));
        // Only the superdiagonal is populated.
        let nonzero = a.entries.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn creation_is_adjoint() {
        let ad = build_creation(&pq(1.0, 1.0), 3).unwrap();
        assert_eq!(ad.entries[(1, 0)].re, 1.0);
        assert_eq!(ad.entries[(2, 1)].re, 2f64.sqrt());
        for params in [fib(), pq(1.3, 0.8)] {
            let a = build_annihilation(&params, 6).unwrap();
            let ad = build_creation(&params, 6).unwrap();
            assert_eq!(ad.entries, a.entries.adjoint());
        }
        let a = build_annihilation(&fib(), 5).unwrap();
        let ad = build_creation(&fib(), 5).unwrap();
        assert!(close(&ad.mul(&a).diagonal_values(), &[0.0, 1.0, 1.0, 2.0, 3.0], 1e-14));
    }

    #[test]
    fn number_op_examples() {
        let n = build_pq_number_op(&pq(1.0, 1.0), 4).unwrap();
        assert_eq!(n.diagonal_values(), vec![0.0, 1.0, 2.0, 3.0]);
        let n = build_pq_number_op(&fib(), 6).unwrap();
        assert!(close(&n.diagonal_values(), &[0.0, 1.0, 1.0, 2.0, 3.0, 5.0], 1e-13));
        let n = build_pq_number_op(&pq(2.0, 2.0), 4).unwrap();
        assert_eq!(n.diagonal_values(), vec![0.0, 1.0, 4.0, 12.0]);
    }

    #[test]
    fn positivity_gate() {
        // Fermionic family with q < 1: [2] = q - 1/q < 0.
        let params = pq(-1.0 / 0.8, 0.8);
        assert!(matches!(
            build_annihilation(&params, 4),
            Err(PqError::NegativePqNumber { n: 2, .. })
        ));
        assert!(matches!(
            build_annihilation(&fib(), 1),
            Err(PqError::InvalidDimension { dim: 1 })
        ));
    }

    #[test]
    fn algebra_examples() {
        let r = algebra_residuals(&pq(1.0, 1.0), 8).unwrap();
        assert!(r.worst().absolute <= 1e-13);
        let r = algebra_residuals(&pq(1.3, 0.8), 12).unwrap();
        assert!(r.worst().absolute <= 1e-12, "{r:?}");
    }

    #[test]
    fn algebra_full_matrix_breaks_at_corner() {
        let params = pq(1.3, 0.8);
        let dim = 10;
        let a = build_annihilation(&params, dim).unwrap();
        let ad = build_creation(&params, dim).unwrap();
        let comm = a.mul(&ad).sub(&ad.mul(&a));
        let corner = comm.entries[(dim - 1, dim - 1)].re;
        let expected = params.bracket(dim as i64) - params.bracket(dim as i64 - 1);
        assert!((corner - expected).abs() > 1.0);
    }

    #[test]
    fn algebra_presets_scaled() {
        for preset in standard_presets() {
            let r = algebra_residuals(&preset.params(), 16).unwrap();
            assert!(r.worst().scaled <= 1e-12, "{} {r:?}", preset.label());
        }
    }

    #[test]
    fn number_relations() {
        for preset in standard_presets() {
            assert!(number_relation_residuals(&preset.params(), 16).unwrap() <= 1e-12);
        }
        assert!(number_relation_residuals(&pq(0.0, 1.5), 10).unwrap() <= 1e-12);
    }

    #[test]
    fn hamiltonian_examples() {
        let h = hamiltonian(&pq(1.0, 1.0), 3, 1.0).unwrap();
        assert_eq!(h.diagonal_values(), vec![0.5, 1.5, 2.5]);
        let h = hamiltonian(&fib(), 4, 2.0).unwrap();
        assert!(close(&h.diagonal_values(), &[1.0, 2.0, 3.0, 5.0], 1e-13));
        let h = hamiltonian(&pq(1.0, 2.0), 3, 1.0).unwrap();
        assert_eq!(h.diagonal_values(), vec![0.5, 2.0, 5.0]);
        for preset in standard_presets() {
            let r = hamiltonian_residual(&preset.params(), 12, 1.0).unwrap();
            assert!(r.scaled <= 1e-13, "{}", preset.label());
        }
    }

    #[test]
    fn nonlinear_map_examples() {
        assert_eq!(nonlinear_map_check(&pq(1.0, 1.0), 10).unwrap(), 0.0);
        assert!(nonlinear_map_check(&pq(1.0, 2.0), 10).unwrap() <= 1e-12);
        assert!(nonlinear_map_check(&fib(), 10).unwrap() <= 1e-12);
    }

    #[test]
    fn basis_states_from_creation() {
        for preset in standard_presets() {
            assert!(basis_state_residual(&preset.params(), 16).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn spectrum_monotone_where_verified() {
        for preset in standard_presets() {
            let params = preset.params();
            if spectrum_increasing(&params, 16) {
                let h = hamiltonian(&params, 16, 1.0).unwrap().diagonal_values();
                assert!(h.windows(2).all(|w| w[1] > w[0]));
            }
        }
        assert!(spectrum_increasing(&pq(1.0, 1.3), 16));
        assert!(!spectrum_increasing(&fib(), 16));
    }
}
