//! Supersymmetric extension: block operators on fermion (x) boson space,
//! super-number and super-coherent states, and their entanglement.
//!
//! States are pairs `(psi0, psi1)` indexed by fermion number. Flattened
//! vectors and full matrices use fermion-major order: `psi0` first.
//! Throughout, `hbar = m = omega = 1` unless a `hbar_omega` is passed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::exp_real;
use crate::coherent::{
    coherent_coeffs, coherent_profile, primed_coeffs, primed_profile, uncertainty_closed, DimChoice, MassProfile,
    UncertaintyReport, UncertaintySource, AUTO_BOUNDARY_TARGET, DEFAULT_TAIL_TOL, MAX_AUTO_DIM,
};
use crate::error::{PqError, Result};
use crate::fock::{
    build_annihilation, build_creation, check_positivity, diag_fn, hamiltonian, FockVector, OperatorMatrix, Residual,
    Units,
};
use crate::numbers::DeformationParams;

/// Tolerance on `norm^2 - 1` for states flagged normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Rounding slack allowed outside `[0, 1]` before clamping a concurrence.
pub const CONCURRENCE_SLACK: f64 = 1e-12;

/// Pair of bosonic components indexed by fermion number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperState {
    pub psi0: FockVector,
    pub psi1: FockVector,
    pub normalized: bool,
}

impl SuperState {
    pub fn new(psi0: FockVector, psi1: FockVector) -> Result<Self> {
        if psi0.dim() != psi1.dim() {
            return Err(PqError::InvalidParameter(format!(
                "component dims differ: {} vs {}",
                psi0.dim(),
                psi1.dim()
            )));
        }
        Ok(Self {
            psi0,
            psi1,
            normalized: false,
        })
    }

    /// Splits a fermion-major flat vector of even length.
    pub fn from_flat(flat: &[Complex64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(PqError::InvalidDimension { dim: flat.len() });
        }
        let d = flat.len() / 2;
        Self::new(FockVector::new(flat[..d].to_vec()), FockVector::new(flat[d..].to_vec()))
    }

    pub fn dim(&self) -> usize {
        self.psi0.dim()
    }

    pub fn flat(&self) -> Vec<Complex64> {
        self.psi0.coeffs.iter().chain(&self.psi1.coeffs).copied().collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi0.norm_sqr() + self.psi1.norm_sqr()
    }

    /// Rescales to unit norm and flags the result.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(PqError::NotNormalized { norm_sqr: n * n });
        }
        let s = Complex64::new(1.0 / n, 0.0);
        Ok(Self {
            psi0: self.psi0.scaled(s),
            psi1: self.psi1.scaled(s),
            normalized: true,
        })
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.psi0.inner(&other.psi0) + self.psi1.inner(&other.psi1)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            psi0: self.psi0.scaled(s),
            psi1: self.psi1.scaled(s),
            normalized: false,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            psi0: self.psi0.sub(&other.psi0),
            psi1: self.psi1.sub(&other.psi1),
            normalized: false,
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm_sqr().sqrt()
    }

    /// Gram matrix `g_ij = <psi_i|psi_j>`.
    pub fn gram(&self) -> [[Complex64; 2]; 2] {
        let (a, b) = (&self.psi0, &self.psi1);
        [[a.inner(a), a.inner(b)], [b.inner(a), b.inner(b)]]
    }
}

/// 2x2 arrangement of bosonic blocks acting on a [`SuperState`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    pub label: String,
    /// `blocks[i][j]` maps the `j` component into the `i` component.
    pub blocks: [[OperatorMatrix; 2]; 2],
    pub dim_boson: usize,
}

impl SuperOperator {
    pub fn new(label: impl Into<String>, blocks: [[OperatorMatrix; 2]; 2]) -> Result<Self> {
        let d = blocks[0][0].dim();
        if blocks.iter().flatten().any(|b| b.dim() != d) {
            return Err(PqError::InvalidParameter(
                "blocks must share the boson dimension".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            blocks,
            dim_boson: d,
        })
    }

    fn zero_block(dim: usize) -> Result<OperatorMatrix> {
        OperatorMatrix::new("0", DMatrix::zeros(dim, dim))
    }

    pub fn apply(&self, s: &SuperState) -> SuperState {
        let row = |i: usize| s.psi0.apply(&self.blocks[i][0]).add(&s.psi1.apply(&self.blocks[i][1]));
        SuperState {
            psi0: row(0),
            psi1: row(1),
            normalized: false,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let entry = |i: usize, j: usize| {
            self.blocks[i][0]
                .mul(&other.blocks[0][j])
                .add(&self.blocks[i][1].mul(&other.blocks[1][j]))
        };
        Self {
            label: format!("{}*{}", self.label, other.label),
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            dim_boson: self.dim_boson,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let entry = |i: usize, j: usize| self.blocks[i][j].add(&other.blocks[i][j]);
        Self {
            label: format!("{}+{}", self.label, other.label),
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            dim_boson: self.dim_boson,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let entry = |i: usize, j: usize| self.blocks[i][j].scale(s);
        Self {
            label: self.label.clone(),
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            dim_boson: self.dim_boson,
        }
    }

    /// Full `2 dim x 2 dim` matrix in fermion-major order.
    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        let d = self.dim_boson;
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..2 {
            for j in 0..2 {
                m.view_mut((i * d, j * d), (d, d)).copy_from(&self.blocks[i][j].entries);
            }
        }
        OperatorMatrix::new(self.label.clone(), m)
    }

    /// `Tr_f`: sum of the diagonal blocks.
    pub fn partial_trace(&self) -> OperatorMatrix {
        let mut t = self.blocks[0][0].add(&self.blocks[1][1]);
        t.label = format!("Tr_f {}", self.label);
        t
    }
}

/// Supercharges, Hamiltonian and super-number operator.
#[derive(Debug, Clone)]
pub struct SuperOps {
    pub q: SuperOperator,
    pub q_dagger: SuperOperator,
    /// `(hbar omega / 2) diag([N], [N+I])`.
    pub h_s: SuperOperator,
    /// `diag([N], [N+I])`.
    pub super_number: SuperOperator,
}

/// Builds `Q = (0, 0; a, 0)`, `Q^dagger = (0, a^dagger; 0, 0)`, `H_S` and `[N_s]`.
pub fn build_super_ops(params: &DeformationParams, dim: usize, hbar_omega: f64) -> Result<SuperOps> {
    check_positivity(params, dim + 1)?;
    let a = build_annihilation(params, dim)?;
    let ad = build_creation(params, dim)?;
    let z = || SuperOperator::zero_block(dim);
    let q = SuperOperator::new("Q", [[z()?, z()?], [a, z()?]])?;
    let q_dagger = SuperOperator::new("Q^dagger", [[z()?, ad], [z()?, z()?]])?;
    let n0 = diag_fn("[N]", dim, |n| params.bracket(n))?;
    let n1 = diag_fn("[N+I]", dim, |n| params.bracket(n + 1))?;
    let super_number = SuperOperator::new("[N_s]", [[n0, z()?], [z()?, n1]])?;
    let mut h_s = super_number.scale((0.5 * hbar_omega).into());
    h_s.label = "H_S".into();
    Ok(SuperOps {
        q,
        q_dagger,
        h_s,
        super_number,
    })
}

/// `[N_s]` by functional calculus on `N_s = I_f (x) N + N_f (x) I`.
pub fn super_number_functional(params: &DeformationParams, dim: usize) -> Result<OperatorMatrix> {
    // N_s is diagonal with integer eigenvalues, so f(N_s) acts entrywise.
    let counts: Vec<i64> = (0..2 * dim).map(|k| (k % dim + k / dim) as i64).collect();
    let values: Vec<f64> = counts.iter().map(|&n| params.bracket(n)).collect();
    OperatorMatrix::diagonal("[N_s]", &values)
}

/// Residuals of the supersymmetric constructions, scaled as in [`Residual`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperResiduals {
    /// `H_S - (hbar omega / 2)(Q Q^dagger + Q^dagger Q)` on the interior of each block.
    pub charges: Residual,
    /// `[N_s]` against functional calculus, full matrices.
    pub functional: Residual,
    /// `Tr_f` of the charge-built Hamiltonian against the bosonic `H`.
    pub partial_trace: Residual,
}

impl SuperResiduals {
    pub fn worst(&self) -> Residual {
        self.charges.max(self.functional).max(self.partial_trace)
    }
}

pub fn super_residuals(params: &DeformationParams, dim: usize, hbar_omega: f64) -> Result<SuperResiduals> {
    let ops = build_super_ops(params, dim, hbar_omega)?;
    let anti = ops
        .q
        .mul(&ops.q_dagger)
        .add(&ops.q_dagger.mul(&ops.q))
        .scale((0.5 * hbar_omega).into());
    let neg = Complex64::new(-1.0, 0.0);
    let mut charges = Residual::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            let diff = anti.blocks[i][j].scale(neg);
            charges = charges.max(Residual::interior(&[&ops.h_s.blocks[i][j], &diff]));
        }
    }
    let func = super_number_functional(params, dim)?;
    let direct = ops.super_number.to_matrix()?;
    let gap = direct.sub(&func).max_abs();
    let functional = Residual {
        absolute: gap,
        scaled: gap / direct.max_abs().max(1.0),
    };
    let bosonic = hamiltonian(params, dim, hbar_omega)?;
    let partial_trace = Residual::interior(&[&anti.partial_trace(), &bosonic.scale(neg)]);
    Ok(SuperResiduals {
        charges,
        functional,
        partial_trace,
    })
}

/// Distinct level of `H_S` on the truncated interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperLevel {
    /// Total excitation count `n_b + n_f`.
    pub n: u32,
    pub energy: f64,
    pub multiplicity: u32,
}

/// Levels of `H_S` grouped by excitation count, keeping only levels whose
/// every partner state is inside the truncation (`n < dim`).
pub fn super_spectrum(params: &DeformationParams, dim: usize, hbar_omega: f64) -> Result<Vec<SuperLevel>> {
    let ops = build_super_ops(params, dim, hbar_omega)?;
    let diag = ops.h_s.to_matrix()?.diagonal_values();
    let mut levels: Vec<SuperLevel> = (0..dim as u32)
        .map(|n| SuperLevel {
            n,
            energy: 0.5 * hbar_omega * params.bracket(n as i64),
            multiplicity: 0,
        })
        .collect();
    for (k, e) in diag.iter().enumerate() {
        let n = k % dim + k / dim;
        if n < dim {
            let level = &mut levels[n];
            if (level.energy - e).abs() > 1e-12 * e.abs().max(1.0) {
                return Err(PqError::SelfCheckFailed {
                    what: "H_S level energy",
                    gap: (level.energy - e).abs(),
                });
            }
            level.multiplicity += 1;
        }
    }
    Ok(levels)
}

/// `cos(theta/2)(|n>, 0) + sin(theta/2) e^{i phi} (0, |n-1>)`.
pub fn super_number_state(n: usize, theta: f64, phi: f64, dim: usize) -> Result<SuperState> {
    if n < 1 || n >= dim {
        return Err(PqError::IndexOutOfRange { index: n as i64, dim });
    }
    let psi0 = FockVector::basis(dim, n)?.scaled((theta / 2.0).cos().into());
    let psi1 = FockVector::basis(dim, n - 1)?.scaled(Complex64::from_polar((theta / 2.0).sin(), phi));
    let s = SuperState::new(psi0, psi1)?;
    Ok(SuperState { normalized: true, ..s })
}

/// `A = (p a, -I; 0, q a)`, or `A^T = (p a, 0; -I, q a)` when `transposed`.
pub fn super_annihilation(params: &DeformationParams, dim: usize, transposed: bool) -> Result<SuperOperator> {
    check_positivity(params, dim)?;
    let a = build_annihilation(params, dim)?;
    let minus = OperatorMatrix::identity(dim)?.scale(Complex64::new(-1.0, 0.0));
    let z = SuperOperator::zero_block(dim)?;
    let pa = a.scale(params.p().into());
    let qa = a.scale(params.q().into());
    if transposed {
        SuperOperator::new("A^T", [[pa, z], [minus, qa]])
    } else {
        SuperOperator::new("A", [[pa, minus], [z, qa]])
    }
}

fn nonzero(value: f64, which: &'static str) -> Result<()> {
    if value == 0.0 {
        Err(PqError::ZeroDeformationParameter { which })
    } else {
        Ok(())
    }
}

/// Smallest power of two `>= 4` at which both weighted components have
/// relative tail `<= tol` and the truncation error of the block
/// annihilator, `sqrt([dim] (p^2 |psi0_dim|^2 + q^2 |psi1_dim|^2))`, is at
/// most [`AUTO_BOUNDARY_TARGET`] relative to the norm.
fn two_component_dim(params: &DeformationParams, parts: [(Option<&MassProfile>, f64); 2], tol: f64) -> Result<usize> {
    let weight = |k: usize| -> f64 { parts.iter().map(|(p, w)| p.map_or(0.0, |p| w * p.tail_from(k))).sum() };
    let total = weight(0);
    if total == 0.0 {
        return Ok(4);
    }
    let coeff = [params.p().powi(2), params.q().powi(2)];
    let mut dim = 4;
    while dim <= MAX_AUTO_DIM {
        let tail = weight(dim) / total;
        let edge: f64 = parts
            .iter()
            .zip(coeff)
            .map(|((p, w), c)| p.map_or(0.0, |p| c * w * p.mass(dim)))
            .sum();
        let boundary = (params.bracket(dim as i64).abs() * edge / total).sqrt();
        if tail <= tol && boundary <= AUTO_BOUNDARY_TARGET {
            return Ok(dim);
        }
        dim *= 2;
    }
    Err(PqError::TailTooLarge {
        tail: weight(MAX_AUTO_DIM) / total,
        tol,
        dim: MAX_AUTO_DIM,
    })
}

fn resolve(choice: DimChoice, auto: impl FnOnce() -> Result<usize>) -> Result<usize> {
    match choice {
        DimChoice::Fixed(d) if d < 2 => Err(PqError::InvalidDimension { dim: d }),
        DimChoice::Fixed(d) => Ok(d),
        DimChoice::Auto => auto(),
    }
}

/// Separable eigenstate: `(|alpha/p>, 0)` of `A` when `up`, else
/// `(0, |alpha/q>)` of `A^T`; normalized numerically.
pub fn separable_super_coherent(
    params: &DeformationParams,
    alpha: Complex64,
    up: bool,
    dim: DimChoice,
) -> Result<SuperState> {
    let (scale, which) = if up { (params.p(), "p") } else { (params.q(), "q") };
    nonzero(scale, which)?;
    let beta = alpha / scale;
    let profile = coherent_profile(params, beta)?;
    let parts = if up {
        [(Some(&profile), 1.0), (None, 0.0)]
    } else {
        [(None, 0.0), (Some(&profile), 1.0)]
    };
    let dim = resolve(dim, || two_component_dim(params, parts, DEFAULT_TAIL_TOL))?;
    check_positivity(params, dim)?;
    let v = FockVector::new(coherent_coeffs(params, beta, dim)?);
    let zero = FockVector::zeros(dim);
    let s = if up {
        SuperState::new(v, zero)?
    } else {
        SuperState::new(zero, v)?
    };
    s.normalize()
}

/// Which entangled family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntangledKind {
    /// Eigenstates of `A`.
    L,
    /// Eigenstates of `A^T`.
    B,
}

impl EntangledKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntangledKind::L => "L",
            EntangledKind::B => "B",
        }
    }

    /// Whether the matching annihilator is `A^T`.
    pub fn transposed(&self) -> bool {
        matches!(self, EntangledKind::B)
    }
}

/// Auto truncation for the entangled states at `alpha`.
pub fn entangled_dim(params: &DeformationParams, alpha: Complex64, kind: EntangledKind) -> Result<usize> {
    let (p, q) = (params.p(), params.q());
    nonzero(p, "p")?;
    nonzero(q, "q")?;
    let primed = primed_profile(params, alpha, (p * q).into())?;
    match kind {
        EntangledKind::L => {
            let plain = coherent_profile(params, alpha / q)?;
            two_component_dim(params, [(Some(&primed), q * q), (Some(&plain), 1.0)], DEFAULT_TAIL_TOL)
        }
        EntangledKind::B => {
            let plain = coherent_profile(params, alpha / p)?;
            two_component_dim(params, [(Some(&plain), 1.0), (Some(&primed), p * p)], DEFAULT_TAIL_TOL)
        }
    }
}

/// Unnormalized entangled eigenvector: L is `(q|alpha'/(pq)>, |alpha/q>)`,
/// B is `(|alpha/p>, p|alpha'/(pq)>)`.
pub fn entangled_raw(
    params: &DeformationParams,
    alpha: Complex64,
    kind: EntangledKind,
    dim: usize,
) -> Result<SuperState> {
    let (p, q) = (params.p(), params.q());
    nonzero(p, "p")?;
    nonzero(q, "q")?;
    check_positivity(params, dim)?;
    let primed = FockVector::new(primed_coeffs(params, alpha, (p * q).into(), dim)?);
    match kind {
        EntangledKind::L => SuperState::new(
            primed.scaled(q.into()),
            FockVector::new(coherent_coeffs(params, alpha / q, dim)?),
        ),
        EntangledKind::B => SuperState::new(
            FockVector::new(coherent_coeffs(params, alpha / p, dim)?),
            primed.scaled(p.into()),
        ),
    }
}

/// Normalized entangled super-coherent state.
pub fn entangled_super_coherent(
    params: &DeformationParams,
    alpha: Complex64,
    kind: EntangledKind,
    dim: DimChoice,
) -> Result<SuperState> {
    let dim = resolve(dim, || entangled_dim(params, alpha, kind))?;
    entangled_raw(params, alpha, kind, dim)?.normalize()
}

/// The normalized state in the same eigenspace orthogonal to the
/// entangled one: the separable eigenvector `(|alpha/p>, 0)` (L) or
/// `(0, |alpha/q>)` (B) with its projection removed.
pub fn entangled_companion(
    params: &DeformationParams,
    alpha: Complex64,
    kind: EntangledKind,
    dim: DimChoice,
) -> Result<SuperState> {
    let dim = resolve(dim, || entangled_dim(params, alpha, kind))?;
    let s = entangled_raw(params, alpha, kind, dim)?.normalize()?;
    let u = separable_super_coherent(params, alpha, kind == EntangledKind::L, DimChoice::Fixed(dim))?;
    u.sub(&s.scaled(s.inner(&u))).normalize()
}

/// Reference states: L is `(|1>, p|0>)/sqrt(1+p^2)`, B is `(q|0>, |1>)/sqrt(1+q^2)`.
pub fn reference_state(params: &DeformationParams, kind: EntangledKind, dim: usize) -> Result<SuperState> {
    let (p, q) = (params.p(), params.q());
    let s = match kind {
        EntangledKind::L => SuperState::new(FockVector::basis(dim, 1)?, FockVector::basis(dim, 0)?.scaled(p.into()))?,
        EntangledKind::B => SuperState::new(FockVector::basis(dim, 0)?.scaled(q.into()), FockVector::basis(dim, 1)?)?,
    };
    s.normalize()
}

/// `2 sqrt(det Gram)`, clamped to `[0, 1]` within [`CONCURRENCE_SLACK`].
pub fn concurrence(state: &SuperState) -> Result<f64> {
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(PqError::NotNormalized { norm_sqr });
    }
    let g = state.gram();
    let det = g[0][0].re * g[1][1].re - g[0][1].norm_sqr();
    let c_sqr = 4.0 * det;
    if !(-CONCURRENCE_SLACK..=1.0 + CONCURRENCE_SLACK).contains(&c_sqr) {
        return Err(PqError::ConcurrenceOutOfRange { value: c_sqr });
    }
    Ok(c_sqr.max(0.0).sqrt().min(1.0))
}

/// `sqrt(2 (1 - Tr rho_f^2))` from the reduced fermionic density matrix.
pub fn concurrence_density(state: &SuperState) -> f64 {
    let d = state.dim();
    let m = DMatrix::from_row_slice(2, d, &state.flat());
    let rho = &m * m.adjoint();
    let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

/// Closed-form `N^{-2}` of the entangled state at `x = |alpha|^2`.
pub fn entangled_norm_inv_sq(params: &DeformationParams, x: f64, kind: EntangledKind) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    nonzero(p, "p")?;
    nonzero(q, "q")?;
    let e = |y: f64| exp_real(params, y);
    Ok(match kind {
        EntangledKind::L => {
            x / (p.powi(4) * q) * e(x / (p * p * q * q))? + e(x / (p * q * q))? / (p * p) + e(x / (q * q))?
        }
        EntangledKind::B => {
            x / (p * p * q.powi(3)) * e(x / (p * p * q * q))? + e(x / (p * q * q))? / (q * q) + e(x / (p * p))?
        }
    })
}

/// Closed-form concurrence of the entangled state at `x = |alpha|^2`,
/// evaluated as printed in the source derivation.
pub fn concurrence_closed(params: &DeformationParams, x: f64, kind: EntangledKind) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    let n2 = 1.0 / entangled_norm_inv_sq(params, x, kind)?;
    let e = |y: f64| exp_real(params, y);
    let radicand = match kind {
        EntangledKind::L => {
            e(x / (q * q))? * e(x / (p * q * q))? / (p * p)
                + x / (p.powi(4) * q) * e(x / (q * q))? * e(x / (p * p * q * q))?
                - x / (p * p * q * q) * e(x / (p * q * q))?.powi(2)
        }
        EntangledKind::B => {
            e(x / (p * p))? * e(x / (p * q * q))? / (q * q)
                + x / (p * p * q.powi(3)) * e(x / (p * p))? * e(x / (p * p * q * q))?
                - x / (p * p * q * q) * e(x / (p * p * q))?.powi(2)
        }
    };
    Ok(2.0 * n2 * radicand.max(0.0).sqrt())
}

/// Moments of `X = I_f (x) (a^dagger + a)/sqrt 2` and `P = I_f (x) i(a^dagger - a)/sqrt 2`.
pub fn super_uncertainty_numeric(params: &DeformationParams, state: &SuperState) -> Result<UncertaintyReport> {
    let dim = state.dim();
    let units = Units::default();
    let x = crate::fock::position_op(params, dim, &units)?;
    let p = crate::fock::momentum_op(params, dim, &units)?;
    let norm = state.norm_sqr();
    let ev = |op: &OperatorMatrix| -> f64 {
        (state.psi0.inner(&state.psi0.apply(op)) + state.psi1.inner(&state.psi1.apply(op))).re / norm
    };
    let (mx, mp) = (ev(&x), ev(&p));
    let dx2 = ev(&x.mul(&x)) - mx * mx;
    let dp2 = ev(&p.mul(&p)) - mp * mp;
    Ok(UncertaintyReport::from_dispersions(
        dx2,
        dp2,
        UncertaintySource::MatrixNumeric,
    ))
}

/// `(1/2)(1 + (p+q)/(1+p^2))` for L, `(1/2)(1 + (p+q)/(1+q^2))` for B.
pub fn reference_uncertainty(params: &DeformationParams, kind: EntangledKind) -> UncertaintyReport {
    let (p, q) = (params.p(), params.q());
    let w = match kind {
        EntangledKind::L => p,
        EntangledKind::B => q,
    };
    let v = 0.5 * (1.0 + (p + q) / (1.0 + w * w));
    UncertaintyReport::from_dispersions(v, v, UncertaintySource::ClosedForm)
}

/// Matrix moments of the reference state; `dim = 4` keeps every needed level.
pub fn reference_uncertainty_numeric(params: &DeformationParams, kind: EntangledKind) -> Result<UncertaintyReport> {
    let dim = 4;
    check_positivity(params, dim)?;
    super_uncertainty_numeric(params, &reference_state(params, kind, dim)?)
}

/// Separable-state bracket: `(1/2)((q-1)|alpha/p|^2 + e^{p|alpha/p|^2}/e^{|alpha/p|^2})`
/// for up, and its `p <-> q` mirror at `alpha/q` for down.
pub fn separable_uncertainty(params: &DeformationParams, alpha: Complex64, up: bool) -> Result<UncertaintyReport> {
    let (p, q) = (params.p(), params.q());
    let (s, other, which) = if up { (p, q, "p") } else { (q, p, "q") };
    nonzero(s, which)?;
    let x = (alpha / s).norm_sqr();
    let v = 0.5 * ((other - 1.0) * x + exp_real(params, s * x)? / exp_real(params, x)?);
    Ok(UncertaintyReport::from_dispersions(v, v, UncertaintySource::ClosedForm))
}

/// The single-mode closed form at the shifted argument, for comparison.
pub fn separable_uncertainty_shifted(
    params: &DeformationParams,
    alpha: Complex64,
    up: bool,
) -> Result<UncertaintyReport> {
    let s = if up { params.p() } else { params.q() };
    nonzero(s, if up { "p" } else { "q" })?;
    uncertainty_closed(params, alpha / s, &Units::default())
}
