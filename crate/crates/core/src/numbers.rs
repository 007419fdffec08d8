//! Two-parameter deformed numbers `[n]_{p,q} = (p^n - q^n) / (p - q)`.
//!
//! Everything else in the crate is built on [`DeformationParams::bracket`].
//! Powers are taken with repeated squaring so that negative bases keep an
//! exact sign, and the coincident-base case `p = q` switches to the limit
//! `n q^{n-1}` instead of dividing by a vanishing difference.

use serde::{Deserialize, Serialize};

use crate::error::{PqError, Result};

/// The golden ratio `(1 + sqrt 5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Integer power by repeated squaring; negative exponents invert the result.
pub fn ipow(base: f64, exp: i64) -> f64 {
    let mut e = exp.unsigned_abs();
    let mut b = base;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        e >>= 1;
        if e > 0 {
            b *= b;
        }
    }
    if exp < 0 {
        1.0 / acc
    } else {
        acc
    }
}

/// The deformation pair `(p, q)` together with the threshold that selects
/// the coincident-base limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    p: f64,
    q: f64,
    degenerate_tol: f64,
}

impl DeformationParams {
    /// Builds the pair with the default threshold `1e-12 * max(1, |p|, |q|)`.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let tol = 1e-12 * 1f64.max(p.abs()).max(q.abs());
        Self::with_tolerance(p, q, tol)
    }

    pub fn with_tolerance(p: f64, q: f64, degenerate_tol: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(PqError::InvalidParameter(format!(
                "p and q must be finite (p = {p}, q = {q})"
            )));
        }
        if !(degenerate_tol >= 0.0) || !degenerate_tol.is_finite() {
            return Err(PqError::InvalidParameter(format!(
                "degenerate_tol must be finite and >= 0 (got {degenerate_tol})"
            )));
        }
        Ok(Self { p, q, degenerate_tol })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn degenerate_tol(&self) -> f64 {
        self.degenerate_tol
    }

    /// True when `|p - q|` is within the threshold and the limit branch is used.
    pub fn is_degenerate(&self) -> bool {
        (self.p - self.q).abs() <= self.degenerate_tol
    }

    /// The same pair with `p` and `q` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
            degenerate_tol: self.degenerate_tol,
        }
    }

    /// `(1/p, 1/q)` with a freshly derived default threshold.
    pub fn inverted(&self) -> Result<Self> {
        self.require_nonzero_product(-1)?;
        Self::new(1.0 / self.p, 1.0 / self.q)
    }

    /// `(p^k, q^k)` with a freshly derived default threshold.
    pub fn powered(&self, k: i64) -> Result<Self> {
        if k < 0 {
            self.require_nonzero_product(k)?;
        }
        Self::new(ipow(self.p, k), ipow(self.q, k))
    }

    /// `p * q`.
    pub fn product(&self) -> f64 {
        self.p * self.q
    }

    fn require_nonzero_product(&self, n: i64) -> Result<()> {
        if self.p == 0.0 || self.q == 0.0 {
            Err(PqError::ZeroBaseNegativePower { n })
        } else {
            Ok(())
        }
    }

    /// Unchecked `[n]_{p,q}`; may return infinities or NaN.
    ///
    /// The coincident-base branch evaluates at the midpoint `(p+q)/2`, which
    /// keeps the value exactly symmetric under `p <-> q`.
    pub fn bracket(&self, n: i64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if self.is_degenerate() {
            let mid = 0.5 * (self.p + self.q);
            return n as f64 * ipow(mid, n - 1);
        }
        (ipow(self.p, n) - ipow(self.q, n)) / (self.p - self.q)
    }

    /// `[x]_{p,q}` for a real argument; only meaningful for `p, q > 0`.
    pub fn bracket_real(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            let mid = 0.5 * (self.p + self.q);
            return x * mid.powf(x - 1.0);
        }
        (self.p.powf(x) - self.q.powf(x)) / (self.p - self.q)
    }
}

/// Named parameter families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `p = 1`.
    NonSymmetricQ { q: f64 },
    /// `p = 1/q`.
    SymmetricQ { q: f64 },
    /// `p = -1/q`.
    FermionicQ { q: f64 },
    /// `p = phi`, `q = -1/phi`.
    Fibonacci,
    /// `p = phi^k`, `q = (-1/phi)^k`.
    FibonacciDivisor { k: u32 },
    /// `p = q`.
    TammDankov { q: f64 },
}

/// A named family together with the parameters it resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyPreset {
    pub kind: FamilyKind,
    pub resolved: DeformationParams,
}

impl FamilyPreset {
    pub fn new(kind: FamilyKind) -> Result<Self> {
        let resolved = match kind {
            FamilyKind::NonSymmetricQ { q } => DeformationParams::new(1.0, q)?,
            FamilyKind::SymmetricQ { q } => {
                nonzero(q, "q")?;
                DeformationParams::new(1.0 / q, q)?
            }
            FamilyKind::FermionicQ { q } => {
                nonzero(q, "q")?;
                DeformationParams::new(-1.0 / q, q)?
            }
            FamilyKind::Fibonacci => DeformationParams::new(GOLDEN_RATIO, -1.0 / GOLDEN_RATIO)?,
            FamilyKind::FibonacciDivisor { k } => {
                if k == 0 {
                    return Err(PqError::InvalidParameter(
                        "Fibonacci divisor index k must be positive".into(),
                    ));
                }
                DeformationParams::new(ipow(GOLDEN_RATIO, k as i64), ipow(-1.0 / GOLDEN_RATIO, k as i64))?
            }
            FamilyKind::TammDankov { q } => {
                // Exact equality forces the limit branch for any tolerance.
                DeformationParams::new(q, q)?
            }
        };
        Ok(Self { kind, resolved })
    }

    pub fn params(&self) -> DeformationParams {
        self.resolved
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self.kind {
            FamilyKind::NonSymmetricQ { q } => format!("nonsym(q={q})"),
            FamilyKind::SymmetricQ { q } => format!("sym(q={q})"),
            FamilyKind::FermionicQ { q } => format!("fermionic(q={q})"),
            FamilyKind::Fibonacci => "fibonacci".into(),
            FamilyKind::FibonacciDivisor { k } => format!("fibdiv(k={k})"),
            FamilyKind::TammDankov { q } => format!("tammdankov(q={q})"),
        }
    }
}

fn nonzero(v: f64, which: &'static str) -> Result<()> {
    if v == 0.0 {
        Err(PqError::ZeroDeformationParameter { which })
    } else {
        Ok(())
    }
}

/// One representative of each family, used by the verification grids.
pub fn standard_presets() -> Vec<FamilyPreset> {
    [
        FamilyKind::NonSymmetricQ { q: 1.3 },
        FamilyKind::SymmetricQ { q: 1.2 },
        FamilyKind::FermionicQ { q: 1.2 },
        FamilyKind::Fibonacci,
        FamilyKind::FibonacciDivisor { k: 2 },
        FamilyKind::TammDankov { q: 1.1 },
    ]
    .into_iter()
    .map(|k| FamilyPreset::new(k).expect("standard presets are valid"))
    .collect()
}

/// `[n]_{p,q}` for any integer `n`.
pub fn pq_number(params: &DeformationParams, n: i64) -> Result<f64> {
    if n < 0 {
        params.require_nonzero_product(n)?;
    }
    let v = params.bracket(n);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(PqError::NonFiniteResult { n })
    }
}

/// `[n]_{p,q}` from the three-term recursion `[n+1] = (p+q)[n] - pq[n-1]`
/// seeded with `[0] = 0`, `[1] = 1`.
pub fn pq_number_recursive(params: &DeformationParams, n: u32) -> Result<f64> {
    let sum = params.p() + params.q();
    let prod = params.product();
    let (mut prev, mut cur) = (0.0_f64, 1.0_f64);
    if n == 0 {
        return Ok(0.0);
    }
    for k in 1..n {
        let next = sum * cur - prod * prev;
        if !next.is_finite() {
            return Err(PqError::NonFiniteResult { n: k as i64 + 1 });
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `[n]_{p,q}! = [1][2]...[n]`, with `[0]! = 1`.
pub fn pq_factorial(params: &DeformationParams, n: u32) -> Result<f64> {
    let mut acc = 1.0;
    for k in 1..=n as i64 {
        acc *= params.bracket(k);
        if !acc.is_finite() {
            return Err(PqError::NonFiniteResult { n: k });
        }
    }
    Ok(acc)
}

/// Deformed binomial coefficient `[n]! / ([k]! [n-k]!)`, zero outside `0..=n`.
pub fn pq_binomial_coeff(params: &DeformationParams, n: u32, k: i64) -> Result<f64> {
    let n = n as i64;
    if k < 0 || k > n {
        return Ok(0.0);
    }
    for m in 1..=k.max(n - k) {
        if params.bracket(m) == 0.0 {
            return Err(PqError::DivisionByZeroPqNumber { m });
        }
    }
    // Telescoped product keeps intermediate values near the final size.
    let kk = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=kk {
        acc *= params.bracket(n - kk + i) / params.bracket(i);
    }
    if acc.is_finite() {
        Ok(acc)
    } else {
        Err(PqError::NonFiniteResult { n })
    }
}

/// Outcome of a single algebraic identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IdentityOutcome {
    /// Scaled residual `|lhs - rhs| / max(1, |lhs|, |terms of rhs|)`.
    Residual {
        value: f64,
    },
    Inapplicable {
        reason: String,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub outcome: IdentityOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n: i64,
    pub m: i64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    /// Largest residual among the applicable identities.
    pub fn worst(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| match c.outcome {
                IdentityOutcome::Residual { value } => Some(value),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    pub fn errors(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks
            .iter()
            .filter(|c| matches!(c.outcome, IdentityOutcome::Error { .. }))
    }

    pub fn get(&self, name: &str) -> Option<&IdentityOutcome> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.outcome)
    }
}

fn scaled_residual(lhs: f64, terms: &[f64]) -> f64 {
    let rhs: f64 = terms.iter().sum();
    let scale = terms.iter().fold(1f64.max(lhs.abs()), |s, t| s.max(t.abs()));
    (lhs - rhs).abs() / scale
}

enum Check {
    Value(f64),
    Skip(String),
}

/// Largest index magnitude accepted by [`identity_suite`].
pub const IDENTITY_INDEX_MAX: i64 = 64;

/// Residuals of the additive, multiplicative, negative-index, quotient and
/// base-inversion laws of the deformed numbers at the point `(n, m)`.
pub fn identity_suite(params: &DeformationParams, n: i64, m: i64) -> Result<IdentityReport> {
    if n.abs() > IDENTITY_INDEX_MAX || m.abs() > IDENTITY_INDEX_MAX {
        return Err(PqError::InvalidParameter(format!(
            "identity indices must satisfy |n|, |m| <= {IDENTITY_INDEX_MAX}"
        )));
    }
    let p = params.p();
    let q = params.q();
    let nonzero_pq = p != 0.0 && q != 0.0;
    let b = |k: i64| pq_number(params, k);
    let pow = |x: f64, k: i64| -> Result<f64> {
        if k < 0 && x == 0.0 {
            Err(PqError::ZeroBaseNegativePower { n: k })
        } else {
            Ok(ipow(x, k))
        }
    };
    let need_pq =
        |reason: &str| -> Option<Check> { (!nonzero_pq).then(|| Check::Skip(format!("{reason} requires p*q != 0"))) };

    let mut checks = Vec::new();
    let mut push = |name: &'static str, f: &dyn Fn() -> Result<Check>| {
        let outcome = match f() {
            Ok(Check::Value(v)) if v.is_finite() => IdentityOutcome::Residual { value: v },
            Ok(Check::Value(v)) => IdentityOutcome::Error {
                message: format!("non-finite residual {v}"),
            },
            Ok(Check::Skip(reason)) => IdentityOutcome::Inapplicable { reason },
            Err(PqError::ZeroBaseNegativePower { .. }) => IdentityOutcome::Inapplicable {
                reason: "negative power of a zero base".into(),
            },
            Err(e) => IdentityOutcome::Error { message: e.to_string() },
        };
        checks.push(IdentityCheck { name, outcome });
    };

    push("successor_q_form", &|| {
        Ok(Check::Value(scaled_residual(b(n + 1)?, &[q * b(n)?, pow(p, n)?])))
    });
    push("successor_p_form", &|| {
        Ok(Check::Value(scaled_residual(b(n + 1)?, &[p * b(n)?, pow(q, n)?])))
    });
    push("addition", &|| {
        Ok(Check::Value(scaled_residual(
            b(n + m)?,
            &[pow(p, n)? * b(m)?, pow(q, m)? * b(n)?],
        )))
    });
    push("difference_via_negative_index", &|| {
        Ok(Check::Value(scaled_residual(
            b(n - m)?,
            &[pow(p, n)? * b(-m)?, pow(q, -m)? * b(n)?],
        )))
    });
    push("negative_index", &|| {
        if let Some(skip) = need_pq("negative index law") {
            return Ok(skip);
        }
        Ok(Check::Value(scaled_residual(b(-n)?, &[-b(n)? / pow(p * q, n)?])))
    });
    push("difference_direct", &|| {
        if let Some(skip) = need_pq("direct difference law") {
            return Ok(skip);
        }
        let qm = pow(q, -m)?;
        Ok(Check::Value(scaled_residual(
            b(n - m)?,
            &[qm * b(n)?, -qm * pow(p, n - m)? * b(m)?],
        )))
    });
    push("product_n_base", &|| {
        let inner = params.powered(n)?;
        Ok(Check::Value(scaled_residual(
            b(n * m)?,
            &[b(n)? * pq_number(&inner, m)?],
        )))
    });
    push("product_m_base", &|| {
        let inner = params.powered(m)?;
        Ok(Check::Value(scaled_residual(
            b(n * m)?,
            &[b(m)? * pq_number(&inner, n)?],
        )))
    });
    push("quotient_scaled_base", &|| {
        if !(p > 0.0 && q > 0.0) {
            return Ok(Check::Skip("real fractional powers need p, q > 0".into()));
        }
        if m == 0 {
            return Ok(Check::Skip("m = 0".into()));
        }
        let x = n as f64 / m as f64;
        let inner = DeformationParams::new(p.powf(x), q.powf(x))?;
        let den = pq_number(&inner, m)?;
        if den == 0.0 {
            return Ok(Check::Skip("vanishing denominator".into()));
        }
        Ok(Check::Value(scaled_residual(params.bracket_real(x), &[b(n)? / den])))
    });
    push("quotient_root_base", &|| {
        if !(p > 0.0 && q > 0.0) {
            return Ok(Check::Skip("real fractional powers need p, q > 0".into()));
        }
        if m == 0 {
            return Ok(Check::Skip("m = 0".into()));
        }
        let r = 1.0 / m as f64;
        let inner = DeformationParams::new(p.powf(r), q.powf(r))?;
        let den = pq_number(&inner, m)?;
        if den == 0.0 {
            return Ok(Check::Skip("vanishing denominator".into()));
        }
        Ok(Check::Value(scaled_residual(
            params.bracket_real(n as f64 / m as f64),
            &[pq_number(&inner, n)? / den],
        )))
    });
    push("base_inversion", &|| {
        if let Some(skip) = need_pq("base inversion") {
            return Ok(skip);
        }
        let inv = params.inverted()?;
        Ok(Check::Value(scaled_residual(
            b(n)?,
            &[pq_number(&inv, n)? * pow(p * q, n - 1)?],
        )))
    });
    push("factorial_inversion", &|| {
        if let Some(skip) = need_pq("factorial base inversion") {
            return Ok(skip);
        }
        if n < 0 {
            return Ok(Check::Skip("factorial needs n >= 0".into()));
        }
        let inv = params.inverted()?;
        let nn = n as u32;
        Ok(Check::Value(scaled_residual(
            pq_factorial(params, nn)?,
            &[pq_factorial(&inv, nn)? * pow(p * q, n * (n - 1) / 2)?],
        )))
    });
    push("three_term_recursion", &|| {
        Ok(Check::Value(scaled_residual(
            b(n + 1)?,
            &[(p + q) * b(n)?, -p * q * b(n - 1)?],
        )))
    });

    Ok(IdentityReport { n, m, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> DeformationParams {
        FamilyPreset::new(FamilyKind::Fibonacci).unwrap().params()
    }

    fn pq(p: f64, q: f64) -> DeformationParams {
        DeformationParams::new(p, q).unwrap()
    }

    #[test]
    fn ipow_sign_and_inverse() {
        assert_eq!(ipow(-2.0, 3), -8.0);
        assert_eq!(ipow(-2.0, 4), 16.0);
        assert_eq!(ipow(2.0, -2), 0.25);
        assert_eq!(ipow(0.0, 0), 1.0);
        assert_eq!(ipow(7.5, 1), 7.5);
    }

    #[test]
    fn pq_number_examples() {
        assert_eq!(pq_number(&pq(1.0, 1.0), 5).unwrap(), 5.0);
        assert!((pq_number(&fib(), 6).unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(pq_number(&pq(2.0, 2.0), 3).unwrap(), 12.0);
        assert_eq!(pq_number(&pq(1.0, 2.0), 4).unwrap(), 15.0);
    }

    #[test]
    fn pq_number_seeds() {
        for params in [pq(0.3, -1.7), pq(2.0, 2.0), fib()] {
            assert_eq!(pq_number(&params, 0).unwrap(), 0.0);
            assert!((pq_number(&params, 1).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pq_number_errors() {
        assert_eq!(
            pq_number(&pq(0.0, 2.0), -1),
            Err(PqError::ZeroBaseNegativePower { n: -1 })
        );
        assert!(matches!(
            pq_number(&pq(1e10, 1.0), 400),
            Err(PqError::NonFiniteResult { n: 400 })
        ));
    }

    #[test]
    fn recursive_examples() {
        assert!((pq_number_recursive(&fib(), 10).unwrap() - 55.0).abs() < 1e-9);
        assert_eq!(pq_number_recursive(&pq(0.4, 9.0), 0).unwrap(), 0.0);
        assert_eq!(pq_number_recursive(&pq(1.0, 3.0), 3).unwrap(), 13.0);
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(pq_factorial(&pq(0.2, 0.9), 0).unwrap(), 1.0);
        assert!((pq_factorial(&fib(), 4).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(pq_factorial(&pq(1.0, 1.0), 5).unwrap(), 120.0);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(pq_binomial_coeff(&pq(1.7, 0.3), 7, 0).unwrap(), 1.0);
        assert_eq!(pq_binomial_coeff(&pq(1.0, 1.0), 4, 2).unwrap(), 6.0);
        assert!((pq_binomial_coeff(&pq(1.0, 2.0), 3, 1).unwrap() - 7.0).abs() < 1e-14);
        assert_eq!(pq_binomial_coeff(&pq(1.0, 2.0), 3, 4).unwrap(), 0.0);
        assert_eq!(pq_binomial_coeff(&pq(1.0, 2.0), 3, -1).unwrap(), 0.0);
    }

    #[test]
    fn binomial_vanishing_bracket() {
        // p = -q makes every even bracket vanish.
        assert_eq!(
            pq_binomial_coeff(&pq(1.0, -1.0), 4, 2),
            Err(PqError::DivisionByZeroPqNumber { m: 2 })
        );
    }

    #[test]
    fn presets_resolve() {
        let f = fib();
        assert!((f.p() * f.q() + 1.0).abs() < 1e-15);
        let d = FamilyPreset::new(FamilyKind::FibonacciDivisor { k: 3 })
            .unwrap()
            .params();
        assert!((d.p() - GOLDEN_RATIO.powi(3)).abs() < 1e-12);
        assert!((d.q() + GOLDEN_RATIO.powi(-3)).abs() < 1e-12);
        let t = FamilyPreset::new(FamilyKind::TammDankov { q: 1.7 }).unwrap().params();
        assert!(t.is_degenerate());
        assert!(FamilyPreset::new(FamilyKind::FibonacciDivisor { k: 0 }).is_err());
        assert!(FamilyPreset::new(FamilyKind::SymmetricQ { q: 0.0 }).is_err());
    }

    #[test]
    fn identity_suite_classical_is_exact() {
        let r = identity_suite(&pq(1.0, 1.0), 3, 2).unwrap();
        for c in &r.checks {
            match &c.outcome {
                IdentityOutcome::Residual { value } => assert_eq!(*value, 0.0, "{}", c.name),
                other => panic!("{}: {other:?}", c.name),
            }
        }
    }

    #[test]
    fn identity_suite_examples() {
        let r = identity_suite(&fib(), 4, 3).unwrap();
        match r.get("addition").unwrap() {
            IdentityOutcome::Residual { value } => assert!(*value <= 1e-12),
            o => panic!("{o:?}"),
        }
        let r = identity_suite(&pq(1.5, 0.5), 6, 2).unwrap();
        match r.get("product_n_base").unwrap() {
            IdentityOutcome::Residual { value } => assert!(*value <= 1e-12),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn identity_suite_marks_inapplicable() {
        let r = identity_suite(&pq(0.0, 1.5), 3, 2).unwrap();
        for name in [
            "negative_index",
            "difference_direct",
            "base_inversion",
            "factorial_inversion",
        ] {
            assert!(
                matches!(r.get(name), Some(IdentityOutcome::Inapplicable { .. })),
                "{name}"
            );
        }
        let r = identity_suite(&fib(), 3, 2).unwrap();
        assert!(matches!(
            r.get("quotient_scaled_base"),
            Some(IdentityOutcome::Inapplicable { .. })
        ));
        assert!(identity_suite(&fib(), 65, 1).is_err());
    }
}
