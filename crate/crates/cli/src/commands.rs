use num_complex::Complex64;
use rayon::prelude::*;

use pq_osc_core::calculus::{
    exp_relation_residual, pq_exp_big_classified, pq_exp_small_classified, SeriesClass, SeriesConfig,
};
use pq_osc_core::coherent::{uncertainty_closed, uncertainty_numeric, uncertainty_symmetric_form, DimChoice};
use pq_osc_core::error::PqError;
use pq_osc_core::fock::{algebra_residuals, hamiltonian_residual, Units};
use pq_osc_core::numbers::{identity_suite, pq_number, pq_number_recursive, DeformationParams, IdentityOutcome};
use pq_osc_core::susy::{
    concurrence, concurrence_closed, concurrence_density, entangled_super_coherent, reference_state,
    reference_uncertainty, reference_uncertainty_numeric, super_residuals, super_spectrum, EntangledKind,
};
use pq_osc_core::verify::{run_suite, suite_names};

use crate::args::{Common, Quantity};
use crate::error::CliError;
use crate::table::{Cell, Row, Table};

/// Closed-form and numeric concurrences further apart than this are flagged.
const CONCURRENCE_AGREEMENT: f64 = 1e-6;

struct Ctx {
    params: DeformationParams,
    label: String,
}

impl Ctx {
    fn new(c: &Common) -> Result<Self, CliError> {
        let (params, label) = c.params()?;
        Ok(Self { params, label })
    }

    fn head(&self) -> Vec<Cell> {
        vec![
            self.label.clone().into(),
            self.params.p().into(),
            self.params.q().into(),
        ]
    }

    fn with(&self, extra: impl IntoIterator<Item = Cell>) -> Vec<Cell> {
        let mut v = self.head();
        v.extend(extra);
        v
    }
}

const HEAD: [&str; 3] = ["family", "p", "q"];

fn columns(extra: &[&'static str]) -> Vec<&'static str> {
    HEAD.iter().chain(extra).copied().collect()
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let d = a.abs().max(b.abs());
    if d == 0.0 {
        0.0
    } else {
        (a - b).abs() / d
    }
}

/// Evaluates `f` on every point in parallel, keeping grid order.
fn par_rows<T: Sync>(points: &[T], f: impl Fn(&T) -> Vec<Row> + Sync + Send) -> Vec<Row> {
    points
        .par_iter()
        .map(f)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn numbers(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let mut t = Table::new(columns(&["n"]));
    let ns: Vec<i64> = (0..=c.n_max as i64).collect();
    t.rows = par_rows(&ns, |&n| {
        let inputs = ctx.with([n.into()]);
        let direct = pq_number(&ctx.params, n);
        let recursive = pq_number_recursive(&ctx.params, n as u32);
        vec![match (direct, recursive) {
            (Ok(v), Ok(r)) => Row::ok(inputs, v, "closed_form", (v - r).abs() / v.abs().max(1.0)),
            (Ok(v), Err(_)) => Row::ok(inputs, v, "closed_form", None),
            (Err(e), _) => Row::failed(inputs, "closed_form", e.kind()),
        }]
    });
    Ok(t)
}

fn class_status(class: SeriesClass) -> &'static str {
    match class {
        SeriesClass::Converged => "ok",
        SeriesClass::TruncatedAtCap => "truncated_at_cap",
        SeriesClass::Diverging => "diverging",
    }
}

pub fn exp(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let cfg = SeriesConfig::with_tol(c.tol()?);
    let grid = c.alpha_grid()?;
    let mut t = Table::new(columns(&["z_re", "z_im", "function", "component"]));
    t.rows = par_rows(&grid, |&z| {
        let relation = exp_relation_residual(&ctx.params, z, cfg.tol).ok();
        let mut rows = Vec::new();
        for (name, value) in [
            ("e", pq_exp_small_classified(&ctx.params, z, &cfg)),
            ("E", pq_exp_big_classified(&ctx.params, z, &cfg)),
        ] {
            let residual = if name == "e" { relation } else { None };
            for (part, pick) in [("re", 0), ("im", 1)] {
                let inputs = ctx.with([z.re.into(), z.im.into(), name.into(), part.into()]);
                rows.push(match &value {
                    Ok(v) => {
                        let x = if pick == 0 { v.value.re } else { v.value.im };
                        let mut row = Row::ok(inputs, x, "series", residual);
                        row.status = class_status(v.classification).into();
                        row
                    }
                    Err(e) => Row::failed(inputs, "series", e.kind()),
                });
            }
        }
        rows
    });
    Ok(t)
}

pub fn spectrum(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let dim = match c.dim()? {
        DimChoice::Fixed(d) => d,
        DimChoice::Auto => c.n_max + 2,
    };
    let mut t = Table::new(columns(&["n", "quantity"]));
    let residual = hamiltonian_residual(&ctx.params, dim, 1.0)?.scaled;
    let levels = super_spectrum(&ctx.params, dim, 1.0)?;
    for n in 0..=c.n_max.min(dim - 2) {
        let b = |k: usize| ctx.params.bracket(k as i64);
        t.rows.push(Row::ok(
            ctx.with([n.into(), "H".into()]),
            0.5 * (b(n) + b(n + 1)),
            "closed_form",
            residual,
        ));
        let level = &levels[n];
        t.rows.push(Row::ok(
            ctx.with([n.into(), "H_S".into()]),
            level.energy,
            "closed_form",
            None,
        ));
        t.rows.push(Row::ok(
            ctx.with([n.into(), "H_S_multiplicity".into()]),
            Cell::Int(level.multiplicity as i64),
            "matrix_numeric",
            None,
        ));
    }
    Ok(t)
}

pub fn uncertainty(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let grid = c.alpha_grid()?;
    let dim = c.dim()?;
    let units = Units::default();
    let mut t = Table::new(columns(&["alpha_re", "alpha_im", "dim"]));
    t.rows = par_rows(&grid, |&a| {
        let inputs = |d: Cell| ctx.with([a.re.into(), a.im.into(), d]);
        let closed = uncertainty_closed(&ctx.params, a, &units);
        let reference = closed.as_ref().ok().map(|r| r.product);
        let gap = |v: f64| reference.map(|r| rel_gap(v, r));
        let mut rows = vec![match &closed {
            Ok(r) => Row::ok(inputs(Cell::Empty), r.product, "closed_form", None),
            Err(e) => Row::failed(inputs(Cell::Empty), "closed_form", e.kind()),
        }];
        rows.push(match uncertainty_symmetric_form(&ctx.params, a, &units) {
            Ok(r) => Row::ok(inputs(Cell::Empty), r.product, "symmetric_form", gap(r.product)),
            Err(e) => Row::failed(inputs(Cell::Empty), "symmetric_form", e.kind()),
        });
        rows.push(match numeric_with_dim(&ctx.params, a, dim, &units) {
            Ok((v, d)) => Row::ok(inputs(d.into()), v, "matrix_numeric", gap(v)),
            Err(e) => Row::failed(inputs(Cell::Empty), "matrix_numeric", e.kind()),
        });
        rows
    });
    Ok(t)
}

fn numeric_with_dim(
    params: &DeformationParams,
    alpha: Complex64,
    dim: DimChoice,
    units: &Units,
) -> Result<(f64, usize), PqError> {
    let d = match dim {
        DimChoice::Fixed(d) => d,
        DimChoice::Auto => pq_osc_core::coherent::suggest_dim(params, alpha, pq_osc_core::coherent::DEFAULT_TAIL_TOL)?,
    };
    let (r, _) = uncertainty_numeric(params, alpha, DimChoice::Fixed(d), units)?;
    Ok((r.product, d))
}

pub fn concurrence_table(c: &Common, kind: EntangledKind) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let grid = c.alpha_grid()?;
    let dim = c.dim()?;
    let mut t = Table::new(columns(&["kind", "alpha_re", "alpha_im", "dim"]));
    t.rows = par_rows(&grid, |&a| {
        let inputs = |d: Cell| ctx.with([kind.as_str().into(), a.re.into(), a.im.into(), d]);
        let numeric = entangled_super_coherent(&ctx.params, a, kind, dim)
            .and_then(|s| Ok((concurrence(&s)?, concurrence_density(&s), s.dim())));
        let mut rows = Vec::new();
        let gram = match numeric {
            Ok((v, oracle, d)) => {
                rows.push(Row::ok(inputs(d.into()), v, "gram_determinant", (v - oracle).abs()));
                Some(v)
            }
            Err(e) => {
                rows.push(Row::failed(inputs(Cell::Empty), "gram_determinant", e.kind()));
                None
            }
        };
        rows.push(match concurrence_closed(&ctx.params, a.norm_sqr(), kind) {
            Ok(v) => {
                let gap = gram.map(|g| (g - v).abs());
                let mut row = Row::ok(inputs(Cell::Empty), v, "closed_form", gap);
                if gap.is_some_and(|g| g > CONCURRENCE_AGREEMENT) {
                    row.status = "paper-divergence".into();
                }
                row
            }
            Err(e) => Row::failed(inputs(Cell::Empty), "closed_form", e.kind()),
        });
        rows
    });
    Ok(t)
}

pub fn reference_values(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let mut t = Table::new(columns(&["kind", "quantity"]));
    for kind in [EntangledKind::L, EntangledKind::B] {
        let w = match kind {
            EntangledKind::L => ctx.params.p(),
            EntangledKind::B => ctx.params.q(),
        };
        let inputs = |q: &str| ctx.with([kind.as_str().into(), q.into()]);
        let closed = 2.0 * w.abs() / (1.0 + w * w);
        let numeric = reference_state(&ctx.params, kind, 4).and_then(|s| concurrence(&s));
        t.rows.push(match numeric {
            Ok(v) => Row::ok(inputs("concurrence"), closed, "closed_form", (v - closed).abs()),
            Err(e) => Row::failed(inputs("concurrence"), "closed_form", e.kind()),
        });
        let u = reference_uncertainty(&ctx.params, kind).product;
        t.rows.push(match reference_uncertainty_numeric(&ctx.params, kind) {
            Ok(n) => Row::ok(inputs("uncertainty"), u, "closed_form", (n.product - u).abs()),
            Err(e) => Row::failed(inputs("uncertainty"), "closed_form", e.kind()),
        });
    }
    Ok(t)
}

pub fn identity_table(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let n_max = c.n_max as i64;
    if n_max > pq_osc_core::numbers::IDENTITY_INDEX_MAX {
        return Err(CliError::ConfigInvalid {
            field: "n-max".into(),
            message: format!(
                "at most {} for identity_suite",
                pq_osc_core::numbers::IDENTITY_INDEX_MAX
            ),
        });
    }
    let points: Vec<(i64, i64)> = (0..=n_max).flat_map(|n| (0..=n_max).map(move |m| (n, m))).collect();
    let mut t = Table::new(columns(&["n", "m", "identity"]));
    t.rows = par_rows(&points, |&(n, m)| match identity_suite(&ctx.params, n, m) {
        Ok(report) => report
            .checks
            .iter()
            .map(|check| {
                let inputs = ctx.with([n.into(), m.into(), check.name.into()]);
                match &check.outcome {
                    IdentityOutcome::Residual { value } => Row::ok(inputs, Cell::Empty, "closed_form", *value),
                    IdentityOutcome::Inapplicable { .. } => {
                        let mut row = Row::ok(inputs, Cell::Empty, "closed_form", None);
                        row.status = "inapplicable".into();
                        row
                    }
                    IdentityOutcome::Error { .. } => Row::failed(inputs, "closed_form", "IdentityError"),
                }
            })
            .collect(),
        Err(e) => vec![Row::failed(
            ctx.with([n.into(), m.into(), Cell::Empty]),
            "closed_form",
            e.kind(),
        )],
    });
    Ok(t)
}

pub fn algebra_table(c: &Common) -> Result<Table, CliError> {
    let ctx = Ctx::new(c)?;
    let dim = match c.dim()? {
        DimChoice::Fixed(d) => d,
        DimChoice::Auto => 16,
    };
    let r = algebra_residuals(&ctx.params, dim)?;
    let s = super_residuals(&ctx.params, dim, 1.0)?;
    let mut t = Table::new(columns(&["dim", "relation"]));
    for (name, res) in [
        ("p_relation", r.p_relation),
        ("q_relation", r.q_relation),
        ("commutator", r.commutator),
        ("number_commutator", r.number_commutator),
        ("intertwining", r.intertwining),
        ("supercharges", s.charges),
        ("super_number_functional", s.functional),
        ("partial_trace", s.partial_trace),
    ] {
        t.rows.push(Row::ok(
            ctx.with([dim.into(), name.into()]),
            res.absolute,
            "matrix_numeric",
            res.scaled,
        ));
    }
    Ok(t)
}

pub fn sweep(q: Quantity, c: &Common) -> Result<Table, CliError> {
    match q {
        Quantity::PqNumber => numbers(c),
        Quantity::Spectrum => spectrum(c),
        Quantity::Uncertainty => uncertainty(c),
        Quantity::ConcurrenceL => concurrence_table(c, EntangledKind::L),
        Quantity::ConcurrenceB => concurrence_table(c, EntangledKind::B),
        Quantity::ReferenceValues => reference_values(c),
        Quantity::IdentitySuite => identity_table(c),
        Quantity::AlgebraResiduals => algebra_table(c),
    }
}

pub fn verify(selector: &str) -> Result<Table, CliError> {
    let names: Vec<&str> = if selector == "all" {
        suite_names()
    } else if suite_names().contains(&selector) {
        vec![selector]
    } else {
        return Err(CliError::ConfigInvalid {
            field: "suite".into(),
            message: format!(
                "unknown suite `{selector}`; expected one of: all, {}",
                suite_names().join(", ")
            ),
        });
    };
    let mut t = Table::new(vec!["suite", "tolerance", "checked", "detail"]);
    t.rows = par_rows(&names, |name| {
        let r = run_suite(name).expect("registered suite");
        let mut row = Row::ok(
            vec![
                r.name.into(),
                r.tolerance.into(),
                r.checked.into(),
                r.detail.clone().into(),
            ],
            r.worst,
            "suite",
            r.worst,
        );
        row.status = r.status.as_str().into();
        vec![row]
    });
    Ok(t)
}
