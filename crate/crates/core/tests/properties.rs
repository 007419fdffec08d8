use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use pq_osc_core::coherent::{coherent_vector, CoherentSpec, DimChoice};
use pq_osc_core::fock::FockVector;
use pq_osc_core::numbers::{pq_number, pq_number_recursive, DeformationParams};
use pq_osc_core::susy::{concurrence, concurrence_density, entangled_super_coherent, EntangledKind, SuperState};

fn params_strategy() -> impl Strategy<Value = (f64, f64)> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_filter("distinct, nonzero", |(p, q)| {
        (p - q).abs() > 1e-3 && p.abs() > 1e-3 && q.abs() > 1e-3
    })
}

fn vector_strategy(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
        dim,
    )
}

fn scaled_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn bracket_is_symmetric((p, q) in params_strategy(), n in 0i64..30) {
        let a = pq_number(&DeformationParams::new(p, q).unwrap(), n).unwrap();
        let b = pq_number(&DeformationParams::new(q, p).unwrap(), n).unwrap();
        prop_assert!(scaled_gap(a, b) < 1e-12);
    }

    #[test]
    fn direct_matches_recursion((p, q) in params_strategy(), n in 0u32..40) {
        let params = DeformationParams::new(p, q).unwrap();
        let direct = pq_number(&params, n as i64).unwrap();
        let rec = pq_number_recursive(&params, n).unwrap();
        prop_assert!(scaled_gap(direct, rec) < 1e-9);
    }

    #[test]
    fn inverted_base_rescales((p, q) in params_strategy(), n in 0i64..20) {
        // [n]_{1/p,1/q} = (pq)^{1-n} [n]_{p,q}
        let params = DeformationParams::new(p, q).unwrap();
        let inv = params.inverted().unwrap();
        let lhs = pq_number(&inv, n).unwrap();
        let rhs = (p * q).powi(1 - n as i32) * pq_number(&params, n).unwrap();
        prop_assert!(scaled_gap(lhs, rhs) < 1e-9);
    }

    #[test]
    fn concurrence_bounded_and_matches_purity(u in vector_strategy(8), v in vector_strategy(8)) {
        let raw = SuperState::new(FockVector::new(u), FockVector::new(v)).unwrap();
        prop_assume!(raw.norm_sqr() > 1e-6);
        let s = raw.normalize().unwrap();
        let c = concurrence(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let g = s.gram();
        prop_assert!(g[0][0].re * g[1][1].re - g[0][1].norm_sqr() >= -1e-15);
        // Compare squares: the square root amplifies roundoff near C = 0.
        prop_assert!((c * c - concurrence_density(&s).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn product_states_have_zero_concurrence(u in vector_strategy(8), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let w = Complex64::new(a, b);
        let raw = SuperState::new(FockVector::new(u.clone()), FockVector::new(u.iter().map(|x| x * w).collect())).unwrap();
        prop_assume!(raw.norm_sqr() > 1e-6);
        let c = concurrence(&raw.normalize().unwrap()).unwrap();
        prop_assert!(c * c < 1e-12);
    }

    #[test]
    fn coherent_vector_is_normalized(r in 0.0f64..1.0, theta in 0.0f64..std::f64::consts::TAU, q in 0.6f64..1.4) {
        let params = DeformationParams::new(1.0 / q, q).unwrap();
        let v = coherent_vector(&params, &CoherentSpec::new(Complex64::from_polar(r, theta))).unwrap();
        prop_assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn undeformed_bracket_is_integer() {
    let params = DeformationParams::new(1.0, 1.0).unwrap();
    for n in 0..50 {
        assert_relative_eq!(pq_number(&params, n).unwrap(), n as f64, max_relative = 1e-15);
    }
}

#[test]
fn entangled_states_are_normalized_and_entangled() {
    let params = DeformationParams::new(1.0 / 1.2, 1.2).unwrap();
    for kind in [EntangledKind::L, EntangledKind::B] {
        let s = entangled_super_coherent(&params, Complex64::new(0.4, -0.2), kind, DimChoice::Auto).unwrap();
        assert_relative_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        let c = concurrence(&s).unwrap();
        assert!(c > 0.1 && c <= 1.0, "{c}");
    }
}
