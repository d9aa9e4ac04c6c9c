mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::nine_r;
use common::properties::{self, small_irreps};

use su3_lgt::linalg::CMat;
use su3_lgt::su3_clebsch::{cg_decompose, generators, nine_r, MultiplicityConvention};
use su3_lgt::su3_irreps::{singlet_multiplicity, tensor_decompose};
use su3_lgt::Irrep;

#[test]
fn generators_close_under_commutation() {
    let d = properties::commutator_defect();
    assert!(d < 1e-10, "{d}");
}

#[test]
fn quadratic_casimir_is_scalar() {
    for r in small_irreps() {
        let c2 = generators(r).casimir_matrix();
        let n = c2.nrows();
        let want = CMat::identity(n, n) * Complex64::new(r.casimir_f64(), 0.0);
        assert!((c2 - want).norm() < 1e-10, "{r}");
    }
}

/// All CG columns of `r1 ⊗ r2` form a real orthogonal matrix.
#[test]
fn clebsch_gordan_orthonormal_and_complete() {
    let d = properties::cg_orthogonality_defect();
    assert!(d < 1e-10, "{d}");
}

/// `(T ⊗ 1 + 1 ⊗ T) C = C T'` for every generator.
#[test]
fn clebsch_gordan_intertwines_generators() {
    for r1 in small_irreps().into_iter().take(6) {
        for r2 in small_irreps().into_iter().take(6) {
            let g1 = generators(r1).mats;
            let g2 = generators(r2).mats;
            for t in cg_decompose(r1, r2) {
                let gout = generators(t.r_out).mats;
                let c = t.as_matrix().map(|x| Complex64::new(x, 0.0));
                for a in 0..8 {
                    let total = g1[a].kronecker(&CMat::identity(g2[a].nrows(), g2[a].nrows()))
                        + CMat::identity(g1[a].nrows(), g1[a].nrows()).kronecker(&g2[a]);
                    let lhs = &total * &c;
                    let rhs = &c * &gout[a];
                    assert!((lhs - rhs).norm() < 1e-9, "{r1} x {r2} -> {}", t.r_out);
                }
            }
        }
    }
}

#[test]
fn explicit_nine_r_values() {
    for (slots, want) in nine_r::reference() {
        let got = nine_r(slots, MultiplicityConvention::SymmetricFirst).unwrap();
        assert!((got.abs() - want.abs()).abs() < 1e-10, "{slots:?}: |{got}| vs |{want}|");
        assert!((got - want).abs() < 1e-10, "{slots:?}: sign of {got} vs {want}");
    }
}

fn irrep_strategy(max: u32) -> impl Strategy<Value = Irrep> {
    (0..=max, 0..=max).prop_map(|(p, q)| Irrep::new(p, q))
}

proptest! {
    #[test]
    fn decomposition_preserves_dimension(a in irrep_strategy(4), b in irrep_strategy(4)) {
        let d: u64 = tensor_decompose(a, b).iter().map(|(r, m)| r.dimension() * u64::from(m)).sum();
        prop_assert_eq!(d, a.dimension() * b.dimension());
    }

    #[test]
    fn decomposition_commutes_with_conjugation(a in irrep_strategy(4), b in irrep_strategy(4)) {
        let direct = tensor_decompose(a, b).conjugate();
        let conj = tensor_decompose(a.conjugate(), b.conjugate());
        prop_assert_eq!(direct, conj);
    }

    #[test]
    fn decomposition_is_symmetric(a in irrep_strategy(4), b in irrep_strategy(4)) {
        prop_assert_eq!(tensor_decompose(a, b), tensor_decompose(b, a));
    }

    #[test]
    fn singlet_pairs_only_with_conjugate(a in irrep_strategy(5), b in irrep_strategy(5)) {
        let want = u64::from(b == a.conjugate());
        prop_assert_eq!(singlet_multiplicity(&[a, b]), want);
    }

    #[test]
    fn casimir_matches_closed_form(a in irrep_strategy(8)) {
        let (p, q) = (f64::from(a.p), f64::from(a.q));
        let want = (p * p + q * q + p * q + 3.0 * p + 3.0 * q) / 3.0;
        prop_assert!((a.casimir_f64() - want).abs() < 1e-12);
    }
}
