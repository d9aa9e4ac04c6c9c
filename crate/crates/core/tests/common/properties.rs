//! Structural invariants shared by the property suites and the acceptance
//! runner; each returns the worst defect found.

use num_complex::Complex64;
use su3_lgt::evolution::{named_scheme, TrotterOrder};
use su3_lgt::linalg::{expm_hermitian, linear_fit, CMat, RMat};
use su3_lgt::su3_clebsch::{cg_decompose, generators};
use su3_lgt::Irrep;

pub fn small_irreps() -> Vec<Irrep> {
    (0..=2).flat_map(|p| (0..=2).map(move |q| Irrep::new(p, q))).collect()
}

/// Nonzero SU(3) structure constants in the Gell-Mann basis.
pub fn structure_constants() -> [[[f64; 8]; 8]; 8] {
    let h = 3f64.sqrt() / 2.0;
    let table = [
        (1, 2, 3, 1.0),
        (1, 4, 7, 0.5),
        (1, 5, 6, -0.5),
        (2, 4, 6, 0.5),
        (2, 5, 7, 0.5),
        (3, 4, 5, 0.5),
        (3, 6, 7, -0.5),
        (4, 5, 8, h),
        (6, 7, 8, h),
    ];
    let mut f = [[[0.0; 8]; 8]; 8];
    for (a, b, c, v) in table {
        let (a, b, c) = (a - 1, b - 1, c - 1);
        for (x, y, z, s) in [(a, b, c, 1.0), (b, c, a, 1.0), (c, a, b, 1.0), (b, a, c, -1.0), (a, c, b, -1.0), (c, b, a, -1.0)] {
            f[x][y][z] = s * v;
        }
    }
    f
}

/// `max ‖[T_a, T_b] - i f_abc T_c‖` over irreps with `p, q ≤ 2`.
pub fn commutator_defect() -> f64 {
    let f = structure_constants();
    let mut worst = 0.0f64;
    for r in small_irreps() {
        let t = generators(r).mats;
        for a in 0..8 {
            for b in 0..8 {
                let comm = &t[a] * &t[b] - &t[b] * &t[a];
                let mut want = CMat::zeros(comm.nrows(), comm.ncols());
                for (c, tc) in t.iter().enumerate() {
                    want += tc * Complex64::new(0.0, f[a][b][c]);
                }
                worst = worst.max((comm - want).norm());
            }
        }
    }
    worst
}

/// Stacking every CG column of `r1 ⊗ r2` must give a real orthogonal
/// matrix: orthonormal columns and the completeness sum rule on rows.
pub fn cg_orthogonality_defect() -> f64 {
    let mut worst = 0.0f64;
    for r1 in small_irreps() {
        for r2 in small_irreps() {
            let tensors = cg_decompose(r1, r2);
            let n = (r1.dimension() * r2.dimension()) as usize;
            let cols: usize = tensors.iter().map(|t| t.dims[2]).sum();
            if cols != n {
                return f64::INFINITY;
            }
            let mut u = RMat::zeros(n, n);
            let mut k = 0;
            for t in &tensors {
                let m = t.as_matrix();
                for c in 0..m.ncols() {
                    u.set_column(k, &m.column(c));
                    k += 1;
                }
            }
            let id = RMat::identity(n, n);
            worst = worst.max((u.transpose() * &u - &id).abs().max());
            worst = worst.max((&u * u.transpose() - id).abs().max());
        }
    }
    worst
}

/// Log-log slope of the global Trotter error over unit time against the
/// step count, for the three-term two-plaquette splitting.
pub fn trotter_slope(order: TrotterOrder) -> f64 {
    let (scheme, model) = named_scheme("twoplaq3", 1.0, order).unwrap();
    let exact = expm_hermitian(&model.hamiltonian, 1.0);
    let (x, y): (Vec<f64>, Vec<f64>) = [8usize, 16, 32, 64]
        .iter()
        .map(|&n| ((n as f64).ln(), (scheme.unitary(1.0, n) - &exact).norm().ln()))
        .unzip();
    linear_fit(&x, &y).0
}
