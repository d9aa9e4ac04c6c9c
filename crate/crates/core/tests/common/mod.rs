#![allow(dead_code)]

pub mod benchmarks;
pub mod golden;
pub mod nine_r;
pub mod properties;
pub mod tables;
pub mod sectors;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C = Complex64;
pub type M = DMatrix<Complex64>;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn pauli(ch: char) -> M {
    let z = c(0.0);
    let o = c(1.0);
    let i = C::new(0.0, 1.0);
    match ch {
        'I' => M::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => M::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => M::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => M::from_row_slice(2, 2, &[o, z, z, -o]),
        // (I + Z) / 2 and (I - Z) / 2
        'P' => M::from_row_slice(2, 2, &[o, z, z, z]),
        'N' => M::from_row_slice(2, 2, &[z, z, z, o]),
        // b = (X + iY) / 2 = |0><1|
        'b' => M::from_row_slice(2, 2, &[z, o, z, z]),
        'd' => M::from_row_slice(2, 2, &[z, z, o, z]),
        _ => panic!("unknown factor {ch}"),
    }
}

/// Tensor product of single-qubit factors, most significant first.
pub fn ps(s: &str) -> M {
    s.chars().fold(M::identity(1, 1), |acc, ch| acc.kronecker(&pauli(ch)))
}

/// Linear combination of Pauli strings.
pub fn combo(terms: &[(f64, &str)]) -> M {
    let n = 1 << terms[0].1.len();
    terms.iter().fold(M::zeros(n, n), |acc, (w, s)| acc + ps(s) * c(*w))
}

pub fn real_part(m: &M) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn max_dev(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
