//! Dense linear-algebra helpers shared by the simulation modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(factors: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// `exp(-i t H)` for Hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    // the complex Hermitian eigensolver occasionally fails on very
    // degenerate sparse inputs; fall back to Padé scaling and squaring
    let finite = eig.eigenvalues.iter().all(|w| w.is_finite()) && v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite {
        return (h * (-I * t)).exp();
    }
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&w| (-I * w * t).exp()),
    );
    let scaled = CMat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
    scaled * v.adjoint()
}

/// `exp(-i t H)` for real symmetric `H`.
pub fn expm_symmetric(h: &RMat, t: f64) -> CMat {
    expm_hermitian(&to_complex(h), t)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff_real(a: &RMat, b: &RMat) -> f64 {
    (a - b).iter().map(|z| z.abs()).fold(0.0, f64::max)
}

/// Entrywise distance between two matrices after removing the best global
/// phase `e^{i phi}` aligning `b` to `a`.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    max_abs_diff(a, &(b * phase))
}

/// Deviation of `u` from unitarity, `max |u^† u - 1|`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMat::identity(n, n))
}

pub fn hermiticity_defect(h: &CMat) -> f64 {
    max_abs_diff(h, &h.adjoint())
}

/// Real symmetric eigendecomposition with eigenpairs sorted ascending.
pub fn sorted_eigh(h: &RMat) -> (Vec<f64>, RMat) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Ordinary least squares fit of `y ≈ Σ_k c_k x^k`, `k = 0..=degree`.
/// Returns the coefficients and the L2 norm of the residual.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> (Vec<f64>, f64) {
    let n = x.len();
    let cols = degree + 1;
    // Scale abscissae to [0, 1] so high-degree Vandermonde systems stay tame.
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let a = RMat::from_fn(n, cols, |i, k| (x[i] / scale).powi(k as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&b, 1e-14).expect("SVD solve with both factors computed");
    let resid = (&a * &sol - &b).norm();
    let coeffs = sol.iter().enumerate().map(|(k, c)| c / scale.powi(k as i32)).collect();
    (coeffs, resid)
}

/// Slope, intercept and coefficient of determination of a straight-line fit.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_pauli_x_is_rotation() {
        let x = CMat::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]);
        let t = 0.37;
        let u = expm_hermitian(&x, t);
        let c = Complex64::new(t.cos(), 0.0);
        let s = Complex64::new(0.0, -t.sin());
        let want = CMat::from_row_slice(2, 2, &[c, s, s, c]);
        assert!(max_abs_diff(&u, &want) < 1e-14);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = CMat::from_fn(3, 3, |i, j| Complex64::new((i * 3 + j) as f64, 1.0));
        let b = &a * Complex64::from_polar(1.0, 0.9);
        assert!(phase_distance(&a, &b) < 1e-12);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (s, c, r2) = linear_fit(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && (c - 2.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }
}
