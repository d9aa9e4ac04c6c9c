//! SU(2) single plaquette in the Casimir basis `j = 0, 1, ..., j_max`.
//!
//! The ground-state tail decays so fast that double precision loses it
//! within a few dozen `j`. [`log_ground_state`] therefore integrates the
//! three-term recurrence downward from `j_max` in ratio form, which is
//! stable for the decaying solution and stays accurate in log space.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorMatrix;
use crate::linalg::{linear_fit, sorted_eigh, RMat};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SU2PlaquetteModel {
    pub j_max: usize,
    pub g: f64,
}

impl SU2PlaquetteModel {
    pub fn new(j_max: usize, g: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::BadCoupling(g));
        }
        if j_max == 0 {
            return Err(Error::Config("j_max must be at least 1".into()));
        }
        Ok(SU2PlaquetteModel { j_max, g })
    }

    fn diagonal(&self, j: usize) -> f64 {
        let g2 = self.g * self.g;
        0.5 * g2 * (j * (j + 1)) as f64 + 2.0 / g2
    }

    pub fn dense(&self) -> RMat {
        let n = self.j_max + 1;
        let off = -1.0 / (self.g * self.g);
        RMat::from_fn(n, n, |a, b| {
            if a == b {
                self.diagonal(a)
            } else if a.abs_diff(b) == 1 {
                off
            } else {
                0.0
            }
        })
    }
}

/// Tridiagonal Hamiltonian in the shared operator form: electric `j(j+1)`,
/// magnetic `-2` on the first off-diagonals, constant `4`.
pub fn su2_hamiltonian(model: &SU2PlaquetteModel) -> OperatorMatrix {
    let n = model.j_max + 1;
    let mut magnetic = Vec::with_capacity(2 * n);
    for j in 0..n - 1 {
        magnetic.push((j, j + 1, -2.0));
        magnetic.push((j + 1, j, -2.0));
    }
    OperatorMatrix {
        labels: (0..n).map(|j| format!("j={j}")).collect(),
        basis: Vec::new(),
        electric: (0..n).map(|j| Rational64::from_integer((j * (j + 1)) as i64)).collect(),
        magnetic,
        constant: 4.0,
        g: model.g,
    }
}

pub fn ground_energy(model: &SU2PlaquetteModel) -> f64 {
    sorted_eigh(&model.dense()).0[0]
}

/// `ln ψ₀(j)` of the positive, normalised ground state.
pub fn log_ground_state(model: &SU2PlaquetteModel) -> Vec<f64> {
    let e = ground_energy(model);
    let t = 1.0 / (model.g * model.g);
    let n = model.j_max + 1;
    // rho[j] = ψ(j) / ψ(j-1) from the top row downward
    let mut rho = vec![0.0; n];
    let mut next = 0.0;
    for j in (1..n).rev() {
        rho[j] = t / (model.diagonal(j) - e - t * next);
        next = rho[j];
    }
    let mut log_psi = vec![0.0; n];
    for j in 1..n {
        log_psi[j] = log_psi[j - 1] + rho[j].ln();
    }
    let max = log_psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm = log_psi.iter().map(|l| (2.0 * (l - max)).exp()).sum::<f64>().ln() / 2.0 + max;
    log_psi.iter().map(|l| l - norm).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
    /// Gaussian estimate `-g²/(2√2)`.
    pub predicted: f64,
}

/// Least-squares slope of `ln ψ₀(j)` against `(j + 1/2)²` over
/// `j ∈ [ceil(4/g), j_max - 4]`.
pub fn tail_slope(model: &SU2PlaquetteModel) -> Result<TailFit> {
    let lo = (4.0 / model.g).ceil() as usize;
    let hi = model.j_max.saturating_sub(4);
    if hi < lo + 2 {
        return Err(Error::FitWindow(format!(
            "tail window [{lo}, {hi}] needs at least three points; raise j_max above {}",
            lo + 5
        )));
    }
    let log_psi = log_ground_state(model);
    let x: Vec<f64> = (lo..=hi).map(|j| (j as f64 + 0.5).powi(2)).collect();
    let y: Vec<f64> = (lo..=hi).map(|j| log_psi[j]).collect();
    let (slope, intercept, r_squared) = linear_fit(&x, &y);
    Ok(TailFit { slope, intercept, r_squared, window: (lo, hi), predicted: -model.g * model.g / (2.0 * 2f64.sqrt()) })
}

/// `(j, ψ₀(j))` rows; values below the double range print as zero.
pub fn ground_state_csv(model: &SU2PlaquetteModel) -> String {
    let mut s = String::from("j,psi0,log_psi0\n");
    for (j, l) in log_ground_state(model).iter().enumerate() {
        s.push_str(&format!("{j},{:.12e},{l:.12}\n", l.exp()));
    }
    s
}
