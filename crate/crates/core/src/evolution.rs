//! Real-time evolution of small dense models: exact spectral propagation,
//! product-formula (Trotter) propagation, first-extremum extraction and
//! truncation-convergence sweeps.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{color_parity_reduce, one_plaquette_pq_hamiltonian, OperatorMatrix};
use crate::linalg::{sorted_eigh, to_complex, CMat, CVec, I};
use crate::qubit_compile::pauli_sum;
use crate::su3_irreps::{Irrep, Truncation};

/// A Hamiltonian together with the electric-energy observable, both dense.
#[derive(Clone, Debug)]
pub struct DenseModel {
    pub hamiltonian: CMat,
    pub electric: CMat,
}

impl DenseModel {
    pub fn from_operator(h: &OperatorMatrix) -> Self {
        let g2 = h.g * h.g;
        DenseModel { hamiltonian: to_complex(&h.dense()), electric: to_complex(&(h.electric_dense() * (g2 / 2.0))) }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: CVec,
}

impl StateVector {
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = CVec::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn expectation(&self, op: &CMat) -> f64 {
        self.amplitudes.dotc(&(op * &self.amplitudes)).re
    }

    pub fn overlap_probability(&self, other: &StateVector) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub persistence: Vec<f64>,
    pub electric_energy: Vec<f64>,
    pub leakage: Option<Vec<f64>>,
}

impl Trajectory {
    fn push(&mut self, t: f64, psi0: &StateVector, psi: &StateVector, electric: &CMat) {
        self.times.push(t);
        self.persistence.push(psi0.overlap_probability(psi));
        self.electric_energy.push(psi.expectation(electric));
    }

    /// Rows `(t, persistence, electric_energy, leakage)`; leakage is empty
    /// when not tracked.
    pub fn rows(&self) -> Vec<[String; 4]> {
        (0..self.times.len())
            .map(|i| {
                [
                    format!("{:.6}", self.times[i]),
                    format!("{:.12}", self.persistence[i]),
                    format!("{:.12}", self.electric_energy[i]),
                    self.leakage.as_ref().map_or(String::new(), |l| format!("{:.3e}", l[i])),
                ]
            })
            .collect()
    }
}

/// Uniform grid `0, dt, 2dt, ...` strictly below `t_max` (or `{0}` when
/// `t_max` is zero).
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::Config(format!("bad time grid t_max={t_max} dt={dt}")));
    }
    let n = ((t_max / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((0..n).map(|i| i as f64 * dt).collect())
}

/// Spectral decomposition of a Hermitian matrix for repeated propagation.
struct Propagator {
    vectors: CMat,
    values: Vec<f64>,
}

impl Propagator {
    fn new(h: &CMat) -> Self {
        let eig = SymmetricEigen::new(h.clone());
        Propagator { vectors: eig.eigenvectors, values: eig.eigenvalues.iter().copied().collect() }
    }

    fn unitary(&self, t: f64) -> CMat {
        let v = &self.vectors;
        let scaled = CMat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * (-I * self.values[j] * t).exp());
        scaled * v.adjoint()
    }

    fn apply(&self, psi: &CVec, t: f64) -> CVec {
        let coeffs = self.vectors.adjoint() * psi;
        let phased = CVec::from_iterator(coeffs.len(), coeffs.iter().zip(&self.values).map(|(c, w)| c * (-I * w * t).exp()));
        &self.vectors * phased
    }
}

/// `|ψ(t)> = exp(-iHt)|ψ0>` by dense eigendecomposition.
pub fn exact_evolve(model: &DenseModel, psi0: &StateVector, times: &[f64]) -> Trajectory {
    let prop = Propagator::new(&model.hamiltonian);
    let mut traj = Trajectory::default();
    for &t in times {
        let psi = StateVector { amplitudes: prop.apply(&psi0.amplitudes, t) };
        traj.push(t, psi0, &psi, &model.electric);
    }
    traj
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrotterOrder {
    First,
    Second,
}

impl TrotterOrder {
    pub fn from_int(k: u32) -> Result<Self> {
        match k {
            1 => Ok(TrotterOrder::First),
            2 => Ok(TrotterOrder::Second),
            _ => Err(Error::Config(format!("Trotter order must be 1 or 2, got {k}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
        }
    }
}

/// Ordered Hamiltonian terms. First order applies `H_1` first; second
/// order is the symmetric `H_1/2 ... H_{n-1}/2 H_n H_{n-1}/2 ... H_1/2`.
#[derive(Clone, Debug)]
pub struct TrotterScheme {
    pub name: String,
    pub terms: Vec<CMat>,
    pub order: TrotterOrder,
}

impl TrotterScheme {
    pub fn sum(&self) -> CMat {
        let n = self.terms[0].nrows();
        self.terms.iter().fold(CMat::zeros(n, n), |acc, t| acc + t)
    }

    fn sequence(&self) -> Vec<(usize, f64)> {
        let n = self.terms.len();
        match self.order {
            TrotterOrder::First => (0..n).map(|k| (k, 1.0)).collect(),
            TrotterOrder::Second => {
                let mut s: Vec<(usize, f64)> = (0..n - 1).map(|k| (k, 0.5)).collect();
                s.push((n - 1, 1.0));
                s.extend((0..n - 1).rev().map(|k| (k, 0.5)));
                s
            }
        }
    }

    /// One product-formula step of size `dt`.
    pub fn step_unitary(&self, dt: f64) -> CMat {
        let props: Vec<Propagator> = self.terms.iter().map(Propagator::new).collect();
        self.step_with(&props, dt)
    }

    fn step_with(&self, props: &[Propagator], dt: f64) -> CMat {
        let n = self.terms[0].nrows();
        self.sequence().into_iter().fold(CMat::identity(n, n), |u, (k, w)| props[k].unitary(w * dt) * u)
    }

    /// `[step(t / n_steps)]^n_steps`.
    pub fn unitary(&self, t: f64, n_steps: usize) -> CMat {
        let props: Vec<Propagator> = self.terms.iter().map(Propagator::new).collect();
        let step = self.step_with(&props, t / n_steps as f64);
        let n = step.nrows();
        (0..n_steps).fold(CMat::identity(n, n), |u, _| &step * u)
    }
}

/// Trotterized trajectory: at each sampled time `t` the state is
/// propagated by `n_steps` steps of size `t / n_steps`.
pub fn trotter_evolve(
    scheme: &TrotterScheme,
    electric: &CMat,
    psi0: &StateVector,
    times: &[f64],
    n_steps: usize,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::Config("n_steps must be positive".into()));
    }
    let props: Vec<Propagator> = scheme.terms.iter().map(Propagator::new).collect();
    let mut traj = Trajectory::default();
    for &t in times {
        let step = scheme.step_with(&props, t / n_steps as f64);
        let mut v = psi0.amplitudes.clone();
        for _ in 0..n_steps {
            v = &step * v;
        }
        traj.push(t, psi0, &StateVector { amplitudes: v }, electric);
    }
    Ok(traj)
}

/// Two-term split into electric and magnetic parts (the constant goes with
/// the magnetic term).
pub fn electric_magnetic_scheme(h: &OperatorMatrix, order: TrotterOrder) -> TrotterScheme {
    let g2 = h.g * h.g;
    let n = h.dim();
    let he = to_complex(&(h.electric_dense() * (g2 / 2.0)));
    let hb = to_complex(&((h.magnetic_dense() + nalgebra::DMatrix::identity(n, n) * h.constant) / (2.0 * g2)));
    TrotterScheme { name: "electric-magnetic".into(), terms: vec![he, hb], order }
}

/// Splittings of the small qubit Hamiltonians, by name:
/// `global8` (one plaquette, `{1,3,3bar,8}`, two terms), `color3`
/// (`{1,3+}`, one term), `color6` (`{1,3+,6+,8}`, three terms) and
/// `twoplaq3` (two plaquettes, `{1,3,3bar}` `++` sector, three terms).
/// Returns the scheme and the model it splits.
pub fn named_scheme(name: &str, g: f64, order: TrotterOrder) -> Result<(TrotterScheme, DenseModel)> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::BadCoupling(g));
    }
    let g2 = g * g;
    let gi = 1.0 / g2;
    let s2 = std::f64::consts::SQRT_2;
    let (terms, electric) = match name {
        "global8" => (
            vec![
                pauli_sum(&[
                    (17.0 * g2 / 6.0 + 3.0 * gi, "II"),
                    (-1.5 * g2, "ZI"),
                    (-1.5 * g2, "IZ"),
                    (-0.5 * gi, "XI"),
                    (-0.5 * gi, "IX"),
                ])?,
                pauli_sum(&[(g2 / 6.0, "ZZ"), (-0.25 * gi, "XX"), (-0.25 * gi, "YY")])?,
            ],
            pauli_sum(&[(17.0 * g2 / 6.0, "II"), (-1.5 * g2, "ZI"), (-1.5 * g2, "IZ"), (g2 / 6.0, "ZZ")])?,
        ),
        "color3" => (
            vec![pauli_sum(&[
                (4.0 / 3.0 * g2 + 11.0 / 4.0 * gi, "I"),
                (-4.0 / 3.0 * g2 + 0.25 * gi, "Z"),
                (-gi / s2, "X"),
            ])?],
            pauli_sum(&[(4.0 / 3.0 * g2, "I"), (-4.0 / 3.0 * g2, "Z")])?,
        ),
        "color6" => (
            vec![
                pauli_sum(&[
                    (23.0 * g2 / 6.0 + 23.0 * gi / 8.0, "II"),
                    (-(2.5 * g2 + gi / 8.0), "ZI"),
                    (-(0.5 * g2 - gi / 8.0), "IZ"),
                    (-gi / (2.0 * s2), "XI"),
                    (-gi / s2, "IX"),
                ])?,
                pauli_sum(&[(gi / (2.0 * s2), "XZ")])?,
                pauli_sum(&[(-0.25 * gi, "XX"), (-0.25 * gi, "YY"), (-(5.0 * g2 / 6.0 - gi / 8.0), "ZZ")])?,
            ],
            pauli_sum(&[(23.0 * g2 / 6.0, "II"), (-2.5 * g2, "ZI"), (-0.5 * g2, "IZ"), (-5.0 * g2 / 6.0, "ZZ")])?,
        ),
        "twoplaq3" => (
            vec![
                pauli_sum(&[
                    (7.0 / 3.0 * g2 + 23.0 * gi / 8.0, "II"),
                    (-(gi / 8.0 + g2), "ZI"),
                    (gi / 8.0 - g2, "IZ"),
                    (-gi / (6.0 * s2), "XI"),
                    (-2.0 * gi / 3.0, "IX"),
                ])?,
                pauli_sum(&[(gi / 8.0 - g2 / 3.0, "ZZ"), (-gi / (18.0 * s2), "XX"), (-gi / (18.0 * s2), "YY")])?,
                pauli_sum(&[(gi / (6.0 * s2), "XZ"), (-gi / 3.0, "ZX")])?,
            ],
            pauli_sum(&[(7.0 / 3.0 * g2, "II"), (-g2, "ZI"), (-g2, "IZ"), (-g2 / 3.0, "ZZ")])?,
        ),
        other => return Err(Error::Config(format!("unknown Trotter scheme `{other}`"))),
    };
    let scheme = TrotterScheme { name: name.to_string(), terms, order };
    let model = DenseModel { hamiltonian: scheme.sum(), electric };
    Ok((scheme, model))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Extrema {
    /// `(t, value)` of the first interior local minimum, if any.
    pub min: Option<(f64, f64)>,
    pub max: Option<(f64, f64)>,
}

/// First interior minimum and maximum of the electric-energy trace on a
/// uniform grid, refined by a three-point parabola.
pub fn find_first_extrema(traj: &Trajectory) -> Extrema {
    let t = &traj.times;
    let y = &traj.electric_energy;
    if y.len() < 3 {
        return Extrema::default();
    }
    let h = t[1] - t[0];
    let refine = |i: usize| {
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        let d = a - 2.0 * b + c;
        let off = if d != 0.0 { 0.5 * (a - c) / d } else { 0.0 };
        (t[i] + off * h, b - 0.25 * (a - c) * off)
    };
    let mut out = Extrema::default();
    for i in 1..y.len() - 1 {
        if out.max.is_none() && y[i] > y[i - 1] && y[i] >= y[i + 1] {
            out.max = Some(refine(i));
        }
        if out.min.is_none() && y[i] < y[i - 1] && y[i] <= y[i + 1] {
            out.min = Some(refine(i));
        }
        if out.min.is_some() && out.max.is_some() {
            break;
        }
    }
    out
}

/// One row of the electric-energy extremum benchmark.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub truncation: String,
    pub trotter_steps: Option<usize>,
    pub order: Option<u32>,
    pub extrema: Extrema,
}

/// Time step of the extremum scan.
pub const SCAN_DT: f64 = 0.005;
/// Length of the extremum scan window.
pub const SCAN_T_MAX: f64 = 6.0;
/// Irrep cutoff standing in for the untruncated one-plaquette basis.
pub const FULL_BASIS_LAMBDA: u32 = 6;

/// First extrema of `<H_E>` from the trivial vacuum of one plaquette, for
/// the exact and Trotterized truncations of the benchmark table.
pub fn electric_extrema_benchmarks(g: f64) -> Result<Vec<BenchmarkRow>> {
    let times = time_grid(SCAN_T_MAX, SCAN_DT)?;
    let vac = |d: usize| StateVector::basis_state(d, 0);
    let exact_row = |label: &str, model: &DenseModel| BenchmarkRow {
        truncation: label.to_string(),
        trotter_steps: None,
        order: None,
        extrema: find_first_extrema(&exact_evolve(model, &vac(model.dim()), &times)),
    };
    let mut rows = Vec::new();
    let full = one_plaquette_pq_hamiltonian(&Truncation::lambda(FULL_BASIS_LAMBDA), g)?;
    rows.push(exact_row(&format!("pq<={FULL_BASIS_LAMBDA}"), &DenseModel::from_operator(&full)));
    for (name, label) in [("color3", "color-parity 3"), ("global8", "pq<=1"), ("color6", "color-parity 6")] {
        let (_, model) = named_scheme(name, g, TrotterOrder::First)?;
        rows.push(exact_row(label, &model));
    }
    let trotter_cases = [
        ("global8", "pq<=1", 1, TrotterOrder::Second),
        ("global8", "pq<=1", 2, TrotterOrder::Second),
        ("global8", "pq<=1", 3, TrotterOrder::Second),
        ("global8", "pq<=1", 4, TrotterOrder::Second),
        ("color6", "color-parity 6", 1, TrotterOrder::First),
        ("color6", "color-parity 6", 2, TrotterOrder::First),
        ("color6", "color-parity 6", 1, TrotterOrder::Second),
    ];
    for (name, label, steps, order) in trotter_cases {
        let (scheme, model) = named_scheme(name, g, order)?;
        let traj = trotter_evolve(&scheme, &model.electric, &vac(model.dim()), &times, steps)?;
        rows.push(BenchmarkRow {
            truncation: label.to_string(),
            trotter_steps: Some(steps),
            order: Some(order.as_int()),
            extrema: find_first_extrema(&traj),
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Observable {
    /// Lowest excitation over the full one-plaquette spectrum.
    MassGap,
    /// Lowest excitation within the color-parity-even sector.
    MassGapColorEven,
    /// Ground-state `<□ + □†>`.
    PlaquetteVev,
    /// `<H_E>` at time `t` from the trivial vacuum.
    ElectricEnergyAt(f64),
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::MassGap => "mass_gap".into(),
            Observable::MassGapColorEven => "mass_gap_c_even".into(),
            Observable::PlaquetteVev => "plaquette_vev".into(),
            Observable::ElectricEnergyAt(t) => format!("electric_energy_t{t}"),
        }
    }
}

/// Value of `obs` for one plaquette at coupling `g` and cutoff `Λp = Λq = lambda`.
pub fn one_plaquette_observable(obs: Observable, g: f64, lambda: u32) -> Result<f64> {
    let h = one_plaquette_pq_hamiltonian(&Truncation::lambda(lambda), g)?;
    Ok(match obs {
        Observable::MassGap => {
            let (vals, _) = sorted_eigh(&h.dense());
            vals.get(1).ok_or(Error::EmptyBasis)? - vals[0]
        }
        Observable::MassGapColorEven => {
            let (vals, _) = sorted_eigh(&color_parity_reduce(&h)?.dense());
            vals.get(1).ok_or(Error::EmptyBasis)? - vals[0]
        }
        Observable::PlaquetteVev => {
            let (_, vecs) = sorted_eigh(&h.dense());
            let v = vecs.column(0);
            (v.transpose() * h.plaquette_sum_dense() * v)[(0, 0)]
        }
        Observable::ElectricEnergyAt(t) => {
            let model = DenseModel::from_operator(&h);
            let traj = exact_evolve(&model, &StateVector::basis_state(h.dim(), 0), &[t]);
            traj.electric_energy[0]
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub g: f64,
    pub lambda: u32,
    pub observable: String,
    pub value: f64,
    /// `|value - reference| / |reference|`, reference at the largest cutoff.
    pub relative_deviation: f64,
}

impl ConvergenceRow {
    pub fn deviation_percent(&self) -> f64 {
        100.0 * self.relative_deviation
    }
}

/// Observable per `(g, Λ)` relative to the largest `Λ` in `lambdas`.
pub fn convergence_sweep(obs: Observable, gs: &[f64], lambdas: &[u32]) -> Result<Vec<ConvergenceRow>> {
    let &lref = lambdas.iter().max().ok_or(Error::EmptyBasis)?;
    let cells: Vec<(f64, u32)> = gs.iter().flat_map(|&g| lambdas.iter().map(move |&l| (g, l))).collect();
    let values: Vec<f64> =
        cells.par_iter().map(|&(g, l)| one_plaquette_observable(obs, g, l)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(cells.len());
    for (k, &(g, l)) in cells.iter().enumerate() {
        let ref_idx = cells.iter().position(|&(g2, l2)| g2 == g && l2 == lref).expect("reference cell");
        let reference = values[ref_idx];
        rows.push(ConvergenceRow {
            g,
            lambda: l,
            observable: obs.name(),
            value: values[k],
            relative_deviation: (values[k] - reference).abs() / reference.abs(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Straight-line fit of `ln(deviation)` against `Λ²` using only rows with
/// `lo < deviation < hi` (the asymptotic window above round-off).
pub fn fit_log_deviation(rows: &[ConvergenceRow], lo: f64, hi: f64) -> Result<DecayFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.relative_deviation > lo && r.relative_deviation < hi)
        .map(|r| ((r.lambda as f64).powi(2), r.relative_deviation.ln()))
        .unzip();
    if x.len() < 3 {
        return Err(Error::FitWindow(format!("{} points inside ({lo:e}, {hi:e})", x.len())));
    }
    let (slope, intercept, r_squared) = crate::linalg::linear_fit(&x, &y);
    Ok(DecayFit { slope, intercept, r_squared, points: x.len() })
}

/// Ground-state amplitudes keyed by the irrep carried around the plaquette,
/// with the phase fixed so the largest component is positive.
pub fn ground_state_amplitudes(h: &OperatorMatrix) -> Vec<(Irrep, f64)> {
    let (_, vecs) = sorted_eigh(&h.dense());
    let v = vecs.column(0);
    let k = v.iamax();
    let sign = v[k].signum();
    h.basis.iter().zip(v.iter()).map(|(s, a)| (s.components[0].0 .0[0], sign * a)).collect()
}
