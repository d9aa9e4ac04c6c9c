//! Kogut-Susskind Hamiltonian in the irrep basis.
//!
//! `H = (g²/2) Σ_links C₂(R) + 1/(2g²) Σ_□ (c − □ − □†)`.
//!
//! Operators are stored split by coupling dependence: the electric diagonal
//! as exact rationals (coefficient of `g²/2`), the magnetic part `−(□ + □†)`
//! as sparse real triplets and the identity constant `c` (both coefficients
//! of `1/(2g²)`). [`OperatorMatrix::dense`] evaluates the sum at the stored
//! coupling.

use std::collections::{BTreeMap, HashMap};

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge_basis::{GlobalState, LatticeGeometry, LinkConfig};
use crate::linalg::RMat;
use crate::su3_clebsch::nine_r6;
use crate::su3_irreps::{is_fundamental_step, Direction, Irrep, Truncation};

/// Identity constant accompanying the plaquette term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MagneticConstant {
    /// `c` per plaquette, so the total is `c · N_plaquettes`.
    PerPlaquette(f64),
    /// A fixed total constant.
    Total(f64),
    None,
}

impl Default for MagneticConstant {
    fn default() -> Self {
        MagneticConstant::PerPlaquette(6.0)
    }
}

impl MagneticConstant {
    pub fn total(self, plaquettes: usize) -> f64 {
        match self {
            MagneticConstant::PerPlaquette(c) => c * plaquettes as f64,
            MagneticConstant::Total(c) => c,
            MagneticConstant::None => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct HamiltonianOptions {
    pub constant: MagneticConstant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub labels: Vec<String>,
    pub basis: Vec<GlobalState>,
    /// Diagonal, coefficient of `g²/2`.
    pub electric: Vec<Rational64>,
    /// `−(□ + □†)` as `(row, col, value)`, coefficient of `1/(2g²)`.
    pub magnetic: Vec<(usize, usize, f64)>,
    /// Identity term, coefficient of `1/(2g²)`.
    pub constant: f64,
    pub g: f64,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.electric.len()
    }

    pub fn with_coupling(&self, g: f64) -> Self {
        OperatorMatrix { g, ..self.clone() }
    }

    pub fn electric_dense(&self) -> RMat {
        let d: Vec<f64> = self.electric.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        RMat::from_diagonal(&nalgebra::DVector::from_vec(d))
    }

    pub fn magnetic_dense(&self) -> RMat {
        let n = self.dim();
        let mut m = RMat::zeros(n, n);
        for &(i, j, v) in &self.magnetic {
            m[(i, j)] += v;
        }
        m
    }

    /// `Σ (□ + □†)` in this basis.
    pub fn plaquette_sum_dense(&self) -> RMat {
        -self.magnetic_dense()
    }

    /// Full Hamiltonian at the stored coupling.
    pub fn dense(&self) -> RMat {
        self.dense_at(self.g)
    }

    pub fn dense_at(&self, g: f64) -> RMat {
        let n = self.dim();
        let g2 = g * g;
        self.electric_dense() * (g2 / 2.0) + (self.magnetic_dense() + RMat::identity(n, n) * self.constant) / (2.0 * g2)
    }

    /// Exact rational renderings of the electric diagonal.
    pub fn electric_strings(&self) -> Vec<String> {
        self.electric.iter().map(|r| r.to_string()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": 1,
            "labels": self.labels,
            "g": self.g,
            "electric_coefficient_of_g2_over_2": self.electric_strings(),
            "magnetic_coefficient_of_inv_2g2": self.magnetic.iter().map(|(i, j, v)| serde_json::json!([i, j, v])).collect::<Vec<_>>(),
            "constant_coefficient_of_inv_2g2": self.constant,
        })
    }

    /// Human-readable rendering of the two coefficient matrices.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("basis ({} states)\n", self.dim()));
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  [{i}] {l}\n"));
        }
        out.push_str("electric, coefficient of g^2/2:\n  ");
        out.push_str(&self.electric_strings().join(" "));
        out.push_str(&format!("\nmagnetic, coefficient of 1/(2g^2), constant {}:\n", self.constant));
        let m = self.magnetic_dense();
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:>10.6}", m[(i, j)])).collect();
            out.push_str(&format!("  {}\n", row.join(" ")));
        }
        out
    }
}

fn sqrt_dim(r: Irrep) -> f64 {
    (r.dimension() as f64).sqrt()
}

/// `<active_out| □ |active_in>` for one plaquette with the given controls.
/// Active links are ordered `(R_b, Q_r, R_t, Q_l)`, controls `(C_1..C_4)`.
pub fn plaquette_active_me(controls: [Irrep; 4], active_in: [Irrep; 4], active_out: [Irrep; 4]) -> f64 {
    let [c1, c2, c3, c4] = controls;
    let [rb, qr, rt, ql] = active_in;
    let [rb2, qr2, rt2, ql2] = active_out;
    let steps = is_fundamental_step(rb, rb2, Direction::Fund)
        && is_fundamental_step(qr, qr2, Direction::Fund)
        && is_fundamental_step(rt, rt2, Direction::AntiFund)
        && is_fundamental_step(ql, ql2, Direction::AntiFund);
    if !steps {
        return 0.0;
    }
    let (t3, t3b) = (Irrep::TRIPLET, Irrep::ANTI_TRIPLET);
    let pre = sqrt_dim(rt) * sqrt_dim(rb)
        / (sqrt_dim(rt2) * sqrt_dim(rb2) * sqrt_dim(ql) * sqrt_dim(qr) * sqrt_dim(ql2).powi(3) * sqrt_dim(qr2).powi(3));
    let ul = nine_r6(rt.conjugate(), c1, ql.conjugate(), t3, rt2.conjugate(), ql2.conjugate());
    let ur = nine_r6(rt, c3.conjugate(), qr.conjugate(), t3b, rt2, qr2.conjugate());
    let ll = nine_r6(rb.conjugate(), c2, ql, t3b, rb2.conjugate(), ql2);
    let lr = nine_r6(rb, c4.conjugate(), qr, t3, rb2, qr2);
    pre * ul * ur * ll * lr
}

/// `(<out|□|in>, <out|□†|in>)` for plaquette `plaquette` of `geometry`.
/// Links outside the plaquette's active set must agree.
pub fn plaquette_matrix_element(
    geometry: &LatticeGeometry,
    plaquette: usize,
    cfg_out: &LinkConfig,
    cfg_in: &LinkConfig,
) -> (f64, f64) {
    let active = geometry.plaquettes[plaquette].active;
    let spectators_agree =
        (0..geometry.num_links()).filter(|l| !active.contains(l)).all(|l| cfg_out.0[l] == cfg_in.0[l]);
    if !spectators_agree {
        return (0.0, 0.0);
    }
    let controls = geometry.control_irreps(plaquette, cfg_in);
    let a_in = geometry.active_irreps(plaquette, cfg_in);
    let a_out = geometry.active_irreps(plaquette, cfg_out);
    (plaquette_active_me(controls, a_in, a_out), plaquette_active_me(controls, a_out, a_in))
}

/// Configurations reachable from `cfg` by one application of `□` on
/// plaquette `p`, regardless of truncation.
fn box_images(geometry: &LatticeGeometry, p: usize, cfg: &LinkConfig) -> Vec<LinkConfig> {
    let active = geometry.plaquettes[p].active;
    let dirs = [Direction::Fund, Direction::Fund, Direction::AntiFund, Direction::AntiFund];
    let options: Vec<Vec<Irrep>> = active
        .iter()
        .zip(dirs)
        .map(|(&l, d)| crate::su3_irreps::tensor_fundamental(cfg.0[l], d).iter().map(|(r, _)| r).collect())
        .collect();
    let mut out = Vec::new();
    for &a in &options[0] {
        for &b in &options[1] {
            for &c in &options[2] {
                for &d in &options[3] {
                    let mut next = cfg.clone();
                    for (l, r) in active.iter().zip([a, b, c, d]) {
                        next.0[*l] = r;
                    }
                    out.push(next);
                }
            }
        }
    }
    out
}

/// Hamiltonian restricted to the span of `basis`. Every component
/// configuration must be physical; states of one basis vector must share
/// the same electric energy.
pub fn build_hamiltonian(
    basis: &[GlobalState],
    geometry: &LatticeGeometry,
    g: f64,
    options: HamiltonianOptions,
) -> Result<OperatorMatrix> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::BadCoupling(g));
    }
    let mut configs: Vec<LinkConfig> = Vec::new();
    let mut index: HashMap<LinkConfig, usize> = HashMap::new();
    for s in basis {
        for (c, _) in &s.components {
            if !geometry.is_physical(c) {
                return Err(Error::Unsupported(format!("configuration {c} violates Gauss's law")));
            }
            if !index.contains_key(c) {
                index.insert(c.clone(), configs.len());
                configs.push(c.clone());
            }
        }
    }
    // Sparse config-level Σ(□ + □†).
    let mut m: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (j, cfg) in configs.iter().enumerate() {
        for p in 0..geometry.plaquettes.len() {
            for img in box_images(geometry, p, cfg) {
                if let Some(&i) = index.get(&img) {
                    let v = plaquette_matrix_element(geometry, p, &img, cfg).0;
                    if v.abs() > 1e-14 {
                        *m.entry((i, j)).or_insert(0.0) += v;
                        *m.entry((j, i)).or_insert(0.0) += v;
                    }
                }
            }
        }
    }
    let mut electric = Vec::with_capacity(basis.len());
    for s in basis {
        let e = s.components[0].0.casimir_sum();
        if s.components.iter().any(|(c, _)| c.casimir_sum() != e) {
            return Err(Error::Unsupported(format!("state {} mixes electric energies", s.label())));
        }
        electric.push(e);
    }
    // Project: B_kl = Σ a_ki m_ij a_lj.
    let coeff: Vec<Vec<(usize, f64)>> =
        basis.iter().map(|s| s.components.iter().map(|(c, a)| (index[c], *a)).collect()).collect();
    let mut owner: Vec<Vec<(usize, f64)>> = vec![Vec::new(); configs.len()];
    for (k, comps) in coeff.iter().enumerate() {
        for &(i, a) in comps {
            owner[i].push((k, a));
        }
    }
    let mut proj: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(i, j), &v) in &m {
        for &(k, a) in &owner[i] {
            for &(l, b) in &owner[j] {
                *proj.entry((k, l)).or_insert(0.0) -= a * v * b;
            }
        }
    }
    let magnetic = proj.into_iter().filter(|(_, v)| v.abs() > 1e-13).map(|((k, l), v)| (k, l, v)).collect();
    Ok(OperatorMatrix {
        labels: basis.iter().map(GlobalState::label).collect(),
        basis: basis.to_vec(),
        electric,
        magnetic,
        constant: options.constant.total(geometry.plaquettes.len()),
        g,
    })
}

/// Rotates `h` into combinations `(s ± C s)/√2` that diagonalise global
/// color parity and keeps the `C = +1` states.
pub fn color_parity_reduce(h: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = h.dim();
    let mut new_states: Vec<(GlobalState, Vec<(usize, f64)>)> = Vec::new();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let s = &h.basis[i];
        let cs = s.conjugate();
        let self_overlap = s.overlap(&cs);
        if (self_overlap - 1.0).abs() < 1e-9 {
            new_states.push((s.clone(), vec![(i, 1.0)]));
            continue;
        }
        if (self_overlap + 1.0).abs() < 1e-9 {
            continue;
        }
        let partner = (i + 1..n).find(|&j| !used[j] && h.basis[j].overlap(&cs).abs() > 1.0 - 1e-9);
        let Some(j) = partner else {
            return Err(Error::Unsupported(format!("basis not closed under color parity at {}", s.label())));
        };
        used[j] = true;
        let sign = h.basis[j].overlap(&cs).signum();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut state = GlobalState::from_terms(
            s.components.iter().cloned().chain(cs.components.iter().map(|(c, a)| (c.clone(), *a))),
        );
        state.quantum_numbers = s.quantum_numbers;
        state.quantum_numbers.color_parity = Some(1);
        new_states.push((state, vec![(i, r), (j, r * sign)]));
    }
    let old_mag = h.magnetic_dense();
    let old_mag = &old_mag;
    let k = new_states.len();
    let mut magnetic = Vec::new();
    for (a, (_, wa)) in new_states.iter().enumerate() {
        for (b, (_, wb)) in new_states.iter().enumerate() {
            let v: f64 = wa.iter().flat_map(|&(i, x)| wb.iter().map(move |&(j, y)| x * y * old_mag[(i, j)])).sum();
            if v.abs() > 1e-13 {
                magnetic.push((a, b, v));
            }
        }
    }
    let electric = new_states.iter().map(|(_, w)| h.electric[w[0].0]).collect();
    let basis: Vec<GlobalState> = new_states.into_iter().map(|(s, _)| s).collect();
    debug_assert_eq!(basis.len(), k);
    Ok(OperatorMatrix {
        labels: basis.iter().map(GlobalState::label).collect(),
        basis,
        electric,
        magnetic,
        constant: h.constant,
        g: h.g,
    })
}

/// One-plaquette Hamiltonian on every irrep admitted by `trunc`, labelled
/// by `(p, q)`. `□` connects `R` and each admitted irrep in `R ⊗ 3` with
/// unit amplitude.
pub fn one_plaquette_pq_hamiltonian(trunc: &Truncation, g: f64) -> Result<OperatorMatrix> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::BadCoupling(g));
    }
    let irreps = trunc.irreps();
    if irreps.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let pos: HashMap<Irrep, usize> = irreps.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut magnetic = Vec::new();
    for (j, r) in irreps.iter().enumerate() {
        for (r2, _) in crate::su3_irreps::tensor_fundamental(*r, Direction::Fund).iter() {
            if let Some(&i) = pos.get(&r2) {
                magnetic.push((i, j, -1.0));
                magnetic.push((j, i, -1.0));
            }
        }
    }
    magnetic.sort_by_key(|&(i, j, _)| (i, j));
    let basis: Vec<GlobalState> =
        irreps.iter().map(|r| GlobalState::single(crate::gauge_basis::one_plaquette_config(*r))).collect();
    Ok(OperatorMatrix {
        labels: irreps.iter().map(|r| r.to_string()).collect(),
        basis,
        electric: irreps.iter().map(|r| r.casimir() * 4).collect(),
        magnetic,
        constant: 6.0,
        g,
    })
}
