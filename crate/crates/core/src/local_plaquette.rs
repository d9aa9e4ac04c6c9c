//! Local (qudit-per-link) plaquette operators.
//!
//! Each link holds a qudit whose levels are the admitted irreps, ordered by
//! Casimir with `(p, q)` before its conjugate, so `{1, 3, 3bar}` is encoded
//! as levels `0, 1, 2`. In a control sector (the four irreps neighbouring a
//! plaquette) the plaquette term only mixes a handful of active-link
//! configurations. Each physical transition is lifted to a tensor string
//! of two-level operators `𝒳_jk = |j><k| + |k><j|`, one per active link,
//! which fixes a gauge-variant completion of the operator on unphysical
//! states.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{TrotterOrder, Trajectory};
use crate::gauge_basis::{enumerate_physical, LatticeGeometry, LinkConfig, Plaquette};
use crate::hamiltonian::plaquette_active_me;
use crate::linalg::{expm_hermitian, CMat, CVec};
use crate::su3_irreps::{singlet_multiplicity, Irrep, Truncation};

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Qudit levels for a truncation: irreps by Casimir, `(p, q)` before `(q, p)`.
pub fn mode_order(trunc: &Truncation) -> Vec<Irrep> {
    let mut m = trunc.irreps();
    m.sort_by_key(|r| (r.casimir_times_3(), r.q, r.p));
    m
}

fn level_of(modes: &[Irrep], r: Irrep) -> Result<usize> {
    modes.iter().position(|&m| m == r).ok_or_else(|| Error::Unsupported(format!("irrep {r} not in the local basis")))
}

/// Control irreps `(C_1, C_2, C_3, C_4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ControlSector(pub [Irrep; 4]);

impl ControlSector {
    pub fn label(&self) -> String {
        let l: Vec<String> = self.0.iter().map(|r| r.label()).collect();
        format!("{{{}}}", l.join(","))
    }

    pub fn conjugate(&self) -> Self {
        ControlSector(self.0.map(Irrep::conjugate))
    }

    /// `(C_1, C_2, C_3, C_4) -> (C̄_3, C̄_4, C̄_1, C̄_2)`.
    pub fn horizontal_parity(&self) -> Self {
        let [c1, c2, c3, c4] = self.0;
        ControlSector([c3.conjugate(), c4.conjugate(), c1.conjugate(), c2.conjugate()])
    }

    /// `(C_1, C_2, C_3, C_4) -> (C_2, C_1, C_4, C_3)`.
    pub fn vertical_parity(&self) -> Self {
        let [c1, c2, c3, c4] = self.0;
        ControlSector([c2, c1, c4, c3])
    }
}

/// Does `a ⊗ b ⊗ c` contain a singlet?
fn vertex_ok(a: Irrep, b: Irrep, c: Irrep) -> bool {
    singlet_multiplicity(&[a, b, c]) > 0
}

/// Active configurations `(R_b, Q_r, R_t, Q_l)` satisfying Gauss's law at
/// the four corners of a plaquette with the given controls.
pub fn active_states(sector: &ControlSector, trunc: &Truncation) -> Vec<[Irrep; 4]> {
    let [c1, c2, c3, c4] = sector.0;
    let modes = mode_order(trunc);
    let mut out = Vec::new();
    for &rb in &modes {
        for &qr in &modes {
            for &rt in &modes {
                for &ql in &modes {
                    let ok = vertex_ok(c1.conjugate(), rt, ql.conjugate())
                        && vertex_ok(rt.conjugate(), c3, qr.conjugate())
                        && vertex_ok(c2.conjugate(), rb, ql)
                        && vertex_ok(rb.conjugate(), c4, qr);
                    if ok {
                        out.push([rb, qr, rt, ql]);
                    }
                }
            }
        }
    }
    out
}

/// Control sectors admitting at least one physical active configuration,
/// ordered lexicographically by level.
pub fn enumerate_control_sectors(trunc: &Truncation) -> Vec<ControlSector> {
    let modes = mode_order(trunc);
    let mut out = Vec::new();
    for &a in &modes {
        for &b in &modes {
            for &c in &modes {
                for &d in &modes {
                    let s = ControlSector([a, b, c, d]);
                    if !active_states(&s, trunc).is_empty() {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SectorTransform {
    Horizontal,
    Vertical,
    Conjugation,
}

impl SectorTransform {
    pub fn apply(self, s: &ControlSector) -> ControlSector {
        match self {
            SectorTransform::Horizontal => s.horizontal_parity(),
            SectorTransform::Vertical => s.vertical_parity(),
            SectorTransform::Conjugation => s.conjugate(),
        }
    }
}

/// Orbit representative of a sector under parity and conjugation, plus a
/// transform sequence mapping the representative onto the sector.
pub fn sector_class(sector: &ControlSector, trunc: &Truncation) -> (ControlSector, Vec<SectorTransform>) {
    let modes = mode_order(trunc);
    let key = |s: &ControlSector| s.0.map(|r| modes.iter().position(|&m| m == r).unwrap_or(usize::MAX));
    let mut best: Option<(ControlSector, Vec<SectorTransform>)> = None;
    for mask in 0..8u8 {
        let mut seq = Vec::new();
        let mut s = *sector;
        for (bit, t) in [SectorTransform::Horizontal, SectorTransform::Vertical, SectorTransform::Conjugation].into_iter().enumerate() {
            if mask & (1 << bit) != 0 {
                s = t.apply(&s);
                seq.push(t);
            }
        }
        // all three transforms are involutions and commute, so the same
        // sequence maps the representative back onto `sector`
        if best.as_ref().map_or(true, |(b, _)| key(&s) < key(b)) {
            best = Some((s, seq));
        }
    }
    best.expect("nonempty group")
}

/// Unordered pair of qudit levels `j < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModePair(pub usize, pub usize);

impl ModePair {
    pub fn new(a: usize, b: usize) -> Self {
        ModePair(a.min(b), a.max(b))
    }

    pub fn contains(&self, m: usize) -> bool {
        self.0 == m || self.1 == m
    }

    pub fn label(&self) -> String {
        format!("X{}{}", self.0, self.1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorTerm {
    pub coefficient: f64,
    /// One pair per active link `(R_b, Q_r, R_t, Q_l)`.
    pub pairs: [ModePair; 4],
}

/// Hermitian `Σ c · 𝒳 ⊗ 𝒳 ⊗ 𝒳 ⊗ 𝒳` reproducing `□ + □†` on the physical
/// active states of one control sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorGenerator {
    pub sector: ControlSector,
    pub modes: Vec<Irrep>,
    pub terms: Vec<GeneratorTerm>,
}

pub fn build_sector_generator(sector: &ControlSector, trunc: &Truncation) -> Result<SectorGenerator> {
    let modes = mode_order(trunc);
    let states = active_states(sector, trunc);
    if states.is_empty() {
        return Err(Error::Unsupported(format!("control sector {} has no physical states", sector.label())));
    }
    let mut by_string: BTreeMap<[ModePair; 4], f64> = BTreeMap::new();
    let mut order = Vec::new();
    for s_in in &states {
        for s_out in &states {
            let v = plaquette_active_me(sector.0, *s_in, *s_out);
            if v.abs() < 1e-12 {
                continue;
            }
            let mut pairs = [ModePair(0, 0); 4];
            for l in 0..4 {
                pairs[l] = ModePair::new(level_of(&modes, s_in[l])?, level_of(&modes, s_out[l])?);
            }
            if let Some(prev) = by_string.insert(pairs, v) {
                return Err(Error::Unsupported(format!(
                    "two transitions share the mode string {pairs:?} ({prev} and {v}) in sector {}",
                    sector.label()
                )));
            }
            order.push(pairs);
        }
    }
    let terms = order.into_iter().map(|pairs| GeneratorTerm { coefficient: by_string[&pairs], pairs }).collect();
    Ok(SectorGenerator { sector: *sector, modes, terms })
}

/// `𝒳_jk` on a `d`-level qudit.
pub fn script_x(d: usize, p: ModePair) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(p.0, p.1)] = cx(1.0);
    m[(p.1, p.0)] = cx(1.0);
    m
}

impl SectorGenerator {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// Dense operator on the four active qudits.
    pub fn matrix(&self) -> CMat {
        let d = self.dim();
        let n = d.pow(4);
        self.terms.iter().fold(CMat::zeros(n, n), |acc, t| {
            let s = t.pairs.iter().fold(CMat::identity(1, 1), |m, p| m.kronecker(&script_x(d, *p)));
            acc + s * cx(t.coefficient)
        })
    }

    /// Applies a parity or conjugation transform to the sector and to every
    /// term's mode string.
    pub fn transformed(&self, t: SectorTransform) -> Result<SectorGenerator> {
        let conj = |p: ModePair| -> Result<ModePair> {
            let c = |m: usize| level_of(&self.modes, self.modes[m].conjugate());
            Ok(ModePair::new(c(p.0)?, c(p.1)?))
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let [b, r, tp, l] = term.pairs;
            let pairs = match t {
                SectorTransform::Horizontal => [conj(b)?, l, conj(tp)?, r],
                SectorTransform::Vertical => [tp, conj(r)?, b, conj(l)?],
                SectorTransform::Conjugation => [conj(b)?, conj(r)?, conj(tp)?, conj(l)?],
            };
            terms.push(GeneratorTerm { coefficient: term.coefficient, pairs });
        }
        Ok(SectorGenerator { sector: t.apply(&self.sector), modes: self.modes.clone(), terms })
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{:+.6} {}", t.coefficient, t.pairs.iter().map(ModePair::label).collect::<Vec<_>>().join("")))
            .collect();
        format!("{}: {}", self.sector.label(), parts.join(" "))
    }
}

/// `exp(-i θ S)` for a tensor string `S` of `𝒳` operators. `S` has
/// spectrum `{-1, 0, 1}`, so `S³ = S` and the exponential is quadratic in `S`.
pub fn string_rotation(d: usize, pairs: &[ModePair], theta: f64) -> CMat {
    let s = pairs.iter().fold(CMat::identity(1, 1), |m, p| m.kronecker(&script_x(d, *p)));
    let n = s.nrows();
    let s2 = &s * &s;
    CMat::identity(n, n) + s2 * cx(theta.cos() - 1.0) - s * Complex64::new(0.0, theta.sin())
}

/// Qudit permutation `X_jk` (swap of levels `j`, `k`).
pub fn qudit_x(d: usize, p: ModePair) -> CMat {
    let mut m = CMat::identity(d, d);
    m[(p.0, p.0)] = cx(0.0);
    m[(p.1, p.1)] = cx(0.0);
    m[(p.0, p.1)] = cx(1.0);
    m[(p.1, p.0)] = cx(1.0);
    m
}

/// Qudit `Y_jk`: `-i|j><k| + i|k><j|` on the pair, identity elsewhere.
pub fn qudit_y(d: usize, p: ModePair) -> CMat {
    let mut m = CMat::identity(d, d);
    m[(p.0, p.0)] = cx(0.0);
    m[(p.1, p.1)] = cx(0.0);
    m[(p.0, p.1)] = Complex64::new(0.0, -1.0);
    m[(p.1, p.0)] = Complex64::new(0.0, 1.0);
    m
}

/// Givens rotation `exp(-i t (e^{iφ}|j><k| + e^{-iφ}|k><j|))`.
pub fn givens(d: usize, j: usize, k: usize, phi: f64, t: f64) -> CMat {
    let mut h = CMat::zeros(d, d);
    h[(j, k)] = Complex64::from_polar(1.0, phi);
    h[(k, j)] = Complex64::from_polar(1.0, -phi);
    expm_hermitian(&h, t)
}

/// A register of qudits with a dense amplitude vector, site 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditRegister {
    pub dims: Vec<usize>,
    pub amplitudes: CVec,
}

impl QuditRegister {
    pub fn basis(dims: Vec<usize>, levels: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        let mut amplitudes = CVec::zeros(n);
        let idx = levels.iter().zip(&dims).fold(0, |acc, (l, d)| acc * d + l);
        amplitudes[idx] = cx(1.0);
        QuditRegister { dims, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    pub fn levels_of(&self, index: usize) -> Vec<usize> {
        let strides = self.strides();
        strides.iter().zip(&self.dims).map(|(s, d)| (index / s) % d).collect()
    }

    /// Applies `m` to `sites` (first listed most significant) on the
    /// subspace where every `(site, level)` control holds.
    pub fn apply(&mut self, sites: &[usize], m: &CMat, controls: &[(usize, usize)]) {
        let strides = self.strides();
        let sub_dims: Vec<usize> = sites.iter().map(|&s| self.dims[s]).collect();
        let sub_n: usize = sub_dims.iter().product();
        debug_assert_eq!(m.nrows(), sub_n);
        let offsets: Vec<usize> = (0..sub_n)
            .map(|mut k| {
                let mut off = 0;
                for (i, &s) in sites.iter().enumerate().rev() {
                    off += (k % sub_dims[i]) * strides[s];
                    k /= sub_dims[i];
                }
                off
            })
            .collect();
        let total = self.amplitudes.len();
        let mut buf = vec![cx(0.0); sub_n];
        for base in 0..total {
            if sites.iter().any(|&s| (base / strides[s]) % self.dims[s] != 0) {
                continue;
            }
            if controls.iter().any(|&(s, l)| (base / strides[s]) % self.dims[s] != l) {
                continue;
            }
            for (k, off) in offsets.iter().enumerate() {
                buf[k] = self.amplitudes[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = cx(0.0);
                for (c, b) in buf.iter().enumerate() {
                    let e = m[(r, c)];
                    if e != cx(0.0) {
                        acc += e * b;
                    }
                }
                self.amplitudes[base + off] = acc;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuditGate {
    Givens { site: usize, modes: ModePair, phi: f64, angle: f64, controls: Vec<(usize, usize)> },
    X { site: usize, modes: ModePair, controls: Vec<(usize, usize)> },
    Y { site: usize, modes: ModePair, controls: Vec<(usize, usize)> },
}

impl QuditGate {
    fn site(&self) -> usize {
        match self {
            QuditGate::Givens { site, .. } | QuditGate::X { site, .. } | QuditGate::Y { site, .. } => *site,
        }
    }

    fn controls(&self) -> &[(usize, usize)] {
        match self {
            QuditGate::Givens { controls, .. } | QuditGate::X { controls, .. } | QuditGate::Y { controls, .. } => controls,
        }
    }

    fn controls_mut(&mut self) -> &mut Vec<(usize, usize)> {
        match self {
            QuditGate::Givens { controls, .. } | QuditGate::X { controls, .. } | QuditGate::Y { controls, .. } => controls,
        }
    }

    fn matrix(&self, d: usize) -> CMat {
        match self {
            QuditGate::Givens { modes, phi, angle, .. } => givens(d, modes.0, modes.1, *phi, *angle),
            QuditGate::X { modes, .. } => qudit_x(d, *modes),
            QuditGate::Y { modes, .. } => qudit_y(d, *modes),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct QuditCircuit {
    pub dims: Vec<usize>,
    pub gates: Vec<QuditGate>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub rotations: usize,
    pub controlled_paulis: usize,
    pub paulis: usize,
}

impl QuditCircuit {
    pub fn new(dims: Vec<usize>) -> Self {
        QuditCircuit { dims, gates: Vec::new() }
    }

    pub fn apply(&self, reg: &mut QuditRegister) {
        for g in &self.gates {
            let s = g.site();
            reg.apply(&[s], &g.matrix(self.dims[s]), g.controls());
        }
    }

    pub fn unitary(&self) -> CMat {
        let n: usize = self.dims.iter().product();
        let mut u = CMat::zeros(n, n);
        for col in 0..n {
            let mut reg = QuditRegister { dims: self.dims.clone(), amplitudes: CVec::zeros(n) };
            reg.amplitudes[col] = cx(1.0);
            self.apply(&mut reg);
            u.set_column(col, &reg.amplitudes);
        }
        u
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                QuditGate::Givens { .. } => c.rotations += 1,
                _ if !g.controls().is_empty() => c.controlled_paulis += 1,
                _ => c.paulis += 1,
            }
        }
        c
    }

    /// Adds `controls` to every gate.
    pub fn controlled_by(mut self, controls: &[(usize, usize)]) -> Self {
        for g in &mut self.gates {
            g.controls_mut().extend_from_slice(controls);
        }
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "schema": 1, "dims": self.dims, "gates": self.gates })
    }
}

/// `exp(-i α 𝒳_jk ⊗ ... ⊗ 𝒳_jk)` on `sites` (all of dimension `d`) via a
/// ladder of `k`-controlled `X_jk`, two Givens half-rotations on the last
/// site, and `Y_jk` corrections fired when any earlier site holds a level
/// outside `{j, k}`.
pub fn chain_circuit(dims: Vec<usize>, sites: &[usize], pair: ModePair, alpha: f64) -> Result<QuditCircuit> {
    let n = sites.len();
    if n == 0 {
        return Err(Error::Config("empty site list".into()));
    }
    let d = dims[sites[0]];
    if sites.iter().any(|&s| dims[s] != d) {
        return Err(Error::Unsupported("chain circuit needs equal qudit dimensions".into()));
    }
    let (j, k) = (pair.0, pair.1);
    let mut ladder = Vec::new();
    for w in sites.windows(2) {
        ladder.push(QuditGate::X { site: w[0], modes: pair, controls: vec![(w[1], k)] });
    }
    let last = sites[n - 1];
    let spectators: Vec<usize> = (0..d).filter(|&m| m != j && m != k).collect();
    // inclusive-or over earlier sites and spectator levels: one controlled Y
    // per nonempty subset of (site, level) conditions with distinct sites
    let mut or_y = Vec::new();
    let earlier = &sites[..n - 1];
    for &ell in &spectators {
        for mask in 1usize..(1 << earlier.len()) {
            let controls = (0..earlier.len()).filter(|b| mask & (1 << b) != 0).map(|b| (earlier[b], ell)).collect();
            or_y.push(QuditGate::Y { site: last, modes: pair, controls });
        }
    }
    if spectators.len() > 1 && n > 1 {
        return Err(Error::Unsupported("or-controlled correction implemented for qutrits and qubits".into()));
    }
    let half = QuditGate::Givens { site: last, modes: pair, phi: 0.0, angle: alpha / 2.0, controls: Vec::new() };
    let mut c = QuditCircuit::new(dims);
    c.gates.extend(ladder.iter().cloned());
    c.gates.push(half.clone());
    c.gates.extend(or_y.iter().cloned());
    c.gates.push(half);
    c.gates.extend(or_y);
    c.gates.extend(ladder.into_iter().rev());
    Ok(c)
}

/// Two-qutrit `exp(-i α 𝒳_jk ⊗ 𝒳_jk)`.
pub fn gxx_circuit(pair: ModePair, alpha: f64) -> QuditCircuit {
    chain_circuit(vec![3, 3], &[0, 1], pair, alpha).expect("qutrit chain")
}

/// Four-qutrit `exp(-i α 𝒳_jk^{⊗4})`.
pub fn gxxxx_circuit(pair: ModePair, alpha: f64) -> QuditCircuit {
    chain_circuit(vec![3; 4], &[0, 1, 2, 3], pair, alpha).expect("qutrit chain")
}

/// Register layout for compiled sector circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Encoding {
    /// One qutrit per link: sites 0-3 active `(R_b, Q_r, R_t, Q_l)`,
    /// sites 4-7 controls `(C_1..C_4)`.
    SingleQudit,
    /// A `(p, q)` pair of two-level registers per link, `p` first, links in
    /// the same order.
    PqPair,
}

/// `(p, q)`-register image of a qutrit mode pair.
fn pq_substitution(p: ModePair) -> Result<[bool; 2]> {
    match (p.0, p.1) {
        (0, 1) => Ok([true, false]),
        (1, 2) => Ok([true, true]),
        (0, 2) => Ok([false, true]),
        _ => Err(Error::Unsupported(format!("mode pair {p:?} outside the qutrit"))),
    }
}

fn qutrit_check(gen: &SectorGenerator) -> Result<()> {
    let want = [Irrep::SINGLET, Irrep::TRIPLET, Irrep::ANTI_TRIPLET];
    if gen.modes != want {
        return Err(Error::Unsupported("circuit lowering is implemented for the {1,3,3bar} truncation".into()));
    }
    Ok(())
}

/// Circuit for one generator term `exp(-i α c 𝒳 ⊗ 𝒳 ⊗ 𝒳 ⊗ 𝒳)`, controlled
/// on the sector.
pub fn compile_term_circuit(gen: &SectorGenerator, term: usize, encoding: Encoding, alpha: f64) -> Result<QuditCircuit> {
    qutrit_check(gen)?;
    let t = gen.terms.get(term).ok_or_else(|| Error::Config(format!("no term {term}")))?;
    let angle = alpha * t.coefficient;
    match encoding {
        Encoding::SingleQudit => {
            let dims = vec![3; 8];
            let reference = t.pairs[3];
            // bring every pair onto the reference pair with one level swap
            let mut swaps = Vec::new();
            for (site, p) in t.pairs.iter().enumerate() {
                if *p != reference {
                    let shared = [p.0, p.1].into_iter().find(|m| reference.contains(*m)).expect("qutrit pairs overlap");
                    let from = if p.0 == shared { p.1 } else { p.0 };
                    let to = if reference.0 == shared { reference.1 } else { reference.0 };
                    swaps.push(QuditGate::X { site, modes: ModePair::new(from, to), controls: Vec::new() });
                }
            }
            let mut c = QuditCircuit::new(dims.clone());
            c.gates.extend(swaps.iter().cloned());
            c.gates.extend(chain_circuit(dims, &[0, 1, 2, 3], reference, angle)?.gates);
            c.gates.extend(swaps);
            let controls: Vec<(usize, usize)> =
                gen.sector.0.iter().enumerate().map(|(i, r)| Ok((4 + i, level_of(&gen.modes, *r)?))).collect::<Result<_>>()?;
            Ok(c.controlled_by(&controls))
        }
        Encoding::PqPair => {
            let dims = vec![2; 16];
            let mut sites = Vec::new();
            for (link, p) in t.pairs.iter().enumerate() {
                let [on_p, on_q] = pq_substitution(*p)?;
                if on_p {
                    sites.push(2 * link);
                }
                if on_q {
                    sites.push(2 * link + 1);
                }
            }
            let c = chain_circuit(dims, &sites, ModePair(0, 1), angle)?;
            let mut controls = Vec::new();
            for (i, r) in gen.sector.0.iter().enumerate() {
                if r.p > 1 || r.q > 1 {
                    return Err(Error::Unsupported("pq encoding of controls beyond one index".into()));
                }
                controls.push((8 + 2 * i, r.p as usize));
                controls.push((8 + 2 * i + 1, r.q as usize));
            }
            Ok(c.controlled_by(&controls))
        }
    }
}

/// Product of the term circuits of a sector, in term order. Terms of a
/// sector generator need not commute, so this equals `exp(-i α G)` only up
/// to `O(α²)`; each factor is exact.
pub fn compile_sector_circuit(gen: &SectorGenerator, encoding: Encoding, alpha: f64) -> Result<QuditCircuit> {
    let mut out: Option<QuditCircuit> = None;
    for k in 0..gen.terms.len() {
        let c = compile_term_circuit(gen, k, encoding, alpha)?;
        match out.as_mut() {
            None => out = Some(c),
            Some(o) => o.gates.extend(c.gates),
        }
    }
    out.ok_or(Error::EmptyBasis)
}

/// `Σ c · sub(𝒳) ⊗ ...` in the `(p, q)` encoding over the 8 active
/// two-level registers.
pub fn pq_generator_matrix(gen: &SectorGenerator) -> Result<CMat> {
    qutrit_check(gen)?;
    let x = CMat::from_row_slice(2, 2, &[cx(0.0), cx(1.0), cx(1.0), cx(0.0)]);
    let id = CMat::identity(2, 2);
    let mut acc = CMat::zeros(256, 256);
    for t in &gen.terms {
        let mut m = CMat::identity(1, 1);
        for p in &t.pairs {
            let [on_p, on_q] = pq_substitution(*p)?;
            m = m.kronecker(if on_p { &x } else { &id });
            m = m.kronecker(if on_q { &x } else { &id });
        }
        acc += m * cx(t.coefficient);
    }
    Ok(acc)
}

/// Index of a qutrit active configuration in the `(p, q)` register space.
pub fn pq_index(levels: [usize; 4]) -> usize {
    levels.iter().fold(0, |acc, &l| {
        let (p, q) = match l {
            0 => (0, 0),
            1 => (1, 0),
            _ => (0, 1),
        };
        (acc << 2) | (p << 1) | q
    })
}

/// Register sites of a plaquette's active and control links.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaquetteSites {
    pub active: [usize; 4],
    pub controls: [Option<usize>; 4],
}

impl From<&Plaquette> for PlaquetteSites {
    fn from(p: &Plaquette) -> Self {
        PlaquetteSites { active: p.active, controls: p.controls }
    }
}

/// Applies a precomputed active-space unitary on the subspace where the
/// control links hold the sector irreps. Open-boundary controls count as
/// singlets.
pub fn apply_sector_unitary(reg: &mut QuditRegister, sites: PlaquetteSites, gen: &SectorGenerator, u: &CMat) -> Result<()> {
    let mut controls = Vec::new();
    for (c, r) in sites.controls.iter().zip(gen.sector.0) {
        match c {
            Some(site) => controls.push((*site, level_of(&gen.modes, r)?)),
            None if r == Irrep::SINGLET => {}
            None => return Ok(()),
        }
    }
    reg.apply(&sites.active, u, &controls);
    Ok(())
}

/// `exp(-i α G)` on the controlled subspace, identity elsewhere.
pub fn apply_controlled_sector_rotation(
    reg: &mut QuditRegister,
    sites: PlaquetteSites,
    gen: &SectorGenerator,
    alpha: f64,
) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::Config(format!("rotation angle {alpha}")));
    }
    apply_sector_unitary(reg, sites, gen, &SectorRotation::Exact.unitary(gen, alpha))
}

/// How a controlled sector rotation `exp(-i α G)` is realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum SectorRotation {
    /// Exact exponential of the whole sector generator.
    Exact,
    /// Ordered product of the per-term exponentials, as the compiled
    /// circuits implement it.
    #[default]
    TermProduct,
}

impl SectorRotation {
    pub fn unitary(self, gen: &SectorGenerator, alpha: f64) -> CMat {
        match self {
            SectorRotation::Exact => expm_hermitian(&gen.matrix(), alpha),
            SectorRotation::TermProduct => {
                let d = gen.dim();
                let n = d.pow(4);
                // later terms act later, so they multiply from the left
                gen.terms.iter().fold(CMat::identity(n, n), |u, t| string_rotation(d, &t.pairs, alpha * t.coefficient) * u)
            }
        }
    }
}

/// Qudit-basis Trotter evolution of the trivial vacuum: an electric phase
/// layer and all controlled sector rotations of every plaquette per step.
/// Returns samples at `0, dt, ..., n_steps·dt` with gauge leakage.
pub fn local_trotter_evolve(
    geometry: &LatticeGeometry,
    trunc: &Truncation,
    g: f64,
    dt: f64,
    n_steps: usize,
    order: TrotterOrder,
    rotation: SectorRotation,
) -> Result<Trajectory> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::BadCoupling(g));
    }
    let modes = mode_order(trunc);
    let d = modes.len();
    let n_links = geometry.num_links();
    let dims = vec![d; n_links];
    let mut reg = QuditRegister::basis(dims.clone(), &vec![0; n_links]);
    let total = reg.amplitudes.len();

    let electric: Vec<f64> = (0..total)
        .map(|i| reg.levels_of(i).iter().map(|&l| modes[l].casimir_f64()).sum::<f64>() * g * g / 2.0)
        .collect();
    let physical: Vec<bool> = {
        let set: std::collections::HashSet<LinkConfig> = enumerate_physical(geometry, trunc).into_iter().collect();
        (0..total).map(|i| set.contains(&LinkConfig(reg.levels_of(i).iter().map(|&l| modes[l]).collect()))).collect()
    };

    let sectors: Vec<SectorGenerator> =
        enumerate_control_sectors(trunc).iter().map(|s| build_sector_generator(s, trunc)).collect::<Result<_>>()?;
    let mut cache: HashMap<(usize, u64), CMat> = HashMap::new();
    let alpha = |weight: f64| -weight * dt / (2.0 * g * g);
    let mut plaquette_layer = |reg: &mut QuditRegister, p: usize, weight: f64| -> Result<()> {
        let sites = PlaquetteSites::from(&geometry.plaquettes[p]);
        for (k, gen) in sectors.iter().enumerate() {
            let a = alpha(weight);
            let u = cache.entry((k, a.to_bits())).or_insert_with(|| rotation.unitary(gen, a));
            apply_sector_unitary(reg, sites, gen, u)?;
        }
        Ok(())
    };
    let electric_layer = |reg: &mut QuditRegister, weight: f64| {
        for (a, e) in reg.amplitudes.iter_mut().zip(&electric) {
            *a *= Complex64::from_polar(1.0, -e * dt * weight);
        }
    };

    let vacuum = reg.amplitudes.clone();
    let mut traj = Trajectory { leakage: Some(Vec::new()), ..Default::default() };
    let record = |reg: &QuditRegister, t: f64, traj: &mut Trajectory| {
        traj.times.push(t);
        traj.persistence.push(vacuum.dotc(&reg.amplitudes).norm_sqr());
        traj.electric_energy.push(reg.amplitudes.iter().zip(&electric).map(|(a, e)| a.norm_sqr() * e).sum());
        let leak = reg.amplitudes.iter().zip(&physical).filter(|(_, p)| !**p).map(|(a, _)| a.norm_sqr()).sum();
        traj.leakage.as_mut().expect("tracked").push(leak);
    };
    record(&reg, 0.0, &mut traj);
    let np = geometry.plaquettes.len();
    for step in 1..=n_steps {
        match order {
            TrotterOrder::First => {
                electric_layer(&mut reg, 1.0);
                for p in 0..np {
                    plaquette_layer(&mut reg, p, 1.0)?;
                }
            }
            TrotterOrder::Second => {
                electric_layer(&mut reg, 0.5);
                for p in 0..np.saturating_sub(1) {
                    plaquette_layer(&mut reg, p, 0.5)?;
                }
                plaquette_layer(&mut reg, np - 1, 1.0)?;
                for p in (0..np.saturating_sub(1)).rev() {
                    plaquette_layer(&mut reg, p, 0.5)?;
                }
                electric_layer(&mut reg, 0.5);
            }
        }
        record(&reg, step as f64 * dt, &mut traj);
    }
    Ok(traj)
}
