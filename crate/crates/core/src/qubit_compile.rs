//! Qubit-register lowering: Pauli decompositions, the binary `(p, q)`
//! register plaquette operator, Gray-code two-level rotations, and a small
//! statevector simulator used to check circuit identities.
//!
//! Qubits are ordered most-significant first: qubit 0 is the leftmost
//! tensor factor and the highest bit of a basis index.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, phase_distance, CMat, CVec, RMat};

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Single-qubit Pauli matrix for `I`, `X`, `Y` or `Z`.
pub fn pauli(ch: char) -> Result<CMat> {
    let (z, o, i) = (cx(0.0), cx(1.0), Complex64::new(0.0, 1.0));
    Ok(match ch {
        'I' => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => return Err(Error::Config(format!("unknown Pauli label `{ch}`"))),
    })
}

/// Dense matrix of a Pauli string such as `"XIZ"`.
pub fn pauli_matrix(s: &str) -> Result<CMat> {
    s.chars().try_fold(CMat::identity(1, 1), |acc, ch| Ok(acc.kronecker(&pauli(ch)?)))
}

/// Weighted sum of Pauli strings of equal length.
pub fn pauli_sum(terms: &[(f64, &str)]) -> Result<CMat> {
    let first = terms.first().ok_or(Error::EmptyBasis)?;
    let n = 1usize << first.1.len();
    terms.iter().try_fold(CMat::zeros(n, n), |acc, (w, s)| Ok(acc + pauli_matrix(s)? * cx(*w)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: String,
}

/// `Tr(M σ) / 2^n` for every Pauli string with nonzero overlap above `tol`.
///
/// For a fixed X/Y support `x`, `<r^x| σ |r> = i^{#Y} (-1)^{r·w}` with `w`
/// the Y/Z support, so one Walsh-Hadamard transform of `r -> M[r, r^x]`
/// yields every string sharing that support.
pub fn pauli_decompose_complex(m: &CMat, n_qubits: usize, tol: f64) -> Result<Vec<(Complex64, String)>> {
    let dim = 1usize << n_qubits;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::Config(format!("matrix is {}x{}, expected {dim}x{dim}", m.nrows(), m.ncols())));
    }
    let mut found = Vec::new();
    let mut v = vec![cx(0.0); dim];
    for x in 0..dim {
        for (r, slot) in v.iter_mut().enumerate() {
            *slot = m[(r, r ^ x)];
        }
        if v.iter().all(|z| *z == cx(0.0)) {
            continue;
        }
        walsh_hadamard(&mut v);
        for (w, total) in v.iter().enumerate() {
            let y = w & x;
            let phase = match y.count_ones() % 4 {
                0 => cx(1.0),
                1 => Complex64::new(0.0, 1.0),
                2 => cx(-1.0),
                _ => Complex64::new(0.0, -1.0),
            };
            let coeff = total * phase / dim as f64;
            if coeff.norm() > tol {
                found.push((string_code(x, w, n_qubits), coeff));
            }
        }
    }
    found.sort_by_key(|(code, _)| *code);
    Ok(found.into_iter().map(|(code, c)| (c, decode(code, n_qubits))).collect())
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (p, q) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*p + *q, *p - *q);
                *p = s;
                *q = d;
            }
        }
        h *= 2;
    }
}

/// Base-4 code of the string in `IXYZ` order, most significant qubit first,
/// so sorting by code is lexicographic order of the strings.
fn string_code(x: usize, w: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, k| {
        let bit = 1 << (n - 1 - k);
        let digit = match (x & bit != 0, w & bit != 0) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        };
        4 * acc + digit
    })
}

fn decode(code: usize, n: usize) -> String {
    (0..n).map(|k| b"IXYZ"[(code >> (2 * (n - 1 - k))) & 3] as char).collect()
}

/// Real Pauli coefficients of a Hermitian matrix, zero-padded to `2^n`.
pub fn pauli_decompose(h: &CMat, n_qubits: usize) -> Result<Vec<PauliTerm>> {
    let padded = pad_to_qubits(h, n_qubits)?;
    let defect = crate::linalg::hermiticity_defect(&padded);
    if defect > 1e-10 {
        return Err(Error::Tolerance(format!("matrix not Hermitian (defect {defect:e})")));
    }
    Ok(pauli_decompose_complex(&padded, n_qubits, 1e-12)?
        .into_iter()
        .map(|(c, s)| PauliTerm { coefficient: c.re, string: s })
        .collect())
}

pub fn pauli_decompose_real(h: &RMat, n_qubits: usize) -> Result<Vec<PauliTerm>> {
    pauli_decompose(&crate::linalg::to_complex(h), n_qubits)
}

/// Embeds `h` in the top-left corner of a `2^n` square zero matrix.
pub fn pad_to_qubits(h: &CMat, n_qubits: usize) -> Result<CMat> {
    let dim = 1usize << n_qubits;
    if h.nrows() > dim || h.ncols() != h.nrows() {
        return Err(Error::Config(format!("{}x{} does not fit {n_qubits} qubits", h.nrows(), h.ncols())));
    }
    let mut out = CMat::zeros(dim, dim);
    out.view_mut((0, 0), (h.nrows(), h.ncols())).copy_from(h);
    Ok(out)
}

pub fn reconstruct(terms: &[PauliTerm], n_qubits: usize) -> Result<CMat> {
    let dim = 1usize << n_qubits;
    terms
        .iter()
        .try_fold(CMat::zeros(dim, dim), |acc, t| Ok(acc + pauli_matrix(&t.string)? * cx(t.coefficient)))
}

/// One tensor factor of a binary register operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Factor {
    I,
    /// `b = |0><1|`
    Lower,
    /// `b† = |1><0|`
    Raise,
}

impl Factor {
    fn matrix(self) -> CMat {
        let (z, o) = (cx(0.0), cx(1.0));
        match self {
            Factor::I => CMat::identity(2, 2),
            Factor::Lower => CMat::from_row_slice(2, 2, &[z, o, z, z]),
            Factor::Raise => CMat::from_row_slice(2, 2, &[z, z, o, z]),
        }
    }

    fn dagger(self) -> Factor {
        match self {
            Factor::I => Factor::I,
            Factor::Lower => Factor::Raise,
            Factor::Raise => Factor::Lower,
        }
    }

    fn symbol(self) -> char {
        match self {
            Factor::I => 'I',
            Factor::Lower => 'b',
            Factor::Raise => 'B',
        }
    }
}

/// Sum of tensor strings over `{I, b, b†}`, all with unit weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinaryRegisterOp {
    pub n: usize,
    pub terms: Vec<Vec<Factor>>,
}

impl BinaryRegisterOp {
    pub fn matrix(&self) -> CMat {
        let width = self.terms.first().map_or(self.n, Vec::len);
        let dim = 1usize << width;
        self.terms.iter().fold(CMat::zeros(dim, dim), |acc, t| {
            acc + t.iter().fold(CMat::identity(1, 1), |m, f| m.kronecker(&f.matrix()))
        })
    }

    pub fn dagger(&self) -> Self {
        BinaryRegisterOp { n: self.n, terms: self.terms.iter().map(|t| t.iter().map(|f| f.dagger()).collect()).collect() }
    }

    /// Number of distinct Pauli strings in the expansion.
    pub fn pauli_term_count(&self) -> usize {
        let width = self.terms.first().map_or(self.n, Vec::len);
        pauli_decompose_complex(&self.matrix(), width, 1e-12).map_or(0, |v| v.len())
    }

    pub fn render(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.iter().map(|f| f.symbol()).collect()).collect()
    }

    fn tensor(a: &[Vec<Factor>], b: &[Vec<Factor>]) -> Vec<Vec<Factor>> {
        a.iter().flat_map(|x| b.iter().map(move |y| x.iter().chain(y).copied().collect())).collect()
    }
}

/// `B_n |p> = |p - 1>`, `B_n |0> = 0` on an `n`-qubit register, built from
/// `B_n = I ⊗ B_{n-1} + b ⊗ (b†)^{⊗(n-1)}`.
pub fn lowering_operator(n: usize) -> Result<BinaryRegisterOp> {
    if n == 0 {
        return Err(Error::Config("register needs at least one qubit".into()));
    }
    let mut terms = vec![vec![Factor::Lower]];
    for k in 2..=n {
        let mut next: Vec<Vec<Factor>> =
            terms.iter().map(|t| std::iter::once(Factor::I).chain(t.iter().copied()).collect()).collect();
        next.push(std::iter::once(Factor::Lower).chain(std::iter::repeat(Factor::Raise).take(k - 1)).collect());
        terms = next;
    }
    Ok(BinaryRegisterOp { n, terms })
}

/// The operator strings `𝒪_j` of `□ = B† ⊗ I + B ⊗ B† + I ⊗ B` on a
/// `p` register followed by a `q` register, `n` qubits each.
pub fn plaquette_operator_terms(n: usize) -> Result<BinaryRegisterOp> {
    let b = lowering_operator(n)?;
    let bd = b.dagger();
    let id = vec![vec![Factor::I; n]];
    let mut terms = BinaryRegisterOp::tensor(&bd.terms, &id);
    terms.extend(BinaryRegisterOp::tensor(&b.terms, &bd.terms));
    terms.extend(BinaryRegisterOp::tensor(&id, &b.terms));
    Ok(BinaryRegisterOp { n: 2 * n, terms })
}

/// Dense `□` over `2n` qubits.
pub fn plaquette_pq_operator(n: usize) -> Result<CMat> {
    Ok(plaquette_operator_terms(n)?.matrix())
}

/// Number of distinct Pauli strings in `□ + □†`.
pub fn plaquette_hermitian_term_count(n: usize) -> Result<usize> {
    let b = plaquette_pq_operator(n)?;
    Ok(pauli_decompose_complex(&(&b + b.adjoint()), 2 * n, 1e-12)?.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Qubit gates. Controls are `(qubit, required bit value)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QubitGate {
    H { qubit: usize },
    S { qubit: usize },
    /// Multi-controlled NOT; a CNOT has one control.
    X { target: usize, controls: Vec<(usize, bool)> },
    /// Multi-controlled `exp(i θ σ_axis)`.
    Rot { target: usize, axis: Axis, theta: f64, controls: Vec<(usize, bool)> },
}

impl QubitGate {
    pub fn cnot(control: usize, target: usize) -> Self {
        QubitGate::X { target, controls: vec![(control, true)] }
    }

    pub fn rot(target: usize, axis: Axis, theta: f64) -> Self {
        QubitGate::Rot { target, axis, theta, controls: Vec::new() }
    }

    fn local(&self) -> (usize, [[Complex64; 2]; 2], &[(usize, bool)]) {
        let (z, o) = (cx(0.0), cx(1.0));
        let i = Complex64::new(0.0, 1.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            QubitGate::H { qubit } => (*qubit, [[cx(r), cx(r)], [cx(r), cx(-r)]], &[]),
            QubitGate::S { qubit } => (*qubit, [[o, z], [z, i]], &[]),
            QubitGate::X { target, controls } => (*target, [[z, o], [o, z]], controls),
            QubitGate::Rot { target, axis, theta, controls } => {
                let (c, s) = (cx(theta.cos()), theta.sin());
                let m = match axis {
                    Axis::X => [[c, i * s], [i * s, c]],
                    Axis::Y => [[c, cx(s)], [cx(-s), c]],
                    Axis::Z => [[c + i * s, z], [z, c - i * s]],
                };
                (*target, m, controls)
            }
        }
    }

    pub fn control_count(&self) -> usize {
        self.local().2.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct QubitCircuit {
    pub n_qubits: usize,
    pub gates: Vec<QubitGate>,
}

impl QubitCircuit {
    pub fn new(n_qubits: usize) -> Self {
        QubitCircuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, g: QubitGate) -> &mut Self {
        self.gates.push(g);
        self
    }

    /// Applies the gates in order to `state`.
    pub fn apply(&self, state: &mut CVec) {
        let n = self.n_qubits;
        for g in &self.gates {
            let (t, m, controls) = g.local();
            let tbit = 1usize << (n - 1 - t);
            for idx in 0..state.len() {
                if idx & tbit != 0 {
                    continue;
                }
                let active = controls.iter().all(|&(c, v)| ((idx >> (n - 1 - c)) & 1 == 1) == v);
                if !active {
                    continue;
                }
                let (a, b) = (state[idx], state[idx | tbit]);
                state[idx] = m[0][0] * a + m[0][1] * b;
                state[idx | tbit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn unitary(&self) -> CMat {
        let dim = 1usize << self.n_qubits;
        let mut u = CMat::zeros(dim, dim);
        for col in 0..dim {
            let mut v = CVec::zeros(dim);
            v[col] = cx(1.0);
            self.apply(&mut v);
            u.set_column(col, &v);
        }
        u
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, QubitGate::X { controls, .. } if controls.len() == 1)).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "schema": 1, "n_qubits": self.n_qubits, "gates": self.gates })
    }
}

/// `exp(i (a XX + b YY + c ZZ))` with three CNOTs.
pub fn cartan_circuit(a: f64, b: f64, c: f64) -> QubitCircuit {
    use std::f64::consts::FRAC_PI_4;
    let mut q = QubitCircuit::new(2);
    q.push(QubitGate::cnot(0, 1))
        .push(QubitGate::rot(0, Axis::X, a))
        .push(QubitGate::rot(1, Axis::Z, c))
        .push(QubitGate::H { qubit: 0 })
        .push(QubitGate::cnot(0, 1))
        .push(QubitGate::S { qubit: 0 })
        .push(QubitGate::rot(1, Axis::Z, -b))
        .push(QubitGate::H { qubit: 0 })
        .push(QubitGate::cnot(0, 1))
        .push(QubitGate::rot(0, Axis::X, FRAC_PI_4))
        .push(QubitGate::rot(1, Axis::X, -FRAC_PI_4));
    q
}

/// `exp(i α X ⊗ Z)`.
pub fn xz_circuit(alpha: f64) -> QubitCircuit {
    let mut q = QubitCircuit::new(2);
    q.push(QubitGate::H { qubit: 0 })
        .push(QubitGate::cnot(1, 0))
        .push(QubitGate::rot(0, Axis::Z, alpha))
        .push(QubitGate::cnot(1, 0))
        .push(QubitGate::H { qubit: 0 });
    q
}

/// `exp(i (α Z ⊗ X + β X ⊗ Z))`.
pub fn zx_xz_circuit(alpha: f64, beta: f64) -> QubitCircuit {
    let mut q = QubitCircuit::new(2);
    q.push(QubitGate::H { qubit: 0 })
        .push(QubitGate::cnot(0, 1))
        .push(QubitGate::H { qubit: 0 })
        .push(QubitGate::rot(0, Axis::Z, alpha))
        .push(QubitGate::rot(1, Axis::Z, beta))
        .push(QubitGate::H { qubit: 0 })
        .push(QubitGate::cnot(0, 1))
        .push(QubitGate::H { qubit: 0 });
    q
}

/// Gray-code path between two bitstrings on a subset of qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrayRotation {
    pub qubits: Vec<usize>,
    pub source: Vec<bool>,
    pub target: Vec<bool>,
    /// Positions (into `qubits`) flipped walking from `source` to `target`.
    pub flips: Vec<usize>,
}

impl GrayRotation {
    pub fn new(qubits: Vec<usize>, source: Vec<bool>, target: Vec<bool>) -> Result<Self> {
        if qubits.len() != source.len() || source.len() != target.len() {
            return Err(Error::Config("gray rotation: mismatched lengths".into()));
        }
        let flips: Vec<usize> = (0..source.len()).filter(|&k| source[k] != target[k]).collect();
        if flips.is_empty() {
            return Err(Error::Config("gray rotation: source equals target".into()));
        }
        Ok(GrayRotation { qubits, source, target, flips })
    }

    /// Codewords `g_0 = source, ..., g_m = target`.
    pub fn path(&self) -> Vec<Vec<bool>> {
        let mut cur = self.source.clone();
        let mut out = vec![cur.clone()];
        for &k in &self.flips {
            cur[k] = !cur[k];
            out.push(cur.clone());
        }
        out
    }

    /// Circuit for `exp(-i α (|s><t| + |t><s|))` on the listed qubits,
    /// identity on all others. Uses `2(m-1)+1` multi-controlled stages for
    /// Hamming distance `m`.
    pub fn circuit(&self, n_qubits: usize, alpha: f64) -> QubitCircuit {
        let path = self.path();
        let m = self.flips.len();
        let controls_except = |word: &[bool], skip: usize| -> Vec<(usize, bool)> {
            (0..word.len()).filter(|&k| k != skip).map(|k| (self.qubits[k], word[k])).collect()
        };
        let mut swaps = Vec::new();
        for j in (1..m).rev() {
            let k = self.flips[j];
            swaps.push(QubitGate::X { target: self.qubits[k], controls: controls_except(&path[j], k) });
        }
        let k0 = self.flips[0];
        let mut q = QubitCircuit::new(n_qubits);
        q.gates.extend(swaps.iter().cloned());
        q.push(QubitGate::Rot { target: self.qubits[k0], axis: Axis::X, theta: -alpha, controls: controls_except(&path[0], k0) });
        q.gates.extend(swaps.into_iter().rev());
        q
    }
}

/// Two-level rotation for `exp(-i α (𝒪 + 𝒪†))` with `𝒪` a `{I, b, b†}`
/// string: identity factors become spectators.
pub fn gray_rotation_for_term(term: &[Factor], alpha: f64) -> Result<QubitCircuit> {
    let active: Vec<usize> = (0..term.len()).filter(|&k| term[k] != Factor::I).collect();
    let source = active.iter().map(|&k| term[k] == Factor::Raise).collect();
    let target = active.iter().map(|&k| term[k] == Factor::Lower).collect();
    Ok(GrayRotation::new(active, source, target)?.circuit(term.len(), alpha))
}

/// `|s><t| + |t><s|` as a dense matrix, for oracles.
pub fn two_level_generator(n_qubits: usize, source: usize, target: usize) -> CMat {
    let dim = 1usize << n_qubits;
    let mut m = CMat::zeros(dim, dim);
    m[(source, target)] = cx(1.0);
    m[(target, source)] = cx(1.0);
    m
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub draws: usize,
    pub max_deviation: f64,
}

/// Compares each named circuit with its defining exponential over `draws`
/// random parameter sets (deterministic for a given seed).
pub fn verify_circuit_identities(draws: usize, seed: u64) -> Vec<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = |s: &str| pauli_matrix(s).expect("valid Pauli string");
    let (xx, yy, zz, xz, zx) = (p("XX"), p("YY"), p("ZZ"), p("XZ"), p("ZX"));
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut record = |name: &'static str, d: f64| {
        let e = worst.entry(name).or_insert(0.0);
        *e = e.max(d);
    };
    for _ in 0..draws {
        let (a, b, c) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let target = expm_hermitian(&(&xx * cx(a) + &yy * cx(b) + &zz * cx(c)), -1.0);
        record("cartan_xx_yy_zz", phase_distance(&target, &cartan_circuit(a, b, c).unitary()));
        record("xz", phase_distance(&expm_hermitian(&(&xz * cx(a)), -1.0), &xz_circuit(a).unitary()));
        let target = expm_hermitian(&(&zx * cx(a) + &xz * cx(b)), -1.0);
        record("zx_plus_xz", phase_distance(&target, &zx_xz_circuit(a, b).unitary()));
        let n = 6;
        let s = rng.random_range(0..1usize << n);
        let mut t = rng.random_range(0..1usize << n);
        while t == s {
            t = rng.random_range(0..1usize << n);
        }
        let bits = |v: usize| (0..n).map(|k| (v >> (n - 1 - k)) & 1 == 1).collect::<Vec<_>>();
        let gray = GrayRotation::new((0..n).collect(), bits(s), bits(t)).expect("distinct words");
        let target = expm_hermitian(&two_level_generator(n, s, t), a);
        record("gray_two_level", crate::linalg::max_abs_diff(&target, &gray.circuit(n, a).unitary()));
    }
    worst
        .into_iter()
        .map(|(name, max_deviation)| IdentityReport { name: name.to_string(), draws, max_deviation })
        .collect()
}
