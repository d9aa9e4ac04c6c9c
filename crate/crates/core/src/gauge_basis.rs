//! Lattice geometries, Gauss-law enumeration of link-irrep configurations and
//! projection onto symmetry-adapted global states.
//!
//! Links carry an orientation. At a vertex an outgoing link contributes its
//! irrep and an incoming link its conjugate; a configuration is physical when
//! every vertex product contains a singlet.
//!
//! Plaquettes list their active links in the order `(R_b, Q_r, R_t, Q_l)`
//! (bottom, right, top, left) and their four control links `(C_1..C_4)`,
//! the links continuing the top and bottom rows to the left and right. The
//! orientations are chosen so that `□` multiplies `R_b` and `Q_r` by a triplet
//! and `R_t`, `Q_l` by an antitriplet.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::plaquette_matrix_element;
use crate::su3_irreps::{singlet_multiplicity, Irrep, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeometryKind {
    OnePlaquette,
    TwoPlaquettePbc,
    PlaquetteString(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plaquette {
    /// `(R_b, Q_r, R_t, Q_l)`.
    pub active: [usize; 4],
    /// `(C_1, C_2, C_3, C_4)`; `None` for an open boundary (trivial irrep).
    pub controls: [Option<usize>; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeGeometry {
    pub kind: GeometryKind,
    pub links: Vec<Link>,
    pub vertex_names: Vec<String>,
    /// Per vertex: `(link index, incoming)`.
    pub vertices: Vec<Vec<(usize, bool)>>,
    pub plaquettes: Vec<Plaquette>,
}

impl LatticeGeometry {
    fn assemble(kind: GeometryKind, vertex_names: Vec<String>, links: Vec<Link>, plaquettes: Vec<Plaquette>) -> Self {
        let mut vertices = vec![Vec::new(); vertex_names.len()];
        for (i, l) in links.iter().enumerate() {
            vertices[l.from].push((i, false));
            vertices[l.to].push((i, true));
        }
        LatticeGeometry { kind, links, vertex_names, vertices, plaquettes }
    }

    fn link(name: &str, from: usize, to: usize) -> Link {
        Link { name: name.to_string(), from, to }
    }

    /// A single open plaquette with links ordered `(R_b, Q_r, R_t, Q_l)`.
    pub fn one_plaquette() -> Self {
        // Corners: 0 = upper left, 1 = upper right, 2 = lower left, 3 = lower right.
        let names = ["UL", "UR", "LL", "LR"].map(String::from).to_vec();
        let links = vec![
            Self::link("Rb", 3, 2),
            Self::link("Qr", 1, 3),
            Self::link("Rt", 1, 0),
            Self::link("Ql", 0, 2),
        ];
        let plaq = Plaquette { active: [0, 1, 2, 3], controls: [None; 4] };
        Self::assemble(GeometryKind::OnePlaquette, names, links, vec![plaq])
    }

    /// Two plaquettes on a periodic strip: links `(R1, Q1, R2, R3, Q2, R4)`
    /// on vertices `A, B, C, D`.
    pub fn two_plaquette_pbc() -> Self {
        let names = ["A", "B", "C", "D"].map(String::from).to_vec();
        let (a, b, c, d) = (0, 1, 2, 3);
        let links = vec![
            Self::link("R1", a, b),
            Self::link("Q1", c, b),
            Self::link("R2", d, c),
            Self::link("R3", b, a),
            Self::link("Q2", d, a),
            Self::link("R4", c, d),
        ];
        let plaquettes = vec![
            Plaquette { active: [2, 1, 0, 4], controls: [Some(3), Some(5), Some(3), Some(5)] },
            Plaquette { active: [5, 4, 3, 1], controls: [Some(0), Some(2), Some(0), Some(2)] },
        ];
        Self::assemble(GeometryKind::TwoPlaquettePbc, names, links, plaquettes)
    }

    /// `n` plaquettes in a row with open ends. Links are `t_0..t_{n-1}`
    /// (top, pointing left), `b_0..b_{n-1}` (bottom, pointing left) and
    /// `v_0..v_n` (vertical, pointing down).
    pub fn plaquette_string(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("a plaquette string needs at least one plaquette".into()));
        }
        let top = |i: usize| i;
        let bot = |i: usize| n + 1 + i;
        let mut names: Vec<String> = (0..=n).map(|i| format!("T{i}")).collect();
        names.extend((0..=n).map(|i| format!("B{i}")));
        let mut links = Vec::new();
        for i in 0..n {
            links.push(Self::link(&format!("t{i}"), top(i + 1), top(i)));
        }
        for i in 0..n {
            links.push(Self::link(&format!("b{i}"), bot(i + 1), bot(i)));
        }
        for i in 0..=n {
            links.push(Self::link(&format!("v{i}"), top(i), bot(i)));
        }
        let t = |i: usize| i;
        let b = |i: usize| n + i;
        let v = |i: usize| 2 * n + i;
        let plaquettes = (0..n)
            .map(|i| Plaquette {
                active: [b(i), v(i + 1), t(i), v(i)],
                controls: [
                    i.checked_sub(1).map(t),
                    i.checked_sub(1).map(b),
                    (i + 1 < n).then(|| t(i + 1)),
                    (i + 1 < n).then(|| b(i + 1)),
                ],
            })
            .collect();
        Ok(Self::assemble(GeometryKind::PlaquetteString(n), names, links, plaquettes))
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    /// Irreps seen at vertex `v` with their incoming flags.
    pub fn vertex_irreps(&self, v: usize, cfg: &LinkConfig) -> Vec<(Irrep, bool)> {
        self.vertices[v].iter().map(|&(l, incoming)| (cfg.0[l], incoming)).collect()
    }

    pub fn is_physical(&self, cfg: &LinkConfig) -> bool {
        (0..self.vertices.len()).all(|v| vertex_singlet_multiplicity(&self.vertex_irreps(v, cfg)) >= 1)
    }

    /// Control irreps of a plaquette in configuration `cfg`.
    pub fn control_irreps(&self, plaquette: usize, cfg: &LinkConfig) -> [Irrep; 4] {
        self.plaquettes[plaquette].controls.map(|c| c.map_or(Irrep::SINGLET, |l| cfg.0[l]))
    }

    pub fn active_irreps(&self, plaquette: usize, cfg: &LinkConfig) -> [Irrep; 4] {
        self.plaquettes[plaquette].active.map(|l| cfg.0[l])
    }
}

impl std::str::FromStr for LatticeGeometry {
    type Err = Error;

    /// `one`, `two-pbc`, or `string:N`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "one" | "one-plaquette" => Ok(Self::one_plaquette()),
            "two" | "two-pbc" | "two-plaquette-pbc" => Ok(Self::two_plaquette_pbc()),
            other => match other.strip_prefix("string:") {
                Some(n) => Self::plaquette_string(n.parse().map_err(|_| Error::Config(format!("bad geometry `{s}`")))?),
                None => Err(Error::Config(format!("unknown geometry `{s}`"))),
            },
        }
    }
}

/// One irrep per link, compared lexicographically in irrep order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinkConfig(pub Vec<Irrep>);

impl LinkConfig {
    pub fn vacuum(n: usize) -> Self {
        LinkConfig(vec![Irrep::SINGLET; n])
    }

    pub fn conjugate(&self) -> Self {
        LinkConfig(self.0.iter().map(|r| r.conjugate()).collect())
    }

    pub fn casimir_sum(&self) -> Rational64 {
        self.0.iter().map(|r| r.casimir()).sum()
    }
}

impl fmt::Display for LinkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|r| r.label()).collect();
        write!(f, "({})", labels.join(" "))
    }
}

/// Eigenvalue signs of the implemented symmetries. `None` leaves a
/// symmetry unresolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SymmetrySector {
    pub color_parity: Option<i8>,
    pub translation: Option<i8>,
    pub reflection: Option<i8>,
}

impl SymmetrySector {
    pub fn new(color_parity: i8, translation: i8, reflection: Option<i8>) -> Self {
        SymmetrySector { color_parity: Some(color_parity), translation: Some(translation), reflection }
    }

    pub fn label(&self) -> String {
        [self.color_parity, self.translation, self.reflection]
            .iter()
            .flatten()
            .map(|s| if *s > 0 { '+' } else { '-' })
            .collect()
    }
}

/// A normalised real superposition of link configurations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalState {
    pub components: Vec<(LinkConfig, f64)>,
    pub quantum_numbers: SymmetrySector,
}

impl GlobalState {
    pub fn single(cfg: LinkConfig) -> Self {
        GlobalState { components: vec![(cfg, 1.0)], quantum_numbers: SymmetrySector::default() }
    }

    /// Normalised combination with components sorted in config order.
    pub fn from_terms(terms: impl IntoIterator<Item = (LinkConfig, f64)>) -> Self {
        let mut acc: BTreeMap<LinkConfig, f64> = BTreeMap::new();
        for (c, a) in terms {
            *acc.entry(c).or_insert(0.0) += a;
        }
        let norm = acc.values().map(|a| a * a).sum::<f64>().sqrt();
        let components = acc.into_iter().filter(|(_, a)| a.abs() > 1e-14).map(|(c, a)| (c, a / norm)).collect();
        GlobalState { components, quantum_numbers: SymmetrySector::default() }
    }

    pub fn norm_squared(&self) -> f64 {
        self.components.iter().map(|(_, a)| a * a).sum()
    }

    pub fn conjugate(&self) -> Self {
        GlobalState::from_terms(self.components.iter().map(|(c, a)| (c.conjugate(), *a)))
    }

    /// Overlap with another state.
    pub fn overlap(&self, other: &GlobalState) -> f64 {
        let map: HashMap<&LinkConfig, f64> = other.components.iter().map(|(c, a)| (c, *a)).collect();
        self.components.iter().map(|(c, a)| a * map.get(c).copied().unwrap_or(0.0)).sum()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.components.iter().map(|(c, a)| format!("{a:+.6}{c}")).collect();
        parts.join(" ")
    }
}

/// Singlet multiplicity at a vertex; incoming links enter conjugated.
pub fn vertex_singlet_multiplicity(irreps_with_orientation: &[(Irrep, bool)]) -> u64 {
    let list: Vec<Irrep> =
        irreps_with_orientation.iter().map(|&(r, incoming)| if incoming { r.conjugate() } else { r }).collect();
    singlet_multiplicity(&list)
}

/// All Gauss-law-satisfying configurations, in lexicographic order.
pub fn enumerate_physical(geometry: &LatticeGeometry, trunc: &Truncation) -> Vec<LinkConfig> {
    let irreps = trunc.irreps();
    let n = geometry.num_links();
    // A vertex is checked as soon as its highest-index link is assigned.
    let mut closes_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, links) in geometry.vertices.iter().enumerate() {
        if let Some(last) = links.iter().map(|(l, _)| *l).max() {
            closes_at[last].push(v);
        }
    }
    let mut out = Vec::new();
    let mut cfg = LinkConfig::vacuum(n);
    fn recurse(
        depth: usize,
        cfg: &mut LinkConfig,
        geometry: &LatticeGeometry,
        irreps: &[Irrep],
        closes_at: &[Vec<usize>],
        out: &mut Vec<LinkConfig>,
    ) {
        if depth == cfg.0.len() {
            out.push(cfg.clone());
            return;
        }
        for &r in irreps {
            cfg.0[depth] = r;
            let ok = closes_at[depth]
                .iter()
                .all(|&v| vertex_singlet_multiplicity(&geometry.vertex_irreps(v, cfg)) >= 1);
            if ok {
                recurse(depth + 1, cfg, geometry, irreps, closes_at, out);
            }
        }
    }
    if n > 0 {
        recurse(0, &mut cfg, geometry, &irreps, &closes_at, &mut out);
    }
    out
}

/// Configurations connected to the trivial vacuum by nonzero plaquette
/// matrix elements, i.e. global color singlets. Order is preserved.
pub fn global_singlet_filter(configs: &[LinkConfig], geometry: &LatticeGeometry) -> Vec<LinkConfig> {
    let vacuum = LinkConfig::vacuum(geometry.num_links());
    let index: HashMap<&LinkConfig, usize> = configs.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let Some(&start) = index.get(&vacuum) else { return Vec::new() };
    let mut seen = vec![false; configs.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for (j, cfg) in configs.iter().enumerate() {
            if seen[j] {
                continue;
            }
            let connected = (0..geometry.plaquettes.len()).any(|p| {
                let (b, bd) = plaquette_matrix_element(geometry, p, cfg, &configs[i]);
                b.abs() > 1e-12 || bd.abs() > 1e-12
            });
            if connected {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    configs.iter().zip(seen).filter(|(_, s)| *s).map(|(c, _)| c.clone()).collect()
}

/// Drops configurations whose summed link Casimir exceeds `max_casimir`.
pub fn global_casimir_cutoff(configs: &[LinkConfig], max_casimir: Rational64) -> Vec<LinkConfig> {
    configs.iter().filter(|c| c.casimir_sum() <= max_casimir).cloned().collect()
}

/// Global color parity: conjugate every link.
pub fn color_parity_map(cfg: &LinkConfig) -> LinkConfig {
    cfg.conjugate()
}

/// Translation of the periodic two-plaquette strip by one plaquette.
pub fn translation_map(cfg: &LinkConfig) -> LinkConfig {
    let c = &cfg.0;
    LinkConfig(vec![c[3], c[4], c[5], c[0], c[1], c[2]])
}

/// Reflection of the periodic two-plaquette strip exchanging top and bottom
/// rows; vertical links reverse orientation.
pub fn reflection_map(cfg: &LinkConfig) -> LinkConfig {
    let c = &cfg.0;
    LinkConfig(vec![c[2], c[1].conjugate(), c[0], c[5], c[4].conjugate(), c[3]])
}

type SymMap = fn(&LinkConfig) -> LinkConfig;

/// Symmetry-adapted states in `sector`. Each orbit of the abelian group
/// generated by the resolved symmetries gives at most one state,
/// `Σ_g χ(g) g|c>` normalised, so amplitudes are `±1/√k`.
pub fn project_symmetry(
    configs: &[LinkConfig],
    geometry: &LatticeGeometry,
    sector: SymmetrySector,
) -> Result<Vec<GlobalState>> {
    let mut gens: Vec<(SymMap, i8)> = Vec::new();
    if let Some(s) = sector.color_parity {
        gens.push((color_parity_map, s));
    }
    let spatial = sector.translation.is_some() || sector.reflection.is_some();
    if spatial && geometry.kind != GeometryKind::TwoPlaquettePbc {
        return Err(Error::Unsupported("translation/reflection are implemented for the periodic two-plaquette strip".into()));
    }
    if let Some(s) = sector.translation {
        gens.push((translation_map, s));
    }
    if let Some(s) = sector.reflection {
        gens.push((reflection_map, s));
    }
    let members: HashSet<&LinkConfig> = configs.iter().collect();
    let mut done: HashSet<LinkConfig> = HashSet::new();
    let mut out = Vec::new();
    for cfg in configs {
        if done.contains(cfg) {
            continue;
        }
        let mut terms = Vec::new();
        for mask in 0..(1usize << gens.len()) {
            let mut image = cfg.clone();
            let mut character = 1.0;
            for (k, (map, sign)) in gens.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    image = map(&image);
                    character *= f64::from(*sign);
                }
            }
            if !members.contains(&image) {
                return Err(Error::Unsupported(format!("configuration set not closed under symmetry at {image}")));
            }
            done.insert(image.clone());
            terms.push((image, character));
        }
        let mut acc: BTreeMap<LinkConfig, f64> = BTreeMap::new();
        for (c, a) in terms {
            *acc.entry(c).or_insert(0.0) += a;
        }
        if acc.values().any(|a| a.abs() > 1e-12) {
            let mut state = GlobalState::from_terms(acc);
            state.quantum_numbers = sector;
            out.push(state);
        }
    }
    Ok(out)
}

/// One unprojected state per configuration.
pub fn trivial_basis(configs: &[LinkConfig]) -> Vec<GlobalState> {
    configs.iter().cloned().map(GlobalState::single).collect()
}

/// The one-plaquette configuration carrying irrep `r` around the loop.
pub fn one_plaquette_config(r: Irrep) -> LinkConfig {
    LinkConfig(vec![r, r, r.conjugate(), r.conjugate()])
}

/// CSV rows `(state, amplitude, configuration)` for a basis dump.
pub fn basis_rows(states: &[GlobalState]) -> Vec<[String; 3]> {
    let mut rows = Vec::new();
    for (i, s) in states.iter().enumerate() {
        for (c, a) in &s.components {
            rows.push([i.to_string(), format!("{a:.12}"), c.to_string()]);
        }
    }
    rows
}
