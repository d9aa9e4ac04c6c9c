//! Hand-written reference Hamiltonians and the bases they are written in.
//! Every check returns the largest entrywise deviation, electric and
//! magnetic coefficients compared separately.

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use su3_lgt::gauge_basis::SymmetrySector;
use su3_lgt::hamiltonian::{
    build_hamiltonian, color_parity_reduce, one_plaquette_pq_hamiltonian, HamiltonianOptions,
};
use su3_lgt::{GlobalState, Irrep, LatticeGeometry, LinkConfig, MagneticConstant, OperatorMatrix, Truncation};

use super::{combo, max_dev, real_part};

const S2: f64 = std::f64::consts::SQRT_2;

pub fn cfg(labels: [&str; 6]) -> LinkConfig {
    LinkConfig(labels.iter().map(|l| l.parse().unwrap()).collect())
}

pub fn state(terms: &[(f64, [&str; 6])]) -> GlobalState {
    GlobalState::from_terms(terms.iter().map(|(w, l)| (cfg(*l), *w)))
}

pub fn two_plaquette(states: &[GlobalState]) -> OperatorMatrix {
    let opts = HamiltonianOptions { constant: MagneticConstant::Total(6.0) };
    build_hamiltonian(states, &LatticeGeometry::two_plaquette_pbc(), 1.0, opts).unwrap()
}

/// Returns the electric diagonal and the `1/(2g²)` matrix including the constant.
pub fn coefficient_form(h: &OperatorMatrix) -> (Vec<Rational64>, DMatrix<f64>) {
    (h.electric.clone(), h.magnetic_dense() + DMatrix::identity(h.dim(), h.dim()) * h.constant)
}

pub fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub const A: [&str; 6] = ["3", "3bar", "3bar", "1", "3", "1"];
pub const B: [&str; 6] = ["3bar", "3", "3", "1", "3bar", "1"];
pub const CC: [&str; 6] = ["1", "3", "1", "3", "3bar", "3bar"];
pub const D: [&str; 6] = ["1", "3bar", "1", "3bar", "3", "3"];
pub const P3A: [&str; 6] = ["3", "1", "3bar", "3", "1", "3bar"];
pub const P3B: [&str; 6] = ["3bar", "1", "3", "3bar", "1", "3"];
pub const P4A: [&str; 6] = ["3", "3", "3bar", "3bar", "3bar", "3"];
pub const P4B: [&str; 6] = ["3bar", "3bar", "3", "3", "3", "3bar"];
pub const VAC: [&str; 6] = ["1"; 6];

pub fn sector_states() -> Vec<(SymmetrySector, Vec<GlobalState>)> {
    let s = |w: [f64; 4]| state(&[(w[0], A), (w[1], B), (w[2], CC), (w[3], D)]);
    vec![
        (
            SymmetrySector::new(1, 1, None),
            vec![state(&[(1.0, VAC)]), s([1.0, 1.0, 1.0, 1.0]), state(&[(1.0, P3A), (1.0, P3B)]), state(&[(1.0, P4A), (1.0, P4B)])],
        ),
        (SymmetrySector::new(-1, 1, None), vec![s([1.0, -1.0, 1.0, -1.0]), state(&[(1.0, P3A), (-1.0, P3B)])]),
        (SymmetrySector::new(1, -1, None), vec![s([1.0, 1.0, -1.0, -1.0])]),
        (SymmetrySector::new(-1, -1, None), vec![s([1.0, -1.0, -1.0, 1.0]), state(&[(1.0, P4A), (-1.0, P4B)])]),
    ]
}

pub fn octet_states() -> Vec<GlobalState> {
    let lists: Vec<Vec<[&str; 6]>> = vec![
        vec![VAC],
        vec![A, B, CC, D],
        vec![P3A, P3B],
        vec![["8", "1", "1", "8", "1", "1"], ["1", "1", "8", "1", "1", "8"]],
        vec![P4A, P4B],
        vec![
            ["3", "1", "3bar", "3", "8", "3bar"],
            ["3bar", "1", "3", "3bar", "8", "3"],
            ["3", "8", "3bar", "3", "1", "3bar"],
            ["3bar", "8", "3", "3bar", "1", "3"],
        ],
        vec![
            ["3", "3bar", "3bar", "1", "3", "8"],
            ["3", "3bar", "3bar", "8", "3", "1"],
            ["3bar", "3", "3", "1", "3bar", "8"],
            ["3bar", "3", "3", "8", "3bar", "1"],
            ["1", "3", "8", "3", "3bar", "3bar"],
            ["8", "3", "1", "3", "3bar", "3bar"],
            ["1", "3bar", "8", "3bar", "3", "3"],
            ["8", "3bar", "1", "3bar", "3", "3"],
        ],
        vec![["3", "8", "3bar", "3", "8", "3bar"], ["3bar", "8", "3", "3bar", "8", "3"]],
        vec![
            ["3", "3bar", "3bar", "8", "3", "8"],
            ["3bar", "3", "3", "8", "3bar", "8"],
            ["8", "3", "8", "3", "3bar", "3bar"],
            ["8", "3bar", "8", "3bar", "3", "3"],
        ],
        vec![["8", "1", "8", "8", "1", "8"]],
        vec![["8", "8", "8", "1", "8", "1"], ["1", "8", "1", "8", "8", "8"]],
        vec![["1", "8", "8", "8", "8", "1"], ["8", "8", "1", "1", "8", "8"]],
        vec![["8", "1", "8", "8", "8", "8"], ["8", "8", "8", "8", "1", "8"]],
        vec![
            ["1", "8", "8", "8", "8", "8"],
            ["8", "8", "8", "1", "8", "8"],
            ["8", "8", "1", "8", "8", "8"],
            ["8", "8", "8", "8", "8", "1"],
        ],
        vec![["8"; 6]],
    ];
    lists.iter().map(|l| state(&l.iter().map(|c| (1.0, *c)).collect::<Vec<_>>())).collect()
}

/// `(coefficient of g², coefficient of 1/g²)` in the basis order `perm`.
fn split(h: &OperatorMatrix, perm: &[usize]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = perm.len();
    let e = h.electric_dense() / 2.0;
    let b = (h.magnetic_dense() + DMatrix::identity(h.dim(), h.dim()) * h.constant) / 2.0;
    let pick = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
    (pick(&e), pick(&b))
}

fn position(irreps: &[Irrep], label: &str) -> usize {
    let r: Irrep = label.parse().unwrap();
    irreps.iter().position(|x| *x == r).unwrap()
}

fn rational_dev(a: &[Rational64], b: &[Rational64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).to_f64().unwrap().abs()).fold(0.0, f64::max)
}

pub fn one_plaquette_lambda1() -> f64 {
    let trunc: Truncation = "1,3,3bar,8".parse().unwrap();
    let h = one_plaquette_pq_hamiltonian(&trunc, 1.0).unwrap();
    let irr = trunc.irreps();
    let perm: Vec<usize> = ["1", "3", "3bar", "8"].iter().map(|l| position(&irr, l)).collect();
    let (e, b) = split(&h, &perm);
    let e_ref = real_part(&combo(&[(17.0 / 6.0, "II"), (-1.5, "ZI"), (-1.5, "IZ"), (1.0 / 6.0, "ZZ")]));
    let b_ref =
        real_part(&combo(&[(3.0, "II"), (-0.5, "XI"), (-0.5, "IX"), (-0.25, "XX"), (-0.25, "YY")]));
    max_dev(&e, &e_ref).max(max_dev(&b, &b_ref))
}

/// Three-qubit `{1,3,3bar,8,6,6bar}` Hamiltonian with the free entries on
/// the two unphysical encodings; physical rows and columns must match and
/// the reference must not couple physical states to unphysical ones.
pub fn one_plaquette_three_qubit() -> f64 {
    let trunc: Truncation = "1,3,3bar,8,6,6bar".parse().unwrap();
    let h = one_plaquette_pq_hamiltonian(&trunc, 1.0).unwrap();
    let irr = trunc.irreps();
    let labels = ["1", "3", "3bar", "8", "6", "6bar"];
    let encoding = [0usize, 1, 2, 3, 4, 7];
    let perm: Vec<usize> = labels.iter().map(|l| position(&irr, l)).collect();
    let e = h.electric_dense() / 2.0;
    let b = h.magnetic_dense() / 2.0;
    let e_ref = real_part(&combo(&[
        (14.0 / 3.0, "III"),
        (-11.0 / 6.0, "ZII"),
        (-1.5, "IIZ"),
        (-1.5, "ZZI"),
        (1.0 / 6.0, "IZZ"),
    ]));
    let b_ref = real_part(&combo(&[
        (-0.25, "IIX"),
        (-0.5, "PXI"),
        (-0.25, "IXX"),
        (-0.25, "IYY"),
        (-0.25, "XIX"),
        (-0.25, "ZIX"),
        (-0.25, "YZY"),
        (-0.5, "dbb"),
        (-0.5, "bdd"),
        (-0.5, "XNN"),
    ]));
    let mut worst = 0.0f64;
    for (i, &ei) in encoding.iter().enumerate() {
        for (j, &ej) in encoding.iter().enumerate() {
            worst = worst.max((e[(perm[i], perm[j])] - e_ref[(ei, ej)]).abs());
            worst = worst.max((b[(perm[i], perm[j])] - b_ref[(ei, ej)]).abs());
        }
        for unphysical in [5, 6] {
            worst = worst.max(e_ref[(ei, unphysical)].abs()).max(b_ref[(ei, unphysical)].abs());
        }
    }
    worst
}

pub fn color_parity_one_qubit() -> f64 {
    let h = color_parity_reduce(&one_plaquette_pq_hamiltonian(&Truncation::qutrit(), 1.0).unwrap()).unwrap();
    if h.dim() != 2 {
        return f64::INFINITY;
    }
    let (e, b) = split(&h, &[0, 1]);
    let e_ref = real_part(&combo(&[(4.0 / 3.0, "I"), (-4.0 / 3.0, "Z")]));
    let b_ref = real_part(&combo(&[(11.0 / 4.0, "I"), (0.25, "Z"), (-1.0 / S2, "X")]));
    max_dev(&e, &e_ref).max(max_dev(&b, &b_ref))
}

pub fn color_parity_two_qubit() -> f64 {
    let trunc: Truncation = "1,3,3bar,8,6,6bar".parse().unwrap();
    let h = color_parity_reduce(&one_plaquette_pq_hamiltonian(&trunc, 1.0).unwrap()).unwrap();
    if h.dim() != 4 {
        return f64::INFINITY;
    }
    // identify each reduced state by the irrep on its first link
    let irrep_of = |k: usize| {
        let r = h.basis[k].components[0].0 .0[0];
        if r.p >= r.q { r } else { r.conjugate() }
    };
    let perm: Vec<usize> = ["1", "3", "6", "8"]
        .iter()
        .map(|l| (0..4).find(|&k| irrep_of(k) == l.parse().unwrap()).unwrap())
        .collect();
    let (e, b) = split(&h, &perm);
    let e_ref = real_part(&combo(&[(23.0 / 6.0, "II"), (-2.5, "ZI"), (-0.5, "IZ"), (-5.0 / 6.0, "ZZ")]));
    let b_ref = real_part(&combo(&[
        (-S2 / 2.0, "IX"),
        (-S2 / 2.0, "XN"),
        (-0.25, "XX"),
        (-0.25, "YY"),
        (-0.5, "PN"),
        (3.0, "II"),
    ]));
    max_dev(&e, &e_ref).max(max_dev(&b, &b_ref))
}

/// All four qutrit symmetry sectors of the two-plaquette lattice.
pub fn two_plaquette_qutrit_sectors() -> f64 {
    let refs: Vec<(Vec<Rational64>, Vec<Vec<f64>>)> = vec![
        (
            vec![r(0, 1), r(16, 3), r(16, 3), r(8, 1)],
            vec![
                vec![6.0, -2.0, 0.0, 0.0],
                vec![-2.0, 5.0, -S2 / 9.0, -S2 / 3.0],
                vec![0.0, -S2 / 9.0, 6.0, -2.0 / 3.0],
                vec![0.0, -S2 / 3.0, -2.0 / 3.0, 6.0],
            ],
        ),
        (vec![r(16, 3), r(16, 3)], vec![vec![7.0, -S2 / 9.0], vec![-S2 / 9.0, 6.0]]),
        (vec![r(16, 3)], vec![vec![5.0]]),
        (vec![r(16, 3), r(8, 1)], vec![vec![7.0, -S2 / 3.0], vec![-S2 / 3.0, 6.0]]),
    ];
    let mut worst = 0.0f64;
    for ((_, states), (e_ref, b_ref)) in sector_states().iter().zip(refs) {
        let (e, b) = coefficient_form(&two_plaquette(states));
        let n = b_ref.len();
        let b_ref = DMatrix::from_fn(n, n, |i, j| b_ref[i][j]);
        worst = worst.max(rational_dev(&e, &e_ref)).max(max_dev(&b, &b_ref));
    }
    worst
}

/// The 15-state `{1,3,3bar,8}` basis, down to the `1/(288√2)` entry.
pub fn two_plaquette_octet() -> f64 {
    let h = two_plaquette(&octet_states());
    let e_ref: Vec<Rational64> = [
        (0, 1), (16, 3), (16, 3), (6, 1), (8, 1), (25, 3), (25, 3), (34, 3), (34, 3), (12, 1), (12, 1), (12, 1),
        (15, 1), (15, 1), (18, 1),
    ]
    .iter()
    .map(|&(n, d)| r(n, d))
    .collect();
    let (e, b) = coefficient_form(&h);
    let plaquette_sum: &[((usize, usize), f64)] = &[
        ((0, 1), 2.0),
        ((1, 1), 1.0),
        ((1, 2), S2 / 9.0),
        ((1, 4), S2 / 3.0),
        ((1, 5), 4.0 * S2 / 9.0),
        ((1, 7), 8.0 * S2 / 9.0),
        ((1, 10), S2),
        ((2, 4), 2.0 / 3.0),
        ((2, 6), 4.0 * S2 / 9.0),
        ((2, 8), 8.0 * S2 / 9.0),
        ((3, 6), 1.0 / S2),
        ((4, 5), 2.0 / 3.0),
        ((4, 6), S2 / 3.0),
        ((4, 7), 1.0 / 3.0),
        ((4, 8), 1.0 / (3.0 * S2)),
        ((5, 6), -2.0 * S2 / 9.0),
        ((5, 8), 1.0 / (9.0 * S2)),
        ((6, 6), 0.25),
        ((6, 7), 1.0 / (9.0 * S2)),
        ((6, 11), 1.0 / S2),
        ((6, 13), -1.0 / (2.0 * S2)),
        ((7, 8), 1.0 / (288.0 * S2)),
        ((8, 8), 1.0 / 16.0),
        ((8, 9), 0.25),
        ((8, 10), 1.0 / (4.0 * S2)),
        ((8, 12), -0.25),
        ((8, 13), -1.0 / (4.0 * S2)),
        ((8, 14), 0.125),
    ];
    let mut b_ref = DMatrix::identity(15, 15) * 6.0;
    for &((i, j), v) in plaquette_sum {
        b_ref[(i, j)] -= v;
        if i != j {
            b_ref[(j, i)] -= v;
        }
    }
    rational_dev(&e, &e_ref).max(max_dev(&b, &b_ref))
}

/// Every reference Hamiltonian with its deviation.
pub fn all() -> Vec<(&'static str, f64)> {
    vec![
        ("one plaquette {1,3,3bar,8}", one_plaquette_lambda1()),
        ("one plaquette three-qubit", one_plaquette_three_qubit()),
        ("color parity 1 qubit", color_parity_one_qubit()),
        ("color parity 2 qubits", color_parity_two_qubit()),
        ("two plaquettes qutrit sectors", two_plaquette_qutrit_sectors()),
        ("two plaquettes octet", two_plaquette_octet()),
    ]
}

/// `□ + □†` summed over both plaquettes in the 15-state octet basis.
pub fn octet_plaquette_sum() -> DMatrix<f64> {
    two_plaquette(&octet_states()).plaquette_sum_dense()
}
