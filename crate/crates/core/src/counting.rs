//! Resource-scaling combinatorics for truncated SU(3) links.
//!
//! Vertex counts are over irreps with `p, q <= Λ` and count distinct irrep
//! tuples whose product contains at least one singlet. The multiplicity
//! weighted totals are available separately.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::plaquette_active_me;
use crate::linalg::polyfit;
use crate::su3_irreps::{is_fundamental_step, singlet_multiplicity, tensor_decompose, Direction, Irrep, Truncation};

fn box_irreps(lambda: u32) -> Vec<Irrep> {
    (0..=lambda).flat_map(|p| (0..=lambda).map(move |q| Irrep::new(p, q))).collect()
}

/// Irreps of `a ⊗ b` with multiplicity, by index contraction: `i` pairs of
/// `a`-upper/`b`-lower and `j` pairs of `b`-upper/`a`-lower indices are
/// traced out, then pairs of like indices are traded through the
/// Levi-Civita tensor.
pub fn coleman_irreps(a: Irrep, b: Irrep) -> Vec<Irrep> {
    let mut out = Vec::new();
    for i in 0..=a.p.min(b.q) {
        for j in 0..=b.p.min(a.q) {
            let p = a.p + b.p - i - j;
            let q = a.q + b.q - i - j;
            for k in 0..=(a.p - i).min(b.p - j) {
                out.push(Irrep::new(p - 2 * k, q + k));
            }
            for l in 1..=(a.q - j).min(b.q - i) {
                out.push(Irrep::new(p + l, q - 2 * l));
            }
        }
    }
    out
}

/// Number of irreps, with multiplicity, in `a ⊗ b`, from the closed double sum.
pub fn coleman_count(a: Irrep, b: Irrep) -> u64 {
    let mut n = 0u64;
    for i in 0..=a.p.min(b.q) {
        for j in 0..=b.p.min(a.q) {
            n += 1 + u64::from((a.p - i).min(b.p - j)) + u64::from((a.q - j).min(b.q - i));
        }
    }
    n
}

/// Distinct `(r1, r2, r3)` within the box whose product holds a singlet.
pub fn count_3pt_singlets(lambda: u32) -> u64 {
    let irreps = box_irreps(lambda);
    irreps
        .par_iter()
        .map(|&a| {
            irreps
                .iter()
                .map(|&b| {
                    let mut third: Vec<Irrep> =
                        coleman_irreps(a, b).into_iter().filter(|r| r.p <= lambda && r.q <= lambda).collect();
                    third.sort();
                    third.dedup();
                    third.len() as u64
                })
                .sum::<u64>()
        })
        .sum()
}

/// Same count by direct Littlewood-Richardson decomposition.
pub fn count_3pt_singlets_direct(lambda: u32) -> u64 {
    let irreps = box_irreps(lambda);
    let mut n = 0;
    for &a in &irreps {
        for &b in &irreps {
            n += tensor_decompose(a, b).iter().filter(|(r, _)| r.p <= lambda && r.q <= lambda).count() as u64;
        }
    }
    n
}

/// Total singlet multiplicity over all triples in the box.
pub fn count_3pt_multiplicity(lambda: u32) -> u64 {
    let irreps = box_irreps(lambda);
    let mut n = 0;
    for &a in &irreps {
        for &b in &irreps {
            n += tensor_decompose(a, b).iter().filter(|(r, _)| r.p <= lambda && r.q <= lambda).map(|(_, m)| u64::from(m)).sum::<u64>();
        }
    }
    n
}

/// Bitsets over intermediate irreps `p, q <= 3Λ`.
struct PairTable {
    words: usize,
    direct: Vec<Vec<u64>>,
    conjugate: Vec<Vec<u64>>,
    mult: Vec<Vec<(usize, u32)>>,
}

impl PairTable {
    fn new(lambda: u32) -> Self {
        let irreps = box_irreps(lambda);
        let side = 3 * lambda as usize + 1;
        let words = (side * side).div_ceil(64);
        let index = |r: Irrep| r.p as usize * side + r.q as usize;
        let mut direct = Vec::new();
        let mut conjugate = Vec::new();
        let mut mult = Vec::new();
        for &a in &irreps {
            for &b in &irreps {
                let mut d = vec![0u64; words];
                let mut c = vec![0u64; words];
                let dec = tensor_decompose(a, b);
                for (r, _) in dec.iter() {
                    let i = index(r);
                    d[i / 64] |= 1 << (i % 64);
                    let j = index(r.conjugate());
                    c[j / 64] |= 1 << (j % 64);
                }
                mult.push(dec.iter().map(|(r, m)| (index(r), m)).collect());
                direct.push(d);
                conjugate.push(c);
            }
        }
        PairTable { words, direct, conjugate, mult }
    }
}

/// Distinct `(r1, r2, r3, r4)` within the box whose product holds a
/// singlet, by pairing the decompositions of `r1 ⊗ r2` and `r3 ⊗ r4`.
pub fn count_4pt_singlets(lambda: u32) -> u64 {
    let t = PairTable::new(lambda);
    t.direct
        .par_iter()
        .map(|d| t.conjugate.iter().filter(|c| (0..t.words).any(|w| d[w] & c[w] != 0)).count() as u64)
        .sum()
}

/// Total singlet multiplicity over all 4-tuples in the box.
pub fn count_4pt_multiplicity(lambda: u32) -> u64 {
    let t = PairTable::new(lambda);
    let side = 3 * lambda as usize + 1;
    let conj_index = |i: usize| (i % side) * side + i / side;
    t.mult
        .par_iter()
        .map(|left| {
            t.mult
                .iter()
                .map(|right| {
                    left.iter()
                        .map(|&(i, m)| {
                            let want = conj_index(i);
                            right.iter().find(|(j, _)| *j == want).map_or(0, |&(_, n)| u64::from(m * n))
                        })
                        .sum::<u64>()
                })
                .sum::<u64>()
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlaquetteCount {
    pub states: u64,
    pub nonzero_mes: u64,
}

impl PlaquetteCount {
    pub fn ratio(&self) -> f64 {
        self.nonzero_mes as f64 / self.states as f64
    }
}

/// Physical 8-link single-plaquette neighbourhoods (four controls, four
/// active links, Gauss's law at the four corners) and the number of
/// nonvanishing plaquette matrix elements between them.
pub fn count_plaquette_physical(trunc: &Truncation) -> PlaquetteCount {
    let irreps = trunc.irreps();
    let n = irreps.len();
    // one singlet table per corner, with the conjugations of that corner
    let table = |f: &dyn Fn(Irrep, Irrep, Irrep) -> [Irrep; 3]| -> Vec<bool> {
        let mut t = Vec::with_capacity(n * n * n);
        for &a in &irreps {
            for &b in &irreps {
                for &c in &irreps {
                    t.push(singlet_multiplicity(&f(a, b, c)) > 0);
                }
            }
        }
        t
    };
    let upper_left = table(&|c1, rt, ql| [c1, rt.conjugate(), ql]);
    let upper_right = table(&|rt, c3, qr| [rt, c3.conjugate(), qr]);
    let lower_left = table(&|c2, rb, ql| [c2, rb.conjugate(), ql.conjugate()]);
    let lower_right = table(&|rb, c4, qr| [rb, c4.conjugate(), qr.conjugate()]);
    let at = |t: &[bool], a: usize, b: usize, c: usize| t[(a * n + b) * n + c];
    let physical = |c: [usize; 4], s: [usize; 4]| {
        let [c1, c2, c3, c4] = c;
        let [rb, qr, rt, ql] = s;
        at(&upper_left, c1, rt, ql) && at(&upper_right, rt, c3, qr) && at(&lower_left, c2, rb, ql) && at(&lower_right, rb, c4, qr)
    };
    let outer: Vec<[usize; 2]> = (0..n).flat_map(|a| (0..n).map(move |b| [a, b])).collect();
    let (states, mes) = outer
        .par_iter()
        .map(|&[c1, c2]| {
            let mut states = 0u64;
            let mut mes = 0u64;
            for c3 in 0..n {
                for c4 in 0..n {
                    let c = [c1, c2, c3, c4];
                    let ctrl = c.map(|i| irreps[i]);
                    let active: Vec<[usize; 4]> = (0..n.pow(4))
                        .map(|k| [k / (n * n * n), (k / (n * n)) % n, (k / n) % n, k % n])
                        .filter(|s| physical(c, *s))
                        .collect();
                    states += active.len() as u64;
                    for s_in in &active {
                        let a_in = s_in.map(|i| irreps[i]);
                        for s_out in &active {
                            let a_out = s_out.map(|i| irreps[i]);
                            let steps = is_fundamental_step(a_in[0], a_out[0], Direction::Fund)
                                && is_fundamental_step(a_in[1], a_out[1], Direction::Fund)
                                && is_fundamental_step(a_in[2], a_out[2], Direction::AntiFund)
                                && is_fundamental_step(a_in[3], a_out[3], Direction::AntiFund);
                            if steps && plaquette_active_me(ctrl, a_in, a_out).abs() > 1e-12 {
                                mes += 1;
                            }
                        }
                    }
                }
            }
            (states, mes)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    PlaquetteCount { states, nonzero_mes: mes }
}

/// Rows of `(Λ, count)` with counts strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<(u32, u64)>,
}

impl ScalingTable {
    pub fn new(rows: Vec<(u32, u64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config("cutoffs must be strictly increasing".into()));
        }
        Ok(ScalingTable { rows })
    }

    pub fn from_fn(lambdas: impl IntoIterator<Item = u32>, f: impl Fn(u32) -> u64) -> Result<Self> {
        Self::new(lambdas.into_iter().map(|l| (l, f(l))).collect())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].1 > w[0].1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,count\n");
        for (l, c) in &self.rows {
            s.push_str(&format!("{l},{c}\n"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialFit {
    pub degree: usize,
    /// Lowest order first.
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub fits: Vec<PolynomialFit>,
    /// Degree beyond which adding terms no longer improves the residual.
    pub plateau_degree: usize,
}

/// Least-squares polynomial fits of every degree up to `max_degree`.
///
/// The plateau is the first degree fitting the data to rounding, if any;
/// otherwise the degree whose residual dropped by the largest factor over
/// its predecessor.
pub fn fit_scaling(table: &ScalingTable, max_degree: usize) -> Result<FitReport> {
    let x: Vec<f64> = table.rows.iter().map(|r| f64::from(r.0)).collect();
    let y: Vec<f64> = table.rows.iter().map(|r| r.1 as f64).collect();
    if max_degree + 1 > x.len() {
        return Err(Error::FitWindow(format!("degree {max_degree} needs more than {} points", x.len())));
    }
    let scale = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let fits: Vec<PolynomialFit> = (0..=max_degree)
        .map(|d| {
            let (coefficients, residual) = polyfit(&x, &y, d);
            PolynomialFit { degree: d, coefficients, residual }
        })
        .collect();
    let exact = fits.iter().find(|f| f.residual <= 1e-9 * scale);
    let plateau_degree = match exact {
        Some(f) => f.degree,
        None => (1..fits.len())
            .min_by(|&a, &b| {
                let ra = fits[a].residual / fits[a - 1].residual;
                let rb = fits[b].residual / fits[b - 1].residual;
                ra.total_cmp(&rb)
            })
            .unwrap_or(0),
    };
    Ok(FitReport { fits, plateau_degree })
}

/// `ceil(2 L^D log2(Λ + 1))` logical qubits for a `D`-dimensional lattice
/// of side `L`.
pub fn qubit_estimate(l: u64, d: u32, lambda: u32) -> u64 {
    let v = 2.0 * (l as f64).powi(d as i32) * f64::from(lambda + 1).log2();
    // shave rounding noise before the ceiling
    (v - 1e-9 * v.abs().max(1.0)).ceil().max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_sum_matches_enumeration() {
        for a in box_irreps(3) {
            for b in box_irreps(3) {
                assert_eq!(coleman_irreps(a, b).len() as u64, coleman_count(a, b));
            }
        }
    }

    #[test]
    fn small_vertex_counts() {
        assert_eq!(count_3pt_singlets(0), 1);
        assert_eq!(count_3pt_singlets(1), 19);
        assert_eq!(count_4pt_singlets(1), 82);
    }

    #[test]
    fn qubit_examples() {
        assert_eq!(qubit_estimate(10, 3, 1), 2000);
        assert_eq!(qubit_estimate(10, 3, 0), 0);
        assert_eq!(qubit_estimate(1, 1, 3), 4);
    }

    #[test]
    fn constant_data_fits_at_degree_zero() {
        let t = ScalingTable::new(vec![(0, 5), (1, 5), (2, 5)]).unwrap();
        let r = fit_scaling(&t, 2).unwrap();
        assert_eq!(r.plateau_degree, 0);
        assert!(r.fits[0].residual < 1e-12);
    }
}
