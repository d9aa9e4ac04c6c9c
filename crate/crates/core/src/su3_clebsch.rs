//! Gelfand-Tsetlin states, generator matrices, Clebsch-Gordan tensors and
//! 9-R vertex factors.
//!
//! States of `(p, q)` are GT patterns with top row `(p + q, q, 0)`; the
//! middle row `(m12, m22)` and bottom entry `m11` are stored in
//! [`IrrepState::gt`]. Generators are built in the `gl(3)` basis `E_ij`,
//! from which the Hermitian Gell-Mann combinations follow.
//!
//! Clebsch-Gordan tensors are obtained by diagonalising nothing: the highest
//! weight vectors of each output irrep span the kernel of the total raising
//! operators at that weight, and the remaining columns follow by repeated
//! lowering. When an output irrep appears more than once the copies are
//! separated into exchange-symmetric then exchange-antisymmetric vectors (for
//! equal factors) and orthonormalised by Gram-Schmidt seeded with product
//! basis vectors in index order. Each highest-weight vector is phased so its
//! first nonzero entry is positive.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DVector;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat};
use crate::su3_irreps::{tensor_decompose, Irrep};

const RANK_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IrrepState {
    pub irrep: Irrep,
    /// `(m12, m22, m11)`.
    pub gt: [u32; 3],
    twice_t: i32,
    twice_tz: i32,
    thrice_y: i32,
}

impl IrrepState {
    pub fn isospin(&self) -> Rational64 {
        Rational64::new(self.twice_t as i64, 2)
    }

    pub fn isospin_z(&self) -> Rational64 {
        Rational64::new(self.twice_tz as i64, 2)
    }

    pub fn hypercharge(&self) -> Rational64 {
        Rational64::new(self.thrice_y as i64, 3)
    }

    /// Diagonal `(E11, E22, E33)` eigenvalues.
    pub fn occupations(&self) -> [i64; 3] {
        let [m12, m22, m11] = self.gt.map(i64::from);
        let (p, q) = (self.irrep.p as i64, self.irrep.q as i64);
        [m11, m12 + m22 - m11, p + 2 * q - m12 - m22]
    }
}

/// The nine `gl(3)` matrices `E_ij` on one irrep (or its dual).
#[derive(Clone, Debug)]
pub struct Gl3Matrices {
    pub e: [[RMat; 3]; 3],
}

impl Gl3Matrices {
    pub fn dim(&self) -> usize {
        self.e[0][0].nrows()
    }

    /// Matrices of the contragredient representation, `E_ij -> -E_ji`.
    pub fn dual(&self) -> Gl3Matrices {
        let e = std::array::from_fn(|i| std::array::from_fn(|j| -self.e[j][i].clone()));
        Gl3Matrices { e }
    }

    /// `(E11 - E22, E22 - E33)` weight of basis vector `k`.
    pub fn weight(&self, k: usize) -> (i64, i64) {
        let d = |i: usize| self.e[i][i][(k, k)].round() as i64;
        (d(0) - d(1), d(1) - d(2))
    }
}

/// Hermitian Gell-Mann generators `F_1..F_8` of one irrep.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub irrep: Irrep,
    pub mats: Vec<CMat>,
}

impl GeneratorSet {
    /// `Σ_b F_b F_b`.
    pub fn casimir_matrix(&self) -> CMat {
        let d = self.mats[0].nrows();
        self.mats.iter().fold(CMat::zeros(d, d), |acc, f| acc + f * f)
    }
}

struct IrrepData {
    states: Vec<IrrepState>,
    gl3: Gl3Matrices,
}

fn gt_states(r: Irrep) -> Vec<IrrepState> {
    let (m13, m23) = (r.p + r.q, r.q);
    let mut out = Vec::new();
    for m12 in m23..=m13 {
        for m22 in 0..=m23 {
            for m11 in m22..=m12 {
                let mut s = IrrepState { irrep: r, gt: [m12, m22, m11], twice_t: 0, twice_tz: 0, thrice_y: 0 };
                let [e11, e22, e33] = s.occupations();
                s.twice_t = (m12 - m22) as i32;
                s.twice_tz = (e11 - e22) as i32;
                s.thrice_y = (e11 + e22 - 2 * e33) as i32;
                out.push(s);
            }
        }
    }
    out.sort_by_key(|s| (-s.thrice_y, -s.twice_t, -s.twice_tz));
    out
}

fn build_irrep(r: Irrep) -> IrrepData {
    let states = gt_states(r);
    let d = states.len();
    let index: HashMap<[u32; 3], usize> = states.iter().enumerate().map(|(i, s)| (s.gt, i)).collect();
    let zero = || RMat::zeros(d, d);
    let mut e: [[RMat; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| zero()));
    for (k, s) in states.iter().enumerate() {
        let occ = s.occupations();
        for i in 0..3 {
            e[i][i][(k, k)] = occ[i] as f64;
        }
    }
    let (m13, m23, m33) = ((r.p + r.q) as i64, r.q as i64, 0_i64);
    for (k, s) in states.iter().enumerate() {
        let [m12, m22, m11] = s.gt.map(i64::from);
        if let Some(&to) = index.get(&[s.gt[0], s.gt[1], s.gt[2] + 1]) {
            e[0][1][(to, k)] = (((m12 - m11) * (m11 - m22 + 1)) as f64).sqrt();
        }
        // E23 raises one entry of the middle row.
        let l3 = [m13 - 1, m23 - 2, m33 - 3];
        let l2 = [m12 - 1, m22 - 2];
        let l1 = m11 - 1;
        for j in 0..2 {
            let mut gt = s.gt;
            gt[j] += 1;
            let Some(&to) = index.get(&gt) else { continue };
            let mut num = -1_i64;
            for v in l3 {
                num *= v - l2[j];
            }
            num *= l1 - l2[j] - 1;
            let i = 1 - j;
            let den = (l2[i] - l2[j]) * (l2[i] - l2[j] - 1);
            let val = num as f64 / den as f64;
            debug_assert!(val >= -1e-12);
            e[1][2][(to, k)] = val.max(0.0).sqrt();
        }
    }
    e[1][0] = e[0][1].transpose();
    e[2][1] = e[1][2].transpose();
    e[0][2] = &e[0][1] * &e[1][2] - &e[1][2] * &e[0][1];
    e[2][0] = e[0][2].transpose();
    IrrepData { states, gl3: Gl3Matrices { e } }
}

fn irrep_data(r: Irrep) -> Arc<IrrepData> {
    static CACHE: OnceLock<RwLock<HashMap<Irrep, Arc<IrrepData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.read().expect("irrep cache poisoned").get(&r) {
        return d.clone();
    }
    let built = Arc::new(build_irrep(r));
    cache.write().expect("irrep cache poisoned").entry(r).or_insert(built).clone()
}

/// GT states ordered by descending hypercharge, isospin, isospin projection.
pub fn enumerate_states(r: Irrep) -> Vec<IrrepState> {
    irrep_data(r).states.clone()
}

pub fn gl3_matrices(r: Irrep) -> Gl3Matrices {
    irrep_data(r).gl3.clone()
}

pub fn generators(r: Irrep) -> GeneratorSet {
    let e = &irrep_data(r).gl3.e;
    let c = |m: &RMat| m.map(|x| Complex64::new(x, 0.0));
    let i = Complex64::new(0.0, 1.0);
    let sym = |a: usize, b: usize| c(&(&e[a][b] + &e[b][a])) * Complex64::new(0.5, 0.0);
    let asym = |a: usize, b: usize| c(&(&e[a][b] - &e[b][a])) * (-i * 0.5);
    let mats = vec![
        sym(0, 1),
        asym(0, 1),
        c(&(&e[0][0] - &e[1][1])) * Complex64::new(0.5, 0.0),
        sym(0, 2),
        asym(0, 2),
        sym(1, 2),
        asym(1, 2),
        c(&(&e[0][0] + &e[1][1] - &e[2][2] * 2.0)) * Complex64::new(0.5 / 3f64.sqrt(), 0.0),
    ];
    GeneratorSet { irrep: r, mats }
}

/// One factor of a product: an irrep, optionally in its dual (conjugate)
/// basis where `E_ij` acts as `-E_ji`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RepSpec {
    pub irrep: Irrep,
    pub dual: bool,
}

impl RepSpec {
    pub fn plain(irrep: Irrep) -> Self {
        RepSpec { irrep, dual: false }
    }

    pub fn dual(irrep: Irrep) -> Self {
        RepSpec { irrep, dual: true }
    }

    fn gl3(&self) -> Gl3Matrices {
        let m = gl3_matrices(self.irrep);
        if self.dual {
            m.dual()
        } else {
            m
        }
    }
}

/// Coefficients `<R1 a; R2 b | R' m>_γ`, stored densely as `[a][b][m]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CGTensor {
    pub r1: Irrep,
    pub r2: Irrep,
    pub r_out: Irrep,
    pub gamma: usize,
    pub dims: [usize; 3],
    pub coeffs: Vec<f64>,
}

impl CGTensor {
    #[inline]
    pub fn get(&self, a: usize, b: usize, m: usize) -> f64 {
        self.coeffs[(a * self.dims[1] + b) * self.dims[2] + m]
    }

    pub fn squared_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// The `dim(R1)·dim(R2) × dim(R')` isometry as a matrix.
    pub fn as_matrix(&self) -> RMat {
        RMat::from_row_slice(self.dims[0] * self.dims[1], self.dims[2], &self.coeffs)
    }

    /// Key `p1,q1|p2,q2|pout,qout|gamma` used by [`cg_dump_json`].
    pub fn key(&self) -> String {
        format!("{}|{}|{}|{}", self.r1, self.r2, self.r_out, self.gamma)
    }
}

/// `(A ⊗ 1 + 1 ⊗ B) v` for `v` indexed as `a * dB + b`.
fn apply_total(a: &RMat, b: &RMat, v: &[f64]) -> Vec<f64> {
    let vm = RMat::from_row_slice(a.ncols(), b.ncols(), v);
    let r = a * &vm + &vm * b.transpose();
    r.transpose().as_slice().to_vec()
}

fn fix_phase(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Seeded Gram-Schmidt over `candidates(k)` for `k` in index order, stopping
/// after `rank` vectors.
fn seeded_gram_schmidt(full: usize, rank: usize, candidate: impl Fn(usize) -> Vec<f64>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for k in 0..full {
        if out.len() == rank {
            break;
        }
        let mut v = candidate(k);
        for u in &out {
            let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
    }
    assert_eq!(out.len(), rank, "Gram-Schmidt failed to span the highest-weight space");
    out
}

/// All CG tensors coupling `a ⊗ b` to `target`, one per multiplicity copy.
pub fn couple(a: RepSpec, b: RepSpec, target: Irrep) -> Vec<CGTensor> {
    type Key = (RepSpec, RepSpec, Irrep);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<Vec<CGTensor>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (a, b, target);
    if let Some(v) = cache.read().expect("cg cache poisoned").get(&key) {
        return v.as_ref().clone();
    }
    let built = Arc::new(build_couple(a, b, target));
    let stored = cache.write().expect("cg cache poisoned").entry(key).or_insert(built).clone();
    stored.as_ref().clone()
}

fn build_couple(a: RepSpec, b: RepSpec, target: Irrep) -> Vec<CGTensor> {
    let ea = a.gl3();
    let eb = b.gl3();
    let (da, db) = (ea.dim(), eb.dim());
    let full = da * db;
    let hw = (target.p as i64, target.q as i64);
    let ids: Vec<usize> = (0..full)
        .filter(|&k| {
            let (wa, wb) = (ea.weight(k / db), eb.weight(k % db));
            (wa.0 + wb.0, wa.1 + wb.1) == hw
        })
        .collect();
    if ids.is_empty() {
        return Vec::new();
    }
    // Kernel of the raising operators restricted to the target weight.
    let m = ids.len();
    let mut amat = RMat::zeros(2 * full, m);
    for (c, &k) in ids.iter().enumerate() {
        let mut unit = vec![0.0; full];
        unit[k] = 1.0;
        let r12 = apply_total(&ea.e[0][1], &eb.e[0][1], &unit);
        let r23 = apply_total(&ea.e[1][2], &eb.e[1][2], &unit);
        for i in 0..full {
            amat[(i, c)] = r12[i];
            amat[(full + i, c)] = r23[i];
        }
    }
    let svd = amat.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let null_rows: Vec<usize> = (0..m).filter(|&i| svd.singular_values[i] < RANK_TOL).collect();
    if null_rows.is_empty() {
        return Vec::new();
    }
    // Embedded kernel basis N (full × r); projector columns are N · N[k, :].
    let mut nf = RMat::zeros(full, null_rows.len());
    for (c, &row) in null_rows.iter().enumerate() {
        for (j, &k) in ids.iter().enumerate() {
            nf[(k, c)] = vt[(row, j)];
        }
    }
    let proj_col = |k: usize| -> Vec<f64> {
        let row = nf.row(k).transpose();
        (&nf * row).as_slice().to_vec()
    };
    let swap = |v: &[f64]| -> Vec<f64> { (0..full).map(|k| v[(k % db) * db + k / db]).collect() };
    let mut highest: Vec<Vec<f64>> = Vec::new();
    if a == b {
        for sign in [1.0, -1.0] {
            let col = |k: usize| -> Vec<f64> {
                let v = proj_col(k);
                let s = swap(&v);
                v.iter().zip(&s).map(|(x, y)| 0.5 * (x + sign * y)).collect()
            };
            let trace: f64 = (0..full).map(|k| col(k)[k]).sum();
            let rank = trace.round() as usize;
            if rank > 0 {
                highest.extend(seeded_gram_schmidt(full, rank, col));
            }
        }
    } else {
        highest = seeded_gram_schmidt(full, null_rows.len(), proj_col);
    }
    let target_data = irrep_data(target);
    let er = &target_data.gl3.e;
    let states = &target_data.states;
    let d = states.len();
    let hw_index = states
        .iter()
        .position(|s| s.gt == [target.p + target.q, target.q, target.p + target.q])
        .expect("highest-weight pattern present");
    let hw_occ = states[hw_index].occupations();
    let depth: Vec<usize> = states
        .iter()
        .map(|s| {
            let o = s.occupations();
            ((hw_occ[0] - o[0]) + (o[2] - hw_occ[2])) as usize
        })
        .collect();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let lowering = [(1usize, 0usize), (2usize, 1usize)];
    let mut out = Vec::new();
    for (gamma, mut v) in highest.into_iter().enumerate() {
        fix_phase(&mut v);
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); d];
        cols[hw_index] = v;
        for level in 1..=max_depth {
            let prev: Vec<usize> = (0..d).filter(|&i| depth[i] == level - 1).collect();
            let cur: Vec<usize> = (0..d).filter(|&i| depth[i] == level).collect();
            let nrows = prev.len() * lowering.len();
            let mut lhs = RMat::zeros(nrows, cur.len());
            let mut rhs = RMat::zeros(nrows, full);
            let mut row = 0;
            for &n in &prev {
                for &(i, j) in &lowering {
                    for (c, &s) in cur.iter().enumerate() {
                        lhs[(row, c)] = er[i][j][(s, n)];
                    }
                    let lowered = apply_total(&ea.e[i][j], &eb.e[i][j], &cols[n]);
                    for (k, x) in lowered.into_iter().enumerate() {
                        rhs[(row, k)] = x;
                    }
                    row += 1;
                }
            }
            let svd = lhs.clone().svd(true, true);
            assert!(
                svd.singular_values.iter().all(|&s| s > 1e-9),
                "lowering system rank deficient for {target}"
            );
            let x = svd.solve(&rhs, 1e-12).expect("SVD solve with both factors computed");
            let resid = (&lhs * &x - &rhs).abs().max();
            assert!(resid < 1e-8, "lowering system inconsistent for {target}: {resid}");
            for (c, &s) in cur.iter().enumerate() {
                cols[s] = x.row(c).iter().copied().collect();
            }
        }
        let mut coeffs = vec![0.0; full * d];
        for (m, col) in cols.iter().enumerate() {
            for (k, &x) in col.iter().enumerate() {
                coeffs[k * d + m] = if x.abs() < ZERO_TOL { 0.0 } else { x };
            }
        }
        out.push(CGTensor { r1: a.irrep, r2: b.irrep, r_out: target, gamma, dims: [da, db, d], coeffs });
    }
    out
}

/// Every CG tensor of `r1 ⊗ r2`, ordered by output irrep then multiplicity.
pub fn cg_decompose(r1: Irrep, r2: Irrep) -> Vec<CGTensor> {
    let mut out = Vec::new();
    for (r, mult) in tensor_decompose(r1, r2).iter() {
        let tensors = couple(RepSpec::plain(r1), RepSpec::plain(r2), r);
        assert_eq!(tensors.len(), mult as usize, "multiplicity mismatch for {r1} x {r2} -> {r}");
        out.extend(tensors);
    }
    out
}

/// CG tensors of `r1 ⊗ r2 → r_out` (empty when forbidden).
pub fn cg(r1: Irrep, r2: Irrep, r_out: Irrep) -> Vec<CGTensor> {
    couple(RepSpec::plain(r1), RepSpec::plain(r2), r_out)
}

/// JSON object keyed by [`CGTensor::key`], each value a nested `[a][b][m]`
/// array.
pub fn cg_dump_json(tensors: &[CGTensor]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for t in tensors {
        let [da, db, dm] = t.dims;
        let nested: Vec<Vec<Vec<f64>>> =
            (0..da).map(|a| (0..db).map(|b| (0..dm).map(|m| t.get(a, b, m)).collect()).collect()).collect();
        map.insert(t.key(), serde_json::json!(nested));
    }
    serde_json::Value::Object(map)
}

/// How repeated output irreps are split into multiplicity copies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MultiplicityConvention {
    /// Exchange-symmetric copies first for equal factors, seeded
    /// Gram-Schmidt otherwise.
    #[default]
    SymmetricFirst,
}

/// 9-R symbol with slots laid out row by row as
/// `{A, B, C; M, 1, M; D, B, E}`, where `M` is `3` or `3bar`.
pub fn nine_r(slots: [Irrep; 9], _convention: MultiplicityConvention) -> Result<f64> {
    let [a, b, c, m, one, m2, d, b2, e] = slots;
    if one != Irrep::SINGLET || m != m2 || b != b2 || !(m == Irrep::TRIPLET || m == Irrep::ANTI_TRIPLET) {
        return Err(Error::NineRPattern(format!("{slots:?}")));
    }
    Ok(nine_r6(a, b, c, m, d, e))
}

/// Compact form of [`nine_r`]:
/// `Σ <D u; B x|E v> <A y; B x|C q> <A y; M c|D u> <C q; M c|E v>`,
/// summed over all component and multiplicity indices.
pub fn nine_r6(a: Irrep, b: Irrep, c: Irrep, m: Irrep, d: Irrep, e: Irrep) -> f64 {
    type Key = [Irrep; 6];
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = [a, b, c, m, d, e];
    if let Some(v) = cache.read().expect("9-R cache poisoned").get(&key) {
        return *v;
    }
    let value = compute_nine_r(a, b, c, m, d, e);
    cache.write().expect("9-R cache poisoned").insert(key, value);
    value
}

/// Sum of all multiplicity copies; the 9-R contraction is linear in each.
fn summed(tensors: Vec<CGTensor>) -> Option<CGTensor> {
    let mut it = tensors.into_iter();
    let mut acc = it.next()?;
    for t in it {
        acc.coeffs.iter_mut().zip(&t.coeffs).for_each(|(x, y)| *x += y);
    }
    Some(acc)
}

fn compute_nine_r(a: Irrep, b: Irrep, c: Irrep, m: Irrep, d: Irrep, e: Irrep) -> f64 {
    let (Some(c1), Some(c2), Some(c3), Some(c4)) =
        (summed(cg(d, b, e)), summed(cg(a, b, c)), summed(cg(a, m, d)), summed(cg(c, m, e)))
    else {
        return 0.0;
    };
    let (da, db, dc, dm, dd, de) = (c2.dims[0], c2.dims[1], c2.dims[2], c3.dims[1], c1.dims[0], c1.dims[2]);
    // W[y, q, u, v] = Σ_x c2[y, x, q] c1[u, x, v]
    let widx = |y: usize, q: usize, u: usize, v: usize| ((y * dc + q) * dd + u) * de + v;
    let mut w = vec![0.0; da * dc * dd * de];
    for y in 0..da {
        for x in 0..db {
            for q in 0..dc {
                let v2 = c2.get(y, x, q);
                if v2 == 0.0 {
                    continue;
                }
                for u in 0..dd {
                    for v in 0..de {
                        let v1 = c1.get(u, x, v);
                        if v1 != 0.0 {
                            w[widx(y, q, u, v)] += v2 * v1;
                        }
                    }
                }
            }
        }
    }
    let mut total = 0.0;
    for y in 0..da {
        for cc in 0..dm {
            for u in 0..dd {
                let v3 = c3.get(y, cc, u);
                if v3 == 0.0 {
                    continue;
                }
                for q in 0..dc {
                    for v in 0..de {
                        let v4 = c4.get(q, cc, v);
                        if v4 != 0.0 {
                            total += v3 * v4 * w[widx(y, q, u, v)];
                        }
                    }
                }
            }
        }
    }
    total
}

/// Dense vector of CG column `m` (useful for tests and oracles).
pub fn cg_column(t: &CGTensor, m: usize) -> DVector<f64> {
    let [da, db, _] = t.dims;
    DVector::from_iterator(da * db, (0..da * db).map(|k| t.get(k / db, k % db, m)))
}
