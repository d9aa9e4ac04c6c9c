//! SU(3) irrep labels and exact tensor-product arithmetic.
//!
//! An irrep `(p, q)` has `p` fundamental and `q` antifundamental indices.
//! Products are decomposed with the Littlewood-Richardson rule on the
//! three-row Young diagram `(p + q, q, 0)`, so every multiplicity is an exact
//! integer.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Irrep {
    pub p: u32,
    pub q: u32,
}

/// Which elementary triplet a link operator multiplies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Fund,
    AntiFund,
}

impl Direction {
    pub fn irrep(self) -> Irrep {
        match self {
            Direction::Fund => Irrep::TRIPLET,
            Direction::AntiFund => Irrep::ANTI_TRIPLET,
        }
    }

    pub fn reverse(self) -> Direction {
        match self {
            Direction::Fund => Direction::AntiFund,
            Direction::AntiFund => Direction::Fund,
        }
    }
}

impl Irrep {
    pub const SINGLET: Irrep = Irrep { p: 0, q: 0 };
    pub const TRIPLET: Irrep = Irrep { p: 1, q: 0 };
    pub const ANTI_TRIPLET: Irrep = Irrep { p: 0, q: 1 };
    pub const OCTET: Irrep = Irrep { p: 1, q: 1 };
    pub const SEXTET: Irrep = Irrep { p: 2, q: 0 };
    pub const ANTI_SEXTET: Irrep = Irrep { p: 0, q: 2 };

    pub const fn new(p: u32, q: u32) -> Self {
        Irrep { p, q }
    }

    pub fn dimension(self) -> u64 {
        let (p, q) = (self.p as u64, self.q as u64);
        (p + 1) * (q + 1) * (p + q + 2) / 2
    }

    /// Three times the quadratic Casimir, an integer.
    pub fn casimir_times_3(self) -> u64 {
        let (p, q) = (self.p as u64, self.q as u64);
        p * p + q * q + p * q + 3 * p + 3 * q
    }

    pub fn casimir(self) -> Rational64 {
        Rational64::new(self.casimir_times_3() as i64, 3)
    }

    pub fn casimir_f64(self) -> f64 {
        self.casimir_times_3() as f64 / 3.0
    }

    pub fn conjugate(self) -> Irrep {
        Irrep { p: self.q, q: self.p }
    }

    pub fn is_real(self) -> bool {
        self.p == self.q
    }

    /// Dimension label such as `8`, `3bar`, `6bar`.
    pub fn label(self) -> String {
        let bar = if self.q > self.p { "bar" } else { "" };
        format!("{}{}", self.dimension(), bar)
    }
}

impl Ord for Irrep {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.casimir_times_3(), self.p, self.q).cmp(&(other.casimir_times_3(), other.p, other.q))
    }
}

impl PartialOrd for Irrep {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

impl FromStr for Irrep {
    type Err = Error;

    /// Accepts `p,q`, `(p,q)`, `p:q` or a dimension label (`3bar`, `8`, ...).
    /// Dimension labels resolve to the lowest-Casimir irrep carrying them.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if let Some((a, b)) = t.split_once(|c| c == ',' || c == ':') {
            let p = a.trim().parse().map_err(|_| Error::IrrepParse(s.into()))?;
            let q = b.trim().parse().map_err(|_| Error::IrrepParse(s.into()))?;
            return Ok(Irrep::new(p, q));
        }
        let lower = t.to_ascii_lowercase();
        let mut candidates: Vec<Irrep> =
            (0..=40).flat_map(|p| (0..=40).map(move |q| Irrep::new(p, q))).collect();
        candidates.sort();
        candidates
            .into_iter()
            .find(|r| r.label() == lower)
            .ok_or_else(|| Error::IrrepParse(s.into()))
    }
}

/// Irreps with positive multiplicities, iterated in irrep order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepMultiset {
    entries: BTreeMap<Irrep, u32>,
}

impl IrrepMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, r: Irrep, mult: u32) {
        if mult > 0 {
            *self.entries.entry(r).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, r: Irrep) -> u32 {
        self.entries.get(&r).copied().unwrap_or(0)
    }

    pub fn contains(&self, r: Irrep) -> bool {
        self.multiplicity(r) > 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Irrep, u32)> + '_ {
        self.entries.iter().map(|(r, m)| (*r, *m))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_dimension(&self) -> u64 {
        self.iter().map(|(r, m)| r.dimension() * m as u64).sum()
    }

    pub fn conjugate(&self) -> Self {
        let mut out = Self::new();
        for (r, m) in self.iter() {
            out.add(r.conjugate(), m);
        }
        out
    }
}

impl FromIterator<(Irrep, u32)> for IrrepMultiset {
    fn from_iter<T: IntoIterator<Item = (Irrep, u32)>>(iter: T) -> Self {
        let mut out = Self::new();
        for (r, m) in iter {
            out.add(r, m);
        }
        out
    }
}

/// Allowed link irreps: `p <= lambda_p`, `q <= lambda_q`, and, if present,
/// membership in an explicit allow-list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub lambda_p: u32,
    pub lambda_q: u32,
    pub allow: Option<Vec<Irrep>>,
}

impl Truncation {
    pub fn lambda(l: u32) -> Self {
        Truncation { lambda_p: l, lambda_q: l, allow: None }
    }

    pub fn from_list(irreps: &[Irrep]) -> Self {
        let mut allow: Vec<Irrep> = irreps.to_vec();
        allow.sort();
        allow.dedup();
        let lambda_p = allow.iter().map(|r| r.p).max().unwrap_or(0);
        let lambda_q = allow.iter().map(|r| r.q).max().unwrap_or(0);
        Truncation { lambda_p, lambda_q, allow: Some(allow) }
    }

    /// The `{1, 3, 3bar}` truncation used for qutrit encodings.
    pub fn qutrit() -> Self {
        Self::from_list(&[Irrep::SINGLET, Irrep::TRIPLET, Irrep::ANTI_TRIPLET])
    }

    pub fn admits(&self, r: Irrep) -> bool {
        r.p <= self.lambda_p
            && r.q <= self.lambda_q
            && self.allow.as_ref().map_or(true, |a| a.contains(&r))
    }

    /// Admitted irreps in irrep order.
    pub fn irreps(&self) -> Vec<Irrep> {
        let mut out: Vec<Irrep> = (0..=self.lambda_p)
            .flat_map(|p| (0..=self.lambda_q).map(move |q| Irrep::new(p, q)))
            .filter(|r| self.admits(*r))
            .collect();
        out.sort();
        out
    }

    pub fn conjugate(&self) -> Self {
        Truncation {
            lambda_p: self.lambda_q,
            lambda_q: self.lambda_p,
            allow: self.allow.as_ref().map(|a| {
                let mut c: Vec<Irrep> = a.iter().map(|r| r.conjugate()).collect();
                c.sort();
                c
            }),
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.allow {
            Some(a) => {
                let labels: Vec<String> = a.iter().map(|r| r.label()).collect();
                write!(f, "{{{}}}", labels.join(","))
            }
            None => write!(f, "lambda={},{}", self.lambda_p, self.lambda_q),
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;

    /// `3` means Λp = Λq = 3; otherwise a comma-separated irrep list using
    /// dimension labels or `p:q` tokens, e.g. `1,3,3bar,8`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().trim_start_matches("lambda=");
        if let Ok(l) = t.parse::<u32>() {
            return Ok(Truncation::lambda(l));
        }
        let list = t
            .trim_start_matches('{')
            .trim_end_matches('}')
            .split(',')
            .map(|tok| tok.trim().parse::<Irrep>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Error::Config(format!("bad truncation `{s}`")))?;
        if list.is_empty() {
            return Err(Error::Config(format!("empty truncation `{s}`")));
        }
        Ok(Truncation::from_list(&list))
    }
}

pub fn dimension(r: Irrep) -> u64 {
    r.dimension()
}

pub fn casimir(r: Irrep) -> Rational64 {
    r.casimir()
}

pub fn conjugate(r: Irrep) -> Irrep {
    r.conjugate()
}

/// Candidate irreps reached from `r` by one triplet index, before pruning.
fn fundamental_step(r: Irrep, direction: Direction) -> [(i64, i64); 3] {
    let (p, q) = (r.p as i64, r.q as i64);
    match direction {
        Direction::Fund => [(p + 1, q), (p - 1, q + 1), (p, q - 1)],
        Direction::AntiFund => [(p, q + 1), (p + 1, q - 1), (p - 1, q)],
    }
}

/// `r ⊗ 3` or `r ⊗ 3bar`, each surviving term with multiplicity one.
pub fn tensor_fundamental(r: Irrep, direction: Direction) -> IrrepMultiset {
    fundamental_step(r, direction)
        .into_iter()
        .filter(|&(p, q)| p >= 0 && q >= 0)
        .map(|(p, q)| (Irrep::new(p as u32, q as u32), 1))
        .collect()
}

/// Whether `to` appears in `from ⊗ 3` (Fund) or `from ⊗ 3bar` (AntiFund).
pub fn is_fundamental_step(from: Irrep, to: Irrep, direction: Direction) -> bool {
    fundamental_step(from, direction)
        .iter()
        .any(|&(p, q)| p == to.p as i64 && q == to.q as i64)
}

/// Littlewood-Richardson decomposition of `r1 ⊗ r2`.
pub fn tensor_decompose(r1: Irrep, r2: Irrep) -> IrrepMultiset {
    let lam = [r1.p + r1.q, r1.q];
    let mu1 = r2.p + r2.q;
    let mu2 = r2.q;
    let mut out = IrrepMultiset::new();
    // a_i: boxes labelled `a` added to row i; they form a horizontal strip.
    for a2 in 0..=(lam[0] - lam[1]).min(mu1) {
        for a3 in 0..=lam[1].min(mu1 - a2) {
            let a1 = mu1 - a2 - a3;
            let kappa = [lam[0] + a1, lam[1] + a2, a3];
            // b boxes: none in row 1, a horizontal strip on kappa, and the
            // reverse reading word must stay a lattice word.
            for b2 in 0..=(kappa[0] - kappa[1]).min(mu2).min(a1) {
                let b3 = mu2 - b2;
                if b3 > kappa[1] - kappa[2] || b2 + b3 > a1 + a2 {
                    continue;
                }
                let nu = [kappa[0], kappa[1] + b2, kappa[2] + b3];
                out.add(Irrep::new(nu[0] - nu[1], nu[1] - nu[2]), 1);
            }
        }
    }
    out
}

/// Multiplicity of the singlet in the tensor product of all `irreps`.
pub fn singlet_multiplicity(irreps: &[Irrep]) -> u64 {
    match irreps {
        [] => 1,
        [r] => u64::from(*r == Irrep::SINGLET),
        [a, b] => u64::from(*a == b.conjugate()),
        _ => {
            // Fold all but the last factor, then count copies of its conjugate.
            let (last, rest) = irreps.split_last().expect("nonempty");
            let mut acc: BTreeMap<Irrep, u64> = BTreeMap::new();
            acc.insert(rest[0], 1);
            for r in &rest[1..] {
                let mut next = BTreeMap::new();
                for (x, m) in &acc {
                    for (y, n) in tensor_decompose(*x, *r).iter() {
                        *next.entry(y).or_insert(0) += m * n as u64;
                    }
                }
                acc = next;
            }
            acc.get(&last.conjugate()).copied().unwrap_or(0)
        }
    }
}

/// Directed edges out of `r` generated by one triplet or antitriplet step,
/// restricted to irreps admitted by `trunc`.
pub fn hex_neighbors(r: Irrep, trunc: &Truncation) -> Vec<(Irrep, Direction)> {
    let mut out = Vec::new();
    for dir in [Direction::Fund, Direction::AntiFund] {
        for (s, _) in tensor_fundamental(r, dir).iter() {
            if trunc.admits(s) {
                out.push((s, dir));
            }
        }
    }
    out
}
