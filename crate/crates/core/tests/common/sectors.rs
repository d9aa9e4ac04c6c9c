//! Reference generator terms for the eight qutrit control-sector classes.

use std::collections::BTreeMap;

use su3_lgt::local_plaquette::{build_sector_generator, ControlSector, ModePair};
use su3_lgt::{Irrep, Truncation};

const ONE: Irrep = Irrep::SINGLET;
const TRI: Irrep = Irrep::TRIPLET;
const BAR: Irrep = Irrep::ANTI_TRIPLET;

pub type SectorTable = Vec<([Irrep; 4], Vec<(&'static str, f64)>)>;

pub fn reference() -> SectorTable {
    let r3 = 3f64.sqrt();
    vec![
        ([ONE, ONE, ONE, ONE], vec![("X01X01X02X02", 1.0), ("X02X02X01X01", 1.0), ("X12X12X12X12", 1.0)]),
        (
            [ONE, ONE, TRI, BAR],
            vec![("X02X01X01X01", 1.0 / 3.0), ("X01X12X02X02", 1.0 / r3), ("X12X02X12X12", 1.0 / r3)],
        ),
        (
            [ONE, TRI, ONE, TRI],
            vec![("X01X02X01X01", 1.0 / 3.0), ("X12X01X02X02", 1.0 / r3), ("X02X12X12X12", 1.0 / r3)],
        ),
        (
            [ONE, TRI, TRI, ONE],
            vec![("X01X01X01X01", 1.0 / 3.0), ("X12X12X02X02", -1.0 / r3), ("X02X02X12X12", -1.0 / r3)],
        ),
        (
            [ONE, TRI, BAR, BAR],
            vec![("X01X12X01X01", -1.0 / 3.0), ("X12X02X02X02", -1.0 / 3.0), ("X02X01X12X12", 1.0 / 3.0)],
        ),
        (
            [TRI, TRI, TRI, TRI],
            vec![("X01X02X12X01", 1.0 / (3.0 * r3)), ("X12X01X01X02", 1.0 / (3.0 * r3)), ("X02X12X02X12", 1.0 / 3.0)],
        ),
        (
            [TRI, BAR, TRI, BAR],
            vec![("X12X02X12X01", 1.0 / 3.0), ("X02X01X01X02", 1.0 / 9.0), ("X01X12X02X12", 1.0 / 3.0)],
        ),
        (
            [TRI, BAR, BAR, TRI],
            vec![("X12X01X12X01", 1.0 / 3.0), ("X02X12X01X02", 1.0 / (3.0 * r3)), ("X01X02X02X12", 1.0 / (3.0 * r3))],
        ),
    ]
}

/// Built generator terms keyed by their mode-string label.
pub fn built_terms(sector: [Irrep; 4]) -> BTreeMap<String, f64> {
    let gen = build_sector_generator(&ControlSector(sector), &Truncation::qutrit()).unwrap();
    gen.terms.iter().map(|t| (t.pairs.iter().map(ModePair::label).collect(), t.coefficient)).collect()
}

/// Largest coefficient deviation; infinite when the term sets differ.
pub fn deviation(sector: [Irrep; 4], want: &[(&str, f64)]) -> f64 {
    let got = built_terms(sector);
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    want.iter().map(|(s, c)| got.get(*s).map_or(f64::INFINITY, |v| (v - c).abs())).fold(0.0, f64::max)
}
