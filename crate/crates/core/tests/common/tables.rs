//! Singlet-count and plaquette-count reference tables.

use su3_lgt::{Irrep, Truncation};

pub const THREE_POINT: [u64; 17] = [
    1, 19, 165, 838, 3049, 8865, 22003, 48514, 97653, 182803, 322621, 542196, 874483, 1361683, 2056971, 3026098, 4349413,
];
pub const FOUR_POINT: [u64; 12] = [
    1, 82, 1967, 19550, 116929, 504932, 1739833, 5080226, 13071135, 30436170, 65372321, 131352884,
];

pub fn list(labels: &[&str]) -> Truncation {
    let irreps: Vec<Irrep> = labels.iter().map(|s| s.parse().unwrap()).collect();
    Truncation::from_list(&irreps)
}

/// `(truncation, physical states, nonzero matrix elements)`.
pub fn plaquette_rows() -> Vec<(Truncation, u64, u64)> {
    vec![
        (list(&["1", "3", "3bar"]), 81, 81),
        (list(&["1", "3", "3bar", "8"]), 529, 1018),
        (list(&["1", "3", "3bar", "8", "6", "6bar"]), 5937, 19594),
    ]
}
