//! Reference first extrema of `<H_E>` at unit coupling.

use su3_lgt::evolution::{BenchmarkRow, FULL_BASIS_LAMBDA};

/// `(truncation label, steps, order, first max, first min)`; `None` steps
/// mark exact evolution.
pub type Reference = (&'static str, Option<usize>, Option<u32>, f64, f64);

pub fn reference() -> Vec<Reference> {
    vec![
        ("full", None, None, 0.9389, 0.0234),
        ("color-parity 3", None, None, 0.7967, 0.0000),
        ("pq<=1", None, None, 0.8699, 0.0096),
        ("color-parity 6", None, None, 0.9296, 0.0206),
        ("pq<=1", Some(1), Some(2), 1.1602, 0.0000),
        ("pq<=1", Some(2), Some(2), 0.9019, 0.0803),
        ("pq<=1", Some(3), Some(2), 0.8837, 0.0452),
        ("pq<=1", Some(4), Some(2), 0.8776, 0.0140),
        ("color-parity 6", Some(1), Some(1), 4.2582, 2.782),
        ("color-parity 6", Some(2), Some(1), 1.8280, 1.1840),
        ("color-parity 6", Some(1), Some(2), 0.8820, 0.1555),
    ]
}

/// The computed row matching a reference entry.
pub fn find<'a>(rows: &'a [BenchmarkRow], r: &Reference) -> &'a BenchmarkRow {
    let label = if r.0 == "full" { format!("pq<={FULL_BASIS_LAMBDA}") } else { r.0.to_string() };
    rows.iter()
        .find(|row| row.truncation == label && row.trotter_steps == r.1 && row.order == r.2)
        .unwrap_or_else(|| panic!("no benchmark row for {r:?}"))
}

/// `(max deviation, min deviation)`; a missing extremum counts as infinite.
pub fn deviations(row: &BenchmarkRow, r: &Reference) -> (f64, f64) {
    let dev = |x: Option<(f64, f64)>, want: f64| x.map_or(f64::INFINITY, |(_, v)| (v - want).abs());
    (dev(row.extrema.max, r.3), dev(row.extrema.min, r.4))
}
