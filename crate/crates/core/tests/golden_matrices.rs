//! Assembled Hamiltonians against hand-written reference matrices.

mod common;

use common::golden::{self, sector_states};
use su3_lgt::gauge_basis::{enumerate_physical, global_singlet_filter, project_symmetry};
use su3_lgt::{LatticeGeometry, Truncation};

const TOL: f64 = 1e-10;

#[test]
fn one_plaquette_lambda1() {
    assert!(golden::one_plaquette_lambda1() < TOL);
}

#[test]
fn one_plaquette_three_qubit_with_completion() {
    assert!(golden::one_plaquette_three_qubit() < TOL);
}

#[test]
fn color_parity_single_qubit() {
    assert!(golden::color_parity_one_qubit() < TOL);
}

#[test]
fn color_parity_two_qubit() {
    assert!(golden::color_parity_two_qubit() < TOL);
}

#[test]
fn two_plaquette_qutrit_sectors() {
    let dev = golden::two_plaquette_qutrit_sectors();
    assert!(dev < TOL, "max deviation {dev}");
}

#[test]
fn projected_sectors_span_the_reference_states() {
    let geom = LatticeGeometry::two_plaquette_pbc();
    let cfgs = global_singlet_filter(&enumerate_physical(&geom, &Truncation::qutrit()), &geom);
    assert_eq!(cfgs.len(), 9);
    for (sector, states) in sector_states() {
        let projected = project_symmetry(&cfgs, &geom, sector).unwrap();
        assert_eq!(projected.len(), states.len(), "sector {}", sector.label());
        for s in &states {
            let weight: f64 = projected.iter().map(|p| p.overlap(s).powi(2)).sum();
            assert!((weight - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn two_plaquette_octet_truncation() {
    let dev = golden::two_plaquette_octet();
    assert!(dev < TOL, "max deviation {dev}");
}
