//! Classical simulation and circuit compilation for SU(3) Yang-Mills lattice
//! gauge theory truncated in the local irrep basis.
//!
//! The crate is organised bottom-up: [`su3_irreps`] and [`su3_clebsch`] supply
//! exact representation data and Clebsch-Gordan tensors, [`gauge_basis`] and
//! [`hamiltonian`] build Gauss-law bases and operators on small lattices,
//! [`evolution`] integrates them, [`local_plaquette`] and [`qubit_compile`]
//! lower plaquette rotations to qudit and qubit circuits, and [`counting`]
//! and [`su2_reference`] cover resource scaling and the SU(2) comparison model.

pub mod counting;
pub mod error;
pub mod evolution;
pub mod gauge_basis;
pub mod hamiltonian;
pub mod linalg;
pub mod local_plaquette;
pub mod qubit_compile;
pub mod su2_reference;
pub mod su3_clebsch;
pub mod su3_irreps;

pub use error::{Error, Result};
pub use gauge_basis::{GlobalState, LatticeGeometry, LinkConfig};
pub use hamiltonian::{MagneticConstant, OperatorMatrix};

pub use su3_clebsch::{CGTensor, IrrepState};
pub use su3_irreps::{Direction, Irrep, IrrepMultiset, Truncation};
