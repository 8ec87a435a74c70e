//! Numerical experiments on a particle coupled to a field of membranes.
//!
//! The crate covers the classical drag law, the Hamiltonian dynamics of the
//! particle-field system, the spectrum of the fiber Hamiltonians in a
//! truncated Fock space and the Fermi golden rule coefficient.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod drag;
pub mod eigen;
pub mod error;
pub mod fgr;
pub mod fit;
pub mod fock;
pub mod formfactor;
pub mod grid;
pub mod quadrature;
pub mod spectral;

pub use classical::{ClassicalSystem, InitialField, RunConfig, TrajectoryRecord};
pub use drag::{drag_curve, drag_magnitude, gamma_alpha, DragCurve, SurrogateSolution};
pub use eigen::{lowest_eigenpair, EigenOptions, Eigenpair};
pub use error::{Error, Result};
pub use fgr::{c_of_p, FgrCurve, FgrMethod, LorentzianGrid};
pub use formfactor::{FormFactorModel, ProfileKind, RadialProfile};
pub use grid::{ModeGrid, RadialGrid, XiGrid};
pub use quadrature::{QuadratureGrid, Rule};
pub use spectral::{Frame, SpectralReport};
