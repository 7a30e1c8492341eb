//! Quasi-primary spectra of finite commutative rings.
//!
//! The crate enumerates the ideals of a finite commutative ring, builds the
//! spaces Spec ⊆ Prim ⊆ QPrim with their Zariski-style topology, constructs
//! the sheaf of rings `U_a ↦ R_a` on them, and runs a registry of executable
//! checks for the structural statements about these objects.

pub mod dot;
pub mod ideal;
pub mod iso;
pub mod ring;
pub mod sheaf;
pub mod topology;
pub mod verify;

pub use ideal::{all_ideals, generate, preimage_ideal, Ideal, IdealError, IdealLattice};
pub use ring::{build_hom, build_ring, FiniteRing, RingElement, RingError, RingHom, RingSpec};
pub use topology::{spectrum, ClosedSet, OpenSet, Spectrum, SpectrumKind, TopologyError};
