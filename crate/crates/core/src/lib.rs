//! Mean-field solver for a ring of `N` coupled Rabi cavities threaded by an
//! artificial magnetic flux.
//!
//! Every cavity hosts a quantum Rabi model in the limit `Δ/ω → ∞`, and photons
//! hop between neighbours with amplitude `J e^{iθ}`. The crate covers
//!
//! * the normal phase in closed form ([`normal`]): dispersion, excitation
//!   energies, momentum-resolved critical couplings, flux boundaries and the
//!   phase census for arbitrary `N`;
//! * the displaced-frame energy functional, its stationarity conditions, the
//!   closed-form hexagonal branches and a multi-start minimizer
//!   ([`meanfield`]);
//! * Bogoliubov spectra around any mean-field configuration ([`bogoliubov`]);
//! * photon currents, spin textures and their winding ([`observables`]);
//! * gap scaling, exponent fits and phase-diagram rasters ([`criticality`]).
//!
//! All energies share the unit of the cavity frequency `omega`.

pub mod bogoliubov;
pub mod criticality;
mod error;
pub mod meanfield;
pub mod model;
pub mod normal;
pub mod observables;

pub use error::{Error, Result};
pub use model::{Chirality, MeanFieldConfiguration, PhaseLabel, RingParameters};
