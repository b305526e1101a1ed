//! Exact master-equation solver for small arrays.
//!
//! The array lives on a truncated Fock space with at most `fock_cutoff`
//! photons per cavity. [`build_liouvillian`] assembles the pumped, lossy
//! Liouvillian, [`steady_state`] finds its stationary state, and
//! [`correlation`] plus [`spectrum`] give emission spectra through the
//! quantum regression theorem.
//!
//! ```
//! use tchm::lindblad::*;
//! use tchm::model::{Realization, SystemParams};
//!
//! let real = Realization::resonant(SystemParams::new(1, 1));
//! let space = TruncatedSpace::new(1, 1, 2)?;
//! let l = build_liouvillian(&real, space, 0, 0.1)?;
//! let ss = steady_state(&l)?;
//! let photons = ss.expectation(&space.annihilation(0).adjoint().matmul(&space.annihilation(0)));
//! assert!(photons.re > 0.0 && photons.re < 0.01);
//! # Ok::<(), tchm::Error>(())
//! ```

mod emission;
mod liouvillian;
mod propagate;
mod space;
mod sparse;
mod spectrum;
mod steady;

pub use emission::{all_elements, emission_spectra, pump_summed_spectra, EmissionOptions, DEFAULT_MAX_DIMENSION, DEFAULT_PUMP_GHZ};
pub use liouvillian::{build_liouvillian, Liouvillian, Sector};
pub use propagate::{Integrator, Propagator};
pub use space::{build_operators, hamiltonian, Operators, TruncatedSpace, DEFAULT_FOCK_CUTOFF};
pub use sparse::CsrMatrix;
pub use spectrum::{
    correlation, correlation_in_sectors, spectral_span, spectrum, spectrum_at, Correlation, CorrelationOptions, Peak,
    Pump, Spectrum, SpectrumTrace,
};
pub use steady::{evolve, steady_state, SteadyState};
