//! Simulation of spectrally disordered Tavis-Cummings-Hubbard coupled-cavity
//! arrays: a chain of `N` cavities, each holding `M` two-level emitters whose
//! frequencies are drawn from a Gaussian, with photon hopping between
//! neighbouring cavities.
//!
//! - [`model`]: parameters, units, basis indexing and disorder draws.
//! - [`effective`]: the non-Hermitian one-excitation Hamiltonian and its eigenstates.
//! - [`metrics`]: nodal and polaritonic participation ratios, band labels, MPS.
//! - [`analytic`]: closed-form bands of the resonant array.
//! - [`lindblad`]: exact master-equation solver and emission spectra for small arrays.
//! - [`ensemble`]: disorder ensembles, sweeps and figure presets.
//!
//! ```
//! use tchm::prelude::*;
//!
//! let params = SystemParams::new(5, 3).with_delta_in_collective_units(0.5);
//! let realization = sample_disorder(&params, 1)?;
//! let states = solve_realization(&realization)?;
//! let labels = classify_bands(&states, &params)?;
//! let mps = most_polaritonic_state(&states, &labels, Band::Lower)?;
//! let (_, p_p) = polaritonic_participation(&states[mps]);
//! assert!(p_p > 0.5);
//! # Ok::<(), tchm::Error>(())
//! ```

pub mod analytic;
pub mod config;
pub mod effective;
pub mod ensemble;
pub mod error;
pub mod lindblad;
pub mod metrics;
pub mod model;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analytic::{
        band_points, cca_band, open_momenta, periodic_momenta, polariton_bands, polariton_eigenvector,
        BandPoint,
    };
    pub use crate::config::RunConfig;
    pub use crate::ensemble::{figure_preset, run_sweep, Observable, Preset, SweepResult, SweepSpec};
    pub use crate::effective::{build_h_eff, eigensolve, occupancies, solve_realization, EigenState, NodeOccupancy};
    pub use crate::lindblad::{
        build_liouvillian, emission_spectra, pump_summed_spectra, steady_state, EmissionOptions, TruncatedSpace,
    };
    pub use crate::metrics::{
        classify_bands, most_polaritonic_state, nodal_participation, participation_reports,
        polaritonic_participation, Band, ParticipationReport,
    };
    pub use crate::model::{
        build_basis, derive_realization_seed, ghz_to_angular, sample_disorder, Boundary, DeltaSpec, Element,
        Realization, SingleExcitationBasis, SystemParams,
    };
    pub use crate::{Error, Result};
}

// Compiles the guide's snippets as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/effective.md")]
    mod effective {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/bands.md")]
    mod bands {}
    #[doc = include_str!("../../../book/src/master-equation.md")]
    mod master_equation {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
