//! Population dynamics under collective and independent dissipation, and a
//! dense master-equation oracle for small ensembles.
//!
//! Time is measured in units of `1/G(ω)`. Within a sector of total spin `J`
//! the populations live on the ladder `k = m + J = 0..2J`; the generator is
//! tridiagonal and never couples different sectors.

mod generator;
pub mod oracle;
mod population;
mod propagate;
mod rates;
mod relax;

pub use generator::{collective_generator, independent_generator, Generator, SectorGenerator};
pub use population::{InitialCondition, PopulationState, POPULATION_TOL};
pub use propagate::{evolve, EXACT_DIM_LIMIT};
pub use rates::RatePair;
pub use relax::{
    relaxation_time, spectral_gap, transition_rate_range, Relaxation, RELAXATION_T_MAX,
};
