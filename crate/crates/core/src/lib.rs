//! Collective heat capacity of spin ensembles coupled to a thermal bath.
//!
//! An ensemble of `n` identical spin-`s` systems that dissipates through the
//! collective operators `J± = Σ_k j±_k` conserves its total-spin sector
//! weights. Its steady state is thermal inside every sector but not globally,
//! so its heat capacity differs from the one reached through independent
//! dissipation. This crate computes
//!
//! - sector multiplicities and sector weights of initial states ([`spin`]),
//! - block energies, collective and independent heat capacities and the
//!   crossover temperature ([`thermo`]),
//! - Fisher information of the collective steady state and Cramér–Rao
//!   precision bounds for temperature estimation ([`thermometry`]),
//! - Otto-cycle work, heat, near-Carnot expansions and power ([`otto`]),
//! - population rate equations, relaxation times and a dense Lindblad
//!   reference integrator for small ensembles ([`dynamics`]).
//!
//! All quantities are dimensionless: energies in units of `ħω`, heat
//! capacities in units of `k_B`, temperatures in units of `ħω/k_B`, and
//! `b = ħω/(k_B T)` is the reduced inverse temperature. Half-integer spins,
//! total spins and magnetic quantum numbers are carried as doubled integers
//! (`two_s = 2s`, `two_j = 2J`, `two_m = 2m`).

pub mod dynamics;
mod error;
pub mod ode;
pub mod otto;
pub mod special;
pub mod spin;
pub mod thermo;
pub mod thermometry;
pub mod weights_file;

pub use error::{Error, Result};
pub use spin::{BlockWeights, SectorTable, SpinEnsemble};
