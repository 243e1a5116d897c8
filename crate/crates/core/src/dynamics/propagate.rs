use std::collections::BTreeMap;

use nalgebra::DVector;

use super::{Generator, PopulationState};
use crate::ode::{integrate, Tolerances};
use crate::{Error, Result};

/// Largest sector dimension propagated by dense matrix exponentiation;
/// larger sectors use the adaptive integrator.
pub const EXACT_DIM_LIMIT: usize = 512;

/// Propagates the populations for a time `t`.
pub fn evolve(state: &PopulationState, generator: &Generator, t: f64) -> Result<PopulationState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "evolution time must be finite and non-negative, got {t}"
        )));
    }
    let mut sectors = BTreeMap::new();
    for (tj, p) in state.sectors() {
        let block = generator.block(tj)?;
        let next = if t == 0.0 || block.dim() == 1 {
            p.to_vec()
        } else if block.dim() <= EXACT_DIM_LIMIT {
            let prop = (block.to_dense() * t).exp();
            (prop * DVector::from_column_slice(p))
                .iter()
                .copied()
                .collect()
        } else {
            integrate(|y, dy| block.apply(y, dy), p, t, Tolerances::default())?
        };
        sectors.insert(tj, next);
    }
    Ok(PopulationState::from_parts_unchecked(
        sectors,
        state.time + t,
    ))
}
