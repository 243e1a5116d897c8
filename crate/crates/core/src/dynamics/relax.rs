use super::{evolve, Generator, PopulationState, RatePair};
use crate::{Error, Result};

/// Longest time searched by [`relaxation_time`], in units of `1/G(ω)`.
pub const RELAXATION_T_MAX: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    /// First time the total-variation distance to the steady state drops
    /// below `epsilon`.
    pub time: f64,
    /// Slowest non-zero relaxation rate over the populated sectors.
    pub gap: Option<f64>,
}

/// Smallest spectral gap among sectors the state populates.
pub fn spectral_gap(state: &PopulationState, generator: &Generator) -> Result<Option<f64>> {
    let mut gap: Option<f64> = None;
    for (tj, v) in state.sectors() {
        if v.iter().all(|&p| p == 0.0) {
            continue;
        }
        if let Some(g) = generator.block(tj)?.gap() {
            gap = Some(gap.map_or(g, |x| x.min(g)));
        }
    }
    Ok(gap)
}

/// Time for the total-variation distance to the steady state to fall below
/// `epsilon`, located by doubling and bisection (the distance is
/// non-increasing under a Markov semigroup).
pub fn relaxation_time(
    state0: &PopulationState,
    generator: &Generator,
    epsilon: f64,
) -> Result<Relaxation> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let target = state0.steady_state(generator)?;
    let gap = spectral_gap(state0, generator)?;
    let tv = |t: f64| -> Result<f64> { Ok(evolve(state0, generator, t)?.tv_distance(&target)) };
    if tv(0.0)? < epsilon {
        return Ok(Relaxation { time: 0.0, gap });
    }
    let mut lo = 0.0;
    let mut hi = 1e-3;
    while tv(hi)? >= epsilon {
        lo = hi;
        hi *= 2.0;
        if hi > RELAXATION_T_MAX {
            return Err(Error::NonConvergence {
                t_max: RELAXATION_T_MAX,
            });
        }
    }
    for _ in 0..100 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if tv(mid)? < epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Relaxation { time: hi, gap })
}

/// Extremes over `m` of the downward rate `G(ω)(J+m)(J-m+1)`: the band edge
/// `2J G(ω)` and the band centre, `J(J+1) G(ω)` for integer `J` and
/// `(J+1/2)² G(ω)` for half-integer `J`.
pub fn transition_rate_range(two_j: u32, rates: RatePair) -> Result<(f64, f64)> {
    if two_j == 0 {
        return Err(Error::InvalidInput(
            "a J = 0 sector has no transitions".into(),
        ));
    }
    // with k = J + m in 1..=2J the factor is k(2J + 1 - k)
    let n = u64::from(two_j);
    let k = (n + 1) / 2;
    let max = k * (n + 1 - k);
    Ok((n as f64 * rates.g_down, max as f64 * rates.g_down))
}
