use std::collections::BTreeMap;

use super::Generator;
use crate::spin::{format_half, BlockWeights};
use crate::{Error, Result};

/// Tolerance on the total probability of a [`PopulationState`].
pub const POPULATION_TOL: f64 = 1e-10;

/// How each sector's mass is spread over its ladder at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// All mass in `m = -J`.
    Ground,
    /// All mass in `m = +J`.
    Top,
    Uniform,
    /// Gibbs distribution at `b0`.
    Thermal(f64),
}

/// Populations `p_{J,m}` summed over the degenerate copies, indexed by
/// `k = m + J`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    sectors: BTreeMap<u32, Vec<f64>>,
    pub time: f64,
}

fn ladder(two_j: u32, init: InitialCondition) -> Vec<f64> {
    let d = two_j as usize + 1;
    let mut v = vec![0.0; d];
    match init {
        InitialCondition::Ground => v[0] = 1.0,
        InitialCondition::Top => v[d - 1] = 1.0,
        InitialCondition::Uniform => v.fill(1.0 / d as f64),
        InitialCondition::Thermal(b0) => {
            let shift = if b0 < 0.0 { -b0 * (d - 1) as f64 } else { 0.0 };
            for (k, x) in v.iter_mut().enumerate() {
                *x = (-(k as f64) * b0 - shift).exp();
            }
            let z: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= z);
        }
    }
    v
}

impl PopulationState {
    /// Validates ladder lengths, non-negativity and normalization.
    pub fn new(sectors: BTreeMap<u32, Vec<f64>>, time: f64) -> Result<Self> {
        let mut total = 0.0;
        for (&tj, v) in &sectors {
            if v.len() != tj as usize + 1 {
                return Err(Error::InvalidInput(format!(
                    "sector J = {} needs {} populations, got {}",
                    format_half(tj),
                    tj + 1,
                    v.len()
                )));
            }
            for &p in v {
                if !(p.is_finite() && p >= 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "population {p} in sector J = {}",
                        format_half(tj)
                    )));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > POPULATION_TOL {
            return Err(Error::InvalidInput(format!(
                "populations sum to {total}, not 1"
            )));
        }
        Ok(Self { sectors, time })
    }

    pub(crate) fn from_parts_unchecked(sectors: BTreeMap<u32, Vec<f64>>, time: f64) -> Self {
        Self { sectors, time }
    }

    /// Spreads each sector weight `p_J` over its ladder.
    pub fn from_weights(weights: &BlockWeights, init: InitialCondition) -> Self {
        let sectors = weights
            .iter()
            .map(|(tj, p)| (tj, ladder(tj, init).into_iter().map(|x| p * x).collect()))
            .collect();
        Self { sectors, time: 0.0 }
    }

    /// A single spin `s` with the given initial ladder.
    pub fn single(two_j: u32, init: InitialCondition) -> Self {
        Self {
            sectors: BTreeMap::from([(two_j, ladder(two_j, init))]),
            time: 0.0,
        }
    }

    pub fn sector(&self, two_j: u32) -> Option<&[f64]> {
        self.sectors.get(&two_j).map(Vec::as_slice)
    }

    pub fn sectors(&self) -> impl Iterator<Item = (u32, &[f64])> {
        self.sectors.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    /// `Σ_m p_{J,m}`.
    pub fn mass(&self, two_j: u32) -> f64 {
        self.sectors.get(&two_j).map_or(0.0, |v| v.iter().sum())
    }

    pub fn total(&self) -> f64 {
        self.sectors.values().flatten().sum()
    }

    /// `⟨J_z⟩` in units of `ħω`.
    pub fn energy(&self) -> f64 {
        self.sectors
            .iter()
            .map(|(&tj, v)| {
                let j = f64::from(tj) / 2.0;
                v.iter()
                    .enumerate()
                    .map(|(k, p)| p * (k as f64 - j))
                    .sum::<f64>()
            })
            .sum()
    }

    /// Per-sector Gibbs ladders of the generator carrying this state's
    /// sector masses.
    pub fn steady_state(&self, generator: &Generator) -> Result<Self> {
        let mut sectors = BTreeMap::new();
        for (&tj, v) in &self.sectors {
            let mass: f64 = v.iter().sum();
            let pi = generator.block(tj)?.stationary();
            sectors.insert(tj, pi.into_iter().map(|x| mass * x).collect());
        }
        Ok(Self {
            sectors,
            time: f64::INFINITY,
        })
    }

    /// Total-variation distance `½ Σ |p - q|` over the union of sectors.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (tj, v) in &self.sectors {
            match other.sectors.get(tj) {
                Some(w) => acc += v.iter().zip(w).map(|(a, b)| (a - b).abs()).sum::<f64>(),
                None => acc += v.iter().map(|a| a.abs()).sum::<f64>(),
            }
        }
        for (tj, w) in &other.sectors {
            if !self.sectors.contains_key(tj) {
                acc += w.iter().map(|a| a.abs()).sum::<f64>();
            }
        }
        0.5 * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{collective_generator, RatePair};
    use crate::spin::{thermal_product_weights, SpinEnsemble};

    #[test]
    fn initial_conditions() {
        let e = SpinEnsemble::new(3, 1).unwrap();
        let w = thermal_product_weights(&e, 0.5).unwrap();
        for init in [
            InitialCondition::Ground,
            InitialCondition::Top,
            InitialCondition::Uniform,
            InitialCondition::Thermal(-2.0),
        ] {
            let s = PopulationState::from_weights(&w, init);
            assert!((s.total() - 1.0).abs() < 1e-14);
            assert!((s.mass(1) - w.weight(1)).abs() < 1e-15);
            assert!(PopulationState::new(s.sectors.clone(), 0.0).is_ok());
        }
        let g = PopulationState::from_weights(&w, InitialCondition::Ground);
        assert!((g.energy() + 0.5 * w.weight(1) + 1.5 * w.weight(3)).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(PopulationState::new(BTreeMap::from([(1, vec![0.5, 0.5])]), 0.0).is_ok());
        assert!(PopulationState::new(BTreeMap::from([(1, vec![0.5, 0.4])]), 0.0).is_err());
        assert!(PopulationState::new(BTreeMap::from([(1, vec![1.0])]), 0.0).is_err());
        assert!(PopulationState::new(BTreeMap::from([(1, vec![1.5, -0.5])]), 0.0).is_err());
    }

    #[test]
    fn steady_state_keeps_sector_masses() {
        let e = SpinEnsemble::new(4, 1).unwrap();
        let w = thermal_product_weights(&e, 1.0).unwrap();
        let s = PopulationState::from_weights(&w, InitialCondition::Top);
        let gen = collective_generator(&e, RatePair::thermal(1.0, 2.0).unwrap());
        let ss = s.steady_state(&gen).unwrap();
        for tj in e.sectors() {
            assert!((ss.mass(tj) - s.mass(tj)).abs() < 1e-15);
        }
        assert_eq!(ss.tv_distance(&ss), 0.0);
        assert!(s.tv_distance(&ss) > 0.5);
    }
}
