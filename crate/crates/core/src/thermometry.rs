//! Fisher information of the collective steady state about the bath
//! temperature and the resulting Cramér–Rao precision bounds.
//!
//! Every Fisher quantity is reported as the dimensionless product
//! `F(T) k_B T² = b² F_b`, where `F_b` is the Fisher information with respect
//! to `b = ħω/k_B T`. For the quantum Fisher information this equals
//! `C^col / k_B`.

use crate::spin::{ln_block_partition_function, BlockWeights, SpinEnsemble};
use crate::thermo::{block_excitation_energy, block_heat_capacity, collective_heat_capacity};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FisherKind {
    Qfi,
    EnergyMeasurement,
    CollectiveProjection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    /// `F(T) k_B T²`, dimensionless.
    pub value: f64,
    pub b: f64,
    pub kind: FisherKind,
}

/// One outcome of a measurement together with `∂p/∂b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub two_j: Option<u32>,
    /// `2m`, signed.
    pub two_m: i64,
    pub p: f64,
    pub dp_db: f64,
}

/// `e_J(b) - m` for the ladder level `2m`, evaluated through the excitation
/// energy on the side where it is small so that the difference keeps its
/// relative precision.
fn energy_deviation(two_j: u32, two_m: i64, b: f64) -> f64 {
    let k_up = (two_m + i64::from(two_j)) as f64 / 2.0; // m + J
    if b >= 0.0 {
        block_excitation_energy(two_j, b) - k_up
    } else {
        let k_down = (i64::from(two_j) - two_m) as f64 / 2.0; // J - m
        -(block_excitation_energy(two_j, -b) - k_down)
    }
}

/// `ln(e^{-mb} / Z_J(b))`.
fn ln_level_probability(two_j: u32, two_m: i64, b: f64) -> f64 {
    -(two_m as f64) / 2.0 * b - ln_block_partition_function(two_j, b)
}

fn fisher_b(outcomes: &[Outcome]) -> f64 {
    outcomes
        .iter()
        .filter(|o| o.p > 0.0)
        .map(|o| o.dp_db * o.dp_db / o.p)
        .sum()
}

/// Joint distribution `p(J,m) = p_J e^{-mb} / Z_J` of a projection onto the
/// collective states `|J,m⟩_i`, copies `i` merged.
pub fn collective_projection_distribution(weights: &BlockWeights, b: f64) -> Vec<Outcome> {
    let mut out = Vec::new();
    for (tj, pj) in weights.iter() {
        for k in 0..=tj {
            let two_m = 2 * i64::from(k) - i64::from(tj);
            let p = pj * ln_level_probability(tj, two_m, b).exp();
            out.push(Outcome {
                two_j: Some(tj),
                two_m,
                p,
                dp_db: p * energy_deviation(tj, two_m, b),
            });
        }
    }
    out
}

/// Distribution of an energy (`J_z`) measurement,
/// `p(m) = Σ_{J ≥ |m|} p_J e^{-mb} / Z_J`.
pub fn energy_measurement_distribution(weights: &BlockWeights, b: f64) -> Vec<Outcome> {
    let top = i64::from(weights.max_two_j());
    // half-integer and integer ladders never mix within one ensemble
    let parity = top % 2;
    let mut out = Vec::new();
    let mut two_m = -top;
    while two_m <= top {
        let (mut p, mut dp) = (0.0, 0.0);
        for (tj, pj) in weights.iter() {
            if i64::from(tj) >= two_m.abs() {
                let q = pj * ln_level_probability(tj, two_m, b).exp();
                p += q;
                dp += q * energy_deviation(tj, two_m, b);
            }
        }
        debug_assert_eq!(two_m.rem_euclid(2), parity);
        out.push(Outcome {
            two_j: None,
            two_m,
            p,
            dp_db: dp,
        });
        two_m += 2;
    }
    out
}

/// Quantum Fisher information of the collective steady state, `C^col / k_B`.
pub fn qfi(weights: &BlockWeights, b: f64) -> FisherResult {
    FisherResult {
        value: collective_heat_capacity(weights, b).c_over_kb,
        b,
        kind: FisherKind::Qfi,
    }
}

/// The same quantity from the energy-variance form
/// `b² Σ_J p_J (⟨J_z²⟩_J − e_J²)`, with each block variance accumulated
/// around its ground level.
pub fn qfi_moment_form(weights: &BlockWeights, b: f64) -> f64 {
    let a = b.abs();
    let mut total = 0.0;
    for (tj, pj) in weights.iter() {
        // levels k = 0..2J above the ground state, weights e^{-k|b|}
        let w: Vec<f64> = (0..=tj).map(|k| (-f64::from(k) * a).exp()).collect();
        let z: f64 = w.iter().sum();
        let mean = w.iter().enumerate().map(|(k, w)| k as f64 * w).sum::<f64>() / z;
        let var = w
            .iter()
            .enumerate()
            .map(|(k, w)| (k as f64 - mean).powi(2) * w)
            .sum::<f64>()
            / z;
        total += pj * var;
    }
    b * b * total
}

/// Fisher information of the energy measurement. Never exceeds [`qfi`];
/// equal to it when the weights occupy a single sector.
pub fn fisher_energy_measurement(weights: &BlockWeights, b: f64) -> FisherResult {
    let value = b * b * fisher_b(&energy_measurement_distribution(weights, b));
    FisherResult {
        value,
        b,
        kind: FisherKind::EnergyMeasurement,
    }
}

/// Fisher information of the projection onto collective states. Equal to
/// [`qfi`] for every weight vector.
pub fn fisher_collective_projection(weights: &BlockWeights, b: f64) -> FisherResult {
    let value = b * b * fisher_b(&collective_projection_distribution(weights, b));
    FisherResult {
        value,
        b,
        kind: FisherKind::CollectiveProjection,
    }
}

/// Cramér–Rao bound on the relative temperature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionBound {
    /// `(ΔT/T)_min` for a single measurement.
    pub min_rel_stddev: f64,
    pub nu: u64,
}

impl PrecisionBound {
    /// The bound for `nu` measurements, `min_rel_stddev / √nu`.
    pub fn bound(&self) -> f64 {
        self.min_rel_stddev / (self.nu as f64).sqrt()
    }
}

fn precision_from_capacity(c: f64, nu: u64) -> Result<PrecisionBound> {
    if nu == 0 {
        return Err(Error::InvalidInput(
            "measurement count must be at least 1".into(),
        ));
    }
    if !(c > 0.0) {
        return Err(Error::InfiniteBound);
    }
    Ok(PrecisionBound {
        min_rel_stddev: 1.0 / c.sqrt(),
        nu,
    })
}

/// `ΔT/T ≥ 1 / √(ν C^col / k_B)`.
pub fn min_relative_stddev(weights: &BlockWeights, b: f64, nu: u64) -> Result<PrecisionBound> {
    precision_from_capacity(qfi(weights, b).value, nu)
}

/// The same bound for independently thermalized spins, `C^ind = n C_s`.
pub fn min_relative_stddev_independent(
    ensemble: &SpinEnsemble,
    b: f64,
    nu: u64,
) -> Result<PrecisionBound> {
    let c = f64::from(ensemble.n()) * block_heat_capacity(ensemble.two_s(), b);
    precision_from_capacity(c, nu)
}

/// `F^col_+ / F^ind = C_{ns} / (n C_s)`; above 1 exactly when `T > T_cr`.
pub fn precision_enhancement_ratio(ensemble: &SpinEnsemble, b: f64) -> f64 {
    crate::thermo::heat_capacity_ratio(ensemble, b)
}
