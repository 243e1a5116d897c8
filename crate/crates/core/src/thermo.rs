//! Steady-state energies and heat capacities of collective and independent
//! spin ensembles.
//!
//! Inside a sector of total spin `J` the steady state is a Gibbs state of the
//! `(2J+1)`-level ladder `m = -J..J`. Its energy and heat capacity are
//!
//! ```text
//! e_J(b) = ½ coth(b/2) − (J+½) coth((J+½) b)
//! C_J(b) = (b/2 / sinh(b/2))² − ((J+½) b / sinh((J+½) b))²
//! ```
//!
//! in units of `ħω` and `k_B`. Collective quantities are `p_J`-weighted sums
//! of block quantities; the independent ensemble is `n` copies of the `J = s`
//! block.

use crate::special::{langevin, one_minus_sinhc_inv_sq, sinhc_inv_sq};
use crate::spin::{BlockWeights, SpinEnsemble};
use crate::{Error, Result};

/// Scan range in `b` for [`critical_temperature_numeric`].
pub const TCR_SCAN: (f64, f64) = (1e-3, 1e3);

/// Residual target of the crossover root.
pub const TCR_RESIDUAL: f64 = 1e-12;

fn half_dim(two_j: u32) -> f64 {
    (f64::from(two_j) + 1.0) / 2.0
}

/// Mean `m` of the Gibbs ladder of sector `J`, i.e. `e_J(b)` in units of `ħω`.
/// Odd in `b`, strictly decreasing, with range `(-J, J)`.
pub fn block_energy(two_j: u32, b: f64) -> f64 {
    if two_j == 0 || b == 0.0 {
        return 0.0;
    }
    let j = f64::from(two_j) / 2.0;
    if b >= 1.0 {
        return block_excitation_energy(two_j, b) - j;
    }
    if b <= -1.0 {
        return j - block_excitation_energy(two_j, -b);
    }
    let k = half_dim(two_j);
    0.5 * langevin(b / 2.0) - k * langevin(k * b)
}

/// `e_J(b) + J`, the mean excitation above the ground level `m = -J`.
/// Keeps full relative precision at large positive `b`, where `e_J` itself
/// is within rounding of `-J`.
pub fn block_excitation_energy(two_j: u32, b: f64) -> f64 {
    if two_j == 0 {
        return 0.0;
    }
    if b >= 1.0 {
        // ½(coth(b/2) - 1) - k(coth(kb) - 1)
        let k = half_dim(two_j);
        1.0 / b.exp_m1() - 2.0 * k / (2.0 * k * b).exp_m1()
    } else {
        block_energy(two_j, b) + f64::from(two_j) / 2.0
    }
}

/// Heat capacity `C_J(b) / k_B` of a single Gibbs block. Even in `b`,
/// non-negative, zero for `J = 0`.
pub fn block_heat_capacity(two_j: u32, b: f64) -> f64 {
    if two_j == 0 || b == 0.0 {
        return 0.0;
    }
    let half = b.abs() / 2.0;
    let y = half_dim(two_j) * b.abs();
    let c = if half < 1.0 {
        one_minus_sinhc_inv_sq(y) - one_minus_sinhc_inv_sq(half)
    } else {
        sinhc_inv_sq(half) - sinhc_inv_sq(y)
    };
    c.max(0.0)
}

/// `C_J(θ) / θ²`, continuous at `θ = 0` where it equals `J(J+1)/3`.
/// Monotonically decreasing in `|θ|`.
pub fn block_capacity_over_theta_sq(two_j: u32, theta: f64) -> f64 {
    let j = f64::from(two_j) / 2.0;
    let k = half_dim(two_j);
    let t = theta.abs();
    if k * t < 1e-4 {
        let k2 = k * k;
        j * (j + 1.0) / 3.0 - (k2 * k2 - 1.0 / 16.0) * t * t / 15.0
    } else {
        block_heat_capacity(two_j, theta) / (t * t)
    }
}

/// Provenance of a heat-capacity value.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacitySource {
    /// Collective dissipation from the given sector weights.
    Collective(BlockWeights),
    /// Independent dissipation of every spin.
    Independent(SpinEnsemble),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatCapacityResult {
    /// Heat capacity in units of `k_B`.
    pub c_over_kb: f64,
    pub b: f64,
    pub source: CapacitySource,
}

/// `E^ss(b) = Σ_J p_J e_J(b)`, in units of `ħω`.
pub fn steady_state_energy(weights: &BlockWeights, b: f64) -> f64 {
    weights.iter().map(|(tj, p)| p * block_energy(tj, b)).sum()
}

/// Thermal energy of independently dissipating spins, `n e_s(b)`.
pub fn independent_energy(ensemble: &SpinEnsemble, b: f64) -> f64 {
    f64::from(ensemble.n()) * block_energy(ensemble.two_s(), b)
}

/// `C^col / k_B = Σ_J p_J C_J(b)`.
pub fn collective_heat_capacity(weights: &BlockWeights, b: f64) -> HeatCapacityResult {
    let c = weights
        .iter()
        .map(|(tj, p)| p * block_heat_capacity(tj, b))
        .sum();
    HeatCapacityResult {
        c_over_kb: c,
        b,
        source: CapacitySource::Collective(weights.clone()),
    }
}

/// `C^ind / k_B = n C_s(b)`.
pub fn independent_heat_capacity(ensemble: &SpinEnsemble, b: f64) -> HeatCapacityResult {
    HeatCapacityResult {
        c_over_kb: f64::from(ensemble.n()) * block_heat_capacity(ensemble.two_s(), b),
        b,
        source: CapacitySource::Independent(*ensemble),
    }
}

/// High-temperature limit of `C_{ns} / (n C_s)`, equal to `(ns+1)/(s+1)`.
pub fn high_temperature_ratio(ensemble: &SpinEnsemble) -> f64 {
    // (ns+1)/(s+1) = (2ns+2)/(2s+2)
    f64::from(ensemble.two_j_max() + 2) / f64::from(ensemble.two_s() + 2)
}

/// `C_+^col / C^ind = C_{ns}(b) / (n C_s(b))`; the analytic limit at `b = 0`.
pub fn heat_capacity_ratio(ensemble: &SpinEnsemble, b: f64) -> f64 {
    if b == 0.0 {
        return high_temperature_ratio(ensemble);
    }
    let two_s = ensemble.two_s();
    let k = half_dim(ensemble.two_j_max());
    if k * b.abs() < 1e-4 {
        // both capacities are in their quadratic regime
        return block_capacity_over_theta_sq(ensemble.two_j_max(), b)
            / (f64::from(ensemble.n()) * block_capacity_over_theta_sq(two_s, b));
    }
    let col = block_heat_capacity(ensemble.two_j_max(), b);
    let ind = f64::from(ensemble.n()) * block_heat_capacity(two_s, b);
    if ind == 0.0 {
        // both underflowed: deep low-temperature limit
        return 1.0 / f64::from(ensemble.n());
    }
    col / ind
}

/// Approximate crossover temperature `k_B T_cr / ħω = √((4ns(s+1)+1)/12)`.
pub fn critical_temperature_approx(ensemble: &SpinEnsemble) -> f64 {
    let n = f64::from(ensemble.n());
    let s = ensemble.s();
    ((4.0 * n * s * (s + 1.0) + 1.0) / 12.0).sqrt()
}

/// Crossover temperature where `C_{ns}(b) = n C_s(b)`, in units of `ħω/k_B`.
///
/// The difference is positive at high temperature and negative at low
/// temperature with a single sign change, located by a logarithmic scan over
/// [`TCR_SCAN`] and refined by bisection.
pub fn critical_temperature_numeric(ensemble: &SpinEnsemble) -> Result<f64> {
    if ensemble.n() < 2 {
        return Err(Error::InvalidInput(
            "the crossover temperature needs n >= 2; collective and independent capacities coincide for n = 1"
                .into(),
        ));
    }
    let n = f64::from(ensemble.n());
    let (two_j, two_s) = (ensemble.two_j_max(), ensemble.two_s());
    let g = |b: f64| block_heat_capacity(two_j, b) - n * block_heat_capacity(two_s, b);

    const SCAN_POINTS: usize = 600;
    let (lo, hi) = TCR_SCAN;
    let step = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let mut bracket = None;
    let mut changes = 0;
    let mut last: Option<(f64, f64)> = None;
    for i in 0..SCAN_POINTS {
        let b = lo * (step * i as f64).exp();
        let v = g(b);
        if v == 0.0 {
            continue;
        }
        if let Some((b_prev, v_prev)) = last {
            if (v > 0.0) != (v_prev > 0.0) {
                changes += 1;
                bracket.get_or_insert((b_prev, b));
            }
        }
        last = Some((b, v));
    }
    let (mut a, mut c) = match (bracket, changes) {
        (Some(br), 1) => br,
        (Some(_), _) => {
            return Err(Error::InvalidInput(format!(
                "crossover is not unique ({changes} sign changes)"
            )))
        }
        (None, _) => return Err(Error::RootNotBracketed { lo, hi }),
    };
    let mut ga = g(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + c);
        if mid <= a || mid >= c {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            a = mid;
            c = mid;
            break;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = mid;
            ga = gm;
        } else {
            c = mid;
        }
    }
    let b_cr = if g(a).abs() <= g(c).abs() { a } else { c };
    debug_assert!(g(b_cr).abs() < TCR_RESIDUAL);
    Ok(1.0 / b_cr)
}
