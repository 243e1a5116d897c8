//! Quantum Otto cycle with the spin ensemble as working medium.
//!
//! The Hamiltonian `λ ħω J_z` is compressed between `λ_c` and `λ_h`; the two
//! isochores thermalize the medium with baths at `b_c > b_h`. Because the
//! Hamiltonians commute and the sector weights are conserved, the steady
//! states at the ends of the isochores are block-thermal at `θ_x = λ_x b_x`.
//!
//! Work and heat are in units of `ħω`. Extracted work is reported positive.

use crate::special::half_csch_sq;
use crate::spin::{symmetric_weights, BlockWeights, SpinEnsemble};
use crate::thermo::{
    block_capacity_over_theta_sq, block_excitation_energy, critical_temperature_approx,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OttoParams {
    pub lambda_c: f64,
    pub lambda_h: f64,
    pub b_c: f64,
    pub b_h: f64,
}

impl OttoParams {
    pub fn new(lambda_c: f64, lambda_h: f64, b_c: f64, b_h: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda_c", lambda_c),
            ("lambda_h", lambda_h),
            ("b_c", b_c),
            ("b_h", b_h),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            lambda_c,
            lambda_h,
            b_c,
            b_h,
        })
    }

    /// Parameters a distance `delta_eta` below Carnot efficiency:
    /// `b_c = b_h + delta_b` and `λ_c = λ_h (b_h/b_c + Δη)`.
    pub fn near_carnot(lambda_h: f64, b_h: f64, delta_b: f64, delta_eta: f64) -> Result<Self> {
        let b_c = b_h + delta_b;
        Self::new(lambda_h * (b_h / b_c + delta_eta), lambda_h, b_c, b_h)
    }

    pub fn theta_c(&self) -> f64 {
        self.lambda_c * self.b_c
    }

    pub fn theta_h(&self) -> f64 {
        self.lambda_h * self.b_h
    }

    pub fn delta_b(&self) -> f64 {
        self.b_c - self.b_h
    }

    /// Carnot efficiency `1 - b_h/b_c`.
    pub fn carnot(&self) -> f64 {
        1.0 - self.b_h / self.b_c
    }

    /// Carnot gap `Δη = λ_c/λ_h - b_h/b_c`.
    pub fn delta_eta(&self) -> f64 {
        self.lambda_c / self.lambda_h - self.b_h / self.b_c
    }

    /// `1 < λ_h/λ_c < b_c/b_h`.
    pub fn in_extraction_regime(&self) -> bool {
        let r = self.lambda_h / self.lambda_c;
        1.0 < r && r < self.b_c / self.b_h
    }
}

/// Which bath coupling the engine uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineMode {
    /// Collective coupling; the state is described by its sector weights.
    Collective,
    /// Every spin couples to the bath on its own; the weights only supply
    /// the ensemble.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleResult {
    /// `-W`, positive when the engine delivers work.
    pub work_extracted: f64,
    /// Heat absorbed from the hot bath.
    pub heat_hot: f64,
    /// Heat absorbed from the cold bath (negative in the extraction regime).
    pub heat_cold: f64,
    /// `1 - λ_c/λ_h`.
    pub efficiency: f64,
    pub delta_eta: f64,
}

/// `E(θ_h) - E(θ_c)` in units of `ħω`.
fn energy_gap(weights: &BlockWeights, mode: EngineMode, theta_h: f64, theta_c: f64) -> f64 {
    // ground-level offsets cancel in the difference
    match mode {
        EngineMode::Collective => weights
            .iter()
            .map(|(tj, p)| {
                p * (block_excitation_energy(tj, theta_h) - block_excitation_energy(tj, theta_c))
            })
            .sum(),
        EngineMode::Independent => {
            let e = weights.ensemble();
            f64::from(e.n())
                * (block_excitation_energy(e.two_s(), theta_h)
                    - block_excitation_energy(e.two_s(), theta_c))
        }
    }
}

/// `C(θ) / θ²` of the working medium, continuous at `θ = 0`.
fn capacity_over_theta_sq(weights: &BlockWeights, mode: EngineMode, theta: f64) -> f64 {
    match mode {
        EngineMode::Collective => weights
            .iter()
            .map(|(tj, p)| p * block_capacity_over_theta_sq(tj, theta))
            .sum(),
        EngineMode::Independent => {
            let e = weights.ensemble();
            f64::from(e.n()) * block_capacity_over_theta_sq(e.two_s(), theta)
        }
    }
}

/// Exact work and heats of one cycle.
pub fn cycle_exact(weights: &BlockWeights, mode: EngineMode, params: &OttoParams) -> CycleResult {
    let de = energy_gap(weights, mode, params.theta_h(), params.theta_c());
    CycleResult {
        work_extracted: (params.lambda_h - params.lambda_c) * de,
        heat_hot: params.lambda_h * de,
        heat_cold: -params.lambda_c * de,
        efficiency: 1.0 - params.lambda_c / params.lambda_h,
        delta_eta: params.delta_eta(),
    }
}

/// First-order work `Δη λ_h² (b_c - b_h) C(θ_h)/θ_h²`.
pub fn work_near_carnot(weights: &BlockWeights, mode: EngineMode, params: &OttoParams) -> f64 {
    params.delta_eta()
        * params.lambda_h
        * params.lambda_h
        * params.delta_b()
        * capacity_over_theta_sq(weights, mode, params.theta_h())
}

/// `(W^ind_max, W^col_max)`, the `θ_h → 0` limits of the first-order work for
/// independent spins and for the symmetric sector.
pub fn work_max_bounds(
    ensemble: &SpinEnsemble,
    delta_eta: f64,
    lambda_h: f64,
    b_c: f64,
) -> (f64, f64) {
    let pre = delta_eta * lambda_h * lambda_h * b_c / 12.0;
    // (2s+1)² - 1 = 2s(2s+2)
    let two_s = u64::from(ensemble.two_s());
    let two_j = u64::from(ensemble.two_j_max());
    let ind = f64::from(ensemble.n()) * (two_s * (two_s + 2)) as f64;
    let col = (two_j * (two_j + 2)) as f64;
    (pre * ind, pre * col)
}

/// `W^col_max / W^ind_max = (ns+1)/(s+1)`.
pub fn work_max_ratio(ensemble: &SpinEnsemble) -> f64 {
    crate::thermo::high_temperature_ratio(ensemble)
}

/// Size-independent ceiling `Δη λ_h² (b_c - b_h) (½ / sinh(θ_h/2))²` on the
/// first-order work of any collective engine.
pub fn work_saturation_bound(params: &OttoParams) -> f64 {
    params.delta_eta()
        * params.lambda_h
        * params.lambda_h
        * params.delta_b()
        * half_csch_sq(params.theta_h() / 2.0)
}

/// `n_cr = (3x² - 1/4) / (s(s+1))` with `x = k_B T_h / (ħω λ_h)`. Above `n_cr`
/// independent spins deliver more work per cycle than the symmetric sector.
pub fn critical_spin_number(x: f64, two_s: u32) -> f64 {
    let s = f64::from(two_s) / 2.0;
    (3.0 * x * x - 0.25) / (s * (s + 1.0))
}

/// `λ_h,cr = t_h / T_cr`, with `t_h = k_B T_h / ħω` and the approximate
/// crossover temperature.
pub fn critical_compression(t_h: f64, ensemble: &SpinEnsemble) -> f64 {
    t_h / critical_temperature_approx(ensemble)
}

/// First-order power. The independent engine needs `τ_ind` per cycle; the
/// collective engine in the symmetric sector thermalizes `n` times faster.
pub fn power_near_carnot(
    ensemble: &SpinEnsemble,
    params: &OttoParams,
    tau_ind: f64,
    mode: EngineMode,
) -> Result<f64> {
    if !(tau_ind.is_finite() && tau_ind > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tau_ind must be positive, got {tau_ind}"
        )));
    }
    let w = work_near_carnot(&symmetric_weights(ensemble), mode, params);
    Ok(match mode {
        EngineMode::Collective => f64::from(ensemble.n()) * w / tau_ind,
        EngineMode::Independent => w / tau_ind,
    })
}

/// `P^col_+ / P^ind = C_{ns}(θ_h) / C_s(θ_h)`; tends to `n(ns+1)/(s+1)` as
/// `θ_h → 0` and to 1 as `θ_h → ∞`.
pub fn power_ratio(ensemble: &SpinEnsemble, theta_h: f64) -> f64 {
    let col = block_capacity_over_theta_sq(ensemble.two_j_max(), theta_h);
    let ind = block_capacity_over_theta_sq(ensemble.two_s(), theta_h);
    if ind == 0.0 {
        return 1.0;
    }
    col / ind
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::block_heat_capacity;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn ens(n: u32, two_s: u32) -> SpinEnsemble {
        SpinEnsemble::new(n, two_s).unwrap()
    }

    fn sym(n: u32, two_s: u32) -> BlockWeights {
        symmetric_weights(&ens(n, two_s))
    }

    #[test]
    fn degenerate_cycles() {
        let w = sym(3, 1);
        let p = OttoParams::new(0.7, 0.7, 2.0, 1.0).unwrap();
        let r = cycle_exact(&w, EngineMode::Collective, &p);
        assert_eq!(r.work_extracted, 0.0);
        assert_eq!(r.efficiency, 0.0);
        for (lc, lh) in [(0.5, 1.0), (1.0, 0.5), (0.9, 1.1)] {
            let p = OttoParams::new(lc, lh, 1.3, 1.3).unwrap();
            assert!(!p.in_extraction_regime());
            assert!(cycle_exact(&w, EngineMode::Collective, &p).work_extracted <= 0.0);
        }
    }

    #[test]
    fn two_qubit_cycle_against_dense_trace() {
        let p = OttoParams::new(0.6, 1.0, 1.0, 0.5).unwrap();
        // symmetric projector and J_z on the 4-dim product space
        let jz = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 0.0, 0.0, 1.0]));
        let mut proj = DMatrix::<f64>::zeros(4, 4);
        proj[(0, 0)] = 1.0;
        proj[(3, 3)] = 1.0;
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            proj[(i, j)] = 0.5;
        }
        let energy = |theta: f64| {
            let exp = DMatrix::from_diagonal(&jz.diagonal().map(|e: f64| (-theta * e).exp()));
            let rho = &proj * exp * &proj;
            (&rho * &jz).trace() / rho.trace()
        };
        let de = energy(p.theta_h()) - energy(p.theta_c());
        let r = cycle_exact(&sym(2, 1), EngineMode::Collective, &p);
        assert!((r.work_extracted - 0.4 * de).abs() < 1e-14);
        assert!((r.heat_hot - de).abs() < 1e-14);
        assert!((r.efficiency - 0.4).abs() < 1e-15);
        assert!((r.delta_eta - 0.1).abs() < 1e-15);
        assert!(r.work_extracted > 0.0);
    }

    #[test]
    fn energy_bookkeeping_and_efficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.random_range(1..=10u32);
            let two_s = rng.random_range(1..=3u32);
            let e = ens(n, two_s);
            let mut map = BTreeMap::new();
            for tj in e.sectors() {
                map.insert(tj, rng.random::<f64>());
            }
            let w = BlockWeights::normalized(e, map).unwrap();
            let (b1, b2) = (rng.random_range(0.05..5.0), rng.random_range(0.05..5.0));
            let p = OttoParams::new(
                rng.random_range(0.1..2.0),
                rng.random_range(0.1..2.0),
                f64::max(b1, b2),
                f64::min(b1, b2),
            )
            .unwrap();
            for mode in [EngineMode::Collective, EngineMode::Independent] {
                let r = cycle_exact(&w, mode, &p);
                let w_on = -r.work_extracted;
                assert!(
                    (w_on + r.heat_hot + r.heat_cold).abs() <= 1e-12 * (1.0 + r.heat_hot.abs())
                );
                assert_eq!(r.efficiency, 1.0 - p.lambda_c / p.lambda_h);
                assert!((r.efficiency + r.delta_eta - p.carnot()).abs() < 1e-14);
                assert_eq!(r.work_extracted > 0.0, p.in_extraction_regime(), "{p:?}");
                if p.in_extraction_regime() {
                    assert!(r.heat_hot > 0.0 && r.efficiency > 0.0 && r.efficiency < p.carnot());
                }
            }
        }
    }

    #[test]
    fn first_order_error_is_quadratic() {
        for (n, two_s) in [(1u32, 1u32), (4, 1), (3, 3)] {
            let w = sym(n, two_s);
            let err = |de: f64| {
                let p = OttoParams::near_carnot(1.0, 0.5, 0.5, de).unwrap();
                (cycle_exact(&w, EngineMode::Collective, &p).work_extracted
                    - work_near_carnot(&w, EngineMode::Collective, &p))
                .abs()
            };
            let errs: Vec<f64> = [0.04, 0.02, 0.01, 0.005].iter().map(|&d| err(d)).collect();
            for pair in errs.windows(2) {
                let r = pair[0] / pair[1];
                assert!((3.0..=5.0).contains(&r), "ratio {r}");
            }
        }
        let p = OttoParams::near_carnot(1.0, 0.5, 0.5, 0.0).unwrap();
        assert!(work_near_carnot(&sym(2, 1), EngineMode::Collective, &p).abs() < 1e-16);
    }

    #[test]
    fn first_order_work_approaches_its_maximum() {
        let e = ens(5, 3);
        let (ind, col) = work_max_bounds(&e, 0.01, 1.2, 2.0);
        let p = OttoParams::near_carnot(1.2, 1e-7, 2.0 - 1e-7, 0.01).unwrap();
        let wc = work_near_carnot(&symmetric_weights(&e), EngineMode::Collective, &p);
        let wi = work_near_carnot(&symmetric_weights(&e), EngineMode::Independent, &p);
        assert!((wc / col - 1.0).abs() < 1e-6);
        assert!((wi / ind - 1.0).abs() < 1e-6);
    }

    #[test]
    fn max_bound_ratio() {
        let (i, c) = work_max_bounds(&ens(1, 5), 0.1, 1.0, 1.0);
        assert_eq!(i, c);
        let (i, c) = work_max_bounds(&ens(2, 1), 0.1, 1.0, 1.0);
        assert!((c / i - 4.0 / 3.0).abs() < 1e-15);
        let (i, c) = work_max_bounds(&ens(100, 3), 0.3, 0.9, 2.5);
        assert!((c / i - 60.4).abs() < 1e-12);
        assert_eq!(work_max_ratio(&ens(100, 3)), 60.4);
    }

    #[test]
    fn saturation_bound() {
        let p = OttoParams::near_carnot(1.0, 2.0, 1.0, 0.01).unwrap();
        let v = work_saturation_bound(&p);
        assert!((v - 0.01 * (0.5 / 1f64.sinh()).powi(2)).abs() < 1e-15);
        assert!((v - 1.81e-3).abs() < 1e-5);
        let far = OttoParams::near_carnot(1.0, 600.0, 1.0, 0.01).unwrap();
        assert!(work_saturation_bound(&far) < 1e-250);

        let p = OttoParams::near_carnot(1.0, 1.0, 1.0, 0.02).unwrap();
        let bound = work_saturation_bound(&p);
        let mut prev = 0.0;
        for n in 1..=200 {
            let w = sym(n, 1);
            let exact = cycle_exact(&w, EngineMode::Collective, &p).work_extracted;
            let first = work_near_carnot(&w, EngineMode::Collective, &p);
            assert!(exact <= first && first <= bound);
            assert!(first >= prev);
            prev = first;
        }
        assert!(prev > 0.99 * bound);
    }

    #[test]
    fn capacity_over_theta_sq_decreases() {
        for two_j in 1..=200 {
            let mut theta: f64 = 1e-3;
            let mut prev = block_capacity_over_theta_sq(two_j, theta);
            while theta < 50.0 {
                theta *= 1.05;
                let v = block_capacity_over_theta_sq(two_j, theta);
                assert!(v <= prev, "2J={two_j} θ={theta}");
                prev = v;
            }
        }
    }

    #[test]
    fn critical_spin_number_examples() {
        assert!((critical_spin_number(1.0, 1) - 2.75 / 0.75).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let x = rng.random_range(0.5..20.0);
            let two_s = rng.random_range(1..=9u32);
            let n = critical_spin_number(x, two_s);
            let s = f64::from(two_s) / 2.0;
            let t = ((4.0 * n * s * (s + 1.0) + 1.0) / 12.0).sqrt();
            assert!((t - x).abs() < 1e-12 * x);
        }
        let mut prev = f64::INFINITY;
        for two_s in 1..100 {
            let v = critical_spin_number(2.0, two_s);
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn critical_compression_examples() {
        let e = ens(10, 1);
        let t = critical_temperature_approx(&e);
        assert!((critical_compression(t, &e) - 1.0).abs() < 1e-15);
        assert!((critical_compression(3.214, &e) - 2.0).abs() < 1e-3);
        assert!(
            (critical_compression(6.0, &e) - 2.0 * critical_compression(3.0, &e)).abs() < 1e-15
        );
    }

    #[test]
    fn power_ratio_limits() {
        let e = ens(100, 1);
        assert!((power_ratio(&e, 1e-6) / 3400.0 - 1.0).abs() < 1e-6);
        for n in [1u32, 2, 5, 100] {
            for two_s in [1u32, 3] {
                let e = ens(n, two_s);
                assert!((power_ratio(&e, 60.0) - 1.0).abs() < 0.05);
                let mut theta = 1e-3;
                while theta < 100.0 {
                    let r = power_ratio(&e, theta);
                    assert!(r >= 1.0 - 1e-12, "n={n} θ={theta}");
                    if n == 1 {
                        assert_eq!(r, 1.0);
                    }
                    theta *= 1.3;
                }
            }
        }
    }

    #[test]
    fn power_consistency() {
        let e = ens(5, 1);
        let p = OttoParams::near_carnot(1.0, 0.8, 0.6, 0.01).unwrap();
        let col = power_near_carnot(&e, &p, 2.0, EngineMode::Collective).unwrap();
        let ind = power_near_carnot(&e, &p, 2.0, EngineMode::Independent).unwrap();
        assert!((col / ind - power_ratio(&e, p.theta_h())).abs() < 1e-12);
        let direct = block_heat_capacity(5, p.theta_h()) / block_heat_capacity(1, p.theta_h());
        assert!((col / ind - direct).abs() < 1e-12 * direct);
        assert!(power_near_carnot(&e, &p, 0.0, EngineMode::Collective).is_err());
    }
}
