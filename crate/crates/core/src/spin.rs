//! Total-angular-momentum block structure of `n` identical spins.
//!
//! The `(2s+1)^n`-dimensional product space splits into sectors of total
//! spin `J ∈ [J_0, ns]`, each appearing `l_J` times. Collective dissipation
//! never mixes sectors, so an initial state is summarised by its sector
//! weights `p_J = Σ_i p_{J,i}` (aggregated over the `l_J` copies).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::special::{ln_sinh, log_sum_exp};
use crate::{Error, Result};

/// Largest `2ns` accepted by [`sector_multiplicities`].
pub const MAX_TWO_J: u32 = 4096;

/// Tolerance on `Σ_J p_J = 1` for [`BlockWeights`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `n` identical spins of magnitude `s`, stored as `two_s = 2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinEnsemble {
    n: u32,
    two_s: u32,
}

impl SpinEnsemble {
    pub fn new(n: u32, two_s: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "spin count n must be at least 1".into(),
            ));
        }
        if two_s == 0 {
            return Err(Error::InvalidInput(
                "spin magnitude must be at least 1/2".into(),
            ));
        }
        if n.checked_mul(two_s).is_none() {
            return Err(Error::InvalidInput(format!(
                "n * 2s overflows for n = {n}, 2s = {two_s}"
            )));
        }
        Ok(Self { n, two_s })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn s(&self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    /// `2J` of the symmetric (Dicke) sector, `J = ns`.
    pub fn two_j_max(&self) -> u32 {
        self.n * self.two_s
    }

    /// `2J_0`: 1 when `ns` is half-integer, 0 otherwise (a single spin only has `J = s`).
    pub fn two_j_min(&self) -> u32 {
        if self.n == 1 {
            self.two_s
        } else {
            self.two_j_max() % 2
        }
    }

    /// Whether `J = two_j/2` is a sector of this ensemble.
    pub fn has_sector(&self, two_j: u32) -> bool {
        two_j >= self.two_j_min()
            && two_j <= self.two_j_max()
            && (two_j + self.two_j_max()) % 2 == 0
    }

    /// All sector labels `2J`, ascending.
    pub fn sectors(&self) -> impl Iterator<Item = u32> {
        (self.two_j_min()..=self.two_j_max()).step_by(2)
    }

    /// `(2s+1)^n`, the Hilbert-space dimension.
    pub fn dimension(&self) -> BigUint {
        BigUint::from(self.two_s + 1).pow(self.n)
    }

    /// Dimension as a machine integer when it fits.
    pub fn dimension_usize(&self) -> Option<usize> {
        (self.two_s as usize + 1).checked_pow(self.n)
    }
}

impl fmt::Display for SpinEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, s={}", self.n, format_half(self.two_s))
    }
}

/// Renders a doubled integer as `k` or `k/2`.
pub fn format_half(twice: u32) -> String {
    if twice % 2 == 0 {
        (twice / 2).to_string()
    } else {
        format!("{twice}/2")
    }
}

/// Multiplicities `l_J` of the total-spin sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorTable {
    ensemble: SpinEnsemble,
    entries: BTreeMap<u32, BigUint>,
}

impl SectorTable {
    pub fn ensemble(&self) -> SpinEnsemble {
        self.ensemble
    }

    pub fn j_min(&self) -> u32 {
        *self.entries.keys().next().expect("at least one sector")
    }

    pub fn j_max(&self) -> u32 {
        *self
            .entries
            .keys()
            .next_back()
            .expect("at least one sector")
    }

    pub fn multiplicity(&self, two_j: u32) -> Option<&BigUint> {
        self.entries.get(&two_j)
    }

    /// `ln l_J`, valid even when `l_J` exceeds the `f64` range.
    pub fn ln_multiplicity(&self, two_j: u32) -> Option<f64> {
        self.entries.get(&two_j).map(ln_biguint)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigUint)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ_J l_J (2J+1)`; equals `(2s+1)^n`.
    pub fn dimension_sum(&self) -> BigUint {
        self.entries
            .iter()
            .map(|(tj, l)| l * BigUint::from(tj + 1))
            .sum()
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().expect("finite below 2^1000").ln()
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().expect("64-bit value");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Sector multiplicities by iterated Clebsch–Gordan coupling.
///
/// Coupling one more spin `s` to a sector `J` yields `J' ∈ [|J-s|, J+s]`, so
/// `d_{k+1}(J') = Σ_J d_k(J) 1[|J-s| ≤ J' ≤ J+s]` with `d_1 = δ_{J,s}`.
/// Exact in arbitrary-width integers.
pub fn sector_multiplicities(ensemble: &SpinEnsemble) -> Result<SectorTable> {
    let two_s = ensemble.two_s();
    let top = ensemble.two_j_max();
    if top > MAX_TWO_J {
        return Err(Error::Capacity {
            what: format!("multiplicity table for 2ns = {top}"),
            limit: MAX_TWO_J as usize,
        });
    }
    let len = top as usize + 1;
    let mut counts = vec![BigUint::zero(); len];
    counts[two_s as usize] = BigUint::one();
    for _ in 1..ensemble.n() {
        let mut next = vec![BigUint::zero(); len];
        for (tj, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let tj = tj as u32;
            let lo = tj.abs_diff(two_s);
            let hi = tj + two_s;
            for tjp in (lo..=hi).step_by(2) {
                next[tjp as usize] += c;
            }
        }
        counts = next;
    }
    let entries = counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(tj, c)| (tj as u32, c))
        .collect();
    Ok(SectorTable {
        ensemble: *ensemble,
        entries,
    })
}

/// `ln Z_J(b)` with `Z_J(b) = Σ_{m=-J}^{J} e^{-mb} = sinh((J+1/2)b) / sinh(b/2)`.
pub fn ln_block_partition_function(two_j: u32, b: f64) -> f64 {
    let half_dim = (f64::from(two_j) + 1.0) / 2.0;
    let a = b.abs();
    if two_j == 0 {
        return 0.0;
    }
    if a == 0.0 {
        return (f64::from(two_j) + 1.0).ln();
    }
    if half_dim * a < 1e-3 {
        // direct sum; both sinh arguments are tiny here
        let j = f64::from(two_j) / 2.0;
        return log_sum_exp((0..=two_j).map(|k| -(f64::from(k) - j) * b));
    }
    ln_sinh(half_dim * a) - ln_sinh(a / 2.0)
}

/// Block partition function `Z_J(b)`; always `≥ 1`. Overflows to `+inf` only
/// when the true value exceeds the `f64` range (see [`ln_block_partition_function`]).
pub fn block_partition_function(two_j: u32, b: f64) -> f64 {
    if b == 0.0 {
        return f64::from(two_j) + 1.0;
    }
    ln_block_partition_function(two_j, b).exp()
}

/// Sector weights `p_J` of a state, aggregated over the degenerate copies.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockWeights {
    ensemble: SpinEnsemble,
    weights: BTreeMap<u32, f64>,
}

impl BlockWeights {
    /// Validates that every key is a sector of `ensemble`, every weight is
    /// non-negative and the weights sum to 1 within [`NORMALIZATION_TOL`].
    /// Zero weights are dropped.
    pub fn new(ensemble: SpinEnsemble, weights: BTreeMap<u32, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (&tj, &p) in &weights {
            if !ensemble.has_sector(tj) {
                return Err(Error::InvalidInput(format!(
                    "J = {} is not a sector of the ensemble ({ensemble})",
                    format_half(tj)
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight of J = {} is {p}",
                    format_half(tj)
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "sector weights sum to {total}, not 1"
            )));
        }
        let weights = weights.into_iter().filter(|&(_, p)| p > 0.0).collect();
        Ok(Self { ensemble, weights })
    }

    /// Like [`BlockWeights::new`] but rescales positive weights to unit sum.
    pub fn normalized(ensemble: SpinEnsemble, mut weights: BTreeMap<u32, f64>) -> Result<Self> {
        let total: f64 = weights.values().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sector weights sum to {total}"
            )));
        }
        for p in weights.values_mut() {
            *p /= total;
        }
        // keep the invariant within rounding
        let fixed: f64 = weights.values().sum();
        if let Some(last) = weights.values_mut().next_back() {
            *last += 1.0 - fixed;
            if *last < 0.0 {
                *last = 0.0;
            }
        }
        Self::new(ensemble, weights)
    }

    /// All weight on a single sector.
    pub fn single_sector(ensemble: SpinEnsemble, two_j: u32) -> Result<Self> {
        Self::new(ensemble, BTreeMap::from([(two_j, 1.0)]))
    }

    pub fn ensemble(&self) -> SpinEnsemble {
        self.ensemble
    }

    /// `p_J`; zero for sectors absent from the map.
    pub fn weight(&self, two_j: u32) -> f64 {
        self.weights.get(&two_j).copied().unwrap_or(0.0)
    }

    /// Non-zero weights, ascending in `J`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights.iter().map(|(k, v)| (*k, *v))
    }

    pub fn as_map(&self) -> &BTreeMap<u32, f64> {
        &self.weights
    }

    /// Whether all weight sits in one sector.
    pub fn is_single_sector(&self) -> bool {
        self.weights.len() == 1
    }

    /// Largest populated `2J`.
    pub fn max_two_j(&self) -> u32 {
        *self
            .weights
            .keys()
            .next_back()
            .expect("weights are normalized, so non-empty")
    }
}

/// Sector weights of the product thermal state `⊗_k e^{-b0 j_z}/Z_s(b0)`.
///
/// The product state is diagonal in any collective basis with population
/// `e^{-m b0} / Z_s(b0)^n` on every `|J,m⟩_i`, hence
/// `p_J = l_J Z_J(b0) / Z_s(b0)^n`.
pub fn thermal_product_weights(ensemble: &SpinEnsemble, b0: f64) -> Result<BlockWeights> {
    let table = sector_multiplicities(ensemble)?;
    let ln_zs = ln_block_partition_function(ensemble.two_s(), b0);
    let n = f64::from(ensemble.n());
    let logs: Vec<(u32, f64)> = table
        .iter()
        .map(|(tj, l)| {
            (
                tj,
                ln_biguint(l) + ln_block_partition_function(tj, b0) - n * ln_zs,
            )
        })
        .collect();
    // exact up to rounding; renormalize in log space to absorb it
    let ln_total = log_sum_exp(logs.iter().map(|&(_, v)| v));
    let weights = logs
        .into_iter()
        .map(|(tj, v)| (tj, (v - ln_total).exp()))
        .collect();
    BlockWeights::normalized(*ensemble, weights)
}

/// All weight in the symmetric sector `J = ns`.
pub fn symmetric_weights(ensemble: &SpinEnsemble) -> BlockWeights {
    BlockWeights::single_sector(*ensemble, ensemble.two_j_max()).expect("J = ns is always a sector")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(n: u32, two_s: u32) -> SpinEnsemble {
        SpinEnsemble::new(n, two_s).unwrap()
    }

    fn table(n: u32, two_s: u32) -> Vec<(u32, u64)> {
        sector_multiplicities(&ens(n, two_s))
            .unwrap()
            .iter()
            .map(|(tj, l)| (tj, l.to_u64().unwrap()))
            .collect()
    }

    #[test]
    fn small_tables() {
        assert_eq!(table(2, 1), vec![(0, 1), (2, 1)]);
        assert_eq!(table(3, 1), vec![(1, 2), (3, 1)]);
        assert_eq!(table(1, 3), vec![(3, 1)]);
        assert_eq!(table(1, 1), vec![(1, 1)]);
    }

    #[test]
    fn two_spins_of_any_magnitude_give_one_copy_per_sector() {
        for two_s in 1..=9 {
            let t = table(2, two_s);
            assert_eq!(t.len() as u32, two_s + 1);
            assert!(t.iter().all(|&(_, l)| l == 1));
            assert_eq!(t[0].0, 0);
        }
    }

    #[test]
    fn dimension_sum_rule() {
        for n in 1..=30 {
            for two_s in 1..=9 {
                let e = ens(n, two_s);
                let t = sector_multiplicities(&e).unwrap();
                assert_eq!(t.dimension_sum(), e.dimension(), "n={n}, 2s={two_s}");
                assert_eq!(t.j_max(), e.two_j_max());
                assert_eq!(t.j_min(), e.two_j_min());
                assert_eq!(t.len(), e.sectors().count());
            }
        }
    }

    #[test]
    fn large_ensembles_do_not_overflow() {
        let e = ens(200, 1);
        let t = sector_multiplicities(&e).unwrap();
        assert_eq!(t.dimension_sum(), e.dimension());
        // l_0 for 200 qubits is the Catalan number C_100 ~ 8.97e56
        let l0 = t.ln_multiplicity(0).unwrap();
        assert!((l0 - 8.965_199_470_901_314e56f64.ln()).abs() < 1e-9);
        assert!(matches!(
            sector_multiplicities(&ens(5000, 1)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn partition_function_examples() {
        assert_eq!(block_partition_function(0, 3.7), 1.0);
        assert_eq!(block_partition_function(7, 0.0), 8.0);
        let z = block_partition_function(1, 2.0);
        assert!((z - 2.0 * 1f64.cosh()).abs() < 1e-14);
        // overflow-safe in log form
        let lz = ln_block_partition_function(2000, 50.0);
        assert!((lz - 1000.0 * 50.0).abs() < 1e-6 * lz);
    }

    #[test]
    fn partition_function_matches_direct_sum() {
        for two_j in 0..=100u32 {
            for &b in &[-5.0, -1.3, -1e-4, 1e-7, 0.01, 0.7, 2.5, 5.0] {
                let j = f64::from(two_j) / 2.0;
                let direct: f64 = (0..=two_j).map(|k| (-(f64::from(k) - j) * b).exp()).sum();
                let z = block_partition_function(two_j, b);
                assert!(
                    (z - direct).abs() <= 1e-12 * direct,
                    "2J={two_j}, b={b}: {z} vs {direct}"
                );
                assert!(z >= 1.0);
            }
        }
    }

    #[test]
    fn thermal_weights_at_infinite_temperature() {
        let w = thermal_product_weights(&ens(2, 1), 0.0).unwrap();
        assert!((w.weight(0) - 0.25).abs() < 1e-15);
        assert!((w.weight(2) - 0.75).abs() < 1e-15);
        for (n, two_s) in [(3, 1), (4, 2), (5, 3)] {
            let e = ens(n, two_s);
            let t = sector_multiplicities(&e).unwrap();
            let w = thermal_product_weights(&e, 0.0).unwrap();
            let dim = e.dimension().to_f64().unwrap();
            for (tj, l) in t.iter() {
                let expect = l.to_f64().unwrap() * f64::from(tj + 1) / dim;
                assert!((w.weight(tj) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn thermal_weights_concentrate_in_symmetric_sector() {
        let w = thermal_product_weights(&ens(2, 1), 20.0).unwrap();
        assert!((w.weight(2) - 1.0).abs() < 1e-8);
        let e = ens(4, 1);
        let mut prev = 0.0;
        for &b0 in &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let plus = thermal_product_weights(&e, b0).unwrap().weight(4);
            let minus = thermal_product_weights(&e, -b0).unwrap().weight(4);
            assert!((plus - minus).abs() < 1e-14);
            assert!(plus >= prev);
            prev = plus;
        }
        assert!(prev > 1.0 - 1e-5);
    }

    #[test]
    fn symmetric_weights_examples() {
        assert_eq!(
            symmetric_weights(&ens(5, 1)).as_map(),
            &BTreeMap::from([(5, 1.0)])
        );
        assert_eq!(
            symmetric_weights(&ens(1, 3)).as_map(),
            &BTreeMap::from([(3, 1.0)])
        );
        assert_eq!(
            symmetric_weights(&ens(2, 1)).as_map(),
            &BTreeMap::from([(2, 1.0)])
        );
    }

    #[test]
    fn weights_validation() {
        let e = ens(3, 1);
        assert!(BlockWeights::new(e, BTreeMap::from([(0, 1.0)])).is_err());
        assert!(BlockWeights::new(e, BTreeMap::from([(1, 0.5), (3, 0.4)])).is_err());
        assert!(BlockWeights::new(e, BTreeMap::from([(1, -0.5), (3, 1.5)])).is_err());
        assert!(BlockWeights::new(e, BTreeMap::from([(1, 0.25), (3, 0.75)])).is_ok());
        assert!(BlockWeights::new(ens(1, 3), BTreeMap::from([(1, 1.0)])).is_err());
        let w = BlockWeights::normalized(e, BTreeMap::from([(1, 2.0), (3, 6.0)])).unwrap();
        assert_eq!(w.weight(3), 0.75);
    }

    #[test]
    fn invalid_ensembles() {
        assert!(SpinEnsemble::new(0, 1).is_err());
        assert!(SpinEnsemble::new(1, 0).is_err());
    }
}
