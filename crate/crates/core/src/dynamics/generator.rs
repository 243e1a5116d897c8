use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::RatePair;
use crate::spin::{format_half, SpinEnsemble};
use crate::{Error, Result};

/// Rate matrix of one sector `J` on the levels `k = m + J`.
///
/// The link between `k` and `k+1` carries `(2J-k)(k+1)`, i.e.
/// `(J-m)(J+m+1)`, times `G(ω)` downward and `G(-ω)` upward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGenerator {
    two_j: u32,
    rates: RatePair,
}

impl SectorGenerator {
    pub fn new(two_j: u32, rates: RatePair) -> Self {
        Self { two_j, rates }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn rates(&self) -> RatePair {
        self.rates
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// `(2J-k)(k+1)` for the link `k ↔ k+1`.
    pub fn link(&self, k: usize) -> f64 {
        ((self.two_j as usize - k) * (k + 1)) as f64
    }

    pub fn down_rate(&self, k: usize) -> f64 {
        self.rates.g_down * self.link(k)
    }

    pub fn up_rate(&self, k: usize) -> f64 {
        self.rates.g_up * self.link(k)
    }

    /// `dp = L p`.
    pub fn apply(&self, p: &[f64], dp: &mut [f64]) {
        let d = self.dim();
        dp[..d].fill(0.0);
        for k in 0..d - 1 {
            let down = self.down_rate(k) * p[k + 1];
            let up = self.up_rate(k) * p[k];
            dp[k] += down - up;
            dp[k + 1] += up - down;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d - 1 {
            let (down, up) = (self.down_rate(k), self.up_rate(k));
            m[(k, k + 1)] += down;
            m[(k + 1, k + 1)] -= down;
            m[(k + 1, k)] += up;
            m[(k, k)] -= up;
        }
        m
    }

    /// The stationary distribution, `π_k ∝ (G(-ω)/G(ω))^k`.
    pub fn stationary(&self) -> Vec<f64> {
        let d = self.dim();
        if self.rates.g_up == 0.0 {
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            return v;
        }
        let lr = self.rates.ln_ratio();
        let logs: Vec<f64> = (0..d).map(|k| k as f64 * lr).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    /// Eigenvalues of the generator, ascending. Detailed balance makes the
    /// generator similar to a symmetric tridiagonal matrix with off-diagonal
    /// `√(down·up)`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let mut s = DMatrix::zeros(d, d);
        for k in 0..d - 1 {
            let (down, up) = (self.down_rate(k), self.up_rate(k));
            let off = (down * up).sqrt();
            s[(k, k + 1)] = off;
            s[(k + 1, k)] = off;
            s[(k, k)] -= up;
            s[(k + 1, k + 1)] -= down;
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Smallest non-zero relaxation rate; `None` for a one-level sector.
    pub fn gap(&self) -> Option<f64> {
        if self.dim() < 2 {
            return None;
        }
        let ev = self.eigenvalues();
        // the largest eigenvalue is the stationary 0
        Some(-ev[ev.len() - 2])
    }
}

/// Block-diagonal generator over sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    blocks: BTreeMap<u32, SectorGenerator>,
}

impl Generator {
    pub fn block(&self, two_j: u32) -> Result<&SectorGenerator> {
        self.blocks.get(&two_j).ok_or_else(|| {
            Error::InvalidInput(format!(
                "the generator has no sector J = {}",
                format_half(two_j)
            ))
        })
    }

    pub fn blocks(&self) -> impl Iterator<Item = &SectorGenerator> {
        self.blocks.values()
    }
}

/// Collective dissipation of the ensemble: one ladder per sector `J`.
pub fn collective_generator(ensemble: &SpinEnsemble, rates: RatePair) -> Generator {
    Generator {
        blocks: ensemble
            .sectors()
            .map(|tj| (tj, SectorGenerator::new(tj, rates)))
            .collect(),
    }
}

/// Single-spin generator of independent dissipation, a ladder with `J = s`.
/// Product initial states stay products, so `n` spins are described by one.
pub fn independent_generator(two_s: u32, rates: RatePair) -> Generator {
    Generator {
        blocks: BTreeMap::from([(two_s, SectorGenerator::new(two_s, rates))]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(b: f64) -> RatePair {
        RatePair::thermal(1.0, b).unwrap()
    }

    #[test]
    fn singlet_block_is_zero() {
        let g = SectorGenerator::new(0, rates(1.0));
        assert_eq!(g.to_dense(), DMatrix::zeros(1, 1));
        assert_eq!(g.gap(), None);
    }

    #[test]
    fn qubit_block() {
        let r = RatePair::new(1.3, 0.4).unwrap();
        let g = SectorGenerator::new(1, r).to_dense();
        let expect = DMatrix::from_row_slice(2, 2, &[-0.4, 1.3, 0.4, -1.3]);
        assert_eq!(g, expect);
        assert_eq!(
            independent_generator(1, r).block(1).unwrap().to_dense(),
            expect
        );
    }

    #[test]
    fn columns_sum_to_zero_and_offdiagonals_are_nonnegative() {
        for two_j in 0..=30 {
            let g = SectorGenerator::new(two_j, rates(0.7)).to_dense();
            for c in 0..g.ncols() {
                let sum: f64 = g.column(c).iter().sum();
                assert!(sum.abs() < 1e-12);
                for r in 0..g.nrows() {
                    if r != c {
                        assert!(g[(r, c)] >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn gibbs_vector_is_annihilated() {
        let b: f64 = 0.9;
        let g = SectorGenerator::new(2, rates(b));
        let z = 1.0 + 2.0 * b.cosh();
        // m = -1, 0, 1
        let gibbs = nalgebra::DVector::from_vec(vec![b.exp() / z, 1.0 / z, (-b).exp() / z]);
        let r = g.to_dense() * &gibbs;
        assert!(r.amax() < 1e-14);
        let st = g.stationary();
        for (a, b) in st.iter().zip(gibbs.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn detailed_balance_per_link() {
        let b = 1.7;
        let g = SectorGenerator::new(9, rates(b));
        let pi = g.stationary();
        for k in 0..9 {
            let flux_down = g.down_rate(k) * pi[k + 1];
            let flux_up = g.up_rate(k) * pi[k];
            assert!((flux_down - flux_up).abs() < 1e-15);
            assert!((pi[k + 1] / pi[k] - (-b).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_temperature_absorbs_in_the_ground_state() {
        let g = SectorGenerator::new(3, RatePair::new(1.0, 0.0).unwrap());
        assert_eq!(g.stationary(), vec![1.0, 0.0, 0.0, 0.0]);
        let ev = g.eigenvalues();
        assert_eq!(ev[3], 0.0);
        // triangular: eigenvalues are the loss rates k(2J+1-k)
        assert_eq!(g.gap(), Some(3.0));
    }

    #[test]
    fn eigenvalues_match_dense_spectrum() {
        let g = SectorGenerator::new(6, rates(0.4));
        let dense = g.to_dense();
        let mut ev: Vec<f64> = dense.complex_eigenvalues().iter().map(|c| c.re).collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(g.eigenvalues()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn generator_exposes_every_sector() {
        let e = SpinEnsemble::new(3, 1).unwrap();
        let g = collective_generator(&e, rates(1.0));
        let labels: Vec<u32> = g.blocks().map(|b| b.two_j()).collect();
        assert_eq!(labels, vec![1, 3]);
        assert!(g.block(5).is_err());
    }
}
