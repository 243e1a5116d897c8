//! Dense density-matrix integration of the collective master equation
//!
//! ```text
//! dρ/dt = -i ω [J_z, ρ] + G(ω) D[J_-]ρ + G(-ω) D[J_+]ρ,
//! D[A]ρ = A ρ A† - ½{A†A, ρ},
//! ```
//!
//! in the product basis of up to [`ORACLE_DIM_CAP`] levels. Lamb-shift terms
//! are left out. The oracle also builds an explicit collective basis
//! `|J,m⟩_i` so that its states can be compared with the block-thermal
//! steady state and with the rate equations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{PopulationState, RatePair};
use crate::ode::{integrate, Tolerances};
use crate::spin::{block_partition_function, SpinEnsemble};
use crate::{Error, Result};

/// Largest Hilbert-space dimension the oracle accepts.
pub const ORACLE_DIM_CAP: usize = 64;

/// Tolerance of the [`DensityMatrix`] checks.
pub const STATE_TOL: f64 = 1e-10;

/// Residual `‖L(ρ)‖_F` at which [`LindbladOracle::steady_state`] stops.
pub const STEADY_RESIDUAL: f64 = 1e-12;

type CMat = DMatrix<Complex64>;

fn oracle_dim(ensemble: &SpinEnsemble) -> Result<usize> {
    match ensemble.dimension_usize() {
        Some(d) if d <= ORACLE_DIM_CAP => Ok(d),
        Some(d) => Err(Error::DimensionCap {
            dim: d,
            cap: ORACLE_DIM_CAP,
        }),
        None => Err(Error::DimensionCap {
            dim: usize::MAX,
            cap: ORACLE_DIM_CAP,
        }),
    }
}

/// Collective spin operators in the product basis. Basis index
/// `Σ_k d_k (2s+1)^k` with digit `d_k` for `m_k = -s + d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperators {
    pub ensemble: SpinEnsemble,
    /// Diagonal of `J_z`.
    pub jz: Vec<f64>,
    /// `J_+`, real in this basis; `J_- = J_+ᵀ`.
    pub j_plus: DMatrix<f64>,
}

impl SpinOperators {
    pub fn new(ensemble: &SpinEnsemble) -> Result<Self> {
        let dim = oracle_dim(ensemble)?;
        let base = ensemble.two_s() as usize + 1;
        let n = ensemble.n() as usize;
        let s = ensemble.s();
        let mut jz = vec![0.0; dim];
        let mut j_plus = DMatrix::zeros(dim, dim);
        for idx in 0..dim {
            let mut rest = idx;
            let mut stride = 1;
            for _ in 0..n {
                let d = rest % base;
                rest /= base;
                jz[idx] += d as f64 - s;
                if d + 1 < base {
                    // √((s - m)(s + m + 1)) with s - m = 2s - d and s + m + 1 = d + 1
                    let amp = (((base - 1 - d) * (d + 1)) as f64).sqrt();
                    j_plus[(idx + stride, idx)] += amp;
                }
                stride *= base;
            }
        }
        Ok(Self {
            ensemble: *ensemble,
            jz,
            j_plus,
        })
    }

    pub fn dim(&self) -> usize {
        self.jz.len()
    }

    pub fn j_minus(&self) -> DMatrix<f64> {
        self.j_plus.transpose()
    }

    /// `J² = J_z² + ½(J_+J_- + J_-J_+)`.
    pub fn j_squared(&self) -> DMatrix<f64> {
        let jm = self.j_minus();
        let mut j2 = (&self.j_plus * &jm + &jm * &self.j_plus) * 0.5;
        for (i, z) in self.jz.iter().enumerate() {
            j2[(i, i)] += z * z;
        }
        j2
    }
}

/// Label of a collective basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollectiveLevel {
    pub two_j: u32,
    /// Which of the `l_J` copies.
    pub copy: usize,
    /// `k = m + J`.
    pub k: usize,
}

/// Orthonormal `|J,m⟩_i` vectors consistent with the ladder: `J_-` maps
/// copy `i` into copy `i` of the same `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveBasis {
    pub levels: Vec<CollectiveLevel>,
    /// Column `c` holds the vector of `levels[c]`.
    pub vectors: DMatrix<f64>,
}

impl CollectiveBasis {
    pub fn new(ops: &SpinOperators) -> Result<Self> {
        let dim = ops.dim();
        let j2 = ops.j_squared();
        let jm = ops.j_minus();
        let mut levels = Vec::with_capacity(dim);
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(dim);
        for two_j in ops.ensemble.sectors() {
            let j = f64::from(two_j) / 2.0;
            // highest weights: J² eigenvectors with eigenvalue J(J+1) inside M = J
            let idx: Vec<usize> = (0..dim).filter(|&i| (ops.jz[i] - j).abs() < 1e-9).collect();
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| j2[(idx[a], idx[b])]);
            let eig = SymmetricEigen::new(sub);
            let mut copy = 0;
            for (c, &lam) in eig.eigenvalues.iter().enumerate() {
                if (lam - j * (j + 1.0)).abs() > 1e-8 {
                    continue;
                }
                let mut v = DVector::zeros(dim);
                for (a, &i) in idx.iter().enumerate() {
                    v[i] = eig.eigenvectors[(a, c)];
                }
                let mut ladder = vec![v];
                for k in (1..=two_j as usize).rev() {
                    // J_-|J,m⟩ = √((J+m)(J-m+1)) |J,m-1⟩ with J + m = k
                    let amp = ((k * (two_j as usize + 1 - k)) as f64).sqrt();
                    let next = &jm * ladder.last().expect("non-empty") / amp;
                    ladder.push(next);
                }
                ladder.reverse();
                for (k, v) in ladder.into_iter().enumerate() {
                    levels.push(CollectiveLevel { two_j, copy, k });
                    cols.push(v);
                }
                copy += 1;
            }
        }
        if cols.len() != dim {
            return Err(Error::InvalidInput(format!(
                "collective basis construction found {} of {dim} vectors",
                cols.len()
            )));
        }
        Ok(Self {
            levels,
            vectors: DMatrix::from_columns(&cols),
        })
    }

    fn vectors_c(&self) -> CMat {
        self.vectors.map(|x| Complex64::new(x, 0.0))
    }

    /// `Σ_c d_c |c⟩⟨c|`, a state diagonal in the collective basis.
    pub fn diagonal_state(&self, diag: &[f64]) -> Result<DensityMatrix> {
        if diag.len() != self.levels.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} populations, got {}",
                self.levels.len(),
                diag.len()
            )));
        }
        let u = self.vectors_c();
        let d = CMat::from_diagonal(&DVector::from_iterator(
            diag.len(),
            diag.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        DensityMatrix::new(&u * d * u.adjoint())
    }

    /// `⟨c|ρ|c⟩` for every basis vector.
    pub fn diagonal(&self, rho: &DensityMatrix) -> Vec<f64> {
        let u = self.vectors_c();
        let r = u.adjoint() * &rho.0 * u;
        (0..r.nrows()).map(|i| r[(i, i)].re).collect()
    }

    /// Sector weights `p_{J,i} = Σ_m ⟨J,m|ρ|J,m⟩_i`, keyed by `(2J, i)`.
    pub fn copy_weights(&self, rho: &DensityMatrix) -> BTreeMap<(u32, usize), f64> {
        let mut w = BTreeMap::new();
        for (lvl, p) in self.levels.iter().zip(self.diagonal(rho)) {
            *w.entry((lvl.two_j, lvl.copy)).or_insert(0.0) += p;
        }
        w
    }

    /// Populations `p_{J,m}` summed over copies.
    pub fn populations(&self, rho: &DensityMatrix, time: f64) -> PopulationState {
        let mut sectors: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for (lvl, p) in self.levels.iter().zip(self.diagonal(rho)) {
            sectors
                .entry(lvl.two_j)
                .or_insert_with(|| vec![0.0; lvl.two_j as usize + 1])[lvl.k] += p;
        }
        PopulationState::from_parts_unchecked(sectors, time)
    }

    /// The block-thermal state `Σ_{J,i} p_{J,i} e^{-m b}/Z_J |J,m⟩⟨J,m|_i`
    /// built from the copy weights of `rho0`, with `b` set by the rates.
    pub fn block_thermal_state(
        &self,
        rho0: &DensityMatrix,
        rates: RatePair,
    ) -> Result<DensityMatrix> {
        let weights = self.copy_weights(rho0);
        let b = rates.bath_b();
        let diag: Vec<f64> = self
            .levels
            .iter()
            .map(|lvl| {
                let p = weights[&(lvl.two_j, lvl.copy)];
                let j = f64::from(lvl.two_j) / 2.0;
                if b == f64::INFINITY {
                    if lvl.k == 0 {
                        p
                    } else {
                        0.0
                    }
                } else {
                    let m = lvl.k as f64 - j;
                    p * (-m * b - block_partition_function(lvl.two_j, b).ln()).exp()
                }
            })
            .collect();
        self.diagonal_state(&diag)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidInput(
                "a density matrix must be square and non-empty".into(),
            ));
        }
        let herm = (&m - m.adjoint()).camax();
        if herm > STATE_TOL {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidInput(format!("trace is {tr}, not 1")));
        }
        let min = SymmetricEigen::new(m.clone()).eigenvalues.min();
        if min < -STATE_TOL {
            return Err(Error::InvalidInput(format!(
                "matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(m))
    }

    /// Product Gibbs state `⊗_k e^{-b0 j_z}/Z_s(b0)`.
    pub fn product_thermal(ensemble: &SpinEnsemble, b0: f64) -> Result<Self> {
        let ops = SpinOperators::new(ensemble)?;
        let w: Vec<f64> = ops.jz.iter().map(|m| (-m * b0).exp()).collect();
        let z: f64 = w.iter().sum();
        let diag = DVector::from_iterator(w.len(), w.iter().map(|x| Complex64::new(x / z, 0.0)));
        Self::new(CMat::from_diagonal(&diag))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `½ ‖ρ - σ‖_1`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * SymmetricEigen::new(&self.0 - &other.0)
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
    }

    /// `Tr(ρ J_z)`.
    pub fn energy(&self, ops: &SpinOperators) -> f64 {
        ops.jz
            .iter()
            .enumerate()
            .map(|(i, z)| z * self.0[(i, i)].re)
            .sum()
    }
}

/// Right-hand side of the master equation on a fixed ensemble.
#[derive(Debug, Clone)]
pub struct LindbladOracle {
    pub ops: SpinOperators,
    pub rates: RatePair,
    /// Precession frequency `ω` in units of `G(ω)`.
    pub omega: f64,
    jm: CMat,
    jp: CMat,
    /// `½(G(ω) J_+J_- + G(-ω) J_-J_+)`.
    anti: CMat,
}

impl LindbladOracle {
    pub fn new(ensemble: &SpinEnsemble, rates: RatePair) -> Result<Self> {
        let ops = SpinOperators::new(ensemble)?;
        let jp = ops.j_plus.map(|x| Complex64::new(x, 0.0));
        let jm = jp.transpose();
        let anti = (&jp * &jm).map(|x| x * (0.5 * rates.g_down))
            + (&jm * &jp).map(|x| x * (0.5 * rates.g_up));
        Ok(Self {
            ops,
            rates,
            omega: 1.0,
            jm,
            jp,
            anti,
        })
    }

    pub fn rhs(&self, rho: &CMat) -> CMat {
        let g_down = Complex64::new(self.rates.g_down, 0.0);
        let g_up = Complex64::new(self.rates.g_up, 0.0);
        let mut out = &self.jm * rho * &self.jp * g_down + &self.jp * rho * &self.jm * g_up
            - &self.anti * rho
            - rho * &self.anti;
        let d = self.ops.dim();
        for a in 0..d {
            for b in 0..d {
                let w = self.omega * (self.ops.jz[a] - self.ops.jz[b]);
                out[(a, b)] += Complex64::new(0.0, -w) * rho[(a, b)];
            }
        }
        out
    }

    fn flatten(m: &CMat) -> Vec<f64> {
        m.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    fn unflatten(d: usize, y: &[f64]) -> CMat {
        CMat::from_iterator(d, d, y.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])))
    }

    /// `ρ(t)` from `ρ(0) = rho`.
    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "evolution time must be non-negative, got {t}"
            )));
        }
        let d = self.ops.dim();
        let tol = Tolerances {
            rtol: 1e-12,
            atol: 1e-15,
            ..Tolerances::default()
        };
        let y = integrate(
            |y, dy| {
                let r = self.rhs(&Self::unflatten(d, y));
                for (slot, v) in dy.chunks_exact_mut(2).zip(r.iter()) {
                    slot[0] = v.re;
                    slot[1] = v.im;
                }
            },
            &Self::flatten(rho.matrix()),
            t,
            tol,
        )?;
        let m = Self::unflatten(d, &y);
        // restore exact Hermiticity lost to rounding
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        DensityMatrix::new(m)
    }

    /// Integrates in chunks until `‖L(ρ)‖_F < STEADY_RESIDUAL`.
    pub fn steady_state(&self, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        let mut rho = rho0.clone();
        let mut t = 0.0;
        let mut chunk = 1.0;
        while self.rhs(rho.matrix()).norm() >= STEADY_RESIDUAL {
            if t > super::RELAXATION_T_MAX {
                return Err(Error::NonConvergence {
                    t_max: super::RELAXATION_T_MAX,
                });
            }
            rho = self.evolve(&rho, chunk)?;
            t += chunk;
            chunk *= 2.0;
        }
        Ok(rho)
    }
}

/// Long-time state of the master equation from `rho0`.
pub fn lindblad_oracle_steady_state(
    ensemble: &SpinEnsemble,
    rho0: &DensityMatrix,
    rates: RatePair,
) -> Result<DensityMatrix> {
    let oracle = LindbladOracle::new(ensemble, rates)?;
    if rho0.dim() != oracle.ops.dim() {
        return Err(Error::InvalidInput(format!(
            "state dimension {} does not match the ensemble ({})",
            rho0.dim(),
            oracle.ops.dim()
        )));
    }
    oracle.steady_state(rho0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{sector_multiplicities, thermal_product_weights};
    use num_traits::ToPrimitive;

    fn ens(n: u32, two_s: u32) -> SpinEnsemble {
        SpinEnsemble::new(n, two_s).unwrap()
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            SpinOperators::new(&ens(7, 1)),
            Err(Error::DimensionCap { dim: 128, cap: 64 })
        ));
        assert!(SpinOperators::new(&ens(6, 1)).is_ok());
        assert!(SpinOperators::new(&ens(3, 3)).is_ok());
    }

    #[test]
    fn commutation_relation() {
        // [J_+, J_-] = 2 J_z
        let ops = SpinOperators::new(&ens(3, 2)).unwrap();
        let jm = ops.j_minus();
        let c = &ops.j_plus * &jm - &jm * &ops.j_plus;
        let expect =
            DMatrix::from_diagonal(&DVector::from_vec(ops.jz.iter().map(|z| 2.0 * z).collect()));
        assert!((c - expect).amax() < 1e-12);
    }

    #[test]
    fn j_squared_spectrum_reproduces_multiplicities() {
        for (n, two_s) in [(2u32, 1u32), (3, 1), (4, 1), (2, 3), (3, 2), (5, 1)] {
            let e = ens(n, two_s);
            let ops = SpinOperators::new(&e).unwrap();
            let ev = SymmetricEigen::new(ops.j_squared()).eigenvalues;
            let table = sector_multiplicities(&e).unwrap();
            for (tj, l) in table.iter() {
                let j = f64::from(tj) / 2.0;
                let count = ev
                    .iter()
                    .filter(|&&x| (x - j * (j + 1.0)).abs() < 1e-8)
                    .count();
                assert_eq!(
                    count,
                    l.to_usize().unwrap() * (tj as usize + 1),
                    "n={n} 2s={two_s} 2J={tj}"
                );
            }
        }
    }

    #[test]
    fn collective_basis_is_orthonormal_and_ladder_consistent() {
        let ops = SpinOperators::new(&ens(4, 1)).unwrap();
        let basis = CollectiveBasis::new(&ops).unwrap();
        let u = &basis.vectors;
        assert!((u.transpose() * u - DMatrix::identity(16, 16)).amax() < 1e-12);
        let jm = ops.j_minus();
        let rotated = u.transpose() * jm * u;
        for (a, la) in basis.levels.iter().enumerate() {
            for (b, lb) in basis.levels.iter().enumerate() {
                let v = rotated[(a, b)];
                let same_ladder = la.two_j == lb.two_j && la.copy == lb.copy && la.k + 1 == lb.k;
                if !same_ladder {
                    assert!(v.abs() < 1e-12);
                } else {
                    let amp = ((lb.k * (la.two_j as usize + 1 - lb.k)) as f64).sqrt();
                    assert!((v - amp).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn thermal_weights_match_projector_traces() {
        for (n, two_s, b0) in [
            (3u32, 1u32, 1.0),
            (2, 1, 0.0),
            (4, 1, -0.7),
            (2, 3, 0.4),
            (3, 2, 2.0),
        ] {
            let e = ens(n, two_s);
            let ops = SpinOperators::new(&e).unwrap();
            let basis = CollectiveBasis::new(&ops).unwrap();
            let rho = DensityMatrix::product_thermal(&e, b0).unwrap();
            let w = thermal_product_weights(&e, b0).unwrap();
            let mut agg: BTreeMap<u32, f64> = BTreeMap::new();
            for ((tj, _), p) in basis.copy_weights(&rho) {
                *agg.entry(tj).or_insert(0.0) += p;
            }
            for (tj, p) in agg {
                assert!((p - w.weight(tj)).abs() < 1e-12, "n={n} 2J={tj}");
            }
        }
    }

    #[test]
    fn single_spin_thermalizes() {
        let e = ens(1, 3);
        let rates = RatePair::thermal(1.0, 0.8).unwrap();
        let rho0 = DensityMatrix::product_thermal(&e, -1.0).unwrap();
        let ss = lindblad_oracle_steady_state(&e, &rho0, rates).unwrap();
        let gibbs = DensityMatrix::product_thermal(&e, 0.8).unwrap();
        assert!(ss.trace_distance(&gibbs) < 1e-9);
    }

    #[test]
    fn two_qubits_reach_the_block_thermal_state() {
        let e = ens(2, 1);
        let rates = RatePair::thermal(1.0, 1.2).unwrap();
        let rho0 = DensityMatrix::product_thermal(&e, 0.3).unwrap();
        let ss = lindblad_oracle_steady_state(&e, &rho0, rates).unwrap();
        let ops = SpinOperators::new(&e).unwrap();
        let basis = CollectiveBasis::new(&ops).unwrap();
        let expect = basis.block_thermal_state(&rho0, rates).unwrap();
        assert!(ss.trace_distance(&expect) < 1e-9);
        let w = thermal_product_weights(&e, 0.3).unwrap();
        let pops = basis.populations(&ss, 0.0);
        assert!((pops.mass(0) - w.weight(0)).abs() < 1e-10);
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = CMat::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let mut nonherm = CMat::identity(2, 2) * Complex64::new(0.5, 0.0);
        nonherm[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(nonherm).is_err());
        let neg = CMat::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(neg).is_err());
    }
}
