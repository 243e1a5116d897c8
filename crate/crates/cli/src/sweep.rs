//! Parameter sweeps over temperature, `θ_h` or ensemble size.

use colheat::otto::{
    cycle_exact, power_near_carnot, power_ratio, work_near_carnot, work_saturation_bound,
    EngineMode, OttoParams,
};
use colheat::spin::format_half;
use colheat::thermo::{
    collective_heat_capacity, critical_temperature_approx, critical_temperature_numeric,
    heat_capacity_ratio, independent_heat_capacity,
};
use colheat::thermometry::{min_relative_stddev, min_relative_stddev_independent};
use colheat::{BlockWeights, Error, SpinEnsemble};
use rayon::prelude::*;

use crate::args::Grid;
use crate::dynamics::{run_dynamics, DynamicsSpec};
use crate::error::{CliError, CliResult};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    HeatCapacity,
    HcRatio,
    Precision,
    PrecisionRatio,
    Work,
    Power,
    PowerRatio,
    Tcr,
    Dynamics,
}

/// Otto-cycle settings shared by the work and power sweeps. The swept
/// variable is `x = k_B T_h/(ħω λ_h)`, so `θ_h = 1/x` and `b_h = θ_h/λ_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineSettings {
    pub lambda_h: f64,
    /// Fixed `λ_c`; when absent `λ_c` follows from `delta_eta`.
    pub lambda_c: Option<f64>,
    pub delta_b: f64,
    pub delta_eta: f64,
    pub tau_ind: f64,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self {
            lambda_h: 1.0,
            lambda_c: None,
            delta_b: 0.1,
            delta_eta: 0.01,
            tau_ind: 1.0,
        }
    }
}

impl EngineSettings {
    pub fn params(&self, theta_h: f64) -> CliResult<OttoParams> {
        let b_h = theta_h / self.lambda_h;
        Ok(match self.lambda_c {
            Some(lc) => OttoParams::new(lc, self.lambda_h, b_h + self.delta_b, b_h)?,
            None => OttoParams::near_carnot(self.lambda_h, b_h, self.delta_b, self.delta_eta)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub weights: BlockWeights,
    /// How the weights were obtained, for the metadata.
    pub weights_label: String,
    pub grid: Grid,
    pub engine: EngineSettings,
    /// Number of repeated measurements in the precision bounds.
    pub nu: u64,
    /// Required for [`Quantity::Dynamics`].
    pub dynamics: Option<DynamicsSpec>,
}

impl SweepSpec {
    pub fn ensemble(&self) -> SpinEnsemble {
        self.weights.ensemble()
    }

    fn is_symmetric(&self) -> bool {
        self.weights.is_single_sector() && self.weights.max_two_j() == self.ensemble().two_j_max()
    }
}

/// Column names, the swept variable first.
pub fn columns(quantity: Quantity) -> &'static [&'static str] {
    match quantity {
        Quantity::HeatCapacity => &["kT_over_hw", "C_col_over_kB", "C_ind_over_kB"],
        Quantity::HcRatio => &["kT_over_hw", "C_col_over_C_ind"],
        Quantity::Precision => &["kT_over_hw", "D_col_rel_stddev", "D_ind_rel_stddev"],
        Quantity::PrecisionRatio => &["kT_over_hw", "D_col_over_D_ind"],
        Quantity::Work => &[
            "kTh_over_hw_lambda_h",
            "w_col",
            "w_ind",
            "W_col_over_hw",
            "W_ind_over_hw",
            "W_saturation_over_hw",
        ],
        Quantity::Power => &[
            "kTh_over_hw_lambda_h",
            "p_col",
            "p_ind",
            "P_col_over_hw_G",
            "P_ind_over_hw_G",
        ],
        Quantity::PowerRatio => &["kTh_over_hw_lambda_h", "P_col_over_P_ind"],
        Quantity::Tcr => &[
            "n",
            "Tcr_approx_kT_over_hw",
            "Tcr_numeric_kT_over_hw",
            "rel_gap",
        ],
        Quantity::Dynamics => &[],
    }
}

fn positive(x: f64, what: &str) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::usage(format!("{what} must be positive, got {x}")))
    }
}

/// `ΔT/T` bound, infinite where the heat capacity vanishes.
fn precision_value(r: colheat::Result<colheat::thermometry::PrecisionBound>) -> CliResult<f64> {
    match r {
        Ok(p) => Ok(p.bound()),
        Err(Error::InfiniteBound) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 && num == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}

/// One table row at grid value `x`.
pub fn evaluate(spec: &SweepSpec, x: f64) -> CliResult<Vec<f64>> {
    let e = spec.ensemble();
    let w = &spec.weights;
    let row = match spec.quantity {
        Quantity::HeatCapacity => {
            let b = 1.0 / positive(x, "kT/ħω")?;
            vec![
                x,
                collective_heat_capacity(w, b).c_over_kb,
                independent_heat_capacity(&e, b).c_over_kb,
            ]
        }
        Quantity::HcRatio => {
            let b = 1.0 / positive(x, "kT/ħω")?;
            let r = if spec.is_symmetric() {
                heat_capacity_ratio(&e, b)
            } else {
                ratio(
                    collective_heat_capacity(w, b).c_over_kb,
                    independent_heat_capacity(&e, b).c_over_kb,
                )
            };
            vec![x, r]
        }
        Quantity::Precision => {
            let b = 1.0 / positive(x, "kT/ħω")?;
            vec![
                x,
                precision_value(min_relative_stddev(w, b, spec.nu))?,
                precision_value(min_relative_stddev_independent(&e, b, spec.nu))?,
            ]
        }
        Quantity::PrecisionRatio => {
            let b = 1.0 / positive(x, "kT/ħω")?;
            let r = if spec.is_symmetric() {
                1.0 / heat_capacity_ratio(&e, b).sqrt()
            } else {
                ratio(
                    independent_heat_capacity(&e, b).c_over_kb,
                    collective_heat_capacity(w, b).c_over_kb,
                )
                .sqrt()
            };
            vec![x, r]
        }
        Quantity::Work => {
            let p = spec.engine.params(1.0 / positive(x, "kT_h/ħωλ_h")?)?;
            let scale = p.delta_eta() * p.lambda_h * p.lambda_h * p.delta_b();
            vec![
                x,
                work_near_carnot(w, EngineMode::Collective, &p) / scale,
                work_near_carnot(w, EngineMode::Independent, &p) / scale,
                cycle_exact(w, EngineMode::Collective, &p).work_extracted,
                cycle_exact(w, EngineMode::Independent, &p).work_extracted,
                work_saturation_bound(&p),
            ]
        }
        Quantity::Power => {
            let p = spec.engine.params(1.0 / positive(x, "kT_h/ħωλ_h")?)?;
            let tau = spec.engine.tau_ind;
            let scale = p.delta_eta() * p.lambda_h * p.lambda_h * p.delta_b();
            let col = power_near_carnot(&e, &p, tau, EngineMode::Collective)?;
            let ind = power_near_carnot(&e, &p, tau, EngineMode::Independent)?;
            vec![x, col * tau / scale, ind * tau / scale, col, ind]
        }
        Quantity::PowerRatio => vec![x, power_ratio(&e, 1.0 / positive(x, "kT_h/ħωλ_h")?)],
        Quantity::Tcr => {
            let n = x.round();
            if !(2.0..=f64::from(u32::MAX)).contains(&n) {
                return Err(CliError::usage(format!(
                    "tcr sweeps n over values >= 2, got {x}"
                )));
            }
            let ens = SpinEnsemble::new(n as u32, e.two_s())?;
            let approx = critical_temperature_approx(&ens);
            let numeric = critical_temperature_numeric(&ens)?;
            vec![n, approx, numeric, (numeric - approx).abs() / numeric]
        }
        Quantity::Dynamics => return Err(CliError::usage("dynamics rows come from run_dynamics")),
    };
    Ok(row)
}

/// Evaluates the sweep in parallel; rows keep the grid order.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Table> {
    if spec.quantity == Quantity::Dynamics {
        let mut d = spec
            .dynamics
            .clone()
            .ok_or_else(|| CliError::usage("the dynamics quantity needs dynamics settings"))?;
        d.times = spec.grid.values();
        let mut t = run_dynamics(&d)?;
        t.meta("grid", spec.grid.to_string());
        return Ok(t);
    }
    if spec.nu == 0 {
        return Err(CliError::usage("nu must be at least 1"));
    }
    positive(spec.engine.tau_ind, "tau_ind")?;
    let rows = spec
        .grid
        .values()
        .into_par_iter()
        .map(|x| evaluate(spec, x))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(columns(spec.quantity).iter().copied());
    table.rows = rows;
    let e = spec.ensemble();
    table.meta("quantity", format!("{:?}", spec.quantity));
    table.meta("n", e.n());
    table.meta("s", format_half(e.two_s()));
    table.meta("weights", spec.weights_label.clone());
    table.meta("grid", spec.grid.to_string());
    if matches!(spec.quantity, Quantity::Work | Quantity::Power) {
        table.meta("lambda_h", spec.engine.lambda_h);
        table.meta("delta_b", spec.engine.delta_b);
        match spec.engine.lambda_c {
            Some(lc) => table.meta("lambda_c", lc),
            None => table.meta("delta_eta", spec.engine.delta_eta),
        }
        if spec.quantity == Quantity::Power {
            table.meta("tau_ind", spec.engine.tau_ind);
        }
    }
    if matches!(spec.quantity, Quantity::Precision) {
        table.meta("nu", spec.nu);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use colheat::spin::{symmetric_weights, thermal_product_weights};
    use colheat::thermo::block_heat_capacity;

    fn spec(q: Quantity, n: u32, two_s: u32, grid: &str) -> SweepSpec {
        let e = SpinEnsemble::new(n, two_s).unwrap();
        SweepSpec {
            quantity: q,
            weights: symmetric_weights(&e),
            weights_label: "symmetric".into(),
            grid: grid.parse().unwrap(),
            engine: EngineSettings::default(),
            nu: 1,
            dynamics: None,
        }
    }

    #[test]
    fn heat_capacity_rows_follow_the_grid() {
        let t = run_sweep(&spec(Quantity::HeatCapacity, 3, 1, "0.1:10:7:log")).unwrap();
        assert_eq!(t.rows.len(), 7);
        for r in &t.rows {
            let b = 1.0 / r[0];
            assert!((r[1] - block_heat_capacity(3, b)).abs() < 1e-15);
            assert!((r[2] - 3.0 * block_heat_capacity(1, b)).abs() < 1e-15);
        }
    }

    #[test]
    fn hc_ratio_asymptote_for_a_pair_of_qubits() {
        let t = run_sweep(&spec(Quantity::HcRatio, 2, 1, "1000:1000:1:log")).unwrap();
        assert!((t.rows[0][1] - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn precision_ratio_is_the_inverse_root_of_the_capacity_ratio() {
        let a = run_sweep(&spec(Quantity::PrecisionRatio, 4, 3, "0.2:50:9:log")).unwrap();
        let b = run_sweep(&spec(Quantity::HcRatio, 4, 3, "0.2:50:9:log")).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x[1] * x[1] * y[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_weights_use_the_general_ratio() {
        let e = SpinEnsemble::new(4, 1).unwrap();
        let mut s = spec(Quantity::HcRatio, 4, 1, "0.5:5:4:log");
        s.weights = thermal_product_weights(&e, 0.7).unwrap();
        let t = run_sweep(&s).unwrap();
        for r in &t.rows {
            let b = 1.0 / r[0];
            let want = collective_heat_capacity(&s.weights, b).c_over_kb
                / (4.0 * block_heat_capacity(1, b));
            assert!((r[1] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn work_columns_are_consistent() {
        let t = run_sweep(&spec(Quantity::Work, 5, 1, "0.1:100:20:log")).unwrap();
        for r in &t.rows {
            // reduced work is C/θ², at most J(J+1)/3
            assert!(r[1] <= 2.5 * 3.5 / 3.0 + 1e-12);
            // first order work sits below the saturation ceiling
            assert!(r[1] * 0.01 * 0.1 <= r[5] * (1.0 + 1e-12));
            if r[0] >= 1.0 {
                assert!(r[3] > 0.0 && r[4] > 0.0);
            }
        }
    }

    #[test]
    fn power_ratio_matches_the_reduced_powers() {
        let a = run_sweep(&spec(Quantity::Power, 10, 1, "0.05:50:11:log")).unwrap();
        let b = run_sweep(&spec(Quantity::PowerRatio, 10, 1, "0.05:50:11:log")).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x[1] / x[2] - y[1]).abs() < 1e-10 * y[1]);
        }
    }

    #[test]
    fn tcr_rows() {
        let t = run_sweep(&spec(Quantity::Tcr, 1, 1, "2:10:3:lin")).unwrap();
        assert_eq!(t.column("n").unwrap(), vec![2.0, 6.0, 10.0]);
        assert!(t.rows.iter().all(|r| r[3] < 0.1));
        assert!(run_sweep(&spec(Quantity::Tcr, 1, 1, "1:2:2:lin")).is_err());
    }

    #[test]
    fn zero_temperature_is_rejected() {
        let err = run_sweep(&spec(Quantity::HeatCapacity, 2, 1, "0:1:3:lin")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn empty_grid_gives_an_empty_table() {
        let t = run_sweep(&spec(Quantity::HeatCapacity, 2, 1, "1:2:0:log")).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.to_csv(), "kT_over_hw,C_col_over_kB,C_ind_over_kB\n");
    }
}
