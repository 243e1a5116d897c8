//! Relaxation trajectories from the rate equations or the dense oracle.

use std::collections::BTreeMap;

use colheat::dynamics::oracle::{CollectiveBasis, LindbladOracle, SpinOperators};
use colheat::dynamics::{
    collective_generator, evolve, independent_generator, relaxation_time, Generator,
    InitialCondition, PopulationState, RatePair,
};
use colheat::spin::format_half;
use colheat::BlockWeights;

use crate::error::{CliError, CliResult};
use crate::table::{format_value, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DynMode {
    /// Population rate equations of the collective generator.
    Rate,
    /// Dense Lindblad integration, small ensembles only.
    Oracle,
    /// One spin relaxing on its own; energies are scaled by `n`.
    Independent,
}

#[derive(Debug, Clone)]
pub struct DynamicsSpec {
    pub mode: DynMode,
    pub weights: BlockWeights,
    pub weights_label: String,
    pub init: InitialCondition,
    pub rates: RatePair,
    pub times: Vec<f64>,
    pub epsilon: f64,
    pub populations: bool,
}

fn population_columns(state: &PopulationState) -> Vec<String> {
    let mut cols = Vec::new();
    for (tj, v) in state.sectors() {
        for k in 0..v.len() {
            let two_m = 2 * k as i64 - i64::from(tj);
            let m = if two_m % 2 == 0 {
                (two_m / 2).to_string()
            } else {
                format!("{two_m}/2")
            };
            cols.push(format!("p_J{}_m{m}", format_half(tj)));
        }
    }
    cols
}

fn population_cells(state: &PopulationState) -> Vec<f64> {
    state
        .sectors()
        .flat_map(|(_, v)| v.iter().copied())
        .collect()
}

/// Diagonal oracle state with each sector weight shared evenly among the
/// degenerate copies and spread over the ladder as `init` prescribes.
fn oracle_initial(
    basis: &CollectiveBasis,
    weights: &BlockWeights,
    init: InitialCondition,
) -> Vec<f64> {
    let mut copies: BTreeMap<u32, usize> = BTreeMap::new();
    for l in basis.levels.iter().filter(|l| l.k == 0) {
        *copies.entry(l.two_j).or_insert(0) += 1;
    }
    let ladders: BTreeMap<u32, Vec<f64>> = copies
        .keys()
        .map(|&tj| {
            (
                tj,
                PopulationState::single(tj, init)
                    .sector(tj)
                    .map(<[f64]>::to_vec)
                    .unwrap_or_default(),
            )
        })
        .collect();
    basis
        .levels
        .iter()
        .map(|l| weights.weight(l.two_j) / copies[&l.two_j] as f64 * ladders[&l.two_j][l.k])
        .collect()
}

struct Trajectory {
    rows: Vec<(f64, PopulationState, f64)>,
    p0: PopulationState,
    generator: Generator,
}

fn rate_trajectory(
    spec: &DynamicsSpec,
    p0: PopulationState,
    generator: Generator,
    scale: f64,
) -> CliResult<Trajectory> {
    let mut rows = Vec::with_capacity(spec.times.len());
    for &t in &spec.times {
        let p = evolve(&p0, &generator, t)?;
        let energy = scale * p.energy();
        rows.push((t, p, energy));
    }
    Ok(Trajectory {
        rows,
        p0,
        generator,
    })
}

fn oracle_trajectory(spec: &DynamicsSpec) -> CliResult<Trajectory> {
    let e = spec.weights.ensemble();
    let oracle = LindbladOracle::new(&e, spec.rates)?;
    let ops = SpinOperators::new(&e)?;
    let basis = CollectiveBasis::new(&ops)?;
    let rho0 = basis.diagonal_state(&oracle_initial(&basis, &spec.weights, spec.init))?;
    let p0 = basis.populations(&rho0, 0.0);
    let mut rho = rho0;
    let mut now = 0.0;
    let mut rows = Vec::with_capacity(spec.times.len());
    for &t in &spec.times {
        rho = oracle.evolve(&rho, t - now)?;
        now = t;
        rows.push((t, basis.populations(&rho, t), rho.energy(&ops)));
    }
    Ok(Trajectory {
        rows,
        p0,
        generator: collective_generator(&e, spec.rates),
    })
}

/// Columns `t, energy, tv_to_steady` and optionally every `p_{J,m}`. A
/// trailing note carries the relaxation time to `epsilon` and the spectral
/// gap of the rate equations.
pub fn run_dynamics(spec: &DynamicsSpec) -> CliResult<Table> {
    if spec.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::usage("times must be finite and non-negative"));
    }
    if spec.times.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::usage("times must be non-decreasing"));
    }
    if !(spec.epsilon > 0.0 && spec.epsilon < 1.0) {
        return Err(CliError::usage(format!(
            "epsilon must lie in (0, 1), got {}",
            spec.epsilon
        )));
    }
    let e = spec.weights.ensemble();
    let traj = match spec.mode {
        DynMode::Rate => rate_trajectory(
            spec,
            PopulationState::from_weights(&spec.weights, spec.init),
            collective_generator(&e, spec.rates),
            1.0,
        )?,
        DynMode::Independent => rate_trajectory(
            spec,
            PopulationState::single(e.two_s(), spec.init),
            independent_generator(e.two_s(), spec.rates),
            f64::from(e.n()),
        )?,
        DynMode::Oracle => oracle_trajectory(spec)?,
    };
    let target = traj.p0.steady_state(&traj.generator)?;

    let mut columns = vec![
        "t_times_G".to_string(),
        "energy_over_hw".to_string(),
        "tv_to_steady".to_string(),
    ];
    if spec.populations {
        columns.extend(population_columns(&traj.p0));
    }
    let mut table = Table::new(columns);
    for (t, p, energy) in &traj.rows {
        let mut row = vec![*t, *energy, p.tv_distance(&target)];
        if spec.populations {
            row.extend(population_cells(p));
        }
        table.rows.push(row);
    }
    table.meta("mode", format!("{:?}", spec.mode).to_lowercase());
    table.meta("n", e.n());
    table.meta("s", format_half(e.two_s()));
    table.meta("weights", spec.weights_label.clone());
    table.meta("g_down", spec.rates.g_down);
    table.meta("g_up", spec.rates.g_up);
    table.meta("epsilon", spec.epsilon);
    if !table.rows.is_empty() {
        let r = relaxation_time(&traj.p0, &traj.generator, spec.epsilon)?;
        let gap = r.gap.map_or_else(|| "none".to_string(), format_value);
        table.notes.push(format!(
            "relaxation_time={}, gap={gap}",
            format_value(r.time)
        ));
        table.meta("relaxation_time", r.time);
        table.meta("gap", r.gap);
    }
    Ok(table)
}
