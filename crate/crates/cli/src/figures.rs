//! Data behind each figure of the paper, one column per curve.

use colheat::spin::{format_half, symmetric_weights};
use colheat::thermo::{critical_temperature_approx, high_temperature_ratio};
use colheat::SpinEnsemble;

use crate::args::Grid;
use crate::error::CliResult;
use crate::sweep::{columns, run_sweep, EngineSettings, Quantity, SweepSpec};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    #[value(name = "1a")]
    F1a,
    #[value(name = "1b")]
    F1b,
    #[value(name = "2a")]
    F2a,
    #[value(name = "2b")]
    F2b,
    #[value(name = "3a")]
    F3a,
    #[value(name = "3b")]
    F3b,
    #[value(name = "4")]
    F4,
    #[value(name = "5a")]
    F5a,
    #[value(name = "5b")]
    F5b,
}

/// `(n, 2s)` of the curves.
const SPIN_CURVES: [(u32, u32); 3] = [(2, 1), (2, 3), (2, 9)];
const SIZE_CURVES: [(u32, u32); 5] = [(2, 1), (5, 1), (10, 1), (100, 1), (100, 3)];

pub struct Preset {
    pub quantity: Quantity,
    pub curves: &'static [(u32, u32)],
    pub grid: Grid,
    /// Indices of the per-curve columns kept from the sweep.
    pub keep: &'static [usize],
}

fn grid(text: &str) -> Grid {
    text.parse().expect("preset grids are valid")
}

pub fn preset(figure: Figure) -> Preset {
    let temps = "0.01:100:400:log";
    let ratios = "0.025:1e4:400:log";
    let (quantity, curves, g, keep): (_, &'static [(u32, u32)], _, &'static [usize]) = match figure
    {
        Figure::F1a => (Quantity::HeatCapacity, &SPIN_CURVES, temps, &[1, 2]),
        Figure::F1b => (Quantity::HcRatio, &SPIN_CURVES, ratios, &[1]),
        Figure::F2a => (Quantity::HeatCapacity, &SIZE_CURVES, temps, &[1, 2]),
        Figure::F2b => (Quantity::HcRatio, &SIZE_CURVES, ratios, &[1]),
        Figure::F3a => (Quantity::Precision, &SIZE_CURVES, temps, &[1, 2]),
        Figure::F3b => (Quantity::PrecisionRatio, &SIZE_CURVES, ratios, &[1]),
        Figure::F4 => (Quantity::Work, &SIZE_CURVES, temps, &[1, 2]),
        Figure::F5a => (Quantity::Power, &SIZE_CURVES, "1/30:1e4:400:log", &[1, 2]),
        Figure::F5b => (Quantity::PowerRatio, &SIZE_CURVES, "1/30:1e4:400:log", &[1]),
    };
    Preset {
        quantity,
        curves,
        grid: grid(g),
        keep,
    }
}

pub fn curve_label(n: u32, two_s: u32) -> String {
    format!("_n{n}_s{}", format_half(two_s))
}

/// Asymptotes and crossover temperatures drawn as guide lines.
fn guide_notes(figure: Figure, e: &SpinEnsemble) -> Option<String> {
    let label = format!("n={} s={}", e.n(), format_half(e.two_s()));
    let ratio = high_temperature_ratio(e);
    let tcr = critical_temperature_approx(e);
    match figure {
        Figure::F1b | Figure::F2b => {
            Some(format!("{label} high_T_ratio={ratio:e} Tcr_approx={tcr:e}"))
        }
        Figure::F3b => Some(format!(
            "{label} high_T_ratio={:e} Tcr_approx={tcr:e}",
            ratio.recip().sqrt()
        )),
        Figure::F5b => Some(format!(
            "{label} low_theta_ratio={:e}",
            f64::from(e.n()) * ratio
        )),
        _ => None,
    }
}

pub fn run_figure(figure: Figure) -> CliResult<Table> {
    let p = preset(figure);
    let names = columns(p.quantity);
    let mut table = Table::new([names[0]]);
    table.rows = p.grid.values().into_iter().map(|x| vec![x]).collect();
    for &(n, two_s) in p.curves {
        let e = SpinEnsemble::new(n, two_s)?;
        let spec = SweepSpec {
            quantity: p.quantity,
            weights: symmetric_weights(&e),
            weights_label: "symmetric".into(),
            grid: p.grid,
            engine: EngineSettings::default(),
            nu: 1,
            dynamics: None,
        };
        let sweep = run_sweep(&spec)?;
        for &k in p.keep {
            table
                .columns
                .push(format!("{}{}", names[k], curve_label(n, two_s)));
            for (row, src) in table.rows.iter_mut().zip(&sweep.rows) {
                row.push(src[k]);
            }
        }
        table.notes.extend(guide_notes(figure, &e));
    }
    table.meta(
        "figure",
        format!("{figure:?}").trim_start_matches('F').to_string(),
    );
    table.meta("grid", p.grid.to_string());
    table.meta("weights", "symmetric");
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::ValueEnum;

    #[test]
    fn every_preset_runs() {
        for f in Figure::value_variants() {
            let p = preset(*f);
            let t = run_figure(*f).unwrap();
            assert_eq!(t.rows.len(), p.grid.points);
            assert_eq!(t.columns.len(), 1 + p.curves.len() * p.keep.len());
            assert!(t.rows.iter().flatten().all(|v| !v.is_nan()), "{f:?}");
        }
    }

    #[test]
    fn fig1b_endpoints() {
        let t = run_figure(Figure::F1b).unwrap();
        let last = t.rows.last().unwrap();
        for (i, &(n, two_s)) in SPIN_CURVES.iter().enumerate() {
            let e = SpinEnsemble::new(n, two_s).unwrap();
            assert!((last[i + 1] / high_temperature_ratio(&e) - 1.0).abs() < 0.02);
            assert!((t.rows[0][i + 1] * f64::from(n) - 1.0).abs() < 0.02);
        }
        assert_eq!(t.notes.len(), 3);
    }
}
