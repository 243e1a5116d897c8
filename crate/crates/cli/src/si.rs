//! Physical-unit report for a concrete level splitting `ħω`.

use colheat::spin::format_half;
use colheat::thermo::{
    critical_temperature_approx, critical_temperature_numeric, high_temperature_ratio,
};
use colheat::SpinEnsemble;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::table::{format_value, Format};

/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380649e-23;
/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// NV-centre electron spin splitting in J.
pub const NV_HBAR_OMEGA: f64 = 1.9e-24;
/// Cesium quasispin splitting in J.
pub const CESIUM_HBAR_OMEGA: f64 = 2.4e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct SiContext {
    pub hbar_omega_joule: f64,
    pub label: Option<String>,
}

impl SiContext {
    pub fn new(hbar_omega_joule: f64, label: Option<String>) -> CliResult<Self> {
        if !(hbar_omega_joule.is_finite() && hbar_omega_joule > 0.0) {
            return Err(CliError::usage(format!(
                "hbar-omega must be positive, got {hbar_omega_joule}"
            )));
        }
        Ok(Self {
            hbar_omega_joule,
            label,
        })
    }

    /// Temperature unit `ħω/k_B` in kelvin.
    pub fn kelvin_per_unit(&self) -> f64 {
        self.hbar_omega_joule / K_B
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// NV centres, ħω = 1.9e-24 J, n = 10, s = 1/2.
    Nv,
    /// Cesium quasispins, ħω = 2.4e-30 J, n = 10, s = 7/2.
    Cesium,
}

impl Preset {
    pub fn context(self) -> SiContext {
        match self {
            Preset::Nv => SiContext {
                hbar_omega_joule: NV_HBAR_OMEGA,
                label: Some("nv".into()),
            },
            Preset::Cesium => SiContext {
                hbar_omega_joule: CESIUM_HBAR_OMEGA,
                label: Some("cesium".into()),
            },
        }
    }

    /// Default `(n, 2s)`.
    pub fn ensemble(self) -> (u32, u32) {
        match self {
            Preset::Nv => (10, 1),
            Preset::Cesium => (10, 7),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiReport {
    pub ensemble: SpinEnsemble,
    pub context: SiContext,
    pub omega_rad_per_s: f64,
    pub unit_kelvin: f64,
    /// `None` for a single spin, which has no crossover.
    pub tcr_approx_kelvin: Option<f64>,
    pub tcr_numeric_kelvin: Option<f64>,
    /// `(ns+1)/(s+1)`.
    pub qfi_enhancement: f64,
    /// `√((s+1)/(ns+1))`.
    pub precision_ratio: f64,
    pub notes: Vec<String>,
}

pub fn si_report(context: &SiContext, ensemble: &SpinEnsemble) -> CliResult<SiReport> {
    let unit = context.kelvin_per_unit();
    let enhancement = high_temperature_ratio(ensemble);
    let (approx, numeric) = if ensemble.n() >= 2 {
        (
            Some(unit * critical_temperature_approx(ensemble)),
            Some(unit * critical_temperature_numeric(ensemble)?),
        )
    } else {
        (None, None)
    };
    let mut notes = Vec::new();
    if ensemble.n() < 2 {
        notes
            .push("single spin: collective and independent coupling coincide, no crossover".into());
    }
    if context.label.as_deref() == Some("cesium") {
        notes.push(
            "discrepancy: the paper quotes T_cr(n=2,s=7/2) ~ 5.5 nK and T_cr(n=10,s=7/2) ~ 12 nK for this splitting; \
             the crossover formula gives about 0.57 uK and 1.26 uK; the formula values are reported"
                .into(),
        );
    }
    Ok(SiReport {
        ensemble: *ensemble,
        context: context.clone(),
        omega_rad_per_s: context.hbar_omega_joule / HBAR,
        unit_kelvin: unit,
        tcr_approx_kelvin: approx,
        tcr_numeric_kelvin: numeric,
        qfi_enhancement: enhancement,
        precision_ratio: enhancement.recip().sqrt(),
        notes,
    })
}

impl SiReport {
    fn rows(&self) -> Vec<(&'static str, Option<f64>, &'static str)> {
        vec![
            ("hbar_omega", Some(self.context.hbar_omega_joule), "J"),
            ("omega", Some(self.omega_rad_per_s), "rad/s"),
            ("hbar_omega_over_kB", Some(self.unit_kelvin), "K"),
            ("Tcr_approx", self.tcr_approx_kelvin, "K"),
            ("Tcr_numeric", self.tcr_numeric_kelvin, "K"),
            ("qfi_enhancement_high_T", Some(self.qfi_enhancement), "1"),
            ("precision_ratio_high_T", Some(self.precision_ratio), "1"),
        ]
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = String::from("quantity,value,unit\n");
                for (q, v, u) in self.rows() {
                    let v = v.map_or_else(|| "none".to_string(), format_value);
                    s.push_str(&format!("{q},{v},{u}\n"));
                }
                for n in &self.notes {
                    s.push_str(&format!("# {n}\n"));
                }
                s
            }
            Format::Json => {
                let mut values = Map::new();
                for (q, v, u) in self.rows() {
                    values.insert(q.into(), json!({ "value": v, "unit": u }));
                }
                let doc = json!({
                    "metadata": {
                        "n": self.ensemble.n(),
                        "s": format_half(self.ensemble.two_s()),
                        "context": self.context.label,
                        "k_B": K_B,
                        "hbar": HBAR,
                    },
                    "values": Value::Object(values),
                    "notes": self.notes,
                });
                let mut out = serde_json::to_string_pretty(&doc).expect("reports serialize");
                out.push('\n');
                out
            }
        }
    }
}
