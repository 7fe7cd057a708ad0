//! Built-in sweep bundles covering the standard comparison curves.
//!
//! Each scenario expands to a list of [`SweepSpec`]s sharing one density
//! grid; the runner concatenates their rows into a single table whose
//! `scenario` column is `<scenario>/<curve>`.

use udn_core::channel::{
    case1_model, preset_3gpp_case1, preset_single_slope, FadingKind, PathLossModel,
};
use udn_core::units::m_to_km;

use crate::config::{EngineSelection, McSettings, Metric, OutputFormat, SweepSpec};

/// A named bundle of sweeps run as one table.
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub sweeps: Vec<SweepSpec>,
}

/// 24 dBm transmit power in mW.
const TX_POWER_MW: f64 = 251.18864315095797;
/// -95 dBm noise in mW.
const NOISE_MW: f64 = 3.1622776601683795e-10;

struct Curve {
    label: &'static str,
    model: PathLossModel,
    height_diff_m: f64,
    fading: FadingKind,
    engines: EngineSelection,
}

impl Curve {
    fn new(label: &'static str, model: PathLossModel, height_diff_m: f64) -> Self {
        Self {
            label,
            model,
            height_diff_m,
            fading: FadingKind::Rayleigh,
            engines: EngineSelection::Analytic,
        }
    }

    fn engines(mut self, engines: EngineSelection) -> Self {
        self.engines = engines;
        self
    }

    fn rician(mut self) -> Self {
        self.fading = FadingKind::rician_3gpp();
        self.engines = EngineSelection::MonteCarlo;
        self
    }

    fn into_sweep(self, scenario: &str, metric: Metric) -> SweepSpec {
        SweepSpec {
            name: format!("{scenario}/{}", self.label),
            metric,
            threshold_db: 0.0,
            threshold_linear: 1.0,
            engines: self.engines,
            model: self.model,
            tx_power_mw: TX_POWER_MW,
            noise_mw: NOISE_MW,
            height_diff_km: m_to_km(self.height_diff_m),
            fading: self.fading,
            lambdas_per_km2: default_grid(),
            mc: McSettings::default(),
            output_path: None,
            format: OutputFormat::default(),
        }
    }
}

/// 0.1 to 1e5 BS/km^2, eight points per decade.
fn default_grid() -> Vec<f64> {
    let steps = 48;
    let (lmin, lmax) = (-1.0f64, 5.0f64);
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| 10f64.powf(lmin + (lmax - lmin) * k as f64 / steps as f64))
        .collect();
    grid[0] = 0.1;
    grid[steps] = 1e5;
    grid
}

fn single_slope() -> PathLossModel {
    preset_single_slope(10f64.powf(-14.54), 3.75)
}

fn case1_low_los_exponent() -> PathLossModel {
    case1_model(0.3, 10f64.powf(-10.38), 1.09, 10f64.powf(-14.54), 3.75)
        .expect("hard-coded variant model is valid")
}

/// All built-in scenarios.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        Scenario {
            name: "ase-overview",
            description: "Analytic ASE at 0 dB minimum SINR: single-slope and \
                          two-piece models, with and without antenna height difference",
            sweeps: vec![
                Curve::new("single-slope-l0", single_slope(), 0.0),
                Curve::new("case1-l0", preset_3gpp_case1(), 0.0),
                Curve::new("case1-l8.5m", preset_3gpp_case1(), 8.5),
            ]
            .into_iter()
            .map(|c| c.into_sweep("ase-overview", Metric::Ase))
            .collect(),
        },
        Scenario {
            name: "coverage-validation",
            description: "Coverage at 0 dB, analytic against Monte Carlo, for the \
                          single-slope and two-piece models at L = 0 and L = 8.5 m",
            sweeps: vec![
                Curve::new("single-slope-l0", single_slope(), 0.0).engines(EngineSelection::Both),
                Curve::new("single-slope-l8.5m", single_slope(), 8.5)
                    .engines(EngineSelection::Both),
                Curve::new("case1-l0", preset_3gpp_case1(), 0.0).engines(EngineSelection::Both),
                Curve::new("case1-l8.5m", preset_3gpp_case1(), 8.5).engines(EngineSelection::Both),
            ]
            .into_iter()
            .map(|c| c.into_sweep("coverage-validation", Metric::Coverage))
            .collect(),
        },
        Scenario {
            name: "ase-validation",
            description: "ASE at 0 dB minimum SINR, analytic against Monte Carlo, \
                          same four curves as coverage-validation",
            sweeps: vec![
                Curve::new("single-slope-l0", single_slope(), 0.0).engines(EngineSelection::Both),
                Curve::new("single-slope-l8.5m", single_slope(), 8.5)
                    .engines(EngineSelection::Both),
                Curve::new("case1-l0", preset_3gpp_case1(), 0.0).engines(EngineSelection::Both),
                Curve::new("case1-l8.5m", preset_3gpp_case1(), 8.5).engines(EngineSelection::Both),
            ]
            .into_iter()
            .map(|c| c.into_sweep("ase-validation", Metric::Ase))
            .collect(),
        },
        Scenario {
            name: "model-variants",
            description: "ASE sensitivity: antenna height 0/3.5/8.5 m, a near-field \
                          LoS exponent of 1.09, and Rician fading (simulation only)",
            sweeps: vec![
                Curve::new("case1-l0", preset_3gpp_case1(), 0.0),
                Curve::new("case1-l3.5m", preset_3gpp_case1(), 3.5),
                Curve::new("case1-l8.5m", preset_3gpp_case1(), 8.5),
                Curve::new("case1-losexp1.09-l8.5m", case1_low_los_exponent(), 8.5),
                Curve::new("case1-rician-l8.5m", preset_3gpp_case1(), 8.5).rician(),
            ]
            .into_iter()
            .map(|c| c.into_sweep("model-variants", Metric::Ase))
            .collect(),
        },
    ]
}

/// Looks up a built-in scenario by name.
pub fn find_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}
