//! Sweep configuration: TOML parsing, validation, and unit conversion.
//!
//! Configs use field units (metres, dBm, dB); everything is converted to
//! the engine units (km, mW, linear ratios) during validation so a parsed
//! [`SweepSpec`] is ready to run.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;
use udn_core::analytic::NetworkParams;
use udn_core::channel::{
    case1_model, preset_single_slope, FadingKind, LosProbForm, LosProbPiece, PathLossModel,
    PathLossPiece,
};
use udn_core::units::{db_to_linear, dbm_to_mw, m_to_km};

/// What a sweep estimates at each density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `Pr[SINR > threshold]`.
    Coverage,
    /// Area spectral efficiency above the minimum working SINR, bps/Hz/km^2.
    Ase,
}

/// Which evaluation routes run per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineSelection {
    Analytic,
    MonteCarlo,
    Both,
}

impl EngineSelection {
    pub fn runs_analytic(self) -> bool {
        matches!(self, EngineSelection::Analytic | EngineSelection::Both)
    }

    pub fn runs_monte_carlo(self) -> bool {
        matches!(self, EngineSelection::MonteCarlo | EngineSelection::Both)
    }
}

/// Output encoding for the result table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!(
                "unknown format `{other}`, expected `csv` or `json`"
            )),
        }
    }
}

/// Monte Carlo execution settings.
#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    /// Relative bound on the mean interference neglected by disc truncation.
    pub epsilon: f64,
    /// Densities at or above this run analytic-only (noted in the table).
    pub skip_above_per_km2: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 1,
            epsilon: 0.005,
            skip_above_per_km2: 1e5,
        }
    }
}

/// A fully validated sweep, in engine units.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Scenario label written to every output row.
    pub name: String,
    pub metric: Metric,
    /// The configured threshold in dB (coverage) or minimum working SINR
    /// in dB (ASE); echoed in the output.
    pub threshold_db: f64,
    pub threshold_linear: f64,
    pub engines: EngineSelection,
    pub model: PathLossModel,
    pub tx_power_mw: f64,
    pub noise_mw: f64,
    pub height_diff_km: f64,
    pub fading: FadingKind,
    /// Increasing BS densities to evaluate.
    pub lambdas_per_km2: Vec<f64>,
    pub mc: McSettings,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl SweepSpec {
    /// Parses and validates a TOML config.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        raw.build()
    }

    /// Network parameters at one grid density.
    pub fn params_at(&self, lambda_per_km2: f64) -> NetworkParams {
        NetworkParams {
            density_per_km2: lambda_per_km2,
            tx_power_mw: self.tx_power_mw,
            noise_mw: self.noise_mw,
            height_diff_km: self.height_diff_km,
            fading: self.fading,
        }
    }
}

/// Configuration failures; each message names the offending key.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    /// Coverage threshold in dB; selects the coverage metric.
    gamma_db: Option<f64>,
    /// Minimum working SINR in dB; selects the ASE metric.
    gamma0_db: Option<f64>,
    engines: Option<String>,
    model: Option<RawModel>,
    network: Option<RawNetwork>,
    grid: Option<RawGrid>,
    mc: Option<RawMc>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    preset: String,
    // 3gpp-case1 overrides.
    los_break_m: Option<f64>,
    los_amplitude: Option<f64>,
    los_exponent: Option<f64>,
    nlos_amplitude: Option<f64>,
    nlos_exponent: Option<f64>,
    // single-slope overrides.
    amplitude: Option<f64>,
    exponent: Option<f64>,
    // Fully custom piece list.
    piece: Option<Vec<RawPiece>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    /// Upper 3D-distance edge in metres; `inf` on the last piece.
    upper_break_m: f64,
    los_amplitude: f64,
    los_exponent: f64,
    nlos_amplitude: f64,
    nlos_exponent: f64,
    /// "linear", "constant", or "zero".
    los_prob_form: String,
    los_prob_intercept: Option<f64>,
    los_prob_slope_per_km: Option<f64>,
    los_prob_value: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    height_diff_m: f64,
    tx_power_dbm: Option<f64>,
    noise_dbm: Option<f64>,
    fading: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lambda_min_per_km2: Option<f64>,
    lambda_max_per_km2: Option<f64>,
    points_per_decade: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    trials: Option<u64>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    skip_above_per_km2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<String>,
}

const DEFAULT_TX_POWER_DBM: f64 = 24.0;
const DEFAULT_NOISE_DBM: f64 = -95.0;
const DEFAULT_LAMBDA_MIN: f64 = 0.1;
const DEFAULT_LAMBDA_MAX: f64 = 1e5;
const DEFAULT_POINTS_PER_DECADE: u32 = 8;

impl RawConfig {
    fn build(self) -> Result<SweepSpec, ConfigError> {
        let (metric, threshold_db) = match (self.gamma_db, self.gamma0_db) {
            (Some(g), None) => (Metric::Coverage, g),
            (None, Some(g)) => (Metric::Ase, g),
            (None, None) => return Err(ConfigError::Missing("gamma_db or gamma0_db")),
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "gamma_db",
                    "set exactly one of `gamma_db` (coverage) and `gamma0_db` (ASE)",
                ));
            }
        };
        if !threshold_db.is_finite() {
            let key = match metric {
                Metric::Coverage => "gamma_db",
                Metric::Ase => "gamma0_db",
            };
            return Err(invalid(key, "threshold must be finite"));
        }
        let threshold_linear = db_to_linear(threshold_db);

        let engines = match self.engines.as_deref().unwrap_or("analytic") {
            "analytic" => EngineSelection::Analytic,
            "montecarlo" => EngineSelection::MonteCarlo,
            "both" => EngineSelection::Both,
            other => {
                return Err(invalid(
                    "engines",
                    format!("unknown engine selection `{other}`, expected `analytic`, `montecarlo`, or `both`"),
                ))
            }
        };

        let network = self.network.ok_or(ConfigError::Missing("network"))?;
        let height_diff_m = network.height_diff_m;
        if height_diff_m < 0.0 || !height_diff_m.is_finite() {
            return Err(invalid(
                "network.height_diff_m",
                format!("must be a finite non-negative height, got {height_diff_m}"),
            ));
        }
        let tx_power_dbm = network.tx_power_dbm.unwrap_or(DEFAULT_TX_POWER_DBM);
        if !tx_power_dbm.is_finite() {
            return Err(invalid("network.tx_power_dbm", "must be finite"));
        }
        let noise_dbm = network.noise_dbm.unwrap_or(DEFAULT_NOISE_DBM);
        if noise_dbm.is_nan() || noise_dbm == f64::INFINITY {
            return Err(invalid(
                "network.noise_dbm",
                "must be finite (or -inf for a noiseless network)",
            ));
        }
        let fading = match network.fading.as_deref().unwrap_or("rayleigh") {
            "rayleigh" => FadingKind::Rayleigh,
            "rician" => FadingKind::rician_3gpp(),
            other => {
                return Err(invalid(
                    "network.fading",
                    format!("unknown fading `{other}`, expected `rayleigh` or `rician`"),
                ))
            }
        };
        if matches!(fading, FadingKind::Rician { .. }) && engines.runs_analytic() {
            return Err(invalid(
                "network.fading",
                "rician fading is simulation-only; set engines = \"montecarlo\"",
            ));
        }

        let model = self.model.ok_or(ConfigError::Missing("model"))?.build()?;

        let grid = self.grid.unwrap_or(RawGrid {
            lambda_min_per_km2: None,
            lambda_max_per_km2: None,
            points_per_decade: None,
        });
        let lambda_min = grid.lambda_min_per_km2.unwrap_or(DEFAULT_LAMBDA_MIN);
        let lambda_max = grid.lambda_max_per_km2.unwrap_or(DEFAULT_LAMBDA_MAX);
        if lambda_min <= 0.0 || !lambda_min.is_finite() {
            return Err(invalid(
                "grid.lambda_min_per_km2",
                format!("must be a positive finite density, got {lambda_min}"),
            ));
        }
        if !lambda_max.is_finite() || lambda_max < lambda_min {
            return Err(invalid(
                "grid.lambda_max_per_km2",
                format!("must be finite and >= lambda_min_per_km2, got {lambda_max}"),
            ));
        }
        let ppd = grid.points_per_decade.unwrap_or(DEFAULT_POINTS_PER_DECADE);
        if ppd == 0 || ppd > 1000 {
            return Err(invalid(
                "grid.points_per_decade",
                format!("must lie in 1..=1000, got {ppd}"),
            ));
        }
        let lambdas_per_km2 = log_grid(lambda_min, lambda_max, ppd);

        let mc_raw = self.mc.unwrap_or(RawMc {
            trials: None,
            seed: None,
            epsilon: None,
            skip_above_per_km2: None,
        });
        let defaults = McSettings::default();
        let mc = McSettings {
            trials: mc_raw.trials.unwrap_or(defaults.trials),
            seed: mc_raw.seed.unwrap_or(defaults.seed),
            epsilon: mc_raw.epsilon.unwrap_or(defaults.epsilon),
            skip_above_per_km2: mc_raw
                .skip_above_per_km2
                .unwrap_or(defaults.skip_above_per_km2),
        };
        if mc.trials < 100 {
            return Err(invalid(
                "mc.trials",
                format!(
                    "interval estimates need at least 100 trials, got {}",
                    mc.trials
                ),
            ));
        }
        if !(mc.epsilon > 0.0 && mc.epsilon < 1.0) {
            return Err(invalid(
                "mc.epsilon",
                format!("must lie in (0, 1), got {}", mc.epsilon),
            ));
        }
        if mc.skip_above_per_km2 <= 0.0 || mc.skip_above_per_km2.is_nan() {
            return Err(invalid(
                "mc.skip_above_per_km2",
                "must be a positive density",
            ));
        }

        let output = self.output.unwrap_or(RawOutput {
            path: None,
            format: None,
        });
        let format = match output.format.as_deref() {
            None => OutputFormat::default(),
            Some(text) => text
                .parse()
                .map_err(|reason: String| invalid("output.format", reason))?,
        };

        Ok(SweepSpec {
            name: self.name.unwrap_or_else(|| "sweep".to_string()),
            metric,
            threshold_db,
            threshold_linear,
            engines,
            model,
            tx_power_mw: dbm_to_mw(tx_power_dbm),
            noise_mw: dbm_to_mw(noise_dbm),
            height_diff_km: m_to_km(height_diff_m),
            fading,
            lambdas_per_km2,
            mc,
            output_path: output.path.map(PathBuf::from),
            format,
        })
    }
}

impl RawModel {
    fn build(self) -> Result<PathLossModel, ConfigError> {
        match self.preset.as_str() {
            "3gpp-case1" => {
                self.forbid("amplitude", self.amplitude.is_some())?;
                self.forbid("exponent", self.exponent.is_some())?;
                self.forbid("piece", self.piece.is_some())?;
                let d1_km = m_to_km(self.los_break_m.unwrap_or(300.0));
                case1_model(
                    d1_km,
                    self.los_amplitude.unwrap_or(10f64.powf(-10.38)),
                    self.los_exponent.unwrap_or(2.09),
                    self.nlos_amplitude.unwrap_or(10f64.powf(-14.54)),
                    self.nlos_exponent.unwrap_or(3.75),
                )
                .map_err(|e| invalid("model", e.to_string()))
            }
            "single-slope" => {
                self.forbid("los_break_m", self.los_break_m.is_some())?;
                self.forbid("los_amplitude", self.los_amplitude.is_some())?;
                self.forbid("los_exponent", self.los_exponent.is_some())?;
                self.forbid("nlos_amplitude", self.nlos_amplitude.is_some())?;
                self.forbid("nlos_exponent", self.nlos_exponent.is_some())?;
                self.forbid("piece", self.piece.is_some())?;
                let amplitude = self.amplitude.unwrap_or(10f64.powf(-14.54));
                let exponent = self.exponent.unwrap_or(3.75);
                if amplitude <= 0.0 || !amplitude.is_finite() {
                    return Err(invalid(
                        "model.amplitude",
                        format!("must be positive and finite, got {amplitude}"),
                    ));
                }
                if exponent <= 0.0 || !exponent.is_finite() {
                    return Err(invalid(
                        "model.exponent",
                        format!("must be positive and finite, got {exponent}"),
                    ));
                }
                Ok(preset_single_slope(amplitude, exponent))
            }
            "custom" => {
                self.forbid("los_break_m", self.los_break_m.is_some())?;
                self.forbid("los_amplitude", self.los_amplitude.is_some())?;
                self.forbid("los_exponent", self.los_exponent.is_some())?;
                self.forbid("nlos_amplitude", self.nlos_amplitude.is_some())?;
                self.forbid("nlos_exponent", self.nlos_exponent.is_some())?;
                self.forbid("amplitude", self.amplitude.is_some())?;
                self.forbid("exponent", self.exponent.is_some())?;
                let raw_pieces = self.piece.ok_or(ConfigError::Missing("model.piece"))?;
                if raw_pieces.is_empty() {
                    return Err(invalid("model.piece", "at least one piece is required"));
                }
                let mut pieces = Vec::with_capacity(raw_pieces.len());
                let mut prob = Vec::with_capacity(raw_pieces.len());
                for (i, p) in raw_pieces.into_iter().enumerate() {
                    let upper_break_km = if p.upper_break_m.is_infinite() {
                        f64::INFINITY
                    } else {
                        m_to_km(p.upper_break_m)
                    };
                    pieces.push(PathLossPiece {
                        upper_break_km,
                        los_amplitude: p.los_amplitude,
                        los_exponent: p.los_exponent,
                        nlos_amplitude: p.nlos_amplitude,
                        nlos_exponent: p.nlos_exponent,
                    });
                    prob.push(LosProbPiece {
                        upper_break_km,
                        form: p.los_prob(i)?,
                    });
                }
                PathLossModel::new(pieces, prob).map_err(|e| invalid("model.piece", e.to_string()))
            }
            other => Err(invalid(
                "model.preset",
                format!(
                    "unknown preset `{other}`, expected `3gpp-case1`, `single-slope`, or `custom`"
                ),
            )),
        }
    }

    fn forbid(&self, key: &str, present: bool) -> Result<(), ConfigError> {
        if present {
            Err(invalid(
                format!("model.{key}"),
                format!("not applicable to preset `{}`", self.preset),
            ))
        } else {
            Ok(())
        }
    }
}

impl RawPiece {
    fn los_prob(&self, index: usize) -> Result<LosProbForm, ConfigError> {
        let key = |field: &str| format!("model.piece[{index}].{field}");
        let expect_absent = |field: &str, value: Option<f64>| -> Result<(), ConfigError> {
            if value.is_some() {
                Err(invalid(
                    key(field),
                    format!("not applicable to form `{}`", self.los_prob_form),
                ))
            } else {
                Ok(())
            }
        };
        match self.los_prob_form.as_str() {
            "linear" => {
                expect_absent("los_prob_value", self.los_prob_value)?;
                let intercept = self.los_prob_intercept.ok_or_else(|| {
                    invalid(key("los_prob_intercept"), "required for form `linear`")
                })?;
                let slope_per_km = self.los_prob_slope_per_km.ok_or_else(|| {
                    invalid(key("los_prob_slope_per_km"), "required for form `linear`")
                })?;
                Ok(LosProbForm::Linear {
                    intercept,
                    slope_per_km,
                })
            }
            "constant" => {
                expect_absent("los_prob_intercept", self.los_prob_intercept)?;
                expect_absent("los_prob_slope_per_km", self.los_prob_slope_per_km)?;
                let value = self.los_prob_value.ok_or_else(|| {
                    invalid(key("los_prob_value"), "required for form `constant`")
                })?;
                Ok(LosProbForm::Constant(value))
            }
            "zero" => {
                expect_absent("los_prob_intercept", self.los_prob_intercept)?;
                expect_absent("los_prob_slope_per_km", self.los_prob_slope_per_km)?;
                expect_absent("los_prob_value", self.los_prob_value)?;
                Ok(LosProbForm::Zero)
            }
            other => Err(invalid(
                key("los_prob_form"),
                format!("unknown form `{other}`, expected `linear`, `constant`, or `zero`"),
            )),
        }
    }
}

/// Log-spaced density grid from `min` to `max` inclusive, aiming for the
/// requested points per decade; endpoints are exact.
fn log_grid(min: f64, max: f64, ppd: u32) -> Vec<f64> {
    if min == max {
        return vec![min];
    }
    let decades = (max / min).log10();
    let steps = ((decades * f64::from(ppd)).round() as usize).max(1);
    let (lmin, lmax) = (min.log10(), max.log10());
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| 10f64.powf(lmin + (lmax - lmin) * k as f64 / steps as f64))
        .collect();
    grid[0] = min;
    grid[steps] = max;
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        gamma0_db = 0.0
        [model]
        preset = "3gpp-case1"
        [network]
        height_diff_m = 8.5
    "#;

    #[test]
    fn minimal_config_fills_defaults() {
        let spec = SweepSpec::parse(MINIMAL).unwrap();
        assert_eq!(spec.name, "sweep");
        assert_eq!(spec.metric, Metric::Ase);
        assert_eq!(spec.threshold_db, 0.0);
        assert_eq!(spec.threshold_linear, 1.0);
        assert_eq!(spec.engines, EngineSelection::Analytic);
        assert_eq!(spec.format, OutputFormat::Csv);
        assert!((spec.tx_power_mw - 251.18864315095797).abs() < 1e-9);
        assert!((spec.noise_mw - 10f64.powf(-9.5)).abs() < 1e-25);
        assert_eq!(spec.height_diff_km, 0.0085);
        assert_eq!(spec.mc.trials, 10_000);
        assert_eq!(spec.mc.seed, 1);
        // 0.1 to 1e5 is six decades at 8 per decade: 49 points, exact ends.
        assert_eq!(spec.lambdas_per_km2.len(), 49);
        assert_eq!(spec.lambdas_per_km2[0], 0.1);
        assert_eq!(*spec.lambdas_per_km2.last().unwrap(), 1e5);
        assert!(spec.lambdas_per_km2.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL}\nunknown_key = 1\n");
        assert!(matches!(
            SweepSpec::parse(&bad),
            Err(ConfigError::Syntax(_))
        ));
        let bad = MINIMAL.replace("height_diff_m = 8.5", "height_diff_m = 8.5\nbogus = 2");
        assert!(SweepSpec::parse(&bad).is_err());
    }

    #[test]
    fn metric_keys_are_mutually_exclusive_and_required() {
        let both = format!("gamma_db = 0.0\n{MINIMAL}");
        let err = SweepSpec::parse(&both).unwrap_err();
        assert!(err.to_string().contains("gamma_db"), "{err}");
        let neither = MINIMAL.replace("gamma0_db = 0.0", "");
        let err = SweepSpec::parse(&neither).unwrap_err();
        assert!(err.to_string().contains("gamma_db or gamma0_db"), "{err}");
    }

    #[test]
    fn negative_height_is_rejected_by_key_name() {
        let bad = MINIMAL.replace("height_diff_m = 8.5", "height_diff_m = -1.0");
        let err = SweepSpec::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("network.height_diff_m"), "{err}");
    }

    #[test]
    fn power_conversion_is_decibel_milliwatt() {
        let spec = SweepSpec::parse(MINIMAL).unwrap();
        assert!((spec.tx_power_mw - 251.18864315095797).abs() < 1e-10);
    }

    #[test]
    fn rician_requires_monte_carlo_engine() {
        let bad = MINIMAL.replace(
            "height_diff_m = 8.5",
            "height_diff_m = 8.5\nfading = \"rician\"",
        );
        let err = SweepSpec::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("network.fading"), "{err}");
        let good = format!(
            "engines = \"montecarlo\"\n{}",
            MINIMAL.replace(
                "height_diff_m = 8.5",
                "height_diff_m = 8.5\nfading = \"rician\"",
            )
        );
        let spec = SweepSpec::parse(&good).unwrap();
        assert!(matches!(spec.fading, FadingKind::Rician { .. }));
    }

    #[test]
    fn non_monotone_grid_is_rejected_by_key_name() {
        let bad =
            format!("{MINIMAL}\n[grid]\nlambda_min_per_km2 = 100.0\nlambda_max_per_km2 = 10.0\n");
        let err = SweepSpec::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("grid.lambda_max_per_km2"), "{err}");
    }

    #[test]
    fn preset_overrides_apply_and_foreign_keys_are_rejected() {
        let cfg = format!(
            "{}\n",
            MINIMAL.replace(
                "preset = \"3gpp-case1\"",
                "preset = \"3gpp-case1\"\nlos_exponent = 1.09"
            )
        );
        let spec = SweepSpec::parse(&cfg).unwrap();
        assert_eq!(spec.model.piece(0).los_exponent, 1.09);

        let bad = MINIMAL.replace(
            "preset = \"3gpp-case1\"",
            "preset = \"3gpp-case1\"\namplitude = 1e-14",
        );
        let err = SweepSpec::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("model.amplitude"), "{err}");
    }

    #[test]
    fn custom_model_round_trips_pieces() {
        let cfg = r#"
            gamma_db = 0.0
            [network]
            height_diff_m = 0.0
            [model]
            preset = "custom"
            [[model.piece]]
            upper_break_m = 300.0
            los_amplitude = 4.168693834703354e-11
            los_exponent = 2.09
            nlos_amplitude = 2.8840315031266056e-15
            nlos_exponent = 3.75
            los_prob_form = "linear"
            los_prob_intercept = 1.0
            los_prob_slope_per_km = -3.3333333333333335
            [[model.piece]]
            upper_break_m = inf
            los_amplitude = 4.168693834703354e-11
            los_exponent = 2.09
            nlos_amplitude = 2.8840315031266056e-15
            nlos_exponent = 3.75
            los_prob_form = "zero"
        "#;
        let spec = SweepSpec::parse(cfg).unwrap();
        assert_eq!(spec.model.piece_count(), 2);
        assert_eq!(spec.model.upper_break(0), 0.3);
        assert!(spec.model.upper_break(1).is_infinite());
        // Same stacked behaviour as the built-in preset.
        let preset = udn_core::channel::preset_3gpp_case1();
        for w in [0.05, 0.2, 0.4] {
            let a = spec
                .model
                .path_loss(udn_core::channel::LinkType::Los, w)
                .unwrap();
            let b = preset
                .path_loss(udn_core::channel::LinkType::Los, w)
                .unwrap();
            assert!((a - b).abs() <= 1e-18 + 1e-12 * b);
            let pa = spec.model.los_probability(w).unwrap();
            let pb = preset.los_probability(w).unwrap();
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_piece_prob_keys_are_cross_checked() {
        let cfg = r#"
            gamma_db = 0.0
            [network]
            height_diff_m = 0.0
            [model]
            preset = "custom"
            [[model.piece]]
            upper_break_m = inf
            los_amplitude = 1e-11
            los_exponent = 2.1
            nlos_amplitude = 1e-15
            nlos_exponent = 3.75
            los_prob_form = "zero"
            los_prob_value = 0.5
        "#;
        let err = SweepSpec::parse(cfg).unwrap_err();
        assert!(
            err.to_string().contains("model.piece[0].los_prob_value"),
            "{err}"
        );
    }

    #[test]
    fn grid_honours_points_per_decade() {
        let cfg = format!(
            "{MINIMAL}\n[grid]\nlambda_min_per_km2 = 10.0\nlambda_max_per_km2 = 1000.0\npoints_per_decade = 4\n"
        );
        let spec = SweepSpec::parse(&cfg).unwrap();
        assert_eq!(spec.lambdas_per_km2.len(), 9);
        assert_eq!(spec.lambdas_per_km2[0], 10.0);
        assert_eq!(spec.lambdas_per_km2[8], 1000.0);
        let mid = spec.lambdas_per_km2[4];
        assert!((mid - 100.0).abs() < 1e-9, "midpoint {mid}");
    }

    #[test]
    fn single_point_grid_is_allowed() {
        let cfg =
            format!("{MINIMAL}\n[grid]\nlambda_min_per_km2 = 50.0\nlambda_max_per_km2 = 50.0\n");
        let spec = SweepSpec::parse(&cfg).unwrap();
        assert_eq!(spec.lambdas_per_km2, vec![50.0]);
    }

    #[test]
    fn noiseless_network_via_negative_infinity_dbm() {
        let cfg = MINIMAL.replace(
            "height_diff_m = 8.5",
            "height_diff_m = 8.5\nnoise_dbm = -inf",
        );
        let spec = SweepSpec::parse(&cfg).unwrap();
        assert_eq!(spec.noise_mw, 0.0);
    }
}
