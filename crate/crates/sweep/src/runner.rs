//! Sweep execution: one output row per (curve, density, engine).
//!
//! Points are independent, so they run on the rayon pool and the rows are
//! restored to (curve, density, engine) order afterwards; output is
//! identical for any thread count.

use rayon::prelude::*;
use udn_core::analytic;
use udn_core::quadrature::QuadratureSpec;
use udn_core::sim::{self, TrialConfig};

use crate::config::{Metric, SweepSpec};

/// One evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub engine: &'static str,
    pub lambda_per_km2: f64,
    pub gamma_db: f64,
    /// Coverage probability; set for coverage sweeps.
    pub p_cov: Option<f64>,
    /// Area spectral efficiency; set for ASE sweeps.
    pub ase_bps_hz_km2: Option<f64>,
    /// 95% Wald half-width; Monte Carlo rows only.
    pub ci_half_width: Option<f64>,
    /// Empty on clean rows; a `skipped:` note, a failure message, or a
    /// cross-check warning otherwise.
    pub error: String,
}

/// The full table plus whether any point actually failed (skips and
/// cross-check warnings do not count).
#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub any_failed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EngineKind {
    Analytic,
    MonteCarlo,
}

impl EngineKind {
    fn label(self) -> &'static str {
        match self {
            EngineKind::Analytic => "analytic",
            EngineKind::MonteCarlo => "montecarlo",
        }
    }
}

/// Runs every requested (density, engine) point of every sweep.
///
/// When a point is evaluated by both engines and the estimates disagree by
/// more than three Monte Carlo standard errors, a warning is appended to the
/// Monte Carlo row; with ~0.3% false-positive odds per point this flags rows
/// for review rather than failing the run.
pub fn run_sweep(specs: &[SweepSpec]) -> SweepOutcome {
    let mut tasks: Vec<(usize, usize, EngineKind, f64)> = Vec::new();
    for (si, spec) in specs.iter().enumerate() {
        for (li, &lambda) in spec.lambdas_per_km2.iter().enumerate() {
            if spec.engines.runs_analytic() {
                tasks.push((si, li, EngineKind::Analytic, lambda));
            }
            if spec.engines.runs_monte_carlo() {
                tasks.push((si, li, EngineKind::MonteCarlo, lambda));
            }
        }
    }

    let mut keyed: Vec<((usize, usize, EngineKind), ResultRow, bool)> = tasks
        .into_par_iter()
        .map(|(si, li, engine, lambda)| {
            let (row, failed) = evaluate(&specs[si], li, lambda, engine);
            ((si, li, engine), row, failed)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0 .0
            .cmp(&b.0 .0)
            .then(a.0 .1.cmp(&b.0 .1))
            .then(a.0 .2.cmp(&b.0 .2))
    });

    let any_failed = keyed.iter().any(|(_, _, failed)| *failed);

    // After sorting, a point's analytic row immediately precedes its Monte
    // Carlo row, so the dual-engine comparison is a neighbour scan.
    for i in 1..keyed.len() {
        let (prev_key, next_key) = (keyed[i - 1].0, keyed[i].0);
        if prev_key.0 == next_key.0
            && prev_key.1 == next_key.1
            && prev_key.2 == EngineKind::Analytic
            && next_key.2 == EngineKind::MonteCarlo
        {
            let spec = &specs[prev_key.0];
            let reference = value_of(&keyed[i - 1].1);
            let (estimate, half_width) = (value_of(&keyed[i].1), keyed[i].1.ci_half_width);
            if let (Some(a), Some(m), Some(hw)) = (reference, estimate, half_width) {
                if engines_disagree(spec, a, m, hw) {
                    let note = format!(
                        "cross-check: |analytic - montecarlo| = {:.3e} exceeds 3 sigma = {:.3e}",
                        (a - m).abs(),
                        3.0 * hw / 1.96
                    );
                    let row = &mut keyed[i].1;
                    if row.error.is_empty() {
                        row.error = note;
                    } else {
                        row.error.push_str("; ");
                        row.error.push_str(&note);
                    }
                }
            }
        }
    }

    SweepOutcome {
        rows: keyed.into_iter().map(|(_, row, _)| row).collect(),
        any_failed,
    }
}

fn value_of(row: &ResultRow) -> Option<f64> {
    row.p_cov.or(row.ase_bps_hz_km2)
}

/// Whether a Monte Carlo estimate `m` with 95% half-width `hw` is
/// inconsistent with the analytic value `a` at the 3 sigma level.
///
/// A zero half-width means every trial agreed, where the Wald interval is
/// degenerate. For coverage, `a` is itself the success probability, so the
/// exact chance of a unanimous sample is known: flag when it is below the
/// one-sided 3 sigma tail. For ASE that chance is not recoverable from the
/// row (it depends on the coverage at the threshold, not on the ASE value),
/// so an all-zero sample stays unflagged next to its analytic neighbour.
fn engines_disagree(spec: &SweepSpec, a: f64, m: f64, hw: f64) -> bool {
    if hw > 0.0 {
        return (a - m).abs() > 3.0 * hw / 1.96;
    }
    if spec.metric != Metric::Coverage {
        return false;
    }
    let trials = spec.mc.trials as f64;
    let unanimous = if m == 0.0 {
        (1.0 - a).powf(trials)
    } else {
        a.powf(trials)
    };
    unanimous < 1.35e-3
}

fn evaluate(
    spec: &SweepSpec,
    lambda_idx: usize,
    lambda: f64,
    engine: EngineKind,
) -> (ResultRow, bool) {
    let mut row = ResultRow {
        scenario: spec.name.clone(),
        engine: engine.label(),
        lambda_per_km2: lambda,
        gamma_db: spec.threshold_db,
        p_cov: None,
        ase_bps_hz_km2: None,
        ci_half_width: None,
        error: String::new(),
    };
    let params = spec.params_at(lambda);
    match engine {
        EngineKind::Analytic => {
            let quad = QuadratureSpec::default();
            let outcome = match spec.metric {
                Metric::Coverage => analytic::coverage_probability(
                    &spec.model,
                    &params,
                    spec.threshold_linear,
                    &quad,
                )
                .map(|p| (Some(p), None)),
                Metric::Ase => analytic::ase(&spec.model, &params, spec.threshold_linear, &quad)
                    .map(|a| (None, Some(a))),
            };
            match outcome {
                Ok((p, a)) => {
                    row.p_cov = p;
                    row.ase_bps_hz_km2 = a;
                    (row, false)
                }
                Err(e) => {
                    row.error = e.to_string();
                    (row, true)
                }
            }
        }
        EngineKind::MonteCarlo => {
            if lambda >= spec.mc.skip_above_per_km2 {
                row.error = format!(
                    "skipped: density {lambda} per km^2 is at or above mc.skip_above_per_km2; analytic-only point"
                );
                return (row, false);
            }
            let radius = match sim::truncation_radius(&spec.model, &params, spec.mc.epsilon) {
                Ok(r) => r,
                Err(e) => {
                    row.error = e.to_string();
                    return (row, true);
                }
            };
            // Trials are stream-separated within a point; mixing the grid
            // index into the seed decorrelates neighbouring densities.
            let seed = spec.mc.seed ^ (lambda_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let cfg = TrialConfig {
                model: spec.model.clone(),
                params,
                sim_radius_km: radius,
                trials: spec.mc.trials,
                seed,
            };
            let outcome = match spec.metric {
                Metric::Coverage => sim::simulate_coverage(&cfg, spec.threshold_linear)
                    .map(|est| (Some(est.value), None, est.ci_half_width)),
                Metric::Ase => sim::simulate_ase(&cfg, spec.threshold_linear)
                    .map(|est| (None, Some(est.value), est.ci_half_width)),
            };
            match outcome {
                Ok((p, a, hw)) => {
                    row.p_cov = p;
                    row.ase_bps_hz_km2 = a;
                    row.ci_half_width = Some(hw);
                    (row, false)
                }
                Err(e) => {
                    row.error = e.to_string();
                    (row, true)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SweepSpec;

    fn tiny_spec(extra: &str) -> SweepSpec {
        let cfg = format!(
            r#"
            name = "tiny"
            gamma_db = 0.0
            engines = "both"
            [model]
            preset = "single-slope"
            exponent = 4.0
            [network]
            height_diff_m = 0.0
            noise_dbm = -inf
            [grid]
            lambda_min_per_km2 = 10.0
            lambda_max_per_km2 = 100.0
            points_per_decade = 2
            [mc]
            trials = 400
            seed = 7
            {extra}
            "#
        );
        SweepSpec::parse(&cfg).unwrap()
    }

    #[test]
    fn degenerate_intervals_use_the_exact_unanimity_odds() {
        let spec = tiny_spec("");
        // Healthy interval: plain 3 sigma rule.
        assert!(!engines_disagree(&spec, 0.56, 0.55, 0.02));
        assert!(engines_disagree(&spec, 0.56, 0.40, 0.02));
        // All 400 trials missed. Plausible when coverage is rare, damning
        // when the analytic value says half of them should have hit.
        assert!(!engines_disagree(&spec, 2.8e-5, 0.0, 0.0));
        assert!(engines_disagree(&spec, 0.5, 0.0, 0.0));
        // All 400 trials hit.
        assert!(!engines_disagree(&spec, 0.9999, 1.0, 0.0));
        assert!(engines_disagree(&spec, 0.5, 1.0, 0.0));
        // ASE rows carry no per-trial success odds; stay quiet.
        let mut ase_spec = tiny_spec("");
        ase_spec.metric = Metric::Ase;
        assert!(!engines_disagree(&ase_spec, 120.0, 0.0, 0.0));
    }

    #[test]
    fn rows_come_back_in_grid_order_with_analytic_first() {
        let spec = tiny_spec("");
        let out = run_sweep(std::slice::from_ref(&spec));
        assert!(!out.any_failed);
        assert_eq!(out.rows.len(), 6);
        for (i, chunk) in out.rows.chunks(2).enumerate() {
            assert_eq!(chunk[0].engine, "analytic");
            assert_eq!(chunk[1].engine, "montecarlo");
            assert_eq!(chunk[0].lambda_per_km2, spec.lambdas_per_km2[i]);
            assert_eq!(chunk[1].lambda_per_km2, spec.lambdas_per_km2[i]);
        }
    }

    #[test]
    fn noiseless_single_slope_rows_agree_across_engines() {
        // With alpha = 4, no noise and no height difference, coverage at
        // 0 dB is density-free; the exact value is
        // 1 / (1 + sqrt(gamma) * atan(sqrt(gamma))) = 0.5600991535...
        let spec = tiny_spec("");
        let out = run_sweep(std::slice::from_ref(&spec));
        let exact = 1.0 / (1.0 + std::f64::consts::FRAC_PI_4);
        for row in &out.rows {
            let p = row.p_cov.expect("coverage sweep fills p_cov");
            assert!(row.ase_bps_hz_km2.is_none());
            match row.engine {
                "analytic" => {
                    assert!((p - exact).abs() < 1e-6, "analytic {p} vs exact {exact}");
                    assert!(row.ci_half_width.is_none());
                    assert!(row.error.is_empty(), "{}", row.error);
                }
                "montecarlo" => {
                    let hw = row.ci_half_width.expect("mc rows carry an interval");
                    assert!((p - exact).abs() < 1.6 * hw, "mc {p} vs exact {exact}");
                    // Within 3 sigma of the analytic row, so no warning.
                    assert!(row.error.is_empty(), "{}", row.error);
                }
                other => panic!("unexpected engine {other}"),
            }
        }
    }

    #[test]
    fn densities_at_the_skip_threshold_become_analytic_only_notes() {
        let spec = tiny_spec("skip_above_per_km2 = 100.0");
        let out = run_sweep(std::slice::from_ref(&spec));
        assert!(!out.any_failed, "a skip is not a failure");
        let skipped: Vec<_> = out
            .rows
            .iter()
            .filter(|r| r.error.starts_with("skipped:"))
            .collect();
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].engine, "montecarlo");
        assert_eq!(skipped[0].lambda_per_km2, 100.0);
        assert!(skipped[0].p_cov.is_none());
    }

    #[test]
    fn reruns_are_bit_identical() {
        let spec = tiny_spec("");
        let a = run_sweep(std::slice::from_ref(&spec));
        let b = run_sweep(std::slice::from_ref(&spec));
        assert_eq!(a.rows, b.rows);
    }
}
