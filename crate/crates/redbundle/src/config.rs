//! Run configuration: a flat key-value file (TOML syntax) merged with
//! command-line overrides, validated once, and fingerprinted for report
//! provenance.
//!
//! Precedence is flag > file > default. Unknown file keys are rejected so
//! the schema cannot drift silently. The resolved configuration hashes to a
//! stable hex string (FNV-1a over a canonical rendering) that verification
//! reports embed, making any two byte-identical reports traceable to an
//! identical configuration.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::integrate::Method;
use crate::models::{Coeff, HeavyTop, Oscillator};
use crate::sample::fnv1a;
use crate::verify::Suite;

/// Which model family a run builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelChoice {
    Oscillator,
    HeavyTop,
}

impl std::str::FromStr for ModelChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<ModelChoice> {
        match s {
            "oscillator" => Ok(ModelChoice::Oscillator),
            "heavytop" => Ok(ModelChoice::HeavyTop),
            other => Err(Error::Config(format!(
                "unknown model `{other}`; expected oscillator|heavytop"
            ))),
        }
    }
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelChoice::Oscillator => "oscillator",
            ModelChoice::HeavyTop => "heavytop",
        })
    }
}

/// Which chart the `simulate` command integrates on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartChoice {
    Cartesian,
    Polar,
    Euler,
}

impl std::str::FromStr for ChartChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<ChartChoice> {
        match s {
            "cartesian" => Ok(ChartChoice::Cartesian),
            "polar" => Ok(ChartChoice::Polar),
            "euler" => Ok(ChartChoice::Euler),
            other => Err(Error::Config(format!(
                "unknown chart `{other}`; expected cartesian|polar|euler"
            ))),
        }
    }
}

impl std::fmt::Display for ChartChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChartChoice::Cartesian => "cartesian",
            ChartChoice::Polar => "polar",
            ChartChoice::Euler => "euler",
        })
    }
}

/// Raw file schema. Every key optional; unknown keys are errors.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<String>,
    chart: Option<String>,
    sigma: Option<String>,
    stiffness: Option<String>,
    inertia: Option<[f64; 3]>,
    gamma_x: Option<String>,
    gamma_y: Option<String>,
    gamma_z: Option<String>,
    integrator: Option<String>,
    t0: Option<f64>,
    t1: Option<f64>,
    dt: Option<f64>,
    nu: Option<f64>,
    seed: Option<u64>,
    samples: Option<usize>,
    init: Option<Vec<f64>>,
    suite: Option<String>,
    tolerance_scale: Option<f64>,
}

/// Command-line overrides, fed in by the CLI layer. Any `Some` wins over the
/// file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub integrator: Option<String>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub dt: Option<f64>,
    pub nu: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub suite: Option<String>,
}

/// Fully resolved, validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub chart: ChartChoice,
    /// Coefficient-function sources, kept as text for fingerprinting.
    pub sigma: String,
    pub stiffness: String,
    pub inertia: [f64; 3],
    pub gamma: [String; 3],
    pub integrator: Method,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub nu: f64,
    pub seed: u64,
    pub samples: usize,
    /// Initial state on the integration chart; `None` selects a per-model
    /// default that lies inside the working box (and on the momentum level
    /// `nu` for the cyclic slot, so `reduce` works out of the box).
    pub init: Option<Vec<f64>>,
    pub suite: Suite,
    /// Multiplies every upper-bound tolerance; composed with the
    /// `REDBUNDLE_TOL_OVERRIDE` environment variable by the CLI layer.
    pub tolerance_scale: f64,
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Load (optionally) a file, apply overrides, fill defaults, validate.
    pub fn resolve(path: Option<&Path>, over: &Overrides) -> Result<RunConfig> {
        let file = match path {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };

        let model: ModelChoice = over
            .model
            .clone()
            .or(file.model)
            .ok_or_else(|| {
                Error::Config("no model given; pass --model or set `model` in the config file".to_string())
            })?
            .parse()?;
        let chart: ChartChoice = match file.chart {
            Some(c) => c.parse()?,
            None => match model {
                ModelChoice::Oscillator => ChartChoice::Cartesian,
                ModelChoice::HeavyTop => ChartChoice::Euler,
            },
        };
        match (model, chart) {
            (ModelChoice::Oscillator, ChartChoice::Euler) => {
                return Err(Error::Config(
                    "chart `euler` belongs to model heavytop".to_string(),
                ))
            }
            (ModelChoice::HeavyTop, ChartChoice::Cartesian | ChartChoice::Polar) => {
                return Err(Error::Config(format!(
                    "chart `{chart}` belongs to model oscillator"
                )))
            }
            _ => {}
        }

        let cfg = RunConfig {
            model,
            chart,
            sigma: file.sigma.unwrap_or_else(|| "poly:0,0.1".to_string()),
            stiffness: file.stiffness.unwrap_or_else(|| "const:0.5".to_string()),
            inertia: file.inertia.unwrap_or([1.0, 1.5, 2.0]),
            gamma: [
                file.gamma_x.unwrap_or_else(|| "const:0".to_string()),
                file.gamma_y.unwrap_or_else(|| "const:0".to_string()),
                file.gamma_z.unwrap_or_else(|| "const:1".to_string()),
            ],
            integrator: over
                .integrator
                .clone()
                .or(file.integrator)
                .unwrap_or_else(|| "rk4".to_string())
                .parse()?,
            t0: over.t0.or(file.t0).unwrap_or(0.0),
            t1: over.t1.or(file.t1).unwrap_or(10.0),
            dt: over.dt.or(file.dt).unwrap_or(1e-3),
            nu: over.nu.or(file.nu).unwrap_or(0.5),
            seed: over.seed.or(file.seed).unwrap_or(42),
            samples: over.samples.or(file.samples).unwrap_or(500),
            init: file.init,
            suite: over
                .suite
                .clone()
                .or(file.suite)
                .unwrap_or_else(|| "all".to_string())
                .parse()?,
            tolerance_scale: file.tolerance_scale.unwrap_or(1.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if !(self.t1 > self.t0) || !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(Error::Config(format!(
                "need t1 > t0, got t0 = {}, t1 = {}",
                self.t0, self.t1
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".to_string()));
        }
        if !(self.tolerance_scale > 0.0) || !self.tolerance_scale.is_finite() {
            return Err(Error::Config(format!(
                "tolerance_scale must be positive and finite, got {}",
                self.tolerance_scale
            )));
        }
        if !self.nu.is_finite() {
            return Err(Error::Config("nu must be finite".to_string()));
        }
        // Parse the coefficient functions now so bad text fails as a config
        // error rather than mid-run.
        Coeff::parse(&self.sigma)?;
        Coeff::parse(&self.stiffness)?;
        for g in &self.gamma {
            Coeff::parse(g)?;
        }
        if let Some(init) = &self.init {
            if init.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("init contains a non-finite entry".to_string()));
            }
        }
        Ok(())
    }

    /// Number of fixed integration steps covering `[t0, t1]`.
    pub fn nsteps(&self) -> usize {
        (((self.t1 - self.t0) / self.dt).round() as usize).max(1)
    }

    pub fn build_oscillator(&self) -> Result<Oscillator> {
        Ok(Oscillator::new(
            Coeff::parse(&self.sigma)?,
            Coeff::parse(&self.stiffness)?,
        ))
    }

    pub fn build_heavytop(&self) -> Result<HeavyTop> {
        HeavyTop::new(
            self.inertia,
            [
                Coeff::parse(&self.gamma[0])?,
                Coeff::parse(&self.gamma[1])?,
                Coeff::parse(&self.gamma[2])?,
            ],
        )
    }

    /// Default initial state on the configured chart: inside the working
    /// box, with the cyclic momentum slot pinned to `nu`.
    pub fn default_init(&self) -> Vec<f64> {
        match (self.model, self.chart) {
            (ModelChoice::Oscillator, ChartChoice::Polar) => {
                vec![self.t0, 0.0, 1.2, 0.3, 0.4, self.nu]
            }
            (ModelChoice::Oscillator, _) => {
                vec![self.t0, 0.0, 1.0, 0.5, -0.3, 0.8]
            }
            (ModelChoice::HeavyTop, _) => {
                vec![self.t0, 0.0, 0.6, 1.1, 0.8, self.nu, 0.3, 0.5]
            }
        }
    }

    /// Initial state for integration: the configured one (time slot forced
    /// to `t0`) or the per-model default.
    pub fn initial_state(&self, expected_dim: usize) -> Result<Vec<f64>> {
        self.checked_init(self.default_init(), expected_dim)
    }

    /// Initial state for `reduce`, always interpreted on the model's cyclic
    /// chart (polar for the oscillator, the angle chart for the heavy top)
    /// whatever `chart` says, with the cyclic momentum defaulting to `nu`.
    pub fn cyclic_initial_state(&self, expected_dim: usize) -> Result<Vec<f64>> {
        let default = match self.model {
            ModelChoice::Oscillator => vec![self.t0, 0.0, 1.2, 0.3, 0.4, self.nu],
            ModelChoice::HeavyTop => {
                vec![self.t0, 0.0, 0.6, 1.1, 0.8, self.nu, 0.3, 0.5]
            }
        };
        self.checked_init(default, expected_dim)
    }

    fn checked_init(&self, default: Vec<f64>, expected_dim: usize) -> Result<Vec<f64>> {
        let mut y0 = match &self.init {
            Some(v) => v.clone(),
            None => default,
        };
        if y0.len() != expected_dim {
            return Err(Error::Config(format!(
                "init has {} entries but the chart has {expected_dim} coordinates",
                y0.len()
            )));
        }
        y0[0] = self.t0;
        Ok(y0)
    }

    /// Canonical rendering of every resolved field, the input to the
    /// fingerprint. Scientific notation keeps it locale-independent.
    pub fn describe(&self) -> String {
        let init = match &self.init {
            Some(v) => v
                .iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(","),
            None => "default".to_string(),
        };
        format!(
            "model={};chart={};sigma={};stiffness={};inertia={:e},{:e},{:e};\
             gamma={},{},{};integrator={};t0={:e};t1={:e};dt={:e};nu={:e};\
             seed={};samples={};init={};suite={};tolerance_scale={:e}",
            self.model,
            self.chart,
            self.sigma,
            self.stiffness,
            self.inertia[0],
            self.inertia[1],
            self.inertia[2],
            self.gamma[0],
            self.gamma[1],
            self.gamma[2],
            self.integrator,
            self.t0,
            self.t1,
            self.dt,
            self.nu,
            self.seed,
            self.samples,
            init,
            self.suite,
            self.tolerance_scale,
        )
    }

    /// Stable hex fingerprint of the resolved configuration.
    pub fn hash(&self) -> String {
        format!("{:016x}", fnv1a(self.describe().as_bytes()))
    }
}

/// Tolerance scale from the `REDBUNDLE_TOL_OVERRIDE` environment variable
/// (1.0 when unset). Must parse to a positive finite number.
pub fn env_tolerance_scale() -> Result<f64> {
    match std::env::var("REDBUNDLE_TOL_OVERRIDE") {
        Ok(text) => {
            let v: f64 = text.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "REDBUNDLE_TOL_OVERRIDE must be a number, got `{text}`"
                ))
            })?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "REDBUNDLE_TOL_OVERRIDE must be positive and finite, got {v}"
                )));
            }
            Ok(v)
        }
        Err(std::env::VarError::NotPresent) => Ok(1.0),
        Err(e) => Err(Error::Config(format!("REDBUNDLE_TOL_OVERRIDE: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn over(model: &str) -> Overrides {
        Overrides {
            model: Some(model.to_string()),
            ..Overrides::default()
        }
    }

    #[test]
    fn defaults_resolve_and_validate() {
        let cfg = RunConfig::resolve(None, &over("oscillator")).unwrap();
        assert_eq!(cfg.chart, ChartChoice::Cartesian);
        assert_eq!(cfg.nsteps(), 10_000);
        assert_eq!(cfg.initial_state(6).unwrap().len(), 6);
        cfg.build_oscillator().unwrap();

        let cfg = RunConfig::resolve(None, &over("heavytop")).unwrap();
        assert_eq!(cfg.chart, ChartChoice::Euler);
        cfg.build_heavytop().unwrap();
    }

    #[test]
    fn missing_model_is_a_config_error() {
        let err = RunConfig::resolve(None, &Overrides::default()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn file_values_load_and_flags_override() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            f,
            "model = \"oscillator\"\nchart = \"polar\"\nsigma = \"const:0\"\ndt = 0.01\nnu = 1.0\nseed = 7"
        )
        .unwrap();
        let cfg = RunConfig::resolve(Some(f.path()), &Overrides::default()).unwrap();
        assert_eq!(cfg.chart, ChartChoice::Polar);
        assert_eq!(cfg.sigma, "const:0");
        assert_eq!(cfg.dt, 0.01);
        assert_eq!(cfg.seed, 7);

        let mut o = Overrides::default();
        o.dt = Some(0.5);
        o.seed = Some(11);
        let cfg2 = RunConfig::resolve(Some(f.path()), &o).unwrap();
        assert_eq!(cfg2.dt, 0.5);
        assert_eq!(cfg2.seed, 11);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "model = \"oscillator\"\nmystery = 3").unwrap();
        let err = RunConfig::resolve(Some(f.path()), &Overrides::default()).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err:?}");
    }

    #[test]
    fn invariants_are_enforced() {
        let mut o = over("oscillator");
        o.dt = Some(0.0);
        assert!(RunConfig::resolve(None, &o).is_err());

        let mut o = over("oscillator");
        o.t1 = Some(-1.0);
        assert!(RunConfig::resolve(None, &o).is_err());

        let mut o = over("oscillator");
        o.samples = Some(0);
        assert!(RunConfig::resolve(None, &o).is_err());

        let mut o = over("oscillator");
        o.suite = Some("nope".to_string());
        assert!(RunConfig::resolve(None, &o).is_err());
    }

    #[test]
    fn chart_and_model_must_agree() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "model = \"heavytop\"\nchart = \"polar\"").unwrap();
        assert!(RunConfig::resolve(Some(f.path()), &Overrides::default()).is_err());
    }

    #[test]
    fn bad_coefficient_text_fails_at_resolve_time() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "model = \"oscillator\"\nsigma = \"cos:1\"").unwrap();
        assert!(RunConfig::resolve(Some(f.path()), &Overrides::default()).is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::resolve(None, &over("oscillator")).unwrap();
        let b = RunConfig::resolve(None, &over("oscillator")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut o = over("oscillator");
        o.seed = Some(43);
        let c = RunConfig::resolve(None, &o).unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn polar_default_init_sits_on_the_level() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "model = \"oscillator\"\nchart = \"polar\"\nnu = 1.0").unwrap();
        let cfg = RunConfig::resolve(Some(f.path()), &Overrides::default()).unwrap();
        let y0 = cfg.initial_state(6).unwrap();
        assert_eq!(y0[5], 1.0);
        assert_eq!(y0[0], cfg.t0);
    }
}
