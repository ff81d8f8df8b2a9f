//! Run configuration: a TOML document, validated in full before any
//! computation starts.

use std::path::{Path, PathBuf};

use lhv_core::analysis::NFit;
use lhv_core::{
    normalize_params, BeamSplitter, HardySettings, McSpec, ModelParams, Normalization,
    QuadratureSpec, Setting,
};
use serde::Deserialize;

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Rad,
    Deg,
}

impl AngleUnit {
    fn to_radians(self, x: f64) -> f64 {
        match self {
            AngleUnit::Rad => x,
            AngleUnit::Deg => x.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn to_vec(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub angle_unit: AngleUnit,
    pub beam_splitter: BeamSplitterSection,
    pub model: ModelSection,
    #[serde(default)]
    pub settings: SettingsSection,
    #[serde(default)]
    pub fair_sampling: FairSamplingSection,
    pub hardy: Option<HardySection>,
    #[serde(default)]
    pub monte_carlo: MonteCarloSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSplitterSection {
    pub r_sq: f64,
    pub t_sq: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub c: f64,
    pub epsilon: OneOrMany,
}

/// Settings are the Cartesian grid `theta1 × theta2` followed by `pairs`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSection {
    #[serde(default)]
    pub theta1: Vec<f64>,
    #[serde(default)]
    pub theta2: Vec<f64>,
    #[serde(default)]
    pub pairs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairSamplingSection {
    /// `(θ1, θ2, θ20)` tuples.
    #[serde(default)]
    pub triples: Vec<[f64; 3]>,
    /// Strictly decreasing cap sizes for the scaling table; defaults to
    /// `model.epsilon`.
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardySection {
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta10: Option<f64>,
    pub theta20: Option<f64>,
    /// Build the angles from the zeros of the quantum prediction, starting
    /// at this `theta1`.
    pub zero_manifold_theta1: Option<f64>,
    #[serde(default)]
    pub n_fit: NFitName,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NFitName {
    #[default]
    MaxEntry,
    LeastSquares,
}

impl From<NFitName> for NFit {
    fn from(n: NFitName) -> NFit {
        match n {
            NFitName::MaxEntry => NFit::MaxEntry,
            NFitName::LeastSquares => NFit::LeastSquares,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    #[serde(default = "default_n_samples")]
    pub n_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_chunks")]
    pub n_chunks: u64,
}

fn default_n_samples() -> u64 {
    1_000_000
}

fn default_n_chunks() -> u64 {
    8
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        MonteCarloSection {
            n_samples: default_n_samples(),
            seed: 0,
            n_chunks: default_n_chunks(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default = "default_n_radial")]
    pub n_radial: usize,
    #[serde(default = "default_n_azimuthal")]
    pub n_azimuthal: usize,
}

fn default_n_radial() -> usize {
    QuadratureSpec::default().n_radial()
}

fn default_n_azimuthal() -> usize {
    QuadratureSpec::default().n_azimuthal()
}

impl Default for QuadratureSection {
    fn default() -> Self {
        QuadratureSection {
            n_radial: default_n_radial(),
            n_azimuthal: default_n_azimuthal(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<OutputFormat>,
    pub path: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

/// A configuration whose every value has passed the model's invariants.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub beam_splitter: BeamSplitter,
    pub normalization: Normalization,
    pub c: f64,
    /// One parameter set per configured cap size, in input order.
    pub params: Vec<ModelParams>,
    pub triples: Vec<[f64; 3]>,
    pub scaling_epsilons: Vec<f64>,
    pub hardy: Option<HardySettings>,
    pub hardy_source: Option<&'static str>,
    pub n_fit: NFit,
    pub mc: McSpec,
    pub quad: QuadratureSpec,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Resolved {
    /// Settings after the beam-splitter angle map.
    pub fn settings(&self) -> &[Setting] {
        &self.normalization.settings
    }

    pub fn gamma(&self) -> f64 {
        self.normalization.gamma
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.epsilon()).collect()
    }
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Resolved, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &Overrides) -> Result<Resolved, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.resolve(overrides)
}

fn invalid(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

fn finite(field: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("{x} is not a finite number")))
    }
}

impl RunConfig {
    pub fn resolve(&self, overrides: &Overrides) -> Result<Resolved, ConfigError> {
        let unit = self.angle_unit;
        let angle = |field: String, x: f64| finite(&field, x).map(|x| unit.to_radians(x));

        let bs = BeamSplitter::new(self.beam_splitter.r_sq, self.beam_splitter.t_sq)
            .map_err(|e| invalid("beam_splitter", e))?;

        let s = &self.settings;
        let mut settings = Vec::with_capacity(s.theta1.len() * s.theta2.len() + s.pairs.len());
        if s.theta1.is_empty() != s.theta2.is_empty() {
            return Err(invalid(
                "settings",
                "theta1 and theta2 must either both be given or both be empty",
            ));
        }
        for (i, &t1) in s.theta1.iter().enumerate() {
            let t1 = angle(format!("settings.theta1[{i}]"), t1)?;
            for (j, &t2) in s.theta2.iter().enumerate() {
                let t2 = angle(format!("settings.theta2[{j}]"), t2)?;
                settings.push(Setting::new(t1, t2));
            }
        }
        for (i, [t1, t2]) in s.pairs.iter().enumerate() {
            settings.push(Setting::new(
                angle(format!("settings.pairs[{i}][0]"), *t1)?,
                angle(format!("settings.pairs[{i}][1]"), *t2)?,
            ));
        }
        let normalization =
            normalize_params(bs, &settings).map_err(|e| invalid("beam_splitter", e))?;
        let gamma = normalization.gamma;

        let eps_list = self.model.epsilon.to_vec();
        if eps_list.is_empty() {
            return Err(invalid("model.epsilon", "at least one value is required"));
        }
        let params = eps_list
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                ModelParams::new(gamma, self.model.c, e).map_err(|err| {
                    let field = if matches!(self.model.epsilon, OneOrMany::One(_)) {
                        "model".to_string()
                    } else {
                        format!("model (epsilon[{i}])")
                    };
                    invalid(field, err)
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let triples = self
            .fair_sampling
            .triples
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut out = [0.0; 3];
                for k in 0..3 {
                    let x = angle(format!("fair_sampling.triples[{i}][{k}]"), t[k])?;
                    out[k] = normalization.map_angle(x);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let scaling_epsilons = match &self.fair_sampling.epsilons {
            Some(list) => {
                for (i, &e) in list.iter().enumerate() {
                    ModelParams::new(gamma, self.model.c, e)
                        .map_err(|err| invalid(format!("fair_sampling.epsilons[{i}]"), err))?;
                }
                list.clone()
            }
            None => eps_list.clone(),
        };
        if !triples.is_empty() && scaling_epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid(
                "fair_sampling.epsilons",
                "the scaling list must be strictly decreasing",
            ));
        }

        let (hardy, hardy_source, n_fit) = match &self.hardy {
            None => (None, None, NFit::default()),
            Some(h) => {
                let (hs, source) = resolve_hardy(h, unit, &normalization)?;
                (Some(hs), Some(source), h.n_fit.into())
            }
        };

        let seed = overrides.seed.unwrap_or(self.monte_carlo.seed);
        let mc = McSpec::new(self.monte_carlo.n_samples, seed, self.monte_carlo.n_chunks)
            .map_err(|e| invalid("monte_carlo", e))?;
        let quad = QuadratureSpec::new(self.quadrature.n_radial, self.quadrature.n_azimuthal)
            .map_err(|e| invalid("quadrature", e))?;

        Ok(Resolved {
            beam_splitter: bs,
            normalization,
            c: self.model.c,
            params,
            triples,
            scaling_epsilons,
            hardy,
            hardy_source,
            n_fit,
            mc,
            quad,
            format: overrides.format.or(self.output.format).unwrap_or_default(),
            out: overrides.out.clone().or_else(|| self.output.path.clone()),
        })
    }
}

fn resolve_hardy(
    h: &HardySection,
    unit: AngleUnit,
    normalization: &Normalization,
) -> Result<(HardySettings, &'static str), ConfigError> {
    let explicit = [h.theta1, h.theta2, h.theta10, h.theta20];
    let given = explicit.iter().filter(|a| a.is_some()).count();
    match (h.zero_manifold_theta1, given) {
        (Some(t1), 0) => {
            let t1 = unit.to_radians(finite("hardy.zero_manifold_theta1", t1)?);
            let t1 = normalization.map_angle(t1);
            Ok((
                HardySettings::on_zero_manifold(t1, normalization.gamma),
                "zero-manifold",
            ))
        }
        (Some(_), _) => Err(invalid(
            "hardy",
            "give either zero_manifold_theta1 or the four explicit angles, not both",
        )),
        (None, 4) => {
            let names = [
                "hardy.theta1",
                "hardy.theta2",
                "hardy.theta10",
                "hardy.theta20",
            ];
            let mut a = [0.0; 4];
            for k in 0..4 {
                let x = finite(names[k], explicit[k].unwrap_or_default())?;
                a[k] = normalization.map_angle(unit.to_radians(x));
            }
            Ok((HardySettings::new(a[0], a[1], a[2], a[3]), "explicit"))
        }
        (None, _) => Err(invalid(
            "hardy",
            "all four of theta1, theta2, theta10, theta20 are required",
        )),
    }
}
