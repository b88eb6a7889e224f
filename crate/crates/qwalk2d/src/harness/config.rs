//! Experiment configuration: one JSON document per run, unknown keys are a
//! hard error, and every output byte is a function of the parsed config.

use serde::{Deserialize, Serialize};

use crate::coins::{CoinFamily, CoinMatrix, NonRepeatingParams};
use crate::lattice::{CoinChannel, InitialCoinState};
use num_complex::Complex64;

use super::{sample_angle_parametrized_state, sample_haar_state, HarnessError};

/// The eight real coin parameters as they appear in configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinParamsSpec {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub psi: f64,
    pub phi: f64,
    pub theta: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl CoinParamsSpec {
    pub fn build(&self) -> Result<NonRepeatingParams, HarnessError> {
        NonRepeatingParams::new(
            self.alpha,
            self.beta,
            self.delta,
            self.psi,
            self.phi,
            self.theta,
            self.lambda,
            self.gamma,
        )
        .map_err(HarnessError::Core)
    }

    pub fn from_params(p: &NonRepeatingParams) -> Self {
        CoinParamsSpec {
            alpha: p.alpha(),
            beta: p.beta(),
            delta: p.delta(),
            psi: p.psi(),
            phi: p.phi(),
            theta: p.theta(),
            lambda: p.lambda(),
            gamma: p.gamma(),
        }
    }
}

/// A coin choice: a family tag plus, for the parametrized families, either
/// explicit parameters or a sampling seed (exactly one of the two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinSpec {
    pub family: CoinFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<CoinParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CoinSpec {
    pub fn standard(family: CoinFamily) -> Self {
        CoinSpec {
            family,
            params: None,
            seed: None,
        }
    }

    /// The balanced reference parameters for one of the two parametrized
    /// families.
    pub fn balanced(family: CoinFamily) -> Self {
        CoinSpec {
            family,
            params: Some(CoinParamsSpec::from_params(&NonRepeatingParams::balanced())),
            seed: None,
        }
    }

    /// Build the coin, returning the parameters too when the family has any.
    pub fn resolve(&self) -> Result<(CoinMatrix, Option<NonRepeatingParams>), HarnessError> {
        match self.family {
            CoinFamily::Hadamard4 | CoinFamily::Grover4 | CoinFamily::Dft4 => {
                if self.params.is_some() || self.seed.is_some() {
                    return Err(HarnessError::Config(format!(
                        "coin family {} takes neither params nor seed",
                        self.family.label()
                    )));
                }
                Ok((
                    CoinMatrix::from_family(self.family, None).expect("standard family"),
                    None,
                ))
            }
            CoinFamily::NonRepeating | CoinFamily::NonReversal => {
                let params = match (&self.params, self.seed) {
                    (Some(spec), None) => spec.build()?,
                    (None, Some(seed)) => {
                        use rand::SeedableRng;
                        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                        NonRepeatingParams::sample(&mut rng)
                    }
                    _ => {
                        return Err(HarnessError::Config(format!(
                            "coin family {} needs exactly one of params or seed",
                            self.family.label()
                        )))
                    }
                };
                Ok((
                    CoinMatrix::from_family(self.family, Some(&params)).expect("parametrized"),
                    Some(params),
                ))
            }
        }
    }
}

/// Initial-state selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Unit amplitude in one channel; needs `channel`.
    Basis,
    /// (1, 1, 1, 1)/2.
    Uniform,
    /// (1, i, i, -1)/2.
    Symmetric,
    /// (1, -1, -1, 1)/2.
    MinusMinus,
    /// Normalized complex Gaussian draw; needs `seed`.
    Haar,
    /// The hypersphere-angle sampler with literal unit-interval ranges;
    /// needs `seed`.
    AngleParametrized,
    /// Explicit components; needs `re` and `im`.
    Components,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<CoinChannel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<[f64; 4]>,
}

impl StateSpec {
    pub fn named(kind: StateKind) -> Self {
        StateSpec {
            kind,
            channel: None,
            seed: None,
            re: None,
            im: None,
        }
    }

    pub fn resolve(&self) -> Result<InitialCoinState, HarnessError> {
        let need = |cond: bool, what: &str| {
            if cond {
                Ok(())
            } else {
                Err(HarnessError::Config(format!(
                    "state kind {:?} requires {what}",
                    self.kind
                )))
            }
        };
        match self.kind {
            StateKind::Basis => {
                need(self.channel.is_some(), "a channel")?;
                Ok(InitialCoinState::basis(self.channel.expect("checked")))
            }
            StateKind::Uniform => Ok(InitialCoinState::uniform()),
            StateKind::Symmetric => Ok(InitialCoinState::symmetric()),
            StateKind::MinusMinus => Ok(InitialCoinState::minus_minus()),
            StateKind::Haar => {
                need(self.seed.is_some(), "a seed")?;
                Ok(sample_haar_state(self.seed.expect("checked")))
            }
            StateKind::AngleParametrized => {
                need(self.seed.is_some(), "a seed")?;
                Ok(sample_angle_parametrized_state(self.seed.expect("checked")))
            }
            StateKind::Components => {
                need(self.re.is_some() && self.im.is_some(), "re and im arrays")?;
                let re = self.re.expect("checked");
                let im = self.im.expect("checked");
                let mut v = [Complex64::new(0.0, 0.0); 4];
                for i in 0..4 {
                    v[i] = Complex64::new(re[i], im[i]);
                }
                InitialCoinState::new(v).map_err(HarnessError::Core)
            }
        }
    }
}

/// Which initial-state sampler a sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StateSampler {
    /// Normalized 8-component Gaussian draws: exactly uniform on the unit
    /// sphere of the coin space. The default.
    #[default]
    Gaussian,
    /// The hypersphere-angle parametrization with phases and cosines drawn
    /// uniformly from (0, 1]; kept for comparison, not exactly uniform.
    AngleParametrized,
}

fn default_figure_t() -> usize {
    100
}

fn default_t_max() -> usize {
    40
}

fn default_n_states() -> usize {
    20
}

fn default_seed() -> u64 {
    1
}

fn default_n_coins() -> usize {
    50
}

fn default_sweep_states() -> usize {
    50
}

fn default_sweep_t() -> usize {
    30
}

fn default_families() -> Vec<CoinFamily> {
    vec![CoinFamily::NonRepeating, CoinFamily::NonReversal]
}

fn default_n_pairs() -> usize {
    20
}

fn default_perturbation() -> f64 {
    0.5
}

fn default_grid() -> usize {
    128
}

fn default_quadrature_grid() -> usize {
    crate::momentum::DEFAULT_QUADRATURE_GRID
}

fn default_msd_n() -> usize {
    100
}

fn default_msd_samples() -> usize {
    100_000
}

fn default_enum_max() -> usize {
    14
}

fn default_max_degree() -> u32 {
    4
}

/// Heatmaps of the three standard coins: Hadamard and DFT from the
/// symmetric separable state, Grover from the ring-forming state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure2Config {
    #[serde(default = "default_figure_t")]
    pub t: usize,
}

/// Heatmaps of the balanced non-reversal (symmetric state) and
/// non-repeating (ring state) walks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure3Config {
    #[serde(default = "default_figure_t")]
    pub t: usize,
}

/// Radial-statistics curves for all five coins over a shared initial-state
/// pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure4Config {
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_n_states")]
    pub n_states: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// The even-moment initial-state independence sweep. Desk defaults shrink
/// the full 500-coin / 1000-state protocol to 50 x 50.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceConfig {
    #[serde(default = "default_families")]
    pub families: Vec<CoinFamily>,
    #[serde(default = "default_n_coins")]
    pub n_coins: usize,
    #[serde(default = "default_sweep_states")]
    pub n_states: usize,
    #[serde(default = "default_sweep_t")]
    pub t: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub sampler: StateSampler,
}

/// Coin pairs sharing (m1, m2, m3, lambda, gamma) with resampled
/// constituents, plus a deliberately perturbed partner as negative control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiveParamConfig {
    #[serde(default = "default_n_pairs")]
    pub n_pairs: usize,
    #[serde(default = "default_sweep_t")]
    pub t: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Shift applied to m1 for the mismatched partner.
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
}

/// Band structure scan of the non-repeating walk over the Brillouin zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Coin parameters; the balanced reference coin when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<CoinParamsSpec>,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

/// Classical non-reversal Monte Carlo plus exact enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    #[serde(default = "default_msd_n")]
    pub msd_n: usize,
    #[serde(default = "default_msd_samples")]
    pub msd_samples: usize,
    #[serde(default = "default_enum_max")]
    pub enum_max_n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// A single walk: per-step radial statistics plus the final field rendered
/// as heatmap files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub coin: CoinSpec,
    pub state: StateSpec,
    #[serde(default = "default_figure_t")]
    pub t: usize,
}

/// Joint moments of a single walk, with asymptotic coefficients alongside
/// when the coin family supports them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub coin: CoinSpec,
    pub state: StateSpec,
    #[serde(default = "default_sweep_t")]
    pub t: usize,
    #[serde(default = "default_max_degree")]
    pub max_degree: u32,
    #[serde(default = "default_quadrature_grid")]
    pub grid: usize,
}

/// One experiment, tagged by the `experiment` key of its JSON document.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Figure2(Figure2Config),
    Figure3(Figure3Config),
    Figure4(Figure4Config),
    IndependenceSweep(IndependenceConfig),
    FiveParamTest(FiveParamConfig),
    Spectrum(SpectrumConfig),
    Classical(ClassicalConfig),
    Evolve(EvolveConfig),
    Moments(MomentsConfig),
}

/// CLI-level overrides applied on top of a parsed config.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub t: Option<usize>,
    pub grid: Option<usize>,
}

impl ExperimentConfig {
    pub fn tag(&self) -> &'static str {
        match self {
            ExperimentConfig::Figure2(_) => "figure2",
            ExperimentConfig::Figure3(_) => "figure3",
            ExperimentConfig::Figure4(_) => "figure4",
            ExperimentConfig::IndependenceSweep(_) => "independence_sweep",
            ExperimentConfig::FiveParamTest(_) => "five_param_test",
            ExperimentConfig::Spectrum(_) => "spectrum",
            ExperimentConfig::Classical(_) => "classical",
            ExperimentConfig::Evolve(_) => "evolve",
            ExperimentConfig::Moments(_) => "moments",
        }
    }

    /// Parse a JSON document. The `experiment` key selects the kind; any
    /// unknown key anywhere is an error.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let object = value
            .as_object_mut()
            .ok_or_else(|| HarnessError::Config("config must be a JSON object".into()))?;
        let tag = object
            .remove("experiment")
            .ok_or_else(|| HarnessError::Config("missing \"experiment\" key".into()))?;
        let tag = tag
            .as_str()
            .ok_or_else(|| HarnessError::Config("\"experiment\" must be a string".into()))?
            .to_owned();
        let body = value;
        let parsed = match tag.as_str() {
            "figure2" => ExperimentConfig::Figure2(serde_json::from_value(body)?),
            "figure3" => ExperimentConfig::Figure3(serde_json::from_value(body)?),
            "figure4" => ExperimentConfig::Figure4(serde_json::from_value(body)?),
            "independence_sweep" => {
                ExperimentConfig::IndependenceSweep(serde_json::from_value(body)?)
            }
            "five_param_test" => ExperimentConfig::FiveParamTest(serde_json::from_value(body)?),
            "spectrum" => ExperimentConfig::Spectrum(serde_json::from_value(body)?),
            "classical" => ExperimentConfig::Classical(serde_json::from_value(body)?),
            "evolve" => ExperimentConfig::Evolve(serde_json::from_value(body)?),
            "moments" => ExperimentConfig::Moments(serde_json::from_value(body)?),
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown experiment \"{other}\""
                )))
            }
        };
        Ok(parsed)
    }

    /// The resolved config as a JSON value including the `experiment` tag;
    /// this is what the manifest echoes.
    pub fn to_json_value(&self) -> serde_json::Value {
        let body = match self {
            ExperimentConfig::Figure2(c) => serde_json::to_value(c),
            ExperimentConfig::Figure3(c) => serde_json::to_value(c),
            ExperimentConfig::Figure4(c) => serde_json::to_value(c),
            ExperimentConfig::IndependenceSweep(c) => serde_json::to_value(c),
            ExperimentConfig::FiveParamTest(c) => serde_json::to_value(c),
            ExperimentConfig::Spectrum(c) => serde_json::to_value(c),
            ExperimentConfig::Classical(c) => serde_json::to_value(c),
            ExperimentConfig::Evolve(c) => serde_json::to_value(c),
            ExperimentConfig::Moments(c) => serde_json::to_value(c),
        };
        let mut body = body.expect("config serialization cannot fail");
        body.as_object_mut()
            .expect("configs are objects")
            .insert("experiment".into(), self.tag().into());
        body
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        match self {
            ExperimentConfig::Figure2(c) => {
                if let Some(t) = o.t {
                    c.t = t;
                }
            }
            ExperimentConfig::Figure3(c) => {
                if let Some(t) = o.t {
                    c.t = t;
                }
            }
            ExperimentConfig::Figure4(c) => {
                if let Some(t) = o.t {
                    c.t_max = t;
                }
                if let Some(seed) = o.seed {
                    c.seed = seed;
                }
            }
            ExperimentConfig::IndependenceSweep(c) => {
                if let Some(t) = o.t {
                    c.t = t;
                }
                if let Some(seed) = o.seed {
                    c.seed = seed;
                }
            }
            ExperimentConfig::FiveParamTest(c) => {
                if let Some(t) = o.t {
                    c.t = t;
                }
                if let Some(seed) = o.seed {
                    c.seed = seed;
                }
            }
            ExperimentConfig::Spectrum(c) => {
                if let Some(grid) = o.grid {
                    c.grid = grid;
                }
            }
            ExperimentConfig::Classical(c) => {
                if let Some(seed) = o.seed {
                    c.seed = seed;
                }
            }
            ExperimentConfig::Evolve(c) => {
                if let Some(t) = o.t {
                    c.t = t;
                }
            }
            ExperimentConfig::Moments(c) => {
                if let Some(t) = o.t {
                    c.t = t;
                }
                if let Some(grid) = o.grid {
                    c.grid = grid;
                }
            }
        }
    }
}
