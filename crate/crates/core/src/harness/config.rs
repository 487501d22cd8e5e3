use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::beamforming::{FeedbackMode, PhaseQuantizer};
use crate::channel::ScenarioConfig;
use crate::dimsearch::SearchConfig;
use crate::neuralnet::TrainConfig;
use crate::{Error, Result};

/// Hardware and link parameters shared by training and deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_bs: usize,
    pub n_rf: usize,
    pub n_users: usize,
    /// Probing beams (bottleneck width).
    pub m_bs: usize,
    #[serde(default = "default_phase_bits")]
    pub phase_bits: u32,
    #[serde(default = "default_feedback_mode")]
    pub feedback_mode: FeedbackMode,
    #[serde(default)]
    pub feedback_bits: u32,
    /// Downlink power `P`, split evenly across users.
    #[serde(default = "one")]
    pub total_power: f64,
    /// Probing power `P_t`; defaults to `total_power`.
    #[serde(default)]
    pub tx_power_probe: Option<f64>,
    /// Probing noise `σ_p²`; defaults to the downlink noise at each SNR.
    #[serde(default)]
    pub probe_noise_power: Option<f64>,
}

fn default_phase_bits() -> u32 {
    3
}

fn default_feedback_mode() -> FeedbackMode {
    FeedbackMode::Perfect
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    /// SNR grid `P / σ²` in dB.
    pub snr_db: Vec<f64>,
    /// Azimuth grid points for beam patterns.
    #[serde(default = "default_pattern_resolution")]
    pub pattern_resolution: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_pattern_resolution() -> usize {
    181
}

fn default_n_test() -> usize {
    1000
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub search: SearchConfig,
    pub system: SystemConfig,
    pub eval: EvalConfig,
}

impl ExperimentConfig {
    /// Parses TOML text, applies `--section.key value` style overrides and
    /// fills derived defaults: a half-wavelength ULA of `system.n_bs`
    /// elements when `scenario.geometry` is absent, and `search.n_antennas`
    /// from `system.n_bs`.
    pub fn from_toml_str(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
        for (key, raw) in overrides {
            apply_override(&mut table, key, raw)?;
        }
        let missing: Vec<&str> = REQUIRED_KEYS
            .iter()
            .copied()
            .filter(|key| lookup(&table, key).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(Error::config(missing.join(", "), "required key missing"));
        }
        fill_derived(&mut table);
        let config: Self = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| describe(&e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[(String, String)]) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?, overrides)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid(format!("cannot serialize config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.train.validate()?;
        self.search.validate()?;
        let sys = &self.system;
        if sys.n_bs == 0 {
            return Err(Error::config("system.n_bs", "must be positive"));
        }
        if self.scenario.geometry.n_antennas() != sys.n_bs {
            return Err(Error::config(
                "scenario.geometry",
                format!(
                    "has {} elements but system.n_bs is {}",
                    self.scenario.geometry.n_antennas(),
                    sys.n_bs
                ),
            ));
        }
        if self.search.n_antennas != sys.n_bs {
            return Err(Error::config(
                "search.n_antennas",
                format!("must equal system.n_bs ({})", sys.n_bs),
            ));
        }
        if sys.n_users == 0 {
            return Err(Error::config("system.n_users", "must be at least 1"));
        }
        if sys.n_users > sys.n_rf {
            return Err(Error::config(
                "system.n_users",
                format!("{} users exceed {} RF chains", sys.n_users, sys.n_rf),
            ));
        }
        if sys.n_rf > sys.n_bs {
            return Err(Error::config("system.n_rf", "cannot exceed system.n_bs"));
        }
        if sys.m_bs == 0 || sys.m_bs > sys.n_bs {
            return Err(Error::config("system.m_bs", format!("must lie in [1, {}]", sys.n_bs)));
        }
        PhaseQuantizer::new(sys.phase_bits).map_err(|e| Error::config("system.phase_bits", e.to_string()))?;
        if sys.feedback_mode == FeedbackMode::Rvq && sys.feedback_bits > 20 {
            return Err(Error::config("system.feedback_bits", "at most 20 bits are supported"));
        }
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        positive("system.total_power", sys.total_power)?;
        if let Some(p) = sys.tx_power_probe {
            positive("system.tx_power_probe", p)?;
        }
        if let Some(p) = sys.probe_noise_power {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::config(
                    "system.probe_noise_power",
                    format!("must be non-negative, got {p}"),
                ));
            }
        }
        if self.eval.snr_db.is_empty() {
            return Err(Error::config("eval.snr_db", "SNR grid must not be empty"));
        }
        if self.eval.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("eval.snr_db", "SNR values must be finite"));
        }
        if self.eval.pattern_resolution == 0 {
            return Err(Error::config("eval.pattern_resolution", "must be at least 1"));
        }
        if self.eval.n_test < sys.n_users {
            return Err(Error::config(
                "eval.n_test",
                format!("needs at least {} channels", sys.n_users),
            ));
        }
        Ok(())
    }

    pub fn quantizer(&self) -> PhaseQuantizer {
        PhaseQuantizer::new(self.system.phase_bits).expect("validated")
    }

    /// `σ² = P / 10^(snr/10)`.
    pub fn noise_power(&self, snr_db: f64) -> f64 {
        self.system.total_power / 10f64.powf(snr_db / 10.0)
    }

    pub fn probe_power(&self) -> f64 {
        self.system.tx_power_probe.unwrap_or(self.system.total_power)
    }

    pub fn probe_noise_power(&self, snr_db: f64) -> f64 {
        self.system
            .probe_noise_power
            .unwrap_or_else(|| self.noise_power(snr_db))
    }
}

/// Keys without defaults.
pub const REQUIRED_KEYS: &[&str] = &[
    "scenario.n_users",
    "scenario.n_clusters",
    "scenario.angular_spread_rad",
    "scenario.paths_per_user",
    "scenario.seed",
    "system.n_bs",
    "system.n_rf",
    "system.n_users",
    "system.m_bs",
    "eval.snr_db",
];

fn lookup<'a>(table: &'a Table, key: &str) -> Option<&'a Value> {
    let mut parts = key.split('.');
    let mut value = table.get(parts.next()?)?;
    for part in parts {
        value = value.get(part)?;
    }
    Some(value)
}

/// Sets a dotted key, creating intermediate tables. The value is parsed as
/// a TOML literal when possible and kept as a string otherwise.
pub fn apply_override(table: &mut Table, key: &str, raw: &str) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "malformed override key"));
    }
    let value = parse_value(raw);
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut cursor = table;
    for part in parents {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn fill_derived(table: &mut Table) {
    let Some(n_bs) = table
        .get("system")
        .and_then(|s| s.get("n_bs"))
        .and_then(Value::as_integer)
    else {
        return;
    };
    if let Some(Value::Table(scenario)) = table.get_mut("scenario") {
        scenario.entry("geometry").or_insert_with(|| {
            let mut g = Table::new();
            g.insert("n_horizontal".into(), Value::Integer(n_bs));
            g.insert("n_vertical".into(), Value::Integer(1));
            g.insert("element_spacing_wavelengths".into(), Value::Float(0.5));
            Value::Table(g)
        });
    }
    let search = table.entry("search").or_insert_with(|| Value::Table(Table::new()));
    if let Value::Table(search) = search {
        search.entry("n_antennas").or_insert(Value::Integer(n_bs));
    }
}

fn describe(err: &toml::de::Error) -> Error {
    let message = err.message().to_string();
    let key = message
        .split('`')
        .nth(1)
        .filter(|_| message.starts_with("missing field") || message.starts_with("unknown field"))
        .unwrap_or("<config>")
        .to_string();
    Error::Config { key, message }
}
