//! JSON configuration: converter block, GPC block, discretization, gain
//! model, stability margin and output directory.

use std::fs;
use std::path::{Path, PathBuf};

use boost_gpc::gpc::GpcConfig;
use boost_gpc::plant::{ConverterParams, Discretization, SmallSignalGain};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub converter: ConverterParams,
    pub gpc: GpcConfig,
    #[serde(default)]
    pub discretization: Discretization,
    /// DC gain of the design model.
    #[serde(default)]
    pub gain: SmallSignalGain,
    #[serde(default)]
    pub margin: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            converter: ConverterParams::nominal(),
            gpc: GpcConfig::new(13, 10.0),
            discretization: Discretization::default(),
            gain: SmallSignalGain::default(),
            margin: 0.0,
            output_dir: default_output_dir(),
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        parse_json(path)
    }

    #[cfg(test)]
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        parse_str(text, origin)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.converter
            .validate()
            .map_err(|e| CliError::input(format!("converter: {e}")))?;
        self.gpc
            .validate()
            .map_err(|e| CliError::input(format!("gpc: {e}")))?;
        if !(0.0..1.0).contains(&self.margin) {
            return Err(CliError::input(format!(
                "margin: need 0 ≤ margin < 1, got {}",
                self.margin
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Deserialize a JSON file, naming the offending key and position on error.
pub fn parse_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_str(&text, &path.display().to_string())
}

fn parse_str<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        if key == "." {
            CliError::input(format!("{origin}: {inner}"))
        } else {
            CliError::input(format!("{origin}: at key `{key}`: {inner}"))
        }
    })
}
