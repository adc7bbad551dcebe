//! TOML configuration. Every key is optional; missing keys take the
//! defaults of [`SynthesisConfig`].

use std::path::Path;

use landmark_core::SynthesisConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
}

pub fn parse_config(src: &str) -> Result<SynthesisConfig, ConfigError> {
    Ok(toml::from_str(src)?)
}

pub fn load_config(path: &Path) -> Result<SynthesisConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// The default configuration as TOML.
pub fn default_config_toml() -> String {
    toml::to_string_pretty(&SynthesisConfig::default()).expect("config serializes")
}
