//! Program bundles: versioned, human-editable JSON holding one extraction
//! program per field.

use std::fs;
use std::path::Path;

use landmark_core::runtime::ExtractionProgram;
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "landmark-bundle";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub format: String,
    pub version: u32,
    pub programs: Vec<ExtractionProgram>,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("bundle io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt bundle: {0}")]
    Corrupt(String),
    #[error("bundle version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

impl Bundle {
    pub fn new(programs: Vec<ExtractionProgram>) -> Self {
        Bundle { format: FORMAT.into(), version: VERSION, programs }
    }

    pub fn program(&self, field: &str) -> Option<&ExtractionProgram> {
        self.programs.iter().find(|p| p.field == field)
    }

    /// Pretty JSON with a trailing newline; identical programs give
    /// identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self, BundleError> {
        let header: Header = serde_json::from_str(src).map_err(|e| BundleError::Corrupt(e.to_string()))?;
        if header.format != FORMAT {
            return Err(BundleError::Corrupt(format!("format {:?} is not {FORMAT:?}", header.format)));
        }
        if header.version != VERSION {
            return Err(BundleError::Version { found: header.version });
        }
        serde_json::from_str(src).map_err(|e| BundleError::Corrupt(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), BundleError> {
        Ok(fs::write(path, self.to_json())?)
    }

    pub fn load(path: &Path) -> Result<Self, BundleError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
