//! The optional TOML run configuration. Every table is optional; values left
//! out fall back to the library defaults, and command-line flags override
//! whatever the file sets.
//!
//! ```toml
//! jobs = 4
//! lexicon = "my.lex"          # relative to the config file
//!
//! [synth]                     # any SynthConfig field
//! seed = 7
//! [synth.firestorm]
//! magnitude = 6.0
//!
//! [suite]
//! events = 21
//! seed = 2021
//! [suite.jitter]
//! start_slice = [360, 420]
//!
//! [stream]
//! categories = ["netspeak", "I", "posemo", "emo", "assent"]
//! min_categories = 4
//! recency = 2
//!
//! [networks]
//! kind = "mention"
//! window = 24
//!
//! [evaluate]
//! horizon = 48
//! tolerance = 2
//! ```

use std::path::{Path, PathBuf};

use firestorm_core::synth::SuiteJitter;
use firestorm_core::SynthConfig;
use serde::Deserialize;

use crate::failure::{CliResult, Failure};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub jobs: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub strict: Option<bool>,
    pub synth: SynthConfig,
    pub suite: SuiteSection,
    pub stream: StreamSection,
    pub networks: NetworksSection,
    pub evaluate: EvaluateSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub events: Option<usize>,
    pub seed: Option<u64>,
    pub jitter: SuiteJitter,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamSection {
    pub categories: Option<Vec<String>>,
    pub min_categories: Option<usize>,
    pub recency: Option<usize>,
    pub window: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworksSection {
    pub kind: Option<String>,
    pub window: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub horizon: Option<usize>,
    pub tolerance: Option<usize>,
    pub test_categories: Option<Vec<String>>,
    pub relevance_categories: Option<Vec<String>>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        if let (Some(lex), Some(dir)) = (&cfg.lexicon, path.parent()) {
            if lex.is_relative() {
                cfg.lexicon = Some(dir.join(lex));
            }
        }
        Ok(cfg)
    }
}
