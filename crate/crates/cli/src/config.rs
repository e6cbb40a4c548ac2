use std::path::PathBuf;

use ntlab::cyclotomic::SqrtConfig;
use serde_json::{json, Value};

pub const PRECISION_ENV: &str = "NTLAB_PRECISION_BITS";
pub const CACHE_ENV: &str = "NTLAB_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecisionSource {
    Default,
    Env,
    Flag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub bound: i64,
    pub denominator: i64,
    pub effort: u64,
}

/// Everything that shaped a run. Echoed into every report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    pub args: Vec<String>,
    pub precision_bits: u32,
    pub precision_source: PrecisionSource,
    pub search: Option<SearchBounds>,
    pub seed: Option<u64>,
    pub cache: Option<PathBuf>,
    pub output: OutputMode,
}

impl RunConfig {
    pub fn sqrt_config(&self) -> SqrtConfig {
        SqrtConfig { precision_bits: self.precision_bits, ..SqrtConfig::default() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "args": self.args,
            "cache": self.cache.as_ref().map(|p| p.display().to_string()),
            "command": self.command,
            "output": match self.output {
                OutputMode::Human => "human",
                OutputMode::Json => "json",
            },
            "precision_bits": self.precision_bits,
            "precision_source": match self.precision_source {
                PrecisionSource::Default => "default",
                PrecisionSource::Env => "env",
                PrecisionSource::Flag => "flag",
            },
            "search": self.search.as_ref().map(|s| json!({
                "bound": s.bound,
                "denominator": s.denominator,
                "effort": s.effort,
            })),
            "seed": self.seed,
        })
    }
}

/// Flag, then environment, then the library default.
pub fn resolve_precision(flag: Option<u32>, env: Option<String>) -> Result<(u32, PrecisionSource), String> {
    if let Some(bits) = flag {
        return Ok((bits, PrecisionSource::Flag));
    }
    match env {
        Some(s) => match s.trim().parse::<u32>() {
            Ok(bits) if bits > 0 => Ok((bits, PrecisionSource::Env)),
            _ => Err(format!("{PRECISION_ENV}={s:?} is not a positive integer")),
        },
        None => Ok((SqrtConfig::default().precision_bits, PrecisionSource::Default)),
    }
}
