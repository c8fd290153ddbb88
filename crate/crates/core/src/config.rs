//! Experiment configuration: JSON-loadable, schema-validated before any
//! computation runs, unknown keys rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{BoundaryFn, DomainDescriptor};
use crate::error::{Error, Result};
use crate::field::{builtin_field, FieldSpec, ScalarField};
use crate::metric::MetricParams;
use crate::sampling::SamplerConfig;
use crate::seminorm::SeminormSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MetricConfig {
    pub dimension: usize,
    pub gamma: f64,
}

impl MetricConfig {
    pub fn build(&self) -> Result<MetricParams> {
        MetricParams::new(self.dimension, self.gamma)
    }
}

/// Inputs for the McShane extension subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct McShaneSection {
    pub phi: BoundaryFn,
    pub window: Vec<(f64, f64)>,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lip: Option<f64>,
}

/// One experiment: metric, domain, field, seminorm and sampling sections.
/// Sections used only by some subcommands are optional; a subcommand that
/// needs a missing section reports schema errors by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub metric: MetricConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<SeminormSpec>,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcshane: Option<McShaneSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    /// Parse and validate; no computation happens before this passes.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("config schema error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.metric.build()?;
        self.sampler.validate()?;
        if let Some(spec) = &self.seminorm {
            spec.validate()?;
        }
        if let Some(d) = &self.domain {
            if d.dim() != self.metric.dimension {
                return Err(Error::invalid(format!(
                    "domain dimension {} does not match metric dimension {}",
                    d.dim(),
                    self.metric.dimension
                )));
            }
        }
        if let Some(ms) = &self.mcshane {
            if !(ms.gamma > 0.0 && ms.gamma <= 1.0) {
                return Err(Error::invalid("mcshane.gamma must lie in (0, 1]"));
            }
            if ms.window.len() + 1 != self.metric.dimension {
                return Err(Error::invalid(
                    "mcshane.window must have dimension N - 1 of the metric",
                ));
            }
        }
        Ok(())
    }

    pub fn require_domain(&self) -> Result<&DomainDescriptor> {
        self.domain
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the 'domain' section"))
    }

    pub fn require_seminorm(&self) -> Result<&SeminormSpec> {
        self.seminorm
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the 'seminorm' section"))
    }

    pub fn require_mcshane(&self) -> Result<&McShaneSection> {
        self.mcshane
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the 'mcshane' section"))
    }

    /// Build the configured field, restricted to the configured domain when
    /// one is present.
    pub fn build_field(&self) -> Result<ScalarField> {
        let spec = self
            .field
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the 'field' section"))?;
        let f = builtin_field(spec, self.metric.dimension)?;
        Ok(match &self.domain {
            Some(d) => f.with_domain(d.clone()),
            None => f,
        })
    }
}
