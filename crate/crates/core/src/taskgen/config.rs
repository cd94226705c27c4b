use super::catalog::{self, Ranges};
use crate::topology::DEFAULT_INNER_RADIUS_RATIO;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("unknown task `{0}` in config")]
    UnknownTask(String),
    #[error("config field `{path}`: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskOverride {
    #[serde(default)]
    pub major: Option<(usize, usize)>,
    #[serde(default)]
    pub minor: Option<(usize, usize)>,
    #[serde(default)]
    pub inner_radius_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    #[serde(default = "default_n")]
    pub n_per_task: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_ratio")]
    pub inner_radius_ratio: f64,
    /// Restrict generation to these task ids; empty means all.
    #[serde(default)]
    pub task_filter: Vec<String>,
    #[serde(default)]
    pub tasks: BTreeMap<String, TaskOverride>,
}

fn default_n() -> usize {
    100
}

fn default_ratio() -> f64 {
    DEFAULT_INNER_RADIUS_RATIO
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_per_task: default_n(),
            base_seed: 0,
            inner_radius_ratio: default_ratio(),
            task_filter: Vec::new(),
            tasks: BTreeMap::new(),
        }
    }
}

impl GenConfig {
    /// Parse and validate a JSON config. Errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: GenConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Field {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |path: String, message: &str| ConfigError::Invalid {
            path,
            message: message.to_string(),
        };
        if self.n_per_task == 0 {
            return Err(invalid("n_per_task".into(), "must be at least 1"));
        }
        if !(0.0..0.9).contains(&self.inner_radius_ratio) {
            return Err(invalid("inner_radius_ratio".into(), "must lie in [0, 0.9)"));
        }
        for id in &self.task_filter {
            if catalog::task(id).is_none() {
                return Err(ConfigError::UnknownTask(id.clone()));
            }
        }
        for (id, o) in &self.tasks {
            if catalog::task(id).is_none() {
                return Err(ConfigError::UnknownTask(id.clone()));
            }
            for (axis, r) in [("major", o.major), ("minor", o.minor)] {
                if let Some((lo, hi)) = r {
                    if lo == 0 || lo > hi {
                        return Err(invalid(format!("tasks.{id}.{axis}"), "expected [lo, hi] with 1 <= lo <= hi"));
                    }
                }
            }
            if let Some(r) = o.inner_radius_ratio {
                if !(0.0..0.9).contains(&r) {
                    return Err(invalid(format!("tasks.{id}.inner_radius_ratio"), "must lie in [0, 0.9)"));
                }
            }
        }
        Ok(())
    }

    pub fn ranges(&self, task_id: &str, defaults: Ranges) -> Ranges {
        let o = self.tasks.get(task_id);
        Ranges {
            major: o.and_then(|o| o.major).unwrap_or(defaults.major),
            minor: o.and_then(|o| o.minor).unwrap_or(defaults.minor),
        }
    }

    pub fn ratio(&self, task_id: &str) -> f64 {
        self.tasks
            .get(task_id)
            .and_then(|o| o.inner_radius_ratio)
            .unwrap_or(self.inner_radius_ratio)
    }

    pub fn selected_tasks(&self) -> Vec<&'static catalog::TaskSpec> {
        catalog::catalog()
            .iter()
            .filter(|t| self.task_filter.is_empty() || self.task_filter.iter().any(|f| f == t.id))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = GenConfig::from_json(r#"{"n_per_task": 3, "tasks": {"maze": {"major": [4, 5]}}}"#).unwrap();
        assert_eq!(cfg.n_per_task, 3);
        let maze = catalog::task("maze").unwrap();
        assert_eq!(cfg.ranges("maze", maze.ranges).major, (4, 5));
        assert_eq!(cfg.ranges("maze", maze.ranges).minor, maze.ranges.minor);
    }

    #[test]
    fn bad_field_is_named() {
        let err = GenConfig::from_json(r#"{"n_per_task": "many"}"#).unwrap_err();
        assert!(err.to_string().contains("n_per_task"), "{err}");
        let err = GenConfig::from_json(r#"{"tasks": {"maze": {"major": [5, 2]}}}"#).unwrap_err();
        assert!(err.to_string().contains("tasks.maze.major"), "{err}");
        let err = GenConfig::from_json(r#"{"nper_task": 1}"#).unwrap_err();
        assert!(err.to_string().contains("nper_task"), "{err}");
        assert!(matches!(
            GenConfig::from_json(r#"{"tasks": {"chess": {}}}"#),
            Err(ConfigError::UnknownTask(_))
        ));
    }
}
