use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use weyl_numerics::matrix_json::Rows;
use weyl_numerics::{Complex64, ContourSpec};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 1729;

/// Contents of the `--config` file. Every field is optional; each command
/// reads the ones it needs and falls back to built-in defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Path to a model or triple JSON file, relative to the config file.
    pub model: Option<PathBuf>,
    /// Registry key for `scan` and `eig`.
    pub model_type: Option<String>,
    /// Registry key for `example`.
    pub example: Option<String>,
    pub seed: Option<u64>,
    /// Per-check tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub grid: Option<GridConfig>,
    pub contour: Option<ContourSpec>,
    pub region: Option<RegionConfig>,
    /// Discretization size where a model needs one.
    pub nodes: Option<usize>,
    /// Boundary parameter for triples.
    pub b: Option<Rows>,
    /// Example parameters.
    pub params: Option<serde_json::Value>,
    #[serde(skip)]
    base: PathBuf,
}

/// The product grid `re × im` with `re_count` equispaced real parts.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub re_count: usize,
    pub im: Vec<f64>,
}

impl GridConfig {
    pub fn points(&self) -> Vec<Complex64> {
        let re: Vec<f64> = if self.re_count == 1 {
            vec![self.re_min]
        } else {
            let step = (self.re_max - self.re_min) / (self.re_count - 1) as f64;
            (0..self.re_count).map(|j| self.re_min + step * j as f64).collect()
        };
        self.im.iter().flat_map(|&y| re.iter().map(move |&x| Complex64::new(x, y))).collect()
    }

    fn validate(&self) -> Result<()> {
        let finite = self.re_min.is_finite() && self.re_max.is_finite() && self.im.iter().all(|y| y.is_finite());
        if !finite || self.re_count == 0 || self.im.is_empty() || self.re_max < self.re_min {
            return Err(CliError::Config(format!("malformed grid {self:?}")));
        }
        if self.im.contains(&0.0) {
            return Err(CliError::Config("grid imaginary parts must be nonzero".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, &tol) in &self.tolerances {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Config(format!("tolerance {name} = {tol} must be positive")));
            }
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if let Some(p) = self.model_path() {
            if !p.is_file() {
                return Err(CliError::Config(format!("model file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn model_path(&self) -> Option<PathBuf> {
        self.model.as_ref().map(|p| if p.is_absolute() { p.clone() } else { self.base.join(p) })
    }

    /// Reads the model file, if any.
    pub fn model_text(&self) -> Result<Option<String>> {
        self.model_path()
            .map(|p| {
                std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))
            })
            .transpose()
    }

    /// Parses the model file as `T`, if any.
    pub fn model_as<T: DeserializeOwned>(&self) -> Result<Option<T>> {
        match self.model_text()? {
            None => Ok(None),
            Some(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| CliError::Config(format!("model file: {e}"))),
        }
    }

    /// Parses `params` as `T`, defaulting when absent.
    pub fn params_as<T: DeserializeOwned + Default>(&self) -> Result<T> {
        match &self.params {
            None => Ok(T::default()),
            Some(v) => T::deserialize(v).map_err(|e| CliError::Config(format!("params: {e}"))),
        }
    }
}
