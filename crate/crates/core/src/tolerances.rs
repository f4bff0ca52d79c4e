//! Verification tolerances with a shipped default file and validated overrides.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const DEFAULT_TOML: &str = include_str!("../tolerances.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub identity_apply: f64,
    pub duality_residual: f64,
    pub route_agreement: f64,
    /// Allowed relative growth between the top two seminorm shells.
    pub stabilization: f64,
    pub remainder_slack_first: f64,
    pub remainder_slack_second: f64,
    pub remainder_min_r2: f64,
    pub remainder_zero: f64,
    pub criterion_slack: f64,
    pub kernel_size_exponent: f64,
    pub kernel_gradient_exponent: f64,
    pub kernel_refinement: f64,
    pub leibniz_residual: f64,
    pub reconstruction: f64,
    pub phi_partition: f64,
    pub trend_slope: f64,
    pub holder_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TOML).expect("shipped tolerance file parses")
    }
}

impl Tolerances {
    pub fn default_toml() -> &'static str {
        DEFAULT_TOML
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let t: Tolerances = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn keys() -> Vec<String> {
        let table: toml::Table =
            toml::from_str(DEFAULT_TOML).expect("shipped tolerance file parses");
        table.keys().cloned().collect()
    }

    fn validate(&self) -> Result<()> {
        let table = self.to_table();
        for (k, v) in &table {
            let x = v.as_float().unwrap_or(f64::NAN);
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::Config(format!(
                    "tolerance `{k}` must be a finite nonnegative number"
                )));
            }
        }
        Ok(())
    }

    fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("tolerances serialize to a table")
    }

    /// Replace one value; unknown keys and unparsable values are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut table = self.to_table();
        if !table.contains_key(key) {
            return Err(Error::Config(format!(
                "unknown tolerance `{key}` (known: {})",
                Self::keys().join(", ")
            )));
        }
        let x: f64 = value.trim().parse().map_err(|_| {
            Error::Config(format!("tolerance `{key}` needs a number, got `{value}`"))
        })?;
        table.insert(key.to_string(), toml::Value::Float(x));
        let next: Tolerances = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        next.validate()?;
        *self = next;
        Ok(())
    }

    /// Apply `key=value` overrides in order.
    pub fn with_overrides<S: AsRef<str>>(mut self, overrides: &[S]) -> Result<Self> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o.split_once('=').ok_or_else(|| {
                Error::Config(format!("override `{o}` is not of the form key=value"))
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(self)
    }
}
