use super::expr::SymbolExpr;
use super::families::builtin_family;
use super::parse::parse_expr;
use super::seminorm::ClassParams;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// On-disk description of a symbol: a built-in family or a prefix expression,
/// with an optional class (required for expressions).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassParams>,
}

/// A resolved symbol with its class.
#[derive(Clone, Debug)]
pub struct LoadedSymbol {
    pub expr: SymbolExpr,
    pub class: ClassParams,
}

impl SymbolSpec {
    pub fn family(name: &str, params: &[(&str, f64)]) -> Self {
        SymbolSpec {
            family: Some(name.to_string()),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            expr: None,
            class: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<LoadedSymbol> {
        match (&self.family, &self.expr) {
            (Some(name), None) => {
                let (expr, declared) = builtin_family(name, &self.params)?;
                Ok(LoadedSymbol {
                    expr,
                    class: self.class.unwrap_or(declared),
                })
            }
            (None, Some(src)) => {
                let expr = parse_expr(src)?;
                let class = self
                    .class
                    .ok_or_else(|| Error::SymbolSpec("an `expr` symbol needs a `class`".into()))?;
                Ok(LoadedSymbol { expr, class })
            }
            _ => Err(Error::SymbolSpec(
                "exactly one of `family` and `expr` must be given".into(),
            )),
        }
    }
}
