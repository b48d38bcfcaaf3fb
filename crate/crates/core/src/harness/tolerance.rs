//! Central tolerance table, overridable per key.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub steiner: f64,
    pub quadratic_exact: f64,
    pub quadratic_quadrature: f64,
    pub lattice_measure: f64,
    pub lattice_valuation: f64,
    pub duality: f64,
    pub extremes: f64,
    pub covariance_measure: f64,
    pub covariance_valuation: f64,
    pub simplicity: f64,
    pub continuity_measure: f64,
    pub continuity_valuation: f64,
    pub support_bridge: f64,
    pub boundary: f64,
    pub conjugate_paths: f64,
    pub separation_fit: f64,
    pub separation_gap: f64,
    pub biconjugate: f64,
    pub lattice_conjugation: f64,
    pub hadwiger: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            steiner: 1e-9,
            quadratic_exact: 1e-12,
            quadratic_quadrature: 1e-8,
            lattice_measure: 1e-9,
            lattice_valuation: 1e-6,
            duality: 1e-9,
            extremes: 1e-9,
            covariance_measure: 1e-9,
            covariance_valuation: 1e-6,
            simplicity: 1e-10,
            continuity_measure: 1e-3,
            continuity_valuation: 1e-4,
            support_bridge: 3e-3,
            boundary: 1e-6,
            conjugate_paths: 1e-6,
            separation_fit: 1e-8,
            separation_gap: 0.1,
            biconjugate: 1e-8,
            lattice_conjugation: 1e-8,
            hadwiger: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn keys() -> Vec<String> {
        match serde_json::to_value(Self::default()) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let mut map = match serde_json::to_value(&*self) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("tolerances serialize to an object"),
        };
        if !map.contains_key(key) {
            return Err(Error::SchemaError { path: format!("tolerances.{key}"), message: "unknown tolerance key".into() });
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::SchemaError { path: format!("tolerances.{key}"), message: "tolerance must be a finite non-negative number".into() });
        }
        map.insert(key.to_string(), serde_json::json!(value));
        *self = serde_json::from_value(serde_json::Value::Object(map)).expect("same shape");
        Ok(())
    }

    /// Parses `key=value`.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let bad = || Error::SchemaError { path: "--tol".into(), message: format!("expected key=value, got {assignment:?}") };
        let (k, v) = assignment.split_once('=').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        self.set(k.trim(), v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_by_key() {
        let mut t = Tolerances::default();
        t.apply("duality=1e-7").unwrap();
        assert_eq!(t.duality, 1e-7);
        assert!(t.apply("nonsense=1").is_err());
        assert!(t.apply("duality").is_err());
        assert!(Tolerances::keys().contains(&"hadwiger".to_string()));
    }
}
