use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Bounds on one named metric. `min`/`max` are inclusive, `above`/`below`
/// strict.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub name: String,
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<f64>,
}

impl Gate {
    pub fn at_least(name: impl Into<String>, metric: impl Into<String>, bound: f64) -> Gate {
        Gate {
            name: name.into(),
            metric: metric.into(),
            min: Some(bound),
            ..Gate::default()
        }
    }

    pub fn at_most(name: impl Into<String>, metric: impl Into<String>, bound: f64) -> Gate {
        Gate {
            name: name.into(),
            metric: metric.into(),
            max: Some(bound),
            ..Gate::default()
        }
    }

    pub fn above(name: impl Into<String>, metric: impl Into<String>, bound: f64) -> Gate {
        Gate {
            name: name.into(),
            metric: metric.into(),
            above: Some(bound),
            ..Gate::default()
        }
    }

    pub fn below(name: impl Into<String>, metric: impl Into<String>, bound: f64) -> Gate {
        Gate {
            name: name.into(),
            metric: metric.into(),
            below: Some(bound),
            ..Gate::default()
        }
    }

    pub fn admits(&self, v: f64) -> bool {
        v.is_finite()
            && self.min.is_none_or(|b| v >= b)
            && self.max.is_none_or(|b| v <= b)
            && self.above.is_none_or(|b| v > b)
            && self.below.is_none_or(|b| v < b)
    }
}

/// Contents of a gate file: a list of `[[gate]]` tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateFile {
    #[serde(default)]
    pub gate: Vec<Gate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome {
    pub gate: Gate,
    /// `None` when the metric was not produced, which fails the gate.
    pub value: Option<f64>,
    pub passed: bool,
}

impl fmt::Display for GateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let value = self.value.map_or_else(|| "missing".to_string(), |v| format!("{v:.6}"));
        write!(f, "{verdict} {}: {} = {value}", self.gate.name, self.gate.metric)?;
        if let Some(lo) = self.gate.min {
            write!(f, " (min {lo})")?;
        }
        if let Some(hi) = self.gate.max {
            write!(f, " (max {hi})")?;
        }
        if let Some(b) = self.gate.above {
            write!(f, " (above {b})")?;
        }
        if let Some(b) = self.gate.below {
            write!(f, " (below {b})")?;
        }
        Ok(())
    }
}

/// Evaluates every gate against `metrics`.
pub fn check_gates(gates: &[Gate], metrics: &BTreeMap<String, f64>) -> Vec<GateOutcome> {
    gates
        .iter()
        .map(|g| {
            let value = metrics.get(&g.metric).copied();
            let passed = value.is_some_and(|v| g.admits(v));
            GateOutcome {
                gate: g.clone(),
                value,
                passed,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_check_bounds_and_missing_metrics() {
        let file: GateFile = toml::from_str(
            r#"
            [[gate]]
            name = "detect"
            metric = "a"
            min = 0.9
            [[gate]]
            name = "fp"
            metric = "b"
            max = 0.01
            [[gate]]
            name = "absent"
            metric = "c"
            min = 0.0
            "#,
        )
        .unwrap();
        let metrics = BTreeMap::from([("a".to_string(), 0.95), ("b".to_string(), 0.02)]);
        let out = check_gates(&file.gate, &metrics);
        assert_eq!(out.iter().map(|o| o.passed).collect::<Vec<_>>(), [true, false, false]);
        assert!(out[2].to_string().starts_with("FAIL absent"));
        let strict = Gate::above("s", "a", 0.95);
        assert!(!strict.admits(0.95) && strict.admits(0.96));
        assert!(!Gate::at_least("n", "a", 0.0).admits(f64::NAN));
    }
}
