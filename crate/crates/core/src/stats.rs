//! The JSON document every command emits.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Result;

pub const SCHEMA: &str = "biplane-stats/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub schema: String,
    pub command: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
}

impl StatsDocument {
    pub fn new(command: &str) -> Self {
        StatsDocument {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            parameters: Map::new(),
            results: Value::Null,
            runtime_ms: 0,
            nodes: None,
        }
    }

    pub fn param<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn with_results<T: Serialize>(mut self, results: &T) -> Result<Self> {
        self.results = serde_json::to_value(results)?;
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let doc = StatsDocument::new("twospace")
            .param("order", 7)
            .with_results(&serde_json::json!({"q": 70, "per_subset": {"9": 70}}))
            .unwrap();
        let back = StatsDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.schema, SCHEMA);
    }
}
