use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Verdict, Witness};

pub const CERTIFICATE_SCHEMA: &str = "hybridsim.certificate/1";

/// A verdict together with what it was computed from, for regression checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub condition: String,
    /// Hex SHA-256 of the canonical JSON of the inputs.
    pub inputs_hash: String,
    pub verdict: Verdict,
    pub parameters: serde_json::Value,
    pub witness: Option<Witness>,
}

/// Hash of the compact JSON form. Object keys are sorted by `serde_json`'s
/// default map, so equal values hash equally.
pub fn inputs_hash(inputs: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("JSON values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

impl Certificate {
    pub fn new(condition: &str, inputs: &serde_json::Value, verdict: Verdict, parameters: serde_json::Value) -> Self {
        Certificate {
            schema: CERTIFICATE_SCHEMA.into(),
            condition: condition.into(),
            inputs_hash: inputs_hash(inputs),
            witness: verdict.witness.clone(),
            verdict,
            parameters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::viability::{Evidence, Method, VerdictStatus};
    use serde_json::json;

    #[test]
    fn hash_ignores_key_order() {
        let a = json!({"xi": [1.0], "scenario": "ex1"});
        let b: serde_json::Value = serde_json::from_str(r#"{"scenario":"ex1","xi":[1.0]}"#).unwrap();
        assert_eq!(inputs_hash(&a), inputs_hash(&b));
        assert_ne!(inputs_hash(&a), inputs_hash(&json!({"xi": [1.1], "scenario": "ex1"})));
        assert_eq!(inputs_hash(&a).len(), 64);
    }

    #[test]
    fn round_trip() {
        let v = Verdict::new(VerdictStatus::Holds, Method::BallMargin, Evidence { delta: Some(0.1), ..Default::default() });
        let c = Certificate::new("ball_margin", &json!({"xi": [1.0]}), v, json!({"delta_grid": [0.1]}));
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Certificate>(&text).unwrap(), c);
    }
}
