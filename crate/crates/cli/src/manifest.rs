use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use shadowtrace::{CurveSpec, IntegrationConfig};

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub curve: CurveSpec,
    pub params: Value,
    pub integration: IntegrationConfig,
    /// sha256 over the canonical JSON of command, curve, params and integration.
    pub config_hash: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, curve: CurveSpec, params: Value, integration: IntegrationConfig) -> Self {
        let mut m = RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            curve,
            params,
            integration,
            config_hash: String::new(),
            outputs: Vec::new(),
        };
        m.config_hash = m.hash();
        m
    }

    pub fn hash(&self) -> String {
        // serde_json maps keep keys sorted, so this text is canonical.
        let canonical = serde_json::json!({
            "command": self.command,
            "curve": self.curve,
            "params": self.params,
            "integration": self.integration,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
