//! JSON run configuration: one flat object per subcommand, keyed by the
//! subcommand path (`breit-rabi`, `pulse-hahn`, `spectrum-cavity`, ...),
//! plus the optional `presets` and `output` sections. Keys inside a section
//! are the long option names. Command-line flags override file values,
//! which override built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sesim::spin::{SpinSystem, SpinSystemParams};

use crate::error::{io_error, CliError, CliResult};

pub const SECTIONS: &[&str] = &[
    "presets",
    "output",
    "breit-rabi",
    "clock-find",
    "pulse-rabi",
    "pulse-ramsey",
    "pulse-hahn",
    "pulse-cpmg",
    "pulse-t1",
    "pulse-tip-angle",
    "polarize",
    "spectrum-absorption",
    "spectrum-cavity",
    "readout",
    "straggle",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    root: Map<String, Value>,
    presets: BTreeMap<String, SpinSystem>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let root = match serde_json::from_str::<Value>(text).map_err(|e| e.to_string())? {
            Value::Object(m) => m,
            _ => return Err("config must be a JSON object".into()),
        };
        for key in root.keys() {
            if !SECTIONS.contains(&key.as_str()) {
                return Err(format!("unknown section \"{key}\"; known sections: {}", SECTIONS.join(", ")));
            }
        }
        let presets = match root.get("presets") {
            None | Some(Value::Null) => BTreeMap::new(),
            Some(v) => {
                let raw: BTreeMap<String, SpinSystemParams> =
                    serde_json::from_value(v.clone()).map_err(|e| format!("presets: {e}"))?;
                raw.into_iter()
                    .map(|(name, p)| {
                        SpinSystem::new(p.g_e, p.g_n, p.nuclear_spin, p.hyperfine_hz)
                            .map(|s| (name.clone(), s))
                            .map_err(|e| format!("presets.{name}: {e}"))
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(Self { root, presets })
    }

    pub fn section(&self, name: &str) -> Option<&Value> {
        self.root.get(name)
    }

    pub fn presets(&self) -> &BTreeMap<String, SpinSystem> {
        &self.presets
    }
}

fn object(section: &str, v: Value) -> CliResult<Map<String, Value>> {
    match v {
        Value::Object(m) => Ok(m),
        Value::Null => Ok(Map::new()),
        _ => Err(CliError::Config(format!("section \"{section}\" must be a JSON object"))),
    }
}

fn to_object<P: Serialize>(section: &str, p: &P) -> CliResult<Map<String, Value>> {
    let v = serde_json::to_value(p).map_err(|e| CliError::Config(format!("{section}: {e}")))?;
    object(section, v)
}

/// Merges defaults, the file section and command-line values, in increasing
/// priority. Unknown keys in the file section are rejected.
pub fn resolve<P>(section: &str, defaults: &P, cli: &P, file: Option<&ConfigFile>) -> CliResult<P>
where
    P: Serialize + DeserializeOwned + Default,
{
    let known = to_object(section, &P::default())?;
    let mut merged = to_object(section, defaults)?;
    if let Some(v) = file.and_then(|f| f.section(section)) {
        let from_file = object(section, v.clone())?;
        for (key, value) in &from_file {
            if !known.contains_key(key) {
                let keys: Vec<&str> = known.keys().map(String::as_str).collect();
                return Err(CliError::Config(format!(
                    "{section}: unknown key \"{key}\"; accepted keys: {}",
                    keys.join(", ")
                )));
            }
            let mut single = Map::new();
            single.insert(key.clone(), value.clone());
            if let Err(e) = serde_json::from_value::<P>(Value::Object(single)) {
                return Err(CliError::Config(format!("{section}.{key}: {e}")));
            }
            if !value.is_null() {
                merged.insert(key.clone(), value.clone());
            }
        }
    }
    for (key, value) in to_object(section, cli)? {
        if !value.is_null() {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(format!("{section}: {e}")))
}

/// Config document that reproduces a run when passed back via `--config`.
pub fn saved_config(section: &str, resolved: &Value, output: &Value, file: Option<&ConfigFile>) -> Value {
    let mut root = Map::new();
    if let Some(p) = file.and_then(|f| f.section("presets")) {
        root.insert("presets".into(), p.clone());
    }
    root.insert("output".into(), output.clone());
    root.insert(section.into(), resolved.clone());
    Value::Object(root)
}
