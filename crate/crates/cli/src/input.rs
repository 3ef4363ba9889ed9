use std::path::Path;

use qslice_core::Quaternion;
use serde::de::DeserializeOwned;

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_quaternion(name: &str, text: &str) -> Result<Quaternion, CliError> {
    let q: Quaternion =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("--{name}: {e}")))?;
    if !q.is_finite() {
        return Err(CliError::Input(format!("--{name}: non-finite component")));
    }
    Ok(q)
}

pub fn require<'a, T>(name: &str, v: &'a Option<T>) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Input(format!("--{name} is required for this model")))
}
