//! Function-file loading: DNF JSON (`{"n":..,"terms":..}`) or truth-table
//! JSON (`{"n":..,"outputs":..}`), detected by shape.

use std::fs;
use std::path::Path;

use qsample_core::{BipolarFunction, DnfFormula};

use crate::error::{HarnessError, Result};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path.display().to_string(), e))
}

pub fn write_string(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| HarnessError::io(parent.display().to_string(), e))?;
        }
    }
    fs::write(path, content).map_err(|e| HarnessError::io(path.display().to_string(), e))
}

/// Parse a function file by its shape.
pub fn parse_function(text: &str) -> Result<BipolarFunction> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let object = value
        .as_object()
        .ok_or_else(|| HarnessError::Usage("function file must be a JSON object".into()))?;
    if object.contains_key("terms") {
        Ok(BipolarFunction::from_dnf(DnfFormula::from_json(text)?))
    } else if object.contains_key("outputs") {
        Ok(BipolarFunction::from_table_json(text)?)
    } else {
        Err(HarnessError::Usage(
            "function file needs either a \"terms\" (DNF) or an \"outputs\" (truth table) field"
                .into(),
        ))
    }
}

pub fn load_function(path: &Path) -> Result<BipolarFunction> {
    parse_function(&read_to_string(path)?)
}
