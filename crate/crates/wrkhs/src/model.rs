//! JSON model files.
//!
//! ```json
//! {"kernel": {"family": "isotropic_gaussian", "params": {"gamma": 1.0}},
//!  "lambda": 0.1,
//!  "inputs": [[[0.5, -1.0]]],
//!  "alpha": [[0.25, 0.75]]}
//! ```
//!
//! `inputs` holds one row of `[re, im]` pairs per training sample and
//! `alpha` one `[re, im]` pair per sample.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wrkhs_core::{Complex64, KernelSpec, Matrix, WrkhsModel};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub inputs: Vec<Vec<[f64; 2]>>,
    pub alpha: Vec<[f64; 2]>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&WrkhsModel> for ModelFile {
    fn from(m: &WrkhsModel) -> Self {
        let x = m.inputs();
        ModelFile {
            kernel: m.kernel().clone(),
            lambda: m.lambda(),
            inputs: x.rows_iter().map(|r| r.iter().copied().map(pair).collect()).collect(),
            alpha: m.alpha().iter().copied().map(pair).collect(),
        }
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<WrkhsModel> {
        let n = self.inputs.len();
        let d = self.inputs.first().map_or(0, Vec::len);
        if let Some(i) = self.inputs.iter().position(|r| r.len() != d) {
            return Err(CliError::input(format!("model input row {i} has {} entries, expected {d}", self.inputs[i].len())));
        }
        let flat = self.inputs.into_iter().flatten().map(complex).collect();
        let inputs = Matrix::from_row_major(n, d, flat)?;
        let alpha = self.alpha.into_iter().map(complex).collect();
        Ok(WrkhsModel::new(inputs, self.kernel, self.lambda, alpha)?)
    }
}

pub fn to_json(m: &WrkhsModel) -> String {
    let mut s = serde_json::to_string_pretty(&ModelFile::from(m)).expect("model serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<WrkhsModel> {
    let f: ModelFile = serde_json::from_str(text).map_err(|e| CliError::input(format!("bad model JSON: {e}")))?;
    f.into_model()
}

pub fn save(m: &WrkhsModel, path: &Path) -> Result<()> {
    fs::write(path, to_json(m)).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> Result<WrkhsModel> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    from_json(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::input(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Parses a kernel given inline as JSON or as a path to a JSON file.
pub fn parse_kernel(arg: &str) -> Result<KernelSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_owned()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::io(arg, e))?
    };
    let spec: KernelSpec = serde_json::from_str(&text).map_err(|e| CliError::input(format!("bad kernel JSON: {e}")))?;
    spec.validate()?;
    Ok(spec)
}
