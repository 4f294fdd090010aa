//! The manifest schema: named typed objects plus an ordered task list.
//! Parsing is strict (unknown fields are rejected) and manifests round-trip
//! bit-identically through `serde_json`.

use super::CliError;
use crate::cech_deligne::cech::{Cover, U1Function};
use crate::exterior::PolyForm;
use crate::loopspace::LoopFunctional;
use crate::twovect::MatForm;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A parsed manifest: version, named objects, and ordered tasks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, ObjectSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskSpec>,
}

/// A typed object payload.  Gerbe data is stored raw so that validation is a
/// runnable task rather than a parse-time side effect.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectSpec {
    Cover {
        cover: Cover,
    },
    Gerbe {
        cover: Cover,
        g: Vec<(Vec<usize>, U1Function)>,
        a: Vec<(Vec<usize>, PolyForm)>,
        b: Vec<(Vec<usize>, PolyForm)>,
    },
    Form {
        value: PolyForm,
    },
    Matform {
        value: MatForm,
    },
    Plectic {
        omega: PolyForm,
    },
    Loop {
        shape: LoopShape,
    },
    Surface {
        shape: SurfaceShape,
    },
    Functional {
        value: LoopFunctional,
    },
}

/// How to produce a sampled loop.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoopShape {
    Circle { samples: usize },
    Explicit { samples: Vec<Vec<f64>> },
}

/// How to produce a triangulated surface.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SurfaceShape {
    Icosphere {
        subdivisions: usize,
    },
    Explicit {
        vertices: Vec<Vec<f64>>,
        triangles: Vec<[usize; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        face_patch: Option<Vec<usize>>,
    },
}

/// One task: a command applied to named objects with optional parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
}

/// The task vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Curvature,
    Dd,
    HolLine,
    HolSurface,
    HolBrane,
    Transgress,
    Homspace,
    KsCheck,
    Suite,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Curvature => "curvature",
            Command::Dd => "dd",
            Command::HolLine => "hol-line",
            Command::HolSurface => "hol-surface",
            Command::HolBrane => "hol-brane",
            Command::Transgress => "transgress",
            Command::Homspace => "homspace",
            Command::KsCheck => "ks-check",
            Command::Suite => "suite",
        }
    }
}

/// Optional per-task numeric parameters.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
}

impl Params {
    pub fn is_empty(&self) -> bool {
        self.tol.is_none() && self.samples.is_none() && self.eps.is_none() && self.degree.is_none()
    }
}

/// Parse and validate a manifest from JSON text.
pub fn parse_manifest(text: &str) -> Result<Manifest, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let manifest: Manifest =
        serde_path_to_error::deserialize(&mut de).map_err(|e| classify(&e))?;
    for (index, task) in manifest.tasks.iter().enumerate() {
        for name in &task.objects {
            if !manifest.objects.contains_key(name) {
                return Err(CliError::BadReference {
                    index,
                    command: task.command.as_str().into(),
                    name: name.clone(),
                });
            }
        }
        let p = &task.params;
        if p.tol.is_some_and(|t| !(t > 0.0)) {
            return Err(CliError::InvalidParameter {
                index,
                detail: "tol must be positive".into(),
            });
        }
        if p.eps.is_some_and(|e| !(e > 0.0)) {
            return Err(CliError::InvalidParameter {
                index,
                detail: "eps must be positive".into(),
            });
        }
        if p.samples.is_some_and(|n| n < 16 || n % 2 != 0) {
            return Err(CliError::InvalidParameter {
                index,
                detail: "samples must be an even count of at least 16".into(),
            });
        }
    }
    Ok(manifest)
}

fn classify(err: &serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let path = err.path().to_string();
    let detail = err.inner().to_string();
    if let Some(rest) = detail.strip_prefix("unknown field `") {
        if let Some(field) = rest.split('`').next() {
            return CliError::UnknownField {
                path,
                field: field.to_string(),
            };
        }
    }
    CliError::ParseError { path, detail }
}

/// Serialize a manifest in the canonical (pretty, key-ordered) layout.
pub fn serialize_manifest(manifest: &Manifest) -> String {
    let mut out = serde_json::to_string_pretty(manifest).expect("manifests serialize");
    out.push('\n');
    out
}
