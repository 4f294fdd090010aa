//! Task execution.  Each task resolves its object references, runs, and
//! reports pass/fail/error; a failing or erroring task never aborts the tasks
//! after it.  Tasks are independent and could run in parallel; the report
//! always lists them in manifest order.

use super::manifest::{Command, LoopShape, Manifest, ObjectSpec, SurfaceShape, TaskSpec};
use super::report::{fmt_float, Report, Status, TaskReport};
use crate::gerbe::{make_gerbe, LocalGerbe};
use crate::loopspace::{
    dbrane_holonomy, icosphere, ks_apply, line_holonomy, surface_holonomy_extrapolated,
    surface_holonomy_trivialized, transgress_form, LoopFunctional, SampledLoop,
    TriangulatedSurface,
};
use crate::plectic::{make_plectic, PlecticSpace};
use crate::suite;
use crate::twovect::model::{hom_space, ModelSection};
use crate::twovect::MatForm;
use crate::exterior::PolyForm;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::time::Instant;

/// Run-wide option overrides (CLI flags); task parameters take precedence.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub timings: bool,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub eps: Option<f64>,
    pub degree: Option<u32>,
}

/// Run all tasks with default options.
pub fn run(manifest: &Manifest) -> Report {
    run_with(manifest, &RunOptions::default())
}

/// Run all tasks in order, collecting one report entry per task.
pub fn run_with(manifest: &Manifest, opts: &RunOptions) -> Report {
    let tasks = manifest
        .tasks
        .iter()
        .enumerate()
        .map(|(index, task)| {
            let start = Instant::now();
            let mut entry = match run_task(manifest, task, opts) {
                Ok(outcome) => TaskReport {
                    index,
                    command: task.command.as_str().into(),
                    status: if outcome.passed {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    values: outcome.values,
                    residuals: outcome.residuals,
                    detail: outcome.detail,
                    millis: None,
                },
                Err(detail) => TaskReport {
                    index,
                    command: task.command.as_str().into(),
                    status: Status::Error,
                    values: BTreeMap::new(),
                    residuals: BTreeMap::new(),
                    detail,
                    millis: None,
                },
            };
            if opts.timings {
                entry.millis = Some(start.elapsed().as_millis());
            }
            entry
        })
        .collect();
    Report {
        version: manifest.version.clone(),
        tasks,
    }
}

struct Outcome {
    passed: bool,
    values: BTreeMap<String, String>,
    residuals: BTreeMap<String, f64>,
    detail: String,
}

impl Outcome {
    fn pass() -> Self {
        Outcome {
            passed: true,
            values: BTreeMap::new(),
            residuals: BTreeMap::new(),
            detail: String::new(),
        }
    }
    fn fail(detail: String) -> Self {
        Outcome {
            passed: false,
            values: BTreeMap::new(),
            residuals: BTreeMap::new(),
            detail,
        }
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{} + {}i", fmt_float(z.re), fmt_float(z.im))
}

/// A resolved runtime object.
enum Obj {
    Gerbe(LocalGerbe),
    Form(PolyForm),
    Mat(MatForm),
    Plectic(PlecticSpace),
    Loop(SampledLoop),
    Surface(TriangulatedSurface),
    Functional(LoopFunctional),
    Cover,
}

fn resolve(manifest: &Manifest, name: &str) -> Result<Obj, String> {
    let spec = manifest
        .objects
        .get(name)
        .ok_or_else(|| format!("unknown object `{name}`"))?;
    match spec {
        ObjectSpec::Cover { .. } => Ok(Obj::Cover),
        ObjectSpec::Gerbe { cover, g, a, b } => make_gerbe(
            cover.clone(),
            g.iter().cloned().collect(),
            a.iter().cloned().collect(),
            b.iter().cloned().collect(),
        )
        .map(Obj::Gerbe)
        .map_err(|e| format!("object `{name}`: {e}")),
        ObjectSpec::Form { value } => Ok(Obj::Form(value.clone())),
        ObjectSpec::Matform { value } => Ok(Obj::Mat(value.clone())),
        ObjectSpec::Plectic { omega } => make_plectic(omega.clone())
            .map(Obj::Plectic)
            .map_err(|e| format!("object `{name}`: {e}")),
        ObjectSpec::Loop { shape } => match shape {
            LoopShape::Circle { samples } => Ok(Obj::Loop(SampledLoop::circle(*samples))),
            LoopShape::Explicit { samples } => SampledLoop::new(samples.clone())
                .map(Obj::Loop)
                .map_err(|e| format!("object `{name}`: {e}")),
        },
        ObjectSpec::Surface { shape } => Ok(Obj::Surface(match shape {
            SurfaceShape::Icosphere { subdivisions } => icosphere(*subdivisions),
            SurfaceShape::Explicit {
                vertices,
                triangles,
                face_patch,
            } => TriangulatedSurface {
                vertices: vertices.clone(),
                triangles: triangles.clone(),
                face_patch: face_patch.clone(),
            },
        })),
        ObjectSpec::Functional { value } => Ok(Obj::Functional(value.clone())),
    }
}

fn want(objects: &[Obj], k: usize, what: &str) -> Result<(), String> {
    if objects.len() == k {
        Ok(())
    } else {
        Err(format!("expected objects [{what}], got {}", objects.len()))
    }
}

fn run_task(manifest: &Manifest, task: &TaskSpec, opts: &RunOptions) -> Result<Outcome, String> {
    let p = &task.params;
    let tol = p.tol.or(opts.tol);
    let eps = p.eps.or(opts.eps).unwrap_or(1e-3);
    let degree = p.degree.or(opts.degree).unwrap_or(3);

    if task.command == Command::Validate {
        // validation failures are task failures, not run errors
        let mut detail = Vec::new();
        for name in &task.objects {
            if let Err(e) = resolve(manifest, name) {
                detail.push(e);
            }
        }
        return Ok(if detail.is_empty() {
            let mut o = Outcome::pass();
            o.detail = format!("{} object(s) valid", task.objects.len());
            o
        } else {
            Outcome::fail(detail.join("; "))
        });
    }
    if task.command == Command::Suite {
        let outcomes = suite::run_all();
        let mut o = Outcome::pass();
        for c in &outcomes {
            o.values
                .insert(c.name.clone(), if c.passed { "pass" } else { "fail" }.into());
        }
        o.passed = outcomes.iter().all(|c| c.passed);
        o.detail = suite::render_report(&outcomes).trim_end().to_string();
        return Ok(o);
    }

    let objects: Vec<Obj> = task
        .objects
        .iter()
        .map(|n| resolve(manifest, n))
        .collect::<Result<_, _>>()?;

    match task.command {
        Command::Curvature => {
            want(&objects, 1, "gerbe")?;
            let Obj::Gerbe(g) = &objects[0] else {
                return Err("curvature expects a gerbe object".into());
            };
            let mut o = Outcome::pass();
            o.values.insert(
                "curvature".into(),
                serde_json::to_string(g.curvature_3form()).expect("forms serialize"),
            );
            Ok(o)
        }
        Command::Dd => {
            want(&objects, 1, "gerbe")?;
            let Obj::Gerbe(g) = &objects[0] else {
                return Err("dd expects a gerbe object".into());
            };
            let mut o = Outcome::pass();
            o.values.insert(
                "class".into(),
                serde_json::to_string(&g.dd_cocycle()).expect("cochains serialize"),
            );
            Ok(o)
        }
        Command::HolLine => {
            want(&objects, 2, "form, loop")?;
            let (Obj::Form(a), Obj::Loop(gamma)) = (&objects[0], &objects[1]) else {
                return Err("hol-line expects [form, loop]".into());
            };
            let hol = line_holonomy(a, gamma).map_err(|e| e.to_string())?;
            let mut o = Outcome::pass();
            o.values.insert("holonomy".into(), fmt_complex(hol));
            Ok(o)
        }
        Command::HolSurface => {
            let hol = match objects.as_slice() {
                [Obj::Form(rho), Obj::Surface(sigma)] => {
                    surface_holonomy_trivialized(rho, sigma).map_err(|e| e.to_string())?
                }
                [Obj::Form(rho), Obj::Surface(coarse), Obj::Surface(fine)] => {
                    surface_holonomy_extrapolated(rho, coarse, fine).map_err(|e| e.to_string())?
                }
                _ => return Err("hol-surface expects [form, surface] or [form, coarse, fine]".into()),
            };
            let mut o = Outcome::pass();
            o.values.insert("holonomy".into(), fmt_complex(hol));
            Ok(o)
        }
        Command::HolBrane => {
            want(&objects, 3, "form, matform, surface")?;
            let (Obj::Form(rho), Obj::Mat(a), Obj::Surface(disc)) =
                (&objects[0], &objects[1], &objects[2])
            else {
                return Err("hol-brane expects [form, matform, surface]".into());
            };
            let hol = dbrane_holonomy(rho, a, disc).map_err(|e| e.to_string())?;
            let mut o = Outcome::pass();
            o.values.insert("holonomy".into(), fmt_complex(hol));
            Ok(o)
        }
        Command::Transgress => {
            want(&objects, 2, "form or functional, loop")?;
            let Obj::Loop(gamma) = &objects[1] else {
                return Err("transgress expects a loop as second object".into());
            };
            let value = match &objects[0] {
                Obj::Form(omega) => transgress_form(omega, gamma, &[]).map_err(|e| e.to_string())?,
                Obj::Functional(f) => f.evaluate(gamma).map_err(|e| e.to_string())?,
                _ => return Err("transgress expects a 1-form or a functional".into()),
            };
            let mut o = Outcome::pass();
            o.values.insert("value".into(), fmt_complex(value));
            Ok(o)
        }
        Command::Homspace => {
            want(&objects, 2, "matform, matform")?;
            let (Obj::Mat(w), Obj::Mat(e)) = (&objects[0], &objects[1]) else {
                return Err("homspace expects [matform, matform]".into());
            };
            let w = ModelSection::new(w.clone()).map_err(|e| e.to_string())?;
            let e = ModelSection::new(e.clone()).map_err(|e| e.to_string())?;
            let dim = hom_space(&w, &e, degree).len();
            let mut o = Outcome::pass();
            o.values.insert("dimension".into(), dim.to_string());
            Ok(o)
        }
        Command::KsCheck => {
            want(&objects, 5, "plectic, form, form, form, loop")?;
            let (
                Obj::Plectic(space),
                Obj::Form(rho),
                Obj::Form(alpha),
                Obj::Form(beta),
                Obj::Loop(gamma),
            ) = (&objects[0], &objects[1], &objects[2], &objects[3], &objects[4])
            else {
                return Err("ks-check expects [plectic, curving, 1-form, 1-form, loop]".into());
            };
            let psi = |_: &SampledLoop| Complex64::new(1.0, 0.0);
            let bracket = space.bracket_forms(alpha, beta).map_err(|e| e.to_string())?;
            let qb = |g: &SampledLoop| ks_apply(space, rho, beta, &psi, g, eps).expect("inner Q");
            let qa = |g: &SampledLoop| ks_apply(space, rho, alpha, &psi, g, eps).expect("inner Q");
            let ab = ks_apply(space, rho, alpha, &qb, gamma, eps).map_err(|e| e.to_string())?;
            let ba = ks_apply(space, rho, beta, &qa, gamma, eps).map_err(|e| e.to_string())?;
            let expected = ks_apply(space, rho, &bracket, &psi, gamma, eps).map_err(|e| e.to_string())?;
            let residual = ((ab - ba) - expected).norm();
            let bound = tol.unwrap_or(1e-3);
            let mut o = Outcome::pass();
            o.residuals.insert("commutator".into(), residual);
            o.passed = residual <= bound;
            if !o.passed {
                o.detail = format!("commutator residual exceeds tolerance {bound:e}");
            }
            Ok(o)
        }
        Command::Validate | Command::Suite => unreachable!("handled above"),
    }
}
