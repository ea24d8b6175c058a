use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::model::{block_text, entries_json, object_text, Model, Object};
use super::scenario::scenario;
use crate::brackets::{
    cotangent_algebroid, koszul_bracket, schouten_bracket, sym_bracket, tangent_algebroid,
    AlgebroidSymTensor,
};
use crate::error::{Error, Result};
use crate::geometry::{linear_curvature, Components, VolumeForm};
use crate::lifts::{
    complete_lift, graded_nabla_lift, horizontal_lift_bivector, nonlinear_curvature,
};
use crate::poisson::{
    check_graded_poisson, compatibility_check, is_poisson, is_transversal_poisson, modular_field,
    riemannian_volume, sasaki_volume, shape_analysis, vertical_foliation, Check, Report, Shape,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, PartialEq, Eq, Debug, Subcommand)]
pub enum Command {
    /// Test the Jacobi identity `[P, P] = 0` of a bivector.
    CheckPoisson { target: Option<String> },
    /// Test for a transversal Poisson structure of the vertical foliation of TM.
    CheckSemiPoisson { target: Option<String> },
    /// Decompose a graded bivector on TM and test the graded Poisson criterion.
    CheckGraded { target: Option<String> },
    /// Lift a bivector to the tangent bundle.
    #[command(subcommand)]
    Lift(LiftKind),
    /// Brackets of two objects.
    #[command(subcommand)]
    Bracket(BracketKind),
    /// Modular vector field of a bivector relative to a volume form
    /// (`NAME`, `standard`, `sasaki:METRIC` or `riemannian:METRIC`).
    Modular {
        target: Option<String>,
        #[arg(long)]
        volume: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Curvature of a linear or nonlinear connection.
    Curvature {
        #[arg(long)]
        conn: Option<String>,
    },
    /// Test `[A, B] = 0`.
    Compat { a: String, b: String },
    /// Report the graded shape of a bivector on TM and its parts.
    Analyze { target: Option<String> },
    /// Print a built-in model.
    Scenario { name: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Subcommand)]
pub enum LiftKind {
    /// Complete lift `w^C`.
    Complete {
        target: Option<String>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Horizontal lift `w^H` with respect to a nonlinear or linear connection.
    Horizontal {
        target: Option<String>,
        #[arg(long)]
        conn: Option<String>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Graded lift `-1/2 L_S w^C` through the geodesic spray of a linear connection.
    GradedNabla {
        target: Option<String>,
        #[arg(long)]
        conn: Option<String>,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Subcommand)]
pub enum BracketKind {
    /// Schouten–Nijenhuis bracket of two multivectors.
    Schouten {
        a: String,
        b: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Symmetric Schouten bracket over `tangent` or `cotangent:W`.
    Symmetric {
        a: String,
        b: String,
        #[arg(long)]
        algebroid: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Koszul bracket of two one-forms relative to a bivector.
    Koszul {
        w: String,
        a: String,
        b: String,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Parser, Debug)]
#[command(name = "tlift", no_binary_name = true, disable_help_subcommand = true)]
struct CommandLine {
    #[command(subcommand)]
    command: Command,
}

impl Command {
    /// Parses a command line such as `lift complete w`.
    pub fn parse(line: &str) -> Result<Command> {
        CommandLine::try_parse_from(line.split_whitespace())
            .map(|c| c.command)
            .map_err(|e| Error::Usage(e.to_string().trim_end().to_string()))
    }

    /// Whether the command ignores the input model.
    pub fn is_standalone(&self) -> bool {
        matches!(self, Command::Scenario { .. })
    }
}

/// What a command produced.
#[derive(Clone, PartialEq, Debug)]
pub enum Output {
    /// An extended model; the name is the newly added object.
    Model(Model, Option<String>),
    Check(Check),
    Report(Report),
    /// Shape information and component listings.
    Listing {
        lines: Vec<String>,
        blocks: Vec<(String, Components)>,
        passed: bool,
    },
}

impl Output {
    /// Whether every check passed (always true for constructions).
    pub fn passed(&self) -> bool {
        match self {
            Output::Model(..) => true,
            Output::Check(c) => c.passed,
            Output::Report(r) => r.verdict,
            Output::Listing { passed, .. } => *passed,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("serializable"),
        }
    }

    fn to_text(&self) -> String {
        match self {
            Output::Model(m, _) => m.to_string().trim_end().to_string(),
            Output::Check(c) => c.to_string(),
            Output::Report(r) => r.to_string(),
            Output::Listing { lines, blocks, .. } => {
                let mut parts = lines.clone();
                for (name, c) in blocks {
                    parts.push(block_text(
                        &format!("components {name} on {}", c.chart().name()),
                        &c.nonzero(),
                    ));
                }
                parts.join("\n")
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Output::Model(m, added) => {
                let mut v = m.to_json();
                v["added"] = json!(added);
                v
            }
            Output::Check(c) => json!({ "checks": [c.to_json()], "verdict": c.passed }),
            Output::Report(r) => r.to_json(),
            Output::Listing {
                lines,
                blocks,
                passed,
            } => json!({
                "lines": lines,
                "components": blocks.iter().map(|(n, c)| json!({
                    "name": n,
                    "chart": c.chart().name(),
                    "entries": entries_json(&c.nonzero()),
                })).collect::<Vec<_>>(),
                "verdict": passed,
            }),
        }
    }
}

fn lookup<'a>(model: &'a Model, name: &str) -> Result<&'a Object> {
    model
        .get(name)
        .ok_or_else(|| Error::Usage(format!("no object named `{name}` in the model")))
}

/// The named object, or the last one accepted by `pick` when no name is given.
fn select<'a, T>(
    model: &'a Model,
    name: Option<&str>,
    what: &str,
    pick: impl Fn(&'a Object) -> Option<T>,
) -> Result<(String, T)> {
    match name {
        Some(n) => pick(lookup(model, n)?)
            .map(|t| (n.to_string(), t))
            .ok_or_else(|| Error::Usage(format!("`{n}` is not a {what}"))),
        None => model
            .objects()
            .filter_map(|(n, o)| pick(o).map(|t| (n.to_string(), t)))
            .last()
            .ok_or_else(|| Error::Usage(format!("the model has no {what}"))),
    }
}

fn bivector(o: &Object) -> Option<&crate::geometry::Multivector> {
    match o {
        Object::Multivector(m) if m.degree() == 2 => Some(m),
        _ => None,
    }
}

fn multivector(o: &Object) -> Option<&crate::geometry::Multivector> {
    match o {
        Object::Multivector(m) => Some(m),
        _ => None,
    }
}

fn extended(model: &Model, name: String, object: Object) -> Result<Output> {
    let mut m = model.clone();
    m.insert(&name, object).map_err(|_| {
        Error::Usage(format!(
            "an object named `{name}` already exists; choose one with --name"
        ))
    })?;
    Ok(Output::Model(m, Some(name)))
}

fn volume(model: &Model, source: &str) -> Result<VolumeForm> {
    let metric = |n: &str| match lookup(model, n)? {
        Object::Metric(g) => Ok(g.clone()),
        _ => Err(Error::Usage(format!("`{n}` is not a metric"))),
    };
    if let Some(g) = source.strip_prefix("sasaki:") {
        return sasaki_volume(&metric(g)?);
    }
    if let Some(g) = source.strip_prefix("riemannian:") {
        return riemannian_volume(&metric(g)?);
    }
    match model.get(source) {
        Some(Object::Volume(v)) => Ok(v.clone()),
        Some(_) => Err(Error::Usage(format!("`{source}` is not a volume"))),
        None => Err(Error::Usage(format!(
            "unknown volume `{source}` (use NAME, standard, sasaki:METRIC or riemannian:METRIC)"
        ))),
    }
}

fn shape_lines(shape: &Shape) -> (Vec<String>, Vec<(String, Components)>) {
    match shape {
        Shape::NotGraded { reason } => (vec![format!("shape: not graded ({reason})")], Vec::new()),
        Shape::Graded(g) => (
            vec![
                "shape: graded".into(),
                object_text("w", &Object::Multivector(g.w().clone())),
            ],
            vec![
                ("A".into(), g.mixed().clone()),
                ("B".into(), g.fiber().clone()),
            ],
        ),
        Shape::PolyGraded(p) => (
            vec![
                "shape: polynomially graded".into(),
                object_text("w", &Object::Multivector(p.graded.w().clone())),
            ],
            vec![
                ("phi".into(), p.phi.clone()),
                ("A".into(), p.graded.mixed().clone()),
                ("eta".into(), p.eta.clone()),
                ("chi".into(), p.chi.clone()),
                ("B".into(), p.graded.fiber().clone()),
            ],
        ),
    }
}

/// Executes one command against a model.
pub fn execute(model: &Model, command: &Command) -> Result<Output> {
    match command {
        Command::Scenario { name } => Ok(Output::Model(scenario(name)?, None)),
        Command::CheckPoisson { target } => {
            let (_, w) = select(model, target.as_deref(), "bivector", bivector)?;
            Ok(Output::Check(is_poisson(w)?))
        }
        Command::CheckSemiPoisson { target } => {
            let (_, w) = select(model, target.as_deref(), "bivector", bivector)?;
            let leaves = vertical_foliation(w.chart()).map_err(|_| {
                Error::Usage("semi-Poisson checks need a bivector on a tangent chart".into())
            })?;
            Ok(Output::Report(is_transversal_poisson(w, &leaves)?))
        }
        Command::CheckGraded { target } => {
            let (_, w) = select(model, target.as_deref(), "bivector", bivector)?;
            if !w.chart().is_tangent() {
                return Err(Error::Usage(
                    "graded checks need a bivector on a tangent chart".into(),
                ));
            }
            match shape_analysis(w)? {
                Shape::Graded(parts) => Ok(Output::Report(check_graded_poisson(&parts)?)),
                other => {
                    let (lines, _) = shape_lines(&other);
                    Ok(Output::Listing {
                        lines,
                        blocks: Vec::new(),
                        passed: false,
                    })
                }
            }
        }
        Command::Analyze { target } => {
            let (_, w) = select(model, target.as_deref(), "bivector", bivector)?;
            if !w.chart().is_tangent() {
                return Err(Error::Usage(
                    "shape analysis needs a bivector on a tangent chart".into(),
                ));
            }
            let (lines, blocks) = shape_lines(&shape_analysis(w)?);
            Ok(Output::Listing {
                lines,
                blocks,
                passed: true,
            })
        }
        Command::Lift(kind) => lift(model, kind),
        Command::Bracket(kind) => bracket(model, kind),
        Command::Modular {
            target,
            volume: v,
            name,
        } => {
            let (tn, w) = select(model, target.as_deref(), "bivector", bivector)?;
            let mu = if v == "standard" {
                VolumeForm::standard(w.chart())
            } else {
                volume(model, v)?
            };
            let field = modular_field(w, &mu)?;
            extended(
                model,
                name.clone().unwrap_or(format!("modular_{tn}")),
                Object::Multivector(field),
            )
        }
        Command::Curvature { conn } => {
            let (cn, obj) = select(model, conn.as_deref(), "connection", |o| match o {
                Object::LinearConnection(_) | Object::NonlinearConnection(_) => Some(o),
                _ => None,
            })?;
            let r = match obj {
                Object::LinearConnection(c) => linear_curvature(c)?,
                Object::NonlinearConnection(c) => nonlinear_curvature(c)?,
                _ => unreachable!("selected a connection"),
            };
            let flat = r.is_zero();
            Ok(Output::Listing {
                lines: vec![format!("flat: {}", if flat { "PASS" } else { "FAIL" })],
                blocks: vec![(format!("R_{cn}"), r)],
                passed: true,
            })
        }
        Command::Compat { a, b } => {
            let (_, p) = select(model, Some(a), "bivector", bivector)?;
            let (_, q) = select(model, Some(b), "bivector", bivector)?;
            Ok(Output::Check(compatibility_check(p, q)?))
        }
    }
}

fn lift(model: &Model, kind: &LiftKind) -> Result<Output> {
    match kind {
        LiftKind::Complete { target, name } => {
            let (tn, w) = select(model, target.as_deref(), "bivector", bivector)?;
            let lifted = complete_lift(w)?;
            extended(
                model,
                name.clone().unwrap_or(format!("{tn}C")),
                Object::Multivector(lifted),
            )
        }
        LiftKind::Horizontal { target, conn, name } => {
            let (tn, w) = select(model, target.as_deref(), "bivector", bivector)?;
            let (_, nl) = select(model, conn.as_deref(), "connection", |o| match o {
                Object::NonlinearConnection(c) => Some(Ok(c.clone())),
                Object::LinearConnection(c) => {
                    Some(crate::geometry::NonlinearConnection::from_linear(c))
                }
                _ => None,
            })?;
            let lifted = horizontal_lift_bivector(w, &nl?)?;
            extended(
                model,
                name.clone().unwrap_or(format!("{tn}H")),
                Object::Multivector(lifted),
            )
        }
        LiftKind::GradedNabla { target, conn, name } => {
            let (tn, w) = select(model, target.as_deref(), "bivector", bivector)?;
            let (_, c) = select(model, conn.as_deref(), "linear connection", |o| match o {
                Object::LinearConnection(c) => Some(c),
                _ => None,
            })?;
            let lifted = graded_nabla_lift(w, c)?;
            extended(
                model,
                name.clone().unwrap_or(format!("{tn}G")),
                Object::Multivector(lifted),
            )
        }
    }
}

fn bracket(model: &Model, kind: &BracketKind) -> Result<Output> {
    match kind {
        BracketKind::Schouten { a, b, name } => {
            let (_, p) = select(model, Some(a), "multivector", multivector)?;
            let (_, q) = select(model, Some(b), "multivector", multivector)?;
            let r = schouten_bracket(p, q)?;
            extended(
                model,
                name.clone().unwrap_or(format!("schouten_{a}_{b}")),
                Object::Multivector(r),
            )
        }
        BracketKind::Symmetric {
            a,
            b,
            algebroid,
            name,
        } => {
            let sym = |n: &str| match lookup(model, n)? {
                Object::SymTensor(g) => Ok(g.clone()),
                _ => Err(Error::Usage(format!("`{n}` is not a symmetric tensor"))),
            };
            let (g, h) = (sym(a)?, sym(b)?);
            let alg = if algebroid == "tangent" {
                tangent_algebroid(g.chart())?
            } else if let Some(wn) = algebroid.strip_prefix("cotangent:") {
                let (_, w) = select(model, Some(wn), "bivector", bivector)?;
                cotangent_algebroid(w)?
            } else {
                return Err(Error::Usage(format!(
                    "unknown algebroid `{algebroid}` (use tangent or cotangent:W)"
                )));
            };
            let r = sym_bracket(
                &alg,
                &AlgebroidSymTensor::from_sym_covariant(&alg, &g)?,
                &AlgebroidSymTensor::from_sym_covariant(&alg, &h)?,
            )?;
            extended(
                model,
                name.clone().unwrap_or(format!("sym_{a}_{b}")),
                Object::SymTensor(r.to_sym_covariant()?),
            )
        }
        BracketKind::Koszul { w, a, b, name } => {
            let (_, wv) = select(model, Some(w), "bivector", bivector)?;
            let form = |n: &str| match lookup(model, n)? {
                Object::OneForm(f) => Ok(f.clone()),
                _ => Err(Error::Usage(format!("`{n}` is not a one-form"))),
            };
            let r = koszul_bracket(wv, &form(a)?, &form(b)?)?;
            extended(
                model,
                name.clone().unwrap_or(format!("koszul_{a}_{b}")),
                Object::OneForm(r),
            )
        }
    }
}

/// Parses and executes a command line against a model.
pub fn run_command(model: &Model, line: &str) -> Result<Output> {
    execute(model, &Command::parse(line)?)
}
