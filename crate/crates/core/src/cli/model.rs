use std::fmt::{self, Write as _};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{
    Chart, LinearConnection, Metric, Multivector, NonlinearConnection, OneForm, SymCovariant,
    VolumeForm,
};
use crate::ring::RatFunc;

/// A named object of a model.
#[derive(Clone, PartialEq, Debug)]
pub enum Object {
    Multivector(Multivector),
    OneForm(OneForm),
    SymTensor(SymCovariant),
    LinearConnection(LinearConnection),
    NonlinearConnection(NonlinearConnection),
    Metric(Metric),
    Volume(VolumeForm),
}

impl Object {
    pub fn chart(&self) -> &Chart {
        match self {
            Object::Multivector(m) => m.chart(),
            Object::OneForm(a) => a.chart(),
            Object::SymTensor(g) => g.chart(),
            Object::LinearConnection(c) => c.chart(),
            Object::NonlinearConnection(c) => c.chart(),
            Object::Metric(g) => g.chart(),
            Object::Volume(v) => v.chart(),
        }
    }

    /// The declaration keyword, e.g. `bivector` or `symtensor(2)`.
    pub fn kind(&self) -> String {
        match self {
            Object::Multivector(m) => match m.degree() {
                0 => "function".into(),
                1 => "vector".into(),
                2 => "bivector".into(),
                k => format!("multivector({k})"),
            },
            Object::OneForm(_) => "oneform".into(),
            Object::SymTensor(g) => format!("symtensor({})", g.degree()),
            Object::LinearConnection(_) => "linconn".into(),
            Object::NonlinearConnection(_) => "nonlinconn".into(),
            Object::Metric(_) => "metric".into(),
            Object::Volume(_) => "volume".into(),
        }
    }

    /// Independent entries with zero-based indices, in canonical order.
    pub fn entries(&self) -> Vec<(Vec<usize>, RatFunc)> {
        let keep = |idx: Vec<usize>, f: RatFunc| (!f.is_zero()).then_some((idx, f));
        match self {
            Object::Multivector(m) => m
                .components()
                .map(|(k, f)| (k.clone(), f.clone()))
                .collect(),
            Object::OneForm(a) => a
                .components()
                .iter()
                .enumerate()
                .filter_map(|(i, f)| keep(vec![i], f.clone()))
                .collect(),
            Object::SymTensor(g) => g
                .components()
                .map(|(k, f)| (k.clone(), f.clone()))
                .collect(),
            Object::LinearConnection(c) => {
                let n = c.dim();
                let mut out = Vec::new();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            out.extend(keep(vec![k, i, j], c.gamma(k, i, j).clone()));
                        }
                    }
                }
                out
            }
            Object::NonlinearConnection(c) => {
                let n = c.dim();
                let mut out = Vec::new();
                for j in 0..n {
                    for i in 0..n {
                        out.extend(keep(vec![j, i], c.gamma(j, i).clone()));
                    }
                }
                out
            }
            Object::Metric(g) => {
                let n = g.chart().dim();
                let mut out = Vec::new();
                for i in 0..n {
                    for j in i..n {
                        out.extend(keep(vec![i, j], g.component(i, j).clone()));
                    }
                }
                out
            }
            Object::Volume(v) => vec![(Vec::new(), v.density().clone())],
        }
    }
}

/// Writes `[i,j] = expr` entries with one-based indices.
pub(crate) fn entry_text(idx: &[usize], f: &RatFunc) -> String {
    let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}] = {}", idx.join(","), f)
}

pub(crate) fn block_text(header: &str, entries: &[(Vec<usize>, RatFunc)]) -> String {
    if entries.is_empty() {
        return format!("{header} {{ }}");
    }
    let mut s = format!("{header} {{\n");
    for (idx, f) in entries {
        let _ = writeln!(s, "  {};", entry_text(idx, f));
    }
    s.push('}');
    s
}

pub(crate) fn entries_json(entries: &[(Vec<usize>, RatFunc)]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|(idx, f)| {
                json!({
                    "index": idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "value": f.to_string(),
                })
            })
            .collect(),
    )
}

/// Base charts and named objects, in declaration order.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Model {
    charts: Vec<Chart>,
    objects: Vec<(String, Object)>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn objects(&self) -> impl Iterator<Item = (&str, &Object)> {
        self.objects.iter().map(|(n, o)| (n.as_str(), o))
    }

    pub fn chart(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name() == name)
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    fn name_taken(&self, name: &str) -> bool {
        self.chart(name).is_some() || self.get(name).is_some()
    }

    pub fn add_chart(&mut self, chart: Chart) -> Result<()> {
        if self.name_taken(chart.name()) {
            return Err(Error::Duplicate {
                line: 0,
                name: chart.name().into(),
            });
        }
        self.charts.push(chart);
        Ok(())
    }

    /// Adds an object; its base chart must already be declared.
    pub fn insert(&mut self, name: &str, object: Object) -> Result<()> {
        if self.name_taken(name) {
            return Err(Error::Duplicate {
                line: 0,
                name: name.into(),
            });
        }
        let chart = object.chart();
        let base = chart.base().unwrap_or(chart);
        if !self.charts.contains(base) {
            return Err(Error::UnknownIdentifier {
                line: 0,
                name: base.name().into(),
            });
        }
        self.objects.push((name.into(), object));
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "manifolds": self.charts.iter().map(|c| json!({
                "name": c.name(),
                "dim": c.dim(),
                "coords": c.vars().names(),
            })).collect::<Vec<_>>(),
            "objects": self.objects.iter().map(|(n, o)| object_json(n, o)).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn object_json(name: &str, o: &Object) -> Value {
    json!({
        "name": name,
        "kind": o.kind(),
        "chart": o.chart().name(),
        "entries": entries_json(&o.entries()),
    })
}

pub(crate) fn object_text(name: &str, o: &Object) -> String {
    block_text(
        &format!("{} {} on {}", o.kind(), name, o.chart().name()),
        &o.entries(),
    )
}

impl fmt::Display for Model {
    /// Canonical form: parsing it back yields an equal model.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.charts {
            writeln!(
                f,
                "manifold {} dim {} coords {}",
                c.name(),
                c.dim(),
                c.vars().names().join(" ")
            )?;
        }
        for (name, o) in &self.objects {
            writeln!(f, "{}", object_text(name, o))?;
        }
        Ok(())
    }
}
