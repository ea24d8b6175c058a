use std::fmt;

use serde_json::{json, Value};

use crate::geometry::{Components, Multivector, SymCovariant};
use crate::ring::RatFunc;

/// One nonzero component that refutes a condition.
#[derive(Clone, PartialEq, Debug)]
pub struct Witness {
    /// Zero-based index tuple.
    pub indices: Vec<usize>,
    pub value: RatFunc,
}

impl Witness {
    fn index_text(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        format!("[{}]", idx.join(","))
    }
}

/// A named yes/no condition with an optional refuting witness.
#[derive(Clone, PartialEq, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, witness: Option<Witness>) -> Self {
        Check {
            name: name.into(),
            passed,
            witness,
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Self::new(name, true, None)
    }

    /// Passes iff every candidate is zero; the first nonzero one is the witness.
    pub fn vanishing(
        name: impl Into<String>,
        candidates: impl IntoIterator<Item = (Vec<usize>, RatFunc)>,
    ) -> Self {
        let witness = candidates
            .into_iter()
            .find(|(_, f)| !f.is_zero())
            .map(|(indices, value)| Witness { indices, value });
        Self::new(name, witness.is_none(), witness)
    }

    pub fn zero_multivector(name: impl Into<String>, m: &Multivector) -> Self {
        Self::vanishing(name, m.components().map(|(k, f)| (k.clone(), f.clone())))
    }

    pub fn zero_components(name: impl Into<String>, c: &Components) -> Self {
        Self::vanishing(name, c.nonzero())
    }

    /// Zero test on a family of symmetric tensors; the witness index is the
    /// family label followed by the component tuple.
    pub fn zero_symmetric<'a>(
        name: impl Into<String>,
        family: impl IntoIterator<Item = (Vec<usize>, &'a SymCovariant)>,
    ) -> Self {
        Self::vanishing(
            name,
            family.into_iter().flat_map(|(label, g)| {
                g.components()
                    .map(|(k, f)| {
                        let mut idx = label.clone();
                        idx.extend(k);
                        (idx, f.clone())
                    })
                    .collect::<Vec<_>>()
            }),
        )
    }

    pub fn to_json(&self) -> Value {
        match &self.witness {
            Some(w) => json!({
                "name": self.name,
                "passed": self.passed,
                "witness": {
                    "indices": w.indices.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "value": w.value.to_string(),
                },
            }),
            None => json!({ "name": self.name, "passed": self.passed }),
        }
    }
}

impl fmt::Display for Check {
    /// `name: PASS` or `name: FAIL [witness: [i,j,k] = expr]`, indices 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        if let Some(w) = &self.witness {
            write!(f, " [witness: {} = {}]", w.index_text(), w.value)?;
        }
        Ok(())
    }
}

/// A sequence of checks and the overall verdict derived from them.
#[derive(Clone, PartialEq, Debug)]
pub struct Report {
    pub checks: Vec<Check>,
    pub verdict: bool,
}

impl Report {
    /// Verdict is the conjunction of all checks.
    pub fn all(checks: Vec<Check>) -> Self {
        let verdict = checks.iter().all(|c| c.passed);
        Report { checks, verdict }
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "verdict": self.verdict,
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(f, "verdict: {}", if self.verdict { "PASS" } else { "FAIL" })
    }
}
