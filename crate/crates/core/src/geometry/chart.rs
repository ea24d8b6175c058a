use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{RatFunc, Vars};

/// A coordinate chart on M, or the induced chart (x, y) on TM.
///
/// Tangent charts order their slots as `x1..xn, y1..yn`, so a function on the
/// base chart embeds into the tangent chart by padding exponents with zeros.
#[derive(Clone)]
pub struct Chart(Arc<ChartInner>);

struct ChartInner {
    name: String,
    dim: usize,
    vars: Vars,
    base: Option<Chart>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(name: &str, coords: &[S]) -> Result<Chart> {
        let names: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Structural(format!(
                    "coordinate `{a}` declared twice"
                )));
            }
        }
        if names.is_empty() {
            return Err(Error::Structural(
                "a chart needs at least one coordinate".into(),
            ));
        }
        Ok(Chart(Arc::new(ChartInner {
            name: name.to_string(),
            dim: names.len(),
            vars: Vars::new(names),
            base: None,
        })))
    }

    /// Standard chart `x1..xn` on R^n.
    pub fn euclidean(name: &str, n: usize) -> Chart {
        let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Chart::new(name, &coords).expect("distinct coordinate names")
    }

    /// The induced chart on the tangent bundle.
    pub fn tangent(&self) -> Result<Chart> {
        if self.is_tangent() {
            return Err(Error::Structural(format!(
                "`{}` is already a tangent chart",
                self.name()
            )));
        }
        let base_names = self.vars().names();
        let mut names: Vec<String> = base_names.to_vec();
        for (i, b) in base_names.iter().enumerate() {
            let candidate = format!("y{}", i + 1);
            let fiber = if base_names.contains(&candidate) {
                format!("d{b}")
            } else {
                candidate
            };
            if names.contains(&fiber) {
                return Err(Error::Structural(format!(
                    "cannot name fiber coordinate for `{b}`"
                )));
            }
            names.push(fiber);
        }
        Ok(Chart(Arc::new(ChartInner {
            name: format!("T {}", self.name()),
            dim: self.dim(),
            vars: Vars::new(names),
            base: Some(self.clone()),
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    /// Base dimension n (also for tangent charts).
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Number of coordinate slots: n on M, 2n on TM.
    pub fn arity(&self) -> usize {
        self.0.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.0.vars
    }

    pub fn is_tangent(&self) -> bool {
        self.0.base.is_some()
    }

    pub fn base(&self) -> Option<&Chart> {
        self.0.base.as_ref()
    }

    pub(crate) fn require_tangent(&self) -> Result<&Chart> {
        self.base()
            .ok_or_else(|| Error::Structural(format!("`{}` is not a tangent chart", self.name())))
    }

    pub(crate) fn require_base(&self) -> Result<()> {
        if self.is_tangent() {
            return Err(Error::Structural(format!(
                "`{}` is a tangent chart; a base chart is required",
                self.name()
            )));
        }
        Ok(())
    }

    /// Slot of the fiber coordinate y^i on a tangent chart.
    pub fn y(&self, i: usize) -> usize {
        self.dim() + i
    }

    pub fn coordinate(&self, slot: usize) -> RatFunc {
        RatFunc::var(self.vars(), slot)
    }

    pub fn zero(&self) -> RatFunc {
        RatFunc::zero(self.vars())
    }

    pub fn one(&self) -> RatFunc {
        RatFunc::one(self.vars())
    }

    pub fn constant(&self, c: i64) -> RatFunc {
        RatFunc::integer(self.vars(), c)
    }

    pub(crate) fn check_same(&self, other: &Chart) -> Result<()> {
        if self != other {
            return Err(Error::ChartMismatch {
                left: self.name().to_string(),
                right: other.name().to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_fn(&self, f: &RatFunc) -> Result<()> {
        if f.vars() != self.vars() {
            return Err(Error::ChartMismatch {
                left: self.name().to_string(),
                right: format!("{:?}", f.vars()),
            });
        }
        Ok(())
    }

    /// Pull a base function back along the projection TM -> M.
    pub fn pullback(&self, f: &RatFunc) -> Result<RatFunc> {
        let base = self.require_tangent()?;
        base.check_fn(f)?;
        f.extend_to(self.vars())
    }

    /// Push a fiber-constant function down to the base chart.
    pub fn pushdown(&self, f: &RatFunc) -> Result<RatFunc> {
        let base = self.require_tangent()?;
        f.restrict_to(base.vars())
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.vars == other.0.vars)
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({} {:?})", self.name(), self.vars())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_chart_pairs_fiber_coordinates() {
        let m = Chart::euclidean("M", 3);
        let tm = m.tangent().unwrap();
        assert_eq!(tm.arity(), 6);
        assert_eq!(tm.vars().name(4), "y2");
        assert_eq!(tm.base(), Some(&m));
        assert!(tm.tangent().is_err());
        assert_eq!(m.tangent().unwrap(), tm);
    }

    #[test]
    fn duplicate_coordinates_rejected() {
        assert!(Chart::new("M", &["a", "a"]).is_err());
    }

    #[test]
    fn fiber_names_avoid_collisions() {
        let m = Chart::new("M", &["y1", "b"]).unwrap();
        let tm = m.tangent().unwrap();
        assert_eq!(tm.vars().names(), &["y1", "b", "dy1", "y2"]);
    }
}
