use std::fmt;

use crate::error::Result;
use crate::expr::{Atom, Expr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    /// Which basis-form coefficient (or relation) produced the equation.
    pub label: String,
    pub expr: Expr,
}

/// Equations (each required to vanish) on formal unknown functions, together
/// with quantities solved in terms of those unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeterminingSystem {
    pub unknowns: Vec<(String, Vec<Atom>)>,
    pub equations: Vec<Equation>,
    pub solved: Vec<(String, Expr)>,
}

impl DeterminingSystem {
    pub fn push(&mut self, label: impl Into<String>, expr: Expr) {
        self.equations.push(Equation {
            label: label.into(),
            expr,
        });
    }

    pub fn equation(&self, label: &str) -> Option<&Expr> {
        self.equations.iter().find(|e| e.label == label).map(|e| &e.expr)
    }

    pub fn solved(&self, name: &str) -> Option<&Expr> {
        self.solved.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Replace the formal unknown `name` by a concrete expression in its
    /// argument atoms.
    pub fn instantiate(&self, name: &str, concrete: &Expr) -> Result<DeterminingSystem> {
        let mut out = DeterminingSystem {
            unknowns: self.unknowns.iter().filter(|(n, _)| n != name).cloned().collect(),
            ..Default::default()
        };
        for e in &self.equations {
            out.push(e.label.clone(), e.expr.instantiate_fn(name, concrete)?);
        }
        for (n, e) in &self.solved {
            out.solved.push((n.clone(), e.instantiate_fn(name, concrete)?));
        }
        Ok(out)
    }

    /// Labels of equations that do not vanish.
    pub fn failures(&self) -> Vec<&Equation> {
        self.equations.iter().filter(|e| !e.expr.is_zero()).collect()
    }

    pub fn is_satisfied(&self) -> bool {
        self.equations.iter().all(|e| e.expr.is_zero())
    }

    /// Equations with nonzero content only, numerators only, sorted by label.
    pub fn nontrivial(&self) -> Vec<Equation> {
        let mut v: Vec<Equation> = self
            .equations
            .iter()
            .filter(|e| !e.expr.is_zero())
            .map(|e| Equation {
                label: e.label.clone(),
                expr: Expr::poly(e.expr.numer().clone()),
            })
            .collect();
        v.sort_by(|a, b| a.label.cmp(&b.label));
        v
    }
}

impl fmt::Display for DeterminingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            writeln!(f, "{}: {} = 0", e.label, e.expr)?;
        }
        for (n, e) in &self.solved {
            writeln!(f, "{n} = {e}")?;
        }
        Ok(())
    }
}
