use std::fmt;
use std::sync::Arc;

use crate::expr::Expr;
use crate::jet::MultiIndex;

/// How a jet family prints its coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameStyle {
    /// `u0`, `u1`, `q3`: family name followed by the order (one direction).
    Numbered,
    /// `v`, `vx`, `vxy`: one letter per direction (x, y, z).
    Letters,
    /// `w[1][12]`: family `w1`, multi-index digits in the second bracket.
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoord {
    pub family: Arc<str>,
    pub index: MultiIndex,
    pub style: NameStyle,
}

/// A formal function of coordinate atoms together with the multiset of
/// argument positions it has been differentiated by.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FnSymbol {
    pub name: Arc<str>,
    pub args: Vec<Atom>,
    pub derivs: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElemKind {
    Ln,
}

impl ElemKind {
    pub fn name(self) -> &'static str {
        match self {
            ElemKind::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ln" => Some(ElemKind::Ln),
            _ => None,
        }
    }

    /// The registered derivative rule `f'(a)`.
    pub fn derivative(self, arg: &Atom) -> Expr {
        match self {
            ElemKind::Ln => Expr::atom(arg.clone())
                .inv()
                .expect("an atom never normalizes to zero"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemFn {
    pub kind: ElemKind,
    pub arg: Atom,
}

/// Indeterminate of the polynomial kernel. The derived order is the canonical
/// atom order: kind rank first, then family, multi-index, derivative record.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Indep(Arc<str>),
    Jet(JetCoord),
    Param(Arc<str>),
    Fn(Arc<FnSymbol>),
    Elem(Arc<ElemFn>),
}

impl Atom {
    pub fn indep(name: &str) -> Atom {
        Atom::Indep(Arc::from(name))
    }

    pub fn param(name: &str) -> Atom {
        Atom::Param(Arc::from(name))
    }

    pub fn jet(family: &str, index: MultiIndex, style: NameStyle) -> Atom {
        Atom::Jet(JetCoord {
            family: Arc::from(family),
            index,
            style,
        })
    }

    /// Formal function `name(args)` with no derivatives taken.
    pub fn func(name: &str, args: Vec<Atom>) -> Atom {
        Atom::Fn(Arc::new(FnSymbol {
            name: Arc::from(name),
            args,
            derivs: Vec::new(),
        }))
    }

    pub fn ln(arg: Atom) -> Atom {
        Atom::Elem(Arc::new(ElemFn {
            kind: ElemKind::Ln,
            arg,
        }))
    }

    pub fn as_jet(&self) -> Option<&JetCoord> {
        match self {
            Atom::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn is_indep(&self) -> bool {
        matches!(self, Atom::Indep(_))
    }

    /// Coordinates carry their own differential; compound atoms do not.
    pub fn is_coordinate(&self) -> bool {
        matches!(self, Atom::Indep(_) | Atom::Jet(_) | Atom::Param(_))
    }

    /// Atom-level partial derivative `∂self/∂by`, `None` when it vanishes.
    pub fn partial_by(&self, by: &Atom) -> Option<Expr> {
        if self == by {
            return Some(Expr::one());
        }
        match self {
            Atom::Fn(f) => {
                let pos = f.args.iter().position(|a| a == by)?;
                let mut derivs = f.derivs.clone();
                derivs.push(pos as u8);
                derivs.sort_unstable();
                Some(Expr::atom(Atom::Fn(Arc::new(FnSymbol {
                    name: f.name.clone(),
                    args: f.args.clone(),
                    derivs,
                }))))
            }
            Atom::Elem(e) if &e.arg == by => Some(e.kind.derivative(&e.arg)),
            _ => None,
        }
    }

    /// Atoms this atom depends on through the chain rule.
    pub fn arguments(&self) -> Vec<Atom> {
        match self {
            Atom::Fn(f) => f.args.clone(),
            Atom::Elem(e) => vec![e.arg.clone()],
            _ => Vec::new(),
        }
    }

    fn is_ident_like(s: &str) -> bool {
        let mut chars = s.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric())
    }

    /// Plain-text name, parseable by the model grammar.
    pub fn text(&self) -> String {
        match self {
            Atom::Indep(n) | Atom::Param(n) => n.to_string(),
            Atom::Jet(j) => jet_text(j),
            Atom::Fn(f) => {
                let mut s = f.name.to_string();
                for &d in &f.derivs {
                    let arg = &f.args[d as usize];
                    let t = arg.text();
                    s.push('_');
                    if Atom::is_ident_like(&t) {
                        s.push_str(&t);
                    } else {
                        s.push_str(&(d as usize + 1).to_string());
                    }
                }
                let args: Vec<String> = f.args.iter().map(Atom::text).collect();
                format!("{}({})", s, args.join(","))
            }
            Atom::Elem(e) => format!("{}({})", e.kind.name(), e.arg.text()),
        }
    }

    pub fn latex(&self) -> String {
        match self {
            Atom::Indep(n) => greek(n),
            Atom::Param(n) => greek(n),
            Atom::Jet(j) => jet_latex(j),
            Atom::Fn(f) => {
                if f.derivs.is_empty() {
                    f.name.to_string()
                } else {
                    let subs: Vec<String> =
                        f.derivs.iter().map(|&d| f.args[d as usize].latex()).collect();
                    format!("{}_{{{}}}", f.name, subs.join(""))
                }
            }
            Atom::Elem(e) => format!("\\{}({})", e.kind.name(), e.arg.latex()),
        }
    }
}

fn greek(n: &str) -> String {
    match n {
        "lambda" | "mu" | "alpha" | "beta" | "gamma" | "pi" | "omega" | "sigma" => {
            format!("\\{n}")
        }
        _ => n.to_string(),
    }
}

const LETTERS: [char; 3] = ['x', 'y', 'z'];

fn jet_text(j: &JetCoord) -> String {
    match j.style {
        NameStyle::Numbered if j.index.iter().all(|&i| i == 1) => {
            format!("{}{}", j.family, j.index.order())
        }
        NameStyle::Letters if j.index.iter().all(|&i| (1..=3).contains(&i)) => {
            let mut s = j.family.to_string();
            s.extend(j.index.iter().map(|&i| LETTERS[i as usize - 1]));
            s
        }
        NameStyle::Bracket => {
            let num = j.family.trim_start_matches(|c: char| c.is_ascii_alphabetic());
            let stem = &j.family[..j.family.len() - num.len()];
            if j.index.order() == 0 {
                format!("{stem}[{num}]")
            } else {
                format!("{stem}[{num}][{}]", j.index)
            }
        }
        _ => format!("{}[{}]", j.family, j.index),
    }
}

fn jet_latex(j: &JetCoord) -> String {
    match j.style {
        NameStyle::Numbered if j.index.iter().all(|&i| i == 1) => {
            let o = j.index.order();
            if o < 10 {
                format!("{}_{}", j.family, o)
            } else {
                format!("{}_{{{}}}", j.family, o)
            }
        }
        NameStyle::Letters if j.index.iter().all(|&i| (1..=3).contains(&i)) => {
            if j.index.order() == 0 {
                j.family.to_string()
            } else {
                let s: String = j.index.iter().map(|&i| LETTERS[i as usize - 1]).collect();
                format!("{}_{{{}}}", j.family, s)
            }
        }
        NameStyle::Bracket => {
            let num = j.family.trim_start_matches(|c: char| c.is_ascii_alphabetic());
            let stem = &j.family[..j.family.len() - num.len()];
            if j.index.order() == 0 {
                format!("{stem}^{{{num}}}")
            } else {
                format!("{stem}^{{{num}}}_{{{}}}", j.index)
            }
        }
        _ => format!("{}_{{{}}}", j.family, j.index),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}
