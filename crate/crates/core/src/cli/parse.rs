//! Model files and expression text.

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{Atom, ElemKind, Expr, NameStyle};
use crate::jet::MultiIndex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Jets { m: usize, n: usize },
    Ode2,
    Pde1,
    Pencil,
    Kdv,
}

impl ModelKind {
    pub fn name(&self) -> String {
        match self {
            ModelKind::Jets { m, n } => format!("jets {m} {n}"),
            ModelKind::Ode2 => "ode2".into(),
            ModelKind::Pde1 => "pde1".into(),
            ModelKind::Pencil => "pencil".into(),
            ModelKind::Kdv => "kdv".into(),
        }
    }
}

/// Coordinate names available to expressions of a model.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    kind: ModelKind,
    /// Number of independent variables for jets-style models.
    n: usize,
}

impl Vocabulary {
    pub fn new(kind: ModelKind) -> Self {
        let n = match kind {
            ModelKind::Jets { n, .. } => n,
            _ => 2,
        };
        Vocabulary { kind, n }
    }

    pub fn pencil(n: usize) -> Self {
        Vocabulary {
            kind: ModelKind::Pencil,
            n,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    fn numbered(name: &str, family: &str) -> Option<Atom> {
        let digits = name.strip_prefix(family)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let r: usize = digits.parse().ok()?;
        Some(Atom::jet(family, MultiIndex::repeat(1, r), NameStyle::Numbered))
    }

    fn letters(name: &str, family: &str, dirs: &str) -> Option<Atom> {
        let rest = name.strip_prefix(family)?;
        let mut idx = Vec::new();
        for c in rest.chars() {
            let i = dirs.find(c)?;
            idx.push(i as u8 + 1);
        }
        Some(Atom::jet(family, MultiIndex::new(idx), NameStyle::Letters))
    }

    /// `stem[j]` or `stem[j][I]` with bracket contents already split.
    fn bracket(&self, stem: &str, groups: &[String]) -> Option<Atom> {
        let (m, n) = match self.kind {
            ModelKind::Jets { m, n } => (m, n),
            ModelKind::Pencil => (2, self.n),
            _ => return None,
        };
        if stem != "w" || groups.is_empty() || groups.len() > 2 {
            return None;
        }
        let j: usize = groups[0].parse().ok()?;
        if j == 0 || j > m {
            return None;
        }
        let mut dirs = Vec::new();
        if let Some(g) = groups.get(1) {
            for c in g.chars() {
                let i = c.to_digit(10)? as usize;
                if i == 0 || i > n {
                    return None;
                }
                dirs.push(i as u8);
            }
        }
        Some(Atom::jet(&format!("w{j}"), MultiIndex::new(dirs), NameStyle::Bracket))
    }

    pub fn resolve(&self, name: &str, groups: &[String]) -> Option<Atom> {
        if !groups.is_empty() {
            return self.bracket(name, groups);
        }
        match self.kind {
            ModelKind::Ode2 => match name {
                "x" => Some(Atom::indep("x")),
                _ => Self::numbered(name, "u").or_else(|| Self::numbered(name, "v")),
            },
            ModelKind::Pde1 => match name {
                "x" | "y" => Some(Atom::indep(name)),
                _ => Self::numbered(name, "u").or_else(|| Self::letters(name, "v", "xy")),
            },
            ModelKind::Kdv => match name {
                "x" => Some(Atom::indep("x")),
                "lambda" => Some(Atom::param("lambda")),
                _ => Self::numbered(name, "q").or_else(|| Self::letters(name, "v", "x")),
            },
            ModelKind::Jets { .. } | ModelKind::Pencil => {
                let i: usize = name.strip_prefix('x')?.parse().ok()?;
                (1..=self.n).contains(&i).then(|| Atom::indep(name))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String, Vec<String>),
    Int(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            advance(&mut i, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut col);
            }
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                advance(&mut i, &mut col);
            }
            let mut groups = Vec::new();
            while i < chars.len() && chars[i] == '[' {
                advance(&mut i, &mut col);
                let mut g = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    g.push(chars[i]);
                    advance(&mut i, &mut col);
                }
                if i >= chars.len() || chars[i] != ']' {
                    return Err(err(line, col, "expected `]`".into()));
                }
                advance(&mut i, &mut col);
                groups.push(g);
            }
            out.push(Token {
                tok: Tok::Ident(s, groups),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                advance(&mut i, &mut col);
            }
            out.push(Token {
                tok: Tok::Int(s),
                line: l0,
                column: c0,
            });
        } else if "+-*/^(),;=".contains(c) {
            advance(&mut i, &mut col);
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
        } else {
            return Err(err(line, col, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vocab: &'a Vocabulary,
    arities: BTreeMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_sym(c) {
            self.next();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.error_at(&t, format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.is_sym('+') {
                self.next();
                acc = acc.add(&self.term()?);
            } else if self.is_sym('-') {
                self.next();
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.is_sym('*') {
                self.next();
                acc = acc.mul(&self.factor()?);
            } else if self.is_sym('/') {
                let t = self.next();
                let d = self.factor()?;
                acc = acc
                    .div(&d)
                    .map_err(|_| self.error_at(&t, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('-') {
            self.next();
            return Ok(self.factor()?.neg());
        }
        let base = self.base()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        let t = self.next();
        let neg = if self.is_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let e = match self.next().tok {
            Tok::Int(s) => s
                .parse::<i32>()
                .map_err(|_| self.error_at(&t, "exponent too large"))?,
            _ => return Err(self.error_at(&t, "expected an integer exponent")),
        };
        base.pow(if neg { -e } else { e })
            .map_err(|_| self.error_at(&t, "zero raised to a negative power"))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Int(s) => {
                let n: num_bigint::BigInt = s.parse().expect("digits");
                Ok(Expr::rational(n.into()))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name, groups) if groups.is_empty() && self.is_sym('(') => {
                self.next();
                let mut args = vec![(self.peek().clone(), self.expr()?)];
                while self.is_sym(',') {
                    self.next();
                    args.push((self.peek().clone(), self.expr()?));
                }
                self.expect(')')?;
                self.call(&t, name, args)
            }
            Tok::Ident(name, groups) => self
                .vocab
                .resolve(name, groups)
                .map(Expr::atom)
                .ok_or_else(|| {
                    let shown = if groups.is_empty() {
                        name.clone()
                    } else {
                        format!("{name}[{}]", groups.join("]["))
                    };
                    self.error_at(&t, format!("unknown coordinate `{shown}`"))
                }),
            Tok::End => Err(self.error_at(&t, "unexpected end of input")),
            Tok::Sym(c) => Err(self.error_at(&t, format!("unexpected `{c}`"))),
        }
    }

    fn call(&mut self, t: &Token, name: &str, args: Vec<(Token, Expr)>) -> Result<Expr, ParseError> {
        if let Some(kind) = ElemKind::from_name(name) {
            if args.len() != 1 {
                return Err(self.error_at(t, format!("`{name}` takes one argument, got {}", args.len())));
            }
            let (at, arg) = &args[0];
            let atom = arg
                .as_atom()
                .filter(|a| a.is_coordinate())
                .ok_or_else(|| self.error_at(at, format!("`{name}` expects a coordinate")))?;
            return match kind {
                ElemKind::Ln => Ok(Expr::atom(Atom::ln(atom.clone()))),
            };
        }
        let mut parts = name.split('_');
        let fname = parts.next().unwrap_or_default().to_string();
        let mut atoms = Vec::new();
        for (at, a) in &args {
            let atom = a
                .as_atom()
                .filter(|x| x.is_coordinate())
                .ok_or_else(|| self.error_at(at, "function arguments must be coordinates"))?;
            atoms.push(atom.clone());
        }
        match self.arities.get(&fname) {
            Some(&k) if k != atoms.len() => {
                return Err(self.error_at(
                    t,
                    format!("`{fname}` used with {} arguments, previously {k}", atoms.len()),
                ))
            }
            _ => {
                self.arities.insert(fname.clone(), atoms.len());
            }
        }
        let mut e = Expr::atom(Atom::func(&fname, atoms.clone()));
        for seg in parts {
            let by = if let Ok(k) = seg.parse::<usize>() {
                atoms.get(k.wrapping_sub(1)).cloned()
            } else {
                atoms.iter().find(|a| a.text() == seg).cloned()
            };
            let by = by.ok_or_else(|| self.error_at(t, format!("`{seg}` is not an argument of `{fname}`")))?;
            e = e.partial(&by);
        }
        Ok(e)
    }
}

/// Parse a single expression against a vocabulary.
pub fn parse_expr(text: &str, vocab: &Vocabulary) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vocab,
        arities: BTreeMap::new(),
    };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.error_at(&t, "unexpected trailing input"));
    }
    Ok(e)
}

#[derive(Clone, Debug)]
pub struct Model {
    pub kind: ModelKind,
    pub vocab: Vocabulary,
    /// Definitions in file order.
    pub definitions: Vec<(String, Expr)>,
    pub options: BTreeMap<String, String>,
}

impl Model {
    pub fn new(kind: ModelKind) -> Self {
        Model {
            kind,
            vocab: Vocabulary::new(kind),
            definitions: Vec::new(),
            options: BTreeMap::new(),
        }
    }

    pub fn definition(&self, name: &str) -> Option<&Expr> {
        self.definitions.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn option_usize(&self, name: &str) -> Option<usize> {
        self.options.get(name).and_then(|v| v.parse().ok())
    }
}

/// Parse a model file: `model kind;`, `name = expr;`, `option name value;`.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let toks = lex(text)?;
    let mut model: Option<Model> = None;
    let mut p = Parser {
        toks,
        pos: 0,
        vocab: &Vocabulary::new(ModelKind::Kdv),
        arities: BTreeMap::new(),
    };
    // definitions are parsed once the header has fixed the vocabulary
    let mut pending: Vec<(Token, String, usize, usize)> = Vec::new();
    let mut options = BTreeMap::new();
    loop {
        let t = p.next();
        match &t.tok {
            Tok::End => break,
            Tok::Ident(kw, g) if kw == "model" && g.is_empty() => {
                if model.is_some() {
                    return Err(p.error_at(&t, "duplicate model statement"));
                }
                let kt = p.next();
                let kind = match &kt.tok {
                    Tok::Ident(k, _) if k == "ode2" => ModelKind::Ode2,
                    Tok::Ident(k, _) if k == "pde1" => ModelKind::Pde1,
                    Tok::Ident(k, _) if k == "pencil" => ModelKind::Pencil,
                    Tok::Ident(k, _) if k == "kdv" => ModelKind::Kdv,
                    Tok::Ident(k, _) if k == "jets" => {
                        let mut dims = [0usize; 2];
                        for d in &mut dims {
                            let nt = p.next();
                            *d = match &nt.tok {
                                Tok::Int(s) => s.parse().map_err(|_| p.error_at(&nt, "dimension too large"))?,
                                _ => return Err(p.error_at(&nt, "expected a dimension")),
                            };
                            if *d == 0 || *d > 9 {
                                return Err(p.error_at(&nt, "dimensions must be between 1 and 9"));
                            }
                        }
                        ModelKind::Jets {
                            m: dims[0],
                            n: dims[1],
                        }
                    }
                    _ => return Err(p.error_at(&kt, "expected a model kind (jets m n, ode2, pde1, pencil, kdv)")),
                };
                p.expect(';')?;
                model = Some(Model::new(kind));
            }
            Tok::Ident(kw, g) if kw == "option" && g.is_empty() => {
                let nt = p.next();
                let Tok::Ident(name, _) = nt.tok.clone() else {
                    return Err(p.error_at(&nt, "expected an option name"));
                };
                let vt = p.next();
                let value = match vt.tok {
                    Tok::Int(s) => s,
                    Tok::Ident(s, g) if g.is_empty() => s,
                    _ => return Err(p.error_at(&vt, "expected an option value")),
                };
                p.expect(';')?;
                options.insert(name, value);
            }
            Tok::Ident(name, g) if g.is_empty() => {
                p.expect('=')?;
                let start = p.pos;
                while !p.is_sym(';') {
                    if p.peek().tok == Tok::End {
                        let e = p.peek().clone();
                        return Err(p.error_at(&e, "expected `;`"));
                    }
                    p.next();
                }
                pending.push((t.clone(), name.clone(), start, p.pos));
                p.next();
            }
            _ => return Err(p.error_at(&t, "expected a statement")),
        }
    }
    let mut model = model.ok_or_else(|| ParseError {
        line: 1,
        column: 1,
        message: "missing `model` statement".into(),
    })?;
    if model.kind == ModelKind::Pencil {
        let n = options.get("n").and_then(|v| v.parse().ok()).unwrap_or(2);
        model.vocab = Vocabulary::pencil(n);
    }
    model.options = options;
    let all = p.toks.clone();
    for (t, name, start, end) in pending {
        let mut toks: Vec<Token> = all[start..end].to_vec();
        toks.push(Token {
            tok: Tok::End,
            line: all[end].line,
            column: all[end].column,
        });
        let mut sub = Parser {
            toks,
            pos: 0,
            vocab: &model.vocab,
            arities: BTreeMap::new(),
        };
        let e = sub.expr()?;
        let rest = sub.peek().clone();
        if rest.tok != Tok::End {
            return Err(sub.error_at(&rest, "unexpected trailing input"));
        }
        if model.definition(&name).is_some() {
            return Err(sub.error_at(&t, format!("`{name}` defined twice")));
        }
        model.definitions.push((name, e));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode2_model() {
        let m = parse_model("model ode2; F = u0*v1;").unwrap();
        assert_eq!(m.kind, ModelKind::Ode2);
        assert_eq!(m.definition("F").unwrap().text(), "u0*v1");
    }

    #[test]
    fn kdv_model() {
        assert_eq!(parse_model("model kdv;").unwrap().kind, ModelKind::Kdv);
    }

    #[test]
    fn dangling_operator() {
        let err = parse_model("model ode2; F = u0*;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 20));
    }

    #[test]
    fn unknown_coordinate_and_arity() {
        let v = Vocabulary::new(ModelKind::Ode2);
        assert!(parse_expr("q0", &v).unwrap_err().message.contains("unknown coordinate"));
        assert!(parse_expr("ln(u0, u1)", &v).is_err());
        assert!(parse_expr("G(x) + G(x, u0)", &v).is_err());
    }

    #[test]
    fn text_round_trips() {
        let v = Vocabulary::new(ModelKind::Ode2);
        for s in [
            "2*u0^2*v1-2*u1^2",
            "1/4/(u0)",
            "(u0+1)/(v1-x)",
            "-u1^2",
            "F_u1_v2(x,u0,v0,u1,v1,v2)*ln(u0)",
        ] {
            let e = parse_expr(s, &v).unwrap();
            assert_eq!(parse_expr(&e.text(), &v).unwrap(), e, "{s}");
        }
        let j = Vocabulary::new(ModelKind::Jets { m: 2, n: 2 });
        let e = parse_expr("w[1][12]*w[2] + x2", &j).unwrap();
        assert_eq!(parse_expr(&e.text(), &j).unwrap(), e);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let v = Vocabulary::new(ModelKind::Ode2);
        assert_eq!(parse_expr("-u0^2", &v).unwrap(), parse_expr("-(u0^2)", &v).unwrap());
    }
}
