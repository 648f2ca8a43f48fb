use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::poly::{q, Monomial, Poly, Q};
use super::Atom;
use crate::error::{Error, Result};

/// Canonical rational function: `num / den` with `gcd(num, den) = 1`, `den`
/// scaled to coprime integer coefficients with positive leading coefficient.
/// Structural equality is therefore mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::rational(super::poly::q_frac(n, d))
    }

    pub fn rational(c: Q) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn atom(a: Atom) -> Self {
        Expr {
            num: Poly::atom(a),
            den: Poly::one(),
        }
    }

    pub fn poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Build `num / den` and bring it to canonical form.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.as_constant() {
            return Ok(Expr::poly(num.scale(&c.recip())));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Expr::from_coprime(num, den))
    }

    fn from_coprime(num: Poly, den: Poly) -> Self {
        let (c, den) = den.make_primitive();
        let num = num.scale(&c.recip());
        if num.is_zero() {
            return Expr::zero();
        }
        Expr { num, den }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        if !self.den.is_one() || self.num.len() != 1 {
            return None;
        }
        let (m, c) = self.num.leading()?;
        match m.factors() {
            [(a, 1)] if c.is_one() => Some(a),
            _ => None,
        }
    }

    /// Number of terms in numerator and denominator; a rough size measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        if !self.den.is_one() {
            s.extend(self.den.atoms());
        }
        s
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.num.contains_atom(a) || self.den.contains_atom(a)
    }

    pub fn neg(&self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return Expr::poly(num);
            }
            return Expr::fraction(num, self.den.clone()).expect("nonzero denominator");
        }
        if other.den.is_one() {
            let num = self.num.add(&other.num.mul(&self.den));
            return Expr::from_coprime(num, self.den.clone());
        }
        if self.den.is_one() {
            let num = other.num.add(&self.num.mul(&other.den));
            return Expr::from_coprime(num, other.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d1).add(&other.num.mul(&b1));
        let den = self.den.mul(&d1);
        if g.is_one() {
            return Expr::from_coprime(num, den);
        }
        Expr::fraction(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Expr::poly(self.num.mul(&other.num));
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = other.den.div_exact(&g1).expect("gcd divides");
        let c = other.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        Expr::from_coprime(a.mul(&c), b.mul(&d))
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Expr::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Expr> {
        if e >= 0 {
            let e = e as u32;
            return Ok(Expr {
                num: self.num.pow(e),
                den: self.den.pow(e),
            });
        }
        self.inv()?.pow(-e)
    }

    /// Partial derivative treating `a` as an indeterminate only, no chain rule.
    pub fn partial_atom(&self, a: &Atom) -> Expr {
        let dn = self.num.partial(a);
        if self.den.is_one() {
            return Expr::poly(dn);
        }
        let dd = self.den.partial(a);
        if dd.is_zero() {
            return Expr::fraction(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::fraction(num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// `∂self/∂a` with distinct atoms independent; formal function symbols
    /// differentiate into their recorded partials, elementary functions by
    /// their registered rule.
    pub fn partial(&self, a: &Atom) -> Expr {
        let mut acc = Expr::zero();
        for b in self.atoms() {
            if let Some(db) = b.partial_by(a) {
                acc = acc.add(&self.partial_atom(&b).mul(&db));
            }
        }
        acc
    }

    /// Apply a derivation given by its values on coordinate atoms; formal
    /// and elementary function atoms follow the chain rule.
    pub fn derive<F>(&self, on_coord: &F) -> Result<Expr>
    where
        F: Fn(&Atom) -> Result<Expr>,
    {
        let dn = derive_poly(&self.num, on_coord)?;
        if self.den.is_one() {
            return Ok(dn);
        }
        let dd = derive_poly(&self.den, on_coord)?;
        if dd.is_zero() {
            return dn.div(&Expr::poly(self.den.clone()));
        }
        let den = Expr::poly(self.den.clone());
        let num = dn.mul(&den).sub(&Expr::poly(self.num.clone()).mul(&dd));
        num.div(&Expr::mul(&den, &den))
    }

    /// Simultaneous substitution followed by normalization.
    pub fn substitute(&self, bindings: &BTreeMap<Atom, Expr>) -> Result<Expr> {
        if bindings.is_empty() || !self.atoms().iter().any(|a| bindings.contains_key(a)) {
            return Ok(self.clone());
        }
        let num = subst_poly(&self.num, bindings);
        if self.den.is_one() {
            return Ok(num);
        }
        let den = subst_poly(&self.den, bindings);
        num.div(&den)
    }

    /// Repeat substitution until no bound atom remains, at most `depth` passes.
    pub fn substitute_fixed(&self, bindings: &BTreeMap<Atom, Expr>, depth: usize) -> Result<Expr> {
        let mut cur = self.clone();
        for _ in 0..depth {
            if !cur.atoms().iter().any(|a| bindings.contains_key(a)) {
                return Ok(cur);
            }
            cur = cur.substitute(bindings)?;
        }
        if cur.atoms().iter().any(|a| bindings.contains_key(a)) {
            return Err(Error::DepthExceeded(depth));
        }
        Ok(cur)
    }

    /// Coefficients of `self` as a polynomial in `a`, by descending degree,
    /// zero coefficients omitted.
    pub fn collect(&self, a: &Atom) -> Result<Vec<(u32, Expr)>> {
        if self.den.contains_atom(a) {
            return Err(Error::NotPolynomial(a.clone()));
        }
        let coeffs = self.num.coeffs_in(a);
        let mut out = Vec::new();
        for (k, c) in coeffs.into_iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            out.push((k as u32, Expr::fraction(c, self.den.clone())?));
        }
        Ok(out)
    }

    /// Coefficient of `a^k` (zero when absent).
    pub fn coeff(&self, a: &Atom, k: u32) -> Result<Expr> {
        Ok(self
            .collect(a)?
            .into_iter()
            .find(|(d, _)| *d == k)
            .map(|(_, c)| c)
            .unwrap_or_default())
    }

    /// Evaluate at a point; `Ok(None)` when the denominator vanishes there.
    pub fn eval(&self, value: &dyn Fn(&Atom) -> Q) -> Option<Q> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(value) / d)
    }

    /// Replace every occurrence of the formal function `name` (any derivative
    /// record) by the matching partial derivative of `concrete`, which is
    /// written in terms of the function's argument atoms.
    pub fn instantiate_fn(&self, name: &str, concrete: &Expr) -> Result<Expr> {
        let mut bindings = BTreeMap::new();
        for a in self.atoms() {
            if let Atom::Fn(f) = &a {
                if &*f.name == name {
                    let mut v = concrete.clone();
                    for &d in &f.derivs {
                        v = v.partial(&f.args[d as usize]);
                    }
                    bindings.insert(a.clone(), v);
                }
            }
        }
        self.substitute(&bindings)
    }

    pub fn text(&self) -> String {
        if self.den.is_one() {
            return poly_text(&self.num);
        }
        let n = if self.num.len() > 1 {
            format!("({})", poly_text(&self.num))
        } else {
            poly_text(&self.num)
        };
        format!("{}/({})", n, poly_text(&self.den))
    }

    pub fn latex(&self) -> String {
        if self.den.is_one() {
            return poly_latex(&self.num);
        }
        format!("\\frac{{{}}}{{{}}}", poly_latex(&self.num), poly_latex(&self.den))
    }
}

fn derive_atom<F>(a: &Atom, on_coord: &F) -> Result<Expr>
where
    F: Fn(&Atom) -> Result<Expr>,
{
    if a.is_coordinate() {
        return on_coord(a);
    }
    let mut acc = Expr::zero();
    for arg in a.arguments() {
        let da = derive_atom(&arg, on_coord)?;
        if !da.is_zero() {
            let p = a.partial_by(&arg).expect("argument partial");
            acc = acc.add(&p.mul(&da));
        }
    }
    Ok(acc)
}

fn derive_poly<F>(p: &Poly, on_coord: &F) -> Result<Expr>
where
    F: Fn(&Atom) -> Result<Expr>,
{
    let mut acc = Expr::zero();
    for a in p.atoms() {
        let da = derive_atom(&a, on_coord)?;
        if !da.is_zero() {
            acc = acc.add(&Expr::poly(p.partial(&a)).mul(&da));
        }
    }
    Ok(acc)
}

fn subst_poly(p: &Poly, bindings: &BTreeMap<Atom, Expr>) -> Expr {
    let mut fixed = Poly::zero();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut rest = Vec::new();
        let mut bound = Expr::rational(c.clone());
        for (a, e) in m.factors() {
            match bindings.get(a) {
                Some(v) => bound = bound.mul(&v.pow(*e as i32).expect("non-negative power")),
                None => rest.push((a.clone(), *e)),
            }
        }
        let rest_m = rest
            .into_iter()
            .fold(Monomial::one(), |acc, (a, e)| acc.mul(&Monomial::var(a, e)));
        match bound.as_rational() {
            Some(k) => fixed.add_term(rest_m, k),
            None => acc = acc.add(&bound.mul(&Expr::poly(Poly::term(rest_m, Q::one())))),
        }
    }
    acc.add(&Expr::poly(fixed))
}

pub(crate) fn rational_text(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn poly_text(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        let body = if m.is_one() {
            rational_text(&abs)
        } else if abs.is_one() {
            m.to_string()
        } else {
            format!("{}*{}", rational_text(&abs), m)
        };
        if neg {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        out.push_str(&body);
    }
    out
}

fn latex_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

pub(crate) fn monomial_latex(m: &Monomial) -> String {
    m.factors()
        .iter()
        .rev()
        .map(|(a, e)| {
            if *e == 1 {
                a.latex()
            } else {
                format!("{}^{{{}}}", a.latex(), e)
            }
        })
        .collect::<Vec<_>>()
        .join("")
}

fn poly_latex(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        let body = if m.is_one() {
            latex_rational(&abs)
        } else if abs.is_one() {
            monomial_latex(m)
        } else {
            format!("{}{}", latex_rational(&abs), monomial_latex(m))
        };
        if neg {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(self, rhs)
            }
        }
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(&self, &rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(&self, rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a.add(&b))
    }
}
