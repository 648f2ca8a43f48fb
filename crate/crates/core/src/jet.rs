//! Jet spaces, diffieties in solved form and total derivatives.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, JetCoord, NameStyle};

pub const DEFAULT_ORDER_BOUND: usize = 32;

/// Sorted multiset of directions `1..=n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut dirs: Vec<u8>) -> Self {
        dirs.sort_unstable();
        MultiIndex(dirs)
    }

    /// `i` repeated `r` times.
    pub fn repeat(i: usize, r: usize) -> Self {
        MultiIndex(vec![i as u8; r])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn with(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&d| d <= i as u8);
        v.insert(pos, i as u8);
        MultiIndex(v)
    }

    pub fn count(&self, i: usize) -> usize {
        self.0.iter().filter(|&&d| d == i as u8).count()
    }

    /// Multiset containment `other ⊆ self`.
    pub fn contains(&self, other: &MultiIndex) -> bool {
        other.0.iter().all(|&d| self.count(d as usize) >= other.count(d as usize))
    }

    /// Multiset difference, `None` unless `other ⊆ self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        for d in &other.0 {
            let pos = v.iter().position(|x| x == d)?;
            v.remove(pos);
        }
        Some(MultiIndex(v))
    }

    /// All multi-indices over directions `1..=n` of exactly order `r`.
    pub fn all_of_order(n: usize, r: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, r: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
            if cur.len() == r {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for d in start..=n as u8 {
                cur.push(d);
                rec(n, r, d, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, r, 1, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub name: Arc<str>,
    pub style: NameStyle,
}

/// Shape of a jet space before constraints are imposed.
#[derive(Clone, Debug)]
pub struct JetSpec {
    pub indep: Vec<Arc<str>>,
    pub families: Vec<Family>,
    pub params: Vec<Arc<str>>,
    pub order_bound: usize,
    /// Restricted derivations reject atoms outside the declared families.
    pub strict: bool,
}

impl JetSpec {
    pub fn new(indep: &[&str]) -> Self {
        JetSpec {
            indep: indep.iter().map(|s| Arc::from(*s)).collect(),
            families: Vec::new(),
            params: Vec::new(),
            order_bound: DEFAULT_ORDER_BOUND,
            strict: false,
        }
    }

    /// Restricted derivation in one direction over the given families only.
    pub fn restricted(families: &[(&str, NameStyle)]) -> Self {
        let mut s = JetSpec::new(&[]);
        s.strict = true;
        for (name, style) in families {
            s = s.family(name, *style);
        }
        s
    }

    pub fn family(mut self, name: &str, style: NameStyle) -> Self {
        self.families.push(Family {
            name: Arc::from(name),
            style,
        });
        self
    }

    pub fn param(mut self, name: &str) -> Self {
        self.params.push(Arc::from(name));
        self
    }

    pub fn order_bound(mut self, bound: usize) -> Self {
        self.order_bound = bound;
        self
    }

    /// Trivial jet space `M(m, n)`: families `w1..wm`, variables `x1..xn`.
    pub fn jets(m: usize, n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut s = JetSpec::new(&refs);
        for j in 1..=m {
            s = s.family(&format!("w{j}"), NameStyle::Bracket);
        }
        s
    }
}

/// A jet space with solved-form constraints `w^j_L = rhs`, resolved lazily.
pub struct Diffiety {
    spec: JetSpec,
    leaders: HashMap<Arc<str>, Vec<(MultiIndex, Expr)>>,
    memo: RwLock<HashMap<JetCoord, Expr>>,
}

impl fmt::Debug for Diffiety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diffiety")
            .field("spec", &self.spec)
            .field("leaders", &self.leaders)
            .finish()
    }
}

impl Diffiety {
    pub fn free(spec: JetSpec) -> Arc<Diffiety> {
        Diffiety::build(spec, Vec::new()).expect("free jet space has no constraints")
    }

    /// Impose `leader ↦ rhs` constraints. Right-hand sides may only mention
    /// internal coordinates (nothing at or above any leader).
    pub fn build(spec: JetSpec, constraints: Vec<(Atom, Expr)>) -> Result<Arc<Diffiety>> {
        let mut leaders: HashMap<Arc<str>, Vec<(MultiIndex, Expr)>> = HashMap::new();
        for (lead, rhs) in constraints {
            let j = lead
                .as_jet()
                .ok_or_else(|| Error::InvalidConstraint(format!("{lead} is not a jet coordinate")))?;
            if !spec.families.iter().any(|f| f.name == j.family) {
                return Err(Error::UnknownFamily(j.family.to_string()));
            }
            let entry = leaders.entry(j.family.clone()).or_default();
            if entry
                .iter()
                .any(|(l, _)| l.contains(&j.index) || j.index.contains(l))
            {
                return Err(Error::InvalidConstraint(format!(
                    "leader {lead} is comparable with another leader"
                )));
            }
            entry.push((j.index.clone(), rhs));
        }
        let d = Diffiety {
            spec,
            leaders,
            memo: RwLock::new(HashMap::new()),
        };
        for list in d.leaders.values() {
            for (_, rhs) in list {
                for a in rhs.atoms() {
                    d.check_rhs_atom(&a)?;
                }
            }
        }
        Ok(Arc::new(d))
    }

    fn check_rhs_atom(&self, a: &Atom) -> Result<()> {
        match a {
            Atom::Jet(j) => {
                if !self.has_family(&j.family) {
                    return Err(Error::UnknownFamily(j.family.to_string()));
                }
                if !self.is_internal(a) {
                    return Err(Error::InvalidConstraint(format!(
                        "right-hand side mentions {a}, which lies at or above a leader"
                    )));
                }
                Ok(())
            }
            Atom::Fn(_) | Atom::Elem(_) => {
                for arg in a.arguments() {
                    self.check_rhs_atom(&arg)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    /// Number of independent variables.
    pub fn n(&self) -> usize {
        self.spec.indep.len()
    }

    pub fn families(&self) -> &[Family] {
        &self.spec.families
    }

    pub fn has_family(&self, name: &str) -> bool {
        self.spec.families.iter().any(|f| &*f.name == name)
    }

    fn family_of(&self, name: &str) -> Result<&Family> {
        self.spec
            .families
            .iter()
            .find(|f| &*f.name == name)
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    /// Independent variable `x_i`, `i` counted from 1.
    pub fn x(&self, i: usize) -> Atom {
        Atom::Indep(self.spec.indep[i - 1].clone())
    }

    pub fn indep_atoms(&self) -> Vec<Atom> {
        self.spec.indep.iter().map(|n| Atom::Indep(n.clone())).collect()
    }

    /// Raw coordinate atom `w^family_I`; no resolution.
    pub fn coord(&self, family: &str, index: MultiIndex) -> Atom {
        let style = self
            .family_of(family)
            .map(|f| f.style)
            .unwrap_or(NameStyle::Numbered);
        Atom::jet(family, index, style)
    }

    /// Coordinate of a one-direction family: `family_r`.
    pub fn coord_r(&self, family: &str, r: usize) -> Atom {
        self.coord(family, MultiIndex::repeat(1, r))
    }

    pub fn leaders(&self, family: &str) -> &[(MultiIndex, Expr)] {
        self.leaders.get(family).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether a jet coordinate is internal, i.e. not at or above a leader.
    pub fn is_internal(&self, a: &Atom) -> bool {
        match a {
            Atom::Jet(j) => !self
                .leaders(&j.family)
                .iter()
                .any(|(l, _)| j.index.contains(l)),
            _ => true,
        }
    }

    /// Internal jet coordinates of `family` of exactly order `r`.
    pub fn internal_of_order(&self, family: &str, r: usize) -> Vec<Atom> {
        MultiIndex::all_of_order(self.n().max(1), r)
            .into_iter()
            .map(|i| self.coord(family, i))
            .filter(|a| self.is_internal(a))
            .collect()
    }

    /// Value of `w^family_I` in internal coordinates.
    pub fn resolve(&self, family: &str, index: &MultiIndex) -> Result<Expr> {
        let fam = self.family_of(family)?;
        if index.order() > self.spec.order_bound {
            return Err(Error::OrderBound {
                order: index.order(),
                bound: self.spec.order_bound,
            });
        }
        let key = JetCoord {
            family: fam.name.clone(),
            index: index.clone(),
            style: fam.style,
        };
        let leader = self
            .leaders(family)
            .iter()
            .find(|(l, _)| index.contains(l));
        let Some((lead, rhs)) = leader else {
            return Ok(Expr::atom(Atom::Jet(key)));
        };
        if lead == index {
            return Ok(rhs.clone());
        }
        if let Some(v) = self.memo.read().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let rest = index.minus(lead).expect("leader contained");
        let dir = *rest.iter().next().expect("strictly above leader") as usize;
        let below = index.minus(&MultiIndex(vec![dir as u8])).expect("dir present");
        let value = self.total(dir, &self.resolve(family, &below)?)?;
        self.memo
            .write()
            .expect("memo lock")
            .entry(key)
            .or_insert_with(|| value.clone());
        Ok(value)
    }

    /// `D_i a` for a single atom.
    pub fn total_atom(&self, i: usize, a: &Atom) -> Result<Expr> {
        if i == 0 || i > self.n().max(usize::from(self.spec.strict)) {
            return Err(Error::BadDirection(i));
        }
        match a {
            Atom::Indep(name) => {
                if self.spec.strict {
                    return Err(Error::OutOfScope(a.clone()));
                }
                Ok(if *name == self.spec.indep[i - 1] {
                    Expr::one()
                } else {
                    Expr::zero()
                })
            }
            Atom::Param(_) => Ok(Expr::zero()),
            Atom::Jet(j) => {
                if !self.has_family(&j.family) {
                    return Err(if self.spec.strict {
                        Error::OutOfScope(a.clone())
                    } else {
                        Error::UnknownFamily(j.family.to_string())
                    });
                }
                self.resolve(&j.family, &j.index.with(i))
            }
            Atom::Fn(_) | Atom::Elem(_) => Expr::atom(a.clone()).derive(&|c| self.total_atom(i, c)),
        }
    }

    /// Total derivative `D_i e`.
    pub fn total(&self, i: usize, e: &Expr) -> Result<Expr> {
        e.derive(&|a| self.total_atom(i, a))
    }

    /// `D_I e`.
    pub fn iterated(&self, index: &MultiIndex, e: &Expr) -> Result<Expr> {
        let mut cur = e.clone();
        for &d in index.iter() {
            cur = self.total(d as usize, &cur)?;
        }
        Ok(cur)
    }

    /// Replace non-internal coordinates by their resolved values.
    pub fn reduce(&self, e: &Expr) -> Result<Expr> {
        let mut bindings = BTreeMap::new();
        for a in e.atoms() {
            if let Atom::Jet(j) = &a {
                if !self.is_internal(&a) {
                    bindings.insert(a.clone(), self.resolve(&j.family, &j.index)?);
                }
            }
        }
        e.substitute(&bindings)
    }

    /// Jet coordinates (with their families) appearing in `e`, including
    /// through formal function arguments.
    pub fn coordinates_in(e: &Expr) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        fn walk(a: &Atom, out: &mut BTreeSet<Atom>) {
            if a.is_coordinate() {
                out.insert(a.clone());
            } else {
                for arg in a.arguments() {
                    walk(&arg, out);
                }
            }
        }
        for a in e.atoms() {
            walk(&a, &mut out);
        }
        out
    }
}

/// A total derivative `D_i` of a diffiety, usable as a standalone operator.
#[derive(Clone, Debug)]
pub struct Derivation {
    diffiety: Arc<Diffiety>,
    dir: usize,
}

impl Derivation {
    pub fn new(diffiety: Arc<Diffiety>, dir: usize) -> Result<Self> {
        if dir == 0 || dir > diffiety.n().max(usize::from(diffiety.spec.strict)) {
            return Err(Error::BadDirection(dir));
        }
        Ok(Derivation { diffiety, dir })
    }

    /// `𝒟 = Σ q_{r+1} ∂/∂q_r` over the given one-direction families only.
    pub fn restricted(families: &[(&str, NameStyle)], params: &[&str]) -> Self {
        let mut spec = JetSpec::restricted(families);
        for p in params {
            spec = spec.param(p);
        }
        Derivation {
            diffiety: Diffiety::free(spec),
            dir: 1,
        }
    }

    pub fn diffiety(&self) -> &Arc<Diffiety> {
        &self.diffiety
    }

    pub fn direction(&self) -> usize {
        self.dir
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        self.diffiety.total(self.dir, e)
    }

    pub fn apply_n(&self, e: &Expr, times: usize) -> Result<Expr> {
        let mut cur = e.clone();
        for _ in 0..times {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode_u0v1() -> Arc<Diffiety> {
        let spec = JetSpec::new(&["x"])
            .family("u", NameStyle::Numbered)
            .family("v", NameStyle::Numbered);
        let u0 = Atom::jet("u", MultiIndex::repeat(1, 0), NameStyle::Numbered);
        let v1 = Atom::jet("v", MultiIndex::repeat(1, 1), NameStyle::Numbered);
        let u2 = Atom::jet("u", MultiIndex::repeat(1, 2), NameStyle::Numbered);
        Diffiety::build(spec, vec![(u2, Expr::atom(u0) * Expr::atom(v1))]).unwrap()
    }

    #[test]
    fn multi_index_sorted_insert() {
        let i = MultiIndex::new(vec![2, 1]).with(1);
        assert_eq!(i.as_slice(), &[1, 1, 2]);
        assert!(i.contains(&MultiIndex::new(vec![1, 2])));
        assert!(!i.contains(&MultiIndex::new(vec![2, 2])));
        assert_eq!(MultiIndex::all_of_order(2, 2).len(), 3);
    }

    #[test]
    fn third_derivative_of_u_prolongs_rhs() {
        let d = ode_u0v1();
        let u3 = d.resolve("u", &MultiIndex::repeat(1, 3)).unwrap();
        let e = |f: &str, r| Expr::atom(d.coord_r(f, r));
        assert_eq!(u3, e("u", 1) * e("v", 1) + e("u", 0) * e("v", 2));
        assert_eq!(
            d.iterated(&MultiIndex::repeat(1, 2), &e("u", 0)).unwrap(),
            e("u", 0) * e("v", 1)
        );
    }

    #[test]
    fn nested_leaders_rejected() {
        let spec = JetSpec::new(&["x"]).family("u", NameStyle::Numbered);
        let a = Atom::jet("u", MultiIndex::repeat(1, 2), NameStyle::Numbered);
        let b = Atom::jet("u", MultiIndex::repeat(1, 3), NameStyle::Numbered);
        assert!(Diffiety::build(spec, vec![(a, Expr::one()), (b, Expr::one())]).is_err());
    }

    #[test]
    fn rhs_above_leader_rejected() {
        let spec = JetSpec::new(&["x"]).family("u", NameStyle::Numbered);
        let a = Atom::jet("u", MultiIndex::repeat(1, 2), NameStyle::Numbered);
        let b = Atom::jet("u", MultiIndex::repeat(1, 3), NameStyle::Numbered);
        assert!(Diffiety::build(spec, vec![(a, Expr::atom(b))]).is_err());
    }

    #[test]
    fn restricted_derivation_rejects_foreign_atoms() {
        let dq = Derivation::restricted(&[("q", NameStyle::Numbered)], &["lambda"]);
        let q0 = Atom::jet("q", MultiIndex::empty(), NameStyle::Numbered);
        let q1 = Atom::jet("q", MultiIndex::repeat(1, 1), NameStyle::Numbered);
        assert_eq!(dq.apply(&Expr::atom(q0)).unwrap(), Expr::atom(q1));
        assert!(dq.apply(&Expr::atom(Atom::indep("x"))).is_err());
        assert!(dq.apply(&Expr::atom(Atom::param("lambda"))).unwrap().is_zero());
    }

    #[test]
    fn order_bound_is_an_error() {
        let spec = JetSpec::new(&["x"]).family("u", NameStyle::Numbered).order_bound(3);
        let d = Diffiety::free(spec);
        assert!(matches!(
            d.resolve("u", &MultiIndex::repeat(1, 4)),
            Err(Error::OrderBound { .. })
        ));
    }
}
