//! Lazily resolved vector fields, variations, brackets and symmetry checks.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr};
use crate::forms::{self, OneForm, Representation};
use crate::jet::{Diffiety, MultiIndex};

#[derive(Clone, Debug)]
pub enum FieldKind {
    /// The total derivative `D_i`.
    Total(usize),
    /// `Zx_i = z_i`, `Zw^j = z^j`, higher components by the prolongation
    /// recurrence `z^j_{Ii} = D_i z^j_I − Σ_{i'} w^j_{Ii'} D_i z_{i'}`.
    Generators {
        z: Vec<Expr>,
        zj: BTreeMap<String, Expr>,
        params: BTreeMap<Atom, Expr>,
    },
    /// Finitely many coordinate components, zero elsewhere.
    Explicit(BTreeMap<Atom, Expr>),
    /// `[X, Y]`, componentwise `X(Yc) − Y(Xc)`.
    Bracket(Arc<VectorField>, Arc<VectorField>),
    /// `Σ g_k X_k`.
    Sum(Vec<(Expr, Arc<VectorField>)>),
}

pub struct VectorField {
    diffiety: Arc<Diffiety>,
    kind: FieldKind,
    memo: RwLock<HashMap<Atom, Expr>>,
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField").field("kind", &self.kind).finish()
    }
}

impl VectorField {
    pub fn new(diffiety: Arc<Diffiety>, kind: FieldKind) -> Arc<VectorField> {
        Arc::new(VectorField {
            diffiety,
            kind,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn total(d: &Arc<Diffiety>, i: usize) -> Arc<VectorField> {
        VectorField::new(d.clone(), FieldKind::Total(i))
    }

    /// Field with prescribed `Zx_i = z_i` and `Zw^j = z^j` (families in
    /// declaration order), prolonged by the infinitesimal recurrence.
    pub fn from_point_generators(d: &Arc<Diffiety>, z: Vec<Expr>, zj: Vec<Expr>) -> Result<Arc<VectorField>> {
        if z.len() != d.n() || zj.len() != d.families().len() {
            return Err(Error::Invalid(format!(
                "expected {} base and {} fibre generators",
                d.n(),
                d.families().len()
            )));
        }
        let zj = d
            .families()
            .iter()
            .zip(zj)
            .map(|(f, e)| (f.name.to_string(), e))
            .collect();
        Ok(VectorField::new(
            d.clone(),
            FieldKind::Generators {
                z,
                zj,
                params: BTreeMap::new(),
            },
        ))
    }

    /// Evolutionary field: `Zx_i = 0`, `ω^j(Z) = Φ^j`.
    pub fn evolutionary(d: &Arc<Diffiety>, phi: Vec<Expr>) -> Result<Arc<VectorField>> {
        VectorField::from_point_generators(d, vec![Expr::zero(); d.n()], phi)
    }

    /// Contact field of a characteristic `Φ(x, w, w_i)` on `M(1, n)`:
    /// `Zx_i = −Φ_{w_i}`, `Zw = Φ − Σ w_i Φ_{w_i}`.
    pub fn contact_from_characteristic(d: &Arc<Diffiety>, phi: &Expr) -> Result<Arc<VectorField>> {
        let fam = single_family(d)?;
        let mut z = Vec::new();
        let mut zw = phi.clone();
        for i in 1..=d.n() {
            let wi = d.coord(&fam, MultiIndex::repeat(i, 1));
            let p = phi.partial(&wi);
            zw = zw.sub(&Expr::atom(wi).mul(&p));
            z.push(p.neg());
        }
        VectorField::from_point_generators(d, z, vec![zw])
    }

    pub fn explicit(d: &Arc<Diffiety>, comps: BTreeMap<Atom, Expr>) -> Arc<VectorField> {
        VectorField::new(d.clone(), FieldKind::Explicit(comps))
    }

    /// `Σ g_k X_k`.
    pub fn sum(d: &Arc<Diffiety>, parts: Vec<(Expr, Arc<VectorField>)>) -> Arc<VectorField> {
        VectorField::new(d.clone(), FieldKind::Sum(parts))
    }

    /// Same field with prescribed components on parameters (e.g. `Zλ`).
    pub fn with_params(self: &Arc<Self>, params: BTreeMap<Atom, Expr>) -> Result<Arc<VectorField>> {
        match &self.kind {
            FieldKind::Generators { z, zj, .. } => Ok(VectorField::new(
                self.diffiety.clone(),
                FieldKind::Generators {
                    z: z.clone(),
                    zj: zj.clone(),
                    params,
                },
            )),
            _ => Err(Error::Invalid("parameter components need a generator field".into())),
        }
    }

    pub fn diffiety(&self) -> &Arc<Diffiety> {
        &self.diffiety
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// Component `Zc` on a coordinate atom.
    pub fn component(&self, c: &Atom) -> Result<Expr> {
        if let Some(v) = self.memo.read().expect("memo lock").get(c) {
            return Ok(v.clone());
        }
        let v = self.compute(c)?;
        self.memo
            .write()
            .expect("memo lock")
            .entry(c.clone())
            .or_insert_with(|| v.clone());
        Ok(v)
    }

    fn compute(&self, c: &Atom) -> Result<Expr> {
        let d = &self.diffiety;
        match &self.kind {
            FieldKind::Total(i) => d.total_atom(*i, c),
            FieldKind::Explicit(m) => Ok(m.get(c).cloned().unwrap_or_default()),
            FieldKind::Bracket(x, y) => {
                let a = x.apply(&y.component(c)?)?;
                let b = y.apply(&x.component(c)?)?;
                Ok(a.sub(&b))
            }
            FieldKind::Sum(parts) => {
                let mut acc = Expr::zero();
                for (g, f) in parts {
                    acc = acc.add(&g.mul(&f.component(c)?));
                }
                Ok(acc)
            }
            FieldKind::Generators { z, zj, params } => match c {
                Atom::Indep(_) => {
                    let i = d
                        .indep_atoms()
                        .iter()
                        .position(|a| a == c)
                        .ok_or_else(|| Error::OutOfScope(c.clone()))?;
                    Ok(z[i].clone())
                }
                Atom::Param(_) => Ok(params.get(c).cloned().unwrap_or_default()),
                Atom::Jet(j) => {
                    if j.index.order() == 0 {
                        return Ok(zj.get(&*j.family).cloned().unwrap_or_default());
                    }
                    let i = *j.index.as_slice().last().expect("nonempty") as usize;
                    let below = j.index.minus(&MultiIndex::repeat(i, 1)).expect("present");
                    let prev = self.component(&d.coord(&j.family, below.clone()))?;
                    let mut v = d.total(i, &prev)?;
                    for (ip, zi) in z.iter().enumerate() {
                        if zi.is_zero() {
                            continue;
                        }
                        let dz = d.total(i, zi)?;
                        if dz.is_zero() {
                            continue;
                        }
                        let w = d.resolve(&j.family, &below.with(ip + 1))?;
                        v = v.sub(&w.mul(&dz));
                    }
                    Ok(v)
                }
                _ => Err(Error::Invalid(format!("{c} is not a coordinate"))),
            },
        }
    }

    /// `Zf`.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        f.derive(&|a| self.component(a))
    }
}

fn single_family(d: &Diffiety) -> Result<String> {
    match d.families() {
        [f] => Ok(f.name.to_string()),
        _ => Err(Error::Invalid("expected a single dependent family".into())),
    }
}

/// `[X, Y]`.
pub fn commutator(x: &Arc<VectorField>, y: &Arc<VectorField>) -> Arc<VectorField> {
    VectorField::new(x.diffiety.clone(), FieldKind::Bracket(x.clone(), y.clone()))
}

/// `ω([X,Y])` through the dual formula
/// `X ω(Y) − Y ω(X) − Σ [(Xg)(Yh) − (Yg)(Xh)]` for `ω = Σ g dh`.
pub fn bracket_on_form(w: &OneForm, x: &VectorField, y: &VectorField) -> Result<Expr> {
    let mut acc = x
        .apply(&forms::contract(w, y)?)?
        .sub(&y.apply(&forms::contract(w, x)?)?);
    for (h, g) in w.terms() {
        let t = x.apply(g)?.mul(&y.component(h)?).sub(&y.apply(g)?.mul(&x.component(h)?));
        acc = acc.sub(&t);
    }
    Ok(acc)
}

/// `{F, G} = 𝔛G − 𝔜F` for evolutionary `𝔛`, `𝔜` with `ω_f(𝔛) = F`,
/// `ω_f(𝔜) = G`, where `f` is an order-zero coordinate.
pub fn poisson_bracket(fv: &Expr, gv: &Expr, f: &Expr, d: &Arc<Diffiety>) -> Result<Expr> {
    let fam = match f.as_atom().and_then(Atom::as_jet) {
        Some(j) if j.index.order() == 0 => j.family.to_string(),
        _ => return Err(Error::Invalid(format!("{f} is not an order-zero coordinate"))),
    };
    let gen = |phi: &Expr| -> Result<Arc<VectorField>> {
        let zj = d
            .families()
            .iter()
            .map(|fm| if *fm.name == *fam { phi.clone() } else { Expr::zero() })
            .collect();
        VectorField::evolutionary(d, zj)
    };
    let xf = gen(fv)?;
    let yg = gen(gv)?;
    Ok(xf.apply(gv)?.sub(&yg.apply(fv)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationEntry {
    pub form: usize,
    pub shift: MultiIndex,
    pub direction: usize,
    /// Order of the checked condition, `|shift| + 1`.
    pub order: usize,
    pub residual: Expr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariationReport {
    pub entries: Vec<VariationEntry>,
}

impl VariationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.residual.is_zero())
    }

    pub fn first_failure(&self) -> Option<&VariationEntry> {
        self.entries.iter().find(|e| !e.residual.is_zero())
    }
}

/// Residuals `(𝓛_{D_i} ω_J)(Z) − D_i(ω_J(Z))`, `ω_J = 𝓛_{D_J} ω`, for every
/// basis form, `|J| < k` and direction `i`.
pub fn check_variation(d: &Diffiety, z: &VectorField, basis: &[OneForm], k: usize) -> Result<VariationReport> {
    let mut report = VariationReport::default();
    let n = d.n().max(1);
    for (fi, w) in basis.iter().enumerate() {
        let mut shifted: BTreeMap<MultiIndex, OneForm> = BTreeMap::new();
        shifted.insert(MultiIndex::empty(), w.clone());
        for r in 0..k {
            for jdx in MultiIndex::all_of_order(n, r) {
                let wj = shifted_form(d, &mut shifted, &jdx)?;
                let wz = forms::contract(&wj, z)?;
                for i in 1..=n {
                    let lw = shifted_form(d, &mut shifted, &jdx.with(i))?;
                    let residual = forms::contract(&lw, z)?.sub(&d.total(i, &wz)?);
                    report.entries.push(VariationEntry {
                        form: fi,
                        shift: jdx.clone(),
                        direction: i,
                        order: r + 1,
                        residual,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn shifted_form(
    d: &Diffiety,
    memo: &mut BTreeMap<MultiIndex, OneForm>,
    idx: &MultiIndex,
) -> Result<OneForm> {
    if let Some(f) = memo.get(idx) {
        return Ok(f.clone());
    }
    let i = *idx.as_slice().last().expect("nonempty") as usize;
    let below = idx.minus(&MultiIndex::repeat(i, 1)).expect("present");
    let prev = shifted_form(d, memo, &below)?;
    let f = forms::lie_total(d, &prev, i)?;
    memo.insert(idx.clone(), f.clone());
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupVerdict {
    /// Every `𝓛_Z^{k+1} γ` lies in the span of the lower iterates.
    Generates,
    /// Closure not reached within the bound.
    Exceeds(usize),
}

/// Finite-closure test: iterate `𝓛_Z` on each `γ ∈ Γ` up to `k + 1` times.
pub fn group_check(d: &Diffiety, z: &VectorField, gamma: &[OneForm], k: usize) -> Result<GroupVerdict> {
    let mut lower = Vec::new();
    let mut top = Vec::new();
    for g in gamma {
        let mut cur = g.clone();
        for _ in 0..=k {
            lower.push(cur.clone());
            cur = forms::lie_field(d, &cur, z)?;
        }
        top.push(cur);
    }
    for t in &top {
        if forms::represent(t, &lower, false) == Representation::NotInSpan {
            return Ok(GroupVerdict::Exceeds(k));
        }
    }
    Ok(GroupVerdict::Generates)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContactVerdict {
    Contact(Expr),
    NotContact {
        /// `𝓛_Zω¹` with the `dx` terms removed.
        remainder: OneForm,
    },
}

/// On `M(1, n)`: contact iff `𝓛_Zω¹ = λω¹` modulo `dx`.
pub fn contact_check(d: &Arc<Diffiety>, z: &VectorField) -> Result<ContactVerdict> {
    let fam = single_family(d)?;
    let w = Expr::atom(d.coord(&fam, MultiIndex::empty()));
    let omega = forms::contact_form(d, &w)?;
    let lz = forms::lie_field(d, &omega, z)?;
    match forms::represent(&lz, std::slice::from_ref(&omega), true) {
        Representation::Coefficients(c) => Ok(ContactVerdict::Contact(c[0].clone())),
        Representation::NotInSpan => Ok(ContactVerdict::NotContact {
            remainder: lz.without_dx(),
        }),
    }
}
