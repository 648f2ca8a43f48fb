//! Greedy selection of the involutive families of a filtration term.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{Atom, Q};
use crate::forms::{self, OneForm};
use crate::jet::Diffiety;
use crate::linalg;

/// Number of independent randomized trials.
pub const TRIALS: u64 = 3;
const POINT_RETRIES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trial {
    pub seed: u64,
    pub sigma: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveFamily {
    pub level: usize,
    /// Directions in the order they were processed.
    pub directions: Vec<usize>,
    pub sigma: Vec<usize>,
    /// Indices into the basis selected at each step.
    pub selected: Vec<Vec<usize>>,
    pub trials: Vec<Trial>,
    /// Every trial produced the same `σ`.
    pub stable: bool,
    /// Each selected image is outside the exact span of the basis and the
    /// previously selected images.
    pub verified: bool,
}

/// Random rational from the pool `p/q`, `0 < |p| ≤ 60`, `1 ≤ q ≤ 7`.
fn sample(rng: &mut ChaCha8Rng) -> Q {
    let p: i64 = loop {
        let p = rng.gen_range(-60..=60);
        if p != 0 {
            break p;
        }
    };
    Q::new(p.into(), rng.gen_range(1i64..=7).into())
}

/// Rows of coefficient values at one random point over a fixed column set.
fn evaluate(rows: &[OneForm], cols: &[Atom], rng: &mut ChaCha8Rng) -> Option<Vec<Vec<Q>>> {
    let mut atoms = BTreeSet::new();
    for r in rows {
        for (_, g) in r.terms() {
            atoms.extend(g.atoms());
        }
    }
    let point: BTreeMap<Atom, Q> = atoms.into_iter().map(|a| (a, sample(rng))).collect();
    let value = |a: &Atom| point.get(a).cloned().unwrap_or_else(Q::zero);
    rows.iter()
        .map(|r| cols.iter().map(|c| r.coeff(c).eval(&value)).collect::<Option<Vec<Q>>>())
        .collect()
}

fn columns(forms: &[&OneForm]) -> Vec<Atom> {
    let mut set = BTreeSet::new();
    for f in forms {
        set.extend(f.support());
    }
    set.into_iter().collect()
}

fn rank_at(rows: &[OneForm], cols: &[Atom], rng: &mut ChaCha8Rng) -> Result<usize> {
    for _ in 0..POINT_RETRIES {
        if let Some(m) = evaluate(rows, cols, rng) {
            return Ok(linalg::rank_q(m));
        }
    }
    Err(Error::Invalid("no admissible sample point found".into()))
}

/// One greedy run with rank tests at points drawn from `seed`.
fn greedy(
    basis: &[OneForm],
    images: &[Vec<OneForm>],
    seed: u64,
) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<&OneForm> = basis.iter().collect();
    all.extend(images.iter().flatten());
    let cols = columns(&all);
    let mut span: Vec<OneForm> = basis.to_vec();
    let mut rank = rank_at(&span, &cols, &mut rng)?;
    let mut sigma = Vec::new();
    let mut selected = Vec::new();
    for step in images {
        let mut chosen = Vec::new();
        for (k, img) in step.iter().enumerate() {
            span.push(img.clone());
            let r = rank_at(&span, &cols, &mut rng)?;
            if r > rank {
                rank = r;
                chosen.push(k);
            } else {
                span.pop();
            }
        }
        sigma.push(chosen.len());
        selected.push(chosen);
    }
    Ok((sigma, selected))
}

/// For each direction `i` in `directions`, a maximal family of basis forms
/// whose `𝓛_{D_i}`-images are independent modulo the basis and all images
/// selected before.
pub fn involutive_family(
    d: &Diffiety,
    basis: &[OneForm],
    directions: &[usize],
    level: usize,
    seed: u64,
) -> Result<InvolutiveFamily> {
    let images: Vec<Vec<OneForm>> = directions
        .iter()
        .map(|&i| basis.iter().map(|w| forms::lie_total(d, w, i)).collect())
        .collect::<Result<_>>()?;
    let mut trials = Vec::new();
    let mut runs = Vec::new();
    for t in 0..TRIALS {
        let s = seed.wrapping_add(t);
        let run = greedy(basis, &images, s)?;
        trials.push(Trial {
            seed: s,
            sigma: run.0.clone(),
        });
        runs.push(run);
    }
    let stable = runs.windows(2).all(|w| w[0] == w[1]);
    let (sigma, selected) = runs.swap_remove(0);
    let mut span: Vec<OneForm> = basis.to_vec();
    let mut verified = true;
    for (step, chosen) in selected.iter().enumerate() {
        for &k in chosen {
            let img = &images[step][k];
            verified &= !forms::represent(img, &span, false).in_span();
            span.push(img.clone());
        }
    }
    Ok(InvolutiveFamily {
        level,
        directions: directions.to_vec(),
        sigma,
        selected,
        trials,
        stable,
        verified,
    })
}

/// `involutive_family` over the contact basis of level `l` with directions
/// `1..n` in order.
pub fn for_level(d: &Diffiety, l: usize, seed: u64) -> Result<InvolutiveFamily> {
    let basis: Vec<OneForm> = forms::contact_basis(d, l)?.into_iter().map(|(_, w)| w).collect();
    let dirs: Vec<usize> = (1..=d.n()).collect();
    involutive_family(d, &basis, &dirs, l, seed)
}
